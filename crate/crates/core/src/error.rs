//! Error type shared by every module in the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while locating or classifying RE.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Two masses closer than the collision guard; the potential is singular.
    #[error("mass collision: distance {distance:e} below guard {guard:e}")]
    Collision { distance: f64, guard: f64 },

    /// An operation requiring a critical point was handed a non-critical one.
    #[error("configuration is not an equilibrium (|grad V| = {grad_norm:e})")]
    NotAnEquilibrium { grad_norm: f64 },

    /// Branch formula evaluated at a collision radius.
    #[error("singular radius r = {r}: masses collide there")]
    SingularRadius { r: f64 },

    /// Isosceles branch evaluated below its minimum radius |x2 - x1| / 2.
    #[error("radius {r} below the isosceles minimum radius {r_min}")]
    BelowMinimumRadius { r: f64, r_min: f64 },

    /// Constructor invariant violated.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Bracketing root search found no sign change on the interval.
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    /// Continuation seed does not satisfy the angular requirements.
    #[error("seed is not on the curve: angular residual {0:e}")]
    SeedNotOnCurve(f64),

    /// Continuation corrector failed repeatedly even at the minimum step.
    #[error("continuation step failed after {0} consecutive halvings")]
    StepFailure(u32),

    /// Torus scan flagged a cell that Newton polish cannot resolve.
    #[error("torus grid too coarse near (theta1, theta2) = ({theta1}, {theta2})")]
    GridTooCoarse { theta1: f64, theta2: f64 },

    /// Adaptive integrator drove the step below the representable minimum.
    #[error("integrator step underflow at t = {t}")]
    StepUnderflow { t: f64 },

    /// Pitchfork cubic coefficient vanished; quadratic branch model invalid.
    #[error("degenerate pitchfork: |l| = {0:e}")]
    DegeneratePitchfork(f64),
}
