//! Normalized parameter sets, reduced configurations, and the amended
//! potentials of the two dumbbell models with their first and second
//! derivatives.

mod db1;
mod db2;

pub use db1::Db1Params;
pub use db2::Db2Params;

use serde::Serialize;

use crate::real::Real;

/// Distance below which two point masses are considered collided.
pub const COLLISION_GUARD: f64 = 1e-12;

/// Which reduced model a configuration lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Model {
    Kepler,
    Db1,
    Db2,
}

/// Angles of a reduced configuration; arity depends on the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Angles<T = f64> {
    /// Kepler: the reduced configuration is radius-only.
    None,
    /// Dumbbell/point mass: angle between the radius vector and the rod.
    One(T),
    /// Two dumbbells: angle of each rod against the radius vector.
    Two(T, T),
}

/// A point in reduced configuration space, optionally tagged with the
/// angular momentum that makes it an RE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Configuration<T = f64> {
    pub model: Model,
    pub r: T,
    pub angles: Angles<T>,
    /// Scalar angular momentum, scaled by 1/(M1 M2). `None` when the
    /// configuration is purely geometric. Always >= 0; nonphysical branches
    /// (L^2 < 0) are represented by signed L^2 elsewhere, never here.
    pub l: Option<T>,
}

impl<T: Real> Configuration<T> {
    /// Kepler configuration at radius `r`.
    pub fn kepler(r: T, l: Option<T>) -> crate::Result<Self> {
        Self::build(Model::Kepler, r, Angles::None, l)
    }

    /// Dumbbell/point-mass configuration; `theta` is reduced to [0, pi].
    pub fn db1(r: T, theta: T, l: Option<T>) -> crate::Result<Self> {
        Self::build(Model::Db1, r, Angles::One(reduce_db1_angle(theta)), l)
    }

    /// Two-dumbbell configuration; angles are reduced mod 2 pi.
    pub fn db2(r: T, theta1: T, theta2: T, l: Option<T>) -> crate::Result<Self> {
        Self::build(
            Model::Db2,
            r,
            Angles::Two(reduce_mod_tau(theta1), reduce_mod_tau(theta2)),
            l,
        )
    }

    fn build(model: Model, r: T, angles: Angles<T>, l: Option<T>) -> crate::Result<Self> {
        if !(r > T::zero()) {
            return Err(crate::Error::InvalidParams(format!(
                "configuration radius must be positive, got {r}"
            )));
        }
        if let Some(l) = l {
            if !(l >= T::zero()) {
                return Err(crate::Error::InvalidParams(format!(
                    "angular momentum must be nonnegative, got {l}"
                )));
            }
        }
        Ok(Self {
            model,
            r,
            angles,
            l,
        })
    }

    /// The single Db1 angle; panics if the model does not match.
    pub fn theta(&self) -> T {
        match self.angles {
            Angles::One(t) => t,
            _ => panic!("configuration is not a Db1 configuration"),
        }
    }

    /// The Db2 angle pair; panics if the model does not match.
    pub fn theta12(&self) -> (T, T) {
        match self.angles {
            Angles::Two(t1, t2) => (t1, t2),
            _ => panic!("configuration is not a Db2 configuration"),
        }
    }
}

/// Reduce an angle into [0, 2 pi).
pub fn reduce_mod_tau<T: Real>(theta: T) -> T {
    let tau = T::TAU();
    let mut t = theta % tau;
    if t < T::zero() {
        t += tau;
    }
    t
}

/// Reduce a Db1 angle into the fundamental domain [0, pi].
///
/// The Db1 potential depends on theta only through cos(theta), so it is even
/// and 2 pi periodic; every angle is equivalent to one in [0, pi].
pub fn reduce_db1_angle<T: Real>(theta: T) -> T {
    let t = reduce_mod_tau(theta);
    if t > T::PI() {
        T::TAU() - t
    } else {
        t
    }
}

/// How second derivatives were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DerivMethod {
    ClosedForm,
    FiniteDifference,
}

/// Value, gradient and Hessian of the amended potential at one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeBundle<const N: usize, T = f64> {
    pub value: T,
    pub gradient: [T; N],
    pub hessian: [[T; N]; N],
    pub method: DerivMethod,
}

impl<const N: usize, T: Real> DerivativeBundle<N, T> {
    /// Relative elementwise symmetry defect of the Hessian.
    pub fn hessian_symmetry_defect(&self) -> T {
        crate::linalg::symmetry_defect(&self.hessian)
    }

    /// Euclidean norm of the gradient.
    pub fn gradient_norm(&self) -> T {
        self.gradient
            .iter()
            .fold(T::zero(), |acc, g| acc + *g * *g)
            .sqrt()
    }
}

/// Collision guard shared by both models.
pub(crate) fn guard_distance<T: Real>(d: T) -> crate::Result<T> {
    let guard = T::c(COLLISION_GUARD);
    if d < guard {
        Err(crate::Error::Collision {
            distance: d.as_f64(),
            guard: COLLISION_GUARD,
        })
    } else {
        Ok(d)
    }
}
