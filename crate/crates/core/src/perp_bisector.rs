//! Cone test from the perpendicular-bisector restriction: at a planar RE,
//! the bodies surrounding a dumbbell cannot all sit in one open cone of the
//! quadrants cut out by the dumbbell's rod line and its perpendicular
//! bisector. The rotational acceleration integrand supplies the sign.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Absolute distance below which a point counts as lying on an axis.
pub const AXIS_TOLERANCE: f64 = 1e-12;

/// One point mass of a discretized rigid body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMass<T = f64> {
    pub x: T,
    pub y: T,
    pub m: T,
}

/// A rigid planar body discretized into point masses on massless rods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedBody<T = f64> {
    pub label: String,
    pub points: Vec<PointMass<T>>,
}

impl<T: Real> DiscretizedBody<T> {
    pub fn new(label: impl Into<String>, points: Vec<PointMass<T>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParams(
                "a body needs at least one point".into(),
            ));
        }
        let total = points.iter().fold(T::zero(), |a, p| a + p.m);
        if !(total > T::zero()) {
            return Err(Error::InvalidParams(
                "body total mass must be positive".into(),
            ));
        }
        if points.iter().any(|p| !(p.m > T::zero())) {
            return Err(Error::InvalidParams(
                "every point mass must be positive".into(),
            ));
        }
        Ok(Self {
            label: label.into(),
            points,
        })
    }
}

/// The dumbbell under test: mass positions, mass ratios and body mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dumbbell<T = f64> {
    pub r1: [T; 2],
    pub r2: [T; 2],
    pub x1: T,
    pub x2: T,
    pub m1: T,
}

/// Occupancy report of the two open cones plus the rotational acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeReport<T = f64> {
    /// Open cone through quadrants 1 and 3.
    pub cone13_occupied: bool,
    /// Open cone through quadrants 2 and 4.
    pub cone24_occupied: bool,
    /// Some point lies on the rod line (within tolerance).
    pub on_rod_axis: bool,
    /// Some point lies on the perpendicular bisector.
    pub on_bisector_axis: bool,
    pub theta_ddot: T,
    pub verdict: ConeVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConeVerdict {
    /// Cone occupancy does not rule the configuration out as an RE.
    Compatible,
    /// Exactly one open cone occupied: cannot be an RE.
    ViolatesTheorem,
}

/// Aligned dumbbell mass positions plus the rotated per-body point lists.
type Aligned<T> = ([T; 2], [T; 2], Vec<Vec<PointMass<T>>>);

/// Rotate the configuration so the dumbbell lies along the horizontal axis.
fn align<T: Real>(db: &Dumbbell<T>, bodies: &[DiscretizedBody<T>]) -> Result<Aligned<T>> {
    let dx = db.r2[0] - db.r1[0];
    let dy = db.r2[1] - db.r1[1];
    let len = (dx * dx + dy * dy).sqrt();
    if !(len > T::zero()) {
        return Err(Error::InvalidParams("dumbbell has zero rod length".into()));
    }
    let (c, s) = (dx / len, dy / len);
    // Rotation by -alpha: (x, y) -> (c x + s y, -s x + c y).
    let rot = |p: [T; 2]| [c * p[0] + s * p[1], -s * p[0] + c * p[1]];
    let r1 = rot(db.r1);
    let r2 = rot(db.r2);
    let mut rotated = Vec::with_capacity(bodies.len());
    for body in bodies {
        let pts = body
            .points
            .iter()
            .map(|p| {
                let q = rot([p.x, p.y]);
                PointMass {
                    x: q[0],
                    y: q[1],
                    m: p.m,
                }
            })
            .collect();
        rotated.push(pts);
    }
    Ok((r1, r2, rotated))
}

/// Rotational acceleration of the dumbbell from the surrounding bodies,
/// theta_ddot = (2/M1) sum_k sum_p m_p (p_y - r1_y)
///              (1/|p - r2|^4 - 1/|p - r1|^4),
/// evaluated in the frame where the dumbbell is horizontal. Centrifugal
/// terms cancel identically and are not computed.
pub fn rotational_acceleration<T: Real>(
    db: &Dumbbell<T>,
    bodies: &[DiscretizedBody<T>],
) -> Result<T> {
    let (r1, r2, rotated) = align(db, bodies)?;
    let guard = T::c(AXIS_TOLERANCE);
    let mut total = T::zero();
    for pts in &rotated {
        for p in pts {
            let d1 = ((p.x - r1[0]).powi(2) + (p.y - r1[1]).powi(2)).sqrt();
            let d2 = ((p.x - r2[0]).powi(2) + (p.y - r2[1]).powi(2)).sqrt();
            if d1 < guard || d2 < guard {
                return Err(Error::Collision {
                    distance: d1.min(d2).as_f64(),
                    guard: AXIS_TOLERANCE,
                });
            }
            total += p.m * (p.y - r1[1]) * (T::one() / d2.powi(4) - T::one() / d1.powi(4));
        }
    }
    Ok(T::two() / db.m1 * total)
}

/// Cone occupancy test: a configuration with exactly one occupied open cone
/// cannot be an RE.
pub fn cone_check<T: Real>(
    db: &Dumbbell<T>,
    bodies: &[DiscretizedBody<T>],
) -> Result<ConeReport<T>> {
    let (r1, r2, rotated) = align(db, bodies)?;
    let rod_y = r1[1];
    let mid_x = (r1[0] + r2[0]) * T::half();
    let tol = T::c(AXIS_TOLERANCE);
    let mut cone13 = false;
    let mut cone24 = false;
    let mut on_rod = false;
    let mut on_bisector = false;
    for pts in &rotated {
        for p in pts {
            let dx = p.x - mid_x;
            let dy = p.y - rod_y;
            let on_b = dx.abs() <= tol;
            let on_r = dy.abs() <= tol;
            on_bisector |= on_b;
            on_rod |= on_r;
            if on_b || on_r {
                continue; // axis membership occupies neither open cone
            }
            if dx * dy > T::zero() {
                cone13 = true;
            } else {
                cone24 = true;
            }
        }
    }
    let theta_ddot = rotational_acceleration(db, bodies)?;
    let verdict = if cone13 != cone24 {
        ConeVerdict::ViolatesTheorem
    } else {
        ConeVerdict::Compatible
    };
    Ok(ConeReport {
        cone13_occupied: cone13,
        cone24_occupied: cone24,
        on_rod_axis: on_rod,
        on_bisector_axis: on_bisector,
        theta_ddot,
        verdict,
    })
}
