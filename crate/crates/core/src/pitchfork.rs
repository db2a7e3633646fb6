//! Symmetry-breaking branch points on the equal-mass symmetric RE families
//! and their pitchfork normal-form data: the crossing eigenvalue, its radial
//! transversality, the cubic coefficient, and the quadratic branch model.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::sym_eigen2;
use crate::model::Db2Params;
use crate::real::Real;

/// The four symmetric equal-mass RE families (constant angles, any radius).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SymmetricFamily {
    /// (0, 0)
    Colinear,
    /// (pi/2, 0)
    PerpP1,
    /// (0, pi/2)
    PerpP2,
    /// (pi/2, pi/2)
    Trapezoid,
}

impl SymmetricFamily {
    pub fn angles<T: Real>(&self) -> (T, T) {
        let h = T::FRAC_PI_2();
        match self {
            SymmetricFamily::Colinear => (T::zero(), T::zero()),
            SymmetricFamily::PerpP1 => (h, T::zero()),
            SymmetricFamily::PerpP2 => (T::zero(), h),
            SymmetricFamily::Trapezoid => (h, h),
        }
    }

    pub const ALL: [SymmetricFamily; 4] = [
        SymmetricFamily::Colinear,
        SymmetricFamily::PerpP1,
        SymmetricFamily::PerpP2,
        SymmetricFamily::Trapezoid,
    ];
}

/// Normal-form data of one pitchfork branch point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PitchforkNormalForm<T = f64> {
    pub family: SymmetricFamily,
    /// Branch-point radius.
    pub r_star: T,
    /// Angles of the symmetric family (theta1*, theta2*).
    pub theta_star: (T, T),
    /// The nonzero eigenvalue of the angle Jacobian at the branch point.
    pub mu: T,
    /// Radial transversality d(mu_1)/dr of the crossing eigenvalue.
    pub k: T,
    /// Cubic coefficient l = (1/3) f_{u1 u1 u1}.
    pub l: T,
    /// Involutive orthogonal transition matrix [[p11, p12], [p12, -p11]];
    /// its first column is the null eigenvector, oriented so p11 > 0.
    pub p11: T,
    pub p12: T,
}

impl<T: Real> PitchforkNormalForm<T> {
    /// Tangent slope of the branch in the (theta1, theta2) plane.
    pub fn slope(&self) -> T {
        self.p12 / self.p11
    }

    /// Quadratic radial coefficient -(l/2k) (p11 + p12^2/p11)^2 of the
    /// branch model r = r* + quad (theta1 - theta1*)^2.
    pub fn quad(&self) -> T {
        let w = self.p11 + self.p12 * self.p12 / self.p11;
        -(self.l / (T::two() * self.k)) * w * w
    }

    /// Quadratic branch approximation G(theta1) = (theta1, theta2, r).
    pub fn curve(&self, theta1: T) -> [T; 3] {
        let d = theta1 - self.theta_star.0;
        [
            theta1,
            self.theta_star.1 + self.slope() * d,
            self.r_star + self.quad() * d * d,
        ]
    }
}

/// Determinant of the closed-form angle Jacobian of the angular gradient,
/// evaluated on a symmetric family at radius r.
fn angle_jacobian_det<T: Real>(p: &Db2Params<T>, family: SymmetricFamily, r: T) -> Result<T> {
    let (t1, t2) = family.angles::<T>();
    let h = p.angular_hessian_closed(r, t1, t2)?;
    Ok(h[0][0] * h[1][1] - h[0][1] * h[1][0])
}

/// Locate the first zero of the angle-Jacobian determinant on [lo, hi].
///
/// Poles of the determinant (collision radii of the family) also flip its
/// sign; a candidate bracket is accepted only when the determinant decays
/// toward the crossing.
pub fn find_branch_point<T: Real>(
    p: &Db2Params<T>,
    family: SymmetricFamily,
    lo: T,
    hi: T,
) -> Result<T> {
    let roots = find_branch_points(p, family, lo, hi, 4000)?;
    roots.into_iter().next().ok_or(Error::NoSignChange {
        lo: lo.as_f64(),
        hi: hi.as_f64(),
    })
}

/// All determinant zeros on [lo, hi], ascending.
pub fn find_branch_points<T: Real>(
    p: &Db2Params<T>,
    family: SymmetricFamily,
    lo: T,
    hi: T,
    scan: usize,
) -> Result<Vec<T>> {
    if !p.is_equal_mass() {
        return Err(Error::InvalidParams(
            "pitchfork analysis requires the pairwise equal mass configuration".into(),
        ));
    }
    if !(lo > T::zero() && hi > lo) {
        return Err(Error::InvalidParams("need 0 < lo < hi".into()));
    }
    let n = scan.max(64);
    let det = |r: T| angle_jacobian_det(p, family, r);
    let mut roots = Vec::new();
    let mut prev: Option<(T, T)> = None;
    for i in 0..=n {
        let r = lo + (hi - lo) * T::c(i as f64 / n as f64);
        let Ok(d) = det(r) else {
            prev = None;
            continue;
        };
        if let Some((rp, dp)) = prev {
            if d * dp < T::zero() {
                if let Some(root) = bisect_det(&det, rp, r, dp.abs().min(d.abs())) {
                    roots.push(root);
                }
            }
        }
        prev = Some((r, d));
    }
    Ok(roots)
}

fn bisect_det<T: Real>(
    det: &impl Fn(T) -> Result<T>,
    mut a: T,
    mut b: T,
    bracket_scale: T,
) -> Option<T> {
    let mut fa = det(a).ok()?;
    for _ in 0..200 {
        let mid = (a + b) * T::half();
        if (b - a).abs() <= T::c(1e-15) * T::one().max(mid.abs()) {
            break;
        }
        let fm = det(mid).ok()?;
        if fm == T::zero() {
            return Some(mid);
        }
        if fa * fm < T::zero() {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    let mid = (a + b) * T::half();
    let fm = det(mid).ok()?;
    // Reject pole crossings: the determinant grows toward a pole instead of
    // decaying toward a zero.
    if fm.abs() < bracket_scale {
        Some(mid)
    } else {
        None
    }
}

/// Compute the normal form at a branch point located by
/// [`find_branch_point`].
pub fn normal_form<T: Real>(
    p: &Db2Params<T>,
    family: SymmetricFamily,
    r_star: T,
) -> Result<PitchforkNormalForm<T>> {
    let (t1s, t2s) = family.angles::<T>();
    let sym_h = |r: T| -> Result<[[T; 2]; 2]> {
        let h = p.angular_hessian_closed(r, t1s, t2s)?;
        let off = (h[0][1] + h[1][0]) * T::half();
        Ok([[h[0][0], off], [off, h[1][1]]])
    };

    let h = sym_h(r_star)?;
    let (vals, vecs) = sym_eigen2(&h);
    let (small_idx, big_idx) = if vals[0].abs() < vals[1].abs() {
        (0, 1)
    } else {
        (1, 0)
    };
    let mu = vals[big_idx];
    if mu.abs() < T::c(1e-10) {
        return Err(Error::InvalidParams(
            "both eigenvalues vanish at the branch point; not a codimension-1 pitchfork".into(),
        ));
    }
    let mut p11 = vecs[0][small_idx];
    let mut p12 = vecs[1][small_idx];
    if p11 < T::zero() || (p11 == T::zero() && p12 < T::zero()) {
        p11 = -p11;
        p12 = -p12;
    }

    // Transversality: centered difference of the small eigenvalue in r.
    let small_eig = |r: T| -> Result<T> {
        let (v, _) = sym_eigen2(&sym_h(r)?);
        Ok(if v[0].abs() < v[1].abs() { v[0] } else { v[1] })
    };
    let hr = T::c(1e-4);
    let k = (small_eig(r_star + hr)? - small_eig(r_star - hr)?) / (T::two() * hr);
    if k.abs() < T::c(1e-10) {
        return Err(Error::InvalidParams(
            "crossing eigenvalue is not transversal in r".into(),
        ));
    }

    // Cubic coefficient along the null direction: l = (1/3) f_{u1 u1 u1},
    // f(u1) = p11 dV/dtheta1 + p12 dV/dtheta2 at theta* + u1 (p11, p12).
    let f = |u1: T| -> Result<T> {
        let g = p.grad_v(T::zero(), r_star, t1s + u1 * p11, t2s + u1 * p12)?;
        Ok(p11 * g[1] + p12 * g[2])
    };
    let third = |h: T| -> Result<T> {
        Ok(
            (f(T::two() * h)? - T::two() * f(h)? + T::two() * f(-h)? - f(-T::two() * h)?)
                / (T::two() * h * h * h),
        )
    };
    // Two-step Richardson ladder; keep halving while the error estimate
    // improves (l spans two orders of magnitude across the branch points,
    // so no single fixed step fits all).
    let richardson =
        |h: T| -> Result<T> { Ok((T::c(4.0) * third(h * T::half())? - third(h)?) / T::c(3.0)) };
    let mut h_step = T::c(0.04);
    let mut best = richardson(h_step)?;
    let mut best_err = T::infinity();
    for _ in 0..4 {
        let next = richardson(h_step * T::half())?;
        let err = (next - best).abs();
        if err < best_err {
            best = next;
            best_err = err;
            h_step *= T::half();
        } else {
            break;
        }
    }
    let l = best / T::c(3.0);
    if l.abs() < T::c(1e-10) {
        return Err(Error::DegeneratePitchfork(l.as_f64()));
    }

    Ok(PitchforkNormalForm {
        family,
        r_star,
        theta_star: (t1s, t2s),
        mu,
        k,
        l,
        p11,
        p12,
    })
}
