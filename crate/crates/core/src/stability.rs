//! Energetic classification (Hessian definiteness) and linear stability
//! (characteristic polynomials of the linearized reduced systems, with
//! Routh-Hurwitz conditions on the squared eigenvalue variable).

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finder::{
    isosceles_min_radius, l2_colinear_db1, l2_isosceles_db1, l2_perp_isosceles_db2,
    l2_trapezoid_db2,
};
use crate::linalg::{cubic_roots, quadratic_roots, sym_eigen2, sym_eigen3};
use crate::model::{Db1Params, Db2Params};
use crate::real::Real;

/// Relative threshold separating a zero eigenvalue from a signed one.
pub const SIGN_THRESHOLD: f64 = 1e-9;

/// Sign of a Hessian eigenvalue relative to the spectral scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EigenSign {
    Neg,
    Zero,
    Pos,
}

/// Definiteness classification of the amended potential at a critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EnergeticVerdict {
    /// Positive definite Hessian: nonlinearly stable (Dirichlet-Lagrange).
    StrictMinimum,
    Saddle,
    Maximum,
    Degenerate,
}

/// Linear stability of the reduced linearization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LinearVerdict {
    Stable,
    Unstable,
    /// Some criterion sits within the sign threshold of its boundary.
    Marginal,
}

/// Characteristic-polynomial coefficients of the linearization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LinearCoeffs<T = f64> {
    /// z^4 + c1 z^2 + c0.
    Db1 { c1: T, c0: T },
    /// z^6 + c2 z^4 + c1 z^2 + c0, plus the cubic discriminant in z^2.
    Db2 { c2: T, c1: T, c0: T, delta: T },
}

/// Full stability classification of one RE.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport<T = f64> {
    /// Eigenvalues ordered by coordinate axis (r, theta1[, theta2]).
    pub eigenvalues: Vec<T>,
    /// Signs of the same, thresholded at 1e-9 of the spectral scale.
    pub eigen_signs: Vec<EigenSign>,
    pub energetic: EnergeticVerdict,
    pub coeffs: LinearCoeffs<T>,
    pub linear: LinearVerdict,
}

fn sign_of<T: Real>(lambda: T, scale: T) -> EigenSign {
    let thr = T::c(SIGN_THRESHOLD) * scale.max(T::min_positive_value());
    if lambda > thr {
        EigenSign::Pos
    } else if lambda < -thr {
        EigenSign::Neg
    } else {
        EigenSign::Zero
    }
}

fn verdict_from_signs(signs: &[EigenSign]) -> EnergeticVerdict {
    if signs.contains(&EigenSign::Zero) {
        EnergeticVerdict::Degenerate
    } else if signs.iter().all(|s| *s == EigenSign::Pos) {
        EnergeticVerdict::StrictMinimum
    } else if signs.iter().all(|s| *s == EigenSign::Neg) {
        EnergeticVerdict::Maximum
    } else {
        EnergeticVerdict::Saddle
    }
}

/// Assign eigenvalues to coordinate axes by the permutation that best aligns
/// eigenvectors with the axes (largest total |component|).
fn axis_order<T: Real, const N: usize>(vecs: &[[T; N]; N]) -> [usize; N] {
    // vecs columns are eigenvectors. perms over at most 3 elements.
    let perms: Vec<Vec<usize>> = match N {
        2 => vec![vec![0, 1], vec![1, 0]],
        3 => vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ],
        _ => unreachable!("only 2x2 and 3x3 Hessians appear"),
    };
    let mut best_perm = perms[0].clone();
    let mut best_score = -T::one();
    for perm in &perms {
        // perm[axis] = eigenvector column assigned to that axis.
        let mut score = T::zero();
        for (axis, &col) in perm.iter().enumerate() {
            score += vecs[axis][col].abs();
        }
        if score > best_score {
            best_score = score;
            best_perm = perm.clone();
        }
    }
    let mut out = [0usize; N];
    out.copy_from_slice(&best_perm);
    out
}

/// Classify a 2x2 Hessian: axis-ordered eigenvalues, signs and verdict.
pub fn energetic_classify2<T: Real>(h: &[[T; 2]; 2]) -> (EnergeticVerdict, [EigenSign; 2], [T; 2]) {
    let (vals, vecs) = sym_eigen2(h);
    let order = axis_order::<T, 2>(&vecs);
    let ordered = [vals[order[0]], vals[order[1]]];
    let scale = vals[0].abs().max(vals[1].abs());
    let signs = [sign_of(ordered[0], scale), sign_of(ordered[1], scale)];
    (verdict_from_signs(&signs), signs, ordered)
}

/// Classify a 3x3 Hessian: eigenvalues ordered as (radial, theta1, theta2)
/// by the dominant component of each eigenvector, signs and verdict.
pub fn energetic_classify3<T: Real>(h: &[[T; 3]; 3]) -> (EnergeticVerdict, [EigenSign; 3], [T; 3]) {
    let (vals, vecs) = sym_eigen3(h);
    let order = axis_order::<T, 3>(&vecs);
    let ordered = [vals[order[0]], vals[order[1]], vals[order[2]]];
    let scale = vals.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let signs = [
        sign_of(ordered[0], scale),
        sign_of(ordered[1], scale),
        sign_of(ordered[2], scale),
    ];
    (verdict_from_signs(&signs), signs, ordered)
}

/// Closed-form coefficients of the Db1 linearization polynomial
/// z^4 + c1 z^2 + c0.
pub fn db1_linear_coeffs<T: Real>(p: &Db1Params<T>, l: T, r: T, theta: T) -> Result<(T, T)> {
    let bundle = p.hessian_v(l, r, theta, true)?; // checks the gradient
    let h = bundle.hessian;
    let b = p.b();
    let s = r * r + b;
    let kappa = s / (b * r * r);
    let c1 = h[0][0] + T::c(4.0) * b * l * l / (s * s * s) + kappa * h[1][1];
    let c0 = kappa * (h[1][1] * h[0][0] - h[0][1] * h[0][1]);
    Ok((c1, c0))
}

/// Db1 linear stability: c1^2 >= 4 c0, c1 >= 0, c0 >= 0 (imaginary
/// eigenvalue conditions for the even quartic). Each margin is measured
/// against a dimensionally matching external scale so near-boundary cases
/// classify as marginal.
pub fn db1_linear_verdict<T: Real>(c1: T, c0: T) -> LinearVerdict {
    let thr = T::c(SIGN_THRESHOLD);
    let margins = [
        (c1 * c1 - T::c(4.0) * c0, c1 * c1 + T::c(4.0) * c0.abs()),
        (c1, c1.abs() + c0.abs().sqrt()),
        (c0, c0.abs() + c1 * c1),
    ];
    verdict_from_margins(&margins, thr)
}

/// Closed-form coefficients and discriminant of the Db2 linearization
/// polynomial z^6 + c2 z^4 + c1 z^2 + c0.
pub fn db2_linear_coeffs<T: Real>(
    p: &Db2Params<T>,
    l: T,
    r: T,
    theta1: T,
    theta2: T,
) -> Result<(T, T, T, T)> {
    let bundle = p.hessian_v(l, r, theta1, theta2)?;
    let gn = bundle.gradient_norm();
    if gn >= T::c(1e-8) {
        return Err(Error::NotAnEquilibrium {
            grad_norm: gn.as_f64(),
        });
    }
    let h = bundle.hessian;
    let (vrr, vr1, vr2) = (h[0][0], h[0][1], h[0][2]);
    let (v1, v12, v2) = (h[1][1], h[1][2], h[2][2]);
    let (b1, b2) = (p.b1(), p.b2());
    let s = r * r + b1 + b2;
    let s3 = s * s * s;
    let r2 = r * r;
    let a1 = (r2 + b1) / (b1 * r2);
    let a2 = (r2 + b2) / (b2 * r2);
    let four = T::c(4.0);

    let c2 = vrr + a1 * v1 + a2 * v2 + T::two() * v12 / r2 + four * l * l * (b1 + b2) / s3;
    let c1 = four * l * l / (b1 * b2 * s3)
        * (b1 * b1 * v2 + b2 * b2 * v1 - T::two() * b1 * b2 * v12)
        + s / (b1 * b2 * r2) * (v1 * v2 - v12 * v12)
        + a1 * (vrr * v1 - vr1 * vr1)
        + a2 * (vrr * v2 - vr2 * vr2)
        + T::two() / r2 * (vrr * v12 - vr1 * vr2);
    let det_h =
        vrr * (v1 * v2 - v12 * v12) - vr1 * (vr1 * v2 - v12 * vr2) + vr2 * (vr1 * v12 - v1 * vr2);
    let c0 = s / (b1 * b2 * r2) * det_h;
    let delta = cubic_discriminant(c2, c1, c0);
    Ok((c2, c1, c0, delta))
}

/// Discriminant of w^3 + c2 w^2 + c1 w + c0; nonnegative iff all roots real.
pub fn cubic_discriminant<T: Real>(c2: T, c1: T, c0: T) -> T {
    T::c(18.0) * c0 * c1 * c2 - T::c(4.0) * c0 * c2 * c2 * c2 + c1 * c1 * c2 * c2
        - T::c(4.0) * c1 * c1 * c1
        - T::c(27.0) * c0 * c0
}

/// Db2 linear stability: discriminant >= 0 and all c_i > 0, with
/// dimensionally matching marginality scales (c2 ~ w^2, c1 ~ w^4,
/// c0 ~ w^6 in the eigenfrequency w).
pub fn db2_linear_verdict<T: Real>(c2: T, c1: T, c0: T, delta: T) -> LinearVerdict {
    let thr = T::c(SIGN_THRESHOLD);
    let third = T::one() / T::c(3.0);
    let delta_scale = T::c(18.0) * (c0 * c1 * c2).abs()
        + T::c(4.0) * (c0 * c2 * c2 * c2).abs()
        + (c1 * c1 * c2 * c2).abs()
        + T::c(4.0) * (c1 * c1 * c1).abs()
        + T::c(27.0) * (c0 * c0).abs();
    let margins = [
        (delta, delta_scale),
        (c2, c2.abs() + c1.abs().sqrt() + c0.abs().powf(third)),
        (c1, c1.abs() + c2 * c2 + c0.abs().powf(T::two() * third)),
        (c0, c0.abs() + c1.abs().powf(T::c(1.5)) + c2.abs().powi(3)),
    ];
    verdict_from_margins(&margins, thr)
}

/// Shared Routh-Hurwitz style margin logic: all quantities must be positive;
/// anything within `thr` of zero (relative to its own scale) is marginal,
/// never folded into stable.
fn verdict_from_margins<T: Real>(margins: &[(T, T)], thr: T) -> LinearVerdict {
    let mut marginal = false;
    let mut stable = true;
    for &(q, scale) in margins {
        let eps = thr * scale.max(T::min_positive_value());
        if q.abs() <= eps {
            marginal = true;
        } else if q < T::zero() {
            stable = false;
        }
    }
    if marginal {
        LinearVerdict::Marginal
    } else if stable {
        LinearVerdict::Stable
    } else {
        LinearVerdict::Unstable
    }
}

/// Eigenvalues z of z^4 + c1 z^2 + c0 (Db1 linearization).
pub fn db1_eigenvalues<T: Real>(c1: T, c0: T) -> [Complex<T>; 4] {
    let ws = quadratic_roots(c1, c0);
    let mut out = [Complex::new(T::zero(), T::zero()); 4];
    for (i, w) in ws.iter().enumerate() {
        let z = w.sqrt();
        out[2 * i] = z;
        out[2 * i + 1] = -z;
    }
    out
}

/// Eigenvalues z of z^6 + c2 z^4 + c1 z^2 + c0 (Db2 linearization).
pub fn db2_eigenvalues<T: Real>(c2: T, c1: T, c0: T) -> [Complex<T>; 6] {
    let ws = cubic_roots(c2, c1, c0);
    let mut out = [Complex::new(T::zero(), T::zero()); 6];
    for (i, w) in ws.iter().enumerate() {
        let z = w.sqrt();
        out[2 * i] = z;
        out[2 * i + 1] = -z;
    }
    out
}

/// Assemble the full report for a Db1 RE.
pub fn db1_report<T: Real>(p: &Db1Params<T>, l: T, r: T, theta: T) -> Result<StabilityReport<T>> {
    let bundle = p.hessian_v(l, r, theta, true)?;
    let (energetic, signs, vals) = energetic_classify2(&bundle.hessian);
    let (c1, c0) = db1_linear_coeffs(p, l, r, theta)?;
    Ok(StabilityReport {
        eigenvalues: vals.to_vec(),
        eigen_signs: signs.to_vec(),
        energetic,
        coeffs: LinearCoeffs::Db1 { c1, c0 },
        linear: db1_linear_verdict(c1, c0),
    })
}

/// Assemble the full report for a Db2 RE.
pub fn db2_report<T: Real>(
    p: &Db2Params<T>,
    l: T,
    r: T,
    theta1: T,
    theta2: T,
) -> Result<StabilityReport<T>> {
    let bundle = p.hessian_v(l, r, theta1, theta2)?;
    let gn = bundle.gradient_norm();
    if gn >= T::c(1e-8) {
        return Err(Error::NotAnEquilibrium {
            grad_norm: gn.as_f64(),
        });
    }
    let (energetic, signs, vals) = energetic_classify3(&bundle.hessian);
    let (c2, c1, c0, delta) = db2_linear_coeffs(p, l, r, theta1, theta2)?;
    Ok(StabilityReport {
        eigenvalues: vals.to_vec(),
        eigen_signs: signs.to_vec(),
        energetic,
        coeffs: LinearCoeffs::Db2 { c2, c1, c0, delta },
        linear: db2_linear_verdict(c2, c1, c0, delta),
    })
}

// ---------------------------------------------------------------------------
// Parameter-plane stability maps
// ---------------------------------------------------------------------------

/// Which branch family a stability map sweeps, with its fixed parameters.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum MapFamily<T = f64> {
    /// x-axis x1, y-axis r (> x2): colinear dumbbell/point mass.
    Db1ColinearNonOverlap { m1: T },
    /// x-axis x1, y-axis r (< x2): overlapped colinear.
    Db1ColinearOverlap { m1: T },
    /// x-axis x1, y-axis r (>= r_min): isosceles.
    Db1Isosceles { m1: T },
    /// x-axis M1, y-axis r: perpendicular isosceles two-dumbbell.
    Db2PerpIsosceles { ell1: T, x21: T },
    /// x-axis M1, y-axis r: equal-mass trapezoid.
    Db2Trapezoid { ell1: T },
}

/// Grid request for a stability map.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MapSpec<T = f64> {
    pub family: MapFamily<T>,
    pub x_range: (T, T),
    pub r_range: (T, T),
    pub nx: usize,
    pub ny: usize,
}

/// Per-cell classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CellClass {
    /// The family formula gives L^2 < 0 here.
    Nonphysical,
    /// Outside the family's domain (collision, below minimum radius, ...).
    OutOfDomain,
    Classified {
        energetic: EnergeticVerdict,
        linear: LinearVerdict,
    },
}

/// One evaluated map cell (cell centers).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MapCell<T = f64> {
    pub x: T,
    pub r: T,
    pub l2: T,
    pub class: CellClass,
}

/// A named overlay polyline (boundary curve) in map coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct Overlay<T = f64> {
    pub name: String,
    pub points: Vec<(T, T)>,
}

/// Stability verdicts on a parameter-plane grid plus boundary overlays.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityMap<T = f64> {
    pub spec: MapSpec<T>,
    /// Row-major, y (r) varying fastest.
    pub cells: Vec<MapCell<T>>,
    pub overlays: Vec<Overlay<T>>,
}

/// Evaluate the family at (x, r): returns (L^2, theta..., report closure).
fn classify_cell<T: Real>(family: &MapFamily<T>, x: T, r: T) -> (T, CellClass) {
    match *family {
        MapFamily::Db1ColinearNonOverlap { m1 } => {
            let Ok(p) = Db1Params::new(x, m1) else {
                return (T::nan(), CellClass::OutOfDomain);
            };
            if r <= p.x2() {
                return (T::nan(), CellClass::OutOfDomain);
            }
            db1_cell(&p, r, T::zero())
        }
        MapFamily::Db1ColinearOverlap { m1 } => {
            let Ok(p) = Db1Params::new(x, m1) else {
                return (T::nan(), CellClass::OutOfDomain);
            };
            if r >= p.x2() {
                return (T::nan(), CellClass::OutOfDomain);
            }
            db1_cell(&p, r, T::zero())
        }
        MapFamily::Db1Isosceles { m1 } => {
            let Ok(p) = Db1Params::new(x, m1) else {
                return (T::nan(), CellClass::OutOfDomain);
            };
            if r < isosceles_min_radius(&p) {
                return (T::nan(), CellClass::OutOfDomain);
            }
            let Ok((_, theta)) = l2_isosceles_db1(&p, r) else {
                return (T::nan(), CellClass::OutOfDomain);
            };
            db1_cell(&p, r, theta)
        }
        MapFamily::Db2PerpIsosceles { ell1, x21 } => {
            let Ok(p) = Db2Params::new(T::half(), x21, x, ell1) else {
                return (T::nan(), CellClass::OutOfDomain);
            };
            let big_r = r - p.ell2() * p.x22();
            if big_r <= T::zero() {
                return (T::nan(), CellClass::OutOfDomain);
            }
            let Ok(l2) = l2_perp_isosceles_db2(&p, big_r) else {
                return (T::nan(), CellClass::OutOfDomain);
            };
            db2_cell(&p, l2, r, T::FRAC_PI_2(), T::zero())
        }
        MapFamily::Db2Trapezoid { ell1 } => {
            let Ok(p) = Db2Params::equal_mass(x, ell1) else {
                return (T::nan(), CellClass::OutOfDomain);
            };
            let Ok(l2) = l2_trapezoid_db2(&p, r) else {
                return (T::nan(), CellClass::OutOfDomain);
            };
            db2_cell(&p, l2, r, T::FRAC_PI_2(), T::FRAC_PI_2())
        }
    }
}

fn db1_cell<T: Real>(p: &Db1Params<T>, r: T, theta: T) -> (T, CellClass) {
    let Ok(l2) = l2_colinear_or_isosceles(p, r, theta) else {
        return (T::nan(), CellClass::OutOfDomain);
    };
    if l2 < T::zero() {
        return (l2, CellClass::Nonphysical);
    }
    match db1_report(p, l2.sqrt(), r, theta) {
        Ok(rep) => (
            l2,
            CellClass::Classified {
                energetic: rep.energetic,
                linear: rep.linear,
            },
        ),
        Err(_) => (l2, CellClass::OutOfDomain),
    }
}

fn l2_colinear_or_isosceles<T: Real>(p: &Db1Params<T>, r: T, theta: T) -> Result<T> {
    if theta == T::zero() {
        l2_colinear_db1(p, r)
    } else {
        Ok(l2_isosceles_db1(p, r)?.0)
    }
}

fn db2_cell<T: Real>(p: &Db2Params<T>, l2: T, r: T, t1: T, t2: T) -> (T, CellClass) {
    if l2 < T::zero() {
        return (l2, CellClass::Nonphysical);
    }
    match db2_report(p, l2.sqrt(), r, t1, t2) {
        Ok(rep) => (
            l2,
            CellClass::Classified {
                energetic: rep.energetic,
                linear: rep.linear,
            },
        ),
        Err(_) => (l2, CellClass::OutOfDomain),
    }
}

/// Sweep the plane; cells run in parallel. Overlays traced per x-column:
/// the dL^2/dr = 0 locus plus family-specific domain boundaries.
pub fn stability_map<T: Real>(spec: &MapSpec<T>) -> StabilityMap<T> {
    let nx = spec.nx.max(2);
    let ny = spec.ny.max(2);
    let (x0, x1) = spec.x_range;
    let (r0, r1) = spec.r_range;
    let fx = move |i: usize| x0 + (x1 - x0) * T::c((i as f64 + 0.5) / nx as f64);
    let fr = move |j: usize| r0 + (r1 - r0) * T::c((j as f64 + 0.5) / ny as f64);

    let family = spec.family;
    let cells: Vec<MapCell<T>> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let i = idx / ny;
            let j = idx % ny;
            let x = fx(i);
            let r = fr(j);
            let (l2, class) = classify_cell(&family, x, r);
            MapCell { x, r, l2, class }
        })
        .collect();

    // dL^2/dr = 0 overlay: scan each column for derivative sign changes.
    let mut slope_zero: Vec<(T, T)> = Vec::new();
    let fine = (4 * ny).max(256);
    for i in 0..nx {
        let x = fx(i);
        let l2_at = |r: T| -> Option<T> {
            let (l2, class) = classify_cell(&family, x, r);
            match class {
                CellClass::OutOfDomain => None,
                _ => Some(l2),
            }
        };
        let mut prev: Option<(T, T)> = None; // (r, dl2)
        for j in 0..fine {
            let r = r0 + (r1 - r0) * T::c((j as f64 + 0.5) / fine as f64);
            let h = (r1 - r0) * T::c(1e-6);
            let (Some(a), Some(b)) = (l2_at(r - h), l2_at(r + h)) else {
                prev = None;
                continue;
            };
            let d = (b - a) / (T::two() * h);
            if let Some((rp, dp)) = prev {
                if d * dp < T::zero() {
                    // Linear interpolation of the zero crossing.
                    let t = dp / (dp - d);
                    slope_zero.push((x, rp + (r - rp) * t));
                }
            }
            prev = Some((r, d));
        }
    }
    let mut overlays = vec![Overlay {
        name: "dL2_dr_zero".into(),
        points: slope_zero,
    }];

    match family {
        MapFamily::Db1Isosceles { .. } => {
            let pts = (0..nx)
                .map(|i| {
                    let x = fx(i);
                    (x, (T::one() - T::two() * x).abs() * T::half())
                })
                .collect();
            overlays.push(Overlay {
                name: "r_min".into(),
                points: pts,
            });
        }
        MapFamily::Db1ColinearOverlap { .. } => {
            let pts = (0..nx)
                .map(|i| {
                    let x = fx(i);
                    (x, (T::one() - T::two() * x) * T::half())
                })
                .collect();
            overlays.push(Overlay {
                name: "r_eq_half_x2_minus_x1".into(),
                points: pts,
            });
        }
        MapFamily::Db2PerpIsosceles { ell1, x21 } => {
            let ell2 = T::one() - ell1;
            let x22 = T::one() - x21;
            let pts = (0..nx).map(|i| (fx(i), ell2 * x22)).collect();
            overlays.push(Overlay {
                name: "r_eq_ell2_x22".into(),
                points: pts,
            });
        }
        _ => {}
    }

    StabilityMap {
        spec: *spec,
        cells,
        overlays,
    }
}
