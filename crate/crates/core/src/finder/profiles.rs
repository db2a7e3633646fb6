//! Closed-form L^2(r) profiles of the named RE families.
//!
//! Each profile solves the radial requirement for L^2 along a family on
//! which the angular requirements hold identically. Signed-square
//! conventions are preserved, so nonphysical segments come out as L^2 < 0
//! rather than NaN.

use crate::error::{Error, Result};
use crate::model::{Db1Params, Db2Params};
use crate::real::Real;

/// Guard width around singular radii.
const SINGULAR_GUARD: f64 = 1e-12;

/// Signed square helper: x |x|.
#[inline]
fn signed_sq<T: Real>(x: T) -> T {
    x * x.abs()
}

/// Colinear dumbbell/point-mass profile,
/// L^2(r) = ((r^2+B)^2 / r) (x1 / ((r-x2)|r-x2|) + x2 / (r+x1)^2).
///
/// Negative values are nonphysical angular momenta and are returned as-is.
pub fn l2_colinear_db1<T: Real>(p: &Db1Params<T>, r: T) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::InvalidParams(format!("r must be positive, got {r}")));
    }
    if (r - p.x2()).abs() < T::c(SINGULAR_GUARD) {
        return Err(Error::SingularRadius { r: r.as_f64() });
    }
    let s = r * r + p.b();
    Ok(s * s / r * (p.x1() / signed_sq(r - p.x2()) + p.x2() / ((r + p.x1()) * (r + p.x1()))))
}

/// Isosceles dumbbell/point-mass profile.
///
/// Returns (L^2, theta) with theta = arccos((x2-x1)/(2r)) in [0, pi) and
/// L^2 = (r^2+B)^2 / (r^2 + M1 B)^(3/2).
pub fn l2_isosceles_db1<T: Real>(p: &Db1Params<T>, r: T) -> Result<(T, T)> {
    let r_min = isosceles_min_radius(p);
    if r < r_min {
        return Err(Error::BelowMinimumRadius {
            r: r.as_f64(),
            r_min: r_min.as_f64(),
        });
    }
    let cos_t = ((p.x2() - p.x1()) / (T::two() * r))
        .min(T::one())
        .max(-T::one());
    let theta = cos_t.acos();
    let s = r * r + p.b();
    let d_sq = r * r + p.m1() * p.b(); // = r^2 + x1 x2 = d1^2 = d2^2
    Ok((s * s / d_sq.powf(T::c(1.5)), theta))
}

/// Minimum radius of the isosceles family, |x2 - x1| / 2.
pub fn isosceles_min_radius<T: Real>(p: &Db1Params<T>) -> T {
    (p.x2() - p.x1()).abs() * T::half()
}

/// Radius of the isosceles profile's interior minimum, sqrt(B (3 - 4 M1)),
/// present only for M1 < 3/4.
pub fn isosceles_fold_radius<T: Real>(p: &Db1Params<T>) -> Option<T> {
    let three = T::c(3.0);
    if p.m1() < three / T::c(4.0) {
        Some((p.b() * (three - T::c(4.0) * p.m1())).sqrt())
    } else {
        None
    }
}

/// L^2 at the isosceles fold, (256/27 B M2)^(1/2); the corresponding
/// angular momentum is L_rb = (256/27 B M2)^(1/4).
pub fn isosceles_fold_l2<T: Real>(p: &Db1Params<T>) -> Option<T> {
    isosceles_fold_radius(p).map(|_| (T::c(256.0 / 27.0) * p.b() * p.m2()).sqrt())
}

/// Colinear two-dumbbell profile with signed squares; singular at the four
/// collision radii.
pub fn l2_colinear_db2<T: Real>(p: &Db2Params<T>, r: T) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::InvalidParams(format!("r must be positive, got {r}")));
    }
    for rad in p.colinear_singular_radii() {
        if (r - rad).abs() < T::c(SINGULAR_GUARD) {
            return Err(Error::SingularRadius { r: r.as_f64() });
        }
    }
    let a1p = p.x12() * p.ell1();
    let a1m = p.x11() * p.ell1();
    let a2m = p.x22() * p.ell2();
    let a2p = p.x21() * p.ell2();
    let s = r * r + p.b1() + p.b2();
    let first = p.x11()
        * (p.x21() / signed_sq(r + a1p - a2m) + p.x22() / ((r + a1p + a2p) * (r + a1p + a2p)));
    let second =
        p.x12() * (p.x21() / signed_sq(r - a1m - a2m) + p.x22() / signed_sq(r - a1m + a2p));
    Ok(s * s / r * (first + second))
}

/// Perpendicular isosceles two-dumbbell profile in the shifted radius
/// R = r - ell2 x22 > 0 (non-overlap); requires x11 = x12 = 1/2.
///
/// The x11 = x12 = 1/2 weights make the u = 1 and u = 2 halves of the
/// radial requirement coincide, so they sum to a single copy of each term
/// (the weights sum to one, they do not double the sum).
pub fn l2_perp_isosceles_db2<T: Real>(p: &Db2Params<T>, big_r: T) -> Result<T> {
    if p.x11() != T::half() {
        return Err(Error::InvalidParams(
            "perpendicular isosceles family requires x11 = x12 = 1/2".into(),
        ));
    }
    if !(big_r > T::zero()) {
        return Err(Error::InvalidParams(format!(
            "shifted radius R must be positive (non-overlap), got {big_r}"
        )));
    }
    let r = big_r + p.ell2() * p.x22();
    let quarter_l1sq = p.ell1() * p.ell1() / T::c(4.0);
    let d11 = (big_r * big_r + quarter_l1sq).sqrt();
    let d12 = ((big_r + p.ell2()) * (big_r + p.ell2()) + quarter_l1sq).sqrt();
    let s = r * r + p.b1() + p.b2();
    Ok(s * s / r
        * (p.x21() * big_r / (d11 * d11 * d11) + p.x22() * (big_r + p.ell2()) / (d12 * d12 * d12)))
}

/// Limit of the perpendicular isosceles profile as R -> 0.
pub fn l2_perp_isosceles_db2_at_zero<T: Real>(p: &Db2Params<T>) -> Result<T> {
    if p.x11() != T::half() {
        return Err(Error::InvalidParams(
            "perpendicular isosceles family requires x11 = x12 = 1/2".into(),
        ));
    }
    let quarter_l1sq = p.ell1() * p.ell1() / T::c(4.0);
    let num = p.x22() * p.x22() * p.ell2() * p.ell2()
        + p.x21() * p.x22() * p.ell2() * p.ell2() / p.m1()
        + quarter_l1sq / p.m2();
    let den = (p.ell2() * p.ell2() + quarter_l1sq).powf(T::c(1.5));
    Ok(num * num / den)
}

/// Rhombus radius r = (x22 - x21) ell2 / 2; `None` when x21 >= 1/2 makes it
/// nonphysical. Requires x11 = x12 = 1/2.
pub fn rhombus_radius<T: Real>(p: &Db2Params<T>) -> Result<Option<T>> {
    if p.x11() != T::half() {
        return Err(Error::InvalidParams(
            "rhombus family requires x11 = x12 = 1/2".into(),
        ));
    }
    let r = (p.x22() - p.x21()) * p.ell2() * T::half();
    Ok(if r > T::zero() { Some(r) } else { None })
}

/// Equal-mass trapezoid profile,
/// L^2(r) = (r^2+B1+B2)^2 / 2 (1/d11^3 + 1/d12^3) with
/// d11 = sqrt(r^2 + (l1-l2)^2/4), d12 = sqrt(r^2 + 1/4).
pub fn l2_trapezoid_db2<T: Real>(p: &Db2Params<T>, r: T) -> Result<T> {
    if !p.is_equal_mass() {
        return Err(Error::InvalidParams(
            "trapezoid family requires pairwise equal masses".into(),
        ));
    }
    if !(r > T::zero()) {
        return Err(Error::InvalidParams(format!("r must be positive, got {r}")));
    }
    let gap = (p.ell1() - p.ell2()) * T::half();
    let d11 = (r * r + gap * gap).sqrt();
    if d11 < T::c(SINGULAR_GUARD) {
        return Err(Error::SingularRadius { r: r.as_f64() });
    }
    let d12 = (r * r + T::c(0.25)).sqrt();
    let s = r * r + p.b1() + p.b2();
    Ok(s * s * T::half() * (T::one() / (d11 * d11 * d11) + T::one() / (d12 * d12 * d12)))
}

/// Degree-6 polynomial k(R) sharing the sign of d(L^2)/dR on the Db1
/// overlap branch (R = r / (x2 - r)); its sign changes locate the profile
/// extrema without differencing.
pub fn db1_overlap_k<T: Real>(p: &Db1Params<T>, big_r: T) -> T {
    let x1 = p.x1();
    let x2 = p.x2();
    let m1 = p.m1();
    let a = m1 * x2 + x1;
    let s = x1 * x1 + x1 * x2 + x2 * x2;
    let c6 = -T::two() * x1 * a;
    let c5 = -T::c(3.0) * x1 * (T::two() * x1 + T::one()) * a;
    let c4 = -T::c(3.0) * x1 * x1 * (T::two() * x1 + T::c(3.0)) * a;
    let c3 = -T::c(10.0) * x1.powi(5) - (T::c(11.0) * m1 + T::c(6.0)) * x1.powi(4) * x2
        + T::c(3.0) * (T::one() - T::c(3.0) * m1) * x1.powi(3) * x2 * x2
        + T::c(3.0) * (m1 - T::one()) * x1 * x2.powi(4)
        + m1 * x2.powi(5);
    let c2 = -T::c(3.0) * x1 * x2 * (x2 - x1) * ((T::two() - m1) * s + x1 * x2);
    let c1 = -T::c(3.0) * x1 * (x2 - x1) * s;
    let c0 = -x1 * x1 * (x2 - x1) * s;
    (((((c6 * big_r + c5) * big_r + c4) * big_r + c3) * big_r + c2) * big_r + c1) * big_r + c0
}

/// Qualitative shape of the Db1 overlap profile for x1 < x2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapRegion {
    /// d(L^2)/dR < 0 throughout: one RE for every L^2.
    OneRe,
    /// One increasing interval: one or three RE depending on L^2.
    OneOrThreeRe,
}

/// Classify the overlap region by counting sign changes of k(R) over a
/// compactified grid (R = z / (2 - z), z in (0, 2)).
pub fn db1_overlap_region<T: Real>(p: &Db1Params<T>, grid: usize) -> OverlapRegion {
    let mut changes = 0usize;
    let mut prev = db1_overlap_k(p, T::c(1e-6));
    for i in 1..=grid {
        let z = T::c(2.0 * i as f64 / (grid as f64 + 1.0));
        let big_r = z / (T::two() - z);
        let k = db1_overlap_k(p, big_r);
        if k * prev < T::zero() {
            changes += 1;
        }
        if k != T::zero() {
            prev = k;
        }
    }
    if changes >= 2 {
        OverlapRegion::OneOrThreeRe
    } else {
        OverlapRegion::OneRe
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colinear_db1_triple_root_values() {
        // Three RE at L^2 = 7/10 for (x1, M1) = (0.008, 1/2).
        let p: Db1Params = Db1Params::new(0.008, 0.5).unwrap();
        for &r in &[0.0865293, 0.721838, 0.80048] {
            let l2 = l2_colinear_db1(&p, r).unwrap();
            assert!((l2 - 0.7).abs() < 1e-3, "L^2({r}) = {l2}");
        }
    }

    #[test]
    fn colinear_db1_overlap_nonphysical_for_large_x1() {
        let p: Db1Params = Db1Params::new(0.7, 0.5).unwrap();
        for &r in &[0.05, 0.15, 0.25] {
            assert!(r < p.x2());
            assert!(l2_colinear_db1(&p, r).unwrap() < 0.0);
        }
    }

    #[test]
    fn colinear_db1_singular_radius() {
        let p: Db1Params = Db1Params::new(0.4, 0.5).unwrap();
        assert!(matches!(
            l2_colinear_db1(&p, p.x2()),
            Err(Error::SingularRadius { .. })
        ));
    }

    #[test]
    fn isosceles_reported_radii_and_angles() {
        // (x1, M1) = (3/4, 9/20), L^2 = 1.7: radii 0.3384 and 1.262 with
        // theta 0.7646 pi and 0.5634 pi.
        let p: Db1Params = Db1Params::new(0.75, 0.45).unwrap();
        let (l2a, ta) = l2_isosceles_db1(&p, 0.3384).unwrap();
        let (l2b, tb) = l2_isosceles_db1(&p, 1.262).unwrap();
        assert!((l2a - 1.7).abs() < 2e-3);
        assert!((l2b - 1.7).abs() < 2e-3);
        let pi = std::f64::consts::PI;
        assert!((ta - 0.7646 * pi).abs() < 0.002 * pi);
        assert!((tb - 0.5634 * pi).abs() < 0.002 * pi);
    }

    #[test]
    fn isosceles_equal_masses_sit_at_right_angle() {
        let p: Db1Params = Db1Params::new(0.5, 0.5).unwrap();
        for &r in &[0.2, 1.0, 7.0] {
            let (_, theta) = l2_isosceles_db1(&p, r).unwrap();
            assert!((theta - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        }
    }

    #[test]
    fn isosceles_fold_matches_numeric_minimum() {
        // Numeric oracle: grid + golden-section minimum of the profile.
        let p: Db1Params = Db1Params::new(0.5, 0.5).unwrap();
        let rb = isosceles_fold_radius(&p).unwrap();
        assert!((rb - 0.5f64.sqrt()).abs() < 1e-15);
        let l2b = isosceles_fold_l2(&p).unwrap();
        assert!((l2b.sqrt() - (256.0 / 27.0 * p.b() * p.m2()).powf(0.25)).abs() < 1e-12);

        let f = |r: f64| l2_isosceles_db1(&p, r).unwrap().0;
        let (mut a, mut b) = (0.05, 5.0);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - phi * (b - a);
            let d = a + phi * (b - a);
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let rmin = 0.5 * (a + b);
        assert!((rmin - rb).abs() < 1e-8);
        assert!((f(rmin) - l2b).abs() < 1e-10);
    }

    #[test]
    fn isosceles_below_minimum_radius_rejected() {
        let p: Db1Params = Db1Params::new(0.2, 0.5).unwrap();
        assert!(matches!(
            l2_isosceles_db1(&p, 0.1),
            Err(Error::BelowMinimumRadius { .. })
        ));
    }

    #[test]
    fn colinear_db2_positive_with_single_minimum() {
        let p: Db2Params = Db2Params::new(0.5, 0.1, 0.5, 0.5).unwrap();
        let r1 = p.colinear_singular_radii()[0];
        // Sample L^2 over the non-overlap domain and count direction changes.
        let n = 4000;
        let mut prev_l2: Option<f64> = None;
        let mut prev_sign = 0i8;
        let mut changes = 0;
        let mut all_positive = true;
        for i in 1..n {
            let z = 2.0 * i as f64 / n as f64;
            let big_r = z / (2.0 - z);
            let l2 = l2_colinear_db2(&p, r1 + big_r).unwrap();
            all_positive &= l2 > 0.0;
            if let Some(pl) = prev_l2 {
                let s = if l2 > pl { 1 } else { -1 };
                if prev_sign != 0 && s != prev_sign {
                    changes += 1;
                }
                prev_sign = s;
            }
            prev_l2 = Some(l2);
        }
        assert!(all_positive);
        assert_eq!(changes, 1, "exactly one interior minimum");
    }

    #[test]
    fn colinear_db2_blows_up_at_domain_ends() {
        let p: Db2Params = Db2Params::new(0.5, 0.1, 0.5, 0.5).unwrap();
        let r1 = p.colinear_singular_radii()[0];
        let near = l2_colinear_db2(&p, r1 + 1e-6).unwrap();
        let mid = l2_colinear_db2(&p, r1 + 1.0).unwrap();
        let far = l2_colinear_db2(&p, r1 + 1e5).unwrap();
        // 1/R^2 blowup at the collision end, linear growth at infinity.
        assert!(near > 1e6 && far > 1e4 && mid < near && mid < far);
    }

    #[test]
    fn perp_isosceles_limits() {
        let p: Db2Params = Db2Params::new(0.5, 0.75, 0.5, 0.75).unwrap();
        let at_zero = l2_perp_isosceles_db2_at_zero(&p).unwrap();
        let near_zero = l2_perp_isosceles_db2(&p, 1e-8).unwrap();
        assert!((near_zero - at_zero).abs() < 1e-5 * at_zero);
        // L^2 grows like R for large R, positive throughout.
        assert!(l2_perp_isosceles_db2(&p, 1e4).unwrap() > 1e3);
        for &big_r in &[0.01, 0.1, 1.0, 10.0] {
            assert!(l2_perp_isosceles_db2(&p, big_r).unwrap() > 0.0);
        }
        let bad: Db2Params = Db2Params::new(0.4, 0.75, 0.5, 0.75).unwrap();
        assert!(l2_perp_isosceles_db2(&bad, 1.0).is_err());
    }

    #[test]
    fn perp_isosceles_points_are_critical() {
        // The branch formula must satisfy the radial requirement exactly.
        let p: Db2Params = Db2Params::new(0.5, 0.75, 0.5, 0.75).unwrap();
        for &big_r in &[0.2, 0.8, 2.5] {
            let l2 = l2_perp_isosceles_db2(&p, big_r).unwrap();
            let r = big_r + p.ell2() * p.x22();
            let g = p
                .grad_v(l2.sqrt(), r, std::f64::consts::FRAC_PI_2, 0.0)
                .unwrap();
            let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
            assert!(norm < 1e-12, "gradient {norm} at R = {big_r}");
        }
    }

    #[test]
    fn rhombus_radius_cases() {
        let p: Db2Params = Db2Params::new(0.5, 0.5, 0.5, 0.5).unwrap();
        assert_eq!(rhombus_radius(&p).unwrap(), None);
        let p: Db2Params = Db2Params::new(0.5, 0.25, 0.5, 0.5).unwrap();
        let r = rhombus_radius(&p).unwrap().unwrap();
        assert!((r - 0.125).abs() < 1e-15);
        assert!(r < p.ell2() / 2.0);
        // All four distances equal there (oracle: direct evaluation).
        let d = p.distances(r, std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        for i in 1..4 {
            assert!((d[i] - d[0]).abs() < 1e-12, "d[{i}] = {} vs {}", d[i], d[0]);
        }
    }

    #[test]
    fn trapezoid_limits_and_curvature_signs() {
        // Unequal rods: finite positive at r -> 0.
        let p: Db2Params = Db2Params::equal_mass(0.5, 0.75).unwrap();
        assert!(l2_trapezoid_db2(&p, 1e-9).unwrap() > 0.0);
        // Equal rods: unbounded at r -> 0.
        let p: Db2Params = Db2Params::equal_mass(0.5, 0.5).unwrap();
        assert!(l2_trapezoid_db2(&p, 1e-6).unwrap() > 1e10);
        // Curvature of L(r) at 0+: negative for M1 < 3/4, positive for
        // M1 > 3/4 with small ell1.
        let second_diff = |p: &Db2Params, h: f64| {
            let l = |r: f64| l2_trapezoid_db2(p, r).unwrap().sqrt();
            l(3.0 * h) - 2.0 * l(2.0 * h) + l(h)
        };
        let low_m1: Db2Params = Db2Params::equal_mass(0.5, 0.75).unwrap();
        assert!(second_diff(&low_m1, 1e-3) < 0.0);
        let high_m1: Db2Params = Db2Params::equal_mass(0.9, 0.05).unwrap();
        assert!(second_diff(&high_m1, 1e-3) > 0.0);
    }

    #[test]
    fn overlap_region_classification() {
        // (0.008, 0.5) and (0.01, 0.75) sit in the one-or-three region.
        let p: Db1Params = Db1Params::new(0.008, 0.5).unwrap();
        assert_eq!(db1_overlap_region(&p, 2000), OverlapRegion::OneOrThreeRe);
        let p: Db1Params = Db1Params::new(0.01, 0.75).unwrap();
        assert_eq!(db1_overlap_region(&p, 2000), OverlapRegion::OneOrThreeRe);
        // Moderate x1 has a single RE per angular momentum.
        let p: Db1Params = Db1Params::new(0.1, 0.5).unwrap();
        assert_eq!(db1_overlap_region(&p, 2000), OverlapRegion::OneRe);
    }
}
