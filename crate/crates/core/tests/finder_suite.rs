//! Branch machinery invariants: branch-point consistency across families,
//! the overlap derivative sign-change bound, the region map, and
//! continuation closure of the asymmetric curves.

mod common;

use common::rng;
use gravre_core::finder::{
    db1_overlap_k, db1_overlap_region, l2_colinear_db1, polish_seed, trace_re_curve,
    trace_re_curve_both, trace_re_curve_config, AsymmetricFamily, BranchFamily, EndpointKind,
    OverlapRegion, ReBranch, TraceConfig,
};
use gravre_core::model::{Angles, Configuration, Db1Params, Db2Params};
use gravre_core::pitchfork::PitchforkNormalForm;
use gravre_core::pitchfork::{find_branch_point, normal_form, SymmetricFamily};
use rand::RngExt;

/// Build a polished asymmetric seed near a branch point from its quadratic
/// model, stepping far enough out that Newton does not fall back onto the
/// symmetric family.
fn seed_from_normal_form(p: &Db2Params, nf: &PitchforkNormalForm) -> (f64, f64, f64) {
    for &u in &[0.05f64, 0.1, 0.15, 0.2, 0.03] {
        for sign in [1.0, -1.0] {
            let theta1 = nf.theta_star.0 + sign * u * nf.p11;
            let g = nf.curve(theta1);
            let Ok((t1, t2)) = polish_seed(p, g[2], g[0], g[1]) else {
                continue;
            };
            // Reject polishes that fell back onto a symmetric family.
            let half_pi = std::f64::consts::FRAC_PI_2;
            let pi = std::f64::consts::PI;
            let fold = |t: f64| t.rem_euclid(pi);
            let asym = [0.0, half_pi].iter().all(|&a| {
                [0.0, half_pi].iter().all(|&b| {
                    let d1 = (fold(t1) - a).abs().min(pi - (fold(t1) - a).abs());
                    let d2 = (fold(t2) - b).abs().min(pi - (fold(t2) - b).abs());
                    (d1 * d1 + d2 * d2).sqrt() > 1e-3
                })
            });
            if asym {
                return (g[2], t1, t2);
            }
        }
    }
    panic!("no asymmetric seed found near r* = {}", nf.r_star);
}

#[test]
fn branch_points_satisfy_gradients_across_families() {
    // Every point emitted by a branch formula is an RE of the amended
    // potential at its own angular momentum.
    let db1: Db1Params = Db1Params::new(0.2, 0.55).unwrap();
    for branch in [
        ReBranch::db1_colinear_non_overlap(&db1, 400).unwrap(),
        ReBranch::db1_colinear_overlap(&db1, 400).unwrap(),
        ReBranch::db1_isosceles(&db1, 400).unwrap(),
    ] {
        for pt in branch.points.iter().step_by(23) {
            if pt.l2 <= 0.0 {
                continue;
            }
            let Angles::One(theta) = pt.angles else {
                unreachable!()
            };
            let (d1, d2) = db1.distances(pt.r, theta).unwrap();
            if d1.min(d2) < 1e-2 {
                continue; // near-contact: 1/d^3 cancellation hits the float floor
            }
            let (gr, gt) = db1.grad_v(pt.l2.sqrt(), pt.r, theta).unwrap();
            assert!(
                (gr * gr + gt * gt).sqrt() < 1e-8,
                "{:?} at r = {}",
                branch.family,
                pt.r
            );
        }
    }
    let db2: Db2Params = Db2Params::new(0.5, 0.3, 0.45, 0.7).unwrap();
    for branch in [
        ReBranch::db2_colinear(&db2, 400).unwrap(),
        ReBranch::db2_perp_isosceles(&db2, 400).unwrap(),
    ] {
        for pt in branch.points.iter().step_by(23) {
            if pt.l2 <= 0.0 {
                continue;
            }
            let Angles::Two(t1, t2) = pt.angles else {
                unreachable!()
            };
            let d = db2.distances(pt.r, t1, t2).unwrap();
            if d.iter().any(|&x| x < 1e-2) {
                continue;
            }
            let g = db2.grad_v(pt.l2.sqrt(), pt.r, t1, t2).unwrap();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(
                norm < 1e-8,
                "{:?} at r = {} norm {norm}",
                branch.family,
                pt.r
            );
        }
    }
    let trap: Db2Params = Db2Params::equal_mass(0.4, 0.7).unwrap();
    let branch = ReBranch::db2_trapezoid(&trap, 400).unwrap();
    for pt in branch.points.iter().step_by(23) {
        if pt.l2 <= 0.0 {
            continue;
        }
        let Angles::Two(t1, t2) = pt.angles else {
            unreachable!()
        };
        let d = trap.distances(pt.r, t1, t2).unwrap();
        if d.iter().any(|&x| x < 1e-2) {
            continue;
        }
        let g = trap.grad_v(pt.l2.sqrt(), pt.r, t1, t2).unwrap();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm < 1e-8, "trapezoid at r = {} norm {norm}", pt.r);
    }
}

#[test]
fn overlap_derivative_has_zero_or_two_sign_changes() {
    // Numerical stand-in for the Descartes-rule bound on the overlap
    // profile: d(L^2)/dR flips sign either 0 or 2 times, never more.
    let mut r = rng(41);
    for _ in 0..100 {
        let x1 = r.random_range(0.002..0.499);
        let m1 = r.random_range(0.05..0.95);
        let p: Db1Params = Db1Params::new(x1, m1).unwrap();
        let mut changes = 0;
        let mut prev: Option<f64> = None;
        let n = 10_000;
        for i in 1..n {
            let z = 2.0 * i as f64 / n as f64;
            let big_r = z / (2.0 - z);
            let k = db1_overlap_k(&p, big_r);
            if let Some(pk) = prev {
                if k * pk < 0.0 {
                    changes += 1;
                }
            }
            if k != 0.0 {
                prev = Some(k);
            }
        }
        assert!(
            changes == 0 || changes == 2,
            "x1={x1}, m1={m1}: {changes} sign changes"
        );
    }
}

#[test]
fn overlap_region_map_matches_direct_slope_sampling() {
    // Region classification via the k polynomial agrees with directly
    // sampling the profile derivative, cell by cell.
    let mut mismatches = 0;
    let nx = 24;
    let ny = 18;
    for i in 0..nx {
        for j in 0..ny {
            let x1 = 0.002 + 0.45 * (i as f64 + 0.5) / nx as f64;
            let m1 = 0.05 + 0.9 * (j as f64 + 0.5) / ny as f64;
            let p: Db1Params = Db1Params::new(x1, m1).unwrap();
            let via_k = db1_overlap_region(&p, 3000);
            // Direct: count slope sign changes of L^2(r) on the overlap.
            let mut changes = 0;
            let mut prev: Option<f64> = None;
            let n = 3000;
            for s in 1..n {
                let r = p.x2() * s as f64 / n as f64;
                let h = p.x2() * 1e-7;
                let (Ok(a), Ok(b)) = (l2_colinear_db1(&p, r - h), l2_colinear_db1(&p, r + h))
                else {
                    continue;
                };
                let d = b - a;
                if let Some(pd) = prev {
                    if d * pd < 0.0 {
                        changes += 1;
                    }
                }
                if d != 0.0 {
                    prev = Some(d);
                }
            }
            let direct = if changes >= 2 {
                OverlapRegion::OneOrThreeRe
            } else {
                OverlapRegion::OneRe
            };
            if direct != via_k {
                mismatches += 1;
            }
        }
    }
    // Boundary-adjacent cells may disagree at finite grid resolution.
    assert!(mismatches <= 2, "{mismatches} region mismatches");
}

#[test]
fn btp_trace_endpoints_and_closure() {
    // Trace B_TP from a seed built out of its own normal form, check the
    // endpoint radii, the family label, and forward/backward closure.
    let p: Db2Params = Db2Params::equal_mass(0.5, 0.75).unwrap();
    let r7 = find_branch_point(&p, SymmetricFamily::PerpP1, 0.385, 0.395).unwrap();
    let nf = normal_form(&p, SymmetricFamily::PerpP1, r7).unwrap();
    let seed = seed_from_normal_form(&p, &nf);
    let cfg = TraceConfig {
        max_step: 5e-4, // keep the polyline within 1e-5 of the curve
        ..Default::default()
    };
    // The configuration-taking entry point traces the same curve.
    let seed_config = Configuration::db2(seed.0, seed.1, seed.2, None).unwrap();
    let via_config = trace_re_curve_config(&p, &seed_config, 1.0, &cfg).unwrap();
    assert!(via_config.branch.points.len() > 10);
    let (branch, end_a, end_b) = trace_re_curve_both(&p, seed, &cfg).unwrap();
    assert_eq!(
        branch.family,
        BranchFamily::Db2Asymmetric(AsymmetricFamily::BTp)
    );
    let mut endpoint_rs: Vec<f64> = [end_a, end_b]
        .iter()
        .map(|e| match e {
            EndpointKind::SymmetricMerge { r, .. } => *r,
            other => panic!("unexpected endpoint {other:?}"),
        })
        .collect();
    endpoint_rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!((endpoint_rs[0] - 0.3600).abs() < 2e-3, "{endpoint_rs:?}");
    assert!((endpoint_rs[1] - 0.3893).abs() < 2e-3, "{endpoint_rs:?}");

    // Closure: tracing from near the other endpoint covers the same curve.
    // The second seed may land on the mirror arm (the +- arms are symmetry
    // images), so compare modulo the equal-mass angle symmetries.
    let r2 = find_branch_point(&p, SymmetricFamily::Trapezoid, 0.34, 0.38).unwrap();
    let nf2 = normal_form(&p, SymmetricFamily::Trapezoid, r2).unwrap();
    let seed2 = seed_from_normal_form(&p, &nf2);
    let (branch2, _, _) = trace_re_curve_both(&p, seed2, &cfg).unwrap();
    // The arms of a pitchfork pair are symmetry images of each other (the
    // equal-mass potential is invariant under theta_i -> theta_i + pi and
    // the joint reflection), and the two seeds may land on different arms.
    // The closure metric is therefore the Hausdorff distance between one
    // curve and the symmetry ORBIT of the other.
    let pi = std::f64::consts::PI;
    let coords = |pt: &gravre_core::finder::BranchPoint| {
        let Angles::Two(a, b) = pt.angles else {
            unreachable!()
        };
        [pt.r, a, b]
    };
    let seg_dist = |p: [f64; 3], u: [f64; 3], v: [f64; 3]| -> f64 {
        let d = [v[0] - u[0], v[1] - u[1], v[2] - u[2]];
        let w = [p[0] - u[0], p[1] - u[1], p[2] - u[2]];
        let dd = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        let t = if dd > 0.0 {
            ((w[0] * d[0] + w[1] * d[1] + w[2] * d[2]) / dd).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let e = [w[0] - t * d[0], w[1] - t * d[1], w[2] - t * d[2]];
        (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt()
    };
    let orbit_hausdorff =
        |xs: &[gravre_core::finder::BranchPoint], ys: &[gravre_core::finder::BranchPoint]| -> f64 {
            let mut worst: f64 = 0.0;
            for x in xs {
                let xp = coords(x);
                let mut best = f64::INFINITY;
                for s in [1.0, -1.0] {
                    for k1 in [-1.0, 0.0, 1.0] {
                        for k2 in [-1.0, 0.0, 1.0] {
                            // Transform the query point instead of the curve.
                            let q = [xp[0], s * (xp[1] - k1 * pi), s * (xp[2] - k2 * pi)];
                            for w in ys.windows(2) {
                                let d = seg_dist(q, coords(&w[0]), coords(&w[1]));
                                if d < best {
                                    best = d;
                                }
                            }
                        }
                    }
                }
                worst = worst.max(best);
            }
            worst
        };
    let d = orbit_hausdorff(&branch.points, &branch2.points)
        .max(orbit_hausdorff(&branch2.points, &branch.points));
    assert!(d < 1e-5, "orbit Hausdorff distance {d}");
}

#[test]
fn bcp_trace_endpoints() {
    let p: Db2Params = Db2Params::equal_mass(0.5, 0.75).unwrap();
    let r4 = find_branch_point(&p, SymmetricFamily::Colinear, 0.365, 0.372).unwrap();
    let nf = normal_form(&p, SymmetricFamily::Colinear, r4).unwrap();
    let seed = seed_from_normal_form(&p, &nf);
    let cfg = TraceConfig::default();
    let (branch, end_a, end_b) = trace_re_curve_both(&p, seed, &cfg).unwrap();
    assert_eq!(
        branch.family,
        BranchFamily::Db2Asymmetric(AsymmetricFamily::BCp)
    );
    let mut rs: Vec<f64> = [end_a, end_b]
        .iter()
        .map(|e| match e {
            EndpointKind::SymmetricMerge { r, .. } => *r,
            other => panic!("unexpected endpoint {other:?}"),
        })
        .collect();
    rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!((rs[0] - 0.3686).abs() < 2e-3, "{rs:?}");
    assert!((rs[1] - 0.3865).abs() < 2e-3, "{rs:?}");
}

#[test]
fn blp_trace_merges_with_perpendicular() {
    // Equal rods: the low-radius collision branch merges with the
    // perpendicular family at r = 0.3377.
    let p: Db2Params = Db2Params::equal_mass(0.5, 0.5).unwrap();
    let r2 = find_branch_point(&p, SymmetricFamily::PerpP2, 0.30, 0.36).unwrap();
    assert!((r2 - 0.3377).abs() < 5e-4, "r2 = {r2}");
    let nf = normal_form(&p, SymmetricFamily::PerpP2, r2).unwrap();
    let seed = seed_from_normal_form(&p, &nf);
    let cfg = TraceConfig {
        r_bounds: (1e-3, 10.0),
        ..Default::default()
    };
    let merge_of = |direction: f64| -> Option<f64> {
        match trace_re_curve(&p, seed, direction, &cfg) {
            Ok(outcome) => match outcome.endpoint {
                EndpointKind::SymmetricMerge { r, .. } => Some(r),
                _ => None,
            },
            // The opposite direction descends into the collision seed where
            // the curve hugs a razor-thin residual valley; it may fail
            // before the collision guard fires.
            Err(_) => None,
        }
    };
    let merge = merge_of(1.0)
        .or_else(|| merge_of(-1.0))
        .expect("one direction merges");
    assert!((merge - 0.3377).abs() < 2e-3, "merge at {merge}");
}

#[test]
fn seed_off_curve_is_rejected() {
    let p: Db2Params = Db2Params::equal_mass(0.5, 0.75).unwrap();
    let err = trace_re_curve(&p, (0.37, 0.3, 0.9), 1.0, &TraceConfig::default()).unwrap_err();
    assert!(matches!(err, gravre_core::Error::SeedNotOnCurve(_)));
}
