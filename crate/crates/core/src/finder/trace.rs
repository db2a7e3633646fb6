//! Pseudo-arclength continuation of asymmetric RE curves through
//! (r, theta1, theta2) space for the equal-mass configuration.

use super::{AsymmetricFamily, BranchFamily, BranchPoint, ReBranch};
use crate::error::{Error, Result};
use crate::linalg::solve3;
use crate::model::{Angles, Configuration, Db2Params};
use crate::real::Real;

/// Continuation settings; the defaults match the radii scales of the
/// equal-mass asymmetric branches (widths of a few 1e-2 in r).
#[derive(Debug, Clone, Copy)]
pub struct TraceConfig {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// Residual target for accepted points.
    pub newton_tol: f64,
    /// Torus distance to a symmetric family that counts as a merge.
    pub merge_tol: f64,
    pub r_bounds: (f64, f64),
    pub max_halvings: u32,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            initial_step: 1e-3,
            min_step: 1e-9,
            max_step: 2e-2,
            max_steps: 200_000,
            newton_tol: 1e-10,
            merge_tol: 1e-4,
            r_bounds: (1e-4, 1e4),
            max_halvings: 10,
        }
    }
}

/// Why a trace stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndpointKind<T = f64> {
    /// Came within merge tolerance of a symmetric family at radius r.
    SymmetricMerge { theta1: T, theta2: T, r: T },
    /// Hit the configured radial bounds.
    RadialBound { r: T },
    /// Distances collapsed (collision seed of the equal-rod families).
    Collision { r: T, theta1: T, theta2: T },
    /// Ran out of steps.
    Exhausted,
}

/// A traced curve with endpoint diagnostics.
#[derive(Debug, Clone)]
pub struct TraceOutcome<T = f64> {
    pub branch: ReBranch<T>,
    pub endpoint: EndpointKind<T>,
}

/// Newton-polish an angle guess onto the angular-requirement curve at fixed
/// radius; seeds for [`trace_re_curve`] must satisfy the requirements to
/// 1e-8, which raw guesses (e.g. points of a pitchfork quadratic model)
/// usually do not.
pub fn polish_seed<T: Real>(p: &Db2Params<T>, r: T, theta1: T, theta2: T) -> Result<(T, T)> {
    let mut x = [r, theta1, theta2];
    polish_angles(p, &mut x, T::c(1e-12))?;
    let res = residual(p, x)?;
    let norm = res[0].abs().max(res[1].abs());
    if norm < T::c(1e-10) {
        Ok((x[1], x[2]))
    } else {
        Err(Error::SeedNotOnCurve(norm.as_f64()))
    }
}

/// [`trace_re_curve`] taking a validated configuration as the seed.
pub fn trace_re_curve_config<T: Real>(
    p: &Db2Params<T>,
    seed: &Configuration<T>,
    direction: T,
    cfg: &TraceConfig,
) -> Result<TraceOutcome<T>> {
    let (t1, t2) = seed.theta12();
    trace_re_curve(p, (seed.r, t1, t2), direction, cfg)
}

/// Continue the 2-equation angular-requirement system from `seed` in one
/// direction (`direction` = +1 / -1 flips the initial tangent).
pub fn trace_re_curve<T: Real>(
    p: &Db2Params<T>,
    seed: (T, T, T),
    direction: T,
    cfg: &TraceConfig,
) -> Result<TraceOutcome<T>> {
    if !p.is_equal_mass() {
        return Err(Error::InvalidParams(
            "continuation requires the pairwise equal mass configuration".into(),
        ));
    }
    let (r0, t1_0, t2_0) = seed;
    let res0 = residual(p, [r0, t1_0, t2_0])?;
    let res0_norm = res0[0].abs().max(res0[1].abs());
    if res0_norm >= T::c(1e-8) {
        return Err(Error::SeedNotOnCurve(res0_norm.as_f64()));
    }
    // Polish the seed at fixed radius before stepping.
    let mut x = [r0, t1_0, t2_0];
    polish_angles(p, &mut x, T::c(cfg.newton_tol))?;

    let mut points = vec![point_at(p, x)];
    let mut tangent = curve_tangent(p, x)?;
    for t in tangent.iter_mut() {
        *t *= direction;
    }
    let mut h = T::c(cfg.initial_step);
    let mut halvings = 0u32;
    let mut endpoint = EndpointKind::Exhausted;

    for _ in 0..cfg.max_steps {
        // Approach symmetric families geometrically so the merge ball is
        // never stepped over (the curve continues straight through the
        // pitchfork onto its mirror arm otherwise).
        let h_eff = match symmetric_distance(x) {
            d if d < T::c(10.0) * h => (d * T::c(0.25)).max(T::c(cfg.min_step)).min(h),
            _ => h,
        };
        let pred = [
            x[0] + h_eff * tangent[0],
            x[1] + h_eff * tangent[1],
            x[2] + h_eff * tangent[2],
        ];
        match correct(p, pred, &tangent, T::c(cfg.newton_tol)) {
            Some((corrected, iters)) => {
                halvings = 0;
                // Keep marching in the same direction.
                let mut new_tangent = curve_tangent(p, corrected)?;
                let dot = new_tangent
                    .iter()
                    .zip(tangent.iter())
                    .fold(T::zero(), |acc, (a, b)| acc + *a * *b);
                if dot < T::zero() {
                    for t in new_tangent.iter_mut() {
                        *t = -*t;
                    }
                }
                x = corrected;
                tangent = new_tangent;
                points.push(point_at(p, x));

                if let Some((s1, s2)) = near_symmetric(x, T::c(cfg.merge_tol)) {
                    endpoint = EndpointKind::SymmetricMerge {
                        theta1: s1,
                        theta2: s2,
                        r: x[0],
                    };
                    break;
                }
                if x[0] <= T::c(cfg.r_bounds.0) || x[0] >= T::c(cfg.r_bounds.1) {
                    endpoint = EndpointKind::RadialBound { r: x[0] };
                    break;
                }
                let collided = match p.distances(x[0], x[1], x[2]) {
                    Ok(d) => d.iter().any(|&v| v < T::c(1e-6)),
                    Err(_) => true,
                };
                if collided {
                    endpoint = EndpointKind::Collision {
                        r: x[0],
                        theta1: x[1],
                        theta2: x[2],
                    };
                    break;
                }
                // Step adaptation on corrector effort.
                if iters <= 3 {
                    h = (h * T::two()).min(T::c(cfg.max_step));
                } else if iters >= 8 {
                    h = (h * T::half()).max(T::c(cfg.min_step));
                }
            }
            None => {
                halvings += 1;
                if halvings > cfg.max_halvings || h * T::half() < T::c(cfg.min_step) {
                    // Corrector breakdown right next to a symmetric family
                    // is the pitchfork itself: the bordered Jacobian is
                    // singular there. Close the curve at the merge.
                    if symmetric_distance(x) < T::c(10.0 * cfg.merge_tol) {
                        if let Some((s1, s2)) = near_symmetric(x, T::c(10.0 * cfg.merge_tol)) {
                            endpoint = EndpointKind::SymmetricMerge {
                                theta1: s1,
                                theta2: s2,
                                r: x[0],
                            };
                            break;
                        }
                    }
                    // Likewise next to a mass collision (the low-radius
                    // seeds of the equal-rod families).
                    let near_collision = match p.distances(x[0], x[1], x[2]) {
                        Ok(d) => d.iter().any(|&v| v < T::c(1e-3)),
                        Err(_) => true,
                    };
                    if near_collision {
                        endpoint = EndpointKind::Collision {
                            r: x[0],
                            theta1: x[1],
                            theta2: x[2],
                        };
                        break;
                    }
                    return Err(Error::StepFailure(halvings));
                }
                h *= T::half();
            }
        }
    }
    Ok(TraceOutcome {
        branch: ReBranch::from_samples(
            BranchFamily::Db2Asymmetric(AsymmetricFamily::Unlabeled),
            points,
        ),
        endpoint,
    })
}

/// Trace both directions from a seed and splice the halves into one branch
/// ordered by arclength; also classifies the family from its endpoints.
pub fn trace_re_curve_both<T: Real>(
    p: &Db2Params<T>,
    seed: (T, T, T),
    cfg: &TraceConfig,
) -> Result<(ReBranch<T>, EndpointKind<T>, EndpointKind<T>)> {
    let fwd = trace_re_curve(p, seed, T::one(), cfg)?;
    let bwd = trace_re_curve(p, seed, -T::one(), cfg)?;
    let mut points: Vec<BranchPoint<T>> = bwd.branch.points.iter().rev().copied().collect();
    points.extend(fwd.branch.points.iter().skip(1).copied());
    let family = classify(&bwd.endpoint, &fwd.endpoint);
    let mut branch = ReBranch::from_samples(BranchFamily::Db2Asymmetric(family), points);
    // Reindex the spliced parameterization by cumulative arclength.
    let mut s = T::zero();
    let mut prev: Option<BranchPoint<T>> = None;
    for pt in branch.points.iter_mut() {
        if let Some(q) = prev {
            let (t1, t2) = two_angles(pt.angles);
            let (q1, q2) = two_angles(q.angles);
            let dr = pt.r - q.r;
            let d1 = t1 - q1;
            let d2 = t2 - q2;
            s += (dr * dr + d1 * d1 + d2 * d2).sqrt();
        }
        pt.param = s;
        prev = Some(*pt);
    }
    Ok((branch, bwd.endpoint, fwd.endpoint))
}

fn two_angles<T: Real>(a: Angles<T>) -> (T, T) {
    match a {
        Angles::Two(x, y) => (x, y),
        _ => panic!("trace points always carry two angles"),
    }
}

fn classify<T: Real>(a: &EndpointKind<T>, b: &EndpointKind<T>) -> AsymmetricFamily {
    #[derive(PartialEq, Clone, Copy)]
    enum End {
        C,
        P,
        T,
        CollAcot2,  // theta_i near acot(sqrt 2) = 0.6155
        CollObtuse, // theta_i near acos(-sqrt(2/3)) = 2.5261
        CollDiag,   // (pi/4, 3pi/4) seed
        CollTrap,   // (pi/2, pi/2) seed
        Other,
    }
    let near = |x: T, y: T| (x - y).abs() < T::c(0.15);
    let tag = |e: &EndpointKind<T>| -> End {
        match e {
            EndpointKind::SymmetricMerge { theta1, theta2, .. } => {
                let half_pi = T::FRAC_PI_2();
                let close = |x: T, y: T| (x - y).abs() < T::c(1e-3);
                let a1 = fold_pi(*theta1);
                let a2 = fold_pi(*theta2);
                if close(a1, T::zero()) && close(a2, T::zero()) {
                    End::C
                } else if close(a1, half_pi) && close(a2, half_pi) {
                    End::T
                } else {
                    End::P
                }
            }
            EndpointKind::Collision { theta1, theta2, .. } => {
                let a1 = fold_pi(*theta1);
                let a2 = fold_pi(*theta2);
                let acot2 = T::c(0.615_479_708_670_387_3); // acot(sqrt 2)
                let obtuse = T::c(2.526_112_944_919_646); // acos(-sqrt(2/3))
                let half_pi = T::FRAC_PI_2();
                let quarter_pi = T::FRAC_PI_4();
                if near(a1, acot2) && near(a2, acot2) {
                    End::CollAcot2
                } else if near(a1, obtuse) && near(a2, obtuse) {
                    End::CollObtuse
                } else if near(a1, half_pi) && near(a2, half_pi) {
                    End::CollTrap
                } else if (near(a1, quarter_pi) && near(a2, T::c(3.0) * quarter_pi))
                    || (near(a1, T::c(3.0) * quarter_pi) && near(a2, quarter_pi))
                {
                    End::CollDiag
                } else {
                    End::Other
                }
            }
            _ => End::Other,
        }
    };
    let radius = |e: &EndpointKind<T>| match e {
        EndpointKind::SymmetricMerge { r, .. } | EndpointKind::Collision { r, .. } => *r,
        _ => T::nan(),
    };
    match (tag(a), tag(b)) {
        (End::T, End::P) | (End::P, End::T) => AsymmetricFamily::BTp,
        // B_CP starts on the colinear family and ends on the perpendicular
        // one (colinear end at the smaller radius); B_PC is the reverse.
        (End::C, End::P) | (End::P, End::C) => {
            let (rc, rp) = if tag(a) == End::C {
                (radius(a), radius(b))
            } else {
                (radius(b), radius(a))
            };
            if rc < rp {
                AsymmetricFamily::BCp
            } else {
                AsymmetricFamily::BPc
            }
        }
        (End::C, End::C) => AsymmetricFamily::BCc,
        (End::CollAcot2, _) | (_, End::CollAcot2) => AsymmetricFamily::BLp,
        (End::CollObtuse, _) | (_, End::CollObtuse) => AsymmetricFamily::BRp,
        (End::CollDiag, _) | (_, End::CollDiag) => AsymmetricFamily::BC,
        (End::CollTrap, _) | (_, End::CollTrap) => AsymmetricFamily::BT,
        _ => AsymmetricFamily::Unlabeled,
    }
}

fn fold_pi<T: Real>(t: T) -> T {
    let pi = T::PI();
    let mut x = t % pi;
    if x < T::zero() {
        x += pi;
    }
    if pi - x < T::c(1e-3) {
        x = T::zero();
    }
    x
}

fn point_at<T: Real>(p: &Db2Params<T>, x: [T; 3]) -> BranchPoint<T> {
    let l2 = p.g_l2(x[0], x[1], x[2]).unwrap_or_else(|_| T::nan());
    BranchPoint {
        param: T::zero(),
        r: x[0],
        angles: Angles::Two(x[1], x[2]),
        l2,
    }
}

fn residual<T: Real>(p: &Db2Params<T>, x: [T; 3]) -> Result<[T; 2]> {
    p.angular_residuals_reduced(x[0], x[1], x[2])
}

/// Rows of the residual Jacobian over (r, theta1, theta2): angle columns are
/// closed form, the radial column is a central difference.
fn jacobian_rows<T: Real>(p: &Db2Params<T>, x: [T; 3]) -> Result<[[T; 3]; 2]> {
    let k1 = p.x11() * p.x12() * p.ell1();
    let k2 = p.x21() * p.x22() * p.ell2();
    let hh = p.angular_hessian_closed(x[0], x[1], x[2])?;
    let dr = T::c(1e-7) * T::one().max(x[0].abs());
    let fp = residual(p, [x[0] + dr, x[1], x[2]])?;
    let fm = residual(p, [x[0] - dr, x[1], x[2]])?;
    Ok([
        [
            (fp[0] - fm[0]) / (T::two() * dr),
            hh[0][0] / k1,
            hh[0][1] / k1,
        ],
        [
            (fp[1] - fm[1]) / (T::two() * dr),
            hh[1][0] / k2,
            hh[1][1] / k2,
        ],
    ])
}

/// Unit tangent of the curve: the null direction of the 2x3 Jacobian,
/// computed as the cross product of its rows.
fn curve_tangent<T: Real>(p: &Db2Params<T>, x: [T; 3]) -> Result<[T; 3]> {
    let j = jacobian_rows(p, x)?;
    let t = [
        j[0][1] * j[1][2] - j[0][2] * j[1][1],
        j[0][2] * j[1][0] - j[0][0] * j[1][2],
        j[0][0] * j[1][1] - j[0][1] * j[1][0],
    ];
    let n = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
    if n <= T::zero() || !n.is_finite() {
        return Err(Error::StepFailure(0));
    }
    Ok([t[0] / n, t[1] / n, t[2] / n])
}

/// Newton corrector for [residuals; pseudo-arclength constraint], with row
/// equilibration (the residual rows scale like 1/d^3 and dwarf the
/// arclength row near collisions otherwise).
fn correct<T: Real>(
    p: &Db2Params<T>,
    pred: [T; 3],
    tangent: &[T; 3],
    tol: T,
) -> Option<([T; 3], usize)> {
    let mut x = pred;
    let res0 = residual(p, pred).ok()?;
    // Residual floor: near collisions the surfaces are so large that an
    // absolute target below their rounding noise is unreachable.
    let tol_eff = tol.max(res0[0].abs().max(res0[1].abs()) * T::c(1e-12));
    for iter in 0..12 {
        let res = residual(p, x).ok()?;
        let cons = tangent[0] * (x[0] - pred[0])
            + tangent[1] * (x[1] - pred[1])
            + tangent[2] * (x[2] - pred[2]);
        let norm = res[0].abs().max(res[1].abs());
        if norm < tol_eff && cons.abs() < tol.max(T::c(1e-12)) {
            return Some((x, iter));
        }
        let j2 = jacobian_rows(p, x).ok()?;
        let mut jac = [j2[0], j2[1], *tangent];
        let mut rhs = [res[0], res[1], cons];
        for (row, r) in jac.iter_mut().zip(rhs.iter_mut()) {
            let s = row[0].abs().max(row[1].abs()).max(row[2].abs());
            if s > T::zero() {
                for v in row.iter_mut() {
                    *v /= s;
                }
                *r /= s;
            }
        }
        let step = solve3(&jac, &rhs)?;
        for k in 0..3 {
            x[k] -= step[k];
        }
        if !x[0].is_finite() || x[0] <= T::zero() {
            return None;
        }
    }
    None
}

/// Newton on the two angles at fixed radius.
fn polish_angles<T: Real>(p: &Db2Params<T>, x: &mut [T; 3], tol: T) -> Result<()> {
    let k1 = p.x11() * p.x12() * p.ell1();
    let k2 = p.x21() * p.x22() * p.ell2();
    for _ in 0..50 {
        let res = residual(p, *x)?;
        if res[0].abs().max(res[1].abs()) < tol {
            return Ok(());
        }
        let hh = p.angular_hessian_closed(x[0], x[1], x[2])?;
        let jac = [
            [hh[0][0] / k1, hh[0][1] / k1],
            [hh[1][0] / k2, hh[1][1] / k2],
        ];
        let Some(step) = crate::linalg::solve2(&jac, &[res[0], res[1]]) else {
            // Singular angular Jacobian: seed is at a branch point; accept.
            return Ok(());
        };
        x[1] -= step[0];
        x[2] -= step[1];
    }
    Ok(())
}

/// Torus distance from a state's angles to the nearest symmetric family.
fn symmetric_distance<T: Real>(x: [T; 3]) -> T {
    let half_pi = T::FRAC_PI_2();
    let pi = T::PI();
    let fold = |t: T| {
        let mut v = t % pi;
        if v < T::zero() {
            v += pi;
        }
        v
    };
    let pt = (fold(x[1]), fold(x[2]));
    let mut best = T::infinity();
    for a in [T::zero(), half_pi] {
        for b in [T::zero(), half_pi] {
            let d1 = {
                let d = (pt.0 - a).abs();
                d.min(pi - d)
            };
            let d2 = {
                let d = (pt.1 - b).abs();
                d.min(pi - d)
            };
            best = best.min((d1 * d1 + d2 * d2).sqrt());
        }
    }
    best
}

/// Distance to the nearest symmetric family representative (mod pi).
fn near_symmetric<T: Real>(x: [T; 3], tol: T) -> Option<(T, T)> {
    let half_pi = T::FRAC_PI_2();
    let symmetric = [
        (T::zero(), T::zero()),
        (half_pi, T::zero()),
        (T::zero(), half_pi),
        (half_pi, half_pi),
    ];
    let pi = T::PI();
    let fold = |t: T| {
        let mut v = t % pi;
        if v < T::zero() {
            v += pi;
        }
        v
    };
    let pt = (fold(x[1]), fold(x[2]));
    for s in symmetric {
        // Angle distances mod pi.
        let d1 = {
            let d = (pt.0 - s.0).abs();
            d.min(pi - d)
        };
        let d2 = {
            let d = (pt.1 - s.1).abs();
            d.min(pi - d)
        };
        if (d1 * d1 + d2 * d2).sqrt() < tol {
            return Some(s);
        }
    }
    None
}

/// Hausdorff distance between two traced curves in (r, theta1, theta2),
/// measured point-to-polyline so two samplings of the same curve compare as
/// coincident; used by the continuation-closure checks.
pub fn hausdorff_distance<T: Real>(a: &[BranchPoint<T>], b: &[BranchPoint<T>]) -> T {
    let coords = |pt: &BranchPoint<T>| {
        let (t1, t2) = two_angles(pt.angles);
        [pt.r, t1, t2]
    };
    let point_to_segment = |p: [T; 3], u: [T; 3], v: [T; 3]| -> T {
        let d = [v[0] - u[0], v[1] - u[1], v[2] - u[2]];
        let w = [p[0] - u[0], p[1] - u[1], p[2] - u[2]];
        let dd = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        let t = if dd > T::zero() {
            ((w[0] * d[0] + w[1] * d[1] + w[2] * d[2]) / dd)
                .max(T::zero())
                .min(T::one())
        } else {
            T::zero()
        };
        let e = [w[0] - t * d[0], w[1] - t * d[1], w[2] - t * d[2]];
        (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt()
    };
    let one_sided = |xs: &[BranchPoint<T>], ys: &[BranchPoint<T>]| -> T {
        let mut worst = T::zero();
        for x in xs {
            let xp = coords(x);
            let mut best = T::infinity();
            if ys.len() == 1 {
                best = point_to_segment(xp, coords(&ys[0]), coords(&ys[0]));
            }
            for w in ys.windows(2) {
                let d = point_to_segment(xp, coords(&w[0]), coords(&w[1]));
                if d < best {
                    best = d;
                }
            }
            if best > worst {
                worst = best;
            }
        }
        worst
    };
    one_sided(a, b).max(one_sided(b, a))
}
