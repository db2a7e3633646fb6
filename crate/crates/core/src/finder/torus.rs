//! RE search on the (theta1, theta2) torus at fixed radius for the
//! equal-mass two-dumbbell configuration.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::solve2;
use crate::model::Db2Params;
use crate::real::Real;

/// Grid scan + Newton polish settings.
#[derive(Debug, Clone, Copy)]
pub struct TorusSearch {
    /// Nodes per torus direction.
    pub grid: usize,
    /// Absolute residual target for the polished roots.
    pub residual_tol: f64,
    /// Torus distance below which two roots are the same RE.
    pub dedupe_tol: f64,
}

impl Default for TorusSearch {
    fn default() -> Self {
        Self {
            grid: 512,
            residual_tol: 1e-10,
            dedupe_tol: 1e-6,
        }
    }
}

/// All solutions of the equal-mass angular requirements on [0, 2 pi)^2 at
/// fixed radius, by sign-change cell scanning of the two reduced residual
/// surfaces followed by 2D Newton polish.
pub fn find_re_torus<T: Real>(p: &Db2Params<T>, r: T, search: &TorusSearch) -> Result<Vec<(T, T)>> {
    if !p.is_equal_mass() {
        return Err(Error::InvalidParams(
            "torus search requires the pairwise equal mass configuration".into(),
        ));
    }
    if !(r > T::zero()) {
        return Err(Error::InvalidParams(format!("r must be positive, got {r}")));
    }
    let n = search.grid.max(16);
    let tau = T::TAU();
    let h = tau / T::c(n as f64);

    // Residual surfaces at the grid nodes (wrapping).
    let mut f = vec![T::zero(); n * n];
    let mut g = vec![T::zero(); n * n];
    let rows: Vec<(usize, Vec<(T, T)>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let t1 = h * T::c(i as f64);
            let row = (0..n)
                .map(|j| {
                    let t2 = h * T::c(j as f64);
                    match p.angular_residuals_reduced(r, t1, t2) {
                        Ok([a, b]) => (a, b),
                        // Collision node: poison so no cell flags around it.
                        Err(_) => (T::nan(), T::nan()),
                    }
                })
                .collect();
            (i, row)
        })
        .collect();
    for (i, row) in rows {
        for (j, (a, b)) in row.into_iter().enumerate() {
            f[i * n + j] = a;
            g[i * n + j] = b;
        }
    }

    // Scale of the residual surfaces; the polish tolerance is relative to
    // it so that very large radii (tiny surfaces) still resolve sharply.
    let mut global_scale = T::zero();
    for v in f.iter().chain(g.iter()) {
        if v.is_finite() {
            global_scale = global_scale.max(v.abs());
        }
    }

    let sign_change = |vals: [T; 4]| -> bool {
        if vals.iter().any(|v| v.is_nan()) {
            return false;
        }
        let mut pos = false;
        let mut neg = false;
        for v in vals {
            pos |= v > T::zero();
            neg |= v < T::zero();
            if v == T::zero() {
                pos = true;
                neg = true;
            }
        }
        pos && neg
    };

    let mut candidates: Vec<(T, T)> = Vec::new();
    let mut ambiguous: Vec<(T, T)> = Vec::new();
    for i in 0..n {
        let ip = (i + 1) % n;
        for j in 0..n {
            let jp = (j + 1) % n;
            let corners_f = [f[i * n + j], f[ip * n + j], f[i * n + jp], f[ip * n + jp]];
            let corners_g = [g[i * n + j], g[ip * n + j], g[i * n + jp], g[ip * n + jp]];
            if sign_change(corners_f) && sign_change(corners_g) {
                let t1 = h * (T::c(i as f64) + T::half());
                let t2 = h * (T::c(j as f64) + T::half());
                match polish(p, r, t1, t2, h, global_scale, search) {
                    PolishOutcome::Converged(roots) => candidates.extend(roots),
                    PolishOutcome::Ghost => {}
                    PolishOutcome::Stuck => ambiguous.push((t1, t2)),
                }
            }
        }
    }
    if let Some(&(t1, t2)) = ambiguous.first() {
        return Err(Error::GridTooCoarse {
            theta1: t1.as_f64(),
            theta2: t2.as_f64(),
        });
    }

    // Dedupe by torus distance.
    let mut roots: Vec<(T, T)> = Vec::new();
    'outer: for c in candidates {
        for rt in &roots {
            if torus_dist(c, *rt) < T::c(search.dedupe_tol) {
                continue 'outer;
            }
        }
        roots.push(c);
    }
    roots.sort_by(|a, b| {
        (a.0, a.1)
            .partial_cmp(&(b.0, b.1))
            .expect("NaN root escaped polish")
    });
    Ok(roots)
}

enum PolishOutcome<T> {
    Converged(Vec<(T, T)>),
    Ghost,
    Stuck,
}

enum LmOutcome<T> {
    Root(T, T),
    /// Converged to a local minimum of the residual norm that is not a root
    /// (the two zero-curves pass each other without meeting).
    LocalMin,
    MaxIter,
}

/// Resolve one flagged cell. Levenberg-Marquardt from the cell center
/// handles transversal roots; unresolved subcells are refined recursively
/// (some features, like the near-collision branches of the equal-rod case,
/// are 1e-4 radians wide). A cell can hold several roots, e.g. a
/// symmetric pair, so every flagged subcell is polished.
fn polish<T: Real>(
    p: &Db2Params<T>,
    r: T,
    t1_0: T,
    t2_0: T,
    cell: T,
    global_scale: T,
    search: &TorusSearch,
) -> PolishOutcome<T> {
    let mut roots: Vec<(T, T)> = Vec::new();
    let push_root = |roots: &mut Vec<(T, T)>, root: (T, T)| {
        if roots
            .iter()
            .all(|q| torus_dist(root, *q) >= T::c(search.dedupe_tol))
        {
            roots.push(root);
        }
    };
    if let LmOutcome::Root(a, b) = lm(p, r, t1_0, t2_0, (t1_0, t2_0), cell, global_scale, search) {
        push_root(&mut roots, (a, b));
    }

    let sub = 8usize;
    let mut queue: Vec<(T, T, T)> = vec![(t1_0, t2_0, cell)]; // center + width
    let mut unresolved = false;
    for depth in 0..4 {
        let mut next: Vec<(T, T, T)> = Vec::new();
        for &(c1, c2, w) in &queue {
            // Node grid over the subcell; flag sign-change sub-subcells.
            let mut fs = vec![T::nan(); (sub + 1) * (sub + 1)];
            let mut gs = vec![T::nan(); (sub + 1) * (sub + 1)];
            for si in 0..=sub {
                for sj in 0..=sub {
                    let t1 = c1 + w * (T::c(si as f64 / sub as f64) - T::half());
                    let t2 = c2 + w * (T::c(sj as f64 / sub as f64) - T::half());
                    if let Ok([a, b]) = p.angular_residuals_reduced(r, t1, t2) {
                        fs[si * (sub + 1) + sj] = a;
                        gs[si * (sub + 1) + sj] = b;
                    }
                }
            }
            for si in 0..sub {
                for sj in 0..sub {
                    let idx = [
                        si * (sub + 1) + sj,
                        (si + 1) * (sub + 1) + sj,
                        si * (sub + 1) + sj + 1,
                        (si + 1) * (sub + 1) + sj + 1,
                    ];
                    let cf = [fs[idx[0]], fs[idx[1]], fs[idx[2]], fs[idx[3]]];
                    let cg = [gs[idx[0]], gs[idx[1]], gs[idx[2]], gs[idx[3]]];
                    let change = |v: [T; 4]| {
                        !v.iter().any(|x| x.is_nan())
                            && v.iter().any(|x| *x > T::zero())
                            && v.iter().any(|x| *x < T::zero())
                    };
                    if change(cf) && change(cg) {
                        let t1 = c1 + w * (T::c((si as f64 + 0.5) / sub as f64) - T::half());
                        let t2 = c2 + w * (T::c((sj as f64 + 0.5) / sub as f64) - T::half());
                        match lm(p, r, t1, t2, (t1_0, t2_0), cell, global_scale, search) {
                            LmOutcome::Root(a, b) => push_root(&mut roots, (a, b)),
                            LmOutcome::LocalMin => {}
                            LmOutcome::MaxIter => {
                                if depth + 1 < 4 && next.len() < 64 {
                                    next.push((t1, t2, w / T::c(sub as f64)));
                                } else {
                                    unresolved = true;
                                }
                            }
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        queue = next;
    }

    // Roots that wandered far belong to (and are found by) other cells.
    roots.retain(|rt| torus_dist(*rt, (t1_0, t2_0)) <= T::c(3.0) * cell);
    if !roots.is_empty() {
        PolishOutcome::Converged(roots)
    } else if unresolved {
        PolishOutcome::Stuck
    } else {
        PolishOutcome::Ghost
    }
}

/// Levenberg-Marquardt on the reduced angular residuals with the
/// closed-form Jacobian. Either finds a root, certifies a nonzero local
/// minimum of |F|, or runs out of iterations.
#[allow(clippy::too_many_arguments)]
fn lm<T: Real>(
    p: &Db2Params<T>,
    r: T,
    mut t1: T,
    mut t2: T,
    home: (T, T),
    cell: T,
    global_scale: T,
    search: &TorusSearch,
) -> LmOutcome<T> {
    let k1 = p.x11() * p.x12() * p.ell1();
    let k2 = p.x21() * p.x22() * p.ell2();
    let Some(mut res) = residual_norm(p, r, t1, t2) else {
        return LmOutcome::LocalMin;
    };
    // The 1e-10 target applies at O(1) residual scales; shrink it with the
    // surface scale (huge radii), and pad it with the local floating-point
    // floor (near-collision radii).
    let res_tol = (T::c(search.residual_tol) * T::one().min(global_scale))
        .max(res * T::c(1e-13))
        .max(T::c(1e-300));
    let step_tol = T::c(1e-13);
    let mut lambda = T::zero();
    for _ in 0..300 {
        if res < res_tol {
            return LmOutcome::Root(t1, t2);
        }
        let Ok([f0, g0]) = p.angular_residuals_reduced(r, t1, t2) else {
            return LmOutcome::LocalMin;
        };
        let Ok(hh) = p.angular_hessian_closed(r, t1, t2) else {
            return LmOutcome::LocalMin;
        };
        let j = [
            [hh[0][0] / k1, hh[0][1] / k1],
            [hh[1][0] / k2, hh[1][1] / k2],
        ];
        // Normal equations J^T J step = J^T F with LM damping.
        let jtj = [
            [
                j[0][0] * j[0][0] + j[1][0] * j[1][0],
                j[0][0] * j[0][1] + j[1][0] * j[1][1],
            ],
            [
                j[0][0] * j[0][1] + j[1][0] * j[1][1],
                j[0][1] * j[0][1] + j[1][1] * j[1][1],
            ],
        ];
        let jtf = [j[0][0] * f0 + j[1][0] * g0, j[0][1] * f0 + j[1][1] * g0];
        let scale = jtj[0][0].max(jtj[1][1]).max(T::min_positive_value());
        let mut advanced = false;
        for _ in 0..40 {
            let damped = [
                [jtj[0][0] + lambda * scale, jtj[0][1]],
                [jtj[1][0], jtj[1][1] + lambda * scale],
            ];
            let Some(step) = solve2(&damped, &jtf) else {
                lambda = (lambda * T::c(8.0)).max(T::c(1e-12));
                continue;
            };
            let step_norm = (step[0] * step[0] + step[1] * step[1]).sqrt();
            if step_norm < step_tol {
                return if res < res_tol {
                    LmOutcome::Root(t1, t2)
                } else {
                    LmOutcome::LocalMin
                };
            }
            let cand = (t1 - step[0], t2 - step[1]);
            if let Some(new_res) = residual_norm(p, r, cand.0, cand.1) {
                if new_res < res {
                    t1 = cand.0;
                    t2 = cand.1;
                    res = new_res;
                    lambda *= T::c(0.25);
                    advanced = true;
                    break;
                }
            }
            lambda = (lambda * T::c(8.0)).max(T::c(1e-12));
            if lambda > T::c(1e18) {
                return LmOutcome::LocalMin;
            }
        }
        if !advanced {
            return LmOutcome::LocalMin;
        }
        // Descending toward a root owned by another cell: stop here and let
        // that cell find it.
        if torus_dist((t1, t2), home) > T::c(3.0) * cell {
            return LmOutcome::LocalMin;
        }
    }
    if res < res_tol {
        LmOutcome::Root(t1, t2)
    } else {
        LmOutcome::MaxIter
    }
}

fn residual_norm<T: Real>(p: &Db2Params<T>, r: T, t1: T, t2: T) -> Option<T> {
    p.angular_residuals_reduced(r, t1, t2)
        .ok()
        .map(|[a, b]| a.abs().max(b.abs()))
}

/// Torus distance on [0, 2 pi)^2.
pub fn torus_dist<T: Real>(a: (T, T), b: (T, T)) -> T {
    let d1 = angle_dist(a.0, b.0, T::TAU());
    let d2 = angle_dist(a.1, b.1, T::TAU());
    (d1 * d1 + d2 * d2).sqrt()
}

fn angle_dist<T: Real>(a: T, b: T, period: T) -> T {
    let mut d = (a - b) % period;
    if d < T::zero() {
        d += period;
    }
    d.min(period - d)
}

/// Map solutions into [0, pi)^2 and dedupe: the equal-mass potential is
/// pi-periodic in each angle, so this quotients the internal dumbbell
/// relabeling symmetry.
pub fn reduce_mod_pi<T: Real>(solutions: &[(T, T)], tol: T) -> Vec<(T, T)> {
    let pi = T::PI();
    let mut out: Vec<(T, T)> = Vec::new();
    'outer: for &(a, b) in solutions {
        let mut ra = a % pi;
        if ra < T::zero() {
            ra += pi;
        }
        // Snap near-pi values to zero so boundary roots collapse.
        if pi - ra < tol {
            ra = T::zero();
        }
        let mut rb = b % pi;
        if rb < T::zero() {
            rb += pi;
        }
        if pi - rb < tol {
            rb = T::zero();
        }
        for existing in &out {
            let d1 = angle_dist(ra, existing.0, pi);
            let d2 = angle_dist(rb, existing.1, pi);
            if (d1 * d1 + d2 * d2).sqrt() < tol {
                continue 'outer;
            }
        }
        out.push((ra, rb));
    }
    out.sort_by(|x, y| (x.0, x.1).partial_cmp(&(y.0, y.1)).expect("NaN"));
    out
}
