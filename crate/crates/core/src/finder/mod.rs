//! RE production: closed-form branch profiles, root isolation at fixed L^2,
//! torus search at fixed radius, and pseudo-arclength continuation.

mod profiles;
mod torus;
mod trace;

pub use profiles::{
    db1_overlap_k, db1_overlap_region, isosceles_fold_l2, isosceles_fold_radius,
    isosceles_min_radius, l2_colinear_db1, l2_colinear_db2, l2_isosceles_db1,
    l2_perp_isosceles_db2, l2_perp_isosceles_db2_at_zero, l2_trapezoid_db2, rhombus_radius,
    OverlapRegion,
};
pub use torus::{find_re_torus, reduce_mod_pi, torus_dist, TorusSearch};
pub use trace::{
    hausdorff_distance, polish_seed, trace_re_curve, trace_re_curve_both, trace_re_curve_config,
    EndpointKind, TraceConfig, TraceOutcome,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Angles, Db1Params, Db2Params};
use crate::real::Real;

/// Named RE families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BranchFamily {
    Db1ColinearNonOverlap,
    Db1ColinearOverlap,
    Db1Isosceles,
    Db2Colinear,
    Db2PerpIsosceles,
    Db2Rhombus,
    Db2Trapezoid,
    Db2Asymmetric(AsymmetricFamily),
}

/// Asymmetric equal-mass families, named by the symmetric families they
/// connect (T = trapezoid, P = perpendicular, C = colinear; L/R = the two
/// low-radius collision seeds of the equal-rod case).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AsymmetricFamily {
    BTp,
    BCp,
    BCc,
    BPc,
    BC,
    BT,
    BLp,
    BRp,
    Unlabeled,
}

/// One sampled point of a branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchPoint<T = f64> {
    /// Parameterization variable (r, or a shifted/rational R).
    pub param: T,
    /// Physical separation of the centers of mass.
    pub r: T,
    pub angles: Angles<T>,
    /// Signed L^2 solving the radial requirement; negative = nonphysical.
    pub l2: T,
}

/// How the branch parameter maps to the physical radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Parameterization<T = f64> {
    /// param = r.
    Radius,
    /// r = param + offset (shifted non-overlap coordinates).
    ShiftedRadius { offset: T },
    /// r = x2 param / (1 + param) (Db1 overlap rational map).
    OverlapRational { x2: T },
}

impl<T: Real> Parameterization<T> {
    pub fn radius_of(&self, param: T) -> T {
        match *self {
            Parameterization::Radius => param,
            Parameterization::ShiftedRadius { offset } => param + offset,
            Parameterization::OverlapRational { x2 } => x2 * param / (T::one() + param),
        }
    }
}

/// Maximal runs of the sampled profile on which L^2 is strictly monotone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonotoneSegment {
    /// Inclusive sample index range.
    pub start: usize,
    pub end: usize,
    pub increasing: bool,
}

/// A sampled 1-parameter family of RE with its L^2 profile.
#[derive(Debug, Clone, Serialize)]
pub struct ReBranch<T = f64> {
    pub family: BranchFamily,
    pub parameterization: Parameterization<T>,
    pub points: Vec<BranchPoint<T>>,
    pub segments: Vec<MonotoneSegment>,
    #[serde(skip)]
    profile: Profile<T>,
}

#[derive(Debug, Clone)]
enum Profile<T> {
    Db1Colinear(Db1Params<T>),
    Db1Isosceles(Db1Params<T>),
    Db2Colinear(Db2Params<T>),
    Db2PerpIsosceles(Db2Params<T>),
    Db2Trapezoid(Db2Params<T>),
    /// Traced branches have no closed form; L^2 is interpolated.
    Sampled,
}

/// One solution of L^2(param) = L2 on a branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReSolution<T = f64> {
    pub r: T,
    pub angles: Angles<T>,
    pub multiplicity: u32,
    pub family: BranchFamily,
}

/// All solutions of L^2 = const on one branch, sorted by radius.
#[derive(Debug, Clone, Serialize)]
pub struct ReSolutionSet<T = f64> {
    pub requested_l2: T,
    pub solutions: Vec<ReSolution<T>>,
}

/// Default sample count for branch construction.
pub const DEFAULT_BRANCH_SAMPLES: usize = 4000;

impl<T: Real> ReBranch<T> {
    /// Db1 colinear family outside the overlap, r in (x2, inf), R = r - x2.
    pub fn db1_colinear_non_overlap(p: &Db1Params<T>, samples: usize) -> Result<Self> {
        let x2 = p.x2();
        let pp = *p;
        Self::sample_compactified(
            BranchFamily::Db1ColinearNonOverlap,
            Parameterization::ShiftedRadius { offset: x2 },
            Profile::Db1Colinear(pp),
            samples,
            move |param| {
                let r = param + x2;
                let l2 = l2_colinear_db1(&pp, r)?;
                Ok(BranchPoint {
                    param,
                    r,
                    angles: Angles::One(T::zero()),
                    l2,
                })
            },
        )
    }

    /// Db1 colinear family inside the overlap, r in (0, x2),
    /// R = r / (x2 - r).
    pub fn db1_colinear_overlap(p: &Db1Params<T>, samples: usize) -> Result<Self> {
        let x2 = p.x2();
        let pp = *p;
        Self::sample_compactified(
            BranchFamily::Db1ColinearOverlap,
            Parameterization::OverlapRational { x2 },
            Profile::Db1Colinear(pp),
            samples,
            move |param| {
                let r = x2 * param / (T::one() + param);
                let l2 = l2_colinear_db1(&pp, r)?;
                Ok(BranchPoint {
                    param,
                    r,
                    angles: Angles::One(T::zero()),
                    l2,
                })
            },
        )
    }

    /// Db1 isosceles family, r in [r_min, inf).
    pub fn db1_isosceles(p: &Db1Params<T>, samples: usize) -> Result<Self> {
        let r_min = isosceles_min_radius(p);
        let pp = *p;
        Self::sample_compactified(
            BranchFamily::Db1Isosceles,
            Parameterization::ShiftedRadius { offset: r_min },
            Profile::Db1Isosceles(pp),
            samples,
            move |param| {
                let r = param + r_min;
                let (l2, theta) = l2_isosceles_db1(&pp, r)?;
                Ok(BranchPoint {
                    param,
                    r,
                    angles: Angles::One(theta),
                    l2,
                })
            },
        )
    }

    /// Db2 colinear family outside the overlap, r > r1 = x11 l1 + x22 l2.
    pub fn db2_colinear(p: &Db2Params<T>, samples: usize) -> Result<Self> {
        let r1 = p.colinear_singular_radii()[0];
        let pp = *p;
        Self::sample_compactified(
            BranchFamily::Db2Colinear,
            Parameterization::ShiftedRadius { offset: r1 },
            Profile::Db2Colinear(pp),
            samples,
            move |param| {
                let r = param + r1;
                let l2 = l2_colinear_db2(&pp, r)?;
                Ok(BranchPoint {
                    param,
                    r,
                    angles: Angles::Two(T::zero(), T::zero()),
                    l2,
                })
            },
        )
    }

    /// Db2 perpendicular isosceles family, R = r - ell2 x22 > 0.
    pub fn db2_perp_isosceles(p: &Db2Params<T>, samples: usize) -> Result<Self> {
        let offset = p.ell2() * p.x22();
        let pp = *p;
        let half_pi = T::FRAC_PI_2();
        Self::sample_compactified(
            BranchFamily::Db2PerpIsosceles,
            Parameterization::ShiftedRadius { offset },
            Profile::Db2PerpIsosceles(pp),
            samples,
            move |param| {
                let l2 = l2_perp_isosceles_db2(&pp, param)?;
                Ok(BranchPoint {
                    param,
                    r: param + offset,
                    angles: Angles::Two(half_pi, T::zero()),
                    l2,
                })
            },
        )
    }

    /// Equal-mass trapezoid family, r in (0, inf).
    pub fn db2_trapezoid(p: &Db2Params<T>, samples: usize) -> Result<Self> {
        let pp = *p;
        let half_pi = T::FRAC_PI_2();
        Self::sample_compactified(
            BranchFamily::Db2Trapezoid,
            Parameterization::Radius,
            Profile::Db2Trapezoid(pp),
            samples,
            move |param| {
                let l2 = l2_trapezoid_db2(&pp, param)?;
                Ok(BranchPoint {
                    param,
                    r: param,
                    angles: Angles::Two(half_pi, half_pi),
                    l2,
                })
            },
        )
    }

    /// Wrap a traced point list (continuation output) as a branch.
    pub fn from_samples(family: BranchFamily, points: Vec<BranchPoint<T>>) -> Self {
        let segments = segment(&points);
        Self {
            family,
            parameterization: Parameterization::Radius,
            points,
            segments,
            profile: Profile::Sampled,
        }
    }

    fn sample_compactified(
        family: BranchFamily,
        parameterization: Parameterization<T>,
        profile: Profile<T>,
        samples: usize,
        eval: impl Fn(T) -> Result<BranchPoint<T>>,
    ) -> Result<Self> {
        let n = samples.max(16);
        let mut points = Vec::with_capacity(n);
        for i in 0..n {
            // z in (0, 2) maps to param = z / (2 - z) in (0, inf).
            let z = T::c(2.0) * T::c((i as f64 + 0.5) / n as f64);
            let param = z / (T::two() - z);
            match eval(param) {
                Ok(pt) => points.push(pt),
                // Skip collision-adjacent samples instead of aborting.
                Err(Error::Collision { .. }) | Err(Error::SingularRadius { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        if points.len() < 8 {
            return Err(Error::InvalidParams(
                "branch domain produced too few valid samples".into(),
            ));
        }
        let segments = segment(&points);
        Ok(Self {
            family,
            parameterization,
            points,
            segments,
            profile,
        })
    }

    /// Continuous profile evaluation at a parameter value.
    pub fn eval_l2(&self, param: T) -> Result<T> {
        let r = self.parameterization.radius_of(param);
        match &self.profile {
            Profile::Db1Colinear(p) => l2_colinear_db1(p, r),
            Profile::Db1Isosceles(p) => Ok(l2_isosceles_db1(p, r)?.0),
            Profile::Db2Colinear(p) => l2_colinear_db2(p, r),
            Profile::Db2PerpIsosceles(p) => l2_perp_isosceles_db2(p, param),
            Profile::Db2Trapezoid(p) => l2_trapezoid_db2(p, r),
            Profile::Sampled => {
                // Piecewise-linear interpolation over the recorded samples.
                let pts = &self.points;
                let mut best = None;
                for w in pts.windows(2) {
                    let (a, b) = (w[0].param, w[1].param);
                    if (param >= a && param <= b) || (param >= b && param <= a) {
                        let t = if b == a {
                            T::zero()
                        } else {
                            (param - a) / (b - a)
                        };
                        best = Some(w[0].l2 + t * (w[1].l2 - w[0].l2));
                        break;
                    }
                }
                best.ok_or_else(|| Error::InvalidParams("parameter outside traced branch".into()))
            }
        }
    }

    /// Angles of the family at a given radius.
    fn angles_at(&self, r: T) -> Angles<T> {
        match &self.profile {
            Profile::Db1Colinear(_) => Angles::One(T::zero()),
            Profile::Db1Isosceles(p) => {
                let cos_t = ((p.x2() - p.x1()) / (T::two() * r))
                    .min(T::one())
                    .max(-T::one());
                Angles::One(cos_t.acos())
            }
            Profile::Db2Colinear(_) => Angles::Two(T::zero(), T::zero()),
            Profile::Db2PerpIsosceles(_) => Angles::Two(T::FRAC_PI_2(), T::zero()),
            Profile::Db2Trapezoid(_) => Angles::Two(T::FRAC_PI_2(), T::FRAC_PI_2()),
            Profile::Sampled => Angles::None,
        }
    }

    /// Count and locate the RE with a prescribed L^2 on this branch by
    /// per-segment bisection. A target grazing a profile extremum within
    /// 1e-10 is reported as one solution of multiplicity 2.
    pub fn count_re_at_l2(&self, l2: T) -> ReSolutionSet<T> {
        let extrema = self.l2_extrema();
        let mut solutions: Vec<ReSolution<T>> = Vec::new();
        let graze_tol = T::c(1e-10) * T::one().max(l2.abs());

        // Tangencies first: they consume their two adjacent segments.
        let mut consumed_junctions: Vec<usize> = Vec::new();
        for (idx, &(param_e, r_e, l2_e)) in extrema.iter().enumerate() {
            if (l2 - l2_e).abs() <= graze_tol {
                let angles = match self.profile {
                    Profile::Sampled => self.interp_angles(param_e),
                    _ => self.angles_at(r_e),
                };
                solutions.push(ReSolution {
                    r: r_e,
                    angles,
                    multiplicity: 2,
                    family: self.family,
                });
                consumed_junctions.push(idx);
            }
        }

        for (seg_idx, seg) in self.segments.iter().enumerate() {
            // A segment between junctions idx-1 (its start) and idx (its
            // end); skip sides consumed by a tangency.
            let start_junction = seg_idx.checked_sub(1);
            let end_junction = if seg_idx + 1 < self.segments.len() {
                Some(seg_idx)
            } else {
                None
            };
            if start_junction.is_some_and(|j| consumed_junctions.contains(&j))
                || end_junction.is_some_and(|j| consumed_junctions.contains(&j))
            {
                // Refined extremum already accounts for a root at this end;
                // interior crossings far from it can still exist, but a
                // grazing target cannot cross the same monotone segment
                // twice, so skipping is safe.
                continue;
            }
            // Segment value range, with refined extremum values at the
            // junction ends (sampled maxima undershoot the true fold).
            let mut lo_v = self.points[seg.start].l2.min(self.points[seg.end].l2);
            let mut hi_v = self.points[seg.start].l2.max(self.points[seg.end].l2);
            if let Some(j) = start_junction {
                if let Some(&(_, _, v)) = extrema.get(j) {
                    lo_v = lo_v.min(v);
                    hi_v = hi_v.max(v);
                }
            }
            if let Some(j) = end_junction {
                if let Some(&(_, _, v)) = extrema.get(j) {
                    lo_v = lo_v.min(v);
                    hi_v = hi_v.max(v);
                }
            }
            if l2 < lo_v || l2 > hi_v {
                continue;
            }
            let Some(param) = self.bisect_segment_refined(
                seg,
                l2,
                start_junction.and_then(|j| extrema.get(j).copied()),
                end_junction.and_then(|j| extrema.get(j).copied()),
            ) else {
                continue;
            };
            let r = self.parameterization.radius_of(param);
            let angles = match self.profile {
                Profile::Sampled => self.interp_angles(param),
                _ => self.angles_at(r),
            };
            solutions.push(ReSolution {
                r,
                angles,
                multiplicity: 1,
                family: self.family,
            });
        }
        solutions.sort_by(|s1, s2| s1.r.partial_cmp(&s2.r).expect("NaN radius"));
        ReSolutionSet {
            requested_l2: l2,
            solutions,
        }
    }

    fn bisect_segment_refined(
        &self,
        seg: &MonotoneSegment,
        target: T,
        start_ext: Option<(T, T, T)>,
        end_ext: Option<(T, T, T)>,
    ) -> Option<T> {
        // Bracket endpoints: refined extremum params where the segment abuts
        // a junction, else the sampled endpoints.
        let p_start = start_ext
            .map(|(p, _, _)| p)
            .unwrap_or(self.points[seg.start].param);
        let v_start = start_ext
            .map(|(_, _, v)| v)
            .unwrap_or(self.points[seg.start].l2);
        let p_end = end_ext
            .map(|(p, _, _)| p)
            .unwrap_or(self.points[seg.end].param);
        let v_end = end_ext
            .map(|(_, _, v)| v)
            .unwrap_or(self.points[seg.end].l2);
        let (mut a, mut b, mut fa, fb) = (p_start, p_end, v_start - target, v_end - target);
        if fa == T::zero() {
            return Some(a);
        }
        if fb == T::zero() {
            return Some(b);
        }
        if fa * fb > T::zero() {
            return None;
        }
        for _ in 0..200 {
            let mid = (a + b) * T::half();
            if (b - a).abs() < T::c(1e-13) * T::one().max(mid.abs()) {
                return Some(mid);
            }
            let fm = match self.eval_l2(mid) {
                Ok(v) => v - target,
                Err(_) => return Some(mid),
            };
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
        Some((a + b) * T::half())
    }

    fn interp_angles(&self, param: T) -> Angles<T> {
        for w in self.points.windows(2) {
            let (a, b) = (w[0].param, w[1].param);
            if (param >= a && param <= b) || (param >= b && param <= a) {
                let t = if b == a {
                    T::zero()
                } else {
                    (param - a) / (b - a)
                };
                return match (w[0].angles, w[1].angles) {
                    (Angles::Two(p1, p2), Angles::Two(q1, q2)) => {
                        Angles::Two(p1 + t * (q1 - p1), p2 + t * (q2 - p2))
                    }
                    (Angles::One(p1), Angles::One(q1)) => Angles::One(p1 + t * (q1 - p1)),
                    (x, _) => x,
                };
            }
        }
        self.points.last().map(|p| p.angles).unwrap_or(Angles::None)
    }

    /// Interior extrema of the L^2 profile: (param, r, L^2) at each
    /// segment junction, refined by ternary search on the continuous
    /// profile.
    pub fn l2_extrema(&self) -> Vec<(T, T, T)> {
        let mut out = Vec::new();
        for pair in self.segments.windows(2) {
            let junction = pair[0].end;
            if junction == 0 || junction + 1 >= self.points.len() {
                continue;
            }
            let lo = self.points[junction - 1].param;
            let hi = self.points[junction + 1].param;
            let maximizing = pair[0].increasing;
            let param = self.refine_extremum(lo, hi, maximizing);
            if let Ok(l2) = self.eval_l2(param) {
                out.push((param, self.parameterization.radius_of(param), l2));
            }
        }
        out
    }

    fn refine_extremum(&self, mut a: T, mut b: T, maximizing: bool) -> T {
        let inv_phi = T::c(0.618_033_988_749_894_9);
        let value = |x: T| self.eval_l2(x).unwrap_or_else(|_| T::nan());
        for _ in 0..200 {
            if (b - a).abs() < T::c(1e-14) * T::one().max(a.abs()) {
                break;
            }
            let c = b - inv_phi * (b - a);
            let d = a + inv_phi * (b - a);
            let (fc, fd) = (value(c), value(d));
            let pick_left = if maximizing { fc > fd } else { fc < fd };
            if pick_left {
                b = d;
            } else {
                a = c;
            }
        }
        (a + b) * T::half()
    }
}

/// Split samples into maximal strictly monotone runs of L^2.
fn segment<T: Real>(points: &[BranchPoint<T>]) -> Vec<MonotoneSegment> {
    if points.len() < 2 {
        return Vec::new();
    }
    let mut segments = Vec::new();
    let mut start = 0usize;
    let mut dir: Option<bool> = None;
    for i in 1..points.len() {
        let increasing = points[i].l2 > points[i - 1].l2;
        match dir {
            None => dir = Some(increasing),
            Some(d) if d != increasing => {
                segments.push(MonotoneSegment {
                    start,
                    end: i - 1,
                    increasing: d,
                });
                start = i - 1;
                dir = Some(increasing);
            }
            _ => {}
        }
    }
    segments.push(MonotoneSegment {
        start,
        end: points.len() - 1,
        increasing: dir.unwrap_or(true),
    });
    segments
}
