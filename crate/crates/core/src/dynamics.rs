//! Reduced equations of motion, an adaptive embedded Runge-Kutta 5(4)
//! integrator, and the linearization matrices used as stability oracles.
//!
//! State layout: `[q.., qdot.., phi]` where q are the shape coordinates
//! (r for Kepler; r, theta for Db1; r, theta1, theta2 for Db2) and phi is
//! the reconstructed frame angle, integrated alongside by quadrature of the
//! general rotation-speed relation.

use crate::error::{Error, Result};
use crate::kepler::KeplerParams;
use crate::model::{Db1Params, Db2Params};
use crate::real::Real;
use crate::{Mat4, Mat6};

/// Hard collision guard for trajectories; tighter than the model guard so
/// integrations abort before the potential blows up.
pub const DYNAMICS_COLLISION_GUARD: f64 = 1e-9;

/// A reduced mechanical system with conserved energy.
pub trait ReducedSystem<T: Real> {
    /// Number of shape coordinates.
    fn dim(&self) -> usize;

    /// Time derivative of `[q, qdot, phi]` into `dy`.
    fn rhs(&self, y: &[T], dy: &mut [T]) -> Result<()>;

    /// Reduced energy T_red + V (conserved along trajectories).
    fn energy(&self, y: &[T]) -> Result<T>;

    /// Full state length.
    fn state_len(&self) -> usize {
        2 * self.dim() + 1
    }
}

/// Dumbbell/point-mass reduced system at fixed angular momentum.
#[derive(Debug, Clone, Copy)]
pub struct Db1Reduced<T = f64> {
    pub params: Db1Params<T>,
    pub l: T,
}

impl<T: Real> Db1Reduced<T> {
    /// State vector [r, theta, rdot, thetadot, phi] with phi starting at 0.
    pub fn state(r: T, theta: T, rdot: T, thetadot: T) -> Vec<T> {
        vec![r, theta, rdot, thetadot, T::zero()]
    }
}

impl<T: Real> ReducedSystem<T> for Db1Reduced<T> {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, y: &[T], dy: &mut [T]) -> Result<()> {
        let (r, theta, rdot, thetadot) = (y[0], y[1], y[2], y[3]);
        let p = &self.params;
        let (d1, d2) = p.distances(r, theta)?;
        if d1.min(d2) < T::c(DYNAMICS_COLLISION_GUARD) {
            return Err(Error::Collision {
                distance: d1.min(d2).as_f64(),
                guard: DYNAMICS_COLLISION_GUARD,
            });
        }
        let b = p.b();
        let s = r * r + b;
        let (dvr, dvt) = p.grad_v(self.l, r, theta)?;
        dy[0] = rdot;
        dy[1] = thetadot;
        dy[2] = b * r * thetadot * (b * thetadot - T::two() * self.l) / (s * s) - dvr;
        dy[3] = T::two() * rdot * (self.l - b * thetadot) / (r * s) - s / (b * r * r) * dvt;
        dy[4] = (self.l - b * thetadot) / s;
        Ok(())
    }

    fn energy(&self, y: &[T]) -> Result<T> {
        let (r, theta, rdot, thetadot) = (y[0], y[1], y[2], y[3]);
        let p = &self.params;
        let b = p.b();
        let s = r * r + b;
        let v = p.amended_potential(self.l, r, theta)?;
        Ok(T::half() * (rdot * rdot + b * r * r / s * thetadot * thetadot) + v)
    }
}

/// Two-dumbbell reduced system at fixed angular momentum.
#[derive(Debug, Clone, Copy)]
pub struct Db2Reduced<T = f64> {
    pub params: Db2Params<T>,
    pub l: T,
}

impl<T: Real> Db2Reduced<T> {
    /// State vector [r, theta1, theta2, rdot, theta1dot, theta2dot, phi].
    pub fn state(r: T, theta1: T, theta2: T, rdot: T, w1: T, w2: T) -> Vec<T> {
        vec![r, theta1, theta2, rdot, w1, w2, T::zero()]
    }
}

impl<T: Real> ReducedSystem<T> for Db2Reduced<T> {
    fn dim(&self) -> usize {
        3
    }

    fn rhs(&self, y: &[T], dy: &mut [T]) -> Result<()> {
        let (r, t1, t2) = (y[0], y[1], y[2]);
        let (rdot, w1, w2) = (y[3], y[4], y[5]);
        let p = &self.params;
        let d = p.distances(r, t1, t2)?;
        if d.iter().any(|&x| x < T::c(DYNAMICS_COLLISION_GUARD)) {
            return Err(Error::Collision {
                distance: d.iter().fold(T::infinity(), |a, &x| a.min(x)).as_f64(),
                guard: DYNAMICS_COLLISION_GUARD,
            });
        }
        let (b1, b2) = (p.b1(), p.b2());
        let s = r * r + b1 + b2;
        let g = p.grad_v(self.l, r, t1, t2)?;
        let bw = b1 * w1 + b2 * w2;
        dy[0] = rdot;
        dy[1] = w1;
        dy[2] = w2;
        dy[3] = r * bw * (bw - T::two() * self.l) / (s * s) - g[0];
        let common = -T::two() * rdot * (bw - self.l) / (r * s);
        dy[4] = common - (T::one() / b1 + T::one() / (r * r)) * g[1] - g[2] / (r * r);
        dy[5] = common - (T::one() / b2 + T::one() / (r * r)) * g[2] - g[1] / (r * r);
        dy[6] = (self.l - bw) / s;
        Ok(())
    }

    fn energy(&self, y: &[T]) -> Result<T> {
        let (r, t1, t2) = (y[0], y[1], y[2]);
        let (rdot, w1, w2) = (y[3], y[4], y[5]);
        let p = &self.params;
        let (b1, b2) = (p.b1(), p.b2());
        let s = r * r + b1 + b2;
        let v = p.amended_potential(self.l, r, t1, t2)?;
        let quad = b1 * (r * r + b2) * w1 * w1 + b2 * (r * r + b1) * w2 * w2
            - T::two() * b1 * b2 * w1 * w2;
        Ok(T::half() * (rdot * rdot + quad / s) + v)
    }
}

/// Kepler reduced system (state [r, rdot, phi]).
#[derive(Debug, Clone, Copy)]
pub struct KeplerReduced<T = f64> {
    pub params: KeplerParams<T>,
}

impl<T: Real> KeplerReduced<T> {
    /// State vector [r, rdot, phi] with phi starting at 0.
    pub fn state(r: T, rdot: T) -> Vec<T> {
        vec![r, rdot, T::zero()]
    }
}

impl<T: Real> ReducedSystem<T> for KeplerReduced<T> {
    fn dim(&self) -> usize {
        1
    }

    fn rhs(&self, y: &[T], dy: &mut [T]) -> Result<()> {
        let (r, rdot) = (y[0], y[1]);
        if r < T::c(DYNAMICS_COLLISION_GUARD) {
            return Err(Error::Collision {
                distance: r.as_f64(),
                guard: DYNAMICS_COLLISION_GUARD,
            });
        }
        let p = &self.params;
        dy[0] = rdot;
        dy[1] = p.l * p.l / (p.m1 * p.m1 * r * r * r) - p.g * p.m2 / (r * r);
        dy[2] = p.l / (p.m1 * r * r);
        Ok(())
    }

    fn energy(&self, y: &[T]) -> Result<T> {
        let (v, _) = self.params.amended_potential(y[0])?;
        Ok(T::half() * self.params.m1 * y[1] * y[1] + v)
    }
}

/// Integration output, sampled at the requested times.
#[derive(Debug, Clone)]
pub struct Trajectory<T = f64> {
    pub t: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub energy: Vec<T>,
}

// Dormand-Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate from `y0` to `t_end` with relative tolerance `tol`, recording
/// the state at each time in `samples` (strictly increasing, within
/// [0, t_end]). Empty `samples` records every accepted step.
pub fn integrate<T: Real, S: ReducedSystem<T>>(
    sys: &S,
    y0: &[T],
    t_end: T,
    tol: T,
    samples: &[T],
) -> Result<Trajectory<T>> {
    let n = sys.state_len();
    assert_eq!(y0.len(), n, "state length mismatch");
    let mut t = T::zero();
    let mut y = y0.to_vec();
    let mut traj = Trajectory {
        t: vec![t],
        states: vec![y.clone()],
        energy: vec![sys.energy(&y)?],
    };
    let mut sample_iter = samples.iter().copied().peekable();
    // Skip any sample at t = 0 (already recorded).
    while let Some(&s) = sample_iter.peek() {
        if s <= T::zero() {
            sample_iter.next();
        } else {
            break;
        }
    }

    let mut k = vec![vec![T::zero(); n]; 7];
    // h_base is the controller's preferred step; each attempt may be clipped
    // to land exactly on a sample time or on t_end.
    let mut h_base = (t_end * T::c(1e-4)).max(T::c(1e-10));
    let h_min = t_end * T::c(1e-15);
    let mut steps = 0usize;
    let max_steps = 50_000_000usize;

    sys.rhs(&y, &mut k[0])?;
    while t < t_end {
        steps += 1;
        if steps > max_steps {
            return Err(Error::StepUnderflow { t: t.as_f64() });
        }
        let mut target = t_end;
        if let Some(&s) = sample_iter.peek() {
            if s < target {
                target = s;
            }
        }
        let mut hit_target = false;
        let h = if t + h_base >= target {
            hit_target = true;
            target - t
        } else {
            h_base
        };

        // Stage evaluations.
        let mut ynew = vec![T::zero(); n];
        let mut attempt_ok = true;
        for stage in 1..7 {
            let mut ytmp = y.clone();
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = T::c(DP_A[stage - 1][j]);
                if a != T::zero() {
                    for i in 0..n {
                        ytmp[i] += h * a * kj[i];
                    }
                }
            }
            let (_, tail) = k.split_at_mut(stage);
            match sys.rhs(&ytmp, &mut tail[0]) {
                Ok(()) => {}
                Err(Error::Collision { .. }) if h > h_min => {
                    attempt_ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let _ = DP_C; // stage times unused: the systems are autonomous

        if attempt_ok {
            let mut err = T::zero();
            for i in 0..n {
                let mut y5 = y[i];
                let mut y4 = y[i];
                for (j, kj) in k.iter().enumerate() {
                    y5 += h * T::c(DP_B5[j]) * kj[i];
                    y4 += h * T::c(DP_B4[j]) * kj[i];
                }
                ynew[i] = y5;
                let scale = tol * (T::one().max(y[i].abs().max(y5.abs())));
                let e = (y5 - y4) / scale;
                err += e * e;
            }
            err = (err / T::c(n as f64)).sqrt();
            if err <= T::one() {
                t += h;
                y = ynew;
                sys.rhs(&y, &mut k[0])?;
                if hit_target && sample_iter.peek().map(|&s| s <= t).unwrap_or(false) {
                    sample_iter.next();
                    traj.t.push(t);
                    traj.states.push(y.clone());
                    traj.energy.push(sys.energy(&y)?);
                } else if samples.is_empty() || (hit_target && t >= t_end) {
                    traj.t.push(t);
                    traj.states.push(y.clone());
                    traj.energy.push(sys.energy(&y)?);
                }
                let fac = T::c(0.9) * err.max(T::c(1e-12)).powf(-T::c(0.2));
                let grow = fac.min(T::c(5.0)).max(T::c(0.2));
                // Base the controller on the attempted step only when it was
                // not clipped, so clipping does not collapse future steps.
                if !hit_target {
                    h_base = h * grow;
                } else {
                    h_base = h_base.max(h * grow);
                }
            } else {
                let fac = T::c(0.9) * err.powf(-T::c(0.2));
                h_base = h * fac.min(T::one()).max(T::c(0.2));
            }
        } else {
            h_base = h * T::half();
        }
        if h_base < h_min {
            return Err(Error::StepUnderflow { t: t.as_f64() });
        }
    }
    Ok(traj)
}

/// Linearization of the reduced Db1 system at an RE, as a 4x4 block matrix
/// over [r, theta, rdot, thetadot].
pub fn assemble_linearization_db1<T: Real>(
    p: &Db1Params<T>,
    l: T,
    r: T,
    theta: T,
) -> Result<Mat4<T>> {
    let bundle = p.hessian_v(l, r, theta, true)?; // gradient check inside
    let h = bundle.hessian;
    let b = p.b();
    let s = r * r + b;
    let kappa = s / (b * r * r);
    let mut a = [[T::zero(); 4]; 4];
    a[0][2] = T::one();
    a[1][3] = T::one();
    a[2][0] = -h[0][0];
    a[2][1] = -h[0][1];
    a[2][3] = -T::two() * b * l * r / (s * s);
    a[3][0] = -kappa * h[0][1];
    a[3][1] = -kappa * h[1][1];
    a[3][2] = T::two() * l / (r * s);
    Ok(a)
}

/// Linearization of the reduced Db2 system at an RE, as a 6x6 block matrix
/// over [r, theta1, theta2, rdot, theta1dot, theta2dot].
pub fn assemble_linearization_db2<T: Real>(
    p: &Db2Params<T>,
    l: T,
    r: T,
    theta1: T,
    theta2: T,
) -> Result<Mat6<T>> {
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
    let r2 = r * r;
    let a1 = (r2 + b1) / b1;
    let a2 = (r2 + b2) / b2;
    let mut a = [[T::zero(); 6]; 6];
    a[0][3] = T::one();
    a[1][4] = T::one();
    a[2][5] = T::one();
    a[3][0] = -vrr;
    a[3][1] = -vr1;
    a[3][2] = -vr2;
    a[3][4] = -T::two() * b1 * l * r / (s * s);
    a[3][5] = -T::two() * b2 * l * r / (s * s);
    a[4][0] = -(vr2 + a1 * vr1) / r2;
    a[4][1] = -(v12 + a1 * v1) / r2;
    a[4][2] = -(v2 + a1 * v12) / r2;
    a[4][3] = T::two() * l / (r * s);
    a[5][0] = -(vr1 + a2 * vr2) / r2;
    a[5][1] = -(v1 + a2 * v12) / r2;
    a[5][2] = -(v12 + a2 * v2) / r2;
    a[5][3] = T::two() * l / (r * s);
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finder::l2_colinear_db1;
    use crate::linalg::char_poly;

    #[test]
    fn rhs_vanishes_at_re() {
        let p: Db1Params = Db1Params::new(0.4, 0.5).unwrap();
        let r = p.x2() + 1.5;
        let l2 = l2_colinear_db1(&p, r).unwrap();
        let sys = Db1Reduced {
            params: p,
            l: l2.sqrt(),
        };
        let y = [r, 0.0, 0.0, 0.0, 0.0];
        let mut dy = vec![0.0; 5];
        sys.rhs(&y, &mut dy).unwrap();
        for v in &dy[..4] {
            assert!(v.abs() < 1e-10, "rhs residual {v}");
        }
        // phi advances at the RE rotation speed.
        assert!((dy[4] - p.rotation_speed_at_re(l2.sqrt(), r)).abs() < 1e-14);
    }

    #[test]
    fn db1_rhs_matches_kepler_in_degenerate_limit() {
        // x1 -> 1 concentrates the dumbbell at its center: the radial
        // equation approaches the scaled Kepler reduced equation
        // rddot = L^2/r^3 - 1/r^2.
        let p: Db1Params = Db1Params::new(0.999999, 0.5).unwrap();
        let l = 1.3;
        let sys = Db1Reduced { params: p, l };
        let r = 2.0;
        let y = [r, 0.0, 0.0, 0.0, 0.0];
        let mut dy = vec![0.0; 5];
        sys.rhs(&y, &mut dy).unwrap();
        let kepler_rddot = l * l / (r * r * r) - 1.0 / (r * r);
        assert!(
            (dy[2] - kepler_rddot).abs() < 1e-4,
            "{} vs {kepler_rddot}",
            dy[2]
        );
    }

    #[test]
    fn rhs_agrees_with_short_integration() {
        // Self-consistency: a second-order one-sided difference of the
        // integrated flow reproduces the RHS.
        let p: Db1Params = Db1Params::new(0.3, 0.45).unwrap();
        let sys = Db1Reduced { params: p, l: 0.9 };
        let y0 = [1.4, 0.7, 0.05, -0.02, 0.0];
        let mut dy = vec![0.0; 5];
        sys.rhs(&y0, &mut dy).unwrap();
        let dt = 1e-5;
        let traj = integrate(&sys, &y0, 2.0 * dt, 1e-13, &[dt, 2.0 * dt]).unwrap();
        assert_eq!(traj.states.len(), 3);
        let y1 = &traj.states[1];
        let y2 = &traj.states[2];
        for i in 0..5 {
            let fd = (-3.0 * y0[i] + 4.0 * y1[i] - y2[i]) / (2.0 * dt);
            assert!(
                (fd - dy[i]).abs() < 1e-8 * (1.0 + dy[i].abs()),
                "component {i}"
            );
        }
    }

    #[test]
    fn kepler_orbit_oscillates_and_conserves_energy() {
        let kp: KeplerParams = KeplerParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let sys = KeplerReduced { params: kp };
        let y0 = [1.05, 0.0, 0.0];
        let samples: Vec<f64> = (1..=400).map(|i| i as f64 * 0.1).collect();
        let traj = integrate(&sys, &y0, 40.0, 1e-10, &samples).unwrap();
        let e0 = traj.energy[0];
        let rs: Vec<f64> = traj.states.iter().map(|s| s[0]).collect();
        let rmin = rs.iter().cloned().fold(f64::INFINITY, f64::min);
        let rmax = rs.iter().cloned().fold(0.0, f64::max);
        assert!(rmin > 0.95 && rmax < 1.16, "r range [{rmin}, {rmax}]");
        assert!(rmin < 1.0, "orbit should oscillate around r = 1");
        for e in &traj.energy {
            assert!((e - e0).abs() < 1e-8 * e0.abs());
        }
    }

    #[test]
    fn reversibility() {
        let p: Db1Params = Db1Params::new(0.3, 0.45).unwrap();
        let sys = Db1Reduced { params: p, l: 0.9 };
        let y0 = vec![1.4, 0.7, 0.05, -0.02, 0.0];
        let tol = 1e-11;
        let fwd = integrate(&sys, &y0, 5.0, tol, &[5.0]).unwrap();
        let mut yb = fwd.states.last().unwrap().clone();
        // Reverse velocities and integrate the same span.
        yb[2] = -yb[2];
        yb[3] = -yb[3];
        let back_sys = Db1Reduced { params: p, l: -0.9 };
        let back = integrate(&back_sys, &yb, 5.0, tol, &[5.0]).unwrap();
        let yf = back.states.last().unwrap();
        assert!((yf[0] - y0[0]).abs() < 10.0 * tol * 1e3);
        assert!((yf[1] - y0[1]).abs() < 10.0 * tol * 1e3);
    }

    #[test]
    fn char_poly_of_db1_linearization_is_even() {
        let p: Db1Params = Db1Params::new(0.4, 0.5).unwrap();
        let r = p.x2() + 1.2;
        let l2 = l2_colinear_db1(&p, r).unwrap();
        let a = assemble_linearization_db1(&p, l2.sqrt(), r, 0.0).unwrap();
        let av: Vec<Vec<f64>> = a.iter().map(|row| row.to_vec()).collect();
        let c = char_poly(&av);
        // c = [1, c3, c2, c1, c0] for z^4 + ...; odd coefficients vanish.
        assert!(c[1].abs() < 1e-10 && c[3].abs() < 1e-10, "{c:?}");
    }
}
