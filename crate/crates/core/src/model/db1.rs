//! Dumbbell/point-mass model: a dumbbell (masses x1, x2 on a unit rod, body
//! mass M2) and a point mass M1 in planar orbit. All quantities are in the
//! normalized units M1 + M2 = 1, x1 + x2 = 1, ell = G = 1, with potential,
//! angular momentum and amended potential scaled by 1/(M1 M2).

use serde::Serialize;

use super::{guard_distance, DerivMethod, DerivativeBundle};
use crate::error::{Error, Result};
use crate::real::Real;

/// Normalized parameters of the dumbbell/point-mass system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Db1Params<T = f64> {
    x1: T,
    x2: T,
    m1: T,
    m2: T,
    ell: T,
    g: T,
    b: T,
}

impl<T: Real> Db1Params<T> {
    /// Build from the dumbbell mass ratio `x1` and the point-body mass `m1`.
    ///
    /// The remaining fields are forced by the normalization: x2 = 1 - x1,
    /// M2 = 1 - M1, ell = G = 1, and B = x1 x2 / M1 (the dumbbell's scaled
    /// moment of inertia).
    pub fn new(x1: T, m1: T) -> Result<Self> {
        if !(x1 > T::zero() && x1 < T::one()) {
            return Err(Error::InvalidParams(format!(
                "dumbbell mass ratio x1 must lie strictly in (0,1), got {x1}"
            )));
        }
        if !(m1 > T::zero() && m1 < T::one()) {
            return Err(Error::InvalidParams(format!(
                "point body mass M1 must lie strictly in (0,1), got {m1}"
            )));
        }
        let x2 = T::one() - x1;
        Ok(Self {
            x1,
            x2,
            m1,
            m2: T::one() - m1,
            ell: T::one(),
            g: T::one(),
            b: x1 * x2 / m1,
        })
    }

    /// Like [`Db1Params::new`] but rejecting non-normalized rod length or G.
    pub fn with_units(x1: T, m1: T, ell: T, g: T) -> Result<Self> {
        if ell != T::one() || g != T::one() {
            return Err(Error::InvalidParams(
                "this model is normalized to ell = 1 and G = 1".into(),
            ));
        }
        Self::new(x1, m1)
    }

    pub fn x1(&self) -> T {
        self.x1
    }

    pub fn x2(&self) -> T {
        self.x2
    }

    pub fn m1(&self) -> T {
        self.m1
    }

    pub fn m2(&self) -> T {
        self.m2
    }

    /// Scaled moment of inertia B = x1 x2 / M1.
    pub fn b(&self) -> T {
        self.b
    }

    /// Parameters with the two dumbbell masses exchanged.
    pub fn mass_swapped(&self) -> Self {
        Self {
            x1: self.x2,
            x2: self.x1,
            ..*self
        }
    }

    /// Distances from the point mass to the two dumbbell masses,
    /// d_i = sqrt(r^2 + (-1)^i 2 x_k r cos(theta) + x_k^2) with k != i.
    pub fn distances(&self, r: T, theta: T) -> Result<(T, T)> {
        if !(r > T::zero()) {
            return Err(Error::InvalidParams(format!("r must be positive, got {r}")));
        }
        let c = theta.cos();
        let d1sq = r * r - T::two() * self.x2 * r * c + self.x2 * self.x2;
        let d2sq = r * r + T::two() * self.x1 * r * c + self.x1 * self.x1;
        let d1 = guard_distance(d1sq.max(T::zero()).sqrt())?;
        let d2 = guard_distance(d2sq.max(T::zero()).sqrt())?;
        Ok((d1, d2))
    }

    /// Gravitational potential, U = -x1/d1 - x2/d2 (scaled by 1/(M1 M2)).
    pub fn potential(&self, r: T, theta: T) -> Result<T> {
        let (d1, d2) = self.distances(r, theta)?;
        Ok(-self.x1 / d1 - self.x2 / d2)
    }

    /// Amended potential V = L^2 / (2 (r^2 + B)) + U.
    pub fn amended_potential(&self, l: T, r: T, theta: T) -> Result<T> {
        let u = self.potential(r, theta)?;
        Ok(l * l / (T::two() * (r * r + self.b)) + u)
    }

    /// Gradient of V: the radial and angular requirements.
    ///
    /// dV/dtheta = x1 x2 r sin(theta) (1/d1^3 - 1/d2^3);
    /// dV/dr = x1 (r - x2 cos)/d1^3 + x2 (r + x1 cos)/d2^3 - L^2 r/(r^2+B)^2.
    pub fn grad_v(&self, l: T, r: T, theta: T) -> Result<(T, T)> {
        let (d1, d2) = self.distances(r, theta)?;
        let (c, s) = (theta.cos(), theta.sin());
        let e1 = T::one() / (d1 * d1 * d1);
        let e2 = T::one() / (d2 * d2 * d2);
        let s_r2b = r * r + self.b;
        let dr = self.x1 * (r - self.x2 * c) * e1 + self.x2 * (r + self.x1 * c) * e2
            - l * l * r / (s_r2b * s_r2b);
        let dth = self.x1 * self.x2 * r * s * (e1 - e2);
        Ok((dr, dth))
    }

    /// g(r, theta): the L^2 that would make (r, theta) satisfy the radial
    /// requirement. At an RE, g = L^2.
    pub fn g_l2(&self, r: T, theta: T) -> Result<T> {
        let (d1, d2) = self.distances(r, theta)?;
        let c = theta.cos();
        let p = self.x1 * (r - self.x2 * c) / (d1 * d1 * d1)
            + self.x2 * (r + self.x1 * c) / (d2 * d2 * d2);
        let s = r * r + self.b;
        Ok(s * s / r * p)
    }

    /// Hessian of V over (r, theta).
    ///
    /// With `at_re` set, the simplified at-RE closed forms are used after a
    /// gradient check (the mixed entry drops its sin(theta)(1/d1^3 - 1/d2^3)
    /// term, which vanishes at any RE). Otherwise the entries come from
    /// Richardson-extrapolated central differences of the closed-form
    /// gradient.
    pub fn hessian_v(&self, l: T, r: T, theta: T, at_re: bool) -> Result<DerivativeBundle<2, T>> {
        let value = self.amended_potential(l, r, theta)?;
        let gradient_pair = self.grad_v(l, r, theta)?;
        let gradient = [gradient_pair.0, gradient_pair.1];

        let hessian;
        let method;
        if at_re {
            let gn = (gradient[0] * gradient[0] + gradient[1] * gradient[1]).sqrt();
            if gn >= T::c(1e-8) {
                return Err(Error::NotAnEquilibrium {
                    grad_norm: gn.as_f64(),
                });
            }
            hessian = self.hessian_at_re(l, r, theta)?;
            method = DerivMethod::ClosedForm;
        } else {
            hessian = self.hessian_fd(l, r, theta)?;
            method = DerivMethod::FiniteDifference;
        }
        Ok(DerivativeBundle {
            value,
            gradient,
            hessian,
            method,
        })
    }

    /// At-RE closed forms: d2V/dr2 = r/(r^2+B)^2 dg/dr, the displayed
    /// d2V/dtheta2, and the reduced mixed entry.
    fn hessian_at_re(&self, _l: T, r: T, theta: T) -> Result<[[T; 2]; 2]> {
        let (d1, d2) = self.distances(r, theta)?;
        let (c, s) = (theta.cos(), theta.sin());
        let (x1, x2) = (self.x1, self.x2);
        let e1_3 = T::one() / (d1 * d1 * d1);
        let e2_3 = T::one() / (d2 * d2 * d2);
        let e1_5 = e1_3 / (d1 * d1);
        let e2_5 = e2_3 / (d2 * d2);
        let s_r2b = r * r + self.b;

        // dg/dr with g = (r^2+B)^2 / r * p.
        let p = x1 * (r - x2 * c) * e1_3 + x2 * (r + x1 * c) * e2_3;
        let dp = x1 * (e1_3 - T::c(3.0) * (r - x2 * c) * (r - x2 * c) * e1_5)
            + x2 * (e2_3 - T::c(3.0) * (r + x1 * c) * (r + x1 * c) * e2_5);
        let dg = s_r2b * (T::c(4.0) * r * r - s_r2b) / (r * r) * p + s_r2b * s_r2b / r * dp;
        let vrr = r / (s_r2b * s_r2b) * dg;

        let vtt = x1 * x2 * r * c * (e1_3 - e2_3)
            - T::c(3.0) * x1 * x2 * r * r * s * s * (x2 * e1_5 + x1 * e2_5);

        let vrt = T::c(3.0) * x1 * x2 * r * s * ((r + x1 * c) * e2_5 - (r - x2 * c) * e1_5);

        Ok([[vrr, vrt], [vrt, vtt]])
    }

    fn hessian_fd(&self, l: T, r: T, theta: T) -> Result<[[T; 2]; 2]> {
        let grad = |rr: T, tt: T| -> Result<[T; 2]> {
            let (a, b) = self.grad_v(l, rr, tt)?;
            Ok([a, b])
        };
        let mut h = [[T::zero(); 2]; 2];
        let coords = [r, theta];
        for i in 0..2 {
            let step = T::c(1e-5) * T::one().max(coords[i].abs());
            let column = |hh: T| -> Result<[T; 2]> {
                let mut hi = coords;
                let mut lo = coords;
                hi[i] += hh;
                lo[i] -= hh;
                let gp = grad(hi[0], hi[1])?;
                let gm = grad(lo[0], lo[1])?;
                Ok([
                    (gp[0] - gm[0]) / (T::two() * hh),
                    (gp[1] - gm[1]) / (T::two() * hh),
                ])
            };
            // Richardson: (4 D(h/2) - D(h)) / 3 upgrades O(h^2) to O(h^4).
            let d_h = column(step)?;
            let d_h2 = column(step * T::half())?;
            for j in 0..2 {
                h[i][j] = (T::c(4.0) * d_h2[j] - d_h[j]) / T::c(3.0);
            }
        }
        // Symmetrize; the defect is O(h^4) and checked by callers.
        let off = (h[0][1] + h[1][0]) * T::half();
        h[0][1] = off;
        h[1][0] = off;
        Ok(h)
    }

    /// Rotation speed of the co-rotating frame at an RE: L / (r^2 + B).
    pub fn rotation_speed_at_re(&self, l: T, r: T) -> T {
        l / (r * r + self.b)
    }
}
