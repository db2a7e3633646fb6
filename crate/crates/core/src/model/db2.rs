//! Two-dumbbell model: dumbbells (x_i1, x_i2 on rods ell_1 + ell_2 = 1, body
//! masses M1 + M2 = 1) in planar orbit, G = 1, everything scaled by
//! 1/(M1 M2). Configuration is (r, theta1, theta2) after the rotational
//! reduction.

use serde::Serialize;

use super::{guard_distance, DerivMethod, DerivativeBundle};
use crate::error::{Error, Result};
use crate::real::Real;

/// Normalized parameters of the two-dumbbell system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Db2Params<T = f64> {
    x11: T,
    x12: T,
    x21: T,
    x22: T,
    m1: T,
    m2: T,
    ell1: T,
    ell2: T,
    b1: T,
    b2: T,
}

impl<T: Real> Db2Params<T> {
    /// Build from the free parameters (x11, x21, M1, ell1); the rest follow
    /// from the normalization x_i1 + x_i2 = 1, M1 + M2 = 1, ell1 + ell2 = 1,
    /// with scaled moments of inertia B_i = x_i1 x_i2 ell_i^2 / M_n, n != i.
    pub fn new(x11: T, x21: T, m1: T, ell1: T) -> Result<Self> {
        for (name, v) in [("x11", x11), ("x21", x21), ("M1", m1), ("ell1", ell1)] {
            if !(v > T::zero() && v < T::one()) {
                return Err(Error::InvalidParams(format!(
                    "{name} must lie strictly in (0,1), got {v}"
                )));
            }
        }
        let x12 = T::one() - x11;
        let x22 = T::one() - x21;
        let m2 = T::one() - m1;
        let ell2 = T::one() - ell1;
        Ok(Self {
            x11,
            x12,
            x21,
            x22,
            m1,
            m2,
            ell1,
            ell2,
            b1: x11 * x12 * ell1 * ell1 / m2,
            b2: x21 * x22 * ell2 * ell2 / m1,
        })
    }

    /// Pairwise equal masses: x_i1 = x_i2 = 1/2 on both dumbbells.
    pub fn equal_mass(m1: T, ell1: T) -> Result<Self> {
        Self::new(T::half(), T::half(), m1, ell1)
    }

    pub fn x11(&self) -> T {
        self.x11
    }

    pub fn x12(&self) -> T {
        self.x12
    }

    pub fn x21(&self) -> T {
        self.x21
    }

    pub fn x22(&self) -> T {
        self.x22
    }

    pub fn m1(&self) -> T {
        self.m1
    }

    pub fn m2(&self) -> T {
        self.m2
    }

    pub fn ell1(&self) -> T {
        self.ell1
    }

    pub fn ell2(&self) -> T {
        self.ell2
    }

    pub fn b1(&self) -> T {
        self.b1
    }

    pub fn b2(&self) -> T {
        self.b2
    }

    /// Both dumbbells have equal internal mass ratios.
    pub fn is_equal_mass(&self) -> bool {
        self.x11 == T::half() && self.x21 == T::half()
    }

    /// Parameters relabeled with the two dumbbells exchanged. The matching
    /// configuration map sends (r, theta1, theta2) to
    /// (r, theta2 + pi, theta1 + pi) since the radius vector reverses.
    pub fn body_swapped(&self) -> Self {
        Self {
            x11: self.x21,
            x12: self.x22,
            x21: self.x11,
            x22: self.x12,
            m1: self.m2,
            m2: self.m1,
            ell1: self.ell2,
            ell2: self.ell1,
            b1: self.b2,
            b2: self.b1,
        }
    }

    /// Collision radii of the colinear configuration, descending:
    /// r1 = x22 l2 + x11 l1, r2 = x22 l2 - x12 l1, r3 = x11 l1 - x21 l2,
    /// r4 = -x21 l2 - x12 l1.
    pub fn colinear_singular_radii(&self) -> [T; 4] {
        [
            self.x22 * self.ell2 + self.x11 * self.ell1,
            self.x22 * self.ell2 - self.x12 * self.ell1,
            self.x11 * self.ell1 - self.x21 * self.ell2,
            -self.x21 * self.ell2 - self.x12 * self.ell1,
        ]
    }

    /// Squared distances and their angle derivatives for all four mass
    /// pairs, indexed by (u, v) in row-major order: 11, 12, 21, 22.
    fn dist_squares(&self, r: T, theta1: T, theta2: T) -> [DistSq<T>; 4] {
        let c1 = theta1.cos();
        let c2 = theta2.cos();
        let s1 = theta1.sin();
        let s2 = theta2.sin();
        let c12 = (theta1 - theta2).cos();
        let s12 = (theta1 - theta2).sin();
        let mut out = [DistSq::default(); 4];
        for u in 0..2usize {
            for v in 0..2usize {
                let su = if u == 0 { -T::one() } else { T::one() };
                let sv = if v == 0 { -T::one() } else { T::one() };
                let x1b = if u == 0 { self.x12 } else { self.x11 };
                let x2b = if v == 0 { self.x22 } else { self.x21 };
                let a1 = x1b * self.ell1;
                let a2 = x2b * self.ell2;
                let sq = r * r - su * T::two() * a1 * r * c1 + sv * T::two() * a2 * r * c2
                    - su * sv * T::two() * a1 * a2 * c12
                    + a1 * a1
                    + a2 * a2;
                let d_t1 = su * T::two() * a1 * r * s1 + su * sv * T::two() * a1 * a2 * s12;
                let d_t2 = -sv * T::two() * a2 * r * s2 - su * sv * T::two() * a1 * a2 * s12;
                out[u * 2 + v] = DistSq { sq, d_t1, d_t2 };
            }
        }
        out
    }

    /// The four pairwise distances (d11, d12, d21, d22).
    pub fn distances(&self, r: T, theta1: T, theta2: T) -> Result<[T; 4]> {
        if !(r > T::zero()) {
            return Err(Error::InvalidParams(format!("r must be positive, got {r}")));
        }
        let sq = self.dist_squares(r, theta1, theta2);
        let mut d = [T::zero(); 4];
        for (slot, s) in d.iter_mut().zip(sq.iter()) {
            *slot = guard_distance(s.sq.max(T::zero()).sqrt())?;
        }
        Ok(d)
    }

    /// U = - sum_{u,v} x_{1u} x_{2v} / d_uv.
    pub fn potential(&self, r: T, theta1: T, theta2: T) -> Result<T> {
        let d = self.distances(r, theta1, theta2)?;
        Ok(-(self.x11 * self.x21 / d[0]
            + self.x11 * self.x22 / d[1]
            + self.x12 * self.x21 / d[2]
            + self.x12 * self.x22 / d[3]))
    }

    /// V = L^2 / (2 (r^2 + B1 + B2)) + U.
    pub fn amended_potential(&self, l: T, r: T, theta1: T, theta2: T) -> Result<T> {
        let u = self.potential(r, theta1, theta2)?;
        Ok(l * l / (T::two() * (r * r + self.b1 + self.b2)) + u)
    }

    /// Gradient of V over (r, theta1, theta2): the radial requirement and
    /// the two (unreduced) angular requirements.
    pub fn grad_v(&self, l: T, r: T, theta1: T, theta2: T) -> Result<[T; 3]> {
        let e = self.cubed_inverses(r, theta1, theta2)?;
        let c1 = theta1.cos();
        let c2 = theta2.cos();
        let s = r * r + self.b1 + self.b2;
        let dr = self.radial_sum(r, c1, c2, &e) - l * l * r / (s * s);
        let [dt1, dt2] = self.angular_grad(r, theta1, theta2, &e);
        Ok([dr, dt1, dt2])
    }

    /// The L^2 that satisfies the radial requirement at (r, theta1, theta2);
    /// equal to L^2 at any RE. May be negative (nonphysical).
    pub fn g_l2(&self, r: T, theta1: T, theta2: T) -> Result<T> {
        let e = self.cubed_inverses(r, theta1, theta2)?;
        let s = r * r + self.b1 + self.b2;
        Ok(s * s / r * self.radial_sum(r, theta1.cos(), theta2.cos(), &e))
    }

    fn cubed_inverses(&self, r: T, theta1: T, theta2: T) -> Result<[T; 4]> {
        let d = self.distances(r, theta1, theta2)?;
        Ok([
            T::one() / (d[0] * d[0] * d[0]),
            T::one() / (d[1] * d[1] * d[1]),
            T::one() / (d[2] * d[2] * d[2]),
            T::one() / (d[3] * d[3] * d[3]),
        ])
    }

    fn radial_sum(&self, r: T, c1: T, c2: T, e: &[T; 4]) -> T {
        let a1p = self.x12 * self.ell1 * c1;
        let a1m = self.x11 * self.ell1 * c1;
        let a2m = self.x22 * self.ell2 * c2;
        let a2p = self.x21 * self.ell2 * c2;
        self.x11 * (self.x21 * (r + a1p - a2m) * e[0] + self.x22 * (r + a1p + a2p) * e[1])
            + self.x12 * (self.x21 * (r - a1m - a2m) * e[2] + self.x22 * (r - a1m + a2p) * e[3])
    }

    fn angular_grad(&self, r: T, theta1: T, theta2: T, e: &[T; 4]) -> [T; 2] {
        let s12 = (theta1 - theta2).sin();
        let s1 = theta1.sin();
        let s2 = theta2.sin();
        let k1 = self.x11 * self.x12 * self.ell1;
        let k2 = self.x21 * self.x22 * self.ell2;
        let dt1 = k1
            * (self.x21 * (self.x22 * self.ell2 * s12 - r * s1) * (e[0] - e[2])
                + self.x22 * (self.x21 * self.ell2 * s12 + r * s1) * (e[3] - e[1]));
        let dt2 = k2
            * (self.x11 * (self.x12 * self.ell1 * s12 - r * s2) * (e[1] - e[0])
                + self.x12 * (self.x11 * self.ell1 * s12 + r * s2) * (e[2] - e[3]));
        [dt1, dt2]
    }

    /// Angular requirements with the common factor x_i1 x_i2 ell_i removed.
    /// Zero exactly where the angular gradient components are zero.
    pub fn angular_residuals_reduced(&self, r: T, theta1: T, theta2: T) -> Result<[T; 2]> {
        let e = self.cubed_inverses(r, theta1, theta2)?;
        let [dt1, dt2] = self.angular_grad(r, theta1, theta2, &e);
        Ok([
            dt1 / (self.x11 * self.x12 * self.ell1),
            dt2 / (self.x21 * self.x22 * self.ell2),
        ])
    }

    /// Hessian of V by Richardson-extrapolated central differences of the
    /// closed-form gradient (step 1e-5 * max(1, |coordinate|)).
    pub fn hessian_v(&self, l: T, r: T, theta1: T, theta2: T) -> Result<DerivativeBundle<3, T>> {
        let value = self.amended_potential(l, r, theta1, theta2)?;
        let gradient3 = self.grad_v(l, r, theta1, theta2)?;
        let coords = [r, theta1, theta2];
        let mut h = [[T::zero(); 3]; 3];
        for i in 0..3 {
            let step = T::c(1e-5) * T::one().max(coords[i].abs());
            let column = |hh: T| -> Result<[T; 3]> {
                let mut up = coords;
                let mut dn = coords;
                up[i] += hh;
                dn[i] -= hh;
                let gp = self.grad_v(l, up[0], up[1], up[2])?;
                let gm = self.grad_v(l, dn[0], dn[1], dn[2])?;
                Ok([
                    (gp[0] - gm[0]) / (T::two() * hh),
                    (gp[1] - gm[1]) / (T::two() * hh),
                    (gp[2] - gm[2]) / (T::two() * hh),
                ])
            };
            let d_h = column(step)?;
            let d_h2 = column(step * T::half())?;
            for j in 0..3 {
                h[i][j] = (T::c(4.0) * d_h2[j] - d_h[j]) / T::c(3.0);
            }
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                let avg = (h[i][j] + h[j][i]) * T::half();
                h[i][j] = avg;
                h[j][i] = avg;
            }
        }
        Ok(DerivativeBundle {
            value,
            gradient: gradient3,
            hessian: h,
            method: DerivMethod::FiniteDifference,
        })
    }

    /// Closed-form second derivatives of V over the angles only.
    ///
    /// Pitchfork detection needs the determinant of this block to machine
    /// accuracy, which finite differences cannot deliver; the entries follow
    /// from product-rule differentiation of the closed-form angular gradient.
    pub fn angular_hessian_closed(&self, r: T, theta1: T, theta2: T) -> Result<[[T; 2]; 2]> {
        let ds = self.dist_squares(r, theta1, theta2);
        for d in &ds {
            guard_distance(d.sq.max(T::zero()).sqrt())?;
        }
        let mut e3 = [T::zero(); 4];
        let mut de_t1 = [T::zero(); 4];
        let mut de_t2 = [T::zero(); 4];
        for i in 0..4 {
            let d2 = ds[i].sq;
            let d = d2.sqrt();
            let inv3 = T::one() / (d2 * d);
            let inv5 = inv3 / d2;
            e3[i] = inv3;
            // d/dθ (d^-3) = -(3/2) d^-5 * d(d^2)/dθ
            de_t1[i] = -T::c(1.5) * inv5 * ds[i].d_t1;
            de_t2[i] = -T::c(1.5) * inv5 * ds[i].d_t2;
        }
        let s12 = (theta1 - theta2).sin();
        let c12 = (theta1 - theta2).cos();
        let (s1, c1) = (theta1.sin(), theta1.cos());
        let (s2, c2) = (theta2.sin(), theta2.cos());
        let k1 = self.x11 * self.x12 * self.ell1;
        let k2 = self.x21 * self.x22 * self.ell2;

        // dθ1 V = k1 [ x21 A (e11 - e21) + x22 B (e22 - e12) ]
        let a = self.x22 * self.ell2 * s12 - r * s1;
        let b = self.x21 * self.ell2 * s12 + r * s1;
        let a_t1 = self.x22 * self.ell2 * c12 - r * c1;
        let a_t2 = -self.x22 * self.ell2 * c12;
        let b_t1 = self.x21 * self.ell2 * c12 + r * c1;
        let b_t2 = -self.x21 * self.ell2 * c12;
        let d1 = e3[0] - e3[2];
        let d2v = e3[3] - e3[1];
        let d1_t1 = de_t1[0] - de_t1[2];
        let d1_t2 = de_t2[0] - de_t2[2];
        let d2_t1 = de_t1[3] - de_t1[1];
        let d2_t2 = de_t2[3] - de_t2[1];
        let h11 = k1 * (self.x21 * (a_t1 * d1 + a * d1_t1) + self.x22 * (b_t1 * d2v + b * d2_t1));
        let h12 = k1 * (self.x21 * (a_t2 * d1 + a * d1_t2) + self.x22 * (b_t2 * d2v + b * d2_t2));

        // dθ2 V = k2 [ x11 C (e12 - e11) + x12 D (e21 - e22) ]
        let cc = self.x12 * self.ell1 * s12 - r * s2;
        let dd = self.x11 * self.ell1 * s12 + r * s2;
        let c_t1 = self.x12 * self.ell1 * c12;
        let c_t2 = -self.x12 * self.ell1 * c12 - r * c2;
        let d_t1 = self.x11 * self.ell1 * c12;
        let d_t2 = -self.x11 * self.ell1 * c12 + r * c2;
        let f1 = e3[1] - e3[0];
        let f2 = e3[2] - e3[3];
        let f1_t1 = de_t1[1] - de_t1[0];
        let f1_t2 = de_t2[1] - de_t2[0];
        let f2_t1 = de_t1[2] - de_t1[3];
        let f2_t2 = de_t2[2] - de_t2[3];
        let h21 = k2 * (self.x11 * (c_t1 * f1 + cc * f1_t1) + self.x12 * (d_t1 * f2 + dd * f2_t1));
        let h22 = k2 * (self.x11 * (c_t2 * f1 + cc * f1_t2) + self.x12 * (d_t2 * f2 + dd * f2_t2));

        Ok([[h11, h12], [h21, h22]])
    }

    /// Rotation speed of the co-rotating frame at an RE: L/(r^2 + B1 + B2).
    pub fn rotation_speed_at_re(&self, l: T, r: T) -> T {
        l / (r * r + self.b1 + self.b2)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct DistSq<T> {
    sq: T,
    d_t1: T,
    d_t2: T,
}
