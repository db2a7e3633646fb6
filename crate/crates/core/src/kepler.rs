//! Point-mass two-body baseline. Unlike the dumbbell models this one is not
//! normalized: arbitrary positive masses, G and L are accepted.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;

/// Parameters of the restricted two-body (Kepler) problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeplerParams<T = f64> {
    pub m1: T,
    pub m2: T,
    pub g: T,
    pub l: T,
}

impl<T: Real> KeplerParams<T> {
    pub fn new(m1: T, m2: T, g: T, l: T) -> Result<Self> {
        for (name, v) in [("M1", m1), ("M2", m2), ("G", g), ("L", l)] {
            if !(v > T::zero()) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(Self { m1, m2, g, l })
    }

    /// Amended potential V(r) = L^2/(2 M1 r^2) - G M1 M2 / r and its second
    /// radial derivative.
    pub fn amended_potential(&self, r: T) -> Result<(T, T)> {
        if !(r > T::zero()) {
            return Err(Error::InvalidParams(format!("r must be positive, got {r}")));
        }
        let v = self.l * self.l / (T::two() * self.m1 * r * r) - self.g * self.m1 * self.m2 / r;
        let d2 = T::c(3.0) * self.l * self.l / (self.m1 * r.powi(4))
            - T::two() * self.g * self.m1 * self.m2 / (r * r * r);
        Ok((v, d2))
    }

    /// First radial derivative of V.
    pub fn dv_dr(&self, r: T) -> T {
        -self.l * self.l / (self.m1 * r * r * r) + self.g * self.m1 * self.m2 / (r * r)
    }

    /// The unique RE: the critical point of V at r = L^2/(G M1^2 M2), with
    /// rotation rate L/(M1 r^2).
    ///
    /// With M1 the orbiting mass, the circular-orbit balance
    /// L^2/(M1 r^3) = G M1 M2 / r^2 gives this radius directly; the orbital
    /// speed r phi_dot then equals G M1 M2 / L.
    pub fn relative_equilibrium(&self) -> (T, T) {
        let r = self.l * self.l / (self.g * self.m1 * self.m1 * self.m2);
        (r, self.phi_dot(r))
    }

    /// Rotation speed at arbitrary radius, phi_dot = L / (M1 r^2).
    pub fn phi_dot(&self, r: T) -> T {
        self.l / (self.m1 * r * r)
    }

    /// Orbital speed r phi_dot at the RE: G M1 M2 / L.
    pub fn orbital_speed_at_re(&self) -> T {
        self.g * self.m1 * self.m2 / self.l
    }
}
