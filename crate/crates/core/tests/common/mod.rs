//! Helpers shared by the integration suites: seeded random configurations
//! and random RE drawn from the closed-form branch families.

#![allow(dead_code)]

use gravre_core::finder::{
    isosceles_min_radius, l2_colinear_db1, l2_colinear_db2, l2_isosceles_db1,
    l2_perp_isosceles_db2, l2_trapezoid_db2,
};
use gravre_core::model::{Db1Params, Db2Params};
use rand::RngExt;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// A Db1 RE: parameters, L, configuration (r, theta).
#[derive(Debug, Clone, Copy)]
pub struct Db1Re {
    pub params: Db1Params,
    pub l: f64,
    pub r: f64,
    pub theta: f64,
}

/// A Db2 RE: parameters, L, configuration (r, theta1, theta2).
#[derive(Debug, Clone, Copy)]
pub struct Db2Re {
    pub params: Db2Params,
    pub l: f64,
    pub r: f64,
    pub theta1: f64,
    pub theta2: f64,
}

/// Draw a random Db1 RE from the colinear or isosceles family.
pub fn random_db1_re(rng: &mut ChaCha8Rng) -> Db1Re {
    loop {
        let x1 = rng.random_range(0.08..0.92);
        let m1 = rng.random_range(0.08..0.92);
        let params: Db1Params = Db1Params::new(x1, m1).unwrap();
        let colinear = rng.random_range(0.0..1.0) < 0.5;
        if colinear {
            let r = params.x2() + 10f64.powf(rng.random_range(-0.8..0.8));
            let Ok(l2) = l2_colinear_db1(&params, r) else {
                continue;
            };
            if l2 <= 0.0 {
                continue;
            }
            return Db1Re {
                params,
                l: l2.sqrt(),
                r,
                theta: 0.0,
            };
        }
        let r = isosceles_min_radius(&params) + 10f64.powf(rng.random_range(-1.0..0.7));
        let Ok((l2, theta)) = l2_isosceles_db1(&params, r) else {
            continue;
        };
        if l2 <= 0.0 {
            continue;
        }
        return Db1Re {
            params,
            l: l2.sqrt(),
            r,
            theta,
        };
    }
}

/// Draw a random Db2 RE from the colinear, perpendicular-isosceles or
/// equal-mass trapezoid family.
pub fn random_db2_re(rng: &mut ChaCha8Rng) -> Db2Re {
    let half_pi = std::f64::consts::FRAC_PI_2;
    loop {
        let which = rng.random_range(0..3u32);
        match which {
            0 => {
                // Colinear, arbitrary mass structure, outside the overlap.
                let params: Db2Params = Db2Params::new(
                    rng.random_range(0.1..0.9),
                    rng.random_range(0.1..0.9),
                    rng.random_range(0.1..0.9),
                    rng.random_range(0.1..0.9),
                )
                .unwrap();
                let r1 = params.colinear_singular_radii()[0];
                let r = r1 + 10f64.powf(rng.random_range(-0.7..0.8));
                let Ok(l2) = l2_colinear_db2(&params, r) else {
                    continue;
                };
                if l2 <= 0.0 {
                    continue;
                }
                return Db2Re {
                    params,
                    l: l2.sqrt(),
                    r,
                    theta1: 0.0,
                    theta2: 0.0,
                };
            }
            1 => {
                // Perpendicular isosceles: equal vertical masses.
                let params: Db2Params = Db2Params::new(
                    0.5,
                    rng.random_range(0.1..0.9),
                    rng.random_range(0.1..0.9),
                    rng.random_range(0.1..0.9),
                )
                .unwrap();
                let big_r = 10f64.powf(rng.random_range(-0.8..0.8));
                let Ok(l2) = l2_perp_isosceles_db2(&params, big_r) else {
                    continue;
                };
                if l2 <= 0.0 {
                    continue;
                }
                return Db2Re {
                    params,
                    l: l2.sqrt(),
                    r: big_r + params.ell2() * params.x22(),
                    theta1: half_pi,
                    theta2: 0.0,
                };
            }
            _ => {
                // Equal-mass trapezoid.
                let params: Db2Params =
                    Db2Params::equal_mass(rng.random_range(0.1..0.9), rng.random_range(0.15..0.85))
                        .unwrap();
                let r = 10f64.powf(rng.random_range(-0.8..0.8));
                let Ok(l2) = l2_trapezoid_db2(&params, r) else {
                    continue;
                };
                if l2 <= 0.0 {
                    continue;
                }
                return Db2Re {
                    params,
                    l: l2.sqrt(),
                    r,
                    theta1: half_pi,
                    theta2: half_pi,
                };
            }
        }
    }
}

/// Random non-collision Db1 configuration (not necessarily an RE).
pub fn random_db1_config(rng: &mut ChaCha8Rng) -> (Db1Params, f64, f64, f64) {
    loop {
        let params: Db1Params =
            Db1Params::new(rng.random_range(0.05..0.95), rng.random_range(0.05..0.95)).unwrap();
        let r = 10f64.powf(rng.random_range(-0.7..0.9));
        let theta = rng.random_range(0.0..std::f64::consts::PI);
        let l = rng.random_range(0.0..2.0);
        if let Ok((d1, d2)) = params.distances(r, theta) {
            if d1 > 1e-3 && d2 > 1e-3 {
                return (params, l, r, theta);
            }
        }
    }
}

/// Random non-collision Db2 configuration (not necessarily an RE).
pub fn random_db2_config(rng: &mut ChaCha8Rng) -> (Db2Params, f64, f64, f64, f64) {
    let tau = std::f64::consts::TAU;
    loop {
        let params: Db2Params = Db2Params::new(
            rng.random_range(0.05..0.95),
            rng.random_range(0.05..0.95),
            rng.random_range(0.05..0.95),
            rng.random_range(0.05..0.95),
        )
        .unwrap();
        let r = 10f64.powf(rng.random_range(-0.7..0.9));
        let t1 = rng.random_range(0.0..tau);
        let t2 = rng.random_range(0.0..tau);
        let l = rng.random_range(0.0..2.0);
        if let Ok(d) = params.distances(r, t1, t2) {
            if d.iter().all(|&x| x > 1e-3) {
                return (params, l, r, t1, t2);
            }
        }
    }
}
