//! Direct iteration of power maps in logarithmic coordinates.
//!
//! In `u = ln p`, `v = ln q` every map shape acts (piecewise) linearly,
//! so orbits can be followed for huge contraction rates without losing
//! the exponent structure to floating-point underflow.

use super::PowerMap;
use crate::error::{Error, Result};
use crate::Real;

/// Log-magnitude at which an orbit is clamped and iteration stops.
/// A log-coordinate below `-LN_CLAMP` means the linear coordinate
/// underflowed to zero, i.e. the orbit reached an invariant axis.
const LN_CLAMP: f64 = 1e300;

/// An orbit of a power map, recorded in logarithmic coordinates.
#[derive(Clone, Debug)]
pub struct Orbit<T> {
    /// `(ln p, ln q)` per step; entry 0 is the initial point.
    pub log_points: Vec<(T, T)>,
    /// Some log-coordinate fell below the clamp: the orbit reached an
    /// invariant axis (a coordinate underflowed to zero) and iteration
    /// stopped there.
    pub absorbed: bool,
    /// Some log-coordinate exceeded the clamp: the orbit blew up and
    /// iteration stopped there.
    pub diverged: bool,
}

impl<T: Real> Orbit<T> {
    /// The orbit in linear coordinates `(p, q)`.
    pub fn points(&self) -> Vec<(T, T)> {
        self.log_points
            .iter()
            .map(|&(u, v)| (u.exp(), v.exp()))
            .collect()
    }

    pub fn last_log(&self) -> (T, T) {
        *self.log_points.last().expect("orbit never empty")
    }
}

/// One step of the map in log coordinates.
pub(super) fn step_log<T: Real>(m: &PowerMap<T>, u: T, v: T) -> (T, T) {
    match *m {
        PowerMap::RankOne { alpha, beta, gamma } => {
            let w = alpha * u + beta * v;
            (gamma * w, w)
        }
        PowerMap::Full {
            alpha1,
            beta1,
            alpha2,
            beta2,
        } => (alpha1 * u + beta1 * v, alpha2 * u + beta2 * v),
        PowerMap::Max {
            alpha1,
            beta1,
            alpha2,
            beta2,
            gamma,
        } => {
            let steep = gamma * (alpha2 * u + beta2 * v);
            let shallow = alpha1 * u + beta1 * v;
            (steep.max(shallow), alpha2 * u + beta2 * v)
        }
        // The comparison map of the three-dimensional family:
        // (p, q) -> (max{p q^b2, q^b1}, p q^b2).
        PowerMap::Return3 { beta1, beta2, .. } => {
            let mixed = u + beta2 * v;
            (mixed.max(beta1 * v), mixed)
        }
    }
}

/// Iterate a power map `n` steps from `(p0, q0)` in the open quadrant.
///
/// Returns the orbit in log coordinates (entry 0 is the input, so the
/// result holds `n + 1` points unless clamped early).  A coordinate
/// crossing the clamp magnitude stops the iteration with the `absorbed`
/// (underflow towards an axis) or `diverged` (blow-up) flag set.
/// Non-finite arithmetic (possible only through infinite inputs or
/// overflowing exponent combinations) is an error.
pub fn iterate_map<T: Real>(m: &PowerMap<T>, p0: T, q0: T, n: usize) -> Result<Orbit<T>> {
    m.validate()?;
    if !(p0 > T::zero() && q0 > T::zero()) || !p0.is_finite() || !q0.is_finite() {
        return Err(Error::InvalidParams(format!(
            "initial point ({p0:?}, {q0:?}) must lie in the open positive quadrant"
        )));
    }
    let clamp = T::from_f64(LN_CLAMP).expect("clamp fits the scalar type");
    let mut u = p0.ln();
    let mut v = q0.ln();
    let mut orbit = Orbit {
        log_points: Vec::with_capacity(n + 1),
        absorbed: false,
        diverged: false,
    };
    orbit.log_points.push((u, v));
    for _ in 0..n {
        let (nu, nv) = step_log(m, u, v);
        if nu.is_nan() || nv.is_nan() {
            return Err(Error::NonFinite(format!(
                "map iteration produced NaN from log point ({u:?}, {v:?})"
            )));
        }
        u = nu;
        v = nv;
        let over = u > clamp || v > clamp;
        let under = u < -clamp || v < -clamp;
        if over || under {
            // Blow-up of either coordinate counts as divergence even if
            // the other underflows; absorption means the orbit reached an
            // invariant axis without escaping.
            orbit.diverged = over;
            orbit.absorbed = under && !over;
            u = u.max(-clamp).min(clamp);
            v = v.max(-clamp).min(clamp);
            orbit.log_points.push((u, v));
            break;
        }
        orbit.log_points.push((u, v));
    }
    Ok(orbit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_iterations_returns_the_input() {
        let m = PowerMap::RankOne {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
        };
        let orbit = iterate_map(&m, 0.3, 0.7, 0).unwrap();
        assert_eq!(orbit.log_points.len(), 1);
        let pts = orbit.points();
        assert_relative_eq!(pts[0].0, 0.3, max_relative = 1e-15);
        assert_relative_eq!(pts[0].1, 0.7, max_relative = 1e-15);
    }

    #[test]
    fn rank_one_doubling_from_e_inverse() {
        // alpha = beta = gamma = 1 from (1/e, 1/e): ln q_n = -2^n.
        let m = PowerMap::RankOne {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
        };
        let e_inv = (-1.0f64).exp();
        let orbit = iterate_map(&m, e_inv, e_inv, 20).unwrap();
        assert!(!orbit.absorbed && !orbit.diverged);
        for (n, &(_, v)) in orbit.log_points.iter().enumerate() {
            assert_relative_eq!(v, -(2f64.powi(n as i32)), max_relative = 1e-12);
        }
    }

    #[test]
    fn rank_one_orbit_lands_on_the_power_curve() {
        // After one step, ln p = gamma * ln q exactly.
        let m = PowerMap::RankOne {
            alpha: 0.8,
            beta: 0.9,
            gamma: 1.7,
        };
        let orbit = iterate_map(&m, 0.2, 0.05, 8).unwrap();
        for &(u, v) in &orbit.log_points[1..] {
            assert_relative_eq!(u, 1.7 * v, max_relative = 1e-12);
        }
    }

    #[test]
    fn absorbed_orbits_are_clamped_and_flagged() {
        // Strong contraction: ln q multiplies by 4 each step; from
        // ln q = -100 it passes -1e300 within ~250 steps.
        let m = PowerMap::RankOne {
            alpha: 2.0,
            beta: 2.0,
            gamma: 1.0,
        };
        let p0 = (-100.0f64).exp();
        let orbit = iterate_map(&m, p0, p0, 2000).unwrap();
        assert!(orbit.absorbed);
        assert!(!orbit.diverged);
        assert!(orbit.log_points.len() < 2001);
        let (u, v) = orbit.last_log();
        assert!(u >= -1e300 && v >= -1e300);
    }

    #[test]
    fn diverging_orbits_are_clamped_and_flagged() {
        // Contraction rate gamma*alpha + beta = -2: |ln q| doubles with
        // alternating sign, so q blows past the clamp on even steps.
        let m = PowerMap::RankOne {
            alpha: 3.0,
            beta: 1.0,
            gamma: -1.0,
        };
        let p0 = (-100.0f64).exp();
        let orbit = iterate_map(&m, p0, p0, 2000).unwrap();
        assert!(orbit.diverged);
        assert!(!orbit.absorbed);
    }

    #[test]
    fn rejects_points_outside_the_open_quadrant() {
        let m = PowerMap::RankOne {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
        };
        assert!(iterate_map(&m, 0.0, 0.5, 3).is_err());
        assert!(iterate_map(&m, 0.5, -0.1, 3).is_err());
        assert!(iterate_map(&m, f64::NAN, 0.5, 3).is_err());
    }

    #[test]
    fn max_map_takes_the_larger_branch() {
        // At (p, q) = (e^-1, e^-4): steep branch gamma*(a2 u + b2 v) =
        // 2*(-1 - 2) = -6; shallow a1 u + b1 v = -0.5 - 4 = -4.5.
        // max in linear coordinates is the larger log.
        let m = PowerMap::Max {
            alpha1: 0.5,
            beta1: 1.0,
            alpha2: 1.0,
            beta2: 0.5,
            gamma: 2.0,
        };
        let orbit = iterate_map(&m, (-1.0f64).exp(), (-4.0f64).exp(), 1).unwrap();
        let (u1, v1) = orbit.log_points[1];
        assert_relative_eq!(u1, -4.5, max_relative = 1e-12);
        assert_relative_eq!(v1, -3.0, max_relative = 1e-12);
    }
}
