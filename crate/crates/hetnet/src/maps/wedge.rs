//! Volume of the escape wedge `{x in [0, eps]^3 : x1 * x2^a > h * x3^b}`.
//!
//! The wedge measures how much of a small box is carried away through a
//! single unstable direction; its scaling in `eps` separates essential
//! from fragmentary stability.  Two independent routes: an exact
//! quadrature of the defining inequality, and plain Monte Carlo.

use crate::error::{Error, Result};
use crate::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

fn check_common<T: Real>(h: T, eps: T, a: T, b: T) -> Result<()> {
    for (v, name) in [(h, "h"), (eps, "eps"), (a, "a"), (b, "b")] {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("{name} = {v:?}")));
        }
    }
    if !(a > T::zero() && b > T::zero()) {
        return Err(Error::InvalidParams(format!(
            "exponents must be positive, got a = {a:?}, b = {b:?}"
        )));
    }
    if !(T::zero() < eps && eps < h) {
        return Err(Error::InvalidParams(format!(
            "need 0 < eps < h, got eps = {eps:?}, h = {h:?}"
        )));
    }
    Ok(())
}

/// The wedge ceiling `g(x1, x2) = (x1 * x2^a / h)^(1/b)` stays below
/// `eps` on the whole box iff it does at the far corner.
fn submerged<T: Real>(h: T, eps: T, a: T, b: T) -> bool {
    // g(eps, eps) <= eps  <=>  (1 + a - b) * ln(eps) <= ln(h).
    (T::one() + a - b) * eps.ln() <= h.ln()
}

/// Exact volume of `{x in [0, eps]^3 : x1 * x2^a > h * x3^b}`.
///
/// Two closed forms, split by whether the wedge ceiling is submerged
/// below the box (`g(eps, eps) < eps`, the typical situation for
/// `b < 1 + a`):
///
/// - submerged: `h^(-1/b) * b^2 / ((a+b)(b+1)) * eps^(2 + (1+a)/b)`;
/// - otherwise (requires `a != 1`):
///   `eps^3 - h * eps^(2+b-a) / ((1-a)(b+1))
///    + a^2 * h^(1/a) * eps^(2+(b-1)/a) / ((a+b)(1-a))`.
///
/// For `b < 1 + a` the submersion condition is part of the contract and
/// its failure is an error; for `b >= 1 + a` the applicable form is
/// selected from the geometry.  The two forms agree exactly on the seam
/// `h = eps^(1+a-b)`.
pub fn wedge_volume<T: Real>(h: T, eps: T, a: T, b: T) -> Result<T> {
    check_common(h, eps, a, b)?;
    let one = T::one();
    let two = one + one;
    let sub = submerged(h, eps, a, b);
    if b < one + a && !sub {
        return Err(Error::InvalidParams(format!(
            "the shallow-exponent form needs g(eps, eps) < eps, \
             i.e. eps^(1+a-b) <= h; got h = {h:?}, eps = {eps:?}, a = {a:?}, b = {b:?}"
        )));
    }
    if sub {
        let coeff = b * b / ((a + b) * (b + one));
        return Ok(h.powf(-one / b) * coeff * eps.powf(two + (one + a) / b));
    }
    if (a - one).abs() < T::boundary_tol() {
        return Err(Error::InvalidParams(
            "a = 1 makes the emergent-branch closed form singular (1 - a divides it)".into(),
        ));
    }
    let full = eps.powf(two + one);
    let mid = h * eps.powf(two + b - a) / ((one - a) * (b + one));
    let tip = a * a * h.powf(one / a) * eps.powf(two + (b - one) / a) / ((a + b) * (one - a));
    Ok(full - mid + tip)
}

/// Monte Carlo estimate of the wedge volume.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WedgeEstimate {
    pub volume: f64,
    /// One-sigma binomial error of the estimate.
    pub std_error: f64,
}

/// Estimate the wedge volume by uniform sampling of `[0, eps]^3`.
///
/// Deterministic for a fixed `seed`; `samples = 0` is an error (no
/// estimate, not a zero estimate).
pub fn wedge_volume_mc(
    h: f64,
    eps: f64,
    a: f64,
    b: f64,
    samples: u64,
    seed: u64,
) -> Result<WedgeEstimate> {
    check_common(h, eps, a, b)?;
    if samples == 0 {
        return Err(Error::InvalidParams(
            "samples = 0: nothing to estimate".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let x1 = eps * rng.gen::<f64>();
        let x2 = eps * rng.gen::<f64>();
        let x3 = eps * rng.gen::<f64>();
        if x1 * x2.powf(a) > h * x3.powf(b) {
            hits += 1;
        }
    }
    let n = samples as f64;
    let p = hits as f64 / n;
    let box_volume = eps.powi(3);
    Ok(WedgeEstimate {
        volume: box_volume * p,
        std_error: box_volume * (p * (1.0 - p) / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_exponents_give_quarter_quartic() {
        let eps = 0.5f64;
        let v = wedge_volume(1.0, eps, 1.0, 1.0).unwrap();
        assert_relative_eq!(v, eps.powi(4) / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn emergent_branch_closed_form() {
        // h = 1, a = 0.5, b = 2, eps = 0.4: not submerged since
        // eps^(1 + a - b) = 0.4^(-0.5) > 1.
        let (h, eps, a, b) = (1.0f64, 0.4f64, 0.5, 2.0);
        let v = wedge_volume(h, eps, a, b).unwrap();
        let expect = eps.powi(3) - h * eps.powf(3.5) / (0.5 * 3.0)
            + 0.25 * h.powf(2.0) * eps.powi(4) / (2.5 * 0.5);
        assert_relative_eq!(v, expect, max_relative = 1e-14);
        // Cross-check against Monte Carlo well within sampling error.
        let mc = wedge_volume_mc(h, eps, a, b, 400_000, 7).unwrap();
        assert!(
            (v - mc.volume).abs() <= 3.5 * mc.std_error,
            "closed form {v} vs MC {} +- {}",
            mc.volume,
            mc.std_error
        );
    }

    #[test]
    fn branches_agree_on_the_seam() {
        // At h = eps^(1+a-b) both closed forms give the same volume.
        let (eps, a, b) = (0.3f64, 0.5, 2.0);
        let h_seam = eps.powf(1.0 + a - b);
        let below = wedge_volume(h_seam * (1.0 - 1e-10), eps, a, b).unwrap();
        let above = wedge_volume(h_seam * (1.0 + 1e-10), eps, a, b).unwrap();
        assert_relative_eq!(below, above, max_relative = 1e-8);
    }

    #[test]
    fn volume_is_monotone_non_increasing_in_h() {
        // Ladder of h values crossing the branch seam.
        let (eps, a, b) = (0.2, 0.5, 2.0);
        let hs = [0.5, 1.0, 2.0, 2.2360679, 2.5, 3.0];
        let mut last = f64::INFINITY;
        for h in hs {
            let v = wedge_volume(h, eps, a, b).unwrap();
            assert!(
                v <= last + 1e-15,
                "volume increased from {last} to {v} at h = {h}"
            );
            assert!(v >= 0.0);
            last = v;
        }
    }

    #[test]
    fn shallow_branch_requires_submersion() {
        // b < 1 + a but the ceiling pokes out of the box.
        let err = wedge_volume(0.5, 0.05, 0.5, 1.4).unwrap_err();
        assert!(format!("{err}").contains("g(eps, eps)"));
    }

    #[test]
    fn a_equal_one_is_singular_on_the_emergent_branch() {
        // b >= 1 + a and not submerged: 0.1^(1+1-2) = 1 > h.
        let err = wedge_volume(0.5, 0.1, 1.0, 2.0).unwrap_err();
        assert!(matches!(err, Error::InvalidParams(_)));
        assert!(format!("{err}").contains("a = 1"));
    }

    #[test]
    fn monte_carlo_is_deterministic_per_seed() {
        let x = wedge_volume_mc(1.0, 0.3, 1.0, 1.0, 50_000, 42).unwrap();
        let y = wedge_volume_mc(1.0, 0.3, 1.0, 1.0, 50_000, 42).unwrap();
        assert_eq!(x.volume.to_bits(), y.volume.to_bits());
        assert_eq!(x.std_error.to_bits(), y.std_error.to_bits());
        let z = wedge_volume_mc(1.0, 0.3, 1.0, 1.0, 50_000, 43).unwrap();
        assert_ne!(x.volume.to_bits(), z.volume.to_bits());
    }

    #[test]
    fn monte_carlo_matches_submerged_form() {
        let (h, eps, a, b) = (1.0, 0.5, 1.0, 1.0);
        let v = wedge_volume(h, eps, a, b).unwrap();
        let mc = wedge_volume_mc(h, eps, a, b, 400_000, 11).unwrap();
        assert!((v - mc.volume).abs() <= 3.5 * mc.std_error);
    }

    #[test]
    fn zero_samples_is_an_error() {
        assert!(wedge_volume_mc(1.0, 0.3, 1.0, 1.0, 0, 1).is_err());
    }

    #[test]
    fn rejects_bad_windows() {
        assert!(wedge_volume(0.1, 0.2, 1.0, 1.0).is_err()); // eps >= h
        assert!(wedge_volume(1.0, 0.2, -1.0, 1.0).is_err());
        assert!(wedge_volume(1.0, 0.2, 1.0, 0.0).is_err());
    }
}
