//! Brute-force basin fractions by direct iteration.
//!
//! This is the measurement side of the dual-route checks: classifiers
//! decide stability from inequalities, the oracle measures what fraction
//! of a grid of starting points near the origin actually converges.  The
//! two routes share no code beyond the map definition itself.

use super::iterate::step_log;
use super::PowerMap;
use crate::error::{Error, Result};

/// The sampling grid spans five decades below `eps` in each coordinate
/// (log-uniform).  Deep enough to resolve the thin escape slivers of
/// essentially-asymptotically-stable maps and the off-axis basins of
/// maps that are only fragmentarily stable.
const GRID_FLOOR: f64 = 1e-5;

/// A surviving orbit counts as converged only if its final max-coordinate
/// is below `eps * CONV_FACTOR`: staying bounded without approaching the
/// origin is not convergence.
const CONV_FACTOR: f64 = 1e-3;

/// Log-magnitude guard: beyond this the orbit is numerically decided.
const LOG_GUARD: f64 = 1e250;

/// Fraction of a log-uniform grid of starting points in `(0, eps)^2`
/// whose orbit stays inside `(0, delta)^2` for `max_iter` steps and ends
/// with both coordinates below `eps * 1e-3`.
///
/// Requires `0 < eps <= delta < 1` and a non-empty grid.  `max_iter = 0`
/// counts every point as trivially staying, returning `1.0`.
///
/// For the three-dimensional `Return3` family the grid is `grid_n^3`
/// points in `(0, eps)^3` and the full map is iterated with
/// `p = max{|x1|, |x2|}`, `q = |x3|` deciding escape and convergence.
pub fn basin_fraction_oracle(
    m: &PowerMap<f64>,
    delta: f64,
    eps: f64,
    grid_n: usize,
    max_iter: usize,
) -> Result<f64> {
    m.validate()?;
    if !(eps > 0.0 && eps <= delta && delta < 1.0) {
        return Err(Error::InvalidParams(format!(
            "need 0 < eps <= delta < 1, got eps = {eps}, delta = {delta}"
        )));
    }
    if grid_n == 0 {
        return Err(Error::InvalidParams("grid_n must be positive".into()));
    }
    if max_iter == 0 {
        return Ok(1.0);
    }
    match m {
        PowerMap::Return3 { .. } => oracle_3d(m, delta, eps, grid_n, max_iter),
        _ => oracle_2d(m, delta, eps, grid_n, max_iter),
    }
}

/// Midpoints of a log-uniform partition of `[eps * GRID_FLOOR, eps]`.
fn log_grid(eps: f64, grid_n: usize) -> Vec<f64> {
    let top = eps.ln();
    let span = GRID_FLOOR.ln();
    (0..grid_n)
        .map(|i| top + span * (i as f64 + 0.5) / grid_n as f64)
        .collect()
}

fn oracle_2d(
    m: &PowerMap<f64>,
    delta: f64,
    eps: f64,
    grid_n: usize,
    max_iter: usize,
) -> Result<f64> {
    let ln_delta = delta.ln();
    let ln_conv = (eps * CONV_FACTOR).ln();
    let axis = log_grid(eps, grid_n);
    let mut stayed = 0usize;
    for &u0 in &axis {
        for &v0 in &axis {
            let mut u = u0;
            let mut v = v0;
            let mut ok = true;
            for _ in 0..max_iter {
                let (nu, nv) = step_log(m, u, v);
                u = nu;
                v = nv;
                if !(u < ln_delta && v < ln_delta) {
                    // Escaped (0, delta)^2, or NaN: either way not in
                    // the basin.
                    ok = false;
                    break;
                }
                if u < -LOG_GUARD && v < -LOG_GUARD {
                    // Both coordinates underflowed: converged for good.
                    break;
                }
            }
            if ok && u.max(v) < ln_conv {
                stayed += 1;
            }
        }
    }
    Ok(stayed as f64 / (grid_n * grid_n) as f64)
}

fn oracle_3d(
    m: &PowerMap<f64>,
    delta: f64,
    eps: f64,
    grid_n: usize,
    max_iter: usize,
) -> Result<f64> {
    let (beta1, beta2, f) = match m {
        PowerMap::Return3 {
            beta1,
            beta2,
            coeffs,
        } => (*beta1, *beta2, *coeffs),
        _ => unreachable!("oracle_3d only called for Return3"),
    };
    let conv = eps * CONV_FACTOR;
    let axis: Vec<f64> = log_grid(eps, grid_n).iter().map(|&l| l.exp()).collect();
    let mut stayed = 0usize;
    for &x1_0 in &axis {
        for &x2_0 in &axis {
            for &x3_0 in &axis {
                let (mut x1, mut x2, mut x3) = (x1_0, x2_0, x3_0);
                let mut ok = true;
                for _ in 0..max_iter {
                    let q = x3.abs();
                    let amp2 = f[1] * x1 + f[2] * x2;
                    let amp3 = f[3] * x1 + f[4] * x2;
                    let qb2 = q.powf(beta2);
                    x1 = f[0] * q.powf(beta1);
                    x2 = amp2 * qb2;
                    x3 = amp3 * qb2;
                    let p = x1.abs().max(x2.abs());
                    let qq = x3.abs();
                    if !(p < delta && qq < delta) {
                        ok = false;
                        break;
                    }
                }
                if ok && x1.abs().max(x2.abs()).max(x3.abs()) < conv {
                    stayed += 1;
                }
            }
        }
    }
    Ok(stayed as f64 / (grid_n * grid_n * grid_n) as f64)
}
