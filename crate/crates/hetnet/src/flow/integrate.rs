//! Adaptive Runge–Kutta integration of the model field.
//!
//! Dormand–Prince 5(4): six function evaluations per step with the
//! first-same-as-last reuse, fifth-order propagation, and the embedded
//! fourth-order difference as the local error estimate. The controller
//! works in error-per-unit-step form (the error budget of a step of size
//! h ≤ 1 is h·tol), which makes the accumulated endpoint error scale
//! linearly in the tolerance.
//!
//! Backward integration runs the sign-flipped field forward in an internal
//! progress variable, so a single code path serves both time directions.

use crate::model::{evaluate_field, ModelParams, State};
use crate::{Error, Result};

/// Tolerance window accepted by every public flow operation.
pub const TOL_MIN: f64 = 1e-12;
pub const TOL_MAX: f64 = 1e-6;

/// Absolute floor of the per-component error scale. Sits at the rounding
/// noise of O(1) amplitudes: error in a coordinate holding 1e-12 is still
/// measured relative to that coordinate, so exponentially small transverse
/// coordinates keep their relative accuracy, while coordinates that are
/// exactly zero (invariant hyperplanes) cost nothing.
pub const ATOL: f64 = 1e-16;

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
// Fifth-order weights (also the seventh stage's row: first-same-as-last).
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the fifth- and fourth-order solutions.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// One trajectory: the accepted step endpoints of an adaptive integration.
///
/// `times[0] = 0` at the initial state; times are monotone increasing for
/// forward integration and monotone decreasing for backward.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    /// The error-per-unit-step tolerance the samples satisfy.
    pub tol: f64,
}

impl Trajectory {
    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one sample")
    }

    pub fn end_state(&self) -> &State {
        self.states.last().expect("trajectory has at least one sample")
    }

    /// Comma-separated rows `t,x1,x2,x3,y1,y2,y3` with a header line;
    /// floats printed shortest-roundtrip, so the export is lossless.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x1,x2,x3,y1,y2,y3\n");
        for (t, s) in self.times.iter().zip(self.states.iter()) {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                t, s.0[0], s.0[1], s.0[2], s.0[3], s.0[4], s.0[5]
            ));
        }
        out
    }
}

pub(crate) fn validate_tol(tol: f64) -> Result<()> {
    if !(TOL_MIN..=TOL_MAX).contains(&tol) {
        return Err(Error::InvalidParams(format!(
            "integrator tolerance {tol:e} outside [{TOL_MIN:e}, {TOL_MAX:e}]"
        )));
    }
    Ok(())
}

/// Outcome of one trial Runge–Kutta step.
struct RkTrial {
    y1: State,
    /// RMS of the embedded error over the per-component scales.
    err: f64,
    /// Field at `y1` (seventh stage), reusable as the next step's first.
    k7: State,
}

/// One fixed step of size `h` from `y0` with `k1 = dir·f(y0)` already known.
/// Returns `None` when any intermediate value leaves the representable
/// range — the caller treats that as a rejected step.
fn rk_trial(p: &ModelParams, dir: f64, y0: &State, k1: &State, h: f64) -> Option<RkTrial> {
    let eval = |s: &State| evaluate_field(p, s).ok().map(|f| f.scale(dir));
    let at = |coef: &[(f64, &State)]| {
        let mut out = *y0;
        for (c, k) in coef {
            out = out.add_scaled(h * c, k);
        }
        out
    };

    let k2 = eval(&at(&[(A21, k1)]))?;
    let k3 = eval(&at(&[(A31, k1), (A32, &k2)]))?;
    let k4 = eval(&at(&[(A41, k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = eval(&at(&[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
    let k6 = eval(&at(&[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
    let y1 = at(&[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    if !y1.is_finite() {
        return None;
    }
    let k7 = eval(&y1)?;

    let mut acc = 0.0;
    for i in 0..6 {
        let e = h
            * (E1 * k1.0[i]
                + E3 * k3.0[i]
                + E4 * k4.0[i]
                + E5 * k5.0[i]
                + E6 * k6.0[i]
                + E7 * k7.0[i]);
        let scale = ATOL + y0.0[i].abs().max(y1.0[i].abs());
        let r = e / scale;
        acc += r * r;
    }
    let err = (acc / 6.0).sqrt();
    if !err.is_finite() {
        return None;
    }
    Some(RkTrial { y1, err, k7 })
}

/// Live adaptive integration: one accepted step at a time, with the last
/// step kept re-runnable at any partial size for event localisation.
pub(crate) struct Flight<'a> {
    p: &'a ModelParams,
    dir: f64,
    tol: f64,
    /// Unsigned progress and state at the end of the last accepted step.
    pub tau: f64,
    pub y: State,
    k1: State,
    /// Start of the last accepted step.
    pub tau_prev: f64,
    pub y_prev: State,
    k1_prev: State,
    /// Size of the last accepted step (0 before the first).
    pub h_last: f64,
    h_next: f64,
    pub steps: u64,
}

impl<'a> Flight<'a> {
    /// `backward` integrates the sign-flipped field; `tau` stays ≥ 0 either
    /// way and signed times are `dir·tau`.
    pub fn new(p: &'a ModelParams, s0: State, tol: f64, backward: bool) -> Result<Self> {
        validate_tol(tol)?;
        if !s0.is_finite() {
            return Err(Error::NonFinite(format!("initial state {s0:?}")));
        }
        let dir = if backward { -1.0 } else { 1.0 };
        let f0 = evaluate_field(p, &s0)?.scale(dir);
        let h0 = (0.01 * (s0.norm() + 1e-3) / (f0.norm() + 1e-6)).clamp(1e-8, 1.0);
        Ok(Flight {
            p,
            dir,
            tol,
            tau: 0.0,
            y: s0,
            k1: f0,
            tau_prev: 0.0,
            y_prev: s0,
            k1_prev: f0,
            h_last: 0.0,
            h_next: h0,
            steps: 0,
        })
    }

    /// One accepted adaptive step. Afterwards `[tau_prev, tau]` brackets the
    /// step and [`Flight::state_within`] can re-evaluate interior points.
    pub fn advance(&mut self) -> Result<()> {
        self.advance_with_cap(f64::INFINITY).map(|_| ())
    }

    /// One accepted step, clipped so that `tau` never exceeds `tau_max`.
    /// Returns `true` once `tau == tau_max`.
    pub fn advance_with_cap(&mut self, tau_max: f64) -> Result<bool> {
        let mut h = self.h_next;
        loop {
            let remaining = tau_max - self.tau;
            if remaining <= 0.0 {
                return Ok(true);
            }
            let (h_try, clipped) = if h >= remaining {
                (remaining, true)
            } else {
                (h, false)
            };
            if h_try < 1e-13 * self.tau.max(1.0) {
                return Err(Error::Integration(format!(
                    "stiff or singular: step size underflow at t = {:.6e}",
                    self.dir * self.tau
                )));
            }
            self.steps += 1;
            if self.steps > 400_000_000 {
                return Err(Error::Integration("step budget exceeded".into()));
            }

            match rk_trial(self.p, self.dir, &self.y, &self.k1, h_try) {
                Some(t) => {
                    let budget = self.tol * h_try.min(1.0);
                    let ratio = budget / t.err.max(f64::MIN_POSITIVE);
                    if t.err <= budget {
                        self.tau_prev = self.tau;
                        self.y_prev = self.y;
                        self.k1_prev = self.k1;
                        self.h_last = h_try;
                        self.tau = if clipped { tau_max } else { self.tau + h_try };
                        self.y = t.y1;
                        self.k1 = t.k7;
                        self.h_next = h_try * (0.9 * ratio.powf(0.2)).clamp(0.2, 5.0);
                        return Ok(clipped);
                    }
                    h = h_try * (0.9 * ratio.powf(0.2)).clamp(0.1, 0.5);
                }
                // Non-finite intermediates: shrink hard and retry.
                None => h = h_try * 0.25,
            }
        }
    }

    /// State at offset `dt ∈ [0, h_last]` into the last accepted step,
    /// recomputed as one fixed Runge–Kutta step; `dt = h_last` reproduces
    /// the accepted endpoint bitwise.
    pub fn state_within(&self, dt: f64) -> Result<State> {
        if dt == 0.0 {
            return Ok(self.y_prev);
        }
        rk_trial(self.p, self.dir, &self.y_prev, &self.k1_prev, dt)
            .map(|t| t.y1)
            .ok_or_else(|| {
                Error::Integration(format!(
                    "non-finite interior state at t = {:.6e} + {dt:.3e}",
                    self.dir * self.tau_prev
                ))
            })
    }

}

/// Integrates the field from `s0` for `t_end` time units (negative `t_end`
/// integrates backward), sampling every accepted step.
pub fn integrate(p: &ModelParams, s0: &State, t_end: f64, tol: f64) -> Result<Trajectory> {
    p.validate()?;
    if !t_end.is_finite() {
        return Err(Error::NonFinite(format!("t_end = {t_end}")));
    }
    let backward = t_end < 0.0;
    let total = t_end.abs();
    let mut fl = Flight::new(p, *s0, tol, backward)?;
    let mut times = vec![0.0];
    let mut states = vec![*s0];
    while fl.tau < total {
        let done = fl.advance_with_cap(total)?;
        times.push(if backward { -fl.tau } else { fl.tau });
        states.push(fl.y);
        if done {
            break;
        }
    }
    Ok(Trajectory { times, states, tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::test_params::attracting_c123;
    use crate::model::{eigen_table, find_equilibria, EqClass};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tolerance_window_enforced() {
        let p = attracting_c123();
        let s0 = State::new(0.1, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            integrate(&p, &s0, 1.0, 1e-5),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            integrate(&p, &s0, 1.0, 1e-13),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn zero_time_gives_single_sample() {
        let p = attracting_c123();
        let s0 = State::new(0.1, 0.2, 0.0, 0.0, 0.1, 0.0);
        let tr = integrate(&p, &s0, 0.0, 1e-9).unwrap();
        assert_eq!(tr.times, vec![0.0]);
        assert_eq!(tr.states.len(), 1);
    }

    #[test]
    fn final_time_hit_exactly() {
        let p = attracting_c123();
        let s0 = State::new(0.3, 0.1, -0.2, 0.4, 0.05, 0.2);
        let tr = integrate(&p, &s0, 1.0, 1e-9).unwrap();
        assert_eq!(tr.end_time(), 1.0);
        assert!(tr.times.len() >= 3);
        for w in tr.times.windows(2) {
            assert!(w[1] > w[0]);
        }
        let back = integrate(&p, &s0, -1.0, 1e-9).unwrap();
        assert_eq!(back.end_time(), -1.0);
        for w in back.times.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    /// The plane (0,0,0; 0,y,y) is a fixed-point subspace: trajectories
    /// started inside stay inside to rounding accuracy.
    #[test]
    fn fixed_point_subspace_is_invariant() {
        let p = attracting_c123();
        let s0 = State::new(0.0, 0.0, 0.0, 0.0, 0.3, 0.3);
        let tr = integrate(&p, &s0, 20.0, 1e-9).unwrap();
        for s in &tr.states {
            let drift = s.0[0]
                .abs()
                .max(s.0[1].abs())
                .max(s.0[2].abs())
                .max(s.0[3].abs())
                .max((s.0[4] - s.0[5]).abs());
            assert!(drift <= 1e-9, "off-subspace drift {drift:e}");
        }
        // Inside the plane the amplitude settles at the ξ2 equilibrium.
        let eqs = find_equilibria(&p).unwrap();
        let xi2 = eqs.require(EqClass::Xi2).unwrap();
        assert!(tr.end_state().dist(&xi2.coords) < 1e-6);
    }

    /// A small displacement along the leading expanding eigenvector of ξ1
    /// leaves a 1e-2 ball of ξ1, exiting along that eigenvector.
    #[test]
    fn escape_follows_unstable_eigenvector() {
        let p = attracting_c123();
        let eqs = find_equilibria(&p).unwrap();
        let xi1 = eqs.require(EqClass::Xi1).unwrap();
        let eig = eigen_table(&p, xi1).unwrap();
        assert!(eig.lam(5) > 0.0);
        let e15 = eig.vec(5);
        let s0 = xi1.coords.add_scaled(1e-8, &e15);
        let tr = integrate(&p, &s0, 30.0, 1e-9).unwrap();
        let mut exited = false;
        for s in &tr.states {
            let off = s.add_scaled(-1.0, &xi1.coords);
            let r = off.norm();
            if r > 1e-2 {
                let along = off.dot(&e15);
                assert!(
                    along > 0.95 * r,
                    "exit direction not aligned: along {along:e}, r {r:e}"
                );
                exited = true;
                break;
            }
        }
        assert!(exited, "never left the 1e-2 ball of xi1");
    }

    #[test]
    fn backward_integration_recovers_start() {
        let p = attracting_c123();
        let s0 = State::new(0.3, 0.1, -0.2, 0.4, 0.05, 0.2);
        let fwd = integrate(&p, &s0, 5.0, 1e-10).unwrap();
        let back = integrate(&p, fwd.end_state(), -5.0, 1e-10).unwrap();
        let err = back.end_state().dist(&s0);
        assert!(err < 1e-6, "round trip error {err:e}");
    }

    /// Endpoint error scales linearly in the tolerance: two halvings
    /// shrink it by at least 4x overall, and each halving shrinks it.
    #[test]
    fn tolerance_controls_endpoint_error() {
        let p = attracting_c123();
        let s0 = State::new(0.4, 0.3, 0.2, 0.3, 0.2, 0.1);
        let t = 8.0;
        let reference = integrate(&p, &s0, t, 1e-12).unwrap();
        let err_at = |tol: f64| {
            integrate(&p, &s0, t, tol)
                .unwrap()
                .end_state()
                .dist(reference.end_state())
        };
        let e0 = err_at(1e-7);
        let e1 = err_at(5e-8);
        let e2 = err_at(2.5e-8);
        assert!(e1 < e0, "halving did not reduce error: {e0:e} -> {e1:e}");
        assert!(e2 < e1, "halving did not reduce error: {e1:e} -> {e2:e}");
        assert!(
            e0 / e2 >= 4.0,
            "two halvings shrank error only {:.2}x ({e0:e} -> {e2:e})",
            e0 / e2
        );
    }

    /// Φ_t(g·s) = g·Φ_t(s) for all five symmetry generators.
    #[test]
    fn flow_commutes_with_symmetries() {
        use crate::model::{apply_symmetry, SymmetryElement};
        let p = attracting_c123();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for g in &SymmetryElement::GENERATORS {
            let mut coords = [0.0; 6];
            for c in &mut coords {
                *c = rng.gen_range(-0.5..0.5);
            }
            let s0 = State(coords);
            let lhs = integrate(&p, &apply_symmetry(g, &s0), 10.0, 1e-10).unwrap();
            let rhs = integrate(&p, &s0, 10.0, 1e-10).unwrap();
            let err = lhs.end_state().dist(&apply_symmetry(g, rhs.end_state()));
            assert!(err <= 1e-8, "equivariance violated by {err:e}");
        }
    }

    /// A state far outside the attracting region blows up in finite time;
    /// the stepper reports underflow instead of looping.
    #[test]
    fn blowup_reported_as_stiff() {
        // Sign-flipped dissipation: the cubic terms now amplify.
        let p = crate::model::ModelParams {
            a1: 1.0,
            ..attracting_c123()
        };
        let s0 = State::new(10.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        match integrate(&p, &s0, 10.0, 1e-9) {
            Err(Error::Integration(msg)) => {
                assert!(msg.contains("stiff or singular"), "message: {msg}")
            }
            Err(Error::InvalidParams(_)) => {
                // a1 > 0 may already fail parameter validation; both paths
                // are acceptable rejections of the blow-up configuration.
            }
            other => panic!("expected integration failure, got {other:?}"),
        }
    }

    /// state_within(h_last) reproduces the accepted endpoint bitwise — the
    /// event localiser relies on re-running the last step.
    #[test]
    fn partial_step_is_consistent() {
        let p = attracting_c123();
        let s0 = State::new(0.3, 0.1, -0.2, 0.4, 0.05, 0.2);
        let mut fl = Flight::new(&p, s0, 1e-9, false).unwrap();
        for _ in 0..5 {
            fl.advance().unwrap();
        }
        let replay = fl.state_within(fl.h_last).unwrap();
        assert_eq!(replay.0, fl.y.0, "partial step at full size must match");
        let mid = fl.state_within(0.5 * fl.h_last).unwrap();
        assert!(mid.is_finite());
        let d_mid = mid.dist(&fl.y_prev) + mid.dist(&fl.y);
        let d_full = fl.y_prev.dist(&fl.y);
        assert!(d_mid < 4.0 * d_full + 1e-12);
    }
}
