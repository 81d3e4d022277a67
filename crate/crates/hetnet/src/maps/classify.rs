//! Stability classification of the four power-map shapes.
//!
//! Each classifier evaluates the exact inequalities of the applicable
//! criterion using a three-valued comparison: a decision quantity within
//! [`crate::BOUNDARY_TOL`] of its threshold yields `Near`, and a verdict
//! that would have to consult a `Near` quantity comes back as
//! [`StabilityLevel::Boundary`] instead of guessing a side.  Quantities
//! that are not consulted (e.g. the tie-break between equal exponents
//! when both are safely positive) cannot trigger a boundary verdict.

use super::{StabilityLevel, StabilityVerdict};
use crate::error::{Error, Result};
use crate::Real;

/// Three-valued result of a strict comparison with tolerance band.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Tri {
    True,
    False,
    Near,
}

impl Tri {
    fn and(self, other: Tri) -> Tri {
        use Tri::*;
        match (self, other) {
            (False, _) | (_, False) => False,
            (Near, _) | (_, Near) => Near,
            _ => True,
        }
    }

    fn or(self, other: Tri) -> Tri {
        use Tri::*;
        match (self, other) {
            (True, _) | (_, True) => True,
            (Near, _) | (_, Near) => Near,
            _ => False,
        }
    }
}

/// `value > threshold`, with `Near` inside the tolerance band.
pub(crate) fn above<T: Real>(value: T, threshold: T) -> Tri {
    let d = value - threshold;
    if d.abs() < T::boundary_tol() {
        Tri::Near
    } else if d > T::zero() {
        Tri::True
    } else {
        Tri::False
    }
}

fn require_finite<T: Real>(vals: &[(T, &str)]) -> Result<()> {
    for (v, name) in vals {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("{name} = {v:?}")));
        }
    }
    Ok(())
}

fn boundary<T: Real>(what: &str, value: T) -> StabilityVerdict {
    StabilityVerdict {
        level: StabilityLevel::Boundary,
        completely_unstable: false,
        reasons: vec![format!(
            "{what} = {value:?} is within tolerance of its threshold; verdict withheld"
        )],
    }
}

/// Classify the rank-one map `(p, q) -> (p^(g*a) q^(g*b), p^a q^b)`.
///
/// After one step the orbit lies on `p = q^gamma` and the second
/// coordinate iterates `q -> q^(gamma*alpha + beta)`, so:
/// - f.a.s. iff `gamma*alpha + beta > 1` and `gamma > 0`;
/// - a.s. iff additionally `alpha > 0` and `beta > 0`;
/// - e.a.s. iff additionally the dominant exponent wins in magnitude,
///   `|max{alpha, beta}| > |min{alpha, beta}|`, or the map is a.s.
///   (equal positive exponents attract a full neighbourhood, so the
///   tie-break is only consulted when asymptotic stability fails).
pub fn classify_rank_one<T: Real>(alpha: T, beta: T, gamma: T) -> Result<StabilityVerdict> {
    require_finite(&[(alpha, "alpha"), (beta, "beta"), (gamma, "gamma")])?;
    let one = T::one();
    let zero = T::zero();

    let contraction = gamma * alpha + beta;
    let fas_rate = above(contraction, one);
    let fas_sign = above(gamma, zero);
    match fas_rate.and(fas_sign) {
        Tri::False => {
            let mut reasons = Vec::new();
            if fas_rate == Tri::False {
                reasons.push(format!(
                    "gamma*alpha + beta = {contraction:?} <= 1: no net contraction"
                ));
            }
            if fas_sign == Tri::False {
                reasons.push(format!("gamma = {gamma:?} <= 0"));
            }
            return Ok(StabilityVerdict::unstable(reasons, false));
        }
        Tri::Near => {
            return Ok(if fas_rate == Tri::Near {
                boundary("gamma*alpha + beta - 1", contraction - one)
            } else {
                boundary("gamma", gamma)
            });
        }
        Tri::True => {}
    }

    let mut reasons = vec![
        format!("gamma*alpha + beta = {contraction:?} > 1"),
        format!("gamma = {gamma:?} > 0"),
    ];

    let a_pos = above(alpha, zero);
    let b_pos = above(beta, zero);
    let asym = a_pos.and(b_pos);
    if asym == Tri::True {
        reasons.push(format!("alpha = {alpha:?} > 0 and beta = {beta:?} > 0"));
        return Ok(StabilityVerdict::new(StabilityLevel::As, reasons));
    }

    // Tie-break between the exponents: the larger one must dominate in
    // magnitude for the complement of the basin to thin out.
    let (hi, lo) = if alpha >= beta {
        (alpha, beta)
    } else {
        (beta, alpha)
    };
    let dominance = hi.abs() - lo.abs();
    let extreme = above(dominance, zero).or(asym);

    if asym == Tri::Near {
        return Ok(boundary("min{alpha, beta}", alpha.min(beta)));
    }
    match extreme {
        Tri::True => {
            reasons.push(format!("min{{alpha, beta}} = {:?} <= 0: not a.s.", alpha.min(beta)));
            reasons.push(format!(
                "|max{{alpha, beta}}| - |min{{alpha, beta}}| = {dominance:?} > 0"
            ));
            Ok(StabilityVerdict::new(StabilityLevel::Eas, reasons))
        }
        Tri::False => {
            reasons.push(format!(
                "|max{{alpha, beta}}| - |min{{alpha, beta}}| = {dominance:?} <= 0: \
                 basin complement does not thin out"
            ));
            Ok(StabilityVerdict::new(StabilityLevel::Fas, reasons))
        }
        Tri::Near => Ok(boundary(
            "|max{alpha, beta}| - |min{alpha, beta}|",
            dominance,
        )),
    }
}

/// Classify `(p, q) -> (p^a1 q^b1, p^a2 q^b2)` with general exponents.
///
/// Requires `alpha2 > 0` (the second component must actually feed on the
/// first); outside that hypothesis this returns an error.  The criterion:
/// f.a.s. iff the exponent matrix has a real dominant eigenvalue above 1
/// with a positive eigenvector, expressed through the four inequalities
/// below; a.s. iff all four exponents relevant to invariance are positive
/// with the same trace condition.  Essential asymptotic stability is not
/// determined by this criterion except via a.s.
pub fn classify_full_map<T: Real>(
    alpha1: T,
    beta1: T,
    alpha2: T,
    beta2: T,
) -> Result<StabilityVerdict> {
    require_finite(&[
        (alpha1, "alpha1"),
        (beta1, "beta1"),
        (alpha2, "alpha2"),
        (beta2, "beta2"),
    ])?;
    if alpha2 <= T::zero() {
        return Err(Error::OutsideHypothesis(format!(
            "alpha2 = {alpha2:?} must be positive"
        )));
    }
    let one = T::one();
    let zero = T::zero();
    let two = one + one;
    let four = two + two;

    let trace = alpha1 + beta2;
    let growth = alpha1 + beta2 + beta1 * alpha2 - alpha1 * beta2;
    let c2 = above(growth, one).or(above(trace, two));

    // a.s. path: positivity of all exponents that keep the quadrant
    // invariant and monotone, plus the growth condition.
    let positive = above(alpha1, zero)
        .and(above(beta1, zero))
        .and(above(beta2, zero));
    if positive.and(c2) == Tri::True {
        return Ok(StabilityVerdict::new(
            StabilityLevel::As,
            vec![
                format!(
                    "alpha1 = {alpha1:?}, beta1 = {beta1:?}, beta2 = {beta2:?} all > 0"
                ),
                format!(
                    "growth: alpha1+beta2+beta1*alpha2-alpha1*beta2 = {growth:?} > 1 \
                     or alpha1+beta2 = {trace:?} > 2"
                ),
            ],
        ));
    }

    let c1 = above(trace, zero);
    let c3 = above(beta1, zero).or(above(alpha1 - beta2, zero));
    // Discriminant of the exponent matrix; redundant whenever beta1 > 0
    // or the first growth clause already holds.
    let disc = (alpha1 - beta2) * (alpha1 - beta2) + four * beta1 * alpha2;
    let c4 = if above(beta1, zero) == Tri::True || above(growth, one) == Tri::True {
        Tri::True
    } else {
        above(disc, zero)
    };

    let fas = c1.and(c2).and(c3).and(c4);
    match fas {
        Tri::False => {
            let mut reasons = Vec::new();
            if c1 == Tri::False {
                reasons.push(format!("alpha1 + beta2 = {trace:?} <= 0"));
            }
            if c2 == Tri::False {
                reasons.push(format!(
                    "growth fails: alpha1+beta2+beta1*alpha2-alpha1*beta2 = {growth:?} <= 1 \
                     and alpha1+beta2 = {trace:?} <= 2"
                ));
            }
            if c3 == Tri::False {
                reasons.push(format!(
                    "beta1 = {beta1:?} <= 0 and alpha1 - beta2 = {:?} <= 0: \
                     dominant eigenvector leaves the quadrant",
                    alpha1 - beta2
                ));
            }
            if c4 == Tri::False {
                reasons.push(format!(
                    "discriminant (alpha1-beta2)^2 + 4*beta1*alpha2 = {disc:?} < 0: \
                     complex eigenvalues"
                ));
            }
            Ok(StabilityVerdict::unstable(reasons, false))
        }
        Tri::Near => Ok(boundary(
            "a decision quantity of the eigenvalue criterion",
            zero,
        )),
        Tri::True => {
            if positive == Tri::Near {
                return Ok(boundary("an exponent deciding a.s.", zero));
            }
            Ok(StabilityVerdict::new(
                StabilityLevel::Fas,
                vec![
                    format!("trace alpha1 + beta2 = {trace:?} > 0"),
                    format!(
                        "growth: alpha1+beta2+beta1*alpha2-alpha1*beta2 = {growth:?} > 1 \
                         or alpha1+beta2 = {trace:?} > 2"
                    ),
                    "dominant eigenvector points into the quadrant".into(),
                    "e.a.s. is not determined by this criterion (only a.s. implies it here)"
                        .into(),
                ],
            ))
        }
    }
}

/// Classify the max-branch map
/// `(p, q) -> (max{p^(g*a2) q^(g*b2), p^a1 q^b1}, p^a2 q^b2)`.
///
/// Hypotheses (violations are errors naming the failed one): `alpha1 >= 0`,
/// `alpha2 > 0`, `gamma*alpha2 - alpha1 > 0`.  The slope
/// `gamma1 = (beta1 - gamma*beta2) / (gamma*alpha2 - alpha1)` decides which
/// branch of the max dominates near the origin:
///
/// - `gamma1 > gamma`: the rank-one branch wins; f.a.s. iff `gamma > 0`
///   and `gamma*alpha2 + beta2 > 1`; e.a.s. additionally needs
///   `alpha2 + beta2 > 0`; a.s. additionally needs `beta2 > 0`.
///   (The hypotheses force `gamma > 0`; the sign check only guards the
///   tolerance band.)
/// - `gamma1 < gamma` (requires `beta1*alpha2 - alpha1*beta2 > 0`): the
///   general branch wins and the verdict follows the trace sign:
///   with `alpha1 + beta2 > 0`, f.a.s. iff `gamma > 0` and
///   `alpha1+beta2+beta1*alpha2-alpha1*beta2 > 1` (a.s. iff also
///   `beta1 > 0`, `beta2 > 0`); with `alpha1 + beta2 < 0`, f.a.s. iff
///   `gamma > 0` and `alpha2*(gamma*alpha1+beta1) + beta2*(gamma*alpha2+beta2) > 1`,
///   and the map is never a.s.
pub fn classify_max_map<T: Real>(
    alpha1: T,
    beta1: T,
    alpha2: T,
    beta2: T,
    gamma: T,
) -> Result<StabilityVerdict> {
    require_finite(&[
        (alpha1, "alpha1"),
        (beta1, "beta1"),
        (alpha2, "alpha2"),
        (beta2, "beta2"),
        (gamma, "gamma"),
    ])?;
    let zero = T::zero();
    let one = T::one();
    if alpha1 < zero {
        return Err(Error::OutsideHypothesis(format!(
            "alpha1 = {alpha1:?} must be non-negative"
        )));
    }
    if alpha2 <= zero {
        return Err(Error::OutsideHypothesis(format!(
            "alpha2 = {alpha2:?} must be positive"
        )));
    }
    let denom = gamma * alpha2 - alpha1;
    if denom <= zero {
        return Err(Error::OutsideHypothesis(format!(
            "gamma*alpha2 - alpha1 = {denom:?} must be positive"
        )));
    }

    let gamma1 = (beta1 - gamma * beta2) / denom;
    match above(gamma1, gamma) {
        Tri::Near => return Ok(boundary("gamma1 - gamma", gamma1 - gamma)),
        Tri::True => {
            // Steep branch: near the origin the max is realised by the
            // rank-one component and the dynamics contract like
            // q -> q^(gamma*alpha2 + beta2) along p = q^gamma.
            let rate = gamma * alpha2 + beta2;
            let g_pos = above(gamma, zero);
            let fas = g_pos.and(above(rate, one));
            let mut reasons = vec![format!(
                "gamma1 = {gamma1:?} > gamma = {gamma:?}: steep branch dominates"
            )];
            match fas {
                Tri::False => {
                    let completely = g_pos == Tri::False;
                    if completely {
                        reasons.push(format!(
                            "gamma = {gamma:?} <= 0: completely unstable"
                        ));
                    } else {
                        reasons.push(format!(
                            "gamma*alpha2 + beta2 = {rate:?} <= 1: no net contraction"
                        ));
                    }
                    Ok(StabilityVerdict::unstable(reasons, completely))
                }
                Tri::Near => Ok(if g_pos == Tri::Near {
                    boundary("gamma", gamma)
                } else {
                    boundary("gamma*alpha2 + beta2 - 1", rate - one)
                }),
                Tri::True => {
                    reasons.push(format!("gamma*alpha2 + beta2 = {rate:?} > 1"));
                    let b2_pos = above(beta2, zero);
                    if b2_pos == Tri::True {
                        reasons.push(format!("beta2 = {beta2:?} > 0"));
                        return Ok(StabilityVerdict::new(StabilityLevel::As, reasons));
                    }
                    if b2_pos == Tri::Near {
                        return Ok(boundary("beta2", beta2));
                    }
                    reasons.push(format!("beta2 = {beta2:?} < 0: not a.s."));
                    match above(alpha2 + beta2, zero) {
                        Tri::True => {
                            reasons.push(format!(
                                "alpha2 + beta2 = {:?} > 0",
                                alpha2 + beta2
                            ));
                            Ok(StabilityVerdict::new(StabilityLevel::Eas, reasons))
                        }
                        Tri::False => {
                            reasons.push(format!(
                                "alpha2 + beta2 = {:?} < 0: not e.a.s.",
                                alpha2 + beta2
                            ));
                            Ok(StabilityVerdict::new(StabilityLevel::Fas, reasons))
                        }
                        Tri::Near => Ok(boundary("alpha2 + beta2", alpha2 + beta2)),
                    }
                }
            }
        }
        Tri::False => {
            // Shallow branch: the general component realises the max.
            let det = beta1 * alpha2 - alpha1 * beta2;
            if det <= zero {
                return Err(Error::OutsideHypothesis(format!(
                    "beta1*alpha2 - alpha1*beta2 = {det:?} must be positive \
                     when gamma1 < gamma"
                )));
            }
            if det < T::boundary_tol() {
                return Ok(boundary("beta1*alpha2 - alpha1*beta2", det));
            }
            let trace = alpha1 + beta2;
            let mut reasons = vec![format!(
                "gamma1 = {gamma1:?} < gamma = {gamma:?}: shallow branch dominates"
            )];
            match above(trace, zero) {
                Tri::Near => Ok(boundary("alpha1 + beta2", trace)),
                Tri::True => {
                    let growth = trace + det;
                    let g_pos = above(gamma, zero);
                    let fas = g_pos.and(above(growth, one));
                    match fas {
                        Tri::False => {
                            if g_pos == Tri::False {
                                reasons.push(format!("gamma = {gamma:?} <= 0"));
                            } else {
                                reasons.push(format!(
                                    "alpha1+beta2+beta1*alpha2-alpha1*beta2 = {growth:?} <= 1"
                                ));
                            }
                            Ok(StabilityVerdict::unstable(reasons, false))
                        }
                        Tri::Near => Ok(boundary(
                            "a decision quantity of the shallow branch",
                            zero,
                        )),
                        Tri::True => {
                            reasons.push(format!(
                                "gamma = {gamma:?} > 0 and \
                                 alpha1+beta2+beta1*alpha2-alpha1*beta2 = {growth:?} > 1"
                            ));
                            let pos = above(beta1, zero).and(above(beta2, zero));
                            match pos {
                                Tri::True => {
                                    reasons.push(format!(
                                        "beta1 = {beta1:?} > 0 and beta2 = {beta2:?} > 0"
                                    ));
                                    Ok(StabilityVerdict::new(StabilityLevel::As, reasons))
                                }
                                Tri::False => {
                                    reasons.push(format!(
                                        "beta1 = {beta1:?} or beta2 = {beta2:?} negative: not a.s.; \
                                         e.a.s. is not determined by this criterion"
                                    ));
                                    Ok(StabilityVerdict::new(StabilityLevel::Fas, reasons))
                                }
                                Tri::Near => Ok(boundary("beta1 or beta2", beta1.min(beta2))),
                            }
                        }
                    }
                }
                Tri::False => {
                    // Negative trace: contraction happens over two steps.
                    let growth =
                        alpha2 * (gamma * alpha1 + beta1) + beta2 * (gamma * alpha2 + beta2);
                    let g_pos = above(gamma, zero);
                    let fas = g_pos.and(above(growth, one));
                    reasons.push(format!("alpha1 + beta2 = {trace:?} < 0: never a.s. here"));
                    match fas {
                        Tri::False => {
                            if g_pos == Tri::False {
                                reasons.push(format!("gamma = {gamma:?} <= 0"));
                            } else {
                                reasons.push(format!(
                                    "two-step growth alpha2*(gamma*alpha1+beta1) + \
                                     beta2*(gamma*alpha2+beta2) = {growth:?} <= 1"
                                ));
                            }
                            Ok(StabilityVerdict::unstable(reasons, false))
                        }
                        Tri::Near => Ok(boundary(
                            "a decision quantity of the negative-trace branch",
                            zero,
                        )),
                        Tri::True => {
                            reasons.push(format!(
                                "gamma = {gamma:?} > 0 and two-step growth = {growth:?} > 1; \
                                 e.a.s. is not determined by this criterion"
                            ));
                            Ok(StabilityVerdict::new(StabilityLevel::Fas, reasons))
                        }
                    }
                }
            }
        }
    }
}

/// Classify the three-dimensional return family by its two exponents.
///
/// The family is a.s. iff `beta1 > 0`, `beta2 > 0` and `beta1 + beta2 > 1`;
/// in every complementary open regime it is completely unstable.  The
/// decision quantities are `beta1`, `beta2` and `beta1 + beta2 - 1`; the
/// verdict does not depend on the interior seams of the unstable region
/// (`beta2 = -1`, `beta1 - beta2 = 1`), which only select which argument
/// applies.
pub fn classify_return_map<T: Real>(beta1: T, beta2: T) -> Result<StabilityVerdict> {
    require_finite(&[(beta1, "beta1"), (beta2, "beta2")])?;
    let zero = T::zero();
    let one = T::one();
    let b1 = above(beta1, zero);
    let b2 = above(beta2, zero);
    let sum = above(beta1 + beta2, one);
    match b1.and(b2).and(sum) {
        Tri::True => Ok(StabilityVerdict::new(
            StabilityLevel::As,
            vec![format!(
                "beta1 = {beta1:?} > 0, beta2 = {beta2:?} > 0, \
                 beta1 + beta2 = {:?} > 1",
                beta1 + beta2
            )],
        )),
        Tri::Near => {
            let v = if b1 == Tri::Near {
                ("beta1", beta1)
            } else if b2 == Tri::Near {
                ("beta2", beta2)
            } else {
                ("beta1 + beta2 - 1", beta1 + beta2 - one)
            };
            Ok(boundary(v.0, v.1))
        }
        Tri::False => {
            let regime = if b1 == Tri::False {
                format!("beta1 = {beta1:?} < 0: first component expands")
            } else if b2 == Tri::False {
                if beta2 < -one {
                    format!(
                        "beta1 = {beta1:?} > 0, beta2 = {beta2:?} < -1: \
                         alternating blow-up"
                    )
                } else {
                    format!(
                        "beta1 = {beta1:?} > 0, -1 < beta2 = {beta2:?} < 0: \
                         expansion through the mixed branch"
                    )
                }
            } else {
                format!(
                    "beta1 = {beta1:?} > 0, beta2 = {beta2:?} > 0, \
                     beta1 + beta2 = {:?} < 1: subcritical contraction",
                    beta1 + beta2
                )
            };
            Ok(StabilityVerdict::unstable(
                vec![regime, "completely unstable".into()],
                true,
            ))
        }
    }
}
