//! Closed-form stability verdicts for the three heteroclinic cycles and the
//! network they form.
//!
//! Everything here is exact arithmetic on an eigenvalue table: the β
//! exponent coefficients of the return maps, the per-cycle verdicts with
//! their stability indices, and the combination rules that lift cycle
//! verdicts to the network.  Numerical confirmation lives in `flow`; the
//! reduced-map classification these formulas feed lives in `maps`.
//!
//! Verdict semantics follow `maps`: any decision quantity within
//! [`crate::BOUNDARY_TOL`] of its threshold yields a `Boundary` verdict
//! instead of a guess, and premise sign patterns are checked before any
//! formula is trusted.

use crate::error::{Error, Result};
use crate::maps::{above, StabilityLevel, StabilityVerdict, Tri};
use crate::model::{existence_from_table, EigenTable, EqClass, Inequality};
use serde::Serialize;

/// One heteroclinic connection κ_ij (from ξ_i to a group copy of ξ_j).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Connection {
    K31,
    K12,
    K23,
    K14,
    K43,
    K45,
    K51,
}

impl Connection {
    pub fn name(self) -> &'static str {
        match self {
            Connection::K31 => "kappa31",
            Connection::K12 => "kappa12",
            Connection::K23 => "kappa23",
            Connection::K14 => "kappa14",
            Connection::K43 => "kappa43",
            Connection::K45 => "kappa45",
            Connection::K51 => "kappa51",
        }
    }

    /// Equilibrium class the connection leaves.
    pub fn from(self) -> EqClass {
        match self {
            Connection::K31 => EqClass::Xi3,
            Connection::K12 | Connection::K14 => EqClass::Xi1,
            Connection::K23 => EqClass::Xi2,
            Connection::K43 | Connection::K45 => EqClass::Xi4,
            Connection::K51 => EqClass::Xi5,
        }
    }

    /// Equilibrium class the connection lands on (up to a group element).
    pub fn to(self) -> EqClass {
        match self {
            Connection::K31 | Connection::K51 => EqClass::Xi1,
            Connection::K12 => EqClass::Xi2,
            Connection::K23 | Connection::K43 => EqClass::Xi3,
            Connection::K14 => EqClass::Xi4,
            Connection::K45 => EqClass::Xi5,
        }
    }
}

/// The three cycles of the network, named by the equilibria they visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CycleId {
    /// ξ3 → ξ1 → ξ2 → ρξ3.
    C123,
    /// ξ3 → ξ1 → ξ4 → −ρξ3.
    C143,
    /// ξ1 → ξ4 → ξ5 → ρ²ξ1.
    C145,
}

impl CycleId {
    pub const ALL: [CycleId; 3] = [CycleId::C123, CycleId::C143, CycleId::C145];

    pub fn name(self) -> &'static str {
        match self {
            CycleId::C123 => "C123",
            CycleId::C143 => "C143",
            CycleId::C145 => "C145",
        }
    }

    /// Equilibrium classes visited, in order; the cycle closes onto a group
    /// copy of the first one.
    pub fn nodes(self) -> [EqClass; 3] {
        match self {
            CycleId::C123 => [EqClass::Xi3, EqClass::Xi1, EqClass::Xi2],
            CycleId::C143 => [EqClass::Xi3, EqClass::Xi1, EqClass::Xi4],
            CycleId::C145 => [EqClass::Xi1, EqClass::Xi4, EqClass::Xi5],
        }
    }

    /// Connections ridden, in the same order as [`CycleId::nodes`].
    pub fn connections(self) -> [Connection; 3] {
        match self {
            CycleId::C123 => [Connection::K31, Connection::K12, Connection::K23],
            CycleId::C143 => [Connection::K31, Connection::K14, Connection::K43],
            CycleId::C145 => [Connection::K14, Connection::K45, Connection::K51],
        }
    }
}

/// Exponent coefficients of the reduced return map of a cycle.
///
/// `beta1`/`beta2` drive the two-dimensional comparison map whose fixed
/// point decides the verdict; `beta3`/`beta4` (ξ4-cycle only) are the wedge
/// exponents governing escape through the ξ1 crossroads, with `beta4`
/// normalised positive so the wedge-volume estimate applies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum BetaSet {
    /// Cycle through ξ2: the two return-map exponents.
    Two { beta1: f64, beta2: f64 },
    /// Cycle through ξ4: the return-map pair plus the wedge pair.
    Four {
        beta1: f64,
        beta2: f64,
        beta3: f64,
        beta4: f64,
    },
    /// The doubly-expanding cycle defines no exponents.
    Empty,
}

impl BetaSet {
    pub fn is_empty(&self) -> bool {
        matches!(self, BetaSet::Empty)
    }

    pub fn beta1(&self) -> Option<f64> {
        match *self {
            BetaSet::Two { beta1, .. } | BetaSet::Four { beta1, .. } => Some(beta1),
            BetaSet::Empty => None,
        }
    }

    pub fn beta2(&self) -> Option<f64> {
        match *self {
            BetaSet::Two { beta2, .. } | BetaSet::Four { beta2, .. } => Some(beta2),
            BetaSet::Empty => None,
        }
    }

    pub fn beta3(&self) -> Option<f64> {
        match *self {
            BetaSet::Four { beta3, .. } => Some(beta3),
            _ => None,
        }
    }

    pub fn beta4(&self) -> Option<f64> {
        match *self {
            BetaSet::Four { beta4, .. } => Some(beta4),
            _ => None,
        }
    }

    /// β1 + β2, the growth rate the verdicts compare against 1.
    pub fn sum12(&self) -> Option<f64> {
        match *self {
            BetaSet::Two { beta1, beta2 } | BetaSet::Four { beta1, beta2, .. } => {
                Some(beta1 + beta2)
            }
            BetaSet::Empty => None,
        }
    }
}

/// Local stability index σ along one connection: the strength of attraction
/// (positive) or repulsion (negative) seen by points near that connection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityIndex {
    pub connection: Connection,
    /// Extended real; `+inf` means every nearby point is attracted.
    #[serde(serialize_with = "serialize_extended")]
    pub value: f64,
    /// The closed form that produced the value.
    pub formula: String,
}

impl StabilityIndex {
    /// Text form of the value: `"+inf"`, `"-inf"`, or the shortest decimal.
    pub fn literal(&self) -> String {
        if self.value == f64::INFINITY {
            "+inf".to_owned()
        } else if self.value == f64::NEG_INFINITY {
            "-inf".to_owned()
        } else {
            format!("{}", self.value)
        }
    }
}

fn serialize_extended<S: serde::Serializer>(
    value: &f64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    if value.is_infinite() {
        s.serialize_str(if *value > 0.0 { "+inf" } else { "-inf" })
    } else {
        s.serialize_f64(*value)
    }
}

/// Classification of one cycle: verdict, indices, and the premise ledger.
#[derive(Clone, Debug, Serialize)]
pub struct CycleReport {
    pub cycle: CycleId,
    pub verdict: StabilityVerdict,
    /// `None` when a premise sits on the boundary, so no formula is trusted.
    pub betas: Option<BetaSet>,
    /// Non-empty exactly when the f.a.s. conditions held strictly.
    pub indices: Vec<StabilityIndex>,
    /// Every sign condition checked, with its value and boundary flag.
    pub premises: Vec<Inequality>,
}

/// Classification of the whole network.
#[derive(Clone, Debug, Serialize)]
pub struct NetworkReport {
    pub verdict: StabilityVerdict,
    /// Always `false`: the expanding eigenspace at ξ4 is two-dimensional,
    /// so the unstable manifold leaves the one-dimensional connection set.
    pub asymptotically_stable: bool,
    /// Network-level index values are pinned by the theory only as sign
    /// bounds, so no numbers are reported here.
    pub indices: Vec<StabilityIndex>,
    pub premises: Vec<Inequality>,
    pub c123: CycleReport,
    pub c143: CycleReport,
}

fn nonzero(value: f64, eigenvalue: &'static str, formula: &'static str) -> Result<()> {
    if value.abs() < crate::BOUNDARY_TOL {
        Err(Error::ZeroDenominator(eigenvalue, formula))
    } else {
        Ok(())
    }
}

fn require_finite(pairs: &[(f64, &str)]) -> Result<()> {
    for (v, name) in pairs {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("{name} = {v}")));
        }
    }
    Ok(())
}

/// Evaluates the β coefficients of `cycle` from the eigenvalue table.
///
/// The two cycles through ξ3 share one formula shape; they differ by
/// swapping the roles of the two expanding directions at ξ1 (λ15 ↔ λ16)
/// and replacing the ξ2 data (λ21, λ22, λ26) with the ξ4 data
/// (λ41, λ42, λ45).  The factor `1 − λ_out/λ_in` measures how much mass
/// the cycle keeps at the ξ1 crossroads.
pub fn beta_coefficients(cycle: CycleId, table: &EigenTable) -> Result<BetaSet> {
    let l12 = table.lam(1, 2);
    let l15 = table.lam(1, 5);
    let l16 = table.lam(1, 6);
    let l31 = table.lam(3, 1);
    let l32 = table.lam(3, 2);
    let l35 = table.lam(3, 5);
    match cycle {
        CycleId::C123 => {
            let l21 = table.lam(2, 1);
            let l22 = table.lam(2, 2);
            let l26 = table.lam(2, 6);
            nonzero(l15, "lambda15", "the C123 beta formulas")?;
            nonzero(l26, "lambda26", "the C123 beta formulas")?;
            nonzero(l31, "lambda31", "the C123 beta formulas")?;
            let keep = 1.0 - l16 / l15;
            let beta1 = l21 * l35 / (l26 * l31) * keep;
            let beta2 =
                -l32 / l31 + l35 * l12 / (l31 * l15) + l35 * l22 / (l31 * l26) * keep;
            require_finite(&[(beta1, "beta1"), (beta2, "beta2")])?;
            Ok(BetaSet::Two { beta1, beta2 })
        }
        CycleId::C143 => {
            let l41 = table.lam(4, 1);
            let l42 = table.lam(4, 2);
            let l45 = table.lam(4, 5);
            nonzero(l16, "lambda16", "the C143 beta formulas")?;
            nonzero(l31, "lambda31", "the C143 beta formulas")?;
            nonzero(l45, "lambda45", "the C143 beta formulas")?;
            let keep = 1.0 - l15 / l16;
            let beta1 = l41 * l35 / (l45 * l31) * keep;
            let beta2 =
                -l32 / l31 + l35 * l12 / (l31 * l16) + l35 * l42 / (l31 * l45) * keep;
            let beta3 = -l12 / l16 + l15 * l42 / (l16 * l45);
            let beta4 = l42 / l45;
            require_finite(&[
                (beta1, "beta1"),
                (beta2, "beta2"),
                (beta3, "beta3"),
                (beta4, "beta4"),
            ])?;
            Ok(BetaSet::Four {
                beta1,
                beta2,
                beta3,
                beta4,
            })
        }
        CycleId::C145 => Ok(BetaSet::Empty),
    }
}

/// The sign-pattern premise rows for one cycle.  The doubly-expanding
/// cycle is only ever considered as part of the network, so it inherits
/// the full network pattern.
fn premise_rows(cycle: CycleId, table: &EigenTable) -> Vec<Inequality> {
    let ex = existence_from_table(table);
    match cycle {
        CycleId::C123 => ex.cycle_c123,
        CycleId::C143 => ex.cycle_c143,
        CycleId::C145 => ex.network,
    }
}

enum PremiseStatus {
    Hold,
    OnBoundary(String),
    Violated(String),
}

fn premise_status(rows: &[Inequality]) -> PremiseStatus {
    let violated: Vec<&str> = rows
        .iter()
        .filter(|r| !r.satisfied && !r.boundary)
        .map(|r| r.label.as_str())
        .collect();
    if !violated.is_empty() {
        return PremiseStatus::Violated(violated.join(", "));
    }
    let near: Vec<&str> = rows
        .iter()
        .filter(|r| r.boundary)
        .map(|r| r.label.as_str())
        .collect();
    if !near.is_empty() {
        return PremiseStatus::OnBoundary(near.join(", "));
    }
    PremiseStatus::Hold
}

fn boundary_premise_report(
    cycle: CycleId,
    premises: Vec<Inequality>,
    labels: String,
) -> CycleReport {
    CycleReport {
        cycle,
        verdict: StabilityVerdict {
            level: StabilityLevel::Boundary,
            completely_unstable: false,
            reasons: vec![format!(
                "premise eigenvalue(s) within tolerance of zero: {labels}"
            )],
        },
        betas: None,
        indices: Vec::new(),
        premises,
    }
}

fn indices_c123(l15: f64, l16: f64) -> Vec<StabilityIndex> {
    vec![
        StabilityIndex {
            connection: Connection::K31,
            value: 1.0 - l16 / l15,
            formula: "1 - lambda16/lambda15".to_owned(),
        },
        StabilityIndex {
            connection: Connection::K12,
            value: f64::INFINITY,
            formula: "+inf".to_owned(),
        },
        StabilityIndex {
            connection: Connection::K23,
            value: f64::INFINITY,
            formula: "+inf".to_owned(),
        },
    ]
}

fn indices_c143(l15: f64, l16: f64, l42: f64, l45: f64, b3: f64, b4: f64) -> Vec<StabilityIndex> {
    let k31 = if b4 < b3 + 1.0 {
        StabilityIndex {
            connection: Connection::K31,
            value: (1.0 - l15 / l16).min((1.0 + b3 - b4) / b4),
            formula: "min{1 - lambda15/lambda16, (1 + beta3 - beta4)/beta4}".to_owned(),
        }
    } else {
        StabilityIndex {
            connection: Connection::K31,
            value: (1.0 - l15 / l16)
                .min((b4 - b3 - 1.0) / b3)
                .min(b4 - b3 - 1.0),
            formula: "min{1 - lambda15/lambda16, (beta4 - beta3 - 1)/beta3, beta4 - beta3 - 1}"
                .to_owned(),
        }
    };
    let k14 = if l45 >= l42 {
        StabilityIndex {
            connection: Connection::K14,
            value: 1.0 - l42 / l45,
            formula: "1 - lambda42/lambda45".to_owned(),
        }
    } else {
        StabilityIndex {
            connection: Connection::K14,
            value: l45 / l42 - 1.0,
            formula: "lambda45/lambda42 - 1".to_owned(),
        }
    };
    let k43 = StabilityIndex {
        connection: Connection::K43,
        value: f64::INFINITY,
        formula: "+inf".to_owned(),
    };
    vec![k31, k14, k43]
}

/// Classifies one cycle against its sign-pattern premises.
///
/// Premise rows with the wrong strict sign are an error (the cycle as
/// assumed does not exist there); rows within tolerance of zero yield a
/// `Boundary` verdict.  No cycle is ever asymptotically stable: each one
/// is part of the network and leaks through the crossroads at ξ1 or ξ4.
pub fn classify_cycle(cycle: CycleId, table: &EigenTable) -> Result<CycleReport> {
    let premises = premise_rows(cycle, table);
    match premise_status(&premises) {
        PremiseStatus::Violated(labels) => {
            return Err(Error::PremisesViolated(format!(
                "{}: required sign pattern fails at {labels}",
                cycle.name()
            )))
        }
        PremiseStatus::OnBoundary(labels) => {
            return Ok(boundary_premise_report(cycle, premises, labels))
        }
        PremiseStatus::Hold => {}
    }

    match cycle {
        CycleId::C123 => {
            let betas = beta_coefficients(cycle, table)?;
            let (b1, b2) = match betas {
                BetaSet::Two { beta1, beta2 } => (beta1, beta2),
                _ => unreachable!(),
            };
            let l15 = table.lam(1, 5);
            let l16 = table.lam(1, 6);
            let sum = b1 + b2;
            let gate = above(l15, l16);
            let growth = above(sum, 1.0);
            let (verdict, indices) = if gate == Tri::False || growth == Tri::False {
                let mut reasons = Vec::new();
                if gate == Tri::False {
                    reasons.push(format!(
                        "lambda15 = {l15} < lambda16 = {l16}: the exit from xi1 toward xi4 dominates"
                    ));
                }
                if growth == Tri::False {
                    reasons.push(format!(
                        "beta1 + beta2 = {sum} < 1: the return map contracts no neighbourhood"
                    ));
                }
                (
                    StabilityVerdict {
                        level: StabilityLevel::NotFas,
                        completely_unstable: true,
                        reasons,
                    },
                    Vec::new(),
                )
            } else if gate == Tri::True && growth == Tri::True {
                (
                    StabilityVerdict {
                        level: StabilityLevel::Eas,
                        completely_unstable: false,
                        reasons: vec![
                            format!(
                                "lambda15 = {l15} > lambda16 = {l16}: the exit from xi1 toward xi2 dominates"
                            ),
                            format!(
                                "beta1 + beta2 = {sum} > 1: the return map is asymptotically stable"
                            ),
                        ],
                    },
                    indices_c123(l15, l16),
                )
            } else {
                let mut reasons = Vec::new();
                if gate == Tri::Near {
                    reasons.push(format!(
                        "lambda15 - lambda16 = {:e} is within tolerance of zero; verdict withheld",
                        l15 - l16
                    ));
                }
                if growth == Tri::Near {
                    reasons.push(format!(
                        "beta1 + beta2 - 1 = {:e} is within tolerance of zero; verdict withheld",
                        sum - 1.0
                    ));
                }
                (
                    StabilityVerdict {
                        level: StabilityLevel::Boundary,
                        completely_unstable: false,
                        reasons,
                    },
                    Vec::new(),
                )
            };
            Ok(CycleReport {
                cycle,
                verdict,
                betas: Some(betas),
                indices,
                premises,
            })
        }
        CycleId::C143 => {
            let betas = beta_coefficients(cycle, table)?;
            let (b1, b2, b3, b4) = match betas {
                BetaSet::Four {
                    beta1,
                    beta2,
                    beta3,
                    beta4,
                } => (beta1, beta2, beta3, beta4),
                _ => unreachable!(),
            };
            let l15 = table.lam(1, 5);
            let l16 = table.lam(1, 6);
            let l42 = table.lam(4, 2);
            let l45 = table.lam(4, 5);
            let sum = b1 + b2;
            let gate = above(l16, l15);
            let growth = above(sum, 1.0);
            let trans = above(b2, 0.0);
            let (verdict, indices) = if gate == Tri::False
                || growth == Tri::False
                || trans == Tri::False
            {
                let mut reasons = Vec::new();
                if gate == Tri::False {
                    reasons.push(format!(
                        "lambda16 = {l16} < lambda15 = {l15}: the exit from xi1 toward xi2 dominates"
                    ));
                }
                if growth == Tri::False {
                    reasons.push(format!(
                        "beta1 + beta2 = {sum} < 1: the return map contracts no neighbourhood"
                    ));
                }
                if trans == Tri::False {
                    reasons.push(format!(
                        "beta2 = {b2} < 0: the return map is completely unstable"
                    ));
                }
                (
                    StabilityVerdict {
                        level: StabilityLevel::NotFas,
                        completely_unstable: true,
                        reasons,
                    },
                    Vec::new(),
                )
            } else if gate == Tri::True && growth == Tri::True && trans == Tri::True {
                let mut reasons = vec![
                    format!(
                        "lambda16 = {l16} > lambda15 = {l15}: the exit from xi1 toward xi4 dominates"
                    ),
                    format!("beta1 + beta2 = {sum} > 1 and beta2 = {b2} > 0: a positive-measure basin follows the cycle"),
                ];
                let indices = indices_c143(l15, l16, l42, l45, b3, b4);
                let verdict = match above(l45, l42) {
                    Tri::True => {
                        reasons.push(format!(
                            "lambda45 = {l45} > lambda42 = {l42}: every stability index is positive"
                        ));
                        StabilityVerdict {
                            level: StabilityLevel::Eas,
                            completely_unstable: false,
                            reasons,
                        }
                    }
                    Tri::False => {
                        reasons.push(format!(
                            "lambda45 = {l45} < lambda42 = {l42}: sigma(kappa14) < 0 rules out e.a.s."
                        ));
                        StabilityVerdict {
                            level: StabilityLevel::Fas,
                            completely_unstable: false,
                            reasons,
                        }
                    }
                    Tri::Near => {
                        reasons.push(format!(
                            "f.a.s. conditions hold strictly, but lambda45 - lambda42 = {:e} is within tolerance of zero: e.a.s. undecided",
                            l45 - l42
                        ));
                        StabilityVerdict {
                            level: StabilityLevel::Boundary,
                            completely_unstable: false,
                            reasons,
                        }
                    }
                };
                (verdict, indices)
            } else {
                let mut reasons = Vec::new();
                if gate == Tri::Near {
                    reasons.push(format!(
                        "lambda16 - lambda15 = {:e} is within tolerance of zero; verdict withheld",
                        l16 - l15
                    ));
                }
                if growth == Tri::Near {
                    reasons.push(format!(
                        "beta1 + beta2 - 1 = {:e} is within tolerance of zero; verdict withheld",
                        sum - 1.0
                    ));
                }
                if trans == Tri::Near {
                    reasons.push(format!(
                        "beta2 = {:e} is within tolerance of zero; verdict withheld",
                        b2
                    ));
                }
                (
                    StabilityVerdict {
                        level: StabilityLevel::Boundary,
                        completely_unstable: false,
                        reasons,
                    },
                    Vec::new(),
                )
            };
            Ok(CycleReport {
                cycle,
                verdict,
                betas: Some(betas),
                indices,
                premises,
            })
        }
        CycleId::C145 => Ok(CycleReport {
            cycle,
            verdict: StabilityVerdict {
                level: StabilityLevel::NotFas,
                completely_unstable: true,
                reasons: vec![
                    "the expanding eigenspace at xi4 is two-dimensional (lambda42 = lambda43): \
                     a generically nonzero transverse component is restored on every passage, \
                     so almost all nearby trajectories escape"
                        .to_owned(),
                ],
            },
            betas: Some(BetaSet::Empty),
            indices: Vec::new(),
            premises,
        }),
    }
}

/// The stability indices of `cycle`, available only when its f.a.s.
/// conditions hold strictly.
pub fn stability_indices(cycle: CycleId, table: &EigenTable) -> Result<Vec<StabilityIndex>> {
    let report = classify_cycle(cycle, table)?;
    if cycle == CycleId::C145 {
        return Err(Error::PremisesViolated(
            "C145 is completely unstable for every admissible parameter set; \
             no index formulas apply"
                .to_owned(),
        ));
    }
    if report.indices.is_empty() {
        return Err(Error::PremisesViolated(format!(
            "{} stability indices require its f.a.s. conditions to hold strictly: {}",
            cycle.name(),
            report.verdict.reasons.join("; ")
        )));
    }
    Ok(report.indices)
}

/// Classifies the network from the full sign pattern.
///
/// The network is never asymptotically stable (the two-dimensional
/// expanding eigenspace at ξ4 pushes its unstable manifold off the
/// connection set).  It is f.a.s. exactly when one of the two cycles
/// through ξ3 is, and the e.a.s. refinement hinges on how trajectories
/// clear the ξ4 crossroads.
pub fn classify_network(table: &EigenTable) -> Result<NetworkReport> {
    let ex = existence_from_table(table);
    let premises = ex.network;
    let never_as = "the unstable manifold of xi4 is two-dimensional, so it leaves the \
                    one-dimensional connection set: asymptotic stability is impossible";
    match premise_status(&premises) {
        PremiseStatus::Violated(labels) => {
            return Err(Error::PremisesViolated(format!(
                "network sign pattern fails at {labels}; outside theorem coverage"
            )))
        }
        PremiseStatus::OnBoundary(labels) => {
            let c123 = classify_cycle(CycleId::C123, table)?;
            let c143 = classify_cycle(CycleId::C143, table)?;
            return Ok(NetworkReport {
                verdict: StabilityVerdict {
                    level: StabilityLevel::Boundary,
                    completely_unstable: false,
                    reasons: vec![
                        format!("premise eigenvalue(s) within tolerance of zero: {labels}"),
                        never_as.to_owned(),
                    ],
                },
                asymptotically_stable: false,
                indices: Vec::new(),
                premises,
                c123,
                c143,
            });
        }
        PremiseStatus::Hold => {}
    }

    let c123 = classify_cycle(CycleId::C123, table)?;
    let c143 = classify_cycle(CycleId::C143, table)?;
    let s123 = c123.verdict.at_least(StabilityLevel::Fas);
    let s143 = c143.verdict.at_least(StabilityLevel::Fas);
    let l42 = table.lam(4, 2);
    let l45 = table.lam(4, 5);

    let mut verdict = match (s123, s143) {
        (true, true) => {
            return Err(Error::CheckFailed(
                "both cycles classified f.a.s.-or-better; the exits from xi1 cannot both dominate"
                    .to_owned(),
            ))
        }
        (true, false) => {
            let mut reasons = vec![format!(
                "cycle C123 is {}: the network inherits f.a.s.",
                c123.verdict.level.name()
            )];
            match above(l45, l42) {
                Tri::True => {
                    reasons.push(format!(
                        "lambda45 = {l45} > lambda42 = {l42}: every network connection carries a positive stability index"
                    ));
                    StabilityVerdict {
                        level: StabilityLevel::Eas,
                        completely_unstable: false,
                        reasons,
                    }
                }
                Tri::False => {
                    reasons.push(format!(
                        "lambda45 = {l45} < lambda42 = {l42}: points near kappa14 escape past xi4 on a set of full relative measure; not e.a.s."
                    ));
                    StabilityVerdict {
                        level: StabilityLevel::Fas,
                        completely_unstable: false,
                        reasons,
                    }
                }
                Tri::Near => {
                    reasons.push(format!(
                        "f.a.s. holds, but lambda45 - lambda42 = {:e} is within tolerance of zero: e.a.s. undecided",
                        l45 - l42
                    ));
                    StabilityVerdict {
                        level: StabilityLevel::Boundary,
                        completely_unstable: false,
                        reasons,
                    }
                }
            }
        }
        (false, true) => {
            let l12 = table.lam(1, 2);
            let l15 = table.lam(1, 5);
            let l16 = table.lam(1, 6);
            let split = -l12 * l45 + l15 * l42 - l16 * l42;
            let mut reasons = vec![format!(
                "cycle C143 is {}: the network inherits f.a.s.",
                c143.verdict.level.name()
            )];
            match (above(l45, l42), above(split, 0.0)) {
                (Tri::False, _) => {
                    reasons.push(format!(
                        "lambda45 = {l45} < lambda42 = {l42}: points near kappa14 escape past xi4 on a set of full relative measure; not e.a.s."
                    ));
                    StabilityVerdict {
                        level: StabilityLevel::Fas,
                        completely_unstable: false,
                        reasons,
                    }
                }
                (_, Tri::False) => {
                    reasons.push(format!(
                        "-lambda12*lambda45 + lambda15*lambda42 - lambda16*lambda42 = {split} < 0: \
                         points returning through xi5 escape; not e.a.s."
                    ));
                    StabilityVerdict {
                        level: StabilityLevel::Fas,
                        completely_unstable: false,
                        reasons,
                    }
                }
                (Tri::True, Tri::True) => {
                    reasons.push(format!(
                        "lambda45 = {l45} > lambda42 = {l42} and -lambda12*lambda45 + lambda15*lambda42 - lambda16*lambda42 = {split} > 0: \
                         every network connection carries a positive stability index"
                    ));
                    StabilityVerdict {
                        level: StabilityLevel::Eas,
                        completely_unstable: false,
                        reasons,
                    }
                }
                _ => {
                    reasons.push(format!(
                        "f.a.s. holds, but an e.a.s. decision quantity is within tolerance of zero \
                         (lambda45 - lambda42 = {:e}, split quantity = {:e}): e.a.s. undecided",
                        l45 - l42,
                        split
                    ));
                    StabilityVerdict {
                        level: StabilityLevel::Boundary,
                        completely_unstable: false,
                        reasons,
                    }
                }
            }
        }
        (false, false) => {
            let undecided: Vec<String> = [&c123, &c143]
                .iter()
                .filter(|r| r.verdict.level == StabilityLevel::Boundary)
                .map(|r| {
                    format!(
                        "{} undecided: {}",
                        r.cycle.name(),
                        r.verdict.reasons.join("; ")
                    )
                })
                .collect();
            if undecided.is_empty() {
                StabilityVerdict {
                    level: StabilityLevel::NotFas,
                    completely_unstable: true,
                    reasons: vec![
                        "both cycles are completely unstable: every cross-section meets the \
                         attracted set in zero measure"
                            .to_owned(),
                    ],
                }
            } else {
                StabilityVerdict {
                    level: StabilityLevel::Boundary,
                    completely_unstable: false,
                    reasons: undecided,
                }
            }
        }
    };
    verdict.reasons.push(never_as.to_owned());

    Ok(NetworkReport {
        verdict,
        asymptotically_stable: false,
        indices: Vec::new(),
        premises,
        c123,
        c143,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::classify_return_map;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// A sign pattern satisfying every network premise, on the side where
    /// the exit from ξ1 toward ξ2 dominates (λ15 > λ16).  Engineered so
    /// β1(C123) = 0.5 and β2(C123) = 1.0 exactly.
    fn base_c123() -> [[f64; 6]; 5] {
        [
            [-1.0, -0.3, -0.9, -1.1, 1.0, 0.5],  // ξ1
            [-1.0, -0.4, -0.8, -0.7, -0.9, 1.0], // ξ2
            [1.0, -0.5, -1.0, -1.3, -1.0, -1.0], // ξ3
            [-0.8, 0.9, 0.9, -1.0, 0.75, -0.5],  // ξ4
            [-0.7, -0.9, 0.3, -0.6, -0.8, -1.0], // ξ5
        ]
    }

    /// Same skeleton on the other side of the ξ1 crossroads (λ16 > λ15),
    /// tuned so the C143 f.a.s. conditions hold.
    fn base_c143() -> [[f64; 6]; 5] {
        let mut m = base_c123();
        m[0][4] = 0.4; // λ15
        m[0][5] = 0.8; // λ16
        m[3][0] = -2.0; // λ41
        m
    }

    fn table(m: [[f64; 6]; 5]) -> EigenTable {
        EigenTable::synthetic(m)
    }

    #[test]
    fn connections_link_consecutive_nodes() {
        for cycle in CycleId::ALL {
            let nodes = cycle.nodes();
            let conns = cycle.connections();
            for i in 0..3 {
                assert_eq!(conns[i].from(), nodes[i], "{} leg {i}", cycle.name());
                assert_eq!(
                    conns[i].to(),
                    nodes[(i + 1) % 3],
                    "{} leg {i} lands wrong",
                    cycle.name()
                );
            }
        }
    }

    #[test]
    fn beta1_c123_from_pinned_eigenvalues() {
        // λ21 = −1, λ35 = −1, λ26 = 1, λ31 = 1, λ16 = 0.5, λ15 = 1 → β1 = 0.5.
        let t = table(base_c123());
        let betas = beta_coefficients(CycleId::C123, &t).unwrap();
        assert_eq!(betas.beta1(), Some(0.5));
        // β2 = 0.5 + 0.3 + 0.2 with the pinned λ32, λ12, λ22.
        assert_eq!(betas.beta2(), Some(1.0));
        assert_eq!(betas.sum12(), Some(1.5));
    }

    #[test]
    fn beta1_vanishes_when_the_two_exits_balance() {
        let mut m = base_c123();
        m[0][5] = m[0][4]; // λ16 = λ15
        let betas = beta_coefficients(CycleId::C123, &table(m)).unwrap();
        assert_eq!(betas.beta1(), Some(0.0));
    }

    #[test]
    fn beta3_beta4_from_pinned_eigenvalues() {
        // λ12 = −1.2, λ16 = 0.6, λ15 = 0.4, λ42 = 0.9, λ45 = 0.75:
        // β3 = 1.2/0.6 + (0.4·0.9)/(0.6·0.75) = 2.8, β4 = 0.9/0.75 = 1.2.
        let mut m = base_c143();
        m[0][1] = -1.2;
        m[0][4] = 0.4;
        m[0][5] = 0.6;
        m[3][1] = 0.9;
        m[3][2] = 0.9;
        m[3][4] = 0.75;
        let betas = beta_coefficients(CycleId::C143, &table(m)).unwrap();
        assert!((betas.beta3().unwrap() - 2.8).abs() < 1e-15);
        assert!((betas.beta4().unwrap() - 1.2).abs() < 1e-15);
        assert!(betas.beta4().unwrap() > 0.0, "wedge exponent is positive");
    }

    #[test]
    fn c145_defines_no_exponents() {
        let betas = beta_coefficients(CycleId::C145, &table(base_c123())).unwrap();
        assert!(betas.is_empty());
        assert_eq!(betas.beta1(), None);
        assert_eq!(betas.sum12(), None);
    }

    #[test]
    fn zero_denominator_errors_name_the_eigenvalue() {
        let cases: [(CycleId, usize, usize, &str); 5] = [
            (CycleId::C123, 0, 4, "lambda15"),
            (CycleId::C123, 1, 5, "lambda26"),
            (CycleId::C123, 2, 0, "lambda31"),
            (CycleId::C143, 0, 5, "lambda16"),
            (CycleId::C143, 3, 4, "lambda45"),
        ];
        for (cycle, row, col, name) in cases {
            let mut m = base_c123();
            m[row][col] = 0.0;
            match beta_coefficients(cycle, &table(m)) {
                Err(Error::ZeroDenominator(eig, _)) => assert_eq!(eig, name),
                other => panic!("expected zero-denominator error for {name}, got {other:?}"),
            }
        }
    }

    #[test]
    fn role_swap_maps_one_beta_formula_onto_the_other() {
        let t1 = base_c123();
        let mut t2 = t1;
        t2[0][4] = t1[0][5]; // λ15 ← λ16
        t2[0][5] = t1[0][4]; // λ16 ← λ15
        t2[3][0] = t1[1][0]; // λ41 ← λ21
        t2[3][1] = t1[1][1]; // λ42 ← λ22
        t2[3][2] = t1[1][1]; // λ43 = λ42
        t2[3][4] = t1[1][5]; // λ45 ← λ26
        let b123 = beta_coefficients(CycleId::C123, &table(t1)).unwrap();
        let b143 = beta_coefficients(CycleId::C143, &table(t2)).unwrap();
        assert_eq!(
            b123.beta1().unwrap().to_bits(),
            b143.beta1().unwrap().to_bits(),
            "beta1 must agree bit-for-bit under the role swap"
        );
        assert_eq!(
            b123.beta2().unwrap().to_bits(),
            b143.beta2().unwrap().to_bits()
        );
    }

    #[test]
    fn c123_eas_with_indices() {
        // λ15 = 1, λ16 = 0.5, β1 + β2 = 1.5 → e.a.s. with σ(κ31) = 0.5.
        let report = classify_cycle(CycleId::C123, &table(base_c123())).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::Eas);
        assert!(report.verdict.at_least(StabilityLevel::Fas));
        assert!(!report.verdict.at_least(StabilityLevel::As));
        assert!(!report.verdict.completely_unstable);
        let idx = &report.indices;
        assert_eq!(idx.len(), 3);
        assert_eq!(idx[0].connection, Connection::K31);
        assert!((idx[0].value - 0.5).abs() < 1e-15);
        assert_eq!(idx[1].connection, Connection::K12);
        assert_eq!(idx[1].value, f64::INFINITY);
        assert_eq!(idx[2].connection, Connection::K23);
        assert_eq!(idx[2].literal(), "+inf");
        assert_eq!(report.premises.len(), 16);
        assert!(report.premises.iter().all(|r| r.satisfied));
    }

    #[test]
    fn c123_cu_when_exit_toward_xi4_dominates() {
        let mut m = base_c123();
        m[0][4] = 0.5; // λ15
        m[0][5] = 1.0; // λ16
        let report = classify_cycle(CycleId::C123, &table(m)).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::NotFas);
        assert!(report.verdict.completely_unstable);
        assert!(report.verdict.reasons[0].contains("lambda15"));
        assert!(report.indices.is_empty());
        // The kept-mass factor went negative with it.
        assert!(report.betas.unwrap().beta1().unwrap() < 0.0);
    }

    #[test]
    fn c123_cu_when_return_growth_subcritical() {
        let mut m = base_c123();
        m[1][0] = -0.1; // λ21 → β1 = 0.05
        m[1][1] = -0.1; // λ22 → β2 = 0.5 + 0.3 + 0.05
        let report = classify_cycle(CycleId::C123, &table(m)).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::NotFas);
        assert!(report.verdict.completely_unstable);
        assert!(report.verdict.reasons[0].contains("beta1 + beta2"));
        let sum = report.betas.unwrap().sum12().unwrap();
        assert!((sum - 0.9).abs() < 1e-12);
    }

    #[test]
    fn c123_boundary_when_exits_tie() {
        let mut m = base_c123();
        m[0][5] = m[0][4]; // λ16 = λ15 exactly → β1 = 0
        m[0][1] = -0.8; // λ12 keeps β2 = 1.3, so only the tie is undecided
        let report = classify_cycle(CycleId::C123, &table(m)).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::Boundary);
        assert!(report.verdict.reasons[0].contains("lambda15 - lambda16"));
        assert!(report.betas.is_some(), "betas remain computable on the tie");
        assert!(report.indices.is_empty());
    }

    #[test]
    fn c123_strict_instability_beats_a_tied_gate() {
        // λ15 = λ16 leaves the gate undecided, but β1 + β2 = 0.8 < 1 is a
        // strict disjunct of the instability criterion, so the verdict is
        // certain despite the tie.
        let mut m = base_c123();
        m[0][5] = m[0][4];
        let report = classify_cycle(CycleId::C123, &table(m)).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::NotFas);
        assert!(report.verdict.completely_unstable);
        assert!(report.verdict.reasons[0].contains("beta1 + beta2"));
    }

    #[test]
    fn c123_boundary_when_growth_critical() {
        let mut m = base_c123();
        m[1][0] = -0.1; // β1 = 0.05
        m[1][1] = -0.3; // β2 = 0.5 + 0.3 + 0.15 → sum = 1 exactly
        let report = classify_cycle(CycleId::C123, &table(m)).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::Boundary);
        assert!(report.verdict.reasons[0].contains("beta1 + beta2"));
    }

    #[test]
    fn c123_premise_violation_is_an_error() {
        let mut m = base_c123();
        m[2][0] = -0.7; // λ31 < 0
        match classify_cycle(CycleId::C123, &table(m)) {
            Err(Error::PremisesViolated(msg)) => assert!(msg.contains("lambda31")),
            other => panic!("expected premise error, got {other:?}"),
        }
    }

    #[test]
    fn c123_boundary_premise_gives_boundary_verdict_without_formulas() {
        let mut m = base_c123();
        m[1][5] = 0.0; // λ26 on zero: both a premise row and a β denominator
        let report = classify_cycle(CycleId::C123, &table(m)).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::Boundary);
        assert!(report.verdict.reasons[0].contains("lambda26"));
        assert!(report.betas.is_none());
        assert!(report.indices.is_empty());
    }

    #[test]
    fn c143_fas_not_eas_when_lambda45_below_lambda42() {
        // condf4 holds, λ45 = 0.75 < λ42 = 0.9 → f.a.s. only, σ(κ14) < 0.
        let report = classify_cycle(CycleId::C143, &table(base_c143())).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::Fas);
        assert!(report.verdict.at_least(StabilityLevel::Fas));
        assert!(!report.verdict.at_least(StabilityLevel::Eas));
        let idx = &report.indices;
        assert_eq!(idx.len(), 3);
        assert_eq!(idx[1].connection, Connection::K14);
        assert!((idx[1].value - (0.75 / 0.9 - 1.0)).abs() < 1e-15);
        assert!(idx[1].value < 0.0);
        assert_eq!(idx[1].formula, "lambda45/lambda42 - 1");
        assert_eq!(idx[2].connection, Connection::K43);
        assert_eq!(idx[2].value, f64::INFINITY);
        // σ(κ31) = min{1 − 0.5, (1 + β3 − β4)/β4} with β3 = 0.975, β4 = 1.2.
        assert_eq!(idx[0].connection, Connection::K31);
        assert!((idx[0].value - 0.5).abs() < 1e-12);
        assert!(idx[0].formula.contains("min"));
        assert_eq!(report.premises.len(), 15);
    }

    #[test]
    fn c143_eas_when_lambda45_above_lambda42() {
        let mut m = base_c143();
        m[3][4] = 1.4; // λ45 > λ42 = 0.9
        let report = classify_cycle(CycleId::C143, &table(m)).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::Eas);
        for idx in &report.indices {
            assert!(
                idx.value > 0.0,
                "e.a.s. requires every index positive; {} = {}",
                idx.connection.name(),
                idx.value
            );
        }
        let k14 = &report.indices[1];
        assert!((k14.value - (1.0 - 0.9 / 1.4)).abs() < 1e-15);
        assert_eq!(k14.formula, "1 - lambda42/lambda45");
    }

    #[test]
    fn c143_cu_when_beta2_negative() {
        let mut m = base_c143();
        m[2][1] = -0.1; // λ32: first β2 term → 0.1
        m[0][1] = -0.05; // λ12: middle term → 0.0625
        m[3][4] = 0.3; // λ45: last term → −1.5
        let report = classify_cycle(CycleId::C143, &table(m)).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::NotFas);
        assert!(report.verdict.completely_unstable);
        assert!(report
            .verdict
            .reasons
            .iter()
            .any(|r| r.starts_with("beta2")));
    }

    #[test]
    fn c143_cu_when_exit_toward_xi2_dominates() {
        let mut m = base_c143();
        m[0][4] = 0.8; // λ15
        m[0][5] = 0.4; // λ16
        let report = classify_cycle(CycleId::C143, &table(m)).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::NotFas);
        assert!(report.verdict.completely_unstable);
        assert!(report.verdict.reasons[0].contains("lambda16"));
    }

    #[test]
    fn c143_eas_gap_at_equal_expansion_rates() {
        let mut m = base_c143();
        m[3][4] = 0.9; // λ45 = λ42 exactly
        let report = classify_cycle(CycleId::C143, &table(m)).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::Boundary);
        assert!(report
            .verdict
            .reasons
            .iter()
            .any(|r| r.contains("f.a.s. conditions hold strictly")));
        // condf4 held, so the index formulas still apply; the binding index is 0.
        assert_eq!(report.indices[1].connection, Connection::K14);
        assert_eq!(report.indices[1].value, 0.0);
        let via_op = stability_indices(CycleId::C143, &table(m)).unwrap();
        assert_eq!(via_op[1].value, 0.0);
    }

    #[test]
    fn c145_always_cu_under_full_premises() {
        let report = classify_cycle(CycleId::C145, &table(base_c123())).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::NotFas);
        assert!(report.verdict.completely_unstable);
        assert!(!report.verdict.at_least(StabilityLevel::Fas));
        assert_eq!(report.betas, Some(BetaSet::Empty));
        assert!(report.indices.is_empty());
        assert_eq!(report.premises.len(), 27);
    }

    #[test]
    fn c145_premise_violation_names_the_row() {
        let mut m = base_c123();
        m[4][2] = -0.3; // λ53 < 0
        match classify_cycle(CycleId::C145, &table(m)) {
            Err(Error::PremisesViolated(msg)) => assert!(msg.contains("lambda53")),
            other => panic!("expected premise error, got {other:?}"),
        }
    }

    #[test]
    fn indices_require_stable_premises() {
        // C123 in its completely unstable regime → no indices.
        let mut m = base_c123();
        m[0][4] = 0.5;
        m[0][5] = 1.0;
        match stability_indices(CycleId::C123, &table(m)) {
            Err(Error::PremisesViolated(msg)) => assert!(msg.contains("C123")),
            other => panic!("expected premise error, got {other:?}"),
        }
        // C145 never has index formulas.
        match stability_indices(CycleId::C145, &table(base_c123())) {
            Err(Error::PremisesViolated(msg)) => assert!(msg.contains("completely unstable")),
            other => panic!("expected premise error, got {other:?}"),
        }
    }

    #[test]
    fn sigma_kappa14_branch_values() {
        // λ42 = 1, λ45 = 2 → σ(κ14) = 0.5.
        let mut wide = base_c143();
        wide[3][1] = 1.0;
        wide[3][2] = 1.0;
        wide[3][4] = 2.0;
        let idx = stability_indices(CycleId::C143, &table(wide)).unwrap();
        assert_eq!(idx[1].connection, Connection::K14);
        assert!((idx[1].value - 0.5).abs() < 1e-15);

        // λ42 = 2, λ45 = 1 → σ(κ14) = −0.5 (kept in condf4 by larger λ32, λ12).
        let mut narrow = base_c143();
        narrow[3][1] = 2.0;
        narrow[3][2] = 2.0;
        narrow[3][4] = 1.0;
        narrow[2][1] = -2.0; // λ32
        narrow[0][1] = -0.8; // λ12
        let report = classify_cycle(CycleId::C143, &table(narrow)).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::Fas);
        let idx = report.indices;
        assert!((idx[1].value - (-0.5)).abs() < 1e-15);
    }

    #[test]
    fn sigma_kappa31_first_branch() {
        // β3 = 0.4, β4 = 1.2 < β3 + 1 → σ(κ31) = min{1 − λ15/λ16, 1/6}.
        let mut m = base_c143();
        m[0][1] = -0.08; // λ12
        m[0][4] = 0.2; // λ15
        m[0][5] = 0.8; // λ16
        m[3][1] = 0.9;
        m[3][2] = 0.9;
        m[3][4] = 0.75;
        m[2][1] = -1.5; // λ32 keeps β2 positive
        let t = table(m);
        let betas = beta_coefficients(CycleId::C143, &t).unwrap();
        assert!((betas.beta3().unwrap() - 0.4).abs() < 1e-15);
        assert!((betas.beta4().unwrap() - 1.2).abs() < 1e-15);
        let idx = stability_indices(CycleId::C143, &t).unwrap();
        assert_eq!(idx[0].connection, Connection::K31);
        assert!((idx[0].value - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(
            idx[0].formula,
            "min{1 - lambda15/lambda16, (1 + beta3 - beta4)/beta4}"
        );
    }

    #[test]
    fn sigma_kappa31_second_branch() {
        // β3 = 0.6, β4 = 2 ≥ β3 + 1 → σ(κ31) = min{0.75, 0.4/0.6, 0.4} = 0.4.
        let mut m = base_c143();
        m[0][1] = -0.08;
        m[0][4] = 0.2;
        m[0][5] = 0.8;
        m[3][1] = 0.9;
        m[3][2] = 0.9;
        m[3][4] = 0.45;
        m[2][1] = -3.0; // λ32 keeps β2 positive
        let t = table(m);
        let betas = beta_coefficients(CycleId::C143, &t).unwrap();
        assert!((betas.beta3().unwrap() - 0.6).abs() < 1e-15);
        assert!((betas.beta4().unwrap() - 2.0).abs() < 1e-15);
        let idx = stability_indices(CycleId::C143, &t).unwrap();
        assert!((idx[0].value - 0.4).abs() < 1e-12);
        assert!(idx[0].formula.contains("beta4 - beta3 - 1"));
    }

    #[test]
    fn network_never_asymptotically_stable() {
        let report = classify_network(&table(base_c123())).unwrap();
        assert!(!report.asymptotically_stable);
        assert!(!report.verdict.at_least(StabilityLevel::As));
        assert!(report
            .verdict
            .reasons
            .iter()
            .any(|r| r.contains("asymptotic stability is impossible")));
    }

    #[test]
    fn network_eas_under_condst_with_wide_xi4_exit() {
        let mut m = base_c123();
        m[3][4] = 1.4; // λ45 > λ42 = 0.9
        let report = classify_network(&table(m)).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::Eas);
        assert_eq!(report.c123.verdict.level, StabilityLevel::Eas);
        assert_eq!(report.c143.verdict.level, StabilityLevel::NotFas);
        assert!(report.indices.is_empty());
    }

    #[test]
    fn network_fas_not_eas_when_xi4_exit_narrow() {
        // base_c123 has λ45 = 0.75 < λ42 = 0.9.
        let report = classify_network(&table(base_c123())).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::Fas);
        assert!(!report.verdict.at_least(StabilityLevel::Eas));
        assert!(report
            .verdict
            .reasons
            .iter()
            .any(|r| r.contains("lambda45")));
    }

    #[test]
    fn network_not_fas_when_both_cycles_unstable() {
        let mut m = base_c123();
        m[1][0] = -0.1; // β1(C123) = 0.05
        m[1][1] = -0.1; // β2(C123) = 0.85 → C123 c.u.; C143 c.u. since λ15 > λ16
        let report = classify_network(&table(m)).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::NotFas);
        assert!(report.verdict.completely_unstable);
        assert!(report.c123.verdict.completely_unstable);
        assert!(report.c143.verdict.completely_unstable);
    }

    #[test]
    fn network_condf4_eas_needs_the_split_inequality() {
        let mut m = base_c143();
        m[3][4] = 1.4; // λ45 > λ42; C143 e.a.s.
        // λ12 = −0.3: split = 0.3·1.4 + 0.4·0.9 − 0.8·0.9 = 0.06 > 0 → e.a.s.
        let report = classify_network(&table(m)).unwrap();
        assert_eq!(report.c143.verdict.level, StabilityLevel::Eas);
        assert_eq!(report.verdict.level, StabilityLevel::Eas);

        // Shrink |λ12| so the split quantity goes negative → f.a.s. only.
        let mut m2 = m;
        m2[0][1] = -0.05; // split = 0.07 + 0.36 − 0.72 < 0
        m2[2][1] = -1.0; // λ32 keeps β2 ≈ 0.74, so condf4 still holds
        let report2 = classify_network(&table(m2)).unwrap();
        // The cycle alone is e.a.s.; the escape past xi5 exists only at
        // network level.
        assert_eq!(report2.c143.verdict.level, StabilityLevel::Eas);
        assert_eq!(report2.verdict.level, StabilityLevel::Fas);
        assert!(!report2.verdict.at_least(StabilityLevel::Eas));
        assert!(report2
            .verdict
            .reasons
            .iter()
            .any(|r| r.contains("returning through xi5")));
    }

    #[test]
    fn network_boundary_when_premise_on_zero() {
        let mut m = base_c123();
        m[4][2] = 0.0; // λ53 exactly on zero (a ξ5-only network row)
        let report = classify_network(&table(m)).unwrap();
        assert_eq!(report.verdict.level, StabilityLevel::Boundary);
        assert!(report.verdict.reasons[0].contains("lambda53"));
        assert!(!report.asymptotically_stable);
    }

    #[test]
    fn network_premise_violation_mentions_coverage() {
        let mut m = base_c123();
        m[1][5] = -1.0; // λ26 < 0
        match classify_network(&table(m)) {
            Err(Error::PremisesViolated(msg)) => {
                assert!(msg.contains("lambda26"));
                assert!(msg.contains("outside theorem coverage"));
            }
            other => panic!("expected premise error, got {other:?}"),
        }
    }

    #[test]
    fn cycle_report_serializes_with_inf_literal() {
        let report = classify_cycle(CycleId::C123, &table(base_c123())).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"+inf\""));
        assert!(json.contains("\"Eas\""));
        assert!(json.contains("lambda16"));
        let k31 = &report.indices[0];
        assert_eq!(k31.literal(), "0.5");
    }

    /// Draws a random sign pattern satisfying every network premise, with
    /// all margins at least 0.05 and the two ξ1 exit rates well separated.
    fn random_admissible(rng: &mut ChaCha8Rng) -> [[f64; 6]; 5] {
        let neg = |rng: &mut ChaCha8Rng| -(0.05 + rng.gen::<f64>() * 2.95);
        let mut m = [[0.0; 6]; 5];
        for row in &mut m {
            for v in row.iter_mut() {
                *v = neg(rng);
            }
        }
        let pos = |rng: &mut ChaCha8Rng| 0.05 + rng.gen::<f64>() * 2.95;
        m[0][4] = pos(rng); // λ15
        m[0][5] = loop {
            let v = pos(rng);
            if (v - m[0][4]).abs() >= 0.05 {
                break v;
            }
        };
        m[1][5] = pos(rng); // λ26
        m[2][0] = pos(rng); // λ31
        m[3][1] = pos(rng); // λ42
        m[3][2] = m[3][1]; // λ43 = λ42
        m[3][4] = pos(rng); // λ45
        m[4][2] = pos(rng); // λ53
        m
    }

    #[test]
    fn exclusivity_and_coherence_over_random_admissible_patterns() {
        let mut rng = ChaCha8Rng::seed_from_u64(20260816);
        let mut boundary_hits = 0;
        let mut fas_networks = 0;
        for _ in 0..500 {
            let t = table(random_admissible(&mut rng));
            let c123 = classify_cycle(CycleId::C123, &t).unwrap();
            let c143 = classify_cycle(CycleId::C143, &t).unwrap();
            let net = classify_network(&t).unwrap();

            // At most one cycle is f.a.s.-or-better.
            assert!(
                !(c123.verdict.at_least(StabilityLevel::Fas)
                    && c143.verdict.at_least(StabilityLevel::Fas)),
                "both cycles stable for {t:?}"
            );

            // The network is f.a.s. exactly when one cycle is (boundary aside).
            let any_boundary = c123.verdict.level == StabilityLevel::Boundary
                || c143.verdict.level == StabilityLevel::Boundary
                || net.verdict.level == StabilityLevel::Boundary;
            if any_boundary {
                boundary_hits += 1;
            } else {
                let one_stable = c123.verdict.at_least(StabilityLevel::Fas)
                    || c143.verdict.at_least(StabilityLevel::Fas);
                assert_eq!(net.verdict.at_least(StabilityLevel::Fas), one_stable);
                if one_stable {
                    fas_networks += 1;
                } else {
                    assert!(net.verdict.completely_unstable);
                }
            }
            assert!(!net.asymptotically_stable);

            // Cycle verdicts agree with the reduced-map classifier through
            // the exit gate at ξ1.
            let betas = beta_coefficients(CycleId::C123, &t).unwrap();
            let map = classify_return_map(betas.beta1().unwrap(), betas.beta2().unwrap())
                .unwrap();
            if c123.verdict.level != StabilityLevel::Boundary
                && map.level != StabilityLevel::Boundary
            {
                assert_eq!(
                    c123.verdict.at_least(StabilityLevel::Fas),
                    map.at_least(StabilityLevel::As),
                    "cycle/map mismatch at {betas:?}"
                );
            }

            // Index sign coherence.
            for report in [&c123, &c143] {
                if report.verdict.at_least(StabilityLevel::Eas) {
                    assert!(report.indices.iter().all(|i| i.value > 0.0));
                }
                if report.verdict.level == StabilityLevel::Fas {
                    assert!(
                        report.indices.iter().any(|i| i.value < 0.0),
                        "f.a.s.-not-e.a.s. must expose a negative index"
                    );
                }
            }
        }
        assert!(
            boundary_hits < 50,
            "random draws should almost never hit a decision boundary"
        );
        assert!(
            fas_networks > 20,
            "the draw should produce a healthy mix of stable networks, got {fas_networks}"
        );
    }

    #[test]
    fn role_swap_symmetry_over_random_patterns() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let t1 = random_admissible(&mut rng);
            let mut t2 = t1;
            t2[0][4] = t1[0][5];
            t2[0][5] = t1[0][4];
            t2[3][0] = t1[1][0];
            t2[3][1] = t1[1][1];
            t2[3][2] = t1[1][1];
            t2[3][4] = t1[1][5];
            let b123 = beta_coefficients(CycleId::C123, &table(t1)).unwrap();
            let b143 = beta_coefficients(CycleId::C143, &table(t2)).unwrap();
            assert_eq!(b123.beta1().unwrap().to_bits(), b143.beta1().unwrap().to_bits());
            assert_eq!(b123.beta2().unwrap().to_bits(), b143.beta2().unwrap().to_bits());
        }
    }
}
