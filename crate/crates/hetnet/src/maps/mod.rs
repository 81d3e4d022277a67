//! Two-dimensional power maps and their stability classification.
//!
//! The return dynamics near each cycle reduce to maps of the positive
//! quadrant of the form `(p, q) -> (p^a q^b, p^c q^d)`, possibly with a
//! `max` of two such branches in the first component.  Everything here
//! works on those reduced maps: exact classification into the stability
//! lattice, eigenstructure of the exponent matrix, and two independent
//! numerical oracles (basin fractions by direct iteration, wedge volumes
//! by quadrature and Monte Carlo) used to cross-check the classifiers.

mod classify;
mod iterate;
mod matrix;
mod oracle;
mod wedge;

pub use classify::{
    classify_full_map, classify_max_map, classify_rank_one, classify_return_map,
};
pub(crate) use classify::{above, Tri};
pub use iterate::{iterate_map, Orbit};
pub use matrix::{analyze_transition_matrix, MatrixAnalysis, TransitionMatrix};
pub use oracle::basin_fraction_oracle;
pub use wedge::{wedge_volume, wedge_volume_mc, WedgeEstimate};

use crate::error::{Error, Result};
use crate::Real;
use serde::{Deserialize, Serialize};

/// A power map of the open positive quadrant.
///
/// All four shapes send `(p, q)` with `p, q > 0` to a pair of monomials
/// (or a `max` of monomials) in `p` and `q`; in logarithmic coordinates
/// they act linearly (or piecewise linearly).
#[derive(Clone, Debug, PartialEq)]
pub enum PowerMap<T> {
    /// `(p, q) -> (p^(g*a) q^(g*b), p^a q^b)`: the exponent matrix has
    /// rank one, so the image lies on the curve `p = q^g` after one step.
    RankOne { alpha: T, beta: T, gamma: T },
    /// `(p, q) -> (p^a1 q^b1, p^a2 q^b2)` with a general exponent matrix.
    Full { alpha1: T, beta1: T, alpha2: T, beta2: T },
    /// First component takes the larger of two branches:
    /// `(p, q) -> (max{p^(g*a2) q^(g*b2), p^a1 q^b1}, p^a2 q^b2)`.
    Max { alpha1: T, beta1: T, alpha2: T, beta2: T, gamma: T },
    /// Three-dimensional return family
    /// `x1' = f1 |x3|^b1`, `x2' = (f2 x1 + f3 x2) |x3|^b2`,
    /// `x3' = (f4 x1 + f5 x2) |x3|^b2`, reduced for classification to the
    /// comparison map `(p, q) -> (max{p q^b2, q^b1}, p q^b2)` with
    /// `p = max{|x1|, |x2|}`, `q = |x3|`.
    Return3 { beta1: T, beta2: T, coeffs: [T; 5] },
}

impl<T: Real> PowerMap<T> {
    /// Check the structural hypotheses of the map family.
    ///
    /// `Full` and `Max` require `alpha2 > 0`; `Return3` requires all five
    /// coefficients positive and the genericity condition
    /// `f2/f3 != f4/f5` (otherwise the second and third components are
    /// proportional and the reduction degenerates).
    pub fn validate(&self) -> Result<()> {
        let fin = |v: T, what: &str| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::NonFinite(format!("{what} = {v:?}")))
            }
        };
        match self {
            PowerMap::RankOne { alpha, beta, gamma } => {
                fin(*alpha, "alpha")?;
                fin(*beta, "beta")?;
                fin(*gamma, "gamma")?;
            }
            PowerMap::Full {
                alpha1,
                beta1,
                alpha2,
                beta2,
            } => {
                fin(*alpha1, "alpha1")?;
                fin(*beta1, "beta1")?;
                fin(*alpha2, "alpha2")?;
                fin(*beta2, "beta2")?;
                if *alpha2 <= T::zero() {
                    return Err(Error::OutsideHypothesis(format!(
                        "alpha2 = {alpha2:?} must be positive"
                    )));
                }
            }
            PowerMap::Max {
                alpha1,
                beta1,
                alpha2,
                beta2,
                gamma,
            } => {
                fin(*alpha1, "alpha1")?;
                fin(*beta1, "beta1")?;
                fin(*alpha2, "alpha2")?;
                fin(*beta2, "beta2")?;
                fin(*gamma, "gamma")?;
                if *alpha2 <= T::zero() {
                    return Err(Error::OutsideHypothesis(format!(
                        "alpha2 = {alpha2:?} must be positive"
                    )));
                }
            }
            PowerMap::Return3 {
                beta1,
                beta2,
                coeffs,
            } => {
                fin(*beta1, "beta1")?;
                fin(*beta2, "beta2")?;
                for (k, f) in coeffs.iter().enumerate() {
                    fin(*f, "coefficient")?;
                    if *f <= T::zero() {
                        return Err(Error::InvalidParams(format!(
                            "coefficient f{} = {:?} must be positive",
                            k + 1,
                            f
                        )));
                    }
                }
                let ratio_gap = coeffs[1] / coeffs[2] - coeffs[3] / coeffs[4];
                if ratio_gap.abs() < T::boundary_tol() {
                    return Err(Error::InvalidParams(
                        "f2/f3 = f4/f5 violates genericity of the return family".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Classify the map, dispatching to the criterion for its shape.
    pub fn classify(&self) -> Result<StabilityVerdict> {
        self.validate()?;
        match *self {
            PowerMap::RankOne { alpha, beta, gamma } => classify_rank_one(alpha, beta, gamma),
            PowerMap::Full {
                alpha1,
                beta1,
                alpha2,
                beta2,
            } => classify_full_map(alpha1, beta1, alpha2, beta2),
            PowerMap::Max {
                alpha1,
                beta1,
                alpha2,
                beta2,
                gamma,
            } => classify_max_map(alpha1, beta1, alpha2, beta2, gamma),
            PowerMap::Return3 { beta1, beta2, .. } => classify_return_map(beta1, beta2),
        }
    }
}

/// Where a map (or cycle) sits in the stability lattice.
///
/// The ordering is `As > Eas > Fas > NotFas`: asymptotic stability implies
/// essential asymptotic stability implies fragmentary asymptotic stability.
/// `Boundary` means some decision quantity was within [`crate::BOUNDARY_TOL`]
/// of its threshold, so no strict verdict is claimed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilityLevel {
    /// Asymptotically stable: attracts a full neighbourhood.
    As,
    /// Essentially asymptotically stable: attracts everything except a
    /// set whose relative measure vanishes near the invariant object.
    Eas,
    /// Fragmentarily asymptotically stable: the local basin has positive
    /// measure (but possibly nothing stronger).
    Fas,
    /// The local basin has zero measure.
    NotFas,
    /// Within tolerance of a threshold; undecided.
    Boundary,
}

impl StabilityLevel {
    /// Rank in the lattice; higher means stronger stability.
    fn rank(self) -> Option<u8> {
        match self {
            StabilityLevel::As => Some(3),
            StabilityLevel::Eas => Some(2),
            StabilityLevel::Fas => Some(1),
            StabilityLevel::NotFas => Some(0),
            StabilityLevel::Boundary => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StabilityLevel::As => "a.s.",
            StabilityLevel::Eas => "e.a.s.",
            StabilityLevel::Fas => "f.a.s.",
            StabilityLevel::NotFas => "not f.a.s.",
            StabilityLevel::Boundary => "boundary",
        }
    }
}

/// Outcome of a stability classification: the strongest level that the
/// applicable criterion certifies, with the inequalities that decided it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub level: StabilityLevel,
    /// `true` when the criterion certifies complete instability (almost
    /// every nearby orbit leaves), which is stronger than `NotFas`.
    pub completely_unstable: bool,
    /// Human-readable record of which inequalities decided the verdict.
    pub reasons: Vec<String>,
}

impl StabilityVerdict {
    fn new(level: StabilityLevel, reasons: Vec<String>) -> Self {
        StabilityVerdict {
            level,
            completely_unstable: false,
            reasons,
        }
    }

    fn unstable(reasons: Vec<String>, completely: bool) -> Self {
        StabilityVerdict {
            level: StabilityLevel::NotFas,
            completely_unstable: completely,
            reasons,
        }
    }

    /// Lattice query: does the verdict certify at least `level`?
    /// `Boundary` certifies nothing and is only at-least `Boundary`.
    pub fn at_least(&self, level: StabilityLevel) -> bool {
        match (self.level.rank(), level.rank()) {
            (Some(have), Some(want)) => have >= want,
            _ => self.level == level,
        }
    }

    /// Convenience: positive-measure local basin certified.
    pub fn is_fas_or_better(&self) -> bool {
        self.at_least(StabilityLevel::Fas)
    }
}
