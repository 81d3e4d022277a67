//! Numerical ground truth: direct integration of the model field.
//!
//! Everything in this module measures what the closed-form classifiers in
//! [`crate::cycles`] predict — trajectories, cross-section return maps,
//! exponent regression against the linearised local maps, and Monte Carlo
//! estimates of basin fractions and stability indices.
//!
//! Submodules:
//! - [`integrate`]: adaptive Dormand–Prince 5(4) stepper and event location.
//! - [`geometry`]: heteroclinic connections as polylines; distance queries.
//! - [`section`]: cross-sections at the equilibria, section-to-section maps,
//!   and the local exponent regression.
//! - [`montecarlo`]: basin fractions, stability indices, escape tests, and
//!   the non-asymptotic-stability witness.

pub mod geometry;
pub mod integrate;
pub mod montecarlo;
pub mod section;

pub use geometry::{shoot_connection, ConnectionPath, NetworkGeometry, Target};
pub use integrate::{integrate, Trajectory};
pub use montecarlo::{
    estimate_basin_fraction, estimate_stability_index, section_escape_test,
    verify_not_asymptotically_stable, BasinEstimate, EscapeReport, EtaRun, IndexEstimate,
    LadderPoint, WitnessReport,
};
pub use section::{
    fly_to_sections, local_exponent_regression, section_map, section_radius, FlightOutcome,
    InOut, MapOutcome, NodeChart, RegressionReport, RegressionRow, SectionHit, SectionSpec,
};

/// Section radius as a fraction of the smallest present equilibrium
/// amplitude. Small enough that the linearisation dominates inside the
/// section, large enough that double-precision coordinates keep ~12
/// significant digits of transverse resolution.
pub const SECTION_RADIUS_FACTOR: f64 = 1e-2;

/// Arc-length spacing of the polyline samples representing a connection.
pub const ARC_RESOLUTION: f64 = 1e-3;

/// Cap on per-sample integration budgets, counted in node-to-node passages.
pub const PASSAGE_BUDGET: u32 = 50;

/// Bounding box half-width, as a multiple of the largest equilibrium
/// amplitude. Trajectories leaving the box are classified as escaped; the
/// attractor dynamics never leaves it (the cubic terms are dissipative for
/// admissible parameters).
pub const BOX_FACTOR: f64 = 5.0;

#[cfg(test)]
pub(crate) mod test_params {
    use crate::model::ModelParams;

    /// Every C123-side sign condition holds; tightest row is λ16 = 0.1.
    pub fn attracting_c123() -> ModelParams {
        ModelParams {
            lambda1: 1.0,
            lambda2: 1.0,
            a1: -1.0,
            a2: -1.5,
            a3: 0.3,
            b1: -0.5,
            b2: -1.0,
            b3: -0.2,
            c1: -0.4,
            c2: -3.0,
            c3: 1.0,
            c4: -1.4,
            c5: -0.6,
            c6: 0.3,
        }
    }

    /// C143-side signs (λ42 = λ43 = 7/15 > 0) with every connection of the
    /// network present (λ21 = −4/15, λ56 = −0.12) and the pair-splitting
    /// coupling flipped so the second expanding direction at ξ1 dominates
    /// (λ16 = 0.7 > λ15 = 0.1) and the ξ4 escape dominates its transverse
    /// direction (λ45 = 2/3 > λ42): C143 is essentially asymptotically
    /// stable here.
    pub fn eas_c143() -> ModelParams {
        ModelParams {
            c1: 0.4,
            c2: -1.2,
            c3: 0.5,
            c4: -2.2,
            c6: -0.3,
            ..attracting_c123()
        }
    }

    /// Same connection structure as [`eas_c143`] but with λ15 = 0.7 >
    /// λ16 = 0.1: both cycles through ξ3 are completely unstable (C143 by
    /// the dominance reversal, C123 by transverse expansion at ξ2).
    pub fn both_cu() -> ModelParams {
        ModelParams {
            c6: 0.3,
            ..eas_c143()
        }
    }
}
