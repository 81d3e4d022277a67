//! Numerical laboratory for a robust heteroclinic network in R^6.
//!
//! The object of study is a Γ-equivariant cubic/quintic vector field on
//! R^6 = {(x1,x2,x3; y1,y2,y3)} whose flow supports a heteroclinic network
//! built from three cycles (`C123`, `C143`, `C145`) between symmetry-related
//! equilibria ξ1..ξ5. The crate has two halves that check each other:
//!
//! * algebraic: closed-form eigenvalue tables, stability classifiers for the
//!   reduced power maps, and the cycle/network verdicts with stability
//!   indices ([`model`], [`maps`], [`cycles`]);
//! * numerical: an adaptive Runge–Kutta integrator with Poincaré sections,
//!   exponent regression against the local maps, and Monte Carlo
//!   basin-measure / stability-index estimation ([`flow`]).
//!
//! [`search`] finds admissible coefficient sets by rejection sampling and
//! [`cli`] wires everything into config-driven analyze / search / sweep /
//! verify runs.

pub mod cli;
pub mod cycles;
pub mod error;
pub mod flow;
pub mod maps;
pub mod model;
pub mod report;
pub mod search;

pub use error::{Error, Result};

/// Comparisons against stability thresholds are declared BOUNDARY instead of
/// guessing a sign when the decision quantity is closer to the threshold than
/// this. Every classifier statement is generic (strict inequalities), so a
/// verdict has no meaning nearer to the threshold than roundoff growth over
/// the composed formulas allows; 1e-9 leaves three orders of headroom over
/// f64 arithmetic on the longest formula chains used here.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Scalar bound for the pure-math half of the crate (map classifiers, wedge
/// volumes). `f64` everywhere in the flow half; `f32` is accepted here so the
/// classifier algebra can be sanity-checked under a coarser arithmetic.
pub trait Real: num_traits::Float + num_traits::FromPrimitive + core::fmt::Debug {
    /// Boundary tolerance in this scalar type.
    fn boundary_tol() -> Self {
        Self::from_f64(BOUNDARY_TOL).unwrap_or_else(Self::epsilon)
    }
}

impl<T: num_traits::Float + num_traits::FromPrimitive + core::fmt::Debug> Real for T {}

/// Concrete `f64` aliases for the generic map types.
pub type PowerMap64 = maps::PowerMap<f64>;
pub type TransitionMatrix64 = maps::TransitionMatrix<f64>;
