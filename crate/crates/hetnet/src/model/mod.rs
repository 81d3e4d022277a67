//! The equivariant vector field on R^6, its symmetry group, equilibria, and
//! closed-form eigenvalue structure.

mod eigen;
mod equilibria;
mod existence;
mod field;
mod symmetry;

pub use eigen::{
    eigen_label, eigen_table, EigenData, EigenLabel, EigenTable, LocalBasis,
};
pub use equilibria::{find_equilibria, template, EqClass, EquilibriaSet, Equilibrium};
pub use existence::{
    check_existence, existence_from_table, ExistenceReport, Inequality,
};
pub use field::{evaluate_field, evaluate_jacobian};
pub use symmetry::{apply_symmetry, enumerate_group, SymmetryElement};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// The 14 real coefficients of the vector field.
///
/// `lambda1`, `lambda2` are the linear growth rates of the x- and y-triples;
/// `a1..a3` the x-cubic/quintic coefficients, `b1..b3` the y-side ones,
/// `c1..c6` the cross couplings. All dimensionless.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
}

impl ModelParams {
    /// Checks the solvability invariants: finite fields, a1 != 0, b1 != 0,
    /// a1+a2 != 0, b1+b2 != 0 (the amplitude equations of the equilibrium
    /// classes must be solvable or degenerate is reported, not guessed).
    pub fn validate(&self) -> Result<()> {
        let vals = self.as_array();
        if !vals.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("model parameter".into()));
        }
        if self.a1 == 0.0 {
            return Err(Error::InvalidParams("a1 = 0".into()));
        }
        if self.b1 == 0.0 {
            return Err(Error::InvalidParams("b1 = 0".into()));
        }
        if self.a1 + self.a2 == 0.0 {
            return Err(Error::InvalidParams("a1 + a2 = 0".into()));
        }
        if self.b1 + self.b2 == 0.0 {
            return Err(Error::InvalidParams("b1 + b2 = 0".into()));
        }
        Ok(())
    }

    /// Field values in declaration order (lambda1, lambda2, a1..a3, b1..b3, c1..c6).
    pub fn as_array(&self) -> [f64; 14] {
        [
            self.lambda1,
            self.lambda2,
            self.a1,
            self.a2,
            self.a3,
            self.b1,
            self.b2,
            self.b3,
            self.c1,
            self.c2,
            self.c3,
            self.c4,
            self.c5,
            self.c6,
        ]
    }

    /// Serializes to the flat key -> number text record (TOML). Floats are
    /// written in shortest round-trip form, so parsing the output recovers
    /// the exact bit pattern.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("ModelParams is a flat struct of floats")
    }

    /// Parses the flat text record written by [`ModelParams::to_toml`].
    pub fn from_toml(text: &str) -> Result<Self> {
        let p: ModelParams =
            toml::from_str(text).map_err(|e| Error::Config(format!("params parse: {e}")))?;
        p.validate()?;
        Ok(p)
    }
}

/// A point of R^6 in coordinates (x1,x2,x3; y1,y2,y3).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct State(pub [f64; 6]);

impl State {
    pub fn new(x1: f64, x2: f64, x3: f64, y1: f64, y2: f64, y3: f64) -> Self {
        State([x1, x2, x3, y1, y2, y3])
    }

    pub fn zero() -> Self {
        State([0.0; 6])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &State) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn add_scaled(&self, scale: f64, dir: &State) -> State {
        let mut out = self.0;
        for i in 0..6 {
            out[i] += scale * dir.0[i];
        }
        State(out)
    }

    pub fn dot(&self, other: &State) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, k: f64) -> State {
        let mut out = self.0;
        for v in &mut out {
            *v *= k;
        }
        State(out)
    }
}

impl std::ops::Index<usize> for State {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for State {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}
