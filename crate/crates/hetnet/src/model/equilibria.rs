//! The five equilibrium classes and their closed-form amplitudes.

use super::{apply_symmetry, evaluate_field, ModelParams, State, SymmetryElement};
use crate::{Error, Result};

/// Equilibrium classes, named by the axis/plane template they live on:
/// Xi1 = (x,0,0;0,0,0), Xi2 = (0,0,0;0,y,y), Xi3 = (0,0,0;y,0,0),
/// Xi4 = (0,0,0;0,y,-y), Xi5 = (0,x,x;0,0,0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum EqClass {
    Xi1,
    Xi2,
    Xi3,
    Xi4,
    Xi5,
}

impl EqClass {
    pub const ALL: [EqClass; 5] = [
        EqClass::Xi1,
        EqClass::Xi2,
        EqClass::Xi3,
        EqClass::Xi4,
        EqClass::Xi5,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EqClass::Xi1 => "xi1",
            EqClass::Xi2 => "xi2",
            EqClass::Xi3 => "xi3",
            EqClass::Xi4 => "xi4",
            EqClass::Xi5 => "xi5",
        }
    }

    /// Zero-based position in `ALL`; class j = idx() + 1.
    pub fn idx(&self) -> usize {
        match self {
            EqClass::Xi1 => 0,
            EqClass::Xi2 => 1,
            EqClass::Xi3 => 2,
            EqClass::Xi4 => 3,
            EqClass::Xi5 => 4,
        }
    }

    /// Squared amplitude from the class's balance equation, - numerator/denominator.
    /// Real equilibrium iff the ratio is positive.
    pub fn amplitude_sq(&self, p: &ModelParams) -> f64 {
        match self {
            EqClass::Xi1 => -p.lambda1 / p.a1,
            EqClass::Xi2 | EqClass::Xi4 => -p.lambda2 / (p.b1 + p.b2),
            EqClass::Xi3 => -p.lambda2 / p.b1,
            EqClass::Xi5 => -p.lambda1 / (p.a1 + p.a2),
        }
    }

    /// (growth rate, cubic coefficient) of the scalar balance g(u) = λ + K u².
    fn balance(&self, p: &ModelParams) -> (f64, f64) {
        match self {
            EqClass::Xi1 => (p.lambda1, p.a1),
            EqClass::Xi2 | EqClass::Xi4 => (p.lambda2, p.b1 + p.b2),
            EqClass::Xi3 => (p.lambda2, p.b1),
            EqClass::Xi5 => (p.lambda1, p.a1 + p.a2),
        }
    }
}

/// Template state of a class at a given amplitude.
pub fn template(class: EqClass, amplitude: f64) -> State {
    match class {
        EqClass::Xi1 => State::new(amplitude, 0.0, 0.0, 0.0, 0.0, 0.0),
        EqClass::Xi2 => State::new(0.0, 0.0, 0.0, 0.0, amplitude, amplitude),
        EqClass::Xi3 => State::new(0.0, 0.0, 0.0, amplitude, 0.0, 0.0),
        EqClass::Xi4 => State::new(0.0, 0.0, 0.0, 0.0, amplitude, -amplitude),
        EqClass::Xi5 => State::new(0.0, amplitude, amplitude, 0.0, 0.0, 0.0),
    }
}

/// One equilibrium: a class template moved by a group element.
#[derive(Clone, Copy, Debug)]
pub struct Equilibrium {
    pub class: EqClass,
    pub group_element: SymmetryElement,
    pub amplitude: f64,
    pub coords: State,
}

impl Equilibrium {
    /// Full group orbit of this equilibrium (distinct coordinate points).
    pub fn orbit(&self, group: &[SymmetryElement]) -> Vec<Equilibrium> {
        let base = template(self.class, self.amplitude);
        let mut out: Vec<Equilibrium> = Vec::new();
        for g in group {
            let coords = apply_symmetry(g, &base);
            if !out.iter().any(|e| e.coords.dist(&coords) < 1e-14) {
                out.push(Equilibrium {
                    class: self.class,
                    group_element: *g,
                    amplitude: self.amplitude,
                    coords,
                });
            }
        }
        out
    }

    /// Residual of the vector field at the stored coordinates.
    pub fn residual(&self, p: &ModelParams) -> f64 {
        evaluate_field(p, &self.coords).map(|f| f.norm()).unwrap_or(f64::INFINITY)
    }
}

/// Outcome per class: either the representative equilibrium (positive
/// amplitude, identity group element) or the reason the class is absent.
#[derive(Clone, Debug)]
pub struct EquilibriaSet {
    pub present: Vec<Equilibrium>,
    pub absent: Vec<(EqClass, String)>,
}

impl EquilibriaSet {
    pub fn get(&self, class: EqClass) -> Option<&Equilibrium> {
        self.present.iter().find(|e| e.class == class)
    }

    /// The representative of `class`, or an error naming the class.
    pub fn require(&self, class: EqClass) -> Result<&Equilibrium> {
        self.get(class).ok_or_else(|| {
            let reason = self
                .absent
                .iter()
                .find(|(c, _)| *c == class)
                .map(|(_, r)| r.clone())
                .unwrap_or_default();
            Error::AbsentEquilibrium(class.name(), reason)
        })
    }
}

/// Solves the amplitude balance of every class. Each amplitude comes from the
/// exact quadratic root, then one Newton step on the balance polishes away any
/// transcription error; the field residual is asserted afterwards.
pub fn find_equilibria(p: &ModelParams) -> Result<EquilibriaSet> {
    p.validate()?;
    let mut present = Vec::new();
    let mut absent = Vec::new();
    for class in EqClass::ALL {
        let amp_sq = class.amplitude_sq(p);
        if !(amp_sq > 0.0) {
            absent.push((
                class,
                format!("amplitude equation root {amp_sq:.6e} not positive"),
            ));
            continue;
        }
        let (lam, k) = class.balance(p);
        let mut amp = amp_sq.sqrt();
        // One Newton step on g(u) = λ + K u² (idempotent at the exact root).
        amp -= (lam + k * amp * amp) / (2.0 * k * amp);
        let eq = Equilibrium {
            class,
            group_element: SymmetryElement::IDENTITY,
            amplitude: amp,
            coords: template(class, amp),
        };
        let res = eq.residual(p);
        let tol = 1e-10 * eq.coords.norm().max(1.0);
        if res > tol {
            return Err(Error::InvalidParams(format!(
                "equilibrium {} residual {res:.3e} exceeds {tol:.3e}",
                class.name()
            )));
        }
        present.push(eq);
    }
    Ok(EquilibriaSet { present, absent })
}
