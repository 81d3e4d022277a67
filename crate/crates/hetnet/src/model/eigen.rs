//! Closed-form eigenvalue tables of the linearizations at ξ1..ξ5.
//!
//! Every eigenvalue is a polynomial in the squared amplitude s of its
//! equilibrium. Degenerate pairs (λ12=λ13, λ22=λ23, λ32=λ33, λ35=λ36,
//! λ42=λ43) are produced from one shared expression, so the identities hold
//! exactly, not just to roundoff.

use super::{EqClass, Equilibrium, ModelParams, State};
use crate::{Error, Result};

/// Local eigenbasis at an equilibrium: six unit vectors, plus the two
/// alternate frames used at ξ3 (the symmetry-adapted "tilde" frame and the
/// frame transported to the ρξ3 copy).
#[derive(Clone, Debug)]
pub struct LocalBasis {
    pub main: [State; 6],
    pub tilde: Option<[State; 6]>,
    pub hat: Option<[State; 6]>,
}

/// Labelled eigenvalues of one equilibrium's linearization.
///
/// `lambda[k-1]` is λ_{jk} for this class j; `radial[k-1]` marks the
/// eigenvalue along the equilibrium's own axis. For ξ5 the (λ54, λ55) pair
/// comes from a quadratic (sum/product form); if its discriminant were
/// negative the pair is stored as the real part twice and flagged in
/// `complex_pair` (cannot occur for real coefficients here, since the
/// restricted block is symmetric, but the path is kept defensive).
#[derive(Clone, Debug)]
pub struct EigenData {
    pub class: EqClass,
    pub amp_sq: f64,
    pub lambda: [f64; 6],
    pub radial: [bool; 6],
    pub complex_pair: Option<(f64, f64)>,
    pub basis: LocalBasis,
}

impl EigenData {
    /// λ_{jk} with k in 1..=6.
    pub fn lam(&self, k: usize) -> f64 {
        self.lambda[k - 1]
    }

    /// Unit eigenvector e_{jk}, k in 1..=6.
    pub fn vec(&self, k: usize) -> State {
        self.basis.main[k - 1]
    }
}

/// Text label of λ_{jk}, e.g. `label(EqClass::Xi1, 5) = "lambda15"`.
pub fn eigen_label(class: EqClass, k: usize) -> String {
    format!("lambda{}{}", class.idx() + 1, k)
}

/// Eigenvalue tables of all five equilibrium classes, indexed j = 1..=5.
#[derive(Clone, Debug)]
pub struct EigenTable {
    entries: [EigenData; 5],
}

impl EigenTable {
    /// Builds the table at the representative of every class; errors naming
    /// the first absent class.
    pub fn compute(p: &ModelParams) -> Result<EigenTable> {
        let eqs = super::find_equilibria(p)?;
        let mut entries = Vec::with_capacity(5);
        for class in EqClass::ALL {
            let eq = eqs.require(class)?;
            entries.push(eigen_table(p, eq)?);
        }
        Ok(EigenTable {
            entries: entries.try_into().map_err(|_| {
                Error::InvalidParams("eigen table construction".into())
            })?,
        })
    }

    pub fn get(&self, class: EqClass) -> &EigenData {
        &self.entries[class.idx()]
    }

    /// λ_{jk} with j in 1..=5 (equilibrium class) and k in 1..=6.
    pub fn lam(&self, j: usize, k: usize) -> f64 {
        self.entries[j - 1].lambda[k - 1]
    }

    /// Table with prescribed eigenvalues and representative frames; for
    /// exercising downstream classification logic directly.
    pub fn synthetic(lambda: [[f64; 6]; 5]) -> EigenTable {
        let entries: Vec<EigenData> = EqClass::ALL
            .iter()
            .zip(lambda.iter())
            .map(|(&class, lam)| EigenData {
                class,
                amp_sq: 1.0,
                lambda: *lam,
                radial: radial_flags(class),
                complex_pair: None,
                basis: representative_basis(class),
            })
            .collect();
        EigenTable {
            entries: entries.try_into().unwrap(),
        }
    }
}

fn radial_flags(class: EqClass) -> [bool; 6] {
    let mut out = [false; 6];
    let k = match class {
        EqClass::Xi1 => 1,
        EqClass::Xi2 => 5,
        EqClass::Xi3 => 4,
        EqClass::Xi4 => 6,
        EqClass::Xi5 => 2,
    };
    out[k - 1] = true;
    out
}

fn representative_basis(class: EqClass) -> LocalBasis {
    match class {
        EqClass::Xi3 => {
            let rho = super::SymmetryElement::RHO;
            let main = standard_frame();
            let mut hat = [State::zero(); 6];
            for (h, m) in hat.iter_mut().zip(main.iter()) {
                *h = rho.apply(m);
            }
            LocalBasis {
                main,
                tilde: Some(symmetry_adapted_frame()),
                hat: Some(hat),
            }
        }
        _ => LocalBasis {
            main: symmetry_adapted_frame(),
            tilde: None,
            hat: None,
        },
    }
}

/// Convenience alias used in report rows.
pub type EigenLabel = String;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn ex1() -> State {
    State::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
}
fn exp() -> State {
    State::new(0.0, SQRT_HALF, SQRT_HALF, 0.0, 0.0, 0.0)
}
fn exm() -> State {
    State::new(0.0, SQRT_HALF, -SQRT_HALF, 0.0, 0.0, 0.0)
}
fn ey1() -> State {
    State::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
}
fn eyp() -> State {
    State::new(0.0, 0.0, 0.0, 0.0, SQRT_HALF, SQRT_HALF)
}
fn eym() -> State {
    State::new(0.0, 0.0, 0.0, 0.0, SQRT_HALF, -SQRT_HALF)
}

/// The frame shared by ξ1, ξ2, ξ4, ξ5 (and the tilde frame of ξ3).
fn symmetry_adapted_frame() -> [State; 6] {
    [ex1(), exp(), exm(), ey1(), eyp(), eym()]
}

fn standard_frame() -> [State; 6] {
    let mut out = [State::zero(); 6];
    for (i, v) in out.iter_mut().enumerate() {
        v.0[i] = 1.0;
    }
    out
}

/// Closed-form eigenvalue table at the representative of `eq.class`,
/// transported to `eq`'s group copy (eigenvalues are copy-independent, the
/// basis moves with the group element).
pub fn eigen_table(p: &ModelParams, eq: &Equilibrium) -> Result<EigenData> {
    p.validate()?;
    let s = eq.class.amplitude_sq(p);
    if !(s > 0.0) {
        return Err(Error::AbsentEquilibrium(
            eq.class.name(),
            format!("squared amplitude {s:.6e} not positive"),
        ));
    }
    let (l1, l2) = (p.lambda1, p.lambda2);
    let mut complex_pair = None;

    let lambda = match eq.class {
        EqClass::Xi1 => {
            let pair = (p.a2 - p.a1) * s;
            [
                2.0 * p.a1 * s,
                pair,
                pair,
                l2 + p.c4 * s,
                l2 + (p.c5 + p.c6) * s,
                l2 + (p.c5 - p.c6) * s,
            ]
        }
        EqClass::Xi2 => {
            let pair = l1 + (p.c1 + p.c2) * s;
            [
                l1 + (2.0 * p.c2 + p.c3) * s,
                pair,
                pair,
                (p.b2 - p.b1) * s + p.b3 * s * s,
                2.0 * (p.b1 + p.b2) * s,
                2.0 * (p.b1 - p.b2) * s,
            ]
        }
        EqClass::Xi3 => {
            let pair_x = l1 + p.c2 * s;
            let pair_y = (p.b2 - p.b1) * s;
            [l1 + p.c1 * s, pair_x, pair_x, 2.0 * p.b1 * s, pair_y, pair_y]
        }
        EqClass::Xi4 => {
            let pair = l1 + (p.c1 + p.c2) * s;
            [
                l1 + (2.0 * p.c2 - p.c3) * s,
                pair,
                pair,
                (p.b2 - p.b1) * s + p.b3 * s * s,
                2.0 * (p.b1 - p.b2) * s,
                2.0 * (p.b1 + p.b2) * s,
            ]
        }
        EqClass::Xi5 => {
            // (λ54, λ55) are the roots of μ² - Tμ + D with the sum/product
            // below; the restricted block is symmetric, so they are real.
            let t = 2.0 * l2 + (p.c4 + 3.0 * p.c5) * s;
            let d = (l2 + (p.c4 + p.c5) * s) * (l2 + 2.0 * p.c5 * s)
                - 2.0 * p.c6 * p.c6 * s * s;
            let disc = t * t / 4.0 - d;
            let (mu1, mu2) = if disc >= 0.0 {
                let root = disc.sqrt();
                (t / 2.0 - root, t / 2.0 + root)
            } else {
                complex_pair = Some((t / 2.0, (-disc).sqrt()));
                (t / 2.0, t / 2.0)
            };
            [
                (p.a2 - p.a1) * s + p.a3 * s * s,
                2.0 * (p.a1 + p.a2) * s,
                2.0 * (p.a1 - p.a2) * s,
                mu1,
                mu2,
                l2 + (p.c4 + p.c5) * s,
            ]
        }
    };
    let radial = radial_flags(eq.class);
    let mut basis = representative_basis(eq.class);

    // Transport the frame to this group copy.
    let g = eq.group_element;
    if g != super::SymmetryElement::IDENTITY {
        for v in basis.main.iter_mut() {
            *v = g.apply(v);
        }
        if let Some(t) = basis.tilde.as_mut() {
            for v in t.iter_mut() {
                *v = g.apply(v);
            }
        }
        if let Some(h) = basis.hat.as_mut() {
            for v in h.iter_mut() {
                *v = g.apply(v);
            }
        }
    }

    Ok(EigenData {
        class: eq.class,
        amp_sq: s,
        lambda,
        radial,
        complex_pair,
        basis,
    })
}
