//! Eigenvalue-sign conditions for existence of the two heteroclinic cycles
//! and the full network.
//!
//! Each cycle has a list of strict sign conditions on the λ_jk: contraction
//! along the directions the cycle must attract from, expansion along the
//! connections it rides. The network list is the union of both cycles' lists
//! plus transverse stability of ξ5. Any eigenvalue within `BOUNDARY_TOL` of
//! zero makes the verdict unreliable, so the report is marked boundary.

use super::{EigenTable, EqClass, ModelParams};
use crate::{Result, BOUNDARY_TOL};
use serde::Serialize;

/// One strict sign condition λ_jk > 0 or λ_jk < 0 with its evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct Inequality {
    /// e.g. "lambda15 > 0".
    pub label: String,
    /// The eigenvalue itself (signed).
    pub value: f64,
    /// True if the row demands value > 0, false for value < 0.
    pub want_positive: bool,
    /// Strict inequality holds.
    pub satisfied: bool,
    /// |value| < BOUNDARY_TOL: too close to zero to trust the sign.
    pub boundary: bool,
}

impl Inequality {
    /// Signed slack: positive iff satisfied, zero exactly on the boundary.
    pub fn margin(&self) -> f64 {
        if self.want_positive {
            self.value
        } else {
            -self.value
        }
    }
}

/// Evaluation of all three condition sets at one parameter point.
#[derive(Clone, Debug)]
pub struct ExistenceReport {
    /// Conditions for the ξ3 → ξ1 → ξ2 → ρξ3 cycle (16 rows).
    pub cycle_c123: Vec<Inequality>,
    /// Conditions for the ξ3 → ξ1 → ξ4 → −ρξ3 cycle (15 rows).
    pub cycle_c143: Vec<Inequality>,
    /// Union of both cycles' conditions plus ξ5 transverse stability (27 rows).
    pub network: Vec<Inequality>,
    pub cycle_c123_exists: bool,
    pub cycle_c143_exists: bool,
    pub network_exists: bool,
    /// Any network row within BOUNDARY_TOL of zero.
    pub boundary: bool,
    /// Minimum signed slack over the network rows.
    pub margin: f64,
}

impl ExistenceReport {
    /// Minimum slack over a row set; +inf on an empty set.
    fn min_margin(rows: &[Inequality]) -> f64 {
        rows.iter().map(Inequality::margin).fold(f64::INFINITY, f64::min)
    }

    pub fn margin_c123(&self) -> f64 {
        Self::min_margin(&self.cycle_c123)
    }

    pub fn margin_c143(&self) -> f64 {
        Self::min_margin(&self.cycle_c143)
    }
}

/// (j, k) index pairs demanding λ_jk < 0 / > 0 for the ξ1ξ2ξ3 cycle.
const NEG_C123: &[(usize, usize)] = &[
    (1, 1),
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 1),
    (2, 2),
    (2, 3),
    (2, 4),
    (2, 5),
    (3, 2),
    (3, 4),
    (3, 5),
];
const POS_C123: &[(usize, usize)] = &[(1, 5), (1, 6), (2, 6), (3, 1)];

/// Index pairs for the ξ1ξ4ξ3 cycle. λ43 = λ42 identically, so the
/// degenerate partner is not listed twice.
const NEG_C143: &[(usize, usize)] = &[
    (1, 1),
    (1, 2),
    (1, 3),
    (1, 4),
    (3, 2),
    (3, 4),
    (3, 5),
    (4, 1),
    (4, 4),
    (4, 6),
];
const POS_C143: &[(usize, usize)] = &[(1, 5), (1, 6), (3, 1), (4, 2), (4, 5)];

/// Extra rows for the network: ξ2 attraction already in the C123 list, plus
/// transverse stability of ξ5 in every direction except the ξ5→ξ1 one.
const NEG_NET_EXTRA: &[(usize, usize)] =
    &[(5, 1), (5, 2), (5, 4), (5, 5), (5, 6)];
const POS_NET_EXTRA: &[(usize, usize)] = &[(5, 3)];

fn build_rows(
    table: &EigenTable,
    neg: &[(usize, usize)],
    pos: &[(usize, usize)],
) -> Vec<Inequality> {
    let xi5_complex = table.get(EqClass::Xi5).complex_pair.is_some();
    let mut rows = Vec::with_capacity(neg.len() + pos.len());
    for (&(j, k), want_positive) in neg
        .iter()
        .map(|jk| (jk, false))
        .chain(pos.iter().map(|jk| (jk, true)))
    {
        let value = table.lam(j, k);
        let complex = xi5_complex && j == 5 && (k == 4 || k == 5);
        let sign = if want_positive { '>' } else { '<' };
        let label = if complex {
            format!("lambda{j}{k} {sign} 0 (complex pair)")
        } else {
            format!("lambda{j}{k} {sign} 0")
        };
        let boundary = value.abs() < BOUNDARY_TOL;
        let satisfied = !complex
            && !boundary
            && if want_positive { value > 0.0 } else { value < 0.0 };
        rows.push(Inequality {
            label,
            value,
            want_positive,
            satisfied,
            boundary,
        });
    }
    rows
}

/// Evaluates the three condition sets from an eigenvalue table.
pub fn existence_from_table(table: &EigenTable) -> ExistenceReport {
    let cycle_c123 = build_rows(table, NEG_C123, POS_C123);
    let cycle_c143 = build_rows(table, NEG_C143, POS_C143);
    let neg_net: Vec<(usize, usize)> = NEG_C123
        .iter()
        .chain(NEG_C143.iter())
        .chain(NEG_NET_EXTRA.iter())
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let pos_net: Vec<(usize, usize)> = POS_C123
        .iter()
        .chain(POS_C143.iter())
        .chain(POS_NET_EXTRA.iter())
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let network = build_rows(table, &neg_net, &pos_net);

    let all = |rows: &[Inequality]| rows.iter().all(|r| r.satisfied);
    let any_boundary = network.iter().any(|r| r.boundary);
    let margin = ExistenceReport::min_margin(&network);
    ExistenceReport {
        cycle_c123_exists: all(&cycle_c123),
        cycle_c143_exists: all(&cycle_c143),
        network_exists: all(&network),
        boundary: any_boundary,
        margin,
        cycle_c123,
        cycle_c143,
        network,
    }
}

/// Evaluates the condition sets at `p`; errors if any equilibrium class is
/// absent or degenerate.
pub fn check_existence(p: &ModelParams) -> Result<ExistenceReport> {
    let table = EigenTable::compute(p)?;
    Ok(existence_from_table(&table))
}
