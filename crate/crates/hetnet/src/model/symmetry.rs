//! The symmetry group: signed coordinate permutations of R^6 generated by
//!
//! * ρ  — cyclic shift (x1,x2,x3; y1,y2,y3) -> (x2,x3,x1; y2,y3,y1)
//! * s1 — swap of the 2,3 coordinate pairs
//! * r  — minus identity
//! * g1 — (x1,-x2,-x3; y1,y2,y3)
//! * g2 — (-x1,-x2,x3; y1,y2,y3)

use super::State;

/// A signed coordinate permutation: `(g·s)[i] = sign[i] * s[perm[i]]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SymmetryElement {
    pub perm: [u8; 6],
    pub sign: [i8; 6],
}

impl SymmetryElement {
    pub const IDENTITY: SymmetryElement = SymmetryElement {
        perm: [0, 1, 2, 3, 4, 5],
        sign: [1; 6],
    };

    /// Cyclic rotation of both triples.
    pub const RHO: SymmetryElement = SymmetryElement {
        perm: [1, 2, 0, 4, 5, 3],
        sign: [1; 6],
    };

    /// Swap of the second and third coordinate in each triple.
    pub const S1: SymmetryElement = SymmetryElement {
        perm: [0, 2, 1, 3, 5, 4],
        sign: [1; 6],
    };

    /// Minus identity.
    pub const R: SymmetryElement = SymmetryElement {
        perm: [0, 1, 2, 3, 4, 5],
        sign: [-1; 6],
    };

    /// Sign flip of x2, x3.
    pub const G1: SymmetryElement = SymmetryElement {
        perm: [0, 1, 2, 3, 4, 5],
        sign: [1, -1, -1, 1, 1, 1],
    };

    /// Sign flip of x1, x2.
    pub const G2: SymmetryElement = SymmetryElement {
        perm: [0, 1, 2, 3, 4, 5],
        sign: [-1, -1, 1, 1, 1, 1],
    };

    pub const GENERATORS: [SymmetryElement; 5] = [
        Self::RHO,
        Self::S1,
        Self::R,
        Self::G1,
        Self::G2,
    ];

    /// Composition acting left-to-right on states: `(g.compose(h))·s = g·(h·s)`.
    pub fn compose(&self, other: &SymmetryElement) -> SymmetryElement {
        let mut perm = [0u8; 6];
        let mut sign = [0i8; 6];
        for i in 0..6 {
            let k = self.perm[i] as usize;
            perm[i] = other.perm[k];
            sign[i] = self.sign[i] * other.sign[k];
        }
        SymmetryElement { perm, sign }
    }

    pub fn inverse(&self) -> SymmetryElement {
        let mut perm = [0u8; 6];
        let mut sign = [0i8; 6];
        for i in 0..6 {
            let j = self.perm[i] as usize;
            perm[j] = i as u8;
            sign[j] = self.sign[i];
        }
        SymmetryElement { perm, sign }
    }

    pub fn apply(&self, s: &State) -> State {
        let mut out = [0.0; 6];
        for i in 0..6 {
            out[i] = f64::from(self.sign[i]) * s[self.perm[i] as usize];
        }
        State(out)
    }
}

/// Applies a signed coordinate permutation to a state.
pub fn apply_symmetry(g: &SymmetryElement, s: &State) -> State {
    g.apply(s)
}

/// Closure of the five generators under composition (breadth-first over
/// products). Contains the identity and all inverses by construction of a
/// finite closed set.
pub fn enumerate_group() -> Vec<SymmetryElement> {
    let mut seen = std::collections::HashSet::new();
    let mut elements = vec![SymmetryElement::IDENTITY];
    seen.insert(SymmetryElement::IDENTITY);
    let mut frontier = vec![SymmetryElement::IDENTITY];
    while let Some(g) = frontier.pop() {
        for gen in &SymmetryElement::GENERATORS {
            let next = g.compose(gen);
            if seen.insert(next) {
                elements.push(next);
                frontier.push(next);
            }
        }
    }
    elements.sort_by_key(|e| (e.perm, e.sign));
    elements
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_rotates_triples() {
        let s = State::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
        let out = apply_symmetry(&SymmetryElement::RHO, &s);
        assert_eq!(out.0, [2.0, 3.0, 1.0, 5.0, 6.0, 4.0]);
    }

    #[test]
    fn r_negates() {
        let s = State::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
        let out = apply_symmetry(&SymmetryElement::R, &s);
        assert_eq!(out.0, [-1.0, -2.0, -3.0, -4.0, -5.0, -6.0]);
    }

    #[test]
    fn g1_flips_x2_x3() {
        let s = State::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
        let out = apply_symmetry(&SymmetryElement::G1, &s);
        assert_eq!(out.0, [1.0, -2.0, -3.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn g1_g2_composition_action() {
        // g1∘g2 acts as (x1,x2,x3) -> (-x1, x2, -x3), identity on y.
        let g = SymmetryElement::G1.compose(&SymmetryElement::G2);
        let s = State::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
        let out = g.apply(&s);
        assert_eq!(out.0, [-1.0, 2.0, -3.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn compose_matches_pointwise_action() {
        let s = State::new(0.3, -1.2, 2.0, -0.7, 0.1, 5.0);
        for g in &SymmetryElement::GENERATORS {
            for h in &SymmetryElement::GENERATORS {
                let composite = g.compose(h).apply(&s);
                let sequential = g.apply(&h.apply(&s));
                assert_eq!(composite.0, sequential.0);
            }
        }
    }

    #[test]
    fn group_closure_properties() {
        let group = enumerate_group();
        assert!(group.contains(&SymmetryElement::IDENTITY));
        let set: std::collections::HashSet<_> = group.iter().copied().collect();
        assert_eq!(set.len(), group.len(), "no duplicates");
        for g in &group {
            assert!(set.contains(&g.inverse()), "inverse closure");
            for h in &group {
                assert!(set.contains(&g.compose(h)), "product closure");
            }
        }
    }

    #[test]
    fn group_order_is_48() {
        // Independent count: closure enumeration in exact integer arithmetic.
        assert_eq!(enumerate_group().len(), 48);
    }
}
