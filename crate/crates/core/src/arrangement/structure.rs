//! Modularity, supersolvability and divisional flags on a built lattice.

use std::collections::{HashMap, HashSet};

use super::lattice::{FlatId, Lattice};
use crate::exactmath::{IntPoly, Scalar};

/// Maximal chain `V = X_0 < X_1 < ... < X_r` of modular flats.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupersolvableCertificate {
    pub chain: Vec<FlatId>,
    /// Ascending; `|A_{X_i}| - |A_{X_{i-1}}|` padded with `dim - r` zeros.
    pub exponents: Vec<usize>,
}

/// Flag `X_1 > ... > X_m` (as subspaces, `rank X_i = i`, `m = rk(A) - 2`)
/// with each `chi(A^{X_i})` dividing its predecessor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionalFlag {
    pub flag: Vec<FlatId>,
    /// `chi(A^{X_i}, t)` for each flag member.
    pub polynomials: Vec<IntPoly>,
}

impl<S: Scalar> Lattice<S> {
    /// Smallest flat above both: intersect `X` with the hyperplanes of `Y`
    /// one at a time along cover edges.
    pub fn join(&self, x: FlatId, y: FlatId) -> FlatId {
        let mut z = x;
        for h in self.flat(y).contains().ones() {
            if !self.flat(z).contains_hyperplane(h) {
                z = *self
                    .up(z)
                    .iter()
                    .find(|&&w| self.flat(w).contains_hyperplane(h))
                    .expect("cover through every hyperplane outside the flat");
            }
        }
        z
    }

    /// Largest flat below both.
    pub fn meet(&self, x: FlatId, y: FlatId) -> FlatId {
        let mut c = self.flat(x).contains().clone();
        c.intersect_with(self.flat(y).contains());
        self.find_by_contains(&c).expect("intersection of closed sets is closed")
    }

    /// `X` is modular iff `rk X + rk Y = rk(X v Y) + rk(X ^ Y)` for every
    /// flat `Y`.
    pub fn is_modular(&self, x: FlatId) -> bool {
        assert!(self.is_complete(), "modularity needs the full lattice");
        let rx = self.rank_of(x);
        (0..self.len()).all(|y| {
            rx + self.rank_of(y) == self.rank_of(self.join(x, y)) + self.rank_of(self.meet(x, y))
        })
    }

    /// `Y` covered by `top` is modular in `[V, top]` iff every rank-2 flat
    /// below `top` with two hyperplanes outside `A_Y` contains one of `A_Y`.
    fn is_modular_coatom(&self, top: FlatId, y: FlatId) -> bool {
        let ct = self.flat(top).contains();
        let cy = self.flat(y).contains();
        self.ids_at_rank(2).all(|l| {
            let cl = self.flat(l).contains();
            if !cl.is_subset(ct) {
                return true;
            }
            let outside = cl.difference(cy).count();
            outside < 2 || !cl.is_disjoint(cy)
        })
    }

    /// Depth-first search, from the top down, for a maximal chain of modular
    /// flats.
    pub fn supersolvable_certificate(&self) -> Option<SupersolvableCertificate> {
        assert!(self.is_complete(), "supersolvability needs the full lattice");
        let r = self.top_rank();
        let top = self.ids_at_rank(r).start;
        let mut chain = vec![top];
        if !self.modular_chain_below(&mut chain) {
            return None;
        }
        chain.reverse();
        let mut exponents: Vec<usize> = chain
            .windows(2)
            .map(|w| self.flat(w[1]).hyperplane_count() - self.flat(w[0]).hyperplane_count())
            .collect();
        exponents.resize(self.dim(), 0);
        exponents.sort_unstable();
        Some(SupersolvableCertificate { chain, exponents })
    }

    fn modular_chain_below(&self, chain: &mut Vec<FlatId>) -> bool {
        let top = *chain.last().unwrap();
        if self.rank_of(top) == 0 {
            return true;
        }
        for &y in self.down(top) {
            if self.is_modular_coatom(top, y) {
                chain.push(y);
                if self.modular_chain_below(chain) {
                    return true;
                }
                chain.pop();
            }
        }
        false
    }

    /// Backtracking search for a divisional flag. Candidates at each step
    /// are tried by decreasing `|A_X|`; flats from which no completion
    /// exists are remembered, so a `None` is exhaustive.
    pub fn divisional_flag_search(&self) -> Option<DivisionalFlag> {
        assert!(self.is_complete(), "divisional search needs the full lattice");
        let m = self.top_rank().saturating_sub(2);
        let mut search = FlagSearch { lattice: self, chi: HashMap::new(), dead: HashSet::new(), target: m };
        let chi_v = self.characteristic_polynomial();
        let mut flag = Vec::new();
        if !search.extend(0, &chi_v, &mut flag) {
            return None;
        }
        let polynomials = flag.iter().map(|&x| search.chi(x)).collect();
        Some(DivisionalFlag { flag, polynomials })
    }
}

struct FlagSearch<'a, S> {
    lattice: &'a Lattice<S>,
    chi: HashMap<FlatId, IntPoly>,
    dead: HashSet<FlatId>,
    target: usize,
}

impl<S: Scalar> FlagSearch<'_, S> {
    fn chi(&mut self, x: FlatId) -> IntPoly {
        let l = self.lattice;
        self.chi.entry(x).or_insert_with(|| l.restriction_characteristic_polynomial(x)).clone()
    }

    fn extend(&mut self, prev: FlatId, prev_chi: &IntPoly, flag: &mut Vec<FlatId>) -> bool {
        if flag.len() == self.target {
            return true;
        }
        let l = self.lattice;
        let mut candidates: Vec<FlatId> = l.up(prev).to_vec();
        candidates.sort_by_key(|&y| (std::cmp::Reverse(l.flat(y).hyperplane_count()), y));
        for y in candidates {
            if self.dead.contains(&y) {
                continue;
            }
            let chi_y = self.chi(y);
            if !chi_y.divides(prev_chi) {
                continue;
            }
            flag.push(y);
            if self.extend(y, &chi_y, flag) {
                return true;
            }
            flag.pop();
            self.dead.insert(y);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use crate::exactmath::IntPoly;

    #[test]
    fn ambient_and_center_are_modular() {
        let l = braid(3).lattice().unwrap();
        assert!(l.is_modular(0));
        assert!(l.is_modular(l.ids_at_rank(2).start));
    }

    #[test]
    fn generic_lines_break_modularity() {
        // Four generic planes in 3-space: no line is modular.
        let a = q_arr(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]);
        let l = a.lattice().unwrap();
        for y in l.ids_at_rank(2) {
            assert!(!l.is_modular(y));
        }
        assert!(l.supersolvable_certificate().is_none());
    }

    #[test]
    fn boolean_and_braid_certificates() {
        let c = boolean(3).lattice().unwrap().supersolvable_certificate().unwrap();
        assert_eq!(c.exponents, vec![1, 1, 1]);
        let l = braid(4).lattice().unwrap();
        let c = l.supersolvable_certificate().unwrap();
        assert_eq!(c.exponents, vec![0, 1, 2, 3]);
        let counts: Vec<usize> = c.chain.iter().map(|&x| l.flat(x).hyperplane_count()).collect();
        assert_eq!(counts, vec![0, 1, 3, 6]);
        for &x in &c.chain {
            assert!(l.is_modular(x));
        }
    }

    #[test]
    fn divisional_flags() {
        let l = braid(3).lattice().unwrap();
        let f = l.divisional_flag_search().unwrap();
        assert!(f.flag.is_empty());
        let l = braid(4).lattice().unwrap();
        let f = l.divisional_flag_search().unwrap();
        assert_eq!(f.flag.len(), 1);
        assert!(f.polynomials[0].divides(&IntPoly::from_roots([0, 1, 2, 3])));
    }
}
