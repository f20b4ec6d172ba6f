use std::collections::HashMap;
use std::ops::Range;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use thiserror::Error;

use super::{canonicalize, Arrangement};
use crate::exactmath::{IntPoly, Scalar};

/// Default cap on the number of flats a lattice build may create.
pub const DEFAULT_MAX_FLATS: usize = 2_000_000;

pub type FlatId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("flat cap of {cap} exceeded while building rank {rank} (level sizes so far: {level_sizes:?})")]
    CapExceeded { cap: usize, rank: usize, level_sizes: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeOptions {
    /// Stop after this rank; `None` builds the full lattice.
    pub max_rank: Option<usize>,
    pub max_flats: usize,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions { max_rank: None, max_flats: DEFAULT_MAX_FLATS }
    }
}

/// An element `X` of `L(A)`: the reduced echelon basis of the forms vanishing
/// on `X`, and the indices of the hyperplanes containing `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flat<S> {
    dim: usize,
    forms: Vec<Vec<S>>,
    pivots: Vec<usize>,
    contains: FixedBitSet,
}

impl<S: Scalar> Flat<S> {
    pub(super) fn from_parts(
        dim: usize,
        forms: Vec<Vec<S>>,
        pivots: Vec<usize>,
        contains: FixedBitSet,
    ) -> Self {
        Flat { dim, forms, pivots, contains }
    }

    pub(super) fn set_contains(&mut self, contains: FixedBitSet) {
        self.contains = contains;
    }

    pub fn forms(&self) -> &[Vec<S>] {
        &self.forms
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rank(&self) -> usize {
        self.forms.len()
    }

    /// `dim X` as a subspace of the ambient space.
    pub fn dim(&self) -> usize {
        self.dim - self.forms.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self) -> &FixedBitSet {
        &self.contains
    }

    pub fn contains_hyperplane(&self, i: usize) -> bool {
        self.contains.contains(i)
    }

    /// `|A_X|`
    pub fn hyperplane_count(&self) -> usize {
        self.contains.count_ones(..)
    }

    /// Coordinates of `X`: the non-pivot columns, ascending.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.dim];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.dim).filter(|&j| !is_pivot[j]).collect()
    }

    /// `alpha` reduced against the echelon rows; zero exactly on the pivot
    /// columns, and zero everywhere iff `alpha` vanishes on `X`.
    pub fn residual(&self, alpha: &[S]) -> Vec<S> {
        let mut r = alpha.to_vec();
        for (row, &p) in self.forms.iter().zip(&self.pivots) {
            let c = alpha[p].clone();
            if c.is_zero() {
                continue;
            }
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    r[j] = r[j].clone() - c.clone() * x.clone();
                }
            }
        }
        r
    }

    /// `alpha|_X` in the coordinates of [`Flat::free_columns`].
    pub fn pullback(&self, alpha: &[S]) -> Vec<S> {
        let r = self.residual(alpha);
        self.free_columns().into_iter().map(|j| r[j].clone()).collect()
    }

    /// `X cap ker(alpha)` where `residual` is the canonical residual of
    /// `alpha` (nonzero, leading entry 1).
    fn extend(&self, residual: &[S]) -> (Vec<Vec<S>>, Vec<usize>) {
        let p = residual.iter().position(|x| !x.is_zero()).expect("nonzero residual");
        let mut rows = Vec::with_capacity(self.forms.len() + 1);
        let mut pivots = Vec::with_capacity(self.forms.len() + 1);
        let mut placed = false;
        for (row, &q) in self.forms.iter().zip(&self.pivots) {
            if !placed && q > p {
                rows.push(residual.to_vec());
                pivots.push(p);
                placed = true;
            }
            let c = row[p].clone();
            let row = if c.is_zero() {
                row.clone()
            } else {
                row.iter()
                    .zip(residual)
                    .map(|(x, y)| if y.is_zero() { x.clone() } else { x.clone() - c.clone() * y.clone() })
                    .collect()
            };
            rows.push(row);
            pivots.push(q);
        }
        if !placed {
            rows.push(residual.to_vec());
            pivots.push(p);
        }
        (rows, pivots)
    }
}

/// Intersection lattice `L(A)`, graded by rank, with cover relations and
/// `mu(V, X)` for every flat.
///
/// Flat ids are assigned rank by rank; within a rank, flats are sorted by
/// their echelon forms, so ids do not depend on the order of hyperplanes.
#[derive(Clone, Debug)]
pub struct Lattice<S> {
    dim: usize,
    complete: bool,
    flats: Vec<Flat<S>>,
    levels: Vec<Range<FlatId>>,
    up: Vec<Vec<FlatId>>,
    down: Vec<Vec<FlatId>>,
    mobius: Vec<i64>,
    by_contains: HashMap<FixedBitSet, FlatId>,
}

struct Child {
    pivots: Vec<usize>,
    contains: FixedBitSet,
    parents: Vec<FlatId>,
}

impl<S: Scalar> Lattice<S> {
    pub fn build(arr: &Arrangement<S>, opts: LatticeOptions) -> Result<Self, LatticeError> {
        let dim = arr.dim();
        let n = arr.len();
        let normals: Vec<&[S]> = arr.normals().collect();
        let top_rank = opts.max_rank.unwrap_or(dim).min(dim);

        let mut flats = vec![Flat::from_parts(dim, Vec::new(), Vec::new(), FixedBitSet::with_capacity(n))];
        let mut levels = vec![0..1];
        let mut up: Vec<Vec<FlatId>> = vec![Vec::new()];
        let mut down: Vec<Vec<FlatId>> = vec![Vec::new()];
        let rank = arr.rank();
        let complete = top_rank >= rank;

        for k in 0..rank.min(top_rank) {
            let parents = levels[k].clone();
            let per_parent: Vec<Vec<(Vec<Vec<S>>, Vec<usize>, FixedBitSet)>> = parents
                .clone()
                .into_par_iter()
                .map(|p| children_of(&flats[p], &normals))
                .collect();
            let mut merged: HashMap<Vec<Vec<S>>, Child> = HashMap::new();
            for (p, kids) in parents.zip(per_parent) {
                for (forms, pivots, contains) in kids {
                    merged
                        .entry(forms)
                        .or_insert_with(|| Child { pivots, contains, parents: Vec::new() })
                        .parents
                        .push(p);
                }
            }
            if flats.len() + merged.len() > opts.max_flats {
                let mut level_sizes: Vec<usize> = levels.iter().map(Range::len).collect();
                level_sizes.push(merged.len());
                return Err(LatticeError::CapExceeded { cap: opts.max_flats, rank: k + 1, level_sizes });
            }
            let mut level: Vec<(Vec<Vec<S>>, Child)> = merged.into_iter().collect();
            level.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
            let start = flats.len();
            for (forms, child) in level {
                let id = flats.len();
                for &p in &child.parents {
                    up[p].push(id);
                }
                let mut parents = child.parents;
                parents.sort_unstable();
                down.push(parents);
                up.push(Vec::new());
                flats.push(Flat::from_parts(dim, forms, child.pivots, child.contains));
            }
            levels.push(start..flats.len());
        }

        let mut mobius = vec![0i64; flats.len()];
        mobius[0] = 1;
        for y in 1..flats.len() {
            let h = flats[y].contains.minimum().expect("positive-rank flat contains a hyperplane");
            mobius[y] = -down[y]
                .iter()
                .filter(|&&z| !flats[z].contains.contains(h))
                .map(|&z| mobius[z])
                .sum::<i64>();
        }
        let by_contains = flats.iter().enumerate().map(|(i, f)| (f.contains.clone(), i)).collect();
        Ok(Lattice { dim, complete, flats, levels, up, down, mobius, by_contains })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether every rank up to `rk(A)` was built.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    /// Highest rank present.
    pub fn top_rank(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn flat(&self, id: FlatId) -> &Flat<S> {
        &self.flats[id]
    }

    pub fn flats(&self) -> &[Flat<S>] {
        &self.flats
    }

    pub fn rank_of(&self, id: FlatId) -> usize {
        self.flats[id].rank()
    }

    pub fn ids_at_rank(&self, k: usize) -> Range<FlatId> {
        self.levels.get(k).cloned().unwrap_or(0..0)
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Range::len).collect()
    }

    /// Flats covering `id` (one rank higher, contained in it).
    pub fn up(&self, id: FlatId) -> &[FlatId] {
        &self.up[id]
    }

    /// Flats covered by `id`.
    pub fn down(&self, id: FlatId) -> &[FlatId] {
        &self.down[id]
    }

    /// `mu(V, X)`
    pub fn mobius(&self, id: FlatId) -> i64 {
        self.mobius[id]
    }

    pub fn find_by_contains(&self, contains: &FixedBitSet) -> Option<FlatId> {
        self.by_contains.get(contains).copied()
    }

    pub fn find(&self, x: &Flat<S>) -> Option<FlatId> {
        self.find_by_contains(&x.contains)
    }

    /// `X <= Y` in `L(A)`, i.e. `Y subset X`.
    pub fn leq(&self, x: FlatId, y: FlatId) -> bool {
        self.flats[x].contains.is_subset(&self.flats[y].contains)
    }

    /// `chi(A, t) = sum_X mu(V, X) t^{dim X}`. Requires a complete lattice.
    pub fn characteristic_polynomial(&self) -> IntPoly {
        assert!(self.complete, "characteristic polynomial needs the full lattice");
        let mut c = vec![0i64; self.dim + 1];
        for (f, &m) in self.flats.iter().zip(&self.mobius) {
            c[f.dim()] += m;
        }
        IntPoly::new(c)
    }

    /// Ids of all flats `Y >= X`, ascending (hence rank-ordered).
    pub fn upper_set(&self, x: FlatId) -> Vec<FlatId> {
        let mut seen = FixedBitSet::with_capacity(self.flats.len());
        seen.insert(x);
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            for &z in &self.up[y] {
                if !seen.put(z) {
                    stack.push(z);
                }
            }
        }
        seen.ones().collect()
    }

    /// `mu(X, Y)` for every `Y >= X`.
    pub fn interval_mobius(&self, x: FlatId) -> HashMap<FlatId, i64> {
        let cx = &self.flats[x].contains;
        let mut mu: HashMap<FlatId, i64> = HashMap::new();
        for y in self.upper_set(x) {
            if y == x {
                mu.insert(y, 1);
                continue;
            }
            let h = self.flats[y]
                .contains
                .ones()
                .find(|&i| !cx.contains(i))
                .expect("Y > X adds a hyperplane");
            let s: i64 = self.down[y]
                .iter()
                .filter(|&&z| !self.flats[z].contains.contains(h))
                .filter_map(|z| mu.get(z))
                .sum();
            mu.insert(y, -s);
        }
        mu
    }

    /// `chi(A^X, t) = sum_{Y >= X} mu(X, Y) t^{dim Y}`.
    pub fn restriction_characteristic_polynomial(&self, x: FlatId) -> IntPoly {
        assert!(self.complete, "restriction polynomial needs the full lattice");
        let mut c = vec![0i64; self.dim + 1];
        for (y, m) in self.interval_mobius(x) {
            c[self.flats[y].dim()] += m;
        }
        IntPoly::new(c)
    }

    /// `chi(A_X, t)`, the localization polynomial, from the lower interval.
    pub fn localization_characteristic_polynomial(&self, x: FlatId) -> IntPoly {
        let cx = &self.flats[x].contains;
        let mut c = vec![0i64; self.dim + 1];
        for (f, &m) in self.flats.iter().zip(&self.mobius) {
            if f.contains.is_subset(cx) {
                c[f.dim()] += m;
            }
        }
        IntPoly::new(c)
    }
}

/// The flats covering `x`: group the hyperplanes not containing `x` by the
/// canonical residual of their normal.
fn children_of<S: Scalar>(x: &Flat<S>, normals: &[&[S]]) -> Vec<(Vec<Vec<S>>, Vec<usize>, FixedBitSet)> {
    let n = normals.len();
    let mut groups: Vec<(Vec<S>, FixedBitSet)> = Vec::new();
    let mut index: HashMap<Vec<S>, usize> = HashMap::new();
    for (i, alpha) in normals.iter().enumerate() {
        if x.contains.contains(i) {
            continue;
        }
        let r = canonicalize(x.residual(alpha)).expect("hyperplane outside A_X has a nonzero residual");
        match index.get(&r) {
            Some(&g) => groups[g].1.insert(i),
            None => {
                let mut c = x.contains.clone();
                c.grow(n);
                c.insert(i);
                index.insert(r.clone(), groups.len());
                groups.push((r, c));
            }
        }
    }
    groups
        .into_iter()
        .map(|(r, c)| {
            let (forms, pivots) = x.extend(&r);
            (forms, pivots, c)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;
    use crate::exactmath::Rational;

    #[test]
    fn boolean_lattice() {
        let l = boolean(3).lattice().unwrap();
        assert_eq!(l.level_sizes(), vec![1, 3, 3, 1]);
        assert_eq!(l.characteristic_polynomial(), IntPoly::from_roots([1, 1, 1]));
    }

    #[test]
    fn braid_a2_levels() {
        let l = braid(3).lattice().unwrap();
        assert_eq!(l.level_sizes(), vec![1, 3, 1]);
        assert_eq!(l.mobius(l.ids_at_rank(2).start), 2);
        assert_eq!(l.characteristic_polynomial(), IntPoly::from_roots([0, 1, 2]));
    }

    #[test]
    fn empty_arrangement() {
        let a = Arrangement::<Rational>::empty(3, crate::exactmath::Field::Rational);
        assert_eq!(a.characteristic_polynomial().unwrap(), IntPoly::monomial(3));
    }

    #[test]
    fn braid_a3_counts() {
        // Set partitions of {1,2,3,4} by number of blocks.
        let l = braid(4).lattice().unwrap();
        assert_eq!(l.level_sizes(), vec![1, 6, 7, 1]);
        assert_eq!(l.characteristic_polynomial(), IntPoly::from_roots([0, 1, 2, 3]));
    }

    #[test]
    fn restriction_polynomial_from_interval() {
        let a = braid(4);
        let l = a.lattice().unwrap();
        for x in 0..l.len() {
            let direct = a.restriction(l.flat(x)).characteristic_polynomial().unwrap();
            assert_eq!(l.restriction_characteristic_polynomial(x), direct, "flat {x}");
            let loc = a.localization(l.flat(x)).characteristic_polynomial().unwrap();
            assert_eq!(l.localization_characteristic_polynomial(x), loc, "flat {x}");
        }
    }

    #[test]
    fn cap_reports_partial_progress() {
        let opts = LatticeOptions { max_rank: None, max_flats: 8 };
        let err = braid(4).lattice_with(opts).unwrap_err();
        assert_eq!(err, LatticeError::CapExceeded { cap: 8, rank: 2, level_sizes: vec![1, 6, 7] });
    }

    #[test]
    fn truncated_build() {
        let opts = LatticeOptions { max_rank: Some(1), ..Default::default() };
        let l = braid(4).lattice_with(opts).unwrap();
        assert_eq!(l.level_sizes(), vec![1, 6]);
        assert!(!l.is_complete());
        let full = braid(4).lattice_with(LatticeOptions { max_rank: Some(3), ..Default::default() });
        assert!(full.unwrap().is_complete());
    }

    #[test]
    fn flats_found_by_contains() {
        let a = braid(4);
        let l = a.lattice().unwrap();
        let x = a.intersection([0, 5]);
        let id = l.find(&x).unwrap();
        assert_eq!(l.flat(id).forms(), x.forms());
        assert_eq!(l.rank_of(id), 2);
    }
}
