//! Central hyperplane arrangements over an exact field.

mod lattice;
mod structure;

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::exactmath::{rref_rows, Field, Matrix, Scalar};

pub use lattice::{Flat, FlatId, Lattice, LatticeError, LatticeOptions, DEFAULT_MAX_FLATS};
pub use structure::{DivisionalFlag, SupersolvableCertificate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrangementError {
    #[error("hyperplane {index} has {got} coordinates, expected {dim}")]
    WrongLength { index: usize, got: usize, dim: usize },
    #[error("hyperplane {0} has a zero normal")]
    ZeroNormal(usize),
    #[error("hyperplane {index} is not defined over {field}")]
    FieldMismatch { index: usize, field: Field },
    #[error("the given forms do not cut out a flat of the arrangement")]
    NotAFlat,
    #[error("hyperplane not present in the arrangement")]
    MissingHyperplane,
    #[error("arrangements live in different fields ({0} vs {1})")]
    DifferentFields(Field, Field),
}

/// Linear form `alpha_H` scaled so its first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperplane<S> {
    normal: Vec<S>,
}

impl<S: Scalar> Hyperplane<S> {
    /// `None` for the zero form.
    pub fn new(normal: Vec<S>) -> Option<Self> {
        canonicalize(normal).map(|normal| Hyperplane { normal })
    }

    pub fn normal(&self) -> &[S] {
        &self.normal
    }

    pub fn into_normal(self) -> Vec<S> {
        self.normal
    }
}

/// Scale a nonzero vector so its first nonzero entry is 1.
pub fn canonicalize<S: Scalar>(mut v: Vec<S>) -> Option<Vec<S>> {
    let lead = v.iter().position(|x| !x.is_zero())?;
    if !v[lead].is_one() {
        let inv = v[lead].inv().expect("nonzero lead");
        for x in v[lead..].iter_mut() {
            if !x.is_zero() {
                *x = x.clone() * inv.clone();
            }
        }
    }
    Some(v)
}

/// Duplicate-free ordered set of hyperplanes in `V = K^dim`.
#[derive(Clone, Debug)]
pub struct Arrangement<S> {
    dim: usize,
    field: Field,
    hyperplanes: Vec<Hyperplane<S>>,
    index: HashMap<Vec<S>, usize>,
}

impl<S: Scalar> PartialEq for Arrangement<S> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.field == other.field && self.hyperplanes == other.hyperplanes
    }
}

impl<S: Scalar> Eq for Arrangement<S> {}

impl<S: Scalar> Arrangement<S> {
    /// Canonicalizes every normal and drops repeats, keeping first
    /// occurrences.
    pub fn new(dim: usize, field: Field, normals: Vec<Vec<S>>) -> Result<Self, ArrangementError> {
        Self::new_reporting_duplicates(dim, field, normals).map(|(a, _)| a)
    }

    /// Like [`Arrangement::new`], also returning the input positions that
    /// repeated an earlier hyperplane.
    pub fn new_reporting_duplicates(
        dim: usize,
        field: Field,
        normals: Vec<Vec<S>>,
    ) -> Result<(Self, Vec<usize>), ArrangementError> {
        let mut arr = Self::empty(dim, field);
        let mut dropped = Vec::new();
        for (i, n) in normals.into_iter().enumerate() {
            if n.len() != dim {
                return Err(ArrangementError::WrongLength { index: i, got: n.len(), dim });
            }
            if n.iter().any(|x| !x.in_field(field)) {
                return Err(ArrangementError::FieldMismatch { index: i, field });
            }
            let h = Hyperplane::new(n).ok_or(ArrangementError::ZeroNormal(i))?;
            if !arr.push(h) {
                dropped.push(i);
            }
        }
        Ok((arr, dropped))
    }

    pub fn empty(dim: usize, field: Field) -> Self {
        Arrangement { dim, field, hyperplanes: Vec::new(), index: HashMap::new() }
    }

    /// Append unless already present; returns whether it was added.
    fn push(&mut self, h: Hyperplane<S>) -> bool {
        if self.index.contains_key(&h.normal) {
            return false;
        }
        self.index.insert(h.normal.clone(), self.hyperplanes.len());
        self.hyperplanes.push(h);
        true
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn hyperplanes(&self) -> &[Hyperplane<S>] {
        &self.hyperplanes
    }

    pub fn normal(&self, i: usize) -> &[S] {
        &self.hyperplanes[i].normal
    }

    pub fn normals(&self) -> impl Iterator<Item = &[S]> + '_ {
        self.hyperplanes.iter().map(|h| h.normal.as_slice())
    }

    /// Index of the hyperplane with the given (not necessarily canonical)
    /// normal.
    pub fn index_of(&self, normal: &[S]) -> Option<usize> {
        let c = canonicalize(normal.to_vec())?;
        self.index.get(&c).copied()
    }

    /// The set of canonical normals, for order-independent comparison.
    pub fn normal_set(&self) -> BTreeSet<Vec<S>> {
        self.hyperplanes.iter().map(|h| h.normal.clone()).collect()
    }

    pub fn same_hyperplanes(&self, other: &Self) -> bool {
        self.dim == other.dim && self.len() == other.len() && self.normal_set() == other.normal_set()
    }

    pub fn normal_matrix(&self) -> Matrix<S> {
        let rows: Vec<Vec<S>> = self.normals().map(<[S]>::to_vec).collect();
        Matrix::from_rows(&rows, self.dim)
    }

    /// `rk(A) = codim of the center`.
    pub fn rank(&self) -> usize {
        self.normal_matrix().rank()
    }

    pub fn rank_of(&self, indices: impl IntoIterator<Item = usize>) -> usize {
        let rows: Vec<Vec<S>> = indices.into_iter().map(|i| self.normal(i).to_vec()).collect();
        Matrix::from_rows(&rows, self.dim).rank()
    }

    pub fn subarrangement(&self, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut out = Self::empty(self.dim, self.field);
        for i in indices {
            out.push(self.hyperplanes[i].clone());
        }
        out
    }

    /// `A \ {H}` for the hyperplane at `index`.
    pub fn deletion(&self, index: usize) -> Self {
        self.subarrangement((0..self.len()).filter(|&j| j != index))
    }

    pub fn delete(&self, h: &Hyperplane<S>) -> Result<Self, ArrangementError> {
        let i = self.index_of(&h.normal).ok_or(ArrangementError::MissingHyperplane)?;
        Ok(self.deletion(i))
    }

    /// The flat `X = cap_{i in indices} H_i`.
    pub fn intersection(&self, indices: impl IntoIterator<Item = usize>) -> Flat<S> {
        let rows: Vec<Vec<S>> = indices.into_iter().map(|i| self.normal(i).to_vec()).collect();
        self.flat_from_rows(rows)
    }

    /// The flat cut out by the given forms; fails unless the forms span the
    /// forms of the hyperplanes containing it.
    pub fn flat(&self, forms: Vec<Vec<S>>) -> Result<Flat<S>, ArrangementError> {
        if forms.iter().any(|f| f.len() != self.dim) {
            return Err(ArrangementError::NotAFlat);
        }
        let x = self.flat_from_rows(forms);
        if self.rank_of(x.contains().ones()) != x.rank() {
            return Err(ArrangementError::NotAFlat);
        }
        Ok(x)
    }

    fn flat_from_rows(&self, rows: Vec<Vec<S>>) -> Flat<S> {
        let (forms, pivots) = rref_rows(rows, self.dim);
        let mut contains = FixedBitSet::with_capacity(self.len());
        let mut x = Flat::from_parts(self.dim, forms, pivots, FixedBitSet::new());
        for (i, n) in self.normals().enumerate() {
            if x.residual(n).iter().all(|c| c.is_zero()) {
                contains.insert(i);
            }
        }
        x.set_contains(contains);
        x
    }

    /// `A_X = {H : X subset H}`, same ambient space.
    pub fn localization(&self, x: &Flat<S>) -> Self {
        self.subarrangement(x.contains().ones())
    }

    /// `A^X = {H cap X : H not in A_X}` in the coordinates given by the free
    /// columns of `x`, together with the index in `A^X` of each `H` of `A`
    /// (`None` for `H` in `A_X`).
    pub fn restriction_with_map(&self, x: &Flat<S>) -> (Self, Vec<Option<usize>>) {
        let mut out = Self::empty(self.dim - x.rank(), self.field);
        let mut map = Vec::with_capacity(self.len());
        for n in self.normals() {
            let p = x.pullback(n);
            map.push(Hyperplane::new(p).map(|h| {
                let key = h.normal.clone();
                out.push(h);
                out.index[&key]
            }));
        }
        (out, map)
    }

    pub fn restriction(&self, x: &Flat<S>) -> Self {
        self.restriction_with_map(x).0
    }

    /// `A^H` for the hyperplane at `index`.
    pub fn restriction_to_hyperplane(&self, index: usize) -> Self {
        self.restriction(&self.intersection([index]))
    }

    /// `A1 x A2` in `V1 + V2`.
    pub fn product(&self, other: &Self) -> Result<Self, ArrangementError> {
        if self.field != other.field {
            return Err(ArrangementError::DifferentFields(self.field, other.field));
        }
        let dim = self.dim + other.dim;
        let mut out = Self::empty(dim, self.field);
        for n in self.normals() {
            let mut v = n.to_vec();
            v.resize(dim, S::zero());
            out.push(Hyperplane { normal: v });
        }
        for n in other.normals() {
            let mut v = vec![S::zero(); self.dim];
            v.extend(n.iter().cloned());
            out.push(Hyperplane { normal: v });
        }
        Ok(out)
    }

    /// Partition of the coordinates into blocks such that every normal is
    /// supported in a single block; blocks are minimal, sorted, and
    /// coordinates used by no normal form singleton blocks.
    pub fn coordinate_blocks(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            let mut j = i;
            while p[j] != r {
                let next = p[j];
                p[j] = r;
                j = next;
            }
            r
        }
        for n in self.normals() {
            let mut support = n.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, _)| j);
            if let Some(first) = support.next() {
                for j in support {
                    let (a, b) = (find(&mut parent, first), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for j in 0..self.dim {
            let r = find(&mut parent, j);
            let k = *slot.entry(r).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[k].push(j);
        }
        blocks
    }

    /// The factor of the arrangement supported on `block`, in the
    /// coordinates of `block`.
    pub fn block_factor(&self, block: &[usize]) -> Self {
        let mut out = Self::empty(block.len(), self.field);
        for n in self.normals() {
            if n.iter().enumerate().all(|(j, c)| c.is_zero() || block.contains(&j))
                && block.iter().any(|&j| !n[j].is_zero())
            {
                out.push(Hyperplane { normal: block.iter().map(|&j| n[j].clone()).collect() });
            }
        }
        out
    }

    /// Apply an invertible coordinate permutation: coordinate `j` moves to
    /// `perm[j]`.
    pub fn permute_coordinates(&self, perm: &[usize]) -> Self {
        let mut out = Self::empty(self.dim, self.field);
        for n in self.normals() {
            let mut v = vec![S::zero(); self.dim];
            for (j, c) in n.iter().enumerate() {
                v[perm[j]] = c.clone();
            }
            out.push(Hyperplane::new(v).expect("nonzero"));
        }
        out
    }

    pub fn lattice(&self) -> Result<Lattice<S>, LatticeError> {
        Lattice::build(self, LatticeOptions::default())
    }

    pub fn lattice_with(&self, opts: LatticeOptions) -> Result<Lattice<S>, LatticeError> {
        Lattice::build(self, opts)
    }

    /// `chi(A, t)` from the full intersection lattice.
    pub fn characteristic_polynomial(&self) -> Result<crate::exactmath::IntPoly, LatticeError> {
        self.characteristic_polynomial_with(LatticeOptions::default())
    }

    pub fn characteristic_polynomial_with(
        &self,
        opts: LatticeOptions,
    ) -> Result<crate::exactmath::IntPoly, LatticeError> {
        Ok(Lattice::build(self, LatticeOptions { max_rank: None, ..opts })?.characteristic_polynomial())
    }
}
