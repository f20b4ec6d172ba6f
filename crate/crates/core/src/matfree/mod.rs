//! MAT-steps, MAT-partitions and the restriction witnesses they produce.

mod search;

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::{canonicalize, Arrangement, Flat, LatticeError, LatticeOptions};
use crate::exactmath::{IntPoly, Scalar};

pub use search::{search_mat_partition, SearchOutcome, SearchStrategy, DEFAULT_NODE_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("block {block}: {violation}")]
    Violation { block: usize, violation: Violation },
    #[error("base exponents {0:?} do not match the ambient dimension")]
    BadBaseExponents(Vec<usize>),
    #[error("step exponents {steps:?} differ from dual-partition exponents {dual:?}")]
    DualMismatch { steps: Vec<usize>, dual: Vec<usize> },
    #[error("no subset of block {block} of size {q} yields a restriction with exponents {expected:?}")]
    Inconsistent { block: usize, q: usize, expected: Vec<usize> },
    #[error("partition search exceeded the cap of {0} nodes")]
    NodeCapExceeded(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// The first failed MAT condition of a step.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("empty block")]
    EmptyBlock,
    #[error("block of size {size} exceeds the multiplicity {multiplicity} of the top exponent {top}")]
    Multiplicity { size: usize, multiplicity: usize, top: usize },
    #[error("condition (1): added normals have rank {rank}, expected {size}")]
    Rank { rank: usize, size: usize },
    #[error("condition (2): the intersection of the block lies in hyperplane {hyperplane}")]
    Covered { hyperplane: usize },
    #[error("condition (3): hyperplane {hyperplane} gives count {count}, expected {expected}")]
    Count { hyperplane: usize, count: usize, expected: usize },
}

/// Record of one verified MAT-step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based block index.
    pub k: usize,
    pub rank_ok: bool,
    pub noncover_ok: bool,
    /// `|A_{k-1}| - |(A_{k-1} + H)^H|` for each added `H`, in block order.
    pub counts: Vec<usize>,
    /// Exponents of `A_k`.
    pub exponents: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseInfo {
    pub exponents: Vec<usize>,
    pub provenance: String,
    /// Hyperplane indices of the base arrangement.
    #[serde(default)]
    pub hyperplanes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatCertificate {
    pub partition: Vec<Vec<usize>>,
    pub steps: Vec<StepRecord>,
    pub exponents: Vec<usize>,
    pub base: BaseInfo,
}

impl MatCertificate {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.partition.iter().map(Vec::len).collect()
    }

    /// Hyperplanes of `A_k` (base plus the first `k` blocks).
    pub fn prefix(&self, k: usize) -> Vec<usize> {
        let mut v = self.base.hyperplanes.clone();
        for b in &self.partition[..k] {
            v.extend(b);
        }
        v
    }
}

/// `e_i = #{k : p_k >= dim - i + 1}` for `i = 1..dim`, ascending.
pub fn dual_partition_exponents(sizes: &[usize], dim: usize) -> Vec<usize> {
    (1..=dim).map(|i| sizes.iter().filter(|&&p| p + i > dim).count()).collect()
}

/// Echelon rows built incrementally; each new row is reduced against all
/// earlier ones, so reduction in insertion order is exact.
#[derive(Clone, Debug)]
pub(crate) struct Echelon<S> {
    rows: Vec<(Vec<S>, usize)>,
}

impl<S: Scalar> Echelon<S> {
    pub(crate) fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    pub(crate) fn reduce(&self, v: &[S]) -> Vec<S> {
        let mut r = v.to_vec();
        for (row, p) in &self.rows {
            if r[*p].is_zero() {
                continue;
            }
            let c = r[*p].clone();
            for (x, y) in r.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = x.clone() - c.clone() * y.clone();
                }
            }
        }
        r
    }

    pub(crate) fn spans(&self, v: &[S]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Add `v`; returns false (and leaves the span unchanged) if dependent.
    pub(crate) fn push(&mut self, v: &[S]) -> bool {
        match canonicalize(self.reduce(v)) {
            Some(r) => {
                let p = r.iter().position(|x| !x.is_zero()).unwrap();
                self.rows.push((r, p));
                true
            }
            None => false,
        }
    }

    pub(crate) fn pop(&mut self) {
        self.rows.pop();
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// `|B| - |(B + H)^H|` for the hyperplanes `base` of `a` and `H = a[h]`.
pub(crate) fn restriction_count<S: Scalar>(a: &Arrangement<S>, base: &[usize], h: usize) -> usize {
    let mut e = Echelon::new();
    e.push(a.normal(h));
    let distinct: HashSet<Vec<S>> = base
        .iter()
        .filter_map(|&b| canonicalize(e.reduce(a.normal(b))))
        .collect();
    base.len() - distinct.len()
}

/// Top exponent and its multiplicity.
fn top_exponent(exps: &[usize]) -> (usize, usize) {
    let e = exps.iter().copied().max().unwrap_or(0);
    (e, exps.iter().filter(|&&x| x == e).count())
}

/// Check that `base + added` is an MAT-step over a free `base` with the
/// given exponents; returns the per-hyperplane counts and the new exponents.
pub fn verify_mat_step<S: Scalar>(
    a: &Arrangement<S>,
    base: &[usize],
    base_exponents: &[usize],
    added: &[usize],
) -> Result<(Vec<usize>, Vec<usize>), Violation> {
    let q = added.len();
    if q == 0 {
        return Err(Violation::EmptyBlock);
    }
    let (e, p) = top_exponent(base_exponents);
    if q > p {
        return Err(Violation::Multiplicity { size: q, multiplicity: p, top: e });
    }
    let mut span = Echelon::new();
    for &h in added {
        span.push(a.normal(h));
    }
    if span.rank() != q {
        return Err(Violation::Rank { rank: span.rank(), size: q });
    }
    if let Some(&h) = base.iter().find(|&&b| span.spans(a.normal(b))) {
        return Err(Violation::Covered { hyperplane: h });
    }
    let counts: Vec<usize> = added.par_iter().map(|&h| restriction_count(a, base, h)).collect();
    if let Some((i, &c)) = counts.iter().enumerate().find(|(_, &c)| c != e) {
        return Err(Violation::Count { hyperplane: added[i], count: c, expected: e });
    }
    let mut exps = base_exponents.to_vec();
    exps.sort_unstable();
    let l = exps.len();
    for x in &mut exps[l - q..] {
        *x = e + 1;
    }
    Ok((counts, exps))
}

fn check_partition(n: usize, base: &[usize], partition: &[Vec<usize>]) -> Result<(), MatError> {
    let mut seen = vec![false; n];
    for &b in base {
        if b >= n || std::mem::replace(&mut seen[b], true) {
            return Err(MatError::InvalidPartition(format!("base hyperplane {b} out of range or repeated")));
        }
    }
    for (k, block) in partition.iter().enumerate() {
        for &h in block {
            if h >= n {
                return Err(MatError::InvalidPartition(format!("hyperplane {h} out of range")));
            }
            if std::mem::replace(&mut seen[h], true) {
                return Err(MatError::InvalidPartition(format!("hyperplane {h} repeated in block {}", k + 1)));
            }
        }
    }
    if let Some(h) = seen.iter().position(|s| !s) {
        return Err(MatError::InvalidPartition(format!("hyperplane {h} not covered")));
    }
    Ok(())
}

/// Fold MAT-steps over `partition`, starting from the free subarrangement
/// `base` whose exponents are trusted as given.
pub fn certify_from_free_base<S: Scalar>(
    a: &Arrangement<S>,
    base: &[usize],
    base_exponents: &[usize],
    provenance: &str,
    partition: &[Vec<usize>],
) -> Result<MatCertificate, MatError> {
    if base_exponents.len() != a.dim() {
        return Err(MatError::BadBaseExponents(base_exponents.to_vec()));
    }
    check_partition(a.len(), base, partition)?;
    let mut current: Vec<usize> = base.to_vec();
    let mut exps: Vec<usize> = base_exponents.to_vec();
    exps.sort_unstable();
    let mut steps = Vec::with_capacity(partition.len());
    for (k, block) in partition.iter().enumerate() {
        let (counts, next) = verify_mat_step(a, &current, &exps, block)
            .map_err(|violation| MatError::Violation { block: k + 1, violation })?;
        exps = next;
        current.extend(block);
        steps.push(StepRecord { k: k + 1, rank_ok: true, noncover_ok: true, counts, exponents: exps.clone() });
    }
    let mut base_exps = base_exponents.to_vec();
    base_exps.sort_unstable();
    Ok(MatCertificate {
        partition: partition.to_vec(),
        steps,
        exponents: exps,
        base: BaseInfo { exponents: base_exps, provenance: provenance.to_string(), hyperplanes: base.to_vec() },
    })
}

/// Certify a MAT-partition of the whole arrangement, built from the empty
/// arrangement; the step exponents are cross-checked against the dual
/// partition of the block sizes.
pub fn certify_partition<S: Scalar>(
    a: &Arrangement<S>,
    partition: &[Vec<usize>],
) -> Result<MatCertificate, MatError> {
    let zeros = vec![0; a.dim()];
    let cert = certify_from_free_base(a, &[], &zeros, "empty arrangement", partition)?;
    let dual = dual_partition_exponents(&cert.block_sizes(), a.dim());
    if dual != cert.exponents {
        return Err(MatError::DualMismatch { steps: cert.exponents, dual });
    }
    Ok(cert)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Evidence {
    /// Freeness with the stated exponents follows from a verified
    /// certificate (MAT-steps or a supersolvable chain).
    CertifiedFree,
    /// Only the characteristic polynomial was checked.
    CharpolyConsistent,
}

/// A flat whose restriction has a prescribed exponent prefix.
#[derive(Debug, Clone)]
pub struct Witness<S> {
    /// 1-based block index the subset was drawn from; `0` for the whole
    /// space of an empty partition.
    pub block: usize,
    /// Hyperplane indices `C`; the flat is their intersection.
    pub subset: Vec<usize>,
    pub flat: Flat<S>,
    pub exponents: Vec<usize>,
    pub evidence: Evidence,
}

/// `prod (t - e)`
pub fn polynomial_from_exponents(exps: &[usize]) -> IntPoly {
    IntPoly::from_roots(exps.iter().map(|&e| e as i64))
}

/// Lexicographic `q`-subsets of `items`.
pub(crate) fn for_each_subset<T: Copy, R>(
    items: &[T],
    q: usize,
    mut f: impl FnMut(&[T]) -> Option<R>,
) -> Option<R> {
    fn go<T: Copy, R>(
        items: &[T],
        q: usize,
        start: usize,
        cur: &mut Vec<T>,
        f: &mut impl FnMut(&[T]) -> Option<R>,
    ) -> Option<R> {
        if cur.len() == q {
            return f(cur);
        }
        let need = q - cur.len();
        for i in start..=items.len().saturating_sub(need) {
            if items.len() < need {
                break;
            }
            cur.push(items[i]);
            if let Some(r) = go(items, q, i + 1, cur, f) {
                return Some(r);
            }
            cur.pop();
        }
        None
    }
    go(items, q, 0, &mut Vec::with_capacity(q), &mut f)
}

/// Search `C subset pi_k` of size `q` (lexicographic in ascending hyperplane
/// order) such that `chi(A^X) = prod_{i <= dim - q} (t - e_i)` for
/// `X = cap C`.
///
/// A candidate with `|A^X| = |(A_k)^X|` is accepted without a lattice: the
/// restriction of the MAT-step `A_k` to `X` is free with the required
/// exponents, and it equals `A^X`.
pub fn block_witness<S: Scalar>(
    cert: &MatCertificate,
    a: &Arrangement<S>,
    k: usize,
    q: usize,
    opts: LatticeOptions,
) -> Result<Option<Witness<S>>, MatError> {
    let l = a.dim();
    let expected: Vec<usize> = cert.exponents[..l - q].to_vec();
    let step_prefix_ok = cert.steps[k - 1].exponents[..l - q] == expected[..];
    let target = polynomial_from_exponents(&expected);
    let ak = cert.prefix(k);
    let mut block = cert.partition[k - 1].clone();
    block.sort_unstable();
    let mut err = None;
    let found = for_each_subset(&block, q, |c| {
        let x = a.intersection(c.iter().copied());
        if x.rank() != q {
            return None;
        }
        let restricted = a.restriction(&x);
        let from_ak: HashSet<Vec<S>> = ak
            .iter()
            .filter(|&&h| !x.contains_hyperplane(h))
            .filter_map(|&h| canonicalize(x.pullback(a.normal(h))))
            .collect();
        let evidence = if step_prefix_ok && from_ak.len() == restricted.len() {
            Evidence::CertifiedFree
        } else {
            match restricted.characteristic_polynomial_with(opts) {
                Ok(chi) if chi == target => Evidence::CharpolyConsistent,
                Ok(_) => return None,
                Err(e) => {
                    err = Some(e);
                    return Some(None);
                }
            }
        };
        Some(Some(Witness { block: k, subset: c.to_vec(), flat: x, exponents: expected.clone(), evidence }))
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(found.flatten())
}

/// For every `k` and `p_{k+1} <= q <= p_k`, a witness of dimension
/// `dim - q`; keyed by dimension, keeping the smallest `k` per dimension.
pub fn accuracy_witnesses<S: Scalar>(
    cert: &MatCertificate,
    a: &Arrangement<S>,
    opts: LatticeOptions,
) -> Result<BTreeMap<usize, Witness<S>>, MatError> {
    let sizes = cert.block_sizes();
    let n = sizes.len();
    let mut pairs = Vec::new();
    let mut covered = HashSet::new();
    if n == 0 {
        pairs.push((0, 0));
    }
    for k in 1..=n {
        let lo = if k < n { sizes[k] } else { 0 };
        for q in (lo..=sizes[k - 1]).rev() {
            if covered.insert(q) {
                pairs.push((k, q));
            }
        }
    }
    let results: Vec<_> = pairs
        .par_iter()
        .map(|&(k, q)| {
            if q == 0 {
                let v = a.intersection([]);
                let w = Witness {
                    block: k,
                    subset: Vec::new(),
                    flat: v,
                    exponents: cert.exponents.clone(),
                    evidence: Evidence::CertifiedFree,
                };
                return Ok((q, w));
            }
            match block_witness(cert, a, k, q, opts)? {
                Some(w) => Ok((q, w)),
                None => Err(MatError::Inconsistent {
                    block: k,
                    q,
                    expected: cert.exponents[..a.dim() - q].to_vec(),
                }),
            }
        })
        .collect();
    let mut out = BTreeMap::new();
    for r in results {
        let (q, w) = r?;
        out.insert(a.dim() - q, w);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::Arrangement;
    use crate::exactmath::{Field, Rational};
    use crate::rootsys::RootSystem;

    fn q_arr(dim: usize, rows: &[&[i64]]) -> Arrangement<Rational> {
        Arrangement::new(
            dim,
            Field::Rational,
            rows.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect(),
        )
        .unwrap()
    }

    fn weyl(t: &str) -> (RootSystem, Arrangement<Rational>, Vec<Vec<usize>>) {
        let rs = RootSystem::new(t.parse().unwrap());
        let a = rs.weyl_arrangement();
        let p = rs.root_height_partition(&rs.full_ideal());
        (rs, a, p)
    }

    #[test]
    fn dual_partitions() {
        assert_eq!(dual_partition_exponents(&[2, 1], 3), vec![0, 1, 2]);
        assert_eq!(dual_partition_exponents(&[2, 1, 1, 1, 1], 2), vec![1, 5]);
        assert_eq!(dual_partition_exponents(&[], 2), vec![0, 0]);
    }

    #[test]
    fn first_step_from_empty() {
        let a = q_arr(2, &[&[1, 0], &[0, 1]]);
        let (counts, exps) = verify_mat_step(&a, &[], &[0, 0], &[0, 1]).unwrap();
        assert_eq!(counts, vec![0, 0]);
        assert_eq!(exps, vec![1, 1]);
    }

    #[test]
    fn a2_height_two_step() {
        let (_, a, p) = weyl("A2");
        let (counts, exps) = verify_mat_step(&a, &p[0], &[0, 1, 1], &p[1]).unwrap();
        assert_eq!(counts, vec![1]);
        assert_eq!(exps, vec![0, 1, 2]);
    }

    #[test]
    fn generic_fourth_plane_fails_condition_three() {
        // braid A2 with exponents (0,1,2) plus x1 + 2x2 - 5x3: restricting
        // the three braid planes to it leaves three distinct lines.
        let a = q_arr(3, &[&[1, -1, 0], &[0, 1, -1], &[1, 0, -1], &[1, 2, -5]]);
        let v = verify_mat_step(&a, &[0, 1, 2], &[0, 1, 2], &[3]).unwrap_err();
        assert_eq!(v, Violation::Count { hyperplane: 3, count: 0, expected: 2 });
    }

    #[test]
    fn weyl_height_partitions_certify() {
        let (_, a, p) = weyl("A2");
        assert_eq!(certify_partition(&a, &p).unwrap().exponents, vec![0, 1, 2]);
        let (_, a, p) = weyl("G2");
        let cert = certify_partition(&a, &p).unwrap();
        assert_eq!(cert.exponents, vec![1, 5]);
        assert_eq!(cert.steps.len(), 5);
    }

    #[test]
    fn single_block_braid_fails_rank() {
        let (_, a, _) = weyl("A2");
        let err = certify_partition(&a, &[vec![0, 1, 2]]).unwrap_err();
        assert_eq!(err, MatError::Violation { block: 1, violation: Violation::Rank { rank: 2, size: 3 } });
    }

    #[test]
    fn wrong_base_exponents_fail_condition_three() {
        let a = q_arr(3, &[&[1, -1, 0], &[0, 1, -1], &[1, 0, -1], &[1, 1, -2]]);
        // x1 + x2 - 2x3 contains the center line, so all three braid planes
        // restrict to one line: count 2, not the claimed top exponent 1.
        let err = certify_from_free_base(&a, &[0, 1, 2], &[1, 1, 1], "deliberately wrong", &[vec![3]]).unwrap_err();
        assert!(matches!(
            err,
            MatError::Violation { block: 1, violation: Violation::Count { expected: 1, .. } }
        ));
    }

    #[test]
    fn partition_validation() {
        let (_, a, _) = weyl("A2");
        assert!(matches!(certify_partition(&a, &[vec![0, 1]]), Err(MatError::InvalidPartition(_))));
        assert!(matches!(
            certify_partition(&a, &[vec![0, 1], vec![1, 2]]),
            Err(MatError::InvalidPartition(_))
        ));
    }

    #[test]
    fn block_permutation_invariance() {
        let (_, a, p) = weyl("B3");
        let c1 = certify_partition(&a, &p).unwrap();
        let rev: Vec<Vec<usize>> = p.iter().map(|b| b.iter().rev().copied().collect()).collect();
        let c2 = certify_partition(&a, &rev).unwrap();
        assert_eq!(c1.exponents, c2.exponents);
    }

    #[test]
    fn witnesses_for_small_weyl_arrangements() {
        let (_, a, p) = weyl("A2");
        let cert = certify_partition(&a, &p).unwrap();
        let w = accuracy_witnesses(&cert, &a, LatticeOptions::default()).unwrap();
        assert_eq!(w.keys().copied().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(w[&2].subset, vec![0]);
        assert_eq!(w[&2].exponents, vec![0, 1]);
        assert_eq!(w[&3].exponents, vec![0, 1, 2]);
        assert!(w[&3].subset.is_empty());

        let (_, a, p) = weyl("G2");
        let cert = certify_partition(&a, &p).unwrap();
        let top = block_witness(&cert, &a, 5, 1, LatticeOptions::default()).unwrap().unwrap();
        assert_eq!(top.subset, vec![5]);
        assert_eq!(top.exponents, vec![1]);
        let w = accuracy_witnesses(&cert, &a, LatticeOptions::default()).unwrap();
        assert_eq!(w.keys().copied().collect::<Vec<_>>(), vec![0, 1, 2]);
        for wit in w.values() {
            let chi = a.restriction(&wit.flat).characteristic_polynomial().unwrap();
            assert_eq!(chi, polynomial_from_exponents(&wit.exponents));
        }
    }
}
