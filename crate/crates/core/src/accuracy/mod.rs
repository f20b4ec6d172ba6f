//! Accuracy and almost accuracy of free arrangements.
//!
//! A free arrangement with exponents `e_1 <= .. <= e_l` is accurate if for
//! every dimension `d` some flat `X` of dimension `d` has `A^X` free with
//! exponents `(e_1, .., e_d)`; almost accurate if `exp(A^X)` is merely a
//! sub-multiset of `exp(A)`.
//!
//! Dimensions below the dimension of the center carry no flats and are not
//! reported: the prefix there consists of zeros and is vacuous.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::{Arrangement, Flat, FlatId, Lattice, LatticeError, LatticeOptions};
use crate::exactmath::Scalar;
use crate::matfree::{Evidence, Witness};

/// Cap on the lattice of a restriction built only to look for a
/// supersolvable certificate.
pub const UPGRADE_MAX_FLATS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accurate,
    NotAccurate,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Almost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    WitnessFirst,
    Exhaustive,
}

/// A proposed witness for one dimension, e.g. from a MAT certificate.
#[derive(Debug, Clone)]
pub struct WitnessHint<S> {
    pub flat: Flat<S>,
    pub exponents: Vec<usize>,
    pub evidence: Evidence,
}

impl<S: Scalar> From<Witness<S>> for WitnessHint<S> {
    fn from(w: Witness<S>) -> Self {
        WitnessHint { flat: w.flat, exponents: w.exponents, evidence: w.evidence }
    }
}

#[derive(Debug, Clone)]
pub struct DimensionEntry<S> {
    pub d: usize,
    pub witness: Option<Flat<S>>,
    /// Restriction exponents of the witness, if any.
    pub exponents: Option<Vec<usize>>,
    pub evidence: Option<Evidence>,
    /// Every flat of this dimension was examined.
    pub scanned: bool,
}

#[derive(Debug, Clone)]
pub struct AccuracyReport<S> {
    pub verdict: Verdict,
    pub mode: Mode,
    pub dimensions: Vec<DimensionEntry<S>>,
    /// Set when the lattice cap cut the check short.
    pub cap_error: Option<LatticeError>,
}

impl<S> AccuracyReport<S> {
    pub fn is_accurate(&self) -> bool {
        self.verdict == Verdict::Accurate
    }

    pub fn failing_dimensions(&self) -> Vec<usize> {
        self.dimensions.iter().filter(|e| e.witness.is_none()).map(|e| e.d).collect()
    }
}

/// Sorted nonnegative integer roots of `chi(A^X, t)`, or `None` if it does
/// not split that way (then `A^X` is not free).
pub fn restriction_exponent_candidates<S: Scalar>(
    a: &Arrangement<S>,
    x: &Flat<S>,
    opts: LatticeOptions,
) -> Result<Option<Vec<usize>>, LatticeError> {
    let chi = a.restriction(x).characteristic_polynomial_with(opts)?;
    Ok(roots_as_exponents(&chi))
}

fn roots_as_exponents(chi: &crate::exactmath::IntPoly) -> Option<Vec<usize>> {
    chi.nonnegative_integer_roots().map(|r| r.into_iter().map(|e| e as usize).collect())
}

/// Candidate exponents of `A^X` for every flat `X` of the given rank, from
/// the interval polynomials of a complete lattice.
pub fn rank_candidates<S: Scalar>(lattice: &Lattice<S>, rank: usize) -> Vec<(FlatId, Option<Vec<usize>>)> {
    lattice
        .ids_at_rank(rank)
        .into_par_iter()
        .map(|x| (x, roots_as_exponents(&lattice.restriction_characteristic_polynomial(x))))
        .collect()
}

/// Flats of dimension `d` whose restriction candidates equal the exact
/// prefix `(e_1, .., e_d)`.
pub fn scan_unique_witnesses<S: Scalar>(lattice: &Lattice<S>, exponents: &[usize], d: usize) -> Vec<FlatId> {
    let mut e = exponents.to_vec();
    e.sort_unstable();
    let rank = lattice.dim() - d;
    rank_candidates(lattice, rank)
        .into_iter()
        .filter(|(_, c)| c.as_deref() == Some(&e[..d]))
        .map(|(x, _)| x)
        .collect()
}

fn is_submultiset(small: &[usize], big: &[usize]) -> bool {
    let mut count: BTreeMap<usize, isize> = BTreeMap::new();
    for &b in big {
        *count.entry(b).or_default() += 1;
    }
    small.iter().all(|s| {
        let c = count.entry(*s).or_default();
        *c -= 1;
        *c >= 0
    })
}

fn matches(mode: Mode, found: &[usize], exponents: &[usize], d: usize) -> bool {
    found.len() == d
        && match mode {
            Mode::Exact => found == &exponents[..d],
            Mode::Almost => is_submultiset(found, exponents),
        }
}

/// `CertifiedFree` if `A^X` is supersolvable with the given exponents.
fn upgrade<S: Scalar>(a: &Arrangement<S>, x: &Flat<S>, exps: &[usize]) -> Evidence {
    let opts = LatticeOptions { max_rank: None, max_flats: UPGRADE_MAX_FLATS };
    match a.restriction(x).lattice_with(opts) {
        Ok(l) => match l.supersolvable_certificate() {
            Some(c) if c.exponents == exps => Evidence::CertifiedFree,
            _ => Evidence::CharpolyConsistent,
        },
        Err(_) => Evidence::CharpolyConsistent,
    }
}

/// Check (almost) accuracy against the given exponents.
///
/// `witness_first` accepts a hint for a dimension when its exponents match;
/// other dimensions, and every dimension under `exhaustive`, are settled by
/// scanning all flats of that dimension, reporting the least one by echelon
/// key. A dimension with no matching flat makes the verdict `not_accurate`.
pub fn check_accuracy<S: Scalar>(
    a: &Arrangement<S>,
    exponents: &[usize],
    mode: Mode,
    strategy: Strategy,
    hints: &BTreeMap<usize, WitnessHint<S>>,
    opts: LatticeOptions,
) -> AccuracyReport<S> {
    let l = a.dim();
    let mut exps = exponents.to_vec();
    exps.sort_unstable();
    let lowest = (l - a.rank()).max(1);
    let mut lattice: Option<Lattice<S>> = None;
    let mut dimensions = Vec::new();
    let mut cap_error = None;

    for d in lowest..=l {
        if strategy == Strategy::WitnessFirst {
            if let Some(h) = hints.get(&d) {
                if h.flat.dim() == d && matches(mode, &h.exponents, &exps, d) {
                    dimensions.push(DimensionEntry {
                        d,
                        witness: Some(h.flat.clone()),
                        exponents: Some(h.exponents.clone()),
                        evidence: Some(h.evidence),
                        scanned: false,
                    });
                    continue;
                }
            }
        }
        if lattice.is_none() {
            match a.lattice_with(LatticeOptions { max_rank: None, ..opts }) {
                Ok(lat) => lattice = Some(lat),
                Err(e) => {
                    cap_error = Some(e);
                    break;
                }
            }
        }
        let lat = lattice.as_ref().unwrap();
        let found = rank_candidates(lat, l - d)
            .into_iter()
            .find(|(_, c)| c.as_deref().is_some_and(|c| matches(mode, c, &exps, d)));
        let entry = match found {
            Some((x, Some(c))) => {
                let flat = lat.flat(x).clone();
                let hinted = hints.get(&d).is_some_and(|h| h.flat.contains() == flat.contains()
                    && h.evidence == Evidence::CertifiedFree
                    && h.exponents == c);
                let evidence = if hinted { Evidence::CertifiedFree } else { upgrade(a, &flat, &c) };
                DimensionEntry { d, witness: Some(flat), exponents: Some(c), evidence: Some(evidence), scanned: true }
            }
            _ => DimensionEntry { d, witness: None, exponents: None, evidence: None, scanned: true },
        };
        dimensions.push(entry);
    }

    let verdict = if dimensions.iter().any(|e| e.scanned && e.witness.is_none()) {
        Verdict::NotAccurate
    } else if cap_error.is_some() {
        Verdict::Inconclusive
    } else {
        Verdict::Accurate
    };
    AccuracyReport { verdict, mode, dimensions, cap_error }
}
