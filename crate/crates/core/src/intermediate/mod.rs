//! Intermediate arrangements
//! `A^k_l(r): x_1 .. x_k prod_{i<j, 0<=n<r} (x_i - zeta^n x_j)` over
//! `Q(zeta_r)`, between the reflection arrangements of `G(r,r,l)` (`k = 0`)
//! and `G(r,1,l)` (`k = l`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::accuracy::{check_accuracy, AccuracyReport, Mode, Strategy};
use crate::arrangement::{Arrangement, LatticeError, LatticeOptions};
use crate::exactmath::{Cyclotomic, Field};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntermediateError {
    #[error("invalid label l={l}, r={r}, k={k}: need l >= 2, r >= 2, 0 <= k <= l")]
    InvalidLabel { l: usize, r: usize, k: usize },
    #[error("({l}, {r}) exceeds the brute-force caps l <= {max_l}, r <= {max_r}")]
    BeyondCaps { l: usize, r: usize, max_l: usize, max_r: usize },
    #[error("the localization example needs l >= 4 and r >= l - 1, got l={l}, r={r}")]
    Precondition { l: usize, r: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Brute-force caps on `l` and `r`.
pub const BRUTE_MAX_L: usize = 5;
pub const BRUTE_MAX_R: usize = 4;

/// `(l, r, k)`; restriction labels may reach `l = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    pub l: usize,
    pub r: usize,
    pub k: usize,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A^{}_{}({})", self.k, self.l, self.r)
    }
}

impl Label {
    pub fn new(l: usize, r: usize, k: usize) -> Result<Self, IntermediateError> {
        if l < 2 || r < 2 || k > l {
            return Err(IntermediateError::InvalidLabel { l, r, k });
        }
        Ok(Label { l, r, k })
    }

    /// `k + r l (l - 1) / 2`.
    pub fn hyperplane_count(&self) -> usize {
        self.k + self.r * self.l * (self.l - 1) / 2
    }

    /// `(1, r + 1, .., (l - 2) r + 1, (l - 1) r - l + k + 1)`, sorted.
    pub fn exponents(&self) -> Vec<usize> {
        let (l, r, k) = (self.l, self.r, self.k);
        let mut e: Vec<usize> = (0..l - 1).map(|i| i * r + 1).collect();
        e.push((l - 1) * r + k + 1 - l);
        e.sort_unstable();
        e
    }
}

/// Hyperplane classes of the restriction table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperplaneClass {
    /// `k = 0` or `k = l`: every hyperplane.
    Arbitrary,
    /// `x_i - zeta^n x_j`, `i < j <= k`.
    DifferenceBelow,
    /// `x_i - zeta^n x_j`, `i <= k < j`.
    DifferenceSplit,
    /// `x_i - zeta^n x_j`, `k < i < j`.
    DifferenceAbove,
    /// `x_i`.
    Coordinate,
}

/// The rows of the restriction table applicable to `label`.
pub fn restriction_types(label: Label) -> Vec<(HyperplaneClass, Label)> {
    let Label { l, r, k } = label;
    let at = |k| Label { l: l - 1, r, k };
    if k == 0 {
        return vec![(HyperplaneClass::Arbitrary, at(1))];
    }
    if k == l {
        return vec![(HyperplaneClass::Arbitrary, at(l - 1))];
    }
    let mut rows = Vec::new();
    if k >= 2 {
        rows.push((HyperplaneClass::DifferenceBelow, at(k - 1)));
    }
    rows.push((HyperplaneClass::DifferenceSplit, at(k)));
    if k + 2 <= l {
        rows.push((HyperplaneClass::DifferenceAbove, at(k + 1)));
    }
    rows.push((HyperplaneClass::Coordinate, at(l - 1)));
    rows
}

/// Class of a hyperplane of `A^k_l(r)` from the support of its normal.
pub fn hyperplane_class(label: Label, normal: &[Cyclotomic]) -> HyperplaneClass {
    if label.k == 0 || label.k == label.l {
        return HyperplaneClass::Arbitrary;
    }
    let support: Vec<usize> = (0..normal.len()).filter(|&i| !normal[i].is_zero()).map(|i| i + 1).collect();
    match support[..] {
        [_] => HyperplaneClass::Coordinate,
        [_, j] if j <= label.k => HyperplaneClass::DifferenceBelow,
        [i, _] if i <= label.k => HyperplaneClass::DifferenceSplit,
        _ => HyperplaneClass::DifferenceAbove,
    }
}

/// Labels of all restrictions to flats of each dimension `1..=l`, from
/// chains of hyperplane restrictions.
pub fn reachable_labels(label: Label) -> BTreeMap<usize, BTreeSet<Label>> {
    let mut out = BTreeMap::new();
    let mut current: BTreeSet<Label> = [label].into();
    out.insert(label.l, current.clone());
    while let Some(&any) = current.iter().next() {
        if any.l < 2 {
            break;
        }
        current = current.iter().flat_map(|&x| restriction_types(x).into_iter().map(|(_, y)| y)).collect();
        out.insert(any.l - 1, current.clone());
    }
    out
}

/// Per dimension, whether some reachable restriction has exactly the
/// exponent prefix.
pub fn symbolic_accuracy_by_dimension(label: Label) -> BTreeMap<usize, bool> {
    let e = label.exponents();
    reachable_labels(label)
        .into_iter()
        .map(|(d, labels)| (d, labels.iter().any(|x| x.exponents() == e[..d])))
        .collect()
}

pub fn symbolic_accuracy(label: Label) -> bool {
    symbolic_accuracy_by_dimension(label).values().all(|&b| b)
}

/// Closed form: for `1 <= k <= l - 1` accurate iff `r = 2` or `r + k >= l`;
/// `k = 0` is `G(r,r,l)`, accurate iff `r = 2` or `l = 2`; `k = l` is
/// `G(r,1,l)`, always accurate.
pub fn closed_form_accuracy(label: Label) -> bool {
    let Label { l, r, k } = label;
    if k == 0 {
        r == 2 || l == 2
    } else if k == l {
        true
    } else {
        r == 2 || r + k >= l
    }
}

fn unit(dim: usize, i: usize) -> Vec<Cyclotomic> {
    let mut v = vec![Cyclotomic::zero(); dim];
    v[i] = Cyclotomic::one();
    v
}

/// `k` coordinate hyperplanes, then `x_i - zeta^n x_j` by `(i, j, n)`.
pub fn build_intermediate(label: Label) -> Arrangement<Cyclotomic> {
    let Label { l, r, k } = label;
    let mut normals: Vec<Vec<Cyclotomic>> = (0..k).map(|i| unit(l, i)).collect();
    for i in 0..l {
        for j in i + 1..l {
            for n in 0..r {
                let mut v = unit(l, i);
                v[j] = -Cyclotomic::zeta_pow(r as u32, n as u32);
                normals.push(v);
            }
        }
    }
    Arrangement::new(l, Field::Cyclotomic { order: r as u32 }, normals).expect("intermediate normals are distinct")
}

fn check_caps(label: Label) -> Result<(), IntermediateError> {
    if label.l > BRUTE_MAX_L || label.r > BRUTE_MAX_R {
        return Err(IntermediateError::BeyondCaps { l: label.l, r: label.r, max_l: BRUTE_MAX_L, max_r: BRUTE_MAX_R });
    }
    Ok(())
}

/// One hyperplane restriction computed on the cyclotomic side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionRecord {
    pub hyperplane: usize,
    pub class: HyperplaneClass,
    pub size: usize,
    /// Roots of the characteristic polynomial, if it splits.
    pub exponents: Option<Vec<usize>>,
}

/// Restrict to every hyperplane and factor the characteristic polynomial.
pub fn bruteforce_hyperplane_restrictions(
    label: Label,
    opts: LatticeOptions,
) -> Result<Vec<RestrictionRecord>, IntermediateError> {
    check_caps(label)?;
    let a = build_intermediate(label);
    (0..a.len())
        .into_par_iter()
        .map(|h| {
            let res = a.restriction_to_hyperplane(h);
            let chi = res.characteristic_polynomial_with(opts)?;
            Ok(RestrictionRecord {
                hyperplane: h,
                class: hyperplane_class(label, a.normal(h)),
                size: res.len(),
                exponents: chi.nonnegative_integer_roots().map(|v| v.into_iter().map(|e| e as usize).collect()),
            })
        })
        .collect()
}

/// Full accuracy check of the built arrangement against the formula
/// exponents.
pub fn bruteforce_accuracy(label: Label, opts: LatticeOptions) -> Result<AccuracyReport<Cyclotomic>, IntermediateError> {
    check_caps(label)?;
    let a = build_intermediate(label);
    let r = check_accuracy(&a, &label.exponents(), Mode::Exact, Strategy::Exhaustive, &BTreeMap::new(), opts);
    if let Some(e) = r.cap_error.clone() {
        return Err(e.into());
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub l: usize,
    pub r: usize,
    /// `A_X` equals `A^0_{l-1}(r)` on the coordinates `2..=l`.
    pub localization_matches: bool,
    pub localization_size: usize,
    pub arrangement_accurate: bool,
    pub localization_accurate: bool,
}

/// `A = A^1_l(r)` and `X = cap_{2 <= i < j} ker(x_i - zeta^n x_j)`: compares
/// `A_X` with `A^0_{l-1}(r)` and checks both by brute force.
pub fn localization_fixture_check(l: usize, r: usize, opts: LatticeOptions) -> Result<LocalizationReport, IntermediateError> {
    if l < 4 || r + 1 < l {
        return Err(IntermediateError::Precondition { l, r });
    }
    let label = Label::new(l, r, 1)?;
    check_caps(label)?;
    let a = build_intermediate(label);
    let inner: Vec<usize> = (0..a.len()).filter(|&h| a.normal(h)[0].is_zero() && hyperplane_class(label, a.normal(h)) != HyperplaneClass::Coordinate).collect();
    let x = a.intersection(inner);
    let loc = a.localization(&x);

    let small = build_intermediate(Label::new(l - 1, r, 0)?);
    let lifted: Vec<Vec<Cyclotomic>> = small
        .normals()
        .map(|v| std::iter::once(Cyclotomic::zero()).chain(v.iter().cloned()).collect())
        .collect();
    let lifted = Arrangement::new(l, a.field(), lifted).expect("lifted normals are valid");
    let localization_matches = loc.same_hyperplanes(&lifted);

    let arrangement_accurate =
        check_accuracy(&a, &label.exponents(), Mode::Exact, Strategy::Exhaustive, &BTreeMap::new(), opts);
    let mut loc_exps = vec![0];
    loc_exps.extend(small_exponents(l - 1, r));
    let localization_accurate = check_accuracy(&loc, &loc_exps, Mode::Exact, Strategy::Exhaustive, &BTreeMap::new(), opts);
    if let Some(e) = arrangement_accurate.cap_error.as_ref().or(localization_accurate.cap_error.as_ref()) {
        return Err(e.clone().into());
    }
    Ok(LocalizationReport {
        l,
        r,
        localization_matches,
        localization_size: loc.len(),
        arrangement_accurate: arrangement_accurate.is_accurate(),
        localization_accurate: localization_accurate.is_accurate(),
    })
}

fn small_exponents(l: usize, r: usize) -> Vec<usize> {
    Label { l, r, k: 0 }.exponents()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(l: usize, r: usize, k: usize) -> Label {
        Label::new(l, r, k).unwrap()
    }

    #[test]
    fn exponents_and_counts() {
        assert_eq!(lab(5, 3, 1).exponents(), vec![1, 4, 7, 9, 10]);
        assert_eq!(lab(4, 3, 0).exponents(), vec![1, 4, 6, 7]);
        assert_eq!(lab(2, 2, 1).exponents(), vec![1, 2]);
        assert_eq!(lab(5, 3, 1).hyperplane_count(), 31);
        assert_eq!(build_intermediate(lab(5, 3, 1)).len(), 31);
        assert_eq!(build_intermediate(lab(3, 2, 3)).len(), 9);
        for l in 2..7 {
            for r in 2..6 {
                for k in 0..=l {
                    let x = lab(l, r, k);
                    assert_eq!(x.exponents().iter().sum::<usize>(), x.hyperplane_count());
                }
            }
        }
        assert!(Label::new(1, 2, 0).is_err());
        assert!(Label::new(3, 1, 0).is_err());
        assert!(Label::new(3, 2, 4).is_err());
    }

    #[test]
    fn a022_is_two_lines() {
        let a = build_intermediate(lab(2, 2, 0));
        let one = Cyclotomic::one();
        assert!(a.index_of(&[one.clone(), -one.clone()]).is_some());
        assert!(a.index_of(&[one.clone(), one]).is_some());
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn table_rows() {
        let at = |k| lab(4, 3, k);
        assert_eq!(restriction_types(lab(5, 3, 0)), vec![(HyperplaneClass::Arbitrary, Label { l: 4, r: 3, k: 1 })]);
        assert_eq!(restriction_types(lab(5, 3, 5)), vec![(HyperplaneClass::Arbitrary, at(4))]);
        let labels: Vec<Label> = restriction_types(lab(5, 3, 1)).into_iter().map(|(_, x)| x).collect();
        assert_eq!(labels, vec![at(1), at(2), at(4)]);
        let exps: BTreeSet<Vec<usize>> = labels.iter().map(|x| x.exponents()).collect();
        assert_eq!(exps, [vec![1, 4, 7, 7], vec![1, 4, 7, 8], vec![1, 4, 7, 10]].into());
    }

    #[test]
    fn symbolic_examples() {
        assert!(!symbolic_accuracy(lab(5, 3, 1)));
        assert!(!symbolic_accuracy_by_dimension(lab(5, 3, 1))[&4]);
        assert!(symbolic_accuracy(lab(5, 2, 1)));
        assert!(symbolic_accuracy(lab(4, 3, 1)));
        assert!(!symbolic_accuracy(lab(3, 3, 0)));
    }

    #[test]
    fn symbolic_matches_closed_form() {
        for l in 2..10 {
            for r in 2..8 {
                for k in 0..=l {
                    let x = lab(l, r, k);
                    assert_eq!(symbolic_accuracy(x), closed_form_accuracy(x), "{x}");
                }
            }
        }
    }

    #[test]
    fn classes() {
        let x = lab(4, 3, 2);
        let a = build_intermediate(x);
        let mut seen = BTreeMap::new();
        for h in 0..a.len() {
            *seen.entry(hyperplane_class(x, a.normal(h))).or_insert(0) += 1;
        }
        assert_eq!(seen[&HyperplaneClass::Coordinate], 2);
        assert_eq!(seen[&HyperplaneClass::DifferenceBelow], 3);
        assert_eq!(seen[&HyperplaneClass::DifferenceSplit], 12);
        assert_eq!(seen[&HyperplaneClass::DifferenceAbove], 3);
    }

    #[test]
    fn localization_precondition() {
        assert_eq!(
            localization_fixture_check(3, 3, Default::default()),
            Err(IntermediateError::Precondition { l: 3, r: 3 })
        );
        assert!(matches!(
            bruteforce_accuracy(lab(6, 2, 1), Default::default()),
            Err(IntermediateError::BeyondCaps { .. })
        ));
    }
}
