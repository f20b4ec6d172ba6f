//! Coned deformations of Weyl arrangements: extended Shi, ideal-Shi,
//! extended Catalan and Shi with simple hyperplanes removed.
//!
//! Everything lives in `l + 1` coordinates: the first `l` are coefficients
//! over the simple roots (a root `beta` is the functional given by its simple
//! coefficients) and the last is `z`. `H_beta^j = ker(beta - j z)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::accuracy::{check_accuracy, AccuracyReport, Mode, Strategy, WitnessHint};
use crate::arrangement::{Arrangement, LatticeOptions};
use crate::exactmath::{Field, Rational};
use crate::matfree::{accuracy_witnesses, certify_from_free_base, dual_partition_exponents, MatCertificate, MatError, Witness};
use crate::rootsys::{Ideal, RootSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeformationError {
    #[error("level k must be at least 1")]
    ZeroLevel,
    #[error("root {0} is not simple")]
    NotSimple(usize),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error("certificate exponents {got:?} differ from the expected {expected:?}")]
    ExponentMismatch { got: Vec<usize>, expected: Vec<usize> },
}

/// Origin of one hyperplane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tag {
    /// `ker(beta - shift z)`, `beta` an index into the positive roots.
    Root { root: usize, shift: i64 },
    Z,
}

/// A coned deformation with hyperplanes in construction order: the base
/// `Shi^k_{-Delta}` first, then `H_alpha^k` for simple `alpha` not removed,
/// then `H_beta^{-k}` for `beta` in the ideal by increasing height.
#[derive(Debug, Clone)]
pub struct Deformation {
    pub k: usize,
    pub arrangement: Arrangement<Rational>,
    pub tags: Vec<Tag>,
    /// Number of hyperplanes of `Shi^k_{-Delta}`.
    pub base_len: usize,
}

fn normal(rs: &RootSystem, root: usize, shift: i64) -> Vec<Rational> {
    let mut v: Vec<Rational> = rs.root(root).simple_coeffs.iter().map(|&c| Rational::from_int(c)).collect();
    v.push(Rational::from_int(-shift));
    v
}

fn assemble(rs: &RootSystem, k: usize, removed: &[usize], ideal: Option<&Ideal>) -> Result<Deformation, DeformationError> {
    if k == 0 {
        return Err(DeformationError::ZeroLevel);
    }
    let l = rs.rank();
    let simple: Vec<usize> = (0..rs.positive_roots().len()).filter(|&i| rs.root(i).height == 1).collect();
    if let Some(&r) = removed.iter().find(|r| !simple.contains(r)) {
        return Err(DeformationError::NotSimple(r));
    }
    let k = k as i64;
    let mut tags = vec![Tag::Z];
    for b in 0..rs.positive_roots().len() {
        for j in (1 - k)..k {
            tags.push(Tag::Root { root: b, shift: j });
        }
        if !simple.contains(&b) {
            tags.push(Tag::Root { root: b, shift: k });
        }
    }
    let base_len = tags.len();
    for &a in &simple {
        if !removed.contains(&a) {
            tags.push(Tag::Root { root: a, shift: k });
        }
    }
    if let Some(ideal) = ideal {
        tags.extend(ideal.roots().iter().map(|&b| Tag::Root { root: b, shift: -k }));
    }
    let normals = tags
        .iter()
        .map(|t| match *t {
            Tag::Z => {
                let mut v = vec![Rational::from_int(0); l + 1];
                v[l] = Rational::from_int(1);
                v
            }
            Tag::Root { root, shift } => normal(rs, root, shift),
        })
        .collect();
    let arrangement = Arrangement::new(l + 1, Field::Rational, normals).expect("deformation normals are distinct and nonzero");
    debug_assert_eq!(arrangement.len(), tags.len());
    Ok(Deformation { k: k as usize, arrangement, tags, base_len })
}

/// `Shi^k = {H_beta^j : 1-k <= j <= k} + {H_z}`.
pub fn build_shi(rs: &RootSystem, k: usize) -> Result<Deformation, DeformationError> {
    assemble(rs, k, &[], None)
}

/// `Shi_I^k = Shi^k + {H_beta^{-k} : beta in I}`; `I = Phi^+` is `Cat^k`.
pub fn build_ideal_shi(rs: &RootSystem, k: usize, ideal: &Ideal) -> Result<Deformation, DeformationError> {
    assemble(rs, k, &[], Some(ideal))
}

pub fn build_catalan(rs: &RootSystem, k: usize) -> Result<Deformation, DeformationError> {
    build_ideal_shi(rs, k, &rs.full_ideal())
}

/// `Shi^k` without `H_alpha^k` for the simple roots `alpha` in `sigma`
/// (indices into the positive roots).
pub fn build_shi_minus(rs: &RootSystem, k: usize, sigma: &[usize]) -> Result<Deformation, DeformationError> {
    assemble(rs, k, sigma, None)
}

/// `(1, hk - 1 (|sigma| times), hk (l - |sigma| times))`.
pub fn shi_minus_exponents(rs: &RootSystem, k: usize, sigma_len: usize) -> Vec<usize> {
    let hk = rs.coxeter_number() * k;
    let mut e = vec![1];
    e.extend(std::iter::repeat_n(hk - 1, sigma_len));
    e.extend(std::iter::repeat_n(hk, rs.rank() - sigma_len));
    e
}

/// Exponents of the ideal arrangement in the `l`-dimensional space spanned
/// by the simple roots.
pub fn ideal_exponents(rs: &RootSystem, ideal: &Ideal) -> Vec<usize> {
    let sizes: Vec<usize> = rs.root_height_partition(ideal).iter().map(Vec::len).collect();
    dual_partition_exponents(&sizes, rs.rank())
}

/// `(1, hk + e_1^I, .., hk + e_l^I)`.
pub fn ideal_shi_exponents(rs: &RootSystem, k: usize, ideal: &Ideal) -> Vec<usize> {
    let hk = rs.coxeter_number() * k;
    let mut e = vec![1];
    e.extend(ideal_exponents(rs, ideal).into_iter().map(|x| hk + x));
    e
}

/// Certify `Shi_I^k` by MAT-steps from the free base `Shi^k_{-Delta}`
/// (exponents taken as known), adding the simple roots at shift `k` and
/// then the ideal at shift `-k` one height at a time.
pub fn shi_pipeline_certificate(
    rs: &RootSystem,
    k: usize,
    ideal: &Ideal,
) -> Result<(Deformation, MatCertificate), DeformationError> {
    let def = build_ideal_shi(rs, k, ideal)?;
    let l = rs.rank();
    let base: Vec<usize> = (0..def.base_len).collect();
    let mut partition = vec![(def.base_len..def.base_len + l).collect::<Vec<_>>()];
    let offset = def.base_len + l;
    for block in rs.root_height_partition(ideal) {
        partition.push(block.into_iter().map(|p| offset + p).collect());
    }
    let base_exps = shi_minus_exponents(rs, k, l);
    let cert = certify_from_free_base(
        &def.arrangement,
        &base,
        &base_exps,
        "Shi^k minus the simple hyperplanes at shift k: free with exponents (1, hk-1, .., hk-1)",
        &partition,
    )?;
    let expected = ideal_shi_exponents(rs, k, ideal);
    if cert.exponents != expected {
        return Err(DeformationError::ExponentMismatch { got: cert.exponents, expected });
    }
    Ok((def, cert))
}

/// Block witnesses of the pipeline certificate, keyed by dimension.
pub fn shi_witnesses(
    def: &Deformation,
    cert: &MatCertificate,
    opts: LatticeOptions,
) -> Result<BTreeMap<usize, Witness<Rational>>, DeformationError> {
    Ok(accuracy_witnesses(cert, &def.arrangement, opts)?)
}

/// Accuracy report of `Shi_I^k` built from the pipeline witnesses.
pub fn shi_accuracy_report(
    rs: &RootSystem,
    k: usize,
    ideal: &Ideal,
    opts: LatticeOptions,
) -> Result<AccuracyReport<Rational>, DeformationError> {
    let (def, cert) = shi_pipeline_certificate(rs, k, ideal)?;
    let hints: BTreeMap<usize, WitnessHint<Rational>> =
        shi_witnesses(&def, &cert, opts)?.into_iter().map(|(d, w)| (d, w.into())).collect();
    Ok(check_accuracy(&def.arrangement, &cert.exponents, Mode::Exact, Strategy::WitnessFirst, &hints, opts))
}
