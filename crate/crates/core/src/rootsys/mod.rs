//! Crystallographic root systems, the root poset and its ideals.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::Arrangement;
use crate::exactmath::{Field, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootSystemError {
    #[error("invalid root system type {0:?}")]
    InvalidType(String),
    #[error("ideal enumeration exceeded the cap of {0} ideals")]
    CapExceeded(usize),
    #[error("{0:?} is not a positive root")]
    NotARoot(Vec<i64>),
    #[error("root set is not downward closed: missing {0:?}")]
    NotAnIdeal(Vec<i64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

/// Cartan type such as `B3`. `D3` is accepted and stored as `A3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootSystemType {
    family: Family,
    rank: usize,
}

impl RootSystemType {
    pub fn new(family: Family, rank: usize) -> Result<Self, RootSystemError> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 3,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if !ok {
            return Err(RootSystemError::InvalidType(format!("{family:?}{rank}")));
        }
        if family == Family::D && rank == 3 {
            return Ok(RootSystemType { family: Family::A, rank: 3 });
        }
        Ok(RootSystemType { family, rank })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

impl fmt::Display for RootSystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

impl FromStr for RootSystemType {
    type Err = RootSystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RootSystemError::InvalidType(s.to_string());
        let t = s.trim();
        let mut chars = t.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(bad()),
        };
        let rank: usize = chars.as_str().trim_start_matches('_').parse().map_err(|_| bad())?;
        Self::new(family, rank).map_err(|_| bad())
    }
}

impl Serialize for RootSystemType {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RootSystemType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A positive root.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Root {
    /// Coordinates in the ambient model.
    pub coords: Vec<Rational>,
    /// Coefficients over the simple roots.
    pub simple_coeffs: Vec<i64>,
    pub height: usize,
}

/// Positive system of a crystallographic root system in a fixed coordinate
/// model.
///
/// Models: `A_n` uses `n + 1` coordinates, `E6`/`E7` sit inside the
/// 8-coordinate `E8` model, `G2` uses simple-coefficient coordinates (a
/// linear change of coordinates away from any Euclidean model), and the rest
/// use `rank` coordinates.
#[derive(Debug, Clone)]
pub struct RootSystem {
    typ: RootSystemType,
    ambient_dim: usize,
    cartan: Vec<Vec<i64>>,
    positive: Vec<Root>,
}

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

fn unit(dim: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); dim];
    v[i] = Rational::one();
    v
}

fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| &acc + &(x * y))
}

/// Simple roots `alpha_1..alpha_n` (Bourbaki numbering) and ambient dimension.
fn simple_roots(t: RootSystemType) -> (usize, Vec<Vec<Rational>>) {
    let n = t.rank;
    let chain = |dim: usize, count: usize| -> Vec<Vec<Rational>> {
        (0..count).map(|i| sub(&unit(dim, i), &unit(dim, i + 1))).collect()
    };
    match t.family {
        Family::A => (n + 1, chain(n + 1, n)),
        Family::B => {
            let mut s = chain(n, n - 1);
            s.push(unit(n, n - 1));
            (n, s)
        }
        Family::C => {
            let mut s = chain(n, n - 1);
            s.push(unit(n, n - 1).into_iter().map(|x| &x * &q(2)).collect());
            (n, s)
        }
        Family::D => {
            let mut s = chain(n, n - 1);
            s.push(add(&unit(n, n - 2), &unit(n, n - 1)));
            (n, s)
        }
        Family::F => {
            let h = Rational::new(1, 2);
            let s = vec![
                sub(&unit(4, 1), &unit(4, 2)),
                sub(&unit(4, 2), &unit(4, 3)),
                unit(4, 3),
                vec![h.clone(), -h.clone(), -h.clone(), -h],
            ];
            (4, s)
        }
        Family::G => (2, vec![unit(2, 0), unit(2, 1)]),
        Family::E => {
            let h = Rational::new(1, 2);
            let mut a1 = vec![-h.clone(); 8];
            a1[0] = h.clone();
            a1[7] = h;
            let mut s = vec![a1, add(&unit(8, 0), &unit(8, 1))];
            for i in 1..7 {
                s.push(sub(&unit(8, i), &unit(8, i - 1)));
            }
            s.truncate(n);
            (8, s)
        }
    }
}

/// `A_ij = 2 (alpha_i, alpha_j) / (alpha_j, alpha_j)`.
fn cartan_matrix(t: RootSystemType, simple: &[Vec<Rational>]) -> Vec<Vec<i64>> {
    if t.family == Family::G {
        // alpha_1 short, alpha_2 long.
        return vec![vec![2, -1], vec![-3, 2]];
    }
    simple
        .iter()
        .map(|a| {
            simple
                .iter()
                .map(|b| {
                    let v = &(&q(2) * &dot(a, b)) / &dot(b, b);
                    v.to_i64().expect("integral Cartan entry")
                })
                .collect()
        })
        .collect()
}

impl RootSystem {
    pub fn new(t: RootSystemType) -> Self {
        let (ambient_dim, simple) = simple_roots(t);
        let cartan = cartan_matrix(t, &simple);
        let n = t.rank;

        // Root strings: for beta in Phi+ and simple alpha_i, with p maximal such
        // that beta - p alpha_i is a root, beta + alpha_i is a root iff
        // p - <beta, alpha_i^vee> > 0.
        let mut layers: Vec<Vec<Vec<i64>>> = vec![(0..n)
            .map(|i| {
                let mut v = vec![0; n];
                v[i] = 1;
                v
            })
            .collect()];
        let mut all: std::collections::HashSet<Vec<i64>> = layers[0].iter().cloned().collect();
        loop {
            let mut next: Vec<Vec<i64>> = Vec::new();
            for beta in layers.last().unwrap() {
                for i in 0..n {
                    let mut p = 0;
                    let mut down = beta.clone();
                    loop {
                        down[i] -= 1;
                        if all.contains(&down) {
                            p += 1;
                        } else {
                            break;
                        }
                    }
                    let pairing: i64 = (0..n).map(|j| beta[j] * cartan[j][i]).sum();
                    if p - pairing > 0 {
                        let mut up = beta.clone();
                        up[i] += 1;
                        if !next.contains(&up) {
                            next.push(up);
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            all.extend(next.iter().cloned());
            layers.push(next);
        }

        let mut positive: Vec<Root> = Vec::new();
        for (h, mut layer) in layers.into_iter().enumerate() {
            layer.sort_by(|a, b| b.cmp(a));
            for c in layer {
                let coords = if t.family == Family::G {
                    c.iter().map(|&x| q(x)).collect()
                } else {
                    let mut v = vec![Rational::zero(); ambient_dim];
                    for (k, &m) in c.iter().enumerate() {
                        if m != 0 {
                            v = add(&v, &simple[k].iter().map(|x| x * &q(m)).collect::<Vec<_>>());
                        }
                    }
                    v
                };
                positive.push(Root { coords, simple_coeffs: c, height: h + 1 });
            }
        }
        RootSystem { typ: t, ambient_dim, cartan, positive }
    }

    pub fn root_type(&self) -> RootSystemType {
        self.typ
    }

    pub fn rank(&self) -> usize {
        self.typ.rank
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// Ordered by height, then by simple coefficients descending.
    pub fn positive_roots(&self) -> &[Root] {
        &self.positive
    }

    pub fn simple_roots(&self) -> &[Root] {
        &self.positive[..self.rank()]
    }

    pub fn root(&self, i: usize) -> &Root {
        &self.positive[i]
    }

    pub fn index_of(&self, simple_coeffs: &[i64]) -> Option<usize> {
        self.positive.iter().position(|r| r.simple_coeffs == simple_coeffs)
    }

    /// `beta <= gamma` in the root poset.
    pub fn leq(&self, beta: usize, gamma: usize) -> bool {
        let (b, g) = (&self.positive[beta].simple_coeffs, &self.positive[gamma].simple_coeffs);
        b.iter().zip(g).all(|(x, y)| x <= y)
    }

    pub fn highest_root(&self) -> &Root {
        self.positive.last().expect("nonempty positive system")
    }

    /// `h = ht(theta) + 1`.
    pub fn coxeter_number(&self) -> usize {
        self.highest_root().height + 1
    }

    /// Indices of the roots `beta - alpha_i` that are positive roots.
    pub fn lower_covers(&self, beta: usize) -> Vec<usize> {
        let c = &self.positive[beta].simple_coeffs;
        (0..self.rank())
            .filter_map(|i| {
                let mut d = c.clone();
                d[i] -= 1;
                self.index_of(&d)
            })
            .collect()
    }

    pub fn full_ideal(&self) -> Ideal {
        Ideal { roots: (0..self.positive.len()).collect() }
    }

    /// Downward closure of the given roots (simple coefficients).
    pub fn ideal_from_generators(&self, generators: &[Vec<i64>]) -> Result<Ideal, RootSystemError> {
        let mut gens = Vec::new();
        for g in generators {
            gens.push(self.index_of(g).ok_or_else(|| RootSystemError::NotARoot(g.clone()))?);
        }
        let roots = (0..self.positive.len())
            .filter(|&b| gens.iter().any(|&g| self.leq(b, g)))
            .collect();
        Ok(Ideal { roots })
    }

    /// An explicit root set, which must already be downward closed.
    pub fn ideal_from_roots(&self, roots: &[Vec<i64>]) -> Result<Ideal, RootSystemError> {
        let mut idx = Vec::new();
        for r in roots {
            idx.push(self.index_of(r).ok_or_else(|| RootSystemError::NotARoot(r.clone()))?);
        }
        idx.sort_unstable();
        idx.dedup();
        for &b in &idx {
            for c in self.lower_covers(b) {
                if idx.binary_search(&c).is_err() {
                    return Err(RootSystemError::NotAnIdeal(self.positive[c].simple_coeffs.clone()));
                }
            }
        }
        Ok(Ideal { roots: idx })
    }

    /// All ideals of the root poset, by include/exclude search in root order
    /// (excluding first, so the empty ideal comes first).
    pub fn enumerate_ideals(&self, cap: usize) -> Result<Vec<Ideal>, RootSystemError> {
        let covers: Vec<Vec<usize>> = (0..self.positive.len()).map(|b| self.lower_covers(b)).collect();
        let mut out = Vec::new();
        let mut included = vec![false; self.positive.len()];
        fn go(
            i: usize,
            covers: &[Vec<usize>],
            included: &mut [bool],
            out: &mut Vec<Ideal>,
            cap: usize,
        ) -> Result<(), RootSystemError> {
            if i == covers.len() {
                if out.len() == cap {
                    return Err(RootSystemError::CapExceeded(cap));
                }
                out.push(Ideal { roots: (0..i).filter(|&j| included[j]).collect() });
                return Ok(());
            }
            go(i + 1, covers, included, out, cap)?;
            if covers[i].iter().all(|&c| included[c]) {
                included[i] = true;
                go(i + 1, covers, included, out, cap)?;
                included[i] = false;
            }
            Ok(())
        }
        go(0, &covers, &mut included, &mut out, cap)?;
        Ok(out)
    }

    /// `A_I = {ker beta : beta in I}` over the rationals.
    pub fn ideal_arrangement(&self, ideal: &Ideal) -> Arrangement<Rational> {
        Arrangement::new(
            self.ambient_dim,
            Field::Rational,
            ideal.roots.iter().map(|&i| self.positive[i].coords.clone()).collect(),
        )
        .expect("root normals are valid")
    }

    pub fn weyl_arrangement(&self) -> Arrangement<Rational> {
        self.ideal_arrangement(&self.full_ideal())
    }

    /// Blocks of hyperplane indices of [`RootSystem::ideal_arrangement`] by
    /// root height: block `k - 1` holds the roots of height `k`.
    pub fn root_height_partition(&self, ideal: &Ideal) -> Vec<Vec<usize>> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (pos, &r) in ideal.roots.iter().enumerate() {
            let h = self.positive[r].height;
            if blocks.len() < h {
                blocks.resize(h, Vec::new());
            }
            blocks[h - 1].push(pos);
        }
        blocks
    }

    /// Classical exponents `(0, .., 0, m_1, .., m_rank)` padded to the
    /// ambient dimension: the dual partition of the height block sizes.
    pub fn exponents(&self) -> Vec<usize> {
        let sizes: Vec<usize> = self.root_height_partition(&self.full_ideal()).iter().map(Vec::len).collect();
        crate::matfree::dual_partition_exponents(&sizes, self.ambient_dim)
    }
}

/// Lower order ideal of the root poset, as sorted indices into
/// [`RootSystem::positive_roots`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ideal {
    roots: Vec<usize>,
}

impl Ideal {
    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn contains(&self, root: usize) -> bool {
        self.roots.binary_search(&root).is_ok()
    }

    /// `m_I`, the largest height in the ideal (0 when empty).
    pub fn max_height(&self, rs: &RootSystem) -> usize {
        self.roots.iter().map(|&r| rs.root(r).height).max().unwrap_or(0)
    }

    pub fn simple_coeffs(&self, rs: &RootSystem) -> Vec<Vec<i64>> {
        self.roots.iter().map(|&r| rs.root(r).simple_coeffs.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(s: &str) -> RootSystem {
        RootSystem::new(s.parse().unwrap())
    }

    fn heights(r: &RootSystem) -> Vec<usize> {
        r.positive_roots().iter().map(|x| x.height).collect()
    }

    #[test]
    fn small_positive_systems() {
        assert_eq!(heights(&rs("A2")), vec![1, 1, 2]);
        assert_eq!(heights(&rs("G2")), vec![1, 1, 2, 3, 4, 5]);
        assert_eq!(heights(&rs("B2")), vec![1, 1, 2, 3]);
        let b2: Vec<Vec<Rational>> = rs("B2").positive_roots().iter().map(|r| r.coords.clone()).collect();
        let e = |v: [i64; 2]| v.iter().map(|&x| q(x)).collect::<Vec<_>>();
        // e1 - e2, e2, e1, e1 + e2
        assert_eq!(b2, vec![e([1, -1]), e([0, 1]), e([1, 0]), e([1, 1])]);
    }

    #[test]
    fn type_parsing() {
        assert_eq!("D3".parse::<RootSystemType>().unwrap(), "A3".parse().unwrap());
        assert!("E9".parse::<RootSystemType>().is_err());
        assert!("B1".parse::<RootSystemType>().is_err());
        assert!("X2".parse::<RootSystemType>().is_err());
        assert_eq!("b4".parse::<RootSystemType>().unwrap().to_string(), "B4");
    }

    #[test]
    fn poset_order() {
        let a2 = rs("A2");
        assert!(a2.leq(0, 0));
        assert!(a2.leq(0, 2));
        assert!(!a2.leq(0, 1));
    }

    #[test]
    fn highest_roots_and_coxeter_numbers() {
        assert_eq!(rs("A2").highest_root().simple_coeffs, vec![1, 1]);
        assert_eq!(rs("A3").highest_root().simple_coeffs, vec![1, 1, 1]);
        assert_eq!(rs("G2").highest_root().height, 5);
        assert_eq!(rs("A2").coxeter_number(), 3);
        assert_eq!(rs("B2").coxeter_number(), 4);
        assert_eq!(rs("G2").coxeter_number(), 6);
    }

    #[test]
    fn root_counts_match_rank_times_coxeter_over_two() {
        for t in ["A1", "A4", "B3", "C3", "D4", "D5", "E6", "E7", "E8", "F4", "G2"] {
            let r = rs(t);
            assert_eq!(r.positive_roots().len() * 2, r.rank() * r.coxeter_number(), "{t}");
            assert_eq!(r.root_height_partition(&r.full_ideal())[0].len(), r.rank());
        }
        assert_eq!(rs("E8").positive_roots().len(), 120);
        assert_eq!(rs("E6").coxeter_number(), 12);
    }

    #[test]
    fn root_coordinates_are_sums_of_simple_roots() {
        for t in ["B3", "C3", "F4", "E6"] {
            let r = rs(t);
            let simple: Vec<&Vec<Rational>> = r.simple_roots().iter().map(|x| &x.coords).collect();
            for root in r.positive_roots() {
                let mut v = vec![Rational::zero(); r.ambient_dim()];
                for (k, &m) in root.simple_coeffs.iter().enumerate() {
                    for (x, s) in v.iter_mut().zip(simple[k]) {
                        *x = &*x + &(s * &q(m));
                    }
                }
                assert_eq!(v, root.coords, "{t}");
            }
        }
    }

    #[test]
    fn ideal_counts() {
        let count = |t: &str| rs(t).enumerate_ideals(usize::MAX).unwrap().len();
        assert_eq!(count("A1"), 2);
        assert_eq!(count("A2"), 5);
        assert_eq!(count("A3"), 14);
        assert_eq!(count("B3"), 20);
        assert_eq!(count("G2"), 8);
        assert_eq!(rs("A3").enumerate_ideals(10), Err(RootSystemError::CapExceeded(10)));
    }

    #[test]
    fn enumerated_ideals_are_downward_closed() {
        let r = rs("B3");
        for ideal in r.enumerate_ideals(usize::MAX).unwrap() {
            for &g in ideal.roots() {
                for b in 0..r.positive_roots().len() {
                    if r.leq(b, g) {
                        assert!(ideal.contains(b));
                    }
                }
            }
        }
    }

    #[test]
    fn generators_close_downward() {
        let r = rs("A3");
        let i = r.ideal_from_generators(&[vec![1, 1, 0]]).unwrap();
        assert_eq!(i.simple_coeffs(&r), vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]]);
        assert!(matches!(r.ideal_from_roots(&[vec![1, 1, 0]]), Err(RootSystemError::NotAnIdeal(_))));
        assert!(r.ideal_from_roots(&[vec![0, 0, 1]]).is_ok());
    }

    #[test]
    fn ideal_arrangements_and_partitions() {
        let a2 = rs("A2");
        assert!(a2.ideal_arrangement(&Ideal { roots: vec![] }).is_empty());
        assert_eq!(a2.ideal_arrangement(&Ideal { roots: vec![0, 1] }).len(), 2);
        assert_eq!(rs("G2").weyl_arrangement().len(), 6);
        let sizes = |r: &RootSystem, i: &Ideal| -> Vec<usize> {
            r.root_height_partition(i).iter().map(Vec::len).collect()
        };
        assert_eq!(a2.root_height_partition(&a2.full_ideal()), vec![vec![0, 1], vec![2]]);
        let g2 = rs("G2");
        assert_eq!(sizes(&g2, &g2.full_ideal()), vec![2, 1, 1, 1, 1]);
        assert_eq!(sizes(&a2, &Ideal { roots: vec![0] }), vec![1]);
    }

    #[test]
    fn classical_exponents() {
        assert_eq!(rs("A3").exponents(), vec![0, 1, 2, 3]);
        assert_eq!(rs("G2").exponents(), vec![1, 5]);
        assert_eq!(rs("E6").exponents(), vec![0, 0, 1, 4, 5, 7, 8, 11]);
        assert_eq!(rs("F4").exponents(), vec![1, 5, 7, 11]);
    }
}
