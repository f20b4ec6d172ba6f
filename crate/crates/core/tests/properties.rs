use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use freearr::accuracy::{check_accuracy, Mode, Strategy as Scan, Verdict, WitnessHint};
use freearr::deformations::{build_ideal_shi, build_shi, shi_pipeline_certificate};
use freearr::exactmath::{Field, IntPoly, Rational};
use freearr::graphic::{chromatic_polynomial, graphic_arrangement, Graph, DEFAULT_CHROMATIC_EDGE_CAP};
use freearr::matfree::{accuracy_witnesses, certify_from_free_base, certify_partition, dual_partition_exponents, polynomial_from_exponents};
use freearr::rootsys::{Ideal, RootSystem};
use freearr::Arrangement;
use proptest::prelude::*;
use proptest::sample::Index;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(256)
}

fn arrangement(dim: usize, rows: Vec<Vec<i64>>) -> Arrangement<Rational> {
    let rows = rows.into_iter().map(|r| r.into_iter().map(Rational::from_int).collect()).collect();
    Arrangement::new(dim, Field::Rational, rows).unwrap()
}

fn arb_arrangement(max_dim: usize, max_len: usize) -> impl Strategy<Value = Arrangement<Rational>> {
    (2..=max_dim).prop_flat_map(move |dim| {
        let row = prop::collection::vec(-2i64..=2, dim).prop_filter("nonzero", |r| r.iter().any(|&x| x != 0));
        prop::collection::vec(row, 1..=max_len).prop_map(move |rows| arrangement(dim, rows))
    })
}

fn arb_graph() -> impl Strategy<Value = Graph> {
    (1usize..=8).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
        prop::sample::subsequence(pairs.clone(), 0..=pairs.len()).prop_map(move |e| Graph::new(n, e).unwrap())
    })
}

fn roots(p: &IntPoly) -> Option<Vec<usize>> {
    p.nonnegative_integer_roots().map(|v| v.into_iter().map(|e| e as usize).collect())
}

struct Catalog {
    systems: Vec<RootSystem>,
    ideals: Vec<Vec<Ideal>>,
}

/// Root systems of rank at most 4 with all their ideals.
fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let types = ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C3", "C4", "D4", "F4", "G2"];
        let systems: Vec<RootSystem> = types.iter().map(|t| RootSystem::new(t.parse().unwrap())).collect();
        let ideals = systems.iter().map(|rs| rs.enumerate_ideals(100_000).unwrap()).collect();
        Catalog { systems, ideals }
    })
}

fn pick_ideal(s: Index, i: Index) -> (&'static RootSystem, &'static Ideal) {
    let c = catalog();
    let k = s.index(c.systems.len());
    (&c.systems[k], &c.ideals[k][i.index(c.ideals[k].len())])
}

fn shuffle_blocks(partition: &[Vec<usize>], seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    partition
        .iter()
        .map(|b| {
            let mut b = b.clone();
            b.shuffle(&mut rng);
            b
        })
        .collect()
}

fn exact_report(a: &Arrangement<Rational>, e: &[usize], mode: Mode) -> Verdict {
    check_accuracy(a, e, mode, Scan::Exhaustive, &BTreeMap::new(), Default::default()).verdict
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn deletion_restriction(a in arb_arrangement(4, 6)) {
        let chi = a.characteristic_polynomial().unwrap();
        for h in 0..a.len() {
            let del = a.deletion(h).characteristic_polynomial().unwrap();
            let res = a.restriction_to_hyperplane(h).characteristic_polynomial().unwrap();
            prop_assert_eq!(&chi, &del.sub(&res));
        }
    }

    #[test]
    fn mobius_signs_alternate(a in arb_arrangement(4, 7)) {
        let lattice = a.lattice().unwrap();
        for x in 0..lattice.len() {
            let sign = if lattice.rank_of(x) % 2 == 0 { 1 } else { -1 };
            prop_assert!(sign * lattice.mobius(x) > 0);
        }
    }

    #[test]
    fn charpoly_shape(a in arb_arrangement(5, 7)) {
        let chi = a.characteristic_polynomial().unwrap();
        prop_assert_eq!(chi.degree(), Some(a.dim()));
        prop_assert_eq!(chi.leading(), 1);
        prop_assert_eq!(chi.coeff(a.dim() - 1), -(a.len() as i64));
    }

    #[test]
    fn restrictions_compose(a in arb_arrangement(4, 7), xi in any::<Index>(), yi in any::<Index>()) {
        let lattice = a.lattice().unwrap();
        let x = xi.index(lattice.len());
        let above = lattice.upper_set(x);
        let y = above[yi.index(above.len())];
        let (ax, map) = a.restriction_with_map(lattice.flat(x));
        let y_in_x = ax.intersection(lattice.flat(y).contains().ones().filter_map(|h| map[h]));
        let lhs = ax.restriction(&y_in_x);
        let rhs = a.restriction(lattice.flat(y));
        // Both use the free columns of y's forms as coordinates.
        prop_assert!(lhs.same_hyperplanes(&rhs));
    }

    #[test]
    fn supersolvable_certificates_factor(a in arb_arrangement(4, 7)) {
        let lattice = a.lattice().unwrap();
        if let Some(cert) = lattice.supersolvable_certificate() {
            prop_assert_eq!(cert.exponents.iter().sum::<usize>(), a.len());
            prop_assert_eq!(polynomial_from_exponents(&cert.exponents), lattice.characteristic_polynomial());
        }
    }

    #[test]
    fn lattice_is_order_independent(a in arb_arrangement(4, 7), seed in any::<u64>()) {
        let mut rows: Vec<Vec<Rational>> = a.normals().map(<[Rational]>::to_vec).collect();
        rows.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let b = Arrangement::new(a.dim(), Field::Rational, rows).unwrap();
        let keys = |arr: &Arrangement<Rational>| -> BTreeSet<Vec<Vec<Rational>>> {
            arr.lattice().unwrap().flats().iter().map(|f| f.forms().to_vec()).collect()
        };
        prop_assert_eq!(keys(&a), keys(&b));
    }

    #[test]
    fn chromatic_equals_charpoly(g in arb_graph()) {
        let chrom = chromatic_polynomial(&g, DEFAULT_CHROMATIC_EDGE_CAP).unwrap();
        prop_assert_eq!(chrom, graphic_arrangement(&g).characteristic_polynomial().unwrap());
    }

    #[test]
    fn ideal_height_partitions_certify(s in any::<Index>(), i in any::<Index>()) {
        let (rs, ideal) = pick_ideal(s, i);
        let a = rs.ideal_arrangement(ideal);
        let cert = certify_partition(&a, &rs.root_height_partition(ideal)).unwrap();
        prop_assert_eq!(cert.exponents.iter().sum::<usize>(), a.len());
        prop_assert_eq!(&dual_partition_exponents(&cert.block_sizes(), a.dim()), &cert.exponents);
        prop_assert_eq!(a.characteristic_polynomial().unwrap(), polynomial_from_exponents(&cert.exponents));
    }

    #[test]
    fn certificates_ignore_order_within_blocks(s in any::<Index>(), i in any::<Index>(), seed in any::<u64>()) {
        let (rs, ideal) = pick_ideal(s, i);
        let a = rs.ideal_arrangement(ideal);
        let part = rs.root_height_partition(ideal);
        let base = certify_partition(&a, &part).unwrap();
        let shuffled = certify_partition(&a, &shuffle_blocks(&part, seed)).unwrap();
        prop_assert_eq!(base.exponents, shuffled.exponents);
    }

    #[test]
    fn witness_first_agrees_with_exhaustive(s in any::<Index>(), i in any::<Index>()) {
        let (rs, ideal) = pick_ideal(s, i);
        prop_assume!(ideal.roots().len() <= 12);
        let a = rs.ideal_arrangement(ideal);
        let cert = certify_partition(&a, &rs.root_height_partition(ideal)).unwrap();
        let hints: BTreeMap<usize, WitnessHint<Rational>> = accuracy_witnesses(&cert, &a, Default::default())
            .unwrap()
            .into_iter()
            .map(|(d, w)| (d, w.into()))
            .collect();
        let fast = check_accuracy(&a, &cert.exponents, Mode::Exact, Scan::WitnessFirst, &hints, Default::default());
        prop_assert_eq!(fast.verdict, exact_report(&a, &cert.exponents, Mode::Exact));
    }

    #[test]
    fn exact_implies_almost(a in arb_arrangement(4, 7)) {
        if let Some(e) = roots(&a.characteristic_polynomial().unwrap()) {
            if exact_report(&a, &e, Mode::Exact) == Verdict::Accurate {
                prop_assert_eq!(exact_report(&a, &e, Mode::Almost), Verdict::Accurate);
            }
        }
    }

    #[test]
    fn product_verdict_is_conjunction(a in arb_arrangement(3, 5), b in arb_arrangement(3, 5)) {
        let (Some(ea), Some(eb)) = (roots(&a.characteristic_polynomial().unwrap()), roots(&b.characteristic_polynomial().unwrap())) else {
            return Ok(());
        };
        let p = a.product(&b).unwrap();
        prop_assert!(p.coordinate_blocks().len() >= 2);
        let mut e: Vec<usize> = ea.iter().chain(&eb).copied().collect();
        e.sort_unstable();
        let both = exact_report(&a, &ea, Mode::Exact) == Verdict::Accurate && exact_report(&b, &eb, Mode::Exact) == Verdict::Accurate;
        prop_assert_eq!(exact_report(&p, &e, Mode::Exact) == Verdict::Accurate, both);
    }
}

const SHI_TYPES: [&str; 5] = ["A1", "A2", "B2", "G2", "A3"];

proptest! {
    #![proptest_config(config())]

    #[test]
    fn shi_size_formula(s in 0..SHI_TYPES.len(), k in 1usize..=3, i in any::<Index>()) {
        let rs = RootSystem::new(SHI_TYPES[s].parse().unwrap());
        let ideals = rs.enumerate_ideals(1_000).unwrap();
        let ideal = &ideals[i.index(ideals.len())];
        let def = build_ideal_shi(&rs, k, ideal).unwrap();
        prop_assert_eq!(def.arrangement.len(), 2 * k * rs.positive_roots().len() + 1 + ideal.roots().len());
    }

    #[test]
    fn pipeline_ignores_order_within_blocks(s in 0..SHI_TYPES.len(), k in 1usize..=2, i in any::<Index>(), seed in any::<u64>()) {
        let rs = RootSystem::new(SHI_TYPES[s].parse().unwrap());
        let ideals = rs.enumerate_ideals(1_000).unwrap();
        let ideal = &ideals[i.index(ideals.len())];
        let (def, cert) = shi_pipeline_certificate(&rs, k, ideal).unwrap();
        prop_assert_eq!(cert.exponents.iter().sum::<usize>(), def.arrangement.len());
        let again = certify_from_free_base(
            &def.arrangement,
            &cert.base.hyperplanes,
            &cert.base.exponents,
            &cert.base.provenance,
            &shuffle_blocks(&cert.partition, seed),
        )
        .unwrap();
        prop_assert_eq!(again.exponents, cert.exponents);
    }
}

#[test]
fn shi_charpoly_closed_form() {
    for t in SHI_TYPES {
        let rs = RootSystem::new(t.parse().unwrap());
        for k in 1..=2 {
            if t == "A3" && k == 2 {
                continue;
            }
            let hk = (rs.coxeter_number() * k) as i64;
            let expected = IntPoly::from_roots(std::iter::once(1).chain(std::iter::repeat_n(hk, rs.rank())));
            let chi = build_shi(&rs, k).unwrap().arrangement.characteristic_polynomial().unwrap();
            assert_eq!(chi, expected, "{t} k={k}");
        }
    }
}
