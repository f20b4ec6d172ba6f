use std::collections::BTreeMap;

use freearr::accuracy::{check_accuracy, Mode, Strategy, Verdict};
use freearr::exactmath::IntPoly;
use freearr::graphic::*;
use sha2::{Digest, Sha256};

const G_SHA256: &str = "9710f9e521806a09cae88c77838b2c0133b12ba1ef27303c728b8ccdd9848211";
const G_PRIME_SHA256: &str = "84fcdc0fff7caf1a91063f0159e3df28fdff831dbcd2dc5c30214de5b1e61c62";

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn roots(p: &IntPoly) -> Vec<usize> {
    p.nonnegative_integer_roots().unwrap().into_iter().map(|e| e as usize).collect()
}

const HEXAGON: [(usize, usize); 6] = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6)];
const TRIANGLE: [(usize, usize); 3] = [(1, 3), (3, 5), (1, 5)];

#[test]
fn fixture_checksums() {
    assert_eq!(hex(&Sha256::digest(FIXTURE_G_JSON.as_bytes())), G_SHA256);
    assert_eq!(hex(&Sha256::digest(FIXTURE_G_PRIME_JSON.as_bytes())), G_PRIME_SHA256);
}

#[test]
fn fixture_g_validation_gates() {
    let g = fixture(Fixture::G);
    let order = [2, 4, 6, 7, 8, 9, 1, 3, 5, 10];
    assert_eq!(exponents_from_elimination(&g, &order).unwrap(), vec![0, 1, 2, 2, 2, 2, 2, 2, 2, 3]);
    let chi = graphic_arrangement(&g).characteristic_polynomial().unwrap();
    assert_eq!(chi, IntPoly::from_roots([0, 1, 2, 2, 2, 2, 2, 2, 2, 3]));
    assert_eq!(chromatic_polynomial(&g, DEFAULT_CHROMATIC_EDGE_CAP).unwrap(), chi);
    for (a, b) in HEXAGON {
        let (c, _) = g.contract(a, b).unwrap();
        assert_eq!(chromatic_roots(&c, DEFAULT_CHROMATIC_EDGE_CAP).unwrap().unwrap(), vec![0, 1, 2, 2, 2, 2, 2, 2, 3]);
    }
    for (a, b) in TRIANGLE {
        let (c, _) = g.contract(a, b).unwrap();
        assert_eq!(chromatic_roots(&c, DEFAULT_CHROMATIC_EDGE_CAP).unwrap().unwrap(), vec![0, 1, 1, 2, 2, 2, 2, 2, 2]);
    }
}

#[test]
fn restriction_is_contraction_on_fixture_edges() {
    let g = fixture(Fixture::G);
    let a = graphic_arrangement(&g);
    for (i, (u, v)) in g.edges().enumerate() {
        let (c, _) = g.contract(u, v).unwrap();
        let r = a.restriction_to_hyperplane(i);
        assert!(graph_of_arrangement(&r).unwrap().is_isomorphic(&c), "edge {u}-{v}");
        assert_eq!(roots(&r.characteristic_polynomial().unwrap()), chromatic_roots(&c, 40).unwrap().unwrap());
    }
}

#[test]
fn fixture_g_not_accurate() {
    let g = fixture(Fixture::G);
    let a = graphic_arrangement(&g);
    let exps = exponents_from_elimination(&g, &[2, 4, 6, 7, 8, 9, 1, 3, 5, 10]).unwrap();
    let r = check_accuracy(&a, &exps, Mode::Exact, Strategy::Exhaustive, &BTreeMap::new(), Default::default());
    assert_eq!(r.verdict, Verdict::NotAccurate);
    assert_eq!(r.failing_dimensions(), vec![9]);
    let almost = check_accuracy(&a, &exps, Mode::Almost, Strategy::Exhaustive, &BTreeMap::new(), Default::default());
    assert_eq!(almost.verdict, Verdict::Accurate);
}

#[test]
fn fixture_g_prime_accurate_and_relations() {
    let g = fixture(Fixture::G);
    let gp = fixture(Fixture::GPrime);
    let order = perfect_elimination_order(&gp).unwrap();
    let exps = exponents_from_elimination(&gp, &order).unwrap();
    assert_eq!(exps, vec![0, 1, 2, 2, 2, 2, 2, 2, 3, 3, 3]);
    let b = graphic_arrangement(&gp);
    assert_eq!(b.characteristic_polynomial().unwrap(), IntPoly::from_roots(exps.iter().map(|&e| e as i64)));
    let r = check_accuracy(&b, &exps, Mode::Exact, Strategy::Exhaustive, &BTreeMap::new(), Default::default());
    assert_eq!(r.verdict, Verdict::Accurate);

    // Restriction at ker(x1 - x11) is A(G).
    let h = gp.edges().position(|e| e == (1, 11)).unwrap();
    let restricted = graph_of_arrangement(&b.restriction_to_hyperplane(h)).unwrap();
    assert!(restricted.is_isomorphic(&g));
    let (contracted, _) = gp.contract(1, 11).unwrap();
    assert_eq!(contracted, g);

    // Localization at x1 = .. = x10 is A(G) with one extra coordinate.
    let a = graphic_arrangement(&g);
    let x = b.intersection(gp.edges().enumerate().filter(|(_, (_, v))| *v <= 10).map(|(i, _)| i));
    let loc = b.localization(&x);
    let loc_graph = graph_of_arrangement(&loc).unwrap();
    assert_eq!(loc_graph, g.add_vertex(&[]).unwrap());
    assert_eq!(loc.len(), a.len());
}
