//! Graphic arrangements `A(G) = {ker(x_i - x_j) : ij in E}`.
//!
//! Vertices are `1..=n`; vertex `i` is coordinate `i - 1`.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Zero};
use petgraph::graph::UnGraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::Arrangement;
use crate::exactmath::{Field, IntPoly, Rational};

/// Default edge cap for the deletion-contraction recursion.
pub const DEFAULT_CHROMATIC_EDGE_CAP: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {0:?} is a loop")]
    Loop((usize, usize)),
    #[error("edge {edge:?} has a vertex outside 1..={n}")]
    VertexOutOfRange { edge: (usize, usize), n: usize },
    #[error("edge {0:?} is not in the graph")]
    MissingEdge((usize, usize)),
    #[error("order is not a permutation of the vertices")]
    NotAPermutation,
    #[error("vertex {0} has later neighbours that do not form a clique")]
    NotAnEliminationOrder(usize),
    #[error("{edges} edges exceed the cap of {cap}")]
    CapExceeded { edges: usize, cap: usize },
}

/// Simple undirected graph on `1..=n`; edges stored as `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphFile> for Graph {
    type Error = GraphError;
    fn try_from(f: GraphFile) -> Result<Self, GraphError> {
        Graph::new(f.n, f.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

impl From<Graph> for GraphFile {
    fn from(g: Graph) -> Self {
        GraphFile { n: g.n, edges: g.edges.into_iter().map(|(a, b)| [a, b]).collect() }
    }
}

impl Graph {
    /// Repeated edges collapse.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::Loop((a, b)));
            }
            if a == 0 || b == 0 || a > n || b > n {
                return Err(GraphError::VertexOutOfRange { edge: (a, b), n });
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Graph { n, edges: set })
    }

    pub fn complete(n: usize) -> Self {
        Graph::new(n, (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j)))).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        Graph::new(n, (1..=n).map(|i| (i, i % n + 1))).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbours(&self, v: usize) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect()
    }

    /// `G + v` with `v = n + 1` adjacent to `neighbours`.
    pub fn add_vertex(&self, neighbours: &[usize]) -> Result<Self, GraphError> {
        let v = self.n + 1;
        Graph::new(v, self.edges().chain(neighbours.iter().map(|&u| (u, v))))
    }

    /// `G / ab`: `b` is merged into `a`, vertices above `b` shift down by one.
    /// Returns the graph and the new label of each old vertex (index `0`
    /// unused).
    pub fn contract(&self, a: usize, b: usize) -> Result<(Self, Vec<usize>), GraphError> {
        if !self.has_edge(a, b) {
            return Err(GraphError::MissingEdge((a, b)));
        }
        let relabel = |v: usize| if v > b { v - 1 } else { v };
        let mut map = vec![0; self.n + 1];
        for (v, m) in map.iter_mut().enumerate().skip(1) {
            *m = relabel(if v == b { a } else { v });
        }
        let edges = self.edges().map(|(x, y)| (map[x], map[y])).filter(|(x, y)| x != y);
        Ok((Graph::new(self.n - 1, edges)?, map))
    }

    pub fn to_petgraph(&self) -> UnGraph<(), ()> {
        let mut g = UnGraph::with_capacity(self.n, self.edges.len());
        let nodes: Vec<_> = (0..self.n).map(|_| g.add_node(())).collect();
        for (a, b) in self.edges() {
            g.add_edge(nodes[a - 1], nodes[b - 1], ());
        }
        g
    }

    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        self.n == other.n
            && self.edge_count() == other.edge_count()
            && petgraph::algo::is_isomorphic(&self.to_petgraph(), &other.to_petgraph())
    }

    pub fn component_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..=self.n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut c = self.n;
        for (a, b) in self.edges() {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                c -= 1;
            }
        }
        c
    }
}

/// One hyperplane per edge, in edge order, in `n` rational coordinates.
pub fn graphic_arrangement(g: &Graph) -> Arrangement<Rational> {
    let normals = g
        .edges()
        .map(|(a, b)| {
            let mut v = vec![Rational::zero(); g.n];
            v[a - 1] = Rational::one();
            v[b - 1] = -Rational::one();
            v
        })
        .collect();
    Arrangement::new(g.n, Field::Rational, normals).expect("edge normals are distinct and nonzero")
}

/// The graph of an arrangement all of whose normals are `e_i - e_j` up to
/// scaling.
pub fn graph_of_arrangement(a: &Arrangement<Rational>) -> Option<Graph> {
    let mut edges = Vec::new();
    for v in a.normals() {
        let nz: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
        if nz.len() != 2 || v[nz[0]].clone() + v[nz[1]].clone() != Rational::zero() {
            return None;
        }
        edges.push((nz[0] + 1, nz[1] + 1));
    }
    Graph::new(a.dim(), edges).ok()
}

/// `true` iff every vertex's later neighbours form a clique.
pub fn is_elimination_order(g: &Graph, order: &[usize]) -> Result<bool, GraphError> {
    Ok(check_order(g, order)?.is_ok())
}

fn check_order(g: &Graph, order: &[usize]) -> Result<Result<Vec<usize>, usize>, GraphError> {
    let mut pos = vec![usize::MAX; g.n + 1];
    if order.len() != g.n {
        return Err(GraphError::NotAPermutation);
    }
    for (i, &v) in order.iter().enumerate() {
        if v == 0 || v > g.n || pos[v] != usize::MAX {
            return Err(GraphError::NotAPermutation);
        }
        pos[v] = i;
    }
    let mut counts = Vec::with_capacity(g.n);
    for &v in order {
        let later: Vec<usize> = g.neighbours(v).into_iter().filter(|&u| pos[u] > pos[v]).collect();
        for (i, &x) in later.iter().enumerate() {
            if later[i + 1..].iter().any(|&y| !g.has_edge(x, y)) {
                return Ok(Err(v));
            }
        }
        counts.push(later.len());
    }
    Ok(Ok(counts))
}

/// A perfect elimination order (reverse lexicographic BFS), or `None` iff
/// `g` is not chordal.
pub fn perfect_elimination_order(g: &Graph) -> Option<Vec<usize>> {
    let n = g.n;
    let adj: Vec<BTreeSet<usize>> = (0..=n).map(|v| g.neighbours(v)).collect();
    let mut labels: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut done = vec![false; n + 1];
    let mut visit = Vec::with_capacity(n);
    for step in 0..n {
        let v = (1..=n)
            .filter(|&v| !done[v])
            .max_by(|&a, &b| labels[a].cmp(&labels[b]).then(b.cmp(&a)))
            .unwrap();
        done[v] = true;
        visit.push(v);
        for &u in &adj[v] {
            if !done[u] {
                labels[u].push(n - step);
            }
        }
    }
    visit.reverse();
    matches!(check_order(g, &visit), Ok(Ok(_))).then_some(visit)
}

/// Sorted `|N(v) cap later(v)|` over the order; one zero per component.
pub fn exponents_from_elimination(g: &Graph, order: &[usize]) -> Result<Vec<usize>, GraphError> {
    match check_order(g, order)? {
        Ok(mut counts) => {
            counts.sort_unstable();
            Ok(counts)
        }
        Err(v) => Err(GraphError::NotAnEliminationOrder(v)),
    }
}

/// Vertex count plus sorted edges after dropping isolated vertices and
/// relabelling the rest in order; isolated vertices contribute `t` each.
type Key = (usize, Vec<(u16, u16)>);

fn key_of(n: usize, edges: &[(usize, usize)]) -> (Key, usize) {
    let mut used = vec![false; n + 1];
    for &(a, b) in edges {
        used[a] = true;
        used[b] = true;
    }
    let mut label = vec![0u16; n + 1];
    let mut m = 0u16;
    for v in 1..=n {
        if used[v] {
            m += 1;
            label[v] = m;
        }
    }
    let mut e: Vec<(u16, u16)> = edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (label[a], label[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    e.sort_unstable();
    e.dedup();
    ((m as usize, e), n - m as usize)
}

fn t_pow(k: usize) -> IntPoly {
    IntPoly::monomial(k)
}

fn chromatic_rec(key: &Key, memo: &mut HashMap<Key, IntPoly>) -> IntPoly {
    let (n, edges) = key;
    if edges.is_empty() {
        return t_pow(*n);
    }
    if let Some(p) = memo.get(key) {
        return p.clone();
    }
    let mut deg = vec![0usize; n + 1];
    for &(a, b) in edges {
        deg[a as usize] += 1;
        deg[b as usize] += 1;
    }
    let p = if let Some(leaf) = (1..=*n).find(|&v| deg[v] == 1) {
        // P(G) = (t - 1) P(G - leaf)
        let rest: Vec<(usize, usize)> = edges
            .iter()
            .filter(|&&(a, b)| a as usize != leaf && b as usize != leaf)
            .map(|&(a, b)| (a as usize, b as usize))
            .collect();
        let mut rest_key = key_of(*n, &rest);
        rest_key.1 -= 1;
        let sub = chromatic_rec(&rest_key.0, memo).mul(&t_pow(rest_key.1));
        sub.mul(&IntPoly::linear(1))
    } else {
        let (a, b) = (edges[0].0 as usize, edges[0].1 as usize);
        let del: Vec<(usize, usize)> = edges[1..].iter().map(|&(x, y)| (x as usize, y as usize)).collect();
        let con: Vec<(usize, usize)> = del
            .iter()
            .map(|&(x, y)| (if x == b { a } else { x }, if y == b { a } else { y }))
            .filter(|(x, y)| x != y)
            .collect();
        let (dk, di) = key_of(*n, &del);
        // `b` becomes isolated after contraction and is not a vertex.
        let (ck, ci) = key_of(*n, &con);
        let pd = chromatic_rec(&dk, memo).mul(&t_pow(di));
        let pc = chromatic_rec(&ck, memo).mul(&t_pow(ci - 1));
        pd.sub(&pc)
    };
    memo.insert(key.clone(), p.clone());
    p
}

/// Chromatic polynomial by deletion-contraction; equals `chi(A(G), t)`.
pub fn chromatic_polynomial(g: &Graph, cap: usize) -> Result<IntPoly, GraphError> {
    if g.edge_count() > cap {
        return Err(GraphError::CapExceeded { edges: g.edge_count(), cap });
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let (key, iso) = key_of(g.n, &edges);
    let mut memo = HashMap::new();
    Ok(chromatic_rec(&key, &mut memo).mul(&t_pow(iso)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fixture {
    #[serde(rename = "G")]
    G,
    #[serde(rename = "G_prime")]
    GPrime,
}

impl std::str::FromStr for Fixture {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "G" => Ok(Fixture::G),
            "G_prime" | "G'" | "Gprime" => Ok(Fixture::GPrime),
            _ => Err(format!("unknown fixture {s:?}; expected G or G_prime")),
        }
    }
}

pub const FIXTURE_G_JSON: &str = include_str!("../../fixtures/graph_G.json");
pub const FIXTURE_G_PRIME_JSON: &str = include_str!("../../fixtures/graph_G_prime.json");

/// The 10-vertex, 18-edge chordal graph `G` and its one-vertex extension
/// `G'` (new vertex 11 adjacent to 1, 2, 3, 10).
pub fn fixture(which: Fixture) -> Graph {
    let text = match which {
        Fixture::G => FIXTURE_G_JSON,
        Fixture::GPrime => FIXTURE_G_PRIME_JSON,
    };
    serde_json::from_str(text).expect("embedded fixture parses")
}

/// `(0, .., 0, 1, .., 1, ..)` style exponents from the roots of the chromatic
/// polynomial, if it splits over the nonnegative integers.
pub fn chromatic_roots(g: &Graph, cap: usize) -> Result<Option<Vec<usize>>, GraphError> {
    Ok(chromatic_polynomial(g, cap)?.nonnegative_integer_roots().map(|r| r.into_iter().map(|e| e as usize).collect()))
}
