use super::{certify_partition, restriction_count, top_exponent, Echelon, MatCertificate, MatError};
use crate::arrangement::{Arrangement, LatticeOptions};
use crate::exactmath::Scalar;

pub const DEFAULT_NODE_CAP: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Try only the given partition (e.g. a root-height partition).
    Hint(Vec<Vec<usize>>),
    /// Backtrack over all block assignments.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(MatCertificate),
    /// `conclusive` is true only when every candidate partition was ruled out.
    NotFound { conclusive: bool },
}

/// Find an MAT-partition.
///
/// The exhaustive search first factors `chi(A, t)`: an MAT-free arrangement
/// has `chi = prod (t - e_i)`, and the block sizes are then forced to
/// `p_k = #{i : e_i >= k}`. Blocks are chosen among the hyperplanes that pass
/// condition (3) on their own, grown one independent normal at a time.
pub fn search_mat_partition<S: Scalar>(
    a: &Arrangement<S>,
    strategy: &SearchStrategy,
    node_cap: usize,
    opts: LatticeOptions,
) -> Result<SearchOutcome, MatError> {
    match strategy {
        SearchStrategy::Hint(p) => Ok(match certify_partition(a, p) {
            Ok(c) => SearchOutcome::Found(c),
            Err(MatError::Violation { .. }) | Err(MatError::DualMismatch { .. }) => {
                SearchOutcome::NotFound { conclusive: false }
            }
            Err(e) => return Err(e),
        }),
        SearchStrategy::Exhaustive => exhaustive(a, node_cap, opts),
    }
}

fn exhaustive<S: Scalar>(
    a: &Arrangement<S>,
    node_cap: usize,
    opts: LatticeOptions,
) -> Result<SearchOutcome, MatError> {
    let none = Ok(SearchOutcome::NotFound { conclusive: true });
    let chi = a.characteristic_polynomial_with(opts)?;
    let Some(roots) = chi.nonnegative_integer_roots() else {
        return none;
    };
    let top = roots.iter().copied().max().unwrap_or(0) as usize;
    let sizes: Vec<usize> = (1..=top).map(|k| roots.iter().filter(|&&e| e as usize >= k).count()).collect();
    if sizes.len() >= 2 && sizes[0] <= sizes[1] {
        return none;
    }
    let mut s = Search { a, sizes: &sizes, nodes: 0, cap: node_cap, blocks: Vec::new() };
    let remaining: Vec<usize> = (0..a.len()).collect();
    if s.step(&[], &vec![0; a.dim()], &remaining)? {
        let cert = certify_partition(a, &s.blocks)?;
        return Ok(SearchOutcome::Found(cert));
    }
    none
}

struct Search<'a, S> {
    a: &'a Arrangement<S>,
    sizes: &'a [usize],
    nodes: usize,
    cap: usize,
    blocks: Vec<Vec<usize>>,
}

impl<S: Scalar> Search<'_, S> {
    fn step(&mut self, current: &[usize], exps: &[usize], remaining: &[usize]) -> Result<bool, MatError> {
        let k = self.blocks.len();
        if k == self.sizes.len() {
            return Ok(remaining.is_empty());
        }
        let p = self.sizes[k];
        let (e, mult) = top_exponent(exps);
        if p > mult {
            return Ok(false);
        }
        let cands: Vec<usize> =
            remaining.iter().copied().filter(|&h| restriction_count(self.a, current, h) == e).collect();
        if k + 1 == self.sizes.len() && cands.len() != remaining.len() {
            return Ok(false);
        }
        let mut next = exps.to_vec();
        let l = next.len();
        for x in &mut next[l - p..] {
            *x = e + 1;
        }
        let mut chosen = Vec::with_capacity(p);
        let mut span = Echelon::new();
        self.choose(current, &next, remaining, &cands, 0, &mut chosen, &mut span)
    }

    #[allow(clippy::too_many_arguments)]
    fn choose(
        &mut self,
        current: &[usize],
        next_exps: &[usize],
        remaining: &[usize],
        cands: &[usize],
        start: usize,
        chosen: &mut Vec<usize>,
        span: &mut Echelon<S>,
    ) -> Result<bool, MatError> {
        let p = self.sizes[self.blocks.len()];
        if chosen.len() == p {
            self.nodes += 1;
            if self.nodes > self.cap {
                return Err(MatError::NodeCapExceeded(self.cap));
            }
            if current.iter().any(|&b| span.spans(self.a.normal(b))) {
                return Ok(false);
            }
            let mut cur = current.to_vec();
            cur.extend(chosen.iter());
            let rest: Vec<usize> = remaining.iter().copied().filter(|h| !chosen.contains(h)).collect();
            self.blocks.push(chosen.clone());
            if self.step(&cur, next_exps, &rest)? {
                return Ok(true);
            }
            self.blocks.pop();
            return Ok(false);
        }
        let need = p - chosen.len();
        for i in start..cands.len() {
            if cands.len() - i < need {
                break;
            }
            if !span.push(self.a.normal(cands[i])) {
                continue;
            }
            chosen.push(cands[i]);
            let found = self.choose(current, next_exps, remaining, cands, i + 1, chosen, span)?;
            chosen.pop();
            span.pop();
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{Field, Rational};
    use crate::rootsys::RootSystem;

    #[test]
    fn boolean_plane_is_one_block() {
        let a = Arrangement::new(
            2,
            Field::Rational,
            vec![
                vec![Rational::from_int(1), Rational::from_int(0)],
                vec![Rational::from_int(0), Rational::from_int(1)],
            ],
        )
        .unwrap();
        match search_mat_partition(&a, &SearchStrategy::Exhaustive, DEFAULT_NODE_CAP, LatticeOptions::default())
            .unwrap()
        {
            SearchOutcome::Found(c) => assert_eq!(c.partition, vec![vec![0, 1]]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hint_and_exhaustive_agree_on_b2() {
        let rs = RootSystem::new("B2".parse().unwrap());
        let a = rs.weyl_arrangement();
        let hint = SearchStrategy::Hint(rs.root_height_partition(&rs.full_ideal()));
        let found = search_mat_partition(&a, &hint, DEFAULT_NODE_CAP, LatticeOptions::default()).unwrap();
        assert!(matches!(found, SearchOutcome::Found(ref c) if c.exponents == vec![1, 3]));
        let ex = search_mat_partition(&a, &SearchStrategy::Exhaustive, DEFAULT_NODE_CAP, LatticeOptions::default())
            .unwrap();
        assert!(matches!(ex, SearchOutcome::Found(ref c) if c.exponents == vec![1, 3]));
    }

    #[test]
    fn non_factoring_polynomial_is_conclusive() {
        // Four generic planes in 3-space: chi = (t - 1)(t^2 - 3t + 3).
        let rows = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]];
        let a = Arrangement::new(
            3,
            Field::Rational,
            rows.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect(),
        )
        .unwrap();
        let out = search_mat_partition(&a, &SearchStrategy::Exhaustive, DEFAULT_NODE_CAP, LatticeOptions::default())
            .unwrap();
        assert_eq!(out, SearchOutcome::NotFound { conclusive: true });
    }
}
