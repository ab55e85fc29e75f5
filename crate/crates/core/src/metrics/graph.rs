//! Shortest-path metric on the complete graph over `S_n` whose edge
//! `{a, b}` weighs `D(a b⁻¹) + D(b a⁻¹)`.
//!
//! The weights are right invariant, so `d(p, q) = d(id, q p⁻¹)` and a single
//! single-source run from the identity determines every distance. Edges are
//! generated on the fly (`n!` per vertex) instead of materialised.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::perm::{enumerate, Permutation};
use crate::stats::descents_of;

/// Largest `n` for which the full table is built (5040 vertices).
pub const GRAPH_CAP: usize = 7;

#[derive(Debug, Clone)]
pub struct DescentGraph {
    n: usize,
    /// `T(g) = D(g) + D(g⁻¹)` by lexicographic rank of `g`.
    weight: Vec<u32>,
    /// Distance from the identity by lexicographic rank.
    dist: Vec<u32>,
}

impl DescentGraph {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("descent graph requires n >= 1".into()));
        }
        if n > GRAPH_CAP {
            return Err(Error::CapExceeded {
                what: "descent graph",
                n,
                cap: GRAPH_CAP,
            });
        }
        let perms: Vec<Vec<u8>> = enumerate(n)?
            .map(|p| p.as_zero_based().iter().map(|&x| x as u8).collect())
            .collect();
        let weight: Vec<u32> = perms
            .iter()
            .map(|g| {
                let g: Vec<usize> = g.iter().map(|&x| x as usize).collect();
                let mut inv = vec![0; n];
                for (i, &x) in g.iter().enumerate() {
                    inv[x] = i;
                }
                (descents_of(&g) + descents_of(&inv)) as u32
            })
            .collect();
        let dist = dijkstra_from_identity(n, &perms, &weight);
        Ok(Self { n, weight, dist })
    }

    /// Shared instance per `n`.
    pub fn cached(n: usize) -> Result<&'static Self> {
        static GRAPHS: [OnceLock<DescentGraph>; GRAPH_CAP + 1] = [const { OnceLock::new() }; GRAPH_CAP + 1];
        if n == 0 || n > GRAPH_CAP {
            return Self::new(n).map(|_| unreachable!());
        }
        if let Some(g) = GRAPHS[n].get() {
            return Ok(g);
        }
        let g = Self::new(n)?;
        Ok(GRAPHS[n].get_or_init(|| g))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check(&self, p: &Permutation) -> Result<()> {
        if p.len() != self.n {
            return Err(Error::SizeMismatch {
                left: p.len(),
                right: self.n,
            });
        }
        Ok(())
    }

    pub fn distance(&self, p: &Permutation, q: &Permutation) -> Result<u64> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.dist[q.compose(&p.inverse())?.lex_rank() as usize] as u64)
    }

    /// Direct edge weight `D(p q⁻¹) + D(q p⁻¹)`.
    pub fn edge_weight(&self, p: &Permutation, q: &Permutation) -> Result<u64> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.weight[q.compose(&p.inverse())?.lex_rank() as usize] as u64)
    }

    /// Over all ordered pairs `(p, q)`: how many have graph distance equal
    /// to the direct edge weight, out of `(n!)²`.
    pub fn edge_is_shortest_counts(&self) -> (u64, u64) {
        let v = self.weight.len() as u64;
        let equal = self
            .weight
            .iter()
            .zip(&self.dist)
            .filter(|(w, d)| w == d)
            .count() as u64;
        (equal * v, v * v)
    }
}

fn lex_rank_u8(v: &[u8]) -> usize {
    let n = v.len();
    let mut used: u32 = 0;
    let mut rank = 0usize;
    for (i, &x) in v.iter().enumerate() {
        let smaller_unused = x as u32 - (used & ((1u32 << x) - 1)).count_ones();
        rank = rank * (n - i) + smaller_unused as usize;
        used |= 1 << x;
    }
    rank
}

/// Dense Dijkstra on the complete graph: `O(V²)` selections, and from each
/// settled `u` every `v = g ∘ u` is relaxed with weight `T(g)`.
fn dijkstra_from_identity(n: usize, perms: &[Vec<u8>], weight: &[u32]) -> Vec<u32> {
    let v_count = perms.len();
    let mut dist = vec![u32::MAX; v_count];
    let mut settled = vec![false; v_count];
    dist[0] = 0;
    let mut buf = vec![0u8; n];
    for _ in 0..v_count {
        let Some(u) = (0..v_count)
            .filter(|&i| !settled[i])
            .min_by_key(|&i| dist[i])
        else {
            break;
        };
        settled[u] = true;
        let du = dist[u];
        let pu = &perms[u];
        for (g, pg) in perms.iter().enumerate() {
            let cand = du + weight[g];
            for i in 0..n {
                buf[i] = pg[pu[i] as usize];
            }
            let v = lex_rank_u8(&buf);
            if cand < dist[v] {
                dist[v] = cand;
            }
        }
    }
    dist
}

/// Shortest-path distance, `n <= 7`.
pub fn descent_graph_distance(p: &Permutation, q: &Permutation) -> Result<u64> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    DescentGraph::cached(p.len())?.distance(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{distance, MetricKind};
    use crate::rng::SeededRng;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    /// Floyd-Warshall over the materialised edge set, for tiny n.
    fn floyd(n: usize) -> (Vec<Permutation>, Vec<Vec<u64>>) {
        let all: Vec<_> = enumerate(n).unwrap().collect();
        let v = all.len();
        let mut d = vec![vec![0u64; v]; v];
        for i in 0..v {
            for j in 0..v {
                d[i][j] = distance(MetricKind::DescentEdge, &all[i], &all[j]).unwrap();
            }
        }
        for k in 0..v {
            for i in 0..v {
                for j in 0..v {
                    d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                }
            }
        }
        (all, d)
    }

    #[test]
    fn matches_floyd_warshall() {
        for n in 1..=4 {
            let (all, d) = floyd(n);
            let g = DescentGraph::new(n).unwrap();
            for (i, a) in all.iter().enumerate() {
                for (j, b) in all.iter().enumerate() {
                    assert_eq!(g.distance(a, b).unwrap(), d[i][j]);
                }
            }
        }
    }

    #[test]
    fn graham_pair_shortcut() {
        let pi = p("3 4 1 2 5");
        let sigma = p("1 4 5 2 3");
        assert_eq!(descent_graph_distance(&pi, &sigma).unwrap(), 4);
        assert_eq!(descent_graph_distance(&pi, &pi).unwrap(), 0);
        let g = DescentGraph::cached(5).unwrap();
        assert_eq!(g.edge_weight(&pi, &sigma).unwrap(), 6);
    }

    #[test]
    fn s3_graph_equals_edges() {
        let g = DescentGraph::new(3).unwrap();
        for a in enumerate(3).unwrap() {
            for b in enumerate(3).unwrap() {
                assert_eq!(
                    g.distance(&a, &b).unwrap(),
                    distance(MetricKind::DescentEdge, &a, &b).unwrap()
                );
            }
        }
        let (eq, total) = g.edge_is_shortest_counts();
        assert_eq!(eq, total);
    }

    #[test]
    fn bounded_by_edge_and_triangle_inequality_n6() {
        let g = DescentGraph::cached(6).unwrap();
        let mut rng = SeededRng::new(6);
        for _ in 0..2000 {
            let a = Permutation::sample_uniform(6, &mut rng).unwrap();
            let b = Permutation::sample_uniform(6, &mut rng).unwrap();
            let c = Permutation::sample_uniform(6, &mut rng).unwrap();
            let ab = g.distance(&a, &b).unwrap();
            assert!(ab <= g.edge_weight(&a, &b).unwrap());
            assert!(ab <= g.distance(&a, &c).unwrap() + g.distance(&c, &b).unwrap());
            assert_eq!(ab, g.distance(&b, &a).unwrap());
        }
    }

    #[test]
    fn caps() {
        assert!(matches!(
            DescentGraph::new(8),
            Err(Error::CapExceeded { .. })
        ));
        assert!(DescentGraph::cached(0).is_err());
        assert!(descent_graph_distance(&p("1 2"), &p("1 2 3")).is_err());
    }
}
