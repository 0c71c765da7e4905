use std::collections::HashMap;

use serde::Serialize;

/// Graph on at most 64 vertices with a marked subset. Each vertex stands for
/// a tile; two vertices are adjacent when the union of their tiles is a
/// clique.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AuxiliaryGraph {
    pub adj: Vec<u64>,
    pub marked: u64,
}

impl AuxiliaryGraph {
    pub fn new(n: usize, edges: &[(usize, usize)], marked: u64) -> Self {
        assert!(n <= 64);
        let mut adj = vec![0u64; n];
        for &(a, b) in edges {
            if a != b {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
        }
        Self { adj, marked }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn full(&self) -> u64 {
        if self.n() == 64 {
            u64::MAX
        } else {
            (1u64 << self.n()) - 1
        }
    }

    pub fn is_clique(&self, set: u64) -> bool {
        let mut rest = set;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if set & !(self.adj[v] | 1 << v) != 0 {
                return false;
            }
        }
        true
    }

    /// Subgraph induced by `set`, renumbered in increasing order.
    pub fn induced(&self, set: u64) -> Self {
        let verts: Vec<usize> = (0..self.n()).filter(|&v| set >> v & 1 == 1).collect();
        let mut adj = vec![0u64; verts.len()];
        let mut marked = 0;
        for (i, &a) in verts.iter().enumerate() {
            if self.marked >> a & 1 == 1 {
                marked |= 1 << i;
            }
            for (j, &b) in verts.iter().enumerate() {
                if self.adj[a] >> b & 1 == 1 {
                    adj[i] |= 1 << j;
                }
            }
        }
        Self { adj, marked }
    }
}

/// Memoized subset DP: for a vertex set `S`, the set of `k` (as a bitmask)
/// such that `S` splits into `k` cliques each containing a marked vertex.
/// The lowest vertex of `S` decides which clique is removed next.
#[derive(Debug)]
pub struct InnerDp {
    pub graph: AuxiliaryGraph,
    memo: HashMap<u64, u64>,
}

impl InnerDp {
    pub fn new(graph: AuxiliaryGraph) -> Self {
        Self { graph, memo: HashMap::from([(0, 1)]) }
    }

    /// Admissible cliques of `set` that contain its lowest vertex.
    fn admissible(&self, set: u64) -> Vec<u64> {
        let v = set.trailing_zeros() as usize;
        let mut out = Vec::new();
        let mut stack = vec![(1u64 << v, set & self.graph.adj[v])];
        while let Some((clique, cand)) = stack.pop() {
            if clique & self.graph.marked != 0 {
                out.push(clique);
            }
            let mut rest = cand;
            while rest != 0 {
                let u = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                // extend only with vertices above u to visit each clique once
                stack.push((clique | 1 << u, rest & self.graph.adj[u]));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn sizes(&mut self, set: u64) -> u64 {
        if let Some(&r) = self.memo.get(&set) {
            return r;
        }
        let mut r = 0u64;
        for d in self.admissible(set) {
            r |= self.sizes(set & !d) << 1;
        }
        self.memo.insert(set, r);
        r
    }

    /// A split of `set` into exactly `k` admissible cliques.
    pub fn witness(&mut self, set: u64, k: usize) -> Option<Vec<u64>> {
        if self.sizes(set) >> k & 1 == 0 {
            return None;
        }
        let mut out = Vec::new();
        let (mut s, mut k) = (set, k);
        while s != 0 {
            let d = self
                .admissible(s)
                .into_iter()
                .find(|&d| self.sizes(s & !d) >> (k - 1) & 1 == 1)
                .expect("memo promised a split");
            out.push(d);
            s &= !d;
            k -= 1;
        }
        Some(out)
    }
}

/// Sizes of all covers of the whole graph by cliques that each contain a
/// marked vertex (bit `k` set when size `k` is possible).
pub fn admissible_cover_sizes(graph: &AuxiliaryGraph) -> u64 {
    InnerDp::new(graph.clone()).sizes(graph.full())
}

/// Whether the graph splits into exactly `k` cliques each containing a
/// marked vertex.
pub fn forget_feasible(graph: &AuxiliaryGraph, k: usize) -> bool {
    k < 64 && admissible_cover_sizes(graph) >> k & 1 == 1
}

/// Oracle: enumerates every set partition of the vertex set.
pub fn partition_cover_sizes(graph: &AuxiliaryGraph) -> u64 {
    fn rec(g: &AuxiliaryGraph, v: usize, blocks: &mut Vec<u64>, out: &mut u64) {
        if v == g.n() {
            if blocks.iter().all(|&b| g.is_clique(b) && b & g.marked != 0) {
                *out |= 1 << blocks.len();
            }
            return;
        }
        for i in 0..blocks.len() {
            if blocks[i] & !g.adj[v] != 0 {
                continue;
            }
            blocks[i] |= 1 << v;
            rec(g, v + 1, blocks, out);
            blocks[i] &= !(1 << v);
        }
        blocks.push(1 << v);
        rec(g, v + 1, blocks, out);
        blocks.pop();
    }
    let mut out = 0;
    rec(graph, 0, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_marked_vertex() {
        let g = AuxiliaryGraph::new(1, &[], 1);
        assert!(forget_feasible(&g, 1));
        assert!(!forget_feasible(&g, 0));
    }

    #[test]
    fn two_far_marked_vertices() {
        let g = AuxiliaryGraph::new(2, &[], 0b11);
        assert!(!forget_feasible(&g, 1));
        assert!(forget_feasible(&g, 2));
    }

    #[test]
    fn unmarked_needs_a_marked_partner() {
        let g = AuxiliaryGraph::new(2, &[], 0b01);
        assert_eq!(admissible_cover_sizes(&g), 0);
        let g = AuxiliaryGraph::new(2, &[(0, 1)], 0b01);
        assert_eq!(admissible_cover_sizes(&g), 0b10);
    }

    #[test]
    fn empty_graph_has_the_empty_cover() {
        let g = AuxiliaryGraph::new(0, &[], 0);
        assert_eq!(admissible_cover_sizes(&g), 1);
    }

    #[test]
    fn random_graphs_match_partition_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..=12);
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(0.5) {
                        edges.push((a, b));
                    }
                }
            }
            let marked = rng.gen_range(0..1u64 << n);
            let g = AuxiliaryGraph::new(n, &edges, marked);
            let sizes = admissible_cover_sizes(&g);
            assert_eq!(sizes, partition_cover_sizes(&g));
            let mut dp = InnerDp::new(g.clone());
            for k in 0..=n {
                if let Some(w) = dp.witness(g.full(), k) {
                    assert_eq!(w.len(), k);
                    assert_eq!(w.iter().fold(0, |a, b| a | b), g.full());
                    assert!(w.iter().all(|&d| g.is_clique(d) && d & g.marked != 0));
                }
            }
        }
    }
}
