//! Exact reference solvers and a greedy bound, independent of the
//! geometric machinery.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::model::{build_graph, CliqueCover, Graph, Instance};

use super::SolverError;

/// Largest vertex count accepted by the subset DP.
pub const BRUTE_FORCE_CAP: usize = 20;
/// Largest vertex count accepted by optimal-cover enumeration.
pub const ENUMERATION_CAP: usize = 10;

/// Maximal cliques of `g` inside `allowed` that contain `v` (Bron-Kerbosch
/// with pivoting), as bitmasks.
fn maximal_cliques_with(adj: &[u32], v: usize, allowed: u32) -> Vec<u32> {
    fn bk(adj: &[u32], r: u32, p: u32, x: u32, out: &mut Vec<u32>) {
        if p == 0 {
            if x == 0 {
                out.push(r);
            }
            return;
        }
        let pivot = (p | x).trailing_zeros() as usize;
        let mut rest = p & !adj[pivot];
        let (mut p, mut x) = (p, x);
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            bk(adj, r | 1 << u, p & adj[u], x & adj[u], out);
            p &= !(1 << u);
            x |= 1 << u;
        }
    }
    let mut out = Vec::new();
    bk(adj, 1 << v, allowed & adj[v], 0, &mut out);
    out.sort_unstable();
    out
}

/// Exact minimum clique cover by DP over vertex subsets.
pub fn brute_force_graph(g: &Graph) -> Result<(usize, CliqueCover), SolverError> {
    let n = g.n();
    if n > BRUTE_FORCE_CAP {
        return Err(SolverError::CapExceeded { n, cap: BRUTE_FORCE_CAP });
    }
    let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).ones().fold(0u32, |m, u| m | 1 << u)).collect();
    let mut memo: HashMap<u32, (u32, u32)> = HashMap::from([(0, (0, 0))]);
    fn best(s: u32, adj: &[u32], memo: &mut HashMap<u32, (u32, u32)>) -> u32 {
        if let Some(&(k, _)) = memo.get(&s) {
            return k;
        }
        let v = s.trailing_zeros() as usize;
        let mut found = (u32::MAX, 0);
        for c in maximal_cliques_with(adj, v, s) {
            let k = best(s & !c, adj, memo) + 1;
            if k < found.0 {
                found = (k, c);
            }
        }
        memo.insert(s, found);
        found.0
    }
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let k = best(full, &adj, &mut memo) as usize;
    let mut cliques = Vec::new();
    let mut s = full;
    while s != 0 {
        let c = memo[&s].1;
        cliques.push((0..n).filter(|&i| c >> i & 1 == 1).collect());
        s &= !c;
    }
    Ok((k, CliqueCover::new(cliques).canonical()))
}

pub fn brute_force_min_cover(inst: &Instance) -> Result<(usize, CliqueCover), SolverError> {
    brute_force_graph(&build_graph(inst))
}

/// Repeatedly takes the lowest uncovered vertex and greedily grows a
/// maximal clique among uncovered vertices in index order.
pub fn greedy_graph(g: &Graph) -> (usize, CliqueCover) {
    let n = g.n();
    let mut covered = FixedBitSet::with_capacity(n);
    let mut cliques = Vec::new();
    for v in 0..n {
        if covered.contains(v) {
            continue;
        }
        let mut clique = vec![v];
        covered.insert(v);
        for u in g.neighbors(v).ones() {
            if !covered.contains(u) && clique.iter().all(|&w| g.adjacent(u, w)) {
                clique.push(u);
                covered.insert(u);
            }
        }
        cliques.push(clique);
    }
    (cliques.len(), CliqueCover::new(cliques).canonical())
}

pub fn greedy_upper_bound(inst: &Instance) -> (usize, CliqueCover) {
    greedy_graph(&build_graph(inst))
}

struct Bnb<'a> {
    g: &'a Graph,
    order: Vec<usize>,
    best: usize,
    best_cliques: Vec<Vec<usize>>,
}

impl Bnb<'_> {
    /// Pairwise non-adjacent unassigned vertices each need their own clique;
    /// an existing clique can absorb at most one of them.
    fn lower_bound(&self, i: usize, cliques: &[Vec<usize>]) -> usize {
        let mut indep: Vec<usize> = Vec::new();
        for &v in &self.order[i..] {
            if indep.iter().all(|&u| !self.g.adjacent(u, v)) {
                indep.push(v);
            }
        }
        let absorbing =
            cliques.iter().filter(|c| indep.iter().any(|&v| c.iter().all(|&w| self.g.adjacent(v, w)))).count();
        cliques.len() + indep.len().saturating_sub(absorbing)
    }

    fn search(&mut self, i: usize, cliques: &mut Vec<Vec<usize>>) {
        if cliques.len() >= self.best {
            return;
        }
        if i == self.order.len() {
            self.best = cliques.len();
            self.best_cliques = cliques.clone();
            return;
        }
        if self.lower_bound(i, cliques) >= self.best {
            return;
        }
        let v = self.order[i];
        for c in 0..cliques.len() {
            if cliques[c].iter().all(|&w| self.g.adjacent(v, w)) {
                cliques[c].push(v);
                self.search(i + 1, cliques);
                cliques[c].pop();
            }
        }
        cliques.push(vec![v]);
        self.search(i + 1, cliques);
        cliques.pop();
    }
}

/// Exact minimum clique cover by branch and bound, solving connected
/// components separately. Vertices are assigned in breadth-first order.
pub fn branch_and_bound_graph(g: &Graph) -> (usize, CliqueCover) {
    let mut all = Vec::new();
    for comp in g.components() {
        let sub = g.induced(&comp);
        let mut order = Vec::with_capacity(comp.len());
        let mut seen = vec![false; comp.len()];
        let mut queue = std::collections::VecDeque::new();
        for s in 0..comp.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for u in sub.neighbors(v).ones() {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        let (ub, greedy) = greedy_graph(&sub);
        let mut bnb = Bnb { g: &sub, order, best: ub, best_cliques: greedy.cliques };
        bnb.search(0, &mut Vec::new());
        all.extend(bnb.best_cliques.into_iter().map(|c| c.into_iter().map(|v| comp[v]).collect::<Vec<_>>()));
    }
    let cover = CliqueCover::new(all).canonical();
    (cover.len(), cover)
}

pub fn branch_and_bound_min_cover(inst: &Instance) -> (usize, CliqueCover) {
    branch_and_bound_graph(&build_graph(inst))
}

/// All minimum clique covers, each canonical, in lexicographic order.
pub fn enumerate_optimal_covers(inst: &Instance) -> Result<Vec<CliqueCover>, SolverError> {
    let n = inst.len();
    if n > ENUMERATION_CAP {
        return Err(SolverError::CapExceeded { n, cap: ENUMERATION_CAP });
    }
    let g = build_graph(inst);
    let (k, _) = brute_force_graph(&g)?;
    fn rec(g: &Graph, v: usize, k: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<CliqueCover>) {
        if v == g.n() {
            if blocks.len() == k {
                out.push(CliqueCover::new(blocks.clone()).canonical());
            }
            return;
        }
        for i in 0..blocks.len() {
            if blocks[i].iter().all(|&w| g.adjacent(v, w)) {
                blocks[i].push(v);
                rec(g, v + 1, k, blocks, out);
                blocks[i].pop();
            }
        }
        if blocks.len() < k {
            blocks.push(vec![v]);
            rec(g, v + 1, k, blocks, out);
            blocks.pop();
        }
    }
    let mut out = Vec::new();
    rec(&g, 0, k, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.cliques.cmp(&b.cliques));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{rat, Point};
    use crate::model::{gen_random, verify_cover};

    fn line(xs: &[i64]) -> Instance {
        Instance::new(2, rat(2, 1), xs.iter().map(|&x| Point::from_ints(x, 0, 1)).collect()).unwrap()
    }

    #[test]
    fn far_points_and_cliques() {
        assert_eq!(brute_force_min_cover(&line(&[0, 10, 20, 30])).unwrap().0, 4);
        assert_eq!(brute_force_min_cover(&line(&[0, 1, 2])).unwrap().0, 1);
        assert_eq!(branch_and_bound_min_cover(&line(&[0, 1, 2])).0, 1);
        assert_eq!(branch_and_bound_min_cover(&line(&[0, 1, 50, 51])).0, 2);
        assert_eq!(greedy_upper_bound(&line(&[0, 1, 2])).0, 1);
        assert_eq!(greedy_upper_bound(&line(&[0, 10, 20])).0, 3);
        assert_eq!(brute_force_min_cover(&line(&[])).unwrap().0, 0);
    }

    #[test]
    fn cap_is_enforced() {
        let inst = gen_random(21, &rat(5, 1), &rat(2, 1), 1);
        assert!(matches!(brute_force_min_cover(&inst), Err(SolverError::CapExceeded { .. })));
    }

    #[test]
    fn oracles_agree_and_witnesses_verify() {
        for seed in 0..100 {
            let n = 1 + (seed as usize % 14);
            let inst = gen_random(n, &rat([3, 5, 8][seed as usize % 3], 1), &rat(2, 1), seed);
            let (kb, cb) = brute_force_min_cover(&inst).unwrap();
            let (kn, cn) = branch_and_bound_min_cover(&inst);
            let (kg, cg) = greedy_upper_bound(&inst);
            assert_eq!(kb, kn, "seed {seed}");
            assert!(kg >= kb);
            for (k, c) in [(kb, &cb), (kn, &cn), (kg, &cg)] {
                assert_eq!(c.len(), k);
                assert!(verify_cover(&inst, c, true).unwrap().accepted);
            }
        }
    }

    #[test]
    fn optimal_cover_enumeration() {
        let two = line(&[0, 10]);
        assert_eq!(enumerate_optimal_covers(&two).unwrap(), vec![CliqueCover::new(vec![vec![0], vec![1]])]);
        let tri = line(&[0, 1, 2]);
        assert_eq!(enumerate_optimal_covers(&tri).unwrap().len(), 1);
        // a path a-b-c has two optimal covers
        assert_eq!(enumerate_optimal_covers(&line(&[0, 2, 4])).unwrap().len(), 2);
        for seed in 0..10 {
            let inst = gen_random(8, &rat(5, 1), &rat(2, 1), seed);
            let k = brute_force_min_cover(&inst).unwrap().0;
            let all = enumerate_optimal_covers(&inst).unwrap();
            assert!(!all.is_empty());
            for c in all {
                assert_eq!(c.len(), k);
                assert!(verify_cover(&inst, &c, true).unwrap().accepted);
            }
        }
    }
}
