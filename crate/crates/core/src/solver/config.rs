use serde::Serialize;

use crate::cliques::RelevantCliqueSet;

/// A tiling of a class by disjoint relevant cliques plus one covered flag
/// per tile.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Configuration {
    pub tiling: Vec<Vec<usize>>,
    pub chi: Vec<bool>,
}

/// All exact covers of the base set by at most `lambda` members of `masks`,
/// branching on the lowest uncovered position. Tiles within a tiling are
/// ordered by their lowest position.
pub fn enumerate_tilings(masks: &[u64], size: usize, lambda: usize) -> Vec<Vec<u64>> {
    let mut by_low: Vec<Vec<u64>> = vec![Vec::new(); size];
    let mut sorted = masks.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for m in sorted {
        if m != 0 {
            by_low[m.trailing_zeros() as usize].push(m);
        }
    }
    let full = if size == 64 { u64::MAX } else { (1u64 << size) - 1 };
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(uncovered: u64, lambda: usize, by_low: &[Vec<u64>], current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if uncovered == 0 {
            out.push(current.clone());
            return;
        }
        if current.len() == lambda {
            return;
        }
        let i = uncovered.trailing_zeros() as usize;
        for &m in &by_low[i] {
            if m & !uncovered == 0 {
                current.push(m);
                rec(uncovered & !m, lambda, by_low, current, out);
                current.pop();
            }
        }
    }
    rec(full, lambda, &by_low, &mut current, &mut out);
    out
}

/// Every tiling of `rc.base` by at most `lambda` relevant cliques, crossed
/// with all flag vectors.
pub fn enumerate_configurations(rc: &RelevantCliqueSet, lambda: usize) -> Vec<Configuration> {
    let mut out = Vec::new();
    for tiling in enumerate_tilings(&rc.masks(), rc.base.len(), lambda) {
        let tiles: Vec<Vec<usize>> = tiling
            .iter()
            .map(|&m| (0..rc.base.len()).filter(|&i| m >> i & 1 == 1).map(|i| rc.base[i]).collect())
            .collect();
        for flags in 0u64..1 << tiles.len() {
            out.push(Configuration {
                tiling: tiles.clone(),
                chi: (0..tiles.len()).map(|i| flags >> i & 1 == 1).collect(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliques::relevant_cliques;
    use crate::geometry::{rat, Point};
    use crate::model::{gen_random, Instance};

    fn rc(base: Vec<usize>, cliques: Vec<Vec<usize>>) -> RelevantCliqueSet {
        RelevantCliqueSet { base, cliques, halfplanes: 0 }
    }

    #[test]
    fn single_vertex() {
        let c = enumerate_configurations(&rc(vec![4], vec![vec![4]]), 12);
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn pair_with_lambda_two() {
        let c = enumerate_configurations(&rc(vec![0, 1], vec![vec![0], vec![0, 1], vec![1]]), 2);
        assert_eq!(c.len(), 6);
        let c = enumerate_configurations(&rc(vec![0, 1], vec![vec![0], vec![0, 1], vec![1]]), 1);
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn lambda_too_small_gives_nothing() {
        let c = enumerate_configurations(&rc(vec![0, 1], vec![vec![0], vec![1]]), 1);
        assert!(c.is_empty());
    }

    #[test]
    fn random_classes_tile_exactly() {
        for seed in 0..10 {
            let inst = gen_random(6, &rat(1, 1), &rat(2, 1), seed);
            let base: Vec<usize> = (0..6).collect();
            let r = relevant_cliques(&inst, &base, 1).unwrap();
            let tilings = enumerate_tilings(&r.masks(), 6, 12);
            assert!(!tilings.is_empty());
            for t in &tilings {
                let mut union = 0u64;
                for &m in t {
                    assert_eq!(union & m, 0);
                    union |= m;
                }
                assert_eq!(union, 0b111111);
            }
            // all 6 points lie in a box of side 1, so every subset is a clique
            let all: Vec<u64> = (1..64).collect();
            assert_eq!(enumerate_tilings(&all, 6, 12).len(), 203);
        }
    }

    #[test]
    fn configurations_of_a_real_class() {
        let inst = Instance::new(2, rat(2, 1), vec![Point::from_ints(0, 0, 1), Point::from_ints(1, 0, 1)]).unwrap();
        let r = relevant_cliques(&inst, &[0, 1], 0).unwrap();
        assert_eq!(enumerate_configurations(&r, 12).len(), 6);
    }
}
