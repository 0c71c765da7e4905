use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::geometry::{rat, Rational};
use crate::model::{Graph, Instance};

use super::DecompositionError;

/// Partition of the vertex set into classes that each induce a clique
/// (`kappa = 1`), with the grid cell of every class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaPartition {
    pub classes: Vec<Vec<usize>>,
    /// Grid cell `(i, j)` of each class.
    pub cells: Vec<(i64, i64)>,
    pub kappa: usize,
    pub cell_side: Rational,
}

/// `s <= D / sqrt(2)` with `0.7071 < 1/sqrt(2)`.
pub fn cell_side(diameter: &Rational) -> Rational {
    diameter * rat(7071, 10000)
}

fn floor_div(x: &Rational, s: &Rational) -> i64 {
    let q = x / s;
    let f: BigInt = q.numer().div_floor(q.denom());
    f.to_i64().expect("cell index fits in i64")
}

/// Groups points into half-open grid cells of side `s <= D / sqrt(2)`; each
/// cell has diameter below `D`, so every class is a clique.
pub fn build_kappa_partition(inst: &Instance) -> Result<KappaPartition, DecompositionError> {
    if inst.dim != 2 {
        return Err(DecompositionError::NotPlanar(inst.dim));
    }
    let s = cell_side(&inst.diameter);
    let mut by_cell: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (v, p) in inst.points.iter().enumerate() {
        by_cell.entry((floor_div(p.x(), &s), floor_div(p.y(), &s))).or_default().push(v);
    }
    let (cells, classes) = by_cell.into_iter().unzip();
    Ok(KappaPartition { classes, cells, kappa: 1, cell_side: s })
}

impl KappaPartition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class index of every vertex.
    pub fn class_of(&self, n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for (c, class) in self.classes.iter().enumerate() {
            for &v in class {
                out[v] = c;
            }
        }
        out
    }

    /// Checks that the classes partition `0..n` and each induces a clique.
    pub fn check(&self, graph: &Graph) -> Result<(), String> {
        let n = graph.n();
        let mut seen = vec![false; n];
        for (c, class) in self.classes.iter().enumerate() {
            if class.is_empty() {
                return Err(format!("class {c} is empty"));
            }
            for &v in class {
                if v >= n || seen[v] {
                    return Err(format!("vertex {v} repeated or out of range"));
                }
                seen[v] = true;
            }
            if !graph.is_clique(class) {
                return Err(format!("class {c} is not a clique"));
            }
        }
        match seen.iter().position(|s| !s) {
            Some(v) => Err(format!("vertex {v} is in no class")),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::model::{build_graph, gen_random};

    #[test]
    fn tight_cluster_is_one_class() {
        let inst = Instance::new(
            2,
            rat(2, 1),
            vec![Point::from_ints(1, 1, 10), Point::from_ints(2, 1, 10), Point::from_ints(1, 3, 10)],
        )
        .unwrap();
        let p = build_kappa_partition(&inst).unwrap();
        assert_eq!(p.classes, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn distant_points_split() {
        let inst = Instance::new(2, rat(2, 1), vec![Point::from_ints(1, 1, 10), Point::from_ints(10, 10, 1)]).unwrap();
        let p = build_kappa_partition(&inst).unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn classes_are_cliques() {
        for seed in 0..20 {
            let inst = gen_random(40, &rat(8, 1), &rat(2, 1), seed);
            let g = build_graph(&inst);
            let p = build_kappa_partition(&inst).unwrap();
            p.check(&g).unwrap();
            for class in &p.classes {
                for (i, &a) in class.iter().enumerate() {
                    for &b in &class[i + 1..] {
                        let o = crate::geometry::cmp_dist(&inst.points[a], &inst.points[b], &inst.diameter).unwrap();
                        assert_ne!(o, std::cmp::Ordering::Greater);
                    }
                }
            }
        }
    }

    #[test]
    fn negative_coordinates_floor_correctly() {
        let s = cell_side(&rat(2, 1));
        assert_eq!(floor_div(&rat(-1, 100), &s), -1);
        assert_eq!(floor_div(&rat(0, 1), &s), 0);
    }

    #[test]
    fn rejects_non_planar() {
        let inst = Instance::new(3, rat(1, 1), vec![]).unwrap();
        assert!(build_kappa_partition(&inst).is_err());
    }
}
