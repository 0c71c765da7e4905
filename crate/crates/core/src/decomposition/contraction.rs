use crate::model::Graph;

use super::KappaPartition;

/// Quotient graph of a partition: one node per class, an edge wherever any
/// instance edge crosses between the two classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionGraph {
    pub graph: Graph,
    pub class_sizes: Vec<usize>,
}

pub fn contraction_graph(partition: &KappaPartition, graph: &Graph) -> ContractionGraph {
    let class_of = partition.class_of(graph.n());
    let mut cg = Graph::empty(partition.len());
    for (a, b) in graph.edges() {
        let (ca, cb) = (class_of[a], class_of[b]);
        if ca != cb {
            cg.add_edge(ca, cb);
        }
    }
    ContractionGraph { graph: cg, class_sizes: partition.classes.iter().map(Vec::len).collect() }
}

impl ContractionGraph {
    pub fn len(&self) -> usize {
        self.class_sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_sizes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::build_kappa_partition;
    use crate::geometry::{rat, Point};
    use crate::model::{build_graph, gen_random, Instance};

    #[test]
    fn single_class() {
        let inst = Instance::new(2, rat(2, 1), vec![Point::from_ints(0, 0, 1), Point::from_ints(1, 1, 10)]).unwrap();
        let p = build_kappa_partition(&inst).unwrap();
        let cg = contraction_graph(&p, &build_graph(&inst));
        assert_eq!(cg.len(), 1);
        assert_eq!(cg.graph.edge_count(), 0);
    }

    #[test]
    fn one_crossing_edge() {
        // cells of side 1.4142: (1,0) and (2,0)
        let inst = Instance::new(
            2,
            rat(2, 1),
            vec![Point::from_ints(15, 1, 10), Point::from_ints(16, 1, 10), Point::from_ints(30, 1, 10)],
        )
        .unwrap();
        let p = build_kappa_partition(&inst).unwrap();
        assert_eq!(p.len(), 2);
        let cg = contraction_graph(&p, &build_graph(&inst));
        assert_eq!(cg.graph.edges(), vec![(0, 1)]);
    }

    #[test]
    fn matches_brute_scan() {
        for seed in 0..10 {
            let inst = gen_random(30, &rat(8, 1), &rat(2, 1), seed);
            let g = build_graph(&inst);
            let p = build_kappa_partition(&inst).unwrap();
            let cg = contraction_graph(&p, &g);
            for i in 0..p.len() {
                for j in 0..p.len() {
                    if i == j {
                        continue;
                    }
                    let brute = p.classes[i].iter().any(|&a| p.classes[j].iter().any(|&b| g.adjacent(a, b)));
                    assert_eq!(cg.graph.adjacent(i, j), brute);
                    if brute {
                        let (ci, cj) = (p.cells[i], p.cells[j]);
                        assert!((ci.0 - cj.0).abs() <= 2 && (ci.1 - cj.1).abs() <= 2);
                    }
                }
            }
        }
    }
}
