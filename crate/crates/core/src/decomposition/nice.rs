use serde::Serialize;
use serde_json::json;

use super::tree::{check_axioms, weighted_width, TreeDecomposition, ValidationReport, WeightFunction};
use super::{ContractionGraph, DecompositionError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "class", rename_all = "lowercase")]
pub enum NodeKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NiceNode {
    pub kind: NodeKind,
    /// Sorted classes in the bag.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// Rooted decomposition with leaf/introduce/forget/join nodes. Children
/// always precede their parent in `nodes`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
    pub root: usize,
}

struct NiceBuilder<'a> {
    td: &'a TreeDecomposition,
    adj: Vec<Vec<usize>>,
    nodes: Vec<NiceNode>,
}

impl NiceBuilder<'_> {
    fn push(&mut self, kind: NodeKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Moves from node `from` (with bag `bag`) to a node whose bag is
    /// `target`: forget first, then introduce, one class at a time.
    fn morph(&mut self, mut from: usize, target: &[usize]) -> usize {
        let mut bag = self.nodes[from].bag.clone();
        let drop: Vec<usize> = bag.iter().copied().filter(|c| target.binary_search(c).is_err()).collect();
        for c in drop {
            bag.retain(|&x| x != c);
            from = self.push(NodeKind::Forget(c), bag.clone(), vec![from]);
        }
        let add: Vec<usize> = target.iter().copied().filter(|c| bag.binary_search(c).is_err()).collect();
        for c in add {
            let pos = bag.binary_search(&c).unwrap_err();
            bag.insert(pos, c);
            from = self.push(NodeKind::Introduce(c), bag.clone(), vec![from]);
        }
        from
    }

    fn build(&mut self, t: usize, parent: Option<usize>) -> usize {
        let target = self.td.bags[t].clone();
        let children: Vec<usize> = self.adj[t].iter().copied().filter(|&c| Some(c) != parent).collect();
        let mut tops = Vec::new();
        if children.is_empty() {
            let leaf = self.push(NodeKind::Leaf, vec![], vec![]);
            tops.push(self.morph(leaf, &target));
        }
        for c in children {
            let sub = self.build(c, Some(t));
            tops.push(self.morph(sub, &target));
        }
        let mut acc = tops[0];
        for &other in &tops[1..] {
            acc = self.push(NodeKind::Join, target.clone(), vec![acc, other]);
        }
        acc
    }
}

/// Converts a valid decomposition into a nice one of the same width rooted
/// at node 0, with an empty root bag.
pub fn to_nice(td: &TreeDecomposition, cg: &ContractionGraph) -> Result<NiceTreeDecomposition, DecompositionError> {
    let report = super::validate(td, cg);
    if !report.valid {
        return Err(DecompositionError::Invalid(report.describe()));
    }
    let mut b = NiceBuilder { td, adj: td.adjacency(), nodes: Vec::new() };
    let top = b.build(0, None);
    let root = b.morph(top, &[]);
    Ok(NiceTreeDecomposition { nodes: b.nodes, root })
}

impl NiceTreeDecomposition {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn bags(&self) -> Vec<Vec<usize>> {
        self.nodes.iter().map(|n| n.bag.clone()).collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.nodes.iter().enumerate().flat_map(|(i, n)| n.children.iter().map(move |&c| (c, i))).collect()
    }

    pub fn weighted_width(&self, class_sizes: &[usize], gamma: &WeightFunction) -> f64 {
        weighted_width(&self.bags(), class_sizes, gamma)
    }

    /// Node kinds along the path from the leftmost leaf to the root.
    pub fn spine(&self) -> Vec<NodeKind> {
        let mut out = Vec::new();
        let mut t = self.root;
        loop {
            out.push(self.nodes[t].kind);
            match self.nodes[t].children.first() {
                Some(&c) => t = c,
                None => break,
            }
        }
        out.reverse();
        out
    }

    pub fn to_json(&self, class_sizes: &[usize], gamma: &WeightFunction) -> serde_json::Value {
        json!({
            "root": self.root,
            "weighted_width": self.weighted_width(class_sizes, gamma),
            "nodes": self.nodes.iter().enumerate().map(|(i, n)| {
                let (kind, class) = match n.kind {
                    NodeKind::Leaf => ("leaf", None),
                    NodeKind::Introduce(c) => ("introduce", Some(c)),
                    NodeKind::Forget(c) => ("forget", Some(c)),
                    NodeKind::Join => ("join", None),
                };
                json!({"id": i, "kind": kind, "class": class, "bag": n.bag, "children": n.children})
            }).collect::<Vec<_>>(),
        })
    }
}

/// Checks both decomposition axioms plus the node-type constraints.
pub fn validate_nice(nice: &NiceTreeDecomposition, cg: &ContractionGraph) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (i, node) in nice.nodes.iter().enumerate() {
        if node.children.iter().any(|&c| c >= i) {
            report.structure.push(format!("node {i} has a child that does not precede it"));
            continue;
        }
        let child_bag = |k: usize| &nice.nodes[node.children[k]].bag;
        let ok = match node.kind {
            NodeKind::Leaf => node.children.is_empty() && node.bag.is_empty(),
            NodeKind::Introduce(c) => {
                node.children.len() == 1 && child_bag(0).binary_search(&c).is_err() && {
                    let mut b = child_bag(0).clone();
                    b.insert(b.binary_search(&c).unwrap_err(), c);
                    b == node.bag
                }
            }
            NodeKind::Forget(c) => {
                node.children.len() == 1 && node.bag.binary_search(&c).is_err() && {
                    let mut b = node.bag.clone();
                    b.insert(b.binary_search(&c).unwrap_err(), c);
                    &b == child_bag(0)
                }
            }
            NodeKind::Join => node.children.len() == 2 && child_bag(0) == &node.bag && child_bag(1) == &node.bag,
        };
        if !ok {
            report.structure.push(format!("node {i} violates its {:?} shape", node.kind));
        }
    }
    if nice.nodes.get(nice.root).is_none_or(|r| !r.bag.is_empty()) {
        report.structure.push("root bag is not empty".into());
    }
    let mut with_parent = vec![false; nice.nodes.len()];
    for n in &nice.nodes {
        for &c in &n.children {
            if with_parent[c] {
                report.structure.push(format!("node {c} has two parents"));
            }
            with_parent[c] = true;
        }
    }
    let mut report = check_axioms(&nice.bags(), &nice.edges(), cg, report);
    report.valid = report.structure.is_empty()
        && report.missing_classes.is_empty()
        && report.uncovered_edges.is_empty()
        && report.disconnected_classes.is_empty();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{build_kappa_partition, contraction_graph, tree_decomposition, validate};
    use crate::geometry::rat;
    use crate::model::{build_graph, gen_random, Graph};

    #[test]
    fn single_bag_two_classes() {
        let cg = ContractionGraph { graph: Graph::from_edges(2, &[(0, 1)]), class_sizes: vec![1, 1] };
        let nice = to_nice(&TreeDecomposition::single_bag(2), &cg).unwrap();
        assert_eq!(
            nice.spine(),
            vec![
                NodeKind::Leaf,
                NodeKind::Introduce(0),
                NodeKind::Introduce(1),
                NodeKind::Forget(0),
                NodeKind::Forget(1)
            ]
        );
        assert_eq!(nice.len(), 5);
        assert!(validate_nice(&nice, &cg).valid);
    }

    #[test]
    fn rejects_invalid_input() {
        let cg = ContractionGraph { graph: Graph::from_edges(2, &[(0, 1)]), class_sizes: vec![1, 1] };
        let td = TreeDecomposition { bags: vec![vec![0], vec![1]], edges: vec![(0, 1)] };
        assert!(to_nice(&td, &cg).is_err());
    }

    #[test]
    fn detects_bad_tags() {
        let cg = ContractionGraph { graph: Graph::empty(1), class_sizes: vec![1] };
        let mut nice = to_nice(&TreeDecomposition::single_bag(1), &cg).unwrap();
        assert!(validate_nice(&nice, &cg).valid);
        nice.nodes[1].kind = NodeKind::Forget(0);
        assert!(!validate_nice(&nice, &cg).valid);
    }

    #[test]
    fn random_decompositions_stay_valid_and_keep_width() {
        let gamma = WeightFunction::default();
        for seed in 0..50 {
            let inst = gen_random(10 + (seed as usize % 40), &rat(10, 1), &rat(2, 1), seed);
            let p = build_kappa_partition(&inst).unwrap();
            let cg = contraction_graph(&p, &build_graph(&inst));
            let td = tree_decomposition(&cg, &gamma, &p.cells);
            assert!(validate(&td, &cg).valid);
            let nice = to_nice(&td, &cg).unwrap();
            let r = validate_nice(&nice, &cg);
            assert!(r.valid, "{}", r.describe());
            let w0 = weighted_width(&td.bags, &cg.class_sizes, &gamma);
            assert!((nice.weighted_width(&cg.class_sizes, &gamma) - w0).abs() < 1e-12);
            let plain = td.width().max(0) as usize + 1;
            assert!(nice.len() <= 4 * plain * td.len() + 4);
        }
    }
}
