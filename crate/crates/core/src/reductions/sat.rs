//! Grid-embedded SAT to clique cover of unit disks in the plane.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::geometry::{rat, Point, Rational};
use crate::model::{build_graph, Graph, Instance};

use super::ReductionError;

/// CNF with DIMACS-style literals: `v` or `-v` for variable `v` in `1..=variables`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf {
    pub variables: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn from_json(text: &str) -> Result<Self, ReductionError> {
        serde_json::from_str(text).map_err(|e| ReductionError::InvalidFormula(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("formula serializes")
    }
}

/// A formula in which every variable occurs exactly twice positively and
/// once negatively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedFormula {
    pub cnf: Cnf,
    /// Original variable of each remaining variable.
    pub original: Vec<usize>,
    /// Whether the variable's sign was flipped.
    pub flipped: Vec<bool>,
    /// Clause index in the input of each remaining clause.
    pub clause_origin: Vec<usize>,
}

/// Positive and negative occurrences of a variable, as clause indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Occurrences {
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
}

pub fn occurrences(cnf: &Cnf) -> Vec<Occurrences> {
    let mut occ = vec![Occurrences::default(); cnf.variables];
    for (c, clause) in cnf.clauses.iter().enumerate() {
        for &lit in clause {
            let o = &mut occ[lit.unsigned_abs() as usize - 1];
            if lit > 0 {
                o.positive.push(c);
            } else {
                o.negative.push(c);
            }
        }
    }
    occ
}

impl NormalizedFormula {
    pub fn occurrences(&self) -> Vec<Occurrences> {
        occurrences(&self.cnf)
    }
}

fn check_cnf(cnf: &Cnf) -> Result<(), ReductionError> {
    let bad = |msg: String| Err(ReductionError::InvalidFormula(msg));
    for (c, clause) in cnf.clauses.iter().enumerate() {
        if clause.is_empty() {
            return bad(format!("clause {c} is empty"));
        }
        if clause.len() > 3 {
            return bad(format!("clause {c} has {} literals", clause.len()));
        }
        let mut seen = HashSet::new();
        for &lit in clause {
            if lit == 0 || lit.unsigned_abs() as usize > cnf.variables {
                return bad(format!("clause {c} has literal {lit} out of range"));
            }
            if !seen.insert(lit.unsigned_abs()) {
                return bad(format!("clause {c} mentions variable {} twice", lit.unsigned_abs()));
            }
        }
    }
    for (v, o) in occurrences(cnf).iter().enumerate() {
        if o.positive.len() + o.negative.len() > 3 {
            return bad(format!("variable {} occurs more than three times", v + 1));
        }
    }
    Ok(())
}

/// Removes clauses containing pure variables until none remain, then flips
/// variables occurring once positively and twice negatively. Variables left
/// without occurrences are dropped and the rest renumbered.
pub fn normalize_formula(cnf: &Cnf) -> Result<NormalizedFormula, ReductionError> {
    check_cnf(cnf)?;
    let mut alive: Vec<bool> = vec![true; cnf.clauses.len()];
    loop {
        let live = Cnf {
            variables: cnf.variables,
            clauses: cnf.clauses.iter().zip(&alive).map(|(c, &a)| if a { c.clone() } else { vec![] }).collect(),
        };
        let occ = occurrences(&live);
        let mut changed = false;
        for o in &occ {
            let pure = o.positive.is_empty() != o.negative.is_empty();
            if pure {
                for &c in o.positive.iter().chain(&o.negative) {
                    changed |= std::mem::replace(&mut alive[c], false);
                }
            }
        }
        if !changed {
            break;
        }
    }
    let kept: Vec<usize> = (0..cnf.clauses.len()).filter(|&c| alive[c]).collect();
    let live = Cnf { variables: cnf.variables, clauses: kept.iter().map(|&c| cnf.clauses[c].clone()).collect() };
    let occ = occurrences(&live);
    let mut renumber = vec![0i32; cnf.variables];
    let (mut original, mut flipped) = (Vec::new(), Vec::new());
    for (v, o) in occ.iter().enumerate() {
        match (o.positive.len(), o.negative.len()) {
            (0, 0) => continue,
            (2, 1) => flipped.push(false),
            (1, 2) => flipped.push(true),
            (positive, negative) => {
                return Err(ReductionError::IrreduciblePattern { variable: v + 1, positive, negative })
            }
        }
        original.push(v + 1);
        renumber[v] = original.len() as i32;
    }
    let clauses = live
        .clauses
        .iter()
        .map(|clause| {
            clause
                .iter()
                .map(|&lit| {
                    let v = lit.unsigned_abs() as usize - 1;
                    let sign = if flipped[renumber[v] as usize - 1] { -lit.signum() } else { lit.signum() };
                    sign * renumber[v]
                })
                .collect()
        })
        .collect();
    Ok(NormalizedFormula { cnf: Cnf { variables: original.len(), clauses }, original, flipped, clause_origin: kept })
}

/// Truth-table satisfiability, for small formulas.
pub fn is_satisfiable(cnf: &Cnf) -> bool {
    assert!(cnf.variables <= 24, "truth table over {} variables", cnf.variables);
    (0u32..1 << cnf.variables).any(|assign| {
        cnf.clauses
            .iter()
            .all(|clause| clause.iter().any(|&lit| (assign >> (lit.unsigned_abs() - 1) & 1 == 1) == (lit > 0)))
    })
}

pub type GridPoint = [i64; 2];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wire {
    pub variable: usize,
    pub clause: usize,
    pub path: Vec<GridPoint>,
}

/// Grid positions of the variables and clauses of a normalized formula and
/// one orthogonal grid path per variable occurrence. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridEmbedding {
    pub variables: Vec<GridPoint>,
    pub clauses: Vec<GridPoint>,
    pub wires: Vec<Wire>,
}

fn step(a: GridPoint, b: GridPoint) -> Option<GridPoint> {
    let d = [b[0] - a[0], b[1] - a[1]];
    (d[0].abs() + d[1].abs() == 1).then_some(d)
}

impl GridEmbedding {
    pub fn from_json(text: &str) -> Result<Self, ReductionError> {
        serde_json::from_str(text).map_err(|e| ReductionError::InvalidEmbedding(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("embedding serializes")
    }

    /// Total number of wire edges.
    pub fn wire_length(&self) -> usize {
        self.wires.iter().map(|w| w.path.len() - 1).sum()
    }

    /// Doubles every coordinate and inserts the midpoint of each wire edge.
    pub fn refine(&self) -> Self {
        let dbl = |p: &GridPoint| [2 * p[0], 2 * p[1]];
        let wires = self
            .wires
            .iter()
            .map(|w| {
                let mut path = Vec::with_capacity(2 * w.path.len());
                for (i, p) in w.path.iter().enumerate() {
                    if i > 0 {
                        let q = &w.path[i - 1];
                        path.push([p[0] + q[0], p[1] + q[1]]);
                    }
                    path.push(dbl(p));
                }
                Wire { variable: w.variable, clause: w.clause, path }
            })
            .collect();
        Self {
            variables: self.variables.iter().map(dbl).collect(),
            clauses: self.clauses.iter().map(dbl).collect(),
            wires,
        }
    }

    pub fn validate(&self, formula: &NormalizedFormula) -> Result<(), ReductionError> {
        let bad = |msg: String| Err(ReductionError::InvalidEmbedding(msg));
        if self.variables.len() != formula.cnf.variables || self.clauses.len() != formula.cnf.clauses.len() {
            return bad(format!(
                "embedding places {} variables and {} clauses, formula has {} and {}",
                self.variables.len(),
                self.clauses.len(),
                formula.cnf.variables,
                formula.cnf.clauses.len()
            ));
        }
        let mut nodes = HashSet::new();
        for p in self.variables.iter().chain(&self.clauses) {
            if !nodes.insert(*p) {
                return bad(format!("grid point {p:?} is used twice"));
            }
        }
        let mut incidences: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (c, clause) in formula.cnf.clauses.iter().enumerate() {
            for lit in clause {
                incidences.insert((lit.unsigned_abs() as usize - 1, c));
            }
        }
        let mut interior = HashSet::new();
        for (i, w) in self.wires.iter().enumerate() {
            if w.variable >= self.variables.len() || w.clause >= self.clauses.len() {
                return bad(format!("wire {i} refers to a missing variable or clause"));
            }
            if !incidences.remove(&(w.variable, w.clause)) {
                return bad(format!(
                    "wire {i} joins variable {} and clause {} which are not incident, or repeats",
                    w.variable, w.clause
                ));
            }
            if w.path.len() < 2 {
                return bad(format!("wire {i} has no edges"));
            }
            if w.path[0] != self.variables[w.variable] || *w.path.last().expect("nonempty") != self.clauses[w.clause] {
                return bad(format!("wire {i} does not run from its variable to its clause"));
            }
            for pair in w.path.windows(2) {
                if step(pair[0], pair[1]).is_none() {
                    return bad(format!("wire {i} has a non-unit step {:?} -> {:?}", pair[0], pair[1]));
                }
            }
            for p in &w.path[1..w.path.len() - 1] {
                if nodes.contains(p) || !interior.insert(*p) {
                    return bad(format!("wire {i} passes through occupied grid point {p:?}"));
                }
            }
        }
        if let Some((v, c)) = incidences.into_iter().next() {
            return bad(format!("no wire for variable {v} in clause {c}"));
        }
        Ok(())
    }
}

const LEFT: GridPoint = [-1, 0];
const RIGHT: GridPoint = [1, 0];
const UP: GridPoint = [0, 1];
const DOWN: GridPoint = [0, -1];

fn rot(p: GridPoint) -> GridPoint {
    [-p[1], p[0]]
}

fn rot_n(mut p: GridPoint, k: usize) -> GridPoint {
    for _ in 0..k % 4 {
        p = rot(p);
    }
    p
}

/// Paw gadget in the frame where the unused direction is down, with offsets
/// in half units: `u`, `u'`, `v`, `w` and the gadget disk each direction
/// connects to (0 = u, 1 = u', 3 = w).
struct Gadget {
    offsets: [GridPoint; 4],
    connect: [(GridPoint, usize); 3],
}

fn canonical_gadget(negative: GridPoint) -> Result<Gadget, ReductionError> {
    Ok(match negative {
        UP => Gadget { offsets: [[-1, -1], [1, -1], [0, -1], [0, 1]], connect: [(LEFT, 0), (RIGHT, 1), (UP, 3)] },
        RIGHT => Gadget { offsets: [[-1, 0], [0, 1], [0, -1], [1, -1]], connect: [(LEFT, 0), (UP, 1), (RIGHT, 3)] },
        LEFT => Gadget { offsets: [[1, 0], [0, 1], [0, -1], [-1, -1]], connect: [(RIGHT, 0), (UP, 1), (LEFT, 3)] },
        other => return Err(ReductionError::UnsupportedPattern(format!("negative wire leaves towards {other:?}"))),
    })
}

/// A generated instance with the target and the expected graph.
#[derive(Debug, Clone)]
pub struct SatInstance {
    pub instance: Instance,
    pub target_k: usize,
    pub wire_length: usize,
    pub expected: Graph,
}

/// Places the gadgets on an already refined embedding and audits the
/// resulting disk graph against the intended one.
pub fn build_sat_instance(formula: &NormalizedFormula, emb: &GridEmbedding) -> Result<SatInstance, ReductionError> {
    emb.validate(formula)?;
    for (i, w) in emb.wires.iter().enumerate() {
        if (w.path.len() - 1) % 2 != 0 {
            return Err(ReductionError::InvalidEmbedding(format!(
                "wire {i} has odd length; refine the embedding first"
            )));
        }
    }
    let occ = formula.occurrences();
    let half = |p: GridPoint, off: GridPoint| Point::xy(rat(2 * p[0] + off[0], 2), rat(2 * p[1] + off[1], 2));
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    // (variable, direction) -> index of the gadget disk a wire attaches to
    let mut attach: BTreeMap<(usize, GridPoint), usize> = BTreeMap::new();
    for (v, &centre) in emb.variables.iter().enumerate() {
        let wires: Vec<&Wire> = emb.wires.iter().filter(|w| w.variable == v).collect();
        let dirs: Vec<GridPoint> = wires.iter().map(|w| step(w.path[0], w.path[1]).expect("validated")).collect();
        let missing =
            [DOWN, RIGHT, UP, LEFT].iter().position(|d| !dirs.contains(d)).expect("three wires, four directions");
        let negative_clause = occ[v].negative[0];
        let neg_dir = dirs[wires.iter().position(|w| w.clause == negative_clause).expect("validated")];
        let gadget = canonical_gadget(rot_n(neg_dir, 4 - missing))?;
        let base = points.len();
        for (off, name) in gadget.offsets.iter().zip(["u", "u'", "v", "w"]) {
            points.push(half(centre, rot_n(*off, missing)));
            labels.push(format!("x{}.{name}", v + 1));
        }
        edges.extend([(base, base + 1), (base, base + 2), (base + 1, base + 2), (base + 2, base + 3)]);
        for (dir, disk) in gadget.connect {
            attach.insert((v, rot_n(dir, missing)), base + disk);
        }
    }
    let clause_base = points.len();
    for (c, &p) in emb.clauses.iter().enumerate() {
        points.push(half(p, [0, 0]));
        labels.push(format!("C{}", c + 1));
    }
    for w in &emb.wires {
        let dir = step(w.path[0], w.path[1]).expect("validated");
        let mut prev = attach[&(w.variable, dir)];
        for (t, &p) in w.path[1..w.path.len() - 1].iter().enumerate() {
            points.push(half(p, [0, 0]));
            labels.push(format!("x{}-C{}.{}", w.variable + 1, w.clause + 1, t + 1));
            edges.push((prev, points.len() - 1));
            prev = points.len() - 1;
        }
        edges.push((prev, clause_base + w.clause));
    }
    let n = points.len();
    let instance = Instance::new(2, Rational::from_integer(1.into()), points)?.with_labels(labels)?;
    let expected = Graph::from_edges(n, &edges);
    let actual = build_graph(&instance);
    if actual.edges() != expected.edges() {
        let a: BTreeSet<_> = actual.edges().into_iter().collect();
        let e: BTreeSet<_> = expected.edges().into_iter().collect();
        let extra = a.difference(&e).next().map(|p| format!("unexpected edge {p:?}"));
        let missing = e.difference(&a).next().map(|p| format!("missing edge {p:?}"));
        return Err(ReductionError::AuditFailed(extra.or(missing).unwrap_or_default()));
    }
    let wire_length = emb.wire_length();
    Ok(SatInstance { instance, target_k: formula.cnf.variables + wire_length / 2, wire_length, expected })
}

/// Hand-built formulas and embeddings on the original (unrefined) grid.
pub mod fixtures {
    use super::{Cnf, GridEmbedding};

    /// `(x or y)(x or not y)(y or not x)`: satisfiable.
    pub fn phi_s() -> (Cnf, GridEmbedding) {
        parse(include_str!("../../fixtures/phi_s.formula.json"), include_str!("../../fixtures/phi_s.embedding.json"))
    }

    /// `(a)(b)(c)(a or b or c)(not a or not b or not c)`: unsatisfiable.
    pub fn phi_u() -> (Cnf, GridEmbedding) {
        parse(include_str!("../../fixtures/phi_u.formula.json"), include_str!("../../fixtures/phi_u.embedding.json"))
    }

    fn parse(formula: &str, embedding: &str) -> (Cnf, GridEmbedding) {
        (
            Cnf::from_json(formula).expect("fixture formula"),
            GridEmbedding::from_json(embedding).expect("fixture embedding"),
        )
    }
}
