use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Mutex;

use fixedbitset::FixedBitSet;

use crate::cliques::relevant_cliques;
use crate::decomposition::{KappaPartition, NiceTreeDecomposition, NodeKind};
use crate::model::{verify_cover, CliqueCover, Graph, Instance};

use super::auxiliary::{AuxiliaryGraph, InnerDp};
use super::config::enumerate_tilings;
use super::lengths::LengthSet;
use super::SolverError;

/// Per bag class (in bag order): tiling index and covered-flag mask.
type Key = Vec<(u32, u64)>;
type Table = BTreeMap<Key, LengthSet>;

/// Largest candidate set enumerated at a forget node.
const MAX_FLIP_CANDIDATES: usize = 22;
/// Auxiliary graphs recorded for inspection are capped at this many vertices.
const RECORD_MAX_VERTICES: usize = 8;
const RECORD_LIMIT: usize = 5000;

#[derive(Debug, Clone)]
pub struct DpParams {
    pub lambda: usize,
    pub halfplanes: usize,
    pub max_table_entries: usize,
    /// Keep the auxiliary graphs (up to 8 vertices) built at forget nodes.
    pub record_aux: bool,
}

impl Default for DpParams {
    fn default() -> Self {
        Self { lambda: 12, halfplanes: 2, max_table_entries: 2_000_000, record_aux: false }
    }
}

#[derive(Debug, Clone)]
pub struct DpOutcome {
    /// Every `l` with a true root entry.
    pub feasible: Vec<usize>,
    /// Size of the reconstructed witness.
    pub k: usize,
    pub cover: CliqueCover,
    pub max_configurations: usize,
    pub max_table_entries: usize,
    pub aux_graphs: Vec<AuxiliaryGraph>,
}

struct Tile {
    verts: Vec<usize>,
    set: FixedBitSet,
    /// Vertices adjacent or equal to every vertex of the tile.
    common: FixedBitSet,
}

struct Ctx<'a> {
    nice: &'a NiceTreeDecomposition,
    tiles: Vec<Tile>,
    /// Tilings of every class as lists of tile ids.
    tilings: Vec<Vec<Vec<u32>>>,
    params: &'a DpParams,
    recorded: Mutex<(HashSet<AuxiliaryGraph>, Vec<AuxiliaryGraph>)>,
}

fn with_bit(mask: u64, i: usize) -> bool {
    mask >> i & 1 == 1
}

impl Ctx<'_> {
    fn compatible(&self, a: u32, b: u32) -> bool {
        self.tiles[b as usize].set.is_subset(&self.tiles[a as usize].common)
    }

    fn aux_graph(&self, tiles: &[u32], marked: usize) -> AuxiliaryGraph {
        let mut edges = Vec::new();
        for i in 0..tiles.len() {
            for j in i + 1..tiles.len() {
                if self.compatible(tiles[i], tiles[j]) {
                    edges.push((i, j));
                }
            }
        }
        let marked_mask = if marked == 64 { u64::MAX } else { (1u64 << marked) - 1 };
        AuxiliaryGraph::new(tiles.len(), &edges, marked_mask)
    }

    fn record(&self, g: &AuxiliaryGraph, set: u64) {
        if !self.params.record_aux || set.count_ones() as usize > RECORD_MAX_VERTICES {
            return;
        }
        let mut guard = self.recorded.lock().expect("recording lock");
        if guard.1.len() >= RECORD_LIMIT {
            return;
        }
        let sub = g.induced(set);
        if guard.0.insert(sub.clone()) {
            guard.1.push(sub);
        }
    }

    fn check_size(&self, table: &Table) -> Result<(), SolverError> {
        if table.len() > self.params.max_table_entries {
            return Err(SolverError::TableLimit(self.params.max_table_entries));
        }
        Ok(())
    }

    fn introduce(&self, child: &Table, bag: &[usize], class: usize) -> Result<Table, SolverError> {
        let pos = bag.binary_search(&class).expect("introduced class in bag");
        let mut out = Table::new();
        for (key, lengths) in child {
            for ti in 0..self.tilings[class].len() {
                let mut k = key.clone();
                k.insert(pos, (ti as u32, 0));
                out.insert(k, lengths.clone());
            }
        }
        self.check_size(&out)?;
        Ok(out)
    }

    /// Uncovered tiles of the forgotten class, and the uncovered tiles of
    /// the remaining bag classes compatible with at least one of them.
    fn forget_vertices(&self, key: &Key, bag: &[usize], pos: usize) -> (Vec<u32>, Vec<(usize, usize, u32)>) {
        let class = bag[pos];
        let (ti, chi) = key[pos];
        let marked: Vec<u32> = self.tilings[class][ti as usize]
            .iter()
            .enumerate()
            .filter(|&(i, _)| !with_bit(chi, i))
            .map(|(_, &t)| t)
            .collect();
        let mut cands = Vec::new();
        if marked.is_empty() {
            return (marked, cands);
        }
        for (q, &(tq, chi_q)) in key.iter().enumerate() {
            if q == pos {
                continue;
            }
            let slot = if q < pos { q } else { q - 1 };
            for (i, &t) in self.tilings[bag[q]][tq as usize].iter().enumerate() {
                if !with_bit(chi_q, i) && marked.iter().any(|&m| self.compatible(m, t)) {
                    cands.push((slot, i, t));
                }
            }
        }
        (marked, cands)
    }

    fn forget(&self, child: &Table, child_bag: &[usize], class: usize) -> Result<Table, SolverError> {
        let pos = child_bag.binary_search(&class).expect("forgotten class in child bag");
        let mut cache: HashMap<Vec<u32>, InnerDp> = HashMap::new();
        let mut out = Table::new();
        for (key, lengths) in child {
            let mut base = key.clone();
            base.remove(pos);
            let (marked, cands) = self.forget_vertices(key, child_bag, pos);
            if marked.is_empty() {
                out.entry(base).or_default().union_with(lengths);
                continue;
            }
            if cands.len() > MAX_FLIP_CANDIDATES || marked.len() + cands.len() > 64 {
                return Err(SolverError::AuxiliaryTooLarge(marked.len() + cands.len()));
            }
            let mut verts = marked.clone();
            verts.extend(cands.iter().map(|c| c.2));
            // marked tiles come first, so the vertex list determines the graph
            let inner =
                cache.entry(verts.clone()).or_insert_with(|| InnerDp::new(self.aux_graph(&verts, marked.len())));
            let m_mask = (1u64 << marked.len()) - 1;
            for flips in 0u64..1 << cands.len() {
                let set = m_mask | flips << marked.len();
                let sizes = inner.sizes(set);
                if sizes == 0 {
                    continue;
                }
                self.record(&inner.graph, set);
                let mut k = base.clone();
                for (j, &(slot, i, _)) in cands.iter().enumerate() {
                    if with_bit(flips, j) {
                        k[slot].1 |= 1 << i;
                    }
                }
                out.entry(k).or_default().union_with(&lengths.sum(&LengthSet::from_mask(sizes)));
            }
            self.check_size(&out)?;
        }
        Ok(out)
    }

    fn join(&self, left: &Table, right: &Table) -> Result<Table, SolverError> {
        let mut by_tiling: HashMap<Vec<u32>, Vec<(&Key, &LengthSet)>> = HashMap::new();
        for (key, lengths) in right {
            by_tiling.entry(key.iter().map(|e| e.0).collect()).or_default().push((key, lengths));
        }
        let mut out = Table::new();
        for (ka, la) in left {
            let tiling: Vec<u32> = ka.iter().map(|e| e.0).collect();
            let Some(group) = by_tiling.get(&tiling) else { continue };
            for (kb, lb) in group {
                let key: Key = ka.iter().zip(kb.iter()).map(|(a, b)| (a.0, a.1 | b.1)).collect();
                out.entry(key).or_default().union_with(&la.sum(lb));
            }
            self.check_size(&out)?;
        }
        Ok(out)
    }

    fn leaf() -> Table {
        Table::from([(Vec::new(), LengthSet::singleton(0))])
    }

    /// Tables of every node in the subtree of `top`; the last one is `top`'s.
    fn subtree(&self, top: usize) -> Result<Vec<(usize, Table)>, SolverError> {
        let nodes = &self.nice.nodes;
        let mut chain = Vec::new();
        let mut t = top;
        while matches!(nodes[t].kind, NodeKind::Introduce(_) | NodeKind::Forget(_)) {
            chain.push(t);
            t = nodes[t].children[0];
        }
        let mut out = match nodes[t].kind {
            NodeKind::Join => {
                let (a, b) = (nodes[t].children[0], nodes[t].children[1]);
                let (ra, rb) = rayon::join(|| self.subtree(a), || self.subtree(b));
                let (mut ra, rb) = (ra?, rb?);
                let table = self.join(&ra.last().expect("nonempty").1, &rb.last().expect("nonempty").1)?;
                ra.extend(rb);
                ra.push((t, table));
                ra
            }
            _ => vec![(t, Self::leaf())],
        };
        for &u in chain.iter().rev() {
            let child = &out.last().expect("nonempty").1;
            let child_bag = &nodes[nodes[u].children[0]].bag;
            let table = match nodes[u].kind {
                NodeKind::Introduce(c) => self.introduce(child, &nodes[u].bag, c)?,
                NodeKind::Forget(c) => self.forget(child, child_bag, c)?,
                _ => unreachable!("chain holds only introduce and forget nodes"),
            };
            out.push((u, table));
        }
        Ok(out)
    }

    fn tiling_part(key: &Key) -> Vec<u32> {
        key.iter().map(|e| e.0).collect()
    }

    fn sub_mask(a: &Key, b: &Key) -> bool {
        a.iter().zip(b).all(|(x, y)| x.1 & !y.1 == 0)
    }

    /// Walks from the root back to the leaves, emitting the cliques created
    /// at forget nodes.
    fn reconstruct(&self, tables: &[Option<Table>], l: usize) -> Result<Vec<Vec<usize>>, SolverError> {
        let nodes = &self.nice.nodes;
        let table = |t: usize| tables[t].as_ref().expect("table computed");
        let fail = |t: usize| SolverError::Internal(format!("no witness entry below node {t}"));
        let mut cliques = Vec::new();
        let mut stack: Vec<(usize, Key, usize)> = vec![(self.nice.root, Vec::new(), l)];
        while let Some((t, key, l)) = stack.pop() {
            match nodes[t].kind {
                NodeKind::Leaf => {
                    if l != 0 {
                        return Err(fail(t));
                    }
                }
                NodeKind::Introduce(c) => {
                    let pos = nodes[t].bag.binary_search(&c).expect("class in bag");
                    let mut k = key;
                    k.remove(pos);
                    stack.push((nodes[t].children[0], k, l));
                }
                NodeKind::Join => {
                    let (a, b) = (nodes[t].children[0], nodes[t].children[1]);
                    let tiling = Self::tiling_part(&key);
                    let mut found = None;
                    'search: for (ka, la) in table(a) {
                        if Self::tiling_part(ka) != tiling || !Self::sub_mask(ka, &key) {
                            continue;
                        }
                        for (kb, lb) in table(b) {
                            if Self::tiling_part(kb) != tiling
                                || !ka.iter().zip(kb).zip(&key).all(|((x, y), z)| x.1 | y.1 == z.1)
                            {
                                continue;
                            }
                            if let Some(la_val) = la.iter().take_while(|&v| v <= l).find(|&v| lb.contains(l - v)) {
                                found = Some((ka.clone(), la_val, kb.clone()));
                                break 'search;
                            }
                        }
                    }
                    let (ka, la_val, kb) = found.ok_or_else(|| fail(t))?;
                    stack.push((a, ka, la_val));
                    stack.push((b, kb, l - la_val));
                }
                NodeKind::Forget(c) => {
                    let child = nodes[t].children[0];
                    let child_bag = &nodes[child].bag;
                    let pos = child_bag.binary_search(&c).expect("class in child bag");
                    let mut found = None;
                    for (kc, lc) in table(child) {
                        let mut base = kc.clone();
                        base.remove(pos);
                        if Self::tiling_part(&base) != Self::tiling_part(&key) || !Self::sub_mask(&base, &key) {
                            continue;
                        }
                        let (marked, cands) = self.forget_vertices(kc, child_bag, pos);
                        let mut verts = marked.clone();
                        let mut flipped = 0usize;
                        for (slot, &(_, chi)) in key.iter().enumerate() {
                            flipped += (chi & !base[slot].1).count_ones() as usize;
                        }
                        for &(slot, i, tile) in &cands {
                            if with_bit(key[slot].1 & !base[slot].1, i) {
                                verts.push(tile);
                            }
                        }
                        if verts.len() != marked.len() + flipped {
                            continue; // some flipped tile cannot join a marked one
                        }
                        if marked.is_empty() {
                            if lc.contains(l) {
                                found = Some((kc.clone(), l, Vec::new()));
                                break;
                            }
                            continue;
                        }
                        let mut inner = InnerDp::new(self.aux_graph(&verts, marked.len()));
                        let full = inner.graph.full();
                        let sizes = inner.sizes(full);
                        let hit = lc.iter().take_while(|&v| v <= l).find(|&v| l - v < 64 && with_bit(sizes, l - v));
                        if let Some(lv) = hit {
                            let parts = inner.witness(full, l - lv).expect("size is feasible");
                            let made: Vec<Vec<usize>> = parts
                                .iter()
                                .map(|&d| {
                                    let mut vs: Vec<usize> = (0..verts.len())
                                        .filter(|&i| with_bit(d, i))
                                        .flat_map(|i| self.tiles[verts[i] as usize].verts.iter().copied())
                                        .collect();
                                    vs.sort_unstable();
                                    vs
                                })
                                .collect();
                            found = Some((kc.clone(), lv, made));
                            break;
                        }
                    }
                    let (kc, lv, made) = found.ok_or_else(|| fail(t))?;
                    cliques.extend(made);
                    stack.push((child, kc, lv));
                }
            }
        }
        Ok(cliques)
    }
}

/// Runs the configuration dynamic program over `nice` and reconstructs a
/// cover of minimum feasible size.
pub fn dp_solve(
    inst: &Instance,
    graph: &Graph,
    partition: &KappaPartition,
    nice: &NiceTreeDecomposition,
    params: &DpParams,
) -> Result<DpOutcome, SolverError> {
    let n = inst.len();
    let mut tiles: Vec<Tile> = Vec::new();
    let mut tilings = Vec::with_capacity(partition.len());
    let mut max_configurations = 0usize;
    for (c, class) in partition.classes.iter().enumerate() {
        let rc = relevant_cliques(inst, class, params.halfplanes)?;
        let masks = enumerate_tilings(&rc.masks(), rc.base.len(), params.lambda);
        if masks.is_empty() {
            return Err(SolverError::NoConfigurations {
                class: c,
                lambda: params.lambda,
                halfplanes: params.halfplanes,
            });
        }
        let mut ids: HashMap<u64, u32> = HashMap::new();
        let mut class_tilings = Vec::with_capacity(masks.len());
        let mut configs = 0usize;
        for tiling in masks {
            configs = configs.saturating_add(1 << tiling.len());
            let mut ts = Vec::with_capacity(tiling.len());
            for m in tiling {
                let id = *ids.entry(m).or_insert_with(|| {
                    let verts: Vec<usize> =
                        (0..rc.base.len()).filter(|&i| with_bit(m, i)).map(|i| rc.base[i]).collect();
                    let mut set = FixedBitSet::with_capacity(n);
                    set.extend(verts.iter().copied());
                    let mut common = FixedBitSet::with_capacity(n);
                    common.insert_range(..);
                    for &v in &verts {
                        let mut closed = graph.neighbors(v).clone();
                        closed.insert(v);
                        common.intersect_with(&closed);
                    }
                    tiles.push(Tile { verts, set, common });
                    (tiles.len() - 1) as u32
                });
                ts.push(id);
            }
            class_tilings.push(ts);
        }
        max_configurations = max_configurations.max(configs);
        tilings.push(class_tilings);
    }

    let ctx = Ctx { nice, tiles, tilings, params, recorded: Mutex::new((HashSet::new(), Vec::new())) };
    let computed = ctx.subtree(nice.root)?;
    let max_table_entries = computed.iter().map(|(_, t)| t.len()).max().unwrap_or(0);
    let mut tables: Vec<Option<Table>> = vec![None; nice.len()];
    for (t, table) in computed {
        tables[t] = Some(table);
    }
    let root = tables[nice.root].as_ref().expect("root table");
    let lengths = root.get(&Vec::new()).cloned().unwrap_or_default();
    let best = lengths.min().ok_or_else(|| SolverError::Internal("root table has no feasible entry".into()))?;
    let raw = ctx.reconstruct(&tables, best)?;

    // tiles covered in both branches of a join appear twice; keep the first
    let mut taken = vec![false; n];
    let mut cliques = Vec::new();
    for clique in raw {
        let kept: Vec<usize> = clique.into_iter().filter(|&v| !std::mem::replace(&mut taken[v], true)).collect();
        if !kept.is_empty() {
            cliques.push(kept);
        }
    }
    let cover = CliqueCover::new(cliques).canonical();
    let report = verify_cover(inst, &cover, true)?;
    if !report.accepted {
        return Err(SolverError::Internal(format!("reconstructed cover rejected: {report:?}")));
    }
    let recorded = ctx.recorded.into_inner().expect("recording lock").1;
    Ok(DpOutcome {
        feasible: lengths.iter().collect(),
        k: cover.len(),
        cover,
        max_configurations,
        max_table_entries,
        aux_graphs: recorded,
    })
}
