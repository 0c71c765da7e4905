//! Candidate restrictions of a separated optimal cover to a vertex set.
//!
//! A clique `C` of a separated optimal cover, restricted to a set `S`, is
//! cut out of `S` by the lens spanned by its farthest pair intersected with
//! a bounded number of half-planes whose boundary lines pass through two
//! points of `S`. Enumerating all such intersections gives a polynomial
//! family that contains every restriction.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{convex_hull, hulls_disjoint, in_lens, orientation, GeometryError, LensRegion, Orientation};
use crate::model::{CliqueCover, Instance};

/// Largest vertex set handled; members are stored as 64-bit masks.
pub const MAX_BASE_SIZE: usize = 64;

#[derive(Debug, Error)]
pub enum CliqueError {
    #[error("vertex set of size {0} exceeds the supported maximum of {MAX_BASE_SIZE}")]
    BaseTooLarge(usize),
    #[error("vertex {0} out of range")]
    IndexOutOfRange(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone)]
pub struct LensCandidate {
    pub region: LensRegion,
    /// Sorted vertices of the base set inside the region.
    pub members: Vec<usize>,
}

/// One lens per unordered pair `u, v` of `S` (including `u = v`) with
/// `|u - v| <= D`, together with the part of `S` it contains.
pub fn lens_candidates(inst: &Instance, s: &[usize]) -> Vec<LensCandidate> {
    let mut out = Vec::new();
    for (i, &u) in s.iter().enumerate() {
        for &v in &s[i..] {
            let region = LensRegion::spanned_by(&inst.points[u], &inst.points[v]);
            if region.r_squared > &inst.diameter * &inst.diameter {
                continue;
            }
            let mut members: Vec<usize> = s.iter().copied().filter(|&p| in_lens(&inst.points[p], &region)).collect();
            members.sort_unstable();
            out.push(LensCandidate { region, members });
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct RelevantCliqueSet {
    /// Sorted base set `S`.
    pub base: Vec<usize>,
    /// Canonical (sorted, deduplicated, lexicographically ordered) cliques.
    pub cliques: Vec<Vec<usize>>,
    /// Half-plane budget used.
    pub halfplanes: usize,
}

impl RelevantCliqueSet {
    /// Members as bitmasks over positions in `base`.
    pub fn masks(&self) -> Vec<u64> {
        self.cliques
            .iter()
            .map(|c| {
                c.iter().fold(0u64, |m, v| {
                    let pos = self.base.binary_search(v).expect("member of base");
                    m | (1 << pos)
                })
            })
            .collect()
    }

    pub fn contains(&self, clique: &[usize]) -> bool {
        let mut c = clique.to_vec();
        c.sort_unstable();
        self.cliques.binary_search(&c).is_ok()
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }
}

/// Masks of `S` reachable as intersections of at most `h` half-planes, each
/// open or closed, bounded by a line through two distinct points of `S`.
/// The full mask (no half-plane) is always included.
fn halfplane_masks(inst: &Instance, s: &[usize], h: usize) -> Result<HashSet<u64>, GeometryError> {
    let k = s.len();
    let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut single: BTreeSet<u64> = BTreeSet::new();
    for i in 0..k {
        for j in i + 1..k {
            let (a, b) = (&inst.points[s[i]], &inst.points[s[j]]);
            if a == b {
                continue;
            }
            let (mut left, mut right, mut on) = (0u64, 0u64, 0u64);
            for (t, &w) in s.iter().enumerate() {
                match orientation(a, b, &inst.points[w])? {
                    Orientation::Left => left |= 1 << t,
                    Orientation::Right => right |= 1 << t,
                    Orientation::Collinear => on |= 1 << t,
                }
            }
            single.extend([left, left | on, right, right | on]);
        }
    }
    let mut all: HashSet<u64> = HashSet::from([full]);
    let mut frontier: Vec<u64> = vec![full];
    for _ in 0..h {
        let mut next = Vec::new();
        for &m in &frontier {
            for &hp in &single {
                let x = m & hp;
                if all.insert(x) {
                    next.push(x);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(all)
}

/// The collection of candidate cliques for `S` with half-plane budget `h`.
pub fn relevant_cliques(inst: &Instance, s: &[usize], h: usize) -> Result<RelevantCliqueSet, CliqueError> {
    let mut base = s.to_vec();
    base.sort_unstable();
    base.dedup();
    if base.len() > MAX_BASE_SIZE {
        return Err(CliqueError::BaseTooLarge(base.len()));
    }
    if let Some(&v) = base.iter().find(|&&v| v >= inst.len()) {
        return Err(CliqueError::IndexOutOfRange(v));
    }
    let k = base.len();
    let pos = |v: usize| base.binary_search(&v).expect("member of base");

    // local adjacency, closed neighbourhoods
    let d2 = &inst.diameter * &inst.diameter;
    let mut near = vec![0u64; k];
    for i in 0..k {
        near[i] |= 1 << i;
        for j in i + 1..k {
            let d = crate::geometry::squared_distance(&inst.points[base[i]], &inst.points[base[j]])?;
            if d.cmp(&d2) != Ordering::Greater {
                near[i] |= 1 << j;
                near[j] |= 1 << i;
            }
        }
    }
    let is_clique = |m: u64| {
        let mut rest = m;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if m & !near[i] != 0 {
                return false;
            }
        }
        true
    };

    let lenses: Vec<u64> = lens_candidates(inst, &base)
        .into_iter()
        .map(|c| c.members.iter().fold(0u64, |m, &v| m | (1 << pos(v))))
        .collect();
    let cuts = halfplane_masks(inst, &base, h)?;

    let mut found: BTreeSet<u64> = (0..k).map(|i| 1u64 << i).collect();
    for &lens in &lenses {
        for &cut in &cuts {
            let m = lens & cut;
            if m != 0 && !found.contains(&m) && is_clique(m) {
                found.insert(m);
            }
        }
    }

    let mut cliques: Vec<Vec<usize>> =
        found.into_iter().map(|m| (0..k).filter(|&i| m >> i & 1 == 1).map(|i| base[i]).collect()).collect();
    cliques.sort();
    Ok(RelevantCliqueSet { base, cliques, halfplanes: h })
}

/// True iff the convex hulls of the cliques' points are pairwise disjoint.
pub fn is_separated(inst: &Instance, cover: &CliqueCover) -> Result<bool, GeometryError> {
    let hulls = cover
        .cliques
        .iter()
        .map(|c| {
            let pts: Vec<_> = c.iter().map(|&v| inst.points[v].clone()).collect();
            convex_hull(&pts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    for i in 0..hulls.len() {
        for j in i + 1..hulls.len() {
            if !hulls_disjoint(&hulls[i], &hulls[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{rat, Point};
    use crate::model::gen_random;

    fn inst(points: &[(i64, i64)], den: i64) -> Instance {
        Instance::new(2, rat(2, 1), points.iter().map(|&(x, y)| Point::from_ints(x, y, den)).collect()).unwrap()
    }

    #[test]
    fn single_point_lens() {
        let i = inst(&[(0, 0)], 1);
        let c = lens_candidates(&i, &[0]);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].members, vec![0]);
        assert_eq!(c[0].region.r_squared, rat(0, 1));
    }

    #[test]
    fn pair_lenses() {
        let i = inst(&[(0, 0), (1, 0)], 1);
        let mut regions: Vec<Vec<usize>> = lens_candidates(&i, &[0, 1]).into_iter().map(|c| c.members).collect();
        regions.sort();
        assert_eq!(regions, vec![vec![0], vec![0, 1], vec![1]]);
    }

    #[test]
    fn far_pairs_give_no_lens() {
        let i = inst(&[(0, 0), (5, 0)], 1);
        assert_eq!(lens_candidates(&i, &[0, 1]).len(), 2);
    }

    #[test]
    fn lens_members_match_membership_oracle() {
        for seed in 0..10 {
            let i = gen_random(6, &rat(3, 1), &rat(2, 1), seed);
            let s: Vec<usize> = (0..6).collect();
            for c in lens_candidates(&i, &s) {
                for &p in &s {
                    let du = crate::geometry::squared_distance(&i.points[p], &c.region.u).unwrap();
                    let dv = crate::geometry::squared_distance(&i.points[p], &c.region.v).unwrap();
                    let inside = du <= c.region.r_squared && dv <= c.region.r_squared;
                    assert_eq!(c.members.contains(&p), inside);
                }
            }
        }
    }

    #[test]
    fn singleton_base() {
        let i = inst(&[(0, 0)], 1);
        for h in 0..3 {
            assert_eq!(relevant_cliques(&i, &[0], h).unwrap().cliques, vec![vec![0]]);
        }
    }

    #[test]
    fn close_triangle_gives_all_subsets() {
        // sides 1, sqrt(5)/2, sqrt(5)/2: a lens spanned by a longest side
        // always contains the third corner
        let i = inst(&[(0, 0), (2, 0), (1, 2)], 2);
        let r = relevant_cliques(&i, &[0, 1, 2], 0).unwrap();
        assert_eq!(r.cliques, vec![vec![0], vec![0, 1], vec![0, 1, 2], vec![1], vec![2]]);
        let r = relevant_cliques(&i, &[0, 1, 2], 1).unwrap();
        assert_eq!(r.len(), 7);
    }

    #[test]
    fn members_are_cliques_and_monotone_in_budget() {
        for seed in 0..8 {
            let i = gen_random(7, &rat(4, 1), &rat(2, 1), seed);
            let s: Vec<usize> = (0..7).collect();
            let g = crate::model::build_graph(&i);
            let mut prev: Option<RelevantCliqueSet> = None;
            for h in 0..3 {
                let r = relevant_cliques(&i, &s, h).unwrap();
                for c in &r.cliques {
                    assert!(!c.is_empty());
                    assert!(g.is_clique(c));
                }
                for v in &s {
                    assert!(r.contains(&[*v]));
                }
                if let Some(p) = &prev {
                    for c in &p.cliques {
                        assert!(r.contains(c));
                    }
                }
                let bound = (s.len() as f64).powi(2 + 2 * h as i32) * 4f64.powi(h as i32);
                assert!((r.len() as f64) <= bound);
                prev = Some(r);
            }
        }
    }

    #[test]
    fn separation_checks() {
        let i = inst(&[(0, 0), (1, 0), (10, 0), (11, 0), (0, 0)], 1);
        assert!(is_separated(&i, &CliqueCover::new(vec![vec![0, 1], vec![2, 3]])).unwrap());
        // same location in two different cliques
        assert!(!is_separated(&i, &CliqueCover::new(vec![vec![0, 1], vec![4]])).unwrap());
    }
}
