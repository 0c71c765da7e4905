//! 3-colouring to 3-clique-cover in dimension five: the enhanced graph, its
//! embedding and a per-instance certificate of the resulting adjacency.

use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{rat, Point, Rational};
use crate::model::{build_graph, format_rational, Graph, Instance};

use super::interval::{round_decimal, Interval};
use super::ReductionError;

/// Starting and largest working precision of the certification.
pub const MIN_BITS: u32 = 64;
pub const MAX_BITS: u32 = 4096;
const MAX_THETA_HALVINGS: usize = 16;

/// The gadget graph: every edge `uv` of the source becomes the two paths
/// `w_u t1 t2 w_v` and `w_u b1 b2 w_v`, plus `c1` joined to all `t`, `c2`
/// joined to all `b`, and the edge `c1 c2`.
#[derive(Debug, Clone)]
pub struct EnhancedGraph {
    pub base_n: usize,
    /// Source edges `(a, b)` with `a < b`, sorted; edge `j` owns the gadget
    /// vertices `t1(j)`, `t2(j)`, `b1(j)`, `b2(j)`.
    pub base_edges: Vec<(usize, usize)>,
    pub graph: Graph,
    pub labels: Vec<String>,
}

impl EnhancedGraph {
    pub fn m(&self) -> usize {
        self.base_edges.len()
    }

    pub fn w(&self, i: usize) -> usize {
        i
    }

    pub fn t1(&self, j: usize) -> usize {
        self.base_n + 4 * j
    }

    pub fn t2(&self, j: usize) -> usize {
        self.base_n + 4 * j + 1
    }

    pub fn b1(&self, j: usize) -> usize {
        self.base_n + 4 * j + 2
    }

    pub fn b2(&self, j: usize) -> usize {
        self.base_n + 4 * j + 3
    }

    pub fn c1(&self) -> usize {
        self.base_n + 4 * self.m()
    }

    pub fn c2(&self) -> usize {
        self.c1() + 1
    }

    /// The source vertex whose `w` the gadget vertex `v` is shifted away
    /// from, if any.
    fn anchor(&self, v: usize) -> Option<usize> {
        if v < self.base_n || v >= self.c1() {
            return None;
        }
        let (j, role) = ((v - self.base_n) / 4, (v - self.base_n) % 4);
        let (a, b) = self.base_edges[j];
        Some(if role % 2 == 0 { a } else { b })
    }
}

pub fn build_enhanced_graph(g: &Graph) -> EnhancedGraph {
    let n = g.n();
    let base_edges = g.edges();
    let m = base_edges.len();
    let mut eg = EnhancedGraph { base_n: n, base_edges, graph: Graph::empty(n + 4 * m + 2), labels: Vec::new() };
    let mut edges = Vec::new();
    for (j, &(a, b)) in eg.base_edges.iter().enumerate() {
        let (t1, t2, b1, b2) = (eg.t1(j), eg.t2(j), eg.b1(j), eg.b2(j));
        edges.extend([(a, t1), (t1, t2), (t2, b), (a, b1), (b1, b2), (b2, b)]);
        edges.extend([(eg.c1(), t1), (eg.c1(), t2), (eg.c2(), b1), (eg.c2(), b2)]);
    }
    edges.push((eg.c1(), eg.c2()));
    for (a, b) in edges {
        eg.graph.add_edge(a, b);
    }
    eg.labels = (1..=n).map(|i| format!("w{i}")).collect();
    for j in 1..=m {
        eg.labels.extend([format!("t1_{j}"), format!("t2_{j}"), format!("b1_{j}"), format!("b2_{j}")]);
    }
    eg.labels.extend(["c1".to_string(), "c2".to_string()]);
    eg
}

/// Exact parameters of the embedding. `R1`, `R2` and `D` are derived and
/// only ever evaluated as intervals.
#[derive(Debug, Clone)]
pub struct EmbeddingParams {
    pub n: usize,
    pub m: usize,
    pub delta: Rational,
    pub eps_prime: Rational,
    pub xi: Rational,
    pub eps: Rational,
    pub r: Rational,
    pub theta: Rational,
}

/// Derived quantities at one working precision.
#[derive(Debug, Clone)]
pub struct Derived {
    pub sqrt2_half: Interval,
    pub sqrt3: Interval,
    pub r1_sq: Interval,
    pub r1: Interval,
    pub r2: Interval,
    pub d_sq: Interval,
}

impl EmbeddingParams {
    pub fn derived(&self, bits: u32) -> Derived {
        let iv = |q: &Rational| Interval::from_rational(q, bits);
        let sqrt2_half = Interval::from_int(2, bits).sqrt().div_int(2);
        let sqrt3 = Interval::from_int(3, bits).sqrt();
        let r1_sq = sqrt2_half.sub(&iv(&self.eps)).square().add(&iv(&self.r).square());
        let r1 = r1_sq.sqrt();
        let r2 = Interval::from_int(4, bits).sub(&r1_sq).sqrt();
        let theta = iv(&self.theta);
        let half_step = iv(&(&self.delta / rat(2 * self.n.max(1) as i64, 1)));
        let d_sq =
            Interval::from_int(4, bits).add(&theta.square()).add(&r2.mul(&theta).mul_int(2).mul(&half_step.cos()));
        Derived { sqrt2_half, sqrt3, r1_sq, r1, r2, d_sq }
    }

    /// Checks the parameter constraints; exact where the quantities are
    /// rational, by intervals otherwise.
    pub fn check(&self, bits: u32) -> Result<(), ReductionError> {
        let fail = |what: &str| Err(ReductionError::CertificationFailed(format!("parameter constraint: {what}")));
        let m = self.m.max(1) as i64;
        if &self.xi * rat(2, 1) != self.eps_prime {
            return fail("2 xi = eps'");
        }
        if self.eps_prime > &self.delta * &self.delta / rat(20 * m * m, 1) {
            return fail("eps' <= delta^2 / (20 m^2)");
        }
        if self.eps < (&self.eps_prime + &self.xi + &self.delta) * rat(8, 1) {
            return fail("eps >= 8 (eps' + xi + delta)");
        }
        if self.r != &self.eps_prime + rat(1, 1) {
            return fail("r = 1 + eps'");
        }
        let d = self.derived(bits);
        if !Interval::from_int(4, bits).sub(&d.r1).is_positive() {
            return fail("R1 < 4");
        }
        let two = Interval::from_int(2, bits);
        let upper = two.add(&Interval::from_rational(&(&self.xi / rat(2, 1)), bits)).square();
        if !d.d_sq.sub(&two.square()).is_positive() || !upper.sub(&d.d_sq).is_positive() {
            return fail("2 < D < 2 + xi/2");
        }
        Ok(())
    }
}

/// Largest power of two not above `bound`, for positive `bound`.
fn power_of_two_below(bound: &Rational) -> Rational {
    let mut t = Rational::one();
    while &t > bound {
        t /= rat(2, 1);
    }
    while &t * rat(2, 1) <= *bound {
        t *= rat(2, 1);
    }
    t
}

pub fn choose_embedding_params(n: usize, m: usize) -> EmbeddingParams {
    let delta = rat(1, 1000);
    let mm = m.max(1) as i64;
    let eps_prime = &delta * &delta / rat(20 * mm * mm, 1);
    let xi = &eps_prime / rat(2, 1);
    let eps = (&eps_prime + &xi + &delta) * rat(8, 1);
    let r = &eps_prime + rat(1, 1);
    let mut p = EmbeddingParams { n, m, delta, eps_prime, xi, eps, r, theta: rat(0, 1) };
    let r2_hi = p.derived(128).r2.hi_rational();
    p.theta = power_of_two_below(&(&p.xi / ((r2_hi + rat(1, 1)) * rat(64, 1))));
    p
}

fn cos_sin(angle: &Rational, bits: u32) -> (Interval, Interval) {
    let a = Interval::from_rational(angle, bits);
    (a.cos(), a.sin())
}

/// Coordinates of the unshifted embedding and the shifted one used for the
/// instance.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub bits: u32,
    pub base: Vec<Vec<Interval>>,
    pub shifted: Vec<Vec<Interval>>,
    pub d_sq: Interval,
}

pub fn embed_r5(eg: &EnhancedGraph, p: &EmbeddingParams, bits: u32) -> Embedding {
    let iv = |q: &Rational| Interval::from_rational(q, bits);
    let z = || Interval::zero(bits);
    let d = p.derived(bits);
    let (n, m) = (eg.base_n, eg.m());
    let eps = iv(&p.eps);
    let r = iv(&p.r);
    let mut base = vec![Vec::new(); eg.graph.n()];
    // unit direction from each w towards the origin
    let mut toward_origin = Vec::with_capacity(n);
    for i in 0..n {
        let (c, s) = cos_sin(&(&p.delta * rat(i as i64 + 1, n as i64)), bits);
        base[eg.w(i)] = vec![z(), z(), z(), d.r2.mul(&c), d.r2.mul(&s)];
        toward_origin.push(vec![z(), z(), z(), c.neg(), s.neg()]);
    }
    let top = eps.sub(&d.sqrt2_half);
    let bottom = d.sqrt2_half.sub(&eps);
    for j in 0..m {
        let (c, s) = cos_sin(&(&p.delta * rat(j as i64 + 1, m as i64)), bits);
        let (rc, rs) = (r.mul(&c), r.mul(&s));
        base[eg.t1(j)] = vec![top.clone(), rc.clone(), rs.clone(), z(), z()];
        base[eg.t2(j)] = vec![top.clone(), rc.neg(), rs.neg(), z(), z()];
        base[eg.b1(j)] = vec![bottom.clone(), rs.neg(), rc.clone(), z(), z()];
        base[eg.b2(j)] = vec![bottom.clone(), rs, rc.neg(), z(), z()];
    }
    let c1x = d.sqrt3.sub(&d.sqrt2_half).add(&eps);
    base[eg.c1()] = vec![c1x.clone(), z(), z(), z(), z()];
    base[eg.c2()] = vec![c1x.neg(), z(), z(), z(), z()];
    let theta = iv(&p.theta);
    let shifted = base
        .iter()
        .enumerate()
        .map(|(v, coords)| match eg.anchor(v) {
            Some(u) => coords.iter().zip(&toward_origin[u]).map(|(x, dir)| x.add(&theta.mul(dir))).collect(),
            None => coords.clone(),
        })
        .collect();
    Embedding { bits, base, shifted, d_sq: d.d_sq }
}

fn sq_dist(a: &[Interval], b: &[Interval]) -> Interval {
    a.iter().zip(b).fold(Interval::zero(a[0].bits), |acc, (x, y)| acc.add(&x.sub(y).square()))
}

/// Certified separation of one pair from the threshold, in squared-distance
/// units.
#[derive(Debug, Clone, Serialize)]
pub struct PairMargin {
    pub u: usize,
    pub v: usize,
    /// Adjacent in the gadget graph, so the points must be farther than `D`.
    pub far: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginSummary {
    pub far_min: f64,
    pub near_min: f64,
    /// Pairs `(w_u, x)` where `x` is shifted away from `w_u`.
    pub matched_min: f64,
    /// Pairs `(w, x)` with `x` in a gadget path but not anchored at `w`.
    pub unmatched_min: f64,
}

/// Checks on the unshifted embedding: far pairs at distance at least
/// `2 + xi`, near pairs at most `2 - xi`, and pairs between `W` and the
/// path vertices at distance exactly 2.
#[derive(Debug, Clone, Serialize)]
pub struct UnshiftedReport {
    pub far_min: f64,
    pub near_min: f64,
    pub tangent_max_width: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsReport {
    pub delta: String,
    pub eps_prime: String,
    pub xi: String,
    pub eps: String,
    pub r: String,
    pub theta: String,
    pub r1: f64,
    pub r2: f64,
    pub d: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub n: usize,
    pub m: usize,
    pub params: ParamsReport,
    pub precision_bits: u32,
    pub decimal_digits: u32,
    pub theta_halvings: usize,
    pub pairs_checked: usize,
    /// Squared-distance margins of the shifted embedding against `D^2`.
    pub margins: MarginSummary,
    pub unshifted: UnshiftedReport,
    pub c1_c2_distance: f64,
    pub exact_recheck: bool,
    pub target_k: usize,
    #[serde(skip)]
    pub pairs: Vec<PairMargin>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Why a certification attempt did not succeed.
#[derive(Debug, Clone, PartialEq)]
pub enum CertifyFailure {
    /// Some pair's interval straddles the threshold; more precision helps.
    Straddle { u: usize, v: usize },
    /// Some pair is certified on the wrong side; a smaller shift helps.
    WrongSide { u: usize, v: usize },
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

fn min_or_inf(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(f64::INFINITY, f64::min)
}

/// Certifies that the shifted embedding realizes exactly the complement of
/// the gadget graph at threshold `D`, and that the unshifted one satisfies
/// its margin relations.
pub fn certify_embedding(
    eg: &EnhancedGraph,
    p: &EmbeddingParams,
    emb: &Embedding,
) -> Result<(Vec<PairMargin>, MarginSummary, UnshiftedReport), CertifyFailure> {
    let pairs = all_pairs(eg.graph.n());
    let checked: Vec<Result<PairMargin, CertifyFailure>> = pairs
        .par_iter()
        .map(|&(u, v)| {
            let diff = sq_dist(&emb.shifted[u], &emb.shifted[v]).sub(&emb.d_sq);
            let far = eg.graph.adjacent(u, v);
            if (far && diff.is_positive()) || (!far && diff.is_negative()) {
                let margin = if far { diff.lo_f64() } else { -diff.hi_rational().to_f64().unwrap_or(f64::NAN) };
                Ok(PairMargin { u, v, far, margin })
            } else if diff.is_positive() || diff.is_negative() {
                Err(CertifyFailure::WrongSide { u, v })
            } else {
                Err(CertifyFailure::Straddle { u, v })
            }
        })
        .collect();
    // report the first failure in pair order, wrong sides first
    if let Some(f) = checked.iter().find_map(|r| match r {
        Err(f @ CertifyFailure::WrongSide { .. }) => Some(f.clone()),
        _ => None,
    }) {
        return Err(f);
    }
    let margins: Vec<PairMargin> = checked.into_iter().collect::<Result<_, _>>()?;
    let is_w = |x: usize| x < eg.base_n;
    let matched = |pm: &PairMargin| {
        (is_w(pm.u) && eg.anchor(pm.v) == Some(pm.u)) || (is_w(pm.v) && eg.anchor(pm.u) == Some(pm.v))
    };
    let w_path =
        |pm: &PairMargin| (is_w(pm.u) && eg.anchor(pm.v).is_some()) || (is_w(pm.v) && eg.anchor(pm.u).is_some());
    let summary = MarginSummary {
        far_min: min_or_inf(margins.iter().filter(|m| m.far).map(|m| m.margin)),
        near_min: min_or_inf(margins.iter().filter(|m| !m.far).map(|m| m.margin)),
        matched_min: min_or_inf(margins.iter().filter(|m| matched(m)).map(|m| m.margin)),
        unmatched_min: min_or_inf(margins.iter().filter(|m| w_path(m) && !matched(m)).map(|m| m.margin)),
    };

    let bits = emb.bits;
    let two = Interval::from_int(2, bits);
    let xi = Interval::from_rational(&p.xi, bits);
    let far_sq = two.add(&xi).square();
    let near_sq = two.sub(&xi).square();
    let four = rat(4, 1);
    let mut report = UnshiftedReport { far_min: f64::INFINITY, near_min: f64::INFINITY, tangent_max_width: 0.0 };
    for &(u, v) in &pairs {
        let s = sq_dist(&emb.base[u], &emb.base[v]);
        let tangent = (is_w(u) && eg.anchor(v).is_some()) || (is_w(v) && eg.anchor(u).is_some());
        if tangent {
            if !s.contains(&four) {
                return Err(CertifyFailure::WrongSide { u, v });
            }
            report.tangent_max_width = report.tangent_max_width.max(s.width_f64());
        } else if eg.graph.adjacent(u, v) {
            let diff = s.sub(&far_sq);
            if !diff.is_positive() {
                return Err(CertifyFailure::Straddle { u, v });
            }
            report.far_min = report.far_min.min(diff.lo_f64());
        } else {
            let diff = near_sq.sub(&s);
            if !diff.is_positive() {
                return Err(CertifyFailure::Straddle { u, v });
            }
            report.near_min = report.near_min.min(diff.lo_f64());
        }
    }
    Ok((margins, summary, report))
}

/// A generated instance with its certificate. The instance's graph is the
/// complement of `enhanced.graph`.
#[derive(Debug, Clone)]
pub struct R5Instance {
    pub instance: Instance,
    pub target_k: usize,
    pub certificate: Certificate,
    pub enhanced: EnhancedGraph,
    pub params: EmbeddingParams,
}

fn decimal_digits(bits: u32) -> u32 {
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as u32 + 3
}

fn emit(emb: &Embedding, eg: &EnhancedGraph, digits: u32) -> Result<Instance, ReductionError> {
    let points = emb
        .shifted
        .iter()
        .map(|c| Point::new(c.iter().map(|x| round_decimal(&x.mid_rational(), digits)).collect()))
        .collect();
    let d = round_decimal(&emb.d_sq.sqrt().mid_rational(), digits);
    Ok(Instance::new(5, d, points)?.with_labels(eg.labels.clone())?)
}

pub fn build_r5_instance(g: &Graph) -> Result<R5Instance, ReductionError> {
    build_r5_instance_capped(g, MAX_BITS)
}

/// Certifies the default parameters of `g` at exactly `bits` of precision.
pub fn certify_at(g: &Graph, bits: u32) -> Result<(MarginSummary, UnshiftedReport), CertifyFailure> {
    let eg = build_enhanced_graph(g);
    let params = choose_embedding_params(g.n(), eg.m());
    let (_, margins, unshifted) = certify_embedding(&eg, &params, &embed_r5(&eg, &params, bits))?;
    Ok((margins, unshifted))
}

/// Builds the instance, doubling precision up to `max_bits` while some
/// comparison is undecided and halving the shift while some pair lands on
/// the wrong side.
pub fn build_r5_instance_capped(g: &Graph, max_bits: u32) -> Result<R5Instance, ReductionError> {
    let eg = build_enhanced_graph(g);
    let mut params = choose_embedding_params(g.n(), eg.m());
    let expected = eg.graph.complement();
    for halvings in 0..=MAX_THETA_HALVINGS {
        let mut bits = MIN_BITS;
        let mut wrong_side = false;
        while bits <= max_bits {
            if params.check(bits).is_err() {
                bits *= 2;
                continue;
            }
            let emb = embed_r5(&eg, &params, bits);
            match certify_embedding(&eg, &params, &emb) {
                Ok((pairs, margins, unshifted)) => {
                    let digits = decimal_digits(bits);
                    let instance = emit(&emb, &eg, digits)?;
                    if build_graph(&instance).edges() != expected.edges() {
                        log::debug!("decimal rounding at {digits} digits changed the graph; raising precision");
                        bits *= 2;
                        continue;
                    }
                    let d = params.derived(bits);
                    let c12 = sq_dist(&emb.base[eg.c1()], &emb.base[eg.c2()]).sqrt();
                    let certificate = Certificate {
                        n: eg.base_n,
                        m: eg.m(),
                        params: ParamsReport {
                            delta: format_rational(&params.delta),
                            eps_prime: format_rational(&params.eps_prime),
                            xi: format_rational(&params.xi),
                            eps: format_rational(&params.eps),
                            r: format_rational(&params.r),
                            theta: format_rational(&params.theta),
                            r1: d.r1.to_f64(),
                            r2: d.r2.to_f64(),
                            d: instance.diameter.to_f64().unwrap_or(f64::NAN),
                        },
                        precision_bits: bits,
                        decimal_digits: digits,
                        theta_halvings: halvings,
                        pairs_checked: pairs.len(),
                        margins,
                        unshifted,
                        c1_c2_distance: c12.to_f64(),
                        exact_recheck: true,
                        target_k: 3,
                        pairs,
                    };
                    return Ok(R5Instance { instance, target_k: 3, certificate, enhanced: eg, params });
                }
                Err(CertifyFailure::Straddle { u, v }) => {
                    log::debug!("pair ({u}, {v}) undecided at {bits} bits");
                    bits *= 2;
                }
                Err(CertifyFailure::WrongSide { u, v }) => {
                    log::debug!("pair ({u}, {v}) on the wrong side; halving theta");
                    wrong_side = true;
                    break;
                }
            }
        }
        if !wrong_side {
            return Err(ReductionError::CertificationFailed(format!("undecided comparisons at {max_bits} bits")));
        }
        params.theta /= rat(2, 1);
    }
    Err(ReductionError::CertificationFailed(format!("no valid shift after {MAX_THETA_HALVINGS} halvings")))
}

/// `2 sqrt 3 - sqrt 2 + 2 eps`, the distance between the two special points.
pub fn special_distance(p: &EmbeddingParams, bits: u32) -> Interval {
    let d = p.derived(bits);
    d.sqrt3.sub(&d.sqrt2_half).add(&Interval::from_rational(&p.eps, bits)).mul_int(2)
}
