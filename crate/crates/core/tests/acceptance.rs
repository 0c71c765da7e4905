//! End-to-end acceptance checks. Runs without the libtest harness and
//! prints one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use diamcover::cliques::{is_separated, relevant_cliques};
use diamcover::decomposition::{build_kappa_partition, to_nice, weighted_width, TreeDecomposition};
use diamcover::geometry::rat;
use diamcover::model::{box_side_for_degree, build_graph, gen_random, Graph, Instance};
use diamcover::reductions::{
    build_enhanced_graph, build_r5_instance, build_sat_instance, embed_r5, fixtures, is_k_colorable, is_satisfiable,
    normalize_formula, Interval,
};
use diamcover::solver::{
    admissible_cover_sizes, branch_and_bound_graph, brute_force_min_cover, dp_solve, enumerate_optimal_covers,
    partition_cover_sizes, prepare, solve, DpParams, SolveOptions,
};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + Sync + 'a>);

fn random_instance(i: u64, max_n: usize, boxes: &[i64]) -> Instance {
    let n = 1 + (i as usize % max_n);
    gen_random(n, &rat(boxes[i as usize % boxes.len()], 1), &rat(2, 1), i)
}

fn oracle_equivalence() -> Outcome {
    let count = 300u64;
    let mismatches: Vec<String> = (0..count)
        .into_par_iter()
        .filter_map(|i| {
            let inst = random_instance(i, 14, &[3, 5, 8]);
            let dp = solve(&inst, &SolveOptions::default()).map(|r| r.k);
            let brute = brute_force_min_cover(&inst).map(|r| r.0);
            match (dp, brute) {
                (Ok(a), Ok(b)) if a == b => None,
                (a, b) => Some(format!("seed {i}: dp {a:?}, brute {b:?}")),
            }
        })
        .collect();
    if mismatches.is_empty() {
        Ok(format!("{count} instances, 0 mismatches"))
    } else {
        Err(format!("{} mismatches, first {}", mismatches.len(), mismatches[0]))
    }
}

/// For each instance: whether some optimal cover is separated, and the
/// restrictions of separated optimal covers missing from the relevant
/// cliques of their class.
fn separation_data(count: u64) -> Vec<(u64, bool, Vec<String>)> {
    (1000..1000 + count)
        .into_par_iter()
        .map(|i| {
            let inst = random_instance(i, 10, &[2, 3, 5]);
            let covers = enumerate_optimal_covers(&inst).expect("n <= 10");
            let partition = build_kappa_partition(&inst).expect("planar instance");
            let relevant: Vec<_> =
                partition.classes.iter().map(|s| relevant_cliques(&inst, s, 3).expect("small class")).collect();
            let mut any = false;
            let mut misses = Vec::new();
            for cover in covers {
                if !is_separated(&inst, &cover).expect("planar") {
                    continue;
                }
                any = true;
                for (s, rc) in partition.classes.iter().zip(&relevant) {
                    for c in &cover.cliques {
                        let part: Vec<usize> = c.iter().copied().filter(|v| s.contains(v)).collect();
                        if !part.is_empty() && !rc.contains(&part) {
                            misses.push(format!("seed {i}: {part:?}"));
                        }
                    }
                }
            }
            (i, any, misses)
        })
        .collect()
}

fn separation(data: &[(u64, bool, Vec<String>)]) -> Outcome {
    let failures: Vec<u64> = data.iter().filter(|d| !d.1).map(|d| d.0).collect();
    if failures.is_empty() {
        Ok(format!("{} instances, each has a separated optimal cover", data.len()))
    } else {
        Err(format!("no separated optimal cover for seeds {failures:?}"))
    }
}

fn clique_completeness(data: &[(u64, bool, Vec<String>)]) -> Outcome {
    let misses: Vec<&String> = data.iter().flat_map(|d| &d.2).collect();
    if misses.is_empty() {
        Ok(format!("{} instances, 0 restrictions missing at h = 3", data.len()))
    } else {
        Err(format!("{} restrictions missing, first {}", misses.len(), misses[0]))
    }
}

fn forget_inner_dp() -> Outcome {
    let graphs: Vec<_> = (0..50u64)
        .into_par_iter()
        .flat_map_iter(|i| {
            let inst = random_instance(2000 + i, 14, &[2, 3, 4]);
            let opts = SolveOptions { record_aux: true, ..Default::default() };
            solve(&inst, &opts).expect("solvable").aux_graphs
        })
        .collect();
    let checked: Vec<_> = graphs.iter().filter(|g| g.n() <= 8).collect();
    if checked.is_empty() {
        return Err("no auxiliary graphs recorded".into());
    }
    let bad = checked.par_iter().filter(|g| admissible_cover_sizes(g) != partition_cover_sizes(g)).count();
    let largest = checked.iter().map(|g| g.n()).max().unwrap_or(0);
    if bad == 0 {
        Ok(format!("{} auxiliary graphs (up to {largest} vertices), 0 disagreements", checked.len()))
    } else {
        Err(format!("{bad} of {} auxiliary graphs disagree", checked.len()))
    }
}

/// One representative per isomorphism class of graphs on `n` vertices.
fn graph_classes(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut perms = vec![vec![]];
    for _ in 0..n {
        perms = perms
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..n).filter(|v| !p.contains(v)).map(|v| [p.clone(), vec![v]].concat()).collect::<Vec<_>>()
            })
            .collect();
    }
    let index = |a: usize, b: usize| pairs.iter().position(|&p| p == (a.min(b), a.max(b))).expect("pair");
    let canonical = |mask: u32| {
        perms
            .iter()
            .map(|p| {
                (0..pairs.len())
                    .filter(|&e| mask >> e & 1 == 1)
                    .fold(0u32, |m, e| m | 1 << index(p[pairs[e].0], p[pairs[e].1]))
            })
            .min()
            .expect("permutations")
    };
    let mut seen = std::collections::BTreeSet::new();
    for mask in 0u32..1 << pairs.len() {
        seen.insert(canonical(mask));
    }
    seen.into_iter()
        .map(|m| {
            Graph::from_edges(n, &(0..pairs.len()).filter(|&e| m >> e & 1 == 1).map(|e| pairs[e]).collect::<Vec<_>>())
        })
        .collect()
}

fn coloring_reduction() -> Outcome {
    let mut graphs = Vec::new();
    let mut classes = 0;
    for n in 1..=5 {
        let c = graph_classes(n);
        classes += c.len();
        graphs.extend(c);
    }
    if classes != 52 {
        return Err(format!("expected 52 graph classes on at most five vertices, found {classes}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let edges: Vec<(usize, usize)> =
            (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).filter(|_| rng.gen_bool(0.5)).collect();
        graphs.push(Graph::from_edges(5, &edges));
    }
    let failures: Vec<String> = graphs
        .par_iter()
        .enumerate()
        .filter_map(|(i, g)| {
            let r = match build_r5_instance(g) {
                Ok(r) => r,
                Err(e) => return Some(format!("graph {i}: {e}")),
            };
            let inst_graph = build_graph(&r.instance);
            let colorable = is_k_colorable(g, 3);
            let enhanced_colorable = is_k_colorable(&build_enhanced_graph(g).graph, 3);
            let covers_with_three = is_k_colorable(&inst_graph.complement(), 3);
            (colorable != enhanced_colorable || colorable != covers_with_three || r.certificate.precision_bits > 4096)
                .then(|| {
                    format!(
                        "graph {i}: colorable {colorable}, enhanced {enhanced_colorable}, 3-cover {covers_with_three}"
                    )
                })
        })
        .collect();
    if !failures.is_empty() {
        return Err(format!("{} failures, first {}", failures.len(), failures[0]));
    }
    // distance between the two special points for one-edge parameters
    let g = Graph::from_edges(2, &[(0, 1)]);
    let eg = build_enhanced_graph(&g);
    let r = build_r5_instance(&g).map_err(|e| e.to_string())?;
    let bits = 256;
    let emb = embed_r5(&eg, &r.params, bits);
    let (a, b) = (&emb.base[eg.c1()], &emb.base[eg.c2()]);
    let d = a.iter().zip(b).fold(Interval::zero(bits), |acc, (x, y)| acc.add(&x.sub(y).square())).sqrt();
    let expected = 2.0 * 3f64.sqrt() - 2f64.sqrt() + 2.0 * r.params.eps.to_f64().expect("finite");
    if (d.to_f64() - expected).abs() > 1e-6 || d.lo_f64() <= 2.049 {
        return Err(format!("special distance {} vs expected {expected}", d.to_f64()));
    }
    Ok(format!(
        "{} graphs ({classes} classes + 20 random), all certified and equivalent; |c1 c2| = {:.6}",
        graphs.len(),
        d.to_f64()
    ))
}

fn sat_reduction() -> Outcome {
    let mut report = Vec::new();
    for (name, (cnf, emb), satisfiable) in [("phi_s", fixtures::phi_s(), true), ("phi_u", fixtures::phi_u(), false)] {
        let f = normalize_formula(&cnf).map_err(|e| e.to_string())?;
        if is_satisfiable(&f.cnf) != satisfiable {
            return Err(format!("{name}: truth table disagrees with the fixture"));
        }
        let s = build_sat_instance(&f, &emb.refine()).map_err(|e| e.to_string())?;
        let (k, _) = branch_and_bound_graph(&build_graph(&s.instance));
        let ok = if satisfiable { k == s.target_k } else { k > s.target_k };
        if !ok || k < s.target_k {
            return Err(format!("{name}: min cover {k}, n + L/2 = {}", s.target_k));
        }
        report.push(format!("{name}: min cover {k}, n + L/2 = {}", s.target_k));
    }
    Ok(report.join("; "))
}

fn decomposition_scaling() -> Outcome {
    let mut widths = Vec::new();
    for n in [100usize, 400, 1600] {
        let side = box_side_for_degree(n, 2.0, 10.0);
        let mut total = 0.0;
        let mut degree = 0.0;
        let seeds = 3;
        for seed in 0..seeds {
            let inst = gen_random(n, &side, &rat(2, 1), seed);
            let p = prepare(&inst, 0.2).map_err(|e| e.to_string())?;
            total += weighted_width(&p.tree.bags, &p.contraction.class_sizes, &p.gamma);
            degree += 2.0 * p.graph.edge_count() as f64 / n as f64;
        }
        widths.push((n, total / seeds as f64, degree / seeds as f64));
    }
    let ratio = widths[2].1 / widths[0].1;
    let detail = widths.iter().map(|(n, w, d)| format!("w({n}) = {w:.2} (avg degree {d:.1})")).collect::<Vec<_>>();
    let detail = format!("{}; ratio {ratio:.2}", detail.join(", "));
    if ratio <= 12.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn single_bag_robustness() -> Outcome {
    let failures: Vec<String> = (0..30u64)
        .into_par_iter()
        .filter_map(|i| {
            let inst = random_instance(3000 + i, 12, &[3, 4, 6]);
            let p = prepare(&inst, 0.2).expect("prepares");
            let single = to_nice(&TreeDecomposition::single_bag(p.partition.len()), &p.contraction).expect("valid");
            let params = DpParams::default();
            let a = dp_solve(&inst, &p.graph, &p.partition, &p.nice, &params).map(|o| o.k);
            let b = dp_solve(&inst, &p.graph, &p.partition, &single, &params).map(|o| o.k);
            match (a, b) {
                (Ok(x), Ok(y)) if x == y => None,
                (a, b) => Some(format!("seed {}: balanced {a:?}, single bag {b:?}", 3000 + i)),
            }
        })
        .collect();
    if failures.is_empty() {
        Ok("30 instances, same k on both decompositions".into())
    } else {
        Err(format!("{} differences, first {}", failures.len(), failures[0]))
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let sep = separation_data(100);
    let criteria: Vec<Criterion> = vec![
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("separated optimal covers", Box::new(|| separation(&sep))),
        ("relevant-clique completeness", Box::new(|| clique_completeness(&sep))),
        ("forget-node inner DP", Box::new(forget_inner_dp)),
        ("3-colouring reduction", Box::new(coloring_reduction)),
        ("grid SAT reduction", Box::new(sat_reduction)),
        ("decomposition scaling", Box::new(decomposition_scaling)),
        ("single-bag robustness", Box::new(single_bag_robustness)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {}: PASS {name}: {msg} [{secs:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {msg} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
