//! `diamcover`: solve, generate, verify, certify and benchmark clique-cover
//! instances from the command line.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::json;

use diamcover::cliques::relevant_cliques;
use diamcover::geometry::Rational;
use diamcover::model::{box_side_for_degree, gen_random, parse_rational, verify_cover, CliqueCover, Graph, Instance};
use diamcover::reductions::{
    build_r5_instance_capped, build_sat_instance, certify_at, normalize_formula, Cnf, GridEmbedding, ReductionError,
};
use diamcover::solver::{branch_and_bound_min_cover, brute_force_min_cover, prepare, solve, SolveOptions, SolverError};

/// Exit status of a failed command.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn violation(m: impl Display) -> Self {
        Self { code: 1, message: m.to_string() }
    }

    fn input(m: impl Display) -> Self {
        Self { code: 2, message: m.to_string() }
    }

    fn resource(m: impl Display) -> Self {
        Self { code: 3, message: m.to_string() }
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::EscalationCap { .. } | SolverError::CapExceeded { .. } | SolverError::TableLimit(_) => {
                Self::resource(e)
            }
            SolverError::Model(_) => Self::input(e),
            _ => Self::violation(e),
        }
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::AuditFailed(_) | ReductionError::CertificationFailed(_) => Self::violation(e),
            _ => Self::input(e),
        }
    }
}

type CmdResult = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "diamcover", version, about = "Exact minimum clique cover of unit disk and unit ball graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a minimum clique cover of an instance.
    Solve(SolveArgs),
    /// Write a random or reduction-generated instance.
    #[command(subcommand)]
    Generate(Generate),
    /// Check a cover file against an instance.
    Verify(VerifyArgs),
    /// Certify the five-dimensional embedding of a graph at a fixed precision.
    Certify(CertifyArgs),
    /// Solve random instances over a range of sizes and seeds, emitting CSV.
    Bench(BenchArgs),
    /// Print the relevant cliques of every partition class.
    Cliques(CliquesArgs),
    /// Print the partition, contraction graph and nice tree decomposition.
    Decompose(DecomposeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Dp,
    Brute,
    Bnb,
}

#[derive(Args)]
struct Knobs {
    /// Initial bound on cliques per class.
    #[arg(long, default_value_t = 12)]
    lambda: usize,
    /// Initial number of half-planes per relevant clique.
    #[arg(long, default_value_t = 2)]
    halfplanes: usize,
    /// Weight exponent of the width measure.
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    /// Largest lambda tried while escalating.
    #[arg(long, default_value_t = 64)]
    lambda_cap: usize,
    /// Largest dynamic-programming table allowed.
    #[arg(long, default_value_t = 2_000_000)]
    max_table_entries: usize,
}

impl Knobs {
    fn options(&self) -> Result<SolveOptions, Failure> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Failure::input("--epsilon must be positive"));
        }
        Ok(SolveOptions {
            lambda: self.lambda,
            halfplanes: self.halfplanes,
            epsilon: self.epsilon,
            lambda_cap: self.lambda_cap,
            max_table_entries: self.max_table_entries,
            ..Default::default()
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    /// Result file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "dp")]
    oracle: Oracle,
    #[command(flatten)]
    knobs: Knobs,
    /// Re-check the witness cover before reporting.
    #[arg(long)]
    verify: bool,
    /// Include wall-clock time in the result.
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Generate {
    /// Uniform random points in a square.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Side of the square; derived from --degree when absent.
        #[arg(long = "box")]
        box_side: Option<String>,
        #[arg(long, default_value = "2")]
        diameter: String,
        /// Target average degree, used when --box is absent.
        #[arg(long, default_value_t = 10.0)]
        degree: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Disks for a grid-embedded formula; the target k is written in the file.
    Sat {
        #[arg(long)]
        formula: PathBuf,
        /// Embedding of the normalized formula on the integer grid.
        #[arg(long)]
        embedding: PathBuf,
        /// Treat the embedding as already refined.
        #[arg(long)]
        no_refine: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Five-dimensional balls whose graph is 3-clique-coverable iff the
    /// input graph is 3-colourable.
    Color3 {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Certificate file; written next to the output when absent.
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long, default_value_t = 4096)]
        precision_cap: u32,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    cover: PathBuf,
    /// Accept covers that leave points uncovered.
    #[arg(long)]
    partial: bool,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Working precision in bits.
    #[arg(long, default_value_t = 512)]
    precision: u32,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated instance sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [50, 100, 200])]
    sizes: Vec<usize>,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of seeds per size.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Target average degree of the random instances.
    #[arg(long, default_value_t = 4.0)]
    degree: f64,
    /// Run only the decomposition, reporting no k.
    #[arg(long)]
    decompose_only: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    knobs: Knobs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CliquesArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 2)]
    halfplanes: usize,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> CmdResult {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    Instance::from_json(&read(path)?)
        .map(|(inst, _)| inst)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json serializes")
}

fn cmd_solve(a: &SolveArgs) -> CmdResult {
    let inst = load_instance(&a.input)?;
    let opts = a.knobs.options()?;
    let start = Instant::now();
    let (k, cover, mut doc) = match a.oracle {
        Oracle::Dp => {
            let mut r = solve(&inst, &opts)?;
            r.stats.wall_ms = None;
            let doc = serde_json::to_value(&r).expect("result serializes");
            (r.k, r.cover, doc)
        }
        Oracle::Brute => {
            let (k, cover) = brute_force_min_cover(&inst)?;
            (k, cover.clone(), json!({"k": k, "cover": cover, "oracle": "brute"}))
        }
        Oracle::Bnb => {
            let (k, cover) = branch_and_bound_min_cover(&inst);
            (k, cover.clone(), json!({"k": k, "cover": cover, "oracle": "bnb"}))
        }
    };
    if a.timings {
        doc["wall_ms"] = json!(start.elapsed().as_secs_f64() * 1000.0);
    }
    if a.verify {
        let report = verify_cover(&inst, &cover, true).map_err(Failure::violation)?;
        if !report.accepted || cover.len() != k {
            return Err(Failure::violation(format!("witness cover rejected: {report:?}")));
        }
        doc["verified"] = json!(true);
    }
    log::info!("minimum cover has {k} cliques");
    write_out(a.output.as_deref(), &pretty(&doc))
}

fn rational_arg(text: &str, name: &str) -> Result<Rational, Failure> {
    let q = parse_rational(text).map_err(|e| Failure::input(format!("--{name}: {e}")))?;
    if q <= Rational::from_integer(0.into()) {
        return Err(Failure::input(format!("--{name} must be positive")));
    }
    Ok(q)
}

fn cmd_generate(g: &Generate) -> CmdResult {
    match g {
        Generate::Random { n, seed, box_side, diameter, degree, output } => {
            let d = rational_arg(diameter, "diameter")?;
            let side = match box_side {
                Some(s) => rational_arg(s, "box")?,
                None => box_side_for_degree(*n, d.to_f64().unwrap_or(f64::NAN), *degree),
            };
            write_out(output.as_deref(), &gen_random(*n, &side, &d, *seed).to_json(None))
        }
        Generate::Sat { formula, embedding, no_refine, output } => {
            let cnf = Cnf::from_json(&read(formula)?)?;
            let normalized = normalize_formula(&cnf)?;
            let mut emb = GridEmbedding::from_json(&read(embedding)?)?;
            if !no_refine {
                emb = emb.refine();
            }
            let s = build_sat_instance(&normalized, &emb)?;
            log::info!("{} disks, wire length {}, target k = {}", s.instance.len(), s.wire_length, s.target_k);
            write_out(output.as_deref(), &s.instance.to_json(Some(s.target_k)))
        }
        Generate::Color3 { graph, output, certificate, precision_cap } => {
            let g = Graph::from_json(&read(graph)?).map_err(|e| Failure::input(format!("{}: {e}", graph.display())))?;
            let r = build_r5_instance_capped(&g, *precision_cap)?;
            let cert_path =
                certificate.clone().or_else(|| output.as_ref().map(|p| p.with_extension("certificate.json")));
            match cert_path {
                Some(p) => write_out(Some(&p), &r.certificate.to_json())?,
                None => eprintln!("{}", r.certificate.to_json()),
            }
            write_out(output.as_deref(), &r.instance.to_json(Some(r.target_k)))
        }
    }
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let inst = load_instance(&a.input)?;
    let text = read(&a.cover)?;
    // accept both a bare cover and a solver result document
    let cover = match serde_json::from_str::<serde_json::Value>(&text) {
        Ok(v) if v.get("cover").is_some() => CliqueCover::from_json(&v["cover"].to_string()),
        _ => CliqueCover::from_json(&text),
    }
    .map_err(|e| Failure::input(format!("{}: {e}", a.cover.display())))?;
    let report = verify_cover(&inst, &cover, !a.partial).map_err(Failure::input)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if report.accepted {
        Ok(())
    } else {
        Err(Failure::violation("cover rejected"))
    }
}

fn cmd_certify(a: &CertifyArgs) -> CmdResult {
    let g = Graph::from_json(&read(&a.graph)?).map_err(|e| Failure::input(format!("{}: {e}", a.graph.display())))?;
    match certify_at(&g, a.precision) {
        Ok((margins, unshifted)) => {
            let doc =
                json!({"accepted": true, "precision_bits": a.precision, "margins": margins, "unshifted": unshifted});
            write_out(None, &pretty(&doc))
        }
        Err(f) => {
            write_out(
                None,
                &pretty(&json!({"accepted": false, "precision_bits": a.precision, "failure": format!("{f:?}")})),
            )?;
            Err(Failure::violation(format!("certification failed at {} bits: {f:?}", a.precision)))
        }
    }
}

fn cmd_bench(a: &BenchArgs) -> CmdResult {
    let opts = a.knobs.options()?;
    let runs: Vec<(usize, u64)> =
        a.sizes.iter().flat_map(|&n| (a.seed..a.seed + a.seeds).map(move |s| (n, s))).collect();
    let run = |&(n, seed): &(usize, u64)| -> Result<String, Failure> {
        let side = box_side_for_degree(n, 2.0, a.degree);
        let inst = gen_random(n, &side, &Rational::from_integer(2.into()), seed);
        let start = Instant::now();
        if a.decompose_only {
            let p = prepare(&inst, opts.epsilon)?;
            let width = p.nice.weighted_width(&p.contraction.class_sizes, &p.gamma);
            return Ok(format!("{n},{seed},,{:.3},{width:.4}", start.elapsed().as_secs_f64() * 1000.0));
        }
        let r = solve(&inst, &opts)?;
        Ok(format!("{n},{seed},{},{:.3},{:.4}", r.k, start.elapsed().as_secs_f64() * 1000.0, r.stats.weighted_width))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.max(1))
        .build()
        .map_err(|e| Failure::resource(e.to_string()))?;
    let rows: Vec<Result<String, Failure>> = pool.install(|| runs.par_iter().map(run).collect());
    let mut csv = String::from("n,seed,k,wall_ms,width\n");
    for row in rows {
        csv.push_str(&row?);
        csv.push('\n');
    }
    write_out(a.output.as_deref(), &csv)
}

fn cmd_cliques(a: &CliquesArgs) -> CmdResult {
    let inst = load_instance(&a.input)?;
    let partition = diamcover::decomposition::build_kappa_partition(&inst).map_err(Failure::input)?;
    let mut classes = Vec::new();
    for (i, class) in partition.classes.iter().enumerate() {
        let rc = relevant_cliques(&inst, class, a.halfplanes).map_err(Failure::input)?;
        classes.push(json!({"class": i, "cell": partition.cells[i], "points": class, "cliques": rc.cliques}));
    }
    write_out(None, &pretty(&json!({"halfplanes": a.halfplanes, "classes": classes})))
}

fn cmd_decompose(a: &DecomposeArgs) -> CmdResult {
    let inst = load_instance(&a.input)?;
    let p = prepare(&inst, a.epsilon)?;
    let doc = json!({
        "classes": p.partition.classes,
        "cells": p.partition.cells,
        "contraction_edges": p.contraction.graph.edges(),
        "tree": {"bags": p.tree.bags, "edges": p.tree.edges},
        "nice": p.nice.to_json(&p.contraction.class_sizes, &p.gamma),
    });
    write_out(None, &pretty(&doc))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DIAMCOVER_LOG", "error")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Generate(g) => cmd_generate(g),
        Command::Verify(a) => cmd_verify(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Cliques(a) => cmd_cliques(a),
        Command::Decompose(a) => cmd_decompose(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
