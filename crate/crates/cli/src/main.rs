//! Command-line workbench: every subcommand loads a `.ralg` file, runs one
//! construction or search, and prints a versioned JSON report to stdout.
//!
//! Exit codes are a stable contract: 0 success/verified, 2 input error,
//! 3 search exhausted, 4 verification violation. Diagnostics go to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};

use ramsey_core::algebra::{Phylum, Signature, SortIndex, Value};
use ramsey_core::homogeneity::{find_homogeneous, hindman_search};
use ramsey_core::reduction::TermBounds;
use ramsey_core::terms::enumerate_terms;
use ramsey_core::unary::{katetov_partition, unary_ramsey_classification, UnaryAlgebra};
use ramsey_core::vspace::{
    build_beta, check_beta, classify_vspace, corteh_gate, verify_field_counterexample,
    verify_k_infinite_counterexample, verify_vspace_counterexample, VectorSpaceSpec, VspaceError,
};
use ramsey_dsl::ast::Diagnostic;
use ramsey_dsl::{elaborate, literal_to_value, parse, Elaborated, ExperimentConfig};

const EXIT_INPUT: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;
const EXIT_VIOLATION: u8 = 4;
const SCHEMA: &str = "ramsey-report/1";

#[derive(Parser)]
#[command(name = "ramsey", version, about = "Finite-scale workbench for Ramsey algebras")]
struct Cli {
    /// Seed for experiments that sample randomly.
    #[arg(long, global = true, default_value_t = 41417)]
    seed: u64,
    /// Worker threads for parallel sweeps; 0 uses all cores. Reports are
    /// identical for every value.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List orderly terms over the file's signature.
    EnumerateTerms {
        file: PathBuf,
        /// Output phylum; all phyla when omitted.
        #[arg(long)]
        sort: Option<usize>,
        #[arg(long)]
        max_arity: usize,
        #[arg(long)]
        max_size: usize,
        /// Report destination: a path, or `-` for stdout.
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Run the homogeneous-reduction search an experiment describes.
    Search {
        file: PathBuf,
        #[arg(long)]
        experiment: String,
    },
    /// Re-run a construction or counterexample sweep and check it.
    Verify {
        file: PathBuf,
        #[arg(long)]
        experiment: String,
    },
    /// Classify an algebra as Ramsey or not, with the evidence kind.
    Classify {
        file: PathBuf,
        #[arg(long)]
        experiment: String,
    },
}

/// Anything that must stop the run before producing a report.
struct InputError(String);

impl From<String> for InputError {
    fn from(message: String) -> InputError {
        InputError(message)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        // Tests call the binary repeatedly; a failure here only means the
        // pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match run(&cli) {
        Ok((report, code)) => {
            if let Command::EnumerateTerms { out, .. } = &cli.command {
                if out != "-" {
                    if let Err(e) = std::fs::write(out, format!("{report:#}\n")) {
                        eprintln!("{out}: {e}");
                        return ExitCode::from(EXIT_INPUT);
                    }
                    return ExitCode::from(code);
                }
            }
            println!("{report:#}");
            ExitCode::from(code)
        }
        Err(InputError(message)) => {
            eprintln!("{message}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(cli: &Cli) -> Result<(Json, u8), InputError> {
    match &cli.command {
        Command::EnumerateTerms { file, sort, max_arity, max_size, .. } => {
            cmd_enumerate_terms(file, *sort, *max_arity, *max_size)
        }
        Command::Search { file, experiment } => cmd_search(file, experiment),
        Command::Verify { file, experiment } => cmd_verify(file, experiment, cli.seed),
        Command::Classify { file, experiment } => cmd_classify(file, experiment),
    }
}

fn load(file: &Path) -> Result<(String, Elaborated), InputError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| InputError(format!("{}: {e}", file.display())))?;
    let ast = parse(&text).map_err(|ds| InputError(render_diags(file, &ds)))?;
    let elab = elaborate(&ast).map_err(|ds| InputError(render_diags(file, &ds)))?;
    Ok((text, elab))
}

fn render_diags(file: &Path, diags: &[Diagnostic]) -> String {
    let lines: Vec<String> = diags.iter().map(|d| format!("{}:{d}", file.display())).collect();
    lines.join("\n")
}

fn digest(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    let mut hex = String::with_capacity(64);
    for byte in hash {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

fn report(
    command: &str,
    file: &Path,
    text: &str,
    experiment: Option<&str>,
    bounds: Option<TermBounds>,
    outcome: Json,
    started: Instant,
) -> Json {
    json!({
        "schema": SCHEMA,
        "command": command,
        "input": { "file": file.display().to_string(), "sha256": digest(text) },
        "experiment": experiment,
        "bounds": bounds.map(|b| json!({
            "max_term_size": b.max_term_size,
            "max_arity": b.max_arity,
        })),
        "outcome": outcome,
        "wall_ms": started.elapsed().as_millis() as u64,
    })
}

fn experiment<'a>(
    elab: &'a Elaborated,
    name: &str,
) -> Result<&'a ExperimentConfig, InputError> {
    elab.experiments
        .get(name)
        .ok_or_else(|| InputError(format!("no experiment named `{name}`")))
}

fn need_usize(cfg: &ExperimentConfig, key: &str) -> Result<usize, InputError> {
    cfg.usize_value(key).ok_or_else(|| InputError(format!("experiment needs `{key} = <int>`")))
}

fn need_name<'a>(cfg: &'a ExperimentConfig, key: &str) -> Result<&'a str, InputError> {
    cfg.name_value(key).ok_or_else(|| InputError(format!("experiment needs `{key} = <name>`")))
}

fn need_bounds(cfg: &ExperimentConfig) -> Result<TermBounds, InputError> {
    cfg.bounds
        .ok_or_else(|| InputError("experiment needs `max_term_size` and `max_arity`".to_string()))
}

fn cmd_enumerate_terms(
    file: &Path,
    sort: Option<usize>,
    max_arity: usize,
    max_size: usize,
) -> Result<(Json, u8), InputError> {
    let started = Instant::now();
    let (text, elab) = load(file)?;
    let sig = &elab.signature;
    let sorts: Vec<SortIndex> = match sort {
        Some(s) if s >= sig.sort_count() => {
            return Err(InputError(format!("sort index {s} out of range")));
        }
        Some(s) => vec![SortIndex(s)],
        None => (0..sig.sort_count()).map(SortIndex).collect(),
    };
    let mut terms = Vec::new();
    for out_sort in sorts {
        for term in enumerate_terms(sig, out_sort, max_arity, max_size) {
            terms.push(json!({
                "sort": out_sort.0,
                "sexpr": term.to_sexpr(sig),
                "size": term.size(),
                "arity": term.arity(),
            }));
        }
    }
    let outcome = json!({ "count": terms.len(), "terms": terms });
    let bounds = TermBounds::new(max_size, max_arity);
    Ok((report("enumerate-terms", file, &text, None, Some(bounds), outcome, started), 0))
}

fn cmd_search(file: &Path, name: &str) -> Result<(Json, u8), InputError> {
    let started = Instant::now();
    let (text, elab) = load(file)?;
    let cfg = experiment(&elab, name)?;
    let target = need_usize(cfg, "target")?;
    let bounds = need_bounds(cfg)?;
    let prefix = cfg
        .prefix
        .as_ref()
        .ok_or_else(|| InputError("experiment needs `sequence` and `sort`".to_string()))?;
    let coloring_name = cfg
        .coloring
        .as_deref()
        .ok_or_else(|| InputError("experiment needs `coloring = <name>`".to_string()))?;
    let coloring = &elab.colorings[coloring_name].coloring;
    let method = cfg.name_value("method").unwrap_or("general");
    let outcome = match method {
        "hindman" => hindman_search(&elab.signature, prefix, coloring, target, bounds),
        "general" => {
            let word = cfg.sort.clone().expect("prefix implies sort");
            find_homogeneous(&elab.signature, prefix, &word, coloring, target, bounds)
        }
        other => return Err(InputError(format!("unknown search method `{other}`"))),
    }
    .map_err(|e| InputError(e.to_string()))?;
    let code = if outcome.found() { 0 } else { EXIT_EXHAUSTED };
    let outcome = outcome.to_json(&elab.signature);
    Ok((report("search", file, &text, Some(name), Some(bounds), outcome, started), code))
}

fn cmd_verify(file: &Path, name: &str, seed: u64) -> Result<(Json, u8), InputError> {
    let started = Instant::now();
    let (text, elab) = load(file)?;
    let cfg = experiment(&elab, name)?;
    let check = need_name(cfg, "check")?;
    let (outcome, code) = match check {
        "beta" => verify_beta(cfg)?,
        "katetov" => verify_katetov(&elab, cfg, seed)?,
        "field_counterexample" => verify_field(cfg)?,
        "vspace_counterexample" => verify_vspace(&elab, cfg)?,
        "k_infinite" => verify_k_infinite(cfg)?,
        "corteh_gate" => verify_gate(&elab, cfg)?,
        other => return Err(InputError(format!("unknown check `{other}`"))),
    };
    Ok((report("verify", file, &text, Some(name), cfg.bounds, outcome, started), code))
}

/// Precondition failures become input errors; a completed sweep that still
/// carries violations is the caller's exit-4.
fn vspace_input(e: VspaceError) -> InputError {
    InputError(e.to_string())
}

fn verify_beta(cfg: &ExperimentConfig) -> Result<(Json, u8), InputError> {
    let length = need_usize(cfg, "length")?;
    let term_bound = need_usize(cfg, "term_bound")?;
    match build_beta(length, term_bound) {
        Ok(beta) => {
            // Independent re-check of the construction.
            let recheck = check_beta(beta.values(), term_bound);
            let violations: Vec<String> = recheck.iter().map(|v| v.to_string()).collect();
            let code = if violations.is_empty() { 0 } else { EXIT_VIOLATION };
            let outcome = json!({ "sequence": beta.to_json(), "violations": violations });
            Ok((outcome, code))
        }
        Err(e @ VspaceError::BetaBudget { .. }) => {
            Ok((json!({ "violations": [e.to_string()] }), EXIT_VIOLATION))
        }
        Err(e) => Err(vspace_input(e)),
    }
}

fn verify_katetov(
    elab: &Elaborated,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<(Json, u8), InputError> {
    if let Some(op_name) = cfg.name_value("map") {
        let sort = SortIndex(cfg.usize_value("phylum").unwrap_or(0));
        let map = unary_table(&elab.signature, sort, op_name)?;
        let partition = katetov_partition(&map).map_err(|e| InputError(e.to_string()))?;
        let separates = partition.separates(&map);
        let code = if separates { 0 } else { EXIT_VIOLATION };
        let outcome = json!({ "partition": partition.to_json(), "separates": separates });
        return Ok((outcome, code));
    }
    // Sweep mode: random fixed-point-free maps on random carriers.
    let trials = need_usize(cfg, "trials")?;
    let max_carrier = need_usize(cfg, "carrier")?;
    if max_carrier < 2 {
        return Err(InputError("`carrier` must be at least 2".to_string()));
    }
    let failures: Vec<usize> = (0..trials)
        .filter(|&trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
            let n = rng.gen_range(2..=max_carrier);
            let map: Vec<usize> = (0..n)
                .map(|i| {
                    let shifted = rng.gen_range(0..n - 1);
                    if shifted >= i {
                        shifted + 1
                    } else {
                        shifted
                    }
                })
                .collect();
            match katetov_partition(&map) {
                Ok(partition) => !partition.separates(&map),
                Err(_) => true,
            }
        })
        .collect();
    let code = if failures.is_empty() { 0 } else { EXIT_VIOLATION };
    let outcome = json!({
        "trials": trials,
        "max_carrier": max_carrier,
        "failed_trials": failures,
    });
    Ok((outcome, code))
}

fn unary_table(sig: &Signature, sort: SortIndex, op_name: &str) -> Result<Vec<usize>, InputError> {
    let (idx, op) = sig
        .ops
        .iter()
        .enumerate()
        .find(|(_, o)| o.name == op_name)
        .ok_or_else(|| InputError(format!("no operation named `{op_name}`")))?;
    if op.arg_sorts != vec![sort] || op.out_sort != sort {
        return Err(InputError(format!("operation `{op_name}` is not unary on phylum {}", sort.0)));
    }
    let carrier = sig
        .phylum_values(sort)
        .ok_or_else(|| InputError("unary analysis needs a finite phylum".to_string()))?;
    let mut map = Vec::with_capacity(carrier.len());
    for value in &carrier {
        let image = sig
            .evaluate_op(ramsey_core::algebra::OpIndex(idx), &[value.clone()])
            .map_err(|e| InputError(e.to_string()))?;
        let position = carrier.iter().position(|v| *v == image).expect("closed op");
        map.push(position);
    }
    Ok(map)
}

fn verify_field(cfg: &ExperimentConfig) -> Result<(Json, u8), InputError> {
    let length = need_usize(cfg, "beta_length")?;
    let term_bound = need_usize(cfg, "term_bound")?;
    let target = need_usize(cfg, "target")?;
    let bounds = need_bounds(cfg)?;
    let beta = build_beta(length, term_bound).map_err(vspace_input)?;
    let sweep = verify_field_counterexample(&beta, bounds, target).map_err(vspace_input)?;
    let code = if sweep.passes() { 0 } else { EXIT_VIOLATION };
    Ok((sweep.to_json(), code))
}

fn verify_vspace(elab: &Elaborated, cfg: &ExperimentConfig) -> Result<(Json, u8), InputError> {
    let length = need_usize(cfg, "beta_length")?;
    let term_bound = need_usize(cfg, "term_bound")?;
    let target = need_usize(cfg, "target")?;
    let bounds = need_bounds(cfg)?;
    let word = cfg
        .sort
        .clone()
        .ok_or_else(|| InputError("experiment needs `sort = <name>`".to_string()))?;
    let lift = cfg
        .literal_value("lift")
        .ok_or_else(|| InputError("experiment needs `lift = (coords)`".to_string()))?;
    let vector_sort = (0..elab.signature.sort_count())
        .map(SortIndex)
        .find(|&s| matches!(elab.signature.phyla[s.0], Phylum::Vectors { .. }))
        .ok_or_else(|| InputError("no vector phylum declared".to_string()))?;
    let value = literal_to_value(&elab.signature, vector_sort, lift).map_err(InputError)?;
    let Value::Vector(v) = value else { unreachable!("vector phylum") };
    let beta = build_beta(length, term_bound).map_err(vspace_input)?;
    let sweep =
        verify_vspace_counterexample(&beta, &word, &v, bounds, target).map_err(vspace_input)?;
    let code = if sweep.passes() { 0 } else { EXIT_VIOLATION };
    Ok((sweep.to_json(), code))
}

fn verify_k_infinite(cfg: &ExperimentConfig) -> Result<(Json, u8), InputError> {
    let p = need_usize(cfg, "p")? as u64;
    let basis = need_usize(cfg, "basis")?;
    let target = need_usize(cfg, "target")?;
    let bounds = need_bounds(cfg)?;
    let sweep = verify_k_infinite_counterexample(p, basis, bounds, target).map_err(vspace_input)?;
    let code = if sweep.passes() { 0 } else { EXIT_VIOLATION };
    Ok((sweep.to_json(), code))
}

fn verify_gate(elab: &Elaborated, cfg: &ExperimentConfig) -> Result<(Json, u8), InputError> {
    let target = need_usize(cfg, "target")?;
    let bounds = need_bounds(cfg)?;
    let prefix = cfg
        .prefix
        .as_ref()
        .ok_or_else(|| InputError("experiment needs `sequence` and `sort`".to_string()))?;
    let gate = corteh_gate(&elab.signature, prefix, bounds, target).map_err(vspace_input)?;
    let code = if gate.passes { 0 } else { EXIT_VIOLATION };
    Ok((gate.to_json(&elab.signature), code))
}

fn cmd_classify(file: &Path, name: &str) -> Result<(Json, u8), InputError> {
    let started = Instant::now();
    let (text, elab) = load(file)?;
    let cfg = experiment(&elab, name)?;
    let outcome = match need_name(cfg, "algebra")? {
        "unary" => {
            let sort = SortIndex(cfg.usize_value("phylum").unwrap_or(0));
            let alg = UnaryAlgebra::from_signature(&elab.signature, sort)
                .map_err(|e| InputError(e.to_string()))?;
            unary_ramsey_classification(&alg).to_json()
        }
        "vspace" => {
            let word = cfg
                .sort
                .clone()
                .ok_or_else(|| InputError("experiment needs `sort = <name>`".to_string()))?;
            let spec = vector_space_spec(&elab.signature)?;
            let verdict = classify_vspace(&spec, &word).map_err(vspace_input)?;
            verdict.to_json()
        }
        other => return Err(InputError(format!("unknown algebra kind `{other}`"))),
    };
    Ok((report("classify", file, &text, Some(name), cfg.bounds, outcome, started), 0))
}

/// The signature must be, up to operation names, the two-sorted scalar/vector
/// algebra over its declared field and dimension.
fn vector_space_spec(sig: &Signature) -> Result<VectorSpaceSpec, InputError> {
    let [Phylum::Field(field), Phylum::Vectors { field: vfield, dim }] = sig.phyla.as_slice()
    else {
        return Err(InputError(
            "classify vspace needs one scalar phylum then one vector phylum".to_string(),
        ));
    };
    if field != vfield {
        return Err(InputError("scalar and vector phyla use different fields".to_string()));
    }
    let spec = VectorSpaceSpec::new(*field, *dim).map_err(vspace_input)?;
    let canon = spec.signature();
    let shape = |s: &Signature| {
        let mut v: Vec<_> = s
            .ops
            .iter()
            .map(|o| (o.arg_sorts.clone(), o.out_sort, format!("{:?}", o.eval)))
            .collect();
        v.sort();
        v
    };
    if shape(sig) != shape(canon) {
        return Err(InputError(
            "operations do not match the scalar/vector algebra".to_string(),
        ));
    }
    Ok(spec)
}
