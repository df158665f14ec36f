//! `blp`: build models, run verification suites, compute operator norms and
//! inspect projective planes.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use blp_core::filtration::{Filtration, PartitionSpec};
use blp_core::heisenberg::ModelConfig;
use blp_core::operators::{difference_op, norm_estimate, DifferenceKind, LinearOperator};
use blp_core::pgplane::{build_plane, check_plane_axioms, check_residue_identities};
use blp_core::verify::{self, RunOptions, SUITES};
use blp_core::Error;

/// Rough resident bytes per atom across the partitions and vectors a run keeps alive.
const BYTES_PER_ATOM: u64 = 256;
const DEFAULT_BUDGET_MIB: u64 = 2048;

#[derive(Parser, Debug)]
#[command(name = "blp", version, about = "Exact finite model of two-parameter martingales on a triangle-building boundary")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the atom space; optionally export a partition or an operator.
    Build(BuildArgs),
    /// Run a verification suite, or `all`.
    Verify(VerifyArgs),
    /// `L²` operator norms by power iteration.
    Norms(NormsArgs),
    /// Build PG(2, q) and run its checks.
    Plane(PlaneArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// JSON file with fields p, i0, j0, I, J and optional A, B, C, seed; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    /// `i0,j0,I,J`.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Option<[i64; 4]>,
    #[arg(long = "A")]
    a: Option<i64>,
    #[arg(long = "B")]
    b: Option<i64>,
    #[arg(long = "C")]
    c: Option<i64>,
    /// Refuse models whose estimated footprint exceeds this many MiB.
    #[arg(long, default_value_t = DEFAULT_BUDGET_MIB)]
    memory_budget_mib: u64,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// `Level(i,j)`, `Row(i)`, `Col(j)` or `Join(Level(i,j);Level(k,l))`.
    #[arg(long)]
    partition: Option<String>,
    /// `L:i`, `R:j`, `D:i,j`, `Dstar:i,j` or `d:i,j`.
    #[arg(long)]
    operator: Option<String>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Record wall-clock milliseconds per check (reports are then not byte-reproducible).
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct NormsArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Products of difference operators, e.g. `D:1,1*d:1,1^2*D:0,1` (rightmost acts first).
    /// Defaults to every `d:i,j` on the interior grid and `D:i,j` on the grid.
    #[arg(long)]
    operator: Vec<String>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct PlaneArgs {
    #[arg(long)]
    q: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    p: Option<u64>,
    i0: Option<i64>,
    j0: Option<i64>,
    #[serde(rename = "I")]
    i_max: Option<i64>,
    #[serde(rename = "J")]
    j_max: Option<i64>,
    #[serde(rename = "A")]
    a: Option<i64>,
    #[serde(rename = "B")]
    b: Option<i64>,
    #[serde(rename = "C")]
    c: Option<i64>,
    seed: Option<u64>,
}

/// Exit 2: bad configuration. Exit 1: a check failed.
enum Failure {
    Config(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn parse_grid(s: &str) -> Result<[i64; 4], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected i0,j0,I,J, got `{s}`"));
    }
    let mut out = [0i64; 4];
    for (slot, t) in out.iter_mut().zip(parts) {
        *slot = t.trim().parse().map_err(|_| format!("bad integer `{t}` in grid"))?;
    }
    Ok(out)
}

fn load_file(path: &Option<PathBuf>) -> Result<ConfigFile, Failure> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn resolve(model: &ModelArgs, file: &ConfigFile) -> Result<ModelConfig, Failure> {
    let p = model.p.or(file.p).ok_or_else(|| Failure::Config("missing --p".into()))?;
    let [i0, j0, i, j] = match model.grid {
        Some(g) => g,
        None => match (file.i0, file.j0, file.i_max, file.j_max) {
            (Some(a), Some(b), Some(c), Some(d)) => [a, b, c, d],
            _ => return Err(Failure::Config("missing --grid i0,j0,I,J".into())),
        },
    };
    let config = ModelConfig::new(p, i0, j0, i, j).with_exponents(
        model.a.or(file.a),
        model.b.or(file.b),
        model.c.or(file.c),
    );
    config.validate()?;
    let budget = u128::from(model.memory_budget_mib) << 20;
    let atoms = config.atom_count_big();
    let over = u128::try_from(&atoms)
        .ok()
        .and_then(|a| a.checked_mul(u128::from(BYTES_PER_ATOM)))
        .is_none_or(|needed| needed > budget);
    if over {
        return Err(Failure::Config(format!(
            "{atoms} atoms need about {BYTES_PER_ATOM} bytes each, over the memory budget of {} MiB",
            model.memory_budget_mib
        )));
    }
    Ok(config)
}

fn write_out(out: &Output, bytes: &[u8]) -> Result<(), Failure> {
    match &out.output {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Config(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(Error::from)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn build(args: &BuildArgs) -> Result<(), Failure> {
    let config = resolve(&args.model, &load_file(&args.model.config)?)?;
    let filt = Filtration::from_config(config)?;
    let space = filt.space();
    let spec = args.partition.as_deref().map(str::parse::<PartitionSpec>).transpose()?;
    let op = args.operator.as_deref().map(str::parse::<DifferenceKind>).transpose()?;
    let part = spec.as_ref().map(|s| filt.partition(s)).transpose()?;
    let matrix = op.map(|k| difference_op(&filt, k).map(|t| t.to_sparse(space))).transpose()?;
    match args.out.format {
        Format::Json => {
            let mut doc = json!({ "metadata": space.metadata() });
            if let (Some(s), Some(p)) = (&spec, &part) {
                doc["partition"] = json!({
                    "spec": s.to_string(),
                    "cells": p.cell_count(),
                    "cell_size": p.uniform_size(),
                });
            }
            if let (Some(k), Some(m)) = (op, &matrix) {
                doc["operator"] = json!({ "kind": k.to_string(), "nonzeros": m.entries().len() });
            }
            write_out(&args.out, &json_bytes(&doc)?)
        }
        Format::Csv => {
            let mut buf = Vec::new();
            match (&part, &matrix) {
                (Some(_), Some(_)) => {
                    return Err(Failure::Config("CSV output takes one of --partition or --operator".into()))
                }
                (Some(p), None) => p.write_csv(&mut buf)?,
                (None, Some(m)) => m.write_csv(&mut buf)?,
                (None, None) => {
                    let meta = serde_json::to_value(space.metadata()).map_err(Error::from)?;
                    buf.extend_from_slice(b"field,value\n");
                    for key in ["p", "i0", "j0", "I", "J", "A", "B", "C", "atom_count", "pi_box"] {
                        let v = &meta[key];
                        let text = v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string());
                        buf.extend_from_slice(format!("{key},{text}\n").as_bytes());
                    }
                }
            }
            write_out(&args.out, &buf)
        }
    }
}

fn verify_cmd(args: &VerifyArgs) -> Result<(), Failure> {
    let file = load_file(&args.model.config)?;
    let config = resolve(&args.model, &file)?;
    if !verify::is_suite(&args.suite) {
        return Err(Failure::Config(format!(
            "unknown suite `{}`; expected `all` or one of: {}",
            args.suite,
            SUITES.join(", ")
        )));
    }
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let opts = RunOptions { timings: args.timings, ..RunOptions::default() };
    let report = verify::run_suite_with(&args.suite, &config, seed, &opts)?;
    let bytes = match args.out.format {
        Format::Json => json_bytes(&report)?,
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            buf
        }
    };
    write_out(&args.out, &bytes)?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

/// `KIND^m` factors joined by `*`.
fn parse_product(filt: &Filtration, text: &str) -> Result<LinearOperator, Failure> {
    let mut factors = Vec::new();
    for factor in text.split('*') {
        let (kind, power) = match factor.split_once('^') {
            Some((k, m)) => {
                (k, m.trim().parse::<u32>().map_err(|_| Failure::Config(format!("bad power in `{factor}`")))?)
            }
            None => (factor, 1),
        };
        let op = difference_op(filt, kind.trim().parse()?)?;
        factors.push(op.pow(power));
    }
    Ok(LinearOperator::compose(factors))
}

#[derive(Serialize)]
struct NormRow {
    operator: String,
    norm: f64,
    iterations: usize,
    residual: f64,
    converged: bool,
}

fn norms(args: &NormsArgs) -> Result<(), Failure> {
    let config = resolve(&args.model, &load_file(&args.model.config)?)?;
    let filt = Filtration::from_config(config)?;
    let specs: Vec<String> = if args.operator.is_empty() {
        let mut v: Vec<String> = config.interior().iter().map(|l| format!("d:{l}")).collect();
        v.extend(config.grid().iter().map(|l| format!("D:{l}")));
        v
    } else {
        args.operator.clone()
    };
    let mut rows = Vec::new();
    for s in &specs {
        let t = parse_product(&filt, s)?;
        let e = norm_estimate(&t, filt.space());
        rows.push(NormRow {
            operator: s.clone(),
            norm: e.norm,
            iterations: e.iterations,
            residual: e.residual,
            converged: e.converged,
        });
    }
    let bytes = match args.out.format {
        Format::Json => json_bytes(&json!({ "config": filt.space().metadata(), "norms": rows }))?,
        Format::Csv => {
            let mut s = String::from("operator,norm,iterations,residual,converged\n");
            for r in &rows {
                s.push_str(&format!("\"{}\",{:.15e},{},{:.3e},{}\n", r.operator, r.norm, r.iterations, r.residual, r.converged));
            }
            s.into_bytes()
        }
    };
    write_out(&args.out, &bytes)?;
    if rows.iter().all(|r| r.converged) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn plane(args: &PlaneArgs) -> Result<(), Failure> {
    let plane = build_plane(args.q)?;
    let checks = [check_plane_axioms(&plane), check_residue_identities(&plane)];
    let bytes = match args.out.format {
        Format::Json => json_bytes(&json!({
            "q": plane.q(),
            "points": plane.point_count(),
            "lines": plane.line_count(),
            "point_coordinates": plane.points(),
            "line_coordinates": plane.lines(),
            "checks": checks,
        }))?,
        Format::Csv => {
            let mut buf = Vec::new();
            plane.write_csv(&mut buf)?;
            buf
        }
    };
    write_out(&args.out, &bytes)?;
    if checks.iter().all(|c| c.passed()) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("BLP_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| Failure::Config(format!("BLP_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(Failure::Config("BLP_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Build(a) => build(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Norms(a) => norms(a),
        Command::Plane(a) => plane(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
