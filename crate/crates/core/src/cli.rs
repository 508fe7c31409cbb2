//! Command-line front end.
//!
//! Every command writes deterministic output to stdout. Exit codes are
//! 0 for success, 1 for a failed verification or comparison, 2 for usage
//! and input errors.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::builder::TypedValueParser;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::alike::{
    closed_form_antisym_basis, closed_form_sym_basis, solve_alike_with_cap, AlikeDecomposition,
    Dims, BRUTE_FORCE_CAP,
};
use crate::exactlinalg::{span_equal, ExactMatrix, SubspaceBasis};
use crate::format::{matrices_to_json, write_triplets};
use crate::graph::Graph;
use crate::hypercube::{binomial, HypercubeContext, DEFAULT_CAP_D};
use crate::parallel::Execution;
use crate::verify::{verify_all, CheckGroup, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Name of the environment variable overriding the hypercube construction cap.
pub const CAP_ENV: &str = "ALIKE_CAP_D";

#[derive(Debug, Parser)]
#[command(
    name = "alike",
    version,
    about = "Exact A-like matrix spaces of graphs and hypercubes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Dims,
    Basis,
    Solve,
    Verify,
    Compare,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimensions of the A-like space and its symmetric and antisymmetric parts.
    Dims(RunArgs),
    /// Basis matrices: closed form for hypercubes, solved for graph files.
    Basis(RunArgs),
    /// Brute-force constraint solve on any source.
    Solve(RunArgs),
    /// Run the hypercube identity suite.
    Verify(RunArgs),
    /// Compare the solver's spaces with the closed-form bases.
    Compare(RunArgs),
}

impl Command {
    fn split(self) -> (Mode, RunArgs) {
        match self {
            Command::Dims(a) => (Mode::Dims, a),
            Command::Basis(a) => (Mode::Basis, a),
            Command::Solve(a) => (Mode::Solve, a),
            Command::Verify(a) => (Mode::Verify, a),
            Command::Compare(a) => (Mode::Compare, a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Part {
    Full,
    Sym,
    Antisym,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Triplet,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["hypercube", "graph"])))]
pub struct RunArgs {
    /// Use the hypercube Q_D.
    #[arg(long, value_name = "D")]
    pub hypercube: Option<usize>,
    /// Read a graph from a JSON file {"n": int, "edges": [[u, v], ...]}.
    #[arg(long, value_name = "PATH")]
    pub graph: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Part::Full)]
    pub part: Part,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest vertex count handed to the brute-force solver.
    #[arg(long = "cap-bruteforce", value_name = "N", default_value_t = BRUTE_FORCE_CAP,
          value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub cap_bruteforce: usize,
    /// Verification groups to skip, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_group)]
    pub skip: Vec<CheckGroup>,
    /// Include per-group wall-clock timings in the verify report.
    #[arg(long)]
    pub timings: bool,
}

fn parse_group(s: &str) -> Result<CheckGroup, String> {
    CheckGroup::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = CheckGroup::ALL.iter().map(|g| g.name()).collect();
        format!("unknown group `{s}`, expected one of {}", names.join(", "))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Hypercube(usize),
    Graph(PathBuf),
}

/// Validated settings for one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub source: Source,
    pub part: Part,
    pub format: OutputFormat,
    pub seed: u64,
    pub cap_bruteforce: usize,
    pub cap_d: usize,
    pub skip: Vec<CheckGroup>,
    pub timings: bool,
}

impl RunConfig {
    pub fn from_args(mode: Mode, args: RunArgs, cap_d: usize) -> Self {
        let source = match (args.hypercube, args.graph) {
            (Some(d), _) => Source::Hypercube(d),
            (None, Some(p)) => Source::Graph(p),
            (None, None) => unreachable!("clap enforces exactly one source"),
        };
        Self {
            mode,
            source,
            part: args.part,
            format: args.format,
            seed: args.seed,
            cap_bruteforce: args.cap_bruteforce,
            cap_d,
            skip: args.skip,
            timings: args.timings,
        }
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn usage(message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Self {
            stdout: String::new(),
            stderr,
            code: EXIT_USAGE,
        }
    }

    fn json(value: &impl Serialize, code: i32) -> Self {
        let mut stdout = serde_json::to_string_pretty(value).expect("serializable");
        stdout.push('\n');
        Self {
            stdout,
            stderr: String::new(),
            code,
        }
    }

    fn text(stdout: String) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// `cap_env` is the raw value of [`CAP_ENV`], if set.
pub fn run<I, T>(args: I, cap_env: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome::usage(rendered)
            } else {
                Outcome::text(rendered)
            };
        }
    };
    let cap_d = match cap_env {
        None => DEFAULT_CAP_D,
        Some(raw) => match raw.trim().parse::<usize>() {
            Ok(v) if v > 0 => v,
            _ => {
                return Outcome::usage(format!(
                    "error: {CAP_ENV} must be a positive integer, got `{raw}`"
                ))
            }
        },
    };
    let (mode, args) = cli.command.split();
    execute(&RunConfig::from_args(mode, args, cap_d))
}

pub fn execute(cfg: &RunConfig) -> Outcome {
    let result = match cfg.mode {
        Mode::Dims => cmd_dims(cfg),
        Mode::Basis => cmd_basis(cfg),
        Mode::Solve => cmd_solve(cfg),
        Mode::Verify => cmd_verify(cfg),
        Mode::Compare => cmd_compare(cfg),
    };
    result.unwrap_or_else(|msg| Outcome::usage(format!("error: {msg}")))
}

fn hypercube_ctx(d: usize, cfg: &RunConfig) -> Result<HypercubeContext, String> {
    HypercubeContext::with_cap(d, cfg.cap_d).map_err(|e| e.to_string())
}

fn load_graph(path: &PathBuf) -> Result<Graph, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Graph::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn source_graph(cfg: &RunConfig) -> Result<Graph, String> {
    match &cfg.source {
        Source::Hypercube(d) => Ok(hypercube_ctx(*d, cfg)?.graph()),
        Source::Graph(p) => load_graph(p),
    }
}

fn source_json(source: &Source) -> Value {
    match source {
        Source::Hypercube(d) => json!({ "hypercube": d }),
        Source::Graph(p) => json!({ "graph": p.display().to_string() }),
    }
}

fn solve(g: &Graph, cfg: &RunConfig) -> Result<AlikeDecomposition, String> {
    solve_alike_with_cap(g, cfg.cap_bruteforce).map_err(|e| e.to_string())
}

fn dims_json(d: &Dims) -> Value {
    json!({ "sym": d.sym, "antisym": d.antisym, "total": d.total })
}

fn formula_dims(d: usize) -> Dims {
    let (sym, antisym) = (d + 1, binomial(d, 2));
    Dims {
        total: sym + antisym,
        sym,
        antisym,
    }
}

fn cmd_dims(cfg: &RunConfig) -> Result<Outcome, String> {
    let d = match &cfg.source {
        Source::Graph(p) => {
            let dec = solve(&load_graph(p)?, cfg)?;
            let dims = dec.dims();
            return Ok(Outcome::json(
                &json!({
                    "source": source_json(&cfg.source),
                    "sym": dims.sym,
                    "antisym": dims.antisym,
                    "total": dims.total,
                }),
                EXIT_OK,
            ));
        }
        Source::Hypercube(d) => *d,
    };
    let ctx = hypercube_ctx(d, cfg)?;
    let n = ctx.n();
    let sym = SubspaceBasis::from_matrices(n, n, &closed_form_sym_basis(&ctx))
        .expect("square")
        .dim();
    let antisym = SubspaceBasis::from_matrices(n, n, &closed_form_antisym_basis(&ctx))
        .expect("square")
        .dim();
    let closed = Dims {
        total: sym + antisym,
        sym,
        antisym,
    };
    let formula = formula_dims(d);
    let mut agrees = closed == formula;
    let mut out = json!({
        "source": source_json(&cfg.source),
        "sym": closed.sym,
        "antisym": closed.antisym,
        "total": closed.total,
        "formula": dims_json(&formula),
    });
    if n <= cfg.cap_bruteforce {
        let brute = solve(&ctx.graph(), cfg)?.dims();
        agrees &= brute == formula;
        out["brute_force"] = dims_json(&brute);
    } else {
        out["brute_force"] = Value::Null;
        out["brute_force_note"] = json!(format!(
            "{n} vertices exceed the brute-force cap {}",
            cfg.cap_bruteforce
        ));
    }
    out["formula_agrees"] = json!(agrees);
    Ok(Outcome::json(&out, EXIT_OK))
}

fn emit_matrices(ms: &[ExactMatrix], cfg: &RunConfig) -> Outcome {
    match cfg.format {
        OutputFormat::Json => Outcome::json(&matrices_to_json(ms), EXIT_OK),
        OutputFormat::Triplet => Outcome::text(write_triplets(ms)),
    }
}

fn solved_part(dec: &AlikeDecomposition, part: Part) -> Vec<ExactMatrix> {
    dec.matrices(match part {
        Part::Full => &dec.full,
        Part::Sym => &dec.symmetric,
        Part::Antisym => &dec.antisymmetric,
    })
}

fn cmd_basis(cfg: &RunConfig) -> Result<Outcome, String> {
    let ms = match &cfg.source {
        Source::Hypercube(d) => {
            let ctx = hypercube_ctx(*d, cfg)?;
            match cfg.part {
                Part::Sym => closed_form_sym_basis(&ctx),
                Part::Antisym => closed_form_antisym_basis(&ctx),
                Part::Full => {
                    let mut all = closed_form_sym_basis(&ctx);
                    all.extend(closed_form_antisym_basis(&ctx));
                    all
                }
            }
        }
        Source::Graph(p) => solved_part(&solve(&load_graph(p)?, cfg)?, cfg.part),
    };
    Ok(emit_matrices(&ms, cfg))
}

fn cmd_solve(cfg: &RunConfig) -> Result<Outcome, String> {
    let dec = solve(&source_graph(cfg)?, cfg)?;
    let ms = solved_part(&dec, cfg.part);
    if cfg.format == OutputFormat::Triplet {
        return Ok(Outcome::text(write_triplets(&ms)));
    }
    let part = match cfg.part {
        Part::Full => "full",
        Part::Sym => "sym",
        Part::Antisym => "antisym",
    };
    Ok(Outcome::json(
        &json!({
            "source": source_json(&cfg.source),
            "dims": dims_json(&dec.dims()),
            "part": part,
            "basis": matrices_to_json(&ms),
        }),
        EXIT_OK,
    ))
}

fn require_hypercube(cfg: &RunConfig, command: &str) -> Result<HypercubeContext, String> {
    match &cfg.source {
        Source::Hypercube(d) => hypercube_ctx(*d, cfg),
        Source::Graph(_) => Err(format!("{command} requires --hypercube")),
    }
}

fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, String> {
    let ctx = require_hypercube(cfg, "verify")?;
    let opts = VerifyOptions {
        seed: cfg.seed,
        brute_force_cap: cfg.cap_bruteforce,
        record_timings: cfg.timings,
        execution: Execution::Parallel,
        ..VerifyOptions::default()
    }
    .without(&cfg.skip);
    let report = verify_all(&ctx, &opts);
    let code = if report.all_pass {
        EXIT_OK
    } else {
        EXIT_FAILURE
    };
    Ok(Outcome::json(&report, code))
}

fn cmd_compare(cfg: &RunConfig) -> Result<Outcome, String> {
    let ctx = require_hypercube(cfg, "compare")?;
    let n = ctx.n();
    if n > cfg.cap_bruteforce {
        return Err(format!(
            "Q_{} has {n} vertices, above the brute-force cap {}",
            ctx.d(),
            cfg.cap_bruteforce
        ));
    }
    let dec = solve(&ctx.graph(), cfg)?;
    let sym = SubspaceBasis::from_matrices(n, n, &closed_form_sym_basis(&ctx)).expect("square");
    let antisym =
        SubspaceBasis::from_matrices(n, n, &closed_form_antisym_basis(&ctx)).expect("square");
    let full = sym.sum(&antisym).expect("same ambient");
    let eq = |a: &SubspaceBasis, b: &SubspaceBasis| span_equal(a, b).expect("same ambient");
    let (f, s, a) = (
        eq(&dec.full, &full),
        eq(&dec.symmetric, &sym),
        eq(&dec.antisymmetric, &antisym),
    );
    let code = if f && s && a { EXIT_OK } else { EXIT_FAILURE };
    Ok(Outcome::json(
        &json!({
            "source": source_json(&cfg.source),
            "full": f,
            "sym": s,
            "antisym": a,
            "solver_dims": dims_json(&dec.dims()),
            "closed_form_dims": dims_json(&Dims {
                total: full.dim(),
                sym: sym.dim(),
                antisym: antisym.dim(),
            }),
        }),
        code,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> Outcome {
        run(std::iter::once("alike").chain(args.iter().copied()), None)
    }

    fn stdout_json(o: &Outcome) -> Value {
        serde_json::from_str(&o.stdout).unwrap()
    }

    #[test]
    fn dims_of_q3() {
        let o = go(&["dims", "--hypercube", "3"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v = stdout_json(&o);
        assert_eq!(
            (
                v["sym"].as_u64(),
                v["antisym"].as_u64(),
                v["total"].as_u64()
            ),
            (Some(4), Some(3), Some(7))
        );
        assert_eq!(v["formula_agrees"], json!(true));
        assert_eq!(v["brute_force"]["total"], json!(7));
    }

    #[test]
    fn dims_of_q1() {
        let v = stdout_json(&go(&["dims", "--hypercube", "1"]));
        assert_eq!(
            (
                v["sym"].as_u64(),
                v["antisym"].as_u64(),
                v["total"].as_u64()
            ),
            (Some(2), Some(0), Some(2))
        );
    }

    #[test]
    fn brute_force_cap_gives_partial_dims() {
        let v = stdout_json(&go(&["dims", "--hypercube", "3", "--cap-bruteforce", "4"]));
        assert_eq!(v["brute_force"], Value::Null);
        assert_eq!(v["formula_agrees"], json!(true));
    }

    #[test]
    fn basis_of_q1() {
        let sym = stdout_json(&go(&["basis", "--hypercube", "1", "--part", "sym"]));
        assert_eq!(
            sym,
            json!([
                [["1/1", "0/1"], ["0/1", "1/1"]],
                [["0/1", "1/1"], ["1/1", "0/1"]]
            ])
        );
        let anti = stdout_json(&go(&["basis", "--hypercube", "1", "--part", "antisym"]));
        assert_eq!(anti, json!([]));
    }

    #[test]
    fn q2_antisym_triplets() {
        let o = go(&[
            "basis",
            "--hypercube",
            "2",
            "--part",
            "antisym",
            "--format",
            "triplet",
        ]);
        let lines: Vec<&str> = o.stdout.lines().collect();
        assert_eq!(lines[0], "matrix 0 4 4");
        assert_eq!(lines.len(), 9);
        assert!(lines[1..]
            .iter()
            .all(|l| l.ends_with(" 2/1") || l.ends_with(" -2/1")));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(go(&["verify", "--hypercube", "0"]).code, 2);
        assert_eq!(go(&["compare", "--hypercube", "12"]).code, 2);
        assert_eq!(go(&["dims"]).code, 2);
        assert_eq!(
            go(&["dims", "--hypercube", "2", "--graph", "x.json"]).code,
            2
        );
        assert_eq!(
            go(&["verify", "--hypercube", "2", "--skip", "bogus"]).code,
            2
        );
        assert_eq!(
            go(&["dims", "--hypercube", "2", "--cap-bruteforce", "0"]).code,
            2
        );
        assert_eq!(go(&["dims", "--graph", "/nonexistent/g.json"]).code, 2);
        assert_eq!(go(&["frobnicate"]).code, 2);
    }

    #[test]
    fn env_cap_override() {
        let args = ["alike", "dims", "--hypercube", "4"];
        assert_eq!(run(args, Some("3")).code, 2);
        assert_eq!(run(args, Some("4")).code, 0);
        assert_eq!(run(args, Some("zero")).code, 2);
    }

    #[test]
    fn compare_q3() {
        let o = go(&["compare", "--hypercube", "3"]);
        assert_eq!(o.code, 0);
        let v = stdout_json(&o);
        assert_eq!(
            (&v["full"], &v["sym"], &v["antisym"]),
            (&json!(true), &json!(true), &json!(true))
        );
    }

    #[test]
    fn verify_reports_skips_and_timings_on_request() {
        let o = go(&["verify", "--hypercube", "2", "--skip", "brute,idempotents"]);
        assert_eq!(o.code, 0);
        let v = stdout_json(&o);
        let names: Vec<&str> = v["groups"]
            .as_array()
            .unwrap()
            .iter()
            .map(|g| g["group"].as_str().unwrap())
            .collect();
        assert!(!names.contains(&"brute") && !names.contains(&"idempotents"));
        assert!(!o.stdout.contains("elapsed_ms"));
        assert!(go(&["verify", "--hypercube", "2", "--timings"])
            .stdout
            .contains("elapsed_ms"));
    }
}
