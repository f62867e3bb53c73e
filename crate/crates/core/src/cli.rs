//! Command-line front end. [`run`] parses arguments and returns the exit code
//! and both output streams so the binary and the tests share one code path.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::dictlearn::{
    learn_fitted, learn_random, planted_fitted, size_bound, uniform_dataset, Dataset, LearnError,
    VerifyReport, RECONSTRUCTION_TOL,
};
use crate::hypergraph::{parse_instance, Instance, Point, WeightedHypergraph};
use crate::realize::{
    drplan, edge_residuals, residual, solve, solve_with_plan, stage1_size, DrPlan, DrPlanError,
    SolveConfig,
};
use crate::rigidity::{
    assemble, combinatorial_check_with, flex_basis, generic_rank, pure_condition_value,
    CheckOptions, Framework, RankBackend, RigidityClass,
};
use crate::sparsity::{map_decompose, pebble_game, PebbleGame};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(
    name = "rigidkit",
    version,
    about = "Rigidity of pinned subspace-incidence systems"
)]
pub struct Cli {
    /// Emit structured JSON documents instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Root seed; every random component derives its own stream from it.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the main document here instead of stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    PrimeField,
    Float,
}

impl From<Backend> for RankBackend {
    fn from(b: Backend) -> Self {
        match b {
            Backend::PrimeField => RankBackend::PrimeField,
            Backend::Float => RankBackend::Float,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Random,
    Fitted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Planted,
    Uniform,
}

#[derive(Debug, clap::Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Combinatorial verdict cross-checked against the generic rank.
    Check {
        instance: PathBuf,
        /// Per-vertex chart coordinates (array, name map, or solution document).
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Backend::PrimeField)]
        backend: Backend,
        /// Include the rigidity matrix (needs --points).
        #[arg(long)]
        matrix: bool,
    },
    /// Learn a dictionary from data.
    Learn {
        data: PathBuf,
        #[arg(long, short)]
        s: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Random)]
        mode: Mode,
        /// Relative reconstruction tolerance for verification.
        #[arg(long, default_value_t = RECONSTRUCTION_TOL)]
        verify_tol: f64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Generate a dataset.
    Gen {
        #[arg(long, short)]
        d: usize,
        #[arg(long, short)]
        s: usize,
        #[arg(long, short)]
        m: usize,
        #[arg(long, value_enum, default_value_t = Kind::Uniform)]
        kind: Kind,
        /// Where to write the hidden dictionary of a planted dataset.
        #[arg(long)]
        hidden: Option<PathBuf>,
    },
    /// Decomposition-recombination plan of a tight instance.
    Drplan { instance: PathBuf },
    /// Map decomposition of the expansion of a tight instance.
    Decompose { instance: PathBuf },
    /// (d-1, 0)-sparsity of the expansion.
    Sparsity { instance: PathBuf },
    /// Realize a pinned instance.
    Solve {
        instance: PathBuf,
        /// Solve node by node along the DR-plan.
        #[arg(long)]
        plan: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

/// Derives the seed of a named random stream.
pub fn substream(seed: u64, name: &str) -> u64 {
    // FNV-1a over the name, mixed with the root seed
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    (seed ^ h).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let mut stderr = String::new();
    let result = dispatch(&cli, &mut stderr);
    let (code, mut body) = match result {
        Ok(r) => r,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            return Outcome {
                code: f.code,
                stdout: String::new(),
                stderr,
            };
        }
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &body) {
            let _ = writeln!(stderr, "error: writing {}: {e}", path.display());
            return Outcome {
                code: EXIT_INPUT,
                stdout: String::new(),
                stderr,
            };
        }
        body.clear();
    }
    Outcome {
        code,
        stdout: body,
        stderr,
    }
}

fn dispatch(cli: &Cli, stderr: &mut String) -> Result<(i32, String), Failure> {
    match &cli.command {
        Command::Check {
            instance,
            points,
            trials,
            backend,
            matrix,
        } => cmd_check(cli, instance, points.as_deref(), *trials, *backend, *matrix),
        Command::Learn {
            data,
            s,
            mode,
            verify_tol,
            solver,
        } => cmd_learn(cli, data, *s, *mode, *verify_tol, solver),
        Command::Gen {
            d,
            s,
            m,
            kind,
            hidden,
        } => cmd_gen(cli, *d, *s, *m, *kind, hidden.as_deref(), stderr),
        Command::Drplan { instance } => cmd_drplan(cli, instance),
        Command::Decompose { instance } => cmd_decompose(cli, instance),
        Command::Sparsity { instance } => cmd_sparsity(cli, instance),
        Command::Solve {
            instance,
            plan,
            solver,
        } => cmd_solve(cli, instance, *plan, solver),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("reading {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes")
}

fn solve_config(cli: &Cli, a: &SolverArgs, stream: &str) -> Result<SolveConfig, Failure> {
    let cfg = SolveConfig {
        tol: a.tol,
        max_iter: a.max_iter,
        restarts: a.restarts,
        seed: substream(cli.seed, stream),
    };
    cfg.validate().map_err(|e| input_error(e.to_string()))?;
    Ok(cfg)
}

fn names_of(h: &WeightedHypergraph, vs: &[usize]) -> Vec<String> {
    vs.iter().map(|&v| h.names()[v].clone()).collect()
}

fn load_points(path: &Path, h: &WeightedHypergraph) -> Result<Vec<Point>, Failure> {
    let v: Value = serde_json::from_str(&read(path)?)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let v = match v {
        Value::Object(ref m) if m.contains_key("points") => m["points"].clone(),
        other => other,
    };
    let bad = |what: &str| input_error(format!("{}: {what}", path.display()));
    let as_point = |p: &Value| -> Result<Point, Failure> {
        p.as_array()
            .ok_or_else(|| bad("point is not an array"))?
            .iter()
            .map(|c| c.as_f64().ok_or_else(|| bad("coordinate is not a number")))
            .collect()
    };
    let points: Vec<Point> = match &v {
        Value::Array(a) => a.iter().map(as_point).collect::<Result<_, _>>()?,
        Value::Object(m) => h
            .names()
            .iter()
            .map(|n| {
                m.get(n)
                    .ok_or_else(|| bad(&format!("no point for vertex {n}")))
                    .and_then(as_point)
            })
            .collect::<Result<_, _>>()?,
        _ => return Err(bad("expected an array of points or a name-to-point map")),
    };
    if points.len() != h.num_vertices() || points.iter().any(|p| p.len() != h.dim() - 1) {
        return Err(bad(&format!(
            "expected {} points of dimension {}",
            h.num_vertices(),
            h.dim() - 1
        )));
    }
    Ok(points)
}

fn cmd_check(
    cli: &Cli,
    path: &Path,
    points: Option<&Path>,
    trials: usize,
    backend: Backend,
    matrix: bool,
) -> Result<(i32, String), Failure> {
    let inst = load_instance(path)?;
    let h = &inst.hypergraph;
    let opts = CheckOptions {
        seed: substream(cli.seed, "rank"),
        rank_trials: trials,
        ..CheckOptions::default()
    };
    let verdict = combinatorial_check_with(h, &opts);
    let rank = generic_rank(
        h,
        trials.max(1),
        substream(cli.seed, "rank"),
        backend.into(),
    );
    let full = h.total_copies() == h.freedom() && rank == h.freedom();
    let agree = match verdict.class {
        RigidityClass::Undetermined => true,
        RigidityClass::MinimallyRigid => full,
        _ => !full,
    };
    let flexes = h.freedom() - rank.min(h.freedom());
    let mut doc = json!({
        "class": verdict.class,
        "total_copies": verdict.total_copies,
        "freedom": verdict.freedom,
        "sparse": verdict.sparse,
        "conditions_met": verdict.conditions_met,
        "labeling": verdict.labeling,
        "warnings": verdict.warnings,
        "generic_rank": rank,
        "rank_backend": RankBackend::from(backend),
        "generic_flexes": flexes,
        "oracles_agree": agree,
    });
    let mut text = format!(
        "{}: rank {rank}/{} ({} copies), {} flex(es){}\n",
        verdict.class,
        h.freedom(),
        h.total_copies(),
        flexes,
        if agree { "" } else { ", ORACLE DISAGREEMENT" }
    );
    for w in &verdict.warnings {
        let _ = writeln!(
            text,
            "warning: {} pins on vertices {:?} force them out of general position",
            w.pins,
            names_of(h, &w.vertices)
        );
    }
    if let Some(pp) = points {
        let pinned = inst
            .pinned()
            .map_err(|e| input_error(format!("--points needs pins: {e}")))?;
        let pts = load_points(pp, h)?;
        let fr = Framework::new(pinned, pts).map_err(|e| input_error(e.to_string()))?;
        let m = assemble(&fr).map_err(|e| input_error(e.to_string()))?;
        let pc = pure_condition_value(&fr).map_err(|e| input_error(e.to_string()))?;
        let flex = flex_basis(&fr).map_err(|e| input_error(e.to_string()))?;
        let _ = writeln!(
            text,
            "framework: rank {}/{}, pure condition {:e} (relative {:e}), {} flex(es), residual {:e}",
            m.rank(),
            m.cols(),
            pc.value,
            pc.relative,
            flex.len(),
            residual(&fr)
        );
        doc["framework"] = json!({
            "numeric_rank": m.rank(),
            "pure_condition": pc,
            "flex_basis": flex,
            "residual": residual(&fr),
        });
        if matrix {
            let cols: Vec<String> = (0..m.cols())
                .map(|c| format!("{}.{}", h.names()[c / (h.dim() - 1)], c % (h.dim() - 1)))
                .collect();
            let entries: Vec<Vec<f64>> = (0..m.rows())
                .map(|r| m.entries.row(r).iter().copied().collect())
                .collect();
            doc["matrix"] = json!({ "rows": m.row_labels, "columns": cols, "entries": entries });
            let _ = writeln!(text, "matrix: {} x {}", m.rows(), m.cols());
        }
    } else if matrix {
        return Err(input_error("--matrix needs --points"));
    }
    let code = if !agree || verdict.class != RigidityClass::MinimallyRigid {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    };
    Ok((code, if cli.json { pretty(&doc) } else { text }))
}

/// Dataset from delimited text, a dataset document, or a pinned instance
/// document (pins lifted to `(x, 1)`, supports from the hyperedges).
pub fn load_dataset(text: &str) -> Result<Dataset, LearnError> {
    let trimmed = text.trim_start();
    if !trimmed.starts_with('{') {
        return Dataset::from_delimited(text);
    }
    let v: Value = serde_json::from_str(text).map_err(|e| LearnError::Dataset(e.to_string()))?;
    if v.get("hyperedges").is_none() {
        return Dataset::from_json(text);
    }
    let inst = parse_instance(text).map_err(|e| LearnError::Dataset(e.to_string()))?;
    let pinned = inst
        .pinned()
        .map_err(|e| LearnError::Dataset(e.to_string()))?;
    let h = &pinned.hypergraph;
    let mut points = Vec::new();
    let mut supports = Vec::new();
    for (e, pins) in h.edges().iter().zip(&pinned.pins) {
        for x in pins {
            let mut p = x.clone();
            p.push(1.0);
            points.push(p);
            supports.push(e.vertices.clone());
        }
    }
    let ds = Dataset {
        d: h.dim(),
        points,
        n: Some(h.num_vertices()),
        supports: Some(supports),
    };
    ds.validate()?;
    Ok(ds)
}

fn learn_failure(e: LearnError) -> Failure {
    let code = match &e {
        LearnError::Incremental { .. } | LearnError::Plan(DrPlanError::Solve { .. }) => EXIT_SOLVER,
        LearnError::NotRigid { .. } | LearnError::Plan(DrPlanError::NotTight(_)) => EXIT_NEGATIVE,
        _ => EXIT_INPUT,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn report_json(r: &VerifyReport) -> Value {
    json!({
        "pass": r.pass,
        "tol": r.tol,
        "s": r.s,
        "failures": r.failures(),
        "max_error": r.max_error(),
        "errors": r.points.iter().map(|p| json!({"point": p.point, "error": p.error, "support_size": p.support_size})).collect::<Vec<_>>(),
    })
}

fn cmd_learn(
    cli: &Cli,
    path: &Path,
    s: Option<usize>,
    mode: Mode,
    verify_tol: f64,
    solver: &SolverArgs,
) -> Result<(i32, String), Failure> {
    let ds =
        load_dataset(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let cfg = solve_config(cli, solver, "learn")?;
    let (doc, pass, text) = match mode {
        Mode::Random => {
            let s = s.ok_or_else(|| input_error("--s is required in random mode"))?;
            if s == 0 || s >= ds.d {
                return Err(input_error(format!(
                    "need 1 <= s < d, got s = {s}, d = {}",
                    ds.d
                )));
            }
            let out = learn_random(&ds, s, &cfg).map_err(learn_failure)?;
            let report = crate::dictlearn::verify_points(
                &ds,
                &out.dictionary,
                s,
                verify_tol,
                &out.assignment,
            );
            let n = out.dictionary.vectors.len();
            let doc = json!({
                "mode": "random",
                "d": ds.d,
                "s": s,
                "m": ds.points.len(),
                "n": n,
                "size_bound": size_bound(out.assignment.len(), ds.d, s),
                "vectors": out.dictionary.vectors,
                "codes": out.dictionary.codes,
                "unused": out.unused,
                "assignment_attempts": out.attempts,
                "verification": report_json(&report),
            });
            let text = format!(
                "learned {n} vectors from {} points (d = {}, s = {s}), {} unused, verification {} (max error {:e})\n",
                out.assignment.len(),
                ds.d,
                out.unused.len(),
                if report.pass { "pass" } else { "FAIL" },
                report.max_error()
            );
            (doc, report.pass, text)
        }
        Mode::Fitted => {
            let out = learn_fitted(&ds, &cfg).map_err(learn_failure)?;
            let s_eff = s.unwrap_or(out.report.s);
            let core_points: Vec<usize> = out.report.points.iter().map(|p| p.point).collect();
            let report = crate::dictlearn::verify_points(
                &ds,
                &out.dictionary,
                s_eff,
                verify_tol,
                &core_points,
            );
            let report = VerifyReport {
                points: report
                    .points
                    .into_iter()
                    .filter(|p| core_points.contains(&p.point))
                    .collect(),
                ..report
            };
            let report = VerifyReport {
                pass: report.points.iter().all(|p| p.pass),
                ..report
            };
            let doc = json!({
                "mode": "fitted",
                "d": ds.d,
                "s": s_eff,
                "n": out.dictionary.vectors.len(),
                "vectors": out.dictionary.vectors,
                "codes": out.dictionary.codes,
                "max_fan_in": out.max_fan_in,
                "core_residuals": out.core_residuals,
                "validation": out.validation,
                "validation_guided": out.guided,
                "non_generic_data": out.validation_breach,
                "verification": report_json(&report),
            });
            let mut text = format!(
                "fitted {} vectors, max fan-in {}, {} validation pin(s), verification {} (max error {:e})\n",
                out.dictionary.vectors.len(),
                out.max_fan_in,
                out.validation.len(),
                if report.pass { "pass" } else { "FAIL" },
                report.max_error()
            );
            if out.validation_breach {
                text.push_str("warning: a validation pin misses its subspace; data not generic or inconsistent\n");
                if !out.guided {
                    text.push_str("note: no root of the core within the restart budget fits the validation pins\n");
                }
            }
            (doc, report.pass, text)
        }
    };
    Ok((
        if pass { EXIT_OK } else { EXIT_NEGATIVE },
        if cli.json { pretty(&doc) } else { text },
    ))
}

fn cmd_gen(
    cli: &Cli,
    d: usize,
    s: usize,
    m: usize,
    kind: Kind,
    hidden: Option<&Path>,
    stderr: &mut String,
) -> Result<(i32, String), Failure> {
    if d < 2 || s == 0 || s >= d {
        return Err(input_error(format!(
            "need 1 <= s < d, got d = {d}, s = {s}"
        )));
    }
    let min = stage1_size(d, s).edges;
    if m < min {
        return Err(input_error(format!(
            "m = {m} is below the Stage-1 minimum of {min} points for d = {d}, s = {s}"
        )));
    }
    let seed = substream(cli.seed, "gen");
    let ds = match kind {
        Kind::Uniform => uniform_dataset(d, m, seed),
        Kind::Planted => {
            if !((d - s) * m).is_multiple_of(d - 1) {
                return Err(input_error(format!(
                    "planted needs (d - s) m divisible by d - 1; m = {m} is not"
                )));
            }
            let n = (d - s) * m / (d - 1);
            let (ds, vectors) = planted_fitted(d, s, n, seed).ok_or_else(|| {
                input_error(format!("no tight support hypergraph found for n = {n}"))
            })?;
            let doc = pretty(&json!({ "d": d, "vectors": vectors }));
            match hidden {
                Some(p) => std::fs::write(p, doc + "\n")
                    .map_err(|e| input_error(format!("writing {}: {e}", p.display())))?,
                None => stderr.push_str("note: hidden dictionary not written (use --hidden)\n"),
            }
            ds
        }
    };
    // datasets are always JSON documents
    Ok((EXIT_OK, ds.to_json()))
}

fn plan_json(h: &WeightedHypergraph, plan: &DrPlan, id: usize) -> Value {
    let node = &plan.nodes[id];
    json!({
        "id": id,
        "kind": node.kind,
        "vertices": names_of(h, &node.vertices),
        "edges": node.edges,
        "fan_in": node.children.len(),
        "children": node.children.iter().map(|&c| plan_json(h, plan, c)).collect::<Vec<_>>(),
    })
}

fn plan_text(h: &WeightedHypergraph, plan: &DrPlan, id: usize, depth: usize, out: &mut String) {
    let node = &plan.nodes[id];
    let _ = writeln!(
        out,
        "{}{:?} {{{}}} fan-in {}",
        "  ".repeat(depth),
        node.kind,
        names_of(h, &node.vertices).join(","),
        node.children.len()
    );
    for &c in &node.children {
        plan_text(h, plan, c, depth + 1, out);
    }
}

fn cmd_drplan(cli: &Cli, path: &Path) -> Result<(i32, String), Failure> {
    let inst = load_instance(path)?;
    let h = &inst.hypergraph;
    let plan = match drplan(h) {
        Ok(p) => p,
        Err(e) => {
            return Err(Failure {
                code: EXIT_NEGATIVE,
                message: e.to_string(),
            })
        }
    };
    let valid = plan.validate(h);
    let doc = json!({
        "max_fan_in": plan.max_fan_in(),
        "valid": valid.is_ok(),
        "roots": plan.roots.iter().map(|&r| plan_json(h, &plan, r)).collect::<Vec<_>>(),
    });
    let mut text = format!("DR-plan, max fan-in {}\n", plan.max_fan_in());
    for &r in &plan.roots {
        plan_text(h, &plan, r, 0, &mut text);
    }
    if let Err(e) = &valid {
        let _ = writeln!(text, "invalid plan: {e}");
    }
    Ok((
        if valid.is_ok() {
            EXIT_OK
        } else {
            EXIT_NEGATIVE
        },
        if cli.json { pretty(&doc) } else { text },
    ))
}

fn cmd_decompose(cli: &Cli, path: &Path) -> Result<(i32, String), Failure> {
    let inst = load_instance(path)?;
    let h = &inst.hypergraph;
    let mh = h.expand();
    let md = map_decompose(&mh, h.dim() - 1).map_err(|e| Failure {
        code: EXIT_NEGATIVE,
        message: e.to_string(),
    })?;
    md.validate(&mh).map_err(|e| Failure {
        code: EXIT_NEGATIVE,
        message: e,
    })?;
    let copies: Vec<Value> = mh
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            json!({
                "edge": e.parent,
                "vertices": names_of(h, &e.vertices),
                "map": md.map_index[i],
                "tail": h.names()[md.tail[i]],
            })
        })
        .collect();
    let doc = json!({ "k": md.k, "copies": copies });
    let mut text = format!("{} maps over {} copies\n", md.k, mh.len());
    for j in 0..md.k {
        let members: Vec<String> = (0..mh.len())
            .filter(|&i| md.map_index[i] == j)
            .map(|i| format!("{}->{}", mh.edges[i].parent, h.names()[md.tail[i]]))
            .collect();
        let _ = writeln!(text, "map {j}: {}", members.join(" "));
    }
    Ok((EXIT_OK, if cli.json { pretty(&doc) } else { text }))
}

fn cmd_sparsity(cli: &Cli, path: &Path) -> Result<(i32, String), Failure> {
    let inst = load_instance(path)?;
    let h = &inst.hypergraph;
    let k = h.dim() - 1;
    let mh = h.expand();
    let outcome = pebble_game(&mh, k, 0);
    let tight = outcome.sparse && mh.len() == k * mh.num_vertices;
    let mut game = PebbleGame::new(mh.num_vertices, k, 0);
    for e in &mh.edges {
        game.try_add(&e.vertices);
    }
    let rigid_core: Vec<usize> = game.max_tight_set().into_iter().collect();
    let doc = json!({
        "k": k,
        "copies": mh.len(),
        "capacity": k * mh.num_vertices,
        "sparse": outcome.sparse,
        "tight": tight,
        "pebbles_remaining": outcome.state.remaining(),
        "max_tight_set": names_of(h, &rigid_core),
    });
    let text = format!(
        "({k}, 0)-{}: {} copies, capacity {}, {} pebble(s) left\n",
        if tight {
            "tight"
        } else if outcome.sparse {
            "sparse"
        } else {
            "NOT sparse"
        },
        mh.len(),
        k * mh.num_vertices,
        outcome.state.remaining()
    );
    Ok((
        if outcome.sparse {
            EXIT_OK
        } else {
            EXIT_NEGATIVE
        },
        if cli.json { pretty(&doc) } else { text },
    ))
}

fn cmd_solve(
    cli: &Cli,
    path: &Path,
    use_plan: bool,
    solver: &SolverArgs,
) -> Result<(i32, String), Failure> {
    let inst = load_instance(path)?;
    let pinned = inst.pinned().map_err(|e| input_error(e.to_string()))?;
    let h = &pinned.hypergraph;
    let cfg = solve_config(cli, solver, "init")?;
    let fr = if use_plan {
        let plan = drplan(h).map_err(|e| Failure {
            code: EXIT_NEGATIVE,
            message: e.to_string(),
        })?;
        solve_with_plan(&pinned, &plan, &cfg).map_err(|e| match e {
            DrPlanError::Solve { .. } => Failure {
                code: EXIT_SOLVER,
                message: e.to_string(),
            },
            DrPlanError::NotTight(_) => Failure {
                code: EXIT_NEGATIVE,
                message: e.to_string(),
            },
        })?
    } else {
        solve(&pinned, &cfg, None, &Default::default())
            .map_err(|e| Failure {
                code: EXIT_SOLVER,
                message: e.to_string(),
            })?
            .framework
    };
    let res = residual(&fr);
    let per_edge = edge_residuals(&fr);
    let points: serde_json::Map<String, Value> = h
        .names()
        .iter()
        .cloned()
        .zip(fr.points.iter().map(|p| json!(p)))
        .collect();
    let doc = json!({
        "points": points,
        "residual": res,
        "edge_residuals": per_edge,
        "method": if use_plan { "drplan" } else { "direct" },
    });
    let mut text = format!("solved, residual {res:e}\n");
    for (name, p) in h.names().iter().zip(&fr.points) {
        let coords: Vec<String> = p.iter().map(|c| format!("{c:.12}")).collect();
        let _ = writeln!(text, "{name} {}", coords.join(" "));
    }
    Ok((EXIT_OK, if cli.json { pretty(&doc) } else { text }))
}
