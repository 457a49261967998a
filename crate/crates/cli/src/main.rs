use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::json;

use oscmax::argbranch::{phi, power_weight, unwrap_arg, Weight};
use oscmax::criteria::{check_ersatz, check_kps, check_main, select_delta_and_eps, Scope};
use oscmax::curve::{
    carleson_constant, carleson_grids, generate_circle, generate_graded_circle, generate_log_spiral,
    generate_mixed_spirality, generate_polyline, Curve, Grading,
};
use oscmax::harness::{
    gamma_rectangle, run_probe, run_sweep, write_json, write_maximal_csv, write_probe_csv, write_submult_csv,
    write_sweep_csv, write_weight_csv, ExperimentConfig,
};
use oscmax::maximal::conjugated_maximal_batch;
use oscmax::norms::{ap_t_grid, luxemburg_norm, make_exponent, muckenhoupt_ap, ExponentField, ExponentKind};
use oscmax::submult::{compute_w, estimate_indices, spirality_indices_with, IndexPair, WOptions};
use oscmax::{Error, Execution};

#[derive(Parser)]
#[command(name = "oscmax", version, about = "Maximal operator experiments with oscillating weights on Carleson curves")]
struct Cli {
    /// Curve JSON consumed by analysis subcommands.
    #[arg(long, global = true)]
    curve: Option<PathBuf>,
    /// Output directory for CSV and JSON reports.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Refinement levels, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a curve and write it as JSON.
    GenCurve(GenCurve),
    /// Spirality indices at the marked point.
    Indices(IndicesArgs),
    /// Grid lower bound of the A_p characteristic of a weight.
    Apcheck(ApArgs),
    /// Luxemburg norm of a sampled function.
    Norm(NormArgs),
    /// Weighted maximal function of a sampled function.
    Maximal(MaximalArgs),
    /// Classify a parameter triple against the boundedness conditions.
    Verdict(VerdictArgs),
    /// Empirical boundedness probe from an experiment config.
    Probe(ConfigArgs),
    /// Probe a rectangle of gamma values.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Circle,
    Spiral,
    Mixed,
    Polyline,
}

#[derive(Args)]
struct GenCurve {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 4096)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long, default_value_t = -1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1e-4)]
    r_min: f64,
    #[arg(long, default_value_t = 1.0)]
    r_max: f64,
    /// Polyline vertices as `x,y;x,y;...`.
    #[arg(long)]
    vertices: Option<String>,
    #[arg(long)]
    closed: bool,
    /// Vertex index of the marked point.
    #[arg(long)]
    marked: Option<usize>,
    /// Decades of grading toward the marked point (circle and polyline).
    #[arg(long)]
    decades: Option<f64>,
    /// Output file name inside `--out`.
    #[arg(long, default_value = "curve.json")]
    name: String,
}

#[derive(Args)]
struct PointArgs {
    /// Marked point `re,im`; defaults to the curve's own.
    #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
    t0: Option<C64>,
}

#[derive(Args)]
struct IndicesArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Decades covered by each side of the x grid.
    #[arg(long, default_value_t = 3.0)]
    decades: f64,
    /// Estimate the indices of `W φ` for this gamma instead of `W η`.
    #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
    gamma: Option<C64>,
}

#[derive(Args)]
struct WeightArgs {
    #[arg(long, value_parser = parse_c64, allow_hyphen_values = true, default_value = "0,0")]
    gamma: C64,
    /// Use the power weight `|τ - t0|^λ` instead of `φ`.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
}

#[derive(Args)]
struct ExponentArgs {
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Profile value far from the marked point; `--p` is the value at it.
    #[arg(long)]
    p_far: Option<f64>,
}

#[derive(Args)]
struct ApArgs {
    #[command(flatten)]
    point: PointArgs,
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Number of evaluation nodes.
    #[arg(long, default_value_t = 128)]
    points: usize,
}

#[derive(Args)]
struct NormArgs {
    #[command(flatten)]
    point: PointArgs,
    #[command(flatten)]
    weight: WeightArgs,
    #[command(flatten)]
    exponent: ExponentArgs,
    /// CSV with a `value` column, one row per node; defaults to 1.
    #[arg(long)]
    function: Option<PathBuf>,
}

#[derive(Args)]
struct MaximalArgs {
    #[command(flatten)]
    point: PointArgs,
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long)]
    function: Option<PathBuf>,
}

#[derive(Args)]
struct VerdictArgs {
    #[command(flatten)]
    point: PointArgs,
    #[command(flatten)]
    exponent: ExponentArgs,
    #[arg(long, value_parser = parse_c64, allow_hyphen_values = true, default_value = "0,0")]
    gamma: C64,
    /// Spirality indices; measured from `--curve` when absent.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config JSON.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    base: ConfigArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-0.6, 0.6])]
    re: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-0.6, 0.6])]
    im: Vec<f64>,
    #[arg(long, default_value_t = 0.2)]
    step: f64,
}

fn parse_c64(s: &str) -> Result<C64, String> {
    let (a, b) = s.split_once(',').ok_or("expected re,im")?;
    let re = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let im = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok(C64::new(re, im))
}

fn parse_vertices(s: &str) -> anyhow::Result<Vec<C64>> {
    s.split(';')
        .filter(|v| !v.trim().is_empty())
        .map(|v| parse_c64(v).map_err(|e| anyhow!(Error::pre(format!("bad vertex {v:?}: {e}")))))
        .collect()
}

struct Ctx {
    curve: Option<PathBuf>,
    out: PathBuf,
    seed: Option<u64>,
    levels: Option<Vec<usize>>,
    exec: Execution,
}

impl Ctx {
    fn curve(&self) -> anyhow::Result<Curve> {
        let path = self
            .curve
            .as_ref()
            .ok_or_else(|| Error::pre("this subcommand needs --curve <file>"))?;
        Ok(Curve::read_json(path)?)
    }

    fn out(&self, name: &str) -> anyhow::Result<PathBuf> {
        fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok(self.out.join(name))
    }

    fn config(&self, path: &Path) -> anyhow::Result<ExperimentConfig> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut c = ExperimentConfig::from_json(&text)?;
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(l) = &self.levels {
            c.levels = l.clone();
        }
        c.execution = self.exec;
        c.validate()?;
        Ok(c)
    }
}

fn t0_of(curve: &Curve, p: &PointArgs) -> anyhow::Result<C64> {
    Ok(match p.t0 {
        Some(t) => t,
        None => curve.require_marked()?,
    })
}

fn weight_of(curve: &Curve, t0: C64, w: &WeightArgs) -> anyhow::Result<Weight> {
    Ok(match w.lambda {
        Some(l) => power_weight(curve, t0, l)?,
        None => phi(&unwrap_arg(curve, t0)?, w.gamma),
    })
}

fn exponent_of(curve: &Curve, t0: C64, e: &ExponentArgs) -> anyhow::Result<ExponentField> {
    let kind = match e.p_far {
        Some(p_far) => ExponentKind::Profile { t0, p_t0: e.p, p_far },
        None => ExponentKind::Constant { p: e.p },
    };
    Ok(make_exponent(curve, kind)?)
}

fn read_function(curve: &Curve, path: Option<&Path>) -> anyhow::Result<Vec<f64>> {
    let Some(path) = path else {
        return Ok(vec![1.0; curve.len()]);
    };
    let mut rd = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let col = rd
        .headers()?
        .iter()
        .position(|h| h == "value")
        .ok_or_else(|| Error::pre("function CSV needs a `value` column"))?;
    let mut f = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let v: f64 = rec[col]
            .trim()
            .parse()
            .map_err(|e| Error::pre(format!("bad function value: {e}")))?;
        f.push(v);
    }
    if f.len() != curve.len() {
        bail!(Error::pre(format!("function has {} values, curve has {} nodes", f.len(), curve.len())));
    }
    Ok(f)
}

fn print_json(v: &serde_json::Value) -> anyhow::Result<()> {
    use std::io::Write;
    // a closed pipe downstream is not an error
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn gen_curve(ctx: &Ctx, a: &GenCurve) -> anyhow::Result<()> {
    let grading = |n: usize| a.decades.map_or(Grading::default_for(n), |d| Grading::new(d, Grading::DEFAULT_PER_DECADE));
    let curve = match a.kind {
        Kind::Circle if a.decades == Some(0.0) => generate_circle(a.radius, a.n)?,
        Kind::Circle => generate_graded_circle(a.radius, a.n, grading(a.n))?,
        Kind::Spiral => generate_log_spiral(a.delta, a.r_min, a.r_max, a.n)?,
        Kind::Mixed => generate_mixed_spirality(a.alpha, a.beta, a.r_min, a.r_max, a.n)?,
        Kind::Polyline => {
            let v = a
                .vertices
                .as_deref()
                .ok_or_else(|| Error::pre("polyline needs --vertices"))?;
            generate_polyline(&parse_vertices(v)?, a.closed, a.n, a.marked, grading(a.n))?
        }
    };
    let path = ctx.out(&a.name)?;
    curve.write_json(&path)?;
    print_json(&json!({
        "path": path,
        "nodes": curve.len(),
        "length": curve.total_length(),
        "closed": curve.is_closed(),
        "t0": curve.marked_point(),
    }))
}

fn indices(ctx: &Ctx, a: &IndicesArgs) -> anyhow::Result<()> {
    let curve = ctx.curve()?;
    let t0 = t0_of(&curve, &a.point)?;
    let opts = WOptions::wide(a.decades);
    let (idx, samples) = match a.gamma {
        None => {
            let branch = unwrap_arg(&curve, t0)?;
            let s = compute_w(&curve, t0, &oscmax::eta(&branch), &opts, ctx.exec)?;
            (estimate_indices(&s)?, s)
        }
        Some(g) => {
            let s = compute_w(&curve, t0, &phi(&unwrap_arg(&curve, t0)?, g), &opts, ctx.exec)?;
            (estimate_indices(&s)?, s)
        }
    };
    write_submult_csv(&samples, fs::File::create(ctx.out("submult.csv")?)?)?;
    let (ti, te) = carleson_grids(&curve, 256, 32);
    let report = json!({
        "t0": t0,
        "indices": idx,
        "submult_excess": samples.submult_excess(),
        "carleson_estimate": carleson_constant(&curve, &ti, &te, ctx.exec),
    });
    write_json(&report, ctx.out("indices.json")?)?;
    print_json(&report)
}

fn apcheck(ctx: &Ctx, a: &ApArgs) -> anyhow::Result<()> {
    let curve = ctx.curve()?;
    let t0 = t0_of(&curve, &a.point)?;
    let w = weight_of(&curve, t0, &a.weight)?;
    let grid = ap_t_grid(&curve, a.points);
    let ap = muckenhoupt_ap(&curve, &w, a.p, &grid, None, ctx.exec)?;
    let mut report = json!({ "p": a.p, "ap_lower_bound": ap, "points": grid.len() });
    if let Some(l) = a.weight.lambda {
        report["kps"] = serde_json::to_value(check_kps(a.p, l)?)?;
    }
    write_weight_csv(&curve, &w, fs::File::create(ctx.out("weight.csv")?)?)?;
    write_json(&report, ctx.out("apcheck.json")?)?;
    print_json(&report)
}

fn norm(ctx: &Ctx, a: &NormArgs) -> anyhow::Result<()> {
    let curve = ctx.curve()?;
    let t0 = t0_of(&curve, &a.point)?;
    let w = weight_of(&curve, t0, &a.weight)?;
    let p = exponent_of(&curve, t0, &a.exponent)?;
    let f = read_function(&curve, a.function.as_deref())?;
    let n = luxemburg_norm(&curve, &f, &w, &p)?;
    let report = json!({ "norm": n, "p_min": p.p_min, "p_max": p.p_max, "dini_constant": p.dini_constant });
    write_json(&report, ctx.out("norm.json")?)?;
    print_json(&report)
}

fn maximal(ctx: &Ctx, a: &MaximalArgs) -> anyhow::Result<()> {
    let curve = ctx.curve()?;
    let t0 = t0_of(&curve, &a.point)?;
    let w = weight_of(&curve, t0, &a.weight)?;
    let f = read_function(&curve, a.function.as_deref())?;
    if f.iter().any(|v| !v.is_finite()) {
        bail!(Error::pre("function values must be finite"));
    }
    let lf: Vec<f64> = f.iter().map(|v| v.abs().ln()).collect();
    let r = conjugated_maximal_batch(&curve, &[lf], w.log_values(), ctx.exec).pop().unwrap();
    let path = ctx.out("maximal.csv")?;
    write_maximal_csv(&curve, &r, fs::File::create(&path)?)?;
    let top = r.log_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    print_json(&json!({ "path": path, "max_log": top }))
}

fn verdict(ctx: &Ctx, a: &VerdictArgs) -> anyhow::Result<()> {
    let given = match (a.alpha, a.beta) {
        (Some(alpha), Some(beta)) => Some(IndexPair::new(alpha, beta)),
        (None, None) => None,
        _ => bail!(Error::pre("give both --alpha and --beta or neither")),
    };
    let Some(path) = ctx.curve.as_ref() else {
        let idx = given.ok_or_else(|| Error::pre("verdict needs --curve or both --alpha and --beta"))?;
        let v = check_main(a.exponent.p, a.gamma, &idx)?;
        return print_json(&serde_json::to_value(v)?);
    };
    let curve = Curve::read_json(path)?;
    let t0 = t0_of(&curve, &a.point)?;
    let idx = match given {
        Some(i) => i,
        None => spirality_indices_with(&curve, t0, &WOptions::default(), ctx.exec)?,
    };
    let p = exponent_of(&curve, t0, &a.exponent)?;
    let mut v = check_main(p.at_t0, a.gamma, &idx)?;
    if v.classification.is_bounded() {
        if let Ok((delta, eps)) = select_delta_and_eps(&curve, &p, t0, a.gamma, &idx) {
            v.delta = Some(delta);
            v.eps = Some(eps);
        }
    }
    let ersatz = check_ersatz(&p, a.gamma, &idx, Scope::WholeCurve)?;
    let report = json!({ "indices": idx, "verdict": v, "ersatz": ersatz });
    write_json(&report, ctx.out("verdict.json")?)?;
    print_json(&report)
}

fn probe(ctx: &Ctx, a: &ConfigArgs) -> anyhow::Result<()> {
    let cfg = ctx.config(&a.config)?;
    let r = run_probe(&cfg)?;
    write_probe_csv(&r, fs::File::create(ctx.out("probe.csv")?)?)?;
    write_json(&r, cfg.output.clone().map_or_else(|| ctx.out("probe.json"), Ok)?)?;
    print_json(&json!({
        "trend": r.trend,
        "ratios": r.ratios(),
        "classification": r.verdict.classification,
        "lower": r.verdict.lower,
        "upper": r.verdict.upper,
    }))
}

fn sweep(ctx: &Ctx, a: &SweepArgs) -> anyhow::Result<()> {
    let cfg = ctx.config(&a.base.config)?;
    if a.re.len() != 2 || a.im.len() != 2 {
        bail!(Error::pre("--re and --im take two values: lo,hi"));
    }
    if a.step.is_nan() || a.step <= 0.0 {
        bail!(Error::pre("--step must be positive"));
    }
    let gammas = gamma_rectangle((a.re[0], a.re[1]), (a.im[0], a.im[1]), a.step);
    let rows = run_sweep(&cfg, &gammas);
    let path = ctx.out("sweep.csv")?;
    write_sweep_csv(&rows, fs::File::create(&path)?)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    print_json(&json!({ "path": path, "rows": rows.len(), "failed_cells": failed }))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let ctx = Ctx {
        curve: cli.curve,
        out: cli.out,
        seed: cli.seed,
        levels: cli.levels,
        exec: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    match &cli.command {
        Command::GenCurve(a) => gen_curve(&ctx, a),
        Command::Indices(a) => indices(&ctx, a),
        Command::Apcheck(a) => apcheck(&ctx, a),
        Command::Norm(a) => norm(&ctx, a),
        Command::Maximal(a) => maximal(&ctx, a),
        Command::Verdict(a) => verdict(&ctx, a),
        Command::Probe(a) => probe(&ctx, a),
        Command::Sweep(a) => sweep(&ctx, a),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(err) if err.is_precondition() => 2,
        Some(_) => 3,
        // unreadable inputs are the caller's problem
        None if e.downcast_ref::<std::io::Error>().is_some() || e.downcast_ref::<csv::Error>().is_some() => 2,
        None => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // wrapped errors often repeat their source in their own message
            let mut parts: Vec<String> = Vec::new();
            for cause in e.chain() {
                let msg = cause.to_string();
                if !parts.last().is_some_and(|last| last.ends_with(&msg)) {
                    parts.push(msg);
                }
            }
            eprintln!("error: {}", parts.join(": "));
            ExitCode::from(exit_code(&e))
        }
    }
}
