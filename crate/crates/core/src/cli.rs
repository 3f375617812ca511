//! The `nilgeo` command line.
//!
//! Every command prints one JSON report line (see [`crate::report`]) and exits
//! 0 when all checks pass, 1 when a check fails or errors, and 2 on a usage or
//! config error, with a diagnostic naming the offending flag or field.
//! Coordinates are comma-separated decimals or `p/q` rationals and are read
//! exactly; results carry both exact strings and `f64` values.
//!
//! CSV traces: `geodesic trace` writes `t,x1,...,xn,gauge`; `fried run` writes
//! `n,t_n,k_n,lambda,margin`.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::algebra::{validate, AlgebraConfig, AlgebraVector, LieAlgebra, LieAlgebraSpec, MAX_STEP};
use crate::catalog::{self, CatalogEntry};
use crate::dynamics::{self, FixedPointVerdict, RadiantModel};
use crate::error::{Error, Result};
use crate::geodesy;
use crate::group::{Group, GroupPoint};
use crate::linalg::Matrix;
use crate::metric::{self, Ball, HomogeneousNorm};
use crate::report::{Check, Report, Status};
use crate::scalar::{format_rational, parse_rational, rational, Rational, Scalar};
use crate::similarity::{self, Similarity};

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Parser, Debug)]
#[command(name = "nilgeo", version, about = "Geometry and dynamics on nilpotent Lie groups with dilatations")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Catalog group name (see `catalog list`).
    #[arg(long, global = true)]
    group: Option<String>,
    /// JSON algebra config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "NILGEO_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Gauge radius r; calibrated from the seed when omitted.
    #[arg(long, global = true)]
    gauge_radius: Option<f64>,
    /// Sample pairs used when calibrating the gauge radius.
    #[arg(long, global = true, default_value_t = 2000)]
    calibration_samples: usize,
    /// Write a CSV trace to this path (geodesic trace, fried run).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate the algebra axioms.
    Algebra {
        #[command(subcommand)]
        cmd: AlgebraCmd,
    },
    /// Group operations in exponential coordinates.
    Group {
        #[command(subcommand)]
        cmd: GroupCmd,
    },
    /// Gauge norm evaluation and calibration.
    Norm {
        #[command(subcommand)]
        cmd: NormCmd,
    },
    /// Left-invariant distance between two points.
    Dist {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    Geodesic {
        #[command(subcommand)]
        cmd: GeodesicCmd,
    },
    Convexity {
        #[command(subcommand)]
        cmd: ConvexityCmd,
    },
    Dynamics {
        #[command(subcommand)]
        cmd: DynamicsCmd,
    },
    Fried {
        #[command(subcommand)]
        cmd: FriedCmd,
    },
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
}

#[derive(Subcommand, Debug)]
enum AlgebraCmd {
    Check,
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    Mul {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    Inv {
        #[arg(long)]
        x: String,
    },
    Dilate {
        #[arg(long)]
        t: String,
        #[arg(long)]
        x: String,
    },
}

#[derive(Subcommand, Debug)]
enum NormCmd {
    Eval {
        #[arg(long)]
        x: String,
    },
    Calibrate {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0.5)]
        shrink: f64,
    },
}

#[derive(Subcommand, Debug)]
enum GeodesicCmd {
    Between {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    Trace {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ConvexityCmd {
    Ball {
        /// Ball center (default: identity).
        #[arg(long)]
        center: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 50)]
        interior: usize,
        /// Endpoint sequences for the stability check.
        #[arg(long, default_value_t = 20)]
        sequences: usize,
        /// Probe the ball minus the concentric half-radius ball instead
        /// (a non-convex set; the check is expected to fail).
        #[arg(long)]
        punctured: bool,
    },
}

#[derive(Args, Debug)]
struct SimilarityArgs {
    /// Dilatation factor lambda > 0.
    #[arg(long)]
    lambda: Option<String>,
    /// Translation part c (default: identity).
    #[arg(long)]
    translation: Option<String>,
    /// Rotation part: 0 for the identity, k for the group's k-th sample rotation.
    #[arg(long, default_value_t = 0)]
    rotation: usize,
}

#[derive(Subcommand, Debug)]
enum DynamicsCmd {
    Orbit {
        #[command(flatten)]
        sim: SimilarityArgs,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    FixedPoint {
        #[command(flatten)]
        sim: SimilarityArgs,
        /// Sample points for the centered-form residual.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Uses the group's sample holonomy unless a similarity is given.
    CommonFixedPoint {
        #[command(flatten)]
        sim: SimilarityArgs,
    },
}

#[derive(Subcommand, Debug)]
enum FriedCmd {
    Run {
        #[arg(long, default_value = "1/2")]
        lambda: String,
        #[arg(long, default_value_t = 0)]
        rotation: usize,
        /// Start point (default: first basis vector).
        #[arg(long)]
        start: Option<String>,
        #[arg(long, default_value_t = dynamics::DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long, default_value_t = 10)]
        horizon: usize,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCmd {
    List,
    /// Print the JSON algebra config of `--group`.
    Export,
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// code. The report goes to standard output, diagnostics to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (code, out, err) = execute(cli);
    if let Some(line) = out {
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), "{line}");
    }
    if let Some(msg) = err {
        eprintln!("nilgeo: error: {msg}");
    }
    code
}

/// Runs `argv` and returns `(exit code, report line, diagnostic)` without
/// printing.
pub fn run_captured<I, T>(argv: I) -> (i32, Option<String>, Option<String>)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => execute(cli),
        Err(e) => (if e.use_stderr() { 2 } else { 0 }, None, Some(e.to_string())),
    }
}

fn execute(cli: Cli) -> (i32, Option<String>, Option<String>) {
    let started = Instant::now();
    let mut ctx = Context {
        command: command_name(&cli.command).to_string(),
        config: Map::new(),
    };
    ctx.config.insert("seed".into(), json!(cli.common.seed));
    let outcome = dispatch(&cli, &mut ctx);
    let elapsed = started.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(report) => {
            let report = report.finish(elapsed);
            (report.exit_code(), Some(report.to_line()), None)
        }
        Err(e) if is_usage_error(&e) => (2, None, Some(e.to_string())),
        Err(e) => {
            let mut report = Report::new(ctx.command.clone(), Value::Object(ctx.config));
            report.push(Check::new("run", Status::Error).witness(e.to_string()));
            let report = report.finish(elapsed);
            (1, Some(report.to_line()), Some(e.to_string()))
        }
    }
}

fn is_usage_error(e: &Error) -> bool {
    !matches!(
        e,
        Error::NoContraction | Error::NotConverged { .. } | Error::CalibrationFailed { .. } | Error::NoRecurrence { .. }
    )
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Algebra { cmd: AlgebraCmd::Check } => "algebra check",
        Command::Group { cmd } => match cmd {
            GroupCmd::Mul { .. } => "group mul",
            GroupCmd::Inv { .. } => "group inv",
            GroupCmd::Dilate { .. } => "group dilate",
        },
        Command::Norm { cmd } => match cmd {
            NormCmd::Eval { .. } => "norm eval",
            NormCmd::Calibrate { .. } => "norm calibrate",
        },
        Command::Dist { .. } => "dist",
        Command::Geodesic { cmd } => match cmd {
            GeodesicCmd::Between { .. } => "geodesic between",
            GeodesicCmd::Trace { .. } => "geodesic trace",
        },
        Command::Convexity { .. } => "convexity ball",
        Command::Dynamics { cmd } => match cmd {
            DynamicsCmd::Orbit { .. } => "dynamics orbit",
            DynamicsCmd::FixedPoint { .. } => "dynamics fixed-point",
            DynamicsCmd::CommonFixedPoint { .. } => "dynamics common-fixed-point",
        },
        Command::Fried { .. } => "fried run",
        Command::Catalog { cmd } => match cmd {
            CatalogCmd::List => "catalog list",
            CatalogCmd::Export => "catalog export",
        },
    }
}

struct Context {
    command: String,
    config: Map<String, Value>,
}

impl Context {
    fn set(&mut self, key: &str, value: impl serde::Serialize) {
        self.config.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    fn report(&self) -> Report {
        Report::new(self.command.clone(), Value::Object(self.config.clone()))
    }
}

/// A resolved group with its sample rotations and holonomy.
struct Source {
    group: Group,
    rank: u8,
    rotations: Vec<Matrix<Rational>>,
    generators: Vec<Similarity<Rational>>,
}

fn load_spec(common: &Common, ctx: &mut Context) -> Result<(LieAlgebraSpec, Option<CatalogEntry>)> {
    match (&common.group, &common.config) {
        (Some(_), Some(_)) => Err(Error::config("--group", "give either --group or --config, not both")),
        (None, None) => Err(Error::config("--group", "a group is required (--group NAME or --config FILE)")),
        (Some(name), None) => {
            let entry = catalog::get(name)?;
            ctx.set("group", name);
            Ok((entry.spec().clone(), Some(entry)))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config("--config", format!("cannot read {}: {e}", path.display())))?;
            ctx.set("config_file", path.display().to_string());
            let spec = AlgebraConfig::from_json(&text)?.to_spec()?;
            ctx.set("algebra", spec.to_config());
            Ok((spec, None))
        }
    }
}

fn load_source(common: &Common, ctx: &mut Context) -> Result<Source> {
    let (spec, entry) = load_spec(common, ctx)?;
    if let Some(e) = entry {
        ctx.set("rank", e.rank);
        return Ok(Source {
            group: e.group,
            rank: e.rank,
            rotations: e.rotations,
            generators: e.generators,
        });
    }
    let group = Group::new(LieAlgebra::new(spec)?);
    let generators = match Similarity::dilatation(&group, rational(1, 2)) {
        Ok(d) => vec![d],
        Err(_) => Vec::new(),
    };
    ctx.set("rank", 1);
    Ok(Source {
        group,
        rank: 1,
        rotations: Vec::new(),
        generators,
    })
}

fn norm_for(common: &Common, group: &Group, ctx: &mut Context) -> Result<HomogeneousNorm> {
    let r = match common.gauge_radius {
        Some(r) => {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::config("--gauge-radius", format!("{r} is not positive")));
            }
            ctx.set("gauge_radius_source", "flag");
            r
        }
        None => {
            if common.calibration_samples == 0 {
                return Err(Error::config("--calibration-samples", "must be at least 1"));
            }
            let cal = metric::calibrate_gauge_radius(group, common.calibration_samples, 0.5, common.seed)?;
            ctx.set("gauge_radius_source", "calibrated");
            ctx.set("calibration_samples", common.calibration_samples);
            cal.gauge_radius
        }
    };
    ctx.set("gauge_radius", r);
    HomogeneousNorm::new(group.clone(), r)
}

fn parse_scalar(field: &str, text: &str) -> Result<Rational> {
    parse_rational(text).ok_or_else(|| Error::config(field, format!("`{text}` is not a number or p/q rational")))
}

fn parse_point(field: &str, text: &str, group: &Group) -> Result<GroupPoint<Rational>> {
    let coords = text
        .split(',')
        .map(|c| parse_scalar(field, c))
        .collect::<Result<Vec<_>>>()?;
    if coords.len() != group.dim() {
        return Err(Error::config(
            field,
            format!("expected {} coordinates, found {}", group.dim(), coords.len()),
        ));
    }
    Ok(GroupPoint::new(coords))
}

fn point_json<S: Scalar>(p: &[S]) -> Value {
    json!(p.iter().map(Scalar::to_f64).collect::<Vec<_>>())
}

fn exact_json(p: &[Rational]) -> Value {
    json!(p.iter().map(format_rational).collect::<Vec<_>>())
}

fn rotation_for(source: &Source, index: usize) -> Result<Matrix<Rational>> {
    match index {
        0 => Ok(Matrix::identity(source.group.dim())),
        k => source.rotations.get(k - 1).cloned().ok_or_else(|| {
            Error::config(
                "--rotation",
                format!("index {k} out of range (this group has {} sample rotations)", source.rotations.len()),
            )
        }),
    }
}

fn similarity_from(args: &SimilarityArgs, source: &Source, ctx: &mut Context) -> Result<Similarity<Rational>> {
    let lambda = parse_scalar("--lambda", args.lambda.as_deref().unwrap_or("1/2"))?;
    if lambda <= rational(0, 1) {
        return Err(Error::config("--lambda", "must be positive"));
    }
    let translation = match &args.translation {
        Some(t) => parse_point("--translation", t, &source.group)?,
        None => source.group.identity(),
    };
    let rotation = rotation_for(source, args.rotation)?;
    ctx.set("lambda", format_rational(&lambda));
    ctx.set("translation", exact_json(translation.coords()));
    ctx.set("rotation", args.rotation);
    Similarity::new(&source.group, lambda, rotation, translation)
}

fn write_csv(common: &Common, ctx: &mut Context, contents: &str) -> Result<()> {
    if let Some(path) = &common.csv {
        std::fs::write(path, contents).map_err(|e| Error::config("--csv", format!("cannot write {}: {e}", path.display())))?;
        ctx.set("csv", path.display().to_string());
    }
    Ok(())
}

fn dispatch(cli: &Cli, ctx: &mut Context) -> Result<Report> {
    let common = &cli.common;
    match &cli.command {
        Command::Algebra { cmd: AlgebraCmd::Check } => algebra_check(common, ctx),
        Command::Catalog { cmd } => match cmd {
            CatalogCmd::List => Ok(ctx.report().result(catalog::list())),
            CatalogCmd::Export => {
                let (spec, _) = load_spec(common, ctx)?;
                Ok(ctx.report().result(spec.to_config()))
            }
        },
        Command::Group { cmd } => group_cmd(common, cmd, ctx),
        Command::Norm { cmd } => norm_cmd(common, cmd, ctx),
        Command::Dist { x, y } => {
            let source = load_source(common, ctx)?;
            let norm = norm_for(common, &source.group, ctx)?;
            let x = parse_point("--x", x, &source.group)?;
            let y = parse_point("--y", y, &source.group)?;
            let d = norm.distance(&x, &y)?;
            let back = norm.distance(&y, &x)?;
            let mut r = ctx.report().result(json!({ "distance": d }));
            r.push(
                Check::pass_if("symmetry", (d - back).abs() <= 1e-12 * d.max(f64::MIN_POSITIVE))
                    .tolerance(1e-12)
                    .value(back),
            );
            Ok(r)
        }
        Command::Geodesic { cmd } => geodesic_cmd(common, cmd, ctx),
        Command::Convexity {
            cmd:
                ConvexityCmd::Ball {
                    center,
                    radius,
                    pairs,
                    interior,
                    sequences,
                    punctured,
                },
        } => {
            let source = load_source(common, ctx)?;
            let norm = norm_for(common, &source.group, ctx)?;
            let center = match center {
                Some(c) => parse_point("--center", c, &source.group)?.to_f64(),
                None => source.group.identity(),
            };
            if *pairs == 0 || *interior == 0 {
                return Err(Error::config("--pairs", "pair and interior counts must be at least 1"));
            }
            let ball = Ball::new(center.clone(), *radius).map_err(|_| Error::config("--radius", "must be positive"))?;
            ctx.set("center", center.coords());
            ctx.set("radius", radius);
            ctx.set("pairs", pairs);
            ctx.set("interior", interior);
            ctx.set("punctured", punctured);
            let mut r = ctx.report();
            if *punctured {
                let rad = *radius;
                let rep = geodesy::check_set_convexity(&norm, &ball, *pairs, *interior, common.seed, |p| {
                    let d = norm.distance(&center, p)?;
                    Ok((rad - d).min(d - rad / 2.0))
                })?;
                r.push(convexity_check("punctured-set-convexity", &rep));
                return Ok(r.result(rep));
            }
            ctx.set("sequences", sequences);
            let rep = geodesy::check_ball_convexity(&norm, &ball, *pairs, *interior, common.seed)?;
            let stab = geodesy::check_convexity_stability(&norm, &ball, *sequences, common.seed.wrapping_add(1))?;
            let mut r = ctx.report();
            r.push(convexity_check("ball-convexity", &rep));
            r.push(
                Check::pass_if("convexity-stability", stab.passed)
                    .tolerance(stab.tolerance)
                    .value(json!({ "rate_constant": stab.rate_constant, "boundary_margin": stab.boundary_margin })),
            );
            Ok(r.result(json!({ "convexity": rep, "stability": stab })))
        }
        Command::Dynamics { cmd } => dynamics_cmd(common, cmd, ctx),
        Command::Fried {
            cmd:
                FriedCmd::Run {
                    lambda,
                    rotation,
                    start,
                    epsilon,
                    horizon,
                },
        } => {
            let source = load_source(common, ctx)?;
            let norm = norm_for(common, &source.group, ctx)?;
            let lam = parse_scalar("--lambda", lambda)?;
            if lam <= rational(0, 1) || lam == rational(1, 1) {
                return Err(Error::config("--lambda", "must be positive and different from 1"));
            }
            let f = Similarity::new(&source.group, lam.clone(), rotation_for(&source, *rotation)?, source.group.identity())?;
            let start = match start {
                Some(s) => parse_point("--start", s, &source.group)?,
                None => GroupPoint::exp(AlgebraVector::basis(source.group.dim(), 0)),
            };
            if !(*epsilon > 0.0 && *epsilon < 0.2) {
                return Err(Error::config("--epsilon", format!("{epsilon} not in (0, 1/5)")));
            }
            if *horizon == 0 {
                return Err(Error::config("--horizon", "must be at least 1"));
            }
            ctx.set("lambda", format_rational(&lam));
            ctx.set("rotation", rotation);
            ctx.set("start", exact_json(start.coords()));
            ctx.set("epsilon", epsilon);
            ctx.set("horizon", horizon);
            let model = RadiantModel::new(norm, vec![f])?;
            let rep = dynamics::fried_experiment(&model, &start, *epsilon, *horizon, common.seed)?;
            write_csv(common, ctx, &rep.csv())?;
            let mut r = ctx.report();
            for c in &rep.checks {
                r.push(
                    Check::pass_if(c.name, c.passed)
                        .tolerance(c.tolerance)
                        .value(json!({ "worst": c.worst, "samples": c.samples })),
                );
            }
            Ok(r.result(json!({
                "lambda_0n": rep.lambda_0n(),
                "experiment": rep,
            })))
        }
    }
}

fn convexity_check(name: &str, rep: &geodesy::ConvexityReport) -> Check {
    let mut c = Check::pass_if(name, rep.passed).tolerance(rep.tolerance).value(rep.worst_margin);
    if let Some(w) = &rep.witness {
        c = c.witness(w);
    }
    c
}

fn algebra_check(common: &Common, ctx: &mut Context) -> Result<Report> {
    let (spec, _) = load_spec(common, ctx)?;
    let validation = validate(&spec);
    let mut r = ctx.report();
    for c in &validation.checks {
        let mut check = Check::pass_if(c.name, c.passed);
        if let Some(w) = &c.witness {
            check = check.witness(w);
        }
        r.push(check);
    }
    if let Some(step) = validation.step {
        r.push(Check::pass_if("step-supported", step <= MAX_STEP).value(step));
    }
    Ok(r.result(json!({
        "dim": spec.dim(),
        "step": validation.step,
        "weights": spec.weights().iter().map(format_rational).collect::<Vec<_>>(),
    })))
}

fn group_cmd(common: &Common, cmd: &GroupCmd, ctx: &mut Context) -> Result<Report> {
    let source = load_source(common, ctx)?;
    let g = &source.group;
    match cmd {
        GroupCmd::Mul { x, y } => {
            let x = parse_point("--x", x, g)?;
            let y = parse_point("--y", y, g)?;
            let p = g.bch_product(&x, &y)?;
            let back = g.bch_product(&p, &g.inverse(&y))?;
            let mut r = ctx.report().result(json!({ "product": point_json(p.coords()), "exact": exact_json(p.coords()) }));
            r.push(Check::pass_if("inverse-round-trip", back == x).tolerance(0.0));
            Ok(r)
        }
        GroupCmd::Inv { x } => {
            let x = parse_point("--x", x, g)?;
            let inv = g.inverse(&x);
            let mut r = ctx.report().result(json!({ "inverse": point_json(inv.coords()), "exact": exact_json(inv.coords()) }));
            r.push(Check::pass_if("product-is-identity", g.bch_product(&x, &inv)?.is_identity()).tolerance(0.0));
            Ok(r)
        }
        GroupCmd::Dilate { t, x } => {
            let x = parse_point("--x", x, g)?;
            let t = parse_scalar("--t", t)?;
            if t <= rational(0, 1) {
                return Err(Error::config("--t", "dilatation factor must be positive"));
            }
            ctx.set("t", format_rational(&t));
            let result = match g.dilate(&t, &x) {
                Ok(d) => json!({ "dilated": point_json(d.coords()), "exact": exact_json(d.coords()) }),
                Err(Error::InexactPower { .. }) => {
                    let d = g.dilate(&t.to_f64(), &x.to_f64())?;
                    json!({ "dilated": point_json(d.coords()) })
                }
                Err(e) => return Err(e),
            };
            Ok(ctx.report().result(result))
        }
    }
}

fn norm_cmd(common: &Common, cmd: &NormCmd, ctx: &mut Context) -> Result<Report> {
    let source = load_source(common, ctx)?;
    match cmd {
        NormCmd::Eval { x } => {
            let norm = norm_for(common, &source.group, ctx)?;
            let x = parse_point("--x", x, &source.group)?;
            let n = norm.gauge_norm(&x);
            let m = norm.gauge_norm(&source.group.inverse(&x));
            let mut r = ctx.report().result(json!({ "gauge": n }));
            r.push(Check::pass_if("symmetry", (n - m).abs() <= 1e-12 * n.max(f64::MIN_POSITIVE)).tolerance(1e-12).value(m));
            Ok(r)
        }
        NormCmd::Calibrate { samples, shrink } => {
            if *samples == 0 {
                return Err(Error::config("--samples", "must be at least 1"));
            }
            if !(*shrink > 0.0 && *shrink < 1.0) {
                return Err(Error::config("--shrink", format!("{shrink} not in (0, 1)")));
            }
            ctx.set("samples", samples);
            ctx.set("shrink", shrink);
            let cal = metric::calibrate_gauge_radius(&source.group, *samples, *shrink, common.seed)?;
            let norm = HomogeneousNorm::new(source.group.clone(), cal.gauge_radius)?;
            let fresh = norm.subadditivity_check(*samples, common.seed.wrapping_add(1))?;
            let mut r = ctx.report();
            let mut check = Check::pass_if("subadditivity-fresh-pairs", fresh.violations == 0)
                .tolerance(metric::SUBADDITIVITY_SLACK)
                .value(json!({ "pairs": fresh.pairs, "violations": fresh.violations, "worst_ratio": fresh.worst_ratio }));
            if let Some(w) = &fresh.witness {
                check = check.witness(w);
            }
            r.push(check);
            Ok(r.result(cal))
        }
    }
}

fn geodesic_cmd(common: &Common, cmd: &GeodesicCmd, ctx: &mut Context) -> Result<Report> {
    let source = load_source(common, ctx)?;
    let g = &source.group;
    match cmd {
        GeodesicCmd::Between { x, y } => {
            let x = parse_point("--x", x, g)?;
            let y = parse_point("--y", y, g)?;
            let seg = geodesy::segment_between(g, &x, &y)?;
            let end = geodesy::geodesic_point(g, &seg, &rational(1, 1))?;
            let mut r = ctx.report().result(json!({
                "base": point_json(seg.base.coords()),
                "direction": point_json(seg.direction.coords()),
                "direction_exact": exact_json(seg.direction.coords()),
            }));
            r.push(Check::pass_if("endpoint-round-trip", end == y).tolerance(0.0));
            Ok(r)
        }
        GeodesicCmd::Trace { x, y, samples } => {
            let norm = norm_for(common, g, ctx)?;
            let x = parse_point("--x", x, g)?;
            let y = parse_point("--y", y, g)?;
            if *samples == 0 {
                return Err(Error::config("--samples", "must be at least 1"));
            }
            ctx.set("samples", samples);
            let seg = geodesy::segment_between(g, &x, &y)?;
            let rows = geodesy::trace(&norm, &seg, *samples)?;
            write_csv(common, ctx, &geodesy::trace_csv(&rows))?;
            let end = rows.last().map(|r| r.coords.clone()).unwrap_or_default();
            let mut r = ctx.report();
            r.push(Check::pass_if("endpoint-round-trip", end == y.to_f64().into_coords()).tolerance(0.0));
            Ok(r.result(json!({ "rows": rows })))
        }
    }
}

fn dynamics_cmd(common: &Common, cmd: &DynamicsCmd, ctx: &mut Context) -> Result<Report> {
    let source = load_source(common, ctx)?;
    let norm = norm_for(common, &source.group, ctx)?;
    let g = &source.group;
    match cmd {
        DynamicsCmd::Orbit { sim, x, n } => {
            let f = similarity_from(sim, &source, ctx)?;
            let x = parse_point("--x", x, g)?;
            ctx.set("x", exact_json(x.coords()));
            ctx.set("n", n);
            let points = dynamics::orbit(&f, &x, *n)?;
            let mut r = ctx.report();
            let mut result = json!({ "orbit": points.iter().map(|p| point_json(p.coords())).collect::<Vec<_>>() });
            if *f.lambda() < rational(1, 1) {
                let beta = similarity::fixed_point(&norm, &f)?.point;
                let dists = points.iter().map(|p| norm.distance(&beta, p)).collect::<Result<Vec<_>>>()?;
                let lam = f.lambda().to_f64();
                let check = if f.rotation().is_identity_matrix() {
                    let worst = dists
                        .windows(2)
                        .filter(|w| w[0] > 0.0)
                        .map(|w| (w[1] / w[0] - lam).abs() / lam)
                        .fold(0.0, f64::max);
                    Check::pass_if("orbit-contraction", worst <= 1e-9).tolerance(1e-9).value(worst)
                } else {
                    let tail = &dists[dists.len() / 2..];
                    Check::pass_if("orbit-contraction", tail.windows(2).all(|w| w[1] <= w[0])).value(tail)
                };
                r.push(check);
                result["fixed_point"] = point_json(beta.coords());
                result["distance_to_fixed_point"] = json!(dists);
            } else {
                r.push(Check::new("orbit-contraction", Status::NotApplicable).witness("lambda >= 1"));
            }
            Ok(r.result(result))
        }
        DynamicsCmd::FixedPoint { sim, samples } => {
            let f = similarity_from(sim, &source, ctx)?;
            ctx.set("samples", samples);
            let fp = similarity::fixed_point(&norm, &f)?;
            let residual = norm.distance(&f.apply(&fp.point)?, &fp.point)?;
            let centered = similarity::centered_residual(&norm, &f, &fp.point, *samples, common.seed)?;
            let mut r = ctx.report().result(json!({
                "fixed_point": point_json(fp.point.coords()),
                "iterations": fp.iterations,
                "last_step": fp.last_step,
            }));
            r.push(Check::pass_if("fixed-point-residual", residual < 1e-9).tolerance(1e-9).value(residual));
            r.push(Check::pass_if("centered-residual", centered < 1e-9).tolerance(1e-9).value(centered));
            Ok(r)
        }
        DynamicsCmd::CommonFixedPoint { sim } => {
            let gens = if sim.lambda.is_some() || sim.translation.is_some() || sim.rotation != 0 {
                vec![similarity_from(sim, &source, ctx)?]
            } else {
                ctx.set("generators", "catalog");
                source.generators.clone()
            };
            let res = dynamics::common_fixed_point(&norm, &gens, source.rank)?;
            let status = match res.verdict {
                FixedPointVerdict::Shared => Status::Pass,
                FixedPointVerdict::NotShared => Status::Fail,
                FixedPointVerdict::NotApplicable => Status::NotApplicable,
            };
            let mut check = Check::new("common-fixed-point", status).tolerance(res.tolerance).value(res.verdict);
            if let Some(w) = &res.witness {
                check = check.witness(w);
            }
            let mut r = ctx.report();
            r.push(check);
            Ok(r.result(res))
        }
    }
}
