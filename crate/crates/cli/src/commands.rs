use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use conemetric::axioms::{check_matrix_axioms, AxiomReport};
use conemetric::fixpoint::banach_iterate;
use conemetric::metrics::validate_cone_metric;
use conemetric::metrize::{distance_matrix, equivalent_metric, format_significant, DistanceMatrix, MetrizationMethod};
use conemetric::transfer::{check_corollary, sample_pairs, ContractiveCondition};
use conemetric::{ConeMetric, OrderedVectorSpace, Point, SelfMap};
use serde::Serialize;
use serde_json::json;

use crate::config::{self, load, parse_point, MetricConfig, PointsFile, SpaceConfig, SCHEMA};
use crate::error::CliError;
use crate::manifest::{sibling, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ERROR_BOUND: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;

pub struct Global {
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub quiet: bool,
}

impl Global {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }
}

#[derive(Args, Debug)]
pub struct Inputs {
    /// Codomain description (optional for the geometric ℓq metric)
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// Cone metric description
    #[arg(long)]
    pub metric: PathBuf,
    /// Points to evaluate (defaults to the labels of a table metric)
    #[arg(long)]
    pub points: Option<PathBuf>,
}

struct Loaded {
    cm: ConeMetric,
    points: Vec<Point>,
}

enum SpaceOutcome {
    Ready(Option<OrderedVectorSpace>),
    BadCone(Vec<String>),
}

fn load_space(path: Option<&Path>, g: &Global) -> Result<SpaceOutcome, CliError> {
    let Some(path) = path else {
        return Ok(SpaceOutcome::Ready(None));
    };
    let cfg: SpaceConfig = load(path)?;
    match cfg.build(g.tolerance) {
        Err(config::InvalidCone(report)) => Ok(SpaceOutcome::BadCone(report.failures)),
        Ok(Err(msg)) => Err(CliError::input(path, msg)),
        Ok(Ok(space)) => Ok(SpaceOutcome::Ready(Some(space))),
    }
}

fn load_metric(path: &Path, space: Option<&OrderedVectorSpace>, g: &Global) -> Result<ConeMetric, CliError> {
    let cfg: MetricConfig = load(path)?;
    let cm = cfg.build(space, g.seed).map_err(|m| CliError::input(path, m))?;
    match (space, g.tolerance) {
        // the ℓq metric carries its own codomain
        (None, Some(t)) => Ok(cm.with_tolerance(t)?),
        _ => Ok(cm),
    }
}

fn load_points(path: Option<&Path>, cm: &ConeMetric) -> Result<Vec<Point>, CliError> {
    match path {
        Some(p) => Ok(load::<PointsFile>(p)?.points),
        None => cm
            .table_points()
            .ok_or_else(|| CliError::Invalid("--points is required for metrics on continuous domains".into())),
    }
}

fn load_inputs(inp: &Inputs, g: &Global) -> Result<Result<Loaded, Vec<String>>, CliError> {
    let space = match load_space(inp.space.as_deref(), g)? {
        SpaceOutcome::BadCone(f) => return Ok(Err(f)),
        SpaceOutcome::Ready(s) => s,
    };
    let cm = load_metric(&inp.metric, space.as_ref(), g)?;
    let points = load_points(inp.points.as_deref(), &cm)?;
    for p in &points {
        cm.check_point(p)?;
    }
    Ok(Ok(Loaded { cm, points }))
}

fn bad_cone(failures: &[String]) -> i32 {
    eprintln!("invalid cone: {}", failures.join("; "));
    EXIT_INVALID
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    fs::write(path, text + "\n")?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct MetrizeArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Output CSV (stdout when omitted); a `.meta.json` sidecar is written next to it
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest acceptable certified error bound
    #[arg(long, default_value_t = 1e-6)]
    pub max_error: f64,
}

#[derive(Serialize)]
struct MetrizeMeta<'a> {
    schema: u64,
    labels: &'a [String],
    methods: &'a [Vec<MetrizationMethod>],
    error_bounds: &'a [Vec<f64>],
    max_error_bound: f64,
}

pub fn metrize(args: &MetrizeArgs, g: &Global) -> Result<i32, CliError> {
    let mut manifest = RunManifest::new("metrize", g.seed);
    manifest.input(args.inputs.space.as_deref());
    manifest.input(Some(&args.inputs.metric));
    manifest.input(args.inputs.points.as_deref());
    let loaded = match load_inputs(&args.inputs, g)? {
        Ok(l) => l,
        Err(f) => return Ok(bad_cone(&f)),
    };
    let m: DistanceMatrix = distance_matrix(&loaded.cm, &loaded.points)?;
    let csv = m.to_csv();
    let max_eb = m.max_error_bound();
    match &args.out {
        Some(out) => {
            fs::write(out, &csv)?;
            let meta_path = sibling(out, "meta.json");
            write_json(
                &meta_path,
                &MetrizeMeta {
                    schema: SCHEMA,
                    labels: &m.labels,
                    methods: &m.methods,
                    error_bounds: &m.error_bounds,
                    max_error_bound: max_eb,
                },
            )?;
            manifest.output(out);
            manifest.output(&meta_path);
        }
        None => {
            if !g.quiet {
                print!("{csv}");
            }
        }
    }
    manifest.emit()?;
    if max_eb > args.max_error {
        eprintln!(
            "certified error bound {} exceeds --max-error {}",
            format_significant(max_eb),
            args.max_error
        );
        return Ok(EXIT_ERROR_BOUND);
    }
    Ok(EXIT_OK)
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Also write the full report as JSON
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn axiom_line(name: &str, tau: f64, r: &AxiomReport) -> String {
    format!(
        "{name} (tolerance {}): {} [nonnegativity {}/{}, identity {}/{}, symmetry {}/{}, triangle {}/{}{}]",
        format_significant(tau),
        if r.passed() { "pass" } else { "FAIL" },
        r.nonnegativity.violations,
        r.nonnegativity.checked,
        r.identity.violations,
        r.identity.checked,
        r.symmetry.violations,
        r.symmetry.checked,
        r.triangle.violations,
        r.triangle.checked,
        if r.triples_sampled { ", sampled" } else { "" }
    )
}

fn triple_line(side: &str, r: &AxiomReport, points: &[Point], what: &str) -> Option<String> {
    r.first_triangle_violation.map(|[x, y, z]| {
        let (x, y, z) = (&points[x], &points[y], &points[z]);
        format!("first violating triple ({side}): {what}({x}, {y}) exceeds {what}({x}, {z}) + {what}({z}, {y})")
    })
}

pub fn check(args: &CheckArgs, g: &Global) -> Result<i32, CliError> {
    let mut manifest = RunManifest::new("check", g.seed);
    manifest.input(args.inputs.space.as_deref());
    manifest.input(Some(&args.inputs.metric));
    manifest.input(args.inputs.points.as_deref());
    let loaded = match load_inputs(&args.inputs, g)? {
        Ok(l) => l,
        Err(f) => {
            g.say("cone: FAIL");
            for reason in &f {
                g.say(format!("  {reason}"));
            }
            manifest.emit()?;
            return Ok(bad_cone(&f));
        }
    };
    let Loaded { cm, points } = loaded;
    let tau = cm.space().tolerance();
    g.say("cone: pass");
    let cone_report = validate_cone_metric(&cm, &points, tau)?;
    g.say(axiom_line("cone metric axioms", tau, &cone_report));
    if let Some(l) = triple_line("cone metric", &cone_report, &points, "D") {
        g.say(l);
    }
    let d_report = if cone_report.nonnegativity.violations == 0 {
        let m = distance_matrix(&cm, &points)?;
        let tau_d = tau + m.max_error_bound();
        let r = check_matrix_axioms(&m.values, &|i, j| points[i] == points[j], tau_d);
        g.say(axiom_line("metrized d axioms", tau_d, &r));
        if let Some(l) = triple_line("metrized d", &r, &points, "d") {
            g.say(l);
        }
        Some(r)
    } else {
        g.say("metrized d axioms: skipped (cone metric leaves the cone)");
        None
    };
    let passed = cone_report.passed() && d_report.as_ref().is_some_and(|r| r.passed());
    if let Some(path) = &args.report {
        write_json(
            path,
            &json!({
                "schema": SCHEMA,
                "cone": "pass",
                "cone_metric": cone_report,
                "metrized": d_report,
                "passed": passed,
            }),
        )?;
        manifest.output(path);
    }
    manifest.emit()?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

#[derive(Args, Debug)]
pub struct TransferArgs {
    /// Contractive condition, e.g. {"kind": "banach", "alpha": 0.5}
    #[arg(long)]
    pub condition: PathBuf,
    #[command(flatten)]
    pub inputs: Inputs,
    /// Self map description
    #[arg(long)]
    pub map: PathBuf,
    /// Second cone metric for the dominance condition (defaults to the first)
    #[arg(long)]
    pub dstar: Option<PathBuf>,
    /// Number of ordered pairs to sample (all pairs when omitted)
    #[arg(long)]
    pub samples: Option<usize>,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn transfer(args: &TransferArgs, g: &Global) -> Result<i32, CliError> {
    let mut manifest = RunManifest::new("transfer", g.seed);
    manifest.input(Some(&args.condition));
    manifest.input(args.inputs.space.as_deref());
    manifest.input(Some(&args.inputs.metric));
    manifest.input(args.inputs.points.as_deref());
    manifest.input(Some(&args.map));
    manifest.input(args.dstar.as_deref());
    let mut cond: ContractiveCondition = load(&args.condition)?;
    if let Err(e) = cond.validate() {
        eprintln!("{}: {e}", args.condition.display());
        return Ok(EXIT_INVALID);
    }
    let Loaded { cm, points } = match load_inputs(&args.inputs, g)? {
        Ok(l) => l,
        Err(f) => return Ok(bad_cone(&f)),
    };
    let map: SelfMap = load(&args.map)?;
    if let ContractiveCondition::Dominance { dstar } = &mut cond {
        let other = match &args.dstar {
            Some(p) => load_metric(p, Some(cm.space()), g)?,
            None => cm.clone(),
        };
        *dstar = Some(Box::new(other));
    }
    let pairs = sample_pairs(&points, args.samples.unwrap_or(usize::MAX), g.seed);
    let tau = cm.space().tolerance();
    let report = check_corollary(&cond, &cm, &map, &pairs, tau)?;
    let doc = json!({
        "schema": SCHEMA,
        "condition": cond,
        "pairs": pairs.len(),
        "report": report,
    });
    match &args.out {
        Some(p) => {
            write_json(p, &doc)?;
            manifest.output(p);
        }
        None => g.say(serde_json::to_string_pretty(&doc).expect("report serializes")),
    }
    manifest.emit()?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILED })
}

#[derive(Args, Debug)]
pub struct FixpointArgs {
    #[arg(long)]
    pub space: Option<PathBuf>,
    #[arg(long)]
    pub metric: PathBuf,
    #[arg(long)]
    pub map: PathBuf,
    /// Start point: a number, a JSON array, or a label
    #[arg(long, allow_hyphen_values = true)]
    pub x0: String,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    /// Write the trace here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn fixpoint(args: &FixpointArgs, g: &Global) -> Result<i32, CliError> {
    let mut manifest = RunManifest::new("fixpoint", g.seed);
    manifest.input(args.space.as_deref());
    manifest.input(Some(&args.metric));
    manifest.input(Some(&args.map));
    let space = match load_space(args.space.as_deref(), g)? {
        SpaceOutcome::BadCone(f) => return Ok(bad_cone(&f)),
        SpaceOutcome::Ready(s) => s,
    };
    let cm = load_metric(&args.metric, space.as_ref(), g)?;
    let map: SelfMap = load(&args.map)?;
    let x0 = parse_point(&args.x0);
    let trace = banach_iterate(&cm, &map, &x0, args.tol, args.max_iter)?;
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: u64,
        #[serde(flatten)]
        trace: &'a conemetric::fixpoint::IterationTrace,
    }
    let doc = Doc { schema: SCHEMA, trace: &trace };
    match &args.out {
        Some(p) => {
            write_json(p, &doc)?;
            manifest.output(p);
            g.say(format!(
                "{} after {} iterations, final point {}, residual {}",
                if trace.converged {
                    "converged"
                } else if trace.diverged {
                    "diverged"
                } else {
                    "not converged"
                },
                trace.iterations,
                trace.final_point(),
                format_significant(trace.residual)
            ));
        }
        None => g.say(serde_json::to_string_pretty(&doc).expect("trace serializes")),
    }
    manifest.emit()?;
    Ok(if trace.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleName {
    Discrete,
    Product,
    Lq,
}

#[derive(Args, Debug)]
pub struct ExamplesArgs {
    pub name: ExampleName,
    /// Second coefficient of the product example
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long, default_value_t = 2.0)]
    pub b: f64,
    #[arg(long, default_value_t = conemetric::metrics::DEFAULT_TRUNCATION)]
    pub truncation: usize,
    /// Directory receiving space.json, metric.json and points.json
    #[arg(long, default_value = ".")]
    pub dir: PathBuf,
}

pub fn examples(args: &ExamplesArgs, g: &Global) -> Result<i32, CliError> {
    let mut manifest = RunManifest::new("examples", g.seed);
    let (space, metric, points, pairs) = match args.name {
        ExampleName::Discrete => (
            json!({"schema": SCHEMA, "dim": 2, "norm": {"type": "lp", "p": 2}, "cone": {"type": "orthant"}}),
            json!({"schema": SCHEMA, "kind": "discrete", "a": [0.6, 0.8]}),
            json!({"schema": SCHEMA, "points": ["a", "b", "c"]}),
            vec![("a", "b"), ("a", "a")],
        ),
        ExampleName::Product => (
            json!({"schema": SCHEMA, "dim": 2, "norm": {"type": "lp", "p": 2}, "cone": {"type": "orthant"}}),
            json!({"schema": SCHEMA, "kind": "product", "a": 1.0, "b": args.alpha, "d1": "euclidean", "d2": "euclidean"}),
            json!({"schema": SCHEMA, "points": [0.0, 1.0, 2.0]}),
            vec![("0", "1"), ("0", "2")],
        ),
        ExampleName::Lq => (
            json!({"schema": SCHEMA, "dim": args.truncation, "norm": {"type": "lp", "p": args.q, "quasi": args.q < 1.0}, "cone": {"type": "orthant"}}),
            json!({"schema": SCHEMA, "kind": "geometric-lq", "rho": "euclidean", "b": args.b, "q": args.q, "truncation": args.truncation}),
            json!({"schema": SCHEMA, "points": [0.0, 1.0, 3.0]}),
            vec![("0", "1"), ("0", "3")],
        ),
    };
    fs::create_dir_all(&args.dir)?;
    let files = [("space.json", &space), ("metric.json", &metric), ("points.json", &points)];
    for (name, doc) in files {
        let p = args.dir.join(name);
        write_json(&p, doc)?;
        manifest.output(&p);
    }
    let space_path = args.dir.join("space.json");
    let cm = match load_space(Some(&space_path), g)? {
        SpaceOutcome::BadCone(f) => return Ok(bad_cone(&f)),
        SpaceOutcome::Ready(s) => load_metric(&args.dir.join("metric.json"), s.as_ref(), g)?,
    };
    let d = equivalent_metric(&cm);
    let tail = cm.truncation_tail_bound().ok();
    for (x, y) in pairs {
        let (x, y) = (parse_point(x), parse_point(y));
        let closed = cm.closed_form_d(&x, &y)?.expect("examples have closed forms");
        let solved = d.metrize(&x, &y)?;
        let mut line = format!(
            "d({x}, {y}) = {} (closed form), {} (solver, {})",
            format_significant(closed),
            format_significant(solved.value),
            solved.method.as_str()
        );
        if let (Some(tail), conemetric::metrics::ConeMetricKind::GeometricLq { rho, .. }) = (&tail, cm.kind()) {
            line.push_str(&format!(", tail bound {}", format_significant(tail(rho.distance(&x, &y)?))));
        }
        g.say(line);
    }
    manifest.emit()?;
    Ok(EXIT_OK)
}
