//! Command line front end for the `fgce` library.
//!
//! Every subcommand prints a single result envelope (JSON by default,
//! CSV for series meant to be plotted) and is deterministic: the same
//! flags and seed always produce byte-identical output.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use fgce::bounds::{
    bound_power_of_ce, bound_sum_max, bound_triplet, dfr_check, order_dispersive, order_hr,
    order_st, shared_grid, st_counterexample_scan, BoundReport, OrderVerdict,
};
use fgce::catalog::{catalog_entries, CatalogDistribution};
use fgce::dynamic::{
    dyn_bounds_report, dyn_fgce, dyn_fgcre, dyn_nfgce, mean_inactivity, mean_residual_life,
};
use fgce::empirical::{
    clt_montecarlo, empirical_alpha0, empirical_fgce, ks_distance_to_normal,
    uniform_sample_moments, McConfig, Sample,
};
use fgce::fracint::{fgce_via_rl, fgcre_via_rl};
use fgce::measure::{
    fgce, fgce_alpha0_limit, fgce_quantile_form, fgce_via_xi_expectation, fgcre, nfgce,
    Alpha0Limit,
};
use fgce::prhm::{dyn_fgce_prhm, dyn_fgcre_phm, fgce_prhm, fgce_prhm_via_moments, phm_model, recurrence_n};
use fgce::{AlphaParam, CdfModel, Error, MeasureReport, QuadratureConfig};

#[derive(Parser)]
#[command(
    name = "fgce",
    version,
    about = "Fractional cumulative entropy measures: closed forms, quadrature, estimation"
)]
struct Cli {
    /// Output format for the result envelope.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the envelope to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Seed for every randomized computation.
    #[arg(long, global = true, env = "FGCE_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute a measure of a catalog law over an order or order grid.
    Measure(MeasureArgs),
    /// Time-conditioned measures along an inspection-time grid.
    Dynamic(DynamicArgs),
    /// Power-transformed laws: both computational routes and the order
    /// recurrence.
    Prhm(PrhmArgs),
    /// Evaluate the analytic bounds on a law (optionally conditioned on
    /// an inspection time, optionally against a second summand).
    Bounds(BoundsArgs),
    /// Stochastic-order predicates between two laws.
    Orders(OrdersArgs),
    /// Nonparametric estimate from a plain-text data file.
    Empirical(EmpiricalArgs),
    /// Monte Carlo sampling study of the estimator.
    Mc(McArgs),
    /// Sign scan of measure differences across power-law shape pairs.
    Scan(ScanArgs),
    /// Cross-check the alternate computational routes against direct
    /// quadrature.
    VerifyIdentities(VerifyArgs),
    /// List the named laws this tool understands.
    Catalog,
}

/// Exactly one of a scalar order or an inclusive `start:end:step` grid.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct AlphaSel {
    /// Order of the measure (0 selects the vanishing-order limit).
    #[arg(long)]
    alpha: Option<f64>,

    /// Inclusive order grid.
    #[arg(long, value_name = "START:END:STEP")]
    alpha_grid: Option<String>,
}

impl AlphaSel {
    fn values(&self) -> Result<Vec<f64>, Error> {
        match (self.alpha, &self.alpha_grid) {
            (Some(a), None) => Ok(vec![a]),
            (None, Some(g)) => parse_grid(g),
            _ => unreachable!("the flag group admits exactly one choice"),
        }
    }

    fn echo(&self) -> Value {
        json!({ "alpha": self.alpha, "alpha_grid": self.alpha_grid })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WhichMeasure {
    /// Cumulative measure built from the distribution function.
    Fgce,
    /// Residual measure built from the survival function.
    Fgcre,
    /// Cumulative measure normalized by a power of its order-one value.
    Nfgce,
}

impl WhichMeasure {
    fn name(self) -> &'static str {
        match self {
            WhichMeasure::Fgce => "fgce",
            WhichMeasure::Fgcre => "fgcre",
            WhichMeasure::Nfgce => "nfgce",
        }
    }
}

#[derive(Args)]
struct MeasureArgs {
    /// Law spec, e.g. `uniform:l=1` or `frechet:b=1,eta=2`.
    #[arg(long)]
    dist: String,

    #[command(flatten)]
    alpha: AlphaSel,

    /// Which measure to compute.
    #[arg(long, value_enum, default_value_t = WhichMeasure::Fgce)]
    measure: WhichMeasure,

    /// Force quadrature even when a closed form exists.
    #[arg(long)]
    quad: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DynMeasure {
    /// Measure of the past life [X | X <= t].
    Past,
    /// Survival measure of the residual life [X - t | X > t].
    Residual,
    /// Normalized measure of the past life.
    Normalized,
    /// Mean inactivity time.
    Inactivity,
    /// Mean residual life.
    Mrl,
}

impl DynMeasure {
    fn name(self) -> &'static str {
        match self {
            DynMeasure::Past => "past",
            DynMeasure::Residual => "residual",
            DynMeasure::Normalized => "normalized",
            DynMeasure::Inactivity => "inactivity",
            DynMeasure::Mrl => "mrl",
        }
    }
}

/// Exactly one of a scalar inspection time or an inclusive grid.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct TimeSel {
    /// Inspection time.
    #[arg(long)]
    t: Option<f64>,

    /// Inclusive inspection-time grid.
    #[arg(long, value_name = "START:END:STEP")]
    t_grid: Option<String>,
}

impl TimeSel {
    fn values(&self) -> Result<Vec<f64>, Error> {
        match (self.t, &self.t_grid) {
            (Some(t), None) => Ok(vec![t]),
            (None, Some(g)) => parse_grid(g),
            _ => unreachable!("the flag group admits exactly one choice"),
        }
    }
}

#[derive(Args)]
struct DynamicArgs {
    /// Law spec.
    #[arg(long)]
    dist: String,

    /// Order of the measure (ignored by `inactivity` and `mrl`).
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,

    #[command(flatten)]
    time: TimeSel,

    /// Which conditioned quantity to compute.
    #[arg(long, value_enum, default_value_t = DynMeasure::Past)]
    measure: DynMeasure,
}

#[derive(Args)]
struct PrhmArgs {
    /// Base law spec.
    #[arg(long)]
    dist: String,

    /// Transform exponent applied to the distribution function (or to
    /// the survival function with `--hazard`).
    #[arg(long)]
    theta: f64,

    /// Order of the measure.
    #[arg(long)]
    alpha: f64,

    /// Raise the survival function instead and report the residual
    /// measure; the moment identity does not apply on this route.
    #[arg(long)]
    hazard: bool,

    /// Also condition on an inspection time.
    #[arg(long)]
    t: Option<f64>,

    /// Depth of the order recurrence to verify against direct
    /// evaluation at the shifted order.
    #[arg(long, value_name = "N")]
    recurrence: Option<u32>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Law spec.
    #[arg(long)]
    dist: String,

    /// Order of the measure.
    #[arg(long)]
    alpha: f64,

    /// Evaluate the bounds on the past life at this inspection time
    /// instead of the unconditioned law.
    #[arg(long)]
    t: Option<f64>,

    /// Second law; adds the check that the measure of the independent
    /// sum dominates the measure of each summand.
    #[arg(long)]
    dist2: Option<String>,
}

#[derive(Args)]
struct OrdersArgs {
    /// First law spec.
    #[arg(long)]
    dist: String,

    /// Second law spec.
    #[arg(long)]
    dist2: String,

    /// Number of grid points per predicate.
    #[arg(long, default_value_t = 400)]
    points: usize,
}

#[derive(Args)]
struct EmpiricalArgs {
    /// Data file: one number per line, `#` comments and commas allowed.
    #[arg(long, value_name = "PATH")]
    input: PathBuf,

    #[command(flatten)]
    alpha: AlphaSel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum McLaw {
    Uniform,
    Exponential,
}

impl McLaw {
    fn name(self) -> &'static str {
        match self {
            McLaw::Uniform => "uniform",
            McLaw::Exponential => "exponential",
        }
    }
}

#[derive(Args)]
struct McArgs {
    /// Sampling law (unit scale).
    #[arg(long, value_enum)]
    law: McLaw,

    /// Sample size per replication.
    #[arg(long, default_value_t = 100)]
    n: usize,

    /// Number of replications.
    #[arg(long, default_value_t = 1000)]
    reps: usize,

    /// Order of the estimator.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
}

#[derive(Args)]
struct ScanArgs {
    /// Shape grid for the first law.
    #[arg(long, value_name = "START:END:STEP")]
    b_grid: String,

    /// Shape grid for the second law.
    #[arg(long, value_name = "START:END:STEP")]
    d_grid: String,

    /// Common scale of both power laws.
    #[arg(long)]
    l: f64,

    /// Order of the measure.
    #[arg(long)]
    alpha: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Law spec.
    #[arg(long)]
    dist: String,

    /// Order of the measure.
    #[arg(long)]
    alpha: f64,
}

/// Anything that can abort a run, with its process exit code.
enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Io(_) => "io_error",
            Failure::Lib(e) => match e {
                Error::InvalidAlpha(_) => "invalid_alpha",
                Error::InvalidSupport { .. } => "invalid_support",
                Error::InvalidModel(_) => "invalid_model",
                Error::InvalidScale(_) => "invalid_scale",
                Error::DivergentIntegral => "divergent_integral",
                Error::MissingPdf => "missing_pdf",
                Error::MissingQuantile => "missing_quantile",
                Error::ZeroDenominator(_) => "zero_denominator",
                Error::ZeroMass => "zero_mass",
                Error::OutOfDomain(_) => "out_of_domain",
                Error::UnboundedSupport => "unbounded_support",
                Error::PreconditionUnmet(_) => "precondition_unmet",
                Error::EmptySample => "empty_sample",
                Error::SampleTooSmall { .. } => "sample_too_small",
                Error::NonMonotoneG => "non_monotone_g",
                Error::ParseError(_) => "parse_error",
                _ => "error",
            },
        }
    }

    /// 2 = usage, 3 = domain, 4 = numerical failure.
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 2,
            Failure::Lib(Error::ParseError(_)) => 2,
            Failure::Lib(Error::DivergentIntegral) | Failure::Lib(Error::NonMonotoneG) => 4,
            Failure::Lib(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let obj = json!({ "error": { "kind": f.kind(), "message": f.message() } });
            println!("{}", serde_json::to_string_pretty(&obj).expect("error object serializes"));
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = QuadratureConfig::default();
    let (request, results, summary) = match &cli.cmd {
        Cmd::Measure(a) => run_measure(a, &cfg)?,
        Cmd::Dynamic(a) => run_dynamic(a, &cfg)?,
        Cmd::Prhm(a) => run_prhm(a, &cfg)?,
        Cmd::Bounds(a) => run_bounds(a, &cfg)?,
        Cmd::Orders(a) => run_orders(a)?,
        Cmd::Empirical(a) => run_empirical(a)?,
        Cmd::Mc(a) => run_mc(a, cli.seed)?,
        Cmd::Scan(a) => run_scan(a)?,
        Cmd::VerifyIdentities(a) => run_verify(a, &cfg)?,
        Cmd::Catalog => run_catalog()?,
    };
    emit(cli, request, results, summary, &cfg)
}

type RunOutput = (Value, Vec<Value>, Option<Value>);

fn parse_dist(spec: &str) -> Result<CdfModel, Error> {
    spec.parse::<CatalogDistribution>()?.to_cdf_model()
}

/// Inclusive arithmetic grid `start:end:step`. The count is rounded so
/// an end point that is an exact multiple of the step is kept despite
/// floating-point remainders.
fn parse_grid(s: &str) -> Result<Vec<f64>, Error> {
    let bad = |m: String| Error::ParseError(m);
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad(format!("grid must be start:end:step, got '{s}'")));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad(format!("'{p}' is not a number"))))
        .collect::<Result<_, _>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if !start.is_finite() || !end.is_finite() {
        return Err(bad(format!("grid ends must be finite, got '{s}'")));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(bad(format!("grid step must be positive, got {step}")));
    }
    if end < start {
        return Err(bad(format!("grid end {end} is below start {start}")));
    }
    let n = ((end - start) / step + 0.5).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

fn measure_row(key: &str, x: f64, rep: &MeasureReport) -> Value {
    let mut m = Map::new();
    m.insert(key.into(), x.into());
    m.insert("value".into(), rep.value.into());
    m.insert("method".into(), serde_json::to_value(rep.method).expect("method serializes"));
    m.insert("err_estimate".into(), rep.err_estimate.into());
    Value::Object(m)
}

fn limit_row(value: Option<f64>) -> Value {
    json!({
        "alpha": 0.0,
        "value": value,
        "method": "limit",
        "finite": value.is_some(),
        "err_estimate": 0.0,
    })
}

fn run_measure(a: &MeasureArgs, cfg: &QuadratureConfig) -> Result<RunOutput, Failure> {
    let d: CatalogDistribution = a.dist.parse()?;
    let model = d.to_cdf_model()?;
    let closed = !a.quad && d.has_closed_form();
    let mut rows = Vec::new();
    for &x in &a.alpha.values()? {
        if x == 0.0 {
            if a.measure != WhichMeasure::Fgce {
                return Err(Error::OutOfDomain(
                    "the vanishing-order limit is only defined for the cdf-based measure".into(),
                )
                .into());
            }
            rows.push(match fgce_alpha0_limit(&model, cfg)? {
                Alpha0Limit::Finite(v) => limit_row(Some(v)),
                Alpha0Limit::Infinite => limit_row(None),
            });
            continue;
        }
        let alpha = AlphaParam::new(x)?;
        let rep = match a.measure {
            WhichMeasure::Fgce if closed => d.closed_form_fgce(alpha, cfg)?,
            WhichMeasure::Fgce => fgce(&model, alpha, cfg)?,
            WhichMeasure::Fgcre => fgcre(&model, alpha, cfg)?,
            WhichMeasure::Nfgce if closed => d.closed_form_nfgce(alpha, cfg)?,
            WhichMeasure::Nfgce => nfgce(&model, alpha, cfg)?,
        };
        rows.push(measure_row("alpha", x, &rep));
    }
    let mut request = a.alpha.echo();
    request["subcommand"] = "measure".into();
    request["dist"] = a.dist.clone().into();
    request["measure"] = a.measure.name().into();
    request["quad"] = a.quad.into();
    Ok((request, rows, None))
}

fn run_dynamic(a: &DynamicArgs, cfg: &QuadratureConfig) -> Result<RunOutput, Failure> {
    let model = parse_dist(&a.dist)?;
    let alpha = AlphaParam::new(a.alpha)?;
    let mut rows = Vec::new();
    for &t in &a.time.values()? {
        let row = match a.measure {
            DynMeasure::Past => measure_row("t", t, &dyn_fgce(&model, alpha, t, cfg)?),
            DynMeasure::Residual => measure_row("t", t, &dyn_fgcre(&model, alpha, t, cfg)?),
            DynMeasure::Normalized => measure_row("t", t, &dyn_nfgce(&model, alpha, t, cfg)?),
            DynMeasure::Inactivity => json!({
                "t": t,
                "value": mean_inactivity(&model, t, cfg)?,
                "method": "quadrature_x",
                "err_estimate": Value::Null,
            }),
            DynMeasure::Mrl => json!({
                "t": t,
                "value": mean_residual_life(&model, t, cfg)?,
                "method": "quadrature_x",
                "err_estimate": Value::Null,
            }),
        };
        rows.push(row);
    }
    let request = json!({
        "subcommand": "dynamic",
        "dist": a.dist,
        "alpha": a.alpha,
        "t": a.time.t,
        "t_grid": a.time.t_grid,
        "measure": a.measure.name(),
    });
    Ok((request, rows, None))
}

fn route_row(route: &str, value: f64, rep: Option<&MeasureReport>) -> Value {
    json!({
        "route": route,
        "value": value,
        "method": rep.map(|r| serde_json::to_value(r.method).expect("method serializes")),
        "err_estimate": rep.map(|r| r.err_estimate),
    })
}

fn run_prhm(a: &PrhmArgs, cfg: &QuadratureConfig) -> Result<RunOutput, Failure> {
    let base = parse_dist(&a.dist)?;
    let alpha = AlphaParam::new(a.alpha)?;
    let mut rows = Vec::new();
    if a.hazard {
        let transformed = phm_model(&base, a.theta)?;
        let rep = fgcre(&transformed, alpha, cfg)?;
        rows.push(route_row("transform", rep.value, Some(&rep)));
        if let Some(t) = a.t {
            let rep = dyn_fgcre_phm(&base, a.theta, alpha, t, cfg)?;
            rows.push(route_row("residual_at_t", rep.value, Some(&rep)));
        }
    } else {
        let direct = fgce_prhm(&base, a.theta, alpha, cfg)?;
        let moments = fgce_prhm_via_moments(&base, a.theta, alpha, cfg)?;
        rows.push(route_row("transform", direct.value, Some(&direct)));
        rows.push(route_row("moments", moments.value, Some(&moments)));
        rows.push(route_row("difference", (direct.value - moments.value).abs(), None));
        if let Some(n) = a.recurrence {
            let stepped = recurrence_n(&base, a.theta, alpha, direct.value, n, cfg)?;
            let shifted = AlphaParam::new(a.alpha + n as f64)?;
            let direct_shifted = fgce_prhm(&base, a.theta, shifted, cfg)?;
            rows.push(json!({ "route": "recurrence", "n": n, "value": stepped }));
            rows.push(json!({ "route": "direct_at_shifted_order", "n": n, "value": direct_shifted.value }));
            rows.push(json!({ "route": "recurrence_difference", "n": n, "value": (stepped - direct_shifted.value).abs() }));
        }
        if let Some(t) = a.t {
            let rep = dyn_fgce_prhm(&base, a.theta, alpha, t, cfg)?;
            rows.push(route_row("past_at_t", rep.value, Some(&rep)));
        }
    }
    let request = json!({
        "subcommand": "prhm",
        "dist": a.dist,
        "theta": a.theta,
        "alpha": a.alpha,
        "hazard": a.hazard,
        "t": a.t,
        "recurrence": a.recurrence,
    });
    Ok((request, rows, None))
}

fn bound_row(r: &BoundReport) -> Value {
    serde_json::to_value(r).expect("bound report serializes")
}

fn run_bounds(a: &BoundsArgs, cfg: &QuadratureConfig) -> Result<RunOutput, Failure> {
    let model = parse_dist(&a.dist)?;
    let alpha = AlphaParam::new(a.alpha)?;
    let mut rows = Vec::new();
    if let Some(t) = a.t {
        rows.extend(dyn_bounds_report(&model, alpha, t, cfg)?.iter().map(bound_row));
    } else {
        match bound_power_of_ce(&model, alpha, cfg) {
            Ok(pair) => rows.extend(pair.iter().map(bound_row)),
            // the power comparison needs a finite support length; the
            // remaining bounds still apply
            Err(Error::UnboundedSupport) => {
                rows.push(json!({ "name": "power_of_order_one", "error": "unbounded support" }));
            }
            Err(e) => return Err(e.into()),
        }
        rows.extend(bound_triplet(&model, alpha, cfg)?.iter().map(bound_row));
    }
    if let Some(spec2) = &a.dist2 {
        let other = parse_dist(spec2)?;
        rows.push(bound_row(&bound_sum_max(&model, &other, alpha, cfg)?));
    }
    let request = json!({
        "subcommand": "bounds",
        "dist": a.dist,
        "alpha": a.alpha,
        "t": a.t,
        "dist2": a.dist2,
    });
    Ok((request, rows, None))
}

fn verdict_row(label: &str, v: &OrderVerdict) -> Value {
    match v.witness {
        Some(w) => json!({
            "relation": label,
            "holds": v.holds,
            "witness_at": w.at,
            "lhs": w.lhs,
            "rhs": w.rhs,
        }),
        None => json!({ "relation": label, "holds": v.holds }),
    }
}

fn relation_error(label: &str, e: &Error) -> Value {
    json!({ "relation": label, "error": e.to_string() })
}

fn run_orders(a: &OrdersArgs) -> Result<RunOutput, Failure> {
    let mx = parse_dist(&a.dist)?;
    let my = parse_dist(&a.dist2)?;
    let points = a.points.max(3);
    let grid = shared_grid(&mx, &my, points);
    let u_grid: Vec<f64> = (1..=points).map(|i| i as f64 / (points + 1) as f64).collect();

    let mut rows = Vec::new();
    rows.push(verdict_row("st_xy", &order_st(&mx, &my, &grid)));
    rows.push(verdict_row("st_yx", &order_st(&my, &mx, &grid)));
    // a relation that does not apply to this pair becomes an error row
    // instead of aborting the whole report
    rows.push(match order_dispersive(&mx, &my, &u_grid) {
        Ok(v) => verdict_row("dispersive_xy", &v),
        Err(e) => relation_error("dispersive_xy", &e),
    });
    rows.push(match order_hr(&mx, &my, &grid) {
        Ok(v) => verdict_row("hr_xy", &v),
        Err(e) => relation_error("hr_xy", &e),
    });
    rows.push(json!({ "relation": "dfr_x", "holds": dfr_check(&mx, &grid) }));
    rows.push(json!({ "relation": "dfr_y", "holds": dfr_check(&my, &grid) }));

    let request = json!({
        "subcommand": "orders",
        "dist": a.dist,
        "dist2": a.dist2,
        "points": points,
    });
    Ok((request, rows, None))
}

/// One value per line; `#` starts a comment; commas and blanks also
/// separate numbers, so comma-separated rows load unchanged.
fn parse_data(text: &str) -> Result<Vec<f64>, Error> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split(|c: char| c == ',' || c.is_whitespace()) {
            if tok.is_empty() {
                continue;
            }
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::ParseError(format!("'{tok}' is not a number")))?;
            out.push(v);
        }
    }
    Ok(out)
}

fn run_empirical(a: &EmpiricalArgs) -> Result<RunOutput, Failure> {
    let text = fs::read_to_string(&a.input)
        .map_err(|e| Failure::Io(format!("cannot read '{}': {e}", a.input.display())))?;
    let sample = Sample::new(parse_data(&text)?)?;
    let mut rows = Vec::new();
    for &x in &a.alpha.values()? {
        if x == 0.0 {
            rows.push(json!({
                "alpha": 0.0,
                "value": empirical_alpha0(&sample)?,
                "method": "limit",
                "err_estimate": 0.0,
            }));
        } else {
            let rep = empirical_fgce(&sample, AlphaParam::new(x)?)?;
            rows.push(measure_row("alpha", x, &rep));
        }
    }
    let mut request = a.alpha.echo();
    request["subcommand"] = "empirical".into();
    request["input"] = a.input.display().to_string().into();
    request["n"] = sample.n().into();
    Ok((request, rows, None))
}

fn sorted_quantiles(z: &[f64], levels: &[f64]) -> Vec<f64> {
    let mut s = z.to_vec();
    s.sort_by(f64::total_cmp);
    levels
        .iter()
        .map(|&p| s[((s.len() - 1) as f64 * p).round() as usize])
        .collect()
}

fn run_mc(a: &McArgs, seed: u64) -> Result<RunOutput, Failure> {
    let alpha = AlphaParam::new(a.alpha)?;
    let (z, ks) = match a.law {
        McLaw::Exponential => clt_montecarlo(&McConfig {
            replications: a.reps,
            sample_size: a.n,
            seed,
            alpha,
        })?,
        McLaw::Uniform => {
            if a.reps < 1 {
                return Err(Error::PreconditionUnmet("need at least one replication".into()).into());
            }
            let d = CatalogDistribution::Uniform { l: 1.0 };
            let (mean, var) = uniform_sample_moments(a.n, alpha)?;
            let sd = var.sqrt();
            let mut z = Vec::with_capacity(a.reps);
            for r in 0..a.reps {
                let sample = Sample::new(d.sample(a.n, seed, r as u64)?)?;
                z.push((empirical_fgce(&sample, alpha)?.value - mean) / sd);
            }
            let ks = ks_distance_to_normal(&z);
            (z, ks)
        }
    };
    let m = z.iter().sum::<f64>() / z.len() as f64;
    let var = if z.len() > 1 {
        z.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (z.len() - 1) as f64
    } else {
        f64::NAN
    };
    let levels = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99];
    let rows = vec![json!({
        "law": a.law.name(),
        "sample_size": a.n,
        "replications": a.reps,
        "alpha": a.alpha,
        "mean": m,
        "var": var,
        "ks": ks,
        "z_quantiles": sorted_quantiles(&z, &levels),
    })];
    let request = json!({
        "subcommand": "mc",
        "law": a.law.name(),
        "n": a.n,
        "reps": a.reps,
        "alpha": a.alpha,
        "quantile_levels": levels.to_vec(),
    });
    Ok((request, rows, None))
}

fn run_scan(a: &ScanArgs) -> Result<RunOutput, Failure> {
    let alpha = AlphaParam::new(a.alpha)?;
    if !(a.l > 0.0) || !a.l.is_finite() {
        return Err(Error::InvalidScale(a.l).into());
    }
    let b_grid = parse_grid(&a.b_grid)?;
    let d_grid = parse_grid(&a.d_grid)?;
    let scan = st_counterexample_scan(&b_grid, &d_grid, a.l, alpha);
    let mut rows = Vec::with_capacity(b_grid.len() * d_grid.len());
    for (i, &b) in scan.b_grid.iter().enumerate() {
        for (j, &d) in scan.d_grid.iter().enumerate() {
            rows.push(json!({ "b": b, "d": d, "diff": scan.diff[i][j] }));
        }
    }
    let summary = json!({
        "positive_under_st": scan.positive_under_st,
        "negative_under_st": scan.negative_under_st,
    });
    let request = json!({
        "subcommand": "scan",
        "b_grid": a.b_grid,
        "d_grid": a.d_grid,
        "l": a.l,
        "alpha": a.alpha,
    });
    Ok((request, rows, Some(summary)))
}

fn identity_row(label: &str, alt: Result<MeasureReport, Error>, reference: f64) -> Value {
    match alt {
        Ok(rep) => {
            let abs_diff = (rep.value - reference).abs();
            json!({
                "identity": label,
                "lhs": rep.value,
                "rhs": reference,
                "abs_diff": abs_diff,
                "pass": abs_diff <= 1e-6 * reference.abs().max(1.0),
            })
        }
        Err(e) => json!({ "identity": label, "error": e.to_string() }),
    }
}

fn run_verify(a: &VerifyArgs, cfg: &QuadratureConfig) -> Result<RunOutput, Failure> {
    let model = parse_dist(&a.dist)?;
    let alpha = AlphaParam::new(a.alpha)?;
    let direct = fgce(&model, alpha, cfg)?.value;
    let direct_residual = fgcre(&model, alpha, cfg)?.value;
    let rows = vec![
        identity_row("fractional_integral_left", fgce_via_rl(&model, alpha, cfg), direct),
        identity_row(
            "fractional_integral_right",
            fgcre_via_rl(&model, alpha, cfg),
            direct_residual,
        ),
        identity_row("xi_expectation", fgce_via_xi_expectation(&model, alpha, cfg), direct),
        identity_row("quantile_form", fgce_quantile_form(&model, alpha, cfg), direct),
    ];
    let request = json!({
        "subcommand": "verify-identities",
        "dist": a.dist,
        "alpha": a.alpha,
    });
    Ok((request, rows, None))
}

fn run_catalog() -> Result<RunOutput, Failure> {
    let mut rows = Vec::new();
    for (name, template) in catalog_entries() {
        let d: CatalogDistribution = template.parse()?;
        rows.push(json!({
            "name": name,
            "template": template,
            "closed_form": d.has_closed_form(),
        }));
    }
    Ok((json!({ "subcommand": "catalog" }), rows, None))
}

fn emit(
    cli: &Cli,
    request: Value,
    results: Vec<Value>,
    summary: Option<Value>,
    cfg: &QuadratureConfig,
) -> Result<(), Failure> {
    let text = match cli.format {
        Format::Json => {
            let mut envelope = Map::new();
            envelope.insert("request".into(), request);
            envelope.insert("results".into(), Value::Array(results));
            if let Some(s) = summary {
                envelope.insert("summary".into(), s);
            }
            envelope.insert(
                "provenance".into(),
                json!({
                    "tool": "fgce",
                    "version": env!("CARGO_PKG_VERSION"),
                    "seed": cli.seed,
                    "abs_tol": cfg.abs_tol,
                    "rel_tol": cfg.rel_tol,
                }),
            );
            let mut s = serde_json::to_string_pretty(&Value::Object(envelope))
                .expect("envelope serializes");
            s.push('\n');
            s
        }
        Format::Csv => csv_text(&results),
    };
    match &cli.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Io(format!("cannot write '{}': {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Header row plus one line per result. Columns are the sorted union of
/// the row keys, so heterogeneous rows stay aligned; missing cells stay
/// empty. Floats carry full round-trip precision.
fn csv_text(rows: &[Value]) -> String {
    use std::collections::BTreeSet;
    let mut cols: BTreeSet<&str> = BTreeSet::new();
    for row in rows {
        if let Value::Object(m) = row {
            cols.extend(m.keys().map(String::as_str));
        }
    }
    let cols: Vec<&str> = cols.into_iter().collect();
    let mut out = cols.join(",");
    out.push('\n');
    for row in rows {
        let m = row.as_object();
        let line: Vec<String> = cols
            .iter()
            .map(|c| m.and_then(|m| m.get(*c)).map_or_else(String::new, csv_cell))
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => {
            if n.is_f64() {
                format!("{:.16e}", n.as_f64().expect("checked f64"))
            } else {
                n.to_string()
            }
        }
        Value::String(s) => {
            if s.contains(',') || s.contains('"') || s.contains('\n') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
        Value::Array(a) => a.iter().map(csv_cell).collect::<Vec<_>>().join(";"),
        Value::Object(_) => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive_despite_rounding() {
        let g = parse_grid("0:2:0.1").unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 2.0);
        assert_eq!(parse_grid("1:1:0.5").unwrap(), vec![1.0]);
        assert_eq!(parse_grid("0:1:0.3").unwrap().len(), 4);
    }

    #[test]
    fn grid_rejects_malformed_specs() {
        assert!(matches!(parse_grid("0:2"), Err(Error::ParseError(_))));
        assert!(matches!(parse_grid("0:2:x"), Err(Error::ParseError(_))));
        assert!(matches!(parse_grid("0:2:-0.1"), Err(Error::ParseError(_))));
        assert!(matches!(parse_grid("2:0:0.1"), Err(Error::ParseError(_))));
    }

    #[test]
    fn data_parser_handles_comments_and_commas() {
        let v = parse_data("1 2,3\n# all ignored\n4 # trailing\n\n5,\n").unwrap();
        assert_eq!(v, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!(matches!(parse_data("1\nbeta\n"), Err(Error::ParseError(_))));
    }

    #[test]
    fn csv_cells_round_trip_floats() {
        let cell = csv_cell(&Value::from(0.1 + 0.2));
        assert_eq!(cell.parse::<f64>().unwrap(), 0.1 + 0.2);
        assert_eq!(csv_cell(&Value::Null), "");
        assert_eq!(csv_cell(&Value::from(7u64)), "7");
        assert_eq!(csv_cell(&json!([1.0, 2.0])).matches(';').count(), 1);
    }

    #[test]
    fn heterogeneous_rows_share_the_column_union() {
        let rows = vec![json!({ "a": 1.0, "b": 2.0 }), json!({ "a": 3.0, "c": true })];
        let text = csv_text(&rows);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "a,b,c");
        assert!(lines.next().unwrap().ends_with(','));
        assert!(lines.next().unwrap().ends_with("true"));
    }
}
