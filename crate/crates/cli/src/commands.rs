use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use adiabatic_core::criteria::{self, numeric, ConditionReport};
use adiabatic_core::integrators::{default_dt, evolve, make_schedule, pulse_sequence_evolve};
use adiabatic_core::sweep::{self, linspace, logspace, GridSpec, Quantity, SweepTable, DEFAULT_OMEGA1};
use adiabatic_core::validation::run_validation;
use adiabatic_core::{fidelity_trace_closed, CoreError};
use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use crate::output::{self, json_float, Format, CONDITIONS_SCHEMA};
use crate::params::{resolve, FieldArgs};

/// Exit status 2 for bad invocations, 1 for everything that fails after the
/// inputs were accepted.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Usage(_) => ExitCode::from(2),
            Failure::Runtime(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParams(_)
            | CoreError::InvalidSweep(_)
            | CoreError::InvalidGrid(_)
            | CoreError::InvalidSchedule(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.into()),
        }
    }
}

type CmdResult = Result<(), Failure>;

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceMethod {
    /// Closed-form fidelity
    Closed,
    /// Midpoint exponential stepping
    Integrator,
    /// Discrete 72-pulse-per-cycle sequence, sampled once per cycle
    Pulse,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Number of rf revolutions (default 15)
    #[arg(long, conflicts_with = "t_end")]
    pub cycles: Option<usize>,
    /// End time, seconds
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Sample count for closed and integrator traces
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
    /// Integrator step, seconds (default: 1/200 of the fastest period)
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_enum, default_value_t = TraceMethod::Closed)]
    pub method: TraceMethod,
    #[command(flatten)]
    pub output: OutputArgs,
}

const DEFAULT_CYCLES: usize = 15;

pub fn trace(a: &TraceArgs) -> CmdResult {
    let resolved = resolve(&a.field).map_err(Failure::Usage)?;
    for w in &resolved.overridden {
        eprintln!("warning: ignoring {w}");
    }
    let p = resolved.params;
    if let Some(t) = a.t_end {
        if !(t.is_finite() && t > 0.0) {
            return Err(Failure::Usage(format!("--t-end must be positive, got {t}")));
        }
    }

    let (trace, provenance) = match a.method {
        TraceMethod::Pulse => {
            let mut sched = make_schedule(&p, 0)?;
            sched.n_cycles = match a.t_end {
                Some(t) => (t / sched.tau + 1e-9).floor() as usize,
                None => a.cycles.unwrap_or(DEFAULT_CYCLES),
            };
            let res = pulse_sequence_evolve(&p, &sched)?;
            let prov = json!({
                "method": res.method.as_str(),
                "delta_t": sched.delta_t,
                "tau": sched.tau,
                "pulses_per_cycle": sched.pulses_per_cycle,
                "cycles": sched.n_cycles,
            });
            (res.trace, prov)
        }
        TraceMethod::Closed | TraceMethod::Integrator => {
            if a.samples < 2 {
                return Err(Failure::Usage("--samples must be at least 2".into()));
            }
            let t_end = a
                .t_end
                .unwrap_or(a.cycles.unwrap_or(DEFAULT_CYCLES) as f64 * p.default_horizon());
            if t_end <= 0.0 {
                return Err(Failure::Usage("trace length must be positive".into()));
            }
            let times = linspace(0.0, t_end, a.samples);
            if a.method == TraceMethod::Closed {
                let tr = fidelity_trace_closed(&p, &times)?;
                let prov = json!({ "method": tr.method().as_str() });
                (tr, prov)
            } else {
                let dt = a.dt.unwrap_or_else(|| default_dt(&p, Some(times[1] - times[0])));
                let res = evolve(&p, t_end, dt, &times)?;
                if res.coarse_step {
                    eprintln!("warning: step {dt:e} s is at least a tenth of the fastest period");
                }
                let prov = json!({ "method": res.method.as_str(), "dt": dt, "steps": res.step_count });
                (res.trace, prov)
            }
        }
    };

    let mut w = output::sink(a.output.out.as_deref())?;
    output::write_trace(&mut *w, a.output.format, &trace, output::params_json(&p), provenance)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Spacing {
    Lin,
    Log,
}

/// `a:b:n` with an optional `:lin` or `:log` suffix.
fn parse_range(flag: &str, s: &str, default: Spacing) -> Result<Vec<f64>, Failure> {
    let bad = |why: &str| Failure::Usage(format!("{flag} '{s}': {why} (expected a:b:n[:lin|:log])"));
    let parts: Vec<&str> = s.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(bad("wrong number of fields"));
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad("bad start"))?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad("bad end"))?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad("bad count"))?;
    let spacing = match parts.get(3).map(|x| x.trim()) {
        None => default,
        Some("lin") => Spacing::Lin,
        Some("log") => Spacing::Log,
        Some(_) => return Err(bad("spacing must be lin or log")),
    };
    if !(a.is_finite() && b.is_finite()) {
        return Err(bad("bounds must be finite"));
    }
    if n == 0 {
        return Err(bad("count must be positive"));
    }
    if n > 1 && b <= a {
        return Err(bad("end must exceed start"));
    }
    Ok(match spacing {
        Spacing::Lin => linspace(a, b, n),
        Spacing::Log => {
            if a <= 0.0 {
                return Err(bad("log spacing needs positive bounds"));
            }
            logspace(a, b, n)
        }
    })
}

fn parse_list(flag: &str, s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("{flag}: '{x}' is not a number")))
        })
        .collect()
}

fn axis(
    flag_range: &str,
    range: Option<&str>,
    flag_list: &str,
    list: Option<&str>,
    default: &str,
    spacing: Spacing,
) -> Result<Vec<f64>, Failure> {
    match (range, list) {
        (_, Some(l)) => parse_list(flag_list, l),
        (Some(r), None) => parse_range(flag_range, r, spacing),
        (None, None) => parse_range(flag_range, default, spacing),
    }
}

fn parse_quantities(s: &str) -> Result<Vec<Quantity>, Failure> {
    s.split(',')
        .map(|q| q.parse::<Quantity>().map_err(Failure::from))
        .collect()
}

const DEFAULT_K_RANGE: &str = "0.1:30:200";
const DEFAULT_R_RANGE: &str = "0.01:0.5:200";

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// K grid as a:b:n, log-spaced unless suffixed with :lin
    #[arg(long, conflicts_with = "k_values")]
    pub k_range: Option<String>,
    /// Comma-separated K values
    #[arg(long)]
    pub k_values: Option<String>,
    /// R grid as a:b:n, linear unless suffixed with :log
    #[arg(long, conflicts_with = "r_values")]
    pub r_range: Option<String>,
    /// Comma-separated R values
    #[arg(long)]
    pub r_values: Option<String>,
    /// rf strength held fixed across the grid, Hz
    #[arg(long, default_value_t = DEFAULT_OMEGA1)]
    pub omega1: f64,
    /// Comma-separated subset of c1,f_min,t_min,tong_b,wu_c3
    #[arg(long, default_value = "c1,f_min,t_min,tong_b,wu_c3")]
    pub quantities: String,
    /// Worker threads (results do not depend on it)
    #[arg(long, env = "ADIABATIC_PROBE_JOBS")]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn check_jobs(jobs: Option<usize>) -> Result<(), Failure> {
    if jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    Ok(())
}

fn emit_table(table: &SweepTable, g: &GridSpec, out: &OutputArgs) -> CmdResult {
    let names: Vec<String> = g.quantities.iter().map(|q| q.name().to_string()).collect();
    let mut w = output::sink(out.out.as_deref())?;
    output::write_table(&mut *w, out.format, table, &g.k_values, &g.r_values, &names)?;
    Ok(())
}

pub fn sweep(a: &SweepArgs) -> CmdResult {
    check_jobs(a.jobs)?;
    let ks = axis(
        "--k-range",
        a.k_range.as_deref(),
        "--k-values",
        a.k_values.as_deref(),
        DEFAULT_K_RANGE,
        Spacing::Log,
    )?;
    let rs = axis(
        "--r-range",
        a.r_range.as_deref(),
        "--r-values",
        a.r_values.as_deref(),
        DEFAULT_R_RANGE,
        Spacing::Lin,
    )?;
    let g = GridSpec::new(ks, rs, a.omega1, &parse_quantities(&a.quantities)?)?;
    let table = sweep::surface_sweep(&g, a.jobs)?;
    emit_table(&table, &g, &a.output)
}

#[derive(Debug, Clone, Args)]
pub struct SliceArgs {
    /// Fixed K (slice along R)
    #[arg(long, conflicts_with = "r")]
    pub k: Option<f64>,
    /// Fixed R (slice along K)
    #[arg(long)]
    pub r: Option<f64>,
    /// Swept axis as a:b:n, linear unless suffixed with :log
    #[arg(long)]
    pub range: String,
    #[arg(long, default_value_t = DEFAULT_OMEGA1)]
    pub omega1: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// `f_min` and `t_min` along one axis.
pub fn slice(a: &SliceArgs) -> CmdResult {
    let values = parse_range("--range", &a.range, Spacing::Lin)?;
    let (table, ks, rs) = match (a.k, a.r) {
        (None, Some(r)) => (sweep::slice_vs_k(r, &values, a.omega1)?, values, vec![r]),
        (Some(k), None) => (sweep::slice_vs_r(k, &values, a.omega1)?, vec![k], values),
        _ => return Err(Failure::Usage("give exactly one of --k or --r".into())),
    };
    let g = GridSpec::new(ks, rs, a.omega1, &[Quantity::FMin, Quantity::TMin])?;
    emit_table(&table, &g, &a.output)
}

#[derive(Debug, Clone, Args)]
pub struct ConditionsArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Integration horizon for the integral conditions, seconds (default 1/omega')
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Evaluate by finite differences and quadrature instead of closed forms
    #[arg(long)]
    pub numeric: bool,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn report_json(r: &ConditionReport) -> anyhow::Result<Value> {
    Ok(json!({
        "c1": json_float(r.c1)?,
        "tong_a": json_float(r.tong_a)?,
        "tong_b": json_float(r.tong_b)?,
        "tong_c": json_float(r.tong_c)?,
        "wu_c3": json_float(r.wu_c3)?,
        "wu_denominator": json_float(r.wu_denominator)?,
        "resonant": r.resonant,
        "horizon": json_float(r.horizon)?,
    }))
}

pub fn conditions(a: &ConditionsArgs) -> CmdResult {
    let resolved = resolve(&a.field).map_err(Failure::Usage)?;
    for w in &resolved.overridden {
        eprintln!("warning: ignoring {w}");
    }
    let p = resolved.params;
    let (report, method) = if a.numeric {
        (numeric::numeric_report(&p, a.horizon)?, "finite-difference")
    } else {
        (criteria::full_report(&p, a.horizon)?, "closed-form")
    };
    let mut w = output::sink(a.out.as_deref())?;
    output::write_record(
        &mut *w,
        CONDITIONS_SCHEMA,
        output::params_json(&p),
        json!({ "method": method }),
        vec![report_json(&report)?],
    )?;
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Smaller point sets and sample counts
    #[arg(long)]
    pub quick: bool,
}

pub fn validate(a: &ValidateArgs) -> CmdResult {
    let checks = run_validation(a.quick);
    let mut failed = Vec::new();
    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag}  {}  observed={:.3e}  tolerance={:.1e}",
            c.name, c.observed, c.tolerance
        );
        if !c.passed {
            failed.push(c.name.clone());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(anyhow::anyhow!(
            "{} check(s) failed: {}",
            failed.len(),
            failed.join("; ")
        )))
    }
}
