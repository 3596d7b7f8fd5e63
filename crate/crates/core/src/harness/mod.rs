//! Experiment runner: TOML configs in, CSV artifacts out.
//!
//! A config file holds one or more `[[experiment]]` sections. For every
//! (method, h) pair the runner integrates the problem, writes a trace CSV,
//! collects a summary row (timings are the median of `timing_reps`
//! repetitions), and, when a reference is configured, a global error and an
//! order table. All numeric output is printed with 17 significant digits;
//! repeated runs are byte-identical except for the wall-clock columns.

mod csv;
pub mod presets;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::diagnostics::{
    global_error, lemma_definiteness, observed_order, symmetry_residual,
};
use crate::error::{Error, Result};
use crate::integrators::{
    generate_starting_values, integrate, ChannelRequest, IntegrateOptions, Method, RunResult,
    StartMethod, Trajectory,
};
use crate::matfun::exp_and_phi;
use crate::polarization::{validate_polarization, PolarizedPotential};
use crate::problems::{
    fpu_initial, fpu_system, pendulum_initial, pendulum_original_energy, pendulum_truncated,
    wind_initial, wind_oscillator, FpuParams, WindOscillatorParams,
};

pub use csv::fmt_float;

/// Environment variable overriding the output root directory.
pub const OUTPUT_ROOT_ENV: &str = "LIEEP_OUTPUT_ROOT";

#[derive(Debug, Clone)]
pub enum ProblemSpec {
    Wind(WindOscillatorParams<f64>),
    Fpu(FpuParams<f64>),
    Pendulum,
}

impl ProblemSpec {
    pub fn label(&self) -> &'static str {
        match self {
            ProblemSpec::Wind(_) => "wind",
            ProblemSpec::Fpu(_) => "fpu",
            ProblemSpec::Pendulum => "pendulum",
        }
    }
}

/// A built problem: system, polarization, initial state and the quadrature
/// order that makes the EAVF average exact for the potential degree.
pub struct BuiltProblem {
    pub sys: crate::System64,
    pub pot: crate::Potential64,
    pub y0: Vec<f64>,
    pub gl_points: usize,
}

impl ProblemSpec {
    pub fn build(&self) -> Result<BuiltProblem> {
        match self {
            ProblemSpec::Wind(params) => {
                let (sys, pot, _) = wind_oscillator(*params)?;
                Ok(BuiltProblem {
                    sys,
                    pot,
                    y0: wind_initial(),
                    gl_points: 2,
                })
            }
            ProblemSpec::Fpu(params) => {
                let (sys, pot) = fpu_system(*params)?;
                Ok(BuiltProblem {
                    sys,
                    pot,
                    y0: fpu_initial(0.1, params.n),
                    gl_points: 2,
                })
            }
            ProblemSpec::Pendulum => {
                let (sys, pot) = pendulum_truncated();
                Ok(BuiltProblem {
                    sys,
                    pot,
                    y0: pendulum_initial(),
                    gl_points: 3,
                })
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub problem: ProblemSpec,
    pub methods: Vec<Method>,
    pub h: Vec<f64>,
    pub t_end: f64,
    pub channels: Vec<String>,
    pub seed: u64,
    /// Reference solver substep factor; 0 disables global-error/order output.
    pub reference_substeps: usize,
    /// Row stride for trace files; 0 disables traces.
    pub trace_stride: usize,
    pub timing_reps: usize,
    pub validation_trials: usize,
    /// Corrupt the polarized gradient before validation (debug).
    pub inject_gradient_fault: bool,
}

#[derive(Debug, Deserialize)]
struct ConfigFile {
    #[serde(default)]
    experiment: Vec<RawExperiment>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    name: String,
    problem: String,
    #[serde(default)]
    method: Option<String>,
    #[serde(default)]
    methods: Option<Vec<String>>,
    h: Vec<f64>,
    t_end: f64,
    #[serde(default)]
    channels: Vec<String>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    reference_substeps: Option<usize>,
    #[serde(default)]
    trace_stride: Option<usize>,
    #[serde(default)]
    timing_reps: Option<usize>,
    #[serde(default)]
    validation_trials: Option<usize>,
    #[serde(default)]
    inject_gradient_fault: Option<bool>,
    #[serde(default)]
    params: Option<toml::Table>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Accepts a float, or "pi/k" optionally followed by "- x" / "+ x".
fn parse_angle(value: &toml::Value) -> Result<f64> {
    match value {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        toml::Value::String(s) => {
            let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
            let (pi_part, rest) = if let Some(r) = compact.strip_prefix("pi") {
                (std::f64::consts::PI, r)
            } else {
                return compact
                    .parse::<f64>()
                    .map_err(|_| config_err(format!("cannot parse angle '{s}'")));
            };
            let mut angle = pi_part;
            let mut rest = rest;
            if let Some(r) = rest.strip_prefix('/') {
                let end = r
                    .find(['+', '-'])
                    .unwrap_or(r.len());
                let div: f64 = r[..end]
                    .parse()
                    .map_err(|_| config_err(format!("cannot parse angle '{s}'")))?;
                angle /= div;
                rest = &r[end..];
            }
            if !rest.is_empty() {
                let shift: f64 = rest
                    .parse()
                    .map_err(|_| config_err(format!("cannot parse angle '{s}'")))?;
                angle += shift;
            }
            Ok(angle)
        }
        _ => Err(config_err("angle must be a number or string")),
    }
}

fn param_f64(table: &toml::Table, key: &str, default: f64) -> Result<f64> {
    match table.get(key) {
        None => Ok(default),
        Some(toml::Value::Float(f)) => Ok(*f),
        Some(toml::Value::Integer(i)) => Ok(*i as f64),
        Some(_) => Err(config_err(format!("parameter '{key}' must be numeric"))),
    }
}

fn param_usize(table: &toml::Table, key: &str, default: usize) -> Result<usize> {
    match table.get(key) {
        None => Ok(default),
        Some(toml::Value::Integer(i)) if *i > 0 => Ok(*i as usize),
        Some(_) => Err(config_err(format!(
            "parameter '{key}' must be a positive integer"
        ))),
    }
}

const KNOWN_CHANNELS: &[&str] = &[
    "polarized_energy",
    "discrete_energy",
    "step_residual",
    "fixed_point_iters",
    "original_energy",
];

fn parse_experiment(raw: RawExperiment) -> Result<ExperimentConfig> {
    let methods: Vec<Method> = match (&raw.method, &raw.methods) {
        (Some(_), Some(_)) => {
            return Err(config_err("give either 'method' or 'methods', not both"))
        }
        (Some(m), None) => vec![parse_method(m)?],
        (None, Some(ms)) => ms
            .iter()
            .map(|m| parse_method(m))
            .collect::<Result<Vec<_>>>()?,
        (None, None) => return Err(config_err("missing 'method' or 'methods'")),
    };
    if raw.h.is_empty() {
        return Err(config_err("empty h list"));
    }
    if raw.h.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
        return Err(config_err("all h must be positive and finite"));
    }
    if !(raw.t_end > 0.0) {
        return Err(config_err("t_end must be positive"));
    }
    for c in &raw.channels {
        if !KNOWN_CHANNELS.contains(&c.as_str()) {
            return Err(config_err(format!("unknown channel '{c}'")));
        }
    }
    let empty = toml::Table::new();
    let params = raw.params.as_ref().unwrap_or(&empty);
    let problem = match raw.problem.as_str() {
        "wind" => {
            let theta = match params.get("theta") {
                Some(v) => parse_angle(v)?,
                None => std::f64::consts::FRAC_PI_2,
            };
            ProblemSpec::Wind(WindOscillatorParams {
                r: param_f64(params, "r", 20.0)?,
                theta,
                a: param_f64(params, "a", 0.5)?,
            })
        }
        "fpu" => {
            let n = param_usize(params, "n", 128)?;
            ProblemSpec::Fpu(FpuParams {
                n,
                l: param_f64(params, "l", n as f64)?,
                beta: param_f64(params, "beta", 0.0)?,
                gamma: param_f64(params, "gamma", 0.0)?,
                m: param_f64(params, "m", 0.0)?,
                eps: param_f64(params, "eps", 0.75)?,
            })
        }
        "pendulum" => ProblemSpec::Pendulum,
        other => return Err(config_err(format!("unknown problem '{other}'"))),
    };
    if raw.channels.iter().any(|c| c == "original_energy")
        && !matches!(problem, ProblemSpec::Pendulum)
    {
        return Err(config_err(
            "'original_energy' is only defined for the pendulum problem",
        ));
    }
    Ok(ExperimentConfig {
        name: raw.name,
        problem,
        methods,
        h: raw.h,
        t_end: raw.t_end,
        channels: raw.channels,
        seed: raw.seed.unwrap_or(0),
        reference_substeps: raw.reference_substeps.unwrap_or(0),
        trace_stride: raw.trace_stride.unwrap_or(1),
        timing_reps: raw.timing_reps.unwrap_or(1).max(1),
        validation_trials: raw.validation_trials.unwrap_or(1000).max(1),
        inject_gradient_fault: raw.inject_gradient_fault.unwrap_or(false),
    })
}

fn parse_method(name: &str) -> Result<Method> {
    match name {
        "lieep" => Ok(Method::Lieep),
        "eavf" => Ok(Method::Eavf),
        "crk6" => Ok(Method::Crk6),
        other => Err(config_err(format!("unknown method '{other}'"))),
    }
}

pub fn parse_config(text: &str) -> Result<Vec<ExperimentConfig>> {
    let file: ConfigFile =
        toml::from_str(text).map_err(|e| config_err(format!("toml parse error: {e}")))?;
    if file.experiment.is_empty() {
        return Err(config_err("no [[experiment]] sections"));
    }
    file.experiment.into_iter().map(parse_experiment).collect()
}

pub fn load_config(path: &Path) -> Result<Vec<ExperimentConfig>> {
    parse_config(&std::fs::read_to_string(path)?)
}

fn channel_request(cfg: &ExperimentConfig, method: Method) -> ChannelRequest {
    let has = |n: &str| cfg.channels.iter().any(|c| c == n);
    ChannelRequest {
        polarized_energy: has("polarized_energy") && method == Method::Lieep,
        discrete_energy: has("discrete_energy"),
        step_residual: has("step_residual") && method == Method::Lieep,
        iterations: has("fixed_point_iters") && method != Method::Lieep,
    }
}

/// One summary row of a run.
pub struct SummaryRow {
    pub method: Method,
    pub h: f64,
    pub global_error: Option<f64>,
    pub wall_clock_total: Duration,
    pub wall_clock_stepping: Duration,
    pub fixed_point_iters_mean: Option<f64>,
    pub error: Option<String>,
}

/// Files written plus failure count.
pub struct RunManifest {
    pub files: Vec<PathBuf>,
    pub integration_failures: usize,
    pub summary: Vec<SummaryRow>,
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

fn run_once(
    built: &BuiltProblem,
    cfg: &ExperimentConfig,
    method: Method,
    h: f64,
) -> Result<RunResult<f64>> {
    let mut opts = IntegrateOptions::new(method, h, cfg.t_end);
    opts.channels = channel_request(cfg, method);
    opts.gl_points = built.gl_points;
    integrate(
        &built.sys,
        Some(&built.pot),
        &built.y0,
        &opts,
    )
}

fn reference_trajectory(
    built: &BuiltProblem,
    cfg: &ExperimentConfig,
    h: f64,
) -> Result<Trajectory<f64>> {
    let substeps = cfg.reference_substeps;
    let mut opts = IntegrateOptions::new(Method::Crk6, h / substeps as f64, cfg.t_end);
    opts.record_every = substeps;
    let run = integrate(&built.sys, None, &built.y0, &opts)?;
    if let Some(f) = run.failure {
        return Err(f.error);
    }
    Ok(run.trajectory)
}

/// Execute one experiment, writing its artifacts under `out_root/<name>/`.
pub fn run(cfg: &ExperimentConfig, out_root: &Path) -> Result<RunManifest> {
    let built = cfg.problem.build()?;
    let dir = out_root.join(&cfg.name);
    std::fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    let mut failures = 0usize;
    let mut summary: Vec<SummaryRow> = Vec::new();
    // (method, h, err) triples feeding order.csv
    let mut errors_by_method: BTreeMap<&'static str, Vec<(f64, f64)>> = BTreeMap::new();

    for &h in &cfg.h {
        let reference = if cfg.reference_substeps > 0 {
            Some(reference_trajectory(&built, cfg, h))
        } else {
            None
        };
        for &method in &cfg.methods {
            let mut stepping_times = Vec::with_capacity(cfg.timing_reps);
            let mut total_times = Vec::with_capacity(cfg.timing_reps);
            let mut first: Option<RunResult<f64>> = None;
            let mut run_error: Option<String> = None;
            for rep in 0..cfg.timing_reps {
                match run_once(&built, cfg, method, h) {
                    Ok(r) => {
                        if let Some(f) = &r.failure {
                            run_error = Some(f.error.kind().to_string());
                            failures += 1;
                            stepping_times.push(r.stepping_time);
                            total_times.push(r.setup_time + r.stepping_time);
                            first.get_or_insert(r);
                            break;
                        }
                        stepping_times.push(r.stepping_time);
                        total_times.push(r.setup_time + r.stepping_time);
                        if rep == 0 {
                            first = Some(r);
                        }
                    }
                    Err(e) => {
                        run_error = Some(e.kind().to_string());
                        failures += 1;
                        break;
                    }
                }
            }
            let mut global_err = None;
            if let Some(first_run) = &first {
                if cfg.trace_stride > 0 {
                    let mut traj = first_run.trajectory.clone();
                    if matches!(cfg.problem, ProblemSpec::Pendulum)
                        && cfg.channels.iter().any(|c| c == "original_energy")
                    {
                        traj.add_state_channel("original_energy", pendulum_original_energy);
                    }
                    let path = dir.join(format!("trace_{}_{}.csv", method.name(), fmt_h(h)));
                    csv::write_trace(&path, &traj, &cfg.channels, cfg.trace_stride)?;
                    files.push(path);
                }
                if run_error.is_none() {
                    match &reference {
                        Some(Ok(reference)) => {
                            match global_error(&first_run.trajectory, reference) {
                                Ok(e) => {
                                    global_err = Some(e);
                                    errors_by_method
                                        .entry(method.name())
                                        .or_default()
                                        .push((h, e));
                                }
                                Err(e) => run_error = Some(e.kind().to_string()),
                            }
                        }
                        Some(Err(e)) => {
                            run_error = Some(format!("reference_{}", e.kind()));
                        }
                        None => {}
                    }
                }
            }
            let wall_clock_total = if total_times.is_empty() {
                Duration::ZERO
            } else {
                median(total_times)
            };
            let wall_clock_stepping = if stepping_times.is_empty() {
                Duration::ZERO
            } else {
                median(stepping_times)
            };
            summary.push(SummaryRow {
                method,
                h,
                global_error: global_err,
                wall_clock_total,
                wall_clock_stepping,
                fixed_point_iters_mean: first.as_ref().and_then(|r| r.mean_iterations),
                error: run_error,
            });
        }
    }

    // summary.csv
    let path = dir.join("summary.csv");
    let mut w = csv::CsvWriter::create(&path)?;
    w.row([
        "method",
        "h",
        "global_error",
        "wall_clock_total",
        "wall_clock_stepping",
        "fixed_point_iters_mean",
        "error",
    ])?;
    for row in &summary {
        w.row([
            row.method.name().to_string(),
            fmt_float(row.h),
            row.global_error.map(fmt_float).unwrap_or_default(),
            format!("{:.6e}", row.wall_clock_total.as_secs_f64()),
            format!("{:.6e}", row.wall_clock_stepping.as_secs_f64()),
            row.fixed_point_iters_mean
                .map(|m| format!("{m:.3}"))
                .unwrap_or_default(),
            row.error.clone().unwrap_or_default(),
        ])?;
    }
    w.finish()?;
    files.push(path);

    // order.csv
    if cfg.reference_substeps > 0 {
        let path = dir.join("order.csv");
        let mut w = csv::CsvWriter::create(&path)?;
        w.row(["method", "h", "global_error", "pairwise_slope", "ls_slope"])?;
        for (method, pts) in &errors_by_method {
            if pts.len() < 2 {
                continue;
            }
            let hs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let errs: Vec<f64> = pts.iter().map(|p| p.1).collect();
            if let Ok(est) = observed_order(&hs, &errs) {
                for (i, (&h, &e)) in hs.iter().zip(&errs).enumerate() {
                    w.row([
                        method.to_string(),
                        fmt_float(h),
                        fmt_float(e),
                        if i > 0 {
                            fmt_float(est.pairwise[i - 1])
                        } else {
                            String::new()
                        },
                        fmt_float(est.slope),
                    ])?;
                }
            }
        }
        w.finish()?;
        files.push(path);
    }

    Ok(RunManifest {
        files,
        integration_failures: failures,
        summary,
    })
}

fn fmt_h(h: f64) -> String {
    // compact, filename-safe step size tag
    let s = format!("{h}");
    s.replace('.', "p").replace('-', "m")
}

/// One validation row.
pub struct ValidationRow {
    pub problem: String,
    pub check: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub struct ValidationOutcome {
    pub rows: Vec<ValidationRow>,
    pub file: PathBuf,
}

impl ValidationOutcome {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Run the structural checks for an experiment's problem and write
/// validation.csv: polarization identities, the definiteness lemma, the
/// scheme symmetry residual and the matrix-function identity.
pub fn validate(cfg: &ExperimentConfig, out_root: &Path) -> Result<ValidationOutcome> {
    let built = cfg.problem.build()?;
    let dir = out_root.join(&cfg.name);
    std::fs::create_dir_all(&dir)?;
    let problem = cfg.problem.label().to_string();
    let mut rows: Vec<ValidationRow> = Vec::new();

    let corrupted_pot;
    let pot: &PolarizedPotential<f64> = if cfg.inject_gradient_fault {
        let fresh = cfg.problem.build()?;
        corrupted_pot = fresh.pot.corrupted(1e-3);
        &corrupted_pot
    } else {
        &built.pot
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let u = |x: &[f64]| built.sys.potential(x);
    let gu = |x: &[f64]| built.sys.grad_potential(x);
    let report = validate_polarization(pot, &u, &gu, cfg.validation_trials, &mut rng);
    for c in &report.checks {
        rows.push(ValidationRow {
            problem: problem.clone(),
            check: format!("polarization_{}", c.name),
            residual: c.max_residual,
            tolerance: c.tolerance,
            pass: c.pass,
        });
    }

    let h = cfg.h.first().copied().unwrap_or(0.1);
    let p = built.pot.window();
    let lemma = lemma_definiteness(built.sys.j(), built.sys.m(), p, h)?;
    match built.sys.j_class() {
        crate::integrators::StructureClass::SkewSymmetric => rows.push(ValidationRow {
            problem: problem.clone(),
            check: "lemma_norm_b".into(),
            residual: lemma.norm_b,
            tolerance: 1e-11,
            pass: lemma.norm_b <= 1e-11,
        }),
        crate::integrators::StructureClass::NegativeSemidefinite => rows.push(ValidationRow {
            problem: problem.clone(),
            check: "lemma_max_eigenvalue".into(),
            residual: lemma.max_eigenvalue,
            tolerance: 1e-11,
            pass: lemma.max_eigenvalue <= 1e-11,
        }),
    }

    let window = generate_starting_values(&built.sys, &built.y0, h, p, StartMethod::Crk6Substeps)?;
    let sym = symmetry_residual(&built.sys, &built.pot, &window, h)?;
    rows.push(ValidationRow {
        problem: problem.clone(),
        check: "symmetry_residual".into(),
        residual: sym,
        tolerance: 1e-10,
        pass: sym <= 1e-10,
    });

    let pair = exp_and_phi(built.sys.j(), built.sys.m(), p as f64 * h)?;
    let resid = pair.identity_residual(built.sys.j(), built.sys.m());
    rows.push(ValidationRow {
        problem: problem.clone(),
        check: "matrix_function_identity".into(),
        residual: resid,
        tolerance: 1e-12,
        pass: resid <= 1e-12,
    });

    if let ProblemSpec::Wind(params) = &cfg.problem {
        let (sys, _, cf) = wind_oscillator(*params)?;
        let scale = 2.0 * h;
        let direct = crate::matfun::expm(&sys.j().mul(sys.m()).scale(scale))?;
        let resid = direct.max_abs_diff(&cf.eval(scale));
        rows.push(ValidationRow {
            problem: problem.clone(),
            check: "closed_form_exp".into(),
            residual: resid,
            tolerance: 1e-12,
            pass: resid <= 1e-12,
        });
    }

    let path = dir.join("validation.csv");
    let mut w = csv::CsvWriter::create(&path)?;
    w.row(["problem", "check", "residual", "tolerance", "pass"])?;
    for r in &rows {
        w.row([
            r.problem.clone(),
            r.check.clone(),
            fmt_float(r.residual),
            fmt_float(r.tolerance),
            if r.pass { "pass".into() } else { "FAIL".to_string() },
        ])?;
    }
    w.finish()?;
    Ok(ValidationOutcome { rows, file: path })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_all_parse() {
        for (name, text) in presets::PRESETS {
            let cfgs = parse_config(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!cfgs.is_empty());
        }
    }

    #[test]
    fn angle_forms() {
        let v = toml::Value::String("pi/2".into());
        assert!((parse_angle(&v).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let v = toml::Value::String("pi/2 - 1e-4".into());
        assert!(
            (parse_angle(&v).unwrap() - (std::f64::consts::FRAC_PI_2 - 1e-4)).abs() < 1e-15
        );
        let v = toml::Value::Float(0.25);
        assert_eq!(parse_angle(&v).unwrap(), 0.25);
    }

    #[test]
    fn empty_h_rejected() {
        let text = r#"
[[experiment]]
name = "x"
problem = "pendulum"
methods = ["lieep"]
h = []
t_end = 1.0
"#;
        assert!(matches!(parse_config(text), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_channel_rejected() {
        let text = r#"
[[experiment]]
name = "x"
problem = "pendulum"
methods = ["lieep"]
h = [0.5]
t_end = 1.0
channels = ["no_such_channel"]
"#;
        assert!(matches!(parse_config(text), Err(Error::Config(_))));
    }
}
