//! Command-line front end: `certify`, `simulate`, `verify-iss`,
//! `cross-validate` and `sweep`.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 infeasible
//! certificate or failed verification, 4 violated hypothesis, 5 solver
//! failure, 6 I/O error. Errors are reported on stderr as
//! `error[category]: message`.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::certificates::{certify_diagonal, certify_reactor, feasibility_search, optimal_delta, BiboCertificate};
use crate::config::{ConfigError, Model, ScenarioConfig};
use crate::error::Error;
use crate::fd::HeatFd;
use crate::funnel::closed_loop_simulate;
use crate::heat_iss::verify_iss;
use crate::scenarios::cross_validate;
use crate::spectral::{ReactorSpectrum, RieszSpectralOperator};
use crate::trace::{fmt_float, Series, SvgPlot, Table};

/// Environment variable naming the default output root.
pub const OUTPUT_ENV: &str = "BIBO_FUNNEL_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Config,
    Infeasible,
    Hypothesis,
    Solver,
    Io,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Config => 2,
            Category::Infeasible => 3,
            Category::Hypothesis => 4,
            Category::Solver => 5,
            Category::Io => 6,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Category::Config => "config",
            Category::Infeasible => "infeasible",
            Category::Hypothesis => "hypothesis",
            Category::Solver => "solver",
            Category::Io => "io",
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub category: Category,
    pub message: String,
}

impl Failure {
    fn new(category: Category, message: impl Into<String>) -> Self {
        Self {
            category,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.category.label(), self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let category = match e {
            Error::InvalidParameter { .. }
            | Error::NegativeTime(_)
            | Error::ExponentOutOfRange(_)
            | Error::PositionOutOfRange(_)
            | Error::DimensionMismatch { .. }
            | Error::InsufficientData { .. } => Category::Config,
            Error::Margin(_) => Category::Infeasible,
            Error::Hypothesis(_) | Error::Regularity(_) => Category::Hypothesis,
            _ => Category::Solver,
        };
        Failure::new(category, e.to_string())
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::new(Category::Config, e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "bibo-funnel", version, about = "BIBO certificates, funnel control and ISS checks for semilinear boundary-control systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Scenario file (TOML); defaults describe the reactor benchmark.
    #[arg(long)]
    config: Option<PathBuf>,
    /// reactor, heat or custom-diagonal.
    #[arg(long)]
    model: Option<Model>,
    /// Override a configuration entry, e.g. `--set reactor.psi=3.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Simulation horizon.
    #[arg(long = "T", value_name = "T")]
    horizon: Option<f64>,
    /// Output root (default: $BIBO_FUNNEL_OUT, then `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Run {
    Certify,
    Simulate,
    VerifyIss,
    CrossValidate,
}

impl Run {
    fn name(self) -> &'static str {
        match self {
            Run::Certify => "certify",
            Run::Simulate => "simulate",
            Run::VerifyIss => "verify-iss",
            Run::CrossValidate => "cross-validate",
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the BIBO certificate and write it as key=value pairs.
    Certify(Common),
    /// Closed-loop funnel control of the reactor.
    Simulate(Common),
    /// Compare the heat model's gradient energy with the ISS envelope.
    VerifyIss(Common),
    /// Spectral mild solution against the finite-difference model.
    CrossValidate(Common),
    /// Repeat a run over values of one configuration entry, in parallel.
    Sweep {
        run: Run,
        /// Dotted configuration key, e.g. `reactor.psi`.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Category::Config.exit_code() } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{f}");
            f.category.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Certify(c) => single(Run::Certify, &c),
        Command::Simulate(c) => single(Run::Simulate, &c),
        Command::VerifyIss(c) => single(Run::VerifyIss, &c),
        Command::CrossValidate(c) => single(Run::CrossValidate, &c),
        Command::Sweep {
            run,
            param,
            values,
            common,
        } => sweep(run, &param, &values, &common),
    }
}

fn load(run: Run, common: &Common, extra: &[String]) -> Result<ScenarioConfig, Failure> {
    let mut sets = common.set.clone();
    sets.extend_from_slice(extra);
    if let Some(t) = common.horizon {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::new(Category::Config, format!("--T must be positive, got {t}")));
        }
        match run {
            Run::Simulate => sets.push(format!("closed_loop.horizon={t:?}")),
            Run::VerifyIss => sets.push(format!("heat.horizon={t:?}")),
            Run::CrossValidate => sets.push(format!(
                "cross_validation.times=[{:?}, {:?}, {t:?}]",
                t / 4.0,
                t / 2.0
            )),
            Run::Certify => {}
        }
    }
    Ok(ScenarioConfig::load(common.config.as_deref(), common.model, &sets)?)
}

fn output_root(common: &Common, cfg: &ScenarioConfig) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| cfg.output.dir.clone())
}

fn single(run: Run, common: &Common) -> Result<(), Failure> {
    let cfg = load(run, common, &[])?;
    let dir = output_root(common, &cfg).join(run.name());
    let summary = execute(run, &cfg, &dir)?;
    println!("{summary}");
    println!("outputs written to {}", dir.display());
    Ok(())
}

/// Runs one command, writing its outputs into `dir`; returns a one-line summary.
fn execute(run: Run, cfg: &ScenarioConfig, dir: &Path) -> Result<String, Failure> {
    match run {
        Run::Certify => certify(cfg, dir),
        Run::Simulate => simulate(cfg, dir),
        Run::VerifyIss => iss(cfg, dir),
        Run::CrossValidate => cross(cfg, dir),
    }
}

fn prepare(dir: &Path, cfg: &ScenarioConfig) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::new(Category::Io, format!("cannot create {}: {e}", dir.display())))?;
    write(dir, "config.resolved.toml", &cfg.to_toml())
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| Failure::new(Category::Io, format!("cannot write {}: {e}", path.display())))
}

fn certificate_for(cfg: &ScenarioConfig) -> Result<BiboCertificate, Failure> {
    let c = &cfg.certificate;
    match cfg.model {
        Model::Reactor => {
            let spec = ReactorSpectrum::new(cfg.reactor.d, cfg.reactor.v, cfg.reactor.psi)?;
            let (eps, delta) = match (c.epsilon, c.delta) {
                (Some(e), Some(d)) => (e, d),
                _ => {
                    let pair = feasibility_search(spec.psi).ok_or_else(|| {
                        Failure::new(
                            Category::Infeasible,
                            format!("no feasible (epsilon, delta) exists for psi = {}", spec.psi),
                        )
                    })?;
                    (pair.epsilon, pair.delta)
                }
            };
            Ok(certify_reactor(&spec, c.modes, c.lipschitz, eps, delta)?)
        }
        Model::CustomDiagonal => {
            let op = RieszSpectralOperator::from_eigenvalues(cfg.custom.eigenvalues(c.modes))?;
            let delta = match c.delta {
                Some(d) => d,
                None => optimal_delta(&op, c.alpha)?,
            };
            Ok(certify_diagonal(
                &op,
                &cfg.custom.input(c.modes),
                &cfg.custom.output(c.modes),
                c.lipschitz,
                c.alpha,
                delta,
            )?)
        }
        Model::Heat => Err(Failure::new(
            Category::Config,
            "certify applies to the reactor and custom-diagonal models; use verify-iss for heat",
        )),
    }
}

fn certify(cfg: &ScenarioConfig, dir: &Path) -> Result<String, Failure> {
    let cert = certificate_for(cfg)?;
    prepare(dir, cfg)?;
    write(dir, "certificate.txt", &cert.to_key_values())?;
    write(dir, "report.txt", &cert.report())?;
    if !cert.verdict {
        return Err(Failure::new(
            Category::Infeasible,
            format!("certificate rejected: {}", cert.reasons.join("; ")),
        ));
    }
    Ok(format!(
        "certificate holds: epsilon = {}, delta = {}, C2 bound * L = {:.6}",
        cert.epsilon,
        cert.delta,
        cert.c2_bound * cert.lipschitz
    ))
}

fn require_reactor(cfg: &ScenarioConfig, what: &str) -> Result<(), Failure> {
    if cfg.model != Model::Reactor {
        return Err(Failure::new(
            Category::Config,
            format!("{what} is defined for the reactor model, got {}", cfg.model),
        ));
    }
    Ok(())
}

fn simulate(cfg: &ScenarioConfig, dir: &Path) -> Result<String, Failure> {
    require_reactor(cfg, "simulate")?;
    let loop_cfg = cfg.closed_loop_config();
    // Hypotheses are checked here so that a violation leaves no outputs.
    loop_cfg.validate()?;
    let run = closed_loop_simulate(&loop_cfg)?;
    prepare(dir, cfg)?;
    write(dir, "trace.csv", &run.trace.to_csv())?;
    let stride = (0.1 / loop_cfg.output_dt).round().max(1.0) as usize;
    let mut grid = Table::new(["zeta", "t", "value"]);
    for (k, (t, x)) in run.profile.times.iter().zip(&run.profile.states).enumerate() {
        if k % stride == 0 || k + 1 == run.profile.len() {
            for (z, v) in run.nodes.iter().zip(x) {
                grid.push(vec![*z, *t, *v]);
            }
        }
    }
    write(dir, "profile.csv", &grid.to_csv())?;
    let v = &run.verification;
    write(dir, "report.txt", &v.report())?;
    if cfg.output.svg {
        let col = |name: &str| run.trace.column(name).expect("trace column");
        let t = col("t");
        let radius = col("funnel_radius");
        let neg: Vec<f64> = radius.iter().map(|r| -r).collect();
        let funnel = SvgPlot::new("tracking error and funnel", "t")
            .with(Series::new("e", "#1f77b4", t.clone(), col("e")))
            .with(Series::new("1/phi", "#d62728", t.clone(), radius).dashed())
            .with(Series::new("-1/phi", "#d62728", t.clone(), neg).dashed());
        write(dir, "funnel.svg", &funnel.render())?;
        let control = SvgPlot::new("controller", "t")
            .with(Series::new("u", "#2ca02c", t.clone(), col("u")))
            .with(Series::new("gain", "#9467bd", t, col("gain")));
        write(dir, "control.svg", &control.render())?;
    }
    if !v.holds() {
        return Err(Failure::new(Category::Solver, "closed loop left the funnel"));
    }
    Ok(format!(
        "funnel respected on [0, {}]: eps_margin = {}, max |u| = {}, max gain = {}",
        v.t_end,
        fmt_float(v.eps_margin),
        fmt_float(v.max_abs_u),
        fmt_float(v.max_gain)
    ))
}

fn iss(cfg: &ScenarioConfig, dir: &Path) -> Result<String, Failure> {
    if cfg.model != Model::Heat {
        return Err(Failure::new(
            Category::Config,
            format!("verify-iss is defined for the heat model, got {} (use --model heat)", cfg.model),
        ));
    }
    let h = &cfg.heat;
    let heat = HeatFd::new(h.n, |z| h.profile.eval(z))?;
    let x0 = vec![h.x_init; h.n + 1];
    let rep = verify_iss(
        &heat,
        &|t| h.input_at(t),
        &x0,
        h.horizon,
        h.samples,
        h.iss_params(),
        &cfg.integrator.build(),
    )?;
    prepare(dir, cfg)?;
    write(dir, "iss.csv", &rep.table().to_csv())?;
    write(dir, "report.txt", &rep.report())?;
    if cfg.output.svg {
        let t: Vec<f64> = rep.samples.iter().map(|s| s.t).collect();
        let plot = SvgPlot::new("gradient energy and ISS envelope", "t")
            .with(Series::new("|x'|^2", "#1f77b4", t.clone(), rep.samples.iter().map(|s| s.lhs).collect()))
            .with(Series::new("envelope", "#d62728", t, rep.samples.iter().map(|s| s.envelope).collect()).dashed());
        write(dir, "iss.svg", &plot.render())?;
    }
    match rep.first_violation {
        None => Ok(format!(
            "ISS envelope holds at {} samples (max excess {})",
            rep.samples.len(),
            fmt_float(rep.max_excess)
        )),
        Some(t) => Err(Failure::new(Category::Infeasible, format!("ISS envelope violated at t = {t}"))),
    }
}

fn cross(cfg: &ScenarioConfig, dir: &Path) -> Result<String, Failure> {
    require_reactor(cfg, "cross-validate")?;
    let cv = &cfg.cross_validation;
    let res = cross_validate(
        &cfg.reactor,
        cfg.closed_loop.nonlinearity,
        cv.modes,
        cv.cells,
        &cv.times,
        cv.x_init,
    )?;
    prepare(dir, cfg)?;
    let mut table = Table::new(["t", "relative_l2", "y_spectral", "y_fd"]);
    for k in 0..res.times.len() {
        table.push(vec![
            res.times[k],
            res.relative_l2[k],
            res.observation_spectral[k],
            res.observation_fd[k],
        ]);
    }
    write(dir, "cross_validation.csv", &table.to_csv())?;
    let worst = res.max_error();
    if worst > cv.tolerance {
        return Err(Failure::new(
            Category::Infeasible,
            format!("solvers disagree: relative L2 error {worst:e} exceeds {:e}", cv.tolerance),
        ));
    }
    Ok(format!("spectral and finite-difference solutions agree: max relative L2 error {worst:e}"))
}

fn sweep(run: Run, param: &str, values: &[String], common: &Common) -> Result<(), Failure> {
    // Validate every member before any run creates outputs.
    let mut configs = Vec::with_capacity(values.len());
    for v in values {
        configs.push(load(run, common, &[format!("{param}={v}")])?);
    }
    let root = output_root(common, &configs[0]).join("sweep").join(run.name());
    let results: Vec<Result<String, Failure>> = std::thread::scope(|s| {
        let handles: Vec<_> = values
            .iter()
            .zip(&configs)
            .map(|(v, cfg)| {
                let dir = root.join(format!("{param}={v}"));
                s.spawn(move || execute(run, cfg, &dir))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Failure::new(Category::Solver, "sweep worker panicked")))
            })
            .collect()
    });
    std::fs::create_dir_all(&root)
        .map_err(|e| Failure::new(Category::Io, format!("cannot create {}: {e}", root.display())))?;
    let mut summary = format!("{param},exit_code,summary\n");
    let mut first_failure = None;
    for (v, r) in values.iter().zip(results) {
        let (code, text) = match r {
            Ok(s) => (0, s),
            Err(f) => {
                let line = (f.category.exit_code(), f.message.clone());
                first_failure.get_or_insert(f);
                line
            }
        };
        println!("{param}={v}: [{code}] {text}");
        summary.push_str(&format!("{v},{code},\"{}\"\n", text.replace('"', "'")));
    }
    write(&root, "summary.csv", &summary)?;
    println!("outputs written to {}", root.display());
    match first_failure {
        None => Ok(()),
        Some(f) => Err(f),
    }
}
