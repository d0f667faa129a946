//! Scenario files in TOML with `section.key=value` overrides.
//!
//! Every field has a default, so an empty file (or no file) describes the
//! reactor benchmark. The resolved configuration can be written back with
//! [`ScenarioConfig::to_toml`] and re-read to reproduce a run.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fd::ReactorParams;
use crate::funnel::{Backend, ClosedLoopConfig, FunnelSpec, ReactorNonlinearity, Reference};
use crate::heat_iss::IssParams;
use crate::integrator::IntegratorConfig;

#[derive(Debug)]
pub enum ConfigError {
    Io { path: PathBuf, source: std::io::Error },
    /// Parse or type error; the message carries line and column when the
    /// problem is located in the file.
    Parse { origin: String, message: String },
    Override { entry: String, reason: String },
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => write!(f, "cannot read {}: {source}", path.display()),
            ConfigError::Parse { origin, message } => write!(f, "{origin}: {}", message.trim_end()),
            ConfigError::Override { entry, reason } => write!(f, "bad override `{entry}`: {reason}"),
            ConfigError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    #[default]
    Reactor,
    Heat,
    CustomDiagonal,
}

impl std::str::FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reactor" => Ok(Model::Reactor),
            "heat" => Ok(Model::Heat),
            "custom-diagonal" => Ok(Model::CustomDiagonal),
            other => Err(format!("unknown model `{other}` (reactor, heat, custom-diagonal)")),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Reactor => "reactor",
            Model::Heat => "heat",
            Model::CustomDiagonal => "custom-diagonal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertificateSection {
    pub lipschitz: f64,
    pub modes: usize,
    /// Omitted together with `delta`: search for a feasible pair.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Smoothing exponent for the custom diagonal model (the reactor uses 1/2).
    pub alpha: f64,
}

impl Default for CertificateSection {
    fn default() -> Self {
        Self {
            lipschitz: 1.0,
            modes: 100,
            epsilon: None,
            delta: None,
            alpha: 0.5,
        }
    }
}

/// `λ_n = -(offset + scale n^power)`, `b_n = n^b_power`, `c_n = n^c_power`
/// for `n = 1, 2, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CustomDiagonal {
    pub offset: f64,
    pub scale: f64,
    pub power: f64,
    pub b_power: f64,
    pub c_power: f64,
}

impl Default for CustomDiagonal {
    fn default() -> Self {
        Self {
            offset: 3.0,
            scale: 1.0,
            power: 2.0,
            b_power: 0.0,
            c_power: -1.0,
        }
    }
}

impl CustomDiagonal {
    pub fn eigenvalues(&self, modes: usize) -> Vec<f64> {
        (1..=modes)
            .map(|n| -(self.offset + self.scale * (n as f64).powf(self.power)))
            .collect()
    }

    pub fn input(&self, modes: usize) -> Vec<f64> {
        (1..=modes).map(|n| (n as f64).powf(self.b_power)).collect()
    }

    pub fn output(&self, modes: usize) -> Vec<f64> {
        (1..=modes).map(|n| (n as f64).powf(self.c_power)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    #[default]
    FiniteDifference,
    Spectral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClosedLoopSection {
    pub horizon: f64,
    pub backend: BackendKind,
    /// Modes of the spectral backend.
    pub modes: usize,
    pub x_init: f64,
    pub x_f_init: f64,
    pub output_dt: f64,
    pub nonlinearity: ReactorNonlinearity,
}

impl Default for ClosedLoopSection {
    fn default() -> Self {
        Self {
            horizon: 10.0,
            backend: BackendKind::FiniteDifference,
            modes: 40,
            x_init: 1.0,
            x_f_init: 1.0,
            output_dt: 0.01,
            nonlinearity: ReactorNonlinearity::Saturation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InputProfile {
    #[default]
    Uniform,
    LeftHalf,
    Cosine,
}

impl InputProfile {
    pub fn eval(self, z: f64) -> f64 {
        match self {
            InputProfile::Uniform => 1.0,
            InputProfile::LeftHalf => {
                if z <= 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            InputProfile::Cosine => (std::f64::consts::PI * z).cos(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeatSection {
    pub n: usize,
    pub profile: InputProfile,
    /// `u(t) = input cos(input_frequency t)`.
    pub input: f64,
    pub input_frequency: f64,
    pub x_init: f64,
    pub horizon: f64,
    pub samples: usize,
    pub epsilon: f64,
    pub eta: f64,
}

impl Default for HeatSection {
    fn default() -> Self {
        Self {
            n: 100,
            profile: InputProfile::Uniform,
            input: 1.0,
            input_frequency: 0.0,
            x_init: 0.0,
            horizon: 5.0,
            samples: 200,
            epsilon: 1.0,
            eta: 1.0,
        }
    }
}

impl HeatSection {
    pub fn iss_params(&self) -> IssParams {
        IssParams {
            epsilon: self.epsilon,
            eta: self.eta,
        }
    }

    pub fn input_at(&self, t: f64) -> f64 {
        self.input * (self.input_frequency * t).cos()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrossValidationSection {
    pub modes: usize,
    pub cells: usize,
    pub times: Vec<f64>,
    pub x_init: f64,
    pub tolerance: f64,
}

impl Default for CrossValidationSection {
    fn default() -> Self {
        Self {
            modes: 100,
            cells: 200,
            times: vec![0.5, 1.0, 2.0],
            x_init: 1.0,
            tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self {
            rtol: d.rtol,
            atol: d.atol,
            max_steps: d.max_steps,
        }
    }
}

impl IntegratorSection {
    pub fn build(&self) -> IntegratorConfig {
        IntegratorConfig {
            max_steps: self.max_steps,
            ..IntegratorConfig::default().with_tolerances(self.rtol, self.atol)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            svg: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub model: Model,
    pub reactor: ReactorParams,
    pub certificate: CertificateSection,
    pub custom: CustomDiagonal,
    pub closed_loop: ClosedLoopSection,
    pub funnel: FunnelSpec,
    pub reference: Reference,
    pub heat: HeatSection,
    pub cross_validation: CrossValidationSection,
    pub integrator: IntegratorSection,
    pub output: OutputSection,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            origin: origin.to_string(),
            message: e.to_string(),
        })
    }

    /// Reads `path` (defaults when `None`), then applies `model` and the
    /// `section.key=value` overrides in order.
    pub fn load(path: Option<&Path>, model: Option<Model>, overrides: &[String]) -> Result<Self, ConfigError> {
        let (text, origin) = match path {
            Some(p) => (
                std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                    path: p.to_path_buf(),
                    source,
                })?,
                p.display().to_string(),
            ),
            None => (String::new(), "<defaults>".to_string()),
        };
        // Typed parse first so that errors in the file keep their location.
        Self::from_toml_str(&text, &origin)?;
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse {
            origin: origin.clone(),
            message: e.to_string(),
        })?;
        if let Some(m) = model {
            table.insert("model".into(), toml::Value::String(m.to_string()));
        }
        for entry in overrides {
            apply_override(&mut table, entry)?;
        }
        let cfg: Self = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse {
                origin: format!("{origin} with overrides"),
                message: e.to_string(),
            })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configuration serializes")
    }

    /// Parameter ranges; hypotheses of the theory are checked by the
    /// individual runs.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |e: crate::Error| ConfigError::Invalid(e.to_string());
        self.reactor.validate().map_err(bad)?;
        self.funnel.validate().map_err(bad)?;
        self.heat.iss_params().validate().map_err(bad)?;
        let c = &self.certificate;
        if !(c.lipschitz >= 0.0) {
            return Err(ConfigError::Invalid("certificate.lipschitz must be non-negative".into()));
        }
        if c.modes < crate::certificates::MIN_COEFFICIENTS {
            return Err(ConfigError::Invalid(format!(
                "certificate.modes must be at least {}",
                crate::certificates::MIN_COEFFICIENTS
            )));
        }
        if c.epsilon.is_some() != c.delta.is_some() {
            return Err(ConfigError::Invalid(
                "certificate.epsilon and certificate.delta must be given together".into(),
            ));
        }
        if !(0.0..1.0).contains(&c.alpha) {
            return Err(ConfigError::Invalid("certificate.alpha must lie in [0, 1)".into()));
        }
        if !(self.closed_loop.horizon > 0.0) || !(self.heat.horizon > 0.0) {
            return Err(ConfigError::Invalid("horizons must be positive".into()));
        }
        if self.heat.n < 4 || self.heat.samples == 0 {
            return Err(ConfigError::Invalid("heat.n >= 4 and heat.samples >= 1 required".into()));
        }
        let cv = &self.cross_validation;
        if cv.times.is_empty() || cv.times.iter().any(|t| !(*t > 0.0)) {
            return Err(ConfigError::Invalid("cross_validation.times must be positive and non-empty".into()));
        }
        if !(self.integrator.rtol > 0.0 && self.integrator.atol > 0.0) {
            return Err(ConfigError::Invalid("integrator tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn closed_loop_config(&self) -> ClosedLoopConfig {
        let cl = &self.closed_loop;
        ClosedLoopConfig {
            reactor: self.reactor,
            funnel: self.funnel,
            reference: self.reference,
            nonlinearity: cl.nonlinearity,
            backend: match cl.backend {
                BackendKind::FiniteDifference => Backend::FiniteDifference,
                BackendKind::Spectral => Backend::Spectral { modes: cl.modes },
            },
            horizon: cl.horizon,
            x_init: cl.x_init,
            x_f_init: cl.x_f_init,
            output_dt: cl.output_dt,
            integrator: self.integrator.build(),
        }
    }
}

/// Sets `dotted.key` to `value`, parsing `value` as a TOML value and falling
/// back to a bare string.
pub fn apply_override(table: &mut toml::Table, entry: &str) -> Result<(), ConfigError> {
    let fail = |reason: &str| ConfigError::Override {
        entry: entry.to_string(),
        reason: reason.to_string(),
    };
    let (key, raw) = entry.split_once('=').ok_or_else(|| fail("expected key=value"))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(fail("empty key segment"));
    }
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut cur = table;
    for p in parents {
        cur = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| fail(&format!("`{p}` is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}
