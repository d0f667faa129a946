//! Funnel control of the reactor output.
//!
//! The controller `u = -e / (1 - φ² e²)` keeps the tracking error
//! `e = y - y_ref` inside the funnel `φ(t)|e(t)| < 1`. The closed loop is
//! simulated with the PDE discretized by finite differences or by a modal
//! Galerkin truncation, and the guarantees of the controller are checked a
//! posteriori on the numerical solution.

use std::cell::Cell;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::certificates::{input_admissibility_upper, output_bound};
use crate::error::{invalid, Error, Result};
use crate::fd::{saturation, ReactorFd, ReactorParams};
use crate::integrator::{integrate, IntegratorConfig, Jacobian, Solution};
use crate::spectral::{reactor_half_constant, ModalGrid, ReactorSpectrum};
use crate::trace::{Table, Trajectory};

/// Distance to the funnel boundary below which the law is treated as singular.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Funnel functions `φ` of the class with `φ > 0`, `φ, φ̇` bounded and
/// `liminf φ > 0`; the funnel radius is `1/φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunnelSpec {
    /// `φ(t) = 1 / (amplitude e^{-rate t} + floor)`.
    Exponential { amplitude: f64, rate: f64, floor: f64 },
    Constant { phi: f64 },
}

impl Default for FunnelSpec {
    fn default() -> Self {
        FunnelSpec::Exponential {
            amplitude: 2.0,
            rate: 2.0,
            floor: 0.2,
        }
    }
}

impl FunnelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FunnelSpec::Exponential { amplitude, rate, floor } => {
                if !(floor > 0.0) || !(amplitude >= 0.0) || !(rate >= 0.0) {
                    return Err(invalid(
                        "funnel",
                        "need floor > 0 and non-negative amplitude and rate",
                    ));
                }
            }
            FunnelSpec::Constant { phi } => {
                if !(phi > 0.0 && phi.is_finite()) {
                    return Err(invalid("funnel", format!("phi must be positive, got {phi}")));
                }
            }
        }
        Ok(())
    }

    pub fn phi(&self, t: f64) -> f64 {
        match *self {
            FunnelSpec::Exponential { amplitude, rate, floor } => {
                1.0 / (amplitude * (-rate * t).exp() + floor)
            }
            FunnelSpec::Constant { phi } => phi,
        }
    }

    pub fn phi_dot(&self, t: f64) -> f64 {
        match *self {
            FunnelSpec::Exponential { amplitude, rate, floor } => {
                let e = amplitude * (-rate * t).exp();
                rate * e / (e + floor).powi(2)
            }
            FunnelSpec::Constant { .. } => 0.0,
        }
    }

    pub fn radius(&self, t: f64) -> f64 {
        1.0 / self.phi(t)
    }

    pub fn liminf(&self) -> f64 {
        match *self {
            FunnelSpec::Exponential { floor, .. } => 1.0 / floor,
            FunnelSpec::Constant { phi } => phi,
        }
    }
}

/// Reference signals with their derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Reference {
    /// `amplitude cos(frequency t)`.
    Cosine { amplitude: f64, frequency: f64 },
    Constant { value: f64 },
}

impl Default for Reference {
    fn default() -> Self {
        Reference::Cosine {
            amplitude: 0.5,
            frequency: 1.0,
        }
    }
}

impl Reference {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Reference::Cosine { amplitude, frequency } => amplitude * (frequency * t).cos(),
            Reference::Constant { value } => value,
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Reference::Cosine { amplitude, frequency } => -amplitude * frequency * (frequency * t).sin(),
            Reference::Constant { .. } => 0.0,
        }
    }
}

/// `u = -e / (1 - φ² e²)`.
pub fn funnel_law(e: f64, phi: f64) -> Result<f64> {
    let s = phi * e.abs();
    if !(s < 1.0 - BOUNDARY_TOLERANCE) {
        return Err(Error::FunnelViolation { t: f64::NAN, scaled_error: s });
    }
    Ok(-e * funnel_gain(e, phi))
}

/// `1 / (1 - φ² e²)`.
pub fn funnel_gain(e: f64, phi: f64) -> f64 {
    1.0 / (1.0 - phi * phi * e * e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ReactorNonlinearity {
    /// `|x| / (|x| + 1)`.
    #[default]
    Saturation,
    None,
}

impl ReactorNonlinearity {
    pub fn function(self) -> Option<fn(f64) -> f64> {
        match self {
            ReactorNonlinearity::Saturation => Some(saturation),
            ReactorNonlinearity::None => None,
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        match self {
            ReactorNonlinearity::Saturation => x.signum() / (x.abs() + 1.0).powi(2),
            ReactorNonlinearity::None => 0.0,
        }
    }

    pub fn lipschitz(self) -> f64 {
        match self {
            ReactorNonlinearity::Saturation => 1.0,
            ReactorNonlinearity::None => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Backend {
    FiniteDifference,
    Spectral { modes: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopConfig {
    pub reactor: ReactorParams,
    pub funnel: FunnelSpec,
    pub reference: Reference,
    pub nonlinearity: ReactorNonlinearity,
    pub backend: Backend,
    pub horizon: f64,
    /// Uniform initial PDE profile.
    pub x_init: f64,
    pub x_f_init: f64,
    /// Spacing of the reported trace.
    pub output_dt: f64,
    pub integrator: IntegratorConfig,
}

impl Default for ClosedLoopConfig {
    fn default() -> Self {
        Self {
            reactor: ReactorParams::default(),
            funnel: FunnelSpec::default(),
            reference: Reference::default(),
            nonlinearity: ReactorNonlinearity::Saturation,
            backend: Backend::FiniteDifference,
            horizon: 10.0,
            x_init: 1.0,
            x_f_init: 1.0,
            output_dt: 0.01,
            integrator: IntegratorConfig::default(),
        }
    }
}

impl ClosedLoopConfig {
    /// `φ(0) |y(0) - y_ref(0)|`.
    pub fn initial_scaled_error(&self) -> f64 {
        self.funnel.phi(0.0) * (self.x_f_init - self.reference.value(0.0)).abs()
    }

    /// Parameter checks and the hypothesis `φ(0)|e(0)| < 1`.
    pub fn validate(&self) -> Result<()> {
        self.reactor.validate()?;
        self.funnel.validate()?;
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid("horizon", format!("must be positive, got {}", self.horizon)));
        }
        if !(self.output_dt > 0.0) {
            return Err(invalid("output_dt", "must be positive"));
        }
        if let Backend::Spectral { modes } = self.backend {
            if modes == 0 {
                return Err(invalid("modes", "need at least one mode"));
            }
        }
        let s = self.initial_scaled_error();
        if !(s < 1.0) {
            return Err(Error::Hypothesis(format!(
                "initial error outside the funnel: phi(0)|e(0)| = {s} >= 1"
            )));
        }
        Ok(())
    }
}

/// A posteriori check of the closed-loop guarantees.
#[derive(Debug, Clone, PartialEq)]
pub struct FunnelVerification {
    pub completed: bool,
    pub t_end: f64,
    pub initial_scaled_error: f64,
    /// `max φ|e|` over accepted steps and step midpoints.
    pub max_scaled_error: f64,
    /// `1 - max φ|e|`.
    pub eps_margin: f64,
    /// `min (1/φ - |e|)`.
    pub min_distance: f64,
    pub max_abs_u: f64,
    pub max_gain: f64,
    pub max_abs_y: f64,
    pub checked_points: usize,
    pub violation: Option<(f64, f64)>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl FunnelVerification {
    pub fn holds(&self) -> bool {
        self.completed
            && self.violation.is_none()
            && self.eps_margin > 0.0
            && [self.max_abs_u, self.max_gain, self.max_abs_y]
                .iter()
                .all(|v| v.is_finite())
    }

    pub fn report(&self) -> String {
        format!(
            "closed loop on [0, {t}]: {verdict}\n  phi(0)|e(0)|  = {s0:.6}\n  max phi|e|    = {m:.6}\n  eps_margin    = {eps:.6}\n  min(1/phi-|e|)= {d:.6}\n  max |u|       = {u:.6}\n  max gain      = {g:.6}\n  max |y|       = {y:.6}\n  points checked: {n} ({a} accepted steps, {r} rejected)\n",
            t = self.t_end,
            verdict = if self.holds() { "error stayed inside the funnel" } else { "NOT verified" },
            s0 = self.initial_scaled_error,
            m = self.max_scaled_error,
            eps = self.eps_margin,
            d = self.min_distance,
            u = self.max_abs_u,
            g = self.max_gain,
            y = self.max_abs_y,
            n = self.checked_points,
            a = self.accepted_steps,
            r = self.rejected_steps,
        )
    }
}

#[derive(Debug, Clone)]
pub struct ClosedLoopRun {
    /// Columns `t, y, y_ref, e, funnel_radius, u, gain` on the output grid.
    pub trace: Table,
    /// PDE profile at the grid nodes, on the output grid.
    pub profile: Trajectory,
    pub nodes: Vec<f64>,
    pub verification: FunnelVerification,
}

pub const TRACE_HEADER: [&str; 7] = ["t", "y", "y_ref", "e", "funnel_radius", "u", "gain"];

/// Modal Galerkin model of the reactor PDE.
struct GalerkinReactor {
    eig: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    grid: ModalGrid,
    /// `φ_m(i/n)` for reporting profiles.
    nodal: Vec<Vec<f64>>,
}

impl GalerkinReactor {
    fn new(p: &ReactorParams, modes: usize) -> Result<Self> {
        let spec = ReactorSpectrum::new(p.d, p.v, p.psi)?;
        let op = spec.operator(modes)?;
        let grid = ModalGrid::new(&op)?;
        let nodal = (0..=p.n)
            .map(|i| {
                let z = i as f64 / p.n as f64;
                (0..modes).map(|m| spec.eigenfunction(m, z)).collect()
            })
            .collect();
        Ok(Self {
            eig: op.eigenvalues().to_vec(),
            b: spec.input_coefficients(modes),
            c: spec.output_coefficients(modes),
            grid,
            nodal,
        })
    }

    fn modes(&self) -> usize {
        self.eig.len()
    }

    fn observe(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    fn pde_rhs(&self, nl: ReactorNonlinearity, x: &[f64], eta: f64, out: &mut [f64]) {
        let n = self.modes();
        match nl.function() {
            Some(f) => {
                let mut values = vec![0.0; self.grid.nodes().len()];
                self.grid.synthesize_into(x, &mut values);
                values.iter_mut().for_each(|v| *v = f(*v));
                self.grid.project_into(&values, &mut out[..n]);
            }
            None => out[..n].iter_mut().for_each(|o| *o = 0.0),
        }
        for m in 0..n {
            out[m] += self.eig[m] * x[m] + self.b[m] * eta;
        }
    }

    /// `∂/∂x` of [`Self::pde_rhs`], an `n × n` block.
    fn pde_jacobian(&self, nl: ReactorNonlinearity, x: &[f64]) -> DMatrix<f64> {
        let n = self.modes();
        let mut j = DMatrix::zeros(n, n);
        if nl != ReactorNonlinearity::None {
            let mut values = vec![0.0; self.grid.nodes().len()];
            self.grid.synthesize_into(x, &mut values);
            for (q, (v, w)) in values.iter().zip(&self.grid.quadrature().weights).enumerate() {
                let s = w * nl.derivative(*v);
                if s == 0.0 {
                    continue;
                }
                let row = self.grid.row(q);
                for a in 0..n {
                    let sa = s * row[a];
                    for b in 0..n {
                        j[(a, b)] += sa * row[b];
                    }
                }
            }
        }
        for m in 0..n {
            j[(m, m)] += self.eig[m];
        }
        j
    }

    fn profile(&self, x: &[f64]) -> Vec<f64> {
        self.nodal
            .iter()
            .map(|row| row.iter().zip(x).map(|(p, c)| p * c).sum())
            .collect()
    }
}

/// Integrates PDE + tank + controller over `[0, horizon]` and checks the
/// funnel at every accepted step and at each step midpoint.
pub fn closed_loop_simulate(cfg: &ClosedLoopConfig) -> Result<ClosedLoopRun> {
    cfg.validate()?;
    let p = cfg.reactor;
    let funnel = cfg.funnel;
    let reference = cfg.reference;
    let law = |t: f64, y: f64| -> Result<f64> {
        funnel_law(y - reference.value(t), funnel.phi(t)).map_err(|e| match e {
            Error::FunnelViolation { scaled_error, .. } => Error::FunnelViolation { t, scaled_error },
            other => other,
        })
    };
    let steps = (cfg.horizon / cfg.output_dt).round().max(1.0) as usize;
    let stops: Vec<f64> = (1..steps)
        .map(|k| k as f64 * cfg.horizon / steps as f64)
        .collect();
    let last_violation: Cell<Option<(f64, f64)>> = Cell::new(None);
    let record = |r: Result<f64>| {
        if let Err(Error::FunnelViolation { t, scaled_error }) = &r {
            last_violation.set(Some((*t, *scaled_error)));
        }
        r
    };

    let (solution, y_index, profile_of): (Result<Solution>, usize, Box<dyn Fn(&[f64]) -> Vec<f64>>) =
        match cfg.backend {
            Backend::FiniteDifference => {
                let fd = ReactorFd::new(p, cfg.nonlinearity.function())?;
                let mut y0 = vec![cfg.x_init; p.n + 1];
                y0.push(cfg.x_f_init);
                let rhs = |t: f64, y: &[f64], out: &mut [f64]| {
                    let u = record(law(t, y[p.n + 1]))?;
                    fd.coupled_rhs(y, u, out);
                    Ok(())
                };
                let sol = integrate(
                    rhs,
                    Jacobian::sparse(fd.coupled_sparsity()),
                    &y0,
                    0.0,
                    cfg.horizon,
                    &stops,
                    &cfg.integrator,
                );
                let n = p.n;
                (sol, n + 1, Box::new(move |y: &[f64]| y[..=n].to_vec()))
            }
            Backend::Spectral { modes } => {
                let model = Arc::new(GalerkinReactor::new(&p, modes)?);
                let mut y0 = crate::mild::project_profile(&model.grid, |_| cfg.x_init);
                y0.push(cfg.x_f_init);
                let nl = cfg.nonlinearity;
                let rhs = |t: f64, y: &[f64], out: &mut [f64]| {
                    let x_f = y[modes];
                    let u = record(law(t, x_f))?;
                    model.pde_rhs(nl, &y[..modes], x_f, out);
                    out[modes] = p.a1 * x_f + p.a2 * u + p.r * model.observe(&y[..modes]);
                    Ok(())
                };
                let jac_model = model.clone();
                let jac = move |t: f64, y: &[f64]| {
                    let mut j = DMatrix::zeros(modes + 1, modes + 1);
                    j.view_mut((0, 0), (modes, modes))
                        .copy_from(&jac_model.pde_jacobian(nl, &y[..modes]));
                    for m in 0..modes {
                        j[(m, modes)] = jac_model.b[m];
                        j[(modes, m)] = p.r * jac_model.c[m];
                    }
                    let e = y[modes] - reference.value(t);
                    let phi = funnel.phi(t);
                    let q = 1.0 - phi * phi * e * e;
                    j[(modes, modes)] = p.a1 - p.a2 * (1.0 + phi * phi * e * e) / (q * q);
                    j
                };
                let sol = integrate(rhs, Jacobian::analytic(jac), &y0, 0.0, cfg.horizon, &stops, &cfg.integrator);
                let m2 = model.clone();
                (sol, modes, Box::new(move |y: &[f64]| m2.profile(&y[..modes])))
            }
        };

    let solution = match (solution, last_violation.get()) {
        (Ok(s), _) => s,
        (Err(Error::StepUnderflow { .. } | Error::MaxSteps(_)), Some((t, scaled_error))) => {
            return Err(Error::FunnelViolation { t, scaled_error });
        }
        (Err(e), _) => return Err(e),
    };

    let mut v = FunnelVerification {
        completed: solution.t_end() == cfg.horizon,
        t_end: solution.t_end(),
        initial_scaled_error: cfg.initial_scaled_error(),
        max_scaled_error: 0.0,
        eps_margin: 0.0,
        min_distance: f64::INFINITY,
        max_abs_u: 0.0,
        max_gain: 0.0,
        max_abs_y: 0.0,
        checked_points: 0,
        violation: None,
        accepted_steps: solution.accepted,
        rejected_steps: solution.rejected,
    };
    let mut check = |t: f64, y: f64| {
        let e = y - reference.value(t);
        let phi = funnel.phi(t);
        let s = phi * e.abs();
        v.checked_points += 1;
        v.max_scaled_error = v.max_scaled_error.max(s);
        v.min_distance = v.min_distance.min(1.0 / phi - e.abs());
        v.max_abs_y = v.max_abs_y.max(y.abs());
        match funnel_law(e, phi) {
            Ok(u) => {
                v.max_abs_u = v.max_abs_u.max(u.abs());
                v.max_gain = v.max_gain.max(funnel_gain(e, phi));
            }
            Err(_) => {
                if v.violation.is_none() {
                    v.violation = Some((t, s));
                }
            }
        }
    };
    for k in 0..solution.times.len() {
        let t = solution.times[k];
        check(t, solution.states[k][y_index]);
        if k + 1 < solution.times.len() {
            let tm = 0.5 * (t + solution.times[k + 1]);
            check(tm, solution.dense(tm)[y_index]);
        }
    }
    v.eps_margin = 1.0 - v.max_scaled_error;

    let mut trace = Table::new(TRACE_HEADER);
    let mut profile = Trajectory::new();
    for (t, y) in solution.times.iter().zip(&solution.states) {
        if *t != 0.0 && *t != cfg.horizon && stops.binary_search_by(|s| s.total_cmp(t)).is_err() {
            continue;
        }
        let out = y[y_index];
        let yr = reference.value(*t);
        let e = out - yr;
        let phi = funnel.phi(*t);
        let u = funnel_law(e, phi).unwrap_or(f64::NAN);
        trace.push(vec![*t, out, yr, e, 1.0 / phi, u, funnel_gain(e, phi)]);
        profile.push(*t, profile_of(y));
    }
    let nodes = (0..=p.n).map(|i| i as f64 / p.n as f64).collect();
    Ok(ClosedLoopRun {
        trace,
        profile,
        nodes,
        verification: v,
    })
}

/// Output of `S(η) = a₁ η + R x(1, ·)` on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SOutput {
    pub times: Vec<f64>,
    pub eta: Vec<f64>,
    pub x_end: Vec<f64>,
    pub s: Vec<f64>,
}

/// Evaluates `S` on `[0, horizon]` for the reactor PDE started from the
/// uniform profile `x_init`, reporting on `samples + 1` uniform times.
///
/// The reporting times are integrator stops, so two inputs that agree up
/// to a reporting time produce identical outputs up to that time.
pub fn operator_s(
    params: &ReactorParams,
    nonlinearity: ReactorNonlinearity,
    eta: &(dyn Fn(f64) -> f64 + Sync),
    x_init: f64,
    horizon: f64,
    samples: usize,
    integrator: &IntegratorConfig,
) -> Result<SOutput> {
    let fd = ReactorFd::new(*params, nonlinearity.function())?;
    if samples == 0 {
        return Err(invalid("samples", "need at least one sample"));
    }
    let times: Vec<f64> = (0..=samples)
        .map(|k| k as f64 * horizon / samples as f64)
        .collect();
    let rhs = |t: f64, x: &[f64], out: &mut [f64]| {
        fd.pde_rhs(x, eta(t), out);
        Ok(())
    };
    let sol = integrate(
        rhs,
        Jacobian::sparse(fd.pde_sparsity()),
        &vec![x_init; params.n + 1],
        0.0,
        horizon,
        &times[1..samples],
        integrator,
    )?;
    let mut x_end = Vec::with_capacity(times.len());
    for t in &times {
        let k = sol
            .index_of(*t)
            .ok_or_else(|| Error::Numerical(format!("integrator skipped stop {t}")))?;
        x_end.push(*sol.states[k].last().unwrap());
    }
    let eta_v: Vec<f64> = times.iter().map(|t| eta(*t)).collect();
    let s = eta_v
        .iter()
        .zip(&x_end)
        .map(|(e, x)| params.a1 * e + params.r * x)
        .collect();
    Ok(SOutput {
        times,
        eta: eta_v,
        x_end,
        s,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzEstimate {
    /// `max ‖S(η₁) - S(η₂)‖ / ‖η₁ - η₂‖` on `[t, t + τ]`.
    pub ratio: f64,
    /// Same ratio for the PDE part `R x(1, ·)` alone.
    pub pde_ratio: f64,
    /// `pde_ratio` recomputed on the grid with twice as many cells.
    pub refined_pde_ratio: f64,
    pub pairs_used: usize,
}

impl LipschitzEstimate {
    /// Relative change of the PDE ratio under grid refinement.
    pub fn refinement_change(&self) -> f64 {
        let scale = self.pde_ratio.abs().max(self.refined_pde_ratio.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.pde_ratio - self.refined_pde_ratio).abs() / scale
        }
    }
}

/// Samples the local Lipschitz ratio of `S` at `η` against perturbed inputs
/// that agree with `η` on `[0, t]`.
pub fn check_s_local_lipschitz(
    params: &ReactorParams,
    nonlinearity: ReactorNonlinearity,
    eta: &(dyn Fn(f64) -> f64 + Sync),
    perturbations: &[&(dyn Fn(f64) -> f64 + Sync)],
    t: f64,
    tau: f64,
    x_init: f64,
    integrator: &IntegratorConfig,
) -> Result<LipschitzEstimate> {
    if !(t >= 0.0 && tau > 0.0) {
        return Err(invalid("t/tau", "need t >= 0 and tau > 0"));
    }
    let horizon = t + tau;
    let samples = ((horizon / 0.01).round() as usize).max(20);
    let window_start = |times: &[f64]| times.iter().position(|s| *s >= t - 1e-12).unwrap_or(0);
    let ratios = |p: &ReactorParams| -> Result<(f64, f64, usize)> {
        let base = operator_s(p, nonlinearity, eta, x_init, horizon, samples, integrator)?;
        let k0 = window_start(&base.times);
        let (mut total, mut pde, mut used) = (0.0f64, 0.0f64, 0);
        for pert in perturbations {
            let other = operator_s(p, nonlinearity, *pert, x_init, horizon, samples, integrator)?;
            let sup = |a: &[f64], b: &[f64]| {
                a[k0..]
                    .iter()
                    .zip(&b[k0..])
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max)
            };
            let d_eta = sup(&base.eta, &other.eta);
            if d_eta == 0.0 {
                continue;
            }
            used += 1;
            total = total.max(sup(&base.s, &other.s) / d_eta);
            pde = pde.max(p.r * sup(&base.x_end, &other.x_end) / d_eta);
        }
        Ok((total, pde, used))
    };
    let (ratio, pde_ratio, pairs_used) = ratios(params)?;
    let fine = ReactorParams {
        n: 2 * params.n,
        ..*params
    };
    let (_, refined_pde_ratio, _) = ratios(&fine)?;
    Ok(LipschitzEstimate {
        ratio,
        pde_ratio,
        refined_pde_ratio,
        pairs_used,
    })
}

/// Lipschitz bound for `S` built from the certificate constants:
/// `|a₁| + R κ C₁ / (1 - c₂ L)` at `α = 1/2`, `δ = ψ - ε`.
pub fn s_lipschitz_bound(params: &ReactorParams, modes: usize, lipschitz: f64, epsilon: f64) -> Result<f64> {
    let spec = ReactorSpectrum::new(params.d, params.v, params.psi)?;
    let op = spec.operator(modes)?;
    let c1 = input_admissibility_upper(&op, &spec.input_coefficients(modes), 0.5)?.upper();
    let kappa = output_bound(&op, &spec.output_coefficients(modes), 0.5)?.upper();
    let delta = params.psi - epsilon;
    let c2 = reactor_half_constant(params.psi, epsilon) * PI.sqrt() / delta.sqrt();
    let contraction = c2 * lipschitz;
    if contraction >= 1.0 {
        return Err(Error::Margin(format!("c2 L = {contraction} is not below 1")));
    }
    Ok(params.a1.abs() + params.r * kappa * c1 / (1.0 - contraction))
}
