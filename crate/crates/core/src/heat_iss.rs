//! Lyapunov-based input-to-state estimate for `∂x/∂t = x'' - x³ + b u` on
//! `[0, 1]` with Neumann ends.
//!
//! With `V = ‖x‖² + 2‖x'‖² + ∫x⁴` and `W = ‖x'‖² + ∫x⁴`, the estimate reads
//!
//! ```text
//! ‖x'(t)‖² ≤ ½ V(x₀) e^{-ρt} + (λ/2) ∫₀ᵗ e^{-ρ(t-s)} |u(s)|² ds
//! ```
//!
//! with `κ = 2 - ε`, `ρ = min{κ, 2}/3` and `λ = (1/ε + 2/η)‖b‖`.

use crate::error::{invalid, Result};
use crate::fd::{trapezoid, HeatFd};
use crate::integrator::{integrate, IntegratorConfig, Jacobian};
use crate::trace::Table;

/// Allowed excess of the left-hand side over the envelope.
pub const ENVELOPE_TOLERANCE: f64 = 1e-6;

/// `V` and `W` of a nodal profile on a uniform grid of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovValues {
    pub l2: f64,
    pub gradient: f64,
    pub quartic: f64,
}

impl LyapunovValues {
    pub fn v(&self) -> f64 {
        self.l2 + 2.0 * self.gradient + self.quartic
    }

    pub fn w(&self) -> f64 {
        self.gradient + self.quartic
    }
}

/// Trapezoid for `‖x‖²` and `∫x⁴`; one-sided differences for `‖x'‖²`.
pub fn lyapunov_eval(x: &[f64]) -> LyapunovValues {
    let n = x.len() - 1;
    let h = 1.0 / n as f64;
    let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
    let quartic: Vec<f64> = sq.iter().map(|v| v * v).collect();
    let gradient = x.windows(2).map(|w| (w[1] - w[0]).powi(2) / h).sum();
    LyapunovValues {
        l2: trapezoid(&sq),
        gradient,
        quartic: trapezoid(&quartic),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IssParams {
    pub epsilon: f64,
    pub eta: f64,
}

impl Default for IssParams {
    fn default() -> Self {
        Self { epsilon: 1.0, eta: 1.0 }
    }
}

impl IssParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 2.0 && self.eta > 0.0 && self.eta < 2.0) {
            return Err(invalid(
                "epsilon/eta",
                format!("need 0 < epsilon, eta < 2, got ({}, {})", self.epsilon, self.eta),
            ));
        }
        Ok(())
    }

    pub fn kappa(&self) -> f64 {
        2.0 - self.epsilon
    }

    pub fn rho(&self) -> f64 {
        self.kappa().min(2.0) / 3.0
    }

    pub fn lambda(&self, b_norm: f64) -> f64 {
        (1.0 / self.epsilon + 2.0 / self.eta) * b_norm
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovSample {
    pub t: f64,
    pub v: f64,
    pub w: f64,
    /// `‖x'(t)‖²`.
    pub lhs: f64,
    pub envelope: f64,
    /// `V(x₀) e^{-ρt} + λ ∫ e^{-ρ(t-s)} |u|²`, the bound on `V` itself.
    pub v_envelope: f64,
}

#[derive(Debug, Clone)]
pub struct IssReport {
    pub samples: Vec<LyapunovSample>,
    pub rho: f64,
    pub lambda: f64,
    pub kappa: f64,
    /// First sample with `lhs > envelope + tolerance`.
    pub first_violation: Option<f64>,
    /// `max(lhs - envelope)`.
    pub max_excess: f64,
    /// First sample with `V > v_envelope + tolerance`.
    pub first_v_violation: Option<f64>,
    /// Samples where `V ≤ 3W` fails.
    pub sandwich_failures: usize,
}

impl IssReport {
    pub fn envelope_holds(&self) -> bool {
        self.first_violation.is_none()
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(["t", "lhs", "envelope", "V", "W"]);
        for s in &self.samples {
            t.push(vec![s.t, s.lhs, s.envelope, s.v, s.w]);
        }
        t
    }

    pub fn report(&self) -> String {
        let mut s = format!(
            "ISS envelope with kappa = 2 - epsilon = {:.3}, rho = {:.6}, lambda = {:.6}\n",
            self.kappa, self.rho, self.lambda
        );
        match self.first_violation {
            None => s.push_str(&format!(
                "  |x'|^2 stayed below the envelope at all {} samples (max excess {:.3e})\n",
                self.samples.len(),
                self.max_excess
            )),
            Some(t) => s.push_str(&format!("  envelope VIOLATED first at t = {t}\n")),
        }
        if let Some(t) = self.first_v_violation {
            s.push_str(&format!("  note: V itself exceeds V(0)e^(-rho t) + input term from t = {t}\n"));
        }
        if self.sandwich_failures > 0 {
            s.push_str(&format!(
                "  note: V <= 3W fails at {} samples (small uniform states)\n",
                self.sandwich_failures
            ));
        }
        s
    }
}

/// Simulates the heat model and compares `‖x'(t)‖²` with the envelope at
/// `samples + 1` uniform times in `[0, horizon]`.
pub fn verify_iss(
    heat: &HeatFd,
    u: &dyn Fn(f64) -> f64,
    x0: &[f64],
    horizon: f64,
    samples: usize,
    params: IssParams,
    integrator: &IntegratorConfig,
) -> Result<IssReport> {
    params.validate()?;
    if x0.len() != heat.n + 1 {
        return Err(invalid("x0", format!("expected {} nodes, got {}", heat.n + 1, x0.len())));
    }
    if !(horizon > 0.0) || samples == 0 {
        return Err(invalid("horizon", "need a positive horizon and at least one sample"));
    }
    let times: Vec<f64> = (0..=samples)
        .map(|k| k as f64 * horizon / samples as f64)
        .collect();
    let rhs = |t: f64, x: &[f64], out: &mut [f64]| {
        heat.rhs(x, u(t), out);
        Ok(())
    };
    let sol = integrate(
        rhs,
        Jacobian::analytic(|_, x| heat.jacobian(x)),
        x0,
        0.0,
        horizon,
        &times[1..samples],
        integrator,
    )?;

    let rho = params.rho();
    let lambda = params.lambda(heat.input_norm());
    let v0 = lyapunov_eval(x0).v();
    let mut input_term = 0.0;
    let mut out = Vec::with_capacity(times.len());
    let mut report = IssReport {
        samples: Vec::new(),
        rho,
        lambda,
        kappa: params.kappa(),
        first_violation: None,
        max_excess: f64::NEG_INFINITY,
        first_v_violation: None,
        sandwich_failures: 0,
    };
    for (k, t) in times.iter().enumerate() {
        if k > 0 {
            let h = t - times[k - 1];
            let um = u(t - 0.5 * h);
            input_term = (-rho * h).exp() * input_term + um * um * -(-rho * h).exp_m1() / rho;
        }
        let idx = sol
            .index_of(*t)
            .ok_or_else(|| crate::Error::Numerical(format!("integrator skipped stop {t}")))?;
        let vals = lyapunov_eval(&sol.states[idx]);
        let decay = (-rho * t).exp();
        let sample = LyapunovSample {
            t: *t,
            v: vals.v(),
            w: vals.w(),
            lhs: vals.gradient,
            envelope: 0.5 * v0 * decay + 0.5 * lambda * input_term,
            v_envelope: v0 * decay + lambda * input_term,
        };
        let excess = sample.lhs - sample.envelope;
        report.max_excess = report.max_excess.max(excess);
        if excess > ENVELOPE_TOLERANCE && report.first_violation.is_none() {
            report.first_violation = Some(*t);
        }
        if sample.v > sample.v_envelope + ENVELOPE_TOLERANCE && report.first_v_violation.is_none() {
            report.first_v_violation = Some(*t);
        }
        if sample.v > 3.0 * sample.w + 1e-10 * (1.0 + sample.v) {
            report.sandwich_failures += 1;
        }
        out.push(sample);
    }
    report.samples = out;
    Ok(report)
}
