//! Sufficient conditions for L∞-BIBO stability of a semilinear diagonal
//! system, collected into a [`BiboCertificate`].
//!
//! The chain is: the extended linear system `Σ(A, [B I], [C; I])` must be
//! BIBO (three linear conditions plus exponential stability), and the
//! Lipschitz constant of the nonlinearity must beat the admissibility
//! constant of `(-A)^α`, either through the generic bound
//! `M_α Γ(1-α) / δ^{1-α}` or, for the reactor at `α = 1/2`, through the
//! equivalent inequality `max{ψ/ε, e} < 2eδ/π`.

use std::f64::consts::{E, PI};
use std::fmt::Write as _;

use statrs::function::gamma::{gamma, gamma_li};

use crate::error::{invalid, Error, Result};
use crate::spectral::{
    check_exponent, reactor_half_constant, DualCoefficientSequence, ReactorSpectrum,
    RieszSpectralOperator,
};

/// Minimum sequence length for the decay-rate fits.
pub const MIN_COEFFICIENTS: usize = 16;

/// Decay exponents at or below this are treated as divergent.
const DIVERGENCE_EXPONENT: f64 = 1.05;

/// Resolution of the ε search.
pub const EPSILON_RESOLUTION: f64 = 1e-3;

fn check_len(len: usize) -> Result<()> {
    if len < MIN_COEFFICIENTS {
        return Err(Error::InsufficientData {
            needed: MIN_COEFFICIENTS,
            got: len,
        });
    }
    Ok(())
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Infimum `η*` of the exponents for which `Σ |b_n|² / |λ_n|^{2η}` converges.
///
/// Fits `|b_n|² ~ |λ_n|^p` and `|λ_n| ~ n^q` over the upper three quarters of
/// the sequence; the sum then behaves like `Σ n^{q(p - 2η)}`, which converges
/// iff `η > (p + 1/q)/2`. Negative estimates are clamped to zero.
pub fn membership_exponent(b: &DualCoefficientSequence, eigenvalues: &[f64]) -> Result<f64> {
    let len = b.len().min(eigenvalues.len());
    check_len(len)?;
    let start = (len / 4).max(1);
    let mut log_n = Vec::new();
    let mut log_mu = Vec::new();
    let mut log_b = Vec::new();
    let mut log_mu_nonzero = Vec::new();
    for n in start..len {
        let mu = -eigenvalues[n];
        if mu <= 0.0 {
            return Err(Error::SingularMode(n));
        }
        log_n.push((n as f64).ln());
        log_mu.push(mu.ln());
        let b2 = b.coeffs[n] * b.coeffs[n];
        if b2 > 0.0 {
            log_b.push(b2.ln());
            log_mu_nonzero.push(mu.ln());
        }
    }
    if log_b.len() < 4 {
        return Ok(0.0);
    }
    let q = slope(&log_n, &log_mu);
    let p = slope(&log_mu_nonzero, &log_b);
    Ok(((p + 1.0 / q) / 2.0).max(0.0))
}

/// Whether the declared exponent of `b` lies above the estimated threshold.
pub fn is_member(b: &DualCoefficientSequence, eigenvalues: &[f64]) -> Result<bool> {
    Ok(b.eta > membership_exponent(b, eigenvalues)?)
}

/// A truncated series together with a tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesBound {
    pub partial_sum: f64,
    pub tail_bound: f64,
    /// Fitted power-law decay exponent of the terms.
    pub decay_exponent: f64,
    pub finite: bool,
}

impl SeriesBound {
    pub fn upper(&self) -> f64 {
        self.partial_sum + self.tail_bound
    }
}

/// Bounds `Σ_{n≥0} t_n` from the first `N` non-negative terms.
///
/// A power law `K n^{-s}` is fitted to the upper half of the terms and scaled
/// to dominate every term there; if `s > 1` the remainder is bounded by the
/// integral comparison `K (N-1)^{1-s} / (s-1)`.
pub fn series_bound(terms: &[f64]) -> Result<SeriesBound> {
    check_len(terms.len())?;
    let n_terms = terms.len();
    let partial_sum: f64 = terms.iter().sum();
    let start = (n_terms / 2).max(1);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (start..n_terms)
        .filter(|&n| terms[n] > 0.0)
        .map(|n| ((n as f64).ln(), terms[n].ln()))
        .unzip();
    if xs.len() < 4 {
        return Ok(SeriesBound {
            partial_sum,
            tail_bound: 0.0,
            decay_exponent: f64::INFINITY,
            finite: true,
        });
    }
    let s = -slope(&xs, &ys);
    if s <= DIVERGENCE_EXPONENT {
        return Ok(SeriesBound {
            partial_sum,
            tail_bound: f64::INFINITY,
            decay_exponent: s,
            finite: false,
        });
    }
    let log_k = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y + s * x)
        .fold(f64::NEG_INFINITY, f64::max);
    let last = (n_terms - 1) as f64;
    let tail_bound = (log_k + (1.0 - s) * last.ln()).exp() / (s - 1.0);
    Ok(SeriesBound {
        partial_sum,
        tail_bound,
        decay_exponent: s,
        finite: true,
    })
}

/// `Σ |b_n c_n| / |λ_n|`, the diagonal criterion for BIBO stability of
/// `Σ(A, B, C)`.
pub fn diagonal_bibo_sum(b: &[f64], c: &[f64], eigenvalues: &[f64]) -> Result<SeriesBound> {
    if b.len() != c.len() || b.len() != eigenvalues.len() {
        return Err(Error::DimensionMismatch {
            expected: eigenvalues.len(),
            got: b.len().min(c.len()),
        });
    }
    let mut terms = Vec::with_capacity(b.len());
    for (n, ((bn, cn), l)) in b.iter().zip(c).zip(eigenvalues).enumerate() {
        if *l == 0.0 {
            return Err(Error::SingularMode(n));
        }
        terms.push((bn * cn).abs() / l.abs());
    }
    series_bound(&terms)
}

/// Infinite-time admissibility bound `M_α Γ(1-α) / δ^{1-α}` of `(-A)^α`.
pub fn admissibility_bound(m_alpha: f64, alpha: f64, delta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::ExponentOutOfRange(alpha));
    }
    if !(delta > 0.0) {
        return Err(Error::Margin(format!("delta must be positive, got {delta}")));
    }
    Ok(m_alpha * gamma(1.0 - alpha) / delta.powf(1.0 - alpha))
}

/// [`admissibility_bound`] with `M_α` taken mode-wise from the operator.
pub fn admissibility_bound_for(op: &RieszSpectralOperator, alpha: f64, delta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::ExponentOutOfRange(alpha));
    }
    let m = op.analytic_constant(alpha, delta)?;
    admissibility_bound(m.value, alpha, delta)
}

/// Finite-time constant `M_α ∫_0^t s^{-α} e^{-δ s} ds`, written through the
/// lower incomplete gamma function.
pub fn finite_time_admissibility(m_alpha: f64, alpha: f64, delta: f64, t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::ExponentOutOfRange(alpha));
    }
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let a = 1.0 - alpha;
    if delta == 0.0 {
        return Ok(m_alpha * t.powf(a) / a);
    }
    if alpha == 0.0 {
        return Ok(m_alpha * -(-delta * t).exp_m1() / delta);
    }
    Ok(m_alpha * gamma_li(a, delta * t) / delta.powf(a))
}

/// Upper bound on the infinite-time admissibility constant of `(-A)^α B`
/// measured in `X`: each mode obeys `|x_n| ≤ μ_n^{α-1} |b_n| ‖u‖_∞`.
pub fn input_admissibility_upper(
    op: &RieszSpectralOperator,
    b: &[f64],
    alpha: f64,
) -> Result<SeriesBound> {
    check_exponent(alpha)?;
    let terms: Vec<f64> = b
        .iter()
        .enumerate()
        .map(|(n, bn)| (bn * op.power(n, alpha) / (-op.eigenvalues()[n])).powi(2))
        .collect();
    let s = series_bound(&terms)?;
    Ok(SeriesBound {
        partial_sum: s.partial_sum.sqrt(),
        tail_bound: s.upper().sqrt() - s.partial_sum.sqrt(),
        ..s
    })
}

/// Constant `κ` with `|Σ c_n x_n| ≤ κ ‖x‖_α` (Cauchy–Schwarz in `X_α`).
pub fn output_bound(op: &RieszSpectralOperator, c: &[f64], alpha: f64) -> Result<SeriesBound> {
    check_exponent(alpha)?;
    let terms: Vec<f64> = c
        .iter()
        .enumerate()
        .map(|(n, cn)| (cn / op.power(n, alpha)).powi(2))
        .collect();
    let s = series_bound(&terms)?;
    Ok(SeriesBound {
        partial_sum: s.partial_sum.sqrt(),
        tail_bound: s.upper().sqrt() - s.partial_sum.sqrt(),
        ..s
    })
}

/// Slack `2eδ/π - max{ψ/ε, e}` of the reactor inequality.
pub fn appli_slack(psi: f64, epsilon: f64, delta: f64) -> f64 {
    2.0 * E * delta / PI - (psi / epsilon).max(E)
}

/// `max{ψ/ε, e} < 2eδ/π` for `δ ∈ [ε, ψ - ε]`.
pub fn check_appli_inequality(psi: f64, epsilon: f64, delta: f64) -> Result<bool> {
    if !(epsilon > 0.0) {
        return Err(invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    // Small relative slack so that δ = ψ - ε survives rounding.
    let tol = 1e-12 * psi.abs().max(1.0);
    if delta < epsilon - tol || delta > psi - epsilon + tol {
        return Err(Error::Margin(format!(
            "delta = {delta} outside [epsilon, psi - epsilon] = [{epsilon}, {}]",
            psi - epsilon
        )));
    }
    Ok(appli_slack(psi, epsilon, delta) > 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasiblePair {
    pub epsilon: f64,
    pub delta: f64,
    pub slack: f64,
}

/// Searches `{0 < ε, ε ≤ δ ≤ ψ - ε}` for the pair maximising the slack of
/// [`check_appli_inequality`].
///
/// For fixed ε the slack grows with δ, so `δ = ψ - ε`; the remaining function
/// of ε is concave (a linear term minus a maximum of convex terms), so a
/// golden-section search finds the maximiser, which is then snapped to the
/// ε grid.
pub fn feasibility_search(psi: f64) -> Option<FeasiblePair> {
    if !(psi > 0.0 && psi.is_finite()) {
        return None;
    }
    let upper = psi / 2.0;
    if upper < EPSILON_RESOLUTION {
        return None;
    }
    let slack = |eps: f64| appli_slack(psi, eps, psi - eps);
    let (mut a, mut b) = (EPSILON_RESOLUTION, upper);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (slack(c), slack(d));
    while b - a > 1e-9 * upper.max(1.0) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = slack(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = slack(d);
        }
    }
    let mid = 0.5 * (a + b);
    let grid = |k: f64| (k * EPSILON_RESOLUTION).clamp(EPSILON_RESOLUTION, upper);
    let k = (mid / EPSILON_RESOLUTION).floor();
    let best = [grid(k), grid(k + 1.0), mid.clamp(EPSILON_RESOLUTION, upper)]
        .into_iter()
        .map(|eps| (eps, slack(eps)))
        .fold((0.0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    (best.1 > 0.0).then(|| FeasiblePair {
        epsilon: best.0,
        delta: psi - best.0,
        slack: best.1,
    })
}

/// Inputs to the extended-system check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedSystemParts {
    /// `Σ |b_n c_n| / |λ_n|`.
    pub io_sum: SeriesBound,
    /// Estimated `η*` of the input coefficients (`B ∈ X_{-η}` for `η > η*`).
    pub input_exponent: f64,
    /// Estimated `η*` of the output coefficients.
    pub output_exponent: f64,
    pub alpha: f64,
    pub omega: f64,
}

impl ExtendedSystemParts {
    pub fn from_operator(
        op: &RieszSpectralOperator,
        b: &[f64],
        c: &[f64],
        alpha: f64,
    ) -> Result<Self> {
        let eig = op.eigenvalues();
        Ok(Self {
            io_sum: diagonal_bibo_sum(b, c, eig)?,
            input_exponent: membership_exponent(&DualCoefficientSequence::new(b.to_vec(), 1.0), eig)?,
            output_exponent: membership_exponent(&DualCoefficientSequence::new(c.to_vec(), 0.5), eig)?,
            alpha,
            omega: op.omega(),
        })
    }
}

/// Per-condition verdict for BIBO stability of `Σ(A, [B I], [C; I])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedSystemVerdict {
    pub bibo_abc: bool,
    pub input_admissible: bool,
    /// `(-A)^α B` admissible, needed by the Lipschitz theorem.
    pub shifted_input_admissible: bool,
    pub bibo_aic: bool,
    pub exponentially_stable: bool,
    pub reasons: Vec<String>,
}

impl ExtendedSystemVerdict {
    pub fn holds(&self) -> bool {
        self.bibo_abc
            && self.input_admissible
            && self.shifted_input_admissible
            && self.bibo_aic
            && self.exponentially_stable
    }
}

pub fn extended_system_certificate(parts: &ExtendedSystemParts) -> ExtendedSystemVerdict {
    let mut reasons = Vec::new();
    let bibo_abc = parts.io_sum.finite;
    if !bibo_abc {
        reasons.push(format!(
            "BIBO of (A,B,C): Σ|b_n c_n|/|λ_n| diverges (decay exponent {:.3})",
            parts.io_sum.decay_exponent
        ));
    }
    let input_admissible = parts.input_exponent < 1.0;
    if !input_admissible {
        reasons.push(format!(
            "admissibility of B: B lies only in X_-η for η > {:.3} >= 1",
            parts.input_exponent
        ));
    }
    let shifted_input_admissible = parts.input_exponent + parts.alpha < 1.0;
    if !shifted_input_admissible {
        reasons.push(format!(
            "admissibility of (-A)^α B: η* + α = {:.3} >= 1",
            parts.input_exponent + parts.alpha
        ));
    }
    let bibo_aic = parts.output_exponent < 0.5;
    if !bibo_aic {
        reasons.push(format!(
            "BIBO of (A,I,C): C unbounded on X_1/2 (η* = {:.3} >= 1/2)",
            parts.output_exponent
        ));
    }
    let exponentially_stable = parts.omega > 0.0;
    if !exponentially_stable {
        reasons.push(format!("exponential stability: ω = {} is not positive", parts.omega));
    }
    ExtendedSystemVerdict {
        bibo_abc,
        input_admissible,
        shifted_input_admissible,
        bibo_aic,
        exponentially_stable,
        reasons,
    }
}

/// Empirical gains of the extended linear system and the constants needed to
/// turn them into output bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainEstimates {
    /// Step-response estimate (lower bound) of the gain from `u`.
    pub k1: f64,
    /// Step-response estimate (lower bound) of the gain from `ũ`.
    pub k2: f64,
    /// Upper bound on the admissibility constant of `(-A)^α B`.
    pub c1: f64,
    /// `|C x| ≤ trace_constant ‖x‖_α`.
    pub trace_constant: f64,
    pub f0_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateInputs {
    pub lipschitz: f64,
    pub alpha: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub m_alpha: f64,
    /// Reaction rate ψ; enables the reactor inequality.
    pub reaction_rate: Option<f64>,
    pub extended: ExtendedSystemVerdict,
    pub gains: Option<GainEstimates>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiboCertificate {
    pub lipschitz: f64,
    pub alpha: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub m_alpha: f64,
    pub c2_bound: f64,
    pub condition_thm: bool,
    pub condition_appli: Option<bool>,
    /// `K₂ L < 1`; advisory only since `K₂` is a lower-bound estimate.
    pub condition_k2: Option<bool>,
    pub extended: ExtendedSystemVerdict,
    pub gains: Option<GainEstimates>,
    /// `K` of `‖y‖ ≤ K ‖u‖ + 𝔎` built from the estimated gains.
    pub output_gain: Option<f64>,
    /// `𝔎` of the same inequality.
    pub output_offset: Option<f64>,
    /// `κ C₁ / (1 - c2 L)`: output gain from rigorous constants only.
    pub rigorous_gain: Option<f64>,
    pub verdict: bool,
    pub reasons: Vec<String>,
}

pub fn check_global_lipschitz_bibo(inputs: &CertificateInputs) -> BiboCertificate {
    let mut reasons = inputs.extended.reasons.clone();
    let l = inputs.lipschitz;
    let c2_bound = admissibility_bound(inputs.m_alpha, inputs.alpha, inputs.delta)
        .unwrap_or(f64::INFINITY);
    let condition_thm = c2_bound * l < 1.0;
    if !condition_thm {
        reasons.push(format!("C2 bound times L = {} is not below 1", c2_bound * l));
    }
    let condition_appli = inputs.reaction_rate.map(|psi| {
        match check_appli_inequality(psi, inputs.epsilon, inputs.delta) {
            Ok(true) => true,
            Ok(false) => {
                reasons.push(format!(
                    "max{{ψ/ε, e}} = {} is not below 2eδ/π = {}",
                    (psi / inputs.epsilon).max(E),
                    2.0 * E * inputs.delta / PI
                ));
                false
            }
            Err(e) => {
                reasons.push(e.to_string());
                false
            }
        }
    });
    let condition_k2 = inputs.gains.map(|g| g.k2 * l < 1.0);
    let lipschitz_ok = condition_thm || condition_appli == Some(true);
    let verdict = inputs.extended.holds() && lipschitz_ok;

    let contraction = c2_bound * l;
    let (output_gain, output_offset, rigorous_gain) = match inputs.gains {
        Some(g) if contraction < 1.0 => {
            let amp = 1.0 / (1.0 - contraction);
            (
                Some(g.k1 + g.k2 * l * g.c1 * amp),
                Some((g.k2 + g.k2 * contraction * amp) * g.f0_norm),
                Some(g.trace_constant * g.c1 * amp),
            )
        }
        _ => (None, None, None),
    };
    BiboCertificate {
        lipschitz: l,
        alpha: inputs.alpha,
        delta: inputs.delta,
        epsilon: inputs.epsilon,
        m_alpha: inputs.m_alpha,
        c2_bound,
        condition_thm,
        condition_appli,
        condition_k2,
        extended: inputs.extended.clone(),
        gains: inputs.gains,
        output_gain,
        output_offset,
        rigorous_gain,
        verdict,
        reasons,
    }
}

impl BiboCertificate {
    /// `key=value` lines, one per field; floats use the shortest exact
    /// representation so equal certificates serialize identically.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        let opt_b = |b: Option<bool>| b.map_or("n/a".to_string(), |b| b.to_string());
        let opt_f = |f: Option<f64>| f.map_or("n/a".to_string(), |f| format!("{f:?}"));
        put("verdict", self.verdict.to_string());
        put("lipschitz_L", format!("{:?}", self.lipschitz));
        put("alpha", format!("{:?}", self.alpha));
        put("delta", format!("{:?}", self.delta));
        put("epsilon", format!("{:?}", self.epsilon));
        put("M_alpha", format!("{:?}", self.m_alpha));
        put("c2_bound", format!("{:?}", self.c2_bound));
        put("c2_bound_times_L", format!("{:?}", self.c2_bound * self.lipschitz));
        put("condition_thm", self.condition_thm.to_string());
        put("condition_appli", opt_b(self.condition_appli));
        put("condition_k2_advisory", opt_b(self.condition_k2));
        put("extended.bibo_abc", self.extended.bibo_abc.to_string());
        put("extended.input_admissible", self.extended.input_admissible.to_string());
        put(
            "extended.shifted_input_admissible",
            self.extended.shifted_input_admissible.to_string(),
        );
        put("extended.bibo_aic", self.extended.bibo_aic.to_string());
        put(
            "extended.exponentially_stable",
            self.extended.exponentially_stable.to_string(),
        );
        put("estimate.K1", opt_f(self.gains.map(|g| g.k1)));
        put("estimate.K2", opt_f(self.gains.map(|g| g.k2)));
        put("bound.C1", opt_f(self.gains.map(|g| g.c1)));
        put("bound.trace", opt_f(self.gains.map(|g| g.trace_constant)));
        put("estimate.K", opt_f(self.output_gain));
        put("estimate.K_offset", opt_f(self.output_offset));
        put("bound.K_rigorous", opt_f(self.rigorous_gain));
        for (i, r) in self.reasons.iter().enumerate() {
            put(&format!("reason.{i}"), r.clone());
        }
        out
    }

    /// Human-readable summary.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "L-infinity BIBO certificate");
        let _ = writeln!(s, "  verdict            : {}", if self.verdict { "STABLE" } else { "not certified" });
        let _ = writeln!(s, "  L, alpha           : {}, {}", self.lipschitz, self.alpha);
        let _ = writeln!(s, "  epsilon, delta     : {}, {}", self.epsilon, self.delta);
        let _ = writeln!(s, "  M_alpha            : {:.6}", self.m_alpha);
        let _ = writeln!(s, "  C2 bound * L       : {:.6} (< 1: {})", self.c2_bound * self.lipschitz, self.condition_thm);
        if let Some(a) = self.condition_appli {
            let _ = writeln!(s, "  reactor inequality : {a}");
        }
        let e = &self.extended;
        let _ = writeln!(
            s,
            "  extended system    : BIBO(A,B,C)={} B adm.={} (-A)^a B adm.={} BIBO(A,I,C)={} exp. stable={}",
            e.bibo_abc, e.input_admissible, e.shifted_input_admissible, e.bibo_aic, e.exponentially_stable
        );
        if let (Some(k), Some(kk)) = (self.output_gain, self.output_offset) {
            let _ = writeln!(s, "  output bound       : |y| <= {k:.4} |u| + {kk:.4} (estimate)");
        }
        if let Some(k) = self.rigorous_gain {
            let _ = writeln!(s, "  rigorous gain      : {k:.4}");
        }
        for r in &self.reasons {
            let _ = writeln!(s, "  - {r}");
        }
        s
    }
}

/// Step-response gains of the extended linear system, in closed form per mode.
///
/// `k1` is the supremum of `|y| + ‖x‖_α` under a unit step in `u`; `k2` the
/// largest such supremum over unit steps of `ũ` along the first eigenvectors.
/// Both are lower bounds of the true gains.
pub fn estimate_gains(
    op: &RieszSpectralOperator,
    b: &[f64],
    c: &[f64],
    alpha: f64,
    f0_norm: f64,
) -> Result<GainEstimates> {
    let eig = op.eigenvalues();
    let horizon = 40.0 / op.omega();
    let samples = 4000;
    let mut k1: f64 = 0.0;
    for k in 0..=samples {
        let t = horizon * (k as f64 / samples as f64).powi(2);
        let (mut y, mut xa) = (0.0, 0.0);
        for (n, l) in eig.iter().enumerate() {
            let x = b[n] * (l * t).exp_m1() / l;
            y += c[n] * x;
            xa += (x * op.power(n, alpha)).powi(2);
        }
        k1 = k1.max(y.abs() + xa.sqrt());
    }
    // Mode-k response to ũ = φ_k is monotone, so its supremum is the limit.
    let k2 = (0..eig.len().min(10))
        .map(|n| {
            let mu = -eig[n];
            c[n].abs() / mu + op.power(n, alpha) / mu
        })
        .fold(0.0, f64::max);
    Ok(GainEstimates {
        k1,
        k2,
        c1: input_admissibility_upper(op, b, alpha)?.upper(),
        trace_constant: output_bound(op, c, alpha)?.upper(),
        f0_norm,
    })
}

/// Full certification of the reactor instance with nonlinearity Lipschitz
/// constant `lipschitz` at `α = 1/2`.
pub fn certify_reactor(
    spectrum: &ReactorSpectrum,
    modes: usize,
    lipschitz: f64,
    epsilon: f64,
    delta: f64,
) -> Result<BiboCertificate> {
    let op = spectrum.operator(modes)?;
    let alpha = 0.5;
    let b = spectrum.input_coefficients(modes);
    let c = spectrum.output_coefficients(modes);
    let parts = ExtendedSystemParts::from_operator(&op, &b, &c, alpha)?;
    let extended = extended_system_certificate(&parts);
    let gains = estimate_gains(&op, &b, &c, alpha, 0.0)?;
    Ok(check_global_lipschitz_bibo(&CertificateInputs {
        lipschitz,
        alpha,
        delta,
        epsilon,
        m_alpha: reactor_half_constant(spectrum.psi, epsilon),
        reaction_rate: Some(spectrum.psi),
        extended,
        gains: Some(gains),
    }))
}

/// Certification of an abstract diagonal system; `M_α` is the sharp
/// constant of the operator at decay rate `delta`.
pub fn certify_diagonal(
    op: &RieszSpectralOperator,
    b: &[f64],
    c: &[f64],
    lipschitz: f64,
    alpha: f64,
    delta: f64,
) -> Result<BiboCertificate> {
    let parts = ExtendedSystemParts::from_operator(op, b, c, alpha)?;
    let extended = extended_system_certificate(&parts);
    let gains = estimate_gains(op, b, c, alpha, 0.0)?;
    Ok(check_global_lipschitz_bibo(&CertificateInputs {
        lipschitz,
        alpha,
        delta,
        epsilon: op.omega() - delta,
        m_alpha: op.analytic_constant(alpha, delta)?.value,
        reaction_rate: None,
        extended,
        gains: Some(gains),
    }))
}

/// Decay rate `δ ∈ (0, ω)` minimizing `M_α(δ) Γ(1-α) / δ^{1-α}`.
pub fn optimal_delta(op: &RieszSpectralOperator, alpha: f64) -> Result<f64> {
    let omega = op.omega();
    let cost = |d: f64| -> Result<f64> {
        admissibility_bound(op.analytic_constant(alpha, d)?.value, alpha, d)
    };
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (1e-3 * omega, (1.0 - 1e-3) * omega);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (cost(c)?, cost(d)?);
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = cost(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = cost(d)?;
        }
    }
    Ok(0.5 * (a + b))
}
