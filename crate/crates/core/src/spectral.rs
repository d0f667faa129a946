//! Diagonal (Riesz-spectral) generators on a weighted L² space over [0, 1].
//!
//! States are carried as coefficient vectors in an orthonormal eigenbasis, so
//! the semigroup, the fractional powers of `-A` and the interpolation norms all
//! act mode by mode. Powers of `-λ_n` are formed in log space.

use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default number of retained modes.
pub const DEFAULT_MODES: usize = 100;

/// Gauss–Legendre nodes per panel of the composite rule.
const NODES_PER_PANEL: usize = 8;

pub type ModeFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;
pub type WeightFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Coefficients of a state in the eigenbasis, truncated at order `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalVector {
    coeffs: Vec<f64>,
}

impl ModalVector {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(order: usize) -> Self {
        Self::new(vec![0.0; order])
    }

    /// Unit coefficient on mode `n`.
    pub fn unit(order: usize, n: usize) -> Self {
        let mut v = Self::zeros(order);
        v.coeffs[n] = 1.0;
        v
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// State-space norm; Parseval in the weighted inner product.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

impl From<Vec<f64>> for ModalVector {
    fn from(coeffs: Vec<f64>) -> Self {
        Self::new(coeffs)
    }
}

/// Pairings `b_n = <z, φ_n>` of a functional (or distribution) with the
/// eigenbasis, together with a declared regularity exponent `η`, i.e. the
/// claim that `z ∈ X_{-η}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCoefficientSequence {
    pub coeffs: Vec<f64>,
    pub eta: f64,
}

impl DualCoefficientSequence {
    pub fn new(coeffs: Vec<f64>, eta: f64) -> Self {
        Self { coeffs, eta }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Truncated `Σ |b_n|² / |λ_n|^{2η}` for the declared `η`.
    pub fn weighted_sum(&self, eigenvalues: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(eigenvalues)
            .map(|(b, l)| b * b * (-2.0 * self.eta * (-l).ln()).exp())
            .sum()
    }
}

/// Value of a truncated eigen-expansion at a point, with the magnitude of the
/// last quarter of retained terms as an indicator of the unresolved tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValue {
    pub value: f64,
    pub tail_estimate: f64,
}

/// Closed-form spectral data of the convection–diffusion–reaction operator
/// `D x'' - v x' - ψ x` with homogeneous Neumann conditions on [0, 1],
/// self-adjoint under the weight `ρ(ζ) = exp(-(v/D) ζ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReactorSpectrum {
    pub d: f64,
    pub v: f64,
    pub psi: f64,
}

impl Default for ReactorSpectrum {
    fn default() -> Self {
        Self {
            d: 0.1,
            v: 0.4,
            psi: 2.8,
        }
    }
}

impl ReactorSpectrum {
    pub fn new(d: f64, v: f64, psi: f64) -> Result<Self> {
        let s = Self { d, v, psi };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("D", self.d), ("v", self.v), ("psi", self.psi)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(name, format!("must be positive, got {value}")));
            }
        }
        Ok(())
    }

    pub fn eigenvalue(&self, n: usize) -> f64 {
        if n == 0 {
            return -self.psi;
        }
        let k = n as f64 * PI;
        -(self.v * self.v + 4.0 * self.d * self.d * k * k) / (4.0 * self.d) - self.psi
    }

    pub fn weight(&self, zeta: f64) -> f64 {
        (-(self.v / self.d) * zeta).exp()
    }

    pub fn eigenfunction(&self, n: usize, zeta: f64) -> f64 {
        let (d, v) = (self.d, self.v);
        if n == 0 {
            return (v / (d * -(-v / d).exp_m1())).sqrt();
        }
        let k = n as f64 * PI;
        let amp = 2f64.sqrt() * v / (4.0 * k * k * d * d + v * v).sqrt();
        let ratio = 2.0 * k * d / v;
        amp * (v / (2.0 * d) * zeta).exp() * ((k * zeta).sin() - ratio * (k * zeta).cos())
    }

    /// Coefficients of the Neumann boundary input `B = -D δ_0`.
    pub fn input_coefficients(&self, modes: usize) -> Vec<f64> {
        // ρ(0) = 1, so the pairing is just -D φ_n(0).
        (0..modes)
            .map(|n| -self.d * self.eigenfunction(n, 0.0))
            .collect()
    }

    /// Coefficients of the point observation `C x = x(1)`.
    pub fn output_coefficients(&self, modes: usize) -> Vec<f64> {
        (0..modes).map(|n| self.eigenfunction(n, 1.0)).collect()
    }

    pub fn operator(&self, modes: usize) -> Result<RieszSpectralOperator> {
        self.validate()?;
        let spec = *self;
        RieszSpectralOperator::new(
            (0..modes).map(|n| spec.eigenvalue(n)).collect(),
            Some(Arc::new(move |n, z| spec.eigenfunction(n, z))),
            Some(Arc::new(move |z| spec.weight(z))),
        )
    }
}

/// A generator `A` with real eigenvalues `λ_0 > λ_1 > ... > λ_{N-1}`, all
/// negative, and an eigenbasis orthonormal under `<f, g>_ρ = ∫ ρ f g`.
#[derive(Clone)]
pub struct RieszSpectralOperator {
    eigenvalues: Vec<f64>,
    eigenfunction: Option<ModeFn>,
    weight: Option<WeightFn>,
}

impl fmt::Debug for RieszSpectralOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RieszSpectralOperator")
            .field("order", &self.eigenvalues.len())
            .field("omega", &self.omega())
            .field("has_eigenfunctions", &self.eigenfunction.is_some())
            .finish()
    }
}

impl RieszSpectralOperator {
    pub fn new(
        eigenvalues: Vec<f64>,
        eigenfunction: Option<ModeFn>,
        weight: Option<WeightFn>,
    ) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(invalid("eigenvalues", "at least one mode is required"));
        }
        if let Some((n, l)) = eigenvalues
            .iter()
            .enumerate()
            .find(|(_, l)| !(l.is_finite() && **l < 0.0))
        {
            return Err(Error::Margin(format!(
                "eigenvalue {n} is {l}; exponential stability needs every λ_n < 0"
            )));
        }
        if eigenvalues.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("eigenvalues", "must be strictly decreasing"));
        }
        Ok(Self {
            eigenvalues,
            eigenfunction,
            weight,
        })
    }

    /// Operator without a spatial realization (abstract diagonal system).
    pub fn from_eigenvalues(eigenvalues: Vec<f64>) -> Result<Self> {
        Self::new(eigenvalues, None, None)
    }

    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Decay rate `ω = inf_n (-λ_n)`.
    pub fn omega(&self) -> f64 {
        -self.eigenvalues[0]
    }

    pub fn has_eigenfunctions(&self) -> bool {
        self.eigenfunction.is_some()
    }

    pub fn eigenfunction(&self, n: usize, zeta: f64) -> Option<f64> {
        self.eigenfunction.as_ref().map(|phi| phi(n, zeta))
    }

    pub fn weight(&self, zeta: f64) -> f64 {
        self.weight.as_ref().map_or(1.0, |w| w(zeta))
    }

    fn check_order(&self, x: &ModalVector) -> Result<()> {
        if x.order() != self.order() {
            return Err(Error::DimensionMismatch {
                expected: self.order(),
                got: x.order(),
            });
        }
        Ok(())
    }

    /// `(-λ_n)^α`, evaluated as `exp(α ln(-λ_n))`.
    pub fn power(&self, n: usize, alpha: f64) -> f64 {
        if alpha == 0.0 {
            1.0
        } else {
            (alpha * (-self.eigenvalues[n]).ln()).exp()
        }
    }

    /// `T(t) x`.
    pub fn semigroup_apply(&self, x: &ModalVector, t: f64) -> Result<ModalVector> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        self.check_order(x)?;
        Ok(x.coeffs
            .iter()
            .zip(&self.eigenvalues)
            .map(|(c, l)| c * (l * t).exp())
            .collect::<Vec<_>>()
            .into())
    }

    /// `(-A)^α x` for `α ∈ [0, 1]`.
    pub fn fractional_power_apply(&self, x: &ModalVector, alpha: f64) -> Result<ModalVector> {
        check_exponent(alpha)?;
        self.check_order(x)?;
        Ok(x.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * self.power(n, alpha))
            .collect::<Vec<_>>()
            .into())
    }

    /// `‖x‖_α = ‖(-A)^α x‖_X`.
    pub fn interpolation_norm(&self, x: &ModalVector, alpha: f64) -> Result<f64> {
        check_exponent(alpha)?;
        self.check_order(x)?;
        Ok(self.interpolation_norm_unchecked(x.coeffs(), alpha))
    }

    pub(crate) fn interpolation_norm_unchecked(&self, coeffs: &[f64], alpha: f64) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| {
                let s = c * self.power(n, alpha);
                s * s
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Point value `Σ c_n φ_n(ζ)` of the truncated expansion.
    pub fn synthesize(&self, x: &ModalVector, zeta: f64) -> Result<PointValue> {
        if !(0.0..=1.0).contains(&zeta) {
            return Err(Error::PositionOutOfRange(zeta));
        }
        self.check_order(x)?;
        let phi = self
            .eigenfunction
            .as_ref()
            .ok_or_else(|| invalid("operator", "no eigenfunctions attached"))?;
        let terms: Vec<f64> = x
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| if *c == 0.0 { 0.0 } else { c * phi(n, zeta) })
            .collect();
        let tail_start = terms.len() - terms.len().div_ceil(4);
        Ok(PointValue {
            value: terms.iter().sum(),
            tail_estimate: terms[tail_start..].iter().map(|t| t.abs()).sum(),
        })
    }

    /// `‖(-A)^α T(t)‖ = sup_n (-λ_n)^α e^{λ_n t}` over the retained modes.
    pub fn smoothing_norm(&self, alpha: f64, t: f64) -> Result<f64> {
        check_exponent(alpha)?;
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        Ok(self
            .eigenvalues
            .iter()
            .map(|l| (alpha * (-l).ln() + l * t).exp())
            .fold(0.0, f64::max))
    }

    /// Smallest `M_α` with `‖(-A)^α T(t)‖ ≤ M_α t^{-α} e^{-δ t}` for all `t > 0`.
    ///
    /// Per mode `μ = -λ_n` the map `t ↦ μ^α t^α e^{-(μ-δ)t}` peaks at
    /// `t* = α/(μ-δ)` with value `(αμ/(e(μ-δ)))^α`; the supremum over modes is
    /// attained at the slowest one because `μ/(μ-δ)` decreases in `μ`.
    pub fn analytic_constant(&self, alpha: f64, shift: f64) -> Result<AnalyticConstant> {
        check_exponent(alpha)?;
        let omega = self.omega();
        if !(shift >= 0.0) {
            return Err(invalid("delta", format!("must be non-negative, got {shift}")));
        }
        if alpha == 0.0 {
            if shift > omega {
                return Err(Error::Margin(format!(
                    "shift {shift} exceeds the decay rate {omega}"
                )));
            }
            return Ok(AnalyticConstant {
                value: 1.0,
                mode: 0,
                peak_time: 0.0,
            });
        }
        if shift >= omega {
            return Err(Error::Margin(format!(
                "shift {shift} must stay below the decay rate {omega}"
            )));
        }
        let mut best = AnalyticConstant {
            value: 0.0,
            mode: 0,
            peak_time: 0.0,
        };
        for (n, l) in self.eigenvalues.iter().enumerate() {
            let mu = -l;
            let log_value = alpha * (alpha.ln() - 1.0 + mu.ln() - (mu - shift).ln());
            let value = log_value.exp();
            if value > best.value {
                best = AnalyticConstant {
                    value,
                    mode: n,
                    peak_time: alpha / (mu - shift),
                };
            }
        }
        Ok(best)
    }
}

/// `M_α` together with the mode and time at which the bound is tight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticConstant {
    pub value: f64,
    pub mode: usize,
    pub peak_time: f64,
}

pub(crate) fn check_exponent(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::ExponentOutOfRange(alpha));
    }
    Ok(())
}

/// Composite Gauss–Legendre rule on [0, 1] with the inner-product weight
/// folded into the quadrature weights.
#[derive(Debug, Clone)]
pub struct WeightedQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl WeightedQuadrature {
    pub fn new(panels: usize, weight: impl Fn(f64) -> f64) -> Self {
        let rule = GaussLegendre::new(NODES_PER_PANEL).expect("fixed degree is valid");
        let h = 1.0 / panels as f64;
        let mut nodes = Vec::with_capacity(panels * NODES_PER_PANEL);
        let mut weights = Vec::with_capacity(panels * NODES_PER_PANEL);
        for p in 0..panels {
            let a = p as f64 * h;
            for &(x, w) in rule.as_node_weight_pairs() {
                let z = a + 0.5 * h * (x + 1.0);
                nodes.push(z);
                weights.push(0.5 * h * w * weight(z));
            }
        }
        Self { nodes, weights }
    }

    /// Rule resolving products of the first `modes` eigenfunctions: one panel
    /// per mode keeps at least 16 nodes per oscillation period of `sin(nπζ)`.
    pub fn for_operator(op: &RieszSpectralOperator) -> Self {
        Self::new(op.order().max(8), |z| op.weight(z))
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| w * f(*z))
            .sum()
    }
}

/// Eigenfunction values tabulated on a weighted quadrature, used to move
/// between modal coefficients and point values.
#[derive(Debug, Clone)]
pub struct ModalGrid {
    quadrature: WeightedQuadrature,
    modes: usize,
    // row-major: values[q * modes + n] = φ_n(ζ_q)
    values: Vec<f64>,
}

impl ModalGrid {
    pub fn new(op: &RieszSpectralOperator) -> Result<Self> {
        Self::with_quadrature(op, WeightedQuadrature::for_operator(op))
    }

    pub fn with_quadrature(op: &RieszSpectralOperator, quadrature: WeightedQuadrature) -> Result<Self> {
        let phi = op
            .eigenfunction
            .as_ref()
            .ok_or_else(|| invalid("operator", "no eigenfunctions attached"))?;
        let modes = op.order();
        let mut values = Vec::with_capacity(quadrature.nodes.len() * modes);
        for &z in &quadrature.nodes {
            values.extend((0..modes).map(|n| phi(n, z)));
        }
        Ok(Self {
            quadrature,
            modes,
            values,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn nodes(&self) -> &[f64] {
        &self.quadrature.nodes
    }

    pub fn quadrature(&self) -> &WeightedQuadrature {
        &self.quadrature
    }

    pub fn row(&self, q: usize) -> &[f64] {
        &self.values[q * self.modes..(q + 1) * self.modes]
    }

    /// Point values at the quadrature nodes.
    pub fn synthesize_into(&self, coeffs: &[f64], out: &mut [f64]) {
        for (q, o) in out.iter_mut().enumerate() {
            *o = self.row(q).iter().zip(coeffs).map(|(p, c)| p * c).sum();
        }
    }

    /// Weighted projection `<g, φ_n>_ρ` of nodal values.
    pub fn project_into(&self, nodal: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (q, (g, w)) in nodal.iter().zip(&self.quadrature.weights).enumerate() {
            let gw = g * w;
            for (o, p) in out.iter_mut().zip(self.row(q)) {
                *o += gw * p;
            }
        }
    }

    /// `max_{m,n} |<φ_m, φ_n>_ρ - δ_{mn}|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for m in 0..self.modes {
            for n in m..self.modes {
                let mut s = 0.0;
                for (q, w) in self.quadrature.weights.iter().enumerate() {
                    let row = self.row(q);
                    s += w * row[m] * row[n];
                }
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

/// Closed-form bound for the reactor instance at `α = 1/2`:
/// `M_{1/2} = sqrt(max{ψ/ε, e}) (2e)^{-1/2}`, valid for `δ ∈ [ε, ψ-ε]`.
pub fn reactor_half_constant(psi: f64, epsilon: f64) -> f64 {
    (psi / epsilon).max(E).sqrt() / (2.0 * E).sqrt()
}
