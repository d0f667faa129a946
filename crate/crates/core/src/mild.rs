//! Mild solutions of `ẋ = Ax + Bu + f(t, x)` on a modal truncation.
//!
//! Time is cut into windows short enough that the Picard map
//! `y ↦ T(·)x₀ + ∫T(·-s)(Bu(s) + f(s, y(s))) ds` contracts with factor at
//! most 1/2 in the sup-`X_α` norm. Inside a window the convolution is
//! evaluated by exponential time differencing on a uniform sub-grid, exact
//! for piecewise-constant `u` and piecewise-linear `f`.

use std::sync::Arc;

use crate::certificates::finite_time_admissibility;
use crate::error::{invalid, Error, Result};
use crate::spectral::{check_exponent, DualCoefficientSequence, ModalGrid, ModalVector, RieszSpectralOperator};
use crate::trace::Trajectory;

type ModalMap = dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync;

/// The nonlinearity `f : [0, ∞) × X_α → X` with the constants the solver
/// needs to choose its windows.
#[derive(Clone)]
pub struct Nonlinearity {
    eval: Option<Arc<ModalMap>>,
    pub alpha: f64,
    /// Lipschitz constant of `f` on the `X_α` ball of the given radius.
    pub lipschitz: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Time modulus `g(t₁, t₂)`.
    pub time_modulus: Option<Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>>,
    /// Linear-growth envelope `k(t)` with `‖f(t, x)‖ ≤ k(t)(1 + ‖x‖_α)`.
    pub growth: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    /// `sup_t ‖f(t, 0)‖_X`.
    pub f0_norm: f64,
}

impl std::fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("alpha", &self.alpha)
            .field("zero", &self.eval.is_none())
            .field("f0_norm", &self.f0_norm)
            .finish()
    }
}

impl Nonlinearity {
    pub fn zero() -> Self {
        Self {
            eval: None,
            alpha: 0.0,
            lipschitz: Arc::new(|_| 0.0),
            time_modulus: None,
            growth: None,
            f0_norm: 0.0,
        }
    }

    /// `f` given directly on modal coefficients, globally Lipschitz with
    /// constant `lipschitz`.
    pub fn modal(
        alpha: f64,
        lipschitz: f64,
        f: impl Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Result<Self> {
        check_exponent(alpha)?;
        if alpha >= 1.0 {
            return Err(Error::ExponentOutOfRange(alpha));
        }
        Ok(Self {
            eval: Some(Arc::new(f)),
            alpha,
            lipschitz: Arc::new(move |_| lipschitz),
            time_modulus: None,
            growth: None,
            f0_norm: 0.0,
        })
    }

    /// Superposition operator `x ↦ g(x(·))`, evaluated at the quadrature
    /// nodes of `grid` and projected back onto the modes.
    pub fn pointwise(
        grid: Arc<ModalGrid>,
        alpha: f64,
        lipschitz: f64,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let nodes = grid.nodes().len();
        let g0 = g(0.0);
        let mass = grid.quadrature().weights.iter().sum::<f64>();
        let mut f = Self::modal(alpha, lipschitz, move |_, x, out| {
            let mut nodal = vec![0.0; nodes];
            grid.synthesize_into(x, &mut nodal);
            nodal.iter_mut().for_each(|v| *v = g(*v));
            grid.project_into(&nodal, out);
        })?;
        f.f0_norm = g0.abs() * mass.sqrt();
        Ok(f)
    }

    /// Replaces the global constant by a local modulus `L(r)` on balls of
    /// radius `r`.
    pub fn with_local_lipschitz(mut self, l: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.lipschitz = Arc::new(l);
        self
    }

    pub fn with_growth(mut self, k: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.growth = Some(Arc::new(k));
        self
    }

    pub fn with_time_modulus(mut self, g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.time_modulus = Some(Arc::new(g));
        self
    }

    pub fn with_f0_norm(mut self, norm: f64) -> Self {
        self.f0_norm = norm;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.eval.is_none()
    }

    pub fn apply(&self, t: f64, x: &[f64], out: &mut [f64]) {
        match &self.eval {
            Some(f) => f(t, x, out),
            None => out.iter_mut().for_each(|o| *o = 0.0),
        }
    }
}

/// A bounded input together with its declared bound `‖u‖_∞`.
///
/// The bound enters the window selection; declaring it up front keeps the
/// windows independent of future input values.
pub struct InputSignal<'a> {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
    pub bound: f64,
}

impl<'a> InputSignal<'a> {
    pub fn new(bound: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'a) -> Self {
        Self { f: Box::new(f), bound }
    }

    pub fn zero() -> Self {
        Self::new(0.0, |_| 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(c.abs(), move |_| c)
    }

    pub fn at(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    fn checked_at(&self, t: f64) -> Result<f64> {
        let u = self.at(t);
        if !u.is_finite() || u.abs() > self.bound * (1.0 + 1e-12) + 1e-300 {
            return Err(invalid(
                "input",
                format!("|u({t})| = {} exceeds the declared bound {}", u.abs(), self.bound),
            ));
        }
        Ok(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MildConfig {
    pub picard_tol: f64,
    pub max_picard: usize,
    pub divergence_threshold: f64,
    pub max_window: f64,
    pub max_substep: f64,
    pub min_substeps: usize,
}

impl Default for MildConfig {
    fn default() -> Self {
        Self {
            picard_tol: 1e-10,
            max_picard: 50,
            divergence_threshold: 1e8,
            max_window: 0.5,
            max_substep: 0.01,
            min_substeps: 16,
        }
    }
}

/// Result of one contraction window.
#[derive(Debug, Clone)]
pub struct WindowSolution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub iterations: usize,
    pub contraction_bound: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Modal coefficients on the sub-grid.
    pub trajectory: Trajectory,
    /// Blow-up time when the threshold was crossed, `None` for a solution
    /// that reached the horizon.
    pub t_max: Option<f64>,
    pub blew_up: bool,
    pub picard_iterations_min: usize,
    pub picard_iterations_max: usize,
    pub picard_iterations_mean: f64,
    pub window_min: f64,
    pub window_max: f64,
}

impl SolveReport {
    pub fn reached(&self) -> f64 {
        self.trajectory.times.last().copied().unwrap_or(0.0)
    }
}

/// Everything the window recursion needs, shared across windows.
pub struct MildProblem<'a> {
    op: &'a RieszSpectralOperator,
    b: &'a [f64],
    f: &'a Nonlinearity,
    cfg: MildConfig,
    /// `M_α` for the shift `ω/2`.
    m_alpha: f64,
    shift: f64,
    /// Bound on the `X_α` norm of the input convolution per unit `‖u‖_∞`.
    c1: f64,
}

impl<'a> MildProblem<'a> {
    pub fn new(
        op: &'a RieszSpectralOperator,
        b: &'a [f64],
        f: &'a Nonlinearity,
        cfg: MildConfig,
    ) -> Result<Self> {
        if b.len() != op.order() {
            return Err(Error::DimensionMismatch {
                expected: op.order(),
                got: b.len(),
            });
        }
        let alpha = f.alpha;
        let shift = 0.5 * op.omega();
        let m_alpha = op.analytic_constant(alpha, shift)?.value;
        let c1 = b
            .iter()
            .enumerate()
            .map(|(n, bn)| (bn * op.power(n, alpha) / -op.eigenvalues()[n]).powi(2))
            .sum::<f64>()
            .sqrt();
        Ok(Self {
            op,
            b,
            f,
            cfg,
            m_alpha,
            shift,
            c1,
        })
    }

    /// `C₂,δ = M_α ∫_0^δ s^{-α} e^{-s ω/2} ds`.
    pub fn window_constant(&self, delta: f64) -> f64 {
        finite_time_admissibility(self.m_alpha, self.f.alpha, self.shift, delta)
            .unwrap_or(f64::INFINITY)
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        self.op.interpolation_norm_unchecked(x, self.f.alpha)
    }

    /// Largest window `δ ≤ max_window` satisfying both the contraction
    /// condition `C₂,δ L(m) ≤ 1/2` and the self-mapping condition
    /// `C₂,δ (L(m)(g + m) + ‖f(0)‖) ≤ r` on the ball of radius
    /// `m = 2r + C₁ ‖u‖_∞`, `r = max(‖x₀‖_α, 1)`.
    pub fn admissible_window(&self, t0: f64, x0_norm: f64, u_bound: f64) -> f64 {
        let r = x0_norm.max(1.0);
        let m = 2.0 * r + self.c1 * u_bound;
        let l = (self.f.lipschitz)(m);
        let ok = |delta: f64| {
            let c2 = self.window_constant(delta);
            let g = self.f.time_modulus.as_ref().map_or(0.0, |g| g(t0, t0 + delta));
            c2 * l <= 0.5 && c2 * (l * (g + m) + self.f.f0_norm) <= r
        };
        if self.f.is_zero() || ok(self.cfg.max_window) {
            return self.cfg.max_window;
        }
        let (mut lo, mut hi) = (0.0, self.cfg.max_window);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// One Picard window `[t0, t0 + delta]` started from modal state `x0`.
    pub fn picard_step(
        &self,
        x0: &[f64],
        u: &InputSignal<'_>,
        t0: f64,
        delta: f64,
    ) -> Result<WindowSolution> {
        if !(delta > 0.0) {
            return Err(invalid("delta", format!("window must be positive, got {delta}")));
        }
        let m = 2.0 * self.norm(x0).max(1.0) + self.c1 * u.bound;
        let contraction_bound = self.window_constant(delta) * (self.f.lipschitz)(m);
        if contraction_bound > 0.5 {
            return Err(Error::StepSize {
                window: delta,
                factor: contraction_bound,
            });
        }
        let substeps = ((delta / self.cfg.max_substep).ceil() as usize).max(self.cfg.min_substeps);
        let h = delta / substeps as f64;
        let n = self.op.order();
        let eig = self.op.eigenvalues();

        let mut decay = Vec::with_capacity(n);
        let mut phi1 = Vec::with_capacity(n);
        let mut phi2 = Vec::with_capacity(n);
        for l in eig {
            let (e, p1, p2) = etd_coefficients(l * h);
            decay.push(e);
            phi1.push(h * p1);
            phi2.push(h * p2);
        }
        let times: Vec<f64> = (0..=substeps).map(|k| t0 + k as f64 * h).collect();
        let mut forcing = Vec::with_capacity(substeps);
        for k in 0..substeps {
            forcing.push(u.checked_at(0.5 * (times[k] + times[k + 1]))?);
        }

        let mut states = vec![x0.to_vec(); substeps + 1];
        let sweep = |states: &mut [Vec<f64>], fvals: Option<&[Vec<f64>]>| {
            for k in 0..substeps {
                let (head, tail) = states.split_at_mut(k + 1);
                let (prev, next) = (&head[k], &mut tail[0]);
                for i in 0..n {
                    let mut v = decay[i] * prev[i] + phi1[i] * self.b[i] * forcing[k];
                    if let Some(fv) = fvals {
                        v += phi1[i] * fv[k][i] + phi2[i] * (fv[k + 1][i] - fv[k][i]);
                    }
                    next[i] = v;
                }
            }
        };
        sweep(&mut states, None);
        if self.f.is_zero() {
            return Ok(WindowSolution {
                times,
                states,
                iterations: 1,
                contraction_bound,
            });
        }

        let mut fvals = vec![vec![0.0; n]; substeps + 1];
        let mut next = states.clone();
        let mut residual = f64::INFINITY;
        for iteration in 1..=self.cfg.max_picard {
            for (k, (t, x)) in times.iter().zip(&states).enumerate() {
                self.f.apply(*t, x, &mut fvals[k]);
            }
            sweep(&mut next, Some(&fvals));
            let mut scale: f64 = 1.0;
            residual = 0.0;
            for (a, b) in next.iter().zip(&states) {
                let diff: Vec<f64> = a.iter().zip(b).map(|(p, q)| p - q).collect();
                residual = residual.max(self.norm(&diff));
                scale = scale.max(self.norm(a));
            }
            std::mem::swap(&mut states, &mut next);
            if !residual.is_finite() {
                break;
            }
            if residual < self.cfg.picard_tol * scale {
                return Ok(WindowSolution {
                    times,
                    states,
                    iterations: iteration,
                    contraction_bound,
                });
            }
        }
        Err(Error::PicardNonConvergence {
            iterations: self.cfg.max_picard,
            residual,
        })
    }

    /// Concatenates windows up to `horizon`, stopping early at blow-up.
    pub fn solve(&self, x0: &[f64], u: &InputSignal<'_>, horizon: f64) -> Result<SolveReport> {
        if !(horizon >= 0.0) {
            return Err(Error::NegativeTime(horizon));
        }
        if x0.len() != self.op.order() {
            return Err(Error::DimensionMismatch {
                expected: self.op.order(),
                got: x0.len(),
            });
        }
        let mut trajectory = Trajectory::new();
        trajectory.push(0.0, x0.to_vec());
        let mut t = 0.0;
        let mut state = x0.to_vec();
        let mut iters = Vec::new();
        let (mut wmin, mut wmax) = (f64::INFINITY, 0.0f64);
        let threshold = self.cfg.divergence_threshold;
        let mut blow_up_at = None;

        while t < horizon && blow_up_at.is_none() {
            let mut delta = self.admissible_window(t, self.norm(&state), u.bound);
            if delta < 1e-14 * (1.0 + t) {
                blow_up_at = Some(t);
                break;
            }
            let remaining = horizon - t;
            if delta >= remaining || remaining - delta < 1e-12 * (1.0 + horizon) {
                delta = remaining;
            }
            let window = self.picard_step(&state, u, t, delta)?;
            wmin = wmin.min(delta);
            wmax = wmax.max(delta);
            iters.push(window.iterations);
            for (tk, xk) in window.times.into_iter().zip(window.states).skip(1) {
                let nrm = self.norm(&xk);
                if !nrm.is_finite() || nrm > threshold {
                    blow_up_at = Some(tk);
                    break;
                }
                trajectory.push(tk, xk);
            }
            t = if blow_up_at.is_none() { t + delta } else { t };
            if t >= horizon {
                t = horizon;
            }
            state = trajectory.states.last().unwrap().clone();
        }
        if blow_up_at.is_some() && self.f.growth.is_some() {
            return Err(Error::Numerical(format!(
                "solution exceeded {threshold:e} although a linear-growth envelope was supplied"
            )));
        }
        let total: usize = iters.iter().sum();
        Ok(SolveReport {
            trajectory,
            t_max: blow_up_at,
            blew_up: blow_up_at.is_some(),
            picard_iterations_min: iters.iter().copied().min().unwrap_or(0),
            picard_iterations_max: iters.iter().copied().max().unwrap_or(0),
            picard_iterations_mean: if iters.is_empty() { 0.0 } else { total as f64 / iters.len() as f64 },
            window_min: if wmin.is_finite() { wmin } else { 0.0 },
            window_max: wmax,
        })
    }
}

/// `(e^z, φ₁(z), φ₂(z))` with `φ₁(z) = (e^z - 1)/z`, `φ₂(z) = (e^z - 1 - z)/z²`.
pub fn etd_coefficients(z: f64) -> (f64, f64, f64) {
    let e = z.exp();
    if z.abs() < 1e-2 {
        // Taylor series; the truncation error is below 1e-16 for |z| < 1e-2.
        let mut p1 = 0.0;
        let mut p2 = 0.0;
        let mut term1 = 1.0;
        let mut term2 = 0.5;
        for k in 1..9 {
            p1 += term1;
            p2 += term2;
            term1 *= z / (k + 1) as f64;
            term2 *= z / (k + 2) as f64;
        }
        return (e, p1, p2);
    }
    let em1 = z.exp_m1();
    (e, em1 / z, (em1 - z) / (z * z))
}

/// Mode-wise input convolution `∫_0^t T(t-s) B u(s) ds` for `u` piecewise
/// constant on intervals of length at most `piece` (sampled at midpoints).
pub fn convolve_input_with(
    op: &RieszSpectralOperator,
    b: &DualCoefficientSequence,
    u: &InputSignal<'_>,
    t: f64,
    piece: f64,
) -> Result<ModalVector> {
    if b.eta >= 1.0 {
        return Err(Error::Regularity(b.eta));
    }
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if b.len() != op.order() {
        return Err(Error::DimensionMismatch {
            expected: op.order(),
            got: b.len(),
        });
    }
    let mut z = vec![0.0; op.order()];
    if t == 0.0 {
        return Ok(z.into());
    }
    let pieces = (t / piece).ceil().max(1.0) as usize;
    let h = t / pieces as f64;
    let coeff: Vec<(f64, f64)> = op
        .eigenvalues()
        .iter()
        .map(|l| {
            let (e, p1, _) = etd_coefficients(l * h);
            (e, h * p1)
        })
        .collect();
    for k in 0..pieces {
        let uk = u.checked_at((k as f64 + 0.5) * h)?;
        for ((zn, (e, p1)), bn) in z.iter_mut().zip(&coeff).zip(&b.coeffs) {
            *zn = e * *zn + p1 * bn * uk;
        }
    }
    Ok(z.into())
}

/// [`convolve_input_with`] on pieces of length 0.01.
pub fn convolve_input(
    op: &RieszSpectralOperator,
    b: &DualCoefficientSequence,
    u: &InputSignal<'_>,
    t: f64,
) -> Result<ModalVector> {
    convolve_input_with(op, b, u, t, 0.01)
}

/// Weighted projection of a profile `ζ ↦ x(ζ)` onto the modes of `grid`.
pub fn project_profile(grid: &ModalGrid, profile: impl Fn(f64) -> f64) -> Vec<f64> {
    let nodal: Vec<f64> = grid.nodes().iter().map(|z| profile(*z)).collect();
    let mut out = vec![0.0; grid.modes()];
    grid.project_into(&nodal, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ReactorSpectrum;
    use approx::assert_relative_eq;

    fn scalar(lambda: f64) -> RieszSpectralOperator {
        RieszSpectralOperator::from_eigenvalues(vec![lambda]).unwrap()
    }

    #[test]
    fn etd_coefficients_are_continuous_across_the_switch() {
        for z in [-1.0001e-2, -0.9999e-2, 0.9999e-2, 1.0001e-2] {
            let (_, p1, p2) = etd_coefficients(z);
            let q1 = z.exp_m1() / z;
            let q2 = (z.exp_m1() - z) / (z * z);
            assert_relative_eq!(p1, q1, max_relative = 1e-12);
            assert_relative_eq!(p2, q2, max_relative = 1e-9);
        }
        assert_eq!(etd_coefficients(0.0), (1.0, 1.0, 0.5));
    }

    #[test]
    fn free_decay_of_first_mode() {
        let op = ReactorSpectrum::default().operator(20).unwrap();
        let f = Nonlinearity::zero();
        let b = vec![0.0; 20];
        let problem = MildProblem::new(&op, &b, &f, MildConfig::default()).unwrap();
        let x0 = ModalVector::unit(20, 0);
        let w = problem.picard_step(x0.coeffs(), &InputSignal::zero(), 0.0, 0.3).unwrap();
        assert_eq!(w.iterations, 1);
        for (t, x) in w.times.iter().zip(&w.states) {
            assert_relative_eq!(x[0], (-2.8 * t).exp(), max_relative = 1e-13);
            assert!(x[1..].iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn oversized_window_is_rejected() {
        let op = scalar(-1.0);
        let f = Nonlinearity::modal(0.0, 1.0, |_, x, out| out.copy_from_slice(x)).unwrap();
        let b = [0.0];
        let problem = MildProblem::new(&op, &b, &f, MildConfig::default()).unwrap();
        assert!(matches!(
            problem.picard_step(&[1.0], &InputSignal::zero(), 0.0, 2.0),
            Err(Error::StepSize { .. })
        ));
    }

    #[test]
    fn linear_feedback_matches_shifted_exponential() {
        // ẋ = -3x + x has solution e^{-2t}
        let op = scalar(-3.0);
        let f = Nonlinearity::modal(0.0, 1.0, |_, x, out| out.copy_from_slice(x)).unwrap();
        let b = [0.0];
        let exact = (-4.0f64).exp();
        let err = |h: f64| {
            let cfg = MildConfig { max_substep: h, ..MildConfig::default() };
            let problem = MildProblem::new(&op, &b, &f, cfg).unwrap();
            let rep = problem.solve(&[1.0], &InputSignal::zero(), 2.0).unwrap();
            assert!(!rep.blew_up);
            let (t, x) = rep.trajectory.last().unwrap();
            assert_eq!(t, 2.0);
            (x[0] - exact).abs() / exact
        };
        let (coarse, fine) = (err(0.01), err(0.005));
        assert!(coarse < 1e-4, "{coarse}");
        let order = (coarse / fine).log2();
        assert!((order - 2.0).abs() < 0.1, "observed order {order}");
    }

    #[test]
    fn cubic_blow_up_time() {
        // ẋ = -x + x³, x(0) = 2 blows up at -ln(1 - 1/4)/2
        let op = scalar(-1.0);
        let f = Nonlinearity::modal(0.0, 0.0, |_, x, out| out[0] = x[0].powi(3))
            .unwrap()
            .with_local_lipschitz(|r| 3.0 * r * r);
        let b = [0.0];
        let problem = MildProblem::new(&op, &b, &f, MildConfig::default()).unwrap();
        let rep = problem.solve(&[2.0], &InputSignal::zero(), 1.0).unwrap();
        assert!(rep.blew_up);
        let exact = -0.5 * 0.75f64.ln();
        let t_max = rep.t_max.unwrap();
        assert!((t_max - exact).abs() < 1e-3 * exact, "t_max = {t_max}, exact = {exact}");
    }

    #[test]
    fn scalar_step_response_tends_to_one() {
        let op = scalar(-1.0);
        let b = DualCoefficientSequence::new(vec![1.0], 0.0);
        let z = convolve_input(&op, &b, &InputSignal::constant(1.0), 40.0).unwrap();
        assert_relative_eq!(z.coeffs()[0], 1.0, max_relative = 1e-12);
        let z = convolve_input(&op, &b, &InputSignal::zero(), 3.0).unwrap();
        assert_eq!(z.coeffs()[0], 0.0);
        let bad = DualCoefficientSequence::new(vec![1.0], 1.0);
        assert_eq!(
            convolve_input(&op, &bad, &InputSignal::zero(), 1.0),
            Err(Error::Regularity(1.0))
        );
    }

    #[test]
    fn input_above_declared_bound_is_rejected() {
        let op = scalar(-1.0);
        let b = DualCoefficientSequence::new(vec![1.0], 0.0);
        let u = InputSignal::new(0.5, |_| 1.0);
        assert!(convolve_input(&op, &b, &u, 1.0).is_err());
    }

    #[test]
    fn growth_envelope_with_divergence_is_an_error() {
        let op = scalar(-1.0);
        let f = Nonlinearity::modal(0.0, 0.0, |_, x, out| out[0] = x[0].powi(3))
            .unwrap()
            .with_local_lipschitz(|r| 3.0 * r * r)
            .with_growth(|_| 1.0);
        let b = [0.0];
        let problem = MildProblem::new(&op, &b, &f, MildConfig::default()).unwrap();
        assert!(matches!(
            problem.solve(&[2.0], &InputSignal::zero(), 1.0),
            Err(Error::Numerical(_))
        ));
    }
}
