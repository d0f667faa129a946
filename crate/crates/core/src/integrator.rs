//! Linearly implicit Rosenbrock integrator of order 2 with an embedded
//! third-order error estimate (the `ode23s` scheme of Shampine and Reichelt).
//!
//! Each step solves three linear systems with the same matrix
//! `W = I - h d J`, `d = 1/(2 + √2)`. The Jacobian comes either from the
//! caller or from forward differences, with columns grouped so that
//! structurally independent columns share one function evaluation.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};

const D: f64 = 0.292_893_218_813_452_5; // 1/(2 + √2)
const E32: f64 = 7.414_213_562_373_095; // 6 + √2

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// First trial step; chosen from the initial slope when absent.
    pub h_init: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-6,
            atol: 1e-9,
            h_min: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 200_000,
            h_init: None,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(invalid("rtol/atol", "tolerances must be positive"));
        }
        if !(self.h_min > 0.0 && self.h_min <= self.h_max) {
            return Err(invalid("h_min", "need 0 < h_min <= h_max"));
        }
        Ok(())
    }

    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }
}

type AnalyticJacobian<'a> = dyn FnMut(f64, &[f64]) -> DMatrix<f64> + 'a;

/// Where the Jacobian `∂f/∂y` comes from.
pub enum Jacobian<'a> {
    /// Forward differences; `pattern[j]` lists the rows that column `j` can
    /// touch. `None` means dense.
    FiniteDifference { pattern: Option<Vec<Vec<usize>>> },
    Analytic(Box<AnalyticJacobian<'a>>),
}

impl<'a> Jacobian<'a> {
    pub fn dense() -> Self {
        Jacobian::FiniteDifference { pattern: None }
    }

    pub fn sparse(pattern: Vec<Vec<usize>>) -> Self {
        Jacobian::FiniteDifference {
            pattern: Some(pattern),
        }
    }

    pub fn analytic(j: impl FnMut(f64, &[f64]) -> DMatrix<f64> + 'a) -> Self {
        Jacobian::Analytic(Box::new(j))
    }
}

/// Greedy column grouping: columns in one group never touch the same row.
pub fn color_columns(pattern: &[Vec<usize>], rows: usize) -> Vec<Vec<usize>> {
    let mut groups: Vec<(Vec<usize>, Vec<bool>)> = Vec::new();
    for (j, col) in pattern.iter().enumerate() {
        let slot = groups
            .iter_mut()
            .find(|(_, used)| col.iter().all(|r| !used[*r]));
        match slot {
            Some((members, used)) => {
                members.push(j);
                col.iter().for_each(|r| used[*r] = true);
            }
            None => {
                let mut used = vec![false; rows];
                col.iter().for_each(|r| used[*r] = true);
                groups.push((vec![j], used));
            }
        }
    }
    groups.into_iter().map(|(m, _)| m).collect()
}

/// Accepted steps with derivatives, for cubic Hermite dense output.
#[derive(Debug, Clone, Default)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub derivatives: Vec<Vec<f64>>,
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub jacobian_evals: usize,
}

impl Solution {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("solution has the initial point")
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("solution has the initial point")
    }

    /// Cubic Hermite interpolant between the accepted steps bracketing `t`.
    pub fn dense(&self, t: f64) -> Vec<f64> {
        let k = self.times.partition_point(|s| *s <= t);
        if k == 0 {
            return self.states[0].clone();
        }
        if k >= self.times.len() {
            return self.last().to_vec();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        let (y0, y1) = (&self.states[k - 1], &self.states[k]);
        let (f0, f1) = (&self.derivatives[k - 1], &self.derivatives[k]);
        (0..y0.len())
            .map(|i| h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i])
            .collect()
    }

    /// Index of the accepted point at exactly `t`, if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|s| *s == t)
    }
}

struct Stepper<'r, 'j, F> {
    rhs: &'r mut F,
    jac: Jacobian<'j>,
    groups: Option<Vec<Vec<usize>>>,
    dim: usize,
    rhs_evals: usize,
    jacobian_evals: usize,
}

impl<F> Stepper<'_, '_, F>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    fn eval(&mut self, t: f64, y: &[f64], out: &mut [f64]) -> Result<()> {
        self.rhs_evals += 1;
        (self.rhs)(t, y, out)?;
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite derivative at t = {t}")));
        }
        Ok(())
    }

    fn jacobian(&mut self, t: f64, y: &[f64], f0: &[f64]) -> Result<DMatrix<f64>> {
        self.jacobian_evals += 1;
        let n = self.dim;
        if let Jacobian::Analytic(j) = &mut self.jac {
            return Ok(j(t, y));
        }
        let pattern = match &self.jac {
            Jacobian::FiniteDifference { pattern } => pattern.clone(),
            Jacobian::Analytic(_) => unreachable!(),
        };
        let groups = self
            .groups
            .clone()
            .unwrap_or_else(|| (0..n).map(|j| vec![j]).collect());
        let mut jm = DMatrix::zeros(n, n);
        let mut yp = y.to_vec();
        let mut fp = vec![0.0; n];
        let sqrt_eps = f64::EPSILON.sqrt();
        for group in &groups {
            let mut deltas: Vec<f64> = group
                .iter()
                .map(|&j| sqrt_eps * y[j].abs().max(1e-5))
                .collect();
            let mut ok = false;
            for sign in [1.0, -1.0] {
                for (&j, d) in group.iter().zip(deltas.iter_mut()) {
                    *d = sign * d.abs();
                    yp[j] = y[j] + *d;
                }
                if self.eval(t, &yp, &mut fp).is_ok() {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Err(Error::Numerical(format!(
                    "right-hand side undefined near the state at t = {t}"
                )));
            }
            for (&j, d) in group.iter().zip(&deltas) {
                yp[j] = y[j];
                let rows: Box<dyn Iterator<Item = usize>> = match &pattern {
                    Some(p) => Box::new(p[j].iter().copied()),
                    None => Box::new(0..n),
                };
                for r in rows {
                    jm[(r, j)] = (fp[r] - f0[r]) / d;
                }
            }
        }
        Ok(jm)
    }
}

/// Integrates `y' = f(t, y)` from `t0` to `t1`, landing exactly on every
/// time in `stops` that lies inside the interval.
///
/// An `Err` from `rhs` at a trial point rejects the step and shrinks `h`;
/// at an accepted point it aborts the integration.
pub fn integrate<F>(
    mut rhs: F,
    jac: Jacobian<'_>,
    y0: &[f64],
    t0: f64,
    t1: f64,
    stops: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Solution>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    cfg.validate()?;
    if !(t1 >= t0) {
        return Err(invalid("t_span", format!("need t0 <= t1, got [{t0}, {t1}]")));
    }
    let n = y0.len();
    let groups = match &jac {
        Jacobian::FiniteDifference { pattern: Some(p) } => {
            if p.len() != n || p.iter().flatten().any(|r| *r >= n) {
                return Err(Error::DimensionMismatch { expected: n, got: p.len() });
            }
            Some(color_columns(p, n))
        }
        _ => None,
    };
    let mut st = Stepper {
        rhs: &mut rhs,
        jac,
        groups,
        dim: n,
        rhs_evals: 0,
        jacobian_evals: 0,
    };
    let mut stops: Vec<f64> = stops.iter().copied().filter(|s| *s > t0 && *s < t1).collect();
    stops.push(t1);
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    let mut next_stop = 0;

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut f0 = vec![0.0; n];
    st.eval(t, &y, &mut f0)?;

    let mut sol = Solution {
        times: vec![t],
        states: vec![y.clone()],
        derivatives: vec![f0.clone()],
        ..Default::default()
    };
    if t1 == t0 {
        sol.rhs_evals = st.rhs_evals;
        return Ok(sol);
    }

    let threshold = cfg.atol / cfg.rtol;
    let span = t1 - t0;
    let mut h = match cfg.h_init {
        Some(h) => h,
        None => {
            let rh = f0
                .iter()
                .zip(&y)
                .map(|(f, y)| (f / y.abs().max(threshold)).abs())
                .fold(0.0, f64::max)
                / (0.8 * cfg.rtol.cbrt());
            let h = span.min(cfg.h_max);
            if h * rh > 1.0 {
                1.0 / rh
            } else {
                h
            }
        }
    }
    .clamp(cfg.h_min, cfg.h_max);

    let mut jm = st.jacobian(t, &y, &f0)?;
    let mut dfdt = time_derivative(&mut st, t, &y, &f0, span)?;
    let mut k1 = vec![0.0; n];
    let mut y_mid = vec![0.0; n];
    let mut f1 = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut f2 = vec![0.0; n];

    while next_stop < stops.len() {
        if sol.accepted + sol.rejected >= cfg.max_steps {
            return Err(Error::MaxSteps(cfg.max_steps));
        }
        let target = stops[next_stop];
        let mut landing = false;
        if t + h >= target || t + 1.1 * h >= target {
            h = target - t;
            landing = true;
        }
        h = h.min(cfg.h_max);

        let mut w = DMatrix::<f64>::identity(n, n);
        w -= &jm * (h * D);
        let lu = w.lu();
        let solve = |rhs_vec: Vec<f64>| -> Option<Vec<f64>> {
            lu.solve(&DVector::from_vec(rhs_vec)).map(|v| v.as_slice().to_vec())
        };

        let trial: Option<(f64, Vec<f64>)> = (|| {
            let b1: Vec<f64> = (0..n).map(|i| f0[i] + h * D * dfdt[i]).collect();
            k1 = solve(b1)?;
            for i in 0..n {
                y_mid[i] = y[i] + 0.5 * h * k1[i];
            }
            st.eval(t + 0.5 * h, &y_mid, &mut f1).ok()?;
            let b2: Vec<f64> = (0..n).map(|i| f1[i] - k1[i]).collect();
            let mut k2 = solve(b2)?;
            for i in 0..n {
                k2[i] += k1[i];
                y_new[i] = y[i] + h * k2[i];
            }
            let t_new = if landing { target } else { t + h };
            st.eval(t_new, &y_new, &mut f2).ok()?;
            let b3: Vec<f64> = (0..n)
                .map(|i| f2[i] - E32 * (k2[i] - f1[i]) - 2.0 * (k1[i] - f0[i]) + h * D * dfdt[i])
                .collect();
            let k3 = solve(b3)?;
            let err = (0..n)
                .map(|i| {
                    let e = h / 6.0 * (k1[i] - 2.0 * k2[i] + k3[i]);
                    (e / y[i].abs().max(y_new[i].abs()).max(threshold)).abs()
                })
                .fold(0.0, f64::max);
            err.is_finite().then_some((err, k2))
        })();

        match trial {
            Some((err, _)) if err <= cfg.rtol => {
                t = if landing { target } else { t + h };
                if landing {
                    next_stop += 1;
                }
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut f0, &mut f2);
                sol.times.push(t);
                sol.states.push(y.clone());
                sol.derivatives.push(f0.clone());
                sol.accepted += 1;
                let grow = 1.25 * (err / cfg.rtol).cbrt();
                h = if grow > 0.2 { h / grow } else { 5.0 * h };
                h = h.clamp(cfg.h_min, cfg.h_max);
                if next_stop < stops.len() {
                    jm = st.jacobian(t, &y, &f0)?;
                    dfdt = time_derivative(&mut st, t, &y, &f0, span)?;
                }
            }
            other => {
                sol.rejected += 1;
                if h <= cfg.h_min {
                    return Err(Error::StepUnderflow { t, h });
                }
                let shrink = match other {
                    Some((err, _)) => (0.8 * (cfg.rtol / err).cbrt()).max(0.5),
                    None => 0.25,
                };
                h = (h * shrink).max(cfg.h_min);
            }
        }
    }
    sol.rhs_evals = st.rhs_evals;
    sol.jacobian_evals = st.jacobian_evals;
    Ok(sol)
}

fn time_derivative<F>(st: &mut Stepper<'_, '_, F>, t: f64, y: &[f64], f0: &[f64], span: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let dt = f64::EPSILON.sqrt() * t.abs().max(span * 1e-3).max(1e-8);
    let mut ft = vec![0.0; y.len()];
    for sign in [-1.0, 1.0] {
        if st.eval(t + sign * dt, y, &mut ft).is_ok() {
            return Ok(ft.iter().zip(f0).map(|(a, b)| sign * (a - b) / dt).collect());
        }
    }
    Err(Error::Numerical(format!("right-hand side undefined near t = {t}")))
}

/// The same scheme with `steps` uniform steps and no error control.
pub fn integrate_fixed<F>(
    mut rhs: F,
    jac: Jacobian<'_>,
    y0: &[f64],
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    if steps == 0 {
        return Err(invalid("steps", "need at least one step"));
    }
    let n = y0.len();
    let mut st = Stepper {
        rhs: &mut rhs,
        jac,
        groups: None,
        dim: n,
        rhs_evals: 0,
        jacobian_evals: 0,
    };
    let h = (t1 - t0) / steps as f64;
    let mut y = y0.to_vec();
    let mut f0 = vec![0.0; n];
    let mut f1 = vec![0.0; n];
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        st.eval(t, &y, &mut f0)?;
        let jm = st.jacobian(t, &y, &f0)?;
        let dfdt = time_derivative(&mut st, t, &y, &f0, t1 - t0)?;
        let lu = (DMatrix::<f64>::identity(n, n) - jm * (h * D)).lu();
        let singular = || Error::Numerical("singular iteration matrix".into());
        let b1: Vec<f64> = (0..n).map(|i| f0[i] + h * D * dfdt[i]).collect();
        let k1 = lu.solve(&DVector::from_vec(b1)).ok_or_else(singular)?;
        let y_mid: Vec<f64> = (0..n).map(|i| y[i] + 0.5 * h * k1[i]).collect();
        st.eval(t + 0.5 * h, &y_mid, &mut f1)?;
        let b2: Vec<f64> = (0..n).map(|i| f1[i] - k1[i]).collect();
        let k2 = lu.solve(&DVector::from_vec(b2)).ok_or_else(singular)? + k1;
        for i in 0..n {
            y[i] += h * k2[i];
        }
    }
    Ok(y)
}
