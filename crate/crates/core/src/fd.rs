//! Finite-difference semi-discretizations on the uniform grid `ζ_i = i/n`.
//!
//! Two models: the tubular reactor with a boundary input at the inlet
//! (optionally coupled to a stirred tank), and the Neumann heat equation
//! with cubic sink and a distributed input.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// `|x| / (|x| + 1)`.
pub fn saturation(x: f64) -> f64 {
    let a = x.abs();
    a / (a + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReactorParams {
    pub d: f64,
    pub v: f64,
    pub psi: f64,
    pub a1: f64,
    pub a2: f64,
    pub r: f64,
    pub n: usize,
}

impl Default for ReactorParams {
    fn default() -> Self {
        Self {
            d: 0.1,
            v: 0.4,
            psi: 2.8,
            a1: -1.0,
            a2: 2.0,
            r: 3.0,
            n: 100,
        }
    }
}

impl ReactorParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("D", self.d), ("v", self.v), ("psi", self.psi)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {value}")));
            }
        }
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(invalid("R", format!("must be non-negative, got {}", self.r)));
        }
        if !(self.a1.is_finite() && self.a2.is_finite()) {
            return Err(invalid("a1/a2", "must be finite"));
        }
        if self.n < 4 {
            return Err(invalid("n", format!("need at least 4 cells, got {}", self.n)));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Cell Péclet number `v h / D`.
    pub fn peclet(&self) -> f64 {
        self.v * self.h() / self.d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convection {
    Central,
    /// Second-order upwind, biased against the flow direction `v > 0`.
    Upwind,
}

/// PDE nodal values plus the tank state.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub values: Vec<f64>,
    pub x_f: f64,
}

impl GridState {
    pub fn uniform(n: usize, value: f64, x_f: f64) -> Self {
        Self {
            values: vec![value; n + 1],
            x_f,
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.push(self.x_f);
        v
    }

    pub fn from_flat(flat: &[f64]) -> Self {
        let (values, x_f) = flat.split_at(flat.len() - 1);
        Self {
            values: values.to_vec(),
            x_f: x_f[0],
        }
    }

    /// The point observation `x(1)`.
    pub fn observation(&self) -> f64 {
        discrete_observation(&self.values)
    }
}

/// `x(1)` from nodal values.
pub fn discrete_observation(values: &[f64]) -> f64 {
    *values.last().expect("grid has at least one node")
}

/// Reactor right-hand side on nodes `0..=n`.
#[derive(Debug, Clone, Copy)]
pub struct ReactorFd {
    pub params: ReactorParams,
    pub convection: Convection,
    pub nonlinearity: Option<fn(f64) -> f64>,
}

impl ReactorFd {
    /// Central convection unless the cell Péclet number reaches 2.
    pub fn new(params: ReactorParams, nonlinearity: Option<fn(f64) -> f64>) -> Result<Self> {
        params.validate()?;
        let convection = if params.peclet() < 2.0 {
            Convection::Central
        } else {
            Convection::Upwind
        };
        Ok(Self {
            params,
            convection,
            nonlinearity,
        })
    }

    pub fn saturated(params: ReactorParams) -> Result<Self> {
        Self::new(params, Some(saturation))
    }

    pub fn linear(params: ReactorParams) -> Result<Self> {
        Self::new(params, None)
    }

    pub fn with_convection(mut self, c: Convection) -> Self {
        self.convection = c;
        self
    }

    pub fn nodes(&self) -> Vec<f64> {
        let n = self.params.n;
        (0..=n).map(|i| i as f64 / n as f64).collect()
    }

    /// Derivative of the nodal values for inlet gradient `eta`.
    pub fn pde_rhs(&self, x: &[f64], eta: f64, out: &mut [f64]) {
        let p = &self.params;
        let n = p.n;
        debug_assert_eq!(x.len(), n + 1);
        let h = p.h();
        let diff = p.d / (h * h);
        // ghost values realizing x'(0) = eta and x'(1) = 0
        let at = |i: isize| -> f64 {
            if i < 0 {
                let m = (-i) as usize;
                x[m] - 2.0 * m as f64 * h * eta
            } else if i as usize > n {
                x[2 * n - i as usize]
            } else {
                x[i as usize]
            }
        };
        for i in 0..=n {
            let k = i as isize;
            let (xm, x0, xp) = (at(k - 1), x[i], at(k + 1));
            let grad = match self.convection {
                Convection::Central => (xp - xm) / (2.0 * h),
                Convection::Upwind => (3.0 * x0 - 4.0 * xm + at(k - 2)) / (2.0 * h),
            };
            let mut v = diff * (xp - 2.0 * x0 + xm) - p.v * grad - p.psi * x0;
            if let Some(f) = self.nonlinearity {
                v += f(x0);
            }
            out[i] = v;
        }
    }

    /// `reactor_rhs` on the coupled PDE-tank state.
    pub fn rhs(&self, s: &GridState, eta: f64, u: f64) -> GridState {
        let mut values = vec![0.0; s.values.len()];
        self.pde_rhs(&s.values, eta, &mut values);
        GridState {
            values,
            x_f: self.tank_rhs(s.x_f, u, s.observation()),
        }
    }

    /// `ẋ_F = a₁ x_F + a₂ u + R x(1)`.
    pub fn tank_rhs(&self, x_f: f64, u: f64, x_end: f64) -> f64 {
        self.params.a1 * x_f + self.params.a2 * u + self.params.r * x_end
    }

    /// Closed-loop right-hand side on the flat state `[x_0..x_n, x_F]`
    /// with the inlet driven by the tank, `η = x_F`.
    pub fn coupled_rhs(&self, y: &[f64], u: f64, out: &mut [f64]) {
        let n = self.params.n;
        let x_f = y[n + 1];
        self.pde_rhs(&y[..=n], x_f, &mut out[..=n]);
        out[n + 1] = self.tank_rhs(x_f, u, y[n]);
    }

    /// Column sparsity of the Jacobian of [`Self::coupled_rhs`] when `u`
    /// depends only on `x_F`.
    pub fn coupled_sparsity(&self) -> Vec<Vec<usize>> {
        let n = self.params.n;
        let reach = match self.convection {
            Convection::Central => 1,
            Convection::Upwind => 2,
        };
        let mut cols: Vec<Vec<usize>> = (0..=n)
            .map(|j| {
                let lo = j.saturating_sub(reach);
                let hi = (j + reach).min(n);
                let mut rows: Vec<usize> = (lo..=hi).collect();
                // reflections at both ends reach back into the interior
                if j <= 2 * reach {
                    rows.extend(0..=reach.min(n));
                }
                if j + 2 * reach >= n {
                    rows.extend(n.saturating_sub(reach)..=n);
                }
                if j == n {
                    rows.push(n + 1);
                }
                rows.sort_unstable();
                rows.dedup();
                rows
            })
            .collect();
        cols.push((0..=reach.min(n)).chain([n + 1]).collect());
        cols
    }

    /// Sparsity of [`Self::pde_rhs`] alone.
    pub fn pde_sparsity(&self) -> Vec<Vec<usize>> {
        let n = self.params.n;
        let mut cols = self.coupled_sparsity();
        cols.pop();
        for c in &mut cols {
            c.retain(|r| *r <= n);
        }
        cols
    }

    /// Tridiagonal coefficients `(sub, diag, sup)` of the linear operator
    /// (central convection, no nonlinearity, `η = 0`).
    pub fn linear_tridiagonal(&self) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        if self.convection != Convection::Central {
            return Err(invalid("convection", "spectrum available for central differencing only"));
        }
        let p = &self.params;
        let n = p.n;
        let h = p.h();
        let diff = p.d / (h * h);
        let conv = p.v / (2.0 * h);
        let diag = vec![-2.0 * diff - p.psi; n + 1];
        let mut sub = vec![diff + conv; n];
        let mut sup = vec![diff - conv; n];
        sup[0] = 2.0 * diff;
        sub[n - 1] = 2.0 * diff;
        Ok((sub, diag, sup))
    }

    /// Eigenvalues of the linear operator, largest first.
    ///
    /// The tridiagonal matrix has positive off-diagonal products, so a
    /// diagonal similarity makes it symmetric with off-diagonals
    /// `sqrt(sub_i sup_i)`.
    pub fn discrete_spectrum(&self) -> Result<Vec<f64>> {
        let (sub, diag, sup) = self.linear_tridiagonal()?;
        let m = diag.len();
        let mut a = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            a[(i, i)] = diag[i];
        }
        for i in 0..m - 1 {
            let prod = sub[i] * sup[i];
            if prod <= 0.0 {
                return Err(Error::Numerical("tridiagonal operator is not symmetrizable".into()));
            }
            let s = prod.sqrt();
            a[(i, i + 1)] = s;
            a[(i + 1, i)] = s;
        }
        let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
        ev.sort_by(|x, y| y.total_cmp(x));
        Ok(ev)
    }
}

/// Trapezoidal `Σ ρ(ζ_i) x_i² h` with `ρ(ζ) = e^{-vζ/D}`.
pub fn weighted_energy(params: &ReactorParams, x: &[f64]) -> f64 {
    let n = x.len() - 1;
    let h = 1.0 / n as f64;
    x.iter()
        .enumerate()
        .map(|(i, xi)| {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            let rho = (-(params.v / params.d) * i as f64 * h).exp();
            w * rho * xi * xi * h
        })
        .sum()
}

/// `∂x/∂t = x'' - x³ + b(ζ) u` on `[0, 1]` with homogeneous Neumann ends.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatFd {
    pub n: usize,
    /// Input profile sampled at the nodes.
    pub b: Vec<f64>,
}

impl HeatFd {
    pub fn new(n: usize, profile: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 4 {
            return Err(invalid("n", format!("need at least 4 cells, got {n}")));
        }
        Ok(Self {
            n,
            b: (0..=n).map(|i| profile(i as f64 / n as f64)).collect(),
        })
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| i as f64 / self.n as f64).collect()
    }

    pub fn rhs(&self, x: &[f64], u: f64, out: &mut [f64]) {
        let n = self.n;
        let inv = 1.0 / (self.h() * self.h());
        for i in 0..=n {
            let xm = if i == 0 { x[1] } else { x[i - 1] };
            let xp = if i == n { x[n - 1] } else { x[i + 1] };
            out[i] = inv * (xp - 2.0 * x[i] + xm) - x[i].powi(3) + self.b[i] * u;
        }
    }

    /// Analytic tridiagonal Jacobian as a dense matrix.
    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        let inv = 1.0 / (self.h() * self.h());
        let mut j = DMatrix::zeros(n + 1, n + 1);
        for i in 0..=n {
            j[(i, i)] = -2.0 * inv - 3.0 * x[i] * x[i];
            if i > 0 {
                j[(i, i - 1)] += if i == n { 2.0 * inv } else { inv };
            }
            if i < n {
                j[(i, i + 1)] += if i == 0 { 2.0 * inv } else { inv };
            }
        }
        j
    }

    /// `‖b‖` in `L²(0, 1)` (trapezoid).
    pub fn input_norm(&self) -> f64 {
        trapezoid(&self.b.iter().map(|b| b * b).collect::<Vec<_>>()).sqrt()
    }
}

/// Trapezoid rule for uniformly spaced samples on `[0, 1]`.
pub fn trapezoid(values: &[f64]) -> f64 {
    let n = values.len() - 1;
    let h = 1.0 / n as f64;
    let inner: f64 = values[1..n].iter().sum();
    h * (inner + 0.5 * (values[0] + values[n]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ReactorSpectrum;
    use approx::assert_relative_eq;

    fn linear() -> ReactorFd {
        ReactorFd::linear(ReactorParams::default()).unwrap()
    }

    #[test]
    fn constant_profile_decays_at_reaction_rate() {
        let fd = linear();
        let x = vec![1.7; 101];
        let mut out = vec![0.0; 101];
        fd.pde_rhs(&x, 0.0, &mut out);
        for o in out {
            assert_relative_eq!(o, -2.8 * 1.7, max_relative = 1e-12);
        }
    }

    #[test]
    fn saturation_adds_one_half_on_unit_profile() {
        let fd = ReactorFd::saturated(ReactorParams::default()).unwrap();
        let x = vec![1.0; 101];
        let mut out = vec![0.0; 101];
        fd.pde_rhs(&x, 0.0, &mut out);
        for o in out {
            assert_relative_eq!(o, -2.8 + 0.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn first_eigenfunction_is_nearly_invariant() {
        let fd = linear();
        let spec = ReactorSpectrum::default();
        let x: Vec<f64> = fd.nodes().iter().map(|z| spec.eigenfunction(1, *z)).collect();
        let mut out = vec![0.0; x.len()];
        fd.pde_rhs(&x, 0.0, &mut out);
        let lam = spec.eigenvalue(1);
        let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = out.iter().zip(&x).map(|(o, v)| (o - lam * v).abs()).fold(0.0, f64::max);
        assert!(err < 0.02 * scale * lam.abs(), "err {err}");
    }

    #[test]
    fn observation_and_coupling() {
        let fd = linear();
        let s = GridState::uniform(100, 1.0, 1.0);
        assert_eq!(s.observation(), 1.0);
        assert_eq!(GridState::uniform(100, 0.0, 0.0).observation(), 0.0);
        let d = fd.rhs(&s, s.x_f, 0.5);
        assert_relative_eq!(d.x_f, -1.0 + 2.0 * 0.5 + 3.0, max_relative = 1e-14);
        assert_eq!(GridState::from_flat(&s.to_flat()), s);
    }

    #[test]
    fn leading_eigenvalues_match_closed_form() {
        let ev = linear().discrete_spectrum().unwrap();
        let spec = ReactorSpectrum::default();
        for (k, e) in ev.iter().take(5).enumerate() {
            let exact = spec.eigenvalue(k);
            assert!(((e - exact) / exact).abs() < 0.01, "mode {k}: {e} vs {exact}");
        }
    }

    #[test]
    fn peclet_switch_selects_upwind() {
        let p = ReactorParams { d: 0.001, ..Default::default() };
        let fd = ReactorFd::linear(p).unwrap();
        assert_eq!(fd.convection, Convection::Upwind);
        assert!(fd.discrete_spectrum().is_err());
        let x = vec![2.0; 101];
        let mut out = vec![0.0; 101];
        fd.pde_rhs(&x, 0.0, &mut out);
        assert!(out.iter().all(|o| (o + 2.8 * 2.0).abs() < 1e-9));
    }

    #[test]
    fn heat_examples() {
        let heat = HeatFd::new(50, |_| 1.0).unwrap();
        let mut out = vec![0.0; 51];
        heat.rhs(&vec![0.0; 51], 0.0, &mut out);
        assert!(out.iter().all(|o| *o == 0.0));
        heat.rhs(&vec![1.5; 51], 0.0, &mut out);
        assert!(out.iter().all(|o| (o + 3.375).abs() < 1e-12));
        heat.rhs(&vec![0.0; 51], 1.0, &mut out);
        assert!(out.iter().all(|o| *o == 1.0));
        assert_relative_eq!(heat.input_norm(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn heat_jacobian_matches_differences() {
        let heat = HeatFd::new(10, |z| z).unwrap();
        let x: Vec<f64> = heat.nodes().iter().map(|z| (3.0 * z).sin()).collect();
        let j = heat.jacobian(&x);
        let mut base = vec![0.0; 11];
        heat.rhs(&x, 0.3, &mut base);
        for c in 0..11 {
            let mut xp = x.clone();
            let eps = 1e-6;
            xp[c] += eps;
            let mut out = vec![0.0; 11];
            heat.rhs(&xp, 0.3, &mut out);
            for r in 0..11 {
                let fd = (out[r] - base[r]) / eps;
                assert!((fd - j[(r, c)]).abs() < 1e-3 * (1.0 + j[(r, c)].abs()));
            }
        }
    }
}
