//! End-to-end experiments on the reactor and heat models.

use std::sync::Arc;

use crate::certificates::{certify_reactor, feasibility_search, BiboCertificate};
use crate::error::{Error, Result};
use crate::fd::{trapezoid, ReactorFd, ReactorParams};
use crate::funnel::ReactorNonlinearity;
use crate::integrator::{integrate, integrate_fixed, IntegratorConfig, Jacobian};
use crate::mild::{project_profile, InputSignal, MildConfig, MildProblem, Nonlinearity};
use crate::spectral::{ModalGrid, ReactorSpectrum};

/// Leading discrete eigenvalues against the closed form, plus the weighted
/// orthonormality residual of the modal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCheck {
    pub discrete: Vec<f64>,
    pub exact: Vec<f64>,
    pub relative_errors: Vec<f64>,
    pub orthonormality_residual: f64,
}

impl EigenCheck {
    pub fn max_relative_error(&self) -> f64 {
        self.relative_errors.iter().copied().fold(0.0, f64::max)
    }
}

pub fn eigen_structure(params: &ReactorParams, leading: usize, modes: usize) -> Result<EigenCheck> {
    let fd = ReactorFd::linear(*params)?;
    let spec = ReactorSpectrum::new(params.d, params.v, params.psi)?;
    let discrete: Vec<f64> = fd.discrete_spectrum()?.into_iter().take(leading).collect();
    let exact: Vec<f64> = (0..leading).map(|k| spec.eigenvalue(k)).collect();
    let relative_errors = discrete
        .iter()
        .zip(&exact)
        .map(|(d, e)| ((d - e) / e).abs())
        .collect();
    let grid = ModalGrid::new(&spec.operator(modes)?)?;
    Ok(EigenCheck {
        discrete,
        exact,
        relative_errors,
        orthonormality_residual: grid.orthonormality_residual(),
    })
}

/// Mild (spectral) against finite-difference solutions of the open-loop
/// reactor PDE with `η ≡ 0` from a uniform profile.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub times: Vec<f64>,
    /// `‖x_spectral - x_fd‖ / ‖x_fd‖` on the grid nodes.
    pub relative_l2: Vec<f64>,
    pub observation_spectral: Vec<f64>,
    pub observation_fd: Vec<f64>,
}

impl CrossValidation {
    pub fn max_error(&self) -> f64 {
        self.relative_l2.iter().copied().fold(0.0, f64::max)
    }
}

pub fn cross_validate(
    params: &ReactorParams,
    nonlinearity: ReactorNonlinearity,
    modes: usize,
    cells: usize,
    times: &[f64],
    x_init: f64,
) -> Result<CrossValidation> {
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let spec = ReactorSpectrum::new(params.d, params.v, params.psi)?;
    let op = spec.operator(modes)?;
    let grid = Arc::new(ModalGrid::new(&op)?);
    let f = match nonlinearity.function() {
        Some(g) => Nonlinearity::pointwise(grid.clone(), 0.5, nonlinearity.lipschitz(), g)?,
        None => Nonlinearity::zero(),
    };
    let b = spec.input_coefficients(modes);
    let x0 = project_profile(&grid, |_| x_init);
    let problem = MildProblem::new(&op, &b, &f, MildConfig::default())?;
    let mild = problem.solve(&x0, &InputSignal::zero(), horizon)?;

    let fine = ReactorParams { n: cells, ..*params };
    let fd = ReactorFd::new(fine, nonlinearity.function())?;
    let rhs = |_: f64, x: &[f64], out: &mut [f64]| {
        fd.pde_rhs(x, 0.0, out);
        Ok(())
    };
    let cfg = IntegratorConfig::default().with_tolerances(1e-9, 1e-12);
    let sol = integrate(
        rhs,
        Jacobian::sparse(fd.pde_sparsity()),
        &vec![x_init; cells + 1],
        0.0,
        horizon,
        times,
        &cfg,
    )?;

    let nodes = fd.nodes();
    let basis: Vec<Vec<f64>> = nodes
        .iter()
        .map(|z| (0..modes).map(|m| spec.eigenfunction(m, *z)).collect())
        .collect();
    let mut out = CrossValidation {
        times: times.to_vec(),
        relative_l2: Vec::new(),
        observation_spectral: Vec::new(),
        observation_fd: Vec::new(),
    };
    for t in times {
        let k = sol
            .index_of(*t)
            .ok_or_else(|| Error::Numerical(format!("integrator skipped stop {t}")))?;
        let x_fd = &sol.states[k];
        let coeffs = mild
            .trajectory
            .sample(*t)
            .ok_or_else(|| Error::Numerical("empty mild trajectory".into()))?;
        let x_sp: Vec<f64> = basis
            .iter()
            .map(|row| row.iter().zip(&coeffs).map(|(p, c)| p * c).sum())
            .collect();
        let diff: Vec<f64> = x_sp.iter().zip(x_fd).map(|(a, b)| (a - b).powi(2)).collect();
        let norm: Vec<f64> = x_fd.iter().map(|b| b * b).collect();
        out.relative_l2.push((trapezoid(&diff) / trapezoid(&norm)).sqrt());
        out.observation_spectral.push(*x_sp.last().unwrap());
        out.observation_fd.push(*x_fd.last().unwrap());
    }
    Ok(out)
}

/// Peak output of the semilinear reactor under constant inlet inputs,
/// compared with the certificate's bound `K c + 𝔎`.
#[derive(Debug, Clone)]
pub struct BiboProbe {
    pub certificate: BiboCertificate,
    pub amplitudes: Vec<f64>,
    pub peaks: Vec<f64>,
    pub bounds: Vec<f64>,
    /// `max(peak/c) / min(peak/c)` across amplitudes.
    pub growth_spread: f64,
}

impl BiboProbe {
    pub fn within_bounds(&self) -> bool {
        self.peaks.iter().zip(&self.bounds).all(|(p, b)| p <= b)
    }
}

pub fn bibo_probe(
    spectrum: &ReactorSpectrum,
    modes: usize,
    amplitudes: &[f64],
    horizon: f64,
) -> Result<BiboProbe> {
    let pair = feasibility_search(spectrum.psi)
        .ok_or_else(|| Error::Margin(format!("no feasible (epsilon, delta) for psi = {}", spectrum.psi)))?;
    let certificate = certify_reactor(spectrum, modes, 1.0, pair.epsilon, pair.delta)?;
    if !certificate.verdict {
        return Err(Error::Margin("certificate verdict is false".into()));
    }
    let gain = certificate.output_gain.unwrap_or(f64::INFINITY);
    let offset = certificate.output_offset.unwrap_or(f64::INFINITY);
    let op = spectrum.operator(modes)?;
    let grid = Arc::new(ModalGrid::new(&op)?);
    let f = Nonlinearity::pointwise(grid, 0.5, 1.0, crate::fd::saturation)?;
    let b = spectrum.input_coefficients(modes);
    let c = spectrum.output_coefficients(modes);
    let problem = MildProblem::new(&op, &b, &f, MildConfig::default())?;
    let mut peaks = Vec::new();
    let mut bounds = Vec::new();
    for &amp in amplitudes {
        let rep = problem.solve(&vec![0.0; modes], &InputSignal::constant(amp), horizon)?;
        if rep.blew_up {
            return Err(Error::Numerical(format!("solution diverged for amplitude {amp}")));
        }
        let peak = rep
            .trajectory
            .map(|_, x| x.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>().abs())
            .into_iter()
            .fold(0.0, f64::max);
        peaks.push(peak);
        bounds.push(gain * amp.abs() + offset);
    }
    let normalized: Vec<f64> = peaks.iter().zip(amplitudes).map(|(p, a)| p / a.abs()).collect();
    let hi = normalized.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = normalized.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(BiboProbe {
        certificate,
        amplitudes: amplitudes.to_vec(),
        peaks,
        bounds,
        growth_spread: hi / lo,
    })
}

/// Global errors of the Rosenbrock scheme on `ẏ = Λy` with `Λ` the leading
/// reactor eigenvalues, under successive halvings of the step.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderBattery {
    pub steps: Vec<usize>,
    pub errors: Vec<f64>,
    /// `error(h) / error(h/2)` per halving.
    pub factors: Vec<f64>,
    /// Same battery under adaptive control with halved tolerances.
    pub tolerances: Vec<f64>,
    pub adaptive_errors: Vec<f64>,
}

impl OrderBattery {
    pub fn mean_factor(&self) -> f64 {
        self.factors.iter().sum::<f64>() / self.factors.len() as f64
    }

    pub fn observed_order(&self) -> f64 {
        self.mean_factor().log2()
    }
}

pub fn order_battery(eigenvalues: &[f64], base_steps: usize, halvings: usize) -> Result<OrderBattery> {
    let lam = eigenvalues.to_vec();
    let horizon = 1.0;
    let y0 = vec![1.0; lam.len()];
    let exact: Vec<f64> = lam.iter().map(|l| (l * horizon).exp()).collect();
    let rhs = |_: f64, y: &[f64], out: &mut [f64]| {
        for i in 0..y.len() {
            out[i] = lam[i] * y[i];
        }
        Ok(())
    };
    let err = |y: &[f64]| {
        y.iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    for k in 0..=halvings {
        let n = base_steps << k;
        let y = integrate_fixed(rhs, Jacobian::dense(), &y0, 0.0, horizon, n)?;
        steps.push(n);
        errors.push(err(&y));
    }
    let factors = errors.windows(2).map(|w| w[0] / w[1]).collect();
    let mut tolerances = Vec::new();
    let mut adaptive_errors = Vec::new();
    for k in 0..=halvings {
        let tol = 1e-4 / (1u64 << k) as f64;
        let cfg = IntegratorConfig::default().with_tolerances(tol, tol * 1e-3);
        let sol = integrate(rhs, Jacobian::dense(), &y0, 0.0, horizon, &[], &cfg)?;
        tolerances.push(tol);
        adaptive_errors.push(err(sol.last()));
    }
    Ok(OrderBattery {
        steps,
        errors,
        factors,
        tolerances,
        adaptive_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_battery_on_reactor_eigenvalues() {
        let spec = ReactorSpectrum::default();
        let lam: Vec<f64> = (0..5).map(|k| spec.eigenvalue(k)).collect();
        let b = order_battery(&lam, 20, 3).unwrap();
        assert!(b.mean_factor() > 3.5, "{b:?}");
        assert!(b.adaptive_errors.last() < b.adaptive_errors.first());
    }
}
