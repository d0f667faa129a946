use std::sync::Arc;

use bibo_funnel::fd::saturation;
use bibo_funnel::mild::{InputSignal, MildConfig, MildProblem, Nonlinearity};
use bibo_funnel::spectral::{ModalGrid, ReactorSpectrum, RieszSpectralOperator};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linear_step_response_is_exact(lambda in -5.0f64..-0.5, b in -2.0f64..2.0, u in -2.0f64..2.0, x0 in -1.0f64..1.0) {
        let op = RieszSpectralOperator::from_eigenvalues(vec![lambda]).unwrap();
        let f = Nonlinearity::zero();
        let bs = [b];
        let problem = MildProblem::new(&op, &bs, &f, MildConfig::default()).unwrap();
        let rep = problem.solve(&[x0], &InputSignal::constant(u), 3.0).unwrap();
        for (t, x) in rep.trajectory.times.iter().zip(&rep.trajectory.states) {
            let exact = x0 * (lambda * t).exp() + b * u * (lambda * t).exp_m1() / lambda;
            prop_assert!((x[0] - exact).abs() < 1e-9, "t = {t}: {} vs {exact}", x[0]);
        }
    }

    #[test]
    fn refinement_does_not_change_the_solution(amp in 0.1f64..2.0, freq in 0.5f64..3.0) {
        let spec = ReactorSpectrum::default();
        let op = spec.operator(12).unwrap();
        let grid = Arc::new(ModalGrid::new(&op).unwrap());
        let f = Nonlinearity::pointwise(grid, 0.5, 1.0, saturation).unwrap();
        let b = spec.input_coefficients(12);
        let u = InputSignal::new(amp, move |t| amp * (freq * t).sin());
        let coarse = MildProblem::new(&op, &b, &f, MildConfig::default()).unwrap();
        let fine_cfg = MildConfig { max_substep: 0.0025, max_window: 0.2, ..MildConfig::default() };
        let fine = MildProblem::new(&op, &b, &f, fine_cfg).unwrap();
        let x0 = vec![0.1; 12];
        let a = coarse.solve(&x0, &u, 2.0).unwrap();
        let c = fine.solve(&x0, &u, 2.0).unwrap();
        let xa = a.trajectory.sample(2.0).unwrap();
        let xc = c.trajectory.sample(2.0).unwrap();
        let diff = xa.iter().zip(&xc).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let norm = xc.iter().map(|q| q * q).sum::<f64>().sqrt();
        prop_assert!(diff <= 1e-4 * (1.0 + norm), "diff {diff}");
    }

    #[test]
    fn solution_is_causal(t0 in 0.3f64..1.5, jump in 0.1f64..1.0) {
        let spec = ReactorSpectrum::default();
        let op = spec.operator(10).unwrap();
        let grid = Arc::new(ModalGrid::new(&op).unwrap());
        let f = Nonlinearity::pointwise(grid, 0.5, 1.0, saturation).unwrap();
        let b = spec.input_coefficients(10);
        let problem = MildProblem::new(&op, &b, &f, MildConfig::default()).unwrap();
        let base = InputSignal::new(2.0, |t| t.cos());
        let altered = InputSignal::new(2.0, move |t| if t > t0 { t.cos() + jump } else { t.cos() });
        let a = problem.solve(&vec![0.0; 10], &base, 2.0).unwrap();
        let c = problem.solve(&vec![0.0; 10], &altered, 2.0).unwrap();
        for (t, x) in a.trajectory.times.iter().zip(&a.trajectory.states) {
            if *t <= t0 {
                let y = c.trajectory.sample(*t).unwrap();
                for (p, q) in x.iter().zip(&y) {
                    prop_assert!((p - q).abs() <= 1e-9, "t = {t}");
                }
            }
        }
        let end_a = a.trajectory.last().unwrap().1.to_vec();
        let end_c = c.trajectory.last().unwrap().1.to_vec();
        prop_assert!(end_a.iter().zip(&end_c).any(|(p, q)| (p - q).abs() > 1e-6));
    }
}

#[test]
fn inputs_exceeding_their_bound_are_rejected() {
    let op = RieszSpectralOperator::from_eigenvalues(vec![-1.0]).unwrap();
    let f = Nonlinearity::zero();
    let problem = MildProblem::new(&op, &[1.0], &f, MildConfig::default()).unwrap();
    let lying = InputSignal::new(0.5, |_| 1.0);
    assert!(problem.solve(&[0.0], &lying, 1.0).is_err());
}

#[test]
fn windows_respect_the_contraction_bound() {
    let spec = ReactorSpectrum::default();
    let op = spec.operator(20).unwrap();
    let grid = Arc::new(ModalGrid::new(&op).unwrap());
    let f = Nonlinearity::pointwise(grid, 0.5, 1.0, saturation).unwrap();
    let b = spec.input_coefficients(20);
    let problem = MildProblem::new(&op, &b, &f, MildConfig::default()).unwrap();
    let delta = problem.admissible_window(0.0, 1.0, 1.0);
    assert!(delta > 0.0);
    assert!(problem.window_constant(delta) <= 0.5 + 1e-12);
}
