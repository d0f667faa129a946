use std::f64::consts::PI;

use bibo_funnel::fd::{weighted_energy, HeatFd, ReactorFd, ReactorParams};
use bibo_funnel::integrator::{integrate, IntegratorConfig, Jacobian};
use proptest::prelude::*;

fn linear_rhs_error(n: usize, k: f64) -> f64 {
    let params = ReactorParams { n, ..ReactorParams::default() };
    let fd = ReactorFd::linear(params).unwrap();
    let (d, v, psi) = (params.d, params.v, params.psi);
    let x: Vec<f64> = fd.nodes().iter().map(|z| (k * PI * z).cos()).collect();
    let mut out = vec![0.0; n + 1];
    fd.pde_rhs(&x, 0.0, &mut out);
    fd.nodes()
        .iter()
        .zip(&out)
        .map(|(z, o)| {
            let w = k * PI;
            let exact = -d * w * w * (w * z).cos() + v * w * (w * z).sin() - psi * (w * z).cos();
            (o - exact).abs()
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reactor_stencil_is_second_order(k in 1u32..5) {
        let k = k as f64;
        let ratio = linear_rhs_error(100, k) / linear_rhs_error(200, k);
        prop_assert!((ratio - 4.0).abs() < 0.3, "ratio {ratio}");
    }

    #[test]
    fn weighted_energy_decays_without_input(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
        let params = ReactorParams { n: 40, ..ReactorParams::default() };
        let fd = ReactorFd::linear(params).unwrap();
        let x0: Vec<f64> = fd.nodes().iter().map(|z| a + b * (PI * z).cos() + c * (3.0 * PI * z).cos()).collect();
        let rhs = |_: f64, x: &[f64], out: &mut [f64]| {
            fd.pde_rhs(x, 0.0, out);
            Ok(())
        };
        let stops: Vec<f64> = (1..20).map(|k| 0.1 * k as f64).collect();
        let cfg = IntegratorConfig::default().with_tolerances(1e-9, 1e-12);
        let sol = integrate(rhs, Jacobian::sparse(fd.pde_sparsity()), &x0, 0.0, 2.0, &stops, &cfg).unwrap();
        let energies: Vec<f64> = sol.states.iter().map(|x| weighted_energy(&params, x)).collect();
        for w in energies.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-6) + 1e-14);
        }
        // ψ bounds the decay rate from below: E(t) ≤ E(0) e^{-2ψt} up to discretization error.
        let e_end = *energies.last().unwrap();
        prop_assert!(e_end <= energies[0] * (-2.0 * params.psi * 2.0f64).exp() * 1.05 + 1e-14);
    }
}

#[test]
fn discrete_spectrum_converges_at_second_order() {
    let exact = -(0.4f64 * 0.4 + 4.0 * 0.01 * 4.0 * PI * PI) / 0.4 - 2.8;
    let err = |n: usize| {
        let fd = ReactorFd::linear(ReactorParams { n, ..ReactorParams::default() }).unwrap();
        (fd.discrete_spectrum().unwrap()[2] - exact).abs()
    };
    let ratio = err(50) / err(100);
    assert!((ratio - 4.0).abs() < 0.3, "ratio {ratio}");
}

#[test]
fn heat_rhs_on_constant_profiles() {
    // For a constant profile x ≡ a the cubic sink gives ẋ = -a³ exactly.
    let heat = HeatFd::new(32, |_| 1.0).unwrap();
    let mut out = vec![0.0; 33];
    heat.rhs(&[0.5; 33], 0.0, &mut out);
    assert!(out.iter().all(|v| (v + 0.125).abs() < 1e-14));
    heat.rhs(&[0.0; 33], 2.0, &mut out);
    assert!(out.iter().all(|v| (v - 2.0).abs() < 1e-14));
}
