use bibo_funnel::fd::HeatFd;
use bibo_funnel::heat_iss::{lyapunov_eval, verify_iss, IssParams};
use bibo_funnel::integrator::IntegratorConfig;
use proptest::prelude::*;

fn tight() -> IntegratorConfig {
    IntegratorConfig::default().with_tolerances(1e-8, 1e-11)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn envelope_holds_for_constant_inputs(u in -2.0f64..2.0, eps in 0.1f64..1.9, eta in 0.1f64..1.9) {
        let heat = HeatFd::new(40, |z| if z < 0.5 { 1.0 } else { 0.0 }).unwrap();
        let rep = verify_iss(&heat, &|_| u, &[0.0; 41], 3.0, 60, IssParams { epsilon: eps, eta }, &tight()).unwrap();
        prop_assert!(rep.envelope_holds(), "max excess {}", rep.max_excess);
    }

    #[test]
    fn unforced_envelope_is_monotone(a in -2.0f64..2.0, k in 1u32..4) {
        let heat = HeatFd::new(40, |_| 1.0).unwrap();
        let x0: Vec<f64> = heat.nodes().iter().map(|z| 1.0 + a * (k as f64 * std::f64::consts::PI * z).cos()).collect();
        let rep = verify_iss(&heat, &|_| 0.0, &x0, 3.0, 30, IssParams::default(), &tight()).unwrap();
        prop_assert!(rep.envelope_holds());
        for w in rep.samples.windows(2) {
            prop_assert!(w[1].envelope <= w[0].envelope);
        }
    }
}

#[test]
fn lyapunov_values_of_a_cosine() {
    // x = cos(πz): ‖x‖² = 1/2, ‖x'‖² = π²/2, ∫x⁴ = 3/8.
    let n = 2000;
    let x: Vec<f64> = (0..=n).map(|i| (std::f64::consts::PI * i as f64 / n as f64).cos()).collect();
    let l = lyapunov_eval(&x);
    assert!((l.l2 - 0.5).abs() < 1e-6);
    assert!((l.gradient - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-5);
    assert!((l.quartic - 0.375).abs() < 1e-6);
}
