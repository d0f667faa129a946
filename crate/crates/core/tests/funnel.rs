use bibo_funnel::fd::ReactorParams;
use bibo_funnel::funnel::{
    closed_loop_simulate, funnel_gain, funnel_law, operator_s, Backend, ClosedLoopConfig, FunnelSpec,
    ReactorNonlinearity, Reference,
};
use bibo_funnel::integrator::IntegratorConfig;
use bibo_funnel::Error;
use proptest::prelude::*;

proptest! {
    #[test]
    fn control_opposes_the_error(phi in 0.01f64..100.0, s in -0.999f64..0.999) {
        let e = s / phi;
        let u = funnel_law(e, phi).unwrap();
        prop_assert!(u * e <= 0.0);
        prop_assert!(u.abs() >= e.abs());
        prop_assert!(funnel_gain(e, phi) >= 1.0);
        prop_assert_eq!(u, -funnel_gain(e, phi) * e);
    }

    #[test]
    fn law_refuses_the_boundary(phi in 0.01f64..100.0, s in 1.0f64..3.0) {
        prop_assert!(funnel_law(s / phi, phi).is_err());
        prop_assert!(funnel_law(-s / phi, phi).is_err());
    }

    #[test]
    fn exponential_funnel_shape(t in 0.0f64..50.0) {
        let f = FunnelSpec::default();
        let phi = 1.0 / (2.0 * (-2.0 * t).exp() + 0.2);
        prop_assert!((f.phi(t) - phi).abs() < 1e-12 * phi);
        prop_assert!(f.phi_dot(t) >= 0.0);
        prop_assert!(f.phi(t) <= 5.0 && f.liminf() == 5.0);
    }
}

#[test]
fn initial_error_outside_the_funnel_is_a_hypothesis_violation() {
    let cfg = ClosedLoopConfig { x_f_init: 3.0, ..ClosedLoopConfig::default() };
    assert!(matches!(cfg.validate(), Err(Error::Hypothesis(_))));
    assert!(matches!(closed_loop_simulate(&cfg), Err(Error::Hypothesis(_))));
}

#[test]
fn linear_loop_with_constant_funnel_matches_its_closed_form() {
    // With R = 0 the tank decouples: ẏ = a1 y + a2 u and u = -e/(1-φ²e²)
    // → -e as φ → 0, so e(t) = e^{(a1 - a2) t} for y_ref ≡ 0, y(0) = 1.
    let cfg = ClosedLoopConfig {
        reactor: ReactorParams { r: 0.0, n: 20, ..ReactorParams::default() },
        funnel: FunnelSpec::Constant { phi: 1e-6 },
        reference: Reference::Constant { value: 0.0 },
        nonlinearity: ReactorNonlinearity::None,
        horizon: 2.0,
        x_f_init: 1.0,
        integrator: IntegratorConfig::default().with_tolerances(1e-10, 1e-13),
        ..ClosedLoopConfig::default()
    };
    let run = closed_loop_simulate(&cfg).unwrap();
    let t = run.trace.column("t").unwrap();
    let e = run.trace.column("e").unwrap();
    for (t, e) in t.iter().zip(&e) {
        let exact = (-3.0 * t).exp();
        assert!((e - exact).abs() < 1e-6, "t = {t}: {e} vs {exact}");
    }
}

#[test]
fn backends_agree_on_the_benchmark() {
    let fd = closed_loop_simulate(&ClosedLoopConfig { horizon: 3.0, ..ClosedLoopConfig::default() }).unwrap();
    let sp = closed_loop_simulate(&ClosedLoopConfig {
        horizon: 3.0,
        backend: Backend::Spectral { modes: 40 },
        ..ClosedLoopConfig::default()
    })
    .unwrap();
    assert!(fd.verification.holds() && sp.verification.holds());
    let a = fd.trace.column("y").unwrap();
    let b = sp.trace.column("y").unwrap();
    let gap = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    assert!(gap < 2e-3, "gap {gap}");
}

#[test]
fn operator_s_is_causal_bit_for_bit() {
    let params = ReactorParams { n: 30, ..ReactorParams::default() };
    let cfg = IntegratorConfig::default();
    let t0 = 1.5;
    let base = |t: f64| 0.3 * t.sin();
    let altered = |t: f64| if t > t0 { 0.3 * t.sin() + 0.2 } else { 0.3 * t.sin() };
    let a = operator_s(&params, ReactorNonlinearity::Saturation, &base, 0.0, 3.0, 12, &cfg).unwrap();
    let b = operator_s(&params, ReactorNonlinearity::Saturation, &altered, 0.0, 3.0, 12, &cfg).unwrap();
    for k in 0..a.times.len() {
        if a.times[k] <= t0 {
            assert_eq!(a.s[k].to_bits(), b.s[k].to_bits(), "t = {}", a.times[k]);
        }
    }
    assert_ne!(a.s.last(), b.s.last());
}
