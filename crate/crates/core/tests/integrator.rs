use bibo_funnel::integrator::{integrate, integrate_fixed, IntegratorConfig, Jacobian};
use proptest::prelude::*;

proptest! {
    #[test]
    fn one_step_is_a_stable(z in -1e6f64..0.0, h in 1e-3f64..10.0) {
        let lambda = z / h;
        let rhs = |_: f64, y: &[f64], out: &mut [f64]| {
            out[0] = lambda * y[0];
            Ok(())
        };
        let y = integrate_fixed(rhs, Jacobian::dense(), &[1.0], 0.0, h, 1).unwrap();
        prop_assert!(y[0].abs() <= 1.0 + 1e-12, "R({z}) = {}", y[0]);
    }

    #[test]
    fn damped_rotation_does_not_grow(a in -100.0f64..0.0, b in -100.0f64..100.0, h in 1e-3f64..5.0) {
        let rhs = |_: f64, y: &[f64], out: &mut [f64]| {
            out[0] = a * y[0] + b * y[1];
            out[1] = -b * y[0] + a * y[1];
            Ok(())
        };
        let y = integrate_fixed(rhs, Jacobian::dense(), &[1.0, 0.0], 0.0, h, 1).unwrap();
        prop_assert!(y[0].hypot(y[1]) <= 1.0 + 1e-12);
    }

    #[test]
    fn stops_are_hit_and_dense_output_is_accurate(lambda in -50.0f64..-0.1, s in 0.05f64..0.95) {
        let rhs = |_: f64, y: &[f64], out: &mut [f64]| {
            out[0] = lambda * y[0];
            Ok(())
        };
        let cfg = IntegratorConfig::default().with_tolerances(1e-8, 1e-12);
        let sol = integrate(rhs, Jacobian::dense(), &[1.0], 0.0, 1.0, &[s], &cfg).unwrap();
        let k = sol.index_of(s).expect("stop recorded");
        prop_assert_eq!(sol.times[k], s);
        prop_assert!((sol.states[k][0] - (lambda * s).exp()).abs() < 1e-6);
        let mid = 0.5 * s;
        prop_assert!((sol.dense(mid)[0] - (lambda * mid).exp()).abs() < 1e-5);
        prop_assert_eq!(sol.t_end(), 1.0);
    }
}

#[test]
fn tolerance_is_respected_on_a_nonlinear_problem() {
    // y' = -y², y(0) = 1 has y = 1/(1+t).
    let rhs = |_: f64, y: &[f64], out: &mut [f64]| {
        out[0] = -y[0] * y[0];
        Ok(())
    };
    for tol in [1e-4, 1e-6, 1e-8] {
        let cfg = IntegratorConfig::default().with_tolerances(tol, tol * 1e-3);
        let sol = integrate(rhs, Jacobian::dense(), &[1.0], 0.0, 5.0, &[], &cfg).unwrap();
        let err = (sol.last()[0] - 1.0 / 6.0).abs();
        assert!(err < 50.0 * tol, "tol {tol}: err {err}");
    }
}

#[test]
fn rhs_failures_shrink_the_step() {
    // The right-hand side refuses states beyond 1; the solver must back off.
    let rhs = |_: f64, y: &[f64], out: &mut [f64]| {
        if y[0] > 1.0 {
            return Err(bibo_funnel::Error::Numerical("out of domain".into()));
        }
        out[0] = 1.0 - y[0];
        Ok(())
    };
    let cfg = IntegratorConfig { h_init: Some(5.0), ..IntegratorConfig::default() };
    let sol = integrate(rhs, Jacobian::dense(), &[0.0], 0.0, 10.0, &[], &cfg).unwrap();
    assert!((sol.last()[0] - (1.0 - (-10.0f64).exp())).abs() < 1e-4);
}
