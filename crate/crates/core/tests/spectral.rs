use std::f64::consts::PI;

use bibo_funnel::spectral::{ModalGrid, ModalVector, ReactorSpectrum, RieszSpectralOperator};
use proptest::prelude::*;

fn reactor(modes: usize) -> RieszSpectralOperator {
    ReactorSpectrum::default().operator(modes).unwrap()
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

#[test]
fn eigenpairs_solve_the_boundary_value_problem() {
    // Oracle: D φ'' - v φ' - ψ φ = λ φ with φ'(0) = φ'(1) = 0, checked by
    // fourth-order central differences on the closed-form φ.
    let spec = ReactorSpectrum::default();
    let (d, v, psi) = (spec.d, spec.v, spec.psi);
    let h = 1e-3;
    for n in 0..6 {
        let lambda = if n == 0 {
            -psi
        } else {
            -(v * v + 4.0 * d * d * (n * n) as f64 * PI * PI) / (4.0 * d) - psi
        };
        assert!((spec.eigenvalue(n) - lambda).abs() < 1e-12 * lambda.abs());
        let phi = |z: f64| spec.eigenfunction(n, z);
        for z in [0.1, 0.3, 0.55, 0.8, 0.95] {
            let d1 = (phi(z - 2.0 * h) - 8.0 * phi(z - h) + 8.0 * phi(z + h) - phi(z + 2.0 * h)) / (12.0 * h);
            let d2 = (-phi(z - 2.0 * h) + 16.0 * phi(z - h) - 30.0 * phi(z) + 16.0 * phi(z + h) - phi(z + 2.0 * h))
                / (12.0 * h * h);
            let residual = d * d2 - v * d1 - psi * phi(z) - lambda * phi(z);
            assert!(residual.abs() < 1e-5 * (1.0 + lambda.abs()), "n = {n}, z = {z}: {residual}");
        }
        for z in [0.0, 1.0] {
            let one_sided = if z == 0.0 {
                (-3.0 * phi(0.0) + 4.0 * phi(h) - phi(2.0 * h)) / (2.0 * h)
            } else {
                (3.0 * phi(1.0) - 4.0 * phi(1.0 - h) + phi(1.0 - 2.0 * h)) / (2.0 * h)
            };
            assert!(one_sided.abs() < 1e-3 * (1.0 + lambda.abs()), "n = {n}: phi'({z}) = {one_sided}");
        }
    }
}

#[test]
fn orthonormal_under_the_weight() {
    let grid = ModalGrid::new(&reactor(100)).unwrap();
    assert!(grid.orthonormality_residual() < 1e-8);
}

proptest! {
    #[test]
    fn semigroup_law(c in coeffs(30), t in 0.0f64..2.0, s in 0.0f64..2.0) {
        let op = reactor(30);
        let x = ModalVector::new(c);
        let lhs = op.semigroup_apply(&op.semigroup_apply(&x, s).unwrap(), t).unwrap();
        let rhs = op.semigroup_apply(&x, t + s).unwrap();
        for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
            prop_assert!((a - b).abs() <= 1e-13 * (1.0 + b.abs()));
        }
        prop_assert_eq!(op.semigroup_apply(&x, 0.0).unwrap(), x);
    }

    #[test]
    fn fractional_powers_compose(c in coeffs(20), a in 0.0f64..0.5, b in 0.0f64..0.5) {
        let op = reactor(20);
        let x = ModalVector::new(c);
        let ab = op.fractional_power_apply(&op.fractional_power_apply(&x, a).unwrap(), b).unwrap();
        let direct = op.fractional_power_apply(&x, a + b).unwrap();
        for (p, q) in ab.coeffs().iter().zip(direct.coeffs()) {
            prop_assert!((p - q).abs() <= 1e-12 * (1.0 + q.abs()));
        }
    }

    #[test]
    fn parseval_on_the_quadrature_grid(c in coeffs(24)) {
        let op = reactor(24);
        let grid = ModalGrid::new(&op).unwrap();
        let mut nodal = vec![0.0; grid.nodes().len()];
        grid.synthesize_into(&c, &mut nodal);
        let energy: f64 = nodal
            .iter()
            .zip(&grid.quadrature().weights)
            .map(|(x, w)| w * x * x)
            .sum();
        let norm2: f64 = c.iter().map(|v| v * v).sum();
        prop_assert!((energy - norm2).abs() <= 1e-9 * (1.0 + norm2));
        let mut back = vec![0.0; 24];
        grid.project_into(&nodal, &mut back);
        for (p, q) in back.iter().zip(&c) {
            prop_assert!((p - q).abs() <= 1e-9);
        }
    }

    #[test]
    fn smoothing_bound_holds(
        c in coeffs(40),
        alpha in 0.0f64..1.0,
        frac in 0.0f64..0.95,
        t in 0.01f64..5.0,
    ) {
        let op = reactor(40);
        let delta = frac * op.omega();
        let m = op.analytic_constant(alpha, delta).unwrap().value;
        let x = ModalVector::new(c);
        let lhs = op
            .interpolation_norm(&op.semigroup_apply(&x, t).unwrap(), alpha)
            .unwrap();
        let rhs = m * t.powf(-alpha) * (-delta * t).exp() * x.norm();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300);
        prop_assert!(op.smoothing_norm(alpha, t).unwrap() <= m * t.powf(-alpha) * (-delta * t).exp() * (1.0 + 1e-12));
    }
}

#[test]
fn reactor_half_constant_matches_its_closed_form() {
    // M_{1/2} = sqrt(max(ψ/ε, e)) / sqrt(2e) at ψ = 2.8, ε = 1.
    let m = bibo_funnel::spectral::reactor_half_constant(2.8, 1.0);
    assert!((m - (2.8f64).sqrt() / (2.0 * std::f64::consts::E).sqrt()).abs() < 1e-15);
    assert!((m - 0.71766).abs() < 1e-5);
    // The sharp operator constant at δ = ε never exceeds the closed form.
    let sharp = reactor(100).analytic_constant(0.5, 1.0).unwrap().value;
    assert!(sharp <= m + 1e-12);
}
