//! The Rosenbrock integrator on stiff problems: Robertson's chemical
//! kinetics with a dense Jacobian, and the order battery on reactor modes.

use bibo_funnel::integrator::{integrate, IntegratorConfig, Jacobian};
use bibo_funnel::scenarios::order_battery;
use bibo_funnel::spectral::ReactorSpectrum;

fn main() -> bibo_funnel::Result<()> {
    let robertson = |_: f64, y: &[f64], out: &mut [f64]| {
        out[0] = -0.04 * y[0] + 1e4 * y[1] * y[2];
        out[1] = 0.04 * y[0] - 1e4 * y[1] * y[2] - 3e7 * y[1] * y[1];
        out[2] = 3e7 * y[1] * y[1];
        Ok(())
    };
    let cfg = IntegratorConfig::default().with_tolerances(1e-6, 1e-10);
    let sol = integrate(robertson, Jacobian::dense(), &[1.0, 0.0, 0.0], 0.0, 40.0, &[0.4, 4.0], &cfg)?;
    println!(
        "Robertson on [0, 40]: {} accepted, {} rejected steps, {} Jacobians",
        sol.accepted, sol.rejected, sol.jacobian_evals
    );
    for t in [0.4, 4.0, 40.0] {
        let y = &sol.states[sol.index_of(t).unwrap()];
        println!("  t = {t:<5} y = [{:.6e}, {:.6e}, {:.6e}]  sum - 1 = {:.1e}", y[0], y[1], y[2], y.iter().sum::<f64>() - 1.0);
    }

    let spec = ReactorSpectrum::default();
    let lam: Vec<f64> = (0..5).map(|k| spec.eigenvalue(k)).collect();
    let battery = order_battery(&lam, 20, 3)?;
    println!("\nfixed-step battery on y' = diag(lambda_0..4) y:");
    for (n, e) in battery.steps.iter().zip(&battery.errors) {
        println!("  {n:>4} steps: error {e:.3e}");
    }
    println!(
        "  mean reduction per halving {:.3} (observed order {:.3})",
        battery.mean_factor(),
        battery.observed_order()
    );
    for (tol, e) in battery.tolerances.iter().zip(&battery.adaptive_errors) {
        println!("  adaptive, rtol = {tol:.3e}: error {e:.3e}");
    }
    Ok(())
}
