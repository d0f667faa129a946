//! Lyapunov ISS envelope for the heat equation with cubic sink.

use bibo_funnel::fd::HeatFd;
use bibo_funnel::heat_iss::{verify_iss, IssParams};
use bibo_funnel::integrator::IntegratorConfig;

fn main() -> bibo_funnel::Result<()> {
    let n = 100;
    let heat = HeatFd::new(n, |_| 1.0)?;
    let integrator = IntegratorConfig::default().with_tolerances(1e-8, 1e-11);
    let params = IssParams { epsilon: 1.0, eta: 1.0 };

    // Forced from rest.
    let forced = verify_iss(&heat, &|_| 1.0, &vec![0.0; n + 1], 5.0, 100, params, &integrator)?;
    print!("u = 1, x0 = 0\n{}", forced.report());

    // Unforced, from a non-uniform profile so that the gradient term is active.
    let x0: Vec<f64> = heat
        .nodes()
        .iter()
        .map(|z| 1.0 + (std::f64::consts::PI * z).cos())
        .collect();
    let free = verify_iss(&heat, &|_| 0.0, &x0, 5.0, 100, params, &integrator)?;
    print!("\nu = 0, x0 = 1 + cos(pi z)\n{}", free.report());

    println!("\n{:>5} {:>14} {:>14}", "t", "|x'|^2", "envelope");
    for s in free.samples.iter().step_by(20) {
        println!("{:>5.2} {:>14.6e} {:>14.6e}", s.t, s.lhs, s.envelope);
    }
    Ok(())
}
