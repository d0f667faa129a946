//! Picard iteration for mild solutions.
//!
//! First a scalar cubic equation whose solution blows up in finite time
//! (the solver reports the escape time), then the semilinear reactor driven
//! by a unit inlet step, reporting the outlet value `y = C x`.

use std::sync::Arc;

use bibo_funnel::fd::saturation;
use bibo_funnel::mild::{InputSignal, MildConfig, MildProblem, Nonlinearity};
use bibo_funnel::spectral::{ModalGrid, ReactorSpectrum, RieszSpectralOperator};

fn main() -> bibo_funnel::Result<()> {
    // x' = -x + x^3 from x(0) = 2 escapes at t* = -ln(3/4)/2.
    let op = RieszSpectralOperator::from_eigenvalues(vec![-1.0])?;
    let cubic = Nonlinearity::modal(0.0, 0.0, |_, x, out| out[0] = x[0].powi(3))?
        .with_local_lipschitz(|r| 3.0 * r * r);
    let problem = MildProblem::new(&op, &[0.0], &cubic, MildConfig::default())?;
    let rep = problem.solve(&[2.0], &InputSignal::zero(), 1.0)?;
    println!(
        "cubic: blew up = {}, t_max = {:.6} (exact {:.6})",
        rep.blew_up,
        rep.t_max.unwrap_or(f64::NAN),
        -0.5 * 0.75f64.ln()
    );

    let spec = ReactorSpectrum::default();
    let modes = 60;
    let op = spec.operator(modes)?;
    let grid = Arc::new(ModalGrid::new(&op)?);
    let f = Nonlinearity::pointwise(grid, 0.5, 1.0, saturation)?;
    let b = spec.input_coefficients(modes);
    let c = spec.output_coefficients(modes);
    let problem = MildProblem::new(&op, &b, &f, MildConfig::default())?;
    let rep = problem.solve(&vec![0.0; modes], &InputSignal::constant(1.0), 5.0)?;
    println!(
        "\nreactor, unit inlet step: {} samples, Picard windows of length {:.3}..{:.3}, {:.1} iterations on average",
        rep.trajectory.len(),
        rep.window_min,
        rep.window_max,
        rep.picard_iterations_mean
    );
    for t in [0.5, 1.0, 2.0, 5.0] {
        let x = rep.trajectory.sample(t).expect("non-empty trajectory");
        let y: f64 = x.iter().zip(&c).map(|(a, b)| a * b).sum();
        println!("  y({t}) = {y:+.6}");
    }
    Ok(())
}
