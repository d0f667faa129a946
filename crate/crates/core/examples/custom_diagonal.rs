//! Certificates for an abstract diagonal system given only its eigenvalues
//! and input/output coefficients.

use bibo_funnel::certificates::{certify_diagonal, diagonal_bibo_sum, membership_exponent, optimal_delta};
use bibo_funnel::spectral::{DualCoefficientSequence, RieszSpectralOperator};

fn main() -> bibo_funnel::Result<()> {
    let modes = 200;
    let eig: Vec<f64> = (1..=modes).map(|n| -(3.0 + (n * n) as f64)).collect();
    let b: Vec<f64> = vec![1.0; modes];
    let c: Vec<f64> = (1..=modes).map(|n| 1.0 / n as f64).collect();
    let op = RieszSpectralOperator::from_eigenvalues(eig.clone())?;

    let eta = membership_exponent(&DualCoefficientSequence::new(b.clone(), 0.5), &eig)?;
    println!("smallest admissible extrapolation exponent for b: {eta:.4}");
    let sum = diagonal_bibo_sum(&b, &c, &eig)?;
    println!(
        "sum |b_n c_n / lambda_n| <= {:.6} (partial {:.6}, tail {:.2e})",
        sum.upper(),
        sum.partial_sum,
        sum.tail_bound
    );

    let delta = optimal_delta(&op, 0.5)?;
    for lipschitz in [0.5, 1.0, 1.5] {
        let cert = certify_diagonal(&op, &b, &c, lipschitz, 0.5, delta)?;
        println!(
            "L = {lipschitz}: delta = {delta:.4}, C2 bound * L = {:.4}, verdict {}",
            cert.c2_bound * lipschitz,
            cert.verdict
        );
    }
    Ok(())
}
