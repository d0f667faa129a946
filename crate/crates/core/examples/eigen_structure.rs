//! Eigen-data of the reactor operator: closed-form eigenvalues against the
//! finite-difference spectrum, a few eigenfunction values and the weighted
//! orthonormality of the truncated basis.

use bibo_funnel::fd::ReactorParams;
use bibo_funnel::scenarios::eigen_structure;
use bibo_funnel::spectral::ReactorSpectrum;

fn main() -> bibo_funnel::Result<()> {
    let spec = ReactorSpectrum::default();
    let check = eigen_structure(&ReactorParams::default(), 5, 100)?;

    println!("{:>3} {:>14} {:>14} {:>10}", "k", "closed form", "FD (n=100)", "rel err");
    for k in 0..check.exact.len() {
        println!(
            "{k:>3} {:>14.8} {:>14.8} {:>10.2e}",
            check.exact[k], check.discrete[k], check.relative_errors[k]
        );
    }
    println!("orthonormality residual (100 modes): {:.3e}", check.orthonormality_residual);

    println!("\nphi_k(zeta):");
    for z in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let row: Vec<String> = (0..4).map(|k| format!("{:>10.5}", spec.eigenfunction(k, z))).collect();
        println!("  zeta = {z:<5} {}", row.join(" "));
    }
    let b = spec.input_coefficients(4);
    let c = spec.output_coefficients(4);
    println!("\nb_k = {b:.5?}\nc_k = {c:.5?}");
    Ok(())
}
