//! Certifies global BIBO stability of the tubular reactor for a few
//! `(ε, δ)` choices and prints the resulting key=value certificate.
//!
//! ```text
//! cargo run --release --example certify_reactor
//! ```

use bibo_funnel::certificates::{certify_reactor, feasibility_search};
use bibo_funnel::spectral::ReactorSpectrum;

fn main() -> bibo_funnel::Result<()> {
    let spectrum = ReactorSpectrum::default();
    let modes = 100;

    for (eps, delta) in [(1.0, 1.8), (0.6, 2.2)] {
        let cert = certify_reactor(&spectrum, modes, 1.0, eps, delta)?;
        println!(
            "(epsilon, delta) = ({eps}, {delta}): verdict {} with C2 bound * L = {:.5}",
            cert.verdict,
            cert.c2_bound * cert.lipschitz
        );
    }

    let pair = feasibility_search(spectrum.psi).expect("psi = 2.8 admits a feasible pair");
    println!(
        "\nbest pair from the search: epsilon = {:.4}, delta = {:.4} (slack {:.4})\n",
        pair.epsilon, pair.delta, pair.slack
    );
    let cert = certify_reactor(&spectrum, modes, 1.0, pair.epsilon, pair.delta)?;
    print!("{}", cert.report());
    println!("\n{}", cert.to_key_values());
    Ok(())
}
