//! Sweeps the reaction rate ψ, certifying each instance on its own thread.

use bibo_funnel::certificates::{certify_reactor, feasibility_search};
use bibo_funnel::spectral::ReactorSpectrum;

fn main() {
    let psis = [1.0, 2.0, 2.5, 2.8, 3.5, 5.0, 10.0];
    let rows: Vec<String> = std::thread::scope(|s| {
        let handles: Vec<_> = psis
            .iter()
            .map(|&psi| {
                s.spawn(move || match feasibility_search(psi) {
                    None => format!("{psi:>6} {:>8} {:>8} {:>10} {:>8}", "-", "-", "-", "none"),
                    Some(p) => {
                        let spec = ReactorSpectrum::new(0.1, 0.4, psi).unwrap();
                        let cert = certify_reactor(&spec, 100, 1.0, p.epsilon, p.delta).unwrap();
                        format!(
                            "{psi:>6} {:>8.4} {:>8.4} {:>10.5} {:>8}",
                            p.epsilon, p.delta, cert.c2_bound, cert.verdict
                        )
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    println!("{:>6} {:>8} {:>8} {:>10} {:>8}", "psi", "epsilon", "delta", "C2 bound", "verdict");
    for r in rows {
        println!("{r}");
    }
}
