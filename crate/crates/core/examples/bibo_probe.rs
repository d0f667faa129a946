//! Drives the semilinear reactor with constant inlet inputs of growing
//! amplitude and compares the peak outlet value with the certified bound.

use bibo_funnel::scenarios::bibo_probe;
use bibo_funnel::spectral::ReactorSpectrum;

fn main() -> bibo_funnel::Result<()> {
    let probe = bibo_probe(&ReactorSpectrum::default(), 100, &[0.5, 1.0, 2.0], 20.0)?;
    let cert = &probe.certificate;
    println!(
        "certificate: epsilon = {:.4}, delta = {:.4}, K = {:.4}, offset = {:.4}",
        cert.epsilon,
        cert.delta,
        cert.output_gain.unwrap_or(f64::NAN),
        cert.output_offset.unwrap_or(f64::NAN)
    );
    println!("{:>6} {:>14} {:>14} {:>10}", "|eta|", "sup |y|", "bound", "sup/|eta|");
    for k in 0..probe.amplitudes.len() {
        println!(
            "{:>6} {:>14.6e} {:>14.6} {:>10.6}",
            probe.amplitudes[k],
            probe.peaks[k],
            probe.bounds[k],
            probe.peaks[k] / probe.amplitudes[k]
        );
    }
    println!("spread of sup|y|/|eta| across amplitudes: {:.4}", probe.growth_spread);
    Ok(())
}
