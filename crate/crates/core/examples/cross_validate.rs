//! Spectral mild solution against the finite-difference model of the
//! reactor PDE (no input, uniform initial profile).

use bibo_funnel::fd::ReactorParams;
use bibo_funnel::funnel::ReactorNonlinearity;
use bibo_funnel::scenarios::cross_validate;

fn main() -> bibo_funnel::Result<()> {
    let times = [0.5, 1.0, 2.0];
    let res = cross_validate(
        &ReactorParams::default(),
        ReactorNonlinearity::Saturation,
        100,
        200,
        &times,
        1.0,
    )?;
    println!("{:>5} {:>12} {:>14} {:>14}", "t", "rel L2", "y spectral", "y FD");
    for k in 0..times.len() {
        println!(
            "{:>5} {:>12.3e} {:>14.8} {:>14.8}",
            res.times[k], res.relative_l2[k], res.observation_spectral[k], res.observation_fd[k]
        );
    }
    Ok(())
}
