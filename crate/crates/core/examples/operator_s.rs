//! The input-to-output map `S` of the reactor (inlet value to
//! `a1 η + R x(1, ·)`): a sample evaluation, an empirical local Lipschitz
//! ratio and the analytic bound it should respect.

use bibo_funnel::fd::ReactorParams;
use bibo_funnel::funnel::{check_s_local_lipschitz, operator_s, s_lipschitz_bound, ReactorNonlinearity};
use bibo_funnel::integrator::IntegratorConfig;

fn main() -> bibo_funnel::Result<()> {
    let params = ReactorParams { n: 50, ..ReactorParams::default() };
    let integrator = IntegratorConfig::default().with_tolerances(1e-9, 1e-12);
    let eta = |t: f64| 0.5 * t.sin();

    let out = operator_s(&params, ReactorNonlinearity::Saturation, &eta, 0.0, 4.0, 8, &integrator)?;
    for k in 0..out.times.len() {
        println!("t = {:<4} eta = {:+.5}  x(1) = {:+.6}  S = {:+.6}", out.times[k], out.eta[k], out.x_end[k], out.s[k]);
    }

    let bump = |t: f64| 0.01 * (-(t - 1.0) * (t - 1.0)).exp();
    let step = |t: f64| if t > 0.5 { 0.02 } else { 0.0 };
    let est = check_s_local_lipschitz(
        &params,
        ReactorNonlinearity::Saturation,
        &eta,
        &[&bump, &step],
        1.0,
        1.0,
        0.0,
        &integrator,
    )?;
    let bound = s_lipschitz_bound(&params, 100, 1.0, 1.0)?;
    println!(
        "\nempirical Lipschitz ratio on [1, 2]: {:.5} ({} pairs); analytic bound {:.5}",
        est.ratio, est.pairs_used, bound
    );
    Ok(())
}
