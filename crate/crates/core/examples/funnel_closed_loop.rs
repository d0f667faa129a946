//! Funnel control of the reactor coupled to a stirred tank.
//!
//! Runs the closed loop with both backends, prints the a posteriori checks
//! and writes `trace.csv` and `funnel.svg` for the finite-difference run to
//! `$BIBO_FUNNEL_OUT/funnel_closed_loop` (default: the system temp dir).

use std::path::PathBuf;

use bibo_funnel::funnel::{closed_loop_simulate, Backend, ClosedLoopConfig};
use bibo_funnel::trace::{Series, SvgPlot};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ClosedLoopConfig::default();
    println!("phi(0)|e(0)| = {:.6}", cfg.initial_scaled_error());

    let fd = closed_loop_simulate(&cfg)?;
    println!("\nfinite differences (n = {}):", cfg.reactor.n);
    print!("{}", fd.verification.report());

    let spectral = closed_loop_simulate(&ClosedLoopConfig {
        backend: Backend::Spectral { modes: 40 },
        ..cfg.clone()
    })?;
    println!("\nspectral Galerkin (40 modes):");
    print!("{}", spectral.verification.report());

    let y_fd = fd.trace.column("y").unwrap();
    let y_sp = spectral.trace.column("y").unwrap();
    let gap = y_fd.iter().zip(&y_sp).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("\nmax |y_fd - y_spectral| on the output grid: {gap:.3e}");

    let dir = std::env::var_os("BIBO_FUNNEL_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir)
        .join("funnel_closed_loop");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("trace.csv"), fd.trace.to_csv())?;
    let t = fd.trace.column("t").unwrap();
    let r = fd.trace.column("funnel_radius").unwrap();
    let plot = SvgPlot::new("tracking error inside the funnel", "t")
        .with(Series::new("e", "#1f77b4", t.clone(), fd.trace.column("e").unwrap()))
        .with(Series::new("1/phi", "#d62728", t.clone(), r.clone()).dashed())
        .with(Series::new("-1/phi", "#d62728", t, r.iter().map(|v| -v).collect()).dashed());
    std::fs::write(dir.join("funnel.svg"), plot.render())?;
    println!("wrote {}", dir.display());
    Ok(())
}
