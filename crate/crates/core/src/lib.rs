pub mod certificates;
pub mod cli;
pub mod config;
pub mod error;
pub mod fd;
pub mod funnel;
pub mod heat_iss;
pub mod integrator;
pub mod mild;
pub mod scenarios;
pub mod spectral;
pub mod trace;

pub use error::{Error, Result};
