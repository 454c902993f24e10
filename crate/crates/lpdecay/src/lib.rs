//! Navier-Stokes simulation, field IO and the experiment driver built on
//! [`lpdecay_core`].

pub mod config;
pub mod error;
pub mod fft;
pub mod io;
pub mod lebesgue;
pub mod nse;
pub mod runner;

pub use error::{Error, Result};
