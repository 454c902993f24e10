//! Spectral analysis of divergence-free initial data on `R^n` and of the
//! algebraic energy decay of the flows they generate.
//!
//! The crate is `no_std` (it needs `alloc`). It carries two field
//! representations:
//!
//! * [`RadialSpectralProfile`]: an exact one-dimensional description of a
//!   swirl-type field through its squared spectral amplitude `A(|xi|)`,
//!   integrated by log-spaced Gauss quadrature with analytic low-frequency
//!   tails. This is the backend used for every statement about `t -> oo` or
//!   `rho -> 0`, since a periodic box has a spectral gap.
//! * [`GridField`]: Fourier coefficients of a real, divergence-free vector
//!   field on a periodic box in two or three dimensions.
//!
//! On top of these sit the Littlewood-Paley machinery ([`dyadic`]), exact
//! heat / Stokes evolution ([`heat`]), constructors for the witness data
//! ([`synthesis`]) and decay-rate certification ([`fit`]).
//!
//! # Exponent conventions
//!
//! All rates in this crate are expressed through [`Exponent`], whose
//! canonical value `s` is the decay rate of the *squared* norm,
//! `||e^{t Delta} u0||^2 ~ (1+t)^{-s}`. The same number is the Besov index in
//! `B^{-s}_{2,oo}` (blocks `||Delta_j u0|| <= C 2^{s j}`), the low-frequency
//! mass scales like `rho^{2s}`, and the *unsquared* norm decays like
//! `(1+t)^{-s/2}`.

#![no_std]
// Float math comes from num-traits (libm) on toolchains whose `core` lacks it
#![allow(unused_imports)]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dyadic;
mod error;
pub mod fit;
pub mod grid;
pub mod heat;
pub mod math;
mod norms;
pub mod radial;
pub mod synthesis;

pub use error::{Error, Result};
pub use fit::{DecayCertificate, EquivalenceReport, Exponent, Verdict};
pub use grid::{Grid, GridField};
pub use heat::DecayProfile;
pub use norms::{low_freq_mass, norms, Backend, FieldNorms, SpectralField, Weight};
pub use radial::{Amplitude, Quadrature, RadialSpectralProfile};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
