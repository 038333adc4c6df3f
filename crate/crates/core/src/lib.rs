//! Green functions of dissipative pressure waves in homogeneous media.
//!
//! Two attenuation-dispersion laws are provided: a causal law with relaxation
//! time `tau0` and the frequency power law that approximates it at small
//! frequencies. The crate evaluates both laws, samples and integrates the
//! frequency-domain Green function
//!
//! ```text
//!   G(r, w) = exp(-alpha*(w) r) / (4 pi r) * exp(i w r / c0)
//! ```
//!
//! and computes exact L2 approximation errors, the two analytic error bounds
//! relating them, and time-domain signals obtained by inverse FFT.
//!
//! Units are fixed: lengths in cm, times in microseconds, angular frequency in
//! rad/us, attenuation in Np/cm. Constants are bare numbers in these units.
//!
//! Fourier convention (project-wide): forward transform
//! `F{g}(w) = (2 pi)^{-1/2} \int g(t) exp(+i w t) dt`, inverse with
//! `exp(-i w t)` and the same unitary factor. With this sign a phase factor
//! `exp(i w r / c0)` corresponds to a delay of `r / c0`.

// Parameter checks are written `!(x > y)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod laws;
pub mod numeric;
pub mod spectrum;
pub mod timedomain;

pub use error::{Error, Result};
pub use laws::{CausalLaw, DispersionLaw, MediumPreset, PowerLaw, WaveModel};
