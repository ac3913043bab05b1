//! Core model of a multipair massive MIMO two-way amplify-and-forward relay
//! with transceiver hardware impairments at the relay.
//!
//! The crate is split into three layers:
//!
//! - [`config`] and [`channel`]: system parameters, large-scale fading and
//!   per-coherence-block draws of channels and additive distortion.
//! - [`gram`]: everything that depends on the MR precoder `F = B* Aᴴ`.
//!   The N×N precoder is never materialized; all quadratic forms are
//!   expanded through the K×K Gram matrices of the channel columns.
//! - [`analytics`]: the closed-form large-scale SE approximation, the
//!   hardware scaling-law limits and the asymptotic norm expectations.
//!
//! The crate is `no_std` (with `alloc`) so the numeric kernels can be reused
//! outside a hosted environment; IO, parallel estimation and the CLI live in
//! the companion `twrelay` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytics;
pub mod channel;
pub mod config;
pub mod gram;
pub mod trial;

pub use analytics::{ClosedFormTerms, ScalingLaw};
pub use channel::{ChannelRealization, DistortionRealization, LargeScaleFading};
pub use config::{ConfigError, DistortionMode, SystemConfig};
pub use gram::{GramCache, Leg, SinrBreakdown, TrialResult};
pub use trial::run_trial;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
