//! Optical readout of a single ³¹P nuclear spin in isotopically pure silicon.
//!
//! The crate models the full readout chain: the static level structure of the
//! neutral donor and its bound exciton ([`physics`]), the photon budget of the
//! excitation cycle in bare and cavity geometries ([`emission`]), Mach-Zehnder
//! frequency discrimination of the photoluminescence ([`interferometer`]), the
//! nuclear-flip budget imposed by the optical cycling ([`spin`]), and a seeded
//! trajectory engine that turns all of it into readout fidelity ([`mc`]).
//!
//! # Frequency convention
//!
//! Configuration and reports use ordinary frequency (Hz). The interferometer
//! works in angular frequency (rad/s = 2π·Hz) internally: every detuning and
//! linewidth stored in a [`interferometer::SpectralLine`] is angular. Absolute
//! optical frequencies are never represented; line positions are detunings
//! from the interferometer bias reference.

pub mod analysis;
pub mod config;
pub mod constants;
pub mod emission;
pub mod error;
pub mod interferometer;
pub mod mc;
pub mod physics;
pub mod spin;
pub mod stats;
pub mod units;

pub use error::{Error, Result};
