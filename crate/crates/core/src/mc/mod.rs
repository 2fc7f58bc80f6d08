//! Seeded trajectory engine for the full readout protocol.
//!
//! Every excitation cycle is a Bernoulli trial for a nuclear flip and for the
//! emission of a signal photon; detection, port assignment and dark counts are
//! layered on top. Trials are independent, run in parallel, and are
//! reproducible one by one from `(seed, trial_index)` (see [`streams`]).

mod estimate;
mod fidelity;
pub mod streams;
mod trajectory;
mod validation;

pub use estimate::{estimate_state, ReadoutEstimate};
pub use fidelity::{fidelity_curve, FidelityPoint, FIDELITY_CONFIDENCE_LEVEL};
pub use trajectory::{
    run_trials, simulate_trajectory, simulate_trajectory_from, Detection, FlipCause, FlipEvent, Origin, StateSegment,
    Trajectory, TrialSummary,
};
pub use validation::{mc_moment_validation, MomentReport, MOMENT_SIGMA_LIMIT};

use std::fmt;
use std::str::FromStr;

use crate::emission::{build_emission_model, collected_flux, emitted_signal_flux, CavityPreset, EmissionModel};
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::interferometer::{mean_current, InterferometerConfig, SpectralLine};
use crate::physics::{lowest_level_occupation, transition_frequencies, DonorParameters, MagneticEnvironment};
use crate::spin::{FlipChannels, FlipModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NuclearState {
    Up,
    Down,
}

impl NuclearState {
    pub fn flipped(self) -> Self {
        match self {
            NuclearState::Up => NuclearState::Down,
            NuclearState::Down => NuclearState::Up,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NuclearState::Up => "up",
            NuclearState::Down => "down",
        }
    }
}

impl fmt::Display for NuclearState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InitialState {
    #[default]
    Up,
    Down,
    Random,
}

impl FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "up" => Ok(InitialState::Up),
            "down" => Ok(InitialState::Down),
            "random" => Ok(InitialState::Random),
            other => Err(Error::Config(format!(
                "initial_state must be one of up, down, random; got `{other}`"
            ))),
        }
    }
}

/// Everything a Monte Carlo run needs, already resolved to SI values.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub env: MagneticEnvironment,
    pub donor: DonorParameters,
    pub cavity: CavityPreset,
    pub interferometer: InterferometerConfig,
    pub flip: FlipModel,
    pub channels: FlipChannels,
    /// Separation of lines a and b, Hz.
    pub hyperfine_splitting: f64,
    /// Hole Zeeman level spacing, Hz.
    pub hole_spacing: f64,
    pub recapture_time: f64,
    pub initial_nuclear_state: InitialState,
    /// Simulated wall-clock time per trajectory, s.
    pub duration: f64,
    pub seed: u64,
    pub trials: u64,
}

/// Per-cycle probabilities and line shapes derived from a [`SimulationConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleModel {
    pub emission: EmissionModel,
    pub up_line: SpectralLine,
    pub down_line: SpectralLine,
    /// Optically induced flip probability including enabled secondary channels.
    pub optical_flip: f64,
    pub background_flip: f64,
    /// β × extra collection × η_d.
    pub detection_probability: f64,
    pub cycles: u64,
}

impl CycleModel {
    pub fn flip_probability(&self) -> f64 {
        (self.optical_flip + self.background_flip).min(1.0)
    }

    pub fn line(&self, state: NuclearState) -> &SpectralLine {
        match state {
            NuclearState::Up => &self.up_line,
            NuclearState::Down => &self.down_line,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.donor.validate()?;
        self.cavity.validate()?;
        self.interferometer.validate()?;
        self.flip.validate()?;
        require_positive("duration", self.duration)?;
        require_non_negative("hyperfine_splitting", self.hyperfine_splitting)?;
        require_non_negative("hole_spacing", self.hole_spacing)?;
        require_non_negative("recapture_time", self.recapture_time)?;
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        Ok(())
    }

    pub fn lowest_occupation(&self) -> f64 {
        lowest_level_occupation(&self.env, self.hole_spacing)
    }

    pub fn emission_model(&self) -> Result<EmissionModel> {
        build_emission_model(&self.donor, self.lowest_occupation(), &self.cavity, self.recapture_time)
    }

    /// Validates the configuration and derives the per-cycle model.
    pub fn cycle_model(&self) -> Result<CycleModel> {
        self.validate()?;
        let emission = self.emission_model()?;
        emission.validate()?;
        let (up, down) = transition_frequencies(self.hyperfine_splitting);
        let fwhm = 2.0 * std::f64::consts::PI * self.donor.linewidth_fwhm;
        let optical_flip = self.channels.total_probability(self.flip.p_flip_per_cycle);
        let background_flip = self.flip.background_probability(emission.cycle_time);
        if optical_flip + background_flip > 1.0 {
            return Err(Error::Domain(format!(
                "per-cycle flip probability {} exceeds 1",
                optical_flip + background_flip
            )));
        }
        Ok(CycleModel {
            emission,
            up_line: SpectralLine::new(up, fwhm)?,
            down_line: SpectralLine::new(down, fwhm)?,
            optical_flip,
            background_flip,
            detection_probability: self.cavity.collection_efficiency() * self.interferometer.detector_efficiency,
            cycles: emission.cycles_in(self.duration),
        })
    }

    /// Expected detected signal photons per second.
    pub fn detected_signal_rate(&self) -> Result<f64> {
        let emission = self.emission_model()?;
        Ok(collected_flux(&emission, &self.cavity) * self.interferometer.detector_efficiency)
    }

    pub fn emitted_signal_rate(&self) -> Result<f64> {
        Ok(emitted_signal_flux(&self.emission_model()?))
    }

    /// Mean of the ±1 port variable for photons from `state`'s line.
    pub fn state_mean_current(&self, state: NuclearState) -> Result<f64> {
        let model = self.cycle_model()?;
        Ok(mean_current(model.line(state), &self.interferometer))
    }
}
