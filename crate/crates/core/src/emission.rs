//! Photon budget of the excitation cycle.
//!
//! One cycle is: donor recapture → exciton capture (instantaneous) → bound
//! exciton decay, either by Auger recombination (no photon) or through the
//! zero-phonon radiative channel. Only radiative decays from the lowest hole
//! Zeeman level land on the signal lines a/b. The photonic environment scales
//! the radiative rate and sets how much of the emission is collected; the
//! Auger rate is never modified.

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, require_unit_interval, Error, Result};
use crate::physics::DonorParameters;

/// Extraction chain of a photonic geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityPreset {
    pub name: String,
    /// Fraction of emission coupled into the collected mode.
    pub beta: f64,
    /// Multiplier on the zero-phonon radiative rate (<1 suppression, >1 Purcell).
    pub radiative_rate_factor: f64,
    /// Downstream optical collection efficiency.
    pub extra_collection: f64,
}

impl CavityPreset {
    pub fn new(name: impl Into<String>, beta: f64, radiative_rate_factor: f64, extra_collection: f64) -> Result<Self> {
        let preset = Self {
            name: name.into(),
            beta,
            radiative_rate_factor,
            extra_collection,
        };
        preset.validate()?;
        Ok(preset)
    }

    pub fn validate(&self) -> Result<()> {
        require_unit_interval("beta", self.beta)?;
        require_unit_interval("extra_collection", self.extra_collection)?;
        require_positive("radiative_rate_factor", self.radiative_rate_factor)
    }

    /// No cavity: every signal photon counts as collected.
    pub fn bare() -> Self {
        Self {
            name: "bare".into(),
            beta: 1.0,
            radiative_rate_factor: 1.0,
            extra_collection: 1.0,
        }
    }

    /// Planar DBR cavity: β = 0.8 at the cost of a 3× slower radiative rate.
    pub fn dbr() -> Self {
        Self {
            name: "dbr".into(),
            beta: 0.8,
            radiative_rate_factor: 1.0 / 3.0,
            extra_collection: 1.0,
        }
    }

    /// 2D photonic crystal: Purcell factor 100, β = 1, 0.5 downstream collection.
    pub fn photonic_crystal() -> Self {
        Self {
            name: "phc".into(),
            beta: 1.0,
            radiative_rate_factor: 100.0,
            extra_collection: 0.5,
        }
    }

    pub fn builtin() -> Vec<Self> {
        vec![Self::bare(), Self::dbr(), Self::photonic_crystal()]
    }

    /// β × extra collection.
    pub fn collection_efficiency(&self) -> f64 {
        self.beta * self.extra_collection
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionModel {
    /// Mean duration of one excitation cycle (s).
    pub cycle_time: f64,
    /// Probability that a cycle ends radiatively.
    pub radiative_branching: f64,
    /// Probability that the radiative photon falls on line a/b.
    pub signal_fraction: f64,
}

impl EmissionModel {
    pub fn validate(&self) -> Result<()> {
        require_positive("cycle_time", self.cycle_time)?;
        require_unit_interval("radiative_branching", self.radiative_branching)?;
        require_unit_interval("signal_fraction", self.signal_fraction)
    }

    /// Probability that a cycle emits a photon on line a/b.
    pub fn signal_probability_per_cycle(&self) -> f64 {
        self.radiative_branching * self.signal_fraction
    }

    pub fn cycles_in(&self, duration: f64) -> u64 {
        (duration / self.cycle_time).floor() as u64
    }
}

pub fn build_emission_model(
    donor: &DonorParameters,
    occupation: f64,
    cavity: &CavityPreset,
    recapture_time: f64,
) -> Result<EmissionModel> {
    require_non_negative("recapture_time", recapture_time)?;
    require_unit_interval("occupation", occupation)?;
    cavity.validate()?;
    let radiative_rate = cavity.radiative_rate_factor / donor.tau_rad;
    let total_rate = 1.0 / donor.tau_auger + radiative_rate;
    let tau_be = 1.0 / total_rate;
    let model = EmissionModel {
        cycle_time: tau_be + recapture_time,
        radiative_branching: radiative_rate * tau_be,
        signal_fraction: occupation,
    };
    if model.radiative_branching > 1.0 {
        return Err(Error::Domain(format!(
            "radiative branching {} exceeds 1",
            model.radiative_branching
        )));
    }
    Ok(model)
}

/// Signal photons per second emitted on lines a/b.
pub fn emitted_signal_flux(model: &EmissionModel) -> f64 {
    model.signal_fraction * model.radiative_branching / model.cycle_time
}

pub fn collected_flux(model: &EmissionModel, cavity: &CavityPreset) -> f64 {
    emitted_signal_flux(model) * cavity.collection_efficiency()
}

pub fn detected_flux(collected: f64, detector_efficiency: f64) -> Result<f64> {
    require_unit_interval("detector_efficiency", detector_efficiency)?;
    Ok(collected * detector_efficiency)
}
