//! Static level structure of the neutral donor P⁰ and its bound exciton (P⁰,X).
//!
//! All returned frequencies are ordinary frequencies in Hz unless the function
//! name says otherwise. [`transition_frequencies`] is the one exception: it
//! hands angular detunings to the interferometer.

use std::f64::consts::PI;

use crate::constants::{
    BOHR_MAGNETON, BOLTZMANN, ELECTRON_MASS, ELEMENTARY_CHARGE, FREE_ELECTRON_G, HBAR, P31_GYROMAGNETIC_RATIO,
    P31_PSI0_SQ, PLANCK, P_AUGER_LIFETIME, P_BE_HYPERFINE, P_CAPTURE_CROSS_SECTION, P_ENSEMBLE_LINEWIDTH,
    P_RADIATIVE_LIFETIME, SI_EFFECTIVE_MASS_RATIO, VACUUM_PERMEABILITY,
};
use crate::error::{require_non_negative, require_positive, Error, Result};

/// Ratio of hyperfine splitting to electron Zeeman frequency above which the
/// high-field assumptions are flagged.
pub const HIGH_FIELD_RATIO_LIMIT: f64 = 1e-2;

/// Applied field and lattice temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticEnvironment {
    b_field: f64,
    temperature: f64,
}

impl MagneticEnvironment {
    /// `b_field` in tesla, `temperature` in kelvin; both must be > 0.
    pub fn new(b_field: f64, temperature: f64) -> Result<Self> {
        require_positive("b_field", b_field)?;
        require_positive("temperature", temperature)?;
        Ok(Self { b_field, temperature })
    }

    pub fn b_field(&self) -> f64 {
        self.b_field
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Thermal energy expressed as a frequency, kT/h.
    pub fn thermal_frequency(&self) -> f64 {
        BOLTZMANN * self.temperature / PLANCK
    }
}

/// Material constants of the ³¹P donor in silicon (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DonorParameters {
    /// |ψ(0)|², m⁻³.
    pub psi0_sq: f64,
    /// Nuclear gyromagnetic ratio, rad s⁻¹ T⁻¹.
    pub gamma_n: f64,
    pub g0: f64,
    pub tau_auger: f64,
    pub tau_rad: f64,
    /// PL line FWHM, Hz.
    pub linewidth_fwhm: f64,
    /// Bound-exciton hyperfine scale, Hz.
    pub be_hyperfine: f64,
    /// m².
    pub capture_cross_section: f64,
    pub effective_mass_ratio: f64,
}

impl Default for DonorParameters {
    fn default() -> Self {
        Self {
            psi0_sq: P31_PSI0_SQ,
            gamma_n: P31_GYROMAGNETIC_RATIO,
            g0: FREE_ELECTRON_G,
            tau_auger: P_AUGER_LIFETIME,
            tau_rad: P_RADIATIVE_LIFETIME,
            linewidth_fwhm: P_ENSEMBLE_LINEWIDTH,
            be_hyperfine: P_BE_HYPERFINE,
            capture_cross_section: P_CAPTURE_CROSS_SECTION,
            effective_mass_ratio: SI_EFFECTIVE_MASS_RATIO,
        }
    }
}

impl DonorParameters {
    pub fn validate(&self) -> Result<()> {
        require_positive("psi0_sq", self.psi0_sq)?;
        require_positive("gamma_n", self.gamma_n)?;
        require_positive("g0", self.g0)?;
        require_positive("tau_auger", self.tau_auger)?;
        require_positive("tau_rad", self.tau_rad)?;
        require_positive("linewidth_fwhm", self.linewidth_fwhm)?;
        require_positive("be_hyperfine", self.be_hyperfine)?;
        require_positive("capture_cross_section", self.capture_cross_section)?;
        require_positive("effective_mass_ratio", self.effective_mass_ratio)?;
        if self.tau_rad <= self.tau_auger {
            return Err(Error::invalid(
                "tau_rad",
                format!(
                    "radiative lifetime {} s must exceed Auger lifetime {} s",
                    self.tau_rad, self.tau_auger
                ),
            ));
        }
        Ok(())
    }
}

/// Level structure of P⁰ and (P⁰,X) at a given field and temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelDiagram {
    pub hyperfine_splitting: f64,
    pub electron_zeeman: f64,
    pub hole_level_spacing: f64,
    pub lowest_occupation: f64,
}

impl LevelDiagram {
    pub fn new(hyperfine_splitting: f64, env: &MagneticEnvironment, g0: f64, hole_level_spacing: f64) -> Result<Self> {
        require_non_negative("hyperfine_splitting", hyperfine_splitting)?;
        require_non_negative("hole_level_spacing", hole_level_spacing)?;
        let diagram = Self {
            hyperfine_splitting,
            electron_zeeman: electron_zeeman_frequency(env, g0),
            hole_level_spacing,
            lowest_occupation: lowest_level_occupation(env, hole_level_spacing),
        };
        if !diagram.is_high_field() {
            log::warn!(
                "hyperfine/Zeeman ratio {:.3e} exceeds {HIGH_FIELD_RATIO_LIMIT}; \
                 high-field flip-probability estimates are unreliable",
                diagram.high_field_ratio()
            );
        }
        Ok(diagram)
    }

    pub fn high_field_ratio(&self) -> f64 {
        self.hyperfine_splitting / self.electron_zeeman
    }

    pub fn is_high_field(&self) -> bool {
        self.high_field_ratio() < HIGH_FIELD_RATIO_LIMIT
    }
}

/// Fermi-contact splitting of the P⁰ ground state, (μ₀/3)·g₀·μ_B·γ_n·ħ·|ψ(0)|² / h, in Hz.
pub fn hyperfine_splitting(donor: &DonorParameters) -> f64 {
    let energy = VACUUM_PERMEABILITY / 3.0 * donor.g0 * BOHR_MAGNETON * donor.gamma_n * HBAR * donor.psi0_sq;
    energy / PLANCK
}

/// g₀ μ_B B₀ / h in Hz.
pub fn electron_zeeman_frequency(env: &MagneticEnvironment, g0: f64) -> f64 {
    g0 * BOHR_MAGNETON * env.b_field / PLANCK
}

pub fn frequency_to_mev(frequency: f64) -> f64 {
    frequency * PLANCK / ELEMENTARY_CHARGE * 1e3
}

/// Boltzmann weight ratio between adjacent hole Zeeman levels.
fn level_ratio(env: &MagneticEnvironment, hole_spacing: f64) -> f64 {
    (-hole_spacing / env.thermal_frequency()).exp()
}

/// Thermal occupation of the lowest of four equally spaced levels.
pub fn lowest_level_occupation(env: &MagneticEnvironment, hole_spacing: f64) -> f64 {
    let q = level_ratio(env, hole_spacing);
    1.0 / (1.0 + q + q * q + q * q * q)
}

/// Hole level spacing (Hz) that yields `target_occupation` in the lowest level.
///
/// Bisection on the monotone map q ↦ 1/(1+q+q²+q³) in the Boltzmann ratio q,
/// then converted back to a spacing. Target must lie strictly inside (0.25, 1).
pub fn calibrate_hole_spacing(env: &MagneticEnvironment, target_occupation: f64) -> Result<f64> {
    if !(target_occupation > 0.25 && target_occupation < 1.0) {
        return Err(Error::Domain(format!(
            "lowest-level occupation {target_occupation} is unreachable; must lie in (0.25, 1)"
        )));
    }
    let occupation = |q: f64| 1.0 / (1.0 + q + q * q + q * q * q);
    // occupation(q) decreases from 1 at q = 0 to 0.25 at q = 1
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if occupation(mid) > target_occupation {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let q = 0.5 * (lo + hi);
    Ok(-q.ln() * env.thermal_frequency())
}

/// Angular detunings (rad/s) of the two signal lines from the bias reference ω₀.
///
/// The first entry belongs to nuclear state "up" (+Δω/2), the second to "down".
pub fn transition_frequencies(hyperfine_splitting: f64) -> (f64, f64) {
    let half = PI * hyperfine_splitting;
    (half, -half)
}

/// Mean thermal speed sqrt(3kT/m*) of conduction electrons.
pub fn thermal_velocity(donor: &DonorParameters, env: &MagneticEnvironment) -> f64 {
    (3.0 * BOLTZMANN * env.temperature / (donor.effective_mass_ratio * ELECTRON_MASS)).sqrt()
}

/// Free-electron density (m⁻³) that neutralizes an ionized donor in `capture_time`.
pub fn neutralization_electron_density(
    donor: &DonorParameters,
    env: &MagneticEnvironment,
    capture_time: f64,
) -> Result<f64> {
    require_positive("capture_time", capture_time)?;
    Ok(1.0 / (donor.capture_cross_section * thermal_velocity(donor, env) * capture_time))
}
