//! Physical constants (SI, CODATA 2018) and ³¹P:Si reference values.

use std::f64::consts::PI;

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = PLANCK / (2.0 * PI);
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Free-electron g-factor (magnitude).
pub const FREE_ELECTRON_G: f64 = 2.002_319_304_362_56;

/// ³¹P nuclear gyromagnetic ratio, γ/2π = 17.235 MHz/T.
pub const P31_GYROMAGNETIC_RATIO: f64 = 2.0 * PI * 17.235e6;

/// Electron density at the ³¹P site from ESR, 0.44×10²⁴ cm⁻³.
pub const P31_PSI0_SQ: f64 = 0.44e30;

pub const P_AUGER_LIFETIME: f64 = 300e-9;
pub const P_RADIATIVE_LIFETIME: f64 = 2e-3;
/// Ensemble PL linewidth upper bound (Hz, FWHM).
pub const P_ENSEMBLE_LINEWIDTH: f64 = 150e6;
/// Expected single-donor PL linewidth (Hz, FWHM).
pub const P_SINGLE_DONOR_LINEWIDTH: f64 = 3e6;
/// Bound-exciton (hole/nuclear) hyperfine scale (Hz).
pub const P_BE_HYPERFINE: f64 = 2e6;
/// 4 K electron capture cross section, 4×10⁻¹¹ cm².
pub const P_CAPTURE_CROSS_SECTION: f64 = 4e-15;
/// Si conductivity effective mass ratio.
pub const SI_EFFECTIVE_MASS_RATIO: f64 = 0.26;
