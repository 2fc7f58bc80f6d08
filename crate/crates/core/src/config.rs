//! Flat TOML configuration with unit-suffixed quantities.
//!
//! ```toml
//! schema = 1
//! b_field = "10 T"
//! temperature = "4 K"
//! psi0_sq = "0.44e24 cm^-3"
//! linewidth_fwhm = "150 MHz"
//! cavity = "dbr"
//!
//! [presets.dbr]
//! beta = 0.8
//! radiative_rate_factor = 0.3333333333333333
//! extra_collection = 1.0
//! ```
//!
//! Dimensioned keys must be strings carrying a unit; dimensionless keys are
//! plain numbers. Unknown keys are rejected. Every key is optional and
//! defaults to the values in [`Config::default`].

use std::collections::BTreeMap;
use std::path::Path;

use toml::{Table, Value};

use crate::constants::{PLANCK, P_SINGLE_DONOR_LINEWIDTH};
use crate::emission::CavityPreset;
use crate::error::{require_positive, Error, Result};
use crate::interferometer::{BiasParity, InterferometerConfig};
use crate::mc::{InitialState, SimulationConfig};
use crate::physics::{
    calibrate_hole_spacing, electron_zeeman_frequency, hyperfine_splitting, DonorParameters, MagneticEnvironment,
};
use crate::spin::{
    be_flip_suppression, flip_flop_denominator, flip_probability_per_cycle_with_dos, FlipChannels, FlipModel,
    DEFAULT_CROSS_RELAXATION_TIME, DEFAULT_RANDOMIZATION_THRESHOLD,
};
use crate::units::{parse_quantity, Dimension};

pub const SCHEMA_VERSION: i64 = 1;
/// Seed used when neither the config nor the command line gives one.
pub const DEFAULT_SEED: u64 = 31;

/// Measured P⁰ hyperfine splitting from ESR, Hz.
pub const MEASURED_HYPERFINE_SPLITTING: f64 = 60e6;
/// Per-cycle capture flip probability as quoted, (60 MHz / 280 GHz)² rounded.
pub const QUOTED_CAPTURE_FLIP_PROBABILITY: f64 = 5e-8;

/// Where the hole Zeeman spacing comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HoleSpacing {
    /// Calibrated so the lowest level holds this thermal occupation.
    Calibrated {
        occupation: f64,
    },
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub env: MagneticEnvironment,
    pub donor: DonorParameters,
    /// Line separation used downstream (Hz); `None` means the contact-interaction value.
    pub hyperfine_splitting: Option<f64>,
    pub hole_spacing: HoleSpacing,
    pub recapture_time: f64,
    /// Target donor neutralization time for the free-carrier density estimate.
    pub neutralization_time: f64,
    pub cavity: String,
    pub presets: BTreeMap<String, CavityPreset>,
    pub interferometer: InterferometerConfig,
    /// Capture flip probability per cycle; `None` derives it from the field.
    pub capture_flip_probability: Option<f64>,
    pub exciton_dos_factor: f64,
    /// Include nuclear Zeeman and hyperfine terms in the flip-flop energy cost.
    pub full_flip_denominator: bool,
    pub include_be_channel: bool,
    pub include_radiative_channel: bool,
    pub background_rate: f64,
    pub randomization_threshold: f64,
    pub target_snr: f64,
    pub initial_state: InitialState,
    pub duration: f64,
    pub seed: u64,
    pub trials: u64,
}

impl Default for Config {
    fn default() -> Self {
        let presets = CavityPreset::builtin()
            .into_iter()
            .map(|p| (p.name.clone(), p))
            .collect();
        Self {
            env: MagneticEnvironment::new(10.0, 4.0).expect("positive"),
            donor: DonorParameters::default(),
            hyperfine_splitting: Some(MEASURED_HYPERFINE_SPLITTING),
            hole_spacing: HoleSpacing::Calibrated { occupation: 0.8 },
            recapture_time: 1e-9,
            neutralization_time: 1e-9,
            cavity: "dbr".into(),
            presets,
            interferometer: InterferometerConfig {
                delay: 2e-9,
                bias_parity: BiasParity::Even,
                detector_efficiency: 0.4,
                dark_rate: 0.0,
            },
            capture_flip_probability: Some(QUOTED_CAPTURE_FLIP_PROBABILITY),
            exciton_dos_factor: 1.0,
            full_flip_denominator: false,
            include_be_channel: true,
            include_radiative_channel: true,
            background_rate: 1.0 / DEFAULT_CROSS_RELAXATION_TIME,
            randomization_threshold: DEFAULT_RANDOMIZATION_THRESHOLD,
            target_snr: 1.0,
            initial_state: InitialState::Up,
            duration: 1.0,
            seed: DEFAULT_SEED,
            trials: 100,
        }
    }
}

/// Keys that [`Config::set_value`] accepts for parameter sweeps.
pub const SWEEPABLE_KEYS: &[&str] = &["b_field", "temperature", "linewidth_fwhm", "delay", "eta_d", "cavity"];

/// Keyword that selects the derived value for optional overrides.
const DERIVED: &str = "derived";

fn config_err(key: &str, reason: impl std::fmt::Display) -> Error {
    Error::Config(format!("key `{key}`: {reason}"))
}

fn quantity(key: &str, value: &Value, dim: Dimension) -> Result<f64> {
    match value {
        Value::String(s) => parse_quantity(key, s, dim),
        Value::Integer(_) | Value::Float(_) => Err(Error::Unit {
            key: key.into(),
            reason: format!("a bare number is not allowed for a {dim}; write it as a string with a unit"),
        }),
        other => Err(config_err(
            key,
            format!("expected a quantity string, got {}", other.type_str()),
        )),
    }
}

fn number(key: &str, value: &Value) -> Result<f64> {
    match value {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        other => Err(config_err(key, format!("expected a number, got {}", other.type_str()))),
    }
}

fn integer(key: &str, value: &Value) -> Result<i64> {
    value
        .as_integer()
        .ok_or_else(|| config_err(key, format!("expected an integer, got {}", value.type_str())))
}

fn boolean(key: &str, value: &Value) -> Result<bool> {
    value
        .as_bool()
        .ok_or_else(|| config_err(key, format!("expected true/false, got {}", value.type_str())))
}

fn string<'a>(key: &str, value: &'a Value) -> Result<&'a str> {
    value
        .as_str()
        .ok_or_else(|| config_err(key, format!("expected a string, got {}", value.type_str())))
}

fn is_derived(value: &Value) -> bool {
    value.as_str() == Some(DERIVED)
}

fn parse_preset(name: &str, value: &Value, base: Option<&CavityPreset>) -> Result<CavityPreset> {
    let table = value
        .as_table()
        .ok_or_else(|| config_err(&format!("presets.{name}"), "expected a table"))?;
    let mut preset = base.cloned().unwrap_or(CavityPreset {
        name: name.to_string(),
        beta: 1.0,
        radiative_rate_factor: 1.0,
        extra_collection: 1.0,
    });
    for (key, v) in table {
        let full = format!("presets.{name}.{key}");
        match key.as_str() {
            "beta" => preset.beta = number(&full, v)?,
            "radiative_rate_factor" => preset.radiative_rate_factor = number(&full, v)?,
            "extra_collection" => preset.extra_collection = number(&full, v)?,
            other => {
                return Err(config_err(
                    &full,
                    format!("unknown preset field `{other}`; expected beta, radiative_rate_factor, extra_collection"),
                ))
            }
        }
    }
    preset.validate()?;
    Ok(preset)
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let mut cfg = Config::default();
        let mut b_field = cfg.env.b_field();
        let mut temperature = cfg.env.temperature();

        for (key, value) in &table {
            let k = key.as_str();
            match k {
                "schema" => {
                    let v = integer(k, value)?;
                    if v != SCHEMA_VERSION {
                        return Err(config_err(
                            k,
                            format!("unsupported schema {v}; this build reads {SCHEMA_VERSION}"),
                        ));
                    }
                }
                "b_field" => b_field = quantity(k, value, Dimension::MagneticField)?,
                "temperature" => temperature = quantity(k, value, Dimension::Temperature)?,
                "presets" => {
                    let presets = value
                        .as_table()
                        .ok_or_else(|| config_err(k, "expected a table of presets"))?;
                    for (name, body) in presets {
                        let preset = parse_preset(name, body, cfg.presets.get(name))?;
                        cfg.presets.insert(name.clone(), preset);
                    }
                }
                _ => cfg.apply(k, value)?,
            }
        }
        cfg.env = MagneticEnvironment::new(b_field, temperature)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one flat key (everything except `schema`, field, temperature, presets).
    fn apply(&mut self, k: &str, value: &Value) -> Result<()> {
        match k {
            "psi0_sq" => self.donor.psi0_sq = quantity(k, value, Dimension::NumberDensity)?,
            "gamma_n" => self.donor.gamma_n = quantity(k, value, Dimension::GyromagneticRatio)?,
            "g0" => self.donor.g0 = number(k, value)?,
            "tau_auger" => self.donor.tau_auger = quantity(k, value, Dimension::Time)?,
            "tau_rad" => self.donor.tau_rad = quantity(k, value, Dimension::Time)?,
            "linewidth_fwhm" | "linewidth" => self.donor.linewidth_fwhm = quantity(k, value, Dimension::Frequency)?,
            "be_hyperfine" => self.donor.be_hyperfine = quantity(k, value, Dimension::Frequency)?,
            "capture_cross_section" => self.donor.capture_cross_section = quantity(k, value, Dimension::Area)?,
            "effective_mass_ratio" => self.donor.effective_mass_ratio = number(k, value)?,
            "hyperfine_splitting" => {
                self.hyperfine_splitting = if is_derived(value) {
                    None
                } else {
                    Some(quantity(k, value, Dimension::Frequency)?)
                }
            }
            "hole_spacing" => {
                self.hole_spacing = if is_derived(value) {
                    HoleSpacing::Calibrated {
                        occupation: self.occupation_target(),
                    }
                } else {
                    HoleSpacing::Fixed(quantity(k, value, Dimension::Frequency)?)
                }
            }
            "occupation_target" => {
                let occupation = number(k, value)?;
                if let HoleSpacing::Calibrated { .. } = self.hole_spacing {
                    self.hole_spacing = HoleSpacing::Calibrated { occupation };
                }
            }
            "recapture_time" => self.recapture_time = quantity(k, value, Dimension::Time)?,
            "neutralization_time" => self.neutralization_time = quantity(k, value, Dimension::Time)?,
            "cavity" => self.cavity = string(k, value)?.to_string(),
            "delay" => self.interferometer.delay = quantity(k, value, Dimension::Time)?,
            "bias_parity" => self.interferometer.bias_parity = BiasParity::from_sign(integer(k, value)?)?,
            "detector_efficiency" | "eta_d" => self.interferometer.detector_efficiency = number(k, value)?,
            "dark_rate" => self.interferometer.dark_rate = quantity(k, value, Dimension::Rate)?,
            "capture_flip_probability" => {
                self.capture_flip_probability = if is_derived(value) {
                    None
                } else {
                    Some(number(k, value)?)
                }
            }
            "exciton_dos_factor" => self.exciton_dos_factor = number(k, value)?,
            "full_flip_denominator" => self.full_flip_denominator = boolean(k, value)?,
            "include_be_channel" => self.include_be_channel = boolean(k, value)?,
            "include_radiative_channel" => self.include_radiative_channel = boolean(k, value)?,
            "background_rate" => self.background_rate = quantity(k, value, Dimension::Rate)?,
            "randomization_threshold" => self.randomization_threshold = number(k, value)?,
            "target_snr" => self.target_snr = number(k, value)?,
            "initial_state" => self.initial_state = string(k, value)?.parse()?,
            "duration" => self.duration = quantity(k, value, Dimension::Time)?,
            "seed" => {
                let seed = integer(k, value)?;
                self.seed = u64::try_from(seed).map_err(|_| config_err(k, "seed must be non-negative"))?;
            }
            "trials" => {
                let trials = integer(k, value)?;
                self.trials = u64::try_from(trials).map_err(|_| config_err(k, "trials must be non-negative"))?;
            }
            other => return Err(config_err(other, "unknown key")),
        }
        Ok(())
    }

    fn occupation_target(&self) -> f64 {
        match self.hole_spacing {
            HoleSpacing::Calibrated { occupation } => occupation,
            HoleSpacing::Fixed(_) => 0.8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.donor.validate()?;
        self.interferometer.validate()?;
        self.cavity_preset()?;
        self.flip_model()?;
        self.hole_spacing()?;
        require_positive("target_snr", self.target_snr)?;
        require_positive("duration", self.duration)?;
        require_positive("neutralization_time", self.neutralization_time)?;
        if self.trials == 0 {
            return Err(config_err("trials", "must be at least 1"));
        }
        Ok(())
    }

    /// Overrides a single sweepable parameter from its textual value.
    pub fn set_value(&mut self, key: &str, text: &str) -> Result<()> {
        match key {
            "b_field" => {
                let b = parse_quantity(key, text, Dimension::MagneticField)?;
                self.env = MagneticEnvironment::new(b, self.env.temperature())?;
            }
            "temperature" => {
                let t = parse_quantity(key, text, Dimension::Temperature)?;
                self.env = MagneticEnvironment::new(self.env.b_field(), t)?;
            }
            "linewidth_fwhm" | "linewidth" => {
                self.donor.linewidth_fwhm = parse_quantity(key, text, Dimension::Frequency)?
            }
            "delay" => self.interferometer.delay = parse_quantity(key, text, Dimension::Time)?,
            "eta_d" | "detector_efficiency" => {
                self.interferometer.detector_efficiency = text
                    .trim()
                    .parse()
                    .map_err(|_| config_err(key, format!("`{text}` is not a number")))?
            }
            "cavity" => self.cavity = text.trim().to_string(),
            other => {
                return Err(Error::Config(format!(
                    "`{other}` is not sweepable; sweepable keys are {}",
                    SWEEPABLE_KEYS.join(", ")
                )))
            }
        }
        self.validate()
    }

    pub fn cavity_preset(&self) -> Result<&CavityPreset> {
        self.presets.get(&self.cavity).ok_or_else(|| {
            config_err(
                "cavity",
                format!(
                    "unknown preset `{}`; available: {}",
                    self.cavity,
                    self.presets.keys().cloned().collect::<Vec<_>>().join(", ")
                ),
            )
        })
    }

    pub fn preset(&self, name: &str) -> Result<&CavityPreset> {
        self.presets
            .get(name)
            .ok_or_else(|| config_err("presets", format!("no preset named `{name}`")))
    }

    /// Contact-interaction splitting from |ψ(0)|².
    pub fn contact_hyperfine(&self) -> f64 {
        hyperfine_splitting(&self.donor)
    }

    /// Separation of the two signal lines used by every downstream stage, Hz.
    pub fn line_splitting(&self) -> f64 {
        self.hyperfine_splitting.unwrap_or_else(|| self.contact_hyperfine())
    }

    pub fn electron_zeeman(&self) -> f64 {
        electron_zeeman_frequency(&self.env, self.donor.g0)
    }

    pub fn hole_spacing(&self) -> Result<f64> {
        match self.hole_spacing {
            HoleSpacing::Calibrated { occupation } => calibrate_hole_spacing(&self.env, occupation),
            HoleSpacing::Fixed(spacing) => {
                if spacing.is_finite() && spacing >= 0.0 {
                    Ok(spacing)
                } else {
                    Err(config_err("hole_spacing", "must be >= 0"))
                }
            }
        }
    }

    /// Flip-flop energy cost (Hz) used by the derived flip probability.
    pub fn flip_denominator(&self) -> f64 {
        let nuclear_zeeman = self.donor.gamma_n * self.env.b_field() / (2.0 * std::f64::consts::PI);
        flip_flop_denominator(
            self.electron_zeeman(),
            nuclear_zeeman,
            self.line_splitting(),
            self.full_flip_denominator,
        )
    }

    /// Capture flip probability per cycle derived from the level structure.
    pub fn derived_flip_probability(&self) -> Result<f64> {
        flip_probability_per_cycle_with_dos(self.line_splitting(), self.flip_denominator(), self.exciton_dos_factor)
    }

    pub fn flip_model(&self) -> Result<FlipModel> {
        let p = match self.capture_flip_probability {
            Some(p) => p,
            None => self.derived_flip_probability()?,
        };
        FlipModel::new(p, self.background_rate, self.randomization_threshold)
    }

    /// Secondary flip channels at their estimated strengths for the configured cavity.
    pub fn flip_channels(&self) -> Result<FlipChannels> {
        let emission = crate::emission::build_emission_model(
            &self.donor,
            crate::physics::lowest_level_occupation(&self.env, self.hole_spacing()?),
            self.cavity_preset()?,
            self.recapture_time,
        )?;
        Ok(FlipChannels {
            be_suppression: be_flip_suppression(self.donor.be_hyperfine, self.line_splitting().max(f64::MIN_POSITIVE))?,
            radiative_weight: emission.radiative_branching,
            include_be: self.include_be_channel,
            include_radiative: self.include_radiative_channel,
        })
    }

    pub fn simulation_config(&self) -> Result<SimulationConfig> {
        self.validate()?;
        let sim = SimulationConfig {
            env: self.env,
            donor: self.donor,
            cavity: self.cavity_preset()?.clone(),
            interferometer: self.interferometer,
            flip: self.flip_model()?,
            channels: self.flip_channels()?,
            hyperfine_splitting: self.line_splitting(),
            hole_spacing: self.hole_spacing()?,
            recapture_time: self.recapture_time,
            initial_nuclear_state: self.initial_state,
            duration: self.duration,
            seed: self.seed,
            trials: self.trials,
        };
        sim.validate()?;
        Ok(sim)
    }

    /// The single-donor linewidth profile: 3 MHz lines instead of the ensemble bound.
    pub fn single_donor_profile(&self) -> Self {
        let mut cfg = self.clone();
        cfg.donor.linewidth_fwhm = P_SINGLE_DONOR_LINEWIDTH;
        cfg
    }

    /// Hole spacing expressed as an effective g-factor.
    pub fn effective_hole_g(&self) -> Result<f64> {
        Ok(self.hole_spacing()? * PLANCK / (crate::constants::BOHR_MAGNETON * self.env.b_field()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(Config::from_toml_str("").unwrap(), Config::default());
    }

    #[test]
    fn parses_units_and_presets() {
        let cfg = Config::from_toml_str(
            r#"
            schema = 1
            b_field = "20 T"
            temperature = "2 K"
            psi0_sq = "0.44e24 cm^-3"
            linewidth_fwhm = "3 MHz"
            delay = "4 ns"
            eta_d = 1.0
            cavity = "custom"
            capture_flip_probability = "derived"
            dark_rate = "10 /s"

            [presets.custom]
            beta = 0.5
            radiative_rate_factor = 10.0

            [presets.dbr]
            beta = 0.7
            "#,
        )
        .unwrap();
        assert_eq!(cfg.env.b_field(), 20.0);
        assert_eq!(cfg.env.temperature(), 2.0);
        assert_eq!(cfg.donor.linewidth_fwhm, 3e6);
        assert_eq!(cfg.interferometer.delay, 4e-9);
        assert_eq!(cfg.interferometer.detector_efficiency, 1.0);
        assert_eq!(cfg.interferometer.dark_rate, 10.0);
        assert_eq!(cfg.capture_flip_probability, None);
        let custom = cfg.cavity_preset().unwrap();
        assert_eq!(
            (custom.beta, custom.radiative_rate_factor, custom.extra_collection),
            (0.5, 10.0, 1.0)
        );
        let dbr = cfg.preset("dbr").unwrap();
        assert_eq!(dbr.beta, 0.7);
        assert_eq!(dbr.radiative_rate_factor, 1.0 / 3.0);
    }

    #[test]
    fn rejects_bad_input() {
        for (text, needle) in [
            ("b_field = 10", "b_field"),
            ("b_field = \"10 K\"", "b_field"),
            ("line_width = \"150 MHz\"", "line_width"),
            ("schema = 2", "schema"),
            ("cavity = \"nope\"", "cavity"),
            ("[presets.dbr]\nbeta = 2.0", "beta"),
            ("[presets.dbr]\ngain = 2.0", "gain"),
            ("bias_parity = 0", "bias_parity"),
            ("b_field = \"-1 T\"", "b_field"),
            ("trials = 0", "trials"),
            ("initial_state = \"sideways\"", "initial_state"),
        ] {
            let err = Config::from_toml_str(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{text}: {err}");
        }
    }

    #[test]
    fn syntax_errors_carry_location() {
        let err = Config::from_toml_str("b_field = \"10 T\"\ntemperature = = 4")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn sweep_keys() {
        let mut cfg = Config::default();
        cfg.set_value("b_field", "20 T").unwrap();
        assert_eq!(cfg.env.b_field(), 20.0);
        cfg.set_value("eta_d", "0.8").unwrap();
        assert_eq!(cfg.interferometer.detector_efficiency, 0.8);
        cfg.set_value("cavity", "phc").unwrap();
        assert_eq!(cfg.cavity_preset().unwrap().radiative_rate_factor, 100.0);
        let err = cfg.set_value("psi0_sq", "1 m^-3").unwrap_err().to_string();
        assert!(err.contains("b_field") && err.contains("cavity"), "{err}");
        assert!(cfg.set_value("cavity", "missing").is_err());
    }

    #[test]
    fn derived_flip_probability_scales_with_field() {
        let mut cfg = Config::default();
        let p10 = cfg.derived_flip_probability().unwrap();
        cfg.set_value("b_field", "20 T").unwrap();
        let p20 = cfg.derived_flip_probability().unwrap();
        assert!((p10 / p20 - 4.0).abs() < 1e-12);
        cfg.full_flip_denominator = true;
        assert!(cfg.derived_flip_probability().unwrap() < p20);
    }

    #[test]
    fn simulation_config_resolves() {
        let sim = Config::default().simulation_config().unwrap();
        assert_eq!(sim.hyperfine_splitting, 60e6);
        assert!((sim.lowest_occupation() - 0.8).abs() < 1e-9);
        assert_eq!(sim.flip.p_flip_per_cycle, 5e-8);
        assert!(sim.channels.include_be && sim.channels.include_radiative);
        assert!((sim.channels.be_suppression - 1.0 / 900.0).abs() < 1e-12);
    }

    #[test]
    fn hole_spacing_override() {
        let cfg = Config::from_toml_str("hole_spacing = \"0.55 meV\"").unwrap();
        let spacing = cfg.hole_spacing().unwrap();
        assert!((spacing / 133e9 - 1.0).abs() < 0.01, "{spacing}");
        let g = Config::default().effective_hole_g().unwrap();
        assert!((g - 0.955).abs() < 0.01, "{g}");
    }
}
