//! Closed-form reproduction of the readout design numbers from a [`Config`].

use std::f64::consts::PI;

use crate::config::Config;
use crate::emission::{build_emission_model, collected_flux, detected_flux, emitted_signal_flux, EmissionModel};
use crate::error::{Error, Result};
use crate::interferometer::{integration_time, optimal_delay, snr_per_photon};
use crate::physics::{frequency_to_mev, lowest_level_occupation, neutralization_electron_density};
use crate::spin::{be_flip_suppression, budget_before_randomization, excitations_to_randomization};

/// One reproduced quantity with its reference value and acceptance band.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub quantity: &'static str,
    pub unit: &'static str,
    pub computed: f64,
    pub reference: f64,
    pub lower: f64,
    pub upper: f64,
}

impl CheckRow {
    fn relative(quantity: &'static str, unit: &'static str, computed: f64, reference: f64, tol: f64) -> Self {
        Self {
            quantity,
            unit,
            computed,
            reference,
            lower: reference * (1.0 - tol),
            upper: reference * (1.0 + tol),
        }
    }

    fn band(quantity: &'static str, unit: &'static str, computed: f64, reference: f64, lower: f64, upper: f64) -> Self {
        Self {
            quantity,
            unit,
            computed,
            reference,
            lower,
            upper,
        }
    }

    pub fn deviation(&self) -> f64 {
        self.computed / self.reference - 1.0
    }

    pub fn passed(&self) -> bool {
        self.computed >= self.lower && self.computed <= self.upper
    }
}

fn emission_for(cfg: &Config, preset: &str) -> Result<EmissionModel> {
    let occupation = lowest_level_occupation(&cfg.env, cfg.hole_spacing()?);
    build_emission_model(&cfg.donor, occupation, cfg.preset(preset)?, cfg.recapture_time)
}

fn delta_omega(cfg: &Config) -> f64 {
    2.0 * PI * cfg.line_splitting()
}

fn gamma(cfg: &Config) -> f64 {
    2.0 * PI * cfg.donor.linewidth_fwhm
}

/// Per-photon SNR at the configured delay.
pub fn configured_snr(cfg: &Config) -> Result<f64> {
    snr_per_photon(delta_omega(cfg), gamma(cfg), cfg.interferometer.delay)
}

/// Every reference design number, evaluated for `cfg`.
///
/// The cavity rows always use the `bare`, `dbr` and `phc` presets regardless of
/// the selected cavity. Integration times use collected flux without detector
/// loss; the photonic-crystal flux row excludes downstream collection, while
/// its integration time includes it.
pub fn paper_table(cfg: &Config) -> Result<Vec<CheckRow>> {
    let hf = cfg.contact_hyperfine();
    let zeeman = cfg.electron_zeeman();
    let occupation = lowest_level_occupation(&cfg.env, cfg.hole_spacing()?);

    let bare = emission_for(cfg, "bare")?;
    let dbr = emission_for(cfg, "dbr")?;
    let phc = emission_for(cfg, "phc")?;
    let dbr_preset = cfg.preset("dbr")?;
    let phc_preset = cfg.preset("phc")?;
    let bare_flux = collected_flux(&bare, cfg.preset("bare")?);
    let dbr_flux = collected_flux(&dbr, dbr_preset);
    let phc_mode_flux = emitted_signal_flux(&phc) * phc_preset.beta;
    let phc_flux = collected_flux(&phc, phc_preset);

    let snr = configured_snr(cfg)?;
    let (tau_opt, snr_opt) = optimal_delay(delta_omega(cfg), gamma(cfg))?;
    let t_dbr = integration_time(cfg.target_snr, snr, dbr_flux)?;
    let t_phc = integration_time(cfg.target_snr, snr, phc_flux)?;

    let p_flip = cfg.derived_flip_probability()?;
    let be = be_flip_suppression(cfg.donor.be_hyperfine, cfg.line_splitting())?;
    let cycles = excitations_to_randomization(&cfg.flip_model()?)
        .linear()
        .ok_or_else(|| Error::Domain("no optical flips: randomization budget is unbounded".into()))?;
    let eta = cfg.interferometer.detector_efficiency;
    let dbr_budget = budget_before_randomization(cycles, &dbr, dbr_preset, eta, snr)?;
    let phc_budget = budget_before_randomization(cycles, &phc, phc_preset, eta, snr)?;
    let density = neutralization_electron_density(&cfg.donor, &cfg.env, cfg.neutralization_time)? * 1e-6;

    Ok(vec![
        CheckRow::relative("hyperfine_splitting", "Hz", hf, 60e6, 0.03),
        CheckRow::relative("electron_zeeman", "Hz", zeeman, 280e9, 0.02),
        CheckRow::relative("electron_zeeman_energy", "meV", frequency_to_mev(zeeman), 1.2, 0.05),
        CheckRow::relative("lowest_level_occupation", "1", occupation, 0.8, 1e-6),
        CheckRow::relative("flux_bare", "1/s", bare_flux, 400.0, 0.10),
        CheckRow::relative("flux_dbr", "1/s", dbr_flux, 100.0, 0.10),
        CheckRow::relative("flux_phc", "1/s", phc_mode_flux, 4e4, 0.10),
        CheckRow::band("snr_per_photon", "1", snr, 0.084, 0.083, 0.085),
        CheckRow::band("optimal_delay", "s", tau_opt, 2e-9, 1.9e-9, 2.3e-9),
        CheckRow::band("optimal_snr_per_photon", "1", snr_opt, 0.084, 0.084, 0.085),
        CheckRow::band("integration_time_dbr", "s", t_dbr, 0.1, 0.10, 0.13),
        CheckRow::band("integration_time_phc", "s", t_phc, 1e-3, 4e-4, 1.2e-3),
        CheckRow::band("flip_probability", "1", p_flip, 5e-8, 4.3e-8, 5.2e-8),
        CheckRow::band("be_flip_suppression", "1", be, 1e-3, 1.0e-3, 1.2e-3),
        CheckRow::relative(
            "radiative_decay_rarity",
            "1",
            1.0 / bare.radiative_branching,
            7000.0,
            0.10,
        ),
        CheckRow::band("randomization_cycles", "1", cycles as f64, 2e6, 2e6, 2e6),
        CheckRow::band("photons_dbr", "1", dbr_budget.detected_photons, 25.0, 22.0, 28.0),
        CheckRow::relative("photons_phc", "1", phc_budget.detected_photons, 4.8e3, 0.10),
        CheckRow::band("budget_snr_dbr", "1", dbr_budget.power_snr, 2.0, 1.9, 2.3),
        CheckRow::relative("budget_snr_phc", "1", phc_budget.power_snr, 400.0, 0.10),
        CheckRow::band("neutralization_density", "cm^-3", density, 1e13, 1e13 / 1.5, 1.5e13),
    ])
}

/// Analytic pipeline for the selected cavity, used by parameter sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub line_splitting: f64,
    pub electron_zeeman: f64,
    pub lowest_occupation: f64,
    pub cycle_time: f64,
    pub radiative_branching: f64,
    pub emitted_flux: f64,
    pub collected_flux: f64,
    pub detected_flux: f64,
    pub snr_per_photon: f64,
    pub optimal_delay: f64,
    pub optimal_snr: f64,
    /// Time to the target SNR at the detected flux; `None` when nothing is detected.
    pub integration_time: Option<f64>,
    /// Derived from the level structure, whatever the configured override.
    pub derived_flip_probability: f64,
    /// Value driving the budget below.
    pub flip_probability: f64,
    pub randomization_cycles: Option<u64>,
    pub budget_photons: Option<f64>,
    pub budget_snr: Option<f64>,
}

pub fn summarize(cfg: &Config) -> Result<Summary> {
    let cavity = cfg.cavity_preset()?;
    let occupation = lowest_level_occupation(&cfg.env, cfg.hole_spacing()?);
    let emission = build_emission_model(&cfg.donor, occupation, cavity, cfg.recapture_time)?;
    let collected = collected_flux(&emission, cavity);
    let eta = cfg.interferometer.detector_efficiency;
    let detected = detected_flux(collected, eta)?;
    let snr = configured_snr(cfg)?;
    let (optimal_delay, optimal_snr) = optimal_delay(delta_omega(cfg), gamma(cfg))?;
    let integration = if detected > 0.0 && snr > 0.0 {
        Some(integration_time(cfg.target_snr, snr, detected)?)
    } else {
        None
    };
    let flip = cfg.flip_model()?;
    let cycles = excitations_to_randomization(&flip).linear();
    let budget = cycles
        .map(|n| budget_before_randomization(n, &emission, cavity, eta, snr))
        .transpose()?;
    Ok(Summary {
        line_splitting: cfg.line_splitting(),
        electron_zeeman: cfg.electron_zeeman(),
        lowest_occupation: occupation,
        cycle_time: emission.cycle_time,
        radiative_branching: emission.radiative_branching,
        emitted_flux: emitted_signal_flux(&emission),
        collected_flux: collected,
        detected_flux: detected,
        snr_per_photon: snr,
        optimal_delay,
        optimal_snr,
        integration_time: integration,
        derived_flip_probability: cfg.derived_flip_probability()?,
        flip_probability: flip.p_flip_per_cycle,
        randomization_cycles: cycles,
        budget_photons: budget.map(|b| b.detected_photons),
        budget_snr: budget.map(|b| b.power_snr),
    })
}

/// Re-evaluates the pipeline with `axis` set to each of `values`, in order.
pub fn sweep(cfg: &Config, axis: &str, values: &[String]) -> Result<Vec<(String, Summary)>> {
    if values.is_empty() {
        return Err(Error::invalid("values", "sweep needs at least one value"));
    }
    values
        .iter()
        .map(|v| {
            let mut point = cfg.clone();
            point.set_value(axis, v)?;
            Ok((v.clone(), summarize(&point)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnrScan {
    pub points: Vec<(f64, f64)>,
    pub optimal_delay: f64,
    pub optimal_snr: f64,
}

/// SNR per photon on `points` evenly spaced delays over `[tau_min, tau_max]`.
pub fn snr_scan(cfg: &Config, tau_min: f64, tau_max: f64, points: usize) -> Result<SnrScan> {
    if !(tau_min > 0.0 && tau_max > tau_min && tau_max.is_finite()) {
        return Err(Error::invalid(
            "tau_range",
            format!("need 0 < tau_min < tau_max, got [{tau_min}, {tau_max}]"),
        ));
    }
    if points < 2 {
        return Err(Error::invalid("points", "a scan needs at least 2 points"));
    }
    let (dw, g) = (delta_omega(cfg), gamma(cfg));
    let step = (tau_max - tau_min) / (points - 1) as f64;
    let points = (0..points)
        .map(|i| {
            let tau = tau_min + i as f64 * step;
            Ok((tau, snr_per_photon(dw, g, tau)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (optimal_delay, optimal_snr) = optimal_delay(dw, g)?;
    Ok(SnrScan {
        points,
        optimal_delay,
        optimal_snr,
    })
}
