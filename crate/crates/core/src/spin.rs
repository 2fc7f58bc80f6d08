//! Nuclear-spin destabilization by the optical cycle.
//!
//! Every free-electron capture after an Auger event, and every free-exciton
//! capture, can flip the nucleus through a virtual hyperfine flip-flop. Each
//! contributes ½(Δ/Z)² per cycle, with Δ the donor hyperfine splitting and Z
//! the flip-flop energy cost, dominated by the electron Zeeman frequency.

use crate::emission::{CavityPreset, EmissionModel};
use crate::error::{require_non_negative, require_positive, require_unit_interval, Error, Result};

pub const DEFAULT_RANDOMIZATION_THRESHOLD: f64 = 0.1;
/// Cross-relaxation time at 4 K and 10 T.
pub const DEFAULT_CROSS_RELAXATION_TIME: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipModel {
    /// Optically induced flip probability per excitation cycle.
    pub p_flip_per_cycle: f64,
    /// Equilibrium (cross-relaxation) flip rate, s⁻¹.
    pub background_rate: f64,
    /// Cumulative flip probability regarded as "randomized".
    pub randomization_threshold: f64,
}

impl FlipModel {
    pub fn new(p_flip_per_cycle: f64, background_rate: f64, randomization_threshold: f64) -> Result<Self> {
        let model = Self {
            p_flip_per_cycle,
            background_rate,
            randomization_threshold,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        require_unit_interval("p_flip_per_cycle", self.p_flip_per_cycle)?;
        require_non_negative("background_rate", self.background_rate)?;
        if !(self.randomization_threshold > 0.0 && self.randomization_threshold < 1.0) {
            return Err(Error::invalid(
                "randomization_threshold",
                format!("must lie in (0, 1), got {}", self.randomization_threshold),
            ));
        }
        Ok(())
    }

    /// Background flip probability accumulated over one cycle.
    pub fn background_probability(&self, cycle_time: f64) -> f64 {
        -(-self.background_rate * cycle_time).exp_m1()
    }
}

/// Secondary flip channels added on top of the capture flip-flop probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipChannels {
    /// Weight of the bound-exciton hyperfine channel relative to capture flips.
    pub be_suppression: f64,
    /// Weight of flips during radiative decay relative to capture flips.
    pub radiative_weight: f64,
    pub include_be: bool,
    pub include_radiative: bool,
}

impl FlipChannels {
    /// Only the leading-order capture channel.
    pub fn leading_order() -> Self {
        Self {
            be_suppression: 0.0,
            radiative_weight: 0.0,
            include_be: false,
            include_radiative: false,
        }
    }

    pub fn multiplier(&self) -> f64 {
        let mut m = 1.0;
        if self.include_be {
            m += self.be_suppression;
        }
        if self.include_radiative {
            m += self.radiative_weight;
        }
        m
    }

    /// Capture flip probability with the enabled secondary channels added.
    pub fn total_probability(&self, capture_probability: f64) -> f64 {
        (capture_probability * self.multiplier()).min(1.0)
    }
}

/// Energy cost of the flip-flop (Hz). The electron Zeeman term dominates; the
/// nuclear Zeeman and hyperfine terms are added only when `full` is set.
pub fn flip_flop_denominator(electron_zeeman: f64, nuclear_zeeman: f64, hyperfine: f64, full: bool) -> f64 {
    if full {
        electron_zeeman + nuclear_zeeman + hyperfine
    } else {
        electron_zeeman
    }
}

/// Per-cycle flip probability: two capture events (free electron and free
/// exciton), each ½(Δ/Z)², the exciton one scaled by a density-of-states factor.
pub fn flip_probability_per_cycle_with_dos(
    hyperfine: f64,
    electron_zeeman: f64,
    exciton_dos_factor: f64,
) -> Result<f64> {
    require_non_negative("hyperfine", hyperfine)?;
    require_non_negative("exciton_dos_factor", exciton_dos_factor)?;
    if electron_zeeman.is_nan() || electron_zeeman <= 0.0 {
        return Err(Error::Domain(format!(
            "flip probability needs a positive Zeeman frequency, got {electron_zeeman}"
        )));
    }
    let ratio = hyperfine / electron_zeeman;
    if ratio >= crate::physics::HIGH_FIELD_RATIO_LIMIT {
        log::warn!("hyperfine/Zeeman ratio {ratio:.3e} is outside the perturbative regime");
    }
    let per_capture = 0.5 * ratio * ratio;
    Ok(((1.0 + exciton_dos_factor) * per_capture).min(1.0))
}

/// (Δ/Z)², the per-cycle value with a unit exciton density-of-states factor.
pub fn flip_probability_per_cycle(hyperfine: f64, electron_zeeman: f64) -> Result<f64> {
    flip_probability_per_cycle_with_dos(hyperfine, electron_zeeman, 1.0)
}

/// Relative weight of the bound-exciton hyperfine flip channel.
pub fn be_flip_suppression(be_hyperfine: f64, donor_hyperfine: f64) -> Result<f64> {
    require_positive("donor_hyperfine", donor_hyperfine)?;
    require_non_negative("be_hyperfine", be_hyperfine)?;
    let r = be_hyperfine / donor_hyperfine;
    Ok(r * r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExcitationBudget {
    Bounded {
        /// ceil(threshold / p), the small-probability accumulation.
        linear: u64,
        /// ceil(ln(1 − threshold) / ln(1 − p)).
        geometric: u64,
    },
    /// No optically induced flips at all.
    Unbounded,
}

impl ExcitationBudget {
    pub fn linear(&self) -> Option<u64> {
        match *self {
            ExcitationBudget::Bounded { linear, .. } => Some(linear),
            ExcitationBudget::Unbounded => None,
        }
    }

    pub fn geometric(&self) -> Option<u64> {
        match *self {
            ExcitationBudget::Bounded { geometric, .. } => Some(geometric),
            ExcitationBudget::Unbounded => None,
        }
    }
}

/// Ceiling that ignores floating-point residue just above an integer.
fn ceil_count(x: f64) -> u64 {
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as u64
    } else {
        x.ceil() as u64
    }
}

pub fn excitations_to_randomization(model: &FlipModel) -> ExcitationBudget {
    let p = model.p_flip_per_cycle;
    if p <= 0.0 {
        return ExcitationBudget::Unbounded;
    }
    let threshold = model.randomization_threshold;
    let linear = ceil_count(threshold / p);
    let geometric = if p >= 1.0 {
        1
    } else {
        ceil_count((-threshold).ln_1p() / (-p).ln_1p())
    };
    ExcitationBudget::Bounded { linear, geometric }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonBudget {
    pub detected_photons: f64,
    pub power_snr: f64,
}

/// Detected photons and power SNR accumulated over `n_excitations` cycles.
pub fn budget_before_randomization(
    n_excitations: u64,
    emission: &EmissionModel,
    cavity: &CavityPreset,
    eta_d: f64,
    snr_per_photon: f64,
) -> Result<PhotonBudget> {
    require_unit_interval("eta_d", eta_d)?;
    require_non_negative("snr_per_photon", snr_per_photon)?;
    let detected = n_excitations as f64
        * emission.radiative_branching
        * emission.signal_fraction
        * cavity.beta
        * cavity.extra_collection
        * eta_d;
    Ok(PhotonBudget {
        detected_photons: detected,
        power_snr: detected * snr_per_photon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emission::build_emission_model;
    use crate::physics::DonorParameters;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn quoted_flip_probability() {
        let p = flip_probability_per_cycle(60e6, 280e9).unwrap();
        assert_relative_eq!(p, (60.0f64 / 280_000.0).powi(2), max_relative = 1e-14);
        assert!((p - 4.6e-8).abs() < 0.05e-8);
        assert_eq!(flip_probability_per_cycle(0.0, 280e9).unwrap(), 0.0);
        assert_relative_eq!(
            flip_probability_per_cycle(60e6, 560e9).unwrap(),
            p / 4.0,
            max_relative = 1e-14
        );
        assert!(flip_probability_per_cycle(60e6, 0.0).is_err());
    }

    #[test]
    fn dos_factor_scales_exciton_half() {
        let base = flip_probability_per_cycle_with_dos(60e6, 280e9, 0.0).unwrap();
        let full = flip_probability_per_cycle_with_dos(60e6, 280e9, 1.0).unwrap();
        assert_relative_eq!(full, 2.0 * base, max_relative = 1e-14);
    }

    #[test]
    fn be_suppression_values() {
        let s = be_flip_suppression(2e6, 60e6).unwrap();
        assert!((s - 1.1e-3).abs() < 0.02e-3);
        assert_eq!(be_flip_suppression(0.0, 60e6).unwrap(), 0.0);
        assert_eq!(be_flip_suppression(60e6, 60e6).unwrap(), 1.0);
        assert!(be_flip_suppression(2e6, 0.0).is_err());
    }

    #[test]
    fn randomization_budget() {
        let model = FlipModel::new(5e-8, 0.0, 0.1).unwrap();
        let budget = excitations_to_randomization(&model);
        assert_eq!(budget.linear(), Some(2_000_000));
        let half = FlipModel::new(5e-8, 0.0, 0.05).unwrap();
        assert_eq!(excitations_to_randomization(&half).linear(), Some(1_000_000));
        let unrounded = FlipModel::new(4.6e-8, 0.0, 0.1).unwrap();
        let n = excitations_to_randomization(&unrounded).linear().unwrap();
        assert!((n as f64 / 2.18e6 - 1.0).abs() < 0.01, "{n}");
        let none = FlipModel::new(0.0, 0.0, 0.1).unwrap();
        assert_eq!(excitations_to_randomization(&none), ExcitationBudget::Unbounded);
    }

    #[test]
    fn geometric_vs_linear_budget() {
        let model = FlipModel::new(5e-8, 0.0, 0.1).unwrap();
        let budget = excitations_to_randomization(&model);
        let (lin, geo) = (budget.linear().unwrap() as f64, budget.geometric().unwrap() as f64);
        // |ln 0.9| / 0.1 = 1.0536
        assert!(geo > lin && geo / lin < 1.06);
    }

    #[test]
    fn flip_model_validation() {
        assert!(FlipModel::new(-1e-9, 0.0, 0.1).is_err());
        assert!(FlipModel::new(1e-8, -1.0, 0.1).is_err());
        assert!(FlipModel::new(1e-8, 0.0, 1.0).is_err());
        assert!(FlipModel::new(1e-8, 0.0, 0.0).is_err());
    }

    fn reference_budget(cavity: &CavityPreset) -> PhotonBudget {
        let donor = DonorParameters::default();
        let emission = build_emission_model(&donor, 0.8, cavity, 1e-9).unwrap();
        budget_before_randomization(2_000_000, &emission, cavity, 0.4, 0.084).unwrap()
    }

    #[test]
    fn dbr_budget() {
        let b = reference_budget(&CavityPreset::dbr());
        assert!((b.detected_photons - 25.0).abs() <= 3.0, "{}", b.detected_photons);
        assert!((b.power_snr - 2.1).abs() <= 0.2, "{}", b.power_snr);
    }

    #[test]
    fn photonic_crystal_budget() {
        let b = reference_budget(&CavityPreset::photonic_crystal());
        assert!(
            (b.detected_photons / 4.8e3 - 1.0).abs() <= 0.1,
            "{}",
            b.detected_photons
        );
        assert!((b.power_snr / 400.0 - 1.0).abs() <= 0.1, "{}", b.power_snr);
    }

    #[test]
    fn empty_budget() {
        let donor = DonorParameters::default();
        let cavity = CavityPreset::dbr();
        let emission = build_emission_model(&donor, 0.8, &cavity, 1e-9).unwrap();
        let b = budget_before_randomization(0, &emission, &cavity, 0.4, 0.084).unwrap();
        assert_eq!((b.detected_photons, b.power_snr), (0.0, 0.0));
    }

    #[test]
    fn background_negligible_at_defaults() {
        let donor = DonorParameters::default();
        let emission = build_emission_model(&donor, 0.8, &CavityPreset::dbr(), 1e-9).unwrap();
        let model = FlipModel::new(5e-8, 1.0 / DEFAULT_CROSS_RELAXATION_TIME, 0.1).unwrap();
        let n = excitations_to_randomization(&model).linear().unwrap();
        let exposure = model.background_rate * n as f64 * emission.cycle_time;
        assert!((exposure - 0.02).abs() < 0.001, "{exposure}");
        assert!(exposure < model.randomization_threshold / 4.0);
    }

    #[test]
    fn radiative_channel_negligible() {
        let donor = DonorParameters::default();
        let emission = build_emission_model(&donor, 0.8, &CavityPreset::bare(), 1e-9).unwrap();
        assert!(emission.radiative_branching < 1.0 / 5000.0);
        let inverse = 1.0 / emission.radiative_branching;
        assert!((inverse / 7000.0 - 1.0).abs() < 0.1, "{inverse}");
    }

    #[test]
    fn channel_multiplier() {
        let channels = FlipChannels {
            be_suppression: 1.1e-3,
            radiative_weight: 1.5e-4,
            include_be: true,
            include_radiative: false,
        };
        assert_relative_eq!(channels.total_probability(5e-8), 5e-8 * 1.0011);
        assert_eq!(FlipChannels::leading_order().total_probability(5e-8), 5e-8);
    }

    proptest! {
        #[test]
        fn flip_depends_only_on_ratio(a in 1e-3f64..1e3, hf in 1e6f64..1e8, z in 1e10f64..1e12) {
            let p = flip_probability_per_cycle(hf, z).unwrap();
            let q = flip_probability_per_cycle(a * hf, a * z).unwrap();
            prop_assert!((p - q).abs() <= 1e-12 * p);
        }

        #[test]
        fn budget_linear(n in 1u64..10_000_000, k in 1u64..5, eta in 0.01f64..0.5) {
            let donor = DonorParameters::default();
            let cavity = CavityPreset::dbr();
            let emission = build_emission_model(&donor, 0.8, &cavity, 1e-9).unwrap();
            let one = budget_before_randomization(n, &emission, &cavity, eta, 0.084).unwrap();
            let many = budget_before_randomization(n * k, &emission, &cavity, eta, 0.084).unwrap();
            let twice_eta = budget_before_randomization(n, &emission, &cavity, 2.0 * eta, 0.084).unwrap();
            prop_assert!((many.detected_photons - k as f64 * one.detected_photons).abs() <= 1e-9 * many.detected_photons);
            prop_assert!((twice_eta.power_snr - 2.0 * one.power_snr).abs() <= 1e-12 * twice_eta.power_snr);
        }

        #[test]
        fn geometric_within_six_percent(p in 1e-10f64..1e-4) {
            let budget = excitations_to_randomization(&FlipModel::new(p, 0.0, 0.1).unwrap());
            let ratio = budget.geometric().unwrap() as f64 / budget.linear().unwrap() as f64;
            prop_assert!((1.0 - 1e-6..1.06).contains(&ratio));
        }
    }
}
