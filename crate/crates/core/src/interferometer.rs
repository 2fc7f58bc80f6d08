//! Mach-Zehnder direct frequency discrimination.
//!
//! A photon of angular detuning δ from the bias reference ω₀ leaves port e with
//! probability ½(1 − s·sin δτ), where s = ±1 encodes the parity of m in the
//! bias condition ω₀τ = (m + ½)π. The bias is imposed symbolically: with
//! ω = ω₀ + δ, cos(ωτ) = −s·sin(δτ) exactly, so optical frequencies never
//! enter a trigonometric argument.
//!
//! The photocurrent per detected photon is the ±1 variable (+1 for port e).
//! Averaging over a Lorentzian line of FWHM γ multiplies the fringe by the
//! Cauchy characteristic function e^{−γτ/2}, which gives the mean current and
//! variance below.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::Open01;

use crate::error::{require_non_negative, require_positive, require_unit_interval, Error, Result};

/// Lorentzian emission line in the rotating frame (angular units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    /// Offset of the line center from ω₀, rad/s.
    pub detuning: f64,
    /// FWHM, rad/s.
    pub fwhm: f64,
}

impl SpectralLine {
    pub fn new(detuning: f64, fwhm: f64) -> Result<Self> {
        if !detuning.is_finite() {
            return Err(Error::invalid("detuning", "must be finite"));
        }
        require_non_negative("fwhm", fwhm)?;
        Ok(Self { detuning, fwhm })
    }

    /// Build from ordinary frequencies in Hz.
    pub fn from_hz(detuning_hz: f64, fwhm_hz: f64) -> Result<Self> {
        Self::new(2.0 * PI * detuning_hz, 2.0 * PI * fwhm_hz)
    }
}

/// Sign s in cos(ω₀τ + δτ) = −s·sin(δτ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BiasParity {
    /// m even.
    #[default]
    Even,
    /// m odd.
    Odd,
}

impl BiasParity {
    pub fn sign(self) -> f64 {
        match self {
            BiasParity::Even => 1.0,
            BiasParity::Odd => -1.0,
        }
    }

    pub fn from_sign(sign: i64) -> Result<Self> {
        match sign {
            1 => Ok(BiasParity::Even),
            -1 => Ok(BiasParity::Odd),
            other => Err(Error::invalid("bias_parity", format!("must be +1 or -1, got {other}"))),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            BiasParity::Even => BiasParity::Odd,
            BiasParity::Odd => BiasParity::Even,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerConfig {
    /// Arm delay τ, s.
    pub delay: f64,
    pub bias_parity: BiasParity,
    pub detector_efficiency: f64,
    /// Dark counts per second, summed over both detectors.
    pub dark_rate: f64,
}

impl InterferometerConfig {
    pub fn new(delay: f64, bias_parity: BiasParity, detector_efficiency: f64, dark_rate: f64) -> Result<Self> {
        let cfg = Self {
            delay,
            bias_parity,
            detector_efficiency,
            dark_rate,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("delay", self.delay)?;
        require_unit_interval("detector_efficiency", self.detector_efficiency)?;
        require_non_negative("dark_rate", self.dark_rate)
    }
}

/// Exit port of the second beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Port {
    E,
    F,
}

impl Port {
    /// Contribution to the subtracted photocurrent.
    pub fn current(self) -> i64 {
        match self {
            Port::E => 1,
            Port::F => -1,
        }
    }
}

/// cos(ωτ) for a photon at detuning δ under the symbolic bias condition.
fn biased_fringe(detuning: f64, cfg: &InterferometerConfig) -> f64 {
    -cfg.bias_parity.sign() * (detuning * cfg.delay).sin()
}

/// Mean of the ±1 port variable over the line, e^{−γτ/2}·cos(ωτ).
pub fn mean_current(line: &SpectralLine, cfg: &InterferometerConfig) -> f64 {
    (-0.5 * line.fwhm * cfg.delay).exp() * biased_fringe(line.detuning, cfg)
}

/// 1 − e^{−γτ}·cos²(ωτ).
pub fn current_variance(line: &SpectralLine, cfg: &InterferometerConfig) -> f64 {
    let fringe = biased_fringe(line.detuning, cfg);
    1.0 - (-line.fwhm * cfg.delay).exp() * fringe * fringe
}

/// Power SNR per photon for two lines split by Δω, at the optimal bias.
///
/// 4·sin²(Δωτ/2) / (cos²(Δωτ/2) + e^{γτ} − 1). Without broadening the lines
/// become perfectly distinguishable at Δωτ = π and the ratio diverges; that
/// point is reported as a domain error instead of an infinity.
pub fn snr_per_photon(delta_omega: f64, gamma: f64, tau: f64) -> Result<f64> {
    require_positive("tau", tau)?;
    require_non_negative("gamma", gamma)?;
    let half = 0.5 * delta_omega * tau;
    let (s, c) = half.sin_cos();
    let numerator = 4.0 * s * s;
    let denominator = c * c + (gamma * tau).exp_m1();
    let snr = numerator / denominator;
    // cos(Δωτ/2) cannot be resolved below the rounding error of the phase
    let resolution = 4.0 * f64::EPSILON * half.abs().max(1.0);
    if denominator <= resolution * resolution || !snr.is_finite() {
        return Err(Error::Domain(format!(
            "SNR per photon diverges (Δωτ = {:.6}, γτ = {:.3e}): lines are perfectly separated",
            2.0 * half,
            gamma * tau
        )));
    }
    Ok(snr)
}

/// Grid points per fringe period used to bracket the global maximum.
const SCAN_POINTS_PER_FRINGE: f64 = 64.0;
const MIN_SCAN_POINTS: usize = 4096;
const GOLDEN_TOLERANCE: f64 = 1e-12;

/// Delay that maximizes [`snr_per_photon`] over τ ∈ (0, 20/γ].
///
/// The objective oscillates with period 2π/Δω in τ, so a uniform scan first
/// brackets the best fringe and a golden-section search refines inside it.
pub fn optimal_delay(delta_omega: f64, gamma: f64) -> Result<(f64, f64)> {
    require_positive("delta_omega", delta_omega)?;
    require_non_negative("gamma", gamma)?;
    if gamma == 0.0 {
        return Err(Error::Domain(
            "optimal delay needs γ > 0; without broadening SNR grows until Δωτ = π".into(),
        ));
    }
    let tau_max = 20.0 / gamma;
    let fringes = tau_max * delta_omega / (2.0 * PI);
    let n = MIN_SCAN_POINTS.max((fringes * SCAN_POINTS_PER_FRINGE).ceil() as usize);
    let step = tau_max / n as f64;
    let objective = |tau: f64| snr_per_photon(delta_omega, gamma, tau).unwrap_or(f64::INFINITY);

    let (best_index, _) = (1..=n)
        .map(|i| (i, objective(i as f64 * step)))
        .fold(
            (1, f64::NEG_INFINITY),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    let lo = (best_index as f64 - 1.0) * step;
    let hi = ((best_index + 1) as f64 * step).min(tau_max);

    let tau = golden_section_max(objective, lo.max(f64::MIN_POSITIVE), hi);
    Ok((tau, snr_per_photon(delta_omega, gamma, tau)?))
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > GOLDEN_TOLERANCE * (a.abs() + b.abs()) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Time needed to reach `target_power_snr` at the given per-photon SNR and flux.
pub fn integration_time(target_power_snr: f64, snr_per_photon: f64, detected_flux: f64) -> Result<f64> {
    require_positive("target_power_snr", target_power_snr)?;
    require_positive("snr_per_photon", snr_per_photon)?;
    require_positive("detected_flux", detected_flux)?;
    Ok(target_power_snr / (snr_per_photon * detected_flux))
}

/// Probability that a photon at `photon_detuning` (rad/s) exits port e.
pub fn port_probability(photon_detuning: f64, cfg: &InterferometerConfig) -> f64 {
    0.5 * (1.0 - cfg.bias_parity.sign() * (photon_detuning * cfg.delay).sin())
}

/// Cauchy draw: center + (γ/2)·tan(π(u − ½)), u ∈ (0, 1).
pub fn sample_photon_detuning<R: Rng + ?Sized>(line: &SpectralLine, rng: &mut R) -> f64 {
    if line.fwhm == 0.0 {
        return line.detuning;
    }
    let u: f64 = rng.sample(Open01);
    line.detuning + 0.5 * line.fwhm * (PI * (u - 0.5)).tan()
}

pub fn sample_port<R: Rng + ?Sized>(line: &SpectralLine, cfg: &InterferometerConfig, rng: &mut R) -> Port {
    let detuning = sample_photon_detuning(line, rng);
    if rng.random::<f64>() < port_probability(detuning, cfg) {
        Port::E
    } else {
        Port::F
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const MHZ: f64 = 2.0 * PI * 1e6;

    fn cfg(tau: f64) -> InterferometerConfig {
        InterferometerConfig::new(tau, BiasParity::Even, 1.0, 0.0).unwrap()
    }

    /// Mean current evaluated with an explicit optical carrier ω₀τ = (m + ½)π.
    fn explicit_mean(detuning: f64, fwhm: f64, tau: f64, m: i64) -> f64 {
        let bias_phase = (m as f64 + 0.5) * PI;
        (-0.5 * fwhm * tau).exp() * (bias_phase + detuning * tau).cos()
    }

    #[test]
    fn mean_current_zero_at_bias() {
        for fwhm in [0.0, 150.0 * MHZ, 1e12] {
            let line = SpectralLine::new(0.0, fwhm).unwrap();
            assert_eq!(mean_current(&line, &cfg(2e-9)), 0.0);
        }
    }

    #[test]
    fn mean_current_design_point() {
        let line = SpectralLine::new(30.0 * MHZ, 150.0 * MHZ).unwrap();
        let mean = mean_current(&line, &cfg(2e-9));
        let expected = (-0.942_477_796_076_938f64).exp() * -(0.376_991_118_430_775f64).sin();
        assert_relative_eq!(mean, expected, max_relative = 1e-12);
        assert!((mean + 0.143).abs() < 1e-3);
        // m even ↔ s = +1
        assert_relative_eq!(mean, explicit_mean(30.0 * MHZ, 150.0 * MHZ, 2e-9, 0), epsilon = 1e-12);
        let odd = InterferometerConfig {
            bias_parity: BiasParity::Odd,
            ..cfg(2e-9)
        };
        assert_relative_eq!(
            mean_current(&line, &odd),
            explicit_mean(30.0 * MHZ, 150.0 * MHZ, 2e-9, 1),
            epsilon = 1e-12
        );
    }

    #[test]
    fn full_dephasing() {
        let line = SpectralLine::new(30.0 * MHZ, 1e15).unwrap();
        assert!(mean_current(&line, &cfg(2e-9)).abs() < 1e-300);
        assert_relative_eq!(current_variance(&line, &cfg(2e-9)), 1.0);
    }

    #[test]
    fn variance_design_point() {
        let line = SpectralLine::new(30.0 * MHZ, 150.0 * MHZ).unwrap();
        let var = current_variance(&line, &cfg(2e-9));
        let expected = 1.0 - (-1.884_955_592_153_876f64).exp() * 0.376_991_118_430_775f64.sin().powi(2);
        assert_relative_eq!(var, expected, max_relative = 1e-12);
        assert!((var - 0.979).abs() < 1e-3);
        let mirrored = SpectralLine::new(-30.0 * MHZ, 150.0 * MHZ).unwrap();
        assert_relative_eq!(current_variance(&mirrored, &cfg(2e-9)), var);
    }

    #[test]
    fn variance_vanishes_off_bias_without_delay_spread() {
        // cos² = 1 and γτ = 0: a detuning of −π/(2τ) puts the photon on a fringe extremum
        let tau = 2e-9;
        let line = SpectralLine::new(-PI / (2.0 * tau), 0.0).unwrap();
        assert!(current_variance(&line, &cfg(tau)).abs() < 1e-15);
    }

    #[test]
    fn snr_reference_value() {
        let snr = snr_per_photon(60.0 * MHZ, 150.0 * MHZ, 2e-9).unwrap();
        assert!((snr - 0.084).abs() <= 0.001, "{snr}");
        assert_eq!(snr_per_photon(0.0, 150.0 * MHZ, 2e-9).unwrap(), 0.0);
    }

    #[test]
    fn snr_without_broadening() {
        // γ = 0 reduces to 4·tan²(Δωτ/2)
        let tau = 1e-9;
        let dw = 0.5 * PI / tau;
        let snr = snr_per_photon(dw, 0.0, tau).unwrap();
        assert_relative_eq!(snr, 4.0 * (0.25 * PI).tan().powi(2), max_relative = 1e-12);
        assert!(snr_per_photon(PI / tau, 0.0, tau).is_err());
        assert!(snr_per_photon(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn snr_matches_mean_and_variance() {
        // (μ₊ − μ₋)² / σ² with μ, σ² from the per-line formulas
        let (dw, gamma, tau) = (60.0 * MHZ, 150.0 * MHZ, 2e-9);
        let up = SpectralLine::new(0.5 * dw, gamma).unwrap();
        let down = SpectralLine::new(-0.5 * dw, gamma).unwrap();
        let c = cfg(tau);
        let diff = mean_current(&up, &c) - mean_current(&down, &c);
        let ratio = diff * diff / current_variance(&up, &c);
        assert_relative_eq!(ratio, snr_per_photon(dw, gamma, tau).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn optimal_delay_design_point() {
        let (tau, snr) = optimal_delay(60.0 * MHZ, 150.0 * MHZ).unwrap();
        // brute-force reference: scipy bounded minimize on the same expression
        assert_relative_eq!(tau, 2.018_649e-9, max_relative = 1e-5);
        assert_relative_eq!(snr, 0.084_041_35, max_relative = 1e-6);
        for probe in [0.999 * tau, 1.001 * tau] {
            assert!(snr_per_photon(60.0 * MHZ, 150.0 * MHZ, probe).unwrap() <= snr);
        }
    }

    #[test]
    fn optimal_delay_scaling_and_narrow_line() {
        let (tau, snr) = optimal_delay(60.0 * MHZ, 150.0 * MHZ).unwrap();
        let (tau2, snr2) = optimal_delay(120.0 * MHZ, 300.0 * MHZ).unwrap();
        assert_relative_eq!(tau2, tau / 2.0, max_relative = 1e-6);
        assert_relative_eq!(snr2, snr, max_relative = 1e-9);

        let (tau_n, snr_n) = optimal_delay(60.0 * MHZ, 3.0 * MHZ).unwrap();
        assert!(snr_n > 1.0, "{snr_n}");
        // first fringe, just short of Δωτ = π
        assert!(tau_n < 1.0 / (2.0 * 60e6) && tau_n > 0.8 / (2.0 * 60e6), "{tau_n}");
        assert!(optimal_delay(60.0 * MHZ, 0.0).is_err());
        assert!(optimal_delay(0.0, 1.0).is_err());
    }

    #[test]
    fn integration_times() {
        let t = integration_time(1.0, 0.084, 100.0).unwrap();
        assert_relative_eq!(t, 0.119_047_619, max_relative = 1e-8);
        let fast = integration_time(1.0, 0.084, 2e4).unwrap();
        assert!((fast - 6e-4).abs() < 0.1e-4);
        assert_relative_eq!(integration_time(2.0, 0.084, 100.0).unwrap(), 2.0 * t);
        assert!(integration_time(1.0, 0.0, 100.0).is_err());
    }

    #[test]
    fn port_probability_values() {
        let c = cfg(2e-9);
        assert_eq!(port_probability(0.0, &c), 0.5);
        let p = port_probability(30.0 * MHZ, &c);
        assert_relative_eq!(p, 0.5 * (1.0 - 0.376_991_118_430_775f64.sin()), max_relative = 1e-12);
        assert!((p - 0.316).abs() < 1e-3);
        let full = -PI / (2.0 * c.delay);
        assert_relative_eq!(port_probability(full, &c), 1.0);
    }

    #[test]
    fn delta_line_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let line = SpectralLine::new(12.5, 0.0).unwrap();
        for _ in 0..100 {
            assert_eq!(sample_photon_detuning(&line, &mut rng), 12.5);
        }
    }

    #[test]
    fn cauchy_median_and_iqr() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let line = SpectralLine::new(30.0 * MHZ, 150.0 * MHZ).unwrap();
        let n = 100_000;
        let mut draws: Vec<f64> = (0..n).map(|_| sample_photon_detuning(&line, &mut rng)).collect();
        draws.sort_by(f64::total_cmp);
        let median = draws[n / 2];
        let iqr = draws[3 * n / 4] - draws[n / 4];
        // sample quantile SE: sqrt(p(1−p)/n)/f(x_p); for Cauchy with half width h, f(median) = 1/(πh)
        let h = 0.5 * line.fwhm;
        let se_median = (0.25 / n as f64).sqrt() * PI * h;
        assert!((median - line.detuning).abs() < 5.0 * se_median);
        // f at the quartiles is 1/(2πh)
        let se_quartile = (0.1875 / n as f64).sqrt() * 2.0 * PI * h;
        assert!((iqr - 2.0 * h).abs() < 5.0 * 2.0 * se_quartile, "{iqr} vs {}", 2.0 * h);
    }

    proptest! {
        #[test]
        fn snr_scale_invariance(a in 0.1f64..10.0, dw in 1e6f64..1e9, gamma in 1e6f64..1e9, tau in 1e-10f64..1e-8) {
            let base = snr_per_photon(dw, gamma, tau).unwrap();
            let scaled = snr_per_photon(a * dw, a * gamma, tau / a).unwrap();
            prop_assert!((base - scaled).abs() <= 1e-9 * base.abs().max(1e-300));
        }

        #[test]
        fn snr_decreasing_in_gamma(x in 0.01f64..3.1, gamma in 1e6f64..1e9, bump in 1.001f64..3.0) {
            let tau = 1e-9;
            let dw = x / tau;
            prop_assert!(snr_per_photon(dw, gamma * bump, tau).unwrap() < snr_per_photon(dw, gamma, tau).unwrap());
        }

        #[test]
        fn port_complement(detuning in -1e9f64..1e9, tau in 1e-10f64..1e-8) {
            let c = cfg(tau);
            let sum = port_probability(detuning, &c) + port_probability(-detuning, &c);
            prop_assert!((sum - 1.0).abs() < 1e-14);
        }

        #[test]
        fn parity_flip(detuning in -1e9f64..1e9, fwhm in 0.0f64..1e9, tau in 1e-10f64..1e-8) {
            let even = cfg(tau);
            let odd = InterferometerConfig { bias_parity: BiasParity::Odd, ..even };
            let line = SpectralLine::new(detuning, fwhm).unwrap();
            prop_assert_eq!(mean_current(&line, &odd), -mean_current(&line, &even));
            prop_assert_eq!(current_variance(&line, &odd), current_variance(&line, &even));
        }

        #[test]
        fn variance_identity(detuning in -1e9f64..1e9, fwhm in 0.0f64..1e9, tau in 1e-10f64..1e-8) {
            let c = cfg(tau);
            let line = SpectralLine::new(detuning, fwhm).unwrap();
            let fringe = -(detuning * tau).sin();
            let lhs = current_variance(&line, &c) + (-fwhm * tau).exp() * fringe * fringe;
            prop_assert!((lhs - 1.0).abs() < 1e-14);
        }
    }
}
