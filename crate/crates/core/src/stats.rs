//! Small statistics helpers for the readout estimator and fidelity tables.

use statrs::distribution::{ContinuousCDF, Normal};

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

pub fn normal_cdf(x: f64) -> f64 {
    standard_normal().cdf(x)
}

/// Two-sided z value for a central `level` interval (0.99 → 2.5758).
pub fn z_for_confidence(level: f64) -> f64 {
    standard_normal().inverse_cdf(0.5 + 0.5 * level)
}

/// Wilson score interval for a binomial proportion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilsonInterval {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl WilsonInterval {
    pub fn new(successes: u64, trials: u64, z: f64) -> Self {
        if trials == 0 {
            return Self {
                estimate: f64::NAN,
                lower: 0.0,
                upper: 1.0,
            };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Self {
            estimate: p,
            lower: (center - half).max(0.0),
            upper: (center + half).min(1.0),
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Sign-detector accuracy for `n` photons under the equal-variance Gaussian
/// approximation: Φ(√(n·snr)/2), where `snr` is the per-photon power SNR
/// (squared mean separation over variance).
pub fn gaussian_sign_fidelity(n: f64, snr_per_photon: f64) -> f64 {
    normal_cdf(0.5 * (n * snr_per_photon).sqrt())
}
