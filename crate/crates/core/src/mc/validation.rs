use super::streams::{trial_stream, Purpose};
use crate::error::{Error, Result};
use crate::interferometer::{current_variance, mean_current, sample_port, InterferometerConfig, SpectralLine};

/// Agreement threshold, in standard errors.
pub const MOMENT_SIGMA_LIMIT: f64 = 5.0;
const MIN_SAMPLES: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub expected_mean: f64,
    pub expected_variance: f64,
    pub mean_std_error: f64,
    pub variance_std_error: f64,
    pub passed: bool,
}

impl MomentReport {
    pub fn mean_z(&self) -> f64 {
        (self.mean - self.expected_mean) / self.mean_std_error
    }

    pub fn variance_z(&self) -> f64 {
        (self.variance - self.expected_variance) / self.variance_std_error
    }
}

/// Samples `n` photons from `line` through the interferometer and compares the
/// empirical mean and (unbiased) variance of the ±1 port variable with the
/// closed forms.
///
/// Standard errors use the analytic moments of a ±1 variable with mean m:
/// σ² = 1 − m², and Var(s²) = (μ₄ − σ⁴)/n + 2σ⁴/(n(n−1)) with μ₄ − σ⁴ = 4m²σ².
pub fn mc_moment_validation(
    line: &SpectralLine,
    cfg: &InterferometerConfig,
    n: u64,
    seed: u64,
) -> Result<MomentReport> {
    if n < MIN_SAMPLES {
        return Err(Error::invalid(
            "n",
            format!("need at least {MIN_SAMPLES} samples, got {n}"),
        ));
    }
    cfg.validate()?;
    let mut rng = trial_stream(seed, 0, Purpose::Moments);
    let sum: i64 = (0..n).map(|_| sample_port(line, cfg, &mut rng).current()).sum();
    let nf = n as f64;
    let mean = sum as f64 / nf;
    // Σx² = n for a ±1 variable
    let variance = (nf - nf * mean * mean) / (nf - 1.0);

    let expected_mean = mean_current(line, cfg);
    let expected_variance = current_variance(line, cfg);
    let sigma2 = expected_variance;
    let mean_std_error = (sigma2 / nf).sqrt();
    let excess = 4.0 * expected_mean * expected_mean * sigma2;
    let variance_std_error = (excess / nf + 2.0 * sigma2 * sigma2 / (nf * (nf - 1.0))).sqrt();

    let passed = (mean - expected_mean).abs() <= MOMENT_SIGMA_LIMIT * mean_std_error
        && (variance - expected_variance).abs() <= MOMENT_SIGMA_LIMIT * variance_std_error;
    Ok(MomentReport {
        samples: n,
        mean,
        variance,
        expected_mean,
        expected_variance,
        mean_std_error,
        variance_std_error,
        passed,
    })
}
