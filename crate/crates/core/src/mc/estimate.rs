use rand::Rng;

use super::streams::{trial_stream, Purpose};
use super::{NuclearState, SimulationConfig, Trajectory};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutEstimate {
    pub decided_state: NuclearState,
    /// #e − #f over all detections.
    pub integrated_current: i64,
    pub n_detected: u64,
    /// Posterior probability of `decided_state` under the two-Gaussian model.
    pub confidence: f64,
}

/// Sign detector on the subtracted, integrated photocurrent.
///
/// The decided state is the one whose line has a mean current of the same sign
/// as the integrated current. A zero current is resolved by a fair coin drawn
/// from the trial's tie-break stream. Confidence treats the current under each
/// hypothesis as Gaussian with per-detection mean ±μ and variance 1 − μ², where
/// μ is the line's mean current diluted by the expected dark-count share; with
/// equal priors the posterior is 1 / (1 + exp(−2|I|μ/σ²)).
pub fn estimate_state(traj: &Trajectory, cfg: &SimulationConfig) -> Result<ReadoutEstimate> {
    let current = traj.integrated_current();
    let n = traj.n_detected();
    let up_mean = cfg.state_mean_current(NuclearState::Up)?;

    let coin = || {
        let mut rng = trial_stream(traj.seed, traj.trial_index, Purpose::TieBreak);
        if rng.random::<bool>() {
            NuclearState::Up
        } else {
            NuclearState::Down
        }
    };

    if n == 0 || current == 0 || up_mean == 0.0 {
        return Ok(ReadoutEstimate {
            decided_state: coin(),
            integrated_current: current,
            n_detected: n,
            confidence: 0.5,
        });
    }

    let decided_state = if (current > 0) == (up_mean > 0.0) {
        NuclearState::Up
    } else {
        NuclearState::Down
    };

    let signal_rate = cfg.detected_signal_rate()?;
    let dark_rate = cfg.interferometer.dark_rate;
    let signal_share = if signal_rate + dark_rate > 0.0 {
        signal_rate / (signal_rate + dark_rate)
    } else {
        0.0
    };
    let mu = up_mean.abs() * signal_share;
    let variance = 1.0 - mu * mu;
    let confidence = if variance <= 0.0 {
        1.0
    } else {
        1.0 / (1.0 + (-2.0 * current.unsigned_abs() as f64 * mu / variance).exp())
    };

    Ok(ReadoutEstimate {
        decided_state,
        integrated_current: current,
        n_detected: n,
        confidence,
    })
}
