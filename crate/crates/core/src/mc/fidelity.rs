use rayon::prelude::*;

use super::estimate::estimate_state;
use super::trajectory::run_cycles;
use super::{NuclearState, SimulationConfig};
use crate::error::{Error, Result};
use crate::stats::{z_for_confidence, WilsonInterval};

/// Coverage of the Wilson intervals reported by [`fidelity_curve`].
pub const FIDELITY_CONFIDENCE_LEVEL: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityPoint {
    pub time: f64,
    pub fidelity: f64,
    pub lower: f64,
    pub upper: f64,
    pub mean_detected: f64,
    pub trials: u64,
}

/// Readout fidelity versus integration time.
///
/// Even trials start in "up", odd trials in "down". Each trial is simulated
/// once up to the longest time on the grid and read out on its prefix at every
/// grid time, so the curve is monotone in information for a given trial.
pub fn fidelity_curve(cfg: &SimulationConfig, time_grid: &[f64]) -> Result<Vec<FidelityPoint>> {
    if time_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::invalid("time_grid", "times must be finite and >= 0"));
    }
    let horizon = time_grid.iter().copied().fold(0.0, f64::max);
    if time_grid.is_empty() {
        return Ok(Vec::new());
    }
    if cfg.trials < 100 {
        log::warn!("fidelity curve with {} trials has wide intervals", cfg.trials);
    }
    let mut run_cfg = cfg.clone();
    // a zero horizon still needs a valid (positive) duration
    run_cfg.duration = horizon.max(f64::MIN_POSITIVE);
    let model = run_cfg.cycle_model()?;

    // per trial: (correct, detected) at each grid time
    let per_trial: Vec<Vec<(bool, u64)>> = (0..run_cfg.trials)
        .into_par_iter()
        .map(|i| {
            let initial = if i % 2 == 0 {
                NuclearState::Up
            } else {
                NuclearState::Down
            };
            let traj = run_cycles(&run_cfg, &model, i, initial);
            time_grid
                .iter()
                .map(|&t| {
                    let prefix = traj.truncated(t);
                    let est = estimate_state(&prefix, &run_cfg)?;
                    Ok((est.decided_state == initial, est.n_detected))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let z = z_for_confidence(FIDELITY_CONFIDENCE_LEVEL);
    let trials = run_cfg.trials;
    Ok(time_grid
        .iter()
        .enumerate()
        .map(|(j, &time)| {
            let correct = per_trial.iter().filter(|row| row[j].0).count() as u64;
            let detected: u64 = per_trial.iter().map(|row| row[j].1).sum();
            let w = WilsonInterval::new(correct, trials, z);
            FidelityPoint {
                time,
                fidelity: w.estimate,
                lower: w.lower,
                upper: w.upper,
                mean_detected: detected as f64 / trials as f64,
                trials,
            }
        })
        .collect())
}
