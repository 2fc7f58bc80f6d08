use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Poisson};
use rayon::prelude::*;

use super::estimate::{estimate_state, ReadoutEstimate};
use super::streams::{trial_stream, Purpose};
use super::{CycleModel, InitialState, NuclearState, SimulationConfig};
use crate::error::Result;
use crate::interferometer::{sample_port, Port};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Signal,
    Dark,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub time: f64,
    pub port: Port,
    pub origin: Origin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipCause {
    /// Flip-flop during carrier capture (or a secondary optical channel).
    Optical,
    /// Equilibrium cross-relaxation.
    Background,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipEvent {
    pub time: f64,
    pub cause: FlipCause,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSegment {
    pub start: f64,
    pub state: NuclearState,
}

/// One simulated readout record.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub trial_index: u64,
    pub seed: u64,
    pub duration: f64,
    pub cycle_time: f64,
    pub cycles: u64,
    /// Emission times of all signal photons, detected or not.
    pub emissions: Vec<f64>,
    /// Detections in time order, signal and dark merged.
    pub events: Vec<Detection>,
    pub flips: Vec<FlipEvent>,
    pub true_state_timeline: Vec<StateSegment>,
}

impl Trajectory {
    pub fn initial_state(&self) -> NuclearState {
        self.true_state_timeline[0].state
    }

    pub fn final_state(&self) -> NuclearState {
        self.true_state_timeline.last().expect("timeline is never empty").state
    }

    pub fn n_detected(&self) -> u64 {
        self.events.len() as u64
    }

    pub fn detected_signal(&self) -> u64 {
        self.events.iter().filter(|e| e.origin == Origin::Signal).count() as u64
    }

    pub fn dark_counts(&self) -> u64 {
        self.events.iter().filter(|e| e.origin == Origin::Dark).count() as u64
    }

    pub fn optical_flips(&self) -> u64 {
        self.flips.iter().filter(|f| f.cause == FlipCause::Optical).count() as u64
    }

    /// #e − #f.
    pub fn integrated_current(&self) -> i64 {
        self.events.iter().map(|e| e.port.current()).sum()
    }

    /// The record as it stood at time `t` (events at exactly `t` included).
    pub fn truncated(&self, t: f64) -> Trajectory {
        let t = t.min(self.duration);
        let cycles = ((t / self.cycle_time).floor() as u64).min(self.cycles);
        Trajectory {
            trial_index: self.trial_index,
            seed: self.seed,
            duration: t,
            cycle_time: self.cycle_time,
            cycles,
            emissions: self.emissions.iter().copied().take_while(|&x| x <= t).collect(),
            events: self.events.iter().copied().take_while(|e| e.time <= t).collect(),
            flips: self.flips.iter().copied().take_while(|f| f.time <= t).collect(),
            true_state_timeline: self
                .true_state_timeline
                .iter()
                .copied()
                .enumerate()
                .take_while(|(i, s)| *i == 0 || s.start <= t)
                .map(|(_, s)| s)
                .collect(),
        }
    }

    /// The record up to and including the `n`-th detection, if there were that many.
    pub fn first_detections(&self, n: usize) -> Option<Trajectory> {
        match n {
            0 => Some(self.truncated(0.0)),
            _ => self.events.get(n - 1).map(|e| self.truncated(e.time)),
        }
    }
}

fn geometric_gap(rng: &mut ChaCha8Rng, p: f64) -> u64 {
    if p <= 0.0 {
        u64::MAX
    } else if p >= 1.0 {
        0
    } else {
        Geometric::new(p).expect("p in (0, 1)").sample(rng)
    }
}

fn resolve_initial_state(cfg: &SimulationConfig, trial_index: u64) -> NuclearState {
    match cfg.initial_nuclear_state {
        InitialState::Up => NuclearState::Up,
        InitialState::Down => NuclearState::Down,
        InitialState::Random => {
            let mut rng = trial_stream(cfg.seed, trial_index, Purpose::InitialState);
            if rng.random::<bool>() {
                NuclearState::Up
            } else {
                NuclearState::Down
            }
        }
    }
}

/// Simulates one trajectory; identical `(cfg, trial_index)` give identical output.
pub fn simulate_trajectory(cfg: &SimulationConfig, trial_index: u64) -> Result<Trajectory> {
    let model = cfg.cycle_model()?;
    Ok(run_cycles(
        cfg,
        &model,
        trial_index,
        resolve_initial_state(cfg, trial_index),
    ))
}

/// As [`simulate_trajectory`], overriding the configured initial state.
pub fn simulate_trajectory_from(cfg: &SimulationConfig, trial_index: u64, initial: NuclearState) -> Result<Trajectory> {
    let model = cfg.cycle_model()?;
    Ok(run_cycles(cfg, &model, trial_index, initial))
}

/// Cycle loop. Only cycles that flip or emit are visited: the gap to the next
/// event of each kind is geometric, which is the exact law of a run of
/// independent per-cycle Bernoulli trials. Within a cycle the flip (capture)
/// precedes the emission (bound-exciton decay).
pub(crate) fn run_cycles(
    cfg: &SimulationConfig,
    model: &CycleModel,
    trial_index: u64,
    initial: NuclearState,
) -> Trajectory {
    let cycle_time = model.emission.cycle_time;
    let n_cycles = model.cycles;
    let p_flip = model.flip_probability();
    let p_emit = model.emission.signal_probability_per_cycle();
    let background_share = if p_flip > 0.0 {
        model.background_flip / p_flip
    } else {
        0.0
    };

    let mut flip_rng = trial_stream(cfg.seed, trial_index, Purpose::Flips);
    let mut photon_rng = trial_stream(cfg.seed, trial_index, Purpose::Photons);

    let mut state = initial;
    let mut timeline = vec![StateSegment { start: 0.0, state }];
    let mut flips = Vec::new();
    let mut emissions = Vec::new();
    let mut events = Vec::new();

    let mut next_flip = geometric_gap(&mut flip_rng, p_flip);
    let mut next_emit = geometric_gap(&mut photon_rng, p_emit);
    loop {
        let k = next_flip.min(next_emit);
        if k >= n_cycles {
            break;
        }
        if next_flip == k {
            let time = k as f64 * cycle_time;
            let cause = if flip_rng.random::<f64>() < background_share {
                FlipCause::Background
            } else {
                FlipCause::Optical
            };
            state = state.flipped();
            flips.push(FlipEvent { time, cause });
            timeline.push(StateSegment { start: time, state });
            next_flip = k.saturating_add(1).saturating_add(geometric_gap(&mut flip_rng, p_flip));
        }
        if next_emit == k {
            let time = (k + 1) as f64 * cycle_time;
            emissions.push(time);
            if photon_rng.random::<f64>() < model.detection_probability {
                let port = sample_port(model.line(state), &cfg.interferometer, &mut photon_rng);
                events.push(Detection {
                    time,
                    port,
                    origin: Origin::Signal,
                });
            }
            next_emit = k
                .saturating_add(1)
                .saturating_add(geometric_gap(&mut photon_rng, p_emit));
        }
    }

    if cfg.interferometer.dark_rate > 0.0 {
        let mut dark_rng = trial_stream(cfg.seed, trial_index, Purpose::DarkCounts);
        let mean = cfg.interferometer.dark_rate * cfg.duration;
        let count = Poisson::new(mean).expect("positive mean").sample(&mut dark_rng) as u64;
        for _ in 0..count {
            let time = dark_rng.random::<f64>() * cfg.duration;
            let port = if dark_rng.random::<bool>() { Port::E } else { Port::F };
            events.push(Detection {
                time,
                port,
                origin: Origin::Dark,
            });
        }
        events.sort_by(|a, b| a.time.total_cmp(&b.time));
    }

    Trajectory {
        trial_index,
        seed: cfg.seed,
        duration: cfg.duration,
        cycle_time,
        cycles: n_cycles,
        emissions,
        events,
        flips,
        true_state_timeline: timeline,
    }
}

/// Compact per-trial record for reports.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub trial: u64,
    pub initial_state: NuclearState,
    pub final_state: NuclearState,
    pub cycles: u64,
    pub emitted: u64,
    pub detected_signal: u64,
    pub dark_counts: u64,
    pub flips: u64,
    pub optical_flips: u64,
    pub estimate: ReadoutEstimate,
    pub correct: bool,
}

impl TrialSummary {
    pub fn from_trajectory(traj: &Trajectory, estimate: ReadoutEstimate) -> Self {
        Self {
            trial: traj.trial_index,
            initial_state: traj.initial_state(),
            final_state: traj.final_state(),
            cycles: traj.cycles,
            emitted: traj.emissions.len() as u64,
            detected_signal: traj.detected_signal(),
            dark_counts: traj.dark_counts(),
            flips: traj.flips.len() as u64,
            optical_flips: traj.optical_flips(),
            correct: estimate.decided_state == traj.initial_state(),
            estimate,
        }
    }
}

/// Runs `cfg.trials` trajectories in parallel; results are in trial order.
pub fn run_trials(cfg: &SimulationConfig) -> Result<Vec<TrialSummary>> {
    let model = cfg.cycle_model()?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let traj = run_cycles(cfg, &model, i, resolve_initial_state(cfg, i));
            let estimate = estimate_state(&traj, cfg)?;
            Ok(TrialSummary::from_trajectory(&traj, estimate))
        })
        .collect()
}
