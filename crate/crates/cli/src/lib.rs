//! Command-line front end for the `donor-readout` model.

pub mod tables;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use donor_readout::analysis::{paper_table, snr_scan, sweep, CheckRow, Summary};
use donor_readout::config::Config;
use donor_readout::mc::{fidelity_curve, run_trials, TrialSummary};
use donor_readout::units::{parse_quantity, Dimension};

use tables::{schema_tag, write_rows, FidelityRow, Format, PaperRow, Row, ScanRow, SweepRow, TrialRow};

#[derive(Debug, Parser)]
#[command(
    name = "donor-readout",
    version,
    about = "Optical readout of a single donor nuclear spin"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Root seed for all Monte Carlo streams.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "N")]
    pub trials: Option<u64>,
    /// Simulated time per trajectory.
    #[arg(long, global = true, value_name = "SECONDS")]
    pub duration: Option<f64>,
    /// Log more (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Every reference design number with its tolerance band.
    PaperTable,
    /// SNR per photon versus interferometer delay.
    SnrScan {
        #[arg(long, default_value = "0.1 ns")]
        tau_min: String,
        #[arg(long, default_value = "5 ns")]
        tau_max: String,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Monte Carlo trials, one row per trial.
    Simulate,
    /// Readout fidelity versus integration time.
    Fidelity {
        /// Comma-separated times, in seconds or with a unit ("50 ms").
        #[arg(long, default_value = "0.01,0.02,0.05,0.1,0.2,0.5,1")]
        times: String,
    },
    /// Analytic pipeline over values of one parameter.
    Sweep {
        #[arg(long)]
        axis: String,
        /// Comma-separated values in the parameter's config syntax.
        #[arg(long)]
        values: String,
    },
    /// Like paper-table, but exits nonzero if any row is out of tolerance.
    Validate,
}

/// Seconds as a bare number or a time quantity.
pub fn parse_time(key: &str, text: &str) -> Result<f64> {
    let text = text.trim();
    let value = match text.parse::<f64>() {
        Ok(v) => v,
        Err(_) => parse_quantity(key, text, Dimension::Time)?,
    };
    if !(value.is_finite() && value >= 0.0) {
        bail!("{key}: `{text}` is not a non-negative time");
    }
    Ok(value)
}

fn split_list(text: &str) -> Vec<String> {
    text.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn load_config(args: &GlobalArgs) -> Result<Config> {
    let mut cfg = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(duration) = args.duration {
        cfg.duration = duration;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn paper_rows(rows: &[CheckRow]) -> Vec<PaperRow> {
    rows.iter()
        .map(|r| PaperRow {
            schema: schema_tag(PaperRow::TABLE),
            quantity: r.quantity.to_string(),
            unit: r.unit.to_string(),
            computed: r.computed,
            reference: r.reference,
            deviation: r.deviation(),
            lower: r.lower,
            upper: r.upper,
            passed: r.passed(),
        })
        .collect()
}

fn trial_row(seed: u64, s: &TrialSummary) -> TrialRow {
    TrialRow {
        schema: schema_tag(TrialRow::TABLE),
        seed,
        trial: s.trial,
        initial_state: s.initial_state.as_str().into(),
        final_state: s.final_state.as_str().into(),
        cycles: s.cycles,
        emitted: s.emitted,
        detected_signal: s.detected_signal,
        dark_counts: s.dark_counts,
        flips: s.flips,
        optical_flips: s.optical_flips,
        integrated_current: s.estimate.integrated_current,
        decided_state: s.estimate.decided_state.as_str().into(),
        confidence: s.estimate.confidence,
        correct: s.correct,
    }
}

fn sweep_row(axis: &str, value: &str, s: &Summary) -> SweepRow {
    SweepRow {
        schema: schema_tag(SweepRow::TABLE),
        axis: axis.into(),
        value: value.into(),
        line_splitting_hz: s.line_splitting,
        electron_zeeman_hz: s.electron_zeeman,
        lowest_occupation: s.lowest_occupation,
        cycle_time_s: s.cycle_time,
        radiative_branching: s.radiative_branching,
        emitted_flux: s.emitted_flux,
        collected_flux: s.collected_flux,
        detected_flux: s.detected_flux,
        snr_per_photon: s.snr_per_photon,
        optimal_delay_s: s.optimal_delay,
        optimal_snr: s.optimal_snr,
        integration_time_s: s.integration_time,
        derived_flip_probability: s.derived_flip_probability,
        flip_probability: s.flip_probability,
        randomization_cycles: s.randomization_cycles,
        budget_photons: s.budget_photons,
        budget_snr: s.budget_snr,
    }
}

fn emit<R: Row>(rows: &[R], args: &GlobalArgs) -> Result<()> {
    match &args.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            write_rows(rows, args.format, BufWriter::new(file))
        }
        None => write_rows(rows, args.format, io::stdout().lock()),
    }
}

/// Runs one command. Returns `false` when a validation found out-of-tolerance rows.
pub fn run(cli: &Cli) -> Result<bool> {
    let args = &cli.global;
    let cfg = load_config(args)?;
    match &cli.command {
        Command::PaperTable => emit(&paper_rows(&paper_table(&cfg)?), args)?,
        Command::Validate => {
            let rows = paper_rows(&paper_table(&cfg)?);
            emit(&rows, args)?;
            let failed: Vec<&PaperRow> = rows.iter().filter(|r| !r.passed).collect();
            let mut err = io::stderr().lock();
            for r in &failed {
                writeln!(
                    err,
                    "out of tolerance: {} = {:e} {} (allowed [{:e}, {:e}])",
                    r.quantity, r.computed, r.unit, r.lower, r.upper
                )?;
            }
            return Ok(failed.is_empty());
        }
        Command::SnrScan {
            tau_min,
            tau_max,
            points,
        } => {
            let scan = snr_scan(
                &cfg,
                parse_time("tau_min", tau_min)?,
                parse_time("tau_max", tau_max)?,
                *points,
            )?;
            let schema = schema_tag(ScanRow::TABLE);
            let mut rows: Vec<ScanRow> = scan
                .points
                .iter()
                .map(|&(tau, snr)| ScanRow {
                    schema: schema.clone(),
                    kind: "scan".into(),
                    delay_s: tau,
                    snr_per_photon: snr,
                })
                .collect();
            rows.push(ScanRow {
                schema,
                kind: "optimum".into(),
                delay_s: scan.optimal_delay,
                snr_per_photon: scan.optimal_snr,
            });
            emit(&rows, args)?;
        }
        Command::Simulate => {
            let rows: Vec<TrialRow> = run_trials(&cfg.simulation_config()?)?
                .iter()
                .map(|s| trial_row(cfg.seed, s))
                .collect();
            emit(&rows, args)?;
        }
        Command::Fidelity { times } => {
            let grid = split_list(times)
                .iter()
                .map(|t| parse_time("times", t))
                .collect::<Result<Vec<_>>>()?;
            if grid.is_empty() {
                bail!("--times needs at least one time");
            }
            let rows: Vec<FidelityRow> = fidelity_curve(&cfg.simulation_config()?, &grid)?
                .iter()
                .map(|p| FidelityRow {
                    schema: schema_tag(FidelityRow::TABLE),
                    seed: cfg.seed,
                    time_s: p.time,
                    trials: p.trials,
                    fidelity: p.fidelity,
                    lower: p.lower,
                    upper: p.upper,
                    mean_detected: p.mean_detected,
                })
                .collect();
            emit(&rows, args)?;
        }
        Command::Sweep { axis, values } => {
            let rows: Vec<SweepRow> = sweep(&cfg, axis, &split_list(values))?
                .iter()
                .map(|(value, s)| sweep_row(axis, value, s))
                .collect();
            emit(&rows, args)?;
        }
    }
    Ok(true)
}
