//! Output row types. Every row carries a `schema` tag of the form
//! `donor-readout.<table>.v<version>`; column order is the field order.

use std::io::{BufRead, Write};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

pub fn schema_tag(table: &str) -> String {
    format!("donor-readout.{table}.v{SCHEMA_VERSION}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    JsonLines,
}

/// A serializable table row with a fixed schema name.
pub trait Row: Serialize + DeserializeOwned {
    const TABLE: &'static str;

    fn schema(&self) -> &str;
}

macro_rules! row {
    ($ty:ident, $table:literal) => {
        impl Row for $ty {
            const TABLE: &'static str = $table;

            fn schema(&self) -> &str {
                &self.schema
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperRow {
    pub schema: String,
    pub quantity: String,
    pub unit: String,
    pub computed: f64,
    pub reference: f64,
    pub deviation: f64,
    pub lower: f64,
    pub upper: f64,
    pub passed: bool,
}
row!(PaperRow, "paper-table");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub schema: String,
    /// `scan` for grid points, `optimum` for the maximizer.
    pub kind: String,
    pub delay_s: f64,
    pub snr_per_photon: f64,
}
row!(ScanRow, "snr-scan");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub schema: String,
    pub seed: u64,
    pub trial: u64,
    pub initial_state: String,
    pub final_state: String,
    pub cycles: u64,
    pub emitted: u64,
    pub detected_signal: u64,
    pub dark_counts: u64,
    pub flips: u64,
    pub optical_flips: u64,
    pub integrated_current: i64,
    pub decided_state: String,
    pub confidence: f64,
    pub correct: bool,
}
row!(TrialRow, "simulate");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityRow {
    pub schema: String,
    pub seed: u64,
    pub time_s: f64,
    pub trials: u64,
    pub fidelity: f64,
    pub lower: f64,
    pub upper: f64,
    pub mean_detected: f64,
}
row!(FidelityRow, "fidelity");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub schema: String,
    pub axis: String,
    pub value: String,
    pub line_splitting_hz: f64,
    pub electron_zeeman_hz: f64,
    pub lowest_occupation: f64,
    pub cycle_time_s: f64,
    pub radiative_branching: f64,
    pub emitted_flux: f64,
    pub collected_flux: f64,
    pub detected_flux: f64,
    pub snr_per_photon: f64,
    pub optimal_delay_s: f64,
    pub optimal_snr: f64,
    pub integration_time_s: Option<f64>,
    pub derived_flip_probability: f64,
    pub flip_probability: f64,
    pub randomization_cycles: Option<u64>,
    pub budget_photons: Option<f64>,
    pub budget_snr: Option<f64>,
}
row!(SweepRow, "sweep");

pub fn write_rows<R: Row, W: Write>(rows: &[R], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(out);
            for row in rows {
                writer.serialize(row)?;
            }
            writer.flush()?;
        }
        Format::JsonLines => {
            let mut out = out;
            for row in rows {
                serde_json::to_writer(&mut out, row)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

/// Parses a table and checks every row's schema tag.
pub fn read_rows<R: Row, I: BufRead>(input: I, format: Format) -> Result<Vec<R>> {
    let rows: Vec<R> = match format {
        Format::Csv => csv::Reader::from_reader(input)
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .context("malformed CSV row")?,
        Format::JsonLines => input
            .lines()
            .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .map(|l| Ok(serde_json::from_str(&l?)?))
            .collect::<Result<_>>()
            .context("malformed JSON line")?,
    };
    let expected = schema_tag(R::TABLE);
    for (i, row) in rows.iter().enumerate() {
        if row.schema() != expected {
            bail!("row {i}: schema `{}` is not `{expected}`", row.schema());
        }
    }
    Ok(rows)
}
