//! Voltage sweep specs and the CSV tables the CLI emits.

use serde::Serialize;

use super::IoError;

/// Largest grid `parse` accepts; keeps hostile specs from exhausting memory.
pub const MAX_SWEEP_POINTS: usize = 1_000_000;

/// Inclusive arithmetic voltage grid, parsed from `start:stop:step` volts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepSpec {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(IoError::Schema(format!(
                "sweep spec must be start:stop:step in volts, got {text:?}"
            )));
        }
        let mut values = [0.0_f64; 3];
        for (i, part) in parts.iter().enumerate() {
            values[i] = part.trim().parse().map_err(|_| {
                IoError::Schema(format!("sweep spec field {:?} is not a number", part))
            })?;
        }
        let spec = Self {
            start: values[0],
            stop: values[1],
            step: values[2],
        };
        if !(spec.start.is_finite() && spec.stop.is_finite() && spec.step.is_finite()) {
            return Err(IoError::Schema("sweep spec values must be finite".into()));
        }
        if spec.start < 0.0 {
            return Err(IoError::Schema(format!(
                "sweep start {} must be >= 0",
                spec.start
            )));
        }
        if spec.step <= 0.0 {
            return Err(IoError::Schema(format!(
                "sweep step {} must be positive",
                spec.step
            )));
        }
        if spec.stop < spec.start {
            return Err(IoError::Schema(format!(
                "sweep stop {} is below start {}",
                spec.stop, spec.start
            )));
        }
        // Cap the grid before voltages() materializes it.
        if (spec.stop - spec.start) / spec.step > MAX_SWEEP_POINTS as f64 {
            return Err(IoError::Schema(format!(
                "sweep spec {text:?} produces more than {MAX_SWEEP_POINTS} points"
            )));
        }
        Ok(spec)
    }

    /// The grid points, endpoint included when it lands on the grid within
    /// one part in 10^9 of a step.
    pub fn voltages(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + self.step * i as f64).collect()
    }
}

/// One sweep table row. `current_a` is the per-stage current (stages run
/// in parallel off the supply, so the total draw is `stage_count` times
/// this). `feasible` is false past the breakdown guard, where the numeric
/// columns read zero.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRow {
    pub aspect_ratio: f64,
    pub stage_count: u32,
    pub tip_count: u32,
    pub gap_m: f64,
    pub interstage_factor: f64,
    pub voltage_v: f64,
    pub current_a: f64,
    pub thrust_n: f64,
    pub power_w: f64,
    pub efficiency_n_per_w: f64,
    pub thrust_density_n_per_m2: f64,
    pub feasible: bool,
}

const SWEEP_HEADER: [&str; 12] = [
    "aspect_ratio",
    "stage_count",
    "tip_count",
    "gap_m",
    "interstage_factor",
    "voltage_v",
    "current_a",
    "thrust_n",
    "power_w",
    "efficiency_n_per_w",
    "thrust_density_n_per_m2",
    "feasible",
];

/// One Pareto-front row in the density-efficiency plane.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ParetoRow {
    pub aspect_ratio: f64,
    pub stage_count: u32,
    pub tip_count: u32,
    pub gap_m: f64,
    pub interstage_factor: f64,
    pub voltage_v: f64,
    pub thrust_density_n_per_m2: f64,
    pub efficiency_n_per_w: f64,
}

const PARETO_HEADER: [&str; 8] = [
    "aspect_ratio",
    "stage_count",
    "tip_count",
    "gap_m",
    "interstage_factor",
    "voltage_v",
    "thrust_density_n_per_m2",
    "efficiency_n_per_w",
];

fn csv_table<T: Serialize>(rows: &[T], header: &[&str]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        writer
            .write_record(header)
            .expect("writing to memory cannot fail");
    } else {
        for row in rows {
            writer.serialize(row).expect("writing to memory cannot fail");
        }
    }
    String::from_utf8(writer.into_inner().expect("no partial flush on memory"))
        .expect("csv output is UTF-8")
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    csv_table(rows, &SWEEP_HEADER)
}

pub fn pareto_csv(rows: &[ParetoRow]) -> String {
    csv_table(rows, &PARETO_HEADER)
}

pub fn sweep_json(rows: &[SweepRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}
