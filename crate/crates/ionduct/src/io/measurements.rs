//! Measurement CSV: one row per sweep sample, grouped into curves by
//! device and trial identifiers.
//!
//! The header is fixed: `device_id,trial_id,voltage_V,current_A,force_N`.
//! The force column may be empty on any row. Rows belonging to one
//! (device, trial) pair must appear with strictly increasing voltage;
//! groups are returned in first-appearance order.

use std::path::Path;

use crate::calibrate::{MeasuredCurve, Sample};

use super::IoError;

pub const HEADER: [&str; 5] = ["device_id", "trial_id", "voltage_V", "current_A", "force_N"];

pub fn parse_measurements_str(text: &str) -> Result<Vec<MeasuredCurve>, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| IoError::Schema(format!("measurement CSV: {e}")))?;
    if *headers != csv::StringRecord::from(HEADER.to_vec()) {
        return Err(IoError::Schema(format!(
            "measurement CSV header must be exactly {:?}, got {:?}",
            HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut groups: Vec<((String, String), Vec<Sample>)> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2; // 1-based, after the header line
        let record = record.map_err(|e| IoError::Schema(format!("row {row}: {e}")))?;
        if record.len() != HEADER.len() {
            return Err(IoError::Schema(format!(
                "row {row}: expected {} fields, got {}",
                HEADER.len(),
                record.len()
            )));
        }
        let device = record[0].to_string();
        let trial = record[1].to_string();
        let voltage = parse_field(&record[2], "voltage_V", row)?;
        let current = parse_field(&record[3], "current_A", row)?;
        let force = if record[4].trim().is_empty() {
            None
        } else {
            Some(parse_field(&record[4], "force_N", row)?)
        };
        if !(voltage.is_finite() && voltage >= 0.0) {
            return Err(IoError::Schema(format!(
                "row {row}: voltage {voltage} must be finite and >= 0"
            )));
        }
        if !(current.is_finite() && current >= 0.0) {
            return Err(IoError::Schema(format!(
                "row {row}: current {current} must be finite and >= 0"
            )));
        }
        if let Some(f) = force {
            if !(f.is_finite() && f >= 0.0) {
                return Err(IoError::Schema(format!(
                    "row {row}: force {f} must be finite and >= 0"
                )));
            }
        }

        let key = (device, trial);
        let group = match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, samples)) => samples,
            None => {
                groups.push((key, Vec::new()));
                &mut groups.last_mut().expect("just pushed").1
            }
        };
        if let Some(last) = group.last() {
            if voltage <= last.voltage {
                return Err(IoError::Schema(format!(
                    "row {row}: voltage {voltage} does not increase within its \
                     curve (previous sample was {} V)",
                    last.voltage
                )));
            }
        }
        group.push(Sample {
            voltage,
            current,
            force,
        });
    }

    let curves = groups
        .into_iter()
        .map(|((device_id, trial_id), samples)| MeasuredCurve {
            device_id,
            trial_id,
            geometry_tag: String::new(),
            samples,
        })
        .collect::<Vec<_>>();
    for curve in &curves {
        curve
            .validate()
            .map_err(|e| IoError::Schema(e.to_string()))?;
    }
    Ok(curves)
}

fn parse_field(text: &str, name: &str, row: usize) -> Result<f64, IoError> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| IoError::Schema(format!("row {row}: {name} {text:?} is not a number")))
}

pub fn render_measurements(curves: &[MeasuredCurve]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(HEADER)
        .expect("writing to memory cannot fail");
    for curve in curves {
        for s in &curve.samples {
            writer
                .write_record([
                    curve.device_id.as_str(),
                    curve.trial_id.as_str(),
                    &format!("{}", s.voltage),
                    &format!("{}", s.current),
                    &s.force.map(|f| format!("{f}")).unwrap_or_default(),
                ])
                .expect("writing to memory cannot fail");
        }
    }
    String::from_utf8(writer.into_inner().expect("no partial flush on memory"))
        .expect("csv output is UTF-8")
}

pub fn read_measurements(path: &Path) -> Result<Vec<MeasuredCurve>, IoError> {
    parse_measurements_str(&super::read_file(path)?)
}

pub fn write_measurements(path: &Path, curves: &[MeasuredCurve]) -> Result<(), IoError> {
    super::write_file(path, &render_measurements(curves))
}
