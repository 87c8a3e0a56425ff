//! Paired-unit field resolution for the JSON loaders.

use super::IoError;

fn pick(
    name: &str,
    si_suffix: &str,
    scaled_suffix: &str,
    si: Option<f64>,
    scaled: Option<f64>,
    scale: f64,
    default: Option<f64>,
) -> Result<f64, IoError> {
    match (si, scaled) {
        (Some(_), Some(_)) => Err(IoError::Schema(format!(
            "give {name} in exactly one unit: {name}_{si_suffix} or {name}_{scaled_suffix}"
        ))),
        (Some(v), None) => Ok(v),
        (None, Some(v)) => Ok(v * scale),
        (None, None) => default.ok_or_else(|| {
            IoError::Schema(format!(
                "{name} is required ({name}_{si_suffix} or {name}_{scaled_suffix})"
            ))
        }),
    }
}

/// Resolves a `{name}_m` / `{name}_mm` pair to meters.
pub(crate) fn length(
    name: &str,
    m: Option<f64>,
    mm: Option<f64>,
    default: Option<f64>,
) -> Result<f64, IoError> {
    pick(name, "m", "mm", m, mm, 1e-3, default)
}

/// Resolves a `{name}_v` / `{name}_kv` pair to volts.
pub(crate) fn voltage(
    name: &str,
    v: Option<f64>,
    kv: Option<f64>,
    default: Option<f64>,
) -> Result<f64, IoError> {
    pick(name, "v", "kv", v, kv, 1e3, default)
}

/// Resolves a meters/millimeters pair of lists.
pub(crate) fn length_list(
    name: &str,
    m: Option<Vec<f64>>,
    mm: Option<Vec<f64>>,
    default: Vec<f64>,
) -> Result<Vec<f64>, IoError> {
    match (m, mm) {
        (Some(_), Some(_)) => Err(IoError::Schema(format!(
            "give {name} in exactly one unit: {name}_m or {name}_mm"
        ))),
        (Some(v), None) => Ok(v),
        (None, Some(v)) => Ok(v.into_iter().map(|x| x * 1e-3).collect()),
        (None, None) => Ok(default),
    }
}

/// Resolves a `[lo, hi]` volts/kilovolts pair.
pub(crate) fn voltage_range(
    name: &str,
    v: Option<[f64; 2]>,
    kv: Option<[f64; 2]>,
    default: (f64, f64),
) -> Result<(f64, f64), IoError> {
    match (v, kv) {
        (Some(_), Some(_)) => Err(IoError::Schema(format!(
            "give {name} in exactly one unit: {name}_v or {name}_kv"
        ))),
        (Some([lo, hi]), None) => Ok((lo, hi)),
        (None, Some([lo, hi])) => Ok((lo * 1e3, hi * 1e3)),
        (None, None) => Ok(default),
    }
}
