//! Deterministic, derivative-free fits of the corona and stack parameters
//! from measured sweeps.
//!
//! Every fit is a pure function of its inputs: grid scans with fixed
//! resolution plus bounded golden-section or parabolic refinement, no RNG,
//! no tolerance-dependent iteration counts. Refitting identical data gives
//! bit-identical results.

use thiserror::Error;

use crate::geometry::{self, GeometryError, OnsetPenaltyModel, StageGeometry};
use crate::numeric;
use crate::physics::{CoronaModel, FluidMedium};
use crate::stack::{self, StageDegradation};

#[derive(Debug, Error)]
pub enum FitError {
    /// Too few usable samples to identify the requested parameters.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    /// The sweep never leaves the noise floor.
    #[error("no discharge: {0}")]
    NoDischarge(String),
    /// The observations cannot separate the requested parameters.
    #[error("unidentifiable: {0}")]
    Unidentifiable(String),
    /// Observations disagree on grid, tag, or shape.
    #[error("mismatched observations: {0}")]
    Mismatch(String),
    /// A measurement violates structural invariants.
    #[error("invalid measurement: {0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One sweep sample. Force is optional: pure I-V rigs record none.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub voltage: f64,
    pub current: f64,
    pub force: Option<f64>,
}

/// One recorded sweep of one device build.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasuredCurve {
    pub device_id: String,
    pub trial_id: String,
    /// Groups curves taken on geometrically identical builds.
    pub geometry_tag: String,
    pub samples: Vec<Sample>,
}

impl MeasuredCurve {
    pub fn new(
        device_id: impl Into<String>,
        trial_id: impl Into<String>,
        geometry_tag: impl Into<String>,
        samples: Vec<Sample>,
    ) -> Result<Self, FitError> {
        let curve = Self {
            device_id: device_id.into(),
            trial_id: trial_id.into(),
            geometry_tag: geometry_tag.into(),
            samples,
        };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<(), FitError> {
        if self.samples.is_empty() {
            return Err(FitError::Invalid(format!(
                "curve {}/{} has no samples",
                self.device_id, self.trial_id
            )));
        }
        for (i, s) in self.samples.iter().enumerate() {
            validate_sample(s, i)?;
            if i > 0 && s.voltage <= self.samples[i - 1].voltage {
                return Err(FitError::Invalid(format!(
                    "curve {}/{}: voltages must be strictly increasing, \
                     sample {} has {} after {}",
                    self.device_id,
                    self.trial_id,
                    i,
                    s.voltage,
                    self.samples[i - 1].voltage
                )));
            }
        }
        Ok(())
    }
}

fn validate_sample(s: &Sample, index: usize) -> Result<(), FitError> {
    if !(s.voltage.is_finite() && s.voltage >= 0.0) {
        return Err(FitError::Invalid(format!(
            "sample {index}: voltage {} must be finite and >= 0",
            s.voltage
        )));
    }
    if !(s.current.is_finite() && s.current >= 0.0) {
        return Err(FitError::Invalid(format!(
            "sample {index}: current {} must be finite and >= 0",
            s.current
        )));
    }
    if let Some(f) = s.force {
        if !(f.is_finite() && f >= 0.0) {
            return Err(FitError::Invalid(format!(
                "sample {index}: force {f} must be finite and >= 0"
            )));
        }
    }
    Ok(())
}

/// Full parameter set a fit can produce and an evaluation consumes.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationParams {
    pub corona: CoronaModel,
    pub degradation: StageDegradation,
    /// Onset penalty slope for wall-clearance deficits, V.
    pub onset_wall_coeff: f64,
    /// Onset penalty slope for tip-spacing deficits, V.
    pub onset_tip_coeff: f64,
    /// Replaces the medium's ion mobility when present, m^2/(V s).
    pub ion_mobility_override: Option<f64>,
}

impl Default for CalibrationParams {
    fn default() -> Self {
        let penalty = OnsetPenaltyModel::default();
        Self {
            corona: CoronaModel::default(),
            degradation: StageDegradation::default(),
            onset_wall_coeff: penalty.wall_coeff,
            onset_tip_coeff: penalty.tip_coeff,
            ion_mobility_override: None,
        }
    }
}

impl CalibrationParams {
    pub fn validate(&self) -> Result<(), FitError> {
        self.corona
            .validate()
            .map_err(|e| FitError::Invalid(e.to_string()))?;
        self.degradation
            .validate()
            .map_err(|e| FitError::Invalid(e.to_string()))?;
        if !(self.onset_wall_coeff.is_finite() && self.onset_wall_coeff >= 0.0) {
            return Err(FitError::Invalid(format!(
                "onset_wall_coeff {} must be finite and >= 0",
                self.onset_wall_coeff
            )));
        }
        if !(self.onset_tip_coeff.is_finite() && self.onset_tip_coeff >= 0.0) {
            return Err(FitError::Invalid(format!(
                "onset_tip_coeff {} must be finite and >= 0",
                self.onset_tip_coeff
            )));
        }
        if let Some(mu) = self.ion_mobility_override {
            if !(mu.is_finite() && mu > 0.0) {
                return Err(FitError::Invalid(format!(
                    "ion_mobility_override {mu} must be positive"
                )));
            }
        }
        Ok(())
    }

    pub fn penalty_model(&self) -> OnsetPenaltyModel {
        OnsetPenaltyModel {
            wall_coeff: self.onset_wall_coeff,
            tip_coeff: self.onset_tip_coeff,
        }
    }

    /// The base medium with the fitted mobility substituted when present.
    pub fn effective_medium(&self, base: &FluidMedium) -> FluidMedium {
        match self.ion_mobility_override {
            Some(mu) => FluidMedium {
                ion_mobility: mu,
                ..*base
            },
            None => *base,
        }
    }
}

/// Outcome of a fit. `params` carries the fitted fields; fields a given fit
/// does not estimate stay at their defaults (see each fit's docs).
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub params: CalibrationParams,
    /// RMS of the model residual over the fitted samples, in the fitted
    /// quantity's unit.
    pub residual_rms: f64,
    /// Number of samples the fit actually used.
    pub sample_count: usize,
    pub converged: bool,
    /// Human-readable caveat (clamped parameter, unidentifiable slope).
    pub note: Option<String>,
}

/// Number of intervals in the onset-voltage grid scan.
const ONSET_GRID: usize = 256;

/// Leading samples at or below this fraction of the peak current are
/// treated as sub-onset when deriving the noise floor.
const SUB_ONSET_FRACTION: f64 = 0.05;

fn rms(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for v in values {
        sum += v * v;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

/// Least-squares conductance for a fixed onset over `(V, I)` pairs, with
/// the residual sum of squares. The model is the total corona law: samples
/// at or below the candidate onset predict zero current.
fn conductance_at_onset(window: &[Sample], v0: f64) -> (f64, f64) {
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for s in window {
        let x = if s.voltage > v0 {
            s.voltage * (s.voltage - v0)
        } else {
            0.0
        };
        sxx += x * x;
        sxy += x * s.current;
    }
    let c = if sxx > 0.0 { (sxy / sxx).max(0.0) } else { 0.0 };
    let mut sse = 0.0;
    for s in window {
        let x = if s.voltage > v0 {
            s.voltage * (s.voltage - v0)
        } else {
            0.0
        };
        let r = s.current - c * x;
        sse += r * r;
    }
    (c, sse)
}

/// Fits the corona law `I = C * V * (V - V0)` to one measured curve.
///
/// See [`fit_iv_samples`]; the curve's own sample order is used and the
/// noise floor is derived from the data.
pub fn fit_iv(curve: &MeasuredCurve) -> Result<FitResult, FitError> {
    curve.validate()?;
    fit_iv_samples(&curve.samples, None)
}

/// Fits the corona law on a pooled set of curves sharing one geometry.
pub fn fit_iv_pooled(curves: &[MeasuredCurve]) -> Result<FitResult, FitError> {
    if curves.is_empty() {
        return Err(FitError::InsufficientData("no curves to pool".into()));
    }
    let mut samples = Vec::new();
    for curve in curves {
        curve.validate()?;
        samples.extend_from_slice(&curve.samples);
    }
    fit_iv_samples(&samples, None)
}

/// Corona-law fit over raw samples (not necessarily one monotone sweep).
///
/// The onset voltage is scanned on a 257-point grid between zero and the
/// first voltage whose current exceeds the noise floor, then refined by
/// golden-section search; the conductance has a closed form at each onset
/// candidate. `noise_floor` overrides the derived floor (3x the RMS of the
/// leading sub-onset run, where sub-onset means at or below 5% of the peak
/// current).
///
/// The fitted onset is the device's effective onset: it already absorbs the
/// device's own geometric penalty, so the returned params carry zero
/// onset-penalty slopes. `thrust_effectiveness` stays at 1; fit it
/// separately from force data.
pub fn fit_iv_samples(samples: &[Sample], noise_floor: Option<f64>) -> Result<FitResult, FitError> {
    for (i, s) in samples.iter().enumerate() {
        validate_sample(s, i)?;
    }
    let mut sorted: Vec<Sample> = samples.to_vec();
    sorted.sort_by(|a, b| {
        (a.voltage, a.current)
            .partial_cmp(&(b.voltage, b.current))
            .expect("validated samples are comparable")
    });
    let positive = sorted.iter().filter(|s| s.current > 0.0).count();
    if positive == 0 {
        return Err(FitError::NoDischarge(
            "every sample reads zero current".into(),
        ));
    }
    if positive < 3 {
        return Err(FitError::InsufficientData(format!(
            "corona fit needs at least 3 positive-current samples, got {positive}"
        )));
    }
    let floor = match noise_floor {
        Some(f) => {
            if !(f.is_finite() && f >= 0.0) {
                return Err(FitError::Invalid(format!(
                    "noise floor {f} must be finite and >= 0"
                )));
            }
            f
        }
        None => {
            let imax = sorted.iter().map(|s| s.current).fold(0.0, f64::max);
            let leading: Vec<f64> = sorted
                .iter()
                .map(|s| s.current)
                .take_while(|&i| i <= SUB_ONSET_FRACTION * imax)
                .collect();
            3.0 * rms(leading.into_iter())
        }
    };
    let Some(first) = sorted.iter().find(|s| s.current > floor) else {
        return Err(FitError::NoDischarge(format!(
            "no sample rises above the noise floor of {floor:.3e} A"
        )));
    };
    let v_first = first.voltage;
    let window: Vec<Sample> = sorted
        .iter()
        .filter(|s| s.voltage >= v_first)
        .copied()
        .collect();
    if window.len() < 3 {
        return Err(FitError::InsufficientData(format!(
            "only {} samples at or above the detected onset region",
            window.len()
        )));
    }
    let distinct = window
        .windows(2)
        .filter(|w| w[1].voltage > w[0].voltage)
        .count()
        + 1;
    if distinct < 2 {
        return Err(FitError::Unidentifiable(
            "all supra-onset samples share one voltage; onset and conductance \
             cannot be separated"
            .into(),
        ));
    }

    let sse_at = |v0: f64| conductance_at_onset(&window, v0).1;
    let mut best_j = 0usize;
    let mut best_sse = f64::INFINITY;
    for j in 0..=ONSET_GRID {
        let v0 = v_first * (j as f64) / (ONSET_GRID as f64);
        let sse = sse_at(v0);
        if sse < best_sse {
            best_sse = sse;
            best_j = j;
        }
    }
    let lo = v_first * (best_j.saturating_sub(1) as f64) / (ONSET_GRID as f64);
    let hi = v_first * ((best_j + 1).min(ONSET_GRID) as f64) / (ONSET_GRID as f64);
    let (v0, sse) = numeric::golden_min(sse_at, lo, hi, 200);
    let (c, _) = conductance_at_onset(&window, v0);
    if !(c.is_finite() && c > 0.0) {
        return Err(FitError::Invalid(format!(
            "data is not corona-like: fitted conductance {c:.3e} A/V^2"
        )));
    }
    let onset = v0.max(1e-12);
    let residual_rms = (sse / window.len() as f64).sqrt();
    Ok(FitResult {
        params: CalibrationParams {
            corona: CoronaModel {
                conductance_coeff: c,
                onset_voltage: onset,
                thrust_effectiveness: 1.0,
            },
            degradation: StageDegradation::default(),
            onset_wall_coeff: 0.0,
            onset_tip_coeff: 0.0,
            ion_mobility_override: None,
        },
        residual_rms,
        sample_count: window.len(),
        converged: true,
        note: None,
    })
}

/// Fits the thrust effectiveness `beta` from paired current/force samples:
/// the slope of measured force against the ideal drift thrust
/// `I * gap / mu`, clamped into (0, 1].
///
/// Only the effectiveness is estimated; the rest of the returned params are
/// defaults except the onset-penalty slopes, zeroed for the same reason as
/// in [`fit_iv_samples`].
pub fn fit_thrust_effectiveness(
    curve: &MeasuredCurve,
    gap: f64,
    medium: &FluidMedium,
) -> Result<FitResult, FitError> {
    curve.validate()?;
    fit_thrust_effectiveness_samples(&curve.samples, gap, medium)
}

/// [`fit_thrust_effectiveness`] over raw samples, e.g. pooled across
/// curves; sample order does not matter.
pub fn fit_thrust_effectiveness_samples(
    samples: &[Sample],
    gap: f64,
    medium: &FluidMedium,
) -> Result<FitResult, FitError> {
    for (i, s) in samples.iter().enumerate() {
        validate_sample(s, i)?;
    }
    if !(gap.is_finite() && gap > 0.0) {
        return Err(FitError::Invalid(format!("gap {gap} must be positive")));
    }
    medium
        .validate()
        .map_err(|e| FitError::Invalid(e.to_string()))?;
    let pairs: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.current > 0.0)
        .filter_map(|s| s.force.map(|f| (s.current * gap / medium.ion_mobility, f)))
        .collect();
    if pairs.is_empty() {
        return Err(FitError::InsufficientData(
            "no samples with positive current and a recorded force".into(),
        ));
    }
    let sxx: f64 = pairs.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pairs.iter().map(|(x, f)| x * f).sum();
    let raw = sxy / sxx;
    let mut note = None;
    let beta = if raw > 1.0 {
        note = Some(format!(
            "fitted effectiveness {raw:.4} exceeds the ideal drift thrust; clamped to 1"
        ));
        1.0
    } else if raw <= 0.0 {
        note = Some(format!(
            "fitted effectiveness {raw:.4} is non-positive; clamped to the lower bound"
        ));
        1e-12
    } else {
        raw
    };
    let residual_rms = rms(pairs.iter().map(|(x, f)| f - beta * x));
    Ok(FitResult {
        params: CalibrationParams {
            corona: CoronaModel {
                thrust_effectiveness: beta,
                ..CoronaModel::default()
            },
            degradation: StageDegradation::default(),
            onset_wall_coeff: 0.0,
            onset_tip_coeff: 0.0,
            ion_mobility_override: None,
        },
        residual_rms,
        sample_count: pairs.len(),
        converged: true,
        note,
    })
}

/// Fits the per-stage degradation factor `k` from a single-stage thrust and
/// multi-stage totals `(stage_count, total_thrust)`, by matching
/// `T_N = T_1 * S_N(k)` on a 10^-3 grid over (0, 1] with parabolic
/// refinement.
///
/// Superlinear observations (`T_N > N * T_1`) cannot be explained by any
/// `k <= 1`: the fit returns `k = 1` with a note rather than an error.
pub fn fit_stage_factor(
    single_stage_thrust: f64,
    multi: &[(u32, f64)],
) -> Result<FitResult, FitError> {
    if !(single_stage_thrust.is_finite() && single_stage_thrust > 0.0) {
        return Err(FitError::Invalid(format!(
            "single-stage thrust {single_stage_thrust} must be positive"
        )));
    }
    if multi.is_empty() {
        return Err(FitError::InsufficientData(
            "need at least one multi-stage observation".into(),
        ));
    }
    for &(n, t) in multi {
        if n < 2 {
            return Err(FitError::Invalid(format!(
                "multi-stage observations need stage_count >= 2, got {n}"
            )));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(FitError::Invalid(format!(
                "total thrust {t} must be finite and >= 0"
            )));
        }
    }
    let superlinear = multi
        .iter()
        .any(|&(n, t)| t > f64::from(n) * single_stage_thrust * (1.0 + 1e-9));
    let sse_at = |k: f64| -> f64 {
        multi
            .iter()
            .map(|&(n, t)| {
                let r = t - single_stage_thrust * stack::geometric_sum(k, n);
                r * r
            })
            .sum()
    };
    let (k, sse, note) = if superlinear {
        (
            1.0,
            sse_at(1.0),
            Some(
                "multi-stage thrust scales superlinearly; no degradation factor <= 1 \
                 explains it, clamped to k = 1"
                    .to_string(),
            ),
        )
    } else {
        const STEP: f64 = 1e-3;
        let mut best_j = 1usize;
        let mut best = f64::INFINITY;
        for j in 1..=1000usize {
            let sse = sse_at(STEP * j as f64);
            if sse < best {
                best = sse;
                best_j = j;
            }
        }
        let kb = STEP * best_j as f64;
        if best_j == 1000 && sse_at(1.0 - STEP) >= best {
            // Boundary optimum: keep k = 1 exact.
            (1.0, best, None)
        } else {
            let a = (kb - STEP).max(STEP / 2.0);
            let c = (kb + STEP).min(1.0);
            let (k, sse) = numeric::parabolic_min(sse_at, a, kb.min(c), c, 80);
            (k.min(1.0), sse, None)
        }
    };
    Ok(FitResult {
        params: CalibrationParams {
            degradation: StageDegradation { factor: k },
            ..CalibrationParams::default()
        },
        residual_rms: (sse / multi.len() as f64).sqrt(),
        sample_count: multi.len() + 1,
        converged: true,
        note,
    })
}

/// Fits the onset-penalty slopes from `(stage, measured onset voltage)`
/// observations.
///
/// The baseline onset is the mean over observations whose clearances are
/// both satisfied; slopes come from non-negative least squares of the onset
/// excess against the clearance deficits. Needs at least two observations,
/// contrasting geometries, and at least one deficit-free observation to
/// anchor the baseline. A deficit never observed leaves its slope at zero
/// with a note.
pub fn fit_onset_penalty(observations: &[(StageGeometry, f64)]) -> Result<FitResult, FitError> {
    if observations.len() < 2 {
        return Err(FitError::InsufficientData(format!(
            "onset-penalty fit needs at least 2 observations, got {}",
            observations.len()
        )));
    }
    for (stage, onset) in observations {
        stage.validate()?;
        if !(onset.is_finite() && *onset > 0.0) {
            return Err(FitError::Invalid(format!(
                "measured onset {onset} must be positive"
            )));
        }
    }
    if observations
        .windows(2)
        .all(|w| w[0].0 == w[1].0)
    {
        return Err(FitError::Unidentifiable(
            "all observations share one geometry; contrasting clearance \
             conditions are required"
                .into(),
        ));
    }
    let deficits: Vec<(f64, f64)> = observations
        .iter()
        .map(|(stage, _)| geometry::clearance_deficits(stage))
        .collect::<Result<_, _>>()?;
    let baseline: Vec<f64> = observations
        .iter()
        .zip(&deficits)
        .filter(|(_, &(w, t))| w == 0.0 && t == 0.0)
        .map(|((_, onset), _)| *onset)
        .collect();
    if baseline.is_empty() {
        return Err(FitError::Unidentifiable(
            "no observation satisfies both clearance rules; the baseline onset \
             cannot be anchored"
                .into(),
        ));
    }
    let v0 = baseline.iter().sum::<f64>() / baseline.len() as f64;

    let violated: Vec<((f64, f64), f64)> = observations
        .iter()
        .zip(&deficits)
        .filter(|(_, &(w, t))| w > 0.0 || t > 0.0)
        .map(|((_, onset), &d)| (d, onset - v0))
        .collect();
    let wall_active = violated.iter().any(|((w, _), _)| *w > 0.0);
    let tip_active = violated.iter().any(|((_, t), _)| *t > 0.0);

    let mut note = None;
    let (kw, kt) = if violated.is_empty() {
        (0.0, 0.0)
    } else if wall_active && tip_active {
        let (mut sww, mut swt, mut stt, mut syw, mut syt) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ((w, t), y) in &violated {
            sww += w * w;
            swt += w * t;
            stt += t * t;
            syw += w * y;
            syt += t * y;
        }
        let det = sww * stt - swt * swt;
        if det <= 1e-12 * sww * stt {
            return Err(FitError::Unidentifiable(
                "wall and tip deficits are collinear across observations; a \
                 geometry separating them is required"
                    .into(),
            ));
        }
        let kw = (stt * syw - swt * syt) / det;
        let kt = (sww * syt - swt * syw) / det;
        // Non-negative least squares by active-set clamping.
        if kw < 0.0 {
            (0.0, (syt / stt).max(0.0))
        } else if kt < 0.0 {
            ((syw / sww).max(0.0), 0.0)
        } else {
            (kw, kt)
        }
    } else if wall_active {
        let sxx: f64 = violated.iter().map(|((w, _), _)| w * w).sum();
        let sxy: f64 = violated.iter().map(|((w, _), y)| w * y).sum();
        note = Some(
            "tip-spacing deficit never observed; its slope is unidentifiable and \
             left at zero"
                .to_string(),
        );
        ((sxy / sxx).max(0.0), 0.0)
    } else {
        let sxx: f64 = violated.iter().map(|((_, t), _)| t * t).sum();
        let sxy: f64 = violated.iter().map(|((_, t), y)| t * y).sum();
        note = Some(
            "wall-clearance deficit never observed; its slope is unidentifiable \
             and left at zero"
                .to_string(),
        );
        (0.0, (sxy / sxx).max(0.0))
    };

    let residual_rms = rms(
        observations
            .iter()
            .zip(&deficits)
            .map(|((_, onset), &(w, t))| onset - (v0 + kw * w + kt * t)),
    );
    Ok(FitResult {
        params: CalibrationParams {
            corona: CoronaModel {
                onset_voltage: v0,
                ..CoronaModel::default()
            },
            degradation: StageDegradation::default(),
            onset_wall_coeff: kw,
            onset_tip_coeff: kt,
            ion_mobility_override: None,
        },
        residual_rms,
        sample_count: observations.len(),
        converged: true,
        note,
    })
}

/// Cross-device aggregate of repeated sweeps.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregatedCurve {
    /// Mean curve on the reference grid; `device_id` is "aggregate".
    pub curve: MeasuredCurve,
    pub device_count: usize,
    /// Per-voltage standard error of the mean current across device means;
    /// `None` when only one device contributed.
    pub current_sem: Option<Vec<f64>>,
    /// Per-voltage SEM of force across device means, where every device
    /// recorded force; `None` when only one device contributed.
    pub force_sem: Option<Vec<Option<f64>>>,
    pub note: Option<String>,
}

/// Snap tolerance between trial voltage grids, V.
const GRID_SNAP: f64 = 1.0;

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sample_std(values: &[f64]) -> f64 {
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() as f64 - 1.0);
    var.sqrt()
}

/// Averages repeated trials into one curve per shared geometry tag.
///
/// Trials must share the tag and a common voltage grid within a 1 V snap
/// tolerance (the first curve's grid is the reference). Currents average
/// first within a device across its trials, then across devices, so devices
/// with many trials do not dominate. The spread is the standard error of
/// the mean over device means; a single device yields no spread estimate
/// and a note saying so. Force aggregates the same way at grid points where
/// every device recorded it.
pub fn aggregate_trials(curves: &[MeasuredCurve]) -> Result<AggregatedCurve, FitError> {
    if curves.is_empty() {
        return Err(FitError::InsufficientData("no curves to aggregate".into()));
    }
    for curve in curves {
        curve.validate()?;
    }
    let tag = &curves[0].geometry_tag;
    if let Some(other) = curves.iter().find(|c| &c.geometry_tag != tag) {
        return Err(FitError::Mismatch(format!(
            "geometry tags differ: {tag:?} vs {:?} on {}/{}",
            other.geometry_tag, other.device_id, other.trial_id
        )));
    }
    let grid: Vec<f64> = curves[0].samples.iter().map(|s| s.voltage).collect();
    for curve in curves {
        if curve.samples.len() != grid.len() {
            return Err(FitError::Mismatch(format!(
                "curve {}/{} has {} samples, reference grid has {}",
                curve.device_id,
                curve.trial_id,
                curve.samples.len(),
                grid.len()
            )));
        }
        for (i, s) in curve.samples.iter().enumerate() {
            if (s.voltage - grid[i]).abs() > GRID_SNAP {
                return Err(FitError::Mismatch(format!(
                    "curve {}/{} sample {} at {} V is more than {GRID_SNAP} V from \
                     the reference grid point {} V",
                    curve.device_id, curve.trial_id, i, s.voltage, grid[i]
                )));
            }
        }
    }

    // Group by device, preserving first-appearance order.
    let mut device_ids: Vec<&str> = Vec::new();
    for curve in curves {
        if !device_ids.contains(&curve.device_id.as_str()) {
            device_ids.push(&curve.device_id);
        }
    }
    struct DeviceMean {
        current: Vec<f64>,
        force: Vec<Option<f64>>,
    }
    let mut devices: Vec<DeviceMean> = Vec::new();
    for id in &device_ids {
        let trials: Vec<&MeasuredCurve> =
            curves.iter().filter(|c| c.device_id == *id).collect();
        let mut current = Vec::with_capacity(grid.len());
        let mut force = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let currents: Vec<f64> = trials.iter().map(|t| t.samples[i].current).collect();
            current.push(mean(&currents));
            let forces: Vec<Option<f64>> = trials.iter().map(|t| t.samples[i].force).collect();
            force.push(if forces.iter().all(Option::is_some) {
                let vals: Vec<f64> = forces.into_iter().map(Option::unwrap).collect();
                Some(mean(&vals))
            } else {
                None
            });
        }
        devices.push(DeviceMean { current, force });
    }

    let d = devices.len();
    let mut samples = Vec::with_capacity(grid.len());
    let mut current_sem = Vec::with_capacity(grid.len());
    let mut force_sem = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let currents: Vec<f64> = devices.iter().map(|dev| dev.current[i]).collect();
        let force_means: Vec<Option<f64>> = devices.iter().map(|dev| dev.force[i]).collect();
        let force = if force_means.iter().all(Option::is_some) {
            let vals: Vec<f64> = force_means.iter().map(|f| f.unwrap()).collect();
            if d >= 2 {
                force_sem.push(Some(sample_std(&vals) / (d as f64).sqrt()));
            }
            Some(mean(&vals))
        } else {
            if d >= 2 {
                force_sem.push(None);
            }
            None
        };
        samples.push(Sample {
            voltage: grid[i],
            current: mean(&currents),
            force,
        });
        if d >= 2 {
            current_sem.push(sample_std(&currents) / (d as f64).sqrt());
        }
    }

    let note = if d == 1 {
        Some("single device: cross-device spread is not estimable".to_string())
    } else {
        None
    };
    Ok(AggregatedCurve {
        curve: MeasuredCurve {
            device_id: "aggregate".into(),
            trial_id: "mean".into(),
            geometry_tag: tag.clone(),
            samples,
        },
        device_count: d,
        current_sem: if d >= 2 { Some(current_sem) } else { None },
        force_sem: if d >= 2 { Some(force_sem) } else { None },
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CollectorGrid, EmitterRing};
    use crate::physics;
    use approx::assert_relative_eq;

    fn sweep(model: &CoronaModel, voltages: &[f64]) -> Vec<Sample> {
        voltages
            .iter()
            .map(|&v| Sample {
                voltage: v,
                current: physics::corona_current(v, model),
                force: None,
            })
            .collect()
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn fit_iv_recovers_noiseless_parameters() {
        let truth = CoronaModel {
            conductance_coeff: 3.2e-11,
            onset_voltage: 2450.0,
            thrust_effectiveness: 1.0,
        };
        let curve =
            MeasuredCurve::new("d1", "t1", "ar5", sweep(&truth, &grid(1800.0, 3300.0, 16)))
                .unwrap();
        let fit = fit_iv(&curve).unwrap();
        assert_relative_eq!(
            fit.params.corona.conductance_coeff,
            truth.conductance_coeff,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            fit.params.corona.onset_voltage,
            truth.onset_voltage,
            max_relative = 1e-9
        );
        assert!(fit.residual_rms < 1e-12 * 1e-4);
        assert!(fit.converged);
        assert_eq!(fit.params.onset_wall_coeff, 0.0);
        assert_eq!(fit.params.onset_tip_coeff, 0.0);
    }

    #[test]
    fn fit_iv_is_bit_deterministic() {
        let truth = CoronaModel::default();
        let curve =
            MeasuredCurve::new("d1", "t1", "tag", sweep(&truth, &grid(2000.0, 3300.0, 14)))
                .unwrap();
        let a = fit_iv(&curve).unwrap();
        let b = fit_iv(&curve).unwrap();
        assert_eq!(
            a.params.corona.conductance_coeff.to_bits(),
            b.params.corona.conductance_coeff.to_bits()
        );
        assert_eq!(
            a.params.corona.onset_voltage.to_bits(),
            b.params.corona.onset_voltage.to_bits()
        );
        assert_eq!(a.residual_rms.to_bits(), b.residual_rms.to_bits());
    }

    #[test]
    fn fit_iv_rejects_dark_and_thin_data() {
        let dark = MeasuredCurve::new(
            "d",
            "t",
            "g",
            vec![
                Sample {
                    voltage: 1000.0,
                    current: 0.0,
                    force: None,
                },
                Sample {
                    voltage: 2000.0,
                    current: 0.0,
                    force: None,
                },
            ],
        )
        .unwrap();
        assert!(matches!(fit_iv(&dark), Err(FitError::NoDischarge(_))));

        let thin = MeasuredCurve::new(
            "d",
            "t",
            "g",
            vec![
                Sample {
                    voltage: 2500.0,
                    current: 1e-6,
                    force: None,
                },
                Sample {
                    voltage: 2600.0,
                    current: 2e-6,
                    force: None,
                },
            ],
        )
        .unwrap();
        assert!(matches!(fit_iv(&thin), Err(FitError::InsufficientData(_))));
    }

    #[test]
    fn fit_iv_pools_across_trials() {
        let truth = CoronaModel::default();
        let c1 = MeasuredCurve::new("d1", "t1", "g", sweep(&truth, &grid(2000.0, 3300.0, 12)))
            .unwrap();
        let c2 = MeasuredCurve::new("d1", "t2", "g", sweep(&truth, &grid(2050.0, 3250.0, 12)))
            .unwrap();
        let fit = fit_iv_pooled(&[c1, c2]).unwrap();
        assert_relative_eq!(
            fit.params.corona.onset_voltage,
            truth.onset_voltage,
            max_relative = 1e-9
        );
    }

    #[test]
    fn curve_validation_rejects_unsorted_voltages() {
        let err = MeasuredCurve::new(
            "d",
            "t",
            "g",
            vec![
                Sample {
                    voltage: 2500.0,
                    current: 1e-6,
                    force: None,
                },
                Sample {
                    voltage: 2400.0,
                    current: 2e-6,
                    force: None,
                },
            ],
        )
        .unwrap_err();
        assert!(matches!(err, FitError::Invalid(_)));
    }

    #[test]
    fn thrust_effectiveness_recovers_slope() {
        let med = FluidMedium::default();
        let gap = 2e-3;
        let beta = 0.61;
        let truth = CoronaModel::default();
        let samples: Vec<Sample> = grid(2500.0, 3300.0, 9)
            .iter()
            .map(|&v| {
                let i = physics::corona_current(v, &truth);
                Sample {
                    voltage: v,
                    current: i,
                    force: Some(beta * i * gap / med.ion_mobility),
                }
            })
            .collect();
        let curve = MeasuredCurve::new("d", "t", "g", samples).unwrap();
        let fit = fit_thrust_effectiveness(&curve, gap, &med).unwrap();
        assert_relative_eq!(
            fit.params.corona.thrust_effectiveness,
            beta,
            max_relative = 1e-12
        );
        assert!(fit.residual_rms < 1e-15);
        assert!(fit.note.is_none());
    }

    #[test]
    fn thrust_effectiveness_clamps_to_one() {
        let med = FluidMedium::default();
        let samples = vec![Sample {
            voltage: 3000.0,
            current: 1e-5,
            force: Some(2e-4), // double the ideal 1e-4
        }];
        let curve = MeasuredCurve::new("d", "t", "g", samples).unwrap();
        let fit = fit_thrust_effectiveness(&curve, 2e-3, &med).unwrap();
        assert_eq!(fit.params.corona.thrust_effectiveness, 1.0);
        assert!(fit.note.is_some());
    }

    #[test]
    fn stage_factor_exact_series_round_trips() {
        let t1 = 6.18e-4;
        let k_true = 0.85;
        let multi: Vec<(u32, f64)> = [2u32, 3, 5]
            .iter()
            .map(|&n| (n, t1 * stack::geometric_sum(k_true, n)))
            .collect();
        let fit = fit_stage_factor(t1, &multi).unwrap();
        assert_relative_eq!(fit.params.degradation.factor, k_true, epsilon = 1e-9);
        assert!(fit.residual_rms < 1e-12);
        assert!(fit.note.is_none());
    }

    #[test]
    fn stage_factor_single_observation_matches_series_inverse() {
        // S_5(k) = 3.70 inverts to k = 0.84882...
        let fit = fit_stage_factor(1.0, &[(5, 3.70)]).unwrap();
        assert_relative_eq!(
            fit.params.degradation.factor,
            0.848_820_013_435_714_7,
            epsilon = 1e-6
        );
    }

    #[test]
    fn stage_factor_linear_data_gives_exactly_one() {
        let fit = fit_stage_factor(2.0e-4, &[(5, 1.0e-3)]).unwrap();
        assert_eq!(fit.params.degradation.factor, 1.0);
        assert!(fit.note.is_none());
    }

    #[test]
    fn stage_factor_superlinear_clamps_with_note() {
        let fit = fit_stage_factor(1.0e-4, &[(5, 5.1e-4)]).unwrap();
        assert_eq!(fit.params.degradation.factor, 1.0);
        assert!(fit.note.unwrap().contains("superlinear"));
    }

    #[test]
    fn stage_factor_rejects_single_stage_rows() {
        assert!(matches!(
            fit_stage_factor(1e-4, &[(1, 1e-4)]),
            Err(FitError::Invalid(_))
        ));
        assert!(matches!(
            fit_stage_factor(1e-4, &[]),
            Err(FitError::InsufficientData(_))
        ));
    }

    fn clean_stage() -> StageGeometry {
        // Bend depth 2 mm: clearance 2.24 mm > 1.62 mm; 3 tips on 4 mm:
        // chord 3.46 mm > 3.23 mm.
        let mut e = EmitterRing::new(4e-3, 6e-3, 3, 1.0, 6e-3).unwrap();
        e.bend_depth = 2e-3;
        StageGeometry::new(e, CollectorGrid::default(), 2e-3).unwrap()
    }

    fn wall_violating_stage() -> StageGeometry {
        // Lateral 0.75 mm, bend 1 mm: clearance exactly 1.25 mm.
        let e = EmitterRing {
            inner_diameter: 4.5e-3,
            outer_diameter: 6e-3,
            tip_count: 3,
            tip_angle_deg: 5.0,
            bend_depth: 1e-3,
            aspect_ratio: 1.0,
            duct_height: 6e-3,
        };
        StageGeometry::new(e, CollectorGrid::default(), 2e-3).unwrap()
    }

    #[test]
    fn onset_penalty_fit_recovers_anchor_slope() {
        // A clean build at 2400 V and the 1.25 mm clearance build 200 V
        // higher: the wall slope reproduces the anchored coefficient.
        let obs = vec![
            (clean_stage(), 2400.0),
            (wall_violating_stage(), 2600.0),
        ];
        let fit = fit_onset_penalty(&obs).unwrap();
        assert_relative_eq!(
            fit.params.onset_wall_coeff,
            geometry::anchored_wall_coeff(),
            max_relative = 1e-9
        );
        assert_eq!(fit.params.onset_tip_coeff, 0.0);
        assert_relative_eq!(fit.params.corona.onset_voltage, 2400.0, max_relative = 1e-12);
        assert!(fit.residual_rms < 1e-9);
        assert!(fit.note.unwrap().contains("tip-spacing"));
    }

    #[test]
    fn onset_penalty_fit_all_satisfied_gives_zero_slopes() {
        let mut other = clean_stage();
        other.emitter.bend_depth = 3e-3;
        let obs = vec![(clean_stage(), 2400.0), (other, 2400.0)];
        let fit = fit_onset_penalty(&obs).unwrap();
        assert_eq!(fit.params.onset_wall_coeff, 0.0);
        assert_eq!(fit.params.onset_tip_coeff, 0.0);
        assert_eq!(fit.residual_rms, 0.0);
    }

    #[test]
    fn onset_penalty_fit_identical_geometries_unidentifiable() {
        let obs = vec![(clean_stage(), 2400.0), (clean_stage(), 2450.0)];
        assert!(matches!(
            fit_onset_penalty(&obs),
            Err(FitError::Unidentifiable(_))
        ));
    }

    #[test]
    fn onset_penalty_fit_needs_baseline() {
        let mut second = wall_violating_stage();
        second.emitter.bend_depth = 0.5e-3;
        let obs = vec![
            (wall_violating_stage(), 2600.0),
            (second, 2700.0),
        ];
        assert!(matches!(
            fit_onset_penalty(&obs),
            Err(FitError::Unidentifiable(_))
        ));
    }

    fn flat_curve(device: &str, trial: &str, current: f64) -> MeasuredCurve {
        let samples = grid(2400.0, 3300.0, 10)
            .iter()
            .map(|&v| Sample {
                voltage: v,
                current,
                force: None,
            })
            .collect();
        MeasuredCurve::new(device, trial, "tag", samples).unwrap()
    }

    #[test]
    fn aggregate_means_devices_not_trials() {
        // Device A contributes two trials (1 and 3 uA), device B one trial
        // at 2 uA: the device-first mean is (2 + 2) / 2, not (1+3+2)/3.
        let curves = vec![
            flat_curve("a", "t1", 1e-6),
            flat_curve("a", "t2", 3e-6),
            flat_curve("b", "t1", 2e-6),
        ];
        let agg = aggregate_trials(&curves).unwrap();
        assert_eq!(agg.device_count, 2);
        for s in &agg.curve.samples {
            assert_relative_eq!(s.current, 2e-6, max_relative = 1e-12);
        }
    }

    #[test]
    fn aggregate_sem_matches_three_device_example() {
        let curves = vec![
            flat_curve("a", "t1", 1e-6),
            flat_curve("b", "t1", 2e-6),
            flat_curve("c", "t1", 3e-6),
        ];
        let agg = aggregate_trials(&curves).unwrap();
        let sem = agg.current_sem.unwrap();
        for v in &sem {
            assert_relative_eq!(*v, 5.773_502_691_896_258e-7, max_relative = 1e-12);
        }
        assert!(agg.note.is_none());
    }

    #[test]
    fn aggregate_single_device_has_no_spread() {
        let agg = aggregate_trials(&[flat_curve("a", "t1", 1e-6)]).unwrap();
        assert_eq!(agg.device_count, 1);
        assert!(agg.current_sem.is_none());
        assert!(agg.note.unwrap().contains("single device"));
    }

    #[test]
    fn aggregate_rejects_mismatched_inputs() {
        let mut other_tag = flat_curve("a", "t1", 1e-6);
        other_tag.geometry_tag = "different".into();
        assert!(matches!(
            aggregate_trials(&[flat_curve("b", "t1", 1e-6), other_tag]),
            Err(FitError::Mismatch(_))
        ));

        let mut shifted = flat_curve("b", "t1", 1e-6);
        for s in &mut shifted.samples {
            s.voltage += 5.0;
        }
        assert!(matches!(
            aggregate_trials(&[flat_curve("a", "t1", 1e-6), shifted]),
            Err(FitError::Mismatch(_))
        ));
    }

    #[test]
    fn aggregate_snaps_within_one_volt() {
        let mut jittered = flat_curve("b", "t1", 4e-6);
        for s in &mut jittered.samples {
            s.voltage += 0.5;
        }
        let agg = aggregate_trials(&[flat_curve("a", "t1", 2e-6), jittered]).unwrap();
        // Reference grid comes from the first curve.
        assert_eq!(agg.curve.samples[0].voltage, 2400.0);
        assert_relative_eq!(agg.curve.samples[0].current, 3e-6, max_relative = 1e-12);
    }
}
