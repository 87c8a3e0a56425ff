//! Seeded synthetic sweeps for tests, examples, and fit validation.
//!
//! All randomness comes from a caller-supplied seed through ChaCha8, so a
//! given (model, grid, noise, seed) tuple always produces the same bytes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::calibrate::{MeasuredCurve, Sample};
use crate::physics::{self, CoronaModel, FluidMedium};

/// Synthesizes a current sweep with multiplicative Gaussian noise.
///
/// Each clean current is scaled by `1 + N(0, noise_rel)` and clamped at
/// zero; `noise_rel = 0` reproduces the model exactly.
pub fn iv_sweep(model: &CoronaModel, voltages: &[f64], noise_rel: f64, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_rel.max(0.0)).expect("finite std dev");
    voltages
        .iter()
        .map(|&v| {
            let clean = physics::corona_current(v, model);
            let current = if noise_rel > 0.0 {
                (clean * (1.0 + noise.sample(&mut rng))).max(0.0)
            } else {
                clean
            };
            Sample {
                voltage: v,
                current,
                force: None,
            }
        })
        .collect()
}

/// Synthesizes a current-and-force sweep.
///
/// The clean force is the drift thrust `beta * I * gap / mobility` of the
/// noiseless current; current and force noise draw independently from the
/// same relative width.
pub fn ivf_sweep(
    model: &CoronaModel,
    gap: f64,
    medium: &FluidMedium,
    thrust_effectiveness: f64,
    voltages: &[f64],
    noise_rel: f64,
    seed: u64,
) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_rel.max(0.0)).expect("finite std dev");
    voltages
        .iter()
        .map(|&v| {
            let clean_i = physics::corona_current(v, model);
            let clean_f = thrust_effectiveness * clean_i * gap / medium.ion_mobility;
            let (current, force) = if noise_rel > 0.0 {
                (
                    (clean_i * (1.0 + noise.sample(&mut rng))).max(0.0),
                    (clean_f * (1.0 + noise.sample(&mut rng))).max(0.0),
                )
            } else {
                (clean_i, clean_f)
            };
            Sample {
                voltage: v,
                current,
                force: Some(force),
            }
        })
        .collect()
}

/// Wraps samples in a curve with the given identifiers.
pub fn curve(
    device_id: &str,
    trial_id: &str,
    geometry_tag: &str,
    samples: Vec<Sample>,
) -> MeasuredCurve {
    MeasuredCurve {
        device_id: device_id.into(),
        trial_id: trial_id.into(),
        geometry_tag: geometry_tag.into(),
        samples,
    }
}

/// Evenly spaced voltages from `lo` to `hi` inclusive.
pub fn voltage_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "a grid needs at least its two endpoints");
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_bytes() {
        let model = CoronaModel::default();
        let grid = voltage_grid(2.0e3, 3.3e3, 12);
        let a = iv_sweep(&model, &grid, 0.05, 7);
        let b = iv_sweep(&model, &grid, 0.05, 7);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.current.to_bits(), y.current.to_bits());
        }
        let c = iv_sweep(&model, &grid, 0.05, 8);
        assert!(a.iter().zip(&c).any(|(x, y)| x.current != y.current));
    }

    #[test]
    fn zero_noise_reproduces_the_model() {
        let model = CoronaModel::default();
        let grid = voltage_grid(2.0e3, 3.3e3, 12);
        for s in iv_sweep(&model, &grid, 0.0, 3) {
            assert_eq!(s.current, physics::corona_current(s.voltage, &model));
        }
    }

    #[test]
    fn force_tracks_the_clean_current() {
        let model = CoronaModel::default();
        let medium = FluidMedium::default();
        let grid = voltage_grid(2.5e3, 3.3e3, 5);
        let samples = ivf_sweep(&model, 2.0e-3, &medium, 0.6, &grid, 0.0, 1);
        for s in &samples {
            let expect = 0.6 * s.current * 2.0e-3 / medium.ion_mobility;
            assert_eq!(s.force.unwrap(), expect);
        }
    }

    #[test]
    fn noise_never_goes_negative() {
        let model = CoronaModel::default();
        let grid = voltage_grid(2.3e3, 3.3e3, 200);
        for s in iv_sweep(&model, &grid, 3.0, 42) {
            assert!(s.current >= 0.0);
        }
    }
}
