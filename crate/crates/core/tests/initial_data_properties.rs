use proptest::prelude::*;

use wavebreak::initial_data::InitialDataError;
use wavebreak::{build_profile, measured_extrema};

fn profile_args() -> impl Strategy<Value = (f64, f64, f64)> {
    (-8.0f64..-0.05, 0.0f64..8.0, 1.0f64..4.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn measured_extrema_match_request((a, b, w) in profile_args()) {
        let ic = match build_profile(a, b, 40.0, w, 4096) {
            Err(InitialDataError::Geometry { .. }) => return Ok(()),
            other => other.unwrap(),
        };
        let m = measured_extrema(&ic);
        prop_assert!((m.m1 - a).abs() <= 1e-6 * a.abs().max(1.0), "min {} vs {}", m.m1, a);
        prop_assert!((m.m2 - b).abs() <= 1e-6 * b.abs().max(1.0), "max {} vs {}", m.m2, b);
    }

    // The bump spectrum decays like exp(-sqrt(2 κ w)); the Nyquist content the
    // derivative cannot carry stays below 1e-10 once a bump spans about a
    // hundred grid points.
    #[test]
    fn slopes_survive_antidifferentiation((a, b, w) in profile_args()) {
        let ic = match build_profile(a, b, 40.0, w, 8192) {
            Err(InitialDataError::Geometry { .. }) => return Ok(()),
            other => other.unwrap(),
        };
        let profile = *ic.profile().unwrap();
        let grid = ic.grid();
        let exact: Vec<f64> = grid.points().iter().map(|&x| profile.slope_at(x, 40.0)).collect();
        let mean = exact.iter().sum::<f64>() / exact.len() as f64;
        prop_assert!(mean.abs() <= 1e-12, "mean {mean:e}");
        for (s, e) in ic.slope_samples().iter().zip(&exact) {
            prop_assert!((s - e).abs() <= 1e-10);
        }
    }
}

/// Extrema located on a ten times finer grid of the closed-form derivative
/// agree with the spectral measurement.
#[test]
fn fine_grid_oracle() {
    let ic = build_profile(-4.0, 2.0, 40.0, 2.0, 1024).unwrap();
    let profile = *ic.profile().unwrap();
    let n = 10 * 1024;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..n {
        let v = profile.slope_at(40.0 * j as f64 / n as f64, 40.0);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let m = measured_extrema(&ic);
    assert!((m.m1 - lo).abs() < 1e-5, "{} vs {lo}", m.m1);
    assert!((m.m2 - hi).abs() < 1e-5, "{} vs {hi}", m.m2);
}
