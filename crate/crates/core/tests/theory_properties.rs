use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wavebreak::theory::{boundary_identity, bounds, normalize, riccati_deadline, riccati_envelope, t_star, T_star};
use wavebreak::{classify, in_omega, SlopePair};

fn omega_point() -> impl Strategy<Value = SlopePair> {
    (-10.0f64..-2.0001, 0.0f64..1.0).prop_map(|(m1, f)| SlopePair::new(m1, f * (m1 * m1 + m1)))
}

#[test]
fn bounds_are_ordered_on_random_omega_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    while checked < 10_000 {
        let m1 = -10.0 + 8.0 * rng.random::<f64>();
        if m1 >= -2.0 {
            continue;
        }
        let m2 = rng.random::<f64>() * (m1 * m1 + m1);
        let p = SlopePair::new(m1, m2);
        assert!(in_omega(p));
        let (small, big) = (t_star(p).unwrap(), T_star(p).unwrap());
        assert!(big > 0.0, "{p:?}");
        assert!(small <= big, "{p:?}");
        checked += 1;
    }
}

proptest! {
    #[test]
    fn boundary_identity_matches_expansion(m1 in -50.0f64..50.0) {
        let m2 = m1 * m1 + m1;
        let expansion = m2 * m2 - m2 + m1;
        prop_assert!((expansion - boundary_identity(m1)).abs() <= 1e-9 * m1.abs().powi(4).max(1.0));
    }

    #[test]
    fn label_survives_normalization(m1 in -20.0f64..5.0, m2 in -5.0f64..40.0, k0 in 0.05f64..20.0) {
        let p = SlopePair::new(m1, m2);
        prop_assert_eq!(classify(p, k0), classify(normalize(p, k0), 1.0));
    }

    #[test]
    fn steeper_slope_means_earlier_deadline(m1 in -100.0f64..-2.001, gap in 1e-3f64..10.0) {
        prop_assert!(riccati_deadline(m1 - gap) < riccati_deadline(m1));
    }

    #[test]
    fn envelope_starts_at_reciprocal_slope(m1 in -1e4f64..-2.0001, ts in 0.0f64..10.0) {
        prop_assert_eq!(riccati_envelope(m1, ts, ts).unwrap(), 1.0 / m1);
    }

    #[test]
    fn envelope_reaches_zero_at_deadline(p in omega_point()) {
        prop_assume!(p.sum() <= 0.0);
        let deadline = T_star(p).unwrap();
        let at = riccati_envelope(p.m1, 0.0, deadline).unwrap();
        prop_assert!(at.abs() <= 1e-12 * (1.0 / p.m1).abs().max(1.0));
    }

    #[test]
    fn bounds_report_is_consistent(p in omega_point()) {
        let b = bounds(p).unwrap();
        prop_assert!(b.t_star >= 0.0 && b.t_star <= b.breaking_bound);
        prop_assert_eq!(b.decay_rate.is_some(), p.sum() > 0.0);
        if let Some(rate) = b.decay_rate {
            prop_assert!(rate < 0.0);
        }
        prop_assert!(b.envelope_origin.sum() <= 0.0);
    }
}
