use proptest::prelude::*;

use wavebreak::solver::{Dynamics, Simulation};
use wavebreak::theory::in_omega_closure;
use wavebreak::{build_profile, in_omega, run, PhaseVelocity, SlopePair, SolverConfig, Verdict};

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn mean_is_conserved_over_many_steps() {
    let ic = build_profile(-1.0, 0.5, 40.0, 2.0, 512).unwrap();
    // A nonzero mean so that conservation is not trivially zero.
    let shifted: Vec<f64> = ic.samples().iter().map(|u| u + 0.3).collect();
    let ic = wavebreak::InitialCondition::from_samples(40.0, shifted).unwrap();
    let pv = PhaseVelocity::gaussian(1.0).unwrap();
    let mut sim = Simulation::new(&ic, &pv, &SolverConfig::default()).unwrap();
    let m0 = mean(&sim.model().physical(sim.state()));
    for _ in 0..1000 {
        let dt = sim.stable_dt();
        sim.advance(dt).unwrap();
    }
    let m = mean(&sim.model().physical(sim.state()));
    assert!((m - m0).abs() <= 1e-13, "mean drift {:e}", m - m0);
    assert!(sim.time() > 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn linear_evolution_is_exact_for_any_steps(steps in prop::collection::vec(0.01f64..0.4, 3..40), whitham in any::<bool>()) {
        let pv = if whitham { PhaseVelocity::whitham() } else { PhaseVelocity::gaussian(1.0).unwrap() };
        let ic = build_profile(-2.0, 1.0, 40.0, 2.0, 512).unwrap();
        let cfg = SolverConfig { dynamics: Dynamics::LINEAR, ..SolverConfig::default() };
        let mut sim = Simulation::new(&ic, &pv, &cfg).unwrap();
        let initial = sim.state().to_vec();
        let mut i = 0;
        while sim.time() < 1.0 {
            let dt = steps[i % steps.len()].min(1.0 - sim.time());
            sim.advance(dt).unwrap();
            i += 1;
        }
        let exact = sim.model().physical(&sim.model().linear_solution(&initial, sim.time()));
        let numeric = sim.model().physical(sim.state());
        let err = exact.iter().zip(&numeric).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        prop_assert!(err <= 1e-10, "error {err:e}");
    }

    #[test]
    fn series_is_ordered_and_signed(a in -1.5f64..-0.1, b in 0.0f64..1.5) {
        let Ok(ic) = build_profile(a, b, 40.0, 2.0, 512) else { return Ok(()) };
        let cfg = SolverConfig { max_time: 0.5, ..SolverConfig::default() };
        let report = run(&ic, &PhaseVelocity::gaussian(1.0).unwrap(), &cfg).unwrap();
        for pair in report.series.windows(2) {
            prop_assert!(pair[1].t > pair[0].t);
        }
        for s in &report.series {
            prop_assert!(s.m1 <= 0.0 && 0.0 <= s.m2 + 1e-12, "{s:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn slopes_stay_in_closed_region_until_verdict(m1 in -6.0f64..-3.0, f in 0.05f64..0.5) {
        let p = SlopePair::new(m1, f * (m1 * m1 + m1));
        prop_assume!(in_omega(p));
        let Ok(ic) = build_profile(p.m1, p.m2, 40.0, 2.0, 2048) else { return Ok(()) };
        let report = run(&ic, &PhaseVelocity::gaussian(1.0).unwrap(), &SolverConfig::default()).unwrap();
        prop_assert!(matches!(report.verdict, Verdict::BrokeAt(_)), "{:?}", report.verdict);
        for s in &report.series {
            prop_assert!(in_omega_closure(s.slopes(), 1e-6), "{s:?}");
        }
    }
}
