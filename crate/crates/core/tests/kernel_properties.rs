use approx::assert_relative_eq;
use proptest::prelude::*;

use wavebreak::kernels::{kernel_eval_quadrature, TabulatedSymbol};
use wavebreak::{check_admissibility, kernel_eval, multiplier, PhaseVelocity};

fn tabulated() -> PhaseVelocity {
    let table: Vec<(f64, f64)> = (0..=400)
        .map(|i| {
            let k = i as f64 * 0.05;
            (k, 2.0 / (1.0 + k * k) * (-k).exp())
        })
        .collect();
    PhaseVelocity::tabulated(TabulatedSymbol::new(table).unwrap(), "table")
}

fn variants() -> Vec<PhaseVelocity> {
    vec![
        PhaseVelocity::gaussian(1.0).unwrap(),
        PhaseVelocity::gaussian(0.3).unwrap(),
        PhaseVelocity::exponential(1.0).unwrap(),
        PhaseVelocity::exponential(2.5).unwrap(),
        PhaseVelocity::whitham(),
        tabulated(),
    ]
}

proptest! {
    #[test]
    fn multiplier_is_even(kappa in -19.9f64..19.9) {
        for pv in variants() {
            let plus = multiplier(&pv, kappa).unwrap();
            let minus = multiplier(&pv, -kappa).unwrap();
            prop_assert_eq!(plus, minus);
        }
    }

    #[test]
    fn closed_form_kernels_peak_at_origin(width in 0.1f64..5.0, rate in 0.1f64..5.0, x in 0.01f64..10.0) {
        let g = PhaseVelocity::gaussian(width).unwrap();
        let e = PhaseVelocity::exponential(rate).unwrap();
        prop_assert!(kernel_eval(&g, x).unwrap() < kernel_eval(&g, 0.0).unwrap());
        prop_assert!(kernel_eval(&e, x).unwrap() < kernel_eval(&e, 0.0).unwrap());
        prop_assert_eq!(kernel_eval(&g, x).unwrap(), kernel_eval(&g, -x).unwrap());
    }
}

#[test]
fn kernel_at_origin_matches_analytic_value() {
    for width in [0.25, 1.0, 3.0] {
        let pv = PhaseVelocity::gaussian(width).unwrap();
        assert_relative_eq!(kernel_eval(&pv, 0.0).unwrap(), 1.0, max_relative = 1e-10);
        assert_relative_eq!(kernel_eval_quadrature(&pv, 0.0).unwrap(), 1.0, max_relative = 1e-10);
    }
    for rate in [0.5, 1.0, 4.0] {
        let pv = PhaseVelocity::exponential(rate).unwrap();
        assert_relative_eq!(kernel_eval(&pv, 0.0).unwrap(), 1.0, max_relative = 1e-10);
    }
}

#[test]
fn quadrature_matches_closed_gaussian() {
    let pv = PhaseVelocity::gaussian(1.0).unwrap();
    for x in [0.0, 0.5, 1.0, 2.0] {
        let exact = (-x * x / 2.0f64).exp();
        assert!(
            (kernel_eval_quadrature(&pv, x).unwrap() - exact).abs() <= 1e-8,
            "x = {x}"
        );
    }
}

fn probe_grid() -> Vec<f64> {
    (0..=200).map(|i| i as f64 * 0.05).collect()
}

#[test]
fn admissibility_verdicts() {
    let gaussian = check_admissibility(&PhaseVelocity::gaussian(1.0).unwrap(), &probe_grid()).unwrap();
    assert!(gaussian.all_hold(), "{gaussian:?}");
    let whitham = check_admissibility(&PhaseVelocity::whitham(), &probe_grid()).unwrap();
    assert!(!whitham.bounded);
    assert!(whitham.k_at_zero.is_none());
}
