//! Adaptive Gauss–Kronrod (7, 15) quadrature.

use thiserror::Error;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 40;
const MAX_INTERVALS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("quadrature did not converge: estimated error {achieved:e} exceeds tolerance {requested:e}")]
pub struct QuadratureError {
    pub achieved: f64,
    pub requested: f64,
}

/// Result of an adaptive integration: value plus accumulated error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += wk * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Adaptive<'f, F> {
    f: &'f F,
    budget: usize,
    converged: bool,
}

impl<F: Fn(f64) -> f64> Adaptive<'_, F> {
    fn run(&mut self, a: f64, b: f64, tol: f64, depth: u32) -> Integral {
        let (value, error) = gk15(self.f, a, b);
        // Below a few ulps of the panel value further bisection cannot help.
        if error <= tol.max(8.0 * f64::EPSILON * value.abs()) {
            return Integral { value, error };
        }
        if depth >= MAX_DEPTH || self.budget == 0 {
            self.converged = false;
            return Integral { value, error };
        }
        self.budget -= 1;
        let mid = 0.5 * (a + b);
        let left = self.run(a, mid, 0.5 * tol, depth + 1);
        let right = self.run(mid, b, 0.5 * tol, depth + 1);
        Integral {
            value: left.value + right.value,
            error: left.error + right.error,
        }
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` by recursive bisection.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Integral, QuadratureError> {
    integrate_panels(f, &[a, b], tol)
}

/// Integrates over consecutive panels `[p_i, p_{i+1}]`, splitting the tolerance
/// evenly. Useful for long oscillatory ranges where one adaptive tree is too deep.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], tol: f64) -> Result<Integral, QuadratureError> {
    let panels = breakpoints.len().saturating_sub(1).max(1);
    let per_panel = tol / panels as f64;
    let mut state = Adaptive {
        f: &f,
        budget: MAX_INTERVALS,
        converged: true,
    };
    let mut total = Integral { value: 0.0, error: 0.0 };
    for w in breakpoints.windows(2) {
        let part = state.run(w[0], w[1], per_panel, 0);
        total.value += part.value;
        total.error += part.error;
    }
    if state.converged && total.value.is_finite() {
        Ok(total)
    } else {
        Err(QuadratureError {
            achieved: total.error,
            requested: tol,
        })
    }
}
