//! Convolution kernels described by their phase velocity `c(κ)`.
//!
//! A kernel `K` and its symbol are related by
//! `K(x) = (1/2π) ∫ c(κ) e^{iκx} dκ`, so the nonlocal term `K ∗ u_x` acts on
//! Fourier coefficients as multiplication by `iκ c(κ)`.
//!
//! Two regular kernels are shipped with `K(0) = 1`:
//!
//! * `Gaussian(σ)`: `K(x) = exp(-x²/(2σ²))`, `c(κ) = σ√(2π) exp(-σ²κ²/2)`.
//! * `Exponential(λ)`: `K(x) = exp(-λ|x|)`, `c(κ) = 2λ/(λ² + κ²)`.
//!
//! The exponential kernel is only Lipschitz at the origin. It is bounded,
//! integrable, symmetric and decreasing on `[0, ∞)`, but not smooth there;
//! [`check_admissibility`] does not test smoothness.
//!
//! `Whitham` is the full-dispersion symbol `sqrt(tanh κ / κ)`. Its kernel is
//! unbounded at `x = 0`, so it can drive simulations but is rejected wherever
//! a finite `K(0)` is needed.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::quadrature::{self, QuadratureError};

/// Symbols below this size are treated as a negligible tail by the inverse transform.
pub const SYMBOL_TAIL: f64 = 1e-12;

const WHITHAM_FLAT: f64 = 1e-8;
const WHITHAM_SERIES: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("{0} parameter must be strictly positive and finite, got {1}")]
    NonPositive(&'static str, f64),
    #[error("wavenumber {kappa} outside tabulated range [{lo}, {hi}]")]
    OutOfRange { kappa: f64, lo: f64, hi: f64 },
    #[error("kernel is singular at x = 0")]
    Singular,
    #[error("pointwise kernel evaluation is not available for the Whitham symbol (it decays like |κ|^(-1/2))")]
    Unsupported,
    #[error("inverse transform not accurate: achieved {achieved:e}")]
    Accuracy { achieved: f64 },
    #[error("invalid tabulated symbol: {0}")]
    InvalidTable(String),
    #[error("invalid probe grid: {0}")]
    InvalidProbeGrid(String),
    #[error("unknown kernel `{0}` (expected gaussian:<σ>, exponential:<λ>, whitham or tabulated:<path>)")]
    Parse(String),
    #[error("reading tabulated symbol: {0}")]
    Csv(#[from] csv::Error),
}

impl From<QuadratureError> for KernelError {
    fn from(e: QuadratureError) -> Self {
        KernelError::Accuracy { achieved: e.achieved }
    }
}

/// Samples of a symbol on `κ ≥ 0`; negative wavenumbers are served by symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSymbol {
    kappa: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedSymbol {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self, KernelError> {
        if samples.len() < 2 {
            return Err(KernelError::InvalidTable("need at least two samples".into()));
        }
        let (kappa, values): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
        if kappa.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(KernelError::InvalidTable("non-finite entry".into()));
        }
        if kappa[0] < 0.0 {
            return Err(KernelError::InvalidTable("wavenumbers must be nonnegative".into()));
        }
        if kappa.windows(2).any(|w| w[1] <= w[0]) {
            return Err(KernelError::InvalidTable(
                "wavenumbers must be strictly increasing".into(),
            ));
        }
        Ok(Self { kappa, values })
    }

    /// Reads a CSV file with header `kappa,c`.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self, KernelError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)?;
        let headers = reader.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "kappa" || &headers[1] != "c" {
            return Err(KernelError::InvalidTable(format!(
                "expected header `kappa,c`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut samples = Vec::new();
        for record in reader.records() {
            let record = record?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| KernelError::InvalidTable(format!("not a number: `{s}`")))
            };
            samples.push((parse(&record[0])?, parse(&record[1])?));
        }
        Self::new(samples)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.kappa[0], self.kappa[self.kappa.len() - 1])
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.kappa.iter().copied().zip(self.values.iter().copied())
    }

    fn eval(&self, kappa: f64) -> Result<f64, KernelError> {
        let k = kappa.abs();
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&k) {
            return Err(KernelError::OutOfRange { kappa, lo, hi });
        }
        let i = self.kappa.partition_point(|&s| s <= k).clamp(1, self.kappa.len() - 1);
        let (k0, k1) = (self.kappa[i - 1], self.kappa[i]);
        let (c0, c1) = (self.values[i - 1], self.values[i]);
        Ok(c0 + (c1 - c0) * (k - k0) / (k1 - k0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelShape {
    Gaussian { width: f64 },
    Exponential { rate: f64 },
    Whitham,
    Tabulated(TabulatedSymbol),
}

/// A kernel specified by its phase velocity, with a human-readable label.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVelocity {
    shape: KernelShape,
    description: String,
}

impl PhaseVelocity {
    pub fn gaussian(width: f64) -> Result<Self, KernelError> {
        positive("gaussian width", width)?;
        Ok(Self {
            shape: KernelShape::Gaussian { width },
            description: format!("gaussian:{width}"),
        })
    }

    pub fn exponential(rate: f64) -> Result<Self, KernelError> {
        positive("exponential rate", rate)?;
        Ok(Self {
            shape: KernelShape::Exponential { rate },
            description: format!("exponential:{rate}"),
        })
    }

    pub fn whitham() -> Self {
        Self {
            shape: KernelShape::Whitham,
            description: "whitham".into(),
        }
    }

    pub fn tabulated(table: TabulatedSymbol, description: impl Into<String>) -> Self {
        Self {
            shape: KernelShape::Tabulated(table),
            description: description.into(),
        }
    }

    /// Parses `gaussian:σ`, `exponential:λ`, `whitham` or `tabulated:<path>`.
    /// The tabulated form reads the file immediately.
    pub fn parse(spec: &str) -> Result<Self, KernelError> {
        let spec = spec.trim();
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n.trim().to_ascii_lowercase(), Some(a.trim())),
            None => (spec.to_ascii_lowercase(), None),
        };
        let number = |a: Option<&str>| -> Result<f64, KernelError> {
            a.and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| KernelError::Parse(spec.to_string()))
        };
        match (name.as_str(), arg) {
            ("gaussian", a) => Self::gaussian(number(a)?),
            ("exponential", a) => Self::exponential(number(a)?),
            ("whitham", None) => Ok(Self::whitham()),
            ("tabulated", Some(path)) if !path.is_empty() => {
                let table = TabulatedSymbol::from_csv_path(path)?;
                Ok(Self::tabulated(table, spec))
            }
            _ => Err(KernelError::Parse(spec.to_string())),
        }
    }

    pub fn shape(&self) -> &KernelShape {
        &self.shape
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// `K(0)` when the kernel is bounded and has a closed form or a convergent
    /// inverse transform.
    pub fn k_at_zero(&self) -> Option<f64> {
        kernel_eval(self, 0.0).ok()
    }
}

impl fmt::Display for PhaseVelocity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

impl FromStr for PhaseVelocity {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

fn positive(name: &'static str, v: f64) -> Result<(), KernelError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(KernelError::NonPositive(name, v))
    }
}

fn whitham_symbol(kappa: f64) -> f64 {
    let k = kappa.abs();
    if k < WHITHAM_FLAT {
        1.0
    } else if k < WHITHAM_SERIES {
        // tanh κ / κ = 1 - κ²/3 + 2κ⁴/15 - ...
        let k2 = k * k;
        (1.0 - k2 / 3.0 + 2.0 * k2 * k2 / 15.0).sqrt()
    } else {
        (k.tanh() / k).sqrt()
    }
}

/// Evaluates the phase velocity `c(κ)`; even in `κ`.
pub fn multiplier(pv: &PhaseVelocity, kappa: f64) -> Result<f64, KernelError> {
    if !kappa.is_finite() {
        return Err(KernelError::OutOfRange {
            kappa,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        });
    }
    Ok(match &pv.shape {
        KernelShape::Gaussian { width } => {
            let s = width * kappa;
            width * (2.0 * std::f64::consts::PI).sqrt() * (-0.5 * s * s).exp()
        }
        KernelShape::Exponential { rate } => 2.0 * rate / (rate * rate + kappa * kappa),
        KernelShape::Whitham => whitham_symbol(kappa),
        KernelShape::Tabulated(t) => t.eval(kappa)?,
    })
}

/// Evaluates `K(x)`, in closed form where one exists and otherwise through the
/// inverse transform.
pub fn kernel_eval(pv: &PhaseVelocity, x: f64) -> Result<f64, KernelError> {
    match &pv.shape {
        KernelShape::Gaussian { width } => Ok((-x * x / (2.0 * width * width)).exp()),
        KernelShape::Exponential { rate } => Ok((-rate * x.abs()).exp()),
        KernelShape::Whitham if x == 0.0 => Err(KernelError::Singular),
        KernelShape::Whitham => Err(KernelError::Unsupported),
        KernelShape::Tabulated(_) => kernel_eval_quadrature(pv, x),
    }
}

/// Largest wavenumber kept by the inverse transform.
fn transform_cutoff(pv: &PhaseVelocity) -> Result<f64, KernelError> {
    match &pv.shape {
        KernelShape::Gaussian { width } => {
            let peak = width * (2.0 * std::f64::consts::PI).sqrt();
            Ok((2.0 * (peak / SYMBOL_TAIL).ln()).max(0.0).sqrt() / width)
        }
        KernelShape::Exponential { rate } => Ok((2.0 * rate / SYMBOL_TAIL - rate * rate).sqrt()),
        KernelShape::Whitham => Err(KernelError::Unsupported),
        KernelShape::Tabulated(t) => {
            let (_, hi) = t.range();
            let peak = t.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let last = t.values[t.values.len() - 1].abs();
            // The table must have decayed by its last sample, otherwise the
            // truncated tail dominates the error.
            if last > 1e-8 * peak.max(1.0) {
                return Err(KernelError::Accuracy { achieved: last });
            }
            Ok(hi)
        }
    }
}

/// `K(x) = (1/π) ∫₀^Κ c(κ) cos(κx) dκ` by panelled adaptive quadrature, where
/// `Κ` is chosen so the symbol has decayed below [`SYMBOL_TAIL`].
pub fn kernel_eval_quadrature(pv: &PhaseVelocity, x: f64) -> Result<f64, KernelError> {
    if matches!(pv.shape, KernelShape::Whitham) {
        return Err(if x == 0.0 {
            KernelError::Singular
        } else {
            KernelError::Unsupported
        });
    }
    let cutoff = transform_cutoff(pv)?;
    let lower = match &pv.shape {
        KernelShape::Tabulated(t) => t.range().0,
        _ => 0.0,
    };
    let half_period = if x == 0.0 {
        f64::INFINITY
    } else {
        std::f64::consts::PI / x.abs()
    };
    let mut breakpoints = vec![lower];
    let mut width = half_period.min(0.25);
    let mut at = lower;
    while at < cutoff {
        at = (at + width).min(cutoff);
        breakpoints.push(at);
        width = (width * 1.25).min(half_period);
    }
    let integrand = |k: f64| multiplier(pv, k).unwrap_or(0.0) * (k * x).cos();
    let r = quadrature::integrate_panels(integrand, &breakpoints, 1e-12)?;
    Ok(r.value / std::f64::consts::PI)
}

/// Outcome of the sampled kernel-hypothesis checks, with the grid and
/// tolerance that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelAdmissibility {
    /// `None` when the kernel is not bounded at the origin.
    pub k_at_zero: Option<f64>,
    pub bounded: bool,
    pub integrable: bool,
    pub symmetric: bool,
    pub monotone_decreasing_on_right: bool,
    pub probe_grid: Vec<f64>,
    pub tolerance: f64,
}

impl KernelAdmissibility {
    pub fn all_hold(&self) -> bool {
        self.bounded && self.integrable && self.symmetric && self.monotone_decreasing_on_right
    }
}

pub const ADMISSIBILITY_TOLERANCE: f64 = 1e-9;

/// Samples `K` on `probe_grid` (and its mirror image) to test boundedness,
/// symmetry, monotonicity on `[0, ∞)` and integrability via a tail-decay fit.
/// A check that cannot be carried out is reported as failed.
pub fn check_admissibility(pv: &PhaseVelocity, probe_grid: &[f64]) -> Result<KernelAdmissibility, KernelError> {
    if probe_grid.is_empty() {
        return Err(KernelError::InvalidProbeGrid("empty".into()));
    }
    if probe_grid.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(KernelError::InvalidProbeGrid(
            "points must be finite and nonnegative".into(),
        ));
    }
    if probe_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(KernelError::InvalidProbeGrid("points must be sorted".into()));
    }
    let tol = ADMISSIBILITY_TOLERANCE;
    let k_at_zero = kernel_eval(pv, 0.0).ok().filter(|v| v.is_finite());
    let bounded = k_at_zero.is_some();

    let right: Option<Vec<f64>> = probe_grid.iter().map(|&x| kernel_eval(pv, x).ok()).collect();
    let left: Option<Vec<f64>> = probe_grid.iter().map(|&x| kernel_eval(pv, -x).ok()).collect();

    let symmetric = match (&right, &left) {
        (Some(r), Some(l)) => r.iter().zip(l).all(|(a, b)| (a - b).abs() <= tol * a.abs().max(1.0)),
        // Pointwise values unavailable: fall back to evenness of the symbol.
        _ => probe_grid
            .iter()
            .all(|&k| match (multiplier(pv, k), multiplier(pv, -k)) {
                (Ok(a), Ok(b)) => (a - b).abs() <= tol * a.abs().max(1.0),
                _ => false,
            }),
    };

    let (monotone, integrable) = match &right {
        Some(r) if bounded => {
            let monotone = r.windows(2).all(|w| w[1] <= w[0] + tol);
            let pairs: Vec<(f64, f64)> = probe_grid.iter().copied().zip(r.iter().copied()).collect();
            (monotone, tail_decays(&pairs, k_at_zero.unwrap_or(1.0)))
        }
        _ => (false, false),
    };

    Ok(KernelAdmissibility {
        k_at_zero,
        bounded,
        integrable,
        symmetric,
        monotone_decreasing_on_right: monotone,
        probe_grid: probe_grid.to_vec(),
        tolerance: tol,
    })
}

/// Integrability from the upper half of the probe grid: either the tail is
/// already negligible, or `ln|K|` decays linearly in `x`, or faster than `x^{-1}`.
fn tail_decays(samples: &[(f64, f64)], scale: f64) -> bool {
    let tail: Vec<(f64, f64)> = samples[samples.len() / 2..]
        .iter()
        .copied()
        .filter(|&(x, _)| x > 0.0)
        .collect();
    if tail.len() < 2 {
        return false;
    }
    if tail.iter().all(|&(_, k)| k.abs() <= SYMBOL_TAIL * scale.abs().max(1.0)) {
        return true;
    }
    let logs: Vec<(f64, f64)> = tail
        .iter()
        .filter(|&&(_, k)| k.abs() > 0.0)
        .map(|&(x, k)| (x, k.abs().ln()))
        .collect();
    if logs.len() < 2 {
        return true;
    }
    let exp_slope = slope(logs.iter().map(|&(x, l)| (x, l)));
    let pow_slope = slope(logs.iter().map(|&(x, l)| (x.ln(), l)));
    exp_slope < -ADMISSIBILITY_TOLERANCE || pow_slope < -1.0
}

fn slope(points: impl Iterator<Item = (f64, f64)> + Clone) -> f64 {
    let n = points.clone().count() as f64;
    let (sx, sy) = points.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.fold((0.0, 0.0), |(num, den), (x, y)| {
        (num + (x - mx) * (y - my), den + (x - mx) * (x - mx))
    });
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_grid() -> Vec<f64> {
        (0..=20).map(|i| i as f64 * 0.5).collect()
    }

    #[test]
    fn whitham_symbol_values() {
        let w = PhaseVelocity::whitham();
        assert_eq!(multiplier(&w, 0.0).unwrap(), 1.0);
        // sqrt(tanh 2 / 2) = 0.694270..., evaluated independently at high precision.
        assert!((multiplier(&w, 2.0).unwrap() - 0.694_272_129_671_001_9).abs() < 1e-14);
        // Series branch joins the direct formula continuously.
        let below = multiplier(&w, 0.999_999e-3).unwrap();
        let above = multiplier(&w, 1.000_001e-3).unwrap();
        assert!((below - above).abs() < 1e-12);
    }

    #[test]
    fn exponential_symbol_at_origin_is_kernel_mass() {
        let e = PhaseVelocity::exponential(1.0).unwrap();
        assert_eq!(multiplier(&e, 0.0).unwrap(), 2.0);
        let mass = quadrature::integrate(|x: f64| (-x.abs()).exp(), -60.0, 60.0, 1e-13).unwrap();
        assert!((mass.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn closed_forms() {
        let g = PhaseVelocity::gaussian(1.0).unwrap();
        assert_eq!(kernel_eval(&g, 0.0).unwrap(), 1.0);
        assert_eq!(kernel_eval(&g, -2.0).unwrap(), kernel_eval(&g, 2.0).unwrap());
        let e = PhaseVelocity::exponential(1.0).unwrap();
        assert!((kernel_eval(&e, 0.5).unwrap() - 0.606_530_659_712_633_4).abs() < 1e-15);
    }

    #[test]
    fn exponential_quadrature_cross_check() {
        let e = PhaseVelocity::exponential(1.0).unwrap();
        let q = kernel_eval_quadrature(&e, 0.5).unwrap();
        assert!((q - (-0.5f64).exp()).abs() < 1e-6, "{q}");
    }

    #[test]
    fn whitham_is_refused_pointwise() {
        let w = PhaseVelocity::whitham();
        assert!(matches!(kernel_eval(&w, 0.0), Err(KernelError::Singular)));
        assert!(matches!(kernel_eval(&w, 1.0), Err(KernelError::Unsupported)));
    }

    #[test]
    fn admissibility_flags() {
        let g = check_admissibility(&PhaseVelocity::gaussian(1.0).unwrap(), &half_grid()).unwrap();
        assert!(g.all_hold());
        assert_eq!(g.k_at_zero, Some(1.0));

        let w = check_admissibility(&PhaseVelocity::whitham(), &half_grid()).unwrap();
        assert!(!w.bounded);
        assert_eq!(w.k_at_zero, None);

        let e = check_admissibility(&PhaseVelocity::exponential(1.0).unwrap(), &half_grid()).unwrap();
        assert!(e.symmetric && e.integrable && e.monotone_decreasing_on_right);
        assert_eq!(e.k_at_zero, Some(1.0));
    }

    #[test]
    fn probe_grid_must_be_sorted() {
        let g = PhaseVelocity::gaussian(1.0).unwrap();
        assert!(check_admissibility(&g, &[]).is_err());
        assert!(check_admissibility(&g, &[1.0, 0.5]).is_err());
        assert!(check_admissibility(&g, &[-1.0]).is_err());
    }

    #[test]
    fn parse_kernel_strings() {
        assert_eq!(
            PhaseVelocity::parse("gaussian:1").unwrap(),
            PhaseVelocity::gaussian(1.0).unwrap()
        );
        assert_eq!(
            "exponential:2.5".parse::<PhaseVelocity>().unwrap(),
            PhaseVelocity::exponential(2.5).unwrap()
        );
        assert_eq!(PhaseVelocity::parse("whitham").unwrap(), PhaseVelocity::whitham());
        assert!(PhaseVelocity::parse("gaussian:-1").is_err());
        assert!(PhaseVelocity::parse("lorentz:1").is_err());
        assert!(PhaseVelocity::parse("gaussian").is_err());
    }

    #[test]
    fn tabulated_symbol_from_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sym.csv");
        let mut body = String::from("kappa,c\n");
        for i in 0..=800 {
            let k = i as f64 * 0.025;
            body.push_str(&format!("{k},{}\n", 2.0 / (1.0 + k * k) * (-k * k / 8.0).exp()));
        }
        std::fs::write(&path, body).unwrap();
        let pv = PhaseVelocity::parse(&format!("tabulated:{}", path.display())).unwrap();
        assert!((multiplier(&pv, -0.0125).unwrap() - multiplier(&pv, 0.0125).unwrap()).abs() == 0.0);
        assert!(matches!(multiplier(&pv, 21.0), Err(KernelError::OutOfRange { .. })));
        let k0 = kernel_eval(&pv, 0.0).unwrap();
        assert!(k0 > 0.0 && k0 < 1.0);
    }

    #[test]
    fn table_rejects_unsorted() {
        assert!(TabulatedSymbol::new(vec![(0.0, 1.0), (0.0, 0.5)]).is_err());
        assert!(TabulatedSymbol::new(vec![(-1.0, 1.0), (0.0, 0.5)]).is_err());
    }
}
