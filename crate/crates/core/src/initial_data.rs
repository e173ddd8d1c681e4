//! Smooth periodic initial profiles with prescribed gradient extrema.
//!
//! The derivative is built from two compactly supported bumps
//! `B(s) = exp(1 - 1/(1 - s²))` on `|s| < 1` (so `B(0) = 1`), centred at
//! `L/4` and `3L/4`:
//!
//! ```text
//! u0'(x) = (a - c) B((x - L/4)/w) + (b - c) B((x - 3L/4)/w) + c
//! ```
//!
//! where the constant `c = -(a + b) I / (L - 2I)`, `I = w ∫B`, makes the mean
//! zero. When `a <= c <= b` the extrema of `u0'` are exactly `a` and `b`.
//! The profile itself is the spectral antiderivative pinned to `u0(0) = 0`.

use std::io::{BufRead, BufReader, Read, Write};
use std::sync::OnceLock;

use thiserror::Error;

use crate::fourier::{refined_extrema, Extremum, PeriodicGrid};
use crate::quadrature;
use crate::theory::SlopePair;

pub const MIN_POINTS: usize = 256;

#[derive(Debug, Error)]
pub enum InitialDataError {
    #[error("slopes must satisfy a < 0 <= b, got a = {a}, b = {b}")]
    Domain { a: f64, b: f64 },
    #[error(
        "mean correction c = {c} falls outside [{a}, {b}]; the extrema would not be (a, b). \
         Use a smaller bump width"
    )]
    Geometry { c: f64, a: f64, b: f64 },
    #[error("invalid geometry: {0}")]
    Parameters(String),
    #[error("grid size {0} must be a power of two and at least {MIN_POINTS}")]
    GridSize(usize),
    #[error("malformed profile file: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The smooth bump `exp(1 - 1/(1 - s²))` on `|s| < 1`, zero outside.
pub fn bump(s: f64) -> f64 {
    let q = 1.0 - s * s;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

/// `∫_{-1}^{1} B(s) ds`.
pub fn bump_integral() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| {
        quadrature::integrate(bump, -1.0, 1.0, 1e-15)
            .expect("bump integral converges")
            .value
    })
}

/// Parameters of the two-bump construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpProfile {
    pub min_slope: f64,
    pub max_slope: f64,
    pub width: f64,
    pub offset: f64,
}

impl BumpProfile {
    /// Closed-form `u0'(x)` on a domain of length `length`.
    pub fn slope_at(&self, x: f64, length: f64) -> f64 {
        let (x1, x2) = (0.25 * length, 0.75 * length);
        (self.min_slope - self.offset) * bump((x - x1) / self.width)
            + (self.max_slope - self.offset) * bump((x - x2) / self.width)
            + self.offset
    }
}

/// Mean-zero correction `c = -(a + b) I / (L - 2I)`, where `I` is the bump
/// mass summed on the `n`-point grid so that the sampled `u0'` has zero mean
/// to rounding.
pub fn mean_correction(a: f64, b: f64, length: f64, width: f64, n: usize) -> f64 {
    let dx = length / n as f64;
    let center = 0.25 * length;
    let mass = dx * (0..n).map(|j| bump((j as f64 * dx - center) / width)).sum::<f64>();
    -(a + b) * mass / (length - 2.0 * mass)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    length: f64,
    samples: Vec<f64>,
    profile: Option<BumpProfile>,
}

impl InitialCondition {
    /// Arbitrary periodic samples on `x_j = j L / N`.
    pub fn from_samples(length: f64, samples: Vec<f64>) -> Result<Self, InitialDataError> {
        check_grid(samples.len())?;
        if !(length.is_finite() && length > 0.0) {
            return Err(InitialDataError::Parameters(format!("domain length {length}")));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(InitialDataError::Parameters("non-finite sample".into()));
        }
        Ok(Self {
            length,
            samples,
            profile: None,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn profile(&self) -> Option<&BumpProfile> {
        self.profile.as_ref()
    }

    pub fn grid(&self) -> PeriodicGrid {
        PeriodicGrid::new(self.samples.len(), self.length)
    }

    /// Spectral derivative of the samples.
    pub fn slope_samples(&self) -> Vec<f64> {
        self.grid().derivative(&self.samples)
    }

    /// Writes `x,u0` rows preceded by `#` metadata lines.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), InitialDataError> {
        writeln!(out, "# L={}", self.length)?;
        writeln!(out, "# n={}", self.samples.len())?;
        if let Some(p) = &self.profile {
            writeln!(out, "# a={}", p.min_slope)?;
            writeln!(out, "# b={}", p.max_slope)?;
            writeln!(out, "# w={}", p.width)?;
        }
        writeln!(out, "x,u0")?;
        let dx = self.length / self.samples.len() as f64;
        for (j, v) in self.samples.iter().enumerate() {
            writeln!(out, "{},{}", j as f64 * dx, v)?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, InitialDataError> {
        let mut text = String::new();
        BufReader::new(input).read_to_string(&mut text)?;
        let mut meta = std::collections::BTreeMap::new();
        for line in text.as_bytes().lines() {
            let line = line?;
            let Some(rest) = line.trim().strip_prefix('#') else {
                continue;
            };
            if let Some((k, v)) = rest.split_once('=') {
                let value: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| InitialDataError::Format(format!("metadata `{}`", line.trim())))?;
                meta.insert(k.trim().to_string(), value);
            }
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["x", "u0"] {
            return Err(InitialDataError::Format("expected header `x,u0`".into()));
        }
        let mut samples = Vec::new();
        for record in reader.records() {
            let record = record?;
            let v: f64 = record[1]
                .parse()
                .map_err(|_| InitialDataError::Format(format!("value `{}`", &record[1])))?;
            samples.push(v);
        }
        let length = *meta
            .get("L")
            .ok_or_else(|| InitialDataError::Format("missing `# L=` line".into()))?;
        if let Some(&n) = meta.get("n") {
            if n as usize != samples.len() {
                return Err(InitialDataError::Format(format!(
                    "header says n={n} but {} rows were read",
                    samples.len()
                )));
            }
        }
        let points = samples.len();
        let mut ic = Self::from_samples(length, samples)?;
        if let (Some(&a), Some(&b), Some(&w)) = (meta.get("a"), meta.get("b"), meta.get("w")) {
            ic.profile = Some(BumpProfile {
                min_slope: a,
                max_slope: b,
                width: w,
                offset: mean_correction(a, b, length, w, points),
            });
        }
        Ok(ic)
    }
}

fn check_grid(n: usize) -> Result<(), InitialDataError> {
    if n >= MIN_POINTS && n.is_power_of_two() {
        Ok(())
    } else {
        Err(InitialDataError::GridSize(n))
    }
}

/// Builds the two-bump profile with `inf u0' = a` and `sup u0' = b`.
pub fn build_profile(a: f64, b: f64, length: f64, width: f64, n: usize) -> Result<InitialCondition, InitialDataError> {
    if !(a.is_finite() && b.is_finite()) || a >= 0.0 || b < 0.0 {
        return Err(InitialDataError::Domain { a, b });
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(InitialDataError::Parameters(format!("domain length {length}")));
    }
    if !(width.is_finite() && width > 0.0) || width > length / 8.0 {
        return Err(InitialDataError::Parameters(format!(
            "bump width {width} must lie in (0, L/8 = {}]",
            length / 8.0
        )));
    }
    check_grid(n)?;
    let c = mean_correction(a, b, length, width, n);
    if !(a <= c && c <= b) {
        return Err(InitialDataError::Geometry { c, a, b });
    }
    let profile = BumpProfile {
        min_slope: a,
        max_slope: b,
        width,
        offset: c,
    };
    let grid = PeriodicGrid::new(n, length);
    let slopes: Vec<f64> = grid.points().iter().map(|&x| profile.slope_at(x, length)).collect();
    Ok(InitialCondition {
        length,
        samples: grid.antiderivative(&slopes),
        profile: Some(profile),
    })
}

/// Refined extrema of the spectral derivative with their positions.
pub fn measured_extrema_with_positions(ic: &InitialCondition) -> (Extremum, Extremum) {
    let grid = ic.grid();
    refined_extrema(&grid.derivative(&ic.samples), &grid)
}

/// `(inf u0', sup u0')` from the spectral derivative, each refined by a
/// three-point parabola.
pub fn measured_extrema(ic: &InitialCondition) -> SlopePair {
    let (lo, hi) = measured_extrema_with_positions(ic);
    SlopePair::new(lo.value, hi.value)
}
