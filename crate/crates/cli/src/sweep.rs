//! Parameter sweeps over initial slope pairs.

use std::io::{Read, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wavebreak::ode::{self, OdeError};
use wavebreak::report::{fmt_opt, parse_opt};
use wavebreak::theory::{self, assess};
use wavebreak::{batch, build_profile, run, PhaseVelocity, SlopePair, SolverConfig};

use crate::error::CliError;

pub const SWEEP_HEADER: [&str; 8] = ["m1", "m2", "label", "t_star", "T_star", "t_break", "margin", "verdict"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self, CliError> {
        if count == 0 {
            return Err(CliError::usage("sweep counts must be at least 1"));
        }
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(CliError::usage(format!("sweep range [{lo}, {hi}] is not ordered")));
        }
        Ok(Self { lo, hi, count })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        (0..self.count)
            .map(|i| {
                if i == self.count - 1 {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / (self.count - 1) as f64
                }
            })
            .collect()
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.lo + (self.hi - self.lo) * rng.random::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum M2Mode {
    Absolute(Axis),
    /// `m2 = fraction · (m1² + m1)`.
    FractionOfParabola(Axis),
}

impl M2Mode {
    fn axis(&self) -> &Axis {
        match self {
            M2Mode::Absolute(a) | M2Mode::FractionOfParabola(a) => a,
        }
    }

    fn m2(&self, m1: f64, v: f64) -> f64 {
        match self {
            M2Mode::Absolute(_) => v,
            M2Mode::FractionOfParabola(_) => v * (m1 * m1 + m1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Pde,
    Ode,
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pde" => Ok(Backend::Pde),
            "ode" => Ok(Backend::Ode),
            other => Err(format!("unknown backend `{other}` (expected pde or ode)")),
        }
    }
}

/// Profile geometry for the PDE backend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub length: f64,
    pub width: f64,
    pub points: usize,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub m1: Axis,
    pub m2: M2Mode,
    pub kernel: PhaseVelocity,
    pub solver: SolverConfig,
    pub geometry: Geometry,
    pub backend: Backend,
    /// Horizon for the ODE backend; `None` means `T* + 1` inside the region
    /// and [`ODE_FALLBACK_HORIZON`] elsewhere.
    pub ode_horizon: Option<f64>,
    /// Random sampling of the box instead of the grid: `(count, seed)`.
    pub sampled: Option<(usize, u64)>,
}

pub const ODE_FALLBACK_HORIZON: f64 = 10.0;

impl SweepSpec {
    /// Initial points: `m1` outer, `m2` inner for grids; draw order for samples.
    pub fn points(&self) -> Vec<SlopePair> {
        match self.sampled {
            None => {
                let inner = self.m2.axis().values();
                self.m1
                    .values()
                    .into_iter()
                    .flat_map(|m1| inner.iter().map(move |&v| SlopePair::new(m1, self.m2.m2(m1, v))))
                    .collect()
            }
            Some((count, seed)) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count)
                    .map(|_| {
                        let m1 = self.m1.draw(&mut rng);
                        let v = self.m2.axis().draw(&mut rng);
                        SlopePair::new(m1, self.m2.m2(m1, v))
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p0: SlopePair,
    pub label: String,
    pub t_star: Option<f64>,
    pub breaking_bound: Option<f64>,
    pub t_break: Option<f64>,
    pub margin: Option<f64>,
    pub verdict: String,
}

impl SweepRow {
    /// The sweep's headline check: no observed breaking after `T*` for points
    /// in the region.
    pub fn violates_bound(&self) -> bool {
        self.margin.is_some_and(|m| m < 0.0)
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Vec<SweepRow> {
    let k0 = spec.kernel.k_at_zero();
    batch::map(&spec.points(), |p| row(spec, k0, *p))
}

fn row(spec: &SweepSpec, k0: Option<f64>, p0: SlopePair) -> SweepRow {
    let assessment = k0.and_then(|k| assess(p0, k).ok());
    let label = assessment
        .as_ref()
        .map_or_else(|| "NA".to_string(), |a| a.label.to_string());
    let deadline = assessment.as_ref().and_then(|a| a.deadline);
    let t_star = assessment
        .as_ref()
        .and_then(|a| a.bounds.map(|b| theory::to_physical_time(b.t_star, a.k0)));
    let (verdict, t_break) = match spec.backend {
        Backend::Pde => pde_row(spec, p0),
        Backend::Ode => ode_row(spec, k0, p0, assessment.as_ref().and_then(|a| a.bounds)),
    };
    let margin = match (deadline, t_break, verdict.as_str()) {
        (Some(bound), Some(t), "BrokeAt" | "Blowup") => Some(bound - t),
        _ => None,
    };
    SweepRow {
        p0,
        label,
        t_star,
        breaking_bound: deadline,
        t_break,
        margin,
        verdict,
    }
}

fn pde_row(spec: &SweepSpec, p0: SlopePair) -> (String, Option<f64>) {
    let g = spec.geometry;
    let ic = match build_profile(p0.m1, p0.m2, g.length, g.width, g.points) {
        Ok(ic) => ic,
        Err(_) => return ("InvalidProfile".to_string(), None),
    };
    match run(&ic, &spec.kernel, &spec.solver) {
        Ok(report) => (report.verdict.name().to_string(), report.break_time()),
        Err(_) => ("SolverError".to_string(), None),
    }
}

fn ode_row(
    spec: &SweepSpec,
    k0: Option<f64>,
    p0: SlopePair,
    bounds: Option<theory::BoundsReport>,
) -> (String, Option<f64>) {
    let Some(k0) = k0 else {
        return ("NoKernelScale".to_string(), None);
    };
    let start = theory::normalize(p0, k0);
    let horizon = spec
        .ode_horizon
        .map(|h| h * k0)
        .unwrap_or_else(|| bounds.map_or(ODE_FALLBACK_HORIZON, |b| b.breaking_bound + 1.0));
    match ode::integrate(start, horizon) {
        Ok(traj) => match traj.events.blowup {
            Some(t) => ("Blowup".to_string(), Some(theory::to_physical_time(t, k0))),
            None => ("NoBlowup".to_string(), None),
        },
        Err(OdeError::StepUnderflow { .. }) => ("StepUnderflow".to_string(), None),
        Err(_) => ("IntegrationError".to_string(), None),
    }
}

pub fn write_rows<W: Write>(rows: &[SweepRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.p0.m1.to_string(),
            r.p0.m2.to_string(),
            r.label.clone(),
            fmt_opt(r.t_star),
            fmt_opt(r.breaking_bound),
            fmt_opt(r.t_break),
            fmt_opt(r.margin),
            r.verdict.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<SweepRow>, String> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| e.to_string())?.clone();
    if header.iter().ne(SWEEP_HEADER) {
        return Err(format!(
            "unexpected header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        ));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        if rec.len() != SWEEP_HEADER.len() {
            return Err(format!("row has {} fields", rec.len()));
        }
        let num =
            |i: usize| -> Result<f64, String> { rec[i].parse().map_err(|_| format!("not a number: `{}`", &rec[i])) };
        rows.push(SweepRow {
            p0: SlopePair::new(num(0)?, num(1)?),
            label: rec[2].to_string(),
            t_star: parse_opt(&rec[3])?,
            breaking_bound: parse_opt(&rec[4])?,
            t_break: parse_opt(&rec[5])?,
            margin: parse_opt(&rec[6])?,
            verdict: rec[7].to_string(),
        });
    }
    Ok(rows)
}
