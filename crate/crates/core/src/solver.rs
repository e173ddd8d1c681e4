//! Pseudospectral integration of
//!
//! ```text
//! u_t + u u_x + K ∗ u_x = 0
//! ```
//!
//! on a periodic domain, with tracking of `m1 = inf u_x`, `m2 = sup u_x` and
//! their locations.
//!
//! In Fourier space `û' = -iκ c(κ) û - ½ iκ (u²)^`. The dispersive term is
//! advanced exactly by the integrating factor `exp(-iκ c(κ) τ)` and the
//! nonlinear flux by classical RK4 on the transformed variable (Lawson's
//! scheme). The state always lives in the retained (dealiased) band, so the
//! quadratic product is alias-free under the 2/3 rule.
//!
//! Breaking is detected, not resolved: a run stops with [`Verdict::BrokeAt`]
//! once `m1` falls below `-M·max(|m1(0)|, 2)` while the spectral tail is still
//! small, and with [`Verdict::ResolutionLost`] if the tail fills first.

use num_complex::Complex64;
use thiserror::Error;

use crate::fourier::{refined_extrema, PeriodicGrid};
use crate::initial_data::InitialCondition;
use crate::kernels::{self, KernelError, PhaseVelocity};
use crate::theory::SlopePair;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

/// Which terms of the equation are active. Disabling one is only meant for
/// verification runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dynamics {
    pub nonlinear: bool,
    pub dispersive: bool,
}

impl Dynamics {
    pub const FULL: Dynamics = Dynamics {
        nonlinear: true,
        dispersive: true,
    };
    pub const LINEAR: Dynamics = Dynamics {
        nonlinear: false,
        dispersive: true,
    };
    pub const INVISCID_BURGERS: Dynamics = Dynamics {
        nonlinear: true,
        dispersive: false,
    };
}

impl Default for Dynamics {
    fn default() -> Self {
        Self::FULL
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub cfl: f64,
    pub dealias_fraction: f64,
    /// `M` in the breaking threshold `-M·max(|m1(0)|, 2)`.
    pub blowup_slope_factor: f64,
    /// Largest tolerated fraction of spectral energy in the top eighth of the
    /// retained band.
    pub tail_energy_limit: f64,
    pub max_time: f64,
    pub output_stride: usize,
    pub dynamics: Dynamics,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.3,
            dealias_fraction: 2.0 / 3.0,
            blowup_slope_factor: 50.0,
            tail_energy_limit: 1e-4,
            max_time: 1.0,
            output_stride: 1,
            dynamics: Dynamics::FULL,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: String| Err(SolverError::Config(msg));
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad(format!("cfl {} must lie in (0, 1]", self.cfl));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return bad(format!("dealias fraction {} must lie in (0, 1]", self.dealias_fraction));
        }
        if !(self.blowup_slope_factor.is_finite() && self.blowup_slope_factor > 0.0) {
            return bad(format!("blowup factor {} must be positive", self.blowup_slope_factor));
        }
        if self.tail_energy_limit.is_nan() || self.tail_energy_limit < 0.0 {
            return bad(format!(
                "tail energy limit {} must be nonnegative",
                self.tail_energy_limit
            ));
        }
        if !(self.max_time.is_finite() && self.max_time > 0.0) {
            return bad(format!("horizon {} must be positive", self.max_time));
        }
        if self.output_stride == 0 {
            return bad("output stride must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremaSample {
    pub t: f64,
    pub m1: f64,
    pub m2: f64,
    pub xi1: f64,
    pub xi2: f64,
    /// Step size in effect at this sample (the upcoming step at `t = 0`).
    pub dt_used: f64,
    pub tail_ratio: f64,
}

impl ExtremaSample {
    pub fn slopes(&self) -> SlopePair {
        SlopePair::new(self.m1, self.m2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    BrokeAt(f64),
    ResolvedToHorizon,
    ResolutionLost(f64),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::BrokeAt(_) => "BrokeAt",
            Verdict::ResolvedToHorizon => "ResolvedToHorizon",
            Verdict::ResolutionLost(_) => "ResolutionLost",
        }
    }

    pub fn time(&self) -> Option<f64> {
        match *self {
            Verdict::BrokeAt(t) | Verdict::ResolutionLost(t) => Some(t),
            Verdict::ResolvedToHorizon => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub series: Vec<ExtremaSample>,
    pub verdict: Verdict,
    pub config: SolverConfig,
    pub kernel: PhaseVelocity,
    pub grid_points: usize,
    pub domain_length: f64,
}

impl SimReport {
    pub fn initial(&self) -> SlopePair {
        self.series.first().map(|s| s.slopes()).unwrap_or_default()
    }

    pub fn break_time(&self) -> Option<f64> {
        match self.verdict {
            Verdict::BrokeAt(t) => Some(t),
            _ => None,
        }
    }

    pub fn blowup_threshold(&self) -> f64 {
        blowup_threshold(self.config.blowup_slope_factor, self.initial().m1)
    }
}

pub fn blowup_threshold(factor: f64, m1_initial: f64) -> f64 {
    -factor * m1_initial.abs().max(2.0)
}

/// Fourier-space operators for one grid and kernel.
pub struct SpectralModel {
    grid: PeriodicGrid,
    /// `κ c(κ)` per FFT slot; zero outside the retained band.
    frequency: Vec<f64>,
    retained: Vec<bool>,
    tail: Vec<bool>,
    dynamics: Dynamics,
    scratch: Vec<Complex64>,
}

impl SpectralModel {
    pub fn new(
        grid: PeriodicGrid,
        pv: &PhaseVelocity,
        dealias_fraction: f64,
        dynamics: Dynamics,
    ) -> Result<Self, SolverError> {
        let n = grid.len();
        let cutoff = (dealias_fraction * (n / 2) as f64).floor() as i64;
        if cutoff < 8 {
            return Err(SolverError::Config(format!(
                "{n} points with dealias fraction {dealias_fraction} keep only {cutoff} modes"
            )));
        }
        let tail_start = cutoff - cutoff / 8;
        let mut frequency = vec![0.0; n];
        let mut retained = vec![false; n];
        let mut tail = vec![false; n];
        for i in 0..n {
            let m = grid.mode(i).abs();
            if m > cutoff || grid.is_nyquist(i) {
                continue;
            }
            retained[i] = true;
            tail[i] = m > tail_start;
            if dynamics.dispersive {
                let k = grid.wavenumbers()[i];
                frequency[i] = k * kernels::multiplier(pv, k)?;
            }
        }
        Ok(Self {
            scratch: vec![Complex64::new(0.0, 0.0); n],
            grid,
            frequency,
            retained,
            tail,
            dynamics,
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn dynamics(&self) -> Dynamics {
        self.dynamics
    }

    /// Zeroes every mode outside the retained band.
    pub fn dealias(&self, coeffs: &mut [Complex64]) {
        for (c, &keep) in coeffs.iter_mut().zip(&self.retained) {
            if !keep {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Dealiased coefficients of real samples.
    pub fn transform(&self, samples: &[f64]) -> Vec<Complex64> {
        let mut coeffs = self.grid.forward(samples);
        self.dealias(&mut coeffs);
        coeffs
    }

    pub fn physical(&self, state: &[Complex64]) -> Vec<f64> {
        self.grid.inverse_real(state)
    }

    /// `u_x` on the grid.
    pub fn slopes(&self, state: &[Complex64]) -> Vec<f64> {
        let mut c = state.to_vec();
        self.grid.differentiate_coeffs(&mut c);
        self.grid.inverse_real(&c)
    }

    /// Energy in the top eighth of the retained band over total energy
    /// (zero for the zero state).
    pub fn tail_ratio(&self, state: &[Complex64]) -> f64 {
        let (mut top, mut total) = (0.0, 0.0);
        for (c, &t) in state.iter().zip(&self.tail) {
            let e = c.norm_sqr();
            total += e;
            if t {
                top += e;
            }
        }
        if total > 0.0 {
            top / total
        } else {
            0.0
        }
    }

    /// The flux term `-½ iκ (u²)^`, truncated to the retained band.
    pub fn nonlinear(&mut self, state: &[Complex64], out: &mut [Complex64]) -> Result<(), SolverError> {
        if !self.dynamics.nonlinear {
            out.fill(Complex64::new(0.0, 0.0));
            return Ok(());
        }
        self.scratch.copy_from_slice(state);
        self.grid.inverse_in_place(&mut self.scratch);
        for c in self.scratch.iter_mut() {
            if !c.re.is_finite() {
                return Err(SolverError::NonFinite { t: f64::NAN });
            }
            *c = Complex64::new(c.re * c.re, 0.0);
        }
        self.grid.forward_in_place(&mut self.scratch);
        let k = self.grid.wavenumbers();
        for i in 0..out.len() {
            out[i] = if self.retained[i] {
                Complex64::new(0.0, -0.5 * k[i]) * self.scratch[i]
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        Ok(())
    }

    /// Full right-hand side `-½ D(u²)^ - iκ c(κ) û`.
    pub fn rhs(&mut self, state: &[Complex64], out: &mut [Complex64]) -> Result<(), SolverError> {
        self.nonlinear(state, out)?;
        for ((o, s), w) in out.iter_mut().zip(state).zip(&self.frequency) {
            *o += Complex64::new(0.0, -w) * s;
        }
        Ok(())
    }

    fn propagator(&self, tau: f64) -> Vec<Complex64> {
        self.frequency
            .iter()
            .map(|w| Complex64::from_polar(1.0, -w * tau))
            .collect()
    }

    /// Exact solution of the dispersive part alone: `û e^{-iκc(κ)t}`.
    pub fn linear_solution(&self, initial: &[Complex64], t: f64) -> Vec<Complex64> {
        initial.iter().zip(self.propagator(t)).map(|(u, e)| u * e).collect()
    }

    /// One integrating-factor RK4 step of size `dt`; returns the new time.
    pub fn step(&mut self, state: &mut [Complex64], t: f64, dt: f64) -> Result<f64, SolverError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SolverError::Config(format!("step size {dt} must be positive")));
        }
        let half = self.propagator(0.5 * dt);
        let full = self.propagator(dt);
        if !self.dynamics.nonlinear {
            for (u, e) in state.iter_mut().zip(&full) {
                *u *= e;
            }
            return Ok(t + dt);
        }
        let n = state.len();
        let zero = Complex64::new(0.0, 0.0);
        let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
        let mut stage = vec![zero; n];
        let h = dt;
        let tag = |e: SolverError| match e {
            SolverError::NonFinite { .. } => SolverError::NonFinite { t },
            other => other,
        };

        self.nonlinear(state, &mut k1).map_err(tag)?;
        for i in 0..n {
            stage[i] = half[i] * (state[i] + 0.5 * h * k1[i]);
        }
        self.nonlinear(&stage, &mut k2).map_err(tag)?;
        for i in 0..n {
            stage[i] = half[i] * state[i] + 0.5 * h * k2[i];
        }
        self.nonlinear(&stage, &mut k3).map_err(tag)?;
        for i in 0..n {
            stage[i] = full[i] * state[i] + h * half[i] * k3[i];
        }
        self.nonlinear(&stage, &mut k4).map_err(tag)?;
        for i in 0..n {
            state[i] = full[i] * state[i] + (h / 6.0) * (full[i] * k1[i] + 2.0 * half[i] * (k2[i] + k3[i]) + k4[i]);
            if !(state[i].re.is_finite() && state[i].im.is_finite()) {
                return Err(SolverError::NonFinite { t: t + dt });
            }
        }
        Ok(t + dt)
    }
}

/// A running simulation: model, dealiased state and clock.
pub struct Simulation {
    model: SpectralModel,
    state: Vec<Complex64>,
    t: f64,
    cfl: f64,
}

impl Simulation {
    pub fn new(ic: &InitialCondition, pv: &PhaseVelocity, cfg: &SolverConfig) -> Result<Self, SolverError> {
        cfg.validate()?;
        let model = SpectralModel::new(ic.grid(), pv, cfg.dealias_fraction, cfg.dynamics)?;
        let state = model.transform(ic.samples());
        Ok(Self {
            model,
            state,
            t: 0.0,
            cfl: cfg.cfl,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &[Complex64] {
        &self.state
    }

    pub fn model(&self) -> &SpectralModel {
        &self.model
    }

    /// `cfl · Δx / max(1, max|u|)`.
    pub fn stable_dt(&self) -> f64 {
        let umax = self
            .model
            .physical(&self.state)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        self.cfl * self.model.grid.spacing() / umax.max(1.0)
    }

    pub fn advance(&mut self, dt: f64) -> Result<(), SolverError> {
        self.t = self.model.step(&mut self.state, self.t, dt)?;
        Ok(())
    }

    pub fn sample(&self, dt_used: f64) -> ExtremaSample {
        let slopes = self.model.slopes(&self.state);
        let (lo, hi) = refined_extrema(&slopes, &self.model.grid);
        ExtremaSample {
            t: self.t,
            m1: lo.value,
            m2: hi.value,
            xi1: lo.position,
            xi2: hi.position,
            dt_used,
            tail_ratio: self.model.tail_ratio(&self.state),
        }
    }
}

/// Integrates to the horizon or until breaking is detected or resolution is lost.
pub fn run(ic: &InitialCondition, pv: &PhaseVelocity, cfg: &SolverConfig) -> Result<SimReport, SolverError> {
    let mut sim = Simulation::new(ic, pv, cfg)?;
    let mut dt = sim.stable_dt();
    let first = sim.sample(dt);
    let threshold = blowup_threshold(cfg.blowup_slope_factor, first.m1);
    let judge = |s: &ExtremaSample| -> Option<Verdict> {
        if s.tail_ratio > cfg.tail_energy_limit {
            Some(Verdict::ResolutionLost(s.t))
        } else if s.m1 <= threshold {
            Some(Verdict::BrokeAt(s.t))
        } else {
            None
        }
    };
    let mut verdict = judge(&first);
    let mut series = vec![first];
    let mut steps = 0usize;
    while verdict.is_none() {
        let remaining = cfg.max_time - sim.time();
        if remaining <= 1e-14 * cfg.max_time {
            verdict = Some(Verdict::ResolvedToHorizon);
            break;
        }
        dt = sim.stable_dt().min(remaining);
        let last = remaining - dt <= 1e-14 * cfg.max_time;
        match sim.advance(dt) {
            Ok(()) => {}
            Err(SolverError::NonFinite { .. }) => {
                verdict = Some(Verdict::ResolutionLost(sim.time()));
                break;
            }
            Err(e) => return Err(e),
        }
        if last {
            sim.t = cfg.max_time;
        }
        steps += 1;
        if steps.is_multiple_of(cfg.output_stride) || last {
            let s = sim.sample(dt);
            verdict = judge(&s);
            series.push(s);
            if last && verdict.is_none() {
                verdict = Some(Verdict::ResolvedToHorizon);
            }
        }
    }
    Ok(SimReport {
        series,
        verdict: verdict.unwrap_or(Verdict::ResolvedToHorizon),
        config: *cfg,
        kernel: pv.clone(),
        grid_points: ic.len(),
        domain_length: ic.length(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cosine_state(model: &SpectralModel, l: f64) -> Vec<Complex64> {
        let u: Vec<f64> = model.grid().points().iter().map(|x| (2.0 * PI * x / l).cos()).collect();
        model.transform(&u)
    }

    #[test]
    fn zero_state_is_fixed() {
        let grid = PeriodicGrid::new(256, 40.0);
        let pv = PhaseVelocity::gaussian(1.0).unwrap();
        let mut model = SpectralModel::new(grid, &pv, 2.0 / 3.0, Dynamics::FULL).unwrap();
        let mut state = vec![Complex64::new(0.0, 0.0); 256];
        let mut out = state.clone();
        model.rhs(&state, &mut out).unwrap();
        assert!(out.iter().all(|c| c.norm() == 0.0));
        model.step(&mut state, 0.0, 0.37).unwrap();
        assert!(state.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn burgers_flux_of_cosine() {
        // -½ ∂x cos²(kx) = (k/2) sin(2kx) with k = 2π/L.
        let l = 40.0;
        let grid = PeriodicGrid::new(256, l);
        let pv = PhaseVelocity::gaussian(1.0).unwrap();
        let mut model = SpectralModel::new(grid, &pv, 2.0 / 3.0, Dynamics::INVISCID_BURGERS).unwrap();
        let state = cosine_state(&model, l);
        let mut out = state.clone();
        model.rhs(&state, &mut out).unwrap();
        let r = model.physical(&out);
        for (x, v) in model.grid().points().iter().zip(&r) {
            assert!((v - PI / l * (4.0 * PI * x / l).sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn linear_step_is_exact_phase_shift() {
        let l = 40.0;
        let grid = PeriodicGrid::new(256, l);
        let pv = PhaseVelocity::gaussian(1.0).unwrap();
        let mut model = SpectralModel::new(grid, &pv, 2.0 / 3.0, Dynamics::LINEAR).unwrap();
        let initial = cosine_state(&model, l);
        let mut state = initial.clone();
        model.step(&mut state, 0.0, 2.5).unwrap();
        // A single cosine mode travels at c(2π/L).
        let k = 2.0 * PI / l;
        let speed = kernels::multiplier(&pv, k).unwrap();
        let u = model.physical(&state);
        for (x, v) in model.grid().points().iter().zip(&u) {
            assert!((v - (k * (x - speed * 2.5)).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolverConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.cfl = 1.5;
        assert!(cfg.validate().is_err());
        cfg = SolverConfig {
            dealias_fraction: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg = SolverConfig {
            output_stride: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rejects_nonpositive_step() {
        let grid = PeriodicGrid::new(256, 40.0);
        let pv = PhaseVelocity::gaussian(1.0).unwrap();
        let mut model = SpectralModel::new(grid, &pv, 2.0 / 3.0, Dynamics::FULL).unwrap();
        let mut state = vec![Complex64::new(0.0, 0.0); 256];
        assert!(model.step(&mut state, 0.0, 0.0).is_err());
    }

    #[test]
    fn zero_data_resolves_to_horizon() {
        let ic = InitialCondition::from_samples(40.0, vec![0.0; 256]).unwrap();
        let cfg = SolverConfig {
            max_time: 0.5,
            output_stride: 10,
            ..Default::default()
        };
        let report = run(&ic, &PhaseVelocity::gaussian(1.0).unwrap(), &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::ResolvedToHorizon);
        assert!(report.series.iter().all(|s| s.m1 == 0.0 && s.m2 == 0.0));
        assert_eq!(report.series.last().unwrap().t, 0.5);
    }
}
