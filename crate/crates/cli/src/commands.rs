use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use wavebreak::initial_data::InitialDataError;
use wavebreak::ode::{self, OdeError, Trajectory};
use wavebreak::report::{self, fmt_opt, Record, SimSummary};
use wavebreak::solver::SolverError;
use wavebreak::theory::{self, assess, Assessment};
use wavebreak::{build_profile, run, InitialCondition, PhaseVelocity, SlopePair, SolverConfig, Window};

use crate::args::{PhaseArgs, PlotArgs, PlotKind, PointArgs, PortraitArgs, SimulateArgs, SolverArgs, SweepArgs};
use crate::config::Config;
use crate::error::CliError;
use crate::svg::{self, SeriesMarkers};
use crate::sweep::{self, Axis, Backend, Geometry, M2Mode, SweepSpec};

const DEFAULT_KERNEL: &str = "gaussian:1";
const DEFAULT_LENGTH: f64 = 40.0;
const DEFAULT_WIDTH: f64 = 2.0;
const DEFAULT_POINTS: usize = 4096;
const DEFAULT_SWEEP_POINTS: usize = 2048;
const DEFAULT_DENSITY: usize = 20;

pub struct Context {
    pub out: PathBuf,
    pub config: Config,
}

impl Context {
    fn output(&self, name: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out).map_err(|e| CliError::io(&self.out, e))?;
        Ok(self.out.join(name))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let mut f = create(path)?;
    f.write_all(text.as_bytes())
        .and_then(|_| f.flush())
        .map_err(|e| CliError::io(path, e))
}

fn report_err(path: &Path, e: report::ReportError) -> CliError {
    match e {
        report::ReportError::Io(source) => CliError::io(path, source),
        other => CliError::usage(format!("{}: {other}", path.display())),
    }
}

fn kernel(ctx: &Context, flag: Option<String>) -> Result<PhaseVelocity, CliError> {
    let spec = ctx.config.pick_or(flag, "kernel", DEFAULT_KERNEL.to_string())?;
    PhaseVelocity::parse(&spec).map_err(|e| CliError::usage(format!("kernel `{spec}`: {e}")))
}

fn solver_config(ctx: &Context, a: &SolverArgs) -> Result<SolverConfig, CliError> {
    let d = SolverConfig::default();
    let c = &ctx.config;
    let cfg = SolverConfig {
        cfl: c.pick_or(a.cfl, "cfl", d.cfl)?,
        dealias_fraction: c.pick_or(a.dealias, "dealias", d.dealias_fraction)?,
        blowup_slope_factor: c.pick_or(a.blowup_factor, "blowup-factor", d.blowup_slope_factor)?,
        tail_energy_limit: c.pick_or(a.tail_limit, "tail-limit", d.tail_energy_limit)?,
        max_time: c.pick_or(a.horizon, "horizon", d.max_time)?,
        output_stride: c.pick_or(a.stride, "stride", d.output_stride)?,
        dynamics: d.dynamics,
    };
    cfg.validate().map_err(CliError::usage)?;
    Ok(cfg)
}

fn profile_error(e: InitialDataError) -> CliError {
    match e {
        InitialDataError::GridSize(_) | InitialDataError::Parameters(_) => CliError::usage(e),
        other => CliError::domain(other),
    }
}

fn solver_error(e: SolverError) -> CliError {
    match e {
        SolverError::NonFinite { .. } => CliError::domain(e),
        other => CliError::usage(other),
    }
}

fn point(ctx: &Context, m1: Option<f64>, m2: Option<f64>) -> Result<SlopePair, CliError> {
    Ok(SlopePair::new(
        ctx.config.require(m1, "m1")?,
        ctx.config.require(m2, "m2")?,
    ))
}

pub fn simulate(ctx: &Context, a: SimulateArgs) -> Result<(), CliError> {
    let pv = kernel(ctx, a.solver.kernel.clone())?;
    let cfg = solver_config(ctx, &a.solver)?;
    let c = &ctx.config;
    let ic = match &a.ic {
        Some(path) => {
            InitialCondition::read_csv(open(path)?).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
        }
        None => {
            let p = point(ctx, a.m1, a.m2)?;
            let length = c.pick_or(a.solver.length, "L", DEFAULT_LENGTH)?;
            let width = c.pick_or(a.solver.width, "width", DEFAULT_WIDTH)?;
            let n = c.pick_or(a.solver.n, "n", DEFAULT_POINTS)?;
            build_profile(p.m1, p.m2, length, width, n).map_err(profile_error)?
        }
    };
    let report = run(&ic, &pv, &cfg).map_err(solver_error)?;
    let summary = SimSummary::from_report(&report);

    let path = ctx.output("initial.csv")?;
    ic.write_csv(create(&path)?)
        .map_err(|e| CliError::domain(format!("{}: {e}", path.display())))?;
    let path = ctx.output("series.csv")?;
    report::write_series_csv(&report.series, create(&path)?).map_err(|e| report_err(&path, e))?;
    let record = summary.to_record();
    write_text(&ctx.output("summary.txt")?, &record.to_string())?;
    let markers = SeriesMarkers {
        t_star: summary.t_star,
        breaking_bound: summary.breaking_bound,
        k_at_zero: summary.k_at_zero,
    };
    write_text(&ctx.output("series.svg")?, &svg::series(&report.series, markers))?;

    print!("{record}");
    if !summary.theory_applies {
        eprintln!(
            "note: kernel `{}` has no finite K(0); no breaking bound applies",
            summary.kernel
        );
    }
    Ok(())
}

fn kernel_scale(ctx: &Context, a: &PointArgs) -> Result<f64, CliError> {
    let flag = a.kernel.clone().or(ctx.config.get("kernel")?);
    if let Some(spec) = flag {
        let pv = PhaseVelocity::parse(&spec).map_err(|e| CliError::usage(format!("kernel `{spec}`: {e}")))?;
        return pv
            .k_at_zero()
            .ok_or_else(|| CliError::domain(format!("kernel `{spec}` has no finite K(0)")));
    }
    let k0 = ctx.config.pick_or(a.k0, "k0", 1.0)?;
    if !(k0.is_finite() && k0 > 0.0) {
        return Err(CliError::usage(format!("k0 must be positive, got {k0}")));
    }
    Ok(k0)
}

fn assessment(ctx: &Context, a: &PointArgs) -> Result<Assessment, CliError> {
    let p = point(ctx, a.m1, a.m2)?;
    let k0 = kernel_scale(ctx, a)?;
    assess(p, k0).map_err(CliError::domain)
}

pub fn classify(ctx: &Context, a: PointArgs) -> Result<(), CliError> {
    println!("{}", assessment(ctx, &a)?.label);
    Ok(())
}

pub fn bounds(ctx: &Context, a: PointArgs) -> Result<(), CliError> {
    let s = assessment(ctx, &a)?;
    let k0 = s.k0;
    let mut r = Record::new();
    r.push("m1", s.point.m1)
        .push("m2", s.point.m2)
        .push("k0", k0)
        .push("label", s.label)
        .push("in_omega", s.in_omega)
        .push("seliger", s.seliger);
    let Some(b) = s.bounds else {
        print!("{r}");
        return Err(CliError::domain(format!(
            "({}, {}) is outside the breaking region for K(0) = {k0}; t* and T* are undefined",
            s.point.m1, s.point.m2
        )));
    };
    // Slopes scale with K(0) and times with 1/K(0).
    r.push("t_star", theory::to_physical_time(b.t_star, k0))
        .push("T_star", fmt_opt(s.deadline))
        .push("decay_rate", fmt_opt(b.decay_rate.map(|d| d * k0 * k0)))
        .push("envelope_origin_m1", b.envelope_origin.m1 * k0)
        .push("envelope_origin_m2", b.envelope_origin.m2 * k0);
    print!("{r}");
    Ok(())
}

fn events_record(traj: &Trajectory, horizon: f64) -> Record {
    let b = theory::bounds(traj.initial).ok();
    let e = &traj.events;
    let mut r = Record::new();
    r.push("m1", traj.initial.m1)
        .push("m2", traj.initial.m2)
        .push("horizon", horizon)
        .push("omega_exit", fmt_opt(e.omega_exit))
        .push("s_hit", fmt_opt(e.s_hit))
        .push("blowup", fmt_opt(e.blowup))
        .push("blowup_uncertainty", fmt_opt(e.blowup_uncertainty))
        .push("t_star", fmt_opt(b.map(|b| b.t_star)))
        .push("T_star", fmt_opt(b.map(|b| b.breaking_bound)))
        .push("points", traj.points.len());
    r
}

fn write_phase(ctx: &Context, traj: &Trajectory, horizon: f64) -> Result<Record, CliError> {
    let path = ctx.output("trajectory.csv")?;
    report::write_trajectory_csv(&traj.points, create(&path)?).map_err(|e| report_err(&path, e))?;
    let record = events_record(traj, horizon);
    write_text(&ctx.output("events.txt")?, &record.to_string())?;
    let window = svg::window_around(traj.initial.m1, traj.initial.m2);
    let curves = wavebreak::portrait(window, 2, 2).curves;
    write_text(
        &ctx.output("trajectory.svg")?,
        &svg::trajectory(&traj.points, &curves, window),
    )?;
    Ok(record)
}

pub fn phase(ctx: &Context, a: PhaseArgs) -> Result<(), CliError> {
    let p = point(ctx, a.m1, a.m2)?;
    let horizon = match ctx.config.pick(a.horizon, "horizon")? {
        Some(h) => h,
        None => theory::T_star(p).map_or(5.0, |t| t + 0.5),
    };
    match ode::integrate(p, horizon) {
        Ok(traj) => {
            print!("{}", write_phase(ctx, &traj, horizon)?);
            Ok(())
        }
        Err(OdeError::StepUnderflow { t, h, partial }) => {
            write_phase(ctx, &partial, horizon)?;
            Err(CliError::domain(format!(
                "step size underflow at t = {t} (h = {h:e}); partial trajectory written"
            )))
        }
        Err(e) => Err(CliError::usage(e)),
    }
}

pub fn portrait(ctx: &Context, a: PortraitArgs) -> Result<(), CliError> {
    let c = &ctx.config;
    let d = Window::DEFAULT;
    let window = Window {
        x_min: c.pick_or(a.x_min, "x-min", d.x_min)?,
        x_max: c.pick_or(a.x_max, "x-max", d.x_max)?,
        y_min: c.pick_or(a.y_min, "y-min", d.y_min)?,
        y_max: c.pick_or(a.y_max, "y-max", d.y_max)?,
    };
    let nx = c.pick_or(a.nx, "nx", DEFAULT_DENSITY)?;
    let ny = c.pick_or(a.ny, "ny", DEFAULT_DENSITY)?;
    let pic = wavebreak::portrait(window, nx, ny);
    let path = ctx.output("arrows.csv")?;
    report::write_arrows_csv(&pic.arrows, create(&path)?).map_err(|e| report_err(&path, e))?;
    let path = ctx.output("curves.csv")?;
    report::write_curves_csv(&pic.curves, create(&path)?).map_err(|e| report_err(&path, e))?;
    write_text(
        &ctx.output("portrait.svg")?,
        &svg::portrait(&pic.arrows, &pic.curves, Some(window)),
    )?;
    println!("arrows={}", pic.arrows.len());
    println!("curves={}", pic.curves.len());
    if window.is_degenerate() {
        eprintln!("note: degenerate window; nothing to draw");
    }
    Ok(())
}

pub fn sweep(ctx: &Context, a: SweepArgs) -> Result<(), CliError> {
    let c = &ctx.config;
    let m1 = Axis::new(
        c.pick_or(a.m1_lo, "m1-lo", -6.0)?,
        c.pick_or(a.m1_hi, "m1-hi", -2.5)?,
        c.pick_or(a.m1_count, "m1-count", 8)?,
    )?;
    let mode = c.pick_or(a.m2_mode, "m2-mode", "fraction".to_string())?;
    let m2 = match mode.as_str() {
        "fraction" => M2Mode::FractionOfParabola(Axis::new(
            c.pick_or(a.m2_lo, "m2-lo", 0.1)?,
            c.pick_or(a.m2_hi, "m2-hi", 0.9)?,
            c.pick_or(a.m2_count, "m2-count", 4)?,
        )?),
        "absolute" => M2Mode::Absolute(Axis::new(
            c.pick_or(a.m2_lo, "m2-lo", 0.0)?,
            c.pick_or(a.m2_hi, "m2-hi", 12.0)?,
            c.pick_or(a.m2_count, "m2-count", 4)?,
        )?),
        other => {
            return Err(CliError::usage(format!(
                "unknown m2 mode `{other}` (expected fraction or absolute)"
            )))
        }
    };
    let backend: Backend = c
        .pick_or(a.backend, "backend", "pde".to_string())?
        .parse()
        .map_err(CliError::usage)?;
    let samples = c.pick(a.samples, "samples")?;
    let seed = c.pick_or(a.seed, "seed", 0)?;
    if samples == Some(0) {
        return Err(CliError::usage("--samples must be at least 1"));
    }
    let spec = SweepSpec {
        m1,
        m2,
        kernel: kernel(ctx, a.solver.kernel.clone())?,
        solver: solver_config(ctx, &a.solver)?,
        geometry: Geometry {
            length: c.pick_or(a.solver.length, "L", DEFAULT_LENGTH)?,
            width: c.pick_or(a.solver.width, "width", DEFAULT_WIDTH)?,
            points: c.pick_or(a.solver.n, "n", DEFAULT_SWEEP_POINTS)?,
        },
        backend,
        ode_horizon: c.pick(a.solver.horizon, "horizon")?,
        sampled: samples.map(|n| (n, seed)),
    };
    if backend == Backend::Pde {
        // Fail once up front rather than on every row.
        let g = spec.geometry;
        if let Err(e) = build_profile(-1.0, 1.0, g.length, g.width, g.points) {
            if let InitialDataError::GridSize(_) | InitialDataError::Parameters(_) = e {
                return Err(CliError::usage(e));
            }
        }
    }
    let rows = sweep::run_sweep(&spec);
    let path = ctx.output("sweep.csv")?;
    sweep::write_rows(&rows, create(&path)?).map_err(|e| CliError::domain(format!("{}: {e}", path.display())))?;
    let broke = rows
        .iter()
        .filter(|r| r.verdict == "BrokeAt" || r.verdict == "Blowup")
        .count();
    let violations = rows.iter().filter(|r| r.violates_bound()).count();
    println!("rows={}", rows.len());
    println!("broke={broke}");
    println!("bound_violations={violations}");
    if violations > 0 {
        eprintln!("warning: {violations} rows broke after T*");
    }
    Ok(())
}

fn markers_from(path: &Path) -> Result<SeriesMarkers, CliError> {
    let records = report::read_records(open(path)?).map_err(|e| report_err(path, e))?;
    let record = records
        .first()
        .ok_or_else(|| CliError::usage(format!("{}: no summary record", path.display())))?;
    let s = SimSummary::from_record(record).map_err(|e| report_err(path, e))?;
    Ok(SeriesMarkers {
        t_star: s.t_star,
        breaking_bound: s.breaking_bound,
        k_at_zero: s.k_at_zero,
    })
}

pub fn plot(ctx: &Context, a: PlotArgs) -> Result<(), CliError> {
    let input = &a.input;
    let (name, doc) = match a.kind {
        PlotKind::Series => {
            let series = report::read_series_csv(open(input)?).map_err(|e| report_err(input, e))?;
            let markers = match &a.summary {
                Some(p) => markers_from(p)?,
                None => SeriesMarkers::default(),
            };
            ("series.svg", svg::series(&series, markers))
        }
        PlotKind::Portrait => {
            let arrows = report::read_arrows_csv(open(input)?).map_err(|e| report_err(input, e))?;
            let curves = match &a.curves {
                Some(p) => report::read_curves_csv(open(p)?).map_err(|e| report_err(p, e))?,
                None => vec![],
            };
            ("portrait.svg", svg::portrait(&arrows, &curves, None))
        }
        PlotKind::Trajectory => {
            let points = report::read_trajectory_csv(open(input)?).map_err(|e| report_err(input, e))?;
            let window = points.first().map_or(Window::DEFAULT, |p| svg::window_around(p.x, p.y));
            let curves = wavebreak::portrait(window, 2, 2).curves;
            ("trajectory.svg", svg::trajectory(&points, &curves, window))
        }
    };
    let path = match a.output {
        Some(p) => p,
        None => ctx.output(name)?,
    };
    write_text(&path, &doc)?;
    println!("{}", path.display());
    Ok(())
}
