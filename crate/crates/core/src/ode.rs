//! The comparison system
//!
//! ```text
//! x' = -x² + y - x,   y' = -y² + y - x
//! ```
//!
//! satisfies the slope inequalities with equality, so every region and time
//! bound proved for the inequalities applies to its trajectories. Nothing is
//! claimed about ordering between these trajectories and PDE extrema.
//!
//! Integration uses the Dormand–Prince 5(4) pair with cubic Hermite dense
//! output for event location.

use thiserror::Error;

use crate::theory::{self, SlopePair};

/// `|x|` at which a trajectory is declared blown up.
pub const BLOWUP_THRESHOLD: f64 = 1e6;
/// Band used when checking that a trajectory stays in the closure of Ω.
pub const OMEGA_BAND: f64 = 1e-8;
pub const RELATIVE_TOLERANCE: f64 = 1e-10;
pub const ABSOLUTE_TOLERANCE: f64 = 1e-12;
pub const MIN_STEP: f64 = 1e-14;

pub fn vector_field(x: f64, y: f64) -> (f64, f64) {
    (-x * x + y - x, -y * y + y - x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl TrajectoryPoint {
    pub fn slopes(&self) -> SlopePair {
        SlopePair::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrajectoryEvents {
    /// First accepted point outside the closure of Ω (band [`OMEGA_BAND`]);
    /// only tracked for trajectories that start inside it.
    pub omega_exit: Option<f64>,
    /// First time with `x + y <= 0`, located on the dense output.
    pub s_hit: Option<f64>,
    /// Extrapolated blowup time `t + 1/|x|` at the first point with `|x| >= 10⁶`.
    pub blowup: Option<f64>,
    /// Size of the last step before the blowup threshold was crossed.
    pub blowup_uncertainty: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub initial: SlopePair,
    pub points: Vec<TrajectoryPoint>,
    pub events: TrajectoryEvents,
}

impl Trajectory {
    /// First recorded point at or after `t`.
    pub fn point_at_or_after(&self, t: f64) -> Option<&TrajectoryPoint> {
        let i = self.points.partition_point(|p| p.t < t);
        self.points.get(i)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h:e}) before the blowup threshold")]
    StepUnderflow { t: f64, h: f64, partial: Box<Trajectory> },
    #[error("horizon {0} must be positive and finite")]
    Horizon(f64),
    #[error("initial point ({0}, {1}) is not finite")]
    InitialPoint(f64, f64),
}

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes c_i are unused.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type V2 = [f64; 2];

fn f(v: V2) -> V2 {
    let (a, b) = vector_field(v[0], v[1]);
    [a, b]
}

fn axpy(y: V2, terms: &[(f64, V2)], h: f64) -> V2 {
    let mut out = y;
    for &(c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

struct DpStep {
    y: V2,
    f_end: V2,
    err: f64,
}

fn dp_step(y: V2, k1: V2, h: f64) -> DpStep {
    let k2 = f(axpy(y, &[(A21, k1)], h));
    let k3 = f(axpy(y, &[(A31, k1), (A32, k2)], h));
    let k4 = f(axpy(y, &[(A41, k1), (A42, k2), (A43, k3)], h));
    let k5 = f(axpy(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], h));
    let k6 = f(axpy(y, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)], h));
    let y_new = axpy(y, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)], h);
    let k7 = f(y_new);
    let mut sq = 0.0;
    for i in 0..2 {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let scale = ABSOLUTE_TOLERANCE + RELATIVE_TOLERANCE * y[i].abs().max(y_new[i].abs());
        sq += (e / scale).powi(2);
    }
    DpStep {
        y: y_new,
        f_end: k7,
        err: (sq / 2.0).sqrt(),
    }
}

/// Cubic Hermite interpolant of `x + y` on a step, at fraction `s ∈ [0, 1]`.
fn hermite(s: f64, h: f64, g0: f64, g1: f64, d0: f64, d1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * g0 + (s3 - 2.0 * s2 + s) * h * d0 + (-2.0 * s3 + 3.0 * s2) * g1 + (s3 - s2) * h * d1
}

/// Root of the Hermite interpolant of `x + y` in a step where it changes sign.
fn locate_sum_root(t0: f64, h: f64, y0: V2, f0: V2, y1: V2, f1: V2) -> f64 {
    let (g0, g1) = (y0[0] + y0[1], y1[0] + y1[1]);
    let (d0, d1) = (f0[0] + f0[1], f1[0] + f1[1]);
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if hermite(mid, h, g0, g1, d0, d1) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    t0 + hi * h
}

/// Integrates the comparison system from `p0` until `horizon` or blowup.
pub fn integrate(p0: SlopePair, horizon: f64) -> Result<Trajectory, OdeError> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(OdeError::Horizon(horizon));
    }
    if !(p0.m1.is_finite() && p0.m2.is_finite()) {
        return Err(OdeError::InitialPoint(p0.m1, p0.m2));
    }
    let mut y: V2 = [p0.m1, p0.m2];
    let mut fy = f(y);
    let mut t = 0.0;
    let mut events = TrajectoryEvents::default();
    let track_omega = theory::in_omega_closure(p0, OMEGA_BAND);
    if p0.sum() <= 0.0 {
        events.s_hit = Some(0.0);
    }
    let mut points = vec![TrajectoryPoint { t, x: y[0], y: y[1] }];

    let scale = y[0].abs().max(y[1].abs()).max(1.0);
    let mut h = (0.01 / scale).min(horizon);

    while t < horizon {
        let size = y[0].abs().max(y[1].abs()).max(1.0);
        // Keeps |x| from more than doubling per step near blowup.
        h = h.min(0.5 / size).min(horizon - t);
        if h < MIN_STEP {
            return Err(OdeError::StepUnderflow {
                t,
                h,
                partial: Box::new(Trajectory {
                    initial: p0,
                    points,
                    events,
                }),
            });
        }
        let step = dp_step(y, fy, h);
        let grows_too_fast = step.y[0].abs() > 2.0 * size || step.y[1].abs() > 2.0 * size;
        if step.err.is_nan() || step.err > 1.0 || grows_too_fast || !step.y.iter().all(|v| v.is_finite()) {
            let factor = if step.err.is_finite() {
                (0.9 * step.err.powf(-0.2)).clamp(0.1, 0.5)
            } else {
                0.1
            };
            h *= factor;
            continue;
        }
        let t_new = if horizon - t - h <= 1e-15 * horizon {
            horizon
        } else {
            t + h
        };

        if events.s_hit.is_none() && step.y[0] + step.y[1] <= 0.0 {
            events.s_hit = Some(locate_sum_root(t, h, y, fy, step.y, step.f_end));
        }
        let p = TrajectoryPoint {
            t: t_new,
            x: step.y[0],
            y: step.y[1],
        };
        if track_omega && events.omega_exit.is_none() && !theory::in_omega_closure(p.slopes(), OMEGA_BAND) {
            events.omega_exit = Some(t_new);
        }
        points.push(p);

        let factor = if step.err == 0.0 {
            5.0
        } else {
            (0.9 * step.err.powf(-0.2)).clamp(0.2, 5.0)
        };
        y = step.y;
        fy = step.f_end;
        t = t_new;
        if y[0].abs() >= BLOWUP_THRESHOLD {
            events.blowup = Some(t + 1.0 / y[0].abs());
            events.blowup_uncertainty = Some(h);
            break;
        }
        h *= factor;
    }
    Ok(Trajectory {
        initial: p0,
        points,
        events,
    })
}

/// Vector field sampled on a rectangle, with the curves bounding Ω and the
/// classical condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Portrait {
    pub window: Window,
    pub arrows: Vec<Arrow>,
    pub curves: Vec<BoundaryCurve>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    /// The default plotting window `[-6, 1] × [-1, 7]`.
    pub const DEFAULT: Window = Window {
        x_min: -6.0,
        x_max: 1.0,
        y_min: -1.0,
        y_max: 7.0,
    };

    pub fn is_degenerate(&self) -> bool {
        !(self.x_max > self.x_min && self.y_max > self.y_min)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrow {
    pub x: f64,
    pub y: f64,
    pub dx: f64,
    pub dy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    /// `m1 = -2`, `0 <= m2 <= 2`.
    OmegaEdge,
    /// `m2 = m1² + m1` for `m1 <= -2`.
    OmegaParabola,
    /// `m2 = 0` for `m1 <= -2`.
    OmegaFloor,
    /// `m1 + m2 = -2`.
    SeligerLine,
}

impl CurveKind {
    pub const ALL: [CurveKind; 4] = [
        CurveKind::OmegaEdge,
        CurveKind::OmegaParabola,
        CurveKind::OmegaFloor,
        CurveKind::SeligerLine,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CurveKind::OmegaEdge => "omega_edge",
            CurveKind::OmegaParabola => "omega_parabola",
            CurveKind::OmegaFloor => "omega_floor",
            CurveKind::SeligerLine => "seliger_line",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub kind: CurveKind,
    pub points: Vec<(f64, f64)>,
}

const CURVE_SAMPLES: usize = 200;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Samples the vector field on an `nx × ny` grid (endpoints included).
pub fn portrait(window: Window, nx: usize, ny: usize) -> Portrait {
    if window.is_degenerate() || nx == 0 || ny == 0 {
        return Portrait {
            window,
            arrows: vec![],
            curves: vec![],
        };
    }
    let xs = linspace(window.x_min, window.x_max, nx);
    let ys = linspace(window.y_min, window.y_max, ny);
    let arrows = ys
        .iter()
        .flat_map(|&y| {
            xs.iter().map(move |&x| {
                let (dx, dy) = vector_field(x, y);
                Arrow { x, y, dx, dy }
            })
        })
        .collect();
    Portrait {
        window,
        arrows,
        curves: boundary_curves(window),
    }
}

fn boundary_curves(w: Window) -> Vec<BoundaryCurve> {
    let mut curves = Vec::new();
    let left = w.x_min.min(-2.0);
    let keep =
        |pts: Vec<(f64, f64)>| -> Vec<(f64, f64)> { pts.into_iter().filter(|&(x, y)| w.contains(x, y)).collect() };
    let edge = keep(
        linspace(0.0, 2.0, CURVE_SAMPLES)
            .into_iter()
            .map(|y| (-2.0, y))
            .collect(),
    );
    // Parabola traced from the corner (-2, 2) leftwards.
    let parabola = keep(
        linspace(-2.0, left, CURVE_SAMPLES)
            .into_iter()
            .map(|x| (x, SlopePair::parabola(x)))
            .collect(),
    );
    let floor = keep(
        linspace(-2.0, left, CURVE_SAMPLES)
            .into_iter()
            .map(|x| (x, 0.0))
            .collect(),
    );
    let seliger = keep(
        linspace(w.x_min, w.x_max, CURVE_SAMPLES)
            .into_iter()
            .map(|x| (x, -2.0 - x))
            .collect(),
    );
    for (kind, points) in [
        (CurveKind::OmegaEdge, edge),
        (CurveKind::OmegaParabola, parabola),
        (CurveKind::OmegaFloor, floor),
        (CurveKind::SeligerLine, seliger),
    ] {
        if !points.is_empty() {
            curves.push(BoundaryCurve { kind, points });
        }
    }
    curves
}
