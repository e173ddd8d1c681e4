//! Minimal hand-written SVG output for portraits, time series and trajectories.

use std::fmt::Write;

use wavebreak::ode::{Arrow, BoundaryCurve, CurveKind, TrajectoryPoint};
use wavebreak::theory::riccati_envelope;
use wavebreak::{ExtremaSample, Window};

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

/// Optional reference times drawn on a series plot, in the kernel's time units.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SeriesMarkers {
    pub t_star: Option<f64>,
    pub breaking_bound: Option<f64>,
    pub k_at_zero: Option<f64>,
}

struct Panel {
    id: String,
    top: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Panel {
    fn new(id: &str, top: f64, x: (f64, f64), y: (f64, f64)) -> Self {
        Self {
            id: id.to_string(),
            top,
            x: widen(x),
            y: widen(y),
        }
    }

    fn inner_width(&self) -> f64 {
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    }

    fn inner_height(&self) -> f64 {
        PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * self.inner_width()
    }

    fn py(&self, y: f64) -> f64 {
        self.top + MARGIN_TOP + (self.y.1 - y) / (self.y.1 - self.y.0) * self.inner_height()
    }

    fn axes(&self, out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let (l, t) = (MARGIN_LEFT, self.top + MARGIN_TOP);
        let (w, h) = (self.inner_width(), self.inner_height());
        let _ = writeln!(
            out,
            r#"<clipPath id="{}"><rect x="{l:.2}" y="{t:.2}" width="{w:.2}" height="{h:.2}"/></clipPath>"#,
            self.id
        );
        let _ = writeln!(
            out,
            r#"<rect x="{l:.2}" y="{t:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="black"/>"#
        );
        for v in ticks(self.x.0, self.x.1) {
            let x = self.px(v);
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
                t + h,
                t + h + 5.0,
                t + h + 18.0,
                tick_label(v)
            );
        }
        for v in ticks(self.y.0, self.y.1) {
            let y = self.py(v);
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{l:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
                l - 5.0,
                l - 8.0,
                y + 4.0,
                tick_label(v)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"#,
            l + w / 2.0,
            self.top + 24.0,
            escape(title)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            l + w / 2.0,
            t + h + 38.0,
            escape(xlabel)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            t + h / 2.0,
            t + h / 2.0,
            escape(ylabel)
        );
    }

    fn polyline(&self, out: &mut String, pts: &[(f64, f64)], color: &str, dashed: bool) {
        if pts.is_empty() {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<polyline clip-path="url(#{})" fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            self.id,
            coords.join(" ")
        );
    }

    fn vline(&self, out: &mut String, x: f64, color: &str, label: &str) {
        if !(x.is_finite() && x >= self.x.0 && x <= self.x.1) {
            return;
        }
        let px = self.px(x);
        let top = self.top + MARGIN_TOP;
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{top:.2}" x2="{px:.2}" y2="{:.2}" stroke="{color}" stroke-dasharray="3 3"/><text x="{:.2}" y="{:.2}" font-size="11" fill="{color}">{}</text>"#,
            top + self.inner_height(),
            px + 3.0,
            top + 12.0,
            escape(label)
        );
    }

    fn legend(&self, out: &mut String, entries: &[(&str, &str)]) {
        for (i, (color, label)) in entries.iter().enumerate() {
            let y = self.top + MARGIN_TOP + 16.0 + 16.0 * i as f64;
            let x = WIDTH - MARGIN_RIGHT - 160.0;
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
                y - 4.0,
                x + 20.0,
                y - 4.0,
                x + 26.0,
                y,
                escape(label)
            );
        }
    }
}

fn document(height: f64, body: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" viewBox=\"0 0 {WIDTH} {height}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

fn widen((lo, hi): (f64, f64)) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo > 1e-12 * hi.abs().max(lo.abs()).max(1e-300) {
        (lo, hi)
    } else {
        let pad = lo.abs().max(1.0) * 0.5;
        (lo - pad, hi + pad)
    }
}

fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.filter(|v| v.is_finite()).fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

fn padded(r: (f64, f64), frac: f64) -> (f64, f64) {
    let pad = (r.1 - r.0) * frac;
    (r.0 - pad, r.1 + pad)
}

/// Round tick positions (steps of 1, 2 or 5 times a power of ten).
pub fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    if !(span.is_finite() && span > 0.0) {
        return vec![];
    }
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let v = if v.abs() < 1e-12 { 0.0 } else { v };
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn curve_style(kind: CurveKind) -> (&'static str, bool) {
    match kind {
        CurveKind::SeligerLine => ("#1f5fbf", true),
        _ => ("#c0392b", false),
    }
}

fn draw_curves(panel: &Panel, out: &mut String, curves: &[BoundaryCurve]) {
    for c in curves {
        let (color, dashed) = curve_style(c.kind);
        panel.polyline(out, &c.points, color, dashed);
    }
}

/// Phase portrait: arrow field, the boundary of the breaking region and the
/// classical condition line.
pub fn portrait(arrows: &[Arrow], curves: &[BoundaryCurve], window: Option<Window>) -> String {
    let window = window.unwrap_or_else(|| {
        let xs = range(
            arrows
                .iter()
                .map(|a| a.x)
                .chain(curves.iter().flat_map(|c| c.points.iter().map(|p| p.0))),
        );
        let ys = range(
            arrows
                .iter()
                .map(|a| a.y)
                .chain(curves.iter().flat_map(|c| c.points.iter().map(|p| p.1))),
        );
        match (xs, ys) {
            (Some(x), Some(y)) => Window {
                x_min: x.0,
                x_max: x.1,
                y_min: y.0,
                y_max: y.1,
            },
            _ => Window::DEFAULT,
        }
    });
    let panel = Panel::new(
        "portrait",
        0.0,
        (window.x_min, window.x_max),
        (window.y_min, window.y_max),
    );
    let mut body = String::new();
    body.push_str(
        "<defs><marker id=\"head\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"5\" markerHeight=\"5\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#555\"/></marker></defs>\n",
    );
    panel.axes(&mut body, "comparison system", "m1", "m2");

    let distinct = |v: Vec<f64>| {
        let mut v = v;
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len().max(2)
    };
    let nx = distinct(arrows.iter().map(|a| a.x).collect());
    let ny = distinct(arrows.iter().map(|a| a.y).collect());
    let cell = (panel.inner_width() / nx as f64).min(panel.inner_height() / ny as f64);
    let len = 0.8 * cell;
    for a in arrows {
        let (x, y) = (panel.px(a.x), panel.py(a.y));
        // Screen y grows downwards.
        let (dx, dy) = (a.dx, -a.dy);
        let norm = dx.hypot(dy);
        if !(norm.is_finite() && norm > 0.0) {
            let _ = writeln!(body, r##"<circle cx="{x:.2}" cy="{y:.2}" r="2" fill="#555"/>"##);
            continue;
        }
        let (ux, uy) = (dx / norm * len / 2.0, dy / norm * len / 2.0);
        let _ = writeln!(
            body,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#555" marker-end="url(#head)"/>"##,
            x - ux,
            y - uy,
            x + ux,
            y + uy
        );
    }
    draw_curves(&panel, &mut body, curves);
    panel.legend(
        &mut body,
        &[("#c0392b", "breaking region boundary"), ("#1f5fbf", "m1 + m2 = -2")],
    );
    document(PANEL_HEIGHT, &body)
}

/// Time series of the slope extrema, plus `1/m1` against the Riccati envelope.
pub fn series(samples: &[ExtremaSample], markers: SeriesMarkers) -> String {
    let t_range = range(
        samples
            .iter()
            .map(|s| s.t)
            .chain(markers.t_star)
            .chain(markers.breaking_bound),
    )
    .unwrap_or((0.0, 1.0));
    let slopes = range(samples.iter().flat_map(|s| [s.m1, s.m2])).map_or((-1.0, 1.0), |r| padded(r, 0.05));
    let top = Panel::new("slopes", 0.0, t_range, slopes);
    let mut body = String::new();
    top.axes(&mut body, "slope extrema", "t", "inf / sup of u_x");
    let m1: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.m1)).collect();
    let m2: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.m2)).collect();
    top.polyline(&mut body, &m1, "#c0392b", false);
    top.polyline(&mut body, &m2, "#1f5fbf", false);
    top.legend(&mut body, &[("#c0392b", "m1(t)"), ("#1f5fbf", "m2(t)")]);

    let recip: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.m1 != 0.0)
        .map(|s| (s.t, 1.0 / s.m1))
        .collect();
    let envelope = envelope_curve(samples, markers, t_range.1);
    let r =
        range(recip.iter().chain(&envelope).map(|p| p.1)).map_or((-1.0, 0.1), |r| padded((r.0, r.1.max(0.0)), 0.05));
    let bottom = Panel::new("reciprocal", PANEL_HEIGHT, t_range, r);
    bottom.axes(&mut body, "reciprocal slope and Riccati envelope", "t", "1 / m1");
    bottom.polyline(&mut body, &recip, "#c0392b", false);
    bottom.polyline(&mut body, &envelope, "#27ae60", true);
    bottom.legend(&mut body, &[("#c0392b", "1/m1(t)"), ("#27ae60", "envelope")]);

    for panel in [&top, &bottom] {
        if let Some(t) = markers.t_star {
            panel.vline(&mut body, t, "#7f8c8d", "t*");
        }
        if let Some(t) = markers.breaking_bound {
            panel.vline(&mut body, t, "#8e44ad", "T*");
        }
    }
    document(2.0 * PANEL_HEIGHT, &body)
}

/// Envelope in physical units, started at the first sample at or after `t*`.
fn envelope_curve(samples: &[ExtremaSample], markers: SeriesMarkers, t_end: f64) -> Vec<(f64, f64)> {
    let (Some(ts), Some(k0)) = (markers.t_star, markers.k_at_zero) else {
        return vec![];
    };
    let Some(origin) = samples.iter().find(|s| s.t >= ts) else {
        return vec![];
    };
    let m0 = origin.m1 / k0;
    let end = markers.breaking_bound.unwrap_or(t_end).max(t_end);
    (0..=200)
        .filter_map(|i| {
            let t = origin.t + (end - origin.t) * i as f64 / 200.0;
            // Normalized time k0·t; 1/m1 in physical units is k0 times the normalized value.
            let env = riccati_envelope(m0, k0 * origin.t, k0 * t).ok()?;
            Some((t, env / k0))
        })
        .collect()
}

/// A trajectory in the phase plane over the region boundary.
pub fn trajectory(points: &[TrajectoryPoint], curves: &[BoundaryCurve], window: Window) -> String {
    let panel = Panel::new(
        "trajectory",
        0.0,
        (window.x_min, window.x_max),
        (window.y_min, window.y_max),
    );
    let mut body = String::new();
    panel.axes(&mut body, "comparison system trajectory", "x", "y");
    draw_curves(&panel, &mut body, curves);
    let path: Vec<(f64, f64)> = points.iter().map(|p| (p.x, p.y)).collect();
    panel.polyline(&mut body, &path, "#2c3e50", false);
    if let Some(p) = points.first() {
        if window.contains(p.x, p.y) {
            let _ = writeln!(
                body,
                r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="#2c3e50"/>"##,
                panel.px(p.x),
                panel.py(p.y)
            );
        }
    }
    panel.legend(
        &mut body,
        &[
            ("#2c3e50", "trajectory"),
            ("#c0392b", "breaking region boundary"),
            ("#1f5fbf", "m1 + m2 = -2"),
        ],
    );
    document(PANEL_HEIGHT, &body)
}

/// The default window grown to contain `(x, y)` with some room around it.
pub fn window_around(x: f64, y: f64) -> Window {
    let w = Window::DEFAULT;
    let pad = 1.0;
    Window {
        x_min: w.x_min.min(x - pad),
        x_max: w.x_max.max(x + pad),
        y_min: w.y_min.min(y - pad),
        y_max: w.y_max.max(y + pad),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wavebreak::portrait as build_portrait;

    #[test]
    fn tick_steps_are_round() {
        assert_eq!(ticks(0.0, 1.0), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert!(ticks(1.0, 1.0).is_empty());
        assert_eq!(tick_label(0.30000000000000004), "0.3");
        assert_eq!(tick_label(-2.0), "-2");
    }

    #[test]
    fn empty_series_gives_empty_axes() {
        let svg = series(&[], SeriesMarkers::default());
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 0);
    }

    #[test]
    fn portrait_draws_every_arrow_and_curve() {
        let p = build_portrait(Window::DEFAULT, 10, 8);
        let svg = portrait(&p.arrows, &p.curves, Some(p.window));
        let arrows = svg.matches("marker-end").count() + svg.matches("<circle").count();
        assert_eq!(arrows, 80);
        assert_eq!(svg.matches("<polyline").count(), p.curves.len());
    }

    #[test]
    fn markers_appear_when_in_range() {
        let s = |t: f64, m1: f64| ExtremaSample {
            t,
            m1,
            m2: 2.0,
            xi1: 0.0,
            xi2: 0.0,
            dt_used: 0.01,
            tail_ratio: 0.0,
        };
        let samples = vec![s(0.0, -4.0), s(0.1, -5.0), s(0.2, -8.0)];
        let markers = SeriesMarkers {
            t_star: Some(0.0),
            breaking_bound: Some(0.3466),
            k_at_zero: Some(1.0),
        };
        let svg = series(&samples, markers);
        assert_eq!(svg.matches(">T*<").count(), 2);
        assert_eq!(svg.matches(">t*<").count(), 2);
        // m1, m2, 1/m1 and the envelope.
        assert_eq!(svg.matches("<polyline").count(), 4);
    }
}
