//! Breaking region, classical slope condition, and time bounds for the
//! gradient extrema `(m1, m2) = (inf u_x, sup u_x)`.
//!
//! Every formula is written once in normalized units where `K(0) = 1`.
//! A general kernel is handled by [`normalize`]: with `m = K(0)·n` and
//! `t = s / K(0)` the inequalities
//!
//! ```text
//! m1' <= -m1^2 + K(0)(m2 - m1),   m2' <= -m2^2 + K(0)(m2 - m1)
//! ```
//!
//! become the same system with `K(0) = 1` in `(n, s)`. Times computed in
//! normalized units are converted back with [`to_physical_time`].
//!
//! In normalized units:
//!
//! * `Ω = { m1 < -2, 0 <= m2 < m1² + m1 }`
//! * the classical condition is `m1 + m2 <= -2`
//! * `S = Ω ∩ { m1 + m2 <= 0 }` is reached by `t* = max(0, (m1+m2) / (2 m1 (2 + m1)))`
//! * breaking happens before `T* = ½ ln(m1 / (2 + m1)) + t*`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("slope pair ({m1}, {m2}) is outside the breaking region")]
    OutsideOmega { m1: f64, m2: f64 },
    #[error("slope pair ({m1}, {m2}) has m1 + m2 <= 0; the triangle decay bound needs m1 + m2 > 0")]
    AlreadyInS { m1: f64, m2: f64 },
    #[error("envelope origin m1 = {0} must be below -2")]
    EnvelopeOrigin(f64),
    #[error("envelope time {t} precedes its origin {t_star}")]
    EnvelopeTime { t: f64, t_star: f64 },
    #[error("kernel value at the origin must be positive and finite, got {0}")]
    KernelScale(f64),
}

/// A point `(m1, m2)` in the plane of gradient extrema.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlopePair {
    pub m1: f64,
    pub m2: f64,
}

impl SlopePair {
    pub const fn new(m1: f64, m2: f64) -> Self {
        Self { m1, m2 }
    }

    pub fn sum(&self) -> f64 {
        self.m1 + self.m2
    }

    /// Height of the upper boundary of Ω above `m1`: `m1² + m1`.
    pub fn parabola(m1: f64) -> f64 {
        m1 * m1 + m1
    }
}

impl fmt::Display for SlopePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m1, self.m2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    Both,
    OmegaOnly,
    SeligerOnly,
    Neither,
}

impl RegionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::Both => "Both",
            RegionLabel::OmegaOnly => "OmegaOnly",
            RegionLabel::SeligerOnly => "SeligerOnly",
            RegionLabel::Neither => "Neither",
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RegionLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Both" => Ok(RegionLabel::Both),
            "OmegaOnly" => Ok(RegionLabel::OmegaOnly),
            "SeligerOnly" => Ok(RegionLabel::SeligerOnly),
            "Neither" => Ok(RegionLabel::Neither),
            other => Err(format!("unknown region label `{other}`")),
        }
    }
}

/// Exact membership in the open set Ω (normalized units).
pub fn in_omega(p: SlopePair) -> bool {
    p.m1 < -2.0 && 0.0 <= p.m2 && p.m2 < SlopePair::parabola(p.m1)
}

/// Membership in the closure of Ω widened by `tol`. With `tol = 0` this is
/// exactly `{ m1 <= -2, 0 <= m2 <= m1² + m1 }`.
pub fn in_omega_closure(p: SlopePair, tol: f64) -> bool {
    p.m1 <= -2.0 + tol && -tol <= p.m2 && p.m2 <= SlopePair::parabola(p.m1) + tol
}

/// Membership in S = Ω ∩ { m1 + m2 <= 0 }.
pub fn in_s(p: SlopePair) -> bool {
    in_omega(p) && p.sum() <= 0.0
}

/// The classical condition `m1 + m2 <= -2 K(0)`.
pub fn seliger(p: SlopePair, k0: f64) -> bool {
    p.sum() <= -2.0 * k0
}

/// Rescales slopes by `K(0)` so that the normalized formulas apply.
pub fn normalize(p: SlopePair, k0: f64) -> SlopePair {
    SlopePair::new(p.m1 / k0, p.m2 / k0)
}

/// Converts a normalized time back to the time of a kernel with the given `K(0)`.
pub fn to_physical_time(normalized: f64, k0: f64) -> f64 {
    normalized / k0
}

pub fn classify(p: SlopePair, k0: f64) -> RegionLabel {
    let n = normalize(p, k0);
    match (in_omega(n), seliger(n, 1.0)) {
        (true, true) => RegionLabel::Both,
        (true, false) => RegionLabel::OmegaOnly,
        (false, true) => RegionLabel::SeligerOnly,
        (false, false) => RegionLabel::Neither,
    }
}

fn require_omega(p: SlopePair) -> Result<(), TheoryError> {
    if in_omega(p) {
        Ok(())
    } else {
        Err(TheoryError::OutsideOmega { m1: p.m1, m2: p.m2 })
    }
}

/// Upper bound on the time needed to enter S.
pub fn t_star(p: SlopePair) -> Result<f64, TheoryError> {
    require_omega(p)?;
    if p.sum() <= 0.0 {
        return Ok(0.0);
    }
    Ok(p.sum() / (2.0 * p.m1 * (2.0 + p.m1)))
}

/// `½ ln(m1 / (2 + m1))`: time for the Riccati envelope started at `m1 < -2`
/// to reach zero.
pub fn riccati_deadline(m1: f64) -> f64 {
    0.5 * (m1 / (2.0 + m1)).ln()
}

/// Upper bound on the breaking time.
#[allow(non_snake_case)]
pub fn T_star(p: SlopePair) -> Result<f64, TheoryError> {
    Ok(riccati_deadline(p.m1) + t_star(p)?)
}

/// `m1³ (2 + m1)`: the sign of `f'` on the parabola `m2 = m1² + m1`.
pub fn boundary_identity(m1: f64) -> f64 {
    m1 * m1 * m1 * (2.0 + m1)
}

/// Bound on `(m1 + m2)'` inside the triangle with vertices
/// `(m1, m2)`, `(-m2, m2)`, `(m1, -m1)`; only defined on Ω ∖ S.
pub fn triangle_decay_rate(p0: SlopePair) -> Result<f64, TheoryError> {
    require_omega(p0)?;
    if p0.sum() <= 0.0 {
        return Err(TheoryError::AlreadyInS { m1: p0.m1, m2: p0.m2 });
    }
    Ok(-2.0 * p0.m1 * (2.0 + p0.m1))
}

/// Lower bound on `1/m1(t)` for `t >= t_star`, given `m1(t_star) < -2` and a
/// trajectory already inside S:
/// `½ e^{2(t - t*)} (2/m1(t*) + 1) - ½`.
pub fn riccati_envelope(m1_at_tstar: f64, t_star: f64, t: f64) -> Result<f64, TheoryError> {
    if m1_at_tstar >= -2.0 || !m1_at_tstar.is_finite() {
        return Err(TheoryError::EnvelopeOrigin(m1_at_tstar));
    }
    if t < t_star {
        return Err(TheoryError::EnvelopeTime { t, t_star });
    }
    // Written as g/m1 + (g - 1)/2 so that t = t* returns 1/m1 exactly.
    let dt = t - t_star;
    let g = (2.0 * dt).exp();
    Ok(g / m1_at_tstar + 0.5 * (2.0 * dt).exp_m1())
}

/// Time bounds for an initial slope pair in Ω (normalized units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    pub t_star: f64,
    /// `T*`, the bound on the breaking time.
    pub breaking_bound: f64,
    /// `None` when the pair already lies in S.
    pub decay_rate: Option<f64>,
    /// Worst-case point from which the Riccati envelope certifies `T*`:
    /// the pair itself when it lies in S, otherwise the triangle vertex `(m1, -m1)`.
    pub envelope_origin: SlopePair,
}

pub fn bounds(p: SlopePair) -> Result<BoundsReport, TheoryError> {
    let t_star = t_star(p)?;
    let decay_rate = triangle_decay_rate(p).ok();
    let envelope_origin = if p.sum() <= 0.0 { p } else { SlopePair::new(p.m1, -p.m1) };
    Ok(BoundsReport {
        t_star,
        breaking_bound: riccati_deadline(p.m1) + t_star,
        decay_rate,
        envelope_origin,
    })
}

/// Everything known about a slope pair for a kernel with the given `K(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub point: SlopePair,
    pub k0: f64,
    pub normalized: SlopePair,
    pub in_omega: bool,
    pub seliger: bool,
    pub label: RegionLabel,
    /// Normalized-time bounds when the normalized pair lies in Ω.
    pub bounds: Option<BoundsReport>,
    /// `T*` converted to the kernel's own time scale.
    pub deadline: Option<f64>,
}

pub fn assess(p: SlopePair, k0: f64) -> Result<Assessment, TheoryError> {
    if !(k0.is_finite() && k0 > 0.0) {
        return Err(TheoryError::KernelScale(k0));
    }
    let n = normalize(p, k0);
    let bounds = bounds(n).ok();
    Ok(Assessment {
        point: p,
        k0,
        normalized: n,
        in_omega: in_omega(n),
        seliger: seliger(p, k0),
        label: classify(p, k0),
        deadline: bounds.map(|b| to_physical_time(b.breaking_bound, k0)),
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(m1: f64, m2: f64) -> SlopePair {
        SlopePair::new(m1, m2)
    }

    #[test]
    fn omega_membership_edges() {
        assert!(in_omega(p(-2.5, 3.0)));
        assert!(!in_omega(p(-2.5, 3.75)));
        assert!(!in_omega(p(-2.0, 0.0)));
        assert!(in_omega(p(-3.0, 0.0)));
        assert!(!in_omega(p(-3.0, -1e-300)));
        assert!(in_omega_closure(p(-2.0, 2.0), 0.0));
        assert!(in_omega_closure(p(-2.5, 3.75), 0.0));
        assert!(!in_omega_closure(p(-2.5, 3.76), 0.0));
        assert!(in_omega_closure(p(-2.5, 3.76), 0.02));
    }

    #[test]
    fn seliger_examples() {
        assert!(seliger(p(-3.0, 1.0), 1.0));
        assert!(!seliger(p(-2.5, 3.0), 1.0));
        assert!(!seliger(p(-3.0, 1.0), 2.0));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(p(-2.5, 3.0), 1.0), RegionLabel::OmegaOnly);
        assert_eq!(classify(p(-3.0, 1.0), 1.0), RegionLabel::Both);
        assert_eq!(classify(p(-1.0, 0.5), 1.0), RegionLabel::Neither);
        assert_eq!(classify(p(-1.0, -1.5), 1.0), RegionLabel::SeligerOnly);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(p(-4.0, 2.0), 1.0), p(-4.0, 2.0));
        assert_eq!(normalize(p(-8.0, 4.0), 2.0), p(-4.0, 2.0));
        assert_eq!(normalize(p(0.0, 0.0), 5.0), p(0.0, 0.0));
    }

    #[test]
    fn normalization_maps_the_inequality_system() {
        // With m = k0 n and t = s / k0: dm/dt = k0² dn/ds, and the right-hand
        // side -m1² + k0 (m2 - m1) = k0² (-n1² + n2 - n1).
        for &k0 in &[0.5, 1.0, 2.0, 3.7] {
            for &(m1, m2) in &[(-8.0, 4.0), (-3.0, 0.5), (-1.0, 2.0)] {
                let physical = -m1 * m1 + k0 * (m2 - m1);
                let n = normalize(p(m1, m2), k0);
                let normalized = -n.m1 * n.m1 + n.m2 - n.m1;
                assert!((physical - k0 * k0 * normalized).abs() < 1e-12 * physical.abs().max(1.0));
            }
        }
    }

    #[test]
    fn t_star_examples() {
        assert_eq!(t_star(p(-4.0, 2.0)).unwrap(), 0.0);
        assert!((t_star(p(-3.0, 4.0)).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((t_star(p(-2.5, 3.0)).unwrap() - 0.2).abs() < 1e-15);
        assert!(t_star(p(-1.0, 0.0)).is_err());
    }

    #[test]
    fn big_t_star_examples() {
        assert!((T_star(p(-4.0, 2.0)).unwrap() - 0.346_573_590_279_972_65).abs() < 1e-12);
        assert!((T_star(p(-3.0, 0.0)).unwrap() - 0.549_306_144_334_054_8).abs() < 1e-12);
        assert!((T_star(p(-3.0, 4.0)).unwrap() - 0.715_972_811_000_721_5).abs() < 1e-12);
        assert!(T_star(p(-2.0, 1.0)).is_err());
    }

    #[test]
    fn boundary_identity_examples() {
        assert_eq!(boundary_identity(-3.0), 27.0);
        assert_eq!(boundary_identity(-2.0), 0.0);
        assert_eq!(boundary_identity(-2.5), 7.8125);
        // Cross-check through m2 = m1² + m1 = 6: 36 - 6 - 3.
        let m2 = SlopePair::parabola(-3.0);
        assert_eq!(m2 * m2 - m2 - 3.0, 27.0);
    }

    #[test]
    fn triangle_decay_examples() {
        assert_eq!(triangle_decay_rate(p(-3.0, 4.0)).unwrap(), -6.0);
        assert_eq!(triangle_decay_rate(p(-4.0, 5.0)).unwrap(), -16.0);
        assert!(triangle_decay_rate(p(-2.0, 1.0)).is_err());
        assert!(matches!(
            triangle_decay_rate(p(-4.0, 2.0)),
            Err(TheoryError::AlreadyInS { .. })
        ));
    }

    #[test]
    fn envelope_examples() {
        assert_eq!(riccati_envelope(-4.0, 0.3, 0.3).unwrap(), -0.25);
        let dl = riccati_deadline(-4.0);
        assert!(riccati_envelope(-4.0, 1.0, 1.0 + dl).unwrap().abs() < 1e-15);
        let v = riccati_envelope(-3.0, 0.0, 0.1).unwrap();
        assert!((v - (0.5 * (0.2f64).exp() / 3.0 - 0.5)).abs() < 1e-15);
        assert!((v + 0.296_432_873_6).abs() < 1e-9);
        assert!(riccati_envelope(-2.0, 0.0, 0.1).is_err());
        assert!(riccati_envelope(-3.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn assessment_converts_time() {
        let a = assess(p(-8.0, 4.0), 2.0).unwrap();
        assert_eq!(a.normalized, p(-4.0, 2.0));
        assert_eq!(a.label, RegionLabel::Both);
        let b = a.bounds.unwrap();
        assert!((a.deadline.unwrap() - b.breaking_bound / 2.0).abs() < 1e-15);
        assert!(assess(p(-8.0, 4.0), 0.0).is_err());
        assert!(assess(p(-1.0, 0.0), 1.0).unwrap().bounds.is_none());
    }
}
