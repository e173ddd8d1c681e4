//! Plain-text serialization: CSV tables and flat `key=value` records.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! table read back through this module reproduces the in-memory values
//! bit for bit. Missing values are written as `NA`.

use std::io::{BufRead, BufReader, Read, Write};

use thiserror::Error;

use crate::kernels::{self, KernelShape};
use crate::ode::{Arrow, BoundaryCurve, CurveKind, TrajectoryPoint};
use crate::solver::{ExtremaSample, SimReport, Verdict};
use crate::theory;

pub const SERIES_HEADER: [&str; 7] = ["t", "m1", "m2", "xi1", "xi2", "dt", "tail_ratio"];
pub const TRAJECTORY_HEADER: [&str; 3] = ["t", "x", "y"];
pub const ARROW_HEADER: [&str; 4] = ["x", "y", "dx", "dy"];
pub const CURVE_HEADER: [&str; 3] = ["curve", "x", "y"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unexpected header `{found}`, expected `{expected}`")]
    Header { found: String, expected: String },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

pub fn parse_opt(s: &str) -> Result<Option<f64>, String> {
    if s == "NA" {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(|_| format!("not a number: `{s}`"))
    }
}

fn write_table<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn read_table<R: Read>(input: R, header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>, ReportError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let found = r.headers()?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(ReportError::Header {
            found: found.iter().collect::<Vec<_>>().join(","),
            expected: header.join(","),
        });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push((line, rec));
    }
    Ok(rows)
}

fn number(rec: &csv::StringRecord, i: usize, line: u64) -> Result<f64, ReportError> {
    rec[i].parse().map_err(|_| ReportError::Parse {
        line,
        message: format!("column {i}: not a number `{}`", &rec[i]),
    })
}

pub fn write_series_csv<W: Write>(series: &[ExtremaSample], out: W) -> Result<(), ReportError> {
    write_table(
        out,
        &SERIES_HEADER,
        series.iter().map(|s| {
            [s.t, s.m1, s.m2, s.xi1, s.xi2, s.dt_used, s.tail_ratio]
                .iter()
                .map(f64::to_string)
                .collect()
        }),
    )
}

pub fn read_series_csv<R: Read>(input: R) -> Result<Vec<ExtremaSample>, ReportError> {
    read_table(input, &SERIES_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            Ok(ExtremaSample {
                t: number(&rec, 0, line)?,
                m1: number(&rec, 1, line)?,
                m2: number(&rec, 2, line)?,
                xi1: number(&rec, 3, line)?,
                xi2: number(&rec, 4, line)?,
                dt_used: number(&rec, 5, line)?,
                tail_ratio: number(&rec, 6, line)?,
            })
        })
        .collect()
}

pub fn write_trajectory_csv<W: Write>(points: &[TrajectoryPoint], out: W) -> Result<(), ReportError> {
    write_table(
        out,
        &TRAJECTORY_HEADER,
        points
            .iter()
            .map(|p| vec![p.t.to_string(), p.x.to_string(), p.y.to_string()]),
    )
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Vec<TrajectoryPoint>, ReportError> {
    read_table(input, &TRAJECTORY_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            Ok(TrajectoryPoint {
                t: number(&rec, 0, line)?,
                x: number(&rec, 1, line)?,
                y: number(&rec, 2, line)?,
            })
        })
        .collect()
}

pub fn write_arrows_csv<W: Write>(arrows: &[Arrow], out: W) -> Result<(), ReportError> {
    write_table(
        out,
        &ARROW_HEADER,
        arrows
            .iter()
            .map(|a| vec![a.x.to_string(), a.y.to_string(), a.dx.to_string(), a.dy.to_string()]),
    )
}

pub fn read_arrows_csv<R: Read>(input: R) -> Result<Vec<Arrow>, ReportError> {
    read_table(input, &ARROW_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            Ok(Arrow {
                x: number(&rec, 0, line)?,
                y: number(&rec, 1, line)?,
                dx: number(&rec, 2, line)?,
                dy: number(&rec, 3, line)?,
            })
        })
        .collect()
}

pub fn write_curves_csv<W: Write>(curves: &[BoundaryCurve], out: W) -> Result<(), ReportError> {
    write_table(
        out,
        &CURVE_HEADER,
        curves.iter().flat_map(|c| {
            c.points
                .iter()
                .map(move |(x, y)| vec![c.kind.name().to_string(), x.to_string(), y.to_string()])
        }),
    )
}

/// Reads boundary curves; consecutive rows with the same name form one curve.
pub fn read_curves_csv<R: Read>(input: R) -> Result<Vec<BoundaryCurve>, ReportError> {
    let mut curves: Vec<BoundaryCurve> = Vec::new();
    for (line, rec) in read_table(input, &CURVE_HEADER)? {
        let kind = CurveKind::from_name(&rec[0]).ok_or_else(|| ReportError::Parse {
            line,
            message: format!("unknown curve `{}`", &rec[0]),
        })?;
        let pt = (number(&rec, 1, line)?, number(&rec, 2, line)?);
        match curves.last_mut() {
            Some(c) if c.kind == kind => c.points.push(pt),
            _ => curves.push(BoundaryCurve { kind, points: vec![pt] }),
        }
    }
    Ok(curves)
}

/// An ordered list of `key=value` pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Record {
    pub fields: Vec<(String, String)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl std::fmt::Display for Record {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in &self.fields {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Writes records separated by blank lines.
pub fn write_records<W: Write>(records: &[Record], mut out: W) -> Result<(), ReportError> {
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        write!(out, "{r}")?;
    }
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<Record>, ReportError> {
    let mut records = Vec::new();
    let mut current = Record::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            if !current.fields.is_empty() {
                records.push(std::mem::take(&mut current));
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ReportError::Parse {
            line: i as u64 + 1,
            message: format!("expected key=value, found `{line}`"),
        })?;
        current.push(k.trim(), v.trim());
    }
    if !current.fields.is_empty() {
        records.push(current);
    }
    Ok(records)
}

/// Headline numbers of a simulation, in the kernel's own time units.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSummary {
    pub verdict: Verdict,
    pub t_break: Option<f64>,
    pub breaking_bound: Option<f64>,
    pub t_star: Option<f64>,
    pub in_omega_initial: bool,
    pub kernel: String,
    pub grid_points: usize,
    pub domain_length: f64,
    pub m1_initial: f64,
    pub m2_initial: f64,
    pub k_at_zero: Option<f64>,
    /// False for kernels without a finite `K(0)`, where no bound applies.
    pub theory_applies: bool,
}

impl SimSummary {
    pub fn from_report(report: &SimReport) -> Self {
        let p0 = report.initial();
        let k0 = match report.kernel.shape() {
            KernelShape::Whitham => None,
            _ => kernels::kernel_eval(&report.kernel, 0.0).ok().filter(|v| *v > 0.0),
        };
        let assessment = k0.and_then(|k| theory::assess(p0, k).ok());
        let bounds = assessment.as_ref().and_then(|a| a.bounds);
        Self {
            verdict: report.verdict,
            t_break: report.break_time(),
            breaking_bound: assessment.as_ref().and_then(|a| a.deadline),
            t_star: bounds.zip(k0).map(|(b, k)| theory::to_physical_time(b.t_star, k)),
            in_omega_initial: assessment.as_ref().is_some_and(|a| a.in_omega),
            kernel: report.kernel.description().to_string(),
            grid_points: report.grid_points,
            domain_length: report.domain_length,
            m1_initial: p0.m1,
            m2_initial: p0.m2,
            k_at_zero: k0,
            theory_applies: k0.is_some(),
        }
    }

    /// `T* - t_break` when both exist.
    pub fn margin(&self) -> Option<f64> {
        self.breaking_bound.zip(self.t_break).map(|(a, b)| a - b)
    }

    pub fn to_record(&self) -> Record {
        let mut r = Record::new();
        r.push("verdict", self.verdict.name())
            .push("verdict_time", fmt_opt(self.verdict.time()))
            .push("t_break", fmt_opt(self.t_break))
            .push("T_star", fmt_opt(self.breaking_bound))
            .push("t_star", fmt_opt(self.t_star))
            .push("margin", fmt_opt(self.margin()))
            .push("in_omega_initial", self.in_omega_initial)
            .push("m1_initial", self.m1_initial)
            .push("m2_initial", self.m2_initial)
            .push("k_at_zero", fmt_opt(self.k_at_zero))
            .push("theory_applies", self.theory_applies)
            .push("kernel", &self.kernel)
            .push("grid", format!("{}x{}", self.grid_points, self.domain_length));
        r
    }

    pub fn from_record(r: &Record) -> Result<Self, ReportError> {
        let field = |k: &str| {
            r.get(k).ok_or_else(|| ReportError::Parse {
                line: 0,
                message: format!("missing key `{k}`"),
            })
        };
        let bad = |message: String| ReportError::Parse { line: 0, message };
        let opt = |k: &str| -> Result<Option<f64>, ReportError> { parse_opt(field(k)?).map_err(bad) };
        let flag = |k: &str| -> Result<bool, ReportError> {
            field(k)?.parse().map_err(|_| bad(format!("`{k}` is not a boolean")))
        };
        let num =
            |k: &str| -> Result<f64, ReportError> { opt(k)?.ok_or_else(|| bad(format!("`{k}` is missing a value"))) };
        let time = opt("verdict_time")?;
        let verdict = match (field("verdict")?, time) {
            ("BrokeAt", Some(t)) => Verdict::BrokeAt(t),
            ("ResolutionLost", Some(t)) => Verdict::ResolutionLost(t),
            ("ResolvedToHorizon", None) => Verdict::ResolvedToHorizon,
            (v, _) => return Err(bad(format!("bad verdict `{v}`"))),
        };
        let grid = field("grid")?;
        let (n, l) = grid
            .split_once('x')
            .and_then(|(n, l)| Some((n.parse().ok()?, l.parse().ok()?)))
            .ok_or_else(|| bad(format!("bad grid `{grid}`")))?;
        Ok(Self {
            verdict,
            t_break: opt("t_break")?,
            breaking_bound: opt("T_star")?,
            t_star: opt("t_star")?,
            in_omega_initial: flag("in_omega_initial")?,
            kernel: field("kernel")?.to_string(),
            grid_points: n,
            domain_length: l,
            m1_initial: num("m1_initial")?,
            m2_initial: num("m2_initial")?,
            k_at_zero: opt("k_at_zero")?,
            theory_applies: flag("theory_applies")?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_round_trip() {
        let mut a = Record::new();
        a.push("x", 1.5).push("label", "OmegaOnly");
        let mut b = Record::new();
        b.push("y", "NA");
        let mut buf = Vec::new();
        write_records(&[a.clone(), b.clone()], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "x=1.5\nlabel=OmegaOnly\n\ny=NA\n"
        );
        assert_eq!(read_records(buf.as_slice()).unwrap(), vec![a, b]);
    }

    #[test]
    fn series_header_is_checked() {
        assert!(read_series_csv("t,m1\n0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn curves_group_by_name() {
        let text = "curve,x,y\nomega_edge,-2,0\nomega_edge,-2,1\nseliger_line,0,-2\n";
        let curves = read_curves_csv(text.as_bytes()).unwrap();
        assert_eq!(curves.len(), 2);
        assert_eq!(curves[0].points.len(), 2);
        assert!(read_curves_csv("curve,x,y\nmystery,0,0\n".as_bytes()).is_err());
    }

    #[test]
    fn optional_numbers() {
        assert_eq!(parse_opt("NA").unwrap(), None);
        assert_eq!(parse_opt("0.25").unwrap(), Some(0.25));
        assert!(parse_opt("x").is_err());
        assert_eq!(fmt_opt(None), "NA");
    }
}
