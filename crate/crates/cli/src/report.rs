//! JSON and text renderings of a verification report.
//!
//! JSON layout: `{tool, config, checks: [{name, suite, paper_ref, max_residual,
//! mean_residual, tolerance, comparison, samples, verdict, notes}], summary}` plus
//! `runtime_seconds` when timing is requested. Reals are written with 17
//! significant digits; non-finite values become `null`.

use std::fmt::Write as _;
use std::io;

use kahler_lift::verify::{Comparison, Suite, Summary, VerificationReport, VerifyConfig};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::CliError;

#[derive(Serialize)]
struct Tool {
    name: &'static str,
    version: &'static str,
}

#[derive(Serialize)]
struct JsonCheck<'a> {
    name: &'a str,
    suite: Suite,
    paper_ref: &'a str,
    max_residual: f64,
    mean_residual: f64,
    tolerance: f64,
    comparison: Comparison,
    samples: usize,
    verdict: &'static str,
    notes: &'a [String],
}

#[derive(Serialize)]
struct JsonReport<'a> {
    tool: Tool,
    config: &'a VerifyConfig,
    checks: Vec<JsonCheck<'a>>,
    summary: &'a Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_seconds: Option<f64>,
}

/// Pretty printing with reals as `{:.16e}`.
struct ReportFormatter(PrettyFormatter<'static>);

impl Formatter for ReportFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json(rep: &VerificationReport, runtime: Option<f64>) -> Result<Vec<u8>, CliError> {
    let doc = JsonReport {
        tool: Tool { name: "kahler-lift", version: env!("CARGO_PKG_VERSION") },
        config: &rep.config,
        checks: rep
            .checks
            .iter()
            .map(|c| JsonCheck {
                name: &c.name,
                suite: c.suite,
                paper_ref: &c.statement,
                max_residual: c.max_residual,
                mean_residual: c.mean_residual,
                tolerance: c.tolerance,
                comparison: c.comparison,
                samples: c.samples,
                verdict: if c.passed { "pass" } else { "fail" },
                notes: &c.notes,
            })
            .collect(),
        summary: &rep.summary,
        runtime_seconds: runtime,
    };
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ReportFormatter(PrettyFormatter::new()));
    doc.serialize(&mut ser).map_err(|e| CliError::Io(e.into()))?;
    buf.push(b'\n');
    Ok(buf)
}

pub fn to_text(rep: &VerificationReport, runtime: Option<f64>) -> String {
    let cfg = &rep.config;
    let mut s = String::new();
    let _ = writeln!(s, "kahler-lift {}  n = {}  c = {}  A = {}  seed = {}  samples = {}", env!("CARGO_PKG_VERSION"), cfg.n, cfg.c, cfg.a, cfg.sample.seed, cfg.sample.count);
    let _ = writeln!(s, "lambda = {}  k = {}", rep.summary.lambda, rep.summary.holomorphic_curvature);
    if rep.summary.t_range_clipped {
        if let Some(b) = rep.summary.tube_bound {
            let _ = writeln!(s, "t range clipped to the tube t < {b}");
        }
    }
    for c in &rep.checks {
        let op = match c.comparison {
            Comparison::Below => "<",
            Comparison::Above => ">",
        };
        let _ = writeln!(
            s,
            "{:<4} {:<14} {:<38} {:>12.4e} {op} {:<8.1e} ({} samples)",
            if c.passed { "pass" } else { "FAIL" },
            c.suite.name(),
            c.name,
            c.max_residual,
            c.tolerance,
            c.samples
        );
        for note in &c.notes {
            let _ = writeln!(s, "       {note}");
        }
    }
    let _ = writeln!(s, "{} of {} checks passed", rep.summary.passed, rep.summary.total);
    if let Some(r) = runtime {
        let _ = writeln!(s, "runtime {r:.3} s");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Probe {
        x: f64,
        y: f64,
        z: Vec<f64>,
    }

    fn render(p: &Probe) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, ReportFormatter(PrettyFormatter::new()));
        p.serialize(&mut ser).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn reals_carry_seventeen_digits_and_round_trip() {
        let x = 0.1 + 0.2;
        let s = render(&Probe { x, y: f64::NAN, z: vec![-4.0, 1e-300] });
        assert!(s.contains("\"x\": 3.0000000000000004e-1"), "{s}");
        assert!(s.contains("\"y\": null"));
        assert!(s.contains("-4.0000000000000000e0"));
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["x"].as_f64(), Some(x));
        assert!(s.contains("1.0000000000000000e-300"));
        assert_eq!("1.0000000000000000e-300".parse::<f64>(), Ok(1e-300));
    }
}
