//! Report records and their json-lines, csv and human renderings.

use crate::args::Format;
use crate::error::CliError;
use crate::eval::fmt_c64;
use saranfk::registry::{ParameterPoint, VerificationResult};
use saranfk::C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// A parameter value: a bare number when real, `{"re", "im"}` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl From<C64> for ParamValue {
    fn from(z: C64) -> Self {
        if z.im == 0.0 {
            ParamValue::Real(z.re)
        } else {
            ParamValue::Complex { re: z.re, im: z.im }
        }
    }
}

impl ParamValue {
    fn c64(self) -> C64 {
        match self {
            ParamValue::Real(x) => C64::new(x, 0.0),
            ParamValue::Complex { re, im } => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub params: BTreeMap<String, ParamValue>,
    /// None when an evaluator failed.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub id: String,
    pub anchor: String,
    pub q: Option<f64>,
    pub samples: usize,
    pub max_rel_residual: f64,
    pub pass: bool,
    pub wall_time_ms: f64,
    pub failures: Vec<FailureRecord>,
}

/// A record plus what only the human format shows.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub record: ReportRecord,
    pub cost: Option<String>,
    pub tol: Option<f64>,
    pub diagnostics: Vec<Option<String>>,
}

fn params(p: &ParameterPoint) -> BTreeMap<String, ParamValue> {
    p.values.iter().chain(&p.arguments).map(|(k, v)| (k.clone(), ParamValue::from(*v))).collect()
}

impl Outcome {
    pub fn from_result(r: &VerificationResult, id: String, anchor: &str, q: Option<f64>, cost: &str) -> Self {
        let failures = r
            .failures
            .iter()
            .map(|f| FailureRecord { params: params(&f.point), residual: f.residual.is_finite().then_some(f.residual) })
            .collect();
        Outcome {
            record: ReportRecord {
                id,
                anchor: anchor.to_string(),
                q,
                samples: r.samples,
                max_rel_residual: r.max_rel_residual,
                pass: r.pass(),
                wall_time_ms: r.wall_time.as_secs_f64() * 1e3,
                failures,
            },
            cost: Some(cost.to_string()),
            tol: Some(r.tol),
            diagnostics: r.failures.iter().map(|f| f.diagnostic.clone()).collect(),
        }
    }

    /// A run that could not start, such as a sampler that hit its cap.
    pub fn aborted(id: String, anchor: &str, q: Option<f64>, cost: &str, tol: f64, err: &saranfk::Error) -> Self {
        Outcome {
            record: ReportRecord {
                id,
                anchor: anchor.to_string(),
                q,
                samples: 0,
                max_rel_residual: 0.0,
                pass: false,
                wall_time_ms: 0.0,
                failures: vec![FailureRecord { params: BTreeMap::new(), residual: None }],
            },
            cost: Some(cost.to_string()),
            tol: Some(tol),
            diagnostics: vec![Some(err.to_string())],
        }
    }

    pub fn bare(record: ReportRecord) -> Self {
        Outcome { record, cost: None, tol: None, diagnostics: Vec::new() }
    }
}

pub fn render(outcomes: &[Outcome], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = String::new();
            for o in outcomes {
                s.push_str(&serde_json::to_string(&o.record)?);
                s.push('\n');
            }
            Ok(s)
        }
        Format::Csv => csv_report(outcomes),
        Format::Human => Ok(human(outcomes)),
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    id: &'a str,
    anchor: &'a str,
    q: Option<f64>,
    samples: usize,
    max_rel_residual: f64,
    pass: bool,
    wall_time_ms: f64,
    failures: usize,
}

fn csv_report(outcomes: &[Outcome]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for o in outcomes {
        let r = &o.record;
        w.serialize(CsvRow {
            id: &r.id,
            anchor: &r.anchor,
            q: r.q,
            samples: r.samples,
            max_rel_residual: r.max_rel_residual,
            pass: r.pass,
            wall_time_ms: r.wall_time_ms,
            failures: r.failures.len(),
        })?;
    }
    if outcomes.is_empty() {
        return Ok("id,anchor,q,samples,max_rel_residual,pass,wall_time_ms,failures\n".into());
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn human(outcomes: &[Outcome]) -> String {
    let mut s = String::new();
    let width = outcomes.iter().map(|o| o.record.id.chars().count()).max().unwrap_or(0);
    for o in outcomes {
        let r = &o.record;
        let _ = write!(
            s,
            "{} {:<width$}  max residual {:.2e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.max_rel_residual
        );
        if let Some(t) = o.tol {
            let _ = write!(s, " (tol {t:.0e})");
        }
        let _ = write!(s, "  samples {}  {:.0} ms", r.samples, r.wall_time_ms);
        if let Some(c) = &o.cost {
            let _ = write!(s, "  {c}");
        }
        let _ = writeln!(s, "  [{}]", r.anchor);
        for (i, f) in r.failures.iter().enumerate() {
            let res = f.residual.map_or("error".to_string(), |x| format!("{x:.2e}"));
            let at: Vec<String> = f.params.iter().map(|(k, v)| format!("{k}={}", fmt_c64(v.c64()))).collect();
            let _ = write!(s, "    residual {res}");
            if !at.is_empty() {
                let _ = write!(s, " at {}", at.join(" "));
            }
            if let Some(Some(d)) = o.diagnostics.get(i) {
                let _ = write!(s, ": {d}");
            }
            s.push('\n');
        }
    }
    let passed = outcomes.iter().filter(|o| o.record.pass).count();
    let _ = writeln!(s, "{passed}/{} passed", outcomes.len());
    s
}

/// Reads records written by the json format; blank lines are skipped.
pub fn parse_json_lines(text: &str) -> Result<Vec<ReportRecord>, CliError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| CliError::Usage(format!("report line {}: {e}", i + 1))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> ReportRecord {
        let mut params = BTreeMap::new();
        params.insert("a".to_string(), ParamValue::Real(0.1 + 0.2));
        params.insert("z".to_string(), ParamValue::Complex { re: 0.3, im: -1e-300 });
        ReportRecord {
            id: "gasper-q-erdelyi-1@q=0.3".into(),
            anchor: "q-Erdélyi integral I".into(),
            q: Some(0.3),
            samples: 5,
            max_rel_residual: 1.234_567_890_123_456_7e-9,
            pass: false,
            wall_time_ms: 12.5,
            failures: vec![
                FailureRecord { params, residual: Some(2.5e-8) },
                FailureRecord { params: BTreeMap::new(), residual: None },
            ],
        }
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let r = record();
        let text = render(&[Outcome::bare(r.clone())], Format::Json).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert_eq!(parse_json_lines(&text).unwrap(), vec![r]);
    }

    #[test]
    fn field_names_are_fixed() {
        let v: serde_json::Value = serde_json::to_value(record()).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        let mut want = ["id", "anchor", "q", "samples", "max_rel_residual", "pass", "wall_time_ms", "failures"];
        want.sort();
        assert_eq!(keys, want);
        let f = v["failures"][1].as_object().unwrap();
        assert_eq!(f.keys().collect::<Vec<_>>(), ["params", "residual"]);
        assert!(f["residual"].is_null());
    }

    #[test]
    fn null_q_for_classical_records() {
        let r = ReportRecord { q: None, failures: vec![], ..record() };
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"q\":null"));
    }

    #[test]
    fn csv_and_human() {
        let o = [Outcome::bare(record())];
        let c = render(&o, Format::Csv).unwrap();
        assert!(c.starts_with("id,anchor,q,samples,max_rel_residual,pass,wall_time_ms,failures\n"));
        assert_eq!(c.lines().count(), 2);
        let h = render(&o, Format::Human).unwrap();
        assert!(h.starts_with("FAIL gasper-q-erdelyi-1@q=0.3"));
        assert!(h.contains("1.23e-9") && h.contains("residual error"));
        assert!(h.ends_with("0/1 passed\n"));
    }
}
