//! `verify` and `list`.

use crate::args::{Format, VerifyArgs};
use crate::error::CliError;
use crate::report::Outcome;
use saranfk::registry::{builtin_registry, lookup, verify_identity, EvalSettings, IdentityCase, MAX_SAMPLES};
use serde::Serialize;
use std::path::PathBuf;

pub const ORDER_ENV: &str = "SARANFK_DEFAULT_ORDER";

/// Default settings with the quadrature order taken from the environment.
pub fn settings_from_env() -> Result<EvalSettings, CliError> {
    let mut s = EvalSettings::default();
    if let Ok(v) = std::env::var(ORDER_ENV) {
        s.order = v
            .trim()
            .parse()
            .ok()
            .filter(|&n: &usize| n > 0)
            .ok_or_else(|| CliError::Usage(format!("{ORDER_ENV} must be a positive integer, got '{v}'")))?;
    }
    Ok(s)
}

#[derive(Debug)]
pub struct RunConfig {
    /// Selected cases in registry order.
    pub identities: Vec<&'static IdentityCase>,
    pub seed: u64,
    pub samples: usize,
    pub tol_override: Option<f64>,
    /// Empty means a single run at the settings' q without an id suffix.
    pub q_values: Vec<f64>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub settings: EvalSettings,
}

impl RunConfig {
    pub fn from_args(a: &VerifyArgs, settings: EvalSettings) -> Result<Self, CliError> {
        let ids: Vec<&str> = a.identities.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect();
        if ids.is_empty() {
            return Err(CliError::Usage("--identities is empty".into()));
        }
        let identities: Vec<&'static IdentityCase> = if ids.contains(&"all") {
            builtin_registry().iter().collect()
        } else {
            for id in &ids {
                lookup(id)?;
            }
            builtin_registry().iter().filter(|c| ids.contains(&c.id.as_str())).collect()
        };
        if a.samples == 0 || a.samples > MAX_SAMPLES {
            return Err(CliError::Usage(format!("--samples must be in 1..={MAX_SAMPLES}, got {}", a.samples)));
        }
        if let Some(t) = a.tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!("--tol must be a non-negative number, got {t}")));
            }
        }
        if let Some(q) = a.q.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
            return Err(CliError::Usage(format!("--q must lie in (0,1), got {q}")));
        }
        Ok(Self {
            identities,
            seed: a.seed,
            samples: a.samples,
            tol_override: a.tol,
            q_values: a.q.clone(),
            output_path: a.output.clone(),
            format: a.format,
            settings,
        })
    }
}

fn run_one(case: &IdentityCase, c: &RunConfig, q: Option<f64>, id: String) -> Outcome {
    let settings = q.map_or(c.settings, |q| c.settings.with_q(q));
    let cost = case.cost_class.as_str();
    match verify_identity(case, c.seed, c.samples, c.tol_override, &settings) {
        Ok(r) => Outcome::from_result(&r, id, &case.anchor, q, cost),
        Err(e) => Outcome::aborted(id, &case.anchor, q, cost, c.tol_override.unwrap_or(case.tol), &e),
    }
}

/// One outcome per classical identity and per (q-identity, q) pair, in
/// registry order.
pub fn run(c: &RunConfig) -> Vec<Outcome> {
    let mut out = Vec::new();
    for case in &c.identities {
        if !case.q_dependent {
            out.push(run_one(case, c, None, case.id.clone()));
        } else if c.q_values.is_empty() {
            out.push(run_one(case, c, Some(c.settings.q), case.id.clone()));
        } else {
            for &q in &c.q_values {
                out.push(run_one(case, c, Some(q), format!("{}@q={q}", case.id)));
            }
        }
    }
    out
}

#[derive(Serialize)]
struct ListEntry<'a> {
    id: &'a str,
    anchor: &'a str,
    cost_class: &'a str,
    tol: f64,
    q_dependent: bool,
}

pub fn list(format: Format) -> Result<String, CliError> {
    let entries: Vec<ListEntry> = builtin_registry()
        .iter()
        .map(|c| ListEntry {
            id: &c.id,
            anchor: &c.anchor,
            cost_class: c.cost_class.as_str(),
            tol: c.tol,
            q_dependent: c.q_dependent,
        })
        .collect();
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&entries)? + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for e in &entries {
                w.serialize(e)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8")
        }
        Format::Human => {
            let id_w = entries.iter().map(|e| e.id.len()).max().unwrap_or(0);
            let an_w = entries.iter().map(|e| e.anchor.chars().count()).max().unwrap_or(0);
            entries
                .iter()
                .map(|e| {
                    let pad = " ".repeat(an_w - e.anchor.chars().count());
                    format!("{:<id_w$}  {}{pad}  {:<15}  {:.0e}\n", e.id, e.anchor, e.cost_class, e.tol)
                })
                .collect()
        }
    })
}
