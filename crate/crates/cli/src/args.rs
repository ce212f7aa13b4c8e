//! Command-line definitions and the free-form `--name value` parser used by
//! `eval`.

use crate::error::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use saranfk::C64;
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Parser, Debug)]
#[command(name = "saranfk", version, about = "Evaluate F_K and related functions, and verify integral identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a function at a point, e.g. `eval 2f1 --a 1 --b 1 --c 2 --z 0.5`.
    Eval(EvalArgs),
    /// Verify identities on sampled parameter points.
    Verify(VerifyArgs),
    /// List the identity registry.
    List(ListArgs),
    /// Re-render a JSON-lines report.
    Report(ReportArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        <Format as ValueEnum>::from_str(s, true).map_err(|_| CliError::Usage(format!("unknown format '{s}'")))
    }
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// 2f1, pfq, f2, fk, fk_L, phik, rphis, phi3, qgamma, qbeta,
    /// measure-moment or q-moment.
    pub function: String,
    /// Named arguments as `--name value`. Complex values are written like
    /// `0.2+0.1i`, lists as `1,2.5,3`. `--format json` switches the output.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, num_args = 0.., value_name = "ARGS")]
    pub args: Vec<String>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Identity ids, comma separated, or "all".
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub identities: Vec<String>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// Override every identity's tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Base for the q-identities; repeat to sweep.
    #[arg(long = "q")]
    pub q: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ListArgs {
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// JSON-lines report written by `verify --format json`; "-" reads stdin.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// `--name value` pairs with tracking of which names were consumed.
#[derive(Debug, Default)]
pub struct NamedArgs {
    map: BTreeMap<String, String>,
    used: BTreeSet<String>,
}

impl NamedArgs {
    pub fn parse(tokens: &[String]) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        let mut it = tokens.iter();
        while let Some(tok) = it.next() {
            let Some(name) = tok.strip_prefix("--") else {
                return Err(CliError::Usage(format!("expected --name, found '{tok}'")));
            };
            let (name, value) = match name.split_once('=') {
                Some((n, v)) => (n.to_string(), v.to_string()),
                None => {
                    let v = it.next().ok_or_else(|| CliError::Usage(format!("--{name} needs a value")))?;
                    (name.to_string(), v.clone())
                }
            };
            if name.is_empty() {
                return Err(CliError::Usage("empty argument name".into()));
            }
            if map.insert(name.clone(), value).is_some() {
                return Err(CliError::Usage(format!("--{name} given twice")));
            }
        }
        Ok(Self { map, used: BTreeSet::new() })
    }

    fn raw(&mut self, name: &str) -> Option<String> {
        let v = self.map.get(name).cloned();
        if v.is_some() {
            self.used.insert(name.to_string());
        }
        v
    }

    pub fn has(&self, name: &str) -> bool {
        self.map.contains_key(name)
    }

    pub fn opt_c64(&mut self, name: &str) -> Result<Option<C64>, CliError> {
        self.raw(name).map(|s| parse_c64(name, &s)).transpose()
    }

    pub fn c64(&mut self, name: &str) -> Result<C64, CliError> {
        self.opt_c64(name)?.ok_or_else(|| missing(name))
    }

    pub fn c64s<const N: usize>(&mut self, names: [&str; N]) -> Result<[C64; N], CliError> {
        let mut out = [C64::new(0.0, 0.0); N];
        for (o, n) in out.iter_mut().zip(names) {
            *o = self.c64(n)?;
        }
        Ok(out)
    }

    pub fn f64_or(&mut self, name: &str, default: f64) -> Result<f64, CliError> {
        match self.raw(name) {
            None => Ok(default),
            Some(s) => s.trim().parse().map_err(|_| CliError::Usage(format!("--{name}: '{s}' is not a real number"))),
        }
    }

    pub fn usize(&mut self, name: &str) -> Result<usize, CliError> {
        let s = self.raw(name).ok_or_else(|| missing(name))?;
        s.trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--{name}: '{s}' is not a non-negative integer")))
    }

    /// Comma-separated complex list; absent means empty.
    pub fn list(&mut self, name: &str) -> Result<Vec<C64>, CliError> {
        match self.raw(name) {
            None => Ok(Vec::new()),
            Some(s) if s.trim().is_empty() => Ok(Vec::new()),
            Some(s) => s.split(',').map(|t| parse_c64(name, t)).collect(),
        }
    }

    pub fn string_or(&mut self, name: &str, default: &str) -> String {
        self.raw(name).unwrap_or_else(|| default.to_string())
    }

    /// Fails on any argument that no evaluator asked for.
    pub fn finish(&self, function: &str) -> Result<(), CliError> {
        let unused: Vec<_> = self.map.keys().filter(|k| !self.used.contains(*k)).map(|k| format!("--{k}")).collect();
        if unused.is_empty() {
            Ok(())
        } else {
            Err(CliError::Usage(format!("{function} does not take {}", unused.join(", "))))
        }
    }
}

fn missing(name: &str) -> CliError {
    CliError::Usage(format!("missing --{name}"))
}

pub fn parse_c64(name: &str, s: &str) -> Result<C64, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.replace('j', "i");
    C64::from_str(&t).map_err(|_| CliError::Usage(format!("--{name}: '{s}' is not a number")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn pairs_and_equals() {
        let mut a = NamedArgs::parse(&toks("--a 1 --b=2.5 --z -0.5+0.25i")).unwrap();
        assert_eq!(a.c64("a").unwrap(), C64::new(1.0, 0.0));
        assert_eq!(a.c64("b").unwrap(), C64::new(2.5, 0.0));
        assert_eq!(a.c64("z").unwrap(), C64::new(-0.5, 0.25));
        a.finish("f").unwrap();
    }

    #[test]
    fn leftovers_and_duplicates_are_errors() {
        let mut a = NamedArgs::parse(&toks("--a 1 --bogus 2")).unwrap();
        a.c64("a").unwrap();
        assert!(a.finish("f").unwrap_err().to_string().contains("--bogus"));
        assert!(NamedArgs::parse(&toks("--a 1 --a 2")).is_err());
        assert!(NamedArgs::parse(&toks("--a")).is_err());
        assert!(NamedArgs::parse(&toks("a 1")).is_err());
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_c64("x", "1e-3").unwrap(), C64::new(1e-3, 0.0));
        assert_eq!(parse_c64("x", "2j").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(parse_c64("x", "0.1 - 0.2i").unwrap(), C64::new(0.1, -0.2));
        assert!(parse_c64("x", "abc").is_err());
        let mut a = NamedArgs::parse(&toks("--u 1,2,0.5i")).unwrap();
        assert_eq!(a.list("u").unwrap().len(), 3);
        assert!(a.list("missing").unwrap().is_empty());
    }
}
