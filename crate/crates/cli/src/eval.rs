//! `eval`: one function at one point.

use crate::args::{Format, NamedArgs};
use crate::error::CliError;
use saranfk::hyper::{appell_f2, fk_l, gauss_2f1, in_domain_fk, phi_pfq, saran_fk_reexpand, saran_fk_triple, FkParams, SeriesResult};
use saranfk::measures::{integrate_measure, MeasureSpec};
use saranfk::numerics::{q_beta, q_gamma, QContext};
use saranfk::qkernels::{phi3, phi_k_q, q_moment, rphis, Phi3Spec, QMeasureSpec};
use saranfk::registry::EvalSettings;
use saranfk::{Error, C64};
use serde::Serialize;
use std::fmt::Write as _;

pub const FUNCTIONS: [&str; 12] = [
    "2f1", "pfq", "f2", "fk", "fk_L", "phik", "rphis", "phi3", "qgamma", "qbeta", "measure-moment", "q-moment",
];

const FK_NAMES: [&str; 7] = ["alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "gamma3"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalOutput {
    pub function: String,
    pub value: Complex,
    pub terms_used: usize,
    pub converged: bool,
    pub est_trunc_error: f64,
}

impl EvalOutput {
    fn new(function: &str, r: SeriesResult) -> Self {
        Self {
            function: function.to_string(),
            value: Complex { re: r.value.re, im: r.value.im },
            terms_used: r.terms_used,
            converged: r.converged,
            est_trunc_error: r.est_trunc_error,
        }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        Ok(match format {
            Format::Json => serde_json::to_string(self)? + "\n",
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.serialize((
                    &self.function,
                    self.value.re,
                    self.value.im,
                    self.terms_used,
                    self.converged,
                    self.est_trunc_error,
                ))?;
                let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).unwrap_or_default();
                format!("function,re,im,terms_used,converged,est_trunc_error\n{body}")
            }
            Format::Human => {
                let mut s = String::new();
                let _ = writeln!(s, "value: {}", fmt_c64(C64::new(self.value.re, self.value.im)));
                let _ = writeln!(s, "terms_used: {}", self.terms_used);
                let _ = writeln!(s, "converged: {}", self.converged);
                let _ = writeln!(s, "est_trunc_error: {:.3e}", self.est_trunc_error);
                s
            }
        })
    }
}

pub fn fmt_c64(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn fk_params(a: &mut NamedArgs) -> Result<FkParams, CliError> {
    let [a1, a2, b1, b2, g1, g2, g3] = a.c64s(FK_NAMES)?;
    Ok(FkParams::new(a1, a2, b1, b2, g1, g2, g3)?)
}

fn ctx(a: &mut NamedArgs) -> Result<QContext, CliError> {
    Ok(QContext::new(a.f64_or("q", 0.5)?)?)
}

fn exact(v: C64, terms: usize) -> SeriesResult {
    SeriesResult::exact(v, terms)
}

/// Evaluates `function` with the named arguments in `a`.
pub fn evaluate(function: &str, a: &mut NamedArgs, settings: &EvalSettings) -> Result<EvalOutput, CliError> {
    let tol = a.f64_or("tol", 1e-15)?;
    let r = match function {
        "2f1" => {
            let [x, y, c, z] = a.c64s(["a", "b", "c", "z"])?;
            gauss_2f1(x, y, c, z, tol)?
        }
        "pfq" => {
            let (up, lo, z) = (a.list("upper")?, a.list("lower")?, a.c64("z")?);
            phi_pfq(&up, &lo, z, tol)?
        }
        "f2" => {
            let [x, b1, b2, c1, c2, u, v] = a.c64s(["a", "b1", "b2", "c1", "c2", "x", "y"])?;
            appell_f2(x, b1, b2, c1, c2, u, v, tol)?
        }
        "fk" => {
            // the domain is checked before the parameters so that the
            // message names the violated precondition
            let [x, y, z] = a.c64s(["x", "y", "z"])?;
            if !in_domain_fk(x, y, z) {
                return Err(Error::Domain(format!(
                    "(x, y, z) = ({}, {}, {}) outside D_K: need |x|, |y| < 1 and |z| < (1−|x|)(1−|y|)",
                    fmt_c64(x),
                    fmt_c64(y),
                    fmt_c64(z)
                ))
                .into());
            }
            let p = fk_params(a)?;
            match a.string_or("form", "reexpand").as_str() {
                "reexpand" => saran_fk_reexpand(&p, x, y, z, tol)?,
                "triple" => saran_fk_triple(&p, x, y, z, tol)?,
                other => return Err(CliError::Usage(format!("--form must be reexpand or triple, got '{other}'"))),
            }
        }
        "fk_L" => {
            let [a1, a2] = a.c64s(["a1", "a2"])?;
            let (b, c, z) = (a.list("b")?, a.list("c")?, a.list("z")?);
            fk_l(a1, a2, &b, &c, &z, tol)?
        }
        "phik" => {
            let ctx = ctx(a)?;
            let [x, y, z] = a.c64s(["x", "y", "z"])?;
            let p = fk_params(a)?;
            phi_k_q(&p, x, y, z, &ctx, tol)?
        }
        "rphis" => {
            let ctx = ctx(a)?;
            let (up, lo, z) = (a.list("upper")?, a.list("lower")?, a.c64("z")?);
            rphis(&up, &lo, z, &ctx, tol)?
        }
        "phi3" => {
            let ctx = ctx(a)?;
            let spec = Phi3Spec {
                a: a.list("a")?,
                b: a.list("b")?,
                bp: a.list("bp")?,
                bpp: a.list("bpp")?,
                c: a.list("c")?,
                cp: a.list("cp")?,
                cpp: a.list("cpp")?,
                e: a.list("e")?,
                g: a.list("g")?,
                gp: a.list("gp")?,
                gpp: a.list("gpp")?,
                h: a.list("h")?,
                hp: a.list("hp")?,
                hpp: a.list("hpp")?,
            };
            let [x, y, z] = a.c64s(["x", "y", "z"])?;
            phi3(&spec, x, y, z, &ctx, tol)?
        }
        "qgamma" => {
            let ctx = ctx(a)?;
            exact(q_gamma(a.c64("x")?, &ctx)?, ctx.inf_product_terms())
        }
        "qbeta" => {
            let ctx = ctx(a)?;
            let [x, y] = a.c64s(["x", "y"])?;
            exact(q_beta(x, y, &ctx)?, ctx.inf_product_terms())
        }
        "measure-moment" => {
            let ell = a.usize("ell")?;
            let spec = match a.string_or("measure", "dirichlet").as_str() {
                "dirichlet" => {
                    let [al, be] = a.c64s(["alpha", "beta"])?;
                    MeasureSpec::dirichlet(al, be)?
                }
                "hypergeometric" => {
                    let [al, be, ga, et] = a.c64s(["alpha", "beta", "gamma", "eta"])?;
                    MeasureSpec::hypergeometric(al, be, ga, et)?
                }
                other => {
                    return Err(CliError::Usage(format!("--measure must be dirichlet or hypergeometric, got '{other}'")))
                }
            };
            let v = integrate_measure(|t| Ok(C64::new(t.powi(ell as i32), 0.0)), &spec, settings.order)?;
            exact(v, settings.order)
        }
        "q-moment" => {
            let ctx = ctx(a)?;
            let ell = a.usize("ell")?;
            let spec = match a.string_or("measure", "moments").as_str() {
                "dirichlet" => {
                    let [al, be] = a.c64s(["alpha", "beta"])?;
                    QMeasureSpec::dirichlet(al, be, ctx)?
                }
                "hypergeometric" => {
                    let [al, be, ga, et] = a.c64s(["alpha", "beta", "gamma", "eta"])?;
                    QMeasureSpec::hypergeometric(al, be, ga, et, ctx)?
                }
                "moments" => {
                    let [nu, la, ga, et] = a.c64s(["nu", "lambda", "gamma", "eta"])?;
                    QMeasureSpec::with_moments(nu, la, ga, et, ctx)?
                }
                other => {
                    return Err(CliError::Usage(format!(
                        "--measure must be dirichlet, hypergeometric or moments, got '{other}'"
                    )))
                }
            };
            exact(q_moment(&spec, ell)?, ell)
        }
        other => {
            return Err(CliError::Usage(format!("unknown function '{other}'; expected one of {}", FUNCTIONS.join(", "))))
        }
    };
    a.finish(function)?;
    Ok(EvalOutput::new(function, r))
}
