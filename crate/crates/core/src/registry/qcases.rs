//! q-analogues, checked with Jackson sums over the lattice {qⁿ}.
//!
//! Right-hand sides with several lattice integrals are expanded in powers
//! of the last argument, so that each axis becomes a one-dimensional
//! lattice sum per power.

use super::classical::{fk_point, FK_PARAMS};
use super::sampler::Draw;
use super::{vals, CostClass, EvalSettings, IdentityCase, ParameterPoint};
use crate::error::{Error, Result};
use crate::hyper::{Accumulator, FkParams};
use crate::measures::DiscreteMeasure;
use crate::numerics::{q_pochhammer, q_pochhammer_inf_ratio, QContext, C64};
use crate::qkernels::{
    discrete_weight_limit, lattice_3phi2_at, lattice_index, phi_k_q_reexpand, phi_k_q_triple, rphis, rphis_tilde,
    DiscreteWeightParams, QErdelyiParams, QMeasureSpec, WeightKind,
};

const MAX_P: usize = 5_000;
const ARG_RADIUS: f64 = 0.3;
// leading lattice exponents below this make the sums very long
const LEAD_MARGIN: f64 = 0.1;
const MARGIN: f64 = 0.05;
const MARGIN_NOTE: &str = "numerical margin: leading exponents at least 0.1, others at least 0.05";
const MIN_WEIGHT_POINTS: usize = 40;
const MAX_WEIGHT_POINTS: usize = 1_000_000;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn qp(e: C64, n: usize, c: &QContext) -> C64 {
    q_pochhammer(c.pow(e), n, c)
}

fn qq(n: usize, c: &QContext) -> C64 {
    q_pochhammer(C64::new(c.q(), 0.0), n, c)
}

fn tphi(upper: &[C64], lower: &[C64], z: C64, c: &QContext, s: &EvalSettings) -> Result<C64> {
    Ok(rphis_tilde(upper, lower, z, c, s.series_tol)?.value)
}

fn qdir(a: C64, b: C64, s: &EvalSettings) -> Result<DiscreteMeasure> {
    s.lattice(&QMeasureSpec::dirichlet(a, b, s.ctx()?)?)
}

fn qmom(nu: C64, l: C64, g: C64, e: C64, s: &EvalSettings) -> Result<DiscreteMeasure> {
    s.lattice(&QMeasureSpec::with_moments(nu, l, g, e, s.ctx()?)?)
}

fn fk(p: &ParameterPoint, names: [&str; 7]) -> Result<FkParams> {
    let [a1, a2, b1, b2, g1, g2, g3] = vals(p, names)?;
    FkParams::new(a1, a2, b1, b2, g1, g2, g3)
}

fn phik_lhs(fp: &FkParams, p: &ParameterPoint, s: &EvalSettings) -> Result<C64> {
    let (x, y, z) = (p.argument("x")?, p.argument("y")?, p.argument("z")?);
    Ok(phi_k_q_reexpand(fp, x, y, z, &s.ctx()?, s.series_tol)?.value)
}

/// Σ_p term(p) zᵖ Σᵢ ωᵢ tᵢᵖ over the measure `w` (unit mass at 1 when absent).
fn moment_series(
    z: C64,
    w: Option<&DiscreteMeasure>,
    tol: f64,
    mut term: impl FnMut(usize) -> Result<C64>,
) -> Result<C64> {
    let mut pw = w.map_or_else(|| vec![one()], |m| m.weights.clone());
    let nodes = w.map_or_else(|| vec![1.0], |m| m.nodes.clone());
    if z == C64::new(0.0, 0.0) {
        return Ok(term(0)? * pw.iter().sum::<C64>());
    }
    let mut acc = Accumulator::new(tol);
    let mut zp = one();
    for p in 0..MAX_P {
        let m: C64 = pw.iter().sum();
        let t = term(p)? * zp * m;
        acc.push(t, t.norm());
        if acc.done() {
            return Ok(acc.result().value);
        }
        for (a, &t) in pw.iter_mut().zip(&nodes) {
            *a *= t;
        }
        zp *= z;
    }
    Err(Error::NonConvergent(format!("power series in the last argument did not settle after {MAX_P} terms")))
}

fn draw_q(rng: &mut rand_chacha::ChaCha8Rng, names: &[&str], args: &[&str]) -> ParameterPoint {
    let mut d = Draw::new(rng);
    for n in names {
        d.param(n);
    }
    for a in args {
        d.disc(a, ARG_RADIUS);
    }
    d.finish()
}

pub(super) fn cases() -> Vec<IdentityCase> {
    vec![
        gasper_q_erdelyi_1(),
        gasper_q_erdelyi_3(),
        ernst_q_bateman(),
        joshi_vyas(),
        qfk_phi3(),
        qfk_phi3_x0(),
        qfk_lr(),
        qfk_erdelyi(),
        qfk_erdelyi_simplified(),
        fk_discrete_limits(),
        phik_cross_form(),
    ]
}

// ---------------------------------------------------------------------------
// ₂φ₁

const QE1: [&str; 5] = ["alpha", "alpha_p", "beta", "gamma", "lambda"];

fn q21_lhs(p: &ParameterPoint, s: &EvalSettings) -> Result<C64> {
    let [a, b, g] = vals(p, ["alpha", "beta", "gamma"])?;
    tphi(&[a, b], &[g], p.argument("x")?, &s.ctx()?, s)
}

fn gasper_q_erdelyi_1() -> IdentityCase {
    IdentityCase::new(
        "gasper-q-erdelyi-1",
        "q-Erdélyi integral I",
        CostClass::QLattice,
        |rng, _| draw_q(rng, &QE1, &["x"]),
        q21_lhs,
        |p, s| {
            let [a, ap, b, g, l] = vals(p, QE1)?;
            let x = p.argument("x")?;
            let c = s.ctx()?;
            let m = qdir(l, g - l, s)?;
            let mut sum = C64::new(0.0, 0.0);
            for (i, (&t, &w)) in m.nodes.iter().zip(&m.weights).enumerate() {
                let xt = x * t;
                let xs = xt * c.pow(ap);
                let pre = q_pochhammer_inf_ratio(&[xs], &[xt], &c)?;
                sum += w * pre * tphi(&[a - ap, b], &[l], xs, &c, s)? * lattice_3phi2_at(ap, b - l, g - l, i, x, &c)?;
            }
            Ok(sum)
        },
    )
    .q_dependent()
    .constraint("Re(γ) > Re(λ) > 0", |p| p.re("gamma") > p.re("lambda") && p.re("lambda") > 0.0)
    .constraint(MARGIN_NOTE, |p| p.re("lambda") >= LEAD_MARGIN && p.re("gamma") - p.re("lambda") >= MARGIN)
}

const QE3: [&str; 6] = ["alpha", "beta", "gamma", "eta", "lambda", "nu"];

fn gasper_q_erdelyi_3() -> IdentityCase {
    IdentityCase::new(
        "gasper-q-erdelyi-3",
        "q-Erdélyi integral III (q-hypergeometric measure)",
        CostClass::QLattice,
        |rng, _| draw_q(rng, &QE3, &["x"]),
        q21_lhs,
        |p, s| {
            let [a, b, g, e, l, n] = vals(p, QE3)?;
            let x = p.argument("x")?;
            let c = s.ctx()?;
            qmom(n, l, g, e, s)?.integrate(|t| tphi(&[a, b, e], &[l, n], x * t, &c, s))
        },
    )
    .q_dependent()
    .constraint("min Re(λ, ν, γ+η−λ−ν) > 0", |p| moment_ok(p, "nu", "lambda", "gamma", "eta", 0.0, 0.0))
    .constraint(MARGIN_NOTE, |p| moment_ok(p, "nu", "lambda", "gamma", "eta", LEAD_MARGIN, MARGIN))
}

// Re ν ≥ lead, Re λ ≥ other, Re(γ+η−λ−ν) ≥ other, strict when both are zero
fn moment_ok(p: &ParameterPoint, nu: &str, l: &str, g: &str, e: &str, lead: f64, other: f64) -> bool {
    let (n, l, g, e) = (p.re(nu), p.re(l), p.re(g), p.re(e));
    let s = g + e - l - n;
    if lead == 0.0 && other == 0.0 {
        n > 0.0 && l > 0.0 && s > 0.0
    } else {
        n >= lead && l >= other && s >= other
    }
}

// Re γ > Re ν > 0 with margins
fn dir_ok(p: &ParameterPoint, nu: &str, g: &str, margins: bool) -> bool {
    let (n, g) = (p.re(nu), p.re(g));
    if margins {
        n >= LEAD_MARGIN && g - n >= MARGIN
    } else {
        g > n && n > 0.0
    }
}

// ---------------------------------------------------------------------------
// moment integrals of power series with product weights

const JV: [&str; 16] = [
    "a", "c1", "c2", "c3", "nu1", "nu2", "nu3", "lambda1", "lambda2", "lambda3", "gamma1", "gamma2", "gamma3", "eta1",
    "eta2", "eta3",
];
const JV_VARIANTS: usize = 5;
const MAX_SHELL: usize = 400;

/// Σ over n ∈ ℕᵏ of (q^a;q)_{|n|}/Π(q;q)_{nⱼ} · Π tabⱼ(nⱼ) zⱼ^{nⱼ}, by shells |n| = N.
fn hyper_shells(a: C64, tabs: &[Vec<C64>], zs: &[C64], c: &QContext, tol: f64) -> Result<C64> {
    let k = zs.len();
    let coef = |j: usize, n: usize| tabs[j][n] * zs[j].powu(n as u32) / qq(n, c);
    let mut acc = Accumulator::new(tol);
    for big_n in 0..MAX_SHELL {
        let mut shell = C64::new(0.0, 0.0);
        let mut abs = 0.0;
        let mut add = |t: C64| {
            shell += t;
            abs += t.norm();
        };
        match k {
            1 => add(coef(0, big_n)),
            2 => (0..=big_n).for_each(|m| add(coef(0, m) * coef(1, big_n - m))),
            _ => {
                for m in 0..=big_n {
                    for n in 0..=big_n - m {
                        add(coef(0, m) * coef(1, n) * coef(2, big_n - m - n));
                    }
                }
            }
        }
        let t = qp(a, big_n, c) * shell;
        acc.push(t, abs * qp(a, big_n, c).norm());
        if acc.done() {
            return Ok(acc.result().value);
        }
    }
    Err(Error::NonConvergent(format!("shell sum did not settle after {MAX_SHELL} shells")))
}

/// Σ_{|n| ≤ 3} 3!/(n₁!⋯n_k!(3−|n|)!) Π (cⱼzⱼ)^{nⱼ} tabⱼ(nⱼ), the moment image of (1 + Σ cⱼzⱼtⱼ)³.
fn cubic(cs: &[C64], tabs: &[Vec<C64>], zs: &[C64]) -> C64 {
    let fact = [1.0, 1.0, 2.0, 6.0];
    let k = zs.len();
    let mut s = C64::new(0.0, 0.0);
    for n0 in 0..=3usize {
        for n1 in 0..=3 - n0 {
            for n2 in 0..=3 - n0 - n1 {
                let n = [n0, n1, n2];
                if n[k..].iter().any(|&v| v > 0) {
                    continue;
                }
                let mut t = C64::new(6.0 / (fact[n0] * fact[n1] * fact[n2] * fact[3 - n0 - n1 - n2]), 0.0);
                for j in 0..k {
                    t *= (cs[j] * zs[j]).powu(n[j] as u32) * tabs[j][n[j]];
                }
                s += t;
            }
        }
    }
    s
}

fn joshi_vyas() -> IdentityCase {
    IdentityCase::new(
        "joshi-vyas-general",
        "Theorem 4.1: Joshi–Vyas type moment integral",
        CostClass::QLattice,
        |rng, idx| {
            let mut p = draw_q(rng, &JV, &["z1", "z2", "z3"]);
            p.values.insert("variant".into(), C64::new((idx % JV_VARIANTS) as f64, 0.0));
            p
        },
        |p, s| joshi_vyas_side(p, s, false),
        |p, s| joshi_vyas_side(p, s, true),
    )
    .q_dependent()
    .constraint("min Re(γj+ηj−λj−νj, λj, νj) > 0", |p| phi3_axes_ok(p, &[1, 2, 3], false))
    .constraint(MARGIN_NOTE, |p| phi3_axes_ok(p, &[1, 2, 3], true))
}

// Variants: 0 one variable, (q^a z;q)_∞/(z;q)_∞; 1 two variables, cubic;
// 2 two variables, Σ (q^a)_{m+n}/((q)_m(q)_n) z₁^m z₂^n; 3 and 4 the same
// with three variables. The right side integrates against the lattice
// measures, the left side uses the closed-form moments
// (q^ν,q^λ;q)_n/(q^γ,q^η;q)_n.
fn joshi_vyas_side(p: &ParameterPoint, s: &EvalSettings, rhs: bool) -> Result<C64> {
    let [a, c1, c2, c3, n1, n2, n3, l1, l2, l3, g1, g2, g3, e1, e2, e3] = vals(p, JV)?;
    let variant = p.value("variant")?.re as usize;
    let zs = [p.argument("z1")?, p.argument("z2")?, p.argument("z3")?];
    let cs = [c1, c2, c3];
    let axes = [(n1, l1, g1, e1), (n2, l2, g2, e2), (n3, l3, g3, e3)];
    let c = s.ctx()?;
    let k = match variant {
        0 => 1,
        1 | 2 => 2,
        _ => 3,
    };
    let qa = c.pow(a);
    if !rhs {
        let tabs: Vec<Vec<C64>> = axes[..k]
            .iter()
            .map(|&(nu, l, g, e)| {
                (0..MAX_SHELL).map(|n| qp(nu, n, &c) * qp(l, n, &c) / (qp(g, n, &c) * qp(e, n, &c))).collect()
            })
            .collect();
        return match variant {
            0 => tphi(&[a, n1, l1], &[g1, e1], zs[0], &c, s),
            1 | 3 => Ok(cubic(&cs[..k], &tabs, &zs[..k])),
            _ => hyper_shells(a, &tabs, &zs[..k], &c, s.series_tol),
        };
    }
    let ms = axes[..k].iter().map(|&(nu, l, g, e)| qmom(nu, l, g, e, s)).collect::<Result<Vec<_>>>()?;
    match variant {
        0 => ms[0].integrate(|t| {
            let zt = zs[0] * t;
            q_pochhammer_inf_ratio(&[qa * zt], &[zt], &c)
        }),
        1 => ms[0].integrate(|t1| ms[1].integrate(|t2| Ok((one() + c1 * zs[0] * t1 + c2 * zs[1] * t2).powu(3)))),
        2 => ms[0].integrate(|t1| {
            ms[1].integrate(|t2| {
                let (x1, x2) = (zs[0] * t1, zs[1] * t2);
                let low = qa * x2;
                let pre = q_pochhammer_inf_ratio(&[low], &[x2], &c)?;
                Ok(pre * rphis(&[qa, C64::new(0.0, 0.0)], &[low], x1, &c, s.series_tol)?.value)
            })
        }),
        _ => {
            // lattice moments Σ ω tⁿ
            let tabs: Vec<Vec<C64>> = ms
                .iter()
                .map(|m| {
                    let mut pw = m.weights.clone();
                    (0..MAX_SHELL)
                        .map(|_| {
                            let v: C64 = pw.iter().sum();
                            for (w, &t) in pw.iter_mut().zip(&m.nodes) {
                                *w *= t;
                            }
                            v
                        })
                        .collect()
                })
                .collect();
            if variant == 3 {
                Ok(cubic(&cs, &tabs, &zs))
            } else {
                hyper_shells(a, &tabs, &zs, &c, s.series_tol)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Φ̃_K

const BATEMAN: [&str; 10] =
    ["alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "gamma3", "nu1", "nu2", "nu3"];

/// Axis sums Σ_t ω(t) f_p(t) for p = 0, 1, … computed on demand.
struct Axis<'a> {
    m: DiscreteMeasure,
    f: Box<dyn FnMut(usize, f64) -> Result<C64> + 'a>,
}

impl Axis<'_> {
    fn at(&mut self, p: usize) -> Result<C64> {
        let mut s = C64::new(0.0, 0.0);
        for (&t, &w) in self.m.nodes.iter().zip(&self.m.weights) {
            s += w * (self.f)(p, t)?;
        }
        Ok(s)
    }
}

fn ernst_q_bateman() -> IdentityCase {
    IdentityCase::new(
        "ernst-q-bateman",
        "Bateman-type q-integral for Φ_K",
        CostClass::QLattice,
        |rng, _| draw_q(rng, &BATEMAN, &["x", "y", "z"]),
        |p, s| phik_lhs(&fk(p, FK_PARAMS)?, p, s),
        |p, s| {
            let [a1, a2, b1, b2, g1, g2, g3, n1, n2, n3] = vals(p, BATEMAN)?;
            let (x, y, z) = (p.argument("x")?, p.argument("y")?, p.argument("z")?);
            let c = s.ctx()?;
            let mut u = Axis {
                m: qdir(n1, g1 - n1, s)?,
                f: Box::new(move |k, t| tphi(&[b1 + k as f64, a1], &[n1], x * t, &c, s)),
            };
            let mut v = Axis {
                m: qdir(n2, g2 - n2, s)?,
                f: Box::new(move |k, t| tphi(&[a2 + k as f64, b2], &[n2], y * t, &c, s)),
            };
            let w = qdir(n3, g3 - n3, s)?;
            moment_series(z, Some(&w), s.series_tol, |k| {
                let cp = qp(a2, k, &c) * qp(b1, k, &c) / (qp(n3, k, &c) * qq(k, &c));
                Ok(cp * u.at(k)? * v.at(k)?)
            })
        },
    )
    .q_dependent()
    .constraint("Re(γj) > Re(νj) > 0", |p| {
        (1..=3).all(|j| dir_ok(p, &format!("nu{j}"), &format!("gamma{j}"), false))
    })
    .constraint(MARGIN_NOTE, |p| (1..=3).all(|j| dir_ok(p, &format!("nu{j}"), &format!("gamma{j}"), true)))
}

const PHI3: [&str; 16] = [
    "alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "gamma3", "eta1", "eta2", "eta3", "lambda1", "lambda2",
    "lambda3", "nu1", "nu2", "nu3",
];

fn phi3_axes_ok(p: &ParameterPoint, axes: &[usize], margins: bool) -> bool {
    axes.iter().all(|j| {
        let [n, l, g, e] = [format!("nu{j}"), format!("lambda{j}"), format!("gamma{j}"), format!("eta{j}")];
        if margins {
            moment_ok(p, &n, &l, &g, &e, LEAD_MARGIN, MARGIN)
        } else {
            moment_ok(p, &n, &l, &g, &e, 0.0, 0.0)
        }
    })
}

fn qfk_phi3_rhs(p: &ParameterPoint, s: &EvalSettings, with_x: bool) -> Result<C64> {
    let [a1, a2, b1, b2, g1, g2, g3, e1, e2, e3, l1, l2, l3, n1, n2, n3] = vals(p, PHI3)?;
    let (y, z) = (p.argument("y")?, p.argument("z")?);
    let c = s.ctx()?;
    let mut u = if with_x {
        let x = p.argument("x")?;
        Some(Axis {
            m: qmom(n1, l1, g1, e1, s)?,
            f: Box::new(move |k, t| tphi(&[b1 + k as f64, a1, e1], &[n1, l1], x * t, &c, s)),
        })
    } else {
        None
    };
    let mut v = Axis {
        m: qmom(n2, l2, g2, e2, s)?,
        f: Box::new(move |k, t| tphi(&[a2 + k as f64, b2, e2], &[n2, l2], y * t, &c, s)),
    };
    let w = qmom(n3, l3, g3, e3, s)?;
    moment_series(z, Some(&w), s.series_tol, |k| {
        let cp = qp(a2, k, &c) * qp(b1, k, &c) * qp(e3, k, &c) / (qp(n3, k, &c) * qp(l3, k, &c) * qq(k, &c));
        let uk = match u.as_mut() {
            Some(u) => u.at(k)?,
            None => one(),
        };
        Ok(cp * uk * v.at(k)?)
    })
}

fn qfk_phi3() -> IdentityCase {
    IdentityCase::new(
        "qfk-phi3",
        "Corollary 4.2: Φ_K as a φ^(3) q-integral",
        CostClass::QLattice,
        |rng, _| draw_q(rng, &PHI3, &["x", "y", "z"]),
        |p, s| phik_lhs(&fk(p, FK_PARAMS)?, p, s),
        |p, s| qfk_phi3_rhs(p, s, true),
    )
    .q_dependent()
    .constraint("min Re(γj+ηj−λj−νj, λj, νj) > 0", |p| phi3_axes_ok(p, &[1, 2, 3], false))
    .constraint(MARGIN_NOTE, |p| phi3_axes_ok(p, &[1, 2, 3], true))
}

fn qfk_phi3_x0() -> IdentityCase {
    IdentityCase::new(
        "qfk-phi3-x0",
        "Corollary 4.2 at x = 0 (q-Koschmieder)",
        CostClass::QLattice,
        |rng, _| {
            let mut p = draw_q(rng, &PHI3, &["y", "z"]);
            p.arguments.insert("x".into(), C64::new(0.0, 0.0));
            p
        },
        |p, s| phik_lhs(&fk(p, FK_PARAMS)?, p, s),
        |p, s| qfk_phi3_rhs(p, s, false),
    )
    .q_dependent()
    .constraint("min Re(γj+ηj−λj−νj, λj, νj) > 0 for j = 2, 3", |p| phi3_axes_ok(p, &[2, 3], false))
    .constraint(MARGIN_NOTE, |p| phi3_axes_ok(p, &[2, 3], true))
}

const LR: [&str; 12] = [
    "alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "gamma3", "eta1", "eta2", "nu1", "nu2", "nu3",
];

fn qfk_lr() -> IdentityCase {
    IdentityCase::new(
        "qfk-lr",
        "Corollary 4.3",
        CostClass::QLattice,
        |rng, _| draw_q(rng, &LR, &["x", "y", "z"]),
        |p, s| phik_lhs(&fk(p, FK_PARAMS)?, p, s),
        |p, s| {
            let [a1, a2, b1, b2, g1, g2, g3, e1, e2, n1, n2, n3] = vals(p, LR)?;
            let (x, y, z) = (p.argument("x")?, p.argument("y")?, p.argument("z")?);
            let c = s.ctx()?;
            let mut u = Axis {
                m: qmom(n1, a1, g1, e1, s)?,
                f: Box::new(move |k, t| tphi(&[b1 + k as f64, e1], &[n1], x * t, &c, s)),
            };
            let mut v = Axis {
                m: qmom(n2, b2, g2, e2, s)?,
                f: Box::new(move |k, t| tphi(&[a2 + k as f64, e2], &[n2], y * t, &c, s)),
            };
            let w = qdir(n3, g3 - n3, s)?;
            moment_series(z, Some(&w), s.series_tol, |k| {
                let cp = qp(a2, k, &c) * qp(b1, k, &c) / (qp(n3, k, &c) * qq(k, &c));
                Ok(cp * u.at(k)? * v.at(k)?)
            })
        },
    )
    .q_dependent()
    .constraint("min Re(γ1+η1−α1−ν1, α1, ν1) > 0, min Re(γ2+η2−β2−ν2, β2, ν2) > 0, Re γ3 > Re ν3 > 0", |p| {
        moment_ok(p, "nu1", "alpha1", "gamma1", "eta1", 0.0, 0.0)
            && moment_ok(p, "nu2", "beta2", "gamma2", "eta2", 0.0, 0.0)
            && dir_ok(p, "nu3", "gamma3", false)
    })
    .constraint(MARGIN_NOTE, |p| {
        moment_ok(p, "nu1", "alpha1", "gamma1", "eta1", LEAD_MARGIN, MARGIN)
            && moment_ok(p, "nu2", "beta2", "gamma2", "eta2", LEAD_MARGIN, MARGIN)
            && dir_ok(p, "nu3", "gamma3", true)
    })
}

// ---------------------------------------------------------------------------
// q-Erdélyi integral for Φ̃_K

const QFK: [&str; 11] = [
    "alpha1", "alpha2", "beta1", "beta2", "eta1", "eta2", "mu2", "lambda1", "lambda2", "lambda3", "gamma3",
];

fn qerdelyi_params(p: &ParameterPoint) -> Result<QErdelyiParams> {
    let [alpha1, alpha2, beta1, beta2, eta1, eta2, mu2, lambda1, lambda2, lambda3, gamma3] = vals(p, QFK)?;
    Ok(QErdelyiParams { alpha1, alpha2, beta1, beta2, eta1, eta2, mu2, lambda1, lambda2, lambda3, gamma3 })
}

/// One axis of the q-Erdélyi kernel: for each shift k the lattice factors
/// ω (tx q^{s+k};q)_∞/(tx;q)_∞ · ₃φ₂(q^{s+k}, q^b, t⁻¹; q^c, q/(tx); q, q)
/// and arguments tx q^{s+k}, reused across ℓ in
/// Σ_t factor · ₂φ̃₁(a₀+ℓ, a₁; d; tx q^{s+k}).
struct ShiftAxis {
    m: DiscreteMeasure,
    idx: Vec<usize>,
    x: C64,
    shift: C64,
    b: C64,
    c: C64,
    a0: C64,
    a1: C64,
    d: C64,
    rows: Vec<Vec<(C64, C64)>>,
}

impl ShiftAxis {
    #[allow(clippy::too_many_arguments)]
    fn new(m: DiscreteMeasure, x: C64, shift: C64, b: C64, c: C64, a0: C64, a1: C64, d: C64, q: f64) -> Result<Self> {
        let idx = m.nodes.iter().map(|&t| lattice_index(t, q)).collect::<Result<Vec<_>>>()?;
        Ok(Self { m, idx, x, shift, b, c, a0, a1, d, rows: Vec::new() })
    }

    fn row(&mut self, k: usize, ctx: &QContext) -> Result<&[(C64, C64)]> {
        while self.rows.len() <= k {
            let kk = self.rows.len();
            let e = self.shift + kk as f64;
            let qe = ctx.pow(e);
            let mut row = Vec::with_capacity(self.m.len());
            for ((&t, &w), &n) in self.m.nodes.iter().zip(&self.m.weights).zip(&self.idx) {
                let tx = self.x * t;
                let arg = tx * qe;
                let f = w * q_pochhammer_inf_ratio(&[arg], &[tx], ctx)? * lattice_3phi2_at(e, self.b, self.c, n, self.x, ctx)?;
                row.push((f, arg));
            }
            self.rows.push(row);
        }
        Ok(&self.rows[k])
    }

    fn at(&mut self, k: usize, l: usize, ctx: &QContext, tol: f64) -> Result<C64> {
        let (a0, a1, d) = (self.a0 + l as f64, self.a1, self.d);
        let mut s = C64::new(0.0, 0.0);
        for &(f, arg) in self.row(k, ctx)? {
            s += f * rphis_tilde(&[a0, a1], &[d], arg, ctx, tol)?.value;
        }
        Ok(s)
    }
}

/// Right-hand side of the q-Erdélyi integral for Φ̃_K with the u, v and w
/// integrals replaced by the given lattice measures.
#[allow(clippy::too_many_arguments)]
fn qfk_erdelyi_separable(
    p: &QErdelyiParams,
    x: C64,
    y: C64,
    z: C64,
    um: DiscreteMeasure,
    vm: DiscreteMeasure,
    wm: &DiscreteMeasure,
    ctx: &QContext,
    tol: f64,
) -> Result<C64> {
    let q = ctx.q();
    let mut u = ShiftAxis::new(
        um,
        x,
        p.lambda3,
        p.lambda1 - p.eta1,
        p.lambda1,
        p.beta1 - p.lambda3,
        p.alpha1,
        p.alpha1 - p.lambda1 + p.eta1,
        q,
    )?;
    let mut v = ShiftAxis::new(
        vm,
        y,
        p.eta2,
        p.lambda2 - p.mu2,
        p.lambda2,
        p.alpha2 - p.eta2,
        p.beta2,
        p.beta2 - p.lambda2 + p.mu2,
        q,
    )?;
    let d = p.alpha2 - p.eta2;
    let a = |k: usize| qp(p.eta2, k, ctx) / qq(k, ctx) * ctx.pow(d * k as f64);
    let b = |l: usize| qp(d, l, ctx) / qq(l, ctx);
    moment_series(z, Some(wm), tol, |s| {
        let mut shell = C64::new(0.0, 0.0);
        for k in 0..=s {
            let l = s - k;
            shell += a(k) * b(l) * u.at(k, l, ctx, tol)? * v.at(k, l, ctx, tol)?;
        }
        Ok(shell)
    })
}

fn qfk_erdelyi() -> IdentityCase {
    IdentityCase::new(
        "qfk-erdelyi",
        "Theorem 4.6: q-Erdélyi integral for Φ_K",
        CostClass::QLattice,
        |rng, _| draw_q(rng, &QFK, &["x", "y", "z"]),
        |p, s| phik_lhs(&qerdelyi_params(p)?.outer_fk()?, p, s),
        |p, s| {
            let qe = qerdelyi_params(p)?;
            let c = s.ctx()?;
            let um = qdir(qe.alpha1 - qe.lambda1 + qe.eta1, qe.lambda1, s)?;
            let vm = qdir(qe.beta2 - qe.lambda2 + qe.mu2, qe.lambda2, s)?;
            let wm = qdir(qe.beta1, qe.gamma3 - qe.beta1, s)?;
            let (x, y, z) = (p.argument("x")?, p.argument("y")?, p.argument("z")?);
            qfk_erdelyi_separable(&qe, x, y, z, um, vm, &wm, &c, s.series_tol)
        },
    )
    .q_dependent()
    .constraint("Re(α1+η1) > Re λ1 > 0, Re(β2+μ2) > Re λ2 > 0, Re γ3 > Re β1 > 0", |p| {
        qerdelyi_params(p).is_ok_and(|q| q.validate().is_ok())
    })
    .constraint(MARGIN_NOTE, |p| {
        p.re("alpha1") + p.re("eta1") - p.re("lambda1") >= LEAD_MARGIN
            && p.re("beta2") + p.re("mu2") - p.re("lambda2") >= LEAD_MARGIN
            && p.re("beta1") >= LEAD_MARGIN
            && p.re("gamma3") - p.re("beta1") >= MARGIN
    })
    .constraint("numerical margin: Re α2 ≥ Re η2", |p| p.re("alpha2") >= p.re("eta2"))
}

const QFKS: [&str; 7] = ["alpha1", "alpha2", "beta1", "beta2", "eta1", "mu2", "gamma3"];

fn qfk_erdelyi_simplified() -> IdentityCase {
    IdentityCase::new(
        "qfk-erdelyi-simplified",
        "Corollary 4.7: shift-free q-Erdélyi integral",
        CostClass::QLattice,
        |rng, _| draw_q(rng, &QFKS, &["x", "y", "z"]),
        |p, s| {
            let [a1, a2, b1, b2, e1, m2, g3] = vals(p, QFKS)?;
            phik_lhs(&FkParams::new(a1, a2, b1, b2, a1 + e1, b2 + m2, g3)?, p, s)
        },
        |p, s| {
            let [a1, a2, b1, b2, e1, m2, g3] = vals(p, QFKS)?;
            let (x, y, z) = (p.argument("x")?, p.argument("y")?, p.argument("z")?);
            let c = s.ctx()?;
            let pochhammer_axis = |m: DiscreteMeasure, x: C64, e: C64| Axis {
                m,
                f: Box::new(move |k, t| q_pochhammer_inf_ratio(&[x * t * c.pow(e + k as f64)], &[x * t], &c)),
            };
            let mut u = pochhammer_axis(qdir(a1, e1, s)?, x, b1);
            let mut v = pochhammer_axis(qdir(b2, m2, s)?, y, a2);
            let w = qdir(b1, g3 - b1, s)?;
            moment_series(z, Some(&w), s.series_tol, |k| Ok(qp(a2, k, &c) / qq(k, &c) * u.at(k)? * v.at(k)?))
        },
    )
    .q_dependent()
    .constraint("min Re(α1, η1, β2, μ2) > 0, Re γ3 > Re β1 > 0", |p| {
        ["alpha1", "eta1", "beta2", "mu2"].iter().all(|n| p.re(n) > 0.0) && dir_ok(p, "beta1", "gamma3", false)
    })
    .constraint(MARGIN_NOTE, |p| {
        p.re("alpha1") >= LEAD_MARGIN
            && p.re("beta2") >= LEAD_MARGIN
            && p.re("eta1") >= MARGIN
            && p.re("mu2") >= MARGIN
            && dir_ok(p, "beta1", "gamma3", true)
    })
}

// ---------------------------------------------------------------------------
// limits of the discrete weights

const LIMITS: [&str; 12] = [
    "alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "gamma3", "lambda1", "lambda2", "mu1", "mu2", "mu3",
];

fn weight_params(p: &ParameterPoint) -> Result<DiscreteWeightParams> {
    let [alpha1, _, _, beta2, gamma1, gamma2, gamma3, lambda1, lambda2, mu1, mu2, mu3] = vals(p, LIMITS)?;
    Ok(DiscreteWeightParams { alpha1, beta2, gamma1, gamma2, gamma3, lambda1, lambda2, mu1, mu2, mu3 })
}

/// Nodes qⁱ with the limiting weights, cut like the q-measure lattices:
/// at least 40 points (times the lattice scale) and a geometric tail
/// |w|ρ/(1−ρ), ρ = q^μ, below the context's tail tolerance.
fn limit_measure(kind: WeightKind, dp: &DiscreteWeightParams, s: &EvalSettings) -> Result<DiscreteMeasure> {
    let c = s.ctx()?;
    let mu = match kind {
        WeightKind::W1 => dp.mu1,
        WeightKind::W2 => dp.mu2,
        WeightKind::W3 => dp.mu3,
    };
    let rho = c.q().powf(mu.re);
    let min_n = MIN_WEIGHT_POINTS * s.lattice_scale.max(1);
    let mut m = DiscreteMeasure { nodes: Vec::new(), weights: Vec::new() };
    let mut qi = 1.0;
    for i in 0..MAX_WEIGHT_POINTS {
        let w = discrete_weight_limit(kind, i, dp, &c)?;
        m.nodes.push(qi);
        m.weights.push(w);
        qi *= c.q();
        if i + 1 >= min_n && w.norm() * rho / (1.0 - rho) < c.jackson_tail_tol() {
            return Ok(m);
        }
    }
    Err(Error::NonConvergent("limiting weights did not decay".into()))
}

fn fk_discrete_limits() -> IdentityCase {
    IdentityCase::new(
        "fk-discrete-limits",
        "Theorem 4.4 in the limit r, s, t → ∞",
        CostClass::QLattice,
        |rng, _| draw_q(rng, &LIMITS, &["x", "y", "z"]),
        |p, s| phik_lhs(&fk(p, FK_PARAMS)?, p, s),
        |p, s| {
            let [_, a2, b1, _, _, _, _, l1, l2, m1, m2, _] = vals(p, LIMITS)?;
            let dp = weight_params(p)?;
            let (x, y, z) = (p.argument("x")?, p.argument("y")?, p.argument("z")?);
            let c = s.ctx()?;
            let mut u = Axis {
                m: limit_measure(WeightKind::W1, &dp, s)?,
                f: Box::new(move |k, t| tphi(&[b1 + k as f64, l1], &[m1], x * t, &c, s)),
            };
            let mut v = Axis {
                m: limit_measure(WeightKind::W2, &dp, s)?,
                f: Box::new(move |k, t| tphi(&[a2 + k as f64, l2], &[m2], y * t, &c, s)),
            };
            let w = limit_measure(WeightKind::W3, &dp, s)?;
            moment_series(z, Some(&w), s.series_tol, |k| {
                let cp = qp(a2, k, &c) * qp(b1, k, &c) / (qp(dp.mu3, k, &c) * qq(k, &c));
                Ok(cp * u.at(k)? * v.at(k)?)
            })
        },
    )
    .q_dependent()
    .constraint("min Re(γ1+λ1−α1−μ1, α1, μ1) > 0, min Re(γ2+λ2−β2−μ2, β2, μ2) > 0, Re γ3 > Re μ3 > 0", |p| {
        moment_ok(p, "mu1", "alpha1", "gamma1", "lambda1", 0.0, 0.0)
            && moment_ok(p, "mu2", "beta2", "gamma2", "lambda2", 0.0, 0.0)
            && dir_ok(p, "mu3", "gamma3", false)
    })
    .constraint(MARGIN_NOTE, |p| {
        moment_ok(p, "mu1", "alpha1", "gamma1", "lambda1", LEAD_MARGIN, MARGIN)
            && moment_ok(p, "mu2", "beta2", "gamma2", "lambda2", LEAD_MARGIN, MARGIN)
            && dir_ok(p, "mu3", "gamma3", true)
    })
    // the terminating ₃φ₁ in the weights cancels badly when μ exceeds α
    .constraint("numerical margin: Re α1 ≥ Re μ1, Re β2 ≥ Re μ2", |p| {
        p.re("alpha1") >= p.re("mu1") && p.re("beta2") >= p.re("mu2")
    })
}

// ---------------------------------------------------------------------------

fn phik_cross_form() -> IdentityCase {
    IdentityCase::new(
        "phik-cross-form",
        "Φ_K: triple series vs reexpansion",
        CostClass::Cheap,
        |rng, _| draw_q(rng, &FK_PARAMS, &["x", "y", "z"]),
        |p, s| {
            let (fp, x, y, z) = fk_point(p)?;
            Ok(phi_k_q_triple(&fp, x, y, z, &s.ctx()?, s.series_tol)?.value)
        },
        |p, s| {
            let (fp, x, y, z) = fk_point(p)?;
            Ok(phi_k_q_reexpand(&fp, x, y, z, &s.ctx()?, s.series_tol)?.value)
        },
    )
    .q_dependent()
}
