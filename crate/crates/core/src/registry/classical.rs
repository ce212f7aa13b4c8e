//! Identities with ordinary (non-q) hypergeometric functions.

use super::sampler::{fk_arguments, not_pole, Draw};
use super::{vals, CostClass, EvalSettings, IdentityCase, ParameterPoint};
use crate::error::{Error, Result};
use crate::hyper::{
    appell_f2, convolve2d, gauss_2f1, generic_f_a, phi_pfq, saran_fk_reexpand, saran_fk_triple, CoeffSequence2D,
    FkParams,
};
use crate::measures::{discretize, DiscreteMeasure, MeasureSpec};
use crate::numerics::{pochhammer, C64};

const MARGIN: f64 = 0.05;
const MARGIN_NOTE: &str = "numerical margin: measure exponents at least 0.05";

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

// b^e on the principal branch
fn cpow(b: C64, e: C64) -> C64 {
    (e * b.ln()).exp()
}

fn f21(a: C64, b: C64, c: C64, z: C64, tol: f64) -> Result<C64> {
    Ok(gauss_2f1(a, b, c, z, tol)?.value)
}

fn dir(a: C64, b: C64, order: usize) -> Result<DiscreteMeasure> {
    discretize(&MeasureSpec::dirichlet(a, b)?, order)
}

pub(super) fn cases() -> Vec<IdentityCase> {
    vec![
        euler_1(),
        euler_2(),
        bateman(),
        erdelyi_1(),
        erdelyi_2(),
        erdelyi_3(),
        fk_erdelyi(),
        f2_curious(),
        f2_reduction(),
        manocha(),
        manocha_reduced(),
        fa_erdelyi(),
        fk_cross_form(),
    ]
}

fn euler_1() -> IdentityCase {
    IdentityCase::new(
        "euler-1",
        "Euler integral, measure on β",
        CostClass::SingleIntegral,
        |rng, _| {
            let mut d = Draw::new(rng);
            for n in ["alpha", "beta", "gamma"] {
                d.param(n);
            }
            d.disc("z", 0.8);
            d.finish()
        },
        |p, s| {
            let [a, b, g] = vals(p, ["alpha", "beta", "gamma"])?;
            f21(a, b, g, p.argument("z")?, s.series_tol)
        },
        |p, s| {
            let [a, b, g] = vals(p, ["alpha", "beta", "gamma"])?;
            let z = p.argument("z")?;
            dir(b, g - b, s.order)?.integrate(|t| Ok(cpow(one() - z * t, -a)))
        },
    )
    .constraint("Re(γ) > Re(β) > 0", |p| p.re("gamma") > p.re("beta") && p.re("beta") > 0.0)
    .constraint(MARGIN_NOTE, |p| p.re("gamma") - p.re("beta") >= MARGIN)
}

fn euler_2() -> IdentityCase {
    IdentityCase::new(
        "euler-2",
        "Euler integral, measure on α",
        CostClass::SingleIntegral,
        |rng, _| {
            let mut d = Draw::new(rng);
            for n in ["alpha", "beta", "gamma"] {
                d.param(n);
            }
            d.disc("z", 0.8);
            d.finish()
        },
        |p, s| {
            let [a, b, g] = vals(p, ["alpha", "beta", "gamma"])?;
            f21(a, b, g, p.argument("z")?, s.series_tol)
        },
        |p, s| {
            let [a, b, g] = vals(p, ["alpha", "beta", "gamma"])?;
            let z = p.argument("z")?;
            dir(a, g - a, s.order)?.integrate(|t| Ok(cpow(one() - z * t, -b)))
        },
    )
    .constraint("Re(γ) > Re(α) > 0", |p| p.re("gamma") > p.re("alpha") && p.re("alpha") > 0.0)
    .constraint(MARGIN_NOTE, |p| p.re("gamma") - p.re("alpha") >= MARGIN)
}

fn bateman() -> IdentityCase {
    IdentityCase::new(
        "bateman",
        "Bateman integral",
        CostClass::SingleIntegral,
        |rng, _| {
            let mut d = Draw::new(rng);
            for n in ["alpha", "beta", "gamma", "lambda"] {
                d.param(n);
            }
            d.disc("z", 0.8);
            d.finish()
        },
        |p, s| {
            let [a, b, g] = vals(p, ["alpha", "beta", "gamma"])?;
            f21(a, b, g, p.argument("z")?, s.series_tol)
        },
        |p, s| {
            let [a, b, g, l] = vals(p, ["alpha", "beta", "gamma", "lambda"])?;
            let z = p.argument("z")?;
            dir(l, g - l, s.order)?.integrate(|t| f21(a, b, l, z * t, s.series_tol))
        },
    )
    .constraint("Re(γ) > Re(λ) > 0", |p| p.re("gamma") > p.re("lambda") && p.re("lambda") > 0.0)
    .constraint(MARGIN_NOTE, |p| p.re("gamma") - p.re("lambda") >= MARGIN)
}

fn erdelyi_1() -> IdentityCase {
    IdentityCase::new(
        "erdelyi-1",
        "Erdélyi integral I",
        CostClass::SingleIntegral,
        |rng, _| {
            let mut d = Draw::new(rng);
            for n in ["alpha", "alpha_p", "beta", "gamma", "lambda"] {
                d.param(n);
            }
            // the second argument (1−x)z/(1−xz) approaches 1 as |z| → 1
            d.disc("z", 0.7);
            d.finish()
        },
        |p, s| {
            let [a, b, g] = vals(p, ["alpha", "beta", "gamma"])?;
            f21(a, b, g, p.argument("z")?, s.series_tol)
        },
        |p, s| erdelyi_1_rhs(p, s),
    )
    .constraint("Re(γ) > Re(λ) > 0", |p| p.re("gamma") > p.re("lambda") && p.re("lambda") > 0.0)
    .constraint(MARGIN_NOTE, |p| p.re("gamma") - p.re("lambda") >= MARGIN)
}

pub(super) fn erdelyi_1_rhs(p: &ParameterPoint, s: &EvalSettings) -> Result<C64> {
    let [a, ap, b, g, l] = vals(p, ["alpha", "alpha_p", "beta", "gamma", "lambda"])?;
    let z = p.argument("z")?;
    let tol = s.series_tol;
    dir(l, g - l, s.order)?.integrate(|x| {
        let zx = z * x;
        let w = (1.0 - x) * z / (one() - zx);
        Ok(cpow(one() - zx, -ap) * f21(a - ap, b, l, zx, tol)? * f21(ap, b - l, g - l, w, tol)?)
    })
}

fn erdelyi_2() -> IdentityCase {
    IdentityCase::new(
        "erdelyi-2",
        "Erdélyi integral II",
        CostClass::SingleIntegral,
        |rng, _| {
            let mut d = Draw::new(rng);
            for n in ["alpha", "beta", "gamma", "eta", "lambda"] {
                d.param(n);
            }
            d.disc("z", 0.8);
            d.finish()
        },
        |p, s| {
            let [a, b, g] = vals(p, ["alpha", "beta", "gamma"])?;
            f21(a, b, g, p.argument("z")?, s.series_tol)
        },
        |p, s| {
            let [a, b, g, e, l] = vals(p, ["alpha", "beta", "gamma", "eta", "lambda"])?;
            let z = p.argument("z")?;
            let tol = s.series_tol;
            dir(e, g - e, s.order)?.integrate(|x| {
                let zx = z * x;
                let w = (1.0 - x) * z / (one() - zx);
                Ok(cpow(one() - zx, l - a - b)
                    * f21(l - a, l - b, e, zx, tol)?
                    * f21(a + b - l, l - e, g - e, w, tol)?)
            })
        },
    )
    .constraint("Re(γ) > Re(η) > 0", |p| p.re("gamma") > p.re("eta") && p.re("eta") > 0.0)
    .constraint(MARGIN_NOTE, |p| p.re("gamma") - p.re("eta") >= MARGIN)
}

fn erdelyi_3() -> IdentityCase {
    IdentityCase::new(
        "erdelyi-3",
        "Erdélyi integral III (hypergeometric measure)",
        CostClass::SingleIntegral,
        |rng, _| {
            let mut d = Draw::new(rng);
            for n in ["alpha", "beta", "gamma", "eta", "lambda", "nu"] {
                d.param(n);
            }
            d.disc("z", 0.8);
            d.finish()
        },
        |p, s| {
            let [a, b, g] = vals(p, ["alpha", "beta", "gamma"])?;
            f21(a, b, g, p.argument("z")?, s.series_tol)
        },
        |p, s| {
            let [a, b, g, e, l, n] = vals(p, ["alpha", "beta", "gamma", "eta", "lambda", "nu"])?;
            let z = p.argument("z")?;
            let spec = MeasureSpec::hypergeometric(e - l, g - l, g - l + e - n, n)?;
            discretize(&spec, s.order)?.integrate(|x| Ok(phi_pfq(&[a, b, e], &[l, n], z * x, s.series_tol)?.value))
        },
    )
    .constraint("min(Re ν, Re λ, Re(γ−λ+η−ν)) > 0", |p| {
        p.re("nu") > 0.0 && p.re("lambda") > 0.0 && p.re("gamma") - p.re("lambda") + p.re("eta") - p.re("nu") > 0.0
    })
    .constraint(MARGIN_NOTE, |p| p.re("gamma") - p.re("lambda") + p.re("eta") - p.re("nu") >= MARGIN)
}

// ---------------------------------------------------------------------------
// F_K

const FK_NAMES: [&str; 11] =
    ["alpha1", "alpha2", "beta1", "beta2", "eta1", "eta2", "lambda1", "lambda2", "lambda3", "mu2", "gamma3"];

struct FkErdelyi {
    outer: FkParams,
    inner1: FkParams,
    inner2: FkParams,
    x: C64,
    y: C64,
    z: C64,
    u: DiscreteMeasure,
    v: DiscreteMeasure,
    w: DiscreteMeasure,
}

impl FkErdelyi {
    fn new(p: &ParameterPoint, s: &EvalSettings) -> Result<Self> {
        let [a1, a2, b1, b2, e1, e2, l1, l2, l3, m2, g3] = vals(p, FK_NAMES)?;
        let outer = FkParams::new(a1, a2, b1, b2, a1 + e1, b2 + m2, g3)?;
        let inner1 = FkParams::new(a1, a2 - e2, b1 - l3, b2, a1 - l1 + e1, b2 - l2 + m2, b1 - l3)?;
        let inner2 = FkParams::new(l1 - e1, e2, l3, l2 - m2, l1, l2, l3)?;
        let n = s.multi_order;
        Ok(Self {
            outer,
            inner1,
            inner2,
            x: p.argument("x")?,
            y: p.argument("y")?,
            z: p.argument("z")?,
            u: dir(a1 - l1 + e1, l1, n)?,
            v: dir(b2 - l2 + m2, l2, n)?,
            w: dir(b1, g3 - b1, n)?,
        })
    }

    // arguments of the two F_K factors at node (u, v, w)
    fn args(&self, u: f64, v: f64, w: f64) -> ([C64; 3], [C64; 3]) {
        let (ux, vy) = (self.x * u, self.y * v);
        let (dx, dy) = (one() - ux, one() - vy);
        let wz = self.z * w;
        ([ux, vy, wz], [(1.0 - u) * self.x / dx, (1.0 - v) * self.y / dy, wz / (dx * dy)])
    }
}

// rows[i][k] = ₂F₁(a+k, b; c; args[i]), extended in place to `len`
fn extend_rows(rows: &mut [Vec<C64>], args: &[C64], a: C64, b: C64, c: C64, len: usize, tol: f64) -> Result<()> {
    for (row, &t) in rows.iter_mut().zip(args) {
        for k in row.len()..len {
            row.push(f21(a + k as f64, b, c, t, tol)?);
        }
    }
    Ok(())
}

fn fk_coeffs(p: &FkParams, len: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(len);
    let mut c = one();
    for k in 0..len {
        out.push(c);
        let kf = k as f64;
        c *= (p.alpha2 + kf) * (p.beta1 + kf) / ((p.gamma3 + kf) * (kf + 1.0));
    }
    out
}

const FK_ROW_START: usize = 64;
const FK_ROW_CAP: usize = 2048;

/// Triple integral side of the F_K Erdélyi identity.
///
/// Both F_K factors are summed in the single-series form; their ₂F₁ rows
/// depend on u or v only and are cached per node. Row length doubles until
/// the last terms are negligible at every node.
fn fk_erdelyi_rhs(p: &ParameterPoint, s: &EvalSettings) -> Result<C64> {
    let f = FkErdelyi::new(p, s)?;
    let tol = s.series_tol;
    let (i1, i2) = (&f.inner1, &f.inner2);
    let nu = f.u.len();
    let nv = f.v.len();
    let xs1: Vec<C64> = f.u.nodes.iter().map(|&u| f.x * u).collect();
    let xs2: Vec<C64> = f.u.nodes.iter().map(|&u| (1.0 - u) * f.x / (one() - f.x * u)).collect();
    let ys1: Vec<C64> = f.v.nodes.iter().map(|&v| f.y * v).collect();
    let ys2: Vec<C64> = f.v.nodes.iter().map(|&v| (1.0 - v) * f.y / (one() - f.y * v)).collect();
    let mut rx1 = vec![Vec::new(); nu];
    let mut rx2 = vec![Vec::new(); nu];
    let mut ry1 = vec![Vec::new(); nv];
    let mut ry2 = vec![Vec::new(); nv];
    let mut len = FK_ROW_START;
    loop {
        extend_rows(&mut rx1, &xs1, i1.beta1, i1.alpha1, i1.gamma1, len, tol)?;
        extend_rows(&mut rx2, &xs2, i2.beta1, i2.alpha1, i2.gamma1, len, tol)?;
        extend_rows(&mut ry1, &ys1, i1.alpha2, i1.beta2, i1.gamma2, len, tol)?;
        extend_rows(&mut ry2, &ys2, i2.alpha2, i2.beta2, i2.gamma2, len, tol)?;
        let c1 = fk_coeffs(i1, len);
        let c2 = fk_coeffs(i2, len);
        let mut total = C64::new(0.0, 0.0);
        let mut tails_ok = true;
        let mut t1 = vec![C64::new(0.0, 0.0); len];
        let mut t2 = vec![C64::new(0.0, 0.0); len];
        for iu in 0..nu {
            let ux = xs1[iu];
            let pre_u = f.u.weights[iu] * cpow(one() - ux, -i2.gamma3);
            for iv in 0..nv {
                let vy = ys1[iv];
                let pre = pre_u * f.v.weights[iv] * cpow(one() - vy, -i2.alpha2);
                let scale = one() / ((one() - ux) * (one() - vy));
                for k in 0..len {
                    t1[k] = c1[k] * rx1[iu][k] * ry1[iv][k];
                    t2[k] = c2[k] * rx2[iu][k] * ry2[iv][k];
                }
                let mut inner = C64::new(0.0, 0.0);
                for (&w, &ww) in f.w.nodes.iter().zip(&f.w.weights) {
                    let wz = f.z * w;
                    let (a, ta) = horner(&t1, wz);
                    let (b, tb) = horner(&t2, wz * scale);
                    tails_ok &= ta <= 1e-16 * (1.0 + a.norm()) && tb <= 1e-16 * (1.0 + b.norm());
                    inner += ww * a * b;
                }
                total += pre * inner;
            }
        }
        if tails_ok {
            return Ok(total);
        }
        if len >= FK_ROW_CAP {
            return Err(Error::NonConvergent(format!("F_K rows still significant at length {len}")));
        }
        len *= 2;
    }
}

// Σ t[k] zᵏ and the modulus of its last three terms
fn horner(t: &[C64], z: C64) -> (C64, f64) {
    let mut s = C64::new(0.0, 0.0);
    for &c in t.iter().rev() {
        s = s * z + c;
    }
    let n = t.len();
    let tail = (n.saturating_sub(3)..n).map(|k| (t[k] * z.powi(k as i32)).norm()).sum();
    (s, tail)
}

fn fk_erdelyi() -> IdentityCase {
    IdentityCase::new(
        "fk-erdelyi",
        "Theorem 1.1: Erdélyi-type integral for F_K",
        CostClass::TripleIntegral,
        |rng, _| {
            let mut d = Draw::new(rng);
            for n in FK_NAMES {
                d.param(n);
            }
            fk_arguments(&mut d);
            d.finish()
        },
        |p, s| {
            let [a1, a2, b1, b2, e1, m2, g3] = vals(p, ["alpha1", "alpha2", "beta1", "beta2", "eta1", "mu2", "gamma3"])?;
            let outer = FkParams::new(a1, a2, b1, b2, a1 + e1, b2 + m2, g3)?;
            Ok(saran_fk_reexpand(&outer, p.argument("x")?, p.argument("y")?, p.argument("z")?, s.series_tol)?.value)
        },
        fk_erdelyi_rhs,
    )
    .constraint("Re(α1+η1) > Re(λ1) > 0", |p| p.re("alpha1") + p.re("eta1") > p.re("lambda1") && p.re("lambda1") > 0.0)
    .constraint("Re(β2+μ2) > Re(λ2) > 0", |p| p.re("beta2") + p.re("mu2") > p.re("lambda2") && p.re("lambda2") > 0.0)
    .constraint("Re(γ3) > Re(β1) > 0", |p| p.re("gamma3") > p.re("beta1") && p.re("beta1") > 0.0)
    .constraint(MARGIN_NOTE, |p| {
        p.re("alpha1") + p.re("eta1") - p.re("lambda1") >= MARGIN
            && p.re("beta2") + p.re("mu2") - p.re("lambda2") >= MARGIN
            && p.re("gamma3") - p.re("beta1") >= MARGIN
    })
    .constraint("numerical margin: β1−λ3 at least 0.02 from a non-positive integer", |p| {
        not_pole(p.re("beta1") - p.re("lambda3"))
    })
    .constraint("(x, y, z) in D_K shrunk by 0.8", |p| {
        let (Ok(x), Ok(y), Ok(z)) = (p.argument("x"), p.argument("y"), p.argument("z")) else { return false };
        x.norm() <= 0.8 && y.norm() <= 0.8 && z.norm() <= 0.8 * (1.0 - x.norm()) * (1.0 - y.norm())
    })
}

/// Agreement between the triple series and the single-series form of F_K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormAgreement {
    pub evaluations: usize,
    pub max_rel_diff: f64,
}

/// Evaluates every F_K occurring in the fk-erdelyi identity at `point`
/// (the left side and both factors at every `stride`-th quadrature node)
/// with both summation forms and reports the worst disagreement.
pub fn fk_erdelyi_form_agreement(point: &ParameterPoint, settings: &EvalSettings, stride: usize) -> Result<FormAgreement> {
    let f = FkErdelyi::new(point, settings)?;
    let tol = settings.series_tol;
    let mut out = FormAgreement { evaluations: 0, max_rel_diff: 0.0 };
    let mut check = |p: &FkParams, a: [C64; 3]| -> Result<()> {
        let t = saran_fk_triple(p, a[0], a[1], a[2], tol)?.value;
        let r = saran_fk_reexpand(p, a[0], a[1], a[2], tol)?.value;
        out.evaluations += 1;
        out.max_rel_diff = out.max_rel_diff.max(super::relative_residual(r, t));
        Ok(())
    };
    check(&f.outer, [f.x, f.y, f.z])?;
    let stride = stride.max(1);
    let mut idx = 0usize;
    for &u in &f.u.nodes {
        for &v in &f.v.nodes {
            for &w in &f.w.nodes {
                if idx % stride == 0 {
                    let (a1, a2) = f.args(u, v, w);
                    check(&f.inner1, a1)?;
                    check(&f.inner2, a2)?;
                }
                idx += 1;
            }
        }
    }
    Ok(out)
}

fn fk_cross_form() -> IdentityCase {
    IdentityCase::new(
        "fk-cross-form",
        "F_K: triple series vs reexpansion",
        CostClass::Cheap,
        |rng, _| {
            let mut d = Draw::new(rng);
            for n in FK_PARAMS {
                d.param(n);
            }
            fk_arguments(&mut d);
            d.finish()
        },
        |p, s| {
            let (fp, x, y, z) = fk_point(p)?;
            Ok(saran_fk_triple(&fp, x, y, z, s.series_tol)?.value)
        },
        |p, s| {
            let (fp, x, y, z) = fk_point(p)?;
            Ok(saran_fk_reexpand(&fp, x, y, z, s.series_tol)?.value)
        },
    )
}

pub(super) const FK_PARAMS: [&str; 7] = ["alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "gamma3"];

pub(super) fn fk_point(p: &ParameterPoint) -> Result<(FkParams, C64, C64, C64)> {
    let [a1, a2, b1, b2, g1, g2, g3] = vals(p, FK_PARAMS)?;
    Ok((FkParams::new(a1, a2, b1, b2, g1, g2, g3)?, p.argument("x")?, p.argument("y")?, p.argument("z")?))
}

// ---------------------------------------------------------------------------
// F_2

// y in the disc of radius 0.8, z in the disc of radius 0.8 − |y|
fn f2_arguments(d: &mut Draw<'_>) {
    let y = d.disc("y", 0.8);
    d.disc("z", 0.8 - y.norm());
}

fn f2_margin(p: &ParameterPoint) -> bool {
    match (p.argument("y"), p.argument("z")) {
        (Ok(y), Ok(z)) => y.norm() + z.norm() <= 0.8,
        _ => false,
    }
}

fn f2_curious() -> IdentityCase {
    IdentityCase::new(
        "f2-curious",
        "Theorem 3.2: integral representation for F_2",
        CostClass::TripleIntegral,
        |rng, _| {
            let mut d = Draw::new(rng);
            for n in ["a1", "a2", "b1", "b2", "c1", "c2", "d1"] {
                d.param(n);
            }
            f2_arguments(&mut d);
            d.finish()
        },
        |p, s| {
            let [a1, b1, b2, c1, c2] = vals(p, ["a1", "b1", "b2", "c1", "c2"])?;
            Ok(appell_f2(a1, b1, b2, c1, c2, p.argument("y")?, p.argument("z")?, s.series_tol)?.value)
        },
        |p, s| {
            let [a1, a2, b1, b2, c1, c2, d1] = vals(p, ["a1", "a2", "b1", "b2", "c1", "c2", "d1"])?;
            let (y, z) = (p.argument("y")?, p.argument("z")?);
            let tol = s.series_tol;
            let vm = dir(c1 - d1, d1, s.multi_order)?;
            let wm = dir(b2, c2 - b2, s.multi_order)?;
            let mut f = |t: &[f64]| -> Result<C64> {
                let (vy, wz) = (y * t[0], z * t[1]);
                let den = one() - vy - wz;
                Ok(cpow(den, -a1)
                    * f21(a1 - a2, c1 - b1 - d1, c1 - d1, vy / (vy + wz - one()), tol)?
                    * f21(a2, b1 + d1 - c1, d1, (1.0 - t[0]) * y / den, tol)?)
            };
            crate::measures::integrate_discrete_product(&mut f, &[vm, wm])
        },
    )
    .with_tol(1e-8)
    .constraint("Re(c1) > Re(d1) > 0", |p| p.re("c1") > p.re("d1") && p.re("d1") > 0.0)
    .constraint("Re(c2) > Re(b2) > 0", |p| p.re("c2") > p.re("b2") && p.re("b2") > 0.0)
    .constraint(MARGIN_NOTE, |p| p.re("c1") - p.re("d1") >= MARGIN && p.re("c2") - p.re("b2") >= MARGIN)
    .constraint("|y| + |z| ≤ 0.8", f2_margin)
}

fn f2_reduction() -> IdentityCase {
    IdentityCase::new(
        "f2-reduction-proof",
        "F_2 reduction with b' = c' followed by Pfaff",
        CostClass::Cheap,
        |rng, _| {
            let mut d = Draw::new(rng);
            for n in ["a", "b", "bp", "c"] {
                d.param(n);
            }
            f2_arguments(&mut d);
            d.finish()
        },
        |p, s| {
            let [a, b, bp, c] = vals(p, ["a", "b", "bp", "c"])?;
            Ok(appell_f2(a, b, bp, c, bp, p.argument("y")?, p.argument("z")?, s.series_tol)?.value)
        },
        |p, s| {
            let [a, b, c] = vals(p, ["a", "b", "c"])?;
            let (y, z) = (p.argument("y")?, p.argument("z")?);
            Ok(cpow(one() - y - z, -a) * f21(a, c - b, c, y / (y + z - one()), s.series_tol)?)
        },
    )
    .constraint("|y| + |z| ≤ 0.8", f2_margin)
}

const MANOCHA: [&str; 8] = ["a", "a_p", "b", "c", "d", "e", "lambda", "eta"];

fn manocha() -> IdentityCase {
    IdentityCase::new(
        "manocha",
        "Manocha's integral for F_2",
        CostClass::TripleIntegral,
        |rng, _| {
            let mut d = Draw::new(rng);
            for n in MANOCHA {
                d.param(n);
            }
            f2_arguments(&mut d);
            d.finish()
        },
        |p, s| {
            let [a, b, c, d, e] = vals(p, ["a", "b", "c", "d", "e"])?;
            Ok(appell_f2(a, b, c, d, e, p.argument("y")?, p.argument("z")?, s.series_tol)?.value)
        },
        |p, s| {
            let [a, ap, b, c, d, e, l, et] = vals(p, MANOCHA)?;
            let (y, z) = (p.argument("y")?, p.argument("z")?);
            let tol = s.series_tol;
            let vm = dir(l, d - l, s.multi_order)?;
            let wm = dir(et, e - et, s.multi_order)?;
            let mut f = |t: &[f64]| -> Result<C64> {
                let (vy, wz) = (y * t[0], z * t[1]);
                let den = one() - vy - wz;
                let first = appell_f2(a - ap, b, c, l, et, vy, wz, tol)?.value;
                let y2 = (1.0 - t[0]) * y / den;
                let z2 = (1.0 - t[1]) * z / den;
                let second = appell_f2(ap, b - l, c - et, d - l, e - et, y2, z2, tol)?.value;
                Ok(cpow(den, -ap) * first * second)
            };
            crate::measures::integrate_discrete_product(&mut f, &[vm, wm])
        },
    )
    .with_tol(1e-8)
    .constraint("Re(d) > Re(λ) > 0", |p| p.re("d") > p.re("lambda") && p.re("lambda") > 0.0)
    .constraint("Re(e) > Re(η) > 0", |p| p.re("e") > p.re("eta") && p.re("eta") > 0.0)
    .constraint(MARGIN_NOTE, |p| p.re("d") - p.re("lambda") >= MARGIN && p.re("e") - p.re("eta") >= MARGIN)
    .constraint("|y| + |z| ≤ 0.8", f2_margin)
}

const MANOCHA_REDUCED: [&str; 7] = ["a", "a_p", "b", "c", "d", "e", "lambda"];

fn manocha_reduced() -> IdentityCase {
    IdentityCase::new(
        "manocha-reduced",
        "Manocha's integral with η = c",
        CostClass::TripleIntegral,
        |rng, _| {
            let mut d = Draw::new(rng);
            for n in MANOCHA_REDUCED {
                d.param(n);
            }
            f2_arguments(&mut d);
            d.finish()
        },
        |p, s| {
            let [a, b, c, d, e] = vals(p, ["a", "b", "c", "d", "e"])?;
            Ok(appell_f2(a, b, c, d, e, p.argument("y")?, p.argument("z")?, s.series_tol)?.value)
        },
        |p, s| {
            let [a, ap, b, c, d, e, l] = vals(p, MANOCHA_REDUCED)?;
            let (y, z) = (p.argument("y")?, p.argument("z")?);
            let tol = s.series_tol;
            let vm = dir(l, d - l, s.multi_order)?;
            let wm = dir(c, e - c, s.multi_order)?;
            let mut f = |t: &[f64]| -> Result<C64> {
                let (vy, wz) = (y * t[0], z * t[1]);
                let den = one() - vy - wz;
                Ok(cpow(den, -a)
                    * f21(a - ap, l - b, l, vy / (vy + wz - one()), tol)?
                    * f21(ap, b - l, d - l, (1.0 - t[0]) * y / den, tol)?)
            };
            crate::measures::integrate_discrete_product(&mut f, &[vm, wm])
        },
    )
    .with_tol(1e-8)
    .constraint("Re(d) > Re(λ) > 0", |p| p.re("d") > p.re("lambda") && p.re("lambda") > 0.0)
    .constraint("Re(e) > Re(c) > 0", |p| p.re("e") > p.re("c") && p.re("c") > 0.0)
    .constraint(MARGIN_NOTE, |p| p.re("d") - p.re("lambda") >= MARGIN && p.re("e") - p.re("c") >= MARGIN)
    .constraint("|y| + |z| ≤ 0.8", f2_margin)
}

// ---------------------------------------------------------------------------
// ℱ^a convolution family

const FA_NAMES: [&str; 14] = [
    "alpha1", "beta1", "alpha2", "beta2", "lambda1", "lambda2", "gamma1", "gamma2", "gamma3", "gamma4", "tau1", "tau2",
    "tau3", "tau4",
];
const SEQ_NAMES: [&str; 3] = ["s1", "s2", "s3"];

/// Sequence kind k ∈ {0: delta, 1: geometric 0.3, 2: F_K diagonal}; the
/// diagonal takes its parameters from `{prefix}s1..s3`.
fn fa_sequence(p: &ParameterPoint, kind: usize, prefix: &str) -> Result<CoeffSequence2D> {
    Ok(match kind {
        0 => CoeffSequence2D::delta(),
        1 => CoeffSequence2D::geometric(0.3),
        _ => {
            let g = |n: &str| p.value(&format!("{prefix}{n}"));
            CoeffSequence2D::fk_diagonal(g("s1")?, g("s2")?, g("s3")?)
        }
    })
}

fn fa_sequences(p: &ParameterPoint) -> Result<(CoeffSequence2D, CoeffSequence2D)> {
    Ok((fa_sequence(p, p.index("seq_a")?, "a_")?, fa_sequence(p, p.index("seq_b")?, "b_")?))
}

fn fa_decay_ok(p: &ParameterPoint) -> bool {
    let (Ok((a, b)), Ok(x3), Ok(x4)) = (fa_sequences(p), p.argument("x3"), p.argument("x4")) else { return false };
    2.0 * a.decay_bound().max(b.decay_bound()) * x3.norm().max(x4.norm()) < 0.6
}

fn fa_lhs(p: &ParameterPoint, s: &EvalSettings) -> Result<C64> {
    let [a1, b1, a2, b2, l1, l2, _, _, g3, g4, t1, t2, t3, t4] = vals(p, FA_NAMES)?;
    let (a, b) = fa_sequences(p)?;
    let c = convolve2d(&a, &b).weighted(move |m, n| {
        pochhammer(g3, m) / pochhammer(t3, m) * pochhammer(g4, n) / pochhammer(t4, n)
    });
    let x = |n: &str| p.argument(n);
    Ok(generic_f_a(&c, a1 + l1, b1, t1, a2 + l2, b2, t2, x("x1")?, x("x2")?, x("x3")?, x("x4")?, s.series_tol)?.value)
}

/// One axis of the separated integral:
/// U(m,n) = ∫ (1−ux)^{−λ−n} ₂F₁(α+m,β;γ;xu) ₂F₁(λ+n,β−γ;τ−γ;(1−u)x/(1−ux)) dμ_{γ,τ−γ}(u),
/// returned as a k×k row-major table.
#[allow(clippy::too_many_arguments)]
fn fa_axis(alpha: C64, beta: C64, lambda: C64, gamma: C64, tau: C64, x: C64, k: usize, s: &EvalSettings) -> Result<Vec<C64>> {
    let m = dir(gamma, tau - gamma, s.order)?;
    let tol = s.series_tol;
    let mut out = vec![C64::new(0.0, 0.0); k * k];
    let mut a_row = vec![C64::new(0.0, 0.0); k];
    let mut b_row = vec![C64::new(0.0, 0.0); k];
    for (&u, &w) in m.nodes.iter().zip(&m.weights) {
        let d = one() - x * u;
        let xr = (1.0 - u) * x / d;
        let pre = w * cpow(d, -lambda);
        for j in 0..k {
            a_row[j] = f21(alpha + j as f64, beta, gamma, x * u, tol)?;
        }
        let mut dn = one();
        for j in 0..k {
            b_row[j] = dn * f21(lambda + j as f64, beta - gamma, tau - gamma, xr, tol)?;
            dn /= d;
        }
        for i in 0..k {
            let pa = pre * a_row[i];
            for j in 0..k {
                out[i * k + j] += pa * b_row[j];
            }
        }
    }
    Ok(out)
}

fn moments(gamma: C64, tau: C64, k: usize, s: &EvalSettings) -> Result<Vec<C64>> {
    let m = dir(gamma, tau - gamma, s.order)?;
    Ok((0..k).map(|e| m.nodes.iter().zip(&m.weights).map(|(&t, &w)| w * t.powi(e as i32)).sum()).collect())
}

const FA_K_START: usize = 32;
const FA_K_CAP: usize = 256;

/// Four-fold integral side, reduced to a sum over (m1,m2,n1,n2) of
/// a(m1,m2) b(n1,n2) G(m1,n1) H(m2,n2) with single integrals G and H.
fn fa_rhs(p: &ParameterPoint, s: &EvalSettings) -> Result<C64> {
    let [a1, b1, a2, b2, l1, l2, g1, g2, g3, g4, t1, t2, t3, t4] = vals(p, FA_NAMES)?;
    let (sa, sb) = fa_sequences(p)?;
    let x = |n: &str| p.argument(n);
    let (x1, x2, x3, x4) = (x("x1")?, x("x2")?, x("x3")?, x("x4")?);
    let mut k = FA_K_START;
    loop {
        let u = fa_axis(a1, b1, l1, g1, t1, x1, k, s)?;
        let v = fa_axis(a2, b2, l2, g2, t2, x2, k, s)?;
        let m3 = moments(g3, t3, 2 * k, s)?;
        let m4 = moments(g4, t4, 2 * k, s)?;
        let mut pw3 = vec![one(); 2 * k];
        let mut pw4 = vec![one(); 2 * k];
        for e in 1..2 * k {
            pw3[e] = pw3[e - 1] * x3;
            pw4[e] = pw4[e - 1] * x4;
        }
        let g: Vec<C64> = (0..k * k).map(|ij| u[ij] * pw3[ij / k + ij % k] * m3[ij / k + ij % k]).collect();
        let h: Vec<C64> = (0..k * k).map(|ij| v[ij] * pw4[ij / k + ij % k] * m4[ij / k + ij % k]).collect();
        let av: Vec<C64> = (0..k * k).map(|ij| sa.get(ij / k, ij % k)).collect();
        let bv: Vec<C64> = (0..k * k).map(|ij| sb.get(ij / k, ij % k)).collect();
        let sum = |kk: usize| -> C64 {
            // W[n1][m2] = Σ_{n2} b(n1,n2) H(m2,n2)
            let mut wt = vec![C64::new(0.0, 0.0); kk * kk];
            for n1 in 0..kk {
                for m2 in 0..kk {
                    let mut acc = C64::new(0.0, 0.0);
                    for n2 in 0..kk {
                        acc += bv[n1 * k + n2] * h[m2 * k + n2];
                    }
                    wt[n1 * kk + m2] = acc;
                }
            }
            let mut total = C64::new(0.0, 0.0);
            for m1 in 0..kk {
                for m2 in 0..kk {
                    let am = av[m1 * k + m2];
                    if am == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut acc = C64::new(0.0, 0.0);
                    for n1 in 0..kk {
                        acc += g[m1 * k + n1] * wt[n1 * kk + m2];
                    }
                    total += am * acc;
                }
            }
            total
        };
        let full = sum(k);
        let short = sum(k - 8);
        if (full - short).norm() <= 1e-15 * (1.0 + full.norm()) {
            return Ok(full);
        }
        if k >= FA_K_CAP {
            return Err(Error::NonConvergent(format!("F^a integral series not settled at {k} terms per index")));
        }
        k *= 2;
    }
}

fn fa_erdelyi() -> IdentityCase {
    IdentityCase::new(
        "fa-erdelyi",
        "Theorem 3.3: convolution family F^a",
        CostClass::TripleIntegral,
        |rng, idx| {
            let mut d = Draw::new(rng);
            for n in FA_NAMES {
                d.param(n);
            }
            d.fixed("seq_a", (idx % 3) as f64);
            d.fixed("seq_b", ((idx / 3) % 3) as f64);
            for pre in ["a_", "b_"] {
                for n in SEQ_NAMES {
                    d.param(&format!("{pre}{n}"));
                }
            }
            d.disc("x1", 0.5);
            d.disc("x2", 0.5);
            d.disc("x3", 0.25);
            d.disc("x4", 0.25);
            d.finish()
        },
        fa_lhs,
        fa_rhs,
    )
    .with_tol(1e-8)
    .constraint("Re(τj) > Re(γj) > 0, j = 1..4", |p| {
        (1..=4).all(|j| {
            let (t, g) = (p.re(&format!("tau{j}")), p.re(&format!("gamma{j}")));
            t > g && g > 0.0
        })
    })
    .constraint(MARGIN_NOTE, |p| (1..=4).all(|j| p.re(&format!("tau{j}")) - p.re(&format!("gamma{j}")) >= MARGIN))
    .constraint("numerical margin: 2·max(D_a, D_b)·max(|x3|, |x4|) < 0.6", fa_decay_ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::re;
    use crate::registry::{lookup, relative_residual, sample_parameters};

    // F_2 at b' = c' against an independent closed form:
    // F_2(a,b,c';c,c';y,z) = Σ_m (a)_m (b)_m/((c)_m m!) yᵐ (1−z)^{−a−m}
    #[test]
    fn f2_reduction_oracle() {
        let (a, b, bp, c) = (re(1.3), re(0.7), re(1.9), re(2.2));
        let (y, z) = (C64::new(0.3, 0.1), C64::new(-0.2, 0.25));
        let mut s = C64::new(0.0, 0.0);
        let mut t = one();
        for m in 0..400 {
            s += t * cpow(one() - z, -a - m as f64);
            let mf = m as f64;
            t *= (a + mf) * (b + mf) / ((c + mf) * (mf + 1.0)) * y;
        }
        let f2 = appell_f2(a, b, bp, c, bp, y, z, 1e-16).unwrap().value;
        assert!((f2 - s).norm() < 1e-13 * s.norm());
    }

    #[test]
    fn euler_1_exact_at_beta_one() {
        // ₂F₁(α,1;2;z) = ((1−z)^{1−α} − 1)/((α−1)z)
        let case = lookup("euler-1").unwrap();
        let (a, z) = (2.7, C64::new(0.4, -0.3));
        let p = ParameterPoint::new()
            .with_value("alpha", re(a))
            .with_value("beta", re(1.0))
            .with_value("gamma", re(2.0))
            .with_argument("z", z);
        let exact = (cpow(one() - z, re(1.0 - a)) - one()) / ((a - 1.0) * z);
        let s = EvalSettings::default();
        assert!(relative_residual(exact, (case.lhs)(&p, &s).unwrap()) < 1e-14);
        assert!(relative_residual(exact, (case.rhs)(&p, &s).unwrap()) < 1e-12);
    }

    #[test]
    fn fk_erdelyi_pointwise_consistency() {
        let case = lookup("fk-erdelyi").unwrap();
        let p = &sample_parameters(case, 5, 1).unwrap()[0];
        let s = EvalSettings { multi_order: 12, ..EvalSettings::default() };
        let agree = fk_erdelyi_form_agreement(p, &s, 97).unwrap();
        assert!(agree.evaluations > 30);
        assert!(agree.max_rel_diff < 1e-10, "{}", agree.max_rel_diff);
    }

    #[test]
    fn horner_tail() {
        let t = [one(), re(2.0), re(3.0), re(4.0)];
        let (s, tail) = horner(&t, re(0.5));
        assert!((s - re(1.0 + 1.0 + 0.75 + 0.5)).norm() < 1e-15);
        assert!((tail - 2.25).abs() < 1e-15);
    }

    #[test]
    fn fa_sequences_cycle() {
        let case = lookup("fa-erdelyi").unwrap();
        let pts = sample_parameters(case, 1, 9).unwrap();
        let kinds: Vec<_> = pts.iter().map(|p| (p.index("seq_a").unwrap(), p.index("seq_b").unwrap())).collect();
        assert_eq!(kinds[0], (0, 0));
        assert_eq!(kinds[4], (1, 1));
        assert_eq!(kinds[8], (2, 2));
    }
}
