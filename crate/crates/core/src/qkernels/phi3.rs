//! The triple basic series φ^(3) with joint-index numerators:
//!
//! Σ (a)_{m+n+p}/(e)_{m+n+p} · (b)_{m+n}(b')_{n+p}(b'')_{p+m}/((g)_{m+n}(g')_{n+p}(g'')_{p+m})
//!   · (c)_m(c')_n(c'')_p/((h)_m(h')_n(h'')_p) · xᵐyⁿzᵖ/((q;q)_m(q;q)_n(q;q)_p)
//!
//! where (a)_k stands for the product of (aᵢ;q)_k over a parameter group.

use super::{is_q_pole, PochTable};
use crate::error::{Error, Result};
use crate::hyper::{check_tol, Accumulator, KahanSum, SeriesResult};
use crate::numerics::{QContext, C64};

const MAX_SHELLS: usize = 20_000;

/// Parameter groups of φ^(3), as bases. `bp`, `bpp` are (b'), (b'') and
/// likewise for the other primed groups.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Phi3Spec {
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    pub bp: Vec<C64>,
    pub bpp: Vec<C64>,
    pub c: Vec<C64>,
    pub cp: Vec<C64>,
    pub cpp: Vec<C64>,
    pub e: Vec<C64>,
    pub g: Vec<C64>,
    pub gp: Vec<C64>,
    pub gpp: Vec<C64>,
    pub h: Vec<C64>,
    pub hp: Vec<C64>,
    pub hpp: Vec<C64>,
}

impl Phi3Spec {
    /// Reads every entry as an exponent and replaces it by q to that power.
    pub fn tilde(mut self, ctx: &QContext) -> Self {
        for v in self.groups_mut() {
            for x in v.iter_mut() {
                *x = ctx.pow(*x);
            }
        }
        self
    }

    fn groups_mut(&mut self) -> [&mut Vec<C64>; 14] {
        [
            &mut self.a,
            &mut self.b,
            &mut self.bp,
            &mut self.bpp,
            &mut self.c,
            &mut self.cp,
            &mut self.cpp,
            &mut self.e,
            &mut self.g,
            &mut self.gp,
            &mut self.gpp,
            &mut self.h,
            &mut self.hp,
            &mut self.hpp,
        ]
    }

    /// Rejects denominators of the form q^{−m}.
    pub fn validate(&self, q: f64) -> Result<()> {
        for v in [&self.e, &self.g, &self.gp, &self.gpp, &self.h, &self.hp, &self.hpp] {
            for &d in v {
                if is_q_pole(d, q) {
                    return Err(Error::Pole(format!("phi3 denominator base {d} is q^(-m)")));
                }
            }
        }
        Ok(())
    }
}

fn min_bound(ts: &[&PochTable]) -> Option<usize> {
    ts.iter().filter_map(|t| t.bound()).min()
}

/// φ^(3)[x, y, z] summed over shells m+n+p = s. An index capped by a
/// terminating numerator needs no bound on its argument.
pub fn phi3(spec: &Phi3Spec, x: C64, y: C64, z: C64, ctx: &QContext, tol: f64) -> Result<SeriesResult> {
    check_tol(tol)?;
    let q = ctx.q();
    spec.validate(q)?;
    let qb = C64::new(q, 0.0);
    let with_q = |h: &[C64]| {
        let mut v = h.to_vec();
        v.push(qb);
        v
    };
    let mut ta = PochTable::new(&spec.a, &spec.e, q);
    let mut tb = PochTable::new(&spec.b, &spec.g, q);
    let mut tbp = PochTable::new(&spec.bp, &spec.gp, q);
    let mut tbpp = PochTable::new(&spec.bpp, &spec.gpp, q);
    let mut tx = PochTable::new(&spec.c, &with_q(&spec.h), q);
    let mut ty = PochTable::new(&spec.cp, &with_q(&spec.hp), q);
    let mut tz = PochTable::new(&spec.cpp, &with_q(&spec.hpp), q);
    let inf = usize::MAX;
    let cap = |o: Option<usize>| o.unwrap_or(inf);
    let cm = cap(min_bound(&[&tx, &ta, &tb, &tbpp]));
    let cn = cap(min_bound(&[&ty, &ta, &tb, &tbp]));
    let cp = cap(min_bound(&[&tz, &ta, &tbp, &tbpp]));
    for (c, v, name) in [(cm, x, "x"), (cn, y, "y"), (cp, z, "z")] {
        if c == inf && v.norm() >= 1.0 {
            return Err(Error::Domain(format!("phi3 needs |{name}| < 1 on a non-terminating index, got {}", v.norm())));
        }
    }
    let total = if cm == inf || cn == inf || cp == inf { inf } else { cm + cn + cp };
    let (mut xp, mut yp, mut zp) = (vec![C64::new(1.0, 0.0)], vec![C64::new(1.0, 0.0)], vec![C64::new(1.0, 0.0)]);
    let mut acc = Accumulator::new(tol);
    for s in 0..MAX_SHELLS {
        if s > total {
            acc.terminate();
            break;
        }
        let lim = |c: usize| s.min(c) + 1;
        tx.ensure(lim(cm))?;
        ty.ensure(lim(cn))?;
        tz.ensure(lim(cp))?;
        ta.ensure(lim(cap(ta.bound())))?;
        tb.ensure(lim(cap(tb.bound())))?;
        tbp.ensure(lim(cap(tbp.bound())))?;
        tbpp.ensure(lim(cap(tbpp.bound())))?;
        if s > 0 {
            xp.push(xp[s - 1] * x);
            yp.push(yp[s - 1] * y);
            zp.push(zp[s - 1] * z);
        }
        let mut sum = KahanSum::default();
        let mut abs = 0.0;
        for m in 0..=s.min(cm) {
            let fx = tx.get(m) * xp[m];
            for n in 0..=(s - m).min(cn) {
                let p = s - m - n;
                if p > cp {
                    continue;
                }
                // joint tables are zero past their own bound
                let get = |t: &PochTable, k: usize| if t.bound().is_some_and(|b| k > b) { C64::new(0.0, 0.0) } else { t.get(k) };
                let t = fx
                    * ty.get(n)
                    * yp[n]
                    * tz.get(p)
                    * zp[p]
                    * get(&ta, s)
                    * get(&tb, m + n)
                    * get(&tbp, n + p)
                    * get(&tbpp, p + m);
                sum.add(t);
                abs += t.norm();
            }
        }
        acc.push(sum.value(), abs);
        if s == total {
            acc.terminate();
        }
        if acc.done() {
            break;
        }
    }
    Ok(acc.result())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{q_pochhammer, re};
    use crate::qkernels::rphis;

    fn ctx(q: f64) -> QContext {
        QContext::new(q).unwrap()
    }

    #[test]
    fn origin() {
        let c = ctx(0.5);
        let s = Phi3Spec { a: vec![re(0.3)], bp: vec![re(0.6)], h: vec![re(0.2)], ..Default::default() };
        assert_eq!(phi3(&s, re(0.0), re(0.0), re(0.0), &c, 1e-14).unwrap().value, re(1.0));
    }

    #[test]
    fn single_index_collapse() {
        let c = ctx(0.5);
        let (a, g) = (c.pow(re(0.7)), c.pow(re(1.6)));
        let s = Phi3Spec { c: vec![a], h: vec![g], ..Default::default() };
        let v = phi3(&s, re(0.4), re(0.0), re(0.0), &c, 1e-15).unwrap().value;
        // ₂φ₁(a, 0; g; q, x)
        let w = rphis(&[a, re(0.0)], &[g], re(0.4), &c, 1e-15).unwrap().value;
        assert!((v - w).norm() < 1e-14);
    }

    fn brute(s: &Phi3Spec, x: C64, y: C64, z: C64, c: &QContext, k: usize) -> C64 {
        let pr = |v: &[C64], n: usize| v.iter().map(|&a| q_pochhammer(a, n, c)).product::<C64>();
        let qq = |n: usize| q_pochhammer(re(c.q()), n, c);
        let mut acc = C64::new(0.0, 0.0);
        for m in 0..k {
            for n in 0..k - m {
                for p in 0..k - m - n {
                    let num = pr(&s.a, m + n + p) * pr(&s.b, m + n) * pr(&s.bp, n + p) * pr(&s.bpp, p + m)
                        * pr(&s.c, m) * pr(&s.cp, n) * pr(&s.cpp, p);
                    let den = pr(&s.e, m + n + p) * pr(&s.g, m + n) * pr(&s.gp, n + p) * pr(&s.gpp, p + m)
                        * pr(&s.h, m) * pr(&s.hp, n) * pr(&s.hpp, p) * qq(m) * qq(n) * qq(p);
                    acc += num / den * x.powu(m as u32) * y.powu(n as u32) * z.powu(p as u32);
                }
            }
        }
        acc
    }

    #[test]
    fn corollary_integrand_matches_brute_force() {
        let c = ctx(0.5);
        let e = |v: &[f64]| v.iter().map(|&a| re(a)).collect::<Vec<_>>();
        let s = Phi3Spec {
            bp: e(&[1.3]),
            bpp: e(&[0.6]),
            c: e(&[0.9, 1.7]),
            cp: e(&[0.4, 2.1]),
            cpp: e(&[1.2]),
            h: e(&[1.5, 0.8]),
            hp: e(&[2.2, 1.1]),
            hpp: e(&[0.7, 1.9]),
            ..Default::default()
        }
        .tilde(&c);
        let (x, y, z) = (re(0.21), re(-0.17), re(0.26));
        let v = phi3(&s, x, y, z, &c, 1e-15).unwrap().value;
        let w = brute(&s, x, y, z, &c, 40);
        assert!((v - w).norm() < 1e-13);
    }

    #[test]
    fn terminating_indices_allow_large_arguments() {
        let c = ctx(0.5);
        let s = Phi3Spec {
            bp: vec![c.pow(re(0.8))],
            bpp: vec![c.pow(re(1.4))],
            c: vec![c.pow(re(0.6)), c.powi(-2).into()],
            cp: vec![c.pow(re(1.1)), c.powi(-1).into()],
            cpp: vec![c.powi(-2).into()],
            h: vec![c.pow(re(1.3)), re(0.37)],
            hp: vec![c.pow(re(0.9)), re(-0.8)],
            hpp: vec![c.pow(re(1.7)), re(2.9)],
            ..Default::default()
        };
        let v = phi3(&s, re(0.5), re(0.5), re(0.5), &c, 1e-15).unwrap();
        assert!(v.converged && v.est_trunc_error == 0.0);
        let w = brute(&s, re(0.5), re(0.5), re(0.5), &c, 6);
        assert!((v.value - w).norm() < 1e-13 * w.norm().max(1.0));
        // the same spec at argument 2 is still finite
        assert!(phi3(&s, re(2.0), re(0.5), re(0.5), &c, 1e-15).is_ok());
    }

    #[test]
    fn errors() {
        let c = ctx(0.5);
        let s = Phi3Spec { c: vec![re(0.3)], ..Default::default() };
        assert!(matches!(phi3(&s, re(1.2), re(0.0), re(0.0), &c, 1e-12), Err(Error::Domain(_))));
        let bad = Phi3Spec { gp: vec![re(4.0)], ..Default::default() };
        assert!(matches!(phi3(&bad, re(0.1), re(0.1), re(0.1), &c, 1e-12), Err(Error::Pole(_))));
    }
}
