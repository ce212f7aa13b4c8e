//! The q-analogue Φ̃_K of Saran's F_K, with exponent parameters:
//!
//! Φ̃_K = Σ (q^{α₁};q)_m(q^{α₂};q)_{n+p}(q^{β₁};q)_{m+p}(q^{β₂};q)_n
//!        / ((q^{γ₁},q;q)_m(q^{γ₂},q;q)_n(q^{γ₃},q;q)_p) xᵐyⁿzᵖ
//!      = Σ_p (q^{α₂},q^{β₁};q)_p/(q^{γ₃},q;q)_p
//!        ₂φ₁(q^{β₁+p},q^{α₁};q^{γ₁};q,x) ₂φ₁(q^{α₂+p},q^{β₂};q^{γ₂};q,y) zᵖ
//!
//! for |x|, |y|, |z| < 1.

use super::{den_factor, is_q_pole, rphis, PochTable};
use crate::error::{Error, Result};
use crate::hyper::{check_tol, Accumulator, FkParams, KahanSum, SeriesResult};
use crate::numerics::{QContext, C64};

const MAX_SHELLS: usize = 20_000;

struct Bases {
    a1: C64,
    a2: C64,
    b1: C64,
    b2: C64,
    g1: C64,
    g2: C64,
    g3: C64,
}

fn prepare(p: &FkParams, x: C64, y: C64, z: C64, ctx: &QContext, tol: f64) -> Result<Bases> {
    check_tol(tol)?;
    for (name, v) in [("x", x), ("y", y), ("z", z)] {
        if v.norm() >= 1.0 {
            return Err(Error::Domain(format!("Phi_K needs |{name}| < 1, got {}", v.norm())));
        }
    }
    let b = Bases {
        a1: ctx.pow(p.alpha1),
        a2: ctx.pow(p.alpha2),
        b1: ctx.pow(p.beta1),
        b2: ctx.pow(p.beta2),
        g1: ctx.pow(p.gamma1),
        g2: ctx.pow(p.gamma2),
        g3: ctx.pow(p.gamma3),
    };
    for g in [b.g1, b.g2, b.g3] {
        if is_q_pole(g, ctx.q()) {
            return Err(Error::Pole(format!("Phi_K lower base {g} is q^(-m)")));
        }
    }
    Ok(b)
}

/// Triple series summed over shells m+n+p = s.
pub fn phi_k_q_triple(p: &FkParams, x: C64, y: C64, z: C64, ctx: &QContext, tol: f64) -> Result<SeriesResult> {
    let b = prepare(p, x, y, z, ctx, tol)?;
    let q = ctx.q();
    // axis tables carry the argument powers: xᵐ(q^{α₁};q)_m/(q^{γ₁},q;q)_m
    let mut tx = PochTable::new(&[b.a1], &[b.g1, C64::new(q, 0.0)], q);
    let mut ty = PochTable::new(&[b.b2], &[b.g2, C64::new(q, 0.0)], q);
    let mut tz = PochTable::new(&[], &[b.g3, C64::new(q, 0.0)], q);
    let mut ta2 = PochTable::new(&[b.a2], &[], q);
    let mut tb1 = PochTable::new(&[b.b1], &[], q);
    let (mut xp, mut yp, mut zp) = (vec![C64::new(1.0, 0.0)], vec![C64::new(1.0, 0.0)], vec![C64::new(1.0, 0.0)]);
    let mut acc = Accumulator::new(tol);
    for s in 0..MAX_SHELLS {
        for t in [&mut tx, &mut ty, &mut tz, &mut ta2, &mut tb1] {
            t.ensure(s + 1)?;
        }
        if s > 0 {
            xp.push(xp[s - 1] * x);
            yp.push(yp[s - 1] * y);
            zp.push(zp[s - 1] * z);
        }
        let mut sum = KahanSum::default();
        let mut abs = 0.0;
        for m in 0..=s {
            let cx = tx.get(m) * xp[m];
            for n in 0..=s - m {
                let pp = s - m - n;
                let t = cx * ty.get(n) * yp[n] * tz.get(pp) * zp[pp] * ta2.get(n + pp) * tb1.get(m + pp);
                sum.add(t);
                abs += t.norm();
            }
        }
        acc.push(sum.value(), abs);
        if acc.done() {
            break;
        }
    }
    Ok(acc.result())
}

/// Single series over p of the ₂φ₁ products.
pub fn phi_k_q_reexpand(p: &FkParams, x: C64, y: C64, z: C64, ctx: &QContext, tol: f64) -> Result<SeriesResult> {
    let b = prepare(p, x, y, z, ctx, tol)?;
    let q = ctx.q();
    let inner_tol = (tol * 1e-2).max(1e-17);
    let mut acc = Accumulator::new(tol);
    let mut c = C64::new(1.0, 0.0);
    let mut zp = C64::new(1.0, 0.0);
    let mut qp = 1.0;
    for _ in 0..MAX_SHELLS {
        let fx = rphis(&[b.b1 * qp, b.a1], &[b.g1], x, ctx, inner_tol)?;
        let fy = rphis(&[b.a2 * qp, b.b2], &[b.g2], y, ctx, inner_tol)?;
        let t = c * zp * fx.value * fy.value;
        acc.push(t, t.norm());
        if acc.done() || z == C64::new(0.0, 0.0) {
            if z == C64::new(0.0, 0.0) {
                acc.terminate();
            }
            break;
        }
        c *= (1.0 - b.a2 * qp) * (1.0 - b.b1 * qp) / (den_factor(b.g3, qp)? * (1.0 - qp * q));
        zp *= z;
        qp *= q;
    }
    Ok(acc.result())
}

/// Φ̃_K by both forms. Returns the reexpansion value; fails with a
/// cross-check error when the forms differ by more than 100·tol relative.
pub fn phi_k_q(p: &FkParams, x: C64, y: C64, z: C64, ctx: &QContext, tol: f64) -> Result<SeriesResult> {
    let a = phi_k_q_reexpand(p, x, y, z, ctx, tol)?;
    let t = phi_k_q_triple(p, x, y, z, ctx, tol)?;
    let diff = (a.value - t.value).norm() / (1.0 + a.value.norm());
    if diff > 100.0 * tol {
        return Err(Error::CrossCheck(format!(
            "Phi_K forms disagree: triple {} vs reexpansion {} (relative {diff:.3e})",
            t.value, a.value
        )));
    }
    Ok(a)
}
