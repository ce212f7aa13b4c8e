//! q-shifted factorials, Γ_q, B_q and q-binomial coefficients.
//!
//! (a;q)_n = ∏_{j<n}(1 − a qʲ), (a;q)_∞ its limit. Γ_q and B_q are
//! evaluated through sums of logarithms so that they stay finite as q → 1⁻,
//! where (q;q)_∞ itself underflows.

use super::{ln1m, near_nonpositive_integer, C64};
use crate::error::{Error, Result};

/// Base q plus truncation controls shared by q-evaluations. Immutable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QContext {
    q: f64,
    inf_product_terms: usize,
    jackson_tail_tol: f64,
}

impl QContext {
    /// Context with default truncation: enough factors that |a|qᴺ < 1e-18
    /// for |a| ≤ 1, and a Jackson tail tolerance of 1e-14.
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!("q = {q} must lie in (0,1)")));
        }
        let n = ((1e-18f64).ln() / q.ln()).ceil() as usize + 8;
        Ok(Self { q, inf_product_terms: n.max(16), jackson_tail_tol: 1e-14 })
    }

    pub fn with_inf_product_terms(mut self, n: usize) -> Self {
        self.inf_product_terms = n.max(1);
        self
    }

    pub fn with_jackson_tail_tol(mut self, tol: f64) -> Self {
        self.jackson_tail_tol = tol;
        self
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn inf_product_terms(&self) -> usize {
        self.inf_product_terms
    }

    pub fn jackson_tail_tol(&self) -> f64 {
        self.jackson_tail_tol
    }

    /// q^x on the principal branch.
    #[inline]
    pub fn pow(&self, x: C64) -> C64 {
        (x * self.q.ln()).exp()
    }

    /// q^k for integer k.
    #[inline]
    pub fn powi(&self, k: i32) -> f64 {
        self.q.powi(k)
    }

    // Factor count for an infinite product with largest base modulus `amax`.
    fn terms_for(&self, amax: f64) -> usize {
        let extra = if amax > 1.0 { (amax.ln() / -self.q.ln()).ceil() as usize } else { 0 };
        self.inf_product_terms + extra
    }
}

/// (a;q)_n as a finite product.
pub fn q_pochhammer(a: C64, n: usize, ctx: &QContext) -> C64 {
    let mut p = C64::new(1.0, 0.0);
    let mut aq = a;
    for _ in 0..n {
        p *= 1.0 - aq;
        aq *= ctx.q;
    }
    p
}

const INF_MAX_BASE: f64 = 1e10;
const TAIL_REL: f64 = 1e-14;

/// (a;q)_∞, truncated with an a-posteriori check on five further factors.
pub fn q_pochhammer_inf(a: C64, ctx: &QContext) -> Result<C64> {
    if a.norm() >= INF_MAX_BASE {
        return Err(Error::NonConvergent(format!("(a;q)_inf with |a| = {} too large", a.norm())));
    }
    let n = ctx.terms_for(a.norm());
    let mut p = C64::new(1.0, 0.0);
    let mut aq = a;
    for _ in 0..n {
        p *= 1.0 - aq;
        aq *= ctx.q;
    }
    let mut tail = C64::new(1.0, 0.0);
    for _ in 0..5 {
        tail *= 1.0 - aq;
        aq *= ctx.q;
    }
    if (tail - 1.0).norm() >= TAIL_REL {
        return Err(Error::NonConvergent(format!(
            "(a;q)_inf truncation at {n} factors fails the tail check"
        )));
    }
    Ok(p)
}

/// ∏(aᵢ;q)_∞ / ∏(bⱼ;q)_∞ evaluated factor by factor, so that the result stays
/// representable when numerator and denominator both underflow.
pub fn q_pochhammer_inf_ratio(num: &[C64], den: &[C64], ctx: &QContext) -> Result<C64> {
    let amax = num.iter().chain(den).map(|a| a.norm()).fold(0.0, f64::max);
    if amax >= INF_MAX_BASE {
        return Err(Error::NonConvergent(format!("infinite product base of modulus {amax}")));
    }
    let n = ctx.terms_for(amax);
    let mut p = C64::new(1.0, 0.0);
    let mut qj = 1.0;
    let mut tail = C64::new(1.0, 0.0);
    for j in 0..n + 5 {
        let mut f = C64::new(1.0, 0.0);
        for &a in num {
            f *= 1.0 - a * qj;
        }
        for &b in den {
            let d = 1.0 - b * qj;
            if d.norm() < 1e-13 {
                return Err(Error::Pole(format!("denominator factor (b;q)_inf vanishes, b = {b}")));
            }
            f /= d;
        }
        if j < n {
            p *= f;
        } else {
            tail *= f;
        }
        qj *= ctx.q;
    }
    if (tail - 1.0).norm() >= TAIL_REL {
        return Err(Error::NonConvergent(format!(
            "infinite product ratio truncation at {n} factors fails the tail check"
        )));
    }
    Ok(p)
}

/// ln Γ_q(x) = ln[(q;q)_∞/(q^x;q)_∞] + (1−x) ln(1−q), summed termwise.
pub fn ln_q_gamma(x: C64, ctx: &QContext) -> Result<C64> {
    if near_nonpositive_integer(x) {
        return Err(Error::Pole(format!("q_gamma at non-positive integer {x}")));
    }
    let q = ctx.q;
    let qx = ctx.pow(x);
    let n = ctx.terms_for(qx.norm());
    let mut acc = C64::new(0.0, 0.0);
    let mut qj = 1.0;
    for _ in 0..n {
        acc += ln1m(C64::new(qj * q, 0.0)) - ln1m(qx * qj);
        qj *= q;
    }
    Ok(acc + (1.0 - x) * (1.0 - q).ln())
}

/// Γ_q(x) = (q;q)_∞/(q^x;q)_∞ · (1−q)^{1−x}.
pub fn q_gamma(x: C64, ctx: &QContext) -> Result<C64> {
    Ok(ln_q_gamma(x, ctx)?.exp())
}

/// B_q(x,y) = Γ_q(x)Γ_q(y)/Γ_q(x+y).
pub fn q_beta(x: C64, y: C64, ctx: &QContext) -> Result<C64> {
    Ok((ln_q_gamma(x, ctx)? + ln_q_gamma(y, ctx)? - ln_q_gamma(x + y, ctx)?).exp())
}

/// B_q(x,y) through its product form (1−q)(q, q^{x+y};q)_∞/(q^x, q^y;q)_∞.
pub fn q_beta_product(x: C64, y: C64, ctx: &QContext) -> Result<C64> {
    for v in [x, y] {
        if near_nonpositive_integer(v) {
            return Err(Error::Pole(format!("q_beta at non-positive integer {v}")));
        }
    }
    let num = [C64::new(ctx.q, 0.0), ctx.pow(x + y)];
    let den = [ctx.pow(x), ctx.pow(y)];
    Ok((1.0 - ctx.q) * q_pochhammer_inf_ratio(&num, &den, ctx)?)
}

/// Gaussian binomial (q;q)_k / ((q;q)_p (q;q)_{k−p}).
pub fn q_binomial(k: usize, p: usize, ctx: &QContext) -> Result<C64> {
    if p > k {
        return Err(Error::OutOfRange(format!("q_binomial needs p ≤ k, got p = {p}, k = {k}")));
    }
    let p = p.min(k - p);
    let q = ctx.q;
    let mut v = 1.0;
    for j in 0..p {
        // (1 − q^{k−j}) / (1 − q^{j+1})
        v *= (1.0 - q.powi((k - j) as i32)) / (1.0 - q.powi(j as i32 + 1));
    }
    Ok(C64::new(v, 0.0))
}
