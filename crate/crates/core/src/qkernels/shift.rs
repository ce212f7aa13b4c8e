//! The q-shift operator kernel of the q-Erdélyi integral for Φ̃_K.
//!
//! The operator series φ^(3)[…; q, q, q, wz q^{α₂−η₂} 𝔼_{q,x}𝔼_{q,y}]
//! applied to Φ̃_K is never built symbolically. Since 𝔼ᵏ_{q,x}𝔼ᵏ_{q,y}
//! sends f(x, y) to f(qᵏx, qᵏy), it is summed as the explicit series
//!
//! K = Σ_k (q^{η₂};q)_k/(uxq^{λ₃}, vyq^{η₂}, q;q)_k (wzq^{α₂−η₂})ᵏ
//!       · ₃φ₂(q^{λ₃+k}, q^{λ₁−η₁}, u⁻¹; q^{λ₁}, q/(ux); q, q)
//!       · ₃φ₂(q^{η₂+k}, q^{λ₂−μ₂}, v⁻¹; q^{λ₂}, q/(vy); q, q)
//!       · Φ̃_K[α₁, α₂−η₂, α₂−η₂, β₁−λ₃, β₂, β₁−λ₃; α₁−λ₁+η₁, β₂−λ₂+μ₂, β₁−λ₃;
//!             q, uxq^{k+λ₃}, vyq^{k+η₂}, wz].

use super::{den_factor, lattice_index, num_factor, phi_k_q_reexpand, rphis, terminating_order};
use crate::error::{Error, Result};
use crate::hyper::{check_tol, Accumulator, FkParams, SeriesResult};
use crate::numerics::{q_pochhammer_inf_ratio, QContext, C64};

const MAX_K: usize = 10_000;

/// Exponent parameters of the q-Erdélyi integral for Φ̃_K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QErdelyiParams {
    pub alpha1: C64,
    pub alpha2: C64,
    pub beta1: C64,
    pub beta2: C64,
    pub eta1: C64,
    pub eta2: C64,
    pub mu2: C64,
    pub lambda1: C64,
    pub lambda2: C64,
    pub lambda3: C64,
    pub gamma3: C64,
}

impl QErdelyiParams {
    /// Re(α₁+η₁) > Re λ₁ > 0, Re(β₂+μ₂) > Re λ₂ > 0, Re γ₃ > Re β₁ > 0.
    pub fn validate(&self) -> Result<()> {
        let ok = (self.alpha1 + self.eta1).re > self.lambda1.re
            && self.lambda1.re > 0.0
            && (self.beta2 + self.mu2).re > self.lambda2.re
            && self.lambda2.re > 0.0
            && self.gamma3.re > self.beta1.re
            && self.beta1.re > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("q-Erdelyi parameter constraints violated: {self:?}")))
        }
    }

    /// Parameters of the Φ̃_K inside the kernel.
    pub fn inner_fk(&self) -> Result<FkParams> {
        FkParams::new(
            self.alpha1,
            self.alpha2 - self.eta2,
            self.beta1 - self.lambda3,
            self.beta2,
            self.alpha1 - self.lambda1 + self.eta1,
            self.beta2 - self.lambda2 + self.mu2,
            self.beta1 - self.lambda3,
        )
    }

    /// Parameters of the Φ̃_K on the left-hand side.
    pub fn outer_fk(&self) -> Result<FkParams> {
        FkParams::new(
            self.alpha1,
            self.alpha2,
            self.beta1,
            self.beta2,
            self.alpha1 + self.eta1,
            self.beta2 + self.mu2,
            self.gamma3,
        )
    }
}

/// ₃φ₂(q^{a}, q^{b}, t⁻¹; q^{c}, q/(tx); q, q) at the lattice point t = qⁿ;
/// identically 1 when tx = 0.
///
/// The pair (q^{−n}; q^{1−n}/x) enters through the bounded ratio
/// x(q^{n−j}−1)/(xq^{n−j}−q), so deep lattice points do not overflow.
pub(crate) fn lattice_3phi2(a: C64, b: C64, c: C64, t: f64, x: C64, ctx: &QContext) -> Result<C64> {
    let n = lattice_index(t, ctx.q())?;
    lattice_3phi2_at(a, b, c, n, x, ctx)
}

pub(crate) fn lattice_3phi2_at(a: C64, b: C64, c: C64, n: usize, x: C64, ctx: &QContext) -> Result<C64> {
    let q = ctx.q();
    let (qa, qb, qc) = (ctx.pow(a), ctx.pow(b), ctx.pow(c));
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut qj = 1.0;
    for j in 0..n {
        let qnj = q.powi((n - j) as i32);
        let r = (1.0 - qa * qj) * (1.0 - qb * qj) / (den_factor(qc, qj)? * (1.0 - q * qj)) * x * (qnj - 1.0)
            / (x * qnj - q)
            * q;
        term *= r;
        sum += term;
        qj *= q;
    }
    Ok(sum)
}

/// The kernel K above at lattice points u, v and any w, without the factor
/// (uxq^{λ₃}, vyq^{η₂};q)_∞/(ux, vy;q)_∞.
#[allow(clippy::too_many_arguments)]
pub fn qshift_operator_kernel(
    p: &QErdelyiParams,
    u: f64,
    v: f64,
    w: f64,
    x: C64,
    y: C64,
    z: C64,
    ctx: &QContext,
    tol: f64,
) -> Result<SeriesResult> {
    check_tol(tol)?;
    let fk = p.inner_fk()?;
    let q = ctx.q();
    let x0 = x * u * ctx.pow(p.lambda3);
    let y0 = y * v * ctx.pow(p.eta2);
    let wz = z * w;
    for (name, a) in [("u x", x0), ("v y", y0), ("w z", wz)] {
        if a.norm() >= 1.0 {
            return Err(Error::Domain(format!("shifted argument {name} = {a} outside the unit disc")));
        }
    }
    let step = wz * ctx.pow(p.alpha2 - p.eta2);
    let qe2 = ctx.pow(p.eta2);
    let e2_term = terminating_order(qe2, q);
    let inner_tol = (tol * 1e-2).max(1e-17);
    let mut acc = Accumulator::new(tol);
    let mut coef = C64::new(1.0, 0.0);
    let mut qk = 1.0;
    for k in 0..MAX_K {
        let kf = k as f64;
        let fu = lattice_3phi2(p.lambda3 + kf, p.lambda1 - p.eta1, p.lambda1, u, x, ctx)?;
        let fv = lattice_3phi2(p.eta2 + kf, p.lambda2 - p.mu2, p.lambda2, v, y, ctx)?;
        let phik = phi_k_q_reexpand(&fk, x0 * qk, y0 * qk, wz, ctx, inner_tol)?.value;
        let t = coef * fu * fv * phik;
        acc.push(t, t.norm());
        coef *= num_factor(qe2, e2_term, k, qk) * step / ((1.0 - x0 * qk) * (1.0 - y0 * qk) * (1.0 - q * qk));
        if coef == C64::new(0.0, 0.0) {
            acc.terminate();
        }
        if acc.done() {
            break;
        }
        qk *= q;
    }
    let r = acc.result();
    if !r.converged {
        return Err(Error::NonConvergent(format!("q-shift kernel k-sum did not converge (estimate {:.3e})", r.est_trunc_error)));
    }
    Ok(r)
}

/// The full integrand (uxq^{λ₃}, vyq^{η₂};q)_∞/(ux, vy;q)_∞ · K.
#[allow(clippy::too_many_arguments)]
pub fn qfk_erdelyi_integrand(
    p: &QErdelyiParams,
    u: f64,
    v: f64,
    w: f64,
    x: C64,
    y: C64,
    z: C64,
    ctx: &QContext,
    tol: f64,
) -> Result<C64> {
    let (ux, vy) = (x * u, y * v);
    let pre = q_pochhammer_inf_ratio(&[ux * ctx.pow(p.lambda3), vy * ctx.pow(p.eta2)], &[ux, vy], ctx)?;
    Ok(pre * qshift_operator_kernel(p, u, v, w, x, y, z, ctx, tol)?.value)
}

/// (uxq^{β₁}, vyq^{α₂};q)_∞/(ux, vy;q)_∞ · ₃φ₂(q^{α₂}, 0, 0; uxq^{β₁}, vyq^{α₂}; q, wz),
/// the integrand once λ₁ → η₁ and λ₂ → μ₂.
#[allow(clippy::too_many_arguments)]
pub fn qfk_erdelyi_simplified_integrand(
    p: &QErdelyiParams,
    u: f64,
    v: f64,
    w: f64,
    x: C64,
    y: C64,
    z: C64,
    ctx: &QContext,
    tol: f64,
) -> Result<C64> {
    let (ux, vy) = (x * u, y * v);
    let (a, b) = (ux * ctx.pow(p.beta1), vy * ctx.pow(p.alpha2));
    let pre = q_pochhammer_inf_ratio(&[a, b], &[ux, vy], ctx)?;
    let zero = C64::new(0.0, 0.0);
    Ok(pre * rphis(&[ctx.pow(p.alpha2), zero, zero], &[a, b], z * w, ctx, tol)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{q_pochhammer, re};
    use crate::qkernels::phi_k_q_triple;

    fn ctx(q: f64) -> QContext {
        QContext::new(q).unwrap()
    }

    fn params() -> QErdelyiParams {
        QErdelyiParams {
            alpha1: re(0.9),
            alpha2: re(1.4),
            beta1: re(0.7),
            beta2: re(1.1),
            eta1: re(0.8),
            eta2: re(0.6),
            mu2: re(1.3),
            lambda1: re(1.2),
            lambda2: re(0.5),
            lambda3: re(0.4),
            gamma3: re(1.9),
        }
    }

    #[test]
    fn z_zero_keeps_only_first_term() {
        let c = ctx(0.5);
        let p = params();
        let (u, v, w) = (0.25, 0.5, 0.125);
        let (x, y) = (re(0.3), re(-0.2));
        let k = qshift_operator_kernel(&p, u, v, w, x, y, re(0.0), &c, 1e-14).unwrap().value;
        let fu = lattice_3phi2(p.lambda3, p.lambda1 - p.eta1, p.lambda1, u, x, &c).unwrap();
        let fv = lattice_3phi2(p.eta2, p.lambda2 - p.mu2, p.lambda2, v, y, &c).unwrap();
        let fk = p.inner_fk().unwrap();
        let e = fu * fv * phi_k_q_triple(&fk, x * u * c.pow(p.lambda3), y * v * c.pow(p.eta2), re(0.0), &c, 1e-15).unwrap().value;
        assert!((k - e).norm() < 1e-13);
    }

    #[test]
    fn eta2_zero_collapses() {
        let c = ctx(0.5);
        let mut p = params();
        p.eta2 = re(0.0);
        let (u, v, w) = (0.5, 0.25, 0.5);
        let (x, y, z) = (re(0.2), re(0.25), re(0.3));
        let k = qshift_operator_kernel(&p, u, v, w, x, y, z, &c, 1e-14).unwrap();
        let fu = lattice_3phi2(p.lambda3, p.lambda1 - p.eta1, p.lambda1, u, x, &c).unwrap();
        // upper q⁰ makes the v-factor 1
        let fk = p.inner_fk().unwrap();
        let e = fu * phi_k_q_triple(&fk, x * u * c.pow(p.lambda3), y * v, z * w, &c, 1e-15).unwrap().value;
        assert!((k.value - e).norm() < 1e-12);
        assert_eq!(k.terms_used, 1);
    }

    #[test]
    fn matches_direct_sixty_term_sum() {
        let c = ctx(0.5);
        let p = params();
        let (u, v, w) = (0.125, 0.5, 0.25);
        let (x, y, z) = (C64::new(0.25, 0.1), re(-0.3), re(0.28));
        let k = qshift_operator_kernel(&p, u, v, w, x, y, z, &c, 1e-14).unwrap().value;
        let fk = p.inner_fk().unwrap();
        let (x0, y0) = (x * u * c.pow(p.lambda3), y * v * c.pow(p.eta2));
        let mut s = C64::new(0.0, 0.0);
        let qc = re(0.5);
        for kk in 0..60usize {
            let coef = q_pochhammer(c.pow(p.eta2), kk, &c)
                / (q_pochhammer(x0, kk, &c) * q_pochhammer(y0, kk, &c) * q_pochhammer(qc, kk, &c))
                * (w * z * c.pow(p.alpha2 - p.eta2)).powu(kk as u32);
            // ₃φ₂ factors by their defining sums, u⁻¹ = 8 and v⁻¹ = 2
            let f = |a: C64, b: C64, cc: C64, inv: f64, tx: C64| -> C64 {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..=3usize {
                    acc += q_pochhammer(c.pow(a), j, &c) * q_pochhammer(c.pow(b), j, &c) * q_pochhammer(re(inv), j, &c)
                        / (q_pochhammer(c.pow(cc), j, &c) * q_pochhammer(qc / tx, j, &c) * q_pochhammer(qc, j, &c))
                        * 0.5f64.powi(j as i32);
                }
                acc
            };
            let fu = f(p.lambda3 + kk as f64, p.lambda1 - p.eta1, p.lambda1, 8.0, x * u);
            let fv = f(p.eta2 + kk as f64, p.lambda2 - p.mu2, p.lambda2, 2.0, y * v);
            let q_k = 0.5f64.powi(kk as i32);
            s += coef * fu * fv * phi_k_q_triple(&fk, x0 * q_k, y0 * q_k, w * z, &c, 1e-15).unwrap().value;
        }
        assert!((k - s).norm() < 1e-12 * s.norm().max(1.0));
    }

    #[test]
    fn lattice_only_and_domain() {
        let c = ctx(0.5);
        let p = params();
        assert!(qshift_operator_kernel(&p, 0.3, 0.5, 0.5, re(0.2), re(0.2), re(0.2), &c, 1e-12).is_err());
        assert!(p.validate().is_ok());
        let mut bad = p;
        bad.gamma3 = re(0.5);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn simplified_integrand_at_zero_arguments() {
        let c = ctx(0.5);
        let p = params();
        let v = qfk_erdelyi_simplified_integrand(&p, 0.5, 0.5, 0.5, re(0.0), re(0.0), re(0.0), &c, 1e-14).unwrap();
        assert!((v - re(1.0)).norm() < 1e-15);
    }

    #[test]
    fn stable_lattice_3phi2_matches_generic() {
        let c = ctx(0.6);
        let (a, b, cc) = (re(0.7), re(-0.4), re(1.3));
        let x = C64::new(0.3, -0.1);
        for n in [0usize, 1, 3, 8, 15] {
            let t = c.powi(n as i32);
            let v = lattice_3phi2(a, b, cc, t, x, &c).unwrap();
            let up = [c.pow(a), c.pow(b), re(1.0 / t)];
            let w = rphis(&up, &[c.pow(cc), re(0.6) / (x * t)], re(0.6), &c, 1e-16).unwrap().value;
            assert!((v - w).norm() < 1e-11 * w.norm().max(1.0), "{n}: {v} vs {w}");
        }
        // deep lattice points stay finite
        assert!(lattice_3phi2_at(a, b, cc, 900, x, &c).unwrap().is_finite());
        assert_eq!(lattice_3phi2(a, b, cc, 0.36, re(0.0), &c).unwrap(), re(1.0));
    }
}
