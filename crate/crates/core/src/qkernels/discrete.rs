//! Terminating identities: the discrete analogue of the q-Erdélyi integral
//! for ₃φ₂ and the weights of the finite-sum analogue of the Φ̃_K integral.

use super::rphis;
use crate::error::{Error, Result};
use crate::numerics::{q_pochhammer, q_pochhammer_inf_ratio, QContext, C64};

// finite sums below are exact; this only bounds the series engine's checks
const EXACT_TOL: f64 = 1e-16;

/// Bases α, β, γ, δ, λ, μ, ν of the discrete ₃φ₂ expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasperBases {
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub delta: C64,
    pub lambda: C64,
    pub mu: C64,
    pub nu: C64,
}

fn checked_div(num: C64, den: C64, what: &str) -> Result<C64> {
    if den.norm() < 1e-300 || !(num / den).is_finite() {
        return Err(Error::Pole(format!("{what}: vanishing denominator")));
    }
    Ok(num / den)
}

/// ₃φ₂(α, β, q^{−n}; γ, δ; q, q).
pub fn gasper_discrete_lhs(b: &GasperBases, n: usize, ctx: &QContext) -> Result<C64> {
    let qn = C64::new(ctx.powi(-(n as i32)), 0.0);
    Ok(rphis(&[b.alpha, b.beta, qn], &[b.gamma, b.delta], C64::new(ctx.q(), 0.0), ctx, EXACT_TOL)?.value)
}

/// The finite double sum
///
/// (q,λ;q)_n/(γ,μ;q)_n Σ_k (ν;q)_k(γμ/(λν);q)_{n−k}/((q;q)_k(q;q)_{n−k}) ν^{n−k}
///   · ₃φ₂(μ/λ, γ/λ, q^{k−n}; γμ/(λν), q^{1−n}/λ; q, q^{1−k}/ν)
///   · ₄φ₃(α, β, μ, q^{−k}; λ, ν, δ; q, q),
///
/// which equals [`gasper_discrete_lhs`].
pub fn gasper_discrete_3phi2(b: &GasperBases, n: usize, ctx: &QContext) -> Result<C64> {
    let q = ctx.q();
    let qc = C64::new(q, 0.0);
    let GasperBases { alpha, beta, gamma, delta, lambda, mu, nu } = *b;
    let rho = gamma * mu / (lambda * nu);
    let pre = checked_div(
        q_pochhammer(qc, n, ctx) * q_pochhammer(lambda, n, ctx),
        q_pochhammer(gamma, n, ctx) * q_pochhammer(mu, n, ctx),
        "gasper prefactor",
    )?;
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..=n {
        let m = n - k;
        let coef = checked_div(
            q_pochhammer(nu, k, ctx) * q_pochhammer(rho, m, ctx) * nu.powu(m as u32),
            q_pochhammer(qc, k, ctx) * q_pochhammer(qc, m, ctx),
            "gasper coefficient",
        )?;
        let inner = rphis(
            &[mu / lambda, gamma / lambda, C64::new(ctx.powi(k as i32 - n as i32), 0.0)],
            &[rho, ctx.powi(1 - n as i32) / lambda],
            ctx.powi(1 - k as i32) / nu,
            ctx,
            EXACT_TOL,
        )?
        .value;
        let outer = rphis(
            &[alpha, beta, mu, C64::new(ctx.powi(-(k as i32)), 0.0)],
            &[lambda, nu, delta],
            qc,
            ctx,
            EXACT_TOL,
        )?
        .value;
        sum += coef * inner * outer;
    }
    Ok(pre * sum)
}

/// Exponent parameters of the three weight families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteWeightParams {
    pub alpha1: C64,
    pub beta2: C64,
    pub gamma1: C64,
    pub gamma2: C64,
    pub gamma3: C64,
    pub lambda1: C64,
    pub lambda2: C64,
    pub mu1: C64,
    pub mu2: C64,
    pub mu3: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    W1,
    W2,
    W3,
}

// (a, γ, λ, μ) for the ₃φ₂-carrying families
fn family(p: &DiscreteWeightParams, kind: WeightKind) -> Option<(C64, C64, C64, C64)> {
    match kind {
        WeightKind::W1 => Some((p.alpha1, p.gamma1, p.lambda1, p.mu1)),
        WeightKind::W2 => Some((p.beta2, p.gamma2, p.lambda2, p.mu2)),
        WeightKind::W3 => None,
    }
}

/// w(i, r; q) for i ≤ r:
///
/// w₁ = (q^a,q;q)_r/(q^γ,q^λ;q)_r · (q^{γ+λ−a−μ};q)_{r−i}/(q;q)_{r−i}
///      · (q^μ;q)_i/(q;q)_i · q^{(r−i)μ}
///      · ₃φ₂(q^{λ−a}, q^{γ−a}, q^{i−r}; q^{γ+λ−a−μ}, q^{1−r−a}; q, q^{1−i−μ})
///
/// with (a,γ,λ,μ) = (α₁,γ₁,λ₁,μ₁) for w₁ and (β₂,γ₂,λ₂,μ₂) for w₂, and
///
/// w₃ = (q;q)_r/(q^{γ₃};q)_r · (q^{γ₃−μ₃};q)_{r−i}/(q;q)_{r−i}
///      · (q^{μ₃};q)_i/(q;q)_i · q^{(r−i)μ₃}.
pub fn discrete_weight(kind: WeightKind, i: usize, r: usize, p: &DiscreteWeightParams, ctx: &QContext) -> Result<C64> {
    if i > r {
        return Err(Error::OutOfRange(format!("weight index i = {i} exceeds r = {r}")));
    }
    let c = ctx;
    let qc = C64::new(c.q(), 0.0);
    let qp = |e: C64, n: usize| q_pochhammer(c.pow(e), n, c);
    let qq = |n: usize| q_pochhammer(qc, n, c);
    let m = r - i;
    match family(p, kind) {
        Some((a, g, l, mu)) => {
            let s = g + l - a - mu;
            let head = checked_div(qp(a, r) * qq(r), qp(g, r) * qp(l, r), "weight prefactor")?;
            let mid = qp(s, m) / qq(m) * qp(mu, i) / qq(i) * c.pow(mu * m as f64);
            let phi = rphis(
                &[c.pow(l - a), c.pow(g - a), C64::new(c.powi(i as i32 - r as i32), 0.0)],
                &[c.pow(s), c.pow(1.0 - a - r as f64)],
                c.pow(1.0 - mu - i as f64),
                c,
                EXACT_TOL,
            )?
            .value;
            Ok(head * mid * phi)
        }
        None => {
            let (g, mu) = (p.gamma3, p.mu3);
            let head = checked_div(qq(r), qp(g, r), "weight prefactor")?;
            Ok(head * qp(g - mu, m) / qq(m) * qp(mu, i) / qq(i) * c.pow(mu * m as f64))
        }
    }
}

/// lim_{r→∞} w(r−i, r; q):
///
/// (q^a,q^μ;q)_∞/(q^γ,q^λ;q)_∞ · (q^{γ+λ−a−μ};q)_i/(q;q)_i · q^{iμ}
///   · ₃φ₁(q^{λ−a}, q^{γ−a}, q^{−i}; q^{γ+λ−a−μ}; q, q^{a−μ+i})
///
/// for w₁, w₂ (each with its own μ in q^{iμ}), and
/// (q^{μ₃};q)_∞/(q^{γ₃};q)_∞ · (q^{γ₃−μ₃};q)_i/(q;q)_i · q^{iμ₃} for w₃.
pub fn discrete_weight_limit(kind: WeightKind, i: usize, p: &DiscreteWeightParams, ctx: &QContext) -> Result<C64> {
    let c = ctx;
    let qp = |e: C64, n: usize| q_pochhammer(c.pow(e), n, c);
    let qq = q_pochhammer(C64::new(c.q(), 0.0), i, c);
    match family(p, kind) {
        Some((a, g, l, mu)) => {
            let s = g + l - a - mu;
            let head = q_pochhammer_inf_ratio(&[c.pow(a), c.pow(mu)], &[c.pow(g), c.pow(l)], c)?;
            let phi = rphis(
                &[c.pow(l - a), c.pow(g - a), C64::new(c.powi(-(i as i32)), 0.0)],
                &[c.pow(s)],
                c.pow(a - mu + i as f64),
                c,
                EXACT_TOL,
            )?
            .value;
            Ok(head * qp(s, i) / qq * c.pow(mu * i as f64) * phi)
        }
        None => {
            let (g, mu) = (p.gamma3, p.mu3);
            let head = q_pochhammer_inf_ratio(&[c.pow(mu)], &[c.pow(g)], c)?;
            Ok(head * qp(g - mu, i) / qq * c.pow(mu * i as f64))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::re;
    use proptest::prelude::*;

    fn ctx(q: f64) -> QContext {
        QContext::new(q).unwrap()
    }

    fn params() -> DiscreteWeightParams {
        DiscreteWeightParams {
            alpha1: re(0.7),
            beta2: re(1.3),
            gamma1: re(1.9),
            gamma2: re(2.2),
            gamma3: re(1.6),
            lambda1: re(0.5),
            lambda2: re(0.9),
            mu1: re(1.1),
            mu2: re(0.6),
            mu3: re(0.8),
        }
    }

    fn bases(c: &QContext) -> GasperBases {
        GasperBases {
            alpha: c.pow(re(0.4)),
            beta: c.pow(re(1.3)),
            gamma: c.pow(re(1.7)),
            delta: re(0.37),
            lambda: c.pow(re(0.8)),
            mu: c.pow(re(1.1)),
            nu: c.pow(re(0.6)),
        }
    }

    #[test]
    fn gasper_n_zero_and_one() {
        let c = ctx(0.5);
        let b = bases(&c);
        assert!((gasper_discrete_3phi2(&b, 0, &c).unwrap() - re(1.0)).norm() < 1e-15);
        assert!((gasper_discrete_lhs(&b, 0, &c).unwrap() - re(1.0)).norm() < 1e-15);
        let l = gasper_discrete_lhs(&b, 1, &c).unwrap();
        let r = gasper_discrete_3phi2(&b, 1, &c).unwrap();
        assert!((l - r).norm() < 1e-13);
        // n = 1 by hand: 1 + (1−α)(1−β)(1−q^{−1})q/((1−γ)(1−δ)(1−q))
        let q = 0.5;
        let h = re(1.0) + (1.0 - b.alpha) * (1.0 - b.beta) * (1.0 - 1.0 / q) * q / ((1.0 - b.gamma) * (1.0 - b.delta) * (1.0 - q));
        assert!((l - h).norm() < 1e-14);
    }

    #[test]
    fn gasper_mu_equal_lambda_collapses() {
        // μ = λ makes the inner ₃φ₂ trivial; the sum is then
        // (q;q)_n/(γ;q)_n Σ_k (ν)_k(γ/ν)_{n−k}/((q)_k(q)_{n−k}) ν^{n−k} ₃φ₂(α,β,q^{−k};ν,δ;q,q)
        let c = ctx(0.5);
        let mut b = bases(&c);
        b.mu = b.lambda;
        let qc = re(0.5);
        for n in 0..=3usize {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..=n {
                let m = n - k;
                let inner = rphis(&[b.alpha, b.beta, re(c.powi(-(k as i32)))], &[b.nu, b.delta], qc, &c, 1e-16).unwrap().value;
                s += q_pochhammer(b.nu, k, &c) * q_pochhammer(b.gamma / b.nu, m, &c) * b.nu.powu(m as u32)
                    / (q_pochhammer(qc, k, &c) * q_pochhammer(qc, m, &c))
                    * inner;
            }
            s *= q_pochhammer(qc, n, &c) / q_pochhammer(b.gamma, n, &c);
            let r = gasper_discrete_3phi2(&b, n, &c).unwrap();
            assert!((r - s).norm() < 1e-13 * s.norm().max(1.0));
            assert!((r - gasper_discrete_lhs(&b, n, &c).unwrap()).norm() < 1e-12 * s.norm().max(1.0));
        }
    }

    #[test]
    fn w3_at_full_index() {
        let c = ctx(0.5);
        let p = params();
        let qp = |e: C64, n: usize| q_pochhammer(c.pow(e), n, &c);
        let qq = |n: usize| q_pochhammer(re(0.5), n, &c);
        for t in 0..5 {
            let v = discrete_weight(WeightKind::W3, t, t, &p, &c).unwrap();
            let e = qq(t) / qp(p.gamma3, t) * qp(p.mu3, t) / qq(t);
            assert!((v - e).norm() < 1e-15 * e.norm().max(1.0));
        }
    }

    #[test]
    fn w1_at_full_index_has_trivial_phi() {
        // i = r: the ₃φ₂ has upper q⁰ and equals 1
        let c = ctx(0.5);
        let p = params();
        let qp = |e: C64, n: usize| q_pochhammer(c.pow(e), n, &c);
        let qq = |n: usize| q_pochhammer(re(0.5), n, &c);
        for r in 0..5 {
            let v = discrete_weight(WeightKind::W1, r, r, &p, &c).unwrap();
            let e = qp(p.alpha1, r) * qq(r) / (qp(p.gamma1, r) * qp(p.lambda1, r)) * qp(p.mu1, r) / qq(r);
            assert!((v - e).norm() < 1e-14 * e.norm().max(1.0));
        }
        assert!(matches!(discrete_weight(WeightKind::W1, 3, 2, &p, &c), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn weights_sum_against_test_series() {
        // Σ_i w₁(i,r) ₃φ₂(q^{β}, q^{λ₁}, q^{−i}; q^{μ₁}, δ; q, q) = ₃φ₂(q^{α₁}, q^{β}, q^{−r}; q^{γ₁}, δ; q, q)
        let c = ctx(0.5);
        let p = params();
        let (beta, delta) = (c.pow(re(0.45)), re(0.29));
        let qc = re(0.5);
        for r in 0..=4usize {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..=r {
                let f = rphis(&[beta, c.pow(p.lambda1), re(c.powi(-(i as i32)))], &[c.pow(p.mu1), delta], qc, &c, 1e-16).unwrap().value;
                s += discrete_weight(WeightKind::W1, i, r, &p, &c).unwrap() * f;
            }
            let e = rphis(&[c.pow(p.alpha1), beta, re(c.powi(-(r as i32)))], &[c.pow(p.gamma1), delta], qc, &c, 1e-16)
                .unwrap()
                .value;
            assert!((s - e).norm() < 1e-12 * e.norm().max(1.0), "r = {r}: {s} vs {e}");
        }
    }

    #[test]
    fn limits_at_r_fifty() {
        let c = ctx(0.5);
        let p = params();
        for kind in [WeightKind::W1, WeightKind::W2, WeightKind::W3] {
            for i in 0..4 {
                let w = discrete_weight(kind, 50 - i, 50, &p, &c).unwrap();
                let l = discrete_weight_limit(kind, i, &p, &c).unwrap();
                assert!((w - l).norm() < 1e-6 * l.norm(), "{kind:?} {i}: {w} vs {l}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn gasper_exact(a in 0.1f64..2.5, b in 0.1f64..2.5, g in 0.1f64..2.5, d in 0.1f64..0.9,
                        l in 0.1f64..2.5, m in 0.1f64..2.5, v in 0.1f64..2.5, n in 0usize..4) {
            let c = ctx(0.5);
            let gb = GasperBases {
                alpha: c.pow(re(a)), beta: c.pow(re(b)), gamma: c.pow(re(g)), delta: re(d),
                lambda: c.pow(re(l)), mu: c.pow(re(m)), nu: c.pow(re(v)),
            };
            let lhs = gasper_discrete_lhs(&gb, n, &c).unwrap();
            let rhs = gasper_discrete_3phi2(&gb, n, &c).unwrap();
            prop_assert!((lhs - rhs).norm() / (1.0 + lhs.norm()) < 1e-12, "{} vs {}", lhs, rhs);
        }
    }
}
