//! Terminating identities: finite sums on both sides, checked at 1e-12.

use super::sampler::{dist_int, not_pole, Draw};
use super::{vals, CostClass, IdentityCase, ParameterPoint};
use crate::error::Result;
use crate::numerics::{q_pochhammer, QContext, C64};
use crate::qkernels::{
    discrete_weight, gasper_discrete_3phi2, gasper_discrete_lhs, phi3, DiscreteWeightParams, GasperBases, Phi3Spec,
    WeightKind,
};

const TOL: f64 = 1e-12;
// exponents closer than this to a pole-producing value are rejected
const POLE_MARGIN: f64 = 0.02;

pub(super) fn cases() -> Vec<IdentityCase> {
    vec![gasper_discrete(), fk_discrete()]
}

const GASPER: [&str; 7] = ["alpha", "beta", "gamma", "delta", "lambda", "mu", "nu"];

fn gasper_bases(p: &ParameterPoint, c: &QContext) -> Result<(GasperBases, usize)> {
    let [alpha, beta, gamma, delta, lambda, mu, nu] = vals(p, GASPER)?.map(|e| c.pow(e));
    Ok((GasperBases { alpha, beta, gamma, delta, lambda, mu, nu }, p.value("n")?.re as usize))
}

fn gasper_discrete() -> IdentityCase {
    IdentityCase::new(
        "gasper-discrete",
        "discrete q-analogue of Erdélyi integral III",
        CostClass::Cheap,
        |rng, idx| {
            let mut d = Draw::new(rng);
            for n in GASPER {
                d.param(n);
            }
            d.fixed("n", (idx % 4) as f64);
            d.finish()
        },
        |p, s| {
            let c = s.ctx()?;
            let (b, n) = gasper_bases(p, &c)?;
            gasper_discrete_lhs(&b, n, &c)
        },
        |p, s| {
            let c = s.ctx()?;
            let (b, n) = gasper_bases(p, &c)?;
            gasper_discrete_3phi2(&b, n, &c)
        },
    )
    .with_tol(TOL)
    .q_dependent()
    .constraint("γ+μ−λ−ν away from non-positive integers", |p| {
        not_pole(p.re("gamma") + p.re("mu") - p.re("lambda") - p.re("nu"))
    })
    .constraint("λ away from integers", |p| dist_int(p.re("lambda")) > POLE_MARGIN)
}

const FKD: [&str; 15] = [
    "alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "gamma3", "lambda1", "lambda2", "mu1", "mu2", "mu3",
    "d1", "d2", "d3",
];

// (r, s, t) by sample index
const ORDERS: [[usize; 3]; 2] = [[2, 2, 2], [3, 1, 2]];

fn fk_discrete() -> IdentityCase {
    IdentityCase::new(
        "fk-discrete",
        "Theorem 4.4: discrete analogue for Φ_K",
        CostClass::Cheap,
        |rng, idx| {
            let mut d = Draw::new(rng);
            for n in FKD {
                d.param(n);
            }
            for (name, v) in ["r", "s", "t"].into_iter().zip(ORDERS[idx % ORDERS.len()]) {
                d.fixed(name, v as f64);
            }
            d.finish()
        },
        |p, s| {
            let c = s.ctx()?;
            let [a1, a2, b1, b2, g1, g2, g3, _, _, _, _, _, d1, d2, d3] = vals(p, FKD)?;
            let [r, ss, t] = orders(p)?;
            let qneg = |n: usize| C64::new(c.powi(-(n as i32)), 0.0);
            let spec = Phi3Spec {
                bp: vec![c.pow(a2)],
                bpp: vec![c.pow(b1)],
                c: vec![c.pow(a1), qneg(r)],
                cp: vec![c.pow(b2), qneg(ss)],
                cpp: vec![qneg(t)],
                h: vec![c.pow(g1), c.pow(d1)],
                hp: vec![c.pow(g2), c.pow(d2)],
                hpp: vec![c.pow(g3), c.pow(d3)],
                ..Default::default()
            };
            let qc = C64::new(c.q(), 0.0);
            Ok(phi3(&spec, qc, qc, qc, &c, s.series_tol)?.value)
        },
        |p, s| {
            let c = s.ctx()?;
            let [_, a2, b1, _, _, _, _, l1, l2, m1, m2, m3, d1, d2, d3] = vals(p, FKD)?;
            let [r, ss, t] = orders(p)?;
            let wp = weight_params(p)?;
            let qneg = |n: usize| C64::new(c.powi(-(n as i32)), 0.0);
            let qc = C64::new(c.q(), 0.0);
            let w1 = (0..=r).map(|i| discrete_weight(WeightKind::W1, i, r, &wp, &c)).collect::<Result<Vec<_>>>()?;
            let w2 = (0..=ss).map(|j| discrete_weight(WeightKind::W2, j, ss, &wp, &c)).collect::<Result<Vec<_>>>()?;
            let w3 = (0..=t).map(|k| discrete_weight(WeightKind::W3, k, t, &wp, &c)).collect::<Result<Vec<_>>>()?;
            let mut sum = C64::new(0.0, 0.0);
            for (i, &wi) in w1.iter().enumerate() {
                for (j, &wj) in w2.iter().enumerate() {
                    for (k, &wk) in w3.iter().enumerate() {
                        let spec = Phi3Spec {
                            bp: vec![c.pow(a2)],
                            bpp: vec![c.pow(b1)],
                            c: vec![c.pow(l1), qneg(i)],
                            cp: vec![c.pow(l2), qneg(j)],
                            cpp: vec![qneg(k)],
                            h: vec![c.pow(m1), c.pow(d1)],
                            hp: vec![c.pow(m2), c.pow(d2)],
                            hpp: vec![c.pow(m3), c.pow(d3)],
                            ..Default::default()
                        };
                        sum += wi * wj * wk * phi3(&spec, qc, qc, qc, &c, s.series_tol)?.value;
                    }
                }
            }
            Ok(sum)
        },
    )
    .with_tol(TOL)
    .q_dependent()
    .constraint("γ1+λ1−α1−μ1 and γ2+λ2−β2−μ2 away from non-positive integers", |p| {
        not_pole(p.re("gamma1") + p.re("lambda1") - p.re("alpha1") - p.re("mu1"))
            && not_pole(p.re("gamma2") + p.re("lambda2") - p.re("beta2") - p.re("mu2"))
    })
    .constraint("α1 and β2 away from integers", |p| {
        dist_int(p.re("alpha1")) > POLE_MARGIN && dist_int(p.re("beta2")) > POLE_MARGIN
    })
    .constraint("numerical margin: left-hand terms at q = 0.5 sum to at most 3e3 in modulus", |p| {
        lhs_term_mass(p, 0.5).is_ok_and(|m| m <= TERM_MASS_CAP)
    })
}

// Rounding in the left-hand φ^(3) grows like ε·Σ|terms|, so 1e-12 needs a cap on that mass.
const TERM_MASS_CAP: f64 = 3e3;

/// Σ|terms| of the terminating left-hand φ^(3) at base q.
fn lhs_term_mass(p: &ParameterPoint, q: f64) -> Result<f64> {
    let c = QContext::new(q)?;
    let [a1, a2, b1, b2, g1, g2, g3, _, _, _, _, _, d1, d2, d3] = vals(p, FKD)?;
    let [r, ss, t] = orders(p)?;
    let qc = C64::new(q, 0.0);
    let poch = |e: C64, n: usize| q_pochhammer(c.pow(e), n, &c);
    let neg = |k: usize, n: usize| q_pochhammer(C64::new(c.powi(-(k as i32)), 0.0), n, &c);
    let mut mass = 0.0;
    for m in 0..=r {
        for n in 0..=ss {
            for k in 0..=t {
                let num = poch(a2, n + k) * poch(b1, k + m) * poch(a1, m) * neg(r, m) * poch(b2, n) * neg(ss, n) * neg(t, k);
                let den = poch(g1, m) * poch(d1, m) * poch(g2, n) * poch(d2, n) * poch(g3, k) * poch(d3, k)
                    * q_pochhammer(qc, m, &c)
                    * q_pochhammer(qc, n, &c)
                    * q_pochhammer(qc, k, &c);
                mass += (num / den).norm() * q.powi((m + n + k) as i32);
            }
        }
    }
    Ok(mass)
}

fn orders(p: &ParameterPoint) -> Result<[usize; 3]> {
    Ok(vals(p, ["r", "s", "t"])?.map(|v| v.re as usize))
}

fn weight_params(p: &ParameterPoint) -> Result<DiscreteWeightParams> {
    let [alpha1, _, _, beta2, gamma1, gamma2, gamma3, lambda1, lambda2, mu1, mu2, mu3, _, _, _] = vals(p, FKD)?;
    Ok(DiscreteWeightParams { alpha1, beta2, gamma1, gamma2, gamma3, lambda1, lambda2, mu1, mu2, mu3 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::{lookup, sample_parameters};

    #[test]
    fn term_mass_of_a_trivial_sum() {
        // r = s = t = 0 leaves the single term 1
        let case = lookup("fk-discrete").unwrap();
        let mut p = sample_parameters(case, 3, 1).unwrap().remove(0);
        for n in ["r", "s", "t"] {
            p.values.insert(n.into(), C64::new(0.0, 0.0));
        }
        assert!((lhs_term_mass(&p, 0.5).unwrap() - 1.0).abs() < 1e-15);
    }
}
