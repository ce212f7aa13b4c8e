//! The L-variable F_K with chained couplings
//!
//! Σ (a₁)_{n₁}(b₁)_{n₁+n₂}…(b_{L−1})_{n_{L−1}+n_L}(a₂)_{n_L} / ∏(cᵢ)_{nᵢ} ∏ zᵢ^{nᵢ}/nᵢ!
//!
//! for L ∈ {3,4,5}. Terms are assembled from tabulated logarithms so that
//! large Pochhammer values never overflow before they cancel.

use super::{check_tol, Accumulator, SeriesResult};
use crate::error::{Error, Result};
use crate::numerics::{near_nonpositive_integer, C64};

const MAX_SHELLS: usize = 400;

fn ln_poch_table(a: C64, len: usize) -> Vec<C64> {
    let mut t = Vec::with_capacity(len + 1);
    let mut acc = C64::new(0.0, 0.0);
    t.push(acc);
    for j in 0..len {
        acc += (a + j as f64).ln();
        t.push(acc);
    }
    t
}

fn domain(zs: &[C64]) -> Result<()> {
    let m: Vec<f64> = zs.iter().map(|z| z.norm()).collect();
    let ok = match m.len() {
        3 => m[0] < 1.0 && m[2] < 1.0 && m[1] < (1.0 - m[0]) * (1.0 - m[2]),
        4 => m[0] < 1.0 && m[3] < 1.0 && m[1] / (1.0 - m[0]) + m[2] / (1.0 - m[3]) < 1.0,
        5 => m.iter().sum::<f64>() < 0.5,
        l => return Err(Error::Unsupported(format!("fk_L supports L in {{3,4,5}}, got L = {l}"))),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("arguments {zs:?} outside the convergence region for L = {}", zs.len())))
    }
}

struct Tables {
    la1: Vec<C64>,
    la2: Vec<C64>,
    lb: Vec<Vec<C64>>,
    // n ln zᵢ − ln (cᵢ)_n − ln n!
    ld: Vec<Vec<C64>>,
}

impl Tables {
    fn build(a1: C64, a2: C64, b: &[C64], c: &[C64], zs: &[C64], len: usize) -> Self {
        let la1 = ln_poch_table(a1, len);
        let la2 = ln_poch_table(a2, len);
        let lb = b.iter().map(|&bi| ln_poch_table(bi, 2 * len)).collect();
        let ld = c
            .iter()
            .zip(zs)
            .map(|(&ci, &zi)| {
                let lc = ln_poch_table(ci, len);
                let lz = zi.ln();
                let mut lf = 0.0;
                (0..=len)
                    .map(|n| {
                        if n > 0 {
                            lf += (n as f64).ln();
                        }
                        if n == 0 {
                            C64::new(0.0, 0.0)
                        } else if zi == C64::new(0.0, 0.0) {
                            C64::new(f64::NEG_INFINITY, 0.0)
                        } else {
                            lz * n as f64 - lc[n] - lf
                        }
                    })
                    .collect()
            })
            .collect();
        Self { la1, la2, lb, ld }
    }
}

// Visit every composition of `rest` into the remaining indices.
fn dfs(t: &Tables, l: usize, i: usize, prev: usize, rest: usize, acc_log: C64, out: &mut (C64, f64)) {
    if i == l - 1 {
        let n = rest;
        let mut lg = acc_log + t.ld[i][n] + t.la2[n];
        if i > 0 {
            lg += t.lb[i - 1][prev + n];
        }
        let v = lg.exp();
        if v.re.is_finite() && v.im.is_finite() {
            out.0 += v;
            out.1 += v.norm();
        }
        return;
    }
    for n in 0..=rest {
        let mut lg = acc_log + t.ld[i][n];
        if i == 0 {
            lg += t.la1[n];
        } else {
            lg += t.lb[i - 1][prev + n];
        }
        if lg.re == f64::NEG_INFINITY {
            continue;
        }
        dfs(t, l, i + 1, n, rest - n, lg, out);
    }
}

/// L-variable F_K; `b` has length L−1, `c` and `zs` length L.
pub fn fk_l(a1: C64, a2: C64, b: &[C64], c: &[C64], zs: &[C64], tol: f64) -> Result<SeriesResult> {
    check_tol(tol)?;
    let l = zs.len();
    if !(3..=5).contains(&l) {
        return Err(Error::Unsupported(format!("fk_L supports L in {{3,4,5}}, got L = {l}")));
    }
    if b.len() != l - 1 || c.len() != l {
        return Err(Error::InvalidParameter(format!(
            "fk_L with L = {l} needs {} b-parameters and {l} c-parameters",
            l - 1
        )));
    }
    for &ci in c {
        if near_nonpositive_integer(ci) {
            return Err(Error::Pole(format!("fk_L lower parameter {ci} is a non-positive integer")));
        }
    }
    domain(zs)?;
    let mut len = 64usize;
    let mut tables = Tables::build(a1, a2, b, c, zs, len);
    let mut acc = Accumulator::new(tol);
    for s in 0..MAX_SHELLS {
        if s > len {
            len *= 2;
            tables = Tables::build(a1, a2, b, c, zs, len);
        }
        let mut out = (C64::new(0.0, 0.0), 0.0);
        dfs(&tables, l, 0, 0, s, C64::new(0.0, 0.0), &mut out);
        acc.push(out.0, out.1);
        if acc.done() {
            break;
        }
    }
    Ok(acc.result())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::{gauss_2f1, saran_fk_triple, FkParams};
    use crate::numerics::re;

    #[test]
    fn origin() {
        let b = [re(0.5), re(0.7)];
        let c = [re(1.1), re(1.2), re(1.3)];
        let v = fk_l(re(0.3), re(0.4), &b, &c, &[re(0.0); 3], 1e-14).unwrap();
        assert!((v.value - re(1.0)).norm() < 1e-15);
    }

    #[test]
    fn l3_matches_saran() {
        // n₁=m, n₂=p, n₃=n; a₁=α₁, b₁=β₁, b₂=α₂, a₂=β₂; c=(γ₁,γ₃,γ₂); z=(x,z,y)
        let p = FkParams::real(0.7, 1.1, 0.4, 1.9, 1.3, 0.8, 2.4).unwrap();
        let (x, y, z) = (re(0.2), re(0.1), re(0.3));
        let v = fk_l(p.alpha1, p.beta2, &[p.beta1, p.alpha2], &[p.gamma1, p.gamma3, p.gamma2], &[x, z, y], 1e-15)
            .unwrap()
            .value;
        let w = saran_fk_triple(&p, x, y, z, 1e-15).unwrap().value;
        assert!((v - w).norm() / w.norm() < 1e-12);
    }

    #[test]
    fn l4_with_middle_zero() {
        let (a1, a2) = (re(0.6), re(1.4));
        let b = [re(0.9), re(1.7), re(0.3)];
        let c = [re(1.2), re(2.0), re(0.8), re(1.5)];
        let (z1, z4) = (re(0.4), re(-0.35));
        let v = fk_l(a1, a2, &b, &c, &[z1, re(0.0), re(0.0), z4], 1e-15).unwrap().value;
        let e = gauss_2f1(a1, b[0], c[0], z1, 1e-16).unwrap().value * gauss_2f1(a2, b[2], c[3], z4, 1e-16).unwrap().value;
        assert!((v - e).norm() < 1e-12);
    }

    #[test]
    fn l4_region_and_l5_box() {
        let b = [re(0.9), re(1.7), re(0.3)];
        let c = [re(1.2), re(2.0), re(0.8), re(1.5)];
        // 0.3/0.5 + 0.3/0.5 = 1.2 ≥ 1
        let bad = [re(0.5), re(0.3), re(0.3), re(0.5)];
        assert!(matches!(fk_l(re(0.6), re(1.4), &b, &c, &bad, 1e-12), Err(Error::Domain(_))));
        let b5 = [re(0.9), re(1.7), re(0.3), re(0.5)];
        let c5 = [re(1.2), re(2.0), re(0.8), re(1.5), re(1.1)];
        let z5 = [re(0.1), re(0.1), re(0.1), re(0.1), re(0.05)];
        let v = fk_l(re(0.6), re(1.4), &b5, &c5, &z5, 1e-13).unwrap();
        assert!(v.converged);
        let z5bad = [re(0.1); 5];
        assert!(matches!(fk_l(re(0.6), re(1.4), &b5, &c5, &z5bad, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(fk_l(re(0.6), re(1.4), &[re(1.0)], &[re(1.0), re(1.0)], &[re(0.1), re(0.1)], 1e-12), Err(Error::Unsupported(_))));
    }

    #[test]
    fn l4_brute_force() {
        use crate::numerics::pochhammer;
        let (a1, a2) = (re(0.6), re(1.4));
        let b = [re(0.9), re(1.7), re(0.3)];
        let c = [re(1.2), re(2.0), re(0.8), re(1.5)];
        let z = [re(0.2), re(0.15), re(-0.1), re(0.25)];
        let k = 60;
        let tab = |a: C64, len: usize| (0..len).map(|n| pochhammer(a, n)).collect::<Vec<_>>();
        let (ta1, ta2) = (tab(a1, k), tab(a2, k));
        let tb: Vec<_> = b.iter().map(|&x| tab(x, k)).collect();
        let td: Vec<Vec<C64>> = (0..4)
            .map(|i| (0..k).map(|n| z[i].powu(n as u32) / (pochhammer(c[i], n) * pochhammer(re(1.0), n))).collect())
            .collect();
        let mut s = C64::new(0.0, 0.0);
        // total degree below k; factors interleaved to stay in range
        for n1 in 0..k {
            for n2 in 0..k - n1 {
                for n3 in 0..k - n1 - n2 {
                    let t = ta1[n1] * td[0][n1] * tb[0][n1 + n2] * td[1][n2] * tb[1][n2 + n3] * td[2][n3];
                    for n4 in 0..k - n1 - n2 - n3 {
                        s += t * tb[2][n3 + n4] * td[3][n4] * ta2[n4];
                    }
                }
            }
        }
        let v = fk_l(a1, a2, &b, &c, &z, 1e-15).unwrap().value;
        assert!((v - s).norm() < 1e-12);
    }
}
