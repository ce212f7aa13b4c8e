//! Saran's F_K in its triple-series and ₂F₁-reexpansion forms.
//!
//! F_K[α₁,α₂,α₂,β₁,β₂,β₁;γ₁,γ₂,γ₃;x,y,z]
//!   = Σ (α₁)_m(α₂)_{n+p}(β₁)_{m+p}(β₂)_n / ((γ₁)_m(γ₂)_n(γ₃)_p m!n!p!) xᵐyⁿzᵖ
//!   = Σ_p (α₂)_p(β₁)_p/((γ₃)_p p!) ₂F₁(β₁+p,α₁;γ₁;x) ₂F₁(α₂+p,β₂;γ₂;y) zᵖ
//!
//! on 𝔻_K = {|x|<1, |y|<1, |z|<(1−|x|)(1−|y|)}.

use super::{check_tol, gauss_2f1, Accumulator, KahanSum, SeriesResult};
use crate::error::{Error, Result};
use crate::numerics::{near_nonpositive_integer, C64};

const MAX_SHELLS: usize = 5_000;

/// Parameters (α₁, α₂, β₁, β₂, γ₁, γ₂, γ₃) of F_K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkParams {
    pub alpha1: C64,
    pub alpha2: C64,
    pub beta1: C64,
    pub beta2: C64,
    pub gamma1: C64,
    pub gamma2: C64,
    pub gamma3: C64,
}

impl FkParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(alpha1: C64, alpha2: C64, beta1: C64, beta2: C64, gamma1: C64, gamma2: C64, gamma3: C64) -> Result<Self> {
        let p = Self { alpha1, alpha2, beta1, beta2, gamma1, gamma2, gamma3 };
        p.validate()?;
        Ok(p)
    }

    /// Convenience constructor from real values.
    #[allow(clippy::too_many_arguments)]
    pub fn real(alpha1: f64, alpha2: f64, beta1: f64, beta2: f64, gamma1: f64, gamma2: f64, gamma3: f64) -> Result<Self> {
        let c = |v: f64| C64::new(v, 0.0);
        Self::new(c(alpha1), c(alpha2), c(beta1), c(beta2), c(gamma1), c(gamma2), c(gamma3))
    }

    pub fn validate(&self) -> Result<()> {
        for g in [self.gamma1, self.gamma2, self.gamma3] {
            if near_nonpositive_integer(g) {
                return Err(Error::Pole(format!("F_K lower parameter {g} is a non-positive integer")));
            }
        }
        Ok(())
    }

    /// The image under (x,α₁,β₁,γ₁) ↔ (y,β₂,α₂,γ₂).
    pub fn swapped(&self) -> Self {
        Self {
            alpha1: self.beta2,
            alpha2: self.beta1,
            beta1: self.alpha2,
            beta2: self.alpha1,
            gamma1: self.gamma2,
            gamma2: self.gamma1,
            gamma3: self.gamma3,
        }
    }
}

/// Membership in 𝔻_K (all inequalities strict).
pub fn in_domain_fk(x: C64, y: C64, z: C64) -> bool {
    let (ax, ay) = (x.norm(), y.norm());
    ax < 1.0 && ay < 1.0 && z.norm() < (1.0 - ax) * (1.0 - ay)
}

fn domain_check(x: C64, y: C64, z: C64) -> Result<()> {
    if in_domain_fk(x, y, z) {
        Ok(())
    } else {
        Err(Error::Domain(format!("(x,y,z) = ({x}, {y}, {z}) outside D_K")))
    }
}

/// Triple series summed over shells m+n+p = s.
pub fn saran_fk_triple(p: &FkParams, x: C64, y: C64, z: C64, tol: f64) -> Result<SeriesResult> {
    check_tol(tol)?;
    p.validate()?;
    domain_check(x, y, z)?;
    let FkParams { alpha1: a1, alpha2: a2, beta1: b1, beta2: b2, gamma1: g1, gamma2: g2, gamma3: g3 } = *p;
    // ratio tables indexed by the relevant index or index sum
    let mut ta2: Vec<C64> = Vec::new();
    let mut tb1: Vec<C64> = Vec::new();
    let mut rx: Vec<C64> = Vec::new();
    let mut ry: Vec<C64> = Vec::new();
    let mut rz: Vec<C64> = Vec::new();
    let mut acc = Accumulator::new(tol);
    // rows[m][n] = T(m, n, s−m−n), updated in place from shell to shell
    let mut rows: Vec<Vec<C64>> = vec![vec![C64::new(1.0, 0.0)]];
    acc.push(rows[0][0], 1.0);
    for s in 0..MAX_SHELLS {
        let k = s as f64;
        ta2.push(a2 + k);
        tb1.push(b1 + k);
        rx.push((a1 + k) * x / ((g1 + k) * (k + 1.0)));
        ry.push((b2 + k) * y / ((g2 + k) * (k + 1.0)));
        rz.push(z / ((g3 + k) * (k + 1.0)));
        // new p = 0 entries (m + n = s + 1) from the current p = 0 entries
        let mut diag = Vec::with_capacity(s + 2);
        for m in 0..=s + 1 {
            let t = if m >= 1 {
                rows[m - 1][s + 1 - m] * rx[m - 1] * tb1[m - 1]
            } else {
                rows[0][s] * ry[s] * ta2[s]
            };
            diag.push(t);
        }
        let mut sum = KahanSum::default();
        let mut abs = 0.0;
        for (m, row) in rows.iter_mut().enumerate() {
            for (n, t) in row.iter_mut().enumerate() {
                let pp = s - m - n;
                *t *= ta2[n + pp] * tb1[m + pp] * rz[pp];
                sum.add(*t);
                abs += t.norm();
            }
        }
        rows.push(Vec::new());
        for (m, t) in diag.into_iter().enumerate() {
            sum.add(t);
            abs += t.norm();
            rows[m].push(t);
        }
        acc.push(sum.value(), abs);
        if abs == 0.0 && s >= super::MIN_TERMS {
            acc.terminate();
        }
        if acc.done() {
            break;
        }
    }
    Ok(acc.result())
}

/// Coefficients (α₂)_p(β₁)_p/((γ₃)_p p!) for p < len.
pub fn fk_coefficients(p: &FkParams, len: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(len);
    let mut c = C64::new(1.0, 0.0);
    for k in 0..len {
        out.push(c);
        let kf = k as f64;
        c *= (p.alpha2 + kf) * (p.beta1 + kf) / ((p.gamma3 + kf) * (kf + 1.0));
    }
    out
}

/// ₂F₁(β₁+k, α₁; γ₁; x) for k < len.
pub fn fk_x_row(p: &FkParams, x: C64, len: usize, tol: f64) -> Result<Vec<C64>> {
    (0..len)
        .map(|k| gauss_2f1(p.beta1 + k as f64, p.alpha1, p.gamma1, x, tol).map(|r| r.value))
        .collect()
}

/// ₂F₁(α₂+k, β₂; γ₂; y) for k < len.
pub fn fk_y_row(p: &FkParams, y: C64, len: usize, tol: f64) -> Result<Vec<C64>> {
    (0..len)
        .map(|k| gauss_2f1(p.alpha2 + k as f64, p.beta2, p.gamma2, y, tol).map(|r| r.value))
        .collect()
}

/// Σ_p coeffs[p] xrow[p] yrow[p] zᵖ together with the modulus of the last
/// three terms, used by callers to confirm the cached rows were long enough.
pub fn fk_combine(coeffs: &[C64], xrow: &[C64], yrow: &[C64], z: C64) -> (C64, f64) {
    let len = coeffs.len().min(xrow.len()).min(yrow.len());
    let mut s = C64::new(0.0, 0.0);
    let mut zp = C64::new(1.0, 0.0);
    let mut last = 0.0;
    for k in 0..len {
        let t = coeffs[k] * xrow[k] * yrow[k] * zp;
        s += t;
        if k + 3 >= len {
            last += t.norm();
        }
        zp *= z;
    }
    (s, last)
}

/// Single series over p of the ₂F₁ products.
pub fn saran_fk_reexpand(p: &FkParams, x: C64, y: C64, z: C64, tol: f64) -> Result<SeriesResult> {
    check_tol(tol)?;
    p.validate()?;
    domain_check(x, y, z)?;
    let inner_tol = (tol * 1e-2).max(1e-17);
    let mut acc = Accumulator::new(tol);
    let mut c = C64::new(1.0, 0.0);
    let mut zp = C64::new(1.0, 0.0);
    let mut inner_ok = true;
    for k in 0..100_000usize {
        let kf = k as f64;
        let fx = gauss_2f1(p.beta1 + kf, p.alpha1, p.gamma1, x, inner_tol)?;
        let fy = gauss_2f1(p.alpha2 + kf, p.beta2, p.gamma2, y, inner_tol)?;
        inner_ok &= fx.converged && fy.converged;
        let t = c * zp * fx.value * fy.value;
        acc.push(t, t.norm());
        if z == C64::new(0.0, 0.0) {
            acc.terminate();
        }
        if acc.done() {
            break;
        }
        c *= (p.alpha2 + kf) * (p.beta1 + kf) / ((p.gamma3 + kf) * (kf + 1.0));
        zp *= z;
        if c == C64::new(0.0, 0.0) {
            acc.terminate();
            break;
        }
    }
    let mut r = acc.result();
    r.converged &= inner_ok;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::appell_f2;
    use crate::numerics::re;
    use proptest::prelude::*;

    fn half() -> FkParams {
        FkParams::real(0.5, 0.5, 0.5, 0.5, 1.5, 1.5, 1.5).unwrap()
    }

    #[test]
    fn domain_examples() {
        assert!(in_domain_fk(re(0.0), re(0.0), re(0.0)));
        assert!(!in_domain_fk(re(0.5), re(0.5), re(0.25)));
        assert!(in_domain_fk(re(0.2), re(0.1), re(0.3)));
        assert!(matches!(saran_fk_triple(&half(), re(0.5), re(0.5), re(0.3), 1e-12), Err(Error::Domain(_))));
        assert!(matches!(saran_fk_reexpand(&half(), re(0.5), re(0.5), re(0.3), 1e-12), Err(Error::Domain(_))));
    }

    #[test]
    fn origin_and_z_zero() {
        let p = FkParams::real(0.3, 1.2, 0.8, 2.1, 1.4, 0.9, 1.7).unwrap();
        assert_eq!(saran_fk_triple(&p, re(0.0), re(0.0), re(0.0), 1e-14).unwrap().value, re(1.0));
        assert_eq!(saran_fk_reexpand(&p, re(0.0), re(0.0), re(0.0), 1e-14).unwrap().value, re(1.0));
        let (x, y) = (re(0.4), re(-0.3));
        let expect = gauss_2f1(p.beta1, p.alpha1, p.gamma1, x, 1e-16).unwrap().value
            * gauss_2f1(p.alpha2, p.beta2, p.gamma2, y, 1e-16).unwrap().value;
        for v in [
            saran_fk_triple(&p, x, y, re(0.0), 1e-15).unwrap().value,
            saran_fk_reexpand(&p, x, y, re(0.0), 1e-15).unwrap().value,
        ] {
            assert!((v - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn cross_form_example() {
        let a = saran_fk_triple(&half(), re(0.2), re(0.1), re(0.3), 1e-15).unwrap();
        let b = saran_fk_reexpand(&half(), re(0.2), re(0.1), re(0.3), 1e-15).unwrap();
        assert!(a.converged && b.converged);
        assert!((a.value - b.value).norm() / a.value.norm() < 1e-10);
    }

    #[test]
    fn x_zero_is_appell_f2() {
        let p = FkParams::real(0.6, 0.9, 1.3, 0.4, 1.1, 2.2, 1.6).unwrap();
        let (y, z) = (re(0.3), re(0.35));
        let fk = saran_fk_reexpand(&p, re(0.0), y, z, 1e-15).unwrap().value;
        let f2 = appell_f2(p.alpha2, p.beta2, p.beta1, p.gamma2, p.gamma3, y, z, 1e-15).unwrap().value;
        assert!((fk - f2).norm() < 1e-12);
    }

    #[test]
    fn brute_force_triple_sum() {
        use crate::numerics::pochhammer;
        let p = FkParams::real(0.7, 1.1, 0.4, 1.9, 1.3, 0.8, 2.4).unwrap();
        let (x, y, z) = (re(0.15), re(-0.2), re(0.1));
        let k = 60;
        let tab = |a: C64| (0..k).map(|n| pochhammer(a, n)).collect::<Vec<_>>();
        let fact = tab(re(1.0));
        let (a1, a2, b1, b2) = (tab(p.alpha1), tab(p.alpha2), tab(p.beta1), tab(p.beta2));
        let (g1, g2, g3) = (tab(p.gamma1), tab(p.gamma2), tab(p.gamma3));
        let mut s = C64::new(0.0, 0.0);
        for m in 0..k {
            for n in 0..k - m {
                let t = a1[m] * x.powu(m as u32) / (g1[m] * fact[m]) * b2[n] * y.powu(n as u32) / (g2[n] * fact[n]);
                for j in 0..k - m - n {
                    s += t * a2[n + j] * b1[m + j] * z.powu(j as u32) / (g3[j] * fact[j]);
                }
            }
        }
        let v = saran_fk_triple(&p, x, y, z, 1e-15).unwrap().value;
        assert!((v - s).norm() < 1e-13);
    }

    #[test]
    fn cached_rows_match_reexpand() {
        let p = FkParams::real(0.7, 1.1, 0.4, 1.9, 1.3, 0.8, 2.4).unwrap();
        let (x, y, z) = (re(0.4), re(-0.3), re(0.25));
        let len = 80;
        let (v, last) = fk_combine(&fk_coefficients(&p, len), &fk_x_row(&p, x, len, 1e-16).unwrap(), &fk_y_row(&p, y, len, 1e-16).unwrap(), z);
        assert!(last < 1e-15);
        let r = saran_fk_reexpand(&p, x, y, z, 1e-15).unwrap().value;
        assert!((v - r).norm() < 1e-13);
    }

    fn point() -> impl Strategy<Value = (f64, f64, f64)> {
        (-0.6f64..0.6, -0.6f64..0.6, -0.8f64..0.8).prop_map(|(x, y, t)| (x, y, t * (1.0 - x.abs()) * (1.0 - y.abs())))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn triple_and_reexpand_agree(pr in proptest::collection::vec(0.1f64..2.5, 7), (x, y, z) in point()) {
            let p = FkParams::real(pr[0], pr[1], pr[2], pr[3], pr[4], pr[5], pr[6]).unwrap();
            let a = saran_fk_triple(&p, re(x), re(y), re(z), 1e-14).unwrap();
            let b = saran_fk_reexpand(&p, re(x), re(y), re(z), 1e-14).unwrap();
            prop_assert!((a.value - b.value).norm() / (1.0 + a.value.norm()) < 1e-10);
        }

        #[test]
        fn swap_symmetry(pr in proptest::collection::vec(0.1f64..2.5, 7), (x, y, z) in point()) {
            let p = FkParams::real(pr[0], pr[1], pr[2], pr[3], pr[4], pr[5], pr[6]).unwrap();
            let a = saran_fk_triple(&p, re(x), re(y), re(z), 1e-15).unwrap().value;
            let b = saran_fk_triple(&p.swapped(), re(y), re(x), re(z), 1e-15).unwrap().value;
            prop_assert!((a - b).norm() / (1.0 + a.norm()) < 1e-11);
        }

        #[test]
        fn halving_tol_triple(pr in proptest::collection::vec(0.1f64..2.5, 7), (x, y, z) in point(), e in 5i32..12) {
            let p = FkParams::real(pr[0], pr[1], pr[2], pr[3], pr[4], pr[5], pr[6]).unwrap();
            let tol = 10f64.powi(-e);
            let r1 = saran_fk_triple(&p, re(x), re(y), re(z), tol).unwrap();
            let r2 = saran_fk_triple(&p, re(x), re(y), re(z), tol / 2.0).unwrap();
            prop_assert!(!r1.converged || r1.est_trunc_error <= tol);
            prop_assert!((r1.value - r2.value).norm() <= r1.est_trunc_error * (1.0 + r1.value.norm()) + 1e-14 * (1.0 + r1.value.norm()));
        }
    }
}
