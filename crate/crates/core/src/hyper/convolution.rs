//! Two-index coefficient sequences and the family
//!
//! ℱ^a[α₁,β₁:α₂,β₂;γ₁:γ₂;x₁,x₂,x₃,x₄]
//!   = Σ_{m,n} a(m,n) ₂F₁(α₁+m,β₁;γ₁;x₁) ₂F₁(α₂+n,β₂;γ₂;x₂) x₃ᵐ x₄ⁿ.

use super::{check_tol, gauss_2f1, Accumulator, SeriesResult};
use crate::error::{Error, Result};
use crate::numerics::C64;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

const MAX_SHELLS: usize = 2_000;

type Eval = Arc<dyn Fn(usize, usize) -> C64 + Send + Sync>;

/// A sequence a(m,n) with a declared bound |a(m,n)| ≤ D^{m+n}.
#[derive(Clone)]
pub struct CoeffSequence2D {
    eval: Eval,
    decay_bound: f64,
}

impl fmt::Debug for CoeffSequence2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoeffSequence2D").field("decay_bound", &self.decay_bound).finish_non_exhaustive()
    }
}

impl CoeffSequence2D {
    pub fn new(f: impl Fn(usize, usize) -> C64 + Send + Sync + 'static, decay_bound: f64) -> Self {
        Self { eval: Arc::new(f), decay_bound }
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> C64 {
        (self.eval)(m, n)
    }

    pub fn decay_bound(&self) -> f64 {
        self.decay_bound
    }

    /// δ(m,n) = [m = n = 0].
    pub fn delta() -> Self {
        Self::new(|m, n| if m == 0 && n == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }, 1.0)
    }

    /// a(m,n) = r^{m+n}.
    pub fn geometric(r: f64) -> Self {
        Self::new(move |m, n| C64::new(r.powi((m + n) as i32), 0.0), r.abs())
    }

    /// a(n,n) = (α₁)ₙ(α₂)ₙ/(n!(γ₃)ₙ), zero off the diagonal. With this
    /// sequence ℱ^a reduces to F_K[β₁,α₂,α₂,α₁,β₂,α₁;γ₁,γ₂,γ₃;x₁,x₂,x₃x₄].
    ///
    /// The decay bound is measured on n ≤ 200.
    pub fn fk_diagonal(alpha1: C64, alpha2: C64, gamma3: C64) -> Self {
        let mut table = Vec::with_capacity(201);
        let mut c = C64::new(1.0, 0.0);
        let mut bound: f64 = 1.0;
        for n in 0..=200usize {
            table.push(c);
            if n > 0 {
                bound = bound.max(c.norm().powf(1.0 / (2 * n) as f64));
            }
            let nf = n as f64;
            c *= (alpha1 + nf) * (alpha2 + nf) / ((gamma3 + nf) * (nf + 1.0));
        }
        let table = Arc::new(table);
        Self::new(
            move |m, n| {
                if m != n {
                    return C64::new(0.0, 0.0);
                }
                match table.get(n) {
                    Some(v) => *v,
                    None => {
                        let mut c = table[200];
                        for k in 200..n {
                            let kf = k as f64;
                            c *= (alpha1 + kf) * (alpha2 + kf) / ((gamma3 + kf) * (kf + 1.0));
                        }
                        c
                    }
                }
            },
            bound,
        )
    }

    /// Pointwise product with a weight w(m,n); the decay bound is kept, so
    /// `w` should be bounded by 1 in modulus.
    pub fn weighted(&self, w: impl Fn(usize, usize) -> C64 + Send + Sync + 'static) -> Self {
        let a = self.clone();
        Self::new(move |m, n| a.get(m, n) * w(m, n), self.decay_bound)
    }
}

/// Discrete convolution (a⋆b)(m,n) = Σᵢⱼ a(m−i,n−j) b(i,j), memoized behind
/// a mutex so clones may be shared across threads.
pub fn convolve2d(a: &CoeffSequence2D, b: &CoeffSequence2D) -> CoeffSequence2D {
    let memo: Arc<Mutex<HashMap<(usize, usize), C64>>> = Arc::new(Mutex::new(HashMap::new()));
    let (a2, b2) = (a.clone(), b.clone());
    let bound = 2.0 * a.decay_bound.max(b.decay_bound);
    CoeffSequence2D::new(
        move |m, n| {
            if let Some(v) = memo.lock().expect("convolution memo poisoned").get(&(m, n)) {
                return *v;
            }
            let mut s = C64::new(0.0, 0.0);
            for i in 0..=m {
                for j in 0..=n {
                    s += a2.get(m - i, n - j) * b2.get(i, j);
                }
            }
            memo.lock().expect("convolution memo poisoned").insert((m, n), s);
            s
        },
        bound,
    )
}

/// Parameters (α₁,β₁,γ₁,α₂,β₂,γ₂) of ℱ^a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaParams {
    pub alpha1: C64,
    pub beta1: C64,
    pub gamma1: C64,
    pub alpha2: C64,
    pub beta2: C64,
    pub gamma2: C64,
}

/// Summation of ℱ^a over shells m+n = s.
#[allow(clippy::too_many_arguments)]
pub fn generic_f_a(
    a: &CoeffSequence2D,
    alpha1: C64,
    beta1: C64,
    gamma1: C64,
    alpha2: C64,
    beta2: C64,
    gamma2: C64,
    x1: C64,
    x2: C64,
    x3: C64,
    x4: C64,
    tol: f64,
) -> Result<SeriesResult> {
    check_tol(tol)?;
    if x1.norm() >= 1.0 || x2.norm() >= 1.0 {
        return Err(Error::Domain(format!("F^a needs |x1|, |x2| < 1, got {x1}, {x2}")));
    }
    if a.decay_bound * x3.norm().max(x4.norm()) >= 1.0 {
        return Err(Error::Domain(format!(
            "F^a needs decay bound · max(|x3|,|x4|) < 1, got {}",
            a.decay_bound * x3.norm().max(x4.norm())
        )));
    }
    let inner = (tol * 1e-2).max(1e-17);
    let mut r1: Vec<C64> = Vec::new();
    let mut r2: Vec<C64> = Vec::new();
    let mut p3: Vec<C64> = vec![C64::new(1.0, 0.0)];
    let mut p4: Vec<C64> = vec![C64::new(1.0, 0.0)];
    let mut acc = Accumulator::new(tol);
    // shells are pushed in pairs: diagonal sequences leave every odd shell empty
    let (mut pair_sum, mut pair_abs) = (C64::new(0.0, 0.0), 0.0);
    for s in 0..MAX_SHELLS {
        while r1.len() <= s {
            let k = r1.len() as f64;
            r1.push(gauss_2f1(alpha1 + k, beta1, gamma1, x1, inner)?.value);
            r2.push(gauss_2f1(alpha2 + k, beta2, gamma2, x2, inner)?.value);
            p3.push(p3[p3.len() - 1] * x3);
            p4.push(p4[p4.len() - 1] * x4);
        }
        for m in 0..=s {
            let n = s - m;
            let t = a.get(m, n) * r1[m] * r2[n] * p3[m] * p4[n];
            pair_sum += t;
            pair_abs += t.norm();
        }
        if s % 2 == 0 {
            continue;
        }
        acc.push(pair_sum, pair_abs);
        // δ-like sequences have empty shells; give them a fair chance
        if acc.done() && (pair_abs > 0.0 || s >= 16) {
            return Ok(acc.result());
        }
        (pair_sum, pair_abs) = (C64::new(0.0, 0.0), 0.0);
    }
    Err(Error::NonConvergent(format!(
        "F^a shell sum not settled after {MAX_SHELLS} shells (estimate {:.3e})",
        acc.est()
    )))
}
