//! Gauss–Jacobi rules on [0,1] for the weight t^a (1−t)^b.
//!
//! Nodes come from Newton iteration on the three-term Jacobi recurrence
//! with asymptotic initial guesses and deflation against roots already
//! found, then polished in double-double arithmetic: near the endpoints a
//! node rounded to f64 would otherwise cost ~n²·ε in its weight. Rules are
//! cached process-wide.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::numerics::{gamma, log_gamma, re};

/// Largest supported rule size.
pub const MAX_NODES: usize = 256;

const NODE_TOL: f64 = 1e-15;

/// Nodes and weights for ∫₀¹ f(t) t^a (1−t)^b dt ≈ Σ wᵢ f(tᵢ).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ wᵢ f(tᵢ).
    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}

type Cache = RwLock<HashMap<(u64, u64, usize), Arc<QuadratureRule>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// B(x, y) for real positive arguments.
pub(crate) fn beta_real(x: f64, y: f64) -> f64 {
    let l = log_gamma(re(x)).unwrap().re + log_gamma(re(y)).unwrap().re - log_gamma(re(x + y)).unwrap().re;
    l.exp()
}

/// Gauss–Jacobi rule with `n` nodes for the weight t^a (1−t)^b on [0,1].
pub fn gauss_jacobi_rule(a: f64, b: f64, n: usize) -> Result<Arc<QuadratureRule>> {
    if !(a.is_finite() && b.is_finite()) || a <= -1.0 || b <= -1.0 {
        return Err(Error::InvalidParameter(format!("Jacobi exponents must exceed −1, got ({a}, {b})")));
    }
    if n == 0 || n > MAX_NODES {
        return Err(Error::InvalidParameter(format!("rule size must be in 1..={MAX_NODES}, got {n}")));
    }
    let key = (a.to_bits(), b.to_bits(), n);
    if let Some(r) = cache().read().unwrap().get(&key) {
        return Ok(r.clone());
    }
    let rule = Arc::new(build(a, b, n)?);
    cache().write().unwrap().entry(key).or_insert_with(|| rule.clone());
    Ok(rule)
}

// P_n and P_{n−1} at x for the classical weight (1−x)^al (1+x)^be.
fn jacobi_pair(n: usize, al: f64, be: f64, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = 0.5 * (al - be) + 0.5 * (al + be + 2.0) * x;
    if n == 0 {
        return (p0, 0.0);
    }
    let ab = al + be;
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (al * al - be * be);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (k + al - 1.0) * (k + be - 1.0) * c;
        let p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

fn derivative(n: usize, al: f64, be: f64, x: f64, pn: f64, pm: f64) -> f64 {
    let nf = n as f64;
    let c = 2.0 * nf + al + be;
    (nf * ((al - be) - c * x) * pn + 2.0 * (nf + al) * (nf + be) * pm) / (c * (1.0 - x * x))
}

fn dd(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

// TwoFloat's own division is only f64-accurate; refine 1/b by Newton steps
fn div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let mut r = dd(1.0 / b.hi());
    for _ in 0..2 {
        r = r + r * (dd(1.0) - b * r);
    }
    a * r
}

fn jacobi_pair_dd(n: usize, al: f64, be: f64, x: TwoFloat) -> (TwoFloat, TwoFloat) {
    let (al_, be_) = (dd(al), dd(be));
    let mut p0 = dd(1.0);
    let mut p1 = (al_ - be_) * 0.5 + (al_ + be_ + 2.0) * x * 0.5;
    let ab = al_ + be_;
    for k in 2..=n {
        let k = dd(k as f64);
        let c = k * 2.0 + ab;
        let a1 = k * 2.0 * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (al_ * al_ - be_ * be_);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = (k + al_ - 1.0) * (k + be_ - 1.0) * c * 2.0;
        let p2 = div((a2 + a3 * x) * p1 - a4 * p0, a1);
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

// (1−x²)·P_n'(x) in double-double
fn scaled_derivative_dd(n: usize, al: f64, be: f64, x: TwoFloat, pn: TwoFloat, pm: TwoFloat) -> TwoFloat {
    let nf = dd(n as f64);
    let c = nf * 2.0 + al + be;
    div(nf * ((dd(al) - be) - c * x) * pn + (nf + al) * (nf + be) * pm * 2.0, c)
}

// Γ(n+α+1)Γ(n+β+1)/(Γ(n+α+β+1) n!) by an exact product from n = 1
fn weight_constant(n: usize, al: f64, be: f64) -> Result<TwoFloat> {
    let c1 = gamma(re(al + 2.0))? * gamma(re(be + 2.0))? / gamma(re(al + be + 2.0))?;
    let mut c = dd(c1.re);
    for k in 2..=n {
        let k = dd(k as f64);
        c = div(c * (k + al) * (k + be), (k + al + be) * k);
    }
    Ok(c)
}

fn build(a: f64, b: f64, n: usize) -> Result<QuadratureRule> {
    // t = (1+x)/2 turns t^a (1−t)^b into (1+x)^a (1−x)^b up to 2^{a+b}
    let (al, be) = (b, a);
    let nf = n as f64;
    let mut xs: Vec<f64> = Vec::with_capacity(n);
    for k in 1..=n {
        let theta = PI * (k as f64 - 0.25 + 0.5 * al) / (nf + 0.5 * (al + be + 1.0));
        let mut x = theta.cos();
        let mut converged = false;
        for _ in 0..100 {
            let (pn, pm) = jacobi_pair(n, al, be, x);
            let dp = derivative(n, al, be, x, pn, pm);
            let defl: f64 = xs.iter().map(|&r| 1.0 / (x - r)).sum();
            let step = pn / (dp - pn * defl);
            let next = (x - step).clamp(-1.0 + 1e-300, 1.0 - 1e-300);
            let delta = (next - x).abs();
            x = next;
            if delta <= NODE_TOL * (1.0 + x.abs()) * 0.5 {
                converged = true;
                break;
            }
        }
        if !converged || !x.is_finite() {
            return Err(Error::Quadrature(format!("Newton iteration failed for node {k} of Jacobi({a}, {b}) rule with n = {n}")));
        }
        xs.push(x);
    }
    let cst = weight_constant(n, al, be)?;
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);
    for &x0 in &xs {
        let mut x = dd(x0);
        let mut sd = dd(0.0);
        for _ in 0..2 {
            let (pn, pm) = jacobi_pair_dd(n, al, be, x);
            let omx2 = (dd(1.0) - x) * (dd(1.0) + x);
            sd = scaled_derivative_dd(n, al, be, x, pn, pm);
            x -= div(pn * omx2, sd);
        }
        let omx2 = (dd(1.0) - x) * (dd(1.0) + x);
        // w = C / ((1−x²) P'²) = C (1−x²) / ((1−x²)P')²
        let w = div(cst * omx2, sd * sd);
        let t = (dd(1.0) + x) * 0.5;
        pairs.push((t.hi(), w.hi() + w.lo()));
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    for w in pairs.windows(2) {
        if w[1].0 - w[0].0 <= 0.0 {
            return Err(Error::Quadrature(format!("duplicate nodes in Jacobi({a}, {b}) rule with n = {n}")));
        }
    }
    let (nodes, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let total: f64 = weights.iter().sum();
    let expect = beta_real(a + 1.0, b + 1.0);
    if ((total - expect) / expect).abs() > 1e-13 {
        return Err(Error::Quadrature(format!(
            "Jacobi({a}, {b}) rule with n = {n} has weight sum {total}, expected {expect}"
        )));
    }
    Ok(QuadratureRule { nodes, weights, a, b })
}
