//! Dirichlet and hypergeometric measures on [0,1] and their quadrature.
//!
//! A measure is turned into a [`DiscreteMeasure`] (nodes plus complex
//! weights) once, and integrals are then plain weighted sums. Endpoint
//! singularities are absorbed into Gauss–Jacobi rules; for complex
//! exponents only the real part goes into the rule and t^{i Im} is folded
//! into the weights.
//!
//! The hypergeometric density carries ₂F₁(α,β;γ;1−t), whose argument tends
//! to 1 at the left end. The interval is split at 1/2: on the right the
//! series is summed directly, on the left the connection formula to
//! argument t exposes the t^{γ−α−β} branch, which gets its own Jacobi rule.

mod jacobi;

pub use jacobi::{gauss_jacobi_rule, QuadratureRule, MAX_NODES};

use crate::error::{Error, Result};
use crate::hyper::gauss_2f1;
use crate::numerics::{gamma, re, rgamma, C64};

/// Tolerance used for ₂F₁ factors inside densities.
const DENSITY_TOL: f64 = 1e-16;

/// dist(γ−α−β, ℤ) below which the two branches cancel badly; the measure is
/// then interpolated in α from points at least INTERP_STEP away.
const DEGENERATE_GAP: f64 = 0.01;
const INTERP_STEP: f64 = 0.012;
const INTERP_OFFSETS: [f64; 6] = [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0];

/// Pointwise evaluation refuses Re(γ−α−β) at or below this.
pub const LOG_SINGULARITY_MARGIN: f64 = 0.05;

/// A probability measure on [0,1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureSpec {
    /// dμ_{α,β}(t) ∝ t^{α−1}(1−t)^{β−1} dt.
    Dirichlet { alpha: C64, beta: C64 },
    /// dμ_{α,β,γ,η}(t) ∝ t^{η−1}(1−t)^{γ−1} ₂F₁(α,β;γ;1−t) dt.
    Hypergeometric { alpha: C64, beta: C64, gamma: C64, eta: C64 },
}

impl MeasureSpec {
    pub fn dirichlet(alpha: C64, beta: C64) -> Result<Self> {
        let s = MeasureSpec::Dirichlet { alpha, beta };
        s.validate()?;
        Ok(s)
    }

    pub fn hypergeometric(alpha: C64, beta: C64, gamma: C64, eta: C64) -> Result<Self> {
        let s = MeasureSpec::Hypergeometric { alpha, beta, gamma, eta };
        s.validate()?;
        Ok(s)
    }

    /// Real-parameter Dirichlet shorthand.
    pub fn dirichlet_real(alpha: f64, beta: f64) -> Result<Self> {
        Self::dirichlet(re(alpha), re(beta))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MeasureSpec::Dirichlet { alpha, beta } => {
                if !(alpha.re > 0.0 && beta.re > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "Dirichlet measure needs Re α, Re β > 0, got α = {alpha}, β = {beta}"
                    )));
                }
            }
            MeasureSpec::Hypergeometric { alpha, beta, gamma, eta } => {
                let s = eta + gamma - alpha - beta;
                if !(eta.re > 0.0 && gamma.re > 0.0 && s.re > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "hypergeometric measure needs Re η, Re γ, Re(η+γ−α−β) > 0, got α = {alpha}, β = {beta}, γ = {gamma}, η = {eta}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A finite complex measure Σ wᵢ δ_{tᵢ}.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub nodes: Vec<f64>,
    pub weights: Vec<C64>,
}

impl DiscreteMeasure {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total(&self) -> C64 {
        self.weights.iter().sum()
    }

    /// Σ wᵢ f(tᵢ), stopping at the first error.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> Result<C64>) -> Result<C64> {
        let mut s = C64::new(0.0, 0.0);
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(t)?;
        }
        Ok(s)
    }

    fn extend(&mut self, other: DiscreteMeasure) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }
}

fn check_interior(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("density evaluated at t = {t}, need 0 < t < 1")))
    }
}

// s^e for s > 0 and complex e
fn rpow(s: f64, e: C64) -> C64 {
    (e * s.ln()).exp()
}

fn dirichlet_const(alpha: C64, beta: C64) -> Result<C64> {
    Ok(gamma(alpha + beta)? * rgamma(alpha) * rgamma(beta))
}

/// Γ(α+β)/(Γ(α)Γ(β)) t^{α−1}(1−t)^{β−1}.
pub fn dirichlet_density(spec: &MeasureSpec, t: f64) -> Result<C64> {
    let MeasureSpec::Dirichlet { alpha, beta } = *spec else {
        return Err(Error::InvalidParameter("dirichlet_density needs a Dirichlet spec".into()));
    };
    spec.validate()?;
    check_interior(t)?;
    Ok(dirichlet_const(alpha, beta)? * rpow(t, alpha - 1.0) * rpow(1.0 - t, beta - 1.0))
}

fn hyper_const(alpha: C64, beta: C64, gamma_: C64, eta: C64) -> Result<C64> {
    let g = |z: C64| gamma(z);
    Ok(g(eta + gamma_ - alpha)? * g(eta + gamma_ - beta)? * rgamma(eta) * rgamma(gamma_) * rgamma(eta + gamma_ - alpha - beta))
}

fn dist_to_integer(z: C64) -> f64 {
    (z.re - z.re.round()).abs().hypot(z.im)
}

// Interpolation abscissae in α around the degenerate point and their
// Lagrange weights at the requested α.
fn degenerate_stencil(alpha: C64, beta: C64, g: C64) -> Option<Vec<(C64, C64)>> {
    let d = g - alpha - beta;
    if dist_to_integer(d) >= DEGENERATE_GAP {
        return None;
    }
    let centre = g - beta - d.re.round();
    let xs: Vec<C64> = INTERP_OFFSETS.iter().map(|&k| centre + k * INTERP_STEP).collect();
    Some(
        xs.iter()
            .enumerate()
            .map(|(k, &xk)| {
                let mut l = C64::new(1.0, 0.0);
                for (j, &xj) in xs.iter().enumerate() {
                    if j != k {
                        l *= (alpha - xj) / (xk - xj);
                    }
                }
                (xk, l)
            })
            .collect(),
    )
}

/// Pointwise hypergeometric density.
pub fn hypergeometric_density(spec: &MeasureSpec, t: f64, tol: f64) -> Result<C64> {
    let MeasureSpec::Hypergeometric { alpha, beta, gamma: g, eta } = *spec else {
        return Err(Error::InvalidParameter("hypergeometric_density needs a hypergeometric spec".into()));
    };
    spec.validate()?;
    check_interior(t)?;
    if (g - alpha - beta).re <= LOG_SINGULARITY_MARGIN {
        return Err(Error::Domain(format!(
            "Re(γ−α−β) = {} is too close to the logarithmic case (need > {LOG_SINGULARITY_MARGIN})",
            (g - alpha - beta).re
        )));
    }
    if t >= 0.5 {
        let f = gauss_2f1(alpha, beta, g, re(1.0 - t), tol)?.value;
        return Ok(hyper_const(alpha, beta, g, eta)? * rpow(t, eta - 1.0) * rpow(1.0 - t, g - 1.0) * f);
    }
    let one = |a: C64| -> Result<C64> {
        Ok(hyper_const(a, beta, g, eta)? * connection(a, beta, g, t, tol)?)
    };
    let kf = match degenerate_stencil(alpha, beta, g) {
        Some(st) => {
            let mut acc = C64::new(0.0, 0.0);
            for (a, l) in st {
                acc += l * one(a)?;
            }
            acc
        }
        None => one(alpha)?,
    };
    Ok(kf * rpow(t, eta - 1.0) * rpow(1.0 - t, g - 1.0))
}

// ₂F₁(α,β;γ;1−t) through the two branches at t = 0
fn connection(alpha: C64, beta: C64, g: C64, t: f64, tol: f64) -> Result<C64> {
    let (ca, cb) = connection_coefficients(alpha, beta, g)?;
    let f1 = gauss_2f1(alpha, beta, alpha + beta - g + 1.0, re(t), tol)?.value;
    let f2 = gauss_2f1(g - alpha, g - beta, g - alpha - beta + 1.0, re(t), tol)?.value;
    Ok(ca * f1 + cb * rpow(t, g - alpha - beta) * f2)
}

fn connection_coefficients(alpha: C64, beta: C64, g: C64) -> Result<(C64, C64)> {
    let gg = gamma(g)?;
    let ca = gg * gamma(g - alpha - beta)? * rgamma(g - alpha) * rgamma(g - beta);
    let cb = gg * gamma(alpha + beta - g)? * rgamma(alpha) * rgamma(beta);
    Ok((ca, cb))
}

/// Density of either kind.
pub fn density(spec: &MeasureSpec, t: f64) -> Result<C64> {
    match spec {
        MeasureSpec::Dirichlet { .. } => dirichlet_density(spec, t),
        MeasureSpec::Hypergeometric { .. } => hypergeometric_density(spec, t, DENSITY_TOL),
    }
}

/// Quadrature nodes and complex weights for `spec`.
///
/// A Dirichlet measure uses one Jacobi rule of size `order`; a
/// hypergeometric measure uses three (one on the right half, two for the
/// branches on the left half).
pub fn discretize(spec: &MeasureSpec, order: usize) -> Result<DiscreteMeasure> {
    spec.validate()?;
    match *spec {
        MeasureSpec::Dirichlet { alpha, beta } => {
            let rule = gauss_jacobi_rule(alpha.re - 1.0, beta.re - 1.0, order)?;
            let c = dirichlet_const(alpha, beta)?;
            let (ia, ib) = (C64::new(0.0, alpha.im), C64::new(0.0, beta.im));
            let weights = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&t, &w)| c * w * rpow(t, ia) * rpow(1.0 - t, ib))
                .collect();
            Ok(DiscreteMeasure { nodes: rule.nodes.clone(), weights })
        }
        MeasureSpec::Hypergeometric { alpha, beta, gamma: g, eta } => {
            match degenerate_stencil(alpha, beta, g) {
                Some(st) => {
                    // the shifted measures have different nodes, so keep them all
                    let mut out = DiscreteMeasure { nodes: Vec::new(), weights: Vec::new() };
                    for (a, l) in st {
                        let mut m = discretize_hyper(a, beta, g, eta, order)?;
                        m.weights.iter_mut().for_each(|w| *w *= l);
                        out.extend(m);
                    }
                    Ok(out)
                }
                None => discretize_hyper(alpha, beta, g, eta, order),
            }
        }
    }
}

fn discretize_hyper(alpha: C64, beta: C64, g: C64, eta: C64, order: usize) -> Result<DiscreteMeasure> {
    let k = hyper_const(alpha, beta, g, eta)?;
    let mut out = DiscreteMeasure { nodes: Vec::new(), weights: Vec::new() };

    // right half: t = 1 − s/2, weight s^{γ−1}
    let rule = gauss_jacobi_rule(g.re - 1.0, 0.0, order)?;
    let pre = k * rpow(2.0, -g);
    let ig = C64::new(0.0, g.im);
    let mut right = DiscreteMeasure { nodes: Vec::with_capacity(order), weights: Vec::with_capacity(order) };
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        let t = 1.0 - 0.5 * s;
        let f = gauss_2f1(alpha, beta, g, re(0.5 * s), DENSITY_TOL)?.value;
        right.nodes.push(t);
        right.weights.push(pre * w * rpow(s, ig) * rpow(t, eta - 1.0) * f);
    }

    // left half: t = s/2, two branches
    let (ca, cb) = connection_coefficients(alpha, beta, g)?;
    let mut left = DiscreteMeasure { nodes: Vec::new(), weights: Vec::new() };
    if ca != C64::new(0.0, 0.0) {
        let rule = gauss_jacobi_rule(eta.re - 1.0, 0.0, order)?;
        let pre = k * ca * rpow(2.0, -eta);
        let ie = C64::new(0.0, eta.im);
        for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
            let t = 0.5 * s;
            let f = gauss_2f1(alpha, beta, alpha + beta - g + 1.0, re(t), DENSITY_TOL)?.value;
            left.nodes.push(t);
            left.weights.push(pre * w * rpow(s, ie) * rpow(1.0 - t, g - 1.0) * f);
        }
    }
    if cb != C64::new(0.0, 0.0) {
        let e = eta + g - alpha - beta - 1.0;
        let rule = gauss_jacobi_rule(e.re, 0.0, order)?;
        let pre = k * cb * rpow(2.0, -(e + 1.0));
        let ie = C64::new(0.0, e.im);
        for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
            let t = 0.5 * s;
            let f = gauss_2f1(g - alpha, g - beta, g - alpha - beta + 1.0, re(t), DENSITY_TOL)?.value;
            left.nodes.push(t);
            left.weights.push(pre * w * rpow(s, ie) * rpow(1.0 - t, g - 1.0) * f);
        }
    }
    out.extend(left);
    out.extend(right);
    Ok(out)
}

/// ∫₀¹ f(t) dμ(t).
pub fn integrate_measure(f: impl FnMut(f64) -> Result<C64>, spec: &MeasureSpec, order: usize) -> Result<C64> {
    discretize(spec, order)?.integrate(f)
}

/// Tensor-product integral ∫…∫ f(t₁,…,t_k) dμ₁(t₁)…dμ_k(t_k), k ≤ 4.
pub fn integrate_product(mut f: impl FnMut(&[f64]) -> Result<C64>, specs: &[MeasureSpec], order: usize) -> Result<C64> {
    if specs.is_empty() || specs.len() > 4 {
        return Err(Error::Unsupported(format!("product integrals need 1 to 4 measures, got {}", specs.len())));
    }
    let ms = specs.iter().map(|s| discretize(s, order)).collect::<Result<Vec<_>>>()?;
    integrate_discrete_product(&mut f, &ms)
}

/// Tensor-product sum over already discretized measures.
pub fn integrate_discrete_product(f: &mut impl FnMut(&[f64]) -> Result<C64>, ms: &[DiscreteMeasure]) -> Result<C64> {
    let k = ms.len();
    let mut idx = vec![0usize; k];
    let mut t = vec![0.0; k];
    let mut total = C64::new(0.0, 0.0);
    if ms.iter().any(|m| m.is_empty()) {
        return Ok(total);
    }
    loop {
        let mut w = C64::new(1.0, 0.0);
        for d in 0..k {
            t[d] = ms[d].nodes[idx[d]];
            w *= ms[d].weights[idx[d]];
        }
        total += w * f(&t)?;
        let mut d = k;
        loop {
            if d == 0 {
                return Ok(total);
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < ms[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
}
