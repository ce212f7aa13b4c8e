//! Jackson q-integrals over [0,1]^k and the q-Dirichlet and
//! q-hypergeometric measures on the lattice {qⁿ}.

use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::numerics::{ln_q_gamma, q_pochhammer, q_pochhammer_inf_ratio, QContext, C64};

/// Every lattice sum takes at least this many points per axis.
pub const MIN_LATTICE_POINTS: usize = 40;
const MAX_LATTICE_POINTS: usize = 1_000_000;

/// (1−q)^k Σ_{n ∈ ℤ≥0^k} f(q^{n₁},…,q^{n_k}) q^{n₁+…+n_k} for k ≤ 3.
///
/// Each axis is cut at the first N ≥ 40 with (1−q)q^N·sup|f| below the
/// context's tail tolerance, the supremum running over the points seen.
pub fn jackson_integral(mut f: impl FnMut(&[f64]) -> Result<C64>, k: usize, ctx: &QContext) -> Result<C64> {
    if !(1..=3).contains(&k) {
        return Err(Error::Unsupported(format!("jackson_integral supports k in 1..=3, got {k}")));
    }
    let mut pt = vec![0.0; k];
    axis(&mut f, &mut pt, 0, ctx)
}

fn axis(f: &mut dyn FnMut(&[f64]) -> Result<C64>, pt: &mut Vec<f64>, i: usize, ctx: &QContext) -> Result<C64> {
    let q = ctx.q();
    let mut sum = C64::new(0.0, 0.0);
    let mut sup: f64 = 0.0;
    let mut qn = 1.0;
    for n in 0..MAX_LATTICE_POINTS {
        pt[i] = qn;
        let v = if i + 1 == pt.len() { f(pt)? } else { axis(f, pt, i + 1, ctx)? };
        sup = sup.max(v.norm());
        sum += v * qn;
        qn *= q;
        if n + 1 >= MIN_LATTICE_POINTS && (1.0 - q) * qn * sup < ctx.jackson_tail_tol() {
            return Ok(sum * (1.0 - q));
        }
    }
    Err(Error::NonConvergent(format!(
        "Jackson sum tail bound not met after {MAX_LATTICE_POINTS} lattice points"
    )))
}

/// The two q-measures on [0,1], parameters as exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QMeasureKind {
    /// Γ_q(α+β)/(Γ_q(α)Γ_q(β)) t^{α−1}(tq;q)_∞/(tq^β;q)_∞ d_q t.
    QDirichlet { alpha: C64, beta: C64 },
    /// Γ_q(η+γ−α)Γ_q(η+γ−β)/(Γ_q(η)Γ_q(γ)Γ_q(η+γ−α−β)) t^{η−1}
    /// (tq;q)_∞/(tq^γ;q)_∞ ₃φ₁(q^α,q^β,t⁻¹;q^γ;q,tq^{γ−α−β}) d_q t.
    QHypergeometric { alpha: C64, beta: C64, gamma: C64, eta: C64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QMeasureSpec {
    pub kind: QMeasureKind,
    pub ctx: QContext,
}

impl QMeasureSpec {
    pub fn dirichlet(alpha: C64, beta: C64, ctx: QContext) -> Result<Self> {
        let s = Self { kind: QMeasureKind::QDirichlet { alpha, beta }, ctx };
        s.validate()?;
        Ok(s)
    }

    pub fn hypergeometric(alpha: C64, beta: C64, gamma: C64, eta: C64, ctx: QContext) -> Result<Self> {
        let s = Self { kind: QMeasureKind::QHypergeometric { alpha, beta, gamma, eta }, ctx };
        s.validate()?;
        Ok(s)
    }

    /// The hypergeometric measure with parameters (η−λ, γ−λ, γ−λ+η−ν, ν),
    /// whose moments are (q^ν,q^λ;q)_ℓ/(q^γ,q^η;q)_ℓ.
    pub fn with_moments(nu: C64, lambda: C64, gamma: C64, eta: C64, ctx: QContext) -> Result<Self> {
        Self::hypergeometric(eta - lambda, gamma - lambda, gamma - lambda + eta - nu, nu, ctx)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            QMeasureKind::QDirichlet { alpha, beta } => {
                if !(alpha.re > 0.0 && beta.re > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "q-Dirichlet measure needs Re α, Re β > 0, got α = {alpha}, β = {beta}"
                    )));
                }
            }
            QMeasureKind::QHypergeometric { alpha, beta, gamma, eta } => {
                let s = eta + gamma - alpha - beta;
                if !(eta.re > 0.0 && gamma.re > 0.0 && s.re > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "q-hypergeometric measure needs Re η, Re γ, Re(η+γ−α−β) > 0, got α = {alpha}, β = {beta}, γ = {gamma}, η = {eta}"
                    )));
                }
            }
        }
        Ok(())
    }

    // exponent e with density ~ t^{e−1} at t → 0
    fn leading_exponent(&self) -> C64 {
        match self.kind {
            QMeasureKind::QDirichlet { alpha, .. } => alpha,
            QMeasureKind::QHypergeometric { eta, .. } => eta,
        }
    }

    fn normalization(&self) -> Result<C64> {
        let c = &self.ctx;
        let lg = |x: C64| ln_q_gamma(x, c);
        Ok(match self.kind {
            QMeasureKind::QDirichlet { alpha, beta } => (lg(alpha + beta)? - lg(alpha)? - lg(beta)?).exp(),
            QMeasureKind::QHypergeometric { alpha, beta, gamma, eta } => {
                let s = eta + gamma;
                (lg(s - alpha)? + lg(s - beta)? - lg(eta)? - lg(gamma)? - lg(s - alpha - beta)?).exp()
            }
        })
    }

    // density at qⁿ without the normalization constant
    fn shape_at(&self, n: usize) -> Result<C64> {
        let c = &self.ctx;
        let q = c.q();
        let t = q.powi(n as i32);
        let tq = C64::new(t * q, 0.0);
        let pw = |e: C64| c.pow(e * n as f64);
        Ok(match self.kind {
            QMeasureKind::QDirichlet { alpha, beta } => {
                pw(alpha - 1.0) * q_pochhammer_inf_ratio(&[tq], &[c.pow(beta) * t], c)?
            }
            QMeasureKind::QHypergeometric { alpha, beta, gamma, eta } => {
                let ratio = q_pochhammer_inf_ratio(&[tq], &[c.pow(gamma) * t], c)?;
                pw(eta - 1.0) * ratio * terminating_3phi1(alpha, beta, gamma, n, c)
            }
        })
    }

    /// Nodes qⁿ and weights (1−q)qⁿ·density(qⁿ), n < N, with N ≥ max(40,
    /// `min_points`) and the geometric tail beyond N below the context's
    /// tail tolerance.
    pub fn discretize(&self, min_points: usize) -> Result<DiscreteMeasure> {
        q_measure_discretize(self, min_points)
    }
}

// ₃φ₁(q^α, q^β, q^{−n}; q^γ; q, q^{n+γ−α−β}) with term ratio
// (1−q^{α+k})(1−q^{β+k})(1−q^{n−k}) q^{γ−α−β} / ((1−q^{γ+k})(1−q^{k+1})),
// which keeps every factor bounded.
fn terminating_3phi1(alpha: C64, beta: C64, gamma: C64, n: usize, c: &QContext) -> C64 {
    let q = c.q();
    let (qa, qb, qg) = (c.pow(alpha), c.pow(beta), c.pow(gamma));
    let z = c.pow(gamma - alpha - beta);
    let mut t = C64::new(1.0, 0.0);
    let mut s = t;
    let mut qk = 1.0;
    for k in 0..n {
        let r = (1.0 - qa * qk) * (1.0 - qb * qk) * (1.0 - q.powi((n - k) as i32)) / ((1.0 - qg * qk) * (1.0 - qk * q));
        t *= r * z;
        s += t;
        qk *= q;
    }
    s
}

/// n with qⁿ = t, if t is on the lattice.
pub fn lattice_index(t: f64, q: f64) -> Result<usize> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::OutOfRange(format!("lattice point t = {t} outside (0,1]")));
    }
    let e = t.ln() / q.ln();
    let n = e.round();
    if (e - n).abs() > 1e-9 * (1.0 + n) {
        return Err(Error::OutOfRange(format!("t = {t} is not a lattice point q^n for q = {q}")));
    }
    Ok(n as usize)
}

/// Density of `spec` at the lattice point t = qⁿ.
pub fn q_measure_density(spec: &QMeasureSpec, t: f64) -> Result<C64> {
    q_measure_density_at(spec, lattice_index(t, spec.ctx.q())?)
}

/// Density of `spec` at qⁿ.
pub fn q_measure_density_at(spec: &QMeasureSpec, n: usize) -> Result<C64> {
    spec.validate()?;
    if matches!(spec.kind, QMeasureKind::QHypergeometric { .. }) && n > MAX_LATTICE_POINTS {
        return Err(Error::OutOfRange(format!("lattice index {n} too large")));
    }
    Ok(spec.normalization()? * spec.shape_at(n)?)
}

/// Lattice discretization of `spec`; see [`QMeasureSpec::discretize`].
pub fn q_measure_discretize(spec: &QMeasureSpec, min_points: usize) -> Result<DiscreteMeasure> {
    spec.validate()?;
    let q = spec.ctx.q();
    let norm = spec.normalization()? * (1.0 - q);
    let rho = q.powf(spec.leading_exponent().re);
    let min_n = min_points.max(MIN_LATTICE_POINTS);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut qn = 1.0;
    for n in 0..MAX_LATTICE_POINTS {
        let w = norm * spec.shape_at(n)? * qn;
        nodes.push(qn);
        weights.push(w);
        qn *= q;
        if n + 1 >= min_n && w.norm() * rho / (1.0 - rho) < spec.ctx.jackson_tail_tol() {
            return Ok(DiscreteMeasure { nodes, weights });
        }
    }
    Err(Error::NonConvergent(format!(
        "q-measure lattice tail bound not met after {MAX_LATTICE_POINTS} points"
    )))
}

/// ∫₀¹ t^ℓ dμ(t;q) in closed form: (q^α;q)_ℓ/(q^{α+β};q)_ℓ for the
/// q-Dirichlet measure and (q^ν,q^λ;q)_ℓ/(q^γ',q^η';q)_ℓ for the
/// hypergeometric one written as (η'−λ, γ'−λ, γ'−λ+η'−ν, ν).
pub fn q_moment(spec: &QMeasureSpec, ell: usize) -> Result<C64> {
    spec.validate()?;
    let c = &spec.ctx;
    let (num, den) = match spec.kind {
        QMeasureKind::QDirichlet { alpha, beta } => (vec![alpha], vec![alpha + beta]),
        QMeasureKind::QHypergeometric { alpha, beta, gamma, eta } => {
            let nu = eta;
            let eta_p = gamma - beta + nu;
            let lambda = eta_p - alpha;
            let gamma_p = beta + lambda;
            (vec![nu, lambda], vec![gamma_p, eta_p])
        }
    };
    let mut v = C64::new(1.0, 0.0);
    for a in num {
        v *= q_pochhammer(c.pow(a), ell, c);
    }
    for b in den {
        let d = q_pochhammer(c.pow(b), ell, c);
        if d.norm() < 1e-300 {
            return Err(Error::Pole(format!("q_moment denominator vanishes at ell = {ell}")));
        }
        v /= d;
    }
    Ok(v)
}
