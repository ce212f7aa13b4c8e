//! Basic hypergeometric series and the q-side integral machinery.
//!
//! Series parameters come in two conventions. [`rphis`] and [`Phi3Spec`]
//! take raw bases, since several kernels carry free bases such as u⁻¹ or
//! q/(ux). Everything named after a tilde function ([`rphis_tilde`],
//! [`phi_k_q`], the q-measures, the weights) takes exponents a and works
//! with qᵃ internally.

mod discrete;
mod jackson;
mod phi3;
mod phik;
mod shift;

pub use discrete::{
    discrete_weight, discrete_weight_limit, gasper_discrete_lhs, gasper_discrete_3phi2, DiscreteWeightParams,
    GasperBases, WeightKind,
};
pub use jackson::{
    jackson_integral, lattice_index, q_measure_density, q_measure_density_at, q_measure_discretize, q_moment,
    QMeasureKind, QMeasureSpec,
};
pub use phi3::{phi3, Phi3Spec};
pub use phik::{phi_k_q, phi_k_q_reexpand, phi_k_q_triple};
pub(crate) use shift::lattice_3phi2_at;
pub use shift::{qfk_erdelyi_integrand, qfk_erdelyi_simplified_integrand, qshift_operator_kernel, QErdelyiParams};

use crate::error::{Error, Result};
use crate::hyper::{check_tol, Accumulator, SeriesResult};
use crate::numerics::{QContext, C64};

const MAX_TERMS: usize = 100_000;
// relative size below which a denominator factor 1 − b qⁿ counts as zero
const ZERO_FACTOR: f64 = 1e-13;
// largest N recognised as a terminating base q^{−N}
const MAX_TERMINATING_ORDER: f64 = 1e5;

/// If `a` equals q^{−N} for a non-negative integer N, return N.
pub fn terminating_order(a: C64, q: f64) -> Option<usize> {
    if a.im.abs() > 1e-12 * a.norm() || a.re < 1.0 - 1e-12 {
        return None;
    }
    let e = -a.re.ln() / q.ln();
    let n = e.round();
    ((e - n).abs() < 1e-8 * (1.0 + n) && n <= MAX_TERMINATING_ORDER).then_some(n as usize)
}

/// True when (b;q)_n vanishes for some n, i.e. b = q^{−m}.
pub(crate) fn is_q_pole(b: C64, q: f64) -> bool {
    terminating_order(b, q).is_some()
}

/// Factor 1 − b qʲ for a denominator, with a pole check.
#[inline]
pub(crate) fn den_factor(b: C64, qj: f64) -> Result<C64> {
    let d = C64::new(1.0, 0.0) - b * qj;
    if d.norm() < ZERO_FACTOR * (1.0 + (b * qj).norm()) {
        return Err(Error::Pole(format!("denominator factor 1 − b qʲ vanishes for b = {b}")));
    }
    Ok(d)
}

/// Factor 1 − a qʲ for a numerator, exactly zero once a terminating base
/// a = q^{−N} reaches j = N.
#[inline]
pub(crate) fn num_factor(a: C64, term: Option<usize>, j: usize, qj: f64) -> C64 {
    if term == Some(j) {
        C64::new(0.0, 0.0)
    } else {
        C64::new(1.0, 0.0) - a * qj
    }
}

/// Basic hypergeometric series ᵣφₛ(a₁…a_r; b₁…b_s; q, z) with the factor
/// ((−1)ⁿ q^{n(n−1)/2})^{1+s−r}. Parameters are bases.
///
/// A numerator q^{−N} makes the sum finite; it is then taken exactly over
/// N+1 terms whatever the size of z.
pub fn rphis(upper: &[C64], lower: &[C64], z: C64, ctx: &QContext, tol: f64) -> Result<SeriesResult> {
    check_tol(tol)?;
    let q = ctx.q();
    let (r, s) = (upper.len(), lower.len());
    let terms: Vec<Option<usize>> = upper.iter().map(|&a| terminating_order(a, q)).collect();
    let term_n = terms.iter().flatten().min().copied();
    if term_n.is_none() {
        if r == s + 1 && z.norm() >= 1.0 {
            return Err(Error::Domain(format!("{r}phi{s} needs |z| < 1, got |z| = {}", z.norm())));
        }
        if r > s + 1 && z != C64::new(0.0, 0.0) {
            return Err(Error::Domain(format!("{r}phi{s} with r > s+1 diverges unless terminating")));
        }
    }
    let e = 1.0 + s as f64 - r as f64;
    let mut acc = Accumulator::new(tol);
    let mut t = C64::new(1.0, 0.0);
    acc.push(t, 1.0);
    let mut qn = 1.0;
    for n in 0..MAX_TERMS {
        if term_n == Some(n) {
            acc.terminate();
            break;
        }
        let mut ratio = z / (1.0 - qn * q);
        for (&a, &ta) in upper.iter().zip(&terms) {
            ratio *= num_factor(a, ta, n, qn);
        }
        for &b in lower {
            ratio /= den_factor(b, qn)?;
        }
        if e != 0.0 {
            let sign = if e.rem_euclid(2.0) == 1.0 { -1.0 } else { 1.0 };
            ratio *= sign * q.powf(n as f64 * e);
        }
        t *= ratio;
        acc.push(t, t.norm());
        if acc.done() {
            break;
        }
        qn *= q;
    }
    Ok(acc.result())
}

/// ᵣφ̃ₛ: [`rphis`] with every parameter given as an exponent a ↦ qᵃ.
pub fn rphis_tilde(upper: &[C64], lower: &[C64], z: C64, ctx: &QContext, tol: f64) -> Result<SeriesResult> {
    let up: Vec<C64> = upper.iter().map(|&a| ctx.pow(a)).collect();
    let lo: Vec<C64> = lower.iter().map(|&b| ctx.pow(b)).collect();
    rphis(&up, &lo, z, ctx, tol)
}

/// Cumulative products Π(1 − aᵢqʲ)/Π(1 − bᵢqʲ), j < n, grown on demand.
#[derive(Debug, Clone)]
pub(crate) struct PochTable {
    num: Vec<(C64, Option<usize>)>,
    den: Vec<C64>,
    q: f64,
    vals: Vec<C64>,
}

impl PochTable {
    pub fn new(num: &[C64], den: &[C64], q: f64) -> Self {
        Self {
            num: num.iter().map(|&a| (a, terminating_order(a, q))).collect(),
            den: den.to_vec(),
            q,
            vals: vec![C64::new(1.0, 0.0)],
        }
    }

    /// Largest n with a non-zero entry, if a numerator terminates.
    pub fn bound(&self) -> Option<usize> {
        self.num.iter().filter_map(|x| x.1).min()
    }

    /// Make entries 0..len available.
    pub fn ensure(&mut self, len: usize) -> Result<()> {
        while self.vals.len() < len {
            let j = self.vals.len() - 1;
            let qj = self.q.powi(j as i32);
            let mut f = *self.vals.last().unwrap_or(&C64::new(1.0, 0.0));
            for &(a, t) in &self.num {
                f *= num_factor(a, t, j, qj);
            }
            for &b in &self.den {
                f /= den_factor(b, qj)?;
            }
            self.vals.push(f);
        }
        Ok(())
    }

    #[inline]
    pub fn get(&self, n: usize) -> C64 {
        self.vals[n]
    }
}
