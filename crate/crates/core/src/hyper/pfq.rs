//! ₚF_q and the Gauss function ₂F₁.

use super::{check_tol, Accumulator, SeriesResult};
use crate::error::{Error, Result};
use crate::numerics::{as_nonpositive_integer, near_nonpositive_integer, C64};

const MAX_TERMS: usize = 2_000_000;

// Snap upper parameters that are numerically −N onto −N so the series
// terminates exactly; report the smallest such N.
fn snap_terminating(upper: &[C64]) -> (Vec<C64>, Option<usize>) {
    let mut n_min: Option<usize> = None;
    let snapped = upper
        .iter()
        .map(|&u| match as_nonpositive_integer(u, 1e-12) {
            Some(n) => {
                n_min = Some(n_min.map_or(n, |m| m.min(n)));
                C64::new(-(n as f64), 0.0)
            }
            None => u,
        })
        .collect();
    (snapped, n_min)
}

fn check_lower(lower: &[C64]) -> Result<()> {
    for &l in lower {
        if near_nonpositive_integer(l) {
            return Err(Error::Pole(format!("lower parameter {l} is a non-positive integer")));
        }
    }
    Ok(())
}

/// Direct power series Σ ∏(uᵢ)ₙ/∏(lⱼ)ₙ zⁿ/n! with term-ratio updates.
pub(crate) fn pfq_series(upper: &[C64], lower: &[C64], z: C64, tol: f64, max_terms: usize) -> SeriesResult {
    let mut acc = Accumulator::new(tol);
    let mut term = C64::new(1.0, 0.0);
    acc.push(term, 1.0);
    if z == C64::new(0.0, 0.0) {
        return SeriesResult::exact(term, 1);
    }
    let mut n = 0usize;
    loop {
        let nf = n as f64;
        let mut r = z / (nf + 1.0);
        for &u in upper {
            r *= u + nf;
        }
        for &l in lower {
            r /= l + nf;
        }
        term *= r;
        n += 1;
        if term == C64::new(0.0, 0.0) {
            acc.terminate();
            break;
        }
        acc.push(term, term.norm());
        if acc.done() || n >= max_terms {
            break;
        }
    }
    acc.result()
}

/// Generalized hypergeometric series ₚF_q(upper; lower; z).
///
/// Converges for every z when p ≤ q, for |z| < 1 when p = q+1, and only as
/// a terminating polynomial when p > q+1.
pub fn phi_pfq(upper: &[C64], lower: &[C64], z: C64, tol: f64) -> Result<SeriesResult> {
    check_tol(tol)?;
    check_lower(lower)?;
    let (upper, term_n) = snap_terminating(upper);
    let (p, q) = (upper.len(), lower.len());
    if term_n.is_none() {
        if p == q + 1 && z.norm() >= 1.0 {
            return Err(Error::Domain(format!("{p}F{q} needs |z| < 1, got |z| = {}", z.norm())));
        }
        if p > q + 1 && z != C64::new(0.0, 0.0) {
            return Err(Error::Domain(format!("{p}F{q} diverges unless terminating")));
        }
    }
    Ok(pfq_series(&upper, lower, z, tol, MAX_TERMS))
}

/// ₂F₁(a,b;c;z) by its power series only (no transformation), |z| < 1.
pub fn gauss_2f1_direct(a: C64, b: C64, c: C64, z: C64, tol: f64) -> Result<SeriesResult> {
    phi_pfq(&[a, b], &[c], z, tol)
}

/// Gauss hypergeometric function ₂F₁(a,b;c;z).
///
/// |z| ≤ 0.9 is summed directly. Beyond that the Pfaff transform
/// ₂F₁(a,b;c;z) = (1−z)^{−a} ₂F₁(a,c−b;c;z/(z−1)) is used whenever it
/// shrinks the argument; otherwise the direct series is summed for |z| < 1.
pub fn gauss_2f1(a: C64, b: C64, c: C64, z: C64, tol: f64) -> Result<SeriesResult> {
    check_tol(tol)?;
    check_lower(&[c])?;
    let (ab, term_n) = snap_terminating(&[a, b]);
    if term_n.is_some() || z.norm() <= 0.9 {
        return Ok(pfq_series(&ab, &[c], z, tol, MAX_TERMS));
    }
    let one = C64::new(1.0, 0.0);
    if z != one {
        let w = z / (z - one);
        if w.norm() < z.norm().min(1.0) {
            let inner = pfq_series(&[a, c - b], &[c], w, tol, MAX_TERMS);
            return Ok(inner.scaled((one - z).powc(-a)));
        }
    }
    if z.norm() < 1.0 {
        return Ok(pfq_series(&ab, &[c], z, tol, MAX_TERMS));
    }
    Err(Error::Domain(format!(
        "2F1 at z = {z}: |z| ≥ 1 and the Pfaff argument does not lie in the unit disc"
    )))
}
