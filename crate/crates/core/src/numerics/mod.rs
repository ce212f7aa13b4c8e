//! Scalar building blocks: gamma, Pochhammer and q-factorial primitives.
//!
//! All values are [`C64`]. Powers use the principal branch. A value is
//! treated as sitting on a pole when it lies within [`POLE_TOL`] of a
//! non-positive integer.

mod gamma;
mod qfactorial;

pub use gamma::{gamma, log_gamma, pochhammer, rgamma};
pub use qfactorial::{
    ln_q_gamma, q_beta, q_beta_product, q_binomial, q_gamma, q_pochhammer, q_pochhammer_inf,
    q_pochhammer_inf_ratio, QContext,
};

use num_complex::Complex64;

pub type C64 = Complex64;

/// Distance to the pole lattice ℤ_{≤0} below which a value counts as a pole.
pub const POLE_TOL: f64 = 1e-9;

/// Shorthand for a real complex number.
#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// True when `z` is within [`POLE_TOL`] of 0, −1, −2, …
pub fn near_nonpositive_integer(z: C64) -> bool {
    if z.im.abs() > POLE_TOL || z.re > POLE_TOL {
        return false;
    }
    (z.re - z.re.round()).abs() < POLE_TOL
}

/// If `z` is (numerically) a non-positive integer −N, return N.
pub fn as_nonpositive_integer(z: C64, tol: f64) -> Option<usize> {
    if z.im.abs() > tol || z.re > tol {
        return None;
    }
    let r = z.re.round();
    ((z.re - r).abs() <= tol * (1.0 + r.abs())).then_some((-r) as usize)
}

/// ln(1 − w) accurate for small |w|.
pub(crate) fn ln1m(w: C64) -> C64 {
    if w.norm() < 1e-3 {
        // −Σ wᵏ/k, eight terms suffice for |w| < 1e-3
        let mut acc = C64::new(0.0, 0.0);
        let mut p = w;
        for k in 1..=8 {
            acc -= p / k as f64;
            p *= w;
        }
        acc
    } else {
        (C64::new(1.0, 0.0) - w).ln()
    }
}

/// Finite and not NaN in both components.
#[inline]
pub fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
