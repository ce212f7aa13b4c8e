//! Γ, log Γ and rising factorials.

use super::{near_nonpositive_integer, C64};
use crate::error::{Error, Result};
use std::f64::consts::PI;

// Lanczos approximation, g = 7, nine coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_log_gamma(z: C64) -> C64 {
    // valid for Re z ≥ 1/2
    let zm = z - 1.0;
    let mut acc = C64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (zm + k as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (zm + 0.5) * t.ln() - t + acc.ln()
}

/// Principal-branch log Γ(z).
pub fn log_gamma(z: C64) -> Result<C64> {
    if near_nonpositive_integer(z) {
        return Err(Error::Pole(format!("log_gamma at non-positive integer {z}")));
    }
    if z.re < 0.5 {
        // reflection Γ(z)Γ(1−z) = π / sin(πz)
        let s = (PI * z).sin();
        Ok(C64::new(PI.ln(), 0.0) - s.ln() - lanczos_log_gamma(1.0 - z))
    } else {
        Ok(lanczos_log_gamma(z))
    }
}

/// Γ(z).
pub fn gamma(z: C64) -> Result<C64> {
    if z.im == 0.0 && z.re > 0.0 && z.re <= 30.0 && z.re == z.re.round() {
        let mut f = 1.0;
        for k in 2..(z.re as usize) {
            f *= k as f64;
        }
        return Ok(C64::new(f, 0.0));
    }
    Ok(log_gamma(z)?.exp())
}

/// 1/Γ(z), zero at the poles of Γ.
pub fn rgamma(z: C64) -> C64 {
    if near_nonpositive_integer(z) {
        return C64::new(0.0, 0.0);
    }
    if z.im == 0.0 && z.re > 0.0 && z.re <= 30.0 && z.re == z.re.round() {
        return C64::new(1.0, 0.0) / gamma(z).unwrap_or(C64::new(f64::INFINITY, 0.0));
    }
    match log_gamma(z) {
        Ok(l) => (-l).exp(),
        Err(_) => C64::new(0.0, 0.0),
    }
}

/// Rising factorial (a)_n = a(a+1)…(a+n−1) as an exact product.
pub fn pochhammer(a: C64, n: usize) -> C64 {
    let mut p = C64::new(1.0, 0.0);
    for j in 0..n {
        p *= a + j as f64;
    }
    p
}
