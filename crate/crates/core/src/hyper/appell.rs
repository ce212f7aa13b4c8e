//! Appell's F₂.

use super::{check_tol, Accumulator, SeriesResult};
use crate::error::{Error, Result};
use crate::numerics::{near_nonpositive_integer, C64};

const MAX_SHELLS: usize = 20_000;

/// F₂[a,b₁,b₂;c₁,c₂;y,z] = Σ (a)_{m+n}(b₁)_m(b₂)_n/((c₁)_m(c₂)_n m!n!) yᵐzⁿ,
/// summed over shells m+n = s. Requires |y|+|z| < 1.
#[allow(clippy::too_many_arguments)]
pub fn appell_f2(a: C64, b1: C64, b2: C64, c1: C64, c2: C64, y: C64, z: C64, tol: f64) -> Result<SeriesResult> {
    check_tol(tol)?;
    for c in [c1, c2] {
        if near_nonpositive_integer(c) {
            return Err(Error::Pole(format!("F2 lower parameter {c} is a non-positive integer")));
        }
    }
    if y.norm() + z.norm() >= 1.0 {
        return Err(Error::Domain(format!("F2 needs |y|+|z| < 1, got {}", y.norm() + z.norm())));
    }
    let mut acc = Accumulator::new(tol);
    // shell[m] = T(m, s−m)
    let mut shell = vec![C64::new(1.0, 0.0)];
    acc.push(shell[0], 1.0);
    for s in 0..MAX_SHELLS {
        let mut next = Vec::with_capacity(s + 2);
        for (m, &t) in shell.iter().enumerate() {
            let n = (s - m) as f64;
            next.push(t * (a + s as f64) * (b2 + n) / ((c2 + n) * (n + 1.0)) * z);
        }
        let sf = s as f64;
        next.push(shell[s] * (a + sf) * (b1 + sf) / ((c1 + sf) * (sf + 1.0)) * y);
        shell = next;
        let (sum, abs) = shell.iter().fold((C64::new(0.0, 0.0), 0.0), |(s, a), t| (s + t, a + t.norm()));
        if abs == 0.0 && shell.iter().all(|t| *t == C64::new(0.0, 0.0)) && s > 0 {
            // every later shell is generated from zeros
            acc.push(sum, abs);
            acc.terminate();
            break;
        }
        acc.push(sum, abs);
        if acc.done() {
            break;
        }
    }
    Ok(acc.result())
}
