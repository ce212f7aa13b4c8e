//! Classical hypergeometric series engines.
//!
//! Every engine returns a [`SeriesResult`]. Truncation follows one rule:
//! keep summing terms (or shells of a multiple series) until three
//! consecutive contributions are each below `tol·(1+|partial sum|)`, at
//! least eight have been taken, and the geometric tail estimate is below
//! `tol`. `est_trunc_error` is that tail estimate divided by
//! `1+|value|`.

mod appell;
mod belitsky;
mod convolution;
mod pfq;
mod saran;

pub use appell::appell_f2;
pub use belitsky::fk_l;
pub use convolution::{convolve2d, generic_f_a, CoeffSequence2D, FaParams};
pub use pfq::{gauss_2f1, gauss_2f1_direct, phi_pfq};
pub use saran::{
    fk_coefficients, fk_combine, fk_x_row, fk_y_row, in_domain_fk, saran_fk_reexpand,
    saran_fk_triple, FkParams,
};

use crate::numerics::C64;

/// Value of a truncated series with its truncation bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: C64,
    pub terms_used: usize,
    pub converged: bool,
    pub est_trunc_error: f64,
}

impl SeriesResult {
    pub fn exact(value: C64, terms_used: usize) -> Self {
        Self { value, terms_used, converged: true, est_trunc_error: 0.0 }
    }

    /// Multiply the value by `s`, keeping the absolute error estimate.
    pub(crate) fn scaled(self, s: C64) -> Self {
        let abs_err = self.est_trunc_error * (1.0 + self.value.norm()) * s.norm();
        let value = self.value * s;
        Self { value, est_trunc_error: abs_err / (1.0 + value.norm()), ..self }
    }
}

pub(crate) const MIN_TERMS: usize = 8;

/// Neumaier-compensated complex sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: C64,
    comp: C64,
}

impl KahanSum {
    #[inline]
    pub fn add(&mut self, x: C64) {
        self.sum.re = two_sum(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = two_sum(self.sum.im, x.im, &mut self.comp.im);
    }

    #[inline]
    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

#[inline]
fn two_sum(s: f64, x: f64, comp: &mut f64) -> f64 {
    let t = s + x;
    if s.abs() >= x.abs() {
        *comp += (s - t) + x;
    } else {
        *comp += (x - t) + s;
    }
    t
}

/// Running sum with the shared stopping rule.
#[derive(Debug, Clone)]
pub(crate) struct Accumulator {
    tol: f64,
    total: KahanSum,
    sum: C64,
    n: usize,
    small_run: usize,
    prev_abs: f64,
    cur_abs: f64,
    exact: bool,
}

impl Accumulator {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            total: KahanSum::default(),
            sum: C64::new(0.0, 0.0),
            n: 0,
            small_run: 0,
            prev_abs: f64::INFINITY,
            cur_abs: f64::INFINITY,
            exact: false,
        }
    }

    /// Add one term (or one shell with modulus sum `abs`).
    pub fn push(&mut self, contribution: C64, abs: f64) {
        self.total.add(contribution);
        self.sum = self.total.value();
        self.n += 1;
        self.prev_abs = self.cur_abs;
        self.cur_abs = abs;
        if abs < self.tol * (1.0 + self.sum.norm()) {
            self.small_run += 1;
        } else {
            self.small_run = 0;
        }
    }

    /// Declare the series finished exactly (terminating series).
    pub fn terminate(&mut self) {
        self.exact = true;
    }

    fn tail(&self) -> f64 {
        if self.exact {
            return 0.0;
        }
        if self.cur_abs == 0.0 {
            return if self.prev_abs == 0.0 { 0.0 } else { f64::INFINITY };
        }
        let r = self.cur_abs / self.prev_abs;
        if r.is_finite() && r < 0.999 {
            2.0 * self.cur_abs * r / (1.0 - r)
        } else {
            f64::INFINITY
        }
    }

    pub fn est(&self) -> f64 {
        self.tail() / (1.0 + self.sum.norm())
    }

    pub fn done(&self) -> bool {
        self.exact || (self.n >= MIN_TERMS && self.small_run >= 3 && self.est() <= self.tol)
    }

    pub fn result(&self) -> SeriesResult {
        let est = self.est();
        SeriesResult {
            value: self.sum,
            terms_used: self.n,
            converged: est <= self.tol,
            est_trunc_error: est,
        }
    }
}

pub(crate) fn check_tol(tol: f64) -> crate::Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(crate::Error::InvalidParameter(format!("tolerance must be positive, got {tol}")))
    }
}
