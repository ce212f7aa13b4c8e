//! Proposal helpers shared by the case samplers.

use super::ParameterPoint;
use crate::numerics::{near_nonpositive_integer, re, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

pub(crate) const PARAM_LO: f64 = 0.1;
pub(crate) const PARAM_HI: f64 = 2.5;

/// Builds one proposal.
pub(crate) struct Draw<'a> {
    rng: &'a mut ChaCha8Rng,
    pub point: ParameterPoint,
}

impl<'a> Draw<'a> {
    pub fn new(rng: &'a mut ChaCha8Rng) -> Self {
        Self { rng, point: ParameterPoint::new() }
    }

    /// Real parameter uniform on (0.1, 2.5).
    pub fn param(&mut self, name: &str) -> f64 {
        let v = self.rng.gen_range(PARAM_LO..PARAM_HI);
        self.point.values.insert(name.to_string(), re(v));
        v
    }

    pub fn fixed(&mut self, name: &str, v: f64) {
        self.point.values.insert(name.to_string(), re(v));
    }

    /// Complex argument uniform in the disc of radius r.
    pub fn disc(&mut self, name: &str, r: f64) -> C64 {
        let rad = r * self.rng.gen::<f64>().sqrt();
        let th = self.rng.gen_range(0.0..TAU);
        let z = C64::from_polar(rad, th);
        self.point.arguments.insert(name.to_string(), z);
        z
    }

    pub fn finish(self) -> ParameterPoint {
        self.point
    }
}

/// F_K domain with margin: |x|, |y| ≤ 0.8, |z| ≤ 0.8(1−|x|)(1−|y|).
pub(crate) fn fk_arguments(d: &mut Draw<'_>) {
    let x = d.disc("x", 0.8);
    let y = d.disc("y", 0.8);
    d.disc("z", 0.8 * (1.0 - x.norm()) * (1.0 - y.norm()));
}

/// Distance of a real number from the set {0, −1, −2, …}.
pub(crate) fn dist_nonpos_int(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        (v - v.round()).abs()
    }
}

/// Distance from the nearest integer.
pub(crate) fn dist_int(v: f64) -> f64 {
    (v - v.round()).abs()
}

pub(crate) fn not_pole(v: f64) -> bool {
    !near_nonpositive_integer(re(v)) && dist_nonpos_int(v) > 0.02
}
