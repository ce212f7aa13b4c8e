//! Numerical evaluation of Saran's F_K function and its relatives.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: gamma, Pochhammer and q-factorial primitives.
//! * [`hyper`]: classical series engines (₂F₁, ₚFq, Appell F₂, F_K, the
//!   L-variable F_K and the convolution family ℱ^a).
//! * [`measures`]: Dirichlet and hypergeometric measures on [0,1] with
//!   Gauss–Jacobi quadrature.
//! * [`qkernels`]: basic hypergeometric series, Φ_K, φ^(3), Jackson
//!   integrals and q-measures.
//! * [`registry`]: integral identities with samplers and paired evaluators.

pub mod error;
pub mod hyper;
pub mod measures;
pub mod numerics;
pub mod qkernels;
pub mod registry;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numerics::C64;
