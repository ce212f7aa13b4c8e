//! Integral identities with samplers and paired evaluators.
//!
//! An [`IdentityCase`] bundles the hypotheses of an identity as predicates,
//! a sampler proposing parameter points, and two evaluators. Verification
//! draws points by rejection, evaluates both sides and compares them with
//! the residual |L−R|/(1+|L|).

mod classical;
mod discrete;
mod qcases;
mod sampler;

pub use classical::{fk_erdelyi_form_agreement, FormAgreement};

use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::numerics::{QContext, C64};
use crate::qkernels::QMeasureSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

/// Largest sample count accepted by [`sample_parameters`].
pub const MAX_SAMPLES: usize = 10_000;
/// Rejected proposals allowed per sample before giving up.
pub const REJECTION_CAP: usize = 10_000;

/// Named parameters and arguments of one identity instance. Integer
/// selectors (orders, variant indices) are stored as real values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParameterPoint {
    pub values: BTreeMap<String, C64>,
    pub arguments: BTreeMap<String, C64>,
}

impl ParameterPoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_value(mut self, name: &str, v: C64) -> Self {
        self.values.insert(name.to_string(), v);
        self
    }

    pub fn with_argument(mut self, name: &str, v: C64) -> Self {
        self.arguments.insert(name.to_string(), v);
        self
    }

    pub fn value(&self, name: &str) -> Result<C64> {
        self.values
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("parameter point has no value '{name}'")))
    }

    pub fn argument(&self, name: &str) -> Result<C64> {
        self.arguments
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("parameter point has no argument '{name}'")))
    }

    /// A value read as a non-negative integer.
    pub fn index(&self, name: &str) -> Result<usize> {
        let v = self.value(name)?;
        let n = v.re.round();
        if v.im != 0.0 || n < 0.0 || (v.re - n).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("'{name}' = {v} is not a non-negative integer")));
        }
        Ok(n as usize)
    }

    // real part of a value, NaN if missing so that predicates fail
    pub(crate) fn re(&self, name: &str) -> f64 {
        self.values.get(name).map_or(f64::NAN, |v| v.re)
    }
}

/// Rough cost of evaluating one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostClass {
    Cheap,
    SingleIntegral,
    TripleIntegral,
    QLattice,
}

impl CostClass {
    pub fn default_tol(self) -> f64 {
        match self {
            CostClass::Cheap => 1e-10,
            CostClass::SingleIntegral => 1e-9,
            CostClass::TripleIntegral => 1e-6,
            CostClass::QLattice => 1e-8,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CostClass::Cheap => "cheap",
            CostClass::SingleIntegral => "single-integral",
            CostClass::TripleIntegral => "triple-integral",
            CostClass::QLattice => "q-lattice",
        }
    }
}

impl fmt::Display for CostClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Numerical knobs shared by all evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSettings {
    /// Gauss–Jacobi nodes for one-dimensional integrals.
    pub order: usize,
    /// Nodes per axis for tensor-product integrals.
    pub multi_order: usize,
    /// Base of the q-identities.
    pub q: f64,
    /// Jackson lattices keep at least this multiple of their default length.
    pub lattice_scale: usize,
    /// Tolerance handed to series engines.
    pub series_tol: f64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self { order: 96, multi_order: 32, q: 0.5, lattice_scale: 1, series_tol: 1e-16 }
    }
}

impl EvalSettings {
    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    /// Doubles quadrature orders and the Jackson cutoff.
    pub fn refined(&self) -> Self {
        Self {
            order: self.order * 2,
            multi_order: self.multi_order * 2,
            lattice_scale: self.lattice_scale * 2,
            ..*self
        }
    }

    pub fn ctx(&self) -> Result<QContext> {
        QContext::new(self.q)
    }

    /// Lattice discretization of a q-measure honoring `lattice_scale`.
    pub fn lattice(&self, spec: &QMeasureSpec) -> Result<DiscreteMeasure> {
        let base = spec.discretize(0)?;
        if self.lattice_scale <= 1 {
            return Ok(base);
        }
        spec.discretize(base.len() * self.lattice_scale)
    }
}

pub type Evaluator = Arc<dyn Fn(&ParameterPoint, &EvalSettings) -> Result<C64> + Send + Sync>;
pub type Sampler = Arc<dyn Fn(&mut ChaCha8Rng, usize) -> ParameterPoint + Send + Sync>;
type Predicate = Arc<dyn Fn(&ParameterPoint) -> bool + Send + Sync>;

/// A hypothesis or numerical safety margin on a parameter point.
#[derive(Clone)]
pub struct Constraint {
    pub description: String,
    check: Predicate,
}

impl Constraint {
    pub fn new(description: &str, check: impl Fn(&ParameterPoint) -> bool + Send + Sync + 'static) -> Self {
        Self { description: description.to_string(), check: Arc::new(check) }
    }

    pub fn holds(&self, p: &ParameterPoint) -> bool {
        (self.check)(p)
    }
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Constraint").field(&self.description).finish()
    }
}

/// One verifiable identity.
#[derive(Clone)]
pub struct IdentityCase {
    pub id: String,
    pub anchor: String,
    pub cost_class: CostClass,
    pub tol: f64,
    /// Whether the identity depends on the base q of [`EvalSettings`].
    pub q_dependent: bool,
    pub constraints: Vec<Constraint>,
    pub sampler: Sampler,
    pub lhs: Evaluator,
    pub rhs: Evaluator,
}

impl fmt::Debug for IdentityCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdentityCase")
            .field("id", &self.id)
            .field("anchor", &self.anchor)
            .field("cost_class", &self.cost_class)
            .field("tol", &self.tol)
            .field("q_dependent", &self.q_dependent)
            .field("constraints", &self.constraints)
            .finish_non_exhaustive()
    }
}

impl IdentityCase {
    /// A case with the default tolerance of its cost class and no constraints.
    pub fn new(
        id: &str,
        anchor: &str,
        cost_class: CostClass,
        sampler: impl Fn(&mut ChaCha8Rng, usize) -> ParameterPoint + Send + Sync + 'static,
        lhs: impl Fn(&ParameterPoint, &EvalSettings) -> Result<C64> + Send + Sync + 'static,
        rhs: impl Fn(&ParameterPoint, &EvalSettings) -> Result<C64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            id: id.to_string(),
            anchor: anchor.to_string(),
            cost_class,
            tol: cost_class.default_tol(),
            q_dependent: false,
            constraints: Vec::new(),
            sampler: Arc::new(sampler),
            lhs: Arc::new(lhs),
            rhs: Arc::new(rhs),
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn q_dependent(mut self) -> Self {
        self.q_dependent = true;
        self
    }

    pub fn constraint(mut self, description: &str, check: impl Fn(&ParameterPoint) -> bool + Send + Sync + 'static) -> Self {
        self.constraints.push(Constraint::new(description, check));
        self
    }

    /// Description of the first constraint `p` violates.
    pub fn violated(&self, p: &ParameterPoint) -> Option<&str> {
        self.constraints.iter().find(|c| !c.holds(p)).map(|c| c.description.as_str())
    }

    pub fn admits(&self, p: &ParameterPoint) -> bool {
        self.violated(p).is_none()
    }

    /// The same case with its right-hand side multiplied by `factor`; used
    /// to check that the harness notices a wrong identity.
    pub fn corrupted(&self, factor: f64) -> IdentityCase {
        let rhs = self.rhs.clone();
        IdentityCase {
            id: format!("{}-corrupted", self.id),
            rhs: Arc::new(move |p, s| Ok(rhs(p, s)? * factor)),
            ..self.clone()
        }
    }
}

/// One sample that failed, either by residual or by an evaluator error.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub point: ParameterPoint,
    /// Infinite when an evaluator failed.
    pub residual: f64,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationResult {
    pub id: String,
    pub samples: usize,
    pub tol: f64,
    /// Largest residual among samples where both sides evaluated.
    pub max_rel_residual: f64,
    pub failures: Vec<Failure>,
    pub wall_time: Duration,
}

impl VerificationResult {
    pub fn pass(&self) -> bool {
        self.max_rel_residual <= self.tol && self.failures.is_empty()
    }
}

/// |L−R|/(1+|L|).
pub fn relative_residual(lhs: C64, rhs: C64) -> f64 {
    (lhs - rhs).norm() / (1.0 + lhs.norm())
}

// named values in order
fn vals<const N: usize>(p: &ParameterPoint, names: [&str; N]) -> Result<[C64; N]> {
    let mut out = [C64::new(0.0, 0.0); N];
    for (o, n) in out.iter_mut().zip(names) {
        *o = p.value(n)?;
    }
    Ok(out)
}

static REGISTRY: OnceLock<Vec<IdentityCase>> = OnceLock::new();

/// Every built-in identity, in a fixed order.
pub fn builtin_registry() -> &'static [IdentityCase] {
    REGISTRY.get_or_init(|| {
        let mut v = classical::cases();
        v.extend(qcases::cases());
        v.extend(discrete::cases());
        v
    })
}

pub fn lookup(id: &str) -> Result<&'static IdentityCase> {
    builtin_registry()
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

/// `count` points drawn by rejection from the case's sampler; the same seed
/// always yields the same list.
pub fn sample_parameters(case: &IdentityCase, seed: u64, count: usize) -> Result<Vec<ParameterPoint>> {
    if count > MAX_SAMPLES {
        return Err(Error::OutOfRange(format!("sample count {count} exceeds {MAX_SAMPLES}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut last = "";
        let mut found = None;
        for _ in 0..REJECTION_CAP {
            let p = (case.sampler)(&mut rng, i);
            match case.violated(&p) {
                None => {
                    found = Some(p);
                    break;
                }
                Some(d) => last = d,
            }
        }
        match found {
            Some(p) => out.push(p),
            None => {
                return Err(Error::SamplerCap(format!(
                    "{}: {REJECTION_CAP} proposals rejected for sample {i}, last by '{last}'",
                    case.id
                )))
            }
        }
    }
    Ok(out)
}

/// Evaluates both sides at the given points. Evaluator errors become
/// failures with infinite residual; they never stop the batch.
pub fn verify_points(case: &IdentityCase, points: &[ParameterPoint], tol: f64, settings: &EvalSettings) -> VerificationResult {
    let start = Instant::now();
    let mut max: f64 = 0.0;
    let mut failures = Vec::new();
    for p in points {
        let outcome = (case.lhs)(p, settings).and_then(|l| Ok((l, (case.rhs)(p, settings)?)));
        match outcome {
            Ok((l, r)) => {
                let res = relative_residual(l, r);
                let res = if res.is_nan() { f64::INFINITY } else { res };
                if res.is_finite() {
                    max = max.max(res);
                }
                if res > tol {
                    let diagnostic = (!res.is_finite()).then(|| format!("non-finite values: lhs {l}, rhs {r}"));
                    failures.push(Failure { point: p.clone(), residual: res, diagnostic });
                }
            }
            Err(e) => failures.push(Failure { point: p.clone(), residual: f64::INFINITY, diagnostic: Some(e.to_string()) }),
        }
    }
    VerificationResult {
        id: case.id.clone(),
        samples: points.len(),
        tol,
        max_rel_residual: max,
        failures,
        wall_time: start.elapsed(),
    }
}

/// Samples `count` points with `seed` and verifies them. The tolerance is
/// the case's own unless overridden.
pub fn verify_identity(
    case: &IdentityCase,
    seed: u64,
    count: usize,
    tol_override: Option<f64>,
    settings: &EvalSettings,
) -> Result<VerificationResult> {
    let start = Instant::now();
    let points = sample_parameters(case, seed, count)?;
    let mut r = verify_points(case, &points, tol_override.unwrap_or(case.tol), settings);
    r.wall_time = start.elapsed();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::re;
    use std::collections::HashSet;

    #[test]
    fn ids_unique_and_lookup() {
        let reg = builtin_registry();
        assert_eq!(reg.len(), 26);
        let ids: HashSet<_> = reg.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids.len(), reg.len());
        assert_eq!(lookup("fk-erdelyi").unwrap().cost_class, CostClass::TripleIntegral);
        assert!(matches!(lookup("bogus-id"), Err(Error::UnknownIdentity(_))));
    }

    #[test]
    fn every_sampler_meets_its_constraints() {
        for case in builtin_registry() {
            let pts = sample_parameters(case, 7, 12).unwrap_or_else(|e| panic!("{}: {e}", case.id));
            assert_eq!(pts.len(), 12);
            assert!(pts.iter().all(|p| case.admits(p)), "{}", case.id);
        }
    }

    #[test]
    fn seed_reproducibility() {
        let case = lookup("euler-1").unwrap();
        assert_eq!(sample_parameters(case, 42, 20).unwrap(), sample_parameters(case, 42, 20).unwrap());
        assert_ne!(sample_parameters(case, 42, 5).unwrap(), sample_parameters(case, 43, 5).unwrap());
        assert!(sample_parameters(case, 1, MAX_SAMPLES + 1).is_err());
    }

    fn toy(lhs: f64, rhs: f64) -> IdentityCase {
        IdentityCase::new(
            "toy",
            "toy",
            CostClass::Cheap,
            |_, _| ParameterPoint::new().with_value("a", re(1.0)),
            move |_, _| Ok(re(lhs)),
            move |_, _| Ok(re(rhs)),
        )
    }

    #[test]
    fn over_constrained_sampler_hits_cap() {
        let case = toy(1.0, 1.0).constraint("never", |_| false);
        assert!(matches!(sample_parameters(&case, 0, 1), Err(Error::SamplerCap(_))));
    }

    #[test]
    fn errors_are_recorded_not_fatal() {
        let case = IdentityCase::new(
            "flaky",
            "toy",
            CostClass::Cheap,
            |_, i| ParameterPoint::new().with_value("i", re(i as f64)),
            |p, _| if p.index("i")? == 1 { Err(Error::Domain("boom".into())) } else { Ok(re(2.0)) },
            |_, _| Ok(re(2.0)),
        );
        let r = verify_identity(&case, 0, 3, None, &EvalSettings::default()).unwrap();
        assert_eq!(r.samples, 3);
        assert_eq!(r.failures.len(), 1);
        assert!(r.failures[0].residual.is_infinite());
        assert!(r.failures[0].diagnostic.as_deref().unwrap().contains("boom"));
        assert_eq!(r.max_rel_residual, 0.0);
        assert!(!r.pass());
    }

    #[test]
    fn corrupted_case_fails_with_expected_size() {
        let case = toy(3.0, 3.0);
        assert!(verify_identity(&case, 0, 2, None, &EvalSettings::default()).unwrap().pass());
        let bad = case.corrupted(1.0 + 1e-4);
        let r = verify_identity(&bad, 0, 2, None, &EvalSettings::default()).unwrap();
        assert!(!r.pass());
        assert!((r.max_rel_residual - 3e-4 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn refinement_doubles_knobs() {
        let s = EvalSettings::default().refined();
        assert_eq!((s.order, s.multi_order, s.lattice_scale), (192, 64, 2));
    }
}
