//! Trace identities: vanishing power traces for stable pairs, and the trace
//! hypotheses of the Lie and Jordan reducibility theorems.
//!
//! In finite dimension every element of an algebra has finite rank, so the
//! "finite-rank ideal" is the whole algebra; checks run over basis elements
//! plus seeded random elements.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closure::{random_element_with, AlgebraBasis};
use crate::error::{Error, Result};
use crate::numat::{common_dim, rank, Matrix, Tolerance};
use crate::speccond::{t_stable_exact, PointSet, ProbeSet, Verdict};

pub const DEFAULT_SAMPLES: usize = 64;

/// Basis triples beyond this count are subsampled in `cyclic_trace_symmetry`.
pub const MAX_BASIS_TRIPLES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceVerdict {
    Pass,
    Fail,
    PreconditionFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub identity: String,
    pub max_residual: f64,
    pub threshold: f64,
    pub samples: usize,
    pub verdict: TraceVerdict,
    /// Set when a hypothesis of the identity was not met.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precondition: Option<String>,
}

impl TraceReport {
    fn from_residuals(identity: &str, residuals: Residuals, tol: &Tolerance) -> Self {
        let threshold = tol.effective(residuals.scale);
        let verdict = if residuals.max <= threshold {
            TraceVerdict::Pass
        } else {
            TraceVerdict::Fail
        };
        Self {
            identity: identity.to_owned(),
            max_residual: residuals.max,
            threshold,
            samples: residuals.count,
            verdict,
            precondition: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == TraceVerdict::Pass
    }
}

/// Running maximum of residuals and of the operand scale they are judged
/// against.
#[derive(Default)]
struct Residuals {
    max: f64,
    scale: f64,
    count: usize,
}

impl Residuals {
    fn push(&mut self, residual: f64, scale: f64) {
        self.max = self.max.max(residual);
        self.scale = self.scale.max(scale);
        self.count += 1;
    }
}

/// `tr(A^k B)` and `tr(A B^k)` for `k = 1..n`.
///
/// The precondition (T-stable spectrum of `A` with respect to `B`) is checked
/// and recorded but does not stop the check.
pub fn power_trace_vanishing(a: &Matrix, b: &Matrix, tol: &Tolerance) -> Result<TraceReport> {
    a.check_same_dim(b)?;
    let stable = t_stable_exact(a, b, tol)?.verdict == Verdict::Holds;
    let n = a.dim();
    let (na, nb) = (a.norm_fro(), b.norm_fro());
    let mut res = Residuals::default();
    let mut ak = a.clone();
    let mut bk = b.clone();
    for k in 1..=n {
        let kk = k as i32;
        res.push((&ak * b).trace().norm(), na.powi(kk) * nb);
        res.push((a * &bk).trace().norm(), na * nb.powi(kk));
        ak = &ak * a;
        bk = &bk * b;
    }
    let mut report = TraceReport::from_residuals("tr(A^k B) = tr(A B^k) = 0", res, tol);
    if !stable {
        report.precondition = Some("A does not have B-stable spectrum".into());
    }
    Ok(report)
}

fn with_samples(basis: &AlgebraBasis, samples: usize, seed: u64) -> Vec<Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = basis.elements().to_vec();
    out.extend((0..samples).map(|_| random_element_with(basis, &mut rng)));
    out
}

/// `tr(XY) = 0` over all basis pairs and pairs of random elements.
pub fn pairwise_trace_zero(basis: &AlgebraBasis, samples: usize, seed: u64, tol: &Tolerance) -> TraceReport {
    let b = basis.elements();
    let mut res = Residuals::default();
    for i in 0..b.len() {
        for j in i..b.len() {
            res.push((&b[i] * &b[j]).trace().norm(), b[i].norm_fro() * b[j].norm_fro());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = random_element_with(basis, &mut rng);
        let y = random_element_with(basis, &mut rng);
        res.push((&x * &y).trace().norm(), x.norm_fro() * y.norm_fro());
    }
    TraceReport::from_residuals("tr(XY) = 0", res, tol)
}

/// `tr(X^2) = 0` over basis and random elements, together with the pairwise
/// report it implies by polarization.
pub fn square_trace_zero(
    basis: &AlgebraBasis,
    samples: usize,
    seed: u64,
    tol: &Tolerance,
) -> (TraceReport, TraceReport) {
    let mut res = Residuals::default();
    for x in with_samples(basis, samples, seed) {
        let norm = x.norm_fro();
        res.push((&x * &x).trace().norm(), norm * norm);
    }
    let square = TraceReport::from_residuals("tr(X^2) = 0", res, tol);
    let pairwise = pairwise_trace_zero(basis, samples, seed.wrapping_add(1), tol);
    (square, pairwise)
}

/// `tr(FGH) = tr(FHG)`, i.e. `tr(F [G, H]) = 0`, over basis triples and random
/// triples. Beyond [`MAX_BASIS_TRIPLES`] basis triples a deterministic stride
/// through the triple index space is used.
pub fn cyclic_trace_symmetry(basis: &AlgebraBasis, samples: usize, seed: u64, tol: &Tolerance) -> TraceReport {
    let b = basis.elements();
    let k = b.len();
    let mut res = Residuals::default();
    let total = k * k * k;
    let stride = total.div_ceil(MAX_BASIS_TRIPLES).max(1);
    let mut idx = 0;
    while idx < total {
        let (f, g, h) = (&b[idx / (k * k)], &b[(idx / k) % k], &b[idx % k]);
        push_cyclic(&mut res, f, g, h);
        idx += stride;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let f = random_element_with(basis, &mut rng);
        let g = random_element_with(basis, &mut rng);
        let h = random_element_with(basis, &mut rng);
        push_cyclic(&mut res, &f, &g, &h);
    }
    TraceReport::from_residuals("tr(FGH) = tr(FHG)", res, tol)
}

fn push_cyclic(res: &mut Residuals, f: &Matrix, g: &Matrix, h: &Matrix) {
    let gh = g * h;
    let hg = h * g;
    let r = (f * &(&gh - &hg)).trace().norm();
    res.push(r, 2.0 * f.norm_fro() * g.norm_fro() * h.norm_fro());
}

/// Evaluates `sum_k lambda^k C_k`.
pub fn eval_path(coefficients: &[Matrix], lambda: crate::numat::C64) -> Matrix {
    let n = coefficients[0].dim();
    coefficients
        .iter()
        .rev()
        .fold(Matrix::zeros(n), |acc, c| &acc.scale(lambda) + c)
}

/// Constancy of `tr f(lambda)` along a polynomial path
/// `f(lambda) = sum_k lambda^k C_k` whose rank stays at most `rank_bound` and
/// whose spectrum equals that of `f(0)` at every probe.
///
/// A hypothesis failing at some probe yields
/// [`TraceVerdict::PreconditionFailed`] rather than a failed identity.
pub fn bounded_rank_constant_trace_check(
    coefficients: &[Matrix],
    rank_bound: usize,
    probes: &ProbeSet,
    tol: &Tolerance,
) -> Result<TraceReport> {
    if coefficients.is_empty() {
        return Err(Error::EmptyFamily);
    }
    common_dim(coefficients)?;
    let identity = "tr f(lambda) = tr f(0)";
    let f0 = eval_path(coefficients, crate::numat::C64::new(0.0, 0.0));
    let base_trace = f0.trace();
    let base_spectrum = PointSet::of(&f0, tol)?;
    let mut res = Residuals::default();
    let mut precondition = None;
    for &lambda in probes.lambdas() {
        let f = eval_path(coefficients, lambda);
        let r = rank(&f, tol)?;
        if r > rank_bound {
            precondition = Some(format!("rank {r} exceeds {rank_bound} at lambda = {lambda}"));
            break;
        }
        if !PointSet::of(&f, tol)?.multiset_matches(&base_spectrum) {
            precondition = Some(format!("spectrum changes at lambda = {lambda}"));
            break;
        }
        res.push((f.trace() - base_trace).norm(), f.norm_fro().max(f0.norm_fro()));
    }
    let mut report = TraceReport::from_residuals(identity, res, tol);
    if precondition.is_some() {
        report.verdict = TraceVerdict::PreconditionFailed;
        report.precondition = precondition;
    }
    Ok(report)
}
