use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::search::{find_invariant_subspace, triangularize, NotFoundReason, SearchOutcome, TriangularizeOutcome};
use super::{FailureKind, Subspace, SubspaceChain, TriangularizeFailure};
use crate::closure::{close, random_element_with, AlgebraBasis, AlgebraKind};
use crate::error::{Error, Result};
use crate::numat::{common_dim, is_nilpotent, singular_values, Matrix, Tolerance, C64};
use crate::speccond::{self, subadditive, sublinear, submultiplicative, t_stable_exact, ConditionReport, ProbeSet};

const SAMPLES: usize = 64;
const MAX_BASIS_PAIRS: usize = 48;
const MAX_STABLE_CANDIDATES: usize = 3;
const MAX_STABLE_OPERANDS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prediction {
    Reducible,
    Triangularizable,
    NoPrediction,
}

/// One theorem and whether its hypothesis was met. `exact` is false when the
/// hypothesis was only checked on sampled elements or pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub theorem: &'static str,
    pub statement: &'static str,
    pub prediction: Prediction,
    pub applies: bool,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    Found,
    IrreducibleCertified,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "type", content = "value", rename_all = "kebab-case")]
pub enum Certificate {
    Subspace(Subspace),
    Chain(SubspaceChain),
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub kind: AlgebraKind,
    pub dim: usize,
    pub closure_dim: usize,
    pub prediction: Prediction,
    pub theorem: Option<&'static str>,
    /// The fired theorem's hypothesis was only verified on samples.
    pub probe_conditional: bool,
    pub theorems: Vec<TheoremCheck>,
    pub evidence: Vec<ConditionReport>,
    pub certificate_status: CertificateStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<TriangularizeFailure>,
    /// The certificate confirms the prediction (vacuously true without one).
    pub consistent: bool,
    /// A prediction was made for a family certified irreducible.
    pub hard_inconsistency: bool,
    pub notes: Vec<String>,
}

/// Closes `generators` under the product of `kind`, tests the hypotheses of
/// the reducibility and triangularizability theorems on the closure, fires the
/// strongest one that applies and tries to certify its conclusion.
pub fn verdict_engine(generators: &[Matrix], kind: AlgebraKind, tol: &Tolerance, seed: u64) -> Result<Verdict> {
    let n = common_dim(generators)?;
    if !matches!(kind, AlgebraKind::Lie | AlgebraKind::Jordan) {
        return Err(Error::InvalidConfig(format!(
            "verdict engine needs a lie or jordan algebra, not {kind}"
        )));
    }
    let mut notes = Vec::new();
    let mut evidence = Vec::new();
    let mut theorems = Vec::new();

    let closure = match close(generators, kind, tol) {
        Ok(c) => Some(c),
        Err(Error::EmptyFamily) => None,
        Err(e) => return Err(e),
    };

    match &closure {
        None => {
            notes.push("every generator is zero".into());
            theorems.push(check(COMMUTING, Prediction::Triangularizable, true, true, None));
        }
        Some(_) if n == 1 => {
            theorems.push(check(DIMENSION_ONE, Prediction::Triangularizable, true, true, None));
        }
        Some(alg) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<Matrix> = (0..SAMPLES).map(|_| random_element_with(alg, &mut rng)).collect();
            let pairs = operand_pairs(alg, &samples);
            evaluate(
                alg,
                kind,
                &samples,
                &pairs,
                tol,
                seed,
                &mut theorems,
                &mut evidence,
                &mut notes,
            );
        }
    }

    let fired = pick(&theorems);
    let (prediction, theorem, probe_conditional) = match fired {
        Some(t) => (t.prediction, Some(t.theorem), !t.exact),
        None => (Prediction::NoPrediction, None, false),
    };

    let mut verdict = Verdict {
        kind,
        dim: n,
        closure_dim: closure.as_ref().map_or(0, AlgebraBasis::len),
        prediction,
        theorem,
        probe_conditional,
        theorems,
        evidence,
        certificate_status: CertificateStatus::Undecided,
        certificate: None,
        failure: None,
        consistent: true,
        hard_inconsistency: false,
        notes,
    };
    certify(&mut verdict, generators, tol, seed)?;
    Ok(verdict)
}

fn certify(v: &mut Verdict, generators: &[Matrix], tol: &Tolerance, seed: u64) -> Result<()> {
    if v.prediction == Prediction::Triangularizable {
        match triangularize(generators, tol, seed)? {
            TriangularizeOutcome::Triangularized(chain) => {
                v.certificate_status = CertificateStatus::Found;
                v.certificate = Some(Certificate::Chain(chain));
            }
            TriangularizeOutcome::Failed(f) => {
                v.consistent = false;
                v.failure = Some(f);
                if f.kind == FailureKind::IrreducibleAtBlock {
                    v.certificate_status = CertificateStatus::IrreducibleCertified;
                    v.hard_inconsistency = true;
                } else {
                    v.certificate_status = CertificateStatus::Undecided;
                }
            }
        }
        return Ok(());
    }
    if v.dim == 1 {
        v.certificate_status = CertificateStatus::IrreducibleCertified;
        return Ok(());
    }
    match find_invariant_subspace(generators, tol, seed)? {
        SearchOutcome::Found(s) => {
            v.certificate_status = CertificateStatus::Found;
            v.certificate = Some(Certificate::Subspace(s));
        }
        SearchOutcome::NotFound(reason) => {
            v.certificate_status = match reason {
                NotFoundReason::IrreducibleCertified => CertificateStatus::IrreducibleCertified,
                NotFoundReason::Undecided => CertificateStatus::Undecided,
            };
            if v.prediction == Prediction::Reducible {
                v.consistent = false;
                v.hard_inconsistency = reason == NotFoundReason::IrreducibleCertified;
            }
        }
    }
    Ok(())
}

/// Triangularizability beats reducibility; within a class an exactly
/// verified hypothesis beats a sampled one, then list order decides.
fn pick(theorems: &[TheoremCheck]) -> Option<&TheoremCheck> {
    for target in [Prediction::Triangularizable, Prediction::Reducible] {
        let mut applicable = theorems.iter().filter(|t| t.applies && t.prediction == target);
        let first = applicable.clone().next();
        if let Some(t) = applicable.find(|t| t.exact) {
            return Some(t);
        }
        if first.is_some() {
            return first;
        }
    }
    None
}

struct Named {
    id: &'static str,
    statement: &'static str,
}

const DIMENSION_ONE: Named = Named {
    id: "dimension-one",
    statement: "every family of 1x1 matrices is triangular",
};
const COMMUTING: Named = Named {
    id: "commuting",
    statement: "a commuting family is triangularizable",
};
const LIE_SUBADDITIVE: Named = Named {
    id: "lie-subadditive",
    statement: "a Lie algebra with subadditive spectrum is triangularizable",
};
const JORDAN_SUBADDITIVE: Named = Named {
    id: "jordan-subadditive",
    statement: "a Jordan algebra with subadditive spectrum is triangularizable",
};
const LIE_ENGEL: Named = Named {
    id: "lie-engel",
    statement: "a Lie algebra of nilpotent matrices is Engel, hence triangularizable",
};
const JORDAN_QUASINILPOTENT: Named = Named {
    id: "jordan-quasinilpotent",
    statement: "a Jordan algebra of quasinilpotent matrices is triangularizable",
};
const LIE_ZERO_TRACE: Named = Named {
    id: "lie-zero-trace",
    statement: "a Lie algebra with nonzero A such that tr(AF) = 0 for all F is reducible",
};
const JORDAN_ZERO_TRACE: Named = Named {
    id: "jordan-zero-trace",
    statement: "a Jordan algebra with nonzero A such that tr(AF) = 0 for all F is reducible",
};
const LIE_SQUARE_TRACE: Named = Named {
    id: "lie-square-trace",
    statement: "a Lie algebra with tr(F^2) = 0 for all F is reducible",
};
const JORDAN_SQUARE_TRACE: Named = Named {
    id: "jordan-square-trace",
    statement: "a Jordan algebra with tr(F^2) = 0 for all F is reducible",
};
const LIE_CYCLIC_TRACE: Named = Named {
    id: "lie-cyclic-trace",
    statement: "a Lie algebra with tr(FGH) = tr(FHG) for all F, G, H is reducible",
};
const LIE_SUBMULTIPLICATIVE: Named = Named {
    id: "lie-submultiplicative",
    statement: "a Lie algebra with submultiplicative spectrum is reducible",
};
const JORDAN_SUBMULTIPLICATIVE: Named = Named {
    id: "jordan-submultiplicative",
    statement: "a Jordan algebra with submultiplicative spectrum is reducible",
};
const LIE_T_STABLE: Named = Named {
    id: "lie-t-stable",
    statement: "a Lie algebra with T-stable spectrum for a nonzero T in it is reducible",
};
const JORDAN_T_STABLE: Named = Named {
    id: "jordan-t-stable",
    statement: "a Jordan algebra with T-stable spectrum for a nonzero T in it is reducible",
};

fn check(named: Named, prediction: Prediction, applies: bool, exact: bool, note: Option<String>) -> TheoremCheck {
    TheoremCheck {
        theorem: named.id,
        statement: named.statement,
        prediction,
        applies,
        exact,
        note,
    }
}

/// Basis pairs `i < j` (strided down to a cap) followed by consecutive
/// sample pairs.
fn operand_pairs<'a>(alg: &'a AlgebraBasis, samples: &'a [Matrix]) -> Vec<(&'a Matrix, &'a Matrix)> {
    let els = alg.elements();
    let mut all = Vec::new();
    for i in 0..els.len() {
        for j in i + 1..els.len() {
            all.push((&els[i], &els[j]));
        }
    }
    let stride = all.len().div_ceil(MAX_BASIS_PAIRS).max(1);
    let mut pairs: Vec<_> = all.into_iter().step_by(stride).collect();
    pairs.extend(samples.chunks_exact(2).map(|c| (&c[0], &c[1])));
    pairs
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    alg: &AlgebraBasis,
    kind: AlgebraKind,
    samples: &[Matrix],
    pairs: &[(&Matrix, &Matrix)],
    tol: &Tolerance,
    seed: u64,
    theorems: &mut Vec<TheoremCheck>,
    evidence: &mut Vec<ConditionReport>,
    notes: &mut Vec<String>,
) {
    let lie = kind == AlgebraKind::Lie;
    let els = alg.elements();

    // sublinearity of the generators, recorded but never fired
    let probes = ProbeSet::standard(seed);
    let gens = alg.generators();
    'gen: for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            match sublinear(&gens[i], &gens[j], &probes, tol) {
                Ok(r) => {
                    let failed = !r.passed();
                    evidence.push(r.with_pair(format!("generator {i}"), format!("generator {j}")));
                    if failed {
                        break 'gen;
                    }
                }
                Err(e) => notes.push(format!("sublinear on generators {i}, {j}: {e}")),
            }
        }
    }

    let sub = pair_condition(pairs, tol, subadditive, "subadditive", evidence, notes);
    theorems.push(check(
        if lie { LIE_SUBADDITIVE } else { JORDAN_SUBADDITIVE },
        Prediction::Triangularizable,
        sub,
        false,
        None,
    ));

    let (nilpotent, nil_note) = all_nilpotent(els.iter().chain(samples), tol);
    theorems.push(check(
        if lie { LIE_ENGEL } else { JORDAN_QUASINILPOTENT },
        Prediction::Triangularizable,
        nilpotent,
        false,
        nil_note,
    ));

    let commuting = basis_commutes(els, tol);
    theorems.push(check(COMMUTING, Prediction::Triangularizable, commuting, true, None));

    let gram = gram_matrix(els);
    let gram_scale = gram.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let gram_threshold = tol.effective(gram_scale) * els.len() as f64;
    let degenerate = match singular_values(&gram) {
        Ok(s) => s.iter().any(|&x| x <= gram_threshold),
        Err(e) => {
            notes.push(format!("trace form: {e}"));
            false
        }
    };
    theorems.push(check(
        if lie { LIE_ZERO_TRACE } else { JORDAN_ZERO_TRACE },
        Prediction::Reducible,
        degenerate,
        true,
        None,
    ));

    let square_zero = gram.iter().all(|z| z.norm() <= gram_threshold);
    theorems.push(check(
        if lie { LIE_SQUARE_TRACE } else { JORDAN_SQUARE_TRACE },
        Prediction::Reducible,
        square_zero,
        true,
        None,
    ));

    if lie {
        let cyclic = cyclic_trace_holds(els, tol);
        theorems.push(check(LIE_CYCLIC_TRACE, Prediction::Reducible, cyclic, true, None));
    }

    let mult = pair_condition(pairs, tol, submultiplicative, "submultiplicative", evidence, notes);
    theorems.push(check(
        if lie {
            LIE_SUBMULTIPLICATIVE
        } else {
            JORDAN_SUBMULTIPLICATIVE
        },
        Prediction::Reducible,
        mult,
        false,
        None,
    ));

    let (stable, stable_note) = t_stable_route(alg, samples, tol, evidence, notes);
    theorems.push(check(
        if lie { LIE_T_STABLE } else { JORDAN_T_STABLE },
        Prediction::Reducible,
        stable,
        false,
        stable_note,
    ));
}

/// Runs `f` on every pair until the first failure; records the failing
/// report, or the last passing one.
fn pair_condition(
    pairs: &[(&Matrix, &Matrix)],
    tol: &Tolerance,
    f: fn(&Matrix, &Matrix, &Tolerance) -> Result<ConditionReport>,
    what: &str,
    evidence: &mut Vec<ConditionReport>,
    notes: &mut Vec<String>,
) -> bool {
    let mut last = None;
    for (k, (a, b)) in pairs.iter().enumerate() {
        match f(a, b, tol) {
            Ok(r) if r.passed() => {
                last = Some(r.with_pair(format!("operand {}", 2 * k), format!("operand {}", 2 * k + 1)))
            }
            Ok(r) => {
                evidence.push(r.with_pair(format!("operand {}", 2 * k), format!("operand {}", 2 * k + 1)));
                return false;
            }
            Err(e) => {
                notes.push(format!("{what} on pair {k}: {e}"));
                return false;
            }
        }
    }
    if let Some(r) = last {
        evidence.push(r);
    }
    !pairs.is_empty()
}

fn all_nilpotent<'a>(ms: impl Iterator<Item = &'a Matrix>, tol: &Tolerance) -> (bool, Option<String>) {
    for m in ms {
        match is_nilpotent(m, tol) {
            Ok(true) => {}
            Ok(false) => return (false, None),
            Err(e) => return (false, Some(e.to_string())),
        }
    }
    (true, None)
}

fn basis_commutes(els: &[Matrix], tol: &Tolerance) -> bool {
    for (i, a) in els.iter().enumerate() {
        for b in &els[i + 1..] {
            let c = &(a * b) - &(b * a);
            if c.norm_fro() > tol.effective(2.0 * a.norm_fro() * b.norm_fro()) {
                return false;
            }
        }
    }
    true
}

/// `G_ij = tr(B_i B_j)`.
fn gram_matrix(els: &[Matrix]) -> DMatrix<C64> {
    let k = els.len();
    let t: Vec<_> = els.iter().map(|m| m.inner().transpose()).collect();
    DMatrix::from_fn(k, k, |i, j| {
        els[i].inner().iter().zip(t[j].iter()).map(|(x, y)| x * y).sum()
    })
}

/// `tr(F [G, H]) = 0` for all basis triples, via `tr(X Y) = <vec(X^T), vec(Y)>`.
fn cyclic_trace_holds(els: &[Matrix], tol: &Tolerance) -> bool {
    let transposed: Vec<DMatrix<C64>> = els.iter().map(|m| m.inner().transpose()).collect();
    for (i, g) in els.iter().enumerate() {
        for h in &els[i + 1..] {
            let c = &(g * h) - &(h * g);
            let bound = tol.effective(2.0 * g.norm_fro() * h.norm_fro());
            for (f, ft) in els.iter().zip(&transposed) {
                let v: C64 = ft.iter().zip(c.inner().iter()).map(|(x, y)| x * y).sum();
                if v.norm() > bound * f.norm_fro().max(1.0) {
                    return false;
                }
            }
        }
    }
    true
}

/// Some nonzero nilpotent `T` in the algebra with `sigma(A + lambda T) =
/// sigma(A)` for basis and sampled `A`.
fn t_stable_route(
    alg: &AlgebraBasis,
    samples: &[Matrix],
    tol: &Tolerance,
    evidence: &mut Vec<ConditionReport>,
    notes: &mut Vec<String>,
) -> (bool, Option<String>) {
    let candidates: Vec<&Matrix> = alg
        .generators()
        .iter()
        .chain(alg.elements())
        .filter(|m| m.norm_fro() > tol.effective(1.0) && matches!(is_nilpotent(m, tol), Ok(true)))
        .take(MAX_STABLE_CANDIDATES)
        .collect();
    if candidates.is_empty() {
        return (false, Some("no nonzero nilpotent element found".into()));
    }
    let els = alg.elements();
    let stride = els.len().div_ceil(MAX_STABLE_OPERANDS).max(1);
    let operands: Vec<&Matrix> = els
        .iter()
        .step_by(stride)
        .chain(samples.iter().take(MAX_STABLE_OPERANDS / 2))
        .collect();
    'cand: for (ci, t) in candidates.iter().enumerate() {
        let mut last = None;
        for (ai, a) in operands.iter().enumerate() {
            match t_stable_exact(a, t, tol) {
                Ok(r) if r.verdict == speccond::Verdict::Holds => last = Some(r),
                Ok(_) => continue 'cand,
                Err(e) => {
                    notes.push(format!("t-stable candidate {ci}, operand {ai}: {e}"));
                    continue 'cand;
                }
            }
        }
        if let Some(r) = last {
            evidence.push(r.with_pair("operands", format!("nilpotent candidate {ci}")));
        }
        return (true, Some(format!("nilpotent candidate {ci}")));
    }
    (false, None)
}
