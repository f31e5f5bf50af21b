use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::generators::{generate_trial, generate_with, kleinecke_shirokov_instance, CampaignConfig, GeneratorKind};
use super::io::{MatrixSet, MatrixSetFile, Metadata};
use crate::closure::{close, jordan_product, random_element_with, AlgebraKind};
use crate::error::{Error, Result};
use crate::numat::{is_nilpotent, spectrum, Matrix, Tolerance, C64};
use crate::reduce::{
    kleinecke_shirokov_check, motzkin_taussky_check, triangularize, verdict_engine, CertificateStatus,
};
use crate::speccond::{
    perturbed_inverse_spectrum_check, resolvent_nilpotency_check, resolvent_probes, t_stable_exact, t_stable_sampled,
    ProbeSet, Verdict,
};
use crate::tracecond::{bounded_rank_constant_trace_check, power_trace_vanishing, square_trace_zero, TraceVerdict};

const TRACE_SAMPLES: usize = 16;
const IDENTITY_TRIPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    LemmasS3,
    Traces,
    LieTheorems,
    JordanTheorems,
    All,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::LemmasS3,
        Suite::Traces,
        Suite::LieTheorems,
        Suite::JordanTheorems,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LemmasS3 => "lemmas-s3",
            Suite::Traces => "traces",
            Suite::LieTheorems => "lie-theorems",
            Suite::JordanTheorems => "jordan-theorems",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    /// An invariant was violated.
    Fail,
    /// Search incompleteness or a numerically undecided question.
    Warn,
    /// The hypothesis of the invariant was not met.
    Skip,
    /// A condition was evaluated and recorded; nothing is asserted.
    Info,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Observed residual divided by the threshold it was held to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

impl CheckOutcome {
    fn new(name: &str, status: CheckStatus) -> Self {
        Self {
            name: name.to_owned(),
            status,
            detail: None,
            ratio: None,
        }
    }

    fn pass_if(name: &str, ok: bool) -> Self {
        Self::new(name, if ok { CheckStatus::Pass } else { CheckStatus::Fail })
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    fn ratio(mut self, r: f64) -> Self {
        self.ratio = Some(r);
        self
    }

    fn warn(name: &str, e: &Error) -> Self {
        Self::new(name, CheckStatus::Warn).detail(e.to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialReport {
    pub index: usize,
    pub seed: u64,
    pub dim: usize,
    pub checks: Vec<CheckOutcome>,
    /// The family, saved when a check failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<MatrixSetFile>,
}

impl TrialReport {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == CheckStatus::Fail)
    }
}

/// Counts of `log10(residual / threshold)` in unit bins from `lower` upward;
/// the first and last bins are open-ended.
#[derive(Clone, Debug, Serialize)]
pub struct Histogram {
    pub check: String,
    pub lower: i32,
    pub counts: Vec<usize>,
}

const HIST_LOWER: i32 = -12;
const HIST_BINS: usize = 14;

impl Histogram {
    fn new(check: &str) -> Self {
        Self {
            check: check.to_owned(),
            lower: HIST_LOWER,
            counts: vec![0; HIST_BINS],
        }
    }

    fn add(&mut self, ratio: f64) {
        let b = if ratio <= 0.0 {
            0
        } else {
            let e = ratio.log10().floor() as i64 - HIST_LOWER as i64;
            e.clamp(0, HIST_BINS as i64 - 1) as usize
        };
        self.counts[b] += 1;
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub failed_trials: usize,
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub warnings: usize,
    pub skipped: usize,
    pub info: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportHeader {
    pub tool: &'static str,
    pub version: &'static str,
    pub generated_at: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CampaignReport {
    pub header: ReportHeader,
    pub suite: Suite,
    pub config: CampaignConfig,
    pub summary: Summary,
    pub histograms: Vec<Histogram>,
    pub trials: Vec<TrialReport>,
}

impl CampaignReport {
    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Runs every trial of `config` through the checks of `suite`.
pub fn run_campaign(config: &CampaignConfig, suite: Suite) -> Result<CampaignReport> {
    config.validate()?;
    let trials: Vec<TrialReport> = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, suite, i))
        .collect();

    let mut summary = Summary {
        trials: trials.len(),
        ..Summary::default()
    };
    let mut histograms: Vec<Histogram> = Vec::new();
    for t in &trials {
        if t.failed() {
            summary.failed_trials += 1;
        }
        for c in &t.checks {
            summary.checks += 1;
            match c.status {
                CheckStatus::Pass => summary.passed += 1,
                CheckStatus::Fail => summary.failed += 1,
                CheckStatus::Warn => summary.warnings += 1,
                CheckStatus::Skip => summary.skipped += 1,
                CheckStatus::Info => summary.info += 1,
            }
            if let Some(r) = c.ratio {
                let pos = match histograms.iter().position(|h| h.check == c.name) {
                    Some(p) => p,
                    None => {
                        histograms.push(Histogram::new(&c.name));
                        histograms.len() - 1
                    }
                };
                histograms[pos].add(r);
            }
        }
    }
    histograms.sort_by(|a, b| a.check.cmp(&b.check));

    Ok(CampaignReport {
        header: ReportHeader {
            tool: "speclab",
            version: env!("CARGO_PKG_VERSION"),
            generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        },
        suite,
        config: config.clone(),
        summary,
        histograms,
        trials,
    })
}

fn run_trial(config: &CampaignConfig, suite: Suite, index: usize) -> TrialReport {
    let seed = config.trial_seed(index);
    let family = generate_trial(config, index);
    let dim = family[0].dim();
    let tol = &config.tolerance;
    let probes = match &config.probes {
        Some(p) => ProbeSet::new(p.clone()).unwrap_or_else(|_| ProbeSet::standard(seed)),
        None => ProbeSet::standard(seed),
    };
    let mut checks = Vec::new();
    let want = |s: Suite| suite == s || suite == Suite::All;
    if want(Suite::LemmasS3) {
        lemma_checks(&family, config.generator, &probes, tol, &mut checks);
    }
    if want(Suite::Traces) {
        trace_checks(&family, tol, seed, &mut checks);
    }
    if want(Suite::LieTheorems) {
        theorem_checks(&family, AlgebraKind::Lie, config.generator, tol, seed, &mut checks);
    }
    if want(Suite::JordanTheorems) {
        theorem_checks(&family, AlgebraKind::Jordan, config.generator, tol, seed, &mut checks);
        classical_checks(dim, tol, seed, &mut checks);
    }
    let mut report = TrialReport {
        index,
        seed,
        dim,
        checks,
        counterexample: None,
    };
    if report.failed() {
        let labels = report
            .checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| c.name.clone())
            .collect();
        let set = MatrixSet::from_matrices(family)
            .expect("generated families share a dimension")
            .with_metadata(Metadata {
                labels,
                kind: None,
                description: Some(format!("{} trial {index}, seed {seed}", suite.name())),
            });
        report.counterexample = Some(set.to_file());
    }
    report
}

/// The stable-spectrum lemmas on `(A, T)`, the first two family members.
fn lemma_checks(
    family: &[Matrix],
    generator: GeneratorKind,
    probes: &ProbeSet,
    tol: &Tolerance,
    out: &mut Vec<CheckOutcome>,
) {
    let a = &family[0];
    let t = family.get(1).cloned().unwrap_or_else(|| Matrix::zeros(a.dim()));
    let n = a.dim();

    let exact = match t_stable_exact(a, &t, tol) {
        Ok(r) => r,
        Err(e) => {
            out.push(CheckOutcome::warn("t-stable-exact", &e));
            return;
        }
    };
    let stable = exact.verdict == Verdict::Holds;
    out.push(CheckOutcome::new("t-stable-exact", CheckStatus::Info).detail(exact.verdict.to_string()));
    if generator == GeneratorKind::StablePair {
        out.push(CheckOutcome::pass_if("construction-stable", stable));
    }

    let sampled = t_stable_sampled(a, &t, probes, tol);
    let resolvent = resolvent_nilpotency_check(a, &t, &resolvent_probes(a), tol);
    match (&sampled, &resolvent) {
        (Ok(s), Ok(r)) => {
            let agree = s.passed() == stable && r.passed() == stable;
            out.push(CheckOutcome::pass_if("checker-agreement", agree).detail(format!(
                "exact {}, sampled {}, resolvent {}",
                exact.verdict, s.verdict, r.verdict
            )));
        }
        (Err(e), _) | (_, Err(e)) => out.push(CheckOutcome::warn("checker-agreement", e)),
    }

    let lemmas = [
        "stable-implies-nilpotent",
        "resolvent-nilpotency",
        "power-trace",
        "perturbed-inverse",
        "stable-scaling",
        "constant-trace",
    ];
    if !stable {
        for name in lemmas {
            out.push(CheckOutcome::new(name, CheckStatus::Skip));
        }
        return;
    }

    out.push(match is_nilpotent(&t, tol) {
        Ok(ok) => CheckOutcome::pass_if("stable-implies-nilpotent", ok),
        Err(e) => CheckOutcome::warn("stable-implies-nilpotent", &e),
    });
    out.push(match &resolvent {
        Ok(r) => CheckOutcome::pass_if("resolvent-nilpotency", r.passed()),
        Err(e) => CheckOutcome::warn("resolvent-nilpotency", e),
    });
    out.push(match power_trace_vanishing(a, &t, tol) {
        Ok(r) => {
            let na = a.norm_fro();
            let bound = 1e-8 * na * t.norm_fro() * na.max(1.0).powi(n as i32);
            let ratio = if bound > 0.0 { r.max_residual / bound } else { 0.0 };
            CheckOutcome::pass_if("power-trace", r.max_residual <= bound || r.max_residual == 0.0)
                .ratio(ratio)
                .detail(format!("max residual {:e}", r.max_residual))
        }
        Err(e) => CheckOutcome::warn("power-trace", &e),
    });
    let s = 1.0 / t.norm_fro().max(1.0);
    let nus = [C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(0.0, s)];
    out.push(match perturbed_inverse_spectrum_check(a, &t, &nus, tol) {
        Ok(r) => CheckOutcome::pass_if("perturbed-inverse", r.passed()),
        Err(e) => CheckOutcome::warn("perturbed-inverse", &e),
    });
    out.push(match t_stable_exact(a, &t.scale(C64::new(0.7, -1.3)), tol) {
        Ok(r) => CheckOutcome::pass_if("stable-scaling", r.verdict == Verdict::Holds),
        Err(e) => CheckOutcome::warn("stable-scaling", &e),
    });
    out.push(
        match bounded_rank_constant_trace_check(&[a.clone(), t.clone()], n, probes, tol) {
            Ok(r) => match r.verdict {
                TraceVerdict::Pass => CheckOutcome::new("constant-trace", CheckStatus::Pass),
                TraceVerdict::Fail => CheckOutcome::new("constant-trace", CheckStatus::Fail),
                TraceVerdict::PreconditionFailed => {
                    CheckOutcome::new("constant-trace", CheckStatus::Warn).detail(r.precondition.unwrap_or_default())
                }
            }
            .ratio(if r.threshold > 0.0 {
                r.max_residual / r.threshold
            } else {
                0.0
            }),
            Err(e) => CheckOutcome::warn("constant-trace", &e),
        },
    );
}

/// Trace identities that hold for every family, plus the implications
/// between trace conditions.
fn trace_checks(family: &[Matrix], tol: &Tolerance, seed: u64, out: &mut Vec<CheckOutcome>) {
    for kind in [AlgebraKind::Lie, AlgebraKind::Jordan] {
        let basis = match close(family, kind, tol) {
            Ok(b) => b,
            Err(e) => {
                out.push(CheckOutcome::warn(&format!("{kind}-closure"), &e));
                continue;
            }
        };
        let (square, pairwise) = square_trace_zero(&basis, TRACE_SAMPLES, seed, tol);
        out.push(
            CheckOutcome::pass_if(&format!("{kind}-polarization"), !square.passed() || pairwise.passed())
                .detail(format!("square {:?}, pairwise {:?}", square.verdict, pairwise.verdict)),
        );

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut cyclic = 0.0f64;
        let mut jordan = 0.0f64;
        for _ in 0..IDENTITY_TRIPLES {
            let x = random_element_with(&basis, &mut rng);
            let y = random_element_with(&basis, &mut rng);
            let z = random_element_with(&basis, &mut rng);
            let scale = tol.effective(4.0 * x.norm_fro() * y.norm_fro() * z.norm_fro());
            let xyz = (&(&x * &y) * &z).trace();
            let zxy = (&(&z * &x) * &y).trace();
            cyclic = cyclic.max((xyz - zxy).norm() / scale);
            let (Ok(xy), Ok(yz)) = (jordan_product(&x, &y), jordan_product(&y, &z)) else {
                continue;
            };
            let lhs = (&xy * &z).trace();
            let rhs = (&x * &yz).trace();
            jordan = jordan.max((lhs - rhs).norm() / scale);
        }
        out.push(CheckOutcome::pass_if(&format!("{kind}-cyclic-trace-sanity"), cyclic <= 1.0).ratio(cyclic));
        out.push(CheckOutcome::pass_if(&format!("{kind}-jordan-trace-identity"), jordan <= 1.0).ratio(jordan));
    }
    if family.len() >= 2 {
        out.push(match power_trace_vanishing(&family[0], &family[1], tol) {
            Ok(r) if r.precondition.is_some() => CheckOutcome::new("power-trace", CheckStatus::Skip),
            Ok(r) => CheckOutcome::pass_if("power-trace", r.passed()).ratio(if r.threshold > 0.0 {
                r.max_residual / r.threshold
            } else {
                0.0
            }),
            Err(e) => CheckOutcome::warn("power-trace", &e),
        });
    }
}

fn theorem_checks(
    family: &[Matrix],
    kind: AlgebraKind,
    generator: GeneratorKind,
    tol: &Tolerance,
    seed: u64,
    out: &mut Vec<CheckOutcome>,
) {
    let name = |s: &str| format!("{kind}-{s}");
    match verdict_engine(family, kind, tol, seed) {
        Ok(v) => {
            let detail = format!(
                "{:?} by {}, certificate {:?}",
                v.prediction,
                v.theorem.unwrap_or("none"),
                v.certificate_status
            );
            let status = if v.hard_inconsistency {
                CheckStatus::Fail
            } else if !v.consistent {
                CheckStatus::Warn
            } else {
                CheckStatus::Pass
            };
            out.push(CheckOutcome::new(&name("verdict"), status).detail(detail));
            let nilpotent_id = if kind == AlgebraKind::Lie {
                "lie-engel"
            } else {
                "jordan-quasinilpotent"
            };
            let nilpotent = v.theorems.iter().any(|t| t.theorem == nilpotent_id && t.applies);
            if nilpotent {
                out.push(CheckOutcome::pass_if(
                    &name("nilpotent-triangularizes"),
                    v.certificate_status == CertificateStatus::Found,
                ));
            }
        }
        Err(e) => out.push(CheckOutcome::warn(&name("verdict"), &e)),
    }
    if generator.triangularizable() && kind == AlgebraKind::Lie {
        out.push(triangularize_check(family, tol, seed));
    }
}

/// Success, residual and diagonal-versus-spectrum agreement for a
/// triangularizable family.
fn triangularize_check(family: &[Matrix], tol: &Tolerance, seed: u64) -> CheckOutcome {
    let name = "construction-triangularizes";
    let chain = match triangularize(family, tol, seed) {
        Ok(out) => match out.chain() {
            Some(c) => c.clone(),
            None => return CheckOutcome::new(name, CheckStatus::Fail).detail(format!("{out:?}")),
        },
        Err(e) => return CheckOutcome::warn(name, &e),
    };
    if chain.orthonormality_error() > 1e-8 {
        return CheckOutcome::new(name, CheckStatus::Fail).detail("basis change is not unitary");
    }
    let mut worst = 0.0f64;
    for m in family {
        worst = worst.max(chain.relative_residual(m));
        let diag = chain.conjugate(m).diagonal();
        let Ok(sigma) = spectrum(m, tol) else {
            return CheckOutcome::new(name, CheckStatus::Warn).detail("spectrum failed");
        };
        let d = crate::numat::Spectrum::from_values(diag);
        if !d.multiset_eq(&sigma, 1e-7 * m.norm_fro().max(1.0)) {
            return CheckOutcome::new(name, CheckStatus::Fail).detail("diagonal differs from spectrum");
        }
    }
    CheckOutcome::pass_if(name, worst <= 1e-7).ratio(worst / 1e-7)
}

/// Kleinecke-Shirokov and Motzkin-Taussky on instances built to satisfy
/// their hypotheses.
fn classical_checks(n: usize, tol: &Tolerance, seed: u64, out: &mut Vec<CheckOutcome>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc1a5);
    let (a, b) = kleinecke_shirokov_instance(n, &mut rng);
    out.push(match kleinecke_shirokov_check(&a, &b, tol) {
        Ok(ok) => CheckOutcome::pass_if("kleinecke-shirokov", ok),
        Err(e) => CheckOutcome::new("kleinecke-shirokov", CheckStatus::Fail).detail(e.to_string()),
    });
    let count = rng.random_range(2..=3);
    let fam = generate_with(GeneratorKind::DiagonalizableSpan, n, count, &mut rng);
    out.push(match close(&fam, AlgebraKind::LinearSpan, tol) {
        Ok(basis) => match motzkin_taussky_check(&basis, tol, seed) {
            Ok(ok) => CheckOutcome::pass_if("motzkin-taussky", ok),
            Err(e) => CheckOutcome::new("motzkin-taussky", CheckStatus::Fail).detail(e.to_string()),
        },
        Err(e) => CheckOutcome::warn("motzkin-taussky", &e),
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strip_header(s: &str) -> String {
        s.lines()
            .filter(|l| !l.contains("generated_at"))
            .collect::<Vec<_>>()
            .join("\n")
    }

    #[test]
    fn deterministic_reports() {
        let cfg = CampaignConfig::new(7, 4, [2, 4], GeneratorKind::StablePair);
        let a = run_campaign(&cfg, Suite::All).unwrap();
        let b = run_campaign(&cfg, Suite::All).unwrap();
        assert_eq!(strip_header(&a.to_json()), strip_header(&b.to_json()));
    }

    #[test]
    fn small_campaigns_pass() {
        for g in GeneratorKind::ALL {
            let cfg = CampaignConfig::new(11, 3, [2, 4], g);
            let r = run_campaign(&cfg, Suite::All).unwrap();
            assert!(r.passed(), "{g}: {}", r.to_json());
        }
    }
}
