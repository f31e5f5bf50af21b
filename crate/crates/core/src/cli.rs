//! Command-line front end. Exit status: 0 when every verdict passes or is
//! consistent, 1 when a check fails, 2 on usage, input or numerical errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::closure::{close, AlgebraKind};
use crate::error::{Error, Result};
use crate::harness::{
    lambda_map, load_matrix_set, run_campaign, write_lambda_csv, CampaignConfig, GeneratorKind, Grid, MatrixSet, Suite,
};
use crate::numat::{Matrix, Tolerance, C64};
use crate::reduce::{triangularize, verdict_engine, TriangularizeOutcome};
use crate::speccond::{
    perturbed_inverse_spectrum_check, property_l, resolvent_nilpotency_check, resolvent_probes, subadditive, sublinear,
    submultiplicative, t_stable_exact, t_stable_sampled, Condition, ConditionReport, ProbeSet,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "speclab",
    version,
    about = "Spectral conditions and triangularization of matrix families"
)]
pub struct Cli {
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_ATOL)]
    pub atol: f64,
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_RTOL)]
    pub rtol: f64,
    #[arg(long, global = true, env = "SPECLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

fn parse<T: FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one spectral condition on a pair of matrices.
    Check {
        file: PathBuf,
        #[arg(long, value_parser = parse::<Condition>)]
        condition: Condition,
        /// Two matrix names, `X,Y`; defaults to the first two.
        #[arg(long)]
        pair: Option<String>,
    },
    /// Basis of the algebra generated by the matrices.
    Closure {
        file: PathBuf,
        #[arg(long, value_parser = parse::<AlgebraKind>, default_value = "assoc")]
        kind: AlgebraKind,
    },
    /// Simultaneous triangularization.
    Triangularize { file: PathBuf },
    /// Theorem predictions for the Lie or Jordan algebra generated.
    Verdict {
        file: PathBuf,
        #[arg(long, value_parser = parse::<AlgebraKind>)]
        kind: AlgebraKind,
    },
    /// Seeded property campaign.
    Campaign {
        #[arg(long, value_parser = parse::<Suite>, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Defaults to stable-pair for lemmas-s3, traces and all, and to
        /// conjugated-triangular for the theorem suites.
        #[arg(long, value_parser = parse::<GeneratorKind>)]
        generator: Option<GeneratorKind>,
        #[arg(long, default_value_t = 2)]
        dim_min: usize,
        #[arg(long, default_value_t = 6)]
        dim_max: usize,
    },
    /// CSV of the spectral radius of `A + lambda T` over a grid.
    LambdaMap {
        file: PathBuf,
        #[arg(long)]
        pair: Option<String>,
        /// `re_min,re_max,im_min,im_max`
        #[arg(long, default_value = "-2,2,-2,2", allow_hyphen_values = true)]
        grid: String,
        /// `N` or `NXxNY`
        #[arg(long, default_value = "41")]
        resolution: String,
    },
}

/// Entry point used by the binary.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("speclab: {e}");
            EXIT_USAGE
        }
    }
}

struct Output {
    json: serde_json::Value,
    text: String,
    passed: bool,
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("results serialize")
}

fn execute(cli: &Cli) -> Result<i32> {
    let tol = Tolerance::new(cli.atol, cli.rtol)?;
    let output = match &cli.command {
        Command::Check { file, condition, pair } => {
            let set = load_matrix_set(file)?;
            let (na, nb) = pair_names(&set, pair.as_deref())?;
            let report = run_condition(*condition, set.get(&na)?, set.get(&nb)?, &tol, cli.seed)?.with_pair(&na, &nb);
            let text = condition_text(&report);
            Output {
                passed: report.passed(),
                json: to_value(&report),
                text,
            }
        }
        Command::Closure { file, kind } => {
            let set = load_matrix_set(file)?;
            let basis = close(&set.matrices, *kind, &tol)?;
            let pairs: Vec<_> = basis.elements().iter().map(Matrix::to_pairs).collect();
            Output {
                json: json!({
                    "kind": kind,
                    "ambient_dim": basis.dim_ambient(),
                    "dim": basis.len(),
                    "full": basis.is_full(),
                    "basis": pairs,
                }),
                text: format!(
                    "{kind} closure: dimension {} of {}{}\n",
                    basis.len(),
                    basis.dim_ambient().pow(2),
                    if basis.is_full() { " (full)" } else { "" }
                ),
                passed: true,
            }
        }
        Command::Triangularize { file } => {
            let set = load_matrix_set(file)?;
            triangularize_output(&set, &tol, cli.seed)?
        }
        Command::Verdict { file, kind } => {
            let set = load_matrix_set(file)?;
            let v = verdict_engine(&set.matrices, *kind, &tol, cli.seed)?;
            let mut text = format!(
                "prediction: {:?}{}\ncertificate: {:?}\nconsistent: {}\n",
                v.prediction,
                v.theorem.map(|t| format!(" ({t})")).unwrap_or_default(),
                v.certificate_status,
                v.consistent && !v.hard_inconsistency
            );
            for t in &v.theorems {
                let _ = writeln!(text, "  {:<26} applies={} exact={}", t.theorem, t.applies, t.exact);
            }
            Output {
                passed: v.consistent && !v.hard_inconsistency,
                json: to_value(&v),
                text,
            }
        }
        Command::Campaign {
            suite,
            trials,
            generator,
            dim_min,
            dim_max,
        } => {
            let generator = generator.unwrap_or(match suite {
                Suite::LieTheorems | Suite::JordanTheorems => GeneratorKind::ConjugatedTriangular,
                _ => GeneratorKind::StablePair,
            });
            let mut config = CampaignConfig::new(cli.seed, *trials, [*dim_min, *dim_max], generator);
            config.tolerance = tol;
            let report = run_campaign(&config, *suite)?;
            let s = &report.summary;
            let text = format!(
                "suite {suite}, generator {generator}: {} trials, {} checks, {} passed, {} failed, {} warnings, {} skipped\n",
                s.trials, s.checks, s.passed, s.failed, s.warnings, s.skipped
            );
            Output {
                passed: report.passed(),
                json: to_value(&report),
                text,
            }
        }
        Command::LambdaMap {
            file,
            pair,
            grid,
            resolution,
        } => {
            let set = load_matrix_set(file)?;
            let (na, nb) = pair_names(&set, pair.as_deref())?;
            let grid = parse_grid(grid, resolution)?;
            let rows = lambda_map(set.get(&na)?, set.get(&nb)?, &grid, &tol)?;
            let mut buf = Vec::new();
            write_lambda_csv(&rows, &mut buf)?;
            emit(cli.out.as_ref(), &String::from_utf8(buf).expect("csv is utf-8"))?;
            return Ok(EXIT_OK);
        }
    };
    let body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&output.json).expect("json") + "\n",
        Format::Text => output.text,
    };
    emit(cli.out.as_ref(), &body)?;
    Ok(if output.passed { EXIT_OK } else { EXIT_FAILED })
}

fn emit(out: Option<&PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(p) => crate::harness::io_write(p, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn pair_names(set: &MatrixSet, pair: Option<&str>) -> Result<(String, String)> {
    match pair {
        Some(p) => {
            let parts: Vec<&str> = p.split(',').map(str::trim).collect();
            if parts.len() != 2 || parts.iter().any(|s| s.is_empty()) {
                return Err(Error::InvalidConfig(format!("--pair expects `X,Y`, got `{p}`")));
            }
            Ok((parts[0].to_owned(), parts[1].to_owned()))
        }
        None if set.names.len() >= 2 => Ok((set.names[0].clone(), set.names[1].clone())),
        None => Err(Error::InvalidConfig("the set has one matrix; pass --pair".into())),
    }
}

fn run_condition(cond: Condition, a: &Matrix, b: &Matrix, tol: &Tolerance, seed: u64) -> Result<ConditionReport> {
    let probes = ProbeSet::standard(seed);
    match cond {
        Condition::Subadditive => subadditive(a, b, tol),
        Condition::Sublinear => sublinear(a, b, &probes, tol),
        Condition::Submultiplicative => submultiplicative(a, b, tol),
        Condition::PropertyL => property_l(a, b, &probes, tol),
        Condition::TStable => t_stable_exact(a, b, tol),
        Condition::TStableSampled => t_stable_sampled(a, b, &probes, tol),
        Condition::ResolventNilpotency => resolvent_nilpotency_check(a, b, &resolvent_probes(a), tol),
        Condition::PerturbedInverseSpectrum => {
            let s = 1.0 / b.norm_fro().max(1.0);
            let nus = [C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(0.0, s)];
            perturbed_inverse_spectrum_check(a, b, &nus, tol)
        }
    }
}

fn condition_text(r: &ConditionReport) -> String {
    let mut s = format!("{}: {}", r.condition, r.verdict);
    if let Some([a, b]) = &r.pair {
        let _ = write!(s, " for ({a}, {b})");
    }
    s.push('\n');
    if let Some(w) = &r.witness {
        let _ = writeln!(s, "  witness: {} (distance {:e}): {}", w.eigenvalue, w.distance, w.note);
    }
    s
}

fn triangularize_output(set: &MatrixSet, tol: &Tolerance, seed: u64) -> Result<Output> {
    Ok(match triangularize(&set.matrices, tol, seed)? {
        TriangularizeOutcome::Triangularized(chain) => {
            let residuals: Vec<f64> = set.matrices.iter().map(|m| chain.relative_residual(m)).collect();
            let mut text = "triangularized\n".to_owned();
            for (name, r) in set.names.iter().zip(&residuals) {
                let _ = writeln!(text, "  {name}: relative below-diagonal residual {r:e}");
            }
            Output {
                json: json!({ "status": "triangularized", "chain": chain, "residuals": residuals }),
                text,
                passed: true,
            }
        }
        TriangularizeOutcome::Failed(f) => Output {
            json: json!({ "status": "failed", "failure": f }),
            text: format!(
                "failed: {:?} at offset {} (block dimension {})\n",
                f.kind, f.block_offset, f.block_dim
            ),
            passed: false,
        },
    })
}

fn parse_grid(grid: &str, resolution: &str) -> Result<Grid> {
    let bad = || Error::InvalidConfig(format!("--grid expects re_min,re_max,im_min,im_max, got `{grid}`"));
    let v: Vec<f64> = grid
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    if v.len() != 4 {
        return Err(bad());
    }
    let bad_res = || Error::InvalidConfig(format!("--resolution expects N or NXxNY, got `{resolution}`"));
    let (nx, ny) = match resolution.split_once('x') {
        Some((x, y)) => (x.parse().map_err(|_| bad_res())?, y.parse().map_err(|_| bad_res())?),
        None => {
            let k = resolution.parse().map_err(|_| bad_res())?;
            (k, k)
        }
    };
    let g = Grid {
        re: [v[0], v[1]],
        im: [v[2], v[3]],
        nx,
        ny,
    };
    g.validate()?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid("-2,2,-1,1", "5x3").unwrap();
        assert_eq!((g.nx, g.ny), (5, 3));
        assert_eq!(g.im, [-1.0, 1.0]);
        assert!(parse_grid("1,2,3", "4").is_err());
        assert!(parse_grid("2,1,0,1", "4").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["speclab", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["speclab", "check"]), EXIT_USAGE);
        assert_eq!(run(["speclab", "campaign", "--suite", "nope"]), EXIT_USAGE);
    }
}
