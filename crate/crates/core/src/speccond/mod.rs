//! Decision procedures for spectral conditions on pairs of matrices.
//!
//! Conditions quantified over every complex `lambda` are checked at a finite
//! [`ProbeSet`] and reported as [`Verdict::HoldsAtProbes`]. T-stability is the
//! exception: its characteristic polynomial test is exact.

mod sets;
mod stable;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numat::matching::match_multisets;
use crate::numat::{cluster_radius, spectrum, Matrix, Tolerance, C64};

pub use sets::{property_l, subadditive, sublinear, submultiplicative};
pub use stable::{
    perturbed_inverse_spectrum_check, resolvent_nilpotency_check, resolvent_probes, stable_implies_nilpotent_check,
    t_stable_exact, t_stable_sampled,
};

/// Values of `lambda` substituted into "for every lambda" conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSet {
    lambdas: Vec<C64>,
}

impl ProbeSet {
    pub const GRID_ANGLES: usize = 8;
    pub const GRID_MODULI: [f64; 3] = [0.5, 1.0, 2.0];
    pub const RANDOM_POINTS: usize = 8;

    pub fn new(lambdas: Vec<C64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidProbes("no probe values".into()));
        }
        if !lambdas.iter().any(|z| z.norm() == 0.0) {
            return Err(Error::InvalidProbes("zero is not among the probes".into()));
        }
        if lambdas.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidProbes("non-finite probe".into()));
        }
        Ok(Self { lambdas })
    }

    /// `0`, the 24-point polar grid and 8 points uniform in the disc of
    /// radius 2 drawn from `seed`.
    pub fn standard(seed: u64) -> Self {
        let mut lambdas = vec![C64::new(0.0, 0.0)];
        for &r in &Self::GRID_MODULI {
            for k in 0..Self::GRID_ANGLES {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / Self::GRID_ANGLES as f64;
                lambdas.push(C64::from_polar(r, theta));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..Self::RANDOM_POINTS {
            let r = 2.0 * rng.random::<f64>().sqrt();
            let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            lambdas.push(C64::from_polar(r, theta));
        }
        Self { lambdas }
    }

    pub fn lambdas(&self) -> &[C64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Number of pairwise distinct values.
    pub fn distinct_count(&self) -> usize {
        let mut seen: Vec<C64> = Vec::new();
        for &z in &self.lambdas {
            if !seen.contains(&z) {
                seen.push(z);
            }
        }
        seen.len()
    }
}

impl Default for ProbeSet {
    fn default() -> Self {
        Self::standard(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    Subadditive,
    Sublinear,
    Submultiplicative,
    PropertyL,
    TStable,
    TStableSampled,
    ResolventNilpotency,
    PerturbedInverseSpectrum,
}

impl Condition {
    pub const ALL: [Condition; 8] = [
        Condition::Subadditive,
        Condition::Sublinear,
        Condition::Submultiplicative,
        Condition::PropertyL,
        Condition::TStable,
        Condition::TStableSampled,
        Condition::ResolventNilpotency,
        Condition::PerturbedInverseSpectrum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Subadditive => "subadditive",
            Condition::Sublinear => "sublinear",
            Condition::Submultiplicative => "submultiplicative",
            Condition::PropertyL => "property-l",
            Condition::TStable => "t-stable",
            Condition::TStableSampled => "t-stable-sampled",
            Condition::ResolventNilpotency => "resolvent-nilpotency",
            Condition::PerturbedInverseSpectrum => "perturbed-inverse-spectrum",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Condition::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown condition `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    HoldsAtProbes,
}

impl Verdict {
    /// `Holds` or `HoldsAtProbes`.
    pub fn passed(self) -> bool {
        self != Verdict::Fails
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::HoldsAtProbes => "holds-at-probes",
        })
    }
}

/// Where a condition broke: the probe value, the offending eigenvalue and its
/// distance to the admissible set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub lambda: Option<C64>,
    pub eigenvalue: C64,
    pub distance: f64,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub probes_used: Vec<C64>,
    pub tolerance: Tolerance,
    /// Pairs `(alpha_i, beta_i)` found by the property L search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<Vec<[C64; 2]>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub ambiguous: bool,
    /// The lambda-independent characteristic polynomial found by the exact
    /// T-stability test.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<C64>>,
}

impl ConditionReport {
    pub(crate) fn new(condition: Condition, verdict: Verdict, tol: &Tolerance) -> Self {
        Self {
            condition,
            verdict,
            pair: None,
            witness: None,
            probes_used: Vec::new(),
            tolerance: *tol,
            pairing: None,
            ambiguous: false,
            coefficients: None,
        }
    }

    pub(crate) fn failed(condition: Condition, witness: Witness, tol: &Tolerance) -> Self {
        let mut r = Self::new(condition, Verdict::Fails, tol);
        r.witness = Some(witness);
        r
    }

    pub(crate) fn with_probes(mut self, probes: &[C64]) -> Self {
        self.probes_used = probes.to_vec();
        self
    }

    pub fn with_pair(mut self, a: impl Into<String>, b: impl Into<String>) -> Self {
        self.pair = Some([a.into(), b.into()]);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// Distinct eigenvalues with their multiplicity and an accuracy radius.
///
/// A cluster of multiplicity `k` is only determined to within the
/// perturbation radius of a `k`-fold defective eigenvalue, so comparisons
/// between spectra allow the sum of the two radii.
#[derive(Clone, Debug)]
pub(crate) struct PointSet {
    pub points: Vec<Point>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Point {
    pub z: C64,
    pub mult: usize,
    pub radius: f64,
}

impl PointSet {
    pub fn of(m: &Matrix, tol: &Tolerance) -> Result<Self> {
        let scale = m.norm_fro();
        let delta = tol.effective(scale);
        let sigma = spectrum(m, tol)?;
        let points = sigma
            .distinct(0.0)
            .into_iter()
            .map(|(z, mult)| Point {
                z,
                mult,
                radius: cluster_radius(mult, delta, scale),
            })
            .collect();
        Ok(Self { points })
    }

    /// Flattened eigenvalues, repeated by multiplicity.
    pub fn values(&self) -> Vec<C64> {
        self.points
            .iter()
            .flat_map(|p| std::iter::repeat_n(p.z, p.mult))
            .collect()
    }

    /// Largest accuracy radius among the points.
    pub fn max_radius(&self) -> f64 {
        self.points.iter().map(|p| p.radius).fold(0.0, f64::max)
    }

    /// `{a + lambda b}` with radii `r_a + |lambda| r_b`.
    pub fn sumset(&self, other: &PointSet, lambda: C64) -> PointSet {
        let mut points = Vec::new();
        for a in &self.points {
            for b in &other.points {
                points.push(Point {
                    z: a.z + lambda * b.z,
                    mult: 1,
                    radius: a.radius + lambda.norm() * b.radius,
                });
            }
        }
        PointSet { points }
    }

    /// `{a b}` with first-order radii.
    pub fn product_set(&self, other: &PointSet) -> PointSet {
        let mut points = Vec::new();
        for a in &self.points {
            for b in &other.points {
                points.push(Point {
                    z: a.z * b.z,
                    mult: 1,
                    radius: a.radius * b.z.norm() + b.radius * a.z.norm() + a.radius * b.radius,
                });
            }
        }
        PointSet { points }
    }

    /// First point of `self` that lies outside `other`, with its excess
    /// distance over the allowed radius.
    pub fn first_outside(&self, other: &PointSet) -> Option<(C64, f64)> {
        for p in &self.points {
            let best = other
                .points
                .iter()
                .map(|q| ((p.z - q.z).norm(), p.radius + q.radius))
                .min_by(|x, y| (x.0 - x.1).total_cmp(&(y.0 - y.1)));
            match best {
                Some((d, allowed)) if d <= allowed => {}
                Some((d, _)) => return Some((p.z, d)),
                None => return Some((p.z, f64::INFINITY)),
            }
        }
        None
    }

    /// Worst residual of the best bijection between the two multisets and the
    /// residual allowed by their accuracy radii.
    pub fn multiset_residual(&self, other: &PointSet) -> (f64, f64) {
        let allowed = self.max_radius() + other.max_radius();
        let residual =
            match_multisets(&self.values(), &other.values(), allowed).map_or(f64::INFINITY, |m| m.max_residual);
        (residual, allowed)
    }

    pub fn multiset_matches(&self, other: &PointSet) -> bool {
        let (residual, allowed) = self.multiset_residual(other);
        residual <= allowed
    }

    /// Lower and upper bounds on the spectral radius.
    pub fn radius_bounds(&self) -> (f64, f64) {
        let lo = self
            .points
            .iter()
            .map(|p| (p.z.norm() - p.radius).max(0.0))
            .fold(0.0, f64::max);
        let hi = self.points.iter().map(|p| p.z.norm() + p.radius).fold(0.0, f64::max);
        (lo, hi)
    }
}
