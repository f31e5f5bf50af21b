use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closure::complex_normal;
use crate::error::{Error, Result};
use crate::numat::{Matrix, Tolerance, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// `S T_i S^-1` with upper triangular `T_i`.
    ConjugatedTriangular,
    /// `S N_i S^-1` with strictly upper triangular `N_i`.
    NilpotentSpan,
    /// `(A, T)`, unitarily conjugated upper triangular with `diag(T) = 0`.
    StablePair,
    /// `S D_i S^-1` with diagonal `D_i`.
    DiagonalizableSpan,
    /// Independent complex Gaussian matrices.
    Generic,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::ConjugatedTriangular,
        GeneratorKind::NilpotentSpan,
        GeneratorKind::StablePair,
        GeneratorKind::DiagonalizableSpan,
        GeneratorKind::Generic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::ConjugatedTriangular => "conjugated-triangular",
            GeneratorKind::NilpotentSpan => "nilpotent-span",
            GeneratorKind::StablePair => "stable-pair",
            GeneratorKind::DiagonalizableSpan => "diagonalizable-span",
            GeneratorKind::Generic => "generic",
        }
    }

    /// Families from this generator are simultaneously triangularizable.
    pub fn triangularizable(self) -> bool {
        self != GeneratorKind::Generic
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeneratorKind::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown generator `{s}`")))
    }
}

fn default_family_size() -> usize {
    3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub seed: u64,
    pub trials: usize,
    /// Inclusive dimension range.
    pub dim_range: [usize; 2],
    pub generator: GeneratorKind,
    #[serde(default = "default_family_size")]
    pub family_size: usize,
    #[serde(default)]
    pub tolerance: Tolerance,
    /// Replaces the standard probe set when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<C64>>,
}

impl CampaignConfig {
    pub fn new(seed: u64, trials: usize, dim_range: [usize; 2], generator: GeneratorKind) -> Self {
        Self {
            seed,
            trials,
            dim_range,
            generator,
            family_size: default_family_size(),
            tolerance: Tolerance::default(),
            probes: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.dim_range;
        if lo < 2 || hi < lo {
            return Err(Error::InvalidConfig(format!(
                "dimension range [{lo}, {hi}] needs 2 <= min <= max"
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("at least one trial is required".into()));
        }
        if self.family_size == 0 {
            return Err(Error::InvalidConfig("family size must be positive".into()));
        }
        Ok(())
    }

    /// Seed of trial `index`.
    pub fn trial_seed(&self, index: usize) -> u64 {
        let mut z = self
            .seed
            .wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// Family for trial `index`: the dimension is drawn from the range, then the
/// generator runs on the trial's own stream.
pub fn generate_trial(config: &CampaignConfig, index: usize) -> Vec<Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.trial_seed(index));
    let [lo, hi] = config.dim_range;
    let n = rng.random_range(lo..=hi);
    generate_with(config.generator, n, config.family_size, &mut rng)
}

/// Family for the first trial of `config`.
pub fn generate_family(config: &CampaignConfig) -> Vec<Matrix> {
    generate_trial(config, 0)
}

pub fn generate_with<R: Rng + ?Sized>(kind: GeneratorKind, n: usize, count: usize, rng: &mut R) -> Vec<Matrix> {
    match kind {
        GeneratorKind::ConjugatedTriangular => {
            let (s, s_inv) = conditioned_basis(n, rng);
            (0..count)
                .map(|_| conjugate(&s, &upper(n, rng, false), &s_inv))
                .collect()
        }
        GeneratorKind::NilpotentSpan => {
            let (s, s_inv) = conditioned_basis(n, rng);
            (0..count)
                .map(|_| conjugate(&s, &upper(n, rng, true), &s_inv))
                .collect()
        }
        GeneratorKind::StablePair => {
            let (a, t) = stable_pair(n, rng);
            vec![a, t]
        }
        GeneratorKind::DiagonalizableSpan => {
            let (s, s_inv) = conditioned_basis(n, rng);
            (0..count)
                .map(|_| {
                    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| complex_normal(rng)));
                    conjugate(&s, &d, &s_inv)
                })
                .collect()
        }
        GeneratorKind::Generic => (0..count).map(|_| gaussian(n, rng)).collect(),
    }
}

fn gaussian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let scale = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    Matrix::from_inner(DMatrix::from_fn(n, n, |_, _| complex_normal(rng) * scale))
}

pub(crate) fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |_, _| complex_normal(rng)).qr().q()
}

/// `S = U diag(s) V` with singular values in `[1, 2]`, so `cond(S) <= 2`.
fn conditioned_basis<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (DMatrix<C64>, DMatrix<C64>) {
    let u = random_unitary(n, rng);
    let v = random_unitary(n, rng);
    let s: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..=2.0)).collect();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        s.iter().map(|&x| C64::new(x, 0.0)),
    ));
    let d_inv = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        s.iter().map(|&x| C64::new(1.0 / x, 0.0)),
    ));
    (&u * d * &v, v.adjoint() * d_inv * u.adjoint())
}

fn conjugate(s: &DMatrix<C64>, t: &DMatrix<C64>, s_inv: &DMatrix<C64>) -> Matrix {
    Matrix::from_inner(s * t * s_inv)
}

/// Upper triangular with Gaussian diagonal and off-diagonal part scaled by
/// `1/sqrt(n)`.
fn upper<R: Rng + ?Sized>(n: usize, rng: &mut R, strict: bool) -> DMatrix<C64> {
    let off = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    DMatrix::from_fn(n, n, |i, j| {
        if j > i {
            complex_normal(rng) * off
        } else if i == j && !strict {
            complex_normal(rng)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `A = U (D + N) U^*`, `T = U M U^*` with `N`, `M` strictly upper triangular.
///
/// The diagonal of `A` is drawn on a grid of spacing one half so eigenvalues
/// either coincide exactly or are well separated.
pub fn stable_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Matrix, Matrix) {
    let u = random_unitary(n, rng);
    let mut a = upper(n, rng, true);
    for i in 0..n {
        let re = rng.random_range(-4..=4) as f64 * 0.5;
        let im = rng.random_range(-2..=2) as f64 * 0.5;
        a[(i, i)] = C64::new(re, im);
    }
    let t = upper(n, rng, true);
    (
        Matrix::from_inner(&u * a * u.adjoint()),
        Matrix::from_inner(&u * t * u.adjoint()),
    )
}

/// `(A, B)` with `[A, [A, B]] = 0`: in a basis `S`, `A = alpha I + beta J`
/// with `J` the nilpotent shift and `B = gamma D + q(J)`, where
/// `D = diag(0, 1, .., n-1)` satisfies `[J, D] = J`.
pub fn kleinecke_shirokov_instance<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Matrix, Matrix) {
    let (s, s_inv) = conditioned_basis(n, rng);
    let shift = DMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let d = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(i as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let alpha = complex_normal(rng);
    let beta = complex_normal(rng);
    let gamma = complex_normal(rng);
    let a = DMatrix::identity(n, n) * alpha + &shift * beta;
    let mut q = DMatrix::<C64>::zeros(n, n);
    let mut power = DMatrix::<C64>::identity(n, n);
    for _ in 0..n {
        q += &power * complex_normal(rng);
        power = &power * &shift;
    }
    let b = d * gamma + q;
    (conjugate(&s, &a, &s_inv), conjugate(&s, &b, &s_inv))
}
