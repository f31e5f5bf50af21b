//! Bases of the Lie, Jordan and associative algebras generated by a family of
//! matrices.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numat::{common_dim, Matrix, Tolerance, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraKind {
    Lie,
    Jordan,
    Associative,
    LinearSpan,
}

impl AlgebraKind {
    pub fn product(self, a: &Matrix, b: &Matrix) -> Option<Matrix> {
        match self {
            AlgebraKind::Lie => Some(&(a * b) - &(b * a)),
            AlgebraKind::Jordan => Some(&(a * b) + &(b * a)),
            AlgebraKind::Associative => Some(a * b),
            AlgebraKind::LinearSpan => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AlgebraKind::Lie => "lie",
            AlgebraKind::Jordan => "jordan",
            AlgebraKind::Associative => "associative",
            AlgebraKind::LinearSpan => "linear-span",
        }
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgebraKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lie" => Ok(AlgebraKind::Lie),
            "jordan" => Ok(AlgebraKind::Jordan),
            "assoc" | "associative" => Ok(AlgebraKind::Associative),
            "span" | "linear-span" => Ok(AlgebraKind::LinearSpan),
            other => Err(Error::InvalidConfig(format!("unknown algebra kind `{other}`"))),
        }
    }
}

pub fn lie_bracket(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.check_same_dim(b)?;
    Ok(&(a * b) - &(b * a))
}

pub fn jordan_product(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.check_same_dim(b)?;
    Ok(&(a * b) + &(b * a))
}

/// A subspace of `M_n` closed under the product of `kind`, stored as a basis
/// that is orthonormal for the Frobenius inner product.
#[derive(Clone, Debug)]
pub struct AlgebraBasis {
    kind: AlgebraKind,
    dim_ambient: usize,
    basis: Vec<Matrix>,
    vectors: Vec<DVector<C64>>,
    generators: Vec<Matrix>,
}

impl AlgebraBasis {
    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.dim_ambient * self.dim_ambient
    }

    /// Frobenius distance from `m` to the span.
    pub fn residual(&self, m: &Matrix) -> f64 {
        orthogonal_residual(&self.vectors, m.vectorize()).norm()
    }
}

/// Two passes of modified Gram-Schmidt against an orthonormal list.
fn orthogonal_residual(basis: &[DVector<C64>], mut v: DVector<C64>) -> DVector<C64> {
    for _ in 0..2 {
        for q in basis {
            let coeff = q.dotc(&v);
            v.axpy(-coeff, q, C64::new(1.0, 0.0));
        }
    }
    v
}

struct Builder {
    n: usize,
    basis: Vec<Matrix>,
    vectors: Vec<DVector<C64>>,
}

impl Builder {
    fn full(&self) -> bool {
        self.vectors.len() == self.n * self.n
    }

    /// Adjoins the normalized residual of `m` when it exceeds `threshold`.
    fn adjoin(&mut self, m: &Matrix, threshold: f64) -> bool {
        if self.full() {
            return false;
        }
        let r = orthogonal_residual(&self.vectors, m.vectorize());
        let norm = r.norm();
        if norm <= threshold {
            return false;
        }
        let q = r / C64::new(norm, 0.0);
        self.basis.push(Matrix::from_vector(self.n, &q));
        self.vectors.push(q);
        true
    }
}

/// Smallest subspace containing `generators` and closed under the product of
/// `kind`.
///
/// Generators are adjoined when their residual exceeds the effective
/// tolerance at the largest generator norm. Products are then formed between
/// unit-norm basis elements, so their natural scale is one and the threshold
/// is the effective tolerance at `max(1, ||p||_F)`. Each round only multiplies
/// pairs involving at least one element adjoined in the previous round; the
/// fixpoint is the same as for all-pairs rounds. Enumeration order is fixed,
/// so the basis is deterministic.
pub fn close(generators: &[Matrix], kind: AlgebraKind, tol: &Tolerance) -> Result<AlgebraBasis> {
    let n = common_dim(generators)?;
    let mut b = Builder {
        n,
        basis: Vec::new(),
        vectors: Vec::new(),
    };
    let gen_threshold = tol.for_matrices(generators);
    for g in generators {
        b.adjoin(g, gen_threshold);
    }
    if b.basis.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut frontier_start = 0;
    while frontier_start < b.basis.len() && !b.full() && kind != AlgebraKind::LinearSpan {
        let end = b.basis.len();
        for i in 0..end {
            for j in 0..end {
                if i.max(j) < frontier_start {
                    continue;
                }
                let wanted = match kind {
                    AlgebraKind::Lie => i < j,
                    AlgebraKind::Jordan => i <= j,
                    _ => true,
                };
                if !wanted {
                    continue;
                }
                let p = kind.product(&b.basis[i], &b.basis[j]).expect("kind has a product");
                b.adjoin(&p, tol.effective(p.norm_fro().max(1.0)));
                if b.full() {
                    break;
                }
            }
            if b.full() {
                break;
            }
        }
        frontier_start = end;
    }
    Ok(AlgebraBasis {
        kind,
        dim_ambient: n,
        basis: b.basis,
        vectors: b.vectors,
        generators: generators.to_vec(),
    })
}

/// The span contains `m` when its residual is within the effective tolerance
/// at `||m||_F`.
pub fn contains(basis: &AlgebraBasis, m: &Matrix, tol: &Tolerance) -> bool {
    if m.dim() != basis.dim_ambient {
        return false;
    }
    basis.residual(m) <= tol.effective(m.norm_fro())
}

/// Complex Gaussian with unit expected squared modulus.
pub(crate) fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn random_element_with<R: Rng + ?Sized>(basis: &AlgebraBasis, rng: &mut R) -> Matrix {
    let mut out = Matrix::zeros(basis.dim_ambient);
    for b in &basis.basis {
        out = out.add_scaled(complex_normal(rng), b);
    }
    out
}

/// Seeded random combination of the basis with standard complex Gaussian
/// coefficients.
pub fn random_element(basis: &AlgebraBasis, seed: u64) -> Matrix {
    random_element_with(basis, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::nilpotent_span_example;
    use crate::numat::is_nilpotent;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn bracket_examples() {
        let (a, b) = nilpotent_span_example();
        assert_eq!(lie_bracket(&a, &a).unwrap(), Matrix::zeros(3));
        let d = Matrix::from_diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let e12 = Matrix::unit(2, 0, 1);
        assert_eq!(lie_bracket(&d, &e12).unwrap(), e12.scale(c(-1.0, 0.0)));
        // AB = diag(1, -1, 0), BA = diag(0, 1, -1)
        let expected = Matrix::from_diagonal(&[c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(lie_bracket(&a, &b).unwrap(), expected);
        assert!(lie_bracket(&a, &Matrix::zeros(2)).is_err());
    }

    #[test]
    fn jordan_examples() {
        let (a, b) = nilpotent_span_example();
        assert_eq!(jordan_product(&a, &Matrix::zeros(3)).unwrap(), Matrix::zeros(3));
        assert_eq!(jordan_product(&Matrix::identity(3), &b).unwrap(), b.scale(c(2.0, 0.0)));
        let p = Matrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(jordan_product(&p, &p).unwrap(), p.scale(c(2.0, 0.0)));
    }

    #[test]
    fn close_examples() {
        let tol = Tolerance::default();
        let one = close(&[Matrix::identity(3)], AlgebraKind::Associative, &tol).unwrap();
        assert_eq!(one.len(), 1);
        let (a, b) = nilpotent_span_example();
        let full = close(&[a, b], AlgebraKind::Associative, &tol).unwrap();
        assert_eq!(full.len(), 9);
        assert!(contains(&full, &Matrix::unit(3, 0, 0), &tol));
        let d1 = Matrix::from_diagonal(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let d2 = Matrix::from_diagonal(&[c(0.0, 1.0), c(5.0, 0.0), c(-1.0, 0.0)]);
        let lie = close(&[d1, d2], AlgebraKind::Lie, &tol).unwrap();
        assert_eq!(lie.len(), 2);
    }

    #[test]
    fn zero_family_is_rejected() {
        let tol = Tolerance::default();
        assert!(matches!(
            close(&[Matrix::zeros(2)], AlgebraKind::Lie, &tol),
            Err(Error::EmptyFamily)
        ));
        assert!(close(&[], AlgebraKind::Lie, &tol).is_err());
    }

    #[test]
    fn contains_examples() {
        let tol = Tolerance::default();
        let one = close(&[Matrix::identity(2)], AlgebraKind::Jordan, &tol).unwrap();
        assert!(contains(&one, &Matrix::zeros(2), &tol));
        assert!(contains(&one, &Matrix::identity(2).scale(c(2.0, 0.0)), &tol));
        assert!(!contains(&one, &Matrix::unit(2, 0, 1), &tol));
    }

    #[test]
    fn random_element_examples() {
        let tol = Tolerance::default();
        let one = close(&[Matrix::identity(3)], AlgebraKind::LinearSpan, &tol).unwrap();
        let x = random_element(&one, 11);
        let s = x.get(0, 0);
        assert!((&x - &Matrix::identity(3).scale(s)).norm_fro() < 1e-15);
        assert_eq!(random_element(&one, 11), x);
        let (a, b) = nilpotent_span_example();
        let span = close(&[a, b], AlgebraKind::LinearSpan, &tol).unwrap();
        for seed in 0..20 {
            assert!(is_nilpotent(&random_element(&span, seed), &tol).unwrap());
        }
    }
}
