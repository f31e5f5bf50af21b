//! Invariant subspaces, Riesz projections, simultaneous triangularization and
//! the engine that checks reducibility theorems against certificates.

mod classical;
mod engine;
mod riesz;
mod search;

use nalgebra::{DMatrix, DVector};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::numat::{null_space, Matrix, Tolerance, C64};

pub use classical::{is_diagonalizable, kleinecke_shirokov_check, motzkin_taussky_check};
pub use engine::{verdict_engine, Certificate, CertificateStatus, Prediction, TheoremCheck, Verdict};
pub use riesz::riesz_projection;
pub use search::{
    find_invariant_subspace, triangularize, FailureKind, NotFoundReason, SearchOutcome, TriangularizeFailure,
    TriangularizeOutcome,
};

/// Subspace of `C^n` given by orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: DMatrix<C64>,
}

impl Subspace {
    /// Orthonormal basis of the span of `vectors`, keeping singular directions
    /// above `rel_threshold` times the largest singular value. `None` when the
    /// span is zero.
    pub fn from_vectors(n: usize, vectors: &[DVector<C64>], rel_threshold: f64) -> Option<Self> {
        if vectors.is_empty() {
            return None;
        }
        let m = DMatrix::from_columns(vectors);
        debug_assert_eq!(m.nrows(), n);
        let svd = m.svd(true, false);
        let u = svd.u?;
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        if smax == 0.0 {
            return None;
        }
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] > rel_threshold * smax)
            .collect();
        if keep.is_empty() {
            return None;
        }
        let cols: Vec<DVector<C64>> = keep.iter().map(|&i| u.column(i).into_owned()).collect();
        Some(Self {
            basis: DMatrix::from_columns(&cols),
        })
    }

    pub(crate) fn from_orthonormal(basis: DMatrix<C64>) -> Self {
        Self { basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<C64> {
        &self.basis
    }

    pub fn is_nontrivial(&self) -> bool {
        self.dim() >= 1 && self.dim() < self.ambient_dim()
    }

    pub fn projector(&self) -> Matrix {
        Matrix::from_inner(&self.basis * self.basis.adjoint())
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self) -> Option<Subspace> {
        let n = self.ambient_dim();
        if self.dim() >= n {
            return None;
        }
        let vs = null_space(&self.basis.adjoint(), 0.5).ok()?;
        if vs.len() != n - self.dim() {
            return None;
        }
        Some(Self {
            basis: DMatrix::from_columns(&vs),
        })
    }

    /// `max |V^* V - I|` entrywise.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.basis.adjoint() * &self.basis - DMatrix::<C64>::identity(self.dim(), self.dim());
        g.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let columns: Vec<Vec<[f64; 2]>> = self
            .basis
            .column_iter()
            .map(|c| c.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        let mut s = serializer.serialize_struct("Subspace", 3)?;
        s.serialize_field("ambient_dim", &self.ambient_dim())?;
        s.serialize_field("dim", &self.dim())?;
        s.serialize_field("basis", &columns)?;
        s.end()
    }
}

/// A complete flag of subspaces, stored as a unitary `Q` whose leading `k`
/// columns span the `k`-th member.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceChain {
    q: DMatrix<C64>,
    complete: bool,
}

impl SubspaceChain {
    pub(crate) fn new(q: DMatrix<C64>, complete: bool) -> Self {
        Self { q, complete }
    }

    pub fn ambient_dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn q(&self) -> &DMatrix<C64> {
        &self.q
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Span of the leading `k` columns.
    pub fn member(&self, k: usize) -> Subspace {
        Subspace::from_orthonormal(self.q.columns(0, k).into_owned())
    }

    /// `Q^* M Q`.
    pub fn conjugate(&self, m: &Matrix) -> Matrix {
        Matrix::from_inner(self.q.adjoint() * m.inner() * &self.q)
    }

    /// Below-diagonal Frobenius norm of `Q^* M Q` relative to `||M||_F`.
    pub fn relative_residual(&self, m: &Matrix) -> f64 {
        let norm = m.norm_fro();
        if norm == 0.0 {
            return 0.0;
        }
        self.conjugate(m).below_diagonal_norm() / norm
    }

    pub fn orthonormality_error(&self) -> f64 {
        Subspace::from_orthonormal(self.q.clone()).orthonormality_error()
    }
}

impl Serialize for SubspaceChain {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let q = Matrix::from_inner(self.q.clone()).to_pairs();
        let mut s = serializer.serialize_struct("SubspaceChain", 3)?;
        s.serialize_field("ambient_dim", &self.ambient_dim())?;
        s.serialize_field("complete", &self.complete)?;
        s.serialize_field("q", &q)?;
        s.end()
    }
}

/// `||(I - P) M P||_F <= atol + rtol ||M||_F` for every member, where `P` is
/// the orthogonal projection onto `s`.
pub fn is_invariant(s: &Subspace, family: &[Matrix], tol: &Tolerance) -> bool {
    family.iter().all(|m| {
        if m.dim() != s.ambient_dim() {
            return false;
        }
        invariance_residual(s, m) <= tol.effective(m.norm_fro())
    })
}

/// `||(I - P) M P||_F`, computed as `||M V - V (V^* M V)||_F`.
pub fn invariance_residual(s: &Subspace, m: &Matrix) -> f64 {
    let v = &s.basis;
    let mv = m.inner() * v;
    let r = &mv - v * (v.adjoint() * &mv);
    r.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> DVector<C64> {
        let mut v = DVector::zeros(n);
        v[i] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn invariance_examples() {
        let tol = Tolerance::default();
        let s = Subspace::from_vectors(3, &[e(3, 0)], 1e-12).unwrap();
        let upper = Matrix::from_real_rows(&[[1.0, 2.0, 3.0], [0.0, 4.0, 5.0], [0.0, 0.0, 6.0]]).unwrap();
        assert!(is_invariant(&s, &[upper.clone(), Matrix::unit(3, 0, 2)], &tol));
        assert!(!is_invariant(&s, &[upper, Matrix::unit(3, 1, 0)], &tol));
    }

    #[test]
    fn complement_is_orthogonal() {
        let v = DVector::from_vec(vec![C64::new(1.0, 1.0), C64::new(0.0, 2.0), C64::new(-1.0, 0.0)]);
        let s = Subspace::from_vectors(3, &[v], 1e-12).unwrap();
        let c = s.complement().unwrap();
        assert_eq!(c.dim(), 2);
        assert!((s.basis().adjoint() * c.basis()).norm() < 1e-14);
        assert!(c.orthonormality_error() < 1e-14);
    }
}
