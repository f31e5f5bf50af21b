//! Complex Schur form with diagonal reordering and the triangular Sylvester
//! solve used for spectral projections.

use nalgebra::{DMatrix, Schur};

use super::C64;
use crate::error::{Error, Result};

/// `M = Q T Q^*` with `Q` unitary and `T` upper triangular.
#[derive(Clone, Debug)]
pub struct SchurForm {
    pub q: DMatrix<C64>,
    pub t: DMatrix<C64>,
}

const MAX_SWEEPS_PER_DIM: usize = 200;

/// Complex Schur form.
///
/// The QR iteration's deflation test compares subdiagonal entries with their
/// diagonal neighbours, which stalls on nilpotent input where the diagonal
/// tends to zero. On non-convergence the decomposition is retried on
/// `M + sigma I` for a few complex shifts with `|sigma| = ||M||_F`; the Schur
/// vectors are shared and `sigma` is subtracted from the diagonal afterwards.
pub fn schur(m: &DMatrix<C64>) -> Result<SchurForm> {
    let n = m.nrows();
    let norm = m.norm();
    if norm == 0.0 {
        return Ok(SchurForm {
            q: DMatrix::identity(n, n),
            t: DMatrix::zeros(n, n),
        });
    }
    let shifts = [
        C64::new(0.0, 0.0),
        C64::from_polar(norm, 0.7),
        C64::from_polar(norm, 2.1),
        C64::from_polar(2.0 * norm, 4.0),
    ];
    for sigma in shifts {
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[(i, i)] += sigma;
        }
        let Some(decomposition) = Schur::try_new(shifted, f64::EPSILON, MAX_SWEEPS_PER_DIM * n.max(1)) else {
            continue;
        };
        let (q, mut t) = decomposition.unpack();
        for j in 0..n {
            t[(j, j)] -= sigma;
            for i in j + 1..n {
                t[(i, j)] = C64::new(0.0, 0.0);
            }
        }
        if t.iter().chain(q.iter()).all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Ok(SchurForm { q, t });
        }
    }
    Err(Error::EigenNonConvergence { dim: n })
}

impl SchurForm {
    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.t[(i, i)]).collect()
    }

    /// Exchanges the diagonal entries at positions `k` and `k + 1` by a unitary
    /// rotation, keeping `T` upper triangular.
    pub fn swap_adjacent(&mut self, k: usize) {
        let n = self.dim();
        let a = self.t[(k, k)];
        let b = self.t[(k + 1, k + 1)];
        let x = self.t[(k, k + 1)];
        // [x, b - a] is an eigenvector of the 2x2 block for eigenvalue b.
        let (v1, v2) = (x, b - a);
        let norm = (v1.norm_sqr() + v2.norm_sqr()).sqrt();
        if norm == 0.0 {
            return;
        }
        let (g11, g21) = (v1 / norm, v2 / norm);
        let (g12, g22) = (-g21.conj(), g11.conj());
        // T <- G^* T on rows k, k+1.
        for j in 0..n {
            let r0 = self.t[(k, j)];
            let r1 = self.t[(k + 1, j)];
            self.t[(k, j)] = g11.conj() * r0 + g21.conj() * r1;
            self.t[(k + 1, j)] = g12.conj() * r0 + g22.conj() * r1;
        }
        // T <- T G and Q <- Q G on columns k, k+1.
        for i in 0..n {
            let c0 = self.t[(i, k)];
            let c1 = self.t[(i, k + 1)];
            self.t[(i, k)] = c0 * g11 + c1 * g21;
            self.t[(i, k + 1)] = c0 * g12 + c1 * g22;
            let q0 = self.q[(i, k)];
            let q1 = self.q[(i, k + 1)];
            self.q[(i, k)] = q0 * g11 + q1 * g21;
            self.q[(i, k + 1)] = q0 * g12 + q1 * g22;
        }
        self.t[(k + 1, k)] = C64::new(0.0, 0.0);
        self.t[(k, k)] = b;
        self.t[(k + 1, k + 1)] = a;
    }

    /// Moves the diagonal entries flagged in `selected` to the leading block,
    /// preserving the relative order within both groups. Returns the size of
    /// the leading block.
    pub fn reorder(&mut self, selected: &[bool]) -> usize {
        let n = self.dim();
        let mut flags = selected.to_vec();
        let mut target = 0;
        for _ in 0..n {
            let Some(pos) = (target..n).find(|&i| flags[i]) else {
                break;
            };
            for k in (target..pos).rev() {
                self.swap_adjacent(k);
                flags.swap(k, k + 1);
            }
            target += 1;
        }
        target
    }
}

/// Solves `A X - X B = C` for upper triangular `A` (k x k) and `B` (m x m)
/// with disjoint diagonals, by back substitution column by column.
pub fn solve_triangular_sylvester(a: &DMatrix<C64>, b: &DMatrix<C64>, c: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let k = a.nrows();
    let m = b.nrows();
    let mut x = DMatrix::<C64>::zeros(k, m);
    for j in 0..m {
        let mut rhs: Vec<C64> = (0..k).map(|i| c[(i, j)]).collect();
        for l in 0..j {
            let blj = b[(l, j)];
            for (i, r) in rhs.iter_mut().enumerate() {
                *r += x[(i, l)] * blj;
            }
        }
        let shift = b[(j, j)];
        for i in (0..k).rev() {
            let mut acc = rhs[i];
            for p in i + 1..k {
                acc -= a[(i, p)] * x[(p, j)];
            }
            let d = a[(i, i)] - shift;
            if d.norm() == 0.0 {
                return Err(Error::Singular {
                    what: "Sylvester operator",
                });
            }
            x[(i, j)] = acc / d;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn upper(n: usize, seed: u64) -> DMatrix<C64> {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        DMatrix::from_fn(n, n, |i, j| if i <= j { c(next(), next()) } else { c(0.0, 0.0) })
    }

    #[test]
    fn schur_reconstructs() {
        let m = upper(5, 3) + upper(5, 4).transpose();
        let f = schur(&m).unwrap();
        let back = &f.q * &f.t * f.q.adjoint();
        assert!((back - &m).norm() < 1e-12 * m.norm().max(1.0));
    }

    #[test]
    fn nilpotent_input_converges() {
        let mut m = DMatrix::<C64>::zeros(6, 6);
        for i in 0..5 {
            m[(i, i + 1)] = c(1.0 + i as f64, -0.5);
        }
        let f = schur(&m).unwrap();
        assert!((&f.q * &f.t * f.q.adjoint() - &m).norm() < 1e-12);
        assert!(schur(&DMatrix::zeros(3, 3)).is_ok());
    }

    #[test]
    fn reorder_keeps_similarity_and_triangularity() {
        let m = upper(6, 9);
        let mut f = SchurForm {
            q: DMatrix::identity(6, 6),
            t: m.clone(),
        };
        let diag = f.diagonal();
        let flags = [false, false, true, false, true, false];
        assert_eq!(f.reorder(&flags), 2);
        assert!((f.t[(0, 0)] - diag[2]).norm() < 1e-14);
        assert!((f.t[(1, 1)] - diag[4]).norm() < 1e-14);
        let back = &f.q * &f.t * f.q.adjoint();
        assert!((back - &m).norm() < 1e-12);
        for j in 0..6 {
            for i in j + 1..6 {
                assert_eq!(f.t[(i, j)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn sylvester_residual_vanishes() {
        let a = upper(3, 1) + DMatrix::identity(3, 3) * c(3.0, 0.0);
        let b = upper(2, 2);
        let rhs = DMatrix::from_fn(3, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5));
        let x = solve_triangular_sylvester(&a, &b, &rhs).unwrap();
        assert!((&a * &x - &x * &b - rhs).norm() < 1e-12);
    }
}
