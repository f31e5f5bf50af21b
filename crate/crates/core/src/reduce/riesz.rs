use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numat::schur::{schur, solve_triangular_sylvester};
use crate::numat::{cluster_eigenvalues, cluster_radius, Matrix, Tolerance, C64};

/// Spectral (Riesz) projection of `m` onto the generalized eigenspace of the
/// eigenvalue cluster nearest `lambda0`.
///
/// The Schur form is reordered so the cluster leads, `T11 Y - Y T22 = T12` is
/// solved by back substitution and `P = Q [[I, Y], [0, 0]] Q^*`.
pub fn riesz_projection(m: &Matrix, lambda0: C64, tol: &Tolerance) -> Result<Matrix> {
    let n = m.dim();
    let mut form = schur(m.inner())?;
    let diag = form.diagonal();
    let scale = m.norm_fro();
    let delta = tol.effective(scale);
    let clusters = cluster_eigenvalues(&diag, delta, scale);

    let (best, dist) = clusters
        .iter()
        .map(|c| (c, (c.centroid - lambda0).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("matrix dimension is positive");
    let radius = cluster_radius(best.members.len(), delta, scale);
    let match_tol = radius + delta;
    if dist > match_tol {
        return Err(Error::NoMatchingEigenvalue {
            target: lambda0,
            tolerance: match_tol,
        });
    }

    let mut selected = vec![false; n];
    for &j in &best.members {
        selected[j] = true;
    }
    let gap = (0..n)
        .filter(|&j| !selected[j])
        .map(|j| (diag[j] - best.centroid).norm())
        .fold(f64::INFINITY, f64::min);
    let required = 10.0 * radius.max(delta);
    if gap <= required {
        return Err(Error::ClusterNotSeparated {
            center: best.centroid,
            gap,
            required,
        });
    }

    let k = form.reorder(&selected);
    let mut pt = DMatrix::<C64>::zeros(n, n);
    for i in 0..k {
        pt[(i, i)] = C64::new(1.0, 0.0);
    }
    if k < n {
        let t11 = form.t.view((0, 0), (k, k)).into_owned();
        let t12 = form.t.view((0, k), (k, n - k)).into_owned();
        let t22 = form.t.view((k, k), (n - k, n - k)).into_owned();
        let y = solve_triangular_sylvester(&t11, &t22, &t12)?;
        pt.view_mut((0, k), (k, n - k)).copy_from(&y);
    }
    let p = &form.q * pt * form.q.adjoint();
    Ok(Matrix::from_inner(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn commutator_norm(a: &Matrix, b: &Matrix) -> f64 {
        (a.inner() * b.inner() - b.inner() * a.inner()).norm()
    }

    #[test]
    fn diagonalizable_projection() {
        // M = S diag(1, 2, 2) S^-1 with S upper unit triangular
        let s = Matrix::from_real_rows(&[[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]]).unwrap();
        let s_inv = Matrix::from_real_rows(&[[1.0, -1.0, 1.0], [0.0, 1.0, -1.0], [0.0, 0.0, 1.0]]).unwrap();
        let d = Matrix::from_diagonal(&[c(1.0), c(2.0), c(2.0)]);
        let m = Matrix::from_inner(s.inner() * d.inner() * s_inv.inner());
        let tol = Tolerance::default();
        let p = riesz_projection(&m, c(2.0), &tol).unwrap();
        // exact projection is S diag(0, 1, 1) S^-1
        let e = Matrix::from_diagonal(&[c(0.0), c(1.0), c(1.0)]);
        let exact = s.inner() * e.inner() * s_inv.inner();
        assert!((p.inner() - exact).norm() < 1e-12);
        assert!((p.inner() * p.inner() - p.inner()).norm() < 1e-12);
        assert!(commutator_norm(&p, &m) < 1e-12);
    }

    #[test]
    fn jordan_block_cluster() {
        let m = Matrix::from_real_rows(&[
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 3.0],
        ])
        .unwrap();
        let tol = Tolerance::default();
        let p = riesz_projection(&m, c(0.0), &tol).unwrap();
        let exact = Matrix::from_diagonal(&[c(1.0), c(1.0), c(1.0), c(0.0)]);
        assert!((p.inner() - exact.inner()).norm() < 1e-9);
        assert!((p.trace() - c(3.0)).norm() < 1e-9);
    }

    #[test]
    fn t_stable_example_rank_one() {
        let (a, _) = crate::corpus::t_stable_example();
        let tol = Tolerance::default();
        let p = riesz_projection(&a, c(-1.0), &tol).unwrap();
        assert!((p.inner() - Matrix::unit(3, 0, 0).inner()).norm() < 1e-9);
        let nil = riesz_projection(&Matrix::unit(3, 0, 2), c(0.0), &tol).unwrap();
        assert!((nil.inner() - Matrix::identity(3).inner()).norm() < 1e-12);
    }

    #[test]
    fn errors() {
        let tol = Tolerance::default();
        let m = Matrix::from_diagonal(&[c(1.0), c(2.0)]);
        assert!(matches!(
            riesz_projection(&m, c(5.0), &tol),
            Err(Error::NoMatchingEigenvalue { .. })
        ));
        // values inside one cluster radius are one eigenvalue
        let close = Matrix::from_diagonal(&[c(1.0), c(1.0 + 1e-9)]);
        let p = riesz_projection(&close, c(1.0), &tol).unwrap();
        assert!((p.inner() - Matrix::identity(2).inner()).norm() < 1e-12);
    }
}
