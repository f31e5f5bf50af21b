//! Dense complex matrices, spectra, characteristic polynomials and the
//! tolerance model shared by every other module.

mod charpoly;
pub mod matching;
mod matrix;
pub mod schur;
mod spectrum;
mod tolerance;

use nalgebra::{DMatrix, DVector, SVD};

pub use charpoly::{char_poly, CharPoly};
pub(crate) use matrix::common_dim;
pub use matrix::Matrix;
pub(crate) use spectrum::cluster_radius;
pub use spectrum::{cluster_eigenvalues, spectral_radius, spectrum, Cluster, Spectrum};
pub use tolerance::Tolerance;

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex64;

pub fn trace(m: &Matrix) -> C64 {
    m.trace()
}

pub(crate) fn singular_values(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    let svd = SVD::try_new(m.clone(), false, false, f64::EPSILON, 0).ok_or(Error::SvdNonConvergence)?;
    Ok(svd.singular_values.iter().copied().collect())
}

/// Orthonormal basis of the right null space: right singular vectors whose
/// singular value is at most `threshold`.
pub(crate) fn null_space(m: &DMatrix<C64>, threshold: f64) -> Result<Vec<DVector<C64>>> {
    let (rows, cols) = m.shape();
    let padded;
    let a = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded = p;
        &padded
    } else {
        m
    };
    let svd = SVD::try_new(a.clone(), false, true, f64::EPSILON, 0).ok_or(Error::SvdNonConvergence)?;
    let v_t = svd.v_t.ok_or(Error::SvdNonConvergence)?;
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= threshold {
            out.push(v_t.row(i).adjoint());
        }
    }
    Ok(out)
}

/// Number of singular values above the effective tolerance.
pub fn rank(m: &Matrix, tol: &Tolerance) -> Result<usize> {
    let threshold = tol.effective(m.norm_fro());
    Ok(singular_values(m.inner())?
        .into_iter()
        .filter(|&s| s > threshold)
        .count())
}

/// Dimension of the numerical kernel at the same threshold as [`rank`].
pub fn nullity(m: &Matrix, tol: &Tolerance) -> Result<usize> {
    Ok(null_space(m.inner(), tol.effective(m.norm_fro()))?.len())
}

/// Decides nilpotency.
///
/// Two criteria must agree: every (cluster-polished) eigenvalue has modulus at
/// most the effective tolerance, and `||M^n||_F <= (atol + rtol) max(1, ||M||_F)^n`.
/// Disagreement means the question is ill-conditioned at this tolerance and is
/// reported as [`Error::NilpotencyUndecided`].
pub fn is_nilpotent(m: &Matrix, tol: &Tolerance) -> Result<bool> {
    let n = m.dim();
    let norm = m.norm_fro();
    let radius = spectral_radius(m, tol)?;
    let by_eigenvalues = radius <= tol.effective(norm);
    let power_norm = m.pow(n as u32).norm_fro();
    if !power_norm.is_finite() {
        return Err(Error::Overflow("matrix power"));
    }
    let by_power = power_norm <= tol.combined() * norm.max(1.0).powi(n as i32);
    if by_eigenvalues != by_power {
        return Err(Error::NilpotencyUndecided {
            by_eigenvalues,
            by_power,
            radius,
            power_norm,
        });
    }
    Ok(by_eigenvalues)
}

/// `(mu I - M)^{-1} X` by an LU solve.
pub fn resolvent_apply(m: &Matrix, mu: C64, x: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    m.check_same_dim(x)?;
    let sigma = spectrum(m, tol)?;
    let distance = sigma.distance_to(mu);
    let tolerance = tol.effective(m.norm_fro().max(mu.norm()));
    if distance <= tolerance {
        return Err(Error::SingularResolvent {
            mu,
            distance,
            tolerance,
        });
    }
    let shifted = (-m).shifted(mu);
    solve(&shifted, x, "mu I - M")
}

/// `A^{-1} B` by an LU solve.
pub(crate) fn solve(a: &Matrix, b: &Matrix, what: &'static str) -> Result<Matrix> {
    let lu = a.inner().clone().lu();
    let y = lu.solve(b.inner()).ok_or(Error::Singular { what })?;
    let y = Matrix::from_inner(y);
    if !y.is_finite() {
        return Err(Error::Singular { what });
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::t_stable_example;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn spectrum_examples() {
        let tol = Tolerance::default();
        let s = spectrum(&Matrix::identity(3), &tol).unwrap();
        assert!(s.iter().all(|z| (*z - c(1.0, 0.0)).norm() < 1e-12));
        let (a, b) = t_stable_example();
        let sa = spectrum(&a, &tol).unwrap();
        let expected = Spectrum::from_values(vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(sa.multiset_eq(&expected, 1e-12));
        let sb = spectrum(&b, &tol).unwrap();
        assert!(sb.radius() < 1e-12, "{sb:?}");
    }

    #[test]
    fn spectral_radius_examples() {
        let tol = Tolerance::default();
        assert_eq!(spectral_radius(&Matrix::zeros(3), &tol).unwrap(), 0.0);
        let (a, _) = t_stable_example();
        assert!((spectral_radius(&a, &tol).unwrap() - 1.0).abs() < 1e-12);
        let d = Matrix::from_diagonal(&[c(0.0, 3.0), c(-2.0, 0.0)]);
        assert!((spectral_radius(&d, &tol).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn trace_examples() {
        let (a, b) = t_stable_example();
        assert_eq!(trace(&Matrix::zeros(4)), c(0.0, 0.0));
        assert_eq!(trace(&a), c(-1.0, 0.0));
        assert_eq!(trace(&b), c(0.0, 0.0));
    }

    #[test]
    fn rank_examples() {
        let tol = Tolerance::default();
        assert_eq!(rank(&Matrix::zeros(3), &tol).unwrap(), 0);
        assert_eq!(rank(&Matrix::identity(5), &tol).unwrap(), 5);
        let (_, b) = t_stable_example();
        assert_eq!(rank(&b, &tol).unwrap(), 2);
        assert_eq!(nullity(&b, &tol).unwrap(), 1);
    }

    #[test]
    fn nilpotency_examples() {
        let tol = Tolerance::default();
        let mut strict = Matrix::zeros(5);
        for i in 0..5 {
            for j in i + 1..5 {
                strict = strict.add_scaled(c(1.0 + i as f64, j as f64), &Matrix::unit(5, i, j));
            }
        }
        assert!(is_nilpotent(&strict, &tol).unwrap());
        let (_, b) = t_stable_example();
        assert!(is_nilpotent(&b, &tol).unwrap());
        assert_eq!(b.pow(3), Matrix::zeros(3));
        assert!(!is_nilpotent(&Matrix::identity(3), &tol).unwrap());
    }

    #[test]
    fn resolvent_examples() {
        let tol = Tolerance::default();
        let x = Matrix::from_real_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let y = resolvent_apply(&Matrix::zeros(2), c(1.0, 0.0), &x, &tol).unwrap();
        assert!((&y - &x).norm_fro() < 1e-14);
        let one = Matrix::from_real_rows(&[[1.0]]).unwrap();
        let y = resolvent_apply(&one, c(2.0, 0.0), &Matrix::identity(1), &tol).unwrap();
        assert!((y.get(0, 0) - c(1.0, 0.0)).norm() < 1e-14);
        let (a, b) = t_stable_example();
        let r = resolvent_apply(&a, c(2.0, 0.0), &b, &tol).unwrap();
        assert!(is_nilpotent(&r, &tol).unwrap());
        assert!(matches!(
            resolvent_apply(&a, c(-1.0, 0.0), &b, &tol),
            Err(Error::SingularResolvent { .. })
        ));
    }
}
