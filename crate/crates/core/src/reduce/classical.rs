use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::closure::{lie_bracket, random_element_with, AlgebraBasis};
use crate::error::{Error, Result};
use crate::numat::{is_nilpotent, spectrum, Matrix, Tolerance, C64};

const MT_SAMPLES: usize = 64;

/// If `[A, [A, B]] = 0` then `[A, B]` is nilpotent. Returns the nilpotency of
/// `[A, B]`; errors when the double commutator is not zero.
pub fn kleinecke_shirokov_check(a: &Matrix, b: &Matrix, tol: &Tolerance) -> Result<bool> {
    a.check_same_dim(b)?;
    let ab = lie_bracket(a, b)?;
    let aab = lie_bracket(a, &ab)?;
    let na = a.norm_fro();
    let bound = tol.effective(4.0 * na * na * b.norm_fro());
    let r = aab.norm_fro();
    if r > bound {
        return Err(Error::Precondition(format!(
            "||[A,[A,B]]||_F = {r:e} exceeds {bound:e}"
        )));
    }
    is_nilpotent(&ab, tol)
}

/// Squarefree minimal polynomial test: `F * prod (alpha - F)` over the
/// distinct nonzero eigenvalues vanishes.
pub fn is_diagonalizable(f: &Matrix, tol: &Tolerance) -> Result<bool> {
    let n = f.dim();
    let scale = f.norm_fro();
    let distinct = spectrum(f, tol)?.distinct(0.0);
    let delta = tol.effective(scale);
    let mut p = f.clone();
    let mut factors = 1;
    for (alpha, _) in distinct {
        if alpha.norm() <= delta {
            continue;
        }
        let shifted = Matrix::identity(n).scale(alpha).add_scaled(C64::new(-1.0, 0.0), f);
        p = Matrix::from_inner(p.inner() * shifted.inner());
        factors += 1;
    }
    let bound = tol.combined() * scale.max(1.0).powi(factors) * n as f64;
    Ok(p.norm_fro() <= bound)
}

/// A linear space of diagonalizable matrices is commutative. Checks
/// diagonalizability of every basis element and of seeded random elements,
/// then returns whether all basis commutators vanish.
pub fn motzkin_taussky_check(basis: &AlgebraBasis, tol: &Tolerance, seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Matrix> = (0..MT_SAMPLES).map(|_| random_element_with(basis, &mut rng)).collect();
    for (i, f) in basis.elements().iter().chain(samples.iter()).enumerate() {
        if !is_diagonalizable(f, tol)? {
            let which = if i < basis.len() {
                format!("basis element {i}")
            } else {
                format!("sampled element {}", i - basis.len())
            };
            return Err(Error::Precondition(format!("{which} is not diagonalizable")));
        }
    }
    let els = basis.elements();
    for (i, a) in els.iter().enumerate() {
        for b in &els[i + 1..] {
            let c = lie_bracket(a, b)?;
            if c.norm_fro() > tol.effective(2.0 * a.norm_fro() * b.norm_fro()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::{close, AlgebraKind};
    use nalgebra::DMatrix;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn ks_guard_and_commuting() {
        let tol = Tolerance::default();
        let e12 = Matrix::unit(2, 0, 1);
        let e21 = Matrix::unit(2, 1, 0);
        assert!(matches!(
            kleinecke_shirokov_check(&e12, &e21, &tol),
            Err(Error::Precondition(_))
        ));
        let d = Matrix::from_diagonal(&[c(1.0), c(2.0)]);
        assert!(kleinecke_shirokov_check(&d, &d.pow(2), &tol).unwrap());
        // A = E12, B = E23 in dim 3: [A,B] = E13 and [A, E13] = 0
        let a = Matrix::unit(3, 0, 1);
        let b = Matrix::unit(3, 1, 2);
        assert!(kleinecke_shirokov_check(&a, &b, &tol).unwrap());
    }

    #[test]
    fn diagonalizability() {
        let tol = Tolerance::default();
        assert!(is_diagonalizable(&Matrix::from_diagonal(&[c(1.0), c(0.0), c(1.0)]), &tol).unwrap());
        assert!(!is_diagonalizable(&Matrix::unit(2, 0, 1), &tol).unwrap());
        let j = Matrix::from_real_rows(&[[2.0, 1.0], [0.0, 2.0]]).unwrap();
        assert!(!is_diagonalizable(&j, &tol).unwrap());
        assert!(is_diagonalizable(&Matrix::zeros(2), &tol).unwrap());
    }

    #[test]
    fn mt_examples() {
        let tol = Tolerance::default();
        let diag = close(
            &[
                Matrix::from_diagonal(&[c(1.0), c(0.0), c(2.0)]),
                Matrix::from_diagonal(&[c(0.0), c(3.0), c(1.0)]),
            ],
            AlgebraKind::LinearSpan,
            &tol,
        )
        .unwrap();
        assert!(motzkin_taussky_check(&diag, &tol, 0).unwrap());

        let bad = close(
            &[Matrix::from_diagonal(&[c(1.0), c(0.0)]), Matrix::unit(2, 0, 1)],
            AlgebraKind::LinearSpan,
            &tol,
        )
        .unwrap();
        assert!(matches!(
            motzkin_taussky_check(&bad, &tol, 0),
            Err(Error::Precondition(_))
        ));

        let s = Matrix::from_real_rows(&[[1.0, 2.0, 0.0], [0.0, 1.0, -1.0], [1.0, 0.0, 1.0]]).unwrap();
        let s_inv = s.inner().clone().try_inverse().unwrap();
        let conj = |d: &[f64]| {
            let dm = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, d.iter().map(|&x| c(x))));
            Matrix::from_inner(s.inner() * dm * &s_inv)
        };
        let shared = close(
            &[conj(&[1.0, 2.0, 3.0]), conj(&[0.0, -1.0, 4.0])],
            AlgebraKind::LinearSpan,
            &tol,
        )
        .unwrap();
        assert!(motzkin_taussky_check(&shared, &tol, 0).unwrap());
    }
}
