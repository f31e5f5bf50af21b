//! The two worked 3x3 examples that anchor the test corpus.

use crate::numat::Matrix;

/// Irreducible pair whose linear span consists of nilpotent matrices.
pub fn nilpotent_span_example() -> (Matrix, Matrix) {
    let a = Matrix::from_real_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, -1.0], [0.0, 0.0, 0.0]]).expect("valid matrix");
    let b = Matrix::from_real_rows(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).expect("valid matrix");
    (a, b)
}

/// Pair `(A, B)` with `B^3 = 0` and `sigma(A + lambda B) = sigma(A) = {-1, 0}`
/// for every `lambda`.
pub fn t_stable_example() -> (Matrix, Matrix) {
    let a = Matrix::from_real_rows(&[[-1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]).expect("valid matrix");
    let b = Matrix::from_real_rows(&[[0.0, -1.0, -1.0], [0.0, -1.0, -1.0], [1.0, 0.0, 1.0]]).expect("valid matrix");
    (a, b)
}
