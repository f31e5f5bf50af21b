use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};

/// Mixed absolute/relative tolerance.
///
/// For a quantity derived from matrices `M_1..M_k` the effective tolerance is
/// `atol + rtol * max_i ||M_i||_F`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Tolerance {
    pub const DEFAULT_ATOL: f64 = 1e-9;
    pub const DEFAULT_RTOL: f64 = 1e-9;

    pub fn new(atol: f64, rtol: f64) -> Result<Self> {
        let ok = atol.is_finite() && rtol.is_finite() && atol >= 0.0 && rtol >= 0.0;
        if !ok || (atol == 0.0 && rtol == 0.0) {
            return Err(Error::InvalidTolerance { atol, rtol });
        }
        Ok(Self { atol, rtol })
    }

    /// `atol + rtol * scale`.
    pub fn effective(&self, scale: f64) -> f64 {
        self.atol + self.rtol * scale
    }

    pub fn for_matrices<'a>(&self, ms: impl IntoIterator<Item = &'a Matrix>) -> f64 {
        let scale = ms.into_iter().map(Matrix::norm_fro).fold(0.0, f64::max);
        self.effective(scale)
    }

    /// `atol + rtol`, used where a bound is multiplied by an explicit norm power.
    pub fn combined(&self) -> f64 {
        self.atol + self.rtol
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            atol: Self::DEFAULT_ATOL,
            rtol: Self::DEFAULT_RTOL,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_tolerances() {
        assert!(Tolerance::new(0.0, 0.0).is_err());
        assert!(Tolerance::new(-1.0, 1e-9).is_err());
        assert!(Tolerance::new(f64::NAN, 1e-9).is_err());
        assert!(Tolerance::new(0.0, 1e-9).is_ok());
    }

    #[test]
    fn effective_uses_largest_norm() {
        let tol = Tolerance::default();
        let a = Matrix::identity(4);
        let b = Matrix::zeros(4);
        assert!((tol.for_matrices([&a, &b]) - (1e-9 + 1e-9 * 2.0)).abs() < 1e-20);
    }
}
