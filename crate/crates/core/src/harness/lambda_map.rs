use std::io::Write;

use crate::error::{Error, Result};
use crate::numat::{spectral_radius, Matrix, Tolerance, C64};

/// Axis-aligned rectangle of `lambda` values sampled on an `nx` by `ny`
/// lattice that includes the corners.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn square(half_width: f64, resolution: usize) -> Self {
        Self {
            re: [-half_width, half_width],
            im: [-half_width, half_width],
            nx: resolution,
            ny: resolution,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.re.iter().chain(&self.im).all(|x| x.is_finite());
        if !finite || self.re[0] > self.re[1] || self.im[0] > self.im[1] || self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidConfig(format!("invalid grid {self:?}")));
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, k: usize, i: usize) -> f64 {
        if k == 1 {
            (lo + hi) / 2.0
        } else {
            lo + (hi - lo) * i as f64 / (k - 1) as f64
        }
    }

    /// Points in row-major order: imaginary part outer, real part inner.
    pub fn points(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for j in 0..self.ny {
            let y = Self::axis(self.im[0], self.im[1], self.ny, j);
            for i in 0..self.nx {
                out.push(C64::new(Self::axis(self.re[0], self.re[1], self.nx, i), y));
            }
        }
        out
    }
}

/// `(Re lambda, Im lambda, r(A + lambda T))` over the grid.
pub fn lambda_map(a: &Matrix, t: &Matrix, grid: &Grid, tol: &Tolerance) -> Result<Vec<[f64; 3]>> {
    a.check_same_dim(t)?;
    grid.validate()?;
    grid.points()
        .into_iter()
        .map(|l| Ok([l.re, l.im, spectral_radius(&a.add_scaled(l, t), tol)?]))
        .collect()
}

/// CSV with header `re,im,spectral_radius`.
pub fn write_lambda_csv<W: Write>(rows: &[[f64; 3]], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidConfig(format!("csv output failed: {e}"));
    w.write_record(["re", "im", "spectral_radius"]).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidConfig(format!("csv output failed: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::t_stable_example;

    #[test]
    fn t_stable_example_is_flat() {
        let (a, b) = t_stable_example();
        let tol = Tolerance::default();
        let rows = lambda_map(&a, &b, &Grid::square(2.0, 41), &tol).unwrap();
        assert_eq!(rows.len(), 41 * 41);
        assert!(rows.iter().all(|r| (r[2] - 1.0).abs() < 1e-6));
    }

    #[test]
    fn radial_growth() {
        let tol = Tolerance::default();
        let t = Matrix::from_diagonal(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let rows = lambda_map(&Matrix::zeros(2), &t, &Grid::square(1.0, 5), &tol).unwrap();
        for r in &rows {
            assert!((r[2] - r[0].hypot(r[1])).abs() < 1e-12);
        }
        let mut buf = Vec::new();
        write_lambda_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("re,im,spectral_radius\n"));
        assert_eq!(text.lines().count(), 26);
    }
}
