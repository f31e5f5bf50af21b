use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Matrix, C64};
use crate::error::{Error, Result};

/// Monic characteristic polynomial `det(tI - M)`.
///
/// `coefficients[k]` multiplies `t^(n-k)`, so `coefficients[0] == 1` and
/// `coefficients[1] == -tr(M)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharPoly {
    pub coefficients: Vec<C64>,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, t: C64) -> C64 {
        self.coefficients.iter().fold(C64::new(0.0, 0.0), |acc, &c| acc * t + c)
    }

    /// Largest coefficient-wise distance to another polynomial of equal degree.
    pub fn max_distance(&self, other: &CharPoly) -> Option<f64> {
        if self.degree() != other.degree() {
            return None;
        }
        Some(
            self.coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }
}

/// Faddeev-LeVerrier recurrence:
/// `M_1 = I`, `c_{n-k} = -tr(A M_k) / k`, `M_{k+1} = A M_k + c_{n-k} I`.
pub fn char_poly(m: &Matrix) -> Result<CharPoly> {
    let n = m.dim();
    let a = m.inner();
    let mut coefficients = Vec::with_capacity(n + 1);
    coefficients.push(C64::new(1.0, 0.0));
    let mut mk = DMatrix::<C64>::identity(n, n);
    for k in 1..=n {
        let am = a * &mk;
        let c = -am.trace() / k as f64;
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::Overflow("characteristic polynomial"));
        }
        coefficients.push(c);
        mk = am;
        for i in 0..n {
            mk[(i, i)] += c;
        }
    }
    Ok(CharPoly { coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::t_stable_example;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// det(tI - M) by Laplace expansion along the first row, with polynomial
    /// entries in ascending-power order.
    fn cofactor_char_poly(m: &Matrix) -> Vec<C64> {
        type Poly = Vec<C64>;
        fn mul(p: &Poly, q: &Poly) -> Poly {
            let mut out = vec![c(0.0, 0.0); p.len() + q.len() - 1];
            for (i, a) in p.iter().enumerate() {
                for (j, b) in q.iter().enumerate() {
                    out[i + j] += a * b;
                }
            }
            out
        }
        fn add(p: &Poly, q: &Poly, sign: f64) -> Poly {
            let mut out = vec![c(0.0, 0.0); p.len().max(q.len())];
            for (i, a) in p.iter().enumerate() {
                out[i] += a;
            }
            for (i, b) in q.iter().enumerate() {
                out[i] += b * sign;
            }
            out
        }
        fn det(entries: &[Vec<Poly>]) -> Poly {
            let n = entries.len();
            if n == 1 {
                return entries[0][0].clone();
            }
            let mut acc = vec![c(0.0, 0.0)];
            for col in 0..n {
                let minor: Vec<Vec<Poly>> = entries[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != col)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = mul(&entries[0][col], &det(&minor));
                acc = add(&acc, &term, if col % 2 == 0 { 1.0 } else { -1.0 });
            }
            acc
        }
        let n = m.dim();
        let entries: Vec<Vec<Poly>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            vec![-m.get(i, j), c(1.0, 0.0)]
                        } else {
                            vec![-m.get(i, j)]
                        }
                    })
                    .collect()
            })
            .collect();
        let mut p = det(&entries);
        p.resize(n + 1, c(0.0, 0.0));
        p.reverse();
        p
    }

    fn assert_close(p: &CharPoly, expected: &[C64], tol: f64) {
        assert_eq!(p.coefficients.len(), expected.len());
        for (a, b) in p.coefficients.iter().zip(expected) {
            assert!((a - b).norm() <= tol, "{:?} vs {:?}", p.coefficients, expected);
        }
    }

    #[test]
    fn identity_2x2() {
        let p = char_poly(&Matrix::identity(2)).unwrap();
        assert_close(&p, &[c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)], 0.0);
    }

    #[test]
    fn t_stable_example_matches_cofactor_expansion() {
        let (a, b) = t_stable_example();
        // t^3 + t^2, frozen from the cofactor oracle
        let frozen = [c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let oracle = cofactor_char_poly(&a);
        for (x, y) in oracle.iter().zip(&frozen) {
            assert!((x - y).norm() < 1e-15);
        }
        assert_close(&char_poly(&a).unwrap(), &frozen, 1e-14);
        for lambda in [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)] {
            let m = a.add_scaled(lambda, &b);
            let oracle = cofactor_char_poly(&m);
            for (x, y) in oracle.iter().zip(&frozen) {
                assert!((x - y).norm() < 1e-12, "oracle at {lambda}: {oracle:?}");
            }
            assert_close(&char_poly(&m).unwrap(), &frozen, 1e-12);
        }
    }

    #[test]
    fn agrees_with_cofactor_oracle_on_dense_input() {
        let m = Matrix::from_rows(&[
            vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 1.0), c(2.0, 0.0)],
            vec![c(0.3, 0.0), c(0.0, -1.0), c(1.5, 0.5), c(0.0, 0.0)],
            vec![c(-1.0, 0.0), c(2.0, 2.0), c(0.0, 0.0), c(1.0, -1.0)],
            vec![c(0.0, 0.5), c(1.0, 0.0), c(-2.0, 0.0), c(0.25, 0.0)],
        ])
        .unwrap();
        let oracle = cofactor_char_poly(&m);
        assert_close(&char_poly(&m).unwrap(), &oracle, 1e-12);
    }

    #[test]
    fn trace_coefficient_and_monic() {
        let m = Matrix::from_real_rows(&[[2.0, 1.0], [0.0, 5.0]]).unwrap();
        let p = char_poly(&m).unwrap();
        assert_eq!(p.coefficients[0], c(1.0, 0.0));
        assert!((p.coefficients[1] + m.trace()).norm() < 1e-14);
        assert!(p.eval(c(2.0, 0.0)).norm() < 1e-12);
    }
}
