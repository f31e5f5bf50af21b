use super::{Condition, ConditionReport, PointSet, ProbeSet, Verdict, Witness};
use crate::error::{Error, Result};
use crate::numat::{char_poly, is_nilpotent, resolvent_apply, solve, spectrum, Matrix, Tolerance, C64};

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact test of `r(A + lambda T) <= r(A)` for every complex `lambda`.
///
/// In finite dimension the condition is equivalent to the characteristic
/// polynomial of `A + lambda T` not depending on `lambda`. Each coefficient of
/// `t^(n-j)` is a polynomial of degree at most `j` in `lambda`, so sampling at
/// `N = max(n + 1, 8)` roots of unity and taking a discrete Fourier transform
/// recovers it exactly. The nodes sit on the circle of radius
/// `max(||A||_F, 1) / ||T||_F`, which makes the test invariant under
/// `T -> cT` and keeps `lambda T` on the scale of `A`. Coefficient `j` is
/// declared constant when every nonconstant term is below
/// `rtol * C(n, j) * s^j + atol` with `s = 2 max(||A||_F, 1)`.
pub fn t_stable_exact(a: &Matrix, t: &Matrix, tol: &Tolerance) -> Result<ConditionReport> {
    a.check_same_dim(t)?;
    let cond = Condition::TStable;
    let n = a.dim();
    let norm_t = t.norm_fro();
    if norm_t == 0.0 {
        let mut report = ConditionReport::new(cond, Verdict::Holds, tol);
        report.coefficients = Some(char_poly(a)?.coefficients);
        return Ok(report);
    }
    let scale_a = a.norm_fro().max(1.0);
    let radius = scale_a / norm_t;
    let nodes = (n + 1).max(8);
    let omega = |k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / nodes as f64);
    let lambdas: Vec<C64> = (0..nodes).map(|k| omega(k) * radius).collect();
    let samples: Vec<Vec<C64>> = lambdas
        .iter()
        .map(|&l| char_poly(&a.add_scaled(l, t)).map(|p| p.coefficients))
        .collect::<Result<_>>()?;

    // terms[j][d] = (coefficient of lambda^d in c_j) * radius^d
    let mut terms = vec![vec![C64::new(0.0, 0.0); nodes]; n + 1];
    for (j, row) in terms.iter_mut().enumerate() {
        for (d, term) in row.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (k, sample) in samples.iter().enumerate() {
                acc += sample[j] * omega((k * d) % nodes).conj();
            }
            *term = acc / nodes as f64;
        }
    }
    let s = 2.0 * scale_a;
    let bounds: Vec<f64> = (0..=n)
        .map(|j| tol.rtol * binomial(n, j) * s.powi(j as i32) + tol.atol)
        .collect();

    // reconstruction at an off-node point guards against ill-conditioning
    let probe = C64::from_polar(0.5, 0.37);
    let direct = char_poly(&a.add_scaled(probe * radius, t))?.coefficients;
    for j in 0..=n {
        let predicted: C64 = terms[j]
            .iter()
            .enumerate()
            .map(|(d, &c)| c * probe.powu(d as u32))
            .sum();
        let error = (predicted - direct[j]).norm();
        if error > bounds[j] {
            return Err(Error::InterpolationIllConditioned {
                error,
                bound: bounds[j],
            });
        }
    }

    let mut worst: Option<(usize, f64)> = None;
    for j in 1..=n {
        let excess = terms[j][1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
        if excess > bounds[j] && worst.is_none_or(|(_, w)| excess / bounds[j] > w) {
            worst = Some((j, excess / bounds[j]));
        }
    }
    let constant: Vec<C64> = terms.iter().map(|row| row[0]).collect();
    let Some((j, _)) = worst else {
        let mut report = ConditionReport::new(cond, Verdict::Holds, tol);
        report.coefficients = Some(constant);
        return Ok(report);
    };

    // witness: the node where coefficient j strays furthest, and the
    // eigenvalue of A + lambda T furthest from sigma(A) there
    let k = (0..nodes)
        .max_by(|&x, &y| {
            let dx = (samples[x][j] - constant[j]).norm();
            let dy = (samples[y][j] - constant[j]).norm();
            dx.total_cmp(&dy)
        })
        .unwrap_or(0);
    let sigma_a = spectrum(a, tol)?;
    let at = spectrum(&a.add_scaled(lambdas[k], t), tol)?;
    let (eigenvalue, distance) = at
        .iter()
        .map(|&z| (z, sigma_a.distance_to(z)))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap_or((C64::new(0.0, 0.0), 0.0));
    let witness = Witness {
        lambda: Some(lambdas[k]),
        eigenvalue,
        distance,
        note: format!("coefficient of t^{} depends on lambda", n - j),
    };
    let mut report = ConditionReport::failed(cond, witness, tol);
    report.coefficients = Some(constant);
    Ok(report)
}

/// `r(A + lambda T) <= r(A)` checked directly at every probe.
pub fn t_stable_sampled(a: &Matrix, t: &Matrix, probes: &ProbeSet, tol: &Tolerance) -> Result<ConditionReport> {
    a.check_same_dim(t)?;
    let cond = Condition::TStableSampled;
    let (_, upper) = PointSet::of(a, tol)?.radius_bounds();
    for &lambda in probes.lambdas() {
        let pl = PointSet::of(&a.add_scaled(lambda, t), tol)?;
        let (lower, _) = pl.radius_bounds();
        if lower > upper {
            let top = pl
                .points
                .iter()
                .max_by(|x, y| x.z.norm().total_cmp(&y.z.norm()))
                .map(|p| p.z)
                .unwrap_or_default();
            let witness = Witness {
                lambda: Some(lambda),
                eigenvalue: top,
                distance: lower - upper,
                note: "r(A + lambda T) exceeds r(A)".into(),
            };
            return Ok(ConditionReport::failed(cond, witness, tol).with_probes(probes.lambdas()));
        }
    }
    Ok(ConditionReport::new(cond, Verdict::HoldsAtProbes, tol).with_probes(probes.lambdas()))
}

/// Returns whether `T` is nilpotent, after confirming that `A` has
/// `T`-stable spectrum.
pub fn stable_implies_nilpotent_check(a: &Matrix, t: &Matrix, tol: &Tolerance) -> Result<bool> {
    let report = t_stable_exact(a, t, tol)?;
    if report.verdict != Verdict::Holds {
        return Err(Error::Precondition("A does not have T-stable spectrum".into()));
    }
    is_nilpotent(t, tol)
}

/// Eight points on the circle of radius `1 + 2 ||A||_F`, rotated off the axes.
pub fn resolvent_probes(a: &Matrix) -> Vec<C64> {
    let r = 1.0 + 2.0 * a.norm_fro();
    (0..8)
        .map(|k| C64::from_polar(r, std::f64::consts::PI * (2.0 * k as f64 + 0.5) / 8.0))
        .collect()
}

/// `(mu I - A)^{-1} T` is nilpotent at every probe `mu`.
pub fn resolvent_nilpotency_check(
    a: &Matrix,
    t: &Matrix,
    probes_mu: &[C64],
    tol: &Tolerance,
) -> Result<ConditionReport> {
    a.check_same_dim(t)?;
    if probes_mu.is_empty() {
        return Err(Error::InvalidProbes("no resolvent probes".into()));
    }
    let cond = Condition::ResolventNilpotency;
    for &mu in probes_mu {
        let r = resolvent_apply(a, mu, t, tol)?;
        if !is_nilpotent(&r, tol)? {
            let sigma = spectrum(&r, tol)?;
            let top = sigma
                .iter()
                .copied()
                .max_by(|x, y| x.norm().total_cmp(&y.norm()))
                .unwrap_or_default();
            let witness = Witness {
                lambda: Some(mu),
                eigenvalue: top,
                distance: top.norm(),
                note: "(mu - A)^-1 T is not nilpotent".into(),
            };
            return Ok(ConditionReport::failed(cond, witness, tol).with_probes(probes_mu));
        }
    }
    Ok(ConditionReport::new(cond, Verdict::HoldsAtProbes, tol).with_probes(probes_mu))
}

/// `sigma((I - nu T)^{-1} A) = sigma(A)` as multisets at every probe `nu`.
pub fn perturbed_inverse_spectrum_check(
    a: &Matrix,
    t: &Matrix,
    probes_nu: &[C64],
    tol: &Tolerance,
) -> Result<ConditionReport> {
    a.check_same_dim(t)?;
    let cond = Condition::PerturbedInverseSpectrum;
    let n = a.dim();
    let pa = PointSet::of(a, tol)?;
    let base = pa.values();
    for &nu in probes_nu {
        let shifted = Matrix::identity(n).add_scaled(-nu, t);
        let x = solve(&shifted, a, "I - nu T")?;
        let px = PointSet::of(&x, tol)?;
        let bad = !px.multiset_matches(&pa);
        let values = px.values();
        if bad {
            let (eigenvalue, distance) = values
                .iter()
                .map(|&z| (z, base.iter().map(|&w| (z - w).norm()).fold(f64::INFINITY, f64::min)))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap_or_default();
            let witness = Witness {
                lambda: Some(nu),
                eigenvalue,
                distance,
                note: "sigma((I - nu T)^-1 A) differs from sigma(A)".into(),
            };
            return Ok(ConditionReport::failed(cond, witness, tol).with_probes(probes_nu));
        }
    }
    Ok(ConditionReport::new(cond, Verdict::HoldsAtProbes, tol).with_probes(probes_nu))
}
