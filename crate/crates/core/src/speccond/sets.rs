use super::{Condition, ConditionReport, PointSet, ProbeSet, Verdict, Witness};
use crate::error::{Error, Result};
use crate::numat::matching::match_multisets;
use crate::numat::{Matrix, Tolerance, C64};

/// `sigma(A + B)` equals the sumset `sigma(A) + sigma(B)` as sets.
pub fn subadditive(a: &Matrix, b: &Matrix, tol: &Tolerance) -> Result<ConditionReport> {
    a.check_same_dim(b)?;
    let pa = PointSet::of(a, tol)?;
    let pb = PointSet::of(b, tol)?;
    let pab = PointSet::of(&(a + b), tol)?;
    let sum = pa.sumset(&pb, C64::new(1.0, 0.0));
    let cond = Condition::Subadditive;
    if let Some((z, d)) = pab.first_outside(&sum) {
        let w = witness(None, z, d, "eigenvalue of A+B outside sigma(A)+sigma(B)");
        return Ok(ConditionReport::failed(cond, w, tol));
    }
    if let Some((z, d)) = sum.first_outside(&pab) {
        let w = witness(None, z, d, "point of sigma(A)+sigma(B) not attained by A+B");
        return Ok(ConditionReport::failed(cond, w, tol));
    }
    Ok(ConditionReport::new(cond, Verdict::Holds, tol))
}

/// `sigma(A + lambda B)` is contained in `sigma(A) + lambda sigma(B)` at every probe.
pub fn sublinear(a: &Matrix, b: &Matrix, probes: &ProbeSet, tol: &Tolerance) -> Result<ConditionReport> {
    a.check_same_dim(b)?;
    let pa = PointSet::of(a, tol)?;
    let pb = PointSet::of(b, tol)?;
    let cond = Condition::Sublinear;
    for &lambda in probes.lambdas() {
        let pl = PointSet::of(&a.add_scaled(lambda, b), tol)?;
        if let Some((z, d)) = pl.first_outside(&pa.sumset(&pb, lambda)) {
            let w = witness(
                Some(lambda),
                z,
                d,
                "eigenvalue of A+lambda B outside sigma(A)+lambda sigma(B)",
            );
            return Ok(ConditionReport::failed(cond, w, tol).with_probes(probes.lambdas()));
        }
    }
    Ok(ConditionReport::new(cond, Verdict::HoldsAtProbes, tol).with_probes(probes.lambdas()))
}

/// `sigma(AB)` is contained in the product set `sigma(A) sigma(B)`.
pub fn submultiplicative(a: &Matrix, b: &Matrix, tol: &Tolerance) -> Result<ConditionReport> {
    a.check_same_dim(b)?;
    let pa = PointSet::of(a, tol)?;
    let pb = PointSet::of(b, tol)?;
    let pab = PointSet::of(&(a * b), tol)?;
    let cond = Condition::Submultiplicative;
    if let Some((z, d)) = pab.first_outside(&pa.product_set(&pb)) {
        let w = witness(None, z, d, "eigenvalue of AB outside sigma(A) sigma(B)");
        return Ok(ConditionReport::failed(cond, w, tol));
    }
    Ok(ConditionReport::new(cond, Verdict::Holds, tol))
}

fn witness(lambda: Option<C64>, eigenvalue: C64, distance: f64, note: &str) -> Witness {
    Witness {
        lambda,
        eigenvalue,
        distance,
        note: note.to_owned(),
    }
}

/// Probe values used to prune candidate pairings. Chosen away from the grid,
/// the real and imaginary axes and from each other's rational multiples.
const GENERIC_PROBES: [C64; 2] = [C64::new(0.7236, 0.3141), C64::new(-0.4123, 0.9281)];

const NODE_CAP: usize = 200_000;

struct Entry {
    z: C64,
    radius: f64,
    class: usize,
}

fn entries(p: &PointSet) -> Vec<Entry> {
    p.points
        .iter()
        .enumerate()
        .flat_map(|(class, pt)| {
            (0..pt.mult).map(move |_| Entry {
                z: pt.z,
                radius: pt.radius,
                class,
            })
        })
        .collect()
}

struct Search<'a> {
    alphas: &'a [Entry],
    betas: &'a [Entry],
    feasible: Vec<Vec<bool>>,
    spectra: &'a [(C64, PointSet)],
    assignment: Vec<usize>,
    used: Vec<bool>,
    nodes: usize,
    solutions: Vec<Vec<usize>>,
    last_failure: Option<Witness>,
}

impl Search<'_> {
    fn run(&mut self, i: usize) -> Result<()> {
        if self.solutions.len() >= 2 {
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > NODE_CAP {
            return Err(Error::PairingSearchExhausted { nodes: NODE_CAP });
        }
        let n = self.alphas.len();
        if i == n {
            match self.verify() {
                None => self.solutions.push(self.assignment.clone()),
                Some(w) => self.last_failure = Some(w),
            }
            return Ok(());
        }
        for j in 0..n {
            if self.used[j] || !self.feasible[i][j] {
                continue;
            }
            // identical betas are interchangeable: try the lowest unused one
            let class = self.betas[j].class;
            if (0..j).any(|k| !self.used[k] && self.betas[k].class == class) {
                continue;
            }
            // identical alphas are interchangeable: keep their betas ordered
            if i > 0
                && self.alphas[i - 1].class == self.alphas[i].class
                && self.betas[self.assignment[i - 1]].class > class
            {
                continue;
            }
            self.used[j] = true;
            self.assignment.push(j);
            self.run(i + 1)?;
            self.assignment.pop();
            self.used[j] = false;
            if self.solutions.len() >= 2 {
                break;
            }
        }
        Ok(())
    }

    /// `None` when the assignment reproduces every probed spectrum.
    fn verify(&self) -> Option<Witness> {
        for (lambda, actual) in self.spectra {
            let lambda = *lambda;
            let mut allowed = 0.0f64;
            let predicted: Vec<C64> = self
                .assignment
                .iter()
                .enumerate()
                .map(|(i, &j)| {
                    let (a, b) = (&self.alphas[i], &self.betas[j]);
                    allowed = allowed.max(a.radius + lambda.norm() * b.radius);
                    a.z + lambda * b.z
                })
                .collect();
            let allowed = allowed + actual.max_radius();
            let values = actual.values();
            let m = match_multisets(&values, &predicted, allowed)?;
            if m.max_residual > allowed {
                let (k, d) = values
                    .iter()
                    .zip(&m.assignment)
                    .map(|(&z, &p)| (z - predicted[p]).norm())
                    .enumerate()
                    .fold((0, 0.0), |best, (k, d)| if d > best.1 { (k, d) } else { best });
                return Some(witness(
                    Some(lambda),
                    values[k],
                    d,
                    "pairing does not reproduce sigma(A + lambda B)",
                ));
            }
        }
        None
    }
}

/// Searches for an ordering `alpha_i`, `beta_i` of the spectra of `A` and `B`
/// with `sigma(A + lambda B) = {alpha_i + lambda beta_i}` at every probe.
///
/// Candidate pairings are pruned with two generic values of `lambda`; the
/// first pairing in canonical order that also reproduces every probe is
/// returned. A second distinct pairing sets the `ambiguous` flag.
pub fn property_l(a: &Matrix, b: &Matrix, probes: &ProbeSet, tol: &Tolerance) -> Result<ConditionReport> {
    a.check_same_dim(b)?;
    let cond = Condition::PropertyL;
    let pa = PointSet::of(a, tol)?;
    let pb = PointSet::of(b, tol)?;
    let alphas = entries(&pa);
    let betas = entries(&pb);
    let mut spectra = Vec::new();
    for &lambda in GENERIC_PROBES.iter().chain(probes.lambdas()) {
        spectra.push((lambda, PointSet::of(&a.add_scaled(lambda, b), tol)?));
    }
    let n = alphas.len();
    let feasible: Vec<Vec<bool>> = alphas
        .iter()
        .map(|x| {
            betas
                .iter()
                .map(|y| {
                    spectra[..GENERIC_PROBES.len()].iter().all(|(lambda, p)| {
                        let z = x.z + lambda * y.z;
                        let r = x.radius + lambda.norm() * y.radius;
                        p.points.iter().any(|q| (z - q.z).norm() <= r + q.radius)
                    })
                })
                .collect()
        })
        .collect();
    let mut search = Search {
        alphas: &alphas,
        betas: &betas,
        feasible,
        spectra: &spectra,
        assignment: Vec::with_capacity(n),
        used: vec![false; n],
        nodes: 0,
        solutions: Vec::new(),
        last_failure: None,
    };
    let outcome = search.run(0);
    let found = search.solutions.first().cloned();
    match (outcome, found) {
        (_, Some(assignment)) => {
            let mut report = ConditionReport::new(cond, Verdict::HoldsAtProbes, tol).with_probes(probes.lambdas());
            report.pairing = Some(
                assignment
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| [alphas[i].z, betas[j].z])
                    .collect(),
            );
            report.ambiguous = search.solutions.len() > 1;
            Ok(report)
        }
        (Err(e), None) => Err(e),
        (Ok(()), None) => {
            let w = search.last_failure.take().unwrap_or_else(|| {
                let (lambda, p) = &spectra[0];
                let (z, d) = p
                    .first_outside(&pa.sumset(&pb, *lambda))
                    .unwrap_or((p.points[0].z, 0.0));
                witness(Some(*lambda), z, d, "no bijective pairing of sigma(A) and sigma(B)")
            });
            Ok(ConditionReport::failed(cond, w, tol).with_probes(probes.lambdas()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::nilpotent_span_example;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag(values: &[f64]) -> Matrix {
        Matrix::from_diagonal(&values.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
    }

    fn flip() -> Matrix {
        &Matrix::unit(2, 0, 1) + &Matrix::unit(2, 1, 0)
    }

    #[test]
    fn subadditive_examples() {
        let tol = Tolerance::default();
        let z = Matrix::zeros(2);
        assert_eq!(subadditive(&z, &z, &tol).unwrap().verdict, Verdict::Holds);
        let r = subadditive(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(r.witness.is_some());
        let n1 = Matrix::unit(3, 0, 1);
        let n2 = Matrix::unit(3, 1, 2);
        assert_eq!(subadditive(&n1, &n2, &tol).unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn sublinear_examples() {
        let tol = Tolerance::default();
        let probes = ProbeSet::default();
        let a = diag(&[1.0, -1.0]);
        let r = sublinear(&a, &Matrix::zeros(2), &probes, &tol).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsAtProbes);
        let (a12, b12) = nilpotent_span_example();
        let r = sublinear(&a12, &b12, &probes, &tol).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsAtProbes);
        let one = ProbeSet::new(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let r = sublinear(&a, &flip(), &one, &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        let w = r.witness.unwrap();
        assert_eq!(w.lambda, Some(c(1.0, 0.0)));
        assert!((w.eigenvalue.norm() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn submultiplicative_examples() {
        let tol = Tolerance::default();
        let b = diag(&[2.0, 3.0]);
        assert!(submultiplicative(&Matrix::identity(2), &flip(), &tol).unwrap().passed());
        assert_eq!(submultiplicative(&b, &b, &tol).unwrap().verdict, Verdict::Holds);
        let r = submultiplicative(&Matrix::unit(2, 0, 1), &Matrix::unit(2, 1, 0), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!((r.witness.unwrap().eigenvalue - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn property_l_examples() {
        let tol = Tolerance::default();
        let probes = ProbeSet::default();
        let a = diag(&[1.0, 2.0, 3.0]);
        let b = diag(&[5.0, -1.0, 0.5]);
        let r = property_l(&a, &b, &probes, &tol).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsAtProbes);
        let pairing = r.pairing.unwrap();
        assert!(pairing.contains(&[c(1.0, 0.0), c(5.0, 0.0)]));
        assert!(pairing.contains(&[c(3.0, 0.0), c(0.5, 0.0)]));
        assert!(!r.ambiguous);

        let ut = Matrix::from_real_rows(&[[1.0, 4.0, -2.0], [0.0, -1.0, 3.0], [0.0, 0.0, 2.0]]).unwrap();
        let vt = Matrix::from_real_rows(&[[0.5, 1.0, 1.0], [0.0, 2.0, -7.0], [0.0, 0.0, -3.0]]).unwrap();
        let r = property_l(&ut, &vt, &probes, &tol).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsAtProbes);
        assert!(r.pairing.unwrap().contains(&[c(-1.0, 0.0), c(2.0, 0.0)]));

        let r = property_l(&diag(&[1.0, -1.0]), &flip(), &probes, &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(r.witness.is_some());
    }

    #[test]
    fn repeated_eigenvalues_are_not_ambiguous() {
        let tol = Tolerance::default();
        let r = property_l(&Matrix::zeros(3), &diag(&[1.0, 2.0, 2.0]), &ProbeSet::default(), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsAtProbes);
        assert!(!r.ambiguous);
    }
}
