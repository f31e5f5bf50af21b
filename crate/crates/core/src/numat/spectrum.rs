use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::matching::match_multisets;
use super::schur::schur;
use super::{Matrix, Tolerance, C64};
use crate::error::Result;

/// Eigenvalues repeated by algebraic multiplicity, in canonical order
/// (lexicographic by real then imaginary part).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<C64>,
}

pub(crate) fn canonical_cmp(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn normalize_zero(z: C64) -> C64 {
    // maps -0.0 to +0.0 so that ordering does not depend on the sign of zero
    C64::new(z.re + 0.0, z.im + 0.0)
}

impl Spectrum {
    pub fn from_values(mut eigenvalues: Vec<C64>) -> Self {
        for z in &mut eigenvalues {
            *z = normalize_zero(*z);
        }
        eigenvalues.sort_by(canonical_cmp);
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.eigenvalues.iter()
    }

    pub fn radius(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn sum(&self) -> C64 {
        self.eigenvalues.iter().sum()
    }

    /// Distance from `z` to the nearest eigenvalue.
    pub fn distance_to(&self, z: C64) -> f64 {
        self.eigenvalues
            .iter()
            .map(|&e| (e - z).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Distinct values with multiplicities; values within `tol` of an earlier
    /// representative are merged into it.
    pub fn distinct(&self, tol: f64) -> Vec<(C64, usize)> {
        let mut out: Vec<(C64, usize)> = Vec::new();
        for &z in &self.eigenvalues {
            match out.iter_mut().find(|(r, _)| (*r - z).norm() <= tol) {
                Some(entry) => entry.1 += 1,
                None => out.push((z, 1)),
            }
        }
        out
    }

    /// Worst pair distance of the best bijective matching, or `None` when the
    /// lengths differ.
    pub fn multiset_distance(&self, other: &Spectrum, tol: f64) -> Option<f64> {
        match_multisets(&self.eigenvalues, &other.eigenvalues, tol).map(|m| m.max_residual)
    }

    pub fn multiset_eq(&self, other: &Spectrum, tol: f64) -> bool {
        self.multiset_distance(other, tol).is_some_and(|d| d <= tol)
    }
}

/// A group of computed eigenvalues that are treated as one perturbed
/// multiple eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub members: Vec<usize>,
    pub centroid: C64,
}

/// Perturbation radius for a cluster of multiplicity `k`.
///
/// A backward error `delta` moves a defective eigenvalue of multiplicity `k`
/// by up to about `delta^(1/k) * scale^(1 - 1/k)`.
pub(crate) fn cluster_radius(k: usize, delta: f64, scale: f64) -> f64 {
    if k <= 1 || scale <= delta {
        return delta;
    }
    let kf = k as f64;
    delta.powf(1.0 / kf) * scale.powf(1.0 - 1.0 / kf)
}

/// Groups raw eigenvalues into clusters, largest admissible cluster first.
///
/// A set of `k` values is a cluster when all of them lie within
/// `cluster_radius(k, ..)` of their centroid. Candidates are the `k` nearest
/// neighbours of each unassigned value, scanned in index order, so the result
/// is deterministic.
pub fn cluster_eigenvalues(values: &[C64], delta: f64, scale: f64) -> Vec<Cluster> {
    let n = values.len();
    let mut assigned = vec![false; n];
    let mut clusters = Vec::new();
    loop {
        let free: Vec<usize> = (0..n).filter(|&i| !assigned[i]).collect();
        if free.is_empty() {
            break;
        }
        let mut found: Option<Cluster> = None;
        'sizes: for k in (2..=free.len()).rev() {
            let radius = cluster_radius(k, delta, scale);
            for &i in &free {
                let mut near = free.clone();
                near.sort_by(|&a, &b| {
                    let da = (values[a] - values[i]).norm();
                    let db = (values[b] - values[i]).norm();
                    da.total_cmp(&db).then(a.cmp(&b))
                });
                near.truncate(k);
                // quick reject: the farthest neighbour must be within 2 radii
                if (values[near[k - 1]] - values[i]).norm() > 2.0 * radius {
                    continue;
                }
                let centroid = near.iter().map(|&j| values[j]).sum::<C64>() / k as f64;
                if near.iter().all(|&j| (values[j] - centroid).norm() <= radius) {
                    near.sort_unstable();
                    found = Some(Cluster {
                        members: near,
                        centroid,
                    });
                    break 'sizes;
                }
            }
        }
        let cluster = found.unwrap_or_else(|| Cluster {
            members: vec![free[0]],
            centroid: values[free[0]],
        });
        for &j in &cluster.members {
            assigned[j] = true;
        }
        clusters.push(cluster);
    }
    clusters
}

/// Replaces every cluster by its centroid repeated with the cluster's
/// multiplicity. The sum of the values is unchanged.
pub(crate) fn polish(values: &[C64], delta: f64, scale: f64) -> Vec<C64> {
    let mut out = values.to_vec();
    for cluster in cluster_eigenvalues(values, delta, scale) {
        for &j in &cluster.members {
            out[j] = cluster.centroid;
        }
    }
    out
}

/// All eigenvalues of `m` with algebraic multiplicity.
///
/// Raw eigenvalues come from the complex Schur form. Computed eigenvalues of a
/// defective eigenvalue of multiplicity `k` scatter on a circle of radius
/// about `eps^(1/k)`, while their mean stays accurate to working precision;
/// clusters are therefore replaced by their centroids (see
/// [`cluster_eigenvalues`]).
pub fn spectrum(m: &Matrix, tol: &Tolerance) -> Result<Spectrum> {
    let raw = schur(m.inner())?.diagonal();
    let scale = m.norm_fro();
    let delta = tol.effective(scale);
    Ok(Spectrum::from_values(polish(&raw, delta, scale)))
}

pub fn spectral_radius(m: &Matrix, tol: &Tolerance) -> Result<f64> {
    Ok(spectrum(m, tol)?.radius())
}
