//! Bijective matching of eigenvalue multisets.

use super::C64;

/// A bijection `a[i] <-> b[assignment[i]]` and its worst pair distance.
#[derive(Clone, Debug, PartialEq)]
pub struct MultisetMatch {
    pub assignment: Vec<usize>,
    pub max_residual: f64,
}

/// Matches two equally sized multisets of points.
///
/// Greedy nearest-neighbour first; when its worst residual exceeds `tol` the
/// optimal assignment (Hungarian, sum of distances) is computed and the better
/// of the two, by worst residual, is returned. `None` when the sizes differ.
pub fn match_multisets(a: &[C64], b: &[C64], tol: f64) -> Option<MultisetMatch> {
    if a.len() != b.len() {
        return None;
    }
    if a.is_empty() {
        return Some(MultisetMatch {
            assignment: vec![],
            max_residual: 0.0,
        });
    }
    let greedy = greedy_match(a, b);
    if greedy.max_residual <= tol {
        return Some(greedy);
    }
    let cost: Vec<Vec<f64>> = a.iter().map(|&x| b.iter().map(|&y| (x - y).norm()).collect()).collect();
    let assignment = hungarian(&cost);
    let max_residual = worst(a, b, &assignment);
    let optimal = MultisetMatch {
        assignment,
        max_residual,
    };
    if optimal.max_residual < greedy.max_residual {
        Some(optimal)
    } else {
        Some(greedy)
    }
}

fn worst(a: &[C64], b: &[C64], assignment: &[usize]) -> f64 {
    a.iter()
        .zip(assignment)
        .map(|(&x, &j)| (x - b[j]).norm())
        .fold(0.0, f64::max)
}

fn greedy_match(a: &[C64], b: &[C64]) -> MultisetMatch {
    let mut used = vec![false; b.len()];
    let mut assignment = Vec::with_capacity(a.len());
    for &x in a {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, &y) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (x - y).norm();
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        used[best] = true;
        assignment.push(best);
    }
    let max_residual = worst(a, b, &assignment);
    MultisetMatch {
        assignment,
        max_residual,
    }
}

/// Minimum-cost perfect assignment for a square cost table (Kuhn-Munkres with
/// potentials, O(n^3)). Returns `row -> column`.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return vec![];
    }
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    // p[j] = row (1-based) currently assigned to column j; p[0] is scratch.
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[p[j] - 1] = j - 1;
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_min(cost: &[Vec<f64>]) -> f64 {
        fn rec(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
            if row == cost.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..cost.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(cost[row][j] + rec(cost, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        rec(cost, 0, &mut vec![false; cost.len()])
    }

    #[test]
    fn hungarian_agrees_with_enumeration() {
        let cost = vec![
            vec![4.0, 1.0, 3.0, 2.5],
            vec![2.0, 0.0, 5.0, 1.0],
            vec![3.0, 2.0, 2.0, 7.0],
            vec![1.5, 6.0, 0.5, 3.0],
        ];
        let a = hungarian(&cost);
        let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert!((total - brute_force_min(&cost)).abs() < 1e-12);
        let mut cols = a.clone();
        cols.sort_unstable();
        assert_eq!(cols, vec![0, 1, 2, 3]);
    }

    #[test]
    fn greedy_failure_triggers_fallback() {
        // Greedy pairs 1.0 with 0.6 first and strands 0.0 against 1.5.
        let a = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let b = [C64::new(0.6, 0.0), C64::new(1.5, 0.0)];
        let m = match_multisets(&a, &b, 1e-9).unwrap();
        // optimal pairing: 1.0<->1.5 (0.5) and 0.0<->0.6 (0.6)
        assert!((m.max_residual - 0.6).abs() < 1e-12);
    }

    #[test]
    fn size_mismatch_is_none() {
        assert!(match_multisets(&[C64::new(0.0, 0.0)], &[], 1.0).is_none());
    }
}
