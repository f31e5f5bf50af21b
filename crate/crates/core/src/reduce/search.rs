use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{is_invariant, riesz_projection, Subspace, SubspaceChain};
use crate::closure::{close, complex_normal, random_element_with, AlgebraBasis, AlgebraKind};
use crate::error::{Error, Result};
use crate::numat::{common_dim, null_space, spectrum, Matrix, Tolerance, C64};

const RANDOM_ELEMENTS: usize = 4;
const RANDOM_VECTORS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotFoundReason {
    /// The unital algebra generated by the family is all of `M_n`.
    IrreducibleCertified,
    /// No candidate produced a proper invariant subspace.
    Undecided,
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(Subspace),
    NotFound(NotFoundReason),
}

impl SearchOutcome {
    pub fn subspace(&self) -> Option<&Subspace> {
        match self {
            SearchOutcome::Found(s) => Some(s),
            SearchOutcome::NotFound(_) => None,
        }
    }
}

/// Looks for a nontrivial common invariant subspace.
///
/// The unital associative algebra `A` generated by the family is computed
/// first; if it is all of `M_n` the family is irreducible. Otherwise candidate
/// vectors are tried in order (common kernel, eigenvectors of seeded random
/// elements, of the generators and of the basis, spectral subspaces, random
/// vectors) and the orbit `A v` of each is tested. The same search is run on
/// the adjoint family, whose invariant subspaces are the complements.
pub fn find_invariant_subspace(family: &[Matrix], tol: &Tolerance, seed: u64) -> Result<SearchOutcome> {
    let n = common_dim(family)?;
    if n == 1 {
        return Ok(SearchOutcome::NotFound(NotFoundReason::IrreducibleCertified));
    }
    let algebra = unital_closure(family, tol)?;
    if algebra.is_full() {
        return Ok(SearchOutcome::NotFound(NotFoundReason::IrreducibleCertified));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if let Some(s) = search(family, &algebra, tol, &mut rng)? {
        return Ok(SearchOutcome::Found(s));
    }
    let adjoints: Vec<Matrix> = family.iter().map(Matrix::adjoint).collect();
    let adj_algebra = unital_closure(&adjoints, tol)?;
    if let Some(s) = search(&adjoints, &adj_algebra, tol, &mut rng)? {
        if let Some(c) = s.complement() {
            if is_invariant(&c, family, tol) {
                return Ok(SearchOutcome::Found(c));
            }
        }
    }
    Ok(SearchOutcome::NotFound(NotFoundReason::Undecided))
}

fn unital_closure(family: &[Matrix], tol: &Tolerance) -> Result<AlgebraBasis> {
    let n = common_dim(family)?;
    let mut gens = family.to_vec();
    gens.push(Matrix::identity(n));
    close(&gens, AlgebraKind::Associative, tol)
}

fn orbit_threshold(tol: &Tolerance) -> f64 {
    (1e3 * tol.combined()).min(1e-3)
}

/// `span(A v)` when it is proper and verified invariant.
fn orbit(v: &DVector<C64>, family: &[Matrix], algebra: &AlgebraBasis, tol: &Tolerance) -> Option<Subspace> {
    let n = v.len();
    let norm = v.norm();
    if norm == 0.0 {
        return None;
    }
    let v = v / C64::new(norm, 0.0);
    let mut images = Vec::with_capacity(algebra.len() + 1);
    images.push(v.clone());
    for e in algebra.elements() {
        images.push(e.inner() * &v);
    }
    let s = Subspace::from_vectors(n, &images, orbit_threshold(tol))?;
    (s.is_nontrivial() && is_invariant(&s, family, tol)).then_some(s)
}

fn search(
    family: &[Matrix],
    algebra: &AlgebraBasis,
    tol: &Tolerance,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Subspace>> {
    let n = algebra.dim_ambient();

    // common kernel
    let mut stacked = DMatrix::<C64>::zeros(n * family.len(), n);
    for (i, m) in family.iter().enumerate() {
        stacked.view_mut((i * n, 0), (n, n)).copy_from(m.inner());
    }
    let kernel = null_space(&stacked, tol.for_matrices(family))?;
    for v in &kernel {
        if let Some(s) = orbit(v, family, algebra, tol) {
            return Ok(Some(s));
        }
    }

    let randoms: Vec<Matrix> = (0..RANDOM_ELEMENTS)
        .map(|_| random_element_with(algebra, rng))
        .collect();
    let candidates = randoms.iter().chain(family.iter()).chain(algebra.elements().iter());
    for x in candidates.clone() {
        for v in eigenvectors(x, tol)? {
            if let Some(s) = orbit(&v, family, algebra, tol) {
                return Ok(Some(s));
            }
        }
    }

    // spectral subspaces of random elements
    for x in &randoms {
        for (z, _) in spectrum(x, tol)?.distinct(0.0) {
            let Ok(p) = riesz_projection(x, z, tol) else {
                continue;
            };
            let range = Subspace::from_vectors(
                n,
                &p.inner().column_iter().map(|c| c.into_owned()).collect::<Vec<_>>(),
                orbit_threshold(tol),
            );
            let Some(range) = range else { continue };
            let mut images = Vec::new();
            for c in range.basis().column_iter() {
                let c = c.into_owned();
                images.push(c.clone());
                for e in algebra.elements() {
                    images.push(e.inner() * &c);
                }
            }
            if let Some(s) = Subspace::from_vectors(n, &images, orbit_threshold(tol)) {
                if s.is_nontrivial() && is_invariant(&s, family, tol) {
                    return Ok(Some(s));
                }
            }
        }
    }

    for _ in 0..RANDOM_VECTORS {
        let v = DVector::from_fn(n, |_, _| complex_normal(rng));
        if let Some(s) = orbit(&v, family, algebra, tol) {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// One approximate eigenvector per distinct eigenvalue: the right singular
/// vector of `X - cI` for its smallest singular value.
fn eigenvectors(x: &Matrix, tol: &Tolerance) -> Result<Vec<DVector<C64>>> {
    let n = x.dim();
    let mut out = Vec::new();
    for (z, _) in spectrum(x, tol)?.distinct(0.0) {
        let shifted = x.shifted(-z);
        let svd = nalgebra::SVD::try_new(shifted.into_inner(), false, true, f64::EPSILON, 0)
            .ok_or(Error::SvdNonConvergence)?;
        let v_t = svd.v_t.ok_or(Error::SvdNonConvergence)?;
        let (imin, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("dimension is positive");
        let v: DVector<C64> = v_t.row(imin).adjoint();
        debug_assert_eq!(v.len(), n);
        out.push(v);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    IrreducibleAtBlock,
    UndecidedAtBlock,
}

/// The diagonal block (offset and size, in the partially triangularized
/// basis) where the recursion stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TriangularizeFailure {
    pub kind: FailureKind,
    pub block_offset: usize,
    pub block_dim: usize,
}

#[derive(Clone, Debug)]
pub enum TriangularizeOutcome {
    Triangularized(SubspaceChain),
    Failed(TriangularizeFailure),
}

impl TriangularizeOutcome {
    pub fn chain(&self) -> Option<&SubspaceChain> {
        match self {
            TriangularizeOutcome::Triangularized(c) => Some(c),
            TriangularizeOutcome::Failed(_) => None,
        }
    }
}

/// Simultaneous triangularization by recursing on the restriction to an
/// invariant subspace and the compression to its complement.
pub fn triangularize(family: &[Matrix], tol: &Tolerance, seed: u64) -> Result<TriangularizeOutcome> {
    common_dim(family)?;
    let blocks: Vec<DMatrix<C64>> = family.iter().map(|m| m.inner().clone()).collect();
    Ok(match recurse(&blocks, 0, tol, seed)? {
        Ok(q) => TriangularizeOutcome::Triangularized(SubspaceChain::new(q, true)),
        Err(f) => TriangularizeOutcome::Failed(f),
    })
}

fn recurse(
    blocks: &[DMatrix<C64>],
    offset: usize,
    tol: &Tolerance,
    seed: u64,
) -> Result<std::result::Result<DMatrix<C64>, TriangularizeFailure>> {
    let k = blocks[0].nrows();
    if k == 1 {
        return Ok(Ok(DMatrix::identity(1, 1)));
    }
    let family: Vec<Matrix> = blocks.iter().map(|b| Matrix::from_inner(b.clone())).collect();
    let s = match find_invariant_subspace(&family, tol, seed)? {
        SearchOutcome::Found(s) => s,
        SearchOutcome::NotFound(reason) => {
            let kind = match reason {
                NotFoundReason::IrreducibleCertified => FailureKind::IrreducibleAtBlock,
                NotFoundReason::Undecided => FailureKind::UndecidedAtBlock,
            };
            return Ok(Err(TriangularizeFailure {
                kind,
                block_offset: offset,
                block_dim: k,
            }));
        }
    };
    let w = s.complement().ok_or(Error::SvdNonConvergence)?;
    let v = s.basis();
    let w = w.basis();
    let m = v.ncols();
    let restricted: Vec<DMatrix<C64>> = blocks.iter().map(|b| v.adjoint() * b * v).collect();
    let compressed: Vec<DMatrix<C64>> = blocks.iter().map(|b| w.adjoint() * b * w).collect();
    let q1 = match recurse(&restricted, offset, tol, seed.wrapping_add(1))? {
        Ok(q) => q,
        Err(f) => return Ok(Err(f)),
    };
    let q2 = match recurse(&compressed, offset + m, tol, seed.wrapping_add(2))? {
        Ok(q) => q,
        Err(f) => return Ok(Err(f)),
    };
    let mut q = DMatrix::<C64>::zeros(k, k);
    q.view_mut((0, 0), (k, m)).copy_from(&(v * q1));
    q.view_mut((0, m), (k, k - m)).copy_from(&(w * q2));
    Ok(Ok(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::nilpotent_span_example;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_unitary(n: usize, seed: u64) -> DMatrix<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, n, |_, _| complex_normal(&mut rng));
        g.qr().q()
    }

    fn conjugated_upper(n: usize, count: usize, seed: u64, strict: bool) -> Vec<Matrix> {
        let u = random_unitary(n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        (0..count)
            .map(|_| {
                let t = DMatrix::from_fn(n, n, |i, j| {
                    if j > i || (j == i && !strict) {
                        complex_normal(&mut rng)
                    } else {
                        c(0.0, 0.0)
                    }
                });
                Matrix::from_inner(&u * t * u.adjoint())
            })
            .collect()
    }

    #[test]
    fn nilpotent_span_example_is_irreducible() {
        let (a, b) = nilpotent_span_example();
        let tol = Tolerance::default();
        let out = find_invariant_subspace(&[a.clone(), b.clone()], &tol, 0).unwrap();
        assert!(matches!(
            out,
            SearchOutcome::NotFound(NotFoundReason::IrreducibleCertified)
        ));
        let t = triangularize(&[a, b], &tol, 0).unwrap();
        match t {
            TriangularizeOutcome::Failed(f) => {
                assert_eq!(f.kind, FailureKind::IrreducibleAtBlock);
                assert_eq!((f.block_offset, f.block_dim), (0, 3));
            }
            TriangularizeOutcome::Triangularized(_) => panic!("irreducible pair triangularized"),
        }
    }

    #[test]
    fn triangular_families_triangularize() {
        let tol = Tolerance::default();
        for (seed, strict) in [(1, false), (2, true), (3, false)] {
            let fam = conjugated_upper(5, 3, seed, strict);
            let out = triangularize(&fam, &tol, seed).unwrap();
            let chain = out.chain().expect("triangularizable");
            assert!(chain.orthonormality_error() < 1e-10);
            for m in &fam {
                assert!(
                    chain.relative_residual(m) < 1e-8,
                    "residual {}",
                    chain.relative_residual(m)
                );
            }
        }
    }

    #[test]
    fn block_family_finds_subspace_but_not_flag() {
        // block diagonal with an irreducible 2x2 block
        let a = Matrix::from_real_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 2.0]]).unwrap();
        let b = Matrix::from_real_rows(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let tol = Tolerance::default();
        let fam = [a, b];
        let s = find_invariant_subspace(&fam, &tol, 0).unwrap();
        let s = s.subspace().expect("reducible");
        assert!(is_invariant(s, &fam, &tol));
        match triangularize(&fam, &tol, 0).unwrap() {
            TriangularizeOutcome::Failed(f) => {
                assert_eq!(f.kind, FailureKind::IrreducibleAtBlock);
                assert_eq!(f.block_dim, 2);
            }
            TriangularizeOutcome::Triangularized(_) => panic!("2x2 block is irreducible"),
        }
    }

    #[test]
    fn zero_family() {
        let tol = Tolerance::default();
        let out = triangularize(&[Matrix::zeros(3)], &tol, 0).unwrap();
        assert!(out.chain().is_some());
    }
}
