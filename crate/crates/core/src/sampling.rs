//! Seeded random generators for boundary operators and gapped unitaries.

use rand::Rng;

use crate::boundary_algebra::{reconstruct_unitary, BoundaryUnitary};
use crate::error::Result;
use crate::linalg::{hermitian_part, identity};
use crate::scalar::{cx, lit, CMatrix, Real};

/// Hermitian matrix with real and imaginary parts uniform in `[-scale, scale]`.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    scale: f64,
) -> CMatrix<T> {
    let m = CMatrix::<T>::from_fn(dim, dim, |_, _| {
        cx(
            lit(rng.random_range(-scale..=scale)),
            lit(rng.random_range(-scale..=scale)),
        )
    });
    hermitian_part(&m)
}

/// Real diagonal matrix with entries uniform in `[-scale, scale]`.
pub fn random_real_diagonal<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    scale: f64,
) -> CMatrix<T> {
    let mut m = CMatrix::<T>::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = cx(lit(rng.random_range(-scale..=scale)), T::zero());
    }
    m
}

/// Orthogonal projection onto a random `rank`-dimensional subspace.
pub fn random_projection<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
) -> CMatrix<T> {
    if rank == 0 {
        return CMatrix::zeros(dim, dim);
    }
    let g = CMatrix::<T>::from_fn(dim, dim, |_, _| {
        cx(
            lit(rng.random_range(-1.0..=1.0)),
            lit(rng.random_range(-1.0..=1.0)),
        )
    });
    let q = g.qr().q();
    let basis = q.columns(0, rank.min(dim)).into_owned();
    hermitian_part(&(&basis * basis.adjoint()))
}

/// A gapped boundary unitary together with the `(P, K)` it was built from.
#[derive(Debug, Clone)]
pub struct GappedSample<T: Real> {
    pub unitary: BoundaryUnitary<T>,
    pub p: CMatrix<T>,
    pub k: CMatrix<T>,
}

/// Random `P` of the given rank and random Hermitian `K` on `Ran(I - P)`.
pub fn random_gapped_unitary<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
    k_scale: f64,
) -> Result<GappedSample<T>> {
    let p = random_projection::<T, _>(rng, dim, rank);
    let q = identity::<T>(dim) - &p;
    let h = random_hermitian::<T, _>(rng, dim, k_scale);
    let k = hermitian_part(&(&q * h * &q));
    let unitary = reconstruct_unitary(&p, &k)?;
    Ok(GappedSample { unitary, p, k })
}
