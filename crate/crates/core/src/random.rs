//! Seeded generators for reproducible test inputs.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::tensor::{AlgebraSpan, Functional, Operator, TensorSpace, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian (independent real and imaginary parts).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<C64> {
    DVector::from_fn(n, |_, _| gaussian(rng))
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Dense Gaussian operator on `space`.
pub fn operator<R: Rng + ?Sized>(rng: &mut R, space: &TensorSpace) -> Result<Operator> {
    let n = space.total();
    Operator::dense(space.clone(), matrix(rng, n, n))
}

/// Gaussian operator projected onto `span`.
pub fn element_of<R: Rng + ?Sized>(rng: &mut R, span: &AlgebraSpan) -> Result<Operator> {
    span.project(&operator(rng, span.space())?)
}

/// Functional with a dense Gaussian density.
pub fn functional<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Functional> {
    Functional::new(matrix(rng, n, n))
}

/// Rank-one vector functional `x ↦ ⟨x ξ, η⟩` with Gaussian vectors.
pub fn vector_functional<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Functional> {
    Functional::vector(&vector(rng, n), &vector(rng, n))
}

/// Complex Gaussian weights, e.g. a measure on a finite group.
pub fn weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| gaussian(rng)).collect()
}
