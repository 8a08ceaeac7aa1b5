use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered tensor product of finite-dimensional Hilbert spaces.
///
/// Leg 0 is the slowest-varying index of the Kronecker layout, so the basis
/// vector `e_{i_0} ⊗ ... ⊗ e_{i_k}` sits at the mixed-radix index
/// `((i_0 * d_1 + i_1) * d_2 + ...)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TensorSpace {
    dims: Vec<usize>,
}

impl TensorSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidSpace("a space needs at least one leg".into()));
        }
        if let Some(leg) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidSpace(format!("leg {leg} has dimension 0")));
        }
        Ok(Self { dims })
    }

    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    /// `legs` copies of a `dim`-dimensional factor.
    pub fn uniform(dim: usize, legs: usize) -> Result<Self> {
        Self::new(vec![dim; legs])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn legs(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn concat(&self, other: &TensorSpace) -> TensorSpace {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        TensorSpace { dims }
    }

    /// Sub-space made of the given legs, in the given order.
    pub fn select(&self, legs: &[usize]) -> Result<TensorSpace> {
        let mut dims = Vec::with_capacity(legs.len());
        for &leg in legs {
            let d = *self.dims.get(leg).ok_or(Error::IndexOutOfRange {
                index: leg,
                bound: self.legs(),
            })?;
            dims.push(d);
        }
        TensorSpace::new(dims)
    }

    pub fn split(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.dims.len()];
        for (slot, &d) in digits.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        digits
    }

    pub fn join(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&digit, &d)| acc * d + digit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_dims() {
        assert!(TensorSpace::new(vec![2, 0]).is_err());
        assert!(TensorSpace::new(vec![]).is_err());
    }

    #[test]
    fn leg_zero_varies_slowest() {
        let space = TensorSpace::new(vec![2, 3]).unwrap();
        assert_eq!(space.total(), 6);
        assert_eq!(space.join(&[1, 0]), 3);
        assert_eq!(space.split(5), vec![1, 2]);
        for idx in 0..space.total() {
            assert_eq!(space.join(&space.split(idx)), idx);
        }
    }
}
