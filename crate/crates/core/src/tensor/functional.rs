use nalgebra::{DMatrix, DVector};

use super::operator::Operator;
use super::C64;
use crate::error::{Error, Result};

/// Linear functional `f(x) = tr(x · D)` on `n × n` matrices.
#[derive(Clone, Debug)]
pub struct Functional {
    pairing: DMatrix<C64>,
    // (i, j, D_ij) for the nonzero entries of D
    support: Vec<(usize, usize, C64)>,
}

impl Functional {
    pub fn new(pairing: DMatrix<C64>) -> Result<Self> {
        if pairing.nrows() != pairing.ncols() || pairing.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "pairing matrix must be square and nonempty, got {}x{}",
                pairing.nrows(),
                pairing.ncols()
            )));
        }
        let mut support = Vec::new();
        for j in 0..pairing.ncols() {
            for i in 0..pairing.nrows() {
                let v = pairing[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    support.push((i, j, v));
                }
            }
        }
        Ok(Self { pairing, support })
    }

    /// Vector functional `x ↦ ⟨xξ, η⟩`, i.e. `D = ξη*`.
    pub fn vector(xi: &DVector<C64>, eta: &DVector<C64>) -> Result<Self> {
        if xi.len() != eta.len() {
            return Err(Error::DimensionMismatch(
                "vector functional lengths differ".into(),
            ));
        }
        Self::new(xi * eta.adjoint())
    }

    /// Reads the `(row, col)` entry: `f(x) = x[row, col]`.
    pub fn entry(n: usize, row: usize, col: usize) -> Self {
        let mut d = DMatrix::zeros(n, n);
        d[(col, row)] = C64::new(1.0, 0.0);
        Self::new(d).expect("square pairing")
    }

    /// All `n²` entry functionals, row-major in `(row, col)`.
    pub fn entry_basis(n: usize) -> Vec<Self> {
        (0..n)
            .flat_map(|r| (0..n).map(move |c| Self::entry(n, r, c)))
            .collect()
    }

    pub fn normalized_trace(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n) / C64::new(n as f64, 0.0)).expect("square pairing")
    }

    pub fn dim(&self) -> usize {
        self.pairing.nrows()
    }

    pub fn pairing(&self) -> &DMatrix<C64> {
        &self.pairing
    }

    /// Nonzero pairing entries `(i, j, D_ij)`; `f(x) = Σ x_ji D_ij`.
    pub(crate) fn support(&self) -> &[(usize, usize, C64)] {
        &self.support
    }

    pub fn eval(&self, x: &Operator) -> Result<C64> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "functional on dimension {} applied to an operator of dimension {}",
                self.dim(),
                x.dim()
            )));
        }
        Ok(self
            .support
            .iter()
            .map(|&(i, j, d)| x.entry(j, i) * d)
            .sum())
    }

    /// Value on the identity, `tr(D)`.
    pub fn unit_value(&self) -> C64 {
        self.pairing.trace()
    }

    pub fn trace_norm(&self) -> f64 {
        self.pairing.singular_values().sum()
    }
}
