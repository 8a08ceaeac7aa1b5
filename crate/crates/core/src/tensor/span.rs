use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::operator::{check_budget, dense_budget, Operator};
use super::ops::kron;
use super::space::TensorSpace;
use super::C64;
use crate::error::{Error, Result};

/// Default relative Frobenius tolerance for membership decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Eigenvalues of the Gram matrix below this fraction of the largest are
/// treated as zero by the pseudo-inverse.
const PINV_CUTOFF: f64 = 1e-12;

/// Outcome of a span-membership test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub residual: f64,
}

/// A finite-dimensional operator space given by a basis on a common tensor space.
#[derive(Debug)]
pub struct AlgebraSpan {
    label: String,
    space: TensorSpace,
    basis: Vec<Operator>,
    gram_pinv: OnceLock<DMatrix<C64>>,
}

impl Clone for AlgebraSpan {
    fn clone(&self) -> Self {
        let gram_pinv = OnceLock::new();
        if let Some(p) = self.gram_pinv.get() {
            let _ = gram_pinv.set(p.clone());
        }
        Self {
            label: self.label.clone(),
            space: self.space.clone(),
            basis: self.basis.clone(),
            gram_pinv,
        }
    }
}

fn gram_of(basis: &[Operator]) -> Result<DMatrix<C64>> {
    let m = basis.len();
    let mut g = DMatrix::zeros(m, m);
    for j in 0..m {
        for k in j..m {
            // G_jk = tr(b_j* b_k)
            let v = basis[k].inner(&basis[j])?;
            g[(j, k)] = v;
            g[(k, j)] = v.conj();
        }
    }
    Ok(g)
}

fn hermitian_eigen(g: DMatrix<C64>) -> SymmetricEigen<C64, nalgebra::Dyn> {
    SymmetricEigen::new(g)
}

impl AlgebraSpan {
    /// Validated span: the basis must share one space and be linearly independent.
    pub fn new(label: impl Into<String>, basis: Vec<Operator>) -> Result<Self> {
        let label = label.into();
        let span = Self::new_unchecked(label.clone(), basis)?;
        let eig = hermitian_eigen(gram_of(&span.basis)?);
        let max = eig.eigenvalues.max();
        let min = eig.eigenvalues.min();
        if max.is_nan() || max <= 0.0 || min <= 1e-10 * max {
            return Err(Error::DependentBasis(label));
        }
        Ok(span)
    }

    /// Skips the independence check; callers guarantee it by construction.
    pub(crate) fn new_unchecked(label: impl Into<String>, basis: Vec<Operator>) -> Result<Self> {
        let first = basis.first().ok_or(Error::EmptySpan)?;
        let space = first.space().clone();
        if let Some(bad) = basis.iter().find(|b| b.space() != &space) {
            return Err(Error::DimensionMismatch(format!(
                "basis mixes spaces {:?} and {:?}",
                space.dims(),
                bad.space().dims()
            )));
        }
        Ok(Self {
            label: label.into(),
            space,
            basis,
            gram_pinv: OnceLock::new(),
        })
    }

    /// Greedy extraction of a basis from spanning candidates; a candidate is
    /// kept when its component orthogonal to the ones already kept exceeds
    /// `tol` relative to its own norm.
    pub fn from_candidates(
        label: impl Into<String>,
        candidates: impl IntoIterator<Item = Operator>,
        tol: f64,
    ) -> Result<Self> {
        let mut kept: Vec<Operator> = Vec::new();
        let mut ortho: Vec<DVector<C64>> = Vec::new();
        for cand in candidates {
            let norm = cand.frobenius_norm();
            if norm < 1e-13 {
                continue;
            }
            if let Some(first) = kept.first() {
                if first.space() != cand.space() {
                    return Err(Error::DimensionMismatch(
                        "candidates live on different spaces".into(),
                    ));
                }
            }
            let n = cand.dim();
            check_budget(n * n, dense_budget())?;
            let mut v = DVector::from_column_slice(cand.to_dense()?.as_slice());
            for _ in 0..2 {
                for q in &ortho {
                    let proj = q.dotc(&v);
                    v.axpy(-proj, q, C64::new(1.0, 0.0));
                }
            }
            let rest = v.norm();
            if rest > tol * norm {
                ortho.push(v / C64::new(rest, 0.0));
                kept.push(cand);
            }
        }
        Self::new_unchecked(label, kept)
    }

    /// Span of `{a ⊗ b}` over the two bases.
    pub fn tensor(&self, other: &AlgebraSpan) -> Result<Self> {
        let mut basis = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.basis {
            for b in &other.basis {
                basis.push(kron(a, b)?);
            }
        }
        Self::new_unchecked(format!("{}⊗{}", self.label, other.label), basis)
    }

    pub fn scalars(space: TensorSpace) -> Self {
        Self {
            label: "C1".into(),
            basis: vec![Operator::identity(space.clone())],
            space,
            gram_pinv: OnceLock::new(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn basis(&self) -> &[Operator] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn gram(&self) -> Result<DMatrix<C64>> {
        gram_of(&self.basis)
    }

    fn pinv(&self) -> Result<&DMatrix<C64>> {
        if let Some(p) = self.gram_pinv.get() {
            return Ok(p);
        }
        let eig = hermitian_eigen(self.gram()?);
        let max = eig.eigenvalues.max();
        let m = self.dim();
        let mut inv = DMatrix::zeros(m, m);
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > PINV_CUTOFF * max {
                let v = eig.eigenvectors.column(k);
                inv += (v * v.adjoint()) / C64::new(lambda, 0.0);
            }
        }
        Ok(self.gram_pinv.get_or_init(|| inv))
    }

    fn check_space(&self, x: &Operator) -> Result<()> {
        if x.space().total() != self.space.total() {
            return Err(Error::DimensionMismatch(format!(
                "operator on {:?} tested against span `{}` on {:?}",
                x.space().dims(),
                self.label,
                self.space.dims()
            )));
        }
        Ok(())
    }

    /// Least-squares coefficients of `x` against the basis.
    pub fn coefficients(&self, x: &Operator) -> Result<Vec<C64>> {
        self.check_space(x)?;
        let x = x.reshaped(self.space.clone())?;
        let h = DVector::from_iterator(
            self.dim(),
            self.basis
                .iter()
                .map(|b| x.inner(b))
                .collect::<Result<Vec<_>>>()?,
        );
        let c = self.pinv()? * h;
        Ok(c.iter().copied().collect())
    }

    /// Orthogonal projection of `x` onto the span.
    pub fn project(&self, x: &Operator) -> Result<Operator> {
        let coeffs = self.coefficients(x)?;
        self.combine(&coeffs)
    }

    /// `Σ c_j b_j`.
    pub fn combine(&self, coeffs: &[C64]) -> Result<Operator> {
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a {}-dimensional span",
                coeffs.len(),
                self.dim()
            )));
        }
        let mut acc = Operator::zero(self.space.clone());
        for (b, &c) in self.basis.iter().zip(coeffs) {
            acc = acc.add(&b.scale(c))?;
        }
        Ok(acc)
    }

    /// Least-squares residual `‖x − P x‖_F` and the decision
    /// `residual ≤ tol · max(1, ‖x‖_F)`.
    pub fn membership(&self, x: &Operator, tol: f64) -> Result<Membership> {
        let coeffs = self.coefficients(x)?;
        let n = self.space.total();
        check_budget(n * n, dense_budget())?;
        let mut diff = x.to_dense()?;
        for (b, &c) in self.basis.iter().zip(&coeffs) {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            for (r, col, v) in b.nonzeros() {
                diff[(r, col)] -= v * c;
            }
        }
        let residual = diff.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        Ok(Membership {
            member: residual <= tol * x.frobenius_norm().max(1.0),
            residual,
        })
    }

    /// Whether every basis element of `other` lies in this span; returns the worst residual.
    pub fn contains_span(&self, other: &AlgebraSpan, tol: f64) -> Result<Membership> {
        let mut worst = Membership {
            member: true,
            residual: 0.0,
        };
        for b in other.basis() {
            let m = self.membership(b, tol)?;
            worst.member &= m.member;
            worst.residual = worst.residual.max(m.residual);
        }
        Ok(worst)
    }

    /// Dimension of `self ∩ other`, from the rank of the joint Gram matrix.
    pub fn intersection_dim(&self, other: &AlgebraSpan, tol: f64) -> Result<usize> {
        if self.space.total() != other.space.total() {
            return Err(Error::DimensionMismatch(
                "spans live on different spaces".into(),
            ));
        }
        let rank = |ops: &[Operator]| -> Result<usize> {
            let eig = hermitian_eigen(gram_of(ops)?);
            let max = eig.eigenvalues.max();
            Ok(eig.eigenvalues.iter().filter(|&&l| l > tol * max).count())
        };
        let mut joint: Vec<Operator> = self.basis.clone();
        for b in &other.basis {
            joint.push(b.reshaped(self.space.clone())?);
        }
        Ok(rank(&self.basis)? + rank(&other.basis)? - rank(&joint)?)
    }

    /// Numerical commutant `{x : [x, b] = 0 for all basis b}` on a single leg view.
    pub fn commutant(&self, label: impl Into<String>, tol: f64) -> Result<AlgebraSpan> {
        let n = self.space.total();
        let unknowns = n * n;
        check_budget(unknowns * unknowns, dense_budget())?;
        // H = Σ_b A_b* A_b, where A_b maps vec(X) (row-major) to vec(Xb − bX)
        let mut h = DMatrix::<C64>::zeros(unknowns, unknowns);
        for b in &self.basis {
            let bd = b.to_dense()?;
            let mut a = DMatrix::<C64>::zeros(unknowns, unknowns);
            for p in 0..n {
                for q in 0..n {
                    let row = p * n + q;
                    for k in 0..n {
                        // (Xb)_pq = Σ_k X_pk b_kq ; (bX)_pq = Σ_k b_pk X_kq
                        a[(row, p * n + k)] += bd[(k, q)];
                        a[(row, k * n + q)] -= bd[(p, k)];
                    }
                }
            }
            h += a.adjoint() * a;
        }
        let eig = hermitian_eigen(h);
        let scale = eig.eigenvalues.max().max(1.0);
        let single = TensorSpace::single(n)?;
        let mut basis = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda <= tol * scale {
                let v = eig.eigenvectors.column(k);
                let m = DMatrix::from_fn(n, n, |r, c| v[r * n + c]);
                basis.push(Operator::dense(single.clone(), m)?.reshaped(self.space.clone())?);
            }
        }
        Self::new_unchecked(label, basis)
    }
}

/// Free-function form of [`AlgebraSpan::membership`].
pub fn membership(x: &Operator, span: &AlgebraSpan, tol: f64) -> Result<Membership> {
    span.membership(x, tol)
}
