//! Completely bounded norms.
//!
//! For a symbol `χ = Σ aᵢ ⊗ bᵢ` the factorization bound
//! `‖Σ aᵢaᵢ*‖^{1/2} ‖Σ bᵢ*bᵢ‖^{1/2}` dominates `‖Φ_χ‖_cb`.
//!
//! For a Schur multiplier `S_φ` on `n × n` matrices, `‖S_φ‖_cb ≤ t` exactly
//! when the `2n × 2n` matrix
//!
//! ```text
//!     [ A      Φ/t ]
//!     [ Φ*/t   B   ]
//! ```
//!
//! has a positive semidefinite completion with `diag(A) ≤ 1`, `diag(B) ≤ 1`.
//! Sketch: such a matrix is the Gram matrix of vectors `x_s`, `y_t` of norm
//! at most one with `φ(s,t) = t⟨y_t, x_s⟩`, which writes `S_φ` as
//! `X ↦ t · V* (X ⊗ 1) W` with contractions `V`, `W`, so its cb-norm is at most
//! `t`. Conversely a factorization of `S_φ` through a representation with
//! `‖S_φ‖_cb ≤ t` provides such vectors (Haagerup's factorization of Schur
//! multipliers), and their Gram matrix is the completion.
//!
//! Feasibility is decided by Dykstra's alternating projections between the
//! PSD cone and the affine box set; `t` is bisected between `max|φ|` and the
//! factorization bound of the singular value decomposition of `φ`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::symbol::Symbol;
use crate::tensor::{Operator, C64};

/// Default tolerance for norm computations.
pub const DEFAULT_NORM_TOL: f64 = 1e-3;
/// Dykstra sweeps allowed per feasibility probe.
pub const MAX_SWEEPS: usize = 10_000;
/// Bisection steps allowed before giving up.
pub const MAX_BISECTIONS: usize = 200;

const ZERO: C64 = C64::new(0.0, 0.0);

/// What backs a norm value.
#[derive(Clone, Debug)]
pub enum Certificate {
    /// A term list realizing the factorization bound.
    Factorization(Vec<(Operator, Operator)>),
    /// A PSD completion at the feasible end of the bracket.
    BlockMatrix(DMatrix<C64>),
}

impl Certificate {
    /// SHA-256 over the little-endian bytes of every entry.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        let mut feed = |c: C64| {
            h.update(c.re.to_le_bytes());
            h.update(c.im.to_le_bytes());
        };
        match self {
            Certificate::Factorization(terms) => {
                for (a, b) in terms {
                    for op in [a, b] {
                        let n = op.dim();
                        for r in 0..n {
                            for c in 0..n {
                                feed(op.entry(r, c));
                            }
                        }
                    }
                }
            }
            Certificate::BlockMatrix(m) => {
                for r in 0..m.nrows() {
                    for c in 0..m.ncols() {
                        feed(m[(r, c)]);
                    }
                }
            }
        }
        hex::encode(h.finalize())
    }
}

#[derive(Clone, Debug)]
pub struct NormResult {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    /// `[lower, upper]`; equal endpoints for closed-form values.
    pub bracket: [f64; 2],
    pub certificate: Certificate,
}

/// Serialized form of a [`NormResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub bracket: [f64; 2],
    pub certificate_digest: String,
}

impl NormResult {
    pub fn report(&self) -> NormReport {
        NormReport {
            value: self.value,
            converged: self.converged,
            iterations: self.iterations,
            bracket: self.bracket,
            certificate_digest: self.certificate.digest(),
        }
    }
}

/// Factorization bounds of the given term list and of its canonical form.
#[derive(Clone, Debug)]
pub struct HaagerupBound {
    pub raw: NormResult,
    pub canonical: NormResult,
}

/// `‖Σ aᵢaᵢ*‖^{1/2} ‖Σ bᵢ*bᵢ‖^{1/2}` for an explicit term list.
pub fn factorization_bound(terms: &[(Operator, Operator)]) -> Result<f64> {
    let (first_a, _) = terms.first().ok_or(Error::EmptySymbol)?;
    let n = first_a.dim();
    let mut rows = DMatrix::<C64>::zeros(n, n);
    let mut cols = DMatrix::<C64>::zeros(n, n);
    for (a, b) in terms {
        let (a, b) = (a.to_dense()?, b.to_dense()?);
        rows += &a * a.adjoint();
        cols += b.adjoint() * &b;
    }
    Ok(hermitian_norm(rows).sqrt() * hermitian_norm(cols).sqrt())
}

fn hermitian_norm(m: DMatrix<C64>) -> f64 {
    SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .fold(0.0, |acc: f64, &l| acc.max(l.abs()))
}

fn closed(value: f64, certificate: Certificate) -> NormResult {
    NormResult {
        value,
        converged: true,
        iterations: 0,
        bracket: [value, value],
        certificate,
    }
}

pub fn haagerup_bound(chi: &Symbol) -> Result<HaagerupBound> {
    let raw = factorization_bound(chi.terms())?;
    let canon = balanced_factorization(chi)?;
    let canonical = factorization_bound(&canon)?;
    Ok(HaagerupBound {
        raw: closed(raw, Certificate::Factorization(chi.terms().to_vec())),
        canonical: closed(canonical, Certificate::Factorization(canon)),
    })
}

const RANK_CUTOFF: f64 = 1e-12;
const BALANCE_STEPS: usize = 200;

type Terms = (Vec<DMatrix<C64>>, Vec<DMatrix<C64>>);

/// A minimal-length factorization of `χ` whose factorization bound is at most
/// that of both the given term list and its SVD form.
///
/// Minimal-length factorizations of the same tensor differ by `aM ⊙ M⁻¹b`;
/// starting from the better of the SVD terms and the reduced input terms,
/// `M` is improved by backtracking descent on `ln‖Σaa*‖ + ln‖Σb*b‖`.
pub fn balanced_factorization(chi: &Symbol) -> Result<Vec<(Operator, Operator)>> {
    let svd = dense_terms(chi.canonicalize()?.terms())?;
    let reduced = reduce(dense_terms(chi.terms())?);
    let start = if reduced.0.is_empty() || bound_of(&svd) <= bound_of(&reduced) {
        svd
    } else {
        reduced
    };
    let (a, b) = refine(start);
    let space = chi.space().clone();
    a.into_iter()
        .zip(b)
        .map(|(a, b)| Ok((Operator::dense(space.clone(), a)?, Operator::dense(space.clone(), b)?)))
        .collect()
}

fn dense_terms(terms: &[(Operator, Operator)]) -> Result<Terms> {
    let mut a = Vec::with_capacity(terms.len());
    let mut b = Vec::with_capacity(terms.len());
    for (x, y) in terms {
        a.push(x.to_dense()?);
        b.push(y.to_dense()?);
    }
    Ok((a, b))
}

fn bound_of((a, b): &Terms) -> f64 {
    let (rows, cols) = row_col(a, b);
    (hermitian_norm(rows) * hermitian_norm(cols)).sqrt()
}

fn row_col(a: &[DMatrix<C64>], b: &[DMatrix<C64>]) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = a[0].nrows();
    let mut rows = DMatrix::<C64>::zeros(n, n);
    let mut cols = DMatrix::<C64>::zeros(n, n);
    for (a, b) in a.iter().zip(b) {
        rows += a * a.adjoint();
        cols += b.adjoint() * b;
    }
    (rows, cols)
}

/// `aⱼ' = Σᵢ aᵢ mᵢⱼ` for the first `keep` columns of `m`.
fn mix_left(a: &[DMatrix<C64>], m: &DMatrix<C64>, keep: usize) -> Vec<DMatrix<C64>> {
    (0..keep)
        .map(|j| a.iter().enumerate().fold(a[0].map(|_| ZERO), |acc, (i, x)| acc + x * m[(i, j)]))
        .collect()
}

/// `bⱼ' = Σᵢ mⱼᵢ bᵢ` for the first `keep` rows of `m`.
fn mix_right(b: &[DMatrix<C64>], m: &DMatrix<C64>, keep: usize) -> Vec<DMatrix<C64>> {
    (0..keep)
        .map(|j| b.iter().enumerate().fold(b[0].map(|_| ZERO), |acc, (i, y)| acc + y * m[(j, i)]))
        .collect()
}

fn stacked(xs: &[DMatrix<C64>]) -> DMatrix<C64> {
    let d = xs[0].len();
    DMatrix::from_fn(d, xs.len(), |r, c| xs[c][r])
}

fn numerical_rank(values: &nalgebra::DVector<f64>) -> usize {
    let max = values.max();
    values.iter().filter(|&&s| s > RANK_CUTOFF * max && s > 0.0).count()
}

/// Drops linear dependencies through unitary changes of the term index, which
/// keep `Σaa*` and can only shrink `Σb*b` (and symmetrically).
fn reduce((a, b): Terms) -> Terms {
    let svd = stacked(&a).svd(false, true);
    let keep = numerical_rank(&svd.singular_values);
    if keep == 0 {
        return (Vec::new(), Vec::new());
    }
    let v = svd.v_t.expect("requested Vᵀ").adjoint();
    let (a, b) = (mix_left(&a, &v, keep), mix_right(&b, &v.adjoint(), keep));

    let svd = stacked(&b).svd(false, true);
    let keep = numerical_rank(&svd.singular_values);
    if keep == 0 {
        return (Vec::new(), Vec::new());
    }
    let w = svd.v_t.expect("requested Vᵀ").adjoint();
    (mix_left(&a, &w, keep), mix_right(&b, &w.adjoint(), keep))
}

fn top_vector(m: DMatrix<C64>) -> (f64, nalgebra::DVector<C64>) {
    let eig = SymmetricEigen::new(m);
    let k = eig.eigenvalues.imax();
    (eig.eigenvalues[k], eig.eigenvectors.column(k).into_owned())
}

fn hermitian_exp(m: &DMatrix<C64>, scale: f64) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(m.clone());
    let mut v = eig.eigenvectors.clone();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let w = C64::new((scale * l).exp(), 0.0);
        for e in v.column_mut(k).iter_mut() {
            *e *= w;
        }
    }
    v * eig.eigenvectors.adjoint()
}

fn refine(mut terms: Terms) -> Terms {
    let k = terms.0.len();
    if k < 2 {
        return terms;
    }
    let mut best = bound_of(&terms);
    let mut eta = 1.0;
    for _ in 0..BALANCE_STEPS {
        let (rows, cols) = row_col(&terms.0, &terms.1);
        let (lr, x) = top_vector(rows);
        let (lc, y) = top_vector(cols);
        if lr <= 0.0 || lc <= 0.0 {
            break;
        }
        let alpha: Vec<_> = terms.0.iter().map(|a| a.adjoint() * &x).collect();
        let beta: Vec<_> = terms.1.iter().map(|b| b * &y).collect();
        // gradient of ln λmax(Σ Qᵢⱼ aᵢaⱼ*) + ln λmax(Σ (Q⁻¹)ᵢⱼ bᵢ*bⱼ) at Q = 1
        let grad = DMatrix::from_fn(k, k, |i, j| {
            alpha[i].dotc(&alpha[j]) / lr - beta[i].dotc(&beta[j]) / lc
        })
        .transpose();
        let mut improved = false;
        while eta > 1e-12 {
            let l = hermitian_exp(&grad, -eta / 2.0);
            let l_inv = hermitian_exp(&grad, eta / 2.0);
            let next = (mix_left(&terms.0, &l, k), mix_right(&terms.1, &l_inv, k));
            let value = bound_of(&next);
            if value < best * (1.0 - 1e-12) {
                best = value;
                terms = next;
                improved = true;
                eta *= 2.0;
                break;
            }
            eta /= 2.0;
        }
        if !improved {
            break;
        }
    }
    terms
}

/// Row and column vectors of the SVD factorization `φ = Σ σₘ uₘ vₘ*`:
/// `x_s = (√σₘ U_{sm})ₘ`, `y_t = (√σₘ V_{tm})ₘ`, so `φ(s,t) = ⟨y_t, x_s⟩`.
fn svd_vectors(phi: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let svd = phi.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested Vᵀ").adjoint();
    let mut x = u;
    let mut y = v;
    for (m, &sigma) in svd.singular_values.iter().enumerate() {
        let root = C64::new(sigma.sqrt(), 0.0);
        for e in x.column_mut(m).iter_mut() {
            *e *= root;
        }
        for e in y.column_mut(m).iter_mut() {
            *e *= root;
        }
    }
    (x, y)
}

fn max_row_norm(m: &DMatrix<C64>) -> f64 {
    m.row_iter().map(|r| r.norm()).fold(0.0, f64::max)
}

/// Factorization bound of the SVD of `φ`, with its Gram certificate at that scale.
pub fn schur_factorization_bound(phi: &DMatrix<C64>) -> (f64, DMatrix<C64>) {
    let (mut x, mut y) = svd_vectors(phi);
    let (alpha, beta) = (max_row_norm(&x), max_row_norm(&y));
    let value = alpha * beta;
    if value > 0.0 {
        x /= C64::new(alpha, 0.0);
        y /= C64::new(beta, 0.0);
    }
    let n = phi.nrows();
    let mut stacked = DMatrix::<C64>::zeros(2 * n, x.ncols());
    stacked.rows_mut(0, n).copy_from(&x);
    stacked.rows_mut(n, n).copy_from(&y);
    (value, &stacked * stacked.adjoint())
}

/// Outcome of one feasibility probe.
#[derive(Clone, Debug)]
pub struct Probe {
    pub feasible: bool,
    pub residual: f64,
    pub sweeps: usize,
    pub iterate: DMatrix<C64>,
}

fn project_psd(m: &DMatrix<C64>) -> DMatrix<C64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut v = eig.eigenvectors;
    let d = v.clone();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let w = C64::new(l.max(0.0), 0.0);
        for e in v.column_mut(k).iter_mut() {
            *e *= w;
        }
    }
    v * d.adjoint()
}

fn project_box(m: &DMatrix<C64>, block: &DMatrix<C64>) -> DMatrix<C64> {
    let n = block.nrows();
    let mut out = m.clone();
    out.view_mut((0, n), (n, n)).copy_from(block);
    out.view_mut((n, 0), (n, n)).copy_from(&block.adjoint());
    for i in 0..2 * n {
        out[(i, i)] = C64::new(m[(i, i)].re.min(1.0), 0.0);
    }
    out
}

/// Dykstra's alternating projections for `[[A, Φ/t], [Φ*/t, B]] ⪰ 0` with
/// unit-bounded diagonals; feasible when successive iterates of the two
/// projections come within `tol`.
pub fn completion_feasible(phi: &DMatrix<C64>, t: f64, tol: f64, max_sweeps: usize) -> Probe {
    let n = phi.nrows();
    let block = phi / C64::new(t, 0.0);
    let mut x = DMatrix::<C64>::identity(2 * n, 2 * n);
    x.view_mut((0, n), (n, n)).copy_from(&block);
    x.view_mut((n, 0), (n, n)).copy_from(&block.adjoint());
    let mut p = DMatrix::<C64>::zeros(2 * n, 2 * n);
    let mut q = DMatrix::<C64>::zeros(2 * n, 2 * n);
    let mut residual = f64::INFINITY;
    for sweep in 1..=max_sweeps {
        let y = project_box(&(&x + &p), &block);
        p = &x + &p - &y;
        let next = project_psd(&(&y + &q));
        q = &y + &q - &next;
        residual = (&next - &y).norm();
        x = next;
        if residual < tol {
            return Probe {
                feasible: true,
                residual,
                sweeps: sweep,
                iterate: x,
            };
        }
    }
    Probe {
        feasible: false,
        residual,
        sweeps: max_sweeps,
        iterate: x,
    }
}

/// `‖S_φ‖_cb` by bisection on the completion problem.
pub fn schur_cb_norm(g: &FiniteGroup, phi: &DMatrix<C64>, tol: f64) -> Result<NormResult> {
    schur_cb_norm_with(g, phi, tol, MAX_SWEEPS)
}

pub fn schur_cb_norm_with(
    g: &FiniteGroup,
    phi: &DMatrix<C64>,
    tol: f64,
    max_sweeps: usize,
) -> Result<NormResult> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let n = g.order();
    if phi.nrows() != n || phi.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "Schur function of shape {}x{} on a group of order {n}",
            phi.nrows(),
            phi.ncols()
        )));
    }
    let lower = phi.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let (upper, gram) = schur_factorization_bound(phi);
    if lower == 0.0 {
        return Ok(closed(0.0, Certificate::BlockMatrix(gram)));
    }
    let (mut lo, mut hi) = (lower, upper.max(lower));
    let mut certificate = gram;
    let mut iterations = 0;
    let mut steps = 0;
    while hi - lo >= tol && steps < MAX_BISECTIONS {
        steps += 1;
        let mid = 0.5 * (lo + hi);
        let probe = completion_feasible(phi, mid, tol, max_sweeps);
        iterations += probe.sweeps;
        if probe.feasible {
            hi = mid;
            certificate = probe.iterate;
        } else {
            lo = mid;
        }
    }
    Ok(NormResult {
        value: 0.5 * (lo + hi),
        converged: hi - lo < tol,
        iterations,
        bracket: [lo, hi],
        certificate: Certificate::BlockMatrix(certificate),
    })
}

/// The `B(H)`-valued symbol `Σ_s e_ss ⊗ diag(φ(s, ·))` of a Schur function.
pub fn schur_symbol(phi: &DMatrix<C64>) -> Result<Symbol> {
    let n = phi.nrows();
    let space = crate::tensor::TensorSpace::single(n)?;
    let mut terms = Vec::with_capacity(n);
    for s in 0..n {
        let mut unit = vec![ZERO; n];
        unit[s] = C64::new(1.0, 0.0);
        let row = (0..n).map(|t| phi[(s, t)]).collect();
        terms.push((
            Operator::diagonal(space.clone(), unit)?,
            Operator::diagonal(space.clone(), row)?,
        ));
    }
    Symbol::full(terms)
}
