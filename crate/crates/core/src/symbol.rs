//! Symbols `χ = Σ aᵢ ⊗ bᵢ` and the bimodule maps `Φ_χ(x) = Σ aᵢ x bᵢ`.
//!
//! In finite dimension the normal and extended Haagerup tensor products of
//! `M` with itself coincide linearly with `M ⊗ M`, so a symbol is determined
//! by its flattening `Σ aᵢ ⊗ bᵢ` on the doubled space. Term lists are kept
//! factored; the flattening is computed on demand and cached.

use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::random;
use crate::realization::{mult, Realization};
use crate::tensor::{
    dense_budget, embed_legs, evaluate, kron, middle_product_within, slice, AlgebraSpan,
    Functional, LegSlice, Operator, TensorSpace, C64, DEFAULT_TOL,
};

/// Singular values below this fraction of the largest are dropped by
/// [`Symbol::canonicalize`].
pub const CANONICAL_CUTOFF: f64 = 1e-12;

/// The algebra every factor must lie in.
#[derive(Clone, Debug)]
pub enum SymbolAmbient {
    Full,
    Span(Arc<AlgebraSpan>),
}

impl SymbolAmbient {
    pub fn label(&self) -> &str {
        match self {
            SymbolAmbient::Full => "B(H)",
            SymbolAmbient::Span(s) => s.label(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Symbol {
    terms: Vec<(Operator, Operator)>,
    ambient: SymbolAmbient,
    flat: OnceLock<Operator>,
}

impl Symbol {
    /// Builds a symbol and checks that every factor lies in `ambient`.
    pub fn new(terms: Vec<(Operator, Operator)>, ambient: SymbolAmbient) -> Result<Self> {
        Self::with_tolerance(terms, ambient, DEFAULT_TOL)
    }

    pub fn with_tolerance(
        terms: Vec<(Operator, Operator)>,
        ambient: SymbolAmbient,
        tol: f64,
    ) -> Result<Self> {
        let first = terms.first().ok_or(Error::EmptySymbol)?.0.space().clone();
        for (a, b) in &terms {
            for f in [a, b] {
                if f.space() != &first {
                    return Err(Error::DimensionMismatch(format!(
                        "symbol factors on {:?} and {:?}",
                        first.dims(),
                        f.space().dims()
                    )));
                }
            }
        }
        if let SymbolAmbient::Span(span) = &ambient {
            if span.space().total() != first.total() {
                return Err(Error::DimensionMismatch(format!(
                    "factors of dimension {} for an ambient of dimension {}",
                    first.total(),
                    span.space().total()
                )));
            }
            for (a, b) in &terms {
                for f in [a, b] {
                    let m = span.membership(&f.reshaped(span.space().clone())?, tol)?;
                    if !m.member {
                        return Err(Error::NotInAmbient {
                            span: span.label().to_string(),
                            residual: m.residual,
                        });
                    }
                }
            }
        }
        Ok(Self::unchecked(terms, ambient))
    }

    pub(crate) fn unchecked(terms: Vec<(Operator, Operator)>, ambient: SymbolAmbient) -> Self {
        Self {
            terms,
            ambient,
            flat: OnceLock::new(),
        }
    }

    /// `B(H)`-valued symbol.
    pub fn full(terms: Vec<(Operator, Operator)>) -> Result<Self> {
        Self::new(terms, SymbolAmbient::Full)
    }

    pub fn elementary(a: Operator, b: Operator, ambient: SymbolAmbient) -> Result<Self> {
        Self::new(vec![(a, b)], ambient)
    }

    /// `1 ⊗ 1`.
    pub fn identity(space: TensorSpace, ambient: SymbolAmbient) -> Result<Self> {
        let one = Operator::identity(space);
        Self::new(vec![(one.clone(), one)], ambient)
    }

    pub fn terms(&self) -> &[(Operator, Operator)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn space(&self) -> &TensorSpace {
        self.terms[0].0.space()
    }

    pub fn ambient(&self) -> &SymbolAmbient {
        &self.ambient
    }

    /// `Σ aᵢ ⊗ bᵢ` on the doubled space.
    pub fn flatten(&self) -> Result<&Operator> {
        if let Some(f) = self.flat.get() {
            return Ok(f);
        }
        let mut acc: Option<Operator> = None;
        for (a, b) in &self.terms {
            let k = kron(a, b)?;
            acc = Some(match acc {
                None => k,
                Some(s) => s.add(&k)?,
            });
        }
        let flat = acc.ok_or(Error::EmptySymbol)?;
        Ok(self.flat.get_or_init(|| flat))
    }

    /// `Φ_χ(x) = Σ aᵢ x bᵢ`.
    pub fn apply(&self, x: &Operator) -> Result<Operator> {
        phi_apply(self, x)
    }

    /// Term-list concatenation, i.e. the sum of the two maps.
    pub fn concat(&self, other: &Symbol) -> Result<Symbol> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        if other.space() != self.space() {
            return Err(Error::DimensionMismatch("symbols on different spaces".into()));
        }
        Ok(Self::unchecked(terms, self.ambient.clone()))
    }

    pub fn scale(&self, c: C64) -> Symbol {
        let terms = self
            .terms
            .iter()
            .map(|(a, b)| (a.scale(c), b.clone()))
            .collect();
        Self::unchecked(terms, self.ambient.clone())
    }

    /// Equality through the flattening, relative to its norm.
    pub fn approx_eq(&self, other: &Symbol, tol: f64) -> Result<bool> {
        let (x, y) = (self.flatten()?, other.flatten()?);
        Ok(x.distance(y)? <= tol * x.frobenius_norm().max(1.0))
    }

    /// Reshuffled flattening `R[(i,j),(k,l)] = Σ aᵢⱼ bₖₗ`, whose rank is the
    /// minimal term count.
    pub fn reshuffled(&self) -> Result<DMatrix<C64>> {
        let n = self.space().total();
        let flat = self.flatten()?;
        crate::tensor::check_budget(n * n * n * n, dense_budget())?;
        let mut r = DMatrix::zeros(n * n, n * n);
        for (row, col, v) in flat.nonzeros() {
            let (i, k) = (row / n, row % n);
            let (j, l) = (col / n, col % n);
            r[(i * n + j, k * n + l)] += v;
        }
        Ok(r)
    }

    /// Minimal-length term list from the singular value decomposition of the
    /// reshuffled flattening; `aₘ = √σₘ uₘ`, `bₘ = √σₘ v̄ₘ`.
    pub fn canonicalize(&self) -> Result<Symbol> {
        let n = self.space().total();
        let svd = self.reshuffled()?.svd(true, true);
        let u = svd.u.as_ref().expect("requested U");
        let v_t = svd.v_t.as_ref().expect("requested Vᵀ");
        let max = svd.singular_values.max();
        let mut terms = Vec::new();
        for (m, &sigma) in svd.singular_values.iter().enumerate() {
            if sigma <= CANONICAL_CUTOFF * max || sigma == 0.0 {
                continue;
            }
            let root = C64::new(sigma.sqrt(), 0.0);
            // v_t row m is v̄ₘᵀ, so it already carries the conjugation
            let a = DMatrix::from_fn(n, n, |i, j| u[(i * n + j, m)] * root);
            let b = DMatrix::from_fn(n, n, |k, l| v_t[(m, k * n + l)] * root);
            terms.push((
                Operator::dense(self.space().clone(), a)?,
                Operator::dense(self.space().clone(), b)?,
            ));
        }
        if terms.is_empty() {
            let zero = Operator::zero(self.space().clone());
            terms.push((zero.clone(), zero));
        }
        Ok(Self::unchecked(terms, self.ambient.clone()))
    }
}

/// `Φ_χ(x) = Σ aᵢ x bᵢ`.
pub fn phi_apply(chi: &Symbol, x: &Operator) -> Result<Operator> {
    if x.dim() != chi.space().total() {
        return Err(Error::DimensionMismatch(format!(
            "operator of dimension {} for a symbol on dimension {}",
            x.dim(),
            chi.space().total()
        )));
    }
    let x = x.reshaped(chi.space().clone())?;
    let mut acc: Option<Operator> = None;
    for (a, b) in chi.terms() {
        let t = a.mul(&x)?.mul(b)?;
        acc = Some(match acc {
            None => t,
            Some(s) => s.add(&t)?,
        });
    }
    acc.ok_or(Error::EmptySymbol)
}

pub fn flatten(chi: &Symbol) -> Result<Operator> {
    chi.flatten().cloned()
}

/// `(Γ ⊗ Γ_op)(χ)`, term by term; the result lives over `M ⊗ M`.
pub fn lift(r: &Realization, chi: &Symbol) -> Result<Symbol> {
    let mut terms = Vec::with_capacity(chi.len());
    for (a, b) in chi.terms() {
        terms.push((r.comultiply(a, false)?, r.comultiply(b, true)?));
    }
    Ok(Symbol::unchecked(
        terms,
        SymbolAmbient::Span(r.ambient_squared()?.clone()),
    ))
}

/// `(Γ_W ⊗ Γ'_V)(χ)`, with `Γ'_V(b) = V(b ⊗ 1)V*`.
pub fn lift_right(r: &Realization, chi: &Symbol) -> Result<Symbol> {
    let mut terms = Vec::with_capacity(chi.len());
    for (a, b) in chi.terms() {
        terms.push((r.comultiply(a, false)?, r.comultiply_right(b)?));
    }
    Ok(Symbol::unchecked(terms, SymbolAmbient::Full))
}

/// `T(ψ) = Σ (Xᵢ ⊗ 1)(1 ⊗ Yᵢ)` for a symbol over a two-leg space.
pub fn t_map(psi: &Symbol) -> Result<Operator> {
    t_map_within(psi, dense_budget())
}

pub fn t_map_within(psi: &Symbol, budget: usize) -> Result<Operator> {
    check_two_leg(psi)?;
    let mut acc: Option<Operator> = None;
    for (x, y) in psi.terms() {
        let t = middle_product_within(x, y, budget)?;
        acc = Some(match acc {
            None => t,
            Some(s) => s.add(&t)?,
        });
    }
    acc.ok_or(Error::EmptySymbol)
}

fn check_two_leg(psi: &Symbol) -> Result<()> {
    let dims = psi.space().dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(Error::DimensionMismatch(format!(
            "T needs factors on two equal legs, got {dims:?}"
        )));
    }
    Ok(())
}

/// `Σ ω((f ⊗ id)(Xᵢ) · (id ⊗ g)(Yᵢ))`, which never builds the three-leg operator.
pub fn t_map_slice_oracle(
    psi: &Symbol,
    f: &Functional,
    omega: &Functional,
    g: &Functional,
) -> Result<C64> {
    check_two_leg(psi)?;
    let mut acc = C64::new(0.0, 0.0);
    for (x, y) in psi.terms() {
        let left = slice(&[LegSlice::Apply(f), LegSlice::Keep], x)?;
        let right = slice(&[LegSlice::Keep, LegSlice::Apply(g)], y)?;
        acc += omega.eval(&left.mul(&right)?)?;
    }
    Ok(acc)
}

/// `(f ⊗ ω ⊗ g)(T(ψ))` through the dense three-leg operator.
pub fn t_map_evaluated(psi: &Symbol, f: &Functional, omega: &Functional, g: &Functional) -> Result<C64> {
    evaluate(&[f, omega, g], &t_map(psi)?)
}

/// Distance between `(f ⊗ id ⊗ g)(W₁₂ · T((Γ_W ⊗ Γ'_V)(χ)) · V₂₃)` and
/// `Φ_χ((f ⊗ id)(W) · (id ⊗ g)(V))`.
pub fn slice_identity_residual(
    r: &Realization,
    chi: &Symbol,
    f: &Functional,
    g: &Functional,
) -> Result<f64> {
    let n = r.h_dim();
    let triple = TensorSpace::uniform(n, 3)?;
    let t = t_map(&lift_right(r, chi)?)?;
    let w12 = embed_legs(r.w(), &[0, 1], &triple)?;
    let v23 = embed_legs(r.v(), &[1, 2], &triple)?;
    let sandwiched = w12.mul(&t)?.mul(&v23)?;
    let lhs = slice(
        &[LegSlice::Apply(f), LegSlice::Keep, LegSlice::Apply(g)],
        &sandwiched,
    )?;
    let x = slice(&[LegSlice::Apply(f), LegSlice::Keep], r.w())?
        .mul(&slice(&[LegSlice::Keep, LegSlice::Apply(g)], r.v())?)?;
    let rhs = phi_apply(chi, &x)?;
    lhs.reshaped(rhs.space().clone())?.distance(&rhs)
}

/// Symbol with Schur function `φ`: terms `(M_{e_s}, M_{φ(s,·)})`.
pub fn from_schur_function(r: &Realization, phi: &DMatrix<C64>) -> Result<Symbol> {
    let n = r.h_dim();
    if phi.nrows() != n || phi.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "Schur function of shape {}x{} on a group of order {n}",
            phi.nrows(),
            phi.ncols()
        )));
    }
    let mut terms = Vec::with_capacity(n);
    for s in 0..n {
        let row: Vec<C64> = (0..n).map(|t| phi[(s, t)]).collect();
        if row.iter().all(|v| v.norm() == 0.0) {
            continue;
        }
        let mut unit = vec![C64::new(0.0, 0.0); n];
        unit[s] = C64::new(1.0, 0.0);
        terms.push((mult(&unit)?, mult(&row)?));
    }
    if terms.is_empty() {
        let zero = mult(&vec![C64::new(0.0, 0.0); n])?;
        terms.push((zero.clone(), zero));
    }
    Symbol::new(terms, SymbolAmbient::Span(r.ambient().clone()))
}

/// Random symbol over `r`'s ambient: 1 to 4 terms of projected Gaussian factors.
pub fn random_symbol<R: Rng + ?Sized>(r: &Realization, rng: &mut R) -> Result<Symbol> {
    random_symbol_in(r.ambient(), rng)
}

pub fn random_symbol_in<R: Rng + ?Sized>(ambient: &Arc<AlgebraSpan>, rng: &mut R) -> Result<Symbol> {
    let k = rng.random_range(1..=4);
    let mut terms = Vec::with_capacity(k);
    for _ in 0..k {
        terms.push((
            random::element_of(rng, ambient)?,
            random::element_of(rng, ambient)?,
        ));
    }
    Symbol::new(terms, SymbolAmbient::Span(ambient.clone()))
}

/// `Σ_s c(s) λ_s ⊗ λ_{s⁻¹}` with Gaussian `c`.
pub fn random_antidiagonal<R: Rng + ?Sized>(r: &Realization, rng: &mut R) -> Result<Symbol> {
    let g = r.require_group()?;
    let c = random::weights(rng, g.order());
    crate::invariance::measure_to_symbol(r, &crate::invariance::Measure { weights: c })
}

/// Schur function `φ(s,t) = u(st⁻¹)`.
pub fn invariant_schur_function(g: &FiniteGroup, u: &[C64]) -> DMatrix<C64> {
    let n = g.order();
    DMatrix::from_fn(n, n, |s, t| u[g.mul(s, g.inverse(t))])
}

#[cfg(test)]
mod tests;
