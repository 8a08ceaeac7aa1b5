//! When does `Φ_χ` leave the dual algebra invariant?
//!
//! Each criterion is computed independently so that disagreement surfaces:
//! the direct test on the reduced space, the symbolic test that
//! `T((Γ ⊗ Γ_op)(χ))` is trivial in the middle leg, the support test in the
//! co-commutative case and translation invariance in the commutative case.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::realization::{lambda, rho, Check, Realization, RealizationKind};
use crate::symbol::{lift, phi_apply, t_map, Symbol, SymbolAmbient};
use crate::tensor::{embed_legs, AlgebraSpan, Operator, TensorSpace, C64};

/// Absolute floor under the relative support cutoff.
pub const SUPPORT_FLOOR: f64 = 1e-13;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Which equivalence a report speaks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremTag {
    #[serde(rename = "2.3")]
    General,
    #[serde(rename = "3.2")]
    QuantumGroup,
    #[serde(rename = "4.3")]
    Cocommutative,
    #[serde(rename = "5.6")]
    Commutative,
}

impl TheoremTag {
    pub fn for_kind(kind: RealizationKind) -> Self {
        match kind {
            RealizationKind::Commutative => TheoremTag::Commutative,
            RealizationKind::Cocommutative => TheoremTag::Cocommutative,
            RealizationKind::Custom => TheoremTag::QuantumGroup,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremTag::General => "2.3",
            TheoremTag::QuantumGroup => "3.2",
            TheoremTag::Cocommutative => "4.3",
            TheoremTag::Commutative => "5.6",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "2.3" | "general" => Ok(TheoremTag::General),
            "3.2" | "quantum" => Ok(TheoremTag::QuantumGroup),
            "4.3" | "cocommutative" => Ok(TheoremTag::Cocommutative),
            "5.6" | "commutative" => Ok(TheoremTag::Commutative),
            other => Err(Error::Format(format!("unknown theorem tag `{other}`"))),
        }
    }
}

/// Pairs `(s, t)` of group-element indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportSet {
    pub pairs: BTreeSet<(usize, usize)>,
}

impl SupportSet {
    pub fn is_subset(&self, other: &SupportSet) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Complex weights on the group elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    #[serde(with = "crate::io::complex_vec")]
    pub weights: Vec<C64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Residuals {
    pub direct: f64,
    pub symbolic: f64,
    pub closed_form: Option<f64>,
    /// `T((Γ ⊗ Γ_op)(χ))` against `(id ⊗ σ)(χ ⊗ 1)`.
    pub flip_identity: f64,
    /// Closed-form coefficients against the computed `T((Γ ⊗ Γ_op)(χ))`.
    pub oracle: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Tolerances {
    pub membership: f64,
    pub support: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub theorem: TheoremTag,
    pub direct: bool,
    pub symbolic: bool,
    pub closed_form: Option<bool>,
    pub flip_identity: bool,
    pub oracle_agrees: Option<bool>,
    pub agree: bool,
    pub residuals: Residuals,
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
}

/// Tests `Φ_χ(x) ∈ dual` for every basis element `x` of the reduced space.
pub fn check_direct(r: &Realization, chi: &Symbol, tol: f64) -> Result<Check> {
    check_tol(tol)?;
    let reduced = r.reduced_space()?;
    let mut check = Check::pass();
    for x in reduced.basis() {
        let y = phi_apply(chi, x)?;
        let m = r.dual().membership(&y, tol)?;
        check = check.and(Check {
            holds: m.member,
            residual: m.residual,
        });
    }
    Ok(check)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    Ok(())
}

/// How the middle-leg membership is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SymbolicPath {
    /// Middle-leg slices; never forms the three-leg operator.
    #[default]
    Sliced,
    /// Dense membership in `span(M ⊗ 1 ⊗ M)`; for cross-validation on small groups.
    Dense,
}

/// Middle slices `S_{r,r'} = (id ⊗ ω_{r,r'} ⊗ id)(T(ψ))` for the matrix-unit
/// functionals, handed to `visit` one middle row at a time.
///
/// `T(ψ)[(s,r,t),(s',r',t')] = Σ_q X[(s,r),(s',q)] Y[(q,t),(r',t')]`, so each
/// slice accumulates from the nonzeros of the factors without building the
/// three-leg operator. Slices are `n² × n²` over the outer index pairs.
pub fn for_each_middle_slice(
    psi: &Symbol,
    mut visit: impl FnMut(usize, usize, &DMatrix<C64>) -> Result<()>,
) -> Result<()> {
    let dims = psi.space().dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(Error::DimensionMismatch(format!(
            "middle slices need a symbol over two equal legs, got {dims:?}"
        )));
    }
    let n = dims[0];
    crate::tensor::check_budget(n * n * n * n * n, crate::tensor::dense_budget())?;
    // per term: X nonzeros grouped by middle row r as (s, s', q, v),
    // Y nonzeros grouped by q as (t, r', t', v)
    let mut grouped = Vec::with_capacity(psi.len());
    for (x, y) in psi.terms() {
        let mut xs: Vec<Vec<(usize, usize, usize, C64)>> = vec![Vec::new(); n];
        for (row, col, v) in x.nonzeros() {
            xs[row % n].push((row / n, col / n, col % n, v));
        }
        let mut ys: Vec<Vec<(usize, usize, usize, C64)>> = vec![Vec::new(); n];
        for (row, col, v) in y.nonzeros() {
            ys[row / n].push((row % n, col / n, col % n, v));
        }
        grouped.push((xs, ys));
    }
    let m = n * n;
    let mut slices = vec![DMatrix::<C64>::zeros(m, m); n];
    for r in 0..n {
        for s in slices.iter_mut() {
            s.fill(ZERO);
        }
        for (xs, ys) in &grouped {
            for &(s, s2, q, xv) in &xs[r] {
                for &(t, r2, t2, yv) in &ys[q] {
                    slices[r2][(s * n + t, s2 * n + t2)] += xv * yv;
                }
            }
        }
        for (r2, s) in slices.iter().enumerate() {
            visit(r, r2, s)?;
        }
    }
    Ok(())
}

/// Residual of `ψ` from `span(M ⊗ 1 ⊗ M)` via middle slices, and `‖T(ψ)‖_F`.
fn sliced_membership(r: &Realization, psi: &Symbol, tol: f64) -> Result<(f64, f64)> {
    let n = r.h_dim();
    let m = n * n;
    let mut off = 0.0;
    let mut total = 0.0;
    let mut diagonal: Vec<DMatrix<C64>> = Vec::with_capacity(n);
    for_each_middle_slice(psi, |row, col, s| {
        let sq = s.norm_squared();
        total += sq;
        if row == col {
            diagonal.push(s.clone());
        } else {
            off += sq;
        }
        Ok(())
    })?;
    let mut mean = DMatrix::<C64>::zeros(m, m);
    for d in &diagonal {
        mean += d;
    }
    mean /= C64::new(n as f64, 0.0);
    let deviation: f64 = diagonal.iter().map(|d| (d - &mean).norm_squared()).sum();
    let s0 = Operator::dense(TensorSpace::uniform(n, 2)?, mean)?;
    let outside = r.ambient_squared()?.membership(&s0, tol)?.residual;
    let residual = (off + deviation + n as f64 * outside * outside).sqrt();
    Ok((residual, total.sqrt()))
}

/// Tests `T((Γ ⊗ Γ_op)(χ)) ∈ M ⊗ 1 ⊗ M`.
pub fn check_symbolic(r: &Realization, chi: &Symbol, tol: f64) -> Result<Check> {
    check_symbolic_with(r, chi, tol, SymbolicPath::Sliced)
}

pub fn check_symbolic_with(
    r: &Realization,
    chi: &Symbol,
    tol: f64,
    path: SymbolicPath,
) -> Result<Check> {
    check_tol(tol)?;
    let psi = lift(r, chi)?;
    match path {
        SymbolicPath::Sliced => {
            let (residual, norm) = sliced_membership(r, &psi, tol)?;
            Ok(Check::within(residual, norm, tol))
        }
        SymbolicPath::Dense => {
            let t = t_map(&psi)?;
            let span = outer_span(r)?;
            let m = span.membership(&t, tol)?;
            Ok(Check {
                holds: m.member,
                residual: m.residual,
            })
        }
    }
}

/// `span{a ⊗ 1 ⊗ b}` over the ambient basis, as dense three-leg operators.
fn outer_span(r: &Realization) -> Result<AlgebraSpan> {
    let n = r.h_dim();
    let triple = TensorSpace::uniform(n, 3)?;
    let mut basis = Vec::new();
    for a in r.ambient().basis() {
        for b in r.ambient().basis() {
            let ab = crate::tensor::kron(a, b)?.reshaped(TensorSpace::uniform(n, 2)?)?;
            basis.push(embed_legs(&ab, &[0, 2], &triple)?);
        }
    }
    AlgebraSpan::from_candidates("M⊗1⊗M", basis, 1e-9)
}

/// Residual of `T((Γ ⊗ Γ_op)(χ))` from `(id ⊗ σ)(χ ⊗ 1)`, i.e. the
/// flattening of `χ` placed on the outer legs.
pub fn flip_identity_residual(r: &Realization, chi: &Symbol, tol: f64) -> Result<Check> {
    let psi = lift(r, chi)?;
    let flat = chi.flatten()?.to_dense()?;
    let mut sq = 0.0;
    let mut total = 0.0;
    for_each_middle_slice(&psi, |row, col, s| {
        total += s.norm_squared();
        sq += if row == col {
            (s - &flat).norm_squared()
        } else {
            s.norm_squared()
        };
        Ok(())
    })?;
    Ok(Check::within(sq.sqrt(), total.sqrt(), tol))
}

/// Coefficients `c(s,t) = ⟨χ, λ_s ⊗ λ_t⟩ / n²` of a co-commutative symbol.
pub fn coefficients(r: &Realization, chi: &Symbol) -> Result<DMatrix<C64>> {
    let g = require_kind(r, RealizationKind::Cocommutative)?;
    let n = g.order();
    let flat = chi.flatten()?;
    let mut c = DMatrix::zeros(n, n);
    for (row, col, v) in flat.nonzeros() {
        let (i, k) = (row / n, row % n);
        let (x, y) = (col / n, col % n);
        // kron(λ_s, λ_t) sends (x, y) to (sx, ty)
        let s = g.mul(i, g.inverse(x));
        let t = g.mul(k, g.inverse(y));
        c[(s, t)] += v;
    }
    Ok(c / C64::new((n * n) as f64, 0.0))
}

fn require_kind(r: &Realization, kind: RealizationKind) -> Result<&FiniteGroup> {
    if r.kind() != kind {
        return Err(Error::WrongKind {
            expected: kind.as_str().to_string(),
            found: r.kind().as_str().to_string(),
        });
    }
    r.require_group()
}

/// Nonzero coefficients against `λ_s ⊗ λ_t`, relative to the largest.
pub fn support_of(r: &Realization, chi: &Symbol, tol: f64) -> Result<SupportSet> {
    let c = coefficients(r, chi)?;
    let max = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let cut = (tol * max).max(SUPPORT_FLOOR);
    let n = c.nrows();
    let mut pairs = BTreeSet::new();
    for s in 0..n {
        for t in 0..n {
            if c[(s, t)].norm() > cut {
                pairs.insert((s, t));
            }
        }
    }
    Ok(SupportSet { pairs })
}

/// `{(s, s⁻¹)}`.
pub fn anti_diagonal(g: &FiniteGroup) -> SupportSet {
    SupportSet {
        pairs: g.elements().map(|s| (s, g.inverse(s))).collect(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AntidiagonalCheck {
    pub holds: bool,
    pub support: SupportSet,
    /// The flip identity, evaluated when the support test passes.
    pub identity: Option<Check>,
}

pub fn check_antidiagonal(r: &Realization, chi: &Symbol, tol: f64) -> Result<AntidiagonalCheck> {
    let g = require_kind(r, RealizationKind::Cocommutative)?;
    let support = support_of(r, chi, tol)?;
    let holds = support.is_subset(&anti_diagonal(g));
    let identity = if holds {
        Some(flip_identity_residual(r, chi, tol)?)
    } else {
        None
    };
    Ok(AntidiagonalCheck {
        holds,
        support,
        identity,
    })
}

/// `χ = Σ_s μ(s) λ_s ⊗ λ_s*`, so that `Φ_χ(x) = Σ μ(s) λ_s x λ_s*`.
pub fn measure_to_symbol(r: &Realization, mu: &Measure) -> Result<Symbol> {
    let g = require_kind(r, RealizationKind::Cocommutative)?;
    if mu.weights.len() != g.order() {
        return Err(Error::DimensionMismatch(format!(
            "measure with {} weights on a group of order {}",
            mu.weights.len(),
            g.order()
        )));
    }
    let mut terms = Vec::new();
    for (s, &w) in mu.weights.iter().enumerate() {
        if w == ZERO {
            continue;
        }
        terms.push((lambda(g, s)?.scale(w), lambda(g, g.inverse(s))?));
    }
    if terms.is_empty() {
        let zero = lambda(g, g.identity())?.scale(ZERO);
        terms.push((zero.clone(), zero));
    }
    Symbol::new(terms, SymbolAmbient::Span(r.ambient().clone()))
}

/// Reads `μ(s)` off the flattening; fails when the support leaves the anti-diagonal.
///
/// The coefficient of `λ_s ⊗ λ_{s⁻¹}` is the single entry of the flattening
/// at row `(s, s⁻¹)`, column `(e, e)`, since no other anti-diagonal basis
/// element reaches that position.
pub fn symbol_to_measure(r: &Realization, chi: &Symbol, tol: f64) -> Result<Measure> {
    let g = require_kind(r, RealizationKind::Cocommutative)?;
    let support = support_of(r, chi, tol)?;
    let nabla = anti_diagonal(g);
    if let Some(&(s, t)) = support.pairs.iter().find(|p| !nabla.pairs.contains(p)) {
        return Err(Error::SupportOffAntiDiagonal(s, t));
    }
    let n = g.order();
    let e = g.identity();
    let flat = chi.flatten()?;
    let weights = g
        .elements()
        .map(|s| flat.entry(s * n + g.inverse(s), e * n + e))
        .collect();
    Ok(Measure { weights })
}

/// `φ(s,t) = Σᵢ aᵢ(s) bᵢ(t)` for a commutative symbol.
pub fn schur_function(r: &Realization, chi: &Symbol) -> Result<DMatrix<C64>> {
    let g = require_kind(r, RealizationKind::Commutative)?;
    let n = g.order();
    let mut phi = DMatrix::zeros(n, n);
    for (a, b) in chi.terms() {
        for s in 0..n {
            let av = a.entry(s, s);
            if av == ZERO {
                continue;
            }
            for t in 0..n {
                phi[(s, t)] += av * b.entry(t, t);
            }
        }
    }
    Ok(phi)
}

/// `φ(sr, tr) = φ(s, t)` for every `r, s, t`, relative to `max|φ|`.
pub fn translation_invariance(g: &FiniteGroup, phi: &DMatrix<C64>, tol: f64) -> Result<Check> {
    let n = g.order();
    if phi.nrows() != n || phi.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "Schur function of shape {}x{} on a group of order {n}",
            phi.nrows(),
            phi.ncols()
        )));
    }
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for s in 0..n {
            for t in 0..n {
                worst = worst.max((phi[(g.mul(s, r), g.mul(t, r))] - phi[(s, t)]).norm());
            }
        }
    }
    let scale = phi.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(Check::within(worst, scale, tol))
}

/// `χ_r = Σ ρ_r aᵢ ρ_r* ⊗ ρ_r bᵢ ρ_r*`, whose Schur function is `φ(s r, t r)`.
pub fn translate(r: &Realization, chi: &Symbol, r0: usize) -> Result<Symbol> {
    let g = require_kind(r, RealizationKind::Commutative)?;
    let p = rho(g, r0)?;
    let pa = p.adjoint();
    let terms = chi
        .terms()
        .iter()
        .map(|(a, b)| Ok((p.mul(a)?.mul(&pa)?, p.mul(b)?.mul(&pa)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Symbol::unchecked(terms, chi.ambient().clone()))
}

/// Distance between `Φ_{χ_r}(x)` and `ρ_r Φ_χ(ρ_r* x ρ_r) ρ_r*`.
pub fn conjugation_identity_residual(
    r: &Realization,
    chi: &Symbol,
    r0: usize,
    x: &Operator,
) -> Result<f64> {
    let g = require_kind(r, RealizationKind::Commutative)?;
    // the translated symbol is built from its Schur function, independently of ρ
    let phi = schur_function(r, chi)?;
    let n = g.order();
    let shifted = DMatrix::from_fn(n, n, |s, t| phi[(g.mul(s, r0), g.mul(t, r0))]);
    let translated = crate::symbol::from_schur_function(r, &shifted)?;
    let lhs = phi_apply(&translated, x)?;
    let p = rho(g, r0)?;
    let pa = p.adjoint();
    let x = x.reshaped(p.space().clone())?;
    let inner = phi_apply(chi, &pa.mul(&x)?.mul(&p)?)?;
    let rhs = p.mul(&inner)?.mul(&pa)?;
    lhs.reshaped(rhs.space().clone())?.distance(&rhs)
}

/// Closed form of `T((Γ ⊗ Γ_op)(χ))` for the built-in realizations.
///
/// Commutative: the diagonal value at `(s, r, t)` is `φ(sr, tr)`.
/// Co-commutative: the coefficient of `λ_s ⊗ λ_m ⊗ λ_t` is `c(s, t)` when
/// `m = st` and zero otherwise.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    kind: RealizationKind,
    group: FiniteGroup,
    data: DMatrix<C64>,
}

impl ClosedForm {
    pub fn value(&self, s: usize, m: usize, t: usize) -> C64 {
        let g = &self.group;
        match self.kind {
            RealizationKind::Commutative => self.data[(g.mul(s, m), g.mul(t, m))],
            _ => {
                if g.mul(s, t) == m {
                    self.data[(s, t)]
                } else {
                    ZERO
                }
            }
        }
    }

    pub fn kind(&self) -> RealizationKind {
        self.kind
    }

    /// The middle slice `S_{r,r'}` this closed form predicts.
    fn expected_slice(&self, r: usize, r2: usize) -> DMatrix<C64> {
        let g = &self.group;
        let n = g.order();
        let mut out = DMatrix::zeros(n * n, n * n);
        match self.kind {
            RealizationKind::Commutative => {
                if r == r2 {
                    for s in 0..n {
                        for t in 0..n {
                            out[(s * n + t, s * n + t)] = self.value(s, r, t);
                        }
                    }
                }
            }
            _ => {
                // [λ_m]_{r,r'} = 1 exactly when m = r r'⁻¹
                let m = g.mul(r, g.inverse(r2));
                for s in 0..n {
                    for t in 0..n {
                        let c = self.value(s, m, t);
                        if c == ZERO {
                            continue;
                        }
                        for x in 0..n {
                            for y in 0..n {
                                out[(g.mul(s, x) * n + g.mul(t, y), x * n + y)] += c;
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn closed_form_oracle(r: &Realization, chi: &Symbol) -> Result<ClosedForm> {
    let data = match r.kind() {
        RealizationKind::Commutative => schur_function(r, chi)?,
        RealizationKind::Cocommutative => coefficients(r, chi)?,
        RealizationKind::Custom => {
            return Err(Error::Unsupported(
                "closed forms exist only for the built-in realizations".into(),
            ))
        }
    };
    Ok(ClosedForm {
        kind: r.kind(),
        group: r.require_group()?.clone(),
        data,
    })
}

/// Frobenius distance between the closed form and the computed
/// `T((Γ ⊗ Γ_op)(χ))`, slice by slice.
pub fn closed_form_residual(r: &Realization, chi: &Symbol) -> Result<Check> {
    let oracle = closed_form_oracle(r, chi)?;
    let psi = lift(r, chi)?;
    let mut sq = 0.0;
    let mut total = 0.0;
    for_each_middle_slice(&psi, |row, col, s| {
        total += s.norm_squared();
        sq += (s - oracle.expected_slice(row, col)).norm_squared();
        Ok(())
    })?;
    Ok(Check::within(sq.sqrt(), total.sqrt(), 1e-10))
}

/// Runs every applicable criterion and records whether they agree.
pub fn equivalence_report(r: &Realization, chi: &Symbol, tol: f64) -> Result<InvarianceReport> {
    check_tol(tol)?;
    let direct = check_direct(r, chi, tol)?;
    let symbolic = check_symbolic(r, chi, tol)?;
    let flip = flip_identity_residual(r, chi, tol)?;
    let closed = match r.kind() {
        RealizationKind::Cocommutative => {
            let g = r.require_group()?;
            let support = support_of(r, chi, tol)?;
            Some(Check {
                holds: support.is_subset(&anti_diagonal(g)),
                residual: off_support_mass(r, chi)?,
            })
        }
        RealizationKind::Commutative => {
            let phi = schur_function(r, chi)?;
            Some(translation_invariance(r.require_group()?, &phi, tol)?)
        }
        RealizationKind::Custom => None,
    };
    let oracle = match r.kind() {
        RealizationKind::Custom => None,
        _ => Some(closed_form_residual(r, chi)?),
    };
    let mut sides = vec![direct.holds, symbolic.holds, flip.holds];
    if let Some(c) = closed {
        sides.push(c.holds);
    }
    let agree = sides.iter().all(|&b| b == sides[0]) && oracle.is_none_or(|o| o.holds);
    Ok(InvarianceReport {
        theorem: TheoremTag::for_kind(r.kind()),
        direct: direct.holds,
        symbolic: symbolic.holds,
        closed_form: closed.map(|c| c.holds),
        flip_identity: flip.holds,
        oracle_agrees: oracle.map(|o| o.holds),
        agree,
        residuals: Residuals {
            direct: direct.residual,
            symbolic: symbolic.residual,
            closed_form: closed.map(|c| c.residual),
            flip_identity: flip.residual,
            oracle: oracle.map(|o| o.residual),
        },
        tolerances: Tolerances {
            membership: tol,
            support: tol,
        },
        seed: None,
    })
}

/// `(Σ_{st ≠ e} |c(s,t)|²)^{1/2}`, the coefficient mass off the anti-diagonal.
fn off_support_mass(r: &Realization, chi: &Symbol) -> Result<f64> {
    let g = r.require_group()?;
    let c = coefficients(r, chi)?;
    let mut sq = 0.0;
    for s in g.elements() {
        for t in g.elements() {
            if g.mul(s, t) != g.identity() {
                sq += c[(s, t)].norm_sqr();
            }
        }
    }
    Ok(sq.sqrt())
}
