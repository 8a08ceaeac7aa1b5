//! The commutative and co-commutative finite quantum groups attached to a
//! finite group `G`, acting on `ℓ²(G)`.
//!
//! In the commutative case the ambient algebra is `L∞(G)` (diagonal
//! matrices), the dual is `VN(G) = span{λ_s}` and the fundamental unitary is
//! `W δ_{s,t} = δ_{s,st}`. The co-commutative case swaps the two algebras and
//! uses `Ŵ = Σ W* Σ`. Haar weights are counting measure and carry no data.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::tensor::{
    embed_legs, flip_sigma, AlgebraSpan, Functional, LegSlice, Operator, TensorSpace, C64,
};

/// Tolerance used when certifying a freshly built realization.
pub const CERTIFY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RealizationKind {
    Commutative,
    Cocommutative,
    Custom,
}

impl RealizationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RealizationKind::Commutative => "commutative",
            RealizationKind::Cocommutative => "cocommutative",
            RealizationKind::Custom => "custom",
        }
    }
}

impl std::fmt::Display for RealizationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RealizationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "commutative" | "comm" => Ok(Self::Commutative),
            "cocommutative" | "cocomm" => Ok(Self::Cocommutative),
            "custom" => Ok(Self::Custom),
            other => Err(Error::Format(format!("unknown realization kind `{other}`"))),
        }
    }
}

/// Left regular representation: `λ_s δ_t = δ_{st}`.
pub fn lambda(g: &FiniteGroup, s: usize) -> Result<Operator> {
    check_element(g, s)?;
    let space = TensorSpace::single(g.order())?;
    Operator::permutation(space, g.elements().map(|t| g.mul(s, t)).collect())
}

/// Right regular representation: `ρ_r δ_t = δ_{tr⁻¹}`, so `(ρ_r ξ)(t) = ξ(tr)`.
pub fn rho(g: &FiniteGroup, r: usize) -> Result<Operator> {
    check_element(g, r)?;
    let space = TensorSpace::single(g.order())?;
    let r_inv = g.inverse(r);
    Operator::permutation(space, g.elements().map(|t| g.mul(t, r_inv)).collect())
}

/// Multiplication operator `M_a`.
pub fn mult(values: &[C64]) -> Result<Operator> {
    Operator::diagonal(TensorSpace::single(values.len())?, values.to_vec())
}

fn check_element(g: &FiniteGroup, s: usize) -> Result<()> {
    if s >= g.order() {
        return Err(Error::IndexOutOfRange {
            index: s,
            bound: g.order(),
        });
    }
    Ok(())
}

fn unit_diagonals(n: usize) -> Result<Vec<Operator>> {
    let space = TensorSpace::single(n)?;
    (0..n)
        .map(|s| {
            let mut v = vec![C64::new(0.0, 0.0); n];
            v[s] = C64::new(1.0, 0.0);
            Operator::diagonal(space.clone(), v)
        })
        .collect()
}

/// Which regular generator to build.
#[derive(Clone, Debug)]
pub enum Generator {
    Lambda(usize),
    Rho(usize),
    Mult(Vec<C64>),
}

/// Pass/fail with the residual that decided it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub holds: bool,
    pub residual: f64,
}

impl Check {
    pub(crate) fn within(residual: f64, scale: f64, tol: f64) -> Self {
        Self {
            holds: residual <= tol * scale.max(1.0),
            residual,
        }
    }

    pub(crate) fn and(self, other: Check) -> Check {
        Check {
            holds: self.holds && other.holds,
            residual: self.residual.max(other.residual),
        }
    }

    pub(crate) fn pass() -> Check {
        Check {
            holds: true,
            residual: 0.0,
        }
    }
}

/// Every structural invariant of a realization, evaluated numerically.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxiomReport {
    pub w_unitary: Check,
    pub v_unitary: Check,
    pub w_hat_unitary: Check,
    pub w_hat_is_flipped_adjoint: Check,
    /// `W ∈ B(H) ⊗ dual`, via its left slices.
    pub w_in_dual_leg: Check,
    /// `Ŵ ∈ dual ⊗ B(H)`, via its right slices.
    pub w_hat_in_dual_leg: Check,
    /// `V ∈ dual' ⊗ B(H)`, via its right slices.
    pub v_in_dual_commutant_leg: Check,
    pub defining_property: Check,
    pub pentagon: Check,
    pub coassociativity: Check,
    pub scalar_intersection: Check,
    pub reduced_space_is_dual: Check,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.holds)
    }

    pub fn checks(&self) -> Vec<(&'static str, Check)> {
        vec![
            ("w_unitary", self.w_unitary),
            ("v_unitary", self.v_unitary),
            ("w_hat_unitary", self.w_hat_unitary),
            ("w_hat_is_flipped_adjoint", self.w_hat_is_flipped_adjoint),
            ("w_in_dual_leg", self.w_in_dual_leg),
            ("w_hat_in_dual_leg", self.w_hat_in_dual_leg),
            ("v_in_dual_commutant_leg", self.v_in_dual_commutant_leg),
            ("defining_property", self.defining_property),
            ("pentagon", self.pentagon),
            ("coassociativity", self.coassociativity),
            ("scalar_intersection", self.scalar_intersection),
            ("reduced_space_is_dual", self.reduced_space_is_dual),
        ]
    }
}

/// A finite quantum group: ambient algebra `M`, dual, commutants and the
/// unitaries `W`, `V`, `Ŵ` on `H ⊗ H`.
#[derive(Debug)]
pub struct Realization {
    kind: RealizationKind,
    group: Option<FiniteGroup>,
    ambient: Arc<AlgebraSpan>,
    dual: Arc<AlgebraSpan>,
    commutant: Arc<AlgebraSpan>,
    dual_commutant: Arc<AlgebraSpan>,
    w: Operator,
    v: Operator,
    w_hat: Operator,
    ambient_squared: OnceLock<Arc<AlgebraSpan>>,
    reduced: OnceLock<Arc<AlgebraSpan>>,
}

fn pair_index(n: usize, s: usize, t: usize) -> usize {
    s * n + t
}

/// `W δ_{s,t} = δ_{s,st}`.
fn commutative_w(g: &FiniteGroup) -> Result<Operator> {
    let n = g.order();
    let targets = (0..n * n)
        .map(|i| {
            let (s, t) = (i / n, i % n);
            pair_index(n, s, g.mul(s, t))
        })
        .collect();
    Operator::permutation(TensorSpace::uniform(n, 2)?, targets)
}

/// `V δ_{s,t} = δ_{st⁻¹,t}`, i.e. `V* δ_{s,t} = δ_{st,t}`.
fn commutative_v(g: &FiniteGroup) -> Result<Operator> {
    let n = g.order();
    let targets = (0..n * n)
        .map(|i| {
            let (s, t) = (i / n, i % n);
            pair_index(n, g.mul(s, g.inverse(t)), t)
        })
        .collect();
    Operator::permutation(TensorSpace::uniform(n, 2)?, targets)
}

fn lambda_span(g: &FiniteGroup, label: &str) -> Result<AlgebraSpan> {
    AlgebraSpan::new_unchecked(label, g.elements().map(|s| lambda(g, s)).collect::<Result<_>>()?)
}

fn rho_span(g: &FiniteGroup, label: &str) -> Result<AlgebraSpan> {
    AlgebraSpan::new_unchecked(label, g.elements().map(|r| rho(g, r)).collect::<Result<_>>()?)
}

fn diagonal_span(n: usize, label: &str) -> Result<AlgebraSpan> {
    AlgebraSpan::new_unchecked(label, unit_diagonals(n)?)
}

impl Realization {
    /// `L∞(G)` with `Γ(a)(s,t) = a(st)`.
    pub fn commutative(g: &FiniteGroup) -> Result<Self> {
        let n = g.order();
        let w = commutative_w(g)?;
        let v = commutative_v(g)?;
        let w_hat = flip_sigma(&w.adjoint())?;
        let r = Self {
            kind: RealizationKind::Commutative,
            group: Some(g.clone()),
            ambient: Arc::new(diagonal_span(n, "L∞(G)")?),
            dual: Arc::new(lambda_span(g, "VN(G)")?),
            commutant: Arc::new(diagonal_span(n, "L∞(G)'")?),
            dual_commutant: Arc::new(rho_span(g, "VN(G)'")?),
            w,
            v,
            w_hat,
            ambient_squared: OnceLock::new(),
            reduced: OnceLock::new(),
        };
        r.certify()?;
        Ok(r)
    }

    /// `VN(G)` with `Γ(λ_s) = λ_s ⊗ λ_s`; `W` is `Σ W* Σ` of the commutative one.
    pub fn cocommutative(g: &FiniteGroup) -> Result<Self> {
        let n = g.order();
        let w_comm = commutative_w(g)?;
        let w = flip_sigma(&w_comm.adjoint())?;
        let w_hat = flip_sigma(&w.adjoint())?;
        let r = Self {
            kind: RealizationKind::Cocommutative,
            group: Some(g.clone()),
            ambient: Arc::new(lambda_span(g, "VN(G)")?),
            dual: Arc::new(diagonal_span(n, "L∞(G)")?),
            commutant: Arc::new(rho_span(g, "VN(G)'")?),
            dual_commutant: Arc::new(diagonal_span(n, "L∞(G)'")?),
            w,
            // V(b ⊗ 1)V* = Γ(b) forces V = Σ_t e_tt ⊗ λ_t
            v: w_comm,
            w_hat,
            ambient_squared: OnceLock::new(),
            reduced: OnceLock::new(),
        };
        r.certify()?;
        Ok(r)
    }

    pub fn build(kind: RealizationKind, g: &FiniteGroup) -> Result<Self> {
        match kind {
            RealizationKind::Commutative => Self::commutative(g),
            RealizationKind::Cocommutative => Self::cocommutative(g),
            RealizationKind::Custom => Err(Error::Unsupported(
                "custom realizations need an explicit ambient basis and unitaries".into(),
            )),
        }
    }

    /// User-supplied realization, accepted only if every axiom holds at `tol`.
    ///
    /// The dual is spanned by the left slices of `W`; commutants are computed
    /// numerically.
    pub fn custom(ambient: AlgebraSpan, w: Operator, v: Operator, tol: f64) -> Result<Self> {
        let n = ambient.space().total();
        let single = TensorSpace::single(n)?;
        let ambient = AlgebraSpan::new(
            ambient.label().to_string(),
            ambient
                .basis()
                .iter()
                .map(|b| b.reshaped(single.clone()))
                .collect::<Result<_>>()?,
        )?;
        let pair = TensorSpace::uniform(n, 2)?;
        let w = w.reshaped(pair.clone())?;
        let v = v.reshaped(pair)?;
        let left_slices = Functional::entry_basis(n)
            .iter()
            .map(|f| crate::tensor::slice(&[LegSlice::Apply(f), LegSlice::Keep], &w))
            .collect::<Result<Vec<_>>>()?;
        let dual = AlgebraSpan::from_candidates("dual", left_slices, 1e-9)?;
        let commutant = ambient.commutant("M'", tol)?;
        let dual_commutant = dual.commutant("dual'", tol)?;
        let w_hat = flip_sigma(&w.adjoint())?;
        let r = Self {
            kind: RealizationKind::Custom,
            group: None,
            ambient: Arc::new(ambient),
            dual: Arc::new(dual),
            commutant: Arc::new(commutant),
            dual_commutant: Arc::new(dual_commutant),
            w,
            v,
            w_hat,
            ambient_squared: OnceLock::new(),
            reduced: OnceLock::new(),
        };
        let report = r.check_axioms(tol)?;
        if let Some((name, check)) = report.checks().into_iter().find(|(_, c)| !c.holds) {
            return Err(Error::Certification(format!(
                "{name} fails with residual {:.3e}",
                check.residual
            )));
        }
        Ok(r)
    }

    /// Certifies `Γ(M) ⊆ M ⊗ M` on the ambient basis.
    fn certify(&self) -> Result<()> {
        let check = self.defining_property(CERTIFY_TOL)?;
        if !check.holds {
            return Err(Error::Certification(format!(
                "W*(1⊗a)W leaves the ambient tensor square (residual {:.3e})",
                check.residual
            )));
        }
        if self.kind == RealizationKind::Cocommutative {
            let g = self.require_group()?;
            for s in g.elements() {
                let l = lambda(g, s)?;
                let gamma = self.gamma_unchecked(&l)?;
                let diag = gamma.distance(&crate::tensor::kron(&l, &l)?)?;
                let flip = gamma.distance(&flip_sigma(&gamma)?)?;
                if diag.max(flip) > CERTIFY_TOL {
                    return Err(Error::Certification(format!(
                        "Γ(λ_{s}) is not λ_{s}⊗λ_{s} (residual {:.3e})",
                        diag.max(flip)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> RealizationKind {
        self.kind
    }

    pub fn group(&self) -> Option<&FiniteGroup> {
        self.group.as_ref()
    }

    pub(crate) fn require_group(&self) -> Result<&FiniteGroup> {
        self.group
            .as_ref()
            .ok_or_else(|| Error::Unsupported("a realization without an underlying group".into()))
    }

    /// Dimension of `H`.
    pub fn h_dim(&self) -> usize {
        self.ambient.space().total()
    }

    pub fn ambient(&self) -> &Arc<AlgebraSpan> {
        &self.ambient
    }

    pub fn dual(&self) -> &Arc<AlgebraSpan> {
        &self.dual
    }

    pub fn commutant(&self) -> &Arc<AlgebraSpan> {
        &self.commutant
    }

    pub fn dual_commutant(&self) -> &Arc<AlgebraSpan> {
        &self.dual_commutant
    }

    pub fn w(&self) -> &Operator {
        &self.w
    }

    pub fn v(&self) -> &Operator {
        &self.v
    }

    pub fn w_hat(&self) -> &Operator {
        &self.w_hat
    }

    fn single_space(&self) -> TensorSpace {
        self.ambient.space().clone()
    }

    pub fn pair_space(&self) -> TensorSpace {
        let s = self.single_space();
        s.concat(&s)
    }

    /// `M ⊗ M`, built on first use.
    pub fn ambient_squared(&self) -> Result<&Arc<AlgebraSpan>> {
        if let Some(s) = self.ambient_squared.get() {
            return Ok(s);
        }
        let span = Arc::new(self.ambient.tensor(&self.ambient)?);
        Ok(self.ambient_squared.get_or_init(|| span))
    }

    pub fn generator(&self, which: &Generator) -> Result<Operator> {
        let g = self.require_group()?;
        match which {
            Generator::Lambda(s) => lambda(g, *s),
            Generator::Rho(r) => rho(g, *r),
            Generator::Mult(values) => {
                if values.len() != g.order() {
                    return Err(Error::DimensionMismatch(format!(
                        "{} function values on a group of order {}",
                        values.len(),
                        g.order()
                    )));
                }
                mult(values)
            }
        }
    }

    fn require_ambient(&self, a: &Operator) -> Result<()> {
        let m = self.ambient.membership(a, crate::tensor::DEFAULT_TOL)?;
        if !m.member {
            return Err(Error::NotInAmbient {
                span: self.ambient.label().to_string(),
                residual: m.residual,
            });
        }
        Ok(())
    }

    /// `Γ_W(a) = W*(1 ⊗ a)W`, with no membership check.
    pub(crate) fn gamma_unchecked(&self, a: &Operator) -> Result<Operator> {
        let a = a.reshaped(self.single_space())?;
        let lifted = embed_legs(&a, &[1], &self.pair_space())?;
        self.w.adjoint().mul(&lifted)?.mul(&self.w)
    }

    /// `Γ(a)`, or `Γ_op(a) = σ(Γ(a))` when `opposite` is set.
    pub fn comultiply(&self, a: &Operator, opposite: bool) -> Result<Operator> {
        self.require_ambient(a)?;
        let gamma = self.gamma_unchecked(a)?;
        if opposite {
            flip_sigma(&gamma)
        } else {
            Ok(gamma)
        }
    }

    /// `Γ'_V(b) = V(b ⊗ 1)V*`.
    pub fn comultiply_right(&self, b: &Operator) -> Result<Operator> {
        let b = b.reshaped(self.single_space())?;
        let lifted = embed_legs(&b, &[0], &self.pair_space())?;
        self.v.mul(&lifted)?.mul(&self.v.adjoint())
    }

    /// `A(W, Ŵ) = span{(f ⊗ id)(W) · (id ⊗ g)(Ŵ)}` over all entry functionals.
    pub fn reduced_space(&self) -> Result<&Arc<AlgebraSpan>> {
        if let Some(s) = self.reduced.get() {
            return Ok(s);
        }
        let n = self.h_dim();
        let basis = Functional::entry_basis(n);
        let left: Vec<Operator> = basis
            .iter()
            .map(|f| crate::tensor::slice(&[LegSlice::Apply(f), LegSlice::Keep], &self.w))
            .collect::<Result<_>>()?;
        let right: Vec<Operator> = basis
            .iter()
            .map(|g| crate::tensor::slice(&[LegSlice::Keep, LegSlice::Apply(g)], &self.w_hat))
            .collect::<Result<_>>()?;
        let left = AlgebraSpan::from_candidates("L", left, 1e-9)?;
        let right = AlgebraSpan::from_candidates("R", right, 1e-9)?;
        let mut products = Vec::with_capacity(left.dim() * right.dim());
        for a in left.basis() {
            for b in right.basis() {
                products.push(a.mul(b)?);
            }
        }
        let span = AlgebraSpan::from_candidates("A(W,Ŵ)", products, 1e-9)?;
        if self.kind != RealizationKind::Custom {
            let inside = self.dual.contains_span(&span, CERTIFY_TOL)?;
            if !inside.member || span.dim() != self.dual.dim() {
                return Err(Error::Certification(format!(
                    "reduced space has dimension {} but the dual has {}",
                    span.dim(),
                    self.dual.dim()
                )));
            }
        }
        let span = Arc::new(span);
        Ok(self.reduced.get_or_init(|| span))
    }

    pub fn defining_property(&self, tol: f64) -> Result<Check> {
        let square = self.ambient_squared()?;
        let mut check = Check::pass();
        for b in self.ambient.basis() {
            let gamma = self.gamma_unchecked(b)?;
            let m = square.membership(&gamma, tol)?;
            check = check.and(Check {
                holds: m.member,
                residual: m.residual,
            });
        }
        Ok(check)
    }

    /// Worst membership residual of the slices of `u` taken on `leg` against `span`.
    fn slices_in(&self, u: &Operator, sliced_leg: usize, span: &AlgebraSpan, tol: f64) -> Result<Check> {
        let mut check = Check::pass();
        for f in Functional::entry_basis(self.h_dim()) {
            let positions = if sliced_leg == 0 {
                [LegSlice::Apply(&f), LegSlice::Keep]
            } else {
                [LegSlice::Keep, LegSlice::Apply(&f)]
            };
            let s = crate::tensor::slice(&positions, u)?;
            let m = span.membership(&s, tol)?;
            check = check.and(Check {
                holds: m.member,
                residual: m.residual,
            });
        }
        Ok(check)
    }

    pub fn pentagon(&self, tol: f64) -> Result<Check> {
        let n = self.h_dim();
        let triple = TensorSpace::uniform(n, 3)?;
        let w12 = embed_legs(&self.w, &[0, 1], &triple)?;
        let w13 = embed_legs(&self.w, &[0, 2], &triple)?;
        let w23 = embed_legs(&self.w, &[1, 2], &triple)?;
        let lhs = w12.mul(&w13)?.mul(&w23)?;
        let rhs = w23.mul(&w12)?;
        let residual = lhs.distance(&rhs)?;
        Ok(Check::within(residual, rhs.frobenius_norm(), tol))
    }

    /// `(Γ ⊗ id)Γ = (id ⊗ Γ)Γ` on the ambient basis.
    pub fn coassociativity(&self, tol: f64) -> Result<Check> {
        let n = self.h_dim();
        let triple = TensorSpace::uniform(n, 3)?;
        let w12 = embed_legs(&self.w, &[0, 1], &triple)?;
        let w23 = embed_legs(&self.w, &[1, 2], &triple)?;
        let mut check = Check::pass();
        for b in self.ambient.basis() {
            let gamma = self.gamma_unchecked(b)?;
            let left = w12
                .adjoint()
                .mul(&embed_legs(&gamma, &[1, 2], &triple)?)?
                .mul(&w12)?;
            let right = w23
                .adjoint()
                .mul(&embed_legs(&gamma, &[0, 2], &triple)?)?
                .mul(&w23)?;
            check = check.and(Check::within(left.distance(&right)?, left.frobenius_norm(), tol));
        }
        Ok(check)
    }

    pub fn check_axioms(&self, tol: f64) -> Result<AxiomReport> {
        let unitary = |u: &Operator| -> Result<Check> {
            Ok(Check::within(u.unitarity_defect()?, 1.0, tol))
        };
        let flipped = flip_sigma(&self.w.adjoint())?;
        let intersection = self.dual.intersection_dim(&self.ambient, 1e-10)?;
        let reduced = self.reduced_space()?;
        let reduced_in_dual = self.dual.contains_span(reduced, tol)?;
        let dims_equal = reduced.dim() == self.dual.dim();
        Ok(AxiomReport {
            w_unitary: unitary(&self.w)?,
            v_unitary: unitary(&self.v)?,
            w_hat_unitary: unitary(&self.w_hat)?,
            w_hat_is_flipped_adjoint: Check::within(flipped.distance(&self.w_hat)?, 1.0, tol),
            w_in_dual_leg: self.slices_in(&self.w, 0, &self.dual, tol)?,
            w_hat_in_dual_leg: self.slices_in(&self.w_hat, 1, &self.dual, tol)?,
            v_in_dual_commutant_leg: self.slices_in(&self.v, 1, &self.dual_commutant, tol)?,
            defining_property: self.defining_property(tol)?,
            pentagon: self.pentagon(tol)?,
            coassociativity: self.coassociativity(tol)?,
            scalar_intersection: Check {
                holds: intersection == 1,
                residual: (intersection as f64 - 1.0).abs(),
            },
            reduced_space_is_dual: Check {
                holds: reduced_in_dual.member && dims_equal,
                residual: reduced_in_dual.residual
                    + (reduced.dim() as f64 - self.dual.dim() as f64).abs(),
            },
        })
    }

    /// `W` as a list of index-pair moves `((s,t), (s',t'))`, when it is a permutation.
    pub fn w_pairs(&self) -> Option<Vec<[[usize; 2]; 2]>> {
        let n = self.h_dim();
        let targets = self.w.as_permutation()?;
        Some(
            targets
                .iter()
                .enumerate()
                .map(|(from, &to)| [[from / n, from % n], [to / n, to % n]])
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests;
