//! Shared fixtures for the criterion benchmarks in `benches/`.

use qsymbol_core::symbol::{lift, random_symbol};
use qsymbol_core::{random, FiniteGroup, GroupSpec, Realization, RealizationKind, Result, Symbol};

pub fn realization(kind: RealizationKind, spec: &str) -> Result<Realization> {
    Realization::build(kind, &FiniteGroup::build(&GroupSpec::parse(spec)?)?)
}

/// A seeded random symbol over `r` and its lift `(Γ ⊗ Γ_op)(χ)`.
pub fn lifted_symbol(r: &Realization, seed: u64) -> Result<(Symbol, Symbol)> {
    let chi = random_symbol(r, &mut random::rng(seed))?;
    let lifted = lift(r, &chi)?;
    Ok((chi, lifted))
}
