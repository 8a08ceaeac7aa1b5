//! Finite-dimensional toolkit for symbols of completely bounded bimodule maps
//! over finite quantum groups.
//!
//! The crate builds the commutative (`L∞(G)`) and co-commutative (`VN(G)`)
//! realizations of a finite group, represents symbols `χ = Σ aᵢ ⊗ bᵢ` with
//! their maps `Φ_χ(x) = Σ aᵢ x bᵢ`, evaluates the middle-multiplication map
//! `T`, and checks when `Φ_χ` leaves the dual algebra invariant.

pub mod error;
pub mod groups;
pub mod invariance;
pub mod io;
pub mod norms;
pub mod random;
pub mod realization;
pub mod symbol;
pub mod tensor;

pub use error::{Error, Result};
pub use groups::{FiniteGroup, GroupSpec, ValidationReport, Violation};
pub use tensor::{AlgebraSpan, Functional, LegSlice, Membership, Operator, TensorSpace, C64};
pub use realization::{AxiomReport, Check, Generator, Realization, RealizationKind};
pub use symbol::{Symbol, SymbolAmbient};
pub use invariance::{InvarianceReport, Measure, SupportSet, TheoremTag};
pub use norms::{HaagerupBound, NormReport, NormResult};
