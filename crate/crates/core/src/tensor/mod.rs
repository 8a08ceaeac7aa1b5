//! Leg-labelled complex linear algebra: tensor spaces, operators with sparse
//! storage classes, normal functionals, slice maps and span membership.

mod functional;
mod operator;
mod ops;
mod space;
mod span;

pub use nalgebra::Complex;

/// Complex scalar used throughout.
pub type C64 = Complex<f64>;

pub use functional::Functional;
pub use operator::{
    dense_budget, set_dense_budget, with_dense_budget, Operator, Storage, DEFAULT_DENSE_BUDGET, DENSE_BUDGET_ENV,
};
pub use ops::{
    embed_legs, embed_legs_within, evaluate, flip_sigma, kron, kron_within, middle_product,
    middle_product_within, permute_legs, slice, LegSlice,
};
pub use space::TensorSpace;
pub use span::{membership, AlgebraSpan, Membership, DEFAULT_TOL};
pub(crate) use operator::check_budget;
