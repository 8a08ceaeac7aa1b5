use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::DMatrix;

use super::space::TensorSpace;
use super::C64;
use crate::error::{Error, Result};

/// Default cap on the number of complex entries any dense materialization may allocate.
pub const DEFAULT_DENSE_BUDGET: usize = 100_000_000;

/// Environment variable overriding [`DEFAULT_DENSE_BUDGET`].
pub const DENSE_BUDGET_ENV: &str = "QSYMBOL_MAX_DENSE";

// 0 means "not yet initialised from the environment".
static DENSE_BUDGET: AtomicUsize = AtomicUsize::new(0);

thread_local! {
    static SCOPED_BUDGET: std::cell::Cell<Option<usize>> = const { std::cell::Cell::new(None) };
}

/// Dense-entry budget used by the non-`_within` entry points: the innermost
/// [`with_dense_budget`] scope on this thread, else the process-wide value.
pub fn dense_budget() -> usize {
    if let Some(b) = SCOPED_BUDGET.with(|c| c.get()) {
        return b;
    }
    match DENSE_BUDGET.load(Ordering::Relaxed) {
        0 => {
            let budget = std::env::var(DENSE_BUDGET_ENV)
                .ok()
                .and_then(|v| v.trim().parse::<usize>().ok())
                .filter(|&v| v > 0)
                .unwrap_or(DEFAULT_DENSE_BUDGET);
            DENSE_BUDGET.store(budget, Ordering::Relaxed);
            budget
        }
        b => b,
    }
}

pub fn set_dense_budget(budget: usize) {
    DENSE_BUDGET.store(budget.max(1), Ordering::Relaxed);
}

/// Runs `f` with the dense budget replaced on the current thread only.
pub fn with_dense_budget<T>(budget: usize, f: impl FnOnce() -> T) -> T {
    struct Restore(Option<usize>);
    impl Drop for Restore {
        fn drop(&mut self) {
            SCOPED_BUDGET.with(|c| c.set(self.0));
        }
    }
    let _restore = Restore(SCOPED_BUDGET.with(|c| c.replace(Some(budget.max(1)))));
    f()
}

pub(crate) fn check_budget(entries: usize, budget: usize) -> Result<()> {
    if entries > budget {
        Err(Error::ResourceLimit {
            requested: entries,
            budget,
        })
    } else {
        Ok(())
    }
}

/// Backing store of an [`Operator`].
///
/// `Permutation` is a monomial matrix: column `j` holds `values[j]` at row
/// `targets[j]` and nothing else. Sparse storages are lossless.
#[derive(Clone, Debug)]
pub enum Storage {
    Dense(DMatrix<C64>),
    Permutation {
        targets: Vec<usize>,
        values: Vec<C64>,
    },
    Diagonal(Vec<C64>),
}

/// Linear operator on a leg-labelled tensor space.
#[derive(Clone, Debug)]
pub struct Operator {
    space: TensorSpace,
    storage: Storage,
}

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

impl Operator {
    pub fn dense(space: TensorSpace, matrix: DMatrix<C64>) -> Result<Self> {
        let n = space.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, space has total dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            space,
            storage: Storage::Dense(matrix),
        })
    }

    /// Permutation operator sending `e_j` to `e_{targets[j]}`.
    pub fn permutation(space: TensorSpace, targets: Vec<usize>) -> Result<Self> {
        let values = vec![ONE; targets.len()];
        Self::monomial(space, targets, values)
    }

    pub fn monomial(space: TensorSpace, targets: Vec<usize>, values: Vec<C64>) -> Result<Self> {
        let n = space.total();
        if targets.len() != n || values.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} on a space of dimension {n}",
                targets.len()
            )));
        }
        let mut seen = vec![false; n];
        for &t in &targets {
            if t >= n {
                return Err(Error::IndexOutOfRange { index: t, bound: n });
            }
            if std::mem::replace(&mut seen[t], true) {
                return Err(Error::Format(format!("target {t} repeated in permutation")));
            }
        }
        Ok(Self {
            space,
            storage: Storage::Permutation { targets, values },
        })
    }

    pub fn diagonal(space: TensorSpace, values: Vec<C64>) -> Result<Self> {
        if values.len() != space.total() {
            return Err(Error::DimensionMismatch(format!(
                "{} diagonal values for dimension {}",
                values.len(),
                space.total()
            )));
        }
        Ok(Self {
            space,
            storage: Storage::Diagonal(values),
        })
    }

    pub fn identity(space: TensorSpace) -> Self {
        Self::scalar(space, ONE)
    }

    pub fn zero(space: TensorSpace) -> Self {
        Self::scalar(space, ZERO)
    }

    pub fn scalar(space: TensorSpace, value: C64) -> Self {
        let n = space.total();
        Self {
            space,
            storage: Storage::Diagonal(vec![value; n]),
        }
    }

    /// Dense operator on a single leg of dimension `n`, built entry by entry.
    pub fn from_fn(space: TensorSpace, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let n = space.total();
        check_budget(n * n, dense_budget())?;
        Self::dense(space, DMatrix::from_fn(n, n, f))
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.total()
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    /// Same entries viewed on a different factorisation of the same total dimension.
    pub fn reshaped(&self, space: TensorSpace) -> Result<Self> {
        if space.total() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot view a {}-dimensional operator on {:?}",
                self.dim(),
                space.dims()
            )));
        }
        Ok(Self {
            space,
            storage: self.storage.clone(),
        })
    }

    /// The plain permutation, when every stored value is exactly one.
    pub fn as_permutation(&self) -> Option<&[usize]> {
        match &self.storage {
            Storage::Permutation { targets, values } if values.iter().all(|&v| v == ONE) => {
                Some(targets)
            }
            _ => None,
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m[(row, col)],
            Storage::Permutation { targets, values } => {
                if targets[col] == row {
                    values[col]
                } else {
                    ZERO
                }
            }
            Storage::Diagonal(d) => {
                if row == col {
                    d[row]
                } else {
                    ZERO
                }
            }
        }
    }

    /// Structurally nonzero entries as `(row, col, value)`; exact zeros are skipped.
    pub fn nonzeros(&self) -> Vec<(usize, usize, C64)> {
        match &self.storage {
            Storage::Dense(m) => {
                let n = m.nrows();
                let mut out = Vec::new();
                for c in 0..n {
                    for r in 0..n {
                        let v = m[(r, c)];
                        if v != ZERO {
                            out.push((r, c, v));
                        }
                    }
                }
                out
            }
            Storage::Permutation { targets, values } => targets
                .iter()
                .zip(values)
                .enumerate()
                .filter(|(_, (_, &v))| v != ZERO)
                .map(|(c, (&r, &v))| (r, c, v))
                .collect(),
            Storage::Diagonal(d) => d
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != ZERO)
                .map(|(i, &v)| (i, i, v))
                .collect(),
        }
    }

    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        self.to_dense_within(dense_budget())
    }

    pub fn to_dense_within(&self, budget: usize) -> Result<DMatrix<C64>> {
        let n = self.dim();
        match &self.storage {
            Storage::Dense(m) => Ok(m.clone()),
            Storage::Permutation { targets, values } => {
                check_budget(n * n, budget)?;
                let mut m = DMatrix::zeros(n, n);
                for (c, (&r, &v)) in targets.iter().zip(values).enumerate() {
                    m[(r, c)] = v;
                }
                Ok(m)
            }
            Storage::Diagonal(d) => {
                check_budget(n * n, budget)?;
                let mut m = DMatrix::zeros(n, n);
                for (i, &v) in d.iter().enumerate() {
                    m[(i, i)] = v;
                }
                Ok(m)
            }
        }
    }

    pub fn densified(&self) -> Result<Self> {
        Ok(Self {
            space: self.space.clone(),
            storage: Storage::Dense(self.to_dense()?),
        })
    }

    pub fn adjoint(&self) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m.adjoint()),
            Storage::Permutation { targets, values } => {
                let n = targets.len();
                let mut inv = vec![0; n];
                let mut vals = vec![ZERO; n];
                for (c, (&r, &v)) in targets.iter().zip(values).enumerate() {
                    inv[r] = c;
                    vals[r] = v.conj();
                }
                Storage::Permutation {
                    targets: inv,
                    values: vals,
                }
            }
            Storage::Diagonal(d) => Storage::Diagonal(d.iter().map(|v| v.conj()).collect()),
        };
        Self {
            space: self.space.clone(),
            storage,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m * c),
            Storage::Permutation { targets, values } => Storage::Permutation {
                targets: targets.clone(),
                values: values.iter().map(|&v| v * c).collect(),
            },
            Storage::Diagonal(d) => Storage::Diagonal(d.iter().map(|&v| v * c).collect()),
        };
        Self {
            space: self.space.clone(),
            storage,
        }
    }

    fn check_same_space(&self, other: &Operator, what: &str) -> Result<()> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch(format!(
                "{what}: {:?} vs {:?}",
                self.space.dims(),
                other.space.dims()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.check_same_space(other, "add")?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Diagonal(a), Storage::Diagonal(b)) => {
                Storage::Diagonal(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (
                Storage::Permutation {
                    targets: ta,
                    values: va,
                },
                Storage::Permutation {
                    targets: tb,
                    values: vb,
                },
            ) if ta == tb => Storage::Permutation {
                targets: ta.clone(),
                values: va.iter().zip(vb).map(|(x, y)| x + y).collect(),
            },
            (Storage::Dense(a), Storage::Dense(b)) => Storage::Dense(a + b),
            (Storage::Dense(a), _) => {
                let mut m = a.clone();
                for (r, c, v) in other.nonzeros() {
                    m[(r, c)] += v;
                }
                Storage::Dense(m)
            }
            (_, Storage::Dense(b)) => {
                let mut m = b.clone();
                for (r, c, v) in self.nonzeros() {
                    m[(r, c)] += v;
                }
                Storage::Dense(m)
            }
            _ => {
                let mut m = self.to_dense()?;
                for (r, c, v) in other.nonzeros() {
                    m[(r, c)] += v;
                }
                Storage::Dense(m)
            }
        };
        Ok(Self {
            space: self.space.clone(),
            storage,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Operator) -> Result<Self> {
        self.check_same_space(other, "mul")?;
        let n = self.dim();
        let storage = match (&self.storage, &other.storage) {
            (Storage::Diagonal(a), Storage::Diagonal(b)) => {
                Storage::Diagonal(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            (
                Storage::Permutation {
                    targets: ta,
                    values: va,
                },
                Storage::Permutation {
                    targets: tb,
                    values: vb,
                },
            ) => {
                let targets = tb.iter().map(|&t| ta[t]).collect();
                let values = tb.iter().zip(vb).map(|(&t, &v)| va[t] * v).collect();
                Storage::Permutation { targets, values }
            }
            (Storage::Diagonal(d), Storage::Permutation { targets, values }) => {
                Storage::Permutation {
                    targets: targets.clone(),
                    values: targets
                        .iter()
                        .zip(values)
                        .map(|(&t, &v)| d[t] * v)
                        .collect(),
                }
            }
            (Storage::Permutation { targets, values }, Storage::Diagonal(d)) => {
                Storage::Permutation {
                    targets: targets.clone(),
                    values: values.iter().zip(d).map(|(&v, &x)| v * x).collect(),
                }
            }
            (Storage::Dense(a), Storage::Dense(b)) => Storage::Dense(a * b),
            (Storage::Dense(a), Storage::Diagonal(d)) => {
                let mut m = a.clone();
                for (c, &x) in d.iter().enumerate() {
                    for v in m.column_mut(c).iter_mut() {
                        *v *= x;
                    }
                }
                Storage::Dense(m)
            }
            (Storage::Diagonal(d), Storage::Dense(b)) => {
                let mut m = b.clone();
                for (r, &x) in d.iter().enumerate() {
                    for v in m.row_mut(r).iter_mut() {
                        *v *= x;
                    }
                }
                Storage::Dense(m)
            }
            (Storage::Dense(a), Storage::Permutation { targets, values }) => {
                let mut m = DMatrix::zeros(n, n);
                for (c, (&t, &v)) in targets.iter().zip(values).enumerate() {
                    m.set_column(c, &(a.column(t) * v));
                }
                Storage::Dense(m)
            }
            (Storage::Permutation { targets, values }, Storage::Dense(b)) => {
                let mut m = DMatrix::zeros(n, n);
                for (r, (&t, &v)) in targets.iter().zip(values).enumerate() {
                    m.set_row(t, &(b.row(r) * v));
                }
                Storage::Dense(m)
            }
        };
        Ok(Self {
            space: self.space.clone(),
            storage,
        })
    }

    pub fn trace(&self) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m.trace(),
            Storage::Permutation { targets, values } => targets
                .iter()
                .zip(values)
                .enumerate()
                .filter(|(c, (&t, _))| *c == t)
                .map(|(_, (_, &v))| v)
                .sum(),
            Storage::Diagonal(d) => d.iter().sum(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
            Storage::Permutation { values: v, .. } | Storage::Diagonal(v) => {
                v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Storage::Permutation { values: v, .. } | Storage::Diagonal(v) => {
                v.iter().map(|x| x.norm()).fold(0.0, f64::max)
            }
        }
    }

    /// Hilbert-Schmidt pairing `tr(other* · self)`.
    pub fn inner(&self, other: &Operator) -> Result<C64> {
        self.check_same_space(other, "inner")?;
        let (sparse, dense, conj_dense) = if other.is_dense() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = ZERO;
        for (r, c, v) in sparse.nonzeros() {
            let w = dense.entry(r, c);
            acc += if conj_dense {
                v * w.conj()
            } else {
                v.conj() * w
            };
        }
        Ok(acc)
    }

    /// Frobenius distance `‖self − other‖_F`.
    pub fn distance(&self, other: &Operator) -> Result<f64> {
        self.check_same_space(other, "distance")?;
        match (&self.storage, &other.storage) {
            (Storage::Dense(a), Storage::Dense(b)) => Ok(a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt()),
            (Storage::Diagonal(a), Storage::Diagonal(b)) => Ok(a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt()),
            _ => Ok(self.sub(other)?.frobenius_norm()),
        }
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> Result<f64> {
        match &self.storage {
            Storage::Dense(m) => Ok(m.singular_values().max()),
            _ => Ok(self.max_abs()),
        }
    }

    /// `‖U*U − 1‖_F`.
    pub fn unitarity_defect(&self) -> Result<f64> {
        let product = self.adjoint().mul(self)?;
        product.distance(&Operator::identity(self.space.clone()))
    }
}
