//! JSON formats: groups, operators, symbols, Schur functions and reports.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major nested
//! arrays. Floats are written with 17 significant digits so that reports
//! round-trip exactly and repeated runs are byte-identical.

use std::io;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::realization::{Realization, RealizationKind};
use crate::symbol::{Symbol, SymbolAmbient};
use crate::tensor::{Operator, Storage, TensorSpace, C64};

pub type Pair = [f64; 2];

pub fn to_pair(c: C64) -> Pair {
    [c.re, c.im]
}

pub fn from_pair(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

/// `serde(with)` helper for `Vec<C64>` as `[[re, im], ...]`.
pub mod complex_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(|&c| to_pair(c)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<C64>, D::Error> {
        Ok(Vec::<Pair>::deserialize(d)?.into_iter().map(from_pair).collect())
    }
}

pub fn matrix_to_rows(m: &DMatrix<C64>) -> Vec<Vec<Pair>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| to_pair(m[(r, c)])).collect())
        .collect()
}

pub fn rows_to_matrix(rows: &[Vec<Pair>]) -> Result<DMatrix<C64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Format("matrix rows are empty or ragged".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| from_pair(rows[r][c])))
}

/// Writes floats with 17 significant digits.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactFloats;

impl serde_json::ser::Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value == 0.0 {
            return writer.write_all(if value.is_sign_negative() { b"-0.0" } else { b"0.0" });
        }
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as compact JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats);
    value.serialize(&mut ser)?;
    String::from_utf8(out).map_err(|e| Error::Format(e.to_string()))
}

/// Cayley table exchange format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupJson {
    pub order: usize,
    pub cayley: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl GroupJson {
    pub fn from_group(g: &FiniteGroup) -> Self {
        Self {
            order: g.order(),
            cayley: g.cayley().to_vec(),
            names: g.names().map(<[String]>::to_vec),
        }
    }

    /// Validates the table and builds the group.
    pub fn into_group(self) -> Result<FiniteGroup> {
        if self.cayley.len() != self.order {
            return Err(Error::Format(format!(
                "declared order {} but the table has {} rows",
                self.order,
                self.cayley.len()
            )));
        }
        let g = FiniteGroup::from_cayley(self.cayley)?;
        Ok(match self.names {
            Some(names) => {
                if names.len() != g.order() {
                    return Err(Error::Format(format!(
                        "{} names for a group of order {}",
                        names.len(),
                        g.order()
                    )));
                }
                g.with_names(names)
            }
            None => g,
        })
    }
}

pub fn group_from_json(text: &str) -> Result<FiniteGroup> {
    serde_json::from_str::<GroupJson>(text)?.into_group()
}

pub fn group_to_json(g: &FiniteGroup) -> Result<String> {
    to_json(&GroupJson::from_group(g))
}

/// An operator as a dense matrix or a sparse descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorJson {
    Permutation {
        permutation: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values: Option<Vec<Pair>>,
    },
    Diagonal {
        diagonal: Vec<Pair>,
    },
    Dense(Vec<Vec<Pair>>),
}

impl OperatorJson {
    pub fn from_operator(op: &Operator) -> Self {
        match op.storage() {
            Storage::Dense(m) => OperatorJson::Dense(matrix_to_rows(m)),
            Storage::Permutation { targets, values } => OperatorJson::Permutation {
                permutation: targets.clone(),
                values: if values.iter().all(|&v| v == C64::new(1.0, 0.0)) {
                    None
                } else {
                    Some(values.iter().map(|&v| to_pair(v)).collect())
                },
            },
            Storage::Diagonal(d) => OperatorJson::Diagonal {
                diagonal: d.iter().map(|&v| to_pair(v)).collect(),
            },
        }
    }

    pub fn to_operator(&self, space: &TensorSpace) -> Result<Operator> {
        match self {
            OperatorJson::Dense(rows) => Operator::dense(space.clone(), rows_to_matrix(rows)?),
            OperatorJson::Permutation {
                permutation,
                values,
            } => match values {
                None => Operator::permutation(space.clone(), permutation.clone()),
                Some(v) => Operator::monomial(
                    space.clone(),
                    permutation.clone(),
                    v.iter().map(|&p| from_pair(p)).collect(),
                ),
            },
            OperatorJson::Diagonal { diagonal } => Operator::diagonal(
                space.clone(),
                diagonal.iter().map(|&p| from_pair(p)).collect(),
            ),
        }
    }
}

/// A group given by name (`"S3"`) or by its table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Name(String),
    Table(GroupJson),
}

impl GroupRef {
    pub fn resolve(&self) -> Result<FiniteGroup> {
        match self {
            GroupRef::Name(name) => {
                FiniteGroup::build(&crate::groups::GroupSpec::parse(name)?)
            }
            GroupRef::Table(t) => t.clone().into_group(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationRef {
    pub kind: RealizationKind,
    pub group: GroupRef,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub a: OperatorJson,
    pub b: OperatorJson,
}

/// Symbol exchange format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<RealizationRef>,
    pub terms: Vec<TermJson>,
}

impl SymbolJson {
    pub fn from_symbol(chi: &Symbol, realization: Option<RealizationRef>) -> Self {
        Self {
            realization,
            terms: chi
                .terms()
                .iter()
                .map(|(a, b)| TermJson {
                    a: OperatorJson::from_operator(a),
                    b: OperatorJson::from_operator(b),
                })
                .collect(),
        }
    }

    /// Builds the symbol over `r`'s ambient, checking membership of every factor.
    pub fn to_symbol(&self, r: &Realization) -> Result<Symbol> {
        let space = r.ambient().space().clone();
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.a.to_operator(&space)?, t.b.to_operator(&space)?)))
            .collect::<Result<Vec<_>>>()?;
        Symbol::new(terms, SymbolAmbient::Span(r.ambient().clone()))
    }

    /// Builds a `B(H)`-valued symbol on `dim`-dimensional factors.
    pub fn to_full_symbol(&self, dim: usize) -> Result<Symbol> {
        let space = TensorSpace::single(dim)?;
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.a.to_operator(&space)?, t.b.to_operator(&space)?)))
            .collect::<Result<Vec<_>>>()?;
        Symbol::full(terms)
    }

    /// Dimension implied by the first factor.
    pub fn factor_dim(&self) -> Result<usize> {
        let first = &self.terms.first().ok_or(Error::EmptySymbol)?.a;
        Ok(match first {
            OperatorJson::Dense(rows) => rows.len(),
            OperatorJson::Permutation { permutation, .. } => permutation.len(),
            OperatorJson::Diagonal { diagonal } => diagonal.len(),
        })
    }
}

/// Schur function as a row-major array of `[re, im]` pairs.
pub fn phi_from_json(text: &str) -> Result<DMatrix<C64>> {
    let rows: Vec<Vec<Pair>> = serde_json::from_str(text)?;
    let m = rows_to_matrix(&rows)?;
    if m.nrows() != m.ncols() {
        return Err(Error::Format("Schur function must be square".into()));
    }
    Ok(m)
}

pub fn phi_to_json(phi: &DMatrix<C64>) -> Result<String> {
    to_json(&matrix_to_rows(phi))
}

/// Kind, group and `W` as moves of index pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealizationDescriptor {
    pub kind: RealizationKind,
    pub group: Option<GroupJson>,
    pub h_dim: usize,
    pub w: Option<Vec<[[usize; 2]; 2]>>,
    pub ambient_dim: usize,
    pub dual_dim: usize,
    pub commutant_dim: usize,
    pub dual_commutant_dim: usize,
    pub reduced_space_dim: usize,
}

impl RealizationDescriptor {
    pub fn describe(r: &Realization) -> Result<Self> {
        Ok(Self {
            kind: r.kind(),
            group: r.group().map(GroupJson::from_group),
            h_dim: r.h_dim(),
            w: r.w_pairs(),
            ambient_dim: r.ambient().dim(),
            dual_dim: r.dual().dim(),
            commutant_dim: r.commutant().dim(),
            dual_commutant_dim: r.dual_commutant().dim(),
            reduced_space_dim: r.reduced_space()?.dim(),
        })
    }
}
