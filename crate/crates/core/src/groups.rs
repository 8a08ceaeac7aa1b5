//! Finite groups as validated Cayley tables.
//!
//! Elements are the dense indices `0..n`; `cayley[s][t]` is the index of `s·t`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` accepted by [`FiniteGroup::symmetric`] (order 120).
pub const MAX_SYMMETRIC_DEGREE: usize = 5;

/// First group axiom found broken by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    EmptyTable,
    NotSquare {
        row: usize,
        len: usize,
    },
    OutOfRange {
        row: usize,
        col: usize,
        value: usize,
    },
    NonAssociative {
        a: usize,
        b: usize,
        c: usize,
    },
    NoIdentity,
    MissingInverse {
        element: usize,
    },
    RowNotPermutation {
        row: usize,
    },
    ColumnNotPermutation {
        col: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyTable => write!(f, "table is empty"),
            Violation::NotSquare { row, len } => write!(f, "row {row} has length {len}"),
            Violation::OutOfRange { row, col, value } => {
                write!(f, "entry ({row}, {col}) = {value} is not an element index")
            }
            Violation::NonAssociative { a, b, c } => {
                write!(f, "({a}·{b})·{c} ≠ {a}·({b}·{c})")
            }
            Violation::NoIdentity => write!(f, "no two-sided identity"),
            Violation::MissingInverse { element } => {
                write!(f, "element {element} has no two-sided inverse")
            }
            Violation::RowNotPermutation { row } => write!(f, "row {row} is not a permutation"),
            Violation::ColumnNotPermutation { col } => {
                write!(f, "column {col} is not a permutation")
            }
        }
    }
}

/// Result of [`validate`]: pass, or the first counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub violation: Option<Violation>,
}

/// Checks every group axiom on a raw table in `O(n³)`.
pub fn validate(table: &[Vec<usize>]) -> ValidationReport {
    match check_table(table) {
        Ok(_) => ValidationReport {
            passed: true,
            violation: None,
        },
        Err(v) => ValidationReport {
            passed: false,
            violation: Some(v),
        },
    }
}

/// Returns `(identity, inverses)` for a valid table.
fn check_table(table: &[Vec<usize>]) -> Result<(usize, Vec<usize>), Violation> {
    let n = table.len();
    if n == 0 {
        return Err(Violation::EmptyTable);
    }
    for (row, r) in table.iter().enumerate() {
        if r.len() != n {
            return Err(Violation::NotSquare { row, len: r.len() });
        }
        if let Some((col, &value)) = r.iter().enumerate().find(|(_, &v)| v >= n) {
            return Err(Violation::OutOfRange { row, col, value });
        }
    }
    for a in 0..n {
        for b in 0..n {
            let ab = table[a][b];
            for c in 0..n {
                if table[ab][c] != table[a][table[b][c]] {
                    return Err(Violation::NonAssociative { a, b, c });
                }
            }
        }
    }
    let identity = (0..n)
        .find(|&e| (0..n).all(|s| table[e][s] == s && table[s][e] == s))
        .ok_or(Violation::NoIdentity)?;
    let mut inverses = Vec::with_capacity(n);
    for (s, row) in table.iter().enumerate() {
        let inv = (0..n)
            .find(|&t| row[t] == identity && table[t][s] == identity)
            .ok_or(Violation::MissingInverse { element: s })?;
        inverses.push(inv);
    }
    for row in 0..n {
        let mut seen = vec![false; n];
        for col in 0..n {
            if std::mem::replace(&mut seen[table[row][col]], true) {
                return Err(Violation::RowNotPermutation { row });
            }
        }
    }
    for col in 0..n {
        let mut seen = vec![false; n];
        for row in 0..n {
            if std::mem::replace(&mut seen[table[row][col]], true) {
                return Err(Violation::ColumnNotPermutation { col });
            }
        }
    }
    Ok((identity, inverses))
}

/// Recipe for a built-in group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    /// Symmetries of the regular `n`-gon, of order `2n`.
    Dihedral(usize),
    Symmetric(usize),
    Product(Box<GroupSpec>, Box<GroupSpec>),
    Table(Vec<Vec<usize>>),
}

impl GroupSpec {
    /// Parses short names: `Z6`/`C6`, `D4`, `S3`, `trivial`, and products `Z2xZ3`.
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        if let Some((left, right)) = name.split_once(['x', '×']) {
            return Ok(GroupSpec::Product(
                Box::new(Self::parse(left)?),
                Box::new(Self::parse(right)?),
            ));
        }
        if name.eq_ignore_ascii_case("trivial") {
            return Ok(GroupSpec::Cyclic(1));
        }
        let bad = || Error::Format(format!("unknown group spec `{name}`"));
        let mut chars = name.chars();
        let kind = chars.next().ok_or_else(bad)?;
        let n: usize = chars.as_str().parse().map_err(|_| bad())?;
        match kind.to_ascii_uppercase() {
            'Z' | 'C' => Ok(GroupSpec::Cyclic(n)),
            'D' => Ok(GroupSpec::Dihedral(n)),
            'S' => Ok(GroupSpec::Symmetric(n)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    cayley: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    names: Option<Vec<String>>,
}

impl FiniteGroup {
    pub fn build(spec: &GroupSpec) -> Result<Self> {
        match spec {
            GroupSpec::Cyclic(n) => Self::cyclic(*n),
            GroupSpec::Dihedral(n) => Self::dihedral(*n),
            GroupSpec::Symmetric(n) => Self::symmetric(*n),
            GroupSpec::Product(g, h) => Ok(Self::product(&Self::build(g)?, &Self::build(h)?)),
            GroupSpec::Table(t) => Self::from_cayley(t.clone()),
        }
    }

    pub fn from_cayley(cayley: Vec<Vec<usize>>) -> Result<Self> {
        let (identity, inverse) = check_table(&cayley).map_err(Error::InvalidGroup)?;
        Ok(Self {
            order: cayley.len(),
            cayley,
            identity,
            inverse,
            names: None,
        })
    }

    fn from_fn(
        order: usize,
        mul: impl Fn(usize, usize) -> usize,
        names: Vec<String>,
    ) -> Result<Self> {
        let table = (0..order)
            .map(|a| (0..order).map(|b| mul(a, b)).collect())
            .collect();
        Ok(Self::from_cayley(table)?.with_names(names))
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Format("cyclic group of order 0".into()));
        }
        Self::from_fn(
            n,
            |a, b| (a + b) % n,
            (0..n).map(|k| k.to_string()).collect(),
        )
    }

    /// Order `2n`: rotations `r^k` at index `k`, then reflections `r^k s` at `n + k`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Format("dihedral group of a 0-gon".into()));
        }
        // r^a s^f · r^b s^g = r^(a + (-1)^f b) s^(f+g)
        let mul = |x: usize, y: usize| {
            let (f, a) = (x / n, x % n);
            let (g, b) = (y / n, y % n);
            let rot = if f == 0 { (a + b) % n } else { (a + n - b) % n };
            ((f + g) % 2) * n + rot
        };
        let names = (0..2 * n)
            .map(|x| {
                if x < n {
                    format!("r{x}")
                } else {
                    format!("r{}s", x - n)
                }
            })
            .collect();
        Self::from_fn(2 * n, mul, names)
    }

    /// Permutations of `0..n` in lexicographic order; `(p·q)(i) = p(q(i))`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Format("symmetric group on 0 points".into()));
        }
        if n > MAX_SYMMETRIC_DEGREE {
            return Err(Error::GroupTooLarge(format!(
                "S{n} exceeds the S{MAX_SYMMETRIC_DEGREE} limit"
            )));
        }
        let perms = lexicographic_permutations(n);
        let index = |p: &[usize]| {
            perms
                .iter()
                .position(|q| q == p)
                .expect("closed under composition")
        };
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| index(&q.iter().map(|&i| p[i]).collect::<Vec<_>>()))
                    .collect()
            })
            .collect();
        let names = perms
            .iter()
            .map(|p| p.iter().map(|i| i.to_string()).collect::<String>())
            .collect();
        Ok(Self::from_cayley(table)?.with_names(names))
    }

    /// Direct product, with `(g, h)` at index `g · |H| + h`.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (ng, nh) = (g.order, h.order);
        let cayley = (0..ng * nh)
            .map(|x| {
                (0..ng * nh)
                    .map(|y| g.mul(x / nh, y / nh) * nh + h.mul(x % nh, y % nh))
                    .collect()
            })
            .collect();
        let names = (0..ng * nh)
            .map(|x| format!("({},{})", g.name(x / nh), h.name(x % nh)))
            .collect();
        Self {
            order: ng * nh,
            cayley,
            identity: g.identity * nh + h.identity,
            inverse: (0..ng * nh)
                .map(|x| g.inverse(x / nh) * nh + h.inverse(x % nh))
                .collect(),
            names: Some(names),
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        if names.len() == self.order {
            self.names = Some(names);
        }
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cayley[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn cayley(&self) -> &[Vec<usize>] {
        &self.cayley
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn name(&self, a: usize) -> String {
        self.names
            .as_ref()
            .map_or_else(|| a.to_string(), |n| n[a].clone())
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn validate(&self) -> ValidationReport {
        validate(&self.cayley)
    }

    pub fn is_abelian(&self) -> bool {
        self.non_commuting_pair().is_none()
    }

    /// First pair `(a, b)` with `ab ≠ ba`, if any.
    pub fn non_commuting_pair(&self) -> Option<(usize, usize)> {
        (0..self.order)
            .flat_map(|a| (0..self.order).map(move |b| (a, b)))
            .find(|&(a, b)| self.mul(a, b) != self.mul(b, a))
    }
}

fn lexicographic_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next permutation in lexicographic order
        let Some(i) = (0..n.saturating_sub(1))
            .rev()
            .find(|&i| current[i] < current[i + 1])
        else {
            break;
        };
        let j = (i + 1..n)
            .rev()
            .find(|&j| current[j] > current[i])
            .expect("successor exists");
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}
