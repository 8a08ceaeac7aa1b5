use nalgebra::DMatrix;

use super::functional::Functional;
use super::operator::{check_budget, dense_budget, Operator, Storage};
use super::space::TensorSpace;
use super::C64;
use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Monomial view `(targets, values)` of a sparse operator.
fn monomial_parts(op: &Operator) -> Option<(Vec<usize>, Vec<C64>)> {
    match op.storage() {
        Storage::Permutation { targets, values } => Some((targets.clone(), values.clone())),
        Storage::Diagonal(d) => Some(((0..d.len()).collect(), d.clone())),
        Storage::Dense(_) => None,
    }
}

/// Kronecker product `a ⊗ b`; `e_s ⊗ e_t` sits at index `s · dim(b) + t`.
pub fn kron(a: &Operator, b: &Operator) -> Result<Operator> {
    kron_within(a, b, dense_budget())
}

pub fn kron_within(a: &Operator, b: &Operator, budget: usize) -> Result<Operator> {
    let space = a.space().concat(b.space());
    let nb = b.dim();
    if let (Storage::Diagonal(da), Storage::Diagonal(db)) = (a.storage(), b.storage()) {
        let values = da
            .iter()
            .flat_map(|x| db.iter().map(move |y| x * y))
            .collect();
        return Operator::diagonal(space, values);
    }
    if let (Some((ta, va)), Some((tb, vb))) = (monomial_parts(a), monomial_parts(b)) {
        let mut targets = Vec::with_capacity(space.total());
        let mut values = Vec::with_capacity(space.total());
        for (i, &x) in va.iter().enumerate() {
            for (j, &y) in vb.iter().enumerate() {
                targets.push(ta[i] * nb + tb[j]);
                values.push(x * y);
            }
        }
        return Operator::monomial(space, targets, values);
    }
    let n = space.total();
    check_budget(n * n, budget)?;
    let da = a.to_dense_within(budget)?;
    let db = b.to_dense_within(budget)?;
    Operator::dense(space, da.kronecker(&db))
}

fn validate_legs(legs: &[usize], ambient: &TensorSpace, factor: &TensorSpace) -> Result<()> {
    if legs.len() != factor.legs() {
        return Err(Error::DimensionMismatch(format!(
            "{} legs named for a {}-leg operator",
            legs.len(),
            factor.legs()
        )));
    }
    let mut seen = vec![false; ambient.legs()];
    for (k, &leg) in legs.iter().enumerate() {
        if leg >= ambient.legs() {
            return Err(Error::IndexOutOfRange {
                index: leg,
                bound: ambient.legs(),
            });
        }
        if std::mem::replace(&mut seen[leg], true) {
            return Err(Error::DimensionMismatch(format!("leg {leg} named twice")));
        }
        if ambient.dims()[leg] != factor.dims()[k] {
            return Err(Error::DimensionMismatch(format!(
                "leg {leg} has dimension {} but the operator factor has {}",
                ambient.dims()[leg],
                factor.dims()[k]
            )));
        }
    }
    Ok(())
}

/// Places `t` on the named legs of `ambient` (0-based, in `t`'s leg order) and
/// the identity on the remaining legs. With three legs, `legs = [0, 1]` gives
/// `t ⊗ 1` and `legs = [1, 2]` gives `1 ⊗ t`.
pub fn embed_legs(t: &Operator, legs: &[usize], ambient: &TensorSpace) -> Result<Operator> {
    embed_legs_within(t, legs, ambient, dense_budget())
}

pub fn embed_legs_within(
    t: &Operator,
    legs: &[usize],
    ambient: &TensorSpace,
    budget: usize,
) -> Result<Operator> {
    validate_legs(legs, ambient, t.space())?;
    let inner = t.space();
    let n = ambient.total();
    let sub_index = |digits: &[usize]| -> usize {
        legs.iter()
            .fold(0, |acc, &leg| acc * ambient.dims()[leg] + digits[leg])
    };
    match t.storage() {
        Storage::Diagonal(d) => {
            let values = (0..n).map(|i| d[sub_index(&ambient.split(i))]).collect();
            Operator::diagonal(ambient.clone(), values)
        }
        Storage::Permutation { targets, values } => {
            let mut out_t = Vec::with_capacity(n);
            let mut out_v = Vec::with_capacity(n);
            for col in 0..n {
                let mut digits = ambient.split(col);
                let sub = sub_index(&digits);
                let row_digits = inner.split(targets[sub]);
                for (k, &leg) in legs.iter().enumerate() {
                    digits[leg] = row_digits[k];
                }
                out_t.push(ambient.join(&digits));
                out_v.push(values[sub]);
            }
            Operator::monomial(ambient.clone(), out_t, out_v)
        }
        Storage::Dense(_) => {
            check_budget(n * n, budget)?;
            let rest: Vec<usize> = (0..ambient.legs()).filter(|l| !legs.contains(l)).collect();
            let rest_space = if rest.is_empty() {
                None
            } else {
                Some(ambient.select(&rest)?)
            };
            let rest_total = rest_space.as_ref().map_or(1, |s| s.total());
            let mut m = DMatrix::zeros(n, n);
            let mut row_digits = vec![0; ambient.legs()];
            let mut col_digits = vec![0; ambient.legs()];
            for (r, c, v) in t.nonzeros() {
                let rd = inner.split(r);
                let cd = inner.split(c);
                for (k, &leg) in legs.iter().enumerate() {
                    row_digits[leg] = rd[k];
                    col_digits[leg] = cd[k];
                }
                for idx in 0..rest_total {
                    if let Some(rs) = &rest_space {
                        for (k, digit) in rs.split(idx).into_iter().enumerate() {
                            row_digits[rest[k]] = digit;
                            col_digits[rest[k]] = digit;
                        }
                    }
                    m[(ambient.join(&row_digits), ambient.join(&col_digits))] = v;
                }
            }
            Operator::dense(ambient.clone(), m)
        }
    }
}

/// Reorders legs: leg `k` of the result is leg `order[k]` of `t`.
pub fn permute_legs(t: &Operator, order: &[usize]) -> Result<Operator> {
    let space = t.space();
    if order.len() != space.legs() {
        return Err(Error::DimensionMismatch(format!(
            "leg order of length {} for a {}-leg space",
            order.len(),
            space.legs()
        )));
    }
    let target_space = space.select(order)?;
    validate_legs(order, space, &target_space)?;
    let n = space.total();
    let map: Vec<usize> = (0..n)
        .map(|i| {
            let digits = space.split(i);
            let permuted: Vec<usize> = order.iter().map(|&leg| digits[leg]).collect();
            target_space.join(&permuted)
        })
        .collect();
    match t.storage() {
        Storage::Diagonal(d) => {
            let mut out = vec![ZERO; n];
            for (i, &v) in d.iter().enumerate() {
                out[map[i]] = v;
            }
            Operator::diagonal(target_space, out)
        }
        Storage::Permutation { targets, values } => {
            let mut out_t = vec![0; n];
            let mut out_v = vec![ZERO; n];
            for j in 0..n {
                out_t[map[j]] = map[targets[j]];
                out_v[map[j]] = values[j];
            }
            Operator::monomial(target_space, out_t, out_v)
        }
        Storage::Dense(m) => {
            let mut out = DMatrix::zeros(n, n);
            for c in 0..n {
                for r in 0..n {
                    out[(map[r], map[c])] = m[(r, c)];
                }
            }
            Operator::dense(target_space, out)
        }
    }
}

/// The flip `σ(t) = Σ t Σ` on a two-leg space with equal factors.
pub fn flip_sigma(t: &Operator) -> Result<Operator> {
    let dims = t.space().dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(Error::DimensionMismatch(format!(
            "flip needs two equal legs, got {dims:?}"
        )));
    }
    permute_legs(t, &[1, 0])
}

/// Per-leg instruction for [`slice`].
#[derive(Clone, Copy, Debug)]
pub enum LegSlice<'a> {
    Keep,
    Apply(&'a Functional),
}

fn check_functional_dims(positions: &[LegSlice<'_>], space: &TensorSpace) -> Result<()> {
    if positions.len() != space.legs() {
        return Err(Error::DimensionMismatch(format!(
            "{} slice positions for a {}-leg operator",
            positions.len(),
            space.legs()
        )));
    }
    for (leg, pos) in positions.iter().enumerate() {
        if let LegSlice::Apply(f) = pos {
            if f.dim() != space.dims()[leg] {
                return Err(Error::DimensionMismatch(format!(
                    "functional of dimension {} on leg {leg} of dimension {}",
                    f.dim(),
                    space.dims()[leg]
                )));
            }
        }
    }
    Ok(())
}

/// Every combination of functional supports over the tagged legs, as
/// `(row_digit, col_digit, weight)` per tagged leg.
fn support_product(fs: &[&Functional]) -> Vec<(Vec<(usize, usize)>, C64)> {
    let mut combos: Vec<(Vec<(usize, usize)>, C64)> = vec![(Vec::new(), C64::new(1.0, 0.0))];
    for f in fs {
        let mut next = Vec::with_capacity(combos.len() * f.support().len());
        for (digits, w) in &combos {
            // f(x) = Σ D_ij x_ji
            for &(i, j, d) in f.support() {
                let mut digits = digits.clone();
                digits.push((j, i));
                next.push((digits, w * d));
            }
        }
        combos = next;
    }
    combos
}

/// Slice map: contracts every `Apply` leg against its functional and keeps the
/// rest, so that on `a ⊗ b` the positions `(Apply(f), Keep)` give `f(a) · b`.
pub fn slice(positions: &[LegSlice<'_>], t: &Operator) -> Result<Operator> {
    let space = t.space();
    check_functional_dims(positions, space)?;
    let kept: Vec<usize> = (0..space.legs())
        .filter(|&l| matches!(positions[l], LegSlice::Keep))
        .collect();
    let tagged: Vec<usize> = (0..space.legs())
        .filter(|&l| !matches!(positions[l], LegSlice::Keep))
        .collect();
    if kept.is_empty() {
        return Err(Error::DimensionMismatch(
            "slice keeps no leg; use `evaluate` for a full contraction".into(),
        ));
    }
    if tagged.is_empty() {
        return Ok(t.clone());
    }
    let fs: Vec<&Functional> = tagged
        .iter()
        .map(|&l| match positions[l] {
            LegSlice::Apply(f) => f,
            LegSlice::Keep => unreachable!(),
        })
        .collect();
    let out_space = space.select(&kept)?;
    let m = out_space.total();
    check_budget(m * m, dense_budget())?;
    let mut out = DMatrix::zeros(m, m);

    let combos_len: usize = fs.iter().map(|f| f.support().len()).product();
    let scan_cost = t.nonzeros_estimate();
    if combos_len.saturating_mul(m * m) < scan_cost {
        let combos = support_product(&fs);
        let mut row_digits = vec![0; space.legs()];
        let mut col_digits = vec![0; space.legs()];
        for (digits, w) in &combos {
            for (k, &leg) in tagged.iter().enumerate() {
                row_digits[leg] = digits[k].0;
                col_digits[leg] = digits[k].1;
            }
            for oc in 0..m {
                let cd = out_space.split(oc);
                for (k, &leg) in kept.iter().enumerate() {
                    col_digits[leg] = cd[k];
                }
                for or in 0..m {
                    let rd = out_space.split(or);
                    for (k, &leg) in kept.iter().enumerate() {
                        row_digits[leg] = rd[k];
                    }
                    out[(or, oc)] += t.entry(space.join(&row_digits), space.join(&col_digits)) * w;
                }
            }
        }
    } else {
        let mut kr = vec![0; kept.len()];
        let mut kc = vec![0; kept.len()];
        'entries: for (r, c, v) in t.nonzeros() {
            let rd = space.split(r);
            let cd = space.split(c);
            let mut w = v;
            for (k, &leg) in tagged.iter().enumerate() {
                let d = fs[k].pairing()[(cd[leg], rd[leg])];
                if d == ZERO {
                    continue 'entries;
                }
                w *= d;
            }
            for (k, &leg) in kept.iter().enumerate() {
                kr[k] = rd[leg];
                kc[k] = cd[leg];
            }
            out[(out_space.join(&kr), out_space.join(&kc))] += w;
        }
    }
    Operator::dense(out_space, out)
}

/// Full contraction `(f_0 ⊗ f_1 ⊗ ...)(t)`.
pub fn evaluate(functionals: &[&Functional], t: &Operator) -> Result<C64> {
    let space = t.space();
    let positions: Vec<LegSlice<'_>> = functionals.iter().map(|f| LegSlice::Apply(f)).collect();
    check_functional_dims(&positions, space)?;
    let combos_len: usize = functionals.iter().map(|f| f.support().len()).product();
    if combos_len < t.nonzeros_estimate() {
        let mut acc = ZERO;
        for (digits, w) in support_product(functionals) {
            let rd: Vec<usize> = digits.iter().map(|d| d.0).collect();
            let cd: Vec<usize> = digits.iter().map(|d| d.1).collect();
            acc += t.entry(space.join(&rd), space.join(&cd)) * w;
        }
        return Ok(acc);
    }
    let mut acc = ZERO;
    'entries: for (r, c, v) in t.nonzeros() {
        let rd = space.split(r);
        let cd = space.split(c);
        let mut w = v;
        for (leg, f) in functionals.iter().enumerate() {
            let d = f.pairing()[(cd[leg], rd[leg])];
            if d == ZERO {
                continue 'entries;
            }
            w *= d;
        }
        acc += w;
    }
    Ok(acc)
}

/// `(x ⊗ 1)(1 ⊗ y)` for `x` on legs `(d1, d2)` and `y` on legs `(d2, d3)`,
/// computed without forming either embedding when one factor is dense.
pub fn middle_product(x: &Operator, y: &Operator) -> Result<Operator> {
    middle_product_within(x, y, dense_budget())
}

pub fn middle_product_within(x: &Operator, y: &Operator, budget: usize) -> Result<Operator> {
    let (xd, yd) = (x.space().dims(), y.space().dims());
    if xd.len() != 2 || yd.len() != 2 || xd[1] != yd[0] {
        return Err(Error::DimensionMismatch(format!(
            "middle product needs two-leg factors sharing the middle leg, got {xd:?} and {yd:?}"
        )));
    }
    let (d1, d2, d3) = (xd[0], xd[1], yd[1]);
    let space = TensorSpace::new(vec![d1, d2, d3])?;
    if !x.is_dense() && !y.is_dense() {
        let left = embed_legs_within(x, &[0, 1], &space, budget)?;
        let right = embed_legs_within(y, &[1, 2], &space, budget)?;
        return left.mul(&right);
    }
    let n = space.total();
    check_budget(n * n, budget)?;
    // rows of y grouped by their first digit q: (t, col, value)
    let mut y_by_q: Vec<Vec<(usize, usize, C64)>> = vec![Vec::new(); d2];
    for (r, c, v) in y.nonzeros() {
        y_by_q[r / d3].push((r % d3, c, v));
    }
    let mut out = DMatrix::zeros(n, n);
    for (r, c, xv) in x.nonzeros() {
        let (s, mid_row) = (r / d2, r % d2);
        let (s2, q) = (c / d2, c % d2);
        for &(t, yc, yv) in &y_by_q[q] {
            let (mid_col, t2) = (yc / d3, yc % d3);
            let row = (s * d2 + mid_row) * d3 + t;
            let col = (s2 * d2 + mid_col) * d3 + t2;
            out[(row, col)] += xv * yv;
        }
    }
    Operator::dense(space, out)
}

impl Operator {
    pub(crate) fn nonzeros_estimate(&self) -> usize {
        match self.storage() {
            Storage::Dense(_) => self.dim() * self.dim(),
            _ => self.dim(),
        }
    }
}
