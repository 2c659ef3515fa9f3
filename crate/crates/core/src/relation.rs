//! Dense semiring-valued relations over finite carriers.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::semiring::{self, SemiringKind, SemiringValue};

/// Carrier element of a relation.
pub trait Key: Clone + Eq + Hash + fmt::Display {}

impl<T: Clone + Eq + Hash + fmt::Display> Key for T {}

/// A total map `X × Y → S`, stored row-major.
#[derive(Clone)]
pub struct ValRel<R: Key, C: Key> {
    kind: SemiringKind,
    rows: Vec<R>,
    cols: Vec<C>,
    row_index: HashMap<R, usize>,
    col_index: HashMap<C, usize>,
    values: Vec<SemiringValue>,
}

fn index_of<K: Key>(what: &str, keys: &[K]) -> Result<HashMap<K, usize>> {
    let mut index = HashMap::with_capacity(keys.len());
    for (i, k) in keys.iter().enumerate() {
        if index.insert(k.clone(), i).is_some() {
            return Err(Error::CarrierMismatch(format!("{what} carrier repeats `{k}`")));
        }
    }
    Ok(index)
}

impl<R: Key, C: Key> ValRel<R, C> {
    /// Build entrywise from `f(row, col)`.
    pub fn from_fn(
        kind: SemiringKind,
        rows: Vec<R>,
        cols: Vec<C>,
        mut f: impl FnMut(&R, &C) -> Result<SemiringValue>,
    ) -> Result<Self> {
        let row_index = index_of("row", &rows)?;
        let col_index = index_of("column", &cols)?;
        let mut values = Vec::with_capacity(rows.len() * cols.len());
        for r in &rows {
            for c in &cols {
                let v = f(r, c)?;
                if v.kind() != kind {
                    return Err(Error::kind_mismatch(kind, v.kind()));
                }
                values.push(v);
            }
        }
        Ok(ValRel { kind, rows, cols, row_index, col_index, values })
    }

    /// The relation constantly `1`.
    pub fn top(kind: SemiringKind, rows: Vec<R>, cols: Vec<C>) -> Result<Self> {
        Self::from_fn(kind, rows, cols, |_, _| Ok(kind.one()))
    }

    pub fn kind(&self) -> SemiringKind {
        self.kind
    }

    pub fn rows(&self) -> &[R] {
        &self.rows
    }

    pub fn cols(&self) -> &[C] {
        &self.cols
    }

    pub fn row_position(&self, r: &R) -> Option<usize> {
        self.row_index.get(r).copied()
    }

    pub fn col_position(&self, c: &C) -> Option<usize> {
        self.col_index.get(c).copied()
    }

    pub fn get(&self, r: &R, c: &C) -> Option<SemiringValue> {
        Some(self.at(self.row_position(r)?, self.col_position(c)?))
    }

    /// Entry lookup that reports a carrier error for unknown keys.
    pub fn lookup(&self, r: &R, c: &C) -> Result<SemiringValue> {
        self.get(r, c)
            .ok_or_else(|| Error::CarrierMismatch(format!("({r}, {c}) is outside the relation's carriers")))
    }

    pub fn at(&self, i: usize, j: usize) -> SemiringValue {
        self.values[i * self.cols.len() + j]
    }

    pub fn set(&mut self, r: &R, c: &C, v: SemiringValue) -> Result<()> {
        if v.kind() != self.kind {
            return Err(Error::kind_mismatch(self.kind, v.kind()));
        }
        let i = self.row_position(r).ok_or_else(|| Error::CarrierMismatch(format!("unknown row `{r}`")))?;
        let j = self.col_position(c).ok_or_else(|| Error::CarrierMismatch(format!("unknown column `{c}`")))?;
        let n = self.cols.len();
        self.values[i * n + j] = v;
        Ok(())
    }

    /// `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (&R, &C, SemiringValue)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(move |(i, r)| self.cols.iter().enumerate().map(move |(j, c)| (r, c, self.at(i, j))))
    }

    /// Rename carrier elements. The maps must be injective on the carriers.
    pub fn map_keys<R2: Key, C2: Key>(
        &self,
        mut f: impl FnMut(&R) -> R2,
        mut g: impl FnMut(&C) -> C2,
    ) -> Result<ValRel<R2, C2>> {
        let rows: Vec<R2> = self.rows.iter().map(&mut f).collect();
        let cols: Vec<C2> = self.cols.iter().map(&mut g).collect();
        Ok(ValRel {
            kind: self.kind,
            row_index: index_of("row", &rows)?,
            col_index: index_of("column", &cols)?,
            rows,
            cols,
            values: self.values.clone(),
        })
    }

    fn same_shape<R2: Key, C2: Key>(&self, other: &ValRel<R2, C2>) -> Result<()>
    where
        R: PartialEq<R2>,
        C: PartialEq<C2>,
    {
        if self.kind != other.kind {
            return Err(Error::kind_mismatch(self.kind, other.kind));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::CarrierMismatch("relations have different carriers".into()));
        }
        Ok(())
    }
}

impl<R: Key, C: Key> PartialEq for ValRel<R, C> {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.rows == other.rows && self.cols == other.cols && self.values == other.values
    }
}

impl<R: Key, C: Key> fmt::Debug for ValRel<R, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ValRel<{}> {}x{}", self.kind, self.rows.len(), self.cols.len())?;
        for (i, r) in self.rows.iter().enumerate() {
            write!(f, "  {r}:")?;
            for j in 0..self.cols.len() {
                write!(f, " {}", self.at(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `(f × g)^* R`: the relation `(x, y) ↦ R(f(x), g(y))` over `rows × cols`.
pub fn reindex<X: Key, Y: Key, R: Key, C: Key>(
    rows: Vec<X>,
    cols: Vec<Y>,
    f: impl Fn(&X) -> R,
    g: impl Fn(&Y) -> C,
    rel: &ValRel<R, C>,
) -> Result<ValRel<X, Y>> {
    let row_pos = rows
        .iter()
        .map(|x| {
            let fx = f(x);
            rel.row_position(&fx)
                .ok_or_else(|| Error::CarrierMismatch(format!("image `{fx}` of `{x}` is not a row of the relation")))
        })
        .collect::<Result<Vec<_>>>()?;
    let col_pos = cols
        .iter()
        .map(|y| {
            let gy = g(y);
            rel.col_position(&gy)
                .ok_or_else(|| Error::CarrierMismatch(format!("image `{gy}` of `{y}` is not a column of the relation")))
        })
        .collect::<Result<Vec<_>>>()?;
    let row_index = index_of("row", &rows)?;
    let col_index = index_of("column", &cols)?;
    let mut values = Vec::with_capacity(rows.len() * cols.len());
    for &i in &row_pos {
        for &j in &col_pos {
            values.push(rel.at(i, j));
        }
    }
    Ok(ValRel { kind: rel.kind, rows, cols, row_index, col_index, values })
}

/// Pointwise `⊑`.
pub fn pointwise_leq<R: Key, C: Key>(a: &ValRel<R, C>, b: &ValRel<R, C>) -> Result<bool> {
    a.same_shape(b)?;
    for (x, y) in a.values.iter().zip(&b.values) {
        if !semiring::leq(*x, *y)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First entry where `a ⊑ b` fails, if any.
pub fn first_violation<'a, R: Key, C: Key>(a: &'a ValRel<R, C>, b: &ValRel<R, C>) -> Result<Option<(&'a R, &'a C)>> {
    a.same_shape(b)?;
    for (i, (x, y)) in a.values.iter().zip(&b.values).enumerate() {
        if !semiring::leq(*x, *y)? {
            let n = a.cols.len();
            return Ok(Some((&a.rows[i / n], &a.cols[i % n])));
        }
    }
    Ok(None)
}

/// Maximum entrywise [`semiring::gap`]; 0 for relations with no entries.
pub fn max_gap<R: Key, C: Key>(a: &ValRel<R, C>, b: &ValRel<R, C>) -> Result<f64> {
    a.same_shape(b)?;
    let mut worst: f64 = 0.0;
    for (x, y) in a.values.iter().zip(&b.values) {
        worst = worst.max(semiring::gap(*x, *y)?);
    }
    Ok(worst)
}
