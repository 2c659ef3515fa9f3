//! Relation transformers: polynomial lifting, extension lifting along the
//! branching monad (one-sided and bilinear), and the Egli-Milner lifting
//! used for bisimilarity.
//!
//! Branching values are materialised only on explicitly supplied carriers;
//! `T(X)` itself is never enumerated.

use crate::branching::BranchVal;
use crate::error::{Error, Result};
use crate::polyfunctor::{enumerate_terms_over, PolyExpr, PolyTerm};
use crate::relation::{Key, ValRel};
use crate::semiring::{self, SemiringKind, SemiringValue};

fn ill_typed(expr: &PolyExpr, u: &PolyTerm, v: &PolyTerm) -> Error {
    Error::Type(format!("terms `{u}` and `{v}` are not both elements of `{expr}`"))
}

/// One entry of `Rel(F)(R)` at `(u, v)`, with `leaf` giving `R` on the
/// subterms in `Id` positions.
pub fn poly_entry(
    kind: SemiringKind,
    expr: &PolyExpr,
    u: &PolyTerm,
    v: &PolyTerm,
    leaf: &dyn Fn(&PolyTerm, &PolyTerm) -> Result<SemiringValue>,
) -> Result<SemiringValue> {
    match (expr, u, v) {
        (PolyExpr::Id, _, _) => leaf(u, v),
        (PolyExpr::Const(labels), PolyTerm::Atom(a), PolyTerm::Atom(b)) => {
            if !labels.contains(a) || !labels.contains(b) {
                return Err(ill_typed(expr, u, v));
            }
            Ok(if a == b { kind.one() } else { kind.zero() })
        }
        (PolyExpr::Prod(le, re), PolyTerm::Pair(u1, u2), PolyTerm::Pair(v1, v2)) => {
            let left = poly_entry(kind, le, u1, v1, leaf)?;
            let right = poly_entry(kind, re, u2, v2, leaf)?;
            semiring::mul(left, right)
        }
        (PolyExpr::Coprod(branches), PolyTerm::Inj(i, ui), PolyTerm::Inj(j, vj)) => {
            if *i >= branches.len() || *j >= branches.len() {
                return Err(ill_typed(expr, u, v));
            }
            if i == j {
                poly_entry(kind, &branches[*i], ui, vj, leaf)
            } else {
                Ok(kind.zero())
            }
        }
        (PolyExpr::Power(labels, body), PolyTerm::Tuple(us), PolyTerm::Tuple(vs))
            if us.len() == labels.len() && vs.len() == labels.len() =>
        {
            let mut acc = kind.one();
            for (ui, vi) in us.iter().zip(vs) {
                acc = semiring::mul(acc, poly_entry(kind, body, ui, vi, leaf)?)?;
            }
            Ok(acc)
        }
        _ => Err(ill_typed(expr, u, v)),
    }
}

/// `Rel(F)(R)` over the given terms of `F(X)` and `F(Y)`.
pub fn lift_poly_on(
    expr: &PolyExpr,
    rel: &ValRel<PolyTerm, PolyTerm>,
    rows: Vec<PolyTerm>,
    cols: Vec<PolyTerm>,
) -> Result<ValRel<PolyTerm, PolyTerm>> {
    let kind = rel.kind();
    let leaf = |x: &PolyTerm, y: &PolyTerm| rel.lookup(x, y);
    ValRel::from_fn(kind, rows, cols, |u, v| poly_entry(kind, expr, u, v, &leaf))
}

/// `Rel(F)(R)` over all of `F(X) × F(Y)`, where `X` and `Y` are the carriers
/// of `rel`.
pub fn lift_poly(expr: &PolyExpr, rel: &ValRel<PolyTerm, PolyTerm>, cap: usize) -> Result<ValRel<PolyTerm, PolyTerm>> {
    let rows = enumerate_terms_over(expr, rel.rows(), cap)?;
    let cols = enumerate_terms_over(expr, rel.cols(), cap)?;
    lift_poly_on(expr, rel, rows, cols)
}

fn check_kind(rel_kind: SemiringKind, values: &[BranchVal]) -> Result<()> {
    match values.iter().find(|b| b.kind() != rel_kind) {
        Some(b) => Err(Error::kind_mismatch(rel_kind, b.kind())),
        None => Ok(()),
    }
}

fn undefined(t: &BranchVal) -> Error {
    Error::UndefinedSum(format!("weighted sum over {t} exceeds the carrier"))
}

/// `⊕_{x ∈ sup t} t(x) ⊗ value(x)`, folded in key order.
fn extend_over(
    kind: SemiringKind,
    t: &BranchVal,
    mut value: impl FnMut(&PolyTerm) -> Result<SemiringValue>,
) -> Result<SemiringValue> {
    let mut acc = kind.zero();
    for (x, w) in t.support() {
        let term = semiring::mul(*w, value(x)?)?;
        acc = semiring::add(acc, term)?.ok_or_else(|| undefined(t))?;
    }
    Ok(acc)
}

/// Extension lifting `L_T`: the 1-linear extension of `R : X × Y → T1` to
/// `T(X) × Y`, evaluated on the given branching values. Rows of the result
/// are `PolyTerm::Branch` keys.
pub fn lift_extension<C: Key>(rel: &ValRel<PolyTerm, C>, rows: &[BranchVal]) -> Result<ValRel<PolyTerm, C>> {
    let kind = rel.kind();
    check_kind(kind, rows)?;
    let keys = rows.iter().cloned().map(PolyTerm::Branch).collect();
    ValRel::from_fn(kind, keys, rel.cols().to_vec(), |t, y| {
        let PolyTerm::Branch(t) = t else { unreachable!() };
        extend_over(kind, t, |x| rel.lookup(x, y))
    })
}

/// The dual lifting: 2-linear extension of `R` to `X × T(Y)`.
pub fn lift_dual_extension<R: Key>(rel: &ValRel<R, PolyTerm>, cols: &[BranchVal]) -> Result<ValRel<R, PolyTerm>> {
    let kind = rel.kind();
    check_kind(kind, cols)?;
    let keys = cols.iter().cloned().map(PolyTerm::Branch).collect();
    ValRel::from_fn(kind, rel.rows().to_vec(), keys, |x, u| {
        let PolyTerm::Branch(u) = u else { unreachable!() };
        extend_over(kind, u, |y| rel.lookup(x, y))
    })
}

/// Double extension lifting `L'_T`: the bilinear extension of `R` to
/// `T(X) × T(Y)`, `(t, u) ↦ ⊕ t(x) ⊗ u(y) ⊗ R(x, y)`.
pub fn lift_double_extension(
    rel: &ValRel<PolyTerm, PolyTerm>,
    rows: &[BranchVal],
    cols: &[BranchVal],
) -> Result<ValRel<PolyTerm, PolyTerm>> {
    let kind = rel.kind();
    check_kind(kind, rows)?;
    check_kind(kind, cols)?;
    let row_keys = rows.iter().cloned().map(PolyTerm::Branch).collect();
    let col_keys = cols.iter().cloned().map(PolyTerm::Branch).collect();
    ValRel::from_fn(kind, row_keys, col_keys, |t, u| {
        let (PolyTerm::Branch(t), PolyTerm::Branch(u)) = (t, u) else { unreachable!() };
        let mut acc = kind.zero();
        for (x, tw) in t.support() {
            for (y, uw) in u.support() {
                let term = semiring::mul(semiring::mul(*tw, *uw)?, rel.lookup(x, y)?)?;
                acc = semiring::add(acc, term)?.ok_or_else(|| undefined(t))?;
            }
        }
        Ok(acc)
    })
}

/// Egli-Milner lifting of a boolean relation to powersets: every element on
/// each side has a related partner on the other.
pub fn lift_egli_milner(
    rel: &ValRel<PolyTerm, PolyTerm>,
    rows: &[BranchVal],
    cols: &[BranchVal],
) -> Result<ValRel<PolyTerm, PolyTerm>> {
    if rel.kind() != SemiringKind::Bool {
        return Err(Error::kind_mismatch(SemiringKind::Bool, rel.kind()));
    }
    check_kind(SemiringKind::Bool, rows)?;
    check_kind(SemiringKind::Bool, cols)?;
    let related = |x: &PolyTerm, y: &PolyTerm| -> Result<bool> { Ok(rel.lookup(x, y)?.is_one()) };
    let row_keys = rows.iter().cloned().map(PolyTerm::Branch).collect();
    let col_keys = cols.iter().cloned().map(PolyTerm::Branch).collect();
    ValRel::from_fn(SemiringKind::Bool, row_keys, col_keys, |u, v| {
        let (PolyTerm::Branch(u), PolyTerm::Branch(v)) = (u, v) else { unreachable!() };
        for x in u.keys() {
            let mut found = false;
            for y in v.keys() {
                if related(x, y)? {
                    found = true;
                    break;
                }
            }
            if !found {
                return Ok(SemiringValue::Bool(false));
            }
        }
        for y in v.keys() {
            let mut found = false;
            for x in u.keys() {
                if related(x, y)? {
                    found = true;
                    break;
                }
            }
            if !found {
                return Ok(SemiringValue::Bool(false));
            }
        }
        Ok(SemiringValue::Bool(true))
    })
}
