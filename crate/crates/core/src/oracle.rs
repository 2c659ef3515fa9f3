//! Bounded-depth brute-force evaluator.
//!
//! Computes the `d`-th iterate of the behaviour and common-trace operators by
//! plain structural recursion over the nested transition values, with its
//! own arithmetic. Nothing from the lifting or engine modules is used, so
//! agreement between the two is meaningful evidence.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::polyfunctor::{PolyExpr, PolyTerm, StateId, DEFAULT_ENUM_CAP};
use crate::relation::ValRel;
use crate::semiring::{ExtNat, SemiringKind, SemiringValue};
use crate::system::{Layer, SpecSystem, System};

type Table = HashMap<(StateId, StateId), SemiringValue>;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Semantics {
    Behaviour,
    Common,
}

struct Oracle<'a> {
    kind: SemiringKind,
    semantics: Semantics,
    left: &'a [Layer],
    right: &'a [Layer],
    previous: Table,
    work: usize,
    cap: usize,
}

fn one(kind: SemiringKind) -> SemiringValue {
    match kind {
        SemiringKind::Bool => SemiringValue::Bool(true),
        SemiringKind::Prob => SemiringValue::Prob(1.0),
        SemiringKind::Tropical => SemiringValue::Tropical(ExtNat::Fin(0)),
    }
}

fn zero(kind: SemiringKind) -> SemiringValue {
    match kind {
        SemiringKind::Bool => SemiringValue::Bool(false),
        SemiringKind::Prob => SemiringValue::Prob(0.0),
        SemiringKind::Tropical => SemiringValue::Tropical(ExtNat::Inf),
    }
}

fn plus(a: SemiringValue, b: SemiringValue) -> Result<SemiringValue> {
    use SemiringValue::*;
    match (a, b) {
        (Bool(x), Bool(y)) => Ok(Bool(x || y)),
        (Prob(x), Prob(y)) => {
            let s = x + y;
            if s > 1.0 + 1e-9 {
                Err(Error::UndefinedSum(format!("{x} + {y} exceeds 1")))
            } else {
                Ok(Prob(s.min(1.0)))
            }
        }
        (Tropical(x), Tropical(y)) => Ok(Tropical(x.min(y))),
        _ => Err(Error::Validation(format!("mixed kinds {a} and {b}"))),
    }
}

fn times(a: SemiringValue, b: SemiringValue) -> Result<SemiringValue> {
    use SemiringValue::*;
    match (a, b) {
        (Bool(x), Bool(y)) => Ok(Bool(x && y)),
        (Prob(x), Prob(y)) => Ok(Prob(x * y)),
        (Tropical(ExtNat::Fin(x)), Tropical(ExtNat::Fin(y))) => {
            Ok(Tropical(x.checked_add(y).map_or(ExtNat::Inf, ExtNat::Fin)))
        }
        (Tropical(_), Tropical(_)) => Ok(Tropical(ExtNat::Inf)),
        _ => Err(Error::Validation(format!("mixed kinds {a} and {b}"))),
    }
}

fn shape_error(expr: &PolyExpr, t: &PolyTerm) -> Error {
    Error::Type(format!("oracle: `{t}` does not have shape `{expr}`"))
}

impl Oracle<'_> {
    fn tick(&mut self) -> Result<()> {
        self.work += 1;
        if self.work > self.cap {
            return Err(Error::CombinatorialLimit { count: self.work as u128, cap: self.cap });
        }
        Ok(())
    }

    /// Value of the pair `(t, u)` where `t` sits above `left` and `u` above
    /// `right`.
    fn value(&mut self, left: &[Layer], right: &[Layer], t: &PolyTerm, u: &PolyTerm) -> Result<SemiringValue> {
        self.tick()?;
        match (left.first(), right.first()) {
            (None, None) => match (t, u) {
                (PolyTerm::StateRef(c), PolyTerm::StateRef(z)) => self
                    .previous
                    .get(&(c.clone(), z.clone()))
                    .copied()
                    .ok_or_else(|| Error::Validation(format!("oracle: no value for ({c}, {z})"))),
                _ => Err(Error::Type(format!("oracle: expected two states, found `{t}` and `{u}`"))),
            },
            (Some(Layer::Branch), _) if self.semantics == Semantics::Behaviour => {
                let PolyTerm::Branch(b) = t else { return Err(Error::Type(format!("oracle: `{t}` is not branching"))) };
                let mut acc = zero(self.kind);
                for (x, w) in b.support() {
                    let inner = self.value(&left[1..], right, x, u)?;
                    acc = plus(acc, times(*w, inner)?)?;
                }
                Ok(acc)
            }
            (Some(Layer::Branch), Some(Layer::Branch)) => {
                let (PolyTerm::Branch(b), PolyTerm::Branch(c)) = (t, u) else {
                    return Err(Error::Type(format!("oracle: `{t}` or `{u}` is not branching")));
                };
                let mut acc = zero(self.kind);
                for (x, w) in b.support() {
                    for (y, v) in c.support() {
                        let inner = self.value(&left[1..], &right[1..], x, y)?;
                        acc = plus(acc, times(times(*w, *v)?, inner)?)?;
                    }
                }
                Ok(acc)
            }
            (Some(Layer::Poly(e)), Some(Layer::Poly(f))) if e == f => self.shape(e, &left[1..], &right[1..], t, u),
            _ => Err(Error::StackMismatch("oracle: stacks do not line up".into())),
        }
    }

    fn shape(&mut self, e: &PolyExpr, left: &[Layer], right: &[Layer], t: &PolyTerm, u: &PolyTerm) -> Result<SemiringValue> {
        match e {
            PolyExpr::Id => self.value(left, right, t, u),
            PolyExpr::Const(_) => match (t, u) {
                (PolyTerm::Atom(a), PolyTerm::Atom(b)) => Ok(if a == b { one(self.kind) } else { zero(self.kind) }),
                _ => Err(shape_error(e, t)),
            },
            PolyExpr::Prod(l, r) => match (t, u) {
                (PolyTerm::Pair(t1, t2), PolyTerm::Pair(u1, u2)) => {
                    let a = self.shape(l, left, right, t1, u1)?;
                    let b = self.shape(r, left, right, t2, u2)?;
                    times(a, b)
                }
                _ => Err(shape_error(e, t)),
            },
            PolyExpr::Coprod(bs) => match (t, u) {
                (PolyTerm::Inj(i, ti), PolyTerm::Inj(j, uj)) if i == j && *i < bs.len() => {
                    self.shape(&bs[*i], left, right, ti, uj)
                }
                (PolyTerm::Inj(..), PolyTerm::Inj(..)) => Ok(zero(self.kind)),
                _ => Err(shape_error(e, t)),
            },
            PolyExpr::Power(labels, body) => match (t, u) {
                (PolyTerm::Tuple(ts), PolyTerm::Tuple(us)) if ts.len() == labels.len() && us.len() == labels.len() => {
                    let mut acc = one(self.kind);
                    for (ti, ui) in ts.iter().zip(us) {
                        acc = times(acc, self.shape(body, left, right, ti, ui)?)?;
                    }
                    Ok(acc)
                }
                _ => Err(shape_error(e, t)),
            },
        }
    }
}

fn run(
    semantics: Semantics,
    a: &System,
    b: &System,
    depth: usize,
    cap: usize,
) -> Result<ValRel<StateId, StateId>> {
    let kind = a.kind();
    let mut oracle = Oracle {
        kind,
        semantics,
        left: &a.stack().layers,
        right: &b.stack().layers,
        previous: Table::new(),
        work: 0,
        cap,
    };
    for c in a.states() {
        for z in b.states() {
            oracle.previous.insert((c.clone(), z.clone()), one(kind));
        }
    }
    for _ in 0..depth {
        let mut next = Table::new();
        for (c, t) in a.transitions() {
            for (z, u) in b.transitions() {
                let v = oracle.value(oracle.left, oracle.right, t, u)?;
                next.insert((c.clone(), z.clone()), v);
            }
        }
        oracle.previous = next;
    }
    ValRel::from_fn(kind, a.states().to_vec(), b.states().to_vec(), |c, z| {
        Ok(oracle.previous[&(c.clone(), z.clone())])
    })
}

/// The `depth`-th behaviour iterate of `sys` against `spec`.
pub fn oracle_matrix(sys: &System, spec: &SpecSystem, depth: usize) -> Result<ValRel<StateId, StateId>> {
    oracle_matrix_capped(sys, spec, depth, DEFAULT_ENUM_CAP)
}

/// As [`oracle_matrix`], failing once more than `cap` evaluation steps are needed.
pub fn oracle_matrix_capped(
    sys: &System,
    spec: &SpecSystem,
    depth: usize,
    cap: usize,
) -> Result<ValRel<StateId, StateId>> {
    let poly: Vec<&Layer> = sys.stack().layers.iter().filter(|l| matches!(l, Layer::Poly(_))).collect();
    if poly.len() != spec.stack().layers.len() || poly.iter().zip(&spec.stack().layers).any(|(l, r)| *l != r) {
        return Err(Error::StackMismatch("specification is not typed by the linear part of the system".into()));
    }
    run(Semantics::Behaviour, sys, spec.system(), depth, cap)
}

/// The `depth`-th common-trace iterate of `a` against `b`.
pub fn oracle_common(a: &System, b: &System, depth: usize) -> Result<ValRel<StateId, StateId>> {
    oracle_common_capped(a, b, depth, DEFAULT_ENUM_CAP)
}

pub fn oracle_common_capped(a: &System, b: &System, depth: usize, cap: usize) -> Result<ValRel<StateId, StateId>> {
    if a.stack() != b.stack() {
        return Err(Error::StackMismatch(format!("{} vs {}", a.stack(), b.stack())));
    }
    run(Semantics::Common, a, b, depth, cap)
}
