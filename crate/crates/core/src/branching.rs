//! Finite-support weight functions `X → T1`, the common representation of
//! powerset (Bool weights), sub-distribution (Prob) and tropical weight
//! function (Tropical) values.

use std::fmt;

use crate::error::{Error, Result};
use crate::polyfunctor::PolyTerm;
use crate::semiring::{self, SemiringKind, SemiringValue, PROB_EPSILON};

/// An element of `T(X)`, stored as its support sorted by key.
///
/// Valid values never store the additive zero of their kind, so two valid
/// values are equal iff they denote the same weight function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchVal {
    kind: SemiringKind,
    weights: Vec<(PolyTerm, SemiringValue)>,
}

impl BranchVal {
    /// The zero element (deadlock, empty support).
    pub fn empty(kind: SemiringKind) -> Self {
        BranchVal { kind, weights: Vec::new() }
    }

    /// Dirac / singleton value `η(x)`.
    pub fn unit(kind: SemiringKind, x: PolyTerm) -> Self {
        BranchVal { kind, weights: vec![(x, kind.one())] }
    }

    /// Normalising constructor: zero weights are dropped and repeated keys
    /// are merged with `+`. Fails if a merge or the total is undefined, or a
    /// weight has the wrong kind.
    pub fn new(kind: SemiringKind, entries: impl IntoIterator<Item = (PolyTerm, SemiringValue)>) -> Result<Self> {
        let mut weights: Vec<(PolyTerm, SemiringValue)> = Vec::new();
        let mut sorted: Vec<_> = entries.into_iter().collect();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        for (key, w) in sorted {
            if w.kind() != kind {
                return Err(Error::kind_mismatch(kind, w.kind()));
            }
            if !w.is_valid() {
                return Err(Error::Validation(format!("weight {w} of `{key}` is not a {kind} value")));
            }
            match weights.last_mut() {
                Some((k, acc)) if *k == key => {
                    *acc = semiring::add(*acc, w)?.ok_or_else(|| {
                        Error::Validation(format!("weights of repeated key `{key}` do not add up"))
                    })?;
                }
                _ => weights.push((key, w)),
            }
        }
        weights.retain(|(_, w)| !w.is_zero());
        let v = BranchVal { kind, weights };
        if kind == SemiringKind::Prob && v.mass() > 1.0 + PROB_EPSILON {
            return Err(Error::Validation(format!("sub-distribution {v} has total mass {} > 1", v.mass())));
        }
        Ok(v)
    }

    /// Powerset value from a set of keys.
    pub fn set(keys: impl IntoIterator<Item = PolyTerm>) -> Self {
        Self::new(SemiringKind::Bool, keys.into_iter().map(|k| (k, SemiringValue::Bool(true))))
            .expect("boolean weights always add")
    }

    /// Build without normalisation, keeping entries as given (sorted by key).
    /// Used to ingest and then [`validate_branchval`] raw data.
    pub fn from_raw(kind: SemiringKind, entries: impl IntoIterator<Item = (PolyTerm, SemiringValue)>) -> Self {
        let mut weights: Vec<_> = entries.into_iter().collect();
        weights.sort_by(|a, b| a.0.cmp(&b.0));
        BranchVal { kind, weights }
    }

    pub fn kind(&self) -> SemiringKind {
        self.kind
    }

    /// Support in canonical key order.
    pub fn support(&self) -> &[(PolyTerm, SemiringValue)] {
        &self.weights
    }

    pub fn keys(&self) -> impl Iterator<Item = &PolyTerm> {
        self.weights.iter().map(|(k, _)| k)
    }

    pub fn weight(&self, key: &PolyTerm) -> SemiringValue {
        self.weights
            .binary_search_by(|(k, _)| k.cmp(key))
            .map_or(self.kind.zero(), |i| self.weights[i].1)
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    /// Total Prob mass; 0 for other kinds.
    fn mass(&self) -> f64 {
        self.weights
            .iter()
            .map(|(_, w)| match w {
                SemiringValue::Prob(p) => *p,
                _ => 0.0,
            })
            .sum()
    }
}

impl fmt::Display for BranchVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, w)) in self.weights.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match self.kind {
                SemiringKind::Bool => write!(f, "{k}")?,
                _ => write!(f, "{k} ↦ {w}")?,
            }
        }
        f.write_str("}")
    }
}

/// Does `v` satisfy the carrier invariants: kinds agree, no zero weights,
/// keys distinct, Prob mass at most 1 (up to tolerance)?
pub fn validate_branchval(v: &BranchVal) -> bool {
    let kinds_ok = v.weights.iter().all(|(_, w)| w.kind() == v.kind && w.is_valid() && !w.is_zero());
    let distinct = v.weights.windows(2).all(|p| p[0].0 < p[1].0);
    kinds_ok && distinct && (v.kind != SemiringKind::Prob || v.mass() <= 1.0 + PROB_EPSILON)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> PolyTerm {
        PolyTerm::state("x")
    }

    fn y() -> PolyTerm {
        PolyTerm::state("y")
    }

    #[test]
    fn overweight_distribution_is_invalid() {
        let v = BranchVal::from_raw(
            SemiringKind::Prob,
            [(x(), SemiringValue::Prob(0.5)), (y(), SemiringValue::Prob(0.6))],
        );
        assert!(!validate_branchval(&v));
        assert!(BranchVal::new(SemiringKind::Prob, v.support().to_vec()).is_err());
    }

    #[test]
    fn empty_is_valid() {
        for k in SemiringKind::ALL {
            assert!(validate_branchval(&BranchVal::empty(k)));
        }
    }

    #[test]
    fn subsets_are_valid() {
        let v = BranchVal::set([x(), y()]);
        assert!(validate_branchval(&v));
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn normalisation_drops_zeros_and_merges() {
        let v = BranchVal::new(
            SemiringKind::Tropical,
            [(y(), SemiringValue::cost(4)), (x(), SemiringValue::infinity()), (y(), SemiringValue::cost(2))],
        )
        .unwrap();
        assert_eq!(v.support(), &[(y(), SemiringValue::cost(2))]);
        assert_eq!(v.weight(&x()), SemiringValue::infinity());

        let raw = BranchVal::from_raw(SemiringKind::Tropical, [(x(), SemiringValue::infinity())]);
        assert!(!validate_branchval(&raw));
        let dup = BranchVal::from_raw(SemiringKind::Bool, [(x(), SemiringValue::Bool(true)), (x(), SemiringValue::Bool(true))]);
        assert!(!validate_branchval(&dup));
    }

    #[test]
    fn canonical_equality() {
        let a = BranchVal::new(SemiringKind::Prob, [(x(), SemiringValue::Prob(0.25)), (y(), SemiringValue::Prob(0.5))]).unwrap();
        let b = BranchVal::new(
            SemiringKind::Prob,
            [(y(), SemiringValue::Prob(0.5)), (x(), SemiringValue::Prob(0.25)), (PolyTerm::state("z"), SemiringValue::Prob(0.0))],
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wrong_weight_kind() {
        let err = BranchVal::new(SemiringKind::Prob, [(x(), SemiringValue::cost(1))]).unwrap_err();
        assert!(matches!(err, Error::KindMismatch { .. }));
    }
}
