//! Truth values induced by the supported branching monads.
//!
//! Each monad `T` (powerset, sub-distributions, tropical weight functions)
//! induces a partial commutative semiring on `T1`:
//!
//! | kind       | carrier   | `+`          | `0` | `•` | `1` | order `⊑`   |
//! |------------|-----------|--------------|-----|-----|-----|-------------|
//! | `Bool`     | {⊥, ⊤}    | ∨            | ⊥   | ∧   | ⊤   | ⊥ < ⊤       |
//! | `Prob`     | [0, 1]    | + (partial)  | 0   | *   | 1   | ≤           |
//! | `Tropical` | ℕ ∪ {∞}   | min          | ∞   | +   | 0   | ≥           |
//!
//! Prob arithmetic is binary floating point; comparisons and the
//! definedness guard of `+` use [`PROB_EPSILON`].

pub(crate) mod laws;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::error::{Error, Result};

pub use laws::{check_semiring_laws, LawOutcome, LawReport};

/// Comparison tolerance for Prob values.
pub const PROB_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemiringKind {
    Bool,
    Prob,
    Tropical,
}

impl SemiringKind {
    pub const ALL: [SemiringKind; 3] = [SemiringKind::Bool, SemiringKind::Prob, SemiringKind::Tropical];

    pub fn name(self) -> &'static str {
        match self {
            SemiringKind::Bool => "bool",
            SemiringKind::Prob => "prob",
            SemiringKind::Tropical => "tropical",
        }
    }

    /// Additive unit, the bottom of `⊑`.
    pub fn zero(self) -> SemiringValue {
        match self {
            SemiringKind::Bool => SemiringValue::Bool(false),
            SemiringKind::Prob => SemiringValue::Prob(0.0),
            SemiringKind::Tropical => SemiringValue::Tropical(ExtNat::Inf),
        }
    }

    /// Multiplicative unit, the top of `⊑`.
    pub fn one(self) -> SemiringValue {
        match self {
            SemiringKind::Bool => SemiringValue::Bool(true),
            SemiringKind::Prob => SemiringValue::Prob(1.0),
            SemiringKind::Tropical => SemiringValue::Tropical(ExtNat::Fin(0)),
        }
    }
}

impl fmt::Display for SemiringKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SemiringKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bool" => Ok(SemiringKind::Bool),
            "prob" => Ok(SemiringKind::Prob),
            "tropical" => Ok(SemiringKind::Tropical),
            other => Err(Error::Parse(format!(
                "unknown semiring kind `{other}` (expected bool, prob or tropical)"
            ))),
        }
    }
}

/// Extended natural number `ℕ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

impl ExtNat {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtNat::Fin(_))
    }

    /// Cost addition; `∞` is absorbing. Overflow saturates to `∞`.
    pub fn plus(self, other: ExtNat) -> ExtNat {
        match (self, other) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => a.checked_add(b).map_or(ExtNat::Inf, ExtNat::Fin),
            _ => ExtNat::Inf,
        }
    }
}

impl PartialOrd for ExtNat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Numeric order, `∞` largest. Note that `⊑` on tropical values is the reverse.
impl Ord for ExtNat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => a.cmp(b),
            (ExtNat::Fin(_), ExtNat::Inf) => Ordering::Less,
            (ExtNat::Inf, ExtNat::Fin(_)) => Ordering::Greater,
            (ExtNat::Inf, ExtNat::Inf) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(n) => write!(f, "{n}"),
            ExtNat::Inf => f.write_str("inf"),
        }
    }
}

/// An element of `T1` for one of the supported monads.
#[derive(Debug, Clone, Copy)]
pub enum SemiringValue {
    Bool(bool),
    Prob(f64),
    Tropical(ExtNat),
}

impl SemiringValue {
    /// Checked Prob constructor. Values within [`PROB_EPSILON`] above 1 are clamped.
    pub fn prob(v: f64) -> Result<Self> {
        if !(0.0..=1.0 + PROB_EPSILON).contains(&v) {
            return Err(Error::Validation(format!("probability {v} outside [0, 1]")));
        }
        Ok(SemiringValue::Prob(v.min(1.0)))
    }

    pub fn cost(n: u64) -> Self {
        SemiringValue::Tropical(ExtNat::Fin(n))
    }

    pub fn infinity() -> Self {
        SemiringValue::Tropical(ExtNat::Inf)
    }

    pub fn kind(&self) -> SemiringKind {
        match self {
            SemiringValue::Bool(_) => SemiringKind::Bool,
            SemiringValue::Prob(_) => SemiringKind::Prob,
            SemiringValue::Tropical(_) => SemiringKind::Tropical,
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            SemiringValue::Bool(b) => !b,
            SemiringValue::Prob(p) => p == 0.0,
            SemiringValue::Tropical(w) => w == ExtNat::Inf,
        }
    }

    pub fn is_one(&self) -> bool {
        match *self {
            SemiringValue::Bool(b) => b,
            SemiringValue::Prob(p) => p == 1.0,
            SemiringValue::Tropical(w) => w == ExtNat::Fin(0),
        }
    }

    /// Carrier invariant of the payload.
    pub fn is_valid(&self) -> bool {
        match *self {
            SemiringValue::Prob(p) => (0.0..=1.0).contains(&p),
            _ => true,
        }
    }

    /// Parse a textual value of the given kind: `0`/`1`/`true`/`false` for
    /// Bool, a decimal for Prob, an integer or `inf` for Tropical.
    pub fn parse(kind: SemiringKind, text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::Parse(format!("`{text}` is not a {kind} value"));
        match kind {
            SemiringKind::Bool => match text {
                "1" | "true" | "⊤" => Ok(SemiringValue::Bool(true)),
                "0" | "false" | "⊥" => Ok(SemiringValue::Bool(false)),
                _ => Err(bad()),
            },
            SemiringKind::Prob => SemiringValue::prob(text.parse().map_err(|_| bad())?),
            SemiringKind::Tropical => match text {
                "inf" | "∞" => Ok(SemiringValue::infinity()),
                _ => Ok(SemiringValue::cost(text.parse().map_err(|_| bad())?)),
            },
        }
    }
}

/// Exact equality of payloads; Prob compares bit patterns after
/// normalising `-0.0`.
impl PartialEq for SemiringValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for SemiringValue {}

impl Hash for SemiringValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match *self {
            SemiringValue::Bool(b) => (0u8, b).hash(state),
            SemiringValue::Prob(p) => (1u8, (p + 0.0).to_bits()).hash(state),
            SemiringValue::Tropical(w) => (2u8, w).hash(state),
        }
    }
}

impl PartialOrd for SemiringValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Structural total order used for canonical key ordering. This is not `⊑`.
impl Ord for SemiringValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (SemiringValue::Bool(a), SemiringValue::Bool(b)) => a.cmp(b),
            (SemiringValue::Prob(a), SemiringValue::Prob(b)) => (a + 0.0).total_cmp(&(b + 0.0)),
            (SemiringValue::Tropical(a), SemiringValue::Tropical(b)) => a.cmp(b),
            _ => self.kind().cmp(&other.kind()),
        }
    }
}

impl fmt::Display for SemiringValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemiringValue::Bool(b) => f.write_str(if *b { "1" } else { "0" }),
            SemiringValue::Prob(p) => write!(f, "{p:.9}"),
            SemiringValue::Tropical(w) => write!(f, "{w}"),
        }
    }
}

fn same_kind(a: &SemiringValue, b: &SemiringValue) -> Result<()> {
    if a.kind() == b.kind() {
        Ok(())
    } else {
        Err(Error::kind_mismatch(a.kind(), b.kind()))
    }
}

/// Partial addition. `Ok(None)` is the undefined outcome of Prob sums above 1.
pub fn add(a: SemiringValue, b: SemiringValue) -> Result<Option<SemiringValue>> {
    same_kind(&a, &b)?;
    Ok(match (a, b) {
        (SemiringValue::Bool(x), SemiringValue::Bool(y)) => Some(SemiringValue::Bool(x || y)),
        (SemiringValue::Prob(x), SemiringValue::Prob(y)) => {
            let s = x + y;
            (s <= 1.0 + PROB_EPSILON).then(|| SemiringValue::Prob(s.min(1.0)))
        }
        (SemiringValue::Tropical(x), SemiringValue::Tropical(y)) => {
            Some(SemiringValue::Tropical(x.min(y)))
        }
        _ => unreachable!(),
    })
}

pub fn mul(a: SemiringValue, b: SemiringValue) -> Result<SemiringValue> {
    same_kind(&a, &b)?;
    Ok(match (a, b) {
        (SemiringValue::Bool(x), SemiringValue::Bool(y)) => SemiringValue::Bool(x && y),
        (SemiringValue::Prob(x), SemiringValue::Prob(y)) => SemiringValue::Prob(x * y),
        (SemiringValue::Tropical(x), SemiringValue::Tropical(y)) => SemiringValue::Tropical(x.plus(y)),
        _ => unreachable!(),
    })
}

/// The natural preorder `⊑`.
pub fn leq(a: SemiringValue, b: SemiringValue) -> Result<bool> {
    same_kind(&a, &b)?;
    Ok(match (a, b) {
        (SemiringValue::Bool(x), SemiringValue::Bool(y)) => !x || y,
        (SemiringValue::Prob(x), SemiringValue::Prob(y)) => x <= y + PROB_EPSILON,
        (SemiringValue::Tropical(x), SemiringValue::Tropical(y)) => x >= y,
        _ => unreachable!(),
    })
}

/// Convergence distance between two values. A finite/∞ pair on the tropical
/// side is `f64::INFINITY`.
pub fn gap(a: SemiringValue, b: SemiringValue) -> Result<f64> {
    same_kind(&a, &b)?;
    Ok(match (a, b) {
        (SemiringValue::Bool(x), SemiringValue::Bool(y)) => {
            if x == y {
                0.0
            } else {
                1.0
            }
        }
        (SemiringValue::Prob(x), SemiringValue::Prob(y)) => (x - y).abs(),
        (SemiringValue::Tropical(x), SemiringValue::Tropical(y)) => match (x, y) {
            (ExtNat::Fin(m), ExtNat::Fin(n)) => m.abs_diff(n) as f64,
            (ExtNat::Inf, ExtNat::Inf) => 0.0,
            _ => f64::INFINITY,
        },
        _ => unreachable!(),
    })
}

/// Left fold of `+` over `values`, starting from `0`.
pub fn sum<I>(kind: SemiringKind, values: I) -> Result<Option<SemiringValue>>
where
    I: IntoIterator<Item = SemiringValue>,
{
    let mut acc = kind.zero();
    for v in values {
        match add(acc, v)? {
            Some(s) => acc = s,
            None => return Ok(None),
        }
    }
    Ok(Some(acc))
}
