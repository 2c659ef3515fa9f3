//! Polynomial functors over finite sets: expression syntax, terms of `F(X)`,
//! typing and enumeration.
//!
//! Textual syntax (used in system files):
//!
//! ```text
//! expr  := prod ('+' prod)*          finite ordered coproduct
//! prod  := power ('*' power)*        binary product, left associative
//! power := atom ('^' labels)*        exponent by a finite label set
//! atom  := 'Id' | '1' | labels | '(' expr ')'
//! labels:= '{' label (',' label)* '}'
//! ```
//!
//! `1` is sugar for `{*}`. For example `{*} + {a,b} * Id` is `1 + A × Id`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::branching::BranchVal;
use crate::error::{Error, Result};

/// Default cap on the number of terms a dense enumeration may produce.
pub const DEFAULT_ENUM_CAP: usize = 1_000_000;

/// Label of a state in a finite coalgebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub String);

impl StateId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for StateId {
    fn from(s: &str) -> Self {
        StateId(s.to_string())
    }
}

impl From<String> for StateId {
    fn from(s: String) -> Self {
        StateId(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PolyExpr {
    Id,
    Const(Vec<String>),
    Prod(Box<PolyExpr>, Box<PolyExpr>),
    Coprod(Vec<PolyExpr>),
    /// `body^labels`, the `|labels|`-fold product of `body`.
    Power(Vec<String>, Box<PolyExpr>),
}

fn check_labels(what: &str, labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::Validation(format!("{what} label set is empty")));
    }
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::Validation(format!("{what} label set repeats `{l}`")));
        }
    }
    Ok(())
}

impl PolyExpr {
    pub fn constant<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        check_labels("constant", &labels)?;
        Ok(PolyExpr::Const(labels))
    }

    /// The terminal functor `1 = {*}`.
    pub fn one() -> Self {
        PolyExpr::Const(vec!["*".to_string()])
    }

    pub fn prod(left: PolyExpr, right: PolyExpr) -> Self {
        PolyExpr::Prod(Box::new(left), Box::new(right))
    }

    pub fn coprod(branches: Vec<PolyExpr>) -> Self {
        PolyExpr::Coprod(branches)
    }

    pub fn power<S: Into<String>>(labels: impl IntoIterator<Item = S>, body: PolyExpr) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        check_labels("exponent", &labels)?;
        Ok(PolyExpr::Power(labels, Box::new(body)))
    }

    /// `1 + A × Id`, the functor of labelled transitions with termination.
    pub fn lts<S: Into<String>>(alphabet: impl IntoIterator<Item = S>) -> Result<Self> {
        Ok(PolyExpr::coprod(vec![
            PolyExpr::one(),
            PolyExpr::prod(PolyExpr::constant(alphabet)?, PolyExpr::Id),
        ]))
    }

    /// Re-check the label-set invariants of a hand-built expression.
    pub fn validate(&self) -> Result<()> {
        match self {
            PolyExpr::Id => Ok(()),
            PolyExpr::Const(ls) => check_labels("constant", ls),
            PolyExpr::Prod(l, r) => {
                l.validate()?;
                r.validate()
            }
            PolyExpr::Coprod(bs) => bs.iter().try_for_each(PolyExpr::validate),
            PolyExpr::Power(ls, body) => {
                check_labels("exponent", ls)?;
                body.validate()
            }
        }
    }

    /// Number of terms in `F(X)` for `|X| = n`, saturating at `u128::MAX`.
    pub fn count_terms(&self, n: usize) -> u128 {
        match self {
            PolyExpr::Id => n as u128,
            PolyExpr::Const(ls) => ls.len() as u128,
            PolyExpr::Prod(l, r) => l.count_terms(n).saturating_mul(r.count_terms(n)),
            PolyExpr::Coprod(bs) => bs.iter().fold(0u128, |acc, b| acc.saturating_add(b.count_terms(n))),
            PolyExpr::Power(ls, body) => {
                let base = body.count_terms(n);
                ls.iter().fold(1u128, |acc, _| acc.saturating_mul(base))
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // prec: 0 = sum context, 1 = product operand, 2 = power base / coproduct branch
        match self {
            PolyExpr::Id => f.write_str("Id"),
            PolyExpr::Const(ls) => write!(f, "{{{}}}", ls.join(",")),
            PolyExpr::Prod(l, r) => {
                let paren = prec >= 2;
                if paren {
                    f.write_str("(")?;
                }
                l.fmt_prec(f, 1)?;
                f.write_str(" * ")?;
                // right operand of a left-associative product
                r.fmt_prec(f, 2)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
            PolyExpr::Coprod(bs) => {
                let paren = prec >= 1 || bs.len() < 2;
                if paren {
                    f.write_str("(")?;
                }
                for (i, b) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    // nested coproducts keep their own grouping
                    b.fmt_prec(f, if matches!(b, PolyExpr::Coprod(_)) { 1 } else { 0 })?;
                }
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
            PolyExpr::Power(ls, body) => {
                body.fmt_prec(f, 2)?;
                write!(f, "^{{{}}}", ls.join(","))
            }
        }
    }
}

impl fmt::Display for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl FromStr for PolyExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = ExprParser { src: s, pos: 0 };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.error("unexpected trailing input"));
        }
        e.validate()?;
        Ok(e)
    }
}

struct ExprParser<'a> {
    src: &'a str,
    pos: usize,
}

impl ExprParser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("functor `{}` at offset {}: {msg}", self.src, self.pos))
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<PolyExpr> {
        let mut branches = vec![self.prod()?];
        while self.eat('+') {
            branches.push(self.prod()?);
        }
        Ok(if branches.len() == 1 { branches.pop().unwrap() } else { PolyExpr::Coprod(branches) })
    }

    fn prod(&mut self) -> Result<PolyExpr> {
        let mut acc = self.power()?;
        while self.eat('*') {
            acc = PolyExpr::prod(acc, self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<PolyExpr> {
        let mut acc = self.atom()?;
        while self.eat('^') {
            let labels = self.labels()?;
            acc = PolyExpr::Power(labels, Box::new(acc));
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<PolyExpr> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                // a parenthesised coproduct stays one branch of an outer one
                Ok(e)
            }
            Some('{') => Ok(PolyExpr::Const(self.labels()?)),
            Some('1') => {
                self.pos += 1;
                Ok(PolyExpr::one())
            }
            _ if self.src[self.pos..].starts_with("Id") => {
                self.pos += 2;
                Ok(PolyExpr::Id)
            }
            _ => Err(self.error("expected `Id`, `1`, `{...}` or `(`")),
        }
    }

    fn labels(&mut self) -> Result<Vec<String>> {
        if !self.eat('{') {
            return Err(self.error("expected `{`"));
        }
        let rest = &self.src[self.pos..];
        let end = rest.find('}').ok_or_else(|| self.error("unterminated label set"))?;
        let labels: Vec<String> = rest[..end].split(',').map(|l| l.trim().to_string()).collect();
        if labels.iter().any(String::is_empty) {
            return Err(self.error("empty label"));
        }
        self.pos += end + 1;
        Ok(labels)
    }
}

/// A term of a (possibly nested) coalgebra value.
///
/// The polynomial constructors mirror [`PolyExpr`]; `StateRef` and `Branch`
/// are the leaves that fill `Id` positions, depending on which layer of a
/// type stack comes next.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolyTerm {
    StateRef(StateId),
    Atom(String),
    Pair(Box<PolyTerm>, Box<PolyTerm>),
    Inj(usize, Box<PolyTerm>),
    /// One component per exponent label, in the exponent's order.
    Tuple(Vec<PolyTerm>),
    Branch(BranchVal),
}

impl PolyTerm {
    pub fn state(id: impl Into<StateId>) -> Self {
        PolyTerm::StateRef(id.into())
    }

    pub fn atom(label: impl Into<String>) -> Self {
        PolyTerm::Atom(label.into())
    }

    /// The unique element `*` of `1`.
    pub fn unit() -> Self {
        PolyTerm::Atom("*".to_string())
    }

    pub fn pair(l: PolyTerm, r: PolyTerm) -> Self {
        PolyTerm::Pair(Box::new(l), Box::new(r))
    }

    pub fn inj(i: usize, t: PolyTerm) -> Self {
        PolyTerm::Inj(i, Box::new(t))
    }

    /// `ι₀(*)` under `1 + A × Id`.
    pub fn stop() -> Self {
        PolyTerm::inj(0, PolyTerm::unit())
    }

    /// `ι₁(a, next)` under `1 + A × Id`.
    pub fn step(label: impl Into<String>, next: PolyTerm) -> Self {
        PolyTerm::inj(1, PolyTerm::pair(PolyTerm::atom(label), next))
    }
}

impl fmt::Display for PolyTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyTerm::StateRef(s) => write!(f, "{s}"),
            PolyTerm::Atom(a) => f.write_str(a),
            PolyTerm::Pair(l, r) => write!(f, "({l}, {r})"),
            PolyTerm::Inj(i, t) => write!(f, "ι{i}({t})"),
            PolyTerm::Tuple(ts) => {
                f.write_str("<")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(">")
            }
            PolyTerm::Branch(b) => write!(f, "{b}"),
        }
    }
}

/// Structural typing of `term` against `expr`; `leaf` decides the terms
/// allowed in `Id` positions.
pub fn validate_term_with(expr: &PolyExpr, term: &PolyTerm, leaf: &mut dyn FnMut(&PolyTerm) -> bool) -> bool {
    match (expr, term) {
        (PolyExpr::Id, t) => leaf(t),
        (PolyExpr::Const(ls), PolyTerm::Atom(a)) => ls.contains(a),
        (PolyExpr::Prod(le, re), PolyTerm::Pair(l, r)) => {
            validate_term_with(le, l, leaf) && validate_term_with(re, r, leaf)
        }
        (PolyExpr::Coprod(bs), PolyTerm::Inj(i, t)) => {
            bs.get(*i).is_some_and(|b| validate_term_with(b, t, leaf))
        }
        (PolyExpr::Power(ls, body), PolyTerm::Tuple(ts)) => {
            ls.len() == ts.len() && ts.iter().all(|t| validate_term_with(body, t, leaf))
        }
        _ => false,
    }
}

/// Is `term` an element of `expr(states)`?
pub fn validate_term(expr: &PolyExpr, term: &PolyTerm, states: &[StateId]) -> bool {
    validate_term_with(expr, term, &mut |t| matches!(t, PolyTerm::StateRef(s) if states.contains(s)))
}

/// Visit the subterms sitting in `Id` positions of `term`, failing with a
/// type error if `term` does not have the shape of `expr`.
pub fn for_each_leaf<'t>(expr: &PolyExpr, term: &'t PolyTerm, f: &mut dyn FnMut(&'t PolyTerm)) -> Result<()> {
    match (expr, term) {
        (PolyExpr::Id, t) => {
            f(t);
            Ok(())
        }
        (PolyExpr::Const(ls), PolyTerm::Atom(a)) if ls.contains(a) => Ok(()),
        (PolyExpr::Prod(le, re), PolyTerm::Pair(l, r)) => {
            for_each_leaf(le, l, f)?;
            for_each_leaf(re, r, f)
        }
        (PolyExpr::Coprod(bs), PolyTerm::Inj(i, t)) if *i < bs.len() => for_each_leaf(&bs[*i], t, f),
        (PolyExpr::Power(ls, body), PolyTerm::Tuple(ts)) if ls.len() == ts.len() => {
            ts.iter().try_for_each(|t| for_each_leaf(body, t, f))
        }
        _ => Err(Error::Type(format!("term `{term}` is not an element of `{expr}`"))),
    }
}

/// Every term of `expr(states)`, each exactly once.
pub fn enumerate_terms(expr: &PolyExpr, states: &[StateId]) -> Result<Vec<PolyTerm>> {
    let leaves: Vec<PolyTerm> = states.iter().cloned().map(PolyTerm::StateRef).collect();
    enumerate_terms_over(expr, &leaves, DEFAULT_ENUM_CAP)
}

/// Every term of `expr` with `Id` positions drawn from `leaves`.
pub fn enumerate_terms_over(expr: &PolyExpr, leaves: &[PolyTerm], cap: usize) -> Result<Vec<PolyTerm>> {
    let count = expr.count_terms(leaves.len());
    if count > cap as u128 {
        return Err(Error::CombinatorialLimit { count, cap });
    }
    Ok(enumerate(expr, leaves))
}

fn enumerate(expr: &PolyExpr, leaves: &[PolyTerm]) -> Vec<PolyTerm> {
    match expr {
        PolyExpr::Id => leaves.to_vec(),
        PolyExpr::Const(ls) => ls.iter().cloned().map(PolyTerm::Atom).collect(),
        PolyExpr::Prod(le, re) => {
            let ls = enumerate(le, leaves);
            let rs = enumerate(re, leaves);
            let mut out = Vec::with_capacity(ls.len() * rs.len());
            for l in &ls {
                for r in &rs {
                    out.push(PolyTerm::pair(l.clone(), r.clone()));
                }
            }
            out
        }
        PolyExpr::Coprod(bs) => bs
            .iter()
            .enumerate()
            .flat_map(|(i, b)| enumerate(b, leaves).into_iter().map(move |t| PolyTerm::inj(i, t)))
            .collect(),
        PolyExpr::Power(ls, body) => {
            let base = enumerate(body, leaves);
            let mut out: Vec<Vec<PolyTerm>> = vec![Vec::new()];
            for _ in ls {
                out = out
                    .into_iter()
                    .flat_map(|prefix| {
                        base.iter().map(move |t| {
                            let mut v = prefix.clone();
                            v.push(t.clone());
                            v
                        })
                    })
                    .collect();
            }
            out.into_iter().map(PolyTerm::Tuple).collect()
        }
    }
}
