//! Type stacks, finite coalgebras of a stack, and their JSON file format.
//!
//! A system file looks like
//!
//! ```json
//! {
//!   "kind": "prob",
//!   "stack": ["T", "{*} + {a} * Id"],
//!   "states": ["c"],
//!   "transitions": {
//!     "c": [
//!       {"term": {"inj": 0, "of": {"atom": "*"}}, "weight": 0.5},
//!       {"term": {"inj": 1, "of": {"pair": [{"atom": "a"}, {"state": "c"}]}}, "weight": 0.5}
//!     ]
//!   }
//! }
//! ```
//!
//! The stack is listed outside-in. Polynomial layers use the `{"inj"}`,
//! `{"pair"}`, `{"atom"}`, `{"tuple"}` nodes, `Id` positions hold the next
//! layer's value, and the innermost `Id` holds `{"state": id}`. A `"T"` layer
//! is a list of inner values (bool) or of `{"term", "weight"}` records
//! (prob, tropical; tropical weights are integers or `"inf"`).

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde_json::{json, Map, Value};

use crate::branching::{validate_branchval, BranchVal};
use crate::error::{Error, Result};
use crate::polyfunctor::{for_each_leaf, PolyExpr, PolyTerm, StateId};
use crate::semiring::{ExtNat, SemiringKind, SemiringValue};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Layer {
    Poly(PolyExpr),
    /// The branching monad selected by the stack's kind.
    Branch,
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Layer::Poly(e) => write!(f, "{e}"),
            Layer::Branch => f.write_str("T"),
        }
    }
}

/// A composite functor `L₁ ∘ L₂ ∘ … ∘ Lₙ`, layers listed outside-in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeStack {
    pub kind: SemiringKind,
    pub layers: Vec<Layer>,
}

impl TypeStack {
    pub fn new(kind: SemiringKind, layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Validation("type stack has no layers".into()));
        }
        for l in &layers {
            if let Layer::Poly(e) = l {
                e.validate()?;
            }
        }
        Ok(TypeStack { kind, layers })
    }

    pub fn has_branching(&self) -> bool {
        self.layers.iter().any(|l| matches!(l, Layer::Branch))
    }
}

impl fmt::Display for TypeStack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.layers.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∘ ")?;
            }
            match l {
                Layer::Poly(e) => write!(f, "[{e}]")?,
                Layer::Branch => f.write_str("T")?,
            }
        }
        write!(f, " ({})", self.kind)
    }
}

/// The stack with every branching layer erased: the type of the
/// specification coalgebras a system of this stack is compared against.
pub fn linear_part(stack: &TypeStack) -> Result<TypeStack> {
    let layers: Vec<Layer> = stack.layers.iter().filter(|l| !matches!(l, Layer::Branch)).cloned().collect();
    if layers.is_empty() {
        return Err(Error::DegenerateStack);
    }
    Ok(TypeStack { kind: stack.kind, layers })
}

/// A finite coalgebra `(C, γ)` of a type stack.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    stack: TypeStack,
    states: Vec<StateId>,
    transitions: Vec<PolyTerm>,
    index: HashMap<StateId, usize>,
}

impl System {
    /// Validate and build. `transitions` must assign exactly one value to
    /// every state.
    pub fn new(stack: TypeStack, states: Vec<StateId>, transitions: Vec<(StateId, PolyTerm)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::Validation(format!("state `{s}` listed twice")));
            }
        }
        let mut slots: Vec<Option<PolyTerm>> = vec![None; states.len()];
        for (s, t) in transitions {
            let i = *index
                .get(&s)
                .ok_or_else(|| Error::Validation(format!("transition for unknown state `{s}`")))?;
            if slots[i].is_some() {
                return Err(Error::Validation(format!("state `{s}` has two transitions")));
            }
            check_value(&stack.layers, stack.kind, &t, &index)
                .map_err(|e| prefix(e, &format!("transition of `{s}`")))?;
            slots[i] = Some(t);
        }
        let transitions = slots
            .into_iter()
            .zip(&states)
            .map(|(t, s)| t.ok_or_else(|| Error::Validation(format!("state `{s}` has no transition"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(System { stack, states, transitions, index })
    }

    pub fn stack(&self) -> &TypeStack {
        &self.stack
    }

    pub fn kind(&self) -> SemiringKind {
        self.stack.kind
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn transition(&self, s: &StateId) -> Option<&PolyTerm> {
        self.index.get(s).map(|&i| &self.transitions[i])
    }

    /// `(state, γ(state))` in state order.
    pub fn transitions(&self) -> impl Iterator<Item = (&StateId, &PolyTerm)> {
        self.states.iter().zip(&self.transitions)
    }

    pub fn to_json(&self) -> Value {
        let transitions: Map<String, Value> = self
            .transitions()
            .map(|(s, t)| (s.0.clone(), encode_value(&self.stack.layers, t)))
            .collect();
        json!({
            "kind": self.stack.kind.name(),
            "stack": self.stack.layers.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "states": self.states.iter().map(|s| s.0.clone()).collect::<Vec<_>>(),
            "transitions": transitions,
        })
    }
}

/// A finite coalgebra of a branching-free stack, standing in for the final
/// coalgebra of linear-time behaviours.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecSystem(System);

impl SpecSystem {
    pub fn new(system: System) -> Result<Self> {
        if system.stack.has_branching() {
            return Err(Error::Validation("specification stack must not contain a branching layer".into()));
        }
        Ok(SpecSystem(system))
    }

    pub fn system(&self) -> &System {
        &self.0
    }
}

impl std::ops::Deref for SpecSystem {
    type Target = System;

    fn deref(&self) -> &System {
        &self.0
    }
}

fn prefix(e: Error, ctx: &str) -> Error {
    match e {
        Error::Type(m) => Error::Type(format!("{ctx}: {m}")),
        Error::Validation(m) => Error::Validation(format!("{ctx}: {m}")),
        other => other,
    }
}

fn check_value(layers: &[Layer], kind: SemiringKind, term: &PolyTerm, states: &HashMap<StateId, usize>) -> Result<()> {
    match layers.split_first() {
        None => match term {
            PolyTerm::StateRef(s) if states.contains_key(s) => Ok(()),
            PolyTerm::StateRef(s) => Err(Error::Validation(format!("unknown state `{s}`"))),
            other => Err(Error::Type(format!("expected a state reference, found `{other}`"))),
        },
        Some((Layer::Poly(e), rest)) => {
            let mut leaves = Vec::new();
            for_each_leaf(e, term, &mut |l| leaves.push(l))?;
            leaves.into_iter().try_for_each(|l| check_value(rest, kind, l, states))
        }
        Some((Layer::Branch, rest)) => match term {
            PolyTerm::Branch(b) => {
                if b.kind() != kind {
                    return Err(Error::kind_mismatch(kind, b.kind()));
                }
                if !validate_branchval(b) {
                    return Err(Error::Validation(format!("branching value {b} is not a valid {kind} value")));
                }
                b.keys().try_for_each(|k| check_value(rest, kind, k, states))
            }
            other => Err(Error::Type(format!("expected a branching value, found `{other}`"))),
        },
    }
}

// ---------------------------------------------------------------------------
// JSON

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn parse_stack(doc: &Value, default_kind: Option<SemiringKind>) -> Result<TypeStack> {
    let kind = match doc.get("kind") {
        Some(Value::String(k)) => k.parse()?,
        Some(_) => return Err(Error::Parse("`kind` must be a string".into())),
        None => default_kind.ok_or_else(|| Error::Parse("missing `kind`".into()))?,
    };
    let layers = doc
        .get("stack")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing `stack` array".into()))?
        .iter()
        .map(|l| match l.as_str() {
            Some("T") => Ok(Layer::Branch),
            Some(expr) => Ok(Layer::Poly(expr.parse()?)),
            None => Err(Error::Parse(format!("stack entry {l} is not a string"))),
        })
        .collect::<Result<Vec<_>>>()?;
    TypeStack::new(kind, layers)
}

fn parse_document(text: &str, default_kind: Option<SemiringKind>) -> Result<System> {
    let doc = parse_json(text)?;
    let stack = parse_stack(&doc, default_kind)?;
    let states = doc
        .get("states")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing `states` array".into()))?
        .iter()
        .map(|s| s.as_str().map(StateId::from).ok_or_else(|| Error::Parse(format!("state id {s} is not a string"))))
        .collect::<Result<Vec<_>>>()?;
    let transitions = doc
        .get("transitions")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Parse("missing `transitions` object".into()))?;
    let decoded = transitions
        .iter()
        .map(|(s, v)| {
            let t = decode_value(&stack.layers, stack.kind, v)
                .map_err(|e| prefix(e, &format!("transition of `{s}`")))?;
            Ok((StateId::from(s.as_str()), t))
        })
        .collect::<Result<Vec<_>>>()?;
    System::new(stack, states, decoded)
}

/// Parse and validate a system file.
pub fn parse_system(text: &str) -> Result<System> {
    parse_document(text, None)
}

/// Parse and validate a specification file. `kind` may be omitted.
pub fn parse_spec(text: &str) -> Result<SpecSystem> {
    SpecSystem::new(parse_document(text, Some(SemiringKind::Bool))?)
}

/// Canonical pretty-printed JSON.
pub fn serialize_system(sys: &System) -> String {
    serde_json::to_string_pretty(&sys.to_json()).expect("JSON values always serialise")
}

fn node<'a>(v: &'a Value, key: &str, expect: &str) -> Result<&'a Value> {
    v.as_object()
        .and_then(|o| o.get(key))
        .ok_or_else(|| Error::Type(format!("expected {expect}, found {v}")))
}

fn decode_value(layers: &[Layer], kind: SemiringKind, v: &Value) -> Result<PolyTerm> {
    match layers.split_first() {
        None => {
            let id = node(v, "state", "a {\"state\": id} node")?;
            let id = id.as_str().ok_or_else(|| Error::Parse(format!("state id {id} is not a string")))?;
            Ok(PolyTerm::state(id))
        }
        Some((Layer::Poly(e), rest)) => decode_poly(e, v, &|inner| decode_value(rest, kind, inner)),
        Some((Layer::Branch, rest)) => {
            let items = v.as_array().ok_or_else(|| Error::Type(format!("expected a list of branches, found {v}")))?;
            let entries = items
                .iter()
                .map(|item| match kind {
                    SemiringKind::Bool => Ok((decode_value(rest, kind, item)?, SemiringValue::Bool(true))),
                    _ => {
                        let term = decode_value(rest, kind, node(item, "term", "a {\"term\", \"weight\"} record")?)?;
                        let weight = decode_weight(kind, node(item, "weight", "a {\"term\", \"weight\"} record")?)?;
                        Ok((term, weight))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(PolyTerm::Branch(BranchVal::new(kind, entries)?))
        }
    }
}

fn decode_weight(kind: SemiringKind, w: &Value) -> Result<SemiringValue> {
    match (kind, w) {
        (SemiringKind::Prob, Value::Number(n)) => {
            SemiringValue::prob(n.as_f64().ok_or_else(|| Error::Parse(format!("bad weight {n}")))?)
        }
        (SemiringKind::Tropical, Value::Number(n)) => n
            .as_u64()
            .map(SemiringValue::cost)
            .ok_or_else(|| Error::Validation(format!("tropical weight {n} is not a natural number"))),
        (SemiringKind::Tropical, Value::String(s)) if s == "inf" => Ok(SemiringValue::infinity()),
        _ => Err(Error::Parse(format!("`{w}` is not a {kind} weight"))),
    }
}

fn decode_poly(expr: &PolyExpr, v: &Value, leaf: &dyn Fn(&Value) -> Result<PolyTerm>) -> Result<PolyTerm> {
    match expr {
        PolyExpr::Id => leaf(v),
        PolyExpr::Const(_) => {
            let a = node(v, "atom", "an {\"atom\"} node")?;
            let a = a.as_str().ok_or_else(|| Error::Parse(format!("atom {a} is not a string")))?;
            Ok(PolyTerm::atom(a))
        }
        PolyExpr::Prod(le, re) => {
            let pair = node(v, "pair", "a {\"pair\"} node")?
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Type(format!("pair node {v} must hold two values")))?;
            Ok(PolyTerm::pair(decode_poly(le, &pair[0], leaf)?, decode_poly(re, &pair[1], leaf)?))
        }
        PolyExpr::Coprod(branches) => {
            let i = node(v, "inj", "an {\"inj\", \"of\"} node")?
                .as_u64()
                .ok_or_else(|| Error::Parse(format!("injection index in {v} is not a natural number")))?
                as usize;
            let branch = branches
                .get(i)
                .ok_or_else(|| Error::Type(format!("injection {i} out of range for `{expr}`")))?;
            Ok(PolyTerm::inj(i, decode_poly(branch, node(v, "of", "an {\"inj\", \"of\"} node")?, leaf)?))
        }
        PolyExpr::Power(labels, body) => {
            let comps = node(v, "tuple", "a {\"tuple\"} node")?
                .as_object()
                .ok_or_else(|| Error::Type(format!("tuple node {v} must be an object")))?;
            let known: HashSet<&String> = labels.iter().collect();
            if let Some(extra) = comps.keys().find(|k| !known.contains(k)) {
                return Err(Error::Type(format!("tuple component `{extra}` is not an exponent of `{expr}`")));
            }
            let ts = labels
                .iter()
                .map(|l| {
                    let c = comps.get(l).ok_or_else(|| Error::Type(format!("tuple is missing component `{l}`")))?;
                    decode_poly(body, c, leaf)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(PolyTerm::Tuple(ts))
        }
    }
}

fn encode_weight(w: SemiringValue) -> Value {
    match w {
        SemiringValue::Bool(b) => json!(b),
        SemiringValue::Prob(p) => json!(p),
        SemiringValue::Tropical(ExtNat::Fin(n)) => json!(n),
        SemiringValue::Tropical(ExtNat::Inf) => json!("inf"),
    }
}

fn encode_value(layers: &[Layer], t: &PolyTerm) -> Value {
    match (layers.split_first(), t) {
        (None, PolyTerm::StateRef(s)) => json!({ "state": s.0 }),
        (Some((Layer::Poly(e), rest)), _) => encode_poly(e, t, &|inner| encode_value(rest, inner)),
        (Some((Layer::Branch, rest)), PolyTerm::Branch(b)) => Value::Array(
            b.support()
                .iter()
                .map(|(k, w)| match b.kind() {
                    SemiringKind::Bool => encode_value(rest, k),
                    _ => json!({ "term": encode_value(rest, k), "weight": encode_weight(*w) }),
                })
                .collect(),
        ),
        _ => unreachable!("values are type checked on construction"),
    }
}

fn encode_poly(expr: &PolyExpr, t: &PolyTerm, leaf: &dyn Fn(&PolyTerm) -> Value) -> Value {
    match (expr, t) {
        (PolyExpr::Id, _) => leaf(t),
        (PolyExpr::Const(_), PolyTerm::Atom(a)) => json!({ "atom": a }),
        (PolyExpr::Prod(le, re), PolyTerm::Pair(l, r)) => {
            json!({ "pair": [encode_poly(le, l, leaf), encode_poly(re, r, leaf)] })
        }
        (PolyExpr::Coprod(bs), PolyTerm::Inj(i, inner)) => json!({ "inj": i, "of": encode_poly(&bs[*i], inner, leaf) }),
        (PolyExpr::Power(labels, body), PolyTerm::Tuple(ts)) => {
            let comps: Map<String, Value> =
                labels.iter().zip(ts).map(|(l, c)| (l.clone(), encode_poly(body, c, leaf))).collect();
            json!({ "tuple": comps })
        }
        _ => unreachable!("values are type checked on construction"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LTS: &str = r#"{
        "kind": "bool",
        "stack": ["T", "{*} + {a} * Id"],
        "states": ["c"],
        "transitions": {
            "c": [{"inj": 0, "of": {"atom": "*"}}, {"inj": 1, "of": {"pair": [{"atom": "a"}, {"state": "c"}]}}]
        }
    }"#;

    #[test]
    fn parses_lts() {
        let sys = parse_system(LTS).unwrap();
        assert_eq!(sys.states().len(), 1);
        let expected = PolyTerm::Branch(BranchVal::set([PolyTerm::stop(), PolyTerm::step("a", PolyTerm::state("c"))]));
        assert_eq!(sys.transition(&"c".into()), Some(&expected));
    }

    #[test]
    fn parses_spec_without_kind() {
        let spec = parse_spec(
            r#"{"stack": ["{*} + {a} * Id"], "states": ["z"],
                "transitions": {"z": {"inj": 1, "of": {"pair": [{"atom": "a"}, {"state": "z"}]}}}}"#,
        )
        .unwrap();
        assert_eq!(spec.transition(&"z".into()), Some(&PolyTerm::step("a", PolyTerm::state("z"))));
        assert!(parse_spec(LTS).is_err());
    }

    #[test]
    fn overweight_prob_is_rejected() {
        let text = r#"{"kind": "prob", "stack": ["T", "{*} + {a} * Id"], "states": ["c"],
            "transitions": {"c": [
                {"term": {"inj": 0, "of": {"atom": "*"}}, "weight": 0.5},
                {"term": {"inj": 1, "of": {"pair": [{"atom": "a"}, {"state": "c"}]}}, "weight": 0.6}]}}"#;
        assert!(matches!(parse_system(text), Err(Error::Validation(_))));
    }

    #[test]
    fn error_categories() {
        assert!(matches!(parse_system("{not json"), Err(Error::Parse(_))));
        let unknown = LTS.replace(r#"{"state": "c"}"#, r#"{"state": "d"}"#);
        assert!(matches!(parse_system(&unknown), Err(Error::Validation(_))));
        let ill = LTS.replace(r#"{"pair": [{"atom": "a"}, {"state": "c"}]}"#, r#"{"atom": "a"}"#);
        assert!(matches!(parse_system(&ill), Err(Error::Type(_))));
        let missing = LTS.replace(r#""c": ["#, r#""x": ["#);
        assert!(matches!(parse_system(&missing), Err(Error::Validation(_))));
        let bad_label = LTS.replace(r#""atom": "a""#, r#""atom": "b""#);
        assert!(matches!(parse_system(&bad_label), Err(Error::Type(_))));
    }

    #[test]
    fn tropical_weights_and_tuples() {
        let text = r#"{"kind": "tropical", "stack": ["(1 + Id)^{a,b}", "T", "Id * {o}"], "states": ["s"],
            "transitions": {"s": {"tuple": {
                "a": {"inj": 0, "of": {"atom": "*"}},
                "b": {"inj": 1, "of": [{"term": {"pair": [{"state": "s"}, {"atom": "o"}]}, "weight": 3},
                                        {"term": {"pair": [{"state": "s"}, {"atom": "o"}]}, "weight": "inf"}]}}}}}"#;
        let sys = parse_system(text).unwrap();
        let back = parse_system(&serialize_system(&sys)).unwrap();
        assert_eq!(back, sys);
        let v = sys.transition(&"s".into()).unwrap();
        let PolyTerm::Tuple(ts) = v else { panic!() };
        let PolyTerm::Inj(1, b) = &ts[1] else { panic!() };
        let PolyTerm::Branch(b) = b.as_ref() else { panic!() };
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn canonical_text_round_trips() {
        let sys = parse_system(LTS).unwrap();
        let text = serialize_system(&sys);
        assert_eq!(serialize_system(&parse_system(&text).unwrap()), text);
    }

    #[test]
    fn linear_part_erases_branching() {
        let f = Layer::Poly(PolyExpr::lts(["a"]).unwrap());
        let g = Layer::Poly("(1 + Id)^{a}".parse().unwrap());
        let k = SemiringKind::Bool;
        let lp = |ls: Vec<Layer>| linear_part(&TypeStack::new(k, ls).unwrap()).map(|s| s.layers);
        assert_eq!(lp(vec![g.clone(), Layer::Branch, f.clone()]).unwrap(), vec![g.clone(), f.clone()]);
        assert_eq!(lp(vec![Layer::Branch, f.clone()]).unwrap(), vec![f.clone()]);
        assert_eq!(lp(vec![g.clone(), Layer::Branch]).unwrap(), vec![g.clone()]);
        assert_eq!(lp(vec![Layer::Branch]).unwrap_err(), Error::DegenerateStack);
        let once = linear_part(&TypeStack::new(k, vec![g, Layer::Branch, f]).unwrap()).unwrap();
        assert_eq!(linear_part(&once).unwrap(), once);
    }
}
