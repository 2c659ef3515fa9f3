//! Seeded generators of small random systems, specifications and
//! relations, used by property tests, the acceptance suite and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::branching::BranchVal;
use crate::engine::StateRel;
use crate::polyfunctor::{PolyExpr, PolyTerm, StateId};
use crate::relation::ValRel;
use crate::semiring::{ExtNat, SemiringKind, SemiringValue};
use crate::system::{Layer, SpecSystem, System, TypeStack};

/// The three stack shapes exercised by the generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StackShape {
    /// `T ∘ F`, `F = 1 + {a,b} × Id`.
    TF,
    /// `G ∘ T`, `G = {0,1} × Id^{a,b}`.
    GT,
    /// `G ∘ T ∘ F`, `G = 1 + {a,b} × Id`, `F = Id × {x,y}`.
    GTF,
}

impl StackShape {
    pub const ALL: [StackShape; 3] = [StackShape::TF, StackShape::GT, StackShape::GTF];

    pub fn layers(self) -> Vec<Layer> {
        let lts = || Layer::Poly("{*} + {a,b} * Id".parse().expect("static expression"));
        match self {
            StackShape::TF => vec![Layer::Branch, lts()],
            StackShape::GT => vec![Layer::Poly("{0,1} * Id^{a,b}".parse().expect("static expression")), Layer::Branch],
            StackShape::GTF => vec![lts(), Layer::Branch, Layer::Poly("Id * {x,y}".parse().expect("static expression"))],
        }
    }

    pub fn stack(self, kind: SemiringKind) -> TypeStack {
        TypeStack::new(kind, self.layers()).expect("nonempty stack")
    }

    pub fn spec_stack(self) -> TypeStack {
        let layers = self.layers().into_iter().filter(|l| !matches!(l, Layer::Branch)).collect();
        TypeStack::new(SemiringKind::Bool, layers).expect("every shape has a polynomial layer")
    }
}

fn state_ids(prefix: &str, n: usize) -> Vec<StateId> {
    (0..n).map(|i| StateId(format!("{prefix}{i}"))).collect()
}

/// A random element of `expr` whose `Id` positions are filled by `leaf`.
fn random_poly<R: Rng + ?Sized>(
    rng: &mut R,
    expr: &PolyExpr,
    leaf: &mut dyn FnMut(&mut R) -> PolyTerm,
) -> PolyTerm {
    match expr {
        PolyExpr::Id => leaf(rng),
        PolyExpr::Const(ls) => PolyTerm::atom(ls.choose(rng).expect("nonempty constant").clone()),
        PolyExpr::Prod(l, r) => {
            let a = random_poly(rng, l, leaf);
            let b = random_poly(rng, r, leaf);
            PolyTerm::pair(a, b)
        }
        PolyExpr::Coprod(bs) => {
            // bias towards the last summand so loops are common
            let i = if rng.gen_bool(0.7) { bs.len() - 1 } else { rng.gen_range(0..bs.len()) };
            PolyTerm::inj(i, random_poly(rng, &bs[i], leaf))
        }
        PolyExpr::Power(ls, body) => PolyTerm::Tuple(ls.iter().map(|_| random_poly(rng, body, leaf)).collect()),
    }
}

/// A random nonzero weight.
pub fn random_weight<R: Rng + ?Sized>(kind: SemiringKind, rng: &mut R) -> SemiringValue {
    match kind {
        SemiringKind::Bool => SemiringValue::Bool(true),
        SemiringKind::Prob => SemiringValue::Prob(rng.gen_range(1..=8) as f64 / 8.0),
        SemiringKind::Tropical => SemiringValue::cost(rng.gen_range(0..=6)),
    }
}

/// A random value of any weight, including `0` and `1`.
pub fn random_value<R: Rng + ?Sized>(kind: SemiringKind, rng: &mut R) -> SemiringValue {
    match kind {
        SemiringKind::Bool => SemiringValue::Bool(rng.gen()),
        SemiringKind::Prob => SemiringValue::Prob(rng.gen_range(0..=16) as f64 / 16.0),
        SemiringKind::Tropical => {
            if rng.gen_bool(0.15) {
                SemiringValue::Tropical(ExtNat::Inf)
            } else {
                SemiringValue::cost(rng.gen_range(0..=9))
            }
        }
    }
}

fn random_branch<R: Rng + ?Sized>(
    rng: &mut R,
    kind: SemiringKind,
    inner: &mut dyn FnMut(&mut R) -> PolyTerm,
) -> BranchVal {
    let size = if rng.gen_bool(0.1) { 0 } else { rng.gen_range(1..=3) };
    let mut budget = 8u32;
    let mut entries = Vec::with_capacity(size);
    for _ in 0..size {
        let weight = match kind {
            SemiringKind::Prob => {
                if budget == 0 {
                    break;
                }
                let k = rng.gen_range(1..=budget.min(4));
                budget -= k;
                SemiringValue::Prob(k as f64 / 8.0)
            }
            _ => random_weight(kind, rng),
        };
        entries.push((inner(rng), weight));
    }
    BranchVal::new(kind, entries).expect("weights stay within mass 1")
}

/// A random branching value whose support is drawn from `keys`.
pub fn random_branch_over<R: Rng + ?Sized>(rng: &mut R, kind: SemiringKind, keys: &[PolyTerm]) -> BranchVal {
    random_branch(rng, kind, &mut |r| keys.choose(r).expect("nonempty keys").clone())
}

fn random_value_over<R: Rng + ?Sized>(rng: &mut R, kind: SemiringKind, layers: &[Layer], states: &[StateId]) -> PolyTerm {
    match layers.split_first() {
        None => PolyTerm::StateRef(states.choose(rng).expect("nonempty state set").clone()),
        Some((Layer::Poly(e), rest)) => random_poly(rng, e, &mut |r| random_value_over(r, kind, rest, states)),
        Some((Layer::Branch, rest)) => {
            PolyTerm::Branch(random_branch(rng, kind, &mut |r| random_value_over(r, kind, rest, states)))
        }
    }
}

fn build<R: Rng + ?Sized>(rng: &mut R, stack: TypeStack, prefix: &str, n: usize) -> System {
    let states = state_ids(prefix, n.max(1));
    let transitions = states
        .iter()
        .map(|s| (s.clone(), random_value_over(rng, stack.kind, &stack.layers, &states)))
        .collect();
    System::new(stack, states, transitions).expect("generated values are well typed")
}

/// A random system of the given shape with states `c0..c{n-1}`.
pub fn random_system<R: Rng + ?Sized>(rng: &mut R, kind: SemiringKind, shape: StackShape, n: usize) -> System {
    build(rng, shape.stack(kind), "c", n)
}

/// A random system with states named `{prefix}0..`.
pub fn random_system_named<R: Rng + ?Sized>(
    rng: &mut R,
    kind: SemiringKind,
    shape: StackShape,
    prefix: &str,
    n: usize,
) -> System {
    build(rng, shape.stack(kind), prefix, n)
}

/// A random specification for systems of the given shape, states `z0..`.
pub fn random_spec<R: Rng + ?Sized>(rng: &mut R, shape: StackShape, n: usize) -> SpecSystem {
    SpecSystem::new(build(rng, shape.spec_stack(), "z", n)).expect("no branching layer")
}

/// A random relation over the given carriers.
pub fn random_relation<R: Rng + ?Sized>(
    rng: &mut R,
    kind: SemiringKind,
    rows: &[StateId],
    cols: &[StateId],
) -> StateRel {
    ValRel::from_fn(kind, rows.to_vec(), cols.to_vec(), |_, _| Ok(random_value(kind, rng))).expect("values match kind")
}

/// A random relation below `rel` in the pointwise order.
pub fn random_below<R: Rng + ?Sized>(rng: &mut R, rel: &StateRel) -> StateRel {
    let mut lower = rel.clone();
    let entries: Vec<_> = rel.entries().map(|(r, c, v)| (r.clone(), c.clone(), v)).collect();
    for (r, c, v) in entries {
        if !rng.gen_bool(0.5) {
            continue;
        }
        let w = match v {
            SemiringValue::Bool(_) => SemiringValue::Bool(false),
            SemiringValue::Prob(p) => SemiringValue::Prob(p * rng.gen_range(0..=4) as f64 / 4.0),
            SemiringValue::Tropical(ExtNat::Fin(_)) if rng.gen_bool(0.2) => SemiringValue::Tropical(ExtNat::Inf),
            SemiringValue::Tropical(ExtNat::Fin(n)) => SemiringValue::cost(n + rng.gen_range(0..=3)),
            SemiringValue::Tropical(ExtNat::Inf) => v,
        };
        lower.set(&r, &c, w).expect("entry exists");
    }
    lower
}
