//! Desk-scale check that the branching monads behave as the semiring and
//! the extension lifting assume: partial additivity of `T`, agreement of
//! the induced `+` on `T1` with the semiring addition, and the linearity
//! equations of the extension lifting.
//!
//! Monad structure (`η`, `μ`, functor action, right action of `T1`) exists
//! only here; the engine itself works with the closed forms.

use std::collections::HashMap;

use crate::branching::BranchVal;
use crate::error::Result;
use crate::lifting::lift_extension;
use crate::polyfunctor::PolyTerm;
use crate::relation::ValRel;
use crate::semiring::laws::LawCheck;
use crate::semiring::{self, LawReport, SemiringKind, SemiringValue, PROB_EPSILON};

fn grid(kind: SemiringKind) -> Vec<SemiringValue> {
    match kind {
        SemiringKind::Bool => vec![SemiringValue::Bool(false), SemiringValue::Bool(true)],
        SemiringKind::Prob => [0.0, 0.25, 0.5, 0.75, 1.0].map(SemiringValue::Prob).to_vec(),
        SemiringKind::Tropical => {
            let mut g: Vec<_> = (0..4).map(SemiringValue::cost).collect();
            g.push(SemiringValue::infinity());
            g
        }
    }
}

/// Every grid-weighted element of `T(carrier)`.
fn enumerate_t(kind: SemiringKind, carrier: &[PolyTerm]) -> Vec<BranchVal> {
    let g = grid(kind);
    let mut assignments: Vec<Vec<(PolyTerm, SemiringValue)>> = vec![Vec::new()];
    for x in carrier {
        assignments = assignments
            .into_iter()
            .flat_map(|prefix| {
                g.iter().map(move |w| {
                    let mut next = prefix.clone();
                    next.push((x.clone(), *w));
                    next
                })
            })
            .collect();
    }
    assignments.into_iter().filter_map(|a| BranchVal::new(kind, a).ok()).collect()
}

/// Functor action `T f`; weights of keys with the same image are added.
fn t_map(t: &BranchVal, f: impl Fn(&PolyTerm) -> PolyTerm) -> Option<BranchVal> {
    BranchVal::new(t.kind(), t.support().iter().map(|(k, w)| (f(k), *w))).ok()
}

/// Multiplication `μ : T T X → T X`; keys of `outer` are branching values.
fn mu(outer: &BranchVal) -> Option<BranchVal> {
    let kind = outer.kind();
    let mut entries = Vec::new();
    for (inner, w) in outer.support() {
        let PolyTerm::Branch(inner) = inner else { return None };
        for (x, v) in inner.support() {
            entries.push((x.clone(), semiring::mul(*w, *v).ok()?));
        }
    }
    BranchVal::new(kind, entries).ok()
}

/// Right action `T X × T1 → T X`, `(t, s) ↦ μ (T (x ↦ s·η x)) t`.
fn act(t: &BranchVal, s: SemiringValue) -> Option<BranchVal> {
    let scaled = t_map(t, |x| PolyTerm::Branch(BranchVal::new(t.kind(), [(x.clone(), s)]).expect("single weight")))?;
    mu(&scaled)
}

/// `⟨μ ∘ T p₁, μ ∘ T p₂⟩ : T(X + Y) → T X × T Y` with `p₁ = [η, 0]`,
/// `p₂ = [0, η]`.
fn split(w: &BranchVal) -> Option<(BranchVal, BranchVal)> {
    let kind = w.kind();
    let side = |want: usize| {
        t_map(w, |k| match k {
            PolyTerm::Inj(i, x) if *i == want => PolyTerm::Branch(BranchVal::unit(kind, (**x).clone())),
            _ => PolyTerm::Branch(BranchVal::empty(kind)),
        })
        .and_then(|tt| mu(&tt))
    };
    Some((side(0)?, side(1)?))
}

/// `T [1, 1] : T(X + X) → T X`.
fn codiagonal(w: &BranchVal) -> Option<BranchVal> {
    t_map(w, |k| match k {
        PolyTerm::Inj(_, x) => (**x).clone(),
        other => other.clone(),
    })
}

fn approx(a: SemiringValue, b: SemiringValue) -> bool {
    match (a, b) {
        (SemiringValue::Prob(x), SemiringValue::Prob(y)) => (x - y).abs() <= PROB_EPSILON,
        _ => a == b,
    }
}

fn labels(prefix: &str, n: usize) -> Vec<PolyTerm> {
    (0..n).map(|i| PolyTerm::atom(format!("{prefix}{i}"))).collect()
}

fn coproduct(xs: &[PolyTerm], ys: &[PolyTerm]) -> Vec<PolyTerm> {
    xs.iter()
        .map(|x| PolyTerm::inj(0, x.clone()))
        .chain(ys.iter().map(|y| PolyTerm::inj(1, y.clone())))
        .collect()
}

/// A handful of deterministic relations `X × {y} → T1` drawn from the grid.
fn sample_relations(kind: SemiringKind, xs: &[PolyTerm], y: &PolyTerm) -> Vec<ValRel<PolyTerm, PolyTerm>> {
    let g = grid(kind);
    (0..g.len() + 2)
        .map(|shift| {
            ValRel::from_fn(kind, xs.to_vec(), vec![y.clone()], |x, _| {
                let i = xs.iter().position(|k| k == x).unwrap();
                Ok(g[(i * 3 + shift) % g.len()])
            })
            .expect("grid values have the right kind")
        })
        .collect()
}

fn value_at(rel: &ValRel<PolyTerm, PolyTerm>, t: &BranchVal, y: &PolyTerm) -> Result<SemiringValue> {
    lift_extension(rel, std::slice::from_ref(t))?.lookup(&PolyTerm::Branch(t.clone()), y)
}

/// Check partial additivity and extension-lifting linearity for carriers
/// `|X| = |Y| = n`, `n = 1..=size_bound` (at most 4).
pub fn check_monad_consistency(kind: SemiringKind, size_bound: usize) -> LawReport {
    let size_bound = size_bound.clamp(1, 4);
    let mut injective = LawCheck::new("map (1) injective");
    let mut surjective = LawCheck::new(if kind == SemiringKind::Prob {
        "map (1) not surjective (partial additivity witnessed)"
    } else {
        "map (1) surjective (additive)"
    });
    let mut plus_agrees = LawCheck::new("induced + on T1 matches semiring +");
    let mut eta = LawCheck::new("extension lifting unit law");
    let mut additive = LawCheck::new("extension lifting preserves +");
    let mut homogeneous = LawCheck::new("extension lifting commutes with the T1 action");
    let mut flatten = LawCheck::new("extension lifting commutes with μ");
    let mut prob_witness: Option<String> = None;

    for n in 1..=size_bound {
        let xs = labels("x", n);
        let ys = labels("y", n);
        let sum_carrier = coproduct(&xs, &ys);
        let domain = enumerate_t(kind, &sum_carrier);

        let mut preimage: HashMap<(BranchVal, BranchVal), BranchVal> = HashMap::new();
        for w in &domain {
            let Some(image) = split(w) else {
                injective.record(false, || format!("split of {w} undefined"));
                continue;
            };
            let clash = preimage.insert(image.clone(), w.clone());
            injective.record(clash.is_none(), || format!("{w} and {} have the same image", clash.clone().unwrap()));
        }

        let tx = enumerate_t(kind, &xs);
        let ty = enumerate_t(kind, &ys);
        for a in &tx {
            for b in &ty {
                let hit = preimage.contains_key(&(a.clone(), b.clone()));
                if kind == SemiringKind::Prob {
                    if !hit && prob_witness.is_none() {
                        prob_witness = Some(format!("({a}, {b}) has no preimage"));
                    }
                } else {
                    surjective.record(hit, || format!("({a}, {b}) has no preimage"));
                }
            }
        }

        // `+` on T X via the partial inverse, with X = Y relabelled.
        let rename = |t: &BranchVal| t_map(t, |k| PolyTerm::atom(k.to_string().replacen('x', "y", 1))).unwrap();
        let y = PolyTerm::atom("out");
        let rels = sample_relations(kind, &xs, &y);
        for t in &tx {
            for (k, r) in rels.iter().enumerate() {
                if k == 0 {
                    for (x, _) in t.support() {
                        let d = BranchVal::unit(kind, x.clone());
                        let got = value_at(r, &d, &y);
                        let want = r.lookup(x, &y);
                        eta.record(matches!((&got, &want), (Ok(g), Ok(w)) if g == w), || {
                            format!("L(R)(η {x}, y) = {got:?}, R({x}, y) = {want:?}")
                        });
                    }
                }
                for s in grid(kind) {
                    let Some(ts) = act(t, s) else { continue };
                    let lhs = value_at(r, &ts, &y).ok();
                    let rhs = value_at(r, t, &y).ok().and_then(|v| semiring::mul(v, s).ok());
                    homogeneous.record(matches!((lhs, rhs), (Some(l), Some(r)) if approx(l, r)), || {
                        format!("L(R)({t}·{s}) = {lhs:?}, L(R)({t})·{s} = {rhs:?}")
                    });
                }
            }
            for u in &tx {
                let Some(q) = preimage.get(&(t.clone(), rename(u))) else { continue };
                let Some(sum) = codiagonal(&t_map(q, |k| match k {
                    PolyTerm::Inj(1, y) => PolyTerm::inj(1, PolyTerm::atom(y.to_string().replacen('y', "x", 1))),
                    other => other.clone(),
                }).unwrap()) else {
                    continue;
                };
                for r in &rels {
                    let lhs = value_at(r, &sum, &y).ok();
                    let rhs = match (value_at(r, t, &y), value_at(r, u, &y)) {
                        (Ok(a), Ok(b)) => semiring::add(a, b).ok().flatten(),
                        _ => None,
                    };
                    additive.record(matches!((lhs, rhs), (Some(l), Some(r)) if approx(l, r)), || {
                        format!("L(R)({t} + {u}) = {lhs:?}, L(R)({t}) + L(R)({u}) = {rhs:?}")
                    });
                }
            }
        }

        // μ-compatibility on two-point elements of T T X.
        let g = grid(kind);
        for (i, t) in tx.iter().enumerate().step_by(3) {
            let u = &tx[(i * 7 + 1) % tx.len()];
            if t == u {
                continue;
            }
            for (a, b) in g.iter().zip(g.iter().rev()) {
                let Ok(outer) = BranchVal::new(
                    kind,
                    [(PolyTerm::Branch(t.clone()), *a), (PolyTerm::Branch(u.clone()), *b)],
                ) else {
                    continue;
                };
                let Some(flat) = mu(&outer) else { continue };
                for r in &rels {
                    let lhs = value_at(r, &flat, &y).ok();
                    let inner = lift_extension(r, &[t.clone(), u.clone()]);
                    let rhs = inner.and_then(|inner| value_at(&inner, &outer, &y)).ok();
                    flatten.record(matches!((lhs, rhs), (Some(l), Some(r)) if approx(l, r)), || {
                        format!("L(R)(μ {outer}) = {lhs:?}, L(L(R))({outer}) = {rhs:?}")
                    });
                }
            }
        }
    }

    // `+` on T1 induced by the partial inverse of map (1) at X = Y = 1.
    let one = [PolyTerm::unit()];
    let two = coproduct(&one, &one);
    let mut preimage: HashMap<(BranchVal, BranchVal), BranchVal> = HashMap::new();
    for w in enumerate_t(kind, &two) {
        if let Some(image) = split(&w) {
            preimage.insert(image, w);
        }
    }
    let t1 = |s: SemiringValue| BranchVal::new(kind, [(PolyTerm::unit(), s)]).expect("grid weight");
    let weight = |b: &BranchVal| b.weight(&PolyTerm::unit());
    for a in grid(kind) {
        for b in grid(kind) {
            let induced = preimage.get(&(t1(a), t1(b))).and_then(codiagonal).map(|s| weight(&s));
            let direct = semiring::add(a, b).expect("same kind");
            plus_agrees.record(
                match (induced, direct) {
                    (Some(x), Some(y)) => approx(x, y),
                    (None, None) => true,
                    _ => false,
                },
                || format!("{a} + {b}: induced {induced:?}, semiring {direct:?}"),
            );
        }
    }

    if kind == SemiringKind::Prob {
        let found = prob_witness.clone();
        surjective.record(found.is_some(), || "every pair has a preimage".into());
    }

    let mut report = LawReport {
        title: format!("monad consistency: {kind} (|X| = |Y| ≤ {size_bound}, grid weights)"),
        outcomes: [injective, surjective, plus_agrees, eta, additive, homogeneous, flatten]
            .into_iter()
            .map(LawCheck::finish)
            .collect(),
    };
    if let Some(w) = prob_witness {
        report.title.push_str(&format!("; witness {w}"));
    }
    report
}
