use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{add, leq, mul, SemiringKind, SemiringValue, PROB_EPSILON};

/// Result of one law over all sampled instances.
#[derive(Debug, Clone, PartialEq)]
pub struct LawOutcome {
    pub law: &'static str,
    pub cases: usize,
    pub counterexample: Option<String>,
}

impl LawOutcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawReport {
    pub title: String,
    pub outcomes: Vec<LawOutcome>,
}

impl LawReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(LawOutcome::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawOutcome> {
        self.outcomes.iter().filter(|o| !o.passed())
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for o in &self.outcomes {
            match &o.counterexample {
                None => writeln!(f, "  PASS {} ({} cases)", o.law, o.cases)?,
                Some(cx) => writeln!(f, "  FAIL {} ({} cases): {}", o.law, o.cases, cx)?,
            }
        }
        Ok(())
    }
}

/// Accumulates cases for a single law, keeping the first counterexample.
pub(crate) struct LawCheck {
    law: &'static str,
    cases: usize,
    counterexample: Option<String>,
}

impl LawCheck {
    pub(crate) fn new(law: &'static str) -> Self {
        LawCheck { law, cases: 0, counterexample: None }
    }

    pub(crate) fn record(&mut self, holds: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !holds && self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
    }

    pub(crate) fn finish(self) -> LawOutcome {
        LawOutcome { law: self.law, cases: self.cases, counterexample: self.counterexample }
    }
}

/// Equality up to the Prob tolerance; exact otherwise.
fn approx(a: SemiringValue, b: SemiringValue) -> bool {
    match (a, b) {
        (SemiringValue::Prob(x), SemiringValue::Prob(y)) => (x - y).abs() <= PROB_EPSILON,
        _ => a == b,
    }
}

fn approx_opt(a: Option<SemiringValue>, b: Option<SemiringValue>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => approx(x, y),
        (None, None) => true,
        _ => false,
    }
}

fn plus(a: SemiringValue, b: SemiringValue) -> Option<SemiringValue> {
    add(a, b).expect("same kind")
}

fn times(a: SemiringValue, b: SemiringValue) -> SemiringValue {
    mul(a, b).expect("same kind")
}

fn below(a: SemiringValue, b: SemiringValue) -> bool {
    leq(a, b).expect("same kind")
}

fn show(v: Option<SemiringValue>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| x.to_string())
}

fn sample(kind: SemiringKind, rng: &mut ChaCha8Rng) -> SemiringValue {
    match kind {
        SemiringKind::Bool => SemiringValue::Bool(rng.gen()),
        SemiringKind::Prob => SemiringValue::Prob(rng.gen_range(0.0..=1.0)),
        SemiringKind::Tropical => {
            let n = rng.gen_range(0..=33u64);
            if n == 33 {
                SemiringValue::infinity()
            } else {
                SemiringValue::cost(n)
            }
        }
    }
}

/// Check the partial commutative semiring laws and the order properties of
/// `⊑` on sampled triples. Bool is checked exhaustively and ignores
/// `samples`; Prob samples uniformly on [0, 1]; Tropical samples {0..32, ∞}.
pub fn check_semiring_laws(kind: SemiringKind, samples: usize, seed: u64) -> LawReport {
    let triples: Vec<[SemiringValue; 3]> = match kind {
        SemiringKind::Bool => {
            let vals = [false, true].map(SemiringValue::Bool);
            let mut out = Vec::with_capacity(8);
            for a in vals {
                for b in vals {
                    for c in vals {
                        out.push([a, b, c]);
                    }
                }
            }
            out
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples.max(1))
                .map(|_| [sample(kind, &mut rng), sample(kind, &mut rng), sample(kind, &mut rng)])
                .collect()
        }
    };

    let zero = kind.zero();
    let one = kind.one();

    let mut add_comm = LawCheck::new("+ commutative");
    let mut add_assoc = LawCheck::new("+ associative (where defined)");
    let mut add_unit = LawCheck::new("0 is the unit of +");
    let mut mul_comm = LawCheck::new("• commutative");
    let mut mul_assoc = LawCheck::new("• associative");
    let mut mul_unit = LawCheck::new("1 is the unit of •");
    let mut annihilation = LawCheck::new("s • 0 = 0");
    let mut distrib = LawCheck::new("partial distributivity");
    let mut reflexive = LawCheck::new("⊑ reflexive");
    let mut transitive = LawCheck::new("⊑ transitive");
    let mut bounds = LawCheck::new("0 bottom and 1 top of ⊑");
    let mut inflationary = LawCheck::new("a ⊑ a + b");
    let mut mul_monotone = LawCheck::new("• monotone in each argument");

    for &[s, t, u] in &triples {
        let tu = plus(t, u);
        add_comm.record(approx_opt(tu, plus(u, t)), || format!("{t} + {u} = {} but {u} + {t} = {}", show(tu), show(plus(u, t))));

        // If both bracketings are defined they agree; if the left one is,
        // so is the right one.
        let st = plus(s, t);
        let left = st.and_then(|x| plus(x, u));
        let right = tu.and_then(|x| plus(s, x));
        let assoc_ok = match (left, right) {
            (Some(l), Some(r)) => approx(l, r),
            (Some(_), None) | (None, Some(_)) => false,
            (None, None) => true,
        };
        add_assoc.record(assoc_ok, || format!("({s} + {t}) + {u} = {}, {s} + ({t} + {u}) = {}", show(left), show(right)));

        add_unit.record(approx_opt(plus(s, zero), Some(s)), || format!("{s} + 0 = {}", show(plus(s, zero))));

        mul_comm.record(approx(times(s, t), times(t, s)), || format!("{s} • {t} ≠ {t} • {s}"));
        let l = times(times(s, t), u);
        let r = times(s, times(t, u));
        mul_assoc.record(approx(l, r), || format!("({s} • {t}) • {u} = {l}, {s} • ({t} • {u}) = {r}"));
        mul_unit.record(approx(times(s, one), s), || format!("{s} • 1 = {}", times(s, one)));
        annihilation.record(approx(times(s, zero), zero), || format!("{s} • 0 = {}", times(s, zero)));

        if let Some(sum_tu) = tu {
            let lhs = times(s, sum_tu);
            let rhs = plus(times(s, t), times(s, u));
            distrib.record(rhs.is_some_and(|r| approx(lhs, r)), || {
                format!("{s} • ({t} + {u}) = {lhs} but {s} • {t} + {s} • {u} = {}", show(rhs))
            });
        }

        reflexive.record(below(s, s), || format!("{s} ⋢ {s}"));
        if below(s, t) && below(t, u) {
            transitive.record(below(s, u), || format!("{s} ⊑ {t} ⊑ {u} but {s} ⋢ {u}"));
        }
        bounds.record(below(zero, s) && below(s, one), || format!("{s} not between 0 and 1"));
        if let Some(sum_st) = st {
            inflationary.record(below(s, sum_st), || format!("{s} ⋢ {s} + {t} = {sum_st}"));
        }
        if below(t, u) {
            let lo = times(s, t);
            let hi = times(s, u);
            mul_monotone.record(below(lo, hi), || format!("{t} ⊑ {u} but {s} • {t} = {lo} ⋢ {s} • {u} = {hi}"));
        }
    }

    let checks = [
        add_comm, add_assoc, add_unit, mul_comm, mul_assoc, mul_unit, annihilation, distrib, reflexive,
        transitive, bounds, inflationary, mul_monotone,
    ];
    let title = match kind {
        SemiringKind::Bool => format!("semiring laws: {kind} (exhaustive, {} triples)", triples.len()),
        _ => format!("semiring laws: {kind} ({} sampled triples, seed {seed})", triples.len()),
    };
    LawReport { title, outcomes: checks.into_iter().map(LawCheck::finish).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bool_exhaustive_passes() {
        let report = check_semiring_laws(SemiringKind::Bool, 1, 0);
        assert!(report.all_passed(), "{report}");
        assert_eq!(report.outcomes[0].cases, 8);
    }

    #[test]
    fn tropical_and_prob_pass() {
        for kind in [SemiringKind::Tropical, SemiringKind::Prob] {
            let report = check_semiring_laws(kind, 1000, 7);
            assert!(report.all_passed(), "{report}");
        }
    }

    #[test]
    fn tropical_distributivity_instance() {
        let (s, t, u) = (SemiringValue::cost(2), SemiringValue::cost(3), SemiringValue::cost(5));
        let lhs = plus(times(s, t), times(s, u)).unwrap();
        assert_eq!(lhs, SemiringValue::cost(5));
        assert_eq!(times(s, plus(t, u).unwrap()), SemiringValue::cost(5));
    }

    #[test]
    fn prob_distributivity_instance() {
        let (s, t, u) = (SemiringValue::Prob(0.5), SemiringValue::Prob(0.4), SemiringValue::Prob(0.5));
        let tu = plus(t, u).unwrap();
        assert!(approx(tu, SemiringValue::Prob(0.9)));
        let rhs = plus(times(s, t), times(s, u)).unwrap();
        assert!(approx(rhs, SemiringValue::Prob(0.45)));
        assert!(approx(times(s, tu), rhs));
    }

    #[test]
    fn report_keeps_first_counterexample() {
        let mut check = LawCheck::new("demo");
        check.record(true, || unreachable!());
        check.record(false, || "first".into());
        check.record(false, || "second".into());
        let outcome = check.finish();
        assert_eq!(outcome.cases, 3);
        assert_eq!(outcome.counterexample.as_deref(), Some("first"));
    }
}
