//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ltbe_core::lifting::{lift_double_extension, lift_dual_extension, lift_egli_milner, lift_extension, lift_poly};
use ltbe_core::random::{
    random_below, random_branch_over, random_relation, random_spec, random_system, random_system_named, StackShape,
};
use ltbe_core::{
    behaviour, bisimilarity, check_monad_consistency, check_semiring_laws, common_trace, oracle_matrix, parse_spec,
    parse_system, pointwise_leq, step_operator, BranchVal, FixpointOptions, Operator, PolyExpr, PolyTerm,
    SemiringKind, SemiringValue, StateId, StateRel, ValRel, DEFAULT_ENUM_CAP,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < budget, || format!("took {took:?}, budget {budget:?}"))?;
    Ok(took)
}

fn close(a: SemiringValue, b: SemiringValue) -> bool {
    match (a, b) {
        (SemiringValue::Prob(x), SemiringValue::Prob(y)) => (x - y).abs() <= 1e-9,
        _ => a == b,
    }
}

fn ids(prefix: &str, n: usize) -> Vec<StateId> {
    (0..n).map(|i| StateId(format!("{prefix}{i}"))).collect()
}

fn as_terms(rel: &StateRel) -> ValRel<PolyTerm, PolyTerm> {
    rel.map_keys(|r| PolyTerm::atom(r.as_str()), |c| PolyTerm::atom(c.as_str())).unwrap()
}

fn distinct(values: impl IntoIterator<Item = BranchVal>) -> Vec<BranchVal> {
    let mut out: Vec<BranchVal> = Vec::new();
    for v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn laws() -> Verdict {
    let start = Instant::now();
    let mut cases = 0;
    for (kind, samples) in [(SemiringKind::Bool, 0), (SemiringKind::Prob, 10_000), (SemiringKind::Tropical, 10_000)] {
        let report = check_semiring_laws(kind, samples, 1);
        ensure(report.all_passed(), || report.to_string())?;
        ensure(report.outcomes.iter().any(|o| o.law.contains("distributiv")), || "no distributivity law".into())?;
        cases += report.outcomes.iter().map(|o| o.cases).sum::<usize>();
    }
    let took = within(start, Duration::from_secs(5))?;
    Ok(format!("{cases} law instances in {took:.2?}"))
}

fn partial_additivity() -> Verdict {
    let start = Instant::now();
    let prob = check_monad_consistency(SemiringKind::Prob, 2);
    ensure(prob.all_passed(), || prob.to_string())?;
    let injective = &prob.outcomes[0];
    ensure(injective.law.contains("injective") && injective.passed(), || prob.to_string())?;
    ensure(prob.title.contains("witness"), || "no partiality witness".into())?;
    let bool_report = check_monad_consistency(SemiringKind::Bool, 2);
    ensure(bool_report.all_passed(), || bool_report.to_string())?;
    ensure(bool_report.outcomes.iter().any(|o| o.law.contains("surjective") && o.passed()), || {
        bool_report.to_string()
    })?;
    let took = within(start, Duration::from_secs(10))?;
    let witness = prob.title.split("witness ").nth(1).unwrap_or_default();
    Ok(format!("prob injective, not surjective: {witness}; bool bijective; {took:.2?}"))
}

fn unit_law() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    for i in 0..100 {
        let kind = SemiringKind::ALL[i % 3];
        let xs = ids("x", rng.gen_range(1..=5));
        let ys = ids("y", rng.gen_range(1..=5));
        let rel = as_terms(&random_relation(&mut rng, kind, &xs, &ys));
        let diracs: Vec<BranchVal> = rel.rows().iter().map(|x| BranchVal::unit(kind, x.clone())).collect();
        let lifted = lift_extension(&rel, &diracs).map_err(|e| e.to_string())?;
        for (x, d) in rel.rows().iter().zip(&diracs) {
            for y in rel.cols() {
                let got = lifted.lookup(&PolyTerm::Branch(d.clone()), y).map_err(|e| e.to_string())?;
                let want = rel.lookup(x, y).unwrap();
                ensure(got == want, || format!("{kind}: L(R)(η {x}, {y}) = {got}, R = {want}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("100 relations, {checked} entries exact"))
}

fn monotonicity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let lts: PolyExpr = "{*} + {a,b} * Id".parse().unwrap();
    let mut violations = Vec::new();
    for i in 0..200 {
        let kind = SemiringKind::ALL[i % 3];
        let xs = ids("x", rng.gen_range(1..=4));
        let ys = ids("y", rng.gen_range(1..=4));
        let hi = random_relation(&mut rng, kind, &xs, &ys);
        let lo = random_below(&mut rng, &hi);
        let (hi_t, lo_t) = (as_terms(&hi), as_terms(&lo));
        let tx = distinct((0..4).map(|_| random_branch_over(&mut rng, kind, hi_t.rows())));
        let ty = distinct((0..4).map(|_| random_branch_over(&mut rng, kind, hi_t.cols())));

        let mut check = |name: &str, l: ltbe_core::Result<ValRel<PolyTerm, PolyTerm>>, h| match (l, h) {
            (Ok(l), Ok(h)) if pointwise_leq(&l, &h).unwrap() => {}
            (Ok(_), Ok(_)) => violations.push(format!("{name} on pair {i}")),
            (Err(e), _) | (_, Err(e)) => violations.push(format!("{name} on pair {i}: {e}")),
        };
        check("poly", lift_poly(&lts, &lo_t, DEFAULT_ENUM_CAP), lift_poly(&lts, &hi_t, DEFAULT_ENUM_CAP));
        check("extension", lift_extension(&lo_t, &tx), lift_extension(&hi_t, &tx));
        check("dual extension", lift_dual_extension(&lo_t, &ty), lift_dual_extension(&hi_t, &ty));
        check("double extension", lift_double_extension(&lo_t, &tx, &ty), lift_double_extension(&hi_t, &tx, &ty));
        if kind == SemiringKind::Bool {
            check("egli-milner", lift_egli_milner(&lo_t, &tx, &ty), lift_egli_milner(&hi_t, &tx, &ty));
        }

        let shape = StackShape::ALL[(i / 3) % 3];
        let (n, m) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let sys = random_system(&mut rng, kind, shape, n);
        let spec = random_spec(&mut rng, shape, m);
        let hi = random_relation(&mut rng, kind, sys.states(), spec.states());
        let lo = random_below(&mut rng, &hi);
        match (step_operator(&sys, &spec, &lo), step_operator(&sys, &spec, &hi)) {
            (Ok(l), Ok(h)) if pointwise_leq(&l, &h).unwrap() => {}
            _ => violations.push(format!("step operator on pair {i}")),
        }
    }
    ensure(violations.is_empty(), || format!("{} violations, first: {}", violations.len(), violations[0]))?;
    Ok("200 pairs, 0 violations".into())
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut systems = 0;
    for round in 0..6 {
        for kind in SemiringKind::ALL {
            for shape in StackShape::ALL {
                let sys = random_system(&mut rng, kind, shape, 1 + round);
                let spec = random_spec(&mut rng, shape, 1 + round % 4);
                let op = Operator::behaviour(&sys, &spec, DEFAULT_ENUM_CAP).map_err(|e| e.to_string())?;
                let mut iterate = op.top().map_err(|e| e.to_string())?;
                for d in 0..=6 {
                    let expected = oracle_matrix(&sys, &spec, d).map_err(|e| e.to_string())?;
                    for ((c, z, got), (_, _, want)) in iterate.entries().zip(expected.entries()) {
                        ensure(close(got, want), || {
                            format!("{kind} {shape:?} system #{systems}, depth {d}, ({c}, {z}): engine {got}, oracle {want}")
                        })?;
                    }
                    iterate = op.apply(&iterate).map_err(|e| e.to_string())?;
                }
                systems += 1;
            }
        }
    }
    let took = within(start, Duration::from_secs(60))?;
    Ok(format!("{systems} systems, depths 0..=6, {took:.2?}"))
}

fn coin_loop() -> Verdict {
    let sys = parse_system(&read("coin_loop.json")).unwrap();
    let step = |next: &str| format!(r#"{{"inj": 1, "of": {{"pair": [{{"atom": "a"}}, {{"state": "{next}"}}]}}}}"#);
    let mut transitions = vec![r#""z0": {"inj": 0, "of": {"atom": "*"}}"#.to_string()];
    transitions.extend((1..=10).map(|n| format!(r#""z{n}": {}"#, step(&format!("z{}", n - 1)))));
    let states: Vec<String> = (0..=10).map(|n| format!("\"z{n}\"")).collect();
    let spec = parse_spec(&format!(
        r#"{{"stack": ["{{*}} + {{a}} * Id"], "states": [{}], "transitions": {{{}}}}}"#,
        states.join(", "),
        transitions.join(", ")
    ))
    .unwrap();
    let report = behaviour(&sys, &spec, &FixpointOptions::default()).map_err(|e| e.to_string())?;
    ensure(report.converged, || "finite traces did not converge".into())?;
    for n in 0..=10 {
        let got = report.result.lookup(&"c".into(), &format!("z{n}").into()).unwrap();
        let want = SemiringValue::Prob(0.5f64.powi(n + 1));
        ensure(close(got, want), || format!("a^{n}·stop: {got}, expected {want}"))?;
    }

    let omega = parse_spec(&read("coin_spec_omega.json")).unwrap();
    let op = Operator::behaviour(&sys, &omega, DEFAULT_ENUM_CAP).unwrap();
    let mut r = op.top().unwrap();
    for i in 0..40 {
        let got = r.lookup(&"c".into(), &"zw".into()).unwrap();
        ensure(got == SemiringValue::Prob(0.5f64.powi(i)), || format!("a^ω iterate {i}: {got}"))?;
        r = op.apply(&r).unwrap();
    }
    let tol = 1e-9;
    for max in 1..=40 {
        let opts = FixpointOptions { max_iterations: Some(max), tolerance: tol, ..Default::default() };
        let report = behaviour(&sys, &omega, &opts).unwrap();
        let gap_ok = report.final_gap <= tol;
        ensure(report.converged == gap_ok, || format!("max {max}: converged={} gap={}", report.converged, report.final_gap))?;
        ensure(report.converged == (max >= 30), || format!("max {max}: converged={}", report.converged))?;
    }
    Ok("a^n·stop = 2^-(n+1) for n ≤ 10; a^ω halves per step, converged from iteration 30".into())
}

fn bool_bound() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = (0, 0);
    for i in 0..50 {
        let shape = StackShape::ALL[i % 3];
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=4);
        let sys = random_system(&mut rng, SemiringKind::Bool, shape, n);
        let spec = random_spec(&mut rng, shape, m);
        let r = behaviour(&sys, &spec, &FixpointOptions::default()).map_err(|e| e.to_string())?;
        ensure(r.converged && r.final_gap == 0.0 && r.iterations <= n * m + 1, || {
            format!("behaviour instance {i}: {} iterations, bound {}", r.iterations, n * m + 1)
        })?;
        worst.0 = worst.0.max(r.iterations);

        let a = random_system(&mut rng, SemiringKind::Bool, shape, n);
        let k = rng.gen_range(1..=6);
        let b = random_system_named(&mut rng, SemiringKind::Bool, shape, "d", k);
        let r = bisimilarity(&a, &b).map_err(|e| e.to_string())?;
        ensure(r.converged && r.final_gap == 0.0 && r.iterations <= n * k + 1, || {
            format!("bisimilarity instance {i}: {} iterations, bound {}", r.iterations, n * k + 1)
        })?;
        worst.1 = worst.1.max(r.iterations);
    }
    Ok(format!("50 instances; most iterations: behaviour {}, bisimilarity {}", worst.0, worst.1))
}

fn separation() -> Verdict {
    let a = parse_system(&read("loop.json")).unwrap();
    let b = parse_system(&read("loop_exit.json")).unwrap();
    let bisim = bisimilarity(&a, &b).map_err(|e| e.to_string())?;
    let common = common_trace(&a, &b, &FixpointOptions::default()).map_err(|e| e.to_string())?;
    let (c, d) = (StateId::from("c"), StateId::from("d"));
    let bv = bisim.result.lookup(&c, &d).unwrap();
    let cv = common.result.lookup(&c, &d).unwrap();
    ensure(bv == SemiringValue::Bool(false) && cv == SemiringValue::Bool(true), || {
        format!("bisimilarity {bv}, common trace {cv}")
    })?;
    Ok("bisimilarity ⊥, common trace ⊤".into())
}

fn tropical_joint_cost() -> Verdict {
    let a = parse_system(&read("w1.json")).unwrap();
    let b = parse_system(&read("w2.json")).unwrap();
    let r = common_trace(&a, &b, &FixpointOptions::default()).map_err(|e| e.to_string())?;
    let v = r.result.lookup(&"c".into(), &"d".into()).unwrap();
    ensure(v == SemiringValue::cost(5) && r.converged, || format!("value {v}, converged {}", r.converged))?;
    Ok("min(2 + 3 + 0) = 5".into())
}

fn cli_determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_ltbe");
    let d = |n: &str| data(n).to_string_lossy().into_owned();
    let mut runs: Vec<Vec<String>> = vec![
        vec!["behaviour".into(), "--system".into(), d("coin_loop.json"), "--spec".into(), d("coin_spec_finite.json")],
        vec!["behaviour".into(), "--system".into(), d("coin_loop.json"), "--spec".into(), d("coin_spec_omega.json")],
        vec!["behaviour".into(), "--system".into(), d("a_loop_exit.json"), "--spec".into(), d("a_spec.json")],
        vec!["behaviour".into(), "--system".into(), d("nfa.json"), "--spec".into(), d("nfa_spec.json")],
        vec!["behaviour".into(), "--system".into(), d("io.json"), "--spec".into(), d("io_spec.json")],
        vec!["bisim".into(), "--a".into(), d("loop.json"), "--b".into(), d("loop_exit.json")],
        vec!["common".into(), "--a".into(), d("loop.json"), "--b".into(), d("loop_exit.json")],
        vec!["common".into(), "--a".into(), d("w1.json"), "--b".into(), d("w2.json")],
        vec!["oracle".into(), "--system".into(), d("two_paths.json"), "--spec".into(), d("a_stop_spec.json"), "--depth".into(), "3".into()],
        vec!["oracle".into(), "--a".into(), d("w1.json"), "--b".into(), d("w2.json"), "--depth".into(), "2".into()],
        vec!["check-laws".into(), "--samples".into(), "2000".into(), "--seed".into(), "1".into()],
    ];
    let json: Vec<Vec<String>> = runs
        .iter()
        .filter(|r| r[0] != "check-laws")
        .map(|r| r.iter().cloned().chain(["--format".into(), "json".into()]).collect())
        .collect();
    runs.extend(json);
    for args in &runs {
        let outputs: Vec<_> = (0..3)
            .map(|_| Command::new(bin).args(args).output().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        let first = &outputs[0];
        ensure(!first.stdout.is_empty(), || format!("{}: empty output", args.join(" ")))?;
        ensure(matches!(first.status.code(), Some(0 | 3)), || format!("{}: exit {:?}", args.join(" "), first.status))?;
        for o in &outputs[1..] {
            ensure(o.stdout == first.stdout && o.status == first.status, || {
                format!("{}: outputs differ between runs", args.join(" "))
            })?;
        }
    }
    Ok(format!("{} invocations × 3 runs byte-identical", runs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("semiring law suite", laws),
        ("partial additivity witness", partial_additivity),
        ("extension lifting unit law", unit_law),
        ("monotonicity of liftings and step operator", monotonicity),
        ("engine iterates equal oracle", oracle_equivalence),
        ("coin-loop numbers", coin_loop),
        ("bool convergence bound", bool_bound),
        ("bisimilarity vs common trace separation", separation),
        ("tropical joint cost", tropical_joint_cost),
        ("cli determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {:>2} {name}: panicked", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
