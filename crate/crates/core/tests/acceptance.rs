//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::time::{Duration, Instant};

use qred_core::bisim::{
    all_kernel_bisimulations, bisimilar, count_approximants, fingerprint_partition, largest_bisimulation, minimize,
    oracle_largest_bisimulation,
};
use qred_core::gen::{suite, Family};
use qred_core::monoid::Monoid;
use qred_core::reduct::{
    compose_reductions, curry_reduction, lts_to_wlts, synthesize_reduction, verify_system_reduction, wlts_to_ultras, BisimRule,
    CurryDirection, ReductionWitness, VerificationReport, ZeroEntries,
};
use qred_core::systems::{Component, TypeDescriptor};
use qred_core::{Partition, StateMap, System, Value};

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn main_suite() -> Vec<(Family, System)> {
    Family::ALL.into_iter().flat_map(|f| suite(f, 500, SEED, 5, 2).into_iter().map(move |s| (f, s))).collect()
}

fn lts_ty() -> TypeDescriptor {
    TypeDescriptor::lts(vec!["l".into()]).unwrap()
}

fn wlts_nat_ty() -> TypeDescriptor {
    TypeDescriptor::wlts(vec!["l".into()], Monoid::nat_plus()).unwrap()
}

fn criterion_1(systems: &[(Family, System)]) -> Outcome {
    let mut nontrivial = 0;
    for (f, s) in systems {
        let refined = largest_bisimulation(s);
        let oracle = oracle_largest_bisimulation(s, 5).unwrap();
        let naive = common::naive_largest(s);
        if refined != oracle || refined != naive {
            return outcome(false, format!("{} system disagrees: {}", f.name(), qred_core::format::serialize_system(s)));
        }
        nontrivial += usize::from(!refined.is_discrete());
    }
    outcome(true, format!("{} systems, {nontrivial} with a nontrivial largest bisimulation", systems.len()))
}

fn criterion_2() -> Outcome {
    let systems = suite(Family::WltsNat, 200, SEED + 2, 5, 3);
    for s in &systems {
        let w = curry_reduction(s, CurryDirection::ToWts).unwrap();
        let strings = common::growth_strings(s.len());
        for b in &strings {
            let p = Partition::from_keys(b);
            let left = qred_core::bisim::is_kernel_bisimulation(s, &p).unwrap();
            let right = qred_core::bisim::is_kernel_bisimulation(&w.target, &p).unwrap();
            if left != right || left != common::naive_is_bisim(s, b) {
                return outcome(false, format!("partition {b:?} differs on {}", qred_core::format::serialize_system(s)));
            }
        }
        let back = curry_reduction(&w.target, CurryDirection::FromWts).unwrap();
        if &back.target != s {
            return outcome(false, "uncurrying did not restore the source");
        }
    }
    outcome(true, format!("{} systems", systems.len()))
}

/// Every constructor's witnesses on `s`, with compositions.
fn witnesses(f: Family, s: &System) -> Vec<ReductionWitness> {
    let mut out = Vec::new();
    let synth = synthesize_reduction(s, &lts_ty()).unwrap();
    out.push(synth);
    if f == Family::Lts {
        let cast = lts_to_wlts(s).unwrap();
        let curried = curry_reduction(&cast.target, CurryDirection::ToWts).unwrap();
        out.push(compose_reductions(&cast, &curried).unwrap());
        out.push(cast);
    }
    if s.ty().is_wlts() {
        let curried = curry_reduction(s, CurryDirection::ToWts).unwrap();
        let back = curry_reduction(&curried.target, CurryDirection::FromWts).unwrap();
        out.push(compose_reductions(&curried, &back).unwrap());
        let into_synth = synthesize_reduction(&curried.target, &wlts_nat_ty()).unwrap();
        out.push(compose_reductions(&curried, &into_synth).unwrap());
        out.push(back);
        out.push(curried);
        let ultras = wlts_to_ultras(s, ZeroEntries::Wrap).unwrap();
        let synth = synthesize_reduction(&ultras.target, &wlts_nat_ty()).unwrap();
        out.push(compose_reductions(&ultras, &synth).unwrap());
        out.push(ultras);
    }
    out
}

fn collapsed(w: &ReductionWitness) -> Option<ReductionWitness> {
    if w.source.len() < 2 {
        return None;
    }
    let mut image = w.state_map.as_slice().to_vec();
    image[1] = image[0];
    let mut m = w.clone();
    m.state_map = StateMap::new(image);
    // Pair the diagonal with its image so the failure is not only injectivity.
    if let BisimRule::Identity = m.rule {
        m.rule = BisimRule::PadDiagonal;
    }
    Some(m)
}

fn shuffled(w: &ReductionWitness) -> Option<ReductionWitness> {
    let bis = all_kernel_bisimulations(&w.source, 5).unwrap();
    if bis.len() < 2 {
        return None;
    }
    let images: Vec<Partition> = bis.iter().map(|r| w.rule.apply(r, &w.state_map, w.target.len())[0].clone()).collect();
    let pairs = bis.iter().enumerate().map(|(i, r)| (r.clone(), images[(i + 1) % images.len()].clone())).collect();
    let mut m = w.clone();
    m.rule = BisimRule::Explicit(pairs);
    Some(m)
}

fn localized(report: &VerificationReport) -> bool {
    !report.passed && report.check("diamond").is_some_and(|c| !c.passed && c.counterexample.as_ref().is_some_and(|cx| cx.states.is_some()))
}

#[derive(Default)]
struct Observed {
    passing: usize,
    passing_full: usize,
    violations: Vec<String>,
}

impl Observed {
    fn record(&mut self, w: &ReductionWitness, report: &VerificationReport) {
        if !report.passed {
            return;
        }
        self.passing += 1;
        if !w.state_map.is_injective() {
            self.violations.push(format!("passing {} witness with non-injective σ^c", w.constructor.name()));
        }
        if report.full {
            self.passing_full += 1;
            if !(w.state_map.is_injective() && w.state_map.is_surjective(w.target.len())) {
                self.violations.push(format!("passing full {} witness with non-bijective σ^c", w.constructor.name()));
            }
        }
    }
}

fn criterion_3(systems: &[(Family, System)], observed: &mut Observed) -> Outcome {
    let (mut checked, mut mutants) = (0, 0);
    for (f, s) in systems {
        for w in witnesses(*f, s) {
            let report = verify_system_reduction(&w, 5).unwrap();
            observed.record(&w, &report);
            if !report.passed || !report.exhaustive {
                return outcome(false, format!("{} witness failed on {}: {:?}", w.constructor.name(), f.name(), report.first_failure()));
            }
            checked += 1;
            for m in [collapsed(&w), shuffled(&w)].into_iter().flatten() {
                let report = verify_system_reduction(&m, 5).unwrap();
                observed.record(&m, &report);
                if !localized(&report) {
                    return outcome(false, format!("a mutated {} witness was not rejected with a counterexample", w.constructor.name()));
                }
                mutants += 1;
            }
        }
    }
    outcome(true, format!("{checked} witnesses pass, {mutants} mutants rejected"))
}

fn criterion_4(observed: &Observed) -> Outcome {
    match observed.violations.first() {
        Some(v) => outcome(false, v.clone()),
        None => outcome(true, format!("{} passing witnesses, {} of them full", observed.passing, observed.passing_full)),
    }
}

fn criterion_5(observed: &mut Observed) -> Outcome {
    let sources: Vec<System> = Family::ALL.into_iter().flat_map(|f| suite(f, 20, SEED + 5, 5, 2)).collect();
    for s in &sources {
        for ty in [lts_ty(), wlts_nat_ty()] {
            let w = synthesize_reduction(s, &ty).unwrap();
            let report = verify_system_reduction(&w, 5).unwrap();
            observed.record(&w, &report);
            if !report.passed {
                return outcome(false, format!("synthesized witness failed: {:?}", report.first_failure()));
            }
            let qred_core::reduct::Constructor::Synthesized { offset, len } = w.constructor else { unreachable!() };
            let classes = largest_bisimulation(&w.target);
            for i in 0..len {
                for j in i + 1..len {
                    if classes.related(offset + i, offset + j) {
                        return outcome(false, format!("gadget states g{i} and g{j} are bisimilar"));
                    }
                }
            }
        }
    }
    outcome(true, format!("{} sources, both targets", sources.len()))
}

fn finite_descriptors() -> Vec<(TypeDescriptor, usize)> {
    let z3 = Monoid::table(
        "z3",
        vec!["0".into(), "1".into(), "2".into()],
        vec![
            vec!["0".into(), "1".into(), "2".into()],
            vec!["1".into(), "2".into(), "0".into()],
            vec!["2".into(), "0".into(), "1".into()],
        ],
        "0",
        "1",
    )
    .unwrap();
    let labels = |n: usize| (0..n).map(|i| format!("a{i}")).collect::<Vec<_>>();
    vec![
        (TypeDescriptor::lts(labels(1)).unwrap(), 4),
        (TypeDescriptor::lts(labels(2)).unwrap(), 2),
        (TypeDescriptor::lts(labels(3)).unwrap(), 1),
        (TypeDescriptor::wlts(labels(1), z3.clone()).unwrap(), 2),
        (TypeDescriptor::wlts(labels(2), z3).unwrap(), 1),
        (TypeDescriptor::ultras(labels(1), Monoid::bool_or()).unwrap(), 2),
        (
            TypeDescriptor::new(vec![
                Component::new(labels(1), vec![Monoid::bool_or(), Monoid::bool_or()]),
                Component::new(vec!["b".into()], vec![Monoid::bool_or()]),
            ])
            .unwrap(),
            1,
        ),
    ]
}

fn criterion_6(systems: &[(Family, System)]) -> Outcome {
    for (f, s) in systems {
        if fingerprint_partition(s, s.len()) != largest_bisimulation(s) {
            return outcome(false, format!("{} system: fingerprints disagree with the largest bisimulation", f.name()));
        }
    }
    let lts1 = TypeDescriptor::lts(vec!["a".into()]).unwrap();
    let counts = count_approximants(&lts1, 3).unwrap();
    if counts != [1, 2, 4, 16] {
        return outcome(false, format!("count_approximants gave {counts:?}"));
    }
    let descriptors = finite_descriptors();
    for (ty, depth) in &descriptors {
        let got = count_approximants(ty, *depth).unwrap();
        let expected = common::closed_form_counts(ty, *depth);
        if got != expected {
            return outcome(false, format!("counts {got:?} differ from the recurrence {expected:?}"));
        }
    }
    outcome(true, format!("{} systems, [1,2,4,16], {} descriptors", systems.len(), descriptors.len()))
}

fn criterion_7() -> Outcome {
    let build = |m: Monoid, one: Value| {
        System::wlts(
            &["a"],
            m,
            &["x", "x'", "y1", "y2"],
            &[("x", "a", "y1", one.clone()), ("x", "a", "y2", one.clone()), ("x'", "a", "y1", one)],
        )
        .unwrap()
    };
    let nat = build(Monoid::nat_plus(), Value::nat(1));
    let bool = build(Monoid::bool_or(), Value::Bool(true));
    let over_nat = bisimilar(&nat, 0, &nat, 1).unwrap();
    let over_bool = bisimilar(&bool, 0, &bool, 1).unwrap();
    outcome(!over_nat && over_bool, format!("nat-plus: {over_nat}, bool-or: {over_bool}"))
}

fn criterion_8(systems: &[(Family, System)]) -> Outcome {
    for (f, s) in systems {
        let (q, _) = minimize(s);
        if !largest_bisimulation(&q).is_discrete() || !common::naive_largest(&q).is_discrete() {
            return outcome(false, format!("{} system: the quotient is not strongly extensional", f.name()));
        }
    }
    outcome(true, format!("{} systems", systems.len()))
}

/// Runs one criterion; the printed line is returned so that lines can be
/// emitted in criterion order.
fn report(n: usize, limit: Duration, what: &str, f: impl FnOnce() -> Outcome) -> (usize, bool, String) {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let ok = out.passed && elapsed <= limit;
    let line = format!(
        "criterion {n}: {} {what} ({:.2}s, limit {}s): {}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs(),
        out.detail
    );
    (n, ok, line)
}

fn main() {
    let systems = main_suite();
    let mut observed = Observed::default();
    let secs = Duration::from_secs;
    let mut results = [
        report(1, secs(60), "refinement matches the oracles", || criterion_1(&systems)),
        report(2, secs(30), "currying preserves bisimulations", criterion_2),
        report(3, secs(120), "reduction witnesses verify", || criterion_3(&systems, &mut observed)),
        report(5, secs(60), "synthesized gadgets", || criterion_5(&mut observed)),
        report(4, secs(1), "passing witnesses are injective, full ones bijective", || criterion_4(&observed)),
        report(6, secs(30), "fingerprints and approximant counts", || criterion_6(&systems)),
        report(7, secs(1), "the monoid changes the equivalence", criterion_7),
        report(8, secs(60), "quotients are strongly extensional", || criterion_8(&systems)),
    ];
    results.sort_by_key(|r| r.0);
    for (_, _, line) in &results {
        println!("{line}");
    }
    if results.iter().any(|r| !r.1) {
        std::process::exit(1);
    }
}
