//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Counts, seeds and time limits are pinned below.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{fuzz_input, sample_rational, satisfied, string_witness, witness_satisfies};
use elpp::cdomains::{domain, DomainId, Satisfiability};
use elpp::classify::{classify, explain, replay_all, ClassifierConfig};
use elpp::differential::{differential, Agreement, DifferentialConfig};
use elpp::generate::{benchmark_kb, random_conjunction, random_kb, random_name_pair, KbShape};
use elpp::kb::{Concept, Constraint, KnowledgeBase, Name, NameKind};
use elpp::oracle::{candidate_values, find_countermodel, find_shaped_countermodel, SearchOutcome};
use elpp::pipeline::{a_extend, is_normal, nf_measure, normalize, normalize_traced, NfRule};
use elpp::reasoner::{check_subsumption, run_query};
use elpp::text::{parse_kb, print_kb};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_LIMIT: Duration = Duration::from_secs(1);

const DIFFERENTIAL_KBS: u64 = 1000;
const DIFFERENTIAL_LIMIT: Duration = Duration::from_secs(600);

const CONJUNCTIONS_PER_DOMAIN: u64 = 500;
const MAX_FEATURES: usize = 4;
const MAX_ATOMS: usize = 6;
const RATIONAL_SAMPLES: usize = 10_000;
const DECIDER_LIMIT: Duration = Duration::from_secs(300);

const NORMALIZATION_KBS: u64 = 1000;
const EXTENSION_KBS: u64 = 200;
const ORACLE_BUDGET: u64 = 200_000;

const BENCHMARK_SEED: u64 = 2024;
const BENCHMARK_LIMIT: Duration = Duration::from_secs(5);

const FUZZ_INPUTS: usize = 100_000;
const ROUND_TRIP_KBS: u64 = 1000;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn atomic(kb: &KnowledgeBase, kind: NameKind, label: &str) -> Concept {
    let n = kb.lookup(kind, label).unwrap();
    match kind {
        NameKind::Individual => Concept::Nominal(n),
        _ => Concept::Atomic(n),
    }
}

fn nominal_pair() -> Outcome {
    let kb = parse_kb(
        "concept X A B\nrole r1\nindividual b c\n\
         axiom X <= {b}\naxiom X <= {c}\naxiom A <= (exists r1 . X)\n",
    )
    .unwrap();
    let start = Instant::now();
    let st = classify(&kb, ClassifierConfig::default()).unwrap();
    let elapsed = start.elapsed();
    let x = atomic(&kb, NameKind::Concept, "X");
    let a = atomic(&kb, NameKind::Concept, "A");
    let b = atomic(&kb, NameKind::Individual, "b");
    let c = atomic(&kb, NameKind::Individual, "c");
    let r1 = kb.lookup(NameKind::Role, "r1").unwrap();
    let set = |v: &[&Concept]| v.iter().map(|&c| c.clone()).collect::<BTreeSet<_>>();
    let top = Concept::Top;
    let exact = st.subsumer_set(&x).unwrap() == set(&[&top, &x, &b, &c])
        && st.subsumer_set(&a).unwrap() == set(&[&top, &a])
        && st.subsumer_set(&b).unwrap() == set(&[&top, &b])
        && st.subsumer_set(&c).unwrap() == set(&[&top, &c])
        && st.edges(r1) == [(a, x)].into_iter().collect();
    outcome(
        exact && elapsed < GOLDEN_LIMIT,
        format!("exact sets: {exact}, {elapsed:?} (limit {GOLDEN_LIMIT:?})"),
    )
}

/// Kb and query for differential seed `seed`.
fn differential_case(seed: u64) -> (KnowledgeBase, Concept, Concept) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kb = random_kb(&mut rng, &KbShape::abstract_small());
    let (c, d) = random_name_pair(&mut rng, &kb);
    (kb, c, d)
}

fn differential_suite() -> Outcome {
    let start = Instant::now();
    let (mut agree_true, mut agree_false, mut shaped) = (0, 0, 0);
    let mut bad = Vec::new();
    for seed in 0..DIFFERENTIAL_KBS {
        let (kb, c, d) = differential_case(seed);
        match differential(&kb, &c, &d, DifferentialConfig::default()) {
            Ok(r) => {
                shaped += r.shaped as usize;
                match r.agreement {
                    Agreement::AgreeTrue => agree_true += 1,
                    Agreement::AgreeFalse => agree_false += 1,
                    other => bad.push(format!("seed {seed}: {other:?}")),
                }
            }
            Err(e) => bad.push(format!("seed {seed}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && elapsed < DIFFERENTIAL_LIMIT,
        format!(
            "{DIFFERENTIAL_KBS} kbs, {agree_true} agree-true, {agree_false} agree-false, \
             {shaped} decided by shaped search, {} disagreements or inconclusive {:?}, \
             {elapsed:?} (limit {DIFFERENTIAL_LIMIT:?})",
            bad.len(),
            &bad[..bad.len().min(5)],
        ),
    )
}

fn features(n: usize) -> Vec<Name> {
    let mut kb = KnowledgeBase::new();
    (0..n).map(|i| kb.feature(&format!("f{i}"))).collect()
}

fn decider_suite() -> Outcome {
    let start = Instant::now();
    let mut counts = [[0usize; 2]; 2];
    let mut times = [Duration::ZERO; 2];
    let mut violations = Vec::new();
    for (d, string) in [(0, false), (1, true)] {
        let domain_start = Instant::now();
        let id = if string {
            DomainId::String
        } else {
            DomainId::Rational
        };
        for seed in 0..CONJUNCTIONS_PER_DOMAIN {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let nf = rng.gen_range(1..=MAX_FEATURES);
            let conj = random_conjunction(&mut rng, string, &features(nf), MAX_ATOMS);
            match domain(id).satisfiable(&conj) {
                Ok(Satisfiability::Sat(w)) => {
                    counts[d][0] += 1;
                    if let Err(e) = witness_satisfies(&conj, &w) {
                        violations.push(format!("{id} seed {seed}: {e}"));
                    }
                }
                Ok(Satisfiability::Unsat) => {
                    counts[d][1] += 1;
                    let refuted = if string {
                        string_witness(&conj)
                    } else {
                        (0..RATIONAL_SAMPLES)
                            .map(|_| sample_rational(&mut rng, &conj))
                            .find(|s| satisfied(&conj, s))
                    };
                    if let Some(w) = refuted {
                        violations.push(format!("{id} seed {seed}: unsat but {w:?}"));
                    }
                }
                Err(e) => violations.push(format!("{id} seed {seed}: {e}")),
            }
        }
        times[d] = domain_start.elapsed();
    }
    let elapsed = start.elapsed();
    outcome(
        violations.is_empty() && elapsed < DECIDER_LIMIT,
        format!(
            "rational {}/{} sat/unsat in {:?}, string {}/{} sat/unsat in {:?}, \
             {} violations {:?}, {elapsed:?} (limit {DECIDER_LIMIT:?})",
            counts[0][0],
            counts[0][1],
            times[0],
            counts[1][0],
            counts[1][1],
            times[1],
            violations.len(),
            &violations[..violations.len().min(5)],
        ),
    )
}

/// Both conjuncts complex: one step yields three constraints.
fn double_nf2_golden() -> bool {
    let kb =
        parse_kb("concept P E\nrole r\naxiom ((exists r . P) and (exists r . E)) <= E\n").unwrap();
    let Ok((out, steps)) = normalize_traced(&kb) else {
        return false;
    };
    let fresh: Vec<_> = out.concepts().difference(kb.concepts()).copied().collect();
    if fresh.len() != 2 || steps.iter().filter(|s| s.rule == NfRule::Nf2).count() != 1 {
        return false;
    }
    let p = atomic(&kb, NameKind::Concept, "P");
    let e = atomic(&kb, NameKind::Concept, "E");
    let r = kb.lookup(NameKind::Role, "r").unwrap();
    // Either fresh name may play either role.
    [(0, 1), (1, 0)].iter().any(|&(i, j)| {
        let (a, b) = (Concept::Atomic(fresh[i]), Concept::Atomic(fresh[j]));
        let expected: BTreeSet<Constraint> = [
            Constraint::gci(Concept::conj(a.clone(), b.clone()), e.clone()),
            Constraint::gci(Concept::exists(r, e.clone()), b),
            Constraint::gci(Concept::exists(r, p.clone()), a),
        ]
        .into_iter()
        .collect();
        out.constraints.iter().cloned().collect::<BTreeSet<_>>() == expected
    })
}

fn normalization_suite() -> Outcome {
    let mut failures = Vec::new();
    let mut steps_total = 0;
    for seed in 0..NORMALIZATION_KBS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = if seed % 2 == 0 {
            KbShape::abstract_small()
        } else {
            KbShape::concrete_small()
        };
        let kb = random_kb(&mut rng, &shape);
        match normalize_traced(&kb) {
            Ok((out, steps)) => {
                steps_total += steps.len();
                let mut last = nf_measure(&kb);
                let decreasing = steps.iter().all(|s| {
                    let ok = s.measure_before == last && s.measure_after < s.measure_before;
                    last = s.measure_after;
                    ok
                });
                if !is_normal(&out) || !decreasing {
                    failures.push(seed);
                }
            }
            Err(_) => failures.push(seed),
        }
    }
    let golden = double_nf2_golden();
    outcome(
        failures.is_empty() && golden,
        format!(
            "{NORMALIZATION_KBS} kbs, {steps_total} steps, failing seeds {failures:?}, \
             modified-NF2 golden {}",
            if golden { "matches" } else { "differs" }
        ),
    )
}

/// Oracle verdict on `c ⊑ d` at `bound`: `Some(true)` if a countermodel
/// exists.
fn oracle_refutes(kb: &KnowledgeBase, c: &Concept, d: &Concept, bound: usize) -> Option<bool> {
    let pools = candidate_values(kb, &[c, d]);
    match find_countermodel(kb, c, d, bound, &pools, ORACLE_BUDGET).ok()? {
        SearchOutcome::BudgetExceeded => {
            match find_shaped_countermodel(kb, c, d, &pools, ORACLE_BUDGET).ok()? {
                SearchOutcome::BudgetExceeded => None,
                out => Some(out.is_found()),
            }
        }
        out => Some(out.is_found()),
    }
}

fn extension_suite() -> Outcome {
    let mut pairs = 0;
    let mut bad = Vec::new();
    for seed in 0..EXTENSION_KBS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kb = random_kb(&mut rng, &KbShape::abstract_small());
        let (c, _) = random_name_pair(&mut rng, &kb);
        let Concept::Atomic(a) = c else {
            unreachable!()
        };
        let ext = a_extend(&kb, a).unwrap();
        let bound = normalize(&ext.kb).unwrap().basic_concepts().len() + 1;
        for &b in kb.concepts() {
            let d = Concept::Atomic(b);
            pairs += 1;
            let before = oracle_refutes(&kb, &c, &d, bound);
            let after = oracle_refutes(&ext.kb, &c, &d, bound);
            if before.is_none() || before != after {
                bad.push(format!(
                    "seed {seed}, B={}: {before:?} vs {after:?}",
                    kb.label(b)
                ));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{EXTENSION_KBS} kbs, {pairs} (A, B) pairs, {} disagreements or inconclusive {:?}",
            bad.len(),
            &bad[..bad.len().min(5)]
        ),
    )
}

fn replay_suite() -> Outcome {
    let (mut entries, mut replayed) = (0usize, 0usize);
    let mut bad = Vec::new();
    for seed in 0..DIFFERENTIAL_KBS {
        let (kb, c, d) = differential_case(seed);
        let run = run_query(&kb, &c, &d, ClassifierConfig::default()).unwrap();
        let all = run.state.entries();
        entries += all.len();
        let failed = replay_all(&run.kb, &run.state);
        let explained = all
            .iter()
            .filter(|e| explain(&run.state, e).is_ok())
            .count();
        if failed.is_empty() && explained == all.len() {
            replayed += all.len();
        } else {
            bad.push(seed);
        }
    }
    outcome(
        entries == replayed,
        format!("{replayed}/{entries} entries replayed and explained, failing seeds {bad:?}"),
    )
}

fn benchmark() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(BENCHMARK_SEED);
    let kb = benchmark_kb(&mut rng);
    let (c, d) = random_name_pair(&mut rng, &kb);
    let start = Instant::now();
    let verdict = check_subsumption(&kb, &c, &d);
    let elapsed = start.elapsed();
    outcome(
        verdict.is_ok() && elapsed < BENCHMARK_LIMIT,
        format!(
            "{} concepts, {} roles, {} individuals, {} axioms, verdict {:?}, \
             {elapsed:?} (limit {BENCHMARK_LIMIT:?})",
            kb.concepts().len(),
            kb.roles().len(),
            kb.individuals().len(),
            kb.constraints.len(),
            verdict.map(|v| v.holds),
        ),
    )
}

fn parser_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let seeds: Vec<String> = (0..20)
        .map(|_| print_kb(&random_kb(&mut rng, &KbShape::concrete_small())))
        .collect();
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let mut crashes = Vec::new();
    for i in 0..FUZZ_INPUTS {
        let input = fuzz_input(&mut rng, &seeds[i % seeds.len()]);
        match catch_unwind(AssertUnwindSafe(|| parse_kb(&input))) {
            Ok(Ok(kb)) if kb.validate().is_ok() => accepted += 1,
            Ok(Err(errs)) if !errs.is_empty() => rejected += 1,
            _ => crashes.push(input),
        }
    }
    let mut round_trip_failures = Vec::new();
    for seed in 0..ROUND_TRIP_KBS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = if seed % 2 == 0 {
            KbShape::abstract_small()
        } else {
            KbShape::concrete_small()
        };
        let kb = random_kb(&mut rng, &shape);
        let normal = normalize(&kb).unwrap();
        let ok = [&kb, &normal]
            .iter()
            .all(|k| parse_kb(&print_kb(k)).as_ref() == Ok(*k));
        if !ok {
            round_trip_failures.push(seed);
        }
    }
    outcome(
        crashes.is_empty() && round_trip_failures.is_empty(),
        format!(
            "{FUZZ_INPUTS} fuzzed inputs: {accepted} accepted, {rejected} rejected with errors, \
             {} crashes {:?}; {ROUND_TRIP_KBS} kbs round-trip, failing seeds {round_trip_failures:?}",
            crashes.len(),
            &crashes[..crashes.len().min(3)],
        ),
    )
}

fn run(f: fn() -> Outcome) -> Outcome {
    catch_unwind(f).unwrap_or_else(|_| outcome(false, "panicked".into()))
}

fn main() -> ExitCode {
    // The libtest flags cargo passes are irrelevant here; `--list` must
    // still report nothing so that test discovery tools stay quiet.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [Criterion; 8] = [
        ("golden saturation", nominal_pair),
        ("differential correctness", differential_suite),
        ("concrete-domain deciders", decider_suite),
        ("normalization", normalization_suite),
        ("A-extension equivalence", extension_suite),
        ("trace replay", replay_suite),
        ("performance sanity", benchmark),
        ("parser robustness", parser_suite),
    ];
    // Criteria run one after another so each time limit measures that
    // criterion alone. Numeric arguments select a subset, e.g. `-- 3 7`.
    let selected: Vec<usize> = std::env::args()
        .filter_map(|a| a.parse::<usize>().ok())
        .filter(|k| (1..=criteria.len()).contains(k))
        .collect();
    let mut all = true;
    for (k, (name, f)) in criteria.iter().enumerate() {
        if !selected.is_empty() && !selected.contains(&(k + 1)) {
            continue;
        }
        let r = run(*f);
        all &= r.pass;
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {name}: {}", k + 1, r.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
