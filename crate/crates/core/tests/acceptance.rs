//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dlsequent::calculus::{compile_ddr, Calculus, Definitions, RuleClass};
use dlsequent::countermodel::{extract_model, find_countermodel, ModelError};
use dlsequent::meta::{contract, derive_identity, invert_at, substitute, weaken};
use dlsequent::prover::{check_proof, prove, Budget, SearchOutcome};
use dlsequent::syntax::{parse_formula, parse_kb, parse_sequent, Individual, LanguageProfile, Sequent, Side};

use common::{full_with_user_relations, proof_corpus, reverse_enumeration_oracle, rotating_profiles, test_definitions, Gen};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

fn alc_rule_set() -> Outcome {
    let start = Instant::now();
    let calc = Calculus::for_profile(&LanguageProfile::alc()).map_err(|e| e.to_string())?;
    let names: BTreeSet<&str> = calc.schema_names().into_iter().collect();
    let expected: BTreeSet<&str> = dlsequent::calculus::ALC_RULES.into_iter().collect();
    ensure(names == expected, || format!("ALC schemas {names:?}"))?;
    let golden = include_str!("golden/alc_rules.txt");
    let rendered = calculus_golden::render(&calc);
    ensure(rendered == golden, || "canonical instances differ from tests/golden/alc_rules.txt".into())?;
    let took = within(start, Duration::from_secs(1))?;
    Ok(format!("{} schemas, golden instances match, {took:?}", names.len()))
}

/// Shared with the calculus integration tests.
#[path = "golden/render.rs"]
mod calculus_golden;

fn random_corpus() -> Vec<(Sequent, Calculus)> {
    let profiles = rotating_profiles();
    let defs = test_definitions();
    (0..500u64)
        .map(|i| {
            let profile = profiles[i as usize % profiles.len()].clone();
            let calc = Calculus::assemble(&profile, &defs).expect("profile assembles");
            let mut g = Gen::new(0x5eed_0000 + i, profile).with_vocabulary(4, 3, 2);
            (g.sequent(4, 2), calc)
        })
        .collect()
}

fn soundness_and_saturation() -> (Outcome, Outcome) {
    let start = Instant::now();
    let defs = test_definitions();
    let (mut proved, mut saturated, mut unknown, mut skipped) = (0, 0, 0, 0);
    let mut unsound = Vec::new();
    let mut bad_models = Vec::new();
    for (s, calc) in random_corpus() {
        let outcome = match prove(&s, &calc, Budget::steps(2000)) {
            Ok(o) => o,
            Err(e) => return (Err(format!("prove failed on `{s}`: {e}")), Err("not run".into())),
        };
        match &outcome {
            SearchOutcome::Proved(_) => {
                proved += 1;
                match find_countermodel(&s, 3, &defs) {
                    Ok(Some(m)) => unsound.push(format!("`{s}` proved but falsified by {}", m.to_json())),
                    Ok(None) => {}
                    Err(ModelError::VocabularyTooLarge { .. }) => skipped += 1,
                    Err(e) => unsound.push(format!("`{s}`: oracle error {e}")),
                }
            }
            SearchOutcome::Saturated(branch) => {
                saturated += 1;
                let ok = extract_model(branch).and_then(|m| m.falsifies(&s, &defs));
                if !matches!(ok, Ok(true)) {
                    bad_models.push(format!("`{s}`: {ok:?}"));
                }
            }
            SearchOutcome::BudgetExhausted(_) => unknown += 1,
        }
    }
    let took = start.elapsed();
    let soundness = if !unsound.is_empty() {
        Err(format!("{} disagreements, first: {}", unsound.len(), unsound[0]))
    } else if took >= Duration::from_secs(60) {
        Err(format!("took {took:?}"))
    } else {
        Ok(format!("500 sequents: {proved} proved, {saturated} saturated, {unknown} unknown, {skipped} oracle-skipped, {took:?}"))
    };
    let saturation = if bad_models.is_empty() {
        Ok(format!("{saturated}/{saturated} extracted models falsify the root"))
    } else {
        Err(format!("{} failures, first: {}", bad_models.len(), bad_models[0]))
    };
    (soundness, saturation)
}

fn funct_closure() -> Outcome {
    let profile = LanguageProfile::alc().with_ddr("Funct").normalized();
    let calc = Calculus::for_profile(&profile).map_err(|e| e.to_string())?;
    let variant = calc.schema("Funct_l[b:=a,c:=a]").ok_or("no contracted Funct_l variant")?;
    let p = variant.pattern();
    let principal = parse_sequent("Funct(r), r(a,a) |-", &profile).map_err(|e| e.to_string())?;
    let premise = parse_sequent("a = a |-", &profile).map_err(|e| e.to_string())?;
    ensure(p.principal == principal, || format!("principal `{}`", p.principal))?;
    ensure(p.premises == vec![premise], || format!("premises {:?}", p.premises))?;
    ensure(p.consumed.is_empty(), || "variant consumes formulae".into())?;
    Ok(format!("{}: {} / {}", variant.name, p.principal, p.premises[0]))
}

fn identity_derivations() -> Outcome {
    let start = Instant::now();
    let profile = full_with_user_relations();
    let calc = Calculus::assemble(&profile, &test_definitions()).map_err(|e| e.to_string())?;
    let mut formulas = Vec::new();
    for text in [
        "a:{b}",
        "a:atmost 2 r (A and B)",
        "a:atleast 2 (inv s) A",
        "a:atmost 1 r top",
        "r;s;r(a,b)",
        "Rel[Chain2](r,s,r)",
        "Rel[Sym](s)",
        "r;s sub r",
        "Funct(r)",
    ] {
        formulas.push(parse_formula(text, &profile).map_err(|e| e.to_string())?);
    }
    let mut g = Gen::new(0x1d, profile.clone());
    while formulas.len() < 200 {
        formulas.push(g.formula_of_weight(8));
    }
    let mut max_weight = 0;
    for f in &formulas {
        max_weight = max_weight.max(calc.weight(f).map_err(|e| e.to_string())?);
        let ctx = g.sequent(2, 1);
        let t = derive_identity(f, &ctx, &calc).map_err(|e| format!("`{f}`: {e}"))?;
        check_proof(&t, &calc).map_err(|v| format!("`{f}`: {v:?}"))?;
        let mut expected = ctx.clone();
        expected.push(Side::Left, f.clone());
        expected.push(Side::Right, f.clone());
        ensure(t.conclusion == expected, || format!("`{f}`: wrong conclusion `{}`", t.conclusion))?;
    }
    let took = within(start, Duration::from_secs(30))?;
    Ok(format!("{} formulae up to weight {max_weight}, {took:?}", formulas.len()))
}

fn structural_properties() -> Outcome {
    let corpus = proof_corpus(0x5747, 200, 6);
    let mut calls = 0;
    let fail = |op: &str, t: &dlsequent::prover::ProofTree, e: String| format!("{op} on `{}`: {e}", t.conclusion);
    for (k, (t, calc)) in corpus.iter().enumerate() {
        let mut g = Gen::new(k as u64, calc.profile().clone()).with_vocabulary(3, 3, 2);
        let h = t.height();
        let mut check = |op: &str, out: Result<dlsequent::prover::ProofTree, dlsequent::meta::MetaError>, bound: usize| {
            calls += 1;
            let out = out.map_err(|e| fail(op, t, e.to_string()))?;
            check_proof(&out, calc).map_err(|v| fail(op, t, format!("{v:?}")))?;
            ensure(out.height() <= bound, || fail(op, t, format!("height {} > {bound}", out.height())))
        };

        let side = if k % 2 == 0 { Side::Left } else { Side::Right };
        let f = g.formula(2);
        let extra = Sequent::new().with(side, f);
        check("weaken", weaken(t, &extra, calc), h)?;

        if let Some((side, f)) = t.conclusion.formulas().next().map(|(s, f)| (s, f.clone())) {
            let doubled = weaken(t, &Sequent::new().with(side, f.clone()), calc).map_err(|e| e.to_string())?;
            check("contract", contract(&doubled, side, &f, calc), doubled.height())?;
        }

        let from = g.individual();
        let to = if k % 3 == 0 { Individual::eigen(1) } else { g.individual() };
        check("substitute", substitute(t, &from, &to, calc), h)?;

        for app in calc.enumerate_applications(&t.conclusion) {
            for i in 0..app.premises.len() {
                check("invert", invert_at(t, &app.schema, &app.binding, i, calc), h)?;
            }
        }
    }
    Ok(format!("{} proofs, {calls} transformation calls, all checked with height preserved", corpus.len()))
}

fn ddr_shapes() -> Outcome {
    let defs = Definitions::builtin();
    let expected = [
        ("Trans", "r(a,b), r(b,c), Trans(r) |- => [r(a,c) |-]", 3, "r(a,b), r(b,c) |- r(a,c)", false),
        ("Refl", "Refl(r) |- => [r(a,a) |-]", 1, "|- r(a,a)", false),
        ("Irr", "r(a,a), Irr(r) |- => []", 1, "r(a,a) |-", true),
        ("Asy", "r(a,b), r(b,a), Asy(r) |- => []", 2, "r(a,b), r(b,a) |-", true),
        ("Disj", "r(a,b), s(a,b), Disj(r,s) |- => []", 2, "r(a,b), s(a,b) |-", true),
        ("Funct", "r(a,b), r(a,c), Funct(r) |- => [b = c |-]", 3, "r(a,b), r(a,c) |- b = c", false),
    ];
    let mut summary = String::new();
    for (name, left_shape, eigens, right_premise, initial) in expected {
        let def = defs.get(name).ok_or_else(|| format!("{name} is not built in"))?;
        let (left, right) = compile_ddr(def).map_err(|e| e.to_string())?;
        let lp = left.pattern();
        let premises: Vec<String> = lp.premises.iter().map(|p| p.to_string()).collect();
        let shape = format!("{} => [{}]", lp.principal, premises.join("; "));
        ensure(shape == left_shape, || format!("{name}_l: `{shape}`"))?;
        ensure((left.class == RuleClass::Initial) == initial, || format!("{name}_l class {:?}", left.class))?;
        let rp = right.pattern();
        ensure(rp.eigen.len() == eigens, || format!("{name}_r has {} eigen individuals", rp.eigen.len()))?;
        ensure(rp.premises.len() == 1 && rp.premises[0].to_string() == right_premise, || {
            format!("{name}_r premises {:?}", rp.premises.iter().map(|p| p.to_string()).collect::<Vec<_>>())
        })?;
        let _ = write!(summary, "{name} ");
    }
    Ok(format!("{}match", summary))
}

fn named_derivations() -> Outcome {
    let full = LanguageProfile::full();
    let calc = Calculus::for_profile(&full).map_err(|e| e.to_string())?;
    let kb = parse_kb("tbox: C sub (not C)\nabox: a:C\n", &full).map_err(|e| e.to_string())?;
    let mut cases: Vec<(String, Sequent)> = ["Trans(r), r(a,b), r(b,c) |- r(a,c)", "|- a = a", "|- (C and D) sub C"]
        .iter()
        .map(|t| Ok((t.to_string(), parse_sequent(t, &full).map_err(|e| e.to_string())?)))
        .collect::<Result<_, String>>()?;
    cases.push(("inconsistent KB".into(), kb.entails([])));
    let mut steps = Vec::new();
    for (label, s) in cases {
        let (out, stats) = dlsequent::prover::prove_with_stats(&s, &calc, Budget::steps(100)).map_err(|e| e.to_string())?;
        let SearchOutcome::Proved(t) = out else { return Err(format!("`{label}`: {}", out.verdict())) };
        check_proof(&t, &calc).map_err(|v| format!("`{label}`: {v:?}"))?;
        steps.push(format!("{label}: {} steps", stats.steps));
    }
    Ok(steps.join(", "))
}

fn oracle_self_check() -> Outcome {
    let defs = test_definitions();
    let profiles = rotating_profiles();
    let mut with_model = 0;
    for i in 0..50u64 {
        let mut g = Gen::new(0x0ac1e + i, profiles[i as usize % profiles.len()].clone()).with_vocabulary(2, 2, 1);
        let s = g.sequent(3, 1);
        let fast = find_countermodel(&s, 2, &defs).map_err(|e| e.to_string())?;
        let slow = reverse_enumeration_oracle(&s, 2, &defs);
        let fast_size = fast.as_ref().map(|m| m.domain.len() as u32);
        let slow_size = slow.as_ref().map(|(n, _)| *n);
        ensure(fast_size == slow_size, || format!("`{s}`: {fast_size:?} vs {slow_size:?}"))?;
        if let Some(m) = &fast {
            ensure(m.falsifies(&s, &defs) == Ok(true), || format!("`{s}`: returned model does not falsify"))?;
            with_model += 1;
        }
    }
    Ok(format!("50 sequents agree ({with_model} with a model, {} valid up to size 2)", 50 - with_model))
}

fn main() -> ExitCode {
    let (soundness, saturation) = soundness_and_saturation();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 ALC rule set and golden instances", alc_rule_set()),
        ("2 soundness against the model finder", soundness),
        ("3 countermodels at saturation", saturation),
        ("4 closure variant for Funct", funct_closure()),
        ("5 identity derivations", identity_derivations()),
        ("6 height-preserving transformations", structural_properties()),
        ("7 DDR compilation shapes", ddr_shapes()),
        ("8 named derivations", named_derivations()),
        ("9 model finder self-check", oracle_self_check()),
    ];
    let mut failed = 0;
    for (name, result) in &results {
        match result {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
