//! The evaluator, the bounded model finder and model extraction.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use dlsequent::calculus::{Calculus, Definitions};
use dlsequent::countermodel::{
    extract_model, find_countermodel, find_countermodel_with, Interpretation, ModelError, SearchLimits, Witness,
};
use dlsequent::prover::{prove, Budget, SearchOutcome};
use dlsequent::syntax::{parse_concept, parse_formula, parse_sequent, sym, Individual, LanguageProfile};

use common::{full_with_user_relations, reverse_enumeration_oracle, rotating_profiles, test_definitions, Gen};

/// Three elements: a=0, b=1, c=2 with r = {(0,1), (1,2), (0,2)}, s = {(1,1)},
/// A = {1, 2} and B = {2}.
fn sample() -> Interpretation {
    let mut m = Interpretation::with_domain(3);
    for (name, x) in [("a", 0), ("b", 1), ("c", 2)] {
        m.individuals.insert(Individual::named(name), x);
    }
    m.concepts.insert(sym("A"), BTreeSet::from([1, 2]));
    m.concepts.insert(sym("B"), BTreeSet::from([2]));
    m.roles.insert(sym("r"), BTreeSet::from([(0, 1), (1, 2), (0, 2)]));
    m.roles.insert(sym("s"), BTreeSet::from([(1, 1)]));
    m
}

#[test]
fn concept_extensions() {
    let m = sample();
    let profile = LanguageProfile::full();
    let ext = |t: &str| m.concept_ext(&parse_concept(t, &profile).unwrap()).unwrap();
    assert_eq!(ext("A"), BTreeSet::from([1, 2]));
    assert_eq!(ext("not A"), BTreeSet::from([0]));
    assert_eq!(ext("(A and not B)"), BTreeSet::from([1]));
    assert_eq!(ext("some r B"), BTreeSet::from([0, 1]));
    assert_eq!(ext("all r B"), BTreeSet::from([1, 2]));
    assert_eq!(ext("some (inv r) top"), BTreeSet::from([1, 2]));
    assert_eq!(ext("atleast 2 r A"), BTreeSet::from([0]));
    assert_eq!(ext("atmost 0 r top"), BTreeSet::from([2]));
    assert_eq!(ext("self s"), BTreeSet::from([1]));
    assert_eq!(ext("({c} or {a})"), BTreeSet::from([0, 2]));
    assert_eq!(ext("some U B"), BTreeSet::from([0, 1, 2]));
    assert_eq!(ext("bot"), BTreeSet::new());
}

#[test]
fn formula_satisfaction() {
    let m = sample();
    let profile = full_with_user_relations();
    let defs = test_definitions();
    let holds = |t: &str| m.satisfies(&parse_formula(t, &profile).unwrap(), &defs).unwrap().holds;
    assert!(holds("r;r(a,c)"));
    assert!(!holds("r;r(a,b)"));
    assert!(holds("inv r(c,b)"));
    assert!(holds("not r(b,a)"));
    assert!(holds("a != b"));
    assert!(holds("B sub A"));
    assert!(!holds("A sub B"));
    assert!(holds("Trans(r)"));
    assert!(!holds("Sym(r)"));
    assert!(holds("Funct(s)"));
    assert!(!holds("Funct(r)"));
    assert!(holds("r;r sub r"));
    assert!(holds("Irr(r)") && !holds("Irr(s)"));
    assert!(holds("Rel[Chain2](r,r,r)"));
}

#[test]
fn failures_come_with_witnesses() {
    let m = sample();
    let profile = full_with_user_relations();
    let defs = test_definitions();
    let report = m.satisfies(&parse_formula("A sub B", &profile).unwrap(), &defs).unwrap();
    assert!(!report.holds);
    assert_eq!(report.witness, Some(Witness::Element(1)));
    let report = m.satisfies(&parse_formula("Sym(r)", &profile).unwrap(), &defs).unwrap();
    assert!(!report.holds);
    assert!(report.witness.is_some());
}

#[test]
fn sequent_semantics() {
    let m = sample();
    let profile = LanguageProfile::full();
    let defs = Definitions::builtin();
    let s = |t: &str| parse_sequent(t, &profile).unwrap();
    assert!(m.falsifies(&s("a:some r A |- a:all r B"), &defs).unwrap());
    assert!(!m.falsifies(&s("a:some r A |- a:some r B"), &defs).unwrap());
    assert!(m.falsifies(&s("|-"), &defs).unwrap());
    assert!(!m.falsifies(&s("a:A |-"), &defs).unwrap());
    let unmapped = s("d:A |-");
    assert!(matches!(m.falsifies(&unmapped, &defs), Err(ModelError::UnmappedIndividual(_))));
}

#[test]
fn interpretations_round_trip_through_json() {
    let m = sample();
    assert_eq!(Interpretation::from_json(&m.to_json()).unwrap(), m);
    let bad = serde_json::json!({"domain": [0], "concepts": {"A": [3]}, "roles": {}, "individuals": {}});
    assert!(matches!(Interpretation::from_json(&bad), Err(ModelError::Malformed(_))));
}

#[test]
fn smallest_countermodels_are_found() {
    let profile = LanguageProfile::full();
    let defs = Definitions::builtin();
    let s = |t: &str| parse_sequent(t, &profile).unwrap();
    assert!(find_countermodel(&s("a:C |- a:C"), 3, &defs).unwrap().is_none());
    let m = find_countermodel(&s("|- a:C"), 3, &defs).unwrap().unwrap();
    assert_eq!(m.domain.len(), 1);
    let m = find_countermodel(&s("|- a = b"), 3, &defs).unwrap().unwrap();
    assert_eq!(m.domain.len(), 2);
    let m = find_countermodel(&s("|- a:atmost 1 r top"), 3, &defs).unwrap().unwrap();
    assert_eq!(m.domain.len(), 2);
    assert!(find_countermodel(&s("|- a:atmost 2 r top"), 2, &defs).unwrap().is_none());
}

#[test]
fn model_finder_limits() {
    let profile = full_with_user_relations();
    let s = parse_sequent("a:A, a:B, a:C, r(a,b), s(a,b) |- t(a,a)", &profile).unwrap();
    let err = find_countermodel_with(&s, 4, &Definitions::builtin(), SearchLimits { max_bits: 10 }).unwrap_err();
    assert!(matches!(err, ModelError::VocabularyTooLarge { limit: 10, .. }));
    let s = parse_sequent("Sym(r) |-", &profile).unwrap();
    assert!(matches!(find_countermodel(&s, 2, &Definitions::builtin()), Err(ModelError::UnknownRelation(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The pruned search and the plain reverse enumeration agree on whether
    /// a countermodel exists and on the smallest domain size.
    #[test]
    fn model_finder_matches_reverse_enumeration(seed: u64, which in 0usize..13) {
        let profile = rotating_profiles()[which].clone();
        let defs = test_definitions();
        let mut g = Gen::new(seed, profile).with_vocabulary(2, 2, 1);
        let s = g.sequent(3, 1);
        let found = find_countermodel(&s, 2, &defs).unwrap();
        let reference = reverse_enumeration_oracle(&s, 2, &defs);
        prop_assert_eq!(found.is_some(), reference.is_some(), "{}", s);
        if let (Some(m), Some((n, _))) = (found, reference) {
            prop_assert_eq!(m.domain.len() as u32, n);
            prop_assert!(m.falsifies(&s, &defs).unwrap());
        }
    }

    /// Models read off saturated branches falsify the root sequent.
    #[test]
    fn extracted_models_falsify_the_root(seed: u64, which in 0usize..13) {
        let profile = rotating_profiles()[which].clone();
        let defs = test_definitions();
        let calc = Calculus::assemble(&profile, &defs).unwrap();
        let mut g = Gen::new(seed, profile).with_vocabulary(3, 3, 2);
        let s = g.sequent(4, 2);
        if let SearchOutcome::Saturated(branch) = prove(&s, &calc, Budget::steps(1000)).unwrap() {
            let m = extract_model(&branch).unwrap();
            prop_assert!(m.falsifies(&s, &defs).unwrap(), "{} / {}", s, m.to_json());
        }
    }
}
