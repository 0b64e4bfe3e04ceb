//! Parsing, printing, profiles and the weight measure.

mod common;

use proptest::prelude::*;

use dlsequent::calculus::Definitions;
use dlsequent::syntax::{
    parse_concept, parse_formula, parse_kb, parse_sequent, Concept, Feature, Formula, Individual, KnowledgeBase,
    LanguageProfile, ParseError, Parser, RoleTerm, Sequent, Side,
};

use common::{full_with_user_relations, rotating_profiles, test_definitions, Gen};

fn reparse_formula(text: &str) -> Formula {
    let mut p = Parser::new(text).unwrap_or_else(|e| panic!("`{text}`: {e}"));
    let f = p.formula().unwrap_or_else(|e| panic!("`{text}`: {e}"));
    p.expect_end().unwrap_or_else(|e| panic!("`{text}`: {e}"));
    f
}

fn reparse_sequent(text: &str) -> Sequent {
    let mut p = Parser::new(text).unwrap_or_else(|e| panic!("`{text}`: {e}"));
    let s = p.sequent().unwrap_or_else(|e| panic!("`{text}`: {e}"));
    p.expect_end().unwrap_or_else(|e| panic!("`{text}`: {e}"));
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printed_formulae_parse_back(seed: u64, depth in 0usize..4) {
        let mut g = Gen::new(seed, full_with_user_relations());
        let f = g.formula(depth);
        prop_assert_eq!(reparse_formula(&f.to_string()), f);
    }

    #[test]
    fn printed_sequents_parse_back(seed: u64, which in 0usize..13) {
        let profile = rotating_profiles()[which].clone();
        let mut g = Gen::new(seed, profile.clone());
        let s = g.sequent(5, 2);
        let text = s.to_string();
        prop_assert_eq!(&reparse_sequent(&text), &s);
        prop_assert_eq!(parse_sequent(&text, &profile).expect("generated within profile"), s);
    }

    #[test]
    fn inferred_profile_admits_its_input(seed: u64) {
        let mut g = Gen::new(seed, full_with_user_relations());
        let s = g.sequent(5, 3);
        let inferred = LanguageProfile::infer(s.formulas().map(|(_, f)| f));
        prop_assert!(inferred.is_normalized());
        prop_assert!(inferred.check_sequent(&s).is_ok());
    }

    #[test]
    fn weight_drops_under_each_constructor(seed: u64) {
        let mut g = Gen::new(seed, LanguageProfile::full());
        let c = g.concept(3);
        let r = RoleTerm::named("r");
        for wrapped in [
            Concept::not(c.clone()),
            Concept::exists(r.clone(), c.clone()),
            Concept::forall(r.clone(), c.clone()),
            Concept::at_most(1, r.clone(), c.clone()),
            Concept::or(c.clone(), Concept::top()),
        ] {
            prop_assert!(wrapped.weight() > c.weight());
        }
    }

    #[test]
    fn sequent_order_does_not_matter(seed: u64) {
        let mut g = Gen::new(seed, LanguageProfile::full());
        let s = g.sequent(5, 1);
        let mut reversed = Sequent::new();
        let items: Vec<(Side, Formula)> = s.formulas().map(|(side, f)| (side, f.clone())).collect();
        for (side, f) in items.into_iter().rev() {
            reversed.push(side, f);
        }
        prop_assert_eq!(reversed, s);
    }
}

#[test]
fn grammar_examples() {
    let full = full_with_user_relations();
    for text in [
        "a:C",
        "a:not (C or D)",
        "a:some r all (inv s) {b}",
        "a:atmost 2 r (A and B)",
        "a:atleast 0 U top",
        "a:self r",
        "r;s;r(a,b)",
        "inv r(a,b)",
        "not r(a,b)",
        "a = b",
        "a != b",
        "C sub some r D",
        "r;s sub r",
        "Trans(r)",
        "Rel[Chain2](r,s,r)",
    ] {
        let f = parse_formula(text, &full).unwrap_or_else(|e| panic!("`{text}`: {e}"));
        assert_eq!(reparse_formula(&f.to_string()), f, "`{text}` prints as `{f}`");
    }
}

#[test]
fn internal_and_external_formulae() {
    let full = LanguageProfile::full();
    let f = |t: &str| parse_formula(t, &full).unwrap();
    assert!(f("a:C").is_internal());
    assert!(f("r(a,b)").is_external());
    assert!(f("C sub D").is_external());
    assert!(f("Trans(r)").is_external());
    let s = parse_sequent("C sub D, a:C |- a:D, r(a,b)", &full).unwrap();
    assert_eq!(s.ef_ante().len(), 1);
    assert_eq!(s.if_ante().len(), 1);
    assert_eq!(s.if_cons().len(), 1);
    assert_eq!(s.ef_cons().len(), 1);
}

#[test]
fn profile_violations_are_reported() {
    let alc = LanguageProfile::alc();
    for text in ["a:{b}", "a = b", "r;s(a,b)", "a:atmost 1 r top", "a:some (inv r) C", "a:self r", "Trans(r)"] {
        match parse_formula(text, &alc) {
            Err(ParseError::Profile(v)) => assert!(!v.requirement.is_empty(), "{text}"),
            other => panic!("`{text}` in ALC gave {other:?}"),
        }
    }
    let with_nominals = alc.clone().with(Feature::Nominals).normalized();
    assert!(with_nominals.has(Feature::Equality), "nominals need equality");
    assert!(parse_formula("a:{b}", &with_nominals).is_ok());
    let funct = alc.with(Feature::Functionality).normalized();
    assert!(funct.ddr_names.contains("Funct"));
}

#[test]
fn syntax_errors_carry_positions() {
    let full = LanguageProfile::full();
    for text in ["a:", "a:C |- |- b:D", "a:(C or", "C sub", "a:atmost r C", "r(a)"] {
        match parse_sequent(text, &full) {
            Err(ParseError::Syntax(e)) => assert!(e.column >= 1, "`{text}`: {e}"),
            other => panic!("`{text}` gave {other:?}"),
        }
    }
}

#[test]
fn profile_file_round_trip() {
    let text = "# a small profile\nnominals\ninverses\nddr Trans\nceiling 3\n";
    let p = LanguageProfile::parse_file(text).unwrap();
    assert!(p.has(Feature::Nominals) && p.has(Feature::Inverses) && p.has(Feature::Equality));
    assert_eq!(p.counting_ceiling, 3);
    assert!(p.ddr_names.contains("Trans"));
    assert_eq!(LanguageProfile::parse_file(&p.to_string()).unwrap(), p);
    assert!(LanguageProfile::parse_file("nominal\n").is_err());
    assert!(LanguageProfile::parse_file("ceiling many\n").is_err());
}

#[test]
fn knowledge_base_files() {
    let full = LanguageProfile::full();
    let kb = parse_kb(
        "# family\n\
         tbox: Parent sub some hasChild top\n\
         tbox: Trans(anc)\n\
         abox: ann:Parent\n\
         abox: hasChild(ann,bob)\n",
        &full,
    )
    .unwrap();
    assert_eq!(kb.tbox.len(), 2);
    assert_eq!(kb.abox.len(), 2);
    let goal = parse_formula("ann:some hasChild top", &full).unwrap();
    let s = kb.entails([goal.clone()]);
    assert_eq!(s.left().count(), 4);
    assert!(s.contains(Side::Right, &goal));

    let err = KnowledgeBase::parse_unchecked("tbox: a:C\n").unwrap_err();
    assert_eq!(err.line, 1);
    let err = KnowledgeBase::parse_unchecked("abox: a:C\nabox: C sub D\n").unwrap_err();
    assert_eq!(err.line, 2);
    assert!(KnowledgeBase::parse_unchecked("rbox: Trans(r)\n").is_err());
}

#[test]
fn definition_files() {
    let defs = test_definitions();
    assert_eq!(defs.arity("Trans"), Some((2, 1)));
    assert_eq!(defs.arity("Chain2"), Some((2, 2)));
    let mut extra = Definitions::builtin();
    assert!(extra.parse_file("def Bad(r): forall x . r(x,y) -> r(y,x)\n").is_err());
    assert!(extra.parse_file("def Loop(r): forall x . r(x,x) -> r(x,x)\n").is_ok());
}

#[test]
fn weight_of_external_formulae() {
    let profile = full_with_user_relations();
    let defs = test_definitions();
    let w = |t: &str| parse_formula(t, &profile).unwrap().weight(|n| defs.arity(n)).unwrap();
    assert_eq!(w("a:C"), 1);
    assert_eq!(w("a:{b}"), 2);
    assert_eq!(w("C sub not D"), 3);
    assert_eq!(w("r;s;r(a,b)"), 3);
    assert_eq!(w("r;s sub r"), 4);
    assert_eq!(w("a != b"), 2);
    assert_eq!(w("Trans(r)"), 4);
    assert_eq!(w("Rel[Chain2](r,s,r)"), 5);
    let unknown = Formula::Rra(dlsequent::syntax::sym("Nope"), vec![RoleTerm::named("r")]);
    assert!(unknown.weight(|n| defs.arity(n)).is_err());
}

#[test]
fn substitution_renames_everywhere() {
    let full = LanguageProfile::full();
    let f = parse_formula("a:some r {a}", &full).unwrap();
    let g = f.substitute(&Individual::named("a"), &Individual::named("b"));
    assert_eq!(g, parse_formula("b:some r {b}", &full).unwrap());
    let c = parse_concept("all r {a}", &full).unwrap();
    let mut inds = Default::default();
    c.individuals(&mut inds);
    assert!(inds.contains(&Individual::named("a")));
}
