//! Rule assembly, compiled relation rules and rule application.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use dlsequent::calculus::{
    close_under_contraction, compile_ddr, Calculus, Definitions, RuleClass, RuleError, RuleKind, ALC_RULES,
};
use dlsequent::syntax::{parse_sequent, Feature, LanguageProfile};

use common::{def, full_with_user_relations, rotating_profiles, test_definitions, Gen};

#[path = "golden/render.rs"]
mod golden;

const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/alc_rules.txt");

/// Compares against the checked-in canonical instances. Set `UPDATE_GOLDEN=1`
/// to rewrite the file after an intended change.
#[test]
fn alc_instances_match_golden_file() {
    let calc = Calculus::for_profile(&LanguageProfile::alc()).unwrap();
    let rendered = golden::render(&calc);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(GOLDEN, &rendered).unwrap();
    }
    let expected = std::fs::read_to_string(GOLDEN).unwrap();
    for (got, want) in rendered.lines().zip(expected.lines()) {
        assert_eq!(got, want);
    }
    assert_eq!(rendered.lines().count(), expected.lines().count());
}

#[test]
fn alc_assembles_exactly_the_base_rules() {
    let calc = Calculus::for_profile(&LanguageProfile::alc()).unwrap();
    let names: BTreeSet<&str> = calc.schema_names().into_iter().collect();
    assert_eq!(names, ALC_RULES.into_iter().collect());
    let initial: BTreeSet<&str> =
        calc.schemas().iter().filter(|s| s.kind == RuleKind::Initial).map(|s| s.name.as_str()).collect();
    assert_eq!(initial, BTreeSet::from(["id_C", "id_R", "bot_l", "top_r"]));
    let eigen: BTreeSet<&str> =
        calc.schemas().iter().filter(|s| !s.eigen_params.is_empty()).map(|s| s.name.as_str()).collect();
    assert_eq!(eigen, BTreeSet::from(["sub_r", "exists_l", "forall_r"]));
}

#[test]
fn features_add_their_rules() {
    let alc = LanguageProfile::alc();
    let base: BTreeSet<String> = ALC_RULES.iter().map(|s| s.to_string()).collect();
    let added = |f: Feature| -> BTreeSet<String> {
        let calc = Calculus::for_profile(&alc.clone().with(f)).unwrap();
        calc.schema_names().into_iter().map(String::from).filter(|n| !base.contains(n)).collect()
    };
    let set = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    assert_eq!(added(Feature::Compose), set(&["comp_l", "comp_r", "cria_l", "cria_r"]));
    assert_eq!(added(Feature::Inverses), set(&["inv_l", "inv_inv_l", "inv_r", "inv_inv_r"]));
    assert_eq!(added(Feature::SelfConcept), set(&["self_l", "self_r"]));
    assert_eq!(added(Feature::UniversalRole), set(&["univ_l", "univ_r"]));
    assert_eq!(added(Feature::NegatedRoles), set(&["negrole_l", "negrole_r"]));
    let equality = set(&["eq_l", "eq_r", "rep1", "rep2", "euc"]);
    assert_eq!(added(Feature::Equality), equality);
    let nominals = added(Feature::Nominals);
    assert!(nominals.is_superset(&equality));
    assert!(nominals.is_superset(&set(&["nom_l1", "nom_l2", "nom_r1", "nom_r2"])));
    let funct = added(Feature::Functionality);
    assert!(funct.contains("Funct_l") && funct.contains("Funct_r") && funct.contains("Funct_l[c:=b]"));
}

#[test]
fn cyclic_order_follows_rule_classes() {
    for profile in rotating_profiles() {
        let calc = Calculus::assemble(&profile, &test_definitions()).unwrap();
        let classes: Vec<RuleClass> = calc.cyclic_order().map(|s| s.class).collect();
        assert!(classes.windows(2).all(|w| w[0] <= w[1]), "{profile}");
        assert_eq!(classes.len(), calc.schemas().len());
    }
}

#[test]
fn custom_order_must_list_every_rule_once() {
    let calc = Calculus::for_profile(&LanguageProfile::alc()).unwrap();
    let mut names: Vec<&str> = ALC_RULES.to_vec();
    names.reverse();
    let reordered = calc.clone().with_order(&names).unwrap();
    assert_eq!(reordered.cyclic_order().next().unwrap().name, "forall_r");
    assert!(matches!(calc.clone().with_order(&names[1..]), Err(RuleError::Order(_))));
    let mut twice = names.clone();
    twice[0] = "id_C";
    assert!(matches!(calc.clone().with_order(&twice), Err(RuleError::Order(_))));
    names[0] = "nope";
    assert!(matches!(calc.with_order(&names), Err(RuleError::UnknownSchema(_))));
}

#[test]
fn missing_definition_is_an_error() {
    let profile = LanguageProfile::alc().with_ddr("Sym");
    assert!(matches!(Calculus::for_profile(&profile), Err(RuleError::UndefinedRelation(_))));
    assert!(Calculus::assemble(&profile, &test_definitions()).is_ok());
}

#[test]
fn compiled_definitions_have_expected_shapes() {
    let profile = full_with_user_relations();
    let check = |seq: &str| parse_sequent(seq, &profile).unwrap_or_else(|e| panic!("{seq}: {e}"));

    let (left, right) = compile_ddr(&def("def Sym(r): forall x y . r(x,y) -> r(y,x)")).unwrap();
    let l = left.pattern();
    assert_eq!(l.principal, check("r(x,y), Sym(r) |-"));
    assert_eq!(l.premises, vec![check("r(y,x) |-")]);
    assert!(l.consumed.is_empty());
    let r = right.pattern();
    assert_eq!(r.consumed, check("|- Sym(r)"));
    assert_eq!(r.premises, vec![check("r(x,y) |- r(y,x)")]);
    assert_eq!(right.class, RuleClass::Eigen);

    let (left, _) = compile_ddr(&def("def Chain2(r,s,t): forall x y z . r(x,y) & s(y,z) -> t(x,z) | x = z")).unwrap();
    let l = left.pattern();
    assert_eq!(l.premises.len(), 2);
    assert_eq!(left.class, RuleClass::Branching);
}

#[test]
fn invalid_definitions_are_rejected() {
    for text in [
        "def Free(r): forall x . r(x,x) -> r(x,y)",
        "def Twice(r,r): forall x y . r(x,y) -> r(y,x)",
        "def Empty(r): forall x y . -> r(x,y)",
    ] {
        // Rejection may happen while parsing or while compiling.
        if let Ok(d) = dlsequent::calculus::DescriptiveDefinition::parse(text) {
            assert!(compile_ddr(&d).is_err(), "{text}");
        }
    }
}

#[test]
fn closure_under_contraction_is_idempotent() {
    let mut defs = Definitions::builtin();
    defs.parse_file(
        "def Sym(r): forall x y . r(x,y) -> r(y,x)\n\
         def Chain2(r,s,t): forall x y z . r(x,y) & s(y,z) -> t(x,z) | x = z\n",
    )
    .unwrap();
    for d in defs.iter() {
        let (left, _) = compile_ddr(d).unwrap();
        let once = close_under_contraction(&left);
        assert_eq!(once[0], left);
        let names: BTreeSet<String> = once.iter().map(|s| s.name.clone()).collect();
        assert_eq!(names.len(), once.len(), "{}: duplicate variants", d.name);
        let again: BTreeSet<String> =
            once.iter().flat_map(close_under_contraction).map(|s| s.name).collect();
        assert_eq!(again, names, "{}", d.name);
    }
}

#[test]
fn variants_merge_coinciding_principal_atoms() {
    let calc = Calculus::for_profile(&LanguageProfile::alc().with_ddr("Trans")).unwrap();
    let variants: Vec<&str> = calc.schema_names().into_iter().filter(|n| n.starts_with("Trans_l[")).collect();
    assert_eq!(variants, vec!["Trans_l[b:=a,c:=a]"]);
    let v = calc.schema("Trans_l[b:=a,c:=a]").unwrap().pattern();
    assert_eq!(v.principal.len(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every enumerated application keeps the unconsumed context in each
    /// premise, and its premises contain every formula the conclusion keeps.
    #[test]
    fn applications_preserve_context(seed: u64, which in 0usize..13) {
        let profile = rotating_profiles()[which].clone();
        let calc = Calculus::assemble(&profile, &test_definitions()).unwrap();
        let mut g = Gen::new(seed, profile);
        let s = g.sequent(4, 2);
        for app in calc.enumerate_applications(&s) {
            let schema = calc.schema(&app.schema).unwrap();
            let inst = schema.instance(&app.binding).unwrap();
            prop_assert!(s.includes(&inst.principal), "{} on {s}", app.schema);
            let rest = s.minus(&inst.consumed).unwrap();
            prop_assert_eq!(app.premises.len(), inst.premises.len());
            for p in &app.premises {
                prop_assert!(p.includes(&rest), "{} on {s}: premise {p}", app.schema);
            }
            for e in &inst.eigen {
                prop_assert!(!s.individuals().contains(e), "{}: eigen {e} not fresh", app.schema);
            }
        }
    }
}
