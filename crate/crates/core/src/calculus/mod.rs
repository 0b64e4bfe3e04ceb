//! Rule schemata, descriptive-definition compilation and calculus assembly.

mod binding;
mod ddr;
mod enumerate;
mod rules;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{Feature, Formula, LanguageProfile, Symbol, SyntaxError, WeightError};

pub use binding::{Binding, Value, ValueKind};
pub use ddr::{coarsens, partitions, Atom, DdrLeft, Definitions, DescriptiveDefinition};
pub use enumerate::{Application, Match};
pub use rules::{Counting, CriaShape, Instance, Rule, RuleClass, RuleKind, RuleSchema};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("invalid definition: {0}")]
    Definition(String),
    #[error("invalid rule binding: {0}")]
    Binding(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("no descriptive definition for relation `{0}`")]
    UndefinedRelation(Symbol),
    #[error("unknown rule schema `{0}`")]
    UnknownSchema(String),
    #[error("invalid cyclic order: {0}")]
    Order(String),
}

/// The names of the G3ALC rules, in declaration order.
pub const ALC_RULES: [&str; 18] = [
    "id_C", "id_R", "bot_l", "bot_r", "top_l", "top_r", "not_l", "not_r", "or_l", "or_r", "and_l", "and_r", "sub_l",
    "sub_r", "exists_l", "exists_r", "forall_l", "forall_r",
];

/// Compiles a definition into its left and right rule schemata.
pub fn compile_ddr(def: &DescriptiveDefinition) -> Result<(RuleSchema, RuleSchema), RuleError> {
    def.validate()?;
    let def = Arc::new(def.clone());
    let left = DdrLeft::base(&def);
    Ok((
        RuleSchema::new(&left.name(), Rule::RelL(Arc::new(left))),
        RuleSchema::new(&format!("{}_r", def.name), Rule::RelR(def)),
    ))
}

/// Completes a left DDR schema under the closure condition: the schema
/// itself plus, for every identification of its definition's variables that
/// makes principal atoms coincide, the variant with the duplicates merged.
///
/// Variants are always computed from the underlying definition, so closing
/// an already closed set yields the same set.
pub fn close_under_contraction(schema: &RuleSchema) -> Vec<RuleSchema> {
    let Rule::RelL(left) = &schema.rule else {
        return vec![schema.clone()];
    };
    let mut out = vec![schema.clone()];
    let mut seen: BTreeSet<String> = BTreeSet::from([schema.name.clone()]);
    for partition in partitions(&left.def.vars) {
        if let Some(variant) = DdrLeft::variant(&left.def, &partition) {
            let name = variant.name();
            if seen.insert(name.clone()) {
                out.push(RuleSchema::new(&name, Rule::RelL(Arc::new(variant))));
            }
        }
    }
    out
}

/// An assembled calculus: the rule schemata for a language profile together
/// with the cyclic order used by proof search.
#[derive(Clone, Debug)]
pub struct Calculus {
    profile: LanguageProfile,
    definitions: Definitions,
    schemas: Vec<RuleSchema>,
    order: Vec<usize>,
    by_name: BTreeMap<String, usize>,
}

impl Calculus {
    /// Assembles the rules for a profile. Every relation name enabled in the
    /// profile must have a definition in `defs`.
    pub fn assemble(profile: &LanguageProfile, defs: &Definitions) -> Result<Calculus, RuleError> {
        let mut profile = profile.clone().normalized();
        let mut enabled = Definitions::empty();
        for name in &profile.ddr_names {
            let def = defs.get(name).ok_or_else(|| RuleError::UndefinedRelation(name.clone()))?;
            def.validate()?;
            enabled.insert(def.as_ref().clone());
        }
        if enabled.iter().any(|d| d.uses_equality()) {
            profile.features.insert(Feature::Equality);
        }

        let mut schemas: Vec<RuleSchema> = Vec::new();
        let mut add = |name: &str, rule: Rule| schemas.push(RuleSchema::new(name, rule));
        add("id_C", Rule::IdC);
        add("id_R", Rule::IdR);
        add("bot_l", Rule::BotL);
        add("bot_r", Rule::BotR);
        add("top_l", Rule::TopL);
        add("top_r", Rule::TopR);
        add("not_l", Rule::NotL);
        add("not_r", Rule::NotR);
        add("or_l", Rule::OrL);
        add("or_r", Rule::OrR);
        add("and_l", Rule::AndL);
        add("and_r", Rule::AndR);
        add("sub_l", Rule::SubL);
        add("sub_r", Rule::SubR);
        add("exists_l", Rule::ExistsL);
        add("exists_r", Rule::ExistsR);
        add("forall_l", Rule::ForallL);
        add("forall_r", Rule::ForallR);

        let has = |f| profile.has(f);
        if has(Feature::Compose) || has(Feature::Crias) {
            add("comp_l", Rule::CompL);
            add("comp_r", Rule::CompR);
        }
        if has(Feature::Compose) || has(Feature::Rias) || has(Feature::Crias) {
            let shape = CriaShape {
                any: has(Feature::Crias),
                single: has(Feature::Rias),
                self_composition: has(Feature::Compose),
            };
            add("cria_l", Rule::CriaL(shape));
            add("cria_r", Rule::CriaR(shape));
        }
        if has(Feature::Nominals) {
            add("nom_l1", Rule::NomL1);
            add("nom_l2", Rule::NomL2);
            add("nom_r1", Rule::NomR1);
            add("nom_r2", Rule::NomR2);
        }
        if has(Feature::Inverses) {
            add("inv_l", Rule::InvL);
            add("inv_inv_l", Rule::InvInvL);
            add("inv_r", Rule::InvR);
            add("inv_inv_r", Rule::InvInvR);
        }
        if has(Feature::QualifiedCounting) {
            let c = Counting { qualified: true, exclude_top: has(Feature::UnqualifiedCounting) };
            add("atmost_l", Rule::AtMostL(c));
            add("atmost_r", Rule::AtMostR(c));
            add("atleast_l", Rule::AtLeastL(c));
            add("atleast_r", Rule::AtLeastR(c));
        }
        if has(Feature::UnqualifiedCounting) {
            let c = Counting { qualified: false, exclude_top: false };
            add("atmost_unq_l", Rule::AtMostL(c));
            add("atmost_unq_r", Rule::AtMostR(c));
            add("atleast_unq_l", Rule::AtLeastL(c));
            add("atleast_unq_r", Rule::AtLeastR(c));
        }
        if has(Feature::Equality) {
            add("eq_l", Rule::EqL);
            add("eq_r", Rule::EqR);
            add("rep1", Rule::Rep1);
            add("rep2", Rule::Rep2);
            add("euc", Rule::Euc);
        }
        if has(Feature::Inequality) {
            add("neq_l", Rule::NeqL);
            add("neq_r", Rule::NeqR);
        }
        if has(Feature::NegatedRoles) {
            add("negrole_l", Rule::NegRoleL);
            add("negrole_r", Rule::NegRoleR);
        }
        if has(Feature::UniversalRole) {
            add("univ_l", Rule::UnivL);
            add("univ_r", Rule::UnivR);
        }
        if has(Feature::SelfConcept) {
            add("self_l", Rule::SelfL);
            add("self_r", Rule::SelfR);
        }
        for def in enabled.iter() {
            let (left, right) = compile_ddr(def)?;
            schemas.extend(close_under_contraction(&left));
            schemas.push(right);
        }

        let by_name: BTreeMap<String, usize> = schemas.iter().enumerate().map(|(i, s)| (s.name.clone(), i)).collect();
        debug_assert_eq!(by_name.len(), schemas.len(), "schema names are unique");
        let mut order: Vec<usize> = (0..schemas.len()).collect();
        order.sort_by_key(|&i| (schemas[i].class, i));
        Ok(Calculus { profile, definitions: enabled, schemas, order, by_name })
    }

    /// The calculus for a profile using only the built-in definitions.
    pub fn for_profile(profile: &LanguageProfile) -> Result<Calculus, RuleError> {
        Self::assemble(profile, &Definitions::builtin())
    }

    /// Replaces the cyclic order; `names` must list every schema exactly once.
    pub fn with_order(mut self, names: &[&str]) -> Result<Calculus, RuleError> {
        let mut order = Vec::with_capacity(names.len());
        let mut seen = BTreeSet::new();
        for name in names {
            let idx = *self.by_name.get(*name).ok_or_else(|| RuleError::UnknownSchema(name.to_string()))?;
            if !seen.insert(idx) {
                return Err(RuleError::Order(format!("`{name}` listed twice")));
            }
            order.push(idx);
        }
        if order.len() != self.schemas.len() {
            let missing: Vec<&str> = (0..self.schemas.len())
                .filter(|i| !seen.contains(i))
                .map(|i| self.schemas[i].name.as_str())
                .collect();
            return Err(RuleError::Order(format!("missing {}", missing.join(", "))));
        }
        self.order = order;
        Ok(self)
    }

    pub fn profile(&self) -> &LanguageProfile {
        &self.profile
    }

    pub fn definitions(&self) -> &Definitions {
        &self.definitions
    }

    /// All schemata in declaration order.
    pub fn schemas(&self) -> &[RuleSchema] {
        &self.schemas
    }

    /// The schemata in cyclic order.
    pub fn cyclic_order(&self) -> impl Iterator<Item = &RuleSchema> + '_ {
        self.order.iter().map(|&i| &self.schemas[i])
    }

    pub fn schema(&self, name: &str) -> Option<&RuleSchema> {
        self.by_name.get(name).map(|&i| &self.schemas[i])
    }

    pub fn schema_names(&self) -> Vec<&str> {
        self.schemas.iter().map(|s| s.name.as_str()).collect()
    }

    /// The left schema for a definition under the given variable partition:
    /// the base schema for the discrete partition, otherwise the closure
    /// variant for exactly that partition, if one exists.
    pub fn ddr_left_for(&self, relation: &str, partition: &BTreeMap<Symbol, Symbol>) -> Option<&RuleSchema> {
        self.schemas.iter().find(|s| match &s.rule {
            Rule::RelL(d) => d.def.name.as_ref() == relation && &d.partition() == partition,
            _ => false,
        })
    }

    /// The weight of a formula, reading relation arities from the enabled
    /// definitions.
    pub fn weight(&self, f: &Formula) -> Result<usize, WeightError> {
        f.weight(|name| self.definitions.arity(name))
    }
}
