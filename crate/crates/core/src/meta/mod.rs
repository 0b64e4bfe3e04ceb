//! Proof transformations: weakening, contraction, substitution, rule
//! inversion, and identity derivations for arbitrary formulae.
//!
//! Every operation takes checked proofs to checked proofs without increasing
//! height. Eigen individuals that would be captured are renamed to fresh
//! ones on the way down.

mod identity;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::calculus::{Binding, Calculus, Instance, Rule, RuleError, RuleSchema, Value};
use crate::prover::ProofTree;
use crate::syntax::{Formula, Individual, Sequent, Side, Symbol};

pub use identity::{derive_identity, identity_proof};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetaError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("the calculus has no rule `{0}`")]
    MissingRule(String),
    #[error("the proof has an open leaf")]
    OpenLeaf,
    #[error("`{formula}` does not occur twice on the {side:?} side of the conclusion")]
    NoDuplicate { side: Side, formula: Formula },
    #[error("rule `{0}` does not apply to the conclusion")]
    NotApplicable(String),
    #[error("rule `{schema}` has no premise {index}")]
    NoPremise { schema: String, index: usize },
}

/// A structural transformation of a proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransformKind {
    WeakenLeft(Vec<Formula>),
    WeakenRight(Vec<Formula>),
    /// Removes one copy of each listed formula, each of which must occur at
    /// least twice.
    ContractLeft(Vec<Formula>),
    ContractRight(Vec<Formula>),
    Substitute(Individual, Individual),
}

/// Source of eigen individuals unused anywhere in the proofs at hand.
struct Fresh(u32);

impl Fresh {
    fn above(trees: &[&ProofTree], extra: impl IntoIterator<Item = Individual>) -> Fresh {
        let mut max = 0;
        for t in trees {
            for node in t.preorder() {
                for a in node.conclusion.individuals() {
                    max = max.max(a.eigen_index().unwrap_or(0));
                }
                if let Some(r) = &node.rule {
                    for a in r.binding.individuals() {
                        max = max.max(a.eigen_index().unwrap_or(0));
                    }
                }
            }
        }
        for a in extra {
            max = max.max(a.eigen_index().unwrap_or(0));
        }
        Fresh(max + 1)
    }

    fn next(&mut self) -> Individual {
        self.0 += 1;
        Individual::eigen(self.0 - 1)
    }
}

fn schema_of<'c, 't>(t: &'t ProofTree, calc: &'c Calculus) -> Result<(&'c RuleSchema, &'t Binding), MetaError> {
    let label = t.rule.as_ref().ok_or(MetaError::OpenLeaf)?;
    let schema = calc.schema(&label.schema).ok_or_else(|| MetaError::MissingRule(label.schema.clone()))?;
    Ok((schema, &label.binding))
}

fn instance_of<'c>(t: &ProofTree, calc: &'c Calculus) -> Result<(&'c RuleSchema, Binding, Instance), MetaError> {
    let (schema, binding) = schema_of(t, calc)?;
    let inst = schema.instance(binding)?;
    Ok((schema, binding.clone(), inst))
}

fn plus(s: &Sequent, extra: &Sequent) -> Sequent {
    let mut out = s.clone();
    out.extend(extra);
    out
}

fn map_with(map: &BTreeMap<Individual, Individual>) -> impl Fn(&Individual) -> Individual + '_ {
    move |a| map.get(a).cloned().unwrap_or_else(|| a.clone())
}

// ---- weakening ---------------------------------------------------------

fn weaken_rec(t: &ProofTree, extra: &Sequent, calc: &Calculus, fresh: &mut Fresh) -> Result<ProofTree, MetaError> {
    let (schema, binding, inst) = instance_of(t, calc)?;
    let extra_inds = extra.individuals();
    let clash: BTreeMap<Individual, Individual> =
        inst.eigen.iter().filter(|e| extra_inds.contains(e)).map(|e| (e.clone(), fresh.next())).collect();
    let (binding, children) = if clash.is_empty() {
        (binding, t.children.clone())
    } else {
        let children = t.children.iter().map(|c| subst_rec(c, &clash, calc, fresh)).collect::<Result<Vec<_>, _>>()?;
        (binding.map_individuals(&map_with(&clash)), children)
    };
    let children = children.iter().map(|c| weaken_rec(c, extra, calc, fresh)).collect::<Result<Vec<_>, _>>()?;
    Ok(ProofTree::node(plus(&t.conclusion, extra), &schema.name, binding, children))
}

/// A proof of the conclusion extended by `extra`, of the same height.
pub fn weaken(t: &ProofTree, extra: &Sequent, calc: &Calculus) -> Result<ProofTree, MetaError> {
    let mut fresh = Fresh::above(&[t], extra.individuals());
    weaken_rec(t, extra, calc, &mut fresh)
}

// ---- substitution ------------------------------------------------------

fn subst_rec(
    t: &ProofTree,
    map: &BTreeMap<Individual, Individual>,
    calc: &Calculus,
    fresh: &mut Fresh,
) -> Result<ProofTree, MetaError> {
    let (schema, binding, inst) = instance_of(t, calc)?;
    let mut local = map.clone();
    for e in &inst.eigen {
        local.remove(e);
        if map.contains_key(e) || map.values().any(|v| v == e) {
            local.insert(e.clone(), fresh.next());
        }
    }
    let f = map_with(map);
    let children = t.children.iter().map(|c| subst_rec(c, &local, calc, fresh)).collect::<Result<Vec<_>, _>>()?;
    let binding = binding.map_individuals(&map_with(&local));
    Ok(ProofTree::node(t.conclusion.map_individuals(&f), &schema.name, binding, children))
}

/// A proof of the conclusion with individuals renamed simultaneously by
/// `map`, of the same height.
pub fn substitute_all(
    t: &ProofTree,
    map: &BTreeMap<Individual, Individual>,
    calc: &Calculus,
) -> Result<ProofTree, MetaError> {
    let mut fresh = Fresh::above(&[t], map.keys().chain(map.values()).cloned());
    subst_rec(t, map, calc, &mut fresh)
}

/// A proof of the conclusion with `from` replaced by `to`.
pub fn substitute(t: &ProofTree, from: &Individual, to: &Individual, calc: &Calculus) -> Result<ProofTree, MetaError> {
    substitute_all(t, &BTreeMap::from([(from.clone(), to.clone())]), calc)
}

// ---- inversion ---------------------------------------------------------

fn invert_rec(
    t: &ProofTree,
    schema: &RuleSchema,
    inst: &Instance,
    index: usize,
    calc: &Calculus,
    fresh: &mut Fresh,
) -> Result<ProofTree, MetaError> {
    let adds = &inst.premises[index];
    if inst.consumed.is_empty() {
        return weaken_rec(t, adds, calc, fresh);
    }
    let target = t.conclusion.minus(&inst.consumed).map(|s| plus(&s, adds)).ok_or_else(|| {
        MetaError::NotApplicable(schema.name.clone())
    })?;
    let (node_schema, node_binding, node_inst) = instance_of(t, calc)?;
    if t.children.is_empty() {
        // Initial rules never have a consumed formula as principal.
        return Ok(ProofTree::node(target, &node_schema.name, node_binding, Vec::new()));
    }
    if node_schema.name == schema.name && node_inst.consumed == inst.consumed {
        let rename: BTreeMap<Individual, Individual> =
            node_inst.eigen.iter().cloned().zip(inst.eigen.iter().cloned()).filter(|(a, b)| a != b).collect();
        let child = &t.children[index];
        return if rename.is_empty() { Ok(child.clone()) } else { subst_rec(child, &rename, calc, fresh) };
    }
    // Permute: invert below this node and re-apply it.
    let ours: std::collections::BTreeSet<&Individual> = inst.eigen.iter().collect();
    let clash: BTreeMap<Individual, Individual> =
        node_inst.eigen.iter().filter(|e| ours.contains(e)).map(|e| (e.clone(), fresh.next())).collect();
    let (node_binding, children) = if clash.is_empty() {
        (node_binding, t.children.clone())
    } else {
        let children = t.children.iter().map(|c| subst_rec(c, &clash, calc, fresh)).collect::<Result<Vec<_>, _>>()?;
        (node_binding.map_individuals(&map_with(&clash)), children)
    };
    let children = children
        .iter()
        .map(|c| invert_rec(c, schema, inst, index, calc, fresh))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProofTree::node(target, &node_schema.name, node_binding, children))
}

/// A proof of premise `index` of the application of `schema_name` at
/// `binding` to the conclusion of `t`. Eigen parameters in `binding` must be
/// absent from that conclusion.
pub fn invert_at(
    t: &ProofTree,
    schema_name: &str,
    binding: &Binding,
    index: usize,
    calc: &Calculus,
) -> Result<ProofTree, MetaError> {
    let schema = calc.schema(schema_name).ok_or_else(|| MetaError::MissingRule(schema_name.to_string()))?;
    let inst = schema.instance(binding)?;
    if index >= inst.premises.len() {
        return Err(MetaError::NoPremise { schema: schema_name.to_string(), index });
    }
    let present = t.conclusion.individuals();
    if inst.apply(&t.conclusion).is_none() || inst.eigen.iter().any(|e| present.contains(e)) {
        return Err(MetaError::NotApplicable(schema_name.to_string()));
    }
    let mut fresh = Fresh::above(&[t], binding.individuals());
    invert_rec(t, schema, &inst, index, calc, &mut fresh)
}

/// Inverts the first application of `schema_name` to the conclusion of `t`,
/// choosing fresh eigen individuals. Returns the binding used and the proof
/// of premise `index`.
pub fn invert(
    t: &ProofTree,
    schema_name: &str,
    index: usize,
    calc: &Calculus,
) -> Result<(Binding, ProofTree), MetaError> {
    let schema = calc.schema(schema_name).ok_or_else(|| MetaError::MissingRule(schema_name.to_string()))?;
    let domain = Calculus::generator_domain(&t.conclusion);
    let mut fresh = Fresh::above(&[t], domain.iter().cloned());
    for m in schema.matches(&t.conclusion, &domain) {
        let eigen: Vec<Individual> = (0..schema.eigen_count(&m)).map(|_| fresh.next()).collect();
        let binding = schema.with_eigen(&m, &eigen);
        let Ok(inst) = schema.instance(&binding) else { continue };
        if inst.apply(&t.conclusion).is_some() && index < inst.premises.len() {
            return Ok((binding.clone(), invert_at(t, schema_name, &binding, index, calc)?));
        }
    }
    Err(MetaError::NotApplicable(schema_name.to_string()))
}

// ---- contraction -------------------------------------------------------

/// For a descriptive-definition left rule, the schema and binding realizing
/// the same instance with every coinciding variable identified.
fn kernel_variant<'c>(schema: &RuleSchema, binding: &Binding, calc: &'c Calculus) -> Option<(&'c RuleSchema, Binding)> {
    let Rule::RelL(d) = &schema.rule else { return None };
    let vals = binding.get_inds("vars").ok()?;
    let value = |v: &Symbol| {
        let rep = d.representative(v);
        vals[d.vars.iter().position(|w| *w == rep).expect("representative is a schema variable")].clone()
    };
    let mut partition = BTreeMap::new();
    for (i, v) in d.def.vars.iter().enumerate() {
        let rep = d.def.vars[..=i].iter().find(|w| value(w) == value(v)).expect("v itself qualifies");
        partition.insert(v.clone(), rep.clone());
    }
    let variant = calc.ddr_left_for(&d.def.name, &partition)?;
    let Rule::RelL(vd) = &variant.rule else { return None };
    let new_vals: Vec<Individual> = vd.vars.iter().map(value).collect();
    Some((variant, binding.clone().set("vars", Value::Inds(new_vals))))
}

fn contract_rec(
    t: &ProofTree,
    side: Side,
    x: &Formula,
    calc: &Calculus,
    fresh: &mut Fresh,
) -> Result<ProofTree, MetaError> {
    let n_c = t.conclusion.count(side, x);
    if n_c < 2 {
        return Err(MetaError::NoDuplicate { side, formula: x.clone() });
    }
    let (schema, binding, inst) = instance_of(t, calc)?;
    let mut target = t.conclusion.clone();
    target.remove_one(side, x);
    let n_k = inst.consumed.count(side, x);
    if n_c - n_k >= 2 {
        let (schema, binding) = if inst.principal.count(side, x) > n_c - 1 {
            kernel_variant(schema, &binding, calc).ok_or_else(|| MetaError::MissingRule(format!("{}[closure]", schema.name)))?
        } else {
            (schema, binding)
        };
        let children = t.children.iter().map(|c| contract_rec(c, side, x, calc, fresh)).collect::<Result<Vec<_>, _>>()?;
        return Ok(ProofTree::node(target, &schema.name, binding, children));
    }
    // The rule consumes one of the two copies: invert each premise on the
    // other copy, merge the duplicated side formulae, and re-apply.
    let mut children = Vec::with_capacity(t.children.len());
    for (k, child) in t.children.iter().enumerate() {
        let eigen: Vec<Individual> = inst.eigen.iter().map(|_| fresh.next()).collect();
        let again = schema.with_eigen(&schema.match_key(&binding), &eigen);
        let again_inst = schema.instance(&again)?;
        let mut p = invert_rec(child, schema, &again_inst, k, calc, fresh)?;
        let back: BTreeMap<Individual, Individual> = eigen.iter().cloned().zip(inst.eigen.iter().cloned()).collect();
        if !back.is_empty() {
            p = subst_rec(&p, &back, calc, fresh)?;
        }
        for (s, f) in inst.premises[k].formulas() {
            p = contract_rec(&p, s, f, calc, fresh)?;
        }
        children.push(p);
    }
    Ok(ProofTree::node(target, &schema.name, binding, children))
}

/// A proof of the conclusion with one copy of `x` removed from `side`; `x`
/// must occur there at least twice.
pub fn contract(t: &ProofTree, side: Side, x: &Formula, calc: &Calculus) -> Result<ProofTree, MetaError> {
    let mut fresh = Fresh::above(&[t], x.individuals());
    contract_rec(t, side, x, calc, &mut fresh)
}

/// Applies a structural transformation.
pub fn transform(kind: &TransformKind, t: &ProofTree, calc: &Calculus) -> Result<ProofTree, MetaError> {
    match kind {
        TransformKind::WeakenLeft(fs) | TransformKind::WeakenRight(fs) => {
            let side = if matches!(kind, TransformKind::WeakenLeft(_)) { Side::Left } else { Side::Right };
            let mut extra = Sequent::new();
            fs.iter().for_each(|f| extra.push(side, f.clone()));
            weaken(t, &extra, calc)
        }
        TransformKind::ContractLeft(fs) | TransformKind::ContractRight(fs) => {
            let side = if matches!(kind, TransformKind::ContractLeft(_)) { Side::Left } else { Side::Right };
            let mut out = t.clone();
            for f in fs {
                out = contract(&out, side, f, calc)?;
            }
            Ok(out)
        }
        TransformKind::Substitute(from, to) => substitute(t, from, to, calc),
    }
}
