//! Finite interpretations: evaluation, extraction from saturated branches,
//! and a bounded finite-model search.

mod search;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{Atom, Definitions, DescriptiveDefinition};
use crate::prover::BranchState;
use crate::syntax::{Concept, Formula, Individual, ParseOptions, Parser, RoleTerm, Sequent, Symbol};

pub use search::{find_countermodel, find_countermodel_with, SearchLimits};

/// Domain elements are numbered from zero.
pub type Element = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("individual `{0}` is not interpreted")]
    UnmappedIndividual(Individual),
    #[error("no definition or built-in property for relation `{0}`")]
    UnknownRelation(Symbol),
    #[error("branch is not saturated: {0}")]
    NotSaturated(String),
    #[error("equality on the branch is not an equivalence: {0}")]
    NotEquivalence(String),
    #[error("vocabulary too large to enumerate: {bits} bits per interpretation exceeds the limit of {limit}")]
    VocabularyTooLarge { bits: usize, limit: usize },
    #[error("malformed interpretation: {0}")]
    Malformed(String),
}

/// A finite interpretation. Only atomic concepts and named roles are
/// stored; every other extension is computed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interpretation {
    pub domain: BTreeSet<Element>,
    pub concepts: BTreeMap<Symbol, BTreeSet<Element>>,
    pub roles: BTreeMap<Symbol, BTreeSet<(Element, Element)>>,
    pub individuals: BTreeMap<Individual, Element>,
}

/// What makes a formula hold or fail, when that is a particular element,
/// pair, or variable assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Element(Element),
    Pair(Element, Element),
    Tuple(Vec<Element>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatisfactionReport {
    pub formula: Formula,
    pub holds: bool,
    pub witness: Option<Witness>,
}

#[derive(Serialize, Deserialize)]
struct JsonInterpretation {
    domain: Vec<Element>,
    concepts: BTreeMap<String, Vec<Element>>,
    roles: BTreeMap<String, Vec<[Element; 2]>>,
    individuals: BTreeMap<String, Element>,
}

/// The built-in relations, checked directly rather than through their
/// definitions when the registered definition is the built-in one.
fn builtin_matches(def: &DescriptiveDefinition) -> bool {
    Definitions::builtin().get(&def.name).is_some_and(|b| b.as_ref() == def)
}

impl Interpretation {
    /// A domain of `size` elements with empty extensions.
    pub fn with_domain(size: u32) -> Self {
        Interpretation { domain: (0..size).collect(), ..Default::default() }
    }

    pub fn element(&self, a: &Individual) -> Result<Element, ModelError> {
        self.individuals.get(a).copied().ok_or_else(|| ModelError::UnmappedIndividual(a.clone()))
    }

    pub fn role_ext(&self, r: &RoleTerm) -> BTreeSet<(Element, Element)> {
        match r {
            RoleTerm::Named(n) => self.roles.get(n).cloned().unwrap_or_default(),
            RoleTerm::Inverse(n) => self.roles.get(n).map(|s| s.iter().map(|&(x, y)| (y, x)).collect()).unwrap_or_default(),
            RoleTerm::Universal => self.domain.iter().flat_map(|&x| self.domain.iter().map(move |&y| (x, y))).collect(),
            RoleTerm::Chain(parts) => {
                let mut acc: BTreeSet<(Element, Element)> = self.domain.iter().map(|&x| (x, x)).collect();
                for part in parts {
                    let step = self.role_ext(part);
                    acc = acc
                        .iter()
                        .flat_map(|&(x, y)| step.iter().filter(move |&&(u, _)| u == y).map(move |&(_, z)| (x, z)))
                        .collect();
                }
                acc
            }
        }
    }

    fn successors(&self, r: &RoleTerm, x: Element) -> BTreeSet<Element> {
        self.role_ext(r).into_iter().filter(|&(u, _)| u == x).map(|(_, y)| y).collect()
    }

    pub fn concept_ext(&self, c: &Concept) -> Result<BTreeSet<Element>, ModelError> {
        Ok(match c {
            Concept::Atomic(n) => self.concepts.get(n).cloned().unwrap_or_default(),
            Concept::Top => self.domain.clone(),
            Concept::Bottom => BTreeSet::new(),
            Concept::Not(p) => self.domain.difference(&self.concept_ext(p)?).copied().collect(),
            Concept::Or(p, q) => self.concept_ext(p)?.union(&self.concept_ext(q)?).copied().collect(),
            Concept::And(p, q) => self.concept_ext(p)?.intersection(&self.concept_ext(q)?).copied().collect(),
            Concept::Exists(r, p) => {
                let ps = self.concept_ext(p)?;
                self.domain.iter().copied().filter(|&x| self.successors(r, x).iter().any(|y| ps.contains(y))).collect()
            }
            Concept::Forall(r, p) => {
                let ps = self.concept_ext(p)?;
                self.domain.iter().copied().filter(|&x| self.successors(r, x).iter().all(|y| ps.contains(y))).collect()
            }
            Concept::Nominal(a) => BTreeSet::from([self.element(a)?]),
            Concept::AtMost(n, r, p) | Concept::AtLeast(n, r, p) => {
                let ps = self.concept_ext(p)?;
                let at_most = matches!(c, Concept::AtMost(..));
                self.domain
                    .iter()
                    .copied()
                    .filter(|&x| {
                        let count = self.successors(r, x).iter().filter(|y| ps.contains(y)).count();
                        if at_most {
                            count <= *n as usize
                        } else {
                            count >= *n as usize
                        }
                    })
                    .collect()
            }
            Concept::SelfLoop(r) => {
                let ext = self.role_ext(r);
                self.domain.iter().copied().filter(|&x| ext.contains(&(x, x))).collect()
            }
        })
    }

    fn report(f: &Formula, holds: bool, witness: Option<Witness>) -> SatisfactionReport {
        SatisfactionReport { formula: f.clone(), holds, witness }
    }

    /// Evaluates one formula. Relation axioms are read from `defs`.
    pub fn satisfies(&self, f: &Formula, defs: &Definitions) -> Result<SatisfactionReport, ModelError> {
        Ok(match f {
            Formula::Assert(a, p) => {
                let x = self.element(a)?;
                let holds = self.concept_ext(p)?.contains(&x);
                let witness = match p.as_ref() {
                    Concept::Exists(r, q) if holds => {
                        let qs = self.concept_ext(q)?;
                        self.successors(r, x).into_iter().find(|y| qs.contains(y)).map(Witness::Element)
                    }
                    Concept::Forall(r, q) if !holds => {
                        let qs = self.concept_ext(q)?;
                        self.successors(r, x).into_iter().find(|y| !qs.contains(y)).map(Witness::Element)
                    }
                    _ => None,
                };
                Self::report(f, holds, witness)
            }
            Formula::Gci(p, q) => {
                let qs = self.concept_ext(q)?;
                let bad = self.concept_ext(p)?.into_iter().find(|x| !qs.contains(x));
                Self::report(f, bad.is_none(), bad.map(Witness::Element))
            }
            Formula::Role(r, a, b) => {
                let pair = (self.element(a)?, self.element(b)?);
                Self::report(f, self.role_ext(r).contains(&pair), None)
            }
            Formula::NegRole(r, a, b) => {
                let pair = (self.element(a)?, self.element(b)?);
                Self::report(f, !self.role_ext(&RoleTerm::Named(r.clone())).contains(&pair), None)
            }
            Formula::Eq(a, b) => Self::report(f, self.element(a)? == self.element(b)?, None),
            Formula::Neq(a, b) => Self::report(f, self.element(a)? != self.element(b)?, None),
            Formula::Cria(lhs, r) => {
                let chain = RoleTerm::chain(lhs.iter().cloned()).map_err(|e| ModelError::Malformed(e.message))?;
                let target = self.role_ext(&RoleTerm::Named(r.clone()));
                let bad = self.role_ext(&chain).into_iter().find(|p| !target.contains(p));
                Self::report(f, bad.is_none(), bad.map(|(x, y)| Witness::Pair(x, y)))
            }
            Formula::Rra(name, args) => {
                let def = defs.get(name).ok_or_else(|| ModelError::UnknownRelation(name.clone()))?;
                let bad =
                    if builtin_matches(def) { self.builtin_violation(name, args) } else { self.definition_violation(def, args)? };
                Self::report(f, bad.is_none(), bad)
            }
        })
    }

    /// Direct property checks for the built-in relations.
    fn builtin_violation(&self, name: &str, args: &[RoleTerm]) -> Option<Witness> {
        let r = self.role_ext(&args[0]);
        let dom = &self.domain;
        match name {
            "Trans" => r.iter().find_map(|&(x, y)| {
                r.iter().filter(|&&(u, _)| u == y).find(|&&(_, z)| !r.contains(&(x, z))).map(|&(_, z)| Witness::Pair(x, z))
            }),
            "Refl" => dom.iter().find(|&&x| !r.contains(&(x, x))).map(|&x| Witness::Element(x)),
            "Irr" => r.iter().find(|&&(x, y)| x == y).map(|&(x, _)| Witness::Element(x)),
            "Asy" => r.iter().find(|&&(x, y)| r.contains(&(y, x))).map(|&(x, y)| Witness::Pair(x, y)),
            "Disj" => {
                let s = self.role_ext(&args[1]);
                r.intersection(&s).next().map(|&(x, y)| Witness::Pair(x, y))
            }
            "Funct" => r.iter().find_map(|&(x, y)| {
                r.iter().find(|&&(u, z)| u == x && z != y).map(|&(_, z)| Witness::Tuple(vec![x, y, z]))
            }),
            _ => unreachable!("only built-in names reach here"),
        }
    }

    /// Evaluates a definition's first-order sentence; returns a falsifying
    /// variable assignment if there is one.
    pub fn definition_violation(
        &self,
        def: &DescriptiveDefinition,
        args: &[RoleTerm],
    ) -> Result<Option<Witness>, ModelError> {
        if args.len() != def.roles.len() {
            return Err(ModelError::Malformed(format!("{} expects {} roles", def.name, def.roles.len())));
        }
        let exts: BTreeMap<&Symbol, BTreeSet<(Element, Element)>> =
            def.roles.iter().zip(args).map(|(p, r)| (p, self.role_ext(r))).collect();
        let dom: Vec<Element> = self.domain.iter().copied().collect();
        let m = def.vars.len();
        let mut assign = vec![0usize; m];
        if dom.is_empty() {
            return Ok(None);
        }
        loop {
            let val = |v: &Symbol| dom[assign[def.vars.iter().position(|w| w == v).expect("bound variable")]];
            let atom = |a: &Atom| match a {
                Atom::Role(p, x, y) => exts[p].contains(&(val(x), val(y))),
                Atom::Eq(x, y) => val(x) == val(y),
            };
            if def.antecedent.iter().all(atom) && !def.consequent.iter().any(atom) {
                return Ok(Some(Witness::Tuple(assign.iter().map(|&i| dom[i]).collect())));
            }
            let mut i = 0;
            loop {
                if i == m {
                    return Ok(None);
                }
                assign[i] += 1;
                if assign[i] < dom.len() {
                    break;
                }
                assign[i] = 0;
                i += 1;
            }
        }
    }

    /// The sequent holds unless every antecedent formula holds and every
    /// consequent formula fails.
    pub fn satisfies_sequent(&self, s: &Sequent, defs: &Definitions) -> Result<bool, ModelError> {
        for f in s.left() {
            if !self.satisfies(f, defs)?.holds {
                return Ok(true);
            }
        }
        for f in s.right() {
            if self.satisfies(f, defs)?.holds {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn falsifies(&self, s: &Sequent, defs: &Definitions) -> Result<bool, ModelError> {
        self.satisfies_sequent(s, defs).map(|b| !b)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = JsonInterpretation {
            domain: self.domain.iter().copied().collect(),
            concepts: self.concepts.iter().map(|(k, v)| (k.to_string(), v.iter().copied().collect())).collect(),
            roles: self.roles.iter().map(|(k, v)| (k.to_string(), v.iter().map(|&(x, y)| [x, y]).collect())).collect(),
            individuals: self.individuals.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        };
        serde_json::to_value(j).expect("interpretations serialize")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Interpretation, ModelError> {
        let j: JsonInterpretation =
            serde_json::from_value(value.clone()).map_err(|e| ModelError::Malformed(e.to_string()))?;
        let domain: BTreeSet<Element> = j.domain.into_iter().collect();
        let check = |x: &Element| {
            if domain.contains(x) {
                Ok(*x)
            } else {
                Err(ModelError::Malformed(format!("element {x} is not in the domain")))
            }
        };
        let mut out = Interpretation { domain: domain.clone(), ..Default::default() };
        for (k, v) in j.concepts {
            out.concepts.insert(k.as_str().into(), v.iter().map(check).collect::<Result<_, _>>()?);
        }
        for (k, v) in j.roles {
            out.roles.insert(k.as_str().into(), v.iter().map(|[x, y]| Ok((check(x)?, check(y)?))).collect::<Result<_, _>>()?);
        }
        for (k, v) in j.individuals {
            let mut p = Parser::with_options(&k, ParseOptions { allow_eigen: true })
                .map_err(|e| ModelError::Malformed(e.to_string()))?;
            let a = p.individual().map_err(|e| ModelError::Malformed(e.to_string()))?;
            out.individuals.insert(a, check(&v)?);
        }
        Ok(out)
    }
}

/// Builds the quotient interpretation of a saturated branch: elements are
/// the classes of branch individuals under the equalities in the
/// antecedent set, and atomic concepts and named roles hold exactly as
/// asserted there.
pub fn extract_model(b: &BranchState) -> Result<Interpretation, ModelError> {
    for f in &b.theta {
        let atomic = matches!(f, Formula::Assert(_, c) if matches!(c.as_ref(), Concept::Atomic(_)))
            || f.is_relational_atom();
        if atomic && b.omega.contains(f) {
            return Err(ModelError::NotSaturated(format!("`{f}` occurs on both sides")));
        }
    }
    let individuals: Vec<Individual> = b.individuals().into_iter().collect();
    let mut vocab_concepts = BTreeSet::new();
    let mut vocab_roles = BTreeSet::new();
    for f in b.theta.iter().chain(&b.omega) {
        f.concept_names(&mut vocab_concepts);
        f.role_names(&mut vocab_roles);
    }
    if individuals.is_empty() {
        let mut out = Interpretation::with_domain(1);
        out.concepts = vocab_concepts.into_iter().map(|c| (c, BTreeSet::new())).collect();
        out.roles = vocab_roles.into_iter().map(|r| (r, BTreeSet::new())).collect();
        return Ok(out);
    }

    let eq = |a: &Individual, c: &Individual| a == c || b.theta.contains(&Formula::Eq(a.clone(), c.clone()));
    for a in &individuals {
        for c in &individuals {
            if eq(a, c) && !eq(c, a) {
                return Err(ModelError::NotEquivalence(format!("{a} = {c} without {c} = {a}")));
            }
            for d in &individuals {
                if eq(a, c) && eq(c, d) && !eq(a, d) {
                    return Err(ModelError::NotEquivalence(format!("{a} = {c} and {c} = {d} without {a} = {d}")));
                }
            }
        }
    }
    let mut class: BTreeMap<Individual, Element> = BTreeMap::new();
    let mut next = 0;
    for a in &individuals {
        if class.contains_key(a) {
            continue;
        }
        for c in &individuals {
            if eq(a, c) {
                class.insert(c.clone(), next);
            }
        }
        next += 1;
    }

    let mut out = Interpretation::with_domain(next);
    out.concepts = vocab_concepts.into_iter().map(|c| (c, BTreeSet::new())).collect();
    out.roles = vocab_roles.into_iter().map(|r| (r, BTreeSet::new())).collect();
    for f in &b.theta {
        match f {
            Formula::Assert(a, c) => {
                if let Concept::Atomic(n) = c.as_ref() {
                    out.concepts.entry(n.clone()).or_default().insert(class[a]);
                }
            }
            Formula::Role(RoleTerm::Named(r), a, c) => {
                out.roles.entry(r.clone()).or_default().insert((class[a], class[c]));
            }
            _ => {}
        }
    }
    out.individuals = class;
    Ok(out)
}
