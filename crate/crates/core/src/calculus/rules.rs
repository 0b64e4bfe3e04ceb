//! Rule schemata and their instantiation.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::syntax::{Concept, Formula, Individual, RoleTerm, Sequent, Side};

use super::binding::{Binding, Value};
use super::ddr::{DdrLeft, DescriptiveDefinition};
use super::RuleError;

/// Which role inclusions the inclusion rules accept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CriaShape {
    /// Any `r1;...;rn sub r`.
    pub any: bool,
    /// Plain inclusions `r sub s`.
    pub single: bool,
    /// Transitivity-style `r;r sub r`.
    pub self_composition: bool,
}

impl CriaShape {
    pub fn admits(&self, lhs: &[RoleTerm], rhs: &crate::syntax::Symbol) -> bool {
        if self.any {
            return true;
        }
        match lhs {
            [_] => self.single,
            [RoleTerm::Named(a), RoleTerm::Named(b)] => self.self_composition && a == rhs && b == rhs,
            _ => false,
        }
    }
}

/// Variant of a number-restriction rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Counting {
    /// Qualified rules carry the `b : P` premises and formulae.
    pub qualified: bool,
    /// Qualified rules leave `⊤` fillers to the unqualified ones when both
    /// sets are present, so no formula is principal for two schemas.
    pub exclude_top: bool,
}

impl Counting {
    fn admits(&self, p: &Concept) -> bool {
        let top = matches!(p, Concept::Top);
        if self.qualified {
            !(self.exclude_top && top)
        } else {
            top
        }
    }
}

/// The behaviour of a schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    IdC,
    IdR,
    BotL,
    BotR,
    TopL,
    TopR,
    NotL,
    NotR,
    OrL,
    OrR,
    AndL,
    AndR,
    SubL,
    SubR,
    ExistsL,
    ExistsR,
    ForallL,
    ForallR,
    CompL,
    CompR,
    CriaL(CriaShape),
    CriaR(CriaShape),
    NomL1,
    NomL2,
    NomR1,
    NomR2,
    InvL,
    InvInvL,
    InvR,
    InvInvR,
    AtMostL(Counting),
    AtMostR(Counting),
    AtLeastL(Counting),
    AtLeastR(Counting),
    EqL,
    EqR,
    Rep1,
    Rep2,
    Euc,
    NeqL,
    NeqR,
    NegRoleL,
    NegRoleR,
    UnivL,
    UnivR,
    SelfL,
    SelfR,
    RelL(Arc<DdrLeft>),
    RelR(Arc<DescriptiveDefinition>),
}

/// Premise arity of a schema.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Initial,
    Unary,
    Binary,
    NAry,
}

/// Scheduling class, used for the default cyclic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleClass {
    /// Zero-premise rules.
    Initial,
    /// Rules with principal formulae and no eigenvariables, one premise.
    Propagation,
    /// Rules with principal formulae and no eigenvariables, several premises.
    Branching,
    /// Rules introducing eigenvariables.
    Eigen,
    /// Rules without principal formulae.
    Generator,
}

/// One concrete rule application shape: what the conclusion must contain,
/// what the premises drop, and what each premise adds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    /// Formulae that must occur in the conclusion (as a sided multiset).
    pub principal: Sequent,
    /// Formulae removed from the conclusion in every premise.
    pub consumed: Sequent,
    /// Formulae added in each premise.
    pub premises: Vec<Sequent>,
    /// Eigen individuals, which must be distinct and absent from the conclusion.
    pub eigen: Vec<Individual>,
}

impl Instance {
    fn new() -> Self {
        Instance { principal: Sequent::new(), consumed: Sequent::new(), premises: Vec::new(), eigen: Vec::new() }
    }

    fn keep(mut self, side: Side, f: Formula) -> Self {
        if !self.principal.contains(side, &f) {
            self.principal.push(side, f);
        }
        self
    }

    fn keep_all(mut self, side: Side, fs: impl IntoIterator<Item = Formula>) -> Self {
        for f in fs {
            self = self.keep(side, f);
        }
        self
    }

    fn take(mut self, side: Side, f: Formula) -> Self {
        self.principal.push(side, f.clone());
        self.consumed.push(side, f);
        self
    }

    fn premise(mut self, adds: impl IntoIterator<Item = (Side, Formula)>) -> Self {
        let mut s = Sequent::new();
        adds.into_iter().for_each(|(side, f)| s.push(side, f));
        self.premises.push(s);
        self
    }

    fn eigen(mut self, e: impl IntoIterator<Item = Individual>) -> Self {
        self.eigen.extend(e);
        self
    }

    /// The premise sequents for a conclusion; `None` when the principal
    /// formulae are not all present.
    pub fn apply(&self, conclusion: &Sequent) -> Option<Vec<Sequent>> {
        if !conclusion.includes(&self.principal) {
            return None;
        }
        let rest = conclusion.minus(&self.consumed)?;
        Some(
            self.premises
                .iter()
                .map(|adds| {
                    let mut p = rest.clone();
                    p.extend(adds);
                    p
                })
                .collect(),
        )
    }
}

/// A named rule schema of a calculus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSchema {
    pub name: String,
    pub kind: RuleKind,
    pub class: RuleClass,
    /// Metavariables that must be instantiated with fresh individuals.
    pub eigen_params: Vec<String>,
    pub rule: Rule,
}

fn pair(i: &[Individual]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in 0..i.len() {
        for y in x + 1..i.len() {
            out.push((x, y));
        }
    }
    out
}

fn split_chain(r: &RoleTerm) -> Result<(RoleTerm, RoleTerm), RuleError> {
    match r {
        RoleTerm::Chain(parts) if parts.len() >= 2 => {
            let (last, prefix) = parts.split_last().unwrap();
            Ok((RoleTerm::chain(prefix.iter().cloned()).map_err(|e| RuleError::Binding(e.message))?, last.clone()))
        }
        _ => Err(RuleError::Binding(format!("`{r}` is not a role chain"))),
    }
}

fn cria_chain(lhs: &[RoleTerm]) -> Result<RoleTerm, RuleError> {
    RoleTerm::chain(lhs.iter().cloned()).map_err(|e| RuleError::Binding(e.message))
}

fn named(r: &RoleTerm) -> Result<crate::syntax::Symbol, RuleError> {
    match r {
        RoleTerm::Named(s) => Ok(s.clone()),
        _ => Err(RuleError::Binding(format!("`{r}` must be a named role"))),
    }
}

impl RuleSchema {
    pub fn new(name: &str, rule: Rule) -> Self {
        let eigen_params: Vec<String> = match &rule {
            Rule::SubR | Rule::ExistsL | Rule::ForallR | Rule::CompL => vec!["b".into()],
            Rule::CriaR(_) => vec!["a".into(), "b".into()],
            Rule::AtMostR(_) | Rule::AtLeastL(_) => vec!["bs".into()],
            Rule::RelR(def) if !def.vars.is_empty() => vec!["vars".into()],
            _ => vec![],
        };
        let kind = match &rule {
            Rule::IdC | Rule::IdR | Rule::BotL | Rule::TopR | Rule::NomR2 | Rule::EqR | Rule::UnivR => RuleKind::Initial,
            Rule::OrL | Rule::AndR | Rule::SubL | Rule::CompR | Rule::CriaL(_) => RuleKind::Binary,
            Rule::AtMostL(_) | Rule::AtLeastR(_) => RuleKind::NAry,
            Rule::RelL(d) => match d.consequent.len() {
                0 => RuleKind::Initial,
                1 => RuleKind::Unary,
                2 => RuleKind::Binary,
                _ => RuleKind::NAry,
            },
            _ => RuleKind::Unary,
        };
        let class = match &rule {
            _ if kind == RuleKind::Initial => RuleClass::Initial,
            Rule::BotR | Rule::TopL | Rule::NomL2 | Rule::EqL | Rule::UnivL => RuleClass::Generator,
            _ if !eigen_params.is_empty() => RuleClass::Eigen,
            _ if kind == RuleKind::Unary => RuleClass::Propagation,
            _ => RuleClass::Branching,
        };
        RuleSchema { name: name.to_string(), kind, class, eigen_params, rule }
    }

    /// Whether some instance of this schema has no premises.
    pub fn may_close(&self) -> bool {
        self.kind == RuleKind::Initial
            || matches!(self.rule, Rule::AtLeastR(_))
            || matches!(self.rule, Rule::AtMostL(c) if !c.qualified)
    }

    /// Number of eigen individuals a match needs.
    pub fn eigen_count(&self, binding: &Binding) -> usize {
        match &self.rule {
            Rule::SubR | Rule::ExistsL | Rule::ForallR | Rule::CompL => 1,
            Rule::CriaR(_) => 2,
            Rule::AtMostR(_) => binding.get_num("n").map(|n| n as usize + 1).unwrap_or(0),
            Rule::AtLeastL(_) => binding.get_num("n").map(|n| n as usize).unwrap_or(0),
            Rule::RelR(def) => def.vars.len(),
            _ => 0,
        }
    }

    /// Completes a match with the given fresh individuals for the eigen
    /// parameters.
    pub fn with_eigen(&self, binding: &Binding, fresh: &[Individual]) -> Binding {
        let mut b = binding.clone();
        match &self.rule {
            Rule::SubR | Rule::ExistsL | Rule::ForallR | Rule::CompL => b = b.ind("b", &fresh[0]),
            Rule::CriaR(_) => b = b.ind("a", &fresh[0]).ind("b", &fresh[1]),
            Rule::AtMostR(_) | Rule::AtLeastL(_) => b = b.set("bs", Value::Inds(fresh.to_vec())),
            Rule::RelR(def) if !def.vars.is_empty() => b = b.set("vars", Value::Inds(fresh.to_vec())),
            _ => {}
        }
        b
    }

    /// The binding with its eigen parameters removed; identifies a match.
    pub fn match_key(&self, binding: &Binding) -> Binding {
        binding.without(&self.eigen_params)
    }

    /// Instantiates the schema.
    pub fn instance(&self, b: &Binding) -> Result<Instance, RuleError> {
        use Side::{Left as L, Right as R};
        let assert = |a: &Individual, p: Arc<Concept>| Formula::Assert(a.clone(), p);
        let bad = |msg: &str| Err(RuleError::Binding(format!("{}: {msg}", self.name)));
        let inst = Instance::new();
        Ok(match &self.rule {
            Rule::IdC => {
                let (a, c) = (b.get_ind("a")?, b.get_concept("C")?);
                if !c.is_atomic() {
                    return bad("the identity concept must be atomic");
                }
                inst.keep(L, assert(a, c.clone())).keep(R, assert(a, c.clone()))
            }
            Rule::IdR => {
                let f = b.get_formula("F")?;
                if !f.is_relational_atom() {
                    return bad("F must be of the form r(a,b) or a ≈ b");
                }
                inst.keep(L, f.clone()).keep(R, f.clone())
            }
            Rule::BotL => inst.keep(L, assert(b.get_ind("a")?, Concept::bottom())),
            Rule::BotR => inst.premise([(R, assert(b.get_ind("a")?, Concept::bottom()))]),
            Rule::TopL => inst.premise([(L, assert(b.get_ind("a")?, Concept::top()))]),
            Rule::TopR => inst.keep(R, assert(b.get_ind("a")?, Concept::top())),
            Rule::NotL | Rule::NotR => {
                let (a, p) = (b.get_ind("a")?, b.get_concept("P")?);
                let side = if self.rule == Rule::NotL { L } else { R };
                inst.take(side, assert(a, Concept::not(p.clone()))).premise([(side.flip(), assert(a, p.clone()))])
            }
            Rule::OrL | Rule::OrR | Rule::AndL | Rule::AndR => {
                let (a, p, q) = (b.get_ind("a")?, b.get_concept("P")?, b.get_concept("Q")?);
                let (side, whole) = match self.rule {
                    Rule::OrL => (L, Concept::or(p.clone(), q.clone())),
                    Rule::OrR => (R, Concept::or(p.clone(), q.clone())),
                    Rule::AndL => (L, Concept::and(p.clone(), q.clone())),
                    _ => (R, Concept::and(p.clone(), q.clone())),
                };
                let inst = inst.take(side, assert(a, whole));
                let (fp, fq) = ((side, assert(a, p.clone())), (side, assert(a, q.clone())));
                if matches!(self.rule, Rule::OrL | Rule::AndR) {
                    inst.premise([fp]).premise([fq])
                } else {
                    inst.premise([fp, fq])
                }
            }
            Rule::SubL => {
                let (a, p, q) = (b.get_ind("a")?, b.get_concept("P")?, b.get_concept("Q")?);
                inst.keep(L, Formula::Gci(p.clone(), q.clone()))
                    .premise([(R, assert(a, p.clone()))])
                    .premise([(L, assert(a, q.clone()))])
            }
            Rule::SubR => {
                let (p, q, e) = (b.get_concept("P")?, b.get_concept("Q")?, b.get_ind("b")?);
                inst.take(R, Formula::Gci(p.clone(), q.clone()))
                    .premise([(L, assert(e, p.clone())), (R, assert(e, q.clone()))])
                    .eigen([e.clone()])
            }
            Rule::ExistsL | Rule::ExistsR | Rule::ForallL | Rule::ForallR => {
                let (a, r, p, c) = (b.get_ind("a")?, b.get_role("r")?, b.get_concept("P")?, b.get_ind("b")?);
                if r.is_chain() {
                    return bad("quantified roles must not be chains");
                }
                let edge = Formula::Role(r.clone(), a.clone(), c.clone());
                match self.rule {
                    Rule::ExistsL => inst
                        .take(L, assert(a, Concept::exists(r.clone(), p.clone())))
                        .premise([(L, edge), (L, assert(c, p.clone()))])
                        .eigen([c.clone()]),
                    Rule::ExistsR => inst
                        .keep(L, edge)
                        .keep(R, assert(a, Concept::exists(r.clone(), p.clone())))
                        .premise([(R, assert(c, p.clone()))]),
                    Rule::ForallL => inst
                        .keep(L, edge)
                        .keep(L, assert(a, Concept::forall(r.clone(), p.clone())))
                        .premise([(L, assert(c, p.clone()))]),
                    _ => inst
                        .take(R, assert(a, Concept::forall(r.clone(), p.clone())))
                        .premise([(L, edge), (R, assert(c, p.clone()))])
                        .eigen([c.clone()]),
                }
            }
            Rule::CompL | Rule::CompR => {
                let (r, a, c, m) = (b.get_role("R")?, b.get_ind("a")?, b.get_ind("c")?, b.get_ind("b")?);
                let (prefix, last) = split_chain(r)?;
                let whole = Formula::Role(r.clone(), a.clone(), c.clone());
                let first = Formula::Role(prefix, a.clone(), m.clone());
                let second = Formula::Role(last, m.clone(), c.clone());
                if self.rule == Rule::CompL {
                    inst.take(L, whole).premise([(L, first), (L, second)]).eigen([m.clone()])
                } else {
                    inst.keep(R, whole).premise([(R, first)]).premise([(R, second)])
                }
            }
            Rule::CriaL(shape) | Rule::CriaR(shape) => {
                let (lhs, r, a, c) = (b.get_roles("lhs")?, b.get_role("r")?, b.get_ind("a")?, b.get_ind("b")?);
                let r = named(r)?;
                if lhs.is_empty() || lhs.iter().any(RoleTerm::is_chain) {
                    return bad("malformed inclusion");
                }
                if !shape.admits(lhs, &r) {
                    return bad("inclusion shape not admitted by this calculus");
                }
                let f = Formula::Cria(lhs.to_vec(), r.clone());
                let chain = Formula::Role(cria_chain(lhs)?, a.clone(), c.clone());
                let head = Formula::Role(RoleTerm::Named(r), a.clone(), c.clone());
                if matches!(self.rule, Rule::CriaL(_)) {
                    inst.keep(L, f).premise([(R, chain)]).premise([(L, head)])
                } else {
                    inst.take(R, f).premise([(L, chain), (R, head)]).eigen([a.clone(), c.clone()])
                }
            }
            Rule::NomL1 | Rule::NomR1 => {
                let (a, n) = (b.get_ind("a")?, b.get_ind("b")?);
                let side = if self.rule == Rule::NomL1 { L } else { R };
                inst.keep(side, assert(a, Concept::nominal(n.clone())))
                    .premise([(side, Formula::Eq(a.clone(), n.clone()))])
            }
            Rule::NomL2 => {
                let n = b.get_ind("b")?;
                inst.premise([(L, assert(n, Concept::nominal(n.clone())))])
            }
            Rule::NomR2 => {
                let n = b.get_ind("b")?;
                inst.keep(R, assert(n, Concept::nominal(n.clone())))
            }
            Rule::InvL | Rule::InvInvL | Rule::InvR | Rule::InvInvR => {
                let (r, a, c) = (b.get_role("r")?, b.get_ind("a")?, b.get_ind("b")?);
                let r = named(r)?;
                let (from, to) = match self.rule {
                    Rule::InvL | Rule::InvR => (RoleTerm::Named(r.clone()), RoleTerm::Inverse(r)),
                    _ => (RoleTerm::Inverse(r.clone()), RoleTerm::Named(r)),
                };
                let side = if matches!(self.rule, Rule::InvL | Rule::InvInvL) { L } else { R };
                inst.keep(side, Formula::Role(from, a.clone(), c.clone()))
                    .premise([(side, Formula::Role(to, c.clone(), a.clone()))])
            }
            Rule::AtMostL(c) | Rule::AtMostR(c) | Rule::AtLeastL(c) | Rule::AtLeastR(c) => {
                let (a, n, r, p, bs) =
                    (b.get_ind("a")?, b.get_num("n")?, b.get_role("r")?, b.get_concept("P")?, b.get_inds("bs")?);
                if !c.admits(p) {
                    return bad("filler concept not handled by this schema");
                }
                if r.is_chain() {
                    return bad("counted roles must not be chains");
                }
                let at_most = matches!(self.rule, Rule::AtMostL(_) | Rule::AtMostR(_));
                let expected = if at_most { n as usize + 1 } else { n as usize };
                if bs.len() != expected {
                    return bad("wrong number of successor individuals");
                }
                let whole = if at_most {
                    Concept::at_most(n, r.clone(), p.clone())
                } else {
                    Concept::at_least(n, r.clone(), p.clone())
                };
                let edges: Vec<Formula> = bs.iter().map(|x| Formula::Role(r.clone(), a.clone(), x.clone())).collect();
                let fills: Vec<Formula> = bs.iter().map(|x| assert(x, p.clone())).collect();
                let eqs: Vec<Formula> =
                    pair(bs).into_iter().map(|(i, j)| Formula::Eq(bs[i].clone(), bs[j].clone())).collect();
                match self.rule {
                    Rule::AtMostL(_) | Rule::AtLeastR(_) => {
                        let side = if at_most { L } else { R };
                        let mut inst = inst.keep_all(L, edges).keep(side, assert(a, whole));
                        if c.qualified {
                            for f in fills {
                                inst = inst.premise([(R, f)]);
                            }
                        }
                        for e in eqs {
                            inst = inst.premise([(L, e)]);
                        }
                        inst
                    }
                    _ => {
                        let side = if at_most { R } else { L };
                        let mut adds: Vec<(Side, Formula)> = edges.into_iter().map(|f| (L, f)).collect();
                        if c.qualified {
                            adds.extend(fills.into_iter().map(|f| (L, f)));
                        }
                        adds.extend(eqs.into_iter().map(|f| (R, f)));
                        let distinct: BTreeSet<&Individual> = bs.iter().collect();
                        if distinct.len() != bs.len() {
                            return bad("eigen individuals must be distinct");
                        }
                        inst.take(side, assert(a, whole)).premise(adds).eigen(bs.iter().cloned())
                    }
                }
            }
            Rule::EqL => {
                let a = b.get_ind("a")?;
                inst.premise([(L, Formula::Eq(a.clone(), a.clone()))])
            }
            Rule::EqR => {
                let a = b.get_ind("a")?;
                inst.keep(R, Formula::Eq(a.clone(), a.clone()))
            }
            Rule::Rep1 => {
                let (a, c, concept) = (b.get_ind("a")?, b.get_ind("b")?, b.get_concept("C")?);
                if !concept.is_atomic() {
                    return bad("replacement applies to atomic concepts");
                }
                inst.keep(L, Formula::Eq(a.clone(), c.clone()))
                    .keep(L, assert(a, concept.clone()))
                    .premise([(L, assert(c, concept.clone()))])
            }
            Rule::Rep2 => {
                let (a, c, f, pos) = (b.get_ind("a")?, b.get_ind("b")?, b.get_formula("F")?, b.get_num("pos")?);
                let replaced = match (f, pos) {
                    (Formula::Role(r, x, y), 0) if x == a && !r.is_chain() => {
                        Formula::Role(r.clone(), c.clone(), y.clone())
                    }
                    (Formula::Role(r, x, y), 1) if y == a && !r.is_chain() => {
                        Formula::Role(r.clone(), x.clone(), c.clone())
                    }
                    (Formula::Eq(x, y), 0) if x == a => Formula::Eq(c.clone(), y.clone()),
                    (Formula::Eq(x, y), 1) if y == a => Formula::Eq(x.clone(), c.clone()),
                    _ => return bad("F must be a role assertion or equality with the replaced individual at `pos`"),
                };
                inst.keep(L, Formula::Eq(a.clone(), c.clone())).keep(L, f.clone()).premise([(L, replaced)])
            }
            Rule::Euc => {
                let (a, x, y) = (b.get_ind("a")?, b.get_ind("b")?, b.get_ind("c")?);
                inst.keep(L, Formula::Eq(a.clone(), x.clone()))
                    .keep(L, Formula::Eq(a.clone(), y.clone()))
                    .premise([(L, Formula::Eq(x.clone(), y.clone()))])
            }
            Rule::NeqL | Rule::NeqR => {
                let (a, c) = (b.get_ind("a")?, b.get_ind("b")?);
                let side = if self.rule == Rule::NeqL { L } else { R };
                inst.take(side, Formula::Neq(a.clone(), c.clone()))
                    .premise([(side.flip(), Formula::Eq(a.clone(), c.clone()))])
            }
            Rule::NegRoleL | Rule::NegRoleR => {
                let (r, a, c) = (b.get_role("r")?, b.get_ind("a")?, b.get_ind("b")?);
                let r = named(r)?;
                let side = if self.rule == Rule::NegRoleL { L } else { R };
                inst.take(side, Formula::NegRole(r.clone(), a.clone(), c.clone()))
                    .premise([(side.flip(), Formula::Role(RoleTerm::Named(r), a.clone(), c.clone()))])
            }
            Rule::UnivL => {
                let (a, c) = (b.get_ind("a")?, b.get_ind("b")?);
                inst.premise([(L, Formula::Role(RoleTerm::Universal, a.clone(), c.clone()))])
            }
            Rule::UnivR => {
                let (a, c) = (b.get_ind("a")?, b.get_ind("b")?);
                inst.keep(R, Formula::Role(RoleTerm::Universal, a.clone(), c.clone()))
            }
            Rule::SelfL | Rule::SelfR => {
                let (a, r) = (b.get_ind("a")?, b.get_role("r")?);
                if r.is_chain() {
                    return bad("self restrictions take a single role");
                }
                let side = if self.rule == Rule::SelfL { L } else { R };
                inst.take(side, assert(a, Concept::self_loop(r.clone())))
                    .premise([(side, Formula::Role(r.clone(), a.clone(), a.clone()))])
            }
            Rule::RelL(d) => {
                let (args, vals) = (b.get_roles("roles")?, b.get_inds("vars")?);
                let assign = assignment(&d.vars, vals, &d.def.name)?;
                check_args(&d.def, args)?;
                let mut inst = Instance::new();
                inst.principal.push(L, Formula::Rra(d.def.name.clone(), args.to_vec()));
                // Atoms that coincide once the roles are fixed, as in Disj(r,r),
                // are needed only once.
                let mut atoms = BTreeSet::new();
                for atom in &d.antecedent {
                    let f = d.def.instantiate(atom, args, &assign)?;
                    if atoms.insert(f.clone()) {
                        inst.principal.push(L, f);
                    }
                }
                for atom in &d.consequent {
                    inst = inst.premise([(L, d.def.instantiate(atom, args, &assign)?)]);
                }
                inst
            }
            Rule::RelR(def) => {
                let args = b.get_roles("roles")?;
                check_args(def, args)?;
                let vals: &[Individual] = if def.vars.is_empty() { &[] } else { b.get_inds("vars")? };
                let assign = assignment(&def.vars, vals, &def.name)?;
                let distinct: BTreeSet<&Individual> = vals.iter().collect();
                if distinct.len() != vals.len() {
                    return bad("eigen individuals must be distinct");
                }
                let mut adds = Vec::new();
                for atom in &def.antecedent {
                    adds.push((L, def.instantiate(atom, args, &assign)?));
                }
                for atom in &def.consequent {
                    adds.push((R, def.instantiate(atom, args, &assign)?));
                }
                inst.take(R, Formula::Rra(def.name.clone(), args.to_vec())).premise(adds).eigen(vals.iter().cloned())
            }
        })
    }

    /// A binding over placeholder names, showing the schema's shape.
    pub fn generic_binding(&self) -> Binding {
        let ind = |s: &str| Individual::named(s);
        let p = Concept::atomic("P");
        let q = Concept::atomic("Q");
        let r = RoleTerm::named("r");
        let b = Binding::new();
        match &self.rule {
            Rule::IdC => b.ind("a", &ind("a")).concept("C", &Concept::atomic("C")),
            Rule::IdR => b.set("F", Value::Formula(Formula::Role(r, ind("a"), ind("b")))),
            Rule::BotL | Rule::BotR | Rule::TopL | Rule::TopR | Rule::EqL | Rule::EqR => b.ind("a", &ind("a")),
            Rule::NotL | Rule::NotR => b.ind("a", &ind("a")).concept("P", &p),
            Rule::OrL | Rule::OrR | Rule::AndL | Rule::AndR | Rule::SubL => {
                b.ind("a", &ind("a")).concept("P", &p).concept("Q", &q)
            }
            Rule::SubR => b.concept("P", &p).concept("Q", &q).ind("b", &ind("b")),
            Rule::ExistsL | Rule::ExistsR | Rule::ForallL | Rule::ForallR => {
                b.ind("a", &ind("a")).role("r", &r).concept("P", &p).ind("b", &ind("b"))
            }
            Rule::CompL | Rule::CompR => b
                .role("R", &RoleTerm::Chain(vec![r, RoleTerm::named("s")]))
                .ind("a", &ind("a"))
                .ind("b", &ind("b"))
                .ind("c", &ind("c")),
            Rule::CriaL(shape) | Rule::CriaR(shape) => {
                let lhs = if shape.any || !shape.single {
                    vec![r.clone(), r.clone()]
                } else {
                    vec![RoleTerm::named("s")]
                };
                b.set("lhs", Value::Roles(lhs)).role("r", &r).ind("a", &ind("a")).ind("b", &ind("b"))
            }
            Rule::NomL1 | Rule::NomR1 | Rule::UnivL | Rule::UnivR => b.ind("a", &ind("a")).ind("b", &ind("b")),
            Rule::NomL2 | Rule::NomR2 => b.ind("b", &ind("b")),
            Rule::InvL | Rule::InvInvL | Rule::InvR | Rule::InvInvR | Rule::NegRoleL | Rule::NegRoleR => {
                b.role("r", &r).ind("a", &ind("a")).ind("b", &ind("b"))
            }
            Rule::AtMostL(c) | Rule::AtMostR(c) | Rule::AtLeastL(c) | Rule::AtLeastR(c) => {
                let filler = if c.qualified { p } else { Concept::top() };
                let at_most = matches!(self.rule, Rule::AtMostL(_) | Rule::AtMostR(_));
                let bs = if at_most { vec![ind("b0"), ind("b1")] } else { vec![ind("b1")] };
                b.ind("a", &ind("a"))
                    .set("n", Value::Num(1))
                    .role("r", &r)
                    .concept("P", &filler)
                    .set("bs", Value::Inds(bs))
            }
            Rule::Rep1 => b.ind("a", &ind("a")).ind("b", &ind("b")).concept("C", &Concept::atomic("C")),
            Rule::Rep2 => b
                .ind("a", &ind("a"))
                .ind("b", &ind("b"))
                .set("F", Value::Formula(Formula::Role(r, ind("a"), ind("c"))))
                .set("pos", Value::Num(0)),
            Rule::Euc => b.ind("a", &ind("a")).ind("b", &ind("b")).ind("c", &ind("c")),
            Rule::NeqL | Rule::NeqR => b.ind("a", &ind("a")).ind("b", &ind("b")),
            Rule::SelfL | Rule::SelfR => b.ind("a", &ind("a")).role("r", &r),
            Rule::RelL(d) => b
                .set("roles", Value::Roles(d.def.roles.iter().map(|x| RoleTerm::Named(x.clone())).collect()))
                .set("vars", Value::Inds(d.vars.iter().map(|v| Individual::Named(v.clone())).collect())),
            Rule::RelR(def) => {
                let b = b.set("roles", Value::Roles(def.roles.iter().map(|x| RoleTerm::Named(x.clone())).collect()));
                if def.vars.is_empty() {
                    b
                } else {
                    b.set("vars", Value::Inds(def.vars.iter().map(|v| Individual::Named(v.clone())).collect()))
                }
            }
        }
    }

    /// The instance at the placeholder binding.
    pub fn pattern(&self) -> Instance {
        self.instance(&self.generic_binding()).expect("placeholder bindings instantiate")
    }
}

fn assignment(
    vars: &[crate::syntax::Symbol],
    vals: &[Individual],
    name: &str,
) -> Result<BTreeMap<crate::syntax::Symbol, Individual>, RuleError> {
    if vars.len() != vals.len() {
        return Err(RuleError::Binding(format!("{name}: expected {} individuals", vars.len())));
    }
    Ok(vars.iter().cloned().zip(vals.iter().cloned()).collect())
}

fn check_args(def: &DescriptiveDefinition, args: &[RoleTerm]) -> Result<(), RuleError> {
    if args.len() != def.roles.len() {
        return Err(RuleError::Binding(format!("{} expects {} role arguments", def.name, def.roles.len())));
    }
    if args.iter().any(RoleTerm::is_chain) {
        return Err(RuleError::Binding(format!("{} arguments must not be chains", def.name)));
    }
    Ok(())
}
