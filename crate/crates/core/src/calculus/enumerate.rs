//! Matching schemata against sequents.

use std::collections::BTreeMap;

use crate::syntax::{Concept, Formula, Individual, RoleTerm, Sequent, Side, Symbol};

use super::binding::{Binding, Value};
use super::ddr::Atom;
use super::rules::{Rule, RuleSchema};
use super::{Calculus, RuleError};

/// A match of a schema's principal formulae in a sequent, before eigen
/// individuals are chosen.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Match {
    pub schema: String,
    pub binding: Binding,
}

/// A fully instantiated rule application on a sequent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Application {
    pub schema: String,
    pub binding: Binding,
    pub premises: Vec<Sequent>,
}

/// The first eigen index not used in a sequent.
pub(crate) fn next_eigen(s: &Sequent) -> u32 {
    s.individuals().iter().filter_map(Individual::eigen_index).max().map_or(1, |m| m + 1)
}

fn combinations<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    fn go<T: Clone>(items: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i].clone());
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

fn asserts(s: &Sequent, side: Side) -> impl Iterator<Item = (&Individual, &Concept)> + '_ {
    let zone = if side == Side::Left { s.if_ante() } else { s.if_cons() };
    zone.iter().filter_map(|f| match f {
        Formula::Assert(a, p) => Some((a, p.as_ref())),
        _ => None,
    })
}

fn efs(s: &Sequent, side: Side) -> &[Formula] {
    if side == Side::Left {
        s.ef_ante()
    } else {
        s.ef_cons()
    }
}

fn successors<'a>(s: &'a Sequent, r: &'a RoleTerm, a: &'a Individual) -> impl Iterator<Item = &'a Individual> + 'a {
    s.ef_ante().iter().filter_map(move |f| match f {
        Formula::Role(q, x, y) if q == r && x == a => Some(y),
        _ => None,
    })
}

fn concept_binding(a: &Individual, p: &std::sync::Arc<Concept>) -> Binding {
    Binding::new().ind("a", a).concept("P", p)
}

impl RuleSchema {
    /// All matches of this schema's principal formulae in `s`. Rules without
    /// principal formulae range over `individuals`.
    pub fn matches(&self, s: &Sequent, individuals: &[Individual]) -> Vec<Binding> {
        use Side::{Left as L, Right as R};
        let mut out = Vec::new();
        match &self.rule {
            Rule::IdC => {
                for (a, c) in asserts(s, L) {
                    if c.is_atomic() && s.contains(R, &Formula::Assert(a.clone(), c.clone().into())) {
                        out.push(Binding::new().ind("a", a).concept("C", &c.clone().into()));
                    }
                }
            }
            Rule::IdR => {
                for f in s.ef_ante() {
                    if f.is_relational_atom() && s.contains(R, f) {
                        out.push(Binding::new().set("F", Value::Formula(f.clone())));
                    }
                }
            }
            Rule::BotL | Rule::TopR => {
                let side = if self.rule == Rule::BotL { L } else { R };
                for (a, c) in asserts(s, side) {
                    if matches!((c, side), (Concept::Bottom, L) | (Concept::Top, R)) {
                        out.push(Binding::new().ind("a", a));
                    }
                }
            }
            Rule::BotR | Rule::TopL | Rule::EqL => {
                out.extend(individuals.iter().map(|a| Binding::new().ind("a", a)));
            }
            Rule::NomL2 => out.extend(individuals.iter().map(|b| Binding::new().ind("b", b))),
            Rule::UnivL => {
                for a in individuals {
                    for b in individuals {
                        out.push(Binding::new().ind("a", a).ind("b", b));
                    }
                }
            }
            Rule::NotL | Rule::NotR => {
                let side = if self.rule == Rule::NotL { L } else { R };
                for (a, c) in asserts(s, side) {
                    if let Concept::Not(p) = c {
                        out.push(concept_binding(a, p));
                    }
                }
            }
            Rule::OrL | Rule::OrR | Rule::AndL | Rule::AndR => {
                let side = if matches!(self.rule, Rule::OrL | Rule::AndL) { L } else { R };
                let or = matches!(self.rule, Rule::OrL | Rule::OrR);
                for (a, c) in asserts(s, side) {
                    match (c, or) {
                        (Concept::Or(p, q), true) | (Concept::And(p, q), false) => {
                            out.push(concept_binding(a, p).concept("Q", q))
                        }
                        _ => {}
                    }
                }
            }
            Rule::SubL => {
                for f in s.ef_ante() {
                    if let Formula::Gci(p, q) = f {
                        for a in individuals {
                            out.push(Binding::new().ind("a", a).concept("P", p).concept("Q", q));
                        }
                    }
                }
            }
            Rule::SubR => {
                for f in s.ef_cons() {
                    if let Formula::Gci(p, q) = f {
                        out.push(Binding::new().concept("P", p).concept("Q", q));
                    }
                }
            }
            Rule::ExistsL | Rule::ForallR => {
                let side = if self.rule == Rule::ExistsL { L } else { R };
                for (a, c) in asserts(s, side) {
                    match (c, side) {
                        (Concept::Exists(r, p), L) | (Concept::Forall(r, p), R) => {
                            out.push(concept_binding(a, p).role("r", r))
                        }
                        _ => {}
                    }
                }
            }
            Rule::ExistsR | Rule::ForallL => {
                let side = if self.rule == Rule::ExistsR { R } else { L };
                for (a, c) in asserts(s, side) {
                    let (r, p) = match (c, side) {
                        (Concept::Exists(r, p), R) | (Concept::Forall(r, p), L) => (r, p),
                        _ => continue,
                    };
                    for b in successors(s, r, a) {
                        out.push(concept_binding(a, p).role("r", r).ind("b", b));
                    }
                }
            }
            Rule::CompL | Rule::CompR => {
                let side = if self.rule == Rule::CompL { L } else { R };
                for f in efs(s, side) {
                    if let Formula::Role(r @ RoleTerm::Chain(_), a, c) = f {
                        let base = Binding::new().role("R", r).ind("a", a).ind("c", c);
                        if side == L {
                            out.push(base);
                        } else {
                            out.extend(individuals.iter().map(|b| base.clone().ind("b", b)));
                        }
                    }
                }
            }
            Rule::CriaL(shape) | Rule::CriaR(shape) => {
                let side = if matches!(self.rule, Rule::CriaL(_)) { L } else { R };
                for f in efs(s, side) {
                    if let Formula::Cria(lhs, r) = f {
                        if !shape.admits(lhs, r) {
                            continue;
                        }
                        let base =
                            Binding::new().set("lhs", Value::Roles(lhs.clone())).role("r", &RoleTerm::Named(r.clone()));
                        if side == R {
                            out.push(base);
                            continue;
                        }
                        for a in individuals {
                            for b in individuals {
                                out.push(base.clone().ind("a", a).ind("b", b));
                            }
                        }
                    }
                }
            }
            Rule::NomL1 | Rule::NomR1 | Rule::NomR2 => {
                let side = if self.rule == Rule::NomL1 { L } else { R };
                for (a, c) in asserts(s, side) {
                    if let Concept::Nominal(b) = c {
                        if self.rule == Rule::NomR2 {
                            if a == b {
                                out.push(Binding::new().ind("b", b));
                            }
                        } else {
                            out.push(Binding::new().ind("a", a).ind("b", b));
                        }
                    }
                }
            }
            Rule::InvL | Rule::InvInvL | Rule::InvR | Rule::InvInvR => {
                let side = if matches!(self.rule, Rule::InvL | Rule::InvInvL) { L } else { R };
                let plain = matches!(self.rule, Rule::InvL | Rule::InvR);
                for f in efs(s, side) {
                    match (f, plain) {
                        (Formula::Role(RoleTerm::Named(r), a, b), true)
                        | (Formula::Role(RoleTerm::Inverse(r), a, b), false) => {
                            out.push(Binding::new().role("r", &RoleTerm::Named(r.clone())).ind("a", a).ind("b", b))
                        }
                        _ => {}
                    }
                }
            }
            Rule::AtMostL(cnt) | Rule::AtMostR(cnt) | Rule::AtLeastL(cnt) | Rule::AtLeastR(cnt) => {
                let at_most = matches!(self.rule, Rule::AtMostL(_) | Rule::AtMostR(_));
                let side = match self.rule {
                    Rule::AtMostL(_) | Rule::AtLeastL(_) => L,
                    _ => R,
                };
                let with_successors = matches!(self.rule, Rule::AtMostL(_) | Rule::AtLeastR(_));
                for (a, c) in asserts(s, side) {
                    let (n, r, p) = match (c, at_most) {
                        (Concept::AtMost(n, r, p), true) | (Concept::AtLeast(n, r, p), false) => (*n, r, p),
                        _ => continue,
                    };
                    if r.is_chain() || (cnt.qualified && cnt.exclude_top && matches!(p.as_ref(), Concept::Top)) {
                        continue;
                    }
                    if !cnt.qualified && !matches!(p.as_ref(), Concept::Top) {
                        continue;
                    }
                    let base = Binding::new().ind("a", a).set("n", Value::Num(n)).role("r", r).concept("P", p);
                    if !with_successors {
                        out.push(base);
                        continue;
                    }
                    let mut succ: Vec<Individual> = successors(s, r, a).cloned().collect();
                    succ.sort();
                    succ.dedup();
                    let k = if at_most { n as usize + 1 } else { n as usize };
                    for bs in combinations(&succ, k) {
                        out.push(base.clone().set("bs", Value::Inds(bs)));
                    }
                }
            }
            Rule::EqR => {
                for f in s.ef_cons() {
                    if let Formula::Eq(a, b) = f {
                        if a == b {
                            out.push(Binding::new().ind("a", a));
                        }
                    }
                }
            }
            Rule::Rep1 | Rule::Rep2 | Rule::Euc => {
                for e in s.ef_ante() {
                    let Formula::Eq(a, b) = e else { continue };
                    match self.rule {
                        Rule::Rep1 => {
                            for (x, c) in asserts(s, L) {
                                if x == a && c.is_atomic() {
                                    out.push(Binding::new().ind("a", a).ind("b", b).concept("C", &c.clone().into()));
                                }
                            }
                        }
                        Rule::Rep2 => {
                            for f in s.ef_ante() {
                                if !f.is_relational_atom() {
                                    continue;
                                }
                                let (x, y) = match f {
                                    Formula::Role(_, x, y) | Formula::Eq(x, y) => (x, y),
                                    _ => continue,
                                };
                                for (pos, z) in [(0, x), (1, y)] {
                                    if z == a {
                                        out.push(
                                            Binding::new()
                                                .ind("a", a)
                                                .ind("b", b)
                                                .set("F", Value::Formula(f.clone()))
                                                .set("pos", Value::Num(pos)),
                                        );
                                    }
                                }
                            }
                        }
                        _ => {
                            for e2 in s.ef_ante() {
                                if let Formula::Eq(a2, c) = e2 {
                                    if a2 == a {
                                        out.push(Binding::new().ind("a", a).ind("b", b).ind("c", c));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            Rule::NeqL | Rule::NeqR | Rule::NegRoleL | Rule::NegRoleR | Rule::UnivR => {
                let side = if matches!(self.rule, Rule::NeqL | Rule::NegRoleL) { L } else { R };
                for f in efs(s, side) {
                    match (&self.rule, f) {
                        (Rule::NeqL | Rule::NeqR, Formula::Neq(a, b)) => {
                            out.push(Binding::new().ind("a", a).ind("b", b))
                        }
                        (Rule::NegRoleL | Rule::NegRoleR, Formula::NegRole(r, a, b)) => {
                            out.push(Binding::new().role("r", &RoleTerm::Named(r.clone())).ind("a", a).ind("b", b))
                        }
                        (Rule::UnivR, Formula::Role(RoleTerm::Universal, a, b)) => {
                            out.push(Binding::new().ind("a", a).ind("b", b))
                        }
                        _ => {}
                    }
                }
            }
            Rule::SelfL | Rule::SelfR => {
                let side = if self.rule == Rule::SelfL { L } else { R };
                for (a, c) in asserts(s, side) {
                    if let Concept::SelfLoop(r) = c {
                        out.push(Binding::new().ind("a", a).role("r", r));
                    }
                }
            }
            Rule::RelL(d) => {
                for f in s.ef_ante() {
                    let Formula::Rra(name, args) = f else { continue };
                    if name != &d.def.name || args.len() != d.def.roles.len() {
                        continue;
                    }
                    let mut assigns = Vec::new();
                    match_atoms(&d.def.roles, args, &d.antecedent, s, &mut BTreeMap::new(), &mut assigns);
                    for assign in assigns {
                        for full in extend_free(&d.vars, assign, individuals) {
                            let vals: Vec<Individual> = d.vars.iter().map(|v| full[v].clone()).collect();
                            out.push(
                                Binding::new()
                                    .set("roles", Value::Roles(args.clone()))
                                    .set("vars", Value::Inds(vals)),
                            );
                        }
                    }
                }
            }
            Rule::RelR(def) => {
                for f in s.ef_cons() {
                    if let Formula::Rra(name, args) = f {
                        if name == &def.name && args.len() == def.roles.len() {
                            out.push(Binding::new().set("roles", Value::Roles(args.clone())));
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

fn match_atoms(
    params: &[Symbol],
    args: &[RoleTerm],
    atoms: &[Atom],
    s: &Sequent,
    assign: &mut BTreeMap<Symbol, Individual>,
    out: &mut Vec<BTreeMap<Symbol, Individual>>,
) {
    let Some((atom, rest)) = atoms.split_first() else {
        out.push(assign.clone());
        return;
    };
    for f in s.ef_ante() {
        let (x, y, u, v) = match (atom, f) {
            (Atom::Role(p, x, y), Formula::Role(r, u, v)) => {
                let idx = params.iter().position(|q| q == p).expect("validated parameter");
                if &args[idx] != r {
                    continue;
                }
                (x, y, u, v)
            }
            (Atom::Eq(x, y), Formula::Eq(u, v)) => (x, y, u, v),
            _ => continue,
        };
        let saved = assign.clone();
        let ok = [(x, u), (y, v)].into_iter().all(|(var, val)| match assign.get(var) {
            Some(bound) => bound == val,
            None => {
                assign.insert(var.clone(), val.clone());
                true
            }
        });
        if ok {
            match_atoms(params, args, rest, s, assign, out);
        }
        *assign = saved;
    }
}

fn extend_free(
    vars: &[Symbol],
    assign: BTreeMap<Symbol, Individual>,
    individuals: &[Individual],
) -> Vec<BTreeMap<Symbol, Individual>> {
    let mut out = vec![assign];
    for v in vars {
        if out[0].contains_key(v) {
            continue;
        }
        out = out
            .into_iter()
            .flat_map(|m| {
                individuals.iter().map(move |a| {
                    let mut m = m.clone();
                    m.insert(v.clone(), a.clone());
                    m
                })
            })
            .collect();
    }
    out
}

impl Calculus {
    /// The individuals generator rules range over: those of the sequent, or
    /// a single fresh one when it has none.
    pub fn generator_domain(s: &Sequent) -> Vec<Individual> {
        let inds: Vec<Individual> = s.individuals().into_iter().collect();
        if inds.is_empty() {
            vec![Individual::eigen(next_eigen(s))]
        } else {
            inds
        }
    }

    /// Every match of every schema on `s`, in cyclic order.
    pub fn matches(&self, s: &Sequent) -> Vec<Match> {
        let domain = Self::generator_domain(s);
        self.cyclic_order()
            .flat_map(|schema| {
                schema.matches(s, &domain).into_iter().map(|binding| Match { schema: schema.name.clone(), binding })
            })
            .collect()
    }

    /// Completes a match with fresh eigen individuals and computes its
    /// premises on `s`.
    pub fn apply(&self, s: &Sequent, m: &Match, first_eigen: u32) -> Result<Option<Application>, RuleError> {
        let schema = self.schema(&m.schema).ok_or_else(|| RuleError::UnknownSchema(m.schema.clone()))?;
        let count = schema.eigen_count(&m.binding);
        let fresh: Vec<Individual> = (0..count as u32).map(|i| Individual::eigen(first_eigen + i)).collect();
        let binding = schema.with_eigen(&m.binding, &fresh);
        let inst = schema.instance(&binding)?;
        Ok(inst.apply(s).map(|premises| Application { schema: m.schema.clone(), binding, premises }))
    }

    /// All rule applications on `s`, eigen individuals chosen fresh for `s`.
    pub fn enumerate_applications(&self, s: &Sequent) -> Vec<Application> {
        let first = next_eigen(s);
        self.matches(s)
            .iter()
            .filter_map(|m| self.apply(s, m, first).ok().flatten())
            .collect()
    }
}
