//! Bounded search for falsifying interpretations.
//!
//! Interpretations are enumerated by domain size, then by the map from
//! individuals to elements (in restricted-growth form, so renamings of
//! elements are tried once), then by depth-first assignment of the concept
//! and role bits. Each partial assignment is evaluated in three-valued
//! (Kleene) logic, and a subtree is cut as soon as the sequent is
//! determined to hold.

use std::collections::{BTreeMap, BTreeSet};

use crate::calculus::{Atom, Definitions};
use crate::syntax::{Concept, Formula, Individual, RoleTerm, Sequent, Side, Symbol};

use super::{Element, Interpretation, ModelError};

/// Enumeration limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Largest number of concept and role bits per interpretation, at the
    /// largest domain size searched.
    pub max_bits: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_bits: 48 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tri {
    False,
    Unknown,
    True,
}

impl Tri {
    fn from(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    fn not(self) -> Tri {
        match self {
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
            Tri::True => Tri::False,
        }
    }

    fn and(self, o: Tri) -> Tri {
        std::cmp::min_by_key(self, o, |t| *t as u8)
    }

    fn or(self, o: Tri) -> Tri {
        std::cmp::max_by_key(self, o, |t| *t as u8)
    }

    fn all(it: impl IntoIterator<Item = Tri>) -> Tri {
        let mut acc = Tri::True;
        for t in it {
            acc = acc.and(t);
            if acc == Tri::False {
                break;
            }
        }
        acc
    }

    fn any(it: impl IntoIterator<Item = Tri>) -> Tri {
        let mut acc = Tri::False;
        for t in it {
            acc = acc.or(t);
            if acc == Tri::True {
                break;
            }
        }
        acc
    }
}

struct Partial<'a> {
    n: usize,
    concept_index: BTreeMap<&'a Symbol, usize>,
    role_index: BTreeMap<&'a Symbol, usize>,
    /// Concept bits, `c * n + x`, followed by role bits, `r * n * n + x * n + y`.
    bits: Vec<Tri>,
    individuals: BTreeMap<&'a Individual, usize>,
    defs: &'a Definitions,
}

impl Partial<'_> {
    fn concept_bit(&self, name: &Symbol, x: usize) -> Tri {
        self.concept_index.get(name).map_or(Tri::False, |&c| self.bits[c * self.n + x])
    }

    fn role_bit(&self, name: &Symbol, x: usize, y: usize) -> Tri {
        let base = self.concept_index.len() * self.n;
        self.role_index.get(name).map_or(Tri::False, |&r| self.bits[base + r * self.n * self.n + x * self.n + y])
    }

    fn role(&self, r: &RoleTerm, x: usize, y: usize) -> Tri {
        match r {
            RoleTerm::Named(s) => self.role_bit(s, x, y),
            RoleTerm::Inverse(s) => self.role_bit(s, y, x),
            RoleTerm::Universal => Tri::True,
            RoleTerm::Chain(parts) => self.chain(parts, x, y),
        }
    }

    fn chain(&self, parts: &[RoleTerm], x: usize, z: usize) -> Tri {
        match parts {
            [] => Tri::from(x == z),
            [only] => self.role(only, x, z),
            [first, rest @ ..] => Tri::any((0..self.n).map(|y| self.role(first, x, y).and(self.chain(rest, y, z)))),
        }
    }

    fn ind(&self, a: &Individual) -> usize {
        self.individuals[a]
    }

    fn concept(&self, c: &Concept, x: usize) -> Tri {
        match c {
            Concept::Atomic(s) => self.concept_bit(s, x),
            Concept::Top => Tri::True,
            Concept::Bottom => Tri::False,
            Concept::Not(p) => self.concept(p, x).not(),
            Concept::Or(p, q) => self.concept(p, x).or(self.concept(q, x)),
            Concept::And(p, q) => self.concept(p, x).and(self.concept(q, x)),
            Concept::Exists(r, p) => Tri::any((0..self.n).map(|y| self.role(r, x, y).and(self.concept(p, y)))),
            Concept::Forall(r, p) => Tri::all((0..self.n).map(|y| self.role(r, x, y).not().or(self.concept(p, y)))),
            Concept::Nominal(a) => Tri::from(self.ind(a) == x),
            Concept::AtMost(k, r, p) | Concept::AtLeast(k, r, p) => {
                let (mut sure, mut possible) = (0usize, 0usize);
                for y in 0..self.n {
                    match self.role(r, x, y).and(self.concept(p, y)) {
                        Tri::True => {
                            sure += 1;
                            possible += 1;
                        }
                        Tri::Unknown => possible += 1,
                        Tri::False => {}
                    }
                }
                let k = *k as usize;
                let at_most = matches!(c, Concept::AtMost(..));
                match (at_most, possible <= k, sure > k, sure >= k, possible < k) {
                    (true, true, _, _, _) => Tri::True,
                    (true, _, true, _, _) => Tri::False,
                    (false, _, _, true, _) => Tri::True,
                    (false, _, _, _, true) => Tri::False,
                    _ => Tri::Unknown,
                }
            }
            Concept::SelfLoop(r) => self.role(r, x, x),
        }
    }

    fn formula(&self, f: &Formula) -> Result<Tri, ModelError> {
        Ok(match f {
            Formula::Assert(a, p) => self.concept(p, self.ind(a)),
            Formula::Gci(p, q) => Tri::all((0..self.n).map(|x| self.concept(p, x).not().or(self.concept(q, x)))),
            Formula::Role(r, a, b) => self.role(r, self.ind(a), self.ind(b)),
            Formula::NegRole(r, a, b) => self.role_bit(r, self.ind(a), self.ind(b)).not(),
            Formula::Eq(a, b) => Tri::from(self.ind(a) == self.ind(b)),
            Formula::Neq(a, b) => Tri::from(self.ind(a) != self.ind(b)),
            Formula::Cria(lhs, r) => Tri::all((0..self.n).flat_map(|x| (0..self.n).map(move |z| (x, z))).map(|(x, z)| {
                self.chain(lhs, x, z).not().or(self.role_bit(r, x, z))
            })),
            Formula::Rra(name, args) => {
                let def = self.defs.get(name).ok_or_else(|| ModelError::UnknownRelation(name.clone()))?;
                let m = def.vars.len();
                let total = self.n.pow(m as u32);
                let mut acc = Tri::True;
                for code in 0..total {
                    let val = |v: &Symbol| {
                        let i = def.vars.iter().position(|w| w == v).expect("bound variable");
                        (code / self.n.pow(i as u32)) % self.n
                    };
                    let atom = |a: &Atom| match a {
                        Atom::Role(p, x, y) => {
                            let i = def.roles.iter().position(|q| q == p).expect("role parameter");
                            self.role(&args[i], val(x), val(y))
                        }
                        Atom::Eq(x, y) => Tri::from(val(x) == val(y)),
                    };
                    let body = Tri::all(def.antecedent.iter().map(atom)).not().or(Tri::any(def.consequent.iter().map(atom)));
                    acc = acc.and(body);
                    if acc == Tri::False {
                        break;
                    }
                }
                acc
            }
        })
    }

    /// `True` when the sequent is falsified whatever the unknown bits are,
    /// `False` when it holds whatever they are.
    fn falsified(&self, s: &Sequent) -> Result<Tri, ModelError> {
        let mut acc = Tri::True;
        for f in s.left() {
            acc = acc.and(self.formula(f)?);
            if acc == Tri::False {
                return Ok(acc);
            }
        }
        for f in s.right() {
            acc = acc.and(self.formula(f)?.not());
            if acc == Tri::False {
                return Ok(acc);
            }
        }
        Ok(acc)
    }

    fn to_interpretation(&self, concepts: &[&Symbol], roles: &[&Symbol]) -> Interpretation {
        let mut out = Interpretation::with_domain(self.n as u32);
        for (c, name) in concepts.iter().enumerate() {
            let ext = (0..self.n).filter(|&x| self.bits[c * self.n + x] == Tri::True).map(|x| x as Element);
            out.concepts.insert((*name).clone(), ext.collect());
        }
        let base = concepts.len() * self.n;
        for (r, name) in roles.iter().enumerate() {
            let mut ext = BTreeSet::new();
            for x in 0..self.n {
                for y in 0..self.n {
                    if self.bits[base + r * self.n * self.n + x * self.n + y] == Tri::True {
                        ext.insert((x as Element, y as Element));
                    }
                }
            }
            out.roles.insert((*name).clone(), ext);
        }
        out.individuals = self.individuals.iter().map(|(a, &x)| ((*a).clone(), x as Element)).collect();
        out
    }

    fn dfs(&mut self, s: &Sequent, k: usize) -> Result<bool, ModelError> {
        match self.falsified(s)? {
            Tri::False => return Ok(false),
            Tri::True => {
                for b in &mut self.bits[k..] {
                    *b = Tri::False;
                }
                return Ok(true);
            }
            Tri::Unknown => {}
        }
        if k == self.bits.len() {
            return Ok(false);
        }
        for v in [Tri::False, Tri::True] {
            self.bits[k] = v;
            if self.dfs(s, k + 1)? {
                return Ok(true);
            }
        }
        self.bits[k] = Tri::Unknown;
        Ok(false)
    }
}

/// Restricted-growth maps of `count` individuals into `n` elements.
fn individual_maps(count: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(count);
    fn go(count: usize, n: usize, used: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == count {
            out.push(cur.clone());
            return;
        }
        for x in 0..(used + 1).min(n) {
            cur.push(x);
            go(count, n, used.max(x + 1), cur, out);
            cur.pop();
        }
    }
    go(count, n, 0, &mut cur, &mut out);
    out
}

/// The first interpretation with at most `max_domain` elements that
/// falsifies `s`, or `None` if there is none up to that size.
pub fn find_countermodel(s: &Sequent, max_domain: u32, defs: &Definitions) -> Result<Option<Interpretation>, ModelError> {
    find_countermodel_with(s, max_domain, defs, SearchLimits::default())
}

pub fn find_countermodel_with(
    s: &Sequent,
    max_domain: u32,
    defs: &Definitions,
    limits: SearchLimits,
) -> Result<Option<Interpretation>, ModelError> {
    let mut concept_names = BTreeSet::new();
    let mut role_names = BTreeSet::new();
    for (_, f) in s.formulas() {
        f.concept_names(&mut concept_names);
        f.role_names(&mut role_names);
        if let Formula::Rra(name, _) = f {
            if defs.get(name).is_none() {
                return Err(ModelError::UnknownRelation(name.clone()));
            }
        }
    }
    // A formula on both sides holds or fails on both, so nothing falsifies
    // the sequent. Three-valued evaluation cannot see this until every bit
    // the formula depends on is set.
    if s.left().any(|f| s.contains(Side::Right, f)) {
        return Ok(None);
    }
    let concepts: Vec<&Symbol> = concept_names.iter().collect();
    let roles: Vec<&Symbol> = role_names.iter().collect();
    let individuals: Vec<Individual> = s.individuals().into_iter().collect();
    let max = max_domain as usize;
    let bits = max * concepts.len() + max * max * roles.len();
    if bits > limits.max_bits {
        return Err(ModelError::VocabularyTooLarge { bits, limit: limits.max_bits });
    }
    for n in 1..=max {
        for map in individual_maps(individuals.len(), n) {
            let mut p = Partial {
                n,
                concept_index: concepts.iter().enumerate().map(|(i, c)| (*c, i)).collect(),
                role_index: roles.iter().enumerate().map(|(i, r)| (*r, i)).collect(),
                bits: vec![Tri::Unknown; n * concepts.len() + n * n * roles.len()],
                individuals: individuals.iter().zip(&map).map(|(a, &x)| (a, x)).collect(),
                defs,
            };
            if p.dfs(s, 0)? {
                let model = p.to_interpretation(&concepts, &roles);
                assert!(
                    model.falsifies(s, defs)?,
                    "three-valued search and two-valued evaluation disagree on {s}"
                );
                return Ok(Some(model));
            }
        }
    }
    Ok(None)
}
