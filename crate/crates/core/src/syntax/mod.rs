//! Formula and sequent language.
//!
//! Internal formulae (IFs) are concept assertions `a : P`; every other formula
//! is external (EF). Sequents keep the two classes in separate zones on each
//! side, and all values here are immutable once built.

mod parse;
mod print;
mod profile;
mod sequent;
mod weight;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use parse::{parse_concept, parse_formula, parse_kb, parse_role, parse_sequent, KnowledgeBase, ParseOptions, Parser};
pub use profile::{Feature, LanguageProfile, ProfileViolation, DEFAULT_COUNTING_CEILING};
pub use sequent::{Sequent, Side};
pub use weight::WeightError;

/// Interned-ish name of a concept, role, individual or relation.
pub type Symbol = Arc<str>;

pub fn sym(s: &str) -> Symbol {
    Arc::from(s)
}

/// An individual name.
///
/// User individuals sort before eigen individuals, and eigen individuals sort
/// by creation index; this is the linear order used to pick fresh names.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Individual {
    Named(Symbol),
    Eigen(u32),
}

impl Individual {
    pub fn named(name: &str) -> Self {
        Individual::Named(sym(name))
    }

    pub fn eigen(index: u32) -> Self {
        Individual::Eigen(index)
    }

    pub fn is_eigen(&self) -> bool {
        matches!(self, Individual::Eigen(_))
    }

    pub fn eigen_index(&self) -> Option<u32> {
        match self {
            Individual::Eigen(i) => Some(*i),
            Individual::Named(_) => None,
        }
    }
}

/// A role expression.
///
/// Inverses wrap only named roles, and chains are flat with at least two
/// non-chain elements; use [`RoleTerm::chain`] to build chains.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RoleTerm {
    Named(Symbol),
    Inverse(Symbol),
    Universal,
    Chain(Vec<RoleTerm>),
}

impl RoleTerm {
    pub fn named(name: &str) -> Self {
        RoleTerm::Named(sym(name))
    }

    pub fn inverse(name: &str) -> Self {
        RoleTerm::Inverse(sym(name))
    }

    /// Builds a composition `r1 ; ... ; rn`, flattening nested chains.
    /// A single element yields that element itself.
    pub fn chain(parts: impl IntoIterator<Item = RoleTerm>) -> Result<RoleTerm, SyntaxError> {
        let mut flat = Vec::new();
        for part in parts {
            match part {
                RoleTerm::Chain(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Err(SyntaxError::new("empty role chain")),
            1 => Ok(flat.pop().unwrap()),
            _ => Ok(RoleTerm::Chain(flat)),
        }
    }

    /// The elements of a chain, or the role itself as a one-element slice.
    pub fn links(&self) -> &[RoleTerm] {
        match self {
            RoleTerm::Chain(parts) => parts,
            other => std::slice::from_ref(other),
        }
    }

    pub fn is_chain(&self) -> bool {
        matches!(self, RoleTerm::Chain(_))
    }

    /// The underlying named role of `r` or `inv r`.
    pub fn base_name(&self) -> Option<&Symbol> {
        match self {
            RoleTerm::Named(r) | RoleTerm::Inverse(r) => Some(r),
            _ => None,
        }
    }

    /// Named roles mentioned anywhere in this term.
    pub fn role_names(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            RoleTerm::Named(r) | RoleTerm::Inverse(r) => {
                out.insert(r.clone());
            }
            RoleTerm::Universal => {}
            RoleTerm::Chain(parts) => parts.iter().for_each(|p| p.role_names(out)),
        }
    }
}

/// Concept expressions. Unqualified number restrictions are qualified ones
/// over [`Concept::Top`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Atomic(Symbol),
    Top,
    Bottom,
    Not(Arc<Concept>),
    Or(Arc<Concept>, Arc<Concept>),
    And(Arc<Concept>, Arc<Concept>),
    Exists(RoleTerm, Arc<Concept>),
    Forall(RoleTerm, Arc<Concept>),
    Nominal(Individual),
    AtMost(u32, RoleTerm, Arc<Concept>),
    AtLeast(u32, RoleTerm, Arc<Concept>),
    SelfLoop(RoleTerm),
}

impl Concept {
    pub fn atomic(name: &str) -> Arc<Concept> {
        Arc::new(Concept::Atomic(sym(name)))
    }

    pub fn top() -> Arc<Concept> {
        Arc::new(Concept::Top)
    }

    pub fn bottom() -> Arc<Concept> {
        Arc::new(Concept::Bottom)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Arc<Concept>) -> Arc<Concept> {
        Arc::new(Concept::Not(p))
    }

    pub fn or(p: Arc<Concept>, q: Arc<Concept>) -> Arc<Concept> {
        Arc::new(Concept::Or(p, q))
    }

    pub fn and(p: Arc<Concept>, q: Arc<Concept>) -> Arc<Concept> {
        Arc::new(Concept::And(p, q))
    }

    pub fn exists(r: RoleTerm, p: Arc<Concept>) -> Arc<Concept> {
        Arc::new(Concept::Exists(r, p))
    }

    pub fn forall(r: RoleTerm, p: Arc<Concept>) -> Arc<Concept> {
        Arc::new(Concept::Forall(r, p))
    }

    pub fn nominal(a: Individual) -> Arc<Concept> {
        Arc::new(Concept::Nominal(a))
    }

    pub fn at_most(n: u32, r: RoleTerm, p: Arc<Concept>) -> Arc<Concept> {
        Arc::new(Concept::AtMost(n, r, p))
    }

    pub fn at_least(n: u32, r: RoleTerm, p: Arc<Concept>) -> Arc<Concept> {
        Arc::new(Concept::AtLeast(n, r, p))
    }

    pub fn self_loop(r: RoleTerm) -> Arc<Concept> {
        Arc::new(Concept::SelfLoop(r))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Concept::Atomic(_))
    }

    pub fn individuals(&self, out: &mut BTreeSet<Individual>) {
        match self {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom | Concept::SelfLoop(_) => {}
            Concept::Nominal(a) => {
                out.insert(a.clone());
            }
            Concept::Not(p)
            | Concept::Exists(_, p)
            | Concept::Forall(_, p)
            | Concept::AtMost(_, _, p)
            | Concept::AtLeast(_, _, p) => p.individuals(out),
            Concept::Or(p, q) | Concept::And(p, q) => {
                p.individuals(out);
                q.individuals(out);
            }
        }
    }

    pub fn concept_names(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Concept::Atomic(c) => {
                out.insert(c.clone());
            }
            Concept::Top | Concept::Bottom | Concept::Nominal(_) | Concept::SelfLoop(_) => {}
            Concept::Not(p)
            | Concept::Exists(_, p)
            | Concept::Forall(_, p)
            | Concept::AtMost(_, _, p)
            | Concept::AtLeast(_, _, p) => p.concept_names(out),
            Concept::Or(p, q) | Concept::And(p, q) => {
                p.concept_names(out);
                q.concept_names(out);
            }
        }
    }

    pub fn role_names(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom | Concept::Nominal(_) => {}
            Concept::SelfLoop(r) => r.role_names(out),
            Concept::Not(p) => p.role_names(out),
            Concept::Exists(r, p)
            | Concept::Forall(r, p)
            | Concept::AtMost(_, r, p)
            | Concept::AtLeast(_, r, p) => {
                r.role_names(out);
                p.role_names(out);
            }
            Concept::Or(p, q) | Concept::And(p, q) => {
                p.role_names(out);
                q.role_names(out);
            }
        }
    }

    /// Rewrites every individual (inside nominals) through `f`.
    pub fn map_individuals(self: &Arc<Self>, f: &impl Fn(&Individual) -> Individual) -> Arc<Concept> {
        let mut inds = BTreeSet::new();
        self.individuals(&mut inds);
        if inds.iter().all(|a| &f(a) == a) {
            return self.clone();
        }
        Arc::new(match self.as_ref() {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom | Concept::SelfLoop(_) => {
                return self.clone()
            }
            Concept::Nominal(a) => Concept::Nominal(f(a)),
            Concept::Not(p) => Concept::Not(p.map_individuals(f)),
            Concept::Or(p, q) => Concept::Or(p.map_individuals(f), q.map_individuals(f)),
            Concept::And(p, q) => Concept::And(p.map_individuals(f), q.map_individuals(f)),
            Concept::Exists(r, p) => Concept::Exists(r.clone(), p.map_individuals(f)),
            Concept::Forall(r, p) => Concept::Forall(r.clone(), p.map_individuals(f)),
            Concept::AtMost(n, r, p) => Concept::AtMost(*n, r.clone(), p.map_individuals(f)),
            Concept::AtLeast(n, r, p) => Concept::AtLeast(*n, r.clone(), p.map_individuals(f)),
        })
    }

    /// Structural checks independent of any profile: role positions inside
    /// concepts never hold chains.
    pub fn validate(&self) -> Result<(), SyntaxError> {
        match self {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom | Concept::Nominal(_) => Ok(()),
            Concept::SelfLoop(r) => no_chain(r),
            Concept::Not(p) => p.validate(),
            Concept::Or(p, q) | Concept::And(p, q) => {
                p.validate()?;
                q.validate()
            }
            Concept::Exists(r, p)
            | Concept::Forall(r, p)
            | Concept::AtMost(_, r, p)
            | Concept::AtLeast(_, r, p) => {
                no_chain(r)?;
                p.validate()
            }
        }
    }
}

fn no_chain(r: &RoleTerm) -> Result<(), SyntaxError> {
    if r.is_chain() {
        Err(SyntaxError::new(format!("role chain `{r}` is not allowed inside a concept")))
    } else {
        Ok(())
    }
}

/// A formula: one internal variant and seven external ones.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// `a : P`
    Assert(Individual, Arc<Concept>),
    /// `P ⊑ Q`
    Gci(Arc<Concept>, Arc<Concept>),
    /// `R(a,b)`; a chain role makes this a composition assertion.
    Role(RoleTerm, Individual, Individual),
    /// `¬r(a,b)` for a named role.
    NegRole(Symbol, Individual, Individual),
    /// `r1 ∘ ⋯ ∘ rn ⊑ r`; n = 1 is a plain role inclusion.
    Cria(Vec<RoleTerm>, Symbol),
    /// `Rel(r1, …, rk)`
    Rra(Symbol, Vec<RoleTerm>),
    Eq(Individual, Individual),
    Neq(Individual, Individual),
}

impl Formula {
    pub fn assert(a: Individual, p: Arc<Concept>) -> Formula {
        Formula::Assert(a, p)
    }

    pub fn role(r: RoleTerm, a: Individual, b: Individual) -> Formula {
        Formula::Role(r, a, b)
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, Formula::Assert(..))
    }

    pub fn is_external(&self) -> bool {
        !self.is_internal()
    }

    /// Formulae that may close a branch through the role identity axiom:
    /// non-chain role assertions and equalities.
    pub fn is_relational_atom(&self) -> bool {
        match self {
            Formula::Role(r, _, _) => !r.is_chain(),
            Formula::Eq(..) => true,
            _ => false,
        }
    }

    /// Every individual occurring in the formula, nominals included.
    pub fn individuals(&self) -> BTreeSet<Individual> {
        let mut out = BTreeSet::new();
        self.collect_individuals(&mut out);
        out
    }

    pub fn collect_individuals(&self, out: &mut BTreeSet<Individual>) {
        match self {
            Formula::Assert(a, p) => {
                out.insert(a.clone());
                p.individuals(out);
            }
            Formula::Gci(p, q) => {
                p.individuals(out);
                q.individuals(out);
            }
            Formula::Role(_, a, b) | Formula::NegRole(_, a, b) | Formula::Eq(a, b) | Formula::Neq(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            Formula::Cria(..) | Formula::Rra(..) => {}
        }
    }

    pub fn mentions(&self, ind: &Individual) -> bool {
        self.individuals().contains(ind)
    }

    pub fn concept_names(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Formula::Assert(_, p) => p.concept_names(out),
            Formula::Gci(p, q) => {
                p.concept_names(out);
                q.concept_names(out);
            }
            _ => {}
        }
    }

    pub fn role_names(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Formula::Assert(_, p) => p.role_names(out),
            Formula::Gci(p, q) => {
                p.role_names(out);
                q.role_names(out);
            }
            Formula::Role(r, _, _) => r.role_names(out),
            Formula::NegRole(r, _, _) => {
                out.insert(r.clone());
            }
            Formula::Cria(lhs, r) => {
                lhs.iter().for_each(|l| l.role_names(out));
                out.insert(r.clone());
            }
            Formula::Rra(_, args) => args.iter().for_each(|a| a.role_names(out)),
            Formula::Eq(..) | Formula::Neq(..) => {}
        }
    }

    /// Rewrites every individual through `f` (simultaneous substitution).
    pub fn map_individuals(&self, f: &impl Fn(&Individual) -> Individual) -> Formula {
        match self {
            Formula::Assert(a, p) => Formula::Assert(f(a), p.map_individuals(f)),
            Formula::Gci(p, q) => Formula::Gci(p.map_individuals(f), q.map_individuals(f)),
            Formula::Role(r, a, b) => Formula::Role(r.clone(), f(a), f(b)),
            Formula::NegRole(r, a, b) => Formula::NegRole(r.clone(), f(a), f(b)),
            Formula::Eq(a, b) => Formula::Eq(f(a), f(b)),
            Formula::Neq(a, b) => Formula::Neq(f(a), f(b)),
            Formula::Cria(..) | Formula::Rra(..) => self.clone(),
        }
    }

    /// `self[to/from]`: replaces every occurrence of `from` by `to`.
    pub fn substitute(&self, from: &Individual, to: &Individual) -> Formula {
        self.map_individuals(&|x| if x == from { to.clone() } else { x.clone() })
    }

    /// Structural well-formedness independent of any profile.
    pub fn validate(&self) -> Result<(), SyntaxError> {
        match self {
            Formula::Assert(_, p) => p.validate(),
            Formula::Gci(p, q) => {
                p.validate()?;
                q.validate()
            }
            Formula::Role(RoleTerm::Chain(parts), _, _) => {
                if parts.len() < 2 || parts.iter().any(RoleTerm::is_chain) {
                    Err(SyntaxError::new("malformed role chain"))
                } else {
                    Ok(())
                }
            }
            Formula::Role(..) | Formula::NegRole(..) | Formula::Eq(..) | Formula::Neq(..) => Ok(()),
            Formula::Cria(lhs, _) => {
                if lhs.is_empty() {
                    Err(SyntaxError::new("role inclusion with empty left-hand side"))
                } else {
                    lhs.iter().try_for_each(no_chain)
                }
            }
            Formula::Rra(_, args) => args.iter().try_for_each(no_chain),
        }
    }
}

/// A syntax error, optionally located in the source text (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct SyntaxError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl SyntaxError {
    pub fn new(message: impl Into<String>) -> Self {
        SyntaxError { message: message.into(), line: 0, column: 0 }
    }

    pub fn at(message: impl Into<String>, line: usize, column: usize) -> Self {
        SyntaxError { message: message.into(), line, column }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "syntax error at {}:{}: {}", self.line, self.column, self.message)
        } else {
            write!(f, "syntax error: {}", self.message)
        }
    }
}

/// Errors produced when reading text under a language profile.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Profile(#[from] ProfileViolation),
}
