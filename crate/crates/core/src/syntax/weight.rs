use thiserror::Error;

use super::{Concept, Formula, RoleTerm, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("no descriptive definition registered for `{0}`")]
    UnknownRelation(Symbol),
}

impl Concept {
    /// The weight of a concept, i.e. of any assertion `a : P`.
    pub fn weight(&self) -> usize {
        match self {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom => 1,
            Concept::Nominal(_) | Concept::SelfLoop(_) => 2,
            Concept::Or(p, q) | Concept::And(p, q) => p.weight().max(q.weight()) + 1,
            Concept::Not(p)
            | Concept::Exists(_, p)
            | Concept::Forall(_, p)
            | Concept::AtMost(_, _, p)
            | Concept::AtLeast(_, _, p) => p.weight() + 1,
        }
    }
}

impl Formula {
    /// The weight measure driving the identity induction.
    ///
    /// `arity` reports the antecedent and consequent atom counts `(n, k)` of a
    /// relation's descriptive definition.
    pub fn weight(&self, arity: impl Fn(&str) -> Option<(usize, usize)>) -> Result<usize, WeightError> {
        Ok(match self {
            Formula::Assert(_, p) => p.weight(),
            Formula::Gci(p, q) => p.weight().max(q.weight()) + 1,
            Formula::Role(RoleTerm::Chain(parts), _, _) => parts.len(),
            Formula::Role(..) | Formula::Eq(..) => 1,
            Formula::NegRole(..) | Formula::Neq(..) => 2,
            Formula::Cria(lhs, _) => lhs.len() + 2,
            Formula::Rra(name, _) => {
                let (n, k) = arity(name).ok_or_else(|| WeightError::UnknownRelation(name.clone()))?;
                1 + n + k
            }
        })
    }
}
