//! Concrete text rendering; every form printed here parses back to the same
//! term.

use std::fmt;

use super::{Concept, Formula, Individual, RoleTerm};

/// Relation names with dedicated sugar in the text grammar.
pub(crate) const SUGAR_RELATIONS: [&str; 6] = ["Trans", "Refl", "Irr", "Asy", "Disj", "Funct"];

impl fmt::Display for Individual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Individual::Named(name) => f.write_str(name),
            Individual::Eigen(i) => write!(f, "_e{i}"),
        }
    }
}

impl fmt::Display for RoleTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoleTerm::Named(r) => f.write_str(r),
            RoleTerm::Inverse(r) => write!(f, "inv {r}"),
            RoleTerm::Universal => f.write_str("U"),
            RoleTerm::Chain(parts) => {
                let parts: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                f.write_str(&parts.join(";"))
            }
        }
    }
}

/// A role in a concept position: inverses are parenthesized for legibility.
struct ConceptRole<'a>(&'a RoleTerm);

impl fmt::Display for ConceptRole<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            RoleTerm::Inverse(r) => write!(f, "(inv {r})"),
            other => write!(f, "{other}"),
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Atomic(c) => f.write_str(c),
            Concept::Top => f.write_str("top"),
            Concept::Bottom => f.write_str("bot"),
            Concept::Not(p) => write!(f, "not {p}"),
            Concept::Or(p, q) => write!(f, "({p} or {q})"),
            Concept::And(p, q) => write!(f, "({p} and {q})"),
            Concept::Exists(r, p) => write!(f, "some {} {p}", ConceptRole(r)),
            Concept::Forall(r, p) => write!(f, "all {} {p}", ConceptRole(r)),
            Concept::Nominal(a) => write!(f, "{{{a}}}"),
            Concept::AtMost(n, r, p) => write!(f, "atmost {n} {} {p}", ConceptRole(r)),
            Concept::AtLeast(n, r, p) => write!(f, "atleast {n} {} {p}", ConceptRole(r)),
            Concept::SelfLoop(r) => write!(f, "self {}", ConceptRole(r)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Assert(a, p) => write!(f, "{a}:{p}"),
            Formula::Gci(p, q) => write!(f, "{p} sub {q}"),
            Formula::Role(r, a, b) => write!(f, "{r}({a},{b})"),
            Formula::NegRole(r, a, b) => write!(f, "not {r}({a},{b})"),
            Formula::Cria(lhs, r) => {
                let lhs: Vec<String> = lhs.iter().map(|p| p.to_string()).collect();
                write!(f, "{} sub {r}", lhs.join(";"))
            }
            Formula::Rra(name, args) => {
                let args: Vec<String> = args.iter().map(|p| p.to_string()).collect();
                if SUGAR_RELATIONS.contains(&name.as_ref()) {
                    write!(f, "{name}({})", args.join(","))
                } else {
                    write!(f, "Rel[{name}]({})", args.join(","))
                }
            }
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Neq(a, b) => write!(f, "{a} != {b}"),
        }
    }
}
