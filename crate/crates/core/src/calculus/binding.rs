use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::syntax::{Concept, Formula, Individual, ParseOptions, Parser, RoleTerm, SyntaxError};

use super::RuleError;

/// A value bound to one metavariable of a rule schema.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Ind(Individual),
    Inds(Vec<Individual>),
    Concept(Arc<Concept>),
    Role(RoleTerm),
    Roles(Vec<RoleTerm>),
    Num(u32),
    Formula(Formula),
}

impl Value {
    pub fn map_individuals(&self, f: &impl Fn(&Individual) -> Individual) -> Value {
        match self {
            Value::Ind(a) => Value::Ind(f(a)),
            Value::Inds(v) => Value::Inds(v.iter().map(f).collect()),
            Value::Concept(c) => Value::Concept(c.map_individuals(f)),
            Value::Formula(g) => Value::Formula(g.map_individuals(f)),
            Value::Role(_) | Value::Roles(_) | Value::Num(_) => self.clone(),
        }
    }
}

/// The shape of value a metavariable carries, determined by its name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueKind {
    Ind,
    Inds,
    Concept,
    Role,
    Roles,
    Num,
    Formula,
}

impl ValueKind {
    pub fn of_key(key: &str) -> Option<ValueKind> {
        Some(match key {
            "a" | "b" | "c" => ValueKind::Ind,
            "bs" | "vars" => ValueKind::Inds,
            "P" | "Q" | "C" => ValueKind::Concept,
            "r" | "R" => ValueKind::Role,
            "lhs" | "roles" => ValueKind::Roles,
            "n" | "pos" => ValueKind::Num,
            "F" => ValueKind::Formula,
            _ => return None,
        })
    }
}

impl Value {
    /// Reads back the printed form of the value bound to `key`. Eigen
    /// individuals are accepted.
    pub fn parse(key: &str, text: &str) -> Result<Value, RuleError> {
        let kind = ValueKind::of_key(key).ok_or_else(|| RuleError::Binding(format!("unknown metavariable `{key}`")))?;
        let mut p = Parser::with_options(text, ParseOptions { allow_eigen: true })?;
        fn list<T>(p: &mut Parser, item: impl Fn(&mut Parser) -> Result<T, SyntaxError>) -> Result<Vec<T>, SyntaxError> {
            p.expect_punct("[")?;
            let mut out = Vec::new();
            if !p.eat_punct("]") {
                loop {
                    out.push(item(p)?);
                    if !p.eat_punct(",") {
                        break;
                    }
                }
                p.expect_punct("]")?;
            }
            Ok(out)
        }
        let value = match kind {
            ValueKind::Ind => Value::Ind(p.individual()?),
            ValueKind::Inds => Value::Inds(list(&mut p, Parser::individual)?),
            ValueKind::Concept => Value::Concept(p.concept()?),
            ValueKind::Role => Value::Role(p.role()?),
            ValueKind::Roles => Value::Roles(list(&mut p, Parser::role_element)?),
            ValueKind::Num => Value::Num(text.trim().parse().map_err(|_| RuleError::Binding(format!("`{text}` is not a number")))?),
            ValueKind::Formula => Value::Formula(p.formula()?),
        };
        if kind != ValueKind::Num {
            p.expect_end()?;
        }
        Ok(value)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(v: &[T]) -> String {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        }
        match self {
            Value::Ind(a) => write!(f, "{a}"),
            Value::Inds(v) => write!(f, "[{}]", list(v)),
            Value::Concept(c) => write!(f, "{c}"),
            Value::Role(r) => write!(f, "{r}"),
            Value::Roles(v) => write!(f, "[{}]", list(v)),
            Value::Num(n) => write!(f, "{n}"),
            Value::Formula(g) => write!(f, "{g}"),
        }
    }
}

/// An assignment of values to a schema's metavariables.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binding(pub BTreeMap<String, Value>);

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, key: &str, value: Value) -> Self {
        self.0.insert(key.to_string(), value);
        self
    }

    pub fn ind(self, key: &str, a: &Individual) -> Self {
        self.set(key, Value::Ind(a.clone()))
    }

    pub fn concept(self, key: &str, c: &Arc<Concept>) -> Self {
        self.set(key, Value::Concept(c.clone()))
    }

    pub fn role(self, key: &str, r: &RoleTerm) -> Self {
        self.set(key, Value::Role(r.clone()))
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    fn missing(key: &str, what: &str) -> RuleError {
        RuleError::Binding(format!("metavariable `{key}` must be bound to {what}"))
    }

    pub fn get_ind(&self, key: &str) -> Result<&Individual, RuleError> {
        match self.0.get(key) {
            Some(Value::Ind(a)) => Ok(a),
            _ => Err(Self::missing(key, "an individual")),
        }
    }

    pub fn get_inds(&self, key: &str) -> Result<&[Individual], RuleError> {
        match self.0.get(key) {
            Some(Value::Inds(v)) => Ok(v),
            _ => Err(Self::missing(key, "a list of individuals")),
        }
    }

    pub fn get_concept(&self, key: &str) -> Result<&Arc<Concept>, RuleError> {
        match self.0.get(key) {
            Some(Value::Concept(c)) => Ok(c),
            _ => Err(Self::missing(key, "a concept")),
        }
    }

    pub fn get_role(&self, key: &str) -> Result<&RoleTerm, RuleError> {
        match self.0.get(key) {
            Some(Value::Role(r)) => Ok(r),
            _ => Err(Self::missing(key, "a role")),
        }
    }

    pub fn get_roles(&self, key: &str) -> Result<&[RoleTerm], RuleError> {
        match self.0.get(key) {
            Some(Value::Roles(v)) => Ok(v),
            _ => Err(Self::missing(key, "a list of roles")),
        }
    }

    pub fn get_num(&self, key: &str) -> Result<u32, RuleError> {
        match self.0.get(key) {
            Some(Value::Num(n)) => Ok(*n),
            _ => Err(Self::missing(key, "a number")),
        }
    }

    pub fn get_formula(&self, key: &str) -> Result<&Formula, RuleError> {
        match self.0.get(key) {
            Some(Value::Formula(f)) => Ok(f),
            _ => Err(Self::missing(key, "a formula")),
        }
    }

    /// Applies an individual renaming to every bound value.
    pub fn map_individuals(&self, f: &impl Fn(&Individual) -> Individual) -> Binding {
        Binding(self.0.iter().map(|(k, v)| (k.clone(), v.map_individuals(f))).collect())
    }

    /// Every individual mentioned by a bound value.
    pub fn individuals(&self) -> std::collections::BTreeSet<Individual> {
        let mut out = std::collections::BTreeSet::new();
        for v in self.0.values() {
            match v {
                Value::Ind(a) => {
                    out.insert(a.clone());
                }
                Value::Inds(v) => out.extend(v.iter().cloned()),
                Value::Concept(c) => c.individuals(&mut out),
                Value::Formula(f) => f.collect_individuals(&mut out),
                Value::Role(_) | Value::Roles(_) | Value::Num(_) => {}
            }
        }
        out
    }

    /// The binding with the given keys removed.
    pub fn without(&self, keys: &[String]) -> Binding {
        Binding(self.0.iter().filter(|(k, _)| !keys.contains(k)).map(|(k, v)| (k.clone(), v.clone())).collect())
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{{{}}}", parts.join("; "))
    }
}
