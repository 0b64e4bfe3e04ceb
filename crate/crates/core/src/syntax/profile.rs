use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{sym, Concept, Formula, RoleTerm, Sequent, SyntaxError, Symbol};

pub const DEFAULT_COUNTING_CEILING: u32 = 8;

/// Optional language features on top of ALC.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Feature {
    Compose,
    Rias,
    Crias,
    Nominals,
    Inverses,
    Functionality,
    UnqualifiedCounting,
    QualifiedCounting,
    Equality,
    Inequality,
    NegatedRoles,
    UniversalRole,
    SelfConcept,
}

impl Feature {
    pub const ALL: [Feature; 13] = [
        Feature::Compose,
        Feature::Rias,
        Feature::Crias,
        Feature::Nominals,
        Feature::Inverses,
        Feature::Functionality,
        Feature::UnqualifiedCounting,
        Feature::QualifiedCounting,
        Feature::Equality,
        Feature::Inequality,
        Feature::NegatedRoles,
        Feature::UniversalRole,
        Feature::SelfConcept,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Compose => "compose",
            Feature::Rias => "rias",
            Feature::Crias => "crias",
            Feature::Nominals => "nominals",
            Feature::Inverses => "inverses",
            Feature::Functionality => "functionality",
            Feature::UnqualifiedCounting => "unqualifiedCounting",
            Feature::QualifiedCounting => "qualifiedCounting",
            Feature::Equality => "equality",
            Feature::Inequality => "inequality",
            Feature::NegatedRoles => "negatedRoles",
            Feature::UniversalRole => "universalRole",
            Feature::SelfConcept => "selfConcept",
        }
    }

    /// Features this one cannot work without.
    fn implies(self) -> &'static [Feature] {
        match self {
            Feature::Nominals
            | Feature::Functionality
            | Feature::QualifiedCounting
            | Feature::UnqualifiedCounting
            | Feature::Inequality => &[Feature::Equality],
            Feature::Crias => &[Feature::Compose],
            _ => &[],
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Feature::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown feature `{s}`"))
    }
}

/// A construct that the active profile does not admit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("profile violation: `{construct}` requires {requirement}")]
pub struct ProfileViolation {
    pub construct: String,
    pub requirement: String,
}

impl ProfileViolation {
    fn feature(construct: impl fmt::Display, feature: Feature) -> Self {
        ProfileViolation { construct: construct.to_string(), requirement: format!("feature `{feature}`") }
    }
}

/// The DL language a calculus is built for: a set of features plus the names
/// of the role relational axioms that may be used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageProfile {
    pub features: BTreeSet<Feature>,
    pub ddr_names: BTreeSet<Symbol>,
    pub counting_ceiling: u32,
}

impl Default for LanguageProfile {
    fn default() -> Self {
        LanguageProfile { features: BTreeSet::new(), ddr_names: BTreeSet::new(), counting_ceiling: DEFAULT_COUNTING_CEILING }
    }
}

impl LanguageProfile {
    /// Plain ALC.
    pub fn alc() -> Self {
        Self::default()
    }

    /// Every feature, with the built-in relation names enabled.
    pub fn full() -> Self {
        let mut p = LanguageProfile::alc();
        p.features.extend(Feature::ALL);
        for name in ["Trans", "Refl", "Irr", "Asy", "Disj", "Funct"] {
            p.ddr_names.insert(sym(name));
        }
        p.normalized()
    }

    pub fn with(mut self, feature: Feature) -> Self {
        self.features.insert(feature);
        self
    }

    pub fn with_ddr(mut self, name: &str) -> Self {
        self.ddr_names.insert(sym(name));
        self
    }

    pub fn has(&self, feature: Feature) -> bool {
        self.features.contains(&feature)
    }

    /// Closes the feature set under its dependencies.
    pub fn normalize(&mut self) {
        loop {
            let implied: Vec<Feature> =
                self.features.iter().flat_map(|f| f.implies().iter().copied()).collect();
            let before = self.features.len();
            self.features.extend(implied);
            if self.features.len() == before {
                break;
            }
        }
        if self.has(Feature::Functionality) {
            self.ddr_names.insert(sym("Funct"));
        }
        if self.ddr_names.contains("Funct") {
            self.features.insert(Feature::Equality);
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    pub fn is_normalized(&self) -> bool {
        &self.clone().normalized() == self
    }

    /// Whether `r1;...;rn sub r` is admitted, and which feature is missing if not.
    pub fn cria_requirement(lhs: &[RoleTerm], rhs: &Symbol) -> Feature {
        match lhs {
            [_] => Feature::Rias,
            [RoleTerm::Named(a), RoleTerm::Named(b)] if a == rhs && b == rhs => Feature::Compose,
            _ => Feature::Crias,
        }
    }

    pub fn admits_cria(&self, lhs: &[RoleTerm], rhs: &Symbol) -> bool {
        self.has(Feature::Crias) || self.has(Self::cria_requirement(lhs, rhs))
    }

    pub fn check_role(&self, r: &RoleTerm) -> Result<(), ProfileViolation> {
        match r {
            RoleTerm::Named(_) => Ok(()),
            RoleTerm::Inverse(_) => self.require(r, Feature::Inverses),
            RoleTerm::Universal => self.require(r, Feature::UniversalRole),
            RoleTerm::Chain(parts) => {
                self.require(r, Feature::Compose)?;
                parts.iter().try_for_each(|p| self.check_role(p))
            }
        }
    }

    fn require(&self, construct: impl fmt::Display, feature: Feature) -> Result<(), ProfileViolation> {
        if self.has(feature) {
            Ok(())
        } else {
            Err(ProfileViolation::feature(construct, feature))
        }
    }

    pub fn check_concept(&self, c: &Concept) -> Result<(), ProfileViolation> {
        match c {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom => Ok(()),
            Concept::Not(p) => self.check_concept(p),
            Concept::Or(p, q) | Concept::And(p, q) => {
                self.check_concept(p)?;
                self.check_concept(q)
            }
            Concept::Exists(r, p) | Concept::Forall(r, p) => {
                self.check_role(r)?;
                self.check_concept(p)
            }
            Concept::Nominal(_) => self.require(c, Feature::Nominals),
            Concept::AtMost(n, r, p) | Concept::AtLeast(n, r, p) => {
                let unqualified = matches!(p.as_ref(), Concept::Top);
                let ok = self.has(Feature::QualifiedCounting)
                    || (unqualified && self.has(Feature::UnqualifiedCounting));
                if !ok {
                    let f = if unqualified { Feature::UnqualifiedCounting } else { Feature::QualifiedCounting };
                    return Err(ProfileViolation::feature(c, f));
                }
                if *n > self.counting_ceiling {
                    return Err(ProfileViolation {
                        construct: c.to_string(),
                        requirement: format!("a counting bound of at most {}", self.counting_ceiling),
                    });
                }
                self.check_role(r)?;
                self.check_concept(p)
            }
            Concept::SelfLoop(r) => {
                self.require(c, Feature::SelfConcept)?;
                self.check_role(r)
            }
        }
    }

    pub fn check_formula(&self, f: &Formula) -> Result<(), ProfileViolation> {
        match f {
            Formula::Assert(_, p) => self.check_concept(p),
            Formula::Gci(p, q) => {
                self.check_concept(p)?;
                self.check_concept(q)
            }
            Formula::Role(r, _, _) => self.check_role(r),
            Formula::NegRole(..) => self.require(f, Feature::NegatedRoles),
            Formula::Cria(lhs, rhs) => {
                if !self.admits_cria(lhs, rhs) {
                    return Err(ProfileViolation::feature(f, Self::cria_requirement(lhs, rhs)));
                }
                lhs.iter().try_for_each(|r| self.check_role(r))
            }
            Formula::Rra(name, args) => {
                if !self.ddr_names.contains(name) {
                    return Err(ProfileViolation {
                        construct: f.to_string(),
                        requirement: format!("relation `{name}` to be enabled (`ddr {name}`)"),
                    });
                }
                args.iter().try_for_each(|r| self.check_role(r))
            }
            Formula::Eq(..) => self.require(f, Feature::Equality),
            Formula::Neq(..) => self.require(f, Feature::Inequality),
        }
    }

    pub fn check_sequent(&self, s: &Sequent) -> Result<(), ProfileViolation> {
        s.formulas().try_for_each(|(_, f)| self.check_formula(f))
    }

    /// The smallest normalized profile admitting every given formula.
    pub fn infer<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> LanguageProfile {
        let mut p = LanguageProfile::alc();
        for f in formulas {
            p.absorb_formula(f);
        }
        p.normalized()
    }

    fn absorb_role(&mut self, r: &RoleTerm) {
        match r {
            RoleTerm::Named(_) => {}
            RoleTerm::Inverse(_) => {
                self.features.insert(Feature::Inverses);
            }
            RoleTerm::Universal => {
                self.features.insert(Feature::UniversalRole);
            }
            RoleTerm::Chain(parts) => {
                self.features.insert(Feature::Compose);
                parts.iter().for_each(|p| self.absorb_role(p));
            }
        }
    }

    fn absorb_concept(&mut self, c: &Concept) {
        match c {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom => {}
            Concept::Not(p) => self.absorb_concept(p),
            Concept::Or(p, q) | Concept::And(p, q) => {
                self.absorb_concept(p);
                self.absorb_concept(q);
            }
            Concept::Exists(r, p) | Concept::Forall(r, p) => {
                self.absorb_role(r);
                self.absorb_concept(p);
            }
            Concept::Nominal(_) => {
                self.features.insert(Feature::Nominals);
            }
            Concept::AtMost(n, r, p) | Concept::AtLeast(n, r, p) => {
                let f = if matches!(p.as_ref(), Concept::Top) {
                    Feature::UnqualifiedCounting
                } else {
                    Feature::QualifiedCounting
                };
                self.features.insert(f);
                self.counting_ceiling = self.counting_ceiling.max(*n);
                self.absorb_role(r);
                self.absorb_concept(p);
            }
            Concept::SelfLoop(r) => {
                self.features.insert(Feature::SelfConcept);
                self.absorb_role(r);
            }
        }
    }

    fn absorb_formula(&mut self, f: &Formula) {
        match f {
            Formula::Assert(_, p) => self.absorb_concept(p),
            Formula::Gci(p, q) => {
                self.absorb_concept(p);
                self.absorb_concept(q);
            }
            Formula::Role(r, _, _) => self.absorb_role(r),
            Formula::NegRole(..) => {
                self.features.insert(Feature::NegatedRoles);
            }
            Formula::Cria(lhs, rhs) => {
                self.features.insert(Self::cria_requirement(lhs, rhs));
                lhs.iter().for_each(|r| self.absorb_role(r));
            }
            Formula::Rra(name, args) => {
                self.ddr_names.insert(name.clone());
                args.iter().for_each(|r| self.absorb_role(r));
            }
            Formula::Eq(..) => {
                self.features.insert(Feature::Equality);
            }
            Formula::Neq(..) => {
                self.features.insert(Feature::Inequality);
            }
        }
    }

    /// Reads a profile file: one feature name or `ddr Name` per line, plus an
    /// optional `ceiling N`. `#` starts a comment.
    pub fn parse_file(text: &str) -> Result<LanguageProfile, SyntaxError> {
        let mut p = LanguageProfile::alc();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let head = words.next().unwrap();
            let arg = words.next();
            let extra = words.next();
            let err = |msg: String| SyntaxError::at(msg, idx + 1, 1);
            if extra.is_some() {
                return Err(err(format!("unexpected text in `{line}`")));
            }
            match (head, arg) {
                ("ddr", Some(name)) => {
                    p.ddr_names.insert(sym(name));
                }
                ("ceiling", Some(n)) => {
                    p.counting_ceiling = n.parse().map_err(|_| err(format!("invalid ceiling `{n}`")))?;
                }
                (flag, None) => {
                    p.features.insert(flag.parse().map_err(err)?);
                }
                _ => return Err(err(format!("cannot read profile line `{line}`"))),
            }
        }
        Ok(p.normalized())
    }
}

impl fmt::Display for LanguageProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for feature in &self.features {
            writeln!(f, "{feature}")?;
        }
        for name in &self.ddr_names {
            writeln!(f, "ddr {name}")?;
        }
        if self.counting_ceiling != DEFAULT_COUNTING_CEILING {
            writeln!(f, "ceiling {}", self.counting_ceiling)?;
        }
        Ok(())
    }
}
