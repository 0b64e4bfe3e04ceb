//! Shared test support: seeded random generators for formulae, sequents and
//! proofs, plus an independent brute-force model finder used as an oracle.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dlsequent::calculus::{Calculus, Definitions, DescriptiveDefinition};
use dlsequent::countermodel::Interpretation;
use dlsequent::meta::identity_proof;
use dlsequent::prover::{prove, Budget, ProofTree, SearchOutcome};
use dlsequent::syntax::{sym, Concept, Feature, Formula, Individual, LanguageProfile, RoleTerm, Sequent, Side};

/// Profiles the random corpora rotate through, from plain ALC to everything.
pub fn rotating_profiles() -> Vec<LanguageProfile> {
    let alc = LanguageProfile::alc();
    vec![
        alc.clone(),
        alc.clone().with(Feature::Equality).with(Feature::Inequality),
        alc.clone().with(Feature::Nominals),
        alc.clone().with(Feature::Inverses).with(Feature::NegatedRoles),
        alc.clone().with(Feature::QualifiedCounting),
        alc.clone().with(Feature::UnqualifiedCounting),
        alc.clone().with(Feature::Compose).with(Feature::Rias),
        alc.clone().with(Feature::Crias),
        alc.clone().with_ddr("Trans").with_ddr("Refl"),
        alc.clone().with_ddr("Irr").with_ddr("Asy").with_ddr("Disj"),
        alc.clone().with(Feature::Functionality),
        alc.clone().with(Feature::UniversalRole).with(Feature::SelfConcept),
        LanguageProfile::full(),
    ]
    .into_iter()
    .map(LanguageProfile::normalized)
    .collect()
}

/// Definitions used by the generators: the built-ins plus two user relations.
pub fn test_definitions() -> Definitions {
    let mut defs = Definitions::builtin();
    defs.parse_file(
        "def Sym(r): forall x y . r(x,y) -> r(y,x)\n\
         def Chain2(r,s,t): forall x y z . r(x,y) & s(y,z) -> t(x,z) | x = z\n",
    )
    .expect("test definitions parse");
    defs
}

/// The full profile with the user relations enabled as well.
pub fn full_with_user_relations() -> LanguageProfile {
    LanguageProfile::full().with_ddr("Sym").with_ddr("Chain2").normalized()
}

/// A seeded generator over a small vocabulary.
pub struct Gen {
    pub rng: ChaCha8Rng,
    pub profile: LanguageProfile,
    pub defs: Definitions,
    pub individuals: Vec<Individual>,
    pub concepts: Vec<&'static str>,
    pub roles: Vec<&'static str>,
}

impl Gen {
    pub fn new(seed: u64, profile: LanguageProfile) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            profile,
            defs: test_definitions(),
            individuals: ["a", "b", "c", "d"].map(Individual::named).to_vec(),
            concepts: vec!["A", "B", "C"],
            roles: vec!["r", "s"],
        }
    }

    pub fn with_vocabulary(mut self, individuals: usize, concepts: usize, roles: usize) -> Self {
        self.individuals.truncate(individuals.max(1));
        self.concepts.truncate(concepts.max(1));
        self.roles.truncate(roles.max(1));
        self
    }

    fn has(&self, f: Feature) -> bool {
        self.profile.has(f)
    }

    pub fn individual(&mut self) -> Individual {
        self.individuals.choose(&mut self.rng).expect("nonempty").clone()
    }

    fn role_name(&mut self) -> &'static str {
        self.roles.choose(&mut self.rng).expect("nonempty")
    }

    /// A role usable inside a concept.
    pub fn role(&mut self) -> RoleTerm {
        let r = self.role_name();
        match self.rng.gen_range(0..10) {
            0 | 1 if self.has(Feature::Inverses) => RoleTerm::inverse(r),
            2 if self.has(Feature::UniversalRole) => RoleTerm::Universal,
            _ => RoleTerm::named(r),
        }
    }

    pub fn concept(&mut self, depth: usize) -> Arc<Concept> {
        let leaf = depth == 0 || self.rng.gen_bool(0.3);
        if leaf {
            return match self.rng.gen_range(0..12) {
                0 => Concept::top(),
                1 => Concept::bottom(),
                2 if self.has(Feature::Nominals) => Concept::nominal(self.individual()),
                3 if self.has(Feature::SelfConcept) => {
                    let r = self.role();
                    Concept::self_loop(r)
                }
                _ => Concept::atomic(self.concepts.choose(&mut self.rng).expect("nonempty")),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..9) {
            0 => Concept::not(self.concept(d)),
            1 => Concept::or(self.concept(d), self.concept(d)),
            2 => Concept::and(self.concept(d), self.concept(d)),
            3 | 4 => {
                let r = self.role();
                Concept::exists(r, self.concept(d))
            }
            5 | 6 => {
                let r = self.role();
                Concept::forall(r, self.concept(d))
            }
            _ if self.has(Feature::QualifiedCounting) || self.has(Feature::UnqualifiedCounting) => {
                let n = self.rng.gen_range(0..=2);
                let r = self.role();
                let p = if self.has(Feature::QualifiedCounting) && self.rng.gen_bool(0.6) {
                    self.concept(d)
                } else {
                    Concept::top()
                };
                if self.rng.gen_bool(0.5) {
                    Concept::at_most(n, r, p)
                } else {
                    Concept::at_least(n, r, p)
                }
            }
            _ => Concept::not(self.concept(d)),
        }
    }

    pub fn assertion(&mut self, depth: usize) -> Formula {
        let a = self.individual();
        Formula::Assert(a, self.concept(depth))
    }

    /// Any formula admitted by the profile.
    pub fn formula(&mut self, depth: usize) -> Formula {
        loop {
            let f = match self.rng.gen_range(0..16) {
                0..=5 => self.assertion(depth),
                6 | 7 => Formula::Gci(self.concept(depth), self.concept(depth)),
                8 | 9 => {
                    let r = if self.has(Feature::Compose) && self.rng.gen_bool(0.3) {
                        let parts = (0..self.rng.gen_range(2..=3)).map(|_| RoleTerm::named(self.role_name()));
                        RoleTerm::chain(parts).expect("two or more links")
                    } else {
                        self.role()
                    };
                    Formula::Role(r, self.individual(), self.individual())
                }
                10 if self.has(Feature::Equality) => Formula::Eq(self.individual(), self.individual()),
                11 if self.has(Feature::Inequality) => Formula::Neq(self.individual(), self.individual()),
                12 if self.has(Feature::NegatedRoles) => {
                    Formula::NegRole(sym(self.role_name()), self.individual(), self.individual())
                }
                13 if self.has(Feature::Rias) || self.has(Feature::Compose) || self.has(Feature::Crias) => {
                    let len = self.rng.gen_range(1..=2);
                    let lhs: Vec<RoleTerm> = (0..len).map(|_| RoleTerm::named(self.role_name())).collect();
                    Formula::Cria(lhs, sym(self.role_name()))
                }
                14 | 15 if !self.profile.ddr_names.is_empty() => {
                    let names: Vec<_> = self.profile.ddr_names.iter().cloned().collect();
                    let name = names.choose(&mut self.rng).expect("nonempty").clone();
                    let arity = self.defs.get(&name).map_or(1, |d| d.roles.len());
                    let args = (0..arity).map(|_| RoleTerm::named(self.role_name())).collect();
                    Formula::Rra(name, args)
                }
                _ => continue,
            };
            if self.profile.check_formula(&f).is_ok() {
                return f;
            }
        }
    }

    /// A sequent of at most `max_len` formulae; with some probability one
    /// formula appears on both sides so that a share of the corpus is valid.
    pub fn sequent(&mut self, max_len: usize, depth: usize) -> Sequent {
        let mut s = Sequent::new();
        let len = self.rng.gen_range(1..=max_len.max(1));
        for _ in 0..len {
            let side = if self.rng.gen_bool(0.5) { Side::Left } else { Side::Right };
            let f = self.formula(depth);
            s.push(side, f);
        }
        if self.rng.gen_bool(0.25) {
            let f = self.formula(depth);
            s.push(Side::Left, f.clone());
            s.push(Side::Right, f);
        }
        s
    }

    /// A random formula whose weight is at most `max_weight`.
    pub fn formula_of_weight(&mut self, max_weight: usize) -> Formula {
        loop {
            let depth = self.rng.gen_range(0..max_weight.max(1));
            let f = self.formula(depth);
            let w = f.weight(|n| self.defs.arity(n)).expect("generated relations are defined");
            if w <= max_weight {
                return f;
            }
        }
    }
}

/// Checked proofs of height at most `max_height`: prover output on random
/// sequents interleaved with identity derivations.
pub fn proof_corpus(seed: u64, count: usize, max_height: usize) -> Vec<(ProofTree, Calculus)> {
    let profiles = rotating_profiles();
    let mut out = Vec::with_capacity(count);
    let mut i = 0u64;
    while out.len() < count {
        let profile = profiles[(i as usize) % profiles.len()].clone();
        let calc = Calculus::assemble(&profile, &test_definitions()).expect("profile assembles");
        let mut g = Gen::new(seed.wrapping_add(i), profile).with_vocabulary(3, 3, 2);
        i += 1;
        let tree = if i.is_multiple_of(2) {
            let s = g.sequent(4, 2);
            match prove(&s, &calc, Budget::steps(300)) {
                Ok(SearchOutcome::Proved(t)) => t,
                _ => continue,
            }
        } else {
            let f = g.formula(2);
            let Ok(t) = identity_proof(&f, &calc) else { continue };
            t
        };
        if tree.height() <= max_height {
            out.push((tree, calc));
        }
    }
    out
}

/// An independent model finder: for each domain size up to `max_domain`,
/// tries every map from individuals to elements and every extension
/// assignment, counting down from the all-true assignment, and evaluates the
/// sequent with the two-valued semantics only.
///
/// Returns the size of the smallest falsifying domain, if any.
pub fn reverse_enumeration_oracle(s: &Sequent, max_domain: u32, defs: &Definitions) -> Option<(u32, Interpretation)> {
    let mut concepts = BTreeSet::new();
    let mut roles = BTreeSet::new();
    for (_, f) in s.formulas() {
        f.concept_names(&mut concepts);
        f.role_names(&mut roles);
    }
    let individuals: Vec<Individual> = s.individuals().into_iter().collect();
    for n in 1..=max_domain {
        let elems: Vec<u32> = (0..n).collect();
        let pairs: Vec<(u32, u32)> = elems.iter().flat_map(|&x| elems.iter().map(move |&y| (x, y))).collect();
        let bits = concepts.len() * elems.len() + roles.len() * pairs.len();
        assert!(bits < 30, "oracle vocabulary too large");
        let maps = (n as u64).pow(individuals.len() as u32);
        for map_code in (0..maps).rev() {
            let mut code = map_code;
            let mut imap = BTreeMap::new();
            for a in &individuals {
                imap.insert(a.clone(), (code % n as u64) as u32);
                code /= n as u64;
            }
            for assignment in (0..(1u64 << bits)).rev() {
                let mut m = Interpretation::with_domain(n);
                m.individuals = imap.clone();
                let mut bit = 0;
                for c in &concepts {
                    let ext = m.concepts.entry(c.clone()).or_default();
                    for &x in &elems {
                        if assignment >> bit & 1 == 1 {
                            ext.insert(x);
                        }
                        bit += 1;
                    }
                }
                for r in &roles {
                    let ext = m.roles.entry(r.clone()).or_default();
                    for &p in &pairs {
                        if assignment >> bit & 1 == 1 {
                            ext.insert(p);
                        }
                        bit += 1;
                    }
                }
                if m.falsifies(s, defs).expect("vocabulary covered") {
                    return Some((n, m));
                }
            }
        }
    }
    None
}

/// A definition from its text form.
pub fn def(text: &str) -> DescriptiveDefinition {
    DescriptiveDefinition::parse(text).expect("definition parses")
}
