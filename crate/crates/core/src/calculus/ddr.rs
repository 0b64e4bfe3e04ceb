//! Descriptive definitions and their compilation into left/right rule pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::syntax::{sym, Formula, Individual, Parser, RoleTerm, Symbol, SyntaxError};

use super::RuleError;

/// An atom of a descriptive definition: `r(x,y)` over a role parameter, or
/// `x = y`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Role(Symbol, Symbol, Symbol),
    Eq(Symbol, Symbol),
}

impl Atom {
    pub fn vars(&self) -> [&Symbol; 2] {
        match self {
            Atom::Role(_, x, y) | Atom::Eq(x, y) => [x, y],
        }
    }

    pub fn rename(&self, f: &impl Fn(&Symbol) -> Symbol) -> Atom {
        match self {
            Atom::Role(r, x, y) => Atom::Role(r.clone(), f(x), f(y)),
            Atom::Eq(x, y) => Atom::Eq(f(x), f(y)),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Role(r, x, y) => write!(f, "{r}({x},{y})"),
            Atom::Eq(x, y) => write!(f, "{x} = {y}"),
        }
    }
}

/// `Rel(r1,…,rl) ↔ ∀x̄ (F1 ∧ … ∧ Fn → G1 ∨ … ∨ Gk)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescriptiveDefinition {
    pub name: Symbol,
    pub roles: Vec<Symbol>,
    pub vars: Vec<Symbol>,
    pub antecedent: Vec<Atom>,
    pub consequent: Vec<Atom>,
}

impl DescriptiveDefinition {
    pub fn validate(&self) -> Result<(), RuleError> {
        let bad = |msg: String| Err(RuleError::Definition(format!("{}: {msg}", self.name)));
        let roles: BTreeSet<&Symbol> = self.roles.iter().collect();
        let vars: BTreeSet<&Symbol> = self.vars.iter().collect();
        if roles.len() != self.roles.len() {
            return bad("repeated role parameter".into());
        }
        if vars.len() != self.vars.len() {
            return bad("repeated variable".into());
        }
        let mut used = BTreeSet::new();
        for atom in self.antecedent.iter().chain(&self.consequent) {
            if let Atom::Role(r, _, _) = atom {
                if !roles.contains(r) {
                    return bad(format!("role `{r}` is not a parameter"));
                }
            }
            for v in atom.vars() {
                if !vars.contains(v) {
                    return bad(format!("variable `{v}` is not bound"));
                }
                used.insert(v);
            }
        }
        if let Some(v) = self.vars.iter().find(|v| !used.contains(v)) {
            return bad(format!("variable `{v}` does not occur in any atom"));
        }
        let distinct: BTreeSet<&Atom> = self.antecedent.iter().collect();
        if distinct.len() != self.antecedent.len() {
            return bad("repeated antecedent atom".into());
        }
        Ok(())
    }

    pub fn uses_equality(&self) -> bool {
        self.antecedent.iter().chain(&self.consequent).any(|a| matches!(a, Atom::Eq(..)))
    }

    /// `(n, k)`: antecedent and consequent sizes.
    pub fn arity(&self) -> (usize, usize) {
        (self.antecedent.len(), self.consequent.len())
    }

    /// Instantiates an atom with actual role arguments and an individual
    /// assignment.
    pub fn instantiate(
        &self,
        atom: &Atom,
        args: &[RoleTerm],
        assign: &BTreeMap<Symbol, Individual>,
    ) -> Result<Formula, RuleError> {
        let ind = |v: &Symbol| {
            assign.get(v).cloned().ok_or_else(|| RuleError::Binding(format!("variable `{v}` is unassigned")))
        };
        Ok(match atom {
            Atom::Role(r, x, y) => {
                let pos = self.roles.iter().position(|p| p == r).expect("validated role parameter");
                let role = args
                    .get(pos)
                    .ok_or_else(|| RuleError::Binding(format!("{} expects {} roles", self.name, self.roles.len())))?;
                Formula::Role(role.clone(), ind(x)?, ind(y)?)
            }
            Atom::Eq(x, y) => Formula::Eq(ind(x)?, ind(y)?),
        })
    }

    fn parse_line(p: &mut Parser) -> Result<DescriptiveDefinition, SyntaxError> {
        p.expect_word("def")?;
        let name = p.ident("a relation name")?;
        if !name.starts_with(|c: char| c.is_ascii_uppercase()) {
            return Err(p.error("relation names start with an uppercase letter"));
        }
        p.expect_punct("(")?;
        let mut roles = Vec::new();
        if !p.is_punct(")") {
            loop {
                roles.push(sym(&p.lower_name("a role parameter")?));
                if !p.eat_punct(",") {
                    break;
                }
            }
        }
        p.expect_punct(")")?;
        p.expect_punct(":")?;
        p.expect_word("forall")?;
        let mut vars = Vec::new();
        while !p.is_punct(".") {
            vars.push(sym(&p.lower_name("a variable")?));
        }
        p.expect_punct(".")?;
        let antecedent = if p.eat_word("true") { Vec::new() } else { Self::atoms(p, "&")? };
        p.expect_punct("->")?;
        let consequent = if p.eat_word("false") { Vec::new() } else { Self::atoms(p, "|")? };
        p.expect_end()?;
        Ok(DescriptiveDefinition { name: sym(&name), roles, vars, antecedent, consequent })
    }

    fn atoms(p: &mut Parser, sep: &str) -> Result<Vec<Atom>, SyntaxError> {
        let mut out = Vec::new();
        loop {
            let first = p.lower_name("a role or variable")?;
            if p.eat_punct("=") {
                out.push(Atom::Eq(sym(&first), sym(&p.lower_name("a variable")?)));
            } else {
                p.expect_punct("(")?;
                let x = p.lower_name("a variable")?;
                p.expect_punct(",")?;
                let y = p.lower_name("a variable")?;
                p.expect_punct(")")?;
                out.push(Atom::Role(sym(&first), sym(&x), sym(&y)));
            }
            if !p.eat_punct(sep) {
                return Ok(out);
            }
        }
    }

    /// Parses one `def Name(r1,...): forall x1 ... . A & ... -> B | ...` line.
    pub fn parse(text: &str) -> Result<DescriptiveDefinition, RuleError> {
        let mut p = Parser::new(text)?;
        let def = Self::parse_line(&mut p)?;
        def.validate()?;
        Ok(def)
    }
}

impl fmt::Display for DescriptiveDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |atoms: &[Atom], sep: &str, empty: &str| {
            if atoms.is_empty() {
                empty.to_string()
            } else {
                atoms.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(sep)
            }
        };
        let roles: Vec<&str> = self.roles.iter().map(|r| r.as_ref()).collect();
        let vars: Vec<&str> = self.vars.iter().map(|v| v.as_ref()).collect();
        write!(
            f,
            "def {}({}): forall {} . {} -> {}",
            self.name,
            roles.join(","),
            vars.join(" "),
            join(&self.antecedent, " & ", "true"),
            join(&self.consequent, " | ", "false")
        )
    }
}

const BUILTIN_SOURCE: [&str; 6] = [
    "def Trans(r): forall a b c . r(a,b) & r(b,c) -> r(a,c)",
    "def Refl(r): forall a . true -> r(a,a)",
    "def Irr(r): forall a . r(a,a) -> false",
    "def Asy(r): forall a b . r(a,b) & r(b,a) -> false",
    "def Disj(r,s): forall a b . r(a,b) & s(a,b) -> false",
    "def Funct(r): forall a b c . r(a,b) & r(a,c) -> b = c",
];

/// A registry of descriptive definitions keyed by relation name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Definitions {
    defs: BTreeMap<Symbol, Arc<DescriptiveDefinition>>,
}

impl Definitions {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Transitivity, reflexivity, irreflexivity, asymmetry, disjointness and
    /// functionality.
    pub fn builtin() -> Self {
        let mut d = Definitions::empty();
        for src in BUILTIN_SOURCE {
            d.insert(DescriptiveDefinition::parse(src).expect("built-in definitions are well formed"));
        }
        d
    }

    pub fn insert(&mut self, def: DescriptiveDefinition) {
        self.defs.insert(def.name.clone(), Arc::new(def));
    }

    pub fn get(&self, name: &str) -> Option<&Arc<DescriptiveDefinition>> {
        self.defs.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<DescriptiveDefinition>> {
        self.defs.values()
    }

    pub fn arity(&self, name: &str) -> Option<(usize, usize)> {
        self.get(name).map(|d| d.arity())
    }

    /// Reads a definition file, one `def` per line; `#` starts a comment.
    /// Later definitions replace earlier ones with the same name.
    pub fn parse_file(&mut self, text: &str) -> Result<(), RuleError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let def = DescriptiveDefinition::parse(line).map_err(|e| match e {
                RuleError::Syntax(s) => RuleError::Syntax(SyntaxError::at(s.message, idx + 1, s.column)),
                other => other,
            })?;
            self.insert(def);
        }
        Ok(())
    }
}

/// The data of one left DDR schema: either the compiled rule itself or a
/// closure variant in which some variables have been identified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DdrLeft {
    pub def: Arc<DescriptiveDefinition>,
    /// Variables of this schema (representatives, for a variant).
    pub vars: Vec<Symbol>,
    /// Principal atoms; duplicates merged in variants.
    pub antecedent: Vec<Atom>,
    /// One premise per atom.
    pub consequent: Vec<Atom>,
    /// For a variant, each identified variable and its representative.
    pub identified: Vec<(Symbol, Symbol)>,
}

impl DdrLeft {
    pub fn base(def: &Arc<DescriptiveDefinition>) -> Self {
        DdrLeft {
            def: def.clone(),
            vars: def.vars.clone(),
            antecedent: def.antecedent.clone(),
            consequent: def.consequent.clone(),
            identified: Vec::new(),
        }
    }

    pub fn is_variant(&self) -> bool {
        !self.identified.is_empty()
    }

    pub fn name(&self) -> String {
        if self.identified.is_empty() {
            format!("{}_l", self.def.name)
        } else {
            let parts: Vec<String> = self.identified.iter().map(|(v, r)| format!("{v}:={r}")).collect();
            format!("{}_l[{}]", self.def.name, parts.join(","))
        }
    }

    /// The representative of every definition variable under this schema's
    /// identification.
    pub fn representative(&self, v: &Symbol) -> Symbol {
        self.identified.iter().find(|(x, _)| x == v).map(|(_, r)| r.clone()).unwrap_or_else(|| v.clone())
    }

    /// The variant for a partition of the definition's variables, given as a
    /// map from each variable to its block's representative. Returns `None`
    /// when the identification creates no duplicate principal atoms.
    pub fn variant(def: &Arc<DescriptiveDefinition>, rep: &BTreeMap<Symbol, Symbol>) -> Option<DdrLeft> {
        let f = |v: &Symbol| rep.get(v).cloned().unwrap_or_else(|| v.clone());
        let renamed: Vec<Atom> = def.antecedent.iter().map(|a| a.rename(&f)).collect();
        let mut merged: Vec<Atom> = Vec::new();
        for a in &renamed {
            if !merged.contains(a) {
                merged.push(a.clone());
            }
        }
        if merged.len() == renamed.len() {
            return None;
        }
        let vars: Vec<Symbol> = def.vars.iter().filter(|v| f(v) == **v).cloned().collect();
        let identified: Vec<(Symbol, Symbol)> =
            def.vars.iter().filter(|v| f(v) != **v).map(|v| (v.clone(), f(v))).collect();
        Some(DdrLeft {
            def: def.clone(),
            vars,
            antecedent: merged,
            consequent: def.consequent.iter().map(|a| a.rename(&f)).collect(),
            identified,
        })
    }

    /// The partition of definition variables this schema realizes, as a
    /// representative map.
    pub fn partition(&self) -> BTreeMap<Symbol, Symbol> {
        self.def.vars.iter().map(|v| (v.clone(), self.representative(v))).collect()
    }
}

/// All set partitions of `items`, each given as a map to the first element of
/// its block. Blocks are listed in order of first occurrence.
pub fn partitions(items: &[Symbol]) -> Vec<BTreeMap<Symbol, Symbol>> {
    fn go(items: &[Symbol], idx: usize, reps: &mut Vec<Symbol>, cur: &mut BTreeMap<Symbol, Symbol>, out: &mut Vec<BTreeMap<Symbol, Symbol>>) {
        if idx == items.len() {
            out.push(cur.clone());
            return;
        }
        let v = items[idx].clone();
        for r in reps.clone() {
            cur.insert(v.clone(), r);
            go(items, idx + 1, reps, cur, out);
        }
        reps.push(v.clone());
        cur.insert(v.clone(), v.clone());
        go(items, idx + 1, reps, cur, out);
        reps.pop();
        cur.remove(&v);
    }
    let mut out = Vec::new();
    go(items, 0, &mut Vec::new(), &mut BTreeMap::new(), &mut out);
    out
}

/// Whether partition `coarse` merges everything `fine` merges.
pub fn coarsens(coarse: &BTreeMap<Symbol, Symbol>, fine: &BTreeMap<Symbol, Symbol>) -> bool {
    fine.iter().all(|(v, r)| coarse.get(v) == coarse.get(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_follow_the_bell_numbers() {
        let vars: Vec<Symbol> = ["x", "y", "z", "w"].map(sym).to_vec();
        for (n, bell) in [(0, 1), (1, 1), (2, 2), (3, 5), (4, 15)] {
            let ps = partitions(&vars[..n]);
            assert_eq!(ps.len(), bell);
            let distinct: BTreeSet<_> = ps.iter().collect();
            assert_eq!(distinct.len(), bell);
        }
    }

    #[test]
    fn coarsening_is_block_merging() {
        let vars: Vec<Symbol> = ["x", "y", "z"].map(sym).to_vec();
        let ps = partitions(&vars);
        let discrete = ps.iter().find(|p| p.iter().all(|(v, r)| v == r)).unwrap();
        let single = ps.iter().find(|p| p.values().all(|r| r.as_ref() == "x")).unwrap();
        for p in &ps {
            assert!(coarsens(p, discrete));
            assert!(coarsens(single, p));
            assert!(coarsens(p, p));
        }
        assert!(!coarsens(discrete, single));
    }
}
