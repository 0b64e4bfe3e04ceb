//! Recursive-descent parser for the text grammar.
//!
//! Concept names start with an uppercase letter; roles and individuals start
//! with a lowercase letter. `U` is the universal role, and names of the form
//! `_eN` are reserved for eigen individuals.

use std::sync::Arc;

use super::{
    sym, Concept, Formula, Individual, LanguageProfile, ParseError, RoleTerm, Sequent, SyntaxError,
};

const KEYWORDS: [&str; 16] = [
    "top", "bot", "not", "or", "and", "some", "all", "atmost", "atleast", "self", "inv", "sub", "true",
    "false", "forall", "def",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Num(u32),
    Punct(&'static str),
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const PUNCTS: [&str; 17] = ["|-", "!=", "->", "(", ")", "{", "}", "[", "]", ",", ";", ":", "=", "|", "&", ".", "#"];

fn tokenize(text: &str) -> Result<(Vec<Token>, (usize, usize)), SyntaxError> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let start = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            out.push(Token { tok: Tok::Ident(word), line: start.0, col: start.1 });
            col += j - i;
            i = j;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            let n = digits
                .parse()
                .map_err(|_| SyntaxError::at(format!("number `{digits}` is too large"), start.0, start.1))?;
            out.push(Token { tok: Tok::Num(n), line: start.0, col: start.1 });
            col += j - i;
            i = j;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                out.push(Token { tok: Tok::Punct(p), line: start.0, col: start.1 });
                col += p.len();
                i += p.len();
            }
            None => return Err(SyntaxError::at(format!("unexpected character `{c}`"), start.0, start.1)),
        }
    }
    Ok((out, (line, col)))
}

fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

fn is_lower_name(word: &str) -> bool {
    word.starts_with(|c: char| c.is_ascii_lowercase()) && !is_keyword(word)
}

fn is_upper_name(word: &str) -> bool {
    word.starts_with(|c: char| c.is_ascii_uppercase()) && word != "U" && word != "Rel"
}

fn eigen_index(word: &str) -> Option<u32> {
    word.strip_prefix("_e").and_then(|d| d.parse().ok())
}

/// Parser configuration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept `_eN` individual names; used when reading back machine output.
    pub allow_eigen: bool,
}

/// A token-stream parser over one piece of text.
pub struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: (usize, usize),
    options: ParseOptions,
}

impl Parser {
    pub fn new(text: &str) -> Result<Self, SyntaxError> {
        Self::with_options(text, ParseOptions::default())
    }

    pub fn with_options(text: &str, options: ParseOptions) -> Result<Self, SyntaxError> {
        let (tokens, end) = tokenize(text)?;
        Ok(Parser { tokens, pos: 0, end, options })
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + k).map(|t| &t.tok)
    }

    fn peek(&self) -> Option<&Tok> {
        self.peek_at(0)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> SyntaxError {
        let (line, col) = self.here();
        SyntaxError::at(message, line, col)
    }

    fn describe_next(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(Tok::Ident(w)) => format!("`{w}`"),
            Some(Tok::Num(n)) => format!("`{n}`"),
            Some(Tok::Punct(p)) => format!("`{p}`"),
        }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn expect_end(&self) -> Result<(), SyntaxError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", self.describe_next())))
        }
    }

    pub(crate) fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn is_punct_at(&self, k: usize, p: &str) -> bool {
        matches!(self.peek_at(k), Some(Tok::Punct(q)) if *q == p)
    }

    pub(crate) fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == w)
    }

    fn word_at(&self, k: usize) -> Option<&str> {
        match self.peek_at(k) {
            Some(Tok::Ident(w)) => Some(w),
            _ => None,
        }
    }

    pub(crate) fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_punct(&mut self, p: &str) -> Result<(), SyntaxError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{p}`, found {}", self.describe_next())))
        }
    }

    pub(crate) fn expect_word(&mut self, w: &str) -> Result<(), SyntaxError> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{w}`, found {}", self.describe_next())))
        }
    }

    pub(crate) fn ident(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.error(format!("expected {what}, found {}", self.describe_next()))),
        }
    }

    fn number(&mut self) -> Result<u32, SyntaxError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error(format!("expected a number, found {}", self.describe_next()))),
        }
    }

    /// A lowercase name that is not a keyword (roles, individuals, variables).
    pub(crate) fn lower_name(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(w)) if is_lower_name(w) => self.ident(what),
            _ => Err(self.error(format!("expected {what}, found {}", self.describe_next()))),
        }
    }

    pub fn individual(&mut self) -> Result<Individual, SyntaxError> {
        if let Some(w) = self.word_at(0) {
            if let Some(i) = eigen_index(w) {
                if !self.options.allow_eigen {
                    return Err(self.error(format!("`{w}` is reserved for eigen individuals")));
                }
                self.pos += 1;
                return Ok(Individual::Eigen(i));
            }
        }
        Ok(Individual::Named(sym(&self.lower_name("an individual")?)))
    }

    fn looks_like_individual(&self, k: usize) -> bool {
        match self.word_at(k) {
            Some(w) => is_lower_name(w) || eigen_index(w).is_some(),
            None => false,
        }
    }

    /// One element of a role expression: `r`, `inv r`, `U`, or a
    /// parenthesized role.
    pub fn role_element(&mut self) -> Result<RoleTerm, SyntaxError> {
        if self.eat_word("inv") {
            let (line, col) = self.here();
            if self.is_word("U") || self.is_word("inv") || self.is_punct("(") {
                return Err(SyntaxError::at("`inv` applies only to a named role", line, col));
            }
            return Ok(RoleTerm::Inverse(sym(&self.lower_name("a role name")?)));
        }
        if self.eat_word("U") {
            return Ok(RoleTerm::Universal);
        }
        if self.eat_punct("(") {
            let r = self.role()?;
            self.expect_punct(")")?;
            return Ok(r);
        }
        Ok(RoleTerm::Named(sym(&self.lower_name("a role")?)))
    }

    /// A role expression, possibly a `;`-separated chain.
    pub fn role(&mut self) -> Result<RoleTerm, SyntaxError> {
        let mut parts = vec![self.role_element()?];
        while self.eat_punct(";") {
            parts.push(self.role_element()?);
        }
        RoleTerm::chain(parts).map_err(|e| self.error(e.message))
    }

    fn concept_role(&mut self) -> Result<RoleTerm, SyntaxError> {
        let (line, col) = self.here();
        let r = self.role_element()?;
        if r.is_chain() {
            return Err(SyntaxError::at("role chains are not allowed inside concepts", line, col));
        }
        Ok(r)
    }

    pub fn concept(&mut self) -> Result<Arc<Concept>, SyntaxError> {
        let (line, col) = self.here();
        let word = match self.peek() {
            Some(Tok::Ident(w)) => w.clone(),
            Some(Tok::Punct("(")) => {
                self.pos += 1;
                let mut acc = self.concept()?;
                let mut op: Option<&'static str> = None;
                loop {
                    let next = if self.is_word("or") {
                        "or"
                    } else if self.is_word("and") {
                        "and"
                    } else {
                        break;
                    };
                    if op.is_some_and(|o| o != next) {
                        return Err(self.error("mixing `or` and `and` requires parentheses"));
                    }
                    op = Some(next);
                    self.pos += 1;
                    let rhs = self.concept()?;
                    acc = if next == "or" { Concept::or(acc, rhs) } else { Concept::and(acc, rhs) };
                }
                self.expect_punct(")")?;
                return Ok(acc);
            }
            Some(Tok::Punct("{")) => {
                self.pos += 1;
                let a = self.individual()?;
                self.expect_punct("}")?;
                return Ok(Concept::nominal(a));
            }
            _ => return Err(self.error(format!("expected a concept, found {}", self.describe_next()))),
        };
        self.pos += 1;
        Ok(match word.as_str() {
            "top" => Concept::top(),
            "bot" => Concept::bottom(),
            "not" => Concept::not(self.concept()?),
            "some" => {
                let r = self.concept_role()?;
                Concept::exists(r, self.concept()?)
            }
            "all" => {
                let r = self.concept_role()?;
                Concept::forall(r, self.concept()?)
            }
            "atmost" | "atleast" => {
                let n = self.number()?;
                let r = self.concept_role()?;
                let p = self.concept()?;
                if word == "atmost" {
                    Concept::at_most(n, r, p)
                } else {
                    Concept::at_least(n, r, p)
                }
            }
            "self" => Concept::self_loop(self.concept_role()?),
            w if is_upper_name(w) => Concept::atomic(w),
            w => return Err(SyntaxError::at(format!("expected a concept, found `{w}`"), line, col)),
        })
    }

    fn role_list(&mut self) -> Result<Vec<RoleTerm>, SyntaxError> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if !self.is_punct(")") {
            loop {
                let (line, col) = self.here();
                let r = self.role()?;
                if r.is_chain() {
                    return Err(SyntaxError::at("relation arguments must not be chains", line, col));
                }
                args.push(r);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok(args)
    }

    fn individual_pair(&mut self) -> Result<(Individual, Individual), SyntaxError> {
        self.expect_punct("(")?;
        let a = self.individual()?;
        self.expect_punct(",")?;
        let b = self.individual()?;
        self.expect_punct(")")?;
        Ok((a, b))
    }

    pub fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let (line, col) = self.here();
        let f = self.formula_inner()?;
        f.validate().map_err(|e| SyntaxError::at(e.message, line, col))?;
        Ok(f)
    }

    fn formula_inner(&mut self) -> Result<Formula, SyntaxError> {
        // a : P, a = b, a != b
        if self.looks_like_individual(0)
            && (self.is_punct_at(1, ":") || self.is_punct_at(1, "=") || self.is_punct_at(1, "!="))
        {
            let a = self.individual()?;
            if self.eat_punct(":") {
                return Ok(Formula::Assert(a, self.concept()?));
            }
            if self.eat_punct("=") {
                return Ok(Formula::Eq(a, self.individual()?));
            }
            self.expect_punct("!=")?;
            return Ok(Formula::Neq(a, self.individual()?));
        }
        // not r(a,b)
        if self.is_word("not") && self.word_at(1).is_some_and(is_lower_name) && self.is_punct_at(2, "(") {
            self.pos += 1;
            let r = sym(&self.lower_name("a role")?);
            let (a, b) = self.individual_pair()?;
            return Ok(Formula::NegRole(r, a, b));
        }
        // Rel[Name](...) and relation sugar
        if self.is_word("Rel") && self.is_punct_at(1, "[") {
            self.pos += 2;
            let name = self.ident("a relation name")?;
            self.expect_punct("]")?;
            let args = self.role_list()?;
            return Ok(Formula::Rra(sym(&name), args));
        }
        if let Some(w) = self.word_at(0) {
            if is_upper_name(w) && self.is_punct_at(1, "(") {
                let name = sym(w);
                self.pos += 1;
                let args = self.role_list()?;
                return Ok(Formula::Rra(name, args));
            }
        }
        // role-led: R(a,b) and r1;...;rn sub r
        let role_led = match self.peek() {
            Some(Tok::Ident(w)) => w == "inv" || w == "U" || is_lower_name(w),
            Some(Tok::Punct("(")) => self.word_at(1) == Some("inv"),
            _ => false,
        };
        if role_led {
            let r = self.role()?;
            if self.is_punct("(") {
                let (a, b) = self.individual_pair()?;
                return Ok(Formula::Role(r, a, b));
            }
            self.expect_word("sub")?;
            let rhs = sym(&self.lower_name("a named role")?);
            return Ok(Formula::Cria(r.links().to_vec(), rhs));
        }
        let p = self.concept()?;
        self.expect_word("sub")?;
        let q = self.concept()?;
        Ok(Formula::Gci(p, q))
    }

    fn formula_list(&mut self, stop: &str) -> Result<Vec<Formula>, SyntaxError> {
        let mut out = Vec::new();
        if self.at_end() || self.is_punct(stop) {
            return Ok(out);
        }
        loop {
            out.push(self.formula()?);
            if !self.eat_punct(",") {
                return Ok(out);
            }
        }
    }

    /// `EF*, IF* |- IF*, EF*`; zones are inferred from the formula classes.
    pub fn sequent(&mut self) -> Result<Sequent, SyntaxError> {
        let left = self.formula_list("|-")?;
        self.expect_punct("|-")?;
        let right = self.formula_list("")?;
        Ok(Sequent::from_sides(left, right))
    }
}

fn finish<T>(
    text: &str,
    options: ParseOptions,
    profile: &LanguageProfile,
    run: impl FnOnce(&mut Parser) -> Result<T, SyntaxError>,
    check: impl FnOnce(&LanguageProfile, &T) -> Result<(), super::ProfileViolation>,
) -> Result<T, ParseError> {
    let mut p = Parser::with_options(text, options)?;
    let value = run(&mut p)?;
    p.expect_end()?;
    check(profile, &value)?;
    Ok(value)
}

pub fn parse_sequent(text: &str, profile: &LanguageProfile) -> Result<Sequent, ParseError> {
    finish(text, ParseOptions::default(), profile, Parser::sequent, LanguageProfile::check_sequent)
}

pub fn parse_formula(text: &str, profile: &LanguageProfile) -> Result<Formula, ParseError> {
    finish(text, ParseOptions::default(), profile, Parser::formula, LanguageProfile::check_formula)
}

pub fn parse_concept(text: &str, profile: &LanguageProfile) -> Result<Arc<Concept>, ParseError> {
    finish(text, ParseOptions::default(), profile, Parser::concept, |p, c| p.check_concept(c))
}

pub fn parse_role(text: &str, profile: &LanguageProfile) -> Result<RoleTerm, ParseError> {
    finish(text, ParseOptions::default(), profile, Parser::role, LanguageProfile::check_role)
}

/// A knowledge base: terminological and assertional formulae.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub tbox: Vec<Formula>,
    pub abox: Vec<Formula>,
}

impl KnowledgeBase {
    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.tbox.iter().chain(self.abox.iter())
    }

    /// The sequent with the whole KB as antecedent and the given consequent.
    pub fn entails(&self, consequent: impl IntoIterator<Item = Formula>) -> Sequent {
        Sequent::from_sides(self.formulas().cloned(), consequent)
    }

    /// Reads `tbox: <EF>` and `abox: <assertion>` lines without profile checks.
    pub fn parse_unchecked(text: &str) -> Result<KnowledgeBase, SyntaxError> {
        let mut kb = KnowledgeBase::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let shift = |e: SyntaxError| SyntaxError::at(e.message, idx + 1, e.column);
            let mut p = Parser::new(line).map_err(shift)?;
            let head = p.ident("`tbox` or `abox`").map_err(shift)?;
            p.expect_punct(":").map_err(shift)?;
            let (_, col) = p.here();
            let f = p.formula().map_err(shift)?;
            p.expect_end().map_err(shift)?;
            let at = |msg: &str| SyntaxError::at(msg, idx + 1, col);
            match head.as_str() {
                "tbox" if f.is_external() => kb.tbox.push(f),
                "tbox" => return Err(at("a TBox line must hold an external formula")),
                "abox" => match f {
                    Formula::Assert(..)
                    | Formula::Role(..)
                    | Formula::NegRole(..)
                    | Formula::Eq(..)
                    | Formula::Neq(..) => kb.abox.push(f),
                    _ => return Err(at("an ABox line must hold an assertion")),
                },
                _ => return Err(SyntaxError::at(format!("unknown section `{head}`"), idx + 1, 1)),
            }
        }
        Ok(kb)
    }
}

pub fn parse_kb(text: &str, profile: &LanguageProfile) -> Result<KnowledgeBase, ParseError> {
    let kb = KnowledgeBase::parse_unchecked(text)?;
    kb.formulas().try_for_each(|f| profile.check_formula(f))?;
    Ok(kb)
}
