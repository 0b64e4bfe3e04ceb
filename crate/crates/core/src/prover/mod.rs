//! Fair backward proof search.
//!
//! Each branch cycles through the calculus's schemata in its cyclic order.
//! Before every application the current sequent is checked for a closing
//! instance. A schema's matches are applied one after another unless they
//! are redundant: already applied on the branch, or with some premise that
//! adds nothing to the branch's accumulated antecedent and consequent sets.
//! A branch on which a full cycle applies nothing is saturated. All rules
//! are invertible, so the search never backtracks.

mod check;
mod tree;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::calculus::{Binding, Calculus, Rule, RuleClass, RuleError, RuleSchema};
use crate::syntax::{Concept, Formula, Individual, ProfileViolation, RoleTerm, Sequent, Side};

pub use check::{check_node, check_proof, ProofViolation};
pub use tree::{ProofTree, RuleLabel, TreeFormatError};

/// Search limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Total rule applications across all branches.
    pub max_steps: usize,
    /// Largest sequent a branch may reach.
    pub max_branch_formulas: usize,
    /// Longest root-to-leaf path.
    pub max_depth: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_steps: 10_000, max_branch_formulas: 2_000, max_depth: 1_000 }
    }
}

impl Budget {
    pub fn steps(max_steps: usize) -> Self {
        Budget { max_steps, ..Budget::default() }
    }
}

/// The state of one branch of the search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchState {
    /// The branch's current top sequent.
    pub sequent: Sequent,
    /// Every formula that has occurred in an antecedent on the branch.
    pub theta: BTreeSet<Formula>,
    /// Every formula that has occurred in a consequent on the branch.
    pub omega: BTreeSet<Formula>,
    /// Applied `(schema, match)` pairs; matches exclude eigen parameters.
    pub marks: BTreeSet<(String, Binding)>,
    /// Index of the next eigen individual.
    pub eigen_counter: u32,
    position: usize,
    pending: VecDeque<Binding>,
    idle: usize,
}

impl BranchState {
    pub fn new(root: &Sequent) -> Self {
        let next = root.individuals().iter().filter_map(Individual::eigen_index).max().map_or(1, |m| m + 1);
        BranchState {
            sequent: root.clone(),
            theta: root.left().cloned().collect(),
            omega: root.right().cloned().collect(),
            marks: BTreeSet::new(),
            eigen_counter: next,
            position: 0,
            pending: VecDeque::new(),
            idle: 0,
        }
    }

    /// Individuals occurring on the branch.
    pub fn individuals(&self) -> BTreeSet<Individual> {
        let mut out = BTreeSet::new();
        for f in self.theta.iter().chain(&self.omega) {
            f.collect_individuals(&mut out);
        }
        out
    }

    fn holds(&self, side: Side, f: &Formula) -> bool {
        match side {
            Side::Left => self.theta.contains(f),
            Side::Right => self.omega.contains(f),
        }
    }

    fn generator_domain(&self) -> Vec<Individual> {
        let inds: Vec<Individual> = self.sequent.individuals().into_iter().collect();
        if inds.is_empty() {
            vec![Individual::eigen(self.eigen_counter)]
        } else {
            inds
        }
    }

    fn advance(&mut self, premise: &Sequent, eigen_used: usize) {
        for (side, f) in premise.formulas() {
            match side {
                Side::Left => self.theta.insert(f.clone()),
                Side::Right => self.omega.insert(f.clone()),
            };
        }
        self.eigen_counter += eigen_used as u32;
    }
}

/// The result of a search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// A closed, checked derivation of the root.
    Proved(ProofTree),
    /// An open branch closed under every non-redundant rule application.
    Saturated(Box<BranchState>),
    /// Neither verdict within the budget; the partial tree has open leaves.
    BudgetExhausted(ProofTree),
}

impl SearchOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, SearchOutcome::Proved(_))
    }

    pub fn is_saturated(&self) -> bool {
        matches!(self, SearchOutcome::Saturated(_))
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            SearchOutcome::Proved(_) => "proved",
            SearchOutcome::Saturated(_) => "saturated",
            SearchOutcome::BudgetExhausted(_) => "unknown",
        }
    }
}

/// Counters collected during a search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Rule applications, closing ones included.
    pub steps: usize,
    /// Branches explored.
    pub branches: usize,
    /// Largest sequent seen on any branch.
    pub max_branch_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProveError {
    #[error(transparent)]
    Profile(#[from] ProfileViolation),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

enum Branch {
    Closed(ProofTree),
    Saturated(Box<BranchState>),
    Exhausted(ProofTree),
}

/// An application chosen for a branch: the schema, its binding with eigen
/// individuals filled in, the premises, and how many eigen individuals it used.
type Scheduled<'c> = (&'c RuleSchema, Binding, Vec<Sequent>, usize);

/// A configured search over one calculus.
pub struct Prover<'c> {
    calculus: &'c Calculus,
    budget: Budget,
    schemas: Vec<&'c RuleSchema>,
    closing: Vec<&'c RuleSchema>,
    branching: Vec<&'c RuleSchema>,
    /// One-premise schemata that consume their principal formulae. These are
    /// invertible, so applying them ahead of the cyclic order loses nothing.
    eager: Vec<&'c RuleSchema>,
    /// Whether some closing schema can match relational atoms that share no
    /// individual, so that probes must carry every atom.
    global_atoms: bool,
    /// Whether a closing schema other than the identity rules takes role
    /// atoms in the antecedent as principal formulae.
    atoms_close_alone: bool,
    stats: SearchStats,
}

impl<'c> Prover<'c> {
    pub fn new(calculus: &'c Calculus, budget: Budget) -> Self {
        let schemas: Vec<&RuleSchema> = calculus.cyclic_order().collect();
        let closing = schemas.iter().copied().filter(|s| s.may_close()).collect();
        let branching = schemas.iter().copied().filter(|s| s.class == RuleClass::Branching).collect();
        let eager = schemas
            .iter()
            .copied()
            .filter(|s| {
                let p = s.pattern();
                p.premises.len() == 1 && !p.consumed.is_empty()
            })
            .collect();
        let global_atoms = schemas.iter().any(|s| s.may_close() && matches!(s.rule, Rule::RelL(_)));
        let atoms_close_alone = schemas
            .iter()
            .any(|s| s.may_close() && !matches!(s.rule, Rule::IdC | Rule::IdR | Rule::BotL | Rule::TopR));
        Prover {
            calculus,
            budget,
            schemas,
            closing,
            branching,
            eager,
            global_atoms,
            atoms_close_alone,
            stats: SearchStats::default(),
        }
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    /// Searches for a derivation of `root`.
    pub fn run(&mut self, root: &Sequent) -> Result<SearchOutcome, ProveError> {
        self.calculus.profile().check_sequent(root)?;
        self.stats = SearchStats::default();
        Ok(match self.branch(BranchState::new(root), 0)? {
            Branch::Closed(t) => SearchOutcome::Proved(t),
            Branch::Saturated(s) => SearchOutcome::Saturated(s),
            Branch::Exhausted(t) => SearchOutcome::BudgetExhausted(t),
        })
    }

    /// A closing instance on `sequent`, if any.
    fn find_closing(&self, sequent: &Sequent, domain: &[Individual]) -> Result<Option<(&'c RuleSchema, Binding)>, RuleError> {
        for &schema in &self.closing {
            for binding in schema.matches(sequent, domain) {
                if schema.eigen_count(&binding) > 0 {
                    continue;
                }
                let inst = schema.instance(&binding)?;
                if inst.premises.is_empty() && sequent.includes(&inst.principal) {
                    return Ok(Some((schema, binding)));
                }
            }
        }
        Ok(None)
    }

    /// Closes `sequent` with an initial instance when one exists.
    fn closing_instance(&mut self, sequent: &Sequent, domain: &[Individual]) -> Result<Option<ProofTree>, RuleError> {
        if self.stats.steps >= self.budget.max_steps {
            return Ok(None);
        }
        let Some((schema, binding)) = self.find_closing(sequent, domain)? else { return Ok(None) };
        self.stats.steps += 1;
        Ok(Some(ProofTree::node(sequent.clone(), &schema.name, binding, Vec::new())))
    }

    /// Whether adding `adds` to `base` can create a closing instance at all.
    /// Concept assertions built with the Boolean connectives, quantifiers or
    /// Self are principal only in non-initial rules, and atomic assertions
    /// and plain role atoms close only against a copy on the other side.
    fn may_close_with(&self, base: &Sequent, adds: &Sequent) -> bool {
        adds.formulas().any(|(side, f)| {
            let mirrored = || base.contains(side.flip(), f) || adds.contains(side.flip(), f);
            match f {
                Formula::Assert(_, c) => match c.as_ref() {
                    Concept::Atomic(_) => mirrored(),
                    Concept::Not(_)
                    | Concept::Or(..)
                    | Concept::And(..)
                    | Concept::Exists(..)
                    | Concept::Forall(..)
                    | Concept::SelfLoop(_) => false,
                    _ => true,
                },
                Formula::Role(RoleTerm::Named(_) | RoleTerm::Inverse(_), ..)
                    if side == Side::Right || !self.atoms_close_alone =>
                {
                    mirrored()
                }
                _ => true,
            }
        })
    }

    /// A branching application all of whose premises but at most one close
    /// at once. Taking these first keeps the search from splitting on
    /// choices that a later application settles anyway; it adds applications
    /// without delaying any, so fairness is unaffected.
    ///
    /// The current sequent has no closing instance, so a premise closes only
    /// through an instance that uses one of its added formulae. That is
    /// tested on a probe holding the added formulae and the branch formulae
    /// near them, which keeps each test independent of the branch size.
    fn forced_application(
        &mut self,
        state: &BranchState,
        domain: &[Individual],
    ) -> Result<Option<(&'c RuleSchema, Binding)>, RuleError> {
        let mut near: Option<Neighbourhoods> = None;
        for &schema in &self.branching {
            for binding in schema.matches(&state.sequent, domain) {
                let inst = schema.instance(&binding)?;
                if inst.premises.len() < 2
                    || !state.sequent.includes(&inst.principal)
                    || inst.premises.iter().any(|adds| adds.formulas().all(|(side, f)| state.holds(side, f)))
                    || state.marks.contains(&(schema.name.clone(), binding.clone()))
                {
                    continue;
                }
                let mut open = 0;
                for adds in &inst.premises {
                    let closes = self.may_close_with(&state.sequent, adds) && {
                        let near = near.get_or_insert_with(|| Neighbourhoods::new(&state.sequent, self.global_atoms));
                        self.find_closing(&near.probe(&inst.consumed, adds), domain)?.is_some()
                    };
                    if !closes {
                        open += 1;
                        if open > 1 {
                            break;
                        }
                    }
                }
                if open <= 1 {
                    return Ok(Some((schema, binding)));
                }
            }
        }
        Ok(None)
    }

    /// Instantiates a match with fresh eigen individuals and applies it,
    /// unless it is redundant on the branch. Marks the match when applied.
    fn try_apply(
        &self,
        state: &mut BranchState,
        schema: &'c RuleSchema,
        binding: Binding,
    ) -> Result<Option<(Binding, Vec<Sequent>, usize)>, RuleError> {
        if state.marks.contains(&(schema.name.clone(), binding.clone())) {
            return Ok(None);
        }
        let count = schema.eigen_count(&binding);
        let fresh: Vec<Individual> = (0..count as u32).map(|i| Individual::eigen(state.eigen_counter + i)).collect();
        let full = schema.with_eigen(&binding, &fresh);
        let inst = schema.instance(&full)?;
        let redundant = inst.premises.iter().any(|adds| adds.formulas().all(|(side, f)| state.holds(side, f)));
        if redundant || !state.sequent.includes(&inst.principal) {
            return Ok(None);
        }
        let premises = inst.apply(&state.sequent).expect("principal formulae are present");
        state.marks.insert((schema.name.clone(), binding));
        state.idle = 0;
        Ok(Some((full, premises, count)))
    }

    /// The first applicable consuming one-premise rule. Eigen rules are left
    /// out unless `allow_eigen` holds: the caller allows at most one eager
    /// eigen step per scheduled step, so that formulae spawning fresh
    /// individuals cannot starve the cyclic order.
    fn eager_application(
        &self,
        state: &mut BranchState,
        domain: &[Individual],
        allow_eigen: bool,
    ) -> Result<Option<Scheduled<'c>>, RuleError> {
        for &schema in &self.eager {
            if !allow_eigen && !schema.eigen_params.is_empty() {
                continue;
            }
            for binding in schema.matches(&state.sequent, domain) {
                if let Some((full, premises, count)) = self.try_apply(state, schema, binding)? {
                    return Ok(Some((schema, full, premises, count)));
                }
            }
        }
        Ok(None)
    }

    /// The next non-redundant application on the branch, or `None` once a
    /// full cycle has found nothing to do.
    fn next_application(
        &self,
        state: &mut BranchState,
        domain: &[Individual],
    ) -> Result<Option<Scheduled<'c>>, RuleError> {
        let n = self.schemas.len();
        loop {
            let Some(binding) = state.pending.pop_front() else {
                if state.idle >= n {
                    return Ok(None);
                }
                let schema = self.schemas[state.position];
                state.pending = schema.matches(&state.sequent, domain).into();
                state.idle += 1;
                state.position = (state.position + 1) % n;
                continue;
            };
            let schema = self.schemas[(state.position + n - 1) % n];
            if let Some((full, premises, count)) = self.try_apply(state, schema, binding)? {
                return Ok(Some((schema, full, premises, count)));
            }
        }
    }

    fn exhausted(&self, state: &BranchState, depth: usize) -> bool {
        self.stats.steps >= self.budget.max_steps
            || state.sequent.len() > self.budget.max_branch_formulas
            || depth >= self.budget.max_depth
    }

    fn branch(&mut self, mut state: BranchState, mut depth: usize) -> Result<Branch, RuleError> {
        self.stats.branches += 1;
        // Steps taken on this branch, assembled into a tree when it ends.
        let mut chain: Vec<Step> = Vec::new();
        // Whether an eager eigen step may run before the next scheduled one.
        let mut eigen_credit = true;
        loop {
            self.stats.max_branch_size = self.stats.max_branch_size.max(state.sequent.len());
            let domain = state.generator_domain();
            if let Some(t) = self.closing_instance(&state.sequent, &domain)? {
                return Ok(Branch::Closed(assemble(chain, t)));
            }
            if self.exhausted(&state, depth) {
                return Ok(Branch::Exhausted(assemble(chain, ProofTree::leaf(state.sequent.clone()))));
            }
            let eager = self.eager_application(&mut state, &domain, eigen_credit)?;
            let forced = match eager {
                None => self.forced_application(&state, &domain)?,
                Some(_) => None,
            };
            if let Some((schema, binding)) = forced {
                let inst = schema.instance(&binding)?;
                // The step and the closings of its premises must all fit.
                if self.stats.steps + 1 + inst.premises.len() > self.budget.max_steps {
                    return Ok(Branch::Exhausted(assemble(chain, ProofTree::leaf(state.sequent.clone()))));
                }
                self.stats.steps += 1;
                let premises = inst.apply(&state.sequent).expect("forced applications apply");
                state.marks.insert((schema.name.clone(), binding.clone()));
                state.idle = 0;
                let mut closed = Vec::with_capacity(premises.len());
                for p in &premises {
                    closed.push(self.closing_instance(p, &domain)?);
                }
                let conclusion = state.sequent.clone();
                let open = closed.iter().position(Option::is_none);
                let children: Vec<ProofTree> = closed
                    .into_iter()
                    .zip(&premises)
                    .map(|(t, p)| t.unwrap_or_else(|| ProofTree::leaf(p.clone())))
                    .collect();
                let Some(open) = open else {
                    let node = ProofTree::node(conclusion, &schema.name, binding, children);
                    return Ok(Branch::Closed(assemble(chain, node)));
                };
                state.advance(&inst.premises[open], 0);
                state.sequent = premises[open].clone();
                chain.push(Step { conclusion, schema: schema.name.clone(), binding, children, open });
                depth += 1;
                continue;
            }
            let scheduled = eager.is_none();
            let next = match eager {
                Some(app) => Some(app),
                None => self.next_application(&mut state, &domain)?,
            };
            let Some((schema, binding, premises, eigen_used)) = next else {
                return Ok(Branch::Saturated(Box::new(state)));
            };
            eigen_credit = scheduled || (eigen_credit && eigen_used == 0);
            self.stats.steps += 1;
            let conclusion = state.sequent.clone();
            let inst = schema.instance(&binding)?;
            match premises.len() {
                0 => {
                    let node = ProofTree::node(conclusion, &schema.name, binding, vec![]);
                    return Ok(Branch::Closed(assemble(chain, node)));
                }
                1 => {
                    state.advance(&inst.premises[0], eigen_used);
                    state.sequent = premises.into_iter().next().expect("one premise");
                    let children = vec![ProofTree::leaf(state.sequent.clone())];
                    chain.push(Step { conclusion, schema: schema.name.clone(), binding, children, open: 0 });
                    depth += 1;
                }
                _ => {
                    let mut children = Vec::with_capacity(premises.len());
                    let mut saturated = None;
                    let mut exhausted = false;
                    for (premise, adds) in premises.iter().zip(&inst.premises) {
                        if saturated.is_some() || self.stats.steps >= self.budget.max_steps {
                            exhausted |= saturated.is_none();
                            children.push(ProofTree::leaf(premise.clone()));
                            continue;
                        }
                        let mut child = state.clone();
                        child.advance(adds, eigen_used);
                        child.sequent = premise.clone();
                        match self.branch(child, depth + 1)? {
                            Branch::Closed(t) => children.push(t),
                            Branch::Saturated(s) => {
                                saturated = Some(s);
                                children.push(ProofTree::leaf(premise.clone()));
                            }
                            Branch::Exhausted(t) => {
                                exhausted = true;
                                children.push(t);
                            }
                        }
                    }
                    if let Some(s) = saturated {
                        return Ok(Branch::Saturated(s));
                    }
                    let node = assemble(chain, ProofTree::node(conclusion, &schema.name, binding, children));
                    return Ok(if exhausted { Branch::Exhausted(node) } else { Branch::Closed(node) });
                }
            }
        }
    }
}

/// The formulae of a sequent indexed by the individuals they mention.
struct Neighbourhoods<'s> {
    formulas: Vec<(Side, &'s Formula)>,
    by_individual: BTreeMap<Individual, Vec<usize>>,
    /// Formulae without individuals, plus every relational atom when
    /// `global_atoms` is set.
    always: Vec<usize>,
}

impl<'s> Neighbourhoods<'s> {
    fn new(s: &'s Sequent, global_atoms: bool) -> Self {
        let formulas: Vec<(Side, &Formula)> = s.formulas().collect();
        let mut by_individual: BTreeMap<Individual, Vec<usize>> = BTreeMap::new();
        let mut always = Vec::new();
        for (i, (_, f)) in formulas.iter().enumerate() {
            let inds = f.individuals();
            if inds.is_empty() || (global_atoms && f.is_relational_atom()) {
                always.push(i);
            }
            for a in inds {
                by_individual.entry(a).or_default().push(i);
            }
        }
        Neighbourhoods { formulas, by_individual, always }
    }

    /// `adds` together with the formulae that share an individual with it,
    /// minus one occurrence of each consumed formula.
    fn probe(&self, consumed: &Sequent, adds: &Sequent) -> Sequent {
        let mut picked: BTreeSet<usize> = self.always.iter().copied().collect();
        for a in adds.individuals() {
            if let Some(ids) = self.by_individual.get(&a) {
                picked.extend(ids);
            }
        }
        let mut skip = consumed.clone();
        let (mut left, mut right): (Vec<Formula>, Vec<Formula>) = (adds.left().cloned().collect(), adds.right().cloned().collect());
        for i in picked {
            let (side, f) = self.formulas[i];
            if !skip.remove_one(side, f) {
                match side {
                    Side::Left => left.push(f.clone()),
                    Side::Right => right.push(f.clone()),
                }
            }
        }
        Sequent::from_sides(left, right)
    }
}

/// One rule application on a branch; `children[open]` is replaced by the
/// subtree the branch goes on to build.
struct Step {
    conclusion: Sequent,
    schema: String,
    binding: Binding,
    children: Vec<ProofTree>,
    open: usize,
}

fn assemble(chain: Vec<Step>, top: ProofTree) -> ProofTree {
    chain.into_iter().rev().fold(top, |child, mut step| {
        step.children[step.open] = child;
        ProofTree::node(step.conclusion, &step.schema, step.binding, step.children)
    })
}

/// Searches for a derivation of `root` in `calculus` within `budget`.
pub fn prove(root: &Sequent, calculus: &Calculus, budget: Budget) -> Result<SearchOutcome, ProveError> {
    Prover::new(calculus, budget).run(root)
}

/// Like [`prove`], also returning search statistics.
pub fn prove_with_stats(
    root: &Sequent,
    calculus: &Calculus,
    budget: Budget,
) -> Result<(SearchOutcome, SearchStats), ProveError> {
    let mut p = Prover::new(calculus, budget);
    let outcome = p.run(root)?;
    Ok((outcome, p.stats()))
}
