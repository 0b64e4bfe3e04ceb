use std::collections::BTreeSet;
use std::fmt;

use super::{Formula, Individual};

/// The two sides of a sequent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A sequent `Γ, Σ ⊢ Π, Δ`.
///
/// Each zone is a multiset stored as a sorted vector, so the derived
/// equality ignores the order in which formulae were written while still
/// counting duplicates. Formulae are routed to zones by their class, which
/// makes it impossible to put an external formula in an internal zone.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    ef_ante: Vec<Formula>,
    if_ante: Vec<Formula>,
    if_cons: Vec<Formula>,
    ef_cons: Vec<Formula>,
}

impl Sequent {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_sides(
        left: impl IntoIterator<Item = Formula>,
        right: impl IntoIterator<Item = Formula>,
    ) -> Self {
        let mut s = Sequent::new();
        for f in left {
            s.zone_mut(Side::Left, f.is_internal()).push(f);
        }
        for f in right {
            s.zone_mut(Side::Right, f.is_internal()).push(f);
        }
        for zone in [&mut s.ef_ante, &mut s.if_ante, &mut s.if_cons, &mut s.ef_cons] {
            zone.sort();
        }
        s
    }

    fn zone(&self, side: Side, internal: bool) -> &Vec<Formula> {
        match (side, internal) {
            (Side::Left, false) => &self.ef_ante,
            (Side::Left, true) => &self.if_ante,
            (Side::Right, true) => &self.if_cons,
            (Side::Right, false) => &self.ef_cons,
        }
    }

    fn zone_mut(&mut self, side: Side, internal: bool) -> &mut Vec<Formula> {
        match (side, internal) {
            (Side::Left, false) => &mut self.ef_ante,
            (Side::Left, true) => &mut self.if_ante,
            (Side::Right, true) => &mut self.if_cons,
            (Side::Right, false) => &mut self.ef_cons,
        }
    }

    /// Γ: external antecedent.
    pub fn ef_ante(&self) -> &[Formula] {
        &self.ef_ante
    }

    /// Σ: internal antecedent.
    pub fn if_ante(&self) -> &[Formula] {
        &self.if_ante
    }

    /// Π: internal consequent.
    pub fn if_cons(&self) -> &[Formula] {
        &self.if_cons
    }

    /// Δ: external consequent.
    pub fn ef_cons(&self) -> &[Formula] {
        &self.ef_cons
    }

    /// All formulae on one side, external zone first.
    pub fn side(&self, side: Side) -> impl Iterator<Item = &Formula> + '_ {
        let (ef, inf) = match side {
            Side::Left => (&self.ef_ante, &self.if_ante),
            Side::Right => (&self.ef_cons, &self.if_cons),
        };
        ef.iter().chain(inf.iter())
    }

    pub fn left(&self) -> impl Iterator<Item = &Formula> + '_ {
        self.side(Side::Left)
    }

    pub fn right(&self) -> impl Iterator<Item = &Formula> + '_ {
        self.side(Side::Right)
    }

    /// Every formula with its side.
    pub fn formulas(&self) -> impl Iterator<Item = (Side, &Formula)> + '_ {
        self.left().map(|f| (Side::Left, f)).chain(self.right().map(|f| (Side::Right, f)))
    }

    pub fn push(&mut self, side: Side, f: Formula) {
        let zone = self.zone_mut(side, f.is_internal());
        let pos = zone.partition_point(|g| g <= &f);
        zone.insert(pos, f);
    }

    pub fn with(mut self, side: Side, f: Formula) -> Self {
        self.push(side, f);
        self
    }

    /// Removes one occurrence; returns false when absent.
    pub fn remove_one(&mut self, side: Side, f: &Formula) -> bool {
        let zone = self.zone_mut(side, f.is_internal());
        match zone.binary_search(f) {
            Ok(i) => {
                zone.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    pub fn count(&self, side: Side, f: &Formula) -> usize {
        let zone = self.zone(side, f.is_internal());
        let lo = zone.partition_point(|g| g < f);
        let hi = zone.partition_point(|g| g <= f);
        hi - lo
    }

    pub fn contains(&self, side: Side, f: &Formula) -> bool {
        self.zone(side, f.is_internal()).binary_search(f).is_ok()
    }

    pub fn len(&self) -> usize {
        self.ef_ante.len() + self.if_ante.len() + self.if_cons.len() + self.ef_cons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether `other` is contained in `self` as a sided multiset.
    pub fn includes(&self, other: &Sequent) -> bool {
        other.formulas().all(|(side, f)| self.count(side, f) >= other.count(side, f))
    }

    /// Multiset union.
    pub fn extend(&mut self, other: &Sequent) {
        for (side, f) in other.formulas() {
            self.push(side, f.clone());
        }
    }

    /// Multiset difference; fails when `other` is not included.
    pub fn minus(&self, other: &Sequent) -> Option<Sequent> {
        let mut rest = self.clone();
        for (side, f) in other.formulas() {
            if !rest.remove_one(side, f) {
                return None;
            }
        }
        Some(rest)
    }

    /// The individuals occurring anywhere in the sequent.
    pub fn individuals(&self) -> BTreeSet<Individual> {
        let mut out = BTreeSet::new();
        for (_, f) in self.formulas() {
            f.collect_individuals(&mut out);
        }
        out
    }

    pub fn map_individuals(&self, f: &impl Fn(&Individual) -> Individual) -> Sequent {
        Sequent::from_sides(
            self.left().map(|g| g.map_individuals(f)),
            self.right().map(|g| g.map_individuals(f)),
        )
    }

    /// `self[to/from]`.
    pub fn substitute(&self, from: &Individual, to: &Individual) -> Sequent {
        self.map_individuals(&|x| if x == from { to.clone() } else { x.clone() })
    }

    /// Drops duplicate occurrences in every zone.
    pub fn dedup(&self) -> Sequent {
        let mut s = self.clone();
        s.ef_ante.dedup();
        s.if_ante.dedup();
        s.if_cons.dedup();
        s.ef_cons.dedup();
        s
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |it: Vec<&Formula>| it.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ");
        let left = join(self.ef_ante.iter().chain(self.if_ante.iter()).collect());
        let right = join(self.if_cons.iter().chain(self.ef_cons.iter()).collect());
        match (left.is_empty(), right.is_empty()) {
            (true, true) => write!(f, "|-"),
            (true, false) => write!(f, "|- {right}"),
            (false, true) => write!(f, "{left} |-"),
            (false, false) => write!(f, "{left} |- {right}"),
        }
    }
}
