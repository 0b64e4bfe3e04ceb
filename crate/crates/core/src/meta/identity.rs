//! Derivations of `X ⊢ X` for arbitrary formulae, by induction on weight.

use std::collections::BTreeMap;

use crate::calculus::{Binding, Calculus, Value};
use crate::prover::ProofTree;
use crate::syntax::{Concept, Formula, Individual, RoleTerm, Sequent, Side};

use super::{weaken, MetaError};

use Side::{Left as L, Right as R};

struct Builder<'c> {
    calc: &'c Calculus,
    next: u32,
}

impl Builder<'_> {
    fn fresh(&mut self) -> Individual {
        self.next += 1;
        Individual::eigen(self.next - 1)
    }

    /// One rule application on `conclusion`; the premises are computed and
    /// handed to `build` to derive.
    fn apply(
        &mut self,
        conclusion: &Sequent,
        schema: &str,
        binding: Binding,
        build: impl FnOnce(&mut Self, Vec<Sequent>) -> Result<Vec<ProofTree>, MetaError>,
    ) -> Result<ProofTree, MetaError> {
        let s = self.calc.schema(schema).ok_or_else(|| MetaError::MissingRule(schema.to_string()))?;
        let inst = s.instance(&binding)?;
        let premises = inst.apply(conclusion).ok_or_else(|| MetaError::NotApplicable(schema.to_string()))?;
        let children = build(self, premises)?;
        Ok(ProofTree::node(conclusion.clone(), schema, binding, children))
    }

    /// Closes `s` with the identity derivation for `y`, which must occur on
    /// both sides.
    fn close(&mut self, s: &Sequent, y: &Formula) -> Result<ProofTree, MetaError> {
        let mut rest = s.clone();
        if !(rest.remove_one(L, y) && rest.remove_one(R, y)) {
            return Err(MetaError::NotApplicable(format!("identity on `{y}`")));
        }
        let base = self.id(y)?;
        if rest.is_empty() {
            Ok(base)
        } else {
            weaken(&base, &rest, self.calc)
        }
    }

    fn closes(&mut self, premises: Vec<Sequent>, ys: &[Formula]) -> Result<Vec<ProofTree>, MetaError> {
        premises.iter().zip(ys).map(|(p, y)| self.close(p, y)).collect()
    }

    fn counting_rules(&self, p: &Concept) -> &'static str {
        let unq = matches!(p, Concept::Top) && self.calc.schema("atmost_unq_l").is_some();
        if unq {
            "_unq"
        } else {
            ""
        }
    }

    /// A proof of `x ⊢ x`.
    fn id(&mut self, x: &Formula) -> Result<ProofTree, MetaError> {
        let root = Sequent::new().with(L, x.clone()).with(R, x.clone());
        let assert = |a: &Individual, p: &std::sync::Arc<Concept>| Formula::Assert(a.clone(), p.clone());
        match x {
            Formula::Assert(a, c) => {
                let ab = |b: Binding| b.ind("a", a);
                match c.as_ref() {
                    Concept::Atomic(_) => {
                        self.apply(&root, "id_C", ab(Binding::new()).concept("C", c), |_, _| Ok(vec![]))
                    }
                    Concept::Top => self.apply(&root, "top_r", ab(Binding::new()), |_, _| Ok(vec![])),
                    Concept::Bottom => self.apply(&root, "bot_l", ab(Binding::new()), |_, _| Ok(vec![])),
                    Concept::Not(p) => {
                        let b = ab(Binding::new()).concept("P", p);
                        let y = assert(a, p);
                        self.apply(&root, "not_r", b.clone(), |me, ps| {
                            Ok(vec![me.apply(&ps[0], "not_l", b, |me, ps| me.closes(ps, &[y]))?])
                        })
                    }
                    Concept::Or(p, q) | Concept::And(p, q) => {
                        let b = ab(Binding::new()).concept("P", p).concept("Q", q);
                        let (yp, yq) = (assert(a, p), assert(a, q));
                        let (first, second) =
                            if matches!(c.as_ref(), Concept::Or(..)) { ("or_r", "or_l") } else { ("and_l", "and_r") };
                        self.apply(&root, first, b.clone(), |me, ps| {
                            Ok(vec![me.apply(&ps[0], second, b, |me, ps| me.closes(ps, &[yp, yq]))?])
                        })
                    }
                    Concept::Exists(r, p) | Concept::Forall(r, p) => {
                        let e = self.fresh();
                        let b = ab(Binding::new()).role("r", r).concept("P", p).ind("b", &e);
                        let y = assert(&e, p);
                        let (first, second) = if matches!(c.as_ref(), Concept::Exists(..)) {
                            ("exists_l", "exists_r")
                        } else {
                            ("forall_r", "forall_l")
                        };
                        self.apply(&root, first, b.clone(), |me, ps| {
                            Ok(vec![me.apply(&ps[0], second, b, |me, ps| me.closes(ps, &[y]))?])
                        })
                    }
                    Concept::Nominal(n) => {
                        let b = ab(Binding::new()).ind("b", n);
                        let eq = Formula::Eq(a.clone(), n.clone());
                        self.apply(&root, "nom_r1", b.clone(), |me, ps| {
                            Ok(vec![me.apply(&ps[0], "nom_l1", b, |me, ps| {
                                let f = Binding::new().set("F", Value::Formula(eq));
                                Ok(vec![me.apply(&ps[0], "id_R", f, |_, _| Ok(vec![]))?])
                            })?])
                        })
                    }
                    Concept::AtMost(n, r, p) | Concept::AtLeast(n, r, p) => {
                        let at_most = matches!(c.as_ref(), Concept::AtMost(..));
                        let fam = self.counting_rules(p);
                        let count = if at_most { *n as usize + 1 } else { *n as usize };
                        let bs: Vec<Individual> = (0..count).map(|_| self.fresh()).collect();
                        let b = ab(Binding::new())
                            .set("n", Value::Num(*n))
                            .role("r", r)
                            .concept("P", p)
                            .set("bs", Value::Inds(bs.clone()));
                        let (first, second) = if at_most {
                            (format!("atmost{fam}_r"), format!("atmost{fam}_l"))
                        } else {
                            (format!("atleast{fam}_l"), format!("atleast{fam}_r"))
                        };
                        let qualified = fam.is_empty();
                        let mut ys: Vec<Formula> = Vec::new();
                        if qualified {
                            ys.extend(bs.iter().map(|x| assert(x, p)));
                        }
                        for i in 0..bs.len() {
                            for j in i + 1..bs.len() {
                                ys.push(Formula::Eq(bs[i].clone(), bs[j].clone()));
                            }
                        }
                        self.apply(&root, &first, b.clone(), |me, ps| {
                            Ok(vec![me.apply(&ps[0], &second, b, |me, ps| me.closes(ps, &ys))?])
                        })
                    }
                    Concept::SelfLoop(r) => {
                        let b = ab(Binding::new()).role("r", r);
                        let y = Formula::Role(r.clone(), a.clone(), a.clone());
                        self.apply(&root, "self_r", b.clone(), |me, ps| {
                            Ok(vec![me.apply(&ps[0], "self_l", b, |me, ps| me.closes(ps, &[y]))?])
                        })
                    }
                }
            }
            Formula::Role(RoleTerm::Chain(_), a, c) => {
                let e = self.fresh();
                let b = Binding::new().role("R", match x {
                    Formula::Role(r, _, _) => r,
                    _ => unreachable!(),
                });
                let b = b.ind("a", a).ind("c", c).ind("b", &e);
                let (first, last) = match x {
                    Formula::Role(RoleTerm::Chain(parts), _, _) => {
                        let (last, prefix) = parts.split_last().expect("chains have two or more links");
                        (RoleTerm::chain(prefix.iter().cloned()).map_err(|e| MetaError::NotApplicable(e.message))?, last.clone())
                    }
                    _ => unreachable!(),
                };
                let ys = [Formula::Role(first, a.clone(), e.clone()), Formula::Role(last, e.clone(), c.clone())];
                self.apply(&root, "comp_l", b.clone(), |me, ps| {
                    Ok(vec![me.apply(&ps[0], "comp_r", b, |me, ps| me.closes(ps, &ys))?])
                })
            }
            Formula::Role(..) | Formula::Eq(..) => {
                self.apply(&root, "id_R", Binding::new().set("F", Value::Formula(x.clone())), |_, _| Ok(vec![]))
            }
            Formula::Gci(p, q) => {
                let e = self.fresh();
                let right = Binding::new().concept("P", p).concept("Q", q).ind("b", &e);
                let left = Binding::new().concept("P", p).concept("Q", q).ind("a", &e);
                let ys = [assert(&e, p), assert(&e, q)];
                self.apply(&root, "sub_r", right, |me, ps| {
                    Ok(vec![me.apply(&ps[0], "sub_l", left, |me, ps| me.closes(ps, &ys))?])
                })
            }
            Formula::NegRole(r, a, c) => {
                let b = Binding::new().role("r", &RoleTerm::Named(r.clone())).ind("a", a).ind("b", c);
                let y = Formula::Role(RoleTerm::Named(r.clone()), a.clone(), c.clone());
                self.apply(&root, "negrole_r", b.clone(), |me, ps| {
                    Ok(vec![me.apply(&ps[0], "negrole_l", b, |me, ps| me.closes(ps, &[y]))?])
                })
            }
            Formula::Neq(a, c) => {
                let b = Binding::new().ind("a", a).ind("b", c);
                let y = Formula::Eq(a.clone(), c.clone());
                self.apply(&root, "neq_r", b.clone(), |me, ps| {
                    Ok(vec![me.apply(&ps[0], "neq_l", b, |me, ps| me.closes(ps, &[y]))?])
                })
            }
            Formula::Cria(lhs, r) => {
                let (a, c) = (self.fresh(), self.fresh());
                let b = Binding::new()
                    .set("lhs", Value::Roles(lhs.clone()))
                    .role("r", &RoleTerm::Named(r.clone()))
                    .ind("a", &a)
                    .ind("b", &c);
                let chain = RoleTerm::chain(lhs.iter().cloned()).map_err(|e| MetaError::NotApplicable(e.message))?;
                let ys = [Formula::Role(chain, a.clone(), c.clone()), Formula::Role(RoleTerm::Named(r.clone()), a, c)];
                self.apply(&root, "cria_r", b.clone(), |me, ps| {
                    Ok(vec![me.apply(&ps[0], "cria_l", b, |me, ps| me.closes(ps, &ys))?])
                })
            }
            Formula::Rra(name, args) => {
                let def = self
                    .calc
                    .definitions()
                    .get(name)
                    .cloned()
                    .ok_or_else(|| MetaError::MissingRule(format!("{name}_r")))?;
                let vars: Vec<Individual> = def.vars.iter().map(|_| self.fresh()).collect();
                let mut b = Binding::new().set("roles", Value::Roles(args.clone()));
                if !vars.is_empty() {
                    b = b.set("vars", Value::Inds(vars.clone()));
                }
                let left = Binding::new().set("roles", Value::Roles(args.clone())).set("vars", Value::Inds(vars.clone()));
                let assign: BTreeMap<_, _> = def.vars.iter().cloned().zip(vars).collect();
                let ys = def
                    .consequent
                    .iter()
                    .map(|atom| def.instantiate(atom, args, &assign))
                    .collect::<Result<Vec<_>, _>>()?;
                let right_name = format!("{name}_r");
                let left_name = format!("{name}_l");
                self.apply(&root, &right_name, b, |me, ps| {
                    Ok(vec![me.apply(&ps[0], &left_name, left, |me, ps| {
                        ps.iter()
                            .zip(&ys)
                            .map(|(p, y)| {
                                let f = Binding::new().set("F", Value::Formula(y.clone()));
                                me.apply(p, "id_R", f, |_, _| Ok(vec![]))
                            })
                            .collect()
                    })?])
                })
            }
        }
    }
}

/// A proof of `x ⊢ x` with no context.
pub fn identity_proof(x: &Formula, calc: &Calculus) -> Result<ProofTree, MetaError> {
    let next = x.individuals().iter().filter_map(Individual::eigen_index).max().map_or(1, |m| m + 1);
    Builder { calc, next }.id(x)
}

/// A proof of `context` extended with `x` on both sides.
pub fn derive_identity(x: &Formula, context: &Sequent, calc: &Calculus) -> Result<ProofTree, MetaError> {
    calc.profile().check_formula(x).map_err(|v| MetaError::NotApplicable(v.to_string()))?;
    let base = identity_proof(x, calc)?;
    if context.is_empty() {
        Ok(base)
    } else {
        weaken(&base, context, calc)
    }
}
