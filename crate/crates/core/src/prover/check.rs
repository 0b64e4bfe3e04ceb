//! Independent verification of proof trees against a calculus.

use std::collections::BTreeSet;
use std::fmt;

use crate::calculus::Calculus;
use crate::syntax::Sequent;

use super::tree::ProofTree;

/// The first node of a tree that is not a correct rule instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofViolation {
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
    pub conclusion: Box<Sequent>,
    pub rule: Option<String>,
    pub message: String,
}

impl fmt::Display for ProofViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
        write!(
            f,
            "node [{}] ({}: {}): {}",
            path.join("."),
            self.rule.as_deref().unwrap_or("open"),
            self.conclusion,
            self.message
        )
    }
}

impl std::error::Error for ProofViolation {}

/// Checks one node against its children.
pub fn check_node(t: &ProofTree, calculus: &Calculus) -> Result<(), String> {
    let label = t.rule.as_ref().ok_or("open leaf")?;
    let schema = calculus.schema(&label.schema).ok_or_else(|| format!("unknown rule `{}`", label.schema))?;
    let missing: Vec<&String> = schema.eigen_params.iter().filter(|k| label.binding.get(k).is_none()).collect();
    if let Some(k) = missing.first() {
        return Err(format!("eigen parameter `{k}` is unbound"));
    }
    let inst = schema.instance(&label.binding).map_err(|e| e.to_string())?;
    let present = t.conclusion.individuals();
    let distinct: BTreeSet<_> = inst.eigen.iter().collect();
    if distinct.len() != inst.eigen.len() {
        return Err("eigenvariables are not distinct".into());
    }
    if inst.eigen.iter().any(|e| present.contains(e)) {
        return Err("eigenvariable occurs in conclusion".into());
    }
    let premises = inst.apply(&t.conclusion).ok_or("principal formulae missing from conclusion")?;
    if premises.len() != t.children.len() {
        return Err(format!("expected {} premises, found {}", premises.len(), t.children.len()));
    }
    for (i, (want, child)) in premises.iter().zip(&t.children).enumerate() {
        if want != &child.conclusion {
            return Err(format!("premise {i} should be `{want}`, found `{}`", child.conclusion));
        }
    }
    Ok(())
}

/// Verifies every node of `t`; reports the first offending node in preorder.
pub fn check_proof(t: &ProofTree, calculus: &Calculus) -> Result<(), ProofViolation> {
    let mut stack = vec![(t, Vec::new())];
    while let Some((node, path)) = stack.pop() {
        if let Err(message) = check_node(node, calculus) {
            return Err(ProofViolation {
                path,
                conclusion: Box::new(node.conclusion.clone()),
                rule: node.rule_name().map(str::to_string),
                message,
            });
        }
        for (i, c) in node.children.iter().enumerate().rev() {
            let mut p = path.clone();
            p.push(i);
            stack.push((c, p));
        }
    }
    Ok(())
}
