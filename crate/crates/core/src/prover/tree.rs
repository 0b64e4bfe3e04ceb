//! Proof trees and their text and JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{Binding, RuleError, Value};
use crate::syntax::{ParseOptions, Parser, Sequent, SyntaxError};

/// The rule instance labelling a node: a schema name and its match.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleLabel {
    pub schema: String,
    pub binding: Binding,
}

/// A derivation tree. Nodes without a label are open leaves, which only
/// occur in partial trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree {
    pub conclusion: Sequent,
    pub rule: Option<RuleLabel>,
    pub children: Vec<ProofTree>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeFormatError {
    #[error("malformed proof JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

#[derive(Serialize, Deserialize)]
struct JsonNode {
    conclusion: String,
    rule: Option<String>,
    #[serde(default)]
    bindings: BTreeMap<String, String>,
    #[serde(default)]
    children: Vec<JsonNode>,
}

impl ProofTree {
    pub fn leaf(conclusion: Sequent) -> Self {
        ProofTree { conclusion, rule: None, children: Vec::new() }
    }

    pub fn node(conclusion: Sequent, schema: &str, binding: Binding, children: Vec<ProofTree>) -> Self {
        ProofTree { conclusion, rule: Some(RuleLabel { schema: schema.to_string(), binding }), children }
    }

    pub fn rule_name(&self) -> Option<&str> {
        self.rule.as_ref().map(|r| r.schema.as_str())
    }

    /// Length of the longest path from this node to a leaf, counted in edges.
    pub fn height(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(self, 0usize)];
        while let Some((t, d)) = stack.pop() {
            best = best.max(d);
            stack.extend(t.children.iter().map(|c| (c, d + 1)));
        }
        best
    }

    pub fn size(&self) -> usize {
        self.preorder().len()
    }

    /// All nodes, parents before children, children left to right.
    pub fn preorder(&self) -> Vec<&ProofTree> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t);
            stack.extend(t.children.iter().rev());
        }
        out
    }

    /// Rule names in preorder; open leaves are skipped.
    pub fn rule_names(&self) -> Vec<&str> {
        self.preorder().into_iter().filter_map(ProofTree::rule_name).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.preorder().iter().all(|t| t.rule.is_some())
    }

    /// One `rule-name: sequent` line per node, indented two spaces per level.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![(self, 0usize)];
        while let Some((t, depth)) = stack.pop() {
            let name = t.rule_name().unwrap_or("open");
            let _ = writeln!(out, "{}{name}: {}", "  ".repeat(depth), t.conclusion);
            stack.extend(t.children.iter().rev().map(|c| (c, depth + 1)));
        }
        out
    }

    fn to_node(&self) -> JsonNode {
        JsonNode {
            conclusion: self.conclusion.to_string(),
            rule: self.rule.as_ref().map(|r| r.schema.clone()),
            bindings: self
                .rule
                .as_ref()
                .map(|r| r.binding.0.iter().map(|(k, v)| (k.clone(), v.to_string())).collect())
                .unwrap_or_default(),
            children: self.children.iter().map(ProofTree::to_node).collect(),
        }
    }

    /// `{conclusion, rule, bindings, children}` with formulae and bound
    /// values in the text grammar.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_node()).expect("proof nodes serialize")
    }

    fn from_node(node: JsonNode) -> Result<ProofTree, TreeFormatError> {
        let mut p = Parser::with_options(&node.conclusion, ParseOptions { allow_eigen: true })?;
        let conclusion = p.sequent()?;
        p.expect_end()?;
        let rule = match node.rule {
            Some(schema) => {
                let mut binding = Binding::new();
                for (k, v) in &node.bindings {
                    binding = binding.set(k, Value::parse(k, v)?);
                }
                Some(RuleLabel { schema, binding })
            }
            None if node.bindings.is_empty() => None,
            None => return Err(TreeFormatError::Json("bindings given for an open leaf".into())),
        };
        let children = node.children.into_iter().map(ProofTree::from_node).collect::<Result<_, _>>()?;
        Ok(ProofTree { conclusion, rule, children })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<ProofTree, TreeFormatError> {
        let node: JsonNode = serde_json::from_value(value.clone()).map_err(|e| TreeFormatError::Json(e.to_string()))?;
        Self::from_node(node)
    }

    pub fn from_json_str(text: &str) -> Result<ProofTree, TreeFormatError> {
        let mut de = serde_json::Deserializer::from_str(text);
        de.disable_recursion_limit();
        let node = JsonNode::deserialize(&mut de).map_err(|e| TreeFormatError::Json(e.to_string()))?;
        Self::from_node(node)
    }
}
