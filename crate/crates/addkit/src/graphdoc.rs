//! The graph document: a composed diagram as a flat, topologically ordered
//! node list.
//!
//! ```json
//! {
//!   "algebra": "weights",
//!   "features": ["x"],
//!   "categories": ["a", "b"],
//!   "root": 0,
//!   "nodes": [
//!     {"id": 0, "kind": "predicate", "feature": "x", "threshold": 0.5, "true": 1, "false": 2},
//!     {"id": 1, "kind": "terminal", "value": [1.0, 0.0]},
//!     {"id": 2, "kind": "terminal", "value": [0.0, 1.0]}
//!   ]
//! }
//! ```
//!
//! Ids are positions in [`Manager::iter_nodes`] order, so every child has a
//! larger id than its parent and the text only depends on the diagram.

use std::collections::BTreeMap;

use addkit_core::{AlgebraValue, DdError, DeclarationModel, Manager, ModelError, Node, NodeRef, WeightVector};
use serde::{Deserialize, Serialize};

use crate::files::{pretty, FormatError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub algebra: String,
    pub features: Vec<String>,
    pub categories: Vec<String>,
    pub root: usize,
    pub nodes: Vec<GraphNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GraphNode {
    Predicate {
        id: usize,
        feature: String,
        threshold: f64,
        #[serde(rename = "true")]
        on_true: usize,
        #[serde(rename = "false")]
        on_false: usize,
    },
    Terminal {
        id: usize,
        value: Vec<f64>,
    },
}

impl GraphNode {
    pub fn id(&self) -> usize {
        match self {
            GraphNode::Predicate { id, .. } | GraphNode::Terminal { id, .. } => *id,
        }
    }
}

impl GraphDoc {
    pub fn inner_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, GraphNode::Predicate { .. }))
            .count()
    }

    pub fn terminal_count(&self) -> usize {
        self.nodes.len() - self.inner_count()
    }
}

/// Describes the weights diagram `f` of `mgr` over `decl`.
pub fn graph_doc(mgr: &Manager, f: NodeRef, decl: &DeclarationModel) -> GraphDoc {
    let order = mgr.iter_nodes(f);
    let ids: BTreeMap<NodeRef, usize> = order.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let nodes = order
        .iter()
        .enumerate()
        .map(|(id, &n)| match mgr.node(n) {
            Node::Inner { var, hi, lo } => {
                let p = mgr.predicate(*var).expect("weights diagrams only test features");
                GraphNode::Predicate {
                    id,
                    feature: decl.features()[p.feature].clone(),
                    threshold: p.threshold,
                    on_true: ids[hi],
                    on_false: ids[lo],
                }
            }
            Node::Terminal(v) => GraphNode::Terminal {
                id,
                value: v.as_vector().map(|w| w.components().to_vec()).unwrap_or_default(),
            },
        })
        .collect();
    GraphDoc {
        algebra: "weights".into(),
        features: decl.features().to_vec(),
        categories: decl.categories().to_vec(),
        root: 0,
        nodes,
    }
}

pub fn to_graph_doc(mgr: &Manager, f: NodeRef, decl: &DeclarationModel) -> String {
    pretty(&graph_doc(mgr, f, decl))
}

pub fn parse_graph_doc(text: &str) -> Result<GraphDoc, FormatError> {
    Ok(serde_json::from_str(text)?)
}

impl GraphDoc {
    pub fn declaration(&self) -> Result<DeclarationModel, FormatError> {
        Ok(DeclarationModel::new(self.features.clone(), self.categories.clone())?)
    }

    /// Rebuilds the diagram in `mgr`, which must use the weights algebra of
    /// this document's categories.
    pub fn rebuild(&self, mgr: &mut Manager) -> Result<NodeRef, FormatError> {
        let bad = |m: String| FormatError::Malformed(format!("graph document: {m}"));
        if self.algebra != "weights" {
            return Err(bad(format!("unsupported algebra `{}`", self.algebra)));
        }
        let n = self.nodes.len();
        if n == 0 || self.root != 0 {
            return Err(bad("the root must be node 0 of a non-empty list".into()));
        }
        let mut built: Vec<Option<NodeRef>> = vec![None; n];
        for (pos, node) in self.nodes.iter().enumerate().rev() {
            if node.id() != pos {
                return Err(bad(format!("node at position {pos} has id {}", node.id())));
            }
            let r = match node {
                GraphNode::Terminal { value, .. } => {
                    mgr.constant(AlgebraValue::Vector(WeightVector::new(value.clone())))
                        .map_err(ModelError::from)?
                }
                GraphNode::Predicate {
                    feature,
                    threshold,
                    on_true,
                    on_false,
                    ..
                } => {
                    let child = |c: usize| {
                        (c > pos)
                            .then(|| built.get(c).copied().flatten())
                            .flatten()
                            .ok_or_else(|| bad(format!("node {pos} points to {c}, which is not a later node")))
                    };
                    let (hi, lo) = (child(*on_true)?, child(*on_false)?);
                    let index = self
                        .features
                        .iter()
                        .position(|f| f == feature)
                        .ok_or_else(|| bad(format!("unknown feature `{feature}`")))?;
                    let var = mgr.predicate_var(index, *threshold).map_err(ModelError::from)?;
                    mgr.mk(var, hi, lo).map_err(|e: DdError| ModelError::from(e))?
                }
            };
            built[pos] = Some(r);
        }
        Ok(built[0].expect("node 0 was built"))
    }

    /// Declaration, fresh manager and root.
    pub fn load(&self) -> Result<(DeclarationModel, Manager, NodeRef), FormatError> {
        let decl = self.declaration()?;
        let mut mgr = decl.manager();
        let root = self.rebuild(&mut mgr)?;
        Ok((decl, mgr, root))
    }
}
