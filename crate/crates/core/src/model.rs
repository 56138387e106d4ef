//! Declaration and decision-diagram models.
//!
//! A [`DeclarationModel`] fixes the ordered feature and category names. A
//! [`DiagramModel`] is a user-authored graph of predicate nodes
//! (`feature <= threshold`, one true and one false successor) and result
//! nodes (a weight per category). Models are validated on construction and
//! compiled into canonical kernel diagrams with [`compile_diagram`].

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{AlgebraDescriptor, AlgebraValue, CarrierKind, WeightVector};
use crate::dd::{DdError, Manager, NodeRef, Predicate};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("declaration needs at least one {0}")]
    EmptyList(&'static str),
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("invalid {kind} identifier `{name}`")]
    InvalidIdentifier { kind: &'static str, name: String },
    #[error("cyclic model: node `{node}` lies on a cycle")]
    Cyclic { node: String },
    #[error("unreachable node `{node}`")]
    Unreachable { node: String },
    #[error("unresolved reference: feature `{feature}` in node `{node}`")]
    UnresolvedFeature { node: String, feature: String },
    #[error("unresolved reference: category `{category}` in node `{node}`")]
    UnresolvedCategory { node: String, category: String },
    #[error("unknown node `{target}` referenced from `{from}`")]
    UnknownNode { from: String, target: String },
    #[error("predicate `{node}` must have exactly one TrueBranch and one FalseBranch successor ({branch} is missing)")]
    MissingBranch { node: String, branch: &'static str },
    #[error("threshold of predicate `{node}` must be a finite number")]
    NonFiniteThreshold { node: String },
    #[error("weight of category `{category}` in result `{node}` must be a finite number")]
    NonFiniteWeight { node: String, category: String },
    #[error("category `{category}` listed twice in result `{node}`")]
    DuplicateWeight { node: String, category: String },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("missing value for feature `{0}`")]
    MissingFeature(String),
    #[error("diagram needs the weights algebra of dimension {expected}, manager uses `{found}`")]
    AlgebraMismatch { expected: usize, found: String },
    #[error(transparent)]
    Dd(#[from] DdError),
}

impl ModelError {
    /// Node id the error refers to, if any.
    pub fn location(&self) -> Option<&str> {
        match self {
            ModelError::Cyclic { node }
            | ModelError::Unreachable { node }
            | ModelError::UnresolvedFeature { node, .. }
            | ModelError::UnresolvedCategory { node, .. }
            | ModelError::MissingBranch { node, .. }
            | ModelError::NonFiniteThreshold { node }
            | ModelError::NonFiniteWeight { node, .. }
            | ModelError::DuplicateWeight { node, .. } => Some(node),
            ModelError::UnknownNode { from, .. } => Some(from),
            _ => None,
        }
    }
}

fn valid_identifier(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_control())
}

/// Ordered features and categories shared by every diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclarationModel {
    features: Vec<String>,
    categories: Vec<String>,
}

impl DeclarationModel {
    pub fn new(features: Vec<String>, categories: Vec<String>) -> Result<Self, ModelError> {
        for (kind, list) in [("feature", &features), ("category", &categories)] {
            if list.is_empty() {
                return Err(ModelError::EmptyList(kind));
            }
            let mut seen = BTreeSet::new();
            for name in list {
                if !valid_identifier(name) {
                    return Err(ModelError::InvalidIdentifier {
                        kind,
                        name: name.clone(),
                    });
                }
                if !seen.insert(name.as_str()) {
                    return Err(ModelError::Duplicate {
                        kind,
                        name: name.clone(),
                    });
                }
            }
        }
        Ok(DeclarationModel {
            features,
            categories,
        })
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    /// Dimension of the weight vectors (number of categories).
    pub fn dimension(&self) -> usize {
        self.categories.len()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f == name)
    }

    pub fn category_index(&self, name: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == name)
    }

    /// The weights algebra over this declaration's categories.
    pub fn algebra(&self) -> AlgebraDescriptor {
        AlgebraDescriptor::weights(&self.categories)
    }

    /// A fresh manager over [`DeclarationModel::algebra`].
    pub fn manager(&self) -> Manager {
        Manager::new(self.algebra())
    }

    /// Display text for a predicate, e.g. `petal_length ≤ 2.45`.
    pub fn predicate_label(&self, p: &Predicate) -> String {
        let name = self
            .features
            .get(p.feature)
            .map(String::as_str)
            .unwrap_or("?");
        format!("{name} ≤ {}", p.threshold)
    }

    /// Dense feature vector from `(name, value)` pairs. Every declared
    /// feature must be present; a repeated name keeps its last value.
    pub fn feature_vector<'a>(
        &self,
        pairs: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<Vec<f64>, ModelError> {
        let mut x = vec![f64::NAN; self.features.len()];
        for (name, value) in pairs {
            let i = self
                .feature_index(name)
                .ok_or_else(|| ModelError::UnknownFeature(name.to_owned()))?;
            x[i] = value;
        }
        if let Some(i) = x.iter().position(|v| v.is_nan()) {
            return Err(ModelError::MissingFeature(self.features[i].clone()));
        }
        Ok(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelNode {
    Predicate {
        feature: String,
        threshold: f64,
        on_true: String,
        on_false: String,
    },
    /// Omitted categories weigh 0.
    Result { weights: Vec<(String, f64)> },
}

impl ModelNode {
    fn successors(&self) -> [Option<&str>; 2] {
        match self {
            ModelNode::Predicate {
                on_true, on_false, ..
            } => [Some(on_true), Some(on_false)],
            ModelNode::Result { .. } => [None, None],
        }
    }
}

/// A validated decision diagram model.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramModel {
    name: String,
    root: String,
    nodes: BTreeMap<String, ModelNode>,
}

impl DiagramModel {
    pub fn new(
        name: &str,
        root: &str,
        nodes: BTreeMap<String, ModelNode>,
        decl: &DeclarationModel,
    ) -> Result<Self, ModelError> {
        if !crate::calc::is_identifier(name) {
            return Err(ModelError::InvalidIdentifier {
                kind: "diagram",
                name: name.to_owned(),
            });
        }
        let model = DiagramModel {
            name: name.to_owned(),
            root: root.to_owned(),
            nodes,
        };
        model.validate(decl)?;
        Ok(model)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn nodes(&self) -> &BTreeMap<String, ModelNode> {
        &self.nodes
    }

    pub fn renamed(mut self, name: &str) -> Self {
        name.clone_into(&mut self.name);
        self
    }

    /// Re-checks every structural and reference constraint against `decl`.
    pub fn validate(&self, decl: &DeclarationModel) -> Result<(), ModelError> {
        if !self.nodes.contains_key(&self.root) {
            return Err(ModelError::UnknownNode {
                from: "root".to_owned(),
                target: self.root.clone(),
            });
        }
        for (id, node) in &self.nodes {
            match node {
                ModelNode::Predicate {
                    feature,
                    threshold,
                    on_true,
                    on_false,
                } => {
                    if decl.feature_index(feature).is_none() {
                        return Err(ModelError::UnresolvedFeature {
                            node: id.clone(),
                            feature: feature.clone(),
                        });
                    }
                    if !threshold.is_finite() {
                        return Err(ModelError::NonFiniteThreshold { node: id.clone() });
                    }
                    for target in [on_true, on_false] {
                        if !self.nodes.contains_key(target) {
                            return Err(ModelError::UnknownNode {
                                from: id.clone(),
                                target: target.clone(),
                            });
                        }
                    }
                }
                ModelNode::Result { weights } => {
                    let mut seen = BTreeSet::new();
                    for (category, w) in weights {
                        if decl.category_index(category).is_none() {
                            return Err(ModelError::UnresolvedCategory {
                                node: id.clone(),
                                category: category.clone(),
                            });
                        }
                        if !seen.insert(category.as_str()) {
                            return Err(ModelError::DuplicateWeight {
                                node: id.clone(),
                                category: category.clone(),
                            });
                        }
                        if !w.is_finite() {
                            return Err(ModelError::NonFiniteWeight {
                                node: id.clone(),
                                category: category.clone(),
                            });
                        }
                    }
                }
            }
        }
        self.check_acyclic()?;
        let reachable = self.reachable();
        if let Some(id) = self.nodes.keys().find(|id| !reachable.contains(id.as_str())) {
            return Err(ModelError::Unreachable { node: id.clone() });
        }
        Ok(())
    }

    fn check_acyclic(&self) -> Result<(), ModelError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        let mut marks: BTreeMap<&str, Mark> = BTreeMap::new();
        for start in self.nodes.keys() {
            if marks.contains_key(start.as_str()) {
                continue;
            }
            // (node, next successor slot to visit)
            let mut stack: Vec<(&str, usize)> = vec![(start, 0)];
            marks.insert(start, Mark::Open);
            while let Some((id, slot)) = stack.pop() {
                let succ = self.nodes[id].successors();
                if slot < 2 {
                    stack.push((id, slot + 1));
                    if let Some(next) = succ[slot] {
                        match marks.get(next) {
                            Some(Mark::Open) => {
                                return Err(ModelError::Cyclic {
                                    node: next.to_owned(),
                                })
                            }
                            Some(Mark::Done) => {}
                            None => {
                                marks.insert(next, Mark::Open);
                                stack.push((next, 0));
                            }
                        }
                    }
                } else {
                    marks.insert(id, Mark::Done);
                }
            }
        }
        Ok(())
    }

    fn reachable(&self) -> BTreeSet<&str> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.root.as_str()];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            stack.extend(self.nodes[id].successors().into_iter().flatten());
        }
        seen
    }

    /// Weight vector of a result node in category order.
    pub fn result_vector(weights: &[(String, f64)], decl: &DeclarationModel) -> WeightVector {
        let mut v = vec![0.0; decl.dimension()];
        for (category, w) in weights {
            if let Some(i) = decl.category_index(category) {
                v[i] = *w;
            }
        }
        WeightVector::new(v)
    }

    /// Interprets the model directly: follows the true successor whenever
    /// `x[feature] <= threshold`.
    pub fn evaluate(&self, decl: &DeclarationModel, x: &[f64]) -> Result<WeightVector, ModelError> {
        match &self.nodes[self.reached_result(decl, x)?] {
            ModelNode::Result { weights } => Ok(Self::result_vector(weights, decl)),
            ModelNode::Predicate { .. } => unreachable!("walk stops at result nodes"),
        }
    }

    /// Node id of the result reached for `x`.
    pub fn reached_result(&self, decl: &DeclarationModel, x: &[f64]) -> Result<&str, ModelError> {
        let mut id = self.root.as_str();
        while let ModelNode::Predicate {
            feature,
            threshold,
            on_true,
            on_false,
        } = &self.nodes[id]
        {
            let v = decl
                .feature_index(feature)
                .and_then(|i| x.get(i))
                .copied()
                .filter(|v| !v.is_nan())
                .ok_or_else(|| ModelError::MissingFeature(feature.clone()))?;
            id = if v <= *threshold { on_true } else { on_false };
        }
        Ok(id)
    }

    /// Distinct predicates tested anywhere in the model.
    pub fn predicates(&self, decl: &DeclarationModel) -> Vec<Predicate> {
        let mut out: Vec<Predicate> = Vec::new();
        for node in self.nodes.values() {
            if let ModelNode::Predicate {
                feature, threshold, ..
            } = node
            {
                if let Some(feature) = decl.feature_index(feature) {
                    let p = Predicate {
                        feature,
                        threshold: *threshold,
                    };
                    if !out.contains(&p) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    pub fn predicate_node_count(&self) -> usize {
        self.nodes
            .values()
            .filter(|n| matches!(n, ModelNode::Predicate { .. }))
            .count()
    }

    pub fn result_node_count(&self) -> usize {
        self.nodes.len() - self.predicate_node_count()
    }
}

/// Compiles a validated model into `mgr`, which must use the weights
/// algebra of the model's declaration. Shared sub-graphs merge and
/// redundant tests vanish; the model need not respect the variable order.
pub fn compile_diagram(
    mgr: &mut Manager,
    decl: &DeclarationModel,
    model: &DiagramModel,
) -> Result<NodeRef, ModelError> {
    if mgr.algebra().carrier() != CarrierKind::Vector(decl.dimension()) {
        return Err(ModelError::AlgebraMismatch {
            expected: decl.dimension(),
            found: String::from(mgr.algebra().name()),
        });
    }
    let mut done: BTreeMap<&str, NodeRef> = BTreeMap::new();
    compile_node(mgr, decl, model, &model.root, &mut done)
}

fn compile_node<'m>(
    mgr: &mut Manager,
    decl: &DeclarationModel,
    model: &'m DiagramModel,
    id: &'m str,
    done: &mut BTreeMap<&'m str, NodeRef>,
) -> Result<NodeRef, ModelError> {
    if let Some(&r) = done.get(id) {
        return Ok(r);
    }
    let r = match &model.nodes[id] {
        ModelNode::Result { weights } => {
            mgr.constant(AlgebraValue::Vector(DiagramModel::result_vector(weights, decl)))?
        }
        ModelNode::Predicate {
            feature,
            threshold,
            on_true,
            on_false,
        } => {
            let feature = decl
                .feature_index(feature)
                .ok_or_else(|| ModelError::UnresolvedFeature {
                    node: id.to_owned(),
                    feature: feature.clone(),
                })?;
            let var = mgr.predicate_var(feature, *threshold)?;
            let hi = compile_node(mgr, decl, model, on_true, done)?;
            let lo = compile_node(mgr, decl, model, on_false, done)?;
            mgr.select(var, hi, lo)?
        }
    };
    done.insert(id, r);
    Ok(r)
}

/// One representative feature vector per cell of the partition induced by
/// `predicates`: every combination of predicate outcomes that some real
/// input can produce is hit exactly once. Features without predicates are
/// set to 0.
pub fn feasible_inputs(feature_count: usize, predicates: &[Predicate]) -> Vec<Vec<f64>> {
    let mut per_feature: Vec<Vec<f64>> = vec![Vec::new(); feature_count];
    for p in predicates {
        if p.feature < feature_count {
            per_feature[p.feature].push(p.threshold);
        }
    }
    let reps: Vec<Vec<f64>> = per_feature
        .into_iter()
        .map(|mut ts| {
            if ts.is_empty() {
                return vec![0.0];
            }
            ts.sort_by(f64::total_cmp);
            ts.dedup();
            // x = t_i lands in (t_{i-1}, t_i]; one more point above them all
            let top = ts[ts.len() - 1] + 1.0;
            ts.push(top);
            ts
        })
        .collect();
    let mut out = vec![Vec::with_capacity(feature_count)];
    for choices in &reps {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |&c| {
                    let mut p = prefix.clone();
                    p.push(c);
                    p
                })
            })
            .collect();
    }
    out
}
