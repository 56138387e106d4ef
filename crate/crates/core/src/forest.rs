//! Random forests as sums of one-hot decision diagrams.
//!
//! Each tree becomes a [`DiagramModel`] whose leaves put weight 1 on their
//! category. Adding the compiled trees yields a diagram whose terminals are
//! vote counts, and classification is an argmax over the reached terminal.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{AlgebraValue, WeightVector};
use crate::dd::{DdError, Manager, NodeRef};
use crate::model::{DeclarationModel, DiagramModel, ModelError, ModelNode};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ForestError {
    #[error("cannot aggregate an empty list of diagrams")]
    Empty,
    #[error("tree {tree}: feature index {feature} out of range")]
    FeatureOutOfRange { tree: usize, feature: usize },
    #[error("tree {tree}: category index {category} out of range")]
    CategoryOutOfRange { tree: usize, category: usize },
    #[error("tree {tree}: threshold must be finite")]
    NonFiniteThreshold { tree: usize },
    #[error("missing value for feature `{0}`")]
    MissingFeature(String),
    #[error("diagram does not evaluate to a weight vector")]
    NotAVector,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dd(#[from] DdError),
}

/// A binary decision tree over declaration indices.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeModel {
    Split {
        feature: usize,
        threshold: f64,
        on_true: Box<TreeModel>,
        on_false: Box<TreeModel>,
    },
    Leaf {
        category: usize,
    },
}

impl TreeModel {
    pub fn split(feature: usize, threshold: f64, on_true: TreeModel, on_false: TreeModel) -> Self {
        TreeModel::Split {
            feature,
            threshold,
            on_true: Box::new(on_true),
            on_false: Box::new(on_false),
        }
    }

    pub fn leaf(category: usize) -> Self {
        TreeModel::Leaf { category }
    }

    /// Category of the leaf reached by `x`, taking the true branch whenever
    /// `x[feature] <= threshold`. `None` if a tested feature is missing.
    pub fn predict(&self, x: &[f64]) -> Option<usize> {
        let mut t = self;
        loop {
            match t {
                TreeModel::Leaf { category } => return Some(*category),
                TreeModel::Split {
                    feature,
                    threshold,
                    on_true,
                    on_false,
                } => {
                    let v = *x.get(*feature).filter(|v| !v.is_nan())?;
                    t = if v <= *threshold { on_true } else { on_false };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeModel::Leaf { .. } => 0,
            TreeModel::Split {
                on_true, on_false, ..
            } => 1 + on_true.depth().max(on_false.depth()),
        }
    }

    pub fn split_count(&self) -> usize {
        match self {
            TreeModel::Leaf { .. } => 0,
            TreeModel::Split {
                on_true, on_false, ..
            } => 1 + on_true.split_count() + on_false.split_count(),
        }
    }

    fn check(&self, tree: usize, decl: &DeclarationModel) -> Result<(), ForestError> {
        match self {
            TreeModel::Leaf { category } if *category >= decl.dimension() => {
                Err(ForestError::CategoryOutOfRange {
                    tree,
                    category: *category,
                })
            }
            TreeModel::Leaf { .. } => Ok(()),
            TreeModel::Split {
                feature,
                threshold,
                on_true,
                on_false,
            } => {
                if *feature >= decl.features().len() {
                    return Err(ForestError::FeatureOutOfRange {
                        tree,
                        feature: *feature,
                    });
                }
                if !threshold.is_finite() {
                    return Err(ForestError::NonFiniteThreshold { tree });
                }
                on_true.check(tree, decl)?;
                on_false.check(tree, decl)
            }
        }
    }
}

/// An ordered list of trees over one declaration.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    declaration: DeclarationModel,
    trees: Vec<TreeModel>,
}

impl ForestModel {
    pub fn new(declaration: DeclarationModel, trees: Vec<TreeModel>) -> Result<Self, ForestError> {
        for (i, t) in trees.iter().enumerate() {
            t.check(i, &declaration)?;
        }
        Ok(ForestModel { declaration, trees })
    }

    pub fn declaration(&self) -> &DeclarationModel {
        &self.declaration
    }

    pub fn trees(&self) -> &[TreeModel] {
        &self.trees
    }

    /// One diagram per tree, named `T1`, `T2`, ...
    pub fn diagrams(&self) -> Vec<DiagramModel> {
        self.trees
            .iter()
            .enumerate()
            .map(|(i, t)| tree_to_diagram(t, &self.declaration, &format!("T{}", i + 1)))
            .collect()
    }

    /// Compiles every tree into `mgr` and sums them.
    pub fn compile(&self, mgr: &mut Manager) -> Result<NodeRef, ForestError> {
        let mut roots = Vec::with_capacity(self.trees.len());
        for d in self.diagrams() {
            roots.push(crate::model::compile_diagram(mgr, &self.declaration, &d)?);
        }
        aggregate(mgr, &roots)
    }
}

/// The classification of one input: the winning category and the terminal
/// it was read from.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub index: usize,
    pub category: String,
    pub weights: WeightVector,
}

/// Converts a tree into an isomorphic diagram with one-hot results. Node ids
/// are `n0`, `n1`, ... in preorder.
pub fn tree_to_diagram(tree: &TreeModel, decl: &DeclarationModel, name: &str) -> DiagramModel {
    let mut nodes = BTreeMap::new();
    let mut next = 0usize;
    let root = emit_tree(tree, decl, &mut nodes, &mut next);
    DiagramModel::new(name, &root, nodes, decl).expect("trees yield valid diagrams")
}

fn emit_tree(
    tree: &TreeModel,
    decl: &DeclarationModel,
    nodes: &mut BTreeMap<String, ModelNode>,
    next: &mut usize,
) -> String {
    let id = format!("n{next}");
    *next += 1;
    let node = match tree {
        TreeModel::Leaf { category } => ModelNode::Result {
            weights: vec![(decl.categories()[*category].clone(), 1.0)],
        },
        TreeModel::Split {
            feature,
            threshold,
            on_true,
            on_false,
        } => ModelNode::Predicate {
            feature: decl.features()[*feature].clone(),
            threshold: *threshold,
            on_true: emit_tree(on_true, decl, nodes, next),
            on_false: emit_tree(on_false, decl, nodes, next),
        },
    };
    nodes.insert(id.clone(), node);
    id
}

/// Left fold of `+` over `diagrams`.
pub fn aggregate(mgr: &mut Manager, diagrams: &[NodeRef]) -> Result<NodeRef, ForestError> {
    let (&first, rest) = diagrams.split_first().ok_or(ForestError::Empty)?;
    let mut acc = first;
    for &g in rest {
        acc = mgr.apply2("+", acc, g)?;
    }
    Ok(acc)
}

/// Evaluates `f` at `x` and picks the heaviest category; ties go to the
/// category declared first.
pub fn classify(mgr: &Manager, f: NodeRef, x: &[f64]) -> Result<ClassificationResult, ForestError> {
    let value = mgr.eval_features(f, x)?;
    let AlgebraValue::Vector(w) = value else {
        return Err(ForestError::NotAVector);
    };
    let index = w.argmax().ok_or(ForestError::NotAVector)?;
    Ok(ClassificationResult {
        index,
        category: mgr.algebra().label(index),
        weights: w.clone(),
    })
}

/// Plurality vote by direct traversal of every tree, with the same
/// threshold convention and tie-break as [`classify`].
pub fn vote_oracle(forest: &ForestModel, x: &[f64]) -> Result<usize, ForestError> {
    let decl = forest.declaration();
    let mut votes = vec![0u32; decl.dimension()];
    for t in forest.trees() {
        let c = t.predict(x).ok_or_else(|| {
            let missing = (0..decl.features().len())
                .find(|&i| x.get(i).is_none_or(|v| v.is_nan()))
                .unwrap_or(0);
            ForestError::MissingFeature(decl.features()[missing].clone())
        })?;
        votes[c] += 1;
    }
    let mut best = 0;
    for (i, &v) in votes.iter().enumerate() {
        if v > votes[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Tally of votes per category, for checking aggregated terminals.
pub fn vote_counts(forest: &ForestModel, x: &[f64]) -> Option<Vec<f64>> {
    let mut votes = vec![0.0; forest.declaration().dimension()];
    for t in forest.trees() {
        votes[t.predict(x)?] += 1.0;
    }
    Some(votes)
}
