//! The shipped Iris example: a three-tree forest, an expert diagram and the
//! expression that combines them.
//!
//! The expert diagram puts weight 8 on setosa for flowers with narrow, short
//! petals and weight 0 everywhere else. Added to the normalized forest vote
//! it forces setosa on that region and leaves every other prediction alone.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::forest::{ForestModel, TreeModel};
use crate::model::{DeclarationModel, DiagramModel, ModelNode};

pub const FEATURES: [&str; 4] = ["sepal_length", "sepal_width", "petal_length", "petal_width"];
pub const CATEGORIES: [&str; 3] = ["setosa", "versicolor", "virginica"];
pub const COMPOSITION: &str = "norm(T1 + T2 + T3) + Expert";
pub const EXPERT_WEIGHT: f64 = 8.0;
/// Id of the expert's setosa result node.
pub const EXPERT_LEAF: &str = "setosa_override";

const SL: usize = 0;
const SW: usize = 1;
const PL: usize = 2;
const PW: usize = 3;
const SETOSA: usize = 0;
const VERSICOLOR: usize = 1;
const VIRGINICA: usize = 2;

pub fn declaration() -> DeclarationModel {
    DeclarationModel::new(
        FEATURES.iter().map(|s| (*s).to_owned()).collect(),
        CATEGORIES.iter().map(|s| (*s).to_owned()).collect(),
    )
    .expect("fixed declaration is valid")
}

pub fn trees() -> Vec<TreeModel> {
    use TreeModel as T;
    vec![
        T::split(
            PL,
            2.45,
            T::leaf(SETOSA),
            T::split(
                PW,
                1.75,
                T::split(PL, 4.95, T::leaf(VERSICOLOR), T::leaf(VIRGINICA)),
                T::leaf(VIRGINICA),
            ),
        ),
        T::split(
            PW,
            0.8,
            T::leaf(SETOSA),
            T::split(PL, 4.75, T::leaf(VERSICOLOR), T::leaf(VIRGINICA)),
        ),
        T::split(
            SL,
            5.45,
            T::split(SW, 2.8, T::leaf(VERSICOLOR), T::leaf(SETOSA)),
            T::split(PW, 1.65, T::leaf(VERSICOLOR), T::leaf(VIRGINICA)),
        ),
    ]
}

pub fn forest() -> ForestModel {
    ForestModel::new(declaration(), trees()).expect("fixed forest is valid")
}

pub fn expert() -> DiagramModel {
    expert_with_weight(EXPERT_WEIGHT)
}

/// The expert diagram with `weight` on its setosa leaf.
pub fn expert_with_weight(weight: f64) -> DiagramModel {
    let decl = declaration();
    let pred = |feature: &str, threshold: f64, t: &str, f: &str| ModelNode::Predicate {
        feature: feature.to_owned(),
        threshold,
        on_true: t.to_owned(),
        on_false: f.to_owned(),
    };
    let mut nodes: BTreeMap<String, ModelNode> = BTreeMap::new();
    nodes.insert("narrow".into(), pred("petal_width", 0.6, "short", "neutral"));
    nodes.insert("short".into(), pred("petal_length", 3.0, EXPERT_LEAF, "neutral"));
    nodes.insert(
        EXPERT_LEAF.into(),
        ModelNode::Result {
            weights: vec![("setosa".into(), weight)],
        },
    );
    nodes.insert("neutral".into(), ModelNode::Result { weights: vec![] });
    DiagramModel::new("Expert", "narrow", nodes, &decl).expect("fixed expert diagram is valid")
}

/// `T1`, `T2`, `T3` followed by `Expert`.
pub fn diagrams() -> Vec<DiagramModel> {
    let mut out = forest().diagrams();
    out.push(expert());
    out
}
