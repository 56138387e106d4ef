//! Seeded generators for tests and benchmarks.
//!
//! Thresholds come from a small fixed grid so that independent trees share
//! predicates, and inputs hit grid points exactly often enough to exercise
//! the `<=` boundary.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraValue, CarrierKind, WeightVector};
use crate::dd::Predicate;
use crate::forest::{ForestModel, TreeModel};
use crate::model::{DeclarationModel, DiagramModel, ModelNode};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Thresholds used by every generated predicate.
pub const THRESHOLD_GRID: [f64; 3] = [-0.5, 0.0, 0.5];

/// `f0`, `f1`, ... and `c0`, `c1`, ...
pub fn declaration(features: usize, categories: usize) -> DeclarationModel {
    DeclarationModel::new(
        (0..features).map(|i| format!("f{i}")).collect(),
        (0..categories).map(|i| format!("c{i}")).collect(),
    )
    .expect("generated names are valid")
}

#[derive(Debug, Clone, Copy)]
pub struct ForestShape {
    pub max_trees: usize,
    pub max_depth: usize,
    pub max_features: usize,
    pub max_categories: usize,
    /// Chance that a node above the depth limit splits. Denser trees over
    /// many features make the summed diagram grow into the millions of
    /// nodes.
    pub split_probability: f64,
}

impl Default for ForestShape {
    fn default() -> Self {
        ForestShape {
            max_trees: 50,
            max_depth: 8,
            max_features: 10,
            max_categories: 4,
            split_probability: 0.5,
        }
    }
}

pub fn random_tree(rng: &mut TestRng, features: usize, categories: usize, depth: usize, split: f64) -> TreeModel {
    if depth == 0 || !rng.gen_bool(split) {
        return TreeModel::leaf(rng.gen_range(0..categories));
    }
    let feature = rng.gen_range(0..features);
    let threshold = *THRESHOLD_GRID.choose(rng).expect("grid is non-empty");
    let t = random_tree(rng, features, categories, depth - 1, split);
    let f = random_tree(rng, features, categories, depth - 1, split);
    TreeModel::split(feature, threshold, t, f)
}

/// A forest with 1..=max_trees trees of depth at most `max_depth`, over
/// 1..=max_features features and 2..=max_categories categories.
pub fn random_forest(rng: &mut TestRng, shape: &ForestShape) -> ForestModel {
    let features = rng.gen_range(1..=shape.max_features);
    let categories = rng.gen_range(2..=shape.max_categories.max(2));
    let count = rng.gen_range(1..=shape.max_trees);
    let trees = (0..count)
        .map(|_| {
            let depth = rng.gen_range(0..=shape.max_depth);
            random_tree(rng, features, categories, depth, shape.split_probability)
        })
        .collect();
    ForestModel::new(declaration(features, categories), trees).expect("generated forest is valid")
}

/// A feature value: a grid threshold half of the time, otherwise uniform
/// over a range that covers the grid.
pub fn random_feature(rng: &mut TestRng) -> f64 {
    if rng.gen_bool(0.5) {
        *THRESHOLD_GRID.choose(rng).expect("grid is non-empty")
    } else {
        rng.gen_range(-1.0..1.0)
    }
}

pub fn random_input(rng: &mut TestRng, features: usize) -> Vec<f64> {
    (0..features).map(|_| random_feature(rng)).collect()
}

/// An input for diagrams testing `predicates`: each feature is one of its
/// thresholds half of the time, otherwise uniform over its thresholds'
/// range widened by one on both sides.
pub fn random_input_around(rng: &mut TestRng, features: usize, predicates: &[Predicate]) -> Vec<f64> {
    (0..features)
        .map(|f| {
            let ts: Vec<f64> = predicates.iter().filter(|p| p.feature == f).map(|p| p.threshold).collect();
            if ts.is_empty() {
                return rng.gen_range(-1.0..1.0);
            }
            if rng.gen_bool(0.5) {
                return *ts.choose(rng).expect("non-empty");
            }
            let lo = ts.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
            let hi = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
            rng.gen_range(lo..hi)
        })
        .collect()
}

/// A random DAG-shaped diagram model with up to `max_predicates` tests.
/// Later nodes may point at any earlier node, so sub-graphs are shared and
/// the variable order is not respected.
pub fn random_diagram(
    rng: &mut TestRng,
    decl: &DeclarationModel,
    name: &str,
    max_predicates: usize,
) -> DiagramModel {
    let mut nodes: BTreeMap<String, ModelNode> = BTreeMap::new();
    let mut ids: Vec<String> = Vec::new();
    let results = rng.gen_range(1..=4);
    for i in 0..results {
        let mut weights = Vec::new();
        for c in decl.categories() {
            if rng.gen_bool(0.7) {
                weights.push((c.clone(), f64::from(rng.gen_range(-8i32..=8)) / 4.0));
            }
        }
        let id = format!("r{i}");
        nodes.insert(id.clone(), ModelNode::Result { weights });
        ids.push(id);
    }
    let predicates = rng.gen_range(0..=max_predicates);
    for i in 0..predicates {
        let on_true = ids.choose(rng).expect("ids is non-empty").clone();
        let on_false = ids.choose(rng).expect("ids is non-empty").clone();
        let feature = decl.features()[rng.gen_range(0..decl.features().len())].clone();
        let threshold = *THRESHOLD_GRID.choose(rng).expect("grid is non-empty");
        let id = format!("p{i}");
        nodes.insert(
            id.clone(),
            ModelNode::Predicate {
                feature,
                threshold,
                on_true,
                on_false,
            },
        );
        ids.push(id);
    }
    // keep only what the last node reaches
    let root = ids.last().expect("ids is non-empty").clone();
    let mut keep = BTreeMap::new();
    let mut stack = alloc::vec![root.clone()];
    while let Some(id) = stack.pop() {
        if keep.contains_key(&id) {
            continue;
        }
        let node = nodes[&id].clone();
        if let ModelNode::Predicate {
            on_true, on_false, ..
        } = &node
        {
            stack.push(on_true.clone());
            stack.push(on_false.clone());
        }
        keep.insert(id, node);
    }
    DiagramModel::new(name, &root, keep, decl).expect("generated diagram is valid")
}

/// A random element of `carrier`. Reals are multiples of 1/4 in [-4, 4],
/// so sums and products stay exact; unit-interval values are multiples of
/// 1/8.
pub fn random_value(rng: &mut TestRng, carrier: CarrierKind) -> AlgebraValue {
    match carrier {
        CarrierKind::Boolean => AlgebraValue::Bool(rng.gen_bool(0.5)),
        CarrierKind::UnitInterval => AlgebraValue::Real(f64::from(rng.gen_range(0..=8u8)) / 8.0),
        CarrierKind::Real => AlgebraValue::Real(f64::from(rng.gen_range(-16i32..=16)) / 4.0),
        CarrierKind::Vector(n) => AlgebraValue::Vector(WeightVector::new(
            (0..n)
                .map(|_| f64::from(rng.gen_range(-16i32..=16)) / 4.0)
                .collect(),
        )),
    }
}

/// A value table over `vars` variables drawn from a pool of `distinct`
/// values, so the resulting diagrams have repeated terminals and shared
/// structure.
pub fn random_table(rng: &mut TestRng, carrier: CarrierKind, vars: usize, distinct: usize) -> Vec<AlgebraValue> {
    let pool: Vec<AlgebraValue> = (0..distinct.max(1)).map(|_| random_value(rng, carrier)).collect();
    (0..1usize << vars)
        .map(|_| pool.choose(rng).expect("pool is non-empty").clone())
        .collect()
}
