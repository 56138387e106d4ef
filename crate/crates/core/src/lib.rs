//! Algebraic decision diagrams with interchangeable algebras.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the diagram
//! kernel ([`dd`]), the shipped algebras ([`algebra`]), the declaration and
//! decision-diagram models with their compiler ([`model`]), the composition
//! language ([`calc`]), random forest aggregation ([`forest`]) and the text
//! emitters for dot and generated evaluators ([`emit`]). File formats, the
//! CLI and the HTTP service live in the `addkit` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod calc;
pub mod dd;
pub mod emit;
pub mod forest;
pub mod iris;
pub mod model;
#[cfg(feature = "testgen")]
pub mod testgen;

pub use algebra::{AlgebraDescriptor, AlgebraError, AlgebraValue, CarrierKind, Template, WeightVector};
pub use calc::{eval_calc, parse_calc, CalcError, CalcExpression};
pub use dd::{DdError, Manager, Node, NodeCount, NodeRef, Predicate, Var};
pub use forest::{ClassificationResult, ForestError, ForestModel, TreeModel};
pub use model::{DeclarationModel, DiagramModel, ModelError, ModelNode};
