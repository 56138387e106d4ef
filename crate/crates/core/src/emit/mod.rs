//! Text emitters: Graphviz dot and standalone evaluator programs.

pub mod codegen;
pub mod dot;

pub use codegen::{block_count, codegen, CodegenError, CodegenOptions, Target};
pub use dot::to_dot;
