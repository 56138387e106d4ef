//! Compose, classify and emit: the steps shared by the CLI and the service.

use std::collections::BTreeMap;

use addkit_core::calc::{environment, eval_calc};
use addkit_core::emit::{codegen, to_dot, CodegenError, CodegenOptions, Target};
use addkit_core::forest::{classify, ClassificationResult, ForestError};
use addkit_core::model::compile_diagram;
use addkit_core::{CalcError, CalcExpression, DeclarationModel, DiagramModel, Manager, ModelError, NodeRef};

use crate::graphdoc;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Codegen(#[from] CodegenError),
}

impl PipelineError {
    pub fn is_unknown_diagram(&self) -> bool {
        matches!(self, PipelineError::Calc(CalcError::UnknownDiagram(_)))
    }
}

/// A composed diagram with the manager that owns it.
pub struct Composition {
    pub declaration: DeclarationModel,
    pub manager: Manager,
    pub root: NodeRef,
}

/// Compiles the diagrams `expr` references, in order of first reference,
/// into a fresh manager and evaluates `expr` over them.
pub fn compose(
    decl: &DeclarationModel,
    diagrams: &BTreeMap<String, DiagramModel>,
    expr: &CalcExpression,
    prune: bool,
) -> Result<Composition, PipelineError> {
    let mut mgr = decl.manager();
    let mut bound = Vec::new();
    for name in expr.references() {
        let d = diagrams
            .get(name)
            .ok_or_else(|| CalcError::UnknownDiagram(name.to_owned()))?;
        bound.push((name, compile_diagram(&mut mgr, decl, d)?));
    }
    let env = environment(bound);
    let mut root = eval_calc(&mut mgr, expr, &env)?;
    if prune {
        root = mgr.prune_infeasible(root).map_err(ModelError::from)?;
    }
    Ok(Composition {
        declaration: decl.clone(),
        manager: mgr,
        root,
    })
}

impl Composition {
    pub fn from_graph_doc(doc: &graphdoc::GraphDoc) -> Result<Self, crate::files::FormatError> {
        let (declaration, manager, root) = doc.load()?;
        Ok(Composition {
            declaration,
            manager,
            root,
        })
    }

    pub fn graph_doc(&self) -> String {
        graphdoc::to_graph_doc(&self.manager, self.root, &self.declaration)
    }

    pub fn dot(&self) -> String {
        let mgr = &self.manager;
        to_dot(mgr, self.root, &|v| match mgr.predicate(v) {
            Some(p) => self.declaration.predicate_label(&p),
            None => format!("v{}", v.id()),
        })
    }

    pub fn codegen(&self, target: Target, function_name: &str, emit_main: bool) -> Result<String, PipelineError> {
        let opts = CodegenOptions {
            function_name: function_name.to_owned(),
            categories: Some(self.declaration.categories().to_vec()),
            feature_count: Some(self.declaration.features().len()),
            emit_main,
        };
        Ok(codegen(&self.manager, self.root, target, &opts)?)
    }

    pub fn classify<'a>(
        &self,
        features: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<ClassificationResult, PipelineError> {
        let x = self.declaration.feature_vector(features)?;
        Ok(classify(&self.manager, self.root, &x)?)
    }

    pub fn inner_count(&self) -> usize {
        self.manager.node_count(self.root).inner
    }

    pub fn terminal_count(&self) -> usize {
        self.manager.node_count(self.root).terminal
    }
}

/// `name=value` pairs separated by commas, e.g. `petal_length=1.4,petal_width=0.2`.
pub fn parse_assignments(text: &str) -> Result<Vec<(String, f64)>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| format!("expected name=value, found `{pair}`"))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| format!("`{}` is not a number", v.trim()))?;
            if !v.is_finite() {
                return Err(format!("value of `{}` must be finite", k.trim()));
            }
            Ok((k.trim().to_owned(), v))
        })
        .collect()
}
