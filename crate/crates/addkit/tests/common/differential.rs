//! Runs generated evaluators and compares them with in-memory evaluation.

use std::path::Path;

use addkit::pipeline::Composition;
use addkit_core::emit::{block_count, Target};
use addkit_core::AlgebraValue;

use super::{compile_c, input_text, run_with_input};

fn components(v: &AlgebraValue) -> Vec<f64> {
    match v {
        AlgebraValue::Vector(w) => w.components().to_vec(),
        AlgebraValue::Real(r) => vec![*r],
        AlgebraValue::Bool(b) => vec![f64::from(u8::from(*b))],
    }
}

/// Generates `target` source for `c`, runs it on `inputs` and checks each
/// output line against `eval_features`: components exact, category by
/// lowest-index argmax. Also checks one block per reachable node.
pub fn check(c: &Composition, target: Target, inputs: &[Vec<f64>], dir: &Path, tag: &str) -> Result<(), String> {
    let src = c.codegen(target, "evaluate", true).map_err(|e| e.to_string())?;
    let count = c.manager.node_count(c.root);
    let blocks = block_count(&src, target);
    if blocks != count.inner + count.terminal {
        return Err(format!("{tag}: {blocks} blocks for {} nodes", count.inner + count.terminal));
    }
    let out = match target {
        Target::C => run_with_input(&compile_c(dir, tag, &src), &[], &input_text(inputs)),
        Target::Js => {
            let path = dir.join(format!("{tag}.js"));
            std::fs::write(&path, &src).unwrap();
            run_with_input(Path::new("node"), &[path.to_str().unwrap()], &input_text(inputs))
        }
    };
    let lines: Vec<&str> = out.lines().collect();
    if lines.len() != inputs.len() {
        return Err(format!("{tag}: {} output lines for {} inputs", lines.len(), inputs.len()));
    }
    let categories = c.declaration.categories();
    for (x, line) in inputs.iter().zip(lines) {
        let expected = components(c.manager.eval_features(c.root, x).map_err(|e| e.to_string())?);
        let mut fields: Vec<&str> = line.split(' ').collect();
        let category = fields.pop().unwrap_or_default();
        let got: Vec<f64> = fields
            .iter()
            .map(|t| t.parse().map_err(|_| format!("{tag}: bad number `{t}` in `{line}`")))
            .collect::<Result<_, _>>()?;
        if got != expected {
            return Err(format!("{tag}: input {x:?} gave {got:?}, expected {expected:?}"));
        }
        let mut best = 0;
        for (i, w) in expected.iter().enumerate() {
            if *w > expected[best] {
                best = i;
            }
        }
        if category != categories[best] {
            return Err(format!("{tag}: input {x:?} gave category {category}, expected {}", categories[best]));
        }
    }
    Ok(())
}
