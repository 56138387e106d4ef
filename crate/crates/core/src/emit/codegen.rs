//! Evaluator source generation.
//!
//! Every reachable node becomes one block. The C target is a goto program
//! with one label per node; the JavaScript target has no goto and runs the
//! same blocks as cases of a `switch` inside a loop. Boolean diagrams
//! return 0 or 1, real diagrams return a double and vector diagrams write
//! their components to an output array.
//!
//! With `emit_main` the program reads feature values from standard input,
//! whitespace separated, one evaluation per `feature_count` numbers, and
//! prints the output components of each on one line, followed by the
//! winning category when categories are known.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::algebra::{AlgebraValue, CarrierKind};
use crate::dd::{Manager, Node, NodeRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    C,
    Js,
}

impl Target {
    pub fn parse(s: &str) -> Option<Target> {
        match s {
            "c" => Some(Target::C),
            "js" => Some(Target::Js),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Target::C => "c",
            Target::Js => "js",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodegenOptions {
    pub function_name: String,
    /// Category names for the argmax helper; vector diagrams only.
    pub categories: Option<Vec<String>>,
    /// Length of the input array. Defaults to one past the highest feature
    /// tested.
    pub feature_count: Option<usize>,
    pub emit_main: bool,
}

impl Default for CodegenOptions {
    fn default() -> Self {
        CodegenOptions {
            function_name: String::from("evaluate"),
            categories: None,
            feature_count: None,
            emit_main: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodegenError {
    #[error("`{0}` is not a valid function name")]
    InvalidName(String),
    #[error("variable at level {0} is not a feature test")]
    PlainVariable(usize),
    #[error("terminal value {0} has no literal in the target")]
    NonFinite(String),
    #[error("{found} category names given for {expected} components")]
    CategoryCount { expected: usize, found: usize },
    #[error("categories need a vector-valued diagram")]
    CategoriesWithoutVector,
    #[error("feature count {given} is too small, feature {needed} is tested")]
    FeatureCount { given: usize, needed: usize },
}

/// A literal that reads back to exactly `x` in both targets.
fn literal(x: f64) -> Result<String, CodegenError> {
    if x.is_finite() {
        Ok(format!("{:?}", if x == 0.0 { 0.0 } else { x }))
    } else {
        Err(CodegenError::NonFinite(format!("{x}")))
    }
}

fn string_literal(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\x{:02x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn valid_name(s: &str) -> bool {
    crate::calc::is_identifier(s)
}

enum Block {
    Test {
        feature: usize,
        threshold: String,
        hi: usize,
        lo: usize,
    },
    Leaf(Vec<String>),
}

struct Plan {
    blocks: Vec<Block>,
    outputs: usize,
    vector: bool,
    boolean: bool,
    feature_count: usize,
}

fn plan(mgr: &Manager, f: NodeRef, opts: &CodegenOptions) -> Result<Plan, CodegenError> {
    if !valid_name(&opts.function_name) {
        return Err(CodegenError::InvalidName(opts.function_name.clone()));
    }
    let (outputs, vector, boolean) = match mgr.algebra().carrier() {
        CarrierKind::Vector(n) => (n, true, false),
        CarrierKind::Boolean => (1, false, true),
        CarrierKind::Real | CarrierKind::UnitInterval => (1, false, false),
    };
    if let Some(cats) = &opts.categories {
        if !vector {
            return Err(CodegenError::CategoriesWithoutVector);
        }
        if cats.len() != outputs {
            return Err(CodegenError::CategoryCount {
                expected: outputs,
                found: cats.len(),
            });
        }
    }
    let nodes = mgr.iter_nodes(f);
    let ids: BTreeMap<NodeRef, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let mut blocks = Vec::with_capacity(nodes.len());
    let mut needed = 0;
    for &n in &nodes {
        blocks.push(match mgr.node(n) {
            Node::Inner { var, hi, lo } => {
                let p = mgr
                    .predicate(*var)
                    .ok_or(CodegenError::PlainVariable(mgr.level(*var)))?;
                needed = needed.max(p.feature + 1);
                Block::Test {
                    feature: p.feature,
                    threshold: literal(p.threshold)?,
                    hi: ids[hi],
                    lo: ids[lo],
                }
            }
            Node::Terminal(v) => Block::Leaf(match v {
                AlgebraValue::Bool(b) => alloc::vec![String::from(if *b { "1" } else { "0" })],
                AlgebraValue::Real(x) => alloc::vec![literal(*x)?],
                AlgebraValue::Vector(w) => w
                    .components()
                    .iter()
                    .map(|&c| literal(c))
                    .collect::<Result<_, _>>()?,
            }),
        });
    }
    let feature_count = match opts.feature_count {
        Some(given) if given < needed => {
            return Err(CodegenError::FeatureCount {
                given,
                needed: needed - 1,
            })
        }
        Some(given) => given,
        None => needed,
    };
    Ok(Plan {
        blocks,
        outputs,
        vector,
        boolean,
        feature_count,
    })
}

/// Generates a standalone evaluator for `f`.
pub fn codegen(
    mgr: &Manager,
    f: NodeRef,
    target: Target,
    opts: &CodegenOptions,
) -> Result<String, CodegenError> {
    let plan = plan(mgr, f, opts)?;
    Ok(match target {
        Target::C => emit_c(&plan, opts),
        Target::Js => emit_js(&plan, opts),
    })
}

fn emit_c(p: &Plan, o: &CodegenOptions) -> String {
    let name = &o.function_name;
    let mut s = String::new();
    if o.emit_main {
        s.push_str("#include <stdio.h>\n\n");
    }
    let _ = writeln!(s, "#define {}_FEATURES {}", name.to_uppercase(), p.feature_count);
    let _ = writeln!(s, "#define {}_OUTPUTS {}\n", name.to_uppercase(), p.outputs);
    if p.vector {
        let _ = writeln!(s, "void {name}(const double *x, double *out)\n{{");
    } else if p.boolean {
        let _ = writeln!(s, "int {name}(const double *x)\n{{");
    } else {
        let _ = writeln!(s, "double {name}(const double *x)\n{{");
    }
    if p.feature_count == 0 {
        s.push_str("    (void)x;\n");
    }
    for (i, b) in p.blocks.iter().enumerate() {
        match b {
            Block::Test {
                feature,
                threshold,
                hi,
                lo,
            } => {
                let _ = writeln!(s, "L{i}: if (x[{feature}] <= {threshold}) goto L{hi}; goto L{lo};");
            }
            Block::Leaf(vals) if p.vector => {
                let _ = write!(s, "L{i}:");
                for (k, v) in vals.iter().enumerate() {
                    let _ = write!(s, " out[{k}] = {v};");
                }
                s.push_str(" return;\n");
            }
            Block::Leaf(vals) => {
                let _ = writeln!(s, "L{i}: return {};", vals[0]);
            }
        }
    }
    s.push_str("}\n");
    if let Some(cats) = &o.categories {
        let _ = write!(s, "\nstatic const char *const {name}_categories[{}] = {{", cats.len());
        for (k, c) in cats.iter().enumerate() {
            let _ = write!(s, "{}{}", if k > 0 { ", " } else { "" }, string_literal(c));
        }
        s.push_str("};\n");
        let _ = writeln!(
            s,
            "\nint {name}_argmax(const double *out)\n{{\n    int best = 0;\n    for (int i = 1; i < {}; i++)\n        if (out[i] > out[best])\n            best = i;\n    return best;\n}}",
            p.outputs
        );
    }
    if o.emit_main {
        let f = p.feature_count;
        let _ = writeln!(s, "\nint main(void)\n{{\n    double x[{}];", f.max(1));
        if p.vector {
            let _ = writeln!(s, "    double out[{}];", p.outputs);
        }
        s.push_str("    for (;;) {\n");
        let _ = writeln!(
            s,
            "        for (int i = 0; i < {f}; i++)\n            if (scanf(\"%lf\", &x[i]) != 1)\n                return 0;"
        );
        if p.vector {
            let _ = writeln!(s, "        {name}(x, out);");
            let _ = writeln!(
                s,
                "        for (int i = 0; i < {}; i++)\n            printf(\"%s%.17g\", i ? \" \" : \"\", out[i]);",
                p.outputs
            );
            if o.categories.is_some() {
                let _ = writeln!(s, "        printf(\" %s\", {name}_categories[{name}_argmax(out)]);");
            }
        } else if p.boolean {
            let _ = writeln!(s, "        printf(\"%d\", {name}(x));");
        } else {
            let _ = writeln!(s, "        printf(\"%.17g\", {name}(x));");
        }
        s.push_str("        printf(\"\\n\");\n");
        if f == 0 {
            s.push_str("        return 0;\n");
        }
        s.push_str("    }\n}\n");
    }
    s
}

fn emit_js(p: &Plan, o: &CodegenOptions) -> String {
    let name = &o.function_name;
    let mut s = String::new();
    let _ = writeln!(s, "const {name}_features = {};", p.feature_count);
    let _ = writeln!(s, "const {name}_outputs = {};\n", p.outputs);
    let _ = writeln!(s, "function {name}(x) {{\n  let n = 0;\n  for (;;) {{\n    switch (n) {{");
    for (i, b) in p.blocks.iter().enumerate() {
        match b {
            Block::Test {
                feature,
                threshold,
                hi,
                lo,
            } => {
                let _ = writeln!(s, "      case {i}: n = x[{feature}] <= {threshold} ? {hi} : {lo}; break;");
            }
            Block::Leaf(vals) if p.vector => {
                let _ = writeln!(s, "      case {i}: return [{}];", vals.join(", "));
            }
            Block::Leaf(vals) => {
                let _ = writeln!(s, "      case {i}: return {};", vals[0]);
            }
        }
    }
    s.push_str("      default: throw new Error(\"bad node \" + n);\n    }\n  }\n}\n");
    let mut exports = alloc::vec![String::from(name.as_str())];
    if let Some(cats) = &o.categories {
        let list: Vec<String> = cats.iter().map(|c| string_literal(c)).collect();
        let _ = writeln!(s, "\nconst {name}_categories = [{}];", list.join(", "));
        let _ = writeln!(
            s,
            "\nfunction {name}_argmax(out) {{\n  let best = 0;\n  for (let i = 1; i < out.length; i++)\n    if (out[i] > out[best])\n      best = i;\n  return best;\n}}"
        );
        exports.push(format!("{name}_categories"));
        exports.push(format!("{name}_argmax"));
    }
    let _ = writeln!(
        s,
        "\nif (typeof module !== \"undefined\")\n  module.exports = {{ {} }};",
        exports.join(", ")
    );
    if o.emit_main {
        let f = p.feature_count;
        s.push_str("\nif (typeof require !== \"undefined\" && require.main === module) {\n");
        s.push_str("  const nums = require(\"fs\").readFileSync(0, \"utf8\").split(/\\s+/).filter((t) => t.length > 0).map(Number);\n");
        s.push_str("  const lines = [];\n");
        if f == 0 {
            s.push_str("  {\n    const x = [];\n");
        } else {
            let _ = writeln!(s, "  for (let i = 0; i + {f} <= nums.length; i += {f}) {{");
            let _ = writeln!(s, "    const x = nums.slice(i, i + {f});");
        }
        let _ = writeln!(s, "    const out = {name}(x);");
        if p.vector {
            if o.categories.is_some() {
                let _ = writeln!(
                    s,
                    "    lines.push(out.map(String).join(\" \") + \" \" + {name}_categories[{name}_argmax(out)]);"
                );
            } else {
                s.push_str("    lines.push(out.map(String).join(\" \"));\n");
            }
        } else {
            s.push_str("    lines.push(String(out));\n");
        }
        s.push_str("  }\n  process.stdout.write(lines.map((l) => l + \"\\n\").join(\"\"));\n}\n");
    }
    s
}

/// Number of node blocks in generated source: labels for C, cases for JS.
pub fn block_count(source: &str, target: Target) -> usize {
    source
        .lines()
        .filter(|l| {
            let t = l.trim_start();
            match target {
                Target::C => t
                    .strip_prefix('L')
                    .and_then(|r| r.split_once(':'))
                    .is_some_and(|(d, _)| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit())),
                Target::Js => t
                    .strip_prefix("case ")
                    .and_then(|r| r.split_once(':'))
                    .is_some_and(|(d, _)| d.bytes().all(|b| b.is_ascii_digit())),
            }
        })
        .count()
}
