//! Graphviz export.
//!
//! Inner nodes are ellipses labeled with their test, terminals are boxes
//! labeled with their value. The true edge is solid and the false edge is
//! dashed. Node ids are positions in [`Manager::iter_nodes`] order, so the
//! text depends only on the diagram and not on how it was built.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt::Write;

use crate::dd::{Manager, Node, NodeRef, Var};

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

/// Renders the diagram rooted at `f`. `label` names the test of each
/// variable, e.g. `petal_length ≤ 2.45`.
pub fn to_dot(mgr: &Manager, f: NodeRef, label: &dyn Fn(Var) -> String) -> String {
    let nodes = mgr.iter_nodes(f);
    let ids: BTreeMap<NodeRef, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let mut out = String::from("digraph add {\n");
    for (i, &n) in nodes.iter().enumerate() {
        let (shape, text) = match mgr.node(n) {
            Node::Terminal(v) => ("box", alloc::format!("{v}")),
            Node::Inner { var, .. } => ("ellipse", label(*var)),
        };
        let _ = writeln!(out, "  n{i} [shape={shape}, label=\"{}\"];", escape(&text));
    }
    for (i, &n) in nodes.iter().enumerate() {
        if let Node::Inner { hi, lo, .. } = mgr.node(n) {
            let _ = writeln!(out, "  n{i} -> n{} [style=solid];", ids[hi]);
            let _ = writeln!(out, "  n{i} -> n{} [style=dashed];", ids[lo]);
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraDescriptor;
    use alloc::format;

    fn fig1a() -> (Manager, NodeRef) {
        let mut m = Manager::new(AlgebraDescriptor::boolean());
        let v: alloc::vec::Vec<_> = (0..3).map(|_| m.new_var()).collect();
        let x: alloc::vec::Vec<_> = v.iter().map(|&v| m.indicator(v).unwrap()).collect();
        let a = m.apply2("and", x[0], x[1]).unwrap();
        let f = m.apply2("or", a, x[2]).unwrap();
        (m, f)
    }

    #[test]
    fn constant_is_one_box() {
        let mut m = Manager::new(AlgebraDescriptor::real());
        let c = m.constant(2.5).unwrap();
        let d = to_dot(&m, c, &|_| String::new());
        assert_eq!(d, "digraph add {\n  n0 [shape=box, label=\"2.5\"];\n}\n");
    }

    #[test]
    fn fig1a_edges() {
        let (m, f) = fig1a();
        let d = to_dot(&m, f, &|v| format!("x{}", v.id() + 1));
        assert_eq!(d.matches("shape=").count(), 5);
        assert_eq!(d.matches("style=solid").count(), 3);
        assert_eq!(d.matches("style=dashed").count(), 3);
        assert_eq!(d, to_dot(&m, f, &|v| format!("x{}", v.id() + 1)));
    }

    #[test]
    fn labels_are_escaped() {
        let (m, f) = fig1a();
        let d = to_dot(&m, f, &|_| String::from("a \"b\""));
        assert!(d.contains("label=\"a \\\"b\\\"\""));
    }
}
