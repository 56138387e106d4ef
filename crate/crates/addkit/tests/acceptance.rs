//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p addkit --test acceptance`.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use addkit::files;
use addkit::graphdoc::parse_graph_doc;
use addkit::pipeline::{compose, Composition};
use addkit_core::emit::Target;
use addkit_core::forest::{classify, vote_oracle};
use addkit_core::testgen::{self, random_table, ForestShape};
use addkit_core::{
    iris, parse_calc, AlgebraDescriptor, AlgebraValue, CarrierKind, DiagramModel, Manager,
    NodeRef, Predicate, WeightVector,
};
use common::{differential, encode_query, request, run_cli, runtime, tool_available, IrisWorkspace};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- Fig. 1

fn fig1() -> Outcome {
    let mut b = Manager::new(AlgebraDescriptor::boolean());
    let x: Vec<NodeRef> = (0..3)
        .map(|_| {
            let v = b.new_var();
            b.indicator(v).unwrap()
        })
        .collect();
    let and = b.apply2("and", x[0], x[1]).map_err(|e| e.to_string())?;
    let f = b.apply2("or", and, x[2]).map_err(|e| e.to_string())?;
    let c = b.node_count(f);
    ensure(c.inner == 3 && c.terminal == 2, || format!("(x1 and x2) or x3 has {c:?}"))?;

    let mut r = Manager::new(AlgebraDescriptor::real());
    let x: Vec<NodeRef> = (0..3)
        .map(|_| {
            let v = r.new_var();
            r.indicator(v).unwrap()
        })
        .collect();
    let mul = r.apply2("*", x[0], x[1]).map_err(|e| e.to_string())?;
    let g = r.apply2("+", mul, x[2]).map_err(|e| e.to_string())?;
    let c = r.node_count(g);
    ensure(c.inner == 4 && c.terminal == 3, || format!("(x1 * x2) + x3 has {c:?}"))?;
    let values: BTreeSet<String> = r.terminals(g).iter().map(|&t| r.value(t).unwrap().to_string()).collect();
    let want: BTreeSet<String> = ["0", "1", "2"].iter().map(|s| s.to_string()).collect();
    ensure(values == want, || format!("terminal set {values:?}"))?;
    Ok("boolean {inner: 3, terminal: 2}; arithmetic {inner: 4, terminal: 3}, terminals {0, 1, 2}".into())
}

// ---------------------------------------------------------------- canonicity

fn truth_table(n: usize, bits: u32) -> Vec<AlgebraValue> {
    (0..1u32 << n).map(|a| AlgebraValue::Bool(bits >> a & 1 == 1)).collect()
}

/// Sum of minterms; variable `k` is bit `k` of the assignment index.
fn minterms(m: &mut Manager, x: &[NodeRef], bits: u32) -> NodeRef {
    let mut f = m.constant(false).unwrap();
    for a in 0..(1u32 << x.len()) {
        if bits >> a & 1 == 0 {
            continue;
        }
        let mut term = m.constant(true).unwrap();
        for (k, &v) in x.iter().enumerate() {
            let lit = if a >> k & 1 == 1 { v } else { m.apply1("not", v).unwrap() };
            term = m.apply2("and", term, lit).unwrap();
        }
        f = m.apply2("or", f, term).unwrap();
    }
    f
}

fn semantics(m: &Manager, f: NodeRef, n: usize) -> Vec<AlgebraValue> {
    (0..1usize << n)
        .map(|a| {
            let bits: Vec<bool> = (0..n).map(|k| a >> k & 1 == 1).collect();
            m.eval_assignment(f, &bits).unwrap().clone()
        })
        .collect()
}

fn canonicity() -> Outcome {
    let mut m = Manager::new(AlgebraDescriptor::boolean());
    let x: Vec<NodeRef> = (0..3)
        .map(|_| {
            let v = m.new_var();
            m.indicator(v).unwrap()
        })
        .collect();
    let mut handles = HashSet::new();
    for bits in 0..256u32 {
        let a = minterms(&mut m, &x, bits);
        let b = m.build_from_table(&truth_table(3, bits)).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("function {bits:#010b}: apply and table handles differ"))?;
        ensure(semantics(&m, a, 3) == truth_table(3, bits), || format!("function {bits:#010b} evaluates wrongly"))?;
        handles.insert(a);
    }
    ensure(handles.len() == 256, || format!("{} distinct handles", handles.len()))?;

    let mut m = Manager::new(AlgebraDescriptor::boolean());
    let x: Vec<NodeRef> = (0..2)
        .map(|_| {
            let v = m.new_var();
            m.indicator(v).unwrap()
        })
        .collect();
    let mut built = Vec::new();
    for bits in 0..16u32 {
        built.push(minterms(&mut m, &x, bits));
        let dual = minterms(&mut m, &x, !bits & 0xf);
        built.push(m.apply1("not", dual).unwrap());
        built.push(m.build_from_table(&truth_table(2, bits)).unwrap());
        let xor = m.apply2("xor", x[0], x[1]).unwrap();
        let twice = m.apply2("xor", built[built.len() - 1], xor).unwrap();
        built.push(m.apply2("xor", twice, xor).unwrap());
    }
    let mut pairs = 0;
    for &f in &built {
        for &g in &built {
            let same = semantics(&m, f, 2) == semantics(&m, g, 2);
            ensure(same == (f == g), || "semantic and handle equality disagree".into())?;
            pairs += 1;
        }
    }
    Ok(format!("256/256 three-variable functions handle-identical; {pairs} two-variable pairs agree"))
}

// ---------------------------------------------------------------- apply soundness

/// Independent pointwise definitions of every built-in operation. `None`
/// means the operation is undefined there (division by zero).
fn reference(algebra: &str, op: &str, a: &AlgebraValue, b: Option<&AlgebraValue>) -> Option<AlgebraValue> {
    use AlgebraValue::{Bool, Real, Vector};
    let zip = |b: Option<&AlgebraValue>, f: &dyn Fn(f64, f64) -> Option<f64>| match (a, b) {
        (Vector(u), Some(Vector(v))) => u
            .components()
            .iter()
            .zip(v.components())
            .map(|(&x, &y)| f(x, y))
            .collect::<Option<Vec<f64>>>()
            .map(|c| Vector(WeightVector::new(c))),
        _ => panic!("vector operands expected"),
    };
    Some(match (algebra, op, a, b) {
        ("boolean", "and", Bool(x), Some(Bool(y))) => Bool(*x && *y),
        ("boolean", "or", Bool(x), Some(Bool(y))) => Bool(*x || *y),
        ("boolean", "xor", Bool(x), Some(Bool(y))) => Bool(x != y),
        ("boolean", "not", Bool(x), None) => Bool(!x),
        ("fuzzy", "and", Real(x), Some(Real(y))) => Real(x * y),
        ("fuzzy", "or", Real(x), Some(Real(y))) => Real(x + y - x * y),
        ("fuzzy", "not", Real(x), None) => Real(1.0 - x),
        ("real", "+", Real(x), Some(Real(y))) => Real(x + y),
        ("real", "-", Real(x), Some(Real(y))) => Real(x - y),
        ("real", "*", Real(x), Some(Real(y))) => Real(x * y),
        ("real", "/", Real(x), Some(Real(y))) => Real(if *y == 0.0 { return None } else { x / y }),
        ("real", "min", Real(x), Some(Real(y))) => Real(x.min(*y)),
        ("real", "max", Real(x), Some(Real(y))) => Real(x.max(*y)),
        ("real", "neg", Real(x), None) => Real(-x),
        ("weights", "+", _, b) => return zip(b, &|x, y| Some(x + y)),
        ("weights", "-", _, b) => return zip(b, &|x, y| Some(x - y)),
        ("weights", "*", _, b) => return zip(b, &|x, y| Some(x * y)),
        ("weights", "/", _, b) => return zip(b, &|x, y| (y != 0.0).then(|| x / y)),
        ("weights", "norm", Vector(v), None) => {
            let s: f64 = v.components().iter().sum();
            let c = v.components().iter().map(|&w| if s == 0.0 { w } else { w / s }).collect();
            Vector(WeightVector::new(c))
        }
        _ => panic!("no reference for {algebra} `{op}`"),
    })
}

fn close(a: &AlgebraValue, b: &AlgebraValue, tol: f64) -> bool {
    match (a, b) {
        (AlgebraValue::Bool(x), AlgebraValue::Bool(y)) => x == y,
        (AlgebraValue::Real(x), AlgebraValue::Real(y)) => (x - y).abs() <= tol,
        (AlgebraValue::Vector(u), AlgebraValue::Vector(v)) => {
            u.dim() == v.dim() && u.components().iter().zip(v.components()).all(|(x, y)| (x - y).abs() <= tol)
        }
        _ => false,
    }
}

/// Checks the lifting law of `op` on every assignment of `n` variables.
/// Returns whether the operation was undefined somewhere.
fn lifting(
    m: &mut Manager,
    op: &str,
    operands: (NodeRef, Option<NodeRef>),
    n: usize,
) -> Result<bool, String> {
    let algebra = m.algebra().name().to_owned();
    let result = match operands {
        (f, Some(g)) => m.apply2(op, f, g),
        (f, None) => m.apply1(op, f),
    };
    let mut undefined = false;
    let mut expected = Vec::with_capacity(1 << n);
    for a in 0..1usize << n {
        let bits: Vec<bool> = (0..n).map(|k| a >> k & 1 == 1).collect();
        let x = m.eval_assignment(operands.0, &bits).unwrap().clone();
        let y = operands.1.map(|g| m.eval_assignment(g, &bits).unwrap().clone());
        match reference(&algebra, op, &x, y.as_ref()) {
            Some(v) => expected.push((bits, v)),
            None => undefined = true,
        }
    }
    match result {
        Err(e) if undefined => {
            let _ = e;
            Ok(true)
        }
        Err(e) => Err(format!("{algebra} `{op}` failed on defined operands: {e}")),
        Ok(_) if undefined => Err(format!("{algebra} `{op}` succeeded where the operation is undefined")),
        Ok(h) => {
            for (bits, want) in &expected {
                let got = m.eval_assignment(h, bits).unwrap();
                if !close(got, want, 1e-9) {
                    return Err(format!("{algebra} `{op}` at {bits:?}: {got} vs {want}"));
                }
            }
            m.check_invariants(h).map_err(|e| e.to_string())?;
            Ok(false)
        }
    }
}

fn apply_soundness() -> Outcome {
    let algebras = [
        AlgebraDescriptor::boolean(),
        AlgebraDescriptor::fuzzy(),
        AlgebraDescriptor::real(),
        AlgebraDescriptor::weights(&["a", "b", "c"]),
    ];
    const PAIRS: u64 = 500;
    let mut checks = 0usize;
    let mut undefined = 0usize;
    for alg in &algebras {
        for pair in 0..PAIRS {
            let n = (pair % 11) as usize;
            let distinct = 1 + (pair / 11 % 4) as usize;
            let mut rng = testgen::rng(pair * 31 + alg.name().len() as u64);
            let mut m = Manager::new(alg.clone());
            for _ in 0..n {
                m.new_var();
            }
            let f = m.build_from_table(&random_table(&mut rng, alg.carrier(), n, distinct)).unwrap();
            let g = m.build_from_table(&random_table(&mut rng, alg.carrier(), n, distinct)).unwrap();
            let binary: Vec<String> = alg.binary_ops().iter().map(|o| o.name.clone()).collect();
            let unary: Vec<String> = alg.unary_ops().iter().map(|o| o.name.clone()).collect();
            for op in &binary {
                undefined += usize::from(lifting(&mut m, op, (f, Some(g)), n)?);
                checks += 1;
            }
            for op in &unary {
                undefined += usize::from(lifting(&mut m, op, (f, None), n)?);
                checks += 1;
            }
        }
    }
    Ok(format!(
        "{} pairs per algebra over {} algebras, {checks} operation checks, {undefined} correctly rejected as undefined",
        PAIRS,
        algebras.len()
    ))
}

// ---------------------------------------------------------------- algebra laws

fn algebra_laws() -> Outcome {
    let fz = AlgebraDescriptor::fuzzy();
    let and = fz.binary_op("and").unwrap().1.func;
    let or = fz.binary_op("or").unwrap().1.func;
    let not = fz.unary_op("not").unwrap().1.func;
    let r = |v: AlgebraValue| v.as_real().unwrap();
    let grid: Vec<AlgebraValue> = (0..=20).map(|i| AlgebraValue::Real(f64::from(i) * 0.05)).collect();
    let mut checks = 0;
    for a in &grid {
        for b in &grid {
            let lhs = r(not(&and(a, b).unwrap()).unwrap());
            let rhs = r(or(&not(a).unwrap(), &not(b).unwrap()).unwrap());
            ensure((lhs - rhs).abs() <= 1e-12, || format!("not(a and b) at {a}, {b}"))?;
            let lhs = r(not(&or(a, b).unwrap()).unwrap());
            let rhs = r(and(&not(a).unwrap(), &not(b).unwrap()).unwrap());
            ensure((lhs - rhs).abs() <= 1e-12, || format!("not(a or b) at {a}, {b}"))?;
            for op in [and, or] {
                let d = r(op(a, b).unwrap()) - r(op(b, a).unwrap());
                ensure(d.abs() <= 1e-12, || format!("commutativity at {a}, {b}"))?;
            }
            for c in &grid {
                for op in [and, or] {
                    let l = r(op(&op(a, b).unwrap(), c).unwrap());
                    let rr = r(op(a, &op(b, c).unwrap()).unwrap());
                    ensure((l - rr).abs() <= 1e-12, || format!("associativity at {a}, {b}, {c}"))?;
                }
                checks += 1;
            }
        }
    }

    let w = AlgebraDescriptor::weights(&["a", "b", "c", "d"]);
    let norm = w.unary_op("norm").unwrap().1.func;
    let mut rng = testgen::rng(99);
    let mut vectors = 0;
    for _ in 0..10_000 {
        let v = match testgen::random_value(&mut rng, CarrierKind::Vector(4)) {
            AlgebraValue::Vector(v) => WeightVector::new(v.components().iter().map(|x| x.abs()).collect()),
            _ => unreachable!(),
        };
        let once = norm(&v.clone().into()).unwrap();
        let twice = norm(&once).unwrap();
        ensure(close(&once, &twice, 1e-9), || format!("norm not idempotent on {v}"))?;
        let n = once.as_vector().unwrap();
        if v.sum() > 0.0 {
            ensure((n.sum() - 1.0).abs() <= 1e-9, || format!("norm({v}) sums to {}", n.sum()))?;
        }
        ensure(n.argmax() == v.argmax(), || format!("argmax changed by norm on {v}"))?;
        vectors += 1;
    }
    Ok(format!("{checks} fuzzy grid triples at 1e-12; {vectors} weight vectors at 1e-9"))
}

// ---------------------------------------------------------------- forests

/// One representative input per cell of the partition the predicates
/// induce: each threshold itself and one value above the largest.
fn cells(features: usize, predicates: &[Predicate]) -> Vec<Vec<f64>> {
    let mut axes = Vec::new();
    for f in 0..features {
        let mut ts: Vec<f64> = predicates.iter().filter(|p| p.feature == f).map(|p| p.threshold).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let top = ts.last().map_or(0.0, |t| t + 1.0);
        ts.push(top);
        axes.push(ts);
    }
    let mut out = vec![Vec::new()];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut x = prefix.clone();
                    x.push(v);
                    x
                })
            })
            .collect();
    }
    out
}

fn forest_semantics() -> Outcome {
    const FORESTS: u64 = 50;
    const INPUTS: usize = 10_000;
    let mut exhaustive = 0;
    let mut terminals = 0;
    let mut largest = 0;
    for seed in 0..FORESTS {
        let mut rng = testgen::rng(1000 + seed);
        let forest = testgen::random_forest(&mut rng, &ForestShape::default());
        let decl = forest.declaration().clone();
        let mut m = decl.manager();
        let root = forest.compile(&mut m).map_err(|e| e.to_string())?;
        largest = largest.max(m.node_count(root).total());
        let trees = forest.trees().len() as f64;
        for t in m.terminals(root) {
            let sum = m.value(t).unwrap().as_vector().unwrap().sum();
            ensure(sum == trees, || format!("forest {seed}: terminal sums to {sum}, {trees} trees"))?;
            terminals += 1;
        }
        let check = |x: &[f64]| -> Result<(), String> {
            let got = classify(&m, root, x).map_err(|e| e.to_string())?.index;
            let want = vote_oracle(&forest, x).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("forest {seed} at {x:?}: {got} vs vote {want}"))
        };
        for _ in 0..INPUTS {
            check(&testgen::random_input(&mut rng, decl.features().len()))?;
        }
        let mut predicates: Vec<Predicate> = Vec::new();
        for p in forest.diagrams().iter().flat_map(|d| d.predicates(&decl)) {
            if !predicates.contains(&p) {
                predicates.push(p);
            }
        }
        if predicates.len() <= 16 {
            for x in cells(decl.features().len(), &predicates) {
                check(&x)?;
            }
            exhaustive += 1;
        }
    }
    Ok(format!(
        "{FORESTS} forests x {INPUTS} inputs agree with voting; {terminals} terminals conserve votes; \
         {exhaustive} forests checked exhaustively; largest diagram {largest} nodes"
    ))
}

// ---------------------------------------------------------------- Iris

fn iris_pipeline() -> Outcome {
    let ws = IrisWorkspace::new();
    let decl = files::parse_declaration(&std::fs::read_to_string(ws.path("iris.decl.json")).unwrap())
        .map_err(|e| e.to_string())?;
    let forest = files::import_forest(
        &std::fs::read_to_string(ws.path("iris.forest.json")).unwrap(),
        Some(&decl),
        ws.dir.path(),
    )
    .map_err(|e| e.to_string())?;
    let (expert, _) = files::load_diagram(&ws.path("Expert.dd.json"), Some(&decl)).map_err(|e| e.to_string())?;

    let graph = ws.arg("composed.json");
    let mut args = vec!["compose".to_owned(), "--decl".into(), ws.arg("iris.decl.json"), "--diagrams".into()];
    args.extend(ws.diagram_args());
    args.extend(["--calc".into(), ws.arg("iris.calc"), "--out".into(), graph.clone()]);
    let (code, _, err) = run_cli(&args);
    ensure(code == 0, || format!("compose failed: {err}"))?;
    let composed = Composition::from_graph_doc(&parse_graph_doc(&std::fs::read_to_string(&graph).unwrap()).unwrap())
        .map_err(|e| e.to_string())?;

    let mut predicates: Vec<Predicate> = forest.diagrams().iter().flat_map(|d| d.predicates(&decl)).collect();
    predicates.extend(expert.predicates(&decl));
    let setosa = decl.category_index("setosa").unwrap();
    let (mut overridden, mut neutral) = (0, 0);
    for x in cells(decl.features().len(), &predicates) {
        let leaf = expert.evaluate(&decl, &x).map_err(|e| e.to_string())?;
        let got = classify(&composed.manager, composed.root, &x).map_err(|e| e.to_string())?.index;
        if leaf.components()[setosa] == iris::EXPERT_WEIGHT {
            ensure(got == setosa, || format!("{x:?} reaches the override but classifies as {got}"))?;
            overridden += 1;
        } else {
            ensure(leaf.sum() == 0.0, || format!("unexpected expert leaf {leaf}"))?;
            let want = vote_oracle(&forest, &x).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("{x:?}: composed {got}, forest-only {want}"))?;
            neutral += 1;
        }
    }
    ensure(overridden > 0 && neutral > 0, || "a region of the expert diagram is never reached".into())?;
    Ok(format!("{overridden} override cells classify as setosa; {neutral} neutral cells match the forest vote"))
}

// ---------------------------------------------------------------- codegen

fn random_fixture(seed: u64) -> (Composition, DiagramModel) {
    let mut rng = testgen::rng(seed);
    let decl = testgen::declaration(5, 3);
    let d = testgen::random_diagram(&mut rng, &decl, "D", 16);
    let store = BTreeMap::from([("D".to_owned(), d.clone())]);
    (compose(&decl, &store, &parse_calc("D").unwrap(), false).unwrap(), d)
}

fn codegen_differential() -> Outcome {
    for tool in ["cc", "node"] {
        ensure(tool_available(tool), || format!("`{tool}` is not available"))?;
    }
    let dir = tempfile::tempdir().unwrap();
    let store = iris::diagrams().into_iter().map(|d| (d.name().to_owned(), d)).collect();
    let iris_c = compose(&iris::declaration(), &store, &parse_calc(iris::COMPOSITION).unwrap(), false).unwrap();
    let mut fixtures = vec![("iris".to_owned(), common::inputs_for(&iris_c.declaration, &iris::diagrams(), 7, 1000), iris_c)];
    for i in 0..20 {
        let (c, d) = random_fixture(500 + i);
        fixtures.push((format!("random{i}"), common::inputs_for(&c.declaration, &[d], i, 1000), c));
    }
    let mut nodes = 0;
    for (tag, inputs, c) in &fixtures {
        for target in [Target::C, Target::Js] {
            differential::check(c, target, inputs, dir.path(), &format!("{tag}_{}", target.name()))?;
        }
        nodes += c.manager.node_count(c.root).total();
    }
    Ok(format!(
        "{} fixtures x 1000 inputs, C and JS equal to in-memory evaluation; {nodes} nodes, one block each",
        fixtures.len()
    ))
}

// ---------------------------------------------------------------- parity

/// A workspace with random diagrams next to the Iris files' format.
fn random_workspace(dir: &Path) -> Vec<String> {
    let decl = testgen::declaration(4, 3);
    std::fs::write(dir.join("random.decl.json"), files::declaration_to_json(&decl)).unwrap();
    let mut rng = testgen::rng(4242);
    let mut names = Vec::new();
    for i in 0..8 {
        let name = format!("D{i}");
        let d = testgen::random_diagram(&mut rng, &decl, &name, 10);
        let text = files::diagram_to_json(&d, Some(files::DeclarationRef::Path("random.decl.json".into())));
        std::fs::write(dir.join(format!("{name}.dd.json")), text).unwrap();
        names.push(name);
    }
    names
}

fn parity_over(
    dir: &Path,
    decl: &str,
    diagrams: &[String],
    expressions: &[String],
) -> Result<usize, String> {
    let app = addkit::service::router(std::sync::Arc::new(std::sync::RwLock::new(
        addkit::service::Store::load(dir).map_err(|e| e.to_string())?,
    )));
    let rt = runtime();
    let mut compared = 0;
    for expr in expressions {
        for prune in [false, true] {
            let mut args = vec!["--decl".to_owned(), dir.join(decl).to_str().unwrap().into(), "--diagrams".into()];
            args.extend(diagrams.iter().map(|d| dir.join(format!("{d}.dd.json")).to_str().unwrap().to_owned()));
            args.extend(["--expr".into(), expr.clone()]);
            if prune {
                args.push("--prune-infeasible".into());
            }
            let with = |cmd: &str| {
                let mut a = vec![cmd.to_owned()];
                a.extend(args.iter().cloned());
                run_cli(&a)
            };
            let (code, cli_graph, err) = with("compose");
            ensure(code == 0, || format!("compose {expr}: {err}"))?;
            let (_, cli_dot, _) = with("dot");
            let graph_file = dir.join("parity.graph.json");
            std::fs::write(&graph_file, &cli_graph).unwrap();
            let (_, doc_dot, _) = run_cli(&["dot".into(), "--composed".into(), graph_file.to_str().unwrap().into()]);

            let q = format!("expression={}&prune={prune}", encode_query(expr));
            let (http_graph, http_dot, posted) = rt.block_on(async {
                let g = request(&app, "GET", &format!("/api/graph?{q}"), None).await;
                let d = request(&app, "GET", &format!("/api/dot?{q}"), None).await;
                let body = serde_json::json!({ "expression": expr, "prune": prune }).to_string();
                let p = request(&app, "POST", "/api/compose", Some(&body)).await;
                (g, d, p)
            });
            ensure(http_graph.0.is_success(), || format!("GET /api/graph {expr}: {}", http_graph.1))?;
            ensure(http_graph.1 == cli_graph, || format!("graph documents differ for `{expr}` (prune {prune})"))?;
            ensure(http_dot.1 == cli_dot, || format!("dot differs for `{expr}` (prune {prune})"))?;
            ensure(doc_dot == cli_dot, || format!("dot from the graph document differs for `{expr}`"))?;
            let posted: serde_json::Value = serde_json::from_str(&posted.1).map_err(|e| e.to_string())?;
            let cli_value: serde_json::Value = serde_json::from_str(&cli_graph).unwrap();
            ensure(posted["graph"] == cli_value, || format!("POST /api/compose graph differs for `{expr}`"))?;
            common::dot::check_diagram(&cli_dot).map_err(|e| format!("dot for `{expr}`: {e}"))?;
            compared += 1;
        }
    }
    Ok(compared)
}

fn cli_http_parity() -> Outcome {
    let ws = IrisWorkspace::new();
    let iris_names: Vec<String> = ["T1", "T2", "T3", "Expert"].iter().map(|s| s.to_string()).collect();
    let mut iris_exprs = iris_names.clone();
    iris_exprs.extend(["T1 + T2 + T3".into(), "norm(T1 + T2 + T3)".into(), iris::COMPOSITION.into()]);
    let a = parity_over(ws.dir.path(), "iris.decl.json", &iris_names, &iris_exprs)?;

    let dir = tempfile::tempdir().unwrap();
    let names = random_workspace(dir.path());
    let mut exprs = names.clone();
    exprs.extend([
        "D0 + D1 * D2".into(),
        "norm(D3 - D4) + D5".into(),
        "(D6 + D7) * (D0 - D1)".into(),
    ]);
    let b = parity_over(dir.path(), "random.decl.json", &names, &exprs)?;
    Ok(format!("{} expression/prune combinations byte-identical across CLI, HTTP and graph documents", a + b))
}

// ---------------------------------------------------------------- runner

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { name: "Fig. 1 reproduction", budget: Duration::from_secs(1), run: fig1 },
        Criterion { name: "Canonicity oracle", budget: Duration::from_secs(10), run: canonicity },
        Criterion { name: "Apply soundness", budget: Duration::from_secs(60), run: apply_soundness },
        Criterion { name: "Algebra laws", budget: Duration::from_secs(5), run: algebra_laws },
        Criterion { name: "Forest semantics preservation", budget: Duration::from_secs(120), run: forest_semantics },
        Criterion { name: "Iris pipeline", budget: Duration::from_secs(10), run: iris_pipeline },
        Criterion { name: "Codegen differential", budget: Duration::from_secs(60), run: codegen_differential },
        Criterion { name: "CLI/HTTP parity", budget: Duration::from_secs(60), run: cli_http_parity },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| c.name.to_lowercase().contains(&f.to_lowercase())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(d) if took > c.budget => Err(format!("{d}; over the {:?} budget", c.budget)),
            o => o,
        };
        let timing = format!("{:.2} s of {} s", took.as_secs_f64(), c.budget.as_secs());
        match outcome {
            Ok(detail) => println!("[PASS] {}: {detail} ({timing})", c.name),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {}: {why} ({timing})", c.name);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
