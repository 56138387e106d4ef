//! The `addkit` command line.
//!
//! Exit status is 0 on success, 1 when an input fails to parse or validate
//! and 2 on usage errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use addkit_core::emit::Target;
use addkit_core::{iris, parse_calc, DeclarationModel, DiagramModel};
use clap::{Args, Parser, Subcommand};

use crate::files::{self, DeclarationRef, FormatError};
use crate::graphdoc;
use crate::pipeline::{self, Composition};

#[derive(Parser, Debug)]
#[command(name = "addkit", version, about = "Algebraic decision diagrams: compose, classify and generate code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check declaration, diagram, forest and calculation files.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Declaration for diagram, forest and calculation files.
        #[arg(long)]
        decl: Option<PathBuf>,
    },
    /// Compose diagrams and write the graph document.
    Compose {
        #[command(flatten)]
        source: ComposeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify one input with a composed diagram.
    Classify {
        #[command(flatten)]
        source: Source,
        /// Feature values as `name=value,...`.
        #[arg(long)]
        input: String,
    },
    /// Write the composed diagram as Graphviz dot.
    Dot {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a standalone evaluator.
    Codegen {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_parser = ["c", "js"])]
        target: String,
        #[arg(long, default_value = "evaluate")]
        function: String,
        /// Add a main program that evaluates inputs read from stdin.
        #[arg(long)]
        main: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the Iris declaration, forest, trees, expert diagram and expression.
    DemoIris {
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Serve the HTTP API over a workspace directory.
    Serve {
        #[arg(long, env = "ADDKIT_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "ADDKIT_WORKSPACE", default_value = ".")]
        workspace: PathBuf,
        /// Directory of static files served under `/`.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ComposeArgs {
    #[arg(long)]
    decl: PathBuf,
    #[arg(long, num_args = 1.., required = true)]
    diagrams: Vec<PathBuf>,
    /// File holding the expression.
    #[arg(long, conflicts_with = "expr", required_unless_present = "expr")]
    calc: Option<PathBuf>,
    /// The expression itself.
    #[arg(long)]
    expr: Option<String>,
    #[arg(long)]
    prune_infeasible: bool,
}

#[derive(Args, Debug)]
struct Source {
    /// Graph document written by `compose`.
    #[arg(long, conflicts_with_all = ["decl", "diagrams", "calc", "expr"])]
    composed: Option<PathBuf>,
    #[arg(long, requires = "diagrams")]
    decl: Option<PathBuf>,
    #[arg(long, num_args = 1.., requires = "decl")]
    diagrams: Vec<PathBuf>,
    #[arg(long, conflicts_with = "expr")]
    calc: Option<PathBuf>,
    #[arg(long)]
    expr: Option<String>,
    #[arg(long)]
    prune_infeasible: bool,
}

/// An error message, usually prefixed with the file it concerns, and the
/// exit status it maps to.
struct Failure {
    msg: String,
    code: i32,
}

fn fail(msg: String) -> Failure {
    Failure { msg, code: 1 }
}

impl Failure {
    fn at(path: &Path, e: impl std::fmt::Display) -> Self {
        fail(format!("{}: {e}", path.display()))
    }

    fn usage(msg: &str) -> Self {
        Failure {
            msg: msg.to_owned(),
            code: 2,
        }
    }
}

fn load_decl(path: &Path) -> Result<DeclarationModel, Failure> {
    files::read_file(path)
        .and_then(|t| files::parse_declaration(&t))
        .map_err(|e| Failure::at(path, e))
}

fn load_diagrams(decl: &DeclarationModel, paths: &[PathBuf]) -> Result<BTreeMap<String, DiagramModel>, Failure> {
    let mut out = BTreeMap::new();
    for p in paths {
        let (d, _) = files::load_diagram(p, Some(decl)).map_err(|e| Failure::at(p, e))?;
        if out.contains_key(d.name()) {
            return Err(Failure::at(p, format!("diagram `{}` given twice", d.name())));
        }
        out.insert(d.name().to_owned(), d);
    }
    Ok(out)
}

fn expression(calc: Option<&Path>, expr: Option<&str>) -> Result<addkit_core::CalcExpression, Failure> {
    match (calc, expr) {
        (Some(path), _) => {
            let text = files::read_file(path).map_err(|e| Failure::at(path, e))?;
            parse_calc(text.trim_end()).map_err(|e| match e.position() {
                Some(p) => fail(format!("{}:1:{}: {e}", path.display(), p + 1)),
                None => Failure::at(path, e),
            })
        }
        (None, Some(text)) => parse_calc(text).map_err(|e| fail(format!("expression: {e}"))),
        (None, None) => Err(Failure::usage("an expression is required (--calc or --expr)")),
    }
}

fn compose_from(
    decl: &Path,
    diagrams: &[PathBuf],
    calc: Option<&Path>,
    expr: Option<&str>,
    prune: bool,
) -> Result<Composition, Failure> {
    let d = load_decl(decl)?;
    let store = load_diagrams(&d, diagrams)?;
    let e = expression(calc, expr)?;
    pipeline::compose(&d, &store, &e, prune).map_err(|e| fail(e.to_string()))
}

fn source(s: &Source) -> Result<Composition, Failure> {
    if let Some(path) = &s.composed {
        let text = files::read_file(path).map_err(|e| Failure::at(path, e))?;
        let doc = graphdoc::parse_graph_doc(&text).map_err(|e| Failure::at(path, e))?;
        return Composition::from_graph_doc(&doc).map_err(|e| Failure::at(path, e));
    }
    let decl = s
        .decl
        .as_deref()
        .ok_or_else(|| Failure::usage("give --composed or --decl with --diagrams"))?;
    compose_from(decl, &s.diagrams, s.calc.as_deref(), s.expr.as_deref(), s.prune_infeasible)
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::at(p, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| fail(e.to_string())),
    }
}

fn validate(paths: &[PathBuf], decl: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let decl = decl.map(load_decl).transpose()?;
    for p in paths {
        let name = p.to_string_lossy();
        let outcome: Result<String, FormatError> = if name.ends_with(".decl.json") {
            files::read_file(p)
                .and_then(|t| files::parse_declaration(&t))
                .map(|d| format!("declaration with {} features and {} categories", d.features().len(), d.dimension()))
        } else if name.ends_with(".forest.json") {
            files::read_file(p)
                .and_then(|t| files::import_forest(&t, decl.as_ref(), p.parent().unwrap_or(Path::new("."))))
                .map(|f| format!("forest with {} trees", f.trees().len()))
        } else if name.ends_with(".calc") {
            let e = expression(Some(p), None)?;
            Ok(format!("expression {e}"))
        } else {
            files::load_diagram(p, decl.as_ref()).map(|(d, _)| {
                format!(
                    "diagram `{}` with {} predicates and {} results",
                    d.name(),
                    d.predicate_node_count(),
                    d.result_node_count()
                )
            })
        };
        let summary = outcome.map_err(|e| Failure::at(p, e))?;
        let _ = writeln!(stdout, "{}: ok, {summary}", p.display());
    }
    Ok(())
}

fn demo_iris(dir: &Path, stdout: &mut dyn Write) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::at(dir, e))?;
    let decl = iris::declaration();
    let decl_ref = || Some(DeclarationRef::Path("iris.decl.json".into()));
    let mut outputs = vec![
        ("iris.decl.json".to_owned(), files::declaration_to_json(&decl)),
        ("iris.forest.json".to_owned(), files::forest_to_json(&iris::forest(), decl_ref())),
        ("iris.calc".to_owned(), format!("{}\n", iris::COMPOSITION)),
    ];
    for d in iris::diagrams() {
        outputs.push((format!("{}.dd.json", d.name()), files::diagram_to_json(&d, decl_ref())));
    }
    for (name, text) in outputs {
        let path = dir.join(&name);
        std::fs::write(&path, text).map_err(|e| Failure::at(&path, e))?;
        let _ = writeln!(stdout, "{}", path.display());
    }
    Ok(())
}

fn run_command(cmd: Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Validate { files, decl } => validate(&files, decl.as_deref(), stdout),
        Command::Compose { source: s, out } => {
            let c = compose_from(&s.decl, &s.diagrams, s.calc.as_deref(), s.expr.as_deref(), s.prune_infeasible)?;
            emit(out.as_deref(), &c.graph_doc(), stdout)
        }
        Command::Classify { source: s, input } => {
            let c = source(&s)?;
            let pairs = pipeline::parse_assignments(&input).map_err(|e| fail(format!("--input: {e}")))?;
            let r = c
                .classify(pairs.iter().map(|(k, v)| (k.as_str(), *v)))
                .map_err(|e| fail(e.to_string()))?;
            let mut text = format!("{}\n", r.category);
            for (name, w) in c.declaration.categories().iter().zip(r.weights.components()) {
                text.push_str(&format!("{name}\t{w}\n"));
            }
            emit(None, &text, stdout)
        }
        Command::Dot { source: s, out } => emit(out.as_deref(), &source(&s)?.dot(), stdout),
        Command::Codegen {
            source: s,
            target,
            function,
            main,
            out,
        } => {
            let target = Target::parse(&target).expect("clap restricts the values");
            let text = source(&s)?
                .codegen(target, &function, main)
                .map_err(|e| fail(e.to_string()))?;
            emit(out.as_deref(), &text, stdout)
        }
        Command::DemoIris { out } => demo_iris(&out, stdout),
        Command::Serve {
            port,
            workspace,
            static_dir,
        } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| fail(e.to_string()))?;
            rt.block_on(crate::service::serve(port, &workspace, static_dir.as_deref()))
                .map_err(|e| fail(e.to_string()))
        }
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run_command(cli.command, stdout) {
        Ok(()) => 0,
        Err(Failure { msg, code }) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}
