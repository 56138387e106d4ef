#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::{Arc, RwLock};

use addkit::service::{router, Store};
use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use tower::ServiceExt;

pub mod differential;
pub mod dot;

/// Runs the CLI in-process and returns (status, stdout, stderr).
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = addkit::cli::run(std::iter::once("addkit").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// A temporary workspace populated by `demo-iris`.
pub struct IrisWorkspace {
    pub dir: tempfile::TempDir,
}

impl IrisWorkspace {
    pub fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let (code, _, err) = cli(&["demo-iris", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        IrisWorkspace { dir }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn arg(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_owned()
    }

    pub fn diagram_args(&self) -> Vec<String> {
        ["T1", "T2", "T3", "Expert"]
            .iter()
            .map(|n| self.arg(&format!("{n}.dd.json")))
            .collect()
    }

    /// `--decl D --diagrams ... --expr E` followed by `extra`.
    pub fn compose_args(&self, cmd: &str, expr: &str, extra: &[&str]) -> Vec<String> {
        let mut a = vec![cmd.to_owned(), "--decl".into(), self.arg("iris.decl.json"), "--diagrams".into()];
        a.extend(self.diagram_args());
        a.push("--expr".into());
        a.push(expr.into());
        a.extend(extra.iter().map(|s| s.to_string()));
        a
    }

    pub fn app(&self) -> axum::Router {
        router(Arc::new(RwLock::new(Store::load(self.dir.path()).unwrap())))
    }
}

pub fn run_cli(args: &[String]) -> (i32, String, String) {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    cli(&refs)
}

pub fn runtime() -> tokio::runtime::Runtime {
    tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap()
}

/// Sends one request to `app`; returns status and body text.
pub async fn request(app: &axum::Router, method: &str, uri: &str, body: Option<&str>) -> (StatusCode, String) {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req.body(Body::from(body.unwrap_or("").to_owned())).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

pub fn encode_query(s: &str) -> String {
    let mut out = String::new();
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || b"-_.~".contains(&b) {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

pub fn tool_available(name: &str) -> bool {
    Command::new(name)
        .arg("--version")
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .is_ok_and(|s| s.success())
}

/// Runs `program args` with `input` on stdin and returns stdout.
pub fn run_with_input(program: &Path, args: &[&str], input: &str) -> String {
    use std::io::Write;
    let mut child = Command::new(program)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap_or_else(|e| panic!("cannot run {}: {e}", program.display()));
    let mut stdin = child.stdin.take().unwrap();
    let input = input.to_owned();
    let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
    let out = child.wait_with_output().unwrap();
    writer.join().unwrap().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Compiles C source with the system compiler; returns the executable path.
pub fn compile_c(dir: &Path, name: &str, source: &str) -> PathBuf {
    let src = dir.join(format!("{name}.c"));
    let exe = dir.join(name);
    std::fs::write(&src, source).unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-O1", "-Wall", "-Werror", "-Wno-unused-label", "-o"])
        .arg(&exe)
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "cc failed:\n{}", String::from_utf8_lossy(&out.stderr));
    exe
}

/// Space separated feature vectors, one per line, exact round-trip text.
pub fn input_text(inputs: &[Vec<f64>]) -> String {
    let mut s = String::new();
    for x in inputs {
        let line: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

/// Seeded inputs concentrated around the thresholds `diagrams` test.
pub fn inputs_for(
    decl: &addkit_core::DeclarationModel,
    diagrams: &[addkit_core::DiagramModel],
    seed: u64,
    n: usize,
) -> Vec<Vec<f64>> {
    let predicates: Vec<_> = diagrams.iter().flat_map(|d| d.predicates(decl)).collect();
    let mut rng = addkit_core::testgen::rng(seed);
    (0..n)
        .map(|_| addkit_core::testgen::random_input_around(&mut rng, decl.features().len(), &predicates))
        .collect()
}
