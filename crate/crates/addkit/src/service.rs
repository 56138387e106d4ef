//! HTTP API over a workspace directory.
//!
//! The workspace holds one `*.decl.json` and any number of `*.dd.json`
//! files. They are loaded at startup; `PUT /api/diagrams/{name}` validates
//! the new diagram, writes it back as `{name}.dd.json` and only then
//! replaces the stored copy.
//!
//! | method | path                       | body / query                 |
//! |--------|----------------------------|------------------------------|
//! | GET    | `/api/declaration`         |                              |
//! | GET    | `/api/diagrams`            |                              |
//! | GET    | `/api/diagrams/{name}`     |                              |
//! | PUT    | `/api/diagrams/{name}`     | diagram document             |
//! | POST   | `/api/compose`             | `{expression, prune?}`       |
//! | GET    | `/api/graph`               | `?expression=`               |
//! | POST   | `/api/classify`            | `{expression, features}`     |
//! | GET    | `/api/dot`                 | `?expression=`               |
//! | POST   | `/api/codegen`             | `{expression, target, function?}` |
//!
//! Failures answer `{"error": message, "location": ...}` with status 400,
//! or 404 when the expression names a diagram that does not exist.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use addkit_core::emit::Target;
use addkit_core::{parse_calc, CalcError, CalcExpression, DeclarationModel, DiagramModel};
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::files::{self, DeclarationRef, DiagramDoc, FormatError};
use crate::pipeline::{self, Composition, PipelineError};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("workspace `{0}` has no *.decl.json file")]
    NoDeclaration(PathBuf),
    #[error("workspace `{0}` has more than one *.decl.json file")]
    AmbiguousDeclaration(PathBuf),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: FormatError },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Declaration and diagrams of a workspace.
pub struct Store {
    workspace: PathBuf,
    decl_file: String,
    declaration: DeclarationModel,
    diagrams: BTreeMap<String, DiagramModel>,
}

impl Store {
    pub fn load(workspace: &Path) -> Result<Store, StoreError> {
        let mut entries: Vec<PathBuf> = std::fs::read_dir(workspace)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        entries.sort();
        let named = |suffix: &str| -> Vec<&PathBuf> {
            entries
                .iter()
                .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(suffix)))
                .collect()
        };
        let decls = named(".decl.json");
        let decl_path = match decls.as_slice() {
            [] => return Err(StoreError::NoDeclaration(workspace.to_owned())),
            [one] => (*one).clone(),
            _ => return Err(StoreError::AmbiguousDeclaration(workspace.to_owned())),
        };
        let file_err = |path: &Path| {
            let path = path.to_owned();
            move |source| StoreError::File { path, source }
        };
        let declaration = files::read_file(&decl_path)
            .and_then(|t| files::parse_declaration(&t))
            .map_err(file_err(&decl_path))?;
        let mut diagrams = BTreeMap::new();
        for p in named(".dd.json") {
            let (d, _) = files::load_diagram(p, Some(&declaration)).map_err(file_err(p))?;
            diagrams.insert(d.name().to_owned(), d);
        }
        Ok(Store {
            workspace: workspace.to_owned(),
            decl_file: decl_path
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or_default()
                .to_owned(),
            declaration,
            diagrams,
        })
    }

    pub fn declaration(&self) -> &DeclarationModel {
        &self.declaration
    }

    pub fn diagrams(&self) -> &BTreeMap<String, DiagramModel> {
        &self.diagrams
    }

    fn document(&self, d: &DiagramModel) -> String {
        files::diagram_to_json(d, Some(DeclarationRef::Path(self.decl_file.clone())))
    }
}

pub type Shared = Arc<RwLock<Store>>;

struct ApiError {
    status: StatusCode,
    message: String,
    location: Option<Value>,
}

impl ApiError {
    fn bad(message: impl ToString) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.to_string(),
            location: None,
        }
    }

    fn at(mut self, location: Option<Value>) -> Self {
        self.location = location;
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = Map::new();
        body.insert("error".into(), Value::String(self.message));
        if let Some(l) = self.location {
            body.insert("location".into(), l);
        }
        (self.status, Json(Value::Object(body))).into_response()
    }
}

impl From<CalcError> for ApiError {
    fn from(e: CalcError) -> Self {
        let status = match e {
            CalcError::UnknownDiagram(_) => StatusCode::NOT_FOUND,
            _ => StatusCode::BAD_REQUEST,
        };
        let location = e.position().map(|p| json!({ "position": p }));
        ApiError {
            status,
            message: e.to_string(),
            location,
        }
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Calc(c) => c.into(),
            PipelineError::Model(m) => {
                let location = m.location().map(|n| json!({ "node": n }));
                ApiError::bad(m).at(location)
            }
            other => ApiError::bad(other),
        }
    }
}

impl From<FormatError> for ApiError {
    fn from(e: FormatError) -> Self {
        let location = match &e {
            FormatError::Json { line, column, .. } => Some(json!({ "line": line, "column": column })),
            FormatError::Model(m) => m.location().map(|n| json!({ "node": n })),
            _ => None,
        };
        ApiError::bad(e).at(location)
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn json_text(text: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], text).into_response()
}

fn read(state: &Shared) -> std::sync::RwLockReadGuard<'_, Store> {
    state.read().unwrap_or_else(|p| p.into_inner())
}

/// Parses `expression` and composes it over a snapshot of the store.
fn compose(state: &Shared, expression: &str, prune: bool) -> ApiResult<Composition> {
    let expr: CalcExpression = parse_calc(expression)?;
    let (decl, diagrams) = {
        let store = read(state);
        let mut picked = BTreeMap::new();
        for name in expr.references() {
            let d = store
                .diagrams
                .get(name)
                .ok_or_else(|| CalcError::UnknownDiagram(name.to_owned()))?;
            picked.insert(name.to_owned(), d.clone());
        }
        (store.declaration.clone(), picked)
    };
    Ok(pipeline::compose(&decl, &diagrams, &expr, prune)?)
}

async fn get_declaration(State(s): State<Shared>) -> Response {
    json_text(files::declaration_to_json(read(&s).declaration()))
}

async fn list_diagrams(State(s): State<Shared>) -> Json<Vec<String>> {
    Json(read(&s).diagrams.keys().cloned().collect())
}

async fn get_diagram(State(s): State<Shared>, UrlPath(name): UrlPath<String>) -> ApiResult<Response> {
    let store = read(&s);
    let d = store.diagrams.get(&name).ok_or_else(|| ApiError {
        status: StatusCode::NOT_FOUND,
        message: format!("unknown diagram `{name}`"),
        location: None,
    })?;
    Ok(json_text(store.document(d)))
}

async fn put_diagram(State(s): State<Shared>, UrlPath(name): UrlPath<String>, body: String) -> ApiResult<Response> {
    let doc: DiagramDoc = serde_json::from_str(&body).map_err(FormatError::from)?;
    if let Some(n) = &doc.name {
        if *n != name {
            return Err(ApiError::bad(format!("document name `{n}` does not match `{name}`")));
        }
    }
    let mut store = s.write().unwrap_or_else(|p| p.into_inner());
    let model = doc.to_model(&store.declaration, &name).map_err(FormatError::from)?;
    let mut scratch = store.declaration.manager();
    addkit_core::model::compile_diagram(&mut scratch, &store.declaration, &model)
        .map_err(|e| ApiError::from(PipelineError::from(e)))?;
    let text = store.document(&model);
    let path = store.workspace.join(format!("{name}.dd.json"));
    let tmp = store.workspace.join(format!(".{name}.dd.json.tmp"));
    std::fs::write(&tmp, &text)
        .and_then(|()| std::fs::rename(&tmp, &path))
        .map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            message: format!("cannot write {}: {e}", path.display()),
            location: None,
        })?;
    store.diagrams.insert(name, model);
    Ok(json_text(text))
}

#[derive(Deserialize)]
struct ComposeRequest {
    expression: String,
    #[serde(default)]
    prune: bool,
}

async fn post_compose(State(s): State<Shared>, Json(req): Json<ComposeRequest>) -> ApiResult<Json<Value>> {
    let c = compose(&s, &req.expression, req.prune)?;
    let graph: Value = serde_json::from_str(&c.graph_doc()).expect("graph documents are JSON");
    Ok(Json(json!({
        "graph": graph,
        "inner": c.inner_count(),
        "terminal": c.terminal_count(),
    })))
}

#[derive(Deserialize)]
struct ExpressionQuery {
    expression: String,
    #[serde(default)]
    prune: bool,
}

async fn get_graph(State(s): State<Shared>, Query(q): Query<ExpressionQuery>) -> ApiResult<Response> {
    Ok(json_text(compose(&s, &q.expression, q.prune)?.graph_doc()))
}

async fn get_dot(State(s): State<Shared>, Query(q): Query<ExpressionQuery>) -> ApiResult<Response> {
    let dot = compose(&s, &q.expression, q.prune)?.dot();
    Ok(([(header::CONTENT_TYPE, "text/vnd.graphviz; charset=utf-8")], dot).into_response())
}

#[derive(Deserialize)]
struct ClassifyRequest {
    expression: String,
    features: Map<String, Value>,
}

async fn post_classify(State(s): State<Shared>, Json(req): Json<ClassifyRequest>) -> ApiResult<Json<Value>> {
    let c = compose(&s, &req.expression, false)?;
    let mut pairs = Vec::with_capacity(req.features.len());
    for (k, v) in &req.features {
        let x = v
            .as_f64()
            .ok_or_else(|| ApiError::bad(format!("value of feature `{k}` must be a number")))?;
        pairs.push((k.as_str(), x));
    }
    let r = c.classify(pairs)?;
    let weights: Map<String, Value> = c
        .declaration
        .categories()
        .iter()
        .zip(r.weights.components())
        .map(|(k, w)| (k.clone(), json!(w)))
        .collect();
    Ok(Json(json!({ "category": r.category, "weights": weights })))
}

#[derive(Deserialize)]
struct CodegenRequest {
    expression: String,
    target: String,
    #[serde(default = "default_function")]
    function: String,
}

fn default_function() -> String {
    "evaluate".into()
}

async fn post_codegen(State(s): State<Shared>, Json(req): Json<CodegenRequest>) -> ApiResult<Response> {
    let target = Target::parse(&req.target)
        .ok_or_else(|| ApiError::bad(format!("unknown target `{}`, expected `c` or `js`", req.target)))?;
    let src = compose(&s, &req.expression, false)?.codegen(target, &req.function, false)?;
    let mime = match target {
        Target::C => "text/x-c; charset=utf-8",
        Target::Js => "text/javascript; charset=utf-8",
    };
    Ok(([(header::CONTENT_TYPE, mime)], src).into_response())
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/api/declaration", get(get_declaration))
        .route("/api/diagrams", get(list_diagrams))
        .route("/api/diagrams/{name}", get(get_diagram).put(put_diagram))
        .route("/api/compose", post(post_compose))
        .route("/api/graph", get(get_graph))
        .route("/api/classify", post(post_classify))
        .route("/api/dot", get(get_dot))
        .route("/api/codegen", post(post_codegen))
        .with_state(state)
}

/// Loads `workspace` and serves until the process is stopped.
pub async fn serve(port: u16, workspace: &Path, static_dir: Option<&Path>) -> Result<(), StoreError> {
    let store = Store::load(workspace)?;
    let mut app = router(Arc::new(RwLock::new(store)));
    if let Some(dir) = static_dir {
        app = app.fallback_service(tower_http::services::ServeDir::new(dir));
    }
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app).await?;
    Ok(())
}
