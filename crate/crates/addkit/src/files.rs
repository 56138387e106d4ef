//! JSON file formats.
//!
//! | file            | content                                              |
//! |-----------------|------------------------------------------------------|
//! | `*.decl.json`   | `{"features": [..], "categories": [..]}`             |
//! | `*.dd.json`     | `{"name", "declaration", "root", "nodes": {id: node}}` |
//! | `*.forest.json` | `{"declaration", "trees": [tree, ..]}`               |
//! | `*.calc`        | one composition expression                           |
//!
//! A diagram node is `{"kind": "predicate", "feature", "threshold", "true",
//! "false"}` or `{"kind": "result", "weights": {category: number}}`. A tree
//! is `{"feature", "threshold", "true": tree, "false": tree}` or
//! `{"leaf": category}`. `"declaration"` is a path relative to the file or
//! an inline declaration object.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::path::{Path, PathBuf};

use addkit_core::forest::{ForestError, ForestModel, TreeModel};
use addkit_core::{DeclarationModel, DiagramModel, ModelError, ModelNode};
use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{line}:{column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Malformed(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("no declaration given and none referenced by the file")]
    NoDeclaration,
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_owned(),
            None => message,
        };
        FormatError::Json {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

impl FormatError {
    /// Node id or position the error points at.
    pub fn location(&self) -> Option<String> {
        match self {
            FormatError::Json { line, column, .. } => Some(format!("{line}:{column}")),
            FormatError::Model(e) => e.location().map(str::to_owned),
            _ => None,
        }
    }
}

/// A JSON object read as key/value pairs in document order, keeping
/// repeated keys so they can be reported.
#[derive(Debug, Clone, PartialEq)]
pub struct Pairs<T>(pub Vec<(String, T)>);

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Pairs<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V<T>(PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for V<T> {
            type Value = Pairs<T>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry()? {
                    out.push((k, v));
                }
                Ok(Pairs(out))
            }
        }
        d.deserialize_map(V(PhantomData))
    }
}

impl<T: Serialize> Serialize for Pairs<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(k, v)| (k, v)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeclarationDoc {
    pub features: Vec<String>,
    pub categories: Vec<String>,
}

impl DeclarationDoc {
    pub fn from_model(d: &DeclarationModel) -> Self {
        DeclarationDoc {
            features: d.features().to_vec(),
            categories: d.categories().to_vec(),
        }
    }

    pub fn to_model(&self) -> Result<DeclarationModel, ModelError> {
        DeclarationModel::new(self.features.clone(), self.categories.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeclarationRef {
    Path(String),
    Inline(DeclarationDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NodeDoc {
    Predicate {
        feature: String,
        threshold: f64,
        #[serde(rename = "true", default, skip_serializing_if = "Option::is_none")]
        on_true: Option<String>,
        #[serde(rename = "false", default, skip_serializing_if = "Option::is_none")]
        on_false: Option<String>,
    },
    Result {
        #[serde(default = "empty_pairs")]
        weights: Pairs<f64>,
    },
}

fn empty_pairs() -> Pairs<f64> {
    Pairs(Vec::new())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declaration: Option<DeclarationRef>,
    pub root: String,
    pub nodes: Pairs<NodeDoc>,
}

impl DiagramDoc {
    pub fn from_model(m: &DiagramModel, declaration: Option<DeclarationRef>) -> Self {
        let nodes = m
            .nodes()
            .iter()
            .map(|(id, n)| {
                let doc = match n {
                    ModelNode::Predicate {
                        feature,
                        threshold,
                        on_true,
                        on_false,
                    } => NodeDoc::Predicate {
                        feature: feature.clone(),
                        threshold: *threshold,
                        on_true: Some(on_true.clone()),
                        on_false: Some(on_false.clone()),
                    },
                    ModelNode::Result { weights } => NodeDoc::Result {
                        weights: Pairs(weights.clone()),
                    },
                };
                (id.clone(), doc)
            })
            .collect();
        DiagramDoc {
            name: Some(m.name().to_owned()),
            declaration,
            root: m.root().to_owned(),
            nodes: Pairs(nodes),
        }
    }

    /// Validates the document against `decl`. `fallback_name` is used when
    /// the document has no `"name"`.
    pub fn to_model(&self, decl: &DeclarationModel, fallback_name: &str) -> Result<DiagramModel, ModelError> {
        let mut nodes = BTreeMap::new();
        for (id, doc) in &self.nodes.0 {
            let node = match doc {
                NodeDoc::Predicate {
                    feature,
                    threshold,
                    on_true,
                    on_false,
                } => {
                    let branch = |b: &Option<String>, which| {
                        b.clone().ok_or_else(|| ModelError::MissingBranch {
                            node: id.clone(),
                            branch: which,
                        })
                    };
                    ModelNode::Predicate {
                        feature: feature.clone(),
                        threshold: *threshold,
                        on_true: branch(on_true, "true")?,
                        on_false: branch(on_false, "false")?,
                    }
                }
                NodeDoc::Result { weights } => ModelNode::Result {
                    weights: weights.0.clone(),
                },
            };
            if nodes.insert(id.clone(), node).is_some() {
                return Err(ModelError::Duplicate {
                    kind: "node",
                    name: id.clone(),
                });
            }
        }
        let name = self.name.as_deref().unwrap_or(fallback_name);
        DiagramModel::new(name, &self.root, nodes, decl)
    }
}

pub fn parse_declaration(text: &str) -> Result<DeclarationModel, FormatError> {
    let doc: DeclarationDoc = serde_json::from_str(text)?;
    Ok(doc.to_model()?)
}

pub fn declaration_to_json(d: &DeclarationModel) -> String {
    pretty(&DeclarationDoc::from_model(d))
}

/// Parses a diagram document against `decl`.
pub fn parse_diagram(text: &str, decl: &DeclarationModel, fallback_name: &str) -> Result<DiagramModel, FormatError> {
    let doc: DiagramDoc = serde_json::from_str(text)?;
    Ok(doc.to_model(decl, fallback_name)?)
}

pub fn diagram_to_json(m: &DiagramModel, declaration: Option<DeclarationRef>) -> String {
    pretty(&DiagramDoc::from_model(m, declaration))
}

fn tree_from_value(v: &Value, decl: &DeclarationModel, tree: usize, path: &str) -> Result<TreeModel, FormatError> {
    let obj = v
        .as_object()
        .ok_or_else(|| FormatError::Malformed(format!("tree {tree} at {path}: expected an object")))?;
    if let Some(leaf) = obj.get("leaf") {
        let name = leaf
            .as_str()
            .ok_or_else(|| FormatError::Malformed(format!("tree {tree} at {path}: `leaf` must be a string")))?;
        let category = decl
            .category_index(name)
            .ok_or_else(|| ModelError::UnresolvedCategory {
                node: format!("tree {tree} at {path}"),
                category: name.to_owned(),
            })?;
        return Ok(TreeModel::leaf(category));
    }
    let field = |k: &str| {
        obj.get(k)
            .ok_or_else(|| FormatError::Malformed(format!("tree {tree} at {path}: missing `{k}`")))
    };
    let fname = field("feature")?
        .as_str()
        .ok_or_else(|| FormatError::Malformed(format!("tree {tree} at {path}: `feature` must be a string")))?;
    let feature = decl
        .feature_index(fname)
        .ok_or_else(|| ModelError::UnresolvedFeature {
            node: format!("tree {tree} at {path}"),
            feature: fname.to_owned(),
        })?;
    let threshold = field("threshold")?
        .as_f64()
        .ok_or_else(|| FormatError::Malformed(format!("tree {tree} at {path}: `threshold` must be a number")))?;
    let t = tree_from_value(field("true")?, decl, tree, &format!("{path}/true"))?;
    let f = tree_from_value(field("false")?, decl, tree, &format!("{path}/false"))?;
    Ok(TreeModel::split(feature, threshold, t, f))
}

#[derive(Deserialize)]
struct ForestDoc {
    #[serde(default)]
    declaration: Option<DeclarationRef>,
    trees: Vec<Value>,
}

/// Reads a forest document. `decl` is used when given; otherwise the
/// document's own declaration is resolved relative to `base`.
pub fn import_forest(text: &str, decl: Option<&DeclarationModel>, base: &Path) -> Result<ForestModel, FormatError> {
    let doc: ForestDoc = serde_json::from_str(text)?;
    let decl = match decl {
        Some(d) => d.clone(),
        None => resolve_declaration(doc.declaration.as_ref(), base)?,
    };
    let trees = doc
        .trees
        .iter()
        .enumerate()
        .map(|(i, v)| tree_from_value(v, &decl, i + 1, "/"))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ForestModel::new(decl, trees)?)
}

fn tree_to_value(t: &TreeModel, decl: &DeclarationModel) -> Value {
    match t {
        TreeModel::Leaf { category } => serde_json::json!({ "leaf": decl.categories()[*category] }),
        TreeModel::Split {
            feature,
            threshold,
            on_true,
            on_false,
        } => serde_json::json!({
            "feature": decl.features()[*feature],
            "threshold": threshold,
            "true": tree_to_value(on_true, decl),
            "false": tree_to_value(on_false, decl),
        }),
    }
}

pub fn forest_to_json(f: &ForestModel, declaration: Option<DeclarationRef>) -> String {
    let mut obj = serde_json::Map::new();
    if let Some(d) = declaration {
        obj.insert("declaration".into(), serde_json::to_value(d).expect("plain data"));
    }
    let trees = f.trees().iter().map(|t| tree_to_value(t, f.declaration())).collect();
    obj.insert("trees".into(), Value::Array(trees));
    pretty(&obj)
}

pub fn read_file(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Loads the declaration a document refers to.
pub fn resolve_declaration(r: Option<&DeclarationRef>, base: &Path) -> Result<DeclarationModel, FormatError> {
    match r {
        Some(DeclarationRef::Inline(doc)) => Ok(doc.to_model()?),
        Some(DeclarationRef::Path(p)) => parse_declaration(&read_file(&base.join(p))?),
        None => Err(FormatError::NoDeclaration),
    }
}

/// File name without the `.dd.json` / `.json` suffix.
pub fn stem(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    for suffix in [".dd.json", ".decl.json", ".forest.json", ".json", ".calc"] {
        if let Some(s) = name.strip_suffix(suffix) {
            return s.to_owned();
        }
    }
    name.to_owned()
}

/// Reads a diagram file, against `decl` if given or else the declaration
/// the file references.
pub fn load_diagram(path: &Path, decl: Option<&DeclarationModel>) -> Result<(DiagramModel, DeclarationModel), FormatError> {
    let text = read_file(path)?;
    let doc: DiagramDoc = serde_json::from_str(&text)?;
    let decl = match decl {
        Some(d) => d.clone(),
        None => resolve_declaration(doc.declaration.as_ref(), path.parent().unwrap_or(Path::new(".")))?,
    };
    let model = doc.to_model(&decl, &stem(path))?;
    Ok((model, decl))
}

pub(crate) fn pretty<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}
