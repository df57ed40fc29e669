//! Model files (JSON) and instance files (CSV).
//!
//! Model schema, version 1:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "kind": "tree",
//!   "features": [{"name": "L", "domain": ["long", "short"]}],
//!   "classes": ["reads", "skips"],
//!   "root": 0,
//!   "nodes": [
//!     {"feature": "L", "children": {"long": 1, "short": 2}},
//!     {"class": "skips"},
//!     {"class": "reads"}
//!   ]
//! }
//! ```
//!
//! Ensembles use `"kind": "ensemble"`, an integer `scale`, and a `trees`
//! list whose entries carry `class`, `root` and `nodes`; their leaves hold an
//! integer `score` instead of a `class`.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    AdditiveEnsemble, ClassLabel, Classifier, Feature, FeatureSpace, Instance, Model, Node, Tree,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Tree,
    Ensemble,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    format_version: u32,
    kind: Kind,
    features: Vec<RawFeature>,
    classes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nodes: Option<Vec<RawNode>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trees: Option<Vec<RawScoreTree>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFeature {
    name: String,
    domain: Vec<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    feature: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    children: Option<IndexMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    score: Option<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScoreTree {
    class: String,
    root: usize,
    nodes: Vec<RawNode>,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<Model> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawModel = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        match inner.classify() {
            serde_json::error::Category::Data => schema(path, format!("{inner}")),
            _ => Error::Syntax {
                line: inner.line(),
                column: inner.column(),
                message: strip_position(&inner.to_string()),
            },
        }
    })?;
    if raw.format_version != FORMAT_VERSION {
        return Err(schema(
            "format_version",
            format!(
                "unsupported version {}, expected {FORMAT_VERSION}",
                raw.format_version
            ),
        ));
    }
    let space = FeatureSpace::new(
        raw.features
            .into_iter()
            .map(|f| Feature {
                name: f.name,
                domain: f.domain,
            })
            .collect(),
    );
    let classes = raw.classes;
    let class_of = |name: &str, path: &str| -> Result<ClassLabel> {
        classes
            .iter()
            .position(|c| c == name)
            .map(ClassLabel)
            .ok_or_else(|| schema(path, format!("unknown class '{name}'")))
    };
    let classifier = match raw.kind {
        Kind::Tree => {
            for (field, present) in [
                ("scale", raw.scale.is_some()),
                ("trees", raw.trees.is_some()),
            ] {
                if present {
                    return Err(schema(field, "not allowed for kind 'tree'"));
                }
            }
            let root = raw.root.ok_or_else(|| schema("root", "missing field"))?;
            let nodes = raw.nodes.ok_or_else(|| schema("nodes", "missing field"))?;
            let tree = convert_tree(&space, root, nodes, "nodes", |node, path| {
                if node.score.is_some() {
                    return Err(schema(
                        format!("{path}.score"),
                        "scores are only allowed in ensembles",
                    ));
                }
                let name = node
                    .class
                    .as_deref()
                    .ok_or_else(|| schema(path, "leaf needs a `class`"))?;
                class_of(name, &format!("{path}.class"))
            })?;
            Classifier::Tree(tree)
        }
        Kind::Ensemble => {
            for (field, present) in [("root", raw.root.is_some()), ("nodes", raw.nodes.is_some())] {
                if present {
                    return Err(schema(field, "not allowed for kind 'ensemble'"));
                }
            }
            let scale = raw.scale.ok_or_else(|| schema("scale", "missing field"))?;
            let raw_trees = raw.trees.ok_or_else(|| schema("trees", "missing field"))?;
            let mut trees = vec![Vec::new(); classes.len()];
            for (i, rt) in raw_trees.into_iter().enumerate() {
                let base = format!("trees[{i}]");
                let k = class_of(&rt.class, &format!("{base}.class"))?;
                let tree = convert_tree(
                    &space,
                    rt.root,
                    rt.nodes,
                    &format!("{base}.nodes"),
                    |node, path| {
                        if node.class.is_some() {
                            return Err(schema(
                                format!("{path}.class"),
                                "ensemble leaves hold a `score`",
                            ));
                        }
                        node.score
                            .ok_or_else(|| schema(path, "leaf needs an integer `score`"))
                    },
                )?;
                trees[k.0].push(tree);
            }
            Classifier::Ensemble(AdditiveEnsemble { trees, scale })
        }
    };
    Model::new(space, classes, classifier)
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn convert_tree<L>(
    space: &FeatureSpace,
    root: usize,
    nodes: Vec<RawNode>,
    base: &str,
    leaf: impl Fn(&RawNode, &str) -> Result<L>,
) -> Result<Tree<L>> {
    let mut out = Vec::with_capacity(nodes.len());
    for (i, node) in nodes.into_iter().enumerate() {
        let path = format!("{base}[{i}]");
        match (&node.feature, &node.children) {
            (Some(name), Some(children)) => {
                if node.class.is_some() || node.score.is_some() {
                    return Err(schema(path, "internal node cannot carry a leaf value"));
                }
                let f = space.index_of(name).ok_or_else(|| {
                    schema(
                        format!("{path}.feature"),
                        format!("unknown feature '{name}'"),
                    )
                })?;
                let feat = space.feature(f);
                let mut map = std::collections::BTreeMap::new();
                for (cat, &child) in children {
                    let v = feat.value_index(cat).ok_or_else(|| {
                        schema(
                            format!("{path}.children"),
                            format!("unknown category '{cat}' for feature '{name}'"),
                        )
                    })?;
                    map.insert(v, child);
                }
                out.push(Node::Internal {
                    feature: f,
                    children: map,
                });
            }
            (None, None) => out.push(Node::Leaf(leaf(&node, &path)?)),
            _ => {
                return Err(schema(
                    path,
                    "internal nodes need both `feature` and `children`",
                ))
            }
        }
    }
    Ok(Tree { nodes: out, root })
}

fn raw_tree<L>(space: &FeatureSpace, tree: &Tree<L>, leaf: impl Fn(&L) -> RawNode) -> Vec<RawNode> {
    tree.nodes
        .iter()
        .map(|n| match n {
            Node::Internal { feature, children } => {
                let feat = space.feature(*feature);
                RawNode {
                    feature: Some(feat.name.clone()),
                    children: Some(
                        children
                            .iter()
                            .map(|(&v, &c)| (feat.domain[v].clone(), c))
                            .collect(),
                    ),
                    ..RawNode::default()
                }
            }
            Node::Leaf(l) => leaf(l),
        })
        .collect()
}

/// Canonical JSON form of a model (pretty-printed, trailing newline).
pub fn serialize_model(model: &Model) -> String {
    let space = model.space();
    let features = space
        .features()
        .iter()
        .map(|f| RawFeature {
            name: f.name.clone(),
            domain: f.domain.clone(),
        })
        .collect();
    let mut raw = RawModel {
        format_version: FORMAT_VERSION,
        kind: Kind::Tree,
        features,
        classes: model.classes().to_vec(),
        root: None,
        nodes: None,
        scale: None,
        trees: None,
    };
    match model.classifier() {
        Classifier::Tree(t) => {
            raw.root = Some(t.root);
            raw.nodes = Some(raw_tree(space, t, |k| RawNode {
                class: Some(model.class_name(*k).to_string()),
                ..RawNode::default()
            }));
        }
        Classifier::Ensemble(e) => {
            raw.kind = Kind::Ensemble;
            raw.scale = Some(e.scale);
            let mut trees = Vec::new();
            for (k, group) in e.trees.iter().enumerate() {
                for t in group {
                    trees.push(RawScoreTree {
                        class: model.classes()[k].clone(),
                        root: t.root,
                        nodes: raw_tree(space, t, |s| RawNode {
                            score: Some(*s),
                            ..RawNode::default()
                        }),
                    });
                }
            }
            raw.trees = Some(trees);
        }
    }
    let mut text = serde_json::to_string_pretty(&raw).expect("model serialises");
    text.push('\n');
    text
}

/// A parsed instance and its 1-based data row number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceRow {
    pub row: usize,
    pub instance: Instance,
}

/// Parses a CSV whose header names every feature (in any order).
pub fn parse_instances(text: &str, space: &FeatureSpace) -> Result<Vec<InstanceRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::InstanceHeader(e.to_string()))?
        .clone();
    if header.iter().all(str::is_empty) {
        if text.trim().is_empty() {
            return Ok(Vec::new());
        }
        return Err(Error::InstanceHeader("empty header row".into()));
    }
    let mut column_feature = Vec::with_capacity(header.len());
    let mut seen = vec![false; space.len()];
    for name in header.iter() {
        let f = space
            .index_of(name)
            .ok_or_else(|| Error::InstanceHeader(format!("unknown feature '{name}'")))?;
        if seen[f] {
            return Err(Error::InstanceHeader(format!(
                "feature '{name}' appears twice"
            )));
        }
        seen[f] = true;
        column_feature.push(f);
    }
    if let Some(f) = seen.iter().position(|s| !s) {
        return Err(Error::InstanceHeader(format!(
            "missing column for feature '{}'",
            space.feature(f).name
        )));
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::InstanceCell {
            row,
            column: "-".into(),
            message: e.to_string(),
        })?;
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        let mut values = vec![0; space.len()];
        for (col, &f) in column_feature.iter().enumerate() {
            let feat = space.feature(f);
            let cell = record.get(col).unwrap_or("");
            if cell.is_empty() {
                return Err(Error::InstanceCell {
                    row,
                    column: feat.name.clone(),
                    message: "missing cell".into(),
                });
            }
            values[f] = feat.value_index(cell).ok_or_else(|| Error::InstanceCell {
                row,
                column: feat.name.clone(),
                message: format!("unknown category '{cell}'"),
            })?;
        }
        if record.len() > column_feature.len() {
            return Err(Error::InstanceCell {
                row,
                column: "-".into(),
                message: format!(
                    "{} cells, header has {}",
                    record.len(),
                    column_feature.len()
                ),
            });
        }
        rows.push(InstanceRow {
            row,
            instance: Instance::new(values),
        });
    }
    Ok(rows)
}

/// Writes instances with a header in feature-declaration order.
pub fn write_instances(space: &FeatureSpace, instances: &[Instance]) -> String {
    let mut out = String::new();
    let names: Vec<&str> = space.features().iter().map(|f| f.name.as_str()).collect();
    out.push_str(&names.join(","));
    out.push('\n');
    for x in instances {
        let cells: Vec<&str> = x
            .values()
            .iter()
            .enumerate()
            .map(|(f, &v)| space.feature(f).domain[v].as_str())
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses a comma-separated list of feature names into indices.
pub fn parse_order(space: &FeatureSpace, spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| {
            space
                .index_of(name)
                .ok_or_else(|| Error::InvalidOrder(format!("unknown feature '{name}'")))
        })
        .collect()
}

/// Parses a comma-separated list of class names.
pub fn parse_classes(model: &Model, spec: &str) -> Result<Vec<ClassLabel>> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| {
            model
                .class_index(name)
                .ok_or_else(|| Error::InvalidTarget(format!("unknown class '{name}'")))
        })
        .collect()
}
