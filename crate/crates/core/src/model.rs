//! Feature spaces, literals, assignments and the tree classifiers they feed.
//!
//! Everything here is immutable once a [`Model`] has been validated, so a
//! model can be shared read-only between concurrent explanation sessions.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Largest admissible instance-space size, `prod |D_i|`.
pub const MAX_SPACE_SIZE: u128 = 1 << 62;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feature {
    pub name: String,
    pub domain: Vec<String>,
}

impl Feature {
    pub fn new(name: impl Into<String>, domain: &[&str]) -> Self {
        Feature {
            name: name.into(),
            domain: domain.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn value_index(&self, category: &str) -> Option<usize> {
        self.domain.iter().position(|c| c == category)
    }
}

/// Ordered categorical features with finite domains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpace {
    features: Vec<Feature>,
}

impl FeatureSpace {
    /// Builds a space; invariants are checked by [`validate`].
    pub fn new(features: Vec<Feature>) -> Self {
        FeatureSpace { features }
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn feature(&self, index: usize) -> &Feature {
        &self.features[index]
    }

    pub fn domain_size(&self, feature: usize) -> usize {
        self.features[feature].domain.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// Number of points in the instance space, if it fits in a `u128`.
    pub fn size(&self) -> Option<u128> {
        self.features
            .iter()
            .try_fold(1u128, |acc, f| acc.checked_mul(f.domain.len() as u128))
    }

    pub fn literal_name(&self, lit: Literal) -> String {
        let f = &self.features[lit.feature];
        format!("{}={}", f.name, f.domain[lit.value])
    }

    /// Renders literals as `{f=v, ...}` in feature-declaration order.
    pub fn format_literals(&self, literals: &[Literal]) -> String {
        let mut sorted = literals.to_vec();
        sorted.sort();
        let parts: Vec<String> = sorted.iter().map(|&l| self.literal_name(l)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// `feature = value`, both as indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub feature: usize,
    pub value: usize,
}

impl Literal {
    pub fn new(feature: usize, value: usize) -> Self {
        Literal { feature, value }
    }
}

/// A consistent set of literals: at most one value per feature.
///
/// Stored as one optional slot per feature, so consistency holds by
/// construction and unspecified features range over their whole domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialAssignment {
    slots: Vec<Option<usize>>,
}

impl PartialAssignment {
    /// The empty cube over `arity` features.
    pub fn empty(arity: usize) -> Self {
        PartialAssignment {
            slots: vec![None; arity],
        }
    }

    pub fn from_literals(arity: usize, literals: &[Literal]) -> Result<Self> {
        let mut pa = Self::empty(arity);
        for &lit in literals {
            pa.insert(lit)?;
        }
        Ok(pa)
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    pub fn get(&self, feature: usize) -> Option<usize> {
        self.slots[feature]
    }

    pub fn is_fixed(&self, feature: usize) -> bool {
        self.slots[feature].is_some()
    }

    /// Adds a literal; rejects one that conflicts with the value already fixed.
    pub fn insert(&mut self, lit: Literal) -> Result<()> {
        if lit.feature >= self.slots.len() {
            return Err(Error::Internal(format!(
                "literal feature {} out of range",
                lit.feature
            )));
        }
        match self.slots[lit.feature] {
            Some(v) if v != lit.value => Err(Error::Internal(format!(
                "inconsistent literal: feature {} already fixed to {}",
                lit.feature, v
            ))),
            _ => {
                self.slots[lit.feature] = Some(lit.value);
                Ok(())
            }
        }
    }

    pub fn set(&mut self, feature: usize, value: Option<usize>) {
        self.slots[feature] = value;
    }

    pub fn remove(&mut self, feature: usize) -> Option<usize> {
        self.slots[feature].take()
    }

    pub fn len(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.iter().all(Option::is_none)
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(f, v)| v.map(|v| Literal::new(f, v)))
    }

    pub fn features(&self) -> Vec<usize> {
        self.literals().map(|l| l.feature).collect()
    }

    pub fn is_subset_of(&self, other: &PartialAssignment) -> bool {
        self.slots
            .iter()
            .zip(&other.slots)
            .all(|(a, b)| a.is_none() || a == b)
    }

    pub fn slots(&self) -> &[Option<usize>] {
        &self.slots
    }
}

/// A full assignment: one value per feature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Instance {
    values: Vec<usize>,
}

impl Instance {
    pub fn new(values: Vec<usize>) -> Self {
        Instance { values }
    }

    pub fn check(&self, space: &FeatureSpace) -> Result<()> {
        if self.values.len() != space.len() {
            return Err(Error::InstanceArity {
                expected: space.len(),
                actual: self.values.len(),
            });
        }
        for (f, &v) in self.values.iter().enumerate() {
            if v >= space.domain_size(f) {
                return Err(Error::Internal(format!(
                    "value {v} out of range for feature {}",
                    space.feature(f).name
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, feature: usize) -> usize {
        self.values[feature]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn literal(&self, feature: usize) -> Literal {
        Literal::new(feature, self.values[feature])
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(f, &v)| Literal::new(f, v))
    }

    pub fn as_assignment(&self) -> PartialAssignment {
        PartialAssignment {
            slots: self.values.iter().map(|&v| Some(v)).collect(),
        }
    }

    /// Sub-assignment of this instance on the `keep` features.
    pub fn restrict(&self, keep: &[usize]) -> PartialAssignment {
        let mut pa = PartialAssignment::empty(self.values.len());
        for &f in keep {
            pa.slots[f] = Some(self.values[f]);
        }
        pa
    }

    /// Features on which `self` and `other` hold the same value.
    pub fn agreement(&self, other: &Instance) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&f| self.values[f] == other.values[f])
            .collect()
    }
}

/// Free-function form of [`Instance::restrict`].
pub fn restrict(instance: &Instance, keep: &[usize]) -> PartialAssignment {
    instance.restrict(keep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassLabel(pub usize);

impl ClassLabel {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node<L> {
    Internal {
        feature: usize,
        children: BTreeMap<usize, NodeId>,
    },
    Leaf(L),
}

/// A tree over categorical features whose leaves carry `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree<L> {
    pub nodes: Vec<Node<L>>,
    pub root: NodeId,
}

pub type DecisionTree = Tree<ClassLabel>;
pub type ScoreTree = Tree<i64>;

impl<L: Copy> Tree<L> {
    pub fn leaf(value: L) -> Self {
        Tree {
            nodes: vec![Node::Leaf(value)],
            root: 0,
        }
    }

    /// Leaf reached by a full assignment. Assumes a validated tree.
    pub fn eval(&self, values: &[usize]) -> L {
        let mut id = self.root;
        loop {
            match &self.nodes[id] {
                Node::Leaf(v) => return *v,
                Node::Internal { feature, children } => id = children[&values[*feature]],
            }
        }
    }
}

/// Per-class sums of integer-scored trees; the argmax wins, lowest index on ties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditiveEnsemble {
    /// `trees[k]` are the regressors contributing to class `k`.
    pub trees: Vec<Vec<ScoreTree>>,
    /// Fixed-point scale the integer scores were produced with.
    pub scale: i64,
}

impl AdditiveEnsemble {
    pub fn scores(&self, values: &[usize]) -> Vec<i64> {
        self.trees
            .iter()
            .map(|ts| ts.iter().map(|t| t.eval(values)).sum())
            .collect()
    }

    pub fn predict(&self, values: &[usize]) -> ClassLabel {
        let scores = self.scores(values);
        let mut best = 0;
        for (k, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = k;
            }
        }
        ClassLabel(best)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classifier {
    Tree(DecisionTree),
    Ensemble(AdditiveEnsemble),
}

impl Classifier {
    pub fn predict_values(&self, values: &[usize]) -> ClassLabel {
        match self {
            Classifier::Tree(t) => t.eval(values),
            Classifier::Ensemble(e) => e.predict(values),
        }
    }
}

/// A validated classifier with its feature space and class names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    space: FeatureSpace,
    classes: Vec<String>,
    classifier: Classifier,
}

impl Model {
    pub fn new(space: FeatureSpace, classes: Vec<String>, classifier: Classifier) -> Result<Self> {
        validate_model(&space, &classes, &classifier).map_err(Error::Validation)?;
        Ok(Model {
            space,
            classes,
            classifier,
        })
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_name(&self, class: ClassLabel) -> &str {
        &self.classes[class.0]
    }

    pub fn class_index(&self, name: &str) -> Option<ClassLabel> {
        self.classes.iter().position(|c| c == name).map(ClassLabel)
    }

    pub fn classifier(&self) -> &Classifier {
        &self.classifier
    }

    pub fn predict(&self, instance: &Instance) -> ClassLabel {
        self.classifier.predict_values(instance.values())
    }

    /// Every class except `class`.
    pub fn other_classes(&self, class: ClassLabel) -> Vec<ClassLabel> {
        (0..self.classes.len())
            .filter(|&k| k != class.0)
            .map(ClassLabel)
            .collect()
    }
}

/// One broken invariant, with its location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoFeatures,
    DuplicateFeature(String),
    EmptyDomain(String),
    DuplicateCategory {
        feature: String,
        category: String,
    },
    SpaceTooLarge,
    TooFewClasses(usize),
    DuplicateClass(String),
    EmptyTree {
        tree: String,
    },
    RootOutOfRange {
        tree: String,
        root: NodeId,
    },
    FeatureOutOfRange {
        tree: String,
        node: NodeId,
        feature: usize,
    },
    NonTotalChildren {
        tree: String,
        node: NodeId,
        feature: String,
        missing: Vec<String>,
    },
    ExtraChild {
        tree: String,
        node: NodeId,
        feature: String,
        value: usize,
    },
    ChildOutOfRange {
        tree: String,
        node: NodeId,
        child: NodeId,
    },
    DuplicateFeatureOnPath {
        tree: String,
        node: NodeId,
        feature: String,
    },
    Cycle {
        tree: String,
        node: NodeId,
    },
    Unreachable {
        tree: String,
        node: NodeId,
    },
    ClassOutOfRange {
        tree: String,
        node: NodeId,
        class: usize,
    },
    EnsembleClassCount {
        expected: usize,
        actual: usize,
    },
    NonPositiveScale(i64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoFeatures => write!(f, "feature space is empty"),
            DuplicateFeature(n) => write!(f, "duplicate feature name '{n}'"),
            EmptyDomain(n) => write!(f, "feature '{n}' has an empty domain"),
            DuplicateCategory { feature, category } => {
                write!(f, "feature '{feature}': duplicate category '{category}'")
            }
            SpaceTooLarge => write!(f, "instance space exceeds 2^62 points"),
            TooFewClasses(n) => write!(f, "need at least 2 classes, got {n}"),
            DuplicateClass(n) => write!(f, "duplicate class name '{n}'"),
            EmptyTree { tree } => write!(f, "{tree}: no nodes"),
            RootOutOfRange { tree, root } => write!(f, "{tree}: root {root} out of range"),
            FeatureOutOfRange {
                tree,
                node,
                feature,
            } => {
                write!(
                    f,
                    "{tree} node {node}: feature index {feature} out of range"
                )
            }
            NonTotalChildren {
                tree,
                node,
                feature,
                missing,
            } => write!(
                f,
                "{tree} node {node}: non-total children for feature '{feature}', missing {}",
                missing.join(", ")
            ),
            ExtraChild {
                tree,
                node,
                feature,
                value,
            } => write!(
                f,
                "{tree} node {node}: child for value {value} outside the domain of '{feature}'"
            ),
            ChildOutOfRange { tree, node, child } => {
                write!(f, "{tree} node {node}: child {child} out of range")
            }
            DuplicateFeatureOnPath {
                tree,
                node,
                feature,
            } => write!(
                f,
                "{tree} node {node}: duplicate feature '{feature}' on path"
            ),
            Cycle { tree, node } => write!(f, "{tree} node {node}: cycle"),
            Unreachable { tree, node } => write!(f, "{tree} node {node}: unreachable from root"),
            ClassOutOfRange { tree, node, class } => {
                write!(f, "{tree} node {node}: class index {class} out of range")
            }
            EnsembleClassCount { expected, actual } => write!(
                f,
                "ensemble has tree groups for {actual} classes, expected {expected}"
            ),
            NonPositiveScale(s) => write!(f, "ensemble scale must be positive, got {s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Checks a classifier against its feature space, collecting every violation.
pub fn validate(
    classifier: &Classifier,
    space: &FeatureSpace,
    num_classes: usize,
) -> Result<(), ValidationReport> {
    let mut out = Vec::new();
    check_space(space, &mut out);
    // Tree checks index into domains, so skip them if the space itself is broken.
    if out.is_empty() {
        match classifier {
            Classifier::Tree(t) => {
                check_tree(t, "tree", space, &mut out, |&ClassLabel(k), node, out| {
                    if k >= num_classes {
                        out.push(Violation::ClassOutOfRange {
                            tree: "tree".into(),
                            node,
                            class: k,
                        });
                    }
                })
            }
            Classifier::Ensemble(e) => {
                if e.trees.len() != num_classes {
                    out.push(Violation::EnsembleClassCount {
                        expected: num_classes,
                        actual: e.trees.len(),
                    });
                }
                if e.scale <= 0 {
                    out.push(Violation::NonPositiveScale(e.scale));
                }
                for (k, group) in e.trees.iter().enumerate() {
                    for (i, t) in group.iter().enumerate() {
                        let label = format!("class {k} tree {i}");
                        check_tree(t, &label, space, &mut out, |_, _, _| {});
                    }
                }
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(ValidationReport { violations: out })
    }
}

fn validate_model(
    space: &FeatureSpace,
    classes: &[String],
    classifier: &Classifier,
) -> Result<(), ValidationReport> {
    let mut pre = Vec::new();
    if classes.len() < 2 {
        pre.push(Violation::TooFewClasses(classes.len()));
    }
    for (i, c) in classes.iter().enumerate() {
        if classes[..i].contains(c) {
            pre.push(Violation::DuplicateClass(c.clone()));
        }
    }
    let rest = validate(classifier, space, classes.len());
    match rest {
        Ok(()) if pre.is_empty() => Ok(()),
        Ok(()) => Err(ValidationReport { violations: pre }),
        Err(mut r) => {
            pre.append(&mut r.violations);
            Err(ValidationReport { violations: pre })
        }
    }
}

fn check_space(space: &FeatureSpace, out: &mut Vec<Violation>) {
    if space.is_empty() {
        out.push(Violation::NoFeatures);
    }
    for (i, f) in space.features().iter().enumerate() {
        if space.features()[..i].iter().any(|g| g.name == f.name) {
            out.push(Violation::DuplicateFeature(f.name.clone()));
        }
        if f.domain.is_empty() {
            out.push(Violation::EmptyDomain(f.name.clone()));
        }
        for (j, c) in f.domain.iter().enumerate() {
            if f.domain[..j].contains(c) {
                out.push(Violation::DuplicateCategory {
                    feature: f.name.clone(),
                    category: c.clone(),
                });
            }
        }
    }
    match space.size() {
        Some(n) if n <= MAX_SPACE_SIZE => {}
        _ => out.push(Violation::SpaceTooLarge),
    }
}

fn check_tree<L>(
    tree: &Tree<L>,
    label: &str,
    space: &FeatureSpace,
    out: &mut Vec<Violation>,
    check_leaf: impl Fn(&L, NodeId, &mut Vec<Violation>),
) {
    let n = tree.nodes.len();
    if n == 0 {
        out.push(Violation::EmptyTree { tree: label.into() });
        return;
    }
    if tree.root >= n {
        out.push(Violation::RootOutOfRange {
            tree: label.into(),
            root: tree.root,
        });
        return;
    }

    // Local node checks.
    let mut structurally_ok = vec![true; n];
    for (id, node) in tree.nodes.iter().enumerate() {
        match node {
            Node::Leaf(l) => check_leaf(l, id, out),
            Node::Internal { feature, children } => {
                if *feature >= space.len() {
                    out.push(Violation::FeatureOutOfRange {
                        tree: label.into(),
                        node: id,
                        feature: *feature,
                    });
                    structurally_ok[id] = false;
                    continue;
                }
                let feat = space.feature(*feature);
                let missing: Vec<String> = (0..feat.domain.len())
                    .filter(|v| !children.contains_key(v))
                    .map(|v| feat.domain[v].clone())
                    .collect();
                if !missing.is_empty() {
                    out.push(Violation::NonTotalChildren {
                        tree: label.into(),
                        node: id,
                        feature: feat.name.clone(),
                        missing,
                    });
                }
                for (&v, &child) in children {
                    if v >= feat.domain.len() {
                        out.push(Violation::ExtraChild {
                            tree: label.into(),
                            node: id,
                            feature: feat.name.clone(),
                            value: v,
                        });
                    }
                    if child >= n {
                        out.push(Violation::ChildOutOfRange {
                            tree: label.into(),
                            node: id,
                            child,
                        });
                        structurally_ok[id] = false;
                    }
                }
            }
        }
    }

    // Path checks: cycles, repeated features, reachability.
    let mut reached = vec![false; n];
    let mut on_stack = vec![false; n];
    let mut path_features = vec![false; space.len()];
    let mut reported_cycle = false;
    walk(
        tree,
        tree.root,
        label,
        space,
        &structurally_ok,
        &mut reached,
        &mut on_stack,
        &mut path_features,
        &mut reported_cycle,
        out,
    );
    for (id, r) in reached.iter().enumerate() {
        if !r {
            out.push(Violation::Unreachable {
                tree: label.into(),
                node: id,
            });
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn walk<L>(
    tree: &Tree<L>,
    id: NodeId,
    label: &str,
    space: &FeatureSpace,
    ok: &[bool],
    reached: &mut [bool],
    on_stack: &mut [bool],
    path_features: &mut [bool],
    reported_cycle: &mut bool,
    out: &mut Vec<Violation>,
) {
    if on_stack[id] {
        if !*reported_cycle {
            out.push(Violation::Cycle {
                tree: label.into(),
                node: id,
            });
            *reported_cycle = true;
        }
        return;
    }
    reached[id] = true;
    if !ok[id] {
        return;
    }
    if let Node::Internal { feature, children } = &tree.nodes[id] {
        if path_features[*feature] {
            out.push(Violation::DuplicateFeatureOnPath {
                tree: label.into(),
                node: id,
                feature: space.feature(*feature).name.clone(),
            });
            return;
        }
        on_stack[id] = true;
        path_features[*feature] = true;
        for &child in children.values() {
            walk(
                tree,
                child,
                label,
                space,
                ok,
                reached,
                on_stack,
                path_features,
                reported_cycle,
                out,
            );
        }
        path_features[*feature] = false;
        on_stack[id] = false;
    }
}
