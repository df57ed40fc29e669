//! Small hand-built models used by the tests, the docs and the CLI examples.

use crate::model::{
    ClassLabel, Classifier, DecisionTree, Feature, FeatureSpace, Instance, Model, Node, Tree,
};

fn node(feature: usize, kids: &[(usize, usize)]) -> Node<ClassLabel> {
    Node::Internal {
        feature,
        children: kids.iter().copied().collect(),
    }
}

/// The book-recommendation tree: `skips` iff `L=long`, or `L=short`,
/// `T=followUp` and `A=unknown`. `W` is never tested.
pub fn poole() -> Model {
    let space = FeatureSpace::new(vec![
        Feature::new("A", &["known", "unknown"]),
        Feature::new("T", &["new", "followUp"]),
        Feature::new("L", &["long", "short"]),
        Feature::new("W", &["home", "work"]),
    ]);
    let (reads, skips) = (ClassLabel(0), ClassLabel(1));
    let tree: DecisionTree = Tree {
        nodes: vec![
            node(2, &[(0, 1), (1, 2)]),
            Node::Leaf(skips),
            node(1, &[(0, 3), (1, 4)]),
            Node::Leaf(reads),
            node(0, &[(0, 5), (1, 6)]),
            Node::Leaf(reads),
            Node::Leaf(skips),
        ],
        root: 0,
    };
    Model::new(
        space,
        vec!["reads".into(), "skips".into()],
        Classifier::Tree(tree),
    )
    .expect("poole fixture is valid")
}

/// `(A=known, T=new, L=long, W=home)`, predicted `skips`.
pub fn e1() -> Instance {
    Instance::new(vec![0, 0, 0, 0])
}

/// `(A=known, T=new, L=short, W=work)`, predicted `reads`.
pub fn e2() -> Instance {
    Instance::new(vec![0, 0, 1, 1])
}

/// Same literals as `e1`; the instance used for the size-one MUS/MCS case.
pub fn e3() -> Instance {
    Instance::new(vec![0, 0, 0, 0])
}

/// `X in {a,b,c}`, `Y in {0,1}`; class k1/k2/k3 follows `X` alone.
pub fn three_class() -> Model {
    let space = FeatureSpace::new(vec![
        Feature::new("X", &["a", "b", "c"]),
        Feature::new("Y", &["0", "1"]),
    ]);
    let tree: DecisionTree = Tree {
        nodes: vec![
            node(0, &[(0, 1), (1, 2), (2, 3)]),
            Node::Leaf(ClassLabel(0)),
            Node::Leaf(ClassLabel(1)),
            Node::Leaf(ClassLabel(2)),
        ],
        root: 0,
    };
    Model::new(
        space,
        vec!["k1".into(), "k2".into(), "k3".into()],
        Classifier::Tree(tree),
    )
    .expect("three-class fixture is valid")
}

/// Poole's feature space with a tree that always answers `reads`.
pub fn constant() -> Model {
    let space = poole().space().clone();
    Model::new(
        space,
        vec!["reads".into(), "skips".into()],
        Classifier::Tree(Tree::leaf(ClassLabel(0))),
    )
    .expect("constant fixture is valid")
}
