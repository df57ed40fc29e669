//! Seeded random models and instances for tests, benchmarks and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    AdditiveEnsemble, ClassLabel, Classifier, Feature, FeatureSpace, Instance, Model, Node, Tree,
};

#[derive(Debug, Clone, Copy)]
pub struct TreeParams {
    pub min_features: usize,
    pub max_features: usize,
    pub min_domain: usize,
    pub max_domain: usize,
    pub min_classes: usize,
    pub max_classes: usize,
    /// Probability that a non-root node becomes a leaf early.
    pub leaf_probability: f64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            min_features: 2,
            max_features: 6,
            min_domain: 2,
            max_domain: 3,
            min_classes: 2,
            max_classes: 3,
            leaf_probability: 0.3,
        }
    }
}

fn space(rng: &mut ChaCha8Rng, n: usize, min_domain: usize, max_domain: usize) -> FeatureSpace {
    FeatureSpace::new(
        (0..n)
            .map(|i| {
                let d = rng.gen_range(min_domain..=max_domain);
                Feature {
                    name: format!("x{i}"),
                    domain: (0..d).map(|v| format!("v{v}")).collect(),
                }
            })
            .collect(),
    )
}

struct Shape<'a> {
    space: &'a FeatureSpace,
    max_depth: usize,
    leaf_probability: f64,
}

fn grow<L>(
    rng: &mut ChaCha8Rng,
    shape: &Shape<'_>,
    nodes: &mut Vec<Node<L>>,
    used: &mut Vec<bool>,
    depth: usize,
    leaf: &mut impl FnMut(&mut ChaCha8Rng) -> L,
) -> usize {
    let space = shape.space;
    let free: Vec<usize> = (0..space.len()).filter(|&f| !used[f]).collect();
    let stop = depth >= shape.max_depth
        || free.is_empty()
        || (depth > 0 && rng.gen_bool(shape.leaf_probability));
    let id = nodes.len();
    if stop {
        let value = leaf(rng);
        nodes.push(Node::Leaf(value));
        return id;
    }
    let feature = free[rng.gen_range(0..free.len())];
    // Placeholder, replaced once the children exist.
    let value = leaf(rng);
    nodes.push(Node::Leaf(value));
    used[feature] = true;
    let children = (0..space.domain_size(feature))
        .map(|v| {
            let child = grow(rng, shape, nodes, used, depth + 1, leaf);
            (v, child)
        })
        .collect();
    used[feature] = false;
    nodes[id] = Node::Internal { feature, children };
    id
}

/// A random decision tree over a random categorical space.
pub fn random_tree_model(seed: u64, params: &TreeParams) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(params.min_features..=params.max_features);
    let space = space(&mut rng, n, params.min_domain, params.max_domain);
    let k = rng.gen_range(params.min_classes..=params.max_classes);
    let mut nodes = Vec::new();
    let mut used = vec![false; n];
    let mut leaf = |r: &mut ChaCha8Rng| ClassLabel(r.gen_range(0..k));
    let shape = Shape {
        space: &space,
        max_depth: n,
        leaf_probability: params.leaf_probability,
    };
    let root = grow(&mut rng, &shape, &mut nodes, &mut used, 0, &mut leaf);
    let classes = (0..k).map(|c| format!("c{c}")).collect();
    Model::new(space, classes, Classifier::Tree(Tree { nodes, root }))
        .expect("generated tree is valid")
}

/// A binary-class additive ensemble of full-depth score trees.
pub fn random_ensemble(
    seed: u64,
    features: usize,
    domain: usize,
    trees_per_class: usize,
    depth: usize,
    scale: i64,
) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = space(&mut rng, features, domain, domain);
    let mut trees = Vec::new();
    for _ in 0..2 {
        let mut group = Vec::new();
        for _ in 0..trees_per_class {
            let mut nodes = Vec::new();
            let mut used = vec![false; features];
            let mut leaf = |r: &mut ChaCha8Rng| r.gen_range(-scale..=scale);
            let shape = Shape {
                space: &space,
                max_depth: depth,
                leaf_probability: 0.0,
            };
            let root = grow(&mut rng, &shape, &mut nodes, &mut used, 0, &mut leaf);
            group.push(Tree { nodes, root });
        }
        trees.push(group);
    }
    Model::new(
        space,
        vec!["neg".into(), "pos".into()],
        Classifier::Ensemble(AdditiveEnsemble { trees, scale }),
    )
    .expect("generated ensemble is valid")
}

/// Uniform random instances of `space`.
pub fn random_instances(seed: u64, space: &FeatureSpace, count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            Instance::new(
                (0..space.len())
                    .map(|f| rng.gen_range(0..space.domain_size(f)))
                    .collect(),
            )
        })
        .collect()
}
