//! Exact entailment and counterexample queries against a classifier.
//!
//! Decision trees are queried by walking every path consistent with the
//! partial assignment. Additive ensembles are queried exhaustively over the
//! free features, guarded by a completion cap.

use std::time::{Duration, Instant};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::model::{
    AdditiveEnsemble, ClassLabel, Classifier, DecisionTree, Instance, Model, Node,
    PartialAssignment,
};

/// Query counters for one explanation session.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OracleStats {
    pub entailment_calls: u64,
    pub witness_calls: u64,
    pub entailment_time: Duration,
    pub witness_time: Duration,
}

impl OracleStats {
    pub fn total_calls(&self) -> u64 {
        self.entailment_calls + self.witness_calls
    }

    pub fn total_time(&self) -> Duration {
        self.entailment_time + self.witness_time
    }
}

/// A query session over one model. Each session owns its statistics.
#[derive(Debug)]
pub struct Oracle<'m> {
    model: &'m Model,
    completion_cap: u64,
    stats: OracleStats,
}

impl<'m> Oracle<'m> {
    pub fn new(model: &'m Model) -> Self {
        Self::with_budget(model, &Budget::default())
    }

    pub fn with_budget(model: &'m Model, budget: &Budget) -> Self {
        Oracle {
            model,
            completion_cap: budget.completions,
            stats: OracleStats::default(),
        }
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn stats(&self) -> &OracleStats {
        &self.stats
    }

    pub fn predict(&self, instance: &Instance) -> ClassLabel {
        self.model.predict(instance)
    }

    /// Whether every completion of `partial` is predicted `class`.
    pub fn entails(&mut self, partial: &PartialAssignment, class: ClassLabel) -> Result<bool> {
        let start = Instant::now();
        self.stats.entailment_calls += 1;
        let res = match self.model.classifier() {
            Classifier::Tree(t) => Ok(tree_entails(t, partial, class)),
            Classifier::Ensemble(e) => {
                let cap = self.completion_cap;
                ensemble_first(e, partial, cap, |k| k != class).map(|w| w.is_none())
            }
        };
        self.stats.entailment_time += start.elapsed();
        res
    }

    /// The lexicographically first completion of `partial` whose prediction
    /// lies in `targets`, if any.
    pub fn find_counterexample(
        &mut self,
        partial: &PartialAssignment,
        targets: &[ClassLabel],
    ) -> Result<Option<Instance>> {
        let start = Instant::now();
        self.stats.witness_calls += 1;
        let mut mask = vec![false; self.model.num_classes()];
        for t in targets {
            mask[t.0] = true;
        }
        let res = match self.model.classifier() {
            Classifier::Tree(t) => Ok(tree_first(t, partial, &mask)),
            Classifier::Ensemble(e) => {
                let cap = self.completion_cap;
                ensemble_first(e, partial, cap, |k| mask[k.0])
            }
        };
        self.stats.witness_time += start.elapsed();
        res
    }
}

fn tree_entails(tree: &DecisionTree, partial: &PartialAssignment, class: ClassLabel) -> bool {
    let mut stack = vec![tree.root];
    while let Some(id) = stack.pop() {
        match &tree.nodes[id] {
            Node::Leaf(k) => {
                if *k != class {
                    return false;
                }
            }
            Node::Internal { feature, children } => match partial.get(*feature) {
                Some(v) => stack.push(children[&v]),
                None => stack.extend(children.values().copied()),
            },
        }
    }
    true
}

fn tree_first(
    tree: &DecisionTree,
    partial: &PartialAssignment,
    targets: &[bool],
) -> Option<Instance> {
    let mut slots: Vec<Option<usize>> = partial.slots().to_vec();
    let mut best: Option<Vec<usize>> = None;
    tree_first_rec(tree, tree.root, &mut slots, targets, &mut best);
    best.map(Instance::new)
}

fn tree_first_rec(
    tree: &DecisionTree,
    id: usize,
    slots: &mut Vec<Option<usize>>,
    targets: &[bool],
    best: &mut Option<Vec<usize>>,
) {
    match &tree.nodes[id] {
        Node::Leaf(k) => {
            if targets[k.0] {
                // Free features take their first category.
                let candidate: Vec<usize> = slots.iter().map(|s| s.unwrap_or(0)).collect();
                if best.as_ref().is_none_or(|b| candidate < *b) {
                    *best = Some(candidate);
                }
            }
        }
        Node::Internal { feature, children } => match slots[*feature] {
            Some(v) => tree_first_rec(tree, children[&v], slots, targets, best),
            None => {
                for (&v, &child) in children {
                    slots[*feature] = Some(v);
                    tree_first_rec(tree, child, slots, targets, best);
                }
                slots[*feature] = None;
            }
        },
    }
}

/// Scans completions of `partial` in lexicographic order and returns the
/// first one whose prediction satisfies `hit`.
fn ensemble_first(
    ensemble: &AdditiveEnsemble,
    partial: &PartialAssignment,
    cap: u64,
    hit: impl Fn(ClassLabel) -> bool,
) -> Result<Option<Instance>> {
    let domain_sizes = ensemble_domain_sizes(ensemble, partial.arity());
    let free: Vec<usize> = (0..partial.arity())
        .filter(|&f| !partial.is_fixed(f))
        .collect();
    let completions = free
        .iter()
        .try_fold(1u128, |acc, &f| acc.checked_mul(domain_sizes[f] as u128))
        .unwrap_or(u128::MAX);
    if completions > cap as u128 {
        return Err(Error::SearchSpaceExceeded { completions, cap });
    }
    let mut values: Vec<usize> = partial.slots().iter().map(|s| s.unwrap_or(0)).collect();
    loop {
        if hit(ensemble.predict(&values)) {
            return Ok(Some(Instance::new(values)));
        }
        // Odometer step; the last free feature varies fastest.
        let mut advanced = false;
        for &f in free.iter().rev() {
            values[f] += 1;
            if values[f] < domain_sizes[f] {
                advanced = true;
                break;
            }
            values[f] = 0;
        }
        if !advanced {
            return Ok(None);
        }
    }
}

/// Domain sizes as seen by the ensemble's trees. A feature no tree tests
/// cannot change the prediction, so it is treated as single-valued.
fn ensemble_domain_sizes(ensemble: &AdditiveEnsemble, arity: usize) -> Vec<usize> {
    let mut sizes = vec![1usize; arity];
    for t in ensemble.trees.iter().flatten() {
        for node in &t.nodes {
            if let Node::Internal { feature, children } = node {
                sizes[*feature] = sizes[*feature].max(children.len());
            }
        }
    }
    sizes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{constant, e1, e2, poole};
    use crate::model::Literal;

    fn pa(model: &Model, lits: &[(&str, &str)]) -> PartialAssignment {
        let space = model.space();
        let lits: Vec<Literal> = lits
            .iter()
            .map(|(f, v)| {
                let fi = space.index_of(f).unwrap();
                Literal::new(fi, space.feature(fi).value_index(v).unwrap())
            })
            .collect();
        PartialAssignment::from_literals(space.len(), &lits).unwrap()
    }

    #[test]
    fn predicts_running_examples() {
        let m = poole();
        assert_eq!(m.class_name(m.predict(&e1())), "skips");
        assert_eq!(m.class_name(m.predict(&e2())), "reads");
        let c = constant();
        assert_eq!(c.predict(&e1()), ClassLabel(0));
    }

    #[test]
    fn entailment_examples() {
        let m = poole();
        let mut o = Oracle::new(&m);
        let reads = m.class_index("reads").unwrap();
        let skips = m.class_index("skips").unwrap();
        assert!(o
            .entails(&pa(&m, &[("L", "short"), ("T", "new")]), reads)
            .unwrap());
        assert!(!o.entails(&pa(&m, &[("L", "short")]), reads).unwrap());
        assert!(o.entails(&pa(&m, &[("L", "long")]), skips).unwrap());
        assert!(!o.entails(&PartialAssignment::empty(4), reads).unwrap());
        assert!(!o.entails(&PartialAssignment::empty(4), skips).unwrap());
        assert_eq!(o.stats().entailment_calls, 5);
        assert_eq!(o.stats().witness_calls, 0);
    }

    #[test]
    fn counterexample_examples() {
        let m = poole();
        let mut o = Oracle::new(&m);
        let skips = m.class_index("skips").unwrap();
        let x = o
            .find_counterexample(
                &pa(&m, &[("A", "known"), ("T", "new"), ("W", "work")]),
                &[skips],
            )
            .unwrap()
            .unwrap();
        assert_eq!(x, Instance::new(vec![0, 0, 0, 1]));
        assert!(o
            .find_counterexample(&pa(&m, &[("L", "short"), ("T", "new")]), &[skips])
            .unwrap()
            .is_none());
        let tau = e2();
        let pi = m.predict(&tau);
        assert_eq!(
            o.find_counterexample(&tau.as_assignment(), &[pi]).unwrap(),
            Some(tau)
        );
        assert_eq!(o.stats().witness_calls, 3);
    }

    fn stump_ensemble(features: usize) -> Model {
        use crate::model::{Feature, FeatureSpace, Tree};
        let space = FeatureSpace::new(
            (0..features)
                .map(|i| Feature::new(format!("x{i}"), &["0", "1"]))
                .collect(),
        );
        let stumps = (0..features)
            .map(|f| Tree {
                nodes: vec![
                    Node::Internal {
                        feature: f,
                        children: [(0, 1), (1, 2)].into_iter().collect(),
                    },
                    Node::Leaf(0),
                    Node::Leaf(1),
                ],
                root: 0,
            })
            .collect();
        let e = AdditiveEnsemble {
            trees: vec![vec![Tree::leaf(features as i64 / 2)], stumps],
            scale: 1,
        };
        Model::new(
            space,
            vec!["lo".into(), "hi".into()],
            Classifier::Ensemble(e),
        )
        .unwrap()
    }

    #[test]
    fn ensemble_cap_is_enforced() {
        let m = stump_ensemble(12);
        let budget = Budget {
            completions: 1 << 10,
            ..Budget::default()
        };
        let mut o = Oracle::with_budget(&m, &budget);
        let empty = PartialAssignment::empty(12);
        match o.entails(&empty, ClassLabel(0)) {
            Err(Error::SearchSpaceExceeded { completions, cap }) => {
                assert_eq!(completions, 1 << 12);
                assert_eq!(cap, 1 << 10);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
        // Fixing two features brings the free product to the cap.
        let mut two = PartialAssignment::empty(12);
        two.set(0, Some(0));
        two.set(1, Some(0));
        assert!(!o.entails(&two, ClassLabel(0)).unwrap());
    }

    #[test]
    fn ensemble_counterexample_is_lexicographically_first() {
        // "hi" wins once more than 6 of the 12 stumps fire (ties go to "lo").
        let m = stump_ensemble(12);
        let mut o = Oracle::new(&m);
        let hi = m.class_index("hi").unwrap();
        let x = o
            .find_counterexample(&PartialAssignment::empty(12), &[hi])
            .unwrap()
            .unwrap();
        assert_eq!(x.values(), &[0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1]);
    }
}
