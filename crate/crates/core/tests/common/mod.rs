//! Reference semantics by enumerating every completion. Shares nothing with
//! the library's query code beyond `Model::predict`.
#![allow(dead_code)]

use xdual_core::{ClassLabel, Instance, Model, PartialAssignment};

/// All completions of `partial`, in lexicographic order.
pub fn completions(model: &Model, partial: &PartialAssignment) -> Vec<Instance> {
    let space = model.space();
    let mut out = vec![Vec::new()];
    for f in 0..space.len() {
        let choices: Vec<usize> = match partial.get(f) {
            Some(v) => vec![v],
            None => (0..space.domain_size(f)).collect(),
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(Instance::new).collect()
}

pub fn naive_entails(model: &Model, partial: &PartialAssignment, class: ClassLabel) -> bool {
    completions(model, partial)
        .iter()
        .all(|x| model.predict(x) == class)
}

pub fn naive_counterexample(
    model: &Model,
    partial: &PartialAssignment,
    targets: &[ClassLabel],
) -> Option<Instance> {
    completions(model, partial)
        .into_iter()
        .find(|x| targets.contains(&model.predict(x)))
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..(1 << n)).map(move |m| (0..n).filter(|&f| m & (1 << f) != 0).collect())
}

fn minimal(mut family: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    family.sort_by_key(|s| s.len());
    let mut out: Vec<Vec<usize>> = Vec::new();
    for s in family {
        if !out.iter().any(|o| o.iter().all(|e| s.contains(e))) {
            out.push(s);
        }
    }
    out.sort();
    out
}

/// (AXps, CXps) for reaching `targets` from `tau`, by subset enumeration
/// over the naive oracle.
pub fn naive_explanations(
    model: &Model,
    tau: &Instance,
    targets: &[ClassLabel],
) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let n = tau.len();
    let blocked =
        |kept: &[usize]| naive_counterexample(model, &tau.restrict(kept), targets).is_none();
    let axps = minimal(subsets(n).filter(|s| blocked(s)).collect());
    let cxps = minimal(
        subsets(n)
            .filter(|rho| {
                let kept: Vec<usize> = (0..n).filter(|f| !rho.contains(f)).collect();
                !blocked(&kept)
            })
            .collect(),
    );
    (axps, cxps)
}
