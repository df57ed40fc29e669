//! Extraction of single abductive (AXp) and contrastive (CXp) explanations.
//!
//! An AXp is a subset-minimal set of instance literals that alone forces the
//! prediction. A CXp is a subset-minimal set of instance literals whose
//! release allows a different prediction (or one in a chosen target set).
//! Both are computed with a linear number of oracle queries.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::hitting_set::{minimal_hitting_set, HittingSetInstance, MhsMode};
use crate::model::{ClassLabel, Instance, Literal, Model, PartialAssignment};
use crate::oracle::Oracle;

/// An instance, its prediction, and the classes a contrast should reach.
#[derive(Debug, Clone)]
pub struct ExplanationProblem<'m> {
    model: &'m Model,
    instance: Instance,
    prediction: ClassLabel,
    targets: Vec<ClassLabel>,
    order: Vec<usize>,
}

impl<'m> ExplanationProblem<'m> {
    /// Explains the model's own prediction for `instance`.
    pub fn new(model: &'m Model, instance: Instance) -> Result<Self> {
        instance.check(model.space())?;
        let prediction = model.predict(&instance);
        Ok(ExplanationProblem {
            model,
            instance,
            prediction,
            targets: Vec::new(),
            order: (0..model.space().len()).collect(),
        })
    }

    /// Like [`new`](Self::new), but checks that the model predicts `expected`.
    pub fn with_prediction(
        model: &'m Model,
        instance: Instance,
        expected: ClassLabel,
    ) -> Result<Self> {
        let p = Self::new(model, instance)?;
        if p.prediction != expected {
            return Err(Error::PredictionMismatch {
                expected: expected.0,
                actual: p.prediction.0,
            });
        }
        Ok(p)
    }

    /// Restricts contrastive explanations to reach one of `targets`.
    pub fn with_targets(mut self, targets: &[ClassLabel]) -> Result<Self> {
        let mut targets = targets.to_vec();
        targets.sort_unstable();
        targets.dedup();
        if let Some(t) = targets.iter().find(|t| t.0 >= self.model.num_classes()) {
            return Err(Error::InvalidTarget(format!(
                "class index {} out of range",
                t.0
            )));
        }
        if targets.contains(&self.prediction) {
            return Err(Error::InvalidTarget(format!(
                "target set contains the prediction '{}'",
                self.model.class_name(self.prediction)
            )));
        }
        self.targets = targets;
        Ok(self)
    }

    /// Literal processing order. Features missing from `order` follow in
    /// declaration order.
    pub fn with_order(mut self, order: &[usize]) -> Result<Self> {
        let n = self.model.space().len();
        let mut seen = vec![false; n];
        let mut full = Vec::with_capacity(n);
        for &f in order {
            if f >= n {
                return Err(Error::InvalidOrder(format!(
                    "feature index {f} out of range"
                )));
            }
            if seen[f] {
                return Err(Error::InvalidOrder(format!(
                    "feature '{}' listed twice",
                    self.model.space().feature(f).name
                )));
            }
            seen[f] = true;
            full.push(f);
        }
        full.extend((0..n).filter(|&f| !seen[f]));
        self.order = full;
        Ok(self)
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn prediction(&self) -> ClassLabel {
        self.prediction
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// The explicit target set; empty means "any other class".
    pub fn targets(&self) -> &[ClassLabel] {
        &self.targets
    }

    /// Classes a contrastive explanation must be able to reach.
    pub fn contrast_classes(&self) -> Vec<ClassLabel> {
        if self.targets.is_empty() {
            self.model.other_classes(self.prediction)
        } else {
            self.targets.clone()
        }
    }

    pub fn arity(&self) -> usize {
        self.instance.len()
    }

    pub fn literals(&self, features: &[usize]) -> Vec<Literal> {
        let mut fs = features.to_vec();
        fs.sort_unstable();
        fs.into_iter().map(|f| self.instance.literal(f)).collect()
    }

    /// The instance with the `features` literals released.
    pub fn complement(&self, features: &[usize]) -> PartialAssignment {
        let mut pa = self.instance.as_assignment();
        for &f in features {
            pa.remove(f);
        }
        pa
    }
}

/// Abductive explanation: instance literals sufficient for the prediction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Axp {
    literals: Vec<Literal>,
}

impl Axp {
    pub fn new(mut literals: Vec<Literal>) -> Self {
        literals.sort();
        Axp { literals }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn features(&self) -> Vec<usize> {
        self.literals.iter().map(|l| l.feature).collect()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }
}

/// Contrastive explanation: instance literals whose release permits a
/// prediction outside the original class (or inside `targets`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cxp {
    literals: Vec<Literal>,
    targets: Vec<ClassLabel>,
}

impl Cxp {
    pub fn new(mut literals: Vec<Literal>, targets: Vec<ClassLabel>) -> Self {
        literals.sort();
        Cxp { literals, targets }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    /// Empty for a basic CXp.
    pub fn targets(&self) -> &[ClassLabel] {
        &self.targets
    }

    pub fn features(&self) -> Vec<usize> {
        self.literals.iter().map(|l| l.feature).collect()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }
}

/// Replacement values for a CXp's features that change the prediction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CxpWitness {
    pub cxp: Cxp,
    pub replacement: Vec<Literal>,
    pub instance: Instance,
    pub class: ClassLabel,
}

/// Deletion-based AXp extraction: one entailment query per seed literal.
pub fn extract_axp(
    problem: &ExplanationProblem<'_>,
    oracle: &mut Oracle<'_>,
    seed: Option<&[usize]>,
) -> Result<Axp> {
    let mut current = match seed {
        None => problem.instance.as_assignment(),
        Some(seed) => {
            if let Some(&f) = seed.iter().find(|&&f| f >= problem.arity()) {
                return Err(Error::SeedOutOfRange(f));
            }
            let pa = problem.instance.restrict(seed);
            if !oracle.entails(&pa, problem.prediction)? {
                return Err(Error::SeedNotSufficient);
            }
            pa
        }
    };
    for &f in &problem.order {
        let Some(v) = current.remove(f) else { continue };
        if !oracle.entails(&current, problem.prediction)? {
            current.set(f, Some(v));
        }
    }
    Ok(Axp::new(current.literals().collect()))
}

/// Grows `kept` to a maximal set of instance literals that still admits a
/// completion predicted in `targets`. Returns the released features.
///
/// `kept` must already admit such a completion.
fn grow_released(
    problem: &ExplanationProblem<'_>,
    oracle: &mut Oracle<'_>,
    targets: &[ClassLabel],
    kept: &[usize],
) -> Result<Vec<usize>> {
    let n = problem.arity();
    let mut in_kept = vec![false; n];
    for &f in kept {
        in_kept[f] = true;
    }
    let mut current = problem.instance.restrict(kept);
    let mut size = kept.len();
    for &f in &problem.order {
        if in_kept[f] {
            continue;
        }
        // The full instance predicts outside `targets`.
        if size + 1 == n {
            continue;
        }
        current.set(f, Some(problem.instance.value(f)));
        if oracle.find_counterexample(&current, targets)?.is_some() {
            in_kept[f] = true;
            size += 1;
        } else {
            current.set(f, None);
        }
    }
    Ok((0..n).filter(|&f| !in_kept[f]).collect())
}

/// Basic CXp extraction. Each CXp in `blocked` must keep at least one of its
/// literals fixed, so the result differs from all of them. `None` means no
/// unblocked CXp exists.
pub fn extract_cxp(
    problem: &ExplanationProblem<'_>,
    oracle: &mut Oracle<'_>,
    blocked: &[Vec<usize>],
    budget: &Budget,
) -> Result<Option<Cxp>> {
    let targets = problem.model.other_classes(problem.prediction);
    let seed = if blocked.is_empty() {
        if oracle.entails(
            &PartialAssignment::empty(problem.arity()),
            problem.prediction,
        )? {
            return Ok(None);
        }
        Vec::new()
    } else {
        match feasible_blocking_seed(problem, oracle, &targets, blocked, budget)? {
            Some(seed) => seed,
            None => return Ok(None),
        }
    };
    let released = grow_released(problem, oracle, &targets, &seed)?;
    Ok(Some(Cxp::new(problem.literals(&released), Vec::new())))
}

/// A minimal set of instance features hitting every blocked CXp whose
/// literals still admit a completion into `targets`.
fn feasible_blocking_seed(
    problem: &ExplanationProblem<'_>,
    oracle: &mut Oracle<'_>,
    targets: &[ClassLabel],
    blocked: &[Vec<usize>],
    budget: &Budget,
) -> Result<Option<Vec<usize>>> {
    let mut hs = HittingSetInstance::new(0..problem.arity(), blocked.to_vec(), Vec::new())?;
    // Feasibility is closed under subsets, so minimal hitting sets suffice.
    while let Some(candidate) = minimal_hitting_set(&hs, MhsMode::SubsetMinimal, budget.mhs_nodes)?
    {
        let pa = problem.instance.restrict(&candidate);
        if oracle.find_counterexample(&pa, targets)?.is_some() {
            return Ok(Some(candidate));
        }
        hs.push_blocked(candidate);
    }
    Ok(None)
}

/// CXp whose alternative prediction lies in the problem's target set
/// (every other class when none was set).
pub fn targeted_cxp(problem: &ExplanationProblem<'_>, oracle: &mut Oracle<'_>) -> Result<Cxp> {
    let targets = problem.contrast_classes();
    if oracle
        .find_counterexample(&PartialAssignment::empty(problem.arity()), &targets)?
        .is_none()
    {
        return Err(Error::TargetUnreachable);
    }
    let released = grow_released(problem, oracle, &targets, &[])?;
    Ok(Cxp::new(
        problem.literals(&released),
        problem.targets.clone(),
    ))
}

/// Seeded CXp growth: `kept` must already admit a completion into the
/// contrast classes. Used by the enumeration engine.
pub(crate) fn grow_cxp_from(
    problem: &ExplanationProblem<'_>,
    oracle: &mut Oracle<'_>,
    kept: &[usize],
) -> Result<Vec<usize>> {
    let targets = problem.contrast_classes();
    grow_released(problem, oracle, &targets, kept)
}

/// Deterministic replacement values for `cxp`, taken from the first
/// completion of the kept literals that reaches the contrast classes.
pub fn cxp_witness(
    problem: &ExplanationProblem<'_>,
    oracle: &mut Oracle<'_>,
    cxp: &Cxp,
) -> Result<CxpWitness> {
    let targets = if cxp.targets.is_empty() {
        problem.model.other_classes(problem.prediction)
    } else {
        cxp.targets.clone()
    };
    let features = cxp.features();
    let kept = problem.complement(&features);
    let Some(x) = oracle.find_counterexample(&kept, &targets)? else {
        return Err(Error::Internal(format!(
            "no completion of the kept literals reaches the target classes for CXp {:?}",
            features
        )));
    };
    let replacement: Vec<Literal> = features.iter().map(|&f| x.literal(f)).collect();
    if replacement.iter().zip(cxp.literals()).any(|(r, l)| r == l) {
        return Err(Error::Internal(format!(
            "witness keeps an original value for CXp {:?}; the CXp is not minimal",
            features
        )));
    }
    let class = problem.model.predict(&x);
    Ok(CxpWitness {
        cxp: cxp.clone(),
        replacement,
        instance: x,
        class,
    })
}

/// Sufficiency and per-literal minimality of a candidate AXp.
pub fn is_axp(
    problem: &ExplanationProblem<'_>,
    oracle: &mut Oracle<'_>,
    features: &[usize],
) -> Result<bool> {
    let pi = problem.prediction;
    let mut pa = problem.instance.restrict(features);
    if !oracle.entails(&pa, pi)? {
        return Ok(false);
    }
    for &f in features {
        let v = pa.remove(f);
        let still = oracle.entails(&pa, pi)?;
        pa.set(f, v);
        if still {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Reachability of `targets` after releasing `features`, and loss of it
/// when any one of them is fixed back. Empty `targets` means any other class.
pub fn is_cxp(
    problem: &ExplanationProblem<'_>,
    oracle: &mut Oracle<'_>,
    features: &[usize],
    targets: &[ClassLabel],
) -> Result<bool> {
    let targets = if targets.is_empty() {
        problem.model.other_classes(problem.prediction)
    } else {
        targets.to_vec()
    };
    let mut pa = problem.complement(features);
    if oracle.find_counterexample(&pa, &targets)?.is_none() {
        return Ok(false);
    }
    for &f in features {
        pa.set(f, Some(problem.instance.value(f)));
        let reachable = oracle.find_counterexample(&pa, &targets)?.is_some();
        pa.set(f, None);
        if reachable {
            return Ok(false);
        }
    }
    Ok(true)
}
