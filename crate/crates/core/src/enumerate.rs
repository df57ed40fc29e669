//! Enumeration of explanations.
//!
//! [`enumerate_cxps`] repeatedly extracts a CXp while blocking the ones
//! already reported. [`enumerate_all`] runs the implicit hitting-set loop:
//! a minimal hitting set of the CXps found so far that contains no known
//! AXp is either sufficient (a new AXp) or its counterexample seeds a new
//! CXp disjoint from it.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::explain::{extract_cxp, grow_cxp_from, Axp, Cxp, ExplanationProblem};
use crate::hitting_set::{minimal_hitting_set, HittingSetInstance, MhsMode};
use crate::oracle::Oracle;

/// Stream of basic CXps; each is reported once.
pub struct CxpStream<'a, 'm> {
    problem: &'a ExplanationProblem<'m>,
    oracle: &'a mut Oracle<'m>,
    budget: Budget,
    blocked: Vec<Vec<usize>>,
    done: bool,
}

impl Iterator for CxpStream<'_, '_> {
    type Item = Result<Cxp>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.blocked.len() as u64 >= self.budget.explanations {
            self.done = true;
            return Some(Err(Error::BudgetExceeded {
                what: "reported explanations",
                limit: self.budget.explanations,
            }));
        }
        match extract_cxp(self.problem, self.oracle, &self.blocked, &self.budget) {
            Ok(Some(cxp)) => {
                self.blocked.push(cxp.features());
                Some(Ok(cxp))
            }
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// All basic CXps of `problem`, in discovery order.
pub fn enumerate_cxps<'a, 'm>(
    problem: &'a ExplanationProblem<'m>,
    oracle: &'a mut Oracle<'m>,
    budget: &Budget,
) -> CxpStream<'a, 'm> {
    CxpStream {
        problem,
        oracle,
        budget: *budget,
        blocked: Vec::new(),
        done: false,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub mode: MhsMode,
    /// Stop after this many explanations (AXps and CXps together).
    pub limit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Found {
    Axp(Axp),
    Cxp(Cxp),
}

/// Blocking sets of the joint loop: AXps found (no candidate may contain
/// one) and CXps found (every candidate must hit each).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnumerationState {
    pub axps: Vec<Vec<usize>>,
    pub cxps: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub axps: Vec<Axp>,
    pub cxps: Vec<Cxp>,
    /// Hitting-set candidates examined, including the final empty one.
    pub iterations: u64,
    /// False when `limit` cut the loop short.
    pub complete: bool,
}

pub fn enumerate_all(
    problem: &ExplanationProblem<'_>,
    oracle: &mut Oracle<'_>,
    budget: &Budget,
    options: &EnumerationOptions,
) -> Result<Enumeration> {
    enumerate_all_with(problem, oracle, budget, options, |_| {})
}

/// Joint AXp/CXp enumeration; `on_found` sees each explanation as soon as
/// it is reported.
pub fn enumerate_all_with(
    problem: &ExplanationProblem<'_>,
    oracle: &mut Oracle<'_>,
    budget: &Budget,
    options: &EnumerationOptions,
    mut on_found: impl FnMut(&Found),
) -> Result<Enumeration> {
    let n = problem.arity();
    let targets = problem.contrast_classes();
    let mut hs = HittingSetInstance::new(0..n, Vec::new(), Vec::new())?;
    let mut state = EnumerationState::default();
    let mut out = Enumeration {
        axps: Vec::new(),
        cxps: Vec::new(),
        iterations: 0,
        complete: true,
    };
    loop {
        let reported = (out.axps.len() + out.cxps.len()) as u64;
        if options.limit.is_some_and(|l| reported >= l) {
            out.complete = false;
            break;
        }
        if reported >= budget.explanations {
            return Err(Error::BudgetExceeded {
                what: "reported explanations",
                limit: budget.explanations,
            });
        }
        out.iterations += 1;
        let Some(candidate) = minimal_hitting_set(&hs, options.mode, budget.mhs_nodes)? else {
            break;
        };
        let partial = problem.instance().restrict(&candidate);
        match oracle.find_counterexample(&partial, &targets)? {
            None => {
                let axp = Axp::new(problem.literals(&candidate));
                hs.push_blocked(candidate.clone());
                state.axps.push(candidate);
                on_found(&Found::Axp(axp.clone()));
                out.axps.push(axp);
            }
            Some(witness) => {
                let kept = witness.agreement(problem.instance());
                let released = grow_cxp_from(problem, oracle, &kept)?;
                if released.iter().any(|f| candidate.contains(f)) || state.cxps.contains(&released)
                {
                    return Err(Error::Internal(format!(
                        "CXp {released:?} does not avoid candidate {candidate:?}"
                    )));
                }
                let cxp = Cxp::new(problem.literals(&released), problem.targets().to_vec());
                hs.push_to_hit(released.clone());
                state.cxps.push(released);
                on_found(&Found::Cxp(cxp.clone()));
                out.cxps.push(cxp);
            }
        }
    }
    Ok(out)
}
