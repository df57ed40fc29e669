//! Reference explanation sets by exhaustive subset enumeration.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::explain::ExplanationProblem;
use crate::oracle::Oracle;

/// Every AXp and every CXp of a problem, each family in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplanationSets {
    pub axps: Vec<Vec<usize>>,
    pub cxps: Vec<Vec<usize>>,
}

/// Checks all `2^n` subsets of the instance: AXps are the minimal subsets
/// that rule out every contrast class, CXps the minimal subsets whose
/// release lets one be reached.
pub fn brute_force_explanations(
    problem: &ExplanationProblem<'_>,
    oracle: &mut Oracle<'_>,
    budget: &Budget,
) -> Result<ExplanationSets> {
    let n = problem.arity();
    let cap = budget.brute_force_features.min(30);
    if n > cap {
        return Err(Error::TooLarge { features: n, cap });
    }
    let targets = problem.contrast_classes();
    let full: u32 = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    let members = |mask: u32| -> Vec<usize> { (0..n).filter(|&f| mask & (1 << f) != 0).collect() };

    let mut sufficient = vec![false; 1usize << n];
    for mask in 0..=full {
        let pa = problem.instance().restrict(&members(mask));
        sufficient[mask as usize] = oracle.find_counterexample(&pa, &targets)?.is_none();
    }

    let mut axps = Vec::new();
    let mut cxps = Vec::new();
    for mask in 0..=full {
        let bits = members(mask);
        if sufficient[mask as usize]
            && bits
                .iter()
                .all(|&f| !sufficient[(mask & !(1 << f)) as usize])
        {
            axps.push(bits.clone());
        }
        let kept = full & !mask;
        if !sufficient[kept as usize]
            && bits.iter().all(|&f| sufficient[(kept | (1 << f)) as usize])
        {
            cxps.push(bits);
        }
    }
    axps.sort();
    cxps.sort();
    Ok(ExplanationSets { axps, cxps })
}
