//! Hitting-set duality between AXp and CXp families.

use std::fmt;

use crate::hitting_set::hits_all;

/// All subset-minimal transversals of `family`, by Berge's incremental
/// construction. Output sets are sorted and the list is in canonical order.
pub fn minimal_transversals(family: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut current: Vec<Vec<usize>> = vec![Vec::new()];
    for set in family {
        let mut next: Vec<Vec<usize>> = Vec::new();
        for t in &current {
            if set.iter().any(|e| t.contains(e)) {
                next.push(t.clone());
            } else {
                for &e in set {
                    let mut u = t.clone();
                    u.push(e);
                    u.sort_unstable();
                    next.push(u);
                }
            }
        }
        next.sort();
        next.dedup();
        current = keep_minimal(next);
    }
    current
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|e| b.contains(e))
}

fn keep_minimal(sets: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let keep: Vec<bool> = sets
        .iter()
        .enumerate()
        .map(|(i, s)| {
            !sets
                .iter()
                .enumerate()
                .any(|(j, o)| j != i && o.len() < s.len() && is_subset(o, s))
        })
        .collect();
    sets.into_iter()
        .zip(keep)
        .filter_map(|(s, k)| k.then_some(s))
        .collect()
}

fn canonical(family: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = family
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s
        })
        .collect();
    out.sort();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Axp,
    Cxp,
}

impl Side {
    fn other(self) -> Side {
        match self {
            Side::Axp => Side::Cxp,
            Side::Cxp => Side::Axp,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Axp => "AXp",
            Side::Cxp => "CXp",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualityViolation {
    /// `set` (on `side`) misses `other` on the opposite side.
    Misses {
        side: Side,
        set: Vec<usize>,
        other: Vec<usize>,
    },
    /// `set` still hits every opposite set without `element`.
    NotMinimal {
        side: Side,
        set: Vec<usize>,
        element: usize,
    },
    /// A minimal transversal of the opposite family absent from `side`.
    Missing {
        side: Side,
        set: Vec<usize>,
    },
    /// A member of `side` that is not a minimal transversal of the opposite family.
    Extraneous {
        side: Side,
        set: Vec<usize>,
    },
    Duplicate {
        side: Side,
        set: Vec<usize>,
    },
}

fn render(set: &[usize], name: &dyn Fn(usize) -> String) -> String {
    let parts: Vec<String> = set.iter().map(|&e| name(e)).collect();
    format!("{{{}}}", parts.join(", "))
}

impl DualityViolation {
    /// Human-readable form with element names supplied by `name`.
    pub fn describe(&self, name: &dyn Fn(usize) -> String) -> String {
        use DualityViolation::*;
        match self {
            Misses { side, set, other } => format!(
                "{side} {} does not hit {} {}",
                render(set, name),
                side.other(),
                render(other, name)
            ),
            NotMinimal { side, set, element } => format!(
                "{side} {} is not a minimal hitting set: {} is redundant",
                render(set, name),
                name(*element)
            ),
            Missing { side, set } => format!(
                "minimal hitting set {} of the {} family is not listed as a {side}",
                render(set, name),
                side.other()
            ),
            Extraneous { side, set } => format!(
                "{side} {} is not a minimal hitting set of the {} family",
                render(set, name),
                side.other()
            ),
            Duplicate { side, set } => format!("{side} {} listed twice", render(set, name)),
        }
    }
}

impl fmt::Display for DualityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe(&|e| e.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DualityReport {
    pub violations: Vec<DualityViolation>,
}

impl DualityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that each family is exactly the set of minimal hitting sets of
/// the other.
pub fn verify_duality(axps: &[Vec<usize>], cxps: &[Vec<usize>]) -> DualityReport {
    let axps = canonical(axps);
    let cxps = canonical(cxps);
    let mut violations = Vec::new();
    for (side, mine, theirs) in [(Side::Axp, &axps, &cxps), (Side::Cxp, &cxps, &axps)] {
        for w in mine.windows(2) {
            if w[0] == w[1] {
                violations.push(DualityViolation::Duplicate {
                    side,
                    set: w[0].clone(),
                });
            }
        }
        for set in mine {
            for other in theirs.iter() {
                if !set.iter().any(|e| other.contains(e)) {
                    violations.push(DualityViolation::Misses {
                        side,
                        set: set.clone(),
                        other: other.clone(),
                    });
                }
            }
            if hits_all(set, theirs) {
                for (i, &e) in set.iter().enumerate() {
                    let mut smaller = set.clone();
                    smaller.remove(i);
                    if hits_all(&smaller, theirs) {
                        violations.push(DualityViolation::NotMinimal {
                            side,
                            set: set.clone(),
                            element: e,
                        });
                    }
                }
            }
        }
        let dual = minimal_transversals(theirs);
        for set in &dual {
            if mine.binary_search(set).is_err() {
                violations.push(DualityViolation::Missing {
                    side,
                    set: set.clone(),
                });
            }
        }
        for set in mine {
            if dual.binary_search(set).is_err() {
                violations.push(DualityViolation::Extraneous {
                    side,
                    set: set.clone(),
                });
            }
        }
    }
    DualityReport { violations }
}
