//! Exact minimal hitting sets with blocked supersets.
//!
//! The search is a small DPLL over "element in / element out" decisions:
//! unit propagation on the sets still to hit and on the blocked sets, then
//! branching on the first unhit set. Any hitting set found is shrunk to a
//! subset-minimal one, which keeps it clear of every blocked set.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MhsMode {
    /// First subset-minimal hitting set in search order.
    #[default]
    SubsetMinimal,
    /// A hitting set of minimum cardinality (ties broken by search order).
    MinimumCardinality,
}

/// `to_hit` sets must each be hit; no answer may contain a `blocked` set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingSetInstance {
    universe: Vec<usize>,
    to_hit: Vec<Vec<usize>>,
    blocked: Vec<Vec<usize>>,
}

impl HittingSetInstance {
    /// Sets are canonicalised (sorted, deduplicated); every set must lie
    /// inside `universe`.
    pub fn new(
        universe: impl IntoIterator<Item = usize>,
        to_hit: Vec<Vec<usize>>,
        blocked: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let mut universe: Vec<usize> = universe.into_iter().collect();
        universe.sort_unstable();
        universe.dedup();
        let canon = |sets: Vec<Vec<usize>>, what: &str| -> Result<Vec<Vec<usize>>> {
            sets.into_iter()
                .map(|mut s| {
                    s.sort_unstable();
                    s.dedup();
                    if let Some(e) = s.iter().find(|e| universe.binary_search(e).is_err()) {
                        return Err(Error::Internal(format!(
                            "{what} set element {e} outside the universe"
                        )));
                    }
                    Ok(s)
                })
                .collect()
        };
        let to_hit = canon(to_hit, "to-hit")?;
        let blocked = canon(blocked, "blocked")?;
        Ok(HittingSetInstance {
            universe,
            to_hit,
            blocked,
        })
    }

    pub fn universe(&self) -> &[usize] {
        &self.universe
    }

    pub fn to_hit(&self) -> &[Vec<usize>] {
        &self.to_hit
    }

    pub fn blocked(&self) -> &[Vec<usize>] {
        &self.blocked
    }

    pub fn push_to_hit(&mut self, set: Vec<usize>) {
        let mut set = set;
        set.sort_unstable();
        set.dedup();
        self.to_hit.push(set);
    }

    pub fn push_blocked(&mut self, set: Vec<usize>) {
        let mut set = set;
        set.sort_unstable();
        set.dedup();
        self.blocked.push(set);
    }
}

/// Whether `candidate` intersects every set of `family`.
pub fn hits_all(candidate: &[usize], family: &[Vec<usize>]) -> bool {
    family
        .iter()
        .all(|s| s.iter().any(|e| candidate.contains(e)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Unknown,
    In,
    Out,
}

struct Search {
    to_hit: Vec<Vec<usize>>,
    blocked: Vec<Vec<usize>>,
    mode: MhsMode,
    nodes: u64,
    budget: u64,
    best: Option<Vec<usize>>,
}

/// A subset-minimal hitting set of `instance.to_hit` that contains no
/// blocked set, or `None` if none exists.
pub fn minimal_hitting_set(
    instance: &HittingSetInstance,
    mode: MhsMode,
    node_budget: u64,
) -> Result<Option<Vec<usize>>> {
    // Work on positions 0..n of the universe.
    let pos = |e: &usize| {
        instance
            .universe
            .binary_search(e)
            .expect("canonical instance")
    };
    let to_hit = instance
        .to_hit
        .iter()
        .map(|s| s.iter().map(pos).collect())
        .collect();
    let blocked = instance
        .blocked
        .iter()
        .map(|s| s.iter().map(pos).collect())
        .collect();
    let mut search = Search {
        to_hit,
        blocked,
        mode,
        nodes: 0,
        budget: node_budget,
        best: None,
    };
    let state = vec![State::Unknown; instance.universe.len()];
    search.branch(state)?;
    Ok(search
        .best
        .map(|s| s.into_iter().map(|p| instance.universe[p]).collect()))
}

impl Search {
    /// Returns `true` when the search should stop.
    fn branch(&mut self, mut state: Vec<State>) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded {
                what: "hitting-set nodes",
                limit: self.budget,
            });
        }
        if !self.propagate(&mut state) {
            return Ok(false);
        }
        let chosen = state.iter().filter(|&&s| s == State::In).count();
        if let (MhsMode::MinimumCardinality, Some(best)) = (self.mode, &self.best) {
            let lower = chosen + usize::from(self.first_unhit(&state).is_some());
            if lower >= best.len() {
                return Ok(false);
            }
        }
        let Some(set) = self.first_unhit(&state) else {
            let hs: Vec<usize> = (0..state.len())
                .filter(|&p| state[p] == State::In)
                .collect();
            let hs = self.shrink(hs);
            let better = self.best.as_ref().is_none_or(|b| hs.len() < b.len());
            if better {
                self.best = Some(hs);
            }
            return Ok(self.mode == MhsMode::SubsetMinimal);
        };
        let options: Vec<usize> = self.to_hit[set]
            .iter()
            .copied()
            .filter(|&p| state[p] == State::Unknown)
            .collect();
        for &p in &options {
            let mut child = state.clone();
            child[p] = State::In;
            if self.branch(child)? {
                return Ok(true);
            }
            // Later branches exclude the elements already tried.
            state[p] = State::Out;
        }
        Ok(false)
    }

    fn first_unhit(&self, state: &[State]) -> Option<usize> {
        self.to_hit
            .iter()
            .position(|s| !s.iter().any(|&p| state[p] == State::In))
    }

    /// Unit propagation; `false` on conflict.
    fn propagate(&self, state: &mut [State]) -> bool {
        loop {
            let mut changed = false;
            for s in &self.to_hit {
                if s.iter().any(|&p| state[p] == State::In) {
                    continue;
                }
                let mut open = s.iter().filter(|&&p| state[p] == State::Unknown);
                match (open.next(), open.next()) {
                    (None, _) => return false,
                    (Some(&p), None) => {
                        state[p] = State::In;
                        changed = true;
                    }
                    _ => {}
                }
            }
            for b in &self.blocked {
                if b.iter().any(|&p| state[p] == State::Out) {
                    continue;
                }
                let mut open = b.iter().filter(|&&p| state[p] == State::Unknown);
                match (open.next(), open.next()) {
                    (None, _) => return false,
                    (Some(&p), None) => {
                        state[p] = State::Out;
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Drops elements, in ascending order, that are not needed to hit.
    fn shrink(&self, mut hs: Vec<usize>) -> Vec<usize> {
        let mut i = 0;
        while i < hs.len() {
            let e = hs.remove(i);
            if hits_all(&hs, &self.to_hit) {
                continue;
            }
            hs.insert(i, e);
            i += 1;
        }
        hs
    }
}
