//! Pareto-optimal sets for a group of agents.
//!
//! [`pareto_set_naive`] is the direct pairwise filter and acts as the oracle
//! for every faster path: the sorted window sweep in [`pareto_set_fast`],
//! the join/leave maintenance in [`incremental`] and the all-subgroups bitset
//! evaluation in [`lattice`].

pub mod incremental;
pub mod lattice;

use std::cmp::Ordering;

use crate::error::Result;
use crate::model::{dominates, Group, OutcomeIndex, ProfileTable};

pub use incremental::{join_agent, leave_agent};
pub use lattice::SubgroupFrontiers;

/// Which code path produced a [`ParetoResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Reference,
    Fast,
    Incremental,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoResult {
    /// Pareto-optimal outcomes, ascending.
    pub optimal: Vec<OutcomeIndex>,
    /// The group the set was computed for.
    pub group: Group,
    pub algorithm: Algorithm,
}

impl ParetoResult {
    pub fn len(&self) -> usize {
        self.optimal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.optimal.is_empty()
    }

    pub fn contains(&self, outcome: OutcomeIndex) -> bool {
        self.optimal.binary_search(&outcome).is_ok()
    }

    /// True iff every outcome here is also in `other`.
    pub fn is_subset_of(&self, other: &ParetoResult) -> bool {
        self.optimal.iter().all(|&o| other.contains(o))
    }
}

/// Keeps every outcome that no other outcome dominates. O(m² · |group|).
pub fn pareto_set_naive(group: &Group, table: &ProfileTable) -> Result<ParetoResult> {
    table.check_group(group)?;
    let m = table.outcome_count();
    let mut optimal = Vec::new();
    for candidate in 0..m {
        let mut dominated = false;
        for other in 0..m {
            if dominates(other, candidate, group, table)? {
                dominated = true;
                break;
            }
        }
        if !dominated {
            optimal.push(candidate);
        }
    }
    Ok(ParetoResult {
        optimal,
        group: group.clone(),
        algorithm: Algorithm::Reference,
    })
}

/// Sort-filter sweep: outcomes are visited in descending lexicographic order
/// of their utility rows and checked against a window of undominated
/// outcomes only.
pub fn pareto_set_fast(group: &Group, table: &ProfileTable) -> Result<ParetoResult> {
    table.check_group(group)?;
    let k = group.len();
    let rows = table.group_matrix(group);
    let optimal = sweep(&rows, k, table.outcome_count());
    Ok(ParetoResult {
        optimal,
        group: group.clone(),
        algorithm: Algorithm::Fast,
    })
}

/// Default entry point for callers that do not care about the algorithm.
pub fn pareto_set(group: &Group, table: &ProfileTable) -> Result<ParetoResult> {
    pareto_set_fast(group, table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Relation {
    Dominates,
    DominatedBy,
    Equal,
    Incomparable,
}

/// Dominance relation between two utility rows of equal length.
#[inline]
pub(crate) fn relate(a: &[f64], b: &[f64]) -> Relation {
    let mut a_better = false;
    let mut b_better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            a_better = true;
        } else if x < y {
            b_better = true;
        }
        if a_better && b_better {
            return Relation::Incomparable;
        }
    }
    match (a_better, b_better) {
        (true, false) => Relation::Dominates,
        (false, true) => Relation::DominatedBy,
        (false, false) => Relation::Equal,
        (true, true) => Relation::Incomparable,
    }
}

fn lex_desc(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        // utilities are finite, so partial_cmp is total here
        match y.partial_cmp(x).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    Ordering::Equal
}

/// Window sweep over a row-major `m x k` matrix. Returns ascending indices.
pub(crate) fn sweep(rows: &[f64], k: usize, m: usize) -> Vec<OutcomeIndex> {
    let row = |o: usize| &rows[o * k..(o + 1) * k];
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| lex_desc(row(a), row(b)).then(a.cmp(&b)));

    let mut window: Vec<usize> = Vec::new();
    for &candidate in &order {
        let cand = row(candidate);
        let mut dominated = false;
        let mut evict = false;
        for &w in &window {
            match relate(row(w), cand) {
                Relation::Dominates => {
                    dominated = true;
                    break;
                }
                Relation::DominatedBy => evict = true,
                Relation::Equal | Relation::Incomparable => {}
            }
        }
        if dominated {
            continue;
        }
        if evict {
            window.retain(|&w| relate(cand, row(w)) != Relation::Dominates);
        }
        window.push(candidate);
    }
    window.sort_unstable();
    window
}
