//! Maintaining a Pareto set while agents join or leave a group.
//!
//! With strict profiles the optimal set can only grow when an agent joins
//! and only shrink when one leaves, so each update re-tests a fraction of
//! the outcomes. Any tie in the affected profiles forfeits that guarantee and
//! the update falls back to a full recomputation.

use super::{pareto_set_fast, relate, Algorithm, ParetoResult, Relation};
use crate::error::{Error, Result};
use crate::model::{AgentIndex, ProfileTable};

fn check_current(current: &ParetoResult, table: &ProfileTable) -> Result<()> {
    table.check_group(&current.group)?;
    if let Some(&o) = current.optimal.last() {
        table.space().check_outcome(o)?;
    }
    Ok(())
}

/// Pareto set of `current.group ∪ {new_agent}`.
pub fn join_agent(
    current: &ParetoResult,
    new_agent: AgentIndex,
    table: &ProfileTable,
) -> Result<ParetoResult> {
    check_current(current, table)?;
    table.check_agent(new_agent)?;
    let group = current.group.with_member(new_agent)?;
    if !table.all_strict(&group) {
        return pareto_set_fast(&group, table);
    }

    let k = group.len();
    let rows = table.group_matrix(&group);
    let row = |o: usize| &rows[o * k..(o + 1) * k];
    let m = table.outcome_count();

    // Previously optimal outcomes stay optimal; only the rest can be promoted.
    let mut optimal = current.optimal.clone();
    for candidate in 0..m {
        if current.contains(candidate) {
            continue;
        }
        let cand = row(candidate);
        let dominated = (0..m).any(|o| relate(row(o), cand) == Relation::Dominates);
        if !dominated {
            optimal.push(candidate);
        }
    }
    optimal.sort_unstable();
    Ok(ParetoResult {
        optimal,
        group,
        algorithm: Algorithm::Incremental,
    })
}

/// Pareto set of `current.group \ {leaving}`.
pub fn leave_agent(
    current: &ParetoResult,
    leaving: AgentIndex,
    table: &ProfileTable,
) -> Result<ParetoResult> {
    check_current(current, table)?;
    if !current.group.contains(leaving) {
        return Err(Error::invalid(format!("agent {leaving} is not a member of the group")));
    }
    let group = current.group.without_member(leaving)?;
    if !table.all_strict(&current.group) {
        return pareto_set_fast(&group, table);
    }

    let k = group.len();
    let rows = table.group_matrix(&group);
    let row = |o: usize| &rows[o * k..(o + 1) * k];

    // The new set is a subset of the old one, and anything dominated is
    // dominated by a member of the new set, so survivors only need checking
    // against each other.
    let optimal = current
        .optimal
        .iter()
        .copied()
        .filter(|&c| {
            !current
                .optimal
                .iter()
                .any(|&o| relate(row(o), row(c)) == Relation::Dominates)
        })
        .collect();
    Ok(ParetoResult {
        optimal,
        group,
        algorithm: Algorithm::Incremental,
    })
}
