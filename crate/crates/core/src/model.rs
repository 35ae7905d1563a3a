//! Outcome spaces, agent preference profiles, groups and the dominance
//! relation everything else is built on.
//!
//! Preferences are stored as utility vectors: `utilities[o] > utilities[o']`
//! means the agent strictly prefers `o`, equal values mean indifference.
//! Equality is exact; no epsilon is ever applied.

use std::borrow::Cow;
use std::collections::HashSet;

use crate::error::{Error, Result};

/// Index of an outcome inside an [`OutcomeSpace`].
pub type OutcomeIndex = usize;

/// Index of an agent inside a [`ProfileTable`].
pub type AgentIndex = usize;

/// The finite set of alternatives a group decides over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSpace {
    size: usize,
    labels: Option<Vec<String>>,
}

impl OutcomeSpace {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("outcome space must contain at least one outcome"));
        }
        Ok(Self { size, labels: None })
    }

    /// Builds a labelled space; the size is the number of labels.
    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("outcome space must contain at least one outcome"));
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::invalid(format!("duplicate outcome label {label:?}")));
            }
        }
        Ok(Self {
            size: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of `outcome`, falling back to its index when the space is unlabelled.
    pub fn label(&self, outcome: OutcomeIndex) -> Cow<'_, str> {
        match &self.labels {
            Some(labels) => Cow::Borrowed(labels[outcome].as_str()),
            None => Cow::Owned(outcome.to_string()),
        }
    }

    pub fn check_outcome(&self, outcome: OutcomeIndex) -> Result<()> {
        if outcome >= self.size {
            return Err(Error::invalid(format!(
                "outcome index {outcome} out of range for a space of {} outcomes",
                self.size
            )));
        }
        Ok(())
    }
}

/// One agent's complete preference over an outcome space.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceProfile {
    agent_id: String,
    utilities: Vec<f64>,
}

impl PreferenceProfile {
    pub fn new(agent_id: impl Into<String>, utilities: Vec<f64>) -> Result<Self> {
        let agent_id = agent_id.into();
        if let Some(pos) = utilities.iter().position(|u| !u.is_finite()) {
            return Err(Error::invalid(format!(
                "agent {agent_id:?}: utility for outcome {pos} is not finite"
            )));
        }
        Ok(Self { agent_id, utilities })
    }

    /// Builds a profile from a per-outcome rank vector (1 = best).
    /// Rank `r` maps to utility `size - r`, so equal ranks stay tied.
    pub fn from_ranks(agent_id: impl Into<String>, ranks: &[usize]) -> Result<Self> {
        let size = ranks.len();
        if let Some(&bad) = ranks.iter().find(|&&r| r == 0 || r > size) {
            return Err(Error::invalid(format!("rank {bad} outside 1..={size}")));
        }
        let utilities = ranks.iter().map(|&r| (size - r) as f64).collect();
        Self::new(agent_id, utilities)
    }

    /// Builds a strict profile from an ordering of outcomes, best first.
    pub fn from_order(agent_id: impl Into<String>, order: &[OutcomeIndex]) -> Result<Self> {
        let size = order.len();
        let mut utilities = vec![f64::NAN; size];
        for (pos, &outcome) in order.iter().enumerate() {
            if outcome >= size || !utilities[outcome].is_nan() {
                return Err(Error::invalid(format!(
                    "ordering is not a permutation of 0..{size} (offending entry {outcome})"
                )));
            }
            utilities[outcome] = (size - pos - 1) as f64;
        }
        Self::new(agent_id, utilities)
    }

    pub fn agent_id(&self) -> &str {
        &self.agent_id
    }

    pub fn utilities(&self) -> &[f64] {
        &self.utilities
    }

    pub fn utility(&self, outcome: OutcomeIndex) -> f64 {
        self.utilities[outcome]
    }

    pub fn len(&self) -> usize {
        self.utilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utilities.is_empty()
    }

    /// True iff no two outcomes share a utility value.
    pub fn is_strict(&self) -> bool {
        let mut sorted = self.utilities.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.windows(2).all(|w| w[0] != w[1])
    }
}

pub fn is_strict(profile: &PreferenceProfile) -> bool {
    profile.is_strict()
}

/// Distinct agent indices into a shared [`ProfileTable`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Group {
    members: Vec<AgentIndex>,
}

impl Group {
    pub fn new(members: Vec<AgentIndex>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid("a group needs at least one member"));
        }
        let mut seen = HashSet::with_capacity(members.len());
        for &m in &members {
            if !seen.insert(m) {
                return Err(Error::invalid(format!("agent {m} listed twice in group")));
            }
        }
        Ok(Self { members })
    }

    /// The group `{0, 1, ..., count - 1}`.
    pub fn all(count: usize) -> Result<Self> {
        Self::new((0..count).collect())
    }

    pub fn members(&self) -> &[AgentIndex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, agent: AgentIndex) -> bool {
        self.members.contains(&agent)
    }

    /// Set inclusion: every member of `self` is a member of `other`.
    pub fn is_subgroup_of(&self, other: &Group) -> bool {
        self.members.iter().all(|m| other.contains(*m))
    }

    pub fn is_proper_subgroup_of(&self, other: &Group) -> bool {
        self.len() < other.len() && self.is_subgroup_of(other)
    }

    /// Members as a sorted vector, independent of insertion order.
    pub fn signature(&self) -> Vec<AgentIndex> {
        let mut sig = self.members.clone();
        sig.sort_unstable();
        sig
    }

    pub fn same_members(&self, other: &Group) -> bool {
        self.signature() == other.signature()
    }

    pub fn with_member(&self, agent: AgentIndex) -> Result<Self> {
        if self.contains(agent) {
            return Err(Error::invalid(format!("agent {agent} is already a member")));
        }
        let mut members = self.members.clone();
        members.push(agent);
        Ok(Self { members })
    }

    pub fn without_member(&self, agent: AgentIndex) -> Result<Self> {
        if !self.contains(agent) {
            return Err(Error::invalid(format!("agent {agent} is not a member")));
        }
        if self.len() == 1 {
            return Err(Error::invalid("removing the last member leaves an empty group"));
        }
        Ok(Self {
            members: self.members.iter().copied().filter(|&m| m != agent).collect(),
        })
    }
}

/// A set of profiles over one outcome space.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    space: OutcomeSpace,
    profiles: Vec<PreferenceProfile>,
}

impl ProfileTable {
    pub fn new(space: OutcomeSpace, profiles: Vec<PreferenceProfile>) -> Result<Self> {
        for p in &profiles {
            if p.len() != space.size() {
                return Err(Error::consistency(format!(
                    "agent {:?} has {} utilities but the outcome space has {} outcomes",
                    p.agent_id(),
                    p.len(),
                    space.size()
                )));
            }
        }
        Ok(Self { space, profiles })
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn profiles(&self) -> &[PreferenceProfile] {
        &self.profiles
    }

    pub fn profile(&self, agent: AgentIndex) -> &PreferenceProfile {
        &self.profiles[agent]
    }

    pub fn agent_count(&self) -> usize {
        self.profiles.len()
    }

    pub fn outcome_count(&self) -> usize {
        self.space.size()
    }

    pub fn utility(&self, agent: AgentIndex, outcome: OutcomeIndex) -> f64 {
        self.profiles[agent].utilities[outcome]
    }

    pub fn check_agent(&self, agent: AgentIndex) -> Result<()> {
        if agent >= self.profiles.len() {
            return Err(Error::invalid(format!(
                "agent index {agent} out of range ({} profiles available)",
                self.profiles.len()
            )));
        }
        Ok(())
    }

    pub fn check_group(&self, group: &Group) -> Result<()> {
        group.members().iter().try_for_each(|&a| self.check_agent(a))
    }

    /// True iff every member of `group` has a strict profile.
    pub fn all_strict(&self, group: &Group) -> bool {
        group.members().iter().all(|&a| self.profiles[a].is_strict())
    }

    /// Row-major `outcomes x members` utility matrix for `group`.
    pub(crate) fn group_matrix(&self, group: &Group) -> Vec<f64> {
        let k = group.len();
        let mut rows = vec![0.0; self.outcome_count() * k];
        for (col, &agent) in group.members().iter().enumerate() {
            for (o, &u) in self.profiles[agent].utilities.iter().enumerate() {
                rows[o * k + col] = u;
            }
        }
        rows
    }
}

/// True iff every member weakly prefers `o` to `o_prime` and at least one
/// member strictly prefers it.
pub fn dominates(
    o: OutcomeIndex,
    o_prime: OutcomeIndex,
    group: &Group,
    table: &ProfileTable,
) -> Result<bool> {
    table.space().check_outcome(o)?;
    table.space().check_outcome(o_prime)?;
    table.check_group(group)?;
    let mut strict = false;
    for &agent in group.members() {
        let (a, b) = (table.utility(agent, o), table.utility(agent, o_prime));
        if a < b {
            return Ok(false);
        }
        strict |= a > b;
    }
    Ok(strict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::table;
    use proptest::prelude::*;

    #[test]
    fn single_agent_dominance() {
        let t = table(&[&[3.0, 1.0, 2.0]]);
        let g = Group::all(1).unwrap();
        assert!(dominates(0, 1, &g, &t).unwrap());
        assert!(!dominates(1, 0, &g, &t).unwrap());
    }

    #[test]
    fn total_conflict_has_no_dominance() {
        let t = table(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let g = Group::all(2).unwrap();
        assert!(!dominates(0, 1, &g, &t).unwrap());
        assert!(!dominates(1, 0, &g, &t).unwrap());
    }

    #[test]
    fn two_agent_dominance() {
        let t = table(&[&[3.0, 2.0, 1.0], &[1.0, 3.0, 2.0]]);
        let g = Group::all(2).unwrap();
        assert!(dominates(1, 2, &g, &t).unwrap());
        assert!(!dominates(0, 2, &g, &t).unwrap());
        assert!(!dominates(0, 1, &g, &t).unwrap());
    }

    #[test]
    fn nothing_dominates_itself() {
        let t = table(&[&[3.0, 2.0, 1.0], &[1.0, 3.0, 2.0]]);
        let g = Group::all(2).unwrap();
        for o in 0..3 {
            assert!(!dominates(o, o, &g, &t).unwrap());
        }
    }

    #[test]
    fn dominance_rejects_bad_indices() {
        let t = table(&[&[3.0, 2.0]]);
        let g = Group::all(1).unwrap();
        assert!(matches!(dominates(0, 2, &g, &t), Err(Error::InvalidInput(_))));
        let g = Group::new(vec![1]).unwrap();
        assert!(matches!(dominates(0, 1, &g, &t), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn table_rejects_mismatched_sizes() {
        let space = OutcomeSpace::new(3).unwrap();
        let profiles = vec![
            PreferenceProfile::new("a", vec![1.0, 2.0, 3.0]).unwrap(),
            PreferenceProfile::new("b", vec![1.0, 2.0]).unwrap(),
        ];
        assert!(matches!(
            ProfileTable::new(space, profiles),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn strictness() {
        let p = |u: Vec<f64>| PreferenceProfile::new("a", u).unwrap();
        assert!(is_strict(&p(vec![3.0, 1.0, 2.0])));
        assert!(!is_strict(&p(vec![2.0, 2.0, 1.0])));
        assert!(is_strict(&p(vec![0.5, 0.5000001, 0.4])));
        assert!(!is_strict(&p(vec![0.0, -0.0])));
    }

    #[test]
    fn profile_rejects_non_finite() {
        assert!(PreferenceProfile::new("a", vec![1.0, f64::NAN]).is_err());
        assert!(PreferenceProfile::new("a", vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn rank_conversion() {
        let p = PreferenceProfile::from_ranks("a", &[2, 1, 3]).unwrap();
        assert_eq!(p.utilities(), &[1.0, 2.0, 0.0]);
        let tied = PreferenceProfile::from_ranks("a", &[1, 1, 3]).unwrap();
        assert_eq!(tied.utilities(), &[2.0, 2.0, 0.0]);
        let p = PreferenceProfile::from_order("a", &[1, 0, 2]).unwrap();
        assert_eq!(p.utilities(), &[1.0, 2.0, 0.0]);
        assert!(PreferenceProfile::from_order("a", &[1, 1, 2]).is_err());
    }

    #[test]
    fn space_invariants() {
        assert!(OutcomeSpace::new(0).is_err());
        assert!(OutcomeSpace::with_labels(vec!["x".into(), "x".into()]).is_err());
        let s = OutcomeSpace::with_labels(vec!["x".into(), "y".into()]).unwrap();
        assert_eq!(s.size(), 2);
        assert_eq!(s.label(1), "y");
        assert_eq!(OutcomeSpace::new(3).unwrap().label(2), "2");
    }

    #[test]
    fn group_invariants() {
        assert!(Group::new(vec![]).is_err());
        assert!(Group::new(vec![1, 1]).is_err());
        let g = Group::new(vec![2, 0]).unwrap();
        let h = Group::new(vec![0, 1, 2]).unwrap();
        assert!(g.is_subgroup_of(&h));
        assert!(g.is_proper_subgroup_of(&h));
        assert!(!h.is_subgroup_of(&g));
        assert!(h.is_subgroup_of(&h));
        assert!(!h.is_proper_subgroup_of(&h));
        assert!(g.with_member(0).is_err());
        assert!(Group::new(vec![4]).unwrap().without_member(4).is_err());
    }

    fn small_instance() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1usize..6, 2usize..8).prop_flat_map(|(agents, outcomes)| {
            prop::collection::vec(
                prop::collection::vec((0u8..4).prop_map(f64::from), outcomes),
                agents,
            )
        })
    }

    fn to_table(rows: &[Vec<f64>]) -> ProfileTable {
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        table(&refs)
    }

    proptest! {
        #[test]
        fn dominance_is_antisymmetric(rows in small_instance()) {
            let t = to_table(&rows);
            let g = Group::all(t.agent_count()).unwrap();
            let m = t.outcome_count();
            for a in 0..m {
                for b in 0..m {
                    prop_assert!(!(dominates(a, b, &g, &t).unwrap() && dominates(b, a, &g, &t).unwrap()));
                }
            }
        }

        #[test]
        fn dominance_is_transitive(rows in small_instance()) {
            let t = to_table(&rows);
            let g = Group::all(t.agent_count()).unwrap();
            let m = t.outcome_count();
            for a in 0..m {
                for b in 0..m {
                    if !dominates(a, b, &g, &t).unwrap() { continue; }
                    for c in 0..m {
                        if dominates(b, c, &g, &t).unwrap() {
                            prop_assert!(dominates(a, c, &g, &t).unwrap());
                        }
                    }
                }
            }
        }

        #[test]
        fn dominance_survives_agreeing_newcomer(rows in small_instance(), extra in prop::collection::vec(0u8..4, 8)) {
            let t = to_table(&rows);
            let m = t.outcome_count();
            let g = Group::all(t.agent_count()).unwrap();
            let mut grown = rows.clone();
            grown.push(extra[..m].iter().map(|&x| f64::from(x)).collect());
            let t2 = to_table(&grown);
            let g2 = g.with_member(rows.len()).unwrap();
            for a in 0..m {
                for b in 0..m {
                    if dominates(a, b, &g, &t).unwrap() && t2.utility(rows.len(), a) >= t2.utility(rows.len(), b) {
                        prop_assert!(dominates(a, b, &g2, &t2).unwrap());
                    }
                }
            }
        }
    }
}
