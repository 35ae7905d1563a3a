//! Pareto sets for every subgroup of a group, computed in one pass.
//!
//! For each member and each outcome `o` we keep two bitsets over outcomes:
//! the outcomes the member rates at least as high as `o` (`weak`) and those
//! rated strictly higher (`strict`). For a subgroup `S`, `o` is dominated iff
//! `AND_{i∈S} weak_i(o)` meets `OR_{i∈S} strict_i(o)`. A depth-first walk over
//! the subset lattice shares the partial AND/OR between subgroups with a
//! common prefix of members.
//!
//! Both bitsets are prefixes of the member's descending utility order, so a
//! member only stores one bitset per distinct utility level.

use crate::error::{Error, Result};
use crate::model::{Group, OutcomeIndex, ProfileTable};

/// Largest group the lattice accepts (`2^16` subgroups).
pub const MAX_LATTICE_MEMBERS: usize = 16;

struct MemberLevels {
    /// `prefix[l]` holds the outcomes at levels `< l` (levels count down from the best).
    prefix: Vec<Vec<u64>>,
    level_of: Vec<usize>,
}

impl MemberLevels {
    fn build(utilities: &[f64], words: usize) -> Self {
        let m = utilities.len();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| utilities[b].total_cmp(&utilities[a]));

        let mut level_of = vec![0; m];
        let mut prefix = vec![vec![0u64; words]];
        let mut current = vec![0u64; words];
        let mut i = 0;
        while i < m {
            let level = prefix.len() - 1;
            let value = utilities[order[i]];
            while i < m && utilities[order[i]] == value {
                let o = order[i];
                level_of[o] = level;
                current[o / 64] |= 1 << (o % 64);
                i += 1;
            }
            prefix.push(current.clone());
        }
        Self { prefix, level_of }
    }

    fn weak(&self, o: OutcomeIndex) -> &[u64] {
        &self.prefix[self.level_of[o] + 1]
    }

    fn strict(&self, o: OutcomeIndex) -> &[u64] {
        &self.prefix[self.level_of[o]]
    }
}

/// The Pareto set of each subgroup of a group, indexed by member bitmask:
/// bit `j` of the mask selects `group.members()[j]`.
#[derive(Debug, Clone)]
pub struct SubgroupFrontiers {
    group: Group,
    outcomes: usize,
    words: usize,
    frontiers: Vec<u64>,
}

impl SubgroupFrontiers {
    pub fn compute(group: &Group, table: &ProfileTable) -> Result<Self> {
        table.check_group(group)?;
        let n = group.len();
        if n > MAX_LATTICE_MEMBERS {
            return Err(Error::invalid(format!(
                "subgroup lattice supports at most {MAX_LATTICE_MEMBERS} members, got {n}"
            )));
        }
        let m = table.outcome_count();
        let words = m.div_ceil(64);
        let levels: Vec<MemberLevels> = group
            .members()
            .iter()
            .map(|&a| MemberLevels::build(table.profile(a).utilities(), words))
            .collect();

        let masks = 1usize << n;
        let mut frontiers = vec![0u64; masks * words];
        // scratch[d] holds the AND / OR after d members have been chosen
        let mut and_stack = vec![0u64; (n + 1) * words];
        let mut or_stack = vec![0u64; (n + 1) * words];

        for o in 0..m {
            and_stack[..words].fill(!0);
            or_stack[..words].fill(0);
            let mut walk = Walk {
                levels: &levels,
                outcome: o,
                words,
                and_stack: &mut and_stack,
                or_stack: &mut or_stack,
                frontiers: &mut frontiers,
            };
            walk.visit(0, 0, 0);
        }

        Ok(Self {
            group: group.clone(),
            outcomes: m,
            words,
            frontiers,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn full_mask(&self) -> usize {
        (1 << self.group.len()) - 1
    }

    /// Members selected by `mask`, in group order.
    pub fn subgroup(&self, mask: usize) -> Result<Group> {
        let members = self
            .group
            .members()
            .iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .map(|(_, &a)| a)
            .collect();
        Group::new(members)
    }

    /// Raw frontier bitset for `mask`. The empty mask yields all outcomes.
    pub fn bits(&self, mask: usize) -> &[u64] {
        &self.frontiers[mask * self.words..(mask + 1) * self.words]
    }

    pub fn frontier(&self, mask: usize) -> Vec<OutcomeIndex> {
        let bits = self.bits(mask);
        (0..self.outcomes)
            .filter(|&o| bits[o / 64] >> (o % 64) & 1 == 1)
            .collect()
    }

    pub fn count(&self, mask: usize) -> usize {
        self.bits(mask).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `|PO(a) ∩ PO(b)|`.
    pub fn intersection_count(&self, a: usize, b: usize) -> usize {
        self.bits(a)
            .iter()
            .zip(self.bits(b))
            .map(|(x, y)| (x & y).count_ones() as usize)
            .sum()
    }
}

struct Walk<'a> {
    levels: &'a [MemberLevels],
    outcome: OutcomeIndex,
    words: usize,
    and_stack: &'a mut [u64],
    or_stack: &'a mut [u64],
    frontiers: &'a mut [u64],
}

impl Walk<'_> {
    fn visit(&mut self, depth: usize, next: usize, mask: usize) {
        let w = self.words;
        let base = depth * w;
        let dominated = (0..w).any(|i| self.and_stack[base + i] & self.or_stack[base + i] != 0);
        if !dominated {
            self.frontiers[mask * w + self.outcome / 64] |= 1 << (self.outcome % 64);
        }
        for j in next..self.levels.len() {
            let weak = self.levels[j].weak(self.outcome);
            let strict = self.levels[j].strict(self.outcome);
            let (lo, hi) = self.and_stack.split_at_mut(base + w);
            for i in 0..w {
                hi[i] = lo[base + i] & weak[i];
            }
            let (lo, hi) = self.or_stack.split_at_mut(base + w);
            for i in 0..w {
                hi[i] = lo[base + i] | strict[i];
            }
            self.visit(depth + 1, j + 1, mask | 1 << j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::pareto_set_naive;
    use crate::testutil::{random_table, table};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frontiers_match_naive_for_every_subgroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let t = random_table(&mut rng, 130, 6, 4);
            let group = Group::all(t.agent_count()).unwrap();
            let lattice = SubgroupFrontiers::compute(&group, &t).unwrap();
            for mask in 1..=lattice.full_mask() {
                let sub = lattice.subgroup(mask).unwrap();
                assert_eq!(
                    lattice.frontier(mask),
                    pareto_set_naive(&sub, &t).unwrap().optimal,
                    "mask {mask:b}"
                );
            }
        }
    }

    #[test]
    fn mask_bits_follow_member_order() {
        let t = table(&[&[3.0, 2.0, 1.0], &[1.0, 3.0, 2.0], &[1.0, 2.0, 3.0]]);
        let group = Group::new(vec![2, 0]).unwrap();
        let lattice = SubgroupFrontiers::compute(&group, &t).unwrap();
        assert_eq!(lattice.frontier(0b01), vec![2]);
        assert_eq!(lattice.frontier(0b10), vec![0]);
        assert_eq!(lattice.frontier(0b11), vec![0, 1, 2]);
        assert_eq!(lattice.frontier(0), vec![0, 1, 2]);
        assert_eq!(lattice.intersection_count(0b01, 0b11), 1);
    }

    #[test]
    fn oversized_group_is_rejected() {
        let rows: Vec<Vec<f64>> = (0..17).map(|i| vec![i as f64, 0.0]).collect();
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let t = table(&refs);
        assert!(SubgroupFrontiers::compute(&Group::all(17).unwrap(), &t).is_err());
    }
}
