//! Bottom-up experiments: sample groups from a profile pool, evaluate every
//! subgroup of each, and aggregate how much of the group's Pareto set the
//! subgroups already find.
//!
//! For a subgroup `S` of a group `G`:
//!
//! * ratio = `|PO(S) ∩ PO(G)| / |PO(G)|`
//! * false-positive rate = `|PO(S) \ PO(G)| / |PO(S)|`
//!
//! Means for a `(group size, subgroup size)` cell are taken uniformly over
//! all (group, subgroup) pairs of that cell.

use std::collections::HashSet;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Group, ProfileTable};
use crate::pareto::lattice::MAX_LATTICE_MEMBERS;
use crate::pareto::{pareto_set_fast, SubgroupFrontiers};
use crate::theory::{expected_pareto_count, rational_to_f64, ExpectationQuery};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub group_sizes: Vec<usize>,
    pub max_groups_per_size: usize,
    pub rng_seed: u64,
    pub min_samples_flag: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            group_sizes: vec![5, 7, 9],
            max_groups_per_size: 1000,
            rng_seed: 0,
            min_samples_flag: 30,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self, available: usize) -> Result<()> {
        if available == 0 {
            return Err(Error::invalid("profile table is empty"));
        }
        if self.group_sizes.is_empty() {
            return Err(Error::invalid("no group sizes configured"));
        }
        if self.max_groups_per_size == 0 {
            return Err(Error::invalid("max_groups_per_size must be at least 1"));
        }
        for &n in &self.group_sizes {
            if n < 2 || n > available {
                return Err(Error::invalid(format!(
                    "group size {n} outside 2..={available} (available profiles)"
                )));
            }
            if n > MAX_LATTICE_MEMBERS {
                return Err(Error::invalid(format!(
                    "group size {n} exceeds the supported maximum of {MAX_LATTICE_MEMBERS}"
                )));
            }
        }
        Ok(())
    }
}

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `min(cap, C(available, n))` distinct `n`-subsets of `0..available`.
///
/// When every subset fits under the cap they are enumerated in lexicographic
/// order; otherwise subsets are drawn uniformly without replacement from a
/// generator keyed by `(seed, n)`.
pub fn sample_groups(available: usize, n: usize, cap: usize, seed: u64) -> Result<Vec<Group>> {
    if n < 2 || n > available {
        return Err(Error::invalid(format!(
            "cannot form groups of {n} from {available} profiles"
        )));
    }
    if cap == 0 {
        return Err(Error::invalid("group cap must be at least 1"));
    }
    let total = binomial(available, n);
    if matches!(total, Some(t) if t <= cap as u128) {
        return Ok(combinations(available, n)
            .map(|c| Group::new(c).expect("combinations are distinct"))
            .collect());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    let mut seen = HashSet::with_capacity(cap);
    let mut groups = Vec::with_capacity(cap);
    while groups.len() < cap {
        let mut members = rand::seq::index::sample(&mut rng, available, n).into_vec();
        members.sort_unstable();
        if seen.insert(members.clone()) {
            groups.push(Group::new(members)?);
        }
    }
    Ok(groups)
}

/// Lexicographic `k`-combinations of `0..n`.
fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = Some((0..k).collect());
    std::iter::from_fn(move || {
        let out = current.take()?;
        let mut next = out.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                current = Some(next);
                break;
            }
        }
        Some(out)
    })
}

fn check_nested(sub: &Group, full: &Group) -> Result<()> {
    if !sub.is_subgroup_of(full) {
        return Err(Error::invalid("subgroup has members outside the full group"));
    }
    Ok(())
}

/// `|PO(sub) ∩ PO(full)| / |PO(full)|`.
pub fn subgroup_ratio(sub: &Group, full: &Group, table: &ProfileTable) -> Result<f64> {
    check_nested(sub, full)?;
    let po_sub = pareto_set_fast(sub, table)?;
    let po_full = pareto_set_fast(full, table)?;
    let shared = po_sub.optimal.iter().filter(|&&o| po_full.contains(o)).count();
    Ok(shared as f64 / po_full.len() as f64)
}

/// `|PO(sub) \ PO(full)| / |PO(sub)|`.
pub fn false_positive_rate(sub: &Group, full: &Group, table: &ProfileTable) -> Result<f64> {
    check_nested(sub, full)?;
    let po_sub = pareto_set_fast(sub, table)?;
    let po_full = pareto_set_fast(full, table)?;
    let lost = po_sub.optimal.iter().filter(|&&o| !po_full.contains(o)).count();
    Ok(lost as f64 / po_sub.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgroupStats {
    pub group_size: usize,
    pub subgroup_size: usize,
    pub mean_ratio: f64,
    pub mean_false_positive_rate: f64,
    /// Number of sampled groups behind the means.
    pub sample_count: usize,
    pub flagged_low_sample: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSizeStats {
    pub group_size: usize,
    pub sample_count: usize,
    /// Mean of `|PO(G)| / m` over sampled groups.
    pub mean_pareto_fraction: f64,
    pub pareto_fraction_std_error: f64,
    /// `E(m, n) / m` under impartial culture.
    pub theoretical_pareto_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub subgroups: Vec<SubgroupStats>,
    pub group_sizes: Vec<GroupSizeStats>,
}

impl ScanReport {
    pub fn cell(&self, group_size: usize, subgroup_size: usize) -> Option<&SubgroupStats> {
        self.subgroups
            .iter()
            .find(|s| s.group_size == group_size && s.subgroup_size == subgroup_size)
    }

    pub fn group_size(&self, group_size: usize) -> Option<&GroupSizeStats> {
        self.group_sizes.iter().find(|s| s.group_size == group_size)
    }

    /// Two header-led sections separated by an empty line: per-cell subgroup
    /// metrics, then per-group-size Pareto fractions.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "group_size,subgroup_size,mean_ratio,mean_false_positive_rate,sample_count,low_sample_flag"
        )?;
        for s in &self.subgroups {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                s.group_size,
                s.subgroup_size,
                s.mean_ratio,
                s.mean_false_positive_rate,
                s.sample_count,
                s.flagged_low_sample
            )?;
        }
        writeln!(out)?;
        writeln!(out, "group_size,empirical_pareto_fraction,theoretical_pareto_fraction")?;
        for g in &self.group_sizes {
            writeln!(
                out,
                "{},{},{}",
                g.group_size, g.mean_pareto_fraction, g.theoretical_pareto_fraction
            )?;
        }
        Ok(())
    }
}

/// Per-group sums for each subgroup size `2..n`.
struct GroupTally {
    full_count: usize,
    /// `Σ_S |PO(S) ∩ PO(G)|` per subgroup size.
    shared: Vec<u64>,
    /// `Σ_S false-positive rate` per subgroup size, summed in mask order.
    false_positive: Vec<f64>,
}

fn tally_group(group: &Group, table: &ProfileTable) -> Result<GroupTally> {
    let n = group.len();
    let lattice = SubgroupFrontiers::compute(group, table)?;
    let full = lattice.full_mask();
    let mut shared = vec![0u64; n];
    let mut false_positive = vec![0f64; n];
    for mask in 1..full {
        let k = mask.count_ones() as usize;
        if k < 2 {
            continue;
        }
        let po = lattice.count(mask);
        let both = lattice.intersection_count(mask, full);
        shared[k] += both as u64;
        false_positive[k] += (po - both) as f64 / po as f64;
    }
    Ok(GroupTally {
        full_count: lattice.count(full),
        shared,
        false_positive,
    })
}

/// Samples groups for every configured size, evaluates all subgroups of
/// sizes `2..n` in each, and aggregates the metrics.
///
/// Groups are processed in parallel but merged in sampling order, so the
/// report is bit-identical across runs and thread counts.
pub fn run_scan(config: &ScanConfig, table: &ProfileTable) -> Result<ScanReport> {
    let available = table.agent_count();
    config.validate(available)?;
    let m = table.outcome_count();
    let mut subgroups = Vec::new();
    let mut group_sizes = Vec::new();

    for &n in &config.group_sizes {
        let groups = sample_groups(available, n, config.max_groups_per_size, config.rng_seed)?;
        let tallies = groups
            .par_iter()
            .map(|g| tally_group(g, table))
            .collect::<Result<Vec<_>>>()?;
        let samples = tallies.len();
        let flagged = samples < config.min_samples_flag;

        for k in 2..n {
            let pairs = samples as u128 * binomial(n, k).expect("n is small");
            let ratio_sum = tallies.iter().fold(BigRational::zero(), |acc, t| {
                acc + BigRational::new(BigInt::from(t.shared[k]), BigInt::from(t.full_count))
            });
            let mean_ratio = rational_to_f64(&(ratio_sum / BigRational::from_integer(BigInt::from(pairs))));
            let fp_sum: f64 = tallies.iter().map(|t| t.false_positive[k]).sum();
            subgroups.push(SubgroupStats {
                group_size: n,
                subgroup_size: k,
                mean_ratio,
                mean_false_positive_rate: fp_sum / pairs as f64,
                sample_count: samples,
                flagged_low_sample: flagged,
            });
        }

        let fractions: Vec<f64> = tallies.iter().map(|t| t.full_count as f64 / m as f64).collect();
        let total: usize = tallies.iter().map(|t| t.full_count).sum();
        let mean = total as f64 / (samples * m) as f64;
        let std_error = if samples > 1 {
            let var = fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
            (var / samples as f64).sqrt()
        } else {
            0.0
        };
        let expected = expected_pareto_count(ExpectationQuery::new(m, n)?)?;
        let theoretical = rational_to_f64(&(expected.0 / BigRational::from_integer(BigInt::from(m))));
        group_sizes.push(GroupSizeStats {
            group_size: n,
            sample_count: samples,
            mean_pareto_fraction: mean,
            pareto_fraction_std_error: std_error,
            theoretical_pareto_fraction: theoretical,
        });
    }

    Ok(ScanReport {
        subgroups,
        group_sizes,
    })
}
