//! Linear additive utility domains.
//!
//! ```text
//! issue Food: Chips|Finger-food|Catering
//! issue Drinks: Beer|Wine
//! agent alice
//! weights: 3/10, 7/10
//! eval Food: 1, 2, 4
//! eval Drinks: 0.5, 1
//! ```
//!
//! The outcome space is the Cartesian product of issue values, enumerated
//! with the last issue varying fastest. An agent's utility for an outcome is
//! `Σ_k w_k · e_k(v_k) / max_v e_k(v)`, evaluated exactly and rounded once.

use std::fmt::Write as _;
use std::io::BufRead;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{OutcomeSpace, PreferenceProfile, ProfileTable};
use crate::theory::rational_to_f64;

#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveAgent {
    pub name: String,
    pub weights: Vec<BigRational>,
    /// `evaluations[k][v]` for issue `k`, value `v`.
    pub evaluations: Vec<Vec<BigRational>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveDomain {
    pub issues: Vec<Issue>,
    pub agents: Vec<AdditiveAgent>,
}

impl AdditiveDomain {
    pub fn outcome_count(&self) -> usize {
        self.issues.iter().map(|i| i.values.len()).product()
    }

    pub fn validate(&self) -> Result<()> {
        if self.issues.is_empty() {
            return Err(Error::invalid("domain declares no issues"));
        }
        for issue in &self.issues {
            if issue.values.is_empty() {
                return Err(Error::invalid(format!("issue {:?} has no values", issue.name)));
            }
        }
        for agent in &self.agents {
            let who = &agent.name;
            if agent.weights.len() != self.issues.len() {
                return Err(Error::invalid(format!(
                    "agent {who:?} has {} weights for {} issues",
                    agent.weights.len(),
                    self.issues.len()
                )));
            }
            if agent.weights.iter().any(|w| w.is_negative()) {
                return Err(Error::invalid(format!("agent {who:?} has a negative weight")));
            }
            let sum: BigRational = agent.weights.iter().sum();
            if !sum.is_one() {
                return Err(Error::invalid(format!("agent {who:?} weights sum to {sum}, not 1")));
            }
            if agent.evaluations.len() != self.issues.len() {
                return Err(Error::invalid(format!("agent {who:?} is missing issue evaluations")));
            }
            for (issue, evals) in self.issues.iter().zip(&agent.evaluations) {
                if evals.len() != issue.values.len() {
                    return Err(Error::invalid(format!(
                        "agent {who:?} evaluates {} of {} values of issue {:?}",
                        evals.len(),
                        issue.values.len(),
                        issue.name
                    )));
                }
                if evals.iter().any(|e| e.is_negative()) {
                    return Err(Error::invalid(format!(
                        "agent {who:?} has a negative evaluation on issue {:?}",
                        issue.name
                    )));
                }
                if evals.iter().max().is_none_or(|m| m.is_zero()) {
                    return Err(Error::invalid(format!(
                        "agent {who:?} evaluates every value of issue {:?} as zero",
                        issue.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_table(&self) -> Result<ProfileTable> {
        self.validate()?;
        let sizes: Vec<usize> = self.issues.iter().map(|i| i.values.len()).collect();
        let m = self.outcome_count();

        let mut labels = Vec::with_capacity(m);
        let mut digits = vec![0usize; sizes.len()];
        let mut outcomes = Vec::with_capacity(m);
        for _ in 0..m {
            let label: Vec<&str> = digits
                .iter()
                .zip(&self.issues)
                .map(|(&v, issue)| issue.values[v].as_str())
                .collect();
            labels.push(label.join("|"));
            outcomes.push(digits.clone());
            for k in (0..sizes.len()).rev() {
                digits[k] += 1;
                if digits[k] < sizes[k] {
                    break;
                }
                digits[k] = 0;
            }
        }

        let profiles = self
            .agents
            .iter()
            .map(|agent| {
                // per-issue, per-value contribution w_k * e / max e
                let parts: Vec<Vec<BigRational>> = agent
                    .weights
                    .iter()
                    .zip(&agent.evaluations)
                    .map(|(w, evals)| {
                        let max = evals.iter().max().expect("validated non-empty").clone();
                        evals.iter().map(|e| w * e / &max).collect()
                    })
                    .collect();
                let utilities = outcomes
                    .iter()
                    .map(|digits| {
                        let total: BigRational = digits.iter().zip(&parts).map(|(&v, p)| &p[v]).sum();
                        rational_to_f64(&total)
                    })
                    .collect();
                PreferenceProfile::new(agent.name.clone(), utilities)
            })
            .collect::<Result<_>>()?;
        ProfileTable::new(OutcomeSpace::with_labels(labels)?, profiles)
    }

    /// Serializes back into the text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for issue in &self.issues {
            let _ = writeln!(out, "issue {}: {}", issue.name, issue.values.join("|"));
        }
        for agent in &self.agents {
            let _ = writeln!(out, "agent {}", agent.name);
            let w: Vec<String> = agent.weights.iter().map(|w| w.to_string()).collect();
            let _ = writeln!(out, "weights: {}", w.join(","));
            for (issue, evals) in self.issues.iter().zip(&agent.evaluations) {
                let e: Vec<String> = evals.iter().map(|e| e.to_string()).collect();
                let _ = writeln!(out, "eval {}: {}", issue.name, e.join(","));
            }
        }
        out
    }

    /// Random domain with integer evaluations in `1..=10` and random
    /// rational weights; ties between outcomes are common.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, value_counts: &[usize], agents: usize) -> Self {
        let issues = value_counts
            .iter()
            .enumerate()
            .map(|(k, &n)| Issue {
                name: format!("issue{k}"),
                values: (0..n).map(|v| format!("v{k}_{v}")).collect(),
            })
            .collect();
        let agents = (0..agents)
            .map(|a| {
                let raw: Vec<u32> = value_counts.iter().map(|_| rng.gen_range(1..=20)).collect();
                let total: u32 = raw.iter().sum();
                AdditiveAgent {
                    name: format!("agent_{a}"),
                    weights: raw.iter().map(|&w| ratio(w.into(), total.into())).collect(),
                    evaluations: value_counts
                        .iter()
                        .map(|&n| (0..n).map(|_| ratio(rng.gen_range(1..=10), 1)).collect())
                        .collect(),
                }
            })
            .collect();
        Self { issues, agents }
    }
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// Parses `3/10`, `0.25`, `4` or `-1.5` exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int}{frac}").parse().ok()?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    let value = BigRational::new(digits, scale);
    Some(if negative { -value } else { value })
}

fn parse_list(s: &str, lineno: usize) -> Result<Vec<BigRational>> {
    s.split(',')
        .map(|t| parse_rational(t).ok_or_else(|| Error::parse(lineno, format!("bad number {:?}", t.trim()))))
        .collect()
}

pub fn parse_additive_domain<R: BufRead>(reader: R) -> Result<AdditiveDomain> {
    let mut issues: Vec<Issue> = Vec::new();
    let mut agents: Vec<AdditiveAgent> = Vec::new();
    let mut started_at = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("issue ") {
            if !agents.is_empty() {
                return Err(Error::parse(lineno, "issues must be declared before agents"));
            }
            let (name, values) = rest
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, "expected 'issue <name>: v1|v2|...'"))?;
            let name = name.trim().to_string();
            if issues.iter().any(|i| i.name == name) {
                return Err(Error::parse(lineno, format!("issue {name:?} declared twice")));
            }
            let values: Vec<String> = values.split('|').map(|v| v.trim().to_string()).collect();
            if values.iter().any(String::is_empty) {
                return Err(Error::parse(lineno, "empty issue value"));
            }
            for (i, v) in values.iter().enumerate() {
                if values[..i].contains(v) {
                    return Err(Error::parse(lineno, format!("value {v:?} listed twice")));
                }
            }
            issues.push(Issue { name, values });
        } else if let Some(name) = line.strip_prefix("agent ") {
            agents.push(AdditiveAgent {
                name: name.trim().to_string(),
                weights: Vec::new(),
                evaluations: vec![Vec::new(); issues.len()],
            });
            started_at.push(lineno);
        } else if let Some(rest) = line.strip_prefix("weights:") {
            let agent = agents
                .last_mut()
                .ok_or_else(|| Error::parse(lineno, "weights before any agent"))?;
            if !agent.weights.is_empty() {
                return Err(Error::parse(lineno, "weights given twice"));
            }
            agent.weights = parse_list(rest, lineno)?;
        } else if let Some(rest) = line.strip_prefix("eval ") {
            let agent = agents
                .last_mut()
                .ok_or_else(|| Error::parse(lineno, "eval before any agent"))?;
            let (name, values) = rest
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, "expected 'eval <issue>: e1,...'"))?;
            let k = issues
                .iter()
                .position(|i| i.name == name.trim())
                .ok_or_else(|| Error::parse(lineno, format!("unknown issue {:?}", name.trim())))?;
            if !agent.evaluations[k].is_empty() {
                return Err(Error::parse(lineno, format!("issue {:?} evaluated twice", name.trim())));
            }
            agent.evaluations[k] = parse_list(values, lineno)?;
        } else {
            return Err(Error::parse(lineno, format!("unrecognised line {line:?}")));
        }
    }

    let domain = AdditiveDomain { issues, agents };
    // attribute semantic errors to the agent's block
    for (agent, &line) in domain.agents.iter().zip(&started_at) {
        let single = AdditiveDomain {
            issues: domain.issues.clone(),
            agents: vec![agent.clone()],
        };
        single.validate().map_err(|e| match e {
            Error::InvalidInput(msg) => Error::parse(line, msg),
            other => other,
        })?;
    }
    domain.validate()?;
    Ok(domain)
}

pub fn load_additive_domain<R: BufRead>(reader: R) -> Result<ProfileTable> {
    parse_additive_domain(reader)?.to_table()
}
