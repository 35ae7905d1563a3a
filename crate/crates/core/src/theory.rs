//! Expected Pareto-set size under impartial culture, its Monte Carlo
//! cross-check, and Borda tallies for ranking datasets.
//!
//! With `m` outcomes and `n` agents whose strict orders are drawn uniformly
//! and independently, the expected number of Pareto-optimal outcomes is
//!
//! ```text
//! E(m, n) = -Σ_{i=1..m} (-1)^i C(m, i) / i^(n-1)
//! ```
//!
//! The alternating sum cancels catastrophically in floating point for large
//! `m`, so it is accumulated exactly over the common denominator
//! `lcm(1..m)^(n-1)`.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Group, OutcomeIndex, OutcomeSpace};
use crate::pareto::pareto_set_naive;
use crate::synthetic::impartial_culture;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectationQuery {
    /// Number of outcomes.
    pub m: usize,
    /// Number of agents.
    pub n: usize,
}

impl ExpectationQuery {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("domain size m must be at least 1"));
        }
        if n == 0 {
            return Err(Error::invalid("agent count n must be at least 1"));
        }
        Ok(Self { m, n })
    }
}

/// Exact expected Pareto-set size.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Expectation(pub BigRational);

impl Expectation {
    pub fn value(&self) -> &BigRational {
        &self.0
    }

    /// Nearest `f64` (ties to even).
    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }

    /// True when [`Self::to_f64`] represents the value without rounding.
    pub fn is_exact_f64(&self) -> bool {
        BigRational::from_float(self.to_f64()).as_ref() == Some(&self.0)
    }
}

impl fmt::Display for Expectation {
    /// `p/q`, or just `p` for integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

pub fn expected_pareto_count(q: ExpectationQuery) -> Result<Expectation> {
    let q = ExpectationQuery::new(q.m, q.n)?;
    let m = q.m;
    let exp = q.n - 1;

    let lcm = (1..=m).fold(BigUint::one(), |acc, i| acc.lcm(&BigUint::from(i)));
    let mut numer = BigInt::zero();
    let mut binom = BigUint::one();
    for i in 1..=m {
        binom = binom * BigUint::from(m - i + 1) / BigUint::from(i);
        let scale = num_traits::pow(&lcm / BigUint::from(i), exp);
        let term = BigInt::from_biguint(Sign::Plus, &binom * scale);
        if i % 2 == 1 {
            numer += term;
        } else {
            numer -= term;
        }
    }
    let denom = BigInt::from_biguint(Sign::Plus, num_traits::pow(lcm, exp));
    Ok(Expectation(BigRational::new(numer, denom)))
}

/// Correctly rounded conversion for values in the normal `f64` range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let negative = r.is_negative();
    let a = r.numer().magnitude();
    let b = r.denom().magnitude();
    // scale so the integer quotient has 54 or 55 significant bits
    let shift = 54 - (a.bits() as i64 - b.bits() as i64);
    let (num, den) = if shift >= 0 {
        (a << shift as usize, b.clone())
    } else {
        (a.clone(), b << (-shift) as usize)
    };
    let (quot, rem) = num.div_rem(&den);
    let sticky = !rem.is_zero();
    let quot = quot.to_u64().expect("quotient fits in 55 bits");
    let extra = 64 - quot.leading_zeros() as i64 - 53;
    let mut mantissa = quot >> extra;
    let dropped = quot & ((1u64 << extra) - 1);
    let half = 1u64 << (extra - 1);
    if dropped > half || (dropped == half && (sticky || mantissa & 1 == 1)) {
        mantissa += 1;
    }
    let value = mantissa as f64 * 2f64.powi((extra - shift) as i32);
    if negative {
        -value
    } else {
        value
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Draws `samples` impartial-culture profiles of `n` agents over `m`
/// outcomes and averages the Pareto-set size. Trial `t` uses its own stream
/// of a generator keyed by `seed`, so the estimate does not depend on thread
/// scheduling.
pub fn expected_pareto_count_mc(q: ExpectationQuery, samples: usize, seed: u64) -> Result<McEstimate> {
    let q = ExpectationQuery::new(q.m, q.n)?;
    if samples == 0 {
        return Err(Error::invalid("at least one Monte Carlo sample is required"));
    }
    let group = Group::all(q.n)?;
    let sizes = (0..samples)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let table = impartial_culture(&mut rng, q.m, q.n)?;
            Ok(pareto_set_naive(&group, &table)?.len())
        })
        .collect::<Result<Vec<usize>>>()?;

    let count = samples as f64;
    let mean = sizes.iter().map(|&s| s as f64).sum::<f64>() / count;
    let std_error = if samples > 1 {
        let var = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / (count - 1.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        std_error,
        samples,
    })
}

/// `count` voters sharing one strict, complete order (best first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ballot {
    pub count: u64,
    pub order: Vec<OutcomeIndex>,
}

impl Ballot {
    pub fn single(order: Vec<OutcomeIndex>) -> Self {
        Self { count: 1, order }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BordaTally {
    pub scores: Vec<u64>,
    pub ballots: u64,
}

impl BordaTally {
    pub const CONVENTION: &'static str = "score = m - rank";

    pub fn total(&self) -> u64 {
        self.scores.iter().sum()
    }

    /// Items by descending score; equal scores keep index order.
    pub fn ranking(&self) -> Vec<(OutcomeIndex, u64)> {
        let mut items: Vec<_> = self.scores.iter().copied().enumerate().collect();
        items.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        items
    }
}

/// Item at rank `r` (1 = best) earns `m - r` points per voter.
pub fn borda_count(ballots: &[Ballot], space: &OutcomeSpace) -> Result<BordaTally> {
    let m = space.size();
    let mut scores = vec![0u64; m];
    let mut seen = vec![false; m];
    let mut voters = 0u64;
    for (b, ballot) in ballots.iter().enumerate() {
        if ballot.count == 0 {
            return Err(Error::invalid(format!("ballot {b} has a zero count")));
        }
        if ballot.order.len() != m {
            return Err(Error::invalid(format!(
                "ballot {b} ranks {} items, expected {m}",
                ballot.order.len()
            )));
        }
        seen.fill(false);
        for &item in &ballot.order {
            if item >= m || std::mem::replace(&mut seen[item], true) {
                return Err(Error::invalid(format!(
                    "ballot {b} is not a strict ranking (item {item} repeated or unknown)"
                )));
            }
        }
        for (pos, &item) in ballot.order.iter().enumerate() {
            scores[item] += ballot.count * (m - pos - 1) as u64;
        }
        voters += ballot.count;
    }
    Ok(BordaTally {
        scores,
        ballots: voters,
    })
}
