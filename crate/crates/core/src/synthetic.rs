//! Random profile generators used by experiments and tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::model::{OutcomeSpace, PreferenceProfile, ProfileTable};

/// `agents` independent uniformly random strict orders over `m` outcomes
/// (the impartial-culture assumption).
pub fn impartial_culture<R: Rng + ?Sized>(rng: &mut R, m: usize, agents: usize) -> Result<ProfileTable> {
    let space = OutcomeSpace::new(m)?;
    let mut order: Vec<usize> = (0..m).collect();
    let profiles = (0..agents)
        .map(|a| {
            order.shuffle(rng);
            PreferenceProfile::from_order(format!("agent_{a}"), &order)
        })
        .collect::<Result<_>>()?;
    ProfileTable::new(space, profiles)
}

/// Uniform integer ratings in `1..=levels`; ties are expected.
pub fn uniform_ratings<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    agents: usize,
    levels: u32,
) -> Result<ProfileTable> {
    let space = OutcomeSpace::new(m)?;
    let profiles = (0..agents)
        .map(|a| {
            let utilities = (0..m).map(|_| f64::from(rng.gen_range(1..=levels))).collect();
            PreferenceProfile::new(format!("agent_{a}"), utilities)
        })
        .collect::<Result<_>>()?;
    ProfileTable::new(space, profiles)
}
