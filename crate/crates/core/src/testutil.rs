use rand::Rng;

use crate::model::{OutcomeSpace, PreferenceProfile, ProfileTable};

pub(crate) fn table(rows: &[&[f64]]) -> ProfileTable {
    let space = OutcomeSpace::new(rows[0].len()).unwrap();
    let profiles = rows
        .iter()
        .enumerate()
        .map(|(i, r)| PreferenceProfile::new(format!("a{i}"), r.to_vec()).unwrap())
        .collect();
    ProfileTable::new(space, profiles).unwrap()
}

/// Up to `max_m` outcomes, up to `max_agents` agents, integer utilities in `0..levels`.
pub(crate) fn random_table<R: Rng>(rng: &mut R, max_m: usize, max_agents: usize, levels: u32) -> ProfileTable {
    let m = rng.gen_range(1..=max_m);
    let agents = rng.gen_range(1..=max_agents);
    let space = OutcomeSpace::new(m).unwrap();
    let profiles = (0..agents)
        .map(|a| {
            let u = (0..m).map(|_| f64::from(rng.gen_range(0..levels))).collect();
            PreferenceProfile::new(format!("a{a}"), u).unwrap()
        })
        .collect();
    ProfileTable::new(space, profiles).unwrap()
}
