//! Sparse rating matrices and complete-submatrix extraction.
//!
//! Rating data is sparse, but dominance needs every selected agent to have
//! rated every selected outcome. [`extract_complete_submatrix`] picks a set
//! of users and the items they all rated.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{OutcomeSpace, PreferenceProfile, ProfileTable};

pub type UserId = u64;
pub type ItemId = u64;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RatingsMatrix {
    ratings: BTreeMap<UserId, BTreeMap<ItemId, f64>>,
}

impl RatingsMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, user: UserId, item: ItemId, rating: f64) -> Result<()> {
        if !rating.is_finite() {
            return Err(Error::invalid(format!("rating for ({user}, {item}) is not finite")));
        }
        if self.ratings.entry(user).or_default().insert(item, rating).is_some() {
            return Err(Error::invalid(format!("user {user} rated item {item} twice")));
        }
        Ok(())
    }

    pub fn user_count(&self) -> usize {
        self.ratings.len()
    }

    pub fn rating(&self, user: UserId, item: ItemId) -> Option<f64> {
        self.ratings.get(&user)?.get(&item).copied()
    }

    fn items(&self, user: UserId) -> impl Iterator<Item = ItemId> + '_ {
        self.ratings[&user].keys().copied()
    }
}

#[derive(Deserialize)]
struct Row {
    user: UserId,
    item: ItemId,
    rating: f64,
}

/// Reads `user,item,rating` CSV.
pub fn load_ratings<R: Read>(reader: R) -> Result<RatingsMatrix> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["user", "item", "rating"] {
        return Err(Error::parse(1, "expected header 'user,item,rating'"));
    }
    let mut matrix = RatingsMatrix::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row: Row = record
            .deserialize(Some(&headers))
            .map_err(|e| Error::parse(line, e.to_string()))?;
        matrix
            .insert(row.user, row.item, row.rating)
            .map_err(|e| Error::parse(line, e.to_string()))?;
    }
    Ok(matrix)
}

/// Chooses `target_users` users and every item all of them rated.
///
/// Starts from the pair of users sharing the most items, then repeatedly adds
/// the user keeping the largest common item set. Ties go to the smaller user
/// id. Agents come out ordered by user id and outcomes by item id, labelled
/// with those ids. Rating ties are kept.
pub fn extract_complete_submatrix(ratings: &RatingsMatrix, target_users: usize) -> Result<ProfileTable> {
    if target_users < 2 {
        return Err(Error::invalid("target_users must be at least 2"));
    }
    if target_users > ratings.user_count() {
        return Err(Error::Extraction(format!(
            "{target_users} users requested but only {} present",
            ratings.user_count()
        )));
    }

    let (a, b, shared) = best_pair(ratings)?;
    let mut chosen: BTreeSet<UserId> = [a, b].into();
    let mut common: BTreeSet<ItemId> = ratings
        .items(a)
        .filter(|&i| ratings.rating(b, i).is_some())
        .collect();
    debug_assert_eq!(common.len(), shared);

    while chosen.len() < target_users {
        let mut best: Option<(usize, UserId)> = None;
        for &user in ratings.ratings.keys() {
            if chosen.contains(&user) {
                continue;
            }
            let keep = common.iter().filter(|&&i| ratings.rating(user, i).is_some()).count();
            // keys iterate in ascending id order, so strict > keeps the smaller id on ties
            if best.is_none_or(|(k, _)| keep > k) {
                best = Some((keep, user));
            }
        }
        let (_, user) = best.expect("enough users remain");
        common.retain(|&i| ratings.rating(user, i).is_some());
        chosen.insert(user);
    }

    if common.len() < 2 {
        return Err(Error::Extraction(format!(
            "the selected {target_users} users share only {} rated item(s)",
            common.len()
        )));
    }

    let items: Vec<ItemId> = common.into_iter().collect();
    let space = OutcomeSpace::with_labels(items.iter().map(|i| i.to_string()).collect())?;
    let profiles = chosen
        .iter()
        .map(|&u| {
            let utilities = items.iter().map(|&i| ratings.ratings[&u][&i]).collect();
            PreferenceProfile::new(u.to_string(), utilities)
        })
        .collect::<Result<_>>()?;
    ProfileTable::new(space, profiles)
}

/// Pair of users with the most co-rated items, smallest ids on ties.
fn best_pair(ratings: &RatingsMatrix) -> Result<(UserId, UserId, usize)> {
    let mut by_item: BTreeMap<ItemId, Vec<UserId>> = BTreeMap::new();
    for (&user, items) in &ratings.ratings {
        for &item in items.keys() {
            by_item.entry(item).or_default().push(user);
        }
    }
    let mut shared: HashMap<(UserId, UserId), usize> = HashMap::new();
    for users in by_item.values() {
        for (i, &a) in users.iter().enumerate() {
            for &b in &users[i + 1..] {
                *shared.entry((a, b)).or_default() += 1;
            }
        }
    }
    let best = shared
        .into_iter()
        .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then(pb.cmp(pa)));
    match best {
        Some(((a, b), count)) if count >= 2 => Ok((a, b, count)),
        _ => Err(Error::Extraction("no pair of users shares at least 2 rated items".into())),
    }
}
