//! Strict-order ranking files.
//!
//! ```text
//! # comment
//! items: 3
//! label 1 maguro
//! label 2 toro
//! 5: 2,1,3
//! ```
//!
//! Item ids run from 1 to `items`. A ballot line `count: ids` stands for
//! `count` voters sharing that order, best first.

use std::io::BufRead;

use crate::error::{Error, Result};
use crate::model::{OutcomeSpace, PreferenceProfile, ProfileTable};
use crate::theory::Ballot;

#[derive(Debug, Clone, PartialEq)]
pub struct RankingData {
    pub space: OutcomeSpace,
    /// Orders use outcome indices (`id - 1`).
    pub ballots: Vec<Ballot>,
}

impl RankingData {
    pub fn voter_count(&self) -> u64 {
        self.ballots.iter().map(|b| b.count).sum()
    }

    /// One strict profile per voter; rank `r` maps to utility `m - r`.
    pub fn to_table(&self) -> Result<ProfileTable> {
        let mut profiles = Vec::with_capacity(self.voter_count() as usize);
        for ballot in &self.ballots {
            for _ in 0..ballot.count {
                let id = format!("voter_{}", profiles.len());
                profiles.push(PreferenceProfile::from_order(id, &ballot.order)?);
            }
        }
        ProfileTable::new(self.space.clone(), profiles)
    }
}

pub fn parse_rankings<R: BufRead>(reader: R) -> Result<RankingData> {
    let mut items: Option<usize> = None;
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut ballots = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }

        if let Some(rest) = line.strip_prefix("items:") {
            if items.is_some() {
                return Err(Error::parse(lineno, "duplicate items header"));
            }
            let m: usize = rest
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad item count {:?}", rest.trim())))?;
            if m == 0 {
                return Err(Error::parse(lineno, "item count must be positive"));
            }
            items = Some(m);
            labels = vec![None; m];
            continue;
        }

        let m = items.ok_or_else(|| Error::parse(lineno, "expected 'items: <m>' header first"))?;

        if let Some(rest) = line.strip_prefix("label ") {
            let rest = rest.trim_start();
            let (id, name) = rest
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::parse(lineno, "expected 'label <id> <name>'"))?;
            let item = parse_item(id, m, lineno)?;
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::parse(lineno, "empty label"));
            }
            labels[item] = Some(name.to_string());
            continue;
        }

        let (count, order) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(lineno, format!("unrecognised line {line:?}")))?;
        let count: u64 = count
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad ballot count {:?}", count.trim())))?;
        if count == 0 {
            return Err(Error::parse(lineno, "ballot count must be at least 1"));
        }
        let mut seen = vec![false; m];
        let mut ranked = Vec::with_capacity(m);
        for id in order.split(',') {
            let item = parse_item(id.trim(), m, lineno)?;
            if std::mem::replace(&mut seen[item], true) {
                return Err(Error::parse(lineno, format!("item {} ranked twice", item + 1)));
            }
            ranked.push(item);
        }
        if ranked.len() != m {
            return Err(Error::parse(
                lineno,
                format!("ballot ranks {} of {m} items", ranked.len()),
            ));
        }
        ballots.push(Ballot { count, order: ranked });
    }

    items.ok_or_else(|| Error::parse(0, "missing 'items: <m>' header"))?;
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.unwrap_or_else(|| (i + 1).to_string()))
        .collect();
    Ok(RankingData {
        space: OutcomeSpace::with_labels(labels)?,
        ballots,
    })
}

fn parse_item(id: &str, m: usize, lineno: usize) -> Result<usize> {
    match id.parse::<usize>() {
        Ok(v) if (1..=m).contains(&v) => Ok(v - 1),
        _ => Err(Error::parse(lineno, format!("unknown item id {id:?} (expected 1..={m})"))),
    }
}

pub fn load_rankings<R: BufRead>(reader: R) -> Result<ProfileTable> {
    parse_rankings(reader)?.to_table()
}
