//! Canonical profile CSV: `outcome,label,agent_0,...,agent_{n-1}`, one row
//! per outcome. Utilities use the shortest decimal that reads back to the
//! same `f64`, so write-then-read is lossless.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::model::{OutcomeSpace, PreferenceProfile, ProfileTable};

pub fn write_profile_csv<W: Write>(table: &ProfileTable, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["outcome".to_string(), "label".to_string()];
    header.extend((0..table.agent_count()).map(|a| format!("agent_{a}")));
    wtr.write_record(&header)?;
    let labels = table.space().labels();
    for o in 0..table.outcome_count() {
        let mut row = vec![o.to_string(), labels.map_or(String::new(), |l| l[o].clone())];
        row.extend(table.profiles().iter().map(|p| p.utility(o).to_string()));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_profile_csv<R: Read>(input: R) -> Result<ProfileTable> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(input);
    let header = rdr.headers()?.clone();
    if header.len() < 2 || &header[0] != "outcome" || &header[1] != "label" {
        return Err(Error::parse(1, "expected header 'outcome,label,agent_0,...'"));
    }
    let agents: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
    let mut labels = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); agents.len()];
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let index: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, format!("bad outcome index {:?}", &record[0])))?;
        if index != labels.len() {
            return Err(Error::parse(
                line,
                format!("outcome {index} out of sequence (expected {})", labels.len()),
            ));
        }
        labels.push(record[1].to_string());
        for (a, column) in columns.iter_mut().enumerate() {
            let cell = record[a + 2].trim();
            let u: f64 = cell
                .parse()
                .ok()
                .filter(|u: &f64| u.is_finite())
                .ok_or_else(|| Error::parse(line, format!("bad utility {cell:?} for {}", agents[a])))?;
            column.push(u);
        }
    }
    if labels.is_empty() {
        return Err(Error::parse(1, "profile table has no outcomes"));
    }
    let space = if labels.iter().all(String::is_empty) {
        OutcomeSpace::new(labels.len())?
    } else {
        OutcomeSpace::with_labels(labels)?
    };
    let profiles = agents
        .into_iter()
        .zip(columns)
        .map(|(id, u)| PreferenceProfile::new(id, u))
        .collect::<Result<_>>()?;
    ProfileTable::new(space, profiles)
}
