//! Pareto-optimal outcome sets for groups and subgroups of agents with
//! complete preferences over a finite outcome space.
//!
//! * [`model`]: outcome spaces, profiles, groups, dominance
//! * [`pareto`]: reference, sweep, incremental and all-subgroup Pareto sets
//! * [`subgroup`]: group sampling and the subgroup ratio / false-positive scan
//! * [`theory`]: expected Pareto-set size under impartial culture, Borda tallies
//! * [`ingest`]: ranking, rating and additive-domain loaders, canonical CSV

pub mod error;
pub mod ingest;
pub mod model;
pub mod pareto;
pub mod subgroup;
pub mod synthetic;
pub mod theory;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use model::{dominates, is_strict, Group, OutcomeSpace, PreferenceProfile, ProfileTable};
pub use pareto::{pareto_set, pareto_set_fast, pareto_set_naive, Algorithm, ParetoResult};
