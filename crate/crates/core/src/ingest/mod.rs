//! Loaders for the three preference-data families, plus the canonical
//! profile CSV every loader can be converted to.

pub mod additive;
pub mod canonical;
pub mod rankings;
pub mod ratings;

pub use additive::{load_additive_domain, parse_additive_domain, AdditiveDomain};
pub use canonical::{read_profile_csv, write_profile_csv};
pub use rankings::{load_rankings, parse_rankings, RankingData};
pub use ratings::{extract_complete_submatrix, load_ratings, RatingsMatrix};
