//! Domain types: bundles of goods, exact values, valuation oracles, profiles
//! and allocations.

mod bundle;
mod profile;
mod valuation;
mod value;

pub use bundle::{binomial, Bundle, Goods, Subsets, SubsetsOfSize, MAX_GOODS};
pub use profile::{Allocation, Profile};
pub use valuation::{Valuation, ValuationKind, MAX_TABLE_GOODS};
pub use value::Value;
