//! Exact-arithmetic EFX allocation of indivisible goods.
//!
//! Valuations are exact ([`Value`] wraps a big rational) and are only ever
//! compared, never rounded. The crate provides
//!
//! * the domain model ([`model`]) and the strict lift of weak valuations
//!   ([`strictify`]),
//! * EFX and valuation-class predicates plus a pattern classifier
//!   ([`predicates`]),
//! * constructive allocators with runtime-checked proof steps ([`allocators`]),
//! * exhaustive reference procedures ([`oracle`]),
//! * seeded instance families and fixed fixtures ([`generators`]),
//! * a plain-text instance and allocation format ([`format`]).

pub mod allocators;
pub mod error;
pub mod format;
pub mod generators;
pub mod model;
pub mod oracle;
pub mod predicates;
pub mod strictify;

pub use error::{Error, Result};
pub use model::{Allocation, Bundle, Profile, Valuation, Value};
