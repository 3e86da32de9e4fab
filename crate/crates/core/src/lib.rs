//! Behavioural equivalence and model reductions for finite quantitative
//! transition systems.
//!
//! Systems are FuTS over commutative weight monoids ([`systems`]); LTS,
//! WLTS, WTS and ULTraS are constructors over the same representation.
//! [`bisim`] computes kernel bisimulations and minimizes, and [`reduct`]
//! builds and machine-checks reduction witnesses between system types.

pub mod bisim;
pub mod format;
pub mod gen;
pub mod monoid;
pub mod reduct;
pub mod systems;
pub mod weights;

pub use monoid::{Monoid, Value};
pub use systems::{Partition, StateMap, System, TypeDescriptor};
pub use weights::{NestedWeight, StateId, WeightFunction};
