//! Worked examples, families from the size and stability analysis, and the
//! seeded experiment suites built on them.

mod constructions;
mod experiments;

pub use constructions::*;
pub use experiments::*;
