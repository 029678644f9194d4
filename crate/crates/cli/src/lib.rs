//! Library side of the `certlab` command: recurrence calculators, the
//! separation searches and report formatting.

pub mod recurrence;
pub mod report;
pub mod search;
