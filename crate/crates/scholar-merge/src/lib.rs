//! A deterministic model of a citation-ranked, paginated publication
//! profile where versions of the same paper may be merged only while
//! they share a page; an exact solver for whether a full merge-up is
//! reachable; and a compiler between that question and 3-partition.
//!
//! Modules:
//!
//! * [`profile`] — versions, ranking, pagination, merge legality and
//!   application, plan replay, and the canonical state key.
//! * [`solver`] — exhaustive depth-first feasibility search with
//!   canonical-key memoization and explicit budgets.
//! * [`tpart`] — the 3-partition side: validation, a brute-force oracle,
//!   and seeded instance generators.
//! * [`reduction`] — compiling 3-partition instances into merge
//!   instances and translating solutions in both directions.
//! * [`gen`] — seeded random profile generation.
//! * [`files`] — strict JSON formats for everything above.
//! * [`cli`] — the `scholar-merge` command-line interface.

pub mod cli;
pub mod files;
pub mod gen;
pub mod profile;
pub mod reduction;
pub mod solver;
pub mod tpart;
