//! Timsort over `(key, tag)` elements, built around a run stack whose
//! collapse rule and capacity bound are checked at runtime.
//!
//! The crate is organised bottom-up:
//!
//! * [`sort`]: run detection, binary insertion sort, galloping merges and the
//!   [`timsort`] driver.
//! * [`stack`]: the pending-run stack, its capacity table, and the collapse
//!   policies (the fixed one used by the sort and the legacy one kept for
//!   study).
//! * [`invariants`]: Fibonacci bounds, the safe-length formula, and the
//!   executable stack invariant.
//! * [`contracts`] and [`observe`]: hooks that assert procedure contracts on
//!   every stack mutation during a sort.
//! * [`sim`]: an element-free replay of run-length sequences, plus a search
//!   for sequences that break the legacy collapse.
//! * [`harness`]: seeded generators, an independent reference sort and result
//!   verdicts.
//! * [`verify`]: the acceptance criteria, shared by the CLI and the test suite.

pub mod cli;
pub mod contracts;
pub mod element;
pub mod harness;
pub mod invariants;
pub mod io;
pub mod observe;
pub mod sim;
pub mod sort;
pub mod stack;
pub mod verify;

pub use element::Element;
pub use invariants::{check_invariant, InvariantReport};
pub use sort::{timsort, timsort_with, SortError, SortStats};
pub use stack::{CollapsePolicy, RunStack};

/// Minimum run length. Shorter natural runs are extended with binary
/// insertion sort.
pub const MIN_RUN: usize = 16;

/// Arrays shorter than this are sorted with a single binary insertion sort.
pub const MIN_MERGE: usize = 2 * MIN_RUN;

/// A merge switches to galloping once one run wins this many times in a row.
pub const MIN_GALLOP: usize = 7;

/// Starting value of the adaptive gallop threshold.
pub const INITIAL_MIN_GALLOP: usize = MIN_GALLOP;
