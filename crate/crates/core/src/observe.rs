//! Hooks fired around every stack mutation and merge during a sort.

use std::fmt;

use thiserror::Error;

use crate::element::Element;
use crate::invariants::check_invariant;
use crate::stack::RunStack;

/// A procedure call inside the sort. Indices are absolute buffer positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    PushRun {
        base: usize,
        len: usize,
    },
    MergeCollapse,
    MergeAt {
        i: usize,
    },
    MergeLo {
        base1: usize,
        len1: usize,
        base2: usize,
        len2: usize,
    },
    MergeHi {
        base1: usize,
        len1: usize,
        base2: usize,
        len2: usize,
    },
    MergeForceCollapse,
}

impl Event {
    pub fn name(&self) -> &'static str {
        match self {
            Event::PushRun { .. } => "push_run",
            Event::MergeCollapse => "merge_collapse",
            Event::MergeAt { .. } => "merge_at",
            Event::MergeLo { .. } => "merge_lo",
            Event::MergeHi { .. } => "merge_hi",
            Event::MergeForceCollapse => "merge_force_collapse",
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Event::PushRun { base, len } => write!(f, "push_run({base}, {len})"),
            Event::MergeAt { i } => write!(f, "merge_at({i})"),
            Event::MergeLo {
                base1,
                len1,
                base2,
                len2,
            }
            | Event::MergeHi {
                base1,
                len1,
                base2,
                len2,
            } => {
                write!(f, "{}({base1}, {len1}, {base2}, {len2})", self.name())
            }
            _ => write!(f, "{}()", self.name()),
        }
    }
}

/// Read-only view of the sort state handed to observers.
#[derive(Clone, Copy, Debug)]
pub struct StateView<'a> {
    pub buffer: &'a [Element],
    pub stack: &'a RunStack,
    pub min_gallop: usize,
}

/// A failed check, tied to the call it was raised in.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{event}: {message}")]
pub struct Violation {
    pub event: String,
    pub message: String,
}

impl Violation {
    pub fn new(event: &Event, message: impl Into<String>) -> Self {
        Violation {
            event: event.to_string(),
            message: message.into(),
        }
    }
}

/// Callbacks around each [`Event`]. Returning an error aborts the sort.
pub trait SortObserver {
    fn before(&mut self, _event: &Event, _view: &StateView<'_>) -> Result<(), Violation> {
        Ok(())
    }

    fn after(&mut self, _event: &Event, _view: &StateView<'_>) -> Result<(), Violation> {
        Ok(())
    }
}

impl SortObserver for () {}

impl<T: SortObserver + ?Sized> SortObserver for &mut T {
    fn before(&mut self, event: &Event, view: &StateView<'_>) -> Result<(), Violation> {
        (**self).before(event, view)
    }

    fn after(&mut self, event: &Event, view: &StateView<'_>) -> Result<(), Violation> {
        (**self).after(event, view)
    }
}

impl<A: SortObserver, B: SortObserver> SortObserver for (A, B) {
    fn before(&mut self, event: &Event, view: &StateView<'_>) -> Result<(), Violation> {
        self.0.before(event, view)?;
        self.1.before(event, view)
    }

    fn after(&mut self, event: &Event, view: &StateView<'_>) -> Result<(), Violation> {
        self.0.after(event, view)?;
        self.1.after(event, view)
    }
}

/// Runs [`check_invariant`] after every stack mutation and tracks the deepest
/// stack seen.
#[derive(Clone, Debug, Default)]
pub struct InvariantChecker {
    pub checks: u64,
    pub max_depth: usize,
}

impl InvariantChecker {
    pub fn new() -> Self {
        Self::default()
    }
}

impl SortObserver for InvariantChecker {
    fn after(&mut self, event: &Event, view: &StateView<'_>) -> Result<(), Violation> {
        match event {
            Event::PushRun { .. }
            | Event::MergeAt { .. }
            | Event::MergeCollapse
            | Event::MergeForceCollapse => {
                self.max_depth = self.max_depth.max(view.stack.size());
                self.checks += 1;
                let report = check_invariant(view.stack, view.buffer.len() as u64);
                if report.is_ok() {
                    Ok(())
                } else {
                    Err(Violation::new(event, report.to_string()))
                }
            }
            _ => Ok(()),
        }
    }
}

/// Records the live run lengths after every push and every collapse.
#[derive(Clone, Debug, Default)]
pub struct StackTrace {
    pub after_push: Vec<Vec<usize>>,
    pub after_collapse: Vec<Vec<usize>>,
}

impl SortObserver for StackTrace {
    fn after(&mut self, event: &Event, view: &StateView<'_>) -> Result<(), Violation> {
        match event {
            Event::PushRun { .. } => self.after_push.push(view.stack.live_lengths().to_vec()),
            Event::MergeCollapse => self.after_collapse.push(view.stack.live_lengths().to_vec()),
            _ => {}
        }
        Ok(())
    }
}
