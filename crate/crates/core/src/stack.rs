//! The pending-run stack and the collapse policies that keep it shallow.
//!
//! Collapse policies only decide *which* adjacent pair to merge; the merge
//! itself is delegated to a [`RunMerger`]. The sort plugs in a merger that
//! moves elements, the simulator one that only adds lengths.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::invariants::safe_bound;
use crate::MIN_RUN;

/// Array-length thresholds and the stack capacity used below each of them.
pub const CAPACITY_TABLE: [(u64, usize); 4] =
    [(120, 4), (1542, 9), (119_151, 18), (2_917_196_496, 39)];

/// Number of stack slots needed to sort an array of length `n`.
///
/// Follows [`CAPACITY_TABLE`]; past its last threshold the smallest `l` with
/// `safe_bound(l, 16) >= n` is used.
pub fn required_stack_capacity(n: u64) -> usize {
    for &(threshold, capacity) in &CAPACITY_TABLE {
        if n < threshold {
            return capacity;
        }
    }
    let mut l = CAPACITY_TABLE[CAPACITY_TABLE.len() - 1].1 as u64 + 1;
    loop {
        match safe_bound(l, MIN_RUN as u64) {
            Ok(bound) if bound < n => l += 1,
            // Either large enough, or the bound no longer fits in u64 and so
            // exceeds every possible n.
            _ => return l as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StackError {
    #[error("run stack overflow: capacity {capacity} exhausted")]
    Overflow { capacity: usize },
    #[error("run length must be positive")]
    EmptyRun,
    #[error("run at {base} is not contiguous with the top run (expected base {expected})")]
    NotContiguous { base: usize, expected: usize },
    #[error("merge index {i} invalid for stack size {size}")]
    BadMergeIndex { i: usize, size: usize },
}

/// Parallel arrays of run starts and lengths plus the number of live entries.
///
/// The capacity is fixed at construction; a push past it is an error, never
/// a reallocation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RunStack {
    run_base: Vec<usize>,
    run_len: Vec<usize>,
    stack_size: usize,
}

impl RunStack {
    /// Empty stack sized for an array of length `n`.
    pub fn new(n: usize) -> Self {
        RunStack::with_capacity(required_stack_capacity(n as u64))
    }

    pub fn with_capacity(capacity: usize) -> Self {
        RunStack {
            run_base: vec![0; capacity],
            run_len: vec![0; capacity],
            stack_size: 0,
        }
    }

    /// Raw constructor. Nothing is validated, so this can build states that
    /// break the invariant; meant for checkers and tests.
    pub fn from_parts(run_base: Vec<usize>, run_len: Vec<usize>, stack_size: usize) -> Self {
        RunStack {
            run_base,
            run_len,
            stack_size,
        }
    }

    /// Contiguous runs starting at `base0`, bottom first.
    ///
    /// # Panics
    /// If `lens` does not fit in `capacity`.
    pub fn from_lengths(capacity: usize, base0: usize, lens: &[usize]) -> Self {
        assert!(
            lens.len() <= capacity,
            "{} runs exceed capacity {capacity}",
            lens.len()
        );
        let mut s = RunStack::with_capacity(capacity);
        let mut base = base0;
        for (i, &len) in lens.iter().enumerate() {
            s.run_base[i] = base;
            s.run_len[i] = len;
            base += len;
        }
        s.stack_size = lens.len();
        s
    }

    pub fn size(&self) -> usize {
        self.stack_size
    }

    pub fn capacity(&self) -> usize {
        self.run_len.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stack_size == 0
    }

    /// All base slots, including the dead ones above `size()`.
    pub fn run_base(&self) -> &[usize] {
        &self.run_base
    }

    /// All length slots, including the dead ones above `size()`.
    pub fn run_len(&self) -> &[usize] {
        &self.run_len
    }

    pub fn live_lengths(&self) -> &[usize] {
        &self.run_len[..self.stack_size.min(self.run_len.len())]
    }

    pub fn live_bases(&self) -> &[usize] {
        &self.run_base[..self.stack_size.min(self.run_base.len())]
    }

    /// `(base, len)` of the run at position `i`.
    pub fn run(&self, i: usize) -> (usize, usize) {
        (self.run_base[i], self.run_len[i])
    }

    pub fn top(&self) -> Option<(usize, usize)> {
        self.stack_size.checked_sub(1).map(|i| self.run(i))
    }

    /// Pushes the run `[base, base + len)`. It must start where the current
    /// top run ends.
    pub fn push_run(&mut self, base: usize, len: usize) -> Result<(), StackError> {
        if len == 0 {
            return Err(StackError::EmptyRun);
        }
        if let Some((top_base, top_len)) = self.top() {
            if base != top_base + top_len {
                return Err(StackError::NotContiguous {
                    base,
                    expected: top_base + top_len,
                });
            }
        }
        if self.stack_size >= self.capacity() {
            return Err(StackError::Overflow {
                capacity: self.capacity(),
            });
        }
        self.run_base[self.stack_size] = base;
        self.run_len[self.stack_size] = len;
        self.stack_size += 1;
        Ok(())
    }

    /// Bookkeeping half of `merge_at`: run `i` absorbs run `i + 1`, and when
    /// `i` is third from the top the top run slides down one slot.
    pub fn merge_lengths_at(&mut self, i: usize) -> Result<(), StackError> {
        let size = self.stack_size;
        if size < 2 || !(i + 2 == size || i + 3 == size) {
            return Err(StackError::BadMergeIndex { i, size });
        }
        self.run_len[i] += self.run_len[i + 1];
        if i + 3 == size {
            self.run_base[i + 1] = self.run_base[i + 2];
            self.run_len[i + 1] = self.run_len[i + 2];
        }
        self.stack_size -= 1;
        Ok(())
    }
}

/// Something that can merge two adjacent runs on a [`RunStack`].
pub trait RunMerger {
    type Error;

    fn stack(&self) -> &RunStack;

    /// Merges runs `i` and `i + 1`; `i` is `size - 2` or `size - 3`.
    fn merge_at(&mut self, i: usize) -> Result<(), Self::Error>;
}

/// Length-only merging: the stack itself is the merger.
impl RunMerger for RunStack {
    type Error = StackError;

    fn stack(&self) -> &RunStack {
        self
    }

    fn merge_at(&mut self, i: usize) -> Result<(), StackError> {
        self.merge_lengths_at(i)
    }
}

/// Restores the stack invariant after a push.
///
/// Unlike the legacy rule this also inspects the run at depth 4, so a merge
/// low in the stack cannot leave a violation further down.
pub fn merge_collapse_fixed<M: RunMerger>(m: &mut M) -> Result<(), M::Error> {
    while m.stack().size() > 1 {
        let rl = m.stack().run_len();
        let mut n = m.stack().size() - 2;
        if (n > 0 && rl[n - 1] <= rl[n] + rl[n + 1]) || (n > 1 && rl[n - 2] <= rl[n - 1] + rl[n]) {
            if rl[n - 1] < rl[n + 1] {
                n -= 1;
            }
        } else if rl[n] > rl[n + 1] {
            break;
        }
        m.merge_at(n)?;
    }
    Ok(())
}

/// The original collapse rule, which only looks at the top three runs. It can
/// return with `elem_inv` broken deeper in the stack.
pub fn merge_collapse_legacy<M: RunMerger>(m: &mut M) -> Result<(), M::Error> {
    while m.stack().size() > 1 {
        let rl = m.stack().run_len();
        let mut n = m.stack().size() - 2;
        if n > 0 && rl[n - 1] <= rl[n] + rl[n + 1] {
            if rl[n - 1] < rl[n + 1] {
                n -= 1;
            }
        } else if rl[n] > rl[n + 1] {
            break;
        }
        m.merge_at(n)?;
    }
    Ok(())
}

/// Merges everything down to a single run, always folding the middle run into
/// its shorter neighbour.
pub fn merge_force_collapse<M: RunMerger>(m: &mut M) -> Result<(), M::Error> {
    while m.stack().size() > 1 {
        let rl = m.stack().run_len();
        let mut n = m.stack().size() - 2;
        if n > 0 && rl[n - 1] < rl[n + 1] {
            n -= 1;
        }
        m.merge_at(n)?;
    }
    Ok(())
}

/// Which collapse rule runs after each push.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CollapsePolicy {
    #[default]
    Fixed,
    Legacy,
}

impl CollapsePolicy {
    pub fn collapse<M: RunMerger>(self, m: &mut M) -> Result<(), M::Error> {
        match self {
            CollapsePolicy::Fixed => merge_collapse_fixed(m),
            CollapsePolicy::Legacy => merge_collapse_legacy(m),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CollapsePolicy::Fixed => "fixed",
            CollapsePolicy::Legacy => "legacy",
        }
    }
}

impl fmt::Display for CollapsePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CollapsePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fixed" => Ok(CollapsePolicy::Fixed),
            "legacy" => Ok(CollapsePolicy::Legacy),
            other => Err(format!(
                "unknown collapse policy `{other}` (expected fixed or legacy)"
            )),
        }
    }
}
