//! The element-level sort: run detection, run stack management and merging.

mod copy;
mod gallop;
mod merge;
mod run;

pub use copy::{array_copy, array_copy_within, CopyError};
pub use gallop::{gallop_left, gallop_right};
pub use merge::{merge_hi, merge_lo, MergeState};
pub use run::{binary_sort, count_run_and_make_ascending, reverse_range};

use thiserror::Error;

use crate::element::Element;
use crate::observe::{Event, InvariantChecker, SortObserver, StateView, Violation};
use crate::stack::{merge_force_collapse, CollapsePolicy, RunMerger, RunStack, StackError};
use crate::{MIN_MERGE, MIN_RUN};

use gallop::{gallop_left_counted, gallop_right_counted};
use run::{binary_sort_counted, count_run_counted};

/// Key comparison that counts how often it is called.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Comparisons(pub u64);

impl Comparisons {
    #[inline]
    pub fn lt(&mut self, a: &Element, b: &Element) -> bool {
        self.0 += 1;
        a.key < b.key
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SortError {
    #[error(transparent)]
    Stack(#[from] StackError),
    #[error("contract violated: {0}")]
    Violation(#[from] Violation),
}

/// Counters collected during one sort.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SortStats {
    pub max_stack_depth: usize,
    pub comparisons: u64,
    pub runs: usize,
    pub merges: usize,
}

/// Everything one sort invocation mutates.
pub struct SortState<'a, O: SortObserver> {
    buf: &'a mut [Element],
    stack: RunStack,
    merge: MergeState,
    observer: O,
    stats: SortStats,
}

impl<'a, O: SortObserver> SortState<'a, O> {
    pub fn new(buf: &'a mut [Element], observer: O) -> Self {
        let stack = RunStack::new(buf.len());
        SortState {
            buf,
            stack,
            merge: MergeState::default(),
            observer,
            stats: SortStats::default(),
        }
    }

    pub fn stack(&self) -> &RunStack {
        &self.stack
    }

    pub fn buffer(&self) -> &[Element] {
        self.buf
    }

    pub fn min_gallop(&self) -> usize {
        self.merge.min_gallop
    }

    fn notify(&mut self, event: Event, before: bool) -> Result<(), Violation> {
        let view = StateView {
            buffer: self.buf,
            stack: &self.stack,
            min_gallop: self.merge.min_gallop,
        };
        if before {
            self.observer.before(&event, &view)
        } else {
            self.observer.after(&event, &view)
        }
    }

    pub fn push_run(&mut self, base: usize, len: usize) -> Result<(), SortError> {
        let event = Event::PushRun { base, len };
        self.notify(event, true)?;
        self.stack.push_run(base, len)?;
        self.stats.runs += 1;
        self.stats.max_stack_depth = self.stats.max_stack_depth.max(self.stack.size());
        self.notify(event, false)?;
        Ok(())
    }

    pub fn merge_collapse(&mut self, policy: CollapsePolicy) -> Result<(), SortError> {
        self.notify(Event::MergeCollapse, true)?;
        policy.collapse(self)?;
        self.notify(Event::MergeCollapse, false)?;
        Ok(())
    }

    pub fn merge_force_collapse(&mut self) -> Result<(), SortError> {
        self.notify(Event::MergeForceCollapse, true)?;
        merge_force_collapse(self)?;
        self.notify(Event::MergeForceCollapse, false)?;
        Ok(())
    }

    fn merge_runs(&mut self, i: usize) -> Result<(), SortError> {
        let (base1, len1) = self.stack.run(i);
        let (base2, len2) = self.stack.run(i + 1);
        debug_assert_eq!(base1 + len1, base2);
        self.stack.merge_lengths_at(i)?;
        self.stats.merges += 1;

        let window = &mut self.buf[base1..base2 + len2];
        let cmp = &mut self.merge.cmp;
        // Elements of run 1 below run 2's head, and of run 2 above run 1's
        // tail, are already in place.
        let skip = gallop_right_counted(&window[len1], &window[..len1], 0, cmp);
        let len1 = len1 - skip;
        if len1 == 0 {
            return Ok(());
        }
        let len2 = gallop_left_counted(
            &window[skip + len1 - 1],
            &window[skip + len1..],
            len2 - 1,
            cmp,
        );
        if len2 == 0 {
            return Ok(());
        }

        let base1 = base1 + skip;
        let event = if len1 <= len2 {
            Event::MergeLo {
                base1,
                len1,
                base2,
                len2,
            }
        } else {
            Event::MergeHi {
                base1,
                len1,
                base2,
                len2,
            }
        };
        self.notify(event, true)?;
        let window = &mut self.buf[base1..base2 + len2];
        match event {
            Event::MergeLo { .. } => merge_lo(&mut self.merge, window, len1),
            _ => merge_hi(&mut self.merge, window, len1),
        }
        self.notify(event, false)?;
        Ok(())
    }

    pub fn stats(&self) -> SortStats {
        SortStats {
            comparisons: self.merge.cmp.0,
            ..self.stats
        }
    }
}

impl<O: SortObserver> RunMerger for SortState<'_, O> {
    type Error = SortError;

    fn stack(&self) -> &RunStack {
        &self.stack
    }

    fn merge_at(&mut self, i: usize) -> Result<(), SortError> {
        let event = Event::MergeAt { i };
        self.notify(event, true)?;
        self.merge_runs(i)?;
        self.notify(event, false)?;
        Ok(())
    }
}

/// Sorts `a` ascending by key, stably. With `checker` set, the stack
/// invariant is verified after every stack mutation.
pub fn timsort(a: &mut [Element], checker: bool) -> Result<SortStats, SortError> {
    if checker {
        timsort_with(a, CollapsePolicy::Fixed, InvariantChecker::new())
    } else {
        timsort_with(a, CollapsePolicy::Fixed, ())
    }
}

/// [`timsort`] with an explicit collapse policy and observer.
pub fn timsort_with<O: SortObserver>(
    a: &mut [Element],
    policy: CollapsePolicy,
    observer: O,
) -> Result<SortStats, SortError> {
    let n = a.len();
    if n < 2 {
        return Ok(SortStats::default());
    }
    if n < MIN_MERGE {
        let mut cmp = Comparisons::default();
        let run = count_run_counted(a, &mut cmp);
        binary_sort_counted(a, run, &mut cmp);
        return Ok(SortStats {
            comparisons: cmp.0,
            runs: 1,
            ..SortStats::default()
        });
    }

    let mut state = SortState::new(a, observer);
    let mut lo = 0;
    while lo < n {
        let cmp = &mut state.merge.cmp;
        let tail = &mut state.buf[lo..];
        let mut run = count_run_counted(tail, cmp);
        if run < MIN_RUN {
            let force = MIN_RUN.min(tail.len());
            binary_sort_counted(&mut tail[..force], run, cmp);
            run = force;
        }
        state.push_run(lo, run)?;
        state.merge_collapse(policy)?;
        lo += run;
    }
    state.merge_force_collapse()?;
    debug_assert_eq!(state.stack.live_lengths(), &[n]);
    Ok(state.stats())
}
