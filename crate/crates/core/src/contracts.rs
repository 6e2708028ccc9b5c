//! Pre- and postconditions of the stack procedures, asserted at runtime.
//!
//! [`ContractChecker`] is a [`SortObserver`]: it snapshots whatever a
//! postcondition refers to before each call and compares afterwards.
//!
//! | call                   | checked after the call                                   |
//! |------------------------|----------------------------------------------------------|
//! | `push_run`             | new top slot, deeper slots untouched, invariant          |
//! | `merge_at(i)`          | lengths summed, top slot shifted, run sum kept, top run not shorter, `run_base[0]` kept, invariant |
//! | `merge_collapse`       | `elem_inv` from depth 3, top pair ordered, sum kept, invariant |
//! | `merge_force_collapse` | one run left, sum kept, invariant                        |
//! | `merge_lo`/`merge_hi`  | window is the stable merge of both runs, stack untouched, buffer outside the window untouched |

use std::collections::BTreeMap;

use crate::element::{is_sorted_by_key, Element};
use crate::invariants::{
    check_collapsed, check_invariant_with, elem_bigger_than_next, elem_inv, elem_larger_than_bound,
};
use crate::observe::{Event, SortObserver, StateView, Violation};
use crate::stack::RunStack;
use crate::MIN_RUN;

/// How much of the buffer a merge's frame check compares.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FrameCheck {
    /// Every index outside the merge window.
    #[default]
    Full,
    /// Only the merge window itself; outside indices are trusted.
    WindowOnly,
}

struct Pre {
    event: Event,
    stack: RunStack,
    sum: usize,
}

/// Asserts every procedure contract during a sort.
pub struct ContractChecker {
    frame: FrameCheck,
    min_run: usize,
    pending: Vec<Pre>,
    buffer_snapshot: Vec<Element>,
    expected_window: Vec<Element>,
    calls: BTreeMap<&'static str, u64>,
    max_depth: usize,
}

impl Default for ContractChecker {
    fn default() -> Self {
        ContractChecker::new(FrameCheck::Full)
    }
}

fn ensure(ok: bool, event: &Event, msg: impl FnOnce() -> String) -> Result<(), Violation> {
    if ok {
        Ok(())
    } else {
        Err(Violation::new(event, msg()))
    }
}

fn live_sum(s: &RunStack) -> usize {
    s.live_lengths().iter().sum()
}

/// Two-finger stable merge, kept separate from the sort's merge routines.
fn stable_merge_into(out: &mut Vec<Element>, run1: &[Element], run2: &[Element]) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < run1.len() && j < run2.len() {
        if run2[j].key < run1[i].key {
            out.push(run2[j]);
            j += 1;
        } else {
            out.push(run1[i]);
            i += 1;
        }
    }
    out.extend_from_slice(&run1[i..]);
    out.extend_from_slice(&run2[j..]);
}

impl ContractChecker {
    pub fn new(frame: FrameCheck) -> Self {
        ContractChecker {
            frame,
            min_run: MIN_RUN,
            pending: Vec::new(),
            buffer_snapshot: Vec::new(),
            expected_window: Vec::new(),
            calls: BTreeMap::new(),
            max_depth: 0,
        }
    }

    /// Number of checked calls per procedure name.
    pub fn calls(&self) -> &BTreeMap<&'static str, u64> {
        &self.calls
    }

    pub fn total_calls(&self) -> u64 {
        self.calls.values().sum()
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    fn invariant(&self, event: &Event, view: &StateView<'_>, when: &str) -> Result<(), Violation> {
        let r = check_invariant_with(view.stack, view.buffer.len() as u64, self.min_run);
        ensure(r.is_ok(), event, || format!("invariant {when}: {r}"))
    }

    fn pre_push(
        &self,
        event: &Event,
        base: usize,
        len: usize,
        view: &StateView<'_>,
    ) -> Result<(), Violation> {
        let s = view.stack;
        let rl = s.run_len();
        let size = s.size();
        let u = self.min_run;
        ensure(len > 0, event, || "run length must be positive".into())?;
        ensure(base + len <= view.buffer.len(), event, || {
            format!(
                "run ends at {} past array length {}",
                base + len,
                view.buffer.len()
            )
        })?;
        if let Some((b, l)) = s.top() {
            ensure(base == b + l, event, || {
                format!("base {base} != top end {}", b + l)
            })?;
        }
        for i in 3..=size {
            ensure(elem_inv(rl, size - i, u), event, || {
                format!("pre: elem_inv fails at {}", size - i)
            })?;
        }
        if size >= 2 {
            ensure(elem_bigger_than_next(rl, size - 2), event, || {
                format!("pre: bigger_than_next fails at {}", size - 2)
            })?;
        }
        if size >= 1 {
            ensure(elem_larger_than_bound(rl, size - 1, u), event, || {
                format!("pre: top run {} shorter than {u}", rl[size - 1])
            })?;
        }
        self.invariant(event, view, "before call")
    }

    fn pre_merge_window(&mut self, event: &Event, view: &StateView<'_>) -> Result<(), Violation> {
        let (base1, len1, base2, len2, lo) = match *event {
            Event::MergeLo {
                base1,
                len1,
                base2,
                len2,
            } => (base1, len1, base2, len2, true),
            Event::MergeHi {
                base1,
                len1,
                base2,
                len2,
            } => (base1, len1, base2, len2, false),
            _ => unreachable!(),
        };
        let a = view.buffer;
        ensure(base1 + len1 == base2, event, || "runs not adjacent".into())?;
        ensure(len1 > 0 && len2 > 0, event, || "empty run".into())?;
        if lo {
            ensure(len1 <= len2, event, || "merge_lo needs len1 <= len2".into())?;
        } else {
            ensure(len1 > len2, event, || "merge_hi needs len1 > len2".into())?;
        }
        let run1 = &a[base1..base2];
        let run2 = &a[base2..base2 + len2];
        ensure(
            is_sorted_by_key(run1) && is_sorted_by_key(run2),
            event,
            || "input runs not sorted".into(),
        )?;
        ensure(
            run1[0].key > run2[0].key && run1[len1 - 1].key > run2[len2 - 1].key,
            event,
            || "runs not trimmed".into(),
        )?;
        stable_merge_into(&mut self.expected_window, run1, run2);
        if self.frame == FrameCheck::Full {
            self.buffer_snapshot.clear();
            self.buffer_snapshot.extend_from_slice(a);
        }
        Ok(())
    }

    fn post_merge_window(
        &self,
        event: &Event,
        pre: &Pre,
        view: &StateView<'_>,
    ) -> Result<(), Violation> {
        let (base1, end) = match *event {
            Event::MergeLo {
                base1, base2, len2, ..
            }
            | Event::MergeHi {
                base1, base2, len2, ..
            } => (base1, base2 + len2),
            _ => unreachable!(),
        };
        let a = view.buffer;
        ensure(view.stack == &pre.stack, event, || {
            "run stack modified".into()
        })?;
        ensure(view.min_gallop >= 1, event, || {
            "min_gallop dropped below 1".into()
        })?;
        ensure(a[base1..end] == self.expected_window[..], event, || {
            "window is not the stable merge of its runs".into()
        })?;
        if self.frame == FrameCheck::Full {
            let snap = &self.buffer_snapshot;
            ensure(a.len() == snap.len(), event, || {
                "buffer length changed".into()
            })?;
            ensure(a[..base1] == snap[..base1], event, || {
                let i = (0..base1).find(|&i| a[i] != snap[i]).unwrap_or(0);
                format!("index {i} below the window modified")
            })?;
            ensure(a[end..] == snap[end..], event, || {
                let i = (end..a.len()).find(|&i| a[i] != snap[i]).unwrap_or(end);
                format!("index {i} above the window modified")
            })?;
        }
        Ok(())
    }

    fn post(&self, event: &Event, pre: &Pre, view: &StateView<'_>) -> Result<(), Violation> {
        let s = view.stack;
        let old = &pre.stack;
        match *event {
            Event::PushRun { base, len } => {
                let k = old.size();
                ensure(s.size() == k + 1, event, || {
                    format!("size {} != {}", s.size(), k + 1)
                })?;
                ensure(s.run(k) == (base, len), event, || {
                    format!("slot {k} holds {:?}", s.run(k))
                })?;
                ensure(
                    s.live_lengths()[..k] == old.live_lengths()[..k]
                        && s.live_bases()[..k] == old.live_bases()[..k],
                    event,
                    || "deeper slots changed".into(),
                )?;
                self.invariant(event, view, "after call")
            }
            Event::MergeAt { i } => {
                let k = old.size();
                ensure(s.size() + 1 == k, event, || "size not decremented".into())?;
                ensure(
                    s.run_len()[i] == old.run_len()[i] + old.run_len()[i + 1],
                    event,
                    || format!("run_len[{i}] is not the sum of the merged runs"),
                )?;
                if i + 3 == k {
                    ensure(s.run(i + 1) == old.run(i + 2), event, || {
                        "top run not shifted down".into()
                    })?;
                }
                ensure(s.run_base()[0] == old.run_base()[0], event, || {
                    "run_base[0] changed".into()
                })?;
                ensure(live_sum(s) == pre.sum, event, || "run sum changed".into())?;
                ensure(
                    s.live_lengths()[s.size() - 1] >= old.live_lengths()[k - 1],
                    event,
                    || "top run got shorter".into(),
                )?;
                let (b, l) = s.run(i);
                ensure(is_sorted_by_key(&view.buffer[b..b + l]), event, || {
                    "merged run not sorted".into()
                })?;
                self.invariant(event, view, "after call")
            }
            Event::MergeCollapse => {
                if let Err(c) = check_collapsed(s.live_lengths(), self.min_run) {
                    return Err(Violation::new(
                        event,
                        format!("post: {c} in {:?}", s.live_lengths()),
                    ));
                }
                ensure(live_sum(s) == pre.sum, event, || "run sum changed".into())?;
                ensure(s.size() > 0 && s.size() <= old.size(), event, || {
                    "stack size out of range".into()
                })?;
                ensure(
                    s.live_lengths()[s.size() - 1] >= old.live_lengths()[old.size() - 1],
                    event,
                    || "top run got shorter".into(),
                )?;
                ensure(s.run_base()[0] == old.run_base()[0], event, || {
                    "run_base[0] changed".into()
                })?;
                self.invariant(event, view, "after call")
            }
            Event::MergeForceCollapse => {
                ensure(s.size() == 1, event, || format!("{} runs left", s.size()))?;
                ensure(live_sum(s) == pre.sum, event, || "run sum changed".into())?;
                ensure(s.run_base()[0] == old.run_base()[0], event, || {
                    "run_base[0] changed".into()
                })?;
                self.invariant(event, view, "after call")
            }
            Event::MergeLo { .. } | Event::MergeHi { .. } => {
                self.post_merge_window(event, pre, view)
            }
        }
    }
}

impl SortObserver for ContractChecker {
    fn before(&mut self, event: &Event, view: &StateView<'_>) -> Result<(), Violation> {
        let s = view.stack;
        let size = s.size();
        match *event {
            Event::PushRun { base, len } => self.pre_push(event, base, len, view)?,
            Event::MergeAt { i } => {
                ensure(size >= 2, event, || "fewer than two runs".into())?;
                ensure(i + 2 == size || (size >= 3 && i + 3 == size), event, || {
                    format!("index {i} not allowed at size {size}")
                })?;
                ensure(!view.buffer.is_empty(), event, || "empty array".into())?;
                self.invariant(event, view, "before call")?;
            }
            Event::MergeCollapse => {
                let rl = s.run_len();
                ensure(size > 0, event, || "empty stack".into())?;
                if size >= 4 {
                    ensure(elem_inv(rl, size - 4, self.min_run), event, || {
                        "pre: elem_inv at depth 4".into()
                    })?;
                }
                if size >= 3 {
                    ensure(elem_bigger_than_next(rl, size - 3), event, || {
                        "pre: bigger_than_next at depth 3".into()
                    })?;
                }
                self.invariant(event, view, "before call")?;
            }
            Event::MergeForceCollapse => {
                ensure(size > 0, event, || "empty stack".into())?;
                self.invariant(event, view, "before call")?;
            }
            Event::MergeLo { .. } | Event::MergeHi { .. } => self.pre_merge_window(event, view)?,
        }
        self.pending.push(Pre {
            event: *event,
            stack: s.clone(),
            sum: live_sum(s),
        });
        Ok(())
    }

    fn after(&mut self, event: &Event, view: &StateView<'_>) -> Result<(), Violation> {
        let pre = self
            .pending
            .pop()
            .filter(|p| p.event == *event)
            .ok_or_else(|| Violation::new(event, "call returned without a matching entry"))?;
        *self.calls.entry(event.name()).or_insert(0) += 1;
        self.max_depth = self.max_depth.max(view.stack.size());
        self.post(event, &pre, view)
    }
}
