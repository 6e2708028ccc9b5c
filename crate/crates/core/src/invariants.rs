//! Fibonacci bounds on run-stack depth and the executable stack invariant.
//!
//! Stack positions count from the bottom: position 0 holds the oldest and
//! largest run, position `stack_size - 1` the most recently pushed one. When a
//! clause talks about "depth `i`" it means position `stack_size - i`.

use std::fmt;

use thiserror::Error;

use crate::stack::{required_stack_capacity, RunStack};
use crate::MIN_RUN;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MathError {
    #[error("{what} overflows 64-bit arithmetic")]
    Overflow { what: &'static str },
    #[error("argument out of domain: {0}")]
    Domain(String),
}

/// Shifted Fibonacci numbers: `fib(0) = fib(1) = 1`.
pub fn fib(n: u64) -> Result<u64, MathError> {
    let (mut a, mut b) = (1u64, 1u64);
    for _ in 0..n {
        let next = a
            .checked_add(b)
            .ok_or(MathError::Overflow { what: "fib" })?;
        a = b;
        b = next;
    }
    Ok(a)
}

/// `fib2(0) = 0`, `fib2(1) = 1`, `fib2(n + 2) = fib2(n) + fib2(n + 1) + 1`.
pub fn fib2(n: u64) -> Result<u64, MathError> {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        let next = a
            .checked_add(b)
            .and_then(|s| s.checked_add(1))
            .ok_or(MathError::Overflow { what: "fib2" })?;
        a = b;
        b = next;
    }
    Ok(a)
}

/// Largest array length that a run stack of depth `l` can sort when every
/// run except the top one is at least `u` long:
/// `u * (fib(l + 1) - 1) + fib2(l + 1) - (l + 1)`.
pub fn safe_bound(l: u64, u: u64) -> Result<u64, MathError> {
    if l < 2 {
        return Err(MathError::Domain(format!("stack depth {l} < 2")));
    }
    if u < 1 {
        return Err(MathError::Domain("minimal run length 0".into()));
    }
    let overflow = MathError::Overflow { what: "safe_bound" };
    let f = fib(l + 1)?;
    let f2 = fib2(l + 1)?;
    // fib(k) >= 1 and fib2(l + 1) >= l + 1 for l >= 2, so neither
    // subtraction can underflow.
    u.checked_mul(f - 1)
        .and_then(|x| x.checked_add(f2 - (l + 1)))
        .ok_or(overflow)
}

/// The extremal stack of depth `l`, bottom to top, in which every run length
/// sits exactly on its lower bound: position `l - 1 - k` holds
/// `u * fib(k) + fib2(k)`.
///
/// Its total equals [`safe_bound`]`(l, u)`.
pub fn worst_case_run_lengths(l: u64, u: u64) -> Result<Vec<u64>, MathError> {
    if l < 2 {
        return Err(MathError::Domain(format!("stack depth {l} < 2")));
    }
    if u < 1 {
        return Err(MathError::Domain("minimal run length 0".into()));
    }
    let mut out = Vec::with_capacity(l as usize);
    for k in (0..l).rev() {
        let v = u
            .checked_mul(fib(k)?)
            .and_then(|x| x.checked_add(fib2(k).ok()?))
            .ok_or(MathError::Overflow {
                what: "worst_case_run_lengths",
            })?;
        out.push(v);
    }
    Ok(out)
}

/// Sum of the live run lengths.
pub fn sum_run_lengths(s: &RunStack) -> u64 {
    s.live_lengths().iter().map(|&l| l as u64).sum()
}

/// `rl[k] > rl[k+1] + rl[k+2]` and `rl[k] >= u`.
pub fn elem_inv(rl: &[usize], k: usize, u: usize) -> bool {
    rl[k] > rl[k + 1] + rl[k + 2] && rl[k] >= u
}

/// `rl[k] > rl[k+1]`.
pub fn elem_bigger_than_next(rl: &[usize], k: usize) -> bool {
    rl[k] > rl[k + 1]
}

/// `rl[k] >= bound`.
pub fn elem_larger_than_bound(rl: &[usize], k: usize, bound: usize) -> bool {
    rl[k] >= bound
}

/// One clause of the stack invariant. Positions are absolute stack indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Clause {
    /// `run_base` and `run_len` have different lengths.
    Sizes,
    /// Capacity differs from the table value for this array length.
    CapacityTable,
    /// `stack_size` exceeds the capacity.
    StackSizeRange,
    /// `run_base[0]` plus the live lengths exceeds the array length.
    SumBound,
    ElemInv {
        position: usize,
    },
    BiggerThanNext {
        position: usize,
    },
    LargerThanBound {
        position: usize,
        bound: usize,
    },
    Contiguity {
        index: usize,
    },
    /// Unreachable with unsigned bases; kept so clause codes stay aligned
    /// with the full predicate.
    Base0Nonneg,
}

impl Clause {
    /// Short machine-friendly name used in CSV and CLI output.
    pub fn name(&self) -> &'static str {
        match self {
            Clause::Sizes => "sizes",
            Clause::CapacityTable => "capacity_table",
            Clause::StackSizeRange => "stack_size_range",
            Clause::SumBound => "sum_bound",
            Clause::ElemInv { .. } => "elem_inv",
            Clause::BiggerThanNext { .. } => "bigger_than_next",
            Clause::LargerThanBound { .. } => "larger_than_bound",
            Clause::Contiguity { .. } => "contiguity",
            Clause::Base0Nonneg => "base0_nonneg",
        }
    }

    /// Stack position the clause refers to, if any.
    pub fn position(&self) -> Option<usize> {
        match *self {
            Clause::ElemInv { position }
            | Clause::BiggerThanNext { position }
            | Clause::LargerThanBound { position, .. } => Some(position),
            Clause::Contiguity { index } => Some(index),
            _ => None,
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position() {
            Some(p) => write!(f, "{}@{}", self.name(), p),
            None => f.write_str(self.name()),
        }
    }
}

/// Verdict of [`check_invariant`]. `failed` is `None` exactly when every
/// clause holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    pub failed: Option<Clause>,
    pub detail: String,
}

impl InvariantReport {
    pub fn ok() -> Self {
        InvariantReport {
            failed: None,
            detail: String::new(),
        }
    }

    fn fail(clause: Clause, detail: String) -> Self {
        InvariantReport {
            failed: Some(clause),
            detail,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.failed.is_none()
    }
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failed {
            None => f.write_str("ok"),
            Some(c) => write!(f, "{c}: {}", self.detail),
        }
    }
}

/// Evaluates the stack invariant for a stack over an array of length `n`,
/// with minimal run length [`MIN_RUN`].
pub fn check_invariant(s: &RunStack, n: u64) -> InvariantReport {
    check_invariant_with(s, n, MIN_RUN)
}

/// [`check_invariant`] with an explicit minimal run length `u`. The capacity
/// table is always the one for `u = 16`.
pub fn check_invariant_with(s: &RunStack, n: u64, u: usize) -> InvariantReport {
    let bases = s.run_base();
    let rl = s.run_len();
    let size = s.size();

    if bases.len() != rl.len() {
        return InvariantReport::fail(
            Clause::Sizes,
            format!("run_base has {} slots, run_len {}", bases.len(), rl.len()),
        );
    }
    let want = required_stack_capacity(n);
    if rl.len() != want {
        return InvariantReport::fail(
            Clause::CapacityTable,
            format!("capacity {} but length {n} requires {want}", rl.len()),
        );
    }
    if size > rl.len() {
        return InvariantReport::fail(
            Clause::StackSizeRange,
            format!("stack_size {size} > capacity {}", rl.len()),
        );
    }
    let base0 = bases.first().copied().unwrap_or(0) as u64;
    let total = base0 + rl[..size].iter().map(|&l| l as u64).sum::<u64>();
    if total > n {
        return InvariantReport::fail(
            Clause::SumBound,
            format!("run_base[0] + sum = {total} > {n}"),
        );
    }
    for i in 5..=size {
        let k = size - i;
        if !elem_inv(rl, k, u) {
            return InvariantReport::fail(
                Clause::ElemInv { position: k },
                format!(
                    "rl[{k}]={} vs rl[{}]={} + rl[{}]={} (u={u})",
                    rl[k],
                    k + 1,
                    rl[k + 1],
                    k + 2,
                    rl[k + 2]
                ),
            );
        }
    }
    if size >= 4 && !elem_bigger_than_next(rl, size - 4) {
        let k = size - 4;
        return InvariantReport::fail(
            Clause::BiggerThanNext { position: k },
            format!("rl[{k}]={} <= rl[{}]={}", rl[k], k + 1, rl[k + 1]),
        );
    }
    for (depth, bound) in [(3, u), (2, u), (1, 1)] {
        if size >= depth && !elem_larger_than_bound(rl, size - depth, bound) {
            let k = size - depth;
            return InvariantReport::fail(
                Clause::LargerThanBound { position: k, bound },
                format!("rl[{k}]={} < {bound}", rl[k]),
            );
        }
    }
    for i in 0..size.saturating_sub(1) {
        if bases[i] + rl[i] != bases[i + 1] {
            return InvariantReport::fail(
                Clause::Contiguity { index: i },
                format!(
                    "run_base[{i}]={} + run_len[{i}]={} != run_base[{}]={}",
                    bases[i],
                    rl[i],
                    i + 1,
                    bases[i + 1]
                ),
            );
        }
    }
    InvariantReport::ok()
}

/// The state `merge_collapse` must leave behind: `elem_inv` at every depth
/// from 3 down, and the second run longer than the top one.
pub fn check_collapsed(rl: &[usize], u: usize) -> Result<(), Clause> {
    let size = rl.len();
    for i in 3..=size {
        let k = size - i;
        if !elem_inv(rl, k, u) {
            return Err(Clause::ElemInv { position: k });
        }
    }
    if size >= 2 && !elem_bigger_than_next(rl, size - 2) {
        return Err(Clause::BiggerThanNext { position: size - 2 });
    }
    Ok(())
}
