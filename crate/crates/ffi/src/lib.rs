//! C ABI over `tsort-core`.
//!
//! Every function returns a [`TsortStatus`] (or a plain value where no
//! failure is possible) and writes results through out-pointers. Run stacks
//! are exposed as the opaque [`TsortStack`] handle, created with
//! [`tsort_stack_new`] and released with [`tsort_stack_free`]. Panics never
//! cross the boundary; they surface as `TSORT_STATUS_PANIC`.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use tsort_core::invariants::{check_invariant, fib, safe_bound, worst_case_run_lengths, MathError};
use tsort_core::observe::InvariantChecker;
use tsort_core::sort::{timsort_with, SortError, SortStats};
use tsort_core::stack::{
    merge_force_collapse, required_stack_capacity, CollapsePolicy, RunStack, StackError,
};
use tsort_core::Element;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsortStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CapacityOverflow = 3,
    InvariantViolation = 4,
    ArithmeticOverflow = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsortPolicy {
    Fixed = 0,
    Legacy = 1,
}

/// A key with the caller's tag; sorting is by key only and stable.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TsortElement {
    pub key: i64,
    pub tag: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TsortStats {
    pub max_stack_depth: usize,
    pub comparisons: u64,
    pub runs: usize,
    pub merges: usize,
}

/// Opaque run stack.
pub struct TsortStack {
    stack: RunStack,
    n: u64,
}

impl From<SortStats> for TsortStats {
    fn from(s: SortStats) -> Self {
        TsortStats {
            max_stack_depth: s.max_stack_depth,
            comparisons: s.comparisons,
            runs: s.runs,
            merges: s.merges,
        }
    }
}

impl From<StackError> for TsortStatus {
    fn from(e: StackError) -> Self {
        match e {
            StackError::Overflow { .. } => TsortStatus::CapacityOverflow,
            _ => TsortStatus::InvalidArgument,
        }
    }
}

impl From<SortError> for TsortStatus {
    fn from(e: SortError) -> Self {
        match e {
            SortError::Stack(s) => s.into(),
            SortError::Violation(_) => TsortStatus::InvariantViolation,
        }
    }
}

impl From<MathError> for TsortStatus {
    fn from(e: MathError) -> Self {
        match e {
            MathError::Overflow { .. } => TsortStatus::ArithmeticOverflow,
            MathError::Domain(_) => TsortStatus::InvalidArgument,
        }
    }
}

impl From<TsortPolicy> for CollapsePolicy {
    fn from(p: TsortPolicy) -> Self {
        match p {
            TsortPolicy::Fixed => CollapsePolicy::Fixed,
            TsortPolicy::Legacy => CollapsePolicy::Legacy,
        }
    }
}

fn guard(f: impl FnOnce() -> Result<(), TsortStatus>) -> TsortStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TsortStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => TsortStatus::Panic,
    }
}

/// # Safety
/// `p` must be null or valid for `len` reads and writes.
unsafe fn slice_mut<'a, T>(p: *mut T, len: usize) -> Result<&'a mut [T], TsortStatus> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(TsortStatus::NullPointer);
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), TsortStatus> {
    if out.is_null() {
        return Err(TsortStatus::NullPointer);
    }
    out.write(value);
    Ok(())
}

fn sort_elements(elems: &mut [Element], check: bool) -> Result<SortStats, TsortStatus> {
    let r = if check {
        timsort_with(elems, CollapsePolicy::Fixed, InvariantChecker::new())
    } else {
        timsort_with(elems, CollapsePolicy::Fixed, ())
    };
    r.map_err(TsortStatus::from)
}

/// Sorts `len` keys in place. `stats` may be null.
///
/// # Safety
/// `keys` must be valid for `len` reads and writes (it may be null when
/// `len` is 0); `stats` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn tsort_sort_i64(
    keys: *mut i64,
    len: usize,
    stats: *mut TsortStats,
) -> TsortStatus {
    guard(|| {
        let keys = slice_mut(keys, len)?;
        let mut elems = Element::tagged(keys);
        let s = sort_elements(&mut elems, false)?;
        for (k, e) in keys.iter_mut().zip(&elems) {
            *k = e.key;
        }
        if !stats.is_null() {
            stats.write(s.into());
        }
        Ok(())
    })
}

/// Stably sorts `len` elements in place by key. With `check_invariants`
/// the run-stack invariant is verified after every stack mutation.
///
/// # Safety
/// As for [`tsort_sort_i64`].
#[no_mangle]
pub unsafe extern "C" fn tsort_sort_elements(
    elems: *mut TsortElement,
    len: usize,
    check_invariants: bool,
    stats: *mut TsortStats,
) -> TsortStatus {
    guard(|| {
        let out = slice_mut(elems, len)?;
        let mut v: Vec<Element> = out.iter().map(|e| Element::new(e.key, e.tag)).collect();
        let s = sort_elements(&mut v, check_invariants)?;
        for (o, e) in out.iter_mut().zip(&v) {
            *o = TsortElement {
                key: e.key,
                tag: e.tag,
            };
        }
        if !stats.is_null() {
            stats.write(s.into());
        }
        Ok(())
    })
}

/// Creates an empty stack sized for an array of `n` elements.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsort_stack_new(n: u64, out: *mut *mut TsortStack) -> TsortStatus {
    guard(|| {
        let n_usize = usize::try_from(n).map_err(|_| TsortStatus::InvalidArgument)?;
        let handle = Box::new(TsortStack {
            stack: RunStack::new(n_usize),
            n,
        });
        write_out(out, Box::into_raw(handle))
    })
}

/// Releases a stack. Null is ignored.
///
/// # Safety
/// `s` must be null or a handle from [`tsort_stack_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tsort_stack_free(s: *mut TsortStack) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

unsafe fn stack_mut<'a>(s: *mut TsortStack) -> Result<&'a mut TsortStack, TsortStatus> {
    s.as_mut().ok_or(TsortStatus::NullPointer)
}

/// Pushes the run `[base, base + len)`.
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsort_stack_push(
    s: *mut TsortStack,
    base: usize,
    len: usize,
) -> TsortStatus {
    guard(|| {
        let s = stack_mut(s)?;
        if base as u64 + len as u64 > s.n {
            return Err(TsortStatus::InvalidArgument);
        }
        s.stack.push_run(base, len).map_err(TsortStatus::from)
    })
}

/// Runs a collapse rule on the lengths (merging adds lengths).
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsort_stack_collapse(
    s: *mut TsortStack,
    policy: TsortPolicy,
) -> TsortStatus {
    guard(|| {
        let s = stack_mut(s)?;
        CollapsePolicy::from(policy)
            .collapse(&mut s.stack)
            .map_err(TsortStatus::from)
    })
}

/// Merges the stack down to one run.
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsort_stack_force_collapse(s: *mut TsortStack) -> TsortStatus {
    guard(|| {
        let s = stack_mut(s)?;
        merge_force_collapse(&mut s.stack).map_err(TsortStatus::from)
    })
}

/// Number of live runs.
///
/// # Safety
/// `s` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tsort_stack_size(s: *const TsortStack, out: *mut usize) -> TsortStatus {
    guard(|| {
        let s = s.as_ref().ok_or(TsortStatus::NullPointer)?;
        write_out(out, s.stack.size())
    })
}

/// Copies the live run lengths, bottom first, into `out` (room for `cap`)
/// and stores the count in `written`. Fails with `BUFFER_TOO_SMALL`,
/// still setting `written`, when `cap` is short.
///
/// # Safety
/// `s` must be a live handle; `out` valid for `cap` writes; `written`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tsort_stack_lengths(
    s: *const TsortStack,
    out: *mut usize,
    cap: usize,
    written: *mut usize,
) -> TsortStatus {
    guard(|| {
        let s = s.as_ref().ok_or(TsortStatus::NullPointer)?;
        copy_out(s.stack.live_lengths(), out, cap, written)
    })
}

unsafe fn copy_out<T: Copy>(
    src: &[T],
    out: *mut T,
    cap: usize,
    written: *mut usize,
) -> Result<(), TsortStatus> {
    write_out(written, src.len())?;
    if src.len() > cap {
        return Err(TsortStatus::BufferTooSmall);
    }
    slice_mut(out, src.len())?.copy_from_slice(src);
    Ok(())
}

/// `OK` when the stack satisfies the run-stack invariant,
/// `INVARIANT_VIOLATION` otherwise.
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsort_stack_check_invariant(s: *const TsortStack) -> TsortStatus {
    guard(|| {
        let s = s.as_ref().ok_or(TsortStatus::NullPointer)?;
        if check_invariant(&s.stack, s.n).is_ok() {
            Ok(())
        } else {
            Err(TsortStatus::InvariantViolation)
        }
    })
}

/// Largest array length whose run stack can reach depth `l` with minimum
/// run length `u`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsort_safe_bound(l: u64, u: u64, out: *mut u64) -> TsortStatus {
    guard(|| write_out(out, safe_bound(l, u)?))
}

/// Stack slots allocated for an array of `n` elements.
#[no_mangle]
pub extern "C" fn tsort_required_capacity(n: u64) -> usize {
    required_stack_capacity(n)
}

/// Fibonacci number with `fib(0) = fib(1) = 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsort_fib(k: u64, out: *mut u64) -> TsortStatus {
    guard(|| write_out(out, fib(k)?))
}

/// Run lengths of the extremal stack of depth `l`, bottom first. Same
/// buffer protocol as [`tsort_stack_lengths`].
///
/// # Safety
/// `out` valid for `cap` writes; `written` writable.
#[no_mangle]
pub unsafe extern "C" fn tsort_worst_case(
    l: u64,
    u: u64,
    out: *mut u64,
    cap: usize,
    written: *mut usize,
) -> TsortStatus {
    guard(|| {
        let rl = worst_case_run_lengths(l, u)?;
        copy_out(&rl, out, cap, written)
    })
}

/// Static description of a status code; never null.
#[no_mangle]
pub extern "C" fn tsort_status_str(code: i32) -> *const c_char {
    let s: &'static [u8] = match code {
        0 => b"ok\0",
        1 => b"null pointer\0",
        2 => b"invalid argument\0",
        3 => b"run stack capacity exceeded\0",
        4 => b"invariant violation\0",
        5 => b"arithmetic overflow\0",
        6 => b"buffer too small\0",
        7 => b"internal panic\0",
        _ => b"unknown status\0",
    };
    s.as_ptr().cast()
}
