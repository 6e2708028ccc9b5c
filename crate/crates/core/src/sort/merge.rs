//! Stable merges of two adjacent runs, with galloping.
//!
//! Both functions receive only the window holding the two runs, so they have
//! no way to touch the rest of the buffer or the run stack. The shorter run is
//! copied to a temporary of exactly its length.

use crate::element::Element;
use crate::sort::gallop::{gallop_left_counted, gallop_right_counted};
use crate::sort::Comparisons;
use crate::{INITIAL_MIN_GALLOP, MIN_GALLOP};

/// Adaptive gallop threshold plus the comparison counter shared by all merges
/// of one sort.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeState {
    pub min_gallop: usize,
    pub cmp: Comparisons,
}

impl Default for MergeState {
    fn default() -> Self {
        MergeState {
            min_gallop: INITIAL_MIN_GALLOP,
            cmp: Comparisons::default(),
        }
    }
}

fn check_trimmed(window: &[Element], len1: usize) {
    let len2 = window.len() - len1;
    assert!(len1 > 0 && len2 > 0, "empty run in merge ({len1}, {len2})");
    debug_assert!(
        window[0].key > window[len1].key && window[len1 - 1].key > window[window.len() - 1].key,
        "runs not trimmed before merge"
    );
}

/// Merges `window[..len1]` with `window[len1..]` from the low end. Intended
/// for `len1 <= len2`.
///
/// The runs must already be trimmed: `window[0] > window[len1]` and
/// `window[len1 - 1] > window[last]`.
pub fn merge_lo(state: &mut MergeState, window: &mut [Element], len1: usize) {
    check_trimmed(window, len1);
    let total = window.len();
    let mut len2 = total - len1;
    let mut len1 = len1;
    let cmp = &mut state.cmp;

    let tmp: Vec<Element> = window[..len1].to_vec();
    let (mut c1, mut c2, mut dest) = (0usize, len1, 0usize);

    window[dest] = window[c2];
    dest += 1;
    c2 += 1;
    len2 -= 1;
    if len2 == 0 {
        window[dest..dest + len1].copy_from_slice(&tmp[c1..c1 + len1]);
        return;
    }
    if len1 == 1 {
        window.copy_within(c2..c2 + len2, dest);
        window[dest + len2] = tmp[c1];
        return;
    }

    let mut min_gallop = state.min_gallop;
    'outer: loop {
        let mut count1 = 0usize;
        let mut count2 = 0usize;

        // One-at-a-time until a run wins min_gallop times in a row.
        loop {
            if cmp.lt(&window[c2], &tmp[c1]) {
                window[dest] = window[c2];
                dest += 1;
                c2 += 1;
                count2 += 1;
                count1 = 0;
                len2 -= 1;
                if len2 == 0 {
                    break 'outer;
                }
            } else {
                window[dest] = tmp[c1];
                dest += 1;
                c1 += 1;
                count1 += 1;
                count2 = 0;
                len1 -= 1;
                if len1 == 1 {
                    break 'outer;
                }
            }
            if count1.max(count2) >= min_gallop {
                break;
            }
        }

        loop {
            count1 = gallop_right_counted(&window[c2], &tmp[c1..c1 + len1], 0, cmp);
            if count1 != 0 {
                window[dest..dest + count1].copy_from_slice(&tmp[c1..c1 + count1]);
                dest += count1;
                c1 += count1;
                len1 -= count1;
                if len1 <= 1 {
                    break 'outer;
                }
            }
            window[dest] = window[c2];
            dest += 1;
            c2 += 1;
            len2 -= 1;
            if len2 == 0 {
                break 'outer;
            }

            count2 = gallop_left_counted(&tmp[c1], &window[c2..c2 + len2], 0, cmp);
            if count2 != 0 {
                window.copy_within(c2..c2 + count2, dest);
                dest += count2;
                c2 += count2;
                len2 -= count2;
                if len2 == 0 {
                    break 'outer;
                }
            }
            window[dest] = tmp[c1];
            dest += 1;
            c1 += 1;
            len1 -= 1;
            if len1 == 1 {
                break 'outer;
            }
            min_gallop = min_gallop.saturating_sub(1).max(1);
            if count1 < MIN_GALLOP && count2 < MIN_GALLOP {
                break;
            }
        }
        min_gallop += 2;
    }
    state.min_gallop = min_gallop.max(1);

    if len1 == 1 {
        window.copy_within(c2..c2 + len2, dest);
        window[dest + len2] = tmp[c1];
    } else {
        // len1 == 0 would mean the last element of run 1 was not the maximum,
        // which trimming rules out.
        assert!(len1 > 0, "merge_lo exhausted run 1 early");
        debug_assert_eq!(len2, 0);
        window[dest..dest + len1].copy_from_slice(&tmp[c1..c1 + len1]);
    }
}

/// Merges `window[..len1]` with `window[len1..]` from the high end. Intended
/// for `len1 > len2`; same trimming precondition as [`merge_lo`].
pub fn merge_hi(state: &mut MergeState, window: &mut [Element], len1: usize) {
    check_trimmed(window, len1);
    let mut len2 = window.len() - len1;
    let mut len1 = len1;
    let cmp = &mut state.cmp;

    // Unmerged data is always window[..len1] (run 1) and tmp[..len2] (run 2);
    // the next output slot is window[len1 + len2 - 1].
    let tmp: Vec<Element> = window[len1..].to_vec();

    window[len1 + len2 - 1] = window[len1 - 1];
    len1 -= 1;
    if len1 == 0 {
        window[..len2].copy_from_slice(&tmp[..len2]);
        return;
    }
    if len2 == 1 {
        window.copy_within(0..len1, 1);
        window[0] = tmp[0];
        return;
    }

    let mut min_gallop = state.min_gallop;
    'outer: loop {
        let mut count1 = 0usize;
        let mut count2 = 0usize;

        loop {
            if cmp.lt(&tmp[len2 - 1], &window[len1 - 1]) {
                window[len1 + len2 - 1] = window[len1 - 1];
                count1 += 1;
                count2 = 0;
                len1 -= 1;
                if len1 == 0 {
                    break 'outer;
                }
            } else {
                window[len1 + len2 - 1] = tmp[len2 - 1];
                count2 += 1;
                count1 = 0;
                len2 -= 1;
                if len2 == 1 {
                    break 'outer;
                }
            }
            if count1.max(count2) >= min_gallop {
                break;
            }
        }

        loop {
            count1 = len1 - gallop_right_counted(&tmp[len2 - 1], &window[..len1], len1 - 1, cmp);
            if count1 != 0 {
                len1 -= count1;
                window.copy_within(len1..len1 + count1, len1 + len2);
                if len1 == 0 {
                    break 'outer;
                }
            }
            window[len1 + len2 - 1] = tmp[len2 - 1];
            len2 -= 1;
            if len2 == 1 {
                break 'outer;
            }

            count2 = len2 - gallop_left_counted(&window[len1 - 1], &tmp[..len2], len2 - 1, cmp);
            if count2 != 0 {
                len2 -= count2;
                window[len1 + len2..len1 + len2 + count2]
                    .copy_from_slice(&tmp[len2..len2 + count2]);
                if len2 <= 1 {
                    break 'outer;
                }
            }
            window[len1 + len2 - 1] = window[len1 - 1];
            len1 -= 1;
            if len1 == 0 {
                break 'outer;
            }
            min_gallop = min_gallop.saturating_sub(1).max(1);
            if count1 < MIN_GALLOP && count2 < MIN_GALLOP {
                break;
            }
        }
        min_gallop += 2;
    }
    state.min_gallop = min_gallop.max(1);

    if len2 == 1 {
        window.copy_within(0..len1, 1);
        window[0] = tmp[0];
    } else {
        assert!(len2 > 0, "merge_hi exhausted run 2 early");
        debug_assert_eq!(len1, 0);
        window[..len2].copy_from_slice(&tmp[..len2]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Textbook two-finger stable merge.
    fn oracle_merge(run1: &[Element], run2: &[Element]) -> Vec<Element> {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::with_capacity(run1.len() + run2.len());
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
        out
    }

    fn window(run1: &[i64], run2: &[i64]) -> Vec<Element> {
        let mut keys = run1.to_vec();
        keys.extend_from_slice(run2);
        Element::tagged(&keys)
    }

    #[test]
    fn lo_example() {
        let mut w = window(&[2, 4], &[1, 3]);
        merge_lo(&mut MergeState::default(), &mut w, 2);
        assert_eq!(crate::element::keys_of(&w), vec![1, 2, 3, 4]);
    }

    #[test]
    fn lo_equal_keys_keep_run_one_first() {
        let mut w = window(&[2, 2, 9], &[1, 2, 3]);
        let expect = oracle_merge(&w[..3], &w[3..]);
        merge_lo(&mut MergeState::default(), &mut w, 3);
        assert_eq!(w, expect);
        let tags: Vec<u64> = w.iter().map(|e| e.tag).collect();
        assert_eq!(tags, vec![3, 0, 1, 4, 5, 2]);
    }

    #[test]
    fn hi_example() {
        let mut w = window(&[2, 4, 6], &[1, 3]);
        let expect = oracle_merge(&w[..3], &w[3..]);
        merge_hi(&mut MergeState::default(), &mut w, 3);
        assert_eq!(crate::element::keys_of(&w), vec![1, 2, 3, 4, 6]);
        assert_eq!(w, expect);
    }

    /// Alternating blocks of `block` consecutive keys, split into two runs
    /// and guarded so the trimming precondition holds.
    fn blocky_runs(blocks: i64, block: i64, extra_top: usize) -> (Vec<i64>, Vec<i64>) {
        let keys = 0..blocks * block;
        let mut run1: Vec<i64> = keys.clone().filter(|x| (x / block) % 2 == 1).collect();
        let mut run2: Vec<i64> = keys.filter(|x| (x / block) % 2 == 0).collect();
        run2.insert(0, -1);
        run1.extend((0..=extra_top as i64).map(|i| 1_000_000 + i));
        (run1, run2)
    }

    #[test]
    fn long_merges_gallop_and_adapt() {
        let (run1, run2) = blocky_runs(8, 50, 0);
        assert!(run1.len() <= run2.len());
        let mut w = window(&run1, &run2);
        let expect = oracle_merge(&w[..run1.len()], &w[run1.len()..]);
        let mut st = MergeState::default();
        merge_lo(&mut st, &mut w, run1.len());
        assert_eq!(w, expect);
        assert!(st.min_gallop >= 1);
        assert!(
            st.min_gallop < INITIAL_MIN_GALLOP,
            "galloping paid off, threshold drops"
        );

        let (run1, run2) = blocky_runs(8, 50, 5);
        assert!(run1.len() > run2.len());
        let mut w = window(&run1, &run2);
        let expect = oracle_merge(&w[..run1.len()], &w[run1.len()..]);
        let mut st = MergeState::default();
        merge_hi(&mut st, &mut w, run1.len());
        assert_eq!(w, expect);
        assert!(st.min_gallop < INITIAL_MIN_GALLOP);
    }

    #[test]
    fn interleaved_merges_raise_threshold() {
        // Perfect interleaving never wins a gallop, so the threshold climbs.
        let run1: Vec<i64> = (0..200).map(|x| 2 * x + 1).chain([10_000]).collect();
        let run2: Vec<i64> = [-1].into_iter().chain((0..200).map(|x| 2 * x)).collect();
        let mut w = window(&run1, &run2);
        let expect = oracle_merge(&w[..run1.len()], &w[run1.len()..]);
        let mut st = MergeState {
            min_gallop: 1,
            ..MergeState::default()
        };
        merge_lo(&mut st, &mut w, run1.len());
        assert_eq!(w, expect);
        assert!(st.min_gallop > 1);
    }

    /// Two sorted runs over a small alphabet, guarded so that run 1 starts
    /// above run 2's head and ends above its tail.
    fn trimmed_runs(max_len: usize) -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
        (
            proptest::collection::vec(0i64..6, 0..max_len),
            proptest::collection::vec(0i64..6, 0..max_len),
        )
            .prop_map(|(mut r1, mut r2)| {
                r1.sort();
                r2.sort();
                r1.push(10);
                r2.insert(0, -1);
                (r1, r2)
            })
    }

    proptest! {
        #[test]
        fn merges_match_oracle((r1, r2) in trimmed_runs(120), start_gallop in 1usize..10) {
            let w0 = window(&r1, &r2);
            let len1 = r1.len();
            let expect = oracle_merge(&w0[..len1], &w0[len1..]);

            let mut w = w0.clone();
            let mut st = MergeState { min_gallop: start_gallop, ..MergeState::default() };
            merge_lo(&mut st, &mut w, len1);
            prop_assert_eq!(&w, &expect);
            prop_assert!(st.min_gallop >= 1);

            let mut w = w0.clone();
            let mut st = MergeState { min_gallop: start_gallop, ..MergeState::default() };
            merge_hi(&mut st, &mut w, len1);
            prop_assert_eq!(&w, &expect);
            prop_assert!(st.min_gallop >= 1);
        }

        #[test]
        fn merge_only_touches_window((r1, r2) in trimmed_runs(60), pad in 0usize..8) {
            let w0 = window(&r1, &r2);
            let len1 = r1.len();
            let mut buf: Vec<Element> = (0..pad).map(|i| Element::new(-100, 1000 + i as u64)).collect();
            buf.extend_from_slice(&w0);
            buf.extend((0..pad).map(|i| Element::new(100, 2000 + i as u64)));
            let before = buf.clone();
            let end = pad + w0.len();
            if len1 <= w0.len() - len1 {
                merge_lo(&mut MergeState::default(), &mut buf[pad..end], len1);
            } else {
                merge_hi(&mut MergeState::default(), &mut buf[pad..end], len1);
            }
            prop_assert_eq!(&buf[..pad], &before[..pad]);
            prop_assert_eq!(&buf[end..], &before[end..]);
        }
    }
}
