//! Natural run detection and binary insertion sort.

use std::ops::Range;

use crate::element::Element;
use crate::sort::Comparisons;

/// Length of the run starting at `a[0]`. A strictly descending run is
/// reversed in place, so on return `a[..k]` is nondecreasing.
///
/// Equal neighbours end a descending run: reversing `[2, 2']` would swap two
/// equal keys.
///
/// # Panics
/// If `a` is empty.
pub fn count_run_and_make_ascending(a: &mut [Element]) -> usize {
    count_run_counted(a, &mut Comparisons::default())
}

pub(crate) fn count_run_counted(a: &mut [Element], cmp: &mut Comparisons) -> usize {
    assert!(!a.is_empty(), "run detection on an empty range");
    let hi = a.len();
    if hi == 1 {
        return 1;
    }
    let mut run_hi = 2;
    if cmp.lt(&a[1], &a[0]) {
        while run_hi < hi && cmp.lt(&a[run_hi], &a[run_hi - 1]) {
            run_hi += 1;
        }
        a[..run_hi].reverse();
    } else {
        while run_hi < hi && !cmp.lt(&a[run_hi], &a[run_hi - 1]) {
            run_hi += 1;
        }
    }
    run_hi
}

/// Reverses `a[range]`; everything else is untouched.
pub fn reverse_range<T>(a: &mut [T], range: Range<usize>) {
    a[range].reverse();
}

/// Sorts `a` given that `a[..start]` is already nondecreasing, inserting each
/// later element after any equal keys before it.
///
/// # Panics
/// If `start > a.len()`.
pub fn binary_sort(a: &mut [Element], start: usize) {
    binary_sort_counted(a, start, &mut Comparisons::default())
}

pub(crate) fn binary_sort_counted(a: &mut [Element], start: usize, cmp: &mut Comparisons) {
    assert!(start <= a.len(), "start {start} past end {}", a.len());
    for i in start.max(1)..a.len() {
        let pivot = a[i];
        let (mut left, mut right) = (0, i);
        while left < right {
            let mid = left + (right - left) / 2;
            if cmp.lt(&pivot, &a[mid]) {
                right = mid;
            } else {
                left = mid + 1;
            }
        }
        a.copy_within(left..i, left + 1);
        a[left] = pivot;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::keys_of;

    fn els(keys: &[i64]) -> Vec<Element> {
        Element::tagged(keys)
    }

    #[test]
    fn single_element_run() {
        assert_eq!(count_run_and_make_ascending(&mut els(&[7])), 1);
    }

    #[test]
    fn strict_descent_reversed() {
        let mut a = els(&[5, 4, 3, 9]);
        assert_eq!(count_run_and_make_ascending(&mut a), 3);
        assert_eq!(keys_of(&a), vec![3, 4, 5, 9]);
    }

    #[test]
    fn equal_keys_are_ascending() {
        let mut a = els(&[2, 2, 1]);
        let before = a.clone();
        assert_eq!(count_run_and_make_ascending(&mut a), 2);
        assert_eq!(a, before);
    }

    #[test]
    fn descent_stops_at_equal() {
        let mut a = els(&[3, 2, 2, 1]);
        assert_eq!(count_run_and_make_ascending(&mut a), 2);
        assert_eq!(keys_of(&a), vec![2, 3, 2, 1]);
    }

    #[test]
    fn sub_slice_leaves_outside_alone() {
        let mut a = els(&[9, 5, 4, 1, 9]);
        let n = count_run_and_make_ascending(&mut a[1..4]);
        assert_eq!(n, 3);
        assert_eq!(keys_of(&a), vec![9, 1, 4, 5, 9]);
    }

    /// Linear-scan oracle: the longest nondecreasing or strictly decreasing
    /// prefix, whichever the first pair selects.
    fn oracle_run(keys: &[i64]) -> (usize, bool) {
        if keys.len() < 2 {
            return (keys.len(), false);
        }
        let desc = keys[1] < keys[0];
        let mut k = 2;
        while k < keys.len()
            && (if desc {
                keys[k] < keys[k - 1]
            } else {
                keys[k] >= keys[k - 1]
            })
        {
            k += 1;
        }
        (k, desc)
    }

    #[test]
    fn run_length_is_maximal_exhaustive() {
        // All arrays of length <= 7 over a 3-symbol alphabet.
        for len in 1..=7u32 {
            for code in 0..3u32.pow(len) {
                let keys: Vec<i64> = (0..len)
                    .map(|i| ((code / 3u32.pow(i)) % 3) as i64)
                    .collect();
                let mut a = els(&keys);
                let k = count_run_and_make_ascending(&mut a);
                let (want, desc) = oracle_run(&keys);
                assert_eq!(k, want, "{keys:?}");
                let mut expect = keys.clone();
                if desc {
                    expect[..k].reverse();
                }
                assert_eq!(keys_of(&a), expect);
            }
        }
    }

    #[test]
    fn reverse_examples() {
        let mut a = [1, 2, 3];
        reverse_range(&mut a, 0..0);
        assert_eq!(a, [1, 2, 3]);
        reverse_range(&mut a, 0..3);
        assert_eq!(a, [3, 2, 1]);
        let mut a = [9, 5, 4, 9];
        reverse_range(&mut a, 1..3);
        assert_eq!(a, [9, 4, 5, 9]);
    }

    #[test]
    fn binary_sort_examples() {
        let mut a = els(&[3, 1, 2]);
        let before = a.clone();
        binary_sort(&mut a, 3);
        assert_eq!(a, before);

        binary_sort(&mut a, 1);
        assert_eq!(keys_of(&a), vec![1, 2, 3]);

        let mut a = vec![Element::new(2, 0), Element::new(2, 1), Element::new(1, 2)];
        binary_sort(&mut a, 2);
        assert_eq!(
            a,
            vec![Element::new(1, 2), Element::new(2, 0), Element::new(2, 1)]
        );
    }

    #[test]
    fn binary_sort_start_zero() {
        let mut a = els(&[4, 3, 2, 1]);
        binary_sort(&mut a, 0);
        assert_eq!(keys_of(&a), vec![1, 2, 3, 4]);
        let mut empty: Vec<Element> = vec![];
        binary_sort(&mut empty, 0);
    }

    /// Insertion sort by linear scan, stable.
    fn oracle_sort(a: &[Element]) -> Vec<Element> {
        let mut out: Vec<Element> = Vec::new();
        for &e in a {
            let pos = out
                .iter()
                .rposition(|x| x.key <= e.key)
                .map_or(0, |p| p + 1);
            out.insert(pos, e);
        }
        out
    }

    #[test]
    fn binary_sort_exhaustive_three_symbols() {
        // Every window of length <= 10 over {0,1,2}, every valid start with a
        // sorted prefix. Length 32 exhaustively is 3^32 cases; the property
        // test below samples the longer windows.
        for len in 0..=10u32 {
            for code in 0..3u32.pow(len) {
                let keys: Vec<i64> = (0..len)
                    .map(|i| ((code / 3u32.pow(i)) % 3) as i64)
                    .collect();
                let a = els(&keys);
                let mut start = 0;
                while start < a.len() && (start == 0 || a[start - 1].key <= a[start].key) {
                    start += 1;
                }
                for s in 0..=start {
                    let mut got = a.clone();
                    binary_sort(&mut got, s);
                    assert_eq!(got, oracle_sort(&a), "{keys:?} start={s}");
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn binary_sort_long_windows(keys in proptest::collection::vec(0i64..3, 0..=32)) {
            let a = els(&keys);
            let mut got = a.clone();
            binary_sort(&mut got, 0);
            proptest::prop_assert_eq!(got, oracle_sort(&a));
        }
    }
}
