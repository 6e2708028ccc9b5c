//! Exponential search from a hint, finished with a binary search.
//!
//! Both searches take the sorted run as a slice; `hint` is where the probe
//! starts and only affects how many comparisons are spent, never the result.

use crate::element::Element;
use crate::sort::Comparisons;

/// Leftmost insertion point of `key` in `run`: `run[k - 1] < key <= run[k]`.
/// Elements equal to `key` end up to the right of the returned index.
///
/// # Panics
/// If `hint >= run.len()`.
pub fn gallop_left(key: &Element, run: &[Element], hint: usize) -> usize {
    gallop_left_counted(key, run, hint, &mut Comparisons::default())
}

/// Rightmost insertion point of `key` in `run`: `run[k - 1] <= key < run[k]`.
/// Elements equal to `key` end up to the left of the returned index.
///
/// # Panics
/// If `hint >= run.len()`.
pub fn gallop_right(key: &Element, run: &[Element], hint: usize) -> usize {
    gallop_right_counted(key, run, hint, &mut Comparisons::default())
}

pub(crate) fn gallop_left_counted(
    key: &Element,
    run: &[Element],
    hint: usize,
    cmp: &mut Comparisons,
) -> usize {
    let len = run.len();
    assert!(hint < len, "hint {hint} outside run of length {len}");
    // Invariant after the probe: run[last_ofs] < key <= run[ofs], with
    // virtual sentinels at -1 and len.
    let (mut last_ofs, mut ofs): (isize, isize);
    if cmp.lt(&run[hint], key) {
        // Probe right until run[hint + ofs] >= key.
        let max_ofs = (len - hint) as isize;
        let (mut lo, mut hi) = (0isize, 1isize);
        while hi < max_ofs && cmp.lt(&run[hint + hi as usize], key) {
            lo = hi;
            hi = (hi << 1) + 1;
        }
        hi = hi.min(max_ofs);
        last_ofs = lo + hint as isize;
        ofs = hi + hint as isize;
    } else {
        // Probe left until run[hint - ofs] < key.
        let max_ofs = hint as isize + 1;
        let (mut lo, mut hi) = (0isize, 1isize);
        while hi < max_ofs && !cmp.lt(&run[hint - hi as usize], key) {
            lo = hi;
            hi = (hi << 1) + 1;
        }
        hi = hi.min(max_ofs);
        last_ofs = hint as isize - hi;
        ofs = hint as isize - lo;
    }
    last_ofs += 1;
    while last_ofs < ofs {
        let m = last_ofs + ((ofs - last_ofs) >> 1);
        if cmp.lt(&run[m as usize], key) {
            last_ofs = m + 1;
        } else {
            ofs = m;
        }
    }
    ofs as usize
}

pub(crate) fn gallop_right_counted(
    key: &Element,
    run: &[Element],
    hint: usize,
    cmp: &mut Comparisons,
) -> usize {
    let len = run.len();
    assert!(hint < len, "hint {hint} outside run of length {len}");
    // Invariant after the probe: run[last_ofs] <= key < run[ofs].
    let (mut last_ofs, mut ofs): (isize, isize);
    if cmp.lt(key, &run[hint]) {
        let max_ofs = hint as isize + 1;
        let (mut lo, mut hi) = (0isize, 1isize);
        while hi < max_ofs && cmp.lt(key, &run[hint - hi as usize]) {
            lo = hi;
            hi = (hi << 1) + 1;
        }
        hi = hi.min(max_ofs);
        last_ofs = hint as isize - hi;
        ofs = hint as isize - lo;
    } else {
        let max_ofs = (len - hint) as isize;
        let (mut lo, mut hi) = (0isize, 1isize);
        while hi < max_ofs && !cmp.lt(key, &run[hint + hi as usize]) {
            lo = hi;
            hi = (hi << 1) + 1;
        }
        hi = hi.min(max_ofs);
        last_ofs = lo + hint as isize;
        ofs = hi + hint as isize;
    }
    last_ofs += 1;
    while last_ofs < ofs {
        let m = last_ofs + ((ofs - last_ofs) >> 1);
        if cmp.lt(key, &run[m as usize]) {
            ofs = m;
        } else {
            last_ofs = m + 1;
        }
    }
    ofs as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn els(keys: &[i64]) -> Vec<Element> {
        Element::tagged(keys)
    }

    fn key(k: i64) -> Element {
        Element::new(k, u64::MAX)
    }

    fn scan_left(k: i64, run: &[Element]) -> usize {
        run.iter().take_while(|e| e.key < k).count()
    }

    fn scan_right(k: i64, run: &[Element]) -> usize {
        run.iter().take_while(|e| e.key <= k).count()
    }

    #[test]
    fn examples() {
        let a = els(&[1, 3, 5, 5, 7]);
        assert_eq!(gallop_left(&key(5), &a, 0), 2);
        assert_eq!(gallop_right(&key(5), &a, 0), 4);
        let b = els(&[1, 3, 5]);
        assert_eq!(gallop_left(&key(0), &b, 1), 0);
        assert_eq!(gallop_left(&key(9), &b, 2), 3);
        assert_eq!(gallop_right(&key(0), &b, 0), 0);
    }

    #[test]
    fn agrees_with_linear_scan() {
        // Every sorted run of length <= 64 drawn as a multiset over a 4-key
        // alphabet (run lengths per key), every probe key and every hint.
        let alphabet = [0i64, 2, 4, 6];
        let mut cases = 0usize;
        for c0 in 0..=16usize {
            for c1 in 0..=16usize {
                for c2 in 0..=16usize {
                    for c3 in [0usize, 1, 5, 16] {
                        let len = c0 + c1 + c2 + c3;
                        if len == 0 || len > 64 {
                            continue;
                        }
                        let mut keys = Vec::with_capacity(len);
                        for (&k, &c) in alphabet.iter().zip(&[c0, c1, c2, c3]) {
                            keys.extend(std::iter::repeat(k).take(c));
                        }
                        let run = els(&keys);
                        for probe in -1..=7 {
                            let l = scan_left(probe, &run);
                            let r = scan_right(probe, &run);
                            for hint in 0..len {
                                assert_eq!(gallop_left(&key(probe), &run, hint), l);
                                assert_eq!(gallop_right(&key(probe), &run, hint), r);
                                cases += 1;
                            }
                        }
                    }
                }
            }
        }
        assert!(cases > 1_000_000);
    }

    proptest::proptest! {
        #[test]
        fn left_never_exceeds_right(
            mut keys in proptest::collection::vec(-5i64..5, 1..64),
            probe in -6i64..6,
            hint in any::<proptest::sample::Index>(),
        ) {
            keys.sort();
            let run = els(&keys);
            let h = hint.index(run.len());
            let l = gallop_left(&key(probe), &run, h);
            let r = gallop_right(&key(probe), &run, h);
            proptest::prop_assert!(l <= r);
            proptest::prop_assert_eq!(l, scan_left(probe, &run));
            proptest::prop_assert_eq!(r, scan_right(probe, &run));
        }
    }

    use proptest::prelude::any;
}
