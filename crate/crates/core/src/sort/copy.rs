//! Bounds-checked block copy with `list_copy` semantics:
//! `dst` becomes `dst[..n] ++ src[m..m + l] ++ dst[n + l..]`.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CopyError {
    #[error("destination range {n}..{n}+{l} exceeds length {len}")]
    Destination { n: usize, l: usize, len: usize },
    #[error("source range {m}..{m}+{l} exceeds length {len}")]
    Source { m: usize, l: usize, len: usize },
}

fn check(dst_len: usize, n: usize, src_len: usize, m: usize, l: usize) -> Result<(), CopyError> {
    if n.checked_add(l).map_or(true, |end| end > dst_len) {
        return Err(CopyError::Destination { n, l, len: dst_len });
    }
    if m.checked_add(l).map_or(true, |end| end > src_len) {
        return Err(CopyError::Source { m, l, len: src_len });
    }
    Ok(())
}

/// Copies `src[m..m + l]` over `dst[n..n + l]`.
pub fn array_copy<T: Copy>(
    dst: &mut [T],
    n: usize,
    src: &[T],
    m: usize,
    l: usize,
) -> Result<(), CopyError> {
    check(dst.len(), n, src.len(), m, l)?;
    dst[n..n + l].copy_from_slice(&src[m..m + l]);
    Ok(())
}

/// [`array_copy`] with source and destination in the same buffer. The result
/// is the one computed from the contents before the call, even when the two
/// ranges overlap.
pub fn array_copy_within<T: Copy>(
    buf: &mut [T],
    n: usize,
    m: usize,
    l: usize,
) -> Result<(), CopyError> {
    check(buf.len(), n, buf.len(), m, l)?;
    // copy_within has memmove semantics: it walks backwards when n > m.
    buf.copy_within(m..m + l, n);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// The definition, evaluated on immutable vectors.
    fn list_copy(xs: &[u32], n: usize, ys: &[u32], m: usize, l: usize) -> Vec<u32> {
        let mut out: Vec<u32> = xs.iter().take(n).copied().collect();
        out.extend(ys.iter().skip(m).take(l));
        out.extend(xs.iter().skip(n + l));
        out
    }

    #[test]
    fn zero_length_is_noop() {
        let mut dst = [1, 2, 3];
        array_copy(&mut dst, 3, &[9], 1, 0).unwrap();
        assert_eq!(dst, [1, 2, 3]);
    }

    #[test]
    fn middle_copy() {
        let mut dst = [0, 0, 0, 0];
        array_copy(&mut dst, 1, &[7, 8, 9], 1, 2).unwrap();
        assert_eq!(dst, [0, 8, 9, 0]);
    }

    #[test]
    fn bounds_faults() {
        let mut dst = [0; 4];
        assert_eq!(
            array_copy(&mut dst, 3, &[1, 2], 0, 2),
            Err(CopyError::Destination { n: 3, l: 2, len: 4 })
        );
        assert_eq!(
            array_copy(&mut dst, 0, &[1, 2], 1, 2),
            Err(CopyError::Source { m: 1, l: 2, len: 2 })
        );
        assert!(array_copy(&mut dst, usize::MAX, &[1], 0, 1).is_err());
        assert!(array_copy_within(&mut dst, 1, 3, 2).is_err());
        assert_eq!(dst, [0; 4]);
    }

    #[test]
    fn overlapping_forward_and_backward() {
        let mut b = [1, 2, 3, 4, 5];
        array_copy_within(&mut b, 1, 0, 4).unwrap();
        assert_eq!(b, [1, 1, 2, 3, 4]);
        let mut b = [1, 2, 3, 4, 5];
        array_copy_within(&mut b, 0, 1, 4).unwrap();
        assert_eq!(b, [2, 3, 4, 5, 5]);
    }

    #[test]
    fn exhaustive_small_matches_definition() {
        for dl in 0..=5usize {
            for sl in 0..=5usize {
                let xs: Vec<u32> = (0..dl as u32).collect();
                let ys: Vec<u32> = (100..100 + sl as u32).collect();
                for l in 0..=dl.min(sl) {
                    for n in 0..=dl - l {
                        for m in 0..=sl - l {
                            let mut dst = xs.clone();
                            array_copy(&mut dst, n, &ys, m, l).unwrap();
                            assert_eq!(dst, list_copy(&xs, n, &ys, m, l));
                        }
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn aliased_copy_matches_definition(
            buf in proptest::collection::vec(any::<u32>(), 0..40),
            a in any::<prop::sample::Index>(),
            b in any::<prop::sample::Index>(),
            c in any::<prop::sample::Index>(),
        ) {
            let len = buf.len();
            let l = if len == 0 { 0 } else { a.index(len + 1) };
            let n = b.index(len - l + 1);
            let m = c.index(len - l + 1);
            let expected = list_copy(&buf, n, &buf, m, l);
            let mut got = buf.clone();
            array_copy_within(&mut got, n, m, l).unwrap();
            prop_assert_eq!(got, expected);
        }
    }
}
