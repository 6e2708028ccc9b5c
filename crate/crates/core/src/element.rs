use std::cmp::Ordering;
use std::fmt;

/// A sort key with an opaque satellite tag.
///
/// Ordering looks at `key` only; `tag` rides along so stability can be
/// observed after a sort.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Element {
    pub key: i64,
    pub tag: u64,
}

impl Element {
    pub const fn new(key: i64, tag: u64) -> Self {
        Element { key, tag }
    }

    /// Elements with tags `0..keys.len()` in position order.
    pub fn tagged(keys: &[i64]) -> Vec<Element> {
        keys.iter()
            .enumerate()
            .map(|(i, &key)| Element::new(key, i as u64))
            .collect()
    }

    pub fn cmp_key(&self, other: &Element) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.key, self.tag)
    }
}

pub fn keys_of(a: &[Element]) -> Vec<i64> {
    a.iter().map(|e| e.key).collect()
}

pub fn is_sorted_by_key(a: &[Element]) -> bool {
    a.windows(2).all(|w| w[0].key <= w[1].key)
}
