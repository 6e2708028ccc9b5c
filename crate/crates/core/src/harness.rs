//! Seeded input generators, the reference sort, and result verdicts.
//!
//! Every generator is a pure function of its [`GenSpec`]. Randomness comes
//! from SplitMix64 (state += 0x9e3779b97f4a7c15, then the
//! 0xbf58476d1ce4e5b9 / 0x94d049bb133111eb finalizer) seeded directly with the
//! spec's seed; bounded draws use the multiply-shift reduction
//! `(x * bound) >> 64`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand_core::Rng;
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;

use crate::element::Element;
use crate::invariants::safe_bound;
use crate::sim::{sequence_to_array, worst_case_push_sequence, RunLenSequence};
use crate::MIN_RUN;

/// Deterministic 64-bit generator used by every harness component.
#[derive(Clone, Debug)]
pub struct SeededRng(SplitMix64);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform-ish draw from `0..bound`; `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    /// Draw from the inclusive range `lo..=hi`.
    pub fn range_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenKind {
    UniformRandom,
    RunStructured,
    Ascending,
    Descending,
    Constant,
    WorstCase,
}

impl GenKind {
    pub const ALL: [GenKind; 6] = [
        GenKind::UniformRandom,
        GenKind::RunStructured,
        GenKind::Ascending,
        GenKind::Descending,
        GenKind::Constant,
        GenKind::WorstCase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GenKind::UniformRandom => "uniform-random",
            GenKind::RunStructured => "run-structured",
            GenKind::Ascending => "ascending",
            GenKind::Descending => "descending",
            GenKind::Constant => "constant",
            GenKind::WorstCase => "worst-case",
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.replace('_', "-");
        GenKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| format!("unknown kind `{s}`"))
    }
}

/// Everything that determines a generated array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub seed: u64,
    /// Minimal run length for `RunStructured` and `WorstCase`.
    pub u: usize,
    /// Key alphabet size for `UniformRandom`; `None` means the full i64 range.
    pub alphabet: Option<u64>,
    /// Stack depth for `WorstCase`. Without it the deepest extremal stack
    /// that fits in `n` is used.
    pub depth: Option<usize>,
}

impl GenSpec {
    pub fn new(kind: GenKind, n: usize, seed: u64) -> Self {
        GenSpec {
            kind,
            n,
            seed,
            u: MIN_RUN,
            alphabet: None,
            depth: None,
        }
    }

    pub fn with_alphabet(mut self, alphabet: u64) -> Self {
        self.alphabet = Some(alphabet);
        self
    }

    pub fn with_u(mut self, u: usize) -> Self {
        self.u = u;
        self
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = Some(depth);
        self
    }
}

/// Deepest `l >= 2` whose extremal stack fits in `n` elements.
fn depth_for_length(n: usize, u: usize) -> Option<usize> {
    let mut best = None;
    let mut l = 2u64;
    while let Ok(b) = safe_bound(l, u as u64) {
        if b > n as u64 {
            break;
        }
        best = Some(l as usize);
        l += 1;
    }
    best
}

/// Run lengths drawn from `u..=4u` until they cover `n`; the last run is cut
/// to fit and may be shorter than `u`.
pub fn random_run_lengths(n: usize, u: usize, rng: &mut SeededRng) -> Vec<usize> {
    let u = u.max(1);
    let mut out = Vec::new();
    let mut left = n;
    while left > 0 {
        let len = rng.range_inclusive(u as u64, 4 * u as u64) as usize;
        out.push(len.min(left));
        left -= len.min(left);
    }
    out
}

/// Builds the array described by `spec`. Tags are `0..n` in position order.
pub fn generate(spec: &GenSpec) -> Vec<Element> {
    let n = spec.n;
    let mut rng = SeededRng::new(spec.seed);
    match spec.kind {
        GenKind::UniformRandom => {
            let keys: Vec<i64> = (0..n)
                .map(|_| match spec.alphabet {
                    Some(k) => rng.below(k.max(1)) as i64,
                    None => rng.next_u64() as i64,
                })
                .collect();
            Element::tagged(&keys)
        }
        GenKind::RunStructured => {
            let lengths = random_run_lengths(n, spec.u, &mut rng);
            if lengths.is_empty() {
                return Vec::new();
            }
            let seq =
                RunLenSequence::new(lengths, spec.u.max(1)).expect("generated lengths are valid");
            sequence_to_array(&seq, rng.next_u64())
        }
        GenKind::Ascending => Element::tagged(&(0..n as i64).collect::<Vec<_>>()),
        GenKind::Descending => Element::tagged(&(0..n as i64).rev().collect::<Vec<_>>()),
        GenKind::Constant => Element::tagged(&vec![0; n]),
        GenKind::WorstCase => {
            let u = spec.u.max(1);
            let depth = spec.depth.or_else(|| depth_for_length(n, u));
            match depth.and_then(|l| worst_case_push_sequence(l, u).ok()) {
                Some(seq) => sequence_to_array(&seq, spec.seed),
                None => Element::tagged(&(0..n as i64).collect::<Vec<_>>()),
            }
        }
    }
}

/// Stable sort used as the oracle: a bottom-up merge sort written
/// independently of the sort under test. The input is left untouched.
pub fn reference_sort(a: &[Element]) -> Vec<Element> {
    reference_sort_counted(a).0
}

/// [`reference_sort`] plus the number of key comparisons it made.
pub fn reference_sort_counted(a: &[Element]) -> (Vec<Element>, u64) {
    let n = a.len();
    let mut src = a.to_vec();
    let mut dst = a.to_vec();
    let mut comparisons = 0u64;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo < n {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                comparisons += 1;
                // Take from the right only when strictly smaller.
                if src[j].key < src[i].key {
                    dst[k] = src[j];
                    j += 1;
                } else {
                    dst[k] = src[i];
                    i += 1;
                }
                k += 1;
            }
            dst[k..k + (mid - i)].copy_from_slice(&src[i..mid]);
            k += mid - i;
            dst[k..k + (hi - j)].copy_from_slice(&src[j..hi]);
            lo = hi;
        }
        std::mem::swap(&mut src, &mut dst);
        width *= 2;
    }
    (src, comparisons)
}

/// Outcome of comparing a sort's output with its input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub sorted: bool,
    pub permutation: bool,
    pub stable: bool,
    pub first_defect: Option<(usize, String)>,
}

impl Verdict {
    pub fn ok(&self) -> bool {
        self.first_defect.is_none()
    }
}

/// Checks that `output` is a sorted, stable permutation of `input`.
///
/// The permutation test compares the two multisets of `(key, tag)` pairs by
/// sorting both. Stability compares, key by key, the order of tags in input
/// and output.
pub fn check_result(input: &[Element], output: &[Element]) -> Verdict {
    let mut defects: Vec<(usize, String)> = Vec::new();

    let unsorted = output.windows(2).position(|w| w[0].key > w[1].key);
    if let Some(i) = unsorted {
        defects.push((
            i + 1,
            format!("key {} after {}", output[i + 1].key, output[i].key),
        ));
    }

    let mut pin: Vec<(i64, u64)> = input.iter().map(|e| (e.key, e.tag)).collect();
    let mut pout: Vec<(i64, u64)> = output.iter().map(|e| (e.key, e.tag)).collect();
    pin.sort_unstable();
    pout.sort_unstable();
    let permutation = pin == pout;
    if !permutation {
        let i = pin
            .iter()
            .zip(&pout)
            .position(|(a, b)| a != b)
            .unwrap_or_else(|| pin.len().min(pout.len()));
        let msg = if pin.len() != pout.len() {
            format!("length {} vs {}", pout.len(), pin.len())
        } else {
            format!(
                "multisets differ at sorted rank {i}: {:?} vs {:?}",
                pout[i], pin[i]
            )
        };
        defects.push((i, msg));
    }

    let mut by_key_in: BTreeMap<i64, Vec<u64>> = BTreeMap::new();
    for e in input {
        by_key_in.entry(e.key).or_default().push(e.tag);
    }
    let mut seen: BTreeMap<i64, usize> = BTreeMap::new();
    let mut stable = true;
    for (i, e) in output.iter().enumerate() {
        let k = seen.entry(e.key).or_insert(0);
        let expected = by_key_in.get(&e.key).and_then(|tags| tags.get(*k));
        *k += 1;
        if expected != Some(&e.tag) {
            if stable {
                defects.push((
                    i,
                    format!("key {} carries tag {} out of input order", e.key, e.tag),
                ));
            }
            stable = false;
        }
    }

    defects.sort_by_key(|d| d.0);
    Verdict {
        sorted: unsorted.is_none(),
        permutation,
        stable,
        first_defect: defects.into_iter().next(),
    }
}
