//! Element-free simulation of the run stack: merges just add lengths.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::element::Element;
use crate::harness::SeededRng;
use crate::invariants::{check_collapsed, safe_bound, worst_case_run_lengths, Clause, MathError};
use crate::stack::{required_stack_capacity, CollapsePolicy, RunStack};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("empty sequence")]
    Empty,
    #[error("run length at index {0} is zero")]
    Zero(usize),
    #[error("run length {len} at index {index} is below the minimum {u}")]
    TooShort { index: usize, len: usize, u: usize },
    #[error("cannot parse `{0}` as a run length")]
    Parse(String),
    #[error(transparent)]
    Math(#[from] MathError),
}

/// Run lengths in push order. All entries are at least `u`, except that the
/// last may be shorter (but not zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RunLenSequence {
    lengths: Vec<usize>,
    u: usize,
}

impl RunLenSequence {
    pub fn new(lengths: Vec<usize>, u: usize) -> Result<Self, SeqError> {
        if lengths.is_empty() {
            return Err(SeqError::Empty);
        }
        let last = lengths.len() - 1;
        for (index, &len) in lengths.iter().enumerate() {
            if len == 0 {
                return Err(SeqError::Zero(index));
            }
            if index < last && len < u {
                return Err(SeqError::TooShort { index, len, u });
            }
        }
        Ok(RunLenSequence { lengths, u })
    }

    /// Parses the comma-separated interchange form, e.g. `"16,17,34"`.
    pub fn parse(s: &str, u: usize) -> Result<Self, SeqError> {
        let lengths = s
            .trim()
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| SeqError::Parse(t.trim().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(lengths, u)
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.lengths.iter().map(|&l| l as u64).sum()
    }

    /// Every length multiplied by `k`, with `u` scaled too. Collapse decisions
    /// compare sums of lengths, so they are unchanged.
    pub fn scaled(&self, k: usize) -> RunLenSequence {
        RunLenSequence {
            lengths: self.lengths.iter().map(|&l| l * k).collect(),
            u: self.u * k,
        }
    }
}

impl fmt::Display for RunLenSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.lengths.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for RunLenSequence {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, SeqError> {
        Self::parse(s, 1)
    }
}

/// What went wrong after one step of a replay.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimFault {
    /// The push needed more slots than the given capacity.
    Overflow {
        capacity: usize,
    },
    Clause(Clause),
}

impl fmt::Display for SimFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimFault::Overflow { capacity } => write!(f, "overflow@{capacity}"),
            SimFault::Clause(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimTrace {
    pub max_depth: usize,
    /// `(step, fault)` pairs; steps index the pushed sequence.
    pub violations: Vec<(usize, SimFault)>,
    /// Live lengths after the last collapse, before any final force-collapse.
    pub final_stack: Vec<usize>,
    /// Live lengths after every collapse.
    pub states: Vec<Vec<usize>>,
}

impl SimTrace {
    pub fn has_clause_violation(&self) -> bool {
        self.violations
            .iter()
            .any(|(_, f)| matches!(f, SimFault::Clause(_)))
    }

    pub fn has_elem_inv_violation(&self) -> bool {
        self.violations
            .iter()
            .any(|(_, f)| matches!(f, SimFault::Clause(Clause::ElemInv { .. })))
    }
}

/// Pushes each length, collapses with `policy`, and checks the collapsed
/// state. Faults are recorded and the replay carries on; a push past
/// `capacity` is logged as an overflow while the simulated stack keeps
/// growing.
pub fn replay(seq: &RunLenSequence, policy: CollapsePolicy, capacity: usize) -> SimTrace {
    let mut stack = RunStack::with_capacity(capacity.max(seq.len()));
    let mut base = 0;
    let mut trace = SimTrace {
        max_depth: 0,
        violations: Vec::new(),
        final_stack: Vec::new(),
        states: Vec::with_capacity(seq.len()),
    };
    for (step, &len) in seq.lengths.iter().enumerate() {
        stack
            .push_run(base, len)
            .expect("stack sized for the whole sequence");
        base += len;
        trace.max_depth = trace.max_depth.max(stack.size());
        if stack.size() > capacity {
            trace
                .violations
                .push((step, SimFault::Overflow { capacity }));
        }
        policy
            .collapse(&mut stack)
            .expect("collapse only merges valid indices");
        if let Err(c) = check_collapsed(stack.live_lengths(), seq.u) {
            trace.violations.push((step, SimFault::Clause(c)));
        }
        trace.states.push(stack.live_lengths().to_vec());
    }
    trace.final_stack = stack.live_lengths().to_vec();
    trace
}

/// Stack slots a replay of `total` elements with minimum run length `u`
/// may need: the allocation table, or more when `u` is below the sort's
/// minimum run.
pub fn replay_capacity(total: u64, u: usize) -> usize {
    let mut l = 2;
    while safe_bound(l, u.max(1) as u64).is_ok_and(|b| b < total) {
        l += 1;
    }
    required_stack_capacity(total).max(l as usize)
}

/// Result of [`search_breaking_sequence_report`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub sequence: Option<RunLenSequence>,
    /// Push-and-collapse steps evaluated.
    pub nodes: u64,
    /// True when the search space up to `max_runs` was covered without
    /// running out of budget.
    pub exhaustive: bool,
}

/// Shortest sequence of at most `max_runs` pushes whose replay under
/// `policy` leaves a collapsed state failing a clause, or `None`.
pub fn search_breaking_sequence(
    policy: CollapsePolicy,
    max_runs: usize,
    u: usize,
    budget: u64,
) -> Option<RunLenSequence> {
    search_breaking_sequence_report(policy, max_runs, u, budget).sequence
}

// Stacks beyond this many memo entries are searched without memoization.
const MEMO_LIMIT: usize = 4_000_000;

struct Search {
    policy: CollapsePolicy,
    u: usize,
    budget: u64,
    nodes: u64,
    out_of_budget: bool,
    // Stack state -> largest number of further pushes already explored
    // from it without a hit.
    memo: HashMap<Vec<usize>, usize>,
    path: Vec<usize>,
}

impl Search {
    // Depth-first over the next run length in `u..=u + sum + 1`.
    fn dfs(&mut self, stack: &RunStack, sum: usize, remaining: usize) -> bool {
        if remaining == 0 {
            return false;
        }
        if let Some(&done) = self.memo.get(stack.live_lengths()) {
            if done >= remaining {
                return false;
            }
        }
        for len in self.u..=self.u + sum + 1 {
            if self.nodes >= self.budget {
                self.out_of_budget = true;
                return false;
            }
            self.nodes += 1;
            let mut next = stack.clone();
            next.push_run(sum, len)
                .expect("search stack has spare capacity");
            self.policy
                .collapse(&mut next)
                .expect("collapse only merges valid indices");
            self.path.push(len);
            if check_collapsed(next.live_lengths(), self.u).is_err() {
                return true;
            }
            if self.dfs(&next, sum + len, remaining - 1) {
                return true;
            }
            self.path.pop();
            if self.out_of_budget {
                return false;
            }
        }
        if self.memo.len() < MEMO_LIMIT || self.memo.contains_key(stack.live_lengths()) {
            self.memo.insert(stack.live_lengths().to_vec(), remaining);
        }
        false
    }
}

/// Iterative-deepening search: all sequences of length 1, then 2, and so on
/// up to `max_runs`, so the first hit is a shortest one. Each new length is
/// drawn from `u..=u + sum + 1` where `sum` is the total pushed so far. The
/// budget caps the number of push-and-collapse steps across all rounds.
pub fn search_breaking_sequence_report(
    policy: CollapsePolicy,
    max_runs: usize,
    u: usize,
    budget: u64,
) -> SearchOutcome {
    let u = u.max(1);
    let mut search = Search {
        policy,
        u,
        budget,
        nodes: 0,
        out_of_budget: false,
        memo: HashMap::new(),
        path: Vec::with_capacity(max_runs),
    };
    let root = RunStack::with_capacity(max_runs + 1);
    for depth in 1..=max_runs {
        search.path.clear();
        if search.dfs(&root, 0, depth) {
            let seq =
                RunLenSequence::new(search.path.clone(), u).expect("search lengths are at least u");
            return SearchOutcome {
                sequence: Some(seq),
                nodes: search.nodes,
                exhaustive: false,
            };
        }
        if search.out_of_budget {
            break;
        }
    }
    SearchOutcome {
        sequence: None,
        nodes: search.nodes,
        exhaustive: !search.out_of_budget,
    }
}

/// The order in which to push the extremal stack of depth `l`: bottom run
/// first. Each push lands on a longer run whose predecessor exceeds the sum
/// of the two above it, so no collapse condition ever fires.
pub fn worst_case_push_sequence(l: usize, u: usize) -> Result<RunLenSequence, SeqError> {
    let lengths = worst_case_run_lengths(l as u64, u as u64)?
        .into_iter()
        .map(|x| usize::try_from(x).map_err(|_| MathError::Overflow { what: "run length" }))
        .collect::<Result<Vec<_>, _>>()?;
    RunLenSequence::new(lengths, u)
}

/// An array whose natural runs are exactly `seq`: each run strictly ascends
/// and each boundary strictly descends. Tags are `0..n`.
pub fn sequence_to_array(seq: &RunLenSequence, seed: u64) -> Vec<Element> {
    let mut rng = SeededRng::new(seed);
    let mut keys: Vec<i64> = Vec::with_capacity(seq.total() as usize);
    let mut start = 0i64;
    for &len in &seq.lengths {
        let first = keys.len();
        let mut k = start;
        for _ in 0..len {
            keys.push(k);
            k += 1 + rng.below(2) as i64;
        }
        let (lo, hi) = (keys[first], keys[keys.len() - 1]);
        // Next run starts strictly below this run's last key.
        start = hi - 1 - rng.below((hi - lo) as u64 + 1) as i64;
    }
    Element::tagged(&keys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::safe_bound;
    use crate::sort::count_run_and_make_ascending;

    fn seq(v: &[usize], u: usize) -> RunLenSequence {
        RunLenSequence::new(v.to_vec(), u).unwrap()
    }

    #[test]
    fn sequence_validation() {
        assert_eq!(RunLenSequence::new(vec![], 1), Err(SeqError::Empty));
        assert_eq!(RunLenSequence::new(vec![16, 0], 1), Err(SeqError::Zero(1)));
        assert!(matches!(
            RunLenSequence::new(vec![5, 16], 16),
            Err(SeqError::TooShort { index: 0, .. })
        ));
        assert!(RunLenSequence::new(vec![16, 5], 16).is_ok());
    }

    #[test]
    fn parse_and_format() {
        let s = RunLenSequence::parse(" 16, 17,34 ", 16).unwrap();
        assert_eq!(s.lengths(), &[16, 17, 34]);
        assert_eq!(s.to_string(), "16,17,34");
        assert!(RunLenSequence::parse("16,x", 1).is_err());
        assert!(RunLenSequence::parse("", 1).is_err());
    }

    #[test]
    fn single_run_replay() {
        for policy in [CollapsePolicy::Fixed, CollapsePolicy::Legacy] {
            let t = replay(&seq(&[16], 16), policy, 4);
            assert_eq!(t.max_depth, 1);
            assert!(t.violations.is_empty());
            assert_eq!(t.final_stack, vec![16]);
        }
    }

    #[test]
    fn extremal_push_order_builds_the_stack() {
        let s = worst_case_push_sequence(4, 16).unwrap();
        assert_eq!(s.lengths(), &[52, 34, 17, 16]);
        let t = replay(&s, CollapsePolicy::Fixed, 4);
        assert_eq!(t.max_depth, 4);
        assert_eq!(t.final_stack, vec![52, 34, 17, 16]);
        assert!(t.violations.is_empty());

        // The reversed order merges as it goes.
        let t = replay(&seq(&[16, 17, 34, 52], 16), CollapsePolicy::Fixed, 4);
        assert!(t.max_depth <= 4);
        assert!(t.violations.is_empty());
    }

    #[test]
    fn known_legacy_break() {
        let s = seq(&[120, 80, 25, 20, 30], 16);
        let t = replay(&s, CollapsePolicy::Legacy, 9);
        assert_eq!(t.final_stack, vec![120, 80, 45, 30]);
        assert_eq!(
            t.violations,
            vec![(4, SimFault::Clause(Clause::ElemInv { position: 0 }))]
        );
        let t = replay(&s, CollapsePolicy::Fixed, 9);
        assert!(t.violations.is_empty());
        assert_eq!(t.final_stack, vec![275]);
    }

    #[test]
    fn overflow_is_recorded_not_fatal() {
        let s = worst_case_push_sequence(4, 16).unwrap();
        let t = replay(&s, CollapsePolicy::Fixed, 3);
        assert_eq!(t.violations, vec![(3, SimFault::Overflow { capacity: 3 })]);
        assert_eq!(t.final_stack.len(), 4);
    }

    #[test]
    fn replay_capacity_follows_u() {
        assert_eq!(replay_capacity(119, 16), 4);
        assert_eq!(replay_capacity(120, 16), 9);
        assert_eq!(replay_capacity(14, 1), 4);
        assert_eq!(replay_capacity(15, 1), 5);
        let s = seq(&[2, 4, 8, 10, 3, 2, 4], 1);
        let t = replay(&s, CollapsePolicy::Fixed, replay_capacity(s.total(), 1));
        assert!(t.violations.is_empty());
    }

    #[test]
    fn budget_zero_finds_nothing() {
        let r = search_breaking_sequence_report(CollapsePolicy::Legacy, 20, 1, 0);
        assert_eq!(r.sequence, None);
        assert_eq!(r.nodes, 0);
        assert!(!r.exhaustive);
    }

    #[test]
    fn legacy_search_hits_and_fixed_replay_is_clean() {
        let r = search_breaking_sequence_report(CollapsePolicy::Legacy, 20, 1, 10_000_000);
        let s = r.sequence.expect("legacy rule breaks");
        let legacy = replay(&s, CollapsePolicy::Legacy, s.len() + 1);
        assert!(legacy.has_elem_inv_violation());
        let fixed = replay(&s, CollapsePolicy::Fixed, s.len() + 1);
        assert!(fixed.violations.is_empty());
        // Shortest: nothing one push shorter breaks.
        let shorter =
            search_breaking_sequence_report(CollapsePolicy::Legacy, s.len() - 1, 1, 10_000_000);
        assert_eq!(shorter.sequence, None);
        assert!(shorter.exhaustive);
    }

    #[test]
    fn fixed_search_small_is_exhaustive_and_empty() {
        let r = search_breaking_sequence_report(CollapsePolicy::Fixed, 8, 1, 10_000_000);
        assert_eq!(r.sequence, None);
        assert!(r.exhaustive);
    }

    #[test]
    fn policies_agree_up_to_three_runs() {
        for a in 1..=12 {
            for b in 1..=12 {
                for c in 1..=12 {
                    let s = seq(&[a, b, c], 1);
                    assert_eq!(
                        replay(&s, CollapsePolicy::Fixed, 4).states,
                        replay(&s, CollapsePolicy::Legacy, 4).states
                    );
                }
            }
        }
    }

    #[test]
    fn fixed_depth_bounded_by_sum_exhaustive() {
        // All sequences of lengths >= 1 with total <= safe_bound(4, 1) = 14.
        fn walk(prefix: &mut Vec<usize>, left: usize) {
            if !prefix.is_empty() {
                let t = replay(&seq(prefix, 1), CollapsePolicy::Fixed, 4);
                assert!(t.max_depth <= 4, "{prefix:?}");
                assert!(t.violations.is_empty(), "{prefix:?}");
            }
            for len in 1..=left {
                prefix.push(len);
                walk(prefix, left - len);
                prefix.pop();
            }
        }
        assert_eq!(safe_bound(4, 1), Ok(14));
        walk(&mut Vec::new(), 14);
    }

    #[test]
    fn array_examples() {
        let a = sequence_to_array(&seq(&[3], 1), 5);
        assert!(a.windows(2).all(|w| w[0].key < w[1].key));
        let a = sequence_to_array(&seq(&[2, 2], 1), 5);
        assert!(a[0].key < a[1].key && a[1].key > a[2].key && a[2].key < a[3].key);
        assert_eq!(
            a.iter().map(|e| e.tag).collect::<Vec<_>>(),
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn array_round_trip() {
        let mut rng = SeededRng::new(11);
        for seed in 0..200 {
            let lengths: Vec<usize> = (0..1 + rng.below(12))
                .map(|_| 16 + rng.below(60) as usize)
                .collect();
            let s = seq(&lengths, 16);
            let mut a = sequence_to_array(&s, seed);
            let mut found = Vec::new();
            let mut lo = 0;
            while lo < a.len() {
                let r = count_run_and_make_ascending(&mut a[lo..]);
                found.push(r);
                lo += r;
            }
            assert_eq!(found, lengths);
        }
    }
}
