//! Acceptance criteria as library checks, shared by `tsort verify` and the
//! `acceptance` test target.

use std::fmt;
use std::time::{Duration, Instant};

use crate::contracts::{ContractChecker, FrameCheck};
use crate::element::Element;
use crate::harness::{generate, random_run_lengths, reference_sort, GenKind, GenSpec, SeededRng};
use crate::invariants::{
    check_collapsed, check_invariant, check_invariant_with, safe_bound, worst_case_run_lengths,
};
use crate::observe::{Event, SortObserver, StateView, Violation};
use crate::sim::{
    replay, search_breaking_sequence, search_breaking_sequence_report, sequence_to_array,
    RunLenSequence,
};
use crate::sort::{array_copy, array_copy_within, timsort_with};
use crate::stack::{required_stack_capacity, CollapsePolicy, RunStack};
use crate::MIN_RUN;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scale {
    /// Reduced workloads, a few seconds in total.
    #[default]
    Quick,
    /// The sizes the criteria are stated at.
    Full,
}

/// What to run. `policy` is the collapse rule wired into the sort; anything
/// other than `Fixed` is a deliberate mutation.
#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyConfig {
    pub scale: Scale,
    pub policy: CollapsePolicy,
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}. {} ({:.3}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub const THRESHOLDS: &str = "threshold reconstruction";
pub const TIGHTNESS: &str = "extremal-stack tightness";
pub const SAFETY: &str = "fixed-collapse invariant";
pub const BUG: &str = "bug reproduction";
pub const CONTRACTS: &str = "contract suite";
pub const ORACLE: &str = "oracle equivalence";
pub const LIST_COPY: &str = "list_copy lemmas";

pub const CRITERIA: [&str; 7] = [
    THRESHOLDS, TIGHTNESS, SAFETY, BUG, CONTRACTS, ORACLE, LIST_COPY,
];

fn timed(
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    f: impl FnOnce() -> Result<String, String>,
) -> CriterionResult {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match out {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            passed = false;
            detail = format!("{detail}; took {elapsed:?}, limit {limit:?}");
        }
    }
    CriterionResult {
        id,
        name,
        passed,
        detail,
        elapsed,
    }
}

/// Every criterion in order.
pub fn run_all(cfg: VerifyConfig) -> Vec<CriterionResult> {
    let workload = run_workload(cfg);
    vec![
        criterion_thresholds(),
        criterion_tightness(),
        criterion_safety(&workload),
        criterion_bug(cfg.scale),
        criterion_contracts(&workload),
        criterion_oracle(cfg),
        criterion_list_copy(cfg.scale),
    ]
}

pub fn criterion_thresholds() -> CriterionResult {
    timed(1, THRESHOLDS, Some(Duration::from_millis(1)), || {
        let cases = [(4, 120), (9, 1542), (18, 119151), (39, 2917196496u64)];
        let mut out = Vec::new();
        for (l, threshold) in cases {
            let b = safe_bound(l, 16).map_err(|e| e.to_string())?;
            if b + 1 != threshold {
                return Err(format!(
                    "safe_bound({l},16) = {b}, expected {}",
                    threshold - 1
                ));
            }
            out.push(format!("{l}:{b}"));
        }
        Ok(out.join(" "))
    })
}

pub fn criterion_tightness() -> CriterionResult {
    timed(2, TIGHTNESS, Some(Duration::from_secs(1)), || {
        for l in [4u64, 9, 18, 39] {
            for u in [1u64, 16] {
                let rl = worst_case_run_lengths(l, u).map_err(|e| e.to_string())?;
                let sum: u64 = rl.iter().sum();
                let bound = safe_bound(l, u).map_err(|e| e.to_string())?;
                if sum != bound {
                    return Err(format!("l={l} u={u}: sum {sum} != safe_bound {bound}"));
                }
                let lens: Vec<usize> = rl.iter().map(|&x| x as usize).collect();
                let s = RunStack::from_lengths(required_stack_capacity(sum), 0, &lens);
                let report = check_invariant_with(&s, sum, u as usize);
                if !report.is_ok() {
                    return Err(format!("l={l} u={u}: {report}"));
                }
            }
        }
        Ok("8 extremal stacks tight and invariant".into())
    })
}

/// Passes events to `inner` until it reports a violation, then remembers
/// that violation and stops forwarding, so one failing check does not abort
/// the sort for the other observers.
struct Recording<O> {
    inner: O,
    first: Option<Violation>,
}

impl<O: SortObserver> Recording<O> {
    fn new(inner: O) -> Self {
        Recording { inner, first: None }
    }
}

impl<O: SortObserver> SortObserver for Recording<O> {
    fn before(&mut self, event: &Event, view: &StateView<'_>) -> Result<(), Violation> {
        if self.first.is_none() {
            if let Err(v) = self.inner.before(event, view) {
                self.first = Some(v);
            }
        }
        Ok(())
    }

    fn after(&mut self, event: &Event, view: &StateView<'_>) -> Result<(), Violation> {
        if self.first.is_none() {
            if let Err(v) = self.inner.after(event, view) {
                self.first = Some(v);
            }
        }
        Ok(())
    }
}

/// The invariant after every stack mutation, the collapsed shape after every
/// collapse, and the depth against the capacity table.
#[derive(Default)]
struct SafetyObserver {
    checks: u64,
    max_depth: usize,
}

impl SortObserver for SafetyObserver {
    fn after(&mut self, event: &Event, view: &StateView<'_>) -> Result<(), Violation> {
        let n = view.buffer.len() as u64;
        match event {
            Event::PushRun { .. }
            | Event::MergeAt { .. }
            | Event::MergeCollapse
            | Event::MergeForceCollapse => {
                self.checks += 1;
                self.max_depth = self.max_depth.max(view.stack.size());
                if view.stack.size() > required_stack_capacity(n) {
                    return Err(Violation::new(
                        event,
                        format!("depth {} over capacity", view.stack.size()),
                    ));
                }
                let report = check_invariant(view.stack, n);
                if !report.is_ok() {
                    return Err(Violation::new(event, report.to_string()));
                }
                if *event == Event::MergeCollapse {
                    check_collapsed(view.stack.live_lengths(), MIN_RUN)
                        .map_err(|c| Violation::new(event, format!("collapsed state fails {c}")))?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Outcome of sorting the safety workload under both observers.
#[derive(Clone, Debug, Default)]
pub struct WorkloadReport {
    pub arrays: usize,
    pub max_n: usize,
    pub worst_case_depths: Vec<usize>,
    pub invariant_checks: u64,
    pub max_depth: usize,
    pub safety_failures: Vec<String>,
    pub contract_calls: u64,
    pub contract_failures: Vec<String>,
    pub sort_failures: Vec<String>,
    pub elapsed: Duration,
}

/// Array lengths per scale: most small, a few at the top size.
fn workload_sizes(scale: Scale) -> (usize, usize, usize) {
    // (arrays, typical max n, top n)
    match scale {
        Scale::Quick => (600, 2_000, 20_000),
        Scale::Full => (10_000, 10_000, 100_000),
    }
}

/// Legacy-breaking run sequences at u = 16 followed by random runs, so the
/// workload exercises the stack shapes the old collapse rule gets wrong.
fn adversarial_arrays(count: usize) -> Vec<Vec<Element>> {
    let base = search_breaking_sequence(CollapsePolicy::Legacy, 20, 1, 10_000_000)
        .expect("the legacy rule has a short breaking sequence")
        .scaled(MIN_RUN);
    let mut rng = SeededRng::new(0xadd5);
    (0..count)
        .map(|i| {
            let mut lengths = base.lengths().to_vec();
            let extra = rng.below(400) as usize;
            lengths.extend(random_run_lengths(extra, MIN_RUN, &mut rng));
            let seq = RunLenSequence::new(lengths, MIN_RUN).expect("valid lengths");
            sequence_to_array(&seq, i as u64)
        })
        .collect()
}

/// The deterministic list of generator specs for the safety and contract
/// criteria.
pub fn workload_specs(scale: Scale) -> Vec<GenSpec> {
    let (arrays, typical, top) = workload_sizes(scale);
    let mut specs = Vec::with_capacity(arrays);
    let per_depth = arrays / 100;
    for depth in [4usize, 9] {
        for seed in 0..per_depth as u64 {
            specs.push(GenSpec::new(GenKind::WorstCase, 0, seed).with_depth(depth));
        }
    }
    if scale == Scale::Full {
        specs.push(GenSpec::new(GenKind::WorstCase, 0, 0).with_depth(18));
    }
    let kinds = [
        GenKind::UniformRandom,
        GenKind::RunStructured,
        GenKind::Ascending,
        GenKind::Descending,
        GenKind::Constant,
    ];
    let mut rng = SeededRng::new(0x5afe);
    let mut i = 0u64;
    while specs.len() < arrays {
        let kind = kinds[(i % kinds.len() as u64) as usize];
        let n = if i % 500 == 499 {
            top
        } else {
            // Roughly log-uniform on 0..=typical.
            let bits = rng.below(64 - (typical as u64).leading_zeros() as u64 + 1);
            (rng.below(1u64 << bits) as usize).min(typical)
        };
        let mut spec = GenSpec::new(kind, n, i);
        match i % 3 {
            0 => spec = spec.with_alphabet(8),
            1 => spec = spec.with_alphabet(1 << 20),
            _ => {}
        }
        spec = spec.with_u([MIN_RUN, 2 * MIN_RUN, 4 * MIN_RUN][(i / 5 % 3) as usize]);
        specs.push(spec);
        i += 1;
    }
    specs
}

/// Sorts every workload array with the safety observer and the contract
/// checker attached.
pub fn run_workload(cfg: VerifyConfig) -> WorkloadReport {
    let start = Instant::now();
    let mut report = WorkloadReport::default();
    let specs = workload_specs(cfg.scale);
    let adversarial = adversarial_arrays(specs.len() / 200 + 1);
    let inputs = specs.iter().map(|s| (format!("{s:?}"), generate(s))).chain(
        adversarial
            .into_iter()
            .enumerate()
            .map(|(i, a)| (format!("adversarial #{i}"), a)),
    );
    for spec in &specs {
        if spec.kind == GenKind::WorstCase {
            if let Some(d) = spec.depth {
                if !report.worst_case_depths.contains(&d) {
                    report.worst_case_depths.push(d);
                }
            }
        }
    }
    for (label, input) in inputs {
        report.arrays += 1;
        report.max_n = report.max_n.max(input.len());
        let mut a = input;
        let mut safety = Recording::new(SafetyObserver::default());
        let mut contracts = Recording::new(ContractChecker::new(FrameCheck::Full));
        let result = timsort_with(&mut a, cfg.policy, (&mut safety, &mut contracts));
        report.invariant_checks += safety.inner.checks;
        report.max_depth = report.max_depth.max(safety.inner.max_depth);
        report.contract_calls += contracts.inner.total_calls();
        if let Some(v) = safety.first {
            report.safety_failures.push(format!("{label}: {v}"));
        }
        if let Some(v) = contracts.first {
            report.contract_failures.push(format!("{label}: {v}"));
        }
        if let Err(e) = result {
            report.sort_failures.push(format!("{label}: {e}"));
        }
    }
    report.elapsed = start.elapsed();
    report
}

fn summarize(failures: &[String]) -> String {
    format!("{} failures, first: {}", failures.len(), failures[0])
}

pub fn criterion_safety(w: &WorkloadReport) -> CriterionResult {
    let mut r = timed(3, SAFETY, None, || {
        if !w.sort_failures.is_empty() {
            return Err(summarize(&w.sort_failures));
        }
        if !w.safety_failures.is_empty() {
            return Err(summarize(&w.safety_failures));
        }
        Ok(format!(
            "{} arrays, max n {}, worst-case depths {:?}, max stack depth {}, {} checks",
            w.arrays, w.max_n, w.worst_case_depths, w.max_depth, w.invariant_checks
        ))
    });
    r.elapsed = w.elapsed;
    if r.elapsed > Duration::from_secs(300) {
        r.passed = false;
        r.detail = format!("{}; over the 5 minute limit", r.detail);
    }
    r
}

pub fn criterion_contracts(w: &WorkloadReport) -> CriterionResult {
    let mut r = timed(5, CONTRACTS, None, || {
        if !w.contract_failures.is_empty() {
            return Err(summarize(&w.contract_failures));
        }
        if w.contract_calls == 0 {
            return Err("no calls checked".into());
        }
        Ok(format!(
            "{} calls checked over {} arrays",
            w.contract_calls, w.arrays
        ))
    });
    r.elapsed = w.elapsed;
    r
}

pub fn criterion_bug(scale: Scale) -> CriterionResult {
    timed(4, BUG, Some(Duration::from_secs(300)), || {
        let budget = 10_000_000;
        let hit = search_breaking_sequence_report(CollapsePolicy::Legacy, 20, 1, budget);
        let seq = hit.sequence.ok_or("legacy search found nothing")?;
        let cap = seq.len() + 1;
        let legacy = replay(&seq, CollapsePolicy::Legacy, cap);
        if !legacy.has_elem_inv_violation() {
            return Err(format!(
                "legacy replay of {seq} records no elem_inv violation"
            ));
        }
        let fixed = replay(&seq, CollapsePolicy::Fixed, cap);
        if !fixed.violations.is_empty() {
            return Err(format!(
                "fixed replay of {seq} records {:?}",
                fixed.violations
            ));
        }
        let miss = search_breaking_sequence_report(CollapsePolicy::Fixed, 12, 1, budget);
        if let Some(s) = miss.sequence {
            return Err(format!("fixed search found {s}"));
        }
        // Complete coverage of a smaller space.
        let exhaustive_runs = match scale {
            Scale::Quick => 7,
            Scale::Full => 9,
        };
        let full =
            search_breaking_sequence_report(CollapsePolicy::Fixed, exhaustive_runs, 1, 100_000_000);
        if let Some(s) = full.sequence {
            return Err(format!("fixed search found {s}"));
        }
        if !full.exhaustive {
            return Err(format!(
                "fixed search up to {exhaustive_runs} runs did not finish"
            ));
        }
        Ok(format!(
            "legacy breaks on {seq} ({} nodes); fixed: none up to 12 runs in {} nodes, none in all {} sequences up to {exhaustive_runs} runs",
            hit.nodes, miss.nodes, full.nodes
        ))
    })
}

/// Generator specs for the oracle comparison.
pub fn oracle_matrix(scale: Scale) -> Vec<GenSpec> {
    let (seeds, sizes): (u64, &[usize]) = match scale {
        Scale::Quick => (3, &[0, 1, 2, 31, 32, 33, 64, 100, 1000, 10_000]),
        Scale::Full => (
            20,
            &[
                0, 1, 2, 3, 15, 16, 17, 31, 32, 33, 63, 64, 65, 100, 1000, 4096, 10_000, 100_000,
            ],
        ),
    };
    let mut specs = Vec::new();
    for &n in sizes {
        for seed in 0..seeds {
            for alphabet in [None, Some(2), Some(8), Some(1 << 16)] {
                let mut s = GenSpec::new(GenKind::UniformRandom, n, seed);
                s.alphabet = alphabet;
                specs.push(s);
            }
            for u in [1, MIN_RUN, 4 * MIN_RUN] {
                specs.push(GenSpec::new(GenKind::RunStructured, n, seed).with_u(u));
            }
            for kind in [GenKind::Ascending, GenKind::Descending, GenKind::Constant] {
                specs.push(GenSpec::new(kind, n, seed));
            }
        }
    }
    for seed in 0..seeds {
        for depth in 2..=9 {
            for u in [1, MIN_RUN] {
                specs.push(
                    GenSpec::new(GenKind::WorstCase, 0, seed)
                        .with_depth(depth)
                        .with_u(u),
                );
            }
        }
    }
    specs
}

fn oracle_check(input: &[Element], policy: CollapsePolicy) -> Result<(), String> {
    let expect = reference_sort(input);
    let mut got = input.to_vec();
    timsort_with(&mut got, policy, ()).map_err(|e| e.to_string())?;
    match got.iter().zip(&expect).position(|(a, b)| a != b) {
        None if got.len() == expect.len() => Ok(()),
        None => Err("length changed".into()),
        Some(i) => Err(format!("index {i}: {} vs {}", got[i], expect[i])),
    }
}

pub fn criterion_oracle(cfg: VerifyConfig) -> CriterionResult {
    timed(6, ORACLE, None, || {
        let specs = oracle_matrix(cfg.scale);
        for spec in &specs {
            oracle_check(&generate(spec), cfg.policy).map_err(|e| format!("{spec:?}: {e}"))?;
        }
        let mut exhaustive = 0u64;
        for len in 0..=8u32 {
            for code in 0..3u32.pow(len) {
                let keys: Vec<i64> = (0..len)
                    .map(|i| ((code / 3u32.pow(i)) % 3) as i64)
                    .collect();
                oracle_check(&Element::tagged(&keys), cfg.policy)
                    .map_err(|e| format!("{keys:?}: {e}"))?;
                exhaustive += 1;
            }
        }
        Ok(format!(
            "{} generated arrays, {exhaustive} exhaustive arrays",
            specs.len()
        ))
    })
}

/// Checks one copy instance against the four lemmas: the length is kept,
/// positions before `n` and from `n + l` on are untouched, and position
/// `i` in `n..n + l` holds `ys[i - n + m]`. Also runs the same instance
/// with the source aliased to the destination.
pub fn check_list_copy_lemmas(
    xs: &[u32],
    n: usize,
    ys: &[u32],
    m: usize,
    l: usize,
) -> Result<(), String> {
    let mut out = xs.to_vec();
    array_copy(&mut out, n, ys, m, l).map_err(|e| e.to_string())?;
    let lemmas = |out: &[u32], src: &[u32]| -> Result<(), String> {
        if out.len() != xs.len() {
            return Err("length".into());
        }
        for i in 0..xs.len() {
            let expect = if i < n || i >= n + l {
                xs[i]
            } else {
                src[i - n + m]
            };
            if out[i] != expect {
                let which = if i < n {
                    "front"
                } else if i < n + l {
                    "mid"
                } else {
                    "end"
                };
                return Err(format!("{which} at {i}"));
            }
        }
        Ok(())
    };
    lemmas(&out, ys).map_err(|e| format!("{e} for xs={xs:?} n={n} ys={ys:?} m={m} l={l}"))?;
    if m + l <= xs.len() {
        let mut aliased = xs.to_vec();
        array_copy_within(&mut aliased, n, m, l).map_err(|e| e.to_string())?;
        lemmas(&aliased, xs).map_err(|e| format!("aliased {e} for xs={xs:?} n={n} m={m} l={l}"))?;
    }
    Ok(())
}

pub fn criterion_list_copy(scale: Scale) -> CriterionResult {
    timed(7, LIST_COPY, Some(Duration::from_secs(30)), || {
        let mut count = 0u64;
        // Exhaustive: all lengths <= 5, all valid offsets, distinct values.
        for xl in 0..=5usize {
            for yl in 0..=5usize {
                let xs: Vec<u32> = (0..xl as u32).collect();
                let ys: Vec<u32> = (100..100 + yl as u32).collect();
                for l in 0..=xl.min(yl) {
                    for n in 0..=xl - l {
                        for m in 0..=yl - l {
                            check_list_copy_lemmas(&xs, n, &ys, m, l)?;
                            count += 1;
                        }
                    }
                }
            }
        }
        let random = match scale {
            Scale::Quick => 10_000,
            Scale::Full => 100_000,
        };
        let mut rng = SeededRng::new(0xc0b1);
        for _ in 0..random {
            let xl = rng.below(65) as usize;
            let yl = rng.below(65) as usize;
            let xs: Vec<u32> = (0..xl).map(|_| rng.next_u64() as u32).collect();
            let ys: Vec<u32> = (0..yl).map(|_| rng.next_u64() as u32).collect();
            let l = rng.below(xl.min(yl) as u64 + 1) as usize;
            let n = rng.below((xl - l) as u64 + 1) as usize;
            let m = rng.below((yl - l) as u64 + 1) as usize;
            check_list_copy_lemmas(&xs, n, &ys, m, l)?;
            count += 1;
        }
        Ok(format!("{count} instances"))
    })
}
