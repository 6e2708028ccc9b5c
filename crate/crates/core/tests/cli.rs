use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tsort_core::element::{keys_of, Element};
use tsort_core::harness::{generate, reference_sort, GenKind, GenSpec};
use tsort_core::io::{format_text, parse_text};
use tsort_core::stack::required_stack_capacity;

fn tsort(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsort"))
        .args(args)
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn sort_text_file() {
    let dir = tempfile::tempdir().unwrap();
    let (i, o) = (dir.path().join("in"), dir.path().join("out"));
    fs::write(&i, "3\n1\n2\n").unwrap();
    let r = tsort(&["sort", p(&i), p(&o)]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&o).unwrap(), "1\n2\n3\n");
}

#[test]
fn sort_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let (i, o) = (dir.path().join("in"), dir.path().join("out"));
    fs::write(&i, "").unwrap();
    assert_eq!(tsort(&["sort", p(&i), p(&o)]).status.code(), Some(0));
    assert_eq!(fs::read(&o).unwrap(), b"");
}

#[test]
fn sort_generated_fixture_matches_reference() {
    let dir = tempfile::tempdir().unwrap();
    let (i, o) = (dir.path().join("in"), dir.path().join("out"));
    let input = generate(&GenSpec::new(GenKind::UniformRandom, 5000, 3).with_alphabet(50));
    fs::write(&i, format_text(&keys_of(&input))).unwrap();
    let r = tsort(&["sort", p(&i), p(&o), "--check-invariants"]);
    assert_eq!(r.status.code(), Some(0));
    let err = String::from_utf8_lossy(&r.stderr);
    let depth: usize = err
        .split_whitespace()
        .find_map(|w| w.strip_prefix("max_stack_depth="))
        .expect("depth reported")
        .parse()
        .unwrap();
    assert!(depth <= required_stack_capacity(5000));
    let got = parse_text(&fs::read_to_string(&o).unwrap()).unwrap();
    assert_eq!(got, keys_of(&reference_sort(&input)));
}

#[test]
fn sort_bin_round_trip_and_bad_size() {
    let dir = tempfile::tempdir().unwrap();
    let (i, o) = (dir.path().join("in"), dir.path().join("out"));
    let keys: Vec<i64> = vec![7, i64::MIN, -1, 0, i64::MAX];
    fs::write(
        &i,
        keys.iter()
            .flat_map(|k| k.to_le_bytes())
            .collect::<Vec<_>>(),
    )
    .unwrap();
    assert_eq!(
        tsort(&["sort", p(&i), p(&o), "--format", "bin"])
            .status
            .code(),
        Some(0)
    );
    let out = fs::read(&o).unwrap();
    let got: Vec<i64> = out
        .chunks(8)
        .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    assert_eq!(got, vec![i64::MIN, -1, 0, 7, i64::MAX]);

    fs::write(&i, [0u8; 12]).unwrap();
    assert_eq!(
        tsort(&["sort", p(&i), p(&o), "--format", "bin"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn usage_and_io_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope");
    let o = dir.path().join("out");
    assert_eq!(tsort(&["sort", p(&missing), p(&o)]).status.code(), Some(2));
    assert_eq!(tsort(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        tsort(&["gen", "--kind", "zigzag", "-o", p(&o)])
            .status
            .code(),
        Some(2)
    );
    let bad = dir.path().join("bad");
    fs::write(&bad, "1\nx\n").unwrap();
    assert_eq!(tsort(&["sort", p(&bad), p(&o)]).status.code(), Some(2));
    assert_eq!(tsort(&["sim", "--replay", "16,zz"]).status.code(), Some(2));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let r = tsort(&[
            "gen",
            "--kind",
            "uniform-random",
            "--n",
            "1000",
            "--seed",
            "9",
            "-o",
            p(out),
        ]);
        assert_eq!(r.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let r = tsort(&["gen", "--kind", "ascending", "--n", "3", "-o", p(&a)]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&a).unwrap(), "0\n1\n2\n");
}

#[test]
fn gen_worst_case_depth_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().join("w");
    let r = tsort(&[
        "gen",
        "--kind",
        "worst-case",
        "--depth",
        "4",
        "--u",
        "16",
        "-o",
        p(&o),
    ]);
    assert_eq!(r.status.code(), Some(0));
    let keys = parse_text(&fs::read_to_string(&o).unwrap()).unwrap();
    assert_eq!(keys.len(), 119);

    // Sorting it reaches exactly depth 4.
    let mut a = Element::tagged(&keys);
    let stats = tsort_core::timsort(&mut a, true).unwrap();
    assert_eq!(stats.max_stack_depth, 4);
}

#[test]
fn sim_replay_and_search() {
    let r = tsort(&["sim", "--replay", "16", "--policy", "fixed"]);
    assert_eq!(r.status.code(), Some(0));
    let out = stdout(&r);
    assert!(out.contains("max_depth,1\n"));
    assert!(out.contains("violations,0\n"));

    let r = tsort(&[
        "sim",
        "--replay",
        "120,80,25,20,30",
        "--policy",
        "legacy",
        "--u",
        "16",
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stdout(&r).contains("final_stack,120,80,45,30\n"));

    let r = tsort(&[
        "sim",
        "--search",
        "--policy",
        "fixed",
        "--max-runs",
        "12",
        "--u",
        "1",
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(stdout(&r), "none\n");

    let r = tsort(&["sim", "--search", "--policy", "legacy", "--u", "1"]);
    assert_eq!(r.status.code(), Some(0));
    let line = stdout(&r);
    assert!(
        line.trim().split(',').all(|t| t.parse::<usize>().is_ok()),
        "{line}"
    );

    // The found sequence, replayed from a file, breaks the legacy rule only.
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("seq");
    fs::write(&f, &line).unwrap();
    assert_eq!(
        tsort(&["sim", "--replay", p(&f), "--policy", "legacy"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        tsort(&["sim", "--replay", p(&f), "--policy", "fixed"])
            .status
            .code(),
        Some(0)
    );

    let a = tsort(&["sim", "--search", "--policy", "legacy", "--u", "1"]);
    assert_eq!(a.stdout, r.stdout);
}

#[test]
fn bench_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let r = tsort(&[
        "bench",
        "--sizes",
        "0,500",
        "--kinds",
        "uniform-random,descending",
        "--repeats",
        "3",
        "--csv",
        p(&csv),
    ]);
    assert_eq!(r.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("kind,n,seed,repeat,algo,nanos,max_stack_depth,comparisons")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 2 * 3 * 2);
    for row in &rows {
        assert_eq!(row.len(), 8);
        assert!(!row.iter().any(|f| f.contains('"')));
        let n: u64 = row[1].parse().unwrap();
        let _: u128 = row[5].parse().unwrap();
        let depth: usize = row[6].parse().unwrap();
        assert!(depth <= required_stack_capacity(n));
    }
    for kind in ["uniform-random", "descending"] {
        for n in ["0", "500"] {
            for algo in ["timsort", "reference"] {
                let c = rows
                    .iter()
                    .filter(|r| r[0] == kind && r[1] == n && r[4] == algo)
                    .count();
                assert_eq!(c, 3);
            }
        }
    }
}

#[test]
fn verify_quick_and_mutation() {
    let r = tsort(&["verify", "--quick"]);
    assert_eq!(r.status.code(), Some(0), "{}", stdout(&r));
    let out = stdout(&r);
    for name in tsort_core::verify::CRITERIA {
        assert_eq!(out.matches(name).count(), 1, "{name} in {out}");
    }

    let r = tsort(&["verify", "--quick", "--collapse", "legacy"]);
    assert_eq!(r.status.code(), Some(1));
    let out = stdout(&r);
    let line = out
        .lines()
        .find(|l| l.contains("fixed-collapse invariant"))
        .unwrap();
    assert!(line.starts_with("FAIL"), "{line}");
}
