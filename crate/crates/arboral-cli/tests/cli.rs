//! End-to-end tests of the command-line interface: flags, file formats,
//! exit codes, and output determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn arboral(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arboral"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn write_demo6(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("demo6.txt");
    fs::write(&path, "6\n1\n2\n4\n3\n5\n").unwrap();
    path
}

#[test]
fn gen_writes_the_exact_instance_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let out = arboral(&["gen", "--pattern", "zigzag", "--n", "5", "zig.txt"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(fs::read_to_string(dir.path().join("zig.txt")).unwrap(), "1\n5\n2\n4\n3\n");
    assert!(stdout(&out).contains("n=5"));
    assert!(stdout(&out).contains("hash="));
}

#[test]
fn gen_rejects_impossible_patterns() {
    let dir = tempfile::tempdir().unwrap();
    let out = arboral(&["gen", "--pattern", "bit-reversal", "--n", "6", "x.txt"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("power-of-two"), "stderr: {}", stderr(&out));
}

#[test]
fn run_reports_the_added_count_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_demo6(dir.path());
    let out = arboral(
        &[
            "run",
            "--input",
            input.to_str().unwrap(),
            "--trace-out",
            "trace.json",
            "--stats-out",
            "stats.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("added=9"), "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("total=15"));

    let trace: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("trace.json")).unwrap()).unwrap();
    assert_eq!(trace["n"], 6);
    assert_eq!(trace["steps"][3]["added_x"], serde_json::json!([2, 6]));
    let stats = fs::read_to_string(dir.path().join("stats.csv")).unwrap();
    assert!(stats.starts_with("# instance_hash="));
    assert!(stats.contains("t,access_key,num_added,cumulative_added\n"));
    assert!(stats.ends_with("6,5,2,9\n"));
}

#[test]
fn run_rejects_malformed_input_with_a_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "1\n2\noops\n3\n").unwrap();
    let out = arboral(&["run", "--input", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "stderr: {}", stderr(&out));
}

#[test]
fn run_rejects_non_permutations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.txt");
    fs::write(&path, "2\n2\n1\n").unwrap();
    let out = arboral(&["run", "--input", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("accessed twice"), "stderr: {}", err);
    assert!(err.contains("line 2"), "stderr: {}", err);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = arboral(&["run", "--no-such-flag"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = arboral(&["verify", "--input", "x", "--lemmas", "bogus"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // Unreadable input and unwritable output paths are input errors too.
    let out = arboral(&["run", "--input", "no-such-file.txt"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let input = write_demo6(dir.path());
    let out = arboral(
        &["run", "--input", input.to_str().unwrap(), "--trace-out", "no-such-dir/t.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no-such-dir"), "stderr: {}", stderr(&out));
}

#[test]
fn oracle_writes_the_result_json() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_demo6(dir.path());
    let out = arboral(
        &["oracle", "--input", input.to_str().unwrap(), "--out", "oracle.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("status=exact size=7"), "stdout: {}", stdout(&out));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("oracle.json")).unwrap()).unwrap();
    assert_eq!(json["status"], "exact");
    assert_eq!(json["size"], 7);
    assert_eq!(json["points"].as_array().unwrap().len(), 7);
}

#[test]
fn oracle_reports_budget_exhaustion_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_demo6(dir.path());
    let out = arboral(
        &["oracle", "--input", input.to_str().unwrap(), "--node-budget", "3"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(stdout(&out).contains("status=budget_exhausted"));
}

#[test]
fn verify_passes_on_the_demo_instance() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_demo6(dir.path());
    let out = arboral(
        &["verify", "--input", input.to_str().unwrap(), "--report", "report.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("global_bound ok"));
    assert!(text.contains("PASS partitions=5"), "stdout: {}", text);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["all_hard_hold"], true);
    assert_eq!(json["partitions"].as_array().unwrap().len(), 5);
    assert_eq!(json["global"]["lemma"], "global_bound");
}

#[test]
fn verify_can_restrict_lemmas_and_partition_family() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_demo6(dir.path());
    let out = arboral(
        &[
            "verify",
            "--input",
            input.to_str().unwrap(),
            "--lemmas",
            "state-changes,cross-additions",
            "--partitions",
            "all-halves",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("state_changes ok"));
    assert!(text.contains("cross_additions_into_p ok"));
    assert!(!text.contains("corner_growth"));
    // n = 6: equal halves are 5 + 3 + 1 partitions over k = 1, 2, 3.
    assert!(text.contains("PASS partitions=9"), "stdout: {}", text);
}

#[test]
fn scale_emits_one_row_per_size_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = arboral(
        &["scale", "--n", "8,16", "--seeds", "2", "--out", "scale.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("scale.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,seed,added,bound,ratio,instance_hash");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("8,0,"));
    assert!(lines[4].starts_with("16,1,"));
}

#[test]
fn ratio_exhaustive_matches_the_known_worst_case() {
    let dir = tempfile::tempdir().unwrap();
    let out = arboral(
        &["ratio", "--n", "3", "--mode", "exhaustive", "--out", "ratio.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("max_ratio=1.200000"), "stdout: {}", stdout(&out));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("ratio.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 6);
    assert_eq!(json["exact_rows"], 6);
    assert_eq!(json["max_ratio"], 1.2);
}

#[test]
fn ratio_exhaustive_refuses_large_n() {
    let dir = tempfile::tempdir().unwrap();
    let out = arboral(&["ratio", "--n", "9", "--mode", "exhaustive"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("sample"), "stderr: {}", stderr(&out));
}

#[test]
fn outputs_are_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_demo6(dir.path());
    for (args, files) in [
        (
            vec![
                "run",
                "--input",
                input.to_str().unwrap(),
                "--trace-out",
                "a.json",
                "--stats-out",
                "a.csv",
            ],
            vec!["a.json", "a.csv"],
        ),
        (
            vec!["verify", "--input", input.to_str().unwrap(), "--report", "v.json"],
            vec!["v.json"],
        ),
        (
            vec!["oracle", "--input", input.to_str().unwrap(), "--out", "o.json"],
            vec!["o.json"],
        ),
    ] {
        let first = arboral(&args, dir.path());
        assert!(first.status.success());
        let snapshots: Vec<Vec<u8>> =
            files.iter().map(|f| fs::read(dir.path().join(f)).unwrap()).collect();
        let second = arboral(&args, dir.path());
        assert_eq!(stdout(&first), stdout(&second));
        for (file, snapshot) in files.iter().zip(&snapshots) {
            assert_eq!(
                &fs::read(dir.path().join(file)).unwrap(),
                snapshot,
                "file {} changed between reruns",
                file
            );
        }
    }
}
