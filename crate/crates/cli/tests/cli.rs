use std::path::PathBuf;
use std::process::Command;

use dfusion_cli::{run, AssessReport, BatchRow, EpsilonReport, FuseReport};
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

struct Run {
    code: u8,
    stdout: String,
    stderr: String,
}

fn dfusion(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dfusion").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write_temp(contents: &str) -> tempfile::NamedTempFile {
    use std::io::Write;
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn path_str(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn epsilon_prints_matrix_and_coefficient() {
    let path = fixture("linguistic_constants.json");
    let r = dfusion(&["epsilon", path_str(&path)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    for v in ["0.0577", "0.0810", "0.0449", "0.2353"] {
        assert_eq!(r.stdout.matches(v).count(), 2, "{v} in\n{}", r.stdout);
    }
    let eps_line = r.stdout.lines().last().unwrap();
    let eps: f64 = eps_line.trim_start_matches("epsilon = ").parse().unwrap();
    assert!((eps - 0.042).abs() <= 5e-4, "{eps_line}");

    let j = dfusion(&["epsilon", path_str(&path), "--format", "json"]);
    let report: EpsilonReport = serde_json::from_str(&j.stdout).unwrap();
    assert_eq!(report.labels.len(), 5);
    assert!((report.epsilon - 0.042).abs() <= 5e-4);
}

#[test]
fn epsilon_of_disjoint_pair_is_zero() {
    let f = write_temp(
        r#"{"granules": [{"label": "a", "shape": [0, 1, 2, 3]}, {"label": "b", "shape": [4, 5, 6, 7]}]}"#,
    );
    let r = dfusion(&["epsilon", path_str(f.path())]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.ends_with("epsilon = 0.0000\n"), "{}", r.stdout);
}

#[test]
fn epsilon_rejects_unordered_shape_naming_the_granule() {
    let f = write_temp("{\"granules\": [\n  {\"label\": \"Low\", \"shape\": [0.04, 0.1, 0.18, 0.23]},\n  {\"label\": \"Backwards\", \"shape\": [0.5, 0.4, 0.6, 0.7]}\n]}");
    let r = dfusion(&["epsilon", path_str(f.path())]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("Backwards"), "{}", r.stderr);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn epsilon_needs_two_granules() {
    let f = write_temp(r#"{"granules": [{"label": "a", "shape": [0, 1, 2, 3]}]}"#);
    assert_eq!(dfusion(&["epsilon", path_str(f.path())]).code, 1);
}

#[test]
fn fuse_reproduces_linguistic_example() {
    let path = fixture("linguistic_dnumbers.json");
    let r = dfusion(&[
        "fuse",
        path_str(&path),
        "--epsilon",
        "0.042",
        "--format",
        "json",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report: FuseReport = serde_json::from_str(&r.stdout).unwrap();
    let mass = |labels: &[&str]| {
        report
            .result
            .masses
            .iter()
            .find(|m| {
                let mut a = m.focal.clone();
                a.sort();
                let mut b: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
                b.sort();
                a == b
            })
            .map(|m| m.value)
            .unwrap_or(0.0)
    };
    let expected: [(&[&str], f64); 6] = [
        (&["Low"], 0.3096),
        (&["Low", "Fairly low"], 0.2359),
        (&["Medium"], 0.3232),
        (&["Fairly high"], 0.0213),
        (&["High", "Medium"], 0.1039),
        (
            &["Low", "Fairly low", "Medium", "Fairly high", "High"],
            0.0061,
        ),
    ];
    for (labels, want) in expected {
        assert!((mass(labels) - want).abs() <= 5e-3, "{labels:?}");
    }
    assert_eq!(report.conflicts.len(), 1);

    let text = dfusion(&["fuse", path_str(&path), "--epsilon", "0.042"]);
    assert!(text.stdout.starts_with("{Low} "), "{}", text.stdout);
    assert!(
        text.stdout.contains("conflict k1 = 0.7070"),
        "{}",
        text.stdout
    );
}

#[test]
fn fuse_needs_two_inputs() {
    let f = write_temp(r#"[{"frame": ["P", "NP"], "masses": [{"focal": ["P"], "value": 1}]}]"#);
    let r = dfusion(&["fuse", path_str(f.path()), "--epsilon", "0"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("at least 2"));
}

#[test]
fn fuse_total_conflict_exits_2() {
    let f = write_temp(
        r#"[{"frame": ["P", "NP"], "masses": [{"focal": ["P"], "value": 1}]},
            {"frame": ["P", "NP"], "masses": [{"focal": ["NP"], "value": 1}]}]"#,
    );
    let r = dfusion(&["fuse", path_str(f.path()), "--epsilon", "0"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("total conflict"));
    // Any positive discount removes the conflict.
    assert_eq!(
        dfusion(&["fuse", path_str(f.path()), "--epsilon", "0.1"]).code,
        0
    );
}

#[test]
fn fuse_rejects_bad_epsilon_and_mixed_frames() {
    let path = fixture("linguistic_dnumbers.json");
    assert_eq!(
        dfusion(&["fuse", path_str(&path), "--epsilon", "1.5"]).code,
        1
    );
    let f = write_temp(
        r#"[{"frame": ["P", "NP"], "masses": [{"focal": ["P"], "value": 1}]},
            {"frame": ["P", "Q"], "masses": [{"focal": ["Q"], "value": 1}]}]"#,
    );
    let r = dfusion(&["fuse", path_str(f.path()), "--epsilon", "0.1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("different frames"));
}

#[test]
fn fuse_normalizes_incomplete_inputs() {
    let f = write_temp(
        r#"[{"frame": ["b1", "b2", "b3"], "masses": [{"focal": ["b1"], "value": 0.2}, {"focal": ["b3"], "value": 0.6}, {"focal": ["b1", "b2", "b3"], "value": 0.1}]},
            {"frame": ["b1", "b2", "b3"], "masses": [{"focal": ["b1", "b2", "b3"], "value": 1}]}]"#,
    );
    let r = dfusion(&[
        "fuse",
        path_str(f.path()),
        "--epsilon",
        "0",
        "--format",
        "json",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report: FuseReport = serde_json::from_str(&r.stdout).unwrap();
    let theta = report
        .result
        .masses
        .iter()
        .find(|m| m.focal.len() == 3)
        .unwrap();
    assert!((theta.value - 0.2).abs() < 1e-12);
}

fn assess(args: &[&str]) -> AssessReport {
    let mut argv = vec!["assess"];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["--format", "json"]);
    let r = dfusion(&argv);
    assert_eq!(r.code, 0, "{}", r.stderr);
    serde_json::from_str(&r.stdout).unwrap()
}

fn close(got: (f64, f64, f64), want: (f64, f64, f64), tol: f64) -> bool {
    (got.0 - want.0).abs() <= tol && (got.1 - want.1).abs() <= tol && (got.2 - want.2).abs() <= tol
}

#[test]
fn assess_reference_points() {
    let cases = [
        (["10", "0", "3"], (0.44, 0.07, 0.49)),
        (["30", "50", "3"], (0.41, 0.06, 0.53)),
        (["10", "0", "20"], (0.0, 0.12, 0.88)),
    ];
    for ([b, p, d], want) in cases {
        let r = assess(&["--breaks", b, "--pressure", p, "--distance", d]);
        let got = (r.risk.p, r.risk.p_np, r.risk.np);
        assert!(close(got, want, 0.01), "{b} {p} {d}: {got:?}");
        assert_eq!(r.verdict, "NP");
    }
}

#[test]
fn assess_text_output() {
    let r = dfusion(&[
        "assess",
        "--breaks",
        "30",
        "--pressure",
        "-20",
        "--distance",
        "3",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(
        r.stdout,
        "risk ({P}, {P,NP}, {NP}) = (0.986, 0.014, 0.000)\n\
         verdict: intrusion possible ({P} carries the largest mass, 0.986)\n"
    );
}

#[test]
fn assess_rejects_bad_numbers() {
    assert_eq!(
        dfusion(&[
            "assess",
            "--breaks",
            "x",
            "--pressure",
            "0",
            "--distance",
            "3"
        ])
        .code,
        1
    );
    assert_eq!(
        dfusion(&[
            "assess",
            "--breaks",
            "1",
            "--pressure",
            "0",
            "--distance",
            "-3"
        ])
        .code,
        1
    );
    assert_eq!(
        dfusion(&[
            "assess",
            "--breaks",
            "NaN",
            "--pressure",
            "0",
            "--distance",
            "3"
        ])
        .code,
        1
    );
    assert_eq!(
        dfusion(&["assess", "--pressure", "0", "--distance", "3"]).code,
        1
    );
}

#[test]
fn assess_with_model_file_and_warning() {
    let model = r#"{"bodies": [
      {"name": "pathway", "unit": "x", "epsilon": 0.9, "curves": [
        {"focal": ["P"], "shape": [0, 0, 10, 30]}, {"focal": ["NP"], "shape": [20, 40, 50, 50]}]},
      {"name": "pressure", "unit": "psi", "epsilon": 0, "curves": [{"focal": ["P", "NP"], "shape": [-100, -100, 100, 100]}]},
      {"name": "source", "unit": "m", "epsilon": 0, "curves": [{"focal": ["P", "NP"], "shape": [0, 0, 100, 100]}]}]}"#;
    let f = write_temp(model);
    let r = dfusion(&[
        "assess",
        "--model",
        path_str(f.path()),
        "--breaks",
        "5",
        "--pressure",
        "0",
        "--distance",
        "1",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(
        r.stderr.starts_with("warning: pathway body"),
        "{}",
        r.stderr
    );
    assert!(r.stdout.contains("(0.100, 0.900, 0.000)"), "{}", r.stdout);
}

#[test]
fn assess_total_conflict_exits_2() {
    let model = r#"{"bodies": [
      {"name": "pathway", "unit": "x", "epsilon": 0, "curves": [{"focal": ["P"], "shape": [0, 0, 10, 10]}]},
      {"name": "pressure", "unit": "psi", "epsilon": 0, "curves": [{"focal": ["NP"], "shape": [0, 0, 10, 10]}]},
      {"name": "source", "unit": "m", "epsilon": 0, "curves": [{"focal": ["P", "NP"], "shape": [0, 0, 10, 10]}]}]}"#;
    let f = write_temp(model);
    let args = [
        "assess",
        "--model",
        path_str(f.path()),
        "--breaks",
        "5",
        "--pressure",
        "5",
        "--distance",
        "5",
    ];
    assert_eq!(dfusion(&args).code, 2);
}

#[test]
fn batch_reference_table() {
    let path = fixture("reference_scenarios.json");
    let r = dfusion(&["batch", path_str(&path), "--format", "json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows: Vec<BatchRow> = serde_json::from_str(&r.stdout).unwrap();
    let ids: Vec<&str> = rows
        .iter()
        .map(|r| match r {
            BatchRow::Assessed { id, .. } | BatchRow::Failed { id, .. } => id.as_str(),
        })
        .collect();
    assert_eq!(ids, ["1", "2", "3", "4", "5", "6"]);
}

#[test]
fn batch_empty_file() {
    let f = write_temp("");
    let r = dfusion(&["batch", path_str(f.path())]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.lines().count(), 1, "header only: {}", r.stdout);
    let j = dfusion(&["batch", path_str(f.path()), "--format", "json"]);
    assert_eq!(
        serde_json::from_str::<Vec<BatchRow>>(&j.stdout).unwrap(),
        vec![]
    );
}

#[test]
fn batch_partial_failure() {
    let f = write_temp(
        r#"[
      {"id": "1", "breaks": 10, "pressure": 0, "distance": 3},
      {"id": "2", "breaks": 10, "pressure": 0, "distance": 20},
      {"id": "3", "breaks": 10, "pressure": "fifty", "distance": 20},
      {"id": "4", "breaks": 30, "pressure": 50, "distance": 20},
      {"id": "5", "breaks": 30, "pressure": 50, "distance": 3},
      {"id": "6", "breaks": 30, "pressure": -20, "distance": 3}
    ]"#,
    );
    let r = dfusion(&["batch", path_str(f.path()), "--format", "json"]);
    assert_eq!(r.code, 0);
    let rows: Vec<BatchRow> = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(rows.len(), 6);
    let failed: Vec<_> = rows
        .iter()
        .filter_map(|r| match r {
            BatchRow::Failed { id, error } => Some((id.as_str(), error.as_str())),
            _ => None,
        })
        .collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0].0, "3");
    assert!(r.stderr.contains("1 of 6 scenarios failed"));

    let text = dfusion(&["batch", path_str(f.path())]);
    assert!(
        text.stdout
            .lines()
            .nth(3)
            .unwrap()
            .starts_with("3   error:"),
        "{}",
        text.stdout
    );
}

#[test]
fn batch_all_rows_failing_is_an_error() {
    let f = write_temp(r#"[{"id": "a", "breaks": 1}, {"id": "b"}]"#);
    assert_eq!(dfusion(&["batch", path_str(f.path())]).code, 1);
    let bad = write_temp("[{\"id\": 1,");
    let r = dfusion(&["batch", path_str(bad.path())]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("line 1"), "{}", r.stderr);
}

#[test]
fn json_output_round_trips_exactly() {
    let path = fixture("reference_scenarios.json");
    let r = dfusion(&["batch", path_str(&path), "--format", "json"]);
    let rows: Vec<BatchRow> = serde_json::from_str(&r.stdout).unwrap();
    let model = dfusion::default_model();
    for row in rows {
        let BatchRow::Assessed {
            breaks,
            pressure,
            distance,
            risk,
            ..
        } = row
        else {
            panic!("unexpected failure");
        };
        let s = dfusion::Scenario::new(breaks, pressure, distance).unwrap();
        let direct = model.assess(&s).unwrap();
        assert_eq!(risk.p.to_bits(), direct.p.to_bits());
        assert_eq!(risk.p_np.to_bits(), direct.p_np.to_bits());
        assert_eq!(risk.np.to_bits(), direct.np.to_bits());
    }
}

#[test]
fn output_is_deterministic() {
    let path = fixture("reference_scenarios.json");
    let first = dfusion(&["batch", path_str(&path)]).stdout;
    for _ in 0..5 {
        assert_eq!(dfusion(&["batch", path_str(&path)]).stdout, first);
    }
    let dn = fixture("linguistic_dnumbers.json");
    let a = dfusion(&[
        "fuse",
        path_str(&dn),
        "--epsilon",
        "0.042",
        "--format",
        "json",
    ])
    .stdout;
    let b = dfusion(&[
        "fuse",
        path_str(&dn),
        "--epsilon",
        "0.042",
        "--format",
        "json",
    ])
    .stdout;
    assert_eq!(a, b);
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(dfusion(&[]).code, 1);
    assert_eq!(dfusion(&["frobnicate"]).code, 1);
    assert_eq!(dfusion(&["epsilon"]).code, 1);
    assert_eq!(dfusion(&["epsilon", "/nonexistent/file.json"]).code, 1);
    assert_eq!(dfusion(&["batch", "x", "--format", "yaml"]).code, 1);
    let help = dfusion(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("epsilon"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_dfusion");
    let ok = Command::new(bin)
        .args([
            "assess",
            "--breaks",
            "10",
            "--pressure",
            "0",
            "--distance",
            "3",
        ])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("(0.442, 0.067, 0.491)"));
    let bad = Command::new(bin)
        .args(["epsilon", "/nonexistent"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let f = write_temp(
        r#"[{"frame": ["P", "NP"], "masses": [{"focal": ["P"], "value": 1}]},
            {"frame": ["P", "NP"], "masses": [{"focal": ["NP"], "value": 1}]}]"#,
    );
    let conflict = Command::new(bin)
        .args(["fuse", path_str(f.path()), "--epsilon", "0"])
        .output()
        .unwrap();
    assert_eq!(conflict.status.code(), Some(2));
}

fn mutate(base: &str, edits: &[(usize, u8, char)]) -> String {
    let mut chars: Vec<char> = base.chars().collect();
    for &(pos, op, c) in edits {
        if chars.is_empty() {
            chars.push(c);
            continue;
        }
        let i = pos % chars.len();
        match op % 3 {
            0 => {
                chars.remove(i);
            }
            1 => chars.insert(i, c),
            _ => chars[i] = c,
        }
    }
    chars.into_iter().collect()
}

fn json_char() -> impl Strategy<Value = char> {
    prop_oneof![
        prop::sample::select(vec![
            '{', '}', '[', ']', ',', ':', '"', '-', '.', 'e', '0', '9', ' ', '\n'
        ]),
        any::<char>(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mutated_inputs_never_crash(
        which in 0..4usize,
        edits in proptest::collection::vec((any::<usize>(), any::<u8>(), json_char()), 1..8),
    ) {
        let (name, cmd): (&str, &[&str]) = match which {
            0 => ("linguistic_constants.json", &["epsilon"]),
            1 => ("linguistic_dnumbers.json", &["fuse", "--epsilon", "0.042"]),
            2 => ("default_model.json", &["assess", "--breaks", "10", "--pressure", "0", "--distance", "3", "--model"]),
            _ => ("reference_scenarios.json", &["batch"]),
        };
        let base = std::fs::read_to_string(fixture(name)).unwrap();
        let f = write_temp(&mutate(&base, &edits));
        let mut args: Vec<&str> = cmd.to_vec();
        args.push(path_str(f.path()));
        let r = dfusion(&args);
        prop_assert!(r.code <= 2);
    }
}
