use std::process::{Command, Output};

fn qdeform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdeform")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn datum_check_passes_for_a2() {
    let o = qdeform(&["datum-check", "--preset", "A2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("all conditions pass"));
}

#[test]
fn q_equal_one_violates_the_order_conditions() {
    let o = qdeform(&["datum-check", "--preset", "A2", "--q", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("C3"));
}

#[test]
fn malformed_json_is_a_usage_error() {
    let dir = std::env::temp_dir().join(format!("qdeform-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, "{\"cartan_matrix\": [[2, -1], ").unwrap();
    let o = qdeform(&["datum-check", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_source_and_bad_flags_exit_with_two() {
    assert_eq!(qdeform(&["hilbert"]).status.code(), Some(2));
    assert_eq!(qdeform(&["hilbert", "--preset", "G2"]).status.code(), Some(2));
    assert_eq!(qdeform(&["hilbert", "--preset", "A1", "--degree", "0"]).status.code(), Some(2));
}

#[test]
fn input_file_matches_preset() {
    let dir = std::env::temp_dir().join(format!("qdeform-cli-in-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("a2.json");
    std::fs::write(&path, r#"{"cartan_matrix": [[2, -1], [-1, 2]], "q": "formal"}"#).unwrap();
    let a = qdeform(&["hilbert", "--input", path.to_str().unwrap(), "--degree", "5"]);
    let b = qdeform(&["hilbert", "--preset", "A2", "--degree", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn borel_hilbert_ranks_for_sl3() {
    let o = qdeform(&["hilbert", "--preset", "A2", "--degree", "6", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let ranks: Vec<u64> = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(ranks, vec![1, 2, 4, 6, 9, 12, 16]);
}

#[test]
fn deform_reports_no_mismatches() {
    let o = qdeform(&["deform", "--preset", "A1", "--degree", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("0 mismatches"), "{}", stdout(&o));
}

#[test]
fn normal_form_of_x_plus_x_minus() {
    let o = qdeform(&["nf", "--preset", "A1", "--expr", "x[1]x[-1]"]);
    assert_eq!(o.status.code(), Some(0));
    let nf = stdout(&o);
    // The reordered word carries q^{-2}; the remaining terms lie in the group algebra.
    assert!(nf.contains("(1)/(q^2) * x[-1]x[1]"), "{nf}");
    assert!(!nf.contains("x[1]x[-1]"));
}

#[test]
fn nf_rejects_unknown_letters() {
    let o = qdeform(&["nf", "--preset", "A1", "--expr", "x[7]"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn overlaps_and_hopf_pass() {
    assert_eq!(qdeform(&["overlaps", "--preset", "A2", "--degree", "4"]).status.code(), Some(0));
    assert_eq!(qdeform(&["hopf", "--preset", "A1", "--degree", "3"]).status.code(), Some(0));
}

#[test]
fn default_classification_groups_squares() {
    let o = qdeform(&["classify", "--preset", "A1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let orbits = v["result"]["orbits"].as_array().unwrap();
    // μ ∈ {1, q, q², 4, 0}: 1, q² and 4 differ by squares; q and 0 are alone.
    assert_eq!(orbits.len(), 3);
}

#[test]
fn whitehead_reduces_every_sample() {
    let o = qdeform(&["whitehead", "--preset", "A2", "--samples", "4", "--dim", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("4/4"));
}

#[test]
fn output_is_deterministic() {
    let args = ["whitehead", "--preset", "A1", "--samples", "5", "--seed", "11", "--format", "json"];
    let a = qdeform(&args);
    let b = qdeform(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = qdeform(&["classify", "--preset", "A2", "--format", "json"]);
    let d = qdeform(&["classify", "--preset", "A2", "--format", "json"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn datum_documents_are_accepted() {
    let dir = std::env::temp_dir().join(format!("qdeform-cli-doc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("borel_sl2.json");
    std::fs::write(
        &path,
        r#"{"rank": 1, "letters": [{"label": "1", "block": 0, "g": [1], "chi": ["q^2"]}], "gcm": {"a": [[2]], "d": [1]}}"#,
    )
    .unwrap();
    let o = qdeform(&["datum-check", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    // q_11 = 1 breaks the order condition.
    std::fs::write(&path, r#"{"rank": 1, "letters": [{"label": "1", "block": 0, "g": [1], "chi": ["1"]}], "gcm": {"a": [[2]], "d": [1]}}"#).unwrap();
    assert_eq!(qdeform(&["datum-check", "--input", path.to_str().unwrap()]).status.code(), Some(1));
}
