use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigidity")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Value of the first `key: value` line.
fn field<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    let prefix = format!("{key}: ");
    text.lines().find_map(|l| l.strip_prefix(prefix.as_str()))
}

#[test]
fn bound_prints_exact_values() {
    let o = run(&["bound", "--irr", "2", "--mdeg", "1", "--dim", "1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(field(&s, "mode"), Some("exact"));
    assert_eq!(field(&s, "bound"), Some("18"));
}

#[test]
fn bound_switches_to_tower_form() {
    let o = run(&["bound", "--irr", "1", "--mdeg", "2", "--dim", "2", "--digits-budget", "10"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(field(&s, "mode"), Some("symbolic"));
    assert!(field(&s, "bound").unwrap().ends_with("+ 5"));
    assert!(field(&s, "log10_estimate").unwrap().starts_with("4.81648"));
}

#[test]
fn bound_rejects_zero_components() {
    let o = run(&["bound", "--irr", "0", "--mdeg", "1", "--dim", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn escape_finds_the_short_witness() {
    let v = data("trace_two.ideal");
    let g = data("sanov.json");
    let o = run(&["escape", "--ambient", "sl2", "--variety", &v, "--group", &g, "--horizon", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(field(&s, "witness"), Some("ab"));
    assert_eq!(field(&s, "witness_length"), Some("2"));
    assert_eq!(field(&s, "witness_matrix"), Some("[[5, 2], [2, 1]]"));
    assert_eq!(field(&s, "within_bound"), Some("true"));
    assert_eq!(field(&s, "tower_bound_decrement"), Some("true"));
    assert!(s.contains("reason=dimension_drop"));
}

#[test]
fn escape_below_the_witness_length_is_inconclusive() {
    let v = data("trace_two.ideal");
    let g = data("sanov.json");
    let o = run(&["escape", "--ambient", "sl2", "--variety", &v, "--group", &g, "--horizon", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(field(&stdout(&o), "witness"), Some("NOT_FOUND"));
}

#[test]
fn escape_rejects_mismatched_ambient() {
    let v = data("trace_two.ideal");
    let g = data("sanov.json");
    let o = run(&["escape", "--ambient", "sl3", "--variety", &v, "--group", &g, "--horizon", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn spectrum_rows_are_sorted() {
    let rep = data("schottky.json");
    let o = run(&["spectrum", "--rep", &rep, "--invariant", "cartan", "--radius", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(field(&s, "rows"), Some("17"));
    let lengths: Vec<usize> = s
        .lines()
        .filter(|l| l.contains('\t'))
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(lengths.len(), 17);
    assert!(lengths.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn spectrum_of_translation_invariant_needs_affine_input() {
    let rep = data("schottky.json");
    let o = run(&["spectrum", "--rep", &rep, "--invariant", "margulis", "--radius", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn compare_separates_the_perturbed_pair() {
    let (a, b) = (data("schottky.json"), data("schottky_perturbed.json"));
    let o = run(&["compare", "--rep1", &a, "--rep2", &b, "--invariant", "jordan", "--radius", "3", "--tol", "1e-9"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(field(&s, "spectra"), Some("SEPARATED"));
    let len: usize = field(&s, "separating_length").unwrap().parse().unwrap();
    assert!(len <= 3);
}

#[test]
fn conjugate_recovers_a_witness() {
    let (a, b) = (data("schottky.json"), data("schottky_conjugate.json"));
    for mode in ["exact", "numeric"] {
        let o = run(&["conjugate", "--rep1", &a, "--rep2", &b, "--mode", mode]);
        assert!(o.status.success());
        let s = stdout(&o);
        assert_eq!(field(&s, "result"), Some("FOUND"));
        assert_eq!(field(&s, "mode"), Some(mode));
    }
}

#[test]
fn verdict_on_the_translated_pair() {
    let (a, b) = (data("affine_so21.json"), data("affine_so21_untranslated.json"));
    let o = run(&["verdict", "--rep1", &a, "--rep2", &b, "--invariant", "jordan", "--profile", "1,2,2"]);
    assert_eq!(o.status.code(), Some(2));
    let s = stdout(&o);
    assert_eq!(field(&s, "verdict"), Some("INCONCLUSIVE_AT_CAP"));
    assert_eq!(field(&s, "radius_checked"), Some("4"));
    assert_eq!(field(&s, "capped"), Some("true"));
    assert_eq!(field(&s, "certificate"), Some("NONE"));

    let o = run(&["verdict", "--rep1", &a, "--rep2", &b, "--invariant", "margulis-norm", "--radius", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "verdict"), Some("NOT_EQUIVALENT"));
}

#[test]
fn verdict_json_output_parses() {
    let (a, b) = (data("schottky.json"), data("schottky_conjugate.json"));
    let o = run(&["--json", "verdict", "--rep1", &a, "--rep2", &b, "--invariant", "jordan", "--radius", "2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "EQUIVALENT");
    assert_eq!(v["recovery"]["residual"], 0.0);
}

#[test]
fn malformed_representation_is_an_input_error() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "{{\"ambient\": {{\"kind\": \"sl\", \"n\": 2}}, \"generators\": [{{\"name\": \"a\", \"matrix\": [[2, 0], [0, 1]]}}]}}").unwrap();
    let path = f.path().to_string_lossy().into_owned();
    let o = run(&["compare", "--rep1", &path, "--rep2", &path, "--invariant", "jordan", "--radius", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
}

#[test]
fn missing_radius_choice_is_an_input_error() {
    let a = data("schottky.json");
    let o = run(&["verdict", "--rep1", &a, "--rep2", &a, "--invariant", "jordan"]);
    assert_eq!(o.status.code(), Some(3));
}
