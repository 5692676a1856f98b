use std::fs;
use std::process::{Command, Output};

fn cohres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohres")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_lines(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .take_while(|l| !l.starts_with("# quadrature"))
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn gamma_table_csv() {
    let text = stdout(&cohres(&["gamma-table", "--radius-sq", "1", "--max-n", "3"]));
    let rows = data_lines(&text);
    assert_eq!(rows[0], ["n", "I", "Q", "recurrence_residual"]);
    assert_eq!(rows.len(), 5);
    let i0: f64 = rows[1][1].parse().unwrap();
    assert!((i0 - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
}

#[test]
fn converge_vacuum_errors() {
    let text = stdout(&cohres(&["converge", "--vector", "fock 0", "--dim", "16", "--radii", "1,2,3"]));
    let rows = data_lines(&text);
    assert_eq!(rows[0], ["radius", "strong_error", "weak_defect_self", "norm_witness", "paper_bound"]);
    for (row, r) in rows[1..].iter().zip([1.0f64, 2.0, 3.0]) {
        let err: f64 = row[1].parse().unwrap();
        assert!((err - (-r * r).exp()).abs() <= 1e-13 * err);
    }
}

#[test]
fn converge_json_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.toml");
    let out = dir.path().join("out.json");
    fs::write(
        &cfg,
        format!(
            "vector = \"coherent 1,0\"\ndim = 32\nradii = {{ start = 1.0, factor = 2.0, count = 3 }}\nformat = \"json\"\noutput = {:?}\n",
            out
        ),
    )
    .unwrap();
    stdout(&cohres(&["converge", "--config", cfg.to_str().unwrap()]));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let text = json.to_string();
    assert!(text.contains("strong_error"), "{text}");
    assert!(text.contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn select_radius_meets_target() {
    let text = stdout(&cohres(&["select-radius", "--vector", "fock 3", "--dim", "8", "--eps", "1e-4"]));
    let rows = data_lines(&text);
    assert_eq!(rows[0], ["eps", "head_modes", "radius", "strong_error"]);
    assert!(rows[1][3].parse::<f64>().unwrap() < 1e-4);
}

#[test]
fn norm_witness_and_quadrature_compare() {
    let text = stdout(&cohres(&["norm-witness", "--radius", "1", "--max-m", "10"]));
    let rows = data_lines(&text);
    assert!(rows[1][3].parse::<f64>().unwrap() > 0.99);

    let text = stdout(&cohres(&[
        "quadrature-compare",
        "--radius",
        "2",
        "--dim",
        "12",
        "--vector",
        "coherent 0.5,0.5",
        "--grid",
        "32x32",
        "--levels",
        "2",
    ]));
    assert_eq!(data_lines(&text).len(), 3);
}

#[test]
fn file_vector_spec() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.txt");
    fs::write(&path, "# re im\n1 0\n0 1\n").unwrap();
    let spec = format!("file {}", path.display());
    let text = stdout(&cohres(&["resolve", "--radius", "1", "--dim", "4", "--vector", &spec]));
    assert_eq!(data_lines(&text).len(), 5);
}

#[test]
fn bad_input_exits_nonzero() {
    for args in [
        vec!["gamma-table", "--radius-sq", "-1", "--max-n", "3"],
        vec!["resolve", "--radius", "1", "--dim", "4", "--vector", "fock 9"],
        vec!["select-radius", "--vector", "fock 0", "--dim", "4", "--eps", "0"],
        vec!["converge", "--vector", "bogus 1"],
    ] {
        let out = cohres(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}
