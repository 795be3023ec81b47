use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn regstruct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regstruct"))
        .args(args)
        .env_remove("REGSTRUCT_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn run(sub: &str, example: &str, extra: &[&str]) -> (i32, String, String) {
    let input = examples().join(example);
    let mut args = vec![sub, "--input", input.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = regstruct(&args);
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn symbol_tables_match_golden_files() {
    for name in ["phi4_d3", "phi4_d2", "polynomial", "kpz_d1"] {
        let (code, out, _) = run("symbols", &format!("{name}.json"), &[]);
        assert_eq!(code, 0, "{name}");
        assert_eq!(out, golden(&format!("symbols_{name}.txt")), "{name}");
    }
    let (_, csv, _) = run("symbols", "phi4_d3.json", &["--format", "csv"]);
    assert_eq!(csv, golden("symbols_phi4_d3.csv"));
}

#[test]
fn three_dimensional_table_prints_the_double_cherry_degree() {
    let (_, out, _) = run("symbols", "phi4_d3.json", &[]);
    let row = out.lines().find(|l| l.ends_with(" I(I(Xi(1))*I(Xi(1)))*I(Xi(1))*I(Xi(1))")).unwrap();
    assert!(row.starts_with("0 - 4k "), "{row}");
}

#[test]
fn four_dimensional_cubic_model_exits_with_two() {
    let (code, out, _) = run("symbols", "phi4_d4.json", &[]);
    assert_eq!(code, 2);
    assert!(out.contains("non-subcritical"));
    assert_eq!(out, golden("symbols_phi4_d4.txt"));
}

#[test]
fn polynomial_spec_has_only_monomials() {
    let (_, out, _) = run("symbols", "polynomial.json", &["--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for s in v["symbols"].as_array().unwrap() {
        let t = s["tree"].as_str().unwrap();
        assert!(t == "1" || (t.starts_with("X^") && !t.contains('*')), "{t}");
    }
}

#[test]
fn cutoff_override_is_applied() {
    let (_, out, _) = run("symbols", "phi4_d3.json", &["--gamma", "0"]);
    assert!(out.starts_with("# symbols for phi4_d3 (cutoff 0)"));
    assert!(out.lines().skip(2).all(|l| l.starts_with('-')));
}

#[test]
fn renormalisation_maps_match_golden_files() {
    for name in ["renorm_cubic", "renorm_counit"] {
        let (code, out, _) = run("renorm", &format!("{name}.json"), &[]);
        assert_eq!(code, 0);
        assert_eq!(out, golden(&format!("{name}.txt")));
        assert!(out.contains("group law: PASS"));
    }
}

#[test]
fn counit_acts_as_identity() {
    let (_, out, _) = run("renorm", "renorm_counit.json", &[]);
    for line in out.lines().filter(|l| l.starts_with("M_g ")) {
        let (lhs, rhs) = line.trim_start_matches("M_g ").split_once(" = ").unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn character_outside_the_negative_sector_is_an_input_error() {
    let (code, _, err) = run("renorm", "renorm_bad_character.json", &[]);
    assert_eq!(code, 1);
    assert!(err.contains("not in the negative sector"), "{err}");
}

#[test]
fn counterterms_and_dual_couplings() {
    let expect = [
        ("counterterm_phi4_d3.json", "c -> c + 3*c1 - 9*c2"),
        ("counterterm_phi4_d2.json", "c -> c + 3*c1"),
        ("counterterm_counit.json", "c -> c"),
    ];
    for (file, line) in expect {
        let (code, out, _) = run("counterterm", file, &[]);
        assert_eq!(code, 0);
        assert!(out.lines().any(|l| l == line), "{file}: {out}");
        assert_eq!(out, golden(&file.replace(".json", ".txt")));
    }
}

#[test]
fn residual_terms_exit_with_three() {
    let (code, _, err) = run("counterterm", "counterterm_residual.json", &[]);
    assert_eq!(code, 3);
    assert!(err.contains("residual terms: (-c3)*1"), "{err}");
}

#[test]
fn power_counting_reports() {
    for name in ["graph_divergent", "graph_single_p", "graph_variance_a", "graph_variance_b", "graph_variance_c"] {
        let (code, out, _) = run("powercount", &format!("{name}.json"), &[]);
        assert_eq!(code, 0);
        assert_eq!(out, golden(&format!("powercount_{name}.txt")));
    }
    let (_, out, _) = run("powercount", "graph_divergent.json", &[]);
    assert!(out.contains("divergent, margin -1/2, subgraph sum 10.5 > 10"));
    let (_, out, _) = run("powercount", "graph_single_p.json", &[]);
    assert!(out.contains(": convergent"));
}

#[test]
fn malformed_input_reports_its_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"spatial_dimension\": 3,\n  \"rhs_rule\": [ {\"factors\": -1} ]\n}\n").unwrap();
    let out = regstruct(&["symbols", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
    let out = regstruct(&["symbols", "--input", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn outputs_are_written_to_the_directory_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let input = examples().join("phi4_d3.json");
    let out = Command::new(env!("CARGO_BIN_EXE_regstruct"))
        .args(["symbols", "--input", input.to_str().unwrap()])
        .env("REGSTRUCT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    for f in ["symbols.txt", "symbols.csv", "symbols.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert_eq!(std::fs::read_to_string(dir.path().join("symbols.txt")).unwrap(), golden("symbols_phi4_d3.txt"));
}

#[test]
fn csv_is_refused_where_there_is_no_table() {
    let (code, _, err) = run("counterterm", "counterterm_phi4_d3.json", &["--format", "csv"]);
    assert_eq!(code, 1);
    assert!(err.contains("no CSV form"));
}

#[test]
fn simulation_runs_are_deterministic_and_follow_the_seed() {
    let a = run("simulate", "simulate_phi4.json", &["--format", "csv"]);
    let b = run("simulate", "simulate_phi4.json", &["--format", "csv"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    let c = run("simulate", "simulate_phi4.json", &["--format", "csv", "--seed", "99"]);
    assert_ne!(a.1, c.1);
    assert!(a.1.starts_with("time,mean,sup_norm\n"));
}

#[test]
fn ladder_run_writes_trajectories_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) =
        run("simulate", "simulate_ladder.json", &["--format", "json", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let ratios = v["renormalised_gap_ratios"].as_array().unwrap();
    assert_eq!(ratios.len(), 1);
    assert!(ratios[0].as_f64().unwrap() < 0.7);
    assert_eq!(v["naive_monotone"], serde_json::Value::Bool(true));
    for f in ["ladder.csv", "ladder.json", "ladder.txt", "ladder_replicas.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(dir.path().join("ladder_replicas.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 8 * 3);
}

#[test]
fn epsilon_ladder_flag_replaces_the_widths() {
    let (code, out, _) = run("simulate", "simulate_wick.json", &["--format", "csv", "--epsilon-ladder", "0.25,0.125"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
    let values: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(values[1] > values[0]);
}

#[test]
fn toy_distribution_command() {
    let (code, out, _) = run("toy-dist", "toy_gaussian.json", &["--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let d = v["derivative_in_hat_c2"].as_f64().unwrap();
    assert!((d + v["phi_at_zero"].as_f64().unwrap()).abs() < 1e-10);
    for row in v["values"].as_array().unwrap() {
        let eps = row["epsilon"].as_f64().unwrap();
        assert!(row["error"].as_f64().unwrap().abs() < eps);
    }
}
