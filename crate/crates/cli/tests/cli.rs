use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ensemble-teleport"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    serde_json::from_str(&ok(&full)).unwrap()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(Result::unwrap)
        .collect()
}

fn session(v: &Value) -> &Value {
    &v["session"][0]
}

#[test]
fn lazy_bob_after_bell_one_gets_one_half() {
    let v = json(&["teleport", "--c11", "0.5", "--c12re", "0", "--c12im", "0", "--prep", "bell1", "--no-correct"]);
    let s = session(&v);
    assert!((s["fidelity_trace"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(s["bob_acts"], false);
}

#[test]
fn automatic_preparation_needs_no_bits() {
    let v = json(&[
        "teleport", "--c11", "1", "--c12re", "0", "--c12im", "0", "--prep", "paut", "--message",
        "preagreed", "--no-correct",
    ]);
    let s = session(&v);
    assert!((s["fidelity_trace"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(s["bits_sent"], 0);
    assert_eq!(s["prep"], "paut");
}

#[test]
fn corrected_bell_two_on_the_purity_boundary() {
    // 0.458 is √0.21 to three places, so the state is pure only up to that
    // rounding: F = 0.3² + 0.7² + 2·0.458² = 0.999528.
    let v = json(&["teleport", "--c11", "0.3", "--c12re", "0.458", "--c12im", "0", "--prep", "bell2", "--correct"]);
    let f = session(&v)["fidelity_trace"].as_f64().unwrap();
    assert!((f - 0.999528).abs() < 1e-12, "{f}");
    assert_eq!(session(&v)["bits_sent"], 2);

    let exact = 0.21f64.sqrt().to_string();
    let v = json(&["teleport", "--c11", "0.3", "--c12re", &exact, "--prep", "bell2", "--correct"]);
    assert!((session(&v)["fidelity_trace"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn teleport_csv_has_fixed_header_and_matches_json() {
    let args = ["teleport", "--c11", "0.35", "--c12re", "-0.2", "--c12im", "0.1", "--prep", "bell3", "--no-correct"];
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let text = ok(&csv_args);
    assert_eq!(
        text.lines().next().unwrap(),
        "c11,c12_re,c12_im,prep,bob_acts,bits_sent,fidelity_trace,fidelity_vector,agree"
    );
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    let v = json(&args);
    let s = session(&v);
    for (k, name) in [(0, "c11"), (1, "c12_re"), (2, "c12_im"), (6, "fidelity_trace"), (7, "fidelity_vector")] {
        let from_csv: f64 = rows[0][k].parse().unwrap();
        assert_eq!(from_csv.to_bits(), s[name].as_f64().unwrap().to_bits(), "{name}");
        // 17 significant digits: d.dddddddddddddddde±x
        assert_eq!(rows[0][k].split('e').next().unwrap().trim_start_matches('-').len(), 18);
    }
    assert_eq!(&rows[0][3], "bell3");
}

#[test]
fn complex_coherence_makes_the_forms_disagree() {
    let v = json(&["teleport", "--c11", "0.5", "--c12im", "0.5", "--prep", "bell1", "--no-correct"]);
    let s = session(&v);
    assert!((s["fidelity_trace"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(s["fidelity_vector"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(s["agree"], false);
    assert!(v["pass"].as_bool().unwrap());
}

#[test]
fn invalid_coefficients_exit_nonzero_and_name_the_invariant() {
    for (args, invariant) in [
        (vec!["--c11", "0.5", "--c12re", "0.6"], "positivity"),
        (vec!["--c11", "1.5"], "nonnegative populations"),
        (vec!["--c11", "NaN"], "finiteness"),
    ] {
        let mut full = vec!["teleport", "--prep", "bell1"];
        full.extend(args);
        let out = run(&full);
        assert!(!out.status.success());
        assert!(out.stdout.is_empty());
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(invariant), "{err}");
    }
}

#[test]
fn two_bit_message_with_automatic_preparation_is_rejected() {
    let out = run(&["teleport", "--c11", "0.5", "--prep", "paut", "--message", "two-bits"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_tolerance_is_rejected() {
    assert_eq!(run(&["bell-audit", "--tol", "-1"]).status.code(), Some(2));
}

#[test]
fn bell_audit_records() {
    let v = json(&["bell-audit"]);
    let pairs = v["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 16);
    assert!(pairs.iter().all(|p| p["residual"].as_f64().unwrap() < 1e-12));
    let ops = v["operators"].as_array().unwrap();
    assert_eq!(ops.len(), 4);
    for o in ops {
        assert_eq!(o["entangled"], true);
        assert!(o["idempotence_residual"].as_f64().unwrap() < 1e-12);
        assert!((o["min_pt_eigenvalue"].as_f64().unwrap() + 0.5).abs() < 1e-10);
    }
    assert!(v["completeness"][0]["residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["pass"], true);

    let text = ok(&["bell-audit", "--format", "csv"]);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 16 + 4 + 1);
    assert!(text.starts_with("record,"));
}

#[test]
fn paut_audit_reports_factor_two_and_the_spectrum_discrepancy() {
    let v = json(&["paut-audit"]);
    let s = &v["summary"][0];
    assert!((s["idempotence_factor"].as_f64().unwrap() - 2.0).abs() < 1e-10);
    assert!((s["spectral_norm"].as_f64().unwrap() - 2.0).abs() < 1e-10);
    assert!((s["trace"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let computed: Vec<f64> = v["spectrum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["computed"].as_f64().unwrap())
        .collect();
    for (x, want) in computed.iter().zip([2.0, 0.0, 0.0, 0.0]) {
        assert!((x - want).abs() < 1e-10);
    }
    let notes = v["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("claimed")));
    assert_eq!(v["pass"], true);
}

#[test]
fn audit_failure_sets_exit_status_one() {
    // The computed leading eigenvalue is 2 − 4e-16, outside an absurd tolerance.
    let out = run(&["paut-audit", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stdout.is_empty());
}

#[test]
fn appendix_check_conventions_agree() {
    let v = json(&["appendix-check", "--samples", "100"]);
    let rows = v["conventions"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert!(r["max_abs_diff"].as_f64().unwrap() < 1e-12);
        let want = if r["prep"] == "paut" { 2.0 } else { 1.0 };
        assert!((r["numerator_factor_min"].as_f64().unwrap() - want).abs() < 1e-12);
        assert!((r["numerator_factor_max"].as_f64().unwrap() - want).abs() < 1e-12);
        assert_eq!(r["pass"], true);
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    for args in [
        vec!["appendix-check", "--samples", "100", "--seed", "7", "--format", "csv"],
        vec!["sweep", "--resolution", "9", "--format", "csv"],
        vec!["sweep", "--resolution", "5", "--prep", "bell3", "--correct", "--format", "json"],
    ] {
        assert_eq!(ok(&args), ok(&args), "{args:?}");
    }
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let p = path.to_str().unwrap();
    let printed = ok(&["sweep", "--resolution", "4", "--format", "csv"]);
    let written = ok(&["sweep", "--resolution", "4", "--format", "csv", "--out", p]);
    assert!(written.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}

#[test]
fn sweep_grid_cardinality_and_slices() {
    let text = ok(&["sweep", "--resolution", "101", "--format", "csv"]);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 101 * 101 * 8);
    let f = |r: &csv::StringRecord, k: usize| r[k].parse::<f64>().unwrap();

    // c12 = 0 slice
    let (best_c11, best) = rows
        .iter()
        .filter(|r| f(r, 1) == 0.0)
        .map(|r| (f(r, 0), f(r, 5)))
        .fold((f64::NAN, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    assert!((best - 0.5).abs() < 1e-12);
    assert_eq!(best_c11, 0.5);

    // pure slice
    let pure: Vec<f64> = rows.iter().filter(|r| f(r, 1) == 1.0).map(|r| f(r, 5)).collect();
    assert_eq!(pure.len(), 101 * 8);
    assert!(pure.iter().all(|x| x.abs() < 1e-12));

    // grid order: c11 outermost, then coherence, then phase
    let keys: Vec<(f64, f64, f64)> = rows.iter().map(|r| (f(r, 0), f(r, 1), f(r, 2))).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn sweep_json_round_trips_csv_values() {
    let args = ["sweep", "--resolution", "6", "--phases", "3", "--prep", "bell2"];
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let rows = csv_rows(&ok(&csv_args));
    let v = json(&args);
    let grid = v["grid"].as_array().unwrap();
    assert_eq!(grid.len(), rows.len());
    let names = ["c11", "coherence", "phase", "c12_re", "c12_im", "lazy_fidelity", "fidelity_trace", "fidelity_vector"];
    for (row, rec) in rows.iter().zip(grid) {
        for (k, name) in names.iter().enumerate() {
            let a: f64 = row[k].parse().unwrap();
            assert_eq!(a.to_bits(), rec[name].as_f64().unwrap().to_bits(), "{name}");
        }
    }
}

#[test]
fn corrected_sweep_has_unit_fidelity_on_pure_states() {
    let v = json(&["sweep", "--resolution", "11", "--prep", "bell4", "--correct"]);
    for r in v["grid"].as_array().unwrap() {
        if r["coherence"].as_f64().unwrap() == 1.0 {
            assert!((r["fidelity_trace"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
