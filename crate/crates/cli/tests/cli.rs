use std::path::Path;
use std::process::Command;

use heavyls_cli::csvio::Table;
use heavyls_cli::run;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("heavyls").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn repo_config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name).to_string_lossy().into_owned()
}

#[test]
fn predict_vc_example() {
    let (code, out, _) = invoke(&["predict", "--regime", "vc", "--alpha", "0", "--beta", "1", "--s", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["exponent"], 0.5);
}

#[test]
fn predict_rejects_unsupported_regime() {
    let (code, _, err) = invoke(&["predict", "--regime", "vc", "--alpha", "3", "--beta", "1", "--s", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("regime"));
}

#[test]
fn fit_isotonic_pools_a_violation() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    std::fs::write(&data, "x,y\n0.8,1\n0.3,2\n").unwrap();
    let (code, out, _) = invoke(&["fit", "--class", "isotonic", "--in", data.to_str().unwrap()]);
    assert_eq!(code, 0);
    let fitted = Table::parse(&out).unwrap().column("fitted").unwrap();
    assert_eq!(fitted, vec![1.5, 1.5]);
}

#[test]
fn envelope_monotone_example() {
    let (code, out, _) = invoke(&["envelope", "--class", "monotone", "--f0", "zero", "--delta", "0.1", "--x", "0.5"]);
    assert_eq!(code, 0);
    let v: f64 = out.trim().parse().unwrap();
    assert!((v - 0.141421).abs() < 1e-6);
}

#[test]
fn envelope_growth_profile() {
    let (code, out, err) = invoke(&["envelope", "--class", "lipschitz", "--lip", "1", "--phi", "1", "--method", "oracle", "--growth", "--norm", "sup", "--per-half", "4", "--grid-m", "128"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let s = v["fit"]["s_hat"].as_f64().unwrap();
    assert!(s > 0.5 && s < 0.8, "{s}");
}

#[test]
fn unknown_config_key_is_named() {
    let cfg = repo_config("isotonic_rate.json");
    let (code, _, err) = invoke(&["rates", "--config", &cfg, "--set", "repz=3"]);
    assert_eq!(code, 1);
    assert!(err.contains("`repz`"), "{err}");
    let (code, _, err) = invoke(&["rates", "--config", &cfg, "--set", "noise.law.df=3"]);
    assert_eq!(code, 1);
    assert!(err.contains("`df`"), "{err}");
    let (code, _, err) = invoke(&["rates", "--config", &cfg, "--set", "nosie.law=3"]);
    assert_eq!(code, 1);
    assert!(err.contains("`nosie`"), "{err}");
}

#[test]
fn rates_outputs_round_trip_and_replay_from_manifest() {
    let cfg = repo_config("isotonic_rate.json");
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let small = ["--set", "reps=10", "--set", "n_grid=[32,64,128]"];
    let mut args = vec!["rates", "--config", &cfg];
    args.extend(small);
    args.extend(["--out", d1.path().to_str().unwrap()]);
    let (code, out, err) = invoke(&args);
    assert_eq!(code, 0, "{err}");

    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    let cells = Table::parse(&std::fs::read_to_string(d1.path().join("rates_cells.csv")).unwrap()).unwrap();
    let medians = cells.column("median_error").unwrap();
    for (i, m) in medians.iter().enumerate() {
        assert_eq!(m.to_bits(), report["cells"][i]["median"].as_f64().unwrap().to_bits());
    }
    let loglog = Table::parse(&std::fs::read_to_string(d1.path().join("rate_loglog.csv")).unwrap()).unwrap();
    assert_eq!(loglog.rows.len(), 3);

    let manifest = d1.path().join("manifest.json");
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["config"]["reps"], 10);
    assert!(m["seeds"].as_array().unwrap().contains(&1.into()));
    let (code, _, err) =
        invoke(&["rates", "--config", manifest.to_str().unwrap(), "--out", d2.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    for name in m["outputs"].as_array().unwrap() {
        let name = name.as_str().unwrap();
        assert_eq!(std::fs::read(d1.path().join(name)).unwrap(), std::fs::read(d2.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn tails_writes_survival_curves() {
    let cfg = repo_config("isotonic_tail.json");
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = invoke(&[
        "tails", "--config", &cfg, "--set", "reps=1000", "--set", "n_grid=[64]", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["main"]["hill_index"].as_f64().unwrap() > 0.0);
    let surv = Table::parse(&std::fs::read_to_string(dir.path().join("tail_survival.csv")).unwrap()).unwrap();
    let ls = surv.column("log_survival").unwrap();
    assert!(ls.windows(2).all(|w| w[1] <= w[0]));
    assert!(dir.path().join("tail_survival_gaussian.csv").exists());
}

#[test]
fn tables_are_exact_rationals() {
    let (code, out, _) = invoke(&["tables"]);
    assert_eq!(code, 0);
    let t = Table::parse(&out).unwrap();
    let row = t.rows.iter().find(|r| r[0] == "3" && r[1] == "holder(2,1)").unwrap();
    assert_eq!(&row[2..], ["1/2", "4/5", "5", "5/2"]);
}

#[test]
fn maxineq_and_interp_report() {
    let (code, out, _) = invoke(&["maxineq", "--n", "20", "--p", "8", "--law", "sym-pareto", "--reps", "1000"]);
    assert_eq!(code, 0);
    let slack = Table::parse(&out).unwrap().column("slack").unwrap();
    assert!(slack[0] >= 0.0);
    let (code, out, _) = invoke(&["interp", "--family", "additive", "--d", "3", "--samples", "200"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"violations\": 0"));
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(invoke(&["fit", "--class", "nonsense", "--in", "x.csv"]).0, 1);
    assert_eq!(invoke(&["fit", "--class", "convex", "--in", "/nonexistent.csv"]).0, 1);
    assert_eq!(invoke(&["maxineq", "--reps", "10"]).0, 1);
}

#[test]
fn thread_cap_is_validated() {
    let bin = env!("CARGO_BIN_EXE_heavyls");
    let ok = Command::new(bin).args(["predict", "--regime", "bracketing", "--alpha", "1", "--s", "0.5"]).env("HEAVYLS_THREADS", "2").output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["tables"]).env("HEAVYLS_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("HEAVYLS_THREADS"));
}
