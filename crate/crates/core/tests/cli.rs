use compound_align::cli::main_with_args;
use serde_json::Value;
use std::path::{Path, PathBuf};

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> i32 {
    let mut full = vec!["compound-align"];
    full.extend_from_slice(args);
    main_with_args(full)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const THM1: &str = r#"{"scenario": {"network": "bc", "setting": "complex", "M": 2, "K_or_N": 2, "J": [1, 3], "seed": 7},
 "scheme": "thm1", "trials": 3}"#;

const IC2: &str = r#"{"scenario": {"network": "ic", "setting": "real", "M": 2, "K_or_N": 2, "J": [1, 1], "seed": 3},
 "scheme": "ic_rational", "n": 1, "probe": {"receiver": 1, "state": 1, "powers": [100, 1000]}}"#;

#[test]
fn construct_is_byte_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "ic.json", IC2);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(run(&["construct", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), 0);
    }
    for file in ["report.json", "scheme.json"] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
    let scheme = read_json(&a.join("scheme.json"));
    assert_eq!(scheme["m_n"], "6");
    assert_eq!(scheme["finite_n_dof"]["num"], 1);
    assert_eq!(scheme["finite_n_dof"]["den"], 3);
}

#[test]
fn sweep_writes_csv_and_aggregates() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "thm1.json", THM1);
    let out = tmp.path().join("out");
    assert_eq!(run(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), 0);
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["aggregate"]["trials"], 3);
    assert_eq!(report["aggregate"]["pass_rate"], 1.0);
    let slope = report["dof"]["dof_empirical_slope"]["slope"].as_f64().unwrap();
    assert!((slope - 1.5).abs() < 0.05);
    assert_eq!(report["dof"]["dof_conjectured"]["num"], 4);
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(csv.starts_with("P,user,state,rate,total_rate\n"));
    // 7 powers x (1 + 3) user states.
    assert_eq!(csv.lines().count(), 1 + 7 * 4);

    let again = tmp.path().join("again");
    assert_eq!(run(&["sweep", "--config", cfg.to_str().unwrap(), "--out", again.to_str().unwrap()]), 0);
    assert_eq!(std::fs::read(out.join("report.json")).unwrap(), std::fs::read(again.join("report.json")).unwrap());
}

#[test]
fn verify_accepts_saved_scheme_and_rejects_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "thm1.json", THM1);
    let built = tmp.path().join("built");
    assert_eq!(run(&["construct", "--config", cfg.to_str().unwrap(), "--out", built.to_str().unwrap()]), 0);
    let scheme_path = built.join("scheme.json");
    let checked = tmp.path().join("checked");
    let args = |scheme: &Path, out: &Path| {
        vec![
            "verify".to_string(),
            "--config".into(),
            cfg.to_str().unwrap().into(),
            "--scheme".into(),
            scheme.to_str().unwrap().into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    assert_eq!(main_with_args(std::iter::once("compound-align".to_string()).chain(args(&scheme_path, &checked))), 0);

    // Zeroing user 2's beamformer leaks nothing but kills its stream.
    let mut doc = read_json(&scheme_path);
    let bf = &mut doc["scheme"]["tx_beamformers"][1];
    for part in ["re", "im"] {
        for x in bf[part].as_array_mut().unwrap() {
            *x = Value::from(0.0);
        }
    }
    let tampered = tmp.path().join("tampered.json");
    std::fs::write(&tampered, serde_json::to_string(&doc).unwrap()).unwrap();
    let code =
        main_with_args(std::iter::once("compound-align".to_string()).chain(args(&tampered, &tmp.path().join("bad"))));
    assert_eq!(code, 3);

    // A different seed gives a different channel, so the saved scheme no longer zero-forces.
    let other = tmp.path().join("other");
    let mut a = args(&scheme_path, &other);
    a.extend(["--seed".into(), "8".into()]);
    assert_eq!(main_with_args(std::iter::once("compound-align".to_string()).chain(a)), 3);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let out = out.to_str().unwrap();

    assert_eq!(run(&["dof", "--network", "bc", "--M", "2", "--J", "3,3", "--out", out]), 0);
    let report = read_json(&Path::new(out).join("report.json"));
    assert_eq!(report["dof"]["num"], 4);
    assert_eq!(run(&["dof", "--network", "bc", "--M", "3", "--J", "1,1,1"]), 2);

    let wrong = write_config(
        tmp.path(),
        "wrong.json",
        r#"{"scenario": {"network": "bc", "setting": "real", "M": 2, "K_or_N": 2, "J": [1, 3], "seed": 1}, "scheme": "thm1"}"#,
    );
    assert_eq!(run(&["construct", "--config", wrong.to_str().unwrap(), "--out", out]), 2);

    let structured = write_config(
        tmp.path(),
        "structured.json",
        r#"{"scenario": {"network": "bc", "setting": "complex", "M": 2, "K_or_N": 2, "J": [4, 4], "seed": 1},
            "scheme": "mimo_bc_ex4", "channel_model": "structured", "trials": 4, "power_grid": [1e2, 1e3, 1e4, 1e5]}"#,
    );
    assert_eq!(run(&["construct", "--config", structured.to_str().unwrap(), "--out", out]), 3);
    // Failing on every seed is the expected outcome of a sweep over this channel family.
    assert_eq!(run(&["sweep", "--config", structured.to_str().unwrap(), "--out", out]), 0);
    let report = read_json(&Path::new(out).join("report.json"));
    assert_eq!(report["aggregate"]["expected_negative"]["rate"], 1.0);

    let unknown = write_config(tmp.path(), "unknown.json", r#"{"scenario": {}, "scheme": "thm9"}"#);
    assert_eq!(run(&["construct", "--config", unknown.to_str().unwrap()]), 1);
    assert_eq!(run(&["construct", "--config", tmp.path().join("missing.json").to_str().unwrap()]), 1);
    assert_eq!(run(&["frobnicate"]), 1);
}
