use std::path::Path;
use std::process::{Command, Output};

fn riskfield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riskfield"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn simulate_writes_requested_assets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim");
    let run = riskfield(&[
        "simulate", "--assets", "8", "--grid", "513", "--kernel", "dirac", "--sigma2", "0.04", "--horizon", "50000",
        "--seed", "7", "--out", path(&out),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let returns = std::fs::read_to_string(out.join("returns.csv")).unwrap();
    let mut lines = returns.lines();
    assert_eq!(lines.next().unwrap().split(',').count(), 9);
    assert_eq!(lines.count(), 50_000);
    for name in ["profiles.csv", "sectors.csv", "premium_summary.csv", "moments.csv", "simulation.json"] {
        assert!(out.join(name).is_file(), "{name} missing");
    }
}

#[test]
fn zero_noise_gives_zero_returns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim");
    let run = riskfield(&["simulate", "--sigma2", "0", "--idio", "0", "--horizon", "20", "--out", path(&out)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let returns = std::fs::read_to_string(out.join("returns.csv")).unwrap();
    for line in returns.lines().skip(1) {
        assert!(line.split(',').skip(1).all(|v| v.parse::<f64>().unwrap() == 0.0), "{line}");
    }
}

#[test]
fn single_point_grid_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let run = riskfield(&["simulate", "--grid", "1", "--out", path(&dir.path().join("sim"))]);
    assert!(!run.status.success());
    assert!(String::from_utf8_lossy(&run.stderr).contains("at least 2 points"));
}

#[test]
fn analyze_end_to_end_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    assert!(riskfield(&["simulate", "--assets", "12", "--horizon", "2000", "--out", path(&sim)]).status.success());
    let analyze = |out: &Path| {
        riskfield(&[
            "analyze",
            "--returns",
            path(&sim.join("returns.csv")),
            "--profiles",
            path(&sim.join("profiles.csv")),
            "--labels",
            path(&sim.join("sectors.csv")),
            "--permutations",
            "999",
            "--out",
            path(out),
        ])
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(analyze(&a).status.success());
    assert!(analyze(&b).status.success());
    let report = std::fs::read(a.join("report.json")).unwrap();
    assert_eq!(report, std::fs::read(b.join("report.json")).unwrap());
    let json: serde_json::Value = serde_json::from_slice(&report).unwrap();
    assert!(json["mantel"]["p_value"].as_f64().unwrap() < 0.01);
    assert_eq!(json["silhouette"].as_array().unwrap().len(), 3);
    for name in ["w_matrix.csv", "d_matrix.csv", "mds_coords.csv", "pca_coords.csv", "mds.svg", "pca.svg"] {
        assert!(a.join(name).is_file(), "{name} missing");
    }
}

#[test]
fn embeddings_pipeline_runs() {
    let dir = tempfile::tempdir().unwrap();
    let emb = dir.path().join("docs.jsonl");
    let mut lines = String::new();
    for (asset, base) in [("AAA", [1.0, 0.1, 0.0]), ("BBB", [0.9, 0.2, 0.1]), ("CCC", [0.0, 1.0, 0.2]), ("DDD", [0.1, 0.9, 0.3])] {
        for k in 0..3 {
            let v: Vec<f64> = base.iter().map(|x| x + 0.01 * k as f64).collect();
            lines.push_str(&format!("{{\"asset\": \"{asset}\", \"vector\": {v:?}}}\n"));
        }
    }
    std::fs::write(&emb, lines).unwrap();
    let returns = dir.path().join("returns.csv");
    let mut csv = String::from("date,AAA,BBB,CCC,DDD,EEE\n");
    for t in 0..60 {
        let x = (t as f64 * 0.7).sin();
        let y = (t as f64 * 1.3).cos();
        csv.push_str(&format!(
            "2024-01-{:02},{},{},{},{},{}\n",
            t % 28 + 1,
            x + 0.01 * (t as f64).sin(),
            x + 0.02 * (t as f64 * 2.1).cos(),
            y + 0.01 * (t as f64 * 0.3).sin(),
            y - 0.02 * (t as f64 * 1.7).sin(),
            0.5 * x
        ));
    }
    std::fs::write(&returns, csv).unwrap();
    let out = dir.path().join("report");
    let run = riskfield(&[
        "analyze", "--returns", path(&returns), "--embeddings", path(&emb), "--permutations", "99", "--out", path(&out),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["distance"], "angular");
    assert_eq!(json["assets"]["dropped_from_returns"], serde_json::json!(["EEE"]));
    assert!(json["bound"].is_null());
    assert!(json["silhouette"].is_null());
}

#[test]
fn disjoint_labels_fail() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    assert!(riskfield(&["simulate", "--assets", "4", "--horizon", "50", "--out", path(&sim)]).status.success());
    let returns = dir.path().join("other.csv");
    std::fs::write(&returns, "date,ZZZ,YYY\n2024-01-02,0.1,0.2\n2024-01-03,0.0,-0.1\n2024-01-04,0.2,0.1\n").unwrap();
    let out = dir.path().join("report");
    let run = riskfield(&[
        "analyze", "--returns", path(&returns), "--profiles", path(&sim.join("profiles.csv")), "--out", path(&out),
    ]);
    assert!(!run.status.success());
    assert!(String::from_utf8_lossy(&run.stderr).contains("share no assets"));
    assert!(!out.join("report.json").exists());
}

#[test]
fn bad_flags_fail() {
    assert!(!riskfield(&["analyze", "--returns", "x.csv", "--w-power", "3"]).status.success());
    assert!(!riskfield(&["analyze", "--returns", "missing.csv", "--profiles", "missing.csv"]).status.success());
}
