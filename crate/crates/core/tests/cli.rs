use std::process::Command;

use bergman_lab::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["bergman-lab"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().to_string()).collect()
}

#[test]
fn verify_operators_rational() {
    let (code, out, _) = call(&["verify", "--suite", "operators", "--k-max", "4", "--order", "120", "--mode", "rational"]);
    assert_eq!(code, 0);
    assert!(column(&out, "pass").iter().all(|p| p == "true"));
    assert!(column(&out, "deviation").iter().all(|d| d == "0.0"));
}

#[test]
fn verify_moments_and_lemma13() {
    let (code, out, _) = call(&["verify", "--suite", "moments", "--max-index", "8"]);
    assert_eq!(code, 0);
    assert!(column(&out, "deviation").iter().all(|d| d.parse::<f64>().unwrap() < 1e-6));
    let (code, out, _) = call(&["verify", "--suite", "lemma13", "--k-max", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 10);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(call(&["verify", "--suite", "nope"]).0, 2);
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call(&["approx", "--m", "1", "--k-list", "100", "--trunc", "50"]).0, 2);
    assert_eq!(call(&["distance", "--n-max", "1"]).0, 2);
    assert_eq!(call(&["--threads", "0", "section", "--k", "1", "--dim", "2"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn distance_rows() {
    let (code, out, _) = call(&["distance", "--n-max", "2", "--precision", "digamma", "--no-cache"]);
    assert_eq!(code, 0);
    let d2: f64 = column(&out, "distance_sq")[0].parse().unwrap();
    assert!((d2 - (2.0 - 2.0 * std::f64::consts::LN_2)).abs() < 1e-9);

    let (_, out, _) = call(&["distance", "--n-max", "20", "--no-cache"]);
    let d: Vec<f64> = column(&out, "distance_sq").iter().map(|x| x.parse().unwrap()).collect();
    assert_eq!(d.len(), 19);
    assert!(d.windows(2).all(|w| w[1] <= w[0]));
    assert!(column(&out, "error_budget").iter().all(|e| e.parse::<f64>().unwrap() >= 0.0));
}

#[test]
fn warm_cache_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let (c1, cold, _) = call(&["--threads", "1", "distance", "--n-max", "15", "--cache-dir", path]);
    let (c2, warm, _) = call(&["--threads", "1", "distance", "--n-max", "15", "--cache-dir", path]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(cold, warm);
    assert!(std::fs::read_dir(dir.path()).unwrap().count() > 0);
}

#[test]
fn unwritable_cache_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("not-a-dir");
    std::fs::write(&file, "x").unwrap();
    let (code, _, err) = call(&["distance", "--n-max", "3", "--cache-dir", file.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("cache"));
}

#[test]
fn approx_rows() {
    let (code, out, _) = call(&["approx", "--m", "1", "--k-list", "10,100,1000", "--trunc", "100000"]);
    assert_eq!(code, 0);
    let h2: Vec<f64> = column(&out, "residual_h2").iter().map(|x| x.parse().unwrap()).collect();
    assert!(h2[1] < h2[0] && h2[2] < h2[1]);

    let (code, out, _) = call(&["approx", "--m", "2", "--k-list", "100"]);
    assert_eq!(code, 0);
    assert_eq!(column(&out, "lemma_ok"), vec!["true"]);

    let (_, out, _) = call(&["approx", "--m", "1", "--k-list", "1"]);
    assert_eq!(column(&out, "residual_h2"), vec!["1.0"]);
}

#[test]
fn section_dumps() {
    let (code, out, _) = call(&["section", "--k", "1", "--dim", "5"]);
    assert_eq!(code, 0);
    for (m, line) in out.lines().skip(1).enumerate() {
        let vals: Vec<&str> = line.split(',').skip(1).collect();
        for (n, v) in vals.iter().enumerate() {
            assert_eq!(*v, if m == n { "1.0" } else { "0.0" });
        }
    }

    let grid = |out: &str| -> Vec<Vec<f64>> {
        out.lines().skip(1).map(|l| l.split(',').skip(1).map(|x| x.parse().unwrap()).collect()).collect()
    };
    let (_, t, err) = call(&["section", "--k", "2", "--dim", "6"]);
    assert!(err.contains("column_counts=[2, 2, 1, 0, 0, 0]"));
    let (_, ts, _) = call(&["section", "--k", "2", "--dim", "6", "--adjoint"]);
    let (t, ts) = (grid(&t), grid(&ts));
    for m in 0..6 {
        for n in 0..6 {
            assert!((t[m][n] - ts[n][m]).abs() < 1e-15);
        }
    }
}

#[test]
fn commutant_rows() {
    let (code, out, _) = call(&["commutant", "--dim", "6", "--k-max", "1"]);
    assert_eq!(code, 0);
    assert_eq!(column(&out, "solution_dimension"), vec!["36"]);
    let dims: Vec<usize> = (1..=5)
        .map(|k| {
            let (_, out, _) = call(&["commutant", "--dim", "8", "--k-max", &k.to_string()]);
            column(&out, "solution_dimension")[0].parse().unwrap()
        })
        .collect();
    assert!(dims[3] >= 1);
    assert!(dims.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn json_has_versioned_header() {
    let (code, out, _) = call(&["--format", "json", "commutant", "--dim", "4", "--k-max", "2"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["header"]["version"], 1);
    assert!(doc["header"]["timestamp"].is_u64());
    assert_eq!(doc["header"]["config"]["command"], "commutant");
    assert_eq!(doc["rows"][0]["dim"], 4);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_bergman-lab");
    let ok = Command::new(bin).args(["section", "--k", "3", "--dim", "4"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("row,0,1,2,3"));
    let bad = Command::new(bin).args(["section", "--k"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
