use std::process::{Command, Output};

fn robustgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robustgen")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn regimes_reports_strong_with_threshold() {
    let o = robustgen(&["regimes", "--set", "mu=1", "--set", "sigma=2", "--set", "epsilon=1.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("\"label\": \"Strong\""));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let report = &v["reports"][0];
    let n5 = report["thresholds"][0]["n"].as_f64().unwrap();
    assert_eq!(report["thresholds"][0]["name"], "N5");
    assert!(n5.is_finite() && n5 > 0.0);
    let bracket = v["critical_eps_prime_bracket"].as_array().unwrap();
    assert!(bracket[0].as_f64().unwrap() < bracket[1].as_f64().unwrap());
}

#[test]
fn curve_labels_follow_regimes() {
    let o = robustgen(&["curve", "--set", "epsilon=0.1,0.5,0.95,1.5", "--set", "sweep.n_values=1:200:1"]);
    assert_eq!(o.status.code(), Some(0));
    let mut curves: Vec<(String, Vec<(u64, f64)>)> = Vec::new();
    for line in stdout(&o).lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if curves.last().map(|c| c.0.as_str()) != Some(f[1]) {
            curves.push((f[1].to_string(), Vec::new()));
        }
        curves.last_mut().unwrap().1.push((f[2].parse().unwrap(), f[3].parse().unwrap()));
    }
    use robustgen_core::curve::{CurvePoint, LossCurve};
    use robustgen_core::harness::{detect_trend, TrendLabel};
    let labels: Vec<TrendLabel> = curves
        .iter()
        .map(|(_, pts)| {
            let c = LossCurve::new(0.0, pts.iter().map(|&(n, m)| CurvePoint::exact(n, m)).collect());
            detect_trend(&c, 3.0).unwrap().label
        })
        .collect();
    assert_eq!(
        labels,
        [TrendLabel::Decreasing, TrendLabel::Decreasing, TrendLabel::DoubleDescentLike, TrendLabel::Increasing]
    );
}

#[test]
fn config_file_and_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(&cfg, "# Manhattan sweep\ncolumns=3\nsweep.n_values=1:9:4\nsweep.epsilons=0.4\nsweep.replications=20\n").unwrap();
    let out = dir.path().join("curves.csv");
    let o = robustgen(&[
        "manhattan",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "sweep.replications=30",
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("manhattan,4.0000000000000002e-1,1,"));
    assert!(rows[1].ends_with(",30,9"));
}

#[test]
fn json_echoes_effective_config() {
    let o = robustgen(&[
        "linreg",
        "--set",
        "x_dist=poisson",
        "--set",
        "w_star=2",
        "--set",
        "w_star=0.25",
        "--set",
        "sweep.n_values=5,10",
        "--set",
        "sweep.replications=4",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["family"], "LinReg");
    assert_eq!(v["config"]["params"]["LinReg"]["w_star"], 0.25);
    assert_eq!(v["config"]["params"]["LinReg"]["x_dist"], "ShiftedPoisson");
    assert_eq!(v["curves"][0]["points"].as_array().unwrap().len(), 2);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["zeroone", "--set", "sweep.replications=200", "--seed", "11"];
    let a = robustgen(&args);
    let b = robustgen(&args);
    let c = robustgen(&[&args[..], &["--set", "sweep.workers=1"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn help_exits_zero() {
    for sub in ["regimes", "curve", "mc", "zeroone", "manhattan", "svm", "linreg", "verify"] {
        let o = robustgen(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub}");
        assert!(stdout(&o).contains("--set"));
    }
}

#[test]
fn usage_errors_exit_two() {
    let o = robustgen(&["bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"));

    let o = robustgen(&["curve", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--frobnicate"));

    let o = robustgen(&["curve", "--set", "columns=3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("columns"));

    let o = robustgen(&["mc", "--set", "sweep.n_values=10,5"]);
    assert_eq!(o.status.code(), Some(2));

    let o = robustgen(&["mc", "--set", "sweep.replications=1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = robustgen(&["regimes", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn divergence_exits_three_and_names_the_cell() {
    let o = robustgen(&[
        "svm",
        "--set",
        "step_size=1e300",
        "--set",
        "epsilon=0.2",
        "--set",
        "sweep.n_values=5,6",
        "--set",
        "sweep.replications=2",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("eps=0.2") && err.contains("n=5"), "{err}");
}

#[test]
fn io_failures_exit_four() {
    let o = robustgen(&["curve", "--out", "/nonexistent-dir/curves.csv"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("/nonexistent-dir/curves.csv"));

    let o = robustgen(&["curve", "--config", "/nonexistent-dir/sweep.cfg"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn verify_passes_every_check() {
    let o = robustgen(&["verify"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines.iter().all(|l| l.starts_with("PASS ")), "{text}");
}
