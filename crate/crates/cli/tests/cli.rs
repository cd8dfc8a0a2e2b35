use std::collections::HashMap;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_manifold-rkhs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

struct Table {
    header: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(text: &str) -> Self {
        let header: Vec<String> = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .map(String::from)
            .collect();
        let body: String = text.lines().skip(header.len()).map(|l| format!("{l}\n")).collect();
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let columns = rdr.headers().unwrap().iter().map(String::from).collect();
        let rows = rdr
            .records()
            .map(|r| r.unwrap().iter().map(String::from).collect())
            .collect();
        Self { header, columns, rows }
    }

    fn of(out: &Output) -> Self {
        Self::parse(&String::from_utf8(out.stdout.clone()).unwrap())
    }

    fn col(&self, name: &str) -> usize {
        self.columns
            .iter()
            .position(|c| c == name)
            .unwrap_or_else(|| panic!("no column {name}"))
    }

    fn floats(&self, name: &str) -> Vec<f64> {
        let i = self.col(name);
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }

    fn summary(&self) -> HashMap<String, String> {
        self.header
            .iter()
            .filter_map(|l| l.strip_prefix("# ")?.split_once(": "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    fn summary_f64(&self, key: &str) -> f64 {
        self.summary()[key].parse().unwrap()
    }
}

#[test]
fn circle_closed_form_agrees_with_spectral_column() {
    let out = run(&["eval", "--check", "--trunc", "levels:100000"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let t = Table::of(&out);
    assert_eq!(t.rows.len(), 8);
    let closed = t.floats("value");
    let spectral = t.floats("spectral_value");
    let tails = t.floats("spectral_tail");
    for i in 0..8 {
        assert_eq!(t.rows[i][t.col("method")], "closed-form");
        assert!((closed[i] - spectral[i]).abs() <= tails[i], "row {i}");
    }
}

#[test]
fn sphere_diagonal_is_one_json_record_with_small_tail() {
    let out = run(&[
        "eval",
        "--manifold",
        "sphere:3",
        "--kernel",
        "sobolev:2",
        "--points",
        "grid:1",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let records = doc["records"].as_array().unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0]["distance"].as_f64(), Some(0.0));
    let tail = records[0]["tail"].as_f64().unwrap();
    assert!(tail < 1e-8, "tail {tail}");
    assert!(records[0]["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn divergent_diagonal_exits_with_numeric_failure() {
    let out = run(&["eval", "--kernel", "sobolev:0.4", "--points", "grid:1"]);
    assert_eq!(code(&out), 3);
    let t = Table::of(&out);
    assert_eq!(t.columns, ["error", "message"]);
    assert_eq!(t.rows[0][0], "divergence");
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        &["eval", "--kernel", "sobolev:-1"][..],
        &["eval", "--manifold", "sphere:2"],
        &["eval", "--trunc", "tail:0"],
        &["eval", "--format", "xml"],
        &["eval", "--points", "/nonexistent/points.csv"],
        &["verify", "--suite", "nope"],
        &["eval", "--config", "/nonexistent/run.toml"],
    ] {
        assert_eq!(code(&run(args)), 2, "{args:?}");
    }
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "bogus = 1\n").unwrap();
    assert_eq!(code(&run(&["eval", "--config", path.to_str().unwrap()])), 2);
}

#[test]
fn flags_override_config_file_and_sources_are_logged() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "manifold = \"sphere:3\"\nkernel = \"sobolev:2\"\npoints = \"grid:3\"\n",
    )
    .unwrap();
    let out = run(&["eval", "--config", path.to_str().unwrap(), "--kernel", "sobolev:3"]);
    assert_eq!(code(&out), 0);
    let t = Table::of(&out);
    assert!(t.header.contains(&"# manifold = sphere:3 (file)".to_string()));
    assert!(t.header.contains(&"# kernel = sobolev:3 (flag)".to_string()));
    assert!(t.header.contains(&"# weighting = bessel (default)".to_string()));
    assert_eq!(t.rows.len(), 3);
}

#[test]
fn verify_reports_passing_suites() {
    let out = run(&["verify", "--suite", "semigroup,addition"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let t = Table::of(&out);
    assert_eq!(t.summary()["failed"], "0");
    let passed = t.col("passed");
    assert!(t.rows.iter().all(|r| r[passed] == "true"));
    let suites: Vec<&str> = t.rows.iter().map(|r| r[0].as_str()).collect();
    assert!(suites.contains(&"semigroup") && suites.contains(&"addition"));
    let residual = t
        .rows
        .iter()
        .find(|r| r[0] == "semigroup" && r[1].starts_with("circle"))
        .unwrap();
    assert!(residual[t.col("measured")].parse::<f64>().unwrap() <= 1e-6);
}

#[test]
fn truncation_error_decays_like_inverse_level() {
    let out = run(&["converge", "--sweep", "levels"]);
    assert_eq!(code(&out), 0);
    let t = Table::of(&out);
    let rate = t.summary_f64("rate");
    assert!((rate + 1.0).abs() < 0.1, "rate {rate}");
    let errors = t.floats("error");
    let tails = t.floats("tail");
    for (e, b) in errors.iter().zip(&tails) {
        assert!(e <= b, "error {e} exceeds certified tail {b}");
    }
}

#[test]
fn near_diagonal_slope_on_the_two_sphere() {
    let out = run(&[
        "converge",
        "--sweep",
        "slope",
        "--manifold",
        "sphere:3",
        "--kernel",
        "sobolev:0.75",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let slope = Table::of(&out).summary_f64("slope");
    assert!((slope + 0.5).abs() <= 0.15, "slope {slope}");
}

#[test]
fn abel_extrapolants_settle() {
    let out = run(&[
        "converge",
        "--sweep",
        "abel",
        "--manifold",
        "sphere:3",
        "--kernel",
        "sobolev:0.5",
    ]);
    assert_eq!(code(&out), 0);
    let t = Table::of(&out);
    let i = t.col("cauchy_difference");
    let diffs: Vec<f64> = t
        .rows
        .iter()
        .filter(|r| !r[i].is_empty())
        .map(|r| r[i].parse().unwrap())
        .collect();
    assert!(diffs.len() >= 4);
    // decreasing until the rounding floor is reached
    for w in diffs.windows(2).take_while(|w| w[0] > 1e-12) {
        assert!(w[1] < w[0], "{diffs:?}");
    }
    assert!(t.summary_f64("difference") < 1e-6);
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<_> = ["a.csv", "b.csv"].iter().map(|n| dir.path().join(n)).collect();
    for f in &files {
        let out = run(&[
            "gram",
            "--manifold",
            "sphere:3",
            "--kernel",
            "sobolev:2",
            "--points",
            "random:12,5",
            "--out",
            f.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        assert!(out.stdout.is_empty());
    }
    let (a, b) = (std::fs::read(&files[0]).unwrap(), std::fs::read(&files[1]).unwrap());
    // the out path itself is logged, so compare past that line
    let strip = |x: &[u8]| {
        String::from_utf8(x.to_vec())
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("# out = "))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));

    let verify = |_: ()| run(&["verify", "--suite", "addition", "--format", "json"]).stdout;
    assert_eq!(verify(()), verify(()));
}

#[test]
fn sequential_and_parallel_runs_agree() {
    let args = [
        "gram",
        "--manifold",
        "sphere:4",
        "--kernel",
        "sobolev:3",
        "--points",
        "random:30,2",
    ];
    let par = Table::of(&run(&args));
    let mut seq_args = args.to_vec();
    seq_args.push("--sequential");
    let seq = Table::of(&run(&seq_args));
    assert_eq!(par.rows, seq.rows);
    assert_eq!(par.summary()["psd"], "true");
}

#[test]
fn gram_and_interpolation_reproduce_the_target() {
    let out = run(&[
        "interp",
        "--manifold",
        "sphere:3",
        "--kernel",
        "sobolev:2",
        "--points",
        "random:25,4",
    ]);
    assert_eq!(code(&out), 0);
    let t = Table::of(&out);
    assert_eq!(t.rows.len(), 25);
    assert!(t.summary_f64("condition") >= 1.0);

    // re-assemble the Gram matrix through the CLI and check G c = y
    let g = Table::of(&run(&[
        "gram",
        "--manifold",
        "sphere:3",
        "--kernel",
        "sobolev:2",
        "--points",
        "random:25,4",
    ]));
    let entries = g.floats("value");
    let c = t.floats("coefficient");
    let y = t.floats("target");
    for i in 0..25 {
        let gc: f64 = (0..25).map(|j| entries[i * 25 + j] * c[j]).sum();
        assert!((gc - y[i]).abs() < 1e-8, "row {i}: {gc} vs {}", y[i]);
    }
}

#[test]
fn point_files_are_read_per_manifold() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.csv");
    std::fs::write(&path, "x,y,z\n0,0,1\n# comment\n1,0,0\n0,0,-2\n").unwrap();
    let out = run(&[
        "eval",
        "--manifold",
        "sphere:3",
        "--kernel",
        "sobolev:2",
        "--points",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let d = Table::of(&out).floats("distance");
    let expected = [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI];
    for (a, b) in d.iter().zip(expected) {
        assert!((a - b).abs() < 1e-15);
    }
    std::fs::write(&path, "1,2\n").unwrap();
    assert_eq!(
        code(&run(&[
            "eval",
            "--manifold",
            "sphere:3",
            "--points",
            path.to_str().unwrap()
        ])),
        2
    );
}

#[test]
fn heat_kernel_is_positive_and_spreads() {
    let out = run(&[
        "heat",
        "--manifold",
        "sphere:4",
        "--points",
        "grid:5",
        "--times",
        "0.1,1,5",
    ]);
    assert_eq!(code(&out), 0);
    let t = Table::of(&out);
    let values = t.floats("value");
    assert_eq!(values.len(), 15);
    assert!(values.iter().all(|v| *v > 0.0));
    // at t = 5 the kernel is nearly the constant 1/vol(S^3) = 1/(2π²)
    let late = &values[10..];
    for v in late {
        assert!((v - 1.0 / (2.0 * std::f64::consts::PI.powi(2))).abs() < 1e-3);
    }
}

#[test]
fn ellipse_length_and_arc_parametrization() {
    let out = run(&["curve", "--curve", "ellipse:2,1", "--points", "grid:16"]);
    assert_eq!(code(&out), 0);
    let t = Table::of(&out);
    assert!((t.summary_f64("length") - 9.688_448_220_547_676).abs() < 1e-7);
    let arcs = t.floats("arc_length");
    assert!(arcs.windows(2).all(|w| w[1] > w[0]));
    let kernel = t.floats("kernel");
    assert!(kernel[1..].iter().all(|k| *k < kernel[0]));
}

#[test]
fn sampled_curves_are_read_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("circle.csv");
    let rows: String = (0..64)
        .map(|i| {
            let th = std::f64::consts::TAU * i as f64 / 64.0;
            format!("{th},{},{}\n", 3.0 * th.cos(), 3.0 * th.sin())
        })
        .collect();
    std::fs::write(&path, format!("theta,x,y\n{rows}")).unwrap();
    let out = run(&["curve", "--curve", path.to_str().unwrap(), "--points", "grid:4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let length = Table::of(&out).summary_f64("length");
    assert!((length - 6.0 * std::f64::consts::PI).abs() < 1e-4, "length {length}");
}

#[test]
fn abel_flag_enables_sub_threshold_kernels_off_the_diagonal() {
    let args = [
        "profile",
        "--manifold",
        "sphere:3",
        "--kernel",
        "sobolev:0.75",
        "--samples",
        "4",
        "--min-sep",
        "0.1",
    ];
    assert_eq!(code(&run(&args)), 3);
    let mut with_abel = args.to_vec();
    with_abel.push("--abel");
    let out = run(&with_abel);
    assert_eq!(code(&out), 0);
    let t = Table::of(&out);
    assert!(t.rows.iter().all(|r| r[t.col("method")] == "abel"));
    let v = t.floats("value");
    assert!(v.windows(2).all(|w| w[1] < w[0]));
}
