//! End-to-end tests of the `qualbound` binary: flag handling, exit codes,
//! output formats, unit conversions, and bitwise reproducibility of file
//! outputs.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qualbound"));
    // Tests control seeds explicitly; make sure the environment cannot leak.
    cmd.env_remove("QUALBOUND_SEED");
    cmd
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json_stdout(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout_str(out)).expect("stdout is JSON")
}

fn field_f64(v: &serde_json::Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("field {key} in {v}"))
}

// ---------------------------------------------------------------------------
// bound

#[test]
fn bound_reference_values() {
    let cases = [
        (["4", "6", "1.25"], 0.9317, 1e-3),
        (["5", "11", "0.99"], 0.5677, 5e-3),
        (["4", "24", "1.6"], 0.8881, 5e-3),
        (["5", "10", "1.0"], 0.5976, 5e-3),
    ];
    for ([n, p, z], want, tol) in cases {
        let out = run(&["bound", "--n-years", n, "--p", p, "--zeta-annual", z]);
        assert!(out.status.success(), "{}", stderr_str(&out));
        let v = json_stdout(&out);
        let got = field_f64(&v, "bound_annual");
        assert!(
            (got - want).abs() < tol,
            "bound({n},{p},{z}) = {got}, want {want}"
        );
        assert_eq!(v["theorem"], "markowitz");
        assert_eq!(v["dof"].as_u64().unwrap(), p.parse::<u64>().unwrap());
    }
}

#[test]
fn bound_zero_snr_is_zero() {
    let out = run(&["bound", "--n-years", "4", "--p", "6", "--zeta-annual", "0"]);
    assert!(out.status.success());
    assert_eq!(field_f64(&json_stdout(&out), "bound_annual"), 0.0);
}

#[test]
fn bound_variant_flags() {
    let out = run(&[
        "bound",
        "--n-years",
        "5",
        "--p",
        "11",
        "--zeta-annual",
        "0.99",
        "--hedge-k",
        "1",
        "--delta-zeta-sq",
        "0.18",
    ]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert_eq!(v["theorem"], "hedged");
    assert_eq!(v["dof"].as_u64().unwrap(), 10);
    assert!((field_f64(&v, "bound_annual") - 0.1279).abs() < 5e-4);

    let out = run(&[
        "bound",
        "--n-years",
        "4",
        "--p",
        "6",
        "--zeta-annual",
        "1.25",
        "--f",
        "2",
    ]);
    let v = json_stdout(&out);
    assert_eq!(v["theorem"], "conditional");
    assert!((field_f64(&v, "bound_annual") - 0.7524).abs() < 5e-4);

    let out = run(&[
        "bound",
        "--n-years",
        "4",
        "--p",
        "6",
        "--zeta-annual",
        "1.25",
        "--subspace-p0",
        "3",
    ]);
    let v = json_stdout(&out);
    assert_eq!(v["theorem"], "subspace");
    assert_eq!(v["dof"].as_u64().unwrap(), 3);
}

#[test]
fn bound_conflicting_flags_exit_2() {
    let out = run(&[
        "bound",
        "--n-years",
        "4",
        "--p",
        "6",
        "--zeta-annual",
        "1.25",
        "--subspace-p0",
        "3",
        "--hedge-k",
        "1",
        "--delta-zeta-sq",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_str(&out);
    assert!(err.contains("--subspace-p0") && err.contains("--hedge-k"), "{err}");

    // Hedge flags must come as a pair.
    let out = run(&[
        "bound",
        "--n-years",
        "4",
        "--p",
        "6",
        "--zeta-annual",
        "1.25",
        "--hedge-k",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("--delta-zeta-sq"));
}

#[test]
fn bound_bad_parameters_exit_2() {
    let out = run(&["bound", "--n-years", "-4", "--p", "6", "--zeta-annual", "1.0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["bound", "--n-years", "4", "--p", "0", "--zeta-annual", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
}

// ---------------------------------------------------------------------------
// approx

#[test]
fn approx_quantile_csv() {
    let out = run(&[
        "approx",
        "--n-years",
        "4",
        "--p",
        "6",
        "--zeta-annual",
        "1.25",
        "--quantiles",
        "0.05,0.5,0.9",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("level,value"));
    let values: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(values.len(), 3);
    assert!((values[0].1 - 0.4397).abs() < 5e-4);
    assert!((values[1].1 - 0.9550).abs() < 5e-4);
    assert!((values[2].1 - 1.1442).abs() < 5e-4);
}

#[test]
fn approx_cdf_and_mean_sq() {
    let out = run(&[
        "approx",
        "--n-years",
        "4",
        "--p",
        "6",
        "--zeta-annual",
        "1.25",
        "--cdf-at",
        "1.25",
    ]);
    assert_eq!(field_f64(&json_stdout(&out), "cdf"), 1.0);

    let out = run(&[
        "approx",
        "--n-years",
        "4",
        "--p",
        "6",
        "--zeta-annual",
        "1.25",
        "--mean-sq",
    ]);
    assert!((field_f64(&json_stdout(&out), "mean_sq") - 0.868).abs() < 1e-3);
}

#[test]
fn approx_requires_exactly_one_query() {
    let base = [
        "approx",
        "--n-years",
        "4",
        "--p",
        "6",
        "--zeta-annual",
        "1.25",
    ];
    let out = run(&base);
    assert_eq!(out.status.code(), Some(2), "no query should be a usage error");

    let mut two = base.to_vec();
    two.extend(["--mean-sq", "--cdf-at", "0.5"]);
    let out = run(&two);
    assert_eq!(out.status.code(), Some(2), "two queries should conflict");
}

#[test]
fn approx_rejects_single_asset() {
    let out = run(&[
        "approx",
        "--n-years",
        "4",
        "--p",
        "1",
        "--zeta-annual",
        "1.25",
        "--mean-sq",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("at least 2 assets"));
}

// ---------------------------------------------------------------------------
// simulate

#[test]
fn simulate_writes_reproducible_outputs() {
    let dir1 = tmp_dir("sim-repro-1");
    let dir2 = tmp_dir("sim-repro-2");
    let args = |dir: &PathBuf| {
        vec![
            "simulate".to_string(),
            "--n-days".into(),
            "120".into(),
            "--p".into(),
            "3".into(),
            "--zeta-annual".into(),
            "0.8".into(),
            "--reps".into(),
            "400".into(),
            "--seed".into(),
            "21".into(),
            "--out".into(),
            dir.display().to_string(),
        ]
    };
    let out1 = bin().args(args(&dir1)).output().unwrap();
    assert!(out1.status.success(), "{}", stderr_str(&out1));
    let summary = stdout_str(&out1);
    for key in ["mean_q=", "ks=", "bound=", "reps=400"] {
        assert!(summary.contains(key), "summary line missing {key}: {summary}");
    }
    let out2 = bin().args(args(&dir2)).output().unwrap();
    assert!(out2.status.success());

    for file in ["result.json", "quantiles.csv"] {
        let a = fs::read(dir1.join(file)).unwrap();
        let b = fs::read(dir2.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical reruns");
    }
    // Manifest exists and lists the outputs.
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir1.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["seed"].as_u64().unwrap(), 21);
    let outputs: Vec<&str> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(outputs, ["result.json", "quantiles.csv"]);

    // The quantile CSV has the pinned header.
    let csv = fs::read_to_string(dir1.join("quantiles.csv")).unwrap();
    assert!(csv.starts_with("level,value\n"));
}

#[test]
fn simulate_single_replicate_has_degenerate_quantiles() {
    let dir = tmp_dir("sim-single");
    let out = run(&[
        "simulate",
        "--n-days",
        "60",
        "--p",
        "2",
        "--zeta-annual",
        "0.5",
        "--reps",
        "1",
        "--seed",
        "4",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let result: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("result.json")).unwrap()).unwrap();
    let quantiles = result["quantiles_annual"].as_array().unwrap();
    let first = quantiles[0]["value"].as_f64().unwrap();
    for q in quantiles {
        assert_eq!(q["value"].as_f64().unwrap(), first);
    }
}

#[test]
fn simulate_exit_3_when_replicates_fail() {
    let dir = tmp_dir("sim-fail");
    // Four observations cannot support a three-asset moment estimate, so
    // every replicate fails and the failure budget trips.
    let out = run(&[
        "simulate",
        "--n-days",
        "4",
        "--p",
        "3",
        "--zeta-annual",
        "0.5",
        "--reps",
        "16",
        "--seed",
        "4",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_str(&out).contains("replicates failed"));
}

#[test]
fn simulate_seed_env_fallback_and_flag_priority() {
    let dir_env = tmp_dir("sim-env");
    let out = bin()
        .env("QUALBOUND_SEED", "77")
        .args([
            "simulate",
            "--n-days",
            "60",
            "--p",
            "2",
            "--zeta-annual",
            "0.5",
            "--reps",
            "8",
            "--out",
            dir_env.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let result: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir_env.join("result.json")).unwrap()).unwrap();
    assert_eq!(result["seed"].as_u64().unwrap(), 77);

    let dir_flag = tmp_dir("sim-env-flag");
    let out = bin()
        .env("QUALBOUND_SEED", "77")
        .args([
            "simulate",
            "--n-days",
            "60",
            "--p",
            "2",
            "--zeta-annual",
            "0.5",
            "--reps",
            "8",
            "--seed",
            "5",
            "--out",
            dir_flag.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let result: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir_flag.join("result.json")).unwrap()).unwrap();
    assert_eq!(result["seed"].as_u64().unwrap(), 5);

    let out = bin()
        .env("QUALBOUND_SEED", "not-a-number")
        .args([
            "simulate",
            "--n-days",
            "60",
            "--p",
            "2",
            "--zeta-annual",
            "0.5",
            "--reps",
            "8",
            "--out",
            dir_flag.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_accepts_heavy_tailed_marginals() {
    let dir = tmp_dir("sim-tukey");
    let out = run(&[
        "simulate",
        "--n-days",
        "60",
        "--p",
        "2",
        "--zeta-annual",
        "0.5",
        "--marginal",
        "tukey",
        "--tukey-h",
        "0.15",
        "--reps",
        "50",
        "--seed",
        "9",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_str(&out));
    assert!(stdout_str(&out).contains("ks="));

    let out = run(&[
        "simulate",
        "--n-days",
        "60",
        "--p",
        "2",
        "--zeta-annual",
        "0.5",
        "--marginal",
        "tukey",
        "--tukey-h",
        "0.6",
        "--reps",
        "50",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "tukey h = 0.6 is out of domain");
}

// ---------------------------------------------------------------------------
// sweep

#[test]
fn sweep_emits_sorted_csv_with_bound_column() {
    let dir = tmp_dir("sweep-basic");
    let out = run(&[
        "sweep",
        "--n-years-list",
        "1,0.5",
        "--p-list",
        "3,2",
        "--zeta-list",
        "1.0,0.5",
        "--reps",
        "60",
        "--seed",
        "13",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_str(&out));
    let csv = fs::read_to_string(dir.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,p,zeta,ks,mean_q,bound"));
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    // Lexicographic in (n, p, zeta), echoing the units that were passed in.
    let keys: Vec<(f64, f64, f64)> = rows
        .iter()
        .map(|r| {
            (
                r[0].parse().unwrap(),
                r[1].parse().unwrap(),
                r[2].parse().unwrap(),
            )
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(keys, sorted);
    assert_eq!(keys[0], (0.5, 2.0, 0.5));

    // The bound column agrees with the bound command at the same inputs.
    let bound_out = run(&["bound", "--n-years", "1", "--p", "2", "--zeta-annual", "1"]);
    let want = field_f64(&json_stdout(&bound_out), "bound_annual");
    let row = keys.iter().position(|&k| k == (1.0, 2.0, 1.0)).unwrap();
    let got: f64 = rows[row][5].parse().unwrap();
    assert!(
        (got - want).abs() < 1e-10,
        "sweep bound {got} vs bound command {want}"
    );
}

#[test]
fn sweep_rejects_degenerate_grids() {
    let dir = tmp_dir("sweep-bad");
    let out = run(&[
        "sweep",
        "--n-years-list",
        "1",
        "--p-list",
        "1",
        "--zeta-list",
        "0.5",
        "--reps",
        "10",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "p = 1 cells are not allowed");

    let out = run(&[
        "sweep",
        "--n-years-list",
        "1",
        "--p-list",
        "2",
        "--zeta-list",
        "0",
        "--reps",
        "10",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "zeta = 0 cells are not allowed");
}

// ---------------------------------------------------------------------------
// diversify

#[test]
fn diversify_reproduces_anchor_and_labels_curves() {
    let out = run(&[
        "diversify",
        "--gamma-list",
        "0.15",
        "--anchor-p",
        "6",
        "--anchor-zeta",
        "1.25",
        "--n-years",
        "4",
        "--p-max",
        "10",
    ]);
    assert!(out.status.success(), "{}", stderr_str(&out));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("curve,p,zeta,bound"));
    let anchor_row: Vec<&str> = lines
        .clone()
        .find(|l| l.starts_with("gamma=0.15,6,"))
        .expect("anchor row present")
        .split(',')
        .collect();
    let zeta: f64 = anchor_row[2].parse().unwrap();
    let bound: f64 = anchor_row[3].parse().unwrap();
    assert_eq!(zeta, 1.25, "the growth law is anchored exactly");
    assert!((bound - 0.9317).abs() < 1e-3);
}

#[test]
fn diversify_capm_curve_stays_below_its_ceiling() {
    let (alpha, beta, sigma_m) = (0.5, 1.0, 0.2);
    let out = run(&[
        "diversify",
        "--capm",
        "0.5,1.0,1.0,0.2",
        "--n-years",
        "4",
        "--p-min",
        "1",
        "--p-max",
        "60",
    ]);
    assert!(out.status.success(), "{}", stderr_str(&out));
    let text = stdout_str(&out);
    let zetas: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(zetas.len(), 60);
    let ceiling = alpha / (beta * sigma_m);
    for pair in zetas.windows(2) {
        assert!(pair[1] > pair[0], "factor-market signal grows with p");
    }
    assert!(
        *zetas.last().unwrap() < ceiling,
        "signal saturates strictly below alpha / (beta sigma_m)"
    );
}

#[test]
fn diversify_gamma_requires_anchor() {
    let out = run(&[
        "diversify",
        "--gamma-list",
        "0.15",
        "--n-years",
        "4",
        "--p-max",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("anchor"));
}

// ---------------------------------------------------------------------------
// empirical

fn write_panel(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn synthetic_panel(n: usize, p: usize, seed: u64) -> String {
    // Small deterministic pseudo-random panel, no dependencies needed.
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut text = (0..p)
        .map(|j| format!("A{j}"))
        .collect::<Vec<_>>()
        .join(",");
    text.push('\n');
    for _ in 0..n {
        let row: Vec<String> = (0..p)
            .map(|_| {
                // Sum of uniforms: light-tailed, mean slightly above zero.
                let u = next() + next() + next() - 1.45;
                format!("{:.6}", 0.01 * u)
            })
            .collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

#[test]
fn empirical_writes_quartile_curve() {
    let panel = write_panel("panel-basic.csv", &synthetic_panel(200, 4, 3));
    let dir = tmp_dir("emp-basic");
    let out = run(&[
        "empirical",
        "--returns-csv",
        panel.to_str().unwrap(),
        "--n-perm",
        "100",
        "--seed",
        "8",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_str(&out));
    let csv = fs::read_to_string(dir.join("empirical.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p,q25,q50,q75"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0] as usize, i + 1);
        assert!(row[1] <= row[2] && row[2] <= row[3], "quartiles ordered");
    }
}

#[test]
fn empirical_annualizes_by_root_periods() {
    let panel = write_panel("panel-units.csv", &synthetic_panel(150, 3, 5));
    let dir_pp = tmp_dir("emp-units-1");
    let dir_ann = tmp_dir("emp-units-253");
    for (dir, ppy) in [(&dir_pp, "1"), (&dir_ann, "253")] {
        let out = run(&[
            "empirical",
            "--returns-csv",
            panel.to_str().unwrap(),
            "--periods-per-year",
            ppy,
            "--n-perm",
            "64",
            "--seed",
            "2",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr_str(&out));
    }
    let parse = |dir: &PathBuf| -> Vec<Vec<f64>> {
        fs::read_to_string(dir.join("empirical.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect()
    };
    let per_period = parse(&dir_pp);
    let annual = parse(&dir_ann);
    let scale = 253f64.sqrt();
    for (a, b) in per_period.iter().zip(&annual) {
        for col in 1..4 {
            assert!(
                (a[col] * scale - b[col]).abs() <= 1e-12 * (1.0 + b[col].abs()),
                "annualization should be exactly sqrt(periods_per_year)"
            );
        }
    }
}

#[test]
fn empirical_rejects_ragged_csv_with_line_number() {
    let panel = write_panel(
        "panel-ragged.csv",
        "A,B,C\n0.01,0.02,0.0\n0.0,0.01,0.02\n0.01,0.02\n",
    );
    let dir = tmp_dir("emp-ragged");
    let out = run(&[
        "empirical",
        "--returns-csv",
        panel.to_str().unwrap(),
        "--n-perm",
        "10",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_str(&out);
    assert!(err.contains("line 4"), "error names the offending line: {err}");
}

#[test]
fn empirical_drops_assets_with_missing_values() {
    let panel = write_panel(
        "panel-missing.csv",
        "A,B\n0.011,0.02\n0.002,\n0.013,0.02\n0.024,0.01\n0.005,0.01\n",
    );
    let dir = tmp_dir("emp-missing");
    let out = run(&[
        "empirical",
        "--returns-csv",
        panel.to_str().unwrap(),
        "--n-perm",
        "10",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_str(&out));
    assert!(stderr_str(&out).contains("dropping asset B"));
    // One surviving asset: a single row whose quartiles coincide.
    let csv = fs::read_to_string(dir.join("empirical.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    let vals: Vec<f64> = rows[0].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(vals[1], vals[2]);
    assert_eq!(vals[2], vals[3]);
}

#[test]
fn empirical_constant_asset_is_singular() {
    let panel = write_panel("panel-const.csv", "A\n0.01\n0.01\n0.01\n0.01\n0.01\n");
    let dir = tmp_dir("emp-const");
    let out = run(&[
        "empirical",
        "--returns-csv",
        panel.to_str().unwrap(),
        "--n-perm",
        "10",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_str(&out).contains("singular"));
}

#[test]
fn empirical_outputs_are_reproducible() {
    let panel = write_panel("panel-repro.csv", &synthetic_panel(120, 3, 11));
    let dir1 = tmp_dir("emp-repro-1");
    let dir2 = tmp_dir("emp-repro-2");
    for dir in [&dir1, &dir2] {
        let out = run(&[
            "empirical",
            "--returns-csv",
            panel.to_str().unwrap(),
            "--n-perm",
            "50",
            "--seed",
            "14",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(
        fs::read(dir1.join("empirical.csv")).unwrap(),
        fs::read(dir2.join("empirical.csv")).unwrap()
    );
}
