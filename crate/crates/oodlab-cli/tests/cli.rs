//! End-to-end CLI tests: flags, exit codes, output schemas, and the
//! documented per-command behaviors.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oodlab"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(path: &PathBuf) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn curve_analytic_min_row_is_in_the_flat_basin() {
    let dir = workdir("curve_analytic");
    let out_base = dir.join("fig1");
    let out = run(&[
        "curve",
        "--mode",
        "analytic-agnostic",
        "--n",
        "100",
        "--mu",
        "5",
        "--sigma",
        "10",
        "--delta",
        "1.6",
        "--m-grid",
        "0:500:1",
        "--out",
        out_base.to_str().unwrap(),
    ]);
    assert_success(&out);
    let csv = read(&dir.join("fig1.csv"));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "m,value,std_err,ci95_lo,ci95_hi,alpha"
    );
    let min_row = lines
        .map(|l| {
            let mut cells = l.split(',');
            let m: usize = cells.next().unwrap().parse().unwrap();
            let v: f64 = cells.next().unwrap().parse().unwrap();
            (m, v)
        })
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    // The closed form's integer argmin at this configuration (see the
    // library tests); the basin is flat to ~1e-6 around it.
    assert_eq!(min_row.0, 24, "min-value row at m={}", min_row.0);
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
}

#[test]
fn curve_weighted_opt_alpha_column_is_half_at_zero_shift() {
    let dir = workdir("curve_opt_zero_shift");
    let out_base = dir.join("opt");
    let out = run(&[
        "curve",
        "--mode",
        "analytic-weighted-opt",
        "--delta",
        "0",
        "--m-grid",
        "2,20,200",
        "--out",
        out_base.to_str().unwrap(),
    ]);
    assert_success(&out);
    let csv = read(&dir.join("opt.csv"));
    for line in csv.lines().skip(1) {
        let alpha: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
        assert!((alpha - 0.5).abs() <= 1e-3, "alpha column {alpha}");
    }
}

#[test]
fn invalid_grid_exits_2() {
    let dir = workdir("invalid_grid");
    let out = run(&[
        "curve",
        "--m-grid",
        "10:0:1",
        "--out",
        dir.join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_exits_2() {
    let out = run(&["curve", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_out_exits_2() {
    let out = run(&["curve", "--m-grid", "0:10:1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = workdir("unknown_key");
    let cfg = dir.join("cfg.json");
    fs::write(
        &cfg,
        r#"{"command":"curve","params":{"bogus_key":1,"n":10,"mu":5.0,"sigma":10.0,"delta":1.6,"m_grid":"0:4:2","mode":"analytic-agnostic","alpha":null,"alpha_policy":null,"replicates":10,"estimator":"exact","test_n":100,"seed":1,"svg":false,"out":"x"}}"#,
    )
    .unwrap();
    let out = run(&["curve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_key"));
}

#[test]
fn config_for_wrong_command_exits_2() {
    let dir = workdir("wrong_command");
    let out_base = dir.join("a");
    assert_success(&run(&[
        "alpha",
        "--m-grid",
        "0,10",
        "--out",
        out_base.to_str().unwrap(),
    ]));
    let out = run(&[
        "curve",
        "--config",
        dir.join("a.json").to_str().unwrap(),
        "--out",
        dir.join("b").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn weighted_fixed_without_alpha_exits_2() {
    let dir = workdir("missing_alpha");
    let out = run(&[
        "curve",
        "--mode",
        "analytic-weighted-fixed",
        "--m-grid",
        "0:10:1",
        "--out",
        dir.join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mc_odd_m_exits_2() {
    let dir = workdir("mc_odd");
    let out = run(&[
        "mc",
        "--m-grid",
        "0,3",
        "--out",
        dir.join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn alpha_out_of_range_exits_2() {
    let dir = workdir("alpha_range");
    let out = run(&[
        "curve",
        "--mode",
        "analytic-weighted-fixed",
        "--alpha",
        "1.5",
        "--m-grid",
        "0:10:1",
        "--out",
        dir.join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_thread_cap_exits_2() {
    let dir = workdir("thread_cap");
    let out = bin()
        .args([
            "curve",
            "--m-grid",
            "0:4:2",
            "--out",
            dir.join("x").to_str().unwrap(),
        ])
        .env("OODLAB_THREADS", "abc")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_batch_composition_exits_3() {
    let dir = workdir("batch_infeasible");
    let out = run(&[
        "train",
        "--mode",
        "weighted",
        "--n",
        "10",
        "--batch-size",
        "40",
        "--m-grid",
        "0,20,100",
        "--runs",
        "2",
        "--epochs",
        "2",
        "--out",
        dir.join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("target"));
}

#[test]
fn repeated_m_flags_build_an_explicit_grid() {
    let dir = workdir("m_flags");
    let out_base = dir.join("c");
    assert_success(&run(&[
        "curve",
        "--m",
        "0",
        "--m",
        "28",
        "--m",
        "100",
        "--out",
        out_base.to_str().unwrap(),
    ]));
    let csv = read(&dir.join("c.csv"));
    let ms: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(ms, vec!["0", "28", "100"]);
    let sidecar: serde_json::Value = serde_json::from_str(&read(&dir.join("c.json"))).unwrap();
    assert_eq!(sidecar["params"]["m_grid"], "0,28,100");
}

#[test]
fn bound_schema_defaults_and_dominance() {
    let dir = workdir("bound_cmd");
    let out_base = dir.join("bnd");
    // --delta-conf deliberately omitted: the default must land in the sidecar.
    assert_success(&run(&[
        "bound",
        "--n",
        "100",
        "--m-grid",
        "0:2000:100",
        "--out",
        out_base.to_str().unwrap(),
    ]));
    let csv = read(&dir.join("bnd.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "m,true_error,upper_bound");
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let true_error: f64 = cells[1].parse().unwrap();
        let upper: f64 = cells[2].parse().unwrap();
        assert!(upper >= true_error, "row {line}: bound below true error");
    }
    let sidecar: serde_json::Value = serde_json::from_str(&read(&dir.join("bnd.json"))).unwrap();
    assert_eq!(sidecar["params"]["delta_conf"], 0.05);
    assert!(sidecar["derived"]["dh_star"].as_f64().unwrap() > 0.0);
}

#[test]
fn bound_zero_shift_reports_zero_divergence() {
    let dir = workdir("bound_zero");
    let out_base = dir.join("b0");
    assert_success(&run(&[
        "bound",
        "--delta",
        "0",
        "--m-grid",
        "0:100:50",
        "--out",
        out_base.to_str().unwrap(),
    ]));
    let sidecar: serde_json::Value = serde_json::from_str(&read(&dir.join("b0.json"))).unwrap();
    assert_eq!(sidecar["derived"]["dh_star"].as_f64().unwrap(), 0.0);
}

#[test]
fn mse_dips_then_rises() {
    let dir = workdir("mse_cmd");
    let out_base = dir.join("mse");
    assert_success(&run(&[
        "mse",
        "--delta",
        "1.8",
        "--n",
        "100",
        "--m-grid",
        "0,5,10,18,30,60,120,250,500,1000,5000,20000,100000",
        "--out",
        out_base.to_str().unwrap(),
    ]));
    let csv = read(&dir.join("mse.csv"));
    let values: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let baseline = values[0];
    assert!(values.iter().any(|v| *v < baseline), "no dip below m=0 mse");
    assert!(
        values.iter().any(|v| *v > baseline),
        "no rise above m=0 mse"
    );
}

#[test]
fn mc_curve_agrees_with_analytic_curve() {
    let dir = workdir("mc_vs_analytic");
    let mc_base = dir.join("mc");
    let an_base = dir.join("an");
    assert_success(&run(&[
        "mc",
        "--m-grid",
        "0,56,200",
        "--replicates",
        "4000",
        "--out",
        mc_base.to_str().unwrap(),
    ]));
    assert_success(&run(&[
        "curve",
        "--mode",
        "analytic-agnostic",
        "--m-grid",
        "0,56,200",
        "--out",
        an_base.to_str().unwrap(),
    ]));
    let mc_rows: Vec<Vec<String>> = read(&dir.join("mc.csv"))
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.to_owned()).collect())
        .collect();
    let an_rows: Vec<Vec<String>> = read(&dir.join("an.csv"))
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.to_owned()).collect())
        .collect();
    for (mc, an) in mc_rows.iter().zip(&an_rows) {
        assert_eq!(mc[0], an[0]);
        let mc_mean: f64 = mc[1].parse().unwrap();
        let se: f64 = mc[2].parse().unwrap();
        let analytic: f64 = an[1].parse().unwrap();
        assert!(
            (mc_mean - analytic).abs() <= 3.0 * se,
            "m={}: mc {mc_mean} vs analytic {analytic} (se {se})",
            mc[0]
        );
    }
}

#[test]
fn plot_two_column_csv_renders_one_polyline() {
    let dir = workdir("plot_cmd");
    let csv = dir.join("input.csv");
    fs::write(&csv, "x,y\n0,0.5\n1,0.4\n2,0.45\n").unwrap();
    let out_base = dir.join("chart");
    assert_success(&run(&[
        "plot",
        "--input",
        csv.to_str().unwrap(),
        "--out",
        out_base.to_str().unwrap(),
    ]));
    let svg = read(&dir.join("chart.svg"));
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<polyline").count(), 1);
}

#[test]
fn plot_standard_schema_skips_empty_columns() {
    let dir = workdir("plot_schema");
    let src_base = dir.join("curve");
    assert_success(&run(&[
        "curve",
        "--m-grid",
        "0:50:10",
        "--out",
        src_base.to_str().unwrap(),
    ]));
    let out_base = dir.join("chart");
    assert_success(&run(&[
        "plot",
        "--input",
        dir.join("curve.csv").to_str().unwrap(),
        "--out",
        out_base.to_str().unwrap(),
    ]));
    let svg = read(&dir.join("chart.svg"));
    // value column only; std_err/ci/alpha are empty for analytic curves.
    assert_eq!(svg.matches("<polyline").count(), 1);
}

#[test]
fn svg_flag_writes_chart_for_curve() {
    let dir = workdir("curve_svg");
    let out_base = dir.join("c");
    assert_success(&run(&[
        "curve",
        "--m-grid",
        "0:100:10",
        "--svg",
        "--out",
        out_base.to_str().unwrap(),
    ]));
    assert!(dir.join("c.svg").exists());
    let svg = read(&dir.join("c.svg"));
    assert!(svg.contains("<polyline"));
}

#[test]
fn train_outputs_alpha_column_in_weighted_mode() {
    let dir = workdir("train_cmd");
    let out_base = dir.join("tr");
    assert_success(&run(&[
        "train",
        "--mode",
        "weighted",
        "--alpha-policy",
        "optimal",
        "--n",
        "40",
        "--m-grid",
        "0,20,100",
        "--runs",
        "3",
        "--epochs",
        "5",
        "--out",
        out_base.to_str().unwrap(),
    ]));
    let csv = read(&dir.join("tr.csv"));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    // m = 0 falls back to alpha = 1; later points carry the numeric optimum.
    let alpha0: f64 = rows[0].split(',').nth(5).unwrap().parse().unwrap();
    assert_eq!(alpha0, 1.0);
    for row in &rows[1..] {
        let alpha: f64 = row.split(',').nth(5).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&alpha));
    }
}
