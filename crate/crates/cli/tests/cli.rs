use std::path::Path;
use std::process::{Command, Output};

use limitcycle_cli::svg::parse_series;
use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_limitcycle"));
    cmd.env_remove("LIMITCYCLE_OUTPUT_DIR");
    cmd
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn amplitude(dir: &Path, args: &[&str]) -> f64 {
    let mut all = vec!["amplitude"];
    all.extend_from_slice(args);
    json(&run(dir, &all))["amplitude"].as_f64().unwrap()
}

#[test]
fn anchor_amplitudes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let a = amplitude(d, &["--system", "rayleigh", "--eps", "1", "--method", "exact"]);
    assert!((a - 2.1727).abs() < 2e-3, "{a}");
    let a = amplitude(d, &["--system", "vdp", "--eps", "1", "--method", "exact"]);
    assert!((a - 2.0086).abs() < 2e-3, "{a}");
    let a = amplitude(d, &["--system", "rayleigh", "--eps", "1", "--method", "irgm", "--preset", "rayleigh"]);
    assert!((a - 2.1727).abs() < 1e-4, "{a}");
}

#[test]
fn amplitude_record_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let v = json(&run(
        tmp.path(),
        &["amplitude", "--system", "vdp", "--eps", "2", "--method", "fit"],
    ));
    assert_eq!(v["system"], "vdp");
    assert_eq!(v["method"], "fit");
    assert_eq!(v["eps"], 2.0);
    let v = json(&run(
        tmp.path(),
        &["amplitude", "--system", "rayleigh", "--eps", "2", "--method", "irgm", "--h-rg", "-0.3"],
    ));
    assert!(v["amplitude"].as_f64().unwrap() > 2.0);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let code = |args: &[&str]| run(d, args).status.code().unwrap();
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["amplitude", "--system", "rayleigh", "--eps", "-1", "--method", "exact"]), 1);
    assert_eq!(code(&["amplitude", "--system", "vdp", "--eps", "1", "--method", "ham"]), 1);
    assert_eq!(code(&["amplitude", "--system", "vdp", "--eps", "60", "--method", "fit"]), 1);
    assert_eq!(code(&["amplitude", "--system", "duffing", "--eps", "1", "--method", "exact"]), 1);
    assert_eq!(code(&["bogus"]), 1);

    // a cycle that cannot settle in two crossings is a convergence failure
    std::fs::write(d.join("tight.toml"), "[integrator]\nmax_cycles = 2\ntransient_time = 0.0\n").unwrap();
    let out = run(
        d,
        &["--config", "tight.toml", "amplitude", "--system", "rayleigh", "--eps", "5", "--method", "exact"],
    );
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn output_dir_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("cfg.toml"), "output_dir = \"from_config\"\n").unwrap();
    let sweep = ["--config", "cfg.toml", "sweep", "--grid", "1", "--methods", "rg"];

    assert!(run(d, &sweep).status.success());
    assert!(d.join("from_config/sweep_rayleigh.csv").exists());

    let out = bin()
        .current_dir(d)
        .env("LIMITCYCLE_OUTPUT_DIR", d.join("from_env"))
        .args(sweep)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(d.join("from_env/sweep_rayleigh.csv").exists());

    let out = bin()
        .current_dir(d)
        .env("LIMITCYCLE_OUTPUT_DIR", d.join("from_env2"))
        .args(sweep)
        .args(["--out", "from_flag"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(d.join("from_flag/sweep_rayleigh.csv").exists());
    assert!(!d.join("from_env2").exists());
}

#[test]
fn sweep_csv_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let args = |out: &'static str| {
        vec![
            "sweep", "--grid", "0.5,1,2,5", "--methods", "exact,ham,rg", "--jobs", "3", "--out", out,
        ]
    };
    assert!(run(d, &args("a")).status.success());
    assert!(run(d, &args("b")).status.success());
    let a = std::fs::read(d.join("a/sweep_rayleigh.csv")).unwrap();
    let b = std::fs::read(d.join("b/sweep_rayleigh.csv")).unwrap();
    assert_eq!(a, b);

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "eps,a_exact,a_ham,a_rg,a_irgm,rel_err_ham,rel_err_rg,rel_err_irgm,error"
    );
    let eps: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(eps, vec![0.5, 1.0, 2.0, 5.0]);
}

#[test]
fn sweep_records_point_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let v = json(&run(
        d,
        &["sweep", "--system", "vdp", "--grid", "1,60", "--methods", "fit", "--out", "o"],
    ));
    assert_eq!(v["points"], 2);
    assert_eq!(v["failed_points"], 1);
    let text = std::fs::read_to_string(d.join("o/sweep_vdp.csv")).unwrap();
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("60,"));
    assert!(last.contains("fit:"));
}

#[test]
fn sweep_svg_carries_the_numbers() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert!(run(d, &["sweep", "--grid", "1,2", "--methods", "exact,rg", "--out", "o"]).status.success());
    let svg = std::fs::read_to_string(d.join("o/sweep_rayleigh.svg")).unwrap();
    assert!(!svg.contains("href"));
    let series = parse_series(&svg);
    let names: Vec<_> = series.iter().map(|s| s.0.as_str()).collect();
    assert_eq!(names, ["exact", "rg"]);
    assert_eq!(series[0].1.len(), 2);
    assert!((series[0].1[0].1 - 2.1727).abs() < 2e-3);
}

#[test]
fn appendix_c_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let v = json(&run(d, &["cycle", "--system", "vdp", "--eps", "5", "--appendix-c", "--out", "o"]));
    let verbatim = &v["curves"][0];
    assert_eq!(verbatim["label"], "appendix_c");
    let joints = verbatim["joints"].as_array().unwrap();
    assert_eq!(joints.len(), 7);
    for j in joints {
        if let Some(g) = j["gap"].as_f64() {
            assert!(g < 0.1, "{j}");
        }
    }

    let v = json(&run(d, &["cycle", "--system", "rayleigh", "--eps", "5", "--appendix-c", "--out", "o"]));
    let defects = v["curves"][0]["domain_defects"].as_array().unwrap();
    assert_eq!(defects[0]["piece"], 0);
    assert!((defects[0]["real"][0].as_f64().unwrap() + 4.4).abs() < 1e-9);
    assert!(d.join("o/cycle_rayleigh_eps5.csv").exists());
    assert!(d.join("o/curves_rayleigh_eps5.json").exists());
}

#[test]
fn fit_writes_a_curve_file() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let v = json(&run(d, &["cycle", "--system", "rayleigh", "--eps", "5", "--fit", "0.1", "--out", "o"]));
    let fit = &v["curves"][0];
    assert!(fit["distance"]["max"].as_f64().unwrap() <= 0.2);
    let text = std::fs::read_to_string(d.join("o/fit_rayleigh_eps5.toml")).unwrap();
    let curve = limitcycle::geometry::PiecewiseCurve::from_toml_str(&text).unwrap();
    assert_eq!(curve.pieces().len() as u64, fit["pieces"].as_u64().unwrap());

    let v = json(&run(d, &["fit", "--system", "vdp", "--eps", "5", "--tol", "0.05", "--out", "o"]));
    assert!(v["curves"][0]["distance"]["max"].as_f64().unwrap() <= 0.1);
    assert!(d.join("o/fit_vdp_eps5.toml").exists());
}

#[test]
fn report_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let v = json(&run(d, &["report", "--grid", "1,5", "--vdp-grid", "0.1,1,5", "--out", "r"]));
    for n in 1..=7 {
        let prefix = format!("fig{n}_");
        let count = std::fs::read_dir(d.join("r"))
            .unwrap()
            .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with(&prefix))
            .count();
        assert!(count >= 2, "fig{n}");
    }
    let disc = &v["discrepancies"];
    assert_eq!(disc["vdp_constant_consistent"], false);
    assert!((disc["vdp_calibration"]["computed_c"].as_f64().unwrap() - 3.7624).abs() < 1e-3);
    assert!(disc["rg_error_at_5"].as_f64().unwrap() > 20.0);
    let md = std::fs::read_to_string(d.join("r/report.md")).unwrap();
    assert!(md.contains("4.08785"));
    assert!(md.contains("imaginary on its whole domain"));
}
