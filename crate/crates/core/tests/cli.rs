use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn purify(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_purify"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(str::to_owned).collect()).collect();
    (header, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (header, rows) = read_csv(path);
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn manifest(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn analytic_values() {
    let dir = tempfile::tempdir().unwrap();
    assert!(purify(dir.path(), &["analytic", "--quantity", "tau_q", "--values", "1e-6"]).status.success());
    let v = column(&dir.path().join("analytic_tau_q.csv"), "tau_q");
    assert!((v[0] - 3.2806).abs() < 1e-4);

    assert!(purify(dir.path(), &["analytic", "--quantity", "mean_fpt", "--values", "0.25", "--z0", "0"]).status.success());
    let v = column(&dir.path().join("analytic_mean_fpt.csv"), "mean_fpt");
    assert!((v[0] - 0.1558).abs() < 1e-4);

    assert!(purify(dir.path(), &["analytic", "--quantity", "ratio", "--values", "1e-12"]).status.success());
    let v = column(&dir.path().join("analytic_ratio.csv"), "ratio");
    assert!((v[0] - 1.902).abs() < 1e-3);
}

#[test]
fn every_quantity_tabulates() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str]); 10] = [
        ("mean_purity", &["--from", "0.5", "--to", "5", "--points", "4"]),
        ("epsilon_asymptotic", &["--values", "1,2"]),
        ("tau_c", &["--values", "1e-6"]),
        ("tau_q", &["--from", "1e-8", "--to", "0.1", "--points", "5", "--log"]),
        ("mean_fpt", &["--values", "0.01"]),
        ("ratio", &["--values", "0.1,0.01"]),
        ("wp_q", &["--from", "-3", "--to", "3", "--points", "7", "--t", "0.5"]),
        ("purity_pdf", &["--values", "0.6,0.9,0.999", "--t", "1.72694"]),
        ("abs_z", &["--values", "2"]),
        ("fp_survival", &["--values", "0,0.5,1", "--grid-nodes", "199"]),
    ];
    for (q, extra) in cases {
        let mut args = vec!["analytic", "--quantity", q];
        args.extend_from_slice(extra);
        let out = purify(dir.path(), &args);
        assert!(out.status.success(), "{q}: {}", String::from_utf8_lossy(&out.stderr));
        let csv = dir.path().join(format!("analytic_{q}.csv"));
        let m = manifest(&dir.path().join(format!("analytic_{q}.manifest.json")));
        assert_eq!(m["quantity"], q);
        let (_, rows) = read_csv(&csv);
        assert!(!rows.is_empty());
    }
    let fp = manifest(&dir.path().join("analytic_fp_survival.manifest.json"));
    assert!(fp["fp_mean_fpt"].as_f64().unwrap() > 0.0);
}

#[test]
fn usage_errors_exit_nonzero_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!purify(dir.path(), &["analytic", "--quantity", "entropy"]).status.success());
    assert!(!purify(dir.path(), &["analytic", "--quantity", "tau_q"]).status.success());
    assert!(!purify(dir.path(), &["fpt", "--epsilon", "0.7", "--n-traj", "5"]).status.success());
    assert!(!purify(dir.path(), &["figure1", "--n-traj", "0"]).status.success());
    // tau_q is undefined for ε > 1/2; nothing partial may remain
    assert!(!purify(dir.path(), &["analytic", "--quantity", "tau_q", "--values", "0.1,0.9"]).status.success());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn figure1_single_run_and_feedback_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = purify(dir.path(), &["figure1", "--n-traj", "1", "--dt", "1e-3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let late = dir.path().join("figure1_t3.2806.csv");
    let counts = column(&late, "count");
    let m = manifest(&dir.path().join("figure1_t3.2806.manifest.json"));
    let under: u64 = m["underflow_counts"].as_array().unwrap()[1].as_u64().unwrap();
    assert_eq!(counts.iter().sum::<f64>() as u64 + under, 1);
    let jacobs = column(&late, "jacobs_s");
    assert!((jacobs[0] / 1e-6 - 1.0).abs() < 1e-4);
    assert_eq!(column(&late, "jacobs_mass").iter().sum::<f64>(), 1.0);
    for key in ["n_traj", "dt", "seed", "epsilon", "times", "bins", "log10_min", "master_seed", "t_max"] {
        assert!(!m[key].is_null(), "manifest lacks {key}");
    }
    assert!(dir.path().join("figure1_t1.72694.manifest.json").exists());
}

#[test]
fn figure2_3_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = purify(
        dir.path(),
        &["figure2-3", "--n-traj", "300", "--dt", "1e-3", "--epsilon", "0.1,0.01,0.001,1e-4,1e-5,1e-6"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = dir.path().join("figure3_ratios.csv");
    let ratio = column(&table, "ratio_curve");
    assert!(ratio.windows(2).all(|w| w[1] > w[0] && w[1] < 2.0));
    assert!((ratio[5] - 1.809).abs() < 1e-3);
    let exact = column(&table, "exact_mean");
    assert!((exact[5] - 1.8136).abs() < 1e-4);
    let mut csvs = 0;
    for entry in fs::read_dir(dir.path()).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "csv") {
            csvs += 1;
            let stem = p.file_stem().unwrap().to_string_lossy().into_owned();
            assert!(dir.path().join(format!("{stem}.manifest.json")).exists());
        }
    }
    assert_eq!(csvs, 7);
}

#[test]
fn small_numbers_are_scientific() {
    let dir = tempfile::tempdir().unwrap();
    assert!(purify(dir.path(), &["analytic", "--quantity", "tau_c", "--values", "1e-6"]).status.success());
    let body = fs::read_to_string(dir.path().join("analytic_tau_c.csv")).unwrap();
    assert!(body.lines().nth(1).unwrap().starts_with("1e-6,"));
}
