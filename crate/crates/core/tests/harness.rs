use std::process::Command;

use turborecon::harness::{
    cascade_bench, gen_source, read_samples, sw_bench, write_samples, RunConfig,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_turborecon"))
}

#[test]
fn source_correlation_matches_closed_form() {
    let l = 100_000;
    for sigma in [0.1f64, 0.5, 1.0] {
        let (x, y) = gen_source(l, sigma, 3);
        let n = l as f64;
        let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
        let (mx, my) = (mean(&x), mean(&y));
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
        let rho_hat = sxy / (sxx * syy).sqrt();
        let rho = 1.0 / (1.0 + sigma * sigma).sqrt();
        // Large-sample standard error of the sample correlation.
        let se = (1.0 - rho * rho) / n.sqrt();
        assert!(
            (rho_hat - rho).abs() <= 3.0 * se,
            "sigma {sigma}: {rho_hat} vs {rho} +- {}",
            3.0 * se
        );
    }
}

#[test]
fn sample_files_are_seed_stable() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, sigma: f64, seed: u64| {
        let (x, y) = gen_source(1000, sigma, seed);
        let a = dir.path().join(format!("{name}_x.csv"));
        let b = dir.path().join(format!("{name}_y.csv"));
        write_samples(&a, "x", &x).unwrap();
        write_samples(&b, "x", &y).unwrap();
        (std::fs::read(a).unwrap(), std::fs::read(b).unwrap())
    };
    assert_eq!(write("first", 0.2, 9), write("second", 0.2, 9));
    let (x, y) = write("quiet", 0.0, 9);
    assert_eq!(x, y);

    let (x, _) = gen_source(1000, 0.2, 9);
    let path = dir.path().join("round.csv");
    write_samples(&path, "x", &x).unwrap();
    assert_eq!(read_samples(&path).unwrap(), x);
}

#[test]
fn corrupted_sample_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "x\n0.5\nnot-a-number\n").unwrap();
    assert!(read_samples(&path).is_err());
    std::fs::write(&path, "x\n0.5\ninf\n").unwrap();
    assert!(read_samples(&path).is_err());
}

#[test]
fn sw_bench_rows_are_sorted_and_monotone() {
    let config = RunConfig {
        block_len: 2000,
        trials: 40,
        ber_grid: vec![0.11, 0.02, 0.08, 0.05],
        fixed_rate: Some(0.5),
        ..Default::default()
    };
    let rows = sw_bench(&config).unwrap();
    let bers: Vec<f64> = rows.iter().map(|r| r.ber).collect();
    assert_eq!(bers, vec![0.02, 0.05, 0.08, 0.11]);
    assert!(rows.iter().all(|r| r.rate == 0.5 && r.frames == 40));
    assert!(
        rows.windows(2).all(|w| w[0].success >= w[1].success),
        "{rows:?}"
    );
    assert_eq!(rows[0].success, 1.0);
    assert_eq!(rows[3].success, 0.0);
}

#[test]
fn sw_bench_low_ber_row_sits_at_the_rate_floor() {
    let config = RunConfig {
        block_len: 2000,
        trials: 4,
        ber_grid: vec![0.001],
        ..Default::default()
    };
    let rows = sw_bench(&config).unwrap();
    assert_eq!(rows[0].rate, config.policy.min_rate);
    assert_eq!(rows[0].frames, 4);
}

#[test]
fn cascade_bench_reports_every_point() {
    let config = RunConfig {
        samples: 4096,
        trials: 20,
        ber_grid: vec![0.01, 0.001],
        ..Default::default()
    };
    let rows = cascade_bench(&config).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].ber < rows[1].ber);
    assert!(rows.iter().all(|r| r.success == 1.0 && r.efficiency < 2.0));
}

#[test]
fn cli_noiseless_reconcile_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let alice = dir.path().join("a.csv");
    let bob = dir.path().join("b.csv");
    let status = bin()
        .args([
            "gen-source",
            "--samples",
            "5000",
            "--noise-sigma",
            "0",
            "--seed",
            "2",
        ])
        .arg("--alice")
        .arg(&alice)
        .arg("--bob")
        .arg(&bob)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(read_samples(&alice).unwrap(), read_samples(&bob).unwrap());

    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let out = bin()
        .args(["reconcile", "--noise-sigma", "0"])
        .arg("--alice")
        .arg(&alice)
        .arg("--bob")
        .arg(&bob)
        .arg("--json")
        .arg(&json)
        .arg("--csv")
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = std::fs::read_to_string(&csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next().unwrap(),
        "slice,ber,method,disclosed_over_l,shannon_limit_h,disclosed_bits,residual_errors,fallback"
    );
    assert_eq!(lines.count(), 5);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let per_sample = report["net_bits"].as_f64().unwrap() / 5000.0;
    assert!(per_sample > 4.9, "{per_sample}");
}

#[test]
fn cli_rejects_corrupted_input() {
    let dir = tempfile::tempdir().unwrap();
    let alice = dir.path().join("a.csv");
    let bob = dir.path().join("b.csv");
    std::fs::write(&alice, "x\n0.1\n0.2\n").unwrap();
    std::fs::write(&bob, "y\n0.1\ngarbage\n").unwrap();
    let out = bin()
        .arg("reconcile")
        .arg("--alice")
        .arg(&alice)
        .arg("--bob")
        .arg(&bob)
        .arg("--json")
        .arg(dir.path().join("r.json"))
        .arg("--csv")
        .arg(dir.path().join("r.csv"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("garbage"));
}

#[test]
fn cli_config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "samples = 300\ntrials = 2\nber_grid = [0.005]\n\n[trellis]\nfeedback_poly = 0o23\n",
    )
    .unwrap();
    let out = bin()
        .arg("--config")
        .arg(&cfg)
        .args(["cascade-bench", "--samples", "512"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("ber,trials,per_party"));

    std::fs::write(&cfg, "samples = 300\nbogus = 1\n").unwrap();
    let out = bin()
        .arg("--config")
        .arg(&cfg)
        .arg("cascade-bench")
        .output()
        .unwrap();
    assert!(!out.status.success());
}
