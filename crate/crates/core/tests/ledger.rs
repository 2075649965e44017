use turborecon::harness::gen_source;
use turborecon::ledger::{
    reconcile_all, select_strategy, Method, PipelineConfig, ReconciliationReport, Thresholds,
};
use turborecon::puncture::binary_entropy;
use turborecon::slicing::SliceConfig;

fn check_report(report: &ReconciliationReport) {
    assert!(report.identity_holds());
    assert_eq!(
        report.net_bits,
        report.total_entropy - report.total_disclosed as f64
    );
    for o in &report.outcomes {
        assert!(
            o.disclosed <= report.samples,
            "slice {} over the ceiling",
            o.slice
        );
        if o.method == Method::FullDisclosure {
            assert_eq!(o.disclosed, report.samples);
        }
        if o.method == Method::Turbo {
            let h = binary_entropy(o.ber).unwrap() * report.samples as f64;
            assert!(
                o.disclosed as f64 >= h,
                "slice {}: {} < {h}",
                o.slice,
                o.disclosed
            );
        }
    }
}

#[test]
fn strategy_column() {
    let t = Thresholds::default();
    let want = [
        (0.4968, Method::FullDisclosure),
        (0.3489, Method::FullDisclosure),
        (0.0638, Method::Turbo),
        (0.0002, Method::Cascade),
        (6e-12, Method::Cascade),
    ];
    for (e, m) in want {
        assert_eq!(select_strategy(e, &t), m, "e = {e}");
    }
}

#[test]
fn noiseless_source_keeps_almost_everything() {
    let (x, y) = gen_source(20_000, 0.0, 4);
    let slices = SliceConfig::equiprobable(5, 0.0).unwrap();
    let (report, corrected) = reconcile_all(&x, &y, &slices, &PipelineConfig::default()).unwrap();
    check_report(&report);
    assert!(report.reconciled_exactly);
    assert_eq!(corrected.len(), 5);
    assert!(report.outcomes.iter().all(|o| o.method == Method::Cascade));
    assert!(
        report.net_bits_per_sample() > 4.95,
        "{}",
        report.net_bits_per_sample()
    );
}

#[test]
fn quarter_error_sign_slice_clamps_to_full_length() {
    // sigma = 1 puts the sign slice at e = atan(1) / pi = 0.25.
    let l = 20_000;
    let (x, y) = gen_source(l, 1.0, 12);
    let slices = SliceConfig {
        m: 1,
        boundaries: vec![0.0],
        noise_sigma: 1.0,
    };
    let config = PipelineConfig {
        thresholds: Thresholds { hi: 0.3, lo: 0.008 },
        ..Default::default()
    };
    let (report, _) = reconcile_all(&x, &y, &slices, &config).unwrap();
    check_report(&report);
    let o = &report.outcomes[0];
    assert!((o.ber - 0.25).abs() < 0.01, "{}", o.ber);
    assert_eq!(o.method, Method::Turbo);
    assert_eq!(o.disclosed, l);
    assert!(report.reconciled_exactly);
}

#[test]
fn net_yield_falls_with_noise() {
    let l = 20_000;
    let mut means = Vec::new();
    for sigma in [0.06, 0.1, 0.16] {
        let slices = SliceConfig::equiprobable(5, sigma).unwrap();
        let mut total = 0.0;
        for trial in 0..10 {
            let (x, y) = gen_source(l, sigma, 1000 + trial);
            let config = PipelineConfig {
                seed: trial,
                ..Default::default()
            };
            let (report, _) = reconcile_all(&x, &y, &slices, &config).unwrap();
            check_report(&report);
            assert!(report.reconciled_exactly);
            total += report.net_bits_per_sample();
        }
        means.push(total / 10.0);
    }
    assert!(means.windows(2).all(|w| w[0] >= w[1]), "{means:?}");
}

#[test]
fn reports_are_reproducible() {
    let (x, y) = gen_source(20_000, 0.104, 21);
    let slices = SliceConfig::equiprobable(5, 0.104).unwrap();
    let config = PipelineConfig {
        seed: 5,
        ..Default::default()
    };
    let (a, ca) = reconcile_all(&x, &y, &slices, &config).unwrap();
    let (b, cb) = reconcile_all(&x, &y, &slices, &config).unwrap();
    assert_eq!(ca, cb);
    assert_eq!(a.total_disclosed, b.total_disclosed);
    let strip = |r: &ReconciliationReport| -> Vec<_> {
        r.outcomes
            .iter()
            .map(|o| (o.method, o.disclosed, o.residual_errors, o.frames_failed))
            .collect()
    };
    assert_eq!(strip(&a), strip(&b));
}
