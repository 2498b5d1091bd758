use qvotes::simulate::{draw_run, CurvePoint};
use qvotes::{
    ci_width_curve, irr_curve, irr_full, run_sweep, sample_condition, Metric, MosKind, MosVector,
    RatingDataset, RatingRecord, ReferenceMos, Score, SweepConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn panel(conditions: usize, users: usize, seed: u64) -> RatingDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for c in 0..conditions {
        let level = 1.0 + 4.0 * c as f64 / (conditions - 1) as f64;
        for u in 0..users {
            let bias = (u % 4) as f64 * 0.25 - 0.375;
            let v = (level + bias + rng.random_range(-1.2..1.2))
                .round()
                .clamp(1.0, 5.0) as i64;
            rows.push(
                RatingRecord::new(
                    format!("c{c:02}"),
                    format!("u{u:03}"),
                    Score::new(v).unwrap(),
                    None,
                )
                .unwrap(),
            );
        }
    }
    RatingDataset::from_records(rows)
        .unwrap()
        .with_label("panel")
}

fn cfg(n: &[u32], runs: u32, metrics: &[Metric]) -> SweepConfig {
    SweepConfig {
        n_values: n.to_vec(),
        repetitions: runs,
        master_seed: 99,
        metrics: metrics.to_vec(),
        bootstrap_resamples: 300,
        ..SweepConfig::default()
    }
}

#[test]
fn validity_against_full_mos_equals_certainty_gain() {
    let ds = panel(10, 30, 1);
    let full = MosVector::from_dataset(&ds, MosKind::UserBalanced);
    let reference = ReferenceMos::from_pairs(
        full.conditions
            .iter()
            .cloned()
            .zip(full.values.iter().copied()),
    )
    .unwrap();
    let metrics = [
        Metric::ValiditySrcc,
        Metric::ValidityRmse,
        Metric::GainSrcc,
        Metric::GainRmse,
    ];
    let curves = run_sweep(&ds, Some(&reference), &cfg(&[3, 8, 20], 10, &metrics)).unwrap();
    for (v, g) in [(0, 2), (1, 3)] {
        for (a, b) in curves[v].points.iter().zip(&curves[g].points) {
            assert!(
                (a.mean - b.mean).abs() < 1e-12,
                "{} vs {}",
                curves[v].metric,
                curves[g].metric
            );
            assert!((a.std_dev - b.std_dev).abs() < 1e-12);
        }
    }
}

#[test]
fn sampled_users_rated_the_condition() {
    let mut rows = Vec::new();
    for (c, users) in [("a", ["u1", "u2"]), ("b", ["u3", "u4"])] {
        for u in users {
            rows.push(RatingRecord::new(c, u, Score::new(3).unwrap(), None).unwrap());
        }
    }
    let ds = RatingDataset::from_records(rows).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (_, users) = sample_condition(&ds, "a", 500, &mut rng).unwrap();
    assert!(users.iter().all(|u| u == "u1" || u == "u2"));
    assert!(users.iter().any(|u| u == "u1") && users.iter().any(|u| u == "u2"));
    let run = draw_run(&ds, 5, 50, 0);
    let b = ds.condition_index("b").unwrap();
    let (u3, u4) = (ds.user_index("u3").unwrap(), ds.user_index("u4").unwrap());
    assert!(run.per_condition_votes[b]
        .users
        .iter()
        .all(|&u| u == u3 || u == u4));
}

#[test]
fn curve_ci_shrinks_with_more_runs() {
    let ds = panel(8, 25, 3);
    let width = |runs| {
        let c = run_sweep(&ds, None, &cfg(&[10], runs, &[Metric::GainRmse])).unwrap();
        let p: &CurvePoint = &c[0].points[0];
        p.ci_high - p.ci_low
    };
    let (w10, w160) = (width(10), width(160));
    assert!(w160 < w10 / 2.0, "{w10} -> {w160}");
}

#[test]
fn ci_width_drops_when_votes_double() {
    let ds = panel(6, 60, 4);
    let c = ci_width_curve(&ds, &cfg(&[10, 20, 40, 80], 30, &[])).unwrap();
    for w in c.points.windows(2) {
        assert!(w[1].mean < w[0].mean, "n={} -> n={}", w[0].n, w[1].n);
    }
    // roughly 1/sqrt(n)
    let ratio = c.points[3].mean / c.points[2].mean;
    assert!((ratio - 0.5f64.sqrt()).abs() < 0.08, "{ratio}");
}

#[test]
fn sampled_irr_approaches_full_data_irr() {
    let ds = panel(12, 60, 5);
    let full = irr_full(&ds, 3).unwrap();
    let c = irr_curve(&ds, &cfg(&[20, 200], 20, &[]), 3).unwrap();
    let (g20, g200) = (c.points[0].mean, c.points[1].mean);
    assert!(g20 < g200);
    assert!((g200 - full).abs() < 0.02, "{g200} vs {full}");
}

#[test]
fn mean_of_sampled_mos_is_plain_mos() {
    let ds = panel(3, 40, 6);
    let plain = MosVector::from_dataset(&ds, MosKind::Plain);
    let n = 50u32;
    let runs = 400u32;
    for (x, want) in plain.values.iter().enumerate() {
        let mos: Vec<f64> = (0..runs)
            .map(|r| draw_run(&ds, 11, n, r).per_condition_votes[x].mos())
            .collect();
        let mean = mos.iter().sum::<f64>() / f64::from(runs);
        let sd = (mos.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / f64::from(runs - 1)).sqrt();
        let se = sd / f64::from(runs).sqrt();
        assert!(
            (mean - want).abs() < 4.0 * se + 1e-12,
            "condition {x}: {mean} vs {want}"
        );
    }
}
