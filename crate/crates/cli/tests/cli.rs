use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn qvotes(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qvotes"))
        .args(args)
        .current_dir(dir)
        .env_remove("QVOTES_THREADS")
        .output()
        .expect("run qvotes")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

/// Six conditions, eight users each, votes spread around a condition level.
fn toy_ratings() -> String {
    let mut s = String::from("condition_id,user_id,score\n");
    for c in 0..6 {
        for u in 0..8 {
            let v = (1 + (c + u % 3) / 2).min(5);
            s.push_str(&format!("c{c},u{u},{v}\n"));
        }
    }
    s
}

fn field(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no `{key}` in {out}"))
        .parse()
        .unwrap()
}

#[test]
fn score_zero_fails_with_line_number() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "r.csv",
        "condition_id,user_id,score\nc1,u1,3\nc1,u2,0\n",
    );
    let o = qvotes(&["validate", "r.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn validate_reports_votes_per_condition() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "r.csv", &toy_ratings());
    let o = qvotes(&["validate", "r.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("conditions: 6"));
    assert!(out.contains("votes per condition: 8 (std 0)"), "{out}");
}

#[test]
fn validate_warns_about_orphan_reference_conditions() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "r.csv", &toy_ratings());
    write(
        dir.path(),
        "ref.csv",
        "condition_id,mos\nzz1,3.0\nzz2,4.0\n",
    );
    let o = qvotes(&["validate", "r.csv", "ref.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("zz1") && err.contains("zz2"), "{err}");
}

#[test]
fn compare_identical_mos_is_perfect() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "r.csv",
        "condition_id,user_id,score\na,u1,1\nb,u1,2\nc,u1,3\nd,u1,4\ne,u1,5\n",
    );
    write(
        dir.path(),
        "ref.csv",
        "condition_id,mos\na,1\nb,2\nc,3\nd,4\ne,5\n",
    );
    let o = qvotes(
        &["compare", "r.csv", "ref.csv", "--fom", "--json", "cmp.json"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(field(&out, "srcc"), 1.0);
    assert_eq!(field(&out, "rmse"), 0.0);
    assert!(field(&out, "rmse mapped").abs() < 1e-9);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("cmp.json")).unwrap()).unwrap();
    assert_eq!(json["shared_conditions"], 5);
    assert!(dir.path().join("cmp.json.manifest.json").exists());
}

#[test]
fn compare_needs_three_shared_conditions() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "r.csv", &toy_ratings());
    write(
        dir.path(),
        "ref.csv",
        "condition_id,mos\nc0,1.5\nc1,2.0\nq,3\n",
    );
    let o = qvotes(&["compare", "r.csv", "ref.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("got 2"), "{}", stderr(&o));
}

#[test]
fn simulate_constant_votes_single_run() {
    let dir = TempDir::new().unwrap();
    let mut s = String::from("condition_id,user_id,score\n");
    for c in 0..4 {
        for u in 0..5 {
            s.push_str(&format!("c{c},u{u},3\n"));
        }
    }
    write(dir.path(), "r.csv", &s);
    let o = qvotes(
        &[
            "simulate",
            "r.csv",
            "--runs",
            "1",
            "--n",
            "10:10:10",
            "--metrics",
            "ci",
            "--out",
            "c.csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("c.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 2, "{csv}");
    assert_eq!(rows[1], "ci_width,r,10,0,0,0,0");
}

#[test]
fn simulate_is_reproducible_with_a_seed() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "r.csv", &toy_ratings());
    let run = |out: &str| {
        let o = qvotes(
            &[
                "simulate",
                "r.csv",
                "--n",
                "5:20:5",
                "--runs",
                "12",
                "--seed",
                "7",
                "--metrics",
                "gain_srcc,gain_rmse,irr",
                "--out",
                out,
            ],
            dir.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read(dir.path().join(out)).unwrap()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    assert_eq!(a, b);
    assert!(!a.contains(&b'\r'));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a.csv.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["master_seed"], 7);
    assert_eq!(
        manifest["input_digests"]["r.csv"].as_str().unwrap().len(),
        64
    );
}

#[test]
fn simulate_validity_without_reference_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "r.csv", &toy_ratings());
    let o = qvotes(
        &["simulate", "r.csv", "--metrics", "srcc", "--out", "c.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("c.csv").exists());
}

#[test]
fn simulate_rejects_bad_sweep() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "r.csv", &toy_ratings());
    let o = qvotes(
        &["simulate", "r.csv", "--n", "20:10:5", "--out", "c.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn maxci_midpoint_at_ten_votes() {
    let dir = TempDir::new().unwrap();
    let o = qvotes(&["maxci", "--mos", "3", "--n", "10:10:10"], dir.path());
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 2);
    let w: f64 = rows[1].rsplit(',').next().unwrap().parse().unwrap();
    assert!((w - 2.503).abs() < 1e-3, "{w}");
}

#[test]
fn maxci_extremes_match_closed_form_and_each_other() {
    let dir = TempDir::new().unwrap();
    let widths = |mos: &str| -> Vec<f64> {
        let o = qvotes(&["maxci", "--mos", mos, "--n", "10:100:30"], dir.path());
        assert!(o.status.success());
        stdout(&o)
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect()
    };
    let low = widths("1");
    let high = widths("5");
    assert_eq!(low, high);
    for (w, n) in low.iter().zip([10.0, 40.0, 70.0, 100.0]) {
        let closed = 4.0 * (1.0 - 0.025f64.powf(1.0 / n));
        assert!((w - closed).abs() < 1e-5, "{w} vs {closed}");
    }
}

#[test]
fn maxci_out_of_range_mos_fails() {
    let dir = TempDir::new().unwrap();
    let o = qvotes(&["maxci", "--mos", "5.5", "--n", "10"], dir.path());
    assert!(!o.status.success());
}

#[test]
fn fit_needs_four_points() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "c.csv",
        "metric,dataset,n,mean,ci_low,ci_high,std_dev\n\
         gain_rmse,d,10,0.5,0.4,0.6,0.1\n\
         gain_rmse,d,20,0.4,0.3,0.5,0.1\n\
         gain_rmse,d,30,0.35,0.3,0.4,0.1\n",
    );
    let o = qvotes(&["fit", "c.csv", "--metric", "gain_rmse"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn fit_recovers_a_noiseless_curve() {
    let dir = TempDir::new().unwrap();
    let mut s = String::from("metric,dataset,n,mean,ci_low,ci_high,std_dev\n");
    for n in (10..=200).step_by(10) {
        let y = 0.6467 * f64::powf(n as f64, -0.9903) + 0.4803;
        s.push_str(&format!("validity_rmse,cs,{n},{y:.17},{y},{y},0\n"));
    }
    write(dir.path(), "c.csv", &s);
    let o = qvotes(
        &[
            "fit",
            "c.csv",
            "--metric",
            "validity_rmse",
            "--out",
            "m.json",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    assert!((m["a"].as_f64().unwrap() - 0.6467).abs() < 1e-6);
    assert!((m["b"].as_f64().unwrap() + 0.9903).abs() < 1e-6);
    assert!((m["c"].as_f64().unwrap() - 0.4803).abs() < 1e-6);
    assert!(dir.path().join("m.json.manifest.json").exists());
}

#[test]
fn fit_unknown_metric_lists_available() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "c.csv",
        "metric,dataset,n,mean,ci_low,ci_high,std_dev\nirr,d,10,0.5,0.4,0.6,0.1\n",
    );
    let o = qvotes(&["fit", "c.csv", "--metric", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("available: irr"), "{}", stderr(&o));
}

#[test]
fn column_remapping() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "r.csv", "cond;worker;rating\na;w1;4\nb;w1;2\n");
    let o = qvotes(
        &[
            "validate",
            "r.csv",
            "--delimiter",
            ";",
            "--col",
            "condition=cond,user=worker,score=rating",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("conditions: 2"));
    let bad = qvotes(&["validate", "r.csv", "--col", "colour=x"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
}
