//! Serialized forms of curves and fitted models.
//!
//! Curve CSV columns: `metric,dataset,n,mean,ci_low,ci_high,std_dev`, numbers
//! with six significant digits. JSON output keeps full precision.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::data::LoadError;
use crate::error::{Error, Result};
use crate::modelfit::PowerModel;
use crate::simulate::{CurvePoint, MetricCurve, SweepConfig};

pub const CURVE_HEADER: [&str; 7] = [
    "metric", "dataset", "n", "mean", "ci_low", "ci_high", "std_dev",
];

/// Formats `x` with six significant digits, without trailing zeros.
pub fn fmt_sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("round-trips");
    let s = rounded.to_string();
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn io_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Load(LoadError::Csv {
        line,
        message: e.to_string(),
    })
}

pub fn write_curves_csv<W: Write>(curves: &[MetricCurve], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CURVE_HEADER).map_err(io_err)?;
    for c in curves {
        for p in &c.points {
            w.write_record([
                c.metric.clone(),
                c.dataset_label.clone(),
                p.n.to_string(),
                fmt_sig6(p.mean),
                fmt_sig6(p.ci_low),
                fmt_sig6(p.ci_high),
                fmt_sig6(p.std_dev),
            ])
            .map_err(io_err)?;
        }
    }
    w.flush().map_err(|e| Error::Load(LoadError::Io(e)))?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct CurveRow {
    metric: String,
    dataset: String,
    n: u32,
    mean: f64,
    ci_low: f64,
    ci_high: f64,
    std_dev: f64,
}

/// Reads curves written by [`write_curves_csv`], grouping rows by (metric, dataset)
/// in order of first appearance.
pub fn read_curves_csv<R: Read>(input: R) -> Result<Vec<MetricCurve>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut curves: Vec<MetricCurve> = Vec::new();
    for row in rdr.deserialize::<CurveRow>() {
        let row = row.map_err(io_err)?;
        let point = CurvePoint {
            n: row.n,
            mean: row.mean,
            ci_low: row.ci_low,
            ci_high: row.ci_high,
            std_dev: row.std_dev,
            runs: 0,
        };
        match curves
            .iter_mut()
            .find(|c| c.metric == row.metric && c.dataset_label == row.dataset)
        {
            Some(c) => c.points.push(point),
            None => curves.push(MetricCurve {
                metric: row.metric,
                dataset_label: row.dataset,
                points: vec![point],
            }),
        }
    }
    Ok(curves)
}

/// JSON bundle of a simulation: the configuration and every curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveBundle {
    pub config: SweepConfig,
    pub curves: Vec<MetricCurve>,
}

/// Fitted model as written by `qvotes fit`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub metric: String,
    pub dataset: String,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rmse_of_fit: f64,
    pub n_points: usize,
}

impl ModelReport {
    pub fn new(metric: &str, dataset: &str, m: &PowerModel<f64>) -> Self {
        ModelReport {
            metric: metric.to_string(),
            dataset: dataset.to_string(),
            a: m.a,
            b: m.b,
            c: m.c,
            rmse_of_fit: m.rmse_of_fit,
            n_points: m.n_points,
        }
    }

    pub fn model(&self) -> PowerModel<f64> {
        PowerModel {
            a: self.a,
            b: self.b,
            c: self.c,
            rmse_of_fit: self.rmse_of_fit,
            n_points: self.n_points,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig6(0.0), "0");
        assert_eq!(fmt_sig6(2.503_012_34), "2.50301");
        assert_eq!(fmt_sig6(0.000_712_345_6), "0.000712346");
        assert_eq!(fmt_sig6(1234567.0), "1234570");
        assert_eq!(fmt_sig6(-0.5), "-0.5");
        assert_eq!(fmt_sig6(3.0), "3");
    }

    #[test]
    fn csv_layout() {
        let curves = vec![MetricCurve {
            metric: "irr".into(),
            dataset_label: "cs".into(),
            points: vec![CurvePoint {
                n: 10,
                mean: 0.5,
                ci_low: 0.4,
                ci_high: 0.6,
                std_dev: 0.1,
                runs: 3,
            }],
        }];
        let mut buf = Vec::new();
        write_curves_csv(&curves, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "metric,dataset,n,mean,ci_low,ci_high,std_dev\nirr,cs,10,0.5,0.4,0.6,0.1\n"
        );
    }

    proptest! {
        #[test]
        fn csv_round_trip_within_print_precision(
            means in prop::collection::vec(-5.0f64..5.0, 1..10)
        ) {
            let curve = MetricCurve {
                metric: "gain_rmse".into(),
                dataset_label: "d".into(),
                points: means.iter().enumerate().map(|(i, &m)| CurvePoint {
                    n: 10 * (i as u32 + 1), mean: m, ci_low: m - 0.1, ci_high: m + 0.1, std_dev: 0.2, runs: 0,
                }).collect(),
            };
            let mut buf = Vec::new();
            write_curves_csv(std::slice::from_ref(&curve), &mut buf).unwrap();
            let back = read_curves_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back.len(), 1);
            for (a, b) in back[0].points.iter().zip(&curve.points) {
                prop_assert_eq!(a.n, b.n);
                prop_assert!((a.mean - b.mean).abs() <= 5e-6 * b.mean.abs().max(1e-300));
            }
        }
    }
}
