//! MOS variants, rank correlation, RMSE and the first-order (linear) mapping
//! between two MOS scales.

use serde::{Deserialize, Serialize};

use crate::data::{RatingDataset, ReferenceMos};
use crate::error::{Error, Result};
use crate::real::Real;

/// Lowest and highest point of the rating scale.
pub const SCALE_BOUNDS: (f64, f64) = (1.0, 5.0);

pub fn mean<T: Real>(xs: &[T]) -> Option<T> {
    if xs.is_empty() {
        return None;
    }
    Some(xs.iter().copied().sum::<T>() / T::from_count(xs.len()))
}

/// Sample standard deviation (denominator `len - 1`); zero for fewer than two values.
pub fn sample_std<T: Real>(xs: &[T]) -> T {
    if xs.len() < 2 {
        return T::zero();
    }
    let m = mean(xs).unwrap();
    let ss: T = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    (ss / T::from_count(xs.len() - 1)).sqrt()
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    Ok(())
}

/// Average (fractional) ranks, starting at 1. Tied values share the mean of
/// the ranks they occupy.
pub fn average_ranks<T: Real>(xs: &[T]) -> Vec<T> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].partial_cmp(&xs[j]).expect("ranks of NaN"));
    let mut ranks = vec![T::zero(); xs.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && xs[order[end]] == xs[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1 ..= end
        let rank = T::from_count(start + end + 1) / T::lit(2.0);
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation. Errors when either vector is constant.
pub fn pearson<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    check_lengths(a.len(), b.len())?;
    if a.len() < 2 {
        return Err(Error::TooFew {
            what: "paired values",
            need: 2,
            got: a.len(),
        });
    }
    let ma = mean(a).unwrap();
    let mb = mean(b).unwrap();
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - ma;
        let dy = y - mb;
        sab = sab + dx * dy;
        saa = saa + dx * dx;
        sbb = sbb + dy * dy;
    }
    if saa == T::zero() || sbb == T::zero() {
        return Err(Error::Undefined(
            "correlation with a constant vector".into(),
        ));
    }
    let r = sab / (saa * sbb).sqrt();
    Ok(r.max(-T::one()).min(T::one()))
}

/// Spearman's rank correlation with average ranks for ties.
pub fn srcc<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    check_lengths(a.len(), b.len())?;
    if a.len() < 3 {
        return Err(Error::TooFew {
            what: "paired values",
            need: 3,
            got: a.len(),
        });
    }
    pearson(&average_ranks(a), &average_ranks(b))
}

pub fn rmse<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    check_lengths(a.len(), b.len())?;
    if a.is_empty() {
        return Err(Error::TooFew {
            what: "paired values",
            need: 1,
            got: 0,
        });
    }
    let ss: T = a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum();
    Ok((ss / T::from_count(a.len())).sqrt())
}

/// `y = slope * x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearMap<T> {
    pub slope: T,
    pub intercept: T,
}

impl<T: Real> LinearMap<T> {
    pub fn identity() -> Self {
        LinearMap {
            slope: T::one(),
            intercept: T::zero(),
        }
    }

    #[inline]
    pub fn apply(&self, x: T) -> T {
        self.slope * x + self.intercept
    }

    /// Mapped value clipped to the rating scale.
    #[inline]
    pub fn apply_clipped(&self, x: T) -> T {
        self.apply(x)
            .max(T::lit(SCALE_BOUNDS.0))
            .min(T::lit(SCALE_BOUNDS.1))
    }

    /// Ordinary least-squares fit of `y` on `x`.
    pub fn fit(x: &[T], y: &[T]) -> Result<Self> {
        check_lengths(x.len(), y.len())?;
        if x.len() < 2 {
            return Err(Error::TooFew {
                what: "points",
                need: 2,
                got: x.len(),
            });
        }
        let mx = mean(x).unwrap();
        let my = mean(y).unwrap();
        let (mut sxy, mut sxx) = (T::zero(), T::zero());
        for (&a, &b) in x.iter().zip(y) {
            sxy = sxy + (a - mx) * (b - my);
            sxx = sxx + (a - mx) * (a - mx);
        }
        if sxx == T::zero() {
            return Err(Error::Degenerate("regressor is constant".into()));
        }
        let slope = sxy / sxx;
        Ok(LinearMap {
            slope,
            intercept: my - slope * mx,
        })
    }
}

/// Mean of the per-user MOS values `M_{x,u}` over users who rated `x`.
pub fn mos_user_balanced(ds: &RatingDataset, condition: &str) -> Result<f64> {
    let x = ds.require_condition(condition)?;
    Ok(user_balanced(ds, x))
}

pub(crate) fn user_balanced(ds: &RatingDataset, x: usize) -> f64 {
    let users = &ds.table(x).users;
    let total: f64 = users.iter().map(|u| u.counts.mean().unwrap()).sum();
    total / users.len() as f64
}

/// Arithmetic mean of a flat vote multiset.
pub fn mos_plain(votes: &[u8]) -> Result<f64> {
    if votes.is_empty() {
        return Err(Error::TooFew {
            what: "votes",
            need: 1,
            got: 0,
        });
    }
    Ok(votes.iter().map(|&v| f64::from(v)).sum::<f64>() / votes.len() as f64)
}

/// How per-condition MOS is aggregated from a dataset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MosKind {
    /// Mean of per-user means.
    #[default]
    UserBalanced,
    /// Mean of all votes.
    Plain,
}

impl std::str::FromStr for MosKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "balanced" | "user_balanced" | "user-balanced" => Ok(MosKind::UserBalanced),
            "plain" => Ok(MosKind::Plain),
            other => Err(Error::Config(format!("unknown MOS kind `{other}`"))),
        }
    }
}

/// MOS per condition, in dataset condition order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MosVector {
    pub conditions: Vec<String>,
    pub values: Vec<f64>,
    pub vote_counts: Vec<u64>,
}

impl MosVector {
    pub fn from_dataset(ds: &RatingDataset, kind: MosKind) -> Self {
        let values = (0..ds.num_conditions())
            .map(|x| match kind {
                MosKind::UserBalanced => user_balanced(ds, x),
                MosKind::Plain => {
                    let t = ds.table(x);
                    t.sum() as f64 / t.total() as f64
                }
            })
            .collect();
        MosVector {
            conditions: ds.conditions().to_vec(),
            values,
            vote_counts: ds.votes_per_condition(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, condition: &str) -> Option<f64> {
        self.conditions
            .iter()
            .position(|c| c == condition)
            .map(|i| self.values[i])
    }

    /// Paired (self, reference) values over conditions present in both.
    pub fn paired_with(&self, reference: &ReferenceMos) -> (Vec<f64>, Vec<f64>) {
        self.conditions
            .iter()
            .zip(&self.values)
            .filter_map(|(c, &v)| reference.get(c).map(|r| (v, r)))
            .unzip()
    }
}

const MIN_SHARED: usize = 3;

fn shared_pairs(cs: &MosVector, reference: &ReferenceMos) -> Result<(Vec<f64>, Vec<f64>)> {
    let (a, b) = cs.paired_with(reference);
    if a.len() < MIN_SHARED {
        return Err(Error::TooFew {
            what: "shared conditions",
            need: MIN_SHARED,
            got: a.len(),
        });
    }
    Ok((a, b))
}

/// Least-squares line mapping crowdsourcing MOS onto the reference scale.
pub fn fit_first_order_map(cs: &MosVector, reference: &ReferenceMos) -> Result<LinearMap<f64>> {
    let (a, b) = shared_pairs(cs, reference)?;
    LinearMap::fit(&a, &b)
}

/// RMSE after fitting and applying a clipped first-order map.
pub fn mapped_rmse<T: Real>(cs: &[T], reference: &[T]) -> Result<(T, LinearMap<T>)> {
    let map = LinearMap::fit(cs, reference)?;
    let mapped: Vec<T> = cs.iter().map(|&v| map.apply_clipped(v)).collect();
    Ok((rmse(&mapped, reference)?, map))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub shared_conditions: usize,
    pub srcc: f64,
    pub rmse: f64,
    pub rmse_after_mapping: Option<f64>,
    pub mapping: Option<LinearMap<f64>>,
}

/// SRCC and RMSE against the reference over shared conditions, optionally
/// with the RMSE after a first-order map.
pub fn compare_to_reference(
    cs: &MosVector,
    reference: &ReferenceMos,
    with_mapping: bool,
) -> Result<Comparison> {
    let (a, b) = shared_pairs(cs, reference)?;
    let (rmse_after_mapping, mapping) = if with_mapping {
        let (r, m) = mapped_rmse(&a, &b)?;
        (Some(r), Some(m))
    } else {
        (None, None)
    };
    Ok(Comparison {
        shared_conditions: a.len(),
        srcc: srcc(&a, &b)?,
        rmse: rmse(&a, &b)?,
        rmse_after_mapping,
        mapping,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{RatingRecord, Score};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ds(rows: &[(&str, &str, i64)]) -> RatingDataset {
        RatingDataset::from_records(
            rows.iter()
                .map(|&(c, u, s)| RatingRecord::new(c, u, Score::new(s).unwrap(), None).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn user_balanced_differs_from_plain() {
        let d = ds(&[("x", "u1", 5), ("x", "u1", 5), ("x", "u2", 1)]);
        assert_eq!(mos_user_balanced(&d, "x").unwrap(), 3.0);
        let plain = MosVector::from_dataset(&d, MosKind::Plain);
        assert_relative_eq!(plain.values[0], 11.0 / 3.0);
        assert!(mos_user_balanced(&d, "y").is_err());
    }

    #[test]
    fn mos_examples() {
        let d = ds(&[("x", "a", 4), ("x", "b", 4), ("x", "b", 4)]);
        assert_eq!(mos_user_balanced(&d, "x").unwrap(), 4.0);
        let d = ds(&[("x", "a", 1), ("x", "a", 2), ("x", "a", 3)]);
        assert_eq!(mos_user_balanced(&d, "x").unwrap(), 2.0);
        assert_eq!(mos_plain(&[1, 5]).unwrap(), 3.0);
        assert_eq!(mos_plain(&[4, 4, 4]).unwrap(), 4.0);
        assert_eq!(mos_plain(&[1, 1, 1, 5]).unwrap(), 2.0);
        assert!(mos_plain(&[]).is_err());
    }

    #[test]
    fn srcc_examples() {
        let a = [1.2, 3.4, 2.2, 5.0];
        assert_relative_eq!(srcc(&a, &a).unwrap(), 1.0);
        assert_relative_eq!(srcc(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!(matches!(
            srcc(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::TooFew { .. })
        ));
        assert!(matches!(
            srcc(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            srcc(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn srcc_with_tie() {
        // ranks of (1,2,2,4) are (1, 2.5, 2.5, 4); b is already ranked.
        // Pearson by hand: dx = (-1.5, 0, 0, 1.5), dy = (-1.5, 0.5, -0.5, 1.5)
        // sxy = 4.5, sxx = 4.5, syy = 5.0  -> 4.5 / sqrt(22.5)
        let r = srcc(&[1.0, 2.0, 2.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_relative_eq!(r, 4.5 / 22.5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(
            average_ranks(&[3.0, 1.0, 3.0, 3.0]),
            vec![3.0, 1.0, 3.0, 3.0]
        );
    }

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[1.0, 2.0], &[2.0, 3.0]).unwrap(), 1.0);
        assert_relative_eq!(rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 12.5f64.sqrt());
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
    }

    fn mos_vec(values: &[f64]) -> MosVector {
        MosVector {
            conditions: (0..values.len()).map(|i| format!("c{i}")).collect(),
            values: values.to_vec(),
            vote_counts: vec![1; values.len()],
        }
    }

    fn reference(values: &[f64]) -> ReferenceMos {
        ReferenceMos::from_pairs(
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (format!("c{i}"), v)),
        )
        .unwrap()
    }

    #[test]
    fn first_order_map_examples() {
        let lab = [1.5, 2.0, 3.1, 4.2, 4.8];
        let cs = mos_vec(&lab);
        let m = fit_first_order_map(&cs, &reference(&lab)).unwrap();
        assert_relative_eq!(m.slope, 1.0, epsilon = 1e-9);
        assert_relative_eq!(m.intercept, 0.0, epsilon = 1e-9);

        let squashed: Vec<f64> = lab.iter().map(|v| 0.5 * v + 1.0).collect();
        let cs = mos_vec(&squashed);
        let m = fit_first_order_map(&cs, &reference(&lab)).unwrap();
        assert_relative_eq!(m.slope, 2.0, epsilon = 1e-9);
        assert_relative_eq!(m.intercept, -2.0, epsilon = 1e-9);

        let flat = mos_vec(&[3.0, 3.0, 3.0]);
        assert!(fit_first_order_map(&flat, &reference(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn comparison_against_itself() {
        let lab = [1.5, 2.0, 3.1, 4.2];
        let cs = mos_vec(&lab);
        let c = compare_to_reference(&cs, &reference(&lab), true).unwrap();
        assert_eq!(c.shared_conditions, 4);
        assert_relative_eq!(c.srcc, 1.0);
        assert_eq!(c.rmse, 0.0);
        assert!(c.rmse_after_mapping.unwrap() < 1e-12);

        let few = mos_vec(&[1.0, 2.0]);
        assert!(matches!(
            compare_to_reference(&few, &reference(&lab), false),
            Err(Error::TooFew { got: 2, .. })
        ));
    }

    #[test]
    fn balanced_equals_plain_for_equal_contributions() {
        let d = ds(&[
            ("x", "a", 1),
            ("x", "a", 5),
            ("x", "b", 2),
            ("x", "b", 2),
            ("y", "a", 3),
            ("y", "c", 4),
        ]);
        let b = MosVector::from_dataset(&d, MosKind::UserBalanced);
        let p = MosVector::from_dataset(&d, MosKind::Plain);
        for (x, y) in b.values.iter().zip(&p.values) {
            assert_relative_eq!(x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn generic_over_f32() {
        let r: f32 = srcc(&[1.0f32, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert_relative_eq!(r, 0.6, epsilon = 1e-6);
        let m = LinearMap::<f32>::fit(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]).unwrap();
        assert_relative_eq!(m.slope, 2.0, epsilon = 1e-6);
    }

    fn scores() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((1.0f64..5.0, 1.0f64..5.0), 3..30)
    }

    proptest! {
        #[test]
        fn srcc_invariant_under_increasing_affine_maps(
            pairs in scores(), slope in 0.01f64..10.0, shift in -5.0f64..5.0
        ) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            if let Ok(r) = srcc(&a, &b) {
                let mapped: Vec<f64> = a.iter().map(|v| slope * v + shift).collect();
                prop_assert!((srcc(&mapped, &b).unwrap() - r).abs() < 1e-12);
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }

        #[test]
        fn rmse_is_a_symmetric_distance(pairs in scores()) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let ab = rmse(&a, &b).unwrap();
            prop_assert_eq!(ab, rmse(&b, &a).unwrap());
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(rmse(&a, &a).unwrap(), 0.0);
        }

        #[test]
        fn mapping_never_increases_rmse(pairs in scores()) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            if let Ok((mapped, _)) = mapped_rmse(&a, &b) {
                prop_assert!(mapped <= rmse(&a, &b).unwrap() + 1e-12);
            }
        }
    }
}
