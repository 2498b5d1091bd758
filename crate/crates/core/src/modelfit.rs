//! Saturating power models `y = a * x^b + c`.
//!
//! Fitting profiles out the linear parameters: for a fixed exponent `b` the
//! best `(a, c)` is an ordinary least-squares line in `x^b`. Each exponent
//! from [`START_EXPONENTS`] seeds a Levenberg-Marquardt refinement over all
//! three parameters and the lowest-residual result wins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

pub const START_EXPONENTS: [f64; 6] = [-2.0, -1.5, -1.0, -0.5, -0.25, -0.1];
pub const MAX_ITERATIONS: usize = 500;
pub const STEP_TOLERANCE: f64 = 1e-10;
pub const MIN_DISTINCT_X: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerModel<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub rmse_of_fit: T,
    pub n_points: usize,
}

impl<T: Real> PowerModel<T> {
    pub fn evaluate(&self, x: T) -> T {
        self.a * x.powf(self.b) + self.c
    }

    /// Large-`x` limit for a saturating model.
    pub fn asymptote(&self) -> T {
        self.c
    }

    pub fn is_saturating(&self) -> bool {
        self.b < T::zero() && self.a != T::zero() && self.a.is_finite() && self.b.is_finite()
    }
}

pub fn evaluate_model<T: Real>(model: &PowerModel<T>, x: T) -> T {
    model.evaluate(x)
}

fn sum_sq<T: Real>(points: &[(T, T)], a: T, b: T, c: T) -> T {
    points
        .iter()
        .map(|&(x, y)| {
            let r = a * x.powf(b) + c - y;
            r * r
        })
        .sum()
}

/// Best `(a, c)` for a fixed exponent.
fn linear_given_exponent<T: Real>(points: &[(T, T)], b: T) -> Option<(T, T)> {
    let n = T::from_count(points.len());
    let (mut su, mut sy, mut suu, mut suy) = (T::zero(), T::zero(), T::zero(), T::zero());
    for &(x, y) in points {
        let u = x.powf(b);
        su = su + u;
        sy = sy + y;
        suu = suu + u * u;
        suy = suy + u * y;
    }
    let mu = su / n;
    let my = sy / n;
    let var = suu / n - mu * mu;
    if !(var > T::zero()) || !var.is_finite() {
        return None;
    }
    let a = (suy / n - mu * my) / var;
    Some((a, my - a * mu))
}

/// Solves a 3x3 system by Gaussian elimination with partial pivoting.
fn solve3<T: Real>(mut m: [[T; 3]; 3], mut v: [T; 3]) -> Option<[T; 3]> {
    for col in 0..3 {
        let pivot =
            (col..3).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[pivot][col] == T::zero() || !m[pivot][col].is_finite() {
            return None;
        }
        m.swap(col, pivot);
        v.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] = m[row][k] - f * m[col][k];
            }
            v[row] = v[row] - f * v[col];
        }
    }
    let mut out = [T::zero(); 3];
    for row in (0..3).rev() {
        let mut acc = v[row];
        for k in row + 1..3 {
            acc = acc - m[row][k] * out[k];
        }
        out[row] = acc / m[row][row];
    }
    out.iter().all(|x| x.is_finite()).then_some(out)
}

/// Levenberg-Marquardt refinement from `start`. Never returns a worse point.
fn refine<T: Real>(points: &[(T, T)], start: [T; 3]) -> ([T; 3], T) {
    let [mut a, mut b, mut c] = start;
    let mut cost = sum_sq(points, a, b, c);
    let mut lambda = T::lit(1e-3);
    let tol = T::lit(STEP_TOLERANCE);
    for _ in 0..MAX_ITERATIONS {
        let mut jtj = [[T::zero(); 3]; 3];
        let mut jtr = [T::zero(); 3];
        for &(x, y) in points {
            let u = x.powf(b);
            let r = a * u + c - y;
            let g = [u, a * u * x.ln(), T::one()];
            for i in 0..3 {
                jtr[i] = jtr[i] + g[i] * r;
                for j in 0..3 {
                    jtj[i][j] = jtj[i][j] + g[i] * g[j];
                }
            }
        }
        let mut accepted = false;
        while lambda < T::lit(1e20) {
            let mut damped = jtj;
            for (i, row) in damped.iter_mut().enumerate() {
                row[i] = row[i] + lambda * jtj[i][i].max(T::epsilon());
            }
            let Some(step) = solve3(damped, [-jtr[0], -jtr[1], -jtr[2]]) else {
                lambda = lambda * T::lit(10.0);
                continue;
            };
            let (na, nb, nc) = (a + step[0], b + step[1], c + step[2]);
            let new_cost = sum_sq(points, na, nb, nc);
            if new_cost.is_finite() && new_cost <= cost {
                let norm = (step[0] * step[0] + step[1] * step[1] + step[2] * step[2]).sqrt();
                a = na;
                b = nb;
                c = nc;
                let improved = new_cost < cost;
                cost = new_cost;
                lambda = (lambda / T::lit(3.0)).max(T::lit(1e-12));
                accepted = improved && norm >= tol;
                break;
            }
            lambda = lambda * T::lit(10.0);
        }
        if !accepted {
            break;
        }
    }
    ([a, b, c], cost)
}

/// Least-squares fit of `y = a * x^b + c`.
///
/// Constant `y` yields the degenerate model `a = 0, b = -1, c = y`.
pub fn fit_power_model<T: Real>(points: &[(T, T)]) -> Result<PowerModel<T>> {
    if points
        .iter()
        .any(|&(x, y)| !(x > T::zero()) || !x.is_finite() || !y.is_finite())
    {
        return Err(Error::Degenerate(
            "power model needs finite points with x > 0".into(),
        ));
    }
    let mut xs: Vec<T> = points.iter().map(|p| p.0).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    if xs.len() < MIN_DISTINCT_X {
        return Err(Error::TooFew {
            what: "distinct x values",
            need: MIN_DISTINCT_X,
            got: xs.len(),
        });
    }
    let n_points = points.len();
    let y0 = points[0].1;
    if points.iter().all(|p| p.1 == y0) {
        return Ok(PowerModel {
            a: T::zero(),
            b: -T::one(),
            c: y0,
            rmse_of_fit: T::zero(),
            n_points,
        });
    }

    let mut best: Option<([T; 3], T)> = None;
    for &b0 in &START_EXPONENTS {
        let b0 = T::lit(b0);
        let Some((a0, c0)) = linear_given_exponent(points, b0) else {
            continue;
        };
        let (params, cost) = refine(points, [a0, b0, c0]);
        if best.as_ref().is_none_or(|(_, bc)| cost < *bc) {
            best = Some((params, cost));
        }
    }
    let ([a, b, c], cost) =
        best.ok_or_else(|| Error::Degenerate("no usable starting exponent".into()))?;
    Ok(PowerModel {
        a,
        b,
        c,
        rmse_of_fit: (cost / T::from_count(n_points)).sqrt(),
        n_points,
    })
}

/// Outcome of [`votes_for_target`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetVotes {
    Votes(u64),
    /// The target lies at or beyond the asymptote.
    Unreachable,
}

/// Smallest vote count at which the model meets `target`.
///
/// Rising models (`a < 0`) must reach at least `target`, falling models
/// (`a > 0`) at most `target`.
pub fn votes_for_target<T: Real>(model: &PowerModel<T>, target: T) -> Result<TargetVotes> {
    if !model.is_saturating() {
        return Err(Error::Degenerate(format!(
            "model with a = {}, b = {} does not saturate",
            model.a, model.b
        )));
    }
    let rising = model.a < T::zero();
    let meets = |n: u64| {
        let v = model.evaluate(T::from_u64(n).unwrap());
        if rising {
            v >= target
        } else {
            v <= target
        }
    };
    if (rising && target >= model.c) || (!rising && target <= model.c) {
        return Ok(TargetVotes::Unreachable);
    }
    if meets(1) {
        return Ok(TargetVotes::Votes(1));
    }
    // a * n^b = target - c  =>  n = ((target - c) / a)^(1 / b)
    let guess = ((target - model.c) / model.a).powf(model.b.recip());
    let guess = guess.to_f64_lossy();
    if !guess.is_finite() || guess >= u64::MAX as f64 / 2.0 {
        return Ok(TargetVotes::Unreachable);
    }
    let mut n = (guess.ceil() as u64).max(1);
    while n > 1 && meets(n - 1) {
        n -= 1;
    }
    while !meets(n) {
        n += 1;
    }
    Ok(TargetVotes::Votes(n))
}
