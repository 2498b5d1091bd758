//! Special functions: log-gamma, the regularized incomplete beta function
//! and its inverse, plus the Student t quantile built on top of it.

use crate::real::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos approximation).
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // reflection
        let pi = T::lit(std::f64::consts::PI);
        return (pi / (pi * x).sin()).abs().ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::from_count(i));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    T::lit(0.5 * (2.0 * std::f64::consts::PI).ln()) + (x + half) * t.ln() - t + acc.ln()
}

/// `ln B(a, b)`.
pub fn ln_beta<T: Real>(a: T, b: T) -> T {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf<T: Real>(a: T, b: T, x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let eps = T::epsilon();
    let one = T::one();
    let two = T::lit(2.0);

    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = d.recip();
    let mut h = d;
    for m in 1..=1000 {
        let m = T::from_count(m);
        let m2 = two * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let del = d * c;
        h = h * del;
        if (del - one).abs() <= eps {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function `I_x(a, b)` for `a, b > 0`, `x` in `[0, 1]`.
pub fn inc_beta<T: Real>(a: T, b: T, x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if x >= T::one() {
        return T::one();
    }
    let ln_front = a * x.ln() + b * (T::one() - x).ln() - ln_beta(a, b);
    if x < (a + T::one()) / (a + b + T::lit(2.0)) {
        ln_front.exp() * beta_cf(a, b, x) / a
    } else {
        T::one() - ln_front.exp() * beta_cf(b, a, T::one() - x) / b
    }
}

/// Solves `I_x(a, b) = p` for `x` with a bracketed Newton iteration.
pub fn inv_inc_beta<T: Real>(p: T, a: T, b: T) -> T {
    if p <= T::zero() {
        return T::zero();
    }
    if p >= T::one() {
        return T::one();
    }
    let half = T::lit(0.5);
    let ln_b = ln_beta(a, b);
    let (mut lo, mut hi) = (T::zero(), T::one());
    let mut x = half;
    for _ in 0..300 {
        let f = inc_beta(a, b, x) - p;
        if f == T::zero() {
            return x;
        }
        if f < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let ln_pdf = (a - T::one()) * x.ln() + (b - T::one()) * (T::one() - x).ln() - ln_b;
        let pdf = ln_pdf.exp();
        let mut next = x - f / pdf;
        if !next.is_finite() || next <= lo || next >= hi {
            next = (lo + hi) * half;
        }
        let step = (next - x).abs();
        x = next;
        if step <= T::epsilon() * x.max(T::epsilon()) || hi - lo <= T::epsilon() * hi {
            break;
        }
    }
    x
}

/// Quantile of Student's t distribution with `dof` degrees of freedom.
pub fn student_t_quantile<T: Real>(p: T, dof: T) -> T {
    let half = T::lit(0.5);
    if p == half {
        return T::zero();
    }
    let tail = if p < half { p } else { T::one() - p };
    let x = inv_inc_beta(T::lit(2.0) * tail, dof * half, half);
    let t = (dof * (T::one() - x) / x).sqrt();
    if p < half {
        -t
    } else {
        t
    }
}
