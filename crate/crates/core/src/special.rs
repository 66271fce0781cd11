//! Special functions backing the Student-t quantile.

use crate::Scalar;

/// Lanczos approximation (g = 7, 9 terms) of `ln Γ(x)` for `x > 0`.
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let half = T::lit(0.5);
    if x < half {
        // reflection
        let pi = T::lit(std::f64::consts::PI);
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut a = T::lit(COEF[0]);
    let t = x + T::lit(7.5);
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a = a + T::lit(c) / (x + T::from_count(i));
    }
    T::lit(0.5 * (2.0 * std::f64::consts::PI).ln()) + (x + half) * t.ln() - t + a.ln()
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn inc_beta<T: Scalar>(x: T, a: T, b: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if x >= T::one() {
        return T::one();
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (T::one() - x).ln();
    let front = ln_front.exp();
    if x < (a + T::one()) / (a + b + T::lit(2.0)) {
        front * beta_cf(x, a, b) / a
    } else {
        T::one() - front * beta_cf(T::one() - x, b, a) / b
    }
}

/// Continued fraction for the incomplete beta, modified Lentz iteration.
fn beta_cf<T: Scalar>(x: T, a: T, b: T) -> T {
    let tiny = T::lit(1e-300).max(T::min_positive_value());
    let eps = T::epsilon();
    let one = T::one();
    let two = T::lit(2.0);
    let clamp = |v: T| if v.abs() < tiny { tiny } else { v };

    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one / clamp(one - qab * x / qap);
    let mut h = d;
    for m in 1..=300 {
        let m = T::from_count(m);
        let m2 = two * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one / clamp(one + aa * d);
        c = clamp(one + aa / c);
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one / clamp(one + aa * d);
        c = clamp(one + aa / c);
        let del = d * c;
        h = h * del;
        if (del - one).abs() <= eps {
            break;
        }
    }
    h
}

/// CDF of Student's t distribution with `df` degrees of freedom.
pub fn student_t_cdf<T: Scalar>(t: T, df: T) -> T {
    let half = T::lit(0.5);
    let x = df / (df + t * t);
    let tail = half * inc_beta(x, df * half, half);
    if t >= T::zero() {
        T::one() - tail
    } else {
        tail
    }
}

/// Inverts [`student_t_cdf`] by bisection until the bracket is narrower than 1e-10.
///
/// `p` must lie strictly inside (0, 1) and `df` must be positive.
pub fn student_t_quantile<T: Scalar>(p: T, df: T) -> T {
    assert!(p > T::zero() && p < T::one(), "probability must be in (0, 1)");
    assert!(df > T::zero(), "degrees of freedom must be positive");
    let half = T::lit(0.5);
    if p == half {
        return T::zero();
    }
    if p < half {
        return -student_t_quantile(T::one() - p, df);
    }
    let mut lo = T::zero();
    let mut hi = T::one();
    while student_t_cdf(hi, df) < p {
        lo = hi;
        hi = hi * T::lit(2.0);
        if hi > T::lit(1e12) {
            return hi;
        }
    }
    let width = T::lit(1e-10).max(T::epsilon() * hi);
    while hi - lo > width {
        let mid = half * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if student_t_cdf(mid, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    half * (lo + hi)
}
