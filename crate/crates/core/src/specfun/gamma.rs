use crate::scalar::Real;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
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

/// ln Γ(x) for x > 0.
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // reflection: Γ(x)Γ(1−x) = π / sin(πx)
        let pi = T::lit(std::f64::consts::PI);
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut a = T::lit(LANCZOS[0]);
    let t = x + T::lit(LANCZOS_G) + half;
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        a = a + T::lit(*c) / (x + T::from_usize_lossy(k));
    }
    T::lit(0.5 * (2.0 * std::f64::consts::PI).ln()) + (x + half) * t.ln() - t + a.ln()
}

/// Γ(x) for x > 0. Integers and half-integers up to 40 use the exact product recurrence.
pub fn gamma<T: Real>(x: T) -> T {
    match half_integer_product(x) {
        Some(v) => v,
        None => ln_gamma(x).exp(),
    }
}

/// Γ(a)/Γ(b) for a, b > 0.
pub fn gamma_ratio<T: Real>(a: T, b: T) -> T {
    match (half_integer_product(a), half_integer_product(b)) {
        (Some(x), Some(y)) => x / y,
        _ => (ln_gamma(a) - ln_gamma(b)).exp(),
    }
}

fn half_integer_product<T: Real>(x: T) -> Option<T> {
    let two_x = x * T::lit(2.0);
    if !(x > T::zero()) || two_x != two_x.round() || x > T::lit(40.0) {
        return None;
    }
    let half = T::lit(0.5);
    let (mut acc, mut k) = if two_x.to_i64()? % 2 == 0 {
        (T::one(), T::one())
    } else {
        (T::lit(std::f64::consts::PI.sqrt()), half)
    };
    while k < x {
        acc = acc * k;
        k = k + T::one();
    }
    Some(acc)
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b) for a, b > 0.
pub fn beta<T: Real>(a: T, b: T) -> T {
    match (half_integer_product(a), half_integer_product(b), half_integer_product(a + b)) {
        (Some(x), Some(y), Some(z)) => x * y / z,
        _ => (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp(),
    }
}

/// Rising factorial a(a+1)⋯(a+l−1); 1 for l = 0.
pub fn pochhammer_rising<T: Real>(a: T, l: usize) -> T {
    (0..l).fold(T::one(), |acc, k| acc * (a + T::from_usize_lossy(k)))
}
