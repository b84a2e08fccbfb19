//! Gamma function, factorials and digamma at integers.

use std::f64::consts::PI;
use std::sync::OnceLock;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
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

const MAX_FACTORIAL: usize = 170;

fn factorial_table() -> &'static [f64; MAX_FACTORIAL + 1] {
    static TABLE: OnceLock<[f64; MAX_FACTORIAL + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; MAX_FACTORIAL + 1];
        for k in 1..=MAX_FACTORIAL {
            t[k] = t[k - 1] * k as f64;
        }
        t
    })
}

/// n! for n ≤ 170, +inf beyond.
pub fn factorial(n: u32) -> f64 {
    factorial_table()
        .get(n as usize)
        .copied()
        .unwrap_or(f64::INFINITY)
}

fn lanczos_sum(z: f64) -> f64 {
    let mut a = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    a
}

/// Γ(x) for real x (poles return NaN).
pub fn gamma(x: f64) -> f64 {
    if x.fract() == 0.0 {
        if x <= 0.0 {
            return f64::NAN;
        }
        return factorial((x - 1.0).min(1e6) as u32);
    }
    if (2.0 * x).fract() == 0.0 && x > 0.0 && x < 171.0 {
        return gamma_half_integer(x);
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

// Γ(k + 1/2) = (k − 1/2)(k − 3/2)…(1/2)·√π
fn gamma_half_integer(x: f64) -> f64 {
    let mut v = PI.sqrt();
    let mut s = 0.5;
    while s < x - 0.25 {
        v *= s;
        s += 1.0;
    }
    v
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NAN;
    }
    if x < 171.0 && (2.0 * x).fract() == 0.0 {
        return gamma(x).ln();
    }
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// ψ(n) for integer n ≥ 1 through the harmonic sum −γ + Σ_{k<n} 1/k.
pub fn digamma_int(n: u32) -> f64 {
    assert!(n >= 1, "digamma_int requires n >= 1");
    let mut h = 0.0;
    for k in 1..n {
        h += 1.0 / k as f64;
    }
    h - EULER_GAMMA
}
