//! Spherical Bessel functions j_n and h_n⁽¹⁾ = j_n + i y_n.
//!
//! Computed with the spherical recurrences directly, independently of the
//! cylinder routines, so the identity j_n = √(π/2x) J_{n+1/2} is a real check.

use num_complex::Complex64;

use crate::error::{Error, Result};

const RESCALE: f64 = 1e200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SphericalKind {
    First,
    Third,
}

fn sph_j(n: u32, x: f64) -> f64 {
    let nf = n as f64;
    if x < 1e-3 * (nf + 1.0).sqrt() || x * x < 0.1 * (2.0 * nf + 3.0) {
        return sph_j_series(n, x);
    }
    let base = nf.max(x);
    let m = (base + 30.0 + 10.0 * base.cbrt()).ceil() as usize;
    // v[i] holds j_{i−1}
    let mut v = vec![0.0; m + 3];
    v[m + 1] = 1.0;
    for i in (1..=m + 1).rev() {
        let k = i as f64 - 1.0;
        v[i - 1] = ((2.0 * k + 1.0) / x) * v[i] - v[i + 1];
        if v[i - 1].abs() > RESCALE {
            for e in &mut v[i - 1..] {
                *e /= RESCALE;
            }
        }
    }
    let (s, c) = x.sin_cos();
    let scale = if s.abs() >= c.abs() {
        (s / x) / v[1]
    } else {
        (c / x) / v[0]
    };
    v[n as usize + 1] * scale
}

// j_n(x) = x^n/(2n+1)!! · Σ (−x²/2)^k / (k! (2n+3)(2n+5)…(2n+2k+1))
fn sph_j_series(n: u32, x: f64) -> f64 {
    let mut pref = 1.0;
    for k in 0..n {
        pref *= x / (2 * k + 3) as f64;
    }
    let q = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    pref * sum
}

fn sph_y(n: u32, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let y0 = -c / x;
    if n == 0 {
        return y0;
    }
    let mut prev = y0;
    let mut cur = -c / (x * x) - s / x;
    for k in 1..n {
        let next = ((2 * k + 1) as f64 / x) * cur - prev;
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            break;
        }
    }
    cur
}

pub fn spherical_bessel(kind: SphericalKind, n: u32, x: f64) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("spherical Bessel needs x > 0, got {x}")));
    }
    let j = sph_j(n, x);
    match kind {
        SphericalKind::First => Ok(Complex64::new(j, 0.0)),
        SphericalKind::Third => {
            let y = sph_y(n, x);
            if !y.is_finite() {
                return Err(Error::Overflow {
                    what: "spherical_bessel",
                    order: n as f64,
                    x,
                });
            }
            Ok(Complex64::new(j, y))
        }
    }
}
