//! Associated Legendre functions (Condon–Shortley phase) and spherical harmonics.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::factorial;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SphHarmIndex {
    pub n: u32,
    pub m: i32,
}

impl SphHarmIndex {
    pub fn new(n: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > n {
            return Err(Error::Index(format!("|m| = {} exceeds degree n = {n}", m.abs())));
        }
        Ok(SphHarmIndex { n, m })
    }
}

fn legendre_nonneg(n: u32, m: u32, z: f64) -> f64 {
    // P_m^m = (−1)^m (2m−1)!! (1−z²)^{m/2}
    let sq = ((1.0 - z) * (1.0 + z)).max(0.0).sqrt();
    let mut pmm = 1.0;
    for k in 0..m {
        pmm *= -((2 * k + 1) as f64) * sq;
    }
    if n == m {
        return pmm;
    }
    let mut pm1 = z * (2 * m + 1) as f64 * pmm;
    let mut pm0 = pmm;
    for l in m + 2..=n {
        let lf = l as f64;
        let mf = m as f64;
        let next = (z * (2.0 * lf - 1.0) * pm1 - (lf + mf - 1.0) * pm0) / (lf - mf);
        pm0 = pm1;
        pm1 = next;
    }
    pm1
}

/// P_n^m(z) for |m| ≤ n, |z| ≤ 1.
pub fn assoc_legendre(n: u32, m: i32, z: f64) -> Result<f64> {
    if m.unsigned_abs() > n {
        return Err(Error::Index(format!("|m| = {} exceeds degree n = {n}", m.abs())));
    }
    if !(z.abs() <= 1.0) {
        return Err(Error::Domain(format!("Legendre argument {z} outside [-1, 1]")));
    }
    let am = m.unsigned_abs();
    let p = legendre_nonneg(n, am, z);
    if m >= 0 {
        return Ok(p);
    }
    let sign = if am % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * factorial(n - am) / factorial(n + am) * p)
}

/// Y_n^m(θ, φ) = γ_n^m e^{imφ} P_n^m(cos θ), γ_n^m = √((2n+1)(n−m)!/(4π(n+m)!)).
pub fn sph_harm(idx: SphHarmIndex, theta: f64, phi: f64) -> Result<Complex64> {
    let SphHarmIndex { n, m } = SphHarmIndex::new(idx.n, idx.m)?;
    let nm = (n as i64 - m as i64) as u32;
    let np = (n as i64 + m as i64) as u32;
    let gamma = ((2 * n + 1) as f64 * factorial(nm) / (4.0 * PI * factorial(np))).sqrt();
    let p = assoc_legendre(n, m, theta.cos())?;
    Ok(Complex64::from_polar(gamma * p, m as f64 * phi))
}
