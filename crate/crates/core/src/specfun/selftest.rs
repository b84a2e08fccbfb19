//! Identity checks over fixed grids, shared by the CLI self-test and the acceptance suite.

use std::f64::consts::PI;

use serde::Serialize;

use super::{bessel_j, bessel_j_scaled, bessel_y, bessel_y_scaled, debye_frame, hankel1_scaled, Order};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfCheck {
    pub name: String,
    /// Largest violation found: relative error, or the count of failing points.
    pub worst: f64,
    pub tol: f64,
    pub points: usize,
    pub pass: bool,
}

fn check(name: &str, worst: f64, tol: f64, points: usize) -> SelfCheck {
    SelfCheck {
        name: name.to_string(),
        worst,
        tol,
        points,
        pass: worst <= tol,
    }
}

/// Orders 0, 1/2, 1, …, 30 1/2.
pub fn grid_orders() -> Vec<f64> {
    (0..=61).map(|k| 0.5 * k as f64).collect()
}

/// 60 points on [0.1, 50].
pub fn grid_args() -> Vec<f64> {
    (0..60).map(|i| 0.1 + (50.0 - 0.1) * i as f64 / 59.0).collect()
}

fn o(mu: f64) -> Result<Order> {
    Order::try_from_f64(mu)
}

fn jy(which: usize, mu: f64, x: f64) -> Result<f64> {
    if which == 0 {
        bessel_j(o(mu)?, x)
    } else {
        bessel_y(o(mu)?, x)
    }
}

/// J_{μ+1}Y_μ − J_μY_{μ+1} = 2/(πx), relative.
pub fn wronskian() -> Result<SelfCheck> {
    let mut worst = 0.0f64;
    let mut n = 0;
    for mu in grid_orders() {
        for x in grid_args() {
            let w = jy(0, mu + 1.0, x)? * jy(1, mu, x)? - jy(0, mu, x)? * jy(1, mu + 1.0, x)?;
            let want = 2.0 / (PI * x);
            worst = worst.max(((w - want) / want).abs());
            n += 1;
        }
    }
    Ok(check("wronskian", worst, 1e-9, n))
}

/// (2μ/x)C_μ − C_{μ−1} − C_{μ+1} = 0 for C = J, Y, relative to the largest term.
pub fn recurrence() -> Result<SelfCheck> {
    let mut worst = 0.0f64;
    let mut n = 0;
    for mu in grid_orders() {
        for x in grid_args() {
            for which in 0..2 {
                let (a, b, c) = (jy(which, mu - 1.0, x)?, jy(which, mu, x)?, jy(which, mu + 1.0, x)?);
                let scale = (2.0 * mu / x * b).abs().max(a.abs()).max(c.abs());
                worst = worst.max(((2.0 * mu / x) * b - a - c).abs() / scale);
                n += 1;
            }
        }
    }
    Ok(check("recurrence", worst, 1e-9, n))
}

/// C_{−n} = (−1)^n C_n for integer n; J_{−(n+1/2)} = (−1)^{n+1} Y_{n+1/2}.
pub fn reflection() -> Result<SelfCheck> {
    let mut worst = 0.0f64;
    let mut n = 0;
    for mu in grid_orders().into_iter().filter(|&m| m > 0.0) {
        for x in grid_args() {
            let pairs = if mu.fract() == 0.0 {
                let s = if (mu as i64) % 2 == 0 { 1.0 } else { -1.0 };
                vec![(jy(0, -mu, x)?, s * jy(0, mu, x)?), (jy(1, -mu, x)?, s * jy(1, mu, x)?)]
            } else {
                let k = (mu - 0.5) as i64;
                let s = if k % 2 == 0 { -1.0 } else { 1.0 };
                vec![(jy(0, -mu, x)?, s * jy(1, mu, x)?)]
            };
            for (got, want) in pairs {
                worst = worst.max((got - want).abs() / want.abs().max(f64::MIN_POSITIVE));
                n += 1;
            }
        }
    }
    Ok(check("reflection", worst, 1e-9, n))
}

/// The two derivative recurrences agree: (C_{μ−1} − C_{μ+1})/2 = C_{μ−1} − (μ/x)C_μ.
pub fn derivative_identity() -> Result<SelfCheck> {
    let mut worst = 0.0f64;
    let mut n = 0;
    for mu in grid_orders() {
        for x in grid_args() {
            for which in 0..2 {
                let (a, b, c) = (jy(which, mu - 1.0, x)?, jy(which, mu, x)?, jy(which, mu + 1.0, x)?);
                let half = 0.5 * (a - c);
                let lower = a - mu / x * b;
                let upper = mu / x * b - c;
                let scale = a.abs().max(c.abs()).max((mu / x * b).abs());
                worst = worst.max((half - lower).abs() / scale).max((half - upper).abs() / scale);
                n += 1;
            }
        }
    }
    Ok(check("derivative_identity", worst, 1e-9, n))
}

/// |J/lead_J − 1| ≤ bound_J and the same for Y at 100 points of (0, μ − μ^{1/3}]; reports
/// the number of points outside their envelope.
pub fn debye_certification() -> Result<SelfCheck> {
    let mut bad = 0usize;
    let mut n = 0;
    for mu in [10.0f64, 20.0, 50.0, 100.0] {
        let ord = o(mu)?;
        let rmax = mu - mu.cbrt();
        for i in 1..=100 {
            let r = rmax * i as f64 / 100.0;
            let f = debye_frame(ord, r)?;
            let js = bessel_j_scaled(ord, r)?;
            let ys = bessel_y_scaled(ord, r)?;
            let rj = js.mant.signum() * (js.ln_abs() - f.ln_lead_j).exp() - 1.0;
            let ry = -ys.mant.signum() * (ys.ln_abs() - f.ln_lead_y).exp() - 1.0;
            bad += usize::from(rj.abs() > f.bound_j) + usize::from(ry.abs() > f.bound_y);
            n += 2;
        }
    }
    Ok(check("debye_certification", bad as f64, 0.0, n))
}

/// t|H_μ(t)|² is nonincreasing on (0, 100]; reports the count of increases beyond rounding.
pub fn hankel_energy_monotone() -> Result<SelfCheck> {
    let mut bad = 0usize;
    let mut n = 0;
    for mu in [1.0, 2.5, 7.0, 20.5, 50.0] {
        let ord = o(mu)?;
        let mut prev = f64::INFINITY;
        for i in 1..=4000 {
            let t = 100.0 * i as f64 / 4000.0;
            let e = (t.ln() + 2.0 * hankel1_scaled(ord, t)?.ln_abs()).exp();
            bad += usize::from(e > prev * (1.0 + 1e-12));
            prev = e;
            n += 1;
        }
    }
    Ok(check("hankel_energy_monotone", bad as f64, 0.0, n))
}

/// Every check, in a fixed order.
pub fn run_all() -> Result<Vec<SelfCheck>> {
    Ok(vec![
        wronskian()?,
        recurrence()?,
        reflection()?,
        derivative_identity()?,
        debye_certification()?,
        hankel_energy_monotone()?,
    ])
}
