//! Radial majorant Ṽ(r) = sup over |x| = r of V(x), sampled on quasi-uniform directions.

use std::f64::consts::PI;

use super::RadialWeight;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct MajorantReport {
    pub weight: RadialWeight,
    /// Largest angle from any unit vector to the nearest sampled direction.
    pub angular_gap: f64,
    /// Largest increase seen when the direction count is quadrupled.
    pub undershoot_estimate: f64,
}

fn directions(d: usize, n: usize) -> Vec<Vec<f64>> {
    match d {
        2 => (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci lattice on the sphere
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    vec![rho * t.cos(), rho * t.sin(), z]
                })
                .collect()
        }
    }
}

fn angular_gap(d: usize, dirs: &[Vec<f64>]) -> f64 {
    if d == 2 {
        return PI / dirs.len() as f64;
    }
    let probes = directions(3, 8 * dirs.len() + 1);
    probes
        .iter()
        .map(|p| {
            dirs.iter()
                .map(|q| {
                    let c: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
                    c.clamp(-1.0, 1.0).acos()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn sup_on_sphere(f: &dyn Fn(&[f64]) -> f64, dirs: &[Vec<f64>], r: f64) -> f64 {
    let mut x = vec![0.0; dirs[0].len()];
    dirs.iter()
        .map(|w| {
            for (xi, wi) in x.iter_mut().zip(w) {
                *xi = r * wi;
            }
            f(&x).max(0.0)
        })
        .fold(0.0, f64::max)
}

pub fn radial_majorant(
    weight_eval: &dyn Fn(&[f64]) -> f64,
    d: usize,
    r_grid: &[f64],
    n_dirs: usize,
) -> Result<MajorantReport> {
    if r_grid.is_empty() {
        return Err(Error::Grid("radial majorant needs a nonempty grid".into()));
    }
    if d != 2 && d != 3 {
        return Err(Error::InvalidParams(format!("dimension must be 2 or 3, got {d}")));
    }
    if n_dirs < 8 {
        return Err(Error::InvalidParams(format!("need at least 8 directions, got {n_dirs}")));
    }
    let dirs = directions(d, n_dirs);
    let fine = directions(d, 4 * n_dirs);
    let mut knots = Vec::with_capacity(r_grid.len());
    let mut under = 0.0f64;
    for &r in r_grid {
        let v = sup_on_sphere(weight_eval, &dirs, r);
        let vf = sup_on_sphere(weight_eval, &fine, r);
        under = under.max(vf - v);
        knots.push((r, v));
    }
    let weight = if knots.len() == 1 {
        RadialWeight::Tabulated { knots }
    } else {
        RadialWeight::tabulated(knots)?
    };
    Ok(MajorantReport {
        weight,
        angular_gap: angular_gap(d, &dirs),
        undershoot_estimate: under,
    })
}
