use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fundsol::LameParams;
use crate::solver::{helmholtz_mode_solve_d, solve, GridField, ModeSource, PolarGrid};
use crate::weights::RadialWeight;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
    pub params_hash: String,
    /// V vanishes somewhere f does not, so the right side is infinite.
    pub flagged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThmOptions {
    pub gl_order: usize,
    /// Largest radial panel; it also shrinks to π/(5k) for the faster wave.
    pub max_width: f64,
    pub min_theta: usize,
}

impl Default for ThmOptions {
    fn default() -> Self {
        ThmOptions {
            gl_order: 16,
            max_width: 0.25,
            min_theta: 16,
        }
    }
}

/// FNV-1a of the resolved inputs, as 16 hex digits.
pub fn params_hash(parts: &[&str]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for p in parts {
        for b in p.bytes().chain(std::iter::once(0x1f)) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

/// ∫|u|²V(|x|)dx over the grid's annulus: trapezoid in θ, the grid's Gauss weights in r
/// (composite trapezoid when the grid has none).
pub fn weighted_l2_field(field: &GridField, w: &RadialWeight) -> f64 {
    let g = &field.grid;
    let radial = match &g.radial_weights {
        Some(v) => v.clone(),
        None => trapezoid_weights(&g.radii),
    };
    let dth = TAU / g.n_theta as f64;
    g.radii
        .iter()
        .zip(&radial)
        .zip(&field.values)
        .map(|((&r, &wr), row)| {
            let ring: f64 = row.iter().map(|v| v[0].norm_sqr() + v[1].norm_sqr()).sum();
            wr * r * w.eval(r) * ring * dth
        })
        .sum()
}

fn trapezoid_weights(r: &[f64]) -> Vec<f64> {
    let n = r.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { r[i] - r[i - 1] } else { 0.0 };
            let right = if i + 1 < n { r[i + 1] - r[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

fn theta_count(src: &dyn ModeSource, opts: &ThmOptions) -> usize {
    let top = src.input_modes().iter().map(|m| m.unsigned_abs() as usize).max().unwrap_or(0) + 3;
    (4 * top + 4).next_power_of_two().max(opts.min_theta)
}

// ∫|f|²V^{−1}; infinite when V = 0 at a point where f ≠ 0.
fn forcing_norm(src: &dyn ModeSource, w: &RadialWeight, opts: &ThmOptions) -> Result<f64> {
    let (a, b) = src.support();
    let grid = PolarGrid::gauss_on(a, b, &w.knots(), (b - a) / 8.0, opts.gl_order, theta_count(src, opts))?;
    let dth = TAU / grid.n_theta as f64;
    let weights = grid.radial_weights.clone().expect("gauss grid has weights");
    let mut acc = 0.0;
    for (i, (&r, &wr)) in grid.radii.iter().zip(&weights).enumerate() {
        let v = w.eval(r);
        let ring: f64 = (0..grid.n_theta)
            .map(|j| {
                let f = src.value(grid.point(i, j));
                f[0].norm_sqr() + f[1].norm_sqr()
            })
            .sum();
        if ring == 0.0 {
            continue;
        }
        if v == 0.0 {
            return Ok(f64::INFINITY);
        }
        acc += wr * r * ring * dth / v;
    }
    Ok(acc)
}

fn field_grid(src: &dyn ModeSource, p: &LameParams, w: &RadialWeight, opts: &ThmOptions) -> Result<PolarGrid> {
    let range = w.effective_range();
    if !range.is_finite() {
        return Err(Error::InvalidParams(format!(
            "weight {w} has no finite effective range; the field integral needs one"
        )));
    }
    let (a, b) = src.support();
    let mut breaks = w.knots();
    breaks.extend([a, b]);
    let width = opts.max_width.min(PI / (5.0 * p.k_p.max(p.k_s)));
    PolarGrid::gauss(range, &breaks, width, opts.gl_order, theta_count(src, opts))
}

fn report(numerator: f64, mt: f64, fnorm: f64, scale: f64, hash: String) -> RatioReport {
    let denominator = scale * mt * mt * fnorm;
    let flagged = denominator.is_infinite();
    RatioReport {
        numerator,
        denominator,
        ratio: if flagged { 0.0 } else { numerator / denominator },
        params_hash: hash,
        flagged,
    }
}

fn hash_of(tag: &str, src: &dyn fmt::Display, p: &LameParams, w: &RadialWeight) -> String {
    params_hash(&[tag, &src.to_string(), &format!("{} {} {}", p.lam, p.mu_shear, p.omega), &w.to_string()])
}

/// ∫|u|²V against (1/ω²)|||V|||²∫|f|²V^{−1}.
pub fn thm1_ratio<S: ModeSource + fmt::Display>(src: &S, p: &LameParams, w: &RadialWeight) -> Result<RatioReport> {
    thm1_ratio_with(src, p, w, &ThmOptions::default())
}

pub fn thm1_ratio_with<S: ModeSource + fmt::Display>(
    src: &S,
    p: &LameParams,
    w: &RadialWeight,
    opts: &ThmOptions,
) -> Result<RatioReport> {
    let mt = w.mt_norm()?.mt_norm;
    let fnorm = forcing_norm(src, w, opts)?;
    let grid = field_grid(src, p, w, opts)?;
    let u = solve(src, p, &grid.radii)?.field(&grid)?;
    let num = weighted_l2_field(&u, w);
    Ok(report(num, mt, fnorm, 1.0 / (p.omega * p.omega), hash_of("thm1", src, p, w)))
}

/// max_j ∫|∇u_j|²V against |||V|||²∫|f|²V^{−1}.
pub fn thm2_ratio<S: ModeSource + fmt::Display>(src: &S, p: &LameParams, w: &RadialWeight) -> Result<RatioReport> {
    let opts = ThmOptions::default();
    let mt = w.mt_norm()?.mt_norm;
    let fnorm = forcing_norm(src, w, &opts)?;
    let grid = field_grid(src, p, w, &opts)?;
    let [d1, d2] = solve(src, p, &grid.radii)?.gradient_field(&grid)?;
    let num = (0..2)
        .map(|j| {
            let values = d1
                .values
                .iter()
                .zip(&d2.values)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| [x[j], y[j]]).collect())
                .collect();
            weighted_l2_field(
                &GridField {
                    grid: grid.clone(),
                    values,
                },
                w,
            )
        })
        .fold(0.0, f64::max);
    Ok(report(num, mt, fnorm, 1.0, hash_of("thm2", src, p, w)))
}

/// thm2_ratio for λ = −μ through the scalar resolvent: each component of u is the
/// outgoing Helmholtz solution at k = ω/√μ divided by μ, and ∫|∇u_j|²V is summed
/// mode by mode as 2π Σ_n ∫(|u_n'|² + n²|u_n|²/r²)V r dr.
pub fn thm2_ratio_helmholtz<S: ModeSource + fmt::Display>(
    src: &S,
    p: &LameParams,
    w: &RadialWeight,
) -> Result<RatioReport> {
    if (p.lam + p.mu_shear).abs() > 1e-12 * p.mu_shear {
        return Err(Error::InvalidParams(format!(
            "the scalar pathway needs lam = -mu, got lam = {}, mu = {}",
            p.lam, p.mu_shear
        )));
    }
    let opts = ThmOptions::default();
    let mt = w.mt_norm()?.mt_norm;
    let fnorm = forcing_norm(src, w, &opts)?;
    let grid = field_grid(src, p, w, &opts)?;
    let weights = grid.radial_weights.clone().expect("gauss grid has weights");
    let k = p.k_s;
    let mut per_component = [0.0f64; 2];
    for (j, slot) in per_component.iter_mut().enumerate() {
        for n in src.input_modes() {
            let g = |t: f64| -> Complex64 { src.mode(n, t)[j] };
            let vals = helmholtz_mode_solve_d(n, &g, src.support(), k, &grid.radii)?;
            let n2 = (n * n) as f64;
            for ((&r, &wr), (u, du)) in grid.radii.iter().zip(&weights).zip(vals) {
                let (u, du) = (u / p.mu_shear, du / p.mu_shear);
                *slot += TAU * wr * r * w.eval(r) * (du.norm_sqr() + n2 * u.norm_sqr() / (r * r));
            }
        }
    }
    let num = per_component[0].max(per_component[1]);
    Ok(report(num, mt, fnorm, 1.0, hash_of("thm2-scalar", src, p, w)))
}
