//! Finite-difference oracles: fourth-order central stencils in r, spectral in θ.

use num_complex::Complex64;

use super::grid::{bin, dft_row, idft_row, GridField, PolarGrid};
use super::{C2, SOURCE_SIGN};
use crate::error::{Error, Result};
use crate::fundsol::LameParams;

/// Points lost at each end per stencil application.
pub const FD_HALF_WIDTH: usize = 2;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// f′ at indices 2..n−2 (the result is indexed from 0).
pub fn fd_d1(v: &[Complex64], h: f64) -> Vec<Complex64> {
    v.windows(5)
        .map(|w| (w[0] - w[1] * 8.0 + w[3] * 8.0 - w[4]) / (12.0 * h))
        .collect()
}

/// f″ at indices 2..n−2.
pub fn fd_d2(v: &[Complex64], h: f64) -> Vec<Complex64> {
    v.windows(5)
        .map(|w| (-w[0] + w[1] * 16.0 - w[2] * 30.0 + w[3] * 16.0 - w[4]) / (12.0 * h * h))
        .collect()
}

fn uniform_h(grid: &PolarGrid, min_points: usize) -> Result<f64> {
    let h = grid
        .spacing()
        .ok_or_else(|| Error::Grid("finite differences need equispaced radii".into()))?;
    if grid.radii.len() < min_points {
        return Err(Error::Grid(format!(
            "annulus has {} radii, the stencils need at least {min_points}",
            grid.radii.len()
        )));
    }
    Ok(h)
}

// Signed angular index of each FFT bin.
fn signed(b: usize, n: usize) -> i32 {
    if b < n / 2 {
        b as i32
    } else {
        b as i32 - n as i32
    }
}

struct Modal {
    h: f64,
    n_theta: usize,
    radii: Vec<f64>,
    // [bin][radius] for w = u₁ + iu₂ and z = u₁ − iu₂, and the components
    w: Vec<Vec<Complex64>>,
    z: Vec<Vec<Complex64>>,
    comp: [Vec<Vec<Complex64>>; 2],
}

impl Modal {
    fn new(u: &GridField, h: f64) -> Self {
        let n = u.grid.n_theta;
        let nr = u.grid.radii.len();
        let mut w = vec![vec![ZERO; nr]; n];
        let mut z = w.clone();
        let mut comp = [w.clone(), w.clone()];
        for (i, row) in u.values.iter().enumerate() {
            for (b, v) in dft_row(row).into_iter().enumerate() {
                w[b][i] = v[0] + I * v[1];
                z[b][i] = v[0] - I * v[1];
                comp[0][b][i] = v[0];
                comp[1][b][i] = v[1];
            }
        }
        Modal {
            h,
            n_theta: n,
            radii: u.grid.radii.clone(),
            w,
            z,
            comp,
        }
    }

    // div u per bin at radii 2..nr−2.
    fn divergence(&self) -> Vec<Vec<Complex64>> {
        let n = self.n_theta;
        let inner = &self.radii[2..self.radii.len() - 2];
        (0..n)
            .map(|b| {
                let m = signed(b, n);
                let (wb, zb) = (bin(m + 1, n), bin(m - 1, n));
                let dw = fd_d1(&self.w[wb], self.h);
                let dz = fd_d1(&self.z[zb], self.h);
                inner
                    .iter()
                    .enumerate()
                    .map(|(i, &r)| {
                        let wv = self.w[wb][i + 2];
                        let zv = self.z[zb][i + 2];
                        0.5 * (dw[i] + wv * ((m + 1) as f64 / r) + dz[i] - zv * ((m - 1) as f64 / r))
                    })
                    .collect()
            })
            .collect()
    }

    // ∇div u per bin at radii 4..nr−4, as (∂₁, ∂₂).
    fn grad_div(&self) -> [Vec<Vec<Complex64>>; 2] {
        let n = self.n_theta;
        let d = self.divergence();
        let inner = &self.radii[4..self.radii.len() - 4];
        let mut g1 = vec![Vec::new(); n];
        let mut g2 = vec![Vec::new(); n];
        for b in 0..n {
            let m = signed(b, n);
            let (lo, hi) = (bin(m - 1, n), bin(m + 1, n));
            let dlo = fd_d1(&d[lo], self.h);
            let dhi = fd_d1(&d[hi], self.h);
            for (i, &r) in inner.iter().enumerate() {
                let plus = dlo[i] - d[lo][i + 2] * ((m - 1) as f64 / r);
                let minus = dhi[i] + d[hi][i + 2] * ((m + 1) as f64 / r);
                g1[b].push(0.5 * (plus + minus));
                g2[b].push((plus - minus) / (2.0 * I));
            }
        }
        [g1, g2]
    }

    // Δu_c per bin at radii 4..nr−4.
    fn laplacian(&self, c: usize) -> Vec<Vec<Complex64>> {
        let n = self.n_theta;
        let nr = self.radii.len();
        (0..n)
            .map(|b| {
                let m = signed(b, n) as f64;
                let v = &self.comp[c][b];
                let d1 = fd_d1(v, self.h);
                let d2 = fd_d2(v, self.h);
                (4..nr - 4)
                    .map(|i| {
                        let r = self.radii[i];
                        d2[i - 2] + d1[i - 2] / r - v[i] * (m * m / (r * r))
                    })
                    .collect()
            })
            .collect()
    }
}

fn to_physical(parts: [&Vec<Vec<Complex64>>; 2], nr: usize, n: usize) -> Vec<Vec<C2>> {
    (0..nr)
        .map(|i| {
            let bins: Vec<C2> = (0..n).map(|b| [parts[0][b][i], parts[1][b][i]]).collect();
            idft_row(&bins)
        })
        .collect()
}

/// max over the interior of |Δ*u + ω²u − σf| relative to max|f|.
pub fn residual_check(u: &GridField, f: &GridField, p: &LameParams) -> Result<f64> {
    if u.grid != f.grid {
        return Err(Error::Grid("u and f sampled on different grids".into()));
    }
    let h = uniform_h(&u.grid, 4 * FD_HALF_WIDTH + 1)?;
    let modal = Modal::new(u, h);
    let gd = modal.grad_div();
    let lap = [modal.laplacian(0), modal.laplacian(1)];
    let n = u.grid.n_theta;
    let nr = u.grid.radii.len();
    let inner = nr - 8;
    let fm: Vec<Vec<C2>> = f.values.iter().map(|row| dft_row(row)).collect();
    let mut res = [vec![vec![ZERO; inner]; n], vec![vec![ZERO; inner]; n]];
    let w2 = p.omega * p.omega;
    for c in 0..2 {
        for b in 0..n {
            for i in 0..inner {
                res[c][b][i] = lap[c][b][i] * p.mu_shear
                    + gd[c][b][i] * (p.lam + p.mu_shear)
                    + modal.comp[c][b][i + 4] * w2
                    - fm[i + 4][b][c] * SOURCE_SIGN;
            }
        }
    }
    let phys = to_physical([&res[0], &res[1]], inner, n);
    let rmax = phys
        .iter()
        .flatten()
        .map(|v| v[0].norm().max(v[1].norm()))
        .fold(0.0, f64::max);
    let fmax = f.values[4..nr - 4]
        .iter()
        .flatten()
        .map(|v| v[0].norm().max(v[1].norm()))
        .fold(0.0, f64::max);
    let scale = if fmax > 0.0 {
        fmax
    } else {
        w2 * u.values[4..nr - 4]
            .iter()
            .flatten()
            .map(|v| v[0].norm().max(v[1].norm()))
            .fold(0.0, f64::max)
    };
    Ok(if scale > 0.0 { rmax / scale } else { rmax })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsFields {
    pub u_p: GridField,
    pub u_s: GridField,
}

/// u_p = −(1/k_p²)∇div u and u_s = u − u_p on the radii four steps in from each end.
pub fn ps_decompose(u: &GridField, p: &LameParams) -> Result<PsFields> {
    let h = uniform_h(&u.grid, 4 * FD_HALF_WIDTH + 1)?;
    let modal = Modal::new(u, h);
    let gd = modal.grad_div();
    let n = u.grid.n_theta;
    let nr = u.grid.radii.len();
    let grid = PolarGrid::new(u.grid.radii[4..nr - 4].to_vec(), n)?;
    let up = to_physical([&gd[0], &gd[1]], nr - 8, n);
    let s = -1.0 / (p.k_p * p.k_p);
    let up: Vec<Vec<C2>> = up
        .into_iter()
        .map(|row| row.into_iter().map(|v| [v[0] * s, v[1] * s]).collect())
        .collect();
    let us: Vec<Vec<C2>> = up
        .iter()
        .zip(&u.values[4..nr - 4])
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| [y[0] - x[0], y[1] - x[1]]).collect())
        .collect();
    Ok(PsFields {
        u_p: GridField {
            grid: grid.clone(),
            values: up,
        },
        u_s: GridField { grid, values: us },
    })
}

/// max over the interior of |Δu + k²u| relative to k²·max|u|, componentwise.
pub fn vector_helmholtz_residual(u: &GridField, k: f64) -> Result<f64> {
    let h = uniform_h(&u.grid, 4 * FD_HALF_WIDTH + 1)?;
    let modal = Modal::new(u, h);
    let n = u.grid.n_theta;
    let nr = u.grid.radii.len();
    let lap = [modal.laplacian(0), modal.laplacian(1)];
    let mut res = [vec![vec![ZERO; nr - 8]; n], vec![vec![ZERO; nr - 8]; n]];
    for c in 0..2 {
        for b in 0..n {
            for i in 0..nr - 8 {
                res[c][b][i] = lap[c][b][i] + modal.comp[c][b][i + 4] * (k * k);
            }
        }
    }
    let phys = to_physical([&res[0], &res[1]], nr - 8, n);
    let rmax = phys.iter().flatten().map(|v| v[0].norm().max(v[1].norm())).fold(0.0, f64::max);
    let umax = u.values[4..nr - 4]
        .iter()
        .flatten()
        .map(|v| v[0].norm().max(v[1].norm()))
        .fold(0.0, f64::max);
    Ok(if umax > 0.0 { rmax / (k * k * umax) } else { rmax })
}

/// div u on the radii two steps in from each end, as samples [radius][angle].
pub fn fd_divergence(u: &GridField) -> Result<Vec<Vec<Complex64>>> {
    let h = uniform_h(&u.grid, 2 * FD_HALF_WIDTH + 1)?;
    let modal = Modal::new(u, h);
    let d = modal.divergence();
    let n = u.grid.n_theta;
    let zeros = vec![vec![ZERO; d[0].len()]; n];
    Ok(to_physical([&d, &zeros], d[0].len(), n)
        .into_iter()
        .map(|row| row.into_iter().map(|v| v[0]).collect())
        .collect())
}

/// max over interior radii of |u″ + u′/r + (k² − n²/r²)u − σg| relative to max|g|.
pub fn helmholtz_fd_residual(u: &[Complex64], g: &[Complex64], radii: &[f64], n: i32, k: f64) -> Result<f64> {
    let grid = PolarGrid::new(radii.to_vec(), 4)?;
    let h = uniform_h(&grid, 2 * FD_HALF_WIDTH + 1)?;
    if u.len() != radii.len() || g.len() != radii.len() {
        return Err(Error::Grid("sample counts differ from the radii".into()));
    }
    let d1 = fd_d1(u, h);
    let d2 = fd_d2(u, h);
    let nn = (n * n) as f64;
    let mut rmax = 0.0f64;
    let mut gmax = 0.0f64;
    for i in 2..radii.len() - 2 {
        let r = radii[i];
        let lhs = d2[i - 2] + d1[i - 2] / r + u[i] * (k * k - nn / (r * r));
        rmax = rmax.max((lhs - g[i] * SOURCE_SIGN).norm());
        gmax = gmax.max(g[i].norm());
    }
    Ok(if gmax > 0.0 { rmax / gmax } else { rmax })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_are_fourth_order() {
        let err = |h: f64| {
            let xs: Vec<Complex64> = (0..5).map(|i| Complex64::new((1.0 + h * i as f64).sin(), 0.0)).collect();
            let x = 1.0 + 2.0 * h;
            (
                (fd_d1(&xs, h)[0].re - x.cos()).abs(),
                (fd_d2(&xs, h)[0].re + x.sin()).abs(),
            )
        };
        let (a1, a2) = err(0.04);
        let (b1, b2) = err(0.02);
        assert!(a1 / b1 > 12.0 && a2 / b2 > 12.0);
    }

    #[test]
    fn manufactured_field_residual_is_small() {
        // u smooth and compactly supported, f := Δ*u + ω²u computed analytically
        let p = crate::fundsol::make_params(1.0, 1.0, 1.0).unwrap();
        let grid = PolarGrid::uniform(0.5, 1.5, 2e-3, 16).unwrap();
        let u = GridField::from_fn(&grid, |x| {
            let e = (-(x[0] * x[0] + x[1] * x[1])).exp();
            [Complex64::new(e, 0.0), Complex64::new(x[0] * e, 0.0)]
        });
        let f = GridField::from_fn(&grid, |x| {
            let (a, b) = (x[0], x[1]);
            let e = (-(a * a + b * b)).exp();
            // Δ(e) = (4r² − 4)e, Δ(x e) = x(4r² − 8)e
            let r2 = a * a + b * b;
            let lap = [(4.0 * r2 - 4.0) * e, a * (4.0 * r2 - 8.0) * e];
            // div u = −2a e + (−2ab) e ; its gradient
            let gd = [
                e * (-2.0 + 4.0 * a * a - 2.0 * b + 4.0 * a * a * b),
                e * (4.0 * a * b - 2.0 * a + 4.0 * a * b * b),
            ];
            let u = [e, a * e];
            let v: [f64; 2] =
                [0, 1].map(|c| p.mu_shear * lap[c] + (p.lam + p.mu_shear) * gd[c] + p.omega.powi(2) * u[c]);
            [Complex64::new(v[0] / SOURCE_SIGN, 0.0), Complex64::new(v[1] / SOURCE_SIGN, 0.0)]
        });
        let r = residual_check(&u, &f, &p).unwrap();
        assert!(r <= 1e-6, "residual {r}");
    }
}
