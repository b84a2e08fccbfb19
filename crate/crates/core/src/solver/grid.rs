use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{C2, C2_ZERO};
use crate::error::{Error, Result};
use crate::quad::gl_rule;

const ALIASING_LIMIT: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct PolarGrid {
    pub radii: Vec<f64>,
    pub n_theta: usize,
    /// Radial quadrature weights (dr only), present for grids built by [`PolarGrid::gauss`].
    pub radial_weights: Option<Vec<f64>>,
}

impl PolarGrid {
    pub fn new(radii: Vec<f64>, n_theta: usize) -> Result<Self> {
        if radii.is_empty() || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Grid("radii must be positive and strictly increasing".into()));
        }
        if !n_theta.is_power_of_two() || n_theta < 4 {
            return Err(Error::Grid(format!("n_theta must be a power of two >= 4, got {n_theta}")));
        }
        Ok(PolarGrid {
            radii,
            n_theta,
            radial_weights: None,
        })
    }

    /// Radii r_min, r_min + h, … up to r_max.
    pub fn uniform(r_min: f64, r_max: f64, h: f64, n_theta: usize) -> Result<Self> {
        if !(h > 0.0) || !(r_max > r_min) {
            return Err(Error::Grid(format!("bad uniform grid [{r_min}, {r_max}] step {h}")));
        }
        let n = ((r_max - r_min) / h + 1e-9).floor() as usize;
        Self::new((0..=n).map(|i| r_min + h * i as f64).collect(), n_theta)
    }

    /// Gauss–Legendre panels on [0, r_max] split at `breaks`, each at most `width` wide.
    pub fn gauss(r_max: f64, breaks: &[f64], width: f64, order: usize, n_theta: usize) -> Result<Self> {
        Self::gauss_on(0.0, r_max, breaks, width, order, n_theta)
    }

    /// As `gauss`, on the annulus r_min < r < r_max.
    pub fn gauss_on(
        r_min: f64,
        r_max: f64,
        breaks: &[f64],
        width: f64,
        order: usize,
        n_theta: usize,
    ) -> Result<Self> {
        if !(r_min >= 0.0 && r_max > r_min && width > 0.0) {
            return Err(Error::Grid(format!("bad radial range [{r_min}, {r_max}] or width {width}")));
        }
        let mut edges: Vec<f64> = vec![r_min, r_max];
        edges.extend(breaks.iter().copied().filter(|&b| b > r_min && b < r_max));
        edges.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        edges.dedup();
        let rule = gl_rule(order);
        let (mut radii, mut weights) = (Vec::new(), Vec::new());
        for w in edges.windows(2) {
            let pieces = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / pieces as f64;
            for p in 0..pieces {
                let c = w[0] + h * (p as f64 + 0.5);
                for &(x, wt) in rule.iter() {
                    radii.push(c + 0.5 * h * x);
                    weights.push(0.5 * h * wt);
                }
            }
        }
        let mut g = Self::new(radii, n_theta)?;
        g.radial_weights = Some(weights);
        Ok(g)
    }

    pub fn theta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_theta as f64
    }

    /// Uniform spacing if the radii are equispaced.
    pub fn spacing(&self) -> Option<f64> {
        if self.radii.len() < 2 {
            return None;
        }
        let h = (self.radii[self.radii.len() - 1] - self.radii[0]) / (self.radii.len() - 1) as f64;
        let ok = self
            .radii
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
        ok.then_some(h)
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        let (r, th) = (self.radii[i], self.theta(j));
        [r * th.cos(), r * th.sin()]
    }
}

/// Samples of a complex 2-vector field, `values[i][j]` at radius i and angle j.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub grid: PolarGrid,
    pub values: Vec<Vec<C2>>,
}

impl GridField {
    pub fn from_fn(grid: &PolarGrid, f: impl Fn([f64; 2]) -> C2) -> Self {
        let values = (0..grid.radii.len())
            .map(|i| (0..grid.n_theta).map(|j| f(grid.point(i, j))).collect())
            .collect();
        GridField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .map(|v| v[0].norm().max(v[1].norm()))
            .fold(0.0, f64::max)
    }

    pub fn max_diff(&self, o: &GridField) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(o.values.iter().flatten())
            .map(|(a, b)| (a[0] - b[0]).norm().max((a[1] - b[1]).norm()))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AngularSpectrum {
    pub radii: Vec<f64>,
    pub n_keep: i32,
    pub modes: BTreeMap<i32, Vec<C2>>,
    pub support_radius: f64,
    /// Energy in the discarded bins over the total energy.
    pub discarded_fraction: f64,
}

// All n bins of (1/n)Σ_j v_j e^{−2πi jk/n}, per component.
pub(crate) fn dft_row(row: &[C2]) -> Vec<C2> {
    let n = row.len();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut out = vec![C2_ZERO; n];
    for c in 0..2 {
        let mut buf: Vec<Complex64> = row.iter().map(|v| v[c]).collect();
        fft.process(&mut buf);
        for (o, b) in out.iter_mut().zip(buf) {
            o[c] = b / n as f64;
        }
    }
    out
}

// Inverse of dft_row.
pub(crate) fn idft_row(bins: &[C2]) -> Vec<C2> {
    let n = bins.len();
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(n);
    let mut out = vec![C2_ZERO; n];
    for c in 0..2 {
        let mut buf: Vec<Complex64> = bins.iter().map(|v| v[c]).collect();
        fft.process(&mut buf);
        for (o, b) in out.iter_mut().zip(buf) {
            o[c] = b;
        }
    }
    out
}

pub(crate) fn bin(m: i32, n: usize) -> usize {
    m.rem_euclid(n as i32) as usize
}

pub fn angular_decompose(field: &GridField, n_keep: i32) -> Result<AngularSpectrum> {
    let n = field.grid.n_theta;
    if n_keep < 0 || 4 * n_keep as usize > n {
        return Err(Error::Grid(format!("n_keep = {n_keep} exceeds n_theta/4 = {}", n / 4)));
    }
    let mut modes: BTreeMap<i32, Vec<C2>> =
        (-n_keep..=n_keep).map(|m| (m, Vec::with_capacity(field.values.len()))).collect();
    let (mut total, mut kept) = (0.0, 0.0);
    let mut support_radius = 0.0f64;
    for (i, row) in field.values.iter().enumerate() {
        if row.iter().any(|v| v[0] != Complex64::new(0.0, 0.0) || v[1] != Complex64::new(0.0, 0.0)) {
            support_radius = support_radius.max(field.grid.radii[i]);
        }
        let bins = dft_row(row);
        total += bins.iter().map(|v| v[0].norm_sqr() + v[1].norm_sqr()).sum::<f64>();
        for m in -n_keep..=n_keep {
            let v = bins[bin(m, n)];
            kept += v[0].norm_sqr() + v[1].norm_sqr();
            modes.get_mut(&m).expect("mode present").push(v);
        }
    }
    let discarded_fraction = if total > 0.0 { ((total - kept) / total).max(0.0) } else { 0.0 };
    if discarded_fraction > ALIASING_LIMIT {
        return Err(Error::Aliasing(discarded_fraction));
    }
    Ok(AngularSpectrum {
        radii: field.grid.radii.clone(),
        n_keep,
        modes,
        support_radius,
        discarded_fraction,
    })
}

/// u(r_i, θ_j) = Σ_m u_m(r_i) e^{imθ_j}.
pub fn synthesize(modes: &BTreeMap<i32, Vec<C2>>, grid: &PolarGrid) -> Result<GridField> {
    let top = modes.keys().map(|m| m.unsigned_abs() as usize).max().unwrap_or(0);
    if grid.n_theta < 4 * top + 4 {
        return Err(Error::Grid(format!(
            "n_theta = {} too small for mode {top}",
            grid.n_theta
        )));
    }
    if let Some((m, v)) = modes.iter().find(|(_, v)| v.len() != grid.radii.len()) {
        return Err(Error::Grid(format!(
            "mode {m} has {} radial samples, grid has {}",
            v.len(),
            grid.radii.len()
        )));
    }
    let n = grid.n_theta;
    let values = (0..grid.radii.len())
        .map(|i| {
            let mut bins = vec![C2_ZERO; n];
            for (&m, v) in modes {
                let b = &mut bins[bin(m, n)];
                b[0] += v[i][0];
                b[1] += v[i][1];
            }
            idft_row(&bins)
        })
        .collect();
    Ok(GridField {
        grid: grid.clone(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_mode_is_isolated() {
        let g = PolarGrid::uniform(0.5, 1.5, 0.1, 32).unwrap();
        let f = GridField::from_fn(&g, |x| {
            let (r, th) = (x[0].hypot(x[1]), x[1].atan2(x[0]));
            [Complex64::from_polar((-r * r).exp(), 3.0 * th), c(0.0)]
        });
        let s = angular_decompose(&f, 8).unwrap();
        for (&m, v) in &s.modes {
            for (i, a) in v.iter().enumerate() {
                if m == 3 {
                    assert!((a[0] - c((-g.radii[i].powi(2)).exp())).norm() < 1e-14);
                } else {
                    assert!(a[0].norm() <= 1e-14 && a[1].norm() <= 1e-14, "m={m}");
                }
            }
        }
    }

    #[test]
    fn real_field_is_conjugate_symmetric_and_parseval_holds() {
        let g = PolarGrid::uniform(0.5, 1.5, 0.25, 64).unwrap();
        let f = GridField::from_fn(&g, |x| [c(x[0] * x[1] + x[0].powi(3)), c((x[1] - 0.2 * x[0]).sin())]);
        let s = angular_decompose(&f, 16).unwrap();
        for m in 1..=16 {
            for (a, b) in s.modes[&m].iter().zip(&s.modes[&-m]) {
                assert!((a[0] - b[0].conj()).norm() < 1e-14 && (a[1] - b[1].conj()).norm() < 1e-14);
            }
        }
        for (i, row) in f.values.iter().enumerate() {
            let direct: f64 = row.iter().map(|v| v[0].norm_sqr() + v[1].norm_sqr()).sum::<f64>() / 64.0;
            let bins = dft_row(row);
            let spec: f64 = bins.iter().map(|v| v[0].norm_sqr() + v[1].norm_sqr()).sum();
            assert!((spec - direct).abs() <= 1e-12 * direct, "i={i}");
        }
    }

    #[test]
    fn aliasing_and_bounds_rejected() {
        let g = PolarGrid::uniform(1.0, 2.0, 0.5, 16).unwrap();
        let f = GridField::from_fn(&g, |x| {
            let th = x[1].atan2(x[0]);
            [Complex64::from_polar(1.0, 7.0 * th), c(0.0)]
        });
        assert!(matches!(angular_decompose(&f, 4), Err(Error::Aliasing(_))));
        assert!(matches!(angular_decompose(&f, 5), Err(Error::Grid(_))));
    }

    #[test]
    fn synthesis_inverts_decomposition() {
        let g = PolarGrid::uniform(0.5, 1.0, 0.25, 32).unwrap();
        let f = GridField::from_fn(&g, |x| [c(x[0] * x[0]), Complex64::new(x[1], x[0])]);
        let s = angular_decompose(&f, 7).unwrap();
        let back = synthesize(&s.modes, &g).unwrap();
        assert!(back.max_diff(&f) < 1e-14);
    }

    #[test]
    fn gauss_grid_integrates_polynomials() {
        let g = PolarGrid::gauss(2.0, &[0.7], 0.3, 8, 8).unwrap();
        let w = g.radial_weights.as_ref().unwrap();
        let s: f64 = g.radii.iter().zip(w).map(|(r, w)| r.powi(5) * w).sum();
        assert!((s - 64.0 / 6.0).abs() < 1e-13);
    }
}
