use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{synthesize, GridField, PolarGrid};
use super::{c2_add, c2_norm, c2_scale, mat_apply, ModeSource, C2, C2_ZERO};
use crate::error::{Error, Result};
use crate::fundsol::{LameParams, Mat2C, PhaseConvention};
use crate::quad::gl_rule;
use crate::specfun::{bessel_j, hankel1, Order};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// ∂_i u_c stored as `jac[i][c]`.
pub type Jacobian = [[Complex64; 2]; 2];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Upper bound on the Gauss panel width before refinement.
    pub max_panel: f64,
    pub gl_order: usize,
    pub rel_tol: f64,
    pub max_levels: u32,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_panel: 0.25,
            gl_order: 16,
            rel_tol: 1e-13,
            max_levels: 12,
        }
    }
}

// Coefficients of H_n(kr) and J_n(kr) at one radius, index 0 for k_p and 1 for k_s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Atoms {
    pub h: [C2; 2],
    pub j: [C2; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeSolution {
    pub n: i32,
    pub radii: Vec<f64>,
    /// Contributions of |y| < |x| from the H⁺_{n,n}, H⁻_{n,n+2}A, H⁻_{n,n−2}B kernels.
    pub u_less: [Vec<C2>; 3],
    /// Contributions of |y| > |x|, same order.
    pub u_greater: [Vec<C2>; 3],
    pub total: Vec<C2>,
    pub(crate) atoms: Vec<Atoms>,
    pub(crate) ks: [f64; 2],
}

type Row<const K: usize> = [Complex64; K];

fn gl_interval<const K: usize>(
    f: &dyn Fn(f64) -> Result<Row<K>>,
    lo: f64,
    hi: f64,
    order: usize,
) -> Result<Row<K>> {
    let mut acc = [ZERO; K];
    if hi <= lo {
        return Ok(acc);
    }
    let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    for &(x, w) in gl_rule(order).iter() {
        let v = f(c + h * x)?;
        for (a, b) in acc.iter_mut().zip(v) {
            *a += b * (h * w);
        }
    }
    Ok(acc)
}

fn row_diff<const K: usize>(a: &Row<K>, b: &Row<K>) -> (f64, f64) {
    let d = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let m = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    (d, m)
}

// For each r: (∫_a^{min(r,b)} less, ∫_{max(r,a)}^b greater) on Gauss panels refined
// until the full-range integrals settle. `floor` is an absolute tolerance, so channels that
// carry only rounding noise from the source do not stall the refinement.
fn radial_split<const K: usize>(
    support: (f64, f64),
    kmax: f64,
    floor: f64,
    opts: &SolverOptions,
    less: &dyn Fn(f64) -> Result<Row<K>>,
    greater: &dyn Fn(f64) -> Result<Row<K>>,
    r_eval: &[f64],
) -> Result<Vec<(Row<K>, Row<K>)>> {
    let (a, b) = support;
    let width = opts.max_panel.min(PI / (5.0 * kmax));
    let mut panels = ((b - a) / width).ceil().max(1.0) as usize;
    let sums = |p: usize| -> Result<(Vec<f64>, Vec<Row<K>>, Vec<Row<K>>)> {
        let h = (b - a) / p as f64;
        let edges: Vec<f64> = (0..=p).map(|i| a + h * i as f64).collect();
        let mut l = Vec::with_capacity(p);
        let mut g = Vec::with_capacity(p);
        for e in edges.windows(2) {
            l.push(gl_interval(less, e[0], e[1], opts.gl_order)?);
            g.push(gl_interval(greater, e[0], e[1], opts.gl_order)?);
        }
        Ok((edges, l, g))
    };
    let total = |v: &[Row<K>]| {
        v.iter().fold([ZERO; K], |mut acc, r| {
            for (x, y) in acc.iter_mut().zip(r) {
                *x += y;
            }
            acc
        })
    };
    let mut coarse = sums(panels)?;
    let mut level = 0;
    let fine = loop {
        let fine = sums(2 * panels)?;
        let (dl, ml) = row_diff(&total(&coarse.1), &total(&fine.1));
        let (dg, mg) = row_diff(&total(&coarse.2), &total(&fine.2));
        if dl <= opts.rel_tol * ml + floor && dg <= opts.rel_tol * mg + floor {
            break fine;
        }
        level += 1;
        if level >= opts.max_levels {
            return Err(Error::NonConvergence(format!(
                "radial quadrature on [{a}, {b}] after {level} refinements (change {:e})",
                (dl / ml.max(1e-300)).max(dg / mg.max(1e-300))
            )));
        }
        panels *= 2;
        coarse = fine;
    };
    let (edges, l, g) = fine;
    let np = l.len();
    // prefix of less, suffix of greater
    let mut pre = vec![[ZERO; K]; np + 1];
    for i in 0..np {
        for c in 0..K {
            pre[i + 1][c] = pre[i][c] + l[i][c];
        }
    }
    let mut suf = vec![[ZERO; K]; np + 1];
    for i in (0..np).rev() {
        for c in 0..K {
            suf[i][c] = suf[i + 1][c] + g[i][c];
        }
    }
    r_eval
        .iter()
        .map(|&r| {
            if r <= a {
                return Ok(([ZERO; K], suf[0]));
            }
            if r >= b {
                return Ok((pre[np], [ZERO; K]));
            }
            let p = (edges.partition_point(|&e| e <= r) - 1).min(np - 1);
            let lp = gl_interval(less, edges[p], r, opts.gl_order)?;
            let gp = gl_interval(greater, r, edges[p + 1], opts.gl_order)?;
            let mut lv = pre[p];
            let mut gv = suf[p + 1];
            for c in 0..K {
                lv[c] += lp[c];
                gv[c] += gp[c];
            }
            Ok((lv, gv))
        })
        .collect()
}

// Rough size of ∫|f(t)| t dt over the support, from a midpoint sample.
fn source_scale(support: (f64, f64), f: impl Fn(f64) -> f64) -> f64 {
    const N: usize = 64;
    let (a, b) = support;
    let h = (b - a) / N as f64;
    let s: f64 = (0..N)
        .map(|i| {
            let t = a + h * (i as f64 + 0.5);
            f(t) * t
        })
        .sum();
    (s * h).max(1e-300)
}

fn check_radii(r_eval: &[f64]) -> Result<()> {
    if r_eval.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(Error::Grid("evaluation radii must be positive".into()));
    }
    Ok(())
}

pub fn mode_solve(n: i32, src: &dyn ModeSource, p: &LameParams, r_eval: &[f64]) -> Result<ModeSolution> {
    mode_solve_with(n, src, p, r_eval, &SolverOptions::default())
}

/// Mode n of u = ∫Φ(·,y)f(y)dy: the six radial integrals with kernels H⁺_{n,n}, H⁻_{n,n+2}, H⁻_{n,n−2}.
pub fn mode_solve_with(
    n: i32,
    src: &dyn ModeSource,
    p: &LameParams,
    r_eval: &[f64],
    opts: &SolverOptions,
) -> Result<ModeSolution> {
    check_radii(r_eval)?;
    let ks = [p.k_p, p.k_s];
    let present: BTreeSet<i32> = src.input_modes().into_iter().collect();
    // input mode feeding each piece
    let inputs = [n, n + 2, n - 2].map(|m| present.contains(&m).then_some(m));
    let channel = |t: f64, hankel: bool| -> Result<Row<12>> {
        let mut out = [ZERO; 12];
        for (j, m) in inputs.iter().enumerate() {
            let Some(m) = *m else { continue };
            let f = src.mode(m, t);
            if f == C2_ZERO {
                continue;
            }
            for (ki, &k) in ks.iter().enumerate() {
                let g = if hankel {
                    hankel1(Order::int(m), k * t)?
                } else {
                    Complex64::new(bessel_j(Order::int(m), k * t)?, 0.0)
                } * t;
                out[ki * 6 + j * 2] = g * f[0];
                out[ki * 6 + j * 2 + 1] = g * f[1];
            }
        }
        Ok(out)
    };
    let less = |t: f64| channel(t, false);
    let greater = |t: f64| channel(t, true);
    let floor = opts.rel_tol * source_scale(src.support(), |t| {
        src.input_modes()
            .into_iter()
            .map(|m| c2_norm(src.mode(m, t)))
            .fold(0.0, f64::max)
    });
    let split = radial_split(src.support(), p.k_p.max(p.k_s), floor, opts, &less, &greater, r_eval)?;

    let w2 = p.omega * p.omega;
    let c1 = I * (TAU / (8.0 * w2));
    let cc = Complex64::new(TAU / (16.0 * w2), 0.0);
    let (a_mat, b_mat) = PhaseConvention::Standard.matrices();
    let mats = [Mat2C::IDENTITY * c1, a_mat * cc, b_mat * cc];
    let sign = |ki: usize, j: usize| if j > 0 && ki == 1 { -1.0 } else { 1.0 };

    let nr = r_eval.len();
    let mut u_less = [vec![C2_ZERO; nr], vec![C2_ZERO; nr], vec![C2_ZERO; nr]];
    let mut u_greater = u_less.clone();
    let mut total = vec![C2_ZERO; nr];
    let mut atoms = Vec::with_capacity(nr);
    for (i, (&r, (lv, gv))) in r_eval.iter().zip(&split).enumerate() {
        let mut at = Atoms {
            h: [C2_ZERO; 2],
            j: [C2_ZERO; 2],
        };
        for (ki, &k) in ks.iter().enumerate() {
            let lead = [lv, gv].map(|row| {
                let mut pieces = [C2_ZERO; 3];
                for (j, piece) in pieces.iter_mut().enumerate() {
                    let v = [row[ki * 6 + j * 2], row[ki * 6 + j * 2 + 1]];
                    *piece = c2_scale(mat_apply(&mats[j], v), Complex64::new(sign(ki, j) * k * k, 0.0));
                }
                pieces
            });
            let has_less = lead[0].iter().any(|v| *v != C2_ZERO);
            let has_greater = lead[1].iter().any(|v| *v != C2_ZERO);
            let hn = if has_less { hankel1(Order::int(n), k * r)? } else { ZERO };
            let jn = if has_greater {
                Complex64::new(bessel_j(Order::int(n), k * r)?, 0.0)
            } else {
                ZERO
            };
            for j in 0..3 {
                u_less[j][i] = c2_add(u_less[j][i], c2_scale(lead[0][j], hn));
                u_greater[j][i] = c2_add(u_greater[j][i], c2_scale(lead[1][j], jn));
                at.h[ki] = c2_add(at.h[ki], lead[0][j]);
                at.j[ki] = c2_add(at.j[ki], lead[1][j]);
            }
        }
        for j in 0..3 {
            total[i] = c2_add(total[i], c2_add(u_less[j][i], u_greater[j][i]));
        }
        atoms.push(at);
    }
    Ok(ModeSolution {
        n,
        radii: r_eval.to_vec(),
        u_less,
        u_greater,
        total,
        atoms,
        ks,
    })
}

/// Mode n of the outgoing solution of Δu + k²u = σg:
/// 2π(i/4)[H_n(kr)∫₀^r J_n(kt)g_n(t)t dt + J_n(kr)∫_r^∞ H_n(kt)g_n(t)t dt].
pub fn helmholtz_mode_solve(
    n: i32,
    g: &(dyn Fn(f64) -> Complex64 + Sync),
    support: (f64, f64),
    k: f64,
    r_eval: &[f64],
) -> Result<Vec<Complex64>> {
    Ok(helmholtz_mode_solve_d(n, g, support, k, r_eval)?
        .into_iter()
        .map(|v| v.0)
        .collect())
}

/// As `helmholtz_mode_solve`, paired with the radial derivative (the moving
/// limits contribute nothing since the Wronskian terms cancel).
pub fn helmholtz_mode_solve_d(
    n: i32,
    g: &(dyn Fn(f64) -> Complex64 + Sync),
    support: (f64, f64),
    k: f64,
    r_eval: &[f64],
) -> Result<Vec<(Complex64, Complex64)>> {
    check_radii(r_eval)?;
    if !(k > 0.0) {
        return Err(Error::InvalidParams(format!("wave number must be positive, got {k}")));
    }
    let o = Order::int(n);
    let less = |t: f64| -> Result<Row<1>> { Ok([g(t) * (bessel_j(o, k * t)? * t)]) };
    let greater = |t: f64| -> Result<Row<1>> { Ok([g(t) * hankel1(o, k * t)? * t]) };
    let opts = SolverOptions::default();
    let floor = opts.rel_tol * source_scale(support, |t| g(t).norm());
    let split = radial_split(support, k, floor, &opts, &less, &greater, r_eval)?;
    let c = I * (TAU / 4.0);
    let (lo, hi) = (Order::int(n - 1), Order::int(n + 1));
    r_eval
        .iter()
        .zip(split)
        .map(|(&r, (l, gr))| {
            let (mut v, mut d) = (ZERO, ZERO);
            let z = k * r;
            if l[0] != ZERO {
                v += hankel1(o, z)? * l[0];
                d += (hankel1(lo, z)? - hankel1(hi, z)?) * (0.5 * k) * l[0];
            }
            if gr[0] != ZERO {
                v += bessel_j(o, z)? * gr[0];
                d += (bessel_j(lo, z)? - bessel_j(hi, z)?) * (0.5 * k) * gr[0];
            }
            Ok((v * c, d * c))
        })
        .collect()
}

// k/2 · G_n(kr) for both kinds at both wave numbers.
fn half_k_bessels(n: i32, ks: [f64; 2], r: f64, need_h: [bool; 2]) -> Result<[[Complex64; 2]; 2]> {
    let mut out = [[ZERO; 2]; 2];
    for ki in 0..2 {
        let z = ks[ki] * r;
        if need_h[ki] {
            out[ki][0] = hankel1(Order::int(n), z)? * (0.5 * ks[ki]);
        }
        out[ki][1] = Complex64::new(bessel_j(Order::int(n), z)? * 0.5 * ks[ki], 0.0);
    }
    Ok(out)
}

fn gradient_from_atoms(
    n: i32,
    ks: [f64; 2],
    radii: &[f64],
    lower: Option<&[Atoms]>,
    upper: Option<&[Atoms]>,
) -> Result<Vec<Jacobian>> {
    let zero = Atoms {
        h: [C2_ZERO; 2],
        j: [C2_ZERO; 2],
    };
    radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let lo = lower.map_or(zero, |a| a[i]);
            let up = upper.map_or(zero, |a| a[i]);
            let need_h = [0, 1].map(|ki| lo.h[ki] != C2_ZERO || up.h[ki] != C2_ZERO);
            let g = half_k_bessels(n, ks, r, need_h)?;
            let mut jac = [[ZERO; 2]; 2];
            for ki in 0..2 {
                for (kind, (cl, cu)) in [(lo.h[ki], up.h[ki]), (lo.j[ki], up.j[ki])].into_iter().enumerate() {
                    let gv = g[ki][kind];
                    if gv == ZERO {
                        continue;
                    }
                    for c in 0..2 {
                        jac[0][c] += gv * (cu[c] - cl[c]);
                        jac[1][c] += gv * I * (cu[c] + cl[c]);
                    }
                }
            }
            Ok(jac)
        })
        .collect()
}

/// Mode n of ∇u from modes n − 1 and n + 1 via 2G′ = G_{n−1} − G_{n+1}, (2n/z)G = G_{n−1} + G_{n+1}.
pub fn gradient_modes(lower: &ModeSolution, upper: &ModeSolution, n: i32) -> Result<Vec<Jacobian>> {
    if lower.n != n - 1 || upper.n != n + 1 {
        return Err(Error::Index(format!(
            "gradient mode {n} needs modes {} and {}, got {} and {}",
            n - 1,
            n + 1,
            lower.n,
            upper.n
        )));
    }
    if lower.radii != upper.radii || lower.ks != upper.ks {
        return Err(Error::Grid("adjacent modes computed on different radii or media".into()));
    }
    gradient_from_atoms(n, lower.ks, &lower.radii, Some(&lower.atoms), Some(&upper.atoms))
}

/// All nonzero modes of u for one forcing.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub params: LameParams,
    pub radii: Vec<f64>,
    pub support: (f64, f64),
    pub modes: BTreeMap<i32, ModeSolution>,
}

pub fn solve(src: &dyn ModeSource, p: &LameParams, r_eval: &[f64]) -> Result<Solution> {
    solve_with(src, p, r_eval, &SolverOptions::default())
}

pub fn solve_with(
    src: &dyn ModeSource,
    p: &LameParams,
    r_eval: &[f64],
    opts: &SolverOptions,
) -> Result<Solution> {
    let outputs: BTreeSet<i32> = src
        .input_modes()
        .into_iter()
        .flat_map(|m| [m - 2, m, m + 2])
        .collect();
    let outputs: Vec<i32> = outputs.into_iter().collect();
    let sols = outputs
        .par_iter()
        .map(|&n| mode_solve_with(n, src, p, r_eval, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(Solution {
        params: *p,
        radii: r_eval.to_vec(),
        support: src.support(),
        modes: outputs.into_iter().zip(sols).collect(),
    })
}

impl Solution {
    pub fn mode_values(&self) -> BTreeMap<i32, Vec<C2>> {
        self.modes.iter().map(|(&m, s)| (m, s.total.clone())).collect()
    }

    pub fn field(&self, grid: &PolarGrid) -> Result<GridField> {
        if grid.radii != self.radii {
            return Err(Error::Grid("grid radii differ from the solved radii".into()));
        }
        synthesize(&self.mode_values(), grid)
    }

    pub fn value_at(&self, i: usize, theta: f64) -> C2 {
        self.modes.iter().fold(C2_ZERO, |acc, (&m, s)| {
            c2_add(acc, c2_scale(s.total[i], Complex64::from_polar(1.0, m as f64 * theta)))
        })
    }

    /// Mode n of ∇u; the solution holds every nonzero mode, so absent neighbours are zero.
    pub fn gradient_mode(&self, n: i32) -> Result<Vec<Jacobian>> {
        let ks = [self.params.k_p, self.params.k_s];
        gradient_from_atoms(
            n,
            ks,
            &self.radii,
            self.modes.get(&(n - 1)).map(|s| s.atoms.as_slice()),
            self.modes.get(&(n + 1)).map(|s| s.atoms.as_slice()),
        )
    }

    pub fn gradient_modes(&self) -> Result<BTreeMap<i32, Vec<Jacobian>>> {
        let orders: BTreeSet<i32> = self.modes.keys().flat_map(|&m| [m - 1, m + 1]).collect();
        orders.into_iter().map(|n| Ok((n, self.gradient_mode(n)?))).collect()
    }

    pub fn jacobian_at(&self, i: usize, theta: f64) -> Result<Jacobian> {
        let mut jac = [[ZERO; 2]; 2];
        for (n, g) in self.gradient_modes()? {
            let e = Complex64::from_polar(1.0, n as f64 * theta);
            for a in 0..2 {
                for c in 0..2 {
                    jac[a][c] += g[i][a][c] * e;
                }
            }
        }
        Ok(jac)
    }

    /// ∂_i u_c on the grid as two vector fields: (∂₁u, ∂₂u).
    pub fn gradient_field(&self, grid: &PolarGrid) -> Result<[GridField; 2]> {
        if grid.radii != self.radii {
            return Err(Error::Grid("grid radii differ from the solved radii".into()));
        }
        let gm = self.gradient_modes()?;
        let part = |a: usize| -> Result<GridField> {
            let modes: BTreeMap<i32, Vec<C2>> = gm
                .iter()
                .map(|(&n, v)| (n, v.iter().map(|j| j[a]).collect()))
                .collect();
            synthesize(&modes, grid)
        };
        Ok([part(0)?, part(1)?])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CylKind {
    /// J_{k,n}(x) = J_n(k|x|) e^{inθ}
    J,
    /// H_{k,n}(x) = H⁽¹⁾_n(k|x|) e^{−inθ}
    H,
}

pub fn cyl_wave(kind: CylKind, k: f64, n: i32, x: [f64; 2]) -> Result<Complex64> {
    let (r, th) = (x[0].hypot(x[1]), x[1].atan2(x[0]));
    Ok(match kind {
        CylKind::J => Complex64::from_polar(bessel_j(Order::int(n), k * r)?, n as f64 * th),
        CylKind::H => hankel1(Order::int(n), k * r)? * Complex64::from_polar(1.0, -(n as f64) * th),
    })
}

/// (∂₁, ∂₂) of J_{k,n} or H_{k,n} from the order-shift recurrences.
pub fn cyl_wave_grad(kind: CylKind, k: f64, n: i32, x: [f64; 2]) -> Result<[Complex64; 2]> {
    let lo = cyl_wave(kind, k, n - 1, x)?;
    let hi = cyl_wave(kind, k, n + 1, x)?;
    let s = match kind {
        CylKind::J => 1.0,
        CylKind::H => -1.0,
    };
    Ok([(lo - hi) * (0.5 * k), I * (s * 0.5 * k) * (lo + hi)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundsol::make_params;
    use crate::solver::Bump;

    #[test]
    fn zero_forcing_gives_zero() {
        let mut b = Bump::new(0, 1.0, 0.25).unwrap();
        b.amp = 0.0;
        let p = make_params(1.0, 1.0, 1.0).unwrap();
        let s = mode_solve(0, &b, &p, &[0.5, 1.0, 2.0]).unwrap();
        for j in 0..3 {
            assert!(s.u_less[j].iter().chain(&s.u_greater[j]).all(|v| *v == C2_ZERO));
        }
    }

    #[test]
    fn greater_pieces_vanish_beyond_support() {
        let b = Bump::new(0, 1.0, 0.25).unwrap();
        let p = make_params(1.0, 1.0, 1.0).unwrap();
        for n in [-2, 0, 2] {
            let s = mode_solve(n, &b, &p, &[1.3, 2.0, 5.0]).unwrap();
            for j in 0..3 {
                assert!(s.u_greater[j].iter().all(|v| *v == C2_ZERO));
            }
        }
    }

    #[test]
    fn collapse_matches_scalar_helmholtz() {
        let b = Bump::new(1, 1.0, 0.3).unwrap();
        let p = make_params(-1.0, 1.0, 1.5).unwrap();
        let radii = [0.3, 0.8, 1.0, 1.2, 2.0, 4.0];
        let s = mode_solve(1, &b, &p, &radii).unwrap();
        for j in 1..3 {
            assert!(s.u_less[j].iter().chain(&s.u_greater[j]).all(|v| v[0].norm() < 1e-14 && v[1].norm() < 1e-14));
        }
        let g = |t: f64| Complex64::new(b.profile(t), 0.0);
        let h = helmholtz_mode_solve(1, &g, b.support(), p.k_s, &radii).unwrap();
        for (u, v) in s.total.iter().zip(&h) {
            let want = v / p.mu_shear;
            assert!((u[0] - want).norm() <= 1e-8 * want.norm().max(1e-300));
            assert!(u[1].norm() <= 1e-14);
        }
    }

    #[test]
    fn recurrence_gradient_spot_values() {
        let x = [1.5 * 0.7f64.cos(), 1.5 * 0.7f64.sin()];
        let h = 1e-5;
        for kind in [CylKind::J, CylKind::H] {
            let g = cyl_wave_grad(kind, 1.0, 2, x).unwrap();
            for (a, e) in [[h, 0.0], [0.0, h]].iter().enumerate() {
                let fp = cyl_wave(kind, 1.0, 2, [x[0] + e[0], x[1] + e[1]]).unwrap();
                let fm = cyl_wave(kind, 1.0, 2, [x[0] - e[0], x[1] - e[1]]).unwrap();
                let fd = (fp - fm) / (2.0 * h);
                assert!((fd - g[a]).norm() <= 1e-8 * g[a].norm(), "{kind:?} {a}");
            }
        }
    }
}
