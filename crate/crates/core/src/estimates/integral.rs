use num_complex::Complex64;
use rayon::prelude::*;

use super::regions::Piece;
use crate::error::{Error, Result};
use crate::quad::gl_rule;
use crate::specfun::{bessel_j_scaled, hankel1_scaled, Order, Scaled, ScaledComplex};
use crate::weights::RadialWeight;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralOptions {
    /// Inner cutoff: only r > eps contributes.
    pub eps: f64,
    pub rel_tol: f64,
    pub max_levels: u32,
    pub order: usize,
    /// Smallest t sampled when a region reaches the origin.
    pub t_floor: f64,
}

impl Default for IntegralOptions {
    fn default() -> Self {
        IntegralOptions {
            eps: 0.0,
            rel_tol: 1e-8,
            max_levels: 6,
            order: 16,
            t_floor: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralReport {
    pub value: f64,
    /// Change under one more panel halving plus the truncation tail bound.
    pub quad_err: f64,
    pub tail: f64,
    pub levels: u32,
}

/// An integrand K(r, t) whose t-dependent part is evaluated once per outer node.
pub trait PairKernel: Sync {
    type AtT: Send;
    /// Orders governing the steep small-argument behaviour in r and in t.
    fn orders(&self) -> (f64, f64);
    fn at_t(&self, t: f64) -> Result<Self::AtT>;
    fn eval(&self, at: &Self::AtT, r: f64, t: f64) -> Result<f64>;
}

/// |H_ν(t)J_μ(r)|², or |H_ν(t)J_μ(r) − a^p H_ν(at)J_μ(ar)|² when `cancel` is set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductKernel {
    pub bessel: Order,
    pub hankel: Order,
    pub cancel: Option<(f64, i32)>,
}

impl ProductKernel {
    /// Whether the weighted integral over a region touching the origin diverges
    /// logarithmically: the leading small-argument terms behave like (r/t)^μ t^{μ−ν}
    /// and only cancel when a^{p+μ−ν} = 1.
    pub fn diverges_at_origin(&self) -> bool {
        let gap = self.hankel.value() - self.bessel.value();
        if gap < 2.0 {
            return false;
        }
        match self.cancel {
            None => true,
            Some((a, p)) => a != 1.0 && p as f64 != gap,
        }
    }

    fn r_factor(&self, r: f64) -> Result<(Scaled, Scaled)> {
        let j = bessel_j_scaled(self.bessel, r)?;
        let ja = match self.cancel {
            Some((a, _)) => bessel_j_scaled(self.bessel, a * r)?,
            None => j,
        };
        Ok((j, ja))
    }
}

impl PairKernel for ProductKernel {
    type AtT = (ScaledComplex, ScaledComplex);

    fn orders(&self) -> (f64, f64) {
        (self.bessel.value().abs(), self.hankel.value().abs())
    }

    fn at_t(&self, t: f64) -> Result<Self::AtT> {
        let h = hankel1_scaled(self.hankel, t)?;
        let ha = match self.cancel {
            Some((a, _)) => hankel1_scaled(self.hankel, a * t)?,
            None => h,
        };
        Ok((h, ha))
    }

    fn eval(&self, t: &Self::AtT, r: f64, _: f64) -> Result<f64> {
        let r = self.r_factor(r)?;
        let m1 = t.0.mant * r.0.mant;
        let l1 = t.0.log + r.0.log;
        Ok(match self.cancel {
            None => sq_scaled(m1, l1),
            Some((a, p)) => {
                let m2 = t.1.mant * r.1.mant * a.powi(p);
                let l2 = t.1.log + r.1.log;
                if m2 == Complex64::new(0.0, 0.0) {
                    sq_scaled(m1, l1)
                } else if m1 == Complex64::new(0.0, 0.0) {
                    sq_scaled(m2, l2)
                } else {
                    // unit mantissas keep e^{l_i − l} away from subnormals
                    let (n1, n2) = (m1.norm(), m2.norm());
                    let (l1, l2) = (l1 + n1.ln(), l2 + n2.ln());
                    let l = l1.max(l2);
                    let d = m1 / n1 * (l1 - l).exp() - m2 / n2 * (l2 - l).exp();
                    sq_scaled(d, l)
                }
            }
        })
    }
}

// |m e^l|² without forming e^l.
fn sq_scaled(m: Complex64, l: f64) -> f64 {
    let n = m.norm();
    if n == 0.0 {
        return 0.0;
    }
    (2.0 * (n.ln() + l)).exp()
}

/// Panel edges on [lo, hi]: a uniform grid of step h plus geometric grading of
/// base `s` next to the ends that are flagged.
pub(crate) fn graded_edges(lo: f64, hi: f64, h: f64, s: f64, at_lo: bool, at_hi: bool, knots: &[f64]) -> Vec<f64> {
    let mut e = vec![lo, hi];
    let n = ((hi - lo) / h).ceil() as usize;
    e.extend((1..n).map(|i| lo + (hi - lo) * i as f64 / n as f64));
    if s > 0.0 {
        let mut d = s;
        while d < h.min(0.5 * (hi - lo)) {
            if at_lo {
                e.push(lo + d);
            }
            if at_hi {
                e.push(hi - d);
            }
            d *= 2.0;
        }
    }
    e.extend(knots.iter().copied().filter(|&k| k > lo && k < hi));
    e.sort_by(|a, b| a.partial_cmp(b).expect("finite edges"));
    e.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1e-300));
    e
}

/// Gauss nodes on the given edges, each panel split into 2^level pieces.
pub(crate) fn nodes(edges: &[f64], level: u32, order: usize) -> Vec<(f64, f64)> {
    let rule = gl_rule(order);
    let split = 1usize << level;
    let mut out = Vec::with_capacity(edges.len() * split * order);
    for w in edges.windows(2) {
        let h = (w[1] - w[0]) / split as f64;
        for p in 0..split {
            let c = w[0] + h * (p as f64 + 0.5);
            out.extend(rule.iter().map(|&(x, wt)| (c + 0.5 * h * x, 0.5 * h * wt)));
        }
    }
    out
}

struct Setup<'a, K> {
    kernel: &'a K,
    w: &'a RadialWeight,
    opts: IntegralOptions,
    h: f64,
    knots: Vec<f64>,
    range: f64,
}

impl<K: PairKernel> Setup<'_, K> {
    fn t_edges(&self, p: &Piece, t_cap: f64) -> Option<Vec<f64>> {
        let lo = p.t0.max(self.opts.eps).max(self.opts.t_floor);
        let hi = p.t1.min(t_cap).min(self.range);
        if !(hi > lo) {
            return None;
        }
        let s = lo / (2.0 * self.kernel.orders().1 + 4.0);
        Some(graded_edges(lo, hi, self.h, s, true, false, &self.knots))
    }

    fn at_t(&self, p: &Piece, t: f64, level: u32) -> Result<f64> {
        let (lo, hi) = p.r_range(t);
        let lo = lo.max(self.opts.eps);
        let hi = hi.min(self.range);
        if !(hi > lo) {
            return Ok(0.0);
        }
        let mu = self.kernel.orders().0;
        let edges = graded_edges(lo, hi, self.h, hi / (2.0 * mu + 2.0), false, true, &self.knots);
        let tf = self.kernel.at_t(t)?;
        let mut acc = 0.0;
        for (r, wr) in nodes(&edges, level, self.opts.order) {
            let v = self.w.eval(r);
            if v == 0.0 {
                continue;
            }
            let k = self.kernel.eval(&tf, r, t)?;
            if !k.is_finite() {
                return Err(Error::IntegrandOverflow { r, t });
            }
            acc += wr * k * v * r;
        }
        Ok(acc * self.w.eval(t) * t)
    }

    fn level_sum(&self, pieces: &[(Piece, Vec<f64>)], level: u32) -> Result<f64> {
        let mut total = 0.0;
        for (p, edges) in pieces {
            let tn = nodes(edges, level, self.opts.order);
            let vals = tn
                .par_iter()
                .map(|&(t, wt)| Ok(wt * self.at_t(p, t, level)?))
                .collect::<Result<Vec<f64>>>()?;
            total += vals.iter().sum::<f64>();
        }
        Ok(total)
    }
}

/// ∬ |H J|² · tV(t) rV(r) over the union of pieces, with unbounded pieces cut at `t_cap`
/// and the remainder covered by a tail bound.
pub fn integrate_pieces(
    pieces: &[Piece],
    kernel: ProductKernel,
    w: &RadialWeight,
    t_cap: f64,
    opts: &IntegralOptions,
) -> Result<IntegralReport> {
    if opts.eps == 0.0 && kernel.diverges_at_origin() && pieces.iter().any(|p| p.t0 <= 0.0 && p.lo <= 0.0) {
        return Err(Error::Divergent(format!(
            "|H_{}(t)J_{}(r)|² tr is not integrable at the origin without cancellation",
            kernel.hankel, kernel.bessel
        )));
    }
    let a = kernel.cancel.map_or(1.0, |c| c.0);
    let range = w.effective_range();
    let tail = pieces
        .iter()
        .filter(|p| p.t1 > t_cap && range > t_cap)
        .map(|_| tail_bound(w, t_cap, a, kernel.cancel.map_or(0, |c| c.1)))
        .sum::<f64>();
    let mut rep = integrate_kernel(pieces, &kernel, a, w, t_cap, opts)?;
    rep.tail = tail;
    rep.quad_err += tail;
    Ok(rep)
}

/// ∬ K(r, t) tV(t) rV(r) over bounded pieces; `a` sets the panel width 1/(2a).
pub fn integrate_kernel<K: PairKernel>(
    pieces: &[Piece],
    kernel: &K,
    a: f64,
    w: &RadialWeight,
    t_cap: f64,
    opts: &IntegralOptions,
) -> Result<IntegralReport> {
    let setup = Setup {
        kernel,
        w,
        opts: *opts,
        h: 0.5 / a,
        knots: w.knots(),
        range: w.effective_range(),
    };
    let prepared: Vec<(Piece, Vec<f64>)> = pieces
        .iter()
        .filter_map(|p| setup.t_edges(p, t_cap).map(|e| (*p, e)))
        .collect();
    let mut prev = setup.level_sum(&prepared, 0)?;
    for level in 1..=opts.max_levels {
        let cur = setup.level_sum(&prepared, level)?;
        let change = (cur - prev).abs();
        if change <= opts.rel_tol * cur.abs() || cur == 0.0 {
            return Ok(IntegralReport {
                value: cur,
                quad_err: change,
                tail: 0.0,
                levels: level,
            });
        }
        prev = cur;
    }
    Err(Error::NonConvergence(format!(
        "double integral did not settle after {} panel halvings",
        opts.max_levels
    )))
}

// For t beyond the turning region t|H_ν(t)|² ≤ 2.1/π and r J_μ(r)² ≤ 2.2/π.
fn tail_bound(w: &RadialWeight, t_cap: f64, a: f64, p: i32) -> f64 {
    let far = w.antiderivative(f64::INFINITY) - w.antiderivative(t_cap);
    let single = (2.1 / std::f64::consts::PI) * (2.2 / std::f64::consts::PI) * far * w.antiderivative(f64::INFINITY);
    single * 2.0 * (1.0 + a.powi(2 * p))
}

/// log ∫_lo^hi F(x) dx for F = mant·e^{log} ≥ 0, with panels graded toward
/// whichever end carries the mass; returns (log value, relative change).
pub(crate) fn log_integral(
    f: &(dyn Fn(f64) -> Result<(f64, f64)> + Sync),
    lo: f64,
    hi: f64,
    scale: f64,
    knots: &[f64],
) -> Result<(f64, f64)> {
    if !(hi > lo) {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    let edges = graded_edges(lo, hi, 0.25, scale, true, true, knots);
    let eval = |level: u32| -> Result<(f64, f64)> {
        let pts = nodes(&edges, level, 16);
        let vals = pts
            .par_iter()
            .map(|&(x, wx)| {
                let (m, l) = f(x)?;
                Ok((m * wx, l))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        let top = vals
            .iter()
            .filter(|v| v.0 > 0.0)
            .map(|v| v.0.ln() + v.1)
            .fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Ok((f64::NEG_INFINITY, top));
        }
        let s: f64 = vals.iter().filter(|v| v.0 > 0.0).map(|v| (v.0.ln() + v.1 - top).exp()).sum();
        Ok((s.ln() + top, top))
    };
    let mut prev = eval(0)?.0;
    for level in 1..=6 {
        let cur = eval(level)?.0;
        let change = if cur == f64::NEG_INFINITY { 0.0 } else { (cur - prev).abs() };
        if change <= 1e-10 {
            return Ok((cur, change));
        }
        prev = cur;
    }
    Err(Error::NonConvergence(format!("one-dimensional integral on [{lo}, {hi}]")))
}
