//! One-dimensional lower functional of the centered maximal operator and the
//! step-train family on which it is unbounded in the radial MT class.

use rayon::prelude::*;

use super::RadialWeight;
use crate::error::{Error, Result};
use crate::quad::{adaptive, golden_max, QuadOptions};

const AVG_GRID: usize = 512;
const SCAN_TOL: f64 = 1e-7;
const FINAL_TOL: f64 = 1e-10;

struct Averager<'a> {
    w: &'a RadialWeight,
    knots: Vec<f64>,
}

impl<'a> Averager<'a> {
    fn new(w: &'a RadialWeight) -> Self {
        let mut knots = w.knots();
        knots.sort_by(|a, b| a.partial_cmp(b).expect("finite knots"));
        knots.dedup();
        Averager { w, knots }
    }

    // clamped to [0, sup V], which absorbs cancellation in the antiderivative difference
    fn avg(&self, rho: f64, s: f64) -> f64 {
        let v = (self.w.antiderivative(rho + s) - self.w.antiderivative(rho - s)) / (2.0 * s);
        v.clamp(0.0, self.w.sup_value())
    }

    // For step weights the window integral is affine in s between breakpoints,
    // so the average is monotone there and the sup sits on a breakpoint or a limit.
    // Knots are visited outward from ρ and the scan stops once no wider window can win.
    fn sup_step(&self, rho: f64) -> f64 {
        let mut best = self.avg(rho, rho);
        let split = self.knots.partition_point(|&k| k < rho);
        let (mut lo, mut hi) = (split, split);
        loop {
            let left = lo.checked_sub(1).map(|i| rho - self.knots[i]);
            let right = self.knots.get(hi).map(|&k| k - rho);
            let s = match (left, right) {
                (Some(l), Some(r)) if l <= r => {
                    lo -= 1;
                    l
                }
                (_, Some(r)) => {
                    hi += 1;
                    r
                }
                (Some(l), None) => {
                    lo -= 1;
                    l
                }
                (None, None) => break,
            };
            if s >= rho {
                break;
            }
            if s <= 0.0 {
                continue;
            }
            if self.w.window_mass_bound(s) / (2.0 * s) < best {
                break;
            }
            best = best.max(self.avg(rho, s));
        }
        // small windows only see ρ itself: the mean of the one-sided limits
        let at_knot = self.knots.binary_search_by(|k| k.partial_cmp(&rho).expect("finite")).is_ok();
        let limit = if at_knot { 0.5 } else { self.w.eval(rho) };
        best.max(limit)
    }

    fn sup_smooth(&self, rho: f64) -> f64 {
        let mut grid: Vec<f64> = (1..=AVG_GRID).map(|i| rho * i as f64 / AVG_GRID as f64).collect();
        grid.push(rho * 1e-6);
        grid.extend(
            self.knots
                .iter()
                .map(|k| (rho - k).abs())
                .filter(|&s| s > 0.0 && s < rho),
        );
        grid.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let vals: Vec<f64> = grid.iter().map(|&s| self.avg(rho, s)).collect();
        let (i, &v) = vals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite"))
            .expect("nonempty");
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(grid.len() - 1)];
        if hi > lo {
            let (_, g) = golden_max(|s| self.avg(rho, s), lo, hi, 1e-7);
            v.max(g)
        } else {
            v
        }
    }

    fn sup(&self, rho: f64) -> f64 {
        if self.w.is_step() {
            self.sup_step(rho)
        } else {
            self.sup_smooth(rho)
        }
    }
}

/// 𝒩f₀(ρ) = sup over 0 < s < ρ of (1/2s) ∫_{ρ−s}^{ρ+s} f₀.
pub fn maximal_lower_1d(f0: &RadialWeight, rho: f64) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    Ok(Averager::new(f0).sup(rho))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleReport {
    pub eta: f64,
    pub delta: f64,
    pub norm_f: f64,
    pub norm_argmax_mu: f64,
    pub lower_mf: f64,
    pub lower_argmax_mu: f64,
    pub ratio: f64,
    pub log_eta_over_delta: f64,
}

// ∫ over r ∈ [2, 3] of r 𝒩f₀(r)/√(r² − μ²), in the variable s = √(r² − μ²).
fn lower_integral(avg: &Averager<'_>, mu: f64, rel_tol: f64) -> f64 {
    let s_lo = (4.0 - mu * mu).max(0.0).sqrt();
    let s_hi = (9.0 - mu * mu).max(0.0).sqrt();
    if s_hi <= s_lo {
        return 0.0;
    }
    let breaks: Vec<f64> = avg
        .knots
        .iter()
        .filter(|&&k| k > mu)
        .map(|&k| ((k - mu) * (k + mu)).sqrt())
        .collect();
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol,
        max_intervals: 20_000,
    };
    adaptive(|s: f64| avg.sup((mu * mu + s * s).sqrt()), s_lo, s_hi, &breaks, opts).value
}

/// Norm of the step train and the lower bound for the norm of its maximal function.
pub fn counterexample_report(eta: f64, delta: f64) -> Result<CounterexampleReport> {
    let f0 = RadialWeight::step_train(eta, delta)?;
    let rep = f0.mt_norm()?;
    let avg = Averager::new(&f0);
    // the kernel r/√(r² − μ²) grows with μ on [0, 2], so the sup over μ lies in [2, 3]
    let mut mus: Vec<f64> = (0..=32).map(|i| 2.0 + i as f64 / 32.0).collect();
    mus.extend(f0.intervals().iter().map(|iv| iv.0).filter(|&a| a <= 3.0));
    mus.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    mus.dedup();
    let vals: Vec<f64> = mus.par_iter().map(|&m| lower_integral(&avg, m, SCAN_TOL)).collect();
    let (i, &v) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite"))
        .expect("nonempty");
    let mut best = (v, mus[i]);
    let lo = mus[i.saturating_sub(1)];
    let hi = mus[(i + 1).min(mus.len() - 1)];
    if hi > lo {
        let (m, g) = golden_max(|m| lower_integral(&avg, m, SCAN_TOL), lo, hi, 1e-4 * delta);
        if g > best.0 {
            best = (g, m);
        }
    }
    let best = (lower_integral(&avg, best.1, FINAL_TOL), best.1);
    Ok(CounterexampleReport {
        eta,
        delta,
        norm_f: rep.mt_norm,
        norm_argmax_mu: rep.argmax_mu,
        lower_mf: best.0,
        lower_argmax_mu: best.1,
        ratio: best.0 / rep.mt_norm,
        log_eta_over_delta: (eta / delta).ln(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderReport {
    pub reports: Vec<CounterexampleReport>,
    pub slope: f64,
    pub intercept: f64,
    pub strictly_increasing: bool,
    /// max and min of norm_f·η/δ over the ladder
    pub norm_const_max: f64,
    pub norm_const_min: f64,
}

/// Least-squares line y ≈ slope·x + intercept.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// δ descending geometrically strictly inside (4η², η/4), `levels` points.
pub fn counterexample_ladder(eta: f64, levels: usize) -> Result<LadderReport> {
    if levels < 2 {
        return Err(Error::InvalidParams("ladder needs at least 2 levels".into()));
    }
    let lo = 4.0 * eta * eta;
    let span = 1.0 / (16.0 * eta);
    let deltas: Vec<f64> = (0..levels)
        .rev()
        .map(|k| lo * span.powf((k as f64 + 0.5) / levels as f64))
        .collect();
    let reports = deltas
        .iter()
        .map(|&d| counterexample_report(eta, d))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = reports.iter().map(|r| r.log_eta_over_delta).collect();
    let ys: Vec<f64> = reports.iter().map(|r| r.ratio).collect();
    let (slope, intercept) = fit_slope(&xs, &ys);
    let consts: Vec<f64> = reports.iter().map(|r| r.norm_f * eta / r.delta).collect();
    Ok(LadderReport {
        strictly_increasing: ys.windows(2).all(|w| w[1] > w[0]),
        slope,
        intercept,
        norm_const_max: consts.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        norm_const_min: consts.iter().copied().fold(f64::INFINITY, f64::min),
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_examples() {
        let w = RadialWeight::indicator(1.0).unwrap();
        assert!((maximal_lower_1d(&w, 2.0).unwrap() - 0.25).abs() < 1e-12);
        assert!((maximal_lower_1d(&w, 0.5).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_bounded_by_sup() {
        let g = RadialWeight::gaussian(1.0).unwrap();
        for &rho in &[0.1, 0.7, 2.0, 5.0] {
            let v = maximal_lower_1d(&g, rho).unwrap();
            assert!(v <= 1.0 + 1e-12 && v > 0.0);
            assert!(v >= g.eval(rho) - 1e-9, "rho={rho}");
        }
    }

    #[test]
    fn slope_of_exact_line() {
        let (s, c) = fit_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((s - 2.0).abs() < 1e-15 && (c - 1.0).abs() < 1e-15);
    }
}
