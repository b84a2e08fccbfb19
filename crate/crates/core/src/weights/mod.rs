//! Radial weights, their X-ray transform and Mizohata–Takeuchi norm.
//!
//! All (r² − μ²)^{−1/2} integrals use r = √(μ² + s²), which turns
//! ∫_μ^∞ r V(r)/√(r² − μ²) dr into the regular ∫_0^∞ V(√(μ² + s²)) ds.

mod majorant;
mod maximal;

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quad::{adaptive, golden_max, QuadOptions};

pub use majorant::{radial_majorant, MajorantReport};
pub use maximal::{
    counterexample_ladder, counterexample_report, fit_slope, maximal_lower_1d, CounterexampleReport,
    LadderReport,
};

/// Profiles above this value are reported as divergent.
pub const DIVERGENCE_CAP: f64 = 1e12;
/// Gaussian cutoff radius in units of σ (e^{−40} ≈ 4e−18).
const GAUSS_CUTOFF: f64 = 6.324_555_320_336_759;
/// PowerTail numeric integration stops at this many scale lengths; the rest is closed form.
const POWER_TAIL_FAR: f64 = 1e6;
const SUP_GRID: usize = 512;

#[derive(Clone, Debug, PartialEq)]
pub enum RadialWeight {
    /// χ_{[0, R]}
    Indicator { r: f64 },
    /// e^{−r²/σ²}
    Gaussian { sigma: f64 },
    /// (1 + r/c)^{−1−ε}
    PowerTail { eps: f64, scale: f64 },
    /// Σ_{j=0}^{N} χ over c·[2 + jη, 2 + jη + δ], N = ⌊1/η⌋.
    StepTrain { eta: f64, delta: f64, scale: f64 },
    /// Linear interpolation between knots, zero outside.
    Tabulated { knots: Vec<(f64, f64)> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MTReport {
    pub mt_norm: f64,
    pub argmax_mu: f64,
    pub xray_norm: f64,
    pub quadrature_error: f64,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParams(format!("{name} must be positive and finite, got {v}")))
    }
}

impl RadialWeight {
    pub fn indicator(r: f64) -> Result<Self> {
        Ok(RadialWeight::Indicator { r: positive("R", r)? })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Ok(RadialWeight::Gaussian {
            sigma: positive("sigma", sigma)?,
        })
    }

    pub fn power_tail(eps: f64) -> Result<Self> {
        Ok(RadialWeight::PowerTail {
            eps: positive("eps", eps)?,
            scale: 1.0,
        })
    }

    /// Step train with 4η² ≤ δ ≤ η/4 and η ≤ 1/8.
    pub fn step_train(eta: f64, delta: f64) -> Result<Self> {
        positive("eta", eta)?;
        positive("delta", delta)?;
        if eta > 0.125 || delta < 4.0 * eta * eta || delta > 0.25 * eta {
            return Err(Error::InvalidParams(format!(
                "step train needs 4 eta^2 <= delta <= eta/4 and eta <= 1/8, got eta = {eta}, delta = {delta}"
            )));
        }
        Ok(RadialWeight::StepTrain {
            eta,
            delta,
            scale: 1.0,
        })
    }

    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidParams("tabulated weight needs at least 2 knots".into()));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidParams("tabulated radii must be strictly increasing".into()));
            }
        }
        for &(r, v) in &knots {
            if !(r >= 0.0) || !r.is_finite() || !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("bad knot ({r}, {v})")));
            }
        }
        Ok(RadialWeight::Tabulated { knots })
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Io(e.to_string()))?;
        let mut knots = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let parsed = (|| -> Option<(f64, f64)> {
                Some((rec.get(0)?.parse().ok()?, rec.get(1)?.parse().ok()?))
            })();
            match parsed {
                Some(k) => knots.push(k),
                None if i == 0 => continue, // header row
                None => return Err(Error::Parse(format!("bad row {} in {}", i + 1, path.display()))),
            }
        }
        Self::tabulated(knots)
    }

    /// Number of step intervals minus one, N = ⌊1/η⌋.
    pub fn step_count(eta: f64) -> usize {
        (1.0 / eta + 1e-9).floor() as usize
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RadialWeight::Indicator { r: big } => (r <= *big) as u8 as f64,
            RadialWeight::Gaussian { sigma } => (-(r / sigma).powi(2)).exp(),
            RadialWeight::PowerTail { eps, scale } => (1.0 + r / scale).powf(-1.0 - eps),
            RadialWeight::StepTrain { eta, delta, scale } => {
                let x = r / scale;
                if x < 2.0 {
                    return 0.0;
                }
                let j = ((x - 2.0) / eta).floor();
                let inside = j <= Self::step_count(*eta) as f64 && x - (2.0 + j * eta) <= *delta;
                inside as u8 as f64
            }
            RadialWeight::Tabulated { knots } => interp(knots, r),
        }
    }

    /// Support intervals of the step families, empty otherwise.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        match *self {
            RadialWeight::Indicator { r } => vec![(0.0, r)],
            RadialWeight::StepTrain { eta, delta, scale } => (0..=Self::step_count(eta))
                .map(|j| {
                    let a = 2.0 + j as f64 * eta;
                    (scale * a, scale * (a + delta))
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn is_step(&self) -> bool {
        matches!(self, RadialWeight::Indicator { .. } | RadialWeight::StepTrain { .. })
    }

    /// Radii where the weight or its derivative jumps.
    pub fn knots(&self) -> Vec<f64> {
        match self {
            RadialWeight::Tabulated { knots } => knots.iter().map(|k| k.0).collect(),
            _ => self.intervals().iter().flat_map(|&(a, b)| [a, b]).collect(),
        }
    }

    /// Radius beyond which the weight is zero or below 1e−16 of its maximum.
    pub fn effective_range(&self) -> f64 {
        match self {
            RadialWeight::Indicator { r } => *r,
            RadialWeight::Gaussian { sigma } => GAUSS_CUTOFF * sigma,
            RadialWeight::PowerTail { .. } => f64::INFINITY,
            RadialWeight::StepTrain { .. } => self.intervals().last().map_or(0.0, |iv| iv.1),
            RadialWeight::Tabulated { knots } => knots.last().map_or(0.0, |k| k.0),
        }
    }

    pub fn sup_value(&self) -> f64 {
        match self {
            RadialWeight::Tabulated { knots } => knots.iter().map(|k| k.1).fold(0.0, f64::max),
            _ => 1.0,
        }
    }

    /// ∫_0^r V.
    pub fn antiderivative(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match *self {
            RadialWeight::Indicator { r: big } => r.min(big),
            RadialWeight::Gaussian { sigma } => 0.5 * PI.sqrt() * sigma * libm::erf(r / sigma),
            RadialWeight::PowerTail { eps, scale } => {
                scale / eps * (1.0 - (1.0 + r / scale).powf(-eps))
            }
            RadialWeight::StepTrain { eta, delta, scale } => {
                let n = Self::step_count(eta);
                let x = r / scale;
                if x <= 2.0 {
                    return 0.0;
                }
                let jf = ((x - 2.0) / eta).floor();
                let total = if jf > n as f64 {
                    (n + 1) as f64 * delta
                } else {
                    let j = jf as usize;
                    let a = 2.0 + j as f64 * eta;
                    j as f64 * delta + (x - a).clamp(0.0, delta)
                };
                scale * total
            }
            RadialWeight::Tabulated { ref knots } => {
                let mut acc = 0.0;
                for w in knots.windows(2) {
                    let (r0, v0) = w[0];
                    let (r1, v1) = w[1];
                    if r <= r0 {
                        break;
                    }
                    let hi = r.min(r1);
                    let vh = v0 + (v1 - v0) * (hi - r0) / (r1 - r0);
                    acc += 0.5 * (v0 + vh) * (hi - r0);
                }
                acc
            }
        }
    }

    /// Upper bound for ∫ V over any window of length 2s (step families only).
    pub fn window_mass_bound(&self, s: f64) -> f64 {
        match *self {
            RadialWeight::Indicator { r } => r.min(2.0 * s),
            RadialWeight::StepTrain { eta, delta, scale } => {
                let total = (Self::step_count(eta) + 1) as f64 * delta * scale;
                total.min(2.0 * s * delta / eta + 2.0 * scale * delta)
            }
            _ => f64::INFINITY,
        }
    }

    /// r ↦ V(r/ω).
    pub fn scale(&self, omega: f64) -> RadialWeight {
        match self {
            RadialWeight::Indicator { r } => RadialWeight::Indicator { r: r * omega },
            RadialWeight::Gaussian { sigma } => RadialWeight::Gaussian {
                sigma: sigma * omega,
            },
            RadialWeight::PowerTail { eps, scale } => RadialWeight::PowerTail {
                eps: *eps,
                scale: scale * omega,
            },
            RadialWeight::StepTrain { eta, delta, scale } => RadialWeight::StepTrain {
                eta: *eta,
                delta: *delta,
                scale: scale * omega,
            },
            RadialWeight::Tabulated { knots } => RadialWeight::Tabulated {
                knots: knots.iter().map(|&(r, v)| (r * omega, v)).collect(),
            },
        }
    }

    /// ∫_0^∞ V(√(μ² + s²)) ds, exact for the step families and the Gaussian.
    pub fn mt_profile(&self, mu: f64) -> Result<f64> {
        let v = match *self {
            RadialWeight::Gaussian { sigma } => (-(mu / sigma).powi(2)).exp() * 0.5 * PI.sqrt() * sigma,
            _ if self.is_step() => step_profile(&self.intervals(), mu),
            _ => self.mt_profile_numeric(mu)?.0,
        };
        check_cap(v)
    }

    /// Quadrature evaluation of the profile; returns (value, error estimate).
    pub fn mt_profile_numeric(&self, mu: f64) -> Result<(f64, f64)> {
        let opts = QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            max_intervals: 20_000,
        };
        let f = |s: f64| self.eval((mu * mu + s * s).sqrt());
        let breaks: Vec<f64> = self
            .knots()
            .into_iter()
            .filter(|&k| k > mu)
            .map(|k| ((k - mu) * (k + mu)).sqrt())
            .collect();
        let (value, err) = match *self {
            RadialWeight::PowerTail { eps, scale } => {
                let s1 = mu.max(scale);
                let near = adaptive(f, 0.0, s1, &[], opts);
                let ymax = (POWER_TAIL_FAR * scale / s1).max(1.0).ln();
                let far = adaptive(
                    |y: f64| {
                        let s = s1 * y.exp();
                        s * self.eval((mu * mu + s * s).sqrt())
                    },
                    0.0,
                    ymax,
                    &[],
                    opts,
                );
                let s_end = s1 * ymax.exp();
                let tail = scale / eps * (1.0 + s_end / scale).powf(-eps);
                (near.value + far.value + tail, near.err + far.err)
            }
            _ => {
                let range = self.effective_range();
                if range <= mu {
                    return Ok((0.0, 0.0));
                }
                let s_end = ((range - mu) * (range + mu)).sqrt();
                let res = adaptive(f, 0.0, s_end, &breaks, opts);
                (res.value, res.err)
            }
        };
        Ok((check_cap(value)?, err))
    }

    /// X-ray transform along a line at distance μ from the origin.
    pub fn xray_line(&self, mu: f64) -> Result<f64> {
        if !(mu >= 0.0) {
            return Err(Error::Domain(format!("line distance must be >= 0, got {mu}")));
        }
        Ok(2.0 * self.mt_profile(mu)?)
    }

    fn nonincreasing_from_origin(&self) -> bool {
        match self {
            RadialWeight::Tabulated { knots } => {
                knots[0].0 == 0.0 && knots.windows(2).all(|w| w[1].1 <= w[0].1)
            }
            RadialWeight::StepTrain { .. } => false,
            _ => true,
        }
    }

    /// Closed-form |||V||| and its argmax where available.
    pub fn mt_closed_form(&self) -> Option<(f64, f64)> {
        if !self.nonincreasing_from_origin() {
            return None;
        }
        let v = match *self {
            RadialWeight::Indicator { r } => r,
            RadialWeight::Gaussian { sigma } => 0.5 * PI.sqrt() * sigma,
            RadialWeight::PowerTail { eps, scale } => scale / eps,
            RadialWeight::Tabulated { ref knots } => self.antiderivative(knots.last()?.0),
            RadialWeight::StepTrain { .. } => return None,
        };
        Some((v, 0.0))
    }

    fn sup_range(&self) -> f64 {
        let r = self.effective_range();
        if r.is_finite() {
            r
        } else if let RadialWeight::PowerTail { scale, .. } = self {
            20.0 * scale
        } else {
            1.0
        }
    }

    /// sup over μ of the exact profile (step families) or quadrature profile.
    fn sup_profile(&self, numeric: bool) -> Result<(f64, f64)> {
        let eval = |mu: f64| -> Result<f64> {
            if numeric {
                Ok(self.mt_profile_numeric(mu)?.0)
            } else {
                self.mt_profile(mu)
            }
        };
        if self.is_step() && !numeric {
            return Ok(step_sup(&self.intervals()));
        }
        let r_max = self.sup_range();
        let mut grid: Vec<f64> = (0..=SUP_GRID)
            .map(|i| r_max * i as f64 / SUP_GRID as f64)
            .collect();
        grid.extend(self.knots().into_iter().filter(|&k| k < r_max));
        grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        grid.dedup();
        let vals = grid.iter().map(|&m| eval(m)).collect::<Result<Vec<f64>>>()?;
        let (i_best, _) = vals
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let mut best = (grid[i_best], vals[i_best]);
        let lo = grid[i_best.saturating_sub(1)];
        let hi = grid[(i_best + 1).min(grid.len() - 1)];
        if hi > lo {
            let mut failed = None;
            let (m, v) = golden_max(
                |m| match eval(m) {
                    Ok(v) => v,
                    Err(e) => {
                        failed = Some(e);
                        f64::NEG_INFINITY
                    }
                },
                lo,
                hi,
                1e-6 * r_max,
            );
            if let Some(e) = failed {
                return Err(e);
            }
            if v > best.1 {
                best = (m, v);
            }
        }
        Ok((best.1, best.0))
    }

    /// sup over μ by quadrature only, independent of closed forms.
    pub fn mt_norm_numeric(&self) -> Result<(f64, f64)> {
        self.sup_profile(true)
    }

    pub fn mt_norm(&self) -> Result<MTReport> {
        let (norm, argmax) = match self.mt_closed_form() {
            Some(v) => v,
            None => self.sup_profile(false)?,
        };
        let (num, _) = self.sup_profile(true)?;
        Ok(MTReport {
            mt_norm: norm,
            argmax_mu: argmax,
            xray_norm: 2.0 * num,
            quadrature_error: (num - norm).abs(),
        })
    }

    pub fn parse(spec: &str) -> Result<Self> {
        let (family, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("weight spec '{spec}' lacks a family prefix")))?;
        if family == "table" {
            return Self::from_csv(Path::new(rest));
        }
        let mut params = Vec::new();
        for kv in rest.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{kv}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number '{v}' for {k}")))?;
            params.push((k.trim().to_string(), v));
        }
        let take = |name: &str, default: Option<f64>| -> Result<f64> {
            params
                .iter()
                .find(|(k, _)| k == name)
                .map(|p| p.1)
                .or(default)
                .ok_or_else(|| Error::Parse(format!("weight '{family}' needs {name}=")))
        };
        let allowed: &[&str] = match family {
            "indicator" => &["R", "scale"],
            "gauss" => &["sigma", "scale"],
            "powertail" => &["eps", "scale"],
            "steptrain" => &["eta", "delta", "scale"],
            _ => return Err(Error::Parse(format!("unknown weight family '{family}'"))),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(Error::Parse(format!("unknown key '{k}' for weight '{family}'")));
        }
        let w = match family {
            "indicator" => Self::indicator(take("R", Some(1.0))?)?,
            "gauss" => Self::gaussian(take("sigma", Some(1.0))?)?,
            "powertail" => Self::power_tail(take("eps", Some(0.5))?)?,
            _ => Self::step_train(take("eta", None)?, take("delta", None)?)?,
        };
        let s = take("scale", Some(1.0))?;
        Ok(if s == 1.0 { w } else { w.scale(positive("scale", s)?) })
    }
}

impl FromStr for RadialWeight {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RadialWeight::parse(s)
    }
}

impl fmt::Display for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialWeight::Indicator { r } => write!(f, "indicator:R={r}"),
            RadialWeight::Gaussian { sigma } => write!(f, "gauss:sigma={sigma}"),
            RadialWeight::PowerTail { eps, scale } => write!(f, "powertail:eps={eps},scale={scale}"),
            RadialWeight::StepTrain { eta, delta, scale } => {
                write!(f, "steptrain:eta={eta},delta={delta},scale={scale}")
            }
            RadialWeight::Tabulated { knots } => write!(f, "table:<{} knots>", knots.len()),
        }
    }
}

fn check_cap(v: f64) -> Result<f64> {
    if !(v <= DIVERGENCE_CAP) {
        return Err(Error::Divergent(format!("profile value {v} exceeds cap")));
    }
    Ok(v)
}

fn interp(knots: &[(f64, f64)], r: f64) -> f64 {
    if r < knots[0].0 || r > knots[knots.len() - 1].0 {
        return 0.0;
    }
    let i = knots.partition_point(|k| k.0 <= r);
    if i == 0 {
        return knots[0].1;
    }
    if i >= knots.len() {
        return knots[knots.len() - 1].1;
    }
    let (r0, v0) = knots[i - 1];
    let (r1, v1) = knots[i];
    v0 + (v1 - v0) * (r - r0) / (r1 - r0)
}

// √(b² − μ²) − √(max(a, μ)² − μ²) summed over the intervals.
fn step_profile(intervals: &[(f64, f64)], mu: f64) -> f64 {
    let mut acc = 0.0;
    for &(a, b) in intervals {
        if b <= mu {
            continue;
        }
        let sb = ((b - mu) * (b + mu)).sqrt();
        if a <= mu {
            acc += sb;
        } else {
            let sa = ((a - mu) * (a + mu)).sqrt();
            acc += (b - a) * (b + a) / (sb + sa);
        }
    }
    acc
}

// The step profile increases on gaps between intervals, so candidates are 0, the
// left endpoints, and one refined maximum inside each interval.
fn step_sup(intervals: &[(f64, f64)]) -> (f64, f64) {
    let mut best = (step_profile(intervals, 0.0), 0.0);
    for &(a, b) in intervals {
        let va = step_profile(intervals, a);
        if va > best.0 {
            best = (va, a);
        }
        let sub = 16;
        let h = (b - a) / sub as f64;
        let (mut im, mut vm) = (0, va);
        for i in 1..sub {
            let v = step_profile(intervals, a + h * i as f64);
            if v > vm {
                im = i;
                vm = v;
            }
        }
        if im > 0 {
            let lo = a + h * (im - 1) as f64;
            let (m, v) = golden_max(|m| step_profile(intervals, m), lo, lo + 2.0 * h, 1e-9 * (b - a));
            let (m, v) = if v > vm { (m, v) } else { (a + h * im as f64, vm) };
            if v > best.0 {
                best = (v, m);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_norms() {
        let r = RadialWeight::indicator(1.0).unwrap().mt_norm().unwrap();
        assert_eq!(r.mt_norm, 1.0);
        assert_eq!(r.argmax_mu, 0.0);
        assert!((r.xray_norm - 2.0).abs() < 1e-10);
        let g = RadialWeight::gaussian(1.0).unwrap().mt_norm().unwrap();
        assert!((g.mt_norm - 0.886_226_925_452_758).abs() < 1e-12);
        assert!((g.xray_norm - 2.0 * g.mt_norm).abs() < 1e-9);
    }

    #[test]
    fn xray_examples() {
        let ind = RadialWeight::indicator(1.0).unwrap();
        assert_eq!(ind.xray_line(0.0).unwrap(), 2.0);
        assert_eq!(ind.xray_line(1.0).unwrap(), 0.0);
        let g = RadialWeight::gaussian(1.0).unwrap();
        let want = 2.0 * (-1.0f64).exp() * PI.sqrt() / 2.0;
        assert!((g.xray_line(1.0).unwrap() - want).abs() < 1e-10);
        let (num, _) = g.mt_profile_numeric(1.0).unwrap();
        assert!((2.0 * num - want).abs() < 1e-10);
    }

    #[test]
    fn scale_examples() {
        assert_eq!(
            RadialWeight::indicator(1.0).unwrap().scale(2.0),
            RadialWeight::Indicator { r: 2.0 }
        );
        assert_eq!(
            RadialWeight::gaussian(1.0).unwrap().scale(3.0),
            RadialWeight::Gaussian { sigma: 3.0 }
        );
    }

    #[test]
    fn step_antiderivative_matches_quadrature() {
        let w = RadialWeight::step_train(1.0 / 64.0, 1.0 / 512.0).unwrap();
        for &r in &[1.0f64, 2.0, 2.001, 2.5, 3.0, 3.2] {
            let direct: f64 = w
                .intervals()
                .iter()
                .map(|&(a, b)| (r.min(b) - a).max(0.0))
                .sum();
            assert!((w.antiderivative(r) - direct).abs() < 1e-14, "r={r}");
        }
        assert_eq!(w.intervals().len(), 65);
    }

    #[test]
    fn step_constraints() {
        assert!(RadialWeight::step_train(0.2, 0.01).is_err());
        assert!(RadialWeight::step_train(1.0 / 64.0, 1e-4).is_err());
        assert!(RadialWeight::step_train(1.0 / 64.0, 0.01).is_err());
    }

    #[test]
    fn grammar_roundtrip() {
        let w: RadialWeight = "steptrain:eta=0.015625,delta=0.001953125".parse().unwrap();
        assert_eq!(w, RadialWeight::step_train(0.015625, 0.001953125).unwrap());
        let p: RadialWeight = "powertail:eps=0.5".parse().unwrap();
        assert_eq!(p.to_string().parse::<RadialWeight>().unwrap(), p);
        assert!("gauss:sigma=1,foo=2".parse::<RadialWeight>().is_err());
        assert!("nope:x=1".parse::<RadialWeight>().is_err());
    }

    #[test]
    fn power_tail_numeric_agrees() {
        let w = RadialWeight::power_tail(0.5).unwrap();
        let (v, _) = w.mt_profile_numeric(0.0).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }
}
