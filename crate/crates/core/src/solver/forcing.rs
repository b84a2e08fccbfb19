use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{C2, C2_ZERO};
use crate::error::{Error, Result};

/// A compactly supported forcing that can report its angular modes at any radius.
pub trait ModeSource: Sync {
    /// Radial support [a, b] with 0 ≤ a < b.
    fn support(&self) -> (f64, f64);
    /// Angular indices that may be nonzero.
    fn input_modes(&self) -> Vec<i32>;
    /// f_m(t) = (1/2π)∫ f(t cos φ, t sin φ) e^{−imφ} dφ.
    fn mode(&self, m: i32, t: f64) -> C2;
    fn value(&self, x: [f64; 2]) -> C2;
}

/// amp·b((|x| − r0)/w)·e^{inθ}·dir with the C^∞ bump b(s) = exp(1 − 1/(1 − s²)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub n: i32,
    pub r0: f64,
    pub w: f64,
    pub dir: [f64; 2],
    pub amp: f64,
}

impl Bump {
    pub fn new(n: i32, r0: f64, w: f64) -> Result<Self> {
        if !(w > 0.0) || !(r0 >= w) || !r0.is_finite() {
            return Err(Error::InvalidParams(format!(
                "bump needs 0 < w <= r0, got r0 = {r0}, w = {w}"
            )));
        }
        Ok(Bump {
            n,
            r0,
            w,
            dir: [1.0, 0.0],
            amp: 1.0,
        })
    }

    pub fn with_dir(mut self, dir: [f64; 2]) -> Self {
        self.dir = dir;
        self
    }

    pub fn profile(&self, t: f64) -> f64 {
        let s = (t - self.r0) / self.w;
        if s.abs() >= 1.0 {
            0.0
        } else {
            self.amp * (1.0 - 1.0 / (1.0 - s * s)).exp()
        }
    }

    /// f_ω(x) = f(x/ω)/ω², the forcing of the frequency-one problem whose solution is u(x/ω).
    pub fn transport(&self, omega: f64) -> Bump {
        Bump {
            r0: self.r0 * omega,
            w: self.w * omega,
            amp: self.amp / (omega * omega),
            ..*self
        }
    }
}

impl ModeSource for Bump {
    fn support(&self) -> (f64, f64) {
        (self.r0 - self.w, self.r0 + self.w)
    }

    fn input_modes(&self) -> Vec<i32> {
        vec![self.n]
    }

    fn mode(&self, m: i32, t: f64) -> C2 {
        if m != self.n {
            return C2_ZERO;
        }
        let b = self.profile(t);
        [Complex64::new(b * self.dir[0], 0.0), Complex64::new(b * self.dir[1], 0.0)]
    }

    fn value(&self, x: [f64; 2]) -> C2 {
        let t = x[0].hypot(x[1]);
        let ph = Complex64::from_polar(self.profile(t), self.n as f64 * x[1].atan2(x[0]));
        [ph * self.dir[0], ph * self.dir[1]]
    }
}

impl FromStr for Bump {
    type Err = Error;

    /// `bump:n=0,r0=1,w=0.25[,dir=x|y][,amp=1]`
    fn from_str(s: &str) -> Result<Self> {
        let rest = s
            .strip_prefix("bump:")
            .ok_or_else(|| Error::Parse(format!("forcing '{s}' must start with 'bump:'")))?;
        let (mut n, mut r0, mut w, mut dir, mut amp) = (0i32, 1.0, 0.25, [1.0, 0.0], 1.0);
        for kv in rest.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{kv}'")))?;
            let num = |v: &str| -> Result<f64> {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number '{v}' for {k}")))
            };
            match k.trim() {
                "n" => {
                    n = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad mode index '{v}'")))?
                }
                "r0" => r0 = num(v)?,
                "w" => w = num(v)?,
                "amp" => amp = num(v)?,
                "dir" => {
                    dir = match v.trim() {
                        "x" => [1.0, 0.0],
                        "y" => [0.0, 1.0],
                        other => return Err(Error::Parse(format!("dir must be x or y, got '{other}'"))),
                    }
                }
                other => return Err(Error::Parse(format!("unknown bump key '{other}'"))),
            }
        }
        let mut b = Bump::new(n, r0, w).map_err(|e| Error::Parse(e.to_string()))?.with_dir(dir);
        b.amp = amp;
        Ok(b)
    }
}

impl fmt::Display for Bump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = if self.dir == [0.0, 1.0] { "y" } else { "x" };
        write!(f, "bump:n={},r0={},w={},dir={}", self.n, self.r0, self.w, dir)?;
        if self.amp != 1.0 {
            write!(f, ",amp={}", self.amp)?;
        }
        Ok(())
    }
}

/// Any compactly supported field; modes come from an n_theta-point trapezoid rule at each radius.
pub struct SampledForcing<F> {
    f: F,
    support: (f64, f64),
    n_theta: usize,
    n_keep: i32,
}

impl<F: Fn([f64; 2]) -> C2 + Sync> SampledForcing<F> {
    pub fn new(f: F, support: (f64, f64), n_theta: usize, n_keep: i32) -> Result<Self> {
        if n_keep < 0 || 4 * n_keep as usize > n_theta {
            return Err(Error::Grid(format!(
                "n_keep = {n_keep} needs n_theta >= {}, got {n_theta}",
                4 * n_keep
            )));
        }
        if !(support.0 >= 0.0 && support.1 > support.0) {
            return Err(Error::InvalidParams(format!("bad support {support:?}")));
        }
        Ok(SampledForcing {
            f,
            support,
            n_theta,
            n_keep,
        })
    }
}

impl<F: Fn([f64; 2]) -> C2 + Sync> ModeSource for SampledForcing<F> {
    fn support(&self) -> (f64, f64) {
        self.support
    }

    fn input_modes(&self) -> Vec<i32> {
        (-self.n_keep..=self.n_keep).collect()
    }

    fn mode(&self, m: i32, t: f64) -> C2 {
        let n = self.n_theta;
        let mut acc = C2_ZERO;
        for j in 0..n {
            let phi = TAU * j as f64 / n as f64;
            let v = (self.f)([t * phi.cos(), t * phi.sin()]);
            let e = Complex64::from_polar(1.0 / n as f64, -(m as f64) * phi);
            acc[0] += v[0] * e;
            acc[1] += v[1] * e;
        }
        acc
    }

    fn value(&self, x: [f64; 2]) -> C2 {
        (self.f)(x)
    }
}
