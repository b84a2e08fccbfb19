//! Cylinder Bessel functions J, Y and the Hankel function H⁽¹⁾ = J + iY.
//!
//! Values are produced in a scaled form `mant · e^log` so that products such as
//! H_{μ+2}(t)·J_μ(r) stay representable when each factor alone would not.

use std::f64::consts::{LN_10, PI};

use num_complex::Complex64;

use super::gamma::{factorial, gamma, ln_gamma, EULER_GAMMA};
use super::{Order, MAX_TWICE_ORDER};
use crate::error::{Error, Result};

const RESCALE: f64 = 1e200;
const LN_RESCALE: f64 = 200.0 * LN_10;
/// Integer orders switch from the ascending series for Y₀, Y₁ at this argument.
const Y_SERIES_LIMIT: f64 = 8.0;

/// A real number represented as `mant · exp(log)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub mant: f64,
    pub log: f64,
}

impl Scaled {
    pub const fn exact(v: f64) -> Self {
        Scaled { mant: v, log: 0.0 }
    }

    pub fn value(self) -> f64 {
        if self.mant == 0.0 || self.log == 0.0 {
            return self.mant;
        }
        self.mant.signum() * (self.mant.abs().ln() + self.log).exp()
    }

    pub fn ln_abs(self) -> f64 {
        self.mant.abs().ln() + self.log
    }

    fn negate_if(self, flip: bool) -> Self {
        if flip {
            Scaled {
                mant: -self.mant,
                log: self.log,
            }
        } else {
            self
        }
    }
}

/// A complex number represented as `mant · exp(log)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledComplex {
    pub mant: Complex64,
    pub log: f64,
}

impl ScaledComplex {
    pub fn value(self) -> Complex64 {
        if self.log == 0.0 || self.mant == Complex64::new(0.0, 0.0) {
            return self.mant;
        }
        Complex64::from_polar((self.mant.norm().ln() + self.log).exp(), self.mant.arg())
    }

    pub fn ln_abs(self) -> f64 {
        self.mant.norm().ln() + self.log
    }

    pub fn mul(self, o: ScaledComplex) -> ScaledComplex {
        ScaledComplex {
            mant: self.mant * o.mant,
            log: self.log + o.log,
        }
    }

    pub fn mul_real(self, o: Scaled) -> ScaledComplex {
        ScaledComplex {
            mant: self.mant * o.mant,
            log: self.log + o.log,
        }
    }
}

fn check_order(order: Order) -> Result<()> {
    if order.twice().abs() > MAX_TWICE_ORDER {
        return Err(Error::Domain(format!("order {order} exceeds supported range")));
    }
    Ok(())
}

fn check_arg(x: f64, allow_zero: bool) -> Result<()> {
    if !x.is_finite() || x < 0.0 || (!allow_zero && x == 0.0) {
        return Err(Error::Domain(format!("argument x = {x} out of range")));
    }
    Ok(())
}

// Ascending series, ν ≥ 0, x > 0.
fn j_series(nu: f64, x: f64) -> Scaled {
    let q = 0.25 * x * x;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut peak = 1.0_f64;
    for k in 1..2000 {
        let kf = k as f64;
        term *= -q / (kf * (nu + kf));
        sum += term;
        peak = peak.max(term.abs());
        if term.abs() <= 1e-17 * sum.abs() || term.abs() <= 1e-34 * peak {
            break;
        }
    }
    if nu < 160.0 {
        let pref = (0.5 * x).powf(nu) / gamma(nu + 1.0);
        if pref.is_normal() && pref < 1e250 {
            return Scaled::exact(sum * pref);
        }
    }
    Scaled {
        mant: sum,
        log: nu * (0.5 * x).ln() - ln_gamma(nu + 1.0),
    }
}

fn miller_start(nu: f64, x: f64) -> usize {
    let base = nu.max(x);
    let m = (base + 30.0 + 10.0 * base.cbrt()).ceil() as usize;
    m + (m % 2)
}

/// Normalized J₀…J_m(x) by Miller's downward recurrence (m even, x > 0).
fn j_int_sequence(x: f64, m: usize) -> Vec<f64> {
    let mut v = vec![0.0; m + 2];
    v[m] = 1.0;
    for k in (1..=m).rev() {
        v[k - 1] = (2.0 * k as f64 / x) * v[k] - v[k + 1];
        if v[k - 1].abs() > RESCALE {
            for e in &mut v[k - 1..] {
                *e /= RESCALE;
            }
        }
    }
    let mut norm = v[0];
    for k in (2..=m).step_by(2) {
        norm += 2.0 * v[k];
    }
    v.truncate(m + 1);
    for e in &mut v {
        *e /= norm;
    }
    v
}

// Half-integer orders ν = k + 1/2 by downward recurrence, normalized by the
// closed forms J_{1/2} = √(2/πx) sin x, J_{−1/2} = √(2/πx) cos x.
fn j_half_miller(twice: i32, x: f64) -> f64 {
    let target = ((twice + 1) / 2) as usize; // index i = k + 1
    let nu = 0.5 * twice as f64;
    let kmax = miller_start(nu, x);
    let mut v = vec![0.0; kmax + 3];
    v[kmax + 1] = 1.0;
    for i in (1..=kmax + 1).rev() {
        let order = i as f64 - 0.5;
        v[i - 1] = (2.0 * order / x) * v[i] - v[i + 1];
        if v[i - 1].abs() > RESCALE {
            for e in &mut v[i - 1..] {
                *e /= RESCALE;
            }
        }
    }
    let amp = (2.0 / (PI * x)).sqrt();
    let (s, c) = x.sin_cos();
    let scale = if s.abs() >= c.abs() {
        amp * s / v[1]
    } else {
        amp * c / v[0]
    };
    v[target] * scale
}

fn j_nonneg(twice: i32, x: f64) -> Scaled {
    let nu = 0.5 * twice as f64;
    if x == 0.0 {
        return Scaled::exact(if twice == 0 { 1.0 } else { 0.0 });
    }
    if x <= Y_SERIES_LIMIT.max(0.5 * nu) {
        return j_series(nu, x);
    }
    if twice % 2 == 0 {
        let n = (twice / 2) as usize;
        let seq = j_int_sequence(x, miller_start(nu, x));
        Scaled::exact(seq[n])
    } else {
        Scaled::exact(j_half_miller(twice, x))
    }
}

/// Y_n(x) from the ascending series with digamma coefficients (integer n, x > 0).
pub fn bessel_y_int_series(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let q = h * h;
    let nf = n as f64;
    let mut finite = 0.0;
    let mut qk = 1.0;
    for k in 0..n {
        finite += factorial(n - k - 1) / factorial(k) * qk;
        qk *= q;
    }
    finite *= -h.powi(-(n as i32)) / PI;

    let jn = j_series(nf, x).value();
    let log_part = 2.0 / PI * h.ln() * jn;

    // ψ(k+1) + ψ(n+k+1), updated incrementally
    let mut psi_a = -EULER_GAMMA;
    let mut psi_b = -EULER_GAMMA + (1..=n).map(|j| 1.0 / j as f64).sum::<f64>();
    let mut term = 1.0 / factorial(n);
    let mut sum = (psi_a + psi_b) * term;
    for k in 1..500 {
        let kf = k as f64;
        term *= -q / (kf * (nf + kf));
        psi_a += 1.0 / kf;
        psi_b += 1.0 / (nf + kf);
        let t = (psi_a + psi_b) * term;
        sum += t;
        if t.abs() <= 1e-18 * sum.abs().max(1e-300) && kf > q.sqrt() {
            break;
        }
    }
    let series = -h.powi(n as i32) / PI * sum;
    finite + log_part + series
}

// Neumann expansions of Y₀, Y₁ in terms of the normalized J sequence.
fn y01_neumann(x: f64) -> (f64, f64) {
    let m = miller_start(1.0, x);
    let j = j_int_sequence(x, m);
    let l = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k < m {
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        let kf = k as f64;
        s0 += sign * j[2 * k] / kf;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / kf;
        k += 1;
    }
    let y0 = 2.0 / PI * (l * j[0] - 2.0 * s0);
    let y1 = 2.0 / PI * (-j[0] / x + l * j[1] + s1);
    (y0, y1)
}

// Upward recurrence from (G_{ν−1}, G_ν) for `steps` steps, with rescaling.
fn upward(mut prev: f64, mut cur: f64, nu: f64, steps: u32, x: f64) -> Scaled {
    let mut log = 0.0;
    for i in 0..steps {
        let order = nu + i as f64;
        let next = (2.0 * order / x) * cur - prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            log += LN_RESCALE;
        }
    }
    Scaled { mant: cur, log }
}

fn y_nonneg(twice: i32, x: f64) -> Scaled {
    if twice % 2 == 0 {
        let n = (twice / 2) as u32;
        let (y0, y1) = if x <= Y_SERIES_LIMIT {
            (bessel_y_int_series(0, x), bessel_y_int_series(1, x))
        } else {
            y01_neumann(x)
        };
        match n {
            0 => Scaled::exact(y0),
            1 => Scaled::exact(y1),
            _ => upward(y0, y1, 1.0, n - 1, x),
        }
    } else {
        let amp = (2.0 / (PI * x)).sqrt();
        let (s, c) = x.sin_cos();
        let y_mhalf = amp * s;
        let y_half = -amp * c;
        let k = ((twice - 1) / 2) as u32;
        if k == 0 {
            Scaled::exact(y_half)
        } else {
            upward(y_mhalf, y_half, 0.5, k, x)
        }
    }
}

/// J_μ(x) in scaled form.
pub fn bessel_j_scaled(order: Order, x: f64) -> Result<Scaled> {
    check_order(order)?;
    check_arg(x, true)?;
    let tw = order.twice();
    if tw >= 0 {
        return Ok(j_nonneg(tw, x));
    }
    if order.is_integer() {
        let n = -tw / 2;
        return Ok(j_nonneg(-tw, x).negate_if(n % 2 == 1));
    }
    // J_{−(n+1/2)} = (−1)^{n+1} Y_{n+1/2}
    if x == 0.0 {
        return Err(Error::Domain(format!(
            "J of negative half-integer order {order} is singular at x = 0"
        )));
    }
    let n = (-tw - 1) / 2;
    Ok(y_nonneg(-tw, x).negate_if(n % 2 == 0))
}

pub fn bessel_j(order: Order, x: f64) -> Result<f64> {
    let v = bessel_j_scaled(order, x)?.value();
    if !v.is_finite() {
        return Err(Error::Overflow {
            what: "bessel_j",
            order: order.value(),
            x,
        });
    }
    Ok(v)
}

/// Y_μ(x) in scaled form (x > 0).
pub fn bessel_y_scaled(order: Order, x: f64) -> Result<Scaled> {
    check_order(order)?;
    check_arg(x, false)?;
    let tw = order.twice();
    if tw >= 0 {
        return Ok(y_nonneg(tw, x));
    }
    if order.is_integer() {
        let n = -tw / 2;
        return Ok(y_nonneg(-tw, x).negate_if(n % 2 == 1));
    }
    // Y_{−(n+1/2)} = (−1)^n J_{n+1/2}
    let n = (-tw - 1) / 2;
    Ok(j_nonneg(-tw, x).negate_if(n % 2 == 1))
}

pub fn bessel_y(order: Order, x: f64) -> Result<f64> {
    let v = bessel_y_scaled(order, x)?.value();
    if !v.is_finite() {
        return Err(Error::Overflow {
            what: "bessel_y",
            order: order.value(),
            x,
        });
    }
    Ok(v)
}

/// H⁽¹⁾_μ(x) in scaled form with a common exponent.
pub fn hankel1_scaled(order: Order, x: f64) -> Result<ScaledComplex> {
    let j = bessel_j_scaled(order, x)?;
    let y = bessel_y_scaled(order, x)?;
    let log = if j.mant == 0.0 {
        y.log
    } else if y.mant == 0.0 {
        j.log
    } else {
        j.log.max(y.log)
    };
    let re = if j.mant == 0.0 {
        0.0
    } else {
        j.mant * (j.log - log).exp()
    };
    let im = if y.mant == 0.0 {
        0.0
    } else {
        y.mant * (y.log - log).exp()
    };
    Ok(ScaledComplex {
        mant: Complex64::new(re, im),
        log,
    })
}

pub fn hankel1(order: Order, x: f64) -> Result<Complex64> {
    let j = bessel_j(order, x)?;
    let y = bessel_y(order, x)?;
    Ok(Complex64::new(j, y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgKind {
    First,
    Second,
}

/// Leading small-argument term: (r/2)^μ/Γ(μ+1) for J, −(1/π)(r/2)^{−μ}Γ(μ) for Y.
pub fn small_arg_leading(order: Order, kind: ArgKind, r: f64) -> Result<f64> {
    let mu = order.value();
    if mu < 1.0 || !(r > 0.0) || r >= 2.0 * mu.sqrt() {
        return Err(Error::Domain(format!(
            "small-argument form needs mu >= 1 and 0 < r < 2 sqrt(mu), got mu = {mu}, r = {r}"
        )));
    }
    let h = 0.5 * r;
    let v = match kind {
        ArgKind::First => (mu * h.ln() - ln_gamma(mu + 1.0)).exp(),
        ArgKind::Second => -(-mu * h.ln() + ln_gamma(mu)).exp() / PI,
    };
    if !v.is_finite() {
        return Err(Error::Overflow {
            what: "small_arg_leading",
            order: mu,
            x: r,
        });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(mu: f64, x: f64) -> f64 {
        bessel_j(Order::try_from_f64(mu).unwrap(), x).unwrap()
    }
    fn y(mu: f64, x: f64) -> f64 {
        bessel_y(Order::try_from_f64(mu).unwrap(), x).unwrap()
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(j(0.0, 0.0), 1.0);
        assert_eq!(j(1.0, 0.0), 0.0);
        assert_eq!(j(2.5, 0.0), 0.0);
        assert!(bessel_j(Order::half(-1), 0.0).is_err());
        assert!(bessel_y(Order::int(0), 0.0).is_err());
        assert!(bessel_j(Order::int(0), -1.0).is_err());
    }

    #[test]
    fn first_zero_of_j0() {
        assert!(j(0.0, 2.404_825_557_695_773).abs() < 1e-12);
    }

    #[test]
    fn half_integer_closed_forms() {
        for &x in &[0.3, 1.0, 7.7, 13.0, 90.0] {
            let amp = (2.0 / (PI * x)).sqrt();
            assert!((j(0.5, x) - amp * x.sin()).abs() < 1e-14 * amp.max(1.0));
            assert!((j(-0.5, x) - amp * x.cos()).abs() < 1e-14 * amp.max(1.0));
            assert!((y(0.5, x) + amp * x.cos()).abs() < 1e-14 * amp.max(1.0));
            let j32 = amp * (x.sin() / x - x.cos());
            assert!((j(1.5, x) - j32).abs() < 1e-12 * amp.max(1.0), "x={x}");
        }
        assert!(y(0.5, PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn reflection_exact() {
        for n in 0..8 {
            for &x in &[0.5, 3.0, 20.0] {
                let a = j(-(n as f64), x);
                let b = j(n as f64, x);
                assert_eq!(a, if n % 2 == 0 { b } else { -b });
            }
        }
    }

    #[test]
    fn series_y_matches_recurrence() {
        for n in 2..10u32 {
            for &x in &[0.7, 3.0, 7.5] {
                let s = bessel_y_int_series(n, x);
                let r = y(n as f64, x);
                assert!(((s - r) / r).abs() < 1e-11, "n={n} x={x} {s} {r}");
            }
        }
    }

    #[test]
    fn neumann_branch_continuous_with_series() {
        let (a0, a1) = y01_neumann(8.0);
        assert!((a0 - bessel_y_int_series(0, 8.0)).abs() < 1e-13);
        assert!((a1 - bessel_y_int_series(1, 8.0)).abs() < 1e-13);
    }

    #[test]
    fn scaled_forms_avoid_overflow() {
        let o = Order::int(150);
        let ys = bessel_y_scaled(o, 0.5).unwrap();
        assert!(ys.ln_abs() > 700.0);
        assert!(bessel_y(o, 0.5).is_err());
        let js = bessel_j_scaled(o, 0.5).unwrap();
        let prod = ys.ln_abs() + js.ln_abs();
        // J_νY_ν ≈ −1/(πν) for small argument
        assert!((prod - (1.0 / (PI * 150.0)).ln()).abs() < 1e-2);
    }

    #[test]
    fn small_arg_examples() {
        let v = small_arg_leading(Order::int(2), ArgKind::First, 0.1).unwrap();
        assert!((v - 0.00125).abs() < 1e-15);
        assert!(small_arg_leading(Order::int(2), ArgKind::First, 3.0).is_err());
        let lead = small_arg_leading(Order::int(20), ArgKind::First, 1.0).unwrap();
        let bound = 2.0 * 0.5f64.powi(22) / gamma(22.0);
        assert!((j(20.0, 1.0) - lead).abs() <= bound);
        let ly = small_arg_leading(Order::int(3), ArgKind::Second, 0.5).unwrap();
        let yv = y(3.0, 0.5);
        assert!(((yv - ly) / yv).abs() <= 10.0 * 0.25f64.powi(2) * gamma(2.0) / gamma(3.0));
    }
}
