use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::integral::{integrate_kernel, integrate_pieces, log_integral, IntegralOptions, PairKernel, ProductKernel};
use super::regions::Piece;
use crate::error::{Error, Result};
use crate::specfun::{bessel_j_scaled, hankel1_scaled, Order};
use crate::weights::RadialWeight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LemmaId {
    L4_2,
    L4_3,
    L4_4,
    L4_5,
    L4_6,
    L4_7,
}

impl LemmaId {
    pub const ALL: [LemmaId; 6] = [
        LemmaId::L4_2,
        LemmaId::L4_3,
        LemmaId::L4_4,
        LemmaId::L4_5,
        LemmaId::L4_6,
        LemmaId::L4_7,
    ];
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .into_iter()
            .find(|l| l.to_string() == s)
            .ok_or_else(|| Error::Parse(format!("unknown lemma {s:?}")))
    }
}

/// One row of a sweep table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaRow {
    pub lemma: LemmaId,
    pub mu: f64,
    pub a: f64,
    pub region: String,
    pub value: f64,
    pub mt_norm_sq: f64,
    pub ratio: f64,
    pub quad_err: f64,
}

fn order_of(mu: f64) -> Result<Order> {
    Order::try_from_f64(mu)
}

fn check_a(a: f64) -> Result<()> {
    if a > 1.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("speed ratio a must exceed 1, got {a}")))
    }
}

/// r ∈ (1 − 1/(2a), μ/(2a)), r < t < r + 1/a.
pub fn band_piece(mu: f64, a: f64) -> Piece {
    let r0 = 1.0 - 0.5 / a;
    let r1 = mu / (2.0 * a);
    Piece {
        t0: r0,
        t1: r1 + 1.0 / a,
        lo: r0,
        lo_shift: 1.0 / a,
        hi: r1,
        hi_shift: 0.0,
    }
}

/// ln f_μ(r, t) for the Debye ratio
/// f_μ = ((μ+2+S_t)/(μ+S_r))^μ e^{S_r − S_t} (μ+2+S_t)² / (S_r S_t)^{1/2},
/// S_r = √(μ² − r²), S_t = √((μ+2)² − t²).
pub fn ln_f_mu(mu: f64, r: f64, t: f64) -> Result<f64> {
    let m2 = mu + 2.0;
    if !(r >= 0.0 && r < mu && t >= 0.0 && t < m2) {
        return Err(Error::Domain(format!("f_mu needs r < mu and t < mu + 2, got ({r}, {t})")));
    }
    let sr = (mu * mu - r * r).sqrt();
    let st = (m2 * m2 - t * t).sqrt();
    Ok(mu * ((m2 + st) / (mu + sr)).ln() + sr - st + 2.0 * (m2 + st).ln() - 0.5 * (sr.ln() + st.ln()))
}

/// max |f_μ|/μ over 0 < r < μ/2, r < t < r + 1 on a 200×20 grid.
pub fn f_mu_max_over_mu(mu: f64) -> Result<f64> {
    let mut best = 0.0f64;
    for i in 1..=200 {
        let r = 0.5 * mu * i as f64 / 201.0;
        for j in 0..20 {
            let t = r + (j as f64 + 0.5) / 20.0;
            best = best.max(ln_f_mu(mu, r, t)?.exp());
        }
    }
    Ok(best / mu)
}

/// |D^{2,1}|² = (r/t)^{2μ} t^{−4} (f_μ(r,t) − f_μ(ar,at))².
struct SingleTerm {
    mu: f64,
    a: f64,
}

impl PairKernel for SingleTerm {
    type AtT = ();

    fn orders(&self) -> (f64, f64) {
        (self.mu, self.mu + 2.0)
    }

    fn at_t(&self, _: f64) -> Result<()> {
        Ok(())
    }

    fn eval(&self, _: &(), r: f64, t: f64) -> Result<f64> {
        let l1 = ln_f_mu(self.mu, r, t)?;
        let l2 = ln_f_mu(self.mu, self.a * r, self.a * t)?;
        let d = (l2 - l1).exp_m1().abs();
        if d == 0.0 {
            return Ok(0.0);
        }
        Ok((2.0 * (l1 + d.ln() + self.mu * (r / t).ln()) - 4.0 * t.ln()).exp())
    }
}

/// The band integral of |D^{2,1}|² against tV(t) rV(r): the single term that carries
/// the μ^{−1/2} decay.
pub fn band_single_term(mu: f64, a: f64, w: &RadialWeight) -> Result<(f64, f64)> {
    check_a(a)?;
    let rep = integrate_kernel(
        &[band_piece(mu, a)],
        &SingleTerm { mu, a },
        a,
        w,
        f64::INFINITY,
        &IntegralOptions::default(),
    )?;
    Ok((rep.value, rep.quad_err))
}

/// ln h_μ(m) with x_m = 1 + (m−1)/(2a), y_m = 1 + m/(2a):
/// h = x y μ^{−2} e^{−2μφ_μ(x)} e^{2(μ+2)φ_{μ+2}(y)}.
pub fn ln_hmu(mu: f64, a: f64, m: u32) -> Result<f64> {
    let x = 1.0 + (m as f64 - 1.0) / (2.0 * a);
    let y = 1.0 + m as f64 / (2.0 * a);
    let phi = |nu: f64, r: f64| -> f64 {
        // φ_ν(r) = ln((ν + √(ν² − r²))/r) − √(ν² − r²)/ν
        let s = (nu * nu - r * r).sqrt();
        ((nu + s) / r).ln() - s / nu
    };
    if !(x > 0.0 && y < mu) {
        return Err(Error::Domain(format!("h_mu({m}) outside 0 < x, y < mu")));
    }
    Ok(x.ln() + y.ln() - 2.0 * mu.ln() - 2.0 * mu * phi(mu, x) + 2.0 * (mu + 2.0) * phi(mu + 2.0, y))
}

/// ln f_μ(x) + ln g_μ(x) for the two increasing factors bounding h_μ(m) at x = m/(2a).
pub fn ln_hmu_factors(mu: f64, a: f64, x: f64) -> (f64, f64) {
    let m2 = mu + 2.0;
    let f = (2.0 * mu + 1.0) * (1.0 - 1.0 / (2.0 * a * (1.0 + x))).ln() + 4.0 * (2.0 * m2).ln()
        - 2.0 * mu.ln()
        - 2.0 * (1.0 + x).ln();
    let y = 1.0 + x;
    let g = 2.0 * mu * ((m2 + (m2 * m2 - y * y).sqrt()).ln() - (mu + (mu * mu - y * y).sqrt()).ln());
    (f, g)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HmuReport {
    pub mu: f64,
    pub a: f64,
    pub max: f64,
    pub argmax: u32,
    pub n: u32,
}

/// max over m ∈ {0, …, ⌊μ − 2a⌋} of h_μ(m), evaluated in log form.
pub fn hmu_max(mu: f64, a: f64) -> Result<HmuReport> {
    check_a(a)?;
    if !(mu > 2.0 * a + 2.0) {
        return Err(Error::InvalidParams(format!("hmu_max needs mu > 2a + 2, got mu = {mu}")));
    }
    let n = (mu - 2.0 * a).floor() as u32;
    let mut best = (f64::NEG_INFINITY, 0);
    for m in 0..=n {
        let l = ln_hmu(mu, a, m)?;
        if l > best.0 {
            best = (l, m);
        }
    }
    Ok(HmuReport {
        mu,
        a,
        max: best.0.exp(),
        argmax: best.1,
        n,
    })
}

/// Σ_m L_m with L_m = ∫_0^{x_m}|J_μ|²Vr dr · ∫_{y_m}^{y_{m+1}}|H_{μ+2}|²Vt dt (last t-range open).
pub fn staircase_sum(mu: f64, a: f64, w: &RadialWeight) -> Result<(f64, f64)> {
    check_a(a)?;
    let o = order_of(mu)?;
    let n = (mu - 2.0 * a).floor();
    if n < 0.0 {
        return Err(Error::InvalidParams(format!("staircase needs mu >= 2a, got {mu}")));
    }
    let n = n as u32;
    let knots = w.knots();
    let jf = |r: f64| -> Result<(f64, f64)> {
        let j = bessel_j_scaled(o, r)?;
        Ok((w.eval(r) * r, 2.0 * j.ln_abs()))
    };
    let hf = |t: f64| -> Result<(f64, f64)> {
        let h = hankel1_scaled(o.shift(2), t)?;
        Ok((w.eval(t) * t, 2.0 * h.ln_abs()))
    };
    let range = w.effective_range();
    let t_end = range.min(mu + 2.0 + (10.0 * (mu + 2.0).cbrt()).max(50.0));
    let rows = (0..=n)
        .into_par_iter()
        .map(|m| -> Result<(f64, f64)> {
            let x = 1.0 + (m as f64 - 1.0) / (2.0 * a);
            let y0 = 1.0 + m as f64 / (2.0 * a);
            let y1 = if m == n { t_end } else { 1.0 + (m as f64 + 1.0) / (2.0 * a) };
            let xr = x.min(range);
            let (lj, ej) = log_integral(&jf, 0.0, xr, xr / (2.0 * mu + 2.0), &knots)?;
            let (lh, eh) = log_integral(&hf, y0, y1.min(range), y0 / (2.0 * mu + 4.0), &knots)?;
            let l = lj + lh;
            Ok((if l.is_finite() { l.exp() } else { 0.0 }, ej + eh))
        })
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = rows.iter().map(|r| r.0).sum();
    let err = rows.iter().map(|r| r.0 * r.1).sum::<f64>();
    Ok((total, err))
}

/// Left side of each lemma, relative to |||V|||².
pub fn lemma_rows(id: LemmaId, mu: f64, a: f64, w: &RadialWeight) -> Result<Vec<LemmaRow>> {
    check_a(a)?;
    let mt = w.mt_norm()?.mt_norm;
    let mt2 = mt * mt;
    let o = order_of(mu)?;
    let opts = IntegralOptions::default();
    let turning = mu + 2.0 - (mu + 2.0).cbrt();
    let cap = mu + 2.0 + (10.0 * (mu + 2.0).cbrt()).max(50.0);
    let row = |region: &str, value: f64, quad_err: f64| LemmaRow {
        lemma: id,
        mu,
        a,
        region: region.to_string(),
        value,
        mt_norm_sq: mt2,
        ratio: value / mt2,
        quad_err,
    };
    let product = |bessel: Order, hankel: Order, cancel: Option<(f64, i32)>, pieces: &[Piece]| {
        integrate_pieces(pieces, ProductKernel { bessel, hankel, cancel }, w, cap, &opts)
    };
    let out = match id {
        LemmaId::L4_2 => {
            let mut v = Vec::new();
            for (label, nu) in [("full:nu=mu+2", o.shift(2)), ("full:nu=mu-2", o.shift(-2))] {
                let rep = product(o, nu, Some((a, 2)), &[Piece::triangle(0.0, f64::INFINITY)])?;
                v.push(row(label, rep.value, rep.quad_err));
            }
            v
        }
        LemmaId::L4_3 => {
            let rep = product(o, o.shift(2), Some((a, 2)), &[Piece::triangle(0.0, 1.0 + 0.5 / a)])?;
            vec![row("origin", rep.value, rep.quad_err)]
        }
        LemmaId::L4_4 => {
            let rep = product(o, o.shift(2), Some((a, 2)), &[band_piece(mu, a)])?;
            let (single, err) = band_single_term(mu, a, w)?;
            vec![row("band", rep.value, rep.quad_err), row("band:single", single, err)]
        }
        LemmaId::L4_5 => {
            let (v, err) = staircase_sum(mu, a, w)?;
            vec![row("staircase", v, err)]
        }
        LemmaId::L4_6 => {
            let c = mu / (2.0 * a) - 1.0 / a;
            let piece = Piece {
                lo: c,
                ..Piece::triangle(c, turning)
            };
            let rep = product(o, o.shift(2), None, &[piece])?;
            vec![row("upper-band", rep.value, rep.quad_err)]
        }
        LemmaId::L4_7 => {
            let piece = Piece::triangle(0.0, mu - mu.cbrt());
            let rep = product(o.shift(2), o, None, &[piece])?;
            vec![row("swapped", rep.value, rep.quad_err)]
        }
    };
    Ok(out)
}

/// Rows for every μ in the grid, in grid order.
pub fn lemma_sweep(id: LemmaId, mu_grid: &[f64], a: f64, w: &RadialWeight) -> Result<Vec<LemmaRow>> {
    let mut out = Vec::new();
    for &mu in mu_grid {
        out.extend(lemma_rows(id, mu, a, w)?);
    }
    Ok(out)
}

/// Evidence for |f_μ| ≲ μ: the largest |f_μ|/μ over the sweep.
pub fn f_mu_evidence(mu_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    mu_grid.iter().map(|&mu| Ok((mu, f_mu_max_over_mu(mu)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi_check(mu: f64, r: f64) -> Result<f64> {
        crate::specfun::debye_phi(order_of(mu)?, r)
    }

    #[test]
    fn phi_closed_form_matches_debye_frame() {
        for (mu, r) in [(20.0, 1.5), (40.0, 10.0), (80.0, 3.0)] {
            let s: f64 = mu * mu - r * r;
            let closed = ((mu + s.sqrt()) / r).ln() - s.sqrt() / mu;
            assert!((closed - phi_check(mu, r).unwrap()).abs() <= 1e-12 * closed.abs());
        }
    }

    #[test]
    fn hmu_rejects_a_equal_one() {
        assert!(hmu_max(50.0, 1.0).is_err());
        assert!(hmu_max(3.0, 1.5).is_err());
    }

    #[test]
    fn f_mu_matches_product_of_debye_leading_terms() {
        // r^μ t^{−μ−2} f_μ(r,t) = F_μ(r,t) = e^{−μφ_μ(r)} e^{(μ+2)φ_{μ+2}(t)} / ((μ²−r²)(μ+2)²−t²))^{1/4}
        let (mu, r, t): (f64, f64, f64) = (30.0, 2.0, 2.6);
        let lhs = mu * r.ln() - (mu + 2.0) * t.ln() + ln_f_mu(mu, r, t).unwrap();
        let rhs = -mu * phi_check(mu, r).unwrap() + (mu + 2.0) * phi_check(mu + 2.0, t).unwrap()
            - 0.25 * (mu * mu - r * r).ln()
            - 0.25 * ((mu + 2.0).powi(2) - t * t).ln();
        assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs(), "{lhs} {rhs}");
    }
}
