//! Debye leading terms of J_μ, Y_μ below the turning point, with error envelopes.

use std::f64::consts::PI;

use super::bessel::bessel_j;
use super::Order;
use crate::error::{Error, Result};

/// Multiplicative constant in front of the leading J term.
pub const DEBYE_C0: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DebyeFrame {
    pub order: Order,
    pub r: f64,
    pub phi: f64,
    pub alpha: f64,
    pub lead_j: f64,
    pub lead_y: f64,
    pub bound_j: f64,
    pub bound_y: f64,
    /// ln|lead_j|, usable when lead_j underflows.
    pub ln_lead_j: f64,
    /// ln|lead_y|, usable when lead_y overflows.
    pub ln_lead_y: f64,
}

fn check(mu: f64, r: f64) -> Result<()> {
    if !(r > 0.0) || !(r < mu) {
        return Err(Error::Domain(format!(
            "Debye frame needs 0 < r < mu, got mu = {mu}, r = {r}"
        )));
    }
    Ok(())
}

// Returns (α, φ, sqrt(μ² − r²)).
fn alpha_phi(mu: f64, r: f64) -> (f64, f64, f64) {
    let s = ((mu - r) * (mu + r)).sqrt();
    let alpha = ((mu + s - r) / r).ln_1p();
    let phi = if alpha < 1e-2 {
        let a2 = alpha * alpha;
        alpha * a2 * (1.0 / 3.0 - a2 * (2.0 / 15.0 - a2 * 17.0 / 315.0))
    } else {
        alpha - s / mu
    };
    (alpha, phi, s)
}

/// φ_μ(r) = α − tanh α with e^α = (μ + √(μ² − r²))/r.
pub fn debye_phi(order: Order, r: f64) -> Result<f64> {
    let mu = order.value();
    check(mu, r)?;
    Ok(alpha_phi(mu, r).1)
}

/// dφ_μ/dr = −√(μ² − r²)/(μ r).
pub fn debye_phi_derivative(order: Order, r: f64) -> Result<f64> {
    let mu = order.value();
    check(mu, r)?;
    Ok(-((mu - r) * (mu + r)).sqrt() / (mu * r))
}

fn frame_with_c0(order: Order, r: f64, c0: f64) -> Result<DebyeFrame> {
    let mu = order.value();
    check(mu, r)?;
    let (alpha, phi, s) = alpha_phi(mu, r);
    let ln_sqrt_s = 0.5 * s.ln();
    let ln_lead_j = c0.ln() - 0.5 * (2.0 * PI).ln() - mu * phi - ln_sqrt_s;
    let ln_lead_y = 0.5 * (2.0 / PI).ln() + mu * phi - ln_sqrt_s;
    let z = mu.cbrt() / (mu - r);
    let pre = 2.0 / 3.0 * z.powf(1.5);
    Ok(DebyeFrame {
        order,
        r,
        phi,
        alpha,
        lead_j: ln_lead_j.exp(),
        lead_y: -ln_lead_y.exp(),
        bound_j: pre * (2.0 / 3.0 * z.powf(2.0 / 3.0)).exp(),
        bound_y: pre * (2.0 / 3.0 * z.powf(1.5)).exp(),
        ln_lead_j,
        ln_lead_y,
    })
}

pub fn debye_frame(order: Order, r: f64) -> Result<DebyeFrame> {
    frame_with_c0(order, r, DEBYE_C0)
}

/// Ratio J_50(1)/lead_j(c₀ = 1): the constant obtained by matching one point.
pub fn calibrate_debye_c0() -> f64 {
    let o = Order::int(50);
    let f = frame_with_c0(o, 1.0, 1.0).expect("valid reference point");
    bessel_j(o, 1.0).expect("finite J_50(1)") / f.lead_j
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_y;

    #[test]
    fn phi_vanishes_at_turning_point() {
        let o = Order::int(50);
        let phi = debye_phi(o, 50.0 * (1.0 - 1e-12)).unwrap();
        assert!((0.0..1e-6).contains(&phi));
        assert!(debye_frame(o, 50.0).is_err());
        assert!(debye_frame(o, 0.0).is_err());
    }

    #[test]
    fn tanh_alpha_identity() {
        for &(mu, r) in &[(10.0, 0.3), (20.0, 19.9), (50.0, 25.0), (100.0, 1e-3)] {
            let f = debye_frame(Order::try_from_f64(mu).unwrap(), r).unwrap();
            let want = (mu * mu - r * r).sqrt() / mu;
            assert!((f.alpha.tanh() - want).abs() <= 1e-12 * want);
        }
    }

    #[test]
    fn phi_nonincreasing() {
        let o = Order::int(20);
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let p = debye_phi(o, 20.0 * i as f64 / 200.0).unwrap();
            assert!(p <= prev);
            prev = p;
        }
    }

    #[test]
    fn series_branch_matches_direct() {
        let mu = 40.0;
        let r = mu * (1.0 - 2e-5);
        let (a, phi, _) = alpha_phi(mu, r);
        assert!(a < 1e-2);
        let direct = a - a.tanh();
        assert!((phi - direct).abs() < 1e-12 * phi.max(1e-30) + 1e-18);
    }

    #[test]
    fn phi_derivative_matches_difference() {
        let o = Order::int(30);
        let h = 1e-5;
        let fd = (debye_phi(o, 10.0 + h).unwrap() - debye_phi(o, 10.0 - h).unwrap()) / (2.0 * h);
        let d = debye_phi_derivative(o, 10.0).unwrap();
        assert!(((fd - d) / d).abs() < 1e-7);
    }

    #[test]
    fn envelope_contains_error() {
        let o = Order::int(50);
        let f = debye_frame(o, 25.0).unwrap();
        let j = bessel_j(o, 25.0).unwrap();
        assert!((j / f.lead_j - 1.0).abs() <= f.bound_j);
        let y = bessel_y(o, 25.0).unwrap();
        assert!((y / f.lead_y - 1.0).abs() <= f.bound_y);
    }

    #[test]
    fn calibration_close_to_one() {
        let c = calibrate_debye_c0();
        assert!((c - 1.0).abs() < 5e-3, "c0 = {c}");
    }
}
