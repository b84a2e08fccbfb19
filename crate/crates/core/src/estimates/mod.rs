//! Numerical corroboration of the weighted a priori estimates: the solution and
//! gradient ratios against |||V|||², the two-speed Hankel–Bessel double integrals
//! over the regions D1–D5, the lemma sweeps and the near-origin cancellation.
//!
//! Constants in the inequalities are not known, so bounds are checked against
//! envelopes frozen from the first build (see [`frozen`]).

mod integral;
mod lemmas;
mod regions;
mod thm;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::Order;
use crate::weights::RadialWeight;

pub use integral::{integrate_kernel, integrate_pieces, IntegralOptions, IntegralReport, PairKernel, ProductKernel};
pub use lemmas::{
    band_piece, band_single_term, f_mu_evidence, f_mu_max_over_mu, hmu_max, lemma_rows, lemma_sweep, ln_f_mu,
    ln_hmu, ln_hmu_factors, staircase_sum, HmuReport, LemmaId, LemmaRow,
};
pub use regions::{Piece, RegionSpec, RegionTag};
pub use thm::{
    params_hash, thm1_ratio, thm2_ratio, thm2_ratio_helmholtz, weighted_l2_field, thm1_ratio_with, RatioReport, ThmOptions,
};

/// Envelopes and regression values recorded on the first build. Sweeps use a = √2.
/// Checks compare against these with a relative slack of 1e−6.
pub mod frozen {
    /// thm1_ratio for bump n=0, r0=1, w=0.25, λ=μ=1, ω=1, V = gauss:sigma=1.
    pub const THM1_REGRESSION: f64 = 4.236_907_747_497_834e-2;
    /// Largest thm1_ratio / thm2_ratio over bumps n ∈ {0,1,2} (r0=1, w=0.25), λ=μ=1,
    /// ω ∈ {1/2,1,2,4,8}, V ∈ {gauss:sigma=1, indicator:R=3, gauss:sigma=2}.
    pub const THM1_SWEEP_MAX: f64 = 6.109_854_112_298_854e-2;
    pub const THM2_SWEEP_MAX: f64 = 4.582_177_970_154_715e-2;

    /// Ratios to |||V|||² for V = gauss:sigma=1, maximised over the μ grid.
    pub const L4_3_ORIGIN: f64 = 4.682_002_265_179_198e-7;
    pub const L4_4_BAND: f64 = 4.238_163_860_825_241e-7;
    /// μ = 40 alone, then μ ∈ {20, 40, 80}.
    pub const L4_5_STAIRCASE_MU40: f64 = 1.632_210_313_371_295e-10;
    pub const L4_5_STAIRCASE: f64 = 5.255_532_520_939_294e-7;
    pub const L4_7_SWAPPED: f64 = 4.255_044_131_552_851e-13;

    /// The same with V = gauss:sigma=40, wide enough to reach the turning region.
    pub const L4_3_ORIGIN_WIDE: f64 = 2.074_989_799_224_369e-9;
    pub const L4_4_BAND_WIDE: f64 = 1.604_931_938_148_703e-5;
    pub const L4_5_STAIRCASE_WIDE: f64 = 5.367_567_395_661_888e-4;
    pub const L4_6_UPPER_BAND_WIDE: f64 = 1.787_015_067_496_647e-2;
    pub const L4_7_SWAPPED_WIDE: f64 = 1.753_016_811_885_158e-5;

    /// hmu_max(50, √2); the sequence over μ ∈ {50, 100, 200} is nonincreasing.
    pub const HMU_MAX: f64 = 1.804_988_042_434_492e1;

    /// Relative slack for regression comparisons.
    pub const SLACK: f64 = 1e-6;
}

/// The double integral I over a region: single product when `cancelled` is false,
/// otherwise the two-speed difference with the region's power of a.
pub fn i_integral(
    mu: Order,
    m_shift: i32,
    a: f64,
    w: &RadialWeight,
    region: &RegionSpec,
    cancelled: bool,
) -> Result<IntegralReport> {
    i_integral_with(mu, m_shift, a, w, region, cancelled, &IntegralOptions::default())
}

pub fn i_integral_with(
    mu: Order,
    m_shift: i32,
    a: f64,
    w: &RadialWeight,
    region: &RegionSpec,
    cancelled: bool,
    opts: &IntegralOptions,
) -> Result<IntegralReport> {
    if m_shift != 2 && m_shift != -2 {
        return Err(Error::InvalidParams(format!("m_shift must be +2 or -2, got {m_shift}")));
    }
    if region.a != a || region.mu != mu.value() {
        return Err(Error::InvalidParams(format!(
            "region built for (mu, a) = ({}, {}) used with ({mu}, {a})",
            region.mu, region.a
        )));
    }
    let cap = region.t_max();
    let hankel = mu.shift(m_shift);
    let kernel = ProductKernel {
        bessel: mu,
        hankel,
        cancel: cancelled.then_some((a, region.a_power())),
    };
    integrate_pieces(&region.pieces(), kernel, w, cap, opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CancellationRow {
    pub eps: f64,
    pub uncancelled: f64,
    pub cancelled: f64,
}

/// The D1 integrals of |H_{n+2}(t)J_n(r)|² and of the a²-difference, restricted to r > ε,
/// with V the indicator of [0, 1 + 1/(2a)].
pub fn cancellation_demo(n: u32, a: f64, eps_grid: &[f64]) -> Result<Vec<CancellationRow>> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("cancellation demo needs n >= 2, got {n}")));
    }
    if !(a >= 1.0) {
        return Err(Error::InvalidParams(format!("a must be at least 1, got {a}")));
    }
    if eps_grid.iter().any(|&e| !(e > 0.0)) || eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParams("eps grid must be positive and decreasing".into()));
    }
    let w = RadialWeight::indicator(1.0 + 0.5 / a)?;
    let o = Order::int(n as i32);
    let pieces = [Piece::triangle(0.0, 1.0 + 0.5 / a)];
    eps_grid
        .iter()
        .map(|&eps| {
            let opts = IntegralOptions {
                eps,
                ..IntegralOptions::default()
            };
            let single = ProductKernel {
                bessel: o,
                hankel: o.shift(2),
                cancel: None,
            };
            let cancel = ProductKernel {
                cancel: Some((a, 2)),
                ..single
            };
            let u = integrate_pieces(&pieces, single, &w, f64::INFINITY, &opts)?.value;
            let c = integrate_pieces(&pieces, cancel, &w, f64::INFINITY, &opts)?.value;
            Ok(CancellationRow {
                eps,
                uncancelled: u,
                cancelled: c,
            })
        })
        .collect()
}
