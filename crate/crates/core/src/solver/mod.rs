//! Outgoing solutions of Δ*u + ω²u = σf in the plane by angular-mode
//! decomposition, with the p/s split, residual and radiation diagnostics.
//!
//! Fields are stored as Bessel and Hankel mode atoms G_m(kr)e^{imθ}·c, so
//! gradients and ∇div are applied through the exact derivative recurrences.

mod fd;
mod forcing;
mod grid;
mod modes;
mod outgoing;

use num_complex::Complex64;

use crate::fundsol::Mat2C;

pub use fd::{
    fd_d1, fd_d2, fd_divergence, helmholtz_fd_residual, ps_decompose, residual_check,
    vector_helmholtz_residual, PsFields, FD_HALF_WIDTH,
};
pub use forcing::{Bump, ModeSource, SampledForcing};
pub use grid::{angular_decompose, synthesize, AngularSpectrum, GridField, PolarGrid};
pub use modes::{
    cyl_wave, cyl_wave_grad, gradient_modes, helmholtz_mode_solve, helmholtz_mode_solve_d, mode_solve, mode_solve_with,
    solve, solve_with, CylKind, Jacobian, ModeSolution, Solution, SolverOptions,
};
pub use outgoing::{OutgoingField, OutgoingTerm, RadiationReport};

/// Orientation of the source: u = ∫Φ(·,y)f(y)dy solves Δ*u + ω²u = σf.
pub const SOURCE_SIGN: f64 = -1.0;

/// A complex 2-vector.
pub type C2 = [Complex64; 2];

pub(crate) const C2_ZERO: C2 = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];

pub(crate) fn c2_add(a: C2, b: C2) -> C2 {
    [a[0] + b[0], a[1] + b[1]]
}

pub(crate) fn c2_scale(a: C2, s: Complex64) -> C2 {
    [a[0] * s, a[1] * s]
}

pub(crate) fn c2_norm(a: C2) -> f64 {
    (a[0].norm_sqr() + a[1].norm_sqr()).sqrt()
}

pub(crate) fn mat_apply(m: &Mat2C, v: C2) -> C2 {
    [
        m.0[0][0] * v[0] + m.0[0][1] * v[1],
        m.0[1][0] * v[0] + m.0[1][1] * v[1],
    ]
}
