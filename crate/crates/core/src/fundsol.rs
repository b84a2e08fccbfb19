//! Navier–Lamé fundamental solution in the plane: the closed Hankel form and the
//! Bessel addition-formula series, plus the scalar radial kernels in 2D and 3D.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{
    bessel_j_scaled, hankel1, hankel1_scaled, spherical_bessel, Order, SphericalKind,
};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const COINCIDENCE: f64 = 1e-12;
const MAX_MODE: i32 = 480;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LameParams {
    pub lam: f64,
    pub mu_shear: f64,
    pub omega: f64,
    pub k_p: f64,
    pub k_s: f64,
}

impl LameParams {
    pub fn new(lam: f64, mu_shear: f64, omega: f64) -> Result<Self> {
        if !(mu_shear > 0.0) || !(2.0 * mu_shear + lam > 0.0) || !lam.is_finite() {
            return Err(Error::InvalidParams(format!(
                "need mu > 0 and 2 mu + lambda > 0, got lambda = {lam}, mu = {mu_shear}"
            )));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParams(format!("omega must be positive, got {omega}")));
        }
        Ok(LameParams {
            lam,
            mu_shear,
            omega,
            k_p: omega / (2.0 * mu_shear + lam).sqrt(),
            k_s: omega / mu_shear.sqrt(),
        })
    }

    /// Same material at another frequency.
    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        Self::new(self.lam, self.mu_shear, omega)
    }

    /// max(k_s, k_p)/min(k_s, k_p).
    pub fn speed_ratio(&self) -> f64 {
        self.k_s.max(self.k_p) / self.k_s.min(self.k_p)
    }
}

pub fn make_params(lam: f64, mu_shear: f64, omega: f64) -> Result<LameParams> {
    LameParams::new(lam, mu_shear, omega)
}

/// A 2×2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2C(pub [[Complex64; 2]; 2]);

impl Mat2C {
    pub const ZERO: Mat2C = Mat2C([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Mat2C = Mat2C([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2C([[a, b], [c, d]])
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    pub fn transpose(&self) -> Mat2C {
        Mat2C([[self.0[0][0], self.0[1][0]], [self.0[0][1], self.0[1][1]]])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max over entries of |a_ij − b_ij|.
    pub fn max_diff(&self, o: &Mat2C) -> f64 {
        (*self - *o).max_abs()
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.0[0][0], self.0[0][1], self.0[1][0], self.0[1][1]]
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, o: Mat2C) -> Mat2C {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, o: Mat2C) -> Mat2C {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] -= o.0[i][j];
            }
        }
        m
    }
}

impl Mul<Complex64> for Mat2C {
    type Output = Mat2C;
    fn mul(self, s: Complex64) -> Mat2C {
        let mut m = self;
        for row in m.0.iter_mut() {
            for e in row.iter_mut() {
                *e *= s;
            }
        }
        m
    }
}

/// H_m⁽¹⁾(a)·J_n(b) evaluated through scaled factors so large orders do not overflow.
pub fn hj_product(m: Order, n: Order, a: f64, b: f64) -> Result<Complex64> {
    let j = bessel_j_scaled(n, b)?;
    if j.mant == 0.0 {
        return Ok(ZERO);
    }
    let h = hankel1_scaled(m, a)?;
    let scale = (h.log + j.log).exp();
    let v = h.mant * (j.mant * scale);
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Overflow {
            what: "hankel-bessel product",
            order: m.value(),
            x: a,
        });
    }
    Ok(v)
}

/// H⁺_{n,n}(r,t) = k_p² H_n(k_p r) J_n(k_p t) + k_s² H_n(k_s r) J_n(k_s t).
pub fn kernel_hplus(n: i32, r: f64, t: f64, p: &LameParams) -> Result<Complex64> {
    let o = Order::int(n);
    Ok(hj_product(o, o, p.k_p * r, p.k_p * t)? * p.k_p.powi(2)
        + hj_product(o, o, p.k_s * r, p.k_s * t)? * p.k_s.powi(2))
}

/// H⁻_{m,n}(r,t) = k_p² H_m(k_p r) J_n(k_p t) − k_s² H_m(k_s r) J_n(k_s t).
pub fn kernel_hminus(m: Order, n: Order, r: f64, t: f64, p: &LameParams) -> Result<Complex64> {
    if p.k_p == p.k_s {
        return Ok(ZERO);
    }
    Ok(hj_product(m, n, p.k_p * r, p.k_p * t)? * p.k_p.powi(2)
        - hj_product(m, n, p.k_s * r, p.k_s * t)? * p.k_s.powi(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wave {
    P,
    S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel3d {
    /// k³ h_{n₁}(kr) j_n(kt) at one wave number.
    H0(Wave),
    /// Two-speed difference k_p³ h_{n₁}(k_p r) j_n(k_p t) − k_s³ h_{n₁}(k_s r) j_n(k_s t).
    Hminus,
}

fn sph_hj(n1: u32, n: u32, k: f64, r: f64, t: f64) -> Result<Complex64> {
    let h = spherical_bessel(SphericalKind::Third, n1, k * r)?;
    let j = spherical_bessel(SphericalKind::First, n, k * t)?.re;
    Ok(h * (j * k.powi(3)))
}

pub fn kernel_3d(kind: Kernel3d, n1: u32, n: u32, r: f64, t: f64, p: &LameParams) -> Result<Complex64> {
    if !(r > 0.0 && t > 0.0) {
        return Err(Error::Domain(format!("radii must be positive, got r = {r}, t = {t}")));
    }
    match kind {
        Kernel3d::H0(Wave::P) => sph_hj(n1, n, p.k_p, r, t),
        Kernel3d::H0(Wave::S) => sph_hj(n1, n, p.k_s, r, t),
        Kernel3d::Hminus => {
            if p.k_p == p.k_s {
                return Ok(ZERO);
            }
            Ok(sph_hj(n1, n, p.k_p, r, t)? - sph_hj(n1, n, p.k_s, r, t)?)
        }
    }
}

// Hessian of x ↦ H₀(k|x|) at d, and its Laplacian −k²H₀.
fn hessian_h0(k: f64, d: [f64; 2]) -> Result<(Mat2C, Complex64)> {
    let rho = d[0].hypot(d[1]);
    let z = k * rho;
    let h0 = hankel1(Order::int(0), z)?;
    let h1 = hankel1(Order::int(1), z)?;
    let g1 = -k * h1;
    let g2 = -k * k * (h0 - h1 / z);
    let u = [d[0] / rho, d[1] / rho];
    let mut m = Mat2C::ZERO;
    for i in 0..2 {
        for j in 0..2 {
            let uu = u[i] * u[j];
            let delta = (i == j) as u8 as f64;
            m.0[i][j] = g2 * uu + g1 / rho * (delta - uu);
        }
    }
    Ok((m, -k * k * h0))
}

/// Closed form Φ(x,y) = (i/4ω²)(∇_x∇_yᵗ H₀(k_p|x−y|) + ∇_x^⊥(∇_y^⊥)ᵗ H₀(k_s|x−y|)).
pub fn phi_direct_2d(x: [f64; 2], y: [f64; 2], p: &LameParams) -> Result<Mat2C> {
    let d = [x[0] - y[0], x[1] - y[1]];
    if d[0].hypot(d[1]) < COINCIDENCE {
        return Err(Error::Domain("phi_direct_2d: x and y coincide".into()));
    }
    // ∇_x∇_yᵗ g = −Hess g and ∇_x^⊥(∇_y^⊥)ᵗ g = Hess g − Δg·I
    let (hp, _) = hessian_h0(p.k_p, d)?;
    let (hs, lap_s) = hessian_h0(p.k_s, d)?;
    let inner = hs - hp - Mat2C::IDENTITY * lap_s;
    Ok(inner * (I / (4.0 * p.omega * p.omega)))
}

/// Which exponential pairing the series uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// e^{imθ} e^{−inφ}
    #[default]
    Standard,
    /// e^{−imθ} e^{inφ}
    Conjugate,
}

impl PhaseConvention {
    /// Coupling matrices multiplying the H_{n−2} and H_{n+2} series.
    pub fn matrices(self) -> (Mat2C, Mat2C) {
        let plus = Mat2C::new(-I, ONE, ONE, I);
        let minus = Mat2C::new(-I, -ONE, -ONE, I);
        match self {
            PhaseConvention::Standard => (plus, minus),
            PhaseConvention::Conjugate => (minus, plus),
        }
    }

    fn sign(self) -> f64 {
        match self {
            PhaseConvention::Standard => 1.0,
            PhaseConvention::Conjugate => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesPlan {
    pub n_max: usize,
    pub tail_bound: f64,
    pub ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesParts {
    pub phi1: Mat2C,
    pub phi2: Mat2C,
    pub phi3: Mat2C,
    pub plan: SeriesPlan,
}

impl SeriesParts {
    pub fn total(&self) -> Mat2C {
        self.phi1 + self.phi2 + self.phi3
    }
}

struct SeriesCtx {
    r: f64,
    t: f64,
    theta: f64,
    phi: f64,
    p: LameParams,
    conv: PhaseConvention,
    a: Mat2C,
    b: Mat2C,
}

impl SeriesCtx {
    fn new(x: [f64; 2], y: [f64; 2], p: &LameParams, conv: PhaseConvention) -> Result<Self> {
        let (mut x, mut y) = (x, y);
        if x[0].hypot(x[1]) < y[0].hypot(y[1]) {
            std::mem::swap(&mut x, &mut y);
        }
        let r = x[0].hypot(x[1]);
        let t = y[0].hypot(y[1]);
        if (r - t).abs() <= COINCIDENCE * r.max(1.0) {
            return Err(Error::NonConvergence(
                "addition series needs |x| != |y|".into(),
            ));
        }
        let (a, b) = conv.matrices();
        Ok(SeriesCtx {
            r,
            t,
            theta: x[1].atan2(x[0]),
            phi: y[1].atan2(y[0]),
            p: *p,
            conv,
            a,
            b,
        })
    }

    fn phase(&self, m: i32, n: i32) -> Complex64 {
        let s = self.conv.sign();
        Complex64::from_polar(1.0, s * (m as f64 * self.theta - n as f64 * self.phi))
    }

    fn term(&self, n: i32) -> Result<(Mat2C, Mat2C, Mat2C)> {
        let w2 = self.p.omega * self.p.omega;
        let hp = kernel_hplus(n, self.r, self.t, &self.p)?;
        let t1 = Mat2C::IDENTITY * (hp * self.phase(n, n) * (I / (8.0 * w2)));
        let hm2 = kernel_hminus(Order::int(n - 2), Order::int(n), self.r, self.t, &self.p)?;
        let t2 = self.a * (hm2 * self.phase(n - 2, n) / (16.0 * w2));
        let hp2 = kernel_hminus(Order::int(n + 2), Order::int(n), self.r, self.t, &self.p)?;
        let t3 = self.b * (hp2 * self.phase(n + 2, n) / (16.0 * w2));
        Ok((t1, t2, t3))
    }
}

/// Partial sums over |n| ≤ n_max without any stopping rule.
pub fn phi_series_fixed(
    x: [f64; 2],
    y: [f64; 2],
    p: &LameParams,
    n_max: usize,
    conv: PhaseConvention,
) -> Result<SeriesParts> {
    let ctx = SeriesCtx::new(x, y, p, conv)?;
    let mut parts = [Mat2C::ZERO; 3];
    for n in -(n_max as i32)..=(n_max as i32) {
        let (a, b, c) = ctx.term(n)?;
        parts[0] = parts[0] + a;
        parts[1] = parts[1] + b;
        parts[2] = parts[2] + c;
    }
    Ok(SeriesParts {
        phi1: parts[0],
        phi2: parts[1],
        phi3: parts[2],
        plan: SeriesPlan {
            n_max,
            tail_bound: f64::NAN,
            ratio: ctx.t / ctx.r,
        },
    })
}

/// Addition-formula series with an adaptive cutoff and a geometric tail estimate.
pub fn phi_series_parts(
    x: [f64; 2],
    y: [f64; 2],
    p: &LameParams,
    tol: f64,
    conv: PhaseConvention,
) -> Result<SeriesParts> {
    let ctx = SeriesCtx::new(x, y, p, conv)?;
    let q = ctx.t / ctx.r;
    let kmax = p.k_p.max(p.k_s);
    let geo = ((tol * (1.0 - q)).ln() / q.ln()).ceil() + 8.0;
    let mut n_max = (geo.max(15.0) as i32).max((kmax * ctx.r).ceil() as i32 + 8);
    let mut parts = [Mat2C::ZERO; 3];
    let mut incs: Vec<f64> = Vec::new();
    let mut roundoff = 0.0f64;
    let mut n = 0;
    loop {
        while n <= n_max {
            let mut inc = Mat2C::ZERO;
            let idx: &[i32] = if n == 0 { &[0] } else { &[n, -n] };
            for &m in idx {
                let (a, b, c) = ctx.term(m)?;
                parts[0] = parts[0] + a;
                parts[1] = parts[1] + b;
                parts[2] = parts[2] + c;
                inc = inc + a + b + c;
                roundoff = roundoff.max(a.max_abs()).max(b.max_abs()).max(c.max_abs());
            }
            incs.push(inc.max_abs());
            n += 1;
        }
        let total = (parts[0] + parts[1] + parts[2]).max_abs();
        let last3 = &incs[incs.len() - 3..];
        if last3.iter().all(|&d| d < tol * (1.0 + total)) {
            break;
        }
        if n_max >= MAX_MODE {
            return Err(Error::NonConvergence(format!(
                "addition series not converged at n_max = {n_max} (q = {q})"
            )));
        }
        n_max = (2 * n_max).min(MAX_MODE);
    }
    let big_n = n_max as f64;
    let rho = q * (big_n + 3.0) / (big_n + 1.0);
    let last = *incs.last().expect("at least one term");
    let tail = if rho < 1.0 {
        2.0 * last * rho / (1.0 - rho)
    } else {
        f64::INFINITY
    };
    Ok(SeriesParts {
        phi1: parts[0],
        phi2: parts[1],
        phi3: parts[2],
        plan: SeriesPlan {
            n_max: n_max as usize,
            tail_bound: tail + 1e-13 * roundoff,
            ratio: q,
        },
    })
}

pub fn phi_series_2d(x: [f64; 2], y: [f64; 2], p: &LameParams, tol: f64) -> Result<(Mat2C, SeriesPlan)> {
    let s = phi_series_parts(x, y, p, tol, PhaseConvention::Standard)?;
    Ok((s.total(), s.plan))
}

/// The scalar outgoing Helmholtz kernel (i/4μ) H₀(k_s|x−y|), the λ = −μ limit of Φ.
pub fn helmholtz_kernel(x: [f64; 2], y: [f64; 2], p: &LameParams) -> Result<Complex64> {
    let d = (x[0] - y[0]).hypot(x[1] - y[1]);
    if d < COINCIDENCE {
        return Err(Error::Domain("helmholtz_kernel: x and y coincide".into()));
    }
    Ok(hankel1(Order::int(0), p.k_s * d)? * (I / (4.0 * p.mu_shear)))
}

/// (π/2)·(rt)^{−1/2}: the factor relating spherical and half-integer cylinder products.
pub fn spherical_cylinder_factor(r: f64, t: f64) -> f64 {
    0.5 * PI / (r * t).sqrt()
}
