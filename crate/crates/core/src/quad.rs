//! Quadrature: cached Gauss–Legendre rules for fixed panels and a globally
//! adaptive Gauss–Kronrod (7/15) integrator for real or complex integrands.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::ops::{Add, Mul, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

/// Values that can be integrated: real or complex.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1], cached per degree.
pub fn gl_rule(n: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).expect("nonzero"));
            Arc::new(rule.iter().map(|&(x, w)| (x, w)).collect())
        })
        .clone()
}

/// Composite Gauss–Legendre with `panels` equal panels of degree `n`.
pub fn gl_panels<T: QuadValue>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    panels: usize,
    n: usize,
) -> T {
    let rule = gl_rule(n);
    let h = (b - a) / panels as f64;
    let mut acc = T::zero();
    for p in 0..panels {
        let lo = a + h * p as f64;
        let c = lo + 0.5 * h;
        for &(x, w) in rule.iter() {
            acc = acc + f(c + 0.5 * h * x) * (0.5 * h * w);
        }
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub err: f64,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-10,
            max_intervals: 4000,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<T: QuadValue>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let kv = k * h;
    let gv = g * h;
    (kv, (kv - gv).magnitude())
}

struct Piece<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

/// Adaptive G7K15 over [a, b] split initially at the given interior breakpoints.
pub fn adaptive<T: QuadValue>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> QuadResult<T> {
    if a == b {
        return QuadResult {
            value: T::zero(),
            err: 0.0,
            converged: true,
        };
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut pts = vec![lo];
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    inner.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    pts.extend(inner);
    pts.push(hi);
    let mut pieces: Vec<Piece<T>> = pts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (value, err) = gk15(&mut f, w[0], w[1]);
            Piece {
                a: w[0],
                b: w[1],
                value,
                err,
            }
        })
        .collect();
    let total = |ps: &[Piece<T>]| {
        let mut v = T::zero();
        let mut e = 0.0;
        for p in ps {
            v = v + p.value;
            e += p.err;
        }
        (v, e)
    };
    loop {
        let (v, e) = total(&pieces);
        let tol = opts.abs_tol.max(opts.rel_tol * v.magnitude());
        if e <= tol || pieces.len() >= opts.max_intervals {
            return QuadResult {
                value: v * sign,
                err: e,
                converged: e <= tol,
            };
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.partial_cmp(&y.1.err).unwrap_or(std::cmp::Ordering::Equal))
            .expect("nonempty");
        let p = pieces.swap_remove(idx);
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // interval cannot be split further
            pieces.push(Piece { err: 0.0, ..p });
            continue;
        }
        let (v1, e1) = gk15(&mut f, p.a, m);
        let (v2, e2) = gk15(&mut f, m, p.b);
        pieces.push(Piece {
            a: p.a,
            b: m,
            value: v1,
            err: e1,
        });
        pieces.push(Piece {
            a: m,
            b: p.b,
            value: v2,
            err: e2,
        });
    }
}

/// Golden-section maximization of a unimodal-looking function on [a, b].
pub fn golden_max(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_polynomial_exact() {
        let v = gl_panels(|x| x.powi(9), 0.0, 2.0, 1, 5);
        assert!((v - 102.4).abs() < 1e-11);
    }

    #[test]
    fn adaptive_real_and_complex() {
        let r = adaptive(|x: f64| x.sqrt(), 0.0, 1.0, &[], QuadOptions::default());
        assert!(r.converged);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10);
        let c = adaptive(
            |x: f64| Complex64::new(0.0, x).exp(),
            0.0,
            std::f64::consts::PI,
            &[1.0],
            QuadOptions::default(),
        );
        assert!((c.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
        let rev = adaptive(|x: f64| x, 1.0, 0.0, &[], QuadOptions::default());
        assert!((rev.value + 0.5).abs() < 1e-15);
    }

    #[test]
    fn golden_finds_peak() {
        let (x, _) = golden_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-8);
        assert!((x - 0.3).abs() < 1e-6);
    }
}
