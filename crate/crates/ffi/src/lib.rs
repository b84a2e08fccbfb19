//! C ABI over `lame_mt`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_parse` and released with
//! the matching `*_free`. Every fallible call returns an [`LmtStatus`]; on failure the message
//! is kept per thread and read back with [`lmt_last_error`]. Panics are caught and reported as
//! `LMT_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use lame_mt::error::Error;
use lame_mt::estimates::{lemma_rows, thm1_ratio, thm2_ratio, LemmaId, RatioReport};
use lame_mt::fundsol::LameParams;
use lame_mt::solver::Bump;
use lame_mt::specfun::{bessel_j, bessel_y, hankel1, Order};
use lame_mt::weights::RadialWeight;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LmtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    Overflow = 4,
    Index = 5,
    InvalidParams = 6,
    NonConvergence = 7,
    IntegrandOverflow = 8,
    Divergent = 9,
    Grid = 10,
    Aliasing = 11,
    Parse = 12,
    Io = 13,
    BufferTooSmall = 14,
    Panic = 15,
}

impl From<&Error> for LmtStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => LmtStatus::Domain,
            Error::Overflow { .. } => LmtStatus::Overflow,
            Error::Index(_) => LmtStatus::Index,
            Error::InvalidParams(_) => LmtStatus::InvalidParams,
            Error::NonConvergence(_) => LmtStatus::NonConvergence,
            Error::IntegrandOverflow { .. } => LmtStatus::IntegrandOverflow,
            Error::Divergent(_) => LmtStatus::Divergent,
            Error::Grid(_) => LmtStatus::Grid,
            Error::Aliasing(_) => LmtStatus::Aliasing,
            Error::Parse(_) => LmtStatus::Parse,
            Error::Io(_) => LmtStatus::Io,
        }
    }
}

/// Radial weight V(|x|).
pub struct LmtWeight(RadialWeight);

/// Lamé constants and frequency.
pub struct LmtParams(LameParams);

/// Single-mode bump forcing.
pub struct LmtBump(Bump);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LmtRatio {
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
    /// Nonzero when the weight vanishes somewhere the forcing does not.
    pub flagged: bool,
}

pub const LMT_REGION_LEN: usize = 24;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LmtLemmaRow {
    pub mu: f64,
    pub a: f64,
    /// NUL-terminated region name.
    pub region: [c_char; LMT_REGION_LEN],
    pub value: f64,
    pub mt_norm_sq: f64,
    pub ratio: f64,
    pub quad_err: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Fail {
    Null,
    Utf8,
    Small(usize),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

type Res<T> = std::result::Result<T, Fail>;

fn guard(f: impl FnOnce() -> Res<()>) -> LmtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            LmtStatus::Ok
        }
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument".into());
            LmtStatus::NullPointer
        }
        Ok(Err(Fail::Utf8)) => {
            set_error("string argument is not valid UTF-8".into());
            LmtStatus::InvalidUtf8
        }
        Ok(Err(Fail::Small(need))) => {
            set_error(format!("output buffer too small, need {need} entries"));
            LmtStatus::BufferTooSmall
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            LmtStatus::from(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            LmtStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T) -> Res<&'a T> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn put<T>(out: *mut T, v: T) -> Res<()> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    out.write(v);
    Ok(())
}

unsafe fn text<'a>(s: *const c_char) -> Res<&'a str> {
    if s.is_null() {
        return Err(Fail::Null);
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail::Utf8)
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lmt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread; empty after a success. The pointer stays
/// valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn lmt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Short name of a status code, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lmt_status_name(status: LmtStatus) -> *const c_char {
    let s: &'static str = match status {
        LmtStatus::Ok => "ok\0",
        LmtStatus::NullPointer => "null pointer\0",
        LmtStatus::InvalidUtf8 => "invalid utf-8\0",
        LmtStatus::Domain => "domain\0",
        LmtStatus::Overflow => "overflow\0",
        LmtStatus::Index => "index\0",
        LmtStatus::InvalidParams => "invalid parameters\0",
        LmtStatus::NonConvergence => "no convergence\0",
        LmtStatus::IntegrandOverflow => "integrand overflow\0",
        LmtStatus::Divergent => "divergent\0",
        LmtStatus::Grid => "grid\0",
        LmtStatus::Aliasing => "aliasing\0",
        LmtStatus::Parse => "parse\0",
        LmtStatus::Io => "io\0",
        LmtStatus::BufferTooSmall => "buffer too small\0",
        LmtStatus::Panic => "panic\0",
    };
    s.as_ptr().cast()
}

/// J_ν(x) for integer or half-integer ν.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lmt_bessel_j(order: f64, x: f64, out: *mut f64) -> LmtStatus {
    guard(|| put(out, bessel_j(Order::try_from_f64(order)?, x)?))
}

/// Y_ν(x) for integer or half-integer ν.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lmt_bessel_y(order: f64, x: f64, out: *mut f64) -> LmtStatus {
    guard(|| put(out, bessel_y(Order::try_from_f64(order)?, x)?))
}

/// H^{(1)}_ν(x) = J_ν(x) + iY_ν(x).
///
/// # Safety
/// `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lmt_hankel1(order: f64, x: f64, re: *mut f64, im: *mut f64) -> LmtStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(Fail::Null);
        }
        let h = hankel1(Order::try_from_f64(order)?, x)?;
        put(re, h.re)?;
        put(im, h.im)
    })
}

/// Parses a weight such as `gauss:sigma=1` or `indicator:R=3`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lmt_weight_parse(spec: *const c_char, out: *mut *mut LmtWeight) -> LmtStatus {
    guard(|| {
        let w: RadialWeight = text(spec)?.parse()?;
        put(out, boxed(LmtWeight(w)))
    })
}

/// V(ω⁻¹|x|), the weight seen after rescaling to unit frequency.
///
/// # Safety
/// `w` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lmt_weight_scale(w: *const LmtWeight, omega: f64, out: *mut *mut LmtWeight) -> LmtStatus {
    guard(|| {
        let w = get(w)?;
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParams(format!("omega must be positive, got {omega}")).into());
        }
        put(out, boxed(LmtWeight(w.0.scale(omega))))
    })
}

/// Mizohata–Takeuchi norm of the weight.
///
/// # Safety
/// `w` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lmt_weight_mt_norm(w: *const LmtWeight, out: *mut f64) -> LmtStatus {
    guard(|| put(out, get(w)?.0.mt_norm()?.mt_norm))
}

/// Weight value at radius `r`.
///
/// # Safety
/// `w` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lmt_weight_eval(w: *const LmtWeight, r: f64, out: *mut f64) -> LmtStatus {
    guard(|| put(out, get(w)?.0.eval(r)))
}

/// # Safety
/// `w` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lmt_weight_free(w: *mut LmtWeight) {
    release(w)
}

/// Lamé parameters; needs μ > 0, 2μ + λ > 0 and ω > 0.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lmt_params_new(lam: f64, mu: f64, omega: f64, out: *mut *mut LmtParams) -> LmtStatus {
    guard(|| put(out, boxed(LmtParams(LameParams::new(lam, mu, omega)?))))
}

/// Pressure and shear wavenumbers.
///
/// # Safety
/// `p` must be a live handle and `k_p`, `k_s` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lmt_params_wavenumbers(p: *const LmtParams, k_p: *mut f64, k_s: *mut f64) -> LmtStatus {
    guard(|| {
        let p = get(p)?;
        if k_p.is_null() || k_s.is_null() {
            return Err(Fail::Null);
        }
        put(k_p, p.0.k_p)?;
        put(k_s, p.0.k_s)
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lmt_params_free(p: *mut LmtParams) {
    release(p)
}

/// Bump forcing of angular mode `n` centred at radius `r0` with half-width `w`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lmt_bump_new(n: i32, r0: f64, w: f64, out: *mut *mut LmtBump) -> LmtStatus {
    guard(|| put(out, boxed(LmtBump(Bump::new(n, r0, w)?))))
}

/// Parses `bump:n=0,r0=1,w=0.25`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lmt_bump_parse(spec: *const c_char, out: *mut *mut LmtBump) -> LmtStatus {
    guard(|| {
        let b: Bump = text(spec)?.parse()?;
        put(out, boxed(LmtBump(b)))
    })
}

/// # Safety
/// `b` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lmt_bump_free(b: *mut LmtBump) {
    release(b)
}

fn ratio(r: RatioReport) -> LmtRatio {
    LmtRatio {
        numerator: r.numerator,
        denominator: r.denominator,
        ratio: r.ratio,
        flagged: r.flagged,
    }
}

/// ‖u‖_{L²(V)} against ω⁻²‖V‖_MT‖f‖_{L²(V⁻¹)} for the outgoing solution u.
///
/// # Safety
/// All handles must be live and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lmt_thm1_ratio(
    b: *const LmtBump,
    p: *const LmtParams,
    w: *const LmtWeight,
    out: *mut LmtRatio,
) -> LmtStatus {
    guard(|| put(out, ratio(thm1_ratio(&get(b)?.0, &get(p)?.0, &get(w)?.0)?)))
}

/// The gradient version: ‖∇u‖_{L²(V)} against ω⁻¹‖V‖_MT‖f‖_{L²(V⁻¹)}.
///
/// # Safety
/// All handles must be live and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lmt_thm2_ratio(
    b: *const LmtBump,
    p: *const LmtParams,
    w: *const LmtWeight,
    out: *mut LmtRatio,
) -> LmtStatus {
    guard(|| put(out, ratio(thm2_ratio(&get(b)?.0, &get(p)?.0, &get(w)?.0)?)))
}

/// Region integrals of one lemma (`"L4_3"` … `"L4_7"`) at order `mu`. Writes at most `cap`
/// rows to `rows` and the row count to `n_rows`. If `cap` is too small nothing is written
/// to `rows`, `n_rows` gets the required count and the call returns
/// `LMT_STATUS_BUFFER_TOO_SMALL`; passing `rows = NULL, cap = 0` queries the count.
///
/// # Safety
/// `id` must be a NUL-terminated string, `w` a live handle, `rows` valid for `cap` writes
/// and `n_rows` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lmt_lemma_rows(
    id: *const c_char,
    mu: f64,
    a: f64,
    w: *const LmtWeight,
    rows: *mut LmtLemmaRow,
    cap: usize,
    n_rows: *mut usize,
) -> LmtStatus {
    guard(|| {
        let id: LemmaId = text(id)?.parse()?;
        let got = lemma_rows(id, mu, a, &get(w)?.0)?;
        put(n_rows, got.len())?;
        if got.len() > cap {
            return Err(Fail::Small(got.len()));
        }
        if got.is_empty() {
            return Ok(());
        }
        if rows.is_null() {
            return Err(Fail::Null);
        }
        for (i, r) in got.iter().enumerate() {
            let mut region = [0 as c_char; LMT_REGION_LEN];
            for (d, s) in region.iter_mut().zip(r.region.bytes().take(LMT_REGION_LEN - 1)) {
                *d = s as c_char;
            }
            rows.add(i).write(LmtLemmaRow {
                mu: r.mu,
                a: r.a,
                region,
                value: r.value,
                mt_norm_sq: r.mt_norm_sq,
                ratio: r.ratio,
                quad_err: r.quad_err,
            });
        }
        Ok(())
    })
}
