//! C ABI for `qmlab`.
//!
//! Objects cross the boundary as opaque heap handles (`QmlabForm`,
//! `QmlabSeries`, `QmlabUea`) that the caller releases with the matching
//! `*_free`. Every fallible entry point returns a [`QmlabStatus`] and writes
//! its result through an out pointer; on failure a message is kept per thread
//! and can be fetched with [`qmlab_last_error`]. Strings returned by the
//! library are owned by the caller and released with [`qmlab_string_free`].
//! Panics never unwind across the boundary; they surface as
//! `QMLAB_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use qmlab::brackets;
use qmlab::error::FormError;
use qmlab::expr;
use qmlab::qseries::EvalOptions;
use qmlab::structure;
use qmlab::uea;
use qmlab::{QSeries, UeaElement, WeightedForm};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QmlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    /// Input violates a documented precondition (not modular, weight mismatch, ...).
    Precondition = 4,
    /// Numeric evaluation requested outside the supported domain.
    EvaluationDomain = 5,
    /// A value does not fit the requested C type.
    Overflow = 6,
    Panic = 7,
}

pub struct QmlabForm {
    inner: WeightedForm,
}

pub struct QmlabSeries {
    inner: QSeries,
}

pub struct QmlabUea {
    inner: UeaElement,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

type Failure = (QmlabStatus, String);

fn guard<F>(f: F) -> QmlabStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QmlabStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("panic: {msg}"));
            QmlabStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    (QmlabStatus::NullPointer, format!("{what} is null"))
}

fn precondition(e: impl ToString) -> Failure {
    (QmlabStatus::Precondition, e.to_string())
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (QmlabStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| (QmlabStatus::InvalidUtf8, "string contains NUL".into()))
}

unsafe fn emit_form(out: *mut *mut QmlabForm, f: WeightedForm) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(QmlabForm { inner: f }));
    Ok(())
}

unsafe fn emit_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = into_c_string(s)?;
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn qmlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qmlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qmlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------- forms

/// Parses a form from an expression such as `"E2^2 - E4"` or from its JSON
/// encoding. Pass a negative `weight` to infer it; the zero polynomial needs
/// an explicit weight.
///
/// # Safety
/// `input` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_parse(
    input: *const c_char,
    weight: i32,
    out: *mut *mut QmlabForm,
) -> QmlabStatus {
    guard(|| {
        let s = read_str(input, "input")?;
        let w = u32::try_from(weight).ok();
        let f = expr::parse_form(s, w).map_err(|e| (QmlabStatus::Parse, e))?;
        emit_form(out, f)
    })
}

/// Normalized Eisenstein series `E_k` for `k` in {2, 4, 6}.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_eisenstein(k: u32, out: *mut *mut QmlabForm) -> QmlabStatus {
    guard(|| {
        let f = match k {
            2 => WeightedForm::e2(),
            4 => WeightedForm::e4(),
            6 => WeightedForm::e6(),
            _ => return Err(precondition(FormError::UnsupportedWeight(k))),
        };
        emit_form(out, f)
    })
}

/// Deep copy of a form.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_clone(f: *const QmlabForm, out: *mut *mut QmlabForm) -> QmlabStatus {
    guard(|| {
        let f = borrow(f, "form")?;
        emit_form(out, f.inner.clone())
    })
}

/// # Safety
/// `f` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_free(f: *mut QmlabForm) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_weight(f: *const QmlabForm, out: *mut u32) -> QmlabStatus {
    guard(|| write_out(out, borrow(f, "form")?.inner.weight()))
}

/// Depth (degree in `E2`). Fails for the zero form.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_depth(f: *const QmlabForm, out: *mut u32) -> QmlabStatus {
    guard(|| {
        let d = borrow(f, "form")?.inner.depth().map_err(precondition)?;
        write_out(out, d)
    })
}

/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_is_zero(f: *const QmlabForm, out: *mut bool) -> QmlabStatus {
    guard(|| write_out(out, borrow(f, "form")?.inner.is_zero()))
}

/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_equal(
    a: *const QmlabForm,
    b: *const QmlabForm,
    out: *mut bool,
) -> QmlabStatus {
    guard(|| {
        let (a, b) = (borrow(a, "left form")?, borrow(b, "right form")?);
        write_out(out, a.inner == b.inner)
    })
}

/// Unary operators on forms.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QmlabOperator {
    /// `D = q d/dq`, raises weight by 2.
    D = 0,
    /// Lowering operator `δ`, lowers weight by 2.
    Delta = 1,
    /// Multiplication by the weight.
    H = 2,
    /// `D - k·E2/12`.
    Serre = 3,
}

/// Applies `op` to `f` `times` times.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_apply(
    f: *const QmlabForm,
    op: QmlabOperator,
    times: u32,
    out: *mut *mut QmlabForm,
) -> QmlabStatus {
    guard(|| {
        let mut g = borrow(f, "form")?.inner.clone();
        for _ in 0..times {
            g = match op {
                QmlabOperator::D => g.apply_d(),
                QmlabOperator::Delta => g.apply_delta(),
                QmlabOperator::H => g.apply_h(),
                QmlabOperator::Serre => brackets::serre_derivative(&g),
            };
        }
        emit_form(out, g)
    })
}

/// Sum of two forms of equal weight.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_add(
    a: *const QmlabForm,
    b: *const QmlabForm,
    out: *mut *mut QmlabForm,
) -> QmlabStatus {
    guard(|| {
        let (a, b) = (borrow(a, "left form")?, borrow(b, "right form")?);
        let s = a.inner.checked_add(&b.inner).map_err(precondition)?;
        emit_form(out, s)
    })
}

/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_mul(
    a: *const QmlabForm,
    b: *const QmlabForm,
    out: *mut *mut QmlabForm,
) -> QmlabStatus {
    guard(|| {
        let (a, b) = (borrow(a, "left form")?, borrow(b, "right form")?);
        emit_form(out, &a.inner * &b.inner)
    })
}

/// Multiplies by the rational `num/den`.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_scale(
    f: *const QmlabForm,
    num: i64,
    den: i64,
    out: *mut *mut QmlabForm,
) -> QmlabStatus {
    guard(|| {
        if den == 0 {
            return Err(precondition("zero denominator"));
        }
        let c = qmlab::rational::ratio(num, den);
        emit_form(out, borrow(f, "form")?.inner.scale(&c))
    })
}

/// First Rankin–Cohen bracket of two modular forms.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_rc1(
    a: *const QmlabForm,
    b: *const QmlabForm,
    out: *mut *mut QmlabForm,
) -> QmlabStatus {
    guard(|| {
        let (a, b) = (borrow(a, "left form")?, borrow(b, "right form")?);
        emit_form(out, brackets::rc1(&a.inner, &b.inner).map_err(precondition)?)
    })
}

/// Human-readable polynomial, e.g. `E2*E4 - E6`.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable. Free the result with
/// [`qmlab_string_free`].
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_to_string(f: *const QmlabForm, out: *mut *mut c_char) -> QmlabStatus {
    guard(|| emit_string(out, borrow(f, "form")?.inner.to_string()))
}

/// JSON `{"weight":k,"poly":[...]}`.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_to_json(f: *const QmlabForm, out: *mut *mut c_char) -> QmlabStatus {
    guard(|| {
        let f = borrow(f, "form")?;
        let json = serde_json::to_string(&f.inner).map_err(|e| (QmlabStatus::Parse, e.to_string()))?;
        emit_string(out, json)
    })
}

/// Depth decomposition into modular parts and derivatives of `φ`, as JSON.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_decompose_json(
    f: *const QmlabForm,
    out: *mut *mut c_char,
) -> QmlabStatus {
    guard(|| {
        let dec = structure::decompose(&borrow(f, "form")?.inner);
        let json = serde_json::to_string(&dec).map_err(|e| (QmlabStatus::Parse, e.to_string()))?;
        emit_string(out, json)
    })
}

/// Checks the weight-`k` transformation law of `f` under `(a b; c d)` at
/// `z = re + i·im`. Writes the largest residual and whether it stayed within
/// `tol` plus the truncation bound.
///
/// # Safety
/// `f` must be a live handle; out pointers must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn qmlab_form_check_transformation(
    f: *const QmlabForm,
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    re: f64,
    im: f64,
    tol: f64,
    max_residual: *mut f64,
    passed: *mut bool,
) -> QmlabStatus {
    guard(|| {
        let f = borrow(f, "form")?;
        let g = structure::GroupElement::new(a, b, c, d).map_err(precondition)?;
        let report = structure::check_functional_equation(&f.inner, &g, Complex64::new(re, im), tol)
            .map_err(|e| match e {
                FormError::Series(_) => (QmlabStatus::EvaluationDomain, e.to_string()),
                other => precondition(other),
            })?;
        write_out(max_residual, report.max_residual)?;
        write_out(passed, report.passed)
    })
}

/// Truncated q-expansion with `precision` coefficients.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_form_qexpansion(
    f: *const QmlabForm,
    precision: usize,
    out: *mut *mut QmlabSeries,
) -> QmlabStatus {
    guard(|| {
        if precision == 0 {
            return Err(precondition("precision must be positive"));
        }
        let s = borrow(f, "form")?.inner.qexpansion(precision);
        write_out(out, Box::into_raw(Box::new(QmlabSeries { inner: s })))
    })
}

// ---------------------------------------------------------------- series

/// # Safety
/// `s` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn qmlab_series_free(s: *mut QmlabSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_series_precision(s: *const QmlabSeries, out: *mut usize) -> QmlabStatus {
    guard(|| write_out(out, borrow(s, "series")?.inner.precision()))
}

/// Coefficient of `q^n` as `num/den` in lowest terms. Fails with
/// `QMLAB_STATUS_OVERFLOW` when either part exceeds 64 bits and with
/// `QMLAB_STATUS_PRECONDITION` when `n` is beyond the precision.
///
/// # Safety
/// `s` must be a live handle; out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_series_coeff(
    s: *const QmlabSeries,
    n: usize,
    num: *mut i64,
    den: *mut i64,
) -> QmlabStatus {
    guard(|| {
        let s = borrow(s, "series")?;
        let c = s
            .inner
            .coeff(n)
            .ok_or_else(|| precondition(format!("index {n} is beyond precision {}", s.inner.precision())))?;
        let overflow = || (QmlabStatus::Overflow, format!("coefficient {c} does not fit in 64 bits"));
        let p = i64::try_from(c.numer()).map_err(|_| overflow())?;
        let q = i64::try_from(c.denom()).map_err(|_| overflow())?;
        write_out(num, p)?;
        write_out(den, q)
    })
}

/// Coefficient of `q^n` as a decimal string `"p/q"` (or `"p"`).
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_series_coeff_string(
    s: *const QmlabSeries,
    n: usize,
    out: *mut *mut c_char,
) -> QmlabStatus {
    guard(|| {
        let s = borrow(s, "series")?;
        let c = s
            .inner
            .coeff(n)
            .ok_or_else(|| precondition(format!("index {n} is beyond precision {}", s.inner.precision())))?;
        emit_string(out, c.to_string())
    })
}

/// Evaluates at `z = re + i·im` with `q = exp(2πiz)`. `growth_exponent` is
/// the assumed polynomial growth of the coefficients used for the tail bound.
///
/// # Safety
/// `s` must be a live handle; out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_series_evaluate(
    s: *const QmlabSeries,
    re: f64,
    im: f64,
    growth_exponent: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    tail_bound: *mut f64,
) -> QmlabStatus {
    guard(|| {
        let s = borrow(s, "series")?;
        let opts = EvalOptions { growth_exponent, ..EvalOptions::default() };
        let ev = s
            .inner
            .evaluate(Complex64::new(re, im), &opts)
            .map_err(|e| (QmlabStatus::EvaluationDomain, e.to_string()))?;
        write_out(out_re, ev.value.re)?;
        write_out(out_im, ev.value.im)?;
        write_out(tail_bound, ev.tail_bound)
    })
}

// ---------------------------------------------------------------- sl2

/// PBW normal form of a word over `D`, `H`, `d` (e.g. `"d d D D"` or `"ddDD"`).
///
/// # Safety
/// `word` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_uea_from_word(word: *const c_char, out: *mut *mut QmlabUea) -> QmlabStatus {
    guard(|| {
        let w = uea::parse_word(read_str(word, "word")?).map_err(|e| (QmlabStatus::Parse, e))?;
        let u = uea::pbw_reduce(&w);
        write_out(out, Box::into_raw(Box::new(QmlabUea { inner: u })))
    })
}

/// # Safety
/// `u` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn qmlab_uea_free(u: *mut QmlabUea) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// One line per PBW monomial: coefficient, then `D^a H^b d^c`.
///
/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_uea_to_text(u: *const QmlabUea, out: *mut *mut c_char) -> QmlabStatus {
    guard(|| emit_string(out, borrow(u, "element")?.inner.to_text()))
}

/// Number of PBW monomials with nonzero coefficient.
///
/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_uea_len(u: *const QmlabUea, out: *mut usize) -> QmlabStatus {
    guard(|| write_out(out, borrow(u, "element")?.inner.len()))
}

/// Acts on a homogeneous form. Fails when the image is not homogeneous.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_uea_act(
    u: *const QmlabUea,
    f: *const QmlabForm,
    out: *mut *mut QmlabForm,
) -> QmlabStatus {
    guard(|| {
        let u = borrow(u, "element")?;
        let f = borrow(f, "form")?;
        let image = u.inner.act(f.inner.poly());
        let g = if image.is_zero() {
            let w = i64::from(f.inner.weight()) + u.inner.degree().unwrap_or(0);
            let w = u32::try_from(w).map_err(|_| precondition(format!("image has negative weight {w}")))?;
            WeightedForm::zero(w)
        } else {
            WeightedForm::from_poly(image).map_err(precondition)?
        };
        emit_form(out, g)
    })
}

/// Checks the PBW expansion of `δⁿDⁿ` against its closed form.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_verify_prop4(n: u32, out: *mut bool) -> QmlabStatus {
    guard(|| write_out(out, uea::verify_prop4(n).0))
}

// ---------------------------------------------------------------- cli

/// Runs a `qmlab` command line (without the program name) in-process.
/// Writes the exit status and the captured stdout and stderr; both strings
/// must be released with [`qmlab_string_free`].
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings; out pointers must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qmlab_cli_run(
    argc: usize,
    argv: *const *const c_char,
    exit_status: *mut i32,
    out_stdout: *mut *mut c_char,
    out_stderr: *mut *mut c_char,
) -> QmlabStatus {
    guard(|| {
        if argc > 0 && argv.is_null() {
            return Err(null("argv"));
        }
        let mut args = Vec::with_capacity(argc);
        for i in 0..argc {
            args.push(read_str(*argv.add(i), "argument")?.to_owned());
        }
        let result = qmlab::cli::run(args);
        if out_stdout.is_null() || out_stderr.is_null() || exit_status.is_null() {
            return Err(null("output pointer"));
        }
        *out_stdout = into_c_string(result.stdout)?;
        *out_stderr = into_c_string(result.stderr)?;
        *exit_status = result.status;
        Ok(())
    })
}
