//! C ABI over the gibbslab library.
//!
//! Models are opaque handles created by `gl_model_parse` and released with
//! `gl_model_free`. Every function returns a `GlStatus`; on failure the message
//! is kept per thread and can be copied out with `gl_last_error`. Numbers are
//! computed in 256-bit arithmetic and returned as doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gibbslab::matrep::{classify_components, delta2_at, delta3_at, delta4_at, ComponentClassification, Snapshot};
use gibbslab::model::parse_model;
use gibbslab::thermo::{entropy, gibbs_measure};
use gibbslab::weights::{parse_weight_expr, PerturbationFamily};
use gibbslab::{Error, Mp, Real};

/// Status codes, aligned with the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlStatus {
    Ok = 0,
    /// Null pointer, invalid UTF-8 or an unsupported request.
    Usage = 1,
    /// Malformed model text, parameter or ε.
    Parse = 2,
    /// The model violates a condition the request needs.
    Condition = 3,
    Numeric = 4,
    /// The output buffer is shorter than the result; the needed length is reported.
    BufferTooSmall = 5,
    /// An internal panic was caught at the boundary.
    Internal = 6,
}

/// Opaque model handle.
pub struct GlModel {
    family: PerturbationFamily,
    cls: ComponentClassification<Mp>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> GlStatus {
    match gibbslab::cli::exit_code(e) {
        2 => GlStatus::Parse,
        3 => GlStatus::Condition,
        4 => GlStatus::Numeric,
        _ => GlStatus::Usage,
    }
}

/// Run `f`, turning errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (GlStatus, String)>) -> GlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GlStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal error".into());
            GlStatus::Internal
        }
    }
}

fn lib<T>(r: gibbslab::Result<T>) -> Result<T, (GlStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn usage(msg: &str) -> (GlStatus, String) {
    (GlStatus::Usage, msg.into())
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (GlStatus, String)> {
    if p.is_null() {
        return Err(usage(&format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| usage(&format!("{what} is not UTF-8")))
}

unsafe fn model<'a>(m: *const GlModel) -> Result<&'a GlModel, (GlStatus, String)> {
    m.as_ref().ok_or_else(|| usage("model handle is null"))
}

fn epsilon(eps: f64) -> Result<Mp, (GlStatus, String)> {
    if eps.is_finite() && eps > 0.0 {
        Ok(Mp::from_f64(eps))
    } else {
        Err((GlStatus::Parse, format!("eps must be positive and finite, got {eps}")))
    }
}

unsafe fn put(out: *mut f64, v: f64) -> Result<(), (GlStatus, String)> {
    if out.is_null() {
        return Err(usage("output pointer is null"));
    }
    *out = v;
    Ok(())
}

/// Copy `values` into `out[..cap]` and report the length through `len`.
unsafe fn put_slice(values: &[f64], out: *mut f64, cap: usize, len: *mut usize) -> Result<(), (GlStatus, String)> {
    if len.is_null() {
        return Err(usage("length pointer is null"));
    }
    *len = values.len();
    if cap < values.len() {
        return Err((GlStatus::BufferTooSmall, format!("need room for {} values, got {cap}", values.len())));
    }
    if out.is_null() && !values.is_empty() {
        return Err(usage("output pointer is null"));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

/// Parse model text. On success `*out` owns a handle for `gl_model_free`.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gl_model_parse(src: *const c_char, out: *mut *mut GlModel) -> GlStatus {
    guard(|| {
        if out.is_null() {
            return Err(usage("output handle pointer is null"));
        }
        *out = ptr::null_mut();
        let t = text(src, "model text")?;
        let m = parse_model(t).map_err(|e| (status_of(&e.error), e.to_string()))?;
        let cls = lib(classify_components::<Mp>(&m.family))?;
        *out = Box::into_raw(Box::new(GlModel { family: m.family, cls }));
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `m` must come from `gl_model_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gl_model_free(m: *mut GlModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Set a declared parameter to an expression without ε, e.g. `"7/9"`.
///
/// # Safety
/// `m` must be a live handle, `name` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn gl_model_set_param(m: *mut GlModel, name: *const c_char, value: *const c_char) -> GlStatus {
    guard(|| {
        let m = m.as_mut().ok_or_else(|| usage("model handle is null"))?;
        let name = text(name, "parameter name")?;
        let value = lib(parse_weight_expr(text(value, "parameter value")?))?;
        lib(m.family.set_param(name, value))?;
        m.cls = lib(classify_components::<Mp>(&m.family))?;
        Ok(())
    })
}

/// Number of states.
///
/// # Safety
/// `m` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gl_model_dim(m: *const GlModel, out: *mut usize) -> GlStatus {
    guard(|| {
        let m = model(m)?;
        if out.is_null() {
            return Err(usage("output pointer is null"));
        }
        *out = m.family.dim();
        Ok(())
    })
}

/// Number of transitive components of B (entries of `gl_marginals`) and of
/// maximal ones (entries of `gl_deltas`).
///
/// # Safety
/// `m` must be a live handle; either output pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn gl_model_components(
    m: *const GlModel,
    transitive: *mut usize,
    maximal: *mut usize,
) -> GlStatus {
    guard(|| {
        let m = model(m)?;
        if !transitive.is_null() {
            *transitive = m.cls.t.len();
        }
        if !maximal.is_null() {
            *maximal = m.cls.t0.len();
        }
        Ok(())
    })
}

/// Perron root of the full weighted matrix at ε.
///
/// # Safety
/// `m` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gl_lambda_full(m: *const GlModel, eps: f64, out: *mut f64) -> GlStatus {
    guard(|| {
        let m = model(m)?;
        let l = lib(gibbslab::matrep::lambda_full(&m.family, &epsilon(eps)?))?;
        put(out, l.to_f64())
    })
}

/// Pressure log λ(ε).
///
/// # Safety
/// `m` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gl_pressure(m: *const GlModel, eps: f64, out: *mut f64) -> GlStatus {
    guard(|| {
        let m = model(m)?;
        let l = lib(gibbslab::matrep::lambda_full(&m.family, &epsilon(eps)?))?;
        put(out, l.ln().to_f64())
    })
}

/// Gibbs mass of each transitive component of B, in decomposition order.
///
/// # Safety
/// `m` must be a live handle, `out` must hold `cap` doubles, `len` valid.
#[no_mangle]
pub unsafe extern "C" fn gl_marginals(
    m: *const GlModel,
    eps: f64,
    out: *mut f64,
    cap: usize,
    len: *mut usize,
) -> GlStatus {
    guard(|| {
        let m = model(m)?;
        let w = lib(m.family.weighted_matrix(&epsilon(eps)?, None))?;
        let mu = lib(gibbs_measure(&w))?;
        let v: Vec<f64> = m
            .cls
            .t
            .iter()
            .map(|&k| m.cls.decomposition.blocks[k].states.iter().fold(Mp::zero(), |a, &i| a + &mu.pi[i]).to_f64())
            .collect();
        put_slice(&v, out, cap, len)
    })
}

/// δ weights of the maximal components (one, two, three or four of them).
///
/// # Safety
/// `m` must be a live handle, `out` must hold `cap` doubles, `len` valid.
#[no_mangle]
pub unsafe extern "C" fn gl_deltas(
    m: *const GlModel,
    eps: f64,
    out: *mut f64,
    cap: usize,
    len: *mut usize,
) -> GlStatus {
    guard(|| {
        let m = model(m)?;
        let snap = lib(Snapshot::new(&m.family, &m.cls, epsilon(eps)?))?;
        let d = match m.cls.t0.len() {
            0 => return Err((GlStatus::Condition, "B has no transitive component".into())),
            1 => vec![Mp::one()],
            2 => lib(delta2_at(&snap))?.delta,
            3 => lib(delta3_at(&snap))?.delta,
            4 => lib(delta4_at(&snap))?.point.delta,
            n => return Err(usage(&format!("δ weights cover up to four maximal components, found {n}"))),
        };
        let v: Vec<f64> = d.iter().map(Real::to_f64).collect();
        put_slice(&v, out, cap, len)
    })
}

/// Entropy of the Gibbs measure at ε.
///
/// # Safety
/// `m` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gl_entropy(m: *const GlModel, eps: f64, out: *mut f64) -> GlStatus {
    guard(|| {
        let m = model(m)?;
        let w = lib(m.family.weighted_matrix(&epsilon(eps)?, None))?;
        let mu = lib(gibbs_measure(&w))?;
        put(out, entropy(&mu).to_f64())
    })
}

/// Copy the last error message of this thread as a NUL-terminated string.
/// Returns the message length without the terminator; the copy is truncated
/// to `cap − 1` bytes. A null `buf` only queries the length.
///
/// # Safety
/// `buf` must hold `cap` bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn gl_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}
