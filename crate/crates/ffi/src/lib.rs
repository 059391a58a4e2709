//! C interface to `bivar`.
//!
//! Pairings, functions and estimates are opaque heap handles released with
//! their `*_free` function. Complex vectors cross the boundary as interleaved
//! `re, im` doubles, `2 * dim` of them. Every entry point returns a
//! [`BivarError`] code; on failure [`bivar_last_error_message`] describes the
//! error. Panics are caught and reported as `BIVAR_ERROR_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bivar::bv::{bv_two_norm_2g, BvFunction};
use bivar::harness::check_pairing_axioms;
use bivar::spaces::pairing_by_name;
use bivar::variation::estimate_variation;
use bivar::{
    ComplexVector, Error, FunctionSpec, Interval, Pairing, RefineConfig, Status, Strategy,
    VariationEstimate,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BivarError {
    Ok = 0,
    NullPointer,
    InvalidUtf8,
    Dimension,
    Membership,
    Domain,
    Syntax,
    Arity,
    Evaluation,
    Composition,
    NotBounded,
    Unconverged,
    Unknown,
    Config,
    Panic,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BivarVariationStatus {
    Converged = 0,
    Diverging,
    BudgetExhausted,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BivarStrategy {
    Dyadic = 0,
    Greedy,
    Adaptive,
}

/// Refinement settings; start from [`bivar_refine_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BivarRefineConfig {
    pub gain_tol: f64,
    pub max_points: usize,
    pub divergence_cap: f64,
    pub divergence_levels: usize,
    pub strategy: BivarStrategy,
    pub probe_depth: u32,
}

impl From<RefineConfig> for BivarRefineConfig {
    fn from(c: RefineConfig) -> Self {
        Self {
            gain_tol: c.gain_tol,
            max_points: c.max_points,
            divergence_cap: c.divergence_cap,
            divergence_levels: c.divergence_levels,
            strategy: match c.strategy {
                Strategy::Dyadic => BivarStrategy::Dyadic,
                Strategy::Greedy => BivarStrategy::Greedy,
                Strategy::Adaptive => BivarStrategy::Adaptive,
            },
            probe_depth: c.probe_depth,
        }
    }
}

impl From<BivarRefineConfig> for RefineConfig {
    fn from(c: BivarRefineConfig) -> Self {
        Self {
            gain_tol: c.gain_tol,
            max_points: c.max_points,
            divergence_cap: c.divergence_cap,
            divergence_levels: c.divergence_levels,
            strategy: match c.strategy {
                BivarStrategy::Dyadic => Strategy::Dyadic,
                BivarStrategy::Greedy => Strategy::Greedy,
                BivarStrategy::Adaptive => Strategy::Adaptive,
            },
            probe_depth: c.probe_depth,
        }
    }
}

/// A two-norm pairing.
pub struct BivarPairing(Pairing);

/// A function of one real variable on a closed interval.
pub struct BivarFunction(FunctionSpec);

/// Result of a variation estimate.
pub struct BivarEstimate(VariationEstimate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(BivarError, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Dimension { .. } => BivarError::Dimension,
            Error::Membership { .. } => BivarError::Membership,
            Error::Domain(_) => BivarError::Domain,
            Error::Syntax { .. } => BivarError::Syntax,
            Error::Arity { .. } => BivarError::Arity,
            Error::Evaluation { .. } => BivarError::Evaluation,
            Error::Composition(_) => BivarError::Composition,
            Error::NotBounded { .. } => BivarError::NotBounded,
            Error::Unconverged { .. } => BivarError::Unconverged,
            Error::Unknown { .. } => BivarError::Unknown,
            Error::Config(_) => BivarError::Config,
        };
        Failure(code, e.to_string())
    }
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> BivarError {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => BivarError::Ok,
        Ok(Err(Failure(code, message))) => {
            set_last_error(message);
            code
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {message}"));
            BivarError::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(BivarError::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(BivarError::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn vector_arg(p: *const f64, dim: usize, what: &str) -> Result<ComplexVector, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let raw = std::slice::from_raw_parts(p, 2 * dim);
    let pairs: Vec<[f64; 2]> = raw.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
    Ok(ComplexVector::try_from(pairs)?)
}

fn status_code(s: Status) -> BivarVariationStatus {
    match s {
        Status::Converged => BivarVariationStatus::Converged,
        Status::Diverging => BivarVariationStatus::Diverging,
        Status::BudgetExhausted => BivarVariationStatus::BudgetExhausted,
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bivar_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bivar_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn bivar_refine_config_default() -> BivarRefineConfig {
    RefineConfig::default().into()
}

/// Looks up a pairing by name: `euclidean-modulus`, `modulus-product`,
/// `broken-g3` or `zero`.
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bivar_pairing_new(
    name: *const c_char,
    out: *mut *mut BivarPairing,
) -> BivarError {
    guard(|| {
        let out = out_arg(out, "out")?;
        let p = pairing_by_name(str_arg(name, "name")?)?;
        *out = Box::into_raw(Box::new(BivarPairing(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must come from [`bivar_pairing_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bivar_pairing_free(p: *mut BivarPairing) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Dimensions of the two slots.
///
/// # Safety
/// `p` must be a live handle; `dim_a` and `dim_b` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bivar_pairing_dims(
    p: *const BivarPairing,
    dim_a: *mut usize,
    dim_b: *mut usize,
) -> BivarError {
    guard(|| {
        let p = ref_arg(p, "pairing")?;
        *out_arg(dim_a, "dim_a")? = p.0.dim_a();
        *out_arg(dim_b, "dim_b")? = p.0.dim_b();
        Ok(())
    })
}

/// `||a, b||`.
///
/// # Safety
/// `a` and `b` must point to `2 * dim_a` and `2 * dim_b` doubles; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn bivar_pairing_eval(
    p: *const BivarPairing,
    a: *const f64,
    dim_a: usize,
    b: *const f64,
    dim_b: usize,
    out: *mut f64,
) -> BivarError {
    guard(|| {
        let p = ref_arg(p, "pairing")?;
        let (a, b) = (vector_arg(a, dim_a, "a")?, vector_arg(b, dim_b, "b")?);
        *out_arg(out, "out")? = p.0.evaluate(&a, &b)?;
        Ok(())
    })
}

/// Parses a catalog name or an expression in `t` on `[lo, hi]`.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bivar_function_parse(
    text: *const c_char,
    lo: f64,
    hi: f64,
    out: *mut *mut BivarFunction,
) -> BivarError {
    guard(|| {
        let out = out_arg(out, "out")?;
        let f = FunctionSpec::from_source(str_arg(text, "text")?, Interval::new(lo, hi)?)?;
        *out = Box::into_raw(Box::new(BivarFunction(f)));
        Ok(())
    })
}

/// # Safety
/// `f` must come from [`bivar_function_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bivar_function_free(f: *mut BivarFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of components of the function's values; 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bivar_function_dim(f: *const BivarFunction) -> usize {
    f.as_ref().map_or(0, |f| f.0.codomain_dim())
}

/// Writes `f(t)` as `2 * dim` interleaved doubles into `out`, which holds
/// `out_len` doubles.
///
/// # Safety
/// `f` must be a live handle; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bivar_function_eval(
    f: *const BivarFunction,
    t: f64,
    out: *mut f64,
    out_len: usize,
) -> BivarError {
    guard(|| {
        let f = ref_arg(f, "function")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = f.0.eval(t)?;
        if out_len < 2 * v.dim() {
            return Err(Error::Dimension {
                expected: 2 * v.dim(),
                got: out_len,
            }
            .into());
        }
        let out = std::slice::from_raw_parts_mut(out, out_len);
        for (i, z) in v.components().iter().enumerate() {
            out[2 * i] = z.re;
            out[2 * i + 1] = z.im;
        }
        Ok(())
    })
}

/// Estimates the variation of `f` under `p` against `k`. A diverging or
/// unconverged estimate is still a success; inspect its status.
///
/// # Safety
/// Handles must be live; `k` must point to `2 * k_dim` doubles; `cfg` may be
/// null for the defaults; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bivar_estimate(
    f: *const BivarFunction,
    p: *const BivarPairing,
    k: *const f64,
    k_dim: usize,
    cfg: *const BivarRefineConfig,
    out: *mut *mut BivarEstimate,
) -> BivarError {
    guard(|| {
        let out = out_arg(out, "out")?;
        let (f, p) = (ref_arg(f, "function")?, ref_arg(p, "pairing")?);
        let k = vector_arg(k, k_dim, "k")?;
        let cfg: RefineConfig = cfg
            .as_ref()
            .map_or_else(RefineConfig::default, |c| (*c).into());
        let est = estimate_variation(&f.0, &*p.0, &k, &cfg)?;
        *out = Box::into_raw(Box::new(BivarEstimate(est)));
        Ok(())
    })
}

/// # Safety
/// `e` must come from [`bivar_estimate`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bivar_estimate_free(e: *mut BivarEstimate) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Lower bound on the variation; NaN for a null handle.
///
/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bivar_estimate_value(e: *const BivarEstimate) -> f64 {
    e.as_ref().map_or(f64::NAN, |e| e.0.value)
}

/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bivar_estimate_status(
    e: *const BivarEstimate,
    out: *mut BivarVariationStatus,
) -> BivarError {
    guard(|| {
        *out_arg(out, "out")? = status_code(ref_arg(e, "estimate")?.0.status);
        Ok(())
    })
}

/// Size of the final partition; 0 for a null handle.
///
/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bivar_estimate_partition_size(e: *const BivarEstimate) -> usize {
    e.as_ref().map_or(0, |e| e.0.final_partition.len())
}

/// Serializes the estimate as JSON. Free the result with
/// [`bivar_string_free`].
///
/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bivar_estimate_to_json(
    e: *const BivarEstimate,
    out: *mut *mut c_char,
) -> BivarError {
    guard(|| {
        let out = out_arg(out, "out")?;
        let e = &ref_arg(e, "estimate")?.0;
        let doc = serde_json::json!({
            "value": e.value,
            "status": e.status,
            "trace": e.trace,
            "partition_size": e.final_partition.len(),
        });
        *out = CString::new(doc.to_string())
            .expect("JSON has no nul")
            .into_raw();
        Ok(())
    })
}

/// `||f, h||_2G` on a shared interval. Fails with `BIVAR_ERROR_NOT_BOUNDED`
/// or `BIVAR_ERROR_UNCONVERGED` when either variation estimate does not
/// converge.
///
/// # Safety
/// Handles must be live; `k` must point to `2 * k_dim` doubles; `cfg` may be
/// null; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bivar_bv_two_norm(
    f: *const BivarFunction,
    h: *const BivarFunction,
    p: *const BivarPairing,
    k: *const f64,
    k_dim: usize,
    cfg: *const BivarRefineConfig,
    out: *mut f64,
) -> BivarError {
    guard(|| {
        let out = out_arg(out, "out")?;
        let (f, h, p) = (ref_arg(f, "f")?, ref_arg(h, "h")?, ref_arg(p, "pairing")?);
        let k = vector_arg(k, k_dim, "k")?;
        let cfg: RefineConfig = cfg
            .as_ref()
            .map_or_else(RefineConfig::default, |c| (*c).into());
        let f = BvFunction::new(f.0.clone(), p.0.clone(), k.clone(), cfg)?;
        let h = BvFunction::new(h.0.clone(), p.0.clone(), k, cfg)?;
        *out = bv_two_norm_2g(&f, &h)?;
        Ok(())
    })
}

/// Runs the randomized axiom checks on `p`. Writes the total failure count
/// and, when `report_json` is non-null, the full report (free with
/// [`bivar_string_free`]).
///
/// # Safety
/// `p` must be a live handle; `failures` must be writable; `report_json`
/// may be null.
#[no_mangle]
pub unsafe extern "C" fn bivar_check_pairing_axioms(
    p: *const BivarPairing,
    symmetric: bool,
    trials: usize,
    seed: u64,
    failures: *mut usize,
    report_json: *mut *mut c_char,
) -> BivarError {
    guard(|| {
        let p = ref_arg(p, "pairing")?;
        let failures = out_arg(failures, "failures")?;
        let report = check_pairing_axioms(&*p.0, symmetric, trials, seed)?;
        *failures = report.failures();
        if let Some(slot) = report_json.as_mut() {
            let text = serde_json::to_string(&report).expect("reports serialize");
            *slot = CString::new(text).expect("JSON has no nul").into_raw();
        }
        Ok(())
    })
}
