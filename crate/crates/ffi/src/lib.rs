//! C ABI over the scattering engine: an opaque solver handle created from a
//! JSON spec, explicit error codes, and caller-owned output buffers. Every
//! entry point is panic-proof (unwinds are caught and reported as a numeric
//! error) and null-safe.

use std::ffi::CStr;
use std::panic::{catch_unwind, AssertUnwindSafe};

use libc::{c_char, c_int};

use sswkb::io;
use sswkb::solver::{self, SolveConfig, SolveResult, Verdict};
use sswkb::{Channel, EngineError, PotentialSpec};

/// Success.
pub const SSWKB_OK: c_int = 0;
/// Null pointer argument, unknown selector, or state not yet computed.
pub const SSWKB_ERR_NULL: c_int = -1;
/// Spec or parameters rejected.
pub const SSWKB_ERR_INVALID_SPEC: c_int = -2;
/// Numerical failure during the solve (details via last_error).
pub const SSWKB_ERR_NUMERICS: c_int = -3;
/// Input string was not valid UTF-8.
pub const SSWKB_ERR_UTF8: c_int = -4;

/// Matching radius `R`.
pub const SSWKB_FIELD_R: c_int = 0;
/// Strong-core limit weight integral, inner region.
pub const SSWKB_FIELD_P_EPS: c_int = 1;
/// Strong-core limit weight integral, outer region.
pub const SSWKB_FIELD_P_TAU: c_int = 2;
/// Join constant multiplying the cosine reference.
pub const SSWKB_FIELD_C_PLUS: c_int = 3;
/// Join constant multiplying the sine reference.
pub const SSWKB_FIELD_S_PLUS: c_int = 4;
/// Far-field phase shift.
pub const SSWKB_FIELD_DELTA_L: c_int = 5;
/// Tabulated weight integral, inner region.
pub const SSWKB_FIELD_P_EPS_EXACT: c_int = 6;
/// Tabulated weight integral, outer region.
pub const SSWKB_FIELD_P_TAU_EXACT: c_int = 7;
/// Outer edge of the tabulated range.
pub const SSWKB_FIELD_T_MAX: c_int = 8;

/// Verdict values returned by `sswkb_solver_verdict`.
pub const SSWKB_VERDICT_CONVERGED: c_int = 0;
pub const SSWKB_VERDICT_NOT_ESTABLISHED: c_int = 1;

/// Opaque solver state behind the handle.
pub struct SswkbSolver {
    spec: PotentialSpec,
    ch: Channel,
    cfg: SolveConfig,
    result: Option<SolveResult>,
    last_error: String,
}

fn code_for(e: &EngineError) -> c_int {
    match e {
        EngineError::InvalidSpec(_) | EngineError::Parse(_) => SSWKB_ERR_INVALID_SPEC,
        _ => SSWKB_ERR_NUMERICS,
    }
}

/// Copy `s` into a caller buffer with NUL termination, truncating if needed.
/// Returns the full length of `s` in bytes (excluding the NUL), so calling
/// with `(NULL, 0)` sizes the buffer.
fn fill_buffer(s: &str, buf: *mut c_char, cap: usize) -> isize {
    if !buf.is_null() && cap > 0 {
        let n = s.len().min(cap - 1);
        // Safety: caller promises `buf` points at `cap` writable bytes.
        unsafe {
            std::ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
    }
    s.len() as isize
}

/// Create a solver from a JSON potential spec (same schema as the CLI
/// `--spec`), wavenumber and angular momentum. Returns null when the spec
/// fails to parse or validate.
///
/// # Safety
/// `spec_json` must be a valid NUL-terminated string or null.
#[no_mangle]
pub unsafe extern "C" fn sswkb_solver_new(
    spec_json: *const c_char,
    k: f64,
    l: u32,
) -> *mut SswkbSolver {
    if spec_json.is_null() {
        return std::ptr::null_mut();
    }
    let text = match CStr::from_ptr(spec_json).to_str() {
        Ok(t) => t,
        Err(_) => return std::ptr::null_mut(),
    };
    let built = catch_unwind(|| -> Result<SswkbSolver, EngineError> {
        let spec: PotentialSpec = serde_parse(text)?;
        spec.validate()?;
        let ch = Channel::new(k, l)?;
        Ok(SswkbSolver {
            spec,
            ch,
            cfg: SolveConfig::default(),
            result: None,
            last_error: String::new(),
        })
    });
    match built {
        Ok(Ok(h)) => Box::into_raw(Box::new(h)),
        _ => std::ptr::null_mut(),
    }
}

fn serde_parse(text: &str) -> Result<PotentialSpec, EngineError> {
    // Unlike the CLI, the C entry point takes inline JSON only — no implicit
    // file reads on behalf of a host process.
    if !text.trim_start().starts_with('{') {
        return Err(EngineError::Parse("spec must be inline JSON".into()));
    }
    io::load_spec(text)
}

/// Set the truncation orders of the inner and outer chains (defaults 4, 4).
/// Clears any previously computed result.
///
/// # Safety
/// `h` must be a live handle from `sswkb_solver_new` or null.
#[no_mangle]
pub unsafe extern "C" fn sswkb_solver_set_orders(h: *mut SswkbSolver, n: u32, m: u32) -> c_int {
    let Some(h) = h.as_mut() else {
        return SSWKB_ERR_NULL;
    };
    h.cfg.n_order = n as usize;
    h.cfg.m_order = m as usize;
    h.result = None;
    SSWKB_OK
}

/// Run the solve. Returns `SSWKB_OK` and stores the result on the handle, or
/// a negative code with the message available via `sswkb_solver_last_error`.
///
/// # Safety
/// `h` must be a live handle from `sswkb_solver_new` or null.
#[no_mangle]
pub unsafe extern "C" fn sswkb_solver_run(h: *mut SswkbSolver) -> c_int {
    let Some(h) = h.as_mut() else {
        return SSWKB_ERR_NULL;
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| solver::solve(&h.spec, &h.ch, &h.cfg)));
    match outcome {
        Ok(Ok(res)) => {
            h.result = Some(res);
            h.last_error.clear();
            SSWKB_OK
        }
        Ok(Err(e)) => {
            h.result = None;
            h.last_error = e.to_string();
            code_for(&e)
        }
        Err(_) => {
            h.result = None;
            h.last_error = "internal panic during solve".into();
            SSWKB_ERR_NUMERICS
        }
    }
}

/// Read one scalar result field (see the `SSWKB_FIELD_*` selectors) into
/// `*out`. Requires a successful `sswkb_solver_run` first.
///
/// # Safety
/// `h` must be a live handle or null; `out` must point to a writable f64 or
/// be null.
#[no_mangle]
pub unsafe extern "C" fn sswkb_solver_get(
    h: *const SswkbSolver,
    field: c_int,
    out: *mut f64,
) -> c_int {
    let Some(h) = h.as_ref() else {
        return SSWKB_ERR_NULL;
    };
    if out.is_null() {
        return SSWKB_ERR_NULL;
    }
    let Some(res) = h.result.as_ref() else {
        return SSWKB_ERR_NULL;
    };
    let value = match field {
        SSWKB_FIELD_R => res.big_r,
        SSWKB_FIELD_P_EPS => res.p_eps_asym,
        SSWKB_FIELD_P_TAU => res.p_tau_asym,
        SSWKB_FIELD_C_PLUS => res.c_plus,
        SSWKB_FIELD_S_PLUS => res.s_plus,
        SSWKB_FIELD_DELTA_L => res.delta_l,
        SSWKB_FIELD_P_EPS_EXACT => res.p_eps_exact,
        SSWKB_FIELD_P_TAU_EXACT => res.p_tau_exact,
        SSWKB_FIELD_T_MAX => res.t_max,
        _ => return SSWKB_ERR_NULL,
    };
    *out = value;
    SSWKB_OK
}

/// Convergence verdict of the last run: `SSWKB_VERDICT_CONVERGED` or
/// `SSWKB_VERDICT_NOT_ESTABLISHED`; negative without a result.
///
/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sswkb_solver_verdict(h: *const SswkbSolver) -> c_int {
    let Some(h) = h.as_ref() else {
        return SSWKB_ERR_NULL;
    };
    match h.result.as_ref().map(|r| r.verdict) {
        Some(Verdict::Converged) => SSWKB_VERDICT_CONVERGED,
        Some(Verdict::ConvergenceNotEstablished) => SSWKB_VERDICT_NOT_ESTABLISHED,
        None => SSWKB_ERR_NULL,
    }
}

/// Serialize the run summary (same schema as the CLI) into `buf`. Returns the
/// JSON length in bytes excluding the NUL, truncating the copy to `cap`;
/// query with `(NULL, 0)` first to size the buffer. Negative without a
/// result.
///
/// # Safety
/// `h` must be a live handle or null; `buf` must point to `cap` writable
/// bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn sswkb_solver_summary_json(
    h: *const SswkbSolver,
    buf: *mut c_char,
    cap: usize,
) -> isize {
    let Some(h) = h.as_ref() else {
        return SSWKB_ERR_NULL as isize;
    };
    let Some(res) = h.result.as_ref() else {
        return SSWKB_ERR_NULL as isize;
    };
    let json = io::to_json(&io::summarize(res, None));
    fill_buffer(json.trim_end(), buf, cap)
}

/// Copy the message of the last failed run into `buf` (same buffer contract
/// as `sswkb_solver_summary_json`). Returns 0 when there is no pending error.
///
/// # Safety
/// `h` must be a live handle or null; `buf` must point to `cap` writable
/// bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn sswkb_solver_last_error(
    h: *const SswkbSolver,
    buf: *mut c_char,
    cap: usize,
) -> isize {
    let Some(h) = h.as_ref() else {
        return SSWKB_ERR_NULL as isize;
    };
    fill_buffer(&h.last_error, buf, cap)
}

/// Destroy a handle. Null is a no-op; anything else must come from
/// `sswkb_solver_new` and not be used afterwards.
///
/// # Safety
/// See above.
#[no_mangle]
pub unsafe extern "C" fn sswkb_solver_free(h: *mut SswkbSolver) {
    if h.is_null() {
        return;
    }
    drop(Box::from_raw(h));
}
