//! C ABI over the polarshort toolkit.
//!
//! Every function returns a [`PsStatus`]; on failure the message is kept per
//! thread and read back with [`ps_last_error`]. Codes are opaque [`PsCode`]
//! handles released with [`ps_code_free`]. Indices crossing the boundary
//! are 1-based, as everywhere else in the toolkit.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;
use std::sync::Arc;

use polarshort::channel::{run_point, StopRule};
use polarshort::codec::{encode, expand_llrs, ScDecoder};
use polarshort::ga::{build_profile, GaParams, ReliabilityProfile};
use polarshort::shortening::{
    generate_pattern, validate_pattern, CodeSpec, Method, ShortenPattern,
};
use polarshort::spectrum::{build_spectrum, lambda_sd};
use polarshort::Error;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidPattern = 3,
    LengthMismatch = 4,
    Panic = 5,
}

/// Shortening pattern generators.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsMethod {
    Pd = 0,
    Cw = 1,
    Rqup = 2,
}

impl From<PsMethod> for Method {
    fn from(m: PsMethod) -> Self {
        match m {
            PsMethod::Pd => Method::Pd,
            PsMethod::Cw => Method::Cw,
            PsMethod::Rqup => Method::Rqup,
        }
    }
}

/// A shortened polar code together with its decoder state.
pub struct PsCode {
    spec: CodeSpec,
    decoder: ScDecoder,
}

/// Sizes of a code.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PsCodeInfo {
    pub n: usize,
    pub n_short: usize,
    pub k: usize,
}

/// Statistics of one simulated Eb/N0 point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PsSimPoint {
    pub ebn0_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub ci95_ber: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(PsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidPattern(_) => PsStatus::InvalidPattern,
            Error::LengthMismatch { .. } => PsStatus::LengthMismatch,
            _ => PsStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PsStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            PsStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(PsStatus::NullPointer, format!("{name} is null"))
}

unsafe fn input<'a, T>(ptr: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn output<'a, T>(
    ptr: *mut T,
    len: usize,
    need: usize,
    name: &str,
) -> Result<&'a mut [T], Failure> {
    if len != need {
        return Err(Error::LengthMismatch {
            expected: need,
            actual: len,
        }
        .into());
    }
    if need == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts_mut(ptr, len))
}

fn profile(n: usize, design_snr_db: f64) -> Result<Arc<ReliabilityProfile>, Failure> {
    Ok(Arc::new(build_profile(
        n,
        &GaParams::from_design_snr(design_snr_db)?,
    )?))
}

fn checked(pattern: &ShortenPattern) -> Result<(), Failure> {
    validate_pattern(pattern).map_err(|v| Error::InvalidPattern(v).into())
}

unsafe fn store(out: *mut *mut PsCode, spec: CodeSpec) -> Result<(), Failure> {
    let decoder = ScDecoder::new(&spec);
    *out = Box::into_raw(Box::new(PsCode { spec, decoder }));
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len`) and returns the full message length
/// without the terminator; 0 when the last call succeeded.
#[no_mangle]
pub unsafe extern "C" fn ps_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Toolkit version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ps_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a code of mother length `n`, shortened to `n_short` by `method`,
/// with `k` information bits. Pass `n_short == n` for the unshortened code.
#[no_mangle]
pub unsafe extern "C" fn ps_code_new(
    n: usize,
    n_short: usize,
    k: usize,
    method: PsMethod,
    design_snr_db: f64,
    out: *mut *mut PsCode,
) -> PsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let prof = profile(n, design_snr_db)?;
        let pattern = generate_pattern(method.into(), &prof, n_short)?;
        store(out, CodeSpec::from_pattern(prof, pattern, k)?)
    })
}

/// Builds a code from an explicit pattern of `len` 1-based indices, which
/// must be closed under bitwise supersets.
#[no_mangle]
pub unsafe extern "C" fn ps_code_from_pattern(
    n: usize,
    indices: *const usize,
    len: usize,
    k: usize,
    design_snr_db: f64,
    out: *mut *mut PsCode,
) -> PsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let pattern =
            ShortenPattern::new(n, input(indices, len, "indices")?.to_vec(), Method::Custom)?;
        checked(&pattern)?;
        let prof = profile(n, design_snr_db)?;
        store(out, CodeSpec::from_pattern(prof, pattern, k)?)
    })
}

/// Releases a code; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ps_code_free(code: *mut PsCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ps_code_info(code: *const PsCode, out: *mut PsCodeInfo) -> PsStatus {
    guard(|| {
        let code = code.as_ref().ok_or_else(|| null("code"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = PsCodeInfo {
            n: code.spec.n,
            n_short: code.spec.n_short,
            k: code.spec.k,
        };
        Ok(())
    })
}

/// Writes the `k` information positions, ascending.
#[no_mangle]
pub unsafe extern "C" fn ps_code_info_set(
    code: *const PsCode,
    out: *mut usize,
    len: usize,
) -> PsStatus {
    guard(|| {
        let code = code.as_ref().ok_or_else(|| null("code"))?;
        output(out, len, code.spec.k, "out")?.copy_from_slice(&code.spec.info_set);
        Ok(())
    })
}

/// Writes the `n - n_short` shortened positions.
#[no_mangle]
pub unsafe extern "C" fn ps_code_pattern(
    code: *const PsCode,
    out: *mut usize,
    len: usize,
) -> PsStatus {
    guard(|| {
        let code = code.as_ref().ok_or_else(|| null("code"))?;
        let p = code.spec.shortening().indices();
        output(out, len, p.len(), "out")?.copy_from_slice(p);
        Ok(())
    })
}

/// Encodes `k` message bits into `n_short` code bits.
#[no_mangle]
pub unsafe extern "C" fn ps_encode(
    code: *const PsCode,
    msg: *const u8,
    msg_len: usize,
    out: *mut u8,
    out_len: usize,
) -> PsStatus {
    guard(|| {
        let code = code.as_ref().ok_or_else(|| null("code"))?;
        let cw = encode(input(msg, msg_len, "msg")?, &code.spec)?;
        output(out, out_len, cw.bits.len(), "out")?.copy_from_slice(&cw.bits);
        Ok(())
    })
}

/// SC-decodes `n_short` channel LLRs (positive favours bit 0) into `k`
/// message bits.
#[no_mangle]
pub unsafe extern "C" fn ps_decode(
    code: *mut PsCode,
    llrs: *const f64,
    llr_len: usize,
    out: *mut u8,
    out_len: usize,
) -> PsStatus {
    guard(|| {
        let code = code.as_mut().ok_or_else(|| null("code"))?;
        let full = expand_llrs(input(llrs, llr_len, "llrs")?, &code.spec)?;
        let msg = code.decoder.decode(&full)?.msg;
        output(out, out_len, msg.len(), "out")?.copy_from_slice(&msg);
        Ok(())
    })
}

/// Simulates one Eb/N0 point until `min_frame_errors` frame errors or
/// `max_frames` frames.
#[no_mangle]
pub unsafe extern "C" fn ps_simulate_point(
    code: *const PsCode,
    ebn0_db: f64,
    min_frame_errors: u64,
    max_frames: u64,
    seed: u64,
    out: *mut PsSimPoint,
) -> PsStatus {
    guard(|| {
        let code = code.as_ref().ok_or_else(|| null("code"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let p = run_point(
            &code.spec,
            ebn0_db,
            &StopRule::new(min_frame_errors, max_frames)?,
            seed,
        )?;
        *out = PsSimPoint {
            ebn0_db: p.ebn0_db,
            frames: p.frames,
            bit_errors: p.bit_errors,
            frame_errors: p.frame_errors,
            ber: p.ber,
            fer: p.fer,
            ci95_ber: p.ci95_ber,
        };
        Ok(())
    })
}

/// Writes the `n` channel indices from most to least reliable.
#[no_mangle]
pub unsafe extern "C" fn ps_rank(
    n: usize,
    design_snr_db: f64,
    out: *mut usize,
    len: usize,
) -> PsStatus {
    guard(|| {
        let prof = profile(n, design_snr_db)?;
        output(out, len, n, "out")?.copy_from_slice(&prof.rank);
        Ok(())
    })
}

/// Writes the `n - n_short` indices shortened by `method`.
#[no_mangle]
pub unsafe extern "C" fn ps_pattern(
    method: PsMethod,
    n: usize,
    n_short: usize,
    design_snr_db: f64,
    out: *mut usize,
    len: usize,
) -> PsStatus {
    guard(|| {
        let prof = profile(n, design_snr_db)?;
        let p = generate_pattern(method.into(), &prof, n_short)?;
        output(out, len, p.len(), "out")?.copy_from_slice(p.indices());
        Ok(())
    })
}

/// Spectrum distance `lambda` of the tree of length `n` after removing the
/// given paths, as the reduced fraction `num / den`.
#[no_mangle]
pub unsafe extern "C" fn ps_lambda(
    n: usize,
    indices: *const usize,
    len: usize,
    num: *mut u64,
    den: *mut u64,
) -> PsStatus {
    guard(|| {
        if num.is_null() || den.is_null() {
            return Err(null("num/den"));
        }
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n).into());
        }
        let pattern =
            ShortenPattern::new(n, input(indices, len, "indices")?.to_vec(), Method::Custom)?;
        let lam = lambda_sd(&build_spectrum(n.trailing_zeros(), Some(&pattern))?);
        *num = *lam.numer();
        *den = *lam.denom();
        Ok(())
    })
}
