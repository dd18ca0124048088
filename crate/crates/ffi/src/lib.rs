//! C ABI for ssk-lab.
//!
//! Every fallible function returns an [`SskStatus`]; on failure the message
//! is available from [`ssk_last_error_message`] on the same thread. Spectra
//! are opaque handles released with [`ssk_spectrum_free`]; strings returned
//! by the library are released with [`ssk_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ssk_lab::edgelimit::xi_full_from_spectrum;
use ssk_lab::ensembles::{sample_spectrum, EnsembleKind, SpectrumSample};
use ssk_lab::error::Error;
use ssk_lab::harness::{execute, records_to_jsonl, RunConfig};
use ssk_lab::overlap::{overlap_expansion, overlap_m4_contour, ExpansionGate, OverlapMoments};
use ssk_lab::saddle::{eta_of_e, keyhole_closed_form, ContourSpec, KeyholeKind};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SskStatus {
    Ok = 0,
    InvalidArgument = 1,
    NumericFailure = 2,
    DegenerateSpectrum = 3,
    BranchCut = 4,
    OutOfRegime = 5,
    PreconditionViolated = 6,
    InfeasibleRegime = 7,
    AllTrialsFailed = 8,
    Config = 9,
    Io = 10,
    NullPointer = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SskEnsemble {
    GoeDense = 0,
    GoeZeroDiag = 1,
    GueDense = 2,
    GoeTridiag = 3,
    GueTridiag = 4,
}

impl From<SskEnsemble> for EnsembleKind {
    fn from(e: SskEnsemble) -> Self {
        match e {
            SskEnsemble::GoeDense => EnsembleKind::GoeDense,
            SskEnsemble::GoeZeroDiag => EnsembleKind::GoeZeroDiag,
            SskEnsemble::GueDense => EnsembleKind::GueDense,
            SskEnsemble::GoeTridiag => EnsembleKind::GoeTridiag,
            SskEnsemble::GueTridiag => EnsembleKind::GueTridiag,
        }
    }
}

/// Integrand shapes `e^{az} z^k (z+b)^p` of the keyhole identities.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SskKeyhole {
    InvSqrt = 0,
    Sqrt = 1,
    Pow32 = 2,
    InvSqrtZ2 = 3,
    InvPow32 = 4,
    InvPow32Z2 = 5,
    InvPow52 = 6,
    InvPow52Z2 = 7,
}

impl From<SskKeyhole> for KeyholeKind {
    fn from(k: SskKeyhole) -> Self {
        KeyholeKind::ALL[k as usize]
    }
}

/// Overlap moments. Fields that a method does not produce are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SskMoments {
    pub m2: f64,
    pub m4: f64,
    pub central4: f64,
    pub err: f64,
}

impl From<&OverlapMoments> for SskMoments {
    fn from(m: &OverlapMoments) -> Self {
        Self {
            m2: m.m2,
            m4: m.m4.unwrap_or(f64::NAN),
            central4: m.central4.unwrap_or(f64::NAN),
            err: m.err,
        }
    }
}

/// Opaque eigenvalue sample.
pub struct SskSpectrum(SpectrumSample);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SskStatus {
    match e {
        Error::InvalidArgument(_) => SskStatus::InvalidArgument,
        Error::NumericFailure { .. } => SskStatus::NumericFailure,
        Error::DegenerateSpectrum(_) => SskStatus::DegenerateSpectrum,
        Error::BranchCut(_) => SskStatus::BranchCut,
        Error::OutOfRegime(_) => SskStatus::OutOfRegime,
        Error::PreconditionViolated(_) => SskStatus::PreconditionViolated,
        Error::InfeasibleRegime(_) => SskStatus::InfeasibleRegime,
        Error::AllTrialsFailed(_) => SskStatus::AllTrialsFailed,
        Error::Config(_) => SskStatus::Config,
        Error::Io(_) => SskStatus::Io,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard<F>(f: F) -> SskStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SskStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("{what} must not be null"));
            SskStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic".into());
            SskStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn spectrum_ref<'a>(h: *const SskSpectrum) -> Result<&'a SpectrumSample, Failure> {
    h.as_ref().map(|s| &s.0).ok_or(Failure::Null("spectrum"))
}

/// Message of the last failure on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn ssk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Samples the spectrum of an `n`-by-`n` matrix from `ensemble`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn ssk_spectrum_sample(
    ensemble: SskEnsemble,
    n: usize,
    seed: u64,
    out: *mut *mut SskSpectrum,
) -> SskStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        let s = sample_spectrum(ensemble.into(), n, seed)?;
        *slot = Box::into_raw(Box::new(SskSpectrum(s)));
        Ok(())
    })
}

/// Wraps caller-supplied eigenvalues (any order) in a spectrum handle.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssk_spectrum_from_eigenvalues(
    values: *const f64,
    len: usize,
    out: *mut *mut SskSpectrum,
) -> SskStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        if values.is_null() {
            return Err(Failure::Null("values"));
        }
        let ev = std::slice::from_raw_parts(values, len).to_vec();
        let s = SpectrumSample::from_eigenvalues(EnsembleKind::GoeDense, 0, ev)?;
        *slot = Box::into_raw(Box::new(SskSpectrum(s)));
        Ok(())
    })
}

/// Number of eigenvalues; 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ssk_spectrum_len(h: *const SskSpectrum) -> usize {
    h.as_ref().map_or(0, |s| s.0.eigenvalues.len())
}

/// Copies the eigenvalues, largest first, into `buf`.
///
/// # Safety
/// `h` must be a live handle and `buf` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ssk_spectrum_copy_eigenvalues(
    h: *const SskSpectrum,
    buf: *mut f64,
    len: usize,
) -> SskStatus {
    guard(|| {
        let s = spectrum_ref(h)?;
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        if len < s.eigenvalues.len() {
            return Err(Error::InvalidArgument(format!("buffer holds {len} values, need {}", s.eigenvalues.len())).into());
        }
        std::slice::from_raw_parts_mut(buf, s.eigenvalues.len()).copy_from_slice(&s.eigenvalues);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ssk_spectrum_free(h: *mut SskSpectrum) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Second and fourth overlap moments by contour quadrature.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ssk_overlap_contour(h: *const SskSpectrum, beta: f64, out: *mut SskMoments) -> SskStatus {
    guard(|| {
        let s = spectrum_ref(h)?;
        let slot = out_ref(out, "out")?;
        let m = overlap_m4_contour(s, beta, &ContourSpec::default())?;
        *slot = SskMoments::from(&m);
        Ok(())
    })
}

/// Low-temperature expansion of the overlap moments, without the event gate.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ssk_overlap_expansion(h: *const SskSpectrum, beta: f64, out: *mut SskMoments) -> SskStatus {
    guard(|| {
        let s = spectrum_ref(h)?;
        let slot = out_ref(out, "out")?;
        let (m, _) = overlap_expansion(s, beta, ExpansionGate::Force)?;
        *slot = SskMoments::from(&m);
        Ok(())
    })
}

/// Full-spectrum edge statistic of a spectrum.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ssk_xi_full(h: *const SskSpectrum, out: *mut f64) -> SskStatus {
    guard(|| {
        let s = spectrum_ref(h)?;
        let slot = out_ref(out, "out")?;
        *slot = xi_full_from_spectrum(&s.eigenvalues)?;
        Ok(())
    })
}

/// Height of the steepest-descent contour above `E <= 0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssk_eta_of_e(e: f64, beta: f64, n: usize, out: *mut f64) -> SskStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        *slot = eta_of_e(e, beta, n)?;
        Ok(())
    })
}

/// Closed-form keyhole integral; the value is `re + i im`.
///
/// # Safety
/// `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssk_keyhole_closed_form(
    kind: SskKeyhole,
    a: f64,
    b: f64,
    re: *mut f64,
    im: *mut f64,
) -> SskStatus {
    guard(|| {
        let re = out_ref(re, "re")?;
        let im = out_ref(im, "im")?;
        let v = keyhole_closed_form(kind.into(), a, b)?;
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// Runs an experiment described by a TOML configuration and returns its
/// trial records as JSON lines. Free the result with [`ssk_string_free`].
///
/// # Safety
/// `config_toml` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ssk_run_config(config_toml: *const c_char, out: *mut *mut c_char) -> SskStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        if config_toml.is_null() {
            return Err(Failure::Null("config_toml"));
        }
        let text = CStr::from_ptr(config_toml)
            .to_str()
            .map_err(|_| Error::Config("configuration is not UTF-8".into()))?;
        let cfg = RunConfig::from_toml_str(text)?;
        let run = execute(&cfg)?;
        let jsonl = CString::new(records_to_jsonl(&run.records)).expect("JSON has no nul bytes");
        *slot = jsonl.into_raw();
        Ok(())
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ssk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
