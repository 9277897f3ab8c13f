//! C ABI for `hom-fingerprint`.
//!
//! Every fallible function returns an [`HfpStatus`] and writes its result
//! through an out-pointer. On failure a message is available from
//! [`hfp_last_error_message`] on the calling thread until the next failing
//! call there. Source parameters and linear codes are opaque handles created
//! by `*_new`-style functions and released with the matching `*_free`.
//! Panics never cross the boundary; they surface as [`HfpStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hom_fingerprint as hf;
use hom_fingerprint::{Error, ErrorConvention};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfpStatus {
    Ok = 0,
    NullPointer = 1,
    /// A numeric argument lies outside its domain.
    Domain = 2,
    InvalidArgument = 3,
    LengthMismatch = 4,
    /// Code construction or certification failed.
    Code = 5,
    /// A search or bound has no solution in range.
    NoSolution = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfpDecision {
    Different = 0,
    Equal = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfpConvention {
    ConditionalMisidentification = 0,
    AverageError = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HfpHypothesisPair {
    pub q_d: f64,
    pub q_e: f64,
    pub p2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HfpChernoffResult {
    pub c: f64,
    pub alpha_star: f64,
    pub objective_min: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HfpEventTally {
    pub n_runs: u64,
    pub n_coincidence: u64,
    pub n_double: u64,
    pub n_two_click: u64,
}

/// Opaque source/channel/detector parameters.
pub struct HfpSourceParams(hf::SourceParams);

/// Opaque binary linear code.
pub struct HfpLinearCode(hf::LinearCode);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(HfpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain { .. } => HfpStatus::Domain,
            Error::LengthMismatch(..) => HfpStatus::LengthMismatch,
            Error::RankDeficient(_) | Error::CodeDimensions { .. } => HfpStatus::Code,
            Error::RateVanishes | Error::NoCrossover(_) => HfpStatus::NoSolution,
            Error::InvalidBits(_)
            | Error::InvalidDistribution(_)
            | Error::InvalidParams(_)
            | Error::CountOutOfRange { .. } => HfpStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(HfpStatus::NullPointer, format!("{name} is null"))
}

fn guard<F>(f: F) -> HfpStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HfpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            HfpStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

fn pair_from(hp: &HfpHypothesisPair) -> Result<hf::HypothesisPair, Failure> {
    Ok(hf::HypothesisPair::new(hp.q_d, hp.q_e, hp.p2)?)
}

fn chernoff_to_c(r: hf::ChernoffResult) -> HfpChernoffResult {
    HfpChernoffResult {
        c: r.c,
        alpha_star: r.alpha_star,
        objective_min: r.objective_min,
    }
}

/// NUL-terminated message for the last failure on this thread; empty if
/// none. Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hfp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hfp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---- source parameters ----------------------------------------------------

/// # Safety
/// `out` must be valid for a pointer write. Free the handle with
/// [`hfp_source_params_free`].
#[no_mangle]
pub unsafe extern "C" fn hfp_source_params_new(
    eta_nbar: f64,
    g2: f64,
    dark_ratio: f64,
    w: f64,
    out: *mut *mut HfpSourceParams,
) -> HfpStatus {
    guard(|| {
        let p = hf::SourceParams::new(eta_nbar, g2, dark_ratio, w)?;
        write(out, "out", Box::into_raw(Box::new(HfpSourceParams(p))))
    })
}

/// # Safety
/// `params` must be null or a handle from [`hfp_source_params_new`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn hfp_source_params_free(params: *mut HfpSourceParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Number of validity warnings (parameters outside the leading-order regime).
///
/// # Safety
/// `params` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_source_params_warning_count(
    params: *const HfpSourceParams,
    out: *mut u32,
) -> HfpStatus {
    guard(|| {
        let p = borrow(params, "params")?;
        write(out, "out", p.0.warnings().len() as u32)
    })
}

/// # Safety
/// `params` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_two_click_probability(
    params: *const HfpSourceParams,
    out: *mut f64,
) -> HfpStatus {
    guard(|| {
        let p = borrow(params, "params")?;
        write(out, "out", hf::two_click_probability(&p.0)?)
    })
}

/// # Safety
/// `params` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_coincidence_fraction(
    params: *const HfpSourceParams,
    v: f64,
    out: *mut f64,
) -> HfpStatus {
    guard(|| {
        let p = borrow(params, "params")?;
        let v = hf::Visibility::new(v)?;
        write(out, "out", hf::coincidence_fraction(&p.0, v))
    })
}

/// # Safety
/// `params` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_hypothesis_pair(
    params: *const HfpSourceParams,
    delta_min: f64,
    out: *mut HfpHypothesisPair,
) -> HfpStatus {
    guard(|| {
        let p = borrow(params, "params")?;
        let hp = hf::hypothesis_pair(&p.0, delta_min)?;
        write(
            out,
            "out",
            HfpHypothesisPair {
                q_d: hp.q_d,
                q_e: hp.q_e,
                p2: hp.p2,
            },
        )
    })
}

/// # Safety
/// `params` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_rescaled_chernoff_zeta(
    params: *const HfpSourceParams,
    delta_min: f64,
    out: *mut f64,
) -> HfpStatus {
    guard(|| {
        let p = borrow(params, "params")?;
        write(out, "out", hf::rescaled_chernoff_zeta(&p.0, delta_min)?)
    })
}

// ---- decision and exponents -----------------------------------------------

/// # Safety
/// `hp` must point to a readable pair; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_exact_error_probability(
    n2: u64,
    hp: *const HfpHypothesisPair,
    out: *mut f64,
) -> HfpStatus {
    guard(|| {
        let hp = pair_from(borrow(hp, "hp")?)?;
        write(out, "out", hf::exact_error_probability(n2, &hp)?)
    })
}

/// # Safety
/// `hp` must point to a readable pair; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_decide(
    n_c: u64,
    n2: u64,
    hp: *const HfpHypothesisPair,
    out: *mut HfpDecision,
) -> HfpStatus {
    guard(|| {
        let hp = pair_from(borrow(hp, "hp")?)?;
        let decision = match hf::decide(n_c, n2, &hp)?.decision {
            hf::Decision::Different => HfpDecision::Different,
            hf::Decision::Equal => HfpDecision::Equal,
        };
        write(out, "out", decision)
    })
}

/// Chernoff information between two distributions of length `len`.
///
/// # Safety
/// `p_d` and `p_e` must each point to `len` readable doubles; `out` valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_chernoff_information(
    p_d: *const f64,
    p_e: *const f64,
    len: usize,
    out: *mut HfpChernoffResult,
) -> HfpStatus {
    guard(|| {
        if p_d.is_null() {
            return Err(null("p_d"));
        }
        if p_e.is_null() {
            return Err(null("p_e"));
        }
        let a = std::slice::from_raw_parts(p_d, len);
        let b = std::slice::from_raw_parts(p_e, len);
        write(out, "out", chernoff_to_c(hf::chernoff_information(a, b)?))
    })
}

/// # Safety
/// `hp` must point to a readable pair; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_two_click_chernoff(
    hp: *const HfpHypothesisPair,
    out: *mut HfpChernoffResult,
) -> HfpStatus {
    guard(|| {
        let hp = pair_from(borrow(hp, "hp")?)?;
        write(out, "out", chernoff_to_c(hf::two_click_chernoff(&hp)?))
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_asymptotic_error(
    n_runs: f64,
    eta_nbar: f64,
    zeta: f64,
    out: *mut f64,
) -> HfpStatus {
    guard(|| write(out, "out", hf::asymptotic_error(n_runs, eta_nbar, zeta)?))
}

// ---- codes and rates --------------------------------------------------------

/// `1 − H₂(δ)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_gv_rate(delta_min: f64, out: *mut f64) -> HfpStatus {
    guard(|| write(out, "out", hf::gv_rate(delta_min)?))
}

/// Rate bound of the extended code as a function of its distance.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_modified_gv_rate(delta_ext: f64, out: *mut f64) -> HfpStatus {
    guard(|| write(out, "out", hf::modified_gv_rate(delta_ext)?))
}

/// Extended-code distance matching a base-code distance.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_map_coherent_to_twophoton_distance(delta_coh: f64, out: *mut f64) -> HfpStatus {
    guard(|| write(out, "out", hf::map_coherent_to_twophoton_distance(delta_coh)?))
}

/// Codeword-length overhead `M/m`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_overhead_ratio(delta_coh: f64, out: *mut f64) -> HfpStatus {
    guard(|| write(out, "out", hf::overhead_ratio(delta_coh)?))
}

/// Draws and certifies a random `m × n` code.
///
/// # Safety
/// `out` must be valid for a pointer write. Free with
/// [`hfp_linear_code_free`].
#[no_mangle]
pub unsafe extern "C" fn hfp_linear_code_random(
    n: usize,
    m: usize,
    seed: u64,
    out: *mut *mut HfpLinearCode,
) -> HfpStatus {
    guard(|| {
        let code = hf::generate_random_linear_code(n, m, seed)?;
        write(out, "out", Box::into_raw(Box::new(HfpLinearCode(code))))
    })
}

/// Parses `{"n", "m", "generator", "certified_min_distance"?}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hfp_linear_code_from_json(
    json: *const c_char,
    out: *mut *mut HfpLinearCode,
) -> HfpStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(HfpStatus::InvalidArgument, format!("json is not UTF-8: {e}")))?;
        let code: hf::LinearCode = serde_json::from_str(text)
            .map_err(|e| Failure(HfpStatus::InvalidArgument, format!("invalid code JSON: {e}")))?;
        write(out, "out", Box::into_raw(Box::new(HfpLinearCode(code))))
    })
}

/// Writes the code's JSON and a NUL terminator into `buf`. `out_len`
/// receives the length without the terminator; if `capacity` is too small
/// nothing is written to `buf` and [`HfpStatus::BufferTooSmall`] is returned.
///
/// # Safety
/// `code` must be a live handle; `buf` writable for `capacity` bytes (or
/// null when `capacity` is 0); `out_len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_linear_code_to_json(
    code: *const HfpLinearCode,
    buf: *mut c_char,
    capacity: usize,
    out_len: *mut usize,
) -> HfpStatus {
    guard(|| {
        let code = borrow(code, "code")?;
        let text = serde_json::to_string(&code.0)
            .map_err(|e| Failure(HfpStatus::InvalidArgument, e.to_string()))?;
        write(out_len, "out_len", text.len())?;
        if capacity < text.len() + 1 {
            return Err(Failure(
                HfpStatus::BufferTooSmall,
                format!("need {} bytes", text.len() + 1),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
        buf.add(text.len()).write(0);
        Ok(())
    })
}

/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hfp_linear_code_free(code: *mut HfpLinearCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Writes `n` and `m`.
///
/// # Safety
/// `code` must be a live handle; `n` and `m` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_linear_code_dims(
    code: *const HfpLinearCode,
    n: *mut usize,
    m: *mut usize,
) -> HfpStatus {
    guard(|| {
        let code = borrow(code, "code")?;
        write(n, "n", code.0.n())?;
        write(m, "m", code.0.m())
    })
}

/// Exhaustively certified minimum distance, computing it if absent.
///
/// # Safety
/// `code` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_linear_code_min_distance(
    code: *const HfpLinearCode,
    out: *mut u32,
) -> HfpStatus {
    guard(|| {
        let code = borrow(code, "code")?;
        let d = match code.0.certified_min_distance() {
            Some(d) => d,
            None => code.0.exhaustive_min_distance()?,
        };
        write(out, "out", d)
    })
}

/// Encodes `input_len` bits (one byte each, 0 or 1) into `output`, which
/// must hold `output_len >= m` bytes.
///
/// # Safety
/// `code` must be a live handle; `input` readable for `input_len` bytes;
/// `output` writable for `output_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn hfp_linear_code_encode(
    code: *const HfpLinearCode,
    input: *const u8,
    input_len: usize,
    output: *mut u8,
    output_len: usize,
) -> HfpStatus {
    guard(|| {
        let code = borrow(code, "code")?;
        if input.is_null() {
            return Err(null("input"));
        }
        if output.is_null() {
            return Err(null("output"));
        }
        let bits = std::slice::from_raw_parts(input, input_len)
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(Failure(HfpStatus::InvalidArgument, format!("input byte {b} is not a bit"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let word = code.0.encode(&bits)?;
        if output_len < word.len() {
            return Err(Failure(
                HfpStatus::BufferTooSmall,
                format!("need {} output bytes", word.len()),
            ));
        }
        for (i, &b) in word.bits().iter().enumerate() {
            output.add(i).write(b as u8);
        }
        Ok(())
    })
}

// ---- information --------------------------------------------------------------

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_classical_bound(n: u64, p_err: f64, out: *mut f64) -> HfpStatus {
    guard(|| write(out, "out", hf::classical_bound(n, p_err)?))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_two_photon_information(n2: u64, m_seq: u64, out: *mut f64) -> HfpStatus {
    guard(|| write(out, "out", hf::two_photon_information(n2, m_seq)?))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_coherent_information(nbar: f64, m_seq: u64, out: *mut f64) -> HfpStatus {
    guard(|| write(out, "out", hf::coherent_information(nbar, m_seq)?))
}

/// Crossover lengths for an [`HfpConvention`] value; `out_coherent` receives 0 when the coherent-state
/// scheme never crosses in the search range.
///
/// # Safety
/// `out_two_photon` and `out_coherent` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_crossover_length(
    p_err: f64,
    delta_coh: f64,
    convention: u32,
    out_two_photon: *mut u64,
    out_coherent: *mut u64,
) -> HfpStatus {
    guard(|| {
        let convention = match convention {
            c if c == HfpConvention::ConditionalMisidentification as u32 => {
                ErrorConvention::ConditionalMisidentification
            }
            c if c == HfpConvention::AverageError as u32 => ErrorConvention::AverageError,
            c => {
                return Err(Failure(
                    HfpStatus::InvalidArgument,
                    format!("unknown convention {c}"),
                ))
            }
        };
        let c = hf::crossover_length(p_err, delta_coh, convention)?;
        write(out_two_photon, "out_two_photon", c.two_photon)?;
        write(out_coherent, "out_coherent", c.coherent.unwrap_or(0))
    })
}

// ---- simulation ---------------------------------------------------------------

/// Seeded Monte Carlo batch; identical for identical arguments on every
/// platform and thread count.
///
/// # Safety
/// `params` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hfp_simulate_batch(
    params: *const HfpSourceParams,
    v: f64,
    n_runs: u64,
    seed: u64,
    out: *mut HfpEventTally,
) -> HfpStatus {
    guard(|| {
        let p = borrow(params, "params")?;
        let v = hf::Visibility::new(v)?;
        let t = hf::simulate_batch(&p.0, v, n_runs, seed)?;
        write(
            out,
            "out",
            HfpEventTally {
                n_runs: t.n_runs,
                n_coincidence: t.n_coincidence,
                n_double: t.n_double,
                n_two_click: t.n_two_click,
            },
        )
    })
}
