//! C ABI for `qifkit`.
//!
//! Objects are opaque heap handles created by `qif_*_new` functions and
//! released with the matching `qif_*_free`. Every fallible call returns a
//! [`QifStatus`]; on failure a message is available from
//! [`qif_last_error_message`] on the same thread. Results are written through
//! out-pointers only on success. Orders `alpha` and `beta` accept `INFINITY`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qifkit::alpha::{
    arimoto_mi, min_expected_alpha_loss, renyi_divergence, renyi_entropy, sibson_mi,
};
use qifkit::capacity::{
    alpha_beta_leakage, bayes_capacity, ldp_leakage, maximal_alpha_leakage,
    multiplicative_f_capacity, renyi_ldp,
};
use qifkit::vulnerability::{gen_leakage, gen_prior_vulnerability};
use qifkit::{
    push, AlphaOrder, Channel, FMean, GainSpec, LeakageKind, Prior, QifError,
    SimplexOptimizerConfig,
};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QifStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidDistribution = 2,
    DimensionMismatch = 3,
    OutOfRange = 4,
    InvalidGain = 5,
    InvalidMean = 6,
    Unsupported = 7,
    Parse = 8,
    /// A buffer passed by the caller is too small.
    BufferTooSmall = 9,
    Panic = 99,
}

impl From<&QifError> for QifStatus {
    fn from(e: &QifError) -> Self {
        match e {
            QifError::Empty(_)
            | QifError::InvalidDistribution(_)
            | QifError::NotStochastic { .. } => QifStatus::InvalidDistribution,
            QifError::DimensionMismatch { .. } => QifStatus::DimensionMismatch,
            QifError::OutOfRange { .. } => QifStatus::OutOfRange,
            QifError::InvalidGain(_)
            | QifError::DomainViolation { .. }
            | QifError::NegativeVulnerability(_) => QifStatus::InvalidGain,
            QifError::NonConvexInverse(_)
            | QifError::InvalidMeanClass(_)
            | QifError::NotMultiplicative(_)
            | QifError::LimitMean(_) => QifStatus::InvalidMean,
            QifError::Unsupported(_) | QifError::SizeLimit(_) => QifStatus::Unsupported,
            QifError::Parse(_) => QifStatus::Parse,
        }
    }
}

/// Opaque prior distribution.
pub struct QifPrior {
    inner: Prior,
}

/// Opaque row-stochastic channel.
pub struct QifChannel {
    inner: Channel,
}

/// Opaque gain function.
pub struct QifGain {
    inner: GainSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Status(QifStatus, String),
    Qif(QifError),
}

impl From<QifError> for Failure {
    fn from(e: QifError) -> Self {
        Failure::Qif(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(QifStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, catching panics and recording errors.
fn guard<F>(body: F) -> QifStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QifStatus::Ok
        }
        Ok(Err(Failure::Qif(e))) => {
            set_error(e.to_string());
            QifStatus::from(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".to_owned());
            QifStatus::Panic
        }
    }
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn mean(id: *const c_char) -> Result<FMean, Failure> {
    if id.is_null() {
        return Err(null("mean identifier"));
    }
    let s = CStr::from_ptr(id)
        .to_str()
        .map_err(|_| Failure::Status(QifStatus::Parse, "identifier is not UTF-8".to_owned()))?;
    Ok(s.parse()?)
}

unsafe fn write_buffer(src: &[f64], out: *mut f64, capacity: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Ok(());
    }
    if capacity < src.len() {
        return Err(Failure::Status(
            QifStatus::BufferTooSmall,
            format!("buffer holds {capacity} values, need {}", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qif_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The string must
/// be released with [`qif_string_free`].
#[no_mangle]
pub extern "C" fn qif_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(m) => m.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn qif_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `probs` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qif_prior_new(
    probs: *const f64,
    n: usize,
    out: *mut *mut QifPrior,
) -> QifStatus {
    guard(|| {
        let p = Prior::new(slice(probs, n, "probs")?.to_vec())?;
        write(out, Box::into_raw(Box::new(QifPrior { inner: p })))
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qif_prior_uniform(n: usize, out: *mut *mut QifPrior) -> QifStatus {
    guard(|| write(out, Box::into_raw(Box::new(QifPrior { inner: Prior::uniform(n)? }))))
}

/// # Safety
/// `prior` must be NULL or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn qif_prior_free(prior: *mut QifPrior) {
    if !prior.is_null() {
        drop(Box::from_raw(prior));
    }
}

/// Size of the secret alphabet, or 0 for NULL.
///
/// # Safety
/// `prior` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qif_prior_len(prior: *const QifPrior) -> usize {
    prior.as_ref().map_or(0, |p| p.inner.len())
}

/// Builds a channel from a row-major `rows × cols` matrix.
///
/// # Safety
/// `data` must point to `rows * cols` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qif_channel_new(
    data: *const f64,
    rows: usize,
    cols: usize,
    out: *mut *mut QifChannel,
) -> QifStatus {
    guard(|| {
        let len = rows.checked_mul(cols).ok_or_else(|| {
            Failure::Status(QifStatus::OutOfRange, "matrix size overflows".to_owned())
        })?;
        let c = Channel::from_row_major(rows, cols, slice(data, len, "data")?.to_vec())?;
        write(out, Box::into_raw(Box::new(QifChannel { inner: c })))
    })
}

/// # Safety
/// `channel` must be NULL or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn qif_channel_free(channel: *mut QifChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// # Safety
/// `channel` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qif_channel_n_inputs(channel: *const QifChannel) -> usize {
    channel.as_ref().map_or(0, |c| c.inner.n_inputs())
}

/// # Safety
/// `channel` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qif_channel_n_outputs(channel: *const QifChannel) -> usize {
    channel.as_ref().map_or(0, |c| c.inner.n_outputs())
}

/// Identity gain: the adversary guesses the secret exactly.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qif_gain_identity(out: *mut *mut QifGain) -> QifStatus {
    guard(|| write(out, Box::into_raw(Box::new(QifGain { inner: GainSpec::Identity }))))
}

/// Simplex gain `g(w, x) = w_x` over soft guesses.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qif_gain_simplex(out: *mut *mut QifGain) -> QifStatus {
    guard(|| write(out, Box::into_raw(Box::new(QifGain { inner: GainSpec::Simplex }))))
}

/// Gain matrix in row-major order, rows indexed by actions.
///
/// # Safety
/// `data` must point to `n_actions * n_secrets` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qif_gain_matrix(
    data: *const f64,
    n_actions: usize,
    n_secrets: usize,
    out: *mut *mut QifGain,
) -> QifStatus {
    guard(|| {
        let len = n_actions.checked_mul(n_secrets).ok_or_else(|| {
            Failure::Status(QifStatus::OutOfRange, "matrix size overflows".to_owned())
        })?;
        let flat = slice(data, len, "data")?;
        if n_secrets == 0 {
            return Err(QifError::Empty("gain row").into());
        }
        let rows = flat.chunks(n_secrets).map(<[f64]>::to_vec).collect();
        write(out, Box::into_raw(Box::new(QifGain { inner: GainSpec::matrix(rows)? })))
    })
}

/// # Safety
/// `gain` must be NULL or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn qif_gain_free(gain: *mut QifGain) {
    if !gain.is_null() {
        drop(Box::from_raw(gain));
    }
}

/// Bayes capacity `ln Σ_y max_x C[x,y]` in nats.
///
/// # Safety
/// Pointers must be live handles / writable.
#[no_mangle]
pub unsafe extern "C" fn qif_bayes_capacity(channel: *const QifChannel, out: *mut f64) -> QifStatus {
    guard(|| write(out, bayes_capacity(&handle(channel, "channel")?.inner)))
}

/// Local differential privacy level of the channel (may be `INFINITY`).
///
/// # Safety
/// Pointers must be live handles / writable.
#[no_mangle]
pub unsafe extern "C" fn qif_ldp_leakage(channel: *const QifChannel, out: *mut f64) -> QifStatus {
    guard(|| write(out, ldp_leakage(&handle(channel, "channel")?.inner)))
}

/// # Safety
/// Pointers must be live handles / writable.
#[no_mangle]
pub unsafe extern "C" fn qif_renyi_ldp(
    channel: *const QifChannel,
    alpha: f64,
    out: *mut f64,
) -> QifStatus {
    guard(|| {
        let c = &handle(channel, "channel")?.inner;
        write(out, renyi_ldp(c, AlphaOrder::new(alpha)?)?)
    })
}

/// # Safety
/// Pointers must be live handles / writable.
#[no_mangle]
pub unsafe extern "C" fn qif_renyi_entropy(
    prior: *const QifPrior,
    alpha: f64,
    out: *mut f64,
) -> QifStatus {
    guard(|| {
        let p = &handle(prior, "prior")?.inner;
        write(out, renyi_entropy(p, AlphaOrder::new(alpha)?))
    })
}

/// Rényi divergence `D_α(mu ‖ pi)`.
///
/// # Safety
/// Pointers must be live handles / writable.
#[no_mangle]
pub unsafe extern "C" fn qif_renyi_divergence(
    mu: *const QifPrior,
    pi: *const QifPrior,
    alpha: f64,
    out: *mut f64,
) -> QifStatus {
    guard(|| {
        let mu = &handle(mu, "mu")?.inner;
        let pi = &handle(pi, "pi")?.inner;
        write(out, renyi_divergence(mu, pi, AlphaOrder::new(alpha)?)?)
    })
}

/// # Safety
/// Pointers must be live handles / writable.
#[no_mangle]
pub unsafe extern "C" fn qif_arimoto_mi(
    prior: *const QifPrior,
    channel: *const QifChannel,
    alpha: f64,
    out: *mut f64,
) -> QifStatus {
    guard(|| {
        let p = &handle(prior, "prior")?.inner;
        let c = &handle(channel, "channel")?.inner;
        let a = AlphaOrder::new(alpha)?;
        write(out, arimoto_mi(&push(p, c)?, a))
    })
}

/// # Safety
/// Pointers must be live handles / writable.
#[no_mangle]
pub unsafe extern "C" fn qif_sibson_mi(
    prior: *const QifPrior,
    channel: *const QifChannel,
    alpha: f64,
    out: *mut f64,
) -> QifStatus {
    guard(|| {
        let p = &handle(prior, "prior")?.inner;
        let c = &handle(channel, "channel")?.inner;
        write(out, sibson_mi(p, c, AlphaOrder::new(alpha)?)?)
    })
}

/// Minimal expected α-loss; the minimizing soft guess is copied to
/// `minimizer` (capacity `minimizer_len`) unless it is NULL.
///
/// # Safety
/// Pointers must be live handles / writable buffers of the stated size.
#[no_mangle]
pub unsafe extern "C" fn qif_min_expected_alpha_loss(
    prior: *const QifPrior,
    alpha: f64,
    out: *mut f64,
    minimizer: *mut f64,
    minimizer_len: usize,
) -> QifStatus {
    guard(|| {
        let p = &handle(prior, "prior")?.inner;
        let (v, guess) = min_expected_alpha_loss(p, AlphaOrder::new(alpha)?)?;
        write_buffer(guess.probs(), minimizer, minimizer_len)?;
        write(out, v)
    })
}

/// (α, β)-leakage in nats.
///
/// # Safety
/// Pointers must be live handles / writable.
#[no_mangle]
pub unsafe extern "C" fn qif_alpha_beta_leakage(
    prior: *const QifPrior,
    channel: *const QifChannel,
    alpha: f64,
    beta: f64,
    out: *mut f64,
) -> QifStatus {
    guard(|| {
        let p = &handle(prior, "prior")?.inner;
        let c = &handle(channel, "channel")?.inner;
        write(out, alpha_beta_leakage(p, c, AlphaOrder::new(alpha)?, beta)?)
    })
}

/// Generalized prior vulnerability for the mean identified by `f`
/// (e.g. `"affine"`, `"alpha:2"`, `"pow:0.5"`).
///
/// # Safety
/// Pointers must be live handles, a NUL-terminated string, and writable.
#[no_mangle]
pub unsafe extern "C" fn qif_gen_prior_vulnerability(
    prior: *const QifPrior,
    gain: *const QifGain,
    f: *const c_char,
    out: *mut f64,
) -> QifStatus {
    guard(|| {
        let p = &handle(prior, "prior")?.inner;
        let g = &handle(gain, "gain")?.inner;
        write(out, gen_prior_vulnerability(p, g, &mean(f)?)?)
    })
}

/// Generalized average-case leakage; multiplicative (nats) when
/// `multiplicative` is true, additive otherwise.
///
/// # Safety
/// Pointers must be live handles, NUL-terminated strings, and writable.
#[no_mangle]
pub unsafe extern "C" fn qif_gen_leakage(
    prior: *const QifPrior,
    channel: *const QifChannel,
    gain: *const QifGain,
    f: *const c_char,
    h: *const c_char,
    multiplicative: bool,
    out: *mut f64,
) -> QifStatus {
    guard(|| {
        let p = &handle(prior, "prior")?.inner;
        let c = &handle(channel, "channel")?.inner;
        let g = &handle(gain, "gain")?.inner;
        let kind = if multiplicative {
            LeakageKind::Multiplicative
        } else {
            LeakageKind::Additive
        };
        write(out, gen_leakage(p, c, g, &mean(f)?, &mean(h)?, kind)?)
    })
}

/// Capacity `ln f⁻¹(Σ_y max_x C[x,y])` for means with a multiplicative inverse.
///
/// # Safety
/// Pointers must be live handles, a NUL-terminated string, and writable.
#[no_mangle]
pub unsafe extern "C" fn qif_multiplicative_f_capacity(
    channel: *const QifChannel,
    f: *const c_char,
    out: *mut f64,
) -> QifStatus {
    guard(|| {
        let c = &handle(channel, "channel")?.inner;
        write(out, multiplicative_f_capacity(c, &mean(f)?)?)
    })
}

/// Maximal α-leakage (sup over priors of Arimoto mutual information) with the
/// default optimizer and the given seed. The best prior is copied to
/// `witness` (capacity `witness_len`) unless it is NULL.
///
/// # Safety
/// Pointers must be live handles / writable buffers of the stated size.
#[no_mangle]
pub unsafe extern "C" fn qif_maximal_alpha_leakage(
    channel: *const QifChannel,
    alpha: f64,
    seed: u64,
    out: *mut f64,
    witness: *mut f64,
    witness_len: usize,
) -> QifStatus {
    guard(|| {
        let c = &handle(channel, "channel")?.inner;
        let cfg = SimplexOptimizerConfig {
            seed,
            ..SimplexOptimizerConfig::default()
        };
        let sup = maximal_alpha_leakage(c, AlphaOrder::new(alpha)?, &cfg)?;
        write_buffer(sup.witness.probs(), witness, witness_len)?;
        write(out, sup.value)
    })
}
