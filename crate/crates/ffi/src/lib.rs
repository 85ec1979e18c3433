//! C ABI for the constrained-sampling library.
//!
//! Every function returns a [`CsStatus`]; results are written through out
//! pointers. On failure a message is kept per thread and can be read with
//! [`cs_last_error_message`]. Bodies and surrogates are opaque handles that
//! must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use constrained_sampling::geometry::{ConvexBody, Halfspace, Penalty, PenaltyKind};
use constrained_sampling::linalg::SpdMatrix;
use constrained_sampling::metrics::{wasserstein_empirical, EmpiricalMeasure};
use constrained_sampling::potential::{Potential, SurrogatePotential};
use constrained_sampling::samplers::{run_chain, Algorithm, ChainOptions};
use constrained_sampling::schedules::{select_parameters, Metric, ScheduleRequest};
use constrained_sampling::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidBody = 3,
    DimensionMismatch = 4,
    NonConvergence = 5,
    NotSpd = 6,
    NonFinite = 7,
    SizeMismatch = 8,
    Degenerate = 9,
    Unsupported = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsPenaltyKind {
    Euclidean = 0,
    Bregman = 1,
    Gauge = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsAlgorithm {
    Clmc = 0,
    Cklmc = 1,
    Crlmc = 2,
    Crklmc = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsMetric {
    W1 = 0,
    W2 = 1,
}

/// Output of [`cs_select_parameters`]; `gamma` is NaN for overdamped schemes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsSchedulePlan {
    pub lambda: f64,
    pub h: f64,
    pub n: u64,
    pub gamma: f64,
}

/// Opaque convex body.
pub struct CsBody(ConvexBody);

/// Opaque surrogate potential.
pub struct CsSurrogate(SurrogatePotential);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> CsStatus {
    match e {
        Error::InvalidBody(_) => CsStatus::InvalidBody,
        Error::DimensionMismatch { .. } => CsStatus::DimensionMismatch,
        Error::NonConvergence { .. } => CsStatus::NonConvergence,
        Error::NotSpd => CsStatus::NotSpd,
        Error::NonFinite { .. } => CsStatus::NonFinite,
        Error::SizeMismatch(_) => CsStatus::SizeMismatch,
        Error::DegenerateDensity(_) | Error::DegenerateInput(_) => CsStatus::Degenerate,
        Error::UnsupportedCombination(_) => CsStatus::Unsupported,
        Error::Domain(_) | Error::InvalidArgument(_) => CsStatus::InvalidArgument,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            CsStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            CsStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            CsStatus::Panic
        }
    }
}

unsafe fn input<'a, T>(ptr: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn output<'a, T>(ptr: *mut T, len: usize, what: &'static str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(slice::from_raw_parts_mut(ptr, len))
}

unsafe fn handle<'a, T>(ptr: *const T, what: &'static str) -> Result<&'a T, Fail> {
    ptr.as_ref().ok_or(Fail::Null(what))
}

unsafe fn write<T>(ptr: *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if ptr.is_null() {
        return Err(Fail::Null(what));
    }
    ptr.write(value);
    Ok(())
}

unsafe fn square(ptr: *const f64, dim: usize, what: &'static str) -> Result<SpdMatrix, Fail> {
    let data = input(ptr, dim * dim, what)?;
    let rows: Vec<Vec<f64>> = data.chunks(dim).map(<[f64]>::to_vec).collect();
    Ok(SpdMatrix::from_rows(&rows)?)
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            let dst = slice::from_raw_parts_mut(buf as *mut u8, len);
            dst[..n].copy_from_slice(&msg.as_bytes()[..n]);
            dst[n] = 0;
        }
        msg.len()
    })
}

/// Ball with the given center (length `dim`) and radius.
///
/// # Safety
/// `center` must hold `dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_body_ball(dim: usize, center: *const f64, radius: f64, out: *mut *mut CsBody) -> CsStatus {
    guard(|| {
        let c = input(center, dim, "center")?.to_vec();
        let body = ConvexBody::ball(c, radius)?;
        write(out, Box::into_raw(Box::new(CsBody(body))), "out")
    })
}

/// Axis-aligned box.
///
/// # Safety
/// `lower` and `upper` must hold `dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_body_box(
    dim: usize,
    lower: *const f64,
    upper: *const f64,
    out: *mut *mut CsBody,
) -> CsStatus {
    guard(|| {
        let lo = input(lower, dim, "lower")?.to_vec();
        let hi = input(upper, dim, "upper")?.to_vec();
        let body = ConvexBody::cuboid(lo, hi)?;
        write(out, Box::into_raw(Box::new(CsBody(body))), "out")
    })
}

/// Polytope `{x : a_iᵀx <= b_i}`; `normals` is row-major `count × dim`.
///
/// # Safety
/// `normals` must hold `count*dim` doubles and `offsets` `count`.
#[no_mangle]
pub unsafe extern "C" fn cs_body_polytope(
    dim: usize,
    count: usize,
    normals: *const f64,
    offsets: *const f64,
    out: *mut *mut CsBody,
) -> CsStatus {
    guard(|| {
        if dim == 0 {
            return Err(Error::InvalidBody("dimension must be positive".into()).into());
        }
        let a = input(normals, count * dim, "normals")?;
        let b = input(offsets, count, "offsets")?;
        let hs = a
            .chunks(dim)
            .zip(b)
            .map(|(n, &o)| Halfspace::new(n.to_vec(), o))
            .collect();
        let body = ConvexBody::polytope(hs)?;
        write(out, Box::into_raw(Box::new(CsBody(body))), "out")
    })
}

/// # Safety
/// `body` must come from a `cs_body_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_body_free(body: *mut CsBody) {
    if !body.is_null() {
        drop(Box::from_raw(body));
    }
}

/// # Safety
/// `body` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_body_dim(body: *const CsBody, out: *mut usize) -> CsStatus {
    guard(|| write(out, handle(body, "body")?.0.dim(), "out"))
}

/// # Safety
/// `x` must hold `dim(body)` doubles.
#[no_mangle]
pub unsafe extern "C" fn cs_body_contains(body: *const CsBody, x: *const f64, out: *mut bool) -> CsStatus {
    guard(|| {
        let b = &handle(body, "body")?.0;
        let x = input(x, b.dim(), "x")?;
        write(out, b.contains(x), "out")
    })
}

/// Euclidean projection of `x` onto the body, written to `out` (`dim` doubles).
///
/// # Safety
/// `x` and `out` must hold `dim(body)` doubles.
#[no_mangle]
pub unsafe extern "C" fn cs_body_project(body: *const CsBody, x: *const f64, out: *mut f64) -> CsStatus {
    guard(|| {
        let b = &handle(body, "body")?.0;
        let p = b.euclidean_project(input(x, b.dim(), "x")?)?;
        output(out, b.dim(), "out")?.copy_from_slice(&p);
        Ok(())
    })
}

/// Gauge value `max(1, inf{t : x ∈ tK})`.
///
/// # Safety
/// `x` must hold `dim(body)` doubles.
#[no_mangle]
pub unsafe extern "C" fn cs_body_gauge(body: *const CsBody, x: *const f64, out: *mut f64) -> CsStatus {
    guard(|| {
        let b = &handle(body, "body")?.0;
        let g = b.gauge(input(x, b.dim(), "x")?)?;
        write(out, g, "out")
    })
}

/// Surrogate `f + d_K/(2λ²)` with `f(x) = ½ (x-μ)ᵀA(x-μ)`. `center` and
/// `precision` may be null for the standard Gaussian; `q` is read only for
/// the Bregman kind (row-major `dim × dim`). The body is copied.
///
/// # Safety
/// Non-null arrays must have the sizes above; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_surrogate_new(
    body: *const CsBody,
    kind: CsPenaltyKind,
    q: *const f64,
    lambda: f64,
    center: *const f64,
    precision: *const f64,
    out: *mut *mut CsSurrogate,
) -> CsStatus {
    guard(|| {
        let b = handle(body, "body")?.0.clone();
        let dim = b.dim();
        let mu = if center.is_null() {
            vec![0.0; dim]
        } else {
            input(center, dim, "center")?.to_vec()
        };
        let a = if precision.is_null() {
            SpdMatrix::identity(dim)
        } else {
            square(precision, dim, "precision")?
        };
        let kind = match kind {
            CsPenaltyKind::Euclidean => PenaltyKind::Euclidean,
            CsPenaltyKind::Gauge => PenaltyKind::Gauge,
            CsPenaltyKind::Bregman => PenaltyKind::Bregman {
                q: square(q, dim, "q")?,
            },
        };
        let pen = Penalty::new(kind, lambda, &b)?;
        let sp = SurrogatePotential::new(Potential::quadratic(mu, a)?, pen, b)?;
        write(out, Box::into_raw(Box::new(CsSurrogate(sp))), "out")
    })
}

/// # Safety
/// `sp` must come from [`cs_surrogate_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_surrogate_free(sp: *mut CsSurrogate) {
    if !sp.is_null() {
        drop(Box::from_raw(sp));
    }
}

/// # Safety
/// `x` must hold `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn cs_surrogate_value(sp: *const CsSurrogate, x: *const f64, out: *mut f64) -> CsStatus {
    guard(|| {
        let s = &handle(sp, "surrogate")?.0;
        let v = s.value(input(x, s.dim(), "x")?)?;
        write(out, v, "out")
    })
}

/// # Safety
/// `x` and `out` must hold `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn cs_surrogate_gradient(sp: *const CsSurrogate, x: *const f64, out: *mut f64) -> CsStatus {
    guard(|| {
        let s = &handle(sp, "surrogate")?.0;
        let g = s.gradient(input(x, s.dim(), "x")?)?;
        output(out, s.dim(), "out")?.copy_from_slice(&g);
        Ok(())
    })
}

/// # Safety
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_surrogate_smoothness_bound(sp: *const CsSurrogate, out: *mut f64) -> CsStatus {
    guard(|| write(out, handle(sp, "surrogate")?.0.smoothness_bound(), "out"))
}

fn algorithm(a: CsAlgorithm) -> Algorithm {
    match a {
        CsAlgorithm::Clmc => Algorithm::Clmc,
        CsAlgorithm::Cklmc => Algorithm::Cklmc,
        CsAlgorithm::Crlmc => Algorithm::Crlmc,
        CsAlgorithm::Crklmc => Algorithm::Crklmc,
    }
}

/// Runs one chain of `n` steps from `init` and writes the final position.
/// `gamma` is ignored by overdamped schemes; `inside_scale = 1` disables
/// the inside-body step reduction.
///
/// # Safety
/// `init` and `out_final` must hold `dim` doubles; `out_grad_evals` may be null.
#[no_mangle]
pub unsafe extern "C" fn cs_run_chain(
    sp: *const CsSurrogate,
    algo: CsAlgorithm,
    init: *const f64,
    n: usize,
    h: f64,
    gamma: f64,
    inside_scale: f64,
    seed: u64,
    chain_id: u64,
    out_final: *mut f64,
    out_grad_evals: *mut u64,
) -> CsStatus {
    guard(|| {
        let s = &handle(sp, "surrogate")?.0;
        let algo = algorithm(algo);
        let opts = ChainOptions {
            algo,
            n,
            h,
            gamma: algo.is_kinetic().then_some(gamma),
            inside_scale,
            seed,
            chain_id,
            record_trace: false,
        };
        let trace = run_chain(s, input(init, s.dim(), "init")?, &opts)?;
        output(out_final, s.dim(), "out_final")?.copy_from_slice(trace.last());
        if !out_grad_evals.is_null() {
            out_grad_evals.write(trace.grad_evals);
        }
        Ok(())
    })
}

/// # Safety
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_select_parameters(
    algo: CsAlgorithm,
    metric: CsMetric,
    epsilon: f64,
    p: usize,
    m: f64,
    big_m: f64,
    m0: f64,
    user_constant: f64,
    out: *mut CsSchedulePlan,
) -> CsStatus {
    guard(|| {
        let req = ScheduleRequest {
            algo: algorithm(algo),
            metric: match metric {
                CsMetric::W1 => Metric::W1,
                CsMetric::W2 => Metric::W2,
            },
            epsilon,
            p,
            m,
            big_m,
            m0,
            user_constant,
        };
        let plan = select_parameters(&req)?;
        let c = CsSchedulePlan {
            lambda: plan.lambda,
            h: plan.h,
            n: plan.n,
            gamma: plan.gamma.unwrap_or(f64::NAN),
        };
        write(out, c, "out")
    })
}

/// Exact `W_q` between two uniform clouds of `n` points each (row-major
/// `n × dim`).
///
/// # Safety
/// `a` and `b` must hold `n*dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn cs_wasserstein(
    q: f64,
    n: usize,
    dim: usize,
    a: *const f64,
    b: *const f64,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        if dim == 0 {
            return Err(Error::DegenerateInput("dimension must be positive".into()).into());
        }
        let cloud = |ptr, what| -> Result<EmpiricalMeasure, Fail> {
            let data = input(ptr, n * dim, what)?;
            Ok(EmpiricalMeasure::new(data.chunks(dim).map(<[f64]>::to_vec).collect())?)
        };
        let w = wasserstein_empirical(q, &cloud(a, "a")?, &cloud(b, "b")?)?;
        write(out, w, "out")
    })
}
