//! C ABI over the elashift toolkit.
//!
//! Objects cross the boundary as opaque handles created by `*_new` /
//! `*_compute` and released by the matching `*_free`. Every fallible call
//! returns an [`ElashiftStatus`]; on failure a description is available from
//! [`elashift_last_error`] on the same thread. Matrices are dense row-major
//! `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use elashift::ela::{self, Dataset, FeatureStatus, FeatureVector, FEATURE_NAMES, NUM_FEATURES};
use elashift::embed::{self, GaussianEmbedding};
use elashift::nalgebra::DMatrix;
use elashift::shift;
use elashift::suite::{self, ProblemInstance};
use elashift::{doe, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElashiftStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Degenerate = 3,
    Config = 4,
    Io = 5,
    Parse = 6,
    /// The caller's output buffer has the wrong length.
    BufferSize = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElashiftFeatureStatus {
    Ok = 0,
    Degenerate = 1,
    NonFinite = 2,
}

impl From<FeatureStatus> for ElashiftFeatureStatus {
    fn from(s: FeatureStatus) -> Self {
        match s {
            FeatureStatus::Ok => ElashiftFeatureStatus::Ok,
            FeatureStatus::Degenerate => ElashiftFeatureStatus::Degenerate,
            FeatureStatus::NonFinite => ElashiftFeatureStatus::NonFinite,
        }
    }
}

/// A benchmark function instance.
pub struct ElashiftInstance {
    inner: ProblemInstance,
}

/// A Gaussian embedding from D to d dimensions.
pub struct ElashiftEmbedding {
    inner: GaussianEmbedding,
}

/// The 61 features of one sample.
pub struct ElashiftFeatures {
    inner: FeatureVector,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn fail(status: ElashiftStatus, msg: impl Into<String>) -> ElashiftStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> ElashiftStatus {
    let status = match &e {
        Error::Domain(_) => ElashiftStatus::Domain,
        Error::Degenerate(_) => ElashiftStatus::Degenerate,
        Error::Config { .. } => ElashiftStatus::Config,
        Error::Io { .. } => ElashiftStatus::Io,
        Error::Parse { .. } => ElashiftStatus::Parse,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into [`ElashiftStatus::Panic`] and clearing the
/// error message on success.
fn guard(f: impl FnOnce() -> ElashiftStatus) -> ElashiftStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == ElashiftStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(ElashiftStatus::Panic, "internal panic"),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(ElashiftStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

/// Row-major `rows x cols` slice into a matrix.
///
/// # Safety
/// `data` must point to `rows * cols` readable doubles.
unsafe fn matrix(data: *const f64, rows: usize, cols: usize) -> Result<DMatrix<f64>, ElashiftStatus> {
    let n = rows
        .checked_mul(cols)
        .ok_or_else(|| fail(ElashiftStatus::Domain, "matrix size overflows"))?;
    let s = std::slice::from_raw_parts(data, n);
    Ok(DMatrix::from_row_slice(rows, cols, s))
}

/// # Safety
/// `out` must point to `out_len` writable doubles.
unsafe fn write_matrix(m: &DMatrix<f64>, out: *mut f64, out_len: usize) -> ElashiftStatus {
    if out_len != m.len() {
        return fail(
            ElashiftStatus::BufferSize,
            format!("output buffer holds {out_len} values, {} needed", m.len()),
        );
    }
    let out = std::slice::from_raw_parts_mut(out, out_len);
    for (i, row) in m.row_iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out[i * m.ncols() + j] = *v;
        }
    }
    ElashiftStatus::Ok
}

/// Message describing the last failure on this thread; empty after a
/// successful call. Valid until the next call into the library from this
/// thread.
#[no_mangle]
pub extern "C" fn elashift_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Number of features in the schema (61).
#[no_mangle]
pub extern "C" fn elashift_feature_count() -> usize {
    NUM_FEATURES
}

/// NUL-terminated name of feature `index`, or null when out of range. The
/// string is static.
#[no_mangle]
pub extern "C" fn elashift_feature_name(index: usize) -> *const c_char {
    static NAMES: OnceLock<Vec<CString>> = OnceLock::new();
    let names = NAMES.get_or_init(|| FEATURE_NAMES.iter().map(|n| CString::new(*n).unwrap()).collect());
    names.get(index).map_or(ptr::null(), |n| n.as_ptr())
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn elashift_instance_new(
    function_id: u32,
    instance_id: u32,
    dimension: usize,
    out: *mut *mut ElashiftInstance,
) -> ElashiftStatus {
    guard(|| {
        non_null!(out);
        match suite::make_instance(function_id, instance_id, dimension) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ElashiftInstance { inner }));
                ElashiftStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `instance` must come from [`elashift_instance_new`]; `x` must point to
/// `len` doubles and `value` to one writable double.
#[no_mangle]
pub unsafe extern "C" fn elashift_instance_evaluate(
    instance: *const ElashiftInstance,
    x: *const f64,
    len: usize,
    value: *mut f64,
) -> ElashiftStatus {
    guard(|| {
        non_null!(instance, x, value);
        match (*instance).inner.evaluate(std::slice::from_raw_parts(x, len)) {
            Ok(v) => {
                *value = v;
                ElashiftStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Optimum value of the instance.
///
/// # Safety
/// `instance` must come from [`elashift_instance_new`] and `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elashift_instance_f_opt(instance: *const ElashiftInstance, value: *mut f64) -> ElashiftStatus {
    guard(|| {
        non_null!(instance, value);
        *value = (*instance).inner.f_opt();
        ElashiftStatus::Ok
    })
}

/// # Safety
/// `instance` must come from [`elashift_instance_new`] or be null, and must
/// not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn elashift_instance_free(instance: *mut ElashiftInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Latin hypercube sample of `[-5, 5]^dimension`, written row-major into
/// `out` (`sample_size * dimension` doubles).
///
/// # Safety
/// `out` must point to `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn elashift_lhs(
    sample_size: usize,
    dimension: usize,
    seed: u64,
    out: *mut f64,
    out_len: usize,
) -> ElashiftStatus {
    guard(|| {
        non_null!(out);
        match doe::lhs(sample_size, dimension, seed) {
            Ok(d) => write_matrix(&d.points, out, out_len),
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn elashift_embedding_new(
    reduced_dim: usize,
    ambient_dim: usize,
    seed: u64,
    out: *mut *mut ElashiftEmbedding,
) -> ElashiftStatus {
    guard(|| {
        non_null!(out);
        match embed::sample_embedding(reduced_dim, ambient_dim, seed) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ElashiftEmbedding { inner }));
                ElashiftStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Projects `rows` points of the ambient dimension; `out` receives
/// `rows * reduced_dim` doubles.
///
/// # Safety
/// `embedding` must come from [`elashift_embedding_new`]; `points` must hold
/// `rows * cols` doubles and `out` `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn elashift_embedding_project(
    embedding: *const ElashiftEmbedding,
    points: *const f64,
    rows: usize,
    cols: usize,
    out: *mut f64,
    out_len: usize,
) -> ElashiftStatus {
    guard(|| {
        non_null!(embedding, points, out);
        let x = match matrix(points, rows, cols) {
            Ok(x) => x,
            Err(s) => return s,
        };
        match (*embedding).inner.project(&x) {
            Ok(z) => write_matrix(&z, out, out_len),
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `embedding` must come from [`elashift_embedding_new`] or be null, and
/// must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn elashift_embedding_free(embedding: *mut ElashiftEmbedding) {
    if !embedding.is_null() {
        drop(Box::from_raw(embedding));
    }
}

/// Computes all features of `rows` points (row-major, `cols` wide) with
/// objective values `y`.
///
/// # Safety
/// `points` must hold `rows * cols` doubles, `y` `rows` doubles, and `out`
/// must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn elashift_features_compute(
    points: *const f64,
    rows: usize,
    cols: usize,
    y: *const f64,
    seed: u64,
    out: *mut *mut ElashiftFeatures,
) -> ElashiftStatus {
    guard(|| {
        non_null!(points, y, out);
        let x = match matrix(points, rows, cols) {
            Ok(x) => x,
            Err(s) => return s,
        };
        let y = std::slice::from_raw_parts(y, rows).to_vec();
        match Dataset::new(x, y) {
            Ok(ds) => {
                let inner = ela::compute_all(&ds, seed);
                *out = Box::into_raw(Box::new(ElashiftFeatures { inner }));
                ElashiftStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Value and status of feature `index`. Missing values are NaN.
///
/// # Safety
/// `features` must come from [`elashift_features_compute`]; `value` and
/// `status` must be writable.
#[no_mangle]
pub unsafe extern "C" fn elashift_features_get(
    features: *const ElashiftFeatures,
    index: usize,
    value: *mut f64,
    status: *mut ElashiftFeatureStatus,
) -> ElashiftStatus {
    guard(|| {
        non_null!(features, value, status);
        match (*features).inner.entries().get(index) {
            Some(v) => {
                *value = v.value;
                *status = v.status.into();
                ElashiftStatus::Ok
            }
            None => fail(
                ElashiftStatus::Domain,
                format!("feature index {index} is outside 0..{NUM_FEATURES}"),
            ),
        }
    })
}

/// # Safety
/// `features` must come from [`elashift_features_compute`] or be null, and
/// must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn elashift_features_free(features: *mut ElashiftFeatures) {
    if !features.is_null() {
        drop(Box::from_raw(features));
    }
}

/// `(projected - reference) / (|reference| + 1e-9)`.
#[no_mangle]
pub extern "C" fn elashift_relative_shift(projected: f64, reference: f64) -> f64 {
    shift::relative_shift(projected, reference)
}

/// Per-feature shifts into `out` (61 doubles); NaN where either side is not ok.
///
/// # Safety
/// Both handles must come from [`elashift_features_compute`]; `out` must
/// point to `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn elashift_feature_shift(
    projected: *const ElashiftFeatures,
    reference: *const ElashiftFeatures,
    out: *mut f64,
    out_len: usize,
) -> ElashiftStatus {
    guard(|| {
        non_null!(projected, reference, out);
        if out_len != NUM_FEATURES {
            return fail(
                ElashiftStatus::BufferSize,
                format!("output buffer holds {out_len} values, {NUM_FEATURES} needed"),
            );
        }
        match shift::feature_shift(&(*projected).inner, &(*reference).inner) {
            Ok(d) => {
                let out = std::slice::from_raw_parts_mut(out, out_len);
                for (o, v) in out.iter_mut().zip(d) {
                    *o = v.unwrap_or(f64::NAN);
                }
                ElashiftStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn elashift_version() -> *const c_char {
    const V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains NUL"),
    };
    V.as_ptr()
}
