//! C ABI over the core library.
//!
//! Complex arrays cross the boundary as interleaved `double` pairs
//! `(re, im)`; lengths are counted in complex elements. Matrices are
//! row-major. Every fallible call returns an [`MsStatus`]; on failure the
//! message is kept per thread and read back with [`ms_last_error_message`].
//! Handles are owned by the caller and released with the matching `*_free`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use modschatten::gabor::{reconstruct, CyclicGridFunction, GaborSystem};
use modschatten::matrix_bank::{factorize_left_diagonal, factorize_right_diagonal, u_norm, LatticeMatrix};
use modschatten::psido::{op_t, wigner_t, Symbol};
use modschatten::schatten::{schatten_norm, singular_values_dense};
use modschatten::weights_lattices::{Exponent, Lattice, Weight};
use modschatten::{Complex64, Error};
use nalgebra::DMatrix;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    ExponentRelation = 4,
    WeightCondition = 5,
    FrameCondition = 6,
    NoConvergence = 7,
    Io = 8,
    Parse = 9,
    Panic = 10,
}

/// Square matrix on the lattice `{0, ..., n-1}`.
pub struct MsMatrix(LatticeMatrix);

/// Phase-space symbol on the `n x n` cyclic grid.
pub struct MsSymbol(Symbol);

/// Gabor system with its canonical dual window.
pub struct MsGabor(GaborSystem);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(MsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidParameter { .. } | Error::WeightNotPositive { .. } | Error::MissingDual => {
                MsStatus::InvalidArgument
            }
            Error::DimensionMismatch { .. } => MsStatus::DimensionMismatch,
            Error::ExponentRelation(_) => MsStatus::ExponentRelation,
            Error::WeightCondition { .. } => MsStatus::WeightCondition,
            Error::FrameCondition { .. } => MsStatus::FrameCondition,
            Error::NoConvergence { .. } => MsStatus::NoConvergence,
            Error::Io(_) => MsStatus::Io,
            Error::Parse(_) | Error::Config { .. } | Error::UnknownSuite(_) => MsStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MsStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MsStatus {
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (MsStatus::Ok, String::new()),
        Ok(Err(Failure(s, m))) => (s, m),
        Err(p) => {
            let m = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            (MsStatus::Panic, m)
        }
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
    status
}

unsafe fn read_complex(ptr: *const f64, len: usize, what: &str) -> Result<Vec<Complex64>, Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    let raw = std::slice::from_raw_parts(ptr, 2 * len);
    Ok(raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

unsafe fn write_complex<'a>(
    out: *mut f64,
    len: usize,
    values: impl ExactSizeIterator<Item = &'a Complex64>,
) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    if values.len() != len {
        return Err(Error::DimensionMismatch {
            context: "output buffer",
            expected: values.len(),
            found: len,
        }
        .into());
    }
    let dst = std::slice::from_raw_parts_mut(out, 2 * len);
    for (d, v) in dst.chunks_exact_mut(2).zip(values) {
        d[0] = v.re;
        d[1] = v.im;
    }
    Ok(())
}

unsafe fn handle<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn grid(values: Vec<Complex64>) -> Result<CyclicGridFunction, Failure> {
    Ok(CyclicGridFunction::new(values)?)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ms_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    V.as_ptr()
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `cap - 1` bytes) and returns its full length in bytes.
/// Pass a null `buf` to query the length.
#[no_mangle]
pub unsafe extern "C" fn ms_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds an `n x n` matrix from `n * n` row-major complex entries.
#[no_mangle]
pub unsafe extern "C" fn ms_matrix_new(n: usize, entries: *const f64, out: *mut *mut MsMatrix) -> MsStatus {
    guard(|| {
        let v = read_complex(entries, n * n, "entries")?;
        let m = LatticeMatrix::new(Lattice::counting(&[n])?, DMatrix::from_row_slice(n, n, &v))?;
        store(out, MsMatrix(m))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ms_matrix_free(m: *mut MsMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Side length of the matrix, 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ms_matrix_dim(m: *const MsMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.n())
}

/// Copies the entries row-major into `out`, which holds `len` complex values.
#[no_mangle]
pub unsafe extern "C" fn ms_matrix_entries(m: *const MsMatrix, out: *mut f64, len: usize) -> MsStatus {
    guard(|| {
        let m = &handle(m, "m")?.0;
        let t = m.entries.transpose();
        write_complex(out, len, t.iter())
    })
}

/// `‖A‖_{U^{p,q}}` with the polynomial pair weight `⟨(j, k)⟩^s`.
/// Exponents may be `INFINITY`.
#[no_mangle]
pub unsafe extern "C" fn ms_matrix_u_norm(m: *const MsMatrix, p: f64, q: f64, s: f64, out: *mut f64) -> MsStatus {
    guard(|| {
        let m = &handle(m, "m")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = u_norm(m, Exponent::new(p)?, Exponent::new(q)?, &Weight::poly(s))?;
        Ok(())
    })
}

/// Schatten `p`-quasi-norm of the matrix.
#[no_mangle]
pub unsafe extern "C" fn ms_matrix_schatten_norm(m: *const MsMatrix, p: f64, out: *mut f64) -> MsStatus {
    guard(|| {
        let m = &handle(m, "m")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = schatten_norm(&singular_values_dense(&m.entries)?, Exponent::new(p)?);
        Ok(())
    })
}

/// Splits `A0 = A1 A2` with unit weights; the diagonal factor is `A1`, or
/// `A2` when `right` is set. Requires `1/p0 = 1/p1 + 1/p2`.
#[no_mangle]
pub unsafe extern "C" fn ms_matrix_factorize(
    m: *const MsMatrix,
    p0: f64,
    p1: f64,
    p2: f64,
    right: bool,
    a1: *mut *mut MsMatrix,
    a2: *mut *mut MsMatrix,
) -> MsStatus {
    guard(|| {
        let m = &handle(m, "m")?.0;
        if a1.is_null() || a2.is_null() {
            return Err(null("a1/a2"));
        }
        let (p0, p1, p2) = (Exponent::new(p0)?, Exponent::new(p1)?, Exponent::new(p2)?);
        let u = Weight::unit();
        let f = if right {
            factorize_right_diagonal(m, p0, p1, p2, &u, &u, &u)?
        } else {
            factorize_left_diagonal(m, p0, p1, p2, &u, &u, &u)?
        };
        store(a1, MsMatrix(f.a1))?;
        store(a2, MsMatrix(f.a2))
    })
}

/// Builds a symbol from `n * n` complex values, position index major.
#[no_mangle]
pub unsafe extern "C" fn ms_symbol_new(n: usize, values: *const f64, out: *mut *mut MsSymbol) -> MsStatus {
    guard(|| {
        let v = read_complex(values, n * n, "values")?;
        store(out, MsSymbol(Symbol::new(n, v)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ms_symbol_free(s: *mut MsSymbol) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Grid size `n` of the symbol, 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ms_symbol_dim(s: *const MsSymbol) -> usize {
    s.as_ref().map_or(0, |s| s.0.n())
}

#[no_mangle]
pub unsafe extern "C" fn ms_symbol_values(s: *const MsSymbol, out: *mut f64, len: usize) -> MsStatus {
    guard(|| write_complex(out, len, handle(s, "s")?.0.values().iter()))
}

/// The `t`-quantization `Op_t(a)` as an `n x n` matrix.
#[no_mangle]
pub unsafe extern "C" fn ms_op_t(s: *const MsSymbol, t: f64, out: *mut *mut MsMatrix) -> MsStatus {
    guard(|| {
        let m = op_t(&handle(s, "s")?.0, t)?;
        store(out, MsMatrix(m))
    })
}

/// Cross `t`-Wigner distribution of two length-`n` signals.
#[no_mangle]
pub unsafe extern "C" fn ms_wigner_t(
    f1: *const f64,
    f2: *const f64,
    n: usize,
    t: f64,
    out: *mut *mut MsSymbol,
) -> MsStatus {
    guard(|| {
        let f1 = grid(read_complex(f1, n, "f1")?)?;
        let f2 = grid(read_complex(f2, n, "f2")?)?;
        store(out, MsSymbol(wigner_t(&f1, &f2, t)?))
    })
}

/// Gabor system with window `g` of length `n`, time step `a` and frequency
/// step `b`, together with its canonical dual window.
#[no_mangle]
pub unsafe extern "C" fn ms_gabor_new(
    window: *const f64,
    n: usize,
    a: usize,
    b: usize,
    out: *mut *mut MsGabor,
) -> MsStatus {
    guard(|| {
        let g = grid(read_complex(window, n, "window")?)?;
        store(out, MsGabor(GaborSystem::new(g, a, b)?.with_canonical_dual()?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ms_gabor_free(g: *mut MsGabor) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Copies the canonical dual window into `out` (`len` complex values).
#[no_mangle]
pub unsafe extern "C" fn ms_gabor_dual(g: *const MsGabor, out: *mut f64, len: usize) -> MsStatus {
    guard(|| {
        let g = &handle(g, "g")?.0;
        let dual = g.dual().ok_or(Error::MissingDual)?;
        write_complex(out, len, dual.values().iter())
    })
}

/// Analyses `f` with the window and synthesises with the dual. Writes the
/// result to `out` and the relative residual to `residual` when non-null.
#[no_mangle]
pub unsafe extern "C" fn ms_gabor_reconstruct(
    g: *const MsGabor,
    f: *const f64,
    n: usize,
    out: *mut f64,
    residual: *mut f64,
) -> MsStatus {
    guard(|| {
        let g = &handle(g, "g")?.0;
        let r = reconstruct(g, &grid(read_complex(f, n, "f")?)?)?;
        write_complex(out, n, r.synthesis_dual.values().iter())?;
        if !residual.is_null() {
            *residual = r.residual_synthesis_dual;
        }
        Ok(())
    })
}
