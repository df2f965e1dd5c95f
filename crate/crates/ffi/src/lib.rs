//! C interface to `xlab-core`.
//!
//! Graphs and spaces are opaque handles created by `xlab_*_new`/`_parse`
//! functions and released with the matching `_free`. Every fallible call
//! returns an [`XlabStatus`]; on failure `xlab_last_error` describes the
//! problem for the calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use xlab_core::densities::density;
use xlab_core::graphs::parse_graph;
use xlab_core::scalar::format_rational;
use xlab_core::spaces::AnySpace;
use xlab_core::spectral::spectrum;
use xlab_core::{Error, FiniteMarkovSpace, Graph};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Degenerate = 5,
    Resource = 6,
    Precondition = 7,
    Mismatch = 8,
    Unknown = 9,
    Io = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

/// Opaque pattern graph.
pub struct XlabGraph(Graph);

/// Opaque finite Markov space, in f64 or exact rational arithmetic.
pub struct XlabSpace(AnySpace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> XlabStatus {
    match e {
        Error::Parse { .. } | Error::Json(_) => XlabStatus::Parse,
        Error::Validation(_) => XlabStatus::Validation,
        Error::Degenerate { .. } => XlabStatus::Degenerate,
        Error::Resource(_) => XlabStatus::Resource,
        Error::Precondition(_) => XlabStatus::Precondition,
        Error::Mismatch { .. } => XlabStatus::Mismatch,
        Error::Unknown(_) => XlabStatus::Unknown,
        Error::Io(_) => XlabStatus::Io,
    }
}

struct Fail(XlabStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> XlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            XlabStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_error(format!("internal panic: {msg}"));
            XlabStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(XlabStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(XlabStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Copies `s` plus a terminating NUL into `buf`. `len` receives the length
/// without the NUL, also when the buffer is too small.
unsafe fn write_str(s: &str, buf: *mut c_char, cap: usize, len: *mut usize) -> Result<(), Fail> {
    *out_arg(len, "len")? = s.len();
    if s.len() + 1 > cap {
        return Err(Fail(XlabStatus::BufferTooSmall, format!("buffer needs {} bytes", s.len() + 1)));
    }
    if buf.is_null() {
        return Err(null("buf"));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Message of the last failed call on this thread, or NULL after a
/// successful one. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn xlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn xlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses a graph in edge-list text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xlab_graph_parse(text: *const c_char, out: *mut *mut XlabGraph) -> XlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let g = parse_graph(str_arg(text, "text")?)?;
        *out = Box::into_raw(Box::new(XlabGraph(g)));
        Ok(())
    })
}

/// Builds a named pattern such as `K_4`, `C_5`, `P_3`, `S_4`, `Q_3` or `K_2x3`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xlab_graph_named(name: *const c_char, out: *mut *mut XlabGraph) -> XlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let g = Graph::named(str_arg(name, "name")?)?;
        *out = Box::into_raw(Box::new(XlabGraph(g)));
        Ok(())
    })
}

/// # Safety
/// `g` must be a live graph handle; `vertices` and `edges` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xlab_graph_size(g: *const XlabGraph, vertices: *mut usize, edges: *mut usize) -> XlabStatus {
    guard(|| {
        let g = &ref_arg(g, "graph")?.0;
        *out_arg(vertices, "vertices")? = g.vertex_count();
        *out_arg(edges, "edges")? = g.edge_count();
        Ok(())
    })
}

/// Releases a graph. NULL is ignored.
///
/// # Safety
/// `g` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xlab_graph_free(g: *mut XlabGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Builds an f64 space from a row-major `n x n` edge-mass matrix. With
/// `normalize` nonzero the matrix is scaled to total mass one.
///
/// # Safety
/// `eta` must point to `n * n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xlab_space_from_matrix(
    eta: *const f64,
    n: usize,
    normalize: i32,
    out: *mut *mut XlabSpace,
) -> XlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        if eta.is_null() {
            return Err(null("eta"));
        }
        let len = n.checked_mul(n).ok_or_else(|| Fail(XlabStatus::Resource, "matrix too large".into()))?;
        let flat = std::slice::from_raw_parts(eta, len).to_vec();
        let s = FiniteMarkovSpace::from_flat(n, flat, normalize != 0)?;
        *out = Box::into_raw(Box::new(XlabSpace(AnySpace::F64(s))));
        Ok(())
    })
}

/// Parses a space from its JSON description (f64 or rational mode).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xlab_space_from_json(json: *const c_char, out: *mut *mut XlabSpace) -> XlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let s = AnySpace::from_json_str(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(XlabSpace(s)));
        Ok(())
    })
}

/// Number of atoms, and whether the space uses exact rationals.
///
/// # Safety
/// `s` must be a live space handle; `atoms` and `rational` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xlab_space_info(s: *const XlabSpace, atoms: *mut usize, rational: *mut i32) -> XlabStatus {
    guard(|| {
        let s = &ref_arg(s, "space")?.0;
        *out_arg(atoms, "atoms")? = s.n();
        *out_arg(rational, "rational")? = matches!(s, AnySpace::Rational(_)) as i32;
        Ok(())
    })
}

/// Releases a space. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xlab_space_free(s: *mut XlabSpace) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Homomorphism density `t(G, W)`, or the hom-measure total mass when
/// `normalized` is zero. Rational spaces are evaluated exactly and rounded.
///
/// # Safety
/// `g` and `s` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xlab_density(
    g: *const XlabGraph,
    s: *const XlabSpace,
    normalized: i32,
    out: *mut f64,
) -> XlabStatus {
    guard(|| {
        let g = &ref_arg(g, "graph")?.0;
        let s = &ref_arg(s, "space")?.0;
        let out = out_arg(out, "out")?;
        *out = match s {
            AnySpace::F64(s) => density(g, s, normalized != 0)?,
            AnySpace::Rational(s) => {
                use xlab_core::Scalar;
                density(g, s, normalized != 0)?.to_f64()
            }
        };
        Ok(())
    })
}

/// Exact density as a reduced fraction `p/q` (or integer) for rational
/// spaces. `len` receives the string length; a buffer of `len + 1` bytes
/// always suffices.
///
/// # Safety
/// `g` and `s` must be live handles; `buf` must hold `cap` bytes; `len`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn xlab_density_exact(
    g: *const XlabGraph,
    s: *const XlabSpace,
    normalized: i32,
    buf: *mut c_char,
    cap: usize,
    len: *mut usize,
) -> XlabStatus {
    guard(|| {
        let g = &ref_arg(g, "graph")?.0;
        let AnySpace::Rational(s) = &ref_arg(s, "space")?.0 else {
            return Err(Fail(XlabStatus::Precondition, "exact density needs a rational space".into()));
        };
        let t = density(g, s, normalized != 0)?;
        write_str(&format_rational(&t), buf, cap, len)
    })
}

/// Eigenvalues of the adjacency operator, sorted descending. `len`
/// receives the atom count; `XLAB_STATUS_BUFFER_TOO_SMALL` is returned when
/// `cap` is below it.
///
/// # Safety
/// `s` must be a live handle; `values` must hold `cap` doubles; `len`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn xlab_spectrum(
    s: *const XlabSpace,
    values: *mut f64,
    cap: usize,
    len: *mut usize,
) -> XlabStatus {
    guard(|| {
        let s = &ref_arg(s, "space")?.0;
        let len = out_arg(len, "len")?;
        *len = s.n();
        if cap < s.n() {
            return Err(Fail(XlabStatus::BufferTooSmall, format!("need room for {} eigenvalues", s.n())));
        }
        if values.is_null() {
            return Err(null("values"));
        }
        let spec = match s {
            AnySpace::F64(s) => spectrum(s)?,
            AnySpace::Rational(s) => spectrum(s)?,
        };
        std::slice::from_raw_parts_mut(values, spec.len()).copy_from_slice(spec.values());
        Ok(())
    })
}
