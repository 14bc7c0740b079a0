//! C interface to `pauli-core`.
//!
//! Objects are opaque heap handles created by `pauli_*_new`-style functions
//! and released with the matching `*_free`. Every fallible call returns a
//! [`PauliStatus`]; on failure `pauli_last_error` describes the cause on the
//! calling thread. Field buffers are component-major: all points of the
//! first component, then the next, each point as an interleaved `(re, im)`
//! pair for spinors or one real value for vector fields.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;

use pauli_core::algebra::RepKind;
use pauli_core::cli::{verification_reports, VerifyOptions};
use pauli_core::currents::decompose_current;
use pauli_core::evolve::{propagate, PropagatorConfig, Scheme};
use pauli_core::fields::{preset_by_name, EMPotential, PresetParams};
use pauli_core::state::{init_gaussian, GaussianPacket};
use pauli_core::{Grid, SpinorField, Units};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    BufferSize = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliScheme {
    SplitStep = 0,
    Krylov = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliRep {
    Both = 0,
    Original = 1,
    Convenient = 2,
}

/// A uniform periodic grid.
pub struct PauliGrid(Grid);

/// A two-component spinor field on a grid.
pub struct PauliSpinor(SpinorField);

/// A potential preset together with the particle charge and mass.
pub struct PauliPotential {
    potential: EMPotential,
    units: Units,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn fail(status: PauliStatus, msg: impl Into<String>) -> PauliStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> PauliStatus) -> PauliStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == PauliStatus::Ok {
                set_error("");
            }
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(PauliStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

macro_rules! deref {
    ($p:expr, $name:literal) => {
        match unsafe { $p.as_ref() } {
            Some(v) => v,
            None => return fail(PauliStatus::NullPointer, concat!($name, " is null")),
        }
    };
}

macro_rules! deref_mut {
    ($p:expr, $name:literal) => {
        match unsafe { $p.as_mut() } {
            Some(v) => v,
            None => return fail(PauliStatus::NullPointer, concat!($name, " is null")),
        }
    };
}

fn read3(p: *const f64) -> Option<[f64; 3]> {
    (!p.is_null()).then(|| unsafe { [*p, *p.add(1), *p.add(2)] })
}

/// Message for the most recent failure on this thread; empty after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pauli_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pauli_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Grid with `n[i]` points (powers of two, at least 8) spanning `extent[i]`,
/// centred on the origin, for `dim` in 1..=3.
///
/// # Safety
/// `n` and `extent` must point to `dim` readable values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pauli_grid_new(
    dim: usize,
    n: *const usize,
    extent: *const f64,
    out: *mut *mut PauliGrid,
) -> PauliStatus {
    guard(|| {
        if n.is_null() || extent.is_null() || out.is_null() {
            return fail(PauliStatus::NullPointer, "n, extent and out must be non-null");
        }
        if !(1..=3).contains(&dim) {
            return fail(PauliStatus::InvalidArgument, format!("dim must be 1, 2 or 3, got {dim}"));
        }
        let n = unsafe { std::slice::from_raw_parts(n, dim) };
        let extent = unsafe { std::slice::from_raw_parts(extent, dim) };
        match Grid::centered(n, extent) {
            Ok(g) => {
                unsafe { *out = Box::into_raw(Box::new(PauliGrid(g))) };
                PauliStatus::Ok
            }
            Err(e) => fail(PauliStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `grid` must come from `pauli_grid_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pauli_grid_free(grid: *mut PauliGrid) {
    if !grid.is_null() {
        drop(unsafe { Box::from_raw(grid) });
    }
}

/// Number of grid points, or 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pauli_grid_len(grid: *const PauliGrid) -> usize {
    unsafe { grid.as_ref() }.map_or(0, |g| g.0.len())
}

/// Potential preset by name (`zero`, `landau`, `symmetric`, `uniform_e`,
/// `harmonic`) with `count` named parameters, for a particle of charge `q`
/// and unit mass.
///
/// # Safety
/// `name` must be a NUL-terminated string; `keys` and `values` must hold
/// `count` entries (either may be null when `count` is 0); `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pauli_potential_preset(
    name: *const c_char,
    keys: *const *const c_char,
    values: *const f64,
    count: usize,
    q: f64,
    out: *mut *mut PauliPotential,
) -> PauliStatus {
    guard(|| {
        if name.is_null() || out.is_null() || (count > 0 && (keys.is_null() || values.is_null())) {
            return fail(PauliStatus::NullPointer, "name, out, keys and values must be non-null");
        }
        let Ok(name) = unsafe { CStr::from_ptr(name) }.to_str() else {
            return fail(PauliStatus::InvalidArgument, "name is not UTF-8");
        };
        let mut params = PresetParams::new();
        for i in 0..count {
            let key = unsafe { *keys.add(i) };
            if key.is_null() {
                return fail(PauliStatus::NullPointer, format!("keys[{i}] is null"));
            }
            let Ok(key) = unsafe { CStr::from_ptr(key) }.to_str() else {
                return fail(PauliStatus::InvalidArgument, format!("keys[{i}] is not UTF-8"));
            };
            params.insert(key.to_string(), unsafe { *values.add(i) });
        }
        if !(q.is_finite() && q != 0.0) {
            return fail(PauliStatus::InvalidArgument, "q must be finite and nonzero");
        }
        let units = Units::with_charge(q);
        match preset_by_name(name, &params, units) {
            Ok(potential) => {
                unsafe { *out = Box::into_raw(Box::new(PauliPotential { potential, units })) };
                PauliStatus::Ok
            }
            Err(e) => fail(PauliStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `p` must come from `pauli_potential_preset` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pauli_potential_free(p: *mut PauliPotential) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Normalized Gaussian packet. `center`, `width` and `momentum` hold three
/// values each (entries for inactive axes are ignored); `spinor` holds
/// `re0, im0, re1, im1`.
///
/// # Safety
/// All pointers must be valid for the stated lengths; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pauli_spinor_gaussian(
    grid: *const PauliGrid,
    center: *const f64,
    width: *const f64,
    momentum: *const f64,
    spinor: *const f64,
    out: *mut *mut PauliSpinor,
) -> PauliStatus {
    guard(|| {
        let grid = deref!(grid, "grid");
        let (Some(center), Some(width), Some(momentum)) = (read3(center), read3(width), read3(momentum)) else {
            return fail(PauliStatus::NullPointer, "center, width and momentum must be non-null");
        };
        if spinor.is_null() || out.is_null() {
            return fail(PauliStatus::NullPointer, "spinor and out must be non-null");
        }
        let s = unsafe { std::slice::from_raw_parts(spinor, 4) };
        let packet = GaussianPacket {
            center,
            width,
            momentum,
            spinor: [Complex64::new(s[0], s[1]), Complex64::new(s[2], s[3])],
        };
        match init_gaussian(&grid.0, &packet) {
            Ok(f) => {
                unsafe { *out = Box::into_raw(Box::new(PauliSpinor(f))) };
                PauliStatus::Ok
            }
            Err(e) => fail(PauliStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pauli_spinor_free(s: *mut PauliSpinor) {
    if !s.is_null() {
        drop(unsafe { Box::from_raw(s) });
    }
}

/// `Σ|ψ|² h^dim` to the power one half.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pauli_spinor_norm(s: *const PauliSpinor, out: *mut f64) -> PauliStatus {
    guard(|| {
        let s = deref!(s, "spinor");
        let out = deref_mut!(out, "out");
        *out = s.0.norm();
        PauliStatus::Ok
    })
}

/// Spin expectation `⟨S⟩` into `out[0..3]`.
///
/// # Safety
/// `s` must be a live handle and `out` writable for three values.
#[no_mangle]
pub unsafe extern "C" fn pauli_spinor_spin(s: *const PauliSpinor, out: *mut f64) -> PauliStatus {
    guard(|| {
        let s = deref!(s, "spinor");
        if out.is_null() {
            return fail(PauliStatus::NullPointer, "out is null");
        }
        let spin = s.0.expect_spin();
        unsafe { ptr::copy_nonoverlapping(spin.as_ptr(), out, 3) };
        PauliStatus::Ok
    })
}

/// Copies the samples into `out`, which must hold `4 * pauli_grid_len`
/// doubles.
///
/// # Safety
/// `s` must be a live handle and `out` writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn pauli_spinor_read(s: *const PauliSpinor, out: *mut f64, len: usize) -> PauliStatus {
    guard(|| {
        let s = deref!(s, "spinor");
        if out.is_null() {
            return fail(PauliStatus::NullPointer, "out is null");
        }
        let n = s.0.grid().len();
        if len != 4 * n {
            return fail(PauliStatus::BufferSize, format!("buffer holds {len} values, need {}", 4 * n));
        }
        let buf = unsafe { std::slice::from_raw_parts_mut(out, len) };
        for c in 0..2 {
            for (i, z) in s.0.component(c).iter().enumerate() {
                buf[2 * (c * n + i)] = z.re;
                buf[2 * (c * n + i) + 1] = z.im;
            }
        }
        PauliStatus::Ok
    })
}

/// Propagates `s` in place from `t0` to `t1`. `t1 - t0` must be a whole
/// number of steps `dt`; `krylov_dim` and `tol` are ignored for split-step.
///
/// # Safety
/// `s` and `p` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn pauli_evolve(
    s: *mut PauliSpinor,
    p: *const PauliPotential,
    scheme: PauliScheme,
    dt: f64,
    t0: f64,
    t1: f64,
    krylov_dim: usize,
    tol: f64,
) -> PauliStatus {
    guard(|| {
        let s = deref_mut!(s, "spinor");
        let p = deref!(p, "potential");
        let cfg = PropagatorConfig {
            scheme: match scheme {
                PauliScheme::SplitStep => Scheme::SplitStep,
                PauliScheme::Krylov => Scheme::Krylov,
            },
            dt,
            krylov_dim,
            tol,
        };
        if let Err(e) = cfg.validate().and_then(|_| cfg.step_count(t0, t1)) {
            return fail(PauliStatus::InvalidArgument, e.to_string());
        }
        match propagate(&s.0, &p.potential, p.units, &cfg, t0, t1, &mut []) {
            Ok(record) => {
                s.0 = record.final_state;
                PauliStatus::Ok
            }
            Err(failure) => fail(PauliStatus::Numerical, failure.to_string()),
        }
    })
}

/// Convective, gauge, spin and total currents at time `t`. Each non-null
/// output must hold `3 * pauli_grid_len` doubles (x block, y block, z
/// block); null outputs are skipped.
///
/// # Safety
/// `s` and `p` must be live handles; non-null outputs must be writable for
/// `len` values.
#[no_mangle]
pub unsafe extern "C" fn pauli_current_decompose(
    s: *const PauliSpinor,
    p: *const PauliPotential,
    t: f64,
    j_conv: *mut f64,
    j_gauge: *mut f64,
    j_spin: *mut f64,
    j_total: *mut f64,
    len: usize,
) -> PauliStatus {
    guard(|| {
        let s = deref!(s, "spinor");
        let p = deref!(p, "potential");
        let n = s.0.grid().len();
        if len != 3 * n {
            return fail(PauliStatus::BufferSize, format!("buffers hold {len} values, need {}", 3 * n));
        }
        let dec = decompose_current(&s.0, &p.potential, t, p.units);
        for (dst, field) in [
            (j_conv, &dec.j_conv),
            (j_gauge, &dec.j_gauge),
            (j_spin, &dec.j_spin),
            (j_total, &dec.j_total),
        ] {
            if dst.is_null() {
                continue;
            }
            for (c, comp) in field.components.iter().enumerate() {
                unsafe { ptr::copy_nonoverlapping(comp.as_ptr(), dst.add(c * n), n) };
            }
        }
        PauliStatus::Ok
    })
}

/// Runs the exact-algebra verification suite. Returns `Numerical` when any
/// gated condition fails; the counts are written either way.
///
/// # Safety
/// `passed` and `total` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pauli_verify(rep: PauliRep, passed: *mut usize, total: *mut usize) -> PauliStatus {
    guard(|| {
        let passed = deref_mut!(passed, "passed");
        let total = deref_mut!(total, "total");
        let opts = VerifyOptions {
            rep: match rep {
                PauliRep::Both => None,
                PauliRep::Original => Some(RepKind::Original),
                PauliRep::Convenient => Some(RepKind::Convenient),
            },
            tamper: None,
        };
        let reports = verification_reports(&opts);
        *passed = reports.iter().map(|r| r.passed_count()).sum();
        *total = reports.iter().map(|r| r.gated_count()).sum();
        let failed = reports.iter().flat_map(|r| r.failures()).map(|c| c.name.clone()).next();
        match failed {
            None => PauliStatus::Ok,
            Some(name) => fail(PauliStatus::Numerical, format!("condition failed: {name}")),
        }
    })
}
