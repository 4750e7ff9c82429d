//! C ABI for `unicrit`.
//!
//! Every function returns a [`UcStatus`]; results go through out-pointers.
//! On failure a message is kept per thread and can be read with
//! [`uc_last_error_message`]. Rays and rasters are opaque handles that the
//! caller releases with the matching `*_free` function. Panics never cross
//! the boundary; they are reported as `UC_STATUS_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use unicrit::potential::{bottcher_jet, external_angle, green, param_bottcher};
use unicrit::probes::{hedgehog_detect, lyapunov, membership_grid, synthetic, Cell, Raster, Region};
use unicrit::rays::{landing_estimate, trace_dynamical_ray, trace_parameter_ray, RayPolyline, TraceConfig};
use unicrit::transversality::{transversality_sum, verify_derivative_identity};
use unicrit::{AngleRational, Error, MapParams, Variable};

/// Outcome of a call. Values 1 to 10 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UcStatus {
    Ok = 0,
    InvalidInput = 1,
    NotEscaping = 2,
    BranchAmbiguity = 3,
    NewtonStall = 4,
    ResolutionInsufficient = 5,
    NonConvergent = 6,
    NoConvergence = 7,
    LogDomain = 8,
    Numeric = 9,
    Io = 10,
    Panic = 20,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UcComplex {
    pub re: f64,
    pub im: f64,
}

impl From<UcComplex> for Complex64 {
    fn from(z: UcComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for UcComplex {
    fn from(z: Complex64) -> Self {
        UcComplex { re: z.re, im: z.im }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UcPlane {
    Parameter = 0,
    Dynamical = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UcCell {
    Inside = 0,
    Outside = 1,
    Undecided = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UcHedgehogReport {
    pub modulus: f64,
    pub components: usize,
    pub crossing_components: usize,
    /// Infinite when no component crosses the annulus.
    pub eps_star: f64,
    pub center_in_set: bool,
    pub verdict: bool,
}

/// A traced ray. Opaque to C.
pub struct UcRay {
    ray: RayPolyline,
}

/// A classified raster. Opaque to C.
pub struct UcRaster {
    raster: Raster,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> UcStatus {
    match e {
        Error::InvalidInput(_) => UcStatus::InvalidInput,
        Error::NotEscaping { .. } => UcStatus::NotEscaping,
        Error::BranchAmbiguity(_) => UcStatus::BranchAmbiguity,
        Error::NewtonStall { .. } | Error::PrecisionFloor { .. } => UcStatus::NewtonStall,
        Error::ResolutionInsufficient(_) => UcStatus::ResolutionInsufficient,
        Error::NonConvergent { .. } => UcStatus::NonConvergent,
        Error::NoConvergence(_) => UcStatus::NoConvergence,
        Error::LogDomain(_) => UcStatus::LogDomain,
        Error::Overflow { .. } | Error::ZeroDerivative { .. } => UcStatus::Numeric,
        Error::Io(_) | Error::Json(_) => UcStatus::Io,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Error>) -> UcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            UcStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(format!("{}: {e}", e.kind()));
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            UcStatus::Panic
        }
    }
}

fn null() -> Error {
    Error::InvalidInput("null pointer argument".into())
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Error> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

unsafe fn put_opt<T>(out: *mut T, v: T) {
    if !out.is_null() {
        out.write(v);
    }
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, Error> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|_| Error::InvalidInput("string is not UTF-8".into()))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn uc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn uc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Green's function `G_c(z)`.
#[no_mangle]
pub unsafe extern "C" fn uc_green(d: u32, c: UcComplex, z: UcComplex, tol: f64, out_t: *mut f64) -> UcStatus {
    guard(|| put(out_t, green(&MapParams::new(d, c.into())?, z.into(), tol)?))
}

/// Böttcher coordinate `φ_c(z)`; `out_dphi_dz` may be null.
#[no_mangle]
pub unsafe extern "C" fn uc_bottcher(
    d: u32,
    c: UcComplex,
    z: UcComplex,
    tol: f64,
    out_phi: *mut UcComplex,
    out_dphi_dz: *mut UcComplex,
) -> UcStatus {
    guard(|| {
        let j = bottcher_jet(&MapParams::new(d, c.into())?, z.into(), Variable::Z, tol)?;
        put(out_phi, j.val.into())?;
        put_opt(out_dphi_dz, j.der.into());
        Ok(())
    })
}

/// Potential and external angle (in turns) of `z`.
#[no_mangle]
pub unsafe extern "C" fn uc_external_angle(
    d: u32,
    c: UcComplex,
    z: UcComplex,
    tol: f64,
    out_t: *mut f64,
    out_theta: *mut f64,
) -> UcStatus {
    guard(|| {
        let b = external_angle(&MapParams::new(d, c.into())?, z.into(), tol)?;
        put(out_t, b.t)?;
        put(out_theta, b.theta)
    })
}

/// `Φ(c) = φ_c(c)`; `out_dphi_dc` may be null.
#[no_mangle]
pub unsafe extern "C" fn uc_param_bottcher(
    d: u32,
    c: UcComplex,
    tol: f64,
    out_phi: *mut UcComplex,
    out_dphi_dc: *mut UcComplex,
) -> UcStatus {
    guard(|| {
        let j = param_bottcher(d, c.into(), tol)?;
        put(out_phi, j.val.into())?;
        put_opt(out_dphi_dc, j.der.into());
        Ok(())
    })
}

/// The transversality sum `T(c)`; `out_n_terms` may be null.
#[no_mangle]
pub unsafe extern "C" fn uc_transversality(
    d: u32,
    c: UcComplex,
    tol: f64,
    max_terms: usize,
    out_value: *mut UcComplex,
    out_n_terms: *mut usize,
) -> UcStatus {
    guard(|| {
        let s = transversality_sum(&MapParams::new(d, c.into())?, tol, max_terms)?;
        put(out_value, s.value.into())?;
        put_opt(out_n_terms, s.n_terms);
        Ok(())
    })
}

/// `D_cΦ / ∂_zφ_c` against `T(c)` with their relative difference.
#[no_mangle]
pub unsafe extern "C" fn uc_verify_identity(
    d: u32,
    c: UcComplex,
    tol: f64,
    out_lhs: *mut UcComplex,
    out_rhs: *mut UcComplex,
    out_rel_err: *mut f64,
) -> UcStatus {
    guard(|| {
        let r = verify_derivative_identity(&MapParams::new(d, c.into())?, tol)?;
        put_opt(out_lhs, r.lhs.into());
        put_opt(out_rhs, r.rhs.into());
        put(out_rel_err, r.rel_err)
    })
}

/// Lyapunov exponent of the critical value over `n` steps.
#[no_mangle]
pub unsafe extern "C" fn uc_lyapunov(d: u32, c: UcComplex, n: usize, out_lambda: *mut f64) -> UcStatus {
    guard(|| put(out_lambda, lyapunov(&MapParams::new(d, c.into())?, n)?))
}

/// Traces a ray at the angle `"p/q"` from potential `t_start` down to `t_min`.
/// `c` is ignored in the parameter plane; `anchor` may be null. After a
/// stall the partial ray is still returned through `out_ray` together with
/// `UC_STATUS_NEWTON_STALL`.
#[no_mangle]
pub unsafe extern "C" fn uc_ray_trace(
    plane: UcPlane,
    d: u32,
    c: UcComplex,
    angle: *const c_char,
    t_start: f64,
    t_min: f64,
    steps_per_halving: u32,
    anchor: *const UcComplex,
    out_ray: *mut *mut UcRay,
) -> UcStatus {
    guard(|| {
        if out_ray.is_null() {
            return Err(null());
        }
        out_ray.write(ptr::null_mut());
        let angle: AngleRational = str_arg(angle)?.parse()?;
        let mut cfg = TraceConfig::new(t_start, t_min, steps_per_halving);
        if !anchor.is_null() {
            cfg = cfg.with_anchor((*anchor).into());
        }
        let traced = match plane {
            UcPlane::Parameter => trace_parameter_ray(d, &angle, &cfg),
            UcPlane::Dynamical => trace_dynamical_ray(&MapParams::new(d, c.into())?, &angle, &cfg),
        };
        match traced {
            Ok(ray) => {
                out_ray.write(Box::into_raw(Box::new(UcRay { ray })));
                Ok(())
            }
            Err(Error::NewtonStall { last_good_t, partial }) => {
                out_ray.write(Box::into_raw(Box::new(UcRay { ray: (*partial).clone() })));
                Err(Error::NewtonStall { last_good_t, partial })
            }
            Err(e) => Err(e),
        }
    })
}

/// Number of samples; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn uc_ray_len(ray: *const UcRay) -> usize {
    ray.as_ref().map_or(0, |r| r.ray.len())
}

/// Potential and absolute position of sample `i` (outermost first).
#[no_mangle]
pub unsafe extern "C" fn uc_ray_sample(ray: *const UcRay, i: usize, out_t: *mut f64, out_z: *mut UcComplex) -> UcStatus {
    guard(|| {
        let r = &ray.as_ref().ok_or_else(null)?.ray;
        if i >= r.len() {
            return Err(Error::InvalidInput(format!("sample {i} out of range")));
        }
        put(out_t, r.samples[i].t)?;
        put(out_z, r.point(i).into())
    })
}

/// Extrapolated landing point and its error bound.
#[no_mangle]
pub unsafe extern "C" fn uc_ray_landing(ray: *const UcRay, out_point: *mut UcComplex, out_error_bound: *mut f64) -> UcStatus {
    guard(|| {
        let l = landing_estimate(&ray.as_ref().ok_or_else(null)?.ray)?;
        put(out_point, l.point.into())?;
        put_opt(out_error_bound, l.error_bound);
        Ok(())
    })
}

/// Releases a ray handle; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn uc_ray_free(ray: *mut UcRay) {
    if !ray.is_null() {
        drop(Box::from_raw(ray));
    }
}

fn raster_out(out: *mut *mut UcRaster, raster: Raster) -> Result<(), Error> {
    if out.is_null() {
        return Err(null());
    }
    unsafe { out.write(Box::into_raw(Box::new(UcRaster { raster }))) };
    Ok(())
}

/// Escape-time raster of a square region with `n x n` cells.
#[no_mangle]
pub unsafe extern "C" fn uc_raster_escape(
    plane: UcPlane,
    d: u32,
    c: UcComplex,
    center: UcComplex,
    half_width: f64,
    n: usize,
    maxit: usize,
    out_raster: *mut *mut UcRaster,
) -> UcStatus {
    guard(|| {
        let plane = match plane {
            UcPlane::Parameter => unicrit::Plane::Parameter,
            UcPlane::Dynamical => unicrit::Plane::Dynamical { c: c.into() },
        };
        let r = membership_grid(plane, d, Region::square(center.into(), half_width), n, n, maxit, None)?;
        raster_out(out_raster, r)
    })
}

/// Synthetic fixture on `[-1, 1]^2`: `"spikes:K"`, `"empty-annulus"`,
/// `"half-plane"`, `"segment"` or `"empty"`. Spikes and the empty annulus
/// use an inner radius of 0.4.
#[no_mangle]
pub unsafe extern "C" fn uc_raster_synthetic(name: *const c_char, n: usize, out_raster: *mut *mut UcRaster) -> UcStatus {
    guard(|| {
        let name = str_arg(name)?;
        let bad = || Error::InvalidInput(format!("unknown fixture {name:?}"));
        let r = match name.split_once(':') {
            Some(("spikes", k)) => synthetic::spikes(n, k.parse().map_err(|_| bad())?, 0.4),
            None if name == "empty-annulus" => synthetic::empty_annulus(n, 0.4),
            None if name == "half-plane" => synthetic::half_plane(n),
            None if name == "segment" => synthetic::segment(n, 0.9),
            None if name == "empty" => synthetic::empty(n),
            _ => return Err(bad()),
        };
        raster_out(out_raster, r)
    })
}

#[no_mangle]
pub unsafe extern "C" fn uc_raster_dims(raster: *const UcRaster, out_nx: *mut usize, out_ny: *mut usize) -> UcStatus {
    guard(|| {
        let r = &raster.as_ref().ok_or_else(null)?.raster;
        put(out_nx, r.nx)?;
        put(out_ny, r.ny)
    })
}

/// Class of cell `(i, j)`, row 0 at the top; `out_escape` may be null.
#[no_mangle]
pub unsafe extern "C" fn uc_raster_cell(
    raster: *const UcRaster,
    i: usize,
    j: usize,
    out_cell: *mut UcCell,
    out_escape: *mut u32,
) -> UcStatus {
    guard(|| {
        let r = &raster.as_ref().ok_or_else(null)?.raster;
        if i >= r.nx || j >= r.ny {
            return Err(Error::InvalidInput(format!("cell ({i}, {j}) out of range")));
        }
        let (cell, n) = match r.get(i, j) {
            Cell::Inside => (UcCell::Inside, 0),
            Cell::Outside { n } => (UcCell::Outside, n),
            Cell::Undecided => (UcCell::Undecided, 0),
        };
        put(out_cell, cell)?;
        put_opt(out_escape, n);
        Ok(())
    })
}

/// Copies the PGM encoding into `buf` when it fits; `out_len` always
/// receives the required size.
#[no_mangle]
pub unsafe extern "C" fn uc_raster_pgm(raster: *const UcRaster, buf: *mut u8, cap: usize, out_len: *mut usize) -> UcStatus {
    guard(|| {
        let bytes = raster.as_ref().ok_or_else(null)?.raster.to_pgm();
        put(out_len, bytes.len())?;
        if bytes.len() > cap || buf.is_null() {
            return Err(Error::InvalidInput(format!("buffer of {cap} bytes, need {}", bytes.len())));
        }
        ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn uc_hedgehog(
    raster: *const UcRaster,
    center: UcComplex,
    r_in: f64,
    r_out: f64,
    m_req: f64,
    eps_req: f64,
    out_report: *mut UcHedgehogReport,
) -> UcStatus {
    guard(|| {
        let r = &raster.as_ref().ok_or_else(null)?.raster;
        let rep = hedgehog_detect(r, center.into(), r_in, r_out, m_req, eps_req)?;
        put(
            out_report,
            UcHedgehogReport {
                modulus: rep.modulus,
                components: rep.components,
                crossing_components: rep.crossing_components,
                eps_star: rep.eps_star,
                center_in_set: rep.center_in_set,
                verdict: rep.verdict,
            },
        )
    })
}

/// Releases a raster handle; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn uc_raster_free(raster: *mut UcRaster) {
    if !raster.is_null() {
        drop(Box::from_raw(raster));
    }
}
