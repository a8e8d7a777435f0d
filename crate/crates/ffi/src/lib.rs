//! C interface to corrlab.
//!
//! Objects are opaque handles created by `*_new` functions and released with
//! the matching `*_free`. Every fallible function returns a [`CorrlabStatus`];
//! on failure a message is kept per thread and can be read with
//! [`corrlab_last_error_message`]. Output pointers are only written on
//! success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;

use corrlab::algebra::{MobiusMap, Polynomial, RationalMap, SpherePoint};
use corrlab::correspondence::{mating_family, Correspondence, JCovCorrespondence, MatingFamilyParams};
use corrlab::dynamics::green_function;
use corrlab::hecke::{apply_word, jorgensen_test, rep_from_cross_ratio, standard_hecke, GroupWord, HeckeParams, HeckeRep};
use corrlab::render::{render_with_threads, Raster, RenderJob};
use corrlab::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Degenerate = 3,
    NoConvergence = 4,
    Config = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrlabComplex {
    pub re: f64,
    pub im: f64,
}

/// A point of the Riemann sphere; `re` and `im` are ignored when
/// `is_infinity` is set.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrlabPoint {
    pub re: f64,
    pub im: f64,
    pub is_infinity: bool,
}

pub struct CorrlabCorrespondence(JCovCorrespondence);

pub struct CorrlabHecke(HeckeRep);

pub struct CorrlabRaster(Raster);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CorrlabStatus {
    match e {
        Error::NoConvergence { .. } => CorrlabStatus::NoConvergence,
        Error::Config(_) | Error::InvalidWord(_) => CorrlabStatus::Config,
        Error::InfiniteInput | Error::ZeroInput | Error::InvalidCorrespondence(_) | Error::ConstantPolynomial => {
            CorrlabStatus::InvalidArgument
        }
        _ => CorrlabStatus::Degenerate,
    }
}

struct Failure(CorrlabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CorrlabStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> CorrlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CorrlabStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CorrlabStatus::Panic
        }
    }
}

fn to_point(p: CorrlabPoint) -> SpherePoint {
    if p.is_infinity {
        SpherePoint::Infinity
    } else {
        SpherePoint::finite(Complex64::new(p.re, p.im))
    }
}

fn from_point(p: SpherePoint) -> CorrlabPoint {
    match p.as_complex() {
        Some(z) => CorrlabPoint { re: z.re, im: z.im, is_infinity: false },
        None => CorrlabPoint { re: 0.0, im: 0.0, is_infinity: true },
    }
}

fn to_complex(z: CorrlabComplex) -> Complex64 {
    Complex64::new(z.re, z.im)
}

unsafe fn coeffs<'a>(ptr: *const CorrlabComplex, len: usize) -> Result<&'a [CorrlabComplex], Failure> {
    if ptr.is_null() {
        return Err(null("coefficient array"));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

fn polynomial(c: &[CorrlabComplex]) -> Polynomial {
    Polynomial::new(c.iter().copied().map(to_complex).collect())
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_points(
    points: &[SpherePoint],
    out: *mut CorrlabPoint,
    capacity: usize,
    out_len: *mut usize,
) -> Result<(), Failure> {
    write_out(out_len, points.len())?;
    if points.len() > capacity {
        return Err(Failure(
            CorrlabStatus::BufferTooSmall,
            format!("{} points do not fit in {capacity}", points.len()),
        ));
    }
    if !points.is_empty() && out.is_null() {
        return Err(null("point buffer"));
    }
    for (k, p) in points.iter().enumerate() {
        out.add(k).write(from_point(*p));
    }
    Ok(())
}

unsafe fn handle<'a, T>(h: *const T) -> Result<&'a T, Failure> {
    h.as_ref().ok_or_else(|| null("handle"))
}

/// Copies the last error message of this thread, nul-terminated and
/// truncated to `capacity`, and returns its full length in bytes (0 if none).
///
/// # Safety
/// `buf` must be null or valid for `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn corrlab_last_error_message(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && capacity > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// `J ∘ Cov₀^q` with `J(z) = (j[0] z + j[1]) / (j[2] z + j[3])` and
/// `q = num / den`, coefficients in ascending degree. Pass `den_len = 0` for
/// a polynomial `q`.
///
/// # Safety
/// `j` must point to 4 values, `num` to `num_len`, `den` to `den_len`.
#[no_mangle]
pub unsafe extern "C" fn corrlab_correspondence_new(
    j: *const CorrlabComplex,
    num: *const CorrlabComplex,
    num_len: usize,
    den: *const CorrlabComplex,
    den_len: usize,
    out: *mut *mut CorrlabCorrespondence,
) -> CorrlabStatus {
    guard(|| {
        let j = coeffs(j, 4)?;
        let j = MobiusMap::new(to_complex(j[0]), to_complex(j[1]), to_complex(j[2]), to_complex(j[3]))?;
        let num = polynomial(coeffs(num, num_len)?);
        let q = if den_len == 0 {
            RationalMap::polynomial(num)?
        } else {
            RationalMap::new(num, polynomial(coeffs(den, den_len)?))?
        };
        let f = JCovCorrespondence::new(j, q)?;
        write_out(out, Box::into_raw(Box::new(CorrlabCorrespondence(f))))
    })
}

/// The family `J(z) = -z`, `q = (t³ - 3kt) ∘ (az + 1)/(z + 1)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn corrlab_mating_family_new(
    a: CorrlabComplex,
    k: CorrlabComplex,
    out: *mut *mut CorrlabCorrespondence,
) -> CorrlabStatus {
    guard(|| {
        let f = mating_family(&MatingFamilyParams { a: to_complex(a), k: to_complex(k) })?;
        write_out(out, Box::into_raw(Box::new(CorrlabCorrespondence(f))))
    })
}

/// # Safety
/// `h` must be null or a handle from a `corrlab_*_new` correspondence
/// constructor that was not freed.
#[no_mangle]
pub unsafe extern "C" fn corrlab_correspondence_free(h: *mut CorrlabCorrespondence) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn corrlab_correspondence_degree(h: *const CorrlabCorrespondence, out: *mut usize) -> CorrlabStatus {
    guard(|| write_out(out, handle(h)?.0.d()))
}

/// Writes `F(z)` with multiplicity. `out_len` receives the number of points
/// even when the buffer is too small.
///
/// # Safety
/// `h` must be a live handle, `out` valid for `capacity` points and
/// `out_len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn corrlab_forward_image(
    h: *const CorrlabCorrespondence,
    z: CorrlabPoint,
    out: *mut CorrlabPoint,
    capacity: usize,
    out_len: *mut usize,
) -> CorrlabStatus {
    guard(|| {
        let points = handle(h)?.0.forward_image(to_point(z))?;
        write_points(&points, out, capacity, out_len)
    })
}

/// Writes `F⁻¹(w)`; see [`corrlab_forward_image`].
///
/// # Safety
/// As for [`corrlab_forward_image`].
#[no_mangle]
pub unsafe extern "C" fn corrlab_backward_image(
    h: *const CorrlabCorrespondence,
    w: CorrlabPoint,
    out: *mut CorrlabPoint,
    capacity: usize,
    out_len: *mut usize,
) -> CorrlabStatus {
    guard(|| {
        let points = handle(h)?.0.backward_image(to_point(w))?;
        write_points(&points, out, capacity, out_len)
    })
}

/// The standard Hecke group `H_{d+1}`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn corrlab_hecke_standard_new(d: usize, out: *mut *mut CorrlabHecke) -> CorrlabStatus {
    guard(|| write_out(out, Box::into_raw(Box::new(CorrlabHecke(standard_hecke(d)?)))))
}

/// The representation with cross-ratio `kappa`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn corrlab_hecke_new(d: usize, kappa: CorrlabComplex, out: *mut *mut CorrlabHecke) -> CorrlabStatus {
    guard(|| {
        let rep = rep_from_cross_ratio(&HeckeParams { d, kappa: to_complex(kappa) })?;
        write_out(out, Box::into_raw(Box::new(CorrlabHecke(rep))))
    })
}

/// # Safety
/// `h` must be null or a live Hecke handle.
#[no_mangle]
pub unsafe extern "C" fn corrlab_hecke_free(h: *mut CorrlabHecke) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Applies a word such as `"sr2sr"` to `z`.
///
/// # Safety
/// `h` must be a live handle, `word` a nul-terminated string and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn corrlab_hecke_apply_word(
    h: *const CorrlabHecke,
    word: *const c_char,
    z: CorrlabPoint,
    out: *mut CorrlabPoint,
) -> CorrlabStatus {
    guard(|| {
        let rep = &handle(h)?.0;
        if word.is_null() {
            return Err(null("word"));
        }
        let text = CStr::from_ptr(word)
            .to_str()
            .map_err(|_| Failure(CorrlabStatus::InvalidArgument, "word is not UTF-8".into()))?;
        let w = GroupWord::parse(rep.d, text)?;
        write_out(out, from_point(apply_word(rep, &w, to_point(z))))
    })
}

/// Jørgensen's inequality over pairs of words up to `max_word_len`.
/// `passes` is false when some pair certifies non-discreteness.
///
/// # Safety
/// `h` must be a live handle; `passes` and `worst_value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn corrlab_hecke_jorgensen(
    h: *const CorrlabHecke,
    max_word_len: usize,
    passes: *mut bool,
    worst_value: *mut f64,
) -> CorrlabStatus {
    guard(|| {
        let r = jorgensen_test(&handle(h)?.0, max_word_len);
        write_out(passes, r.passes)?;
        write_out(worst_value, r.worst_value)
    })
}

/// Green's function of the polynomial with coefficients `coeffs` (ascending
/// degree) at `z`.
///
/// # Safety
/// `coeffs` must point to `len` values and `out` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn corrlab_green(
    coeffs_ptr: *const CorrlabComplex,
    len: usize,
    z: CorrlabComplex,
    max_iter: usize,
    out: *mut f64,
) -> CorrlabStatus {
    guard(|| {
        let f = polynomial(coeffs(coeffs_ptr, len)?);
        write_out(out, green_function(&f, to_complex(z), max_iter, None)?)
    })
}

/// Renders a JSON job. `threads = 0` uses the default pool.
///
/// # Safety
/// `job_json` must be a nul-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn corrlab_render_job_json(
    job_json: *const c_char,
    threads: usize,
    out: *mut *mut CorrlabRaster,
) -> CorrlabStatus {
    guard(|| {
        if job_json.is_null() {
            return Err(null("job"));
        }
        let text = CStr::from_ptr(job_json)
            .to_str()
            .map_err(|_| Failure(CorrlabStatus::Config, "job is not UTF-8".into()))?;
        let job = RenderJob::from_json(text)?;
        let raster = render_with_threads(&job, (threads > 0).then_some(threads))?;
        write_out(out, Box::into_raw(Box::new(CorrlabRaster(raster))))
    })
}

/// # Safety
/// `r` must be null or a live raster handle.
#[no_mangle]
pub unsafe extern "C" fn corrlab_raster_free(r: *mut CorrlabRaster) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be a live handle; `width` and `height` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn corrlab_raster_size(r: *const CorrlabRaster, width: *mut usize, height: *mut usize) -> CorrlabStatus {
    guard(|| {
        let r = &handle(r)?.0;
        write_out(width, r.width)?;
        write_out(height, r.height)
    })
}

/// Row-major class codes. The pointer stays valid until the raster is freed.
///
/// # Safety
/// `r` must be a live handle; `data` and `len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn corrlab_raster_classes(
    r: *const CorrlabRaster,
    data: *mut *const u8,
    len: *mut usize,
) -> CorrlabStatus {
    guard(|| {
        let r = &handle(r)?.0;
        write_out(data, r.classes.as_ptr())?;
        write_out(len, r.classes.len())
    })
}

/// Copies the binary PPM encoding into `buf`; `out_len` receives its size
/// even when `capacity` is too small.
///
/// # Safety
/// `r` must be a live handle, `buf` valid for `capacity` bytes and
/// `out_len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn corrlab_raster_ppm(
    r: *const CorrlabRaster,
    buf: *mut u8,
    capacity: usize,
    out_len: *mut usize,
) -> CorrlabStatus {
    guard(|| {
        let ppm = handle(r)?.0.to_ppm();
        write_out(out_len, ppm.len())?;
        if ppm.len() > capacity {
            return Err(Failure(CorrlabStatus::BufferTooSmall, format!("PPM needs {} bytes", ppm.len())));
        }
        if buf.is_null() {
            return Err(null("buffer"));
        }
        ptr::copy_nonoverlapping(ppm.as_ptr(), buf, ppm.len());
        Ok(())
    })
}
