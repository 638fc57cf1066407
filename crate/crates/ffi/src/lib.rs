//! C ABI over the `lglu` library.
//!
//! Every function returns an [`LgluStatus`]. On anything but `LGLU_STATUS_OK`
//! a description is available from [`lglu_last_error_message`] on the same
//! thread. Matrices cross the boundary as `n*n` row-major byte arrays with
//! entries in `0..p`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lglu::cli::{build_report, Caps};
use lglu::{Element, Enumerated, Error, Instance, Mat};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LgluStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Precondition = 4,
    Capacity = 5,
    Infeasible = 6,
    NotMember = 7,
    NotEnumerated = 8,
    Internal = 9,
    Panic = 10,
}

/// Opaque handle to an instance and, once enumerated, its multiplication table.
pub struct LgluInstance {
    inst: Instance,
    table: Option<Enumerated>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(LgluStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let status = match &e {
            Error::Config(_) => LgluStatus::Config,
            Error::Precondition(_) | Error::NoPreimage => LgluStatus::Precondition,
            Error::Capacity { .. } => LgluStatus::Capacity,
            Error::Infeasible(_) => LgluStatus::Infeasible,
            Error::Unsupported(_) => LgluStatus::InvalidArgument,
            Error::Internal(_) | Error::Io(_) => LgluStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: Option<String>) {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = msg.map(|m| CString::new(m.replace('\0', " ")).unwrap_or_default());
    });
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LgluStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            LgluStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(_) => {
            set_error(Some("panic inside lglu".into()));
            LgluStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(LgluStatus::NullPointer, "null pointer argument".into())
}

unsafe fn deref<'a>(h: *const LgluInstance) -> Result<&'a LgluInstance, Failure> {
    h.as_ref().ok_or_else(null)
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(null)
}

unsafe fn read_element(h: &LgluInstance, entries: *const u8, len: usize) -> Result<Element, Failure> {
    if entries.is_null() {
        return Err(null());
    }
    let n = h.inst.n();
    if len != n * n {
        return Err(Failure(LgluStatus::InvalidArgument, format!("expected {} entries, got {len}", n * n)));
    }
    let slice = std::slice::from_raw_parts(entries, len);
    if let Some(bad) = slice.iter().find(|&&x| u32::from(x) >= h.inst.p()) {
        return Err(Failure(LgluStatus::InvalidArgument, format!("entry {bad} is out of range for GF({})", h.inst.p())));
    }
    let m = Mat::from_flat(h.inst.field(), n, slice)
        .map_err(|e| Failure(LgluStatus::InvalidArgument, e.to_string()))?;
    h.inst
        .element(m)
        .map_err(|e| Failure(LgluStatus::NotMember, e.to_string()))
}

unsafe fn write_element(h: &LgluInstance, e: &Element, dst: *mut u8) -> Result<(), Failure> {
    if dst.is_null() {
        return Err(null());
    }
    let src = e.mat().entries();
    debug_assert_eq!(src.len(), h.inst.n() * h.inst.n());
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

fn enumerated(h: &LgluInstance) -> Result<&Enumerated, Failure> {
    h.table.as_ref().ok_or_else(|| {
        Failure(LgluStatus::NotEnumerated, "call lglu_instance_enumerate first".into())
    })
}

fn to_u64(v: u128) -> Result<u64, Failure> {
    u64::try_from(v).map_err(|_| Failure(LgluStatus::Capacity, format!("{v} does not fit in 64 bits")))
}

/// Creates the instance with `U` spanned by the first `r` standard vectors.
///
/// # Safety
/// `out_handle` must be a valid pointer; the handle written there is owned by the
/// caller and released with [`lglu_instance_free`].
#[no_mangle]
pub unsafe extern "C" fn lglu_instance_new(p: u32, n: usize, r: usize, out_handle: *mut *mut LgluInstance) -> LgluStatus {
    guard(|| {
        let slot = out(out_handle)?;
        let inst = Instance::new(p, n, r)?;
        *slot = Box::into_raw(Box::new(LgluInstance { inst, table: None }));
        Ok(())
    })
}

/// Creates an instance with `U` spanned by `r` rows of length `n`, given
/// row-major in `rows` (`r*n` bytes).
///
/// # Safety
/// `rows` must point to `r*n` readable bytes and `out_handle` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lglu_instance_with_basis(
    p: u32,
    n: usize,
    r: usize,
    rows: *const u8,
    out_handle: *mut *mut LgluInstance,
) -> LgluStatus {
    guard(|| {
        let slot = out(out_handle)?;
        if rows.is_null() && r > 0 {
            return Err(null());
        }
        let flat: &[u8] = if r == 0 { &[] } else { std::slice::from_raw_parts(rows, r * n) };
        let basis: Vec<Vec<u8>> = flat.chunks(n.max(1)).map(|c| c.to_vec()).collect();
        let inst = Instance::with_basis(p, n, &basis)?;
        *slot = Box::into_raw(Box::new(LgluInstance { inst, table: None }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `handle` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lglu_instance_free(handle: *mut LgluInstance) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Dimensions `n` of the space and `r` of `U`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lglu_instance_dim(handle: *const LgluInstance, out_n: *mut usize, out_r: *mut usize) -> LgluStatus {
    guard(|| {
        let h = deref(handle)?;
        *out(out_n)? = h.inst.n();
        *out(out_r)? = h.inst.r();
        Ok(())
    })
}

/// `|GL_r(p)| * p^(n(n-r))`, or `LGLU_STATUS_CAPACITY` if it overflows 64 bits.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lglu_instance_order(handle: *const LgluInstance, out_order: *mut u64) -> LgluStatus {
    guard(|| {
        let h = deref(handle)?;
        *out(out_order)? = to_u64(h.inst.order())?;
        Ok(())
    })
}

/// Number of complements of `U`, `p^(r(n-r))`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lglu_instance_complement_count(handle: *const LgluInstance, out_count: *mut u64) -> LgluStatus {
    guard(|| {
        let h = deref(handle)?;
        *out(out_count)? = to_u64(h.inst.complement_count())?;
        Ok(())
    })
}

/// Builds the multiplication table, refusing orders above `cap`.
///
/// # Safety
/// `handle` must be valid and not shared with another thread during the call.
#[no_mangle]
pub unsafe extern "C" fn lglu_instance_enumerate(handle: *mut LgluInstance, cap: usize) -> LgluStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(null)?;
        if h.table.is_none() {
            h.table = Some(h.inst.enumerate(cap)?);
        }
        Ok(())
    })
}

/// Whether the `n*n` matrix maps `U` onto itself.
///
/// # Safety
/// `entries` must point to `len` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn lglu_instance_is_member(
    handle: *const LgluInstance,
    entries: *const u8,
    len: usize,
    out_member: *mut bool,
) -> LgluStatus {
    guard(|| {
        let h = deref(handle)?;
        let slot = out(out_member)?;
        *slot = match read_element(h, entries, len) {
            Ok(_) => true,
            Err(Failure(LgluStatus::NotMember, _)) => false,
            Err(f) => return Err(f),
        };
        Ok(())
    })
}

/// `dim(image) - r` of a member.
///
/// # Safety
/// `entries` must point to `len` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn lglu_instance_codim(
    handle: *const LgluInstance,
    entries: *const u8,
    len: usize,
    out_codim: *mut usize,
) -> LgluStatus {
    guard(|| {
        let h = deref(handle)?;
        let a = read_element(h, entries, len)?;
        *out(out_codim)? = a.codim();
        Ok(())
    })
}

/// Size of `J(k)`, the members of codimension `k`. Needs an enumerated instance.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lglu_instance_j_class_size(handle: *const LgluInstance, k: usize, out_size: *mut usize) -> LgluStatus {
    guard(|| {
        let e = enumerated(deref(handle)?)?;
        *out(out_size)? = e.j_class(k)?.count_ones(..);
        Ok(())
    })
}

/// Number of minimal idempotents. Needs an enumerated instance.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lglu_instance_minimal_idempotent_count(handle: *const LgluInstance, out_count: *mut usize) -> LgluStatus {
    guard(|| {
        let e = enumerated(deref(handle)?)?;
        *out(out_count)? = e.minimal_idempotents_char().len();
        Ok(())
    })
}

/// Writes `b` with `a b a = a` and `b a b = b` into `out_entries` (`n*n` bytes).
///
/// # Safety
/// `entries` must hold `len` bytes, `out_entries` room for `n*n`.
#[no_mangle]
pub unsafe extern "C" fn lglu_regular_witness(
    handle: *const LgluInstance,
    entries: *const u8,
    len: usize,
    out_entries: *mut u8,
) -> LgluStatus {
    guard(|| {
        let h = deref(handle)?;
        let a = read_element(h, entries, len)?;
        let b = h.inst.regular_witness(&a)?;
        write_element(h, &b, out_entries)
    })
}

/// Writes `l`, `m` with `l b m = a`. Fails with `LGLU_STATUS_INFEASIBLE`
/// when `codim(a) > codim(b)`.
///
/// # Safety
/// `a` and `b` must hold `len` bytes each, the outputs room for `n*n` each.
#[no_mangle]
pub unsafe extern "C" fn lglu_factor_through(
    handle: *const LgluInstance,
    a: *const u8,
    b: *const u8,
    len: usize,
    out_left: *mut u8,
    out_right: *mut u8,
) -> LgluStatus {
    guard(|| {
        let h = deref(handle)?;
        let a = read_element(h, a, len)?;
        let b = read_element(h, b, len)?;
        let (l, m) = h.inst.factor_through(&a, &b)?;
        write_element(h, &l, out_left)?;
        write_element(h, &m, out_right)
    })
}

/// Structural summary as a JSON string; free it with [`lglu_string_free`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lglu_report_json(
    handle: *const LgluInstance,
    cap: usize,
    rank_cap: usize,
    out_json: *mut *mut c_char,
) -> LgluStatus {
    guard(|| {
        let h = deref(handle)?;
        let slot = out(out_json)?;
        let report = build_report(&h.inst, Caps { enumeration: cap, rank: rank_cap })?;
        let text = serde_json::to_string(&report).map_err(|e| Failure(LgluStatus::Internal, e.to_string()))?;
        *slot = CString::new(text)
            .map_err(|e| Failure(LgluStatus::Internal, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lglu_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn lglu_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static name of a status code, such as `"infeasible"`.
#[no_mangle]
pub extern "C" fn lglu_status_name(status: LgluStatus) -> *const c_char {
    let s: &'static CStr = match status {
        LgluStatus::Ok => c"ok",
        LgluStatus::NullPointer => c"null pointer",
        LgluStatus::InvalidArgument => c"invalid argument",
        LgluStatus::Config => c"config",
        LgluStatus::Precondition => c"precondition",
        LgluStatus::Capacity => c"capacity",
        LgluStatus::Infeasible => c"infeasible",
        LgluStatus::NotMember => c"not a member",
        LgluStatus::NotEnumerated => c"not enumerated",
        LgluStatus::Internal => c"internal",
        LgluStatus::Panic => c"panic",
    };
    s.as_ptr()
}
