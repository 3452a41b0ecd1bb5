//! C interface to the attk2 store.
//!
//! Every function returns an [`Attk2Status`]. On failure a message is kept
//! per thread and can be read with [`attk2_last_error`]. Strings and id
//! arrays handed out by the library are released with [`attk2_string_free`]
//! and [`attk2_ids_free`]. Ids are 1-based, as in the Rust API.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use attk2::cli::{parse_script, run_script};
use attk2::dyngraph::DynAttK2Graph;
use attk2::{io, AttK2Graph, AttrValue, Error, GraphQueries, Kind, Selection};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attk2Status {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidKind = 3,
    NotFound = 4,
    UnknownLabel = 5,
    AlreadyExists = 6,
    InvalidInput = 7,
    Parse = 8,
    Corrupt = 9,
    Io = 10,
    OutOfBounds = 11,
    /// A mutation was attempted on a static store.
    ReadOnly = 12,
    Panic = 13,
}

/// Element kind: 0 for nodes, 1 for edges.
pub const ATTK2_NODE: u32 = 0;
pub const ATTK2_EDGE: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attk2AttrState {
    /// The value was written to the output string.
    Value = 0,
    /// Declared for the type but unset.
    Absent = 1,
    /// Not declared for the element's type.
    Undefined = 2,
}

#[allow(clippy::large_enum_variant)]
enum Inner {
    Static(AttK2Graph),
    Dynamic(DynAttK2Graph),
}

/// Opaque store handle.
pub struct Attk2Store(Inner);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Fail(Attk2Status, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::OutOfBounds { .. } => Attk2Status::OutOfBounds,
            Error::NotFound(_) => Attk2Status::NotFound,
            Error::UnknownLabel(_) => Attk2Status::UnknownLabel,
            Error::AlreadyExists(_) => Attk2Status::AlreadyExists,
            Error::InvalidInput(_) => Attk2Status::InvalidInput,
            Error::Parse { .. } => Attk2Status::Parse,
            Error::Corrupt(_) => Attk2Status::Corrupt,
            Error::Io(_) => Attk2Status::Io,
        };
        Fail(status, e.to_string())
    }
}

fn fail<T>(status: Attk2Status, msg: &str) -> Result<T, Fail> {
    Err(Fail(status, msg.to_owned()))
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> Attk2Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            Attk2Status::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            Attk2Status::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return fail(Attk2Status::NullArgument, &format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(Attk2Status::InvalidUtf8, &format!("{what} is not UTF-8")))
}

fn kind(k: u32) -> Result<Kind, Fail> {
    match k {
        ATTK2_NODE => Ok(Kind::Node),
        ATTK2_EDGE => Ok(Kind::Edge),
        _ => fail(Attk2Status::InvalidKind, &format!("kind {k} is neither 0 nor 1")),
    }
}

unsafe fn store<'a>(s: *const Attk2Store) -> Result<&'a Inner, Fail> {
    s.as_ref().map(|s| &s.0).ok_or(Fail(Attk2Status::NullArgument, "store is null".into()))
}

unsafe fn dynamic<'a>(s: *mut Attk2Store) -> Result<&'a mut DynAttK2Graph, Fail> {
    match s.as_mut().map(|s| &mut s.0) {
        Some(Inner::Dynamic(d)) => Ok(d),
        Some(Inner::Static(_)) => fail(Attk2Status::ReadOnly, "store is static"),
        None => fail(Attk2Status::NullArgument, "store is null"),
    }
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return fail(Attk2Status::NullArgument, "output pointer is null");
    }
    out.write(v);
    Ok(())
}

unsafe fn put_store(out: *mut *mut Attk2Store, inner: Inner) -> Result<(), Fail> {
    if out.is_null() {
        return fail(Attk2Status::NullArgument, "output pointer is null");
    }
    out.write(Box::into_raw(Box::new(Attk2Store(inner))));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: &str) -> Result<(), Fail> {
    let c = CString::new(s).or_else(|_| fail(Attk2Status::InvalidInput, "value contains a NUL byte"))?;
    put(out, c.into_raw())
}

unsafe fn put_ids(out: *mut *mut u64, out_len: *mut usize, ids: Vec<u64>) -> Result<(), Fail> {
    if out.is_null() || out_len.is_null() {
        return fail(Attk2Status::NullArgument, "output pointer is null");
    }
    let boxed = ids.into_boxed_slice();
    out_len.write(boxed.len());
    out.write(Box::into_raw(boxed) as *mut u64);
    Ok(())
}

unsafe fn attrs(names: *const *const c_char, values: *const *const c_char, count: usize) -> Result<Vec<(String, String)>, Fail> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if names.is_null() || values.is_null() {
        return fail(Attk2Status::NullArgument, "attribute arrays are null");
    }
    (0..count)
        .map(|i| Ok((text(*names.add(i), "attribute name")?.to_owned(), text(*values.add(i), "attribute value")?.to_owned())))
        .collect()
}

macro_rules! on_store {
    ($s:expr, |$g:ident| $body:expr) => {
        match store($s)? {
            Inner::Static($g) => $body,
            Inner::Dynamic($g) => $body,
        }
    };
}

/// Message of the last failed call on this thread, empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn attk2_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a static store from a bundle directory.
///
/// # Safety
/// `input_dir` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_store_build(input_dir: *const c_char, k: u32, out: *mut *mut Attk2Store) -> Attk2Status {
    guard(|| {
        let dir = text(input_dir, "input_dir")?;
        let g = AttK2Graph::build(&io::load_input(Path::new(dir))?, k)?;
        put_store(out, Inner::Static(g))
    })
}

/// Loads a static store file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_store_load(path: *const c_char, out: *mut *mut Attk2Store) -> Attk2Status {
    guard(|| {
        let g = io::load_db(Path::new(text(path, "path")?))?;
        put_store(out, Inner::Static(g))
    })
}

/// Writes the store to `path`. A dynamic store is frozen first.
///
/// # Safety
/// `s` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn attk2_store_save(s: *const Attk2Store, path: *const c_char) -> Attk2Status {
    guard(|| {
        let path = Path::new(text(path, "path")?);
        match store(s)? {
            Inner::Static(g) => io::save_db(g, path)?,
            Inner::Dynamic(d) => io::save_db(&d.freeze()?, path)?,
        }
        Ok(())
    })
}

/// Creates an empty dynamic store.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_store_new_dynamic(k: u32, out: *mut *mut Attk2Store) -> Attk2Status {
    guard(|| put_store(out, Inner::Dynamic(DynAttK2Graph::new(k)?)))
}

/// New dynamic store holding the contents of `s`, which is left untouched.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_store_to_dynamic(s: *const Attk2Store, out: *mut *mut Attk2Store) -> Attk2Status {
    guard(|| {
        let d = match store(s)? {
            Inner::Static(g) => DynAttK2Graph::from_bundle(&g.export_bundle()?, g.relations().base().k())?,
            Inner::Dynamic(d) => DynAttK2Graph::from_bundle(&d.export_bundle()?, d.k())?,
        };
        put_store(out, Inner::Dynamic(d))
    })
}

/// New static store with the live contents of `s`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_store_freeze(s: *const Attk2Store, out: *mut *mut Attk2Store) -> Attk2Status {
    guard(|| {
        let g = match store(s)? {
            Inner::Static(g) => AttK2Graph::build(&g.export_bundle()?, g.relations().base().k())?,
            Inner::Dynamic(d) => d.freeze()?,
        };
        put_store(out, Inner::Static(g))
    })
}

/// Writes 1 to `out` for a dynamic store and 0 for a static one.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_store_is_dynamic(s: *const Attk2Store, out: *mut u32) -> Attk2Status {
    guard(|| put(out, matches!(store(s)?, Inner::Dynamic(_)) as u32))
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn attk2_store_free(s: *mut Attk2Store) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn attk2_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `ids` and `len` must be exactly as returned by this library, or `ids` null.
#[no_mangle]
pub unsafe extern "C" fn attk2_ids_free(ids: *mut u64, len: usize) {
    if !ids.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(ids, len)));
    }
}

/// Labels of one kind, sorted and joined by tabs.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_get_types(s: *const Attk2Store, kind_: u32, out: *mut *mut c_char) -> Attk2Status {
    guard(|| {
        let k = kind(kind_)?;
        let types = on_store!(s, |g| g.get_types(k));
        put_string(out, &types.join("\t"))
    })
}

/// # Safety
/// `s` must be a live handle, `label` a NUL-terminated string, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_scan(
    s: *const Attk2Store,
    kind_: u32,
    label: *const c_char,
    out: *mut *mut u64,
    out_len: *mut usize,
) -> Attk2Status {
    guard(|| {
        let (k, label) = (kind(kind_)?, text(label, "label")?);
        let ids = on_store!(s, |g| g.scan(k, label)?);
        put_ids(out, out_len, ids)
    })
}

/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_get_type(s: *const Attk2Store, kind_: u32, id: u64, out: *mut *mut c_char) -> Attk2Status {
    guard(|| {
        let k = kind(kind_)?;
        let label = on_store!(s, |g| g.get_type(k, id)?.to_owned());
        put_string(out, &label)
    })
}

/// Writes the state to `state` and, for [`Attk2AttrState::Value`], the
/// value to `out`. Otherwise `out` is set to null.
///
/// # Safety
/// `s` must be a live handle, `att` a NUL-terminated string, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_get_attribute(
    s: *const Attk2Store,
    kind_: u32,
    id: u64,
    att: *const c_char,
    state: *mut Attk2AttrState,
    out: *mut *mut c_char,
) -> Attk2Status {
    guard(|| {
        let (k, att) = (kind(kind_)?, text(att, "att")?);
        if state.is_null() || out.is_null() {
            return fail(Attk2Status::NullArgument, "output pointer is null");
        }
        match on_store!(s, |g| g.get_attribute(k, id, att)?) {
            AttrValue::Value(v) => {
                put_string(out, &v)?;
                put(state, Attk2AttrState::Value)
            }
            AttrValue::Absent => {
                put(out, ptr::null_mut())?;
                put(state, Attk2AttrState::Absent)
            }
            AttrValue::Undefined => {
                put(out, ptr::null_mut())?;
                put(state, Attk2AttrState::Undefined)
            }
        }
    })
}

/// Elements of type `label` whose attribute equals `value`. `defined` is set
/// to 0, with an empty result, when the type lacks the attribute.
///
/// # Safety
/// `s` must be a live handle, strings NUL-terminated, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_select(
    s: *const Attk2Store,
    kind_: u32,
    label: *const c_char,
    att: *const c_char,
    value: *const c_char,
    defined: *mut u32,
    out: *mut *mut u64,
    out_len: *mut usize,
) -> Attk2Status {
    guard(|| {
        let k = kind(kind_)?;
        let (label, att, value) = (text(label, "label")?, text(att, "att")?, text(value, "value")?);
        let (ok, ids) = match on_store!(s, |g| g.select(k, label, att, value)?) {
            Selection::Ids(ids) => (1, ids),
            Selection::Undefined => (0, Vec::new()),
        };
        put(defined, ok)?;
        put_ids(out, out_len, ids)
    })
}

/// # Safety
/// `s` must be a live handle, `node_label` NUL-terminated, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_neighbors(
    s: *const Attk2Store,
    node_label: *const c_char,
    id: u64,
    out: *mut *mut u64,
    out_len: *mut usize,
) -> Attk2Status {
    guard(|| {
        let label = text(node_label, "node_label")?;
        let ids = on_store!(s, |g| g.neighbors(label, id)?);
        put_ids(out, out_len, ids)
    })
}

/// # Safety
/// `s` must be a live handle, `edge_label` NUL-terminated, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_related(
    s: *const Attk2Store,
    edge_label: *const c_char,
    id: u64,
    out: *mut *mut u64,
    out_len: *mut usize,
) -> Attk2Status {
    guard(|| {
        let label = text(edge_label, "edge_label")?;
        let ids = on_store!(s, |g| g.related(label, id)?);
        put_ids(out, out_len, ids)
    })
}

/// Ids of the edges from `u` to `v`.
///
/// # Safety
/// `s` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_edges_between(
    s: *const Attk2Store,
    u: u64,
    v: u64,
    out: *mut *mut u64,
    out_len: *mut usize,
) -> Attk2Status {
    guard(|| {
        let ids = on_store!(s, |g| g.edges_between(u, v)?);
        put_ids(out, out_len, ids)
    })
}

/// Runs a query script (the CLI `query` format) and returns its output.
///
/// # Safety
/// `s` must be a live handle, `script` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_run_script(s: *const Attk2Store, script: *const c_char, out: *mut *mut c_char) -> Attk2Status {
    guard(|| {
        let queries = parse_script("script", text(script, "script")?)?;
        let result = on_store!(s, |g| run_script(g, &queries));
        put_string(out, &result)
    })
}

/// # Safety
/// `s` must be a live handle and `label` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn attk2_add_type(s: *mut Attk2Store, kind_: u32, label: *const c_char) -> Attk2Status {
    guard(|| {
        let (k, label) = (kind(kind_)?, text(label, "label")?);
        Ok(dynamic(s)?.add_type(k, label)?)
    })
}

/// Declares attribute `name` on a type; `dense` is 0 or 1.
///
/// # Safety
/// `s` must be a live handle and strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn attk2_add_attribute(
    s: *mut Attk2Store,
    kind_: u32,
    label: *const c_char,
    name: *const c_char,
    dense: u32,
) -> Attk2Status {
    guard(|| {
        let (k, label, name) = (kind(kind_)?, text(label, "label")?, text(name, "name")?);
        Ok(dynamic(s)?.add_attribute(k, label, name, dense != 0)?)
    })
}

/// Adds a node with `count` attributes given as parallel arrays.
///
/// # Safety
/// `s` must be a live handle, `names` and `values` hold `count`
/// NUL-terminated strings, `out_id` writable.
#[no_mangle]
pub unsafe extern "C" fn attk2_add_node(
    s: *mut Attk2Store,
    label: *const c_char,
    names: *const *const c_char,
    values: *const *const c_char,
    count: usize,
    out_id: *mut u64,
) -> Attk2Status {
    guard(|| {
        let (label, attrs) = (text(label, "label")?, attrs(names, values, count)?);
        let d = dynamic(s)?;
        if out_id.is_null() {
            return fail(Attk2Status::NullArgument, "output pointer is null");
        }
        put(out_id, d.add_node(label, &attrs)?)
    })
}

/// Adds an edge from `u` to `v`; attributes as in [`attk2_add_node`].
///
/// # Safety
/// As for [`attk2_add_node`].
#[no_mangle]
pub unsafe extern "C" fn attk2_add_edge(
    s: *mut Attk2Store,
    label: *const c_char,
    u: u64,
    v: u64,
    names: *const *const c_char,
    values: *const *const c_char,
    count: usize,
    out_id: *mut u64,
) -> Attk2Status {
    guard(|| {
        let (label, attrs) = (text(label, "label")?, attrs(names, values, count)?);
        let d = dynamic(s)?;
        if out_id.is_null() {
            return fail(Attk2Status::NullArgument, "output pointer is null");
        }
        put(out_id, d.add_edge(label, u, v, &attrs)?)
    })
}

/// # Safety
/// `s` must be a live handle and strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn attk2_set_attribute(
    s: *mut Attk2Store,
    kind_: u32,
    id: u64,
    att: *const c_char,
    value: *const c_char,
) -> Attk2Status {
    guard(|| {
        let (k, att, value) = (kind(kind_)?, text(att, "att")?, text(value, "value")?);
        Ok(dynamic(s)?.set_attribute(k, id, att, value)?)
    })
}

/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn attk2_remove_edge(s: *mut Attk2Store, id: u64) -> Attk2Status {
    guard(|| Ok(dynamic(s)?.remove_edge(id)?))
}

/// Removes a node without incident edges. Its id is not reused.
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn attk2_remove_node(s: *mut Attk2Store, id: u64) -> Attk2Status {
    guard(|| Ok(dynamic(s)?.remove_node(id)?))
}
