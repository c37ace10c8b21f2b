//! C ABI over the netrobust toolkit.
//!
//! Topologies live behind an opaque `NrTopology` handle. Every call returns
//! an `NrStatus`; on failure `nr_last_error` gives a message for the calling
//! thread. Strings returned through out-pointers are owned by the caller and
//! released with `nr_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use netrobust::challenge::run_challenge;
use netrobust::metric::MetricValue;
use netrobust::report::{self, AnalyzeOptions, Format, Loaded};
use netrobust::{Error, Topology};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    /// The metric has no value on this topology.
    Undefined = 4,
    UnknownMetric = 5,
    Io = 6,
    TooLarge = 7,
    Panic = 8,
}

/// Opaque topology handle.
pub struct NrTopology {
    inner: Loaded,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn status_of(e: &Error) -> NrStatus {
    match e {
        Error::Parse { .. } => NrStatus::Parse,
        Error::Io(_) => NrStatus::Io,
        Error::Undefined(_) | Error::Incompatible(_) | Error::NoConvergence(_) => {
            NrStatus::Undefined
        }
        Error::UnknownMetric(_) => NrStatus::UnknownMetric,
        Error::TooLarge { .. } => NrStatus::TooLarge,
        _ => NrStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (NrStatus, String)>) -> NrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NrStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NrStatus::Panic
        }
    }
}

fn lift(e: Error) -> (NrStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (NrStatus, String) {
    (NrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (NrStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (NrStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn topo<'a>(t: *const NrTopology) -> Result<&'a NrTopology, (NrStatus, String)> {
    t.as_ref().ok_or_else(|| null("topology"))
}

unsafe fn give_string(out: *mut *mut c_char, s: String) -> Result<(), (NrStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = CString::new(s)
        .map_err(|_| (NrStatus::InvalidArgument, "string contains NUL".to_string()))?
        .into_raw();
    Ok(())
}

fn options(seed: u64) -> AnalyzeOptions {
    AnalyzeOptions {
        seed,
        ..AnalyzeOptions::default()
    }
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn nr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn nr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a topology from `n_edges` (u, w) pairs stored flat in `edges`.
/// `weights` may be null; otherwise it holds one positive weight per edge.
///
/// # Safety
/// `edges` must point to `2 * n_edges` values, `weights` (if non-null) to
/// `n_edges` values, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_topology_new(
    nodes: usize,
    edges: *const usize,
    n_edges: usize,
    weights: *const f64,
    directed: bool,
    out: *mut *mut NrTopology,
) -> NrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if edges.is_null() && n_edges > 0 {
            return Err(null("edges"));
        }
        let flat = if n_edges == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(edges, 2 * n_edges)
        };
        let pairs: Vec<(usize, usize)> = flat.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        let w = (!weights.is_null()).then(|| std::slice::from_raw_parts(weights, n_edges));
        let t = Topology::build(
            nodes,
            &pairs,
            w,
            netrobust::graph::BuildOptions {
                directed,
                dedup: false,
            },
        )
        .map_err(lift)?;
        *out = Box::into_raw(Box::new(NrTopology {
            inner: Loaded::from_topology(t),
        }));
        Ok(())
    })
}

/// Reads an edge file; `format` is `edgelist`, `weighted_edgelist` or
/// `as_rel`.
///
/// # Safety
/// `path` and `format` must be NUL-terminated strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nr_topology_from_file(
    path: *const c_char,
    format: *const c_char,
    directed: bool,
    out: *mut *mut NrTopology,
) -> NrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = str_arg(path, "path")?;
        let format = Format::parse(str_arg(format, "format")?).map_err(lift)?;
        if !format.is_edge_format() {
            return Err((
                NrStatus::InvalidArgument,
                format!("{} is not an edge format", format.key()),
            ));
        }
        let inner = Loaded::open(Path::new(path), format, directed).map_err(lift)?;
        *out = Box::into_raw(Box::new(NrTopology { inner }));
        Ok(())
    })
}

/// # Safety
/// `t` must come from a constructor above and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nr_topology_free(t: *mut NrTopology) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn nr_topology_node_count(t: *const NrTopology) -> usize {
    t.as_ref().map_or(0, |t| t.inner.topology.node_count())
}

/// # Safety
/// `t` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn nr_topology_edge_count(t: *const NrTopology) -> usize {
    t.as_ref().map_or(0, |t| t.inner.topology.edge_count())
}

unsafe fn metric(
    t: *const NrTopology,
    key: *const c_char,
    seed: u64,
) -> Result<MetricValue, (NrStatus, String)> {
    let t = topo(t)?;
    let spec = report::lookup(str_arg(key, "key")?).map_err(lift)?;
    let r = report::evaluate(spec, &t.inner.topology, &options(seed));
    match r.value {
        MetricValue::Undefined { reason } => Err((NrStatus::Undefined, reason)),
        v => Ok(v),
    }
}

/// Value of a global scalar metric.
///
/// # Safety
/// `t` live, `key` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nr_metric_scalar(
    t: *const NrTopology,
    key: *const c_char,
    seed: u64,
    out: *mut f64,
) -> NrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        match metric(t, key, seed)? {
            MetricValue::GlobalScalar { value } => {
                *out = value
                    .value()
                    .ok_or((NrStatus::Undefined, "value is undefined".to_string()))?;
                Ok(())
            }
            _ => Err((
                NrStatus::InvalidArgument,
                "metric is not a global scalar".to_string(),
            )),
        }
    })
}

/// Per-node metric values written to `out[0..len]`; undefined entries are
/// NaN. `written` receives the node count even when `len` is too small, in
/// which case nothing is copied and INVALID_ARGUMENT is returned.
///
/// # Safety
/// `t` live, `key` NUL-terminated, `out` valid for `len` values, `written`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn nr_metric_per_node(
    t: *const NrTopology,
    key: *const c_char,
    seed: u64,
    out: *mut f64,
    len: usize,
    written: *mut usize,
) -> NrStatus {
    guard(|| {
        if written.is_null() {
            return Err(null("written"));
        }
        let MetricValue::PerNode { values } = metric(t, key, seed)? else {
            return Err((
                NrStatus::InvalidArgument,
                "metric is not per-node".to_string(),
            ));
        };
        *written = values.len();
        if len < values.len() {
            return Err((
                NrStatus::InvalidArgument,
                format!("buffer holds {len}, need {}", values.len()),
            ));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let dst = std::slice::from_raw_parts_mut(out, values.len());
        for (d, v) in dst.iter_mut().zip(&values) {
            *d = v.value().unwrap_or(f64::NAN);
        }
        Ok(())
    })
}

/// JSON report for comma-separated `keys` (null or empty: every key).
/// `options_json` may be null or an options object.
///
/// # Safety
/// `t` live; string arguments NUL-terminated or null as documented; `out`
/// writable. Free the result with `nr_string_free`.
#[no_mangle]
pub unsafe extern "C" fn nr_analyze_json(
    t: *const NrTopology,
    keys: *const c_char,
    options_json: *const c_char,
    out: *mut *mut c_char,
) -> NrStatus {
    guard(|| {
        let t = topo(t)?;
        let keys = if keys.is_null() {
            Vec::new()
        } else {
            report::parse_keys(str_arg(keys, "keys")?).map_err(lift)?
        };
        let opts: AnalyzeOptions = if options_json.is_null() {
            AnalyzeOptions::default()
        } else {
            serde_json::from_str(str_arg(options_json, "options")?)
                .map_err(|e| (NrStatus::Parse, format!("options: {e}")))?
        };
        let doc = report::analyze(&t.inner, &keys, &opts).map_err(lift)?;
        give_string(out, doc.to_json())
    })
}

/// Runs a challenge scenario given as JSON and returns the trace as JSON.
///
/// # Safety
/// `t` live; `scenario_json` NUL-terminated; `out` writable. Free the
/// result with `nr_string_free`.
#[no_mangle]
pub unsafe extern "C" fn nr_challenge_json(
    t: *const NrTopology,
    scenario_json: *const c_char,
    out: *mut *mut c_char,
) -> NrStatus {
    guard(|| {
        let t = topo(t)?;
        let sc = report::parse_scenario(str_arg(scenario_json, "scenario")?).map_err(lift)?;
        let trace = run_challenge(&t.inner.topology, &sc).map_err(lift)?;
        give_string(
            out,
            serde_json::to_string(&trace).expect("trace serialises"),
        )
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn nr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
