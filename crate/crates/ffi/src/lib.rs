//! C interface to `atc-core`.
//!
//! Graphs, indexes and results are opaque handles created by `atc_*` calls
//! and released with the matching `*_free`. Every call returns an
//! [`AtcStatus`]; on failure [`atc_last_error`] describes the problem for the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use atc_core::eval::run_algorithm;
use atc_core::greedy::SearchResult;
use atc_core::index::{self, AtIndex};
use atc_core::score::format_score;
use atc_core::{build_index, Algorithm, Error, Graph, QuerySpec, Rational};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Io = 3,
    Format = 4,
    Infeasible = 5,
    BadQuery = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtcAlgorithm {
    Basic = 0,
    Bulk = 1,
    Local = 2,
    Baseline = 3,
}

/// Query parameters. Initialize with [`atc_query_init`], then set the
/// fields. `attrs` may be null when `n_attrs` is 0.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AtcQuery {
    pub nodes: *const u64,
    pub n_nodes: usize,
    pub attrs: *const *const c_char,
    pub n_attrs: usize,
    pub k: u32,
    pub d: u32,
    pub auto_kd: bool,
    /// An `AtcAlgorithm` value.
    pub algo: u32,
    pub epsilon_num: u32,
    pub epsilon_den: u32,
    pub gamma_num: u32,
    pub gamma_den: u32,
    pub eta: usize,
}

pub struct AtcGraph {
    graph: Graph,
}

pub struct AtcIndex {
    index: AtIndex,
}

pub struct AtcResult {
    vertices: Vec<u64>,
    score: Rational,
    score_text: CString,
    k: u32,
    d: u32,
    diameter: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(e: &Error) -> AtcStatus {
    match e {
        Error::Io { .. } => AtcStatus::Io,
        Error::Parse { .. }
        | Error::EmptyGraph
        | Error::CorruptIndex(_)
        | Error::IndexVersion { .. }
        | Error::IndexChecksum(_) => AtcStatus::Format,
        Error::NoCommunity(_) => AtcStatus::Infeasible,
        Error::InvalidQuery(_) => AtcStatus::BadQuery,
        _ => AtcStatus::InvalidArgument,
    }
}

struct Fail(AtcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> AtcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            AtcStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            AtcStatus::Panic
        }
    }
}

fn null(name: &str) -> Fail {
    Fail(AtcStatus::NullArgument, format!("{name} is null"))
}

unsafe fn path_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(AtcStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut *mut T, name: &str) -> Result<&'a mut *mut T, Fail> {
    p.as_mut().ok_or_else(|| null(name))
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next `atc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn atc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, including the index file format.
#[no_mangle]
pub extern "C" fn atc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), " (index format 1)\0")
        .as_ptr()
        .cast()
}

/// Loads an edge list and, when `attrs_path` is not null, an attribute file.
///
/// # Safety
/// Paths must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn atc_graph_load(
    edges_path: *const c_char,
    attrs_path: *const c_char,
    out: *mut *mut AtcGraph,
) -> AtcStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let edges = path_arg(edges_path, "edges_path")?;
        let (mut g, _) = atc_core::graph::load_edge_list(edges)?;
        if !attrs_path.is_null() {
            g = atc_core::graph::load_attributes(path_arg(attrs_path, "attrs_path")?, g)?;
        }
        *out = Box::into_raw(Box::new(AtcGraph { graph: g }));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn atc_graph_num_vertices(g: *const AtcGraph) -> usize {
    g.as_ref().map_or(0, |g| g.graph.num_vertices())
}

/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn atc_graph_num_edges(g: *const AtcGraph) -> usize {
    g.as_ref().map_or(0, |g| g.graph.num_edges())
}

/// # Safety
/// `g` must be null or a handle from `atc_graph_load`/`atc_index_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn atc_graph_free(g: *mut AtcGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Builds the AT-index of `g`.
///
/// # Safety
/// `g` must be a live graph handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn atc_index_build(g: *const AtcGraph, out: *mut *mut AtcIndex) -> AtcStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        *out = Box::into_raw(Box::new(AtcIndex {
            index: build_index(&g.graph),
        }));
        Ok(())
    })
}

/// Writes the index of `g` to `path`.
///
/// # Safety
/// `g` and `idx` must be live handles, `idx` built from `g`.
#[no_mangle]
pub unsafe extern "C" fn atc_index_save(
    g: *const AtcGraph,
    idx: *const AtcIndex,
    path: *const c_char,
) -> AtcStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        let idx = idx.as_ref().ok_or_else(|| null("index"))?;
        index::save(&g.graph, &idx.index, path_arg(path, "path")?)?;
        Ok(())
    })
}

/// Reads an index file, returning the graph stored in it and the index.
///
/// # Safety
/// `path` must be a NUL-terminated string; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn atc_index_load(
    path: *const c_char,
    graph_out: *mut *mut AtcGraph,
    index_out: *mut *mut AtcIndex,
) -> AtcStatus {
    guard(|| {
        let graph_out = out_arg(graph_out, "graph_out")?;
        let index_out = out_arg(index_out, "index_out")?;
        let (g, idx) = index::load(path_arg(path, "path")?)?;
        *graph_out = Box::into_raw(Box::new(AtcGraph { graph: g }));
        *index_out = Box::into_raw(Box::new(AtcIndex { index: idx }));
        Ok(())
    })
}

/// Number of stored trussness entries.
///
/// # Safety
/// `idx` must be null or a live index handle.
#[no_mangle]
pub unsafe extern "C" fn atc_index_entry_count(idx: *const AtcIndex) -> usize {
    idx.as_ref().map_or(0, |i| i.index.entry_count())
}

/// # Safety
/// `idx` must be null or an index handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn atc_index_free(idx: *mut AtcIndex) {
    if !idx.is_null() {
        drop(Box::from_raw(idx));
    }
}

/// Fills `q` with the defaults: local search, k = 4, d = 4, ε = 0.03,
/// γ = 0.2, η = 1000, no nodes or attributes.
///
/// # Safety
/// `q` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn atc_query_init(q: *mut AtcQuery) {
    if let Some(q) = q.as_mut() {
        *q = AtcQuery {
            nodes: ptr::null(),
            n_nodes: 0,
            attrs: ptr::null(),
            n_attrs: 0,
            k: atc_core::query::DEFAULT_K,
            d: atc_core::query::DEFAULT_D,
            auto_kd: false,
            algo: AtcAlgorithm::Local as u32,
            epsilon_num: 3,
            epsilon_den: 100,
            gamma_num: 1,
            gamma_den: 5,
            eta: atc_core::query::DEFAULT_ETA,
        };
    }
}

unsafe fn to_spec(g: &Graph, q: &AtcQuery) -> Result<QuerySpec, Fail> {
    if q.n_nodes > 0 && q.nodes.is_null() {
        return Err(null("nodes"));
    }
    if q.n_attrs > 0 && q.attrs.is_null() {
        return Err(null("attrs"));
    }
    let ext: &[u64] = if q.n_nodes == 0 {
        &[]
    } else {
        std::slice::from_raw_parts(q.nodes, q.n_nodes)
    };
    let nodes = ext
        .iter()
        .map(|&e| g.vertex_of(e).ok_or(Error::UnknownVertex(e)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut attrs = Vec::with_capacity(q.n_attrs);
    for i in 0..q.n_attrs {
        let label = path_arg(*q.attrs.add(i), "attribute label")?;
        attrs.push(
            g.attr_id(label)
                .ok_or_else(|| Error::UnknownAttribute(label.to_owned()))?,
        );
    }
    if q.epsilon_den == 0 || q.gamma_den == 0 {
        return Err(Fail(AtcStatus::InvalidArgument, "zero denominator".into()));
    }
    let mut spec = QuerySpec::new(&nodes, &attrs).with_kd(q.k, q.d);
    spec.auto_kd = q.auto_kd;
    spec.epsilon = Rational::new(q.epsilon_num.into(), q.epsilon_den.into());
    spec.gamma = Rational::new(q.gamma_num.into(), q.gamma_den.into());
    spec.eta = q.eta;
    Ok(spec)
}

fn algorithm(a: u32) -> Result<Algorithm, Fail> {
    Ok(match a {
        x if x == AtcAlgorithm::Basic as u32 => Algorithm::Basic,
        x if x == AtcAlgorithm::Bulk as u32 => Algorithm::Bulk,
        x if x == AtcAlgorithm::Local as u32 => Algorithm::Local,
        x if x == AtcAlgorithm::Baseline as u32 => Algorithm::Baseline,
        other => {
            return Err(Fail(
                AtcStatus::InvalidArgument,
                format!("unknown algorithm {other}"),
            ))
        }
    })
}

fn wrap(g: &Graph, res: SearchResult) -> AtcResult {
    let mut vertices: Vec<u64> = res.vertices.iter().map(|&v| g.ext_id(v)).collect();
    vertices.sort_unstable();
    AtcResult {
        vertices,
        score_text: CString::new(format_score(&res.score)).expect("no NUL"),
        score: res.score,
        k: res.k,
        d: res.query_distance,
        diameter: res.diameter,
    }
}

/// Runs one query. `idx` may be null except for local search.
/// Returns `Infeasible` when no community exists.
///
/// # Safety
/// Handles must be live; `q` must point to an initialized query whose arrays
/// hold `n_nodes` ids and `n_attrs` NUL-terminated labels.
#[no_mangle]
pub unsafe extern "C" fn atc_search(
    g: *const AtcGraph,
    idx: *const AtcIndex,
    q: *const AtcQuery,
    out: *mut *mut AtcResult,
) -> AtcStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let g = &g.as_ref().ok_or_else(|| null("graph"))?.graph;
        let q = q.as_ref().ok_or_else(|| null("query"))?;
        let spec = to_spec(g, q)?;
        let idx = idx.as_ref().map(|i| &i.index);
        let algo = algorithm(q.algo)?;
        if algo == Algorithm::Local && idx.is_none() {
            return Err(null("index"));
        }
        let res = run_algorithm(g, idx, algo, &spec)?;
        *out = Box::into_raw(Box::new(wrap(g, res)));
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn atc_result_num_vertices(r: *const AtcResult) -> usize {
    r.as_ref().map_or(0, |r| r.vertices.len())
}

/// Copies up to `cap` member ids (ascending) into `buf`; returns the total
/// number of members.
///
/// # Safety
/// `r` must be a live result handle; `buf` must hold `cap` values or be null
/// with `cap` 0.
#[no_mangle]
pub unsafe extern "C" fn atc_result_vertices(
    r: *const AtcResult,
    buf: *mut u64,
    cap: usize,
) -> usize {
    let Some(r) = r.as_ref() else {
        return 0;
    };
    if !buf.is_null() {
        let n = cap.min(r.vertices.len());
        ptr::copy_nonoverlapping(r.vertices.as_ptr(), buf, n);
    }
    r.vertices.len()
}

/// Attribute score as a fraction.
///
/// # Safety
/// `r` must be a live result handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn atc_result_score(
    r: *const AtcResult,
    num: *mut i64,
    den: *mut i64,
) -> AtcStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("result"))?;
        let num = num.as_mut().ok_or_else(|| null("num"))?;
        let den = den.as_mut().ok_or_else(|| null("den"))?;
        let conv = |x: i128| {
            i64::try_from(x)
                .map_err(|_| Fail(AtcStatus::InvalidArgument, "score overflows i64".into()))
        };
        *num = conv(*r.score.numer())?;
        *den = conv(*r.score.denom())?;
        Ok(())
    })
}

/// Score with six decimals; owned by the result.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn atc_result_score_text(r: *const AtcResult) -> *const c_char {
    r.as_ref().map_or(ptr::null(), |r| r.score_text.as_ptr())
}

/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn atc_result_k(r: *const AtcResult) -> u32 {
    r.as_ref().map_or(0, |r| r.k)
}

/// Query distance reached by the community.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn atc_result_d(r: *const AtcResult) -> u32 {
    r.as_ref().map_or(0, |r| r.d)
}

/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn atc_result_diameter(r: *const AtcResult) -> u32 {
    r.as_ref().map_or(0, |r| r.diameter)
}

/// # Safety
/// `r` must be null or a result handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn atc_result_free(r: *mut AtcResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
