//! C ABI for the sufficient-component-cause analysis library.
//!
//! Handles are opaque pointers created and released by this library.
//! Functions return a status code; on failure a thread-local message is
//! available through [`scc_last_error`] until the next call on the same
//! thread. Strings returned through out-parameters are UTF-8 JSON
//! documents owned by the caller and must be released with
//! [`scc_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;

use scc_core::empirical::{
    irreducibility_contrast, msc_contrast, singularity_contrast, Design, StratifiedCounts,
};
use scc_core::engine::{
    avoidance_representation, essential_prime_implicants, prime_implicants, Avoidance,
    Representation,
};
use scc_core::error::Error;
use scc_core::interaction::{is_irreducible, is_singular, pns, CausePartition, PartialAssignment};
use scc_core::io::{read_counts, read_truth_table};
use scc_core::report::{rules, Finding, RepresentationExport};
use scc_core::trees::enumerate_trees;
use scc_core::{LiteralSet, Population, WeightMode};

/// Result of a C API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SccStatus {
    Ok = 0,
    /// A pointer was null, a string was not UTF-8, or a literal
    /// specification did not parse.
    InvalidArgument = 1,
    /// The input data was malformed or insufficient for the request.
    DataError = 2,
    /// An internal invariant failed; report this as a bug.
    InternalError = 3,
}

/// Study design of a counts file.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SccDesign {
    Cohort = 0,
    CaseControl = 1,
}

/// Which empirical contrast family to evaluate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SccContrastKind {
    Irreducibility = 0,
    Singularity = 1,
    MinimalSufficientCause = 2,
}

/// Opaque handle around a loaded population of potential-outcome tables.
pub struct SccPopulation(Population);

/// Opaque handle around loaded stratified count data.
pub struct SccCounts(StratifiedCounts);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn clear_last_error() {
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::default();
    });
}

fn fail(status: SccStatus, msg: impl AsRef<str>) -> SccStatus {
    set_last_error(msg.as_ref());
    status
}

fn fail_lib(e: Error) -> SccStatus {
    let status = match e.exit_class() {
        3 => SccStatus::InternalError,
        _ => SccStatus::DataError,
    };
    fail(status, e.to_string())
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn require_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, SccStatus> {
    if p.is_null() {
        return Err(fail(SccStatus::InvalidArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(SccStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn optional_str<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, SccStatus> {
    if p.is_null() {
        Ok(None)
    } else {
        require_str(p, what).map(Some)
    }
}

fn emit_string(text: String, out: *mut *mut c_char) -> SccStatus {
    if out.is_null() {
        return fail(SccStatus::InvalidArgument, "out pointer is null");
    }
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            clear_last_error();
            SccStatus::Ok
        }
        Err(_) => fail(SccStatus::InternalError, "output contained an interior NUL"),
    }
}

fn emit_json<T: serde::Serialize>(value: &T, out: *mut *mut c_char) -> SccStatus {
    match serde_json::to_string(value) {
        Ok(text) => emit_string(text, out),
        Err(e) => fail(SccStatus::InternalError, format!("serialization failed: {e}")),
    }
}

fn parse_b(spec: &str, k: usize) -> Result<(LiteralSet, CausePartition), SccStatus> {
    let b = LiteralSet::parse(spec)
        .map_err(|e| fail(SccStatus::InvalidArgument, e.to_string()))?;
    let p = CausePartition::new(b.clone(), k)
        .map_err(|e| fail(SccStatus::InvalidArgument, e.to_string()))?;
    Ok((b, p))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn scc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread, or an empty
/// string. The pointer is valid until the next API call on this thread.
#[no_mangle]
pub extern "C" fn scc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be a string previously returned through an out-parameter of
/// this library, or null.
#[no_mangle]
pub unsafe extern "C" fn scc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a truth-table CSV (`id,weight,D000,...`) into a population
/// handle. With `probability_weights` true, weights must sum to 1.
///
/// # Safety
/// `csv` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn scc_population_parse(
    csv: *const c_char,
    probability_weights: bool,
    out: *mut *mut SccPopulation,
) -> SccStatus {
    let text = match require_str(csv, "csv") {
        Ok(t) => t,
        Err(s) => return s,
    };
    if out.is_null() {
        return fail(SccStatus::InvalidArgument, "out pointer is null");
    }
    let mode = if probability_weights { WeightMode::Probability } else { WeightMode::Count };
    match read_truth_table(text.as_bytes(), mode) {
        Ok(pop) => {
            *out = Box::into_raw(Box::new(SccPopulation(pop)));
            clear_last_error();
            SccStatus::Ok
        }
        Err(e) => fail_lib(e),
    }
}

/// Releases a population handle.
///
/// # Safety
/// `p` must come from [`scc_population_parse`], or be null.
#[no_mangle]
pub unsafe extern "C" fn scc_population_free(p: *mut SccPopulation) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of individuals, or -1 on a null handle.
///
/// # Safety
/// `p` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn scc_population_size(p: *const SccPopulation) -> i64 {
    match p.as_ref() {
        Some(pop) => pop.0.len() as i64,
        None => -1,
    }
}

/// Number of binary causes, or -1 on a null handle.
///
/// # Safety
/// `p` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn scc_population_causes(p: *const SccPopulation) -> i64 {
    match p.as_ref() {
        Some(pop) => pop.0.k() as i64,
        None => -1,
    }
}

/// Per-individual minimal sufficient causes (prime implicants) and
/// essential prime implicants, as a JSON array.
///
/// # Safety
/// `p` must be a valid handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn scc_implicants_json(
    p: *const SccPopulation,
    out: *mut *mut c_char,
) -> SccStatus {
    let Some(pop) = p.as_ref() else {
        return fail(SccStatus::InvalidArgument, "population handle is null");
    };
    let rows: Vec<serde_json::Value> = pop
        .0
        .members()
        .iter()
        .map(|m| {
            let pi = prime_implicants(&m.table);
            let epi = essential_prime_implicants(&m.table);
            serde_json::json!({
                "id": m.id,
                "prime_implicants": pi.implicants.iter().map(|b| b.labels()).collect::<Vec<_>>(),
                "essential_prime_implicants": epi.implicants.iter().map(|b| b.labels()).collect::<Vec<_>>(),
                "tautology": pi.tautology,
            })
        })
        .collect();
    emit_json(&rows, out)
}

fn query_finding(
    pop: &Population,
    b_spec: &str,
    singular: bool,
) -> Result<Finding, SccStatus> {
    let (b, p) = parse_b(b_spec, pop.k())?;
    let labels: Vec<String> = (1..=pop.k()).map(|j| format!("X{j}")).collect();
    let finding = if singular {
        let w = is_singular(pop, &p).map_err(fail_lib)?;
        Finding::new(
            format!("{{{b}}} is singular"),
            labels,
            w.is_some(),
            rules::SINGULARITY_EXACT_TABLE,
        )
        .with_witness(w)
    } else {
        let w = is_irreducible(pop, &p).map_err(fail_lib)?;
        Finding::new(
            format!("{{{b}}} is irreducible"),
            labels,
            w.is_some(),
            rules::IRREDUCIBILITY_WITNESS,
        )
        .with_witness(w)
    };
    Ok(finding)
}

/// Irreducibility query: JSON finding with the witness when one exists.
///
/// # Safety
/// Pointers must be valid as documented on [`scc_population_parse`].
#[no_mangle]
pub unsafe extern "C" fn scc_irreducible_json(
    p: *const SccPopulation,
    b: *const c_char,
    out: *mut *mut c_char,
) -> SccStatus {
    let Some(pop) = p.as_ref() else {
        return fail(SccStatus::InvalidArgument, "population handle is null");
    };
    let spec = match require_str(b, "b") {
        Ok(s) => s,
        Err(s) => return s,
    };
    match query_finding(&pop.0, spec, false) {
        Ok(f) => emit_json(&f, out),
        Err(s) => s,
    }
}

/// Singularity query: JSON finding with the witness when one exists.
///
/// # Safety
/// Pointers must be valid as documented on [`scc_population_parse`].
#[no_mangle]
pub unsafe extern "C" fn scc_singular_json(
    p: *const SccPopulation,
    b: *const c_char,
    out: *mut *mut c_char,
) -> SccStatus {
    let Some(pop) = p.as_ref() else {
        return fail(SccStatus::InvalidArgument, "population handle is null");
    };
    let spec = match require_str(b, "b") {
        Ok(s) => s,
        Err(s) => return s,
    };
    match query_finding(&pop.0, spec, true) {
        Ok(f) => emit_json(&f, out),
        Err(s) => s,
    }
}

/// Probability of necessity and sufficiency of a full-width conjunction.
/// Requires a probability-mode population.
///
/// # Safety
/// Pointers must be valid as documented on [`scc_population_parse`].
#[no_mangle]
pub unsafe extern "C" fn scc_pns(
    p: *const SccPopulation,
    b: *const c_char,
    out: *mut f64,
) -> SccStatus {
    let Some(pop) = p.as_ref() else {
        return fail(SccStatus::InvalidArgument, "population handle is null");
    };
    let spec = match require_str(b, "b") {
        Ok(s) => s,
        Err(s) => return s,
    };
    if out.is_null() {
        return fail(SccStatus::InvalidArgument, "out pointer is null");
    }
    let set = match LiteralSet::parse(spec) {
        Ok(s) => s,
        Err(e) => return fail(SccStatus::InvalidArgument, e.to_string()),
    };
    match pns(&pop.0, &set) {
        Ok(v) => {
            *out = v;
            clear_last_error();
            SccStatus::Ok
        }
        Err(e) => fail_lib(e),
    }
}

/// Canonical sufficient-cause representation as JSON
/// (`{"conjuncts": [...], "membership": [...]}`).
///
/// # Safety
/// Pointers must be valid as documented on [`scc_population_parse`].
#[no_mangle]
pub unsafe extern "C" fn scc_canonical_representation_json(
    p: *const SccPopulation,
    out: *mut *mut c_char,
) -> SccStatus {
    let Some(pop) = p.as_ref() else {
        return fail(SccStatus::InvalidArgument, "population handle is null");
    };
    let rep = match Representation::canonical(&pop.0) {
        Ok(r) => r,
        Err(e) => return fail_lib(e),
    };
    match rep.verify(&pop.0) {
        Ok(true) => {}
        Ok(false) => {
            return fail(
                SccStatus::InternalError,
                "canonical representation failed verification",
            )
        }
        Err(e) => return fail_lib(e),
    }
    emit_json(&RepresentationExport::from_representation(&rep, &pop.0), out)
}

/// Representation avoiding `b`, as
/// `{"constructible": bool, "export": {...}?}`; not constructible exactly
/// when `b` is irreducible.
///
/// # Safety
/// Pointers must be valid as documented on [`scc_population_parse`].
#[no_mangle]
pub unsafe extern "C" fn scc_avoidance_representation_json(
    p: *const SccPopulation,
    b: *const c_char,
    out: *mut *mut c_char,
) -> SccStatus {
    let Some(pop) = p.as_ref() else {
        return fail(SccStatus::InvalidArgument, "population handle is null");
    };
    let spec = match require_str(b, "b") {
        Ok(s) => s,
        Err(s) => return s,
    };
    let (_, partition) = match parse_b(spec, pop.0.k()) {
        Ok(v) => v,
        Err(s) => return s,
    };
    match avoidance_representation(&pop.0, &partition) {
        Ok(Avoidance::Constructed(rep)) => emit_json(
            &serde_json::json!({
                "constructible": true,
                "export": RepresentationExport::from_representation(&rep, &pop.0),
            }),
            out,
        ),
        Ok(Avoidance::NotConstructible) => {
            emit_json(&serde_json::json!({ "constructible": false }), out)
        }
        Err(e) => fail_lib(e),
    }
}

/// Parses a stratified counts CSV. `exposures` is a comma-separated list
/// of exposure column names; `strata` likewise or null for none.
///
/// # Safety
/// Strings must be valid NUL-terminated strings; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn scc_counts_parse(
    csv: *const c_char,
    design: SccDesign,
    exposures: *const c_char,
    strata: *const c_char,
    out: *mut *mut SccCounts,
) -> SccStatus {
    let text = match require_str(csv, "csv") {
        Ok(t) => t,
        Err(s) => return s,
    };
    let exposure_list = match require_str(exposures, "exposures") {
        Ok(t) => t,
        Err(s) => return s,
    };
    let strata_list = match optional_str(strata, "strata") {
        Ok(t) => t.unwrap_or(""),
        Err(s) => return s,
    };
    if out.is_null() {
        return fail(SccStatus::InvalidArgument, "out pointer is null");
    }
    let design = match design {
        SccDesign::Cohort => Design::Cohort,
        SccDesign::CaseControl => Design::CaseControl,
    };
    let split = |s: &str| -> Vec<String> {
        s.split(',')
            .map(|p| p.trim().to_string())
            .filter(|p| !p.is_empty())
            .collect()
    };
    let exposure_names = split(exposure_list);
    if exposure_names.is_empty() {
        return fail(SccStatus::InvalidArgument, "exposures must name at least one column");
    }
    match read_counts(text.as_bytes(), design, &exposure_names, &split(strata_list)) {
        Ok(counts) => {
            *out = Box::into_raw(Box::new(SccCounts(counts)));
            clear_last_error();
            SccStatus::Ok
        }
        Err(e) => fail_lib(e),
    }
}

/// Releases a counts handle.
///
/// # Safety
/// `c` must come from [`scc_counts_parse`], or be null.
#[no_mangle]
pub unsafe extern "C" fn scc_counts_free(c: *mut SccCounts) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Evaluates one contrast family for every spanning tree on `bplus` and
/// returns a JSON array of results (estimate, standard error, interval,
/// one-sided p-value, assumptions).
///
/// Literals in `b`/`bplus` may use exposure names or X-numbers. `bplus`
/// may be null for the no-monotonicity form; `stratum` null means the
/// unstratified label `*`; a negative `continuity` disables the
/// zero-cell correction.
///
/// # Safety
/// Pointers must be valid as documented on [`scc_counts_parse`].
#[no_mangle]
pub unsafe extern "C" fn scc_contrast_json(
    c: *const SccCounts,
    b: *const c_char,
    bplus: *const c_char,
    kind: SccContrastKind,
    stratum: *const c_char,
    continuity: f64,
    out: *mut *mut c_char,
) -> SccStatus {
    let Some(counts) = c.as_ref() else {
        return fail(SccStatus::InvalidArgument, "counts handle is null");
    };
    let data = &counts.0;
    let b_spec = match require_str(b, "b") {
        Ok(s) => s,
        Err(s) => return s,
    };
    let bplus_spec = match optional_str(bplus, "bplus") {
        Ok(s) => s.unwrap_or(""),
        Err(s) => return s,
    };
    let stratum = match optional_str(stratum, "stratum") {
        Ok(s) => s.unwrap_or("*").to_string(),
        Err(s) => return s,
    };
    let continuity = if continuity < 0.0 { None } else { Some(continuity) };

    let names = data.exposure_names().to_vec();
    let resolve = |spec: &str| -> Result<LiteralSet, SccStatus> {
        let resolved: String = spec
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|tok| {
                let (neg, name) = match tok.strip_prefix('!') {
                    Some(r) => ("!", r),
                    None => ("", tok),
                };
                match names.iter().position(|n| n == name) {
                    Some(var) => format!("{neg}X{}", var + 1),
                    None => tok.to_string(),
                }
            })
            .collect::<Vec<_>>()
            .join(",");
        LiteralSet::parse(&resolved).map_err(|e| fail(SccStatus::InvalidArgument, e.to_string()))
    };
    let b_set = match resolve(b_spec) {
        Ok(s) if !s.is_empty() => s,
        Ok(_) => return fail(SccStatus::InvalidArgument, "b must name at least one literal"),
        Err(s) => return s,
    };
    let bplus_set = match resolve(bplus_spec) {
        Ok(s) => s,
        Err(s) => return s,
    };
    if !bplus_set.is_subset_of(&b_set) {
        return fail(SccStatus::InvalidArgument, "bplus must be a subset of b");
    }
    let trees = match enumerate_trees(&bplus_set) {
        Ok(t) => t,
        Err(e) => return fail_lib(e),
    };
    let k = data.k();
    let zero_ctx = PartialAssignment::new(
        (0..k).filter(|v| !b_set.covers_var(*v)).map(|v| (v, false)).collect(),
    )
    .expect("distinct variables");

    let mut rows = Vec::with_capacity(trees.len());
    for tree in &trees {
        let result = match kind {
            SccContrastKind::Irreducibility => {
                irreducibility_contrast(data, &b_set, &bplus_set, tree, &zero_ctx, &stratum, continuity)
            }
            SccContrastKind::Singularity => {
                singularity_contrast(data, &b_set, &bplus_set, tree, &stratum, continuity)
            }
            SccContrastKind::MinimalSufficientCause => {
                msc_contrast(data, &b_set, &bplus_set, tree, &stratum, continuity)
            }
        };
        match result {
            Ok(r) => rows.push(r),
            Err(e) => return fail_lib(e),
        }
    }
    emit_json(&rows, out)
}
