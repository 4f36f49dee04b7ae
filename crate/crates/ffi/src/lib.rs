//! C ABI over `omega_sct`.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `_free` function. Every fallible call returns an
//! [`OmegaStatus`]; on failure [`omega_last_error`] describes the problem
//! until the next call on the same thread. Strings returned through `char**`
//! out-parameters are freed with [`omega_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use omega_sct::formats::{load_sct, parse_ba, parse_mcs, render_ba, render_sct};
use omega_sct::mcs::{mcs_to_sct, ImpliedArcs};
use omega_sct::ramsey::{dgs_containment_with, ramsey_universality_with, sgs_containment_with, RamseyOptions};
use omega_sct::rank::{rank_containment_with, rank_universality_with, RankOptions};
use omega_sct::sct::{
    desc_automaton, desc_automaton_optimized, flow_automaton, ljb_check_with, render_calls, LjbOptions,
    SctProblem,
};
use omega_sct::{BuchiAutomaton, Deadline, Error, Lasso};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmegaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Precondition = 5,
    TooLarge = 6,
    Timeout = 7,
    Internal = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmegaEngine {
    /// Size-change graph closure; SCT only.
    Ljb = 0,
    /// Double-graph Ramsey search.
    RamseyDgs = 1,
    /// Single-graph Ramsey search; containment and SCT only.
    RamseySgs = 2,
    Rank = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmegaImplied {
    None = 0,
    Equality = 1,
    Full = 2,
}

/// Search settings. Start from [`omega_options_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct OmegaOptions {
    pub engine: OmegaEngine,
    pub subsumption: bool,
    /// Negative selects the default bound.
    pub max_rank: i32,
    /// Zero means no limit.
    pub timeout_ms: u64,
    /// Single-graph search only: caller vouches for its preconditions.
    pub assert_suffix_closed: bool,
}

/// Opaque Büchi automaton.
pub struct OmegaAutomaton(BuchiAutomaton);

/// Opaque size-change termination problem.
pub struct OmegaSctProblem(SctProblem);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(OmegaStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } | Error::Duplicate(_) | Error::UnknownState(_) | Error::UnknownSymbol(_) => {
                OmegaStatus::Parse
            }
            Error::Precondition(_) | Error::AlphabetMismatch => OmegaStatus::Precondition,
            Error::TooLarge { .. } => OmegaStatus::TooLarge,
            Error::Timeout => OmegaStatus::Timeout,
            _ => OmegaStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: &str) -> Failure {
    Failure(OmegaStatus::InvalidArgument, msg.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OmegaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            OmegaStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            OmegaStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(OmegaStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(OmegaStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(OmegaStatus::NullPointer, "null handle".into()))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(OmegaStatus::NullPointer, "null out-parameter".into()));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Writes the witness when the caller asked for one.
unsafe fn put_witness(out: *mut *mut c_char, w: Option<String>) {
    if !out.is_null() {
        out.write(w.map_or(ptr::null_mut(), c_string));
    }
}

fn deadline(o: &OmegaOptions) -> Deadline {
    if o.timeout_ms == 0 {
        Deadline::NONE
    } else {
        Deadline::after(Duration::from_millis(o.timeout_ms))
    }
}

fn ramsey_opts(o: &OmegaOptions, witnesses: bool) -> RamseyOptions {
    RamseyOptions {
        subsumption: o.subsumption,
        preconditions_asserted: o.assert_suffix_closed,
        witnesses,
        deadline: deadline(o),
    }
}

fn rank_opts(o: &OmegaOptions, witnesses: bool) -> RankOptions {
    RankOptions {
        max_rank: u32::try_from(o.max_rank).ok(),
        subsumption: o.subsumption,
        witnesses,
        deadline: deadline(o),
    }
}

fn render(b: &BuchiAutomaton, w: Option<&Lasso>) -> Option<String> {
    w.map(|w| w.render(b.alphabet()))
}

/// Subsumption on, default rank bound, no time limit, double-graph search.
#[no_mangle]
pub extern "C" fn omega_options_default() -> OmegaOptions {
    OmegaOptions {
        engine: OmegaEngine::RamseyDgs,
        subsumption: true,
        max_rank: -1,
        timeout_ms: 0,
        assert_suffix_closed: false,
    }
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn omega_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn omega_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `.ba` text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn omega_automaton_parse(text_: *const c_char, out: *mut *mut OmegaAutomaton) -> OmegaStatus {
    guard(|| {
        let b = parse_ba(text(text_)?)?;
        put(out, Box::into_raw(Box::new(OmegaAutomaton(b))))
    })
}

/// # Safety
/// `b` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn omega_automaton_free(b: *mut OmegaAutomaton) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Number of states, or 0 for NULL.
///
/// # Safety
/// `b` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn omega_automaton_num_states(b: *const OmegaAutomaton) -> usize {
    b.as_ref().map_or(0, |b| b.0.num_states())
}

/// Canonical `.ba` text.
///
/// # Safety
/// `b` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn omega_automaton_render(b: *const OmegaAutomaton, out: *mut *mut c_char) -> OmegaStatus {
    guard(|| {
        let b = get(b)?;
        put(out, c_string(render_ba(&b.0)))
    })
}

/// Universality with the Ramsey (double-graph) or rank engine. On refutation
/// a non-NULL `witness` receives the lasso `u (v)^ω`, else NULL.
///
/// # Safety
/// `b` must be a live handle, `holds` writable, `witness` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn omega_universal(
    b: *const OmegaAutomaton,
    opts: OmegaOptions,
    holds: *mut bool,
    witness: *mut *mut c_char,
) -> OmegaStatus {
    guard(|| {
        let b = &get(b)?.0;
        let want = !witness.is_null();
        let v = match opts.engine {
            OmegaEngine::RamseyDgs => ramsey_universality_with(b, &ramsey_opts(&opts, want))?.verdict,
            OmegaEngine::Rank => rank_universality_with(b, &rank_opts(&opts, want))?.verdict,
            _ => return Err(invalid("universality supports the double-graph and rank engines")),
        };
        put(holds, v.holds())?;
        put_witness(witness, render(b, v.lasso()));
        Ok(())
    })
}

/// `L(a) ⊆ L(b)`.
///
/// # Safety
/// As for [`omega_universal`].
#[no_mangle]
pub unsafe extern "C" fn omega_contains(
    a: *const OmegaAutomaton,
    b: *const OmegaAutomaton,
    opts: OmegaOptions,
    holds: *mut bool,
    witness: *mut *mut c_char,
) -> OmegaStatus {
    guard(|| {
        let (a, b) = (&get(a)?.0, &get(b)?.0);
        let want = !witness.is_null();
        let v = match opts.engine {
            OmegaEngine::RamseyDgs => dgs_containment_with(a, b, &ramsey_opts(&opts, want))?.verdict,
            OmegaEngine::RamseySgs => sgs_containment_with(a, b, &ramsey_opts(&opts, want))?.verdict,
            OmegaEngine::Rank => rank_containment_with(a, b, &rank_opts(&opts, want))?.verdict,
            OmegaEngine::Ljb => return Err(invalid("the closure engine decides SCT problems only")),
        };
        put(holds, v.holds())?;
        put_witness(witness, render(a, v.lasso()));
        Ok(())
    })
}

/// Parses `.sct` text, pruning functions unreachable from the first one.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn omega_sct_parse(text_: *const c_char, out: *mut *mut OmegaSctProblem) -> OmegaStatus {
    guard(|| {
        let (p, _) = load_sct(text(text_)?)?;
        put(out, Box::into_raw(Box::new(OmegaSctProblem(p))))
    })
}

/// Parses `.mcs` text and projects it to an SCT problem.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn omega_mcs_project(
    text_: *const c_char,
    implied: OmegaImplied,
    out: *mut *mut OmegaSctProblem,
) -> OmegaStatus {
    guard(|| {
        let m = parse_mcs(text(text_)?)?;
        let mode = match implied {
            OmegaImplied::None => ImpliedArcs::None,
            OmegaImplied::Equality => ImpliedArcs::EqualityOnly,
            OmegaImplied::Full => ImpliedArcs::Full,
        };
        let p = mcs_to_sct(&m, mode)?.problem;
        put(out, Box::into_raw(Box::new(OmegaSctProblem(p))))
    })
}

/// # Safety
/// `p` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn omega_sct_free(p: *mut OmegaSctProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Canonical `.sct` text.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn omega_sct_render(p: *const OmegaSctProblem, out: *mut *mut c_char) -> OmegaStatus {
    guard(|| {
        let p = get(p)?;
        put(out, c_string(render_sct(&p.0)))
    })
}

/// Size-change termination with any engine. On non-termination a non-NULL
/// `witness` receives the repeated call sequence, else NULL.
///
/// # Safety
/// `p` must be a live handle, `terminating` writable, `witness` NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn omega_sct_check(
    p: *const OmegaSctProblem,
    opts: OmegaOptions,
    terminating: *mut bool,
    witness: *mut *mut c_char,
) -> OmegaStatus {
    guard(|| {
        let p = &get(p)?.0;
        let want = !witness.is_null();
        let (holds, lasso) = match opts.engine {
            OmegaEngine::Ljb => {
                let o = LjbOptions {
                    subsumption: opts.subsumption,
                    witnesses: want,
                    deadline: deadline(&opts),
                };
                let v = ljb_check_with(p, &o)?.verdict;
                (v.is_terminating(), v.lasso())
            }
            OmegaEngine::RamseyDgs => {
                let v = dgs_containment_with(&flow_automaton(p)?, &desc_automaton(p)?, &ramsey_opts(&opts, want))?
                    .verdict;
                (v.holds(), v.lasso().cloned())
            }
            OmegaEngine::RamseySgs => {
                let o = RamseyOptions {
                    preconditions_asserted: true,
                    ..ramsey_opts(&opts, want)
                };
                let v = sgs_containment_with(&flow_automaton(p)?, &desc_automaton_optimized(p)?, &o)?.verdict;
                (v.holds(), v.lasso().cloned())
            }
            OmegaEngine::Rank => {
                let r = rank_opts(&opts, want);
                let v = rank_containment_with(&flow_automaton(p)?, &desc_automaton_optimized(p)?, &r)?.verdict;
                (v.holds(), v.lasso().cloned())
            }
        };
        put(terminating, holds)?;
        put_witness(witness, lasso.map(|l| render_calls(p, &l.cycle)));
        Ok(())
    })
}

/// The flow automaton and a descent automaton of `p`.
///
/// # Safety
/// `p` must be a live handle; `flow` and `desc` must be writable.
#[no_mangle]
pub unsafe extern "C" fn omega_sct_reduce(
    p: *const OmegaSctProblem,
    optimized: bool,
    flow: *mut *mut OmegaAutomaton,
    desc: *mut *mut OmegaAutomaton,
) -> OmegaStatus {
    guard(|| {
        let p = &get(p)?.0;
        if flow.is_null() || desc.is_null() {
            return Err(Failure(OmegaStatus::NullPointer, "null out-parameter".into()));
        }
        let f = flow_automaton(p)?;
        let d = if optimized {
            desc_automaton_optimized(p)?
        } else {
            desc_automaton(p)?
        };
        put(flow, Box::into_raw(Box::new(OmegaAutomaton(f))))?;
        put(desc, Box::into_raw(Box::new(OmegaAutomaton(d))))
    })
}
