//! C ABI for the dsdecide solver.
//!
//! Every function returns a [`DsdStatus`]; on failure a message describing
//! the error is available from [`dsd_last_error`] on the same thread.
//! Handles and strings returned by the library are owned by the caller and
//! released with the matching `*_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dsdecide::calculus::Lambda;
use dsdecide::cli::{parse_problem, report, ProblemFile};
use dsdecide::network::ValidateOptions;
use dsdecide::solver::{solve, SolveResult};
use dsdecide::Error;

/// Status codes returned by every function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DsdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    NotWellDefined = 4,
    InvalidLambda = 5,
    Solver = 6,
    NotFound = 7,
    Panic = 8,
}

/// A parsed problem file.
pub struct DsdNetwork {
    problem: ProblemFile,
}

/// The outcome of solving a network.
pub struct DsdSolveResult {
    vars: dsdecide::model::Variables,
    result: SolveResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: DsdStatus, message: impl Into<String>) -> DsdStatus {
    set_error(message);
    status
}

fn guard(f: impl FnOnce() -> DsdStatus) -> DsdStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(DsdStatus::Panic, "internal error"),
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, DsdStatus> {
    if p.is_null() {
        return Err(fail(DsdStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(DsdStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

fn solver_status(e: &Error) -> DsdStatus {
    match e {
        Error::NotWellDefined(_) => DsdStatus::NotWellDefined,
        _ => DsdStatus::Solver,
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn dsd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn dsd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse a problem file held in `text`.
#[no_mangle]
pub unsafe extern "C" fn dsd_network_parse(text: *const c_char, out: *mut *mut DsdNetwork) -> DsdStatus {
    guard(|| {
        if out.is_null() {
            return fail(DsdStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let text = match read_str(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_problem(text) {
            Ok(problem) => {
                *out = Box::into_raw(Box::new(DsdNetwork { problem }));
                DsdStatus::Ok
            }
            Err(e) => fail(DsdStatus::Parse, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn dsd_network_free(network: *mut DsdNetwork) {
    if !network.is_null() {
        drop(Box::from_raw(network));
    }
}

/// Validate a network. `findings` receives the number of violated
/// conditions and `report` one line per finding (an empty string when the
/// network is well-defined). Either output may be null.
#[no_mangle]
pub unsafe extern "C" fn dsd_network_check(
    network: *const DsdNetwork,
    joint: bool,
    findings: *mut usize,
    report: *mut *mut c_char,
) -> DsdStatus {
    guard(|| {
        let Some(net) = network.as_ref() else {
            return fail(DsdStatus::NullPointer, "network is null");
        };
        let r = net.problem.network.validate_with(ValidateOptions { joint_check: joint });
        if !findings.is_null() {
            *findings = r.findings().len();
        }
        if !report.is_null() {
            *report = to_c_string(r.to_string());
        }
        DsdStatus::Ok
    })
}

/// The `lambda` given in the problem file. Returns `NotFound` if absent.
#[no_mangle]
pub unsafe extern "C" fn dsd_network_lambda(network: *const DsdNetwork, out: *mut f64) -> DsdStatus {
    guard(|| {
        let (Some(net), false) = (network.as_ref(), out.is_null()) else {
            return fail(DsdStatus::NullPointer, "network or out is null");
        };
        match net.problem.lambda {
            Some(l) => {
                *out = l.value();
                DsdStatus::Ok
            }
            None => fail(DsdStatus::NotFound, "the problem file sets no lambda"),
        }
    })
}

/// Solve `network` with weighting factor `lambda` in [0, 1].
#[no_mangle]
pub unsafe extern "C" fn dsd_solve(network: *const DsdNetwork, lambda: f64, out: *mut *mut DsdSolveResult) -> DsdStatus {
    guard(|| {
        if out.is_null() {
            return fail(DsdStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let Some(net) = network.as_ref() else {
            return fail(DsdStatus::NullPointer, "network is null");
        };
        let lambda = match Lambda::new(lambda) {
            Ok(l) => l,
            Err(e) => return fail(DsdStatus::InvalidLambda, e.to_string()),
        };
        match solve(&net.problem.network, lambda) {
            Ok(result) => {
                *out = Box::into_raw(Box::new(DsdSolveResult {
                    vars: net.problem.network.variables().clone(),
                    result,
                }));
                DsdStatus::Ok
            }
            Err(e) => fail(solver_status(&e), e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn dsd_result_free(result: *mut DsdSolveResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

#[no_mangle]
pub unsafe extern "C" fn dsd_result_expected_value(result: *const DsdSolveResult, out: *mut f64) -> DsdStatus {
    guard(|| {
        let (Some(r), false) = (result.as_ref(), out.is_null()) else {
            return fail(DsdStatus::NullPointer, "result or out is null");
        };
        *out = r.result.expected_value;
        DsdStatus::Ok
    })
}

/// Optimal act of `decision` for a configuration of its solution table's
/// context, written as space-separated value labels in declaration order
/// (empty when the context is empty). The act label is returned in `act`.
#[no_mangle]
pub unsafe extern "C" fn dsd_result_psi(
    result: *const DsdSolveResult,
    decision: *const c_char,
    context: *const c_char,
    act: *mut *mut c_char,
) -> DsdStatus {
    guard(|| {
        let (Some(r), false) = (result.as_ref(), act.is_null()) else {
            return fail(DsdStatus::NullPointer, "result or act is null");
        };
        *act = ptr::null_mut();
        let (decision, context) = match (read_str(decision, "decision"), read_str(context, "context")) {
            (Ok(d), Ok(c)) => (d, c),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let Some(var) = r.vars.find(decision) else {
            return fail(DsdStatus::NotFound, format!("unknown variable '{decision}'"));
        };
        let Some(table) = r.result.solution(var) else {
            return fail(DsdStatus::NotFound, format!("no solution table for '{decision}'"));
        };
        let wanted: Vec<&str> = context.split_whitespace().collect();
        let found = table.iter().find(|&(x, _)| {
            let labels = r.vars.format_index(table.context(), x);
            if table.context().is_empty() {
                wanted.is_empty() || wanted == ["♦"]
            } else {
                labels.split(' ').eq(wanted.iter().copied())
            }
        });
        match found {
            Some((_, a)) => {
                *act = to_c_string(r.vars.get(var).frame()[a].clone());
                DsdStatus::Ok
            }
            None => fail(DsdStatus::NotFound, format!("no entry for '{context}' in the table of '{decision}'")),
        }
    })
}

/// The solve report as the command line prints it; `machine` selects the
/// tab-separated form.
#[no_mangle]
pub unsafe extern "C" fn dsd_result_report(result: *const DsdSolveResult, machine: bool, out: *mut *mut c_char) -> DsdStatus {
    guard(|| {
        let (Some(r), false) = (result.as_ref(), out.is_null()) else {
            return fail(DsdStatus::NullPointer, "result or out is null");
        };
        *out = to_c_string(report::render_solve(&r.vars, &r.result, machine));
        DsdStatus::Ok
    })
}

/// Release a string returned by the library.
#[no_mangle]
pub unsafe extern "C" fn dsd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
