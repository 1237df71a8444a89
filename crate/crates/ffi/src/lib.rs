//! C ABI for forkdelta.
//!
//! Every fallible function returns an [`FdStatus`]; on failure a message is
//! available from [`fd_last_error_message`] on the same thread. Strings
//! returned through out-parameters are owned by the caller and released with
//! [`fd_string_free`]; handles are released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use forkdelta::analysis::{analyze_scenario, write_scenario, AnalysisOptions, ScenarioOutcome};
use forkdelta::changes::{build_change_set, ChangeKind, ChangeSet, DetectorConfig, Direction};
use forkdelta::corpus::ScenarioConfig;
use forkdelta::feasibility::{render_grid, verdict, FeasibilityVerdict};
use forkdelta::report::{render_scenario, ReportFormat};
use forkdelta::srcmodel::{build_inventory, InventoryOptions, MethodInventory, VersionLabel};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Config = 4,
    Io = 5,
    Analysis = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdVerdict {
    Green = 0,
    Yellow = 1,
    Red = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdVersion {
    Ao = 0,
    An = 1,
    Cm = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdDirection {
    AoToAn = 0,
    AoToCm = 1,
}

/// Method inventory of one source tree.
pub struct FdInventory(MethodInventory);

/// Change set of one direction.
pub struct FdChangeSet(ChangeSet);

/// Result of analyzing one scenario.
pub struct FdScenario(ScenarioOutcome);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(FdStatus, String);

type FdResult<T> = Result<T, Failure>;

fn fail<T>(status: FdStatus, msg: impl ToString) -> FdResult<T> {
    Err(Failure(status, msg.to_string()))
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> FdResult<()>) -> FdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FdStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FdStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FdResult<&'a str> {
    if p.is_null() {
        return fail(FdStatus::NullArgument, format!("{name} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(FdStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> FdResult<&'a T> {
    p.as_ref().map_or_else(
        || fail(FdStatus::NullArgument, format!("{name} is null")),
        Ok,
    )
}

unsafe fn put<T>(out: *mut T, value: T) -> FdResult<()> {
    if out.is_null() {
        return fail(FdStatus::NullArgument, "output pointer is null");
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> FdResult<()> {
    let c = CString::new(s).or_else(|_| fail(FdStatus::Analysis, "string contains NUL"))?;
    put(out, c.into_raw())
}

fn label(v: c_int) -> FdResult<VersionLabel> {
    match v {
        x if x == FdVersion::Ao as c_int => Ok(VersionLabel::Ao),
        x if x == FdVersion::An as c_int => Ok(VersionLabel::An),
        x if x == FdVersion::Cm as c_int => Ok(VersionLabel::Cm),
        other => fail(
            FdStatus::InvalidArgument,
            format!("unknown version {other}"),
        ),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread; empty after a success.
/// Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn fd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn fd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Feasibility verdict for an upstream and a variant change kind, given by label
/// (for example `"Method Rename"`).
///
/// # Safety
/// Strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_verdict(
    an_kind: *const c_char,
    cm_kind: *const c_char,
    out: *mut FdVerdict,
) -> FdStatus {
    guard(|| {
        let parse = |s: &str| {
            s.parse::<ChangeKind>()
                .or_else(|e| fail(FdStatus::InvalidArgument, e))
        };
        let an = parse(str_arg(an_kind, "an_kind")?)?;
        let cm = parse(str_arg(cm_kind, "cm_kind")?)?;
        let v = verdict(an, cm).or_else(|e| fail(FdStatus::InvalidArgument, e))?;
        put(
            out,
            match v {
                FeasibilityVerdict::Auto => FdVerdict::Green,
                FeasibilityVerdict::Conditional => FdVerdict::Yellow,
                FeasibilityVerdict::Manual => FdVerdict::Red,
            },
        )
    })
}

/// The feasibility matrix as comma-separated text with a tally footer.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_matrix_grid(out: *mut *mut c_char) -> FdStatus {
    guard(|| put_string(out, render_grid()))
}

/// Inventory of every source file with extension `ext` (for example `".java"`)
/// below `root`; `version` is an [`FdVersion`].
///
/// # Safety
/// Strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_inventory_from_dir(
    root: *const c_char,
    ext: *const c_char,
    version: c_int,
    out: *mut *mut FdInventory,
) -> FdStatus {
    guard(|| {
        let root = str_arg(root, "root")?;
        let opts = InventoryOptions {
            extension: str_arg(ext, "ext")?.to_string(),
            nested_marker: None,
        };
        let inv = build_inventory(Path::new(root), label(version)?, &opts)
            .or_else(|e| fail(FdStatus::Io, e))?;
        put(out, Box::into_raw(Box::new(FdInventory(inv))))
    })
}

/// Inventory of a single in-memory source file.
///
/// # Safety
/// Strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_inventory_from_source(
    path: *const c_char,
    text: *const c_char,
    version: c_int,
    out: *mut *mut FdInventory,
) -> FdStatus {
    guard(|| {
        let inv = MethodInventory::from_sources(
            label(version)?,
            [(str_arg(path, "path")?, str_arg(text, "text")?)],
        );
        put(out, Box::into_raw(Box::new(FdInventory(inv))))
    })
}

/// Number of uniquely keyed methods; 0 for null.
///
/// # Safety
/// `inv` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fd_inventory_len(inv: *const FdInventory) -> usize {
    inv.as_ref().map_or(0, |i| i.0.len())
}

/// Number of files skipped while building the inventory; 0 for null.
///
/// # Safety
/// `inv` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fd_inventory_skipped(inv: *const FdInventory) -> usize {
    inv.as_ref().map_or(0, |i| i.0.issues.len())
}

/// # Safety
/// `inv` must come from this library or be null, and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn fd_inventory_free(inv: *mut FdInventory) {
    if !inv.is_null() {
        drop(Box::from_raw(inv));
    }
}

/// Classify every method of `ao` against `derived` (`direction` is an [`FdDirection`]). Thresholds must lie in (0, 1].
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_changeset_build(
    ao: *const FdInventory,
    derived: *const FdInventory,
    direction: c_int,
    sim_threshold: f64,
    inline_threshold: f64,
    out: *mut *mut FdChangeSet,
) -> FdStatus {
    guard(|| {
        let ao = ref_arg(ao, "ao")?;
        let d = ref_arg(derived, "derived")?;
        for (name, v) in [
            ("sim_threshold", sim_threshold),
            ("inline_threshold", inline_threshold),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return fail(
                    FdStatus::InvalidArgument,
                    format!("{name} must be in (0, 1], got {v}"),
                );
            }
        }
        let dir = match direction {
            x if x == FdDirection::AoToAn as c_int => Direction::AoToAn,
            x if x == FdDirection::AoToCm as c_int => Direction::AoToCm,
            other => {
                return fail(
                    FdStatus::InvalidArgument,
                    format!("unknown direction {other}"),
                )
            }
        };
        let cfg = DetectorConfig {
            sim_threshold,
            inline_threshold,
            refactorings: true,
        };
        put(
            out,
            Box::into_raw(Box::new(FdChangeSet(build_change_set(
                &ao.0, &d.0, dir, &cfg,
            )))),
        )
    })
}

/// Per-kind counts in table order (Identical first, Unmatched last) written to `counts[0..12]`.
///
/// # Safety
/// `cs` must be live; `counts` must hold 12 values.
#[no_mangle]
pub unsafe extern "C" fn fd_changeset_kind_counts(
    cs: *const FdChangeSet,
    counts: *mut u64,
) -> FdStatus {
    guard(|| {
        let cs = ref_arg(cs, "cs")?;
        if counts.is_null() {
            return fail(FdStatus::NullArgument, "counts is null");
        }
        for (i, n) in cs.0.kind_counts().into_iter().enumerate() {
            counts.add(i).write(n);
        }
        Ok(())
    })
}

/// JSON document of the change set.
///
/// # Safety
/// `cs` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_changeset_to_json(
    cs: *const FdChangeSet,
    out: *mut *mut c_char,
) -> FdStatus {
    guard(|| {
        let cs = ref_arg(cs, "cs")?;
        let json = serde_json::to_string_pretty(&cs.0).or_else(|e| fail(FdStatus::Analysis, e))?;
        put_string(out, json)
    })
}

/// # Safety
/// `cs` must come from this library or be null, and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn fd_changeset_free(cs: *mut FdChangeSet) {
    if !cs.is_null() {
        drop(Box::from_raw(cs));
    }
}

/// Analyze the scenario described by a config file on `jobs` threads (0 means 1).
///
/// # Safety
/// `config_path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_scenario_analyze(
    config_path: *const c_char,
    refine_yellow: bool,
    jobs: usize,
    out: *mut *mut FdScenario,
) -> FdStatus {
    guard(|| {
        let path = str_arg(config_path, "config_path")?;
        let cfg = ScenarioConfig::load(Path::new(path)).or_else(|e| fail(FdStatus::Config, e))?;
        let opts = AnalysisOptions {
            refine_yellow,
            jobs: jobs.max(1),
        };
        let outcome = analyze_scenario(&cfg, &opts).or_else(|e| fail(FdStatus::Analysis, e))?;
        put(out, Box::into_raw(Box::new(FdScenario(outcome))))
    })
}

/// 1 when files or subsystems were skipped, 0 otherwise, -1 for null.
///
/// # Safety
/// `sc` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn fd_scenario_is_partial(sc: *const FdScenario) -> c_int {
    sc.as_ref().map_or(-1, |s| s.0.is_partial() as c_int)
}

/// Render the scenario report as `report`, `grid` or `text`.
///
/// # Safety
/// `sc` must be live; `format` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fd_scenario_render(
    sc: *const FdScenario,
    format: *const c_char,
    out: *mut *mut c_char,
) -> FdStatus {
    guard(|| {
        let sc = ref_arg(sc, "sc")?;
        let fmt: ReportFormat = str_arg(format, "format")?
            .parse()
            .or_else(|e| fail(FdStatus::InvalidArgument, e))?;
        put_string(out, render_scenario(&sc.0.report, fmt))
    })
}

/// Write every report file of the scenario below `out_dir`, as the command line does.
///
/// # Safety
/// `sc` must be live; `out_dir` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn fd_scenario_write(
    sc: *const FdScenario,
    out_dir: *const c_char,
) -> FdStatus {
    guard(|| {
        let sc = ref_arg(sc, "sc")?;
        let dir = str_arg(out_dir, "out_dir")?;
        let fmts = [ReportFormat::Report, ReportFormat::Grid, ReportFormat::Text];
        write_scenario(&sc.0, Path::new(dir), &fmts)
            .map(|_| ())
            .or_else(|e| fail(FdStatus::Io, e))
    })
}

/// # Safety
/// `sc` must come from this library or be null, and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn fd_scenario_free(sc: *mut FdScenario) {
    if !sc.is_null() {
        drop(Box::from_raw(sc));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn null_arguments_are_reported() {
        let mut v = FdVerdict::Red;
        let s = unsafe { fd_verdict(ptr::null(), c"Body-only".as_ptr(), &mut v) };
        assert_eq!(s, FdStatus::NullArgument);
        let msg = unsafe { CStr::from_ptr(fd_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "an_kind is null");
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(fd_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
