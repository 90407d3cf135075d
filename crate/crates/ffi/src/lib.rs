//! C ABI for the D-K toolkit: opaque handles, status codes, and flat-array
//! views of the core operations so other languages can bind.
//!
//! Conventions:
//! - Every fallible call returns a [`DkStatus`]; `Ok` is zero.
//! - On failure a thread-local message is set; read it with
//!   [`dkmhd_last_error_message`] (valid until the next failing call on the
//!   same thread).
//! - Objects created by `*_new_*` functions must be released with the
//!   matching `*_free`; `free(NULL)` is a no-op.
//! - Array parameters are fixed-size: states are `[w1, w2, w3, i1, i2, i3]`,
//!   ratio and axis triples are `[x1, x2, x3]`.

// `!(x > 0)` validation intentionally rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;

use dk_mhd::dynamics::{self, DKState};
use dk_mhd::geometry::EllipsoidGeometry;
use dk_mhd::scenario::{run_scenario, Scenario, ScenarioRun};
use dk_mhd::stability::{self, StabPolyVariant, StabilityClass};

/// Status code of every fallible FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DkStatus {
    Ok = 0,
    /// A pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Geometry or parameter outside its domain.
    Domain = 3,
    /// Scenario configuration rejected.
    Config = 4,
    /// Integration failed (stiffness, blow-up, divergence).
    Integration = 5,
    /// Filesystem failure.
    Io = 6,
    /// Index out of range.
    OutOfRange = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("error message had NUL").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn classify(err: &dk_mhd::Error) -> DkStatus {
    use dk_mhd::Error as E;
    match err {
        E::NonPositive { .. }
        | E::MomentPositivity { .. }
        | E::SingularConstraint { .. }
        | E::RatioOutOfRange { .. }
        | E::ScheduleDomain { .. } => DkStatus::Domain,
        E::Config { .. }
        | E::ConfigParse(_)
        | E::Settings(_)
        | E::UnknownPreset(_)
        | E::UnknownSuite(_)
        | E::CsvParse { .. } => DkStatus::Config,
        E::StepSizeUnderflow { .. } | E::StepBudgetExhausted { .. } | E::Divergence { .. } => {
            DkStatus::Integration
        }
        E::Io(_) => DkStatus::Io,
    }
}

fn fail(err: dk_mhd::Error) -> DkStatus {
    let status = classify(&err);
    set_error(err.to_string());
    status
}

/// Message of the most recent failure on this thread, or null when no call
/// has failed yet. The pointer stays valid until the next failing call on
/// the same thread.
#[no_mangle]
pub extern "C" fn dkmhd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |c| c.as_ptr())
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn dkmhd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

macro_rules! nonnull {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_error(format!("null pointer argument `{}`", stringify!($ptr)));
            return DkStatus::NullPointer;
        }
    };
}

// ---------------------------------------------------------------------
// geometry
// ---------------------------------------------------------------------

/// Opaque ellipsoid geometry handle.
pub struct DkGeometry(EllipsoidGeometry);

fn geometry_out(out: *mut *mut DkGeometry, result: dk_mhd::Result<EllipsoidGeometry>) -> DkStatus {
    match result {
        Ok(g) => {
            unsafe { *out = Box::into_raw(Box::new(DkGeometry(g))) };
            DkStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Geometry from semi-axes.
///
/// # Safety
/// `out` must be a valid pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_geometry_new_from_axes(
    a1: f64,
    a2: f64,
    a3: f64,
    out: *mut *mut DkGeometry,
) -> DkStatus {
    nonnull!(out);
    geometry_out(out, EllipsoidGeometry::from_axes([a1, a2, a3]))
}

/// Geometry from moments `I_i = a_j^2 + a_k^2`.
///
/// # Safety
/// `out` must be a valid pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_geometry_new_from_moments(
    i1: f64,
    i2: f64,
    i3: f64,
    out: *mut *mut DkGeometry,
) -> DkStatus {
    nonnull!(out);
    geometry_out(out, EllipsoidGeometry::from_moments([i1, i2, i3]))
}

/// Geometry from two shape ratios; the moment scale is pinned at `I1 = 1`.
///
/// # Safety
/// `out` must be a valid pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_geometry_new_from_ratios(
    r1: f64,
    r2: f64,
    out: *mut *mut DkGeometry,
) -> DkStatus {
    nonnull!(out);
    geometry_out(out, EllipsoidGeometry::from_ratios(r1, r2))
}

/// Release a geometry handle. Null is a no-op.
///
/// # Safety
/// `geometry` must be a handle from one of the constructors, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_geometry_free(geometry: *mut DkGeometry) {
    if !geometry.is_null() {
        drop(unsafe { Box::from_raw(geometry) });
    }
}

/// Copy the derived quantities out of a geometry. Any output pointer may be
/// null to skip that field; `axes`, `moments` and `ratios` receive three
/// values each.
///
/// # Safety
/// Non-null outputs must point to suitably sized writable memory.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_geometry_get(
    geometry: *const DkGeometry,
    axes: *mut f64,
    moments: *mut f64,
    ratios: *mut f64,
    sqrt_g: *mut f64,
) -> DkStatus {
    nonnull!(geometry);
    let g = unsafe { &(*geometry).0 };
    unsafe {
        if !axes.is_null() {
            std::ptr::copy_nonoverlapping(g.axes.as_ptr(), axes, 3);
        }
        if !moments.is_null() {
            std::ptr::copy_nonoverlapping(g.moments.as_ptr(), moments, 3);
        }
        if !ratios.is_null() {
            std::ptr::copy_nonoverlapping(g.ratios.as_ptr(), ratios, 3);
        }
        if !sqrt_g.is_null() {
            *sqrt_g = g.sqrt_g;
        }
    }
    DkStatus::Ok
}

/// Maximum deviation of the basis Lie-algebra structure constants and curl
/// relations for this geometry.
///
/// # Safety
/// `geometry` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_geometry_verify_algebra(
    geometry: *const DkGeometry,
    out: *mut f64,
) -> DkStatus {
    nonnull!(geometry);
    nonnull!(out);
    unsafe { *out = (*geometry).0.verify_algebra() };
    DkStatus::Ok
}

// ---------------------------------------------------------------------
// right-hand sides and invariants
// ---------------------------------------------------------------------

/// Ideal right-hand side; `state` and `out` are `[w1,w2,w3,i1,i2,i3]`,
/// `ratios` is `[r1,r2,r3]`.
///
/// # Safety
/// `state` and `ratios` must be readable for 6 and 3 doubles; `out`
/// writable for 6.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_ideal_rhs(
    state: *const f64,
    ratios: *const f64,
    out: *mut f64,
) -> DkStatus {
    nonnull!(state);
    nonnull!(ratios);
    nonnull!(out);
    let y: [f64; 6] = unsafe { std::slice::from_raw_parts(state, 6) }
        .try_into()
        .unwrap();
    let r: [f64; 3] = unsafe { std::slice::from_raw_parts(ratios, 3) }
        .try_into()
        .unwrap();
    let d = dynamics::ideal_rhs(&DKState::from_array(&y), &r).to_array();
    unsafe { std::ptr::copy_nonoverlapping(d.as_ptr(), out, 6) };
    DkStatus::Ok
}

/// Resistive right-hand side with quadratic resistivity coefficient `eta2`.
///
/// # Safety
/// `state`, `ratios`, `axes` readable for 6/3/3 doubles; `out` writable
/// for 6.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_resistive_rhs(
    state: *const f64,
    ratios: *const f64,
    axes: *const f64,
    eta2: f64,
    out: *mut f64,
) -> DkStatus {
    nonnull!(state);
    nonnull!(ratios);
    nonnull!(axes);
    nonnull!(out);
    let y: [f64; 6] = unsafe { std::slice::from_raw_parts(state, 6) }
        .try_into()
        .unwrap();
    let r: [f64; 3] = unsafe { std::slice::from_raw_parts(ratios, 3) }
        .try_into()
        .unwrap();
    let a: [f64; 3] = unsafe { std::slice::from_raw_parts(axes, 3) }
        .try_into()
        .unwrap();
    let d = dynamics::resistive_rhs(&DKState::from_array(&y), &r, &a, eta2).to_array();
    unsafe { std::ptr::copy_nonoverlapping(d.as_ptr(), out, 6) };
    DkStatus::Ok
}

/// Invariants of a state for a geometry. `has_clebsch` is false when any
/// shape ratio is degenerate, in which case `c` is zero-filled and
/// meaningless.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DkInvariants {
    pub h0: f64,
    pub h1: f64,
    pub c0: f64,
    pub has_clebsch: bool,
    pub c: [f64; 3],
}

fn invariants_to_c(inv: &dynamics::InvariantSet) -> DkInvariants {
    DkInvariants {
        h0: inv.h0,
        h1: inv.h1,
        c0: inv.c0,
        has_clebsch: inv.c.is_some(),
        c: inv.c.unwrap_or([0.0; 3]),
    }
}

/// Compute all invariants of a state.
///
/// # Safety
/// `state` readable for 6 doubles; `geometry` a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_invariants(
    state: *const f64,
    geometry: *const DkGeometry,
    out: *mut DkInvariants,
) -> DkStatus {
    nonnull!(state);
    nonnull!(geometry);
    nonnull!(out);
    let y: [f64; 6] = unsafe { std::slice::from_raw_parts(state, 6) }
        .try_into()
        .unwrap();
    let inv = dynamics::invariants(&DKState::from_array(&y), unsafe { &(*geometry).0 });
    unsafe { *out = invariants_to_c(&inv) };
    DkStatus::Ok
}

// ---------------------------------------------------------------------
// stability
// ---------------------------------------------------------------------

/// Classification of the aligned-equilibrium spectrum.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DkStabilityClass {
    StableOscillatory = 0,
    Marginal = 1,
    UnstableDirect = 2,
    UnstableOscillatory = 3,
}

impl From<StabilityClass> for DkStabilityClass {
    fn from(c: StabilityClass) -> Self {
        match c {
            StabilityClass::StableOscillatory => DkStabilityClass::StableOscillatory,
            StabilityClass::Marginal => DkStabilityClass::Marginal,
            StabilityClass::UnstableDirect => DkStabilityClass::UnstableDirect,
            StabilityClass::UnstableOscillatory => DkStabilityClass::UnstableOscillatory,
        }
    }
}

/// Aligned-equilibrium spectrum: quadratic coefficients, the two roots in
/// `x = s^2`, the four mode exponents, classification and the `r2`
/// threshold where the `beta` coefficient changes sign.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DkAlignedSpectrum {
    pub beta: f64,
    pub constant: f64,
    pub x_re: [f64; 2],
    pub x_im: [f64; 2],
    pub s_re: [f64; 4],
    pub s_im: [f64; 4],
    pub classification: DkStabilityClass,
    pub r2_threshold: f64,
}

/// Spectrum of the aligned configuration (`w3 = W`, `iota3 = J`). Set
/// `use_printed_constant` to replace the corrected constant term with the
/// compatibility variant.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_aligned_spectrum(
    w: f64,
    j: f64,
    r1: f64,
    r2: f64,
    use_printed_constant: bool,
    out: *mut DkAlignedSpectrum,
) -> DkStatus {
    nonnull!(out);
    let variant = if use_printed_constant {
        StabPolyVariant::Printed
    } else {
        StabPolyVariant::Corrected
    };
    let rep = stability::aligned_spectrum_with(w, j, r1, r2, variant);
    let mut c = DkAlignedSpectrum {
        beta: rep.beta,
        constant: rep.constant,
        x_re: [0.0; 2],
        x_im: [0.0; 2],
        s_re: [0.0; 4],
        s_im: [0.0; 4],
        classification: rep.classification.into(),
        r2_threshold: rep.r2_threshold,
    };
    for k in 0..2 {
        c.x_re[k] = rep.x_roots[k].re;
        c.x_im[k] = rep.x_roots[k].im;
    }
    for k in 0..4 {
        c.s_re[k] = rep.s_roots[k].re;
        c.s_im[k] = rep.s_roots[k].im;
    }
    unsafe { *out = c };
    DkStatus::Ok
}

// ---------------------------------------------------------------------
// scenarios and trajectories
// ---------------------------------------------------------------------

/// Opaque scenario handle.
pub struct DkScenario(Scenario);

/// Opaque completed-run handle (sampled trajectory plus report).
pub struct DkTrajectory(ScenarioRun);

fn cstr_arg<'a>(ptr: *const c_char) -> Result<&'a str, DkStatus> {
    if ptr.is_null() {
        set_error("null string argument".to_string());
        return Err(DkStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8".to_string());
        DkStatus::InvalidUtf8
    })
}

fn scenario_out(out: *mut *mut DkScenario, result: dk_mhd::Result<Scenario>) -> DkStatus {
    match result {
        Ok(s) => {
            unsafe { *out = Box::into_raw(Box::new(DkScenario(s))) };
            DkStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Built-in preset scenario: `euler-flopl`, `dk-dz3ln` or `dk-dz5ln`.
///
/// # Safety
/// `name` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_scenario_new_preset(
    name: *const c_char,
    out: *mut *mut DkScenario,
) -> DkStatus {
    nonnull!(out);
    let name = match cstr_arg(name) {
        Ok(s) => s,
        Err(status) => return status,
    };
    scenario_out(out, Scenario::preset(name))
}

/// Scenario from a TOML config file on disk.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_scenario_new_from_file(
    path: *const c_char,
    out: *mut *mut DkScenario,
) -> DkStatus {
    nonnull!(out);
    let path = match cstr_arg(path) {
        Ok(s) => s,
        Err(status) => return status,
    };
    scenario_out(out, Scenario::from_file(Path::new(path)))
}

/// Scenario from TOML config text.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_scenario_new_from_toml(
    text: *const c_char,
    out: *mut *mut DkScenario,
) -> DkStatus {
    nonnull!(out);
    let text = match cstr_arg(text) {
        Ok(s) => s,
        Err(status) => return status,
    };
    scenario_out(out, Scenario::from_toml_str(text))
}

/// Override integration tolerances of a scenario.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_scenario_set_tolerances(
    scenario: *mut DkScenario,
    rtol: f64,
    atol: f64,
) -> DkStatus {
    nonnull!(scenario);
    let sc = unsafe { &mut (*scenario).0 };
    sc.settings.rtol = rtol;
    sc.settings.atol = atol;
    match sc.settings.validate() {
        Ok(()) => DkStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Override the final time and sample spacing of a scenario.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_scenario_set_window(
    scenario: *mut DkScenario,
    t_end: f64,
    sample_dt: f64,
) -> DkStatus {
    nonnull!(scenario);
    let sc = unsafe { &mut (*scenario).0 };
    if !(t_end > 0.0) {
        set_error(format!("t_end = {t_end} must be > 0"));
        return DkStatus::Config;
    }
    sc.t_end = t_end;
    sc.settings.sample_dt = sample_dt;
    if let Err(e) = sc.settings.validate() {
        return fail(e);
    }
    match sc.schedule.validate_window(t_end) {
        Ok(()) => DkStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Release a scenario handle. Null is a no-op.
///
/// # Safety
/// `scenario` must come from a scenario constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_scenario_free(scenario: *mut DkScenario) {
    if !scenario.is_null() {
        drop(unsafe { Box::from_raw(scenario) });
    }
}

/// Integrate a scenario into a trajectory handle.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_scenario_run(
    scenario: *const DkScenario,
    out: *mut *mut DkTrajectory,
) -> DkStatus {
    nonnull!(scenario);
    nonnull!(out);
    match run_scenario(unsafe { &(*scenario).0 }) {
        Ok(run) => {
            unsafe { *out = Box::into_raw(Box::new(DkTrajectory(run))) };
            DkStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Number of samples in a trajectory; zero for a null handle.
///
/// # Safety
/// `trajectory` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_trajectory_len(trajectory: *const DkTrajectory) -> usize {
    if trajectory.is_null() {
        return 0;
    }
    unsafe { &(*trajectory).0 }.trajectory.len()
}

/// Borrow the sample-time array (length [`dkmhd_trajectory_len`]); valid
/// while the handle lives.
///
/// # Safety
/// `trajectory` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_trajectory_times(trajectory: *const DkTrajectory) -> *const f64 {
    if trajectory.is_null() {
        return std::ptr::null();
    }
    unsafe { &(*trajectory).0 }.trajectory.times.as_ptr()
}

/// Copy sample `index` into `state` (`[w1,w2,w3,i1,i2,i3]`).
///
/// # Safety
/// `trajectory` live; `state` writable for 6 doubles.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_trajectory_state(
    trajectory: *const DkTrajectory,
    index: usize,
    state: *mut f64,
) -> DkStatus {
    nonnull!(trajectory);
    nonnull!(state);
    let traj = &unsafe { &(*trajectory).0 }.trajectory;
    if index >= traj.len() {
        set_error(format!(
            "index {index} out of range ({} samples)",
            traj.len()
        ));
        return DkStatus::OutOfRange;
    }
    let y = traj.states[index].to_array();
    unsafe { std::ptr::copy_nonoverlapping(y.as_ptr(), state, 6) };
    DkStatus::Ok
}

/// Invariants at sample `index`.
///
/// # Safety
/// `trajectory` live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_trajectory_invariants(
    trajectory: *const DkTrajectory,
    index: usize,
    out: *mut DkInvariants,
) -> DkStatus {
    nonnull!(trajectory);
    nonnull!(out);
    let traj = &unsafe { &(*trajectory).0 }.trajectory;
    if index >= traj.len() {
        set_error(format!(
            "index {index} out of range ({} samples)",
            traj.len()
        ));
        return DkStatus::OutOfRange;
    }
    unsafe { *out = invariants_to_c(&traj.invariants[index]) };
    DkStatus::Ok
}

/// Shape ratios at sample `index`.
///
/// # Safety
/// `trajectory` live; `ratios` writable for 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_trajectory_ratios(
    trajectory: *const DkTrajectory,
    index: usize,
    ratios: *mut f64,
) -> DkStatus {
    nonnull!(trajectory);
    nonnull!(ratios);
    let traj = &unsafe { &(*trajectory).0 }.trajectory;
    if index >= traj.len() {
        set_error(format!(
            "index {index} out of range ({} samples)",
            traj.len()
        ));
        return DkStatus::OutOfRange;
    }
    unsafe { std::ptr::copy_nonoverlapping(traj.params[index].r.as_ptr(), ratios, 3) };
    DkStatus::Ok
}

/// Earliest sign change of state component `component` (0..=5, vorticity
/// then current) after time `after`. `*found` is set to whether a crossing
/// exists; `*t_star` holds the refined time only when it does.
///
/// # Safety
/// `trajectory` live; `t_star` and `found` valid.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_trajectory_first_zero_crossing(
    trajectory: *const DkTrajectory,
    component: usize,
    after: f64,
    t_star: *mut f64,
    found: *mut bool,
) -> DkStatus {
    nonnull!(trajectory);
    nonnull!(t_star);
    nonnull!(found);
    if component >= 6 {
        set_error(format!("component {component} out of range (0..=5)"));
        return DkStatus::OutOfRange;
    }
    let traj = &unsafe { &(*trajectory).0 }.trajectory;
    match traj.first_zero_crossing(component, after) {
        Some(t) => unsafe {
            *t_star = t;
            *found = true;
        },
        None => unsafe {
            *found = false;
        },
    }
    DkStatus::Ok
}

/// Write the trajectory as CSV
/// (`t,w1,w2,w3,i1,i2,i3,H0,H1,C0,C1,C2,C3,r1,r2,r3`).
///
/// # Safety
/// `trajectory` live; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_trajectory_write_csv(
    trajectory: *const DkTrajectory,
    path: *const c_char,
) -> DkStatus {
    nonnull!(trajectory);
    let path = match cstr_arg(path) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let run = unsafe { &(*trajectory).0 };
    match dk_mhd::output::write_csv_file(Path::new(path), &run.trajectory) {
        Ok(()) => DkStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Number of warnings attached to the run report (resistive growth and the
/// like); zero for a null handle.
///
/// # Safety
/// `trajectory` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_trajectory_warning_count(trajectory: *const DkTrajectory) -> usize {
    if trajectory.is_null() {
        return 0;
    }
    unsafe { &(*trajectory).0 }.report.warnings.len()
}

/// Release a trajectory handle. Null is a no-op.
///
/// # Safety
/// `trajectory` must come from [`dkmhd_scenario_run`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dkmhd_trajectory_free(trajectory: *mut DkTrajectory) {
    if !trajectory.is_null() {
        drop(unsafe { Box::from_raw(trajectory) });
    }
}
