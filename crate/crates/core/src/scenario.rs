//! Scenario configuration, preset experiments and the run driver.
//!
//! A scenario couples a geometry specification (axes, moments, or shape
//! ratios), a parameter schedule, an initial state, optional quadratic
//! resistivity, and integration settings. Config files are flat sectioned
//! TOML with exactly the keys below; unknown keys are rejected.
//!
//! ```toml
//! [geometry]       # exactly one form: axes | moments | ratios
//! r1 = -0.5
//! r2 = 0.25
//!
//! [schedule]       # mode: fixed-axes | ramp-I3 | ramp-r1
//! mode = "ramp-r1"
//! rate = 0.001
//!
//! [initial]
//! w1 = 0.01
//! w2 = 0.01
//! w3 = 0.1
//! i1 = 0.01
//! i2 = 0.01
//! i3 = 1.0
//!
//! [resistivity]    # optional, default eta2 = 0
//! eta2 = 0.0
//!
//! [integration]
//! t_end = 700.0
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::dynamics::{
    invariants, resistive_rhs, resistivity_growth_warning, DKState, InvariantSet, ParameterSchedule,
};
use crate::error::{Error, Result};
use crate::geometry::EllipsoidGeometry;
use crate::integrator::{integrate, IntegrationSettings, Method, Trajectory};
use crate::linalg::Vec3;
use crate::stability::{aligned_spectrum, AlignedStabilityReport};

pub const PRESET_NAMES: [&str; 3] = ["euler-flopl", "dk-dz3ln", "dk-dz5ln"];

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub a3: Option<f64>,
    #[serde(rename = "I1")]
    pub i1: Option<f64>,
    #[serde(rename = "I2")]
    pub i2: Option<f64>,
    #[serde(rename = "I3")]
    pub i3: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub mode: String,
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ResistivityConfig {
    #[serde(default)]
    pub eta2: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationConfig {
    pub t_end: f64,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub sample_dt: Option<f64>,
    pub method: Option<String>,
}

/// Raw, unvalidated scenario configuration (mirrors the file format).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub geometry: GeometryConfig,
    pub schedule: ScheduleConfig,
    pub initial: InitialConfig,
    #[serde(default)]
    pub resistivity: ResistivityConfig,
    pub integration: IntegrationConfig,
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<ScenarioConfig> {
        toml::from_str(s).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }
}

/// Which of the three geometry forms a config used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GeometryForm {
    Axes,
    Moments,
    Ratios,
}

fn config_err(field: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

/// A validated, runnable scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub schedule: ParameterSchedule,
    pub initial: DKState,
    pub eta2: f64,
    pub t_end: f64,
    pub settings: IntegrationSettings,
}

impl Scenario {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Scenario> {
        let g = &cfg.geometry;
        let axes_given = [g.a1, g.a2, g.a3];
        let moments_given = [g.i1, g.i2, g.i3];
        let ratios_given = [g.r1, g.r2];

        let form = match (
            axes_given.iter().any(Option::is_some),
            moments_given.iter().any(Option::is_some),
            ratios_given.iter().any(Option::is_some),
        ) {
            (true, false, false) => {
                if axes_given.iter().any(Option::is_none) {
                    return Err(config_err("geometry", "axes form needs all of a1, a2, a3"));
                }
                GeometryForm::Axes
            }
            (false, true, false) => {
                if moments_given.iter().any(Option::is_none) {
                    return Err(config_err(
                        "geometry",
                        "moments form needs all of I1, I2, I3",
                    ));
                }
                GeometryForm::Moments
            }
            (false, false, true) => {
                if ratios_given.iter().any(Option::is_none) {
                    return Err(config_err("geometry", "ratios form needs both r1 and r2"));
                }
                GeometryForm::Ratios
            }
            (false, false, false) => {
                return Err(config_err(
                    "geometry",
                    "one geometry form required: a1..a3, I1..I3, or r1, r2",
                ))
            }
            _ => {
                return Err(config_err(
                    "geometry",
                    "exactly one geometry form allowed: a1..a3, I1..I3, or r1, r2",
                ))
            }
        };

        let base_geometry = match form {
            GeometryForm::Axes => {
                EllipsoidGeometry::from_axes([g.a1.unwrap(), g.a2.unwrap(), g.a3.unwrap()])?
            }
            GeometryForm::Moments => {
                EllipsoidGeometry::from_moments([g.i1.unwrap(), g.i2.unwrap(), g.i3.unwrap()])?
            }
            GeometryForm::Ratios => EllipsoidGeometry::from_ratios(g.r1.unwrap(), g.r2.unwrap())?,
        };

        let schedule = match cfg.schedule.mode.as_str() {
            "fixed-axes" => {
                if cfg.schedule.rate.is_some() {
                    return Err(config_err(
                        "schedule.rate",
                        "not allowed for fixed-axes mode",
                    ));
                }
                ParameterSchedule::FixedAxes {
                    geometry: base_geometry,
                }
            }
            "ramp-I3" => {
                if form != GeometryForm::Moments {
                    return Err(config_err(
                        "schedule.mode",
                        "ramp-I3 requires the moments geometry form (I1..I3)",
                    ));
                }
                let rate = cfg
                    .schedule
                    .rate
                    .ok_or_else(|| config_err("schedule.rate", "required for ramp-I3"))?;
                ParameterSchedule::RampI3 {
                    i1: g.i1.unwrap(),
                    i2: g.i2.unwrap(),
                    i3_start: g.i3.unwrap(),
                    rate,
                }
            }
            "ramp-r1" => {
                if form != GeometryForm::Ratios {
                    return Err(config_err(
                        "schedule.mode",
                        "ramp-r1 requires the ratios geometry form (r1, r2)",
                    ));
                }
                let rate = cfg
                    .schedule
                    .rate
                    .ok_or_else(|| config_err("schedule.rate", "required for ramp-r1"))?;
                ParameterSchedule::RampR1 {
                    r1_start: g.r1.unwrap(),
                    rate,
                    r2_fixed: g.r2.unwrap(),
                }
            }
            other => {
                return Err(config_err(
                    "schedule.mode",
                    format!("unknown mode '{other}' (fixed-axes | ramp-I3 | ramp-r1)"),
                ))
            }
        };

        let ic = &cfg.integration;
        if !(ic.t_end > 0.0) {
            return Err(config_err("integration.t_end", "must be > 0"));
        }
        let defaults = IntegrationSettings::default();
        let method = match &ic.method {
            None => defaults.method,
            Some(name) => Method::parse(name).ok_or_else(|| {
                config_err(
                    "integration.method",
                    format!("unknown method '{name}' (adaptive-embedded-rk | fixed-rk4)"),
                )
            })?,
        };
        let settings = IntegrationSettings {
            rtol: ic.rtol.unwrap_or(defaults.rtol),
            atol: ic.atol.unwrap_or(defaults.atol),
            sample_dt: ic.sample_dt.unwrap_or(defaults.sample_dt),
            max_step: defaults.max_step,
            method,
        };
        settings
            .validate()
            .map_err(|e| config_err("integration", e.to_string()))?;

        let scenario = Scenario {
            schedule,
            initial: DKState::new(
                [cfg.initial.w1, cfg.initial.w2, cfg.initial.w3],
                [cfg.initial.i1, cfg.initial.i2, cfg.initial.i3],
            ),
            eta2: cfg.resistivity.eta2,
            t_end: ic.t_end,
            settings,
        };
        scenario
            .schedule
            .validate_window(scenario.t_end)
            .map_err(|e| config_err("schedule", e.to_string()))?;
        Ok(scenario)
    }

    pub fn from_toml_str(s: &str) -> Result<Scenario> {
        Scenario::from_config(&ScenarioConfig::from_toml_str(s)?)
    }

    pub fn from_file(path: &Path) -> Result<Scenario> {
        Scenario::from_config(&ScenarioConfig::from_file(path)?)
    }

    /// Built-in preset experiments.
    ///
    /// * `euler-flopl`: field-free spin about the 3-axis with a slow
    ///   decrease of `I3` through `I1`; the aligned rotation destabilises
    ///   shortly after the crossing.
    /// * `dk-dz3ln`: current-dominated state with `r1 = -0.5 + 0.001 t`,
    ///   `r2 = 0.25`; the `r1 = 0` boundary is crossed at `t = 500`.
    /// * `dk-dz5ln`: the same crossing a hundred times slower,
    ///   `r1 = -0.005 + 0.00001 t`.
    pub fn preset(name: &str) -> Result<Scenario> {
        let cfg = match name {
            "euler-flopl" => ScenarioConfig {
                geometry: GeometryConfig {
                    i1: Some(2.25),
                    i2: Some(1.25),
                    i3: Some(2.5),
                    ..Default::default()
                },
                schedule: ScheduleConfig {
                    mode: "ramp-I3".to_string(),
                    rate: Some(0.0005),
                },
                initial: InitialConfig {
                    w1: 0.01,
                    w2: 0.01,
                    w3: 1.0,
                    i1: 0.0,
                    i2: 0.0,
                    i3: 0.0,
                },
                resistivity: ResistivityConfig::default(),
                integration: IntegrationConfig {
                    t_end: 1000.0,
                    rtol: None,
                    atol: None,
                    sample_dt: None,
                    method: None,
                },
            },
            "dk-dz3ln" | "dk-dz5ln" => {
                let (r1, rate, t_end) = if name == "dk-dz3ln" {
                    (-0.5, 0.001, 700.0)
                } else {
                    (-0.005, 0.00001, 800.0)
                };
                ScenarioConfig {
                    geometry: GeometryConfig {
                        r1: Some(r1),
                        r2: Some(0.25),
                        ..Default::default()
                    },
                    schedule: ScheduleConfig {
                        mode: "ramp-r1".to_string(),
                        rate: Some(rate),
                    },
                    initial: InitialConfig {
                        w1: 0.01,
                        w2: 0.01,
                        w3: 0.1,
                        i1: 0.01,
                        i2: 0.01,
                        i3: 1.0,
                    },
                    resistivity: ResistivityConfig::default(),
                    integration: IntegrationConfig {
                        t_end,
                        rtol: None,
                        atol: None,
                        sample_dt: None,
                        method: None,
                    },
                }
            }
            other => return Err(Error::UnknownPreset(other.to_string())),
        };
        Scenario::from_config(&cfg)
    }
}

/// Parameters at one sample: shape ratios and moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSample {
    pub r: Vec3,
    pub moments: Vec3,
}

/// Sampled run: states, invariants and parameters on the output grid.
#[derive(Debug, Clone)]
pub struct DkTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DKState>,
    pub invariants: Vec<InvariantSet>,
    pub params: Vec<ParamSample>,
    inner: Trajectory<6>,
}

pub const COMPONENT_NAMES: [&str; 6] = ["w1", "w2", "w3", "i1", "i2", "i3"];

impl DkTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Earliest sign change of a state component (0..=2 vorticity, 3..=5
    /// current) after time `after`, refined on dense output.
    pub fn first_zero_crossing(&self, component: usize, after: f64) -> Option<f64> {
        self.inner.first_zero_crossing(component, after)
    }

    /// All sign changes of a component after `after`.
    pub fn zero_crossings(&self, component: usize, after: f64) -> Vec<f64> {
        self.inner.zero_crossings(component, after)
    }
}

/// A located sign change of one state component.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingEvent {
    pub component: &'static str,
    pub time: f64,
}

/// Maximum relative drift per invariant over the run (fixed-parameter
/// schedules only; invariants are not conserved under ramps).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftSummary {
    pub h0: f64,
    pub h1: f64,
    pub c0: f64,
    pub c: Option<Vec3>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    /// Present only for fixed-parameter runs.
    pub drift: Option<DriftSummary>,
    pub events: Vec<CrossingEvent>,
    pub stability_start: AlignedStabilityReport,
    pub stability_end: AlignedStabilityReport,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub trajectory: DkTrajectory,
    pub report: RunReport,
}

fn relative_drift(series: impl Iterator<Item = f64>, reference: f64) -> f64 {
    let scale = reference.abs().max(1e-300);
    series.fold(0.0f64, |m, v| m.max((v - reference).abs() / scale))
}

/// Integrate a scenario and assemble the report. The resistive term is
/// included exactly when `eta2 != 0`.
pub fn run_scenario(sc: &Scenario) -> Result<ScenarioRun> {
    sc.schedule.validate_window(sc.t_end)?;

    let schedule = sc.schedule;
    let eta2 = sc.eta2;
    let rhs = move |t: f64, y: &[f64; 6]| -> [f64; 6] {
        let g = schedule
            .eval(t)
            .expect("schedule validated over the run window");
        let s = DKState::from_array(y);
        resistive_rhs(&s, &g.ratios, &g.axes, eta2).to_array()
    };

    let inner = integrate(rhs, sc.initial.to_array(), (0.0, sc.t_end), &sc.settings)?;

    let mut states = Vec::with_capacity(inner.len());
    let mut invs = Vec::with_capacity(inner.len());
    let mut params = Vec::with_capacity(inner.len());
    for k in 0..inner.len() {
        let s = DKState::from_array(&inner.states[k]);
        let g = schedule.eval(inner.times[k])?;
        invs.push(invariants(&s, &g));
        params.push(ParamSample {
            r: g.ratios,
            moments: g.moments,
        });
        states.push(s);
    }

    let trajectory = DkTrajectory {
        times: inner.times.clone(),
        states,
        invariants: invs,
        params,
        inner,
    };

    let mut warnings = Vec::new();
    if resistivity_growth_warning(eta2) {
        warnings.push(format!(
            "eta2 = {eta2} > 0: quadratic resistivity increasing away from the origin \
             drives exponential growth of the squared current; decay requires eta2 < 0"
        ));
    }

    let drift = if schedule.is_fixed() {
        let first = &trajectory.invariants[0];
        let h0 = relative_drift(trajectory.invariants.iter().map(|i| i.h0), first.h0);
        let h1 = relative_drift(trajectory.invariants.iter().map(|i| i.h1), first.h1);
        let c0 = relative_drift(trajectory.invariants.iter().map(|i| i.c0), first.c0);
        let c = first.c.map(|c_first| {
            let mut out = [0.0; 3];
            for (k, out_k) in out.iter_mut().enumerate() {
                *out_k = relative_drift(
                    trajectory.invariants.iter().map(|i| i.c.unwrap()[k]),
                    c_first[k],
                );
            }
            out
        });
        Some(DriftSummary { h0, h1, c0, c })
    } else {
        None
    };

    let mut events = Vec::new();
    for (comp, name) in COMPONENT_NAMES.iter().enumerate() {
        for t in trajectory.zero_crossings(comp, 0.0) {
            events.push(CrossingEvent {
                component: name,
                time: t,
            });
        }
    }
    events.sort_by(|a, b| a.time.total_cmp(&b.time));

    let aligned_snapshot = |idx: usize| {
        let s = &trajectory.states[idx];
        let p = &trajectory.params[idx];
        aligned_spectrum(s.varpi[2], s.iota[2], p.r[0], p.r[1])
    };
    let stability_start = aligned_snapshot(0);
    let stability_end = aligned_snapshot(trajectory.len() - 1);

    Ok(ScenarioRun {
        trajectory,
        report: RunReport {
            drift,
            events,
            stability_start,
            stability_end,
            warnings,
        },
    })
}
