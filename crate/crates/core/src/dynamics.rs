//! The six-variable Dolzhansky-Kirchhoff state, its ideal and resistive
//! right-hand sides, time-varying parameter schedules, and the invariants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{EllipsoidGeometry, DEGENERATE_RATIO_EPS};
use crate::linalg::{Vec3, ZERO_VEC3};

/// Vorticity-like and current-like coefficient vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DKState {
    pub varpi: Vec3,
    pub iota: Vec3,
}

impl DKState {
    pub fn new(varpi: Vec3, iota: Vec3) -> Self {
        DKState { varpi, iota }
    }

    pub fn zero() -> Self {
        DKState {
            varpi: ZERO_VEC3,
            iota: ZERO_VEC3,
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.varpi[0],
            self.varpi[1],
            self.varpi[2],
            self.iota[0],
            self.iota[1],
            self.iota[2],
        ]
    }

    pub fn from_array(y: &[f64; 6]) -> Self {
        DKState {
            varpi: [y[0], y[1], y[2]],
            iota: [y[3], y[4], y[5]],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

/// Conserved quantities of the ideal system: Hamiltonian `H0`,
/// cross-helicity `H1`, Casimir `C0`, and (when no shape ratio is
/// degenerate) the three Clebsch integrals `C_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantSet {
    pub h0: f64,
    pub h1: f64,
    pub c0: f64,
    /// Absent when any `|r_i|` is below [`DEGENERATE_RATIO_EPS`], since the
    /// Clebsch integrals divide by the ratios.
    pub c: Option<Vec3>,
}

/// Ideal right-hand side:
/// `d(varpi_1)/dt = r_1 (varpi_2 varpi_3 - iota_2 iota_3)` and cyclic;
/// `d(iota_1)/dt = varpi_2 iota_3 - varpi_3 iota_2` and cyclic.
pub fn ideal_rhs(s: &DKState, r: &Vec3) -> DKState {
    let w = &s.varpi;
    let i = &s.iota;
    DKState {
        varpi: [
            r[0] * (w[1] * w[2] - i[1] * i[2]),
            r[1] * (w[0] * w[2] - i[0] * i[2]),
            r[2] * (w[0] * w[1] - i[0] * i[1]),
        ],
        iota: [
            w[1] * i[2] - w[2] * i[1],
            w[2] * i[0] - w[0] * i[2],
            w[0] * i[1] - w[1] * i[0],
        ],
    }
}

/// Resistive right-hand side: the ideal terms plus
/// `eta2 (1/a_j^2 + 1/a_k^2) iota_i` added to each current equation, the
/// sign exactly as it enters the quadratic-resistivity model. Decay of the
/// squared current therefore requires `eta2 < 0`; a positive `eta2` drives
/// exponential growth (see [`resistivity_growth_warning`]).
pub fn resistive_rhs(s: &DKState, r: &Vec3, axes: &Vec3, eta2: f64) -> DKState {
    let mut out = ideal_rhs(s, r);
    if eta2 != 0.0 {
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let coeff = 1.0 / (axes[j] * axes[j]) + 1.0 / (axes[k] * axes[k]);
            out.iota[i] += eta2 * coeff * s.iota[i];
        }
    }
    out
}

/// True when the resistive coefficient implies exponential growth of the
/// squared current (resistivity not maximal at the origin).
pub fn resistivity_growth_warning(eta2: f64) -> bool {
    eta2 > 0.0
}

/// All invariants at a state for a given geometry. The Clebsch vector is
/// reported as absent (not NaN, not zero) for degenerate geometries.
pub fn invariants(s: &DKState, g: &EllipsoidGeometry) -> InvariantSet {
    let w = &s.varpi;
    let i = &s.iota;
    let m = &g.moments;
    let r = &g.ratios;

    let mut h0 = 0.0;
    let mut h1 = 0.0;
    let mut c0 = 0.0;
    for k in 0..3 {
        h0 += m[k] * (w[k] * w[k] + i[k] * i[k]);
        h1 += m[k] * w[k] * i[k];
        c0 += i[k] * i[k];
    }

    let degenerate = r.iter().any(|x| x.abs() < DEGENERATE_RATIO_EPS);
    let c = if degenerate {
        None
    } else {
        let w1r = w[0] * w[0] / r[0];
        let w2r = w[1] * w[1] / r[1];
        let w3r = w[2] * w[2] / r[2];
        Some([
            i[0] * i[0] + w2r - w3r,
            i[1] * i[1] - w1r + w3r,
            i[2] * i[2] + w1r - w2r,
        ])
    };

    InvariantSet { h0, h1, c0, c }
}

/// Time dependence of the ellipsoid parameters during a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParameterSchedule {
    /// Parameters fixed at the given geometry for all time.
    FixedAxes { geometry: EllipsoidGeometry },
    /// `I3(t) = I3(0) - rate * t` with `I1`, `I2` fixed; axes and ratios
    /// derived at each instant.
    RampI3 {
        i1: f64,
        i2: f64,
        i3_start: f64,
        rate: f64,
    },
    /// `r1(t) = r1(0) + rate * t` with `r2` fixed and `r3` from the
    /// constraint; the moment scale is pinned at `I1 = 1`.
    RampR1 {
        r1_start: f64,
        rate: f64,
        r2_fixed: f64,
    },
}

impl ParameterSchedule {
    /// Geometry at time `t`. Errors when the schedule has left its validity
    /// window (axis positivity for moment ramps, `|r1| < 1` for ratio
    /// ramps).
    pub fn eval(&self, t: f64) -> Result<EllipsoidGeometry> {
        match *self {
            ParameterSchedule::FixedAxes { geometry } => Ok(geometry),
            ParameterSchedule::RampI3 {
                i1,
                i2,
                i3_start,
                rate,
            } => {
                let i3 = i3_start - rate * t;
                EllipsoidGeometry::from_moments([i1, i2, i3]).map_err(|e| Error::ScheduleDomain {
                    t,
                    reason: format!("I3 ramp reached I3 = {i3}: {e}"),
                })
            }
            ParameterSchedule::RampR1 {
                r1_start,
                rate,
                r2_fixed,
            } => {
                let r1 = r1_start + rate * t;
                EllipsoidGeometry::from_ratios(r1, r2_fixed).map_err(|e| Error::ScheduleDomain {
                    t,
                    reason: format!("r1 ramp reached r1 = {r1}: {e}"),
                })
            }
        }
    }

    /// Whether parameters are constant in time (invariant drift is only
    /// meaningful then).
    pub fn is_fixed(&self) -> bool {
        matches!(self, ParameterSchedule::FixedAxes { .. })
    }

    /// Validate the schedule over `[0, t_end]`. All scheduled quantities
    /// vary monotonically, so checking both endpoints covers the window.
    pub fn validate_window(&self, t_end: f64) -> Result<()> {
        self.eval(0.0)?;
        self.eval(t_end)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::r3_from;
    use crate::linalg::{mat_sub, skew_from_vector, vector_from_skew};
    use crate::taylor::bracket_linear;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dz_ratios() -> Vec3 {
        [-0.5, 0.25, r3_from(-0.5, 0.25).unwrap()]
    }

    #[test]
    fn aligned_state_is_equilibrium() {
        let s = DKState::new([0.0, 0.0, 1.0], ZERO_VEC3);
        let d = ideal_rhs(&s, &dz_ratios());
        assert_eq!(d, DKState::zero());
    }

    #[test]
    fn alfvenic_states_are_equilibria() {
        // iota = c * varpi with c = +-1; nonunit |c| leaves the current
        // equation stationary but not the vorticity equation.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let w = [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ];
            for c in [1.0, -1.0] {
                let s = DKState::new(w, crate::linalg::vec_scale(c, &w));
                let d = ideal_rhs(&s, &dz_ratios());
                assert!(d.to_array().iter().all(|x| x.abs() < 1e-15));
            }
        }
        // single-axis aligned states with any iota scale along the same axis
        for axis in 0..3 {
            let mut w = ZERO_VEC3;
            let mut i = ZERO_VEC3;
            w[axis] = 0.7;
            i[axis] = -2.0;
            let d = ideal_rhs(&DKState::new(w, i), &dz_ratios());
            assert_eq!(d, DKState::zero());
        }
    }

    #[test]
    fn ideal_rhs_reference_values() {
        let r = [-0.5, 0.25, 2.0 / 7.0];
        let s = DKState::new([1.0, 2.0, 3.0], [0.5, -1.0, 2.0]);
        let d = ideal_rhs(&s, &r);
        assert_relative_eq!(d.varpi[0], -4.0, max_relative = 1e-15);
        assert_relative_eq!(d.varpi[1], 0.5, max_relative = 1e-15);
        assert_relative_eq!(d.varpi[2], 2.5 * 2.0 / 7.0, max_relative = 1e-15);
        assert_relative_eq!(d.iota[0], 7.0, max_relative = 1e-15);
        assert_relative_eq!(d.iota[1], -0.5, max_relative = 1e-15);
        assert_relative_eq!(d.iota[2], -2.0, max_relative = 1e-15);
    }

    #[test]
    fn time_reversal_symmetry() {
        // the right-hand side is homogeneous quadratic, so it is invariant
        // under (varpi, iota) -> (-varpi, -iota); that is precisely the
        // time-reversal property: -y(-t) solves the system whenever y(t)
        // does
        let r = dz_ratios();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let s = DKState::new(
                [
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ],
                [
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ],
            );
            let flipped = DKState::new(
                crate::linalg::vec_scale(-1.0, &s.varpi),
                crate::linalg::vec_scale(-1.0, &s.iota),
            );
            let d = ideal_rhs(&s, &r).to_array();
            let df = ideal_rhs(&flipped, &r).to_array();
            for k in 0..6 {
                assert_relative_eq!(df[k], d[k], max_relative = 1e-15, epsilon = 1e-300);
            }
        }
    }

    #[test]
    fn current_equation_matches_skew_commutator() {
        // the current equation is the commutator of the rotation-generator
        // skew matrices, mapped back to a vector
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let w = [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ];
            let i = [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ];
            let d = ideal_rhs(&DKState::new(w, i), &dz_ratios());
            let comm = bracket_linear(&skew_from_vector(&w), &skew_from_vector(&i));
            let mapped = vector_from_skew(&comm);
            for k in 0..3 {
                assert_relative_eq!(d.iota[k], mapped[k], epsilon = 1e-12);
            }
            // and the commutator of skews is itself skew
            let resym = mat_sub(&comm, &skew_from_vector(&mapped));
            assert!(crate::linalg::mat_max_abs(&resym) < 1e-12);
        }
    }

    #[test]
    fn resistive_zero_eta_is_ideal() {
        let s = DKState::new([0.3, -0.6, 0.9], [1.0, 0.5, -0.25]);
        let r = dz_ratios();
        let ideal = ideal_rhs(&s, &r);
        let resistive = resistive_rhs(&s, &r, &[1.0, 1.2, 0.8], 0.0);
        assert_eq!(ideal, resistive);
    }

    #[test]
    fn resistive_sphere_reference() {
        let s = DKState::new(ZERO_VEC3, [1.0, 2.0, 3.0]);
        let d = resistive_rhs(&s, &[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0], -0.5);
        assert_eq!(d.iota, [-1.0, -2.0, -3.0]);
        assert_eq!(d.varpi, ZERO_VEC3);
    }

    #[test]
    fn resistive_anisotropic_reference() {
        let axes = [0.75f64.sqrt(), 1.75f64.sqrt(), 0.5f64.sqrt()];
        let s = DKState::new(ZERO_VEC3, [1.0, 0.0, 0.0]);
        let g = EllipsoidGeometry::from_axes(axes).unwrap();
        let d = resistive_rhs(&s, &g.ratios, &axes, -0.1);
        assert_relative_eq!(
            d.iota[0],
            -0.1 * (1.0 / 1.75 + 1.0 / 0.5),
            max_relative = 1e-12
        );
        assert_relative_eq!(d.iota[0], -0.257143, max_relative = 1e-5);
    }

    #[test]
    fn casimir_decay_closed_form() {
        // d(C0)/dt from the resistive rhs equals 2 eta2 sum_i kappa_i iota_i^2
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..50 {
            let axes = [
                rng.random_range(0.5..2.0),
                rng.random_range(0.5..2.0),
                rng.random_range(0.5..2.0),
            ];
            let g = EllipsoidGeometry::from_axes(axes).unwrap();
            let s = DKState::new(
                [
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ],
                [
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ],
            );
            let eta2 = rng.random_range(-0.5..0.5);
            let d = resistive_rhs(&s, &g.ratios, &axes, eta2);
            let measured: f64 = (0..3).map(|k| 2.0 * s.iota[k] * d.iota[k]).sum();
            let closed: f64 = (0..3)
                .map(|k| {
                    let (j, l) = ((k + 1) % 3, (k + 2) % 3);
                    let kappa = 1.0 / (axes[j] * axes[j]) + 1.0 / (axes[l] * axes[l]);
                    2.0 * eta2 * kappa * s.iota[k] * s.iota[k]
                })
                .sum();
            assert_relative_eq!(measured, closed, epsilon = 1e-12, max_relative = 1e-12);
            if eta2 < 0.0 {
                assert!(closed <= 0.0);
            }
        }
    }

    #[test]
    fn invariants_reference_values() {
        let g = EllipsoidGeometry::from_moments([2.25, 1.25, 2.5]).unwrap();
        let s = DKState::new([0.0, 0.0, 1.0], ZERO_VEC3);
        let inv = invariants(&s, &g);
        assert_relative_eq!(inv.h0, 2.5, max_relative = 1e-13);
        assert_eq!(inv.h1, 0.0);
        assert_eq!(inv.c0, 0.0);
        let c = inv.c.unwrap();
        assert_relative_eq!(c[0], 2.5, max_relative = 1e-12);
        assert_relative_eq!(c[1], -2.5, max_relative = 1e-12);
        assert!(c[2].abs() < 1e-13);
        // H0 = I . C
        let ic: f64 = (0..3).map(|k| g.moments[k] * c[k]).sum();
        assert_relative_eq!(ic, inv.h0, max_relative = 1e-12);
    }

    #[test]
    fn invariants_sphere_clebsch_absent() {
        let g = EllipsoidGeometry::from_axes([1.0, 1.0, 1.0]).unwrap();
        let s = DKState::new([1.0, 1.0, 1.0], [1.0, 1.0, 1.0]);
        let inv = invariants(&s, &g);
        assert_eq!(inv.h0, 12.0);
        assert_eq!(inv.h1, 6.0);
        assert_eq!(inv.c0, 3.0);
        assert!(inv.c.is_none());
    }

    #[test]
    fn clebsch_identities_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..100 {
            let g = EllipsoidGeometry::from_axes([
                rng.random_range(0.5..2.0),
                rng.random_range(0.5..2.0),
                rng.random_range(0.5..2.0),
            ])
            .unwrap();
            let s = DKState::new(
                [
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ],
                [
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ],
            );
            let inv = invariants(&s, &g);
            if let Some(c) = inv.c {
                let ic: f64 = (0..3).map(|k| g.moments[k] * c[k]).sum();
                let csum: f64 = c.iter().sum();
                let scale = inv.h0.abs().max(1.0);
                assert!((ic - inv.h0).abs() <= 1e-12 * scale);
                assert!((csum - inv.c0).abs() <= 1e-12 * inv.c0.abs().max(1.0));
            }
        }
    }

    #[test]
    fn schedule_ramp_i3_values() {
        let sched = ParameterSchedule::RampI3 {
            i1: 2.25,
            i2: 1.25,
            i3_start: 2.5,
            rate: 0.0005,
        };
        let g0 = sched.eval(0.0).unwrap();
        assert_relative_eq!(g0.moments[0], 2.25, max_relative = 1e-12);
        assert_relative_eq!(g0.moments[1], 1.25, max_relative = 1e-12);
        assert_relative_eq!(g0.moments[2], 2.5, max_relative = 1e-12);
        // at t = 500 the ramp reaches I3 = I1, hence r2 = 0
        let g500 = sched.eval(500.0).unwrap();
        assert_relative_eq!(g500.moments[2], 2.25, max_relative = 1e-12);
        assert!(g500.ratios[1].abs() < 1e-13);
    }

    #[test]
    fn schedule_ramp_r1_values() {
        let sched = ParameterSchedule::RampR1 {
            r1_start: -0.5,
            rate: 0.001,
            r2_fixed: 0.25,
        };
        let g = sched.eval(500.0).unwrap();
        assert!(g.ratios[0].abs() < 1e-12);
        assert_relative_eq!(g.ratios[2], -0.25, max_relative = 1e-12);
    }

    #[test]
    fn schedule_window_violation_reports_time() {
        let sched = ParameterSchedule::RampI3 {
            i1: 2.25,
            i2: 1.25,
            i3_start: 2.5,
            rate: 0.01,
        };
        // I3 eventually makes an axis square negative
        let err = sched.validate_window(400.0).unwrap_err();
        match err {
            Error::ScheduleDomain { t, .. } => assert_eq!(t, 400.0),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
