//! Self-check suites driven by the `verify` CLI subcommand.
//!
//! Four suites: `hierarchy` (evolution equations against the polynomial
//! oracle), `conservation` (commutator/skew-flow/second-order conserved
//! quantities and the fixed-parameter invariant drift), `algebra`
//! (structure constants and curls for random geometries), `reduction`
//! (second-derivative potential form of the field-free dynamics). All
//! randomness is seeded; the suites are deterministic.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{ideal_rhs, invariants, DKState, ParameterSchedule};
use crate::error::{Error, Result};
use crate::geometry::EllipsoidGeometry;
use crate::integrator::{integrate, IntegrationSettings};
use crate::linalg::{Mat3, Vec3, ZERO_MAT3, ZERO_VEC3};
use crate::poly::{bracket_hierarchy_oracle, mass_hierarchy_oracle};
use crate::scenario::{run_scenario, Scenario};
use crate::stability::verify_reduction;
use crate::taylor::{
    diagnostics, hierarchy_rhs, mass_hierarchy_rhs, ScalarHierarchy, TaylorHierarchy,
};

pub const SUITES: [&str; 4] = ["hierarchy", "conservation", "algebra", "reduction"];

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(suite: &'static str, name: &'static str, passed: bool, detail: String) -> Self {
        CheckResult {
            suite,
            name,
            passed,
            detail,
        }
    }
}

/// Run one suite by name, or all of them for `None`.
pub fn run_suites(selector: Option<&str>) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    match selector {
        None => {
            out.extend(hierarchy_suite());
            out.extend(conservation_suite());
            out.extend(algebra_suite());
            out.extend(reduction_suite());
        }
        Some("hierarchy") => out.extend(hierarchy_suite()),
        Some("conservation") => out.extend(conservation_suite()),
        Some("algebra") => out.extend(algebra_suite()),
        Some("reduction") => out.extend(reduction_suite()),
        Some(other) => return Err(Error::UnknownSuite(other.to_string())),
    }
    Ok(out)
}

fn random_hierarchy(rng: &mut ChaCha8Rng) -> TaylorHierarchy {
    let mut h = TaylorHierarchy::zero();
    for j in 0..3 {
        h.order0[j] = rng.random_range(-1.0..1.0);
        for m in 0..3 {
            h.order1[j][m] = rng.random_range(-1.0..1.0);
            for n in 0..3 {
                h.order2[j][m][n] = rng.random_range(-1.0..1.0);
                for q in 0..3 {
                    h.order3[j][m][n][q] = rng.random_range(-1.0..1.0);
                }
            }
        }
    }
    h.symmetrize_trailing();
    h
}

fn random_scalar(rng: &mut ChaCha8Rng) -> ScalarHierarchy {
    let mut s = ScalarHierarchy {
        s0: rng.random_range(-1.0..1.0),
        ..Default::default()
    };
    for m in 0..3 {
        s.s1[m] = rng.random_range(-1.0..1.0);
        for n in 0..3 {
            s.s2[m][n] = rng.random_range(-1.0..1.0);
        }
    }
    // symmetric second derivatives
    for m in 0..3 {
        for n in 0..m {
            let avg = 0.5 * (s.s2[m][n] + s.s2[n][m]);
            s.s2[m][n] = avg;
            s.s2[n][m] = avg;
        }
    }
    s
}

fn hierarchy_worst_dev(a: &TaylorHierarchy, b: &TaylorHierarchy) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..3 {
        worst = worst.max((a.order0[j] - b.order0[j]).abs());
        for m in 0..3 {
            worst = worst.max((a.order1[j][m] - b.order1[j][m]).abs());
            for n in 0..3 {
                worst = worst.max((a.order2[j][m][n] - b.order2[j][m][n]).abs());
            }
        }
    }
    worst
}

/// Oracle equivalence of the bracket and point-mass evolution equations
/// over 100 seeded random hierarchies, tolerance 1e-12 per coefficient.
pub fn hierarchy_suite() -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x44_4b_01);
    let mut worst_bracket = 0.0f64;
    let mut worst_mass = 0.0f64;
    for _ in 0..100 {
        let u = random_hierarchy(&mut rng);
        let q = random_hierarchy(&mut rng);
        let fast = hierarchy_rhs(&u, &q);
        let oracle = bracket_hierarchy_oracle(&u, &q);
        worst_bracket = worst_bracket.max(hierarchy_worst_dev(&fast, &oracle));

        let rho = random_scalar(&mut rng);
        let fast_m = mass_hierarchy_rhs(&u, &rho);
        let oracle_m = mass_hierarchy_oracle(&u, &rho);
        let mut dev = (fast_m.s0 - oracle_m.s0).abs();
        for k in 0..3 {
            dev = dev.max((fast_m.s1[k] - oracle_m.s1[k]).abs());
            for l in 0..3 {
                dev = dev.max((fast_m.s2[k][l] - oracle_m.s2[k][l]).abs());
            }
        }
        worst_mass = worst_mass.max(dev);
    }
    vec![
        CheckResult::new(
            "hierarchy",
            "bracket-vs-polynomial-oracle",
            worst_bracket <= 1e-12,
            format!("max coefficient deviation {worst_bracket:.3e} (tol 1e-12, 100 trials)"),
        ),
        CheckResult::new(
            "hierarchy",
            "mass-vs-divergence-oracle",
            worst_mass <= 1e-12,
            format!("max coefficient deviation {worst_mass:.3e} (tol 1e-12, 100 trials)"),
        ),
    ]
}

fn random_mat(rng: &mut ChaCha8Rng, scale: f64) -> Mat3 {
    let mut m = ZERO_MAT3;
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            *x = rng.random_range(-scale..scale);
        }
    }
    m
}

fn random_skew(rng: &mut ChaCha8Rng) -> Mat3 {
    let v: Vec3 = [
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    ];
    crate::linalg::skew_from_vector(&v)
}

/// Commutator-flow trace powers, skew-flow Frobenius sum, second-order
/// Frobenius sum, and the fixed-parameter six-variable invariant drift.
pub fn conservation_suite() -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x44_4b_02);
    let settings = IntegrationSettings {
        sample_dt: 0.5,
        rtol: 1e-12,
        atol: 1e-14,
        ..Default::default()
    };
    let mut out = Vec::new();

    // dQ/dt = [U, Q] with constant U conserves tr(Q^L), L = 1..4. The
    // generator scale bounds the conjugation transient so the conserved
    // traces are not computed from cancelling large entries.
    {
        let u = random_mat(&mut rng, 0.3);
        let q0 = random_mat(&mut rng, 1.0);
        let flat0 = flatten_mat(&q0);
        let traj = integrate(
            |_t, y: &[f64; 9]| {
                let q = unflatten_mat(y);
                flatten_mat(&crate::taylor::bracket_linear(&u, &q))
            },
            flat0,
            (0.0, 10.0),
            &settings,
        )
        .expect("commutator flow integrates");
        let ref_tp = diagnostics(&TaylorHierarchy::from_order1(q0)).trace_powers;
        let mut worst = 0.0f64;
        for state in &traj.states {
            let tp = diagnostics(&TaylorHierarchy::from_order1(unflatten_mat(state))).trace_powers;
            for l in 0..4 {
                worst = worst.max((tp[l] - ref_tp[l]).abs() / ref_tp[l].abs().max(1e-300));
            }
        }
        out.push(CheckResult::new(
            "conservation",
            "commutator-flow-trace-powers",
            worst <= 1e-8,
            format!("max relative drift {worst:.3e} over t in [0,10] (tol 1e-8)"),
        ));
    }

    // skew U conserves the sum of squares of Q entries
    {
        let u = random_skew(&mut rng);
        let q0 = random_mat(&mut rng, 1.0);
        let traj = integrate(
            |_t, y: &[f64; 9]| {
                let q = unflatten_mat(y);
                flatten_mat(&crate::taylor::bracket_linear(&u, &q))
            },
            flatten_mat(&q0),
            (0.0, 10.0),
            &settings,
        )
        .expect("skew flow integrates");
        let ref_f = crate::linalg::mat_sq_sum(&q0);
        let mut worst = 0.0f64;
        for state in &traj.states {
            let f = crate::linalg::mat_sq_sum(&unflatten_mat(state));
            worst = worst.max((f - ref_f).abs() / ref_f);
        }
        out.push(CheckResult::new(
            "conservation",
            "skew-flow-frobenius",
            worst <= 1e-8,
            format!("max relative drift {worst:.3e} over t in [0,10] (tol 1e-8)"),
        ));
    }

    // skew order-1 U, order-2-only Q: the order-2 Frobenius sum is conserved
    {
        let u = TaylorHierarchy::from_order1(random_skew(&mut rng));
        let mut q0 = TaylorHierarchy::zero();
        for j in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    q0.order2[j][m][n] = rng.random_range(-1.0..1.0);
                }
            }
        }
        q0.symmetrize_trailing();
        let traj = integrate(
            |_t, y: &[f64; 27]| {
                let mut q = TaylorHierarchy::zero();
                unflatten_t3(y, &mut q.order2);
                let d = hierarchy_rhs(&u, &q);
                flatten_t3(&d.order2)
            },
            flatten_t3(&q0.order2),
            (0.0, 10.0),
            &settings,
        )
        .expect("second-order flow integrates");
        let ref_f = diagnostics(&q0).frobenius2;
        let mut worst = 0.0f64;
        for state in &traj.states {
            let mut q = TaylorHierarchy::zero();
            unflatten_t3(state, &mut q.order2);
            let f = diagnostics(&q).frobenius2;
            worst = worst.max((f - ref_f).abs() / ref_f);
        }
        out.push(CheckResult::new(
            "conservation",
            "second-order-frobenius",
            worst <= 1e-8,
            format!("max relative drift {worst:.3e} over t in [0,10] (tol 1e-8)"),
        ));
    }

    // fixed-parameter six-variable run conserves all invariants
    {
        let sc = Scenario {
            schedule: ParameterSchedule::FixedAxes {
                geometry: EllipsoidGeometry::from_ratios(-0.5, 0.25)
                    .expect("reference ratios valid"),
            },
            initial: DKState::new([0.01, 0.01, 0.1], [0.01, 0.01, 1.0]),
            eta2: 0.0,
            t_end: 100.0,
            settings: IntegrationSettings::default(),
        };
        let run = run_scenario(&sc).expect("reference run integrates");
        let drift = run.report.drift.expect("fixed run has drift summary");
        let worst = drift
            .c
            .map(|c| c.iter().fold(0.0f64, |m, x| m.max(*x)))
            .unwrap_or(0.0)
            .max(drift.h0)
            .max(drift.h1)
            .max(drift.c0);
        out.push(CheckResult::new(
            "conservation",
            "dk-invariant-drift",
            worst <= 1e-6,
            format!("max relative drift {worst:.3e} over t in [0,100] (tol 1e-6)"),
        ));
    }

    out
}

/// Structure constants, bracket-with-constant-field relations and curl
/// identities over 100 random positive axis triples.
pub fn algebra_suite() -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x44_4b_03);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g = EllipsoidGeometry::from_axes([
            rng.random_range(0.3..3.0),
            rng.random_range(0.3..3.0),
            rng.random_range(0.3..3.0),
        ])
        .expect("positive axes");
        worst = worst.max(g.verify_algebra());
    }
    vec![CheckResult::new(
        "algebra",
        "structure-constants-and-curls",
        worst <= 1e-12,
        format!("max deviation {worst:.3e} over 100 random geometries (tol 1e-12)"),
    )]
}

/// Potential-form reduction of the field-free dynamics over 100 random
/// states.
pub fn reduction_suite() -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x44_4b_04);
    let g = EllipsoidGeometry::from_ratios(-0.5, 0.25).expect("reference ratios valid");
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let s = DKState::new(
            [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ],
            ZERO_VEC3,
        );
        let inv = invariants(&s, &g);
        let c = inv.c.expect("nondegenerate ratios");
        worst = worst.max(verify_reduction(&c, &g.ratios, &s));
        // spot-check the trivial single-axis state as well
        let aligned = DKState::new([0.0, 0.0, rng.random_range(-1.0..1.0)], ZERO_VEC3);
        let d = ideal_rhs(&aligned, &g.ratios);
        debug_assert!(d.to_array().iter().all(|x| *x == 0.0));
    }
    vec![CheckResult::new(
        "reduction",
        "potential-form-second-derivative",
        worst <= 1e-10,
        format!("max deviation {worst:.3e} over 100 random field-free states (tol 1e-10)"),
    )]
}

fn flatten_mat(m: &Mat3) -> [f64; 9] {
    let mut out = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            out[3 * i + j] = m[i][j];
        }
    }
    out
}

fn unflatten_mat(y: &[f64; 9]) -> Mat3 {
    let mut m = ZERO_MAT3;
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = y[3 * i + j];
        }
    }
    m
}

fn flatten_t3(t: &crate::taylor::Tensor3) -> [f64; 27] {
    let mut out = [0.0; 27];
    for j in 0..3 {
        for m in 0..3 {
            for n in 0..3 {
                out[9 * j + 3 * m + n] = t[j][m][n];
            }
        }
    }
    out
}

fn unflatten_t3(y: &[f64; 27], t: &mut crate::taylor::Tensor3) {
    for j in 0..3 {
        for m in 0..3 {
            for n in 0..3 {
                t[j][m][n] = y[9 * j + 3 * m + n];
            }
        }
    }
}
