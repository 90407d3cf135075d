//! Closed-form linear stability of the aligned and orthogonal equilibria,
//! and the quartic effective-potential analysis of the field-free (Euler)
//! sub-dynamics.
//!
//! Aligned case: vorticity and current along the 3-axis with `w3 = W`,
//! `iota3 = J`. Perturbations of the transverse components obey a quartic
//! in `s` that is quadratic in `x = s^2`,
//! `x^2 - beta x + c = 0`, with `beta = J^2 (r1 - r2) + W^2 (r1 r2 - 1)`.
//!
//! The constant term used by default is `c = -r1 r2 (J^2 - W^2)^2`. This is
//! re-derived here from the 2x2 second-order block system (it equals the
//! determinant of that block matrix); the frequently quoted variant without
//! the `r2` factor misclassifies the reference stable state as oscillatory
//! unstable, while the corrected constant reproduces both measured
//! oscillation frequencies and the `r1 = 0` stability boundary. The variant
//! constant remains available behind [`StabPolyVariant::Printed`] for
//! comparison.

use num_complex::Complex64;

use crate::dynamics::{ideal_rhs, DKState};
use crate::linalg::{Vec3, ZERO_VEC3};

/// Which constant term the aligned stability polynomial uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StabPolyVariant {
    /// `c = -r1 r2 (J^2 - W^2)^2` (independently re-derived determinant).
    #[default]
    Corrected,
    /// `c = -r1 (J^2 - W^2)^2` (compatibility variant).
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    StableOscillatory,
    Marginal,
    UnstableDirect,
    UnstableOscillatory,
}

impl StabilityClass {
    pub fn name(&self) -> &'static str {
        match self {
            StabilityClass::StableOscillatory => "stable-oscillatory",
            StabilityClass::Marginal => "marginal",
            StabilityClass::UnstableDirect => "unstable-direct",
            StabilityClass::UnstableOscillatory => "unstable-oscillatory",
        }
    }
}

/// Spectrum of the aligned-equilibrium perturbation problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignedStabilityReport {
    /// Coefficient of `x` (equivalently of `s^2`, with sign as in the
    /// quartic `s^4 - beta s^2 + c`).
    pub beta: f64,
    /// Constant term actually used (depends on the variant).
    pub constant: f64,
    pub variant: StabPolyVariant,
    /// Roots in `x = s^2`.
    pub x_roots: [Complex64; 2],
    /// The four mode exponents, in `+-` pairs.
    pub s_roots: [Complex64; 4],
    pub classification: StabilityClass,
    /// Stability threshold in `r2` for fixed `W`, `J`, `r1`:
    /// `(r1 J^2 - W^2) / (J^2 - r1 W^2)`.
    pub r2_threshold: f64,
}

impl AlignedStabilityReport {
    /// `|Im s|` of the two mode pairs (zero entries for non-oscillatory
    /// branches), sorted ascending.
    pub fn frequencies(&self) -> [f64; 2] {
        let mut f = [self.s_roots[0].im.abs(), self.s_roots[2].im.abs()];
        if f[0] > f[1] {
            f.swap(0, 1);
        }
        f
    }
}

const MARGINAL_EPS: f64 = 1e-12;

/// Aligned-equilibrium spectrum with the corrected constant term.
pub fn aligned_spectrum(w: f64, j: f64, r1: f64, r2: f64) -> AlignedStabilityReport {
    aligned_spectrum_with(w, j, r1, r2, StabPolyVariant::Corrected)
}

/// Aligned-equilibrium spectrum with an explicit choice of constant term.
pub fn aligned_spectrum_with(
    w: f64,
    j: f64,
    r1: f64,
    r2: f64,
    variant: StabPolyVariant,
) -> AlignedStabilityReport {
    let j2 = j * j;
    let w2 = w * w;
    let beta = j2 * (r1 - r2) + w2 * (r1 * r2 - 1.0);
    let sq = (j2 - w2) * (j2 - w2);
    let constant = match variant {
        StabPolyVariant::Corrected => -r1 * r2 * sq,
        StabPolyVariant::Printed => -r1 * sq,
    };

    let disc = Complex64::new(beta * beta - 4.0 * constant, 0.0).sqrt();
    let x0 = (Complex64::new(beta, 0.0) + disc) * 0.5;
    let x1 = (Complex64::new(beta, 0.0) - disc) * 0.5;
    let x_roots = [x0, x1];
    let s_roots = [x0.sqrt(), -x0.sqrt(), x1.sqrt(), -x1.sqrt()];

    let scale = 1.0f64.max(beta.abs()).max(constant.abs());
    let complex_roots = x_roots.iter().any(|x| x.im.abs() > MARGINAL_EPS * scale);
    let classification = if complex_roots {
        StabilityClass::UnstableOscillatory
    } else if x_roots.iter().any(|x| x.re.abs() <= MARGINAL_EPS * scale) {
        StabilityClass::Marginal
    } else if x_roots.iter().any(|x| x.re > 0.0) {
        StabilityClass::UnstableDirect
    } else {
        StabilityClass::StableOscillatory
    };

    let r2_threshold = (r1 * j2 - w2) / (j2 - r1 * w2);

    AlignedStabilityReport {
        beta,
        constant,
        variant,
        x_roots,
        s_roots,
        classification,
        r2_threshold,
    }
}

/// A single-mode outcome: oscillation frequency, growth rate, or neither.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeRate {
    Oscillation(f64),
    Growth(f64),
    Marginal,
}

impl ModeRate {
    fn from_x(x: f64) -> ModeRate {
        if x.abs() <= MARGINAL_EPS {
            ModeRate::Marginal
        } else if x < 0.0 {
            ModeRate::Oscillation((-x).sqrt())
        } else {
            ModeRate::Growth(x.sqrt())
        }
    }
}

impl std::fmt::Display for ModeRate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModeRate::Oscillation(w) => write!(f, "oscillation, frequency {w:.6}"),
            ModeRate::Growth(s) => write!(f, "growth, rate {s:.6}"),
            ModeRate::Marginal => write!(f, "marginal"),
        }
    }
}

/// Mode structure around the orthogonal configuration (`w3 = X`,
/// `iota1 = K`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalModes {
    /// The `w3` mode: `x = -r3 K^2`.
    pub w3_mode: ModeRate,
    /// `iota1` and `iota2` oscillation frequencies, `X` and
    /// `sqrt(X^2 + r3 K^2)`.
    pub iota_frequencies: [f64; 2],
    /// `x = r2 (K^2 + r1 X^2)` of the `(w1, iota3)` branch.
    pub branch_x: f64,
    pub branch_mode: ModeRate,
}

/// Closed-form modes of the orthogonal configuration.
pub fn orthogonal_modes(x_amp: f64, k_amp: f64, r: &Vec3) -> OrthogonalModes {
    let k2 = k_amp * k_amp;
    let x2 = x_amp * x_amp;
    let branch_x = r[1] * (k2 + r[0] * x2);
    OrthogonalModes {
        w3_mode: ModeRate::from_x(-r[2] * k2),
        iota_frequencies: [x_amp.abs(), (x2 + r[2] * k2).max(0.0).sqrt()],
        branch_x,
        branch_mode: ModeRate::from_x(branch_x),
    }
}

/// Shape letter of a quartic effective potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialShape {
    U,
    W,
    M,
    Cap,
}

impl PotentialShape {
    pub fn letter(&self) -> &'static str {
        match self {
            PotentialShape::U => "U",
            PotentialShape::W => "W",
            PotentialShape::M => "M",
            PotentialShape::Cap => "cap",
        }
    }

    /// Classify the true potential `Phi = -V` given the coefficients of
    /// `2V = alpha w^2 + beta w^4`: the quartic coefficient of `Phi` is
    /// `-beta`, the quadratic `-alpha`.
    fn classify(alpha: f64, beta: f64) -> PotentialShape {
        let quartic_up = -beta >= 0.0;
        let quadratic_up = -alpha >= 0.0;
        match (quartic_up, quadratic_up) {
            (true, true) => PotentialShape::U,
            (true, false) => PotentialShape::W,
            (false, true) => PotentialShape::M,
            (false, false) => PotentialShape::Cap,
        }
    }
}

/// Quadratic/quartic coefficients of the three effective potentials
/// `2V_i = alpha_i w^2 + beta_i w^4` for the field-free sub-dynamics, the
/// well shapes of `Phi = -V`, and which coefficients flip sign when `r2`
/// crosses zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialReport {
    /// `(alpha_i, beta_i)` per axis.
    pub coefficients: [(f64, f64); 3],
    pub shapes: [PotentialShape; 3],
    /// Shapes after `r2` changes sign (every flagged coefficient negated).
    pub shapes_flipped: [PotentialShape; 3],
    /// `(alpha carries r2, beta carries r2)` per axis; the one false entry
    /// is the quartic of `2V_2`, whose `beta_2 = r1 r3` does not change
    /// sign.
    pub sign_change_flags: [(bool, bool); 3],
}

/// Potential coefficients from the Clebsch integrals and shape ratios:
/// `2V_1 = r2 r3 (C2 - C3) r1 w^2 + r2 r3 w^4` and even cyclic
/// permutations.
pub fn potential_coefficients(c: &Vec3, r: &Vec3) -> PotentialReport {
    let alpha = [
        r[1] * r[2] * (c[1] - c[2]) * r[0],
        r[2] * r[0] * (c[2] - c[0]) * r[1],
        r[0] * r[1] * (c[0] - c[1]) * r[2],
    ];
    let beta = [r[1] * r[2], r[2] * r[0], r[0] * r[1]];
    let sign_change_flags = [(true, true), (true, false), (true, true)];

    let mut coefficients = [(0.0, 0.0); 3];
    let mut shapes = [PotentialShape::U; 3];
    let mut shapes_flipped = [PotentialShape::U; 3];
    for i in 0..3 {
        coefficients[i] = (alpha[i], beta[i]);
        shapes[i] = PotentialShape::classify(alpha[i], beta[i]);
        let (fa, fb) = sign_change_flags[i];
        let a_f = if fa { -alpha[i] } else { alpha[i] };
        let b_f = if fb { -beta[i] } else { beta[i] };
        shapes_flipped[i] = PotentialShape::classify(a_f, b_f);
    }

    PotentialReport {
        coefficients,
        shapes,
        shapes_flipped,
        sign_change_flags,
    }
}

/// Check the reduction of the field-free dynamics to the potential form:
/// the second time derivative of each vorticity component obtained by
/// differentiating the right-hand side along itself must equal
/// `r_j r_k w_i ((C_j - C_k) r_i + 2 w_i^2)` (even cyclic suffixes).
/// Requires `iota = 0`; returns the maximum absolute deviation over the
/// three axes.
pub fn verify_reduction(c: &Vec3, r: &Vec3, state: &DKState) -> f64 {
    let w = state.varpi;
    let euler = DKState::new(w, ZERO_VEC3);
    let wd = ideal_rhs(&euler, r).varpi;

    let mut worst = 0.0f64;
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        // product rule on the cyclic quadratic right-hand side
        let direct = r[i] * (wd[j] * w[k] + w[j] * wd[k]);
        let via_potential = r[j] * r[k] * w[i] * ((c[j] - c[k]) * r[i] + 2.0 * w[i] * w[i]);
        worst = worst.max((direct - via_potential).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::invariants;
    use crate::geometry::{r3_from, EllipsoidGeometry};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn r1_zero_is_marginal() {
        let rep = aligned_spectrum(0.1, 1.0, 0.0, 0.25);
        assert_eq!(rep.classification, StabilityClass::Marginal);
        // roots {0, beta}
        let prod = rep.x_roots[0] * rep.x_roots[1];
        assert!(prod.norm() < 1e-12);
        let sum = rep.x_roots[0] + rep.x_roots[1];
        assert_relative_eq!(sum.re, rep.beta, max_relative = 1e-12);
    }

    #[test]
    fn equal_amplitudes_are_marginal() {
        let rep = aligned_spectrum(0.7, 0.7, -0.4, 0.25);
        assert_eq!(rep.classification, StabilityClass::Marginal);
        assert!(rep.x_roots.iter().any(|x| x.norm() < 1e-12));
    }

    #[test]
    fn reference_stable_spectrum() {
        // W = 0.1, J = 1, r1 = -0.5, r2 = 0.25
        let rep = aligned_spectrum(0.1, 1.0, -0.5, 0.25);
        assert_relative_eq!(rep.beta, -0.76125, max_relative = 1e-12);
        assert_relative_eq!(rep.constant, 0.1225125, max_relative = 1e-12);
        assert_eq!(rep.classification, StabilityClass::StableOscillatory);
        // frozen from an independent quadratic-formula evaluation
        assert_relative_eq!(
            rep.x_roots[0].re,
            -0.231_082_729_638_071_92,
            epsilon = 1e-13
        );
        assert_relative_eq!(rep.x_roots[1].re, -0.530_167_270_361_928, epsilon = 1e-13);
        let f = rep.frequencies();
        assert_relative_eq!(f[0], 0.480_710_650_639_313_3, epsilon = 1e-13);
        assert_relative_eq!(f[1], 0.728_125_861_621_415, epsilon = 1e-13);
        // root-coefficient consistency
        let sum = rep.x_roots[0] + rep.x_roots[1];
        let prod = rep.x_roots[0] * rep.x_roots[1];
        assert_relative_eq!(sum.re, rep.beta, max_relative = 1e-12);
        assert_relative_eq!(prod.re, rep.constant, max_relative = 1e-12);
    }

    #[test]
    fn printed_variant_goes_complex() {
        let rep = aligned_spectrum_with(0.1, 1.0, -0.5, 0.25, StabPolyVariant::Printed);
        assert_relative_eq!(rep.constant, 0.49005, max_relative = 1e-12);
        assert_eq!(rep.classification, StabilityClass::UnstableOscillatory);
        assert_relative_eq!(rep.x_roots[0].re, -0.380625, max_relative = 1e-10);
        assert_relative_eq!(
            rep.x_roots[0].im.abs(),
            0.587_515_624_792_226_3,
            epsilon = 1e-13
        );
    }

    #[test]
    fn unstable_for_positive_r1_r2() {
        let rep = aligned_spectrum(0.1, 1.0, 0.3, 0.25);
        assert_eq!(rep.classification, StabilityClass::UnstableDirect);
        assert!(rep.x_roots.iter().any(|x| x.re > 0.0 && x.im.abs() < 1e-12));
    }

    #[test]
    fn threshold_consistent_with_beta_sign() {
        // r2_threshold is where the beta coefficient changes sign; bisecting
        // the computed beta must recover the closed form. (For r1 < 0 with
        // the corrected constant term, the full stable/unstable flip sits at
        // r2 = 0 where the constant changes sign; the beta boundary is what
        // the threshold formula encodes.)
        let (w, j, r1) = (0.1, 1.0, -0.5);
        let thr = aligned_spectrum(w, j, r1, 0.0).r2_threshold;
        assert_relative_eq!(thr, (r1 - 0.01) / (1.0 - r1 * 0.01), max_relative = 1e-12);
        let beta_neg = |r2: f64| aligned_spectrum(w, j, r1, r2).beta < 0.0;
        assert!(beta_neg(thr + 1e-3));
        assert!(!beta_neg(thr - 1e-3));
        let (mut lo, mut hi) = (thr - 1e-3, thr + 1e-3);
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            if beta_neg(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((0.5 * (lo + hi) - thr).abs() < 1e-4);
    }

    #[test]
    fn stability_flips_at_zero_r2_for_negative_r1() {
        // corrected constant: for r1 < 0 the constant term changes sign at
        // r2 = 0, so the classification flips stable -> unstable there
        let (w, j, r1) = (0.1, 1.0, -0.5);
        assert_eq!(
            aligned_spectrum(w, j, r1, 0.05).classification,
            StabilityClass::StableOscillatory
        );
        assert_eq!(
            aligned_spectrum(w, j, r1, -0.05).classification,
            StabilityClass::UnstableDirect
        );
    }

    #[test]
    fn orthogonal_reference_modes() {
        let r = [-0.5, 0.25, r3_from(-0.5, 0.25).unwrap()];
        let m = orthogonal_modes(1.0, 1.0, &r);
        match m.w3_mode {
            ModeRate::Oscillation(f) => assert_relative_eq!(f, 0.534_522, epsilon = 1e-5),
            other => panic!("unexpected {other:?}"),
        }
        assert_relative_eq!(m.branch_x, 0.125, max_relative = 1e-12);
        match m.branch_mode {
            ModeRate::Growth(s) => assert_relative_eq!(s, 0.353_553, epsilon = 1e-5),
            other => panic!("unexpected {other:?}"),
        }
        assert_relative_eq!(m.iota_frequencies[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(m.iota_frequencies[1], 1.133_893, epsilon = 1e-5);
    }

    #[test]
    fn orthogonal_limit_consistency() {
        let r = [-0.5, 0.25, r3_from(-0.5, 0.25).unwrap()];
        // K = 0: x = r1 r2 X^2
        let m = orthogonal_modes(0.8, 0.0, &r);
        assert_relative_eq!(m.branch_x, r[0] * r[1] * 0.64, max_relative = 1e-12);
        // X = 0: x = r2 K^2
        let m = orthogonal_modes(0.0, 0.8, &r);
        assert_relative_eq!(m.branch_x, r[1] * 0.64, max_relative = 1e-12);
    }

    fn reference_euler_start() -> (Vec3, Vec3) {
        // moments (2.25, 1.25, 2.5), w = (0.01, 0.01, 1), iota = 0
        let g = EllipsoidGeometry::from_moments([2.25, 1.25, 2.5]).unwrap();
        let s = DKState::new([0.01, 0.01, 1.0], ZERO_VEC3);
        let inv = invariants(&s, &g);
        (inv.c.unwrap(), g.ratios)
    }

    #[test]
    fn potential_reference_coefficients() {
        let (c, r) = reference_euler_start();
        assert_relative_eq!(c[0], 2.4995, max_relative = 1e-10);
        assert_relative_eq!(c[1], -2.50018, max_relative = 1e-10);
        assert_relative_eq!(c[2], 0.00068, max_relative = 1e-10);

        let rep = potential_coefficients(&c, &r);
        let (a1, b1) = rep.coefficients[0];
        let (a2, b2) = rep.coefficients[1];
        let (a3, b3) = rep.coefficients[2];
        assert_relative_eq!(a1, -0.111_149, epsilon = 1e-5);
        assert_relative_eq!(b1, 0.08, max_relative = 1e-12);
        assert_relative_eq!(a2, -0.111_059, epsilon = 1e-5);
        assert_relative_eq!(b2, -0.222_222, epsilon = 1e-5);
        assert_relative_eq!(a3, 0.222_208, epsilon = 1e-5);
        assert_relative_eq!(b3, -0.111_111, epsilon = 1e-5);

        assert_eq!(
            rep.shapes,
            [PotentialShape::M, PotentialShape::U, PotentialShape::W]
        );
        assert_eq!(
            rep.shapes_flipped,
            [PotentialShape::W, PotentialShape::W, PotentialShape::M]
        );
        assert!(!rep.sign_change_flags[1].1);
    }

    #[test]
    fn degenerate_r2_leaves_single_quartic() {
        // r2 = 0 (I3 = I1): only beta_2 = r1 r3 survives
        let g = EllipsoidGeometry::from_moments([2.25, 1.25, 2.25]).unwrap();
        let r = g.ratios;
        assert!(r[1].abs() < 1e-15);
        let c = [1.0, -1.0, 0.5]; // arbitrary; alpha terms all carry r2
        let rep = potential_coefficients(&c, &r);
        for i in 0..3 {
            assert!(rep.coefficients[i].0.abs() < 1e-14);
        }
        assert!(rep.coefficients[0].1.abs() < 1e-15);
        assert!(rep.coefficients[2].1.abs() < 1e-15);
        assert!(rep.coefficients[1].1.abs() > 0.1);
    }

    #[test]
    fn reduction_trivial_and_random() {
        let r = [-0.5, 0.25, r3_from(-0.5, 0.25).unwrap()];
        // single-axis state: both routes vanish
        let g = EllipsoidGeometry::from_ratios(-0.5, 0.25).unwrap();
        let s = DKState::new([0.0, 0.0, 1.0], ZERO_VEC3);
        let inv = invariants(&s, &g);
        assert!(verify_reduction(&inv.c.unwrap(), &r, &s) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(21);
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
            let dev = verify_reduction(&inv.c.unwrap(), &g.ratios, &s);
            assert!(dev <= 1e-10, "deviation {dev}");
        }
    }

    #[test]
    fn reference_start_reduction() {
        let g = EllipsoidGeometry::from_moments([2.25, 1.25, 2.5]).unwrap();
        let s = DKState::new([0.01, 0.01, 1.0], ZERO_VEC3);
        let inv = invariants(&s, &g);
        assert!(verify_reduction(&inv.c.unwrap(), &g.ratios, &s) <= 1e-12);
    }
}
