//! Ellipsoid geometry of the anisotropic scaling behind the D-K equations:
//! semi-axes, moments, shape ratios and their mutual conversions, plus the
//! Dolzhansky basis fields and numeric verification of their Lie algebra.
//!
//! Conventions. Moments are `I_i = a_j^2 + a_k^2` for `(ijk)` a permutation
//! of `(123)`; shape ratios are `r_1 = (I_3 - I_2)/I_1` and cyclic, each in
//! `[-1, 1]` and jointly constrained by `r1 + r2 + r3 + r1 r2 r3 = 0`. The
//! volume element is `sqrt_g = a1 a2 a3`. Orientation of curls follows the
//! explicitly computed `curl e_i = (a_j/a_k + a_k/a_j) xhat_i`; every other
//! sign in this module is anchored to that.

use crate::error::{Error, Result};
use crate::linalg::{levi_civita, mat_vec, vec_norm, vec_sub, Mat3, Vec3, ZERO_MAT3, ZERO_VEC3};
use crate::taylor::bracket_linear;

/// Shape ratios with absolute value below this are treated as degenerate
/// (two equal axes) by consumers that divide by them.
pub const DEGENERATE_RATIO_EPS: f64 = 1e-14;

/// Semi-axes with derived moments, shape ratios and volume element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipsoidGeometry {
    /// Semi-axes `a_i > 0`.
    pub axes: Vec3,
    /// Moments `I_i = a_j^2 + a_k^2`.
    pub moments: Vec3,
    /// Shape ratios `r_i`.
    pub ratios: Vec3,
    /// Volume element `a1 a2 a3`.
    pub sqrt_g: f64,
}

/// Dolzhansky basis data: generator matrices of the three solenoidal basis
/// fields `e_i` (Cartesian components), the constant fields `c_i = a_i
/// xhat_i`, and the curls of the `e_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSet {
    pub e: [Mat3; 3],
    pub c: [Vec3; 3],
    pub curl_e: [Vec3; 3],
}

impl EllipsoidGeometry {
    /// Build the geometry from semi-axes.
    pub fn from_axes(axes: Vec3) -> Result<Self> {
        const NAMES: [&str; 3] = ["a1", "a2", "a3"];
        for i in 0..3 {
            if !(axes[i] > 0.0) || !axes[i].is_finite() {
                return Err(Error::NonPositive {
                    name: NAMES[i],
                    value: axes[i],
                });
            }
        }
        let sq = [axes[0] * axes[0], axes[1] * axes[1], axes[2] * axes[2]];
        let moments = [sq[1] + sq[2], sq[0] + sq[2], sq[0] + sq[1]];
        let ratios = [
            (sq[1] - sq[2]) / moments[0],
            (sq[2] - sq[0]) / moments[1],
            (sq[0] - sq[1]) / moments[2],
        ];
        Ok(EllipsoidGeometry {
            axes,
            moments,
            ratios,
            sqrt_g: axes[0] * axes[1] * axes[2],
        })
    }

    /// Build the geometry from moments, inverting `I_i = a_j^2 + a_k^2`.
    pub fn from_moments(moments: Vec3) -> Result<Self> {
        let axes = axes_from_moments(&moments)?;
        Self::from_axes(axes)
    }

    /// Build a geometry from two shape ratios. The moment scale is pinned
    /// at `I_1 = 1`; the ratio-form dynamics do not depend on the scale.
    pub fn from_ratios(r1: f64, r2: f64) -> Result<Self> {
        for (name, r) in [("r1", r1), ("r2", r2)] {
            if !(r.abs() < 1.0) {
                return Err(Error::RatioOutOfRange { name, value: r });
            }
        }
        let r3 = r3_from(r1, r2)?;
        let (i2_over_i1, i3_over_i1) = moment_ratios_from_r(&[r1, r2, r3])?;
        Self::from_moments([1.0, i2_over_i1, i3_over_i1])
    }

    /// Generator matrices, constant fields and curls of the basis.
    pub fn basis_set(&self) -> BasisSet {
        let a = &self.axes;
        let mut e = [ZERO_MAT3; 3];
        let mut c = [ZERO_VEC3; 3];
        let mut curl_e = [ZERO_VEC3; 3];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            e[i][j][k] = -a[j] / a[k];
            e[i][k][j] = a[k] / a[j];
            c[i][i] = a[i];
            curl_e[i][i] = a[j] / a[k] + a[k] / a[j];
        }
        BasisSet { e, c, curl_e }
    }

    /// Numeric check of the Lie-algebra structure constants and curl
    /// relations; returns the maximum absolute deviation found.
    ///
    /// Checked identities, for `(ijk)` the even permutations:
    /// `[e_i, e_j] = e_k`; `[e_i, c_j] = e_i c_j = c_k`; `[c_i, c_j] = 0`
    /// (constant fields, identically zero); `curl e_i = I_i c_i / sqrt_g`;
    /// and both curl-contraction routes, `curl_linear(id, e_i)` in the
    /// Cartesian frame and `curl_linear(G, l^-1 e_i l)` in the scaled frame
    /// with `G = diag(a_i^2)/sqrt_g`.
    pub fn verify_algebra(&self) -> f64 {
        fn max_abs(worst: f64, v: &Vec3) -> f64 {
            v.iter().fold(worst, |m, x| m.max(x.abs()))
        }

        let b = self.basis_set();
        let mut worst = 0.0f64;
        let g_scaled = self.metric_tensor();
        for (i, j, k) in [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
            // [e_i, e_j] = e_k
            let comm = bracket_linear(&b.e[i], &b.e[j]);
            for r in 0..3 {
                for s in 0..3 {
                    worst = worst.max((comm[r][s] - b.e[k][r][s]).abs());
                }
            }
            // [e_i, c_j]: bracket of a linear with a constant field is the
            // generator applied to the constant.
            let ec = mat_vec(&b.e[i], &b.c[j]);
            worst = max_abs(worst, &vec_sub(&ec, &b.c[k]));
        }
        for i in 0..3 {
            // curl e_i = I_i c_i / sqrt_g
            let expect = crate::linalg::vec_scale(self.moments[i] / self.sqrt_g, &b.c[i]);
            worst = max_abs(worst, &vec_sub(&b.curl_e[i], &expect));
            // Cartesian-frame contraction route
            let cart = curl_linear(&crate::linalg::identity(), &b.e[i]);
            worst = max_abs(worst, &vec_sub(&cart, &b.curl_e[i]));
            // Scaled-frame route: the generator in scaled coordinates is
            // l^-1 e_i l (a pure rotation generator) and the curl comes out
            // in contravariant components, I_i xhat_i / sqrt_g.
            let scaled_gen = self.to_scaled_frame(&b.e[i]);
            let om = curl_linear(&g_scaled, &scaled_gen);
            let mut expect_scaled = ZERO_VEC3;
            expect_scaled[i] = self.moments[i] / self.sqrt_g;
            worst = max_abs(worst, &vec_sub(&om, &expect_scaled));
        }
        worst
    }

    /// `G = diag(a_i^2) / sqrt_g`, the metric-over-volume tensor of the
    /// scaled coordinates.
    pub fn metric_tensor(&self) -> Mat3 {
        let mut g = ZERO_MAT3;
        for i in 0..3 {
            g[i][i] = self.axes[i] * self.axes[i] / self.sqrt_g;
        }
        g
    }

    /// Conjugate a Cartesian-components generator into the scaled frame:
    /// `l^-1 M l` with `l = diag(a)`.
    pub fn to_scaled_frame(&self, m: &Mat3) -> Mat3 {
        let a = &self.axes;
        let mut out = ZERO_MAT3;
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = m[i][j] * a[j] / a[i];
            }
        }
        out
    }
}

/// Invert `I_i = a_j^2 + a_k^2` to semi-axes: `a_i = sqrt((I_j + I_k - I_i)/2)`.
pub fn axes_from_moments(moments: &Vec3) -> Result<Vec3> {
    let mut axes = ZERO_VEC3;
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let sq = 0.5 * (moments[j] + moments[k] - moments[i]);
        if !(sq > 0.0) {
            return Err(Error::MomentPositivity {
                axis: i + 1,
                value: sq,
            });
        }
        axes[i] = sq.sqrt();
    }
    Ok(axes)
}

/// Third shape ratio from the first two: `r3 = -(r1 + r2)/(1 + r1 r2)`.
pub fn r3_from(r1: f64, r2: f64) -> Result<f64> {
    let denom = 1.0 + r1 * r2;
    if denom.abs() < 1e-14 {
        return Err(Error::SingularConstraint {
            context: "1 + r1*r2",
            value: denom,
        });
    }
    Ok(-(r1 + r2) / denom)
}

/// Moment ratios from the shape ratios:
/// `I2/I1 = (1 - r1)/(1 + r2)` and `I3/I1 = (1 + r1)/(1 - r3)`.
pub fn moment_ratios_from_r(r: &Vec3) -> Result<(f64, f64)> {
    let d2 = 1.0 + r[1];
    if d2.abs() < 1e-14 {
        return Err(Error::SingularConstraint {
            context: "1 + r2",
            value: d2,
        });
    }
    let d3 = 1.0 - r[2];
    if d3.abs() < 1e-14 {
        return Err(Error::SingularConstraint {
            context: "1 - r3",
            value: d3,
        });
    }
    Ok(((1.0 - r[0]) / d2, (1.0 + r[0]) / d3))
}

/// Transformed vorticity from the skew coefficients: `Omega_i = I_i
/// varpi_i / sqrt_g`.
pub fn omega_from_varpi(varpi: &Vec3, g: &EllipsoidGeometry) -> Vec3 {
    let mut out = ZERO_VEC3;
    for i in 0..3 {
        out[i] = g.moments[i] * varpi[i] / g.sqrt_g;
    }
    out
}

/// Diagonal-metric general form of [`omega_from_varpi`]:
/// `Omega_i = (tr G) varpi_i - G_{ki} varpi_k`, with the orientation fixed
/// so that the diagonal case reproduces `I_i varpi_i / sqrt_g`.
pub fn omega_from_varpi_general(varpi: &Vec3, g_tensor: &Mat3) -> Vec3 {
    let trace = crate::linalg::mat_trace(g_tensor);
    let mut out = ZERO_VEC3;
    for i in 0..3 {
        let mut s = trace * varpi[i];
        for k in 0..3 {
            s -= g_tensor[k][i] * varpi[k];
        }
        out[i] = s;
    }
    out
}

/// Curl of the linear field with gradient matrix `u` under a constant
/// metric-over-volume tensor `g_tensor`:
/// `omega^j = e^{jrs} G_{sq} U_{qr}`.
///
/// The orientation is anchored so that with the identity tensor and the
/// Cartesian basis generators this reproduces `curl e_i` exactly (the
/// sphere gives `curl e_i = 2 xhat_i`). The same contraction applies to the
/// magnetic coefficients to produce the current.
pub fn curl_linear(g_tensor: &Mat3, u: &Mat3) -> Vec3 {
    let mut out = ZERO_VEC3;
    for j in 0..3 {
        let mut s = 0.0;
        for r in 0..3 {
            for sx in 0..3 {
                let eps = levi_civita(j, r, sx);
                if eps == 0.0 {
                    continue;
                }
                for q in 0..3 {
                    s += eps * g_tensor[sx][q] * u[q][r];
                }
            }
        }
        out[j] = s;
    }
    out
}

/// Residual of the ratio constraint `r1 + r2 + r3 + r1 r2 r3`.
pub fn ratio_constraint_residual(r: &Vec3) -> f64 {
    r[0] + r[1] + r[2] + r[0] * r[1] * r[2]
}

#[allow(dead_code)]
fn norm_helper(v: &Vec3) -> f64 {
    vec_norm(v)
}
