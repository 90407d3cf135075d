//! Truncated Taylor coefficient hierarchies of polynomial vector and scalar
//! fields, and the exact evolution equations of their coefficient tensors
//! under Lie-bracket transport.
//!
//! A vector field is stored through its normalised derivative coefficients
//! `u^j = U^j + U^j_m x^m + U^j_{mn} x^m x^n + U^j_{mnq} x^m x^n x^q`, where
//! the suffixed coefficients carry the `1/k!` prefactor and are symmetric in
//! their trailing indices. Storage truncates at order 3; evolution equations
//! are provided for orders 0 through 2 (order-3 coefficients feed the
//! order-2 equation but do not themselves evolve).

use crate::linalg::{mat_mul, mat_sq_sum, mat_sub, mat_trace, Mat3, Vec3, ZERO_MAT3, ZERO_VEC3};

/// Order-2 coefficient tensor `U^j_{mn}`: first index component, trailing
/// two symmetric.
pub type Tensor3 = [[[f64; 3]; 3]; 3];
/// Order-3 coefficient tensor `U^j_{mnq}`: trailing three symmetric.
pub type Tensor4 = [[[[f64; 3]; 3]; 3]; 3];

pub const ZERO_TENSOR3: Tensor3 = [[[0.0; 3]; 3]; 3];
pub const ZERO_TENSOR4: Tensor4 = [[[[0.0; 3]; 3]; 3]; 3];

/// Taylor coefficients of a cubic-truncated vector field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorHierarchy {
    pub order0: Vec3,
    pub order1: Mat3,
    pub order2: Tensor3,
    pub order3: Tensor4,
}

impl Default for TaylorHierarchy {
    fn default() -> Self {
        Self::zero()
    }
}

impl TaylorHierarchy {
    pub fn zero() -> Self {
        TaylorHierarchy {
            order0: ZERO_VEC3,
            order1: ZERO_MAT3,
            order2: ZERO_TENSOR3,
            order3: ZERO_TENSOR4,
        }
    }

    /// Hierarchy of a purely linear field `x -> M x`.
    pub fn from_order1(m: Mat3) -> Self {
        TaylorHierarchy {
            order1: m,
            ..Self::zero()
        }
    }

    /// Symmetrise the trailing indices of the order-2 and order-3 slots.
    pub fn symmetrize_trailing(&mut self) {
        let q2 = self.order2;
        for j in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    self.order2[j][m][n] = 0.5 * (q2[j][m][n] + q2[j][n][m]);
                }
            }
        }
        let q3 = self.order3;
        for j in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    for q in 0..3 {
                        self.order3[j][m][n][q] = (q3[j][m][n][q]
                            + q3[j][m][q][n]
                            + q3[j][n][m][q]
                            + q3[j][n][q][m]
                            + q3[j][q][m][n]
                            + q3[j][q][n][m])
                            / 6.0;
                    }
                }
            }
        }
    }

    /// Largest trailing-index asymmetry over the order-2 and order-3 slots.
    pub fn max_trailing_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    worst = worst.max((self.order2[j][m][n] - self.order2[j][n][m]).abs());
                    for q in 0..3 {
                        worst =
                            worst.max((self.order3[j][m][n][q] - self.order3[j][m][q][n]).abs());
                        worst =
                            worst.max((self.order3[j][m][n][q] - self.order3[j][n][m][q]).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..3 {
            worst = worst.max(self.order0[j].abs());
            for m in 0..3 {
                worst = worst.max(self.order1[j][m].abs());
                for n in 0..3 {
                    worst = worst.max(self.order2[j][m][n].abs());
                    for q in 0..3 {
                        worst = worst.max(self.order3[j][m][n][q].abs());
                    }
                }
            }
        }
        worst
    }
}

/// Taylor coefficients of a quadratic-truncated scalar field (point mass).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScalarHierarchy {
    pub s0: f64,
    pub s1: Vec3,
    /// Symmetric second-derivative coefficients.
    pub s2: Mat3,
}

impl ScalarHierarchy {
    pub fn uniform(s0: f64) -> Self {
        ScalarHierarchy {
            s0,
            s1: ZERO_VEC3,
            s2: ZERO_MAT3,
        }
    }
}

/// Conservation and ordering diagnostics of one hierarchy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchyDiagnostics {
    /// `tr(Q1^L)` for `L = 1..=4`.
    pub trace_powers: [f64; 4],
    /// Sum of squares of order-1 entries.
    pub frobenius1: f64,
    /// Sum of squares of order-2 entries.
    pub frobenius2: f64,
    /// Lengthscale `|Q0| / |Q1|` (0 when order 0 vanishes).
    pub a0: f64,
    /// Lengthscale `|Q1| / |Q2|` (+inf when order 2 vanishes).
    pub lambda: f64,
}

/// Lie bracket of the linear fields `x -> Ax` and `x -> Bx`, i.e. the
/// matrix commutator `AB - BA`.
pub fn bracket_linear(a: &Mat3, b: &Mat3) -> Mat3 {
    mat_sub(&mat_mul(a, b), &mat_mul(b, a))
}

/// Time derivative of the coefficient hierarchy of `q` transported by `u`,
/// i.e. the Taylor coefficients of the bracket `[u, q]` through order 2.
///
/// The order-3 slot of the result is zero: order-3 coefficients enter the
/// order-2 equation but no evolution equation is provided for them. The
/// order-2 slot is assembled as written and then symmetrised over its
/// trailing pair, so the output satisfies the trailing-symmetry invariant
/// exactly.
pub fn hierarchy_rhs(u: &TaylorHierarchy, q: &TaylorHierarchy) -> TaylorHierarchy {
    let (u0, u1, u2, u3) = (&u.order0, &u.order1, &u.order2, &u.order3);
    let (q0, q1, q2, q3) = (&q.order0, &q.order1, &q.order2, &q.order3);

    let mut out = TaylorHierarchy::zero();

    // dQ^j/dt = Q^i U^j_i - U^i Q^j_i
    for j in 0..3 {
        let mut s = 0.0;
        for i in 0..3 {
            s += q0[i] * u1[j][i] - u0[i] * q1[j][i];
        }
        out.order0[j] = s;
    }

    // dQ^j_k/dt = Q^i_k U^j_i - U^i_k Q^j_i + 2 (Q^i U^j_{ki} - U^i Q^j_{ki})
    for j in 0..3 {
        for k in 0..3 {
            let mut s = 0.0;
            for i in 0..3 {
                s += q1[i][k] * u1[j][i] - u1[i][k] * q1[j][i]
                    + 2.0 * (q0[i] * u2[j][k][i] - u0[i] * q2[j][k][i]);
            }
            out.order1[j][k] = s;
        }
    }

    // dQ^j_{kl}/dt assembled term by term, then symmetrised over (k, l).
    // The Q^i_{kl} U^j_i / U^i_{kl} Q^j_i pair carries the signs direct
    // differentiation of the bracket produces (the polynomial oracle
    // arbitrates this pair).
    let raw = |j: usize, k: usize, l: usize| -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            s += q1[i][l] * u2[j][k][i] - u1[i][k] * q2[j][i][l] + q1[i][k] * u2[j][i][l]
                - u1[i][l] * q2[j][i][k]
                + u1[j][i] * q2[i][k][l]
                - q1[j][i] * u2[i][k][l]
                + 3.0 * (q0[i] * u3[j][i][k][l] - u0[i] * q3[j][i][k][l]);
        }
        s
    };
    for j in 0..3 {
        for k in 0..3 {
            for l in 0..3 {
                out.order2[j][k][l] = 0.5 * (raw(j, k, l) + raw(j, l, k));
            }
        }
    }

    out
}

/// Time derivative of the point-mass coefficients under transport by `u`:
/// the Taylor coefficients of `-d(rho u^i)/dx^i` through order 2, with the
/// third-derivative coefficients of the scalar truncated to zero.
pub fn mass_hierarchy_rhs(u: &TaylorHierarchy, rho: &ScalarHierarchy) -> ScalarHierarchy {
    let (u0, u1, u2, u3) = (&u.order0, &u.order1, &u.order2, &u.order3);
    let trace_u1 = mat_trace(&u.order1);

    let mut out = ScalarHierarchy::default();

    // d(rho_0)/dt = -(rho_0 U^j_j + rho_j U^j)
    let mut s = rho.s0 * trace_u1;
    for j in 0..3 {
        s += rho.s1[j] * u0[j];
    }
    out.s0 = -s;

    // d(rho_k)/dt = -(2 rho_0 U^j_{jk} + rho_k U^j_j + rho_j U^j_k
    //               + 2 rho_{jk} U^j)
    for k in 0..3 {
        let mut s = rho.s1[k] * trace_u1;
        for j in 0..3 {
            s += 2.0 * rho.s0 * u2[j][j][k] + rho.s1[j] * u1[j][k] + 2.0 * rho.s2[j][k] * u0[j];
        }
        out.s1[k] = -s;
    }

    // d(rho_{kl})/dt = -(3 rho_0 U^j_{jkl} + rho_l U^j_{jk} + rho_k U^j_{jl}
    //                  + rho_j U^j_{kl} + rho_{jk} U^j_l + rho_{jl} U^j_k
    //                  + rho_{kl} U^j_j)
    for k in 0..3 {
        for l in 0..3 {
            let mut s = rho.s2[k][l] * trace_u1;
            for j in 0..3 {
                s += 3.0 * rho.s0 * u3[j][j][k][l]
                    + rho.s1[l] * u2[j][j][k]
                    + rho.s1[k] * u2[j][j][l]
                    + rho.s1[j] * u2[j][k][l]
                    + rho.s2[j][k] * u1[j][l]
                    + rho.s2[j][l] * u1[j][k];
            }
            out.s2[k][l] = -s;
        }
    }

    out
}

/// Trace powers, Frobenius sums and the two ordering lengthscales of a
/// coefficient hierarchy.
pub fn diagnostics(q: &TaylorHierarchy) -> HierarchyDiagnostics {
    let mut trace_powers = [0.0; 4];
    let mut power = q.order1;
    trace_powers[0] = mat_trace(&power);
    for tp in trace_powers.iter_mut().skip(1) {
        power = mat_mul(&power, &q.order1);
        *tp = mat_trace(&power);
    }

    let frobenius1 = mat_sq_sum(&q.order1);
    let frobenius2: f64 = q.order2.iter().flatten().flatten().map(|x| x * x).sum();

    let norm0 = crate::linalg::vec_norm(&q.order0);
    let norm1 = frobenius1.sqrt();
    let norm2 = frobenius2.sqrt();

    let a0 = if norm0 == 0.0 { 0.0 } else { norm0 / norm1 };
    let lambda = if norm2 == 0.0 {
        f64::INFINITY
    } else {
        norm1 / norm2
    };

    HierarchyDiagnostics {
        trace_powers,
        frobenius1,
        frobenius2,
        a0,
        lambda,
    }
}
