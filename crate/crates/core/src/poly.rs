//! Exact dense polynomials in three variables.
//!
//! This is the independent route used by the verification suites: a
//! hierarchy is expanded into explicit polynomials, bracket and divergence
//! are formed by term-by-term differentiation and multiplication, and the
//! normalised Taylor coefficients are read back off. None of it shares code
//! with the tensor-contraction evolution equations in [`crate::taylor`].

use std::collections::BTreeMap;

use crate::linalg::Vec3;
use crate::taylor::{ScalarHierarchy, TaylorHierarchy};

/// Polynomial in `x1, x2, x3` as a map from exponent triples to
/// coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly3 {
    terms: BTreeMap<[u8; 3], f64>,
}

impl Poly3 {
    pub fn zero() -> Self {
        Poly3::default()
    }

    pub fn add_term(&mut self, powers: [u8; 3], coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        *self.terms.entry(powers).or_insert(0.0) += coeff;
    }

    pub fn add_scaled(&mut self, other: &Poly3, scale: f64) {
        for (&p, &c) in &other.terms {
            self.add_term(p, scale * c);
        }
    }

    pub fn mul(&self, other: &Poly3) -> Poly3 {
        let mut out = Poly3::zero();
        for (&pa, &ca) in &self.terms {
            for (&pb, &cb) in &other.terms {
                out.add_term([pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]], ca * cb);
            }
        }
        out
    }

    /// Partial derivative with respect to variable `axis` (0-based).
    pub fn partial(&self, axis: usize) -> Poly3 {
        let mut out = Poly3::zero();
        for (&p, &c) in &self.terms {
            if p[axis] == 0 {
                continue;
            }
            let mut q = p;
            q[axis] -= 1;
            out.add_term(q, c * f64::from(p[axis]));
        }
        out
    }

    pub fn eval_at_zero(&self) -> f64 {
        self.terms.get(&[0, 0, 0]).copied().unwrap_or(0.0)
    }

    /// Normalised Taylor coefficient for the derivative multi-index
    /// `indices` (with the `1/k!` prefactor).
    pub fn normalized_coeff(&self, indices: &[usize]) -> f64 {
        let mut d = self.clone();
        for &i in indices {
            d = d.partial(i);
        }
        let mut fact = 1.0;
        for k in 2..=indices.len() {
            fact *= k as f64;
        }
        d.eval_at_zero() / fact
    }
}

/// Expand component `j` of a hierarchy into an explicit cubic polynomial.
pub fn component_poly(h: &TaylorHierarchy, j: usize) -> Poly3 {
    let mut p = Poly3::zero();
    p.add_term([0, 0, 0], h.order0[j]);
    for m in 0..3 {
        let mut pw = [0u8; 3];
        pw[m] = 1;
        p.add_term(pw, h.order1[j][m]);
        for n in 0..3 {
            let mut pw = [0u8; 3];
            pw[m] += 1;
            pw[n] += 1;
            p.add_term(pw, h.order2[j][m][n]);
            for q in 0..3 {
                let mut pw = [0u8; 3];
                pw[m] += 1;
                pw[n] += 1;
                pw[q] += 1;
                p.add_term(pw, h.order3[j][m][n][q]);
            }
        }
    }
    p
}

/// Expand a scalar hierarchy into an explicit quadratic polynomial.
pub fn scalar_poly(rho: &ScalarHierarchy) -> Poly3 {
    let mut p = Poly3::zero();
    p.add_term([0, 0, 0], rho.s0);
    for m in 0..3 {
        let mut pw = [0u8; 3];
        pw[m] = 1;
        p.add_term(pw, rho.s1[m]);
        for n in 0..3 {
            let mut pw = [0u8; 3];
            pw[m] += 1;
            pw[n] += 1;
            p.add_term(pw, rho.s2[m][n]);
        }
    }
    p
}

/// Pointwise Lie bracket `[u, q]^j = q^i d_i u^j - u^i d_i q^j` of two
/// polynomial vector fields.
pub fn bracket_poly(u: &[Poly3; 3], q: &[Poly3; 3]) -> [Poly3; 3] {
    let mut out = [Poly3::zero(), Poly3::zero(), Poly3::zero()];
    for (j, out_j) in out.iter_mut().enumerate() {
        for i in 0..3 {
            out_j.add_scaled(&q[i].mul(&u[j].partial(i)), 1.0);
            out_j.add_scaled(&u[i].mul(&q[j].partial(i)), -1.0);
        }
    }
    out
}

/// Pointwise `-d(rho u^i)/dx^i` of a polynomial scalar and vector field.
pub fn neg_divergence_poly(u: &[Poly3; 3], rho: &Poly3) -> Poly3 {
    let mut out = Poly3::zero();
    for (i, u_i) in u.iter().enumerate() {
        out.add_scaled(&rho.mul(u_i).partial(i), -1.0);
    }
    out
}

/// Normalised Taylor coefficients (orders 0..=2) of the bracket `[u, q]`,
/// computed entirely through polynomial manipulation. The order-3 slot of
/// the result is zero, mirroring the truncation of the evolved hierarchy.
pub fn bracket_hierarchy_oracle(u: &TaylorHierarchy, q: &TaylorHierarchy) -> TaylorHierarchy {
    let up = [
        component_poly(u, 0),
        component_poly(u, 1),
        component_poly(u, 2),
    ];
    let qp = [
        component_poly(q, 0),
        component_poly(q, 1),
        component_poly(q, 2),
    ];
    let w = bracket_poly(&up, &qp);

    let mut out = TaylorHierarchy::zero();
    for j in 0..3 {
        out.order0[j] = w[j].eval_at_zero();
        for m in 0..3 {
            out.order1[j][m] = w[j].normalized_coeff(&[m]);
            for n in 0..3 {
                out.order2[j][m][n] = w[j].normalized_coeff(&[m, n]);
            }
        }
    }
    out
}

/// Normalised Taylor coefficients (orders 0..=2) of `-d(rho u^i)/dx^i`
/// through polynomial manipulation.
pub fn mass_hierarchy_oracle(u: &TaylorHierarchy, rho: &ScalarHierarchy) -> ScalarHierarchy {
    let up = [
        component_poly(u, 0),
        component_poly(u, 1),
        component_poly(u, 2),
    ];
    let d = neg_divergence_poly(&up, &scalar_poly(rho));

    let mut out = ScalarHierarchy {
        s0: d.eval_at_zero(),
        ..Default::default()
    };
    for m in 0..3 {
        out.s1[m] = d.normalized_coeff(&[m]);
        for n in 0..3 {
            out.s2[m][n] = d.normalized_coeff(&[m, n]);
        }
    }
    out
}

/// Evaluate a polynomial vector field at a point (used by bracket
/// spot-checks).
pub fn eval_field(u: &[Poly3; 3], x: &Vec3) -> Vec3 {
    let eval = |p: &Poly3| -> f64 {
        p.terms
            .iter()
            .map(|(&pw, &c)| {
                c * x[0].powi(i32::from(pw[0]))
                    * x[1].powi(i32::from(pw[1]))
                    * x[2].powi(i32::from(pw[2]))
            })
            .sum()
    };
    [eval(&u[0]), eval(&u[1]), eval(&u[2])]
}
