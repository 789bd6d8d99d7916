//! 1D SBP-SAT linear stability certificates.
//!
//! Continuous Lagrange elements on [0,1] give a mass matrix M and a
//! derivative matrix Q = integral of phi_j' phi_i satisfying the
//! summation-by-parts identity Q + Q^T = B with B = diag(-1, 0, ..., 0, +1).
//! For the advection speed a and a boundary penalty matrix Pi, the scheme
//! M u_t + a Q u = Pi u is energy stable exactly when the symmetric test
//! matrix (Pi + Pi^T) - a (Q + Q^T) has no positive eigenvalues.

use crate::quadrature::gauss_legendre_unit;
use crate::{Error, Result};
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct Operators1d {
    /// Polynomial degree per element.
    pub degree: usize,
    pub n_elements: usize,
    /// Global symmetric positive definite mass matrix.
    pub mass: DMatrix<f64>,
    /// Global derivative matrix, Q_ij = integral of phi_j' phi_i.
    pub derivative: DMatrix<f64>,
}

/// Eigenvalue verdict for the test matrix of one (a, Pi) pair.
#[derive(Debug, Clone)]
pub struct StabilityCertificate {
    pub test_matrix: DMatrix<f64>,
    /// Sorted ascending.
    pub eigenvalues: Vec<f64>,
    pub max_eigenvalue: f64,
    pub stable: bool,
}

pub const STABILITY_TOLERANCE: f64 = 1e-12;

/// 1D Lagrange value at reference coordinate xi in [0,1], node i of p+1
/// equispaced nodes.
fn lagrange_1d(p: usize, i: usize, xi: f64) -> f64 {
    let xi_i = i as f64 / p as f64;
    let mut v = 1.0;
    for j in 0..=p {
        if j != i {
            let xj = j as f64 / p as f64;
            v *= (xi - xj) / (xi_i - xj);
        }
    }
    v
}

fn lagrange_1d_deriv(p: usize, i: usize, xi: f64) -> f64 {
    let xi_i = i as f64 / p as f64;
    let mut sum = 0.0;
    for k in 0..=p {
        if k == i {
            continue;
        }
        let xk = k as f64 / p as f64;
        let mut term = 1.0 / (xi_i - xk);
        for j in 0..=p {
            if j != i && j != k {
                let xj = j as f64 / p as f64;
                term *= (xi - xj) / (xi_i - xj);
            }
        }
        sum += term;
    }
    sum
}

/// Assemble M and Q for continuous P_p elements on a uniform grid over
/// [0,1]. DoFs sit on the element lattice including both endpoints.
pub fn build_1d_operators(p: usize, n_elements: usize) -> Result<Operators1d> {
    if p < 1 || p > crate::basis::MAX_DEGREE {
        return Err(Error::Config(format!(
            "1D operator degree {p} unsupported (valid range 1..={})",
            crate::basis::MAX_DEGREE
        )));
    }
    if n_elements < 1 {
        return Err(Error::Config("need at least one element".into()));
    }
    let n = n_elements * p + 1;
    let h = 1.0 / n_elements as f64;
    let rule = gauss_legendre_unit(p + 1); // exact through degree 2p+1
    let mut mass = DMatrix::zeros(n, n);
    let mut derivative = DMatrix::zeros(n, n);
    for e in 0..n_elements {
        for i in 0..=p {
            for j in 0..=p {
                let (gi, gj) = (e * p + i, e * p + j);
                let m = rule.integrate(|xi| lagrange_1d(p, i, xi) * lagrange_1d(p, j, xi));
                let q = rule.integrate(|xi| lagrange_1d_deriv(p, j, xi) * lagrange_1d(p, i, xi));
                mass[(gi, gj)] += h * m;
                derivative[(gi, gj)] += q; // the h factors cancel in Q
            }
        }
    }
    Ok(Operators1d {
        degree: p,
        n_elements,
        mass,
        derivative,
    })
}

/// Largest deviation of Q + Q^T from the boundary matrix B.
pub fn boundary_identity_defect(q: &DMatrix<f64>) -> f64 {
    let n = q.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut b = 0.0;
            if i == j {
                if i == 0 {
                    b = -1.0;
                } else if i == n - 1 {
                    b = 1.0;
                }
            }
            worst = worst.max((q[(i, j)] + q[(j, i)] - b).abs());
        }
    }
    worst
}

/// Penalty matrix tau E_00, the classical inflow SAT for a > 0.
pub fn inflow_penalty(n: usize, tau: f64) -> DMatrix<f64> {
    let mut pi = DMatrix::zeros(n, n);
    pi[(0, 0)] = tau;
    pi
}

/// Evaluate the stability test matrix and its eigenvalues.
pub fn certify(
    mass: &DMatrix<f64>,
    derivative: &DMatrix<f64>,
    a: f64,
    pi: &DMatrix<f64>,
) -> Result<StabilityCertificate> {
    let n = derivative.nrows();
    if derivative.ncols() != n || pi.nrows() != n || pi.ncols() != n || mass.nrows() != n {
        return Err(Error::Config("operator shapes disagree".into()));
    }
    let defect = (mass - mass.transpose()).abs().max();
    if defect > 1e-12 {
        return Err(Error::Config(format!(
            "mass matrix is not symmetric (defect {defect:e})"
        )));
    }
    let qa = derivative * a;
    let test = (pi + pi.transpose()) - (&qa + qa.transpose());
    let eig = nalgebra::SymmetricEigen::new(test.clone());
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let max_eigenvalue = *eigenvalues.last().unwrap();
    Ok(StabilityCertificate {
        test_matrix: test,
        eigenvalues,
        max_eigenvalue,
        stable: max_eigenvalue <= STABILITY_TOLERANCE,
    })
}
