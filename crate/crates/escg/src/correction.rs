//! Per-element entropy error and the conservative correction term.
//!
//! The element entropy error measures how far the CG residual is from
//! elementwise entropy balance,
//!
//! ```text
//! E = quad_{dK} g(V^h) . n  -  sum_sigma V_sigma Phi_sigma^K ,
//! ```
//!
//! with the single-valued trace g(V^h).n as the numerical entropy flux (the
//! approximation is continuous, matching the f(U^h).n choice in the
//! residual). The correction r_sigma = alpha (V_sigma - mean V) cancels E
//! without touching the element sum, so conservation is preserved exactly.

use crate::law::Law;
use crate::spatial::{Discretization, ElementResidual, StateField};
use crate::Result;

/// Spread threshold below which the correction denominator is meaningless.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct CorrectionReport {
    /// Element entropy error E.
    pub entropy_error: f64,
    /// Per-DoF correction values, summing to zero.
    pub r: Vec<f64>,
    pub alpha: f64,
    pub v_mean: f64,
    /// Set when the entropy-variable spread is below the threshold; r is
    /// zero in that case.
    pub degenerate: bool,
}

/// Entropy error of one element: edge quadrature of g(V^h).n minus the
/// entropy-variable contraction of the residual.
pub fn element_entropy_error(
    d: &Discretization,
    law: &Law,
    element: usize,
    state: &StateField,
    residual: &ElementResidual,
) -> Result<f64> {
    state.check_length(d.mesh)?;
    let elem = &d.mesh.elements[element];
    let geom = d.geometry(element);
    let local: Vec<f64> = elem.dofs.iter().map(|&i| state.values[i]).collect();
    let v_local: Vec<f64> = local.iter().map(|&u| law.entropy_var(u)).collect();

    let rule = d.edge_rule();
    let mut boundary = 0.0;
    for k in 0..3 {
        let (n, len) = d.edge_normal(element, k);
        let a = geom.vertices[k];
        let b = geom.vertices[(k + 1) % 3];
        for (q, (&t, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let phis = d.edge_basis_values(k, q);
            let v: f64 = phis.iter().zip(&v_local).map(|(p, v)| p * v).sum();
            let u = law.state_from_entropy_var(v);
            let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            boundary += w * len * law.normal_entropy_flux(u, x, n);
        }
    }

    let contraction: f64 = v_local
        .iter()
        .zip(&residual.per_dof)
        .map(|(v, phi)| v * phi)
        .sum();
    Ok(boundary - contraction)
}

/// The correction r_sigma = alpha (V_sigma - mean V) with
/// alpha = E / sum (V_sigma - mean V)^2.
pub fn correction_term(law: &Law, element_states: &[f64], entropy_error: f64) -> CorrectionReport {
    let n = element_states.len() as f64;
    let v: Vec<f64> = element_states.iter().map(|&u| law.entropy_var(u)).collect();
    let v_mean = v.iter().sum::<f64>() / n;
    let mut d: Vec<f64> = v.iter().map(|vi| vi - v_mean).collect();
    // re-centre so the sum is zero at machine precision
    let drift = d.iter().sum::<f64>() / n;
    for di in &mut d {
        *di -= drift;
    }
    let denom: f64 = d.iter().map(|di| di * di).sum();
    if denom < DEGENERACY_THRESHOLD {
        return CorrectionReport {
            entropy_error,
            r: vec![0.0; element_states.len()],
            alpha: 0.0,
            v_mean,
            degenerate: true,
        };
    }
    let alpha = entropy_error / denom;
    CorrectionReport {
        entropy_error,
        r: d.iter().map(|di| alpha * di).collect(),
        alpha,
        v_mean,
        degenerate: false,
    }
}

/// Corrected per-DoF residual Phi-hat = Phi + r.
pub fn corrected_residual(residual: &ElementResidual, report: &CorrectionReport) -> Vec<f64> {
    residual
        .per_dof
        .iter()
        .zip(&report.r)
        .map(|(phi, r)| phi + r)
        .collect()
}
