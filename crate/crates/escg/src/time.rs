//! Explicit SSP Runge-Kutta schemes and CFL step control.

use crate::law::Law;
use crate::mesh::Mesh;
use crate::spatial::StateField;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeScheme {
    /// Shu-Osher three-stage, third order.
    SspRk33,
    /// Spiteri-Ruuth five-stage, fourth order.
    SspRk54,
    /// Classical four-stage Runge-Kutta.
    Rk44,
}

impl TimeScheme {
    pub fn parse(name: &str) -> Result<TimeScheme> {
        match name.trim().to_ascii_lowercase().as_str() {
            "ssprk33" => Ok(TimeScheme::SspRk33),
            "ssprk54" => Ok(TimeScheme::SspRk54),
            "rk44" => Ok(TimeScheme::Rk44),
            other => Err(Error::Config(format!("unknown time scheme '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TimeScheme::SspRk33 => "ssprk33",
            TimeScheme::SspRk54 => "ssprk54",
            TimeScheme::Rk44 => "rk44",
        }
    }

    pub fn order(&self) -> usize {
        match self {
            TimeScheme::SspRk33 => 3,
            TimeScheme::SspRk54 | TimeScheme::Rk44 => 4,
        }
    }

    /// Advance one step; `rhs` evaluates the semidiscrete right-hand side
    /// for an arbitrary stage state.
    ///
    /// Stages are tracked as increments over the input state, so a zero
    /// right-hand side reproduces the state bitwise.
    pub fn step(
        &self,
        state: &[f64],
        dt: f64,
        rhs: &mut dyn FnMut(&[f64]) -> Result<Vec<f64>>,
    ) -> Result<Vec<f64>> {
        let n = state.len();
        let shifted = |d: &[f64]| -> Vec<f64> { (0..n).map(|i| state[i] + d[i]).collect() };
        let out: Vec<f64> = match self {
            TimeScheme::SspRk33 => {
                let k0 = rhs(state)?;
                let d1: Vec<f64> = (0..n).map(|i| dt * k0[i]).collect();
                let k1 = rhs(&shifted(&d1))?;
                let d2: Vec<f64> = (0..n).map(|i| 0.25 * (d1[i] + dt * k1[i])).collect();
                let k2 = rhs(&shifted(&d2))?;
                (0..n)
                    .map(|i| state[i] + (2.0 / 3.0) * (d2[i] + dt * k2[i]))
                    .collect()
            }
            TimeScheme::SspRk54 => {
                let k0 = rhs(state)?;
                let d1: Vec<f64> = (0..n).map(|i| 0.391752226571890 * dt * k0[i]).collect();
                let k1 = rhs(&shifted(&d1))?;
                let d2: Vec<f64> = (0..n)
                    .map(|i| 0.555629506348765 * d1[i] + 0.368410593050371 * dt * k1[i])
                    .collect();
                let k2 = rhs(&shifted(&d2))?;
                let d3: Vec<f64> = (0..n)
                    .map(|i| 0.379898148511597 * d2[i] + 0.251891774271694 * dt * k2[i])
                    .collect();
                let k3 = rhs(&shifted(&d3))?;
                let d4: Vec<f64> = (0..n)
                    .map(|i| 0.821920045606868 * d3[i] + 0.544974750228521 * dt * k3[i])
                    .collect();
                let k4 = rhs(&shifted(&d4))?;
                (0..n)
                    .map(|i| {
                        state[i]
                            + 0.517231671970585 * d2[i]
                            + 0.096059710526147 * d3[i]
                            + 0.063692468666290 * dt * k3[i]
                            + 0.386708617503269 * d4[i]
                            + 0.226007483236906 * dt * k4[i]
                    })
                    .collect()
            }
            TimeScheme::Rk44 => {
                let k1 = rhs(state)?;
                let d: Vec<f64> = (0..n).map(|i| 0.5 * dt * k1[i]).collect();
                let k2 = rhs(&shifted(&d))?;
                let d: Vec<f64> = (0..n).map(|i| 0.5 * dt * k2[i]).collect();
                let k3 = rhs(&shifted(&d))?;
                let d: Vec<f64> = (0..n).map(|i| dt * k3[i]).collect();
                let k4 = rhs(&shifted(&d))?;
                (0..n)
                    .map(|i| {
                        state[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                    })
                    .collect()
            }
        };
        if let Some(i) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite stage state at DoF {i} after a {} step",
                self.name()
            )));
        }
        Ok(out)
    }
}

/// CFL time step: dt = cfl * h_min / lambda_max with h_min the smallest
/// element inradius diameter and lambda_max the largest |f'(U_sigma)| over
/// the DoFs, floored at 1e-12.
pub fn compute_dt(cfl: f64, mesh: &Mesh, state: &StateField, law: &Law) -> f64 {
    let h_min = mesh.min_inradius_diameter();
    let mut lambda = 0.0f64;
    for (i, &u) in state.values.iter().enumerate() {
        lambda = lambda.max(law.wave_speed(u, mesh.nodes[i]));
    }
    cfl * h_min / lambda.max(1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;

    fn scalar_step(scheme: TimeScheme, lambda: f64, dt: f64, u0: f64) -> f64 {
        let mut rhs = |u: &[f64]| Ok(vec![lambda * u[0]]);
        scheme.step(&[u0], dt, &mut rhs).unwrap()[0]
    }

    #[test]
    fn zero_rhs_keeps_the_state_bitwise() {
        for scheme in [TimeScheme::SspRk33, TimeScheme::SspRk54, TimeScheme::Rk44] {
            let state = vec![0.123456789, -9.87, 1e-300];
            let mut rhs = |u: &[f64]| Ok(vec![0.0; u.len()]);
            let out = scheme.step(&state, 0.37, &mut rhs).unwrap();
            assert_eq!(out, state);
        }
    }

    #[test]
    fn ssprk33_reproduces_the_cubic_taylor_polynomial() {
        let dt = 0.1;
        let got = scalar_step(TimeScheme::SspRk33, -1.0, dt, 1.0);
        let taylor = 1.0 - dt + dt * dt / 2.0 - dt * dt * dt / 6.0;
        assert!((got - taylor).abs() < 1e-16, "{got} vs {taylor}");
    }

    #[test]
    fn rk44_reproduces_the_quartic_taylor_polynomial() {
        let dt = 0.2;
        let got = scalar_step(TimeScheme::Rk44, -1.0, dt, 1.0);
        let taylor = 1.0 - dt + dt.powi(2) / 2.0 - dt.powi(3) / 6.0 + dt.powi(4) / 24.0;
        assert!((got - taylor).abs() < 1e-15);
    }

    #[test]
    fn stage_weights_match_the_exponential_to_formal_order() {
        // Taylor remainder check on u' = -u: the one-step error against the
        // degree-p Taylor polynomial must shrink like dt^(p+1).
        for scheme in [TimeScheme::SspRk33, TimeScheme::SspRk54, TimeScheme::Rk44] {
            let p = scheme.order() as i32;
            for dt in [0.1, 0.05] {
                let got = scalar_step(scheme, -1.0, dt, 1.0);
                let mut taylor = 0.0;
                let mut term = 1.0;
                for k in 0..=p {
                    if k > 0 {
                        term *= -dt / k as f64;
                    }
                    taylor += term;
                }
                assert!(
                    (got - taylor).abs() <= 2.0 * dt.powi(p + 1),
                    "{}: remainder {:e} at dt={dt}",
                    scheme.name(),
                    (got - taylor).abs()
                );
            }
        }
    }

    #[test]
    fn observed_convergence_orders() {
        // u' = -u to t = 1, halving dt
        for scheme in [TimeScheme::SspRk33, TimeScheme::SspRk54, TimeScheme::Rk44] {
            let errs: Vec<f64> = [0.1f64, 0.05, 0.025]
                .iter()
                .map(|&dt| {
                    let steps = (1.0 / dt).round() as usize;
                    let mut u = vec![1.0];
                    let mut rhs = |x: &[f64]| Ok(vec![-x[0]]);
                    for _ in 0..steps {
                        u = scheme.step(&u, dt, &mut rhs).unwrap();
                    }
                    (u[0] - (-1.0f64).exp()).abs()
                })
                .collect();
            let order = (errs[0] / errs[2]).log2() / 2.0;
            assert!(
                (order - scheme.order() as f64).abs() < 0.2,
                "{}: observed order {order}",
                scheme.name()
            );
        }
    }

    #[test]
    fn non_finite_stage_aborts_with_a_report() {
        let mut rhs = |_: &[f64]| Ok(vec![f64::INFINITY]);
        let err = TimeScheme::SspRk33.step(&[1.0], 0.1, &mut rhs);
        assert!(matches!(err, Err(Error::Numerical(_))));
    }

    #[test]
    fn cfl_step_examples() {
        let mesh = Mesh::generate_square(4, 1).unwrap();
        let h_min = mesh.min_inradius_diameter();
        // cosflux at u = 0: |f'| = |(0, 1)| = 1
        let zero = StateField::zeros(&mesh);
        let dt = compute_dt(0.5, &mesh, &zero, &Law::CosFlux);
        assert!((dt - 0.5 * h_min).abs() < 1e-15);
        // advection speed is state-independent
        let dt = compute_dt(0.3, &mesh, &zero, &Law::Advection { a: 1.0, b: 0.0 });
        assert!((dt - 0.3 * h_min).abs() < 1e-15);
        // burgers with max |U| = 2: lambda = 2 sqrt(2)
        let mut state = StateField::zeros(&mesh);
        state.values[3] = 2.0;
        state.values[5] = -1.0;
        let dt = compute_dt(1.0, &mesh, &state, &Law::Burgers);
        assert!((dt - h_min / (2.0 * 2.0f64.sqrt())).abs() < 1e-15);
    }
}
