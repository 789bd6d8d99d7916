//! Built-in test problems and the time-marching driver.

use crate::basis::{BasisFamily, BasisSet};
use crate::config::{SatMode, SchemeConfig};
use crate::correction::{correction_term, corrected_residual, element_entropy_error};
use crate::law::Law;
use crate::mesh::Mesh;
use crate::report::{EntropyRecord, EntropyReport};
use crate::sat::{sat_contribution, BoundaryOperatorSpec};
use crate::spatial::{
    assemble_mass, Discretization, MassMatrix, MassMode, MassSolver, QuadOrders, StateField,
};
use crate::time::{compute_dt, TimeScheme};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    UnitSquare,
    UnitDisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Gaussian bump advected with speed (1,0) across the unit square.
    AdvectBump,
    /// Solid-body rotation of a bump inside the unit disk; one revolution
    /// per unit time.
    Rotation,
    /// Diagonal Burgers wave on the unit disk, shock forms before t = 0.3.
    BurgersBump,
    /// Burgers-type flux (cos u, u) on the unit disk.
    CosFlux,
}

impl Scenario {
    pub fn parse(name: &str) -> Result<Scenario> {
        match name.trim().to_ascii_lowercase().as_str() {
            "advect_bump" => Ok(Scenario::AdvectBump),
            "rotation" => Ok(Scenario::Rotation),
            "burgers_bump" => Ok(Scenario::BurgersBump),
            "cosflux" => Ok(Scenario::CosFlux),
            other => Err(Error::Config(format!("unknown scenario '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::AdvectBump => "advect_bump",
            Scenario::Rotation => "rotation",
            Scenario::BurgersBump => "burgers_bump",
            Scenario::CosFlux => "cosflux",
        }
    }

    pub fn law(&self) -> Law {
        match self {
            Scenario::AdvectBump => Law::Advection { a: 1.0, b: 0.0 },
            Scenario::Rotation => Law::Rotation,
            Scenario::BurgersBump => Law::Burgers,
            Scenario::CosFlux => Law::CosFlux,
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            Scenario::AdvectBump => Domain::UnitSquare,
            _ => Domain::UnitDisk,
        }
    }

    /// Initial data, Gaussian bumps with exponent 40.
    pub fn initial(&self, x: [f64; 2]) -> f64 {
        match self {
            Scenario::AdvectBump => {
                let r2 = (x[0] - 0.3).powi(2) + (x[1] - 0.3).powi(2);
                if r2.sqrt() < 0.25 {
                    (-40.0 * r2).exp()
                } else {
                    0.0
                }
            }
            Scenario::Rotation => (-40.0 * (x[0] * x[0] + (x[1] - 0.5).powi(2))).exp(),
            Scenario::BurgersBump => {
                (-40.0 * ((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2))).exp()
            }
            Scenario::CosFlux => (-40.0 * (x[0] * x[0] + x[1] * x[1])).exp(),
        }
    }

    pub fn default_t_end(&self) -> Option<f64> {
        match self {
            Scenario::AdvectBump => None,
            Scenario::Rotation => Some(1.0),
            Scenario::BurgersBump => Some(0.3),
            Scenario::CosFlux => Some(0.2),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub orders: QuadOrders,
    pub correction: bool,
    pub sat: BoundaryOperatorSpec,
    pub mass_mode: MassMode,
}

impl SolverOptions {
    pub fn new(law: &Law, degree: usize) -> SolverOptions {
        SolverOptions {
            orders: QuadOrders::default_for(degree, law),
            correction: true,
            sat: BoundaryOperatorSpec::default(),
            mass_mode: MassMode::Exact,
        }
    }
}

/// One mesh + basis + law bound together with a factored mass matrix.
pub struct Solver<'m> {
    pub disc: Discretization<'m>,
    pub law: Law,
    pub mass: MassMatrix,
    mass_solver: MassSolver,
    pub options: SolverOptions,
}

impl<'m> Solver<'m> {
    pub fn new(mesh: &'m Mesh, basis: BasisSet, law: Law, options: SolverOptions) -> Result<Self> {
        let disc = Discretization::new(mesh, basis, options.orders)?;
        let mass = assemble_mass(mesh, &disc.basis, options.mass_mode)?;
        let mass_solver = MassSolver::new(&mass)?;
        Ok(Solver {
            disc,
            law,
            mass,
            mass_solver,
            options,
        })
    }

    /// Initial coefficients: nodal interpolation for Lagrange, L2 projection
    /// (with the exact mass of this solver) for Bernstein.
    pub fn initial_state(&self, f: impl Fn([f64; 2]) -> f64) -> Result<StateField> {
        match self.disc.basis.family {
            BasisFamily::Lagrange => Ok(StateField::interpolate(self.disc.mesh, f)),
            BasisFamily::Bernstein => self.disc.project(&self.mass_solver, f),
        }
    }

    /// Semidiscrete right-hand side M^{-1} ( -(F + r) + SAT ).
    pub fn semidiscrete_rhs(&self, values: &[f64]) -> Result<Vec<f64>> {
        let state = StateField {
            values: values.to_vec(),
        };
        state.validate_finite()?;
        let mesh = self.disc.mesh;
        let mut rhs = vec![0.0; mesh.n_dofs()];
        for e in 0..mesh.elements.len() {
            let res = self.disc.element_residual(&self.law, e, &state)?;
            let per_dof = if self.options.correction {
                let err = element_entropy_error(&self.disc, &self.law, e, &state, &res)?;
                let local: Vec<f64> = mesh.elements[e]
                    .dofs
                    .iter()
                    .map(|&i| state.values[i])
                    .collect();
                let rep = correction_term(&self.law, &local, err);
                corrected_residual(&res, &rep)
            } else {
                res.per_dof
            };
            for (local_i, &dof) in mesh.elements[e].dofs.iter().enumerate() {
                rhs[dof] -= per_dof[local_i];
            }
        }
        let sat = sat_contribution(&self.disc, &self.law, &state, &self.options.sat)?;
        for (r, s) in rhs.iter_mut().zip(&sat) {
            *r += s;
        }
        self.mass_solver.solve(&rhs)
    }

    pub fn step(&self, state: &StateField, dt: f64, scheme: TimeScheme) -> Result<StateField> {
        let mut rhs = |values: &[f64]| self.semidiscrete_rhs(values);
        let values = scheme.step(&state.values, dt, &mut rhs)?;
        let next = StateField { values };
        next.validate_finite()?;
        Ok(next)
    }

    pub fn entropy(&self, state: &StateField) -> f64 {
        self.disc.entropy_integral(&self.law, state)
    }

    /// U^T M U; equals the integral of (U^h)^2 when the mass is exact.
    pub fn mass_energy(&self, state: &StateField) -> f64 {
        let mut mu = vec![0.0; state.values.len()];
        self.mass.matrix.matvec(&state.values, &mut mu);
        state.values.iter().zip(&mu).map(|(u, m)| u * m).sum()
    }
}

/// Entropy difference between two states on the same discretization.
pub fn entropy_change(
    d: &Discretization,
    law: &Law,
    state_t: &StateField,
    state_0: &StateField,
) -> f64 {
    d.entropy_integral(law, state_t) - d.entropy_integral(law, state_0)
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: EntropyReport,
    /// Final state, or the last valid state before a numerical abort.
    pub state: StateField,
    pub steps_completed: usize,
    pub time: f64,
    /// Message of the numerical abort, if the run did not finish cleanly.
    pub abort: Option<String>,
}

impl RunOutcome {
    pub fn aborted(&self) -> bool {
        self.abort.is_some()
    }
}

pub fn build_mesh(config: &SchemeConfig, scenario: Scenario) -> Result<Mesh> {
    if let Some(path) = &config.mesh_file {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        return Mesh::import(&text, config.degree);
    }
    match scenario.domain() {
        Domain::UnitSquare => Mesh::generate_square(config.mesh_n, config.degree),
        Domain::UnitDisk => Mesh::generate_disk(config.mesh_n, config.degree),
    }
}

pub fn solver_options(config: &SchemeConfig, law: &Law) -> Result<SolverOptions> {
    let defaults = QuadOrders::default_for(config.degree, law);
    let orders = QuadOrders {
        volume: config.volume_order.unwrap_or(defaults.volume),
        edge: config.edge_order.unwrap_or(defaults.edge),
    };
    let sat = match config.sat_mode {
        SatMode::ClosedForm => BoundaryOperatorSpec::closed_form(),
        SatMode::Quadrature => BoundaryOperatorSpec::quadrature(config.sat_order)?,
    };
    Ok(SolverOptions {
        orders,
        correction: config.correction,
        sat,
        mass_mode: config.mass_mode,
    })
}

/// Full time loop: assemble, march, record diagnostics, and write any
/// configured outputs. Numerical failures abort cleanly with the last valid
/// state preserved.
pub fn run_scenario(config: &SchemeConfig) -> Result<RunOutcome> {
    let scenario = Scenario::parse(&config.scenario)?;
    let law = scenario.law();
    let mesh = build_mesh(config, scenario)?;
    let basis = BasisSet::new(config.basis, config.degree)?;
    let options = solver_options(config, &law)?;
    let solver = Solver::new(&mesh, basis, law, options)?;

    let t_end = config.t_end.or_else(|| scenario.default_t_end());
    let max_steps = config.max_steps.unwrap_or(usize::MAX);
    if t_end.is_none() && config.max_steps.is_none() {
        return Err(Error::Config(
            "scenario has no default end time; set t_end or max_steps".into(),
        ));
    }

    let out_dir = match &config.out_dir {
        Some(dir) => {
            let path = std::path::PathBuf::from(dir);
            std::fs::create_dir_all(&path).map_err(|source| Error::Io {
                path: dir.clone(),
                source,
            })?;
            Some(path)
        }
        None => None,
    };

    let mut state = solver.initial_state(|x| scenario.initial(x))?;
    let entropy_0 = solver.entropy(&state);
    let mut report = EntropyReport::default();
    let record =
        |report: &mut EntropyReport, t: f64, s: &StateField, step: usize| -> Result<()> {
            let entropy = solver.entropy(s);
            report.push(EntropyRecord {
                time: t,
                entropy,
                entropy_change: if step == 0 { 0.0 } else { entropy - entropy_0 },
                min_u: s.min(),
                max_u: s.max(),
            })?;
            if let Some(dir) = &out_dir {
                crate::vtk::write_vtk(
                    &mesh,
                    &solver.disc.basis,
                    s,
                    &dir.join(format!("u_{step:06}.vtk")),
                )?;
            }
            Ok(())
        };

    record(&mut report, 0.0, &state, 0)?;
    let mut t = 0.0;
    let mut step = 0usize;
    let mut abort = None;
    let mut last_recorded = 0usize;
    while step < max_steps && t_end.map_or(true, |te| t < te - 1e-13) {
        let mut dt = compute_dt(config.cfl, &mesh, &state, &solver.law);
        if let Some(te) = t_end {
            dt = dt.min(te - t);
        }
        match solver.step(&state, dt, config.time_scheme) {
            Ok(next) => {
                state = next;
                t += dt;
                step += 1;
                if step % config.output_every == 0 {
                    record(&mut report, t, &state, step)?;
                    last_recorded = step;
                }
            }
            Err(e) => {
                abort = Some(format!("step {}: {e}", step + 1));
                break;
            }
        }
    }
    if step > last_recorded {
        record(&mut report, t, &state, step)?;
    }
    if let Some(dir) = &out_dir {
        report.write_csv(&dir.join("entropy.csv"))?;
    }
    Ok(RunOutcome {
        report,
        state,
        steps_completed: step,
        time: t,
        abort,
    })
}
