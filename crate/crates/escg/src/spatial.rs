//! Continuous-Galerkin spatial operators: element residuals, global
//! right-hand side, and mass matrices.
//!
//! The element residual is kept in surface-minus-volume form,
//!
//! ```text
//! Phi_sigma^K = sum_{edges} quad( phi_sigma f(U^h) . n ) - quad( grad phi_sigma . f(U^h) )
//! ```
//!
//! with the single-valued trace f(U^h).n on element boundaries (the
//! approximation is globally continuous, so no numerical flux is needed).
//! Basis values at quadrature points are tabulated once per discretization;
//! per-element work is gathers, flux evaluations and scatters.

use crate::basis::BasisSet;
use crate::law::Law;
use crate::linsolve::{BandedLdl, CsrMatrix};
use crate::mesh::{edge_barycentric, Mesh, TriangleGeom};
use crate::quadrature::{reduced_triangle_rule, segment_rule, triangle_rule, SegmentRule, TriangleRule};
use crate::{Error, Result};

/// Global DoF coefficient vector at one time level.
#[derive(Debug, Clone)]
pub struct StateField {
    pub values: Vec<f64>,
}

impl StateField {
    pub fn zeros(mesh: &Mesh) -> StateField {
        StateField {
            values: vec![0.0; mesh.n_dofs()],
        }
    }

    /// Nodal interpolation: coefficient = function value at the DoF location.
    /// Exact interpolation for Lagrange; for Bernstein prefer an L2
    /// projection (see [`Discretization::project`]).
    pub fn interpolate(mesh: &Mesh, f: impl Fn([f64; 2]) -> f64) -> StateField {
        StateField {
            values: mesh.nodes.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn check_length(&self, mesh: &Mesh) -> Result<()> {
        if self.values.len() != mesh.n_dofs() {
            return Err(Error::Numerical(format!(
                "state has {} coefficients, mesh has {} DoFs",
                self.values.len(),
                mesh.n_dofs()
            )));
        }
        Ok(())
    }

    /// Hard runtime check: every coefficient finite.
    pub fn validate_finite(&self) -> Result<()> {
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite state coefficient at DoF {i}"
            )));
        }
        Ok(())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Per-element residual: the per-DoF split and the total boundary flux.
#[derive(Debug, Clone)]
pub struct ElementResidual {
    pub per_dof: Vec<f64>,
    /// Total residual, the quadrature of f(U^h).n over the element boundary.
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadOrders {
    pub volume: usize,
    pub edge: usize,
}

impl QuadOrders {
    /// Default orders 2p+1 capped at the supported maximum 8; the cos-flux
    /// law always integrates at order 8 (its flux is not polynomial).
    pub fn default_for(p: usize, law: &Law) -> QuadOrders {
        let base = (2 * p + 1).min(8);
        match law {
            Law::CosFlux => QuadOrders { volume: 8, edge: 8 },
            _ => QuadOrders {
                volume: base,
                edge: base,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassMode {
    Exact,
    UnderIntegrated,
}

impl MassMode {
    pub fn parse(s: &str) -> Result<MassMode> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(MassMode::Exact),
            "under_integrated" | "under-integrated" => Ok(MassMode::UnderIntegrated),
            other => Err(Error::Config(format!("unknown mass mode '{other}'"))),
        }
    }
}

/// Sparse symmetric mass matrix over global DoFs.
#[derive(Debug, Clone)]
pub struct MassMatrix {
    pub matrix: CsrMatrix,
    pub mode: MassMode,
    /// Quadrature order used in assembly.
    pub order: usize,
}

/// Tabulated spatial discretization bound to one mesh and basis.
pub struct Discretization<'m> {
    pub mesh: &'m Mesh,
    pub basis: BasisSet,
    pub orders: QuadOrders,
    vol_rule: TriangleRule,
    /// Basis values at volume points, [q][dof].
    vol_basis: Vec<Vec<f64>>,
    /// Barycentric basis gradients at volume points, [q][dof].
    vol_dbasis: Vec<Vec<[f64; 3]>>,
    edge_rule: SegmentRule,
    /// Basis values on local edge k at edge-rule points, [k][q][dof].
    edge_basis: [Vec<Vec<f64>>; 3],
    geoms: Vec<TriangleGeom>,
    /// Outward unit normal and length of each local edge, [elem][k].
    edge_normals: Vec<[([f64; 2], f64); 3]>,
}

impl<'m> Discretization<'m> {
    pub fn new(mesh: &'m Mesh, basis: BasisSet, orders: QuadOrders) -> Result<Self> {
        if basis.degree != mesh.degree {
            return Err(Error::Config(format!(
                "basis degree {} does not match mesh degree {}",
                basis.degree, mesh.degree
            )));
        }
        let vol_rule = triangle_rule(orders.volume)?;
        let edge_rule = segment_rule(orders.edge)?;
        let vol_basis: Vec<Vec<f64>> = vol_rule
            .points
            .iter()
            .map(|&l| basis.eval_unchecked(l))
            .collect();
        let vol_dbasis: Vec<Vec<[f64; 3]>> = vol_rule
            .points
            .iter()
            .map(|&l| basis.eval_bary_gradients(l))
            .collect();
        let edge_basis = [0, 1, 2].map(|k| {
            edge_rule
                .points
                .iter()
                .map(|&t| basis.eval_unchecked(edge_barycentric(k, t)))
                .collect()
        });
        let geoms: Vec<TriangleGeom> = (0..mesh.elements.len()).map(|e| mesh.geometry(e)).collect();
        let edge_normals = geoms
            .iter()
            .map(|g| {
                [0, 1, 2].map(|k| {
                    let a = g.vertices[k];
                    let b = g.vertices[(k + 1) % 3];
                    let e = [b[0] - a[0], b[1] - a[1]];
                    let len = (e[0] * e[0] + e[1] * e[1]).sqrt();
                    ([e[1] / len, -e[0] / len], len)
                })
            })
            .collect();
        Ok(Discretization {
            mesh,
            basis,
            orders,
            vol_rule,
            vol_basis,
            vol_dbasis,
            edge_rule,
            edge_basis,
            geoms,
            edge_normals,
        })
    }

    pub fn geometry(&self, element: usize) -> &TriangleGeom {
        &self.geoms[element]
    }

    pub fn edge_rule(&self) -> &SegmentRule {
        &self.edge_rule
    }

    pub fn volume_rule(&self) -> &TriangleRule {
        &self.vol_rule
    }

    /// Basis values on local edge `k` at edge-rule point `q`.
    pub fn edge_basis_values(&self, k: usize, q: usize) -> &[f64] {
        &self.edge_basis[k][q]
    }

    pub fn edge_normal(&self, element: usize, k: usize) -> ([f64; 2], f64) {
        self.edge_normals[element][k]
    }

    fn gather(&self, element: usize, state: &StateField) -> Vec<f64> {
        self.mesh.elements[element]
            .dofs
            .iter()
            .map(|&d| state.values[d])
            .collect()
    }

    /// CG element residual in surface-minus-volume form.
    pub fn element_residual(
        &self,
        law: &Law,
        element: usize,
        state: &StateField,
    ) -> Result<ElementResidual> {
        state.check_length(self.mesh)?;
        let geom = &self.geoms[element];
        let local = self.gather(element, state);
        let ndof = local.len();
        let mut per_dof = vec![0.0; ndof];
        let mut total = 0.0;

        // edge terms
        for k in 0..3 {
            let (n, len) = self.edge_normals[element][k];
            let a = geom.vertices[k];
            let b = geom.vertices[(k + 1) % 3];
            for (q, (&t, &w)) in self
                .edge_rule
                .points
                .iter()
                .zip(&self.edge_rule.weights)
                .enumerate()
            {
                let phis = &self.edge_basis[k][q];
                let u: f64 = phis.iter().zip(&local).map(|(p, u)| p * u).sum();
                let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                let fn_ = law.normal_flux(u, x, n);
                let scale = w * len * fn_;
                for (r, phi) in per_dof.iter_mut().zip(phis) {
                    *r += scale * phi;
                }
                total += w * len * fn_;
            }
        }

        // volume terms
        let two_area = 2.0 * geom.area;
        for (q, (&w, point)) in self
            .vol_rule
            .weights
            .iter()
            .zip(&self.vol_rule.points)
            .enumerate()
        {
            let phis = &self.vol_basis[q];
            let u: f64 = phis.iter().zip(&local).map(|(p, u)| p * u).sum();
            let x = geom.point_from_barycentric(*point);
            let f = law.flux(u, x);
            let scale = w * two_area;
            for (r, d) in per_dof.iter_mut().zip(&self.vol_dbasis[q]) {
                let gx = d[0] * geom.grad_lambda[0][0]
                    + d[1] * geom.grad_lambda[1][0]
                    + d[2] * geom.grad_lambda[2][0];
                let gy = d[0] * geom.grad_lambda[0][1]
                    + d[1] * geom.grad_lambda[1][1]
                    + d[2] * geom.grad_lambda[2][1];
                *r -= scale * (gx * f[0] + gy * f[1]);
            }
        }

        if per_dof.iter().any(|v| !v.is_finite()) || !total.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite residual in element {element}"
            )));
        }
        Ok(ElementResidual { per_dof, total })
    }

    /// Interior part of the assembled right-hand side, F_sigma = sum over
    /// elements of Phi_sigma^K. Accumulation runs in element-index order.
    pub fn assemble_rhs(&self, law: &Law, state: &StateField) -> Result<Vec<f64>> {
        state.check_length(self.mesh)?;
        let mut rhs = vec![0.0; self.mesh.n_dofs()];
        for e in 0..self.mesh.elements.len() {
            let res = self.element_residual(law, e, state)?;
            for (local, &dof) in self.mesh.elements[e].dofs.iter().enumerate() {
                rhs[dof] += res.per_dof[local];
            }
        }
        Ok(rhs)
    }

    /// Quadrature of eta(U^h) over the whole mesh.
    pub fn entropy_integral(&self, law: &Law, state: &StateField) -> f64 {
        let mut total = 0.0;
        for (e, geom) in self.geoms.iter().enumerate() {
            let local = self.gather(e, state);
            let two_area = 2.0 * geom.area;
            for (q, &w) in self.vol_rule.weights.iter().enumerate() {
                let u: f64 = self.vol_basis[q]
                    .iter()
                    .zip(&local)
                    .map(|(p, u)| p * u)
                    .sum();
                total += w * two_area * law.entropy(u);
            }
        }
        total
    }

    /// Quadrature of a scalar DoF functional: b_sigma = integral of
    /// phi_sigma * f(x) over the mesh, used for L2 projections.
    pub fn load_vector(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        let mut b = vec![0.0; self.mesh.n_dofs()];
        for (e, geom) in self.geoms.iter().enumerate() {
            let two_area = 2.0 * geom.area;
            for (q, point) in self.vol_rule.points.iter().enumerate() {
                let x = geom.point_from_barycentric(*point);
                let scale = self.vol_rule.weights[q] * two_area * f(x);
                for (local, &dof) in self.mesh.elements[e].dofs.iter().enumerate() {
                    b[dof] += scale * self.vol_basis[q][local];
                }
            }
        }
        b
    }

    /// L2 projection of a function onto the approximation space.
    pub fn project(&self, solver: &MassSolver, f: impl Fn([f64; 2]) -> f64) -> Result<StateField> {
        let b = self.load_vector(f);
        Ok(StateField {
            values: solver.solve(&b)?,
        })
    }
}

/// Assemble the global mass matrix. Exact mode uses order min(2p+1, 8)
/// (>= 2p, so all quadratic products are integrated exactly); the
/// under-integrated mode uses the minimal-point rule of order 2p-1, which
/// misses only the highest-degree products.
pub fn assemble_mass(mesh: &Mesh, basis: &BasisSet, mode: MassMode) -> Result<MassMatrix> {
    let p = basis.degree;
    let (rule, order) = match mode {
        MassMode::Exact => {
            let order = (2 * p + 1).min(8);
            (triangle_rule(order)?, order)
        }
        MassMode::UnderIntegrated => {
            let order = 2 * p - 1;
            (reduced_triangle_rule(order)?, order)
        }
    };
    let ndof = basis.cardinality();
    let tab: Vec<Vec<f64>> = rule
        .points
        .iter()
        .map(|&l| basis.eval_unchecked(l))
        .collect();
    let mut triplets = Vec::with_capacity(mesh.elements.len() * ndof * ndof);
    for e in 0..mesh.elements.len() {
        let geom = mesh.geometry(e);
        let two_area = 2.0 * geom.area;
        let dofs = &mesh.elements[e].dofs;
        let mut local = vec![0.0; ndof * ndof];
        for (q, &w) in rule.weights.iter().enumerate() {
            let phis = &tab[q];
            let scale = w * two_area;
            for i in 0..ndof {
                let pi = phis[i] * scale;
                for j in 0..ndof {
                    local[i * ndof + j] += pi * phis[j];
                }
            }
        }
        for i in 0..ndof {
            for j in 0..ndof {
                triplets.push((dofs[i], dofs[j], local[i * ndof + j]));
            }
        }
    }
    Ok(MassMatrix {
        matrix: CsrMatrix::from_triplets(mesh.n_dofs(), &triplets),
        mode,
        order,
    })
}

/// Factored mass matrix with a residual-checked solve.
pub struct MassSolver {
    matrix: CsrMatrix,
    ldl: BandedLdl,
}

pub const MASS_SOLVE_REL_TOL: f64 = 1e-12;

impl MassSolver {
    pub fn new(mass: &MassMatrix) -> Result<MassSolver> {
        let ldl = BandedLdl::factor(&mass.matrix)?;
        Ok(MassSolver {
            matrix: mass.matrix.clone(),
            ldl,
        })
    }

    /// Solve M x = b to a relative residual of 1e-12, with one step of
    /// iterative refinement before giving up.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut x = self.ldl.solve(b);
        if bnorm == 0.0 {
            return Ok(x);
        }
        let mut r = vec![0.0; b.len()];
        for _ in 0..2 {
            self.matrix.matvec(&x, &mut r);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri = bi - *ri;
            }
            let rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if rnorm <= MASS_SOLVE_REL_TOL * bnorm {
                return Ok(x);
            }
            let dx = self.ldl.solve(&r);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
        }
        self.matrix.matvec(&x, &mut r);
        let rnorm = r
            .iter()
            .zip(b)
            .map(|(ri, bi)| (ri - bi).powi(2))
            .sum::<f64>()
            .sqrt();
        if rnorm <= MASS_SOLVE_REL_TOL * bnorm {
            Ok(x)
        } else {
            Err(Error::Numerical(format!(
                "mass solve stalled at relative residual {:e} (tolerance {MASS_SOLVE_REL_TOL:e})",
                rnorm / bnorm
            )))
        }
    }
}
