//! Entropy-stable continuous Galerkin (CG) solver for scalar hyperbolic
//! conservation laws on unstructured triangular meshes.
//!
//! The pieces, bottom up:
//!
//! * [`quadrature`] / [`basis`] — reference-triangle rules and Lagrange /
//!   Bernstein bases up to degree 4,
//! * [`mesh`] — conformal triangulations with continuous high-order DoF
//!   layouts and oriented boundary faces,
//! * [`law`] — scalar conservation laws with their entropy machinery
//!   (entropy pair, entropy variable, flux potential),
//! * [`spatial`] — CG residuals, global right-hand side, and the (exact or
//!   deliberately under-integrated) mass matrix,
//! * [`correction`] — the per-element entropy error and the conservative
//!   correction term that cancels it,
//! * [`sat`] — the nonlinear weak-boundary operator (mean-value flux factor,
//!   clamped penalty) and boundary term assembly,
//! * [`time`] — SSP Runge-Kutta integrators and CFL step control,
//! * [`certify`] — 1D SBP-SAT linear stability certificates,
//! * [`config`] / [`scenario`] / [`report`] / [`vtk`] — run configuration,
//!   built-in test problems, entropy diagnostics, CSV and legacy-VTK output.

pub mod basis;
pub mod certify;
pub mod config;
pub mod correction;
pub mod law;
pub mod linsolve;
pub mod mesh;
pub mod quadrature;
pub mod report;
pub mod sat;
pub mod scenario;
pub mod spatial;
pub mod time;
pub mod vtk;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad configuration value (unknown law, unsupported order, ...).
    #[error("configuration error: {0}")]
    Config(String),
    /// Evaluation point outside the admissible domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Degenerate or inconsistent geometry.
    #[error("geometry error: {0}")]
    Geometry(String),
    /// Mesh document could not be parsed.
    #[error("mesh parse error at line {line}: {message}")]
    MeshFormat { line: usize, message: String },
    /// Mesh is structurally invalid (non-conformal, inverted, ...).
    #[error("mesh validation error: {0}")]
    MeshValidation(String),
    /// A numerical procedure failed (non-finite values, solver breakdown).
    #[error("numerical error: {0}")]
    Numerical(String),
    /// I/O failure with path context.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
