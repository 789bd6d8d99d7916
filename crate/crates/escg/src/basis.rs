//! Reference-triangle bases: equispaced Lagrange and Bernstein, degrees 1-4.
//!
//! Both families share one DoF layout (barycentric lattice points (a,b,c)/p,
//! vertices first, then edge nodes, then interior) so a single mesh serves
//! either coefficient interpretation. Lagrange uses the Silvester product
//! form, which is exact at the lattice without any matrix inversion.

use crate::mesh::TriangleGeom;
use crate::{Error, Result};

pub const MAX_DEGREE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisFamily {
    Lagrange,
    Bernstein,
}

impl BasisFamily {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "lagrange" => Ok(BasisFamily::Lagrange),
            "bernstein" => Ok(BasisFamily::Bernstein),
            other => Err(Error::Config(format!("unknown basis family '{other}'"))),
        }
    }
}

/// Multi-index lattice for degree p: vertices (p,0,0),(0,p,0),(0,0,p) first,
/// then p-1 nodes per edge (edge 0: v0->v1, edge 1: v1->v2, edge 2: v2->v0),
/// then the interior nodes.
pub fn dof_multi_indices(p: usize) -> Vec<[usize; 3]> {
    let mut idx = vec![[p, 0, 0], [0, p, 0], [0, 0, p]];
    for m in 1..p {
        idx.push([p - m, m, 0]);
    }
    for m in 1..p {
        idx.push([0, p - m, m]);
    }
    for m in 1..p {
        idx.push([m, 0, p - m]);
    }
    for a in 1..p {
        for b in 1..p.saturating_sub(a) {
            let c = p - a - b;
            if c >= 1 {
                idx.push([a, b, c]);
            }
        }
    }
    debug_assert_eq!(idx.len(), (p + 1) * (p + 2) / 2);
    idx
}

#[derive(Debug, Clone)]
pub struct BasisSet {
    pub family: BasisFamily,
    pub degree: usize,
    /// Reference DoF locations, barycentric.
    pub nodes: Vec<[f64; 3]>,
    multi: Vec<[usize; 3]>,
}

impl BasisSet {
    pub fn new(family: BasisFamily, degree: usize) -> Result<Self> {
        if degree < 1 || degree > MAX_DEGREE {
            return Err(Error::Config(format!(
                "basis degree {degree} unsupported (valid range 1..={MAX_DEGREE})"
            )));
        }
        let multi = dof_multi_indices(degree);
        let nodes = multi
            .iter()
            .map(|m| {
                [
                    m[0] as f64 / degree as f64,
                    m[1] as f64 / degree as f64,
                    m[2] as f64 / degree as f64,
                ]
            })
            .collect();
        Ok(BasisSet {
            family,
            degree,
            nodes,
            multi,
        })
    }

    pub fn cardinality(&self) -> usize {
        self.multi.len()
    }

    pub fn multi_indices(&self) -> &[[usize; 3]] {
        &self.multi
    }

    fn check_point(&self, lambda: [f64; 3]) -> Result<()> {
        let sum = lambda[0] + lambda[1] + lambda[2];
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "barycentric coordinates sum to {sum}, not 1"
            )));
        }
        if lambda.iter().any(|&l| l < -1e-12) {
            return Err(Error::Domain(format!(
                "point {lambda:?} lies outside the reference triangle"
            )));
        }
        Ok(())
    }

    /// Values of all basis functions at a validated barycentric point.
    pub fn eval(&self, lambda: [f64; 3]) -> Result<Vec<f64>> {
        self.check_point(lambda)?;
        Ok(self.eval_unchecked(lambda))
    }

    pub fn eval_unchecked(&self, lambda: [f64; 3]) -> Vec<f64> {
        match self.family {
            BasisFamily::Bernstein => self
                .multi
                .iter()
                .map(|&[a, b, c]| {
                    trinomial(self.degree, a, b, c)
                        * powi(lambda[0], a)
                        * powi(lambda[1], b)
                        * powi(lambda[2], c)
                })
                .collect(),
            BasisFamily::Lagrange => self
                .multi
                .iter()
                .map(|&[a, b, c]| {
                    silvester(self.degree, a, lambda[0])
                        * silvester(self.degree, b, lambda[1])
                        * silvester(self.degree, c, lambda[2])
                })
                .collect(),
        }
    }

    /// Barycentric partial derivatives (d phi / d lambda_i) of every basis
    /// function; combine with grad lambda_i for physical gradients.
    pub fn eval_bary_gradients(&self, lambda: [f64; 3]) -> Vec<[f64; 3]> {
        match self.family {
            BasisFamily::Bernstein => self
                .multi
                .iter()
                .map(|&[a, b, c]| {
                    let coef = trinomial(self.degree, a, b, c);
                    let (l1, l2, l3) = (lambda[0], lambda[1], lambda[2]);
                    [
                        coef * dpow(l1, a) * powi(l2, b) * powi(l3, c),
                        coef * powi(l1, a) * dpow(l2, b) * powi(l3, c),
                        coef * powi(l1, a) * powi(l2, b) * dpow(l3, c),
                    ]
                })
                .collect(),
            BasisFamily::Lagrange => self
                .multi
                .iter()
                .map(|&[a, b, c]| {
                    let p = self.degree;
                    let (sa, sb, sc) = (
                        silvester(p, a, lambda[0]),
                        silvester(p, b, lambda[1]),
                        silvester(p, c, lambda[2]),
                    );
                    [
                        dsilvester(p, a, lambda[0]) * sb * sc,
                        sa * dsilvester(p, b, lambda[1]) * sc,
                        sa * sb * dsilvester(p, c, lambda[2]),
                    ]
                })
                .collect(),
        }
    }

    /// Physical-space gradients on a concrete (non-degenerate) triangle.
    pub fn eval_gradients(&self, lambda: [f64; 3], geom: &TriangleGeom) -> Result<Vec<[f64; 2]>> {
        self.check_point(lambda)?;
        Ok(self.eval_gradients_unchecked(lambda, geom))
    }

    pub fn eval_gradients_unchecked(&self, lambda: [f64; 3], geom: &TriangleGeom) -> Vec<[f64; 2]> {
        let bary = self.eval_bary_gradients(lambda);
        bary.iter()
            .map(|d| {
                let mut g = [0.0; 2];
                for i in 0..3 {
                    g[0] += d[i] * geom.grad_lambda[i][0];
                    g[1] += d[i] * geom.grad_lambda[i][1];
                }
                g
            })
            .collect()
    }
}

fn powi(x: f64, n: usize) -> f64 {
    x.powi(n as i32)
}

/// d/dx x^n, with the n = 0 case yielding 0.
fn dpow(x: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * x.powi(n as i32 - 1)
    }
}

fn trinomial(p: usize, a: usize, b: usize, c: usize) -> f64 {
    fn fact(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }
    fact(p) / (fact(a) * fact(b) * fact(c))
}

/// Silvester factor P_m(t) = prod_{r=0}^{m-1} (p t - r) / (m - r).
fn silvester(p: usize, m: usize, t: f64) -> f64 {
    let mut v = 1.0;
    for r in 0..m {
        v *= (p as f64 * t - r as f64) / (m - r) as f64;
    }
    v
}

fn dsilvester(p: usize, m: usize, t: f64) -> f64 {
    let mut sum = 0.0;
    for s in 0..m {
        let mut term = p as f64 / (m - s) as f64;
        for r in 0..m {
            if r != s {
                term *= (p as f64 * t - r as f64) / (m - r) as f64;
            }
        }
        sum += term;
    }
    sum
}
