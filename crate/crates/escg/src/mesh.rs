//! Conformal triangulations with continuous high-order DoF layouts.
//!
//! A `Mesh` stores the coordinates of every global DoF (vertices first, then
//! edge nodes, then per-element interior nodes), the per-element DoF tables
//! in the layout of [`crate::basis::dof_multi_indices`], and the oriented
//! boundary faces. Edge DoFs are shared between neighbouring elements, which
//! is what makes the approximation space globally continuous.

use crate::basis::dof_multi_indices;
use crate::{Error, Result};
use std::collections::HashMap;

/// Affine geometry of one triangle: vertices, signed area and the constant
/// barycentric gradients.
#[derive(Debug, Clone)]
pub struct TriangleGeom {
    pub vertices: [[f64; 2]; 3],
    pub area: f64,
    pub grad_lambda: [[f64; 2]; 3],
}

impl TriangleGeom {
    pub fn new(v: [[f64; 2]; 3]) -> Result<Self> {
        let area = 0.5
            * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1])
                - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]));
        if area.abs() < 1e-14 {
            return Err(Error::Geometry(format!(
                "degenerate triangle with area {area:e}"
            )));
        }
        let d = 2.0 * area;
        let grad_lambda = [
            [(v[1][1] - v[2][1]) / d, (v[2][0] - v[1][0]) / d],
            [(v[2][1] - v[0][1]) / d, (v[0][0] - v[2][0]) / d],
            [(v[0][1] - v[1][1]) / d, (v[1][0] - v[0][0]) / d],
        ];
        Ok(TriangleGeom {
            vertices: v,
            area,
            grad_lambda,
        })
    }

    pub fn point_from_barycentric(&self, l: [f64; 3]) -> [f64; 2] {
        [
            l[0] * self.vertices[0][0] + l[1] * self.vertices[1][0] + l[2] * self.vertices[2][0],
            l[0] * self.vertices[0][1] + l[1] * self.vertices[1][1] + l[2] * self.vertices[2][1],
        ]
    }

    pub fn barycentric(&self, x: [f64; 2]) -> [f64; 3] {
        // lambda_i is affine with gradient grad_lambda[i]; anchor at vertex i.
        let mut l = [0.0; 3];
        for i in 0..3 {
            l[i] = 1.0
                + self.grad_lambda[i][0] * (x[0] - self.vertices[i][0])
                + self.grad_lambda[i][1] * (x[1] - self.vertices[i][1]);
        }
        l
    }

    /// Diameter of the inscribed circle, 4A / perimeter.
    pub fn inradius_diameter(&self) -> f64 {
        let mut per = 0.0;
        for i in 0..3 {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % 3];
            per += ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        }
        4.0 * self.area.abs() / per
    }
}

#[derive(Debug, Clone)]
pub struct Element {
    /// Global DoF indices in the reference layout order.
    pub dofs: Vec<usize>,
    /// Global vertex indices (CCW).
    pub vertices: [usize; 3],
}

#[derive(Debug, Clone)]
pub struct BoundaryFace {
    pub element: usize,
    /// Local edge k runs from local vertex k to local vertex (k+1) % 3.
    pub local_edge: usize,
    /// Outward unit normal of the owning element.
    pub normal: [f64; 2],
    pub length: f64,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub degree: usize,
    /// Coordinates of every global DoF; the first `n_vertices` are the mesh
    /// vertices.
    pub nodes: Vec<[f64; 2]>,
    pub elements: Vec<Element>,
    pub boundary_faces: Vec<BoundaryFace>,
    pub n_vertices: usize,
}

impl Mesh {
    /// Uniform triangulation of [0,1]^2: n x n cells, each split along the
    /// lower-left to upper-right diagonal. 2 n^2 triangles, (np+1)^2 DoFs.
    pub fn generate_square(n: usize, p: usize) -> Result<Mesh> {
        if n < 1 {
            return Err(Error::Config("square mesh needs n >= 1".into()));
        }
        let vid = |i: usize, j: usize| j * (n + 1) + i;
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([i as f64 / n as f64, j as f64 / n as f64]);
            }
        }
        let mut tris = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (a, b, c, d) = (
                    vid(i, j),
                    vid(i + 1, j),
                    vid(i + 1, j + 1),
                    vid(i, j + 1),
                );
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            }
        }
        Mesh::build(vertices, tris, p)
    }

    /// Concentric-ring triangulation of the unit disk: `rings` rings with 6k
    /// vertices on circle k/rings, 6 rings^2 triangles in total.
    pub fn generate_disk(rings: usize, p: usize) -> Result<Mesh> {
        if rings < 1 {
            return Err(Error::Config("disk mesh needs rings >= 1".into()));
        }
        let mut vertices = vec![[0.0, 0.0]];
        let mut ring_start = vec![0usize; rings + 1];
        for k in 1..=rings {
            ring_start[k] = vertices.len();
            let m = 6 * k;
            let r = k as f64 / rings as f64;
            for j in 0..m {
                let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                vertices.push([r * th.cos(), r * th.sin()]);
            }
        }
        let mut tris = Vec::with_capacity(6 * rings * rings);
        // innermost fan
        for j in 0..6 {
            tris.push([0, ring_start[1] + j, ring_start[1] + (j + 1) % 6]);
        }
        // zip consecutive rings by angle
        for k in 2..=rings {
            let (na, nb) = (6 * (k - 1), 6 * k);
            let (sa, sb) = (ring_start[k - 1], ring_start[k]);
            let (mut i, mut o) = (0usize, 0usize);
            while i < na || o < nb {
                let th_i = (i + 1) as f64 / na as f64;
                let th_o = (o + 1) as f64 / nb as f64;
                if o < nb && (i == na || th_o <= th_i) {
                    tris.push([sb + o % nb, sb + (o + 1) % nb, sa + i % na]);
                    o += 1;
                } else {
                    tris.push([sb + o % nb, sa + (i + 1) % na, sa + i % na]);
                    i += 1;
                }
            }
        }
        // enforce CCW orientation
        for t in &mut tris {
            let (a, b, c) = (vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            let area = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
            if area < 0.0 {
                t.swap(1, 2);
            }
        }
        Mesh::build(vertices, tris, p)
    }

    /// Parse the ASCII mesh format: `nv nt`, nv lines `x y`, nt lines
    /// `i j k` (0-based, counter-clockwise); `#` starts a comment line.
    pub fn import(text: &str, p: usize) -> Result<Mesh> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| Error::MeshFormat {
                line: 0,
                message: "empty mesh document".into(),
            })?;
        let mut it = header.split_whitespace();
        let parse_count = |tok: Option<&str>, what: &str, line: usize| -> Result<usize> {
            tok.ok_or_else(|| Error::MeshFormat {
                line,
                message: format!("missing {what}"),
            })?
            .parse()
            .map_err(|_| Error::MeshFormat {
                line,
                message: format!("invalid {what}"),
            })
        };
        let nv = parse_count(it.next(), "vertex count", line_no)?;
        let nt = parse_count(it.next(), "triangle count", line_no)?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = lines.next().ok_or_else(|| Error::MeshFormat {
                line: line_no,
                message: format!("expected {nv} vertex lines"),
            })?;
            let mut toks = l.split_whitespace();
            let mut coord = [0.0f64; 2];
            for c in coord.iter_mut() {
                *c = toks
                    .next()
                    .ok_or_else(|| Error::MeshFormat {
                        line: ln,
                        message: "vertex line needs two coordinates".into(),
                    })?
                    .parse()
                    .map_err(|_| Error::MeshFormat {
                        line: ln,
                        message: "invalid vertex coordinate".into(),
                    })?;
            }
            vertices.push(coord);
        }
        let mut tris = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (ln, l) = lines.next().ok_or_else(|| Error::MeshFormat {
                line: line_no,
                message: format!("expected {nt} triangle lines"),
            })?;
            let mut toks = l.split_whitespace();
            let mut tri = [0usize; 3];
            for v in tri.iter_mut() {
                *v = toks
                    .next()
                    .ok_or_else(|| Error::MeshFormat {
                        line: ln,
                        message: "triangle line needs three vertex indices".into(),
                    })?
                    .parse()
                    .map_err(|_| Error::MeshFormat {
                        line: ln,
                        message: "invalid vertex index".into(),
                    })?;
            }
            tris.push(tri);
        }
        Mesh::build(vertices, tris, p)
    }

    /// Serialize vertices and connectivity in the ASCII mesh format.
    pub fn export_ascii(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} {}\n", self.n_vertices, self.elements.len()));
        for v in &self.nodes[..self.n_vertices] {
            out.push_str(&format!("{:.16e} {:.16e}\n", v[0], v[1]));
        }
        for e in &self.elements {
            out.push_str(&format!(
                "{} {} {}\n",
                e.vertices[0], e.vertices[1], e.vertices[2]
            ));
        }
        out
    }

    /// Build the conformal DoF layout from plain vertex/triangle data.
    pub fn build(vertices: Vec<[f64; 2]>, tris: Vec<[usize; 3]>, p: usize) -> Result<Mesh> {
        if p < 1 || p > crate::basis::MAX_DEGREE {
            return Err(Error::Config(format!(
                "mesh degree {p} unsupported (valid range 1..={})",
                crate::basis::MAX_DEGREE
            )));
        }
        let nv = vertices.len();
        for (t, tri) in tris.iter().enumerate() {
            for &v in tri {
                if v >= nv {
                    return Err(Error::MeshValidation(format!(
                        "triangle {t} references vertex {v}, but only {nv} vertices exist"
                    )));
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::MeshValidation(format!(
                    "triangle {t} repeats a vertex: {tri:?}"
                )));
            }
            let (a, b, c) = (vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
            if area <= 1e-14 {
                return Err(Error::MeshValidation(format!(
                    "triangle {t} has non-positive area {area:e} (vertices must be CCW)"
                )));
            }
        }

        // Edge table: key (min, max), value (edge id, directed occurrences).
        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edge_uses: Vec<Vec<(usize, usize, bool)>> = Vec::new(); // (elem, local, forward)
        for (t, tri) in tris.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let forward = a < b;
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edge_uses.push(Vec::new());
                    edge_uses.len() - 1
                });
                edge_uses[id].push((t, k, forward));
            }
        }
        let mut edge_list: Vec<(usize, usize)> = vec![(0, 0); edge_ids.len()];
        for (&key, &id) in &edge_ids {
            edge_list[id] = key;
        }
        for (&(a, b), &id) in &edge_ids {
            let uses = &edge_uses[id];
            if uses.len() > 2 {
                return Err(Error::MeshValidation(format!(
                    "edge ({a}, {b}) is shared by {} triangles",
                    uses.len()
                )));
            }
            if uses.len() == 2 && uses[0].2 == uses[1].2 {
                return Err(Error::MeshValidation(format!(
                    "edge ({a}, {b}) is traversed twice in the same direction; \
                     inconsistent orientation"
                )));
            }
        }

        // Global numbering: vertices, then (p-1) DoFs per edge ordered from
        // the smaller vertex id, then per-element interior DoFs.
        let n_edges = edge_ids.len();
        let edge_base = nv;
        let interior_base = nv + (p - 1) * n_edges;
        let mut nodes = vertices.clone();
        nodes.resize(interior_base, [f64::NAN; 2]);
        for (id, &(a, b)) in edge_list.iter().enumerate() {
            let (pa, pb) = (vertices[a], vertices[b]);
            for m in 1..p {
                let t = m as f64 / p as f64;
                nodes[edge_base + id * (p - 1) + (m - 1)] = [
                    pa[0] + t * (pb[0] - pa[0]),
                    pa[1] + t * (pb[1] - pa[1]),
                ];
            }
        }

        let multi = dof_multi_indices(p);
        let mut elements = Vec::with_capacity(tris.len());
        let mut next_interior = interior_base;
        for tri in &tris {
            let mut dofs = Vec::with_capacity(multi.len());
            for &[a, b, c] in &multi {
                let zero_count = [a, b, c].iter().filter(|&&x| x == 0).count();
                let dof = match zero_count {
                    2 => {
                        // vertex node
                        if a == p {
                            tri[0]
                        } else if b == p {
                            tri[1]
                        } else {
                            tri[2]
                        }
                    }
                    1 => {
                        // edge node: identify the edge and its direction
                        let (va, vb, m) = if c == 0 {
                            (tri[0], tri[1], b) // on edge v0-v1, fraction b/p from v0
                        } else if a == 0 {
                            (tri[1], tri[2], c) // on edge v1-v2, fraction c/p from v1
                        } else {
                            (tri[2], tri[0], a) // on edge v2-v0, fraction a/p from v2
                        };
                        let key = (va.min(vb), va.max(vb));
                        let id = edge_ids[&key];
                        let pos = if va < vb { m } else { p - m };
                        edge_base + id * (p - 1) + (pos - 1)
                    }
                    _ => {
                        let d = next_interior;
                        next_interior += 1;
                        d
                    }
                };
                dofs.push(dof);
            }
            elements.push(Element {
                dofs,
                vertices: *tri,
            });
        }

        // interior node coordinates
        let n_interior_per_elem = (p - 1).saturating_mul(p.saturating_sub(2)) / 2;
        nodes.resize(interior_base + n_interior_per_elem * tris.len(), [0.0; 2]);
        for (e, elem) in elements.iter().enumerate() {
            let geom = [
                vertices[elem.vertices[0]],
                vertices[elem.vertices[1]],
                vertices[elem.vertices[2]],
            ];
            for (k, &[a, b, c]) in multi.iter().enumerate() {
                let dof = elem.dofs[k];
                if dof >= interior_base {
                    let (la, lb, lc) = (
                        a as f64 / p as f64,
                        b as f64 / p as f64,
                        c as f64 / p as f64,
                    );
                    nodes[dof] = [
                        la * geom[0][0] + lb * geom[1][0] + lc * geom[2][0],
                        la * geom[0][1] + lb * geom[1][1] + lc * geom[2][1],
                    ];
                }
            }
            let _ = e;
        }

        // boundary faces with outward normals
        let mut boundary_faces = Vec::new();
        for (id, uses) in edge_uses.iter().enumerate() {
            if uses.len() != 1 {
                continue;
            }
            let (elem, local, _) = uses[0];
            let (a, b) = (
                tris[elem][local],
                tris[elem][(local + 1) % 3],
            );
            let (pa, pb) = (vertices[a], vertices[b]);
            let e = [pb[0] - pa[0], pb[1] - pa[1]];
            let len = (e[0] * e[0] + e[1] * e[1]).sqrt();
            // CCW element: the interior lies left of the directed edge, so
            // the right-hand perpendicular points outward.
            boundary_faces.push(BoundaryFace {
                element: elem,
                local_edge: local,
                normal: [e[1] / len, -e[0] / len],
                length: len,
            });
            let _ = id;
        }

        Ok(Mesh {
            degree: p,
            nodes,
            elements,
            boundary_faces,
            n_vertices: nv,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.nodes.len()
    }

    pub fn geometry(&self, element: usize) -> TriangleGeom {
        let e = &self.elements[element];
        TriangleGeom::new([
            self.nodes[e.vertices[0]],
            self.nodes[e.vertices[1]],
            self.nodes[e.vertices[2]],
        ])
        .expect("mesh elements validated at construction")
    }

    /// Boundary faces with outward unit normals and lengths.
    pub fn boundary_faces_with_normals(&self) -> &[BoundaryFace] {
        &self.boundary_faces
    }

    /// Physical endpoints (start, end) of a boundary face, in the local edge
    /// direction.
    pub fn face_endpoints(&self, face: &BoundaryFace) -> ([f64; 2], [f64; 2]) {
        let e = &self.elements[face.element];
        let a = self.nodes[e.vertices[face.local_edge]];
        let b = self.nodes[e.vertices[(face.local_edge + 1) % 3]];
        (a, b)
    }

    /// Smallest inradius diameter over all elements.
    pub fn min_inradius_diameter(&self) -> f64 {
        (0..self.elements.len())
            .map(|e| self.geometry(e).inradius_diameter())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Barycentric coordinates along local edge k at parameter t in [0,1]
/// (t = 0 at local vertex k, t = 1 at local vertex (k+1) % 3).
pub fn edge_barycentric(local_edge: usize, t: f64) -> [f64; 3] {
    let mut l = [0.0; 3];
    l[local_edge] = 1.0 - t;
    l[(local_edge + 1) % 3] = t;
    l
}
