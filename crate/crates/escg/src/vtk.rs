//! Legacy-VTK ASCII output of scalar fields.
//!
//! High-order DoFs are exported on a p-times-refined sub-triangulation of
//! each element, with the solution evaluated at the lattice points (for
//! Lagrange these are the coefficients themselves). Points are written per
//! element without dedup, which legacy VTK accepts.

use crate::basis::BasisSet;
use crate::mesh::Mesh;
use crate::spatial::StateField;
use crate::{Error, Result};
use std::io::Write;

/// Lattice of (b, c) index pairs and sub-triangle connectivity for one
/// refined element.
fn refinement(p: usize) -> (Vec<(usize, usize)>, Vec<[usize; 3]>) {
    let mut lattice = Vec::new();
    let mut id = std::collections::HashMap::new();
    for c in 0..=p {
        for b in 0..=(p - c) {
            id.insert((b, c), lattice.len());
            lattice.push((b, c));
        }
    }
    let mut cells = Vec::with_capacity(p * p);
    for c in 0..p {
        for b in 0..(p - c) {
            cells.push([id[&(b, c)], id[&(b + 1, c)], id[&(b, c + 1)]]);
            if b + c + 2 <= p {
                cells.push([id[&(b + 1, c)], id[&(b + 1, c + 1)], id[&(b, c + 1)]]);
            }
        }
    }
    (lattice, cells)
}

pub fn write_vtk(
    mesh: &Mesh,
    basis: &BasisSet,
    state: &StateField,
    path: &std::path::Path,
) -> Result<()> {
    state.check_length(mesh)?;
    let p = mesh.degree;
    let (lattice, cells) = refinement(p);
    let pts_per_elem = lattice.len();
    let n_points = mesh.elements.len() * pts_per_elem;
    let n_cells = mesh.elements.len() * cells.len();

    let io_err = |source: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = std::io::BufWriter::new(file);
    let mut put = |s: String| w.write_all(s.as_bytes()).map_err(io_err);

    put("# vtk DataFile Version 2.0\n".into())?;
    put("escg scalar field\n".into())?;
    put("ASCII\n".into())?;
    put("DATASET UNSTRUCTURED_GRID\n".into())?;
    put(format!("POINTS {n_points} double\n"))?;

    let mut values = Vec::with_capacity(n_points);
    for e in 0..mesh.elements.len() {
        let geom = mesh.geometry(e);
        let local: Vec<f64> = mesh.elements[e]
            .dofs
            .iter()
            .map(|&i| state.values[i])
            .collect();
        for &(b, c) in &lattice {
            let l = [
                (p - b - c) as f64 / p as f64,
                b as f64 / p as f64,
                c as f64 / p as f64,
            ];
            let x = geom.point_from_barycentric(l);
            put(format!("{:.16e} {:.16e} 0.0\n", x[0], x[1]))?;
            let phis = basis.eval_unchecked(l);
            values.push(phis.iter().zip(&local).map(|(p, u)| p * u).sum::<f64>());
        }
    }

    put(format!("CELLS {n_cells} {}\n", 4 * n_cells))?;
    for e in 0..mesh.elements.len() {
        let base = e * pts_per_elem;
        for cell in &cells {
            put(format!(
                "3 {} {} {}\n",
                base + cell[0],
                base + cell[1],
                base + cell[2]
            ))?;
        }
    }
    put(format!("CELL_TYPES {n_cells}\n"))?;
    for _ in 0..n_cells {
        put("5\n".into())?;
    }
    put(format!("POINT_DATA {n_points}\n"))?;
    put("SCALARS u double 1\n".into())?;
    put("LOOKUP_TABLE default\n".into())?;
    for v in values {
        put(format!("{v:.16e}\n"))?;
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisFamily;

    #[test]
    fn p1_single_triangle_layout() {
        let mesh = Mesh::build(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![[0, 1, 2]],
            1,
        )
        .unwrap();
        let basis = BasisSet::new(BasisFamily::Lagrange, 1).unwrap();
        let state = StateField::interpolate(&mesh, |x| x[0] + x[1]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("one.vtk");
        write_vtk(&mesh, &basis, &state, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("POINTS 3 double"));
        assert!(text.contains("CELLS 1 4"));
        assert!(text.contains("CELL_TYPES 1\n5"));
        assert!(text.contains("SCALARS u double 1"));
    }

    #[test]
    fn refined_cells_cover_each_element() {
        for p in 1..=4 {
            let (lattice, cells) = refinement(p);
            assert_eq!(lattice.len(), (p + 1) * (p + 2) / 2);
            assert_eq!(cells.len(), p * p);
        }
    }

    #[test]
    fn bernstein_values_are_evaluated_not_raw_coefficients() {
        // constant field: every exported value is that constant even though
        // the Bernstein coefficients of a constant are all equal anyway at
        // p=2; use a linear field to make the distinction visible
        let mesh = Mesh::build(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![[0, 1, 2]],
            2,
        )
        .unwrap();
        let basis = BasisSet::new(BasisFamily::Bernstein, 2).unwrap();
        // coefficients chosen so the field is x (Bernstein control values
        // of a linear function on the lattice are its nodal values)
        let state = StateField::interpolate(&mesh, |x| x[0]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lin.vtk");
        write_vtk(&mesh, &basis, &state, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("POINTS 6 double"));
        assert!(text.contains("CELLS 4"));
    }
}
