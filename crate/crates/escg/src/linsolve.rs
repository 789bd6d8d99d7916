//! Sparse symmetric solves for the mass matrix.
//!
//! The mass matrix is factored once per run: reverse Cuthill-McKee brings the
//! connectivity into band form, then a banded LDL^T (no pivoting) provides
//! cheap repeated solves. LDL^T rather than Cholesky because the deliberately
//! under-integrated mass matrix need not be positive definite; a breakdown or
//! an inaccurate solve is reported, not papered over. A Jacobi-preconditioned
//! CG is kept alongside as an independent route for SPD systems.

use crate::{Error, Result};

/// Compressed sparse row matrix; duplicate triplets are summed.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> CsrMatrix {
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, v) in triplets {
            per_row[i].push((j, v));
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in &mut per_row {
            row.sort_unstable_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut v = 0.0;
                while k < row.len() && row[k].0 == j {
                    v += row[k].1;
                    k += 1;
                }
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = s;
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.col_idx[k] == j {
                return self.values[k];
            }
        }
        0.0
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Largest |A_ij - A_ji| over the stored pattern.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                worst = worst.max((self.values[k] - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Reverse Cuthill-McKee ordering: returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n;
    let degree = |i: usize| a.row_ptr[i + 1] - a.row_ptr[i];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.sort_unstable_by_key(|&i| degree(i));
    for &seed in &seeds {
        if visited[seed] {
            continue;
        }
        visited[seed] = true;
        let mut queue = std::collections::VecDeque::from([seed]);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            let mut nbrs: Vec<usize> = (a.row_ptr[i]..a.row_ptr[i + 1])
                .map(|k| a.col_idx[k])
                .filter(|&j| !visited[j])
                .collect();
            nbrs.sort_unstable_by_key(|&j| degree(j));
            for j in nbrs {
                if !visited[j] {
                    visited[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    order.reverse();
    order
}

/// Banded LDL^T factorization of a symmetric matrix under an RCM permutation.
pub struct BandedLdl {
    n: usize,
    bandwidth: usize,
    /// Strict lower band of L, row-major: entry (i, j) with i-bw <= j < i is
    /// stored at band[i * bw + (bw - (i - j))] ... offset bw - (i - j).
    band: Vec<f64>,
    diag: Vec<f64>,
    /// perm[new] = old
    perm: Vec<usize>,
}

impl BandedLdl {
    pub fn factor(a: &CsrMatrix) -> Result<BandedLdl> {
        let n = a.n;
        let perm = reverse_cuthill_mckee(a);
        let mut inv_perm = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv_perm[old] = new;
        }
        let mut bandwidth = 0usize;
        for i in 0..n {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                let j = a.col_idx[k];
                bandwidth = bandwidth.max(inv_perm[i].abs_diff(inv_perm[j]));
            }
        }
        let bw = bandwidth;
        // permuted dense band of A
        let mut band = vec![0.0f64; n * bw];
        let mut diag = vec![0.0f64; n];
        for old_i in 0..n {
            let i = inv_perm[old_i];
            for k in a.row_ptr[old_i]..a.row_ptr[old_i + 1] {
                let j = inv_perm[a.col_idx[k]];
                if j == i {
                    diag[i] = a.values[k];
                } else if j < i && i - j <= bw {
                    band[i * bw + (bw - (i - j))] = a.values[k];
                }
            }
        }
        // in-place LDL^T on the band
        let scale: f64 = diag.iter().fold(0.0f64, |m, d| m.max(d.abs())).max(1e-300);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..i {
                let mut s = band[i * bw + (bw - (i - j))];
                let kl = lo.max(j.saturating_sub(bw));
                for k in kl..j {
                    s -= band[i * bw + (bw - (i - k))]
                        * diag[k]
                        * band[j * bw + (bw - (j - k))];
                }
                if diag[j] == 0.0 {
                    return Err(Error::Numerical(format!(
                        "LDL^T breakdown: zero pivot at index {j}"
                    )));
                }
                band[i * bw + (bw - (i - j))] = s / diag[j];
            }
            let mut d = diag[i];
            for k in lo..i {
                let l = band[i * bw + (bw - (i - k))];
                d -= l * l * diag[k];
            }
            if d.abs() < 1e-300 * scale {
                return Err(Error::Numerical(format!(
                    "LDL^T breakdown: vanishing pivot at index {i}"
                )));
            }
            diag[i] = d;
        }
        Ok(BandedLdl {
            n,
            bandwidth: bw,
            band,
            diag,
            perm,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bandwidth);
        let mut y: Vec<f64> = (0..n).map(|i| b[self.perm[i]]).collect();
        // forward: L z = Pb
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = y[i];
            for k in lo..i {
                s -= self.band[i * bw + (bw - (i - k))] * y[k];
            }
            y[i] = s;
        }
        for i in 0..n {
            y[i] /= self.diag[i];
        }
        // backward: L^T x = y
        for i in (0..n).rev() {
            let hi = (i + bw + 1).min(n);
            let mut s = y[i];
            for k in (i + 1)..hi {
                s -= self.band[k * bw + (bw - (k - i))] * y[k];
            }
            y[i] = s;
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[self.perm[i]] = y[i];
        }
        x
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }
}

/// Jacobi-preconditioned conjugate gradients for SPD systems.
pub fn pcg(
    a: &CsrMatrix,
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    let n = a.n;
    let diag = a.diagonal();
    if diag.iter().any(|&d| d <= 0.0) {
        return Err(Error::Numerical(
            "PCG requires a positive diagonal".into(),
        ));
    }
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], 0));
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        a.matvec(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::Numerical(format!(
                "PCG breakdown at iteration {it}: matrix not positive definite"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rnorm <= rel_tol * bnorm {
            return Ok((x, it + 1));
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Numerical(format!(
        "PCG did not reach a relative residual of {rel_tol:e} in {max_iter} iterations"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, &t)
    }

    #[test]
    fn csr_sums_duplicates_and_multiplies() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.0), (0, 1, 1.0), (1, 1, 4.0)]);
        assert_eq!(a.nnz(), 3);
        let mut y = vec![0.0; 2];
        a.matvec(&[1.0, 1.0], &mut y);
        assert_eq!(y, vec![4.0, 4.0]);
        assert_eq!(a.get(1, 0), 0.0);
    }

    #[test]
    fn ldl_solves_match_pcg_on_spd_systems() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
        let n = 60;
        let a = laplacian_1d(n);
        let ldl = BandedLdl::factor(&a).unwrap();
        for _ in 0..5 {
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x1 = ldl.solve(&b);
            let (x2, _) = pcg(&a, &b, 1e-14, 10 * n).unwrap();
            let mut r = vec![0.0; n];
            a.matvec(&x1, &mut r);
            let res: f64 = r
                .iter()
                .zip(&b)
                .map(|(ri, bi)| (ri - bi).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-10);
            for i in 0..n {
                assert!((x1[i] - x2[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ldl_handles_an_indefinite_matrix() {
        // symmetric indefinite but factorizable without pivoting
        let a = CsrMatrix::from_triplets(
            3,
            &[
                (0, 0, 2.0),
                (1, 1, -1.0),
                (2, 2, 3.0),
                (0, 1, 0.5),
                (1, 0, 0.5),
            ],
        );
        let ldl = BandedLdl::factor(&a).unwrap();
        let b = vec![1.0, 2.0, 3.0];
        let x = ldl.solve(&b);
        let mut r = vec![0.0; 3];
        a.matvec(&x, &mut r);
        for i in 0..3 {
            assert!((r[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rcm_reduces_bandwidth_of_a_shuffled_chain() {
        // chain graph with scrambled labels has large natural bandwidth
        let n = 40;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let mut label: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            label.swap(i, j);
        }
        let mut t = Vec::new();
        for i in 0..n {
            t.push((label[i], label[i], 2.0));
            if i + 1 < n {
                t.push((label[i], label[i + 1], -1.0));
                t.push((label[i + 1], label[i], -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, &t);
        let ldl = BandedLdl::factor(&a).unwrap();
        assert!(ldl.bandwidth() <= 2, "bandwidth {}", ldl.bandwidth());
    }

    #[test]
    fn pcg_reports_indefiniteness() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (1, 1, -1.0)]);
        assert!(pcg(&a, &[1.0, 1.0], 1e-12, 100).is_err());
    }
}
