//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative factor in the numerical rank threshold `RANK_RTOL * max(rows, cols) * sigma_max`.
pub const RANK_RTOL: f64 = 1e-9;

/// Singular values (descending) with the full right singular basis.
#[derive(Debug, Clone)]
pub struct FullSvd {
    pub singular_values: Vec<f64>,
    /// Column `i` is the right singular vector of `singular_values[i]`; the trailing
    /// columns beyond `min(rows, cols)` span the remainder of the kernel.
    pub right: DMatrix<f64>,
    pub rows: usize,
    pub cols: usize,
}

impl FullSvd {
    pub fn new(a: &DMatrix<f64>) -> Self {
        let (rows, cols) = a.shape();
        let padded = if rows < cols {
            let mut p = DMatrix::zeros(cols, cols);
            p.view_mut((0, 0), (rows, cols)).copy_from(a);
            p
        } else {
            a.clone()
        };
        let svd = padded.svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
        let mut right = DMatrix::zeros(cols, cols);
        for (dst, &src) in order.iter().enumerate() {
            right.set_column(dst, &v_t.row(src).transpose());
        }
        FullSvd {
            singular_values,
            right,
            rows,
            cols,
        }
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn threshold(&self) -> f64 {
        RANK_RTOL * self.rows.max(self.cols) as f64 * self.sigma_max()
    }

    /// Numerical rank; errors when a singular value sits within a factor 10 of the threshold.
    pub fn rank(&self) -> Result<usize> {
        let thr = self.threshold();
        if thr == 0.0 {
            return Ok(0);
        }
        let mut rank = 0;
        for &s in &self.singular_values {
            if s > thr / 10.0 && s < thr * 10.0 {
                return Err(Error::RankToleranceAmbiguous {
                    sigma: s,
                    threshold: thr,
                });
            }
            if s >= thr {
                rank += 1;
            }
        }
        Ok(rank)
    }

    /// Orthonormal kernel basis given a rank.
    pub fn kernel(&self, rank: usize) -> Vec<DVector<f64>> {
        (rank..self.cols)
            .map(|j| self.right.column(j).into_owned())
            .collect()
    }

    /// Smallest singular value of the (unpadded) matrix restricted to `min(rows, cols)`.
    pub fn sigma_min(&self) -> f64 {
        let k = self.rows.min(self.cols);
        if k == 0 {
            0.0
        } else {
            self.singular_values[k - 1]
        }
    }
}

/// Numerical rank and orthonormal kernel basis of `a`.
pub fn kernel(a: &DMatrix<f64>) -> Result<(usize, Vec<DVector<f64>>)> {
    let svd = FullSvd::new(a);
    let rank = svd.rank()?;
    Ok((rank, svd.kernel(rank)))
}

pub fn rank(a: &DMatrix<f64>) -> Result<usize> {
    FullSvd::new(a).rank()
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let s = a.clone().singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Eigenvalues (ascending) and matching eigenvectors of a symmetric matrix.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Basis of skew-symmetric d x d matrices, ordered by (a, b) with a < b.
pub fn skew_basis(d: usize) -> Vec<DMatrix<f64>> {
    let mut out = Vec::with_capacity(d * (d - 1) / 2);
    for a in 0..d {
        for b in a + 1..d {
            let mut s = DMatrix::zeros(d, d);
            s[(a, b)] = 1.0;
            s[(b, a)] = -1.0;
            out.push(s);
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Column-major flattening of a square matrix.
pub fn flatten_col_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.as_slice().to_vec()
}
