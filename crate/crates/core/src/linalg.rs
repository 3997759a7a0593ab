//! Dense matrices, symmetric eigendecomposition and eigenspace projectors.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Relative symmetry tolerance accepted by [`SymMatrix::new`].
pub const SYMMETRY_RTOL: f64 = 1e-12;

/// Dense row-major real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    /// Permutation matrix `Π` with `Π[p(i), i] = 1`, so that `(Π x)[p(i)] = x[i]`.
    pub fn permutation(p: &crate::graph::Permutation) -> Self {
        let n = p.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(p.apply(i), i)] = 1.0;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `tr(self * rhs)` without forming the product.
    pub fn trace_product(&self, rhs: &Matrix) -> f64 {
        assert_eq!(self.cols, rhs.rows);
        assert_eq!(self.rows, rhs.cols);
        let mut t = 0.0;
        for i in 0..self.rows {
            for k in 0..self.cols {
                t += self[(i, k)] * rhs[(k, i)];
            }
        }
        t
    }

    /// Rows reordered so that row `i` moves to row `p(i)`; i.e. `Π · self`.
    pub fn permute_rows(&self, p: &crate::graph::Permutation) -> Matrix {
        assert_eq!(p.len(), self.rows);
        let mut out = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            out.row_mut(p.apply(i)).copy_from_slice(self.row(i));
        }
        out
    }

    /// `Π · self · Πᵀ` for a square matrix.
    pub fn conjugate(&self, p: &crate::graph::Permutation) -> Matrix {
        assert_eq!(self.rows, self.cols);
        assert_eq!(p.len(), self.rows);
        let mut out = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let pi = p.apply(i);
            for j in 0..self.cols {
                out[(pi, p.apply(j))] = self[(i, j)];
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Square real matrix that is symmetric up to [`SYMMETRY_RTOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::Dimension(format!(
                "symmetric matrix must be square, got {}x{}",
                m.rows, m.cols
            )));
        }
        let asym = max_asymmetry(&m);
        if asym > SYMMETRY_RTOL * m.max_abs().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_row_major_unchecked(n: usize, data: Vec<f64>) -> Self {
        Self(Matrix {
            rows: n,
            cols: n,
            data,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n, n))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0.data
    }

    pub fn conjugate(&self, p: &crate::graph::Permutation) -> SymMatrix {
        Self(self.0.conjugate(p))
    }
}

impl std::ops::Deref for SymMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

fn max_asymmetry(m: &Matrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.rows {
        for j in (i + 1)..m.cols {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// `S = Q Λ Qᵀ` with eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthogonal matrix; column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `‖S − QΛQᵀ‖_F`.
    pub fn residual(&self, s: &SymMatrix) -> f64 {
        let n = self.n();
        let q = &self.eigenvectors;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n)
                    .map(|k| q[(i, k)] * self.eigenvalues[k] * q[(j, k)])
                    .sum();
                acc += (s[(i, j)] - r).powi(2);
            }
        }
        acc.sqrt()
    }

    /// `‖QᵀQ − I‖_F`.
    pub fn orthogonality_error(&self) -> f64 {
        let q = &self.eigenvectors;
        let qtq = q.transpose().matmul(q).expect("square");
        qtq.sub(&Matrix::identity(self.n()))
            .expect("same shape")
            .frobenius_norm()
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_RTOL: f64 = 1e-12;

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps over all `(p, q)` pairs until the off-diagonal Frobenius norm falls
/// below `1e-12 · ‖S‖_F`. Eigenpairs are returned by descending eigenvalue and
/// each eigenvector is signed so that its first entry of non-negligible
/// magnitude is positive.
pub fn sym_eig(s: &SymMatrix) -> Result<EigenDecomposition> {
    let n = s.n();
    let mut a = s.as_matrix().clone();
    // Exact symmetrisation keeps the rotations consistent.
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
    let mut v = Matrix::identity(n);
    let total = a.frobenius_norm();
    let target = JACOBI_RTOL * total;

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.0
                };
                if t == 0.0 {
                    continue;
                }
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                rotate(&mut a, &mut v, p, q, c, sn, t, apq);
            }
        }
    }
    let residual_off = off_diagonal_norm(&a);
    if !residual_off.is_finite() {
        return Err(Error::InvalidArgument("non-finite matrix entries".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[(k, k)]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut vec: Vec<f64> = (0..n).map(|i| v[(i, k)]).collect();
        fix_sign(&mut vec);
        for (i, x) in vec.into_iter().enumerate() {
            eigenvectors[(i, col)] = x;
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

#[allow(clippy::too_many_arguments)]
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64, t: f64, apq: f64) {
    let n = a.rows;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let new_p = c * akp - s * akq;
        let new_q = s * akp + c * akq;
        a[(k, p)] = new_p;
        a[(p, k)] = new_p;
        a[(k, q)] = new_q;
        a[(q, k)] = new_q;
    }
    a[(p, p)] -= t * apq;
    a[(q, q)] += t * apq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.rows {
        for j in 0..a.cols {
            if i != j {
                acc += a[(i, j)] * a[(i, j)];
            }
        }
    }
    acc.sqrt()
}

fn fix_sign(v: &mut [f64]) {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let cutoff = 1e-10 * scale.max(f64::MIN_POSITIVE);
    if let Some(&first) = v.iter().find(|x| x.abs() > cutoff) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Splits the (descending) spectrum into maximal runs whose consecutive gaps
/// are at most `tol · max(1, |λ|)`. Returns index blocks into the spectrum.
pub fn group_eigenvalues(eig: &EigenDecomposition, tol: f64) -> Vec<Vec<usize>> {
    assert!(tol > 0.0, "eigenvalue tolerance must be positive");
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        match blocks.last_mut() {
            Some(block) => {
                let prev = eig.eigenvalues[*block.last().expect("non-empty")];
                if (prev - lambda).abs() <= tol * lambda.abs().max(prev.abs()).max(1.0) {
                    block.push(k);
                } else {
                    blocks.push(vec![k]);
                }
            }
            None => blocks.push(vec![k]),
        }
    }
    blocks
}

/// One eigenspace of `S` together with its orthogonal projector.
#[derive(Clone, Debug)]
pub struct Block {
    /// Mean of the grouped eigenvalues.
    pub eigenvalue: f64,
    pub multiplicity: usize,
    pub projector: SymMatrix,
}

#[derive(Clone, Debug)]
pub struct BlockProjectorSet {
    pub blocks: Vec<Block>,
}

impl BlockProjectorSet {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.multiplicity).collect()
    }

    pub fn projectors(&self) -> impl Iterator<Item = &SymMatrix> {
        self.blocks.iter().map(|b| &b.projector)
    }
}

/// `P_α = Σ_{k ∈ I_α} q_k q_kᵀ` for each index block.
pub fn block_projectors(
    eig: &EigenDecomposition,
    blocks: &[Vec<usize>],
) -> Result<BlockProjectorSet> {
    let n = eig.n();
    let mut seen = vec![false; n];
    for &k in blocks.iter().flatten() {
        if k >= n || seen[k] {
            return Err(Error::InvalidArgument(format!(
                "index blocks do not partition 0..{n} (index {k})"
            )));
        }
        seen[k] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidArgument(format!(
            "index blocks do not cover 0..{n}"
        )));
    }

    let q = &eig.eigenvectors;
    let out = blocks
        .iter()
        .map(|idx| {
            let mut p = Matrix::zeros(n, n);
            for &k in idx {
                let col = q.column(k);
                for i in 0..n {
                    let ci = col[i];
                    if ci == 0.0 {
                        continue;
                    }
                    for j in i..n {
                        p[(i, j)] += ci * col[j];
                    }
                }
            }
            for i in 0..n {
                for j in 0..i {
                    p[(i, j)] = p[(j, i)];
                }
            }
            let eigenvalue =
                idx.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / idx.len() as f64;
            Block {
                eigenvalue,
                multiplicity: idx.len(),
                projector: SymMatrix(p),
            }
        })
        .collect();
    Ok(BlockProjectorSet { blocks: out })
}
