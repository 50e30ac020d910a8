//! Small dense matrices, order-3 tensors, the mixed tensor contraction, and
//! the SVD-based orthogonal projections onto the range of a matrix and the
//! nullspace of its transpose.
//!
//! Everything here is desk scale (dimensions up to ~8); storage is dense
//! row-major and all values are immutable after construction.

use crate::error::{Error, Result};

/// Relative singular-value threshold used for numerical rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Dense row-major matrix. Rows index the target space, columns the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        assert!(!rows.is_empty() && !rows[0].is_empty());
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Mat { rows: rows.len(), cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    /// Squared Frobenius norm, evaluated through the same contraction as
    /// [`contract`] so the two routes sum in the identical order.
    pub fn frob_sq(&self) -> f64 {
        let t = self.as_tensor();
        contract(&t, &t).expect("self-contraction").scalar()
    }

    pub fn frob(&self) -> f64 {
        self.frob_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// View as a mixed tensor with one target and one domain index.
    pub fn as_tensor(&self) -> Tensor {
        Tensor {
            target_order: 1,
            domain_order: 1,
            dim_target: self.rows,
            dim_domain: self.cols,
            data: self.data.clone(),
        }
    }

    /// Outer product `A ⊗ B` laid out with both target indices first:
    /// entry `(α, β, i, j) = A[α,i] · B[β,j]`.
    pub fn outer(&self, other: &Mat) -> Tensor {
        let (nt, nd) = (self.rows, self.cols);
        assert_eq!(other.rows, nt, "outer: target dims differ");
        assert_eq!(other.cols, nd, "outer: domain dims differ");
        let mut data = vec![0.0; nt * nt * nd * nd];
        for a in 0..nt {
            for b in 0..nt {
                for i in 0..nd {
                    for j in 0..nd {
                        data[((a * nt + b) * nd + i) * nd + j] = self.get(a, i) * other.get(b, j);
                    }
                }
            }
        }
        Tensor { target_order: 2, domain_order: 2, dim_target: nt, dim_domain: nd, data }
    }
}

/// Dense order-3 tensor with one target index and two domain indices,
/// the layout of a Hessian `D²u` (entry `(α, i, j)`).
#[derive(Debug, Clone, PartialEq)]
pub struct Ten3 {
    dim_target: usize,
    dim_domain: usize,
    data: Vec<f64>,
}

impl Ten3 {
    pub fn zeros(dim_target: usize, dim_domain: usize) -> Self {
        assert!(dim_target >= 1 && dim_domain >= 1);
        Ten3 { dim_target, dim_domain, data: vec![0.0; dim_target * dim_domain * dim_domain] }
    }

    #[inline]
    pub fn dim_target(&self) -> usize {
        self.dim_target
    }

    #[inline]
    pub fn dim_domain(&self) -> usize {
        self.dim_domain
    }

    #[inline]
    pub fn get(&self, a: usize, i: usize, j: usize) -> f64 {
        self.data[(a * self.dim_domain + i) * self.dim_domain + j]
    }

    #[inline]
    pub fn set(&mut self, a: usize, i: usize, j: usize, v: f64) {
        self.data[(a * self.dim_domain + i) * self.dim_domain + j] = v;
    }

    /// Largest deviation from symmetry in the two domain indices.
    pub fn symmetry_defect(&self) -> f64 {
        let mut d = 0.0f64;
        for a in 0..self.dim_target {
            for i in 0..self.dim_domain {
                for j in (i + 1)..self.dim_domain {
                    d = d.max((self.get(a, i, j) - self.get(a, j, i)).abs());
                }
            }
        }
        d
    }

    /// Component-wise Laplacian `Δu_α = Σ_i D²_{ii} u_α`.
    pub fn laplacian(&self) -> Vec<f64> {
        (0..self.dim_target)
            .map(|a| (0..self.dim_domain).map(|i| self.get(a, i, i)).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frob(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn as_tensor(&self) -> Tensor {
        Tensor {
            target_order: 1,
            domain_order: 2,
            dim_target: self.dim_target,
            dim_domain: self.dim_domain,
            data: self.data.clone(),
        }
    }
}

/// Dense mixed tensor in `⊗^q ℝ^N ⊗^s ℝ^n`, stored row-major with the `q`
/// target indices first and the `s` domain indices after them.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    target_order: usize,
    domain_order: usize,
    dim_target: usize,
    dim_domain: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(
        target_order: usize,
        domain_order: usize,
        dim_target: usize,
        dim_domain: usize,
        data: Vec<f64>,
    ) -> Self {
        let len = dim_target.pow(target_order as u32) * dim_domain.pow(domain_order as u32);
        assert_eq!(data.len(), len, "tensor data length mismatch");
        Tensor { target_order, domain_order, dim_target, dim_domain, data }
    }

    pub fn scalar_value(v: f64) -> Self {
        Tensor { target_order: 0, domain_order: 0, dim_target: 1, dim_domain: 1, data: vec![v] }
    }

    pub fn target_order(&self) -> usize {
        self.target_order
    }

    pub fn domain_order(&self) -> usize {
        self.domain_order
    }

    pub fn dim_target(&self) -> usize {
        self.dim_target
    }

    pub fn dim_domain(&self) -> usize {
        self.dim_domain
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Value of an order-0 tensor.
    pub fn scalar(&self) -> f64 {
        assert!(self.target_order == 0 && self.domain_order == 0, "not a scalar tensor");
        self.data[0]
    }

    /// Components of an order-1 target tensor.
    pub fn vector(&self) -> Vec<f64> {
        assert!(self.target_order == 1 && self.domain_order == 0, "not a vector tensor");
        self.data.clone()
    }
}

/// Mixed contraction `S : T`.
///
/// `S` has `q` target and `s` domain indices, `T` has `p ≤ q` target and the
/// same `s` domain indices. All of `T`'s indices are contracted against the
/// trailing indices of `S`, leaving a tensor with `q − p` target indices.
/// For `q = p` this is the Frobenius inner product.
pub fn contract(s: &Tensor, t: &Tensor) -> Result<Tensor> {
    if t.target_order > s.target_order {
        return Err(Error::Shape(format!(
            "contract: T target order {} exceeds S target order {}",
            t.target_order, s.target_order
        )));
    }
    if s.domain_order != t.domain_order {
        return Err(Error::Shape(format!(
            "contract: domain orders differ ({} vs {})",
            s.domain_order, t.domain_order
        )));
    }
    if t.target_order > 0 && s.dim_target != t.dim_target {
        return Err(Error::Shape(format!(
            "contract: target dimensions differ ({} vs {})",
            s.dim_target, t.dim_target
        )));
    }
    if s.domain_order > 0 && s.dim_domain != t.dim_domain {
        return Err(Error::Shape(format!(
            "contract: domain dimensions differ ({} vs {})",
            s.dim_domain, t.dim_domain
        )));
    }

    let free = s.target_order - t.target_order;
    let contracted_len = t.data.len();
    let free_len = s.dim_target.pow(free as u32);
    debug_assert_eq!(free_len * contracted_len, s.data.len());

    let mut out = vec![0.0; free_len];
    for (f, slot) in out.iter_mut().enumerate() {
        let block = &s.data[f * contracted_len..(f + 1) * contracted_len];
        let mut acc = 0.0;
        for (a, b) in block.iter().zip(&t.data) {
            acc += a * b;
        }
        *slot = acc;
    }

    Ok(Tensor {
        target_order: free,
        domain_order: 0,
        dim_target: if free > 0 { s.dim_target } else { 1 },
        dim_domain: 1,
        data: out,
    })
}

/// Singular value decomposition `M = U · diag(σ) · Vᵀ` with `k = min(rows, cols)`
/// columns in `U` and `V` and `σ` sorted in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Mat,
    pub sigma: Vec<f64>,
    pub v: Mat,
}

impl Svd {
    /// `U · diag(σ) · Vᵀ`.
    pub fn reconstruct(&self) -> Mat {
        let k = self.sigma.len();
        let mut m = Mat::zeros(self.u.rows(), self.v.rows());
        for j in 0..k {
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    let v = m.get(r, c) + self.sigma[j] * self.u.get(r, j) * self.v.get(c, j);
                    m.set(r, c, v);
                }
            }
        }
        m
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One-sided Jacobi SVD. Robust and dependency-free at desk scale.
pub fn svd_small(m: &Mat) -> Svd {
    if m.rows() < m.cols() {
        let s = svd_small(&m.transpose());
        return Svd { u: s.v, sigma: s.sigma, v: s.u };
    }
    let rows = m.rows();
    let cols = m.cols();
    let mut w: Vec<Vec<f64>> = (0..cols).map(|j| m.col(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..cols).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let a = dot(&w[p], &w[p]);
                let b = dot(&w[q], &w[q]);
                let c = dot(&w[p], &w[q]);
                if c.abs() <= 1e-300 || c.abs() <= 1e-15 * (a * b).sqrt() {
                    continue;
                }
                off = off.max(c.abs() / (a * b).sqrt().max(1e-300));
                let zeta = (b - a) / (2.0 * c);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for r in 0..rows {
                    let wp = w[p][r];
                    let wq = w[q][r];
                    w[p][r] = cs * wp - sn * wq;
                    w[q][r] = sn * wp + cs * wq;
                }
                for r in 0..cols {
                    let vp = v[p][r];
                    let vq = v[q][r];
                    v[p][r] = cs * vp - sn * vq;
                    v[q][r] = sn * vp + cs * vq;
                }
            }
        }
        if off <= 1e-15 {
            break;
        }
    }

    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = w.iter().map(|col| dot(col, col).sqrt()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let sig_max = sigma.first().copied().unwrap_or(0.0);

    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(cols);
    for (rank_pos, &j) in order.iter().enumerate() {
        if sigma[rank_pos] > sig_max * 1e-14 && sigma[rank_pos] > 0.0 {
            u_cols.push(w[j].iter().map(|x| x / sigma[rank_pos]).collect());
        } else {
            // Null direction: complete with a unit vector orthogonal to the
            // columns fixed so far.
            u_cols.push(complete_column(rows, &u_cols));
        }
    }

    let mut u = Mat::zeros(rows, cols);
    let mut vm = Mat::zeros(cols, cols);
    for (jj, &j) in order.iter().enumerate() {
        for r in 0..rows {
            u.set(r, jj, u_cols[jj][r]);
        }
        for r in 0..cols {
            vm.set(r, jj, v[j][r]);
        }
    }
    Svd { u, sigma, v: vm }
}

/// One unit vector orthogonal to every column in `fixed`, found by
/// Gram-Schmidt over the standard basis.
fn complete_column(dim: usize, fixed: &[Vec<f64>]) -> Vec<f64> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for e in 0..dim {
        let mut cand = vec![0.0; dim];
        cand[e] = 1.0;
        for f in fixed {
            let proj = dot(&cand, f);
            for (c, fv) in cand.iter_mut().zip(f) {
                *c -= proj * fv;
            }
        }
        let nrm = dot(&cand, &cand).sqrt();
        if best.as_ref().map_or(true, |(n, _)| nrm > *n) {
            best = Some((nrm, cand));
        }
    }
    let (nrm, mut cand) = best.expect("dimension >= 1");
    assert!(nrm > 1e-12, "cannot complete orthonormal basis");
    for c in cand.iter_mut() {
        *c /= nrm;
    }
    cand
}

/// Orthonormal basis of the orthogonal complement of the column span of `u_cols`
/// in `ℝ^dim`, returned as the columns of a `dim × (dim - u_cols.len())` matrix.
pub fn orthonormal_complement(dim: usize, u_cols: &[Vec<f64>]) -> Mat {
    let extra = dim - u_cols.len();
    assert!(extra >= 1);
    let mut fixed: Vec<Vec<f64>> = u_cols.to_vec();
    let mut out = Mat::zeros(dim, extra);
    for j in 0..extra {
        let col = complete_column(dim, &fixed);
        for r in 0..dim {
            out.set(r, j, col[r]);
        }
        fixed.push(col);
    }
    out
}

/// Orthogonal projection of `ℝ^N` onto a subspace, together with its rank.
#[derive(Debug, Clone)]
pub struct Projector {
    pub matrix: Mat,
    pub rank: usize,
}

impl Projector {
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.matrix.matvec(v)
    }

    /// Max-norm of `P·P − P`.
    pub fn idempotency_defect(&self) -> f64 {
        self.matrix.matmul(&self.matrix).sub(&self.matrix).max_abs()
    }
}

fn rank_of(sigma: &[f64], tau: f64) -> usize {
    let smax = sigma.first().copied().unwrap_or(0.0);
    sigma.iter().filter(|&&s| s > tau * smax).count()
}

/// Projection onto the range (column span) of `M` in the target space,
/// with numerical rank `#{σ_i > τ·σ_1}` (zero matrix gives the zero projector).
pub fn range_proj(m: &Mat, tau: f64) -> Projector {
    let svd = svd_small(m);
    let rank = rank_of(&svd.sigma, tau);
    let nt = m.rows();
    let mut p = Mat::zeros(nt, nt);
    for j in 0..rank {
        for r in 0..nt {
            for c in 0..nt {
                let v = p.get(r, c) + svd.u.get(r, j) * svd.u.get(c, j);
                p.set(r, c, v);
            }
        }
    }
    Projector { matrix: p, rank }
}

/// Projection onto the nullspace of `Mᵀ`; the orthogonal complement of the
/// range, so the two projectors sum to the identity by construction.
pub fn null_proj_transpose(m: &Mat, tau: f64) -> Projector {
    let range = range_proj(m, tau);
    let nt = m.rows();
    let matrix = Mat::identity(nt).sub(&range.matrix);
    Projector { matrix, rank: nt - range.rank }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contract_matrix_inner_product_is_trace() {
        let id = Mat::identity(2).as_tensor();
        let v = contract(&id, &id).unwrap();
        assert_eq!(v.scalar(), 2.0);
    }

    #[test]
    fn contract_partial_all_ones() {
        // S in R^{2x2x2x2} (q=2, s=2), T in R^{2x2x2} (p=1, s=2), all ones:
        // S:T has components S_{a b i j} T_{b i j} = 8.
        let s = Tensor::new(2, 2, 2, 2, vec![1.0; 16]);
        let t = Tensor::new(1, 2, 2, 2, vec![1.0; 8]);
        let out = contract(&s, &t).unwrap();
        assert_eq!(out.vector(), vec![8.0, 8.0]);
    }

    #[test]
    fn contract_with_zero_annihilates() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).as_tensor();
        let z = Mat::zeros(2, 2).as_tensor();
        assert_eq!(contract(&a, &z).unwrap().scalar(), 0.0);
    }

    #[test]
    fn contract_rejects_mismatched_shapes() {
        let a = Mat::zeros(2, 3).as_tensor();
        let b = Mat::zeros(2, 2).as_tensor();
        assert!(matches!(contract(&a, &b), Err(Error::Shape(_))));
        let s = Tensor::new(1, 0, 2, 1, vec![0.0; 2]);
        let t = Tensor::new(2, 0, 2, 1, vec![0.0; 4]);
        assert!(matches!(contract(&s, &t), Err(Error::Shape(_))));
    }

    #[test]
    fn frobenius_agrees_with_self_contraction() {
        let m = Mat::from_rows(&[vec![1.0, -2.0], vec![0.5, 3.0], vec![0.0, 1.25]]);
        let direct: f64 = m.data().iter().map(|v| v * v).sum();
        assert_eq!(m.frob_sq(), direct);
    }

    #[test]
    fn svd_identity() {
        let s = svd_small(&Mat::identity(2));
        assert!((s.sigma[0] - 1.0).abs() < 1e-14);
        assert!((s.sigma[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_diagonal_with_zero() {
        let m = Mat::from_rows(&[vec![3.0, 0.0], vec![0.0, 0.0]]);
        let s = svd_small(&m);
        assert!((s.sigma[0] - 3.0).abs() < 1e-14);
        assert!(s.sigma[1].abs() < 1e-14);
        assert!(s.reconstruct().sub(&m).max_abs() < 1e-12);
    }

    #[test]
    fn svd_tall_permutation_like() {
        // Hand oracle: M^T M = I so both singular values are 1.
        let m = Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 0.0]]);
        let s = svd_small(&m);
        assert!((s.sigma[0] - 1.0).abs() < 1e-14);
        assert!((s.sigma[1] - 1.0).abs() < 1e-14);
        assert!(s.reconstruct().sub(&m).max_abs() < 1e-12);
    }

    #[test]
    fn svd_wide_matrix() {
        let m = Mat::from_rows(&[vec![1.0, 2.0, 3.0], vec![-1.0, 0.5, 2.0]]);
        let s = svd_small(&m);
        assert!(s.reconstruct().sub(&m).max_abs() < 1e-12);
        assert!(s.sigma[0] >= s.sigma[1]);
    }

    #[test]
    fn projectors_single_column() {
        let m = Mat::from_rows(&[vec![1.0], vec![0.0]]);
        let range = range_proj(&m, DEFAULT_RANK_TOL);
        let null = null_proj_transpose(&m, DEFAULT_RANK_TOL);
        assert_eq!(range.rank, 1);
        assert_eq!(null.rank, 1);
        assert!((range.matrix.get(0, 0) - 1.0).abs() < 1e-14);
        assert!(range.matrix.get(1, 1).abs() < 1e-14);
        assert!((null.matrix.get(1, 1) - 1.0).abs() < 1e-14);
        assert!(null.matrix.get(0, 0).abs() < 1e-14);
    }

    #[test]
    fn null_projector_vanishes_for_full_rank_square() {
        let m = Mat::from_rows(&[vec![2.0, 1.0], vec![0.0, 1.0]]);
        let null = null_proj_transpose(&m, DEFAULT_RANK_TOL);
        assert_eq!(null.rank, 0);
        assert!(null.matrix.max_abs() < 1e-12);
    }

    #[test]
    fn null_projector_matches_cross_product_oracle() {
        // Columns (1,1,0)/sqrt2 and (1,-1,0)/sqrt2; their cross product is
        // (0,0,-1), so the nullspace of M^T is the z-axis.
        let s = 1.0 / 2f64.sqrt();
        let m = Mat::from_rows(&[vec![s, s], vec![s, -s], vec![0.0, 0.0]]);
        let null = null_proj_transpose(&m, DEFAULT_RANK_TOL);
        assert_eq!(null.rank, 1);
        let expect = Mat::from_rows(&[
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        assert!(null.matrix.sub(&expect).max_abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_has_rank_zero_projector() {
        let m = Mat::zeros(3, 2);
        let range = range_proj(&m, DEFAULT_RANK_TOL);
        assert_eq!(range.rank, 0);
        assert!(range.matrix.max_abs() == 0.0);
        let null = null_proj_transpose(&m, DEFAULT_RANK_TOL);
        assert_eq!(null.rank, 3);
    }

    #[test]
    fn projector_invariants_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            let data: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let m = Mat::from_vec(rows, cols, data);
            let range = range_proj(&m, DEFAULT_RANK_TOL);
            let null = null_proj_transpose(&m, DEFAULT_RANK_TOL);
            // range_proj(M)·M = M
            assert!(range.matrix.matmul(&m).sub(&m).max_abs() < 1e-10);
            // M^T · null = 0
            assert!(m.transpose().matmul(&null.matrix).max_abs() < 1e-10);
            // complementarity and idempotency
            assert!(range.matrix.add(&null.matrix).sub(&Mat::identity(rows)).max_abs() < 1e-12);
            assert!(range.idempotency_defect() < 1e-10);
            assert!(null.idempotency_defect() < 1e-10);
            assert_eq!(range.rank + null.rank, rows);
            // symmetry and trace = rank
            assert!(range.matrix.sub(&range.matrix.transpose()).max_abs() < 1e-12);
            let trace: f64 = (0..rows).map(|i| range.matrix.get(i, i)).sum();
            assert!((trace - range.rank as f64).abs() < 1e-10);
        }
    }
}
