//! Uniform tensor-product grids over a domain box, with boundary masks and
//! the axis-neighbor relation used by phase maps and normal frames.

use crate::error::{Error, Result};
use crate::map::DomainBox;

#[derive(Debug, Clone)]
pub struct Grid {
    domain: DomainBox,
    res: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl Grid {
    /// `res[k]` is the node count along axis `k` (at least 2 per axis).
    pub fn new(domain: DomainBox, res: Vec<usize>) -> Result<Self> {
        if res.len() != domain.dim() {
            return Err(Error::Dimension("grid resolution rank differs from box".into()));
        }
        if res.iter().any(|&r| r < 2) {
            return Err(Error::Config("grid needs at least 2 nodes per axis".into()));
        }
        // Row-major: the last axis varies fastest.
        let mut strides = vec![1; res.len()];
        for k in (0..res.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * res[k + 1];
        }
        let len = res.iter().product();
        Ok(Grid { domain, res, strides, len })
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.res.len()
    }

    pub fn res(&self) -> &[usize] {
        &self.res
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.domain.hi[axis] - self.domain.lo[axis]) / (self.res[axis] - 1) as f64
    }

    pub fn max_spacing(&self) -> f64 {
        (0..self.dim()).map(|k| self.spacing(k)).fold(0.0, f64::max)
    }

    pub fn multi_index(&self, idx: usize) -> Vec<usize> {
        let mut rest = idx;
        self.strides
            .iter()
            .map(|s| {
                let q = rest / s;
                rest %= s;
                q
            })
            .collect()
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(m, s)| m * s).sum()
    }

    pub fn node(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .enumerate()
            .map(|(k, &m)| self.domain.lo[k] + m as f64 * self.spacing(k))
            .collect()
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        self.multi_index(idx)
            .iter()
            .zip(&self.res)
            .any(|(&m, &r)| m == 0 || m == r - 1)
    }

    /// Axis neighbors (up to `2·dim` of them).
    pub fn neighbors(&self, idx: usize) -> Vec<usize> {
        let multi = self.multi_index(idx);
        let mut out = Vec::with_capacity(2 * self.dim());
        for k in 0..self.dim() {
            if multi[k] > 0 {
                out.push(idx - self.strides[k]);
            }
            if multi[k] + 1 < self.res[k] {
                out.push(idx + self.strides[k]);
            }
        }
        out
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, Vec<f64>)> + '_ {
        (0..self.len).map(|i| (i, self.node(i)))
    }

    /// Composite-trapezoid quadrature weight of a node (product of per-axis
    /// weights, halved at the faces).
    pub fn quadrature_weight(&self, idx: usize) -> f64 {
        self.multi_index(idx)
            .iter()
            .enumerate()
            .map(|(k, &m)| {
                let w = self.spacing(k);
                if m == 0 || m == self.res[k] - 1 {
                    0.5 * w
                } else {
                    w
                }
            })
            .product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_grid(r: usize) -> Grid {
        Grid::new(
            DomainBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
            vec![r, r],
        )
        .unwrap()
    }

    #[test]
    fn nodes_and_boundary_mask() {
        let g = unit_grid(3);
        assert_eq!(g.len(), 9);
        assert_eq!(g.node(0), vec![0.0, 0.0]);
        assert_eq!(g.node(8), vec![1.0, 1.0]);
        assert_eq!(g.node(4), vec![0.5, 0.5]);
        let boundary: usize = (0..9).filter(|&i| g.is_boundary(i)).count();
        assert_eq!(boundary, 8);
        assert!(!g.is_boundary(4));
    }

    #[test]
    fn neighbor_relation_is_symmetric() {
        let g = unit_grid(4);
        for i in 0..g.len() {
            for &j in &g.neighbors(i) {
                assert!(g.neighbors(j).contains(&i));
            }
        }
    }

    #[test]
    fn trapezoid_weights_sum_to_area() {
        let g = unit_grid(5);
        let total: f64 = (0..g.len()).map(|i| g.quadrature_weight(i)).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }
}
