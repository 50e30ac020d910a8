//! Evaluation of the ∞-Laplacian system, its tangential/normal split, the
//! eikonal diagnostic, and rank phase maps over grids.
//!
//! The tangential part is `Du ⊗ Du : D²u` (components
//! `D_iu_α D_ju_β D²_{ij}u_β`), the normal part `|Du|² [Du]^⊥ Δu`. On a
//! constant-rank phase the full system decouples into these two; across an
//! interface the projector `[Du]^⊥` jumps, so phase maps flag interface
//! nodes instead of smoothing them and the residual reports the rank it used.

use crate::error::Result;
use crate::grid::Grid;
use crate::map::{Jet2, MapSpec};
use crate::tensor::{contract, null_proj_transpose, Mat};
use serde::Serialize;

/// Pointwise evaluation of `Δ∞u` split into its two bundles.
#[derive(Debug, Clone, Serialize)]
pub struct InfinityResidual {
    /// `Du ⊗ Du : D²u`, equal to `Du · D(½|Du|²)`.
    pub tangential: Vec<f64>,
    /// `|Du|² [Du]^⊥ Δu`; identically zero for submersions (and scalars).
    pub normal: Vec<f64>,
    /// `tangential + normal`, summed componentwise.
    pub total: Vec<f64>,
    pub grad_norm_sq: f64,
    /// Numerical rank of `Du` at the evaluation point.
    pub rank: usize,
}

impl InfinityResidual {
    pub fn tangential_norm(&self) -> f64 {
        norm(&self.tangential)
    }

    pub fn normal_norm(&self) -> f64 {
        norm(&self.normal)
    }

    pub fn total_norm(&self) -> f64 {
        norm(&self.total)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Evaluate `Δ∞u` at `x` with rank tolerance `tau`.
pub fn residual(map: &MapSpec, x: &[f64], tau: f64) -> Result<InfinityResidual> {
    Ok(residual_from_jet(&map.jet(x)?, tau))
}

/// Same evaluation from an already-computed 2-jet (symbolic or FD).
pub fn residual_from_jet(jet: &Jet2, tau: f64) -> InfinityResidual {
    let grad = &jet.grad;
    let grad_norm_sq = grad.frob_sq();

    // Tangential: contract Du ⊗ Du (two target, two domain indices) against
    // the Hessian (one target, two domain indices), leaving one free index.
    let tangential = contract(&grad.outer(grad), &jet.hess.as_tensor())
        .expect("jet shapes agree")
        .vector();

    let null = null_proj_transpose(grad, tau);
    let rank = grad.rows() - null.rank;
    let lap = jet.hess.laplacian();
    let normal: Vec<f64> = null.apply(&lap).iter().map(|v| grad_norm_sq * v).collect();

    let total = tangential.iter().zip(&normal).map(|(a, b)| a + b).collect();
    InfinityResidual { tangential, normal, total, grad_norm_sq, rank }
}

/// `D(½|Du|²)(x)`, the eikonal defect. For full-rank immersions the
/// tangential system vanishes exactly when this does.
pub fn eikonal_defect(map: &MapSpec, x: &[f64]) -> Result<Vec<f64>> {
    Ok(eikonal_defect_from_jet(&map.jet(x)?))
}

pub fn eikonal_defect_from_jet(jet: &Jet2) -> Vec<f64> {
    let n = jet.grad.cols();
    let nt = jet.grad.rows();
    (0..n)
        .map(|j| {
            let mut acc = 0.0;
            for a in 0..nt {
                for i in 0..n {
                    acc += jet.grad.get(a, i) * jet.hess.get(a, i, j);
                }
            }
            acc
        })
        .collect()
}

/// Per-node rank of `Du` over a grid, with interface flags where an axis
/// neighbor carries a different rank.
#[derive(Debug, Clone)]
pub struct PhaseMap {
    pub grid: Grid,
    pub rank: Vec<usize>,
    pub interface: Vec<bool>,
}

impl PhaseMap {
    pub fn interface_count(&self) -> usize {
        self.interface.iter().filter(|&&f| f).count()
    }

    /// CSV export: one row per node, columns `x1 … xn, rank, interface_flag`.
    pub fn to_csv(&self) -> String {
        let dim = self.grid.dim();
        let mut out = String::new();
        for k in 0..dim {
            out.push_str(&format!("x{},", k + 1));
        }
        out.push_str("rank,interface_flag\n");
        for (i, node) in self.grid.nodes() {
            for v in &node {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{},{}\n", self.rank[i], u8::from(self.interface[i])));
        }
        out
    }
}

/// Classify the rank of `Du` at every grid node.
pub fn phase_map(map: &MapSpec, grid: &Grid, tau: f64) -> Result<PhaseMap> {
    let mut rank = Vec::with_capacity(grid.len());
    for (_, node) in grid.nodes() {
        let (_, grad) = map.jet1(&node)?;
        rank.push(numerical_rank(&grad, tau));
    }
    let interface = (0..grid.len())
        .map(|i| grid.neighbors(i).iter().any(|&j| rank[j] != rank[i]))
        .collect();
    Ok(PhaseMap { grid: grid.clone(), rank, interface })
}

fn numerical_rank(m: &Mat, tau: f64) -> usize {
    m.rows() - null_proj_transpose(m, tau).rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;
    use crate::map::DomainBox;
    use crate::tensor::DEFAULT_RANK_TOL;

    #[test]
    fn affine_residual_is_exactly_zero() {
        let m = catalog("affine").unwrap();
        let r = residual(&m, &[0.3, -0.7], DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.total_norm(), 0.0);
        assert_eq!(r.rank, 2);
    }

    #[test]
    fn exp_diag_is_infinity_harmonic_off_diagonal() {
        let m = catalog("exp_diag").unwrap();
        let r = residual(&m, &[0.5, 0.2], DEFAULT_RANK_TOL).unwrap();
        assert!(r.total_norm() < 1e-10, "total {}", r.total_norm());
        assert_eq!(r.rank, 2);
        assert!((r.grad_norm_sq - 2.0).abs() < 1e-14);
    }

    #[test]
    fn catenoid_normal_zero_tangential_hand_formula() {
        // Δu = 0 identically; |tangential| = |Du·D(½|Du|²)| = 2·cosh²s·sinh s.
        let m = catalog("catenoid").unwrap();
        let s = 0.3f64;
        let r = residual(&m, &[s, 1.0], DEFAULT_RANK_TOL).unwrap();
        assert!(r.normal_norm() < 1e-10);
        let expect = 2.0 * s.cosh().powi(2) * s.sinh();
        assert!((r.tangential_norm() - expect).abs() < 1e-12);
        assert!(r.tangential_norm() > 0.5);
    }

    #[test]
    fn tangential_equals_grad_times_eikonal_defect() {
        let m = catalog("catenoid").unwrap();
        let x = [0.4, 2.0];
        let jet = m.jet(&x).unwrap();
        let r = residual_from_jet(&jet, DEFAULT_RANK_TOL);
        let d = eikonal_defect_from_jet(&jet);
        let via_defect = jet.grad.matvec(&d);
        for (a, b) in r.tangential.iter().zip(&via_defect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn eikonal_defect_hand_values() {
        let m = catalog("exp_diag").unwrap();
        let d = eikonal_defect(&m, &[0.4, -0.9]).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-14));

        // Catenoid: D(½|Du|²) = (2 cosh s sinh s, 0) = (sinh 2s, 0).
        let cat = catalog("catenoid").unwrap();
        let d = eikonal_defect(&cat, &[0.3, 1.7]).unwrap();
        assert!((d[0] - 0.6f64.sinh()).abs() < 1e-12);
        assert!(d[1].abs() < 1e-12);
    }

    #[test]
    fn scalar_normal_part_vanishes() {
        // N = 1: the normal coefficient annihilates everything, including at
        // the critical point of the bowl where Du = 0 (the |Du|² factor wins).
        let m = catalog("bowl").unwrap();
        for p in [[0.5, 0.25], [0.0, 0.0]] {
            let r = residual(&m, &p, DEFAULT_RANK_TOL).unwrap();
            assert_eq!(r.normal_norm(), 0.0, "at {p:?}");
        }
    }

    #[test]
    fn phase_map_finds_the_diagonal_interface() {
        let m = catalog("exp_diag").unwrap();
        let grid = Grid::new(m.domain().clone(), vec![41, 41]).unwrap();
        let pm = phase_map(&m, &grid, DEFAULT_RANK_TOL).unwrap();
        for (i, node) in grid.nodes() {
            let expect = if (node[0] - node[1]).abs() < 1e-12 { 1 } else { 2 };
            assert_eq!(pm.rank[i], expect, "node {node:?}");
        }
        // Interface hugs the diagonal: flagged nodes are exactly those within
        // one spacing of it.
        let h = grid.spacing(0);
        for (i, node) in grid.nodes() {
            let near = (node[0] - node[1]).abs() < 1.5 * h;
            assert_eq!(pm.interface[i], near, "node {node:?}");
        }
    }

    #[test]
    fn phase_map_constant_rank_has_empty_interface() {
        for name in ["affine", "catenoid"] {
            let m = catalog(name).unwrap();
            let grid = Grid::new(m.domain().clone(), vec![15, 15]).unwrap();
            let pm = phase_map(&m, &grid, DEFAULT_RANK_TOL).unwrap();
            assert!(pm.rank.iter().all(|&r| r == 2));
            assert_eq!(pm.interface_count(), 0);
        }
    }

    #[test]
    fn interface_mask_is_neighbor_symmetric() {
        let m = catalog("exp_diag").unwrap();
        let grid = Grid::new(m.domain().clone(), vec![21, 21]).unwrap();
        let pm = phase_map(&m, &grid, DEFAULT_RANK_TOL).unwrap();
        for i in 0..grid.len() {
            for &j in &grid.neighbors(i) {
                if pm.rank[i] != pm.rank[j] {
                    assert!(pm.interface[i] && pm.interface[j]);
                }
            }
        }
    }

    #[test]
    fn residual_orthogonal_equivariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        // Random rotation of the target.
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let q = Mat::from_rows(&[
            vec![theta.cos(), -theta.sin()],
            vec![theta.sin(), theta.cos()],
        ]);
        let m = catalog("exp_diag").unwrap();
        let qm = m.compose_target_linear(&q).unwrap();
        for _ in 0..20 {
            let x = [rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9)];
            let r = residual(&m, &x, DEFAULT_RANK_TOL).unwrap();
            let rq = residual(&qm, &x, DEFAULT_RANK_TOL).unwrap();
            let rotated = q.matvec(&r.total);
            for (a, b) in rq.total.iter().zip(&rotated) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fd_residual_tracks_symbolic() {
        for name in ["exp_diag", "catenoid", "enneper"] {
            let m = catalog(name).unwrap();
            let c = m.domain().center();
            let sym = residual_from_jet(&m.jet(&c).unwrap(), DEFAULT_RANK_TOL);
            let fd = residual_from_jet(&m.jet_fd(&c).unwrap(), DEFAULT_RANK_TOL);
            for (a, b) in sym.total.iter().zip(&fd.total) {
                assert!((a - b).abs() < 1e-4, "{name}");
            }
        }
    }

    #[test]
    fn csv_export_shape() {
        let m = catalog("affine").unwrap();
        let grid = Grid::new(DomainBox::new(vec![-0.5, -0.5], vec![0.5, 0.5]).unwrap(), vec![3, 3])
            .unwrap();
        let pm = phase_map(&m, &grid, DEFAULT_RANK_TOL).unwrap();
        let csv = pm.to_csv();
        assert_eq!(csv.lines().count(), 10);
        assert!(csv.starts_with("x1,x2,rank,interface_flag"));
    }
}
