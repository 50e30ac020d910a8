//! The parameterized gradient flow
//!
//! ```text
//! γ̇(t) = (|Du|²/|ξᵀDu|²) ξᵀDu (γ(t)),   γ(0) = x,   ξ ∈ 𝕊^{N−1},
//! ```
//!
//! whose trajectories conserve `|Du|` and carry affine images `t ↦ ξᵀu(γ(t))`
//! with slope `|Du(x)|²` exactly when the map is tangentially ∞-harmonic,
//! plus the interior-versus-boundary extremum scan for `|Du|` that the flow
//! argument underpins.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::map::{DomainBox, MapSpec};
use crate::residual::residual_from_jet;
use crate::tensor::{null_proj_transpose, Mat, DEFAULT_RANK_TOL};
use serde::Serialize;

/// Why an integration run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FlowStatus {
    /// Reached the boundary of the subdomain; exit time and point recorded.
    ExitedBoundary,
    /// `|ξᵀDu|` dropped below the degeneracy floor mid-flight; the flow is
    /// only defined where the denominator is nonzero, so we stop rather
    /// than continue through.
    DegenerateDirection,
    /// `Du` lost full rank mid-flight.
    RankDrop,
    /// Hit the step budget before any stop condition.
    MaxSteps,
}

#[derive(Debug, Clone)]
pub struct FlowOptions {
    /// Fixed RK4 step; `None` picks `min(0.01, 0.1/|Du(x)|²)`.
    pub step: Option<f64>,
    pub max_steps: usize,
    /// Integrate in negative time instead.
    pub backward: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { step: None, max_steps: 100_000, backward: false }
    }
}

/// Time-sampled trajectory with along-path diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct FlowTrajectory {
    pub xi: Vec<f64>,
    pub start: Vec<f64>,
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    /// `|Du(γ(t))|` per sample.
    pub grad_norms: Vec<f64>,
    /// `ξᵀu(γ(t))` per sample.
    pub xi_dot_u: Vec<f64>,
    pub status: FlowStatus,
    pub exit_time: Option<f64>,
    pub exit_point: Option<Vec<f64>>,
}

impl FlowTrajectory {
    /// Spread of `|Du|` along the samples; zero for exact conservation.
    pub fn grad_norm_drift(&self) -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &g in &self.grad_norms {
            lo = lo.min(g);
            hi = hi.max(g);
        }
        hi - lo
    }

    /// CSV export: `t, γ₁…γₙ, grad_norm, xi_dot_u`.
    pub fn to_csv(&self) -> String {
        let dim = self.start.len();
        let mut out = String::from("t,");
        for k in 0..dim {
            out.push_str(&format!("gamma{},", k + 1));
        }
        out.push_str("grad_norm,xi_dot_u\n");
        for i in 0..self.times.len() {
            out.push_str(&format!("{},", self.times[i]));
            for v in &self.points[i] {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{},{}\n", self.grad_norms[i], self.xi_dot_u[i]));
        }
        out
    }
}

const DEGENERACY_FLOOR: f64 = 1e-10;

struct FlowField<'a> {
    map: &'a MapSpec,
    xi: &'a [f64],
}

impl FlowField<'_> {
    /// `v(y) = (|Du|²/|ξᵀDu|²)·Duᵀξ`, or `None` when `|ξᵀDu|` is degenerate.
    fn velocity(&self, grad: &Mat) -> Option<Vec<f64>> {
        let xi_du = grad.transpose().matvec(self.xi);
        let denom_sq: f64 = xi_du.iter().map(|v| v * v).sum();
        if denom_sq.sqrt() < DEGENERACY_FLOOR {
            return None;
        }
        let scale = grad.frob_sq() / denom_sq;
        Some(xi_du.into_iter().map(|v| scale * v).collect())
    }

    fn eval(&self, y: &[f64]) -> Result<Option<Vec<f64>>> {
        let (_, grad) = self.map.jet1(y)?;
        Ok(self.velocity(&grad))
    }

    /// One RK4 step from `y` with signed step `h`. Stage points can leave the
    /// map's box near the boundary; the caller clips afterwards, so stage
    /// evaluation falls back on the jet of the nearest in-box point.
    fn rk4_step(&self, y: &[f64], h: f64, domain: &DomainBox) -> Result<Option<Vec<f64>>> {
        let clip = |p: Vec<f64>| -> Vec<f64> {
            p.into_iter()
                .enumerate()
                .map(|(k, v)| v.clamp(domain.lo[k], domain.hi[k]))
                .collect()
        };
        let Some(k1) = self.eval(y)? else { return Ok(None) };
        let y2 = clip(axpy(y, 0.5 * h, &k1));
        let Some(k2) = self.eval(&y2)? else { return Ok(None) };
        let y3 = clip(axpy(y, 0.5 * h, &k2));
        let Some(k3) = self.eval(&y3)? else { return Ok(None) };
        let y4 = clip(axpy(y, h, &k3));
        let Some(k4) = self.eval(&y4)? else { return Ok(None) };
        let mut out = y.to_vec();
        for i in 0..out.len() {
            out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        Ok(Some(out))
    }
}

fn axpy(y: &[f64], a: f64, v: &[f64]) -> Vec<f64> {
    y.iter().zip(v).map(|(yi, vi)| yi + a * vi).collect()
}

/// Integrate the flow from `x` with parameter `xi` until the trajectory
/// leaves `subdomain` (boundary crossing refined by bisection), the step
/// budget runs out, or the coefficients degenerate.
pub fn integrate(
    map: &MapSpec,
    x: &[f64],
    xi: &[f64],
    subdomain: &DomainBox,
    opts: &FlowOptions,
) -> Result<FlowTrajectory> {
    if xi.len() != map.target_dim() {
        return Err(Error::Dimension("xi must live in the target space".into()));
    }
    let xi_norm: f64 = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (xi_norm - 1.0).abs() > 1e-8 {
        return Err(Error::Config("xi must be a unit vector".into()));
    }
    if !subdomain.contains(x) {
        return Err(Error::Domain(format!("start {x:?} outside the subdomain")));
    }
    if !map.domain().strictly_contains(subdomain) && map.domain() != subdomain {
        if !subdomain
            .lo
            .iter()
            .zip(&subdomain.hi)
            .zip(map.domain().lo.iter().zip(&map.domain().hi))
            .all(|((sl, sh), (ml, mh))| sl >= ml && sh <= mh)
        {
            return Err(Error::Config("subdomain must sit inside the map domain".into()));
        }
    }

    let field = FlowField { map, xi };
    let (value0, grad0) = map.jet1(x)?;
    let full_rank = grad0.rows().min(grad0.cols());

    // The start must avoid [Du(x)]^⊥.
    let xi_du0 = grad0.transpose().matvec(xi);
    let denom0 = xi_du0.iter().map(|v| v * v).sum::<f64>().sqrt();
    if denom0 < DEGENERACY_FLOOR {
        return Err(Error::DegenerateDirection(denom0));
    }

    let step_mag = match opts.step {
        Some(s) if s > 0.0 && s.is_finite() => s,
        Some(s) => return Err(Error::Step(format!("invalid step {s}"))),
        None => (0.01f64).min(0.1 / grad0.frob_sq().max(1e-12)),
    };
    let h = if opts.backward { -step_mag } else { step_mag };

    let mut traj = FlowTrajectory {
        xi: xi.to_vec(),
        start: x.to_vec(),
        times: vec![0.0],
        points: vec![x.to_vec()],
        grad_norms: vec![grad0.frob()],
        xi_dot_u: vec![dot(xi, &value0)],
        status: FlowStatus::MaxSteps,
        exit_time: None,
        exit_point: None,
    };

    let mut t = 0.0;
    let mut y = x.to_vec();
    for _ in 0..opts.max_steps {
        let Some(next) = field.rk4_step(&y, h, map.domain())? else {
            traj.status = FlowStatus::DegenerateDirection;
            return Ok(traj);
        };
        if !subdomain.contains(&next) {
            // Bisect the step fraction on the box-membership predicate.
            let mut lo = 0.0f64;
            let mut hi = 1.0f64;
            let mut exit = next.clone();
            while (hi - lo) * step_mag > 1e-10 {
                let mid = 0.5 * (lo + hi);
                match field.rk4_step(&y, h * mid, map.domain())? {
                    Some(p) => {
                        if subdomain.contains(&p) {
                            lo = mid;
                        } else {
                            hi = mid;
                            exit = p;
                        }
                    }
                    None => break,
                }
            }
            traj.status = FlowStatus::ExitedBoundary;
            traj.exit_time = Some(t + h * hi);
            traj.exit_point = Some(exit);
            return Ok(traj);
        }
        t += h;
        y = next;
        let (value, grad) = map.jet1(&y)?;
        let rank = grad.rows() - null_proj_transpose(&grad, DEFAULT_RANK_TOL).rank;
        traj.times.push(t);
        traj.points.push(y.clone());
        traj.grad_norms.push(grad.frob());
        traj.xi_dot_u.push(dot(xi, &value));
        if rank < full_rank {
            traj.status = FlowStatus::RankDrop;
            return Ok(traj);
        }
        let xi_du = grad.transpose().matvec(xi);
        if xi_du.iter().map(|v| v * v).sum::<f64>().sqrt() < DEGENERACY_FLOOR {
            traj.status = FlowStatus::DegenerateDirection;
            return Ok(traj);
        }
    }
    Ok(traj)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least-squares line fit of `ξᵀu(γ(t))` against `t`.
#[derive(Debug, Clone, Serialize)]
pub struct AffinityFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

/// Fit `t ↦ ξᵀu(γ(t))` by a line; for tangentially ∞-harmonic maps the fit
/// is exact with slope `|Du(x)|²`.
pub fn check_affinity(traj: &FlowTrajectory) -> Result<AffinityFit> {
    let m = traj.times.len();
    if m < 10 {
        return Err(Error::InsufficientSamples(format!(
            "affinity fit needs >= 10 samples, trajectory has {m}"
        )));
    }
    let tbar = traj.times.iter().sum::<f64>() / m as f64;
    let ybar = traj.xi_dot_u.iter().sum::<f64>() / m as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (t, v) in traj.times.iter().zip(&traj.xi_dot_u) {
        sxx += (t - tbar) * (t - tbar);
        sxy += (t - tbar) * (v - ybar);
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * tbar;
    let max_residual = traj
        .times
        .iter()
        .zip(&traj.xi_dot_u)
        .map(|(t, v)| (v - (intercept + slope * t)).abs())
        .fold(0.0, f64::max);
    Ok(AffinityFit { slope, intercept, max_residual })
}

/// Interior-versus-boundary extrema of `|Du|` over a grid on `subdomain`,
/// with verdicts at the discretization tolerance `2h·max|D²u|`.
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub sup_interior: f64,
    pub max_boundary: f64,
    pub inf_interior: f64,
    pub min_boundary: f64,
    pub tol: f64,
    pub max_ok: bool,
    pub min_ok: bool,
}

pub fn extremum_scan(map: &MapSpec, subdomain: &DomainBox, res: &[usize]) -> Result<ScanReport> {
    let grid = Grid::new(subdomain.clone(), res.to_vec())?;
    let mut sup_interior = f64::NEG_INFINITY;
    let mut inf_interior = f64::INFINITY;
    let mut max_boundary = f64::NEG_INFINITY;
    let mut min_boundary = f64::INFINITY;
    let mut max_hess = 0.0f64;
    for (i, node) in grid.nodes() {
        let jet = map.jet(&node)?;
        let g = jet.grad.frob();
        max_hess = max_hess.max(jet.hess.frob());
        if grid.is_boundary(i) {
            max_boundary = max_boundary.max(g);
            min_boundary = min_boundary.min(g);
        } else {
            sup_interior = sup_interior.max(g);
            inf_interior = inf_interior.min(g);
        }
    }
    let tol = 2.0 * grid.max_spacing() * max_hess;
    Ok(ScanReport {
        sup_interior,
        max_boundary,
        inf_interior,
        min_boundary,
        tol,
        max_ok: sup_interior <= max_boundary + tol,
        min_ok: inf_interior >= min_boundary - tol,
    })
}
