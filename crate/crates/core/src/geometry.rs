//! Conformal geometry of 2-dimensional immersions into ℝ³: induced metric,
//! mean curvature vector, the identities tying `Δ∞` to the geometry of the
//! image surface, and the minimal / flat / planar classifiers.
//!
//! The two identities cross-check each other along independent routes:
//! `½|Du|² = √det g` and `|Du|²[Du]^⊥Δu = 4·det(g)·H`, with `H` always
//! computed from the explicit second-fundamental-form formula rather than
//! from the second identity.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::map::{Jet2, MapSpec};
use crate::residual::residual_from_jet;
use crate::tensor::{null_proj_transpose, svd_small, Mat, DEFAULT_RANK_TOL};
use serde::Serialize;

/// Relative conformality test: `|g − (tr g/2)·I| ≤ CONFORMAL_TOL · tr g`.
pub const CONFORMAL_TOL: f64 = 1e-8;

/// Default classification tolerance.
pub const CLASSIFY_TOL: f64 = 1e-7;

/// Induced metric data of a 2-dimensional map at a point.
#[derive(Debug, Clone, Serialize)]
pub struct MetricData {
    /// `g = Duᵀ Du` as row-major 2×2 entries.
    pub g: [[f64; 2]; 2],
    pub det_g: f64,
    /// Jacobian `Ju = √det g` (clamped at 0 against rounding).
    pub ju: f64,
    /// `tr g / 2`; equals the conformal factor squared when conformal.
    pub conformal_factor_sq: f64,
    pub is_conformal: bool,
    /// Frobenius norm of `g − (tr g/2)·I`.
    pub conformal_defect: f64,
}

/// Normal and mean curvature data of a surface point.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureData {
    /// Unit normal `(D_xu × D_yu)/|D_xu × D_yu|` times the orientation sign.
    pub normal: [f64; 3],
    /// Mean curvature vector; independent of the orientation choice.
    pub h_vector: [f64; 3],
    /// `νᵀH`; flips sign with the orientation.
    pub h_scalar: f64,
}

impl CurvatureData {
    pub fn h_norm(&self) -> f64 {
        self.h_vector.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn require_surface_domain(map: &MapSpec) -> Result<()> {
    if map.domain_dim() != 2 {
        return Err(Error::Dimension(format!(
            "expected a 2-dimensional domain, got n = {}",
            map.domain_dim()
        )));
    }
    if map.target_dim() < 2 {
        return Err(Error::Dimension(format!(
            "expected target dimension ≥ n = 2, got N = {}",
            map.target_dim()
        )));
    }
    Ok(())
}

fn metric_from_grad(grad: &Mat) -> MetricData {
    let g = grad.transpose().matmul(grad);
    let tr = g.get(0, 0) + g.get(1, 1);
    let det = g.get(0, 0) * g.get(1, 1) - g.get(0, 1) * g.get(1, 0);
    let half_tr = 0.5 * tr;
    let defect = {
        let d00 = g.get(0, 0) - half_tr;
        let d11 = g.get(1, 1) - half_tr;
        (d00 * d00 + d11 * d11 + 2.0 * g.get(0, 1) * g.get(0, 1)).sqrt()
    };
    MetricData {
        g: [[g.get(0, 0), g.get(0, 1)], [g.get(1, 0), g.get(1, 1)]],
        det_g: det,
        ju: det.max(0.0).sqrt(),
        conformal_factor_sq: half_tr,
        is_conformal: defect <= CONFORMAL_TOL * tr,
        conformal_defect: defect,
    }
}

/// Induced metric `g = Duᵀ Du` of a map with 2-dimensional domain.
pub fn metric(map: &MapSpec, x: &[f64]) -> Result<MetricData> {
    require_surface_domain(map)?;
    let (_, grad) = map.jet1(x)?;
    Ok(metric_from_grad(&grad))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn curvature_from_jet(jet: &Jet2, orientation: Orientation) -> Result<CurvatureData> {
    let dx = jet.grad.col(0);
    let dy = jet.grad.col(1);
    let e = dot(&dx, &dx);
    let g22 = dot(&dy, &dy);
    let f12 = dot(&dx, &dy);
    let det = e * g22 - f12 * f12;
    if det <= 0.0 {
        return Err(Error::DegenerateImmersion(format!(
            "Ju = 0 at {:?}: mean curvature undefined",
            jet.point
        )));
    }
    let raw = cross(&dx, &dy);
    let nrm = dot(&raw, &raw).sqrt();
    let s = orientation.sign();
    let normal = [s * raw[0] / nrm, s * raw[1] / nrm, s * raw[2] / nrm];

    let second = |i: usize, j: usize| -> f64 {
        (0..3).map(|a| normal[a] * jet.hess.get(a, i, j)).sum()
    };
    // H = [ |D_xu|²(νᵀD²_yy u) + |D_yu|²(νᵀD²_xx u) − 2(D_xuᵀD_yu)(νᵀD²_xy u) ]
    //     / (2(|D_xu|²|D_yu|² − (D_xuᵀD_yu)²)) · ν
    let coeff = (e * second(1, 1) + g22 * second(0, 0) - 2.0 * f12 * second(0, 1)) / (2.0 * det);
    let h_vector = [coeff * normal[0], coeff * normal[1], coeff * normal[2]];
    Ok(CurvatureData { normal, h_vector, h_scalar: coeff })
}

/// Mean curvature vector of an immersed surface in ℝ³ at `x`.
pub fn mean_curvature(map: &MapSpec, x: &[f64], orientation: Orientation) -> Result<CurvatureData> {
    require_surface_domain(map)?;
    if map.target_dim() != 3 {
        return Err(Error::Dimension(format!(
            "mean curvature needs N = 3, got N = {}",
            map.target_dim()
        )));
    }
    curvature_from_jet(&map.jet(x)?, orientation)
}

fn require_conformal(metric: &MetricData, where_: &str) -> Result<()> {
    if !metric.is_conformal {
        return Err(Error::Precondition {
            what: format!("{where_}: map is not conformal at the evaluation point"),
            defect: metric.conformal_defect,
        });
    }
    Ok(())
}

/// `½|Du|²` against the Jacobian `√det g` for conformal maps; returns
/// `(lhs, rhs, defect)`.
pub fn identity_31(map: &MapSpec, x: &[f64]) -> Result<(f64, f64, f64)> {
    require_surface_domain(map)?;
    let (_, grad) = map.jet1(x)?;
    let md = metric_from_grad(&grad);
    require_conformal(&md, "identity_31")?;
    let lhs = 0.5 * grad.frob_sq();
    let rhs = md.ju;
    Ok((lhs, rhs, (lhs - rhs).abs()))
}

/// `|Du|²[Du]^⊥Δu` against `4·det(g)·H` for conformal maps; returns
/// `(lhs, rhs, defect)` with the defect measured in the Euclidean norm.
/// When `det g` vanishes the right side is taken as zero.
pub fn identity_32(map: &MapSpec, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    require_surface_domain(map)?;
    if map.target_dim() != 3 {
        return Err(Error::Dimension("identity_32 needs N = 3".into()));
    }
    let jet = map.jet(x)?;
    let md = metric_from_grad(&jet.grad);
    require_conformal(&md, "identity_32")?;

    let lap = jet.hess.laplacian();
    let null = null_proj_transpose(&jet.grad, DEFAULT_RANK_TOL);
    let gsq = jet.grad.frob_sq();
    let lhs: Vec<f64> = null.apply(&lap).iter().map(|v| gsq * v).collect();

    let rhs: Vec<f64> = if md.det_g > 0.0 {
        let cd = curvature_from_jet(&jet, Orientation::Positive)?;
        cd.h_vector.iter().map(|v| 4.0 * md.det_g * v).collect()
    } else {
        vec![0.0; 3]
    };
    let defect = lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok((lhs, rhs, defect))
}

/// Mean curvature of an equal-norm frame (`|D_xu| = |D_yu|`) that is
/// normally ∞-harmonic, through
/// `H = −(1/(Ju)²)(D_xuᵀD_yu)·[Du]^⊥D²_xyu` — no conformality required.
pub fn nonconformal_h(map: &MapSpec, x: &[f64]) -> Result<Vec<f64>> {
    require_surface_domain(map)?;
    if map.target_dim() != 3 {
        return Err(Error::Dimension("nonconformal_h needs N = 3".into()));
    }
    let jet = map.jet(x)?;
    let dx = jet.grad.col(0);
    let dy = jet.grad.col(1);
    let norm_gap = (dot(&dx, &dx).sqrt() - dot(&dy, &dy).sqrt()).abs();
    if norm_gap > 1e-8 {
        return Err(Error::Precondition {
            what: "nonconformal_h: |D_xu| and |D_yu| differ".into(),
            defect: norm_gap,
        });
    }
    let null = null_proj_transpose(&jet.grad, DEFAULT_RANK_TOL);
    let gsq = jet.grad.frob_sq();
    let lap = jet.hess.laplacian();
    let normal_res: f64 =
        null.apply(&lap).iter().map(|v| (gsq * v) * (gsq * v)).sum::<f64>().sqrt();
    if normal_res > 1e-8 {
        return Err(Error::Precondition {
            what: "nonconformal_h: map is not normally ∞-harmonic at the point".into(),
            defect: normal_res,
        });
    }
    let md = metric_from_grad(&jet.grad);
    if md.det_g <= 0.0 {
        return Err(Error::DegenerateImmersion(format!("Ju = 0 at {x:?}")));
    }
    let mixed: Vec<f64> = (0..3).map(|a| jet.hess.get(a, 0, 1)).collect();
    let projected = null.apply(&mixed);
    let factor = -dot(&dx, &dy) / md.det_g;
    Ok(projected.iter().map(|v| factor * v).collect())
}

/// Verdict of [`classify_surface`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "c")]
pub enum SurfaceClass {
    /// `[Du]^⊥Δu ≡ 0` on the grid: minimal image.
    Minimal,
    /// `|Du|² ≡ 2c²` on the grid: image locally isometric to a scaled plane.
    Flat(f64),
    /// Both of the above: image contained in an affine plane.
    Planar,
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub map: Option<String>,
    pub grid_res: Vec<usize>,
    pub verdict: SurfaceClass,
    /// Max relative conformality defect over the grid.
    pub conformal_defect: f64,
    /// Max of `|[Du]^⊥Δu|` over the grid.
    pub minimal_defect: f64,
    /// Max of `||Du|² − 2c²|` over the grid.
    pub flat_defect: f64,
    /// Flatness scale `c` fitted from the grid mean of `|Du|²`.
    pub flat_scale: f64,
    pub tol: f64,
}

/// Classify an isothermal surface parametrization sampled over a grid.
pub fn classify_surface(map: &MapSpec, grid: &Grid, tol: f64) -> Result<ClassifyReport> {
    require_surface_domain(map)?;
    if map.target_dim() != 3 {
        return Err(Error::Dimension("classify_surface needs N = 3".into()));
    }
    let mut conformal_defect = 0.0f64;
    let mut minimal_defect = 0.0f64;
    let mut grad_norm_sqs = Vec::with_capacity(grid.len());
    for (_, node) in grid.nodes() {
        let jet = map.jet(&node)?;
        let md = metric_from_grad(&jet.grad);
        let tr = md.g[0][0] + md.g[1][1];
        if !md.is_conformal || md.conformal_factor_sq <= tol {
            return Err(Error::Precondition {
                what: format!("classify_surface: not isothermal at {node:?}"),
                defect: md.conformal_defect,
            });
        }
        conformal_defect = conformal_defect.max(md.conformal_defect / tr.max(f64::MIN_POSITIVE));
        let null = null_proj_transpose(&jet.grad, DEFAULT_RANK_TOL);
        let lap = jet.hess.laplacian();
        let nres = dot(&null.apply(&lap), &null.apply(&lap)).sqrt();
        minimal_defect = minimal_defect.max(nres);
        grad_norm_sqs.push(jet.grad.frob_sq());
    }
    let mean_sq = grad_norm_sqs.iter().sum::<f64>() / grad_norm_sqs.len() as f64;
    let flat_scale = (0.5 * mean_sq).sqrt();
    let flat_defect = grad_norm_sqs
        .iter()
        .map(|s| (s - mean_sq).abs())
        .fold(0.0, f64::max);

    let minimal = minimal_defect <= tol;
    let flat = flat_defect <= tol;
    let verdict = match (minimal, flat) {
        (true, true) => SurfaceClass::Planar,
        (true, false) => SurfaceClass::Minimal,
        (false, true) => SurfaceClass::Flat(flat_scale),
        (false, false) => SurfaceClass::None,
    };
    Ok(ClassifyReport {
        map: map.name().map(str::to_string),
        grid_res: grid.res().to_vec(),
        verdict,
        conformal_defect,
        minimal_defect,
        flat_defect,
        flat_scale,
        tol,
    })
}

/// Total-least-squares plane fit of a 3d point cloud: returns the max
/// out-of-plane distance and the cloud diameter (bounding-box diagonal).
pub fn plane_fit_residual(points: &[Vec<f64>]) -> (f64, f64) {
    let m = points.len() as f64;
    let mut centroid = [0.0f64; 3];
    for p in points {
        for k in 0..3 {
            centroid[k] += p[k] / m;
        }
    }
    let mut cov = Mat::zeros(3, 3);
    for p in points {
        for r in 0..3 {
            for c in 0..3 {
                let v = cov.get(r, c) + (p[r] - centroid[r]) * (p[c] - centroid[c]);
                cov.set(r, c, v);
            }
        }
    }
    let svd = svd_small(&cov);
    let normal = svd.u.col(2);
    let residual = points
        .iter()
        .map(|p| {
            (0..3)
                .map(|k| (p[k] - centroid[k]) * normal[k])
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max);

    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let diam = (0..3).map(|k| (hi[k] - lo[k]).powi(2)).sum::<f64>().sqrt();
    (residual, diam)
}

/// Rigidity sweep report: a conformal map that is ∞-harmonic over the grid
/// must have planar image; the report records the hypotheses and the
/// conclusion separately so vacuous cases stay visible.
#[derive(Debug, Clone, Serialize)]
pub struct RigidityReport {
    pub map: Option<String>,
    pub conformal_defect: f64,
    pub tangential_max: f64,
    pub normal_max: f64,
    pub residual_max: f64,
    pub plane_residual: f64,
    pub image_diameter: f64,
    pub conformal: bool,
    pub harmonic: bool,
    pub hypotheses_hold: bool,
    pub planar: bool,
    /// The implication `conformal ∧ ∞-harmonic ⇒ planar` at grid level.
    pub consistent: bool,
}

pub fn rigidity_check(map: &MapSpec, grid: &Grid) -> Result<RigidityReport> {
    require_surface_domain(map)?;
    if map.target_dim() != 3 {
        return Err(Error::Dimension("rigidity_check needs N = 3".into()));
    }
    let mut conformal_defect = 0.0f64;
    let mut tangential_max = 0.0f64;
    let mut normal_max = 0.0f64;
    let mut residual_max = 0.0f64;
    let mut points = Vec::with_capacity(grid.len());
    for (_, node) in grid.nodes() {
        let jet = map.jet(&node)?;
        let md = metric_from_grad(&jet.grad);
        let tr = md.g[0][0] + md.g[1][1];
        conformal_defect = conformal_defect.max(md.conformal_defect / tr.max(f64::MIN_POSITIVE));
        let r = residual_from_jet(&jet, DEFAULT_RANK_TOL);
        tangential_max = tangential_max.max(r.tangential_norm());
        normal_max = normal_max.max(r.normal_norm());
        residual_max = residual_max.max(r.total_norm());
        points.push(jet.value);
    }
    let (plane_residual, image_diameter) = plane_fit_residual(&points);
    let conformal = conformal_defect <= 1e-8;
    let harmonic = residual_max <= 1e-8;
    let hypotheses_hold = conformal && harmonic;
    let planar = plane_residual <= 1e-6 * image_diameter.max(f64::MIN_POSITIVE);
    Ok(RigidityReport {
        map: map.name().map(str::to_string),
        conformal_defect,
        tangential_max,
        normal_max,
        residual_max,
        plane_residual,
        image_diameter,
        conformal,
        harmonic,
        hypotheses_hold,
        planar,
        consistent: !hypotheses_hold || planar,
    })
}
