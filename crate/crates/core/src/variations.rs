//! Empirical minimality testers.
//!
//! Two notions are probed by sampled variation families on a subdomain
//! `D ⊂⊂ Ω`:
//!
//! * **rank-one minimality** — essentially scalar variations `u + g·ξ` with
//!   `g` vanishing on `∂D` (paraboloid bumps supported on balls, and
//!   tensor-product sine bumps on the whole box) and a fixed direction
//!   `ξ ∈ 𝕊^{N−1}`;
//! * **normal area minimality** — normal free variations `u + δ·h·ν` with
//!   `h` free on `∂D` (constants first — they are the discriminating
//!   variations — then linear forms and cosine modes) measured in the grid
//!   sup norm (`p = ∞`) or a composite-trapezoid `Lᵖ` norm.
//!
//! Sup norms are grid maxima, so a PASS is meaningful only above the
//! discretization floor `2h·max|D²w|` of the varied map `w`; margins below
//! the negative of that floor are counted as violations. Sampling cannot
//! prove minimality; the reports carry every margin so the caller sees how
//!的far from violation a run stayed.
//!
//! For immersed codimension-1 maps the unit normal is built symbolically
//! (cross product of the gradient columns over its norm), so `ν` and `Dν`
//! are exact and the classical pointwise expansion of `|D(u+δhν)|²` holds to
//! rounding. The grid-based [`frame`] with finite-difference derivatives
//! stays available as the independent cross-check.

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::grid::Grid;
use crate::map::{DomainBox, MapSpec};
use crate::tensor::{orthonormal_complement, svd_small, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::sync::Arc;

// ---------------------------------------------------------------------------
// Configuration and reports
// ---------------------------------------------------------------------------

/// Exponent for the norm a variation test works in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PNorm {
    Finite(f64),
    Infinity,
}

impl PNorm {
    pub fn label(&self) -> String {
        match self {
            PNorm::Finite(p) => format!("p={p}"),
            PNorm::Infinity => "p=inf".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VariationConfig {
    /// Subdomain `D`; its closure must sit strictly inside the map domain.
    pub subdomain: DomainBox,
    /// Sample grid resolution over `D`.
    pub res: Vec<usize>,
    /// Total number of variations (structured families are generated first,
    /// the rest drawn from the seeded RNG).
    pub count: usize,
    pub seed: u64,
    /// Amplitude schedule δ.
    pub amplitudes: Vec<f64>,
    /// Overrides the per-variation PASS tolerance when set.
    pub tol_override: Option<f64>,
}

impl VariationConfig {
    pub fn new(subdomain: DomainBox) -> Self {
        let dim = subdomain.dim();
        VariationConfig {
            subdomain,
            res: vec![21; dim],
            count: 200,
            seed: 0,
            amplitudes: vec![1e-3, 1e-2, 1e-1],
            tol_override: None,
        }
    }

    fn validate(&self, map: &MapSpec) -> Result<()> {
        if !map.domain().strictly_contains(&self.subdomain) {
            return Err(Error::Config(
                "variation subdomain must be compactly contained in the map domain".into(),
            ));
        }
        if self.res.len() != self.subdomain.dim() {
            return Err(Error::Config("resolution rank differs from subdomain".into()));
        }
        if self.count == 0 || self.amplitudes.is_empty() {
            return Err(Error::Config("need at least one variation and one amplitude".into()));
        }
        if self.amplitudes.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
            return Err(Error::Config("amplitudes must be positive".into()));
        }
        Ok(())
    }
}

/// One sampled variation and its margin against the base norm.
#[derive(Debug, Clone, Serialize)]
pub struct VariationOutcome {
    pub label: String,
    pub amplitude: f64,
    /// Base norm over this variation's own support region.
    pub base_norm: f64,
    pub varied_norm: f64,
    /// `varied − base`; negative means the variation lowered the norm.
    pub margin: f64,
    /// Discretization floor for this variation.
    pub tol: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationReport {
    pub kind: String,
    pub seed: u64,
    /// Base norm over the full sample grid.
    pub base_norm: f64,
    pub worst_margin: f64,
    pub violation_count: usize,
    pub pass: bool,
    pub outcomes: Vec<VariationOutcome>,
}

impl VariationReport {
    fn from_outcomes(kind: String, seed: u64, base_norm: f64, outcomes: Vec<VariationOutcome>) -> Self {
        let worst_margin = outcomes.iter().map(|o| o.margin).fold(f64::INFINITY, f64::min);
        let violation_count = outcomes.iter().filter(|o| o.violation).count();
        VariationReport {
            kind,
            seed,
            base_norm,
            worst_margin,
            violation_count,
            pass: violation_count == 0,
            outcomes,
        }
    }

    /// CSV of per-variation margins.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,amplitude,base_norm,varied_norm,margin,tol,violation\n");
        for o in &self.outcomes {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                o.label, o.amplitude, o.base_norm, o.varied_norm, o.margin, o.tol,
                u8::from(o.violation)
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Scalar bump family g (vanishing on the boundary of its support)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum BumpShape {
    /// `g(z) = (δ/2)(ε² − |z−c|²)` on the ball `B_ε(c)`.
    Paraboloid { center: Vec<f64>, radius: f64 },
    /// `g(z) = δ·Π_k sin(m_k π t_k)` in box-normalized coordinates.
    SineProduct { modes: Vec<usize> },
}

#[derive(Debug, Clone)]
pub struct Bump {
    shape: BumpShape,
    delta: f64,
    label: String,
}

impl Bump {
    /// Paraboloid bump; the closed ball must fit inside `subdomain`.
    pub fn paraboloid(center: Vec<f64>, radius: f64, delta: f64, subdomain: &DomainBox) -> Result<Bump> {
        if !(radius > 0.0) {
            return Err(Error::Config("bump radius must be positive".into()));
        }
        let fits = subdomain.contains(&center) && subdomain.face_distance(&center) >= radius;
        if !fits {
            return Err(Error::Config(format!(
                "paraboloid support B_{radius}({center:?}) exceeds the subdomain"
            )));
        }
        let label = format!("paraboloid(c={center:?},eps={radius:.3})");
        Ok(Bump { shape: BumpShape::Paraboloid { center, radius }, delta, label })
    }

    pub fn sine_product(modes: Vec<usize>, delta: f64) -> Bump {
        let label = format!("sine{modes:?}");
        Bump { shape: BumpShape::SineProduct { modes }, delta, label }
    }

    fn in_support(&self, z: &[f64]) -> bool {
        match &self.shape {
            BumpShape::Paraboloid { center, radius } => {
                dist(z, center) <= radius + 1e-12
            }
            BumpShape::SineProduct { .. } => true,
        }
    }

    fn grad(&self, b: &DomainBox, z: &[f64]) -> Vec<f64> {
        match &self.shape {
            BumpShape::Paraboloid { center, .. } => {
                z.iter().zip(center).map(|(zi, ci)| -self.delta * (zi - ci)).collect()
            }
            BumpShape::SineProduct { modes } => {
                let n = z.len();
                let (s, c, freq) = sine_parts(b, z, modes);
                (0..n)
                    .map(|k| {
                        let mut v = self.delta * freq[k] * c[k];
                        for l in 0..n {
                            if l != k {
                                v *= s[l];
                            }
                        }
                        v
                    })
                    .collect()
            }
        }
    }

    fn hess(&self, b: &DomainBox, z: &[f64]) -> Mat {
        let n = z.len();
        match &self.shape {
            BumpShape::Paraboloid { .. } => Mat::identity(n).scale(-self.delta),
            BumpShape::SineProduct { modes } => {
                let (s, c, freq) = sine_parts(b, z, modes);
                let mut m = Mat::zeros(n, n);
                for k in 0..n {
                    for l in 0..n {
                        let mut v = self.delta;
                        if k == l {
                            v *= -freq[k] * freq[k] * s[k];
                            for q in 0..n {
                                if q != k {
                                    v *= s[q];
                                }
                            }
                        } else {
                            v *= freq[k] * c[k] * freq[l] * c[l];
                            for q in 0..n {
                                if q != k && q != l {
                                    v *= s[q];
                                }
                            }
                        }
                        m.set(k, l, v);
                    }
                }
                m
            }
        }
    }
}

fn sine_parts(b: &DomainBox, z: &[f64], modes: &[usize]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = z.len();
    let mut s = vec![0.0; n];
    let mut c = vec![0.0; n];
    let mut freq = vec![0.0; n];
    for k in 0..n {
        let w = b.hi[k] - b.lo[k];
        let t = (z[k] - b.lo[k]) / w;
        let arg = modes[k] as f64 * std::f64::consts::PI * t;
        s[k] = arg.sin();
        c[k] = arg.cos();
        freq[k] = modes[k] as f64 * std::f64::consts::PI / w;
    }
    (s, c, freq)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// Boundary-free scalar factors h for normal variations
// ---------------------------------------------------------------------------

/// Scalar factor of a normal variation, free on the subdomain boundary.
/// Linear forms and cosine modes act in box-normalized coordinates.
#[derive(Debug, Clone)]
pub enum ScalarField {
    Constant(f64),
    Linear { coeffs: Vec<f64>, offset: f64 },
    CosProduct { modes: Vec<usize> },
}

impl ScalarField {
    pub fn value(&self, b: &DomainBox, z: &[f64]) -> f64 {
        match self {
            ScalarField::Constant(c) => *c,
            ScalarField::Linear { coeffs, offset } => {
                let mut v = *offset;
                for k in 0..z.len() {
                    let t = (z[k] - b.lo[k]) / (b.hi[k] - b.lo[k]);
                    v += coeffs[k] * t;
                }
                v
            }
            ScalarField::CosProduct { modes } => {
                let mut v = 1.0;
                for k in 0..z.len() {
                    let t = (z[k] - b.lo[k]) / (b.hi[k] - b.lo[k]);
                    v *= (modes[k] as f64 * std::f64::consts::PI * t).cos();
                }
                v
            }
        }
    }

    pub fn grad(&self, b: &DomainBox, z: &[f64]) -> Vec<f64> {
        let n = z.len();
        match self {
            ScalarField::Constant(_) => vec![0.0; n],
            ScalarField::Linear { coeffs, .. } => (0..n)
                .map(|k| coeffs[k] / (b.hi[k] - b.lo[k]))
                .collect(),
            ScalarField::CosProduct { modes } => {
                let mut s = vec![0.0; n];
                let mut c = vec![0.0; n];
                let mut freq = vec![0.0; n];
                for k in 0..n {
                    let w = b.hi[k] - b.lo[k];
                    let t = (z[k] - b.lo[k]) / w;
                    let arg = modes[k] as f64 * std::f64::consts::PI * t;
                    s[k] = arg.sin();
                    c[k] = arg.cos();
                    freq[k] = modes[k] as f64 * std::f64::consts::PI / w;
                }
                (0..n)
                    .map(|k| {
                        let mut v = -freq[k] * s[k];
                        for l in 0..n {
                            if l != k {
                                v *= c[l];
                            }
                        }
                        v
                    })
                    .collect()
            }
        }
    }

    fn label(&self) -> String {
        match self {
            ScalarField::Constant(c) => format!("const({c})"),
            ScalarField::Linear { coeffs, offset } => format!("linear({coeffs:?},{offset})"),
            ScalarField::CosProduct { modes } => format!("cos{modes:?}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Symbolic unit normal section (codimension one)
// ---------------------------------------------------------------------------

/// Unit normal field of a codimension-1 immersion, realized as a symbolic
/// map so that `ν` and `Dν` are exact.
#[derive(Debug, Clone)]
pub struct NormalSection {
    field: MapSpec,
}

impl NormalSection {
    /// `(ν(x), Dν(x))`.
    pub fn eval(&self, x: &[f64]) -> Result<(Vec<f64>, Mat)> {
        self.field.jet1(x)
    }

    pub fn as_map(&self) -> &MapSpec {
        &self.field
    }
}

/// Build the symbolic unit normal of an immersion with `N = n + 1`
/// (curves in the plane, surfaces in space).
pub fn normal_section(map: &MapSpec) -> Result<NormalSection> {
    let n = map.domain_dim();
    let nt = map.target_dim();
    if nt != n + 1 {
        return Err(Error::Dimension(format!(
            "symbolic normal needs codimension 1, got n = {n}, N = {nt}"
        )));
    }
    let comps = map.components();
    let raw: Vec<Arc<Expr>> = match n {
        1 => {
            // Rotate the tangent by 90°.
            let du: Vec<Arc<Expr>> = comps.iter().map(|c| c.diff(0)).collect();
            vec![expr::neg(du[1].clone()), du[0].clone()]
        }
        2 => {
            // Cross product of the two gradient columns.
            let dx: Vec<Arc<Expr>> = comps.iter().map(|c| c.diff(0)).collect();
            let dy: Vec<Arc<Expr>> = comps.iter().map(|c| c.diff(1)).collect();
            let minor = |i: usize, j: usize| {
                expr::sub(
                    expr::mul(dx[i].clone(), dy[j].clone()),
                    expr::mul(dx[j].clone(), dy[i].clone()),
                )
            };
            vec![minor(1, 2), minor(2, 0), minor(0, 1)]
        }
        _ => {
            return Err(Error::Dimension(format!(
                "symbolic normal implemented for n ≤ 2, got n = {n}"
            )));
        }
    };
    let norm_sq = raw
        .iter()
        .map(|c| expr::mul(c.clone(), c.clone()))
        .reduce(expr::add)
        .expect("nonempty");
    let inv_norm = expr::pow(norm_sq, -0.5);
    let comps = raw.into_iter().map(|c| expr::mul(c, inv_norm.clone())).collect();
    Ok(NormalSection { field: MapSpec::new(comps, map.domain().clone())? })
}

// ---------------------------------------------------------------------------
// Rank-one test
// ---------------------------------------------------------------------------

struct RankOneNodes {
    grid: Grid,
    grads: Vec<Mat>,
    hessians: Vec<crate::tensor::Ten3>,
}

fn precompute_rank_one(map: &MapSpec, cfg: &VariationConfig) -> Result<RankOneNodes> {
    let grid = Grid::new(cfg.subdomain.clone(), cfg.res.clone())?;
    let mut grads = Vec::with_capacity(grid.len());
    let mut hessians = Vec::with_capacity(grid.len());
    for (_, node) in grid.nodes() {
        let jet = map.jet(&node)?;
        grads.push(jet.grad);
        hessians.push(jet.hess);
    }
    Ok(RankOneNodes { grid, grads, hessians })
}

fn unit_sphere_dir(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-6 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Snap a point to the nearest grid node so the bump's critical point is a
/// sample; the exact-minimality argument evaluates there.
fn nearest_node(grid: &Grid, z: &[f64]) -> Vec<f64> {
    let multi: Vec<usize> = (0..grid.dim())
        .map(|k| {
            let t = (z[k] - grid.domain().lo[k]) / grid.spacing(k);
            (t.round() as usize).min(grid.res()[k] - 1)
        })
        .collect();
    grid.node(grid.flat_index(&multi))
}

/// Rank-one minimality test: seeded essentially scalar variations `u + g·ξ`.
pub fn rank_one_test(map: &MapSpec, cfg: &VariationConfig) -> Result<VariationReport> {
    cfg.validate(map)?;
    let nodes = precompute_rank_one(map, cfg)?;
    let grid = &nodes.grid;
    let nt = map.target_dim();
    let n = map.domain_dim();
    let d = &cfg.subdomain;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let center = nearest_node(grid, &d.center());
    let max_radius = d.face_distance(&center);

    // Structured family: axis directions with the centered paraboloid and
    // the fundamental sine bump.
    let mut plan: Vec<(Bump, Vec<f64>)> = Vec::new();
    for axis in 0..nt {
        for sign in [1.0, -1.0] {
            let mut xi = vec![0.0; nt];
            xi[axis] = sign;
            for &delta in &cfg.amplitudes {
                plan.push((
                    Bump::paraboloid(center.clone(), 0.95 * max_radius, delta, d)?,
                    xi.clone(),
                ));
                plan.push((Bump::sine_product(vec![1; n], delta), xi.clone()));
            }
        }
    }
    // Random family.
    let min_radius = 2.5 * grid.max_spacing();
    while plan.len() < cfg.count {
        let xi = unit_sphere_dir(&mut rng, nt);
        let delta = cfg.amplitudes[rng.gen_range(0..cfg.amplitudes.len())];
        let bump = if rng.gen_bool(0.5) && max_radius > min_radius {
            let c = nearest_node(
                grid,
                &(0..n)
                    .map(|k| rng.gen_range(d.lo[k]..d.hi[k]))
                    .collect::<Vec<f64>>(),
            );
            let fit = d.face_distance(&c);
            if fit <= min_radius {
                continue;
            }
            Bump::paraboloid(c.clone(), rng.gen_range(min_radius..=fit), delta, d)?
        } else {
            let modes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
            Bump::sine_product(modes, delta)
        };
        plan.push((bump, xi));
    }
    plan.truncate(cfg.count);

    let mut outcomes = Vec::with_capacity(plan.len());
    for (bump, xi) in &plan {
        let mut base_sup = 0.0f64;
        let mut varied_sup = 0.0f64;
        let mut hess_bound = 0.0f64;
        for (i, z) in grid.nodes() {
            if !bump.in_support(&z) {
                continue;
            }
            let grad = &nodes.grads[i];
            base_sup = base_sup.max(grad.frob());
            let dg = bump.grad(d, &z);
            // |Du + ξ⊗Dg|² = |Du|² + 2(ξᵀDu)·Dg + |ξ|²|Dg|²
            let xi_du = grad.transpose().matvec(xi);
            let varied_sq = grad.frob_sq()
                + 2.0 * xi_du.iter().zip(&dg).map(|(a, b)| a * b).sum::<f64>()
                + dg.iter().map(|v| v * v).sum::<f64>();
            varied_sup = varied_sup.max(varied_sq.max(0.0).sqrt());

            let d2g = bump.hess(d, &z);
            let mut hsq = 0.0;
            for a in 0..nt {
                for i1 in 0..n {
                    for j1 in 0..n {
                        let v = nodes.hessians[i].get(a, i1, j1) + xi[a] * d2g.get(i1, j1);
                        hsq += v * v;
                    }
                }
            }
            hess_bound = hess_bound.max(hsq.sqrt());
        }
        let margin = varied_sup - base_sup;
        let tol = cfg.tol_override.unwrap_or(2.0 * grid.max_spacing() * hess_bound);
        outcomes.push(VariationOutcome {
            label: format!("{} xi={:?}", bump.label, xi),
            amplitude: bump.delta,
            base_norm: base_sup,
            varied_norm: varied_sup,
            margin,
            tol,
            violation: margin < -tol,
        });
    }

    let base_norm = nodes.grads.iter().map(Mat::frob).fold(0.0, f64::max);
    Ok(VariationReport::from_outcomes("rank_one".into(), cfg.seed, base_norm, outcomes))
}

// ---------------------------------------------------------------------------
// Normal-area test
// ---------------------------------------------------------------------------

struct NormalNodes {
    grid: Grid,
    grads: Vec<Mat>,
    laplacians: Vec<Vec<f64>>,
    nus: Vec<Vec<f64>>,
    dnus: Vec<Mat>,
}

fn precompute_normal(map: &MapSpec, subdomain: &DomainBox, res: &[usize]) -> Result<NormalNodes> {
    if map.domain_dim() >= map.target_dim() {
        return Err(Error::Dimension(
            "normal variations need an immersion with n < N".into(),
        ));
    }
    let section = normal_section(map)?;
    let grid = Grid::new(subdomain.clone(), res.to_vec())?;
    let mut grads = Vec::with_capacity(grid.len());
    let mut laplacians = Vec::with_capacity(grid.len());
    let mut nus = Vec::with_capacity(grid.len());
    let mut dnus = Vec::with_capacity(grid.len());
    for (_, node) in grid.nodes() {
        let jet = map.jet(&node)?;
        let svd = svd_small(&jet.grad);
        let smin = svd.sigma.last().copied().unwrap_or(0.0);
        if smin <= 1e-10 * svd.sigma[0].max(1e-300) {
            return Err(Error::DegenerateImmersion(format!(
                "Du loses rank at {node:?} (σ_min = {smin:.3e})"
            )));
        }
        let (nu, dnu) = section.eval(&node)?;
        grads.push(jet.grad);
        laplacians.push(jet.hess.laplacian());
        nus.push(nu);
        dnus.push(dnu);
    }
    Ok(NormalNodes { grid, grads, laplacians, nus, dnus })
}

fn lp_norm(nodes: &NormalNodes, p: PNorm, grad_at: impl Fn(usize) -> f64) -> f64 {
    match p {
        PNorm::Infinity => (0..nodes.grid.len()).map(&grad_at).fold(0.0, f64::max),
        PNorm::Finite(p) => {
            let mut acc = 0.0;
            for i in 0..nodes.grid.len() {
                acc += nodes.grid.quadrature_weight(i) * grad_at(i).powf(p);
            }
            acc.powf(1.0 / p)
        }
    }
}

fn varied_grad_norm(nodes: &NormalNodes, i: usize, z: &[f64], b: &DomainBox, h: &ScalarField, delta: f64) -> f64 {
    let grad = &nodes.grads[i];
    let nu = &nodes.nus[i];
    let dnu = &nodes.dnus[i];
    let hv = h.value(b, z);
    let dh = h.grad(b, z);
    let nt = grad.rows();
    let n = grad.cols();
    let mut acc = 0.0;
    for a in 0..nt {
        for k in 0..n {
            let v = grad.get(a, k) + delta * (hv * dnu.get(a, k) + nu[a] * dh[k]);
            acc += v * v;
        }
    }
    acc.sqrt()
}

/// Normal-area minimality test in the `p` norm: seeded free-boundary
/// variations `u + δ·h·ν` along the (symbolic) unit normal.
pub fn normal_area_test(map: &MapSpec, cfg: &VariationConfig, p: PNorm) -> Result<VariationReport> {
    cfg.validate(map)?;
    if let PNorm::Finite(q) = p {
        if !(2.0..f64::INFINITY).contains(&q) {
            return Err(Error::Config(format!("p must lie in [2, ∞], got {q}")));
        }
    }
    let nodes = precompute_normal(map, &cfg.subdomain, &cfg.res)?;
    let d = &cfg.subdomain;
    let n = map.domain_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Constants lead the family; then axis-linear forms and low cosine modes.
    let mut fields: Vec<ScalarField> = vec![ScalarField::Constant(1.0), ScalarField::Constant(-1.0)];
    for k in 0..n {
        let mut coeffs = vec![0.0; n];
        coeffs[k] = 1.0;
        fields.push(ScalarField::Linear { coeffs: coeffs.clone(), offset: -0.5 });
        let mut modes = vec![0; n];
        modes[k] = 1;
        fields.push(ScalarField::CosProduct { modes });
    }
    fields.push(ScalarField::CosProduct { modes: vec![1; n] });

    let mut plan: Vec<(ScalarField, f64)> = Vec::new();
    for f in &fields {
        for &delta in &cfg.amplitudes {
            plan.push((f.clone(), delta));
        }
    }
    while plan.len() < cfg.count {
        let delta = cfg.amplitudes[rng.gen_range(0..cfg.amplitudes.len())];
        let f = match rng.gen_range(0..3) {
            0 => ScalarField::Constant(rng.gen_range(-1.0..1.0f64).signum()),
            1 => {
                let coeffs = unit_sphere_dir(&mut rng, n);
                ScalarField::Linear { coeffs, offset: rng.gen_range(-1.0..1.0) }
            }
            _ => {
                let modes: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
                ScalarField::CosProduct { modes }
            }
        };
        plan.push((f, delta));
    }
    plan.truncate(cfg.count);

    let base_norm = lp_norm(&nodes, p, |i| nodes.grads[i].frob());
    let tol = cfg.tol_override.unwrap_or(1e-9 * (1.0 + base_norm));

    let mut outcomes = Vec::with_capacity(plan.len());
    for (h, delta) in &plan {
        let varied = lp_norm(&nodes, p, |i| {
            let z = nodes.grid.node(i);
            varied_grad_norm(&nodes, i, &z, d, h, *delta)
        });
        let margin = varied - base_norm;
        outcomes.push(VariationOutcome {
            label: format!("{} {}", h.label(), p.label()),
            amplitude: *delta,
            base_norm,
            varied_norm: varied,
            margin,
            tol,
            violation: margin < -tol,
        });
    }
    Ok(VariationReport::from_outcomes(
        format!("normal_area[{}]", p.label()),
        cfg.seed,
        base_norm,
        outcomes,
    ))
}

// ---------------------------------------------------------------------------
// First and second variation of the p-energy under normal variations
// ---------------------------------------------------------------------------

/// Closed-form first variation at ε = 0 of `∫_D |D(u+εhν)|^p`:
/// `−p ∫_D |Du|^{p−2} (νᵀΔu) h`, by composite-trapezoid quadrature.
pub fn first_variation(
    map: &MapSpec,
    grid: &Grid,
    h: &ScalarField,
    nu: &NormalSection,
    p: f64,
) -> Result<f64> {
    if !(2.0..f64::INFINITY).contains(&p) {
        return Err(Error::Config(format!("first_variation needs finite p ≥ 2, got {p}")));
    }
    let b = grid.domain();
    let mut acc = 0.0;
    for (i, z) in grid.nodes() {
        let jet = map.jet(&z)?;
        let (nu_z, _) = nu.eval(&z)?;
        let lap = jet.hess.laplacian();
        let nu_lap: f64 = nu_z.iter().zip(&lap).map(|(a, b)| a * b).sum();
        let w = grid.quadrature_weight(i);
        acc += w * jet.grad.frob_sq().powf(0.5 * (p - 2.0)) * nu_lap * h.value(b, &z);
    }
    Ok(-p * acc)
}

/// Second variation of the p-energy at displacement ε:
/// `p∫|Dw|^{p−2}|D(hν)|² + p(p−2)∫|Dw|^{p−4}(Dw:D(hν))²` with `w = u+εhν`.
/// Nonnegative for every `p ≥ 2` (the energy is convex in ε).
pub fn second_variation(
    map: &MapSpec,
    grid: &Grid,
    h: &ScalarField,
    nu: &NormalSection,
    p: f64,
    eps: f64,
) -> Result<f64> {
    if p < 2.0 {
        return Err(Error::Config(format!("second_variation needs p ≥ 2, got {p}")));
    }
    let b = grid.domain();
    let mut acc = 0.0;
    for (i, z) in grid.nodes() {
        let (_, grad) = map.jet1(&z)?;
        let (nu_z, dnu) = nu.eval(&z)?;
        let hv = h.value(b, &z);
        let dh = h.grad(b, &z);
        let nt = grad.rows();
        let n = grad.cols();
        let mut dw_sq = 0.0;
        let mut b_sq = 0.0;
        let mut dw_dot_b = 0.0;
        for a in 0..nt {
            for k in 0..n {
                let bv = hv * dnu.get(a, k) + nu_z[a] * dh[k];
                let wv = grad.get(a, k) + eps * bv;
                dw_sq += wv * wv;
                b_sq += bv * bv;
                dw_dot_b += wv * bv;
            }
        }
        let w = grid.quadrature_weight(i);
        let mut term = dw_sq.powf(0.5 * (p - 2.0)) * b_sq;
        if p > 2.0 {
            term += (p - 2.0) * dw_sq.powf(0.5 * (p - 4.0)) * dw_dot_b * dw_dot_b;
        }
        acc += w * term;
    }
    Ok(p * acc)
}

/// `∫_D |D(u+εhν)|^p` by the same quadrature; the finite-difference oracle
/// for the two variation formulas differentiates this in ε.
pub fn normal_variation_energy(
    map: &MapSpec,
    grid: &Grid,
    h: &ScalarField,
    nu: &NormalSection,
    p: f64,
    eps: f64,
) -> Result<f64> {
    let b = grid.domain();
    let mut acc = 0.0;
    for (i, z) in grid.nodes() {
        let (_, grad) = map.jet1(&z)?;
        let (nu_z, dnu) = nu.eval(&z)?;
        let hv = h.value(b, &z);
        let dh = h.grad(b, &z);
        let mut dw_sq = 0.0;
        for a in 0..grad.rows() {
            for k in 0..grad.cols() {
                let bv = hv * dnu.get(a, k) + nu_z[a] * dh[k];
                let wv = grad.get(a, k) + eps * bv;
                dw_sq += wv * wv;
            }
        }
        acc += grid.quadrature_weight(i) * dw_sq.powf(0.5 * p);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Grid normal frame (SVD-based, any codimension)
// ---------------------------------------------------------------------------

/// Orthonormal basis of `null(Duᵀ)` per grid node, sign-aligned along a
/// spanning tree of the grid graph, with the frame's differential identities
/// validated by finite differences.
#[derive(Debug, Clone)]
pub struct NormalFrame {
    pub grid: Grid,
    pub codim: usize,
    /// Per node: an `N × codim` matrix whose columns are the frame vectors.
    pub vectors: Vec<Mat>,
    /// Max residual of `Dνᵀ Du = −νᵀ D²u` over interior nodes (FD in ν).
    pub shape_residual: f64,
    /// Max residual of `Dν : Du = −νᵀ Δu` over interior nodes (FD in ν).
    pub trace_residual: f64,
}

pub fn frame(map: &MapSpec, grid: &Grid) -> Result<NormalFrame> {
    let n = map.domain_dim();
    let nt = map.target_dim();
    if n >= nt {
        return Err(Error::Dimension("a frame needs an immersion with n < N".into()));
    }
    let codim = nt - n;

    let mut jets = Vec::with_capacity(grid.len());
    let mut raw: Vec<Mat> = Vec::with_capacity(grid.len());
    for (_, node) in grid.nodes() {
        let jet = map.jet(&node)?;
        let svd = svd_small(&jet.grad);
        let smin = svd.sigma.last().copied().unwrap_or(0.0);
        if smin <= 1e-10 * svd.sigma[0].max(1e-300) {
            return Err(Error::DegenerateImmersion(format!(
                "Du loses rank at {node:?}"
            )));
        }
        let range_cols: Vec<Vec<f64>> = (0..n).map(|j| svd.u.col(j)).collect();
        raw.push(orthonormal_complement(nt, &range_cols));
        jets.push(jet);
    }

    // Sign alignment along a BFS tree; ambiguous or anti-aligned neighbors
    // mean the patch is too coarse (or genuinely non-orientable).
    let mut vectors: Vec<Option<Mat>> = vec![None; grid.len()];
    vectors[0] = Some(raw[0].clone());
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let parent = vectors[i].clone().expect("visited");
        for j in grid.neighbors(i) {
            if vectors[j].is_some() {
                continue;
            }
            let mut aligned = raw[j].clone();
            for l in 0..codim {
                let dot: f64 = (0..nt).map(|r| parent.get(r, l) * aligned.get(r, l)).sum();
                if dot.abs() < 0.2 {
                    return Err(Error::Frame(format!(
                        "normals at neighboring nodes nearly orthogonal (⟨ν,ν⟩ = {dot:.3}); shrink the patch or refine the grid"
                    )));
                }
                if dot < 0.0 {
                    for r in 0..nt {
                        aligned.set(r, l, -aligned.get(r, l));
                    }
                }
            }
            vectors[j] = Some(aligned);
            queue.push_back(j);
        }
    }
    let vectors: Vec<Mat> = vectors.into_iter().map(|v| v.expect("grid connected")).collect();

    // Closing-edge consistency.
    for i in 0..grid.len() {
        for j in grid.neighbors(i) {
            for l in 0..codim {
                let dot: f64 = (0..nt).map(|r| vectors[i].get(r, l) * vectors[j].get(r, l)).sum();
                if dot <= 0.0 {
                    return Err(Error::Frame(
                        "sign alignment inconsistent around a grid cycle; shrink the patch".into(),
                    ));
                }
            }
        }
    }

    // Validate the frame identities with centered differences of ν.
    let mut shape_residual = 0.0f64;
    let mut trace_residual = 0.0f64;
    for i in 0..grid.len() {
        if grid.is_boundary(i) {
            continue;
        }
        let multi = grid.multi_index(i);
        for l in 0..codim {
            // Dν (N×n) by FD over grid neighbors.
            let mut dnu = Mat::zeros(nt, n);
            for k in 0..n {
                let mut up = multi.clone();
                up[k] += 1;
                let mut dn = multi.clone();
                dn[k] -= 1;
                let iu = grid.flat_index(&up);
                let id = grid.flat_index(&dn);
                for r in 0..nt {
                    let v = (vectors[iu].get(r, l) - vectors[id].get(r, l))
                        / (2.0 * grid.spacing(k));
                    dnu.set(r, k, v);
                }
            }
            let jet = &jets[i];
            // shape: Dνᵀ Du + νᵀ D²u = 0 (n×n)
            let lhs = dnu.transpose().matmul(&jet.grad);
            for i1 in 0..n {
                for j1 in 0..n {
                    let mut rhs = 0.0;
                    for a in 0..nt {
                        rhs += vectors[i].get(a, l) * jet.hess.get(a, i1, j1);
                    }
                    shape_residual = shape_residual.max((lhs.get(i1, j1) + rhs).abs());
                }
            }
            // trace: Dν : Du + νᵀ Δu = 0
            let mut dnu_du = 0.0;
            for a in 0..nt {
                for k in 0..n {
                    dnu_du += dnu.get(a, k) * jet.grad.get(a, k);
                }
            }
            let lap = jet.hess.laplacian();
            let nu_lap: f64 = (0..nt).map(|a| vectors[i].get(a, l) * lap[a]).sum();
            trace_residual = trace_residual.max((dnu_du + nu_lap).abs());
        }
    }

    Ok(NormalFrame { grid: grid.clone(), codim, vectors, shape_residual, trace_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;
    use crate::expr;

    fn sub_box(lo: [f64; 2], hi: [f64; 2]) -> DomainBox {
        DomainBox::new(lo.to_vec(), hi.to_vec()).unwrap()
    }

    #[test]
    fn paraboloid_outside_subdomain_is_a_config_error() {
        let d = sub_box([-0.5, -0.5], [0.5, 0.5]);
        assert!(matches!(
            Bump::paraboloid(vec![0.4, 0.0], 0.3, 0.1, &d),
            Err(Error::Config(_))
        ));
        assert!(Bump::paraboloid(vec![0.0, 0.0], 0.45, 0.1, &d).is_ok());
    }

    #[test]
    fn config_requires_compact_containment() {
        let m = catalog("affine").unwrap();
        let cfg = VariationConfig::new(sub_box([-1.0, -1.0], [1.0, 1.0]));
        assert!(matches!(rank_one_test(&m, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn rank_one_affine_every_margin_nonnegative() {
        let m = catalog("affine").unwrap();
        let mut cfg = VariationConfig::new(sub_box([-0.6, -0.6], [0.6, 0.6]));
        cfg.count = 120;
        let report = rank_one_test(&m, &cfg).unwrap();
        assert!(report.pass);
        // |Du| constant: the node-snapped critical-point argument is exact.
        assert!(report.worst_margin >= -1e-12, "worst {}", report.worst_margin);
    }

    #[test]
    fn rank_one_exp_diag_off_diagonal_passes() {
        let m = catalog("exp_diag").unwrap();
        let mut cfg = VariationConfig::new(sub_box([-0.8, 0.1], [-0.1, 0.8]));
        cfg.count = 150;
        let report = rank_one_test(&m, &cfg).unwrap();
        assert!(report.pass);
        assert!(report.worst_margin >= -1e-12);
        assert!((report.base_norm - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rank_one_detects_descent_on_non_harmonic_map() {
        // u(x,y) = (x², y): tangentially non-harmonic; a bump tilted along
        // -e1 lowers the sup once the descent clears the grid floor.
        let x = expr::Expr::var(0);
        let y = expr::Expr::var(1);
        let m = MapSpec::new(
            vec![expr::mul(x.clone(), x), y],
            DomainBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap(),
        )
        .unwrap();
        let mut cfg = VariationConfig::new(sub_box([0.2, -0.3], [0.8, 0.3]));
        cfg.res = vec![61, 61];
        cfg.count = 150;
        cfg.amplitudes = vec![0.1, 0.3, 0.5];
        let report = rank_one_test(&m, &cfg).unwrap();
        assert!(!report.pass, "expected violations, worst {}", report.worst_margin);
    }

    #[test]
    fn normal_area_catenoid_passes_all_p() {
        let m = catalog("catenoid").unwrap();
        let mut cfg = VariationConfig::new(sub_box([-0.7, 0.4], [0.7, 2.6]));
        cfg.count = 60;
        for p in [PNorm::Finite(2.0), PNorm::Finite(4.0), PNorm::Infinity] {
            let report = normal_area_test(&m, &cfg, p).unwrap();
            assert!(report.pass, "{:?}: worst {}", p, report.worst_margin);
        }
    }

    #[test]
    fn normal_area_sphere_fails_with_constant_h() {
        let m = catalog("sphere_stereo").unwrap();
        let mut cfg = VariationConfig::new(sub_box([-0.3, -0.3], [0.3, 0.3]));
        cfg.count = 40;
        let report = normal_area_test(&m, &cfg, PNorm::Finite(2.0)).unwrap();
        assert!(!report.pass);
        let const_violation = report
            .outcomes
            .iter()
            .any(|o| o.violation && o.label.starts_with("const"));
        assert!(const_violation, "constants should already violate");
    }

    #[test]
    fn normal_area_plane_margins_nonnegative() {
        let m = catalog("plane").unwrap();
        let mut cfg = VariationConfig::new(sub_box([-0.6, -0.6], [0.6, 0.6]));
        cfg.count = 50;
        for p in [PNorm::Finite(2.0), PNorm::Finite(3.0), PNorm::Infinity] {
            let report = normal_area_test(&m, &cfg, p).unwrap();
            assert!(report.pass);
            assert!(report.worst_margin >= -1e-12);
        }
    }

    #[test]
    fn normal_area_rejects_bad_exponent_and_submersions() {
        let m = catalog("catenoid").unwrap();
        let cfg = VariationConfig::new(sub_box([-0.7, 0.4], [0.7, 2.6]));
        assert!(normal_area_test(&m, &cfg, PNorm::Finite(1.5)).is_err());
        let scalar = catalog("aronsson_43").unwrap();
        let cfg = VariationConfig::new(DomainBox::new(vec![1.2, 1.2], vec![1.8, 1.8]).unwrap());
        assert!(matches!(
            normal_area_test(&scalar, &cfg, PNorm::Finite(2.0)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn first_variation_zero_on_minimal_and_matches_fd_on_sphere() {
        let cat = catalog("catenoid").unwrap();
        let grid = Grid::new(sub_box([-0.7, 0.4], [0.7, 2.6]), vec![21, 21]).unwrap();
        let nu = normal_section(&cat).unwrap();
        let h = ScalarField::CosProduct { modes: vec![1, 2] };
        let fv = first_variation(&cat, &grid, &h, &nu, 4.0).unwrap();
        assert!(fv.abs() < 1e-9, "catenoid first variation {fv}");

        let sph = catalog("sphere_stereo").unwrap();
        let grid = Grid::new(sub_box([-0.3, -0.3], [0.3, 0.3]), vec![21, 21]).unwrap();
        let nu = normal_section(&sph).unwrap();
        let h = ScalarField::Constant(1.0);
        for p in [2.0, 3.0, 8.0] {
            let closed = first_variation(&sph, &grid, &h, &nu, p).unwrap();
            let e = 1e-5;
            let ep = normal_variation_energy(&sph, &grid, &h, &nu, p, e).unwrap();
            let em = normal_variation_energy(&sph, &grid, &h, &nu, p, -e).unwrap();
            let fd = (ep - em) / (2.0 * e);
            let denom = closed.abs().max(fd.abs()).max(1.0);
            assert!(
                (closed - fd).abs() / denom < 1e-4,
                "p={p}: closed {closed} vs fd {fd}"
            );
            assert!(closed.abs() > 1e-3, "sphere first variation should be nonzero");
        }
    }

    #[test]
    fn first_variation_sign_lets_constants_descend_on_sphere() {
        // The violating h is the sign of νᵀΔu; with both constants in the
        // family one of them must give a negative first variation.
        let sph = catalog("sphere_stereo").unwrap();
        let grid = Grid::new(sub_box([-0.3, -0.3], [0.3, 0.3]), vec![21, 21]).unwrap();
        let nu = normal_section(&sph).unwrap();
        let plus = first_variation(&sph, &grid, &ScalarField::Constant(1.0), &nu, 2.0).unwrap();
        let minus = first_variation(&sph, &grid, &ScalarField::Constant(-1.0), &nu, 2.0).unwrap();
        assert!(plus.min(minus) < -1e-3);
        assert!((plus + minus).abs() < 1e-12);
    }

    #[test]
    fn second_variation_nonnegative_and_matches_fd() {
        let cat = catalog("catenoid").unwrap();
        let grid = Grid::new(sub_box([-0.7, 0.4], [0.7, 2.6]), vec![15, 15]).unwrap();
        let nu = normal_section(&cat).unwrap();
        for (h, p, eps) in [
            (ScalarField::Constant(1.0), 2.0, 0.0),
            (ScalarField::Linear { coeffs: vec![1.0, 0.0], offset: 0.0 }, 4.0, 0.0),
            (ScalarField::CosProduct { modes: vec![1, 1] }, 3.0, 0.05),
        ] {
            let sv = second_variation(&cat, &grid, &h, &nu, p, eps).unwrap();
            assert!(sv >= -1e-10, "second variation {sv}");
            let s = 1e-4;
            let e0 = normal_variation_energy(&cat, &grid, &h, &nu, p, eps).unwrap();
            let ep = normal_variation_energy(&cat, &grid, &h, &nu, p, eps + s).unwrap();
            let em = normal_variation_energy(&cat, &grid, &h, &nu, p, eps - s).unwrap();
            let fd = (ep - 2.0 * e0 + em) / (s * s);
            let denom = sv.abs().max(fd.abs()).max(1.0);
            assert!((sv - fd).abs() / denom < 1e-3, "sv {sv} vs fd {fd}");
        }
    }

    #[test]
    fn second_variation_zero_field_is_zero() {
        let cat = catalog("catenoid").unwrap();
        let grid = Grid::new(sub_box([-0.7, 0.4], [0.7, 2.6]), vec![9, 9]).unwrap();
        let nu = normal_section(&cat).unwrap();
        let sv = second_variation(&cat, &grid, &ScalarField::Constant(0.0), &nu, 4.0, 0.0)
            .unwrap();
        assert_eq!(sv, 0.0);
    }

    #[test]
    fn plane_second_variation_closed_form() {
        // On the flat plane Dν = 0, so the second variation at ε = 0 is
        // p·∫|Du|^{p−2}|ν⊗Dh|² = p·∫|Du|^{p-2}|Dh|².
        let m = catalog("plane").unwrap();
        let grid = Grid::new(sub_box([-0.6, -0.6], [0.6, 0.6]), vec![21, 21]).unwrap();
        let nu = normal_section(&m).unwrap();
        let h = ScalarField::Linear { coeffs: vec![1.0, 0.0], offset: 0.0 };
        let p = 4.0;
        let sv = second_variation(&m, &grid, &h, &nu, p, 0.0).unwrap();
        let mut direct = 0.0;
        for (i, z) in grid.nodes() {
            let (_, grad) = m.jet1(&z).unwrap();
            let dh = h.grad(grid.domain(), &z);
            let dh_sq: f64 = dh.iter().map(|v| v * v).sum();
            direct += grid.quadrature_weight(i) * grad.frob_sq().powf(0.5 * (p - 2.0)) * dh_sq;
        }
        direct *= p;
        assert!((sv - direct).abs() < 1e-12 * direct.max(1.0));
        assert!(sv > 0.0);
    }

    #[test]
    fn symbolic_normal_matches_hand_formula_on_catenoid() {
        // ν ∝ (cos t, sin t, −sinh s)/cosh s.
        let m = catalog("catenoid").unwrap();
        let nu = normal_section(&m).unwrap();
        let (s, t) = (0.3f64, 1.2f64);
        let (v, _) = nu.eval(&[s, t]).unwrap();
        let expect = [t.cos() / s.cosh(), t.sin() / s.cosh(), -s.sinh() / s.cosh()];
        let sign = v[0].signum() * expect[0].signum();
        for k in 0..3 {
            assert!((v[k] - sign * expect[k]).abs() < 1e-12);
        }
        // Orthogonality to the tangent plane is exact by construction.
        let (_, grad) = m.jet1(&[s, t]).unwrap();
        let dotc = |col: Vec<f64>| -> f64 { col.iter().zip(&v).map(|(a, b)| a * b).sum() };
        assert!(dotc(grad.col(0)).abs() < 1e-15);
        assert!(dotc(grad.col(1)).abs() < 1e-15);
    }

    #[test]
    fn frame_matches_symbolic_normal_and_validates_identities() {
        let m = catalog("catenoid").unwrap();
        let grid = Grid::new(sub_box([-0.7, 0.4], [0.7, 2.6]), vec![21, 21]).unwrap();
        let fr = frame(&m, &grid).unwrap();
        assert_eq!(fr.codim, 1);
        assert!(fr.trace_residual <= 1e-4, "trace residual {}", fr.trace_residual);
        assert!(fr.shape_residual <= 1e-4, "shape residual {}", fr.shape_residual);
        // Unit vectors orthogonal to the range.
        for (i, node) in grid.nodes() {
            let (_, grad) = m.jet1(&node).unwrap();
            let col = fr.vectors[i].col(0);
            assert!((norm(&col) - 1.0).abs() < 1e-12);
            for k in 0..2 {
                let d: f64 = grad.col(k).iter().zip(&col).map(|(a, b)| a * b).sum();
                assert!(d.abs() < 1e-9);
            }
        }
        // Neighbor alignment.
        for i in 0..grid.len() {
            for j in grid.neighbors(i) {
                let d: f64 = fr.vectors[i]
                    .col(0)
                    .iter()
                    .zip(&fr.vectors[j].col(0))
                    .map(|(a, b)| a * b)
                    .sum();
                assert!(d > 0.0);
            }
        }
    }

    #[test]
    fn frame_constant_on_plane_and_enneper_origin_normal() {
        let m = catalog("plane").unwrap();
        let grid = Grid::new(sub_box([-0.6, -0.6], [0.6, 0.6]), vec![9, 9]).unwrap();
        let fr = frame(&m, &grid).unwrap();
        for v in &fr.vectors {
            let col = v.col(0);
            assert!(col[0].abs() < 1e-14 && col[1].abs() < 1e-14);
            assert!((col[2].abs() - 1.0).abs() < 1e-14);
        }
        assert!(fr.shape_residual < 1e-12);

        let enneper = catalog("enneper").unwrap();
        let nu = normal_section(&enneper).unwrap();
        let (v, _) = nu.eval(&[0.0, 0.0]).unwrap();
        assert!(v[0].abs() < 1e-14 && v[1].abs() < 1e-14);
        assert!((v[2].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coarse_patch_fails_frame_alignment() {
        // Two nodes spanning t ∈ [0, 3] rotate the normal by 1.5 rad per
        // step; neighbors become nearly orthogonal and alignment must bail.
        let m = catalog("catenoid").unwrap();
        let grid = Grid::new(sub_box([-0.7, 0.0], [0.7, 3.0]), vec![3, 3]).unwrap();
        assert!(matches!(frame(&m, &grid), Err(Error::Frame(_))));
    }

    #[test]
    fn reports_serialize_and_export() {
        let m = catalog("affine").unwrap();
        let mut cfg = VariationConfig::new(sub_box([-0.5, -0.5], [0.5, 0.5]));
        cfg.count = 12;
        let report = rank_one_test(&m, &cfg).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"worst_margin\""));
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), report.outcomes.len() + 1);
    }
}
