//! Maps `u : Ω ⊂ ℝⁿ → ℝᴺ` defined by symbolic expression trees, with exact
//! 2-jets (value, gradient matrix, Hessian tensor) and an independent
//! finite-difference jet used only as a cross-check oracle.

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::tensor::{Mat, Ten3};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Axis-aligned box in ℝⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Dimension("box bounds must have equal nonzero length".into()));
        }
        for (l, h) in lo.iter().zip(&hi) {
            if !(l < h) || !l.is_finite() || !h.is_finite() {
                return Err(Error::Config(format!("invalid box bounds [{l}, {h}]")));
            }
        }
        Ok(DomainBox { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (l, h))| *v >= *l && *v <= *h)
    }

    /// Distance from `x` to the nearest face (negative outside).
    pub fn face_distance(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(v, (l, h))| (v - l).min(h - v))
            .fold(f64::INFINITY, f64::min)
    }

    /// True when the closure of `other` lies strictly inside this box.
    pub fn strictly_contains(&self, other: &DomainBox) -> bool {
        self.dim() == other.dim()
            && other
                .lo
                .iter()
                .zip(&other.hi)
                .zip(self.lo.iter().zip(&self.hi))
                .all(|((ol, oh), (l, h))| *ol > *l && *oh < *h)
    }

    pub fn widths(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.widths().iter().map(|w| w * w).sum::<f64>().sqrt()
    }
}

/// Pointwise 2-jet of a map: value, gradient `Du` and Hessian `D²u`.
#[derive(Debug, Clone)]
pub struct Jet2 {
    pub point: Vec<f64>,
    pub value: Vec<f64>,
    pub grad: Mat,
    pub hess: Ten3,
}

/// A map defined by one expression tree per target component, together with
/// its domain box. First and second derivative trees are precomputed at
/// construction; evaluation is reentrant and the whole value is immutable.
#[derive(Debug, Clone)]
pub struct MapSpec {
    name: Option<String>,
    domain_dim: usize,
    target_dim: usize,
    components: Vec<Arc<Expr>>,
    grads: Vec<Vec<Arc<Expr>>>,         // [α][i]
    hessians: Vec<Vec<Vec<Arc<Expr>>>>, // [α][i][j]
    domain: DomainBox,
}

impl MapSpec {
    pub fn new(components: Vec<Arc<Expr>>, domain: DomainBox) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Dimension("a map needs at least one component".into()));
        }
        let domain_dim = domain.dim();
        let target_dim = components.len();
        let grads: Vec<Vec<Arc<Expr>>> = components
            .iter()
            .map(|c| (0..domain_dim).map(|i| c.diff(i)).collect())
            .collect();
        let hessians: Vec<Vec<Vec<Arc<Expr>>>> = grads
            .iter()
            .map(|g| {
                g.iter()
                    .map(|gi| (0..domain_dim).map(|j| gi.diff(j)).collect())
                    .collect()
            })
            .collect();
        Ok(MapSpec { name: None, domain_dim, target_dim, components, grads, hessians, domain })
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn components(&self) -> &[Arc<Expr>] {
        &self.components
    }

    pub fn value(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    fn check_in_domain(&self, x: &[f64]) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(Error::Domain(format!("point {x:?} outside the domain box")));
        }
        Ok(())
    }

    /// Value and exact gradient only (no Hessian); the cheap path for flow
    /// integration and grid sweeps that do not need second derivatives.
    pub fn jet1(&self, x: &[f64]) -> Result<(Vec<f64>, Mat)> {
        self.check_in_domain(x)?;
        let value = self.value(x)?;
        let mut grad = Mat::zeros(self.target_dim, self.domain_dim);
        for (a, g) in self.grads.iter().enumerate() {
            for (i, gi) in g.iter().enumerate() {
                grad.set(a, i, gi.eval(x)?);
            }
        }
        Ok((value, grad))
    }

    /// Exact symbolic 2-jet at `x`.
    pub fn jet(&self, x: &[f64]) -> Result<Jet2> {
        let (value, grad) = self.jet1(x)?;
        let mut hess = Ten3::zeros(self.target_dim, self.domain_dim);
        for (a, h) in self.hessians.iter().enumerate() {
            for (i, hi) in h.iter().enumerate() {
                for (j, hij) in hi.iter().enumerate() {
                    hess.set(a, i, j, hij.eval(x)?);
                }
            }
        }
        Ok(Jet2 { point: x.to_vec(), value, grad, hess })
    }

    /// Central finite-difference 2-jet, step `1e-4·(1+|x|)`. Kept independent
    /// of the symbolic path so the two can cross-validate each other.
    pub fn jet_fd(&self, x: &[f64]) -> Result<Jet2> {
        self.check_in_domain(x)?;
        let norm_x = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let h = 1e-4 * (1.0 + norm_x);
        if self.domain.face_distance(x) < 2.0 * h {
            return Err(Error::Domain(format!(
                "point {x:?} closer than 2h = {:.3e} to the box faces",
                2.0 * h
            )));
        }
        let n = self.domain_dim;
        let nt = self.target_dim;
        let value = self.value(x)?;
        let mut grad = Mat::zeros(nt, n);
        let mut hess = Ten3::zeros(nt, n);
        let shift = |x: &[f64], i: usize, s: f64| {
            let mut y = x.to_vec();
            y[i] += s;
            y
        };
        for i in 0..n {
            let up = self.value(&shift(x, i, h))?;
            let dn = self.value(&shift(x, i, -h))?;
            for a in 0..nt {
                grad.set(a, i, (up[a] - dn[a]) / (2.0 * h));
                hess.set(a, i, i, (up[a] - 2.0 * value[a] + dn[a]) / (h * h));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let pp = self.value(&shift(&shift(x, i, h), j, h))?;
                let pm = self.value(&shift(&shift(x, i, h), j, -h))?;
                let mp = self.value(&shift(&shift(x, i, -h), j, h))?;
                let mm = self.value(&shift(&shift(x, i, -h), j, -h))?;
                for a in 0..nt {
                    let v = (pp[a] - pm[a] - mp[a] + mm[a]) / (4.0 * h * h);
                    hess.set(a, i, j, v);
                    hess.set(a, j, i, v);
                }
            }
        }
        Ok(Jet2 { point: x.to_vec(), value, grad, hess })
    }

    /// Post-compose with a linear target map: `x ↦ Q·u(x)`.
    pub fn compose_target_linear(&self, q: &Mat) -> Result<MapSpec> {
        if q.cols() != self.target_dim {
            return Err(Error::Dimension("target composition dimension mismatch".into()));
        }
        let comps = (0..q.rows())
            .map(|r| {
                let mut acc = Expr::constant(0.0);
                for (c, comp) in self.components.iter().enumerate() {
                    acc = expr::add(acc, expr::mul(Expr::constant(q.get(r, c)), comp.clone()));
                }
                acc
            })
            .collect();
        MapSpec::new(comps, self.domain.clone())
    }

    /// Pre-compose with a linear change of parameters: `z ↦ u(L·z)` on the
    /// given box.
    pub fn reparam_linear(&self, l: &Mat, domain: DomainBox) -> Result<MapSpec> {
        if l.rows() != self.domain_dim || l.cols() != domain.dim() {
            return Err(Error::Dimension("reparametrization dimension mismatch".into()));
        }
        let subs: Vec<Arc<Expr>> = (0..l.rows())
            .map(|r| {
                let mut acc = Expr::constant(0.0);
                for c in 0..l.cols() {
                    acc = expr::add(acc, expr::mul(Expr::constant(l.get(r, c)), Expr::var(c)));
                }
                acc
            })
            .collect();
        let comps = self.components.iter().map(|c| c.substitute(&subs)).collect();
        MapSpec::new(comps, domain)
    }

    /// Serialize to the JSON document format (prefix-syntax component strings).
    pub fn to_json(&self) -> String {
        let doc = MapSpecJson {
            n: self.domain_dim,
            target: self.target_dim,
            components: self.components.iter().map(|c| c.to_prefix()).collect(),
            domain: self.domain.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("map serialization")
    }

    pub fn from_json(text: &str) -> Result<MapSpec> {
        let doc: MapSpecJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("map JSON: {e}")))?;
        if doc.components.len() != doc.target {
            return Err(Error::Parse(format!(
                "map JSON declares N={} but has {} components",
                doc.target,
                doc.components.len()
            )));
        }
        if doc.domain.dim() != doc.n {
            return Err(Error::Parse("map JSON box dimension differs from n".into()));
        }
        let comps = doc
            .components
            .iter()
            .map(|s| expr::parse(s, doc.n))
            .collect::<Result<Vec<_>>>()?;
        MapSpec::new(comps, doc.domain)
    }
}

#[derive(Serialize, Deserialize)]
struct MapSpecJson {
    n: usize,
    #[serde(rename = "N")]
    target: usize,
    components: Vec<String>,
    #[serde(rename = "box")]
    domain: DomainBox,
}
