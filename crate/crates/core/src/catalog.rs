//! Built-in test maps: closed-form solutions, classical minimal surfaces in
//! isothermal coordinates, and a couple of deliberate counterexamples.
//!
//! Domain boxes are chosen so every entry is C² and full rank on its box
//! (the fractional-power entry stays away from the axes where second
//! derivatives blow up).

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::map::{DomainBox, MapSpec};
use crate::tensor::Mat;
use std::sync::Arc;

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: &[&str] = &[
    "affine",
    "exp_diag",
    "aronsson_43",
    "catenoid",
    "helicoid",
    "enneper",
    "sphere_stereo",
    "cylinder",
    "plane",
    "bowl",
    "curve_affine",
    "curve_circle",
];

/// Surface entries (n = 2 → N = 3) used by the geometry sweeps.
pub const SURFACE_NAMES: &[&str] =
    &["catenoid", "helicoid", "enneper", "sphere_stereo", "cylinder", "plane"];

/// Affine map `x ↦ A·x + b` on the given box.
pub fn affine_map(a: &Mat, b: &[f64], domain: DomainBox) -> Result<MapSpec> {
    if a.rows() != b.len() || a.cols() != domain.dim() {
        return Err(Error::Dimension("affine map shape mismatch".into()));
    }
    let comps = (0..a.rows())
        .map(|r| {
            let mut acc: Arc<Expr> = Expr::constant(b[r]);
            for c in 0..a.cols() {
                acc = expr::add(acc, expr::mul(Expr::constant(a.get(r, c)), Expr::var(c)));
            }
            acc
        })
        .collect();
    MapSpec::new(comps, domain)
}

fn sym_box(half_width: f64) -> DomainBox {
    DomainBox::new(vec![-half_width, -half_width], vec![half_width, half_width]).unwrap()
}

/// Look up a named catalog map.
pub fn catalog(name: &str) -> Result<MapSpec> {
    let x = || Expr::var(0);
    let y = || Expr::var(1);
    let c = Expr::constant;
    use expr::{add, cos, cosh, div, mul, neg, pow, sin, sinh, sub};

    let spec = match name {
        "affine" => {
            let a = Mat::from_rows(&[vec![1.0, 0.5], vec![-0.25, 1.0]]);
            affine_map(&a, &[0.2, -0.1], sym_box(1.0))?
        }
        // (cos x − cos y, sin x − sin y): |Du|² ≡ 2, rank 1 exactly on x = y.
        "exp_diag" => MapSpec::new(
            vec![sub(cos(x()), cos(y())), sub(sin(x()), sin(y()))],
            sym_box(1.0),
        )?,
        // Scalar x^{4/3} − y^{4/3}; box excludes the axes so the map stays C².
        "aronsson_43" => MapSpec::new(
            vec![sub(pow(x(), 4.0 / 3.0), pow(y(), 4.0 / 3.0))],
            DomainBox::new(vec![1.0, 1.0], vec![2.0, 2.0])?,
        )?,
        // (cosh s cos t, cosh s sin t, s): isothermal, f² = cosh²s, Δu = 0.
        "catenoid" => MapSpec::new(
            vec![mul(cosh(x()), cos(y())), mul(cosh(x()), sin(y())), x()],
            DomainBox::new(vec![-1.0, 0.0], vec![1.0, 3.0])?,
        )?,
        // (sinh s cos t, sinh s sin t, t): isothermal, f² = cosh²s, Δu = 0.
        "helicoid" => MapSpec::new(
            vec![mul(sinh(x()), cos(y())), mul(sinh(x()), sin(y())), y()],
            DomainBox::new(vec![-1.0, 0.0], vec![1.0, 3.0])?,
        )?,
        // (x − x³/3 + x y², −y + y³/3 − x² y, x² − y²): f = 1 + x² + y².
        "enneper" => MapSpec::new(
            vec![
                add(sub(x(), div(pow(x(), 3.0), c(3.0))), mul(x(), pow(y(), 2.0))),
                sub(add(neg(y()), div(pow(y(), 3.0), c(3.0))), mul(pow(x(), 2.0), y())),
                sub(pow(x(), 2.0), pow(y(), 2.0)),
            ],
            sym_box(1.0),
        )?,
        // Inverse stereographic projection of the unit sphere: f = 2/(1+x²+y²).
        "sphere_stereo" => {
            let denom = || add(c(1.0), add(pow(x(), 2.0), pow(y(), 2.0)));
            MapSpec::new(
                vec![
                    div(mul(c(2.0), x()), denom()),
                    div(mul(c(2.0), y()), denom()),
                    div(sub(add(pow(x(), 2.0), pow(y(), 2.0)), c(1.0)), denom()),
                ],
                sym_box(1.0),
            )?
        }
        // (cos x, sin x, y): flat (|Du|² ≡ 2) but not minimal (|H| = 1/2).
        "cylinder" => MapSpec::new(
            vec![cos(x()), sin(x()), y()],
            DomainBox::new(vec![0.0, -1.0], vec![3.0, 1.0])?,
        )?,
        "plane" => MapSpec::new(vec![x(), y(), c(0.0)], sym_box(1.0))?,
        // Scalar x² + y²: |Du| vanishes at the origin; the control case for
        // the minimum-principle scan.
        "bowl" => MapSpec::new(vec![add(pow(x(), 2.0), pow(y(), 2.0))], sym_box(1.0))?,
        "curve_affine" => MapSpec::new(
            vec![add(mul(c(1.5), x()), c(0.25)), add(mul(c(-0.75), x()), c(1.0))],
            DomainBox::new(vec![-1.0], vec![1.0])?,
        )?,
        "curve_circle" => MapSpec::new(
            vec![cos(x()), sin(x())],
            DomainBox::new(vec![0.0], vec![3.0])?,
        )?,
        other => return Err(Error::UnknownMap(other.to_string())),
    };
    Ok(spec.with_name(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Mat;

    #[test]
    fn unknown_name_is_an_error() {
        assert!(matches!(catalog("torus"), Err(Error::UnknownMap(_))));
    }

    #[test]
    fn all_names_resolve_and_evaluate() {
        for &name in CATALOG_NAMES {
            let m = catalog(name).unwrap();
            let center = m.domain().center();
            let j = m.jet(&center).unwrap();
            assert!(j.value.iter().all(|v| v.is_finite()), "{name}");
            assert_eq!(j.hess.symmetry_defect(), 0.0, "{name}");
        }
    }

    #[test]
    fn exp_diag_gradient_norm_is_two() {
        let m = catalog("exp_diag").unwrap();
        for p in [[0.3, -0.6], [0.9, 0.9], [-0.2, 0.4]] {
            let j = m.jet(&p).unwrap();
            assert!((j.grad.frob_sq() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn catenoid_metric_is_conformal() {
        // Du^T Du = cosh²(s)·I: hand check u_s·u_t = 0, |u_s|² = |u_t|² = cosh²s.
        let m = catalog("catenoid").unwrap();
        let j = m.jet(&[0.3, 1.0]).unwrap();
        let g = j.grad.transpose().matmul(&j.grad);
        let f2 = 0.3f64.cosh().powi(2);
        let expect = Mat::from_rows(&[vec![f2, 0.0], vec![0.0, f2]]);
        assert!(g.sub(&expect).max_abs() < 1e-14);
    }

    #[test]
    fn sphere_stereo_conformal_factor() {
        // Du^T Du = f²·I with f = 2/(1+x²+y²).
        let m = catalog("sphere_stereo").unwrap();
        let (x, y) = (0.35f64, -0.8f64);
        let j = m.jet(&[x, y]).unwrap();
        let g = j.grad.transpose().matmul(&j.grad);
        let f = 2.0 / (1.0 + x * x + y * y);
        assert!((g.get(0, 0) - f * f).abs() < 1e-13);
        assert!((g.get(1, 1) - f * f).abs() < 1e-13);
        assert!(g.get(0, 1).abs() < 1e-13);
    }

    #[test]
    fn aronsson_tangential_cancellation() {
        // Du⊗Du:D²u = u_x²u_xx + 2u_xu_yu_xy + u_y²u_yy = 64/81 − 64/81 = 0.
        let m = catalog("aronsson_43").unwrap();
        for p in [[1.3, 1.3], [1.1, 1.9], [1.75, 1.2]] {
            let j = m.jet(&p).unwrap();
            let ux = j.grad.get(0, 0);
            let uy = j.grad.get(0, 1);
            let mut acc = 0.0;
            for i in 0..2 {
                for k in 0..2 {
                    let gi = if i == 0 { ux } else { uy };
                    let gk = if k == 0 { ux } else { uy };
                    acc += gi * gk * j.hess.get(0, i, k);
                }
            }
            assert!(acc.abs() < 1e-13, "residual {acc} at {p:?}");
        }
    }

    #[test]
    fn curve_affine_has_zero_second_derivative() {
        let m = catalog("curve_affine").unwrap();
        let j = m.jet(&[0.4]).unwrap();
        assert_eq!(j.hess.max_abs(), 0.0);
    }

    #[test]
    fn symbolic_and_fd_jets_agree_on_catalog() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for &name in CATALOG_NAMES {
            let m = catalog(name).unwrap();
            let lo = &m.domain().lo;
            let hi = &m.domain().hi;
            for _ in 0..50 {
                let x: Vec<f64> = lo
                    .iter()
                    .zip(hi)
                    .map(|(l, h)| {
                        let w = h - l;
                        rng.gen_range(l + 0.05 * w..h - 0.05 * w)
                    })
                    .collect();
                let sym = m.jet(&x).unwrap();
                let fd = m.jet_fd(&x).unwrap();
                let scale = 1.0 + sym.value.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!(
                    fd.grad.sub(&sym.grad).max_abs() / scale < 1e-5,
                    "{name}: gradient mismatch at {x:?}"
                );
                let mut hess_diff = 0.0f64;
                for a in 0..m.target_dim() {
                    for i in 0..m.domain_dim() {
                        for j in 0..m.domain_dim() {
                            hess_diff =
                                hess_diff.max((fd.hess.get(a, i, j) - sym.hess.get(a, i, j)).abs());
                        }
                    }
                }
                assert!(hess_diff / scale < 1e-3, "{name}: hessian mismatch at {x:?}");
            }
        }
    }
}
