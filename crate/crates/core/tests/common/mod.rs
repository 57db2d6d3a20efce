//! Brute-force oracles built on finite differences of the map alone.
//!
//! Nothing here goes through the frame or jet pipelines of the library:
//! second fundamental forms are ambient vectors obtained by projecting the
//! difference-quotient Hessian, and curvature comes from differencing the
//! metric.

#![allow(dead_code)]

use qxr_core::derivatives::finite_difference_oracle;
use qxr_core::linalg::{self, Mat};
use qxr_core::ParametricImmersion;

pub const STEP: f64 = 1e-2;

/// Extrinsic data at one point from difference quotients.
pub struct FdGeom {
    pub eps: f64,
    pub point: Vec<f64>,
    /// `∂_i f`
    pub d: Vec<Vec<f64>>,
    pub g: Mat<f64>,
    pub ginv: Mat<f64>,
    pub nbar: Vec<f64>,
    /// `α(∂_i, ∂_j)` as container vectors.
    pub alpha: Vec<Vec<Vec<f64>>>,
    /// Chart components of `∇_{∂_i} ∂_j`.
    pub christoffel: Vec<Vec<Vec<f64>>>,
    /// Chart components of `T`.
    pub t: Vec<f64>,
    pub eta: Vec<f64>,
}

pub fn inner(eps: f64, a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        s += if k == 0 && eps < 0.0 { -x * y } else { x * y };
    }
    s
}

impl FdGeom {
    pub fn new(f: &ParametricImmersion, u: &[f64]) -> FdGeom {
        let eps = f.space.eps();
        let dt = finite_difference_oracle(&f.map, u, 2, STEP).expect("stencil inside chart");
        let m = u.len();
        let dim = dt.value.len();
        let mut nbar = dt.value.clone();
        nbar[dim - 1] = 0.0;
        let g: Mat<f64> = (0..m)
            .map(|i| (0..m).map(|j| inner(eps, &dt.jacobian[i], &dt.jacobian[j])).collect())
            .collect();
        let ginv = linalg::inverse(&g).expect("regular");
        let mut geo = FdGeom {
            eps,
            point: dt.value.clone(),
            d: dt.jacobian.clone(),
            g,
            ginv,
            nbar,
            alpha: Vec::new(),
            christoffel: Vec::new(),
            t: Vec::new(),
            eta: Vec::new(),
        };
        geo.alpha = (0..m)
            .map(|i| (0..m).map(|j| geo.normal_part(&dt.hessian[i][j])).collect())
            .collect();
        geo.christoffel = (0..m)
            .map(|i| (0..m).map(|j| geo.tangent_components(&dt.hessian[i][j])).collect())
            .collect();
        let mut vertical = vec![0.0; dim];
        vertical[dim - 1] = 1.0;
        geo.t = geo.tangent_components(&vertical);
        geo.eta = geo.normal_part(&vertical);
        geo
    }

    pub fn m(&self) -> usize {
        self.d.len()
    }

    pub fn tangent_components(&self, v: &[f64]) -> Vec<f64> {
        let m = self.m();
        let w: Vec<f64> = self.d.iter().map(|x| inner(self.eps, v, x)).collect();
        (0..m).map(|i| (0..m).map(|j| self.ginv[i][j] * w[j]).sum()).collect()
    }

    pub fn tangent_vector(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.point.len()];
        for (ci, x) in c.iter().zip(&self.d) {
            linalg::axpy(*ci, x, &mut out);
        }
        out
    }

    /// Component normal to `f` inside `Q × R`.
    pub fn normal_part(&self, v: &[f64]) -> Vec<f64> {
        let tan = self.tangent_vector(&self.tangent_components(v));
        let c = inner(self.eps, v, &self.nbar) / self.eps;
        (0..v.len()).map(|k| v[k] - tan[k] - c * self.nbar[k]).collect()
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        inner(self.eps, a, b)
    }

    /// Shape operator `A_ξ` in chart components (`[i][j]`: component `i` of `A_ξ ∂_j`).
    pub fn shape(&self, xi: &[f64]) -> Mat<f64> {
        let m = self.m();
        let low: Mat<f64> = (0..m)
            .map(|i| (0..m).map(|j| self.inner(&self.alpha[i][j], xi)).collect())
            .collect();
        linalg::matmul(&self.ginv, &low)
    }

    /// Sum over `i, j` of `g^{..}`-contracted `‖R⊥(∂_i, ∂_j)‖²_F`, computed
    /// from `R⊥(X, Y) = Σ α(X, e_k) ∧ α(Y, e_k)` through Gram determinants,
    /// which needs no normal frame.
    pub fn normal_curvature_norm2(&self) -> f64 {
        let m = self.m();
        // orthonormal tangent basis as chart components
        let e = orthonormal(&self.g);
        let al = |x: &[f64], y: &[f64]| {
            let mut out = vec![0.0; self.point.len()];
            for i in 0..m {
                for j in 0..m {
                    linalg::axpy(x[i] * y[j], &self.alpha[i][j], &mut out);
                }
            }
            out
        };
        let mut total = 0.0;
        for a in 0..m {
            for b in 0..m {
                let u: Vec<Vec<f64>> = (0..m).map(|k| al(&e[a], &e[k])).collect();
                let v: Vec<Vec<f64>> = (0..m).map(|k| al(&e[b], &e[k])).collect();
                for k in 0..m {
                    for l in 0..m {
                        total += 2.0
                            * (self.inner(&u[k], &u[l]) * self.inner(&v[k], &v[l])
                                - self.inner(&u[k], &v[l]) * self.inner(&u[l], &v[k]));
                    }
                }
            }
        }
        total
    }
}

/// Rows are chart components of a `g`-orthonormal basis.
pub fn orthonormal(g: &Mat<f64>) -> Vec<Vec<f64>> {
    let m = g.len();
    let ip = |a: &[f64], b: &[f64]| -> f64 {
        (0..m).map(|i| (0..m).map(|j| a[i] * g[i][j] * b[j]).sum::<f64>()).sum()
    };
    let mut out: Vec<Vec<f64>> = Vec::new();
    for k in 0..m {
        let mut v = vec![0.0; m];
        v[k] = 1.0;
        for b in &out {
            let c = ip(&v, b);
            linalg::axpy(-c, b, &mut v);
        }
        let n = ip(&v, &v).sqrt();
        out.push(v.into_iter().map(|x| x / n).collect());
    }
    out
}

fn shifted(u: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut v = u.to_vec();
    v[i] += h;
    v
}

/// Central difference with one Richardson step of a vector-valued function.
pub fn richardson<F: Fn(&[f64]) -> Vec<f64>>(u: &[f64], i: usize, h: f64, f: F) -> Vec<f64> {
    let d = |h: f64| -> Vec<f64> {
        let p = f(&shifted(u, i, h));
        let q = f(&shifted(u, i, -h));
        p.iter().zip(&q).map(|(a, b)| (a - b) / (2.0 * h)).collect()
    };
    let coarse = d(h);
    let fine = d(h / 2.0);
    coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
}

/// `(∇⊥_{∂_i} α)(∂_j, ∂_k)` as a container vector, by differencing `α` over
/// neighbouring points.
pub fn cov_alpha(f: &ParametricImmersion, u: &[f64], i: usize, j: usize, k: usize) -> Vec<f64> {
    let here = FdGeom::new(f, u);
    let d = richardson(u, i, STEP, |v| FdGeom::new(f, v).alpha[j][k].clone());
    let mut out = here.normal_part(&d);
    let m = u.len();
    for l in 0..m {
        linalg::axpy(-here.christoffel[i][j][l], &here.alpha[l][k], &mut out);
        linalg::axpy(-here.christoffel[i][k][l], &here.alpha[j][l], &mut out);
    }
    out
}

/// Eigenvalues of `g^{-1} Ric` from the metric alone: Christoffel symbols
/// and their derivatives by nested differences.
pub fn ricci_eigenvalues(f: &ParametricImmersion, u: &[f64]) -> Vec<f64> {
    let m = u.len();
    let gamma_at = |v: &[f64]| -> Vec<f64> {
        let geo = FdGeom::new(f, v);
        let mut flat = Vec::with_capacity(m * m * m);
        for i in 0..m {
            for j in 0..m {
                flat.extend_from_slice(&geo.christoffel[i][j]);
            }
        }
        flat
    };
    let idx = |i: usize, j: usize, l: usize| (i * m + j) * m + l;
    let gam = gamma_at(u);
    let dgam: Vec<Vec<f64>> = (0..m).map(|k| richardson(u, k, STEP, gamma_at)).collect();
    let g = FdGeom::new(f, u).g;
    // Ric_jk = ∂_l Γ^l_jk − ∂_j Γ^l_lk + Γ^l_lp Γ^p_jk − Γ^l_jp Γ^p_lk
    let mut ric = vec![vec![0.0; m]; m];
    for j in 0..m {
        for k in 0..m {
            let mut s = 0.0;
            for l in 0..m {
                s += dgam[l][idx(j, k, l)] - dgam[j][idx(l, k, l)];
                for p in 0..m {
                    s += gam[idx(l, p, l)] * gam[idx(j, k, p)] - gam[idx(j, p, l)] * gam[idx(l, k, p)];
                }
            }
            ric[j][k] = s;
        }
    }
    // symmetric form in a g-orthonormal basis
    let e = orthonormal(&g);
    let sym: Mat<f64> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| (0..m).map(|j| (0..m).map(|k| e[a][j] * ric[j][k] * e[b][k]).sum::<f64>()).sum())
                .collect()
        })
        .collect();
    linalg::symmetric_eigen(&sym).0
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
