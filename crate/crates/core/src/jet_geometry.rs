//! The frame pipeline run in jet scalars: derivatives of frames, of the
//! second fundamental form and of the vertical split along the chart, from
//! which covariant derivatives and curvatures follow.

use std::sync::OnceLock;

use crate::ambient::AmbientSpace;
use crate::derivatives::ChartMap;
use crate::error::{GeomError, Result};
use crate::frame::{build_frame, Frame};
use crate::immersion::{check_regular, ParametricImmersion, PointGeometry};
use crate::jet::Jet;
use crate::linalg::{self, Mat};
use crate::tolerance;

/// Invariants at a point together with their first derivatives along the chart.
pub struct JetGeometry {
    space: AmbientSpace,
    frame: Frame<Jet>,
    values: PointGeometry,
    connection: OnceLock<Vec<Vec<Vec<f64>>>>,
    cov_alpha: OnceLock<Vec<Vec<Vec<Vec<f64>>>>>,
    riemann: OnceLock<Vec<Vec<Vec<Vec<f64>>>>>,
    normal_curvature: OnceLock<Vec<Vec<Mat<f64>>>>,
}

impl std::fmt::Debug for JetGeometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("JetGeometry").field("u", &self.values.u).finish()
    }
}

fn directional(j: &Jet, w: &[f64]) -> f64 {
    if j.is_constant() {
        return 0.0;
    }
    w.iter()
        .enumerate()
        .filter(|(_, x)| **x != 0.0)
        .map(|(i, x)| x * j.derivative(&[i]))
        .sum()
}

fn combine_jets(basis: &[Vec<Jet>], coeffs: &[Jet]) -> Vec<Jet> {
    let dim = basis.first().map_or(0, Vec::len);
    let mut out = vec![Jet::constant(0.0); dim];
    for (b, c) in basis.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(b) {
            *o = o.clone() + c.clone() * x;
        }
    }
    out
}

/// Applies `coeffs` (one row per frame vector) to the first index of a
/// tensor stored as nested vectors of chart-index components.
fn to_frame_first(coeffs: &Mat<f64>, t: &[Vec<f64>]) -> Vec<Vec<f64>> {
    coeffs
        .iter()
        .map(|row| {
            let mut out = vec![0.0; t[0].len()];
            for (c, v) in row.iter().zip(t) {
                linalg::axpy(*c, v, &mut out);
            }
            out
        })
        .collect()
}

impl JetGeometry {
    pub fn new(f: &ParametricImmersion, u: &[f64]) -> Result<Self> {
        let m = f.m();
        let p3 = f.map.jets(u, 3)?;
        if p3.iter().any(|c| !c.coeffs().iter().all(|x| x.is_finite())) {
            return Err(GeomError::Domain(format!("map is not finite at {u:?}")));
        }
        let d1: Vec<Vec<Jet>> = (0..m)
            .map(|i| p3.iter().map(|c| c.partial(i)).collect())
            .collect();
        let d1_values: Vec<Vec<f64>> = d1.iter().map(|v| linalg::values(v)).collect();
        check_regular(f, &linalg::values(&p3), &d1_values)?;
        let mut d2: Vec<Vec<Vec<Jet>>> = vec![vec![Vec::new(); m]; m];
        for i in 0..m {
            for j in i..m {
                let v: Vec<Jet> = d1[i].iter().map(|c| c.partial(j)).collect();
                d2[j][i] = v.clone();
                d2[i][j] = v;
            }
        }
        let point: Vec<Jet> = p3.iter().map(|c| c.truncate(2)).collect();
        let frame = build_frame(&f.space, point, &d1, &d2)?;
        let value_frame = Frame {
            point: linalg::values(&frame.point),
            metric: linalg::mat_values(&frame.metric),
            coeffs: linalg::mat_values(&frame.coeffs),
            tangent: linalg::mat_values(&frame.tangent),
            normal: linalg::mat_values(&frame.normal),
            alpha: frame.alpha.iter().map(linalg::mat_values).collect(),
            t: linalg::values(&frame.t),
            eta: linalg::values(&frame.eta),
        };
        let values = PointGeometry::from_frame(f.space, u, &value_frame);
        Ok(JetGeometry {
            space: f.space,
            frame,
            values,
            connection: OnceLock::new(),
            cov_alpha: OnceLock::new(),
            riemann: OnceLock::new(),
            normal_curvature: OnceLock::new(),
        })
    }

    pub fn values(&self) -> &PointGeometry {
        &self.values
    }

    pub fn m(&self) -> usize {
        self.values.m()
    }

    pub fn codim(&self) -> usize {
        self.values.codim()
    }

    /// Chart direction of the tangent vector with frame coordinates `x`.
    pub fn chart_direction(&self, x: &[f64]) -> Vec<f64> {
        let m = self.m();
        let mut w = vec![0.0; m];
        for (a, xa) in x.iter().enumerate() {
            linalg::axpy(*xa, &self.values.frame_coeffs[a], &mut w);
        }
        w
    }

    /// Flat derivative `D_X W` in the container, for `X` in frame coordinates.
    pub fn derivative(&self, field: &[Jet], x: &[f64]) -> Vec<f64> {
        let w = self.chart_direction(x);
        field.iter().map(|c| directional(c, &w)).collect()
    }

    /// `∇⊥_X ξ` in normal-frame coordinates.
    pub fn nabla_perp(&self, field: &[Jet], x: &[f64]) -> Vec<f64> {
        self.values.normal_coords(&self.derivative(field, x))
    }

    /// `∇_X Y` in tangent-frame coordinates.
    pub fn nabla(&self, field: &[Jet], x: &[f64]) -> Vec<f64> {
        self.values.tangent_coords(&self.derivative(field, x))
    }

    pub fn tangent_field(&self, coeffs: &[Jet]) -> Vec<Jet> {
        combine_jets(&self.frame.tangent, coeffs)
    }

    pub fn normal_field(&self, coeffs: &[Jet]) -> Vec<Jet> {
        combine_jets(&self.frame.normal, coeffs)
    }

    pub fn tangent_frame_jets(&self) -> &[Vec<Jet>] {
        &self.frame.tangent
    }

    pub fn normal_frame_jets(&self) -> &[Vec<Jet>] {
        &self.frame.normal
    }

    /// Components of `α(X_a, X_b)` against the normal frame, as jets.
    pub fn alpha_jets(&self, a: usize, b: usize) -> &[Jet] {
        &self.frame.alpha[a][b]
    }

    pub fn t_jets(&self) -> &[Jet] {
        &self.frame.t
    }

    pub fn eta_jets(&self) -> &[Jet] {
        &self.frame.eta
    }

    pub fn alpha_field(&self, a: usize, b: usize) -> Vec<Jet> {
        self.normal_field(&self.frame.alpha[a][b])
    }

    pub fn t_field(&self) -> Vec<Jet> {
        self.tangent_field(&self.frame.t)
    }

    pub fn eta_field(&self) -> Vec<Jet> {
        self.normal_field(&self.frame.eta)
    }

    pub fn mean_curvature_jets(&self) -> Vec<Jet> {
        let m = self.m();
        (0..self.codim())
            .map(|c| {
                let mut acc = Jet::constant(0.0);
                for a in 0..m {
                    acc = acc + &self.frame.alpha[a][a][c];
                }
                acc / m as f64
            })
            .collect()
    }

    pub fn mean_curvature_field(&self) -> Vec<Jet> {
        self.normal_field(&self.mean_curvature_jets())
    }

    fn connection_table(&self) -> &Vec<Vec<Vec<f64>>> {
        self.connection.get_or_init(|| {
            let m = self.m();
            (0..m)
                .map(|a| {
                    let e = unit(m, a);
                    (0..m).map(|b| self.nabla(&self.frame.tangent[b], &e)).collect()
                })
                .collect()
        })
    }

    /// `∇_{X_a} X_b` in tangent-frame coordinates.
    pub fn connection(&self, a: usize, b: usize) -> &[f64] {
        &self.connection_table()[a][b]
    }

    /// `∇_X Y` for the frame-constant extensions of `x` and `y`.
    pub fn connection_on(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let m = self.m();
        let mut out = vec![0.0; m];
        for (a, xa) in x.iter().enumerate() {
            for (b, yb) in y.iter().enumerate() {
                if xa * yb != 0.0 {
                    linalg::axpy(xa * yb, self.connection(a, b), &mut out);
                }
            }
        }
        out
    }

    fn cov_alpha_table(&self) -> &Vec<Vec<Vec<Vec<f64>>>> {
        self.cov_alpha.get_or_init(|| {
            let m = self.m();
            let pg = &self.values;
            (0..m)
                .map(|a| {
                    let e = unit(m, a);
                    (0..m)
                        .map(|b| {
                            (0..m)
                                .map(|c| {
                                    let mut v = self.nabla_perp(&self.alpha_field(b, c), &e);
                                    let nb = self.connection(a, b);
                                    let nc = self.connection(a, c);
                                    let t1 = pg.alpha_on(nb, &unit(m, c));
                                    let t2 = pg.alpha_on(&unit(m, b), nc);
                                    for k in 0..v.len() {
                                        v[k] -= t1[k] + t2[k];
                                    }
                                    v
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
    }

    /// `(∇⊥_X α)(Y, Z)` in normal-frame coordinates.
    pub fn cov_alpha(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let table = self.cov_alpha_table();
        let mut out = vec![0.0; self.codim()];
        for (a, xa) in x.iter().enumerate() {
            for (b, yb) in y.iter().enumerate() {
                for (c, zc) in z.iter().enumerate() {
                    let w = xa * yb * zc;
                    if w != 0.0 {
                        linalg::axpy(w, &table[a][b][c], &mut out);
                    }
                }
            }
        }
        out
    }

    fn riemann_table(&self) -> &Vec<Vec<Vec<Vec<f64>>>> {
        self.riemann.get_or_init(|| {
            let m = self.m();
            let g = &self.frame.metric;
            let ginv = linalg::inverse(g).expect("metric of a regular immersion is invertible");
            // dg[k][i][j] = ∂_k g_ij
            let dg: Vec<Mat<Jet>> = (0..m)
                .map(|k| {
                    (0..m)
                        .map(|i| (0..m).map(|j| g[i][j].partial(k)).collect())
                        .collect()
                })
                .collect();
            // gamma[l][i][j] = Γ^l_ij
            let gamma: Vec<Mat<Jet>> = (0..m)
                .map(|l| {
                    (0..m)
                        .map(|i| {
                            (0..m)
                                .map(|j| {
                                    let mut acc = Jet::constant(0.0);
                                    for p in 0..m {
                                        let s = dg[i][p][j].clone() + &dg[j][p][i] - &dg[p][i][j];
                                        acc = acc + ginv[l][p].clone() * &s;
                                    }
                                    acc * 0.5
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect();
            let gv = linalg::mat_values(g);
            let gam = |l: usize, i: usize, j: usize| gamma[l][i][j].value();
            let d_gam = |k: usize, l: usize, i: usize, j: usize| {
                let x = &gamma[l][i][j];
                if x.is_constant() {
                    0.0
                } else {
                    x.derivative(&[k])
                }
            };
            // r[i][j][k][l] = ⟨R(∂_i, ∂_j)∂_k, ∂_l⟩
            let mut r = vec![vec![vec![vec![0.0; m]; m]; m]; m];
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        let up: Vec<f64> = (0..m)
                            .map(|l| {
                                let mut v = d_gam(i, l, j, k) - d_gam(j, l, i, k);
                                for p in 0..m {
                                    v += gam(l, i, p) * gam(p, j, k) - gam(l, j, p) * gam(p, i, k);
                                }
                                v
                            })
                            .collect();
                        for l in 0..m {
                            r[i][j][k][l] = linalg::dot(&gv[l], &up);
                        }
                    }
                }
            }
            let e = &self.values.frame_coeffs;
            // transform one index at a time, innermost first
            let r: Vec<_> = r
                .into_iter()
                .map(|ri| {
                    ri.into_iter()
                        .map(|rij| {
                            let rij = linalg::transpose(&to_frame_first(e, &linalg::transpose(&rij)));
                            to_frame_first(e, &rij)
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
            let r: Vec<_> = r
                .into_iter()
                .map(|ri| {
                    let flat: Vec<Vec<f64>> = ri.iter().map(|x| x.concat()).collect();
                    to_frame_first(e, &flat)
                        .into_iter()
                        .map(|v| v.chunks(m).map(<[f64]>::to_vec).collect::<Vec<_>>())
                        .collect::<Vec<_>>()
                })
                .collect();
            let flat: Vec<Vec<f64>> = r.iter().map(|x| x.concat().concat()).collect();
            let mut table: Vec<Vec<Vec<Vec<f64>>>> = to_frame_first(e, &flat)
                .into_iter()
                .map(|v| {
                    v.chunks(m * m)
                        .map(|c| c.chunks(m).map(<[f64]>::to_vec).collect())
                        .collect()
                })
                .collect();
            // R(X, Y) = −R(Y, X) exactly, so degenerate arguments give exact zeros
            for a in 0..m {
                table[a][a] = vec![vec![0.0; m]; m];
                for b in a + 1..m {
                    table[b][a] = table[a][b]
                        .iter()
                        .map(|row| row.iter().map(|x| -x).collect())
                        .collect();
                }
            }
            table
        })
    }

    /// `⟨R(X_a, X_b)X_c, X_d⟩` of the induced metric, from Christoffel symbols
    /// of the metric jets.
    pub fn riemann_frame(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.riemann_table()[a][b][c][d]
    }

    /// `R(X, Y)Z` in tangent-frame coordinates.
    pub fn riemann(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let m = self.m();
        let table = self.riemann_table();
        (0..m)
            .map(|d| {
                let mut acc = 0.0;
                for a in 0..m {
                    for b in a + 1..m {
                        let w = x[a] * y[b] - x[b] * y[a];
                        for (c, zc) in z.iter().enumerate() {
                            acc += w * zc * table[a][b][c][d];
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// Intrinsic Ricci tensor `Ric(X_b, X_c) = Σ_a ⟨R(X_a, X_b)X_c, X_a⟩`.
    pub fn intrinsic_ricci(&self) -> Mat<f64> {
        let m = self.m();
        let table = self.riemann_table();
        (0..m)
            .map(|b| (0..m).map(|c| (0..m).map(|a| table[a][b][c][a]).sum()).collect())
            .collect()
    }

    fn normal_curvature_table(&self) -> &Vec<Vec<Mat<f64>>> {
        self.normal_curvature.get_or_init(|| {
            let m = self.m();
            let q = self.codim();
            let normal = &self.frame.normal;
            // omega[k][c][b] = ⟨∂_k ξ̂_b, ξ̂_c⟩
            let omega: Vec<Mat<Jet>> = (0..m)
                .map(|k| {
                    let dxi: Vec<Vec<Jet>> = normal
                        .iter()
                        .map(|xi| xi.iter().map(|x| x.partial(k)).collect())
                        .collect();
                    (0..q)
                        .map(|c| (0..q).map(|b| self.space.inner(&dxi[b], &normal[c])).collect())
                        .collect()
                })
                .collect();
            let dom = |k: usize, l: usize, c: usize, b: usize| {
                let x = &omega[l][c][b];
                if x.is_constant() {
                    0.0
                } else {
                    x.derivative(&[k])
                }
            };
            let ov: Vec<Mat<f64>> = omega.iter().map(linalg::mat_values).collect();
            let mut chart = vec![vec![vec![vec![0.0; q]; q]; m]; m];
            for k in 0..m {
                for l in 0..m {
                    let prod = linalg::matmul(&ov[k], &ov[l]);
                    let prod_rev = linalg::matmul(&ov[l], &ov[k]);
                    for c in 0..q {
                        for b in 0..q {
                            chart[k][l][c][b] =
                                dom(k, l, c, b) - dom(l, k, c, b) + prod[c][b] - prod_rev[c][b];
                        }
                    }
                }
            }
            let e = &self.values.frame_coeffs;
            let mut table: Vec<Vec<Mat<f64>>> = (0..m)
                .map(|a| {
                    (0..m)
                        .map(|a2| {
                            let mut out = vec![vec![0.0; q]; q];
                            for k in 0..m {
                                for l in 0..m {
                                    let w = e[a][k] * e[a2][l];
                                    if w == 0.0 {
                                        continue;
                                    }
                                    for c in 0..q {
                                        for b in 0..q {
                                            out[c][b] += w * chart[k][l][c][b];
                                        }
                                    }
                                }
                            }
                            out
                        })
                        .collect()
                })
                .collect();
            // skew in both index pairs up to roundoff; make it exact
            for a in 0..m {
                table[a][a] = vec![vec![0.0; q]; q];
                for b in a + 1..m {
                    let mut mat = table[a][b].clone();
                    for c in 0..q {
                        mat[c][c] = 0.0;
                        for d in c + 1..q {
                            let v = 0.5 * (mat[c][d] - mat[d][c]);
                            mat[c][d] = v;
                            mat[d][c] = -v;
                        }
                    }
                    table[b][a] = mat.iter().map(|row| row.iter().map(|x| -x).collect()).collect();
                    table[a][b] = mat;
                }
            }
            table
        })
    }

    /// Matrix of `R⊥(X_a, X_b)` on the normal frame: entry `[c][d]` is
    /// `⟨R⊥(X_a, X_b)ξ̂_d, ξ̂_c⟩`.
    pub fn normal_curvature_frame(&self, a: usize, b: usize) -> &Mat<f64> {
        &self.normal_curvature_table()[a][b]
    }

    /// `R⊥(X, Y)ξ` in normal-frame coordinates.
    pub fn normal_curvature(&self, x: &[f64], y: &[f64], xi: &[f64]) -> Vec<f64> {
        let q = self.codim();
        let m = self.m();
        let mut out = vec![0.0; q];
        for a in 0..m {
            for b in a + 1..m {
                let w = x[a] * y[b] - x[b] * y[a];
                if w == 0.0 {
                    continue;
                }
                let v = linalg::mat_vec(self.normal_curvature_frame(a, b), xi);
                linalg::axpy(w, &v, &mut out);
            }
        }
        out
    }

    /// `⟨R⊥(X, Y)ξ, ζ⟩`, exactly zero when `X = Y` or `ξ = ζ`.
    pub fn normal_curvature_form(&self, x: &[f64], y: &[f64], xi: &[f64], zeta: &[f64]) -> f64 {
        let q = self.codim();
        let m = self.m();
        let mut acc = 0.0;
        for a in 0..m {
            for b in a + 1..m {
                let w = x[a] * y[b] - x[b] * y[a];
                if w == 0.0 {
                    continue;
                }
                let mat = self.normal_curvature_frame(a, b);
                for c in 0..q {
                    for d in c + 1..q {
                        acc += w * mat[c][d] * (zeta[c] * xi[d] - zeta[d] * xi[c]);
                    }
                }
            }
        }
        acc
    }

    /// Largest `|⟨R⊥(X_a, X_b)ξ̂_d, ξ̂_c⟩|` over frame indices.
    pub fn max_normal_curvature(&self) -> f64 {
        self.normal_curvature_table()
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub(crate) fn unit(m: usize, a: usize) -> Vec<f64> {
    let mut e = vec![0.0; m];
    e[a] = 1.0;
    e
}

/// `∇⊥_X ξ` of a normal field given on the chart, returned as a container
/// vector. `x` is in tangent-frame coordinates of [`JetGeometry::values`].
pub fn normal_connection_derivative(
    f: &ParametricImmersion,
    u: &[f64],
    xi: &dyn ChartMap,
    x: &[f64],
) -> Result<Vec<f64>> {
    if xi.dim_in() != f.m() || xi.dim_out() != f.space.dim() {
        return Err(GeomError::Shape("normal field has the wrong dimensions".into()));
    }
    let jg = JetGeometry::new(f, u)?;
    let field: Vec<Jet> = xi.eval_jet(&Jet::seed(u, 2));
    let value = linalg::values(&field);
    let scale = linalg::norm(&value).max(1.0);
    let point = &jg.frame.point;
    let nbar = f.space.inclusion_normal(point);
    let mut defects: Vec<Jet> = jg
        .frame
        .tangent
        .iter()
        .map(|t| f.space.inner(&field, t))
        .collect();
    defects.push(f.space.inner(&field, &nbar));
    for d in &defects {
        let worst = d
            .gradient()
            .iter()
            .fold(d.value().abs(), |m, x| m.max(x.abs()));
        if worst > tolerance::TANGENCY * 10.0 * scale {
            return Err(GeomError::Geometry(format!(
                "field is not normal along the chart: defect {worst:.3e}"
            )));
        }
    }
    let coords = jg.nabla_perp(&field, x);
    Ok(jg.values.normal_to_ambient(&coords))
}

/// Intrinsic Ricci tensor in the tangent frame of [`crate::point_geometry`].
pub fn intrinsic_ricci(f: &ParametricImmersion, u: &[f64]) -> Result<Mat<f64>> {
    Ok(JetGeometry::new(f, u)?.intrinsic_ricci())
}

/// `R⊥(X, Y)ξ` in normal-frame coordinates.
pub fn normal_curvature(
    f: &ParametricImmersion,
    u: &[f64],
    x: &[f64],
    y: &[f64],
    xi: &[f64],
) -> Result<Vec<f64>> {
    Ok(JetGeometry::new(f, u)?.normal_curvature(x, y, xi))
}
