//! Immersions `f: M^m → Q^n_ε × R` given on a chart, and their pointwise
//! extrinsic invariants.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ambient::{check_point, AmbientPoint, AmbientSpace};
use crate::derivatives::{evaluate_map_derivatives, Chart, ChartMap, ParametricMap};
use crate::error::{GeomError, Result};
use crate::frame::{build_frame, Frame};
use crate::jet::MAX_VARS;
use crate::linalg::{self, Mat};
use crate::tolerance;

/// Closed-form facts a catalog entry is known to satisfy.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpectedAnalytics {
    pub lambda: Option<f64>,
    pub s: Option<usize>,
    pub dims: Option<Vec<usize>>,
    pub xi_norms: Option<Vec<f64>>,
    pub class_a: Option<bool>,
    pub einstein: Option<bool>,
    pub minimal: Option<bool>,
    pub flat_normal: Option<bool>,
    pub t_vanishes: Option<bool>,
}

#[derive(Clone)]
pub struct ParametricImmersion {
    pub space: AmbientSpace,
    pub map: ParametricMap,
    pub expected: ExpectedAnalytics,
    pub label: String,
}

impl fmt::Debug for ParametricImmersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricImmersion")
            .field("label", &self.label)
            .field("space", &self.space)
            .field("chart", &self.map.chart)
            .finish()
    }
}

impl ParametricImmersion {
    pub fn new(space: AmbientSpace, chart: Chart, map: Arc<dyn ChartMap>) -> Result<Self> {
        let map = ParametricMap::new(chart, map)?;
        let m = map.dim_in();
        if map.dim_out() != space.dim() {
            return Err(GeomError::Shape(format!(
                "map has {} components, container has {}",
                map.dim_out(),
                space.dim()
            )));
        }
        if m < 2 || m > space.n || m > MAX_VARS {
            return Err(GeomError::Shape(format!(
                "intrinsic dimension {m} unsupported for n = {}",
                space.n
            )));
        }
        Ok(ParametricImmersion {
            space,
            map,
            expected: ExpectedAnalytics::default(),
            label: String::from("immersion"),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_expected(mut self, expected: ExpectedAnalytics) -> Self {
        self.expected = expected;
        self
    }

    pub fn m(&self) -> usize {
        self.map.dim_in()
    }

    /// Codimension inside `Q^n_ε × R`.
    pub fn codim(&self) -> usize {
        self.space.n + 1 - self.m()
    }

    pub fn chart(&self) -> &Chart {
        &self.map.chart
    }

    pub fn eval(&self, u: &[f64]) -> AmbientPoint {
        AmbientPoint::new(self.map.eval(u))
    }
}

/// First and second order invariants at one parameter point.
///
/// Tangent vectors are given by their coordinates in `tangent_frame`,
/// normal vectors by their coordinates in `normal_frame`.
#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub space: AmbientSpace,
    pub u: Vec<f64>,
    pub point: AmbientPoint,
    pub g: Mat<f64>,
    /// `X_a = Σ_i frame_coeffs[a][i] ∂_i f`.
    pub frame_coeffs: Mat<f64>,
    pub tangent_frame: Vec<Vec<f64>>,
    pub normal_frame: Vec<Vec<f64>>,
    /// `alpha[a][b][c] = ⟨α(X_a, X_b), ξ̂_c⟩`.
    pub alpha: Vec<Vec<Vec<f64>>>,
    pub mean_curvature: Vec<f64>,
    pub t: Vec<f64>,
    pub eta: Vec<f64>,
}

impl PointGeometry {
    pub(crate) fn from_frame(space: AmbientSpace, u: &[f64], frame: &Frame<f64>) -> Self {
        let m = frame.tangent.len();
        let codim = frame.normal.len();
        let mean_curvature = (0..codim)
            .map(|c| (0..m).map(|a| frame.alpha[a][a][c]).sum::<f64>() / m as f64)
            .collect();
        PointGeometry {
            space,
            u: u.to_vec(),
            point: AmbientPoint::new(frame.point.clone()),
            g: frame.metric.clone(),
            frame_coeffs: frame.coeffs.clone(),
            tangent_frame: frame.tangent.clone(),
            normal_frame: frame.normal.clone(),
            alpha: frame.alpha.clone(),
            mean_curvature,
            t: frame.t.clone(),
            eta: frame.eta.clone(),
        }
    }

    pub fn m(&self) -> usize {
        self.tangent_frame.len()
    }

    pub fn codim(&self) -> usize {
        self.normal_frame.len()
    }

    /// `α(X, Y)` in normal-frame coordinates.
    pub fn alpha_on(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.codim()];
        for (a, xa) in x.iter().enumerate() {
            for (b, yb) in y.iter().enumerate() {
                let w = xa * yb;
                if w != 0.0 {
                    linalg::axpy(w, &self.alpha[a][b], &mut out);
                }
            }
        }
        out
    }

    /// Matrix of `A_ξ` in the tangent frame.
    pub fn shape_operator(&self, xi: &[f64]) -> Mat<f64> {
        let m = self.m();
        (0..m)
            .map(|a| (0..m).map(|b| linalg::dot(&self.alpha[a][b], xi)).collect())
            .collect()
    }

    pub fn shape_operators(&self) -> ShapeOperatorSet {
        let matrices = (0..self.codim())
            .map(|c| {
                let mut e = vec![0.0; self.codim()];
                e[c] = 1.0;
                self.shape_operator(&e)
            })
            .collect();
        ShapeOperatorSet { matrices }
    }

    pub fn t_norm(&self) -> f64 {
        linalg::norm(&self.t)
    }

    pub fn eta_norm(&self) -> f64 {
        linalg::norm(&self.eta)
    }

    pub fn h_norm(&self) -> f64 {
        linalg::norm(&self.mean_curvature)
    }

    pub fn tangent_to_ambient(&self, x: &[f64]) -> Vec<f64> {
        combine(&self.tangent_frame, x)
    }

    pub fn normal_to_ambient(&self, v: &[f64]) -> Vec<f64> {
        combine(&self.normal_frame, v)
    }

    /// Tangent-frame coordinates of an ambient vector (its tangential part).
    pub fn tangent_coords(&self, v: &[f64]) -> Vec<f64> {
        self.tangent_frame
            .iter()
            .map(|x| self.space.inner_f64(v, x))
            .collect()
    }

    /// Normal-frame coordinates of an ambient vector (its normal part in `Q × R`).
    pub fn normal_coords(&self, v: &[f64]) -> Vec<f64> {
        self.normal_frame
            .iter()
            .map(|x| self.space.inner_f64(v, x))
            .collect()
    }
}

pub(crate) fn combine(basis: &[Vec<f64>], coeffs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; basis.first().map_or(0, Vec::len)];
    for (b, c) in basis.iter().zip(coeffs) {
        linalg::axpy(*c, b, &mut out);
    }
    out
}

/// The shape operators `A_{ξ̂_c}` of the normal frame, as tangent-frame matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeOperatorSet {
    pub matrices: Vec<Mat<f64>>,
}

impl ShapeOperatorSet {
    /// `A_ξ = Σ_c ξ_c A_c`.
    pub fn combination(&self, xi: &[f64]) -> Mat<f64> {
        let m = self.matrices.first().map_or(0, Vec::len);
        let mut out = vec![vec![0.0; m]; m];
        for (a, c) in self.matrices.iter().zip(xi) {
            for i in 0..m {
                for j in 0..m {
                    out[i][j] += c * a[i][j];
                }
            }
        }
        out
    }

    /// Largest Frobenius norm among the matrices.
    pub fn max_norm(&self) -> f64 {
        self.matrices.iter().map(linalg::frobenius).fold(0.0, f64::max)
    }
}

fn regularity_check(space: &AmbientSpace, point: &[f64], d1: &[Vec<f64>], g: &Mat<f64>) -> Result<()> {
    let nbar = space.inclusion_normal(point);
    for v in d1 {
        let scale = linalg::norm(v).max(1.0);
        let defect = space.inner_f64(v, &nbar).abs();
        if defect > tolerance::TANGENCY * scale {
            return Err(GeomError::Geometry(format!(
                "chart derivative leaves Q x R: <df, N> = {defect:.3e}"
            )));
        }
    }
    let (vals, _) = linalg::symmetric_eigen(g);
    let smallest = vals.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    let largest = vals.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let threshold = tolerance::RANK_REL * largest;
    if !(smallest > threshold) {
        return Err(GeomError::Rank { smallest, threshold });
    }
    Ok(())
}

/// All first and second order invariants of `f` at `u`.
pub fn point_geometry(f: &ParametricImmersion, u: &[f64]) -> Result<PointGeometry> {
    let d = evaluate_map_derivatives(&f.map, u, 2)?;
    check_point(&f.space, &AmbientPoint::new(d.value.clone()))?;
    let g: Mat<f64> = (0..f.m())
        .map(|i| (0..f.m()).map(|j| f.space.inner_f64(&d.jacobian[i], &d.jacobian[j])).collect())
        .collect();
    regularity_check(&f.space, &d.value, &d.jacobian, &g)?;
    let frame = build_frame(&f.space, d.value.clone(), &d.jacobian, &d.hessian)?;
    Ok(PointGeometry::from_frame(f.space, u, &frame))
}

pub(crate) fn check_regular(f: &ParametricImmersion, point: &[f64], d1: &[Vec<f64>]) -> Result<()> {
    check_point(&f.space, &AmbientPoint::new(point.to_vec()))?;
    let g: Mat<f64> = d1
        .iter()
        .map(|a| d1.iter().map(|b| f.space.inner_f64(a, b)).collect())
        .collect();
    regularity_check(&f.space, point, d1, &g)
}

pub fn shape_operators(pg: &PointGeometry) -> ShapeOperatorSet {
    pg.shape_operators()
}

/// `∂_t = f_*T + η`, with the reassembly residual.
#[derive(Clone, Debug, PartialEq)]
pub struct VerticalSplit {
    pub t: Vec<f64>,
    pub eta: Vec<f64>,
    pub t_ambient: Vec<f64>,
    pub eta_ambient: Vec<f64>,
    /// Largest entry of `f_*T + η − ∂_t`.
    pub reassembly: f64,
}

pub fn vertical_split(pg: &PointGeometry) -> VerticalSplit {
    let t_ambient = pg.tangent_to_ambient(&pg.t);
    let eta_ambient = pg.normal_to_ambient(&pg.eta);
    let dt = pg.space.vertical();
    let reassembly = t_ambient
        .iter()
        .zip(&eta_ambient)
        .zip(&dt)
        .map(|((a, b), c)| (a + b - c).abs())
        .fold(0.0, f64::max);
    VerticalSplit {
        t: pg.t.clone(),
        eta: pg.eta.clone(),
        t_ambient,
        eta_ambient,
        reassembly,
    }
}

/// `III(X_a, X_b) = Σ_k ⟨α(X_a, X_k), α(X_b, X_k)⟩`.
pub fn third_fundamental_form(pg: &PointGeometry) -> Mat<f64> {
    let m = pg.m();
    (0..m)
        .map(|a| {
            (0..m)
                .map(|b| (0..m).map(|k| linalg::dot(&pg.alpha[a][k], &pg.alpha[b][k])).sum())
                .collect()
        })
        .collect()
}

/// Ricci tensor in the tangent frame from the second fundamental form:
/// `ε(m−1−‖T‖²)⟨X,Y⟩ + ε(2−m)⟨X,T⟩⟨Y,T⟩ + m⟨H,α(X,Y)⟩ − III(X,Y)`.
pub fn extrinsic_ricci(pg: &PointGeometry) -> Mat<f64> {
    let m = pg.m();
    let mf = m as f64;
    let eps = pg.space.eps();
    let t2 = pg.t_norm().powi(2);
    let iii = third_fundamental_form(pg);
    (0..m)
        .map(|a| {
            (0..m)
                .map(|b| {
                    let delta = if a == b { 1.0 } else { 0.0 };
                    eps * (mf - 1.0 - t2) * delta
                        + eps * (2.0 - mf) * pg.t[a] * pg.t[b]
                        + mf * linalg::dot(&pg.mean_curvature, &pg.alpha[a][b])
                        - iii[a][b]
                })
                .collect()
        })
        .collect()
}

/// `Ric(X) = Ric(X, X)/(m−1)` expanded term by term for a unit `X`.
pub fn ricci_curvature_expansion(pg: &PointGeometry, x: &[f64]) -> f64 {
    let m = pg.m() as f64;
    let eps = pg.space.eps();
    let tx = linalg::dot(&pg.t, x);
    let t2 = pg.t_norm().powi(2);
    let axx = pg.alpha_on(x, x);
    let iii = third_fundamental_form(pg);
    let iii_xx = linalg::dot(x, &linalg::mat_vec(&iii, x));
    eps - eps / (m - 1.0) * (t2 - tx * tx) - eps * tx * tx
        + m / (m - 1.0) * linalg::dot(&pg.mean_curvature, &axx)
        - iii_xx / (m - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivatives::GenericMap;
    use crate::jet::Scalar;

    /// `S^2(r) × {0}` inside `S^3 × R` via spherical coordinates.
    struct SmallSphere {
        r: f64,
    }

    impl GenericMap for SmallSphere {
        fn dim_in(&self) -> usize {
            2
        }
        fn dim_out(&self) -> usize {
            5
        }
        fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
            let (a, b) = (&u[0], &u[1]);
            let r = self.r;
            vec![
                a.sin() * b.cos() * r,
                a.sin() * b.sin() * r,
                a.cos() * r,
                S::cst((1.0 - r * r).sqrt()),
                S::zero(),
            ]
        }
    }

    fn small_sphere(r: f64) -> ParametricImmersion {
        let chart = Chart::from_bounds(&[(0.3, 2.8), (-3.0, 3.0)]);
        ParametricImmersion::new(AmbientSpace::sphere(3), chart, Arc::new(SmallSphere { r })).unwrap()
    }

    #[test]
    fn umbilic_small_sphere() {
        let f = small_sphere(0.6);
        let pg = point_geometry(&f, &[1.1, 0.4]).unwrap();
        assert_eq!(pg.codim(), 2);
        // κ = √(1 − r²)/r
        let kappa = 0.8 / 0.6;
        assert!((pg.h_norm() - kappa).abs() < 1e-12);
        let iii = third_fundamental_form(&pg);
        for a in 0..2 {
            for b in 0..2 {
                let want = if a == b { kappa * kappa } else { 0.0 };
                assert!((iii[a][b] - want).abs() < 1e-12);
            }
        }
        assert!(pg.t_norm() < 1e-15);
        assert!((pg.eta_norm() - 1.0).abs() < 1e-14);
        // Gauss curvature 1/r² on a 2-dimensional sphere
        let ric = extrinsic_ricci(&pg);
        assert!((ric[0][0] - 1.0 / 0.36).abs() < 1e-12);
        assert!(vertical_split(&pg).reassembly < 1e-14);
    }

    #[test]
    fn frames_are_orthonormal() {
        let f = small_sphere(0.6);
        let pg = point_geometry(&f, &[0.9, -1.2]).unwrap();
        let basis: Vec<&Vec<f64>> = pg.tangent_frame.iter().chain(&pg.normal_frame).collect();
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((f.space.inner_f64(a, b) - want).abs() < 1e-13);
            }
            let nbar = f.space.inclusion_normal(&pg.point.coords);
            assert!(f.space.inner_f64(a, &nbar).abs() < 1e-13);
        }
    }

    #[test]
    fn rank_deficiency_is_reported() {
        struct Collapsed;
        impl GenericMap for Collapsed {
            fn dim_in(&self) -> usize {
                2
            }
            fn dim_out(&self) -> usize {
                5
            }
            fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
                let s = u[0].clone() + &u[1];
                vec![s.cos(), s.sin(), S::zero(), S::zero(), S::zero()]
            }
        }
        let chart = Chart::from_bounds(&[(-1.0, 1.0), (-1.0, 1.0)]);
        let f = ParametricImmersion::new(AmbientSpace::sphere(3), chart, Arc::new(Collapsed)).unwrap();
        assert!(matches!(point_geometry(&f, &[0.1, 0.2]), Err(GeomError::Rank { .. })));
    }

    #[test]
    fn off_quadric_map_is_rejected() {
        struct Scaled;
        impl GenericMap for Scaled {
            fn dim_in(&self) -> usize {
                2
            }
            fn dim_out(&self) -> usize {
                5
            }
            fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
                vec![u[0].cos() * 2.0, u[0].sin() * 2.0, u[1].clone(), S::zero(), S::zero()]
            }
        }
        let chart = Chart::from_bounds(&[(-1.0, 1.0), (-1.0, 1.0)]);
        let f = ParametricImmersion::new(AmbientSpace::sphere(3), chart, Arc::new(Scaled)).unwrap();
        assert!(matches!(point_geometry(&f, &[0.1, 0.2]), Err(GeomError::Domain(_))));
    }
}
