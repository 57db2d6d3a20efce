//! Residuals of the Gauss, Codazzi and Ricci equations of a submanifold of
//! `Q^n_ε × R`, and of the identities satisfied by the vertical field.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::flat_normal::{PrincipalDecomposition, SmoothDecomposition, DEFAULT_SEED};
use crate::immersion::{extrinsic_ricci, ParametricImmersion, PointGeometry};
use crate::jet::Jet;
use crate::jet_geometry::{unit, JetGeometry};
use crate::linalg;
use crate::sampling;
use crate::tolerance;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationResidual {
    pub name: String,
    pub max_abs: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub pass: bool,
}

impl EquationResidual {
    pub fn new(name: &str, max_abs: f64, samples: usize, tolerance: f64) -> Self {
        EquationResidual {
            name: name.to_string(),
            max_abs,
            samples,
            tolerance,
            pass: max_abs <= tolerance,
        }
    }

    /// Combines two records of the same check.
    pub fn merge(&self, other: &EquationResidual) -> EquationResidual {
        EquationResidual::new(
            &self.name,
            self.max_abs.max(other.max_abs),
            self.samples + other.samples,
            self.tolerance,
        )
    }
}

/// `(U ∧ V)W = ⟨V, W⟩U − ⟨U, W⟩V`.
fn wedge(u: &[f64], v: &[f64], w: &[f64]) -> Vec<f64> {
    let a = linalg::dot(v, w);
    let b = linalg::dot(u, w);
    u.iter().zip(v).map(|(x, y)| a * x - b * y).collect()
}

fn shape_apply(pg: &PointGeometry, xi: &[f64], x: &[f64]) -> Vec<f64> {
    linalg::mat_vec(&pg.shape_operator(xi), x)
}

/// Right-hand side of the Gauss equation in tangent-frame coordinates.
pub fn gauss_rhs(pg: &PointGeometry, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let eps = pg.space.eps();
    let t = &pg.t;
    let a1 = shape_apply(pg, &pg.alpha_on(y, z), x);
    let a2 = shape_apply(pg, &pg.alpha_on(x, z), y);
    let w0 = wedge(x, y, z);
    let w1 = wedge(y, t, z);
    let w2 = wedge(x, t, z);
    let xt = linalg::dot(x, t);
    let yt = linalg::dot(y, t);
    (0..x.len())
        .map(|k| a1[k] - a2[k] + eps * (w0[k] + xt * w1[k] - yt * w2[k]))
        .collect()
}

/// `R(X,Y)Z` minus the Gauss right-hand side, as a container vector.
pub fn gauss_residual_at(jg: &JetGeometry, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let lhs = jg.riemann(x, y, z);
    let rhs = gauss_rhs(jg.values(), x, y, z);
    jg.values().tangent_to_ambient(&linalg::sub(&lhs, &rhs))
}

/// `(∇⊥_X α)(Y,Z) − (∇⊥_Y α)(X,Z) − ε⟨(X∧Y)T, Z⟩η`, as a container vector.
pub fn codazzi_residual_at(jg: &JetGeometry, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let pg = jg.values();
    let eps = pg.space.eps();
    let lhs1 = jg.cov_alpha(x, y, z);
    let lhs2 = jg.cov_alpha(y, x, z);
    let xyt = wedge(x, y, &pg.t);
    let c = eps * linalg::dot(&xyt, z);
    let r: Vec<f64> = (0..pg.codim())
        .map(|k| lhs1[k] - lhs2[k] - c * pg.eta[k])
        .collect();
    pg.normal_to_ambient(&r)
}

/// `⟨R⊥(X,Y)ξ, ζ⟩ − ⟨[A_ξ, A_ζ]X, Y⟩`.
pub fn ricci_equation_residual_at(jg: &JetGeometry, x: &[f64], y: &[f64], xi: &[f64], zeta: &[f64]) -> f64 {
    let (lhs, rhs) = ricci_equation_sides(jg, x, y, xi, zeta);
    lhs - rhs
}

/// Both sides of the Ricci equation separately.
pub fn ricci_equation_sides(jg: &JetGeometry, x: &[f64], y: &[f64], xi: &[f64], zeta: &[f64]) -> (f64, f64) {
    let pg = jg.values();
    let lhs = jg.normal_curvature_form(x, y, xi, zeta);
    let a = pg.shape_operator(xi);
    let b = pg.shape_operator(zeta);
    let ab = linalg::matmul(&a, &b);
    let ba = linalg::matmul(&b, &a);
    let cx: Vec<f64> = (0..x.len())
        .map(|i| (0..x.len()).map(|j| (ab[i][j] - ba[i][j]) * x[j]).sum())
        .collect();
    (lhs, linalg::dot(&cx, y))
}

pub fn gauss_residual(f: &ParametricImmersion, u: &[f64], x: &[f64], y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    Ok(gauss_residual_at(&JetGeometry::new(f, u)?, x, y, z))
}

pub fn codazzi_residual(f: &ParametricImmersion, u: &[f64], x: &[f64], y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    Ok(codazzi_residual_at(&JetGeometry::new(f, u)?, x, y, z))
}

pub fn ricci_equation_residual(
    f: &ParametricImmersion,
    u: &[f64],
    x: &[f64],
    y: &[f64],
    xi: &[f64],
    zeta: &[f64],
) -> Result<f64> {
    Ok(ricci_equation_residual_at(&JetGeometry::new(f, u)?, x, y, xi, zeta))
}

/// Largest `‖∇_X T − A_η X‖` and `‖α(X,T) + ∇⊥_X η‖` over the tangent frame.
pub fn vertical_field_values(jg: &JetGeometry) -> (f64, f64) {
    let pg = jg.values();
    let m = pg.m();
    let t_field = jg.t_field();
    let eta_field = jg.eta_field();
    let a_eta = pg.shape_operator(&pg.eta);
    let mut nabla_t: f64 = 0.0;
    let mut alpha_t: f64 = 0.0;
    for a in 0..m {
        let e = unit(m, a);
        let lhs = jg.nabla(&t_field, &e);
        let rhs: Vec<f64> = a_eta.iter().map(|row| row[a]).collect();
        nabla_t = nabla_t.max(linalg::norm(&linalg::sub(&lhs, &rhs)));
        let at = pg.alpha_on(&e, &pg.t);
        let dn = jg.nabla_perp(&eta_field, &e);
        let s: Vec<f64> = at.iter().zip(&dn).map(|(p, q)| p + q).collect();
        alpha_t = alpha_t.max(linalg::norm(&s));
    }
    (nabla_t, alpha_t)
}

pub fn vertical_field_residuals(f: &ParametricImmersion, u: &[f64]) -> Result<(EquationResidual, EquationResidual)> {
    let (a, b) = vertical_field_values(&JetGeometry::new(f, u)?);
    Ok((
        EquationResidual::new("nabla_T", a, 1, tolerance::VERTICAL),
        EquationResidual::new("alpha_T", b, 1, tolerance::VERTICAL),
    ))
}

/// Maxima of the Gauss, Codazzi and Ricci residuals at one point, over all
/// frame-vector arguments and a few random unit arguments.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PointResiduals {
    pub gauss: f64,
    pub codazzi: f64,
    pub ricci: f64,
    pub nabla_t: f64,
    pub alpha_t: f64,
}

pub fn point_residuals(jg: &JetGeometry, seed: u64) -> PointResiduals {
    let m = jg.m();
    let q = jg.codim();
    let mut out = PointResiduals::default();
    let mut tangents: Vec<Vec<f64>> = (0..m).map(|a| unit(m, a)).collect();
    let mut normals: Vec<Vec<f64>> = (0..q).map(|c| unit(q, c)).collect();
    let mut rng = sampling::rng(seed);
    for _ in 0..2 {
        tangents.push(sampling::random_unit(&mut rng, m));
        normals.push(sampling::random_unit(&mut rng, q));
    }
    for x in &tangents {
        for y in &tangents {
            for z in &tangents {
                out.gauss = out.gauss.max(linalg::max_abs(&gauss_residual_at(jg, x, y, z)));
                out.codazzi = out.codazzi.max(linalg::max_abs(&codazzi_residual_at(jg, x, y, z)));
            }
            for xi in &normals {
                for zeta in &normals {
                    out.ricci = out.ricci.max(ricci_equation_residual_at(jg, x, y, xi, zeta).abs());
                }
            }
        }
    }
    let (a, b) = vertical_field_values(jg);
    out.nabla_t = a;
    out.alpha_t = b;
    out
}

/// Gauss, Codazzi, Ricci and vertical-field residuals over a set of points.
pub fn equation_suite(f: &ParametricImmersion, points: &[Vec<f64>], seed: u64) -> Result<Vec<EquationResidual>> {
    let mut acc = PointResiduals::default();
    for (i, u) in points.iter().enumerate() {
        let r = point_residuals(&JetGeometry::new(f, u)?, seed.wrapping_add(i as u64));
        acc.gauss = acc.gauss.max(r.gauss);
        acc.codazzi = acc.codazzi.max(r.codazzi);
        acc.ricci = acc.ricci.max(r.ricci);
        acc.nabla_t = acc.nabla_t.max(r.nabla_t);
        acc.alpha_t = acc.alpha_t.max(r.alpha_t);
    }
    let n = points.len();
    Ok(vec![
        EquationResidual::new("gauss", acc.gauss, n, tolerance::GAUSS),
        EquationResidual::new("codazzi", acc.codazzi, n, tolerance::CODAZZI),
        EquationResidual::new("ricci", acc.ricci, n, tolerance::RICCI_EQUATION),
        EquationResidual::new("nabla_T", acc.nabla_t, n, tolerance::VERTICAL),
        EquationResidual::new("alpha_T", acc.alpha_t, n, tolerance::VERTICAL),
    ])
}

/// Largest entry of the intrinsic Ricci tensor (curvature of the metric
/// jets) minus the extrinsic expression in `α`, `H`, `T`.
pub fn ricci_tensor_residual_at(jg: &JetGeometry) -> f64 {
    let ext = extrinsic_ricci(jg.values());
    let int = jg.intrinsic_ricci();
    int.iter()
        .flatten()
        .zip(ext.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

pub fn ricci_tensor_residual(f: &ParametricImmersion, points: &[Vec<f64>]) -> Result<EquationResidual> {
    let mut worst = 0.0f64;
    for u in points {
        worst = worst.max(ricci_tensor_residual_at(&JetGeometry::new(f, u)?));
    }
    Ok(EquationResidual::new("ricci_tensor", worst, points.len(), tolerance::RICCI_TENSOR))
}

/// Residuals of the Codazzi equation specialised to a flat normal bundle:
/// one entry per ordered pair of distinct principal normals, then one per
/// triple of distinct ones.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CodazziFlat {
    pub pairs: Vec<f64>,
    pub triples: Vec<f64>,
}

impl CodazziFlat {
    pub fn all(&self) -> Vec<f64> {
        self.pairs.iter().chain(&self.triples).copied().collect()
    }
}

pub fn codazzi_flat_at(sd: &SmoothDecomposition) -> CodazziFlat {
    let jg = sd.geometry();
    let pg = jg.values();
    let d = sd.decomposition();
    let eps = pg.space.eps();
    let s = d.s;
    let mut out = CodazziFlat::default();
    if s < 2 {
        return out;
    }
    let sections: Vec<Vec<Vec<Jet>>> = (0..s)
        .map(|i| d.bases[i].iter().map(|v| sd.section(i, v)).collect())
        .collect();
    let xi_fields: Vec<Vec<Jet>> = (0..s).map(|i| sd.xi_field(i)).collect();
    for i in 0..s {
        for j in 0..s {
            if i == j {
                continue;
            }
            let diff = linalg::sub(&d.xi[j], &d.xi[i]);
            let mut worst: f64 = 0.0;
            for xi_vec in &d.bases[i] {
                let dxi = jg.nabla_perp(&xi_fields[j], xi_vec);
                let xt = linalg::dot(xi_vec, &pg.t);
                for xj in &d.bases[j] {
                    for (yk, yj) in d.bases[j].iter().enumerate() {
                        let g = linalg::dot(xj, yj);
                        let c = linalg::dot(&jg.nabla(&sections[j][yk], xj), xi_vec);
                        let r: Vec<f64> = (0..pg.codim())
                            .map(|n| g * (dxi[n] + eps * xt * pg.eta[n]) - c * diff[n])
                            .collect();
                        worst = worst.max(linalg::norm(&r));
                    }
                }
            }
            out.pairs.push(worst);
        }
    }
    for i in 0..s {
        for j in i + 1..s {
            for k in 0..s {
                if k == i || k == j {
                    continue;
                }
                let di = linalg::sub(&d.xi[i], &d.xi[k]);
                let dj = linalg::sub(&d.xi[j], &d.xi[k]);
                let mut worst: f64 = 0.0;
                for (a, x_i) in d.bases[i].iter().enumerate() {
                    for (b, x_j) in d.bases[j].iter().enumerate() {
                        let n1 = jg.nabla(&sections[i][a], x_j);
                        let n2 = jg.nabla(&sections[j][b], x_i);
                        for x_k in &d.bases[k] {
                            let c1 = linalg::dot(&n1, x_k);
                            let c2 = linalg::dot(&n2, x_k);
                            let r: Vec<f64> = di.iter().zip(&dj).map(|(p, q)| c1 * p - c2 * q).collect();
                            worst = worst.max(linalg::norm(&r));
                        }
                    }
                }
                out.triples.push(worst);
            }
        }
    }
    out
}

/// Flat-normal Codazzi residuals at `u`, pairs first, then triples. Empty
/// when there is a single principal normal.
pub fn codazzi_flat_residual(
    f: &ParametricImmersion,
    u: &[f64],
    decomposition: &PrincipalDecomposition,
) -> Result<Vec<f64>> {
    Ok(codazzi_flat_residuals(f, u, decomposition)?.all())
}

pub fn codazzi_flat_residuals(
    f: &ParametricImmersion,
    u: &[f64],
    decomposition: &PrincipalDecomposition,
) -> Result<CodazziFlat> {
    let jg = JetGeometry::new(f, u)?;
    let sd = SmoothDecomposition::new(&jg, decomposition, DEFAULT_SEED)?;
    Ok(codazzi_flat_at(&sd))
}
