//! Flat normal bundles: principal normals and their eigendistributions,
//! class A, Einstein fits, and the structure results built on them.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::immersion::{extrinsic_ricci, point_geometry, ParametricImmersion, PointGeometry};
use crate::jet::Jet;
use crate::jet_geometry::{unit, JetGeometry};
use crate::linalg::{self, Mat};
use crate::sampling;
use crate::tolerance;

/// Seed used when a caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5eed_f1a7;

const ATTEMPTS: usize = 5;

/// Orthogonal splitting `TM = E_1 ⊕ … ⊕ E_s` at one point, with
/// `α(X, Y) = ⟨X, Y⟩ ξ_i` on each `E_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrincipalDecomposition {
    pub s: usize,
    /// Principal normals in normal-frame coordinates.
    pub xi: Vec<Vec<f64>>,
    /// Orthonormal bases in tangent-frame coordinates.
    pub bases: Vec<Vec<Vec<f64>>>,
    pub dims: Vec<usize>,
    pub t_index: Option<usize>,
    /// `min ‖ξ_i − ξ_j‖`; infinite when `s = 1`.
    pub gap: f64,
    /// Size of the shape operators the tolerances were scaled by.
    pub scale: f64,
}

impl PrincipalDecomposition {
    /// Orthogonal projector onto `E_i` as a tangent-frame matrix.
    pub fn projector(&self, i: usize) -> Mat<f64> {
        let m: usize = self.dims.iter().sum();
        let mut p = vec![vec![0.0; m]; m];
        for v in &self.bases[i] {
            for a in 0..m {
                for b in 0..m {
                    p[a][b] += v[a] * v[b];
                }
            }
        }
        p
    }

    /// `X^i`, the `E_i` component of `x`.
    pub fn component(&self, i: usize, x: &[f64]) -> Vec<f64> {
        linalg::mat_vec(&self.projector(i), x)
    }

    /// `Σ_i ⟨ξ, ξ_i⟩ X^i`, which equals `A_ξ X`.
    pub fn reconstruct(&self, xi: &[f64], x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for i in 0..self.s {
            linalg::axpy(linalg::dot(xi, &self.xi[i]), &self.component(i, x), &mut out);
        }
        out
    }

    /// Largest `‖A_c v − ξ_i^c v‖` over basis vectors `v` of every block.
    pub fn umbilicity_defect(&self, pg: &PointGeometry) -> f64 {
        let ops = pg.shape_operators();
        let mut worst: f64 = 0.0;
        for (i, basis) in self.bases.iter().enumerate() {
            for v in basis {
                for (c, a) in ops.matrices.iter().enumerate() {
                    let av = linalg::mat_vec(a, v);
                    let r: Vec<f64> = av.iter().zip(v).map(|(p, q)| p - self.xi[i][c] * q).collect();
                    worst = worst.max(linalg::norm(&r));
                }
            }
        }
        worst
    }
}

/// Outcome of [`flatness_test`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Flatness {
    pub is_flat: bool,
    pub max_commutator: f64,
    pub max_shape_norm: f64,
}

/// `max_{a<b} ‖[A_a, A_b]‖` against `tol · max ‖A‖²`.
pub fn flatness_at(pg: &PointGeometry, tol: f64) -> Flatness {
    let ops = pg.shape_operators();
    let max_shape_norm = ops.max_norm();
    let mut max_commutator: f64 = 0.0;
    for a in 0..ops.matrices.len() {
        for b in a + 1..ops.matrices.len() {
            let ab = linalg::matmul(&ops.matrices[a], &ops.matrices[b]);
            let ba = linalg::matmul(&ops.matrices[b], &ops.matrices[a]);
            let diff: Mat<f64> = ab
                .iter()
                .zip(&ba)
                .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
                .collect();
            max_commutator = max_commutator.max(linalg::frobenius(&diff));
        }
    }
    Flatness {
        is_flat: max_commutator <= tol * max_shape_norm * max_shape_norm,
        max_commutator,
        max_shape_norm,
    }
}

pub fn flatness_test(f: &ParametricImmersion, u: &[f64], tol: f64) -> Result<Flatness> {
    Ok(flatness_at(&point_geometry(f, u)?, tol))
}

struct Block {
    basis: Vec<Vec<f64>>,
    xi: Vec<f64>,
}

fn block_normal(pg: &PointGeometry, basis: &[Vec<f64>]) -> Vec<f64> {
    let mut xi = vec![0.0; pg.codim()];
    for v in basis {
        linalg::axpy(1.0 / basis.len() as f64, &pg.alpha_on(v, v), &mut xi);
    }
    xi
}

/// One draw: eigenvectors of a random combination of shape operators,
/// grouped by eigenvalue, then merged by principal normal.
fn draw(pg: &PointGeometry, cluster_tol: f64, scale: f64, c: &[f64]) -> Option<Vec<Block>> {
    let ops = pg.shape_operators();
    let mut comb = ops.combination(c);
    for row in comb.iter_mut() {
        for x in row.iter_mut() {
            *x /= scale;
        }
    }
    let (vals, vecs) = linalg::symmetric_eigen(&comb);
    let mut groups: Vec<Vec<Vec<f64>>> = Vec::new();
    for (k, v) in vecs.into_iter().enumerate() {
        if k > 0 && vals[k] - vals[k - 1] < cluster_tol {
            groups.last_mut().expect("group exists").push(v);
        } else {
            groups.push(vec![v]);
        }
    }
    let mut blocks: Vec<Block> = groups
        .into_iter()
        .map(|basis| Block { xi: block_normal(pg, &basis), basis })
        .collect();
    loop {
        let mut merged = false;
        'outer: for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                if linalg::norm(&linalg::sub(&blocks[i].xi, &blocks[j].xi)) < cluster_tol * scale {
                    let b = blocks.remove(j);
                    blocks[i].basis.extend(b.basis);
                    blocks[i].xi = block_normal(pg, &blocks[i].basis);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    for b in &blocks {
        for v in &b.basis {
            for (c, a) in ops.matrices.iter().enumerate() {
                let av = linalg::mat_vec(a, v);
                let r: Vec<f64> = av.iter().zip(v).map(|(p, q)| p - b.xi[c] * q).collect();
                if linalg::norm(&r) > cluster_tol * scale {
                    return None;
                }
            }
        }
    }
    Some(blocks)
}

fn finish(pg: &PointGeometry, blocks: Vec<Block>, cluster_tol: f64, scale: f64) -> PrincipalDecomposition {
    let t_norm = pg.t_norm();
    let holds_t = |b: &Block| {
        t_norm > tolerance::T_ZERO && {
            let proj: f64 = b.basis.iter().map(|v| linalg::dot(v, &pg.t).powi(2)).sum::<f64>().sqrt();
            proj >= (1.0 - cluster_tol) * t_norm
        }
    };
    let mut keyed: Vec<(bool, Block)> = blocks.into_iter().map(|b| (holds_t(&b), b)).collect();
    let tie = cluster_tol * scale;
    keyed.sort_by(|(ta, a), (tb, b)| {
        tb.cmp(ta)
            .then(a.basis.len().cmp(&b.basis.len()))
            .then_with(|| {
                let (na, nb) = (linalg::norm(&a.xi), linalg::norm(&b.xi));
                if (na - nb).abs() < tie {
                    std::cmp::Ordering::Equal
                } else {
                    na.total_cmp(&nb)
                }
            })
            .then_with(|| {
                for (x, y) in a.xi.iter().zip(&b.xi) {
                    if (x - y).abs() >= tie {
                        return y.total_cmp(x);
                    }
                }
                std::cmp::Ordering::Equal
            })
    });
    let t_index = keyed.first().filter(|(t, _)| *t).map(|_| 0);
    let blocks: Vec<Block> = keyed.into_iter().map(|(_, b)| b).collect();
    let mut gap = f64::INFINITY;
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            gap = gap.min(linalg::norm(&linalg::sub(&blocks[i].xi, &blocks[j].xi)));
        }
    }
    PrincipalDecomposition {
        s: blocks.len(),
        dims: blocks.iter().map(|b| b.basis.len()).collect(),
        xi: blocks.iter().map(|b| b.xi.clone()).collect(),
        bases: blocks.into_iter().map(|b| b.basis).collect(),
        t_index,
        gap,
        scale,
    }
}

fn same_decomposition(a: &PrincipalDecomposition, b: &PrincipalDecomposition) -> bool {
    let tol = 1e-8 * a.scale;
    a.s == b.s
        && a.dims == b.dims
        && a.xi.iter().zip(&b.xi).all(|(x, y)| linalg::norm(&linalg::sub(x, y)) <= tol)
}

/// Principal decomposition at a point from seeded random combinations of
/// the shape operators. Two valid draws must agree.
pub fn decompose(pg: &PointGeometry, cluster_tol: f64, seed: u64) -> Result<PrincipalDecomposition> {
    let flat = flatness_at(pg, tolerance::FLATNESS);
    if !flat.is_flat {
        return Err(GeomError::Flatness(flat.max_commutator));
    }
    let scale = flat.max_shape_norm.max(1.0);
    let q = pg.codim();
    let mut rng = sampling::rng(seed);
    let mut first: Option<PrincipalDecomposition> = None;
    for _ in 0..ATTEMPTS {
        let c = sampling::random_unit(&mut rng, q);
        let Some(blocks) = draw(pg, cluster_tol, scale, &c) else {
            continue;
        };
        let d = finish(pg, blocks, cluster_tol, scale);
        match &first {
            None => first = Some(d),
            Some(prev) if same_decomposition(prev, &d) => return Ok(prev.clone()),
            Some(_) => first = Some(d),
        }
    }
    Err(GeomError::Genericity(ATTEMPTS))
}

pub fn principal_decomposition(
    f: &ParametricImmersion,
    u: &[f64],
    cluster_tol: f64,
) -> Result<PrincipalDecomposition> {
    decompose(&point_geometry(f, u)?, cluster_tol, DEFAULT_SEED)
}

/// Rejects a decomposition that does not describe the shape operators at `pg`.
pub fn check_decomposition(pg: &PointGeometry, d: &PrincipalDecomposition) -> Result<()> {
    let m = pg.m();
    let shapes_ok = d.dims.iter().sum::<usize>() == m
        && d.bases.iter().flatten().all(|v| v.len() == m)
        && d.xi.iter().all(|x| x.len() == pg.codim());
    if !shapes_ok {
        return Err(GeomError::Shape("decomposition does not match the immersion".into()));
    }
    let defect = d.umbilicity_defect(pg);
    if defect > tolerance::CLUSTER * d.scale {
        return Err(GeomError::Flatness(defect));
    }
    Ok(())
}

/// Smooth extension of a pointwise decomposition to first order, built from
/// Lagrange projectors of a generic combination of shape operators.
pub struct SmoothDecomposition<'a> {
    jg: &'a JetGeometry,
    decomp: &'a PrincipalDecomposition,
    projectors: Vec<Mat<Jet>>,
    xi: Vec<Vec<Jet>>,
}

impl<'a> SmoothDecomposition<'a> {
    pub fn new(jg: &'a JetGeometry, decomp: &'a PrincipalDecomposition, seed: u64) -> Result<Self> {
        check_decomposition(jg.values(), decomp)?;
        let m = jg.m();
        let q = jg.codim();
        let s = decomp.s;
        let mut rng = sampling::rng(seed);
        let mut best = (f64::NEG_INFINITY, vec![0.0; q]);
        for _ in 0..32 {
            let c = sampling::random_unit(&mut rng, q);
            let mut sep = f64::INFINITY;
            for i in 0..s {
                for j in i + 1..s {
                    sep = sep.min(linalg::dot(&c, &linalg::sub(&decomp.xi[i], &decomp.xi[j])).abs());
                }
            }
            if sep > best.0 {
                best = (sep, c);
            }
        }
        let c = best.1;
        let comb: Mat<Jet> = (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| {
                        let al = jg.alpha_jets(a, b);
                        let mut acc = Jet::constant(0.0);
                        for (k, ck) in c.iter().enumerate() {
                            acc = acc + al[k].clone() * *ck;
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        // eigenvalue of each block, exact to first order
        let mu: Vec<Jet> = (0..s)
            .map(|j| {
                let p0 = decomp.projector(j);
                let mut acc = Jet::constant(0.0);
                for a in 0..m {
                    for b in 0..m {
                        if p0[a][b] != 0.0 {
                            acc = acc + comb[b][a].clone() * p0[a][b];
                        }
                    }
                }
                acc / decomp.dims[j] as f64
            })
            .collect();
        let projectors: Vec<Mat<Jet>> = (0..s)
            .map(|i| {
                let mut p = linalg::identity::<Jet>(m);
                for j in (0..s).filter(|&j| j != i) {
                    let denom = mu[i].clone() - &mu[j];
                    let factor: Mat<Jet> = (0..m)
                        .map(|a| {
                            (0..m)
                                .map(|b| {
                                    let mut x = comb[a][b].clone();
                                    if a == b {
                                        x = x - &mu[j];
                                    }
                                    x / &denom
                                })
                                .collect()
                        })
                        .collect();
                    p = linalg::matmul(&p, &factor);
                }
                p
            })
            .collect();
        let xi = projectors
            .iter()
            .enumerate()
            .map(|(i, p)| {
                (0..q)
                    .map(|k| {
                        let mut acc = Jet::constant(0.0);
                        for a in 0..m {
                            for b in 0..m {
                                acc = acc + p[a][b].clone() * &jg.alpha_jets(a, b)[k];
                            }
                        }
                        acc / decomp.dims[i] as f64
                    })
                    .collect()
            })
            .collect();
        Ok(SmoothDecomposition { jg, decomp, projectors, xi })
    }

    pub fn geometry(&self) -> &JetGeometry {
        self.jg
    }

    pub fn decomposition(&self) -> &PrincipalDecomposition {
        self.decomp
    }

    pub fn projector(&self, i: usize) -> &Mat<Jet> {
        &self.projectors[i]
    }

    /// `ξ_i` in normal-frame coordinates, as jets.
    pub fn xi_jets(&self, i: usize) -> &[Jet] {
        &self.xi[i]
    }

    /// `ξ_i` as a container vector field.
    pub fn xi_field(&self, i: usize) -> Vec<Jet> {
        self.jg.normal_field(&self.xi[i])
    }

    /// Section `P y0` of the distribution with projector `p` through `y0`.
    pub fn section_of(&self, p: &Mat<Jet>, y0: &[f64]) -> Vec<Jet> {
        let coeffs: Vec<Jet> = p
            .iter()
            .map(|row| {
                let mut acc = Jet::constant(0.0);
                for (x, y) in row.iter().zip(y0) {
                    if *y != 0.0 {
                        acc = acc + x.clone() * *y;
                    }
                }
                acc
            })
            .collect();
        self.jg.tangent_field(&coeffs)
    }

    /// Section of `E_i` through `y0 ∈ E_i`.
    pub fn section(&self, i: usize, y0: &[f64]) -> Vec<Jet> {
        self.section_of(&self.projectors[i], y0)
    }

    /// Projector onto `span{T}`; `None` when `T` vanishes.
    pub fn t_line_projector(&self) -> Option<Mat<Jet>> {
        let pg = self.jg.values();
        if pg.t_norm() <= tolerance::T_ZERO {
            return None;
        }
        let t = self.jg.t_jets();
        let mut t2 = Jet::constant(0.0);
        for x in t {
            t2 = t2 + x.clone() * x;
        }
        Some(
            t.iter()
                .map(|a| t.iter().map(|b| a.clone() * b / &t2).collect())
                .collect(),
        )
    }
}

/// Outcome of [`class_a_test`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassA {
    pub is_class_a: bool,
    pub t_index: Option<usize>,
    pub defect: f64,
}

/// `max_c ‖A_c T − (⟨A_c T, T⟩/‖T‖²) T‖` over the normal frame.
pub fn class_a_defect(pg: &PointGeometry) -> f64 {
    let t = &pg.t;
    let t2 = linalg::dot(t, t);
    if t2 == 0.0 {
        return 0.0;
    }
    pg.shape_operators()
        .matrices
        .iter()
        .map(|a| {
            let at = linalg::mat_vec(a, t);
            let c = linalg::dot(&at, t) / t2;
            let r: Vec<f64> = at.iter().zip(t).map(|(x, y)| x - c * y).collect();
            linalg::norm(&r)
        })
        .fold(0.0, f64::max)
}

pub fn class_a_at(pg: &PointGeometry, d: &PrincipalDecomposition, tol: f64) -> ClassA {
    if pg.t_norm() < tolerance::T_ZERO {
        return ClassA { is_class_a: true, t_index: None, defect: 0.0 };
    }
    let defect = class_a_defect(pg);
    let t_norm = pg.t_norm();
    let t_index = (0..d.s).find(|&i| linalg::norm(&d.component(i, &pg.t)) >= (1.0 - tol) * t_norm);
    ClassA { is_class_a: defect <= tol && t_index.is_some(), t_index, defect }
}

pub fn class_a_test(f: &ParametricImmersion, u: &[f64], tol: f64) -> Result<ClassA> {
    let pg = point_geometry(f, u)?;
    let d = decompose(&pg, tolerance::CLUSTER, DEFAULT_SEED)?;
    Ok(class_a_at(&pg, &d, tol))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EinsteinFit {
    pub lambda_hat: f64,
    pub max_dev: f64,
    pub is_einstein: bool,
    pub samples: usize,
}

/// Best Einstein constant for the Ricci tensor over `points`.
pub fn einstein_fit(f: &ParametricImmersion, points: &[Vec<f64>], tol: f64) -> Result<EinsteinFit> {
    if points.is_empty() {
        return Err(GeomError::Shape("einstein_fit needs at least one sample".into()));
    }
    let m = f.m();
    let mut rics = Vec::with_capacity(points.len());
    for u in points {
        rics.push(extrinsic_ricci(&point_geometry(f, u)?));
    }
    let lambda_hat = rics
        .iter()
        .map(|r| (0..m).map(|a| r[a][a]).sum::<f64>() / m as f64)
        .sum::<f64>()
        / rics.len() as f64;
    let mut max_dev: f64 = 0.0;
    for r in &rics {
        for a in 0..m {
            for b in 0..m {
                let target = if a == b { lambda_hat } else { 0.0 };
                max_dev = max_dev.max((r[a][b] - target).abs());
            }
        }
    }
    Ok(EinsteinFit { lambda_hat, max_dev, is_einstein: max_dev <= tol, samples: points.len() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityEntry {
    pub k: usize,
    pub dim: usize,
    pub applicable: bool,
    /// `‖ξ_k − (m/2)H‖²`.
    pub lhs: f64,
    /// `(m²/4)‖H‖² − λ + (m−2)ε + ‖η‖²ε`.
    pub rhs: f64,
    pub residual: f64,
    /// `m⟨ξ_k, H⟩` against `λ − (m−2)ε − ‖η‖²ε + ‖ξ_k‖²`.
    pub mxi_lhs: f64,
    pub mxi_rhs: f64,
    pub mxi_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub lambda: f64,
    pub entries: Vec<IdentityEntry>,
    /// Largest residual among applicable entries.
    pub max_residual: f64,
    /// Smallest right-hand side among applicable entries.
    pub min_rhs: f64,
}

/// Whether the norm identity is expected for block `k`: always off the
/// block containing `T`, and on it only when it has more than one dimension.
pub fn identity_applies(d: &PrincipalDecomposition, k: usize) -> bool {
    d.t_index != Some(k) || d.dims[k] > 1
}

pub fn xi_identity_at(pg: &PointGeometry, d: &PrincipalDecomposition, lambda: f64) -> IdentityReport {
    let m = pg.m() as f64;
    let eps = pg.space.eps();
    let h = &pg.mean_curvature;
    let h2 = linalg::dot(h, h);
    let eta2 = pg.eta_norm().powi(2);
    let rhs = m * m / 4.0 * h2 - lambda + (m - 2.0) * eps + eta2 * eps;
    let mut entries = Vec::with_capacity(d.s);
    for k in 0..d.s {
        let xi = &d.xi[k];
        let shifted: Vec<f64> = xi.iter().zip(h).map(|(x, y)| x - m / 2.0 * y).collect();
        let lhs = linalg::dot(&shifted, &shifted);
        let mxi_lhs = m * linalg::dot(xi, h);
        let mxi_rhs = lambda - (m - 2.0) * eps - eta2 * eps + linalg::dot(xi, xi);
        entries.push(IdentityEntry {
            k,
            dim: d.dims[k],
            applicable: identity_applies(d, k),
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
            mxi_lhs,
            mxi_rhs,
            mxi_residual: (mxi_lhs - mxi_rhs).abs(),
        });
    }
    let applicable = entries.iter().filter(|e| e.applicable);
    let max_residual = applicable.clone().map(|e| e.residual.max(e.mxi_residual)).fold(0.0, f64::max);
    let min_rhs = applicable.map(|e| e.rhs).fold(f64::INFINITY, f64::min);
    IdentityReport { lambda, entries, max_residual, min_rhs }
}

/// Norm identity of the principal normals for a given Einstein constant.
pub fn xi_identity_report(f: &ParametricImmersion, u: &[f64], lambda: f64) -> Result<IdentityReport> {
    let pg = point_geometry(f, u)?;
    let d = decompose(&pg, tolerance::CLUSTER, DEFAULT_SEED)?;
    Ok(xi_identity_at(&pg, &d, lambda))
}

/// As [`xi_identity_report`], with `λ` taken from an accepted Einstein fit.
pub fn xi_identity_from_fit(f: &ParametricImmersion, u: &[f64], fit: &EinsteinFit) -> Result<IdentityReport> {
    if !fit.is_einstein {
        return Err(GeomError::NotEinstein(fit.max_dev));
    }
    xi_identity_report(f, u, fit.lambda_hat)
}

/// Orthonormal basis of `{T}^⊥` in tangent-frame coordinates (the whole
/// tangent space when `T` vanishes).
pub fn t_complement(pg: &PointGeometry) -> Vec<Vec<f64>> {
    let m = pg.m();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    if pg.t_norm() > tolerance::T_ZERO {
        basis.push(pg.t.iter().map(|x| x / pg.t_norm()).collect());
    }
    let skip = basis.len();
    let mut out = gram_schmidt(basis, (0..m).map(|a| unit(m, a)));
    out.drain(..skip);
    out
}

/// Extends an orthonormal list with the candidates that survive projection.
fn gram_schmidt(mut basis: Vec<Vec<f64>>, candidates: impl Iterator<Item = Vec<f64>>) -> Vec<Vec<f64>> {
    for mut v in candidates {
        for _ in 0..2 {
            for b in &basis {
                let c = linalg::dot(&v, b);
                linalg::axpy(-c, b, &mut v);
            }
        }
        let n = linalg::norm(&v);
        if n > 1e-6 {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParallelismReport {
    /// `max ‖∇⊥_Z ξ_i‖` over `i` and unit `Z ⊥ T`.
    pub residual: f64,
    /// `max ‖∇⊥_X H‖` over the tangent frame.
    pub mean_curvature_derivative: f64,
    pub parallel_mean_curvature: bool,
}

pub fn parallelism_at(sd: &SmoothDecomposition) -> ParallelismReport {
    let jg = sd.geometry();
    let pg = jg.values();
    let m = pg.m();
    let h = jg.mean_curvature_field();
    let mean_curvature_derivative = (0..m)
        .map(|a| linalg::norm(&jg.nabla_perp(&h, &unit(m, a))))
        .fold(0.0, f64::max);
    let zs = t_complement(pg);
    let mut residual: f64 = 0.0;
    for i in 0..sd.decomposition().s {
        let field = sd.xi_field(i);
        for z in &zs {
            residual = residual.max(linalg::norm(&jg.nabla_perp(&field, z)));
        }
    }
    ParallelismReport {
        residual,
        mean_curvature_derivative,
        parallel_mean_curvature: mean_curvature_derivative < tolerance::PARALLEL_MEAN_CURVATURE,
    }
}

/// Derivatives of the principal normals along `{T}^⊥`. Runs whether or not
/// the hypotheses of the parallelism statement hold; callers gate on them.
pub fn parallelism_residual(
    f: &ParametricImmersion,
    u: &[f64],
    decomposition: &PrincipalDecomposition,
) -> Result<ParallelismReport> {
    let jg = JetGeometry::new(f, u)?;
    let sd = SmoothDecomposition::new(&jg, decomposition, DEFAULT_SEED)?;
    Ok(parallelism_at(&sd))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftedBlock {
    /// Tangent-frame basis of the block.
    pub basis: Vec<Vec<f64>>,
    /// Principal normal of `i ∘ f` on the block, as a container vector.
    pub normal: Vec<f64>,
    /// Index of the principal normal of `f` the block came from.
    pub source: usize,
    pub is_t_line: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftedDecomposition {
    pub blocks: Vec<LiftedBlock>,
    /// Largest entry of `α_f̃(X, Y) − ⟨X, Y⟩ ν` over block bases, including
    /// mixed pairs from different blocks where the target is zero.
    pub block_residual: f64,
    pub pass: bool,
}

/// Second fundamental form of `i ∘ f` in the container, from the Hessian of
/// `f` minus its tangential part, on tangent-frame vectors.
pub fn container_second_fundamental_form(f: &ParametricImmersion, u: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let pg = point_geometry(f, u)?;
    let d = crate::derivatives::evaluate_map_derivatives(&f.map, u, 2)?;
    let m = pg.m();
    let e = &pg.frame_coeffs;
    let dim = f.space.dim();
    let mut out = vec![vec![vec![0.0; dim]; m]; m];
    for a in 0..m {
        for b in 0..m {
            let mut h = vec![0.0; dim];
            for i in 0..m {
                for j in 0..m {
                    linalg::axpy(e[a][i] * e[b][j], &d.hessian[i][j], &mut h);
                }
            }
            for x in &pg.tangent_frame {
                let c = f.space.inner_f64(&h, x);
                linalg::axpy(-c, x, &mut h);
            }
            out[a][b] = h;
        }
    }
    Ok(out)
}

fn bilinear(table: &[Vec<Vec<f64>>], x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; table[0][0].len()];
    for (a, xa) in x.iter().enumerate() {
        for (b, yb) in y.iter().enumerate() {
            if xa * yb != 0.0 {
                linalg::axpy(xa * yb, &table[a][b], &mut out);
            }
        }
    }
    out
}

fn lifted_blocks(pg: &PointGeometry, d: &PrincipalDecomposition, split_t: bool) -> Vec<LiftedBlock> {
    let eps = pg.space.eps();
    let nbar = pg.space.inclusion_normal(&pg.point.coords);
    let eta2 = pg.eta_norm().powi(2);
    let lift = |xi: &[f64], w: f64| {
        let mut v = pg.normal_to_ambient(xi);
        linalg::axpy(-eps * w, &nbar, &mut v);
        v
    };
    let mut blocks = Vec::new();
    for k in 0..d.s {
        if split_t && d.t_index == Some(k) {
            let t_hat: Vec<f64> = pg.t.iter().map(|x| x / pg.t_norm()).collect();
            blocks.push(LiftedBlock {
                basis: vec![t_hat.clone()],
                normal: lift(&d.xi[k], eta2),
                source: k,
                is_t_line: true,
            });
            let rest = gram_schmidt(vec![t_hat], d.bases[k].iter().cloned());
            if rest.len() > 1 {
                blocks.push(LiftedBlock {
                    basis: rest[1..].to_vec(),
                    normal: lift(&d.xi[k], 1.0),
                    source: k,
                    is_t_line: false,
                });
            }
        } else {
            blocks.push(LiftedBlock {
                basis: d.bases[k].clone(),
                normal: lift(&d.xi[k], 1.0),
                source: k,
                is_t_line: false,
            });
        }
    }
    blocks
}

fn lifted_residual(table: &[Vec<Vec<f64>>], blocks: &[LiftedBlock]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, bi) in blocks.iter().enumerate() {
        for (j, bj) in blocks.iter().enumerate() {
            for x in &bi.basis {
                for y in &bj.basis {
                    let mut r = bilinear(table, x, y);
                    if i == j {
                        linalg::axpy(-linalg::dot(x, y), &bi.normal, &mut r);
                    }
                    worst = worst.max(linalg::max_abs(&r));
                }
            }
        }
    }
    worst
}

/// Principal normals of `i ∘ f` for the splitting `span{T} ⊕ (E_t ⊖ T) ⊕ …`,
/// checked against the second fundamental form computed in the container.
pub fn lifted_decomposition(
    f: &ParametricImmersion,
    u: &[f64],
    decomposition: &PrincipalDecomposition,
) -> Result<LiftedDecomposition> {
    let pg = point_geometry(f, u)?;
    check_decomposition(&pg, decomposition)?;
    if pg.t_norm() <= tolerance::T_ZERO {
        return Err(GeomError::DegenerateT(pg.t_norm()));
    }
    if decomposition.t_index.is_none() {
        return Err(GeomError::Geometry("T lies in no eigendistribution".into()));
    }
    lifted_with(f, u, &pg, decomposition, true)
}

/// Lifted principal normals without splitting off `span{T}`: each `E_i`
/// gets `i_*ξ_i − εN̄`. Valid whenever `T` is orthogonal to every block
/// with more than one principal normal, in particular when `T = 0`.
pub fn lifted_blocks_unsplit(
    f: &ParametricImmersion,
    u: &[f64],
    decomposition: &PrincipalDecomposition,
) -> Result<LiftedDecomposition> {
    let pg = point_geometry(f, u)?;
    check_decomposition(&pg, decomposition)?;
    lifted_with(f, u, &pg, decomposition, false)
}

fn lifted_with(
    f: &ParametricImmersion,
    u: &[f64],
    pg: &PointGeometry,
    d: &PrincipalDecomposition,
    split_t: bool,
) -> Result<LiftedDecomposition> {
    let table = container_second_fundamental_form(f, u)?;
    let blocks = lifted_blocks(pg, d, split_t);
    let block_residual = lifted_residual(&table, &blocks);
    Ok(LiftedDecomposition { blocks, block_residual, pass: block_residual <= tolerance::LIFTED_BLOCKS })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionReport {
    /// Index of the principal normal of `f` the distribution belongs to.
    pub source: usize,
    pub dim: usize,
    /// `δ = −⟨ξ_k, η⟩T/‖T‖²` in tangent-frame coordinates.
    pub delta: Vec<f64>,
    pub umbilicity: f64,
    pub sphericity: f64,
    pub totally_geodesic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionChecks {
    pub distributions: Vec<DistributionReport>,
    pub max_residual: f64,
    /// Smallest angle between lines through `ξ_i − ξ_k` and `ξ_j − ξ_k`.
    pub independence_angle: Option<f64>,
}

/// `min` over distinct `i, j, k` of the angle between the lines spanned by
/// `ξ_i − ξ_k` and `ξ_j − ξ_k`; `None` for fewer than three normals.
pub fn independence_angle(xi: &[Vec<f64>]) -> Option<f64> {
    let s = xi.len();
    if s < 3 {
        return None;
    }
    let mut best = f64::INFINITY;
    for k in 0..s {
        for i in 0..s {
            for j in i + 1..s {
                if i == k || j == k {
                    continue;
                }
                let a = linalg::sub(&xi[i], &xi[k]);
                let b = linalg::sub(&xi[j], &xi[k]);
                let c = (linalg::dot(&a, &b) / (linalg::norm(&a) * linalg::norm(&b))).abs().min(1.0);
                best = best.min(c.acos());
            }
        }
    }
    Some(best)
}

/// The distributions `E_1, …` of the splitting with `E_0 = span{T}` removed:
/// umbilical with mean curvature `δ`, spherical, with totally geodesic
/// orthogonal complement.
pub fn distribution_checks_at(sd: &SmoothDecomposition) -> Result<DistributionChecks> {
    let jg = sd.geometry();
    let pg = jg.values();
    let d = sd.decomposition();
    let t_norm = pg.t_norm();
    let p0 = sd.t_line_projector().ok_or(GeomError::DegenerateT(t_norm))?;
    let Some(ti) = d.t_index else {
        return Err(GeomError::Geometry("T lies in no eigendistribution".into()));
    };
    let t_hat: Vec<f64> = pg.t.iter().map(|x| x / t_norm).collect();

    // refined splitting: (projector, basis, source)
    let mut parts: Vec<(Mat<Jet>, Vec<Vec<f64>>, usize)> = vec![(p0.clone(), vec![t_hat.clone()], ti)];
    for k in 0..d.s {
        if k == ti {
            let rest = gram_schmidt(vec![t_hat.clone()], d.bases[k].iter().cloned());
            if rest.len() > 1 {
                let p: Mat<Jet> = sd
                    .projector(k)
                    .iter()
                    .zip(&p0)
                    .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.clone() - y).collect())
                    .collect();
                parts.push((p, rest[1..].to_vec(), k));
            }
        } else {
            parts.push((sd.projector(k).clone(), d.bases[k].clone(), k));
        }
    }

    let eta = jg.eta_jets();
    let t = jg.t_jets();
    let mut t2 = Jet::constant(0.0);
    for x in t {
        t2 = t2 + x.clone() * x;
    }
    // sections through every basis vector of every part
    let sections: Vec<Vec<Vec<Jet>>> = parts
        .iter()
        .map(|(p, basis, _)| basis.iter().map(|v| sd.section_of(p, v)).collect())
        .collect();

    let mut reports = Vec::new();
    for k in 1..parts.len() {
        let (_, basis_k, source) = &parts[k];
        let xi = sd.xi_jets(*source);
        let mut c = Jet::constant(0.0);
        for (x, y) in xi.iter().zip(eta) {
            c = c + x.clone() * y;
        }
        let coef = -(c / &t2);
        let delta_jets: Vec<Jet> = t.iter().map(|x| x.clone() * &coef).collect();
        let delta = linalg::values(&delta_jets);
        let delta_field = jg.tangent_field(&delta_jets);
        let perp: Vec<&Vec<f64>> = parts
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .flat_map(|(_, p)| p.1.iter())
            .collect();

        let mut umbilicity: f64 = 0.0;
        let mut sphericity: f64 = 0.0;
        for x in basis_k {
            for (yi, y) in basis_k.iter().enumerate() {
                let nab = jg.nabla(&sections[k][yi], x);
                for z in &perp {
                    let r = linalg::dot(&nab, z) - linalg::dot(x, y) * linalg::dot(&delta, z);
                    umbilicity = umbilicity.max(r.abs());
                }
            }
            let nd = jg.nabla(&delta_field, x);
            for z in &perp {
                sphericity = sphericity.max(linalg::dot(&nd, z).abs());
            }
        }

        let mut totally_geodesic: f64 = 0.0;
        for (i, (_, bi, _)) in parts.iter().enumerate() {
            if i == k {
                continue;
            }
            for (j, (_, bj, _)) in parts.iter().enumerate() {
                if j == k {
                    continue;
                }
                for x in bi {
                    for yi in 0..bj.len() {
                        let nab = jg.nabla(&sections[j][yi], x);
                        for z in basis_k {
                            totally_geodesic = totally_geodesic.max(linalg::dot(&nab, z).abs());
                        }
                    }
                }
            }
        }
        reports.push(DistributionReport {
            source: *source,
            dim: basis_k.len(),
            delta,
            umbilicity,
            sphericity,
            totally_geodesic,
        });
    }
    let max_residual = reports
        .iter()
        .map(|r| r.umbilicity.max(r.sphericity).max(r.totally_geodesic))
        .fold(0.0, f64::max);
    Ok(DistributionChecks { distributions: reports, max_residual, independence_angle: independence_angle(&d.xi) })
}

pub fn distribution_checks(
    f: &ParametricImmersion,
    u: &[f64],
    decomposition: &PrincipalDecomposition,
) -> Result<DistributionChecks> {
    let jg = JetGeometry::new(f, u)?;
    if jg.values().t_norm() <= tolerance::T_ZERO {
        return Err(GeomError::DegenerateT(jg.values().t_norm()));
    }
    let sd = SmoothDecomposition::new(&jg, decomposition, DEFAULT_SEED)?;
    distribution_checks_at(&sd)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimalRicciBound {
    /// `max Ric(X) − ε` over samples and unit `X`.
    pub gap: f64,
    pub max_ricci: f64,
    pub is_slice_equality: bool,
    pub samples: usize,
}

/// Upper bound `Ric(X) ≤ ε` for minimal immersions; the supremum over unit
/// `X` is the largest eigenvalue of the Ricci tensor over `m − 1`.
pub fn minimal_ricci_bound(f: &ParametricImmersion, points: &[Vec<f64>]) -> Result<MinimalRicciBound> {
    if points.is_empty() {
        return Err(GeomError::Shape("minimal_ricci_bound needs at least one sample".into()));
    }
    let m = f.m() as f64;
    let eps = f.space.eps();
    let mut max_ricci = f64::NEG_INFINITY;
    let mut slice = true;
    for u in points {
        let pg = point_geometry(f, u)?;
        if pg.h_norm() >= tolerance::MINIMAL {
            return Err(GeomError::NotMinimal(pg.h_norm()));
        }
        let (vals, _) = linalg::symmetric_eigen(&extrinsic_ricci(&pg));
        let top = vals.last().copied().unwrap_or(0.0) / (m - 1.0);
        max_ricci = max_ricci.max(top);
        let alpha_max = pg.alpha.iter().flatten().flatten().fold(0.0_f64, |a, x| a.max(x.abs()));
        slice &= alpha_max < tolerance::MINIMAL && pg.t_norm() < tolerance::T_ZERO;
    }
    Ok(MinimalRicciBound { gap: max_ricci - eps, max_ricci, is_slice_equality: slice, samples: points.len() })
}
