//! Orthonormal frames and second fundamental form, written once over
//! [`Scalar`] so the same code yields pointwise values (`f64`) or their
//! derivatives along the chart (`Jet`).

use crate::ambient::AmbientSpace;
use crate::error::{GeomError, Result};
use crate::jet::Scalar;
use crate::linalg::Mat;

#[derive(Clone, Debug)]
pub(crate) struct Frame<S> {
    pub point: Vec<S>,
    /// Induced metric in chart coordinates.
    pub metric: Mat<S>,
    /// `X_a = Σ_i coeffs[a][i] ∂_i f`; lower triangular.
    pub coeffs: Mat<S>,
    pub tangent: Vec<Vec<S>>,
    pub normal: Vec<Vec<S>>,
    /// `alpha[a][b][c] = ⟨α(X_a, X_b), ξ̂_c⟩`.
    pub alpha: Vec<Vec<Vec<S>>>,
    pub t: Vec<S>,
    pub eta: Vec<S>,
}

fn axpy<S: Scalar>(coef: &S, x: &[S], y: &mut [S]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = yi.clone() - coef.clone() * xi;
    }
}

fn scale<S: Scalar>(v: &mut [S], s: &S) {
    for x in v.iter_mut() {
        *x = x.clone() * s;
    }
}

/// Assembles the frame from the point, first derivatives `d1[i][c]` and
/// second derivatives `d2[i][j][c]` of the immersion.
pub(crate) fn build_frame<S: Scalar>(
    space: &AmbientSpace,
    point: Vec<S>,
    d1: &[Vec<S>],
    d2: &[Vec<Vec<S>>],
) -> Result<Frame<S>> {
    let m = d1.len();
    let dim = space.dim();
    let codim = space.n + 1 - m;

    let mut metric = vec![vec![S::zero(); m]; m];
    for i in 0..m {
        for j in i..m {
            let gij = space.inner(&d1[i], &d1[j]);
            metric[i][j] = gij.clone();
            metric[j][i] = gij;
        }
    }

    // modified Gram–Schmidt on ∂_i f, tracking the change of basis
    let mut tangent: Vec<Vec<S>> = Vec::with_capacity(m);
    let mut coeffs: Mat<S> = Vec::with_capacity(m);
    for i in 0..m {
        let mut v = d1[i].clone();
        let mut e: Vec<S> = (0..m).map(|j| S::cst(if i == j { 1.0 } else { 0.0 })).collect();
        for _ in 0..2 {
            for b in 0..tangent.len() {
                let r = space.inner(&v, &tangent[b]);
                axpy(&r, &tangent[b], &mut v);
                axpy(&r, &coeffs[b], &mut e);
            }
        }
        let nrm2 = space.inner(&v, &v);
        if !(nrm2.value() > 0.0) {
            return Err(GeomError::Rank { smallest: 0.0, threshold: 0.0 });
        }
        let inv = nrm2.sqrt().recip();
        scale(&mut v, &inv);
        scale(&mut e, &inv);
        tangent.push(v);
        coeffs.push(e);
    }

    // normal frame: coordinate vectors projected onto (T M ⊕ N̄)^⊥, chosen
    // greedily by residual size
    let nbar = space.inclusion_normal(&point);
    let eps = space.eps();
    let mut residuals: Vec<Vec<S>> = (0..dim)
        .map(|c| {
            let mut v: Vec<S> = (0..dim).map(|k| S::cst(if k == c { 1.0 } else { 0.0 })).collect();
            let sign = if c == 0 && space.epsilon < 0 { -1.0 } else { 1.0 };
            if c <= space.n {
                let coef = nbar[c].clone() * (sign / eps);
                axpy(&coef, &nbar, &mut v);
            }
            for _ in 0..2 {
                for x in &tangent {
                    let r = space.inner(&v, x);
                    axpy(&r, x, &mut v);
                }
            }
            v
        })
        .collect();
    let mut used = vec![false; dim];
    let mut normal: Vec<Vec<S>> = Vec::with_capacity(codim);
    for _ in 0..codim {
        let (best, score) = (0..dim)
            .filter(|&c| !used[c])
            .map(|c| (c, space.inner(&residuals[c], &residuals[c]).value()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("enough candidates");
        if !(score > 1e-12) {
            return Err(GeomError::Geometry("normal space degenerated".into()));
        }
        used[best] = true;
        let mut v = residuals[best].clone();
        for x in tangent.iter().chain(&normal) {
            let r = space.inner(&v, x);
            axpy(&r, x, &mut v);
        }
        let inv = space.inner(&v, &v).sqrt().recip();
        scale(&mut v, &inv);
        for c in 0..dim {
            if !used[c] {
                let r = space.inner(&residuals[c], &v);
                axpy(&r, &v, &mut residuals[c]);
            }
        }
        normal.push(v);
    }

    // α in chart coordinates, then in the frame
    let mut alpha_chart = vec![vec![vec![S::zero(); codim]; m]; m];
    for i in 0..m {
        for j in i..m {
            for (c, xi) in normal.iter().enumerate() {
                let v = space.inner(&d2[i][j], xi);
                alpha_chart[i][j][c] = v.clone();
                alpha_chart[j][i][c] = v;
            }
        }
    }
    let mut alpha = vec![vec![vec![S::zero(); codim]; m]; m];
    for a in 0..m {
        for b in a..m {
            for c in 0..codim {
                let mut acc = S::zero();
                for i in 0..=a {
                    for j in 0..=b {
                        acc = acc + coeffs[a][i].clone() * &coeffs[b][j] * &alpha_chart[i][j][c];
                    }
                }
                alpha[a][b][c] = acc.clone();
                alpha[b][a][c] = acc;
            }
        }
    }

    let h = space.height_index();
    let t = tangent.iter().map(|x| x[h].clone()).collect();
    let eta = normal.iter().map(|x| x[h].clone()).collect();
    Ok(Frame {
        point,
        metric,
        coeffs,
        tangent,
        normal,
        alpha,
        t,
        eta,
    })
}
