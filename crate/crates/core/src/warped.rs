//! Warped product representations of `Q^n_ε` and the extrinsic warped
//! products built from them.
//!
//! The representation uses a fixed layout: `q = e_0`, the first factor is
//! tangent to `V_0 = span(e_1, …, e_{n_0})` and factor `i` to the next `n_i`
//! coordinate vectors. Points of the first factor are written as
//! `p_0 = w + √(1 − ε|w|²) q` with `w ∈ V_0`; points of factor `i` as
//! `p_i = q + x a_i + y` with `y ∈ V_i` and `x` fixed by `⟨p_i, p_i⟩ = ε`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ambient::AmbientSpace;
use crate::derivatives::{Chart, ChartMap, GenericMap};
use crate::error::{GeomError, Result};
use crate::immersion::{ExpectedAnalytics, ParametricImmersion};
use crate::jet::{Jet, Scalar};
use crate::linalg::{self, Mat};
use crate::tolerance;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpedProductSpec {
    pub epsilon: i32,
    pub n: usize,
    /// `n_0, n_1, …, n_k`, summing to `n`.
    pub factor_dims: Vec<usize>,
    /// Mean curvature vectors `z_1, …, z_k` at `q`, as `n + 1` space-form coordinates.
    pub z: Vec<Vec<f64>>,
    /// Replaces the constant `c` in `a_i = c q − z_i`; defaults to `ε`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

impl WarpedProductSpec {
    pub fn new(epsilon: i32, factor_dims: Vec<usize>, z: Vec<Vec<f64>>) -> Result<Self> {
        let spec = WarpedProductSpec {
            epsilon,
            n: factor_dims.iter().sum(),
            factor_dims,
            z,
            c: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Number of warped factors `k`.
    pub fn k(&self) -> usize {
        self.factor_dims.len().saturating_sub(1)
    }

    pub fn space(&self) -> Result<AmbientSpace> {
        AmbientSpace::new(self.epsilon, self.n)
    }

    pub fn eps(&self) -> f64 {
        self.epsilon as f64
    }

    pub fn c(&self) -> f64 {
        self.c.unwrap_or(self.eps())
    }

    pub fn q(&self) -> Vec<f64> {
        let mut q = vec![0.0; self.n + 1];
        q[0] = 1.0;
        q
    }

    /// Index of the first coordinate vector of `V_i`.
    pub fn offset(&self, i: usize) -> usize {
        1 + self.factor_dims[..i].iter().sum::<usize>()
    }

    /// `a_i = c q − z_i` for `1 ≤ i ≤ k`.
    pub fn a(&self, i: usize) -> Vec<f64> {
        let mut a: Vec<f64> = self.z[i - 1].iter().map(|x| -x).collect();
        a[0] += self.c();
        a
    }

    fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .enumerate()
            .map(|(i, (a, b))| if i == 0 { self.eps() * a * b } else { a * b })
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(GeomError::SpecMismatch(msg));
        if self.epsilon != 1 && self.epsilon != -1 {
            return bad(format!("epsilon must be +1 or -1, got {}", self.epsilon));
        }
        if self.factor_dims.len() < 2 || self.factor_dims.iter().any(|&d| d == 0) {
            return bad("need a first factor and at least one warped factor, all of positive dimension".into());
        }
        if self.factor_dims.iter().sum::<usize>() != self.n {
            return bad(format!("factor dimensions {:?} do not sum to n = {}", self.factor_dims, self.n));
        }
        self.space()?;
        if self.z.len() != self.k() {
            return bad(format!("{} warped factors but {} vectors z_i", self.k(), self.z.len()));
        }
        let v0 = 1..=self.factor_dims[0];
        for (i, z) in self.z.iter().enumerate() {
            if z.len() != self.n + 1 {
                return bad(format!("z_{} has {} entries, expected {}", i + 1, z.len(), self.n + 1));
            }
            if z.iter().enumerate().any(|(c, x)| !v0.contains(&c) && x.abs() > 1e-12) {
                return bad(format!("z_{} is not tangent to the first factor at q", i + 1));
            }
        }
        for i in 0..self.k() {
            for j in i + 1..self.k() {
                let ip = self.inner(&self.z[i], &self.z[j]);
                if (ip + self.eps()).abs() > 1e-10 {
                    return bad(format!(
                        "<z_{}, z_{}> = {ip} but must equal {}",
                        i + 1,
                        j + 1,
                        -self.eps()
                    ));
                }
            }
        }
        if let Some(c) = self.c {
            if !c.is_finite() {
                return bad("c must be finite".into());
            }
        }
        Ok(())
    }

    /// `p_0 = w + √(1 − ε|w|²) q` for `w` given by its `n_0` coordinates in `V_0`.
    pub fn first_factor_point<S: Scalar>(&self, w: &[S]) -> Vec<S> {
        let mut p = vec![S::zero(); self.n + 1];
        let mut w2 = S::zero();
        for (j, x) in w.iter().enumerate() {
            p[1 + j] = x.clone();
            w2 = w2 + x.square();
        }
        p[0] = (S::one() - w2 * self.eps()).sqrt();
        p
    }

    /// Point of factor `i` with coordinates `y` in `V_i`.
    pub fn factor_point<S: Scalar>(&self, i: usize, y: &[S]) -> Vec<S> {
        let a = self.a(i);
        let big_a = self.inner(&a, &a);
        let b = self.inner(&self.q(), &a);
        let mut y2 = S::zero();
        for x in y {
            y2 = y2 + x.square();
        }
        let disc = (S::cst(b * b) - y2.clone() * big_a).sqrt();
        let x = -(y2 / &(disc + b));
        let mut p: Vec<S> = a.iter().map(|ac| x.clone() * *ac).collect();
        p[0] = p[0].clone() + 1.0;
        let off = self.offset(i);
        for (j, yj) in y.iter().enumerate() {
            p[off + j] = p[off + j].clone() + yj;
        }
        p
    }

    /// Intrinsic curvature `⟨a_i, a_i⟩` of factor `i`.
    pub fn factor_curvature(&self, i: usize) -> f64 {
        let a = self.a(i);
        self.inner(&a, &a)
    }

    pub fn sigma<S: Scalar>(&self, p0: &[S], i: usize) -> S {
        let a = self.a(i);
        let mut acc = p0[0].clone() * (self.eps() * a[0]);
        for c in 1..=self.n {
            if a[c] != 0.0 {
                acc = acc + p0[c].clone() * a[c];
            }
        }
        acc
    }

    /// `ψ(p_0, …, p_k) = p_0 + Σ σ_i(p_0)(p_i − q)`.
    pub fn psi<S: Scalar>(&self, p0: &[S], ps: &[Vec<S>]) -> Vec<S> {
        let mut out = p0.to_vec();
        for (i, p) in ps.iter().enumerate() {
            let s = self.sigma(p0, i + 1);
            for c in 0..=self.n {
                let d = if c == 0 { p[c].clone() - 1.0 } else { p[c].clone() };
                out[c] = out[c].clone() + s.clone() * &d;
            }
        }
        out
    }

    fn check_first_factor(&self, p0: &[f64]) -> Result<()> {
        if p0.len() != self.n + 1 {
            return Err(GeomError::Shape("first-factor point has the wrong length".into()));
        }
        let off_plane = p0[1 + self.factor_dims[0]..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let quadric = (self.inner(p0, p0) - self.eps()).abs();
        if off_plane > tolerance::TANGENCY || quadric > tolerance::TANGENCY || (self.epsilon < 0 && p0[0] <= 0.0) {
            return Err(GeomError::Domain(format!(
                "point is not on the first factor (off-plane {off_plane:.3e}, quadric {quadric:.3e})"
            )));
        }
        Ok(())
    }

    fn check_factor(&self, i: usize, p: &[f64]) -> Result<()> {
        if p.len() != self.n + 1 {
            return Err(GeomError::Shape(format!("factor {i} point has the wrong length")));
        }
        // p − q must lie in span(a_i, V_i)
        let a = self.a(i);
        let mut d = p.to_vec();
        d[0] -= 1.0;
        let x = if a.iter().any(|v| *v != 0.0) {
            let span: Vec<usize> = (0..=self.n)
                .filter(|c| !(self.offset(i)..self.offset(i) + self.factor_dims[i]).contains(c))
                .collect();
            let num: f64 = span.iter().map(|&c| d[c] * a[c]).sum();
            let den: f64 = span.iter().map(|&c| a[c] * a[c]).sum();
            if den > 0.0 { num / den } else { 0.0 }
        } else {
            0.0
        };
        let mut resid = 0.0f64;
        for c in 0..=self.n {
            let in_vi = (self.offset(i)..self.offset(i) + self.factor_dims[i]).contains(&c);
            if !in_vi {
                resid = resid.max((d[c] - x * a[c]).abs());
            }
        }
        let quadric = (self.inner(p, p) - self.eps()).abs();
        if resid > tolerance::TANGENCY || quadric > tolerance::TANGENCY {
            return Err(GeomError::Domain(format!("point is not on factor {i}")));
        }
        Ok(())
    }
}

/// `σ_i(p_0) = ⟨p_0, a_i⟩` for `p_0` on the first factor.
pub fn sigma_eval(spec: &WarpedProductSpec, p0: &[f64], i: usize) -> Result<f64> {
    if i == 0 || i > spec.k() {
        return Err(GeomError::Domain(format!("factor index {i} outside 1..={}", spec.k())));
    }
    spec.check_first_factor(p0)?;
    Ok(spec.sigma(p0, i))
}

/// The warped product representation evaluated at `(p_0, p_1, …, p_k)`.
pub fn nolker_psi(spec: &WarpedProductSpec, p0: &[f64], ps: &[Vec<f64>]) -> Result<Vec<f64>> {
    if ps.len() != spec.k() {
        return Err(GeomError::Shape(format!("expected {} factor points", spec.k())));
    }
    spec.check_first_factor(p0)?;
    for (i, p) in ps.iter().enumerate() {
        spec.check_factor(i + 1, p)?;
        let s = spec.sigma(p0, i + 1);
        if !(s > 0.0) {
            return Err(GeomError::Domain(format!("sigma_{} = {s:.3e} is not positive", i + 1)));
        }
    }
    Ok(spec.psi(p0, ps))
}

/// Coordinates `(w, y_1, …, y_k)` of a point of the warped product.
#[derive(Clone, Debug, PartialEq)]
pub struct WarpedSample {
    pub w: Vec<f64>,
    pub y: Vec<Vec<f64>>,
}

impl WarpedSample {
    fn flatten(&self) -> Vec<f64> {
        let mut v = self.w.clone();
        for y in &self.y {
            v.extend_from_slice(y);
        }
        v
    }
}

/// `g_0 + Σ ρ_i² g_i` with all blocks in the sample's coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct WarpedMetric {
    pub g0: Mat<f64>,
    pub rho: Vec<f64>,
    pub factors: Vec<Mat<f64>>,
}

impl WarpedMetric {
    pub fn assemble(&self) -> Mat<f64> {
        let dims: Vec<usize> = std::iter::once(self.g0.len())
            .chain(self.factors.iter().map(Vec::len))
            .collect();
        let total: usize = dims.iter().sum();
        let mut g = vec![vec![0.0; total]; total];
        let mut off = 0;
        for (b, block) in std::iter::once(&self.g0).chain(&self.factors).enumerate() {
            let w = if b == 0 { 1.0 } else { self.rho[b - 1].powi(2) };
            for i in 0..block.len() {
                for j in 0..block.len() {
                    g[off + i][off + j] = w * block[i][j];
                }
            }
            off += block.len();
        }
        g
    }
}

fn pullback(space_inner: impl Fn(&[Jet], &[Jet]) -> Jet, comps: &[Jet], vars: std::ops::Range<usize>) -> Mat<f64> {
    let d: Vec<Vec<Jet>> = vars.clone().map(|i| comps.iter().map(|c| c.partial(i)).collect()).collect();
    d.iter()
        .map(|a| d.iter().map(|b| space_inner(a, b).value()).collect())
        .collect()
}

fn check_sample(spec: &WarpedProductSpec, sample: &WarpedSample) -> Result<()> {
    if sample.w.len() != spec.factor_dims[0]
        || sample.y.len() != spec.k()
        || sample.y.iter().zip(&spec.factor_dims[1..]).any(|(y, d)| y.len() != *d)
    {
        return Err(GeomError::Shape("sample does not match the factor dimensions".into()));
    }
    Ok(())
}

/// Warped metric with `ρ_i = σ_i(p_0)` at a sample.
pub fn warped_metric(spec: &WarpedProductSpec, sample: &WarpedSample) -> Result<WarpedMetric> {
    check_sample(spec, sample)?;
    let inner = |a: &[Jet], b: &[Jet]| {
        let mut acc = a[0].clone() * &b[0] * spec.eps();
        for c in 1..a.len() {
            acc = acc + a[c].clone() * &b[c];
        }
        acc
    };
    let wj = Jet::seed(&sample.w, 1);
    let p0 = spec.first_factor_point(&wj);
    let g0 = pullback(inner, &p0, 0..sample.w.len());
    let p0v = linalg::values(&p0);
    let mut rho = Vec::new();
    let mut factors = Vec::new();
    for (i, y) in sample.y.iter().enumerate() {
        let s = spec.sigma(&p0v, i + 1);
        if !(s > 0.0) {
            return Err(GeomError::Domain(format!("sigma_{} = {s:.3e} is not positive", i + 1)));
        }
        rho.push(s);
        let yj = Jet::seed(y, 1);
        factors.push(pullback(inner, &spec.factor_point(i + 1, &yj), 0..y.len()));
    }
    Ok(WarpedMetric { g0, rho, factors })
}

/// Largest entry of `ψ^* ⟨,⟩ − (g_0 + Σ σ_i² g_i)` at a sample.
pub fn pullback_vs_warped_metric(spec: &WarpedProductSpec, sample: &WarpedSample) -> Result<f64> {
    let warped = warped_metric(spec, sample)?.assemble();
    let u = sample.flatten();
    let vars = Jet::seed(&u, 1);
    let n0 = spec.factor_dims[0];
    let p0 = spec.first_factor_point(&vars[..n0]);
    let mut ps = Vec::new();
    let mut off = n0;
    for i in 1..=spec.k() {
        let d = spec.factor_dims[i];
        ps.push(spec.factor_point(i, &vars[off..off + d]));
        off += d;
    }
    let image = spec.psi(&p0, &ps);
    let inner = |a: &[Jet], b: &[Jet]| {
        let mut acc = a[0].clone() * &b[0] * spec.eps();
        for c in 1..a.len() {
            acc = acc + a[c].clone() * &b[c];
        }
        acc
    };
    let g = pullback(inner, &image, 0..u.len());
    Ok(g.iter()
        .flatten()
        .zip(warped.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Profile `f_0` of a warped product: `w(s) ∈ V_0` together with the height.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    /// A single point `(w, height)`.
    Point { w: Vec<f64>, height: f64 },
    /// Polynomial curve; coefficients in ascending powers of `s`.
    Curve {
        w: Vec<Vec<f64>>,
        height: Vec<f64>,
        s_min: f64,
        s_max: f64,
    },
    /// `w(s) = centre + radius (cos s e_1 + sin s e_2)` in the first two
    /// coordinates of `V_0`, with a polynomial height.
    Circle {
        center: Vec<f64>,
        radius: f64,
        height: Vec<f64>,
        s_min: f64,
        s_max: f64,
    },
}

struct PolynomialProfile {
    w: Vec<Vec<f64>>,
    height: Vec<f64>,
}

fn poly<S: Scalar>(coeffs: &[f64], s: &S) -> S {
    let mut acc = S::zero();
    for c in coeffs.iter().rev() {
        acc = acc * s + *c;
    }
    acc
}

impl GenericMap for PolynomialProfile {
    fn dim_in(&self) -> usize {
        1
    }
    fn dim_out(&self) -> usize {
        self.w.len() + 1
    }
    fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let mut out: Vec<S> = self.w.iter().map(|c| poly(c, &u[0])).collect();
        out.push(poly(&self.height, &u[0]));
        out
    }
}

struct CircleProfile {
    center: Vec<f64>,
    radius: f64,
    height: Vec<f64>,
}

impl GenericMap for CircleProfile {
    fn dim_in(&self) -> usize {
        1
    }
    fn dim_out(&self) -> usize {
        self.center.len() + 1
    }
    fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let mut out: Vec<S> = self.center.iter().map(|c| S::cst(*c)).collect();
        out[0] = out[0].clone() + u[0].cos() * self.radius;
        out[1] = out[1].clone() + u[0].sin() * self.radius;
        out.push(poly(&self.height, &u[0]));
        out
    }
}

struct ConstantProfile {
    values: Vec<f64>,
}

impl GenericMap for ConstantProfile {
    fn dim_in(&self) -> usize {
        0
    }
    fn dim_out(&self) -> usize {
        self.values.len()
    }
    fn eval<S: Scalar>(&self, _u: &[S]) -> Vec<S> {
        self.values.iter().map(|v| S::cst(*v)).collect()
    }
}

impl ProfileSpec {
    /// Chart and map with outputs `(w_1, …, w_{n_0}, height)`.
    pub fn to_map(&self) -> Result<(Chart, Arc<dyn ChartMap>)> {
        match self {
            ProfileSpec::Point { w, height } => {
                let mut values = w.clone();
                values.push(*height);
                Ok((Chart::new(vec![], vec![])?, Arc::new(ConstantProfile { values })))
            }
            ProfileSpec::Curve { w, height, s_min, s_max } => Ok((
                Chart::new(vec![*s_min], vec![*s_max])?,
                Arc::new(PolynomialProfile {
                    w: w.clone(),
                    height: height.clone(),
                }),
            )),
            ProfileSpec::Circle {
                center,
                radius,
                height,
                s_min,
                s_max,
            } => {
                if center.len() < 2 {
                    return Err(GeomError::SpecMismatch("a circle profile needs n_0 >= 2".into()));
                }
                Ok((
                    Chart::new(vec![*s_min], vec![*s_max])?,
                    Arc::new(CircleProfile {
                        center: center.clone(),
                        radius: *radius,
                        height: height.clone(),
                    }),
                ))
            }
        }
    }

    pub fn n0(&self) -> usize {
        match self {
            ProfileSpec::Point { w, .. } => w.len(),
            ProfileSpec::Curve { w, .. } => w.len(),
            ProfileSpec::Circle { center, .. } => center.len(),
        }
    }
}

struct IdentityFactor {
    dim: usize,
}

impl GenericMap for IdentityFactor {
    fn dim_in(&self) -> usize {
        self.dim
    }
    fn dim_out(&self) -> usize {
        self.dim
    }
    fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        u.to_vec()
    }
}

/// A factor immersion written in the graph coordinates `y ∈ V_i` of its factor.
#[derive(Clone)]
pub struct FactorMap {
    pub chart: Chart,
    pub map: Arc<dyn ChartMap>,
}

impl FactorMap {
    /// The identity of factor `i` on a cube around `q`, well inside the graph chart.
    pub fn identity(spec: &WarpedProductSpec, i: usize) -> Self {
        let d = spec.factor_dims[i];
        let curv = spec.factor_curvature(i).max(1.0);
        let half = 0.45 / curv.sqrt();
        FactorMap {
            chart: Chart::new(vec![-half; d], vec![half; d]).expect("non-empty cube"),
            map: Arc::new(IdentityFactor { dim: d }),
        }
    }
}

struct WarpedImmersion {
    spec: WarpedProductSpec,
    profile: Arc<dyn ChartMap>,
    factors: Vec<Arc<dyn ChartMap>>,
}

impl GenericMap for WarpedImmersion {
    fn dim_in(&self) -> usize {
        self.profile.dim_in() + self.factors.iter().map(|f| f.dim_in()).sum::<usize>()
    }
    fn dim_out(&self) -> usize {
        self.spec.n + 2
    }
    fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let d0 = self.profile.dim_in();
        let wh = S::eval_map(&*self.profile, &u[..d0]);
        let n0 = self.spec.factor_dims[0];
        let p0 = self.spec.first_factor_point(&wh[..n0]);
        let mut off = d0;
        let ps: Vec<Vec<S>> = self
            .factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let d = f.dim_in();
                let y = S::eval_map(&**f, &u[off..off + d]);
                off += d;
                self.spec.factor_point(i + 1, &y)
            })
            .collect();
        let mut out = self.spec.psi(&p0, &ps);
        out.push(wh[n0].clone());
        out
    }
}

/// `f = ψ ∘ (f_0 × f_1 × … × f_k)` with the height carried by the profile.
pub fn build_extrinsic_warped_product(
    spec: &WarpedProductSpec,
    profile: &ProfileSpec,
    factors: &[FactorMap],
) -> Result<ParametricImmersion> {
    spec.validate()?;
    if profile.n0() != spec.factor_dims[0] {
        return Err(GeomError::SpecMismatch(format!(
            "profile lives in {} coordinates, first factor has dimension {}",
            profile.n0(),
            spec.factor_dims[0]
        )));
    }
    let empty = match profile {
        ProfileSpec::Curve { w, height, .. } => height.is_empty() || w.iter().any(Vec::is_empty),
        ProfileSpec::Circle { height, .. } => height.is_empty(),
        ProfileSpec::Point { .. } => false,
    };
    if empty {
        return Err(GeomError::SpecMismatch("profile polynomials need at least one coefficient".into()));
    }
    if factors.len() != spec.k() {
        return Err(GeomError::SpecMismatch(format!(
            "{} factor maps for {} warped factors",
            factors.len(),
            spec.k()
        )));
    }
    for (i, f) in factors.iter().enumerate() {
        if f.map.dim_out() != spec.factor_dims[i + 1] || f.map.dim_in() != f.chart.dim() {
            return Err(GeomError::SpecMismatch(format!(
                "factor {} map must have {} outputs",
                i + 1,
                spec.factor_dims[i + 1]
            )));
        }
    }
    let (pchart, pmap) = profile.to_map()?;
    let mut lower = pchart.lower.clone();
    let mut upper = pchart.upper.clone();
    for f in factors {
        lower.extend_from_slice(&f.chart.lower);
        upper.extend_from_slice(&f.chart.upper);
    }
    let chart = Chart::new(lower, upper)?;
    let map = WarpedImmersion {
        spec: spec.clone(),
        profile: pmap,
        factors: factors.iter().map(|f| f.map.clone()).collect(),
    };
    let imm = ParametricImmersion::new(spec.space()?, chart, Arc::new(map))?;
    // σ_i must stay positive on the whole chart; probe corners and centre
    let probe = probe_points(imm.chart());
    for u in &probe {
        let p = imm.eval(u).coords;
        if p.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::Domain(format!("warped product undefined at {u:?}")));
        }
    }
    let d0 = pchart.dim();
    for u in &probe {
        let wh = profile.to_map()?.1.eval_real(&u[..d0]);
        let p0 = spec.first_factor_point(&wh[..spec.factor_dims[0]]);
        if p0.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::Domain("profile leaves the first factor".into()));
        }
        for i in 1..=spec.k() {
            let s = spec.sigma(&p0, i);
            if !(s > 0.0) {
                return Err(GeomError::Domain(format!(
                    "sigma_{i} = {s:.3e} is not positive along the profile"
                )));
            }
        }
    }
    Ok(imm.with_label("extrinsic_warped_product"))
}

fn probe_points(chart: &Chart) -> Vec<Vec<f64>> {
    let d = chart.dim();
    let mut pts = vec![chart.center()];
    if d <= 10 {
        for mask in 0..(1usize << d) {
            pts.push(
                (0..d)
                    .map(|j| if mask >> j & 1 == 1 { chart.upper[j] } else { chart.lower[j] })
                    .collect(),
            );
        }
    }
    pts
}

/// Extrinsic warped product whose warped factors are identity maps.
pub fn build_multirotational(spec: &WarpedProductSpec, profile: &ProfileSpec) -> Result<ParametricImmersion> {
    let factors: Vec<FactorMap> = (1..=spec.k()).map(|i| FactorMap::identity(spec, i)).collect();
    let t_vanishes = match profile {
        ProfileSpec::Point { .. } => true,
        ProfileSpec::Curve { height, .. } | ProfileSpec::Circle { height, .. } => {
            height.iter().skip(1).all(|c| *c == 0.0)
        }
    };
    Ok(build_extrinsic_warped_product(spec, profile, &factors)?
        .with_label("multirotational")
        .with_expected(ExpectedAnalytics {
            flat_normal: Some(true),
            class_a: Some(true),
            t_vanishes: Some(t_vanishes),
            ..ExpectedAnalytics::default()
        }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotational_s3() -> WarpedProductSpec {
        // S^3 = S^1 ×_σ S^2 with z_1 = 0
        WarpedProductSpec::new(1, vec![1, 2], vec![vec![0.0; 4]]).unwrap()
    }

    #[test]
    fn sigma_is_one_at_q() {
        let spec = WarpedProductSpec::new(1, vec![2, 1, 1], vec![
            vec![0.0, 1.0, 0.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.5, 0.0, 0.0],
        ])
        .unwrap();
        for i in 1..=2 {
            assert_eq!(sigma_eval(&spec, &spec.q(), i).unwrap(), 1.0);
        }
    }

    #[test]
    fn sigma_is_cosine_of_distance_for_great_factor() {
        let spec = rotational_s3();
        let theta: f64 = 0.7;
        let p0 = spec.first_factor_point(&[theta.sin()]);
        assert!((sigma_eval(&spec, &p0, 1).unwrap() - theta.cos()).abs() < 1e-15);
    }

    #[test]
    fn psi_is_identity_on_the_profile() {
        let spec = rotational_s3();
        let p0 = spec.first_factor_point(&[0.3]);
        let out = nolker_psi(&spec, &p0, &[spec.q()]).unwrap();
        assert!(linalg::max_abs(&linalg::sub(&out, &p0)) < 1e-15);
    }

    #[test]
    fn constraint_violation_names_the_pair() {
        let err = WarpedProductSpec::new(1, vec![2, 1, 1], vec![
            vec![0.0, 1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0],
        ])
        .unwrap_err();
        assert!(err.to_string().contains("z_1, z_2"), "{err}");
    }

    #[test]
    fn z_outside_first_factor_is_rejected() {
        assert!(WarpedProductSpec::new(1, vec![1, 2], vec![vec![0.0, 0.0, 1.0, 0.0]]).is_err());
    }

    #[test]
    fn nonpositive_sigma_is_a_domain_error() {
        let spec = WarpedProductSpec::new(1, vec![1, 1], vec![vec![0.0, 2.0, 0.0]]).unwrap();
        // σ = √(1 − w²) − 2w < 0 for w = 0.9
        let p0 = spec.first_factor_point(&[0.9]);
        let p1 = spec.factor_point(1, &[0.1]);
        assert!(matches!(nolker_psi(&spec, &p0, &[p1]), Err(GeomError::Domain(_))));
    }

    #[test]
    fn hyperbolic_factor_points_lie_on_the_hyperboloid() {
        let spec = WarpedProductSpec::new(-1, vec![1, 2], vec![vec![0.0, 0.5, 0.0, 0.0]]).unwrap();
        let p = spec.factor_point(1, &[0.3, -0.2]);
        assert!((spec.inner(&p, &p) + 1.0).abs() < 1e-14);
        let p0 = spec.first_factor_point(&[0.4]);
        assert!((spec.inner(&p0, &p0) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn pullback_matches_warped_metric() {
        let spec = rotational_s3();
        let sample = WarpedSample {
            w: vec![0.35],
            y: vec![vec![0.2, -0.1]],
        };
        assert!(pullback_vs_warped_metric(&spec, &sample).unwrap() < 1e-14);
    }
}
