//! Named example immersions with known invariants.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::ambient::AmbientSpace;
use crate::derivatives::{Chart, GenericMap};
use crate::error::{GeomError, Result};
use crate::immersion::{ExpectedAnalytics, ParametricImmersion};
use crate::jet::Scalar;
use crate::sampling;
use crate::warped::{build_multirotational, ProfileSpec, WarpedProductSpec};

pub type Params = BTreeMap<String, f64>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: f64,
    pub range: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub params: Vec<ParamInfo>,
}

const fn p(name: &'static str, default: f64, range: &'static str) -> ParamInfo {
    ParamInfo { name, default, range }
}

pub fn registry() -> Vec<EntryInfo> {
    vec![
        EntryInfo {
            name: "slice_totally_geodesic",
            description: "Q^m x {t0} inside Q^m x R",
            params: vec![p("m", 3.0, "integer 2..=8"), p("t0", 0.0, "real"), p("epsilon", 1.0, "+1 or -1")],
        },
        EntryInfo {
            name: "slice_small_sphere",
            description: "S^m(r) x {t0} inside S^(m+1) x R",
            params: vec![p("m", 4.0, "integer 2..=8"), p("r", FRAC_1_SQRT_2, "0 < r < 1"), p("t0", 0.0, "real")],
        },
        EntryInfo {
            name: "vertical_cylinder",
            description: "geodesic sphere of Q^m times R; r is the radius (epsilon = -1: geodesic radius)",
            params: vec![p("m", 3.0, "integer 2..=8"), p("r", FRAC_1_SQRT_2, "0 < r < 1, any r > 0 if epsilon = -1"), p("epsilon", 1.0, "+1 or -1")],
        },
        EntryInfo {
            name: "clifford_product",
            description: "S^p(r) x S^q(sqrt(1 - r^2)) x {t0} inside S^(p+q+1) x R",
            params: vec![p("p", 2.0, "integer >= 1"), p("q", 2.0, "integer >= 1, p + q in 2..=8"), p("r", FRAC_1_SQRT_2, "0 < r < 1"), p("t0", 0.0, "real")],
        },
        EntryInfo {
            name: "torus_cylinder",
            description: "flat torus S^1(r) x S^1(sqrt(1 - r^2)) of S^3 times R; Ricci flat with |T| = 1",
            params: vec![p("r", 0.6, "0 < r < 1")],
        },
        EntryInfo {
            name: "rotational_graph",
            description: "rotation hypersurface of Q^3 x R with height c1 s + c2 s^2 + c3 s^3 over the geodesic distance s",
            params: vec![p("c1", 0.7, "real"), p("c2", 0.2, "real"), p("c3", -0.1, "real"), p("epsilon", 1.0, "+1 or -1")],
        },
        EntryInfo {
            name: "generic_codim2_surface",
            description: "seeded perturbation of a great S^3 inside S^4 x R with a height function (codimension 2)",
            params: vec![p("seed", 1.0, "non-negative integer")],
        },
        EntryInfo {
            name: "generic_graph_hypersurface",
            description: "graph over S^3 of a seeded generic quadratic height inside S^3 x R",
            params: vec![p("seed", 7.0, "non-negative integer")],
        },
        EntryInfo {
            name: "multirotational",
            description: "multi-rotational submanifold of S^4 x R over a curve profile with two circle factors",
            params: vec![p("height1", 0.7, "real"), p("height2", 0.2, "real")],
        },
    ]
}

struct Reader<'a> {
    entry: &'static str,
    params: &'a Params,
    known: Vec<ParamInfo>,
}

impl Reader<'_> {
    fn real(&self, name: &str) -> f64 {
        self.params.get(name).copied().unwrap_or_else(|| {
            self.known.iter().find(|p| p.name == name).map(|p| p.default).expect("registered parameter")
        })
    }

    fn err(&self, name: &str, reason: impl Into<String>) -> GeomError {
        GeomError::ParamRange {
            name: name.to_string(),
            reason: format!("{} ({})", reason.into(), self.entry),
        }
    }

    fn int(&self, name: &str, lo: usize, hi: usize) -> Result<usize> {
        let v = self.real(name);
        if v.fract() != 0.0 || v < lo as f64 || v > hi as f64 {
            return Err(self.err(name, format!("must be an integer in {lo}..={hi}, got {v}")));
        }
        Ok(v as usize)
    }

    fn open(&self, name: &str, lo: f64, hi: f64) -> Result<f64> {
        let v = self.real(name);
        if !(v > lo && v < hi) {
            return Err(self.err(name, format!("must lie strictly between {lo} and {hi}, got {v}")));
        }
        Ok(v)
    }

    fn finite(&self, name: &str) -> Result<f64> {
        let v = self.real(name);
        if !v.is_finite() {
            return Err(self.err(name, "must be finite"));
        }
        Ok(v)
    }

    fn epsilon(&self) -> Result<i32> {
        match self.real("epsilon") {
            x if x == 1.0 => Ok(1),
            x if x == -1.0 => Ok(-1),
            x => Err(self.err("epsilon", format!("must be +1 or -1, got {x}"))),
        }
    }

    fn seed(&self) -> Result<u64> {
        let v = self.real("seed");
        if v.fract() != 0.0 || !(0.0..=9.0e15).contains(&v) {
            return Err(self.err("seed", "must be a non-negative integer"));
        }
        Ok(v as u64)
    }
}

/// Unit sphere `S^k ⊂ R^{k+1}` in hyperspherical coordinates.
pub fn sphere_point<S: Scalar>(angles: &[S]) -> Vec<S> {
    let k = angles.len();
    let mut out = Vec::with_capacity(k + 1);
    let mut prod = S::one();
    for a in angles {
        out.push(prod.clone() * &a.cos());
        prod = prod * &a.sin();
    }
    out.push(prod);
    out
}

/// Chart of `sphere_point` away from its coordinate singularities.
pub fn sphere_chart_bounds(k: usize) -> Vec<(f64, f64)> {
    (0..k)
        .map(|i| if i + 1 < k { (0.3, PI - 0.3) } else { (-2.8, 2.8) })
        .collect()
}

/// Hyperspherical chart around the pole `e_0` where the last angle is the
/// only periodic one: the first polar angle runs over `(0.3, π/2)` so the
/// pole itself is avoided.
fn polar_chart_bounds(k: usize, first: (f64, f64)) -> Vec<(f64, f64)> {
    let mut b = vec![first];
    b.extend(sphere_chart_bounds(k - 1));
    b
}

struct Slice {
    m: usize,
    t0: f64,
    epsilon: i32,
}

impl GenericMap for Slice {
    fn dim_in(&self) -> usize {
        self.m
    }
    fn dim_out(&self) -> usize {
        self.m + 2
    }
    fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let mut out = if self.epsilon > 0 {
            sphere_point(u)
        } else {
            let rho = &u[0];
            let mut v = vec![rho.cosh()];
            v.extend(sphere_point(&u[1..]).into_iter().map(|x| x * &rho.sinh()));
            v
        };
        out.push(S::cst(self.t0));
        out
    }
}

struct SmallSphere {
    m: usize,
    r: f64,
    t0: f64,
}

impl GenericMap for SmallSphere {
    fn dim_in(&self) -> usize {
        self.m
    }
    fn dim_out(&self) -> usize {
        self.m + 3
    }
    fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let mut out: Vec<S> = sphere_point(u).into_iter().map(|x| x * self.r).collect();
        out.push(S::cst((1.0 - self.r * self.r).sqrt()));
        out.push(S::cst(self.t0));
        out
    }
}

/// Parameters `(t, θ_1, …, θ_{m−1})`.
struct Cylinder {
    m: usize,
    r: f64,
    epsilon: i32,
}

impl GenericMap for Cylinder {
    fn dim_in(&self) -> usize {
        self.m
    }
    fn dim_out(&self) -> usize {
        self.m + 2
    }
    fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let y = sphere_point(&u[1..]);
        let mut out = if self.epsilon > 0 {
            let mut v: Vec<S> = y.into_iter().map(|x| x * self.r).collect();
            v.push(S::cst((1.0 - self.r * self.r).sqrt()));
            v
        } else {
            let mut v = vec![S::cst(self.r.cosh())];
            v.extend(y.into_iter().map(|x| x * self.r.sinh()));
            v
        };
        out.push(u[0].clone());
        out
    }
}

struct Clifford {
    p: usize,
    q: usize,
    r: f64,
    t0: f64,
}

impl GenericMap for Clifford {
    fn dim_in(&self) -> usize {
        self.p + self.q
    }
    fn dim_out(&self) -> usize {
        self.p + self.q + 3
    }
    fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let s = (1.0 - self.r * self.r).sqrt();
        let mut out: Vec<S> = sphere_point(&u[..self.p]).into_iter().map(|x| x * self.r).collect();
        out.extend(sphere_point(&u[self.p..]).into_iter().map(|x| x * s));
        out.push(S::cst(self.t0));
        out
    }
}

/// `S^1(r) × S^1(√(1 − r²)) × R`, parameters `(t, θ, φ)`.
struct TorusCylinder {
    r: f64,
}

impl GenericMap for TorusCylinder {
    fn dim_in(&self) -> usize {
        3
    }
    fn dim_out(&self) -> usize {
        5
    }
    fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let s = (1.0 - self.r * self.r).sqrt();
        vec![
            u[1].cos() * self.r,
            u[1].sin() * self.r,
            u[2].cos() * s,
            u[2].sin() * s,
            u[0].clone(),
        ]
    }
}

/// Parameters `(s, θ_1, θ_2)`: geodesic distance from `e_0` and a point of `S^2`.
struct RotationalGraph {
    c: [f64; 3],
    epsilon: i32,
}

impl GenericMap for RotationalGraph {
    fn dim_in(&self) -> usize {
        3
    }
    fn dim_out(&self) -> usize {
        5
    }
    fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let s = &u[0];
        let (cs, sn) = if self.epsilon > 0 { (s.cos(), s.sin()) } else { (s.cosh(), s.sinh()) };
        let mut out = vec![cs];
        out.extend(sphere_point(&u[1..]).into_iter().map(|x| x * &sn));
        let h = (s.clone() * self.c[2] + self.c[1]) * s + self.c[0];
        out.push(h * s);
        out
    }
}

/// Degree ≤ 2 polynomial `R^d → R` with coefficients `(constant, linear, quadratic upper triangle)`.
#[derive(Clone, Debug)]
struct Quadratic {
    constant: f64,
    linear: Vec<f64>,
    quad: Vec<Vec<f64>>,
}

impl Quadratic {
    fn random(rng: &mut impl Rng, d: usize, scale: f64) -> Self {
        let mut draw = || (rng.random::<f64>() * 2.0 - 1.0) * scale;
        let constant = draw();
        let linear = (0..d).map(|_| draw()).collect();
        let quad = (0..d).map(|i| (0..d).map(|j| if j >= i { draw() } else { 0.0 }).collect()).collect();
        Quadratic { constant, linear, quad }
    }

    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        let mut acc = S::cst(self.constant);
        for (i, xi) in x.iter().enumerate() {
            acc = acc + xi.clone() * self.linear[i];
            for j in i..x.len() {
                if self.quad[i][j] != 0.0 {
                    acc = acc + xi.clone() * &x[j] * self.quad[i][j];
                }
            }
        }
        acc
    }
}

/// `S^3 → S^4`: the equator plus a seeded quadratic perturbation, renormalised.
struct GenericCodim2 {
    perturbation: Vec<Quadratic>,
    height: Quadratic,
}

impl GenericCodim2 {
    fn new(seed: u64) -> Self {
        let mut rng = sampling::rng(seed);
        let perturbation = (0..5).map(|_| Quadratic::random(&mut rng, 4, 0.25)).collect();
        let height = Quadratic::random(&mut rng, 4, 0.6);
        GenericCodim2 { perturbation, height }
    }
}

impl GenericMap for GenericCodim2 {
    fn dim_in(&self) -> usize {
        3
    }
    fn dim_out(&self) -> usize {
        6
    }
    fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let x = sphere_point(u);
        let mut y: Vec<S> = (0..5)
            .map(|c| {
                let base = if c < 4 { x[c].clone() } else { S::zero() };
                base + self.perturbation[c].eval(&x)
            })
            .collect();
        let mut n2 = S::zero();
        for v in &y {
            n2 = n2 + v.square();
        }
        let inv = n2.sqrt().recip();
        for v in y.iter_mut() {
            *v = v.clone() * &inv;
        }
        y.push(self.height.eval(&x));
        y
    }
}

struct GenericGraph {
    height: Quadratic,
}

impl GenericMap for GenericGraph {
    fn dim_in(&self) -> usize {
        3
    }
    fn dim_out(&self) -> usize {
        5
    }
    fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let mut x = sphere_point(u);
        let h = self.height.eval(&x);
        x.push(h);
        x
    }
}

/// The multi-rotational example: `ε = 1`, `n_0 = 2`, two circle factors,
/// `z_1 = e_1`, `z_2 = −e_1 + e_2/2`, and a polynomial curve profile.
pub fn multirotational_example(height: [f64; 2]) -> Result<(WarpedProductSpec, ProfileSpec)> {
    let spec = WarpedProductSpec::new(
        1,
        vec![2, 1, 1],
        vec![vec![0.0, 1.0, 0.0, 0.0, 0.0], vec![0.0, -1.0, 0.5, 0.0, 0.0]],
    )?;
    let profile = ProfileSpec::Curve {
        w: vec![vec![0.0, 0.15, 0.05], vec![0.05, 0.1, -0.05]],
        height: vec![0.0, height[0], height[1]],
        s_min: -1.0,
        s_max: 1.0,
    };
    Ok((spec, profile))
}

fn expected(
    lambda: Option<f64>,
    s: usize,
    dims: Vec<usize>,
    xi_norms: Vec<f64>,
    einstein: bool,
    minimal: bool,
    t_vanishes: bool,
) -> ExpectedAnalytics {
    ExpectedAnalytics {
        lambda,
        s: Some(s),
        dims: Some(dims),
        xi_norms: Some(xi_norms),
        class_a: Some(true),
        einstein: Some(einstein),
        minimal: Some(minimal),
        flat_normal: Some(true),
        t_vanishes: Some(t_vanishes),
    }
}

/// Builds a catalog entry. Missing parameters take their registered defaults.
pub fn make(name: &str, params: &Params) -> Result<ParametricImmersion> {
    let info = registry()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| GeomError::UnknownEntry(name.to_string()))?;
    for key in params.keys() {
        if !info.params.iter().any(|p| p.name == key) {
            return Err(GeomError::ParamRange {
                name: key.clone(),
                reason: format!("not a parameter of {name}"),
            });
        }
    }
    let rd = Reader {
        entry: info.name,
        params,
        known: info.params.clone(),
    };
    let imm = match name {
        "slice_totally_geodesic" => {
            let m = rd.int("m", 2, 8)?;
            let t0 = rd.finite("t0")?;
            let epsilon = rd.epsilon()?;
            let space = AmbientSpace::new(epsilon, m)?;
            let bounds = if epsilon > 0 {
                sphere_chart_bounds(m)
            } else {
                polar_chart_bounds(m, (0.3, 1.5))
            };
            let e = epsilon as f64;
            ParametricImmersion::new(space, Chart::from_bounds(&bounds), Arc::new(Slice { m, t0, epsilon }))?
                .with_expected(expected(Some((m as f64 - 1.0) * e), 1, vec![m], vec![0.0], true, true, true))
        }
        "slice_small_sphere" => {
            let m = rd.int("m", 2, 8)?;
            let r = rd.open("r", 0.0, 1.0)?;
            let t0 = rd.finite("t0")?;
            let kappa = (1.0 - r * r).sqrt() / r;
            let space = AmbientSpace::sphere(m + 1);
            let lambda = (m as f64 - 1.0) / (r * r);
            ParametricImmersion::new(
                space,
                Chart::from_bounds(&sphere_chart_bounds(m)),
                Arc::new(SmallSphere { m, r, t0 }),
            )?
            .with_expected(expected(Some(lambda), 1, vec![m], vec![kappa], true, false, true))
        }
        "vertical_cylinder" => {
            let m = rd.int("m", 2, 8)?;
            let epsilon = rd.epsilon()?;
            let r = if epsilon > 0 { rd.open("r", 0.0, 1.0)? } else { rd.open("r", 0.0, 20.0)? };
            // curvature of the geodesic sphere and radius of the induced round metric
            let (kappa, radius) = if epsilon > 0 {
                ((1.0 - r * r).sqrt() / r, r)
            } else {
                (1.0 / r.tanh(), r.sinh())
            };
            let mut bounds = vec![(-1.0, 1.0)];
            bounds.extend(sphere_chart_bounds(m - 1));
            let space = AmbientSpace::new(epsilon, m)?;
            let mf = m as f64;
            let einstein = m == 2;
            let lambda = if einstein { Some(0.0) } else { None };
            let mut exp = expected(lambda, 2, vec![1, m - 1], vec![0.0, kappa], einstein, false, false);
            // intrinsic sphere of radius `radius`: Ricci (m − 2)/radius² on m − 1 directions
            exp.lambda = exp.lambda.or(Some((mf - 2.0) / (radius * radius) * (mf - 1.0) / mf));
            ParametricImmersion::new(space, Chart::from_bounds(&bounds), Arc::new(Cylinder { m, r, epsilon }))?
                .with_expected(exp)
        }
        "clifford_product" => {
            let pd = rd.int("p", 1, 7)?;
            let qd = rd.int("q", 1, 7)?;
            if pd + qd > 8 {
                return Err(rd.err("q", "p + q must not exceed 8"));
            }
            let r = rd.open("r", 0.0, 1.0)?;
            let t0 = rd.finite("t0")?;
            let s = (1.0 - r * r).sqrt();
            let ric1 = (pd as f64 - 1.0) / (r * r);
            let ric2 = (qd as f64 - 1.0) / (s * s);
            let einstein = (ric1 - ric2).abs() < 1e-12;
            let m = (pd + qd) as f64;
            let h = (pd as f64 * s / r - qd as f64 * r / s) / m;
            let mut bounds = sphere_chart_bounds(pd);
            bounds.extend(sphere_chart_bounds(qd));
            let lambda = (pd as f64 * ric1 + qd as f64 * ric2) / m;
            ParametricImmersion::new(
                AmbientSpace::sphere(pd + qd + 1),
                Chart::from_bounds(&bounds),
                Arc::new(Clifford { p: pd, q: qd, r, t0 }),
            )?
            .with_expected(expected(
                Some(lambda),
                2,
                vec![pd, qd],
                vec![s / r, r / s],
                einstein,
                h.abs() < 1e-12,
                true,
            ))
        }
        "torus_cylinder" => {
            let r = rd.open("r", 0.0, 1.0)?;
            let s = (1.0 - r * r).sqrt();
            let (k1, k2) = (s / r, r / s);
            let mut exp = expected(Some(0.0), 3, vec![1, 1, 1], vec![0.0, k1.min(k2), k1.max(k2)], true, false, false);
            if (k1 - k2).abs() < 1e-12 {
                // the Clifford torus: equal norms, opposite principal normals
                exp.xi_norms = Some(vec![0.0, k1, k2]);
                exp.minimal = Some(true);
            }
            ParametricImmersion::new(
                AmbientSpace::sphere(3),
                Chart::from_bounds(&[(-1.0, 1.0), (-2.5, 2.5), (-2.5, 2.5)]),
                Arc::new(TorusCylinder { r }),
            )?
            .with_expected(exp)
        }
        "rotational_graph" => {
            let c = [rd.finite("c1")?, rd.finite("c2")?, rd.finite("c3")?];
            let epsilon = rd.epsilon()?;
            let space = AmbientSpace::new(epsilon, 3)?;
            let bounds = polar_chart_bounds(3, (0.3, 1.2));
            let t_vanishes = c.iter().all(|x| *x == 0.0);
            ParametricImmersion::new(space, Chart::from_bounds(&bounds), Arc::new(RotationalGraph { c, epsilon }))?
                .with_expected(ExpectedAnalytics {
                    class_a: Some(true),
                    flat_normal: Some(true),
                    t_vanishes: Some(t_vanishes),
                    ..ExpectedAnalytics::default()
                })
        }
        "generic_codim2_surface" => {
            let seed = rd.seed()?;
            ParametricImmersion::new(
                AmbientSpace::sphere(4),
                Chart::from_bounds(&[(0.5, 1.3), (0.6, 1.4), (-0.4, 0.4)]),
                Arc::new(GenericCodim2::new(seed)),
            )?
            .with_expected(ExpectedAnalytics {
                flat_normal: Some(false),
                einstein: Some(false),
                minimal: Some(false),
                t_vanishes: Some(false),
                ..ExpectedAnalytics::default()
            })
        }
        "generic_graph_hypersurface" => {
            let seed = rd.seed()?;
            let mut rng = sampling::rng(seed);
            let height = Quadratic::random(&mut rng, 4, 0.8);
            ParametricImmersion::new(
                AmbientSpace::sphere(3),
                Chart::from_bounds(&[(0.5, 1.3), (0.6, 1.4), (-0.4, 0.4)]),
                Arc::new(GenericGraph { height }),
            )?
            .with_expected(ExpectedAnalytics {
                flat_normal: Some(true),
                class_a: Some(false),
                einstein: Some(false),
                minimal: Some(false),
                t_vanishes: Some(false),
                ..ExpectedAnalytics::default()
            })
        }
        "multirotational" => {
            let (spec, profile) = multirotational_example([rd.finite("height1")?, rd.finite("height2")?])?;
            build_multirotational(&spec, &profile)?
        }
        _ => unreachable!("registry and builder out of sync"),
    };
    Ok(imm.with_label(name))
}

/// Every entry with default parameters, plus the hyperbolic variants.
pub fn standard_entries() -> Vec<(String, Params)> {
    let mut out: Vec<(String, Params)> = registry()
        .into_iter()
        .map(|e| (e.name.to_string(), Params::new()))
        .collect();
    let mut surface = Params::new();
    surface.insert("m".into(), 2.0);
    out.push(("vertical_cylinder".into(), surface));
    for name in ["slice_totally_geodesic", "vertical_cylinder", "rotational_graph"] {
        let mut p = Params::new();
        p.insert("epsilon".into(), -1.0);
        if name == "vertical_cylinder" {
            p.insert("r".into(), 0.8);
        }
        out.push((name.to_string(), p));
    }
    out
}

/// Parses `key=value` pairs.
pub fn parse_params<'a>(pairs: impl IntoIterator<Item = &'a str>) -> Result<Params> {
    let mut out = Params::new();
    for pair in pairs {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| GeomError::ParamRange { name: pair.to_string(), reason: "expected key=value".into() })?;
        let value: f64 = v.trim().parse().map_err(|_| GeomError::ParamRange {
            name: k.to_string(),
            reason: format!("`{v}` is not a number"),
        })?;
        out.insert(k.trim().to_string(), value);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::validate_point;

    #[test]
    fn every_entry_builds_and_lands_on_the_quadric() {
        for (name, params) in standard_entries() {
            let f = make(&name, &params).unwrap();
            for u in sampling::sample_points(f.chart(), 20, 5) {
                let r = validate_point(&f.space, &f.eval(&u));
                assert!(r < 1e-12, "{name}: residual {r}");
            }
        }
    }

    #[test]
    fn unknown_entry_and_bad_params() {
        assert!(matches!(make("torus", &Params::new()), Err(GeomError::UnknownEntry(_))));
        let p = parse_params(["r=1.5"]).unwrap();
        assert!(matches!(make("slice_small_sphere", &p), Err(GeomError::ParamRange { .. })));
        let p = parse_params(["m=2.5"]).unwrap();
        assert!(make("slice_totally_geodesic", &p).is_err());
        let p = parse_params(["bogus=1"]).unwrap();
        assert!(make("slice_totally_geodesic", &p).is_err());
        assert!(parse_params(["m"]).is_err());
    }

    #[test]
    fn sphere_point_is_unit() {
        let v = sphere_point(&[0.4, 1.1, -2.0]);
        assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn clifford_metadata() {
        let p = parse_params(["p=2", "q=2", "r=0.7071067811865476"]).unwrap();
        let e = make("clifford_product", &p).unwrap().expected;
        assert_eq!(e.s, Some(2));
        assert_eq!(e.dims, Some(vec![2, 2]));
        assert!((e.lambda.unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(e.minimal, Some(true));
        assert_eq!(e.einstein, Some(true));
    }
}
