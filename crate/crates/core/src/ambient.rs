//! The product `Q^n_ε × R` as a hypersurface-times-line in the flat space
//! `E^{n+2}`.
//!
//! Coordinates are `(x_0, …, x_n, t)`. For `ε = +1` the first `n + 1`
//! coordinates carry the Euclidean metric and `Q^n_ε` is the unit sphere;
//! for `ε = −1` the metric is `−dx_0² + dx_1² + … + dx_n²` and `Q^n_ε` is the
//! upper sheet of the hyperboloid `⟨x, x⟩ = −1`. The last coordinate `t` is
//! always spacelike.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::jet::{Jet, Scalar};
use crate::tolerance;

/// Largest space-form dimension supported.
pub const MAX_N: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientSpace {
    pub epsilon: i32,
    pub n: usize,
}

impl AmbientSpace {
    pub fn new(epsilon: i32, n: usize) -> Result<Self> {
        if epsilon != 1 && epsilon != -1 {
            return Err(GeomError::Domain(format!("epsilon must be +1 or -1, got {epsilon}")));
        }
        if !(2..=MAX_N).contains(&n) {
            return Err(GeomError::Domain(format!("n must lie in 2..={MAX_N}, got {n}")));
        }
        Ok(AmbientSpace { epsilon, n })
    }

    pub fn sphere(n: usize) -> Self {
        AmbientSpace::new(1, n).expect("valid sphere dimension")
    }

    pub fn hyperbolic(n: usize) -> Self {
        AmbientSpace::new(-1, n).expect("valid hyperbolic dimension")
    }

    pub fn eps(&self) -> f64 {
        self.epsilon as f64
    }

    /// Dimension of the flat container `E^{n+2}`.
    pub fn dim(&self) -> usize {
        self.n + 2
    }

    pub fn height_index(&self) -> usize {
        self.n + 1
    }

    /// Metric signature `(positive, negative)` of the container.
    pub fn signature(&self) -> (usize, usize) {
        if self.epsilon > 0 {
            (self.n + 2, 0)
        } else {
            (self.n + 1, 1)
        }
    }

    fn sign(&self, idx: usize) -> f64 {
        if idx == 0 && self.epsilon < 0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Inner product of the flat container.
    pub fn inner<S: Scalar>(&self, a: &[S], b: &[S]) -> S {
        let mut acc = a[0].clone() * &b[0] * self.sign(0);
        for i in 1..a.len() {
            acc = acc + a[i].clone() * &b[i];
        }
        acc
    }

    pub fn inner_f64(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(i, (x, y))| self.sign(i) * x * y)
            .sum()
    }

    /// Inner product of the space-form factor (first `n + 1` coordinates).
    pub fn space_form_inner<S: Scalar>(&self, a: &[S], b: &[S]) -> S {
        self.inner(&a[..=self.n], &b[..=self.n])
    }

    /// Unit normal `N̄` of `Q^n_ε × R` in `E^{n+2}` at `p`: the position of the
    /// space-form part, with `⟨N̄, N̄⟩ = ε`.
    pub fn inclusion_normal<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let mut v: Vec<S> = p[..=self.n].to_vec();
        v.push(S::zero());
        v
    }

    /// The parallel unit field `∂_t`.
    pub fn vertical(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        v[self.height_index()] = 1.0;
        v
    }

    /// Removes the `N̄` component of a container vector at `p`.
    pub fn project_to_product<S: Scalar>(&self, p: &[S], v: &[S]) -> Vec<S> {
        let nbar = self.inclusion_normal(p);
        let c = self.inner(v, &nbar) / &self.inner(&nbar, &nbar);
        v.iter().zip(&nbar).map(|(x, n)| x.clone() - c.clone() * n).collect()
    }
}

/// A point of `Q^n_ε × R` in container coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmbientPoint {
    pub coords: Vec<f64>,
}

impl AmbientPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        AmbientPoint { coords }
    }

    pub fn height(&self) -> f64 {
        *self.coords.last().expect("non-empty point")
    }

    pub fn space_part(&self) -> &[f64] {
        &self.coords[..self.coords.len() - 1]
    }
}

/// Residual `|⟨p_Q, p_Q⟩ − ε|` of the quadric constraint. For the hyperbolic
/// model a point on the lower sheet is reported as infinitely far off.
pub fn validate_point(space: &AmbientSpace, p: &AmbientPoint) -> f64 {
    if p.coords.len() != space.dim() {
        return f64::INFINITY;
    }
    if space.epsilon < 0 && p.coords[0] <= 0.0 {
        return f64::INFINITY;
    }
    (space.space_form_inner(&p.coords, &p.coords) - space.eps()).abs()
}

/// Checks a point against its quadric and returns a descriptive error.
pub fn check_point(space: &AmbientSpace, p: &AmbientPoint) -> Result<()> {
    let r = validate_point(space, p);
    if r > tolerance::TANGENCY {
        return Err(GeomError::Domain(format!(
            "point {:?} is off Q^{}_{} x R: constraint residual {r:.3e}",
            p.coords,
            space.n,
            if space.epsilon > 0 { "+1" } else { "-1" }
        )));
    }
    Ok(())
}

fn check_tangent(space: &AmbientSpace, p: &AmbientPoint, z: &[f64]) -> Result<()> {
    if z.len() != space.dim() {
        return Err(GeomError::Shape(format!(
            "vector has {} entries, container has {}",
            z.len(),
            space.dim()
        )));
    }
    let nbar = space.inclusion_normal(&p.coords);
    let defect = space.inner_f64(z, &nbar).abs();
    if defect > tolerance::TANGENCY {
        return Err(GeomError::Geometry(format!(
            "vector is not tangent to Q x R: <Z, N> = {defect:.3e}"
        )));
    }
    Ok(())
}

/// Shape operator of `Q^n_ε × R ⊂ E^{n+2}` in the direction `N̄`:
/// `A Z = −Z + ⟨Z, ∂_t⟩ ∂_t`.
pub fn inclusion_shape(space: &AmbientSpace, p: &AmbientPoint, z: &[f64]) -> Result<Vec<f64>> {
    check_tangent(space, p, z)?;
    let h = space.height_index();
    let mut out: Vec<f64> = z.iter().map(|x| -x).collect();
    out[h] += z[h];
    Ok(out)
}

/// Levi-Civita derivative `∇̄_X W` of `Q^n_ε × R` at `p`.
///
/// `field` holds the container components of `W` as jets in the chart
/// variables; `direction` gives `X` in the same variables. The result is the
/// container derivative with its `N̄` component removed.
pub fn product_connection(
    space: &AmbientSpace,
    p: &AmbientPoint,
    field: &[Jet],
    direction: &[f64],
) -> Result<Vec<f64>> {
    if field.len() != space.dim() {
        return Err(GeomError::Shape("field must have n + 2 components".into()));
    }
    let value: Vec<f64> = field.iter().map(Jet::value).collect();
    check_tangent(space, p, &value)?;
    let derivative: Vec<f64> = field
        .iter()
        .map(|c| {
            if c.is_constant() {
                0.0
            } else {
                direction
                    .iter()
                    .enumerate()
                    .map(|(i, x)| x * c.derivative(&[i]))
                    .sum()
            }
        })
        .collect();
    let out = space.project_to_product(&p.coords, &derivative);
    let nbar = space.inclusion_normal(&p.coords);
    debug_assert!(space.inner_f64(&out, &nbar).abs() <= tolerance::TANGENCY);
    Ok(out)
}
