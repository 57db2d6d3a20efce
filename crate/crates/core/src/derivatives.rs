//! Vector-valued maps on rectangular charts and their derivative tensors,
//! computed either exactly by jet propagation or by finite differences.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::jet::{Jet, Scalar};

/// A map from parameters to coordinates, written once over any [`Scalar`].
pub trait GenericMap: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S>;
}

/// Type-erased form of [`GenericMap`], usable behind `dyn`.
pub trait ChartMap: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn eval_real(&self, u: &[f64]) -> Vec<f64>;
    fn eval_jet(&self, u: &[Jet]) -> Vec<Jet>;
}

impl<T: GenericMap> ChartMap for T {
    fn dim_in(&self) -> usize {
        GenericMap::dim_in(self)
    }
    fn dim_out(&self) -> usize {
        GenericMap::dim_out(self)
    }
    fn eval_real(&self, u: &[f64]) -> Vec<f64> {
        self.eval(u)
    }
    fn eval_jet(&self, u: &[Jet]) -> Vec<Jet> {
        self.eval(u)
    }
}

/// Closed box `[lower_i, upper_i]` in parameter space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Chart {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(GeomError::Shape("chart bounds differ in length".into()));
        }
        if lower.iter().zip(&upper).any(|(a, b)| !(a < b)) {
            return Err(GeomError::Domain("chart bounds must satisfy lower < upper".into()));
        }
        Ok(Chart { lower, upper })
    }

    /// Builds a chart from `(lower, upper)` pairs. Panics on empty intervals.
    pub fn from_bounds(bounds: &[(f64, f64)]) -> Self {
        let (lower, upper) = bounds.iter().copied().unzip();
        Chart::new(lower, upper).expect("valid chart bounds")
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.dim()
            && u
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (a, b))| *a <= *x && *x <= *b)
    }

    /// Distance from `u` to the chart boundary in the max norm; negative outside.
    pub fn boundary_distance(&self, u: &[f64]) -> f64 {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(x, (a, b))| (x - a).min(b - x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Maps a point of the unit cube into the chart, keeping a relative margin
    /// away from each face.
    pub fn from_unit(&self, t: &[f64], margin: f64) -> Vec<f64> {
        t.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(s, (a, b))| {
                let w = b - a;
                a + margin * w + s * (1.0 - 2.0 * margin) * w
            })
            .collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.from_unit(&vec![0.5; self.dim()], 0.0)
    }

    pub fn check_interior(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim() {
            return Err(GeomError::Shape(format!(
                "parameter has {} entries, chart has dimension {}",
                u.len(),
                self.dim()
            )));
        }
        if !self.contains(u) {
            return Err(GeomError::Domain(format!("parameter {u:?} outside chart")));
        }
        Ok(())
    }
}

/// A map together with the chart it is defined on.
#[derive(Clone)]
pub struct ParametricMap {
    pub chart: Chart,
    pub map: Arc<dyn ChartMap>,
}

impl fmt::Debug for ParametricMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricMap")
            .field("chart", &self.chart)
            .field("dim_out", &self.map.dim_out())
            .finish()
    }
}

impl ParametricMap {
    pub fn new(chart: Chart, map: Arc<dyn ChartMap>) -> Result<Self> {
        if chart.dim() != map.dim_in() {
            return Err(GeomError::Shape(format!(
                "chart dimension {} does not match map input dimension {}",
                chart.dim(),
                map.dim_in()
            )));
        }
        Ok(ParametricMap { chart, map })
    }

    pub fn dim_in(&self) -> usize {
        self.chart.dim()
    }

    pub fn dim_out(&self) -> usize {
        self.map.dim_out()
    }

    pub fn eval(&self, u: &[f64]) -> Vec<f64> {
        self.map.eval_real(u)
    }

    /// Components as jets of the given order centred at `u`.
    pub fn jets(&self, u: &[f64], order: usize) -> Result<Vec<Jet>> {
        self.chart.check_interior(u)?;
        let seeds = Jet::seed(u, order);
        Ok(self.map.eval_jet(&seeds))
    }
}

/// Value, Jacobian, Hessian and third derivatives of a vector-valued map.
///
/// Indexing is parameter-first: `jacobian[i][c] = ∂_i f^c`,
/// `hessian[i][j][c]`, `third[i][j][k][c]`. Blocks above `order` are empty.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeTensor {
    pub order: usize,
    pub value: Vec<f64>,
    pub jacobian: Vec<Vec<f64>>,
    pub hessian: Vec<Vec<Vec<f64>>>,
    pub third: Vec<Vec<Vec<Vec<f64>>>>,
}

impl DerivativeTensor {
    pub fn target_dim(&self) -> usize {
        self.value.len()
    }

    pub fn num_params(&self) -> usize {
        self.jacobian.len()
    }

    /// Largest absolute entry difference within the block of the given derivative order.
    pub fn block_difference(&self, other: &DerivativeTensor, order: usize) -> f64 {
        let diff = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        };
        match order {
            0 => diff(&self.value, &other.value),
            1 => self
                .jacobian
                .iter()
                .zip(&other.jacobian)
                .map(|(a, b)| diff(a, b))
                .fold(0.0, f64::max),
            2 => self
                .hessian
                .iter()
                .flatten()
                .zip(other.hessian.iter().flatten())
                .map(|(a, b)| diff(a, b))
                .fold(0.0, f64::max),
            3 => self
                .third
                .iter()
                .flatten()
                .flatten()
                .zip(other.third.iter().flatten().flatten())
                .map(|(a, b)| diff(a, b))
                .fold(0.0, f64::max),
            _ => panic!("derivative order {order} not stored"),
        }
    }
}

fn check_order(order: usize) -> Result<()> {
    if (1..=3).contains(&order) {
        Ok(())
    } else {
        Err(GeomError::Domain(format!("derivative order must be 1, 2 or 3, got {order}")))
    }
}

/// Exact derivatives of every component by jet propagation.
pub fn evaluate_map_derivatives(
    f: &ParametricMap,
    u: &[f64],
    order: usize,
) -> Result<DerivativeTensor> {
    check_order(order)?;
    let comps = f.jets(u, order)?;
    if comps.iter().any(|c| !c.coeffs().iter().all(|x| x.is_finite())) {
        return Err(GeomError::Domain(format!("map is not finite at {u:?}")));
    }
    let m = u.len();
    let value = comps.iter().map(|c| c.value()).collect();
    let jacobian = (0..m)
        .map(|i| comps.iter().map(|c| c.derivative(&[i])).collect())
        .collect();
    let hessian = if order >= 2 {
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| comps.iter().map(|c| c.derivative(&[i, j])).collect())
                    .collect()
            })
            .collect()
    } else {
        Vec::new()
    };
    let third = if order >= 3 {
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        (0..m)
                            .map(|k| comps.iter().map(|c| c.derivative(&[i, j, k])).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(DerivativeTensor {
        order,
        value,
        jacobian,
        hessian,
        third,
    })
}

/// Default finite-difference step, relative to unit parameter scale.
pub const DEFAULT_FD_STEP: f64 = 1e-3;

/// Central differences with one level of Richardson extrapolation.
///
/// Truncation error is O(step⁴) for first and second derivatives. Third
/// derivatives come from differencing the second-derivative stencil and are
/// accurate to O(step²) once roundoff is taken into account.
pub fn finite_difference_oracle(
    f: &ParametricMap,
    u: &[f64],
    order: usize,
    step: f64,
) -> Result<DerivativeTensor> {
    check_order(order)?;
    if !(step > 0.0) {
        return Err(GeomError::Domain("finite-difference step must be positive".into()));
    }
    f.chart.check_interior(u)?;
    let reach = if order == 3 { 2.0 * step } else { step };
    if f.chart.boundary_distance(u) < reach {
        return Err(GeomError::Domain(format!(
            "finite-difference stencil of reach {reach:e} leaves the chart at {u:?}"
        )));
    }

    let m = u.len();
    let eval_at = |shift: &[(usize, f64)]| {
        let mut x = u.to_vec();
        for &(i, d) in shift {
            x[i] += d;
        }
        f.eval(&x)
    };
    let combine = |coarse: Vec<f64>, fine: Vec<f64>| -> Vec<f64> {
        coarse
            .iter()
            .zip(&fine)
            .map(|(c, f)| (4.0 * f - c) / 3.0)
            .collect()
    };
    let lin = |terms: &[(f64, Vec<f64>)]| -> Vec<f64> {
        let mut out = vec![0.0; terms[0].1.len()];
        for (w, v) in terms {
            for (o, x) in out.iter_mut().zip(v) {
                *o += w * x;
            }
        }
        out
    };

    let first = |i: usize, h: f64, base: &[(usize, f64)]| -> Vec<f64> {
        let mut plus = base.to_vec();
        plus.push((i, h));
        let mut minus = base.to_vec();
        minus.push((i, -h));
        lin(&[(0.5 / h, eval_at(&plus)), (-0.5 / h, eval_at(&minus))])
    };
    let second = |i: usize, j: usize, h: f64, base: &[(usize, f64)]| -> Vec<f64> {
        let with = |extra: &[(usize, f64)]| {
            let mut s = base.to_vec();
            s.extend_from_slice(extra);
            eval_at(&s)
        };
        if i == j {
            lin(&[
                (1.0 / (h * h), with(&[(i, h)])),
                (-2.0 / (h * h), with(&[])),
                (1.0 / (h * h), with(&[(i, -h)])),
            ])
        } else {
            let w = 0.25 / (h * h);
            lin(&[
                (w, with(&[(i, h), (j, h)])),
                (-w, with(&[(i, h), (j, -h)])),
                (-w, with(&[(i, -h), (j, h)])),
                (w, with(&[(i, -h), (j, -h)])),
            ])
        }
    };
    let third_raw = |i: usize, j: usize, k: usize, h: f64| -> Vec<f64> {
        lin(&[
            (0.5 / h, second(j, k, h, &[(i, h)])),
            (-0.5 / h, second(j, k, h, &[(i, -h)])),
        ])
    };

    let value = f.eval(u);
    let jacobian = (0..m)
        .map(|i| combine(first(i, step, &[]), first(i, step / 2.0, &[])))
        .collect();
    let hessian = if order >= 2 {
        let mut h = vec![vec![Vec::new(); m]; m];
        for i in 0..m {
            for j in i..m {
                let v = combine(second(i, j, step, &[]), second(i, j, step / 2.0, &[]));
                h[j][i] = v.clone();
                h[i][j] = v;
            }
        }
        h
    } else {
        Vec::new()
    };
    let third = if order >= 3 {
        let mut t = vec![vec![vec![Vec::new(); m]; m]; m];
        for i in 0..m {
            for j in i..m {
                for k in j..m {
                    let v = combine(third_raw(i, j, k, step), third_raw(i, j, k, step / 2.0));
                    for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                        t[a][b][c] = v.clone();
                    }
                }
            }
        }
        t
    } else {
        Vec::new()
    };
    Ok(DerivativeTensor {
        order,
        value,
        jacobian,
        hessian,
        third,
    })
}
