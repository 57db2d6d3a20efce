//! Seeded low-discrepancy sampling of chart interiors.
//!
//! Points follow the additive recurrence built on the generalised golden
//! ratio (the `R_d` sequence), shifted by a seeded Cranley–Patterson offset.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::derivatives::Chart;

/// Fraction of each chart side kept free at both ends.
pub const BOUNDARY_MARGIN: f64 = 0.05;

/// Unique positive root of `x^{d+1} = x + 1`.
fn generalized_golden(d: usize) -> f64 {
    let mut x: f64 = 2.0;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (d as f64 + 1.0));
    }
    x
}

/// `count` points of the unit cube `[0, 1)^d`.
pub fn unit_sequence(d: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let phi = generalized_golden(d);
    let alpha: Vec<f64> = (0..d).map(|j| phi.powi(-(j as i32 + 1))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    (0..count)
        .map(|i| {
            (0..d)
                .map(|j| (shift[j] + (i as f64 + 1.0) * alpha[j]).fract())
                .collect()
        })
        .collect()
}

/// `count` interior points of `chart` with the standard margin.
pub fn sample_points(chart: &Chart, count: usize, seed: u64) -> Vec<Vec<f64>> {
    unit_sequence(chart.dim(), count, seed)
        .iter()
        .map(|t| chart.from_unit(t, BOUNDARY_MARGIN))
        .collect()
}

/// Seeded generator for auxiliary random draws (directions, coefficients).
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniformly distributed unit vector in `R^d`.
pub fn random_unit(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}
