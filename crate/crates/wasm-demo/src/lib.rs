//! Browser bindings: analyse or verify a catalog entry, or sample a
//! multi-rotational submanifold. Every export returns a JSON string.

use qxr_core::catalog::{self, Params};
use qxr_core::equations::{equation_suite, ricci_tensor_residual, EquationResidual};
use qxr_core::flat_normal::{
    class_a_defect, decompose, einstein_fit, flatness_at, independence_angle, EinsteinFit,
};
use qxr_core::warped::build_multirotational;
use qxr_core::{linalg, point_geometry, sampling, tolerance, ParametricImmersion};
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Out = Result<String, String>;

fn build(name: &str, params_json: &str) -> Result<ParametricImmersion, String> {
    let params: Params = if params_json.trim().is_empty() {
        Params::new()
    } else {
        serde_json::from_str(params_json).map_err(|e| format!("parameters must be a JSON object of numbers: {e}"))?
    };
    catalog::make(name, &params).map_err(|e| e.to_string())
}

fn points(f: &ParametricImmersion, samples: u32, seed: u32) -> Result<Vec<Vec<f64>>, String> {
    if samples == 0 || samples > 500 {
        return Err("samples must lie in 1..=500".into());
    }
    Ok(sampling::sample_points(f.chart(), samples as usize, seed as u64))
}

fn json<T: Serialize>(v: &T) -> Out {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Decomposition {
    s: usize,
    dims: Vec<usize>,
    xi_norms: Vec<f64>,
    t_index: Option<usize>,
    gap: Option<f64>,
    independence_angle: Option<f64>,
}

#[derive(Serialize)]
struct Analysis {
    label: String,
    m: usize,
    codim: usize,
    flat: bool,
    max_commutator: f64,
    class_a_defect: f64,
    t_norm_range: [f64; 2],
    einstein: EinsteinFit,
    /// At the first sample, when the normal bundle is flat.
    decomposition: Option<Decomposition>,
}

pub fn catalog_json() -> Out {
    json(&catalog::registry())
}

pub fn analyze_json(name: &str, params_json: &str, samples: u32, seed: u32) -> Out {
    let f = build(name, params_json)?;
    let pts = points(&f, samples, seed)?;
    let mut flat = true;
    let mut comm = 0.0f64;
    let mut defect = 0.0f64;
    let mut t_range = [f64::INFINITY, 0.0f64];
    let mut decomposition = None;
    for (i, u) in pts.iter().enumerate() {
        let pg = point_geometry(&f, u).map_err(|e| e.to_string())?;
        let fl = flatness_at(&pg, tolerance::FLATNESS);
        flat &= fl.is_flat;
        comm = comm.max(fl.max_commutator);
        let t = pg.t_norm();
        t_range = [t_range[0].min(t), t_range[1].max(t)];
        if t > tolerance::T_ZERO {
            defect = defect.max(class_a_defect(&pg));
        }
        if i == 0 && fl.is_flat {
            decomposition = decompose(&pg, tolerance::CLUSTER, seed as u64).ok().map(|d| Decomposition {
                s: d.s,
                xi_norms: d.xi.iter().map(|x| linalg::norm(x)).collect(),
                independence_angle: independence_angle(&d.xi),
                dims: d.dims,
                t_index: d.t_index,
                gap: d.gap.is_finite().then_some(d.gap),
            });
        }
    }
    let einstein = einstein_fit(&f, &pts, tolerance::EINSTEIN).map_err(|e| e.to_string())?;
    json(&Analysis {
        label: f.label.clone(),
        m: f.m(),
        codim: f.codim(),
        flat,
        max_commutator: comm,
        class_a_defect: defect,
        t_norm_range: t_range,
        einstein,
        decomposition: if flat { decomposition } else { None },
    })
}

pub fn verify_json(name: &str, params_json: &str, samples: u32, seed: u32) -> Out {
    let f = build(name, params_json)?;
    let pts = points(&f, samples, seed)?;
    let mut rows: Vec<EquationResidual> = equation_suite(&f, &pts, seed as u64).map_err(|e| e.to_string())?;
    rows.push(ricci_tensor_residual(&f, &pts).map_err(|e| e.to_string())?);
    json(&rows)
}

#[derive(Serialize)]
struct Cloud {
    /// `(x_1, x_2, t)` of each sample.
    points: Vec<[f64; 3]>,
    t_norms: Vec<f64>,
    class_a_defect: f64,
}

/// Samples the catalog's multi-rotational example with the given height profile.
pub fn multirotational_json(height1: f64, height2: f64, samples: u32, seed: u32) -> Out {
    let (spec, profile) = catalog::multirotational_example([height1, height2]).map_err(|e| e.to_string())?;
    let f = build_multirotational(&spec, &profile).map_err(|e| e.to_string())?;
    let pts = points(&f, samples, seed)?;
    let mut cloud = Cloud { points: Vec::new(), t_norms: Vec::new(), class_a_defect: 0.0 };
    for u in &pts {
        let p = f.eval(u).coords;
        cloud.points.push([p[1], p[2], p[p.len() - 1]]);
        let pg = point_geometry(&f, u).map_err(|e| e.to_string())?;
        let t = pg.t_norm();
        cloud.t_norms.push(t);
        if t > tolerance::T_ZERO {
            cloud.class_a_defect = cloud.class_a_defect.max(class_a_defect(&pg));
        }
    }
    json(&cloud)
}

#[wasm_bindgen]
pub fn catalog() -> Result<String, JsValue> {
    catalog_json().map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn analyze(name: &str, params_json: &str, samples: u32, seed: u32) -> Result<String, JsValue> {
    analyze_json(name, params_json, samples, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn verify(name: &str, params_json: &str, samples: u32, seed: u32) -> Result<String, JsValue> {
    verify_json(name, params_json, samples, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn multirotational(height1: f64, height2: f64, samples: u32, seed: u32) -> Result<String, JsValue> {
    multirotational_json(height1, height2, samples, seed).map_err(|e| JsValue::from_str(&e))
}
