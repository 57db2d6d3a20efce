use qxr_wasm_demo::{analyze_json, catalog_json, multirotational_json, verify_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn catalog_lists_entries_with_parameters() {
    let v = parse(&catalog_json().unwrap());
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"clifford_product") && names.contains(&"multirotational"));
    assert!(v[0]["params"].is_array());
}

#[test]
fn clifford_analysis() {
    let v = parse(&analyze_json("clifford_product", "{\"r\": 0.7071067811865476}", 8, 1).unwrap());
    assert_eq!(v["flat"], true);
    assert!((v["einstein"]["lambda_hat"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(v["decomposition"]["dims"], serde_json::json!([2, 2]));
}

#[test]
fn codim2_analysis_has_no_decomposition() {
    let v = parse(&analyze_json("generic_codim2_surface", "", 4, 1).unwrap());
    assert_eq!(v["flat"], false);
    assert!(v["decomposition"].is_null());
}

#[test]
fn verify_rows_pass() {
    let v = parse(&verify_json("rotational_graph", "{}", 6, 3).unwrap());
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn bad_input_is_reported() {
    assert!(analyze_json("nope", "", 4, 1).is_err());
    assert!(analyze_json("clifford_product", "{\"r\": \"x\"}", 4, 1).is_err());
    assert!(verify_json("clifford_product", "", 0, 1).is_err());
}

#[test]
fn multirotational_cloud() {
    let v = parse(&multirotational_json(0.4, 0.1, 20, 2).unwrap());
    assert_eq!(v["points"].as_array().unwrap().len(), 20);
    assert!(v["class_a_defect"].as_f64().unwrap() < 1e-6);
    for t in v["t_norms"].as_array().unwrap() {
        let t = t.as_f64().unwrap();
        assert!(t > 0.0 && t < 1.0);
    }
}

#[test]
fn multirotational_slider_extremes() {
    for h in [[-0.6, -0.6], [0.6, 0.6], [0.6, -0.6], [0.0, 0.0]] {
        let v = parse(&multirotational_json(h[0], h[1], 400, 7).unwrap());
        assert!(v["class_a_defect"].as_f64().unwrap() < 1e-6, "{h:?}");
    }
}
