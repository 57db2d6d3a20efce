mod common;

use common::{cov_alpha, FdGeom};
use qxr_core::catalog::{self, Params};
use qxr_core::equations::*;
use qxr_core::jet_geometry::JetGeometry;
use qxr_core::{linalg, sampling, tolerance, ParametricImmersion};

fn entry(name: &str, params: &[(&str, f64)]) -> ParametricImmersion {
    let p: Params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    catalog::make(name, &p).unwrap()
}

fn random_triples(m: usize, count: usize, seed: u64) -> Vec<[Vec<f64>; 3]> {
    let mut rng = sampling::rng(seed);
    (0..count)
        .map(|_| {
            [
                sampling::random_unit(&mut rng, m),
                sampling::random_unit(&mut rng, m),
                sampling::random_unit(&mut rng, m),
            ]
        })
        .collect()
}

#[test]
fn slice_gauss_codazzi_vertical_vanish() {
    let f = entry("slice_totally_geodesic", &[("m", 3.0)]);
    for u in sampling::sample_points(f.chart(), 5, 11) {
        for [x, y, z] in random_triples(3, 10, 2) {
            assert!(linalg::max_abs(&gauss_residual(&f, &u, &x, &y, &z).unwrap()) < 1e-10);
            assert!(linalg::max_abs(&codazzi_residual(&f, &u, &x, &y, &z).unwrap()) < 1e-9);
        }
        let (a, b) = vertical_field_residuals(&f, &u).unwrap();
        assert!(a.max_abs < 1e-10 && b.max_abs < 1e-10);
        assert!(a.pass && b.pass);
    }
}

#[test]
fn slice_curvature_is_the_constant_curvature_term() {
    // α = 0 and T = 0: R(X,Y)Z = ε(⟨Y,Z⟩X − ⟨X,Z⟩Y) for both signs of ε
    for eps in [1.0, -1.0] {
        let f = entry("slice_totally_geodesic", &[("m", 3.0), ("epsilon", eps)]);
        let u = f.chart().center();
        let jg = JetGeometry::new(&f, &u).unwrap();
        for [x, y, z] in random_triples(3, 10, 5) {
            let r = jg.riemann(&x, &y, &z);
            let expect: Vec<f64> = (0..3)
                .map(|k| eps * (linalg::dot(&y, &z) * x[k] - linalg::dot(&x, &z) * y[k]))
                .collect();
            assert!(common::max_abs_diff(&r, &expect) < 1e-10);
        }
    }
}

#[test]
fn antisymmetric_slots_give_exact_zeros() {
    let f = entry("vertical_cylinder", &[]);
    let g = entry("generic_codim2_surface", &[]);
    for imm in [&f, &g] {
        let u = imm.chart().center();
        let jg = JetGeometry::new(imm, &u).unwrap();
        let m = jg.m();
        let q = jg.codim();
        let mut rng = sampling::rng(9);
        for _ in 0..10 {
            let x = sampling::random_unit(&mut rng, m);
            let z = sampling::random_unit(&mut rng, m);
            let y = sampling::random_unit(&mut rng, m);
            let xi = sampling::random_unit(&mut rng, q);
            assert_eq!(linalg::max_abs(&gauss_residual_at(&jg, &x, &x, &z)), 0.0);
            assert_eq!(linalg::max_abs(&codazzi_residual_at(&jg, &x, &x, &z)), 0.0);
            assert_eq!(ricci_equation_residual_at(&jg, &x, &y, &xi, &xi), 0.0);
            // swapping the slots flips the sign exactly
            let a = gauss_residual_at(&jg, &x, &y, &z);
            let b = gauss_residual_at(&jg, &y, &x, &z);
            assert!(a.iter().zip(&b).all(|(p, q)| (p + q).abs() <= 1e-15 * (1.0 + p.abs())));
        }
    }
}

#[test]
fn rotational_graph_random_triples() {
    let f = entry("rotational_graph", &[]);
    let pts = sampling::sample_points(f.chart(), 5, 1);
    let mut gauss: f64 = 0.0;
    let mut codazzi: f64 = 0.0;
    for (i, u) in pts.iter().enumerate() {
        let jg = JetGeometry::new(&f, u).unwrap();
        for [x, y, z] in random_triples(3, 10, i as u64) {
            gauss = gauss.max(linalg::max_abs(&gauss_residual_at(&jg, &x, &y, &z)));
            codazzi = codazzi.max(linalg::max_abs(&codazzi_residual_at(&jg, &x, &y, &z)));
        }
    }
    assert!(gauss < 1e-6, "{gauss}");
    assert!(codazzi < 1e-5, "{codazzi}");
}

#[test]
fn hypersurfaces_have_trivial_ricci_equation() {
    for name in ["vertical_cylinder", "rotational_graph", "generic_graph_hypersurface"] {
        let f = entry(name, &[]);
        let u = f.chart().center();
        let jg = JetGeometry::new(&f, &u).unwrap();
        assert_eq!(jg.codim(), 1);
        for [x, y, _] in random_triples(jg.m(), 5, 3) {
            let (l, r) = ricci_equation_sides(&jg, &x, &y, &[1.0], &[1.0]);
            assert!(l.abs() < 1e-9 && r.abs() < 1e-9);
        }
    }
}

#[test]
fn codim2_control_sides_agree_and_are_large() {
    let f = entry("generic_codim2_surface", &[]);
    let u = f.chart().center();
    let jg = JetGeometry::new(&f, &u).unwrap();
    let mut worst: f64 = 0.0;
    let mut biggest: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let (l, r) = ricci_equation_sides(&jg, &unit(3, a), &unit(3, b), &[1.0, 0.0], &[0.0, 1.0]);
            worst = worst.max((l - r).abs());
            biggest = biggest.max(l.abs().min(r.abs()));
        }
    }
    assert!(worst < 1e-7);
    assert!(biggest > 1e-3);

    // frame-free oracle: Σ_{a,b} ‖R⊥(X_a, X_b)‖²_F from difference quotients
    let oracle = FdGeom::new(&f, &u).normal_curvature_norm2();
    let mut total = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            total += jg.normal_curvature_frame(a, b).iter().flatten().map(|x| x * x).sum::<f64>();
        }
    }
    assert!((total - oracle).abs() < 1e-6 * oracle.max(1.0), "{total} vs {oracle}");
}

fn unit(m: usize, a: usize) -> Vec<f64> {
    let mut v = vec![0.0; m];
    v[a] = 1.0;
    v
}

#[test]
fn vertical_identities_on_cylinder_and_graph() {
    let f = entry("vertical_cylinder", &[]);
    for u in sampling::sample_points(f.chart(), 4, 2) {
        let (a, b) = vertical_field_residuals(&f, &u).unwrap();
        assert!(a.max_abs < 1e-9 && b.max_abs < 1e-9);
    }
    let g = entry("rotational_graph", &[]);
    for u in sampling::sample_points(g.chart(), 10, 2) {
        let (a, b) = vertical_field_residuals(&g, &u).unwrap();
        assert!(a.max_abs < 1e-6 && b.max_abs < 1e-6);
    }
}

/// The jet covariant derivative of α against differencing α over
/// neighbouring points, in chart directions.
#[test]
fn covariant_derivative_matches_difference_oracle() {
    for name in ["rotational_graph", "generic_codim2_surface", "multirotational"] {
        let f = entry(name, &[]);
        let u = sampling::sample_points(f.chart(), 1, 4).remove(0);
        let jg = JetGeometry::new(&f, &u).unwrap();
        let pg = jg.values();
        let oracle_geo = FdGeom::new(&f, &u);
        let m = f.m();
        let chart_vec = |i: usize| pg.tangent_coords(&oracle_geo.d[i]);
        for i in 0..m {
            for j in 0..m {
                for k in j..m {
                    let ours = pg.normal_to_ambient(&jg.cov_alpha(&chart_vec(i), &chart_vec(j), &chart_vec(k)));
                    let theirs = cov_alpha(&f, &u, i, j, k);
                    let err = common::max_abs_diff(&ours, &theirs);
                    assert!(err < 1e-6, "{name} ({i},{j},{k}): {err:e}");
                }
            }
        }
    }
}

#[test]
fn intrinsic_ricci_matches_metric_oracle() {
    for (name, params) in catalog::standard_entries() {
        let f = catalog::make(&name, &params).unwrap();
        let u = sampling::sample_points(f.chart(), 1, 8).remove(0);
        let ours = linalg::symmetric_eigen(&JetGeometry::new(&f, &u).unwrap().intrinsic_ricci()).0;
        let theirs = common::ricci_eigenvalues(&f, &u);
        let err = common::max_abs_diff(&ours, &theirs);
        assert!(err < 1e-5, "{name}: {ours:?} vs {theirs:?}");
    }
}

#[test]
fn suite_over_catalog() {
    for (name, params) in catalog::standard_entries() {
        let f = catalog::make(&name, &params).unwrap();
        let pts = sampling::sample_points(f.chart(), 8, 21);
        for r in equation_suite(&f, &pts, 5).unwrap() {
            assert!(r.pass, "{name}: {r:?}");
            assert_eq!(r.samples, 8);
        }
    }
}

#[test]
fn residual_record_pass_flag_follows_tolerance() {
    let r = EquationResidual::new("gauss", 2e-6, 3, tolerance::GAUSS);
    assert!(!r.pass);
    let s = EquationResidual::new("gauss", 1e-9, 2, tolerance::GAUSS);
    assert!(s.pass);
    let merged = s.merge(&r);
    assert_eq!(merged.samples, 5);
    assert!(!merged.pass);
}

#[test]
fn codazzi_flat_cases() {
    use qxr_core::flat_normal::principal_decomposition;
    let sphere = entry("slice_small_sphere", &[("m", 4.0), ("r", 0.5f64.sqrt())]);
    let u = sphere.chart().center();
    let d = principal_decomposition(&sphere, &u, tolerance::CLUSTER).unwrap();
    assert!(codazzi_flat_residual(&sphere, &u, &d).unwrap().is_empty());

    for name in ["vertical_cylinder", "clifford_product", "multirotational", "rotational_graph"] {
        let f = entry(name, &[]);
        for u in sampling::sample_points(f.chart(), 5, 6) {
            let d = principal_decomposition(&f, &u, tolerance::CLUSTER).unwrap();
            let r = codazzi_flat_residuals(&f, &u, &d).unwrap();
            assert_eq!(r.pairs.len(), d.s * (d.s - 1));
            assert!(r.all().iter().all(|x| *x < 1e-6), "{name}: {r:?}");
        }
    }
}

#[test]
fn codazzi_flat_rejects_foreign_decomposition() {
    use qxr_core::flat_normal::principal_decomposition;
    let f = entry("clifford_product", &[]);
    let g = entry("clifford_product", &[("r", 0.6)]);
    let u = f.chart().center();
    let d = principal_decomposition(&g, &u, tolerance::CLUSTER).unwrap();
    assert!(codazzi_flat_residual(&f, &u, &d).is_err());
}
