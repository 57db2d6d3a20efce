//! Command implementations behind the `qxr` binary.

pub mod config;
pub mod report;
pub mod spec;

use qxr_core::ambient::validate_point;
use qxr_core::equations::{codazzi_flat_at, equation_suite, ricci_tensor_residual};
use qxr_core::flat_normal::*;
use qxr_core::immersion::{point_geometry, PointGeometry};
use qxr_core::jet_geometry::JetGeometry;
use qxr_core::warped::{pullback_vs_warped_metric, WarpedSample};
use qxr_core::{sampling, tolerance, ParametricImmersion};
use thiserror::Error;

pub use config::{Format, RunConfig, Tolerances};
pub use report::{CheckRecord, Report, Status};
pub use spec::{Source, SpecFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("spec error: {0}")]
    Spec(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        1
    }
}

struct Prepared {
    f: ParametricImmersion,
    points: Vec<Vec<f64>>,
    report: Report,
}

fn prepare(command: &'static str, cfg: &RunConfig) -> Result<Prepared, CliError> {
    let f = cfg.source.build()?;
    let points = sampling::sample_points(f.chart(), cfg.samples, cfg.seed);
    let info = report::ImmersionInfo {
        label: f.label.clone(),
        epsilon: f.space.epsilon,
        n: f.space.n,
        m: f.m(),
        codim: f.codim(),
    };
    Ok(Prepared { report: Report::new(command, cfg.clone(), info), f, points })
}

fn geometries(f: &ParametricImmersion, points: &[Vec<f64>]) -> Result<Vec<PointGeometry>, CliError> {
    points
        .iter()
        .map(|u| point_geometry(f, u).map_err(|e| CliError::Spec(format!("at sample {u:?}: {e}"))))
        .collect()
}

/// Fundamental equations, the Ricci tensor formula and, for flat normal
/// bundles, the split Codazzi equations.
pub fn verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let Prepared { f, points, mut report } = prepare("verify", cfg)?;
    let tol = &cfg.tolerances;
    for r in equation_suite(&f, &points, cfg.seed)? {
        report.push(CheckRecord::from_equation(&r, tol.get(&r.name)));
    }
    let rt = ricci_tensor_residual(&f, &points)?;
    report.push(CheckRecord::from_equation(&rt, tol.get("ricci_tensor")));

    let pgs = geometries(&f, &points)?;
    if pgs.iter().all(|pg| flatness_at(pg, tol.get("flatness")).is_flat) {
        let mut worst = 0.0f64;
        let mut error = None;
        for u in &points {
            match codazzi_flat_point(&f, u, tol.get("cluster"), cfg.seed) {
                Ok(r) => worst = worst.max(r),
                Err(e) => {
                    error = Some(format!("at sample {u:?}: {e}"));
                    break;
                }
            }
        }
        report.push(match error {
            None => CheckRecord::gated("codazzi_flat", worst, tol.get("codazzi_flat"), points.len()),
            Some(e) => CheckRecord::failed("codazzi_flat", points.len(), e),
        });
    } else {
        report.push(CheckRecord::skipped("codazzi_flat", "normal bundle not flat"));
    }
    Ok(report)
}

fn codazzi_flat_point(f: &ParametricImmersion, u: &[f64], cluster: f64, seed: u64) -> qxr_core::error::Result<f64> {
    let jg = JetGeometry::new(f, u)?;
    let d = decompose(jg.values(), cluster, seed)?;
    let sd = SmoothDecomposition::new(&jg, &d, seed)?;
    Ok(codazzi_flat_at(&sd).all().into_iter().fold(0.0, f64::max))
}

/// Flat-normal analysis: flatness, principal normals, class A, Einstein fit,
/// norm identity, parallelism and the distribution checks.
pub fn analyze(cfg: &RunConfig) -> Result<Report, CliError> {
    let Prepared { f, points, mut report } = prepare("analyze", cfg)?;
    let tol = &cfg.tolerances;
    let n = points.len();
    let pgs = geometries(&f, &points)?;

    let mut rel_comm = 0.0f64;
    let mut flat = true;
    for pg in &pgs {
        let r = flatness_at(pg, tol.get("flatness"));
        flat &= r.is_flat;
        let s2 = r.max_shape_norm * r.max_shape_norm;
        rel_comm = rel_comm.max(if s2 > 0.0 { r.max_commutator / s2 } else { 0.0 });
    }
    report.push(
        CheckRecord::gated("flatness", rel_comm, tol.get("flatness"), n)
            .with_note("max commutator norm relative to the squared shape-operator norm"),
    );

    // class A needs no decomposition
    let mut defect = 0.0f64;
    let mut t_zero = 0;
    for pg in &pgs {
        if pg.t_norm() < tolerance::T_ZERO {
            t_zero += 1;
        } else {
            defect = defect.max(class_a_defect(pg));
        }
    }
    let class_a = if t_zero == n {
        report.push(CheckRecord::skipped("class_a", "T≈0"));
        true
    } else {
        let rec = CheckRecord::gated("class_a", defect, tol.get("class_a"), n - t_zero);
        let ok = rec.pass == Some(true);
        report.push(if t_zero > 0 {
            rec.with_note(format!("{t_zero} samples with T≈0 hold vacuously"))
        } else {
            rec
        });
        ok
    };
    report.summaries.class_a = Some(report::ClassASummary {
        is_class_a: class_a,
        max_defect: defect,
        t_vanishing_samples: t_zero,
    });

    let fit = einstein_fit(&f, &points, tol.get("einstein"))?;
    report.push(CheckRecord::reported(
        "einstein",
        fit.max_dev,
        tol.get("einstein"),
        n,
        "classification, not a gate",
    ));
    report.summaries.einstein_fit = Some(fit.clone());

    if pgs.iter().all(|pg| pg.h_norm() < tolerance::MINIMAL) {
        report.summaries.minimal_ricci = Some(minimal_ricci_bound(&f, &points)?);
    }

    if !flat {
        for name in ["decomposition", "xi_identity", "parallelism", "distributions"] {
            report.push(CheckRecord::skipped(name, "normal bundle not flat"));
        }
        return Ok(report);
    }

    let mut decomps = Vec::with_capacity(n);
    let mut umb = 0.0f64;
    for pg in &pgs {
        match decompose(pg, tol.get("cluster"), cfg.seed) {
            Ok(d) => {
                umb = umb.max(d.umbilicity_defect(pg) / d.scale);
                decomps.push(d);
            }
            Err(e) => {
                report.push(CheckRecord::failed("decomposition", n, format!("at sample {:?}: {e}", pg.u)));
                for name in ["xi_identity", "parallelism", "distributions"] {
                    report.push(CheckRecord::skipped(name, "no principal decomposition"));
                }
                return Ok(report);
            }
        }
    }
    report.push(
        CheckRecord::gated("decomposition", umb, tol.get("cluster"), n)
            .with_note("umbilicity of each eigendistribution relative to the shape-operator scale"),
    );
    report.summaries.decomposition = Some(report::DecompositionSummary::new(&decomps[0]));

    if fit.is_einstein {
        let mut worst = 0.0f64;
        for (pg, d) in pgs.iter().zip(&decomps) {
            let r = xi_identity_at(pg, d, fit.lambda_hat);
            for e in r.entries.iter().filter(|e| e.applicable) {
                worst = worst.max(e.residual).max(e.mxi_residual);
            }
            if report.summaries.identity.is_none() {
                report.summaries.identity = Some(r);
            }
        }
        report.push(CheckRecord::gated("xi_identity", worst, tol.get("xi_identity"), n));
    } else {
        report.push(CheckRecord::skipped("xi_identity", "not Einstein"));
    }

    // the last two checks only hold for Einstein metrics
    let mut par = 0.0f64;
    let mut parallel_h = true;
    let mut dist = 0.0f64;
    let mut dist_samples = 0;
    let mut dist_error = None;
    for (u, d) in points.iter().zip(&decomps) {
        let jg = JetGeometry::new(&f, u)?;
        let sd = SmoothDecomposition::new(&jg, d, cfg.seed)?;
        let p = parallelism_at(&sd);
        par = par.max(p.residual);
        parallel_h &= p.parallel_mean_curvature;
        if jg.values().t_norm() >= tolerance::T_ZERO && dist_error.is_none() {
            match distribution_checks_at(&sd) {
                Ok(r) => {
                    dist = dist.max(r.max_residual);
                    dist_samples += 1;
                }
                Err(e) => dist_error = Some(format!("at sample {u:?}: {e}")),
            }
        }
    }
    report.push(if fit.is_einstein && parallel_h {
        CheckRecord::gated("parallelism", par, tol.get("parallelism"), n)
    } else {
        CheckRecord::reported(
            "parallelism",
            par,
            tol.get("parallelism"),
            n,
            "reporting mode: not Einstein or mean curvature not parallel",
        )
    });
    report.push(if let Some(e) = dist_error {
        if fit.is_einstein {
            CheckRecord::failed("distributions", n, e)
        } else {
            CheckRecord::skipped("distributions", &e)
        }
    } else if dist_samples == 0 {
        CheckRecord::skipped("distributions", "T≈0")
    } else if fit.is_einstein {
        CheckRecord::gated("distributions", dist, tol.get("distribution"), dist_samples)
    } else {
        CheckRecord::reported("distributions", dist, tol.get("distribution"), dist_samples, "reporting mode: not Einstein")
    });
    Ok(report)
}

/// One exported sample: chart parameters followed by the container point.
#[derive(Clone, Debug, PartialEq)]
pub struct ExportRow {
    pub params: Vec<f64>,
    pub point: Vec<f64>,
}

/// Builds a warped-product spec, certifies it and samples it.
pub fn construct(cfg: &RunConfig) -> Result<(Report, Vec<ExportRow>), CliError> {
    let Some((spec, profile)) = cfg.source.warped_spec()? else {
        return Err(CliError::Usage("construct needs a spec file of kind warped_product".into()));
    };
    let mut report = verify(cfg)?;
    report.command = "construct";
    let Prepared { f, points, .. } = prepare("construct", cfg)?;
    let tol = &cfg.tolerances;

    let (pchart, pmap) = profile.to_map()?;
    let d0 = pchart.dim();
    let n0 = spec.factor_dims[0];
    let mut metric = 0.0f64;
    let mut quadric = 0.0f64;
    let mut t_norms = Vec::with_capacity(points.len());
    let mut rows = Vec::with_capacity(points.len());
    for u in &points {
        let wh = pmap.eval_real(&u[..d0]);
        let mut off = d0;
        let y = spec.factor_dims[1..]
            .iter()
            .map(|d| {
                let y = u[off..off + d].to_vec();
                off += d;
                y
            })
            .collect();
        let sample = WarpedSample { w: wh[..n0].to_vec(), y };
        metric = metric.max(pullback_vs_warped_metric(&spec, &sample)?);
        let p = f.eval(u);
        quadric = quadric.max(validate_point(&f.space, &p));
        t_norms.push(point_geometry(&f, u)?.t_norm());
        rows.push(ExportRow { params: u.clone(), point: p.coords });
    }
    report.push(CheckRecord::gated("warped_metric", metric, tol.get("warped_metric"), points.len()));
    report.push(CheckRecord::gated("quadric", quadric, tol.get("quadric"), points.len()));
    report.summaries.t_norms = Some(t_norms);
    Ok((report, rows))
}

/// CSV of exported samples with 17 significant digits.
pub fn export_csv(rows: &[ExportRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = rows.first() {
        let header: Vec<String> = (0..first.params.len())
            .map(|i| format!("u{i}"))
            .chain((0..first.point.len()).map(|i| format!("x{i}")))
            .collect();
        w.write_record(&header).expect("in-memory write");
    }
    for r in rows {
        let rec: Vec<String> = r.params.iter().chain(&r.point).map(|x| report::sig17(*x)).collect();
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Rendered report in the configured format.
pub fn render(report: &Report) -> String {
    match report.config.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    }
}

/// Exit status for a finished run.
pub fn exit_code(report: &Report) -> i32 {
    if report.overall_pass {
        0
    } else {
        2
    }
}
