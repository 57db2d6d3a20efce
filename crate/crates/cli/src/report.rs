//! Report records and their JSON / CSV renderings.

use qxr_core::equations::EquationResidual;
use qxr_core::flat_normal::{EinsteinFit, IdentityReport, MinimalRicciBound, PrincipalDecomposition};
use qxr_core::linalg;
use serde::Serialize;

use crate::config::RunConfig;

pub const SCHEMA: &str = "qxr-report";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Computed but not gating.
    Reported,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub gating: bool,
    pub max_residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
    pub samples: usize,
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn gated(name: &str, max_residual: f64, tolerance: f64, samples: usize) -> Self {
        let pass = max_residual <= tolerance;
        CheckRecord {
            name: name.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            gating: true,
            max_residual: Some(max_residual),
            tolerance: Some(tolerance),
            pass: Some(pass),
            samples,
            note: None,
        }
    }

    /// Residual that is recorded without affecting the overall verdict.
    pub fn reported(name: &str, max_residual: f64, tolerance: f64, samples: usize, note: &str) -> Self {
        CheckRecord {
            status: Status::Reported,
            gating: false,
            pass: Some(max_residual <= tolerance),
            note: Some(note.into()),
            ..CheckRecord::gated(name, max_residual, tolerance, samples)
        }
    }

    pub fn skipped(name: &str, reason: &str) -> Self {
        CheckRecord {
            name: name.into(),
            status: Status::Skipped,
            gating: false,
            max_residual: None,
            tolerance: None,
            pass: None,
            samples: 0,
            note: Some(format!("skipped: {reason}")),
        }
    }

    /// A gating check that could not be evaluated.
    pub fn failed(name: &str, samples: usize, reason: String) -> Self {
        CheckRecord {
            name: name.into(),
            status: Status::Fail,
            gating: true,
            max_residual: None,
            tolerance: None,
            pass: Some(false),
            samples,
            note: Some(reason),
        }
    }

    pub fn from_equation(r: &EquationResidual, tolerance: f64) -> Self {
        CheckRecord::gated(&r.name, r.max_abs, tolerance, r.samples)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImmersionInfo {
    pub label: String,
    pub epsilon: i32,
    pub n: usize,
    pub m: usize,
    pub codim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionSummary {
    pub s: usize,
    pub dims: Vec<usize>,
    pub xi_norms: Vec<f64>,
    pub t_index: Option<usize>,
    /// `null` when there is a single principal normal.
    pub gap: Option<f64>,
    pub independence_angle: Option<f64>,
}

impl DecompositionSummary {
    pub fn new(d: &PrincipalDecomposition) -> Self {
        DecompositionSummary {
            s: d.s,
            dims: d.dims.clone(),
            xi_norms: d.xi.iter().map(|x| linalg::norm(x)).collect(),
            t_index: d.t_index,
            gap: d.gap.is_finite().then_some(d.gap),
            independence_angle: qxr_core::flat_normal::independence_angle(&d.xi),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassASummary {
    pub is_class_a: bool,
    pub max_defect: f64,
    pub t_vanishing_samples: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summaries {
    pub einstein_fit: Option<EinsteinFit>,
    /// Decomposition at the first sample point.
    pub decomposition: Option<DecompositionSummary>,
    /// Norm identity at the first sample point.
    pub identity: Option<IdentityReport>,
    pub class_a: Option<ClassASummary>,
    pub minimal_ricci: Option<MinimalRicciBound>,
    pub t_norms: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub config: RunConfig,
    pub immersion: ImmersionInfo,
    pub checks: Vec<CheckRecord>,
    pub summaries: Summaries,
    pub overall_pass: bool,
}

impl Report {
    pub fn new(command: &'static str, config: RunConfig, immersion: ImmersionInfo) -> Self {
        Report {
            schema: SCHEMA,
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            immersion,
            checks: Vec::new(),
            summaries: Summaries::default(),
            overall_pass: true,
        }
    }

    pub fn push(&mut self, check: CheckRecord) {
        if check.gating && check.pass != Some(true) {
            self.overall_pass = false;
        }
        self.checks.push(check);
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per check.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "status", "gating", "max_residual", "tolerance", "pass", "samples", "note"])
            .expect("in-memory write");
        for c in &self.checks {
            let status = serde_json::to_value(c.status).expect("status serializes");
            w.write_record([
                c.name.clone(),
                status.as_str().unwrap_or_default().to_string(),
                c.gating.to_string(),
                c.max_residual.map(sig17).unwrap_or_default(),
                c.tolerance.map(sig17).unwrap_or_default(),
                c.pass.map(|p| p.to_string()).unwrap_or_default(),
                c.samples.to_string(),
                c.note.clone().unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        w.write_record(["overall", if self.overall_pass { "pass" } else { "fail" }, "true", "", "", &self.overall_pass.to_string(), "", ""])
            .expect("in-memory write");
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Plain decimal notation with 17 significant digits.
pub fn sig17(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    // value = 0.d_1 d_2 … × 10^(exp + 1)
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    format!("{sign}{body}")
}
