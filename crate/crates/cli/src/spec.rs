//! Immersion sources: catalog entries and spec files.

use std::collections::BTreeMap;
use std::path::Path;

use qxr_core::ambient::{validate_point, AmbientPoint};
use qxr_core::catalog;
use qxr_core::error::GeomError;
use qxr_core::tolerance;
use qxr_core::warped::{build_multirotational, ProfileSpec, WarpedProductSpec};
use qxr_core::ParametricImmersion;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmbientDecl {
    pub epsilon: i32,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpecBody {
    Catalog {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    /// Multi-rotational construction: identity warped factors over `profile`.
    WarpedProduct {
        factor_dims: Vec<usize>,
        z: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
        /// Base point; only `e_0` is supported, but a supplied value is validated.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<Vec<f64>>,
        profile: ProfileSpec,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecFile {
    pub ambient: AmbientDecl,
    #[serde(flatten)]
    pub body: SpecBody,
}

/// Where the immersion comes from, echoed into reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Source {
    Catalog { name: String, params: BTreeMap<String, f64> },
    SpecFile { path: String, spec: SpecFile },
}

impl SpecFile {
    pub fn read(path: &Path) -> Result<SpecFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Spec(format!("malformed spec file {}: {e}", path.display())))
    }

    pub fn warped_spec(&self) -> Result<Option<(WarpedProductSpec, ProfileSpec)>, CliError> {
        let SpecBody::WarpedProduct { factor_dims, z, c, q, profile } = &self.body else {
            return Ok(None);
        };
        let spec = WarpedProductSpec {
            epsilon: self.ambient.epsilon,
            n: self.ambient.n,
            factor_dims: factor_dims.clone(),
            z: z.clone(),
            c: *c,
        };
        spec.validate()?;
        if let Some(q) = q {
            let space = spec.space()?;
            let mut coords = q.clone();
            coords.push(0.0);
            let r = validate_point(&space, &AmbientPoint::new(coords));
            if !(r <= tolerance::TANGENCY) {
                return Err(CliError::Spec(format!(
                    "base point q fails validate_point: |<q, q> - epsilon| = {r:.3e}"
                )));
            }
            let canonical = spec.q();
            if q.iter().zip(&canonical).any(|(a, b)| (a - b).abs() > tolerance::TANGENCY) {
                return Err(CliError::Spec("only the canonical base point q = e_0 is supported".into()));
            }
        }
        Ok(Some((spec, profile.clone())))
    }

    pub fn build(&self) -> Result<ParametricImmersion, CliError> {
        match &self.body {
            SpecBody::Catalog { name, params } => {
                let f = catalog::make(name, params)?;
                if f.space.epsilon != self.ambient.epsilon || f.space.n != self.ambient.n {
                    return Err(CliError::Spec(format!(
                        "catalog entry {name} lives in epsilon = {}, n = {}, spec file declares epsilon = {}, n = {}",
                        f.space.epsilon, f.space.n, self.ambient.epsilon, self.ambient.n
                    )));
                }
                Ok(f)
            }
            SpecBody::WarpedProduct { .. } => {
                let (spec, profile) = self.warped_spec()?.expect("warped body");
                Ok(build_multirotational(&spec, &profile)?)
            }
        }
    }
}

impl Source {
    pub fn build(&self) -> Result<ParametricImmersion, CliError> {
        match self {
            Source::Catalog { name, params } => Ok(catalog::make(name, params)?),
            Source::SpecFile { spec, .. } => spec.build(),
        }
    }

    pub fn warped_spec(&self) -> Result<Option<(WarpedProductSpec, ProfileSpec)>, CliError> {
        match self {
            Source::Catalog { .. } => Ok(None),
            Source::SpecFile { spec, .. } => spec.warped_spec(),
        }
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        CliError::Spec(e.to_string())
    }
}
