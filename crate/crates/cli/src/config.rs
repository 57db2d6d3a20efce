use std::collections::BTreeMap;

use qxr_core::tolerance;
use serde::Serialize;

use crate::spec::Source;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Gate values by name; overrides replace defaults.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        let entries = [
            ("gauss", tolerance::GAUSS),
            ("codazzi", tolerance::CODAZZI),
            ("ricci", tolerance::RICCI_EQUATION),
            ("nabla_T", tolerance::VERTICAL),
            ("alpha_T", tolerance::VERTICAL),
            ("ricci_tensor", tolerance::RICCI_TENSOR),
            ("codazzi_flat", tolerance::CODAZZI_FLAT),
            ("flatness", tolerance::FLATNESS),
            ("cluster", tolerance::CLUSTER),
            ("class_a", tolerance::CLASS_A),
            ("einstein", tolerance::EINSTEIN),
            ("xi_identity", tolerance::XI_IDENTITY),
            ("parallelism", tolerance::PARALLELISM),
            ("distribution", tolerance::DISTRIBUTION),
            ("warped_metric", tolerance::WARPED_METRIC),
            ("quadric", tolerance::TANGENCY),
        ];
        Tolerances(entries.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Applies `NAME=V` overrides.
    pub fn with_overrides<'a>(mut self, pairs: impl IntoIterator<Item = &'a str>) -> Result<Self, CliError> {
        for pair in pairs {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("tolerance override `{pair}` is not NAME=V")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("tolerance `{k}` has a non-numeric value `{v}`")))?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("tolerance `{k}` must be positive and finite")));
            }
            match self.0.get_mut(k.trim()) {
                Some(slot) => *slot = v,
                None => {
                    let known: Vec<&str> = self.names().collect();
                    return Err(CliError::Usage(format!(
                        "unknown tolerance `{k}`; known names: {}",
                        known.join(", ")
                    )));
                }
            }
        }
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub source: Source,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub format: Format,
}

impl RunConfig {
    pub fn new(source: Source, samples: usize, seed: u64) -> Result<Self, CliError> {
        if samples == 0 {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        Ok(RunConfig {
            source,
            samples,
            seed,
            tolerances: Tolerances::default(),
            format: Format::Json,
        })
    }
}
