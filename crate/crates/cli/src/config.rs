//! Input file formats.

use std::path::Path;

use ddvv_core::comass::PCovector;
use ddvv_core::ddvv::SffTensor;
use ddvv_core::{Configuration, SymmetricMatrix};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Tolerance for accepting a nearly symmetric input matrix.
pub const SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub n: usize,
    pub m: usize,
    /// Row-major `n × n` arrays.
    pub matrices: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traceless: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<HBlock>,
}

/// Second fundamental form data: slices default to `matrices`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HBlock {
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<Vec<f64>>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovectorFile {
    pub d: usize,
    pub p: usize,
    /// `[[i_1, …, i_p], a]` pairs with 1-based indices.
    pub terms: Vec<(Vec<usize>, f64)>,
}

pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(text: &str, path: &Path) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Usage(format!(
            "{}: malformed JSON at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    parse_json(&text, path)
}

fn build_matrices(n: usize, m: usize, mats: &[Vec<Vec<f64>>]) -> Result<Vec<SymmetricMatrix>, CliError> {
    if mats.len() != m {
        return Err(CliError::Usage(format!("expected m = {m} matrices, found {}", mats.len())));
    }
    mats.iter()
        .enumerate()
        .map(|(r, rows)| {
            if rows.len() != n || rows.iter().any(|row| row.len() != n) {
                return Err(CliError::Usage(format!("matrix {} is not {n}×{n}", r + 1)));
            }
            SymmetricMatrix::from_rows(rows, SYMMETRY_TOL)
                .map_err(|e| CliError::Usage(format!("matrix {}: {e}", r + 1)))
        })
        .collect()
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    pub fn from_configuration(c: &Configuration) -> Self {
        Self {
            n: c.n(),
            m: c.m(),
            matrices: c.matrices().iter().map(SymmetricMatrix::rows).collect(),
            traceless: None,
            h: None,
        }
    }

    /// The configuration, projected to traceless parts when requested
    /// either in the file or by `override_traceless`.
    pub fn configuration(&self, override_traceless: Option<bool>) -> Result<Configuration, CliError> {
        if self.m == 0 || self.n == 0 {
            return Err(CliError::Usage("n and m must be positive".into()));
        }
        let c = Configuration::new(build_matrices(self.n, self.m, &self.matrices)?)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(if override_traceless.or(self.traceless).unwrap_or(false) {
            c.traceless()
        } else {
            c
        })
    }

    /// Second fundamental form and ambient curvature, if an `h` block is present.
    pub fn sff(&self) -> Result<Option<(SffTensor, f64)>, CliError> {
        let Some(h) = &self.h else {
            return Ok(None);
        };
        let mats = h.matrices.as_deref().unwrap_or(&self.matrices);
        if mats.is_empty() {
            return Err(CliError::Usage("the h block needs at least one slice".into()));
        }
        let slices = build_matrices(self.n, mats.len(), mats)?;
        let t = SffTensor::new(slices).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Some((t, h.c)))
    }
}

impl CovectorFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    pub fn covector(&self) -> Result<PCovector, CliError> {
        PCovector::new(self.d, self.p, self.terms.iter().cloned()).map_err(|e| CliError::Usage(e.to_string()))
    }
}
