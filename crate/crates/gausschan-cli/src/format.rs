//! On-disk JSON formats for channels and generators: nested arrays of
//! decimal numbers with an explicit schema version. Matrices round trip
//! bit-exactly through the shortest-representation float encoding.

use serde::{Deserialize, Serialize};

use gausschan::{RealMatrix, Tolerance};

use crate::CliError;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub schema_version: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorFile {
    pub schema_version: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub h: Vec<Vec<f64>>,
}

pub fn matrix_to_rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn rows_to_matrix(rows: &[Vec<f64>], dim: usize, what: &str) -> Result<RealMatrix, CliError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::Parse(format!(
            "{what}: expected a {dim}x{dim} array, got {} rows",
            rows.len()
        )));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    if !flat.iter().all(|v| v.is_finite()) {
        return Err(CliError::Parse(format!("{what}: non-finite entries rejected")));
    }
    Ok(RealMatrix::from_row_slice(dim, dim, &flat))
}

impl ChannelFile {
    pub fn from_channel(c: &gausschan::GaussianChannel, label: Option<String>) -> Self {
        ChannelFile {
            schema_version: SCHEMA_VERSION.to_string(),
            n: c.modes(),
            label,
            x: matrix_to_rows(c.x()),
            y: matrix_to_rows(c.y()),
        }
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let file: ChannelFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        file.validate()?;
        Ok(file)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Parse(format!(
                "unsupported schema_version {:?}",
                self.schema_version
            )));
        }
        if self.n == 0 {
            return Err(CliError::Parse("mode count n must be positive".into()));
        }
        Ok(())
    }

    pub fn matrices(&self) -> Result<(RealMatrix, RealMatrix), CliError> {
        let d = 2 * self.n;
        Ok((rows_to_matrix(&self.x, d, "x")?, rows_to_matrix(&self.y, d, "y")?))
    }

    /// Parse and validate into a channel; complete-positivity violations are
    /// domain errors, not parse errors.
    pub fn to_channel(&self, tol: Tolerance) -> Result<gausschan::GaussianChannel, CliError> {
        let (x, y) = self.matrices()?;
        gausschan::GaussianChannel::new(x, y, tol).map_err(|e| CliError::Domain(e.to_string()))
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    pub fn display_label(&self, path: &std::path::Path) -> String {
        self.label.clone().unwrap_or_else(|| path.display().to_string())
    }
}


impl GeneratorFile {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let file: GeneratorFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::Parse(format!(
                "unsupported schema_version {:?}",
                file.schema_version
            )));
        }
        if file.n == 0 {
            return Err(CliError::Parse("mode count n must be positive".into()));
        }
        Ok(file)
    }

    /// Symmetry and positivity of the triple are validated by the library;
    /// violations are domain errors.
    pub fn to_generator(&self, tol: Tolerance) -> Result<gausschan::Generator, CliError> {
        let d = 2 * self.n;
        let a = rows_to_matrix(&self.a, d, "a")?;
        let b = rows_to_matrix(&self.b, d, "b")?;
        let h = rows_to_matrix(&self.h, d, "h")?;
        gausschan::Generator::new(a, b, h, tol).map_err(|e| CliError::Domain(e.to_string()))
    }

    pub fn display_label(&self, path: &std::path::Path) -> String {
        self.label.clone().unwrap_or_else(|| path.display().to_string())
    }
}
