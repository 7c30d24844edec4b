//! JSON file formats: states, observables and reports.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wy_skew::states::{Normalization, NORM_TOL};
use wy_skew::{Complex, HermitianMatrix, PureState};

/// Version tag carried by every file this tool reads or writes.
pub const SCHEMA: &str = "wy-skew/1";
/// Tolerance for the Hermiticity check on observable files.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Norm deviation above which a rescaled state triggers a warning.
pub const NORM_WARN_TOL: f64 = 1e-9;

/// Failure to read, parse or validate an input file.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError {
    pub path: Option<PathBuf>,
    pub message: String,
}

impl InputError {
    pub fn new(path: Option<&Path>, message: impl Into<String>) -> Self {
        Self {
            path: path.map(Path::to_path_buf),
            message: message.into(),
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.path {
            Some(p) => write!(f, "{}: {}", p.display(), self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for InputError {}

fn check_schema(schema: &Option<String>) -> Result<(), String> {
    match schema.as_deref() {
        None | Some(SCHEMA) => Ok(()),
        Some(other) => Err(format!("field `schema`: expected \"{SCHEMA}\", found \"{other}\"")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub local_dims: Vec<usize>,
    pub amplitudes_re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes_im: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalize: Option<bool>,
}

/// A state built from a file, plus how far its norm was from one.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedState {
    pub state: PureState,
    pub norm_deviation: f64,
}

impl StateFile {
    pub fn from_state(psi: &PureState) -> Self {
        let amps = psi.amplitudes();
        let im: Vec<f64> = amps.iter().map(|z| z.im).collect();
        Self {
            schema: Some(SCHEMA.to_string()),
            local_dims: psi.local_dims().to_vec(),
            amplitudes_re: amps.iter().map(|z| z.re).collect(),
            amplitudes_im: im.iter().any(|&x| x != 0.0).then_some(im),
            normalize: None,
        }
    }

    pub fn to_state(&self) -> Result<LoadedState, String> {
        check_schema(&self.schema)?;
        let n = self.amplitudes_re.len();
        let amplitudes: Vec<Complex> = match &self.amplitudes_im {
            None => self.amplitudes_re.iter().map(|&re| Complex::new(re, 0.0)).collect(),
            Some(im) if im.len() == n => self.amplitudes_re.iter().zip(im).map(|(&re, &im)| Complex::new(re, im)).collect(),
            Some(im) => {
                return Err(format!(
                    "field `amplitudes_im`: length {} differs from `amplitudes_re` length {n}",
                    im.len()
                ))
            }
        };
        let norm_deviation = (amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs();
        // already-normalized input is kept bit-for-bit
        let normalization = if self.normalize.unwrap_or(true) && norm_deviation > NORM_TOL {
            Normalization::Rescale
        } else {
            Normalization::Strict
        };
        let state = PureState::new(self.local_dims.clone(), amplitudes, normalization)
            .map_err(|e| format!("fields `local_dims`/`amplitudes_re`: {e}"))?;
        Ok(LoadedState { state, norm_deviation })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub dim: usize,
    pub entries_re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries_im: Option<Vec<Vec<f64>>>,
}

impl ObservableFile {
    pub fn from_matrix(m: &HermitianMatrix) -> Self {
        let im = m.imag_rows();
        Self {
            schema: Some(SCHEMA.to_string()),
            dim: m.dim(),
            entries_re: m.real_rows(),
            entries_im: im.iter().flatten().any(|&x| x != 0.0).then_some(im),
        }
    }

    pub fn to_matrix(&self) -> Result<HermitianMatrix, String> {
        check_schema(&self.schema)?;
        let check_grid = |name: &str, grid: &[Vec<f64>]| -> Result<(), String> {
            if grid.len() != self.dim {
                return Err(format!("field `{name}`: {} rows, expected {}", grid.len(), self.dim));
            }
            match grid.iter().position(|row| row.len() != self.dim) {
                Some(i) => Err(format!("field `{name}`: row {i} has {} entries, expected {}", grid[i].len(), self.dim)),
                None => Ok(()),
            }
        };
        if self.dim == 0 {
            return Err("field `dim`: must be positive".into());
        }
        check_grid("entries_re", &self.entries_re)?;
        if let Some(im) = &self.entries_im {
            check_grid("entries_im", im)?;
        }
        let rows: Vec<Vec<Complex>> = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let im = self.entries_im.as_ref().map_or(0.0, |g| g[i][j]);
                        Complex::new(self.entries_re[i][j], im)
                    })
                    .collect()
            })
            .collect();
        HermitianMatrix::from_rows(&rows, HERMITIAN_TOL).map_err(|e| format!("fields `entries_re`/`entries_im`: {e}"))
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError::new(Some(path), e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| InputError::new(Some(path), e.to_string()))
}

pub fn load_state(path: &Path) -> Result<LoadedState, InputError> {
    read_json::<StateFile>(path)?
        .to_state()
        .map_err(|m| InputError::new(Some(path), m))
}

pub fn load_observable(path: &Path) -> Result<HermitianMatrix, InputError> {
    read_json::<ObservableFile>(path)?
        .to_matrix()
        .map_err(|m| InputError::new(Some(path), m))
}

/// Writes `value` as precise JSON to `path`.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), InputError> {
    let text = crate::json::to_string(value).map_err(|e| InputError::new(Some(path), e.to_string()))?;
    fs::write(path, text).map_err(|e| InputError::new(Some(path), e.to_string()))
}

/// Tolerances in force for a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub violation_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check_tol: Option<f64>,
}

/// The machine-readable output of every command.
///
/// `duration_seconds` is the only field that varies between reruns of the
/// same command; it is always serialized last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inequality_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violated: Option<bool>,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<serde_json::Value>,
    pub duration_seconds: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_round_trip_is_exact() {
        let amps = [0.1, -1.0 / 3.0, 2.0f64.sqrt() / 7.0, 0.0];
        let psi = PureState::new(
            vec![2, 2],
            amps.iter().map(|&x| Complex::new(x, x / 2.0)).collect(),
            Normalization::Rescale,
        )
        .unwrap();
        let text = crate::json::to_string(&StateFile::from_state(&psi)).unwrap();
        let file: StateFile = serde_json::from_str(&text).unwrap();
        let back = file.to_state().unwrap().state;
        for (a, b) in psi.amplitudes().iter().zip(back.amplitudes()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn missing_imaginary_part_means_real() {
        let file: StateFile = serde_json::from_str(r#"{"local_dims":[2],"amplitudes_re":[3,4]}"#).unwrap();
        let loaded = file.to_state().unwrap();
        assert_eq!(loaded.state.amplitudes()[1], Complex::new(0.8, 0.0));
        assert_eq!(loaded.norm_deviation, 24.0);
    }

    #[test]
    fn strict_states_must_be_normalized() {
        let file: StateFile =
            serde_json::from_str(r#"{"local_dims":[2],"amplitudes_re":[3,4],"normalize":false}"#).unwrap();
        assert!(file.to_state().is_err());
    }

    #[test]
    fn bad_lengths_name_the_field() {
        let file: StateFile = serde_json::from_str(r#"{"local_dims":[2,2],"amplitudes_re":[1,0,0]}"#).unwrap();
        assert!(file.to_state().unwrap_err().contains("amplitudes_re"));
        let file: StateFile =
            serde_json::from_str(r#"{"local_dims":[2],"amplitudes_re":[1,0],"amplitudes_im":[0]}"#).unwrap();
        assert!(file.to_state().unwrap_err().contains("amplitudes_im"));
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let file: StateFile =
            serde_json::from_str(r#"{"schema":"other/2","local_dims":[2],"amplitudes_re":[1,0]}"#).unwrap();
        assert!(file.to_state().unwrap_err().contains("schema"));
    }

    #[test]
    fn observables_must_be_hermitian() {
        let ok: ObservableFile = serde_json::from_str(
            r#"{"dim":2,"entries_re":[[1,2],[2,0]],"entries_im":[[0,1],[-1,0]]}"#,
        )
        .unwrap();
        let m = ok.to_matrix().unwrap();
        assert_eq!(m.get(0, 1), Complex::new(2.0, 1.0));
        assert_eq!(ObservableFile::from_matrix(&m).to_matrix().unwrap(), m);

        let bad: ObservableFile = serde_json::from_str(r#"{"dim":2,"entries_re":[[1,2],[3,0]]}"#).unwrap();
        assert!(bad.to_matrix().is_err());
        let ragged: ObservableFile = serde_json::from_str(r#"{"dim":2,"entries_re":[[1,2],[3]]}"#).unwrap();
        assert!(ragged.to_matrix().unwrap_err().contains("row 1"));
    }
}
