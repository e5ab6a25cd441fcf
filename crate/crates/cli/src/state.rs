use std::path::Path;

use num_complex::Complex64;
use qbound::linalg::{eigh, DensityMatrix, HermitianMatrix};
use serde::Deserialize;

use crate::error::CliError;

const HERMITIAN_TOL: f64 = 1e-9;
const PSD_TOL: f64 = 1e-9;
const TRACE_SILENT_TOL: f64 = 1e-9;
const TRACE_WARN_TOL: f64 = 1e-6;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    dim: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

/// A validated state together with the warnings raised while reading it.
#[derive(Debug, Clone)]
pub struct LoadedState {
    pub state: DensityMatrix,
    pub warnings: Vec<String>,
}

/// Read `{"dim": d, "matrix": [[[re, im], ...], ...]}` from `path`.
pub fn parse_state_file(path: &Path) -> Result<LoadedState, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_state_str(&text).map_err(|e| match e {
        StateError::Json(source) => CliError::Json {
            path: path.to_path_buf(),
            source,
        },
        StateError::Cli(e) => e,
    })
}

enum StateError {
    Json(serde_json::Error),
    Cli(CliError),
}

impl From<CliError> for StateError {
    fn from(e: CliError) -> Self {
        Self::Cli(e)
    }
}

fn parse_state_str(text: &str) -> Result<LoadedState, StateError> {
    let doc: StateDoc = serde_json::from_str(text).map_err(StateError::Json)?;
    let d = doc.dim;
    if d == 0 {
        return Err(CliError::Format("dim must be at least 1".into()).into());
    }
    if doc.matrix.len() != d || doc.matrix.iter().any(|row| row.len() != d) {
        return Err(CliError::Format(format!("matrix must have {d} rows of {d} entries")).into());
    }
    let entries: Vec<Complex64> = doc
        .matrix
        .iter()
        .flatten()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CliError::Format("matrix entries must be finite".into()).into());
    }
    let deviation = (0..d)
        .flat_map(|j| (0..d).map(move |k| (j, k)))
        .map(|(j, k)| (entries[j * d + k] - entries[k * d + j].conj()).norm())
        .fold(0.0, f64::max);
    if deviation > HERMITIAN_TOL {
        return Err(CliError::NonHermitian { deviation }.into());
    }
    let mut warnings = Vec::new();
    let mut matrix = HermitianMatrix::new(d, entries).map_err(CliError::from)?;
    let spectral = eigh(&matrix, 0.0).map_err(CliError::from)?;
    let min = spectral.min_eigenvalue();
    if min < -PSD_TOL {
        return Err(CliError::NegativeEigenvalue { value: min }.into());
    }
    if min < 0.0 {
        let mut clamped = HermitianMatrix::zeros(d);
        for (l, p, _) in spectral.iter() {
            clamped = clamped.combine(1.0, p, l.max(0.0)).map_err(CliError::from)?;
        }
        matrix = clamped;
    }
    let trace = matrix.trace();
    if (trace - 1.0).abs() > TRACE_WARN_TOL {
        return Err(CliError::Trace { value: trace }.into());
    }
    if (trace - 1.0).abs() > TRACE_SILENT_TOL {
        warnings.push(format!("trace {trace} renormalized to 1"));
    }
    matrix = matrix.scale(1.0 / trace);
    let state = DensityMatrix::new(matrix).map_err(CliError::from)?;
    Ok(LoadedState { state, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<LoadedState, CliError> {
        parse_state_str(text).map_err(|e| match e {
            StateError::Json(e) => CliError::Format(e.to_string()),
            StateError::Cli(e) => e,
        })
    }

    #[test]
    fn pure_zero_state() {
        let s = parse(r#"{"dim":2,"matrix":[[[1,0],[0,0]],[[0,0],[0,0]]]}"#).unwrap();
        assert!(s.warnings.is_empty());
        assert_eq!(s.state.matrix().diagonal_entries(), vec![1.0, 0.0]);
    }

    #[test]
    fn renormalizes_small_trace_error() {
        let s = parse(r#"{"dim":2,"matrix":[[[0.5000005,0],[0,0]],[[0,0],[0.5,0]]]}"#).unwrap();
        assert_eq!(s.warnings.len(), 1);
        assert!((s.state.matrix().trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_matrices() {
        assert!(matches!(
            parse(r#"{"dim":2,"matrix":[[[0.5,0],[0.1,0]],[[0,0],[0.5,0]]]}"#),
            Err(CliError::NonHermitian { .. })
        ));
        assert!(matches!(
            parse(r#"{"dim":2,"matrix":[[[1.1,0],[0,0]],[[0,0],[-0.1,0]]]}"#),
            Err(CliError::NegativeEigenvalue { .. })
        ));
        assert!(matches!(
            parse(r#"{"dim":2,"matrix":[[[0.6,0],[0,0]],[[0,0],[0.5,0]]]}"#),
            Err(CliError::Trace { .. })
        ));
        assert!(matches!(parse(r#"{"dim":2,"matrix":[[[1,0]]]}"#), Err(CliError::Format(_))));
    }

    #[test]
    fn clamps_rounding_negatives() {
        let s = parse(r#"{"dim":2,"matrix":[[[1.0000000001,0],[0,0]],[[0,0],[-1e-10,0]]]}"#).unwrap();
        assert!(s.state.spectrum().min_eigenvalue() >= 0.0);
    }
}
