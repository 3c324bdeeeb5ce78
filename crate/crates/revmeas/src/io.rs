//! JSON file formats.
//!
//! State: `{"dim": n, "re": [[...]], "im": [[...]], "dims": [d_A, d_B]}`,
//! row-major, `im` and `dims` optional.
//!
//! Measurement: `{"type": "projective" | "reversible", "projectors": [state-format
//! matrices], "a": real}`, `a` required for `reversible` only.

use std::fs;
use std::path::Path;

use revmeas_core::measurement::{construct_reversible, make_projective, ProjectiveMeasurement, ReversibleMeasurement};
use revmeas_core::{BipartiteState, CMatrix, DensityMatrix, HermitianOperator, C64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result, SchemaError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix, dims: Option<[usize; 2]>) -> Self {
        let n = m.rows();
        let re = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect();
        Self {
            dim: n,
            re,
            im: Some(im),
            dims,
        }
    }

    pub fn to_matrix(&self) -> std::result::Result<CMatrix, SchemaError> {
        let n = self.dim;
        if n == 0 {
            return Err(SchemaError::shape("dim must be positive"));
        }
        check_shape("re", &self.re, n)?;
        if let Some(im) = &self.im {
            check_shape("im", im, n)?;
        }
        Ok(CMatrix::from_fn(n, n, |i, j| {
            let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
            C64::new(self.re[i][j], im)
        }))
    }
}

fn check_shape(name: &str, rows: &[Vec<f64>], n: usize) -> std::result::Result<(), SchemaError> {
    if rows.len() != n {
        return Err(SchemaError::shape(format!(
            "{name} has {} rows, expected dim = {n}",
            rows.len()
        )));
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(SchemaError::shape(format!(
            "{name}[{i}] has {} entries, expected {n}",
            row.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementKind {
    Projective,
    Reversible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementJson {
    #[serde(rename = "type")]
    pub kind: MeasurementKind,
    pub projectors: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
}

/// A state file decodes to a plain state, or a bipartite one when `dims` is present.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedState {
    Single(DensityMatrix),
    Bipartite(BipartiteState),
}

impl ParsedState {
    pub fn density(&self) -> &DensityMatrix {
        match self {
            Self::Single(rho) => rho,
            Self::Bipartite(st) => st.state(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum ParsedMeasurement {
    Projective(ProjectiveMeasurement),
    Reversible(ReversibleMeasurement),
}

/// Parses JSON text, mapping syntax and type errors to a byte offset.
pub fn from_json_text<T: for<'de> Deserialize<'de>>(text: &str) -> std::result::Result<T, SchemaError> {
    serde_json::from_str(text).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        SchemaError {
            message: strip_position(&e.to_string()),
            offset: Some(byte_offset(text, line, column)),
            line: Some(line),
            column: Some(column),
        }
    })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(idx) => msg[..idx].to_string(),
        None => msg.to_string(),
    }
}

/// Byte offset of a 1-based `(line, column)` position.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_state_text(text: &str) -> std::result::Result<ParsedStateOrCore, SchemaError> {
    let raw: MatrixJson = from_json_text(text)?;
    let matrix = raw.to_matrix()?;
    let rho = match DensityMatrix::new(matrix) {
        Ok(rho) => rho,
        Err(e) => return Ok(Err(e)),
    };
    Ok(match raw.dims {
        None => Ok(ParsedState::Single(rho)),
        Some([da, db]) => BipartiteState::new(rho, da, db).map(ParsedState::Bipartite),
    })
}

/// Outcome of a schema-valid file: the state, or the state invariant it violates.
pub type ParsedStateOrCore = std::result::Result<ParsedState, revmeas_core::Error>;

pub fn parse_state_file(path: &Path) -> Result<ParsedState> {
    let text = read(path)?;
    match parse_state_text(&text) {
        Err(err) => Err(CliError::Schema {
            path: path.to_path_buf(),
            err,
        }),
        Ok(Err(source)) => Err(CliError::State {
            path: path.to_path_buf(),
            source,
        }),
        Ok(Ok(state)) => Ok(state),
    }
}

pub fn parse_measurement_file(path: &Path) -> Result<ParsedMeasurement> {
    let text = read(path)?;
    let schema = |err| CliError::Schema {
        path: path.to_path_buf(),
        err,
    };
    let state_err = |source| CliError::State {
        path: path.to_path_buf(),
        source,
    };
    let raw: MeasurementJson = from_json_text(&text).map_err(schema)?;
    let projectors = raw
        .projectors
        .iter()
        .map(|p| {
            p.to_matrix()
                .map_err(schema)
                .and_then(|m| HermitianOperator::new(m).map_err(state_err))
        })
        .collect::<Result<Vec<_>>>()?;
    let base = make_projective(projectors).map_err(state_err)?;
    match (raw.kind, raw.a) {
        (MeasurementKind::Projective, None) => Ok(ParsedMeasurement::Projective(base)),
        (MeasurementKind::Projective, Some(_)) => Err(schema(SchemaError::shape(
            "field `a` only applies to type \"reversible\"",
        ))),
        (MeasurementKind::Reversible, Some(a)) => Ok(ParsedMeasurement::Reversible(
            construct_reversible(base, a).map_err(state_err)?,
        )),
        (MeasurementKind::Reversible, None) => Err(schema(SchemaError::shape("missing field `a`"))),
    }
}

pub fn state_to_json(rho: &DensityMatrix, dims: Option<[usize; 2]>) -> String {
    serde_json::to_string_pretty(&MatrixJson::from_matrix(rho.matrix(), dims)).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const BELL: &str = r#"{"dim": 4,
 "re": [[0.5,0,0,0.5],[0,0,0,0],[0,0,0,0],[0.5,0,0,0.5]],
 "im": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]],
 "dims": [2, 2]}"#;

    #[test]
    fn bell_state_parses_as_bipartite() {
        match parse_state_text(BELL).unwrap().unwrap() {
            ParsedState::Bipartite(st) => assert_eq!((st.dim_a(), st.dim_b()), (2, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trace_error_names_the_value() {
        let text = r#"{"dim": 2, "re": [[0.6, 0], [0, 0.6]]}"#;
        let err = parse_state_text(text).unwrap().unwrap_err();
        assert!(matches!(err, revmeas_core::Error::TraceNotOne { .. }));
        assert!(err.to_string().contains("1.2"));
    }

    #[test]
    fn malformed_json_reports_offset() {
        let text = "{\"dim\": 2,\n \"re\": [[1, 0], [0, 0]],,}";
        let err = parse_state_text(text).unwrap_err();
        let offset = err.offset.unwrap();
        assert_eq!(err.line, Some(2));
        assert_eq!(&text[offset..offset + 1], ",");
        assert!(offset > 11);
    }

    #[test]
    fn shape_errors() {
        let err = parse_state_text(r#"{"dim": 2, "re": [[1, 0]]}"#).unwrap_err();
        assert!(err.message.contains("re has 1 rows"));
        let err = parse_state_text(r#"{"dim": 2, "re": [[1, 0], [0]]}"#).unwrap_err();
        assert!(err.message.contains("re[1]"));
        let err = parse_state_text(r#"{"dim": 1, "re": [[1]], "bogus": 3}"#).unwrap_err();
        assert!(err.message.contains("bogus"));
    }

    #[test]
    fn dims_must_multiply_to_dim() {
        let text = r#"{"dim": 2, "re": [[1, 0], [0, 0]], "dims": [2, 2]}"#;
        assert!(matches!(
            parse_state_text(text).unwrap(),
            Err(revmeas_core::Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn state_json_round_trip() {
        let rho = revmeas_core::state::random_state(3, 2, 8).unwrap();
        let text = state_to_json(&rho, None);
        match parse_state_text(&text).unwrap().unwrap() {
            ParsedState::Single(back) => assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }
}
