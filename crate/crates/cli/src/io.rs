//! JSON files for channels and states.
//!
//! Matrices are written as nested rows of `[re, im]` pairs. The reader also
//! accepts a flat row-major list of pairs.

use std::fs;
use std::path::Path;

use qcorr_core::channels::KrausChannel;
use qcorr_core::{ComplexMatrix, DensityMatrix, C64};
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

type Rows = Vec<Vec<[f64; 2]>>;

#[derive(Serialize)]
struct ChannelFile<'a> {
    name: &'a str,
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<Rows>,
}

#[derive(Serialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub rho: Rows,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self {
            dims: rho.dims().to_vec(),
            rho: matrix_rows(rho.matrix()),
        }
    }
}

pub fn matrix_rows(m: &ComplexMatrix) -> Rows {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn channel_to_json(ch: &KrausChannel) -> String {
    let file = ChannelFile {
        name: ch.name().unwrap_or("channel"),
        dim_in: ch.dim_in(),
        dim_out: ch.dim_out(),
        kraus: ch.kraus().iter().map(matrix_rows).collect(),
    };
    serde_json::to_string_pretty(&file).expect("channel serializes")
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string_pretty(&StateFile::from_state(rho)).expect("state serializes")
}

pub fn channel_from_json(text: &str) -> Result<KrausChannel, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| schema(format!("malformed JSON: {e}")))?;
    let name = match v.get("name") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(schema("\"name\" must be a string")),
        None => return Err(schema("missing \"name\"")),
    };
    let dim_in = dimension(&v, "dim_in")?;
    let dim_out = dimension(&v, "dim_out")?;
    let kraus = v
        .get("kraus")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("\"kraus\" must be an array of matrices"))?;
    if kraus.is_empty() {
        return Err(schema("\"kraus\" is empty"));
    }
    let ops = kraus
        .iter()
        .enumerate()
        .map(|(k, m)| parse_matrix(m, dim_out, dim_in).map_err(|e| schema(format!("kraus[{k}]: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(KrausChannel::new(ops, Some(name))?)
}

pub fn state_from_json(text: &str) -> Result<DensityMatrix, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| schema(format!("malformed JSON: {e}")))?;
    let dims = v
        .get("dims")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("missing \"dims\" array"))?
        .iter()
        .map(|d| d.as_u64().filter(|&d| d > 0).map(|d| d as usize))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| schema("\"dims\" must hold positive integers"))?;
    if dims.is_empty() {
        return Err(schema("\"dims\" is empty"));
    }
    let n: usize = dims.iter().product();
    let rho = v.get("rho").ok_or_else(|| schema("missing \"rho\""))?;
    let m = parse_matrix(rho, n, n).map_err(|e| schema(format!("rho: {e}")))?;
    Ok(DensityMatrix::new(m, dims)?)
}

pub fn read_channel(path: &Path) -> Result<KrausChannel, CliError> {
    channel_from_json(&read(path)?)
}

pub fn read_state(path: &Path) -> Result<DensityMatrix, CliError> {
    state_from_json(&read(path)?)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::usage(format!("schema violation: {}", msg.into()))
}

fn dimension(v: &Value, key: &str) -> Result<usize, CliError> {
    v.get(key)
        .and_then(Value::as_u64)
        .filter(|&d| d > 0)
        .map(|d| d as usize)
        .ok_or_else(|| schema(format!("\"{key}\" must be a positive integer")))
}

fn parse_pair(v: &Value) -> Option<C64> {
    match v.as_array()?.as_slice() {
        [re, im] => Some(C64::new(re.as_f64()?, im.as_f64()?)),
        _ => None,
    }
}

fn parse_matrix(v: &Value, rows: usize, cols: usize) -> Result<ComplexMatrix, String> {
    let outer = v.as_array().ok_or("matrix must be an array")?;
    let nested = outer.first().and_then(Value::as_array).is_some_and(|first| first.iter().all(Value::is_array));
    let entries: Vec<C64> = if nested && parse_pair(&outer[0]).is_none() {
        if outer.len() != rows {
            return Err(format!("expected {rows} rows, found {}", outer.len()));
        }
        let mut out = Vec::with_capacity(rows * cols);
        for (i, row) in outer.iter().enumerate() {
            let row = row.as_array().ok_or(format!("row {i} is not an array"))?;
            if row.len() != cols {
                return Err(format!("row {i} has {} entries, expected {cols}", row.len()));
            }
            for z in row {
                out.push(parse_pair(z).ok_or(format!("row {i}: entries must be [re, im] pairs"))?);
            }
        }
        out
    } else {
        if outer.len() != rows * cols {
            return Err(format!("expected {} entries, found {}", rows * cols, outer.len()));
        }
        outer
            .iter()
            .map(|z| parse_pair(z).ok_or_else(|| "entries must be [re, im] pairs".to_string()))
            .collect::<Result<_, _>>()?
    };
    ComplexMatrix::from_row_major(rows, cols, &entries).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcorr_core::channels::amplitude_damping;

    #[test]
    fn flat_and_nested_layouts_agree() {
        let nested = r#"{"dims":[2],"rho":[[[0.75,0],[0,0.25]],[[0,-0.25],[0.25,0]]]}"#;
        let flat = r#"{"dims":[2],"rho":[[0.75,0],[0,0.25],[0,-0.25],[0.25,0]]}"#;
        assert_eq!(state_from_json(nested).unwrap(), state_from_json(flat).unwrap());
    }

    #[test]
    fn channel_round_trip() {
        let ch = amplitude_damping(0.3).unwrap();
        let back = channel_from_json(&channel_to_json(&ch)).unwrap();
        assert_eq!(back.kraus(), ch.kraus());
        assert_eq!(back.name(), ch.name());
    }

    #[test]
    fn schema_violations() {
        assert!(state_from_json(r#"{"rho":[[[1,0]]]}"#).is_err());
        assert!(state_from_json(r#"{"dims":[2],"rho":[[[1,0]]]}"#).is_err());
        assert!(state_from_json(r#"{"dims":[2],"rho":[[[2,0],[0,0]],[[0,0],[-1,0]]]}"#).is_err());
        assert!(channel_from_json(r#"{"name":"x","dim_in":2,"dim_out":2,"kraus":[]}"#).is_err());
        assert!(channel_from_json(r#"{"name":"x","dim_in":2,"dim_out":2,"kraus":[[[[1,0],[0,0]],[[0,0],[0,0]]]]}"#).is_err());
    }
}
