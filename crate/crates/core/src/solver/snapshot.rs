//! GSF1: `GSQG1\n`, one JSON header line, then `n·n` little-endian `f64`
//! values in row-major order.

use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

use super::SolverState;
use crate::error::{Error, Result};
use crate::spectral::{Grid2D, RealField};

pub const GSF1_MAGIC: &[u8; 6] = b"GSQG1\n";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    n: usize,
    length: f64,
    alpha: f64,
    t: f64,
    field: String,
    dtype: String,
    order: String,
}

pub fn write_gsf1(mut w: impl Write, state: &SolverState) -> Result<()> {
    let grid = state.omega.grid();
    let header = Header {
        n: grid.n(),
        length: grid.length(),
        alpha: state.alpha,
        t: state.t,
        field: "omega".into(),
        dtype: "f64le".into(),
        order: "row-major".into(),
    };
    let json = serde_json::to_string(&header).map_err(|e| Error::HeaderParse(e.to_string()))?;
    let mut bytes = Vec::with_capacity(GSF1_MAGIC.len() + json.len() + 1 + 8 * grid.len());
    bytes.extend_from_slice(GSF1_MAGIC);
    bytes.extend_from_slice(json.as_bytes());
    bytes.push(b'\n');
    for v in state.omega.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&bytes)?;
    Ok(())
}

/// Step count and last step are not stored and come back as zero.
pub fn read_gsf1(bytes: &[u8]) -> Result<SolverState> {
    let rest = bytes
        .strip_prefix(GSF1_MAGIC.as_slice())
        .ok_or(Error::NotGsf1)?;
    let end = rest
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::HeaderParse("header line is not terminated".into()))?;
    let line = std::str::from_utf8(&rest[..end]).map_err(|e| Error::HeaderParse(e.to_string()))?;
    let h: Header = serde_json::from_str(line).map_err(|e| Error::HeaderParse(e.to_string()))?;
    for (key, got, want) in [
        ("field", &h.field, "omega"),
        ("dtype", &h.dtype, "f64le"),
        ("order", &h.order, "row-major"),
    ] {
        if got != want {
            return Err(Error::HeaderParse(format!(
                "{key} = {got:?}, expected {want:?}"
            )));
        }
    }
    let grid = Grid2D::new(h.n, h.length).map_err(|e| Error::HeaderParse(e.to_string()))?;
    let payload = &rest[end + 1..];
    let expected = 8 * grid.len();
    if payload.len() != expected {
        return Err(Error::PayloadLength {
            expected,
            actual: payload.len(),
        });
    }
    let values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(SolverState {
        t: h.t,
        alpha: h.alpha,
        omega: RealField::from_values(&grid, values)?,
        step_count: 0,
        dt_last: 0.0,
    })
}

pub fn save_snapshot(state: &SolverState, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_gsf1(&mut w, state)?;
    w.flush()?;
    Ok(())
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<SolverState> {
    read_gsf1(&std::fs::read(path)?)
}
