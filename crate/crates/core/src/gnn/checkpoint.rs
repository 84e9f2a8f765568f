//! Parameter checkpoints.
//!
//! Binary layout (all integers and floats little-endian):
//!
//! ```text
//! magic        8 bytes  "GSEPARAM"
//! version      u32      1
//! count        u32      number of tensors
//! shapes       count x (rows u64, cols u64)
//! data         each tensor's rows*cols f64 values, row-major, in shape order
//! ```
//!
//! A sidecar `<file>.json` carries the model configuration and tensor names.

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{GcnParams, GprgnnParams, ModelConfig, ModelKind, ModelParams};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"GSEPARAM";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub model: ModelConfig,
    pub input_dim: usize,
    pub num_classes: usize,
    pub tensors: Vec<String>,
}

fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn encode(params: &ModelParams) -> Vec<u8> {
    let tensors = params.tensors();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
    for (_, t) in &tensors {
        out.extend_from_slice(&(t.nrows() as u64).to_le_bytes());
        out.extend_from_slice(&(t.ncols() as u64).to_le_bytes());
    }
    for (_, t) in &tensors {
        for i in 0..t.nrows() {
            for j in 0..t.ncols() {
                out.extend_from_slice(&t[(i, j)].to_le_bytes());
            }
        }
    }
    out
}

fn take<'a>(bytes: &mut &'a [u8], len: usize) -> Result<&'a [u8]> {
    if bytes.len() < len {
        return Err(Error::Config("checkpoint truncated".into()));
    }
    let (head, tail) = bytes.split_at(len);
    *bytes = tail;
    Ok(head)
}

fn read_u32(bytes: &mut &[u8]) -> Result<u32> {
    Ok(u32::from_le_bytes(take(bytes, 4)?.try_into().expect("4 bytes")))
}

fn read_u64(bytes: &mut &[u8]) -> Result<u64> {
    Ok(u64::from_le_bytes(take(bytes, 8)?.try_into().expect("8 bytes")))
}

/// Decodes the raw tensors of a checkpoint.
pub fn decode(mut bytes: &[u8]) -> Result<Vec<DMatrix<f64>>> {
    if take(&mut bytes, 8)? != MAGIC {
        return Err(Error::Config("not a parameter checkpoint (bad magic)".into()));
    }
    let version = read_u32(&mut bytes)?;
    if version != VERSION {
        return Err(Error::Config(format!("unsupported checkpoint version {version}")));
    }
    let count = read_u32(&mut bytes)? as usize;
    let mut shapes = Vec::with_capacity(count);
    for _ in 0..count {
        shapes.push((read_u64(&mut bytes)? as usize, read_u64(&mut bytes)? as usize));
    }
    let mut tensors = Vec::with_capacity(count);
    for (rows, cols) in shapes {
        let mut values = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            values.push(f64::from_le_bytes(take(&mut bytes, 8)?.try_into().expect("8 bytes")));
        }
        tensors.push(DMatrix::from_row_slice(rows, cols, &values));
    }
    if !bytes.is_empty() {
        return Err(Error::Config("trailing bytes after checkpoint data".into()));
    }
    Ok(tensors)
}

pub fn save_checkpoint(params: &ModelParams, model: &ModelConfig, path: &Path) -> Result<()> {
    let tensors = params.tensors();
    let (input_dim, num_classes) = (tensors[0].1.nrows(), tensors[1].1.ncols());
    let meta = CheckpointMeta {
        model: *model,
        input_dim,
        num_classes,
        tensors: tensors.iter().map(|(n, _)| n.to_string()).collect(),
    };
    std::fs::write(path, encode(params)).map_err(|e| Error::io(path, e))?;
    let mp = meta_path(path);
    let json = serde_json::to_string_pretty(&meta).expect("meta serializes");
    std::fs::write(&mp, json).map_err(|e| Error::io(mp, e))
}

pub fn load_checkpoint(path: &Path) -> Result<(ModelParams, CheckpointMeta)> {
    let mp = meta_path(path);
    let meta_text = std::fs::read_to_string(&mp).map_err(|e| Error::io(&mp, e))?;
    let meta: CheckpointMeta =
        serde_json::from_str(&meta_text).map_err(|source| Error::Json { path: mp, source })?;
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut tensors = decode(&bytes)?.into_iter();
    let mut next = |name: &str| {
        tensors
            .next()
            .ok_or_else(|| Error::Config(format!("checkpoint is missing tensor {name}")))
    };
    let params = match meta.model.kind {
        ModelKind::Gcn => ModelParams::Gcn(GcnParams {
            w1: next("w1")?,
            w2: next("w2")?,
        }),
        ModelKind::Gprgnn => {
            let mlp_w1 = next("mlp_w1")?;
            let mlp_w2 = next("mlp_w2")?;
            let g = next("gpr_coeffs")?;
            ModelParams::Gprgnn(GprgnnParams {
                mlp_w1,
                mlp_w2,
                gpr_coeffs: DVector::from_column_slice(g.as_slice()),
            })
        }
    };
    Ok((params, meta))
}
