//! The `.ddlm` model container.
//!
//! A short text header followed by a binary payload:
//!
//! ```text
//! DDLM
//! version 1
//! activation tanh
//! levels 3
//! dims 784 200
//! dims 200 100
//! dims 100 50
//! data
//! <rows*cols f64 little-endian values per level, row-major, in order>
//! ```
//!
//! The payload bytes are the in-memory doubles verbatim, so a save/load
//! round trip is bit-exact.

use crate::activation::ActivationKind;
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::model::DdlModel;
use std::path::Path;

const MAGIC: &str = "DDLM";
const VERSION: u32 = 1;

fn data_err(path: &Path, detail: String) -> Error {
    Error::Data {
        path: path.display().to_string(),
        detail,
    }
}

/// Serializes a model to `path` in the `.ddlm` format.
pub fn save_model(model: &DdlModel, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    out.push_str(&format!("version {}\n", VERSION));
    out.push_str(&format!("activation {}\n", model.activation().name()));
    out.push_str(&format!("levels {}\n", model.n_levels()));
    for d in model.dicts() {
        out.push_str(&format!("dims {} {}\n", d.rows(), d.cols()));
    }
    out.push_str("data\n");

    let mut bytes = out.into_bytes();
    for d in model.dicts() {
        for &v in d.data() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads a model saved by [`save_model`], verifying the header and the
/// exact payload length.
pub fn load_model(path: &Path) -> Result<DdlModel> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;

    // The header is ASCII lines up to and including "data\n".
    let mut offset = 0usize;
    let mut next_line = || -> Result<String> {
        let rest = &bytes[offset..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| data_err(path, "corrupt header: unterminated line".into()))?;
        let line = std::str::from_utf8(&rest[..end])
            .map_err(|_| data_err(path, "corrupt header: non-UTF8 text".into()))?
            .to_string();
        offset += end + 1;
        Ok(line)
    };

    if next_line()? != MAGIC {
        return Err(data_err(path, format!("bad magic, expected '{}'", MAGIC)));
    }
    let version_line = next_line()?;
    let version: u32 = version_line
        .strip_prefix("version ")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| data_err(path, format!("corrupt version line '{}'", version_line)))?;
    if version != VERSION {
        return Err(data_err(
            path,
            format!("unsupported version {} (this build reads version {})", version, VERSION),
        ));
    }
    let act_line = next_line()?;
    let activation = act_line
        .strip_prefix("activation ")
        .ok_or_else(|| data_err(path, format!("corrupt activation line '{}'", act_line)))
        .and_then(ActivationKind::from_name)?;
    let levels_line = next_line()?;
    let levels: usize = levels_line
        .strip_prefix("levels ")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| data_err(path, format!("corrupt levels line '{}'", levels_line)))?;
    if levels == 0 {
        return Err(data_err(path, "model declares zero levels".into()));
    }

    let mut dims = Vec::with_capacity(levels);
    for _ in 0..levels {
        let line = next_line()?;
        let parts: Vec<&str> = line
            .strip_prefix("dims ")
            .map(|rest| rest.split(' ').collect())
            .unwrap_or_default();
        let (rows, cols) = match parts.as_slice() {
            [r, c] => (
                r.parse::<usize>()
                    .map_err(|_| data_err(path, format!("corrupt dims line '{}'", line)))?,
                c.parse::<usize>()
                    .map_err(|_| data_err(path, format!("corrupt dims line '{}'", line)))?,
            ),
            _ => return Err(data_err(path, format!("corrupt dims line '{}'", line))),
        };
        dims.push((rows, cols));
    }
    if next_line()? != "data" {
        return Err(data_err(path, "corrupt header: missing 'data' marker".into()));
    }

    let expected: usize = dims.iter().map(|(r, c)| r * c * 8).sum();
    let actual = bytes.len() - offset;
    if actual != expected {
        return Err(data_err(
            path,
            format!(
                "payload length mismatch: expected {} bytes, found {}",
                expected, actual
            ),
        ));
    }

    let mut dicts = Vec::with_capacity(levels);
    let mut cursor = offset;
    for (rows, cols) in dims {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            data.push(f64::from_le_bytes(
                bytes[cursor..cursor + 8].try_into().unwrap(),
            ));
            cursor += 8;
        }
        dicts.push(Mat::new(rows, cols, data)?);
    }
    DdlModel::new(dicts, activation)
}
