//! IDX container parsing (the MNIST distribution format).
//!
//! Images file: magic 0x00000803, then counts and dimensions, all 32-bit
//! big-endian, then one unsigned byte per pixel. Labels file: magic
//! 0x00000801, count, then one byte per label. Image `i` is flattened
//! row-major into column `i` of the feature matrix.

use crate::error::{Error, Result};
use crate::mat::Mat;
use std::fs::File;
use std::io::Read;
use std::path::Path;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

/// Whether pixel bytes are rescaled on load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Divide by 255 so pixels land in [0, 1]. The default; activation
    /// ranges want inputs of roughly unit scale.
    #[default]
    UnitInterval,
    /// Keep raw byte values 0..=255.
    None,
}

struct IdxReader {
    path: String,
    bytes: Vec<u8>,
    pos: usize,
}

impl IdxReader {
    fn open(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
        Ok(IdxReader {
            path: path.display().to_string(),
            bytes,
            pos: 0,
        })
    }

    fn read_u32_be(&mut self, what: &str) -> Result<u32> {
        if self.pos + 4 > self.bytes.len() {
            return Err(Error::Data {
                path: self.path.clone(),
                detail: format!(
                    "truncated while reading {} at offset {}: need 4 bytes, {} remain",
                    what,
                    self.pos,
                    self.bytes.len() - self.pos
                ),
            });
        }
        let v = u32::from_be_bytes(self.bytes[self.pos..self.pos + 4].try_into().unwrap());
        self.pos += 4;
        Ok(v)
    }

    fn expect_magic(&mut self, expected: u32) -> Result<()> {
        let offset = self.pos;
        let got = self.read_u32_be("magic number")?;
        if got != expected {
            return Err(Error::Data {
                path: self.path.clone(),
                detail: format!(
                    "bad magic number at offset {}: got 0x{:08x}, expected 0x{:08x}",
                    offset, got, expected
                ),
            });
        }
        Ok(())
    }

    fn payload(&self, expected_len: usize) -> Result<&[u8]> {
        let available = self.bytes.len() - self.pos;
        if available < expected_len {
            return Err(Error::Data {
                path: self.path.clone(),
                detail: format!(
                    "truncated payload: expected {} bytes after the header, found {}",
                    expected_len, available
                ),
            });
        }
        Ok(&self.bytes[self.pos..self.pos + expected_len])
    }
}

/// Loads an IDX image/label pair into `(features, labels)`.
///
/// Features come out as `(rows*cols) x n` with image `i` flattened
/// row-major into column `i`, scaled per `normalization`.
pub fn read_idx(
    images_path: &Path,
    labels_path: &Path,
    normalization: Normalization,
) -> Result<(Mat, Vec<usize>)> {
    let mut images = IdxReader::open(images_path)?;
    images.expect_magic(IMAGES_MAGIC)?;
    let n_images = images.read_u32_be("image count")? as usize;
    let height = images.read_u32_be("image height")? as usize;
    let width = images.read_u32_be("image width")? as usize;
    let dim = height * width;
    let pixels = images.payload(n_images * dim)?;

    let mut labels_file = IdxReader::open(labels_path)?;
    labels_file.expect_magic(LABELS_MAGIC)?;
    let n_labels = labels_file.read_u32_be("label count")? as usize;
    if n_labels != n_images {
        return Err(Error::Data {
            path: labels_path.display().to_string(),
            detail: format!(
                "label count {} does not match image count {}",
                n_labels, n_images
            ),
        });
    }
    let label_bytes = labels_file.payload(n_labels)?;

    let scale = match normalization {
        Normalization::UnitInterval => 1.0 / 255.0,
        Normalization::None => 1.0,
    };
    // Column j = image j; transpose the sample-major byte layout.
    let mut features = Mat::zeros(dim, n_images);
    for j in 0..n_images {
        let img = &pixels[j * dim..(j + 1) * dim];
        for (i, &b) in img.iter().enumerate() {
            features[(i, j)] = b as f64 * scale;
        }
    }
    let labels = label_bytes.iter().map(|&b| b as usize).collect();
    Ok((features, labels))
}

/// Writes an IDX image/label pair; the inverse of [`read_idx`] for byte
/// data. Mostly useful for building fixtures.
pub fn write_idx(
    images_path: &Path,
    labels_path: &Path,
    images: &[Vec<u8>],
    height: usize,
    width: usize,
    labels: &[u8],
) -> Result<()> {
    let io_err = |path: &Path, source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut img_bytes = Vec::new();
    img_bytes.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
    img_bytes.extend_from_slice(&(images.len() as u32).to_be_bytes());
    img_bytes.extend_from_slice(&(height as u32).to_be_bytes());
    img_bytes.extend_from_slice(&(width as u32).to_be_bytes());
    for img in images {
        img_bytes.extend_from_slice(img);
    }
    std::fs::write(images_path, img_bytes).map_err(|e| io_err(images_path, e))?;

    let mut lbl_bytes = Vec::new();
    lbl_bytes.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    lbl_bytes.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    lbl_bytes.extend_from_slice(labels);
    std::fs::write(labels_path, lbl_bytes).map_err(|e| io_err(labels_path, e))
}
