//! Binary tensor file shared by the loss and ROI kernels.
//!
//! Layout, all little-endian: a `u32` rank, `rank` dimension sizes as `u64`,
//! then the values as `f64` in row-major order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TensorIoError {
    #[error("failed to access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("tensor file truncated while reading {0}")]
    Truncated(&'static str),
    #[error("dimensions {dims:?} imply {expected} values but data length is {actual}")]
    SizeMismatch {
        dims: Vec<u64>,
        expected: u64,
        actual: u64,
    },
    #[error("tensor rank {0} is unreasonably large")]
    BadRank(u32),
}

pub fn write_tensor(path: &Path, dims: &[u64], data: &[f64]) -> Result<(), TensorIoError> {
    let expected: u64 = dims.iter().product();
    if expected != data.len() as u64 {
        return Err(TensorIoError::SizeMismatch {
            dims: dims.to_vec(),
            expected,
            actual: data.len() as u64,
        });
    }
    let io_err = |source| TensorIoError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    out.write_all(&(dims.len() as u32).to_le_bytes())
        .map_err(io_err)?;
    for &d in dims {
        out.write_all(&d.to_le_bytes()).map_err(io_err)?;
    }
    for &v in data {
        out.write_all(&v.to_le_bytes()).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn read_tensor(path: &Path) -> Result<(Vec<u64>, Vec<f64>), TensorIoError> {
    let io_err = |source| TensorIoError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut input = BufReader::new(File::open(path).map_err(io_err)?);

    let mut buf4 = [0u8; 4];
    input
        .read_exact(&mut buf4)
        .map_err(|_| TensorIoError::Truncated("rank"))?;
    let rank = u32::from_le_bytes(buf4);
    if rank > 8 {
        return Err(TensorIoError::BadRank(rank));
    }

    let mut buf8 = [0u8; 8];
    let mut dims = Vec::with_capacity(rank as usize);
    for _ in 0..rank {
        input
            .read_exact(&mut buf8)
            .map_err(|_| TensorIoError::Truncated("dims"))?;
        dims.push(u64::from_le_bytes(buf8));
    }

    let count: u64 = dims.iter().product();
    let mut data = Vec::with_capacity(count as usize);
    for _ in 0..count {
        input
            .read_exact(&mut buf8)
            .map_err(|_| TensorIoError::Truncated("values"))?;
        data.push(f64::from_le_bytes(buf8));
    }
    Ok((dims, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.bin");
        let dims = vec![2, 3, 4];
        let data: Vec<f64> = (0..24).map(|i| i as f64 * 0.125 - 1.0).collect();
        write_tensor(&path, &dims, &data).unwrap();
        let (d, v) = read_tensor(&path).unwrap();
        assert_eq!(d, dims);
        assert_eq!(v, data);
    }

    #[test]
    fn truncated_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.bin");
        write_tensor(&path, &[4], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let full = std::fs::read(&path).unwrap();
        std::fs::write(&path, &full[..full.len() - 8]).unwrap();
        assert!(matches!(
            read_tensor(&path),
            Err(TensorIoError::Truncated("values"))
        ));
    }

    #[test]
    fn size_mismatch_rejected_on_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.bin");
        assert!(matches!(
            write_tensor(&path, &[3], &[1.0]),
            Err(TensorIoError::SizeMismatch { .. })
        ));
    }
}
