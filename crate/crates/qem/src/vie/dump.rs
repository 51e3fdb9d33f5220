//! Debug dumps of VIE matrices and vectors.
//!
//! Layout (little-endian): 7-byte magic `QEMVIE1`, u64 element count `N`,
//! then `N * N` (matrix, row-major) or `N` (vector) complex doubles as
//! `(re: f64, im: f64)` pairs.

use std::io::{Read, Write};
use std::path::Path;

use crate::Complex;

use super::VieError;

const MAGIC: &[u8; 7] = b"QEMVIE1";

fn io_err(path: &Path, source: std::io::Error) -> VieError {
    VieError::Io { path: path.display().to_string(), source }
}

/// Write a dense matrix (given column-major, as stored by the system) in the
/// documented row-major layout.
pub fn write_matrix_dump(
    path: impl AsRef<Path>,
    n: usize,
    col_major: &[Complex],
) -> Result<(), VieError> {
    let path = path.as_ref();
    assert_eq!(col_major.len(), n * n);
    let mut f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut buf = Vec::with_capacity(7 + 8 + 16 * n * n);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    for row in 0..n {
        for col in 0..n {
            let z = col_major[col * n + row];
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    f.write_all(&buf).map_err(|e| io_err(path, e))
}

/// Read a matrix dump; returns `(n, row-major entries)`.
pub fn read_matrix_dump(path: impl AsRef<Path>) -> Result<(usize, Vec<Complex>), VieError> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| io_err(path, e))?;
    let (n, data) = parse_header(path, &bytes)?;
    let want = n * n;
    parse_complexes(path, data, want).map(|v| (n, v))
}

/// Write a vector in the same layout (count = length).
pub fn write_vector_dump(path: impl AsRef<Path>, v: &[Complex]) -> Result<(), VieError> {
    let path = path.as_ref();
    let mut f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut buf = Vec::with_capacity(7 + 8 + 16 * v.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(v.len() as u64).to_le_bytes());
    for z in v {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    f.write_all(&buf).map_err(|e| io_err(path, e))
}

/// Read a vector dump.
pub fn read_vector_dump(path: impl AsRef<Path>) -> Result<Vec<Complex>, VieError> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| io_err(path, e))?;
    let (n, data) = parse_header(path, &bytes)?;
    parse_complexes(path, data, n)
}

fn parse_header<'a>(path: &Path, bytes: &'a [u8]) -> Result<(usize, &'a [u8]), VieError> {
    if bytes.len() < 15 || &bytes[..7] != MAGIC {
        return Err(VieError::BadDump {
            path: path.display().to_string(),
            message: "missing QEMVIE1 magic".into(),
        });
    }
    let n = u64::from_le_bytes(bytes[7..15].try_into().unwrap()) as usize;
    Ok((n, &bytes[15..]))
}

fn parse_complexes(path: &Path, data: &[u8], want: usize) -> Result<Vec<Complex>, VieError> {
    if data.len() != 16 * want {
        return Err(VieError::BadDump {
            path: path.display().to_string(),
            message: format!("expected {} complex doubles, found {} bytes", want, data.len()),
        });
    }
    Ok(data
        .chunks_exact(16)
        .map(|c| {
            Complex::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let n = 3;
        let col_major: Vec<Complex> =
            (0..9).map(|i| Complex::new(i as f64, -(i as f64) * 0.5)).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.qemvie");
        write_matrix_dump(&path, n, &col_major).unwrap();
        let (back_n, row_major) = read_matrix_dump(&path).unwrap();
        assert_eq!(back_n, n);
        for r in 0..n {
            for c in 0..n {
                assert_eq!(row_major[r * n + c], col_major[c * n + r]);
            }
        }
        // layout bytes: magic + u64 + first entry = col_major[0]
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..7], b"QEMVIE1");
        assert_eq!(u64::from_le_bytes(bytes[7..15].try_into().unwrap()), 3);
    }

    #[test]
    fn vector_round_trip_and_bad_magic() {
        let v: Vec<Complex> = (0..5).map(|i| Complex::new(0.25 * i as f64, i as f64)).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.qemvie");
        write_vector_dump(&path, &v).unwrap();
        assert_eq!(read_vector_dump(&path).unwrap(), v);
        std::fs::write(&path, b"NOTMAGIC").unwrap();
        assert!(matches!(read_vector_dump(&path), Err(VieError::BadDump { .. })));
    }
}
