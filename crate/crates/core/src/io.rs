//! File formats: density-matrix snapshots and CSV emission.
//!
//! Snapshots are little-endian binary with a 16-byte header
//! (4-byte magic "QRHO", u32 dimension, f64 time) followed by row-major
//! (re, im) f64 pairs; enough to restart an evolution exactly.

use crate::error::{QchaosError, Result};
use crate::lindblad::DensityMatrix;
use crate::{C64, CMat};
use ndarray::Array2;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const SNAPSHOT_MAGIC: &[u8; 4] = b"QRHO";

pub fn write_snapshot(path: &Path, time: f64, rho: &DensityMatrix) -> Result<()> {
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    w.write_all(SNAPSHOT_MAGIC).map_err(io_err)?;
    w.write_all(&(rho.dim() as u32).to_le_bytes()).map_err(io_err)?;
    w.write_all(&time.to_le_bytes()).map_err(io_err)?;
    for z in rho.data().iter() {
        w.write_all(&z.re.to_le_bytes()).map_err(io_err)?;
        w.write_all(&z.im.to_le_bytes()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_snapshot(path: &Path) -> Result<(f64, DensityMatrix)> {
    let file = File::open(path).map_err(io_err)?;
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(QchaosError::Domain("not a snapshot file (bad magic)".into()));
    }
    let mut dim_bytes = [0u8; 4];
    r.read_exact(&mut dim_bytes).map_err(io_err)?;
    let d = u32::from_le_bytes(dim_bytes) as usize;
    let mut time_bytes = [0u8; 8];
    r.read_exact(&mut time_bytes).map_err(io_err)?;
    let time = f64::from_le_bytes(time_bytes);

    let mut data: CMat = Array2::zeros((d, d));
    let mut pair = [0u8; 16];
    for i in 0..d {
        for j in 0..d {
            r.read_exact(&mut pair).map_err(io_err)?;
            let re = f64::from_le_bytes(pair[0..8].try_into().unwrap());
            let im = f64::from_le_bytes(pair[8..16].try_into().unwrap());
            data[[i, j]] = C64::new(re, im);
        }
    }
    Ok((time, DensityMatrix::new_unchecked(data)))
}

fn io_err(e: std::io::Error) -> QchaosError {
    QchaosError::Numeric(format!("io error: {e}"))
}

/// Write a CSV file with a header row; values format with Rust's shortest
/// round-trip representation, so identical inputs give identical bytes.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{}", header.join(",")).map_err(io_err)?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(w, "{}", line.join(",")).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}
