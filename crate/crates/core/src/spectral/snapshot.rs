//! Binary field snapshots.
//!
//! Layout, all little-endian: magic `CSNS`, format version `u32`, points per
//! axis `u32`, period `f64`, component count `u32`, then for each component the
//! `n^3` coefficients as `(re, im)` `f64` pairs in row-major FFT index order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;

use super::field::SpectralField;
use super::grid::PeriodicGrid;
use crate::error::{CsnsError, Result};

pub const MAGIC: &[u8; 4] = b"CSNS";
pub const FORMAT_VERSION: u32 = 1;

pub fn encode_snapshot(u: &SpectralField) -> Vec<u8> {
    let g = u.grid();
    let mut out = Vec::with_capacity(24 + 16 * g.len() * u.ncomp());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(g.n() as u32).to_le_bytes());
    out.extend_from_slice(&g.period().to_le_bytes());
    out.extend_from_slice(&(u.ncomp() as u32).to_le_bytes());
    for c in u.components() {
        for z in c {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

fn take<'a>(bytes: &mut &'a [u8], n: usize) -> Result<&'a [u8]> {
    if bytes.len() < n {
        return Err(CsnsError::Format("snapshot truncated".into()));
    }
    let (head, tail) = bytes.split_at(n);
    *bytes = tail;
    Ok(head)
}

fn u32_at(bytes: &mut &[u8]) -> Result<u32> {
    Ok(u32::from_le_bytes(take(bytes, 4)?.try_into().unwrap()))
}

fn f64_at(bytes: &mut &[u8]) -> Result<f64> {
    Ok(f64::from_le_bytes(take(bytes, 8)?.try_into().unwrap()))
}

/// Decode a snapshot onto a grid with the default dealias fraction.
pub fn decode_snapshot(mut bytes: &[u8]) -> Result<SpectralField> {
    if take(&mut bytes, 4)? != MAGIC {
        return Err(CsnsError::Format("bad magic".into()));
    }
    let version = u32_at(&mut bytes)?;
    if version != FORMAT_VERSION {
        return Err(CsnsError::Format(format!(
            "unsupported snapshot version {version}"
        )));
    }
    let n = u32_at(&mut bytes)? as usize;
    let period = f64_at(&mut bytes)?;
    let ncomp = u32_at(&mut bytes)? as usize;
    let grid = PeriodicGrid::new(n, period)?;
    let mut comps = Vec::with_capacity(ncomp);
    for _ in 0..ncomp {
        let mut c = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let re = f64_at(&mut bytes)?;
            let im = f64_at(&mut bytes)?;
            c.push(Complex64::new(re, im));
        }
        comps.push(c);
    }
    if !bytes.is_empty() {
        return Err(CsnsError::Format("trailing bytes after snapshot".into()));
    }
    SpectralField::from_coefficients(&grid, comps)
}

pub fn write_snapshot(path: &Path, u: &SpectralField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode_snapshot(u))?;
    w.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<SpectralField> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode_snapshot(&bytes)
}
