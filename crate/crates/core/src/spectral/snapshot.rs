//! `BSNAP1` binary snapshots: a small little-endian header followed by the
//! raw complex coefficients.
//!
//! ```text
//! "BSNAP1" | u8 n | u32 N | f64 L | u8 components | components * N^n * (f64 re, f64 im)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{GridSpec, SpectralField};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 6] = b"BSNAP1";

pub fn write_to(field: &SpectralField, mut w: impl Write) -> Result<()> {
    let grid = field.grid();
    let components = u8::try_from(field.components())
        .map_err(|_| Error::Snapshot(format!("{} components do not fit the header", field.components())))?;
    w.write_all(MAGIC)?;
    w.write_all(&[grid.dim() as u8])?;
    w.write_all(&(grid.size() as u32).to_le_bytes())?;
    w.write_all(&grid.length().to_le_bytes())?;
    w.write_all(&[components])?;
    for c in field.coeffs() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_from(mut r: impl Read) -> Result<SpectralField> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Snapshot("truncated header".into()))?;
    if &magic != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let mut b1 = [0u8; 1];
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b1)?;
    let dim = b1[0] as usize;
    r.read_exact(&mut b4)?;
    let size = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b8)?;
    let length = f64::from_le_bytes(b8);
    r.read_exact(&mut b1)?;
    let components = b1[0] as usize;
    if components == 0 {
        return Err(Error::Snapshot("zero components".into()));
    }
    let grid = GridSpec::new(dim, size, length)?;
    let count = components * grid.num_points();
    let mut raw = vec![0u8; count * 16];
    r.read_exact(&mut raw)
        .map_err(|_| Error::Snapshot(format!("expected {count} coefficients")))?;
    let coeffs = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    SpectralField::from_coeffs(grid, components, coeffs)
}

pub fn save(field: &SpectralField, path: impl AsRef<Path>) -> Result<()> {
    write_to(field, BufWriter::new(File::create(path)?))
}

pub fn load(path: impl AsRef<Path>) -> Result<SpectralField> {
    read_from(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = GridSpec::new(3, 4, 1.5).unwrap();
        let f = SpectralField::from_fn(g, 3, |x, c| (x[0] + c as f64).sin() * x[2].cos());
        let mut buf = Vec::new();
        write_to(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 6 + 1 + 4 + 8 + 1 + 3 * 64 * 16);
        let back = read_from(buf.as_slice()).unwrap();
        assert!(back.grid().same_as(&g));
        assert_eq!(back.components(), 3);
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        assert!(matches!(read_from(&b"BSNAP2xxxxxxx"[..]), Err(Error::Snapshot(_))));
        let g = GridSpec::new(2, 4, 1.0).unwrap();
        let mut buf = Vec::new();
        write_to(&SpectralField::zeros(g, 1), &mut buf).unwrap();
        buf.truncate(buf.len() - 1);
        assert!(read_from(buf.as_slice()).is_err());
    }
}
