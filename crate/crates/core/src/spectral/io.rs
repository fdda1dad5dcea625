//! Binary field files: `FKPI1`, then `length_x`, `length_y` (f64 LE),
//! `modes_x`, `modes_y` (u64 LE), then `(re, im)` f64 LE pairs in storage order.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{FrequencyGrid, SpectralField};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 5] = b"FKPI1";

pub fn write_field(w: &mut impl Write, f: &SpectralField) -> Result<()> {
    let g = f.grid();
    w.write_all(MAGIC)?;
    w.write_all(&g.length_x.to_le_bytes())?;
    w.write_all(&g.length_y.to_le_bytes())?;
    w.write_all(&(g.modes_x as u64).to_le_bytes())?;
    w.write_all(&(g.modes_y as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * g.len());
    for c in f.coeffs() {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read8(r: &mut impl Read) -> Result<[u8; 8]> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(b)
}

/// Reads a field; the real flag is set when the coefficients are exactly Hermitian.
pub fn read_field(r: &mut impl Read) -> Result<SpectralField> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let lx = f64::from_le_bytes(read8(r)?);
    let ly = f64::from_le_bytes(read8(r)?);
    let mx = u64::from_le_bytes(read8(r)?) as usize;
    let my = u64::from_le_bytes(read8(r)?) as usize;
    let grid = FrequencyGrid::new(lx, ly, mx, my).map_err(|e| Error::Format(e.to_string()))?;
    let mut raw = vec![0u8; 16 * grid.len()];
    r.read_exact(&mut raw)?;
    let coeffs: Vec<Complex64> = raw
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    let probe = SpectralField::from_coeffs(grid, coeffs.clone(), false)?;
    let real = probe.is_hermitian();
    SpectralField::from_coeffs(grid, coeffs, real)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_bits_and_reality() {
        let g = FrequencyGrid::new(3.0, 5.0, 8, 8).unwrap();
        let f = SpectralField::from_fn(g, true, |xi, eta| Complex64::new(xi.sin() + eta, xi * eta));
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        assert_eq!(&buf[..5], MAGIC);
        assert_eq!(buf.len(), 5 + 32 + 16 * g.len());
        let back = read_field(&mut buf.as_slice()).unwrap();
        assert_eq!(back, f);
        assert!(back.is_real());
    }

    #[test]
    fn rejects_bad_magic() {
        let buf = b"FKPI0xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx".to_vec();
        assert!(read_field(&mut buf.as_slice()).is_err());
    }
}
