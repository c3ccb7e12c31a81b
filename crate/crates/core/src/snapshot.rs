//! Binary field snapshots, used by every subcommand that persists state.
//!
//! Layout: magic `DNLS`, format version `u32`, dim `u32`, N `u32`,
//! L `f64`, representation tag `u8` (0 physical, 1 frequency), one `i8`
//! per dimension for the signature, then the row-major samples as
//! little-endian `(re, im)` `f64` pairs.

use crate::error::{Error, Result};
use crate::field::{FrequencyGrid, Representation, SignSignature, SpectralField};
use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: [u8; 4] = *b"DNLS";
pub const VERSION: u32 = 1;

pub fn write_field(path: &Path, field: &SpectralField, signature: &SignSignature) -> Result<()> {
    let grid = field.grid();
    if signature.len() != grid.dim() {
        return Err(Error::InvalidParameter(
            "snapshot signature length must match the grid dimension".into(),
        ));
    }
    let mut out = Vec::with_capacity(64 + 16 * grid.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.points_per_dim() as u32).to_le_bytes());
    out.extend_from_slice(&grid.half_length().to_le_bytes());
    out.push(match field.representation() {
        Representation::Physical => 0,
        Representation::Frequency => 1,
    });
    for &s in signature.signs() {
        out.push(s as u8);
    }
    for v in field.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&out)?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<(SpectralField, SignSignature)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut at = 0usize;
    let take = |at: &mut usize, n: usize| -> Result<&[u8]> {
        if *at + n > bytes.len() {
            return Err(Error::Snapshot("truncated header".into()));
        }
        let s = &bytes[*at..*at + n];
        *at += n;
        Ok(s)
    };
    if take(&mut at, 4)? != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let version = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap());
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let dim = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap()) as usize;
    let n = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap()) as usize;
    let l = f64::from_le_bytes(take(&mut at, 8)?.try_into().unwrap());
    let rep = match take(&mut at, 1)?[0] {
        0 => Representation::Physical,
        1 => Representation::Frequency,
        other => return Err(Error::Snapshot(format!("unknown representation tag {other}"))),
    };
    let mut signs = Vec::with_capacity(dim);
    for _ in 0..dim {
        signs.push(take(&mut at, 1)?[0] as i8);
    }
    let signature = SignSignature::new(signs)
        .map_err(|_| Error::Snapshot("invalid signature bytes".into()))?;
    let grid = FrequencyGrid::new(dim, n, l)
        .map_err(|e| Error::Snapshot(format!("invalid grid header: {e}")))?;
    let expected = grid.len() * 16;
    if bytes.len() - at != expected {
        return Err(Error::Snapshot(format!(
            "payload of {} bytes does not match the {expected} expected",
            bytes.len() - at
        )));
    }
    let mut values = Vec::with_capacity(grid.len());
    for chunk in bytes[at..].chunks_exact(16) {
        let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
        let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
        values.push(Complex64::new(re, im));
    }
    let field = SpectralField::from_values(&grid, rep, values)
        .map_err(|e| Error::Snapshot(format!("invalid payload: {e}")))?;
    Ok((field, signature))
}
