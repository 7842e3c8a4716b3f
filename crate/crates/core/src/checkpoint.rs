//! Binary snapshots of a scalar field.
//!
//! Layout, all little-endian: magic `VSSC`, version `u32`, grid kind `u8`
//! (0 doubled torus, 1 strip), `n1` and `n2` as `u32`, time and epsilon as
//! `f64`, then the row-major values. For a strip `n2` is the resolution of
//! the doubled torus, so the strip holds `n1 * (n2 / 2 + 1)` values.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::{DomainKind, Parity, ParityClass, TorusGrid};

pub const MAGIC: &[u8; 4] = b"VSSC";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub t: f64,
    pub epsilon: f64,
    pub field: ScalarField,
}

fn fail(path: &Path, reason: impl Into<String>) -> Error {
    Error::Checkpoint { path: path.to_path_buf(), reason: reason.into() }
}

pub fn write_checkpoint(path: &Path, field: &ScalarField, t: f64, epsilon: f64) -> Result<()> {
    let g = field.grid();
    let mut buf = Vec::with_capacity(33 + 8 * g.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(match g.kind() {
        DomainKind::DoubledTorus => 0,
        DomainKind::Strip => 1,
    });
    buf.extend_from_slice(&(g.n1() as u32).to_le_bytes());
    buf.extend_from_slice(&(g.n2() as u32).to_le_bytes());
    buf.extend_from_slice(&t.to_le_bytes());
    buf.extend_from_slice(&epsilon.to_le_bytes());
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    // write then rename so a crash never leaves a truncated file under the final name
    let tmp: PathBuf = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(&buf)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Reads a checkpoint; vorticity on a strip is tagged odd in `x1`.
pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .map_err(|e| fail(path, e.to_string()))?
        .read_to_end(&mut bytes)
        .map_err(|e| fail(path, e.to_string()))?;
    if bytes.len() < 33 {
        return Err(fail(path, format!("truncated header ({} bytes)", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(fail(path, "bad magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(fail(path, format!("version {version}, expected {VERSION}")));
    }
    let kind = match bytes[8] {
        0 => DomainKind::DoubledTorus,
        1 => DomainKind::Strip,
        k => return Err(fail(path, format!("unknown grid kind {k}"))),
    };
    let (n1, n2) = (u32_at(9) as usize, u32_at(13) as usize);
    let grid = TorusGrid::new(n1, n2, kind).map_err(|e| fail(path, e.to_string()))?;
    let (t, epsilon) = (f64_at(17), f64_at(25));
    let body = &bytes[33..];
    if body.len() != 8 * grid.len() {
        return Err(fail(path, format!("{} value bytes for {} points", body.len(), grid.len())));
    }
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let parity = match kind {
        DomainKind::Strip => ParityClass::new(Parity::Odd, Parity::None),
        DomainKind::DoubledTorus => ParityClass::ODD_ODD,
    };
    let field = ScalarField::new(grid, values, parity).map_err(|e| fail(path, e.to_string()))?;
    Ok(Checkpoint { t, epsilon, field })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.vssc");
        let g = TorusGrid::strip(16, 16).unwrap();
        let f = ScalarField::from_fn(g, ParityClass::new(Parity::Odd, Parity::None), |x, y| {
            (std::f64::consts::PI * x).sin() * (1.0 + y) / 3.0
        })
        .unwrap();
        write_checkpoint(&p, &f, 0.125, 0.5).unwrap();
        let c = read_checkpoint(&p).unwrap();
        assert_eq!(c.t.to_bits(), 0.125f64.to_bits());
        assert_eq!(c.epsilon, 0.5);
        assert_eq!(c.field.values(), f.values());
        assert_eq!(*c.field.grid(), g);
    }

    #[test]
    fn corrupt_files_name_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.vssc");
        std::fs::write(&p, b"XXXX0000000000000000000000000000000000").unwrap();
        match read_checkpoint(&p) {
            Err(Error::Checkpoint { path, reason }) => {
                assert_eq!(path, p);
                assert!(reason.contains("magic"));
            }
            other => panic!("{other:?}"),
        }
        let g = TorusGrid::strip(16, 16).unwrap();
        write_checkpoint(&p, &ScalarField::zeros(g, ParityClass::NONE), 0.0, 1.0).unwrap();
        let mut bytes = std::fs::read(&p).unwrap();
        bytes[4] = 9;
        std::fs::write(&p, &bytes).unwrap();
        assert!(matches!(read_checkpoint(&p), Err(Error::Checkpoint { .. })));
    }
}
