//! Self-describing binary container for field snapshots.
//!
//! Layout (little-endian):
//!
//! ```text
//! offset  size  content
//! 0       8     magic  b"SWFIELD\0"
//! 8       4     u32    format version (1)
//! 12      4     u32    d     spatial dimension
//! 16      4     u32    M     points per axis
//! 20      4     u32    C     components
//! 24      8     f64    L     period
//! 32      8     f64    eps   semiclassical parameter
//! 40      8     f64    t     snapshot time
//! 48      -     C*M^d complex samples, row-major over grid points
//!               (axis 0 slowest) with the C component values of each
//!               point adjacent; each sample is (re: f64, im: f64)
//! ```
//!
//! A plain-text sidecar `<path>.meta` repeats the header as `key = value`
//! lines for quick inspection.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::Field;
use super::grid::Grid;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"SWFIELD\0";
const VERSION: u32 = 1;

/// Write a snapshot taken at time `t` plus its `.meta` sidecar.
pub fn write_field(path: &Path, field: &Field, t: f64) -> Result<()> {
    let grid = field.grid();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    w.write_all(&(grid.points_per_axis() as u32).to_le_bytes())?;
    w.write_all(&(field.components() as u32).to_le_bytes())?;
    w.write_all(&grid.length().to_le_bytes())?;
    w.write_all(&grid.epsilon().to_le_bytes())?;
    w.write_all(&t.to_le_bytes())?;
    let n = grid.point_count();
    for p in 0..n {
        for c in 0..field.components() {
            let z = field.at(c, p);
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    w.flush()?;

    let meta = format!(
        "format = SWFIELD v{VERSION}\nd = {}\nM = {}\nC = {}\nL = {:.17e}\nepsilon = {:.17e}\nt = {:.17e}\n",
        grid.dim(),
        grid.points_per_axis(),
        field.components(),
        grid.length(),
        grid.epsilon(),
        t
    );
    std::fs::write(sidecar_path(path), meta)?;
    Ok(())
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    s.into()
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Read a snapshot; returns the field and its time stamp.
pub fn read_field(path: &Path) -> Result<(Field, f64)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::BadContainer("bad magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::BadContainer(format!("unsupported version {version}")));
    }
    let d = read_u32(&mut r)? as usize;
    let m = read_u32(&mut r)? as usize;
    let c = read_u32(&mut r)? as usize;
    let length = read_f64(&mut r)?;
    let eps = read_f64(&mut r)?;
    let t = read_f64(&mut r)?;
    let grid = Grid::new(d, m, length, eps)?;
    let n = grid.point_count();
    let mut field = Field::zeros(grid, c);
    for p in 0..n {
        for comp in 0..c {
            let re = read_f64(&mut r)?;
            let im = read_f64(&mut r)?;
            field.component_mut(comp)[p] = Complex64::new(re, im);
        }
    }
    Ok((field, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::random_band_limited;

    #[test]
    fn container_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.swf");
        let grid = Grid::new(2, 8, 3.5, 0.25).unwrap();
        let field = random_band_limited(&grid, 4, 77);
        write_field(&path, &field, 1.25).unwrap();
        let (back, t) = read_field(&path).unwrap();
        assert_eq!(t, 1.25);
        assert_eq!(back.components(), 4);
        assert_eq!(back.grid(), field.grid());
        for (a, b) in back.data().iter().zip(field.data().iter()) {
            assert_eq!(a, b, "round trip must be bit exact");
        }
        assert!(path.with_extension("swf.meta").exists() || sidecar_path(&path).exists());
    }

    #[test]
    fn rejects_foreign_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.swf");
        std::fs::write(&path, b"not a field at all").unwrap();
        assert!(read_field(&path).is_err());
    }
}
