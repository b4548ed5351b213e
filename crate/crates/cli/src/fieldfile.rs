//! Portable binary field files for checkpoints and reference states.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! offset 0   8 bytes   magic "RNLSFLD1"
//! offset 8   1 byte    dimension (1 or 2)
//! offset 9   1 byte    boundary code: 0 Dirichlet sine, 1 periodic Fourier
//! then, per axis       f64 a, f64 b, u32 n
//! then, per point      f64 re, f64 im, row-major over collocation points
//! ```
//!
//! `n` is the axis cell count of the grid spec; the Dirichlet grid stores
//! its n - 1 interior points, the periodic grid all n. The payload is the
//! raw IEEE-754 bit pattern of each value, so a round trip reproduces the
//! field bit for bit, and the reader rejects any trailing bytes.

use std::path::Path;

use rnls_core::{Boundary, Complex64, Field, Grid, GridSpec};

use crate::CliError;

pub const MAGIC: &[u8; 8] = b"RNLSFLD1";

fn format_err(offset: usize, msg: impl Into<String>) -> CliError {
    CliError::Format {
        offset,
        msg: msg.into(),
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], CliError> {
        let have = self.buf.len() - self.pos;
        if have < n {
            return Err(format_err(
                self.pos,
                format!("truncated while reading {what}: expected {n} bytes, found {have}"),
            ));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self, what: &str) -> Result<u8, CliError> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<u32, CliError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64, CliError> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

/// Reads a field file. Malformed headers, truncation and trailing garbage
/// all come back as [`CliError::Format`] with the byte offset.
pub fn read_field(path: &Path) -> Result<Field, CliError> {
    let buf = std::fs::read(path)?;
    let mut r = Reader { buf: &buf, pos: 0 };

    let magic = r.take(8, "magic")?;
    if magic != MAGIC {
        return Err(format_err(
            0,
            format!("bad magic {:?}, expected {:?}", magic, MAGIC),
        ));
    }
    let dim_offset = r.pos;
    let dim = r.u8("dimension")?;
    if dim != 1 && dim != 2 {
        return Err(format_err(
            dim_offset,
            format!("unsupported dimension {dim}, expected 1 or 2"),
        ));
    }
    let boundary_offset = r.pos;
    let boundary = match r.u8("boundary code")? {
        0 => Boundary::DirichletSine,
        1 => Boundary::PeriodicFourier,
        other => {
            return Err(format_err(
                boundary_offset,
                format!("unknown boundary code {other}, expected 0 (sine) or 1 (Fourier)"),
            ))
        }
    };

    let axes_offset = r.pos;
    let mut axes = Vec::with_capacity(dim as usize);
    for i in 0..dim as usize {
        let a = r.f64(&format!("axis {i} left endpoint"))?;
        let b = r.f64(&format!("axis {i} right endpoint"))?;
        let n = r.u32(&format!("axis {i} cell count"))? as usize;
        axes.push((a, b, n));
    }
    let spec = match (dim, boundary) {
        (1, Boundary::DirichletSine) => GridSpec::sine_1d(axes[0].0, axes[0].1, axes[0].2),
        (1, Boundary::PeriodicFourier) => GridSpec::fourier_1d(axes[0].0, axes[0].1, axes[0].2),
        (2, Boundary::PeriodicFourier) => GridSpec::fourier_2d(
            (axes[0].0, axes[1].0),
            (axes[0].1, axes[1].1),
            (axes[0].2, axes[1].2),
        ),
        (2, Boundary::DirichletSine) => {
            return Err(format_err(
                boundary_offset,
                "boundary code 0 (sine) is 1d only".to_string(),
            ))
        }
        _ => unreachable!("dimension was checked above"),
    };
    // Grid construction re-validates endpoints and counts; a rejection
    // here means inconsistent header metadata, not a config mistake.
    let grid = Grid::build(spec)
        .map_err(|e| format_err(axes_offset, format!("grid metadata rejected: {e}")))?;

    let n_points = grid.n_points();
    let payload_offset = r.pos;
    let expected = n_points * 16;
    let have = buf.len() - payload_offset;
    if have != expected {
        return Err(format_err(
            payload_offset,
            format!(
                "payload for {n_points} points: expected {expected} bytes, found {have}"
            ),
        ));
    }
    let mut values = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        let re = r.f64("value")?;
        let im = r.f64("value")?;
        values.push(Complex64::new(re, im));
    }
    Ok(Field::new(grid, values)?)
}

/// Writes a field file in the layout above.
pub fn write_field(field: &Field, path: &Path) -> Result<(), CliError> {
    let spec = field.grid().spec();
    let mut buf = Vec::with_capacity(10 + spec.axes.len() * 20 + field.values().len() * 16);
    buf.extend_from_slice(MAGIC);
    buf.push(spec.dimension() as u8);
    buf.push(match spec.boundary {
        Boundary::DirichletSine => 0,
        Boundary::PeriodicFourier => 1,
    });
    for ax in &spec.axes {
        buf.extend_from_slice(&ax.a.to_le_bytes());
        buf.extend_from_slice(&ax.b.to_le_bytes());
        buf.extend_from_slice(&u32::try_from(ax.n).map_err(|_| {
            CliError::Config(format!("axis cell count {} exceeds the file format", ax.n))
        })?.to_le_bytes());
    }
    for v in field.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    std::fs::write(path, buf)?;
    Ok(())
}
