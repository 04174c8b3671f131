//! CSV and little-endian binary export of coefficient and leader pyramids.

use std::io::{self, Read, Write};

use super::{CoeffPyramid, LeaderPyramid};
use crate::real::Real;

pub const BINARY_MAGIC: [u8; 4] = *b"HLDR";
pub const BINARY_VERSION: u32 = 1;

/// Rows `j,k,c`, detail levels only.
pub fn write_coefficients_csv<T: Real, W: Write>(p: &CoeffPyramid<T>, mut w: W) -> io::Result<()> {
    writeln!(w, "j,k,c")?;
    for (j, level) in p.levels() {
        for (k, c) in level.iter().enumerate() {
            writeln!(w, "{j},{k},{:e}", c.as_f64())?;
        }
    }
    Ok(())
}

/// Rows `j,k,d`.
pub fn write_leaders_csv<T: Real, W: Write>(lp: &LeaderPyramid<T>, mut w: W) -> io::Result<()> {
    writeln!(w, "j,k,d")?;
    for (j, level) in lp.levels() {
        for (k, d) in level.iter().enumerate() {
            writeln!(w, "{j},{k},{:e}", d.as_f64())?;
        }
    }
    Ok(())
}

fn write_header<W: Write>(w: &mut W, n: u32, j_min: u32) -> io::Result<()> {
    w.write_all(&BINARY_MAGIC)?;
    w.write_all(&BINARY_VERSION.to_le_bytes())?;
    w.write_all(&n.to_le_bytes())?;
    w.write_all(&j_min.to_le_bytes())
}

fn write_values<'a, T: Real + 'a, W: Write>(w: &mut W, values: impl Iterator<Item = &'a T>) -> io::Result<()> {
    for v in values {
        w.write_all(&v.as_f64().to_le_bytes())?;
    }
    Ok(())
}

/// Header, then the `2^j_min` scaling coefficients, then each detail level.
pub fn write_coefficients_binary<T: Real, W: Write>(p: &CoeffPyramid<T>, mut w: W) -> io::Result<()> {
    write_header(&mut w, p.n(), p.j_min())?;
    write_values(&mut w, p.scaling().iter())?;
    for (_, level) in p.levels() {
        write_values(&mut w, level.iter())?;
    }
    Ok(())
}

/// Header, then each leader level from `j_min` to `n - 1`.
pub fn write_leaders_binary<T: Real, W: Write>(lp: &LeaderPyramid<T>, mut w: W) -> io::Result<()> {
    write_header(&mut w, lp.j_max() + 1, lp.j_min())?;
    for (_, level) in lp.levels() {
        write_values(&mut w, level.iter())?;
    }
    Ok(())
}

fn invalid(msg: String) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg)
}

fn read_header<R: Read>(r: &mut R) -> io::Result<(u32, u32)> {
    let mut buf = [0u8; 16];
    r.read_exact(&mut buf)?;
    if buf[..4] != BINARY_MAGIC {
        return Err(invalid("bad magic".into()));
    }
    let word = |i: usize| u32::from_le_bytes(buf[i..i + 4].try_into().expect("4 bytes"));
    if word(4) != BINARY_VERSION {
        return Err(invalid(format!("unsupported version {}", word(4))));
    }
    let (n, j_min) = (word(8), word(12));
    if j_min >= n || n > 40 {
        return Err(invalid(format!("inconsistent header n = {n}, j_min = {j_min}")));
    }
    Ok((n, j_min))
}

fn read_level<R: Read>(r: &mut R, len: usize) -> io::Result<Vec<f64>> {
    let mut buf = [0u8; 8];
    (0..len)
        .map(|_| {
            r.read_exact(&mut buf)?;
            Ok(f64::from_le_bytes(buf))
        })
        .collect()
}

pub fn read_coefficients_binary<R: Read>(mut r: R) -> io::Result<CoeffPyramid<f64>> {
    let (n, j_min) = read_header(&mut r)?;
    let scaling = read_level(&mut r, 1 << j_min)?;
    let details = (j_min..n)
        .map(|j| read_level(&mut r, 1 << j))
        .collect::<io::Result<Vec<_>>>()?;
    CoeffPyramid::from_levels(j_min, scaling, details).map_err(|e| invalid(e.to_string()))
}

pub fn read_leaders_binary<R: Read>(mut r: R) -> io::Result<LeaderPyramid<f64>> {
    let (n, j_min) = read_header(&mut r)?;
    let levels = (j_min..n)
        .map(|j| read_level(&mut r, 1 << j))
        .collect::<io::Result<Vec<_>>>()?;
    Ok(LeaderPyramid { j_min, levels })
}
