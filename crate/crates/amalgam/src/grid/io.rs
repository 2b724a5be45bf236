//! Binary and plain-text encodings of [`GridFunction`].
//!
//! Binary layout, all integers and floats little-endian:
//!
//! | bytes | field                                          |
//! |-------|------------------------------------------------|
//! | 4     | magic `GRDF`                                   |
//! | 2     | format version (`1`)                           |
//! | 1     | dimension (`1`)                                |
//! | 1     | domain (`0` time, `1` frequency)               |
//! | 8     | extent `L` as f64                              |
//! | 8     | sample count `M` as u64                        |
//! | 1     | precision: bytes per real component (`4`/`8`)  |
//! | ...   | `M` complex samples as (re, im) pairs          |
//!
//! The text form is a header of `key value` lines followed by one
//! `re im` pair per line; see [`write_text`].

use std::io::{self, BufRead, Read, Write};

use num_complex::Complex64;
use thiserror::Error;

use super::{Domain, GridError, GridFunction, GridSpec};

pub const MAGIC: &[u8; 4] = b"GRDF";
pub const VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a grid-function record (bad magic)")]
    BadMagic,
    #[error("unsupported format version {0}")]
    Version(u16),
    #[error("unsupported dimension {0}")]
    Dimension(u8),
    #[error("bad header field: {0}")]
    Header(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Single,
    Double,
}

impl Precision {
    fn width(self) -> u8 {
        match self {
            Precision::Single => 4,
            Precision::Double => 8,
        }
    }
}

fn domain_code(d: Domain) -> u8 {
    match d {
        Domain::Time => 0,
        Domain::Frequency => 1,
    }
}

pub fn write_binary(
    f: &GridFunction,
    precision: Precision,
    mut w: impl Write,
) -> Result<(), FormatError> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[1, domain_code(f.domain())])?;
    w.write_all(&f.spec().extent().to_le_bytes())?;
    w.write_all(&(f.spec().samples() as u64).to_le_bytes())?;
    w.write_all(&[precision.width()])?;
    let mut buf = Vec::with_capacity(f.values().len() * 2 * precision.width() as usize);
    for v in f.values() {
        match precision {
            Precision::Single => {
                buf.extend_from_slice(&(v.re as f32).to_le_bytes());
                buf.extend_from_slice(&(v.im as f32).to_le_bytes());
            }
            Precision::Double => {
                buf.extend_from_slice(&v.re.to_le_bytes());
                buf.extend_from_slice(&v.im.to_le_bytes());
            }
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_array<const N: usize>(r: &mut impl Read) -> io::Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_binary(mut r: impl Read) -> Result<GridFunction, FormatError> {
    if &read_array::<4>(&mut r)? != MAGIC {
        return Err(FormatError::BadMagic);
    }
    let version = u16::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(FormatError::Version(version));
    }
    let [dim, domain] = read_array::<2>(&mut r)?;
    if dim != 1 {
        return Err(FormatError::Dimension(dim));
    }
    let domain = match domain {
        0 => Domain::Time,
        1 => Domain::Frequency,
        other => return Err(FormatError::Header(format!("domain code {other}"))),
    };
    let extent = f64::from_le_bytes(read_array(&mut r)?);
    let samples = u64::from_le_bytes(read_array(&mut r)?);
    let samples =
        usize::try_from(samples).map_err(|_| FormatError::Header(format!("samples {samples}")))?;
    let spec = GridSpec::new(extent, samples)?;
    let [width] = read_array::<1>(&mut r)?;
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let v = match width {
            4 => Complex64::new(
                f32::from_le_bytes(read_array(&mut r)?) as f64,
                f32::from_le_bytes(read_array(&mut r)?) as f64,
            ),
            8 => Complex64::new(
                f64::from_le_bytes(read_array(&mut r)?),
                f64::from_le_bytes(read_array(&mut r)?),
            ),
            other => return Err(FormatError::Header(format!("precision {other}"))),
        };
        values.push(v);
    }
    Ok(GridFunction::new(spec, domain, values)?)
}

/// Writes
///
/// ```text
/// grid-function 1
/// extent 64
/// samples 16384
/// domain time
/// <re> <im>
/// ...
/// ```
///
/// with shortest round-trip float formatting, so reading back is exact.
pub fn write_text(f: &GridFunction, mut w: impl Write) -> Result<(), FormatError> {
    let domain = match f.domain() {
        Domain::Time => "time",
        Domain::Frequency => "frequency",
    };
    writeln!(w, "grid-function {VERSION}")?;
    writeln!(w, "extent {}", f.spec().extent())?;
    writeln!(w, "samples {}", f.spec().samples())?;
    writeln!(w, "domain {domain}")?;
    for v in f.values() {
        writeln!(w, "{} {}", v.re, v.im)?;
    }
    Ok(())
}

pub fn read_text(r: impl BufRead) -> Result<GridFunction, FormatError> {
    let mut lines = r.lines();
    let mut header = |key: &str| -> Result<String, FormatError> {
        let line = lines
            .next()
            .ok_or_else(|| FormatError::Header(format!("missing {key}")))??;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok(v.trim().to_string()),
            _ => Err(FormatError::Header(line)),
        }
    };
    let version: u16 = header("grid-function")?
        .parse()
        .map_err(|_| FormatError::Header("version".into()))?;
    if version != VERSION {
        return Err(FormatError::Version(version));
    }
    let extent: f64 = header("extent")?
        .parse()
        .map_err(|_| FormatError::Header("extent".into()))?;
    let samples: usize = header("samples")?
        .parse()
        .map_err(|_| FormatError::Header("samples".into()))?;
    let domain = match header("domain")?.as_str() {
        "time" => Domain::Time,
        "frequency" => Domain::Frequency,
        other => return Err(FormatError::Header(format!("domain {other}"))),
    };
    let spec = GridSpec::new(extent, samples)?;
    let mut values = Vec::with_capacity(samples);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace().map(str::parse::<f64>);
        match (parts.next(), parts.next(), parts.next()) {
            (Some(Ok(re)), Some(Ok(im)), None) => values.push(Complex64::new(re, im)),
            _ => return Err(FormatError::Header(format!("sample line `{line}`"))),
        }
    }
    Ok(GridFunction::new(spec, domain, values)?)
}
