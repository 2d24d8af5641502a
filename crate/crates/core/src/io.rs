//! On-disk formats: raw radar cubes and matrices (csv, bin, pgm).
//!
//! Cube: `<name>.iq` holds interleaved I/Q as little-endian `f32`, chirp by
//! chirp (all fast-time samples of chirp 0 first); `<name>.meta` is a
//! `key = value` sidecar with the [`RadarParams`] fields.
//!
//! Matrix bin: 16-byte header (`RDMX`, dtype u8 with 0 = f64 and 1 = complex
//! f64, three reserved bytes, u32 rows, u32 cols, all little-endian) followed
//! by the row-major payload. Complex entries are stored as `re, im` pairs.

use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use num_complex::{Complex32, Complex64};

use crate::config::{RadarCube, RadarParams};
use crate::error::{Error, Result};
use crate::kv::KvFile;

pub const BIN_MAGIC: &[u8; 4] = b"RDMX";
const BIN_HEADER_LEN: usize = 16;
const PGM_LOG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Bin,
    Pgm,
}

impl MatrixFormat {
    pub fn name(self) -> &'static str {
        match self {
            MatrixFormat::Csv => "csv",
            MatrixFormat::Bin => "bin",
            MatrixFormat::Pgm => "pgm",
        }
    }
}

impl std::str::FromStr for MatrixFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(MatrixFormat::Csv),
            "bin" => Ok(MatrixFormat::Bin),
            "pgm" => Ok(MatrixFormat::Pgm),
            other => Err(Error::InvalidParameter(format!(
                "unknown matrix format `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Real(Array2<f64>),
    Complex(Array2<Complex64>),
}

impl Matrix {
    pub fn dim(&self) -> (usize, usize) {
        match self {
            Matrix::Real(m) => m.dim(),
            Matrix::Complex(m) => m.dim(),
        }
    }

    pub fn into_real(self) -> Result<Array2<f64>> {
        match self {
            Matrix::Real(m) => Ok(m),
            Matrix::Complex(_) => Err(Error::InvalidParameter(
                "expected a real matrix, found complex".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum MatrixRef<'a> {
    Real(&'a Array2<f64>),
    Complex(&'a Array2<Complex64>),
}

impl MatrixRef<'_> {
    fn dim(&self) -> (usize, usize) {
        match self {
            MatrixRef::Real(m) => m.dim(),
            MatrixRef::Complex(m) => m.dim(),
        }
    }
}

impl<'a> From<&'a Array2<f64>> for MatrixRef<'a> {
    fn from(m: &'a Array2<f64>) -> Self {
        MatrixRef::Real(m)
    }
}

impl<'a> From<&'a Array2<Complex64>> for MatrixRef<'a> {
    fn from(m: &'a Array2<Complex64>) -> Self {
        MatrixRef::Complex(m)
    }
}

impl<'a> From<&'a Matrix> for MatrixRef<'a> {
    fn from(m: &'a Matrix) -> Self {
        match m {
            Matrix::Real(r) => MatrixRef::Real(r),
            Matrix::Complex(c) => MatrixRef::Complex(c),
        }
    }
}

/// Formats like C's `%.17g`.
pub fn fmt_g17(v: f64) -> String {
    const P: i32 = 17;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..P).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let fixed = format!("{:.*}", (P - 1 - exp) as usize, v);
        strip_zeros(&fixed).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Payload and sidecar paths for a cube path given with or without extension.
pub fn cube_paths(path: &Path) -> (PathBuf, PathBuf) {
    (path.with_extension("iq"), path.with_extension("meta"))
}

pub fn load_radar_cube(path: &Path) -> Result<RadarCube> {
    let (iq_path, meta_path) = cube_paths(path);
    if !meta_path.exists() {
        return Err(Error::metadata(&meta_path, "sidecar metadata not found"));
    }
    let meta = KvFile::read(&meta_path)?;
    let params = RadarParams::from_kv(&meta)?;
    let bytes = std::fs::read(&iq_path).map_err(|e| Error::io(&iq_path, e))?;
    let expected = params.num_fast_samples * params.num_chirps * 8;
    if bytes.len() != expected {
        return Err(Error::DimensionMismatch(format!(
            "{} declares {}×{} samples ({expected} bytes) but {} holds {} bytes",
            meta_path.display(),
            params.num_fast_samples,
            params.num_chirps,
            iq_path.display(),
            bytes.len()
        )));
    }
    let samples = bytes
        .chunks_exact(8)
        .map(|c| {
            Complex32::new(
                f32::from_le_bytes([c[0], c[1], c[2], c[3]]),
                f32::from_le_bytes([c[4], c[5], c[6], c[7]]),
            )
        })
        .collect();
    RadarCube::new(params, samples)
}

/// Writes `<name>.iq` and `<name>.meta`; returns the payload path.
pub fn write_radar_cube(cube: &RadarCube, path: &Path) -> Result<PathBuf> {
    let (iq_path, meta_path) = cube_paths(path);
    let mut payload = Vec::with_capacity(cube.samples().len() * 8);
    for s in cube.samples() {
        payload.extend_from_slice(&s.re.to_le_bytes());
        payload.extend_from_slice(&s.im.to_le_bytes());
    }
    std::fs::write(&iq_path, payload).map_err(|e| Error::io(&iq_path, e))?;
    let mut meta = KvFile::new();
    cube.params().write_kv(&mut meta);
    meta.write(&meta_path)?;
    Ok(iq_path)
}

pub fn write_matrix<'a>(
    matrix: impl Into<MatrixRef<'a>>,
    path: &Path,
    format: MatrixFormat,
) -> Result<()> {
    let matrix = matrix.into();
    let (rows, cols) = matrix.dim();
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter(format!(
            "refusing to write empty {rows}×{cols} matrix"
        )));
    }
    let bytes = match format {
        MatrixFormat::Csv => encode_csv(matrix).into_bytes(),
        MatrixFormat::Bin => encode_bin(matrix)?,
        MatrixFormat::Pgm => encode_pgm(&magnitudes(matrix)),
    };
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))
}

/// Reads a matrix, detecting bin and pgm by their magic bytes; anything else
/// is parsed as csv. Complex matrices written as csv come back as real
/// matrices with interleaved `re, im` columns; pgm comes back as the 8-bit
/// pixel values.
pub fn load_matrix(path: &Path) -> Result<Matrix> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(BIN_MAGIC) {
        decode_bin(&bytes, path)
    } else if bytes.starts_with(b"P5") {
        decode_pgm(&bytes, path).map(Matrix::Real)
    } else {
        let text = String::from_utf8(bytes).map_err(|_| Error::format(path, "not utf-8 csv"))?;
        decode_csv(&text, path).map(Matrix::Real)
    }
}

fn encode_csv(m: MatrixRef<'_>) -> String {
    let lines: Vec<String> = match m {
        MatrixRef::Real(a) => a
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|v| fmt_g17(*v)).collect::<Vec<_>>().join(","))
            .collect(),
        MatrixRef::Complex(a) => a
            .rows()
            .into_iter()
            .map(|r| {
                r.iter()
                    .flat_map(|z| [fmt_g17(z.re), fmt_g17(z.im)])
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect(),
    };
    lines.join("\n")
}

fn decode_csv(text: &str, path: &Path) -> Result<Array2<f64>> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let before = data.len();
        for cell in line.split(',') {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| Error::format(path, format!("line {}: bad number `{cell}`", i + 1)))?;
            data.push(v);
        }
        let n = data.len() - before;
        match cols {
            None => cols = Some(n),
            Some(c) if c != n => {
                return Err(Error::format(
                    path,
                    format!("line {} has {n} columns, expected {c}", i + 1),
                ))
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::format(path, "empty csv"))?;
    Array2::from_shape_vec((rows, cols), data).map_err(|e| Error::Internal(e.to_string()))
}

fn encode_bin(m: MatrixRef<'_>) -> Result<Vec<u8>> {
    let (rows, cols) = m.dim();
    let (rows32, cols32) = match (u32::try_from(rows), u32::try_from(cols)) {
        (Ok(r), Ok(c)) => (r, c),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "matrix {rows}×{cols} too large for bin format"
            )))
        }
    };
    let dtype: u8 = match m {
        MatrixRef::Real(_) => 0,
        MatrixRef::Complex(_) => 1,
    };
    let per = if dtype == 0 { 8 } else { 16 };
    let mut out = Vec::with_capacity(BIN_HEADER_LEN + rows * cols * per);
    out.extend_from_slice(BIN_MAGIC);
    out.push(dtype);
    out.extend_from_slice(&[0, 0, 0]);
    out.extend_from_slice(&rows32.to_le_bytes());
    out.extend_from_slice(&cols32.to_le_bytes());
    match m {
        MatrixRef::Real(a) => a
            .iter()
            .for_each(|v| out.extend_from_slice(&v.to_le_bytes())),
        MatrixRef::Complex(a) => a.iter().for_each(|z| {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }),
    }
    Ok(out)
}

fn decode_bin(bytes: &[u8], path: &Path) -> Result<Matrix> {
    if bytes.len() < BIN_HEADER_LEN {
        return Err(Error::format(path, "truncated header"));
    }
    let dtype = bytes[4];
    let rows = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let per = match dtype {
        0 => 8,
        1 => 16,
        d => return Err(Error::format(path, format!("unknown dtype {d}"))),
    };
    let payload = &bytes[BIN_HEADER_LEN..];
    if payload.len() != rows * cols * per {
        return Err(Error::DimensionMismatch(format!(
            "{}: header declares {rows}×{cols} but payload has {} bytes",
            path.display(),
            payload.len()
        )));
    }
    let f = |c: &[u8]| f64::from_le_bytes(c.try_into().unwrap());
    let shape = (rows, cols);
    let m = if dtype == 0 {
        let v = payload.chunks_exact(8).map(f).collect();
        Matrix::Real(Array2::from_shape_vec(shape, v).map_err(|e| Error::Internal(e.to_string()))?)
    } else {
        let v = payload
            .chunks_exact(16)
            .map(|c| Complex64::new(f(&c[..8]), f(&c[8..])))
            .collect();
        Matrix::Complex(
            Array2::from_shape_vec(shape, v).map_err(|e| Error::Internal(e.to_string()))?,
        )
    };
    Ok(m)
}

fn magnitudes(m: MatrixRef<'_>) -> Array2<f64> {
    match m {
        MatrixRef::Real(a) => a.mapv(f64::abs),
        MatrixRef::Complex(a) => a.mapv(|z| z.norm()),
    }
}

/// Log-scales (floored at 1e-12 of the peak) and min-max normalizes to 8 bits.
fn encode_pgm(mag: &Array2<f64>) -> Vec<u8> {
    let (rows, cols) = mag.dim();
    let peak = mag.iter().cloned().fold(0.0, f64::max);
    let logs = if peak > 0.0 {
        let floor = PGM_LOG_FLOOR * peak;
        mag.mapv(|v| v.max(floor).log10())
    } else {
        Array2::zeros((rows, cols))
    };
    let lo = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.extend(logs.iter().map(|&v| {
        if span > 0.0 {
            ((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        }
    }));
    out
}

fn decode_pgm(bytes: &[u8], path: &Path) -> Result<Array2<f64>> {
    // header: magic, width, height, maxval separated by whitespace
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format(path, "truncated pgm header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::format(path, format!("bad pgm header field `{s}`")))
    };
    let (cols, rows, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
    if maxval != 255 {
        return Err(Error::format(path, "only 8-bit pgm supported"));
    }
    let data = bytes.get(pos..).unwrap_or_default();
    if data.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "{}: pgm declares {cols}×{rows} pixels, found {} bytes",
            path.display(),
            data.len()
        )));
    }
    Array2::from_shape_vec((rows, cols), data.iter().map(|&b| b as f64).collect())
        .map_err(|e| Error::Internal(e.to_string()))
}
