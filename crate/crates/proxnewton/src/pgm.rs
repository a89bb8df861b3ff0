//! Minimal PGM (portable graymap) reader and writer.
//!
//! Supports the ASCII `P2` and binary `P5` variants with maxval up to 65535;
//! 16-bit binary samples are big-endian per the format. Pixels are held as
//! f64 intensities in [0, 1] so images plug straight into the solvers.

use std::fs;
use std::io::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    /// Row-major intensities in [0, 1].
    pub pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Self {
        assert_eq!(pixels.len(), width * height);
        GrayImage { width, height, pixels }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }
}

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("pgm parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },
}

fn parse_err<T>(offset: usize, msg: impl Into<String>) -> Result<T, PgmError> {
    Err(PgmError::Parse { offset, msg: msg.into() })
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_separators(&mut self) {
        while self.pos < self.data.len() {
            let b = self.data[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    /// Next whitespace-delimited token and the byte offset it starts at.
    fn token(&mut self) -> Result<(usize, &'a str), PgmError> {
        self.skip_separators();
        if self.pos >= self.data.len() {
            return parse_err(self.pos, "unexpected end of file");
        }
        let start = self.pos;
        while self.pos < self.data.len()
            && !self.data[self.pos].is_ascii_whitespace()
            && self.data[self.pos] != b'#'
        {
            self.pos += 1;
        }
        match std::str::from_utf8(&self.data[start..self.pos]) {
            Ok(s) => Ok((start, s)),
            Err(_) => parse_err(start, "token is not valid ascii"),
        }
    }

    fn number(&mut self, what: &str) -> Result<(usize, u64), PgmError> {
        let (offset, tok) = self.token()?;
        match tok.parse::<u64>() {
            Ok(v) => Ok((offset, v)),
            Err(_) => parse_err(offset, format!("expected {what}, found {tok:?}")),
        }
    }
}

pub fn read_pgm(path: &Path) -> Result<GrayImage, PgmError> {
    let data = fs::read(path)?;
    let mut cur = Cursor { data: &data, pos: 0 };

    let (magic_off, magic) = cur.token()?;
    let binary = match magic {
        "P2" => false,
        "P5" => true,
        other => return parse_err(magic_off, format!("expected P2 or P5 magic, found {other:?}")),
    };

    let (w_off, width) = cur.number("width")?;
    let (h_off, height) = cur.number("height")?;
    let (mv_off, maxval) = cur.number("maxval")?;
    if width == 0 {
        return parse_err(w_off, "width must be positive");
    }
    if height == 0 {
        return parse_err(h_off, "height must be positive");
    }
    if maxval == 0 || maxval > 65535 {
        return parse_err(mv_off, format!("maxval must be in 1..=65535, found {maxval}"));
    }
    let (width, height) = (width as usize, height as usize);
    let count = width * height;
    let scale = 1.0 / maxval as f64;
    let mut pixels = Vec::with_capacity(count);

    if binary {
        // exactly one whitespace byte separates the header from the raster
        if cur.pos >= data.len() || !data[cur.pos].is_ascii_whitespace() {
            return parse_err(cur.pos, "expected single whitespace before binary raster");
        }
        cur.pos += 1;
        let wide = maxval > 255;
        let bytes_per = if wide { 2 } else { 1 };
        let need = count * bytes_per;
        if data.len() - cur.pos < need {
            return parse_err(
                data.len(),
                format!("raster truncated: need {need} bytes, found {}", data.len() - cur.pos),
            );
        }
        for i in 0..count {
            let at = cur.pos + i * bytes_per;
            let v = if wide {
                u16::from_be_bytes([data[at], data[at + 1]]) as u64
            } else {
                data[at] as u64
            };
            if v > maxval {
                return parse_err(at, format!("sample {v} exceeds maxval {maxval}"));
            }
            pixels.push(v as f64 * scale);
        }
    } else {
        for _ in 0..count {
            let (off, v) = cur.number("sample")?;
            if v > maxval {
                return parse_err(off, format!("sample {v} exceeds maxval {maxval}"));
            }
            pixels.push(v as f64 * scale);
        }
    }

    Ok(GrayImage { width, height, pixels })
}

/// Writes binary `P5`. Intensities are clamped to [0, 1] and quantized to
/// `maxval` levels; 16-bit samples go out big-endian.
pub fn write_pgm(path: &Path, img: &GrayImage, maxval: u16) -> Result<(), PgmError> {
    assert!(maxval > 0);
    let mut out = Vec::with_capacity(img.pixels.len() * 2 + 32);
    write!(out, "P5\n{} {}\n{}\n", img.width, img.height, maxval)?;
    let wide = maxval > 255;
    for &p in &img.pixels {
        let q = (p.clamp(0.0, 1.0) * maxval as f64).round() as u16;
        if wide {
            out.extend_from_slice(&q.to_be_bytes());
        } else {
            out.push(q as u8);
        }
    }
    fs::write(path, out)?;
    Ok(())
}
