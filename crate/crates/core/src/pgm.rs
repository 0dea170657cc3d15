//! Binary PGM (`P5`) reading and writing.
//!
//! Only 8-bit square images with a power-of-two side are accepted. The reader
//! tolerates arbitrary whitespace and `#` comments in the header; the writer
//! always emits the canonical form `P5 <w> <h> 255\n` followed by the payload.

use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{side_exp_of, GrayImage};

struct HeaderCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c => self.pos += 1,
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::BadHeader(format!("missing {what}")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::BadHeader(format!("{what} out of range")))
    }
}

/// Parses a binary PGM file.
pub fn read_pgm(data: &[u8]) -> Result<GrayImage> {
    if data.len() < 2 || &data[..2] != b"P5" {
        return Err(Error::BadMagic);
    }
    let mut cur = HeaderCursor { data, pos: 2 };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    // exactly one whitespace byte separates the header from the raster
    match data.get(cur.pos) {
        Some(c) if c.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(Error::BadHeader("missing whitespace after maxval".into())),
    }
    if width != height {
        return Err(Error::NotSquare { width, height });
    }
    let side_exp = side_exp_of(width)?;
    let expected = width * height;
    let payload = &data[cur.pos..];
    if payload.len() < expected {
        return Err(Error::Truncated {
            expected,
            actual: payload.len(),
        });
    }
    GrayImage::new(side_exp, payload[..expected].to_vec())
}

/// Serializes `img` as canonical binary PGM.
pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let side = img.side();
    let mut out = format!("P5 {side} {side} 255\n").into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let data = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_pgm(&data)
}

pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_pgm(img)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
