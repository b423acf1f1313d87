//! Image file I/O: PGM (P2/P5, 8- or 16-bit) and 8-bit grayscale PNG in,
//! 8-bit P5 PGM out. Intensities are mapped to [0,1] on load by dividing by
//! the format's declared maximum value.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{BinaryMask, Image2D};

/// Load a grayscale image and scale intensities to [0,1].
pub fn load_image(path: &Path) -> Result<Image2D> {
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let bytes = fs::read(path)?;
    match bytes.first().copied() {
        Some(b'P') => parse_pgm(&bytes),
        Some(0x89) => parse_png(&bytes),
        _ => Err(Error::UnsupportedFormat(format!(
            "{}: not a PGM (P2/P5) or PNG file",
            path.display()
        ))),
    }
}

/// Load a binary mask: pixel = 1 iff loaded intensity > 0.5.
pub fn load_mask(path: &Path) -> Result<BinaryMask> {
    let img = load_image(path)?;
    let values = img.pixels().iter().map(|&v| u8::from(v > 0.5)).collect();
    BinaryMask::new(img.width(), img.height(), values)
}

/// Write an image as an 8-bit binary PGM (P5), clamping to [0,1] and scaling
/// by 255 with round-half-up.
pub fn save_image(image: &Image2D, path: &Path) -> Result<()> {
    let payload: Vec<u8> = image
        .pixels()
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8)
        .collect();
    write_pgm(image.width(), image.height(), &payload, path)
}

/// Write a mask as an 8-bit P5 PGM with 0 -> 0 and 1 -> 255.
pub fn save_mask(mask: &BinaryMask, path: &Path) -> Result<()> {
    let payload: Vec<u8> = mask.values().iter().map(|&v| v * 255).collect();
    write_pgm(mask.width(), mask.height(), &payload, path)
}

fn write_pgm(width: usize, height: usize, payload: &[u8], path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    write!(f, "P5\n{} {}\n255\n", width, height)?;
    f.write_all(payload)?;
    Ok(())
}

/// Pull whitespace/comment-separated ASCII tokens out of a PGM header.
struct TokenReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> TokenReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn next_token(&mut self) -> Result<&'a [u8]> {
        loop {
            // skip whitespace
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos >= self.bytes.len() {
                return Err(Error::Malformed("unexpected end of PGM header".into()));
            }
            if self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            let start = self.pos;
            while self.pos < self.bytes.len()
                && !self.bytes[self.pos].is_ascii_whitespace()
                && self.bytes[self.pos] != b'#'
            {
                self.pos += 1;
            }
            return Ok(&self.bytes[start..self.pos]);
        }
    }

    fn next_usize(&mut self, what: &str) -> Result<usize> {
        let tok = self.next_token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Malformed(format!("invalid {what} in PGM header")))
    }
}

fn parse_pgm(bytes: &[u8]) -> Result<Image2D> {
    let mut rd = TokenReader::new(bytes);
    let magic = rd.next_token()?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "PGM magic {:?} (only P2 and P5 are supported)",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = rd.next_usize("width")?;
    let height = rd.next_usize("height")?;
    let maxval = rd.next_usize("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Malformed("PGM dimensions must be positive".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Malformed(format!("PGM maxval {maxval} out of range 1..=65535")));
    }
    let n = width * height;
    let scale = maxval as f64;
    let mut pixels = Vec::with_capacity(n);
    if binary {
        // exactly one whitespace byte separates maxval from the payload
        let payload = &bytes[rd.pos + 1..];
        let bpp = if maxval > 255 { 2 } else { 1 };
        if payload.len() < n * bpp {
            return Err(Error::Malformed(format!(
                "P5 payload has {} bytes, header declares {}",
                payload.len(),
                n * bpp
            )));
        }
        for j in 0..n {
            let raw = if bpp == 2 {
                // 16-bit samples are big-endian per the PNM convention
                u16::from_be_bytes([payload[2 * j], payload[2 * j + 1]]) as f64
            } else {
                payload[j] as f64
            };
            pixels.push(raw / scale);
        }
    } else {
        for _ in 0..n {
            let raw = rd
                .next_usize("sample")
                .map_err(|_| Error::Malformed("P2 payload shorter than header declares".into()))?;
            if raw > maxval {
                return Err(Error::Malformed(format!("P2 sample {raw} exceeds maxval {maxval}")));
            }
            pixels.push(raw as f64 / scale);
        }
    }
    Image2D::new(width, height, pixels)
}

fn parse_png(bytes: &[u8]) -> Result<Image2D> {
    let dyn_img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| Error::Malformed(format!("PNG decode: {e}")))?;
    match dyn_img {
        image::DynamicImage::ImageLuma8(gray) => {
            let (w, h) = (gray.width() as usize, gray.height() as usize);
            let pixels = gray.into_raw().into_iter().map(|b| b as f64 / 255.0).collect();
            Image2D::new(w, h, pixels)
        }
        other => Err(Error::UnsupportedFormat(format!(
            "PNG color type {:?} (only 8-bit grayscale is supported)",
            other.color()
        ))),
    }
}
