use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Slice, TemporalSequence};
use crate::error::{Error, Result};

/// Offset added to signed subband samples so they persist as `u16`.
pub const SUBBAND_OFFSET: i32 = 16384;

/// JSON sidecar stored next to every `.raw` volume.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawHeader {
    pub width: usize,
    pub height: usize,
    pub slices: usize,
    pub bit_depth: u8,
    pub offset: i32,
}

/// `foo.raw` -> `foo.json`.
pub fn sidecar_path(raw: &Path) -> PathBuf {
    raw.with_extension("json")
}

/// Reads `count` little-endian u16 slices, masking every sample to `bit_depth`.
pub fn load_raw(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    count: usize,
    bit_depth: u8,
) -> Result<TemporalSequence> {
    let bytes = fs::read(path)?;
    decode_raw(&bytes, width, height, count, bit_depth, 0)
}

/// Writes the sequence as little-endian u16; samples must be non-negative.
pub fn save_raw(seq: &TemporalSequence, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_raw(seq, 0)?)?;
    Ok(())
}

/// Writes `raw_path` plus its JSON sidecar. A non-zero `offset` is added to
/// every sample before encoding.
pub fn write_volume(seq: &TemporalSequence, raw_path: impl AsRef<Path>, offset: i32) -> Result<()> {
    let raw_path = raw_path.as_ref();
    let (width, height) = seq.dims();
    let header = RawHeader {
        width,
        height,
        slices: seq.len(),
        bit_depth: seq.bit_depth(),
        offset,
    };
    fs::write(raw_path, encode_raw(seq, offset)?)?;
    fs::write(
        sidecar_path(raw_path),
        serde_json::to_string_pretty(&header)?,
    )?;
    Ok(())
}

/// Reads a volume written by [`write_volume`], removing the offset.
pub fn read_volume(raw_path: impl AsRef<Path>) -> Result<(TemporalSequence, RawHeader)> {
    let raw_path = raw_path.as_ref();
    let header_path = sidecar_path(raw_path);
    let header_text = fs::read_to_string(&header_path).map_err(|e| {
        Error::format(format!(
            "cannot read sidecar {}: {e}",
            header_path.display()
        ))
    })?;
    let header: RawHeader = serde_json::from_str(&header_text)?;
    let bytes = fs::read(raw_path)?;
    let seq = decode_raw(
        &bytes,
        header.width,
        header.height,
        header.slices,
        header.bit_depth,
        header.offset,
    )?;
    Ok((seq, header))
}

fn decode_raw(
    bytes: &[u8],
    width: usize,
    height: usize,
    count: usize,
    bit_depth: u8,
    offset: i32,
) -> Result<TemporalSequence> {
    let per_slice = width * height;
    let expected = per_slice * count * 2;
    if count == 0 || per_slice == 0 || bytes.len() != expected {
        return Err(Error::format(format!(
            "raw size {} bytes, expected {expected} for {width}x{height}x{count}",
            bytes.len()
        )));
    }
    if bit_depth == 0 || bit_depth > 16 {
        return Err(Error::parameter(format!(
            "bit depth {bit_depth} not in 1..=16"
        )));
    }
    // Offset-encoded subbands span the full 16 bits.
    let mask: u32 = if offset == 0 {
        (1u32 << bit_depth) - 1
    } else {
        0xFFFF
    };
    let values: Vec<i32> = bytes
        .chunks_exact(2)
        .map(|b| (u16::from_le_bytes([b[0], b[1]]) as u32 & mask) as i32 - offset)
        .collect();
    let slices = values
        .chunks_exact(per_slice)
        .map(|c| Slice::new(width, height, c.to_vec(), bit_depth))
        .collect::<Result<Vec<_>>>()?;
    TemporalSequence::new(slices, 0)
}

fn encode_raw(seq: &TemporalSequence, offset: i32) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(seq.len() * seq.dims().0 * seq.dims().1 * 2);
    for slice in seq.slices() {
        for &s in slice.samples() {
            let v = s + offset;
            if !(0..=u16::MAX as i32).contains(&v) {
                return Err(Error::Range(format!(
                    "sample {s} with offset {offset} does not fit in u16"
                )));
            }
            out.extend_from_slice(&(v as u16).to_le_bytes());
        }
    }
    Ok(out)
}

/// Reads a binary (P5) PGM. Samples wider than one byte are big-endian.
pub fn load_pgm(path: impl AsRef<Path>) -> Result<Slice> {
    let bytes = fs::read(path)?;
    decode_pgm(&bytes)
}

/// Writes a P5 PGM with maxval `2^bit_depth - 1`.
pub fn save_pgm(slice: &Slice, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_pgm(slice)?)?;
    Ok(())
}

pub(crate) fn encode_pgm(slice: &Slice) -> Result<Vec<u8>> {
    let maxval = slice.max_value();
    if !slice.is_unsigned_in_range() {
        return Err(Error::Range(format!(
            "PGM samples must lie in [0, {maxval}]"
        )));
    }
    let mut out = format!("P5\n{} {}\n{}\n", slice.width(), slice.height(), maxval).into_bytes();
    if maxval < 256 {
        out.extend(slice.samples().iter().map(|&s| s as u8));
    } else {
        for &s in slice.samples() {
            out.extend_from_slice(&(s as u16).to_be_bytes());
        }
    }
    Ok(out)
}

fn decode_pgm(bytes: &[u8]) -> Result<Slice> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::format("not a binary PGM (missing P5 magic)"));
    }
    let mut pos = 2;
    let mut fields = [0u64; 3];
    for field in fields.iter_mut() {
        *field = next_header_int(bytes, &mut pos)?;
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let [width, height, maxval] = fields;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::format(format!("PGM maxval {maxval} out of range")));
    }
    let (width, height) = (width as usize, height as usize);
    let bytes_per_sample = if maxval < 256 { 1 } else { 2 };
    let payload = bytes.get(pos..).unwrap_or(&[]);
    if payload.len() != width * height * bytes_per_sample {
        return Err(Error::format(format!(
            "PGM payload has {} bytes, expected {}",
            payload.len(),
            width * height * bytes_per_sample
        )));
    }
    let samples: Vec<i32> = if bytes_per_sample == 1 {
        payload.iter().map(|&b| b as i32).collect()
    } else {
        payload
            .chunks_exact(2)
            .map(|b| u16::from_be_bytes([b[0], b[1]]) as i32)
            .collect()
    };
    if samples.iter().any(|&s| s as u64 > maxval) {
        return Err(Error::format("PGM sample exceeds maxval"));
    }
    let bit_depth = (64 - maxval.leading_zeros()) as u8;
    Slice::new(width, height, samples, bit_depth)
}

fn next_header_int(bytes: &[u8], pos: &mut usize) -> Result<u64> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(Error::format("truncated PGM header")),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|b| b.is_ascii_digit()) {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::format("malformed PGM header field"))
}
