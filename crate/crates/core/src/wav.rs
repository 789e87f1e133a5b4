//! Minimal RIFF/WAVE reader and writer for mono audio.
//!
//! Reads 16-bit PCM and 32/64-bit IEEE float; writes 16-bit PCM, 32-bit
//! float (the default), and 64-bit float. 64-bit output exists so that
//! component sidecar files can round-trip `f64` sample buffers exactly,
//! which none of the common wav crates support. Everything else about the
//! format handling is deliberately narrow: mono only, no extensible
//! headers, no metadata chunks on write.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fsio;
use crate::signal::Waveform;

/// Sample encodings supported for writing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    /// 16-bit signed PCM. Samples outside `[-1, 1]` clip.
    Int16,
    /// 32-bit IEEE float. Rounds each `f64` sample to the nearest `f32`.
    Float32,
    /// 64-bit IEEE float. Lossless for the in-memory representation.
    Float64,
}

/// Outcome of a write: how many samples clipped (always 0 for float).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WriteStats {
    pub clipped_samples: usize,
}

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;

fn read_u16(buf: &[u8], at: usize) -> Option<u16> {
    buf.get(at..at + 2).map(|b| u16::from_le_bytes([b[0], b[1]]))
}

fn read_u32(buf: &[u8], at: usize) -> Option<u32> {
    buf.get(at..at + 4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
}

/// Reads a mono WAV file into a [`Waveform`]. Integer samples are scaled to
/// `[-1, 1)` by `1/32768`; float samples pass through unchanged.
pub fn read_wav(path: &Path) -> Result<Waveform> {
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |message: &str| Error::wav(path, message);

    if buf.len() < 12 || &buf[0..4] != b"RIFF" || &buf[8..12] != b"WAVE" {
        return Err(bad("not a RIFF/WAVE file"));
    }

    // Walk the chunk list; take the first fmt and data chunks.
    let mut fmt: Option<(u16, u16, u32, u16)> = None; // format, channels, rate, bits
    let mut data: Option<(usize, usize)> = None; // offset, len
    let mut pos = 12usize;
    while pos + 8 <= buf.len() {
        let id = &buf[pos..pos + 4];
        let size = read_u32(&buf, pos + 4).ok_or_else(|| bad("truncated chunk header"))? as usize;
        let body = pos + 8;
        if body + size > buf.len() {
            return Err(bad("chunk extends past end of file"));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(bad("fmt chunk too small"));
                }
                let format = read_u16(&buf, body).unwrap();
                let channels = read_u16(&buf, body + 2).unwrap();
                let rate = read_u32(&buf, body + 4).unwrap();
                let bits = read_u16(&buf, body + 14).unwrap();
                fmt = Some((format, channels, rate, bits));
            }
            b"data" => {
                data = Some((body, size));
            }
            _ => {}
        }
        // Chunks are word-aligned; odd sizes carry a pad byte.
        pos = body + size + (size & 1);
    }

    let (format, channels, rate, bits) = fmt.ok_or_else(|| bad("missing fmt chunk"))?;
    let (data_off, data_len) = data.ok_or_else(|| bad("missing data chunk"))?;

    if channels != 1 {
        return Err(bad(&format!("expected mono, got {channels} channels")));
    }
    if rate == 0 {
        return Err(bad("sample rate is zero"));
    }
    let body = &buf[data_off..data_off + data_len];

    let samples: Vec<f64> = match (format, bits) {
        (FORMAT_PCM, 16) => {
            if data_len % 2 != 0 {
                return Err(bad("data chunk not a whole number of 16-bit samples"));
            }
            body.chunks_exact(2)
                .map(|b| f64::from(i16::from_le_bytes([b[0], b[1]])) / 32768.0)
                .collect()
        }
        (FORMAT_IEEE_FLOAT, 32) => {
            if data_len % 4 != 0 {
                return Err(bad("data chunk not a whole number of 32-bit samples"));
            }
            body.chunks_exact(4)
                .map(|b| f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])))
                .collect()
        }
        (FORMAT_IEEE_FLOAT, 64) => {
            if data_len % 8 != 0 {
                return Err(bad("data chunk not a whole number of 64-bit samples"));
            }
            body.chunks_exact(8)
                .map(|b| {
                    f64::from_le_bytes([b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7]])
                })
                .collect()
        }
        (f, b) => {
            return Err(bad(&format!(
                "unsupported sample format: tag {f}, {b} bits"
            )))
        }
    };

    if samples.iter().any(|s| !s.is_finite()) {
        return Err(bad("file contains non-finite samples"));
    }
    Ok(Waveform::from_finite(samples, rate))
}

fn encode(w: &Waveform, depth: BitDepth) -> (Vec<u8>, usize) {
    let n = w.len();
    let (format, bits, bytes_per) = match depth {
        BitDepth::Int16 => (FORMAT_PCM, 16u16, 2usize),
        BitDepth::Float32 => (FORMAT_IEEE_FLOAT, 32, 4),
        BitDepth::Float64 => (FORMAT_IEEE_FLOAT, 64, 8),
    };
    let data_len = n * bytes_per;
    let mut out = Vec::with_capacity(44 + data_len);
    let rate = w.sample_rate_hz();
    let byte_rate = rate * bytes_per as u32;

    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&format.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&rate.to_le_bytes());
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&(bytes_per as u16).to_le_bytes()); // block align
    out.extend_from_slice(&bits.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());

    let mut clipped = 0usize;
    match depth {
        BitDepth::Int16 => {
            for &s in w.samples() {
                if s.abs() > 1.0 {
                    clipped += 1;
                }
                let v = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        BitDepth::Float32 => {
            for &s in w.samples() {
                out.extend_from_slice(&(s as f32).to_le_bytes());
            }
        }
        BitDepth::Float64 => {
            for &s in w.samples() {
                out.extend_from_slice(&s.to_le_bytes());
            }
        }
    }
    (out, clipped)
}

/// Writes `w` to `path` atomically (temp sibling + rename), so a crash
/// never leaves a half-written file under the final name.
pub fn write_wav(path: &Path, w: &Waveform, depth: BitDepth) -> Result<WriteStats> {
    if w.is_empty() {
        return Err(Error::InvalidInput(format!(
            "refusing to write empty waveform to {}",
            path.display()
        )));
    }
    let (bytes, clipped) = encode(w, depth);
    fsio::atomic_write_bytes(path, &bytes)?;
    Ok(WriteStats {
        clipped_samples: clipped,
    })
}
