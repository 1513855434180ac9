//! File formats: 16-bit binary PGM frames and CSV tables.

use std::fs;
use std::io::Write;
use std::path::Path;

use heraldsim_core::analysis::{Image, Profile};
use heraldsim_core::detect::EventStream;

use crate::error::CliError;

/// Binary PGM (`P5`), maxval 65535, big-endian samples. Values above 65535
/// saturate.
pub fn encode_pgm<T: Copy + Into<u64>>(width: usize, height: usize, data: &[T]) -> Vec<u8> {
    assert_eq!(data.len(), width * height, "PGM size mismatch");
    let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
    out.reserve(data.len() * 2);
    for v in data {
        let sample = (*v).into().min(u64::from(u16::MAX)) as u16;
        out.extend_from_slice(&sample.to_be_bytes());
    }
    out
}

pub fn write_pgm<T: Copy + Into<u64>>(path: &Path, width: usize, height: usize, data: &[T]) -> Result<(), CliError> {
    fs::write(path, encode_pgm(width, height, data)).map_err(|e| CliError::io(path, e))
}

/// A decoded grey-level image.
#[derive(Debug, Clone, PartialEq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub data: Vec<u16>,
}

/// Decodes binary PGM with 8- or 16-bit samples; `#` comments are allowed
/// in the header.
pub fn decode_pgm(bytes: &[u8]) -> Result<Pgm, String> {
    let mut pos = 0;
    let mut token = || -> Result<String, String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err("truncated PGM header".into());
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err("not a binary PGM (P5)".into());
    }
    let number = |t: String| t.parse::<usize>().map_err(|_| format!("bad PGM header field `{t}`"));
    let width = number(token()?)?;
    let height = number(token()?)?;
    let maxval = number(token()?)?;
    if maxval == 0 || maxval > 65535 {
        return Err(format!("unsupported PGM maxval {maxval}"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    let body = &bytes[(pos + 1).min(bytes.len())..];
    let bytes_per_sample = if maxval > 255 { 2 } else { 1 };
    let expected = width * height * bytes_per_sample;
    if body.len() < expected {
        return Err(format!("PGM raster has {} bytes, expected {expected}", body.len()));
    }
    let data = if bytes_per_sample == 2 {
        body[..expected]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    } else {
        body[..expected].iter().map(|b| u16::from(*b)).collect()
    };
    Ok(Pgm {
        width,
        height,
        maxval: maxval as u16,
        data,
    })
}

pub fn read_pgm(path: &Path) -> Result<Pgm, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode_pgm(&bytes).map_err(|message| CliError::Format {
        path: path.to_path_buf(),
        message,
    })
}

impl Pgm {
    pub fn to_image(&self, pitch: f64) -> Image {
        Image {
            width: self.width,
            height: self.height,
            pitch,
            data: self.data.iter().map(|v| f64::from(*v)).collect(),
        }
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::io(path, source),
        other => CliError::Format {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        let row: Vec<String> = row.into_iter().collect();
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Two columns: `coordinate_m,value`.
pub fn write_profile(path: &Path, profile: &Profile) -> Result<(), CliError> {
    write_rows(
        path,
        &["coordinate_m", "value"],
        profile
            .coordinates()
            .zip(profile.values())
            .map(|(x, v)| [x.to_string(), v.to_string()]),
    )
}

/// Per-pixel probabilities: `pixel,coordinate_m,probability`.
pub fn write_pixel_marginal(path: &Path, pitch: f64, probabilities: &[f64]) -> Result<(), CliError> {
    let n = probabilities.len();
    write_rows(
        path,
        &["pixel", "coordinate_m", "probability"],
        probabilities.iter().enumerate().map(|(i, p)| {
            let x = (i as f64 - n as f64 / 2.0 + 0.5) * pitch;
            [i.to_string(), x.to_string(), p.to_string()]
        }),
    )
}

/// `frame_index,ix,iy,kind`.
pub fn write_events(path: &Path, events: &EventStream) -> Result<(), CliError> {
    write_rows(
        path,
        &["frame_index", "ix", "iy", "kind"],
        events.events.iter().map(|e| {
            [
                e.frame_index.to_string(),
                e.pixel.0.to_string(),
                e.pixel.1.to_string(),
                e.kind.name().to_string(),
            ]
        }),
    )
}

pub fn write_budgets(path: &Path, budgets: &[u64]) -> Result<(), CliError> {
    write_rows(
        path,
        &["frame", "photons"],
        budgets.iter().enumerate().map(|(i, b)| [i.to_string(), b.to_string()]),
    )
}

/// Reads a two-column profile CSV (header line, then `coordinate,value`).
/// Coordinates must be uniformly spaced.
pub fn read_profile(path: &Path) -> Result<Profile, CliError> {
    let format = |message: String| CliError::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let field = |k: usize| -> Result<f64, CliError> {
            record
                .get(k)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| format(format!("row {}: column {} is not a number", i + 2, k + 1)))
        };
        xs.push(field(0)?);
        vs.push(field(1)?);
    }
    if xs.len() < 2 {
        return Err(format("profile needs at least two rows".into()));
    }
    let pitch = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    if xs
        .windows(2)
        .any(|w| ((w[1] - w[0]) - pitch).abs() > 1e-6 * pitch.abs())
    {
        return Err(format("coordinates are not uniformly spaced".into()));
    }
    Profile::new(xs[0], pitch, vs).map_err(|e| format(e.to_string()))
}

/// `key = value` lines.
pub fn write_summary(path: &Path, entries: &[(String, String)]) -> Result<(), CliError> {
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    for (k, v) in entries {
        writeln!(f, "{k} = {v}").map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

pub fn ensure_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}
