//! 8-bit grayscale raster io: PNG read/write plus binary PGM read.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use anyhow::{bail, Context, Result};

use rsod_core::raster::Raster;

pub fn write_png(path: &Path, raster: &Raster) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), raster.width(), raster.height());
    encoder.set_color(png::ColorType::Grayscale);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header()?;
    writer.write_image_data(raster.data())?;
    Ok(())
}

pub fn read_png(path: &Path) -> Result<Raster> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let decoder = png::Decoder::new(BufReader::new(file));
    let mut reader = decoder.read_info()?;
    let mut buf = vec![0u8; reader.output_buffer_size().context("png too large")?];
    let info = reader.next_frame(&mut buf)?;
    if info.bit_depth != png::BitDepth::Eight {
        bail!("{}: only 8-bit rasters supported", path.display());
    }
    let data: Vec<u8> = match info.color_type {
        png::ColorType::Grayscale => buf[..info.buffer_size()].to_vec(),
        // average down anything multi-channel
        png::ColorType::Rgb => buf[..info.buffer_size()]
            .chunks(3)
            .map(|c| ((c[0] as u32 + c[1] as u32 + c[2] as u32) / 3) as u8)
            .collect(),
        other => bail!("{}: unsupported color type {other:?}", path.display()),
    };
    Ok(Raster::new(info.width, info.height, data)?)
}

/// Binary (P5) PGM with maxval 255.
pub fn read_pgm(path: &Path) -> Result<Raster> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let mut fields = Vec::new();
    let mut i = 0;
    // header: magic, width, height, maxval, single whitespace, then data
    while fields.len() < 4 && i < bytes.len() {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i < bytes.len() && bytes[i] == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        fields.push(std::str::from_utf8(&bytes[start..i])?.to_string());
    }
    i += 1; // the single whitespace after maxval
    if fields.len() != 4 || fields[0] != "P5" {
        bail!("{}: not a binary PGM", path.display());
    }
    let width: u32 = fields[1].parse()?;
    let height: u32 = fields[2].parse()?;
    if fields[3] != "255" {
        bail!("{}: only maxval 255 supported", path.display());
    }
    let expected = (width as usize) * (height as usize);
    if bytes.len() < i + expected {
        bail!("{}: truncated PGM data", path.display());
    }
    Ok(Raster::new(width, height, bytes[i..i + expected].to_vec())?)
}

/// Read a raster by extension: `.png` or `.pgm`.
pub fn read_raster(path: &Path) -> Result<Raster> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("png") => read_png(path),
        Some("pgm") => read_pgm(path),
        _ => bail!("{}: unsupported raster format", path.display()),
    }
}
