//! File boundary: binary PGM (P5) and grayscale PNG readers/writers.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::GrayRaster;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm,
    Png,
}

impl ImageFormat {
    /// Guess from the file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("pgm") => Ok(ImageFormat::Pgm),
            Some("png") => Ok(ImageFormat::Png),
            _ => Err(Error::UnsupportedFormat(path.to_path_buf())),
        }
    }
}

/// Load a grayscale raster, rescaling the source bit depth into [0,1].
/// Color PNG inputs are reduced by unweighted channel mean.
pub fn load_raster(path: &Path, format: ImageFormat) -> Result<GrayRaster> {
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    match format {
        ImageFormat::Pgm => load_pgm(path),
        ImageFormat::Png => load_png(path),
    }
}

/// Load, inferring the format from the extension.
pub fn load_raster_auto(path: &Path) -> Result<GrayRaster> {
    load_raster(path, ImageFormat::from_path(path)?)
}

/// Save as 8-bit grayscale. Round-tripping costs at most 1/510 per pixel.
pub fn save_raster(raster: &GrayRaster, path: &Path, format: ImageFormat) -> Result<()> {
    match format {
        ImageFormat::Pgm => save_pgm(raster, path),
        ImageFormat::Png => save_png(raster, path),
    }
}

pub fn save_raster_auto(raster: &GrayRaster, path: &Path) -> Result<()> {
    save_raster(raster, path, ImageFormat::from_path(path)?)
}

fn quantize8(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

fn corrupt(path: &Path, reason: impl Into<String>) -> Error {
    Error::CorruptImage {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::IoFailure {
        path: path.to_path_buf(),
        source,
    }
}

fn load_pgm(path: &Path) -> Result<GrayRaster> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| io_err(path, e))?;
    let (header, data_off) = parse_pnm_header(&bytes).map_err(|r| corrupt(path, r))?;
    let (width, height, maxval) = header;
    if maxval == 0 || maxval > 65535 {
        return Err(corrupt(path, format!("invalid maxval {maxval}")));
    }
    let n = width * height;
    let bytes_per = if maxval > 255 { 2 } else { 1 };
    let data = &bytes[data_off..];
    if data.len() < n * bytes_per {
        return Err(corrupt(path, "truncated pixel data"));
    }
    let scale = 1.0 / maxval as f64;
    let values: Vec<f64> = if bytes_per == 1 {
        data[..n].iter().map(|&b| b as f64 * scale).collect()
    } else {
        // P5 16-bit is big-endian
        data[..n * 2]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 * scale)
            .collect()
    };
    if values.iter().any(|&v| v > 1.0) {
        return Err(corrupt(path, "sample exceeds stated maxval"));
    }
    GrayRaster::new(width, height, values)
}

/// Returns ((width, height, maxval), offset of pixel data).
fn parse_pnm_header(bytes: &[u8]) -> std::result::Result<((usize, usize, usize), usize), String> {
    if bytes.len() < 2 || &bytes[0..2] != b"P5" {
        return Err("missing P5 magic".into());
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // skip whitespace and comment lines
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == start {
            return Err("truncated header".into());
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .unwrap()
            .parse()
            .map_err(|_| "bad header field".to_string())?;
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err("missing separator after maxval".into());
    }
    pos += 1; // exactly one whitespace byte before pixel data
    Ok(((fields[0], fields[1], fields[2]), pos))
}

fn save_pgm(raster: &GrayRaster, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let mut run = || -> std::io::Result<()> {
        write!(w, "P5\n{} {}\n255\n", raster.width(), raster.height())?;
        let bytes: Vec<u8> = raster.values().iter().map(|&v| quantize8(v)).collect();
        w.write_all(&bytes)?;
        w.flush()
    };
    run().map_err(|e| io_err(path, e))
}

fn load_png(path: &Path) -> Result<GrayRaster> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let img = image::ImageReader::with_format(reader, image::ImageFormat::Png)
        .decode()
        .map_err(|e| corrupt(path, e.to_string()))?;
    let (width, height) = (img.width() as usize, img.height() as usize);
    use image::DynamicImage::*;
    let values: Vec<f64> = match img {
        ImageLuma8(b) => b.into_raw().into_iter().map(|v| v as f64 / 255.0).collect(),
        ImageLuma16(b) => b
            .into_raw()
            .into_iter()
            .map(|v| v as f64 / 65535.0)
            .collect(),
        other => {
            // channel mean, ignoring alpha
            let rgb = other.to_rgb16();
            rgb.pixels()
                .map(|p| {
                    let s = p.0[0] as f64 + p.0[1] as f64 + p.0[2] as f64;
                    s / (3.0 * 65535.0)
                })
                .collect()
        }
    };
    GrayRaster::new(width, height, values)
}

fn save_png(raster: &GrayRaster, path: &Path) -> Result<()> {
    let bytes: Vec<u8> = raster.values().iter().map(|&v| quantize8(v)).collect();
    let buf = image::GrayImage::from_raw(raster.width() as u32, raster.height() as u32, bytes)
        .expect("buffer sized from raster");
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(e) => io_err(path, e),
            other => io_err(path, std::io::Error::other(other.to_string())),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn pgm_2x2_8bit_rescales_linearly() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.pgm");
        std::fs::write(&path, [b"P5\n2 2\n255\n".as_ref(), &[0, 255, 128, 64]].concat()).unwrap();
        let r = load_raster(&path, ImageFormat::Pgm).unwrap();
        assert_eq!(
            r.values(),
            &[0.0, 1.0, 128.0 / 255.0, 64.0 / 255.0]
        );
    }

    #[test]
    fn pgm_1x1_zero_pixel() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.pgm");
        std::fs::write(&path, [b"P5\n1 1\n255\n".as_ref(), &[0]].concat()).unwrap();
        let r = load_raster(&path, ImageFormat::Pgm).unwrap();
        assert_eq!(r.values(), &[0.0]);
    }

    #[test]
    fn pgm_16bit_big_endian() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.pgm");
        std::fs::write(
            &path,
            [b"P5\n2 1\n65535\n".as_ref(), &[0xff, 0xff, 0x00, 0x00]].concat(),
        )
        .unwrap();
        let r = load_raster(&path, ImageFormat::Pgm).unwrap();
        assert_eq!(r.values(), &[1.0, 0.0]);
    }

    #[test]
    fn truncated_pgm_is_corrupt() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.pgm");
        std::fs::write(&path, [b"P5\n4 4\n255\n".as_ref(), &[1, 2, 3]].concat()).unwrap();
        assert!(matches!(
            load_raster(&path, ImageFormat::Pgm),
            Err(Error::CorruptImage { .. })
        ));
    }

    #[test]
    fn missing_file_is_file_not_found() {
        let p = Path::new("/nonexistent/image.pgm");
        assert!(matches!(
            load_raster(p, ImageFormat::Pgm),
            Err(Error::FileNotFound(_))
        ));
    }

    #[test]
    fn unknown_extension_is_unsupported() {
        assert!(matches!(
            ImageFormat::from_path(Path::new("x.tiff")),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn round_trip_within_quantization_bound() {
        let dir = tempdir().unwrap();
        let r = GrayRaster::constant(4, 4, 0.5).unwrap();
        for (name, fmt) in [("t.pgm", ImageFormat::Pgm), ("t.png", ImageFormat::Png)] {
            let path = dir.path().join(name);
            save_raster(&r, &path, fmt).unwrap();
            let back = load_raster(&path, fmt).unwrap();
            for (&a, &b) in r.values().iter().zip(back.values()) {
                assert!((a - b).abs() <= 1.0 / 510.0);
            }
        }
    }

    #[test]
    fn full_intensity_maps_to_max_code() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.pgm");
        let r = GrayRaster::constant(1, 1, 1.0).unwrap();
        save_raster(&r, &path, ImageFormat::Pgm).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(*bytes.last().unwrap(), 255);
    }

    #[test]
    fn unwritable_directory_is_io_failure() {
        let r = GrayRaster::constant(1, 1, 0.5).unwrap();
        let path = Path::new("/nonexistent_dir/t.pgm");
        assert!(matches!(
            save_raster(&r, path, ImageFormat::Pgm),
            Err(Error::IoFailure { .. })
        ));
    }

    #[test]
    fn rgb_png_reduces_by_channel_mean() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.png");
        let img = image::RgbImage::from_pixel(2, 1, image::Rgb([255u8, 0, 0]));
        img.save(&path).unwrap();
        let r = load_raster(&path, ImageFormat::Png).unwrap();
        for &v in r.values() {
            assert!((v - 1.0 / 3.0).abs() < 1e-3);
        }
    }
}
