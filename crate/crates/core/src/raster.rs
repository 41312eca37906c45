//! Grayscale raster carrier plus power-of-two padding and its inverse.

use crate::error::{Error, Result};

/// A grayscale image with row-major intensities in `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayRaster {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl GrayRaster {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(
                "raster dimensions must be at least 1x1".into(),
            ));
        }
        if values.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "value count {} does not match {}x{}",
                values.len(),
                width,
                height
            )));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidParameter(
                "raster intensity outside [0,1]".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// A raster filled with one intensity.
    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn same_dimensions(&self, other: &GrayRaster) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Where original content sits inside a padded power-of-two square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadRecord {
    pub original_width: usize,
    pub original_height: usize,
    pub padded_side: usize,
    pub offset_x: usize,
    pub offset_y: usize,
}

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Pad to the smallest power-of-two square holding the raster.
///
/// Padding fill replicates edge pixels so the wavelet bands see no
/// artificial border step. Content is placed at offset (0,0).
pub fn pad_to_pow2(raster: &GrayRaster) -> (GrayRaster, PadRecord) {
    let side = next_pow2(raster.width.max(raster.height));
    let record = PadRecord {
        original_width: raster.width,
        original_height: raster.height,
        padded_side: side,
        offset_x: 0,
        offset_y: 0,
    };
    if raster.width == side && raster.height == side {
        return (raster.clone(), record);
    }
    let mut values = vec![0.0; side * side];
    for y in 0..side {
        let sy = y.min(raster.height - 1);
        for x in 0..side {
            let sx = x.min(raster.width - 1);
            values[y * side + x] = raster.get(sx, sy);
        }
    }
    (
        GrayRaster {
            width: side,
            height: side,
            values,
        },
        record,
    )
}

/// Recover the original content from a padded raster.
pub fn crop(raster: &GrayRaster, record: &PadRecord) -> Result<GrayRaster> {
    if record.offset_x + record.original_width > raster.width
        || record.offset_y + record.original_height > raster.height
    {
        return Err(Error::RecordMismatch(format!(
            "record {}x{} at ({},{}) exceeds raster {}x{}",
            record.original_width,
            record.original_height,
            record.offset_x,
            record.offset_y,
            raster.width,
            raster.height
        )));
    }
    let mut values = Vec::with_capacity(record.original_width * record.original_height);
    for y in 0..record.original_height {
        let row = record.offset_y + y;
        let start = row * raster.width + record.offset_x;
        values.extend_from_slice(&raster.values[start..start + record.original_width]);
    }
    GrayRaster::new(record.original_width, record.original_height, values)
}
