//! Grayscale raster with the handful of pixel operations the pipeline
//! needs: mirror, bilinear rescale, gaussian blur, crop and chip
//! compositing with an alpha footprint.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::math;

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Raster {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl Raster {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self, CoreError> {
        if width == 0 || height == 0 || data.len() != (width as usize) * (height as usize) {
            return Err(CoreError::EmptyRaster);
        }
        Ok(Raster {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Result<Self, CoreError> {
        Raster::new(width, height, vec![value; (width as usize) * (height as usize)])
    }

    pub fn width(&self) -> u32 {
        self.width
    }
    pub fn height(&self) -> u32 {
        self.height
    }
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[(y as usize) * (self.width as usize) + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: u8) {
        self.data[(y as usize) * (self.width as usize) + x as usize] = v;
    }

    /// Horizontal mirror; an involution.
    pub fn mirror_horizontal(&self) -> Raster {
        let mut out = self.clone();
        for y in 0..self.height {
            for x in 0..self.width {
                out.set(x, y, self.get(self.width - 1 - x, y));
            }
        }
        out
    }

    /// Bilinear sample at continuous coordinates (pixel-center convention),
    /// clamped at the borders.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> f64 {
        let xc = x.max(0.0).min((self.width - 1) as f64);
        let yc = y.max(0.0).min((self.height - 1) as f64);
        let x0 = math::floor(xc) as u32;
        let y0 = math::floor(yc) as u32;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = xc - x0 as f64;
        let fy = yc - y0 as f64;
        let p00 = self.get(x0, y0) as f64;
        let p10 = self.get(x1, y0) as f64;
        let p01 = self.get(x0, y1) as f64;
        let p11 = self.get(x1, y1) as f64;
        p00 * (1.0 - fx) * (1.0 - fy)
            + p10 * fx * (1.0 - fy)
            + p01 * (1.0 - fx) * fy
            + p11 * fx * fy
    }

    /// Rescale by `factor` with bilinear interpolation. Factor 1.0 passes
    /// the raster through bit-exactly.
    pub fn scale(&self, factor: f64) -> Result<Raster, CoreError> {
        if factor <= 0.0 {
            return Err(CoreError::InvalidConfig(alloc::format!(
                "scale factor {factor} must be positive"
            )));
        }
        if factor == 1.0 {
            return Ok(self.clone());
        }
        let nw = (math::round(self.width as f64 * factor) as u32).max(1);
        let nh = (math::round(self.height as f64 * factor) as u32).max(1);
        let mut data = Vec::with_capacity((nw as usize) * (nh as usize));
        let sx = self.width as f64 / nw as f64;
        let sy = self.height as f64 / nh as f64;
        for y in 0..nh {
            for x in 0..nw {
                // map output pixel center back into source coordinates
                let src_x = (x as f64 + 0.5) * sx - 0.5;
                let src_y = (y as f64 + 0.5) * sy - 0.5;
                data.push(math::round(self.sample_bilinear(src_x, src_y)) as u8);
            }
        }
        Raster::new(nw, nh, data)
    }

    /// Separable gaussian blur; sigma 0 is the identity.
    pub fn gaussian_blur(&self, sigma: f64) -> Raster {
        if sigma <= 0.0 {
            return self.clone();
        }
        let radius = (math::round(3.0 * sigma) as i64).max(1);
        let mut kernel = Vec::with_capacity((2 * radius + 1) as usize);
        let mut sum = 0.0;
        for i in -radius..=radius {
            let w = math::exp(-(i as f64 * i as f64) / (2.0 * sigma * sigma));
            kernel.push(w);
            sum += w;
        }
        for w in &mut kernel {
            *w /= sum;
        }

        let w = self.width as i64;
        let h = self.height as i64;
        let clamp = |v: i64, hi: i64| v.max(0).min(hi - 1);

        // horizontal pass in f64, then vertical
        let mut tmp = vec![0.0f64; self.data.len()];
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0;
                for (ki, kw) in kernel.iter().enumerate() {
                    let sx = clamp(x + ki as i64 - radius, w);
                    acc += kw * self.data[(y * w + sx) as usize] as f64;
                }
                tmp[(y * w + x) as usize] = acc;
            }
        }
        let mut data = vec![0u8; self.data.len()];
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0;
                for (ki, kw) in kernel.iter().enumerate() {
                    let sy = clamp(y + ki as i64 - radius, h);
                    acc += kw * tmp[(sy * w + x) as usize];
                }
                data[(y * w + x) as usize] = math::round(acc.clamp(0.0, 255.0)) as u8;
            }
        }
        Raster {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Crop the integer pixel rectangle `[x0, x0+w) x [y0, y0+h)`.
    pub fn crop(&self, x0: u32, y0: u32, w: u32, h: u32) -> Result<Raster, CoreError> {
        if w == 0 || h == 0 || x0 + w > self.width || y0 + h > self.height {
            return Err(CoreError::EmptyRaster);
        }
        let mut data = Vec::with_capacity((w as usize) * (h as usize));
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                data.push(self.get(x, y));
            }
        }
        Raster::new(w, h, data)
    }
}

/// A pixel chip carrying an alpha footprint, produced by rotating/scaling
/// a cropped object. Transparent pixels are skipped when compositing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chip {
    pub raster: Raster,
    /// One flag per pixel; true = opaque.
    pub alpha: Vec<bool>,
}

impl Chip {
    /// Fully opaque chip over an existing raster.
    pub fn opaque(raster: Raster) -> Chip {
        let n = raster.data().len();
        Chip {
            raster,
            alpha: vec![true; n],
        }
    }

    /// Paste this chip onto `dst` with its top-left corner at `(ox, oy)`
    /// (may be negative; out-of-frame pixels are dropped).
    pub fn composite_onto(&self, dst: &mut Raster, ox: i64, oy: i64) {
        let cw = self.raster.width() as i64;
        let ch = self.raster.height() as i64;
        for cy in 0..ch {
            let dy = oy + cy;
            if dy < 0 || dy >= dst.height() as i64 {
                continue;
            }
            for cx in 0..cw {
                let dx = ox + cx;
                if dx < 0 || dx >= dst.width() as i64 {
                    continue;
                }
                let idx = (cy * cw + cx) as usize;
                if self.alpha[idx] {
                    dst.set(dx as u32, dy as u32, self.raster.get(cx as u32, cy as u32));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gradient(w: u32, h: u32) -> Raster {
        let data = (0..w * h).map(|i| (i * 7 % 256) as u8).collect();
        Raster::new(w, h, data).unwrap()
    }

    #[test]
    fn mirror_is_involution() {
        let r = gradient(13, 9);
        assert_eq!(r.mirror_horizontal().mirror_horizontal(), r);
    }

    #[test]
    fn scale_identity_is_bit_exact() {
        let r = gradient(20, 10);
        assert_eq!(r.scale(1.0).unwrap(), r);
    }

    #[test]
    fn scale_half_dimensions() {
        let r = gradient(100, 80);
        let s = r.scale(0.5).unwrap();
        assert_eq!((s.width(), s.height()), (50, 40));
    }

    #[test]
    fn blur_preserves_shape_and_range() {
        let r = gradient(17, 11);
        let b = r.gaussian_blur(1.5);
        assert_eq!((b.width(), b.height()), (17, 11));
    }

    #[test]
    fn blur_zero_sigma_identity() {
        let r = gradient(8, 8);
        assert_eq!(r.gaussian_blur(0.0), r);
    }

    #[test]
    fn crop_and_composite_round_trip() {
        let r = gradient(30, 30);
        let chip = Chip::opaque(r.crop(5, 7, 10, 8).unwrap());
        let mut dst = Raster::filled(30, 30, 0).unwrap();
        chip.composite_onto(&mut dst, 5, 7);
        for y in 7..15 {
            for x in 5..15 {
                assert_eq!(dst.get(x, y), r.get(x, y));
            }
        }
        assert_eq!(dst.get(0, 0), 0);
    }
}
