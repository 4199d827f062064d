//! Polygon rasterization onto the pixel grid.
//!
//! Fill rule: a pixel belongs to the polygon iff its center `(c + 0.5, r + 0.5)`
//! is inside under even-odd counting. Ties where an edge passes exactly
//! through a center resolve top-left: centers on a left or top boundary are
//! inside, on a right or bottom boundary outside. Vertices are quantized to
//! 1/256 pixel and all crossing tests run in integer arithmetic, so results
//! are deterministic and integer translations of the vertices translate the
//! mask exactly.

use super::{BinaryMask, MaskError};

/// Subpixel quantization: coordinates are scaled by 256 and rounded.
const SUBPIXEL: i64 = 256;
/// Quantized coordinates are clamped to this magnitude so crossing
/// arithmetic stays within i128.
const COORD_LIMIT: i64 = 1 << 40;

/// A simple polygon given as an ordered vertex list in `(x, y)` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<(f64, f64)>,
}

impl Polygon {
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<Self, MaskError> {
        if vertices.len() < 3 {
            return Err(MaskError::TooFewVertices(vertices.len()));
        }
        for (index, &(x, y)) in vertices.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(MaskError::NonFiniteVertex { index });
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Rasterizes onto an `height x width` canvas. Regions outside the canvas
    /// are clipped; a polygon that covers no pixel center yields an empty
    /// mask with the `degenerate` flag set instead of an error.
    pub fn rasterize(&self, height: u32, width: u32) -> Result<Rasterization, MaskError> {
        if height == 0 || width == 0 {
            return Err(MaskError::ZeroArea { height, width });
        }
        let quantized: Vec<(i64, i64)> = self
            .vertices
            .iter()
            .map(|&(x, y)| (quantize(x), quantize(y)))
            .collect();

        let w = width as usize;
        let mut pixels = vec![false; height as usize * w];
        // parity_flips[c] counts edge crossings activating at column c
        let mut parity_flips = vec![0u32; w + 1];

        for row in 0..height {
            parity_flips.fill(0);
            let scan_y = SUBPIXEL * row as i64 + SUBPIXEL / 2;
            for i in 0..quantized.len() {
                let (x1, y1) = quantized[i];
                let (x2, y2) = quantized[(i + 1) % quantized.len()];
                if y1 == y2 {
                    continue; // horizontal edges never cross a scanline
                }
                // normalize so the edge spans [lo_y, hi_y) with lo_y < hi_y
                let (lo_x, lo_y, hi_x, hi_y) = if y1 < y2 {
                    (x1, y1, x2, y2)
                } else {
                    (x2, y2, x1, y1)
                };
                if !(lo_y <= scan_y && scan_y < hi_y) {
                    continue;
                }
                // crossing x = lo_x + (scan_y - lo_y) * (hi_x - lo_x) / (hi_y - lo_y)
                let den = (hi_y - lo_y) as i128;
                let num = lo_x as i128 * den + (scan_y - lo_y) as i128 * (hi_x - lo_x) as i128;
                // first column whose center satisfies crossing_x <= 256*c + 128
                let c0 = div_ceil(num - (SUBPIXEL / 2) as i128 * den, SUBPIXEL as i128 * den);
                let c0 = c0.clamp(0, w as i128) as usize;
                parity_flips[c0] += 1;
            }
            let base = row as usize * w;
            let mut inside = false;
            for c in 0..w {
                if parity_flips[c] % 2 == 1 {
                    inside = !inside;
                }
                pixels[base + c] = inside;
            }
        }

        let mask = BinaryMask::from_pixels(height, width, &pixels)?;
        let degenerate = mask.is_empty();
        Ok(Rasterization { mask, degenerate })
    }
}

/// Result of rasterizing a polygon.
#[derive(Debug, Clone)]
pub struct Rasterization {
    pub mask: BinaryMask,
    /// Set when the polygon covered no pixel center after clipping.
    pub degenerate: bool,
}

fn quantize(v: f64) -> i64 {
    let q = (v * SUBPIXEL as f64).round();
    if q >= COORD_LIMIT as f64 {
        COORD_LIMIT
    } else if q <= -COORD_LIMIT as f64 {
        -COORD_LIMIT
    } else {
        q as i64
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    let d = a.div_euclid(b);
    if a.rem_euclid(b) != 0 {
        d + 1
    } else {
        d
    }
}

/// An axis-aligned box in subpixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self, MaskError> {
        let ok = x_min.is_finite()
            && y_min.is_finite()
            && x_max.is_finite()
            && y_max.is_finite()
            && x_min <= x_max
            && y_min <= y_max;
        if !ok {
            return Err(MaskError::InvalidBBox {
                x_min,
                y_min,
                x_max,
                y_max,
            });
        }
        Ok(Self {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn center(&self) -> (f64, f64) {
        (
            (self.x_min + self.x_max) / 2.0,
            (self.y_min + self.y_max) / 2.0,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
        Polygon::new(vec![(x0, y0), (x1, y0), (x1, y1), (x0, y1)]).unwrap()
    }

    #[test]
    fn needs_three_vertices() {
        assert!(matches!(
            Polygon::new(vec![(0.0, 0.0), (1.0, 1.0)]),
            Err(MaskError::TooFewVertices(2))
        ));
    }

    #[test]
    fn rectangle_covers_nine_centers() {
        // covers pixel centers (r, c) in {1,2,3}^2 on a 5x5 canvas
        let r = rect(1.0, 1.0, 4.0, 4.0).rasterize(5, 5).unwrap();
        assert!(!r.degenerate);
        assert_eq!(r.mask.area(), 9);
        for row in 1..4 {
            for col in 1..4 {
                assert!(r.mask.contains(row, col), "({row},{col}) should be set");
            }
        }
    }

    #[test]
    fn full_canvas_rectangle_is_all_ones() {
        let r = rect(0.0, 0.0, 6.0, 4.0).rasterize(4, 6).unwrap();
        assert_eq!(r.mask, BinaryMask::full(4, 6).unwrap());
    }

    #[test]
    fn polygon_outside_canvas_is_empty_and_flagged() {
        let r = rect(10.0, 10.0, 20.0, 20.0).rasterize(5, 5).unwrap();
        assert!(r.mask.is_empty());
        assert!(r.degenerate);
    }

    #[test]
    fn sliver_between_centers_is_degenerate() {
        // a thin strip from x=0.6 to x=0.9 misses every center column
        let r = rect(0.6, 0.0, 0.9, 5.0).rasterize(5, 5).unwrap();
        assert!(r.degenerate);
    }

    #[test]
    fn top_left_tie_rule() {
        // boundaries exactly on pixel centers: left/top inside, right/bottom outside
        let r = rect(0.5, 0.5, 2.5, 2.5).rasterize(4, 4).unwrap();
        assert_eq!(r.mask.area(), 4);
        assert!(r.mask.contains(0, 0));
        assert!(r.mask.contains(1, 1));
        assert!(!r.mask.contains(2, 2));
        assert!(!r.mask.contains(0, 2));
        assert!(!r.mask.contains(2, 0));
    }

    #[test]
    fn triangle_matches_center_test() {
        let tri = Polygon::new(vec![(0.0, 0.0), (8.0, 0.0), (0.0, 8.0)]).unwrap();
        let r = tri.rasterize(8, 8).unwrap();
        // centers strictly inside x + y < 8 along the hypotenuse
        let mut expected = 0;
        for row in 0..8 {
            for col in 0..8 {
                let (x, y) = (col as f64 + 0.5, row as f64 + 0.5);
                if x + y < 8.0 {
                    expected += 1;
                    assert!(r.mask.contains(row, col), "({row},{col}) inside");
                }
            }
        }
        assert_eq!(r.mask.area(), expected);
    }

    #[test]
    fn integer_translation_shifts_mask() {
        let poly = Polygon::new(vec![(1.25, 0.75), (6.5, 2.0), (4.75, 6.25), (0.5, 4.5)]).unwrap();
        let base = poly.rasterize(16, 16).unwrap().mask;
        let shifted_poly = Polygon::new(
            poly.vertices()
                .iter()
                .map(|&(x, y)| (x + 3.0, y + 2.0))
                .collect(),
        )
        .unwrap();
        let shifted = shifted_poly.rasterize(16, 16).unwrap().mask;
        for row in 0..16 {
            for col in 0..16 {
                let src = row >= 2 && col >= 3 && base.contains(row - 2, col - 3);
                assert_eq!(shifted.contains(row, col), src, "pixel ({row},{col})");
            }
        }
    }

    #[test]
    fn bbox_validation() {
        assert!(BBox::new(0.0, 0.0, 5.0, 3.0).is_ok());
        assert!(matches!(
            BBox::new(5.0, 0.0, 0.0, 3.0),
            Err(MaskError::InvalidBBox { .. })
        ));
        assert!(matches!(
            BBox::new(f64::NAN, 0.0, 1.0, 1.0),
            Err(MaskError::InvalidBBox { .. })
        ));
    }
}
