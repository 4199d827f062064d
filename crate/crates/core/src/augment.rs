//! Seedable augmentation applied consistently to an image and its labels.
//!
//! HSV color jitter and Gaussian blur touch only the RGB image; the affine
//! transform is applied to the image (bilinear resampling) and to every mask
//! (nearest-neighbor on the per-instance label fields). Each instance's
//! background/visible/occluded labels are warped as one field and split
//! afterwards, so the per-instance partition and the disjointness of visible
//! masks survive augmentation exactly. Semantic labels are recomputed from
//! the warped instances. Out-of-canvas regions become black/background.

use image::RgbImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{instance_to_semantic_n, DatasetError, FrameLabels, InstanceLabels};
use crate::mask::{MaskError, MultiClassMask};

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error(transparent)]
    Mask(#[from] MaskError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("image is {iw}x{ih} but labels are {lw}x{lh}")]
    DimensionMismatch { iw: u32, ih: u32, lw: u32, lh: u32 },
    #[error("parameter {name} = {value} is out of range")]
    InvalidParam { name: &'static str, value: f64 },
    #[error("range {name} is inverted: [{min}, {max}]")]
    InvertedRange {
        name: &'static str,
        min: f64,
        max: f64,
    },
    #[error("affine transform is not invertible (det = {det:e})")]
    NonInvertibleAffine { det: f64 },
}

/// Affine applied about the image center: scale, rotation, shear, then
/// translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineParams {
    pub scale: f64,
    /// Radians, counter-clockwise in image coordinates.
    pub rotation: f64,
    /// Pixels `(dx, dy)`.
    pub translation: (f64, f64),
    /// Radians; shears x by y.
    pub shear: f64,
}

impl AffineParams {
    pub fn identity() -> Self {
        Self {
            scale: 1.0,
            rotation: 0.0,
            translation: (0.0, 0.0),
            shear: 0.0,
        }
    }

    fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

/// One draw of augmentation parameters. `rng_seed` records the seed the
/// parameters were sampled from (0 for hand-built parameters); it does not
/// influence the transform itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentParams {
    /// Hue rotation in turns, within [-0.5, 0.5].
    pub hue_shift: f64,
    pub saturation_scale: f64,
    pub value_scale: f64,
    /// Gaussian blur sigma in pixels; 0 disables the blur.
    pub blur_sigma: f64,
    pub affine: AffineParams,
    pub rng_seed: u64,
}

impl AugmentParams {
    pub fn identity() -> Self {
        Self {
            hue_shift: 0.0,
            saturation_scale: 1.0,
            value_scale: 1.0,
            blur_sigma: 0.0,
            affine: AffineParams::identity(),
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), AugmentError> {
        let checks: [(&'static str, f64, bool); 6] = [
            (
                "hue_shift",
                self.hue_shift,
                (-0.5..=0.5).contains(&self.hue_shift),
            ),
            (
                "saturation_scale",
                self.saturation_scale,
                self.saturation_scale > 0.0 && self.saturation_scale.is_finite(),
            ),
            (
                "value_scale",
                self.value_scale,
                self.value_scale > 0.0 && self.value_scale.is_finite(),
            ),
            (
                "blur_sigma",
                self.blur_sigma,
                self.blur_sigma >= 0.0 && self.blur_sigma.is_finite(),
            ),
            (
                "scale",
                self.affine.scale,
                self.affine.scale > 0.0 && self.affine.scale.is_finite(),
            ),
            (
                "rotation",
                self.affine.rotation,
                self.affine.rotation.is_finite(),
            ),
        ];
        for (name, value, ok) in checks {
            if !ok {
                return Err(AugmentError::InvalidParam { name, value });
            }
        }
        Ok(())
    }
}

/// Per-field `[min, max]` intervals that [`sample_params`] draws from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentRanges {
    pub hue_shift: (f64, f64),
    pub saturation_scale: (f64, f64),
    pub value_scale: (f64, f64),
    pub blur_sigma: (f64, f64),
    pub scale: (f64, f64),
    pub rotation: (f64, f64),
    /// Pixels.
    pub translation_x: (f64, f64),
    pub translation_y: (f64, f64),
    pub shear: (f64, f64),
}

impl AugmentRanges {
    /// Degenerate ranges that always produce the identity parameters.
    pub fn identity() -> Self {
        Self {
            hue_shift: (0.0, 0.0),
            saturation_scale: (1.0, 1.0),
            value_scale: (1.0, 1.0),
            blur_sigma: (0.0, 0.0),
            scale: (1.0, 1.0),
            rotation: (0.0, 0.0),
            translation_x: (0.0, 0.0),
            translation_y: (0.0, 0.0),
            shear: (0.0, 0.0),
        }
    }

    /// Mild default magnitudes for a given canvas: hue up to ±0.05 turns,
    /// saturation/value scaled by 0.7..1.3, blur sigma up to 1.5 px, scale
    /// 0.8..1.2, rotation and shear within ±15° and ±10°, translation within
    /// ±10% of each side.
    pub fn defaults_for(height: u32, width: u32) -> Self {
        let deg = std::f64::consts::PI / 180.0;
        Self {
            hue_shift: (-0.05, 0.05),
            saturation_scale: (0.7, 1.3),
            value_scale: (0.7, 1.3),
            blur_sigma: (0.0, 1.5),
            scale: (0.8, 1.2),
            rotation: (-15.0 * deg, 15.0 * deg),
            translation_x: (-0.1 * width as f64, 0.1 * width as f64),
            translation_y: (-0.1 * height as f64, 0.1 * height as f64),
            shear: (-10.0 * deg, 10.0 * deg),
        }
    }

    fn validate(&self) -> Result<(), AugmentError> {
        let fields = [
            ("hue_shift", self.hue_shift),
            ("saturation_scale", self.saturation_scale),
            ("value_scale", self.value_scale),
            ("blur_sigma", self.blur_sigma),
            ("scale", self.scale),
            ("rotation", self.rotation),
            ("translation_x", self.translation_x),
            ("translation_y", self.translation_y),
            ("shear", self.shear),
        ];
        for (name, (min, max)) in fields {
            if min > max || min.is_nan() || max.is_nan() {
                return Err(AugmentError::InvertedRange { name, min, max });
            }
        }
        Ok(())
    }
}

/// Draws parameters uniformly from `ranges`, deterministically for a fixed
/// seed.
pub fn sample_params(ranges: &AugmentRanges, seed: u64) -> Result<AugmentParams, AugmentError> {
    ranges.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |(lo, hi): (f64, f64)| -> f64 {
        if lo == hi {
            lo
        } else {
            rng.gen_range(lo..=hi)
        }
    };
    let params = AugmentParams {
        hue_shift: draw(ranges.hue_shift),
        saturation_scale: draw(ranges.saturation_scale),
        value_scale: draw(ranges.value_scale),
        blur_sigma: draw(ranges.blur_sigma),
        affine: AffineParams {
            scale: draw(ranges.scale),
            rotation: draw(ranges.rotation),
            translation: (draw(ranges.translation_x), draw(ranges.translation_y)),
            shear: draw(ranges.shear),
        },
        rng_seed: seed,
    };
    params.validate()?;
    Ok(params)
}

/// An RGB image paired with the frame labels sharing its canvas.
#[derive(Debug, Clone)]
pub struct Sample {
    pub image: RgbImage,
    pub labels: FrameLabels,
}

impl Sample {
    pub fn new(image: RgbImage, labels: FrameLabels) -> Result<Self, AugmentError> {
        let (lh, lw) = (
            labels.semantic_visible.height(),
            labels.semantic_visible.width(),
        );
        if image.width() != lw || image.height() != lh {
            return Err(AugmentError::DimensionMismatch {
                iw: image.width(),
                ih: image.height(),
                lw,
                lh,
            });
        }
        Ok(Self { image, labels })
    }
}

/// 2x3 affine matrix mapping `(x, y)` to `(a x + b y + tx, c x + d y + ty)`.
#[derive(Debug, Clone, Copy)]
struct Affine2 {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    tx: f64,
    ty: f64,
}

impl Affine2 {
    /// Forward map of the augmentation affine about the canvas center.
    fn from_params(p: &AffineParams, height: u32, width: u32) -> Self {
        let (cos, sin) = (p.rotation.cos(), p.rotation.sin());
        let sh = p.shear.tan();
        // scale * R(rotation) * Shear(shear)
        let a = p.scale * cos;
        let b = p.scale * (cos * sh - sin);
        let c = p.scale * sin;
        let d = p.scale * (sin * sh + cos);
        let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
        // q = A (p - center) + center + t
        Self {
            a,
            b,
            c,
            d,
            tx: cx + p.translation.0 - (a * cx + b * cy),
            ty: cy + p.translation.1 - (c * cx + d * cy),
        }
    }

    fn inverse(&self) -> Result<Self, AugmentError> {
        let det = self.a * self.d - self.b * self.c;
        if det.abs() <= 1e-9 {
            return Err(AugmentError::NonInvertibleAffine { det });
        }
        let (a, b, c, d) = (self.d / det, -self.b / det, -self.c / det, self.a / det);
        Ok(Self {
            a,
            b,
            c,
            d,
            tx: -(a * self.tx + b * self.ty),
            ty: -(c * self.tx + d * self.ty),
        })
    }

    fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.a * x + self.b * y + self.tx,
            self.c * x + self.d * y + self.ty,
        )
    }
}

/// Nearest-neighbor warp of a discrete field: each output pixel takes the
/// value of the source pixel containing the inverse-mapped center, or `fill`
/// outside the canvas.
fn warp_nearest<T: Copy>(src: &[T], height: u32, width: u32, fill: T, inv: &Affine2) -> Vec<T> {
    let (h, w) = (height as usize, width as usize);
    let mut out = vec![fill; h * w];
    for row in 0..h {
        for col in 0..w {
            let (x, y) = inv.apply(col as f64 + 0.5, row as f64 + 0.5);
            let sc = x.floor();
            let sr = y.floor();
            if sc >= 0.0 && sr >= 0.0 && (sc as usize) < w && (sr as usize) < h {
                out[row * w + col] = src[sr as usize * w + sc as usize];
            }
        }
    }
    out
}

/// Bilinear warp of the RGB image; out-of-canvas neighbors read as black.
fn warp_bilinear_rgb(src: &RgbImage, inv: &Affine2) -> RgbImage {
    let (w, h) = (src.width() as i64, src.height() as i64);
    let mut out = RgbImage::new(src.width(), src.height());
    for row in 0..src.height() {
        for col in 0..src.width() {
            let (x, y) = inv.apply(col as f64 + 0.5, row as f64 + 0.5);
            let fx = x - 0.5;
            let fy = y - 0.5;
            let c0 = fx.floor();
            let r0 = fy.floor();
            let tx = fx - c0;
            let ty = fy - r0;
            let mut acc = [0.0f64; 3];
            for (dr, wy) in [(0i64, 1.0 - ty), (1, ty)] {
                for (dc, wx) in [(0i64, 1.0 - tx), (1, tx)] {
                    let sr = r0 as i64 + dr;
                    let sc = c0 as i64 + dc;
                    if sr >= 0 && sc >= 0 && sr < h && sc < w {
                        let px = src.get_pixel(sc as u32, sr as u32);
                        let weight = wy * wx;
                        for (slot, &v) in acc.iter_mut().zip(&px.0) {
                            *slot += weight * v as f64;
                        }
                    }
                }
            }
            out.put_pixel(col, row, image::Rgb(acc.map(round_u8)));
        }
    }
    out
}

fn round_u8(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

fn rgb_to_hsv(r: u8, g: u8, b: u8) -> (f64, f64, f64) {
    let r = r as f64 / 255.0;
    let g = g as f64 / 255.0;
    let b = b as f64 / 255.0;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        (((g - b) / delta).rem_euclid(6.0)) / 6.0
    } else if max == g {
        ((b - r) / delta + 2.0) / 6.0
    } else {
        ((r - g) / delta + 4.0) / 6.0
    };
    let s = if max == 0.0 { 0.0 } else { delta / max };
    (h, s, max)
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> (u8, u8, u8) {
    let h6 = (h.rem_euclid(1.0)) * 6.0;
    let sector = (h6.floor() as i64).rem_euclid(6) as u8;
    let f = h6 - h6.floor();
    let p = v * (1.0 - s);
    let q = v * (1.0 - f * s);
    let t = v * (1.0 - (1.0 - f) * s);
    let (r, g, b) = match sector {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    (
        round_u8(r * 255.0),
        round_u8(g * 255.0),
        round_u8(b * 255.0),
    )
}

fn apply_hsv(image: &mut RgbImage, hue_shift: f64, sat_scale: f64, val_scale: f64) {
    for px in image.pixels_mut() {
        let (h, s, v) = rgb_to_hsv(px.0[0], px.0[1], px.0[2]);
        let (r, g, b) = hsv_to_rgb(
            (h + hue_shift).rem_euclid(1.0),
            (s * sat_scale).clamp(0.0, 1.0),
            (v * val_scale).clamp(0.0, 1.0),
        );
        px.0 = [r, g, b];
    }
}

/// Separable Gaussian blur with clamp-to-edge borders; sigma 0 is a no-op.
fn gaussian_blur(image: &RgbImage, sigma: f64) -> RgbImage {
    let radius = (3.0 * sigma).ceil().max(1.0) as i64;
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let norm: f64 = kernel.iter().sum();

    let (w, h) = (image.width() as i64, image.height() as i64);
    let read = |buf: &[f64], x: i64, y: i64, ch: usize| -> f64 {
        let x = x.clamp(0, w - 1);
        let y = y.clamp(0, h - 1);
        buf[((y * w + x) * 3) as usize + ch]
    };

    let src: Vec<f64> = image.as_raw().iter().map(|&v| v as f64).collect();
    let mut horiz = vec![0.0f64; src.len()];
    for y in 0..h {
        for x in 0..w {
            for ch in 0..3 {
                let mut acc = 0.0;
                for (ki, &kv) in kernel.iter().enumerate() {
                    acc += kv * read(&src, x + ki as i64 - radius, y, ch);
                }
                horiz[((y * w + x) * 3) as usize + ch] = acc / norm;
            }
        }
    }
    let mut out = RgbImage::new(image.width(), image.height());
    for y in 0..h {
        for x in 0..w {
            let mut px = [0u8; 3];
            for (ch, slot) in px.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (ki, &kv) in kernel.iter().enumerate() {
                    acc += kv * read(&horiz, x, y + ki as i64 - radius, ch);
                }
                *slot = round_u8(acc / norm);
            }
            out.put_pixel(x as u32, y as u32, image::Rgb(px));
        }
    }
    out
}

/// Applies the full augmentation. Identity parameters return a bit-identical
/// copy of the input.
pub fn augment_sample(sample: &Sample, params: &AugmentParams) -> Result<Sample, AugmentError> {
    params.validate()?;
    let height = sample.image.height();
    let width = sample.image.width();

    let mut image = sample.image.clone();
    if params.hue_shift != 0.0 || params.saturation_scale != 1.0 || params.value_scale != 1.0 {
        apply_hsv(
            &mut image,
            params.hue_shift,
            params.saturation_scale,
            params.value_scale,
        );
    }
    if params.blur_sigma > 0.0 {
        image = gaussian_blur(&image, params.blur_sigma);
    }

    if params.affine.is_identity() {
        return Ok(Sample {
            image,
            labels: sample.labels.clone(),
        });
    }

    let forward = Affine2::from_params(&params.affine, height, width);
    let inv = forward.inverse()?;

    let image = warp_bilinear_rgb(&image, &inv);

    let mut instances = Vec::with_capacity(sample.labels.instances.len());
    for inst in &sample.labels.instances {
        let field = MultiClassMask::from_masks(&inst.visible, &inst.occluded)?;
        let warped = warp_nearest(field.labels(), height, width, 0u8, &inv);
        let (visible, occluded) = MultiClassMask::new(height, width, warped)?.split();
        let whole = visible.union(&occluded)?;
        instances.push(InstanceLabels {
            id: inst.id,
            class_id: inst.class_id,
            whole,
            visible,
            occluded,
        });
    }
    let n_class = sample.labels.semantic_occluded.len() + 1;
    let (semantic_visible, semantic_occluded) =
        instance_to_semantic_n(&instances, n_class, height, width)?;

    Ok(Sample {
        image,
        labels: FrameLabels {
            frame: sample.labels.frame,
            instances,
            semantic_visible,
            semantic_occluded,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::LabelImage;
    use crate::mask::BinaryMask;

    fn rect_mask(
        h: u32,
        w: u32,
        rows: std::ops::Range<u32>,
        cols: std::ops::Range<u32>,
    ) -> BinaryMask {
        let pixels: Vec<bool> = (0..h)
            .flat_map(|r| {
                let cols = cols.clone();
                let on = rows.contains(&r);
                (0..w).map(move |c| on && cols.contains(&c))
            })
            .collect();
        BinaryMask::from_pixels(h, w, &pixels).unwrap()
    }

    fn test_sample(h: u32, w: u32) -> Sample {
        let mut image = RgbImage::new(w, h);
        for (x, y, px) in image.enumerate_pixels_mut() {
            px.0 = [
                (x * 23 % 256) as u8,
                (y * 41 % 256) as u8,
                ((x + y) * 7 % 256) as u8,
            ];
        }
        let visible = rect_mask(h, w, 2..h - 4, 2..w / 2);
        let occluded = rect_mask(h, w, 2..h - 4, w / 2..w - 3);
        let whole = visible.union(&occluded).unwrap();
        let instances = vec![InstanceLabels {
            id: 1,
            class_id: 1,
            whole,
            visible,
            occluded,
        }];
        let (semantic_visible, semantic_occluded) =
            instance_to_semantic_n(&instances, 2, h, w).unwrap();
        Sample::new(
            image,
            FrameLabels {
                frame: 0,
                instances,
                semantic_visible,
                semantic_occluded,
            },
        )
        .unwrap()
    }

    #[test]
    fn identity_is_bitwise() {
        let sample = test_sample(16, 20);
        let out = augment_sample(&sample, &AugmentParams::identity()).unwrap();
        assert_eq!(out.image.as_raw(), sample.image.as_raw());
        assert_eq!(out.labels, sample.labels);
    }

    #[test]
    fn integer_translation_matches_pixel_shift() {
        let sample = test_sample(16, 20);
        let params = AugmentParams {
            affine: AffineParams {
                translation: (5.0, 0.0),
                ..AffineParams::identity()
            },
            ..AugmentParams::identity()
        };
        let out = augment_sample(&sample, &params).unwrap();
        // image: every pixel moved 5 columns right, zeros filled in
        for y in 0..16u32 {
            for x in 0..20u32 {
                let expected = if x >= 5 {
                    *sample.image.get_pixel(x - 5, y)
                } else {
                    image::Rgb([0, 0, 0])
                };
                assert_eq!(*out.image.get_pixel(x, y), expected, "pixel ({x},{y})");
            }
        }
        // masks: same shift
        let inst = &out.labels.instances[0];
        let orig = &sample.labels.instances[0];
        for r in 0..16u32 {
            for c in 0..20u32 {
                let expected = c >= 5 && orig.visible.contains(r, c - 5);
                assert_eq!(inst.visible.contains(r, c), expected, "visible ({r},{c})");
            }
        }
    }

    #[test]
    fn value_scale_halves_gray() {
        let gray = RgbImage::from_pixel(8, 8, image::Rgb([100, 100, 100]));
        let labels = FrameLabels {
            frame: 0,
            instances: vec![],
            semantic_visible: LabelImage::zeros(8, 8),
            semantic_occluded: vec![BinaryMask::empty(8, 8).unwrap()],
        };
        let sample = Sample::new(gray, labels).unwrap();
        let params = AugmentParams {
            value_scale: 0.5,
            ..AugmentParams::identity()
        };
        let out = augment_sample(&sample, &params).unwrap();
        for px in out.image.pixels() {
            for ch in 0..3 {
                assert!(
                    (px.0[ch] as i32 - 50).abs() <= 1,
                    "channel {} was {}",
                    ch,
                    px.0[ch]
                );
            }
        }
    }

    #[test]
    fn zero_blur_is_a_noop() {
        let sample = test_sample(12, 12);
        let params = AugmentParams {
            blur_sigma: 0.0,
            ..AugmentParams::identity()
        };
        let out = augment_sample(&sample, &params).unwrap();
        assert_eq!(out.image.as_raw(), sample.image.as_raw());
    }

    #[test]
    fn blur_preserves_uniform_image() {
        let flat = RgbImage::from_pixel(10, 10, image::Rgb([137, 42, 200]));
        let blurred = gaussian_blur(&flat, 1.2);
        assert_eq!(blurred.as_raw(), flat.as_raw());
    }

    #[test]
    fn partition_survives_arbitrary_affine() {
        let sample = test_sample(24, 24);
        let params = AugmentParams {
            affine: AffineParams {
                scale: 1.1,
                rotation: 0.3,
                translation: (1.7, -2.3),
                shear: 0.1,
            },
            ..AugmentParams::identity()
        };
        let out = augment_sample(&sample, &params).unwrap();
        let inst = &out.labels.instances[0];
        assert_eq!(inst.visible.intersection_area(&inst.occluded).unwrap(), 0);
        assert_eq!(
            inst.visible.union(&inst.occluded).unwrap(),
            inst.whole,
            "visible and occluded must partition the whole mask"
        );
    }

    #[test]
    fn nearest_warp_consistent_with_indicator_image() {
        // warping the joint label field then splitting must equal warping
        // each mask as a standalone indicator image
        let sample = test_sample(20, 20);
        let params = AffineParams {
            scale: 0.9,
            rotation: -0.4,
            translation: (2.5, 1.5),
            shear: -0.05,
        };
        let inv = Affine2::from_params(&params, 20, 20).inverse().unwrap();
        let inst = &sample.labels.instances[0];

        let field = MultiClassMask::from_masks(&inst.visible, &inst.occluded).unwrap();
        let joint = warp_nearest(field.labels(), 20, 20, 0u8, &inv);
        let (vis_joint, _) = MultiClassMask::new(20, 20, joint).unwrap().split();

        let indicator: Vec<u8> = inst
            .visible
            .to_pixels()
            .iter()
            .map(|&b| if b { 255 } else { 0 })
            .collect();
        let warped = warp_nearest(&indicator, 20, 20, 0u8, &inv);
        let vis_indicator = BinaryMask::from_pixels(
            20,
            20,
            &warped.iter().map(|&v| v > 0).collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(vis_joint, vis_indicator);
    }

    #[test]
    fn integer_translations_compose() {
        // away from clipping, t1 then t2 equals t1 + t2 for integer shifts
        let sample = test_sample(24, 24);
        let translate = |t: (f64, f64)| AugmentParams {
            affine: AffineParams {
                translation: t,
                ..AffineParams::identity()
            },
            ..AugmentParams::identity()
        };
        let step1 = augment_sample(&sample, &translate((2.0, 1.0))).unwrap();
        let step2 = augment_sample(&step1, &translate((1.0, 2.0))).unwrap();
        let direct = augment_sample(&sample, &translate((3.0, 3.0))).unwrap();
        assert_eq!(step2.labels.instances, direct.labels.instances);
    }

    #[test]
    fn degenerate_scale_is_rejected() {
        let sample = test_sample(8, 8);
        let params = AugmentParams {
            affine: AffineParams {
                scale: 1e-6,
                ..AffineParams::identity()
            },
            ..AugmentParams::identity()
        };
        assert!(matches!(
            augment_sample(&sample, &params),
            Err(AugmentError::NonInvertibleAffine { .. })
        ));
    }

    #[test]
    fn sample_params_is_deterministic() {
        let ranges = AugmentRanges::defaults_for(32, 32);
        let a = sample_params(&ranges, 42).unwrap();
        let b = sample_params(&ranges, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_params(&ranges, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn degenerate_ranges_give_exact_values() {
        let params = sample_params(&AugmentRanges::identity(), 7).unwrap();
        assert_eq!(
            params,
            AugmentParams {
                rng_seed: 7,
                ..AugmentParams::identity()
            }
        );
    }

    #[test]
    fn inverted_range_is_rejected() {
        let mut ranges = AugmentRanges::identity();
        ranges.blur_sigma = (1.0, 0.5);
        assert!(matches!(
            sample_params(&ranges, 0),
            Err(AugmentError::InvertedRange {
                name: "blur_sigma",
                ..
            })
        ));
    }

    #[test]
    fn hue_draws_are_centered() {
        let mut ranges = AugmentRanges::identity();
        ranges.hue_shift = (-0.1, 0.1);
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|i| sample_params(&ranges, i).unwrap().hue_shift)
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() < 0.01, "mean hue draw {mean} too far from 0");
    }

    #[test]
    fn hsv_roundtrip_of_primaries() {
        for (r, g, b) in [(255, 0, 0), (0, 255, 0), (0, 0, 255), (128, 64, 32)] {
            let (h, s, v) = rgb_to_hsv(r, g, b);
            assert_eq!(hsv_to_rgb(h, s, v), (r, g, b));
        }
    }
}
