//! Seeded attack simulators: salt-and-pepper noise and top-left cropping.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Generator identifier recorded next to every seeded result.
pub const RNG_ALGORITHM: &str = "chacha8(rand_chacha-0.3)+partial-fisher-yates";

/// Default crop exponent: side = N * fraction^0.5, i.e. the fraction is an area.
pub const AREA_EXPONENT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttackSpec {
    SaltPepper {
        density: f64,
        seed: u64,
    },
    Crop {
        area_fraction: f64,
        #[serde(default = "default_exponent")]
        exponent: f64,
    },
}

fn default_exponent() -> f64 {
    AREA_EXPONENT
}

impl AttackSpec {
    pub fn validate(&self) -> Result<()> {
        let v = match *self {
            AttackSpec::SaltPepper { density, .. } => density,
            AttackSpec::Crop {
                area_fraction,
                exponent,
            } => {
                if !(exponent > 0.0 && exponent.is_finite()) {
                    return Err(Error::InvalidParameter(format!("crop exponent {exponent}")));
                }
                area_fraction
            }
        };
        check_unit(v)
    }

    pub fn apply(&self, img: &GrayImage) -> Result<GrayImage> {
        match *self {
            AttackSpec::SaltPepper { density, seed } => salt_pepper(img, density, seed),
            AttackSpec::Crop {
                area_fraction,
                exponent,
            } => crop_topleft_with_exponent(img, area_fraction, exponent),
        }
    }
}

fn check_unit(v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "attack parameter {v} not in [0, 1]"
        )))
    }
}

/// Replaces exactly `round(p * N)` distinct pixels with 0 or 255.
pub fn salt_pepper(img: &GrayImage, p: f64, seed: u64) -> Result<GrayImage> {
    check_unit(p)?;
    let n = img.len();
    let count = ((p * n as f64).round() as usize).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut out = img.clone();
    let px = out.pixels_mut();
    for i in 0..count {
        let j = rng.gen_range(i..n);
        order.swap(i, j);
        px[order[i]] = if rng.gen::<bool>() { 255 } else { 0 };
    }
    Ok(out)
}

/// Zeroes the top-left square covering `area_fraction` of the image.
pub fn crop_topleft(img: &GrayImage, area_fraction: f64) -> Result<GrayImage> {
    crop_topleft_with_exponent(img, area_fraction, AREA_EXPONENT)
}

/// Zeroes the top-left square of side `round(N * fraction^exponent)`.
/// Exponent 0.5 reads the fraction as an area, 1.0 as a side length.
pub fn crop_topleft_with_exponent(
    img: &GrayImage,
    fraction: f64,
    exponent: f64,
) -> Result<GrayImage> {
    check_unit(fraction)?;
    let n = img.side();
    let side = ((n as f64 * fraction.powf(exponent)).round() as usize).min(n);
    let mut out = img.clone();
    let px = out.pixels_mut();
    for y in 0..side {
        px[y * n..y * n + side].fill(0);
    }
    Ok(out)
}
