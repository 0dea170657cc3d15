//! Square pixel grids and bit-plane decomposition.
//!
//! Coordinates are `(y, x)` = (row, column) with the origin at the top-left
//! corner; storage is row-major. Every image has side `2^side_exp`.

use crate::error::{Error, Result};

/// Largest supported side exponent (a 32768 x 32768 image).
pub const MAX_SIDE_EXP: u32 = 15;

fn side_of(side_exp: u32) -> usize {
    1usize << side_exp
}

/// Returns `k` such that `side == 2^k`.
pub fn side_exp_of(side: usize) -> Result<u32> {
    if side == 0 || !side.is_power_of_two() {
        return Err(Error::SideNotPowerOfTwo(side));
    }
    let k = side.trailing_zeros();
    if k > MAX_SIDE_EXP {
        return Err(Error::InvalidParameter(format!(
            "side {side} exceeds 2^{MAX_SIDE_EXP}"
        )));
    }
    Ok(k)
}

/// 8-bit grayscale raster of side `2^side_exp`; the classical form of an NEQR image.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    side_exp: u32,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(side_exp: u32, pixels: Vec<u8>) -> Result<Self> {
        if side_exp > MAX_SIDE_EXP {
            return Err(Error::InvalidParameter(format!(
                "side exponent {side_exp} too large"
            )));
        }
        let side = side_of(side_exp);
        if pixels.len() != side * side {
            return Err(Error::Structural(format!(
                "expected {} pixels for side {side}, got {}",
                side * side,
                pixels.len()
            )));
        }
        Ok(Self { side_exp, pixels })
    }

    pub fn filled(side_exp: u32, value: u8) -> Self {
        let side = side_of(side_exp);
        Self {
            side_exp,
            pixels: vec![value; side * side],
        }
    }

    /// Builds an image by evaluating `f(y, x)` at every pixel.
    pub fn from_fn(side_exp: u32, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let side = side_of(side_exp);
        let mut pixels = Vec::with_capacity(side * side);
        for y in 0..side {
            for x in 0..side {
                pixels.push(f(y, x));
            }
        }
        Self { side_exp, pixels }
    }

    pub fn side_exp(&self) -> u32 {
        self.side_exp
    }

    pub fn side(&self) -> usize {
        side_of(self.side_exp)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn get(&self, y: usize, x: usize) -> u8 {
        self.pixels[y * self.side() + x]
    }

    pub fn set(&mut self, y: usize, x: usize, v: u8) {
        let side = self.side();
        self.pixels[y * side + x] = v;
    }

    /// Box-filter downscale to side `2^target_exp` (mean of each block, rounded).
    pub fn downscale(&self, target_exp: u32) -> Result<GrayImage> {
        if target_exp > self.side_exp {
            return Err(Error::UnsupportedScale(format!(
                "cannot downscale side 2^{} to 2^{target_exp}",
                self.side_exp
            )));
        }
        let f = 1usize << (self.side_exp - target_exp);
        let area = (f * f) as u64;
        Ok(GrayImage::from_fn(target_exp, |y, x| {
            let mut sum = 0u64;
            for dy in 0..f {
                for dx in 0..f {
                    sum += self.get(y * f + dy, x * f + dx) as u64;
                }
            }
            ((sum + area / 2) / area) as u8
        }))
    }
}

/// Square binary raster; entries are 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    side_exp: u32,
    bits: Vec<u8>,
}

impl BinaryImage {
    pub fn new(side_exp: u32, bits: Vec<u8>) -> Result<Self> {
        if side_exp > MAX_SIDE_EXP {
            return Err(Error::InvalidParameter(format!(
                "side exponent {side_exp} too large"
            )));
        }
        let side = side_of(side_exp);
        if bits.len() != side * side {
            return Err(Error::Structural(format!(
                "expected {} bits for side {side}, got {}",
                side * side,
                bits.len()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Structural(
                "binary image entries must be 0 or 1".into(),
            ));
        }
        Ok(Self { side_exp, bits })
    }

    pub fn zeros(side_exp: u32) -> Self {
        let side = side_of(side_exp);
        Self {
            side_exp,
            bits: vec![0; side * side],
        }
    }

    pub fn from_fn(side_exp: u32, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let side = side_of(side_exp);
        let mut bits = Vec::with_capacity(side * side);
        for y in 0..side {
            for x in 0..side {
                bits.push(f(y, x) & 1);
            }
        }
        Self { side_exp, bits }
    }

    pub fn side_exp(&self) -> u32 {
        self.side_exp
    }

    pub fn side(&self) -> usize {
        side_of(self.side_exp)
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn get(&self, y: usize, x: usize) -> u8 {
        self.bits[y * self.side() + x]
    }

    pub fn set(&mut self, y: usize, x: usize, bit: u8) {
        let side = self.side();
        self.bits[y * side + x] = bit & 1;
    }

    /// Copies `block` into this image with its top-left corner at `(y0, x0)`.
    pub(crate) fn paste(&mut self, block: &BinaryImage, y0: usize, x0: usize) {
        let side = self.side();
        let s = block.side();
        for y in 0..s {
            let dst = (y0 + y) * side + x0;
            self.bits[dst..dst + s].copy_from_slice(&block.bits[y * s..(y + 1) * s]);
        }
    }

    /// Extracts the `2^side_exp` square whose top-left corner is `(y0, x0)`.
    pub(crate) fn crop(&self, side_exp: u32, y0: usize, x0: usize) -> BinaryImage {
        let side = self.side();
        let s = side_of(side_exp);
        let mut bits = Vec::with_capacity(s * s);
        for y in 0..s {
            let src = (y0 + y) * side + x0;
            bits.extend_from_slice(&self.bits[src..src + s]);
        }
        BinaryImage { side_exp, bits }
    }
}

/// One bit plane of a grayscale image. `bit_index` 0 is the LSB.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitPlane {
    pub bit_index: u8,
    pub image: BinaryImage,
}

impl BitPlane {
    pub fn new(bit_index: u8, image: BinaryImage) -> Result<Self> {
        if bit_index > 7 {
            return Err(Error::Structural(format!(
                "bit index {bit_index} out of range"
            )));
        }
        Ok(Self { bit_index, image })
    }

    pub fn side_exp(&self) -> u32 {
        self.image.side_exp()
    }
}

/// Splits `img` into its 8 bit planes, LSB first.
pub fn decompose_bitplanes(img: &GrayImage) -> [BitPlane; 8] {
    std::array::from_fn(|b| BitPlane {
        bit_index: b as u8,
        image: BinaryImage {
            side_exp: img.side_exp,
            bits: img.pixels.iter().map(|&p| (p >> b) & 1).collect(),
        },
    })
}

/// Inverse of [`decompose_bitplanes`]. Planes may come in any order but must
/// cover bit indices 0..=7 exactly once and share one size.
pub fn reconstruct_bitplanes(planes: &[BitPlane]) -> Result<GrayImage> {
    if planes.len() != 8 {
        return Err(Error::Structural(format!(
            "expected 8 bit planes, got {}",
            planes.len()
        )));
    }
    let side_exp = planes[0].side_exp();
    let mut seen = [false; 8];
    for p in planes {
        if p.side_exp() != side_exp {
            return Err(Error::Structural("bit planes differ in size".into()));
        }
        let b = p.bit_index as usize;
        if b > 7 || seen[b] {
            return Err(Error::Structural(format!(
                "duplicate or invalid bit index {b}"
            )));
        }
        seen[b] = true;
    }
    let n = side_of(side_exp) * side_of(side_exp);
    let mut pixels = vec![0u8; n];
    for p in planes {
        for (px, &bit) in pixels.iter_mut().zip(p.image.bits()) {
            *px |= bit << p.bit_index;
        }
    }
    Ok(GrayImage { side_exp, pixels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_full_images() {
        for plane in decompose_bitplanes(&GrayImage::filled(2, 0)) {
            assert!(plane.image.bits().iter().all(|&b| b == 0));
        }
        for plane in decompose_bitplanes(&GrayImage::filled(2, 255)) {
            assert!(plane.image.bits().iter().all(|&b| b == 1));
        }
    }

    #[test]
    fn single_pixel_178() {
        let img = GrayImage::new(0, vec![178]).unwrap();
        let planes = decompose_bitplanes(&img);
        let bits: Vec<u8> = planes.iter().map(|p| p.image.bits()[0]).collect();
        assert_eq!(bits, vec![0, 1, 0, 0, 1, 1, 0, 1]);
        assert_eq!(reconstruct_bitplanes(&planes).unwrap(), img);
    }

    #[test]
    fn exhaustive_single_pixel_round_trip() {
        for v in 0..=255u8 {
            let img = GrayImage::new(0, vec![v]).unwrap();
            assert_eq!(
                reconstruct_bitplanes(&decompose_bitplanes(&img)).unwrap(),
                img
            );
        }
    }

    #[test]
    fn all_one_planes_give_255() {
        let planes: Vec<BitPlane> = (0..8)
            .map(|b| BitPlane::new(b, BinaryImage::new(1, vec![1; 4]).unwrap()).unwrap())
            .collect();
        assert_eq!(
            reconstruct_bitplanes(&planes).unwrap(),
            GrayImage::filled(1, 255)
        );
    }

    #[test]
    fn reconstruct_rejects_bad_plane_sets() {
        let img = GrayImage::from_fn(2, |y, x| (y * 4 + x) as u8 * 13);
        let mut planes = decompose_bitplanes(&img).to_vec();
        planes[3].bit_index = 2;
        assert!(matches!(
            reconstruct_bitplanes(&planes),
            Err(Error::Structural(_))
        ));

        let mut planes = decompose_bitplanes(&img).to_vec();
        planes.pop();
        assert!(reconstruct_bitplanes(&planes).is_err());

        let mut planes = decompose_bitplanes(&img).to_vec();
        planes[0].image = BinaryImage::zeros(1);
        assert!(reconstruct_bitplanes(&planes).is_err());
    }

    #[test]
    fn reconstruct_accepts_shuffled_order() {
        let img = GrayImage::from_fn(3, |y, x| (y * 37 + x * 11) as u8);
        let mut planes = decompose_bitplanes(&img).to_vec();
        planes.reverse();
        assert_eq!(reconstruct_bitplanes(&planes).unwrap(), img);
    }

    #[test]
    fn binary_image_rejects_non_binary() {
        assert!(BinaryImage::new(1, vec![0, 1, 2, 0]).is_err());
        assert!(BinaryImage::new(1, vec![0, 1, 1]).is_err());
    }

    #[test]
    fn downscale_box_mean() {
        let img = GrayImage::new(1, vec![0, 10, 20, 31]).unwrap();
        assert_eq!(img.downscale(0).unwrap().pixels(), &[15]);
        assert!(img.downscale(2).is_err());
    }

    #[test]
    fn side_exp_of_rejects_non_powers() {
        assert_eq!(side_exp_of(512).unwrap(), 9);
        assert!(side_exp_of(3).is_err());
        assert!(side_exp_of(0).is_err());
    }
}
