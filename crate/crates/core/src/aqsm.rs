//! Adaptive scaling of a grayscale watermark into binary carrier-sized images.
//!
//! A watermark of side `2^m` is decomposed into bit planes, the planes are
//! replicated (the high half more often than the low half), and the replicas
//! are tiled by repeated four-way block splicing into binary images of side
//! `2^(m+d)`.
//!
//! Replication order and tile placement are fixed here and shared by the
//! embedder and the extractor:
//!
//! * sequence order: low planes (b = 0..3) for copies `1..=copies_low`, then
//!   high planes (b = 4..7) for copies `1..=copies_high`; copy-major, bit
//!   ascending within a copy.
//! * splice order: block 0 top-left, 1 top-right, 2 bottom-left, 3 bottom-right.
//! * aggregation: block `t` goes to the quadtree cell named by the base-4
//!   digits of `t`, most significant digit = outermost quadrant (Z-order).
//!
//! Plane copies are cloned directly; a quantum realization would have to
//! re-run the decomposition once per copy instead.

use crate::error::{Error, Result};
use crate::image::{BinaryImage, BitPlane};

/// Largest supported scale factor.
pub const MAX_SCALE: u32 = 8;

/// Every parameter derived from the scale factor `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalePlan {
    pub r: u32,
    pub beta: u32,
    pub alpha: u64,
    /// Aggregation level.
    pub d: u32,
    /// Number of binary images produced at level `d`.
    pub q: u64,
    /// 0: three-MSB XOR flag, 1: four-MSB XOR flag.
    pub eta: u8,
    pub copies_low: u64,
    pub copies_high: u64,
    pub block_count: u64,
}

pub fn make_scale_plan(r: u32) -> Result<ScalePlan> {
    if r == 0 {
        return Err(Error::UnsupportedScale(
            "scale factor 0 (watermark as large as the carrier) is not supported".into(),
        ));
    }
    if r > MAX_SCALE {
        return Err(Error::UnsupportedScale(format!(
            "scale factor {r} exceeds {MAX_SCALE}"
        )));
    }
    let beta = if r == 1 { 2 } else { r };
    let alpha = (1u64 << (2 * beta - 3)) - 1;
    let d = if r == 1 { 1 } else { r };
    let q = if r == 1 { 4 } else { 4u64.pow(r - d) };
    let eta = if r == 1 { 0 } else { (r % 2) as u8 };
    let (copies_low, copies_high, block_count) = if r == 1 {
        // three spliced images of four blocks: {b0,b1,b2,b3}, {b4,b6,b6,b6}, {b5,b7,b7,b7}
        (1, 1, 12)
    } else {
        (alpha, alpha + 2, 4 * (2 * alpha + 2))
    };
    Ok(ScalePlan {
        r,
        beta,
        alpha,
        d,
        q,
        eta,
        copies_low,
        copies_high,
        block_count,
    })
}

impl ScalePlan {
    /// Number of redundant copies of plane `b` carried by the stego image.
    pub fn copies_of(&self, bit_index: u8) -> u64 {
        if self.r == 1 {
            R1_MULTIPLICITY[bit_index as usize]
        } else if bit_index < 4 {
            self.copies_low
        } else {
            self.copies_high
        }
    }
}

/// Which plane copy a block is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Provenance {
    pub bit_index: u8,
    /// 1-based copy number.
    pub copy: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSequence {
    pub blocks: Vec<BinaryImage>,
    pub provenance: Vec<Provenance>,
}

impl BlockSequence {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Regroups the blocks by plane: entry `b` holds every copy of plane `b`
    /// in sequence order.
    pub fn copies_by_plane(&self) -> [Vec<&BinaryImage>; 8] {
        let mut out: [Vec<&BinaryImage>; 8] = Default::default();
        for (block, prov) in self.blocks.iter().zip(&self.provenance) {
            out[prov.bit_index as usize].push(block);
        }
        out
    }
}

/// Plane multiplicities of the r = 1 layout.
const R1_MULTIPLICITY: [u64; 8] = [1, 1, 1, 1, 1, 1, 3, 3];

/// Plane order of the three r = 1 images (LSB 1, 2, 3).
pub const R1_LAYOUT: [[u8; 4]; 3] = [[0, 1, 2, 3], [4, 6, 6, 6], [5, 7, 7, 7]];

/// Provenance of the canonical replicated sequence for `plan` (r > 1).
pub fn canonical_provenance(plan: &ScalePlan) -> Vec<Provenance> {
    let mut out = Vec::with_capacity(plan.block_count as usize);
    for copy in 1..=plan.copies_low {
        out.extend((0..4).map(|b| Provenance { bit_index: b, copy }));
    }
    for copy in 1..=plan.copies_high {
        out.extend((4..8).map(|b| Provenance { bit_index: b, copy }));
    }
    out
}

/// Provenance of the three r = 1 images, one entry per spliced block.
pub fn r1_provenance() -> [[Provenance; 4]; 3] {
    std::array::from_fn(|img| {
        let mut seen = [0u64; 8];
        std::array::from_fn(|slot| {
            let b = R1_LAYOUT[img][slot];
            seen[b as usize] += 1;
            Provenance {
                bit_index: b,
                copy: seen[b as usize],
            }
        })
    })
}

fn check_plane_set(planes: &[BitPlane]) -> Result<u32> {
    if planes.len() != 8 {
        return Err(Error::Structural(format!(
            "expected 8 bit planes, got {}",
            planes.len()
        )));
    }
    let side_exp = planes[0].side_exp();
    for (b, p) in planes.iter().enumerate() {
        if p.bit_index as usize != b {
            return Err(Error::Structural(format!(
                "plane {b} has bit index {} (planes must be in ascending order)",
                p.bit_index
            )));
        }
        if p.side_exp() != side_exp {
            return Err(Error::Structural("bit planes differ in size".into()));
        }
    }
    Ok(side_exp)
}

/// Builds the replicated block sequence fed to aggregation (r > 1).
pub fn build_block_sequence(planes: &[BitPlane], plan: &ScalePlan) -> Result<BlockSequence> {
    if plan.r <= 1 {
        return Err(Error::UnsupportedScale(
            "r = 1 uses the three-image layout (build_r1_images)".into(),
        ));
    }
    check_plane_set(planes)?;
    let provenance = canonical_provenance(plan);
    let blocks = provenance
        .iter()
        .map(|p| planes[p.bit_index as usize].image.clone())
        .collect();
    Ok(BlockSequence { blocks, provenance })
}

/// Builds the three four-block sequences used when r = 1.
pub fn build_r1_images(planes: &[BitPlane]) -> Result<[BlockSequence; 3]> {
    check_plane_set(planes)?;
    let prov = r1_provenance();
    Ok(std::array::from_fn(|i| BlockSequence {
        blocks: prov[i]
            .iter()
            .map(|p| planes[p.bit_index as usize].image.clone())
            .collect(),
        provenance: prov[i].to_vec(),
    }))
}

/// Splices four equal blocks into one image of twice the side.
pub fn qbs_splice(blocks: &[BinaryImage]) -> Result<BinaryImage> {
    if blocks.len() != 4 {
        return Err(Error::Structural(format!(
            "splice needs 4 blocks, got {}",
            blocks.len()
        )));
    }
    let e = blocks[0].side_exp();
    if blocks.iter().any(|b| b.side_exp() != e) {
        return Err(Error::Structural("splice blocks differ in size".into()));
    }
    let s = blocks[0].side();
    let mut out = BinaryImage::zeros(e + 1);
    for (i, block) in blocks.iter().enumerate() {
        out.paste(block, (i >> 1) * s, (i & 1) * s);
    }
    Ok(out)
}

/// Inverse of [`qbs_splice`].
pub fn qbs_split(img: &BinaryImage) -> Result<[BinaryImage; 4]> {
    if img.side_exp() == 0 {
        return Err(Error::Structural("cannot split a 1x1 image".into()));
    }
    let e = img.side_exp() - 1;
    let s = 1usize << e;
    Ok(std::array::from_fn(|i| {
        img.crop(e, (i >> 1) * s, (i & 1) * s)
    }))
}

/// De-interleaves a Z-order index into (row, column) cell coordinates.
fn morton_decode(t: usize, d: u32) -> (usize, usize) {
    let (mut y, mut x) = (0, 0);
    for k in 0..d {
        x |= ((t >> (2 * k)) & 1) << k;
        y |= ((t >> (2 * k + 1)) & 1) << k;
    }
    (y, x)
}

/// Aggregates blocks into images of side `2^(m + d)`; every consecutive run
/// of `4^d` blocks forms one output image.
pub fn qba_aggregate(blocks: &[BinaryImage], d: u32) -> Result<Vec<BinaryImage>> {
    if blocks.is_empty() {
        return Err(Error::Structural("no blocks to aggregate".into()));
    }
    if d > 15 {
        return Err(Error::Structural(format!(
            "aggregation level {d} too large"
        )));
    }
    let group = 1usize << (2 * d);
    if !blocks.len().is_multiple_of(group) {
        return Err(Error::Structural(format!(
            "{} blocks is not a multiple of 4^{d}",
            blocks.len()
        )));
    }
    let e = blocks[0].side_exp();
    if blocks.iter().any(|b| b.side_exp() != e) {
        return Err(Error::Structural(
            "aggregation blocks differ in size".into(),
        ));
    }
    let s = 1usize << e;
    Ok(blocks
        .chunks(group)
        .map(|chunk| {
            let mut out = BinaryImage::zeros(e + d);
            for (t, block) in chunk.iter().enumerate() {
                let (cy, cx) = morton_decode(t, d);
                out.paste(block, cy * s, cx * s);
            }
            out
        })
        .collect())
}

/// Inverse of [`qba_aggregate`] for one image: returns its `4^d` blocks in
/// sequence order.
pub fn qba_disaggregate(img: &BinaryImage, d: u32) -> Result<Vec<BinaryImage>> {
    if d > img.side_exp() {
        return Err(Error::Structural(format!(
            "image side 2^{} is not divisible by 2^{d}",
            img.side_exp()
        )));
    }
    let e = img.side_exp() - d;
    let s = 1usize << e;
    Ok((0..1usize << (2 * d))
        .map(|t| {
            let (cy, cx) = morton_decode(t, d);
            img.crop(e, cy * s, cx * s)
        })
        .collect())
}
