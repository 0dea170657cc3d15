#![allow(dead_code)]

use std::path::PathBuf;

use aqsm_core::aqsm::qbs_splice;
use aqsm_core::image::{BinaryImage, GrayImage};
use rand::Rng;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/carriers")
}

pub fn random_gray(rng: &mut impl Rng, side_exp: u32) -> GrayImage {
    GrayImage::from_fn(side_exp, |_, _| rng.gen())
}

pub fn random_binary(rng: &mut impl Rng, side_exp: u32) -> BinaryImage {
    BinaryImage::from_fn(side_exp, |_, _| rng.gen::<bool>() as u8)
}

/// Aggregation oracle: splice groups of four, level by level.
pub fn iterated_splice(blocks: &[BinaryImage], d: u32) -> Vec<BinaryImage> {
    let mut level: Vec<BinaryImage> = blocks.to_vec();
    for _ in 0..d {
        level = level.chunks(4).map(|c| qbs_splice(c).unwrap()).collect();
    }
    level
}

/// Top-left corner of block `t` inside a level-`d` aggregate, by reading the
/// base-4 digits of `t` most significant first.
pub fn block_origin(t: usize, d: u32, block_side: usize) -> (usize, usize) {
    let (mut y, mut x) = (0, 0);
    for level in (0..d).rev() {
        let digit = (t >> (2 * level)) & 3;
        let half = block_side << level;
        y += (digit >> 1) * half;
        x += (digit & 1) * half;
    }
    (y, x)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Action {
    Flip,
    Keep,
}
use Action::{Flip, Keep};

/// Embedding rules transcribed row by row:
/// (tau1, tau2, V, W) -> action on a carrier LSB of 0, action on a carrier LSB of 1.
/// tau1 = 0 rows ignore tau2 and V.
/// (tau1, tau2, V, last column)
pub type Row = (u8, u8, u8, u8);

pub const EMBED_TABLE: [(Row, [Action; 2]); 10] = [
    ((1, 1, 0, 0), [Flip, Keep]),
    ((1, 1, 0, 1), [Keep, Flip]),
    ((1, 1, 1, 0), [Keep, Flip]),
    ((1, 1, 1, 1), [Flip, Keep]),
    ((1, 0, 0, 0), [Keep, Flip]),
    ((1, 0, 0, 1), [Flip, Keep]),
    ((1, 0, 1, 0), [Flip, Keep]),
    ((1, 0, 1, 1), [Keep, Flip]),
    ((0, 9, 9, 0), [Keep, Flip]),
    ((0, 9, 9, 1), [Flip, Keep]),
];

/// Extraction rules: (tau1, tau2, V, LSB) -> action on the zero-initialised
/// output bit. 9 marks a don't-care column.
pub const EXTRACT_TABLE: [(Row, Action); 10] = [
    ((1, 1, 0, 0), Flip),
    ((1, 1, 0, 1), Keep),
    ((1, 1, 1, 0), Keep),
    ((1, 1, 1, 1), Flip),
    ((1, 0, 0, 0), Keep),
    ((1, 0, 0, 1), Flip),
    ((1, 0, 1, 0), Flip),
    ((1, 0, 1, 1), Keep),
    ((0, 9, 9, 0), Keep),
    ((0, 9, 9, 1), Flip),
];

fn matches(key: (u8, u8, u8, u8), tau1: u8, tau2: u8, v: u8, last: u8) -> bool {
    let ok = |k: u8, x: u8| k == 9 || k == x;
    key.0 == tau1 && ok(key.1, tau2) && ok(key.2, v) && key.3 == last
}

pub fn table_embed(tau1: u8, tau2: u8, v: u8, w: u8, lsb: u8) -> u8 {
    let (_, actions) = EMBED_TABLE
        .iter()
        .find(|(k, _)| matches(*k, tau1, tau2, v, w))
        .expect("row exists");
    match actions[lsb as usize] {
        Flip => lsb ^ 1,
        Keep => lsb,
    }
}

pub fn table_extract(tau1: u8, tau2: u8, v: u8, lsb: u8) -> u8 {
    let (_, action) = EXTRACT_TABLE
        .iter()
        .find(|(k, _)| matches(*k, tau1, tau2, v, lsb))
        .expect("row exists");
    u8::from(*action == Flip)
}
