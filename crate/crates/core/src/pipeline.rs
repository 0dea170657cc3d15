//! End-to-end embedding and blind extraction.
//!
//! For `r > 1` the single aggregated binary image goes into LSB 1 of the
//! carrier. For `r = 1` the three spliced images go into LSB 1, 2 and 3:
//! `{b0..b3}` into LSB 1, `{b4, b6, b6, b6}` into LSB 2 and `{b5, b7, b7, b7}`
//! into LSB 3. Bits above those are never touched, so the XOR flag can be
//! recomputed from the stego image alone.

use std::path::Path;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::aqsm::{
    build_block_sequence, build_r1_images, canonical_provenance, make_scale_plan, qba_aggregate,
    qba_disaggregate, qbs_splice, qbs_split, r1_provenance, ScalePlan,
};
use crate::error::{Error, Result};
use crate::hdwm::{
    derive_params, embed_bit, extract_bit, histogram_stats, msb_xor_flag, EmbedParams,
    DEFAULT_LAMBDA,
};
use crate::image::{decompose_bitplanes, reconstruct_bitplanes, BinaryImage, BitPlane, GrayImage};

/// Side information the extractor needs. Serialized as a flat JSON object:
///
/// ```json
/// {"r":2,"lambda":0.5,"tau1":1,"tau2":1,"eta":0,"carrier_exp":9,"watermark_exp":7}
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WatermarkKey {
    pub r: u32,
    pub lambda: f64,
    pub tau1: u8,
    pub tau2: u8,
    pub eta: u8,
    pub carrier_exp: u32,
    pub watermark_exp: u32,
}

impl WatermarkKey {
    pub fn params(&self) -> EmbedParams {
        EmbedParams {
            lambda: self.lambda,
            tau1: self.tau1,
            tau2: self.tau2,
            eta: self.eta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.carrier_exp < self.watermark_exp || self.carrier_exp - self.watermark_exp != self.r
        {
            return Err(Error::InvalidKey(format!(
                "r = {} does not match carrier_exp {} - watermark_exp {}",
                self.r, self.carrier_exp, self.watermark_exp
            )));
        }
        let plan = make_scale_plan(self.r)?;
        if plan.eta != self.eta {
            return Err(Error::InvalidKey(format!(
                "eta {} inconsistent with r = {}",
                self.eta, self.r
            )));
        }
        self.params()
            .validate()
            .map_err(|e| Error::InvalidKey(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("key serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let key: WatermarkKey =
            serde_json::from_str(s).map_err(|e| Error::InvalidKey(e.to_string()))?;
        key.validate()?;
        Ok(key)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StegoImage {
    pub image: GrayImage,
    pub key: WatermarkKey,
}

/// Embedding capacity: watermark qubits over carrier qubits, `1 / 4^r`.
pub fn capacity(r: u32) -> Result<Ratio<u64>> {
    if r == 0 || r > 31 {
        return Err(Error::UnsupportedScale(format!(
            "capacity undefined for r = {r}"
        )));
    }
    Ok(Ratio::new(1, 4u64.pow(r)))
}

fn scale_factor(carrier: &GrayImage, watermark: &GrayImage) -> Result<u32> {
    let (n, m) = (carrier.side_exp(), watermark.side_exp());
    if m >= n {
        return Err(Error::UnsupportedScale(format!(
            "watermark side 2^{m} must be smaller than carrier side 2^{n}"
        )));
    }
    Ok(n - m)
}

/// Binary images carrying the watermark, one per carrier LSB (index 0 = LSB 1).
pub fn aqsm_watermarks(watermark: &GrayImage, plan: &ScalePlan) -> Result<Vec<BinaryImage>> {
    let planes = decompose_bitplanes(watermark);
    if plan.r == 1 {
        build_r1_images(&planes)?
            .iter()
            .map(|seq| qbs_splice(&seq.blocks))
            .collect()
    } else {
        let seq = build_block_sequence(&planes, plan)?;
        qba_aggregate(&seq.blocks, plan.d)
    }
}

/// Embeds with parameters derived from the watermark histogram.
pub fn embed(carrier: &GrayImage, watermark: &GrayImage, lambda: f64) -> Result<StegoImage> {
    let r = scale_factor(carrier, watermark)?;
    let params = derive_params(&histogram_stats(watermark), lambda, r)?;
    embed_with_params(carrier, watermark, params)
}

pub fn embed_default(carrier: &GrayImage, watermark: &GrayImage) -> Result<StegoImage> {
    embed(carrier, watermark, DEFAULT_LAMBDA)
}

/// Embeds with caller-chosen rule parameters (e.g. forcing plain LSB
/// substitution with `tau1 = 0`). `eta` must match the scale factor.
pub fn embed_with_params(
    carrier: &GrayImage,
    watermark: &GrayImage,
    params: EmbedParams,
) -> Result<StegoImage> {
    let r = scale_factor(carrier, watermark)?;
    let plan = make_scale_plan(r)?;
    params.validate()?;
    if params.eta != plan.eta {
        return Err(Error::InvalidParameter(format!(
            "eta {} inconsistent with r = {r}",
            params.eta
        )));
    }
    let layers = aqsm_watermarks(watermark, &plan)?;
    debug_assert!(layers.iter().all(|l| l.side_exp() == carrier.side_exp()));

    let mut out = carrier.clone();
    for (j, layer) in layers.iter().enumerate() {
        let mask = 1u8 << j;
        for (px, &w) in out.pixels_mut().iter_mut().zip(layer.bits()) {
            let v = msb_xor_flag(*px, params.eta);
            let lsb = (*px >> j) & 1;
            let bit = embed_bit(lsb, w, v, &params);
            *px = (*px & !mask) | (bit << j);
        }
    }
    let key = WatermarkKey {
        r,
        lambda: params.lambda,
        tau1: params.tau1,
        tau2: params.tau2,
        eta: params.eta,
        carrier_exp: carrier.side_exp(),
        watermark_exp: watermark.side_exp(),
    };
    Ok(StegoImage { image: out, key })
}

/// Per-position majority over an odd number of equally sized blocks.
pub fn majority_vote(copies: &[&BinaryImage]) -> Result<BinaryImage> {
    if copies.is_empty() || copies.len().is_multiple_of(2) {
        return Err(Error::Structural(format!(
            "majority vote needs an odd number of copies, got {}",
            copies.len()
        )));
    }
    let e = copies[0].side_exp();
    if copies.iter().any(|c| c.side_exp() != e) {
        return Err(Error::Structural(
            "majority vote copies differ in size".into(),
        ));
    }
    if copies.len() == 1 {
        return Ok(copies[0].clone());
    }
    let n = copies[0].bits().len();
    let mut tally = vec![0u32; n];
    for c in copies {
        for (t, &b) in tally.iter_mut().zip(c.bits()) {
            *t += b as u32;
        }
    }
    let half = (copies.len() / 2) as u32;
    BinaryImage::new(e, tally.into_iter().map(|t| u8::from(t > half)).collect())
}

/// Recovers the AQSM layers (binary images, one per used LSB) from a stego image.
pub fn extract_layers(stego: &GrayImage, key: &WatermarkKey) -> Result<Vec<BinaryImage>> {
    let layers = if key.r == 1 { 3 } else { 1 };
    let params = key.params();
    Ok((0..layers)
        .map(|j| {
            let bits = stego
                .pixels()
                .iter()
                .map(|&px| extract_bit((px >> j) & 1, msb_xor_flag(px, key.eta), &params))
                .collect();
            BinaryImage::new(stego.side_exp(), bits).expect("extracted layer has stego shape")
        })
        .collect())
}

/// Blind extraction: uses only the stego image and the key.
pub fn extract(stego: &GrayImage, key: &WatermarkKey) -> Result<GrayImage> {
    key.validate()?;
    if stego.side_exp() != key.carrier_exp {
        return Err(Error::Structural(format!(
            "stego side 2^{} does not match key carrier side 2^{}",
            stego.side_exp(),
            key.carrier_exp
        )));
    }
    let plan = make_scale_plan(key.r)?;
    let layers = extract_layers(stego, key)?;

    let mut copies: [Vec<BinaryImage>; 8] = Default::default();
    if key.r == 1 {
        for (layer, prov) in layers.iter().zip(r1_provenance()) {
            for (block, p) in qbs_split(layer)?.into_iter().zip(prov) {
                copies[p.bit_index as usize].push(block);
            }
        }
    } else {
        let blocks = qba_disaggregate(&layers[0], plan.d)?;
        for (block, p) in blocks.into_iter().zip(canonical_provenance(&plan)) {
            copies[p.bit_index as usize].push(block);
        }
    }

    let planes = copies
        .iter()
        .enumerate()
        .map(|(b, group)| {
            debug_assert_eq!(group.len() as u64, plan.copies_of(b as u8));
            let refs: Vec<&BinaryImage> = group.iter().collect();
            BitPlane::new(b as u8, majority_vote(&refs)?)
        })
        .collect::<Result<Vec<_>>>()?;
    reconstruct_bitplanes(&planes)
}
