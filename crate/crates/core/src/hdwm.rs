//! Histogram-driven choice of the per-pixel embedding rule.
//!
//! The watermark's dark (0..=127) and bright (128..=255) mass decide which of
//! three bit rules is used. Each rule writes a carrier LSB as a function of
//! the watermark bit `w` and the XOR flag `v` of the carrier pixel's top
//! three (eta = 0) or four (eta = 1) bits:
//!
//! | tau1 | tau2 | written LSB  | read-back bit |
//! |------|------|--------------|---------------|
//! | 0    | -    | `w`          | `lsb`         |
//! | 1    | 0    | `w ^ v`      | `lsb ^ v`     |
//! | 1    | 1    | `!(w ^ v)`   | `!(lsb ^ v)`  |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Default division threshold.
pub const DEFAULT_LAMBDA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramStats {
    pub counts: [u64; 256],
    pub cumulative: [u64; 256],
    pub t_dark: f64,
    pub t_bright: f64,
}

impl HistogramStats {
    pub fn pixel_count(&self) -> u64 {
        self.cumulative[255]
    }
}

pub fn histogram_stats(img: &GrayImage) -> HistogramStats {
    let mut counts = [0u64; 256];
    for &p in img.pixels() {
        counts[p as usize] += 1;
    }
    let mut cumulative = [0u64; 256];
    let mut acc = 0;
    for (c, &h) in cumulative.iter_mut().zip(&counts) {
        acc += h;
        *c = acc;
    }
    let dark = cumulative[127];
    let total = cumulative[255];
    let t_dark = dark as f64 / total as f64;
    let t_bright = (total - dark) as f64 / total as f64;
    HistogramStats {
        counts,
        cumulative,
        t_dark,
        t_bright,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbedParams {
    pub lambda: f64,
    pub tau1: u8,
    /// Ignored when `tau1 == 0`.
    pub tau2: u8,
    pub eta: u8,
}

impl EmbedParams {
    /// Plain LSB substitution (`tau1 = 0`).
    pub fn plain(lambda: f64, eta: u8) -> Self {
        Self {
            lambda,
            tau1: 0,
            tau2: 0,
            eta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidParameter(format!(
                "lambda {} not in [0, 1]",
                self.lambda
            )));
        }
        if self.tau1 > 1 || self.tau2 > 1 || self.eta > 1 {
            return Err(Error::InvalidParameter(
                "tau1, tau2 and eta must be 0 or 1".into(),
            ));
        }
        Ok(())
    }
}

/// XOR index for scale factor `r`.
pub fn eta_for_scale(r: u32) -> u8 {
    if r <= 1 {
        0
    } else {
        (r % 2) as u8
    }
}

pub fn derive_params(stats: &HistogramStats, lambda: f64, r: u32) -> Result<EmbedParams> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "lambda {lambda} not in [0, 1]"
        )));
    }
    let eta = eta_for_scale(r);
    let tau1 = u8::from((stats.t_bright - stats.t_dark).abs() >= lambda);
    // dark-dominant (or tau1 = 0) -> 0; with t_dark + t_bright = 1 the other
    // case is t_bright >= (1 + lambda) / 2
    let dark = tau1 == 0 || stats.t_dark >= (1.0 + lambda) / 2.0;
    let tau2 = u8::from(!dark);
    Ok(EmbedParams {
        lambda,
        tau1,
        tau2,
        eta,
    })
}

/// XOR of the top three (`eta = 0`) or four (`eta = 1`) bits of `pixel`.
#[inline]
pub fn msb_xor_flag(pixel: u8, eta: u8) -> u8 {
    let mask = if eta == 0 {
        0b1110_0000u8
    } else {
        0b1111_0000u8
    };
    ((pixel & mask).count_ones() & 1) as u8
}

/// Bit written to the carrier LSB. Independent of the carrier's previous LSB.
#[inline]
pub fn embed_bit(_lsb: u8, w: u8, v: u8, params: &EmbedParams) -> u8 {
    match (params.tau1, params.tau2) {
        (0, _) => w & 1,
        (_, 0) => (w ^ v) & 1,
        _ => !(w ^ v) & 1,
    }
}

/// Watermark bit read back from a carrier LSB.
#[inline]
pub fn extract_bit(lsb: u8, v: u8, params: &EmbedParams) -> u8 {
    match (params.tau1, params.tau2) {
        (0, _) => lsb & 1,
        (_, 0) => (lsb ^ v) & 1,
        _ => !(lsb ^ v) & 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(tau1: u8, tau2: u8) -> EmbedParams {
        EmbedParams {
            lambda: 0.5,
            tau1,
            tau2,
            eta: 0,
        }
    }

    #[test]
    fn stats_examples() {
        let s = histogram_stats(&GrayImage::filled(2, 0));
        assert_eq!((s.t_dark, s.t_bright), (1.0, 0.0));
        let s = histogram_stats(&GrayImage::new(1, vec![0, 50, 200, 255]).unwrap());
        assert_eq!(s.t_dark, 0.5);
        assert_eq!(s.pixel_count(), 4);
        let s = histogram_stats(&GrayImage::filled(2, 255));
        assert_eq!(s.t_bright, 1.0);
    }

    #[test]
    fn params_examples() {
        let even = histogram_stats(&GrayImage::new(1, vec![0, 50, 200, 255]).unwrap());
        assert_eq!(derive_params(&even, 0.5, 2).unwrap().tau1, 0);

        // 9 of 10 dark is not representable on a 2^k grid; build stats by hand
        let mut dark = even.clone();
        dark.t_dark = 0.9;
        dark.t_bright = 0.1;
        let p = derive_params(&dark, 0.5, 2).unwrap();
        assert_eq!((p.tau1, p.tau2), (1, 0));

        let bright = histogram_stats(&GrayImage::filled(1, 200));
        let p = derive_params(&bright, 0.5, 2).unwrap();
        assert_eq!((p.tau1, p.tau2), (1, 1));

        assert_eq!(derive_params(&even, 0.5, 3).unwrap().eta, 1);
        assert_eq!(derive_params(&even, 0.5, 1).unwrap().eta, 0);
        assert!(derive_params(&even, 1.5, 2).is_err());
    }

    #[test]
    fn boundary_difference_sets_tau1() {
        // 3 of 4 dark: |0.25 - 0.75| = 0.5 = lambda
        let s = histogram_stats(&GrayImage::new(1, vec![0, 0, 0, 255]).unwrap());
        let p = derive_params(&s, 0.5, 2).unwrap();
        assert_eq!((p.tau1, p.tau2), (1, 0));
    }

    #[test]
    fn xor_flag_examples() {
        assert_eq!(msb_xor_flag(0, 0), 0);
        assert_eq!(msb_xor_flag(0, 1), 0);
        assert_eq!(msb_xor_flag(0b1010_0000, 0), 0);
        assert_eq!(msb_xor_flag(0b1011_0000, 1), 1);
        assert_eq!(msb_xor_flag(255, 0), 1);
        assert_eq!(msb_xor_flag(255, 1), 0);
    }

    #[test]
    fn table_examples() {
        assert_eq!(embed_bit(0, 0, 0, &params(1, 1)), 1);
        assert_eq!(embed_bit(0, 1, 0, &params(0, 0)), 1);
        assert_eq!(embed_bit(1, 1, 0, &params(0, 0)), 1);
        assert_eq!(extract_bit(0, 0, &params(1, 1)), 1);
        assert_eq!(extract_bit(1, 0, &params(0, 0)), 1);
    }

    #[test]
    fn embed_then_extract_is_identity() {
        for (t1, t2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let p = params(t1, t2);
            for v in 0..2 {
                for w in 0..2 {
                    for lsb in 0..2 {
                        assert_eq!(extract_bit(embed_bit(lsb, w, v, &p), v, &p), w);
                    }
                }
            }
        }
    }
}
