//! Batch evaluation: embed every carrier at every scale, attack the stego
//! images, extract, and report quality metrics as CSV.
//!
//! `visual.csv` columns:
//! `carrier,r,watermark_side,embedding,tau1,tau2,eta,mse,psnr_db,ssim`
//!
//! `robustness.csv` columns:
//! `carrier,r,embedding,attack,param,seed,psnr_db,ncc`
//!
//! PSNR is written with two decimals (`Inf` for identical images), all other
//! reals with four. Rows are sorted by carrier name, then scale, then attack
//! grid order, so output does not depend on scheduling.

use std::path::{Path, PathBuf};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::attacks::{AttackSpec, AREA_EXPONENT, RNG_ALGORITHM};
use crate::error::{Error, Result};
use crate::hdwm::{eta_for_scale, EmbedParams, DEFAULT_LAMBDA};
use crate::image::GrayImage;
use crate::metrics::{format_psnr, mse, ncc, psnr, psnr_from_mse, ssim};
use crate::pgm::load_pgm;
use crate::pipeline::{embed, embed_with_params, extract};

pub const VISUAL_HEADER: [&str; 10] = [
    "carrier",
    "r",
    "watermark_side",
    "embedding",
    "tau1",
    "tau2",
    "eta",
    "mse",
    "psnr_db",
    "ssim",
];
pub const ROBUSTNESS_HEADER: [&str; 8] = [
    "carrier",
    "r",
    "embedding",
    "attack",
    "param",
    "seed",
    "psnr_db",
    "ncc",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WatermarkSource {
    /// Generated logo, regenerated at `2^(n - r)` for every carrier and scale.
    Synthetic { bright_fraction: f64 },
    /// Grayscale PGM, box-downscaled to `2^(n - r)`.
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingMode {
    /// Rule chosen from the watermark histogram.
    #[default]
    Hdwm,
    /// Plain LSB substitution (tau1 forced to 0).
    Plain,
}

impl EmbeddingMode {
    fn as_str(self) -> &'static str {
        match self {
            EmbeddingMode::Hdwm => "hdwm",
            EmbeddingMode::Plain => "plain",
        }
    }
}

fn default_lambda() -> f64 {
    DEFAULT_LAMBDA
}

fn default_crop_exponent() -> f64 {
    AREA_EXPONENT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub corpus_dir: PathBuf,
    pub watermark: WatermarkSource,
    pub scales: Vec<u32>,
    #[serde(default)]
    pub noise_densities: Vec<f64>,
    #[serde(default)]
    pub crop_fractions: Vec<f64>,
    #[serde(default = "default_crop_exponent")]
    pub crop_exponent: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub embedding: EmbeddingMode,
    pub master_seed: u64,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64, what: &str| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} {v} not in [0, 1]")))
            }
        };
        self.noise_densities
            .iter()
            .try_for_each(|&p| unit(p, "noise density"))?;
        self.crop_fractions
            .iter()
            .try_for_each(|&p| unit(p, "crop fraction"))?;
        unit(self.lambda, "lambda")?;
        if let WatermarkSource::Synthetic { bright_fraction } = self.watermark {
            unit(bright_fraction, "bright fraction")?;
        }
        if self.scales.is_empty() || self.scales.iter().any(|&r| r == 0 || r > 8) {
            return Err(Error::InvalidParameter(format!("scales {:?}", self.scales)));
        }
        if !(self.crop_exponent > 0.0 && self.crop_exponent.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "crop exponent {}",
                self.crop_exponent
            )));
        }
        Ok(())
    }

    /// Attack grid in report order: noise densities, then crop fractions.
    fn attack_grid(&self) -> Vec<(&'static str, f64)> {
        self.noise_densities
            .iter()
            .map(|&p| ("salt_pepper", p))
            .chain(self.crop_fractions.iter().map(|&p| ("crop", p)))
            .collect()
    }
}

/// Deterministic logo-like watermark: a ring, a bar and a diagonal stroke on
/// a plain field. Exactly `round(bright_fraction * N)` pixels are bright
/// (128..=255), ranked by shape membership and then by closeness to the
/// centre; the rest are dark (0..=127). Values carry mild texture so every
/// bit plane is exercised.
pub fn synthetic_logo(side_exp: u32, bright_fraction: f64) -> GrayImage {
    let side = 1usize << side_exp;
    let n = side * side;
    let c = (side as f64 - 1.0) / 2.0;
    let rmax = (2.0f64).sqrt() * (side as f64) / 2.0 + 1e-9;
    let mut scored: Vec<(u64, usize)> = (0..n)
        .map(|i| {
            let (y, x) = ((i / side) as f64, (i % side) as f64);
            let (u, v) = ((y - c) / side as f64, (x - c) / side as f64);
            let rad = (u * u + v * v).sqrt();
            let ring = (0.28..0.40).contains(&rad);
            let bar = u.abs() < 0.06 && v.abs() < 0.30;
            let stroke = (u - v).abs() < 0.05 && rad < 0.28;
            let shape = u64::from(ring || bar || stroke);
            let close = ((1.0 - ((y - c).hypot(x - c)) / rmax) * 1e6) as u64;
            (shape * 10_000_000 + close, i)
        })
        .collect();
    scored.sort_unstable_by(|a, b| b.cmp(a));
    let bright = ((bright_fraction.clamp(0.0, 1.0) * n as f64).round() as usize).min(n);
    let mut pixels = vec![0u8; n];
    for (rank, &(_, i)) in scored.iter().enumerate() {
        let (y, x) = (i / side, i % side);
        let texture = ((y * 7 + x * 13 + (y * x) % 5) % 48) as u8;
        pixels[i] = if rank < bright {
            200 + texture
        } else {
            16 + texture
        };
    }
    GrayImage::new(side_exp, pixels).expect("square logo")
}

/// Seed for one attack point; independent of run order.
pub fn derive_seed(master: u64, carrier: &str, r: u32, attack: &str, param: f64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(carrier.as_bytes());
    h.update([0]);
    h.update(r.to_le_bytes());
    h.update(attack.as_bytes());
    h.update([0]);
    h.update(param.to_bits().to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisualRow {
    pub carrier: String,
    pub r: u32,
    pub watermark_side: usize,
    pub embedding: EmbeddingMode,
    pub params: EmbedParams,
    pub mse: f64,
    pub psnr: f64,
    pub ssim: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessRow {
    pub carrier: String,
    pub r: u32,
    pub embedding: EmbeddingMode,
    pub attack: &'static str,
    pub param: f64,
    /// Zero for unseeded attacks.
    pub seed: u64,
    pub psnr: f64,
    pub ncc: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    pub visual: Vec<VisualRow>,
    pub robustness: Vec<RobustnessRow>,
    pub failures: Vec<String>,
}

fn f4(v: f64) -> String {
    format!("{v:.4}")
}

impl ExperimentReport {
    pub fn visual_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(VISUAL_HEADER).map_err(io)?;
        for row in &self.visual {
            w.write_record([
                row.carrier.clone(),
                row.r.to_string(),
                row.watermark_side.to_string(),
                row.embedding.as_str().to_string(),
                row.params.tau1.to_string(),
                row.params.tau2.to_string(),
                row.params.eta.to_string(),
                f4(row.mse),
                format_psnr(row.psnr),
                f4(row.ssim),
            ])
            .map_err(io)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.to_string()))
    }

    pub fn robustness_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(ROBUSTNESS_HEADER).map_err(io)?;
        for row in &self.robustness {
            w.write_record([
                row.carrier.clone(),
                row.r.to_string(),
                row.embedding.as_str().to_string(),
                row.attack.to_string(),
                f4(row.param),
                row.seed.to_string(),
                format_psnr(row.psnr),
                f4(row.ncc),
            ])
            .map_err(io)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.to_string()))
    }

    /// Writes `visual.csv` and `robustness.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("visual.csv"), self.visual_csv()?)?;
        std::fs::write(dir.join("robustness.csv"), self.robustness_csv()?)?;
        Ok(())
    }
}

/// Sorted `*.pgm` files of a directory, keyed by file stem.
pub fn load_corpus(dir: impl AsRef<Path>) -> Result<Vec<(String, GrayImage)>> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("pgm")))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p
                .file_stem()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            Ok((name, load_pgm(&p)?))
        })
        .collect()
}

fn watermark_for(
    source: &WatermarkSource,
    cache: &Option<GrayImage>,
    side_exp: u32,
) -> Result<GrayImage> {
    match source {
        WatermarkSource::Synthetic { bright_fraction } => {
            Ok(synthetic_logo(side_exp, *bright_fraction))
        }
        WatermarkSource::File(_) => cache
            .as_ref()
            .expect("file watermark loaded")
            .downscale(side_exp),
    }
}

type JobOutput = (VisualRow, Vec<RobustnessRow>);

fn run_job(
    cfg: &ExperimentConfig,
    file_wm: &Option<GrayImage>,
    name: &str,
    carrier: &GrayImage,
    r: u32,
) -> Result<JobOutput> {
    if r > carrier.side_exp() {
        return Err(Error::UnsupportedScale(format!(
            "carrier side 2^{} too small for r = {r}",
            carrier.side_exp()
        )));
    }
    let wm = watermark_for(&cfg.watermark, file_wm, carrier.side_exp() - r)?;
    let stego = match cfg.embedding {
        EmbeddingMode::Hdwm => embed(carrier, &wm, cfg.lambda)?,
        EmbeddingMode::Plain => embed_with_params(
            carrier,
            &wm,
            EmbedParams::plain(cfg.lambda, eta_for_scale(r)),
        )?,
    };
    let m = mse(carrier, &stego.image)?;
    let visual = VisualRow {
        carrier: name.to_string(),
        r,
        watermark_side: wm.side(),
        embedding: cfg.embedding,
        params: stego.key.params(),
        mse: m,
        psnr: psnr_from_mse(m),
        ssim: ssim(carrier, &stego.image)?,
    };
    let mut rows = Vec::new();
    for (attack, param) in cfg.attack_grid() {
        let (spec, seed) = if attack == "salt_pepper" {
            let seed = derive_seed(cfg.master_seed, name, r, attack, param);
            (
                AttackSpec::SaltPepper {
                    density: param,
                    seed,
                },
                seed,
            )
        } else {
            (
                AttackSpec::Crop {
                    area_fraction: param,
                    exponent: cfg.crop_exponent,
                },
                0,
            )
        };
        let attacked = spec.apply(&stego.image)?;
        let recovered = extract(&attacked, &stego.key)?;
        rows.push(RobustnessRow {
            carrier: name.to_string(),
            r,
            embedding: cfg.embedding,
            attack,
            param,
            seed,
            psnr: psnr(&wm, &recovered)?,
            ncc: ncc(&wm, &recovered)?,
        });
    }
    Ok((visual, rows))
}

/// Runs the experiment over an already loaded corpus. Per-job failures are
/// collected in the report rather than aborting the run.
pub fn run_on_corpus(
    cfg: &ExperimentConfig,
    corpus: &[(String, GrayImage)],
) -> Result<ExperimentReport> {
    cfg.validate()?;
    let file_wm = match &cfg.watermark {
        WatermarkSource::File(p) => Some(load_pgm(p)?),
        WatermarkSource::Synthetic { .. } => None,
    };
    let jobs: Vec<(usize, u32)> = (0..corpus.len())
        .flat_map(|i| cfg.scales.iter().map(move |&r| (i, r)))
        .collect();
    let results: Vec<(usize, u32, Result<JobOutput>)> = jobs
        .par_iter()
        .map(|&(i, r)| {
            let (name, img) = &corpus[i];
            (i, r, run_job(cfg, &file_wm, name, img, r))
        })
        .collect();

    let mut report = ExperimentReport::default();
    let mut ok: Vec<(&str, u32, JobOutput)> = Vec::new();
    for (i, r, res) in results {
        let name = corpus[i].0.as_str();
        match res {
            Ok(out) => ok.push((name, r, out)),
            Err(e) => {
                warn!("{name} r={r}: {e}");
                report.failures.push(format!("{name} r={r}: {e}"));
            }
        }
    }
    ok.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    for (_, _, (visual, rows)) in ok {
        report.visual.push(visual);
        report.robustness.extend(rows);
    }
    report.failures.sort();
    Ok(report)
}

/// Run description written next to the CSVs: the config, the noise PRNG and
/// the failed jobs. Contains nothing run-dependent, so reruns are identical.
pub fn manifest_json(cfg: &ExperimentConfig, report: &ExperimentReport) -> String {
    let v = serde_json::json!({
        "rng_algorithm": RNG_ALGORITHM,
        "seed_derivation": "sha256(master_seed, carrier, r, attack, param)",
        "config": cfg,
        "failures": report.failures,
    });
    serde_json::to_string_pretty(&v).expect("manifest serializes") + "\n"
}

/// Loads the corpus, runs, and writes `visual.csv`, `robustness.csv` and
/// `manifest.json` to `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let corpus = load_corpus(&cfg.corpus_dir)?;
    let report = run_on_corpus(cfg, &corpus)?;
    report.write(&cfg.output_dir)?;
    std::fs::write(cfg.output_dir.join("manifest.json"), manifest_json(cfg, &report))?;
    Ok(report)
}
