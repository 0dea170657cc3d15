mod common;

use std::path::Path;

use aqsm_core::experiment::{
    derive_seed, run_experiment, synthetic_logo, EmbeddingMode, ExperimentConfig, WatermarkSource,
    ROBUSTNESS_HEADER, VISUAL_HEADER,
};
use aqsm_core::pgm::save_pgm;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::random_gray;

fn small_corpus(dir: &Path, count: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..count {
        save_pgm(&random_gray(&mut rng, 6), dir.join(format!("img{i}.pgm"))).unwrap();
    }
}

fn config(corpus: &Path, out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        corpus_dir: corpus.to_path_buf(),
        watermark: WatermarkSource::Synthetic {
            bright_fraction: 0.8,
        },
        scales: vec![1, 2, 3],
        noise_densities: vec![0.05, 0.1],
        crop_fractions: vec![0.25],
        crop_exponent: 0.5,
        lambda: 0.5,
        embedding: EmbeddingMode::Hdwm,
        master_seed: 7,
        output_dir: out.to_path_buf(),
    }
}

fn lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect()
}

#[test]
fn row_counts_headers_and_rerun_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    small_corpus(&corpus, 4);
    let out = tmp.path().join("out");
    let cfg = config(&corpus, &out);
    let report = run_experiment(&cfg).unwrap();
    assert!(report.failures.is_empty(), "{:?}", report.failures);

    let visual = lines(&out.join("visual.csv"));
    let robust = lines(&out.join("robustness.csv"));
    assert_eq!(visual[0], VISUAL_HEADER.join(","));
    assert_eq!(robust[0], ROBUSTNESS_HEADER.join(","));
    assert_eq!(visual.len() - 1, 4 * 3);
    assert_eq!(robust.len() - 1, 4 * 3 * 3);
    // rows sorted by carrier then scale
    assert!(visual[1].starts_with("img0,1,"));
    assert!(visual[12].starts_with("img3,3,"));

    let first = (
        std::fs::read(out.join("visual.csv")).unwrap(),
        std::fs::read(out.join("robustness.csv")).unwrap(),
    );
    run_experiment(&cfg).unwrap();
    let second = (
        std::fs::read(out.join("visual.csv")).unwrap(),
        std::fs::read(out.join("robustness.csv")).unwrap(),
    );
    assert_eq!(first, second);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["rng_algorithm"], aqsm_core::attacks::RNG_ALGORITHM);
    assert_eq!(manifest["config"]["master_seed"], 7);

    let seed = derive_seed(7, "img0", 1, "salt_pepper", 0.05);
    assert!(robust
        .iter()
        .any(|l| l.starts_with(&format!("img0,1,hdwm,salt_pepper,0.0500,{seed},"))));
    assert_ne!(seed, derive_seed(8, "img0", 1, "salt_pepper", 0.05));
}

#[test]
fn empty_attack_grid_gives_header_only_robustness() {
    let tmp = tempfile::tempdir().unwrap();
    small_corpus(tmp.path(), 2);
    let out = tmp.path().join("out");
    let mut cfg = config(tmp.path(), &out);
    cfg.noise_densities.clear();
    cfg.crop_fractions.clear();
    cfg.scales = vec![2];
    cfg.embedding = EmbeddingMode::Plain;
    let report = run_experiment(&cfg).unwrap();
    assert_eq!(report.visual.len(), 2);
    assert!(report.visual.iter().all(|v| v.params.tau1 == 0));
    assert_eq!(
        lines(&out.join("robustness.csv")),
        vec![ROBUSTNESS_HEADER.join(",")]
    );
}

#[test]
fn oversized_scale_is_a_reported_failure() {
    let tmp = tempfile::tempdir().unwrap();
    small_corpus(tmp.path(), 1);
    let mut cfg = config(tmp.path(), &tmp.path().join("out"));
    cfg.scales = vec![2, 7];
    let report = run_experiment(&cfg).unwrap();
    assert_eq!(report.visual.len(), 1);
    assert_eq!(report.failures.len(), 1);
    assert!(report.failures[0].contains("r=7"));
}

#[test]
fn file_watermark_is_downscaled_per_scale() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    small_corpus(&corpus, 1);
    let wm_path = tmp.path().join("logo.pgm");
    save_pgm(&synthetic_logo(7, 0.6), &wm_path).unwrap();
    let mut cfg = config(&corpus, &tmp.path().join("out"));
    cfg.watermark = WatermarkSource::File(wm_path);
    cfg.noise_densities = vec![0.0];
    cfg.crop_fractions.clear();
    let report = run_experiment(&cfg).unwrap();
    let sides: Vec<usize> = report.visual.iter().map(|v| v.watermark_side).collect();
    assert_eq!(sides, vec![32, 16, 8]);
    // no noise: perfect recovery
    assert!(report
        .robustness
        .iter()
        .all(|r| r.ncc == 1.0 && r.psnr.is_infinite()));
}

#[test]
fn config_json_rejects_unknown_fields_and_bad_values() {
    let tmp = tempfile::tempdir().unwrap();
    let good = r#"{"corpus_dir":"c","watermark":{"synthetic":{"bright_fraction":0.8}},
        "scales":[2],"master_seed":1,"output_dir":"o"}"#;
    let p = tmp.path().join("cfg.json");
    std::fs::write(&p, good).unwrap();
    let cfg = ExperimentConfig::load(&p).unwrap();
    assert_eq!(cfg.lambda, 0.5);
    assert_eq!(cfg.crop_exponent, 0.5);
    assert_eq!(cfg.embedding, EmbeddingMode::Hdwm);

    std::fs::write(&p, good.replace("\"scales\"", "\"bogus\":1,\"scales\"")).unwrap();
    assert_eq!(
        ExperimentConfig::load(&p).unwrap_err().category(),
        "invalid-parameter"
    );
    std::fs::write(&p, good.replace("[2]", "[0]")).unwrap();
    assert_eq!(
        ExperimentConfig::load(&p).unwrap_err().category(),
        "invalid-parameter"
    );
}

#[test]
fn logo_has_exact_bright_fraction() {
    for (e, f) in [(3, 0.8), (6, 0.85), (5, 0.0), (4, 1.0)] {
        let logo = synthetic_logo(e, f);
        let bright = logo.pixels().iter().filter(|&&p| p > 127).count();
        assert_eq!(bright, (f * logo.len() as f64).round() as usize);
    }
}
