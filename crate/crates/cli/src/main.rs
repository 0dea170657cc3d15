use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aqsm_core::attacks::{AttackSpec, AREA_EXPONENT};
use aqsm_core::experiment::{run_experiment, ExperimentConfig};
use aqsm_core::hdwm::{eta_for_scale, EmbedParams, DEFAULT_LAMBDA};
use aqsm_core::metrics::{format_psnr, MetricsReport};
use aqsm_core::pgm::{load_pgm, save_pgm};
use aqsm_core::pipeline::{embed, embed_with_params, extract, WatermarkKey};
use aqsm_core::qsim::verify::run_all;
use aqsm_core::qsim::{
    build_hdwm_extract_pixel, build_hdwm_pixel, build_majority3, build_qbs, build_qe, build_qib,
};
use aqsm_core::Error;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "aqsm", version, about = "Quantum image watermarking simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AttackKind {
    SaltPepper,
    Crop,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a watermark; writes the stego image and a key file.
    Embed {
        #[arg(long)]
        carrier: PathBuf,
        #[arg(long)]
        watermark: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Key output path (default: <out>.key.json).
        #[arg(long)]
        key: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_LAMBDA)]
        lambda: f64,
        /// Plain LSB substitution instead of histogram-driven rules.
        #[arg(long)]
        plain: bool,
    },
    /// Recover the watermark from a stego image and its key.
    Extract {
        #[arg(long)]
        stego: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply salt-and-pepper noise or a top-left crop.
    Attack {
        #[arg(long, value_enum)]
        kind: AttackKind,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Noise density, or cropped area fraction.
        #[arg(long)]
        param: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = AREA_EXPONENT)]
        crop_exponent: f64,
    },
    /// Print MSE, PSNR, SSIM and NCC between two images.
    Metrics {
        reference: PathBuf,
        test: PathBuf,
        /// Also append a CSV row to this file.
        #[arg(long)]
        append: Option<PathBuf>,
    },
    /// Run a batch experiment described by a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check every circuit against its classical reference.
    VerifyCircuits {
        /// Write each circuit's netlist into this directory.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            let category = e.downcast_ref::<Error>().map_or("error", Error::category);
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {category}: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Command) -> anyhow::Result<ExitCode> {
    match cmd {
        Command::Embed {
            carrier,
            watermark,
            out,
            key,
            lambda,
            plain,
        } => {
            let c = load_pgm(&carrier)?;
            let w = load_pgm(&watermark)?;
            let stego = if plain {
                let r = c.side_exp().saturating_sub(w.side_exp());
                embed_with_params(&c, &w, EmbedParams::plain(lambda, eta_for_scale(r)))?
            } else {
                embed(&c, &w, lambda)?
            };
            let key_path = key.unwrap_or_else(|| default_key_path(&out));
            save_pgm(&stego.image, &out)?;
            stego.key.save(&key_path)?;
            let k = &stego.key;
            println!(
                "r={} tau1={} tau2={} eta={} stego={} key={}",
                k.r,
                k.tau1,
                k.tau2,
                k.eta,
                out.display(),
                key_path.display()
            );
        }
        Command::Extract { stego, key, out } => {
            let key = WatermarkKey::load(&key)?;
            let wm = extract(&load_pgm(&stego)?, &key)?;
            save_pgm(&wm, &out)?;
        }
        Command::Attack {
            kind,
            input,
            out,
            param,
            seed,
            crop_exponent,
        } => {
            let spec = match kind {
                AttackKind::SaltPepper => AttackSpec::SaltPepper {
                    density: param,
                    seed,
                },
                AttackKind::Crop => AttackSpec::Crop {
                    area_fraction: param,
                    exponent: crop_exponent,
                },
            };
            let attacked = spec.apply(&load_pgm(&input)?)?;
            save_pgm(&attacked, &out)?;
            println!("{}", serde_json::to_string(&spec)?);
        }
        Command::Metrics {
            reference,
            test,
            append,
        } => {
            let m = MetricsReport::compute(&load_pgm(&reference)?, &load_pgm(&test)?)?;
            println!("MSE {:.4}", m.mse);
            println!("PSNR {}", format_psnr(m.psnr));
            println!("SSIM {:.4}", m.ssim);
            println!("NCC {:.4}", m.ncc);
            if let Some(path) = append {
                append_metrics(&path, &reference, &test, &m)?;
            }
        }
        Command::Experiment { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = run_experiment(&cfg)?;
            println!(
                "{} visual rows, {} robustness rows written to {}",
                report.visual.len(),
                report.robustness.len(),
                cfg.output_dir.display()
            );
            if !report.failures.is_empty() {
                for f in &report.failures {
                    eprintln!("failed: {f}");
                }
                eprintln!("error: experiment: {} job(s) failed", report.failures.len());
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::VerifyCircuits { dump } => {
            if let Some(dir) = dump {
                dump_netlists(&dir)?;
            }
            let results = run_all();
            let failed = results.iter().filter(|r| !r.passed()).count();
            for r in &results {
                println!("{r}");
            }
            println!("{} suites, {failed} failed", results.len());
            if failed > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn default_key_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".key.json");
    PathBuf::from(s)
}

fn append_metrics(path: &Path, a: &Path, b: &Path, m: &MetricsReport) -> anyhow::Result<()> {
    let fresh = !path.exists();
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(Error::from)?;
    if fresh {
        writeln!(f, "reference,test,mse,psnr_db,ssim,ncc")?;
    }
    writeln!(
        f,
        "{},{},{:.4},{},{:.4},{:.4}",
        a.display(),
        b.display(),
        m.mse,
        format_psnr(m.psnr),
        m.ssim,
        m.ncc
    )?;
    Ok(())
}

fn dump_netlists(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).map_err(Error::from)?;
    let mut circuits = vec![
        ("qib8".to_string(), build_qib(8)?),
        ("qe3".to_string(), build_qe(3)?),
        ("qbs_m1".to_string(), build_qbs(1)?),
        ("majority3".to_string(), build_majority3()?),
    ];
    for (tau1, tau2) in [(0, 0), (1, 0), (1, 1)] {
        for eta in 0..2 {
            let p = EmbedParams {
                lambda: DEFAULT_LAMBDA,
                tau1,
                tau2,
                eta,
            };
            let tag = format!("t{tau1}{tau2}_e{eta}");
            circuits.push((format!("hdwm_embed_{tag}"), build_hdwm_pixel(&p)?));
            circuits.push((format!("hdwm_extract_{tag}"), build_hdwm_extract_pixel(&p)?));
        }
    }
    for (name, c) in circuits {
        std::fs::write(dir.join(format!("{name}.net")), c.to_netlist()).map_err(Error::from)?;
    }
    Ok(())
}
