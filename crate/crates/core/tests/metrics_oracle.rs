mod common;

use aqsm_core::attacks::{crop_topleft, salt_pepper};
use aqsm_core::image::GrayImage;
use aqsm_core::metrics::{gaussian_taps, ncc, psnr, ssim, SSIM_WINDOW};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::random_gray;

/// Direct per-window SSIM with the 2-D Gaussian weight written out in full.
fn ssim_brute(a: &GrayImage, b: &GrayImage) -> f64 {
    let (c1, c2) = ((0.01f64 * 255.0).powi(2), (0.03f64 * 255.0).powi(2));
    let t = gaussian_taps();
    let k = SSIM_WINDOW;
    let m = a.side() - k + 1;
    let mut total = 0.0;
    for oy in 0..m {
        for ox in 0..m {
            let (mut ma, mut mb, mut aa, mut bb, mut ab) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for i in 0..k {
                for j in 0..k {
                    let w = t[i] * t[j];
                    let x = a.get(oy + i, ox + j) as f64;
                    let y = b.get(oy + i, ox + j) as f64;
                    ma += w * x;
                    mb += w * y;
                    aa += w * x * x;
                    bb += w * y * y;
                    ab += w * x * y;
                }
            }
            let (va, vb, cov) = (aa - ma * ma, bb - mb * mb, ab - ma * mb);
            total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
                / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        }
    }
    total / (m * m) as f64
}

#[test]
fn ssim_matches_windowed_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let a = random_gray(&mut rng, 6);
    let b = salt_pepper(&a, 0.2, 4).unwrap();
    let c = random_gray(&mut rng, 6);
    for (x, y) in [(&a, &b), (&a, &c), (&b, &c)] {
        let fast = ssim(x, y).unwrap();
        let slow = ssim_brute(x, y);
        assert!((fast - slow).abs() < 1e-9, "{fast} vs {slow}");
    }
    assert!((ssim(&a, &a).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn taps_are_symmetric_and_normalized() {
    let t = gaussian_taps();
    assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    for i in 0..SSIM_WINDOW {
        assert_eq!(t[i], t[SSIM_WINDOW - 1 - i]);
    }
    assert!(t[SSIM_WINDOW / 2] > t[0]);
}

#[test]
fn small_images_use_one_global_window() {
    let a = GrayImage::from_fn(3, |y, x| (y * 8 + x) as u8 * 3);
    let s = ssim(&a, &a).unwrap();
    assert!((s - 1.0).abs() < 1e-12);
    let flat = GrayImage::filled(3, 90);
    assert!(ssim(&a, &flat).unwrap() < 0.5);
}

#[test]
fn psnr_and_ncc_edge_cases() {
    let zero = GrayImage::filled(2, 0);
    let one = GrayImage::filled(2, 1);
    assert!(psnr(&zero, &zero).unwrap().is_infinite());
    assert_eq!(ncc(&zero, &zero).unwrap(), 1.0);
    assert_eq!(ncc(&zero, &one).unwrap(), 0.0);
    assert!((psnr(&zero, &one).unwrap() - 20.0 * 255f64.log10()).abs() < 1e-9);
    let cropped = crop_topleft(&GrayImage::filled(4, 200), 0.25).unwrap();
    assert_eq!(cropped.pixels().iter().filter(|&&p| p == 0).count(), 64);
}
