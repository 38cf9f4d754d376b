mod oracle;

use delentropy::stats::{
    correlate, log_beta, log_gamma, ols_fit, pearson, prediction_interval, student_t_cdf, student_t_quantile,
    ComplexityMeasure,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

// Published per-scene values: DSP mean and the PSNR / LPIPS columns for two
// reconstruction methods.
const MU: [f64; 8] = [4.18, 4.12, 3.98, 3.98, 3.84, 3.67, 3.55, 3.29];
const GS_PSNR: [f64; 8] = [19.97, 22.94, 22.59, 22.03, 24.19, 26.37, 24.61, 26.68];
const GS_LPIPS: [f64; 8] = [0.6019, 0.5515, 0.5727, 0.6814, 0.4324, 0.2981, 0.4858, 0.3658];
const ZIP_PSNR: [f64; 8] = [18.56, 24.55, 24.54, 21.73, 24.30, 26.39, 24.51, 25.42];
const ZIP_LPIPS: [f64; 8] = [0.8818, 0.5829, 0.6645, 0.7960, 0.4049, 0.3614, 0.4609, 0.3443];

// Computed beforehand with 40-digit arithmetic from the values above.
const R_GS_PSNR: f64 = -0.881_468_706_223_092_03;
const R_GS_LPIPS: f64 = 0.721_943_692_719_206_22;
const R_ZIP_PSNR: f64 = -0.626_237_207_907_251_36;
const R_ZIP_LPIPS: f64 = 0.795_333_924_194_026_57;

#[test]
fn benchmark_correlations_match_frozen_values() {
    for (y, r) in [(GS_PSNR, R_GS_PSNR), (GS_LPIPS, R_GS_LPIPS), (ZIP_PSNR, R_ZIP_PSNR), (ZIP_LPIPS, R_ZIP_LPIPS)] {
        let got = pearson(&MU, &y).unwrap();
        assert!((got - r).abs() < 1e-12, "{got} vs {r}");
        assert!((oracle::pearson_one_pass(&MU, &y) - r).abs() < 1e-12);
    }
}

#[test]
fn log_gamma_matches_stirling_reference() {
    let mut x: f64 = 1e-3;
    while x <= 1e4 {
        let got = log_gamma(x).unwrap();
        let want = oracle::ln_gamma(x);
        assert!((got - want).abs() <= 1e-10, "x = {x}: {got} vs {want}");
        x *= 1.07;
    }
    assert!((log_gamma(0.5f64).unwrap() - 0.572_364_942_924_700_087).abs() < 1e-10);
    assert!((log_gamma(10.0f64).unwrap() - 12.801_827_480_081_469_611).abs() < 1e-10);
}

#[test]
fn log_beta_closed_form_and_quadrature() {
    assert_eq!(log_beta(1.0f64, 1.0).unwrap(), 0.0);
    assert!((log_beta(2.0f64, 5.0).unwrap() - (1.0f64 / 30.0).ln()).abs() < 1e-12);
    let integral = oracle::integrate(&|t: f64| t.powf(1.5) * (1.0 - t).powf(2.7), 0.0, 1.0, 1e-14);
    assert!((log_beta(2.5f64, 3.7).unwrap() - integral.ln()).abs() < 1e-8);
}

#[test]
fn t_quantile_matches_integrated_density() {
    for dof in [1.0, 2.0, 3.5, 6.0, 18.0, 60.0] {
        for p in [0.6, 0.9, 0.975, 0.995] {
            let got = student_t_quantile(p, dof).unwrap();
            let want = oracle::student_t_quantile(p, dof);
            assert!((got - want).abs() < 1e-9 * want.max(1.0), "dof {dof}, p {p}: {got} vs {want}");
            assert!((student_t_cdf(got, dof).unwrap() - p).abs() < 1e-12);
        }
    }
}

#[test]
fn interval_width_at_mean_matches_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let noise = Normal::new(0.0, 0.7).unwrap();
    let x: Vec<f64> = (0..15).map(|i| i as f64 * 0.5).collect();
    let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.8 * v + noise.sample(&mut rng)).collect();
    let m = ols_fit(&x, &y).unwrap();
    let (lo, hi) = prediction_interval(&m, m.x_mean, 0.95).unwrap();

    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - xm).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let slope = sxy / sxx;
    let sse: f64 = x.iter().zip(&y).map(|(a, b)| (b - (ym + slope * (a - xm))).powi(2)).sum();
    let s = (sse / (n - 2.0)).sqrt();
    let width = 2.0 * oracle::student_t_quantile(0.975, n - 2.0) * s * (1.0 + 1.0 / n).sqrt();
    assert!((hi - lo - width).abs() < 1e-8);
}

#[test]
fn ols_matches_normal_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..40 {
        let xi = i as f64 * 0.25;
        let e: f64 = noise.sample(&mut rng);
        // symmetric cloud: every residual appears with both signs
        x.push(xi);
        y.push(1.5 + 0.4 * xi + e);
        x.push(xi);
        y.push(1.5 + 0.4 * xi - e);
    }
    let m = ols_fit(&x, &y).unwrap();
    // normal equations [n, Sx; Sx, Sxx] [b0, b1] = [Sy, Sxy] via Cramer's rule
    let n = x.len() as f64;
    let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    let b1 = (n * sxy - sx * sy) / det;
    let b0 = (sxx * sy - sx * sxy) / det;
    assert!((m.slope - b1).abs() < 1e-12);
    assert!((m.intercept - b0).abs() < 1e-12);
    assert!((m.slope - 0.4).abs() < 1e-12);
}

#[test]
fn prediction_intervals_cover_at_nominal_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let trials = 2000;
    let mut hits = 0;
    for _ in 0..trials {
        let x: Vec<f64> = (0..12).map(|_| rng.random_range(0.0..10.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.0 + 0.5 * v + noise.sample(&mut rng)).collect();
        let m = ols_fit(&x, &y).unwrap();
        let x0 = rng.random_range(0.0..10.0);
        let y0 = 1.0 + 0.5 * x0 + noise.sample(&mut rng);
        let (lo, hi) = prediction_interval(&m, x0, 0.95).unwrap();
        if lo <= y0 && y0 <= hi {
            hits += 1;
        }
    }
    let rate = hits as f64 / trials as f64;
    assert!((0.93..=0.97).contains(&rate), "coverage {rate}");
}

#[test]
fn exact_line_gives_unit_correlation_and_zero_width() {
    let x: Vec<f64> = MU.to_vec();
    let y: Vec<f64> = x.iter().map(|v| 30.0 - 2.5 * v).collect();
    let rep = correlate("psnr", ComplexityMeasure::Delentropy, &x, &y, 0.95).unwrap();
    assert!((rep.pearson_r + 1.0).abs() < 1e-12);
    assert_eq!(rep.interval_width_mean, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pearson_affine_invariance(
        seed in any::<u64>(),
        scale in 0.01f64..100.0,
        shift in -50.0f64..50.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..10).map(|_| rng.random_range(-5.0..5.0)).collect();
        let y: Vec<f64> = (0..10).map(|_| rng.random_range(-5.0..5.0)).collect();
        let r = pearson(&x, &y).unwrap();
        let xs: Vec<f64> = x.iter().map(|v| scale * v + shift).collect();
        let xn: Vec<f64> = x.iter().map(|v| -scale * v + shift).collect();
        prop_assert!((pearson(&xs, &y).unwrap() - r).abs() < 1e-9);
        prop_assert!((pearson(&xn, &y).unwrap() + r).abs() < 1e-9);
        prop_assert!(r.abs() <= 1.0);
    }

    #[test]
    fn ols_residuals_orthogonal_to_x(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..20).map(|_| rng.random_range(0.0..8.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - v + rng.random_range(-1.0..1.0)).collect();
        let m = ols_fit(&x, &y).unwrap();
        let dot: f64 = x.iter().zip(&y).map(|(a, b)| (a - m.x_mean) * (b - m.predict(*a))).sum();
        let scale: f64 = x.iter().zip(&y).map(|(a, b)| ((a - m.x_mean) * b).abs()).sum();
        prop_assert!(dot.abs() <= 1e-9 * scale);
    }

    #[test]
    fn log_beta_symmetric(a in 1e-3f64..1e3, b in 1e-3f64..1e3) {
        prop_assert_eq!(log_beta(a, b).unwrap(), log_beta(b, a).unwrap());
    }
}
