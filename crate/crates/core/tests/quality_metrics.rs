mod oracle;

use delentropy::imageio::{BitDepth, GrayImage};
use delentropy::metrics::{ingest_metrics_csv, psnr, read_metrics_csv, ssim, write_metrics_csv, QualityRecord};
use delentropy::Error;
use oracle::Raster;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_raster(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Raster {
    (0..h).map(|_| (0..w).map(|_| rng.random_range(0..256) as f64).collect()).collect()
}

fn to_image(r: &Raster) -> GrayImage<f64> {
    GrayImage::from_fn(r[0].len(), r.len(), BitDepth::Eight, |row, col| r[row][col]).unwrap()
}

#[test]
fn psnr_matches_loop_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let (a, b) = (random_raster(&mut rng, 16, 16), random_raster(&mut rng, 16, 16));
        let got = psnr(&to_image(&a), &to_image(&b)).unwrap();
        assert!((got - oracle::psnr(&a, &b, 255.0)).abs() < 1e-9);
        assert_eq!(got, psnr(&to_image(&b), &to_image(&a)).unwrap());
    }
}

#[test]
fn psnr_falls_as_noise_grows() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let base = GrayImage::from_fn(48, 48, BitDepth::Eight, |r, c| (64 + (r * 3 + c) % 128) as f64).unwrap();
    let mut last = f64::INFINITY;
    for amp in [1i32, 2, 4, 8] {
        let noisy = GrayImage::from_fn(48, 48, BitDepth::Eight, |r, c| {
            base.get(r, c) + rng.random_range(-amp..=amp) as f64
        })
        .unwrap();
        let p = psnr(&base, &noisy).unwrap();
        assert!(p < last, "amplitude {amp}: {p} >= {last}");
        last = p;
    }
}

#[test]
fn ssim_matches_windowed_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let a = random_raster(&mut rng, 19, 14);
        let b: Raster = a
            .iter()
            .map(|row| row.iter().map(|v| (v + rng.random_range(-30.0..30.0f64)).clamp(0.0, 255.0)).collect())
            .collect();
        let got = ssim(&to_image(&a), &to_image(&b)).unwrap();
        assert!((got - oracle::ssim(&a, &b, 255.0)).abs() < 1e-9);
    }
}

#[test]
fn negative_image_is_anticorrelated() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = random_raster(&mut rng, 24, 24);
    let neg: Raster = a.iter().map(|row| row.iter().map(|v| 255.0 - v).collect()).collect();
    let got = ssim(&to_image(&a), &to_image(&neg)).unwrap();
    assert!(got < 0.0);
    assert!((got - oracle::ssim(&a, &neg, 255.0)).abs() < 1e-9);
}

#[test]
fn ssim_is_exactly_symmetric_and_reflexive() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let a = to_image(&random_raster(&mut rng, 13, 17));
        let b = to_image(&random_raster(&mut rng, 13, 17));
        assert_eq!(ssim(&a, &b).unwrap(), ssim(&b, &a).unwrap());
        assert_eq!(ssim(&a, &a).unwrap(), 1.0);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        let s = ssim(&a, &b).unwrap();
        assert!((-1.0..=1.0).contains(&s));
    }
}

#[test]
fn sixteen_bit_uses_native_peak() {
    let a = GrayImage::<f64>::from_fn(12, 12, BitDepth::Sixteen, |r, c| (r * 1000 + c * 7) as f64).unwrap();
    let b = GrayImage::<f64>::from_fn(12, 12, BitDepth::Sixteen, |r, c| (r * 1000 + c * 7 + 1) as f64).unwrap();
    let expected = 10.0 * (65535.0f64 * 65535.0).log10();
    assert!((psnr(&a, &b).unwrap() - expected).abs() < 1e-9);
    let eight = GrayImage::<f64>::filled(12, 12, BitDepth::Eight, 3.0).unwrap();
    assert!(matches!(psnr(&a, &eight), Err(Error::BitDepthMismatch(16, 8))));
}

#[test]
fn csv_basic_row() {
    let recs: Vec<QualityRecord<f64>> = read_metrics_csv("image_id,psnr,lpips\nimg1,24.5,0.31\n".as_bytes()).unwrap();
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].image_id, "img1");
    assert_eq!(recs[0].psnr, Some(24.5));
    assert_eq!(recs[0].ssim, None);
    assert_eq!(recs[0].external.get("lpips"), Some(&0.31));
    assert_eq!(recs[0].external.len(), 1);
}

#[test]
fn csv_blank_cell_is_absent() {
    let recs: Vec<QualityRecord<f64>> =
        read_metrics_csv("image_id,psnr,lpips\na,20,\nb,21,0.4\n".as_bytes()).unwrap();
    assert!(!recs[0].external.contains_key("lpips"));
    assert_eq!(recs[1].external["lpips"], 0.4);
}

#[test]
fn csv_schema_and_parse_errors() {
    assert!(matches!(read_metrics_csv::<f64>("".as_bytes()), Err(Error::Schema { .. })));
    assert!(matches!(read_metrics_csv::<f64>("name,psnr\na,1\n".as_bytes()), Err(Error::Schema { .. })));
    match read_metrics_csv::<f64>("image_id,psnr\na,1\nb,x\n".as_bytes()) {
        Err(Error::Parse { row, column, .. }) => {
            assert_eq!(row, 3);
            assert_eq!(column, "psnr");
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        ingest_metrics_csv::<f64>("/nonexistent/metrics.csv"),
        Err(Error::Io { .. })
    ));
}

#[test]
fn csv_round_trip_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut records = Vec::new();
    for i in 0..25 {
        let mut r = QualityRecord::<f64> {
            image_id: format!("scene/img_{i:03}"),
            psnr: Some(if i == 3 { f64::INFINITY } else { rng.random_range(10.0..40.0) }),
            ssim: if i % 4 == 0 { None } else { Some(rng.random_range(-1.0..1.0)) },
            ..QualityRecord::default()
        };
        r.external.insert("lpips".into(), rng.random::<f64>());
        if i % 3 == 0 {
            r.external.insert("abs_rel".into(), rng.random::<f64>() * 1e-7);
        }
        records.push(r);
    }
    let mut buf = Vec::new();
    write_metrics_csv(&records, &mut buf).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    std::fs::write(&path, &buf).unwrap();
    let back: Vec<QualityRecord<f64>> = ingest_metrics_csv(&path).unwrap();
    assert_eq!(back, records);
}
