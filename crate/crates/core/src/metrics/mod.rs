//! Reference-based quality scores and ingestion of externally computed
//! per-image metrics.

mod csvio;
mod quality;

pub use csvio::{ingest_metrics_csv, read_metrics_csv, write_metrics_csv};
pub use quality::{compare_images, psnr, ssim, QualityRecord, SSIM_SIGMA, SSIM_WINDOW};
