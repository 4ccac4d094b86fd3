//! Regenerate the synthetic scans referenced by `config/default.json`.
//!
//! `cargo run -p squeeze-cli --example reference_data`

use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use squeeze_cli::config;
use squeeze_core::drift::Lineshape;
use squeeze_core::fit::synthesize_scans;

const FWHM_HZ: f64 = 700e3;
const OFFSETS: [f64; 3] = [0.07, 0.03, 0.0];
const NOISE_REL: f64 = 0.01;
const SEED: u64 = 2011;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let cfg = config::load(&root.join("config/default.json"))?;
    let section = cfg
        .config
        .fit
        .as_ref()
        .ok_or("default config has no fit section")?;
    let freqs: Vec<f64> = section.scans.iter().map(|s| s.demod_freq_hz).collect();
    let delays: Vec<f64> = (0..16).map(|i| 4.0 * i as f64).collect();

    let scans = synthesize_scans(
        &cfg.params,
        &Lineshape::Gaussian { fwhm_hz: FWHM_HZ },
        &freqs,
        &OFFSETS,
        &delays,
        section.settings.group_index,
        NOISE_REL,
        &cfg.config.quadrature,
        &mut ChaCha8Rng::seed_from_u64(SEED),
    )?;
    for (scan, file) in scans.iter().zip(&section.scans) {
        let mut text = String::from("excess_fiber_m,noise_db,std_dev_db\n");
        for r in &scan.rows {
            writeln!(text, "{},{},{}", r.excess_fiber_m, r.noise_db, r.std_dev_db)?;
        }
        let path = cfg.resolve(&file.csv_path);
        std::fs::write(&path, text)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
