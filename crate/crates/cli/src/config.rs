//! Run configuration: one JSON document, every dimensional key carries its unit.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use squeeze_core::drift::{Lineshape, LineshapeKind};
use squeeze_core::fit::FitConfig;
use squeeze_core::ledger::DelayLedger;
use squeeze_core::physics::{
    scale_params, DetectionChain, PhysicalCavity, ScaledOpoParams, MAX_PUMP_AMPLITUDE,
};
use squeeze_core::quadrature::QuadratureOptions;
use squeeze_core::Error as CoreError;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityConfig {
    pub linewidth_fwhm_hz: f64,
    pub output_coupler_transmission: f64,
    pub round_trip_loss: f64,
    #[serde(default)]
    pub free_spectral_range_hz: Option<f64>,
}

/// Pump strength as amplitude `|α|` or as power relative to threshold (`|α|²`); give one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    #[serde(default)]
    pub alpha_mag: Option<f64>,
    #[serde(default)]
    pub pump_power_fraction: Option<f64>,
    #[serde(default)]
    pub pump_phase_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionConfig {
    pub homodyne_visibility: f64,
    pub detector_quantum_efficiency: f64,
    /// Electronic noise relative to shot noise, subtracted from scans that still contain it.
    #[serde(default)]
    pub electronics_floor_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelayGrid {
    pub start_m: f64,
    pub stop_m: f64,
    pub step_m: f64,
}

impl DelayGrid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop_m - self.start_m) / self.step_m + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| self.start_m + i as f64 * self.step_m)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySweep {
    pub start_hz: f64,
    pub stop_hz: f64,
    pub points: usize,
}

impl FrequencySweep {
    pub fn points(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start_hz];
        }
        let step = (self.stop_hz - self.start_hz) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.start_hz + i as f64 * step)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub demod_freqs_hz: Vec<f64>,
    pub group_index: f64,
    pub delay_grid_m: DelayGrid,
    #[serde(default = "default_phase_points")]
    pub phase_points: usize,
    /// Pump-cavity detuning used for phase sweeps.
    #[serde(default)]
    pub detuning_hz: f64,
    #[serde(default)]
    pub frequency_sweep_hz: Option<FrequencySweep>,
}

fn default_phase_points() -> usize {
    360
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanFile {
    pub demod_freq_hz: f64,
    /// Relative paths resolve against the config file's directory.
    pub csv_path: PathBuf,
    #[serde(default)]
    pub rbw_hz: Option<f64>,
    #[serde(default)]
    pub vbw_hz: Option<f64>,
    /// False when the data still contain the detection electronics' noise.
    #[serde(default = "default_true")]
    pub electronics_subtracted: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub lineshape_kind: LineshapeKind,
    pub scans: Vec<ScanFile>,
    #[serde(default)]
    pub settings: FitConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub description: Option<String>,
    pub cavity: CavityConfig,
    pub pump: PumpConfig,
    pub detection: DetectionConfig,
    pub lineshape: Lineshape,
    #[serde(default)]
    pub ledger: Option<DelayLedger>,
    pub scan: ScanConfig,
    #[serde(default)]
    pub fit: Option<FitSection>,
    #[serde(default)]
    pub quadrature: QuadratureOptions,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

/// A validated configuration together with where it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub path: PathBuf,
    pub config: RunConfig,
    pub params: ScaledOpoParams,
}

impl LoadedConfig {
    /// Resolve a path given in the config relative to the config's directory.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.path.parent().unwrap_or(Path::new(".")).join(p)
        }
    }
}

pub fn load(path: &Path) -> Result<LoadedConfig> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text, path)
}

pub fn parse(text: &str, path: &Path) -> Result<LoadedConfig> {
    let config: RunConfig = serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let params = validate(&config).map_err(|e| locate(text, path, e))?;
    Ok(LoadedConfig {
        path: path.to_path_buf(),
        config,
        params,
    })
}

/// Prefix a validation failure with the line of the offending key, when it can be found.
fn locate(text: &str, path: &Path, e: CliError) -> CliError {
    let key = match &e {
        CliError::Core(CoreError::InvalidParameter { name, .. }) => Some(name.to_string()),
        CliError::Core(CoreError::AboveThreshold(_)) => Some("alpha_mag".to_string()),
        CliError::Core(CoreError::OpoCavityInLedger) => Some("opo_cavity".to_string()),
        CliError::Config(msg) => msg.split('`').nth(1).map(str::to_string),
        _ => None,
    };
    let line = key.and_then(|k| {
        let quoted = format!("\"{k}\"");
        text.lines()
            .position(|l| l.contains(&quoted))
            .map(|i| i + 1)
    });
    match line {
        Some(line) => CliError::Config(format!("{}:{line}: {e}", path.display())),
        None => CliError::Config(format!("{}: {e}", path.display())),
    }
}

fn invalid(key: &str, reason: &str) -> CliError {
    CliError::Config(format!("`{key}` {reason}"))
}

fn validate(c: &RunConfig) -> Result<ScaledOpoParams> {
    let cavity = PhysicalCavity::new(
        c.cavity.linewidth_fwhm_hz,
        c.cavity.output_coupler_transmission,
        c.cavity.round_trip_loss,
        c.cavity.free_spectral_range_hz,
    )?;
    let detection = DetectionChain {
        homodyne_visibility: c.detection.homodyne_visibility,
        detector_quantum_efficiency: c.detection.detector_quantum_efficiency,
    };
    detection.validate()?;
    if let Some(floor) = c.detection.electronics_floor_db {
        if !(floor.is_finite() && floor < 0.0) {
            return Err(invalid(
                "electronics_floor_db",
                "must be finite and below shot noise (0 dB)",
            ));
        }
    }

    let alpha = match (c.pump.alpha_mag, c.pump.pump_power_fraction) {
        (Some(a), None) => a,
        (None, Some(p)) => {
            if !(0.0..=MAX_PUMP_AMPLITUDE.powi(2)).contains(&p) {
                return Err(invalid("pump_power_fraction", "must lie in [0, 0.98]"));
            }
            p.sqrt()
        }
        (Some(_), Some(_)) => {
            return Err(invalid(
                "pump_power_fraction",
                "cannot be combined with `alpha_mag`",
            ))
        }
        (None, None) => {
            return Err(invalid(
                "pump",
                "needs `alpha_mag` or `pump_power_fraction`",
            ))
        }
    };
    if !c.pump.pump_phase_rad.is_finite() {
        return Err(invalid("pump_phase_rad", "must be finite"));
    }
    let params = scale_params(
        &cavity,
        alpha,
        c.pump.pump_phase_rad,
        detection.efficiency(),
    )?;

    c.lineshape.validate()?;
    if let Some(ledger) = &c.ledger {
        ledger.validate()?;
    }

    let s = &c.scan;
    if s.demod_freqs_hz.is_empty() {
        return Err(invalid(
            "demod_freqs_hz",
            "must list at least one frequency",
        ));
    }
    if s.demod_freqs_hz
        .iter()
        .any(|f| !(f.is_finite() && *f >= 0.0))
    {
        return Err(invalid("demod_freqs_hz", "must be finite and non-negative"));
    }
    if !(s.group_index >= 1.0 && s.group_index.is_finite()) {
        return Err(invalid("group_index", "must be at least 1"));
    }
    let g = &s.delay_grid_m;
    if !(g.start_m.is_finite() && g.stop_m.is_finite() && g.stop_m > g.start_m) {
        return Err(invalid("delay_grid_m", "needs finite `start_m` < `stop_m`"));
    }
    if !(g.step_m > 0.0 && (g.stop_m - g.start_m) / g.step_m <= 1e5) {
        return Err(invalid(
            "step_m",
            "must be positive and give at most 100000 points",
        ));
    }
    if !(2..=100_000).contains(&s.phase_points) {
        return Err(invalid("phase_points", "must lie in [2, 100000]"));
    }
    if !s.detuning_hz.is_finite() {
        return Err(invalid("detuning_hz", "must be finite"));
    }
    if let Some(sweep) = &s.frequency_sweep_hz {
        if !(sweep.start_hz >= 0.0 && sweep.stop_hz >= sweep.start_hz && sweep.stop_hz.is_finite())
        {
            return Err(invalid(
                "frequency_sweep_hz",
                "needs 0 ≤ `start_hz` ≤ `stop_hz`",
            ));
        }
        if !(1..=100_000).contains(&sweep.points) {
            return Err(invalid("points", "must lie in [1, 100000]"));
        }
    }

    if let Some(fit) = &c.fit {
        if fit.scans.is_empty() {
            return Err(invalid("scans", "must list at least one scan"));
        }
        fit.settings.validate()?;
        if fit.scans.iter().any(|s| !s.electronics_subtracted)
            && c.detection.electronics_floor_db.is_none()
        {
            return Err(invalid(
                "electronics_subtracted",
                "is false for a scan but `electronics_floor_db` is not set",
            ));
        }
    }

    let q = &c.quadrature;
    if !(q.rel_tol > 0.0 && q.abs_tol >= 0.0 && q.max_subdivisions > 0) {
        return Err(invalid(
            "quadrature",
            "needs positive `rel_tol` and `max_subdivisions`",
        ));
    }
    Ok(params)
}
