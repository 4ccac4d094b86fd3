//! Fitting measured squeezing-vs-delay scans with the drift-averaged model.
//!
//! The model for scan `f` at excess fiber `l` is `S̄_f(l; w) + o_f`, where `w` is the
//! lineshape FWHM shared by all scans and `o_f` a delay-independent technical-noise offset
//! in linear units of shot noise. The fit minimizes the inverse-variance weighted squared
//! residuals in linear power. Offsets enter linearly, so for any `w` their optimum is a
//! weighted mean; the simplex therefore searches only `ln w`, from several starting widths.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::drift::{averaged_spectrum, DelaySetting, LineshapeKind};
use crate::error::{Error, Result};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::physics::ScaledOpoParams;
use crate::quadrature::QuadratureOptions;
use crate::units::{db_sigma_to_linear, from_db, to_db};

/// Remove the detector's electronic noise from a measured level (both in dB relative to
/// shot noise). A floor of `-∞` leaves the value untouched.
pub fn subtract_electronic_noise(measured_db: f64, floor_db: f64) -> Result<f64> {
    if floor_db == f64::NEG_INFINITY {
        return Ok(measured_db);
    }
    let corrected = from_db(measured_db) - from_db(floor_db);
    // negated so NaN inputs are rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(measured_db > floor_db) || corrected <= 0.0 {
        return Err(Error::BelowElectronicFloor {
            measured_db,
            floor_db,
        });
    }
    to_db(corrected)
}

/// Pointwise ratio of a raw noise trace to the shot-noise trace (both linear).
pub fn normalize_to_shot(raw: &[f64], sql: &[f64]) -> Result<Vec<f64>> {
    if raw.len() != sql.len() {
        return Err(Error::LengthMismatch {
            raw: raw.len(),
            reference: sql.len(),
        });
    }
    raw.iter()
        .zip(sql)
        .map(|(&r, &s)| {
            if s > 0.0 && s.is_finite() {
                Ok(r / s)
            } else {
                Err(Error::InvalidInput(format!(
                    "shot-noise reference must be positive, got {s}"
                )))
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub excess_fiber_m: f64,
    pub noise_db: f64,
    pub std_dev_db: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanMetadata {
    #[serde(default)]
    pub rbw_hz: Option<f64>,
    #[serde(default)]
    pub vbw_hz: Option<f64>,
    /// Electronic noise level still present in the data; `None` if already subtracted.
    #[serde(default)]
    pub electronics_floor_db: Option<f64>,
}

/// One squeezing-vs-delay series at a fixed demodulation frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredScan {
    pub demod_freq_hz: f64,
    pub rows: Vec<ScanRow>,
    pub metadata: ScanMetadata,
}

/// A data point after noise subtraction, in linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    scan: usize,
    delay: DelaySetting,
    measured: f64,
    measured_db: f64,
    sigma: f64,
}

impl MeasuredScan {
    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Error::InvalidScan {
            demod_hz: self.demod_freq_hz,
            reason,
        };
        if !(self.demod_freq_hz >= 0.0 && self.demod_freq_hz.is_finite()) {
            return Err(invalid(
                "demodulation frequency must be non-negative".into(),
            ));
        }
        if self.rows.is_empty() {
            return Err(invalid("no data rows".into()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !(row.excess_fiber_m.is_finite() && row.noise_db.is_finite()) {
                return Err(invalid(format!("row {i} is not finite")));
            }
            if !(row.std_dev_db >= 0.0 && row.std_dev_db.is_finite()) {
                return Err(invalid(format!(
                    "row {i} has a negative standard deviation"
                )));
            }
        }
        if let Some(floor) = self.metadata.electronics_floor_db {
            let min = self
                .rows
                .iter()
                .map(|r| r.noise_db)
                .fold(f64::INFINITY, f64::min);
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(floor < min) {
                return Err(invalid(format!(
                    "electronic floor {floor} dB is not below the lowest measured level {min} dB"
                )));
            }
        }
        Ok(())
    }

    /// Rows with electronic noise removed, as `(excess_fiber_m, level_db, std_dev_db)`.
    pub fn corrected_rows(&self) -> Result<Vec<ScanRow>> {
        self.validate()?;
        let floor = self
            .metadata
            .electronics_floor_db
            .unwrap_or(f64::NEG_INFINITY);
        self.rows
            .iter()
            .map(|row| {
                Ok(ScanRow {
                    noise_db: subtract_electronic_noise(row.noise_db, floor)?,
                    ..*row
                })
            })
            .collect()
    }
}

/// How the per-frequency offsets are treated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "values", rename_all = "snake_case")]
pub enum OffsetMode {
    /// One free offset per scan.
    Free,
    /// Offsets held at the given values, one per scan.
    Frozen(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    pub group_index: f64,
    /// Search bounds on the FWHM.
    pub fwhm_bounds_hz: [f64; 2],
    /// Range over which the starting widths are log-spaced.
    pub start_range_hz: [f64; 2],
    pub starts: usize,
    pub offsets: OffsetMode,
    pub nelder_mead: NelderMeadOptions,
    pub quadrature: QuadratureOptions,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            group_index: 1.5,
            fwhm_bounds_hz: [10e3, 10e6],
            start_range_hz: [100e3, 3e6],
            starts: 5,
            offsets: OffsetMode::Free,
            nelder_mead: NelderMeadOptions {
                max_iterations: 200,
                f_tol: 1e-9,
                x_tol: 1e-6,
            },
            quadrature: QuadratureOptions::default(),
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.fwhm_bounds_hz;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "invalid fwhm bounds [{lo}, {hi}]"
            )));
        }
        let [s_lo, s_hi] = self.start_range_hz;
        if !(s_lo > 0.0 && s_hi >= s_lo && s_hi.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "invalid start range [{s_lo}, {s_hi}]"
            )));
        }
        if self.starts == 0 {
            return Err(Error::InvalidInput("at least one start is required".into()));
        }
        if self.group_index < 1.0 {
            return Err(Error::InvalidInput("group_index must be at least 1".into()));
        }
        Ok(())
    }

    /// Starting widths, log-spaced over `start_range_hz`.
    pub fn start_widths(&self) -> Vec<f64> {
        let [lo, hi] = self.start_range_hz;
        if self.starts == 1 {
            return vec![(lo * hi).sqrt()];
        }
        let step = (hi / lo).ln() / (self.starts - 1) as f64;
        (0..self.starts)
            .map(|i| lo * (step * i as f64).exp())
            .collect()
    }
}

/// Outcome of one simplex run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartOutcome {
    pub start_fwhm_hz: f64,
    pub fwhm_hz: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub lineshape_kind: LineshapeKind,
    pub lineshape_fwhm_hz: f64,
    pub demod_freqs_hz: Vec<f64>,
    pub offsets_linear: Vec<f64>,
    pub residual_rms_db: f64,
    /// Weighted sum of squared residuals at the optimum.
    pub objective: f64,
    pub reduced_chi_squared: f64,
    /// Covariance of `(fwhm_hz, offsets...)`; frozen offsets are excluded.
    pub covariance: Option<Vec<Vec<f64>>>,
    pub fwhm_std_hz: Option<f64>,
    pub offsets_std: Option<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
    /// Best width sits on a search bound.
    pub at_bound: bool,
    /// The data carry no usable drift signature.
    pub degenerate: bool,
    pub starts: Vec<StartOutcome>,
    /// Best objective after each simplex iteration of the winning start.
    pub history: Vec<f64>,
}

/// The weighted least-squares problem for a fixed data set.
struct Problem<'a> {
    params: &'a ScaledOpoParams,
    kind: LineshapeKind,
    omegas: Vec<f64>,
    points: Vec<Point>,
    n_scans: usize,
    cfg: &'a FitConfig,
}

impl Problem<'_> {
    fn clamp(&self, fwhm: f64) -> f64 {
        fwhm.clamp(self.cfg.fwhm_bounds_hz[0], self.cfg.fwhm_bounds_hz[1])
    }

    fn model(&self, fwhm: f64) -> Result<Vec<f64>> {
        let shape = self.kind.with_fwhm(fwhm);
        self.points
            .par_iter()
            .map(|pt| {
                averaged_spectrum(
                    self.params,
                    self.omegas[pt.scan],
                    &shape,
                    pt.delay,
                    &self.cfg.quadrature,
                )
                .map(|a| a.value)
            })
            .collect()
    }

    fn offsets_for(&self, model: &[f64]) -> Vec<f64> {
        match &self.cfg.offsets {
            OffsetMode::Frozen(values) => values.clone(),
            OffsetMode::Free => {
                let mut num = vec![0.0; self.n_scans];
                let mut den = vec![0.0; self.n_scans];
                for (pt, m) in self.points.iter().zip(model) {
                    let w = pt.sigma.powi(-2);
                    num[pt.scan] += w * (pt.measured - m);
                    den[pt.scan] += w;
                }
                num.iter().zip(&den).map(|(n, d)| n / d).collect()
            }
        }
    }

    fn chi_squared(&self, model: &[f64], offsets: &[f64]) -> f64 {
        self.points
            .iter()
            .zip(model)
            .map(|(pt, m)| ((m + offsets[pt.scan] - pt.measured) / pt.sigma).powi(2))
            .sum()
    }

    /// Objective with the offsets profiled out, as a function of `ln fwhm`.
    fn profiled(&self, log_fwhm: f64) -> Result<f64> {
        let model = self.model(self.clamp(log_fwhm.exp()))?;
        let offsets = self.offsets_for(&model);
        Ok(self.chi_squared(&model, &offsets))
    }

    fn residual_rms_db(&self, model: &[f64], offsets: &[f64]) -> Result<f64> {
        let mut sum = 0.0;
        for (pt, m) in self.points.iter().zip(model) {
            let predicted = m + offsets[pt.scan];
            sum += (to_db(predicted)? - pt.measured_db).powi(2);
        }
        Ok((sum / self.points.len() as f64).sqrt())
    }

    /// `(JᵀJ)⁻¹` of the weighted residuals with respect to `(fwhm, free offsets)`.
    fn covariance(&self, fwhm: f64) -> Result<Option<DMatrix<f64>>> {
        let h = 1e-3 * fwhm;
        let up = self.model(fwhm + h)?;
        let down = self.model((fwhm - h).max(f64::MIN_POSITIVE))?;
        let free = matches!(self.cfg.offsets, OffsetMode::Free);
        let cols = if free { 1 + self.n_scans } else { 1 };
        let mut jac = DMatrix::zeros(self.points.len(), cols);
        for (i, pt) in self.points.iter().enumerate() {
            jac[(i, 0)] = (up[i] - down[i]) / (2.0 * h) / pt.sigma;
            if free {
                jac[(i, 1 + pt.scan)] = 1.0 / pt.sigma;
            }
        }
        Ok((jac.transpose() * &jac).try_inverse())
    }
}

fn collect_points(scans: &[MeasuredScan], group_index: f64) -> Result<Vec<Point>> {
    let mut points = Vec::new();
    for (scan_idx, scan) in scans.iter().enumerate() {
        if scan.rows.len() < 3 {
            return Err(Error::InvalidScan {
                demod_hz: scan.demod_freq_hz,
                reason: format!("needs at least 3 rows, got {}", scan.rows.len()),
            });
        }
        for row in scan.corrected_rows()? {
            if row.std_dev_db <= 0.0 {
                return Err(Error::InvalidScan {
                    demod_hz: scan.demod_freq_hz,
                    reason: "standard deviations must be positive for weighting".into(),
                });
            }
            points.push(Point {
                scan: scan_idx,
                delay: DelaySetting::from_fiber(row.excess_fiber_m, group_index),
                measured: from_db(row.noise_db),
                measured_db: row.noise_db,
                sigma: db_sigma_to_linear(row.noise_db, row.std_dev_db),
            });
        }
    }
    Ok(points)
}

/// Fit a shared lineshape width (and per-scan offsets) to the scans.
pub fn fit_model(
    scans: &[MeasuredScan],
    params: &ScaledOpoParams,
    kind: LineshapeKind,
    cfg: &FitConfig,
) -> Result<FitResult> {
    cfg.validate()?;
    params.validate()?;
    if scans.is_empty() {
        return Err(Error::InvalidInput("no scans to fit".into()));
    }
    if let OffsetMode::Frozen(values) = &cfg.offsets {
        if values.len() != scans.len() {
            return Err(Error::InvalidInput(format!(
                "{} frozen offsets given for {} scans",
                values.len(),
                scans.len()
            )));
        }
    }

    let problem = Problem {
        params,
        kind,
        omegas: scans
            .iter()
            .map(|s| params.scaled_frequency(s.demod_freq_hz))
            .collect(),
        points: collect_points(scans, cfg.group_index)?,
        n_scans: scans.len(),
        cfg,
    };

    let runs = cfg
        .start_widths()
        .into_par_iter()
        .map(|start| {
            nelder_mead(
                |x: &[f64]| problem.profiled(x[0]),
                &[start.ln()],
                &[0.3],
                &cfg.nelder_mead,
            )
            .map(|m| (start, m))
        })
        .collect::<Result<Vec<_>>>()?;

    let starts: Vec<StartOutcome> = runs
        .iter()
        .map(|(start, m)| StartOutcome {
            start_fwhm_hz: *start,
            fwhm_hz: problem.clamp(m.x[0].exp()),
            objective: m.value,
            iterations: m.iterations,
            converged: m.converged,
        })
        .collect();
    // first start wins ties so the choice does not depend on scheduling
    let (_, best) = runs
        .iter()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .expect("at least one start");

    let fwhm = problem.clamp(best.x[0].exp());
    let model = problem.model(fwhm)?;
    let offsets = problem.offsets_for(&model);
    let objective = problem.chi_squared(&model, &offsets);

    let [lo, hi] = cfg.fwhm_bounds_hz;
    let at_bound = fwhm <= lo * (1.0 + 1e-6) || fwhm >= hi * (1.0 - 1e-6);
    let flat = {
        let at_lo = problem.profiled(lo.ln())?;
        let at_hi = problem.profiled(hi.ln())?;
        (at_hi - at_lo).abs() <= 1e-9 * at_lo.abs().max(1.0)
    };

    let free_offsets = matches!(cfg.offsets, OffsetMode::Free);
    let covariance = problem.covariance(fwhm)?;
    let fwhm_std_hz = covariance.as_ref().map(|c| c[(0, 0)].sqrt());
    let offsets_std = covariance
        .as_ref()
        .filter(|_| free_offsets)
        .map(|c| (1..=scans.len()).map(|i| c[(i, i)].sqrt()).collect());
    let dof = problem
        .points
        .len()
        .saturating_sub(1 + if free_offsets { scans.len() } else { 0 });

    Ok(FitResult {
        lineshape_kind: kind,
        lineshape_fwhm_hz: fwhm,
        demod_freqs_hz: scans.iter().map(|s| s.demod_freq_hz).collect(),
        residual_rms_db: problem.residual_rms_db(&model, &offsets)?,
        offsets_linear: offsets,
        objective,
        reduced_chi_squared: if dof > 0 {
            objective / dof as f64
        } else {
            f64::NAN
        },
        covariance: covariance.map(|c| c.row_iter().map(|r| r.iter().copied().collect()).collect()),
        fwhm_std_hz,
        offsets_std,
        iterations: best.iterations,
        converged: best.converged,
        at_bound,
        degenerate: at_bound || flat,
        starts,
        history: best.history.clone(),
    })
}

/// Forward-model data sets for testing the fit: `S̄ + offset` with multiplicative Gaussian
/// noise of relative size `noise_rel`, quoted with the matching dB standard deviation.
#[allow(clippy::too_many_arguments)]
pub fn synthesize_scans<R: Rng + ?Sized>(
    params: &ScaledOpoParams,
    shape: &crate::drift::Lineshape,
    demod_freqs_hz: &[f64],
    offsets: &[f64],
    delays_m: &[f64],
    group_index: f64,
    noise_rel: f64,
    quadrature: &QuadratureOptions,
    rng: &mut R,
) -> Result<Vec<MeasuredScan>> {
    if offsets.len() != demod_freqs_hz.len() {
        return Err(Error::InvalidInput(
            "one offset per demodulation frequency".into(),
        ));
    }
    let std_dev_db = 10.0 / std::f64::consts::LN_10 * noise_rel;
    demod_freqs_hz
        .iter()
        .zip(offsets)
        .map(|(&f, &offset)| {
            let omega = params.scaled_frequency(f);
            let rows = delays_m
                .iter()
                .map(|&l| {
                    let delay = DelaySetting::from_fiber(l, group_index);
                    let clean =
                        averaged_spectrum(params, omega, shape, delay, quadrature)?.value + offset;
                    let z: f64 = StandardNormal.sample(rng);
                    Ok(ScanRow {
                        excess_fiber_m: l,
                        noise_db: to_db(clean * (1.0 + noise_rel * z))?,
                        std_dev_db,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(MeasuredScan {
                demod_freq_hz: f,
                rows,
                metadata: ScanMetadata::default(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::Lineshape;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn params() -> ScaledOpoParams {
        ScaledOpoParams::new(0.934, 0.227, 0.0, 0.912, PI * 8e6).unwrap()
    }

    fn delays() -> Vec<f64> {
        (0..16).map(|i| 4.0 * i as f64).collect()
    }

    #[test]
    fn electronic_noise_examples() {
        assert!((subtract_electronic_noise(0.0, -14.0).unwrap() + 0.176).abs() < 1e-3);
        assert!((subtract_electronic_noise(-2.3, -14.0).unwrap() + 2.604).abs() < 1e-3);
        assert_eq!(
            subtract_electronic_noise(-2.3, f64::NEG_INFINITY).unwrap(),
            -2.3
        );
        assert!(subtract_electronic_noise(-14.0, -14.0).is_err());
        assert!(subtract_electronic_noise(-15.0, -14.0).is_err());
    }

    #[test]
    fn shot_normalization() {
        let sql = [2.0, 4.0, 1.0];
        assert_eq!(normalize_to_shot(&sql, &sql).unwrap(), vec![1.0; 3]);
        let raw: Vec<f64> = sql.iter().map(|s| s * from_db(-3.0)).collect();
        for r in normalize_to_shot(&raw, &sql).unwrap() {
            assert!((r - 0.501).abs() < 1e-3);
        }
        assert!(normalize_to_shot(&[1.0], &[0.0]).is_err());
        assert!(matches!(
            normalize_to_shot(&[1.0, 2.0], &[1.0]),
            Err(Error::LengthMismatch {
                raw: 2,
                reference: 1
            })
        ));
    }

    #[test]
    fn scan_validation() {
        let mut scan = MeasuredScan {
            demod_freq_hz: 1e6,
            rows: vec![],
            metadata: ScanMetadata::default(),
        };
        assert!(scan.validate().is_err());
        scan.rows = vec![
            ScanRow {
                excess_fiber_m: 0.0,
                noise_db: -1.0,
                std_dev_db: 0.1,
            };
            3
        ];
        assert!(scan.validate().is_ok());
        scan.metadata.electronics_floor_db = Some(-0.5);
        assert!(scan.validate().is_err());
        scan.metadata.electronics_floor_db = Some(-14.0);
        let rows = scan.corrected_rows().unwrap();
        assert!(rows[0].noise_db < -1.0);
        scan.rows[1].std_dev_db = -0.1;
        assert!(scan.validate().is_err());
    }

    #[test]
    fn start_widths_are_log_spaced() {
        let w = FitConfig::default().start_widths();
        assert_eq!(w.len(), 5);
        assert!((w[0] - 100e3).abs() < 1e-6 && (w[4] - 3e6).abs() < 1e-3);
        let r = w[1] / w[0];
        assert!(w.windows(2).all(|p| (p[1] / p[0] - r).abs() < 1e-12));
    }

    #[test]
    fn recovers_synthetic_ground_truth() {
        let p = params();
        let shape = Lineshape::Gaussian { fwhm_hz: 700e3 };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let q = QuadratureOptions::default();
        let scans = synthesize_scans(
            &p,
            &shape,
            &[1e6, 2e6, 3e6],
            &[0.07, 0.03, 0.0],
            &delays(),
            1.5,
            0.01,
            &q,
            &mut rng,
        )
        .unwrap();
        let fit = fit_model(&scans, &p, LineshapeKind::Gaussian, &FitConfig::default()).unwrap();
        assert!(fit.converged);
        assert!(!fit.degenerate);
        assert!(
            (fit.lineshape_fwhm_hz / 700e3 - 1.0).abs() < 0.05,
            "{}",
            fit.lineshape_fwhm_hz
        );
        for (got, want) in fit.offsets_linear.iter().zip([0.07, 0.03, 0.0]) {
            assert!((got - want).abs() < 0.005, "{got} vs {want}");
        }
        assert!(fit.history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(fit.starts.len(), 5);
        assert!(fit.fwhm_std_hz.unwrap() > 0.0);
    }

    #[test]
    fn delta_data_pins_width_at_lower_bound() {
        let p = params();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let q = QuadratureOptions::default();
        let scans = synthesize_scans(
            &p,
            &Lineshape::Delta,
            &[1e6, 2e6, 3e6],
            &[0.0; 3],
            &delays(),
            1.5,
            0.0,
            &q,
            &mut rng,
        )
        .unwrap();
        let mut scans = scans;
        for s in &mut scans {
            for r in &mut s.rows {
                r.std_dev_db = 0.04;
            }
        }
        let cfg = FitConfig::default();
        let fit = fit_model(&scans, &p, LineshapeKind::Gaussian, &cfg).unwrap();
        assert!(fit.degenerate && fit.at_bound);
        assert!((fit.lineshape_fwhm_hz - cfg.fwhm_bounds_hz[0]).abs() < 1e-6);
        for o in &fit.offsets_linear {
            assert!(o.abs() < 1e-3, "{o}");
        }
    }

    #[test]
    fn rejects_short_scans_and_bad_frozen_offsets() {
        let p = params();
        let scan = MeasuredScan {
            demod_freq_hz: 1e6,
            rows: vec![
                ScanRow {
                    excess_fiber_m: 0.0,
                    noise_db: -1.0,
                    std_dev_db: 0.1,
                };
                2
            ],
            metadata: ScanMetadata::default(),
        };
        assert!(fit_model(
            std::slice::from_ref(&scan),
            &p,
            LineshapeKind::Gaussian,
            &FitConfig::default()
        )
        .is_err());
        let mut long = scan;
        long.rows.push(long.rows[0]);
        let cfg = FitConfig {
            offsets: OffsetMode::Frozen(vec![0.0, 0.0]),
            ..Default::default()
        };
        assert!(fit_model(&[long], &p, LineshapeKind::Gaussian, &cfg).is_err());
    }
}
