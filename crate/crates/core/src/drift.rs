//! Averaging the squeezing spectrum over a quasi-static detuning distribution.
//!
//! The laser drifts slowly compared with the cavity response, so each instant is a
//! detuned steady state. The homodyne phase stays locked at the white-light value π and
//! picks up `2·k_tot·τ_D·ΔΩ` from the relative delay `τ_D` between the two paths.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};
use crate::optimize::golden_section;
use crate::physics::{spectrum_closed, ScaledOpoParams};
use crate::quadrature::{integrate, Integral, QuadratureOptions};
use crate::units::{to_db, SPEED_OF_LIGHT};

/// FWHM of a unit-variance Gaussian, `2√(2 ln 2)`.
pub const GAUSSIAN_FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

/// Gaussian integration half-width in standard deviations.
pub const GAUSSIAN_CUTOFF_SIGMAS: f64 = 8.0;

/// Probability mass of a Gaussian beyond ±8σ, `erfc(8/√2)`.
const GAUSSIAN_TAIL_MASS: f64 = 1.244_192_114_854_365_8e-15;

/// Spectral density of the pump-cavity detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Lineshape {
    Delta,
    Gaussian { fwhm_hz: f64 },
    Lorentzian { fwhm_hz: f64 },
}

impl Lineshape {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Lineshape::Delta => Ok(()),
            Lineshape::Gaussian { fwhm_hz } | Lineshape::Lorentzian { fwhm_hz } => check(
                fwhm_hz > 0.0 && fwhm_hz.is_finite(),
                "fwhm_hz",
                fwhm_hz,
                "must be positive for a non-delta lineshape",
            ),
        }
    }

    pub fn fwhm_hz(&self) -> f64 {
        match *self {
            Lineshape::Delta => 0.0,
            Lineshape::Gaussian { fwhm_hz } | Lineshape::Lorentzian { fwhm_hz } => fwhm_hz,
        }
    }

    pub fn kind(&self) -> Option<LineshapeKind> {
        match self {
            Lineshape::Delta => None,
            Lineshape::Gaussian { .. } => Some(LineshapeKind::Gaussian),
            Lineshape::Lorentzian { .. } => Some(LineshapeKind::Lorentzian),
        }
    }

    /// FWHM in scaled detuning units, `2π·fwhm / k_tot`.
    pub fn scaled_fwhm(&self, k_tot: f64) -> f64 {
        2.0 * PI * self.fwhm_hz() / k_tot
    }

    /// Gaussian σ in scaled units (zero for other shapes).
    pub fn scaled_sigma(&self, k_tot: f64) -> f64 {
        match self {
            Lineshape::Gaussian { .. } => self.scaled_fwhm(k_tot) / GAUSSIAN_FWHM_PER_SIGMA,
            _ => 0.0,
        }
    }

    /// Lorentzian half width γ in scaled units (zero for other shapes).
    pub fn scaled_half_width(&self, k_tot: f64) -> f64 {
        match self {
            Lineshape::Lorentzian { .. } => 0.5 * self.scaled_fwhm(k_tot),
            _ => 0.0,
        }
    }
}

/// Families with a width that can be fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineshapeKind {
    Gaussian,
    Lorentzian,
}

impl LineshapeKind {
    pub fn with_fwhm(self, fwhm_hz: f64) -> Lineshape {
        match self {
            LineshapeKind::Gaussian => Lineshape::Gaussian { fwhm_hz },
            LineshapeKind::Lorentzian => Lineshape::Lorentzian { fwhm_hz },
        }
    }

    pub fn other(self) -> Self {
        match self {
            LineshapeKind::Gaussian => LineshapeKind::Lorentzian,
            LineshapeKind::Lorentzian => LineshapeKind::Gaussian,
        }
    }
}

/// Probability density per unit scaled detuning.
///
/// The delta lineshape is a point mass: the density is `+∞` at zero and `0` elsewhere.
pub fn lineshape_density(shape: &Lineshape, detuning: f64, k_tot: f64) -> Result<f64> {
    shape.validate()?;
    check(k_tot > 0.0, "k_tot", k_tot, "must be positive")?;
    Ok(match shape {
        Lineshape::Delta => {
            if detuning == 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        }
        Lineshape::Gaussian { .. } => {
            let sigma = shape.scaled_sigma(k_tot);
            (-0.5 * (detuning / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt())
        }
        Lineshape::Lorentzian { .. } => {
            let gamma = shape.scaled_half_width(k_tot);
            gamma / PI / (detuning * detuning + gamma * gamma)
        }
    })
}

/// Relative group delay of the local-oscillator path over the squeezing path.
///
/// Positive means the local oscillator travels longer than at white-light balance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelaySetting {
    pub tau_d_s: f64,
}

impl DelaySetting {
    pub fn from_seconds(tau_d_s: f64) -> Self {
        Self { tau_d_s }
    }

    /// Delay from an excess local-oscillator fiber length.
    pub fn from_fiber(excess_length_m: f64, group_index: f64) -> Self {
        Self {
            tau_d_s: excess_length_m * group_index / SPEED_OF_LIGHT,
        }
    }

    pub fn fiber_length(&self, group_index: f64) -> f64 {
        self.tau_d_s * SPEED_OF_LIGHT / group_index
    }
}

/// Drift-averaged noise power with its error budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragedSpectrum {
    pub value: f64,
    /// Quadrature error plus any truncated-tail bound.
    pub error: f64,
    /// Bound on the contribution of the lineshape tails outside the integration domain.
    pub tail_bound: f64,
    pub evaluations: usize,
}

/// Upper bound on the noise over all frequencies, detunings and phases: the on-resonance
/// anti-squeezing level at zero demodulation frequency.
pub fn noise_upper_bound(p: &ScaledOpoParams) -> f64 {
    let a = p.alpha_mag;
    1.0 + 4.0 * p.eta * p.eta_det * a / (1.0 - a).powi(2)
}

/// Noise at detuning `ΔΩ` with the phase locked at π and a relative delay `tau_d`.
pub fn locked_spectrum(p: &ScaledOpoParams, omega: f64, detuning: f64, delay: DelaySetting) -> f64 {
    let phase = PI + p.delay_phase_slope(delay.tau_d_s) * detuning;
    spectrum_closed(p, omega, detuning, phase)
}

/// Average the locked-phase spectrum over the lineshape.
///
/// Gaussian: integrate on ±8σ and bound the remaining tail mass by the global noise bound.
/// Lorentzian: substitute `ΔΩ = γ·tan u`, which maps the whole real line onto
/// `u ∈ (−π/2, π/2)` with uniform weight `1/π`, so no tail is truncated.
pub fn averaged_spectrum(
    p: &ScaledOpoParams,
    omega: f64,
    shape: &Lineshape,
    delay: DelaySetting,
    opts: &QuadratureOptions,
) -> Result<AveragedSpectrum> {
    shape.validate()?;
    check(
        delay.tau_d_s.is_finite(),
        "tau_d_s",
        delay.tau_d_s,
        "must be finite",
    )?;
    let integrand = |detuning: f64| locked_spectrum(p, omega, detuning, delay);

    match shape {
        Lineshape::Delta => Ok(AveragedSpectrum {
            value: integrand(0.0),
            error: 0.0,
            tail_bound: 0.0,
            evaluations: 1,
        }),
        Lineshape::Gaussian { .. } => {
            let sigma = shape.scaled_sigma(p.k_tot);
            let norm = 1.0 / (2.0 * PI).sqrt();
            let Integral {
                value,
                error,
                evaluations,
            } = integrate(
                |z| integrand(sigma * z) * norm * (-0.5 * z * z).exp(),
                -GAUSSIAN_CUTOFF_SIGMAS,
                GAUSSIAN_CUTOFF_SIGMAS,
                opts,
            )?;
            let tail_bound = noise_upper_bound(p) * GAUSSIAN_TAIL_MASS;
            Ok(AveragedSpectrum {
                value,
                error: error + tail_bound,
                tail_bound,
                evaluations,
            })
        }
        Lineshape::Lorentzian { .. } => {
            let gamma = shape.scaled_half_width(p.k_tot);
            let half = 0.5 * PI;
            let Integral {
                value,
                error,
                evaluations,
            } = integrate(|u| integrand(gamma * u.tan()) / PI, -half, half, opts)?;
            Ok(AveragedSpectrum {
                value,
                error,
                tail_bound: 0.0,
                evaluations,
            })
        }
    }
}

/// What the abscissa of a [`SqueezeTrace`] measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceAxis {
    PhaseRad,
    FrequencyHz,
    DelayS,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub x: f64,
    pub linear: f64,
    pub db: f64,
    pub error: f64,
}

/// A sampled noise curve, relative to shot noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezeTrace {
    pub axis: TraceAxis,
    pub points: Vec<TracePoint>,
}

impl SqueezeTrace {
    pub fn from_linear(axis: TraceAxis, xs: &[f64], linear: &[f64]) -> Result<Self> {
        let points = xs
            .iter()
            .zip(linear)
            .map(|(&x, &s)| {
                Ok(TracePoint {
                    x,
                    linear: s,
                    db: to_db(s)?,
                    error: 0.0,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { axis, points })
    }

    pub fn min(&self) -> Option<&TracePoint> {
        self.points
            .iter()
            .min_by(|a, b| a.linear.total_cmp(&b.linear))
    }

    pub fn max(&self) -> Option<&TracePoint> {
        self.points
            .iter()
            .max_by(|a, b| a.linear.total_cmp(&b.linear))
    }
}

/// Drift-averaged noise for each delay, in input order. Points are evaluated in parallel.
pub fn delay_scan(
    p: &ScaledOpoParams,
    omega: f64,
    shape: &Lineshape,
    delays: &[DelaySetting],
    opts: &QuadratureOptions,
) -> Result<SqueezeTrace> {
    if delays.is_empty() {
        return Err(Error::InvalidInput(
            "delay scan needs at least one delay".into(),
        ));
    }
    let points = delays
        .par_iter()
        .map(|&delay| {
            let at_delay = |source: Error| Error::AtDelay {
                tau_d_s: delay.tau_d_s,
                source: Box::new(source),
            };
            let avg = averaged_spectrum(p, omega, shape, delay, opts).map_err(at_delay)?;
            Ok(TracePoint {
                x: delay.tau_d_s,
                linear: avg.value,
                db: to_db(avg.value).map_err(at_delay)?,
                error: avg.error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SqueezeTrace {
        axis: TraceAxis::DelayS,
        points,
    })
}

/// Window and resolution of the optimal-delay search, in excess fiber length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelaySearch {
    pub min_fiber_m: f64,
    pub max_fiber_m: f64,
    pub grid_step_m: f64,
    pub group_index: f64,
    pub tolerance_m: f64,
}

impl Default for DelaySearch {
    fn default() -> Self {
        Self {
            min_fiber_m: -40.0,
            max_fiber_m: 120.0,
            grid_step_m: 1.0,
            group_index: 1.5,
            tolerance_m: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalDelay {
    pub delay: DelaySetting,
    pub excess_fiber_m: f64,
    pub value: f64,
    pub error: f64,
    /// False when the grid minimum sits on the search boundary.
    pub interior: bool,
    /// True when the noise does not depend on delay within the quadrature error.
    pub flat: bool,
}

/// Grid search over the window, then golden-section refinement between the neighbours of
/// the best grid point.
pub fn find_optimal_delay(
    p: &ScaledOpoParams,
    omega: f64,
    shape: &Lineshape,
    search: &DelaySearch,
    opts: &QuadratureOptions,
) -> Result<OptimalDelay> {
    check(
        search.grid_step_m > 0.0,
        "grid_step_m",
        search.grid_step_m,
        "must be positive",
    )?;
    check(
        search.max_fiber_m > search.min_fiber_m,
        "max_fiber_m",
        search.max_fiber_m,
        "must exceed min_fiber_m",
    )?;
    check(
        search.group_index >= 1.0,
        "group_index",
        search.group_index,
        "must be at least 1",
    )?;
    let n_g = search.group_index;
    let eval = |l: f64| averaged_spectrum(p, omega, shape, DelaySetting::from_fiber(l, n_g), opts);

    if let Lineshape::Delta = shape {
        let at_zero = eval(0.0)?;
        return Ok(OptimalDelay {
            delay: DelaySetting::from_seconds(0.0),
            excess_fiber_m: 0.0,
            value: at_zero.value,
            error: at_zero.error,
            interior: false,
            flat: true,
        });
    }

    let steps = ((search.max_fiber_m - search.min_fiber_m) / search.grid_step_m).ceil() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| (search.min_fiber_m + i as f64 * search.grid_step_m).min(search.max_fiber_m))
        .collect();
    let values = grid
        .par_iter()
        .map(|&l| eval(l))
        .collect::<Result<Vec<_>>>()?;

    let (best, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .expect("grid is non-empty");
    let hi = values
        .iter()
        .map(|v| v.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let max_err = values.iter().map(|v| v.error).fold(0.0, f64::max);
    let flat = hi - values[best].value <= 2.0 * max_err;

    if flat || best == 0 || best == grid.len() - 1 {
        return Ok(OptimalDelay {
            delay: DelaySetting::from_fiber(grid[best], n_g),
            excess_fiber_m: grid[best],
            value: values[best].value,
            error: values[best].error,
            interior: false,
            flat,
        });
    }

    let (l_star, _) = golden_section(
        |l| eval(l).map(|a| a.value),
        grid[best - 1],
        grid[best + 1],
        search.tolerance_m,
    )?;
    let at_star = eval(l_star)?;
    Ok(OptimalDelay {
        delay: DelaySetting::from_fiber(l_star, n_g),
        excess_fiber_m: l_star,
        value: at_star.value,
        error: at_star.error,
        interior: true,
        flat: false,
    })
}
