//! Group-delay budget of the local-oscillator and squeezing paths.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};
use crate::units::SPEED_OF_LIGHT;

/// One optical element along a path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathElement {
    Fiber {
        length_m: f64,
        group_index: f64,
    },
    FreeSpace {
        length_m: f64,
    },
    /// Resonant cavity traversed on line center.
    Cavity {
        linewidth_fwhm_hz: f64,
    },
    /// Fixed delay of an element with no simple model, e.g. a tapered amplifier.
    Lumped {
        delay_s: f64,
    },
    /// The squeezing OPO itself. Accepted by the parser only so it can be rejected with a
    /// clear message: its delay depends on the demodulation frequency.
    OpoCavity {
        linewidth_fwhm_hz: f64,
    },
}

impl PathElement {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PathElement::Fiber {
                length_m,
                group_index,
            } => {
                check(
                    length_m >= 0.0 && length_m.is_finite(),
                    "length_m",
                    length_m,
                    "must be non-negative",
                )?;
                check(
                    group_index >= 1.0 && group_index.is_finite(),
                    "group_index",
                    group_index,
                    "must be at least 1",
                )
            }
            PathElement::FreeSpace { length_m } => check(
                length_m >= 0.0 && length_m.is_finite(),
                "length_m",
                length_m,
                "must be non-negative",
            ),
            PathElement::Cavity { linewidth_fwhm_hz } => check(
                linewidth_fwhm_hz > 0.0 && linewidth_fwhm_hz.is_finite(),
                "linewidth_fwhm_hz",
                linewidth_fwhm_hz,
                "must be positive",
            ),
            PathElement::Lumped { delay_s } => check(
                delay_s >= 0.0 && delay_s.is_finite(),
                "delay_s",
                delay_s,
                "must be non-negative",
            ),
            PathElement::OpoCavity { .. } => Err(Error::OpoCavityInLedger),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PathElement::Fiber { .. } => "fiber",
            PathElement::FreeSpace { .. } => "free_space",
            PathElement::Cavity { .. } => "cavity",
            PathElement::Lumped { .. } => "lumped",
            PathElement::OpoCavity { .. } => "opo_cavity",
        }
    }
}

/// Group delay of a single element in seconds. A cavity on resonance delays by
/// `1/(π·δν)`.
pub fn element_delay(e: &PathElement) -> Result<f64> {
    e.validate()?;
    Ok(match *e {
        PathElement::Fiber {
            length_m,
            group_index,
        } => length_m * group_index / SPEED_OF_LIGHT,
        PathElement::FreeSpace { length_m } => length_m / SPEED_OF_LIGHT,
        PathElement::Cavity { linewidth_fwhm_hz } => 1.0 / (PI * linewidth_fwhm_hz),
        PathElement::Lumped { delay_s } => delay_s,
        PathElement::OpoCavity { .. } => unreachable!("rejected by validate"),
    })
}

/// Elements of both interferometer arms, starting at the shared laser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelayLedger {
    pub lo_path: Vec<PathElement>,
    pub squeeze_path: Vec<PathElement>,
    /// Linewidth of the frequency-doubling cavity, if the pump is generated by one.
    #[serde(default)]
    pub doubler_linewidth_hz: Option<f64>,
    /// Count the doubler's group delay on the squeezing arm. When false it is left out of
    /// both arms, as the laser follows the doubler through the lock.
    #[serde(default = "default_true")]
    pub include_doubler_in_squeeze_path: bool,
}

fn default_true() -> bool {
    true
}

/// Delay of every element, per arm, plus the relative delay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayBreakdown {
    pub lo_delays_s: Vec<f64>,
    pub squeeze_delays_s: Vec<f64>,
    pub doubler_delay_s: Option<f64>,
    pub lo_total_s: f64,
    pub squeeze_total_s: f64,
    pub tau_d_s: f64,
}

impl DelayLedger {
    pub fn validate(&self) -> Result<()> {
        if self.lo_path.is_empty() {
            return Err(Error::EmptyPath("lo_path"));
        }
        if self.squeeze_path.is_empty() {
            return Err(Error::EmptyPath("squeeze_path"));
        }
        for e in self.lo_path.iter().chain(&self.squeeze_path) {
            e.validate()?;
        }
        if let Some(lw) = self.doubler_linewidth_hz {
            PathElement::Cavity {
                linewidth_fwhm_hz: lw,
            }
            .validate()?;
        }
        Ok(())
    }

    pub fn breakdown(&self) -> Result<DelayBreakdown> {
        self.validate()?;
        let delays =
            |path: &[PathElement]| path.iter().map(element_delay).collect::<Result<Vec<_>>>();
        let lo_delays_s = delays(&self.lo_path)?;
        let squeeze_delays_s = delays(&self.squeeze_path)?;
        let doubler_delay_s = self
            .doubler_linewidth_hz
            .map(|lw| {
                element_delay(&PathElement::Cavity {
                    linewidth_fwhm_hz: lw,
                })
            })
            .transpose()?;

        let lo_total_s: f64 = lo_delays_s.iter().sum();
        let mut squeeze_total_s: f64 = squeeze_delays_s.iter().sum();
        if self.include_doubler_in_squeeze_path {
            squeeze_total_s += doubler_delay_s.unwrap_or(0.0);
        }
        Ok(DelayBreakdown {
            lo_delays_s,
            squeeze_delays_s,
            doubler_delay_s,
            lo_total_s,
            squeeze_total_s,
            tau_d_s: lo_total_s - squeeze_total_s,
        })
    }
}

/// `τ_D` = local-oscillator arm delay minus squeezing arm delay, excluding the OPO.
pub fn relative_delay(ledger: &DelayLedger) -> Result<f64> {
    Ok(ledger.breakdown()?.tau_d_s)
}

/// Change of local-oscillator fiber length that restores `τ_D = 0`.
pub fn white_light_length(ledger: &DelayLedger, group_index: f64) -> Result<f64> {
    check(
        group_index >= 1.0,
        "group_index",
        group_index,
        "must be at least 1",
    )?;
    Ok(white_light_correction(relative_delay(ledger)?, group_index))
}

pub fn white_light_correction(tau_d_s: f64, group_index: f64) -> f64 {
    -tau_d_s * SPEED_OF_LIGHT / group_index
}
