//! Detuned sub-threshold OPO: input-output coefficients and homodyne noise spectra.
//!
//! All frequencies and rates are scaled to the total cavity amplitude decay rate
//! `k_tot = k1 + k2`. With that convention a cavity of Lorentzian FWHM `δν` (Hz) has
//! `k_tot = π·δν`, and a demodulation frequency `f` maps to `Ω = 2πf / k_tot = 2f/δν`.
//!
//! Two independent routes to the quadrature noise spectrum are provided:
//! [`spectrum_oracle`] builds it from the Bogoliubov coefficients at both sidebands with
//! vacuum input correlators, and [`spectrum_closed`] is the algebraically reduced form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};
use crate::units::SPEED_OF_LIGHT;

/// Largest accepted pump amplitude `|α|`; the model is only valid below threshold.
pub const MAX_PUMP_AMPLITUDE: f64 = 0.99;

/// Measured description of the OPO cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalCavity {
    pub linewidth_fwhm_hz: f64,
    pub output_coupler_transmission: f64,
    pub round_trip_loss: f64,
    pub free_spectral_range_hz: Option<f64>,
}

impl PhysicalCavity {
    pub fn new(
        linewidth_fwhm_hz: f64,
        output_coupler_transmission: f64,
        round_trip_loss: f64,
        free_spectral_range_hz: Option<f64>,
    ) -> Result<Self> {
        let cavity = Self {
            linewidth_fwhm_hz,
            output_coupler_transmission,
            round_trip_loss,
            free_spectral_range_hz,
        };
        cavity.validate()?;
        Ok(cavity)
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.output_coupler_transmission;
        let l = self.round_trip_loss;
        check(
            self.linewidth_fwhm_hz > 0.0 && self.linewidth_fwhm_hz.is_finite(),
            "linewidth_fwhm_hz",
            self.linewidth_fwhm_hz,
            "must be positive and finite",
        )?;
        check(
            t > 0.0 && t < 1.0,
            "output_coupler_transmission",
            t,
            "must lie in (0, 1)",
        )?;
        check(
            (0.0..1.0).contains(&l),
            "round_trip_loss",
            l,
            "must lie in [0, 1)",
        )?;
        check(
            t + l < 1.0,
            "round_trip_loss",
            l,
            "transmission plus loss must stay below 1",
        )?;
        if let Some(fsr) = self.free_spectral_range_hz {
            check(
                fsr > 0.0 && fsr.is_finite(),
                "free_spectral_range_hz",
                fsr,
                "must be positive",
            )?;
        }
        Ok(())
    }

    /// Escape efficiency `T/(T+L)`.
    pub fn escape_efficiency(&self) -> f64 {
        let t = self.output_coupler_transmission;
        t / (t + self.round_trip_loss)
    }

    /// Total amplitude decay rate `k1 + k2 = π·δν`, in s⁻¹.
    pub fn total_decay_rate(&self) -> f64 {
        PI * self.linewidth_fwhm_hz
    }
}

/// Homodyne detection chain downstream of the cavity output coupler.
///
/// The mode-overlap visibility enters squared; the photodiode quantum efficiency enters
/// linearly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionChain {
    pub homodyne_visibility: f64,
    pub detector_quantum_efficiency: f64,
}

impl Default for DetectionChain {
    fn default() -> Self {
        Self {
            homodyne_visibility: 0.98,
            detector_quantum_efficiency: 0.95,
        }
    }
}

impl DetectionChain {
    pub fn validate(&self) -> Result<()> {
        let v = self.homodyne_visibility;
        let q = self.detector_quantum_efficiency;
        check(
            v > 0.0 && v <= 1.0,
            "homodyne_visibility",
            v,
            "must lie in (0, 1]",
        )?;
        check(
            q > 0.0 && q <= 1.0,
            "detector_quantum_efficiency",
            q,
            "must lie in (0, 1]",
        )
    }

    pub fn efficiency(&self) -> f64 {
        self.homodyne_visibility.powi(2) * self.detector_quantum_efficiency
    }
}

/// Dimensionless OPO description plus the physical rate scale `k_tot`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledOpoParams {
    /// Escape efficiency `k1/(k1+k2)`.
    pub eta: f64,
    /// Pump amplitude `|α|` scaled to `k_tot`; 1 is threshold.
    pub alpha_mag: f64,
    /// Pump phase `φ`, radians.
    pub pump_phase: f64,
    /// Detection efficiency after the cavity.
    pub eta_det: f64,
    /// `k1 + k2` in s⁻¹.
    pub k_tot: f64,
}

impl ScaledOpoParams {
    pub fn new(
        eta: f64,
        alpha_mag: f64,
        pump_phase: f64,
        eta_det: f64,
        k_tot: f64,
    ) -> Result<Self> {
        let p = Self {
            eta,
            alpha_mag,
            pump_phase,
            eta_det,
            k_tot,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check(
            self.eta > 0.0 && self.eta <= 1.0,
            "eta",
            self.eta,
            "must lie in (0, 1]",
        )?;
        check(
            self.alpha_mag >= 0.0 && self.alpha_mag.is_finite(),
            "alpha_mag",
            self.alpha_mag,
            "must be non-negative",
        )?;
        if self.alpha_mag > MAX_PUMP_AMPLITUDE {
            return Err(Error::AboveThreshold(self.alpha_mag));
        }
        check(
            self.pump_phase.is_finite(),
            "pump_phase",
            self.pump_phase,
            "must be finite",
        )?;
        check(
            self.eta_det > 0.0 && self.eta_det <= 1.0,
            "eta_det",
            self.eta_det,
            "must lie in (0, 1]",
        )?;
        check(
            self.k_tot > 0.0 && self.k_tot.is_finite(),
            "k_tot",
            self.k_tot,
            "must be positive",
        )
    }

    pub fn with_alpha(mut self, alpha_mag: f64) -> Result<Self> {
        self.alpha_mag = alpha_mag;
        self.validate()?;
        Ok(self)
    }

    /// Complex pump amplitude `|α|·e^{iφ}`.
    pub fn alpha(&self) -> Complex64 {
        Complex64::from_polar(self.alpha_mag, self.pump_phase)
    }

    /// Demodulation frequency in Hz to scaled `Ω`.
    pub fn scaled_frequency(&self, freq_hz: f64) -> f64 {
        2.0 * PI * freq_hz / self.k_tot
    }

    /// Laser frequency offset in Hz to scaled detuning `ΔΩ`.
    pub fn scaled_detuning(&self, offset_hz: f64) -> f64 {
        2.0 * PI * offset_hz / self.k_tot
    }

    /// Phase picked up per unit scaled detuning by a relative delay `tau_d`:
    /// `2Δω·τ_D = 2·k_tot·τ_D·ΔΩ`.
    pub fn delay_phase_slope(&self, tau_d_s: f64) -> f64 {
        2.0 * self.k_tot * tau_d_s
    }
}

/// Convert a measured cavity into scaled parameters.
pub fn scale_params(
    cavity: &PhysicalCavity,
    alpha_mag: f64,
    pump_phase: f64,
    eta_det: f64,
) -> Result<ScaledOpoParams> {
    cavity.validate()?;
    ScaledOpoParams::new(
        cavity.escape_efficiency(),
        alpha_mag,
        pump_phase,
        eta_det,
        cavity.total_decay_rate(),
    )
}

/// A point at which the homodyne noise is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionPoint {
    /// Scaled demodulation frequency `Ω ≥ 0`.
    pub demod_freq_scaled: f64,
    /// Scaled pump-cavity detuning `ΔΩ`.
    pub detuning_scaled: f64,
    /// Total phase argument `Δφ + 2Δω·τ_D`.
    pub lo_phase_total: f64,
}

impl DetectionPoint {
    pub fn new(demod_freq_scaled: f64, detuning_scaled: f64, lo_phase_total: f64) -> Result<Self> {
        check(
            demod_freq_scaled >= 0.0,
            "demod_freq_scaled",
            demod_freq_scaled,
            "must be non-negative",
        )?;
        Ok(Self {
            demod_freq_scaled,
            detuning_scaled,
            lo_phase_total,
        })
    }

    pub fn spectrum(&self, p: &ScaledOpoParams) -> f64 {
        spectrum_closed(
            p,
            self.demod_freq_scaled,
            self.detuning_scaled,
            self.lo_phase_total,
        )
    }
}

/// Total phase argument seen by the closed form for local-oscillator phase `theta`.
pub fn total_phase(theta: f64, pump_phase: f64) -> f64 {
    2.0 * theta - pump_phase
}

/// Input-output coefficients: `a_out(Ω) = [A1 a_v1(Ω) + A2 a_v2(Ω) + C1 a_v1†(−Ω) + C2 a_v2†(−Ω)] / B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovCoeffs {
    pub a1: Complex64,
    pub a2: Complex64,
    pub c1: Complex64,
    pub c2: Complex64,
    pub b: Complex64,
}

pub fn bogoliubov_coeffs(p: &ScaledOpoParams, omega: f64, detuning: f64) -> BogoliubovCoeffs {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let eta = p.eta;
    let alpha = p.alpha();
    let a2_mag = p.alpha_mag * p.alpha_mag;
    let mix = (eta * (1.0 - eta)).sqrt();

    let loss = Complex64::new(1.0 - eta, -omega);
    let a1 = eta * eta - loss * loss + detuning * (2.0 * eta * i - detuning) + a2_mag;
    let a2 = 2.0 * mix * (i * (detuning - omega) + one);
    let c1 = 2.0 * eta * alpha;
    let c2 = 2.0 * mix * alpha;
    let decay = Complex64::new(1.0, -omega);
    let b = decay * decay + detuning * detuning - a2_mag;

    BogoliubovCoeffs { a1, a2, c1, c2, b }
}

/// Quadrature noise spectrum built directly from the Bogoliubov coefficients.
///
/// `theta` is the local-oscillator phase. The quadrature component at `+Ω` couples to
/// `a_vj(Ω)` with weight `G_j = (A_j(Ω)/B(Ω))e^{−iθ} + (C_j*/B(−Ω)*)e^{iθ}`; with vacuum
/// inputs its noise is `Σ_j |G_j|²`, which is averaged over the `±Ω` sidebands.
pub fn spectrum_oracle(p: &ScaledOpoParams, omega: f64, detuning: f64, theta: f64) -> f64 {
    let lo = Complex64::from_polar(1.0, -theta);
    let sideband = |w: f64| {
        let plus = bogoliubov_coeffs(p, w, detuning);
        let minus = bogoliubov_coeffs(p, -w, detuning);
        let g1 = plus.a1 / plus.b * lo + plus.c1.conj() / minus.b.conj() * lo.conj();
        let g2 = plus.a2 / plus.b * lo + plus.c2.conj() / minus.b.conj() * lo.conj();
        g1.norm_sqr() + g2.norm_sqr()
    };
    let ideal = 0.5 * (sideband(omega) + sideband(-omega));
    1.0 + p.eta_det * (ideal - 1.0)
}

/// `1 + Ω² − ΔΩ² + |α|²`, the in-phase weight of the interference term.
fn cosine_weight(p: &ScaledOpoParams, omega: f64, detuning: f64) -> f64 {
    1.0 + omega * omega - detuning * detuning + p.alpha_mag * p.alpha_mag
}

/// Closed-form homodyne noise spectrum at total phase `Δφ + 2Δω·τ_D`.
///
/// Written as `1 + (8η_det η|α|/|B|²)[|α| + (K/2)cos x + ΔΩ sin x]`, which is regular at
/// `|α| = 0`.
pub fn spectrum_closed(p: &ScaledOpoParams, omega: f64, detuning: f64, total_phase: f64) -> f64 {
    let a = p.alpha_mag;
    let b_sqr = {
        let re = 1.0 - omega * omega + detuning * detuning - a * a;
        let im = -2.0 * omega;
        re * re + im * im
    };
    let k = cosine_weight(p, omega, detuning);
    let (sin, cos) = total_phase.sin_cos();
    1.0 + 8.0 * p.eta_det * p.eta * a / b_sqr * (a + 0.5 * k * cos + detuning * sin)
}

/// Squeezing and anti-squeezing levels at `ΔΩ = 0` from the lossless-cavity formula
/// `1 ∓ 4ηη_det|α| / ((1 ± |α|)² + Ω²)`.
pub fn on_resonance_levels(p: &ScaledOpoParams, omega: f64) -> (f64, f64) {
    let a = p.alpha_mag;
    let gain = 4.0 * p.eta * p.eta_det * a;
    let squeezed = 1.0 - gain / ((1.0 + a).powi(2) + omega * omega);
    let anti = 1.0 + gain / ((1.0 - a).powi(2) + omega * omega);
    (squeezed, anti)
}

/// Total phase that minimizes the noise, in `[0, 2π)`; equals π at zero detuning.
pub fn optimal_phase(p: &ScaledOpoParams, omega: f64, detuning: f64) -> f64 {
    let k = cosine_weight(p, omega, detuning);
    // minimizer of (K/2)cos x + ΔΩ sin x
    let phase = (-detuning).atan2(-0.5 * k);
    phase.rem_euclid(2.0 * PI)
}

/// Local-oscillator fiber length that compensates the OPO dispersion to first order in
/// the detuning: `l = c / (n_g·k_tot·(1 + Ω² + |α|²))`.
pub fn compensation_length(p: &ScaledOpoParams, omega: f64, group_index: f64) -> Result<f64> {
    check(
        group_index >= 1.0,
        "group_index",
        group_index,
        "must be at least 1",
    )?;
    Ok(compensation_delay(p, omega) * SPEED_OF_LIGHT / group_index)
}

/// Relative delay, in seconds, that compensates the OPO dispersion to first order.
pub fn compensation_delay(p: &ScaledOpoParams, omega: f64) -> f64 {
    1.0 / (p.k_tot * (1.0 + omega * omega + p.alpha_mag * p.alpha_mag))
}

/// Find the pump amplitude giving the requested on-resonance squeezing level (dB) at `omega`.
///
/// The squeezed level decreases monotonically in `|α|` below threshold, so plain bisection
/// on `[0, MAX_PUMP_AMPLITUDE]` is used.
pub fn pump_for_squeezing(p: &ScaledOpoParams, omega: f64, target_db: f64) -> Result<f64> {
    let target = crate::units::from_db(target_db);
    let level = |a: f64| -> Result<f64> { Ok(on_resonance_levels(&p.with_alpha(a)?, omega).0) };

    let (mut lo, mut hi) = (0.0, MAX_PUMP_AMPLITUDE);
    if target > level(lo)? || target < level(hi)? {
        return Err(Error::InvalidParameter {
            name: "target_db",
            value: target_db,
            reason: "squeezing level not reachable below threshold",
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if level(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
