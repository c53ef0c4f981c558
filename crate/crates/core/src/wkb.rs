//! Cubic-potential approximation of the biased junction well.
//!
//! Near the critical current the washboard well is well described by a cubic
//! potential. Everything the simulator needs from the junction enters through
//! four closed forms: barrier height, plasma frequency, the |g⟩→|e⟩ transition
//! frequency, and the WKB escape rates out of the two lowest levels.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{FLUX_QUANTUM, HBAR};

/// Excited-state escape rate pinned by the anchored mode at `x = 2`, in s⁻¹.
pub const ANCHOR_EXCITED_RATE: f64 = 7.3e7;
/// Bias at which the anchored mode reproduces [`ANCHOR_EXCITED_RATE`].
pub const ANCHOR_BIAS_X: f64 = 2.0;
/// Admissible range of `x` for anchored rates.
pub const ANCHORED_RANGE: (f64, f64) = (1.0, 4.0);

/// How escape rates are obtained from the dimensionless bias `x = ΔU/ħω_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateMode {
    /// The WKB closed form, evaluated with a caller-supplied ω_p.
    Raw,
    /// The WKB x-dependence rescaled so that Γ_e(2) = 7.3e7 s⁻¹.
    Anchored,
}

impl RateMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RateMode::Raw => "raw",
            RateMode::Anchored => "anchored",
        }
    }
}

impl std::str::FromStr for RateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(RateMode::Raw),
            "anchored" => Ok(RateMode::Anchored),
            other => Err(Error::Config(format!(
                "unknown rate mode `{other}` (expected `raw` or `anchored`)"
            ))),
        }
    }
}

/// The two junction levels kept by the truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Ground,
    Excited,
}

impl Level {
    fn index(self) -> i32 {
        match self {
            Level::Ground => 0,
            Level::Excited => 1,
        }
    }
}

/// Physical bias point of the junction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionBias {
    /// I/I₀, in [0, 1).
    pub current_ratio: f64,
    /// I₀ in amperes.
    pub critical_current: f64,
    /// C in farads.
    pub capacitance: f64,
}

impl JunctionBias {
    pub fn new(current_ratio: f64, critical_current: f64, capacitance: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&current_ratio) {
            return Err(Error::Range(format!(
                "current ratio I/I0 = {current_ratio} must lie in [0, 1)"
            )));
        }
        if !(critical_current > 0.0) {
            return Err(Error::Range(format!(
                "critical current must be positive, got {critical_current} A"
            )));
        }
        if !(capacitance > 0.0) {
            return Err(Error::Range(format!(
                "capacitance must be positive, got {capacitance} F"
            )));
        }
        Ok(JunctionBias {
            current_ratio,
            critical_current,
            capacitance,
        })
    }

    fn headroom(&self) -> f64 {
        1.0 - self.current_ratio
    }
}

/// Barrier height ΔU = (4 I₀ Φ₀ / 3√2 π)(1 − I/I₀)^{3/2}, in joules.
pub fn barrier_height(bias: &JunctionBias) -> f64 {
    4.0 * bias.critical_current * FLUX_QUANTUM / (3.0 * 2f64.sqrt() * PI)
        * bias.headroom().powf(1.5)
}

/// Plasma frequency ω_p = 2^{1/4} √(2π I₀ / C Φ₀) (1 − I/I₀)^{1/4}, in rad/s.
pub fn plasma_frequency(bias: &JunctionBias) -> f64 {
    2f64.powf(0.25)
        * (2.0 * PI * bias.critical_current / (bias.capacitance * FLUX_QUANTUM)).sqrt()
        * bias.headroom().powf(0.25)
}

/// Transition frequency ω_eg ≃ ω_p (1 − 5/(36x)).
///
/// Fails for `x ≤ 5/36`, where the correction drives the frequency to zero or
/// below.
pub fn transition_frequency(omega_p: f64, x: f64) -> Result<f64> {
    if !(x > 5.0 / 36.0) {
        return Err(Error::Range(format!(
            "x = {x} is at or below 5/36; the transition frequency would be non-positive"
        )));
    }
    Ok(omega_p * (1.0 - 5.0 / (36.0 * x)))
}

/// Inverse of [`transition_frequency`]: the ω_p that yields the given ω_eg at `x`.
pub fn plasma_from_transition(omega_eg: f64, x: f64) -> Result<f64> {
    let ratio = transition_frequency(1.0, x)?;
    Ok(omega_eg / ratio)
}

/// WKB escape rate out of `level`, in s⁻¹:
/// Γ_j = (ω_p/2π) (432x)^{j+1/2} π^{−j/2} exp(−36x/5).
pub fn tunneling_rate(level: Level, x: f64, omega_p: f64) -> f64 {
    let j = level.index();
    omega_p / (2.0 * PI)
        * (432.0 * x).powf(j as f64 + 0.5)
        * PI.powf(-(j as f64) / 2.0)
        * (-36.0 * x / 5.0).exp()
}

/// Γ_e/Γ_g implied by the WKB formula, `432x/√π`.
pub fn rate_ratio(x: f64) -> f64 {
    432.0 * x / PI.sqrt()
}

/// Anchored escape rates `(Γ_g, Γ_e)` in s⁻¹.
///
/// Keeps the WKB x-dependence but fixes the overall scale so that
/// Γ_e(2) = 7.3e7 s⁻¹ exactly. Only defined for `x ∈ [1, 4]`.
pub fn rates_anchored(x: f64) -> Result<(f64, f64)> {
    let (lo, hi) = ANCHORED_RANGE;
    if !(lo..=hi).contains(&x) {
        return Err(Error::Range(format!(
            "anchored rates are only defined for x in [{lo}, {hi}], got {x}"
        )));
    }
    let excited = ANCHOR_EXCITED_RATE
        * (x / ANCHOR_BIAS_X).powf(1.5)
        * (-36.0 * (x - ANCHOR_BIAS_X) / 5.0).exp();
    Ok((excited / rate_ratio(x), excited))
}

/// Rates from the raw WKB formula, `(Γ_g, Γ_e)` in s⁻¹.
pub fn rates_raw(x: f64, omega_p: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !(omega_p > 0.0) {
        return Err(Error::Range(format!(
            "raw rates need x > 0 and ω_p > 0, got x = {x}, ω_p = {omega_p}"
        )));
    }
    Ok((
        tunneling_rate(Level::Ground, x, omega_p),
        tunneling_rate(Level::Excited, x, omega_p),
    ))
}

/// Quantities derived from a junction bias point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JunctionDerived {
    /// ΔU in joules.
    pub barrier_height: f64,
    /// ω_p in rad/s.
    pub plasma_frequency: f64,
    /// ω_eg in rad/s.
    pub transition_frequency: f64,
    /// x = ΔU/ħω_p.
    pub bias_x: f64,
    /// Γ_g in s⁻¹.
    pub ground_rate: f64,
    /// Γ_e in s⁻¹.
    pub excited_rate: f64,
    pub mode: RateMode,
}

impl JunctionDerived {
    pub fn from_bias(bias: &JunctionBias, mode: RateMode) -> Result<Self> {
        let barrier = barrier_height(bias);
        let omega_p = plasma_frequency(bias);
        let x = barrier / (HBAR * omega_p);
        Self::from_x(x, omega_p, mode).map(|d| JunctionDerived {
            barrier_height: barrier,
            ..d
        })
    }

    /// Derived quantities for a dimensionless bias `x` and plasma frequency
    /// `omega_p` (rad/s). ΔU is reconstructed as `x ħ ω_p`.
    pub fn from_x(x: f64, omega_p: f64, mode: RateMode) -> Result<Self> {
        let omega_eg = transition_frequency(omega_p, x)?;
        let (ground, excited) = match mode {
            RateMode::Raw => rates_raw(x, omega_p)?,
            RateMode::Anchored => rates_anchored(x)?,
        };
        Ok(JunctionDerived {
            barrier_height: x * HBAR * omega_p,
            plasma_frequency: omega_p,
            transition_frequency: omega_eg,
            bias_x: x,
            ground_rate: ground,
            excited_rate: excited,
            mode,
        })
    }
}
