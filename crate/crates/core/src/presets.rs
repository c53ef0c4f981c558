//! Built-in parameter presets.

use crate::units::{validate, RawConfig, SimParams};
use crate::wkb::RateMode;

/// The reference detector: ω_eg/2π = 4.8 GHz, γ = 1e8 s⁻¹ (T₁ = 10 ns),
/// κ = 1e6 s⁻¹, Ω/2π = 200 MHz, zero detuning, anchored rates at x = 2 and
/// one photon in the cavity.
pub fn baseline_raw() -> RawConfig {
    RawConfig {
        omega_eg_ghz: Some(4.8),
        delta_over_omega: Some(0.0),
        omega_rabi_mhz: Some(200.0),
        kappa_per_s: Some(1e6),
        gamma_per_s: Some(1e8),
        bias_x: Some(2.0),
        rate_mode: Some(RateMode::Anchored),
        n_init: Some(1),
        ..RawConfig::default()
    }
}

pub fn baseline() -> SimParams {
    validate(&baseline_raw()).expect("baseline preset is valid")
}
