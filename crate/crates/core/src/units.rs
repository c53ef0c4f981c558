//! Physical constants, unit conversion and validated simulation parameters.
//!
//! Internally time is measured in nanoseconds, angular frequencies in rad/ns
//! and rates in ns⁻¹. All external I/O uses the laboratory units of the config
//! document (GHz, MHz, s⁻¹, ns).

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wkb::{self, JunctionBias, JunctionDerived, RateMode};

/// Magnetic flux quantum Φ₀ = h/2e, in Wb.
pub const FLUX_QUANTUM: f64 = 2.067833848e-15;
/// Reduced Planck constant, in J·s.
pub const HBAR: f64 = 1.054571817e-34;

/// The fixed constants, bundled for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    pub flux_quantum: f64,
    pub hbar: f64,
}

impl PhysicalConstants {
    pub const SI: PhysicalConstants = PhysicalConstants {
        flux_quantum: FLUX_QUANTUM,
        hbar: HBAR,
    };
}

const NS_PER_S: f64 = 1e9;

/// Converts a rate in s⁻¹ to ns⁻¹.
pub fn seconds_rate_to_internal(rate_per_s: f64) -> f64 {
    rate_per_s / NS_PER_S
}

/// Converts a rate in ns⁻¹ back to s⁻¹.
pub fn internal_rate_to_seconds(rate_per_ns: f64) -> f64 {
    rate_per_ns * NS_PER_S
}

/// Cyclic frequency in GHz to angular frequency in rad/ns.
pub fn ghz_to_angular(f_ghz: f64) -> f64 {
    2.0 * PI * f_ghz
}

/// Cyclic frequency in MHz to angular frequency in rad/ns.
pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    2.0 * PI * f_mhz / 1e3
}

/// Angular frequency in rad/ns to cyclic frequency in GHz.
pub fn angular_to_ghz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

/// Angular frequency in rad/s to rad/ns.
pub fn angular_si_to_internal(omega_rad_per_s: f64) -> f64 {
    omega_rad_per_s / NS_PER_S
}

/// Frame in which the Hamiltonian and tunneling term are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    /// Frame rotating at the cavity frequency; tunneling cross terms dropped.
    #[default]
    RotatingSecular,
    /// Laboratory frame with the full tunneling operator.
    LabFull,
}

impl Frame {
    pub fn as_str(self) -> &'static str {
        match self {
            Frame::RotatingSecular => "rotating-secular",
            Frame::LabFull => "lab-full",
        }
    }
}

impl std::str::FromStr for Frame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rotating-secular" => Ok(Frame::RotatingSecular),
            "lab-full" => Ok(Frame::LabFull),
            other => Err(Error::Config(format!(
                "unknown frame `{other}` (expected `rotating-secular` or `lab-full`)"
            ))),
        }
    }
}

/// Uniform output grid starting at t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    /// Final time in ns.
    pub t_end: f64,
    /// Output stride in ns.
    pub stride: f64,
}

impl TimeGrid {
    pub const DEFAULT_T_END: f64 = 200.0;
    pub const DEFAULT_STRIDE: f64 = 0.05;

    pub fn new(t_end: f64, stride: f64) -> Result<Self> {
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(Error::Range(format!(
                "t_end_ns must be positive, got {t_end}"
            )));
        }
        if !(stride > 0.0) || stride > t_end {
            return Err(Error::Range(format!(
                "stride_ns must lie in (0, t_end_ns], got {stride}"
            )));
        }
        Ok(TimeGrid { t_end, stride })
    }

    /// Number of intervals; the grid has `steps() + 1` points.
    pub fn steps(&self) -> usize {
        (self.t_end / self.stride * (1.0 + 1e-12)).floor() as usize
    }

    /// Grid times `k · stride`, computed by multiplication so no error accumulates.
    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps()).map(|k| k as f64 * self.stride).collect()
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid {
            t_end: Self::DEFAULT_T_END,
            stride: Self::DEFAULT_STRIDE,
        }
    }
}

/// Local error tolerances of the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel: 1e-9,
            abs: 1e-12,
        }
    }
}

/// Where the plasma frequency used by raw-mode rates came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlasmaSource {
    /// Supplied directly as `omega_p_ghz`.
    Given,
    /// Inferred from ω_eg by inverting ω_eg = ω_p (1 − 5/36x).
    FromTransition,
    /// Computed from a physical bias point.
    FromBias,
}

/// How the escape rates of a parameter set were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RateOrigin {
    Explicit,
    BiasX {
        x: f64,
        mode: RateMode,
        /// ω_p in rad/s.
        omega_p: f64,
        omega_p_source: PlasmaSource,
    },
    Physical {
        bias: JunctionBias,
        x: f64,
        mode: RateMode,
    },
}

impl RateOrigin {
    pub fn mode(&self) -> Option<RateMode> {
        match self {
            RateOrigin::Explicit => None,
            RateOrigin::BiasX { mode, .. } | RateOrigin::Physical { mode, .. } => Some(*mode),
        }
    }

    pub fn bias_x(&self) -> Option<f64> {
        match self {
            RateOrigin::Explicit => None,
            RateOrigin::BiasX { x, .. } | RateOrigin::Physical { x, .. } => Some(*x),
        }
    }
}

/// Config document as read from disk, in external units.
///
/// Every key is optional at parse time; [`validate`] decides what is required.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_eg_ghz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_ghz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_over_omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_rabi_mhz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1_ns: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_g_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_e_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_mode: Option<RateMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_p_ghz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_over_i0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i0_ua: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_pf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_init: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end_ns: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride_ns: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame: Option<Frame>,
}

impl RawConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Drops every tunneling key, so a different tunneling spec can be set.
    pub fn clear_tunneling(&mut self) {
        self.gamma_g_per_s = None;
        self.gamma_e_per_s = None;
        self.bias_x = None;
        self.rate_mode = None;
        self.omega_p_ghz = None;
        self.i_over_i0 = None;
        self.i0_ua = None;
        self.c_pf = None;
    }
}

/// Validated parameters of one simulation, in internal units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimParams {
    /// Δ = ω_r − ω_eg, rad/ns.
    pub detuning: f64,
    /// Vacuum Rabi frequency Ω, rad/ns.
    pub omega_rabi: f64,
    /// Junction transition frequency ω_eg, rad/ns. Only the lab frame uses it.
    pub omega_eg: f64,
    /// Cavity decay κ, ns⁻¹.
    pub kappa: f64,
    /// Junction decay γ = 1/T₁, ns⁻¹.
    pub gamma: f64,
    /// Γ_g, ns⁻¹.
    pub gamma_g: f64,
    /// Γ_e, ns⁻¹.
    pub gamma_e: f64,
    pub rate_origin: RateOrigin,
    pub n_init: usize,
    pub n_max: usize,
    pub frame: Frame,
    pub grid: TimeGrid,
    pub tol: Tolerances,
}

fn require(value: Option<f64>, key: &str) -> Result<f64> {
    value.ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
}

fn non_negative(value: f64, key: &str) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Range(format!(
            "`{key}` must be finite and ≥ 0, got {value}"
        )))
    }
}

const TUNNELING_KEYS: &str = "`gamma_g_per_s`+`gamma_e_per_s` | `bias_x`+`rate_mode` | \
                              `i_over_i0`+`i0_ua`+`c_pf`";

fn tunneling(
    raw: &RawConfig,
    omega_eg: Option<f64>,
) -> Result<(f64, f64, RateOrigin, Option<f64>)> {
    let explicit = [
        ("gamma_g_per_s", raw.gamma_g_per_s.is_some()),
        ("gamma_e_per_s", raw.gamma_e_per_s.is_some()),
    ];
    let dimensionless = [("bias_x", raw.bias_x.is_some())];
    let physical = [
        ("i_over_i0", raw.i_over_i0.is_some()),
        ("i0_ua", raw.i0_ua.is_some()),
        ("c_pf", raw.c_pf.is_some()),
    ];
    let present = |keys: &[(&str, bool)]| keys.iter().any(|(_, p)| *p);
    let named = |keys: &[(&'static str, bool)]| -> Vec<&'static str> {
        keys.iter().filter(|(_, p)| *p).map(|(k, _)| *k).collect()
    };

    let groups: Vec<Vec<&str>> = [&explicit[..], &dimensionless[..], &physical[..]]
        .into_iter()
        .filter(|g| present(g))
        .map(named)
        .collect();
    match groups.len() {
        0 => {
            return Err(Error::Config(format!(
                "missing tunneling spec; provide exactly one of {TUNNELING_KEYS}"
            )))
        }
        1 => {}
        _ => {
            let keys: Vec<String> = groups.concat().iter().map(|k| format!("`{k}`")).collect();
            return Err(Error::Config(format!(
                "conflicting tunneling specs: {} (provide exactly one of {TUNNELING_KEYS})",
                keys.join(", ")
            )));
        }
    }

    if present(&explicit) {
        if raw.rate_mode.is_some() || raw.omega_p_ghz.is_some() {
            return Err(Error::Config(
                "`rate_mode`/`omega_p_ghz` conflict with explicit `gamma_g_per_s`+`gamma_e_per_s`"
                    .into(),
            ));
        }
        let g = non_negative(
            require(raw.gamma_g_per_s, "gamma_g_per_s")?,
            "gamma_g_per_s",
        )?;
        let e = non_negative(
            require(raw.gamma_e_per_s, "gamma_e_per_s")?,
            "gamma_e_per_s",
        )?;
        return Ok((
            seconds_rate_to_internal(g),
            seconds_rate_to_internal(e),
            RateOrigin::Explicit,
            None,
        ));
    }

    if present(&dimensionless) {
        let x = require(raw.bias_x, "bias_x")?;
        if !(x > 0.0) {
            return Err(Error::Range(format!("`bias_x` must be positive, got {x}")));
        }
        let mode = raw.rate_mode.unwrap_or(RateMode::Anchored);
        let (omega_p, source) =
            match (raw.omega_p_ghz, omega_eg) {
                (Some(f), _) => (2.0 * PI * f * 1e9, PlasmaSource::Given),
                (None, Some(w)) => (
                    wkb::plasma_from_transition(w * 1e9, x)?,
                    PlasmaSource::FromTransition,
                ),
                (None, None) => return Err(Error::Config(
                    "`bias_x` needs `omega_eg_ghz` or `omega_p_ghz` to fix the plasma frequency"
                        .into(),
                )),
            };
        let d = JunctionDerived::from_x(x, omega_p, mode)?;
        return Ok((
            seconds_rate_to_internal(d.ground_rate),
            seconds_rate_to_internal(d.excited_rate),
            RateOrigin::BiasX {
                x,
                mode,
                omega_p,
                omega_p_source: source,
            },
            Some(angular_si_to_internal(d.transition_frequency)),
        ));
    }

    if raw.omega_p_ghz.is_some() {
        return Err(Error::Config(
            "`omega_p_ghz` conflicts with a physical bias spec".into(),
        ));
    }
    let bias = JunctionBias::new(
        require(raw.i_over_i0, "i_over_i0")?,
        require(raw.i0_ua, "i0_ua")? * 1e-6,
        require(raw.c_pf, "c_pf")? * 1e-12,
    )?;
    let mode = raw.rate_mode.unwrap_or(RateMode::Raw);
    let d = JunctionDerived::from_bias(&bias, mode)?;
    Ok((
        seconds_rate_to_internal(d.ground_rate),
        seconds_rate_to_internal(d.excited_rate),
        RateOrigin::Physical {
            bias,
            x: d.bias_x,
            mode,
        },
        Some(angular_si_to_internal(d.transition_frequency)),
    ))
}

/// Checks a raw config and converts it to internal units, filling defaults.
pub fn validate(raw: &RawConfig) -> Result<SimParams> {
    let omega_rabi = mhz_to_angular(require(raw.omega_rabi_mhz, "omega_rabi_mhz")?);
    if !(omega_rabi > 0.0) || !omega_rabi.is_finite() {
        return Err(Error::Range(format!(
            "`omega_rabi_mhz` must be positive, got {:?}",
            raw.omega_rabi_mhz
        )));
    }
    let kappa = seconds_rate_to_internal(non_negative(
        require(raw.kappa_per_s, "kappa_per_s")?,
        "kappa_per_s",
    )?);

    let gamma = match (raw.gamma_per_s, raw.t1_ns) {
        (None, None) => {
            return Err(Error::Config(
                "missing junction decay: provide `gamma_per_s` or `t1_ns`".into(),
            ))
        }
        (Some(g), None) => seconds_rate_to_internal(non_negative(g, "gamma_per_s")?),
        (None, Some(t1)) => {
            if !(t1 > 0.0) {
                return Err(Error::Range(format!("`t1_ns` must be positive, got {t1}")));
            }
            1.0 / t1
        }
        (Some(g), Some(t1)) => {
            let from_rate = seconds_rate_to_internal(non_negative(g, "gamma_per_s")?);
            if !(t1 > 0.0) {
                return Err(Error::Range(format!("`t1_ns` must be positive, got {t1}")));
            }
            let from_t1 = 1.0 / t1;
            if (from_rate - from_t1).abs() > 1e-9 * from_rate.abs().max(from_t1.abs()) {
                return Err(Error::Config(format!(
                    "`gamma_per_s` = {g} and `t1_ns` = {t1} are inconsistent"
                )));
            }
            from_rate
        }
    };

    let given_eg = match raw.omega_eg_ghz {
        Some(f) if !(f > 0.0) => {
            return Err(Error::Range(format!(
                "`omega_eg_ghz` must be positive, got {f}"
            )))
        }
        other => other.map(ghz_to_angular),
    };
    let (gamma_g, gamma_e, rate_origin, derived_eg) = tunneling(raw, given_eg)?;
    let omega_eg = given_eg
        .or(derived_eg)
        .ok_or_else(|| Error::Config("missing required key `omega_eg_ghz`".into()))?;

    let detuning = match (raw.delta_ghz, raw.delta_over_omega) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "conflicting keys `delta_ghz` and `delta_over_omega`; provide one".into(),
            ))
        }
        (Some(d), None) => ghz_to_angular(d),
        (None, Some(r)) => r * omega_rabi,
        (None, None) => 0.0,
    };
    if !detuning.is_finite() {
        return Err(Error::Range("detuning must be finite".into()));
    }

    let n_init = raw
        .n_init
        .ok_or_else(|| Error::Config("missing required key `n_init`".into()))?;
    let n_max = raw.n_max.unwrap_or(n_init);
    if n_init > n_max {
        return Err(Error::Range(format!(
            "`n_init` = {n_init} exceeds `n_max` = {n_max}"
        )));
    }

    let grid = TimeGrid::new(
        raw.t_end_ns.unwrap_or(TimeGrid::DEFAULT_T_END),
        raw.stride_ns.unwrap_or(TimeGrid::DEFAULT_STRIDE),
    )?;
    let tol = Tolerances {
        rel: raw.rel_tol.unwrap_or(Tolerances::default().rel),
        abs: raw.abs_tol.unwrap_or(Tolerances::default().abs),
    };
    if !(tol.rel > 0.0) || !(tol.abs > 0.0) {
        return Err(Error::Range(
            "`rel_tol` and `abs_tol` must be positive".into(),
        ));
    }

    Ok(SimParams {
        detuning,
        omega_rabi,
        omega_eg,
        kappa,
        gamma,
        gamma_g,
        gamma_e,
        rate_origin,
        n_init,
        n_max,
        frame: raw.frame.unwrap_or_default(),
        grid,
        tol,
    })
}

impl SimParams {
    /// Junction relaxation time T₁ = 1/γ in ns.
    pub fn t1(&self) -> f64 {
        1.0 / self.gamma
    }

    /// Cavity frequency ω_r = ω_eg + Δ, rad/ns.
    pub fn omega_cavity(&self) -> f64 {
        self.omega_eg + self.detuning
    }

    pub fn with_t1(&self, t1_ns: f64) -> Result<SimParams> {
        if !(t1_ns > 0.0) {
            return Err(Error::Range(format!("T1 must be positive, got {t1_ns} ns")));
        }
        Ok(SimParams {
            gamma: 1.0 / t1_ns,
            ..self.clone()
        })
    }

    pub fn with_detuning_over_omega(&self, ratio: f64) -> Result<SimParams> {
        if !ratio.is_finite() {
            return Err(Error::Range(format!("Δ/Ω must be finite, got {ratio}")));
        }
        Ok(SimParams {
            detuning: ratio * self.omega_rabi,
            ..self.clone()
        })
    }

    /// Sets the initial photon number; a truncation equal to the old photon
    /// number follows the new one, a larger one is kept.
    pub fn with_n_init(&self, n: usize) -> SimParams {
        let n_max = if self.n_max == self.n_init {
            n
        } else {
            self.n_max.max(n)
        };
        SimParams {
            n_init: n,
            n_max,
            ..self.clone()
        }
    }

    /// Recomputes the escape rates for a new bias `x`.
    ///
    /// Bias-derived parameter sets keep their rate mode and plasma-frequency
    /// convention; explicit-rate sets switch to anchored rates. The junction
    /// frequency ω_eg is left unchanged.
    pub fn with_bias_x(&self, x: f64) -> Result<SimParams> {
        let (mode, omega_p, source) = match self.rate_origin {
            RateOrigin::BiasX {
                mode,
                omega_p_source: PlasmaSource::Given,
                omega_p,
                ..
            } => (mode, omega_p, PlasmaSource::Given),
            RateOrigin::BiasX { mode, .. } | RateOrigin::Physical { mode, .. } => (
                mode,
                wkb::plasma_from_transition(self.omega_eg * 1e9, x)?,
                PlasmaSource::FromTransition,
            ),
            RateOrigin::Explicit => (
                RateMode::Anchored,
                wkb::plasma_from_transition(self.omega_eg * 1e9, x)?,
                PlasmaSource::FromTransition,
            ),
        };
        let d = JunctionDerived::from_x(x, omega_p, mode)?;
        Ok(SimParams {
            gamma_g: seconds_rate_to_internal(d.ground_rate),
            gamma_e: seconds_rate_to_internal(d.excited_rate),
            rate_origin: RateOrigin::BiasX {
                x,
                mode,
                omega_p,
                omega_p_source: source,
            },
            ..self.clone()
        })
    }

    /// External representation that validates back to `self`.
    pub fn to_raw(&self) -> RawConfig {
        let mut raw = RawConfig {
            omega_eg_ghz: Some(angular_to_ghz(self.omega_eg)),
            delta_ghz: Some(angular_to_ghz(self.detuning)),
            omega_rabi_mhz: Some(angular_to_ghz(self.omega_rabi) * 1e3),
            kappa_per_s: Some(internal_rate_to_seconds(self.kappa)),
            gamma_per_s: Some(internal_rate_to_seconds(self.gamma)),
            n_init: Some(self.n_init),
            n_max: Some(self.n_max),
            t_end_ns: Some(self.grid.t_end),
            stride_ns: Some(self.grid.stride),
            rel_tol: Some(self.tol.rel),
            abs_tol: Some(self.tol.abs),
            frame: Some(self.frame),
            ..RawConfig::default()
        };
        match self.rate_origin {
            RateOrigin::Explicit => {
                raw.gamma_g_per_s = Some(internal_rate_to_seconds(self.gamma_g));
                raw.gamma_e_per_s = Some(internal_rate_to_seconds(self.gamma_e));
            }
            RateOrigin::BiasX {
                x,
                mode,
                omega_p,
                omega_p_source,
            } => {
                raw.bias_x = Some(x);
                raw.rate_mode = Some(mode);
                if omega_p_source == PlasmaSource::Given {
                    raw.omega_p_ghz = Some(omega_p / (2.0 * PI * 1e9));
                }
            }
            RateOrigin::Physical { bias, mode, .. } => {
                raw.i_over_i0 = Some(bias.current_ratio);
                raw.i0_ua = Some(bias.critical_current * 1e6);
                raw.c_pf = Some(bias.capacitance * 1e12);
                raw.rate_mode = Some(mode);
            }
        }
        raw
    }
}
