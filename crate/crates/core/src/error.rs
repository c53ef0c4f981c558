use thiserror::Error;

/// Errors produced while configuring, integrating or post-processing a run.
#[derive(Debug, Error)]
pub enum Error {
    /// Missing, unknown or conflicting configuration keys.
    #[error("configuration error: {0}")]
    Config(String),

    /// A value outside its admissible range.
    #[error("range error: {0}")]
    Range(String),

    /// The adaptive step collapsed below the minimum step size.
    #[error(
        "step size underflow at t = {t} ns (h = {h:e} ns); the problem looks stiff, \
         use the exact propagator for this parameter set"
    )]
    Stiffness { t: f64, h: f64 },

    /// A state invariant was violated beyond tolerance during integration.
    #[error("integration failure at t = {t} ns: {reason}")]
    Integration { t: f64, reason: String },

    /// The exact propagator refuses superoperators above its size guard.
    #[error("superoperator of dimension {dim} exceeds the exact-propagator guard ({limit})")]
    DimensionGuard { dim: usize, limit: usize },

    /// No half-efficiency crossing inside the detuning scan window.
    #[error("no half-efficiency crossing within ±{window} Ω")]
    BandwidthRange {
        window: f64,
        /// The scanned curve as (Δ/Ω, η) pairs.
        scan: Vec<(f64, f64)>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
