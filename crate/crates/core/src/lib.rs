//! Simulator for a current-biased Josephson junction used as a microwave
//! photon detector.
//!
//! A two-level junction (|g⟩, |e⟩) exchanges excitations with a single cavity
//! mode (Jaynes–Cummings coupling), relaxes at rate γ, loses cavity photons at
//! rate κ, and escapes to the voltage state from |g⟩ and |e⟩ at rates Γ_g and
//! Γ_e. The density matrix is evolved under the resulting master equation and
//! the leaked probability is read out as the switching probability.
//!
//! ```
//! use jjphotond::{metrics, presets};
//!
//! let mut p = presets::baseline();
//! p.grid = jjphotond::TimeGrid::new(60.0, 0.1)?;
//! let curve = metrics::efficiency_curve(&p, 1)?;
//! let best = metrics::optimal_detection(&curve)?;
//! assert!(best.eta_max > 0.3 && best.eta_max < metrics::plateau_estimate(&p)?);
//! # Ok::<(), jjphotond::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod expm;
pub mod integrator;
pub mod liouvillian;
pub mod metrics;
pub mod output;
pub mod presets;
pub mod propagation;
pub mod sweep;
pub mod units;
pub mod wkb;

pub use error::{Error, Result};
pub use liouvillian::{DensityMatrix, HilbertSpace, Liouvillian};
pub use units::{validate, Frame, RawConfig, SimParams, TimeGrid, Tolerances};
pub use wkb::{JunctionBias, JunctionDerived, Level, RateMode};

// Compile the guide's code listings as doctests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/parameters.md")]
    pub mod parameters {}
    #[doc = include_str!("../../../book/src/junction.md")]
    pub mod junction {}
    #[doc = include_str!("../../../book/src/master-equation.md")]
    pub mod master_equation {}
    #[doc = include_str!("../../../book/src/propagation.md")]
    pub mod propagation {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    pub mod metrics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
