//! Time evolution of the density matrix.
//!
//! [`evolve`] is the production path: an adaptive Dormand–Prince 5(4)
//! integration that lands exactly on every output time. [`exact_state`]
//! exponentiates the dense superoperator and serves as an oracle for
//! desk-scale checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::integrator::{DormandPrince, StepControl, StepStats};
use crate::liouvillian::{unvectorize, vectorize, CMatrix, DensityMatrix, Liouvillian};
use crate::units::{Frame, TimeGrid, Tolerances};

/// Eigenvalues below this abort the integration.
pub const POSITIVITY_FLOOR: f64 = -1e-8;
/// Trace increases or Hermiticity defects beyond this abort the integration.
pub const INVARIANT_LIMIT: f64 = 1e-6;
/// Largest superoperator dimension the exact propagator accepts.
pub const EXACT_DIM_LIMIT: usize = 4096;
/// Step cap used for the lab frame, where the carrier frequencies are resolved.
pub const LAB_FRAME_MAX_STEP: f64 = 1e-3;

/// Integrator diagnostics collected along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryStats {
    pub steps: StepStats,
    /// Smallest eigenvalue seen in any snapshot.
    pub min_eigenvalue: f64,
    /// Largest increase of the trace between consecutive snapshots.
    pub max_trace_uptick: f64,
    /// Largest `|ρ − ρ†|` seen in any snapshot.
    pub max_hermiticity_error: f64,
}

impl Default for TrajectoryStats {
    fn default() -> Self {
        TrajectoryStats {
            steps: StepStats::default(),
            min_eigenvalue: f64::INFINITY,
            max_trace_uptick: 0.0,
            max_hermiticity_error: 0.0,
        }
    }
}

/// Snapshots of ρ(t) on a uniform grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub stats: TrajectoryStats,
}

impl Trajectory {
    pub fn traces(&self) -> Vec<f64> {
        self.states.iter().map(DensityMatrix::trace).collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Step control used for a generator: tolerances from `tol`, plus the lab-frame
/// step cap when applicable.
pub fn step_control(l: &Liouvillian, tol: &Tolerances) -> StepControl {
    let mut control = StepControl::new(tol.rel, tol.abs);
    if l.frame() == Frame::LabFull {
        control.max_step = Some(LAB_FRAME_MAX_STEP);
    }
    control
}

fn check_dims(l: &Liouvillian, rho0: &DensityMatrix) -> Result<()> {
    if rho0.dim() != l.dim() {
        return Err(Error::Range(format!(
            "initial state has dimension {}, generator expects {}",
            rho0.dim(),
            l.dim()
        )));
    }
    Ok(())
}

struct Monitor {
    stats: TrajectoryStats,
    last_trace: Option<f64>,
}

impl Monitor {
    fn new() -> Self {
        Monitor {
            stats: TrajectoryStats::default(),
            last_trace: None,
        }
    }

    fn inspect(&mut self, t: f64, rho: &DensityMatrix) -> Result<()> {
        let herm = rho.hermiticity_error();
        self.stats.max_hermiticity_error = self.stats.max_hermiticity_error.max(herm);
        if herm > INVARIANT_LIMIT {
            return Err(Error::Integration {
                t,
                reason: format!("Hermiticity defect {herm:e}"),
            });
        }
        let trace = rho.trace();
        if let Some(prev) = self.last_trace {
            let uptick = trace - prev;
            self.stats.max_trace_uptick = self.stats.max_trace_uptick.max(uptick);
            if uptick > INVARIANT_LIMIT {
                return Err(Error::Integration {
                    t,
                    reason: format!("trace increased by {uptick:e}"),
                });
            }
        }
        if trace > 1.0 + INVARIANT_LIMIT {
            return Err(Error::Integration {
                t,
                reason: format!("trace {trace} exceeds one"),
            });
        }
        self.last_trace = Some(trace);
        let min_ev = rho.min_eigenvalue();
        self.stats.min_eigenvalue = self.stats.min_eigenvalue.min(min_ev);
        if min_ev < POSITIVITY_FLOOR {
            return Err(Error::Integration {
                t,
                reason: format!("negative eigenvalue {min_ev:e}"),
            });
        }
        Ok(())
    }
}

/// Evolves `rho0` under `l` and records snapshots on `grid`.
pub fn evolve(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    tol: &Tolerances,
) -> Result<Trajectory> {
    evolve_at(l, rho0, &grid.times(), step_control(l, tol))
}

/// Evolves `rho0` and records snapshots at the given increasing `times`
/// (the first of which must be 0).
pub fn evolve_at(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    times: &[f64],
    control: StepControl,
) -> Result<Trajectory> {
    check_dims(l, rho0)?;
    if times.first() != Some(&0.0) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Range(
            "snapshot times must start at 0 and increase strictly".into(),
        ));
    }
    let mut monitor = Monitor::new();
    let mut dp = DormandPrince::new(
        |rho: &CMatrix, out: &mut CMatrix| l.apply_into(rho, out),
        rho0.matrix().clone(),
        control,
    );
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        dp.advance_to(t)?;
        let snapshot = DensityMatrix::from_matrix(dp.state().clone());
        monitor.inspect(t, &snapshot)?;
        states.push(snapshot);
    }
    monitor.stats.steps = dp.stats();
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        stats: monitor.stats,
    })
}

/// ρ(t) from the adaptive integrator, without intermediate snapshots.
pub fn evolve_to(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t: f64,
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let traj = evolve_at(l, rho0, &[0.0, t], step_control(l, tol))?;
    Ok(traj.states.into_iter().next_back().expect("two snapshots"))
}

/// Dense propagator `exp(L t)` acting on column-stacked states.
pub struct ExactPropagator {
    dense: CMatrix,
    dim: usize,
}

impl ExactPropagator {
    pub fn new(l: &Liouvillian) -> Result<Self> {
        let super_dim = l.dim() * l.dim();
        if super_dim > EXACT_DIM_LIMIT {
            return Err(Error::DimensionGuard {
                dim: super_dim,
                limit: EXACT_DIM_LIMIT,
            });
        }
        Ok(ExactPropagator {
            dense: l.dense(),
            dim: l.dim(),
        })
    }

    pub fn propagator(&self, t: f64) -> CMatrix {
        expm(&(&self.dense * num_complex::Complex64::new(t, 0.0)))
    }

    pub fn state(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        if rho0.dim() != self.dim {
            return Err(Error::Range(format!(
                "initial state has dimension {}, generator expects {}",
                rho0.dim(),
                self.dim
            )));
        }
        let v = self.propagator(t) * vectorize(rho0.matrix());
        Ok(DensityMatrix::from_matrix(unvectorize(&v, self.dim)))
    }
}

/// `vec ρ(t) = exp(L t) vec ρ₀`.
pub fn exact_state(l: &Liouvillian, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    ExactPropagator::new(l)?.state(rho0, t)
}
