//! Detector observables derived from trajectories.
//!
//! The switching probability is the probability that has leaked out of the
//! two-level manifold, `P(t) = 1 − Tr ρ(t)`. The quantum efficiency with `n`
//! photons is the switching probability in excess of dark counts,
//! `η_n(t) = P_n(t) − P_0(t)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liouvillian::{DensityMatrix, HilbertSpace, Liouvillian};
use crate::propagation::{evolve, evolve_to, Trajectory, TrajectoryStats};
use crate::units::SimParams;
use crate::wkb::Level;

/// `P(t_k) = 1 − Tr ρ(t_k)` for every snapshot.
pub fn switching_probability(traj: &Trajectory) -> Vec<f64> {
    traj.states.iter().map(|r| 1.0 - r.trace()).collect()
}

/// Clamps a probability into [0, 1] when it lies within 1e-9 outside; larger
/// excursions are passed through unchanged so they stay visible.
pub fn report_probability(p: f64) -> f64 {
    const SLACK: f64 = 1e-9;
    if (-SLACK..0.0).contains(&p) {
        0.0
    } else if p > 1.0 && p <= 1.0 + SLACK {
        1.0
    } else {
        p
    }
}

/// Switching probabilities with `n` photons and with none, on a shared grid.
#[derive(Debug, Clone)]
pub struct EfficiencyCurve {
    pub times: Vec<f64>,
    pub p_n: Vec<f64>,
    pub p_0: Vec<f64>,
    pub eta: Vec<f64>,
    pub n_init: usize,
    pub params: SimParams,
    /// Diagnostics of the `|n,g⟩` and `|0,g⟩` runs.
    pub stats: [TrajectoryStats; 2],
}

/// Space used for an `n`-photon run: the configured truncation, enlarged if needed.
pub fn space_for(p: &SimParams, n: usize) -> HilbertSpace {
    HilbertSpace::new(p.n_max.max(n))
}

/// Runs `|n,g⟩` and `|0,g⟩` with identical parameters and grid.
pub fn efficiency_curve(p: &SimParams, n: usize) -> Result<EfficiencyCurve> {
    let space = space_for(p, n);
    let l = Liouvillian::new(p, space);
    let signal = evolve(
        &l,
        &DensityMatrix::pure(&space, Level::Ground, n),
        &p.grid,
        &p.tol,
    )?;
    let dark = if n == 0 {
        signal.clone()
    } else {
        evolve(
            &l,
            &DensityMatrix::pure(&space, Level::Ground, 0),
            &p.grid,
            &p.tol,
        )?
    };
    let p_n = switching_probability(&signal);
    let p_0 = switching_probability(&dark);
    let eta = p_n.iter().zip(&p_0).map(|(a, b)| a - b).collect();
    Ok(EfficiencyCurve {
        times: signal.times.clone(),
        p_n,
        p_0,
        eta,
        n_init: n,
        params: p.clone(),
        stats: [signal.stats, dark.stats],
    })
}

/// `η_n` at a single time `t`.
pub fn efficiency_at(p: &SimParams, n: usize, t: f64) -> Result<f64> {
    let space = space_for(p, n);
    let l = Liouvillian::new(p, space);
    let signal = evolve_to(
        &l,
        &DensityMatrix::pure(&space, Level::Ground, n),
        t,
        &p.tol,
    )?;
    let dark = evolve_to(
        &l,
        &DensityMatrix::pure(&space, Level::Ground, 0),
        t,
        &p.tol,
    )?;
    Ok(dark.trace() - signal.trace())
}

/// Location and value of the efficiency maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalPoint {
    /// t_d in ns.
    pub t_d: f64,
    pub eta_max: f64,
    /// Grid index of the unrefined maximum.
    pub index: usize,
    /// Set when the curve is identically zero; the point is then (0, 0).
    pub degenerate: bool,
}

/// Grid argmax (earliest on ties) refined by the vertex of the parabola
/// through the argmax and its two neighbours. The refinement never moves
/// more than one stride.
pub fn optimal_point(times: &[f64], values: &[f64]) -> Result<OptimalPoint> {
    if times.is_empty() || times.len() != values.len() {
        return Err(Error::Range(
            "optimal detection needs a nonempty curve with matching times".into(),
        ));
    }
    if values.iter().all(|v| *v == 0.0) {
        return Ok(OptimalPoint {
            t_d: 0.0,
            eta_max: 0.0,
            index: 0,
            degenerate: true,
        });
    }
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    let mut point = OptimalPoint {
        t_d: times[best],
        eta_max: values[best],
        index: best,
        degenerate: false,
    };
    if best > 0 && best + 1 < values.len() {
        let (left, mid, right) = (values[best - 1], values[best], values[best + 1]);
        let curvature = left - 2.0 * mid + right;
        let h_left = times[best] - times[best - 1];
        let h_right = times[best + 1] - times[best];
        if curvature < 0.0 && (h_left - h_right).abs() <= 1e-9 * h_left {
            let offset = (0.5 * (left - right) / curvature).clamp(-1.0, 1.0);
            point.t_d = times[best] + offset * h_left;
            point.eta_max = mid - 0.25 * (left - right) * offset;
        }
    }
    Ok(point)
}

pub fn optimal_detection(curve: &EfficiencyCurve) -> Result<OptimalPoint> {
    optimal_point(&curve.times, &curve.eta)
}

/// Plateau height of the single-photon switching probability, `Γ_e/(Γ_e + γ)`.
pub fn plateau_estimate(p: &SimParams) -> Result<f64> {
    let total = p.gamma_e + p.gamma;
    if !(total > 0.0) {
        return Err(Error::Range(
            "plateau estimate undefined for Γ_e = γ = 0".into(),
        ));
    }
    Ok(p.gamma_e / total)
}

/// Detuning scan used to locate the half-efficiency points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandwidthScan {
    /// Half-window in units of Ω.
    pub window: f64,
    /// Scan step in units of Ω.
    pub step: f64,
    /// Bisection stops once |η − η(0)/2| is below this.
    pub eta_tolerance: f64,
}

impl Default for BandwidthScan {
    fn default() -> Self {
        BandwidthScan {
            window: 4.0,
            step: 0.1,
            eta_tolerance: 1e-4,
        }
    }
}

/// Half-efficiency detunings at a fixed detection time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandwidthResult {
    /// Detection time used for every detuning, ns.
    pub t_d: f64,
    pub eta_zero: f64,
    /// Δ₋ in rad/ns.
    pub delta_minus: f64,
    /// Δ₊ in rad/ns.
    pub delta_plus: f64,
    /// η at Δ₋ and Δ₊.
    pub eta_at_crossings: (f64, f64),
    /// Full width (Δ₊ − Δ₋)/Ω.
    pub width_over_omega: f64,
    /// The scanned curve, (Δ/Ω, η).
    pub scan: Vec<(f64, f64)>,
}

/// Full width at half maximum of a detuning response `eta(Δ/Ω)`, in units of Ω.
///
/// Returns `(Δ₋/Ω, Δ₊/Ω, η(Δ₋), η(Δ₊), η(0), scan)`.
#[allow(clippy::type_complexity)]
pub fn half_width_crossings<F>(
    eta: F,
    scan: &BandwidthScan,
) -> Result<(f64, f64, f64, f64, f64, Vec<(f64, f64)>)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let half_steps = (scan.window / scan.step).round() as i64;
    let grid: Vec<f64> = (-half_steps..=half_steps)
        .map(|k| k as f64 * scan.step)
        .collect();
    let values = grid
        .par_iter()
        .map(|&d| eta(d))
        .collect::<Result<Vec<f64>>>()?;
    let curve: Vec<(f64, f64)> = grid.iter().copied().zip(values.iter().copied()).collect();
    let center = half_steps as usize;
    let eta_zero = values[center];
    let half = eta_zero / 2.0;
    let no_crossing = || Error::BandwidthRange {
        window: scan.window,
        scan: curve.clone(),
    };
    if !(eta_zero > 0.0) {
        return Err(no_crossing());
    }

    let find = |direction: i64| -> Result<(f64, f64)> {
        let mut k = center as i64;
        loop {
            let next = k + direction;
            if next < 0 || next as usize >= values.len() {
                return Err(no_crossing());
            }
            if values[next as usize] < half {
                break;
            }
            k = next;
        }
        // Bracket: inside (η ≥ half) at k, outside at k + direction.
        let mut inside = grid[k as usize];
        let mut outside = grid[(k + direction) as usize];
        let mut best = (outside, values[(k + direction) as usize]);
        for _ in 0..80 {
            let mid = 0.5 * (inside + outside);
            let v = eta(mid)?;
            best = (mid, v);
            if v >= half {
                inside = mid;
            } else {
                outside = mid;
            }
            if (v - half).abs() < scan.eta_tolerance && (outside - inside).abs() < 1e-6 {
                break;
            }
        }
        Ok(best)
    };
    let (minus, eta_minus) = find(-1)?;
    let (plus, eta_plus) = find(1)?;
    Ok((minus, plus, eta_minus, eta_plus, eta_zero, curve))
}

/// Bandwidth of the detector: η at fixed `t_d` as the cavity is detuned.
pub fn bandwidth(p: &SimParams, t_d: f64) -> Result<BandwidthResult> {
    bandwidth_with(p, t_d, &BandwidthScan::default())
}

pub fn bandwidth_with(p: &SimParams, t_d: f64, scan: &BandwidthScan) -> Result<BandwidthResult> {
    let n = p.n_init;
    let eta = |ratio: f64| efficiency_at(&p.with_detuning_over_omega(ratio)?, n, t_d);
    let (minus, plus, eta_minus, eta_plus, eta_zero, curve) = half_width_crossings(eta, scan)?;
    Ok(BandwidthResult {
        t_d,
        eta_zero,
        delta_minus: minus * p.omega_rabi,
        delta_plus: plus * p.omega_rabi,
        eta_at_crossings: (eta_minus, eta_plus),
        width_over_omega: plus - minus,
        scan: curve,
    })
}
