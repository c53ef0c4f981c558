//! Parameter sweeps over independent efficiency runs.
//!
//! Points are evaluated concurrently on a dedicated thread pool and collected
//! in input order, so the result does not depend on the worker count.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{efficiency_curve, optimal_detection, EfficiencyCurve, OptimalPoint};
use crate::units::SimParams;

/// Parameters a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepParam {
    /// Junction relaxation time T₁ in ns.
    T1,
    /// Dimensionless bias x = ΔU/ħω_p.
    BiasX,
    /// Detuning in units of Ω.
    DeltaOverOmega,
    /// Initial photon number.
    NInit,
}

impl SweepParam {
    pub const ALL: [SweepParam; 4] = [
        SweepParam::T1,
        SweepParam::BiasX,
        SweepParam::DeltaOverOmega,
        SweepParam::NInit,
    ];

    /// Column name used in CSV output.
    pub fn column(self) -> &'static str {
        match self {
            SweepParam::T1 => "t1_ns",
            SweepParam::BiasX => "bias_x",
            SweepParam::DeltaOverOmega => "delta_over_omega",
            SweepParam::NInit => "n_init",
        }
    }

    /// Applies one axis value to a parameter template.
    pub fn apply(self, template: &SimParams, value: f64) -> Result<SimParams> {
        match self {
            SweepParam::T1 => template.with_t1(value),
            SweepParam::BiasX => template.with_bias_x(value),
            SweepParam::DeltaOverOmega => template.with_detuning_over_omega(value),
            SweepParam::NInit => {
                if value < 0.0 || value.fract() != 0.0 || !value.is_finite() {
                    return Err(Error::Range(format!(
                        "photon number must be a non-negative integer, got {value}"
                    )));
                }
                Ok(template.with_n_init(value as usize))
            }
        }
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t1_ns" | "t1" => Ok(SweepParam::T1),
            "bias_x" | "x" => Ok(SweepParam::BiasX),
            "delta_over_omega" | "delta" => Ok(SweepParam::DeltaOverOmega),
            "n_init" | "n" => Ok(SweepParam::NInit),
            other => Err(Error::Config(format!(
                "unknown sweep parameter `{other}` (expected one of t1_ns, bias_x, delta_over_omega, n_init)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl SweepAxis {
    pub fn new(param: SweepParam, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("sweep axis has no values".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("sweep value {v} is not finite")));
        }
        Ok(SweepAxis { param, values })
    }
}

/// One evaluated sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: std::result::Result<OptimalPoint, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }
}

/// Maps `f` over `items` on a pool of `workers` threads, preserving order.
pub fn parallel_map<T, R, F>(workers: usize, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}

/// Efficiency curve and optimum for every axis value.
pub fn sweep(template: &SimParams, axis: &SweepAxis, workers: usize) -> Result<SweepResult> {
    let outcomes = parallel_map(workers, &axis.values, |&v| {
        let p = axis.param.apply(template, v)?;
        let curve = efficiency_curve(&p, p.n_init)?;
        optimal_detection(&curve)
    })?;
    let rows = axis
        .values
        .iter()
        .zip(outcomes)
        .map(|(&value, outcome)| SweepRow {
            value,
            outcome: outcome.map_err(|e| e.to_string()),
        })
        .collect();
    Ok(SweepResult {
        axis: axis.clone(),
        rows,
    })
}

/// Full curves for every axis value, in input order.
pub fn sweep_curves(
    template: &SimParams,
    axis: &SweepAxis,
    workers: usize,
) -> Result<Vec<EfficiencyCurve>> {
    parallel_map(workers, &axis.values, |&v| {
        let p = axis.param.apply(template, v)?;
        efficiency_curve(&p, p.n_init)
    })?
    .into_iter()
    .collect()
}
