//! Embedded Dormand–Prince 5(4) integrator for matrix-valued linear ODEs.
//!
//! The error norm is the maximum over entries of
//! `|err| / (abs + rel · max(|y|, |y_new|))`. With a max-norm, entries that
//! stay exactly zero do not influence step selection, so embedding a problem
//! in a larger but block-decoupled space reproduces the same steps.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::liouvillian::{symmetrize, CMatrix};

// Autonomous problem: stage times are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const MAX_STEPS: u64 = 50_000_000;

/// Settings of one integration.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rel: f64,
    pub abs: f64,
    /// Steps below this size (ns) are reported as stiffness.
    pub min_step: f64,
    /// Optional cap on the step size (ns).
    pub max_step: Option<f64>,
    /// Apply ρ ← (ρ + ρ†)/2 after every accepted step.
    pub symmetrize: bool,
}

impl StepControl {
    pub const MIN_STEP: f64 = 1e-8;

    pub fn new(rel: f64, abs: f64) -> Self {
        StepControl {
            rel,
            abs,
            min_step: Self::MIN_STEP,
            max_step: None,
            symmetrize: true,
        }
    }
}

/// Step counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub evaluations: u64,
}

/// Integrates `dy/dt = f(y)` forward in time.
pub struct DormandPrince<F>
where
    F: FnMut(&CMatrix, &mut CMatrix),
{
    rhs: F,
    control: StepControl,
    t: f64,
    y: CMatrix,
    k: [CMatrix; 7],
    stage: CMatrix,
    candidate: CMatrix,
    next_step: Option<f64>,
    stats: StepStats,
}

fn combine(out: &mut CMatrix, y: &CMatrix, h: f64, terms: &[(f64, &CMatrix)]) {
    let out = out.as_mut_slice();
    out.copy_from_slice(y.as_slice());
    for &(coef, k) in terms {
        if coef == 0.0 {
            continue;
        }
        let w = h * coef;
        for (o, v) in out.iter_mut().zip(k.as_slice()) {
            *o += v * w;
        }
    }
}

impl<F> DormandPrince<F>
where
    F: FnMut(&CMatrix, &mut CMatrix),
{
    pub fn new(rhs: F, y0: CMatrix, control: StepControl) -> Self {
        let zeros = || CMatrix::zeros(y0.nrows(), y0.ncols());
        DormandPrince {
            rhs,
            control,
            t: 0.0,
            k: std::array::from_fn(|_| zeros()),
            stage: zeros(),
            candidate: zeros(),
            y: y0,
            next_step: None,
            stats: StepStats::default(),
        }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &CMatrix {
        &self.y
    }

    pub fn stats(&self) -> StepStats {
        self.stats
    }

    fn eval(&mut self, idx: usize, from_stage: bool) {
        let src = if from_stage { &self.stage } else { &self.y };
        (self.rhs)(src, &mut self.k[idx]);
        self.stats.evaluations += 1;
    }

    fn scaled_max(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(v, s)| v.norm() / (self.control.abs + self.control.rel * s.norm()))
            .fold(0.0, f64::max)
    }

    fn initial_step(&mut self) -> f64 {
        let f0 = self.k[0].clone();
        let d0 = self.scaled_max(self.y.as_slice(), self.y.as_slice());
        let d1 = self.scaled_max(f0.as_slice(), self.y.as_slice());
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        combine(&mut self.stage, &self.y, h0, &[(1.0, &f0)]);
        (self.rhs)(&self.stage, &mut self.candidate);
        self.stats.evaluations += 1;
        let diff: Vec<Complex64> = self
            .candidate
            .iter()
            .zip(f0.iter())
            .map(|(a, b)| (a - b) / h0)
            .collect();
        let d2 = self.scaled_max(&diff, self.y.as_slice());
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 5.0)
        };
        (100.0 * h0).min(h1)
    }

    /// Advances the solution exactly to `t_target`.
    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        if t_target < self.t {
            return Err(Error::Integration {
                t: self.t,
                reason: format!("cannot integrate backwards to {t_target}"),
            });
        }
        if self.stats.evaluations == 0 {
            self.eval(0, false);
        }
        let mut h = match self.next_step {
            Some(h) => h,
            None => self.initial_step(),
        };
        if let Some(cap) = self.control.max_step {
            h = h.min(cap);
        }

        loop {
            let remaining = t_target - self.t;
            if remaining <= 1e-13 * t_target.abs().max(1.0) {
                self.t = t_target;
                return Ok(());
            }
            if self.stats.accepted + self.stats.rejected >= MAX_STEPS {
                return Err(Error::Integration {
                    t: self.t,
                    reason: "step budget exhausted".into(),
                });
            }
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };
            if step < self.control.min_step && !clipped {
                return Err(Error::Stiffness { t: self.t, h: step });
            }

            let err = self.try_step(step);
            if err <= 1.0 {
                self.stats.accepted += 1;
                self.t = if clipped { t_target } else { self.t + step };
                std::mem::swap(&mut self.y, &mut self.candidate);
                if self.control.symmetrize {
                    symmetrize(&mut self.y);
                }
                // FSAL: the last stage is f(y_new).
                self.k.swap(0, 6);
                let factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                let proposal = step * factor;
                // A step shortened only to land on the target does not shrink the next one.
                h = if clipped { h.max(proposal) } else { proposal };
                if let Some(cap) = self.control.max_step {
                    h = h.min(cap);
                }
                self.next_step = Some(h);
                if clipped {
                    return Ok(());
                }
            } else {
                self.stats.rejected += 1;
                let factor = (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
                h = step * factor;
                if h < self.control.min_step {
                    return Err(Error::Stiffness { t: self.t, h });
                }
            }
        }
    }

    /// One trial step of size `h` from the current state; leaves the 5th-order
    /// solution in `candidate` and `f(candidate)` in `k[6]`. Returns the scaled
    /// error estimate.
    fn try_step(&mut self, h: f64) -> f64 {
        let y = &self.y;
        combine(&mut self.stage, y, h, &[(A21, &self.k[0])]);
        self.eval(1, true);
        combine(
            &mut self.stage,
            &self.y,
            h,
            &[(A31, &self.k[0]), (A32, &self.k[1])],
        );
        self.eval(2, true);
        combine(
            &mut self.stage,
            &self.y,
            h,
            &[(A41, &self.k[0]), (A42, &self.k[1]), (A43, &self.k[2])],
        );
        self.eval(3, true);
        combine(
            &mut self.stage,
            &self.y,
            h,
            &[
                (A51, &self.k[0]),
                (A52, &self.k[1]),
                (A53, &self.k[2]),
                (A54, &self.k[3]),
            ],
        );
        self.eval(4, true);
        combine(
            &mut self.stage,
            &self.y,
            h,
            &[
                (A61, &self.k[0]),
                (A62, &self.k[1]),
                (A63, &self.k[2]),
                (A64, &self.k[3]),
                (A65, &self.k[4]),
            ],
        );
        self.eval(5, true);
        combine(
            &mut self.candidate,
            &self.y,
            h,
            &[
                (A71, &self.k[0]),
                (A73, &self.k[2]),
                (A74, &self.k[3]),
                (A75, &self.k[4]),
                (A76, &self.k[5]),
            ],
        );
        (self.rhs)(&self.candidate, &mut self.k[6]);
        self.stats.evaluations += 1;

        let weights = [E1, 0.0, E3, E4, E5, E6, E7];
        let mut worst = 0.0f64;
        for i in 0..self.y.len() {
            let mut e = Complex64::new(0.0, 0.0);
            for (w, k) in weights.iter().zip(&self.k) {
                if *w != 0.0 {
                    e += k.as_slice()[i] * *w;
                }
            }
            let e = (e * h).norm();
            let scale = self.control.abs
                + self.control.rel
                    * self.y.as_slice()[i]
                        .norm()
                        .max(self.candidate.as_slice()[i].norm());
            worst = worst.max(e / scale);
        }
        worst
    }
}
