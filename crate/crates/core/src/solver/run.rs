use serde::Serialize;

use super::stencil::Operators;
use super::step::{step_rk4, ImexStepper};
use super::{Grid, GridField, SolverError};
use crate::diagnostics::{norms, NormSeries};
use crate::families::{NumericFamily, SolutionFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// IMEX ARS(2,2,2), implicit biharmonic.
    Imex,
    /// Classical RK4 under the explicit limit `dt <= c_stab h^4`.
    Rk4,
}

impl Scheme {
    fn order(self) -> i32 {
        match self {
            Self::Imex => 2,
            Self::Rk4 => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub family: SolutionFamily,
    pub grid: Grid,
    pub t_end: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub safety: f64,
    pub blowup_threshold: f64,
    /// Record a norm sample every this many accepted steps.
    pub output_every: usize,
    /// Keep a snapshot every this many accepted steps (initial and final are always kept).
    pub snapshot_every: Option<usize>,
    /// Step-doubling tolerance on `max|u_dt - u_dt/2| / max(1, max|u|)`.
    pub tol: f64,
    pub scheme: Scheme,
    /// With `false`, takes `round(t_end / dt_init)` equal steps.
    pub adaptive: bool,
    pub c_stab: f64,
    /// Negative control: scales the biharmonic by `1 + hx`.
    pub broken_stencil: bool,
}

impl SolverConfig {
    pub fn new(family: SolutionFamily, grid: Grid, t_end: f64) -> Self {
        Self {
            family,
            grid,
            t_end,
            dt_init: 1e-4_f64.min(t_end),
            dt_min: 1e-14 * t_end,
            safety: 0.9,
            blowup_threshold: 1e8,
            output_every: 1,
            snapshot_every: None,
            tol: 1e-6,
            scheme: Scheme::Imex,
            adaptive: true,
            c_stab: 1.0 / 64.0,
            broken_stencil: false,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::Config(m));
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_init) {
            return bad(format!(
                "need 0 < dt_min <= dt_init, got {} and {}",
                self.dt_min, self.dt_init
            ));
        }
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return bad(format!("safety must lie in (0, 1), got {}", self.safety));
        }
        if !(self.blowup_threshold > 0.0) {
            return bad(format!(
                "blow-up threshold must be positive, got {}",
                self.blowup_threshold
            ));
        }
        if self.output_every == 0 || self.snapshot_every == Some(0) {
            return bad("output intervals must be at least 1".into());
        }
        if !(self.tol > 0.0) || !(self.c_stab > 0.0) {
            return bad("tol and c_stab must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    ReachedTEnd,
    BlowUpDetected,
    StepUnderflow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub status: RunStatus,
    pub t_final: f64,
    pub series: NormSeries,
    pub snapshots: Vec<GridField>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl RunResult {
    pub fn final_field(&self) -> &GridField {
        self.snapshots.last().expect("initial snapshot is always kept")
    }
}

struct Stepper {
    scheme: Scheme,
    ops: Operators,
    imex: Option<ImexStepper>,
}

impl Stepper {
    fn step(&mut self, f: &GridField, dt: f64, fam: &NumericFamily, t: f64) -> Result<GridField, SolverError> {
        match self.scheme {
            Scheme::Imex => self.imex.as_mut().expect("imex stepper").step(f, dt, fam, t),
            Scheme::Rk4 => step_rk4(f, dt, fam, t, self.ops),
        }
    }

    /// One step of `dt` and two of `dt/2`; returns the fine result and the
    /// scaled difference.
    fn doubled(
        &mut self,
        f: &GridField,
        dt: f64,
        fam: &NumericFamily,
        t: f64,
    ) -> Result<(GridField, f64), SolverError> {
        let coarse = self.step(f, dt, fam, t)?;
        let half = self.step(f, 0.5 * dt, fam, t)?;
        let fine = self.step(&half, 0.5 * dt, fam, t + 0.5 * dt)?;
        let diff = coarse
            .interior()
            .iter()
            .zip(fine.interior().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let est = diff / fine.max_abs_interior().max(1.0);
        if est.is_finite() {
            Ok((fine, est))
        } else {
            Err(SolverError::NonFinite { t: t + dt })
        }
    }
}

/// Step sizes are `base * 2^k` so cached factorizations get reused.
fn quantize(proposed: f64, base: f64, cap: f64) -> f64 {
    let k = (proposed / base).log2().floor() as i32;
    let mut dt = base * 2f64.powi(k);
    while dt > cap {
        dt *= 0.5;
    }
    dt
}

fn growing(history: &[f64]) -> bool {
    history.len() >= 3 && history.windows(2).all(|w| w[1] > w[0])
}

/// Integrates the family's initial data to `t_end` or until blow-up.
pub fn run(config: &SolverConfig) -> Result<RunResult, SolverError> {
    config.validate()?;
    config.family.validate()?;
    let fam = config.family.numeric();
    let grid = config.grid;
    let ops = Operators {
        broken_stencil: config.broken_stencil,
    };
    let mut stepper = Stepper {
        scheme: config.scheme,
        ops,
        imex: (config.scheme == Scheme::Imex).then(|| ImexStepper::new(grid, ops)),
    };
    let h = grid.hx.min(grid.hy);
    let dt_cap = match config.scheme {
        Scheme::Imex => config.t_end,
        Scheme::Rk4 => config.c_stab * h.powi(4),
    };
    let base = config.dt_init.min(dt_cap);
    let exponent = 1.0 / (config.scheme.order() + 1) as f64;

    let mut field = GridField::from_family(grid, &fam, 0.0)?;
    let mut series = NormSeries::default();
    series.push(norms(&field));
    let mut snapshots = vec![field.clone()];
    let mut history: Vec<f64> = vec![series.samples[0].h2semi];
    let mut t = 0.0;
    let mut dt = base;
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let fixed_steps = (!config.adaptive).then(|| ((config.t_end / base).round() as usize).max(1));
    let end_eps = 1e-12 * config.t_end;

    let status = loop {
        if !field.is_finite() || field.max_abs_interior() >= config.blowup_threshold {
            break RunStatus::BlowUpDetected;
        }
        if let Some(n) = fixed_steps {
            if accepted == n {
                break RunStatus::ReachedTEnd;
            }
        } else if config.t_end - t <= end_eps {
            break RunStatus::ReachedTEnd;
        }
        if dt < config.dt_min {
            break if growing(&history) {
                RunStatus::BlowUpDetected
            } else {
                RunStatus::StepUnderflow
            };
        }

        let (next, t_next, step) = if let Some(n) = fixed_steps {
            let step = config.t_end / n as f64;
            let t_next = (accepted + 1) as f64 * step;
            match stepper.step(&field, t_next - t, &fam, t) {
                Ok(next) => (next, t_next, step),
                Err(SolverError::Domain(_) | SolverError::NonFinite { .. }) => break RunStatus::BlowUpDetected,
                Err(e) => return Err(e),
            }
        } else {
            let remaining = config.t_end - t;
            let last = dt >= remaining;
            let step = if last { remaining } else { dt };
            match stepper.doubled(&field, step, &fam, t) {
                Ok((next, est)) if est <= config.tol => {
                    // accepted steps never shrink dt: with power-of-two levels a
                    // factor just below one would halve it every step
                    let grow = if est > 0.0 {
                        config.safety * (config.tol / est).powf(exponent)
                    } else {
                        f64::INFINITY
                    };
                    if !last && grow >= 2.0 {
                        dt = quantize(2.0 * dt, base, dt_cap);
                    }
                    (next, if last { config.t_end } else { t + step }, step)
                }
                Ok((_, est)) => {
                    rejected += 1;
                    let shrink = (config.safety * (config.tol / est).powf(exponent)).clamp(0.1, 0.5);
                    dt = quantize(step * shrink, base, dt_cap);
                    continue;
                }
                Err(SolverError::Domain(_) | SolverError::NonFinite { .. }) => {
                    rejected += 1;
                    dt = quantize(0.5 * step, base, dt_cap);
                    continue;
                }
                Err(e) => return Err(e),
            }
        };

        field = next;
        t = t_next;
        accepted += 1;
        let mut sample = norms(&field);
        sample.dt = step;
        history.push(sample.h2semi);
        if history.len() > 4 {
            history.remove(0);
        }
        if accepted.is_multiple_of(config.output_every) {
            series.push(sample);
        }
        if config.snapshot_every.is_some_and(|k| accepted.is_multiple_of(k)) {
            snapshots.push(field.clone());
        }
    };

    if series.samples.last().map(|s| s.t) != Some(field.time) {
        let mut sample = norms(&field);
        sample.dt = series.samples.last().map_or(0.0, |s| t - s.t);
        series.push(sample);
    }
    if snapshots.last().map(|s| s.time) != Some(field.time) {
        snapshots.push(field.clone());
    }
    Ok(RunResult {
        status,
        t_final: t,
        series,
        snapshots,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}
