//! Three-stage third-order SSP Runge-Kutta with CFL-limited steps.

use std::ops::{Add, Mul};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TimeError {
    #[error("cfl must lie in (0, 1], got {0}")]
    BadCfl(f64),
    #[error("final time must be non-negative and finite, got {0}")]
    BadFinalTime(f64),
    #[error("non-positive or non-finite time step {0}")]
    BadStep(f64),
    #[error("step limit {0} reached before the final time")]
    StepLimit(usize),
}

/// How the step follows from the largest wave speed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepRule {
    /// `cfl * dx / speed`.
    Cfl,
    /// `cfl * dx^exponent / speed`, for temporal errors below high spatial order.
    Scaled { exponent: f64 },
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeControls {
    pub cfl: f64,
    pub t_final: f64,
    pub max_steps: usize,
    pub rule: StepRule,
}

impl TimeControls {
    pub fn new(t_final: f64) -> Self {
        TimeControls {
            cfl: 0.5,
            t_final,
            max_steps: 10_000_000,
            rule: StepRule::Cfl,
        }
    }

    pub fn validate(&self) -> Result<(), TimeError> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(TimeError::BadCfl(self.cfl));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(TimeError::BadFinalTime(self.t_final));
        }
        Ok(())
    }
}

/// One SSP-RK3 step for a field of any vector-space element.
pub fn ssp_rk3_step<T, E, F>(u: &[T], dt: f64, mut rhs: F) -> Result<Vec<T>, E>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    F: FnMut(&[T]) -> Result<Vec<T>, E>,
{
    let l0 = rhs(u)?;
    let u1: Vec<T> = u.iter().zip(&l0).map(|(a, l)| *a + *l * dt).collect();
    let l1 = rhs(&u1)?;
    let u2: Vec<T> = u
        .iter()
        .zip(u1.iter().zip(&l1))
        .map(|(a, (b, l))| *a * 0.75 + (*b + *l * dt) * 0.25)
        .collect();
    let l2 = rhs(&u2)?;
    Ok(u
        .iter()
        .zip(u2.iter().zip(&l2))
        .map(|(a, (b, l))| *a * (1.0 / 3.0) + (*b + *l * dt) * (2.0 / 3.0))
        .collect())
}

/// One-dimensional step; zero speed falls back to `cfl * dx`.
pub fn compute_dt_1d(speed: f64, dx: f64, controls: &TimeControls) -> f64 {
    let h = match controls.rule {
        StepRule::Fixed(dt) => return dt,
        StepRule::Cfl => dx,
        StepRule::Scaled { exponent } => dx.powf(exponent),
    };
    if speed > 0.0 {
        controls.cfl * h / speed
    } else {
        controls.cfl * h
    }
}

pub fn compute_dt_2d(speeds: (f64, f64), dx: f64, dy: f64, controls: &TimeControls) -> f64 {
    if let StepRule::Fixed(dt) = controls.rule {
        return dt;
    }
    let rate = speeds.0 / dx + speeds.1 / dy;
    if rate > 0.0 {
        controls.cfl / rate
    } else {
        controls.cfl * dx.min(dy)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub time: f64,
}

/// Advances `u` to `controls.t_final`. `step_size` sees the current state
/// once per step; the last step is clipped to land on the final time.
pub fn integrate<T, E, S, F>(
    u: &mut Vec<T>,
    controls: &TimeControls,
    mut step_size: S,
    mut rhs: F,
) -> Result<RunSummary, E>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    E: From<TimeError>,
    S: FnMut(&[T]) -> Result<f64, E>,
    F: FnMut(&[T]) -> Result<Vec<T>, E>,
{
    controls.validate()?;
    let mut t = 0.0;
    let mut steps = 0;
    while t < controls.t_final {
        if steps >= controls.max_steps {
            return Err(TimeError::StepLimit(steps).into());
        }
        let mut dt = step_size(u)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(TimeError::BadStep(dt).into());
        }
        let last = t + dt >= controls.t_final;
        if last {
            dt = controls.t_final - t;
        }
        *u = ssp_rk3_step(u, dt, &mut rhs)?;
        steps += 1;
        t = if last { controls.t_final } else { t + dt };
    }
    Ok(RunSummary { steps, time: t })
}
