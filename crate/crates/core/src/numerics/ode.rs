//! Classical fixed-step fourth-order Runge-Kutta.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Step and horizon of a fixed-step integration. The state dimension is the
/// const parameter of [`integrate_ode`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSpec {
    pub step: f64,
    pub t_end: f64,
}

impl OdeSpec {
    pub fn new(step: f64, t_end: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("step {step} must be positive")));
        }
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("t_end {t_end} must be positive")));
        }
        Ok(OdeSpec { step, t_end })
    }

    /// Number of steps; the horizon is rounded to a whole number of steps.
    pub fn steps(&self) -> usize {
        let n = libm::round(self.t_end / self.step);
        (n as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeTrajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    /// Time at which the state left the admissible region, if it did.
    pub left_region_at: Option<f64>,
}

impl<const N: usize> OdeTrajectory<N> {
    pub fn last(&self) -> &[f64; N] {
        self.states.last().expect("trajectory holds the initial state")
    }
}

fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    core::array::from_fn(|i| y[i] + a * k[i])
}

/// One RK4 step; `None` if any stage evaluation leaves the region.
pub fn rk4_step<const N: usize, F>(rhs: &mut F, t: f64, y: &[f64; N], h: f64) -> Option<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Option<[f64; N]>,
{
    let k1 = rhs(t, y)?;
    let k2 = rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = rhs(t + h, &axpy(y, h, &k3))?;
    Some(core::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])))
}

/// Integrates `y' = rhs(t, y)` from `t = 0` on a uniform grid.
///
/// `rhs` returns `None` where the vector field is undefined, and `admissible`
/// is checked on every accepted state; either ends the run early with
/// `left_region_at` set. A non-finite state is an error.
pub fn integrate_ode<const N: usize, F, G>(
    spec: &OdeSpec,
    initial: [f64; N],
    mut rhs: F,
    mut admissible: G,
) -> Result<OdeTrajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> Option<[f64; N]>,
    G: FnMut(f64, &[f64; N]) -> bool,
{
    if initial.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { time: 0.0 });
    }
    let n = spec.steps();
    let h = spec.step;
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(0.0);
    states.push(initial);
    if !admissible(0.0, &initial) {
        return Ok(OdeTrajectory { times, states, left_region_at: Some(0.0) });
    }
    let mut y = initial;
    for i in 0..n {
        let t = i as f64 * h;
        let Some(next) = rk4_step(&mut rhs, t, &y, h) else {
            return Ok(OdeTrajectory { times, states, left_region_at: Some(t) });
        };
        let t_next = (i + 1) as f64 * h;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { time: t_next });
        }
        times.push(t_next);
        states.push(next);
        if !admissible(t_next, &next) {
            return Ok(OdeTrajectory { times, states, left_region_at: Some(t_next) });
        }
        y = next;
    }
    Ok(OdeTrajectory { times, states, left_region_at: None })
}

/// [`integrate_ode`] for a vector field defined everywhere.
pub fn integrate_ode_unbounded<const N: usize, F>(spec: &OdeSpec, initial: [f64; N], rhs: F) -> Result<OdeTrajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    integrate_ode(spec, initial, |t, y| Some(rhs(t, y)), |_, _| true)
}
