//! Lienard and Hamilton flows plus the diagnostics that tie them together.

use alloc::vec::Vec;

use crate::families::{ElCoefficients, Lagrangian};
use crate::legendre::BranchedHamiltonian;
use crate::lienard::{FirstOrderForm, LienardSystem};
use crate::numerics::{
    central_diff_series, integrate_ode, integrate_ode_unbounded, second_diff_series, OdeSpec, OdeTrajectory,
};
use crate::trajectory::{ExitEvent, ExitReason, Side, Trajectory};
use crate::{Error, Result};

/// Distance to a branch-domain end at which a Hamilton flow is halted.
pub const BOUNDARY_TOL: f64 = 1e-9;

fn to_trajectory(
    side: Side,
    dt: f64,
    tr: OdeTrajectory<2>,
    branch_id: Option<usize>,
    reason: ExitReason,
) -> Trajectory {
    Trajectory {
        side,
        dt,
        exit_event: tr.left_region_at.map(|time| ExitEvent { time, reason }),
        times: tr.times,
        states: tr.states,
        branch_id,
    }
}

/// RK4 on `x' = v`, `v' = -f(x) v - g(x)`.
pub fn integrate_lienard(sys: &LienardSystem, x0: f64, v0: f64, dt: f64, t_end: f64) -> Result<Trajectory> {
    let spec = OdeSpec::new(dt, t_end)?;
    let tr = integrate_ode_unbounded(&spec, [x0, v0], |_, y| [y[1], sys.acceleration(y[0], y[1])])?;
    Ok(to_trajectory(Side::Lagrangian, dt, tr, None, ExitReason::LeftDomain))
}

/// RK4 on the Euler-Lagrange equation of a trial family. The run ends with
/// [`ExitReason::LeftDomain`] where the coefficients are undefined.
pub fn integrate_euler_lagrange(coeffs: &ElCoefficients, x0: f64, v0: f64, dt: f64, t_end: f64) -> Result<Trajectory> {
    let spec = OdeSpec::new(dt, t_end)?;
    let tr = integrate_ode(&spec, [x0, v0], |_, y| Some([y[1], coeffs.acceleration(y[0], y[1]).ok()?]), |_, _| true)?;
    Ok(to_trajectory(Side::Lagrangian, dt, tr, None, ExitReason::LeftDomain))
}

/// RK4 on `x' = u + W(x)`, `u' = l u f(x)`, reported as `(x, v)` with
/// `v = u + W(x)`.
pub fn integrate_first_order(form: &FirstOrderForm, x0: f64, u0: f64, dt: f64, t_end: f64) -> Result<Trajectory> {
    let spec = OdeSpec::new(dt, t_end)?;
    let tr = integrate_ode_unbounded(&spec, [x0, u0], |_, y| form.rhs(y))?;
    let mut out = to_trajectory(Side::Lagrangian, dt, tr, None, ExitReason::LeftDomain);
    for s in &mut out.states {
        s[1] = form.x_dot(s[0], s[1]);
    }
    Ok(out)
}

fn near_boundary(bh: &BranchedHamiltonian, id: usize, p: f64) -> bool {
    let Ok(d) = bh.domain(id) else { return true };
    if !d.contains(p) {
        return true;
    }
    [d.lo.value(), d.hi.value()].into_iter().flatten().any(|end| (p - end).abs() <= BOUNDARY_TOL * (1.0 + end.abs()))
}

/// RK4 on `x' = dH/dp`, `p' = -dH/dx` along one branch. The run halts with
/// a [`ExitReason::BranchBoundary`] event when `p` reaches the edge of the
/// branch domain.
pub fn integrate_hamilton(
    bh: &BranchedHamiltonian,
    branch_id: usize,
    x0: f64,
    p0: f64,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    let spec = OdeSpec::new(dt, t_end)?;
    bh.branch(branch_id)?;
    if !bh.contains(branch_id, p0) || bh.v_of(branch_id, x0, p0).is_err() {
        return Err(Error::OutsideBranchDomain { branch: branch_id, x: x0, p: p0 });
    }
    let rhs = |_: f64, y: &[f64; 2]| -> Option<[f64; 2]> {
        let (x, p) = (y[0], y[1]);
        if !bh.contains(branch_id, p) {
            return None;
        }
        Some([bh.dh_dp(branch_id, x, p).ok()?, -bh.dh_dx(branch_id, x, p).ok()?])
    };
    let tr = integrate_ode(&spec, [x0, p0], rhs, |_, y| !near_boundary(bh, branch_id, y[1]))?;
    Ok(to_trajectory(Side::Hamiltonian, dt, tr, Some(branch_id), ExitReason::BranchBoundary))
}

/// `H` along a trajectory. Hamiltonian-side states use the branch formula;
/// velocity-side states use `p v - L` with `p = dL/dv`, which needs no
/// branch choice.
pub fn hamiltonian_along(bh: &BranchedHamiltonian, branch_id: usize, traj: &Trajectory) -> Result<Vec<f64>> {
    let model = bh.model();
    traj.states
        .iter()
        .map(|&[x, q]| match traj.side {
            Side::Hamiltonian => bh.h_of(branch_id, x, q),
            Side::Lagrangian => {
                let p = model.momentum(x, q)?;
                Ok(p * q - model.value(x, q)?)
            }
        })
        .collect()
}

/// `max |H(t) - H(0)|`.
pub fn conservation_report(bh: &BranchedHamiltonian, branch_id: usize, traj: &Trajectory) -> Result<f64> {
    let hs = hamiltonian_along(bh, branch_id, traj)?;
    let h0 = hs.first().copied().unwrap_or(0.0);
    Ok(hs.iter().fold(0.0, |m: f64, h| m.max((h - h0).abs())))
}

/// Residual of `x'' + f(x) x' + g(x)` with both derivatives taken by central
/// differences of the sampled `x(t)`; endpoints are excluded.
pub fn consistency_residuals(sys: &LienardSystem, traj: &Trajectory) -> Result<Vec<f64>> {
    if traj.len() < 3 {
        return Err(Error::TooFewSamples(traj.len()));
    }
    let xs = traj.xs();
    let v = central_diff_series(&xs, traj.dt);
    let a = second_diff_series(&xs, traj.dt);
    Ok(a.iter()
        .zip(&v)
        .zip(&xs[1..xs.len() - 1])
        .map(|((a, v), &x)| a + sys.f().eval(x) * v + sys.g().eval(x))
        .collect())
}

pub fn consistency_check(sys: &LienardSystem, traj: &Trajectory) -> Result<f64> {
    Ok(consistency_residuals(sys, traj)?.iter().fold(0.0, |m: f64, r| m.max(r.abs())))
}

/// Rewrites a Hamilton-flow trajectory in `(x, v)` using its branch.
pub fn to_velocity_side(bh: &BranchedHamiltonian, traj: &Trajectory) -> Result<Trajectory> {
    if traj.side == Side::Lagrangian {
        return Ok(traj.clone());
    }
    let id = traj.branch_id.ok_or_else(|| Error::InvalidParameter("Hamiltonian trajectory without a branch".into()))?;
    let states = traj.states.iter().map(|&[x, p]| Ok([x, bh.v_of(id, x, p)?])).collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { side: Side::Lagrangian, states, ..traj.clone() })
}

/// Largest pointwise gap in `x(t)` between two trajectories on the same grid.
pub fn max_position_gap(a: &Trajectory, b: &Trajectory) -> f64 {
    a.states.iter().zip(&b.states).fold(0.0, |m: f64, (s, t)| m.max((s[0] - t[0]).abs()))
}
