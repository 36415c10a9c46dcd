use std::io::Write;

use nsl_core::dynamics::{
    conservation_report, consistency_check, integrate_euler_lagrange, integrate_hamilton, integrate_lienard,
    to_velocity_side,
};
use nsl_core::families::{el_residual, euler_lagrange_coeffs};
use nsl_core::legendre::{coalescence_points, momentum_mass_decompose, BranchSign};
use nsl_core::lienard::{cheillini_analyze, shift_polynomial};
use nsl_core::{BranchedHamiltonian, ExitReason, Lagrangian, LagrangianModel, Trajectory};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{linspace, Axis, Format, RunConfig, Start, Subject};
use crate::error::{CliError, EXIT_NO_CHEILLINI, EXIT_OK};
use crate::output::{q2_name, write_json, write_surface, write_trajectory, SurfaceRow};

/// Where and how a command writes its artifact.
pub struct Output<'a> {
    pub out: &'a mut dyn Write,
    pub format: Format,
}

#[derive(Debug, Serialize)]
struct EllReport {
    ell: String,
    ell_value: f64,
    partner: String,
    partner_sum: f64,
    a: f64,
    alpha: usize,
    k: f64,
    /// `W(x) = g / (l f)`, ascending coefficients.
    w: Vec<f64>,
}

pub fn check_cheillini(cfg: &RunConfig, out: Output) -> Result<u8, CliError> {
    let Subject::System { sys, .. } = cfg.subject()? else {
        return Err(CliError::config("check-cheillini needs a `system` block"));
    };
    let report = cheillini_analyze(&sys)?;
    let solutions = report
        .solutions
        .iter()
        .map(|s| {
            Ok(EllReport {
                ell: s.ell.to_string(),
                ell_value: s.ell.value(),
                partner: s.partner_ell.to_string(),
                partner_sum: s.ell.value() + s.partner_ell.value(),
                a: s.a,
                alpha: s.alpha_exp,
                k: s.k_const,
                w: shift_polynomial(&sys, s)?.into_coeffs(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    if solutions.is_empty() {
        eprintln!("no solution for f = {}, g = {}", sys.f(), sys.g());
    }
    for s in &solutions {
        eprintln!("l = {} (partner {}), f = {} x^{}, k = {}", s.ell, s.partner, s.a, s.alpha, s.k);
    }
    for d in &report.diagnostics {
        eprintln!("note: {d}");
    }
    let found = !solutions.is_empty();
    let body = json!({
        "f": sys.f().coeffs(),
        "g": sys.g().coeffs(),
        "solutions": solutions,
        "diagnostics": report.diagnostics,
    });
    write_json(&body, out.out)?;
    Ok(if found { EXIT_OK } else { EXIT_NO_CHEILLINI })
}

fn sign_name(s: BranchSign) -> &'static str {
    match s {
        BranchSign::Plus => "+",
        BranchSign::Minus => "-",
        BranchSign::None => "",
    }
}

pub fn build(cfg: &RunConfig, out: Output) -> Result<u8, CliError> {
    let subject = cfg.subject()?;
    let bh = subject.hamiltonian()?;
    let mut branches = Vec::new();
    for b in bh.branches() {
        let mass = match momentum_mass_decompose(&bh, b.id) {
            Ok(mm) => json!({ "positive_mass_intervals": mm.positive_mass_intervals()? }),
            Err(e) => json!({ "not_decomposable": e.to_string() }),
        };
        branches.push(json!({
            "id": b.id,
            "sign": sign_name(b.sign),
            "domain": bh.domain(b.id)?.to_string(),
            "closed_form": bh.closed_form_h(b.id, 0.0, bh.domain(b.id)?.nearest_inside(1.0)).is_some(),
            "mass": mass,
        }));
    }
    let mut body = json!({
        "model": bh.model().name(),
        "momentum_map": { "scale": bh.map().scale, "shift": bh.map().shift },
        "branches": branches,
        "coalescence_at_x0": coalescence_points(&bh, 0.0),
    });
    if let LagrangianModel::Lienard(lag) = bh.model() {
        body["ell"] = json!(lag.ell().to_string());
        body["w"] = json!(lag.w().coeffs());
        body["prefactor"] = json!(lag.prefactor());
        body["momentum_exponent"] = json!(lag.momentum_power().exponent());
    }
    write_json(&body, out.out)?;
    Ok(EXIT_OK)
}

/// Evaluates every branch on the grid. Points outside all branch domains
/// produce no row.
pub fn surface_rows(bh: &BranchedHamiltonian, xs: &[f64], axis: Axis) -> Result<Vec<SurfaceRow>, CliError> {
    let rows: Vec<Vec<SurfaceRow>> = match axis {
        Axis::Momentum { range, n } => {
            let ps = linspace(range, n);
            xs.par_iter().map(|&x| momentum_row(bh, x, &ps)).collect()
        }
        Axis::Velocity { range, n } => {
            if bh.map() != nsl_core::legendre::MomentumMap::IDENTITY {
                return Err(CliError::config("velocity grids need an unmapped Hamiltonian"));
            }
            let vs = linspace(range, n);
            xs.par_iter().map(|&x| velocity_row(bh, x, &vs)).collect()
        }
    };
    Ok(rows.into_iter().flatten().collect())
}

fn momentum_row(bh: &BranchedHamiltonian, x: f64, ps: &[f64]) -> Vec<SurfaceRow> {
    let mut row = Vec::new();
    for &p in ps {
        for b in bh.branches() {
            if !bh.contains(b.id, p) {
                continue;
            }
            if let (Ok(v), Ok(h)) = (bh.dh_dp(b.id, x, p), bh.h_of(b.id, x, p)) {
                if v.is_finite() && h.is_finite() {
                    row.push(SurfaceRow { x, p, branch: b.id, v, h });
                }
            }
        }
    }
    row
}

fn velocity_row(bh: &BranchedHamiltonian, x: f64, vs: &[f64]) -> Vec<SurfaceRow> {
    let model = bh.model();
    let mut row = Vec::new();
    for &v in vs {
        let Ok(p) = model.momentum(x, v) else { continue };
        let owner = bh.branches().iter().find(|b| {
            bh.contains(b.id, p) && bh.v_of(b.id, x, p).is_ok_and(|w| (w - v).abs() <= 1e-8 * (1.0 + v.abs()))
        });
        if let (Some(b), Ok(l)) = (owner, model.value(x, v)) {
            row.push(SurfaceRow { x, p, branch: b.id, v, h: p * v - l });
        }
    }
    row.sort_by(|a, b| a.p.total_cmp(&b.p).then(a.branch.cmp(&b.branch)));
    row
}

pub fn surface(cfg: &RunConfig, out: Output) -> Result<u8, CliError> {
    let grid = cfg.grid()?;
    let axis = grid.axis()?;
    let bh = cfg.subject()?.hamiltonian()?;
    let rows = surface_rows(&bh, &linspace(grid.x_range, grid.nx), axis)?;
    if rows.is_empty() {
        return Err(CliError::from(nsl_core::Error::EmptyDomain { p: f64::NAN }));
    }
    write_surface(&rows, out.format, out.out)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
pub struct SimSummary {
    pub side: &'static str,
    pub branch: Option<usize>,
    pub samples: usize,
    pub t_end: f64,
    #[serde(rename = "H_drift")]
    pub h_drift: Option<f64>,
    pub ode_residual: Option<f64>,
    pub exit_event: Option<serde_json::Value>,
}

/// `max |E(t) - E(0)|` for the energy function `p v - L` on an `(x, v)`
/// trajectory.
fn energy_drift(model: &LagrangianModel, traj: &Trajectory) -> Option<f64> {
    let es = traj
        .states
        .iter()
        .map(|&[x, v]| Some(model.momentum(x, v).ok()? * v - model.value(x, v).ok()?))
        .collect::<Option<Vec<f64>>>()?;
    let e0 = *es.first()?;
    Some(es.iter().fold(0.0, |m: f64, e| m.max((e - e0).abs())))
}

/// Branch whose velocity at `(x, p)` is `v`.
fn branch_for_velocity(bh: &BranchedHamiltonian, x: f64, p: f64, v: f64) -> Result<usize, CliError> {
    bh.branches()
        .iter()
        .find(|b| bh.contains(b.id, p) && bh.v_of(b.id, x, p).is_ok_and(|w| (w - v).abs() <= 1e-8 * (1.0 + v.abs())))
        .map(|b| b.id)
        .ok_or_else(|| nsl_core::Error::BranchNotFound { x, v }.into())
}

pub fn run_simulation(cfg: &RunConfig) -> Result<(Trajectory, SimSummary), CliError> {
    let sim = cfg.sim()?;
    let start = sim.start()?;
    let subject = cfg.subject()?;
    let (x0, dt, t_end) = (sim.x0, sim.dt, sim.t_end);

    let (traj, h_drift, ode_residual) = match (&subject, start) {
        (Subject::System { sys, .. }, Start::Velocity(v0)) => {
            let traj = integrate_lienard(sys, x0, v0, dt, t_end)?;
            let drift = subject.model().ok().and_then(|m| energy_drift(&m, &traj));
            let res = consistency_check(sys, &traj).ok();
            (traj, drift, res)
        }
        (Subject::System { sys, .. }, Start::Momentum(p0)) => {
            let bh = subject.hamiltonian()?;
            let traj = integrate_hamilton(&bh, sim.branch_id, x0, p0, dt, t_end)?;
            let drift = conservation_report(&bh, sim.branch_id, &traj).ok();
            let res = consistency_check(sys, &traj).ok();
            (traj, drift, res)
        }
        (Subject::Family(fam), Start::Velocity(v0)) if euler_lagrange_coeffs(fam).is_ok() => {
            let coeffs = euler_lagrange_coeffs(fam)?;
            let traj = integrate_euler_lagrange(&coeffs, x0, v0, dt, t_end)?;
            let model = LagrangianModel::from(fam.clone());
            let drift = energy_drift(&model, &traj);
            let res = el_residual(fam, &traj).ok().map(|r| r.max_abs);
            (traj, drift, res)
        }
        (_, start) => {
            let bh = subject.hamiltonian()?;
            let (p0, branch) = match start {
                Start::Momentum(p0) => (p0, sim.branch_id),
                Start::Velocity(v0) => {
                    if bh.map() != nsl_core::legendre::MomentumMap::IDENTITY {
                        return Err(CliError::config("this Hamiltonian needs p0"));
                    }
                    let p0 = bh.model().momentum(x0, v0)?;
                    (p0, branch_for_velocity(&bh, x0, p0, v0)?)
                }
            };
            let traj = integrate_hamilton(&bh, branch, x0, p0, dt, t_end)?;
            let drift = conservation_report(&bh, branch, &traj).ok();
            let res = match &subject {
                Subject::Family(fam) => {
                    to_velocity_side(&bh, &traj).and_then(|vt| el_residual(fam, &vt)).ok().map(|r| r.max_abs)
                }
                _ => None,
            };
            (traj, drift, res)
        }
    };
    let summary = SimSummary {
        side: q2_name(traj.side),
        branch: traj.branch_id,
        samples: traj.len(),
        t_end: traj.end_time(),
        h_drift,
        ode_residual,
        exit_event: traj.exit_event.map(|e| {
            let reason = match e.reason {
                ExitReason::BranchBoundary => "BranchBoundary",
                ExitReason::LeftDomain => "LeftDomain",
            };
            json!({ "time": e.time, "reason": reason })
        }),
    };
    Ok((traj, summary))
}

pub fn simulate(cfg: &RunConfig, out: Output) -> Result<u8, CliError> {
    let (traj, summary) = run_simulation(cfg)?;
    write_trajectory(&traj, out.format, out.out)?;
    out.out.flush()?;
    eprintln!("{}", serde_json::to_string(&summary)?);
    Ok(EXIT_OK)
}
