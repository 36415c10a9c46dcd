//! Legendre transform with multi-valued inversion.
//!
//! `p = dL/dv` is inverted into every real velocity branch `v_i(x, p)` and
//! each branch gets `H_i(x, p) = p v_i - L(x, v_i)`. Closed forms are kept
//! only as construction-time cross-checks.

mod domain;
mod model;

use alloc::format;
use alloc::vec::Vec;

pub use domain::{Bound, MomentumDomain};
pub use model::{quartic_critical_momentum, Branch, BranchSign, LagrangianModel};

use crate::families::{Lagrangian, LagrangianFamily};
use crate::{Error, Result};
use model::{branch_specs, branch_velocity, closed_form_h, generalized_velocities};

/// Relative tolerance for closed-form cross-checks and coalescence.
pub const H_TOL: f64 = 1e-9;

/// Affine change of momentum `p_model = scale * p + shift`. The Hamiltonian
/// in the new variable is `H(x, p) = H_model(x, scale * p + shift)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumMap {
    pub scale: f64,
    pub shift: f64,
}

impl MomentumMap {
    pub const IDENTITY: MomentumMap = MomentumMap { scale: 1.0, shift: 0.0 };

    pub fn new(scale: f64, shift: f64) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::InvalidParameter("momentum map needs a finite nonzero scale".into()));
        }
        Ok(MomentumMap { scale, shift })
    }

    pub fn to_model(&self, p: f64) -> f64 {
        self.scale * p + self.shift
    }

    pub fn from_model(&self, q: f64) -> f64 {
        (q - self.shift) / self.scale
    }
}

/// The set of Hamiltonians `H_i(x, p)` obtained from one Lagrangian.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchedHamiltonian {
    model: LagrangianModel,
    branches: Vec<Branch>,
    map: MomentumMap,
}

/// Builds every branch and cross-checks it against its closed form.
pub fn hamiltonian_branches(model: impl Into<LagrangianModel>) -> Result<BranchedHamiltonian> {
    BranchedHamiltonian::with_map(model.into(), MomentumMap::IDENTITY)
}

impl BranchedHamiltonian {
    pub fn with_map(model: LagrangianModel, map: MomentumMap) -> Result<Self> {
        if let LagrangianModel::Family(f) = &model {
            f.validate()?;
        }
        let branches = branch_specs(&model)?;
        let bh = BranchedHamiltonian { model, branches, map };
        bh.check_closed_forms()?;
        Ok(bh)
    }

    /// The higher-power model with `m = 0` written in the momentum in which
    /// it is a nonlinear Lienard Hamiltonian: `p_model = 2k p / (3 lambda) - 1`.
    pub fn higher_power_lienard(lambda: f64, k: f64) -> Result<Self> {
        let fam = LagrangianFamily::higher_power_lienard(lambda, k)?;
        let map = MomentumMap::new(2.0 * k / (3.0 * lambda), -1.0)?;
        BranchedHamiltonian::with_map(fam.into(), map)
    }

    fn check_closed_forms(&self) -> Result<()> {
        const XS: [f64; 4] = [-1.1, -0.3, 0.4, 1.6];
        for b in &self.branches {
            for p in b.domain.sample_points(6) {
                for x in XS {
                    let Some(closed) = closed_form_h(&self.model, b, x, p) else {
                        continue;
                    };
                    // Points outside the Lagrangian's own domain are skipped.
                    let Ok(h) = self.h_model(b, x, p) else { continue };
                    let c = closed?;
                    if (h - c).abs() > H_TOL * (1.0 + h.abs()) {
                        return Err(Error::ClosedFormMismatch(format!(
                            "{} branch {} at (x, p) = ({x}, {p}): transform {h}, closed form {c}",
                            self.model.name(),
                            b.id
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn model(&self) -> &LagrangianModel {
        &self.model
    }

    pub fn map(&self) -> MomentumMap {
        self.map
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn branch(&self, id: usize) -> Result<&Branch> {
        self.branches
            .iter()
            .find(|b| b.id == id)
            .ok_or_else(|| Error::InvalidParameter(format!("no branch {id} ({} branches)", self.branches.len())))
    }

    /// Domain of branch `id` in this Hamiltonian's momentum.
    pub fn domain(&self, id: usize) -> Result<MomentumDomain> {
        Ok(self.branch(id)?.domain.pull_back(self.map.scale, self.map.shift))
    }

    pub fn contains(&self, id: usize, p: f64) -> bool {
        self.domain(id).map(|d| d.contains(p)).unwrap_or(false)
    }

    pub fn v_of(&self, id: usize, x: f64, p: f64) -> Result<f64> {
        branch_velocity(&self.model, self.branch(id)?, x, self.map.to_model(p))
    }

    fn h_model(&self, b: &Branch, x: f64, q: f64) -> Result<f64> {
        let v = branch_velocity(&self.model, b, x, q)?;
        Ok(q * v - self.model.value(x, v)?)
    }

    /// `H = p v - L` on branch `id`.
    pub fn h_of(&self, id: usize, x: f64, p: f64) -> Result<f64> {
        self.h_model(self.branch(id)?, x, self.map.to_model(p))
    }

    /// Closed-form `H` on branch `id`, if one is known.
    pub fn closed_form_h(&self, id: usize, x: f64, p: f64) -> Option<Result<f64>> {
        let b = match self.branch(id) {
            Ok(b) => b,
            Err(e) => return Some(Err(e)),
        };
        closed_form_h(&self.model, b, x, self.map.to_model(p))
    }

    /// `dH/dp = scale * v` (envelope theorem).
    pub fn dh_dp(&self, id: usize, x: f64, p: f64) -> Result<f64> {
        Ok(self.map.scale * self.v_of(id, x, p)?)
    }

    /// `dH/dx = -dL/dx` at the branch velocity.
    pub fn dh_dx(&self, id: usize, x: f64, p: f64) -> Result<f64> {
        let v = self.v_of(id, x, p)?;
        Ok(-self.model.dx(x, v)?)
    }

    /// `H` at the point of the branch domain nearest to `p`.
    ///
    /// Works in the model momentum so that open ends at zero are approached
    /// closely; points within rounding of an end are snapped onto it first.
    pub fn h_closure(&self, id: usize, x: f64, p: f64) -> Result<f64> {
        let b = self.branch(id)?;
        let mut q = self.map.to_model(p);
        for end in [b.domain.lo.value(), b.domain.hi.value()].into_iter().flatten() {
            if (q - end).abs() <= 1e-12 * (1.0 + end.abs()) {
                q = end;
            }
        }
        self.h_model(b, x, b.domain.nearest_inside(q))
    }
}

/// Every real velocity with `dL/dv (x, v) = p`, ascending.
pub fn invert_momentum(model: &LagrangianModel, x: f64, p: f64) -> Result<Vec<f64>> {
    let mut vs = match model {
        LagrangianModel::Family(LagrangianFamily::GeneralizedReciprocal { alpha, beta, mu, rho }) => {
            generalized_velocities(*alpha, *beta, mu, rho, x, p)?
                .into_iter()
                .filter(|&v| model.momentum(x, v).map(|q| (q - p).abs() <= 1e-9 * (1.0 + p.abs())).unwrap_or(false))
                .collect()
        }
        _ => {
            let mut vs = Vec::new();
            for b in branch_specs(model)? {
                if b.domain.contains(p) {
                    vs.push(branch_velocity(model, &b, x, p)?);
                }
            }
            vs
        }
    };
    if vs.is_empty() {
        return Err(Error::EmptyDomain { p });
    }
    vs.sort_by(|a, b| a.total_cmp(b));
    vs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    Ok(vs)
}

fn h_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= H_TOL * (1.0 + a.abs().max(b.abs()))
}

/// Momenta where two branches meet at position `x`.
///
/// Endpoints of a shared domain count when the branch Hamiltonians agree
/// there (velocities may diverge at an open end). Interior crossings of
/// `H_i - H_j` count only when the velocities agree too, so transversal
/// crossings of distinct branches are not reported.
pub fn coalescence_points(bh: &BranchedHamiltonian, x: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    let n = bh.branch_count();
    for i in 0..n {
        for j in i + 1..n {
            let (bi, bj) = (bh.branches[i].id, bh.branches[j].id);
            let (Ok(di), Ok(dj)) = (bh.domain(bi), bh.domain(bj)) else { continue };
            let shared = di.intersect(&dj);
            if shared.is_empty() {
                continue;
            }
            for end in [shared.lo.value(), shared.hi.value()].into_iter().flatten() {
                let (Ok(hi), Ok(hj)) = (bh.h_closure(bi, x, end), bh.h_closure(bj, x, end)) else {
                    continue;
                };
                if h_close(hi, hj) {
                    out.push(end);
                }
            }
            out.extend(interior_meetings(bh, bi, bj, x, &shared));
        }
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));
    out
}

fn interior_meetings(bh: &BranchedHamiltonian, i: usize, j: usize, x: f64, d: &MomentumDomain) -> Vec<f64> {
    const N: usize = 400;
    let (a, b) = d.window(10.0);
    let diff = |p: f64| -> Option<f64> { Some(bh.h_of(i, x, p).ok()? - bh.h_of(j, x, p).ok()?) };
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for k in 1..N {
        let p = a + (b - a) * k as f64 / N as f64;
        let Some(dp) = diff(p) else {
            prev = None;
            continue;
        };
        if let Some((p0, d0)) = prev {
            if (d0 < 0.0) != (dp < 0.0) || dp == 0.0 {
                let (mut lo, mut hi, mut dlo) = (p0, p, d0);
                while hi - lo > 1e-12 * (1.0 + lo.abs()) {
                    let mid = 0.5 * (lo + hi);
                    let Some(dm) = diff(mid) else { break };
                    if (dm < 0.0) == (dlo < 0.0) {
                        lo = mid;
                        dlo = dm;
                    } else {
                        hi = mid;
                    }
                }
                let r = 0.5 * (lo + hi);
                let same_v = match (bh.v_of(i, x, r), bh.v_of(j, x, r)) {
                    (Ok(vi), Ok(vj)) => (vi - vj).abs() < 1e-6,
                    _ => false,
                };
                let same_h = match (bh.h_of(i, x, r), bh.h_of(j, x, r)) {
                    (Ok(hi), Ok(hj)) => h_close(hi, hj),
                    _ => false,
                };
                if same_v && same_h {
                    out.push(r);
                }
            }
        }
        prev = Some((p, dp));
    }
    out
}

/// `H(x, p) = x^2 / (2 m(p)) + U(p)` on one branch.
#[derive(Debug, Clone, Copy)]
pub struct MomentumMassForm<'a> {
    bh: &'a BranchedHamiltonian,
    pub branch_id: usize,
}

impl MomentumMassForm<'_> {
    /// Coefficient `c(p)` of `x^2`.
    pub fn curvature(&self, p: f64) -> Result<f64> {
        Ok(self.bh.h_of(self.branch_id, 1.0, p)? - self.bh.h_of(self.branch_id, 0.0, p)?)
    }

    /// `m(p) = 1 / (2 c(p))`.
    pub fn mass(&self, p: f64) -> Result<f64> {
        let c = self.curvature(p)?;
        if c == 0.0 {
            return Err(Error::domain(format!("mass is infinite at p = {p}")));
        }
        Ok(0.5 / c)
    }

    /// `U(p) = H(0, p)`.
    pub fn potential(&self, p: f64) -> Result<f64> {
        self.bh.h_of(self.branch_id, 0.0, p)
    }

    /// `x^2 / (2 m) + U`.
    pub fn reconstruct(&self, x: f64, p: f64) -> Result<f64> {
        Ok(x * x * self.curvature(p)? + self.potential(p)?)
    }

    /// Sub-intervals of the branch domain where `m(p) > 0`, scanned over a
    /// finite window; unbounded ends are reported as infinities.
    pub fn positive_mass_intervals(&self) -> Result<Vec<(f64, f64)>> {
        const N: usize = 2000;
        let d = self.bh.domain(self.branch_id)?;
        let (a, b) = d.window(50.0);
        let lo_end = d.lo.value().unwrap_or(f64::NEG_INFINITY);
        let hi_end = d.hi.value().unwrap_or(f64::INFINITY);
        let mut out = Vec::new();
        let mut start: Option<f64> = None;
        let mut prev: Option<(f64, f64)> = None;
        for k in 0..=N {
            let p = a + (b - a) * k as f64 / N as f64;
            let Ok(c) = self.curvature(p) else { continue };
            let positive = c > 0.0;
            match (start, positive) {
                (None, true) => {
                    start = Some(match prev {
                        Some((p0, c0)) => self.zero_of_curvature(p0, c0, p),
                        None => lo_end,
                    })
                }
                (Some(s), false) => {
                    let (p0, c0) = prev.expect("positive sample precedes");
                    out.push((s, self.zero_of_curvature(p0, c0, p)));
                    start = None;
                }
                _ => {}
            }
            prev = Some((p, c));
        }
        if let Some(s) = start {
            out.push((s, hi_end));
        }
        Ok(out)
    }

    fn zero_of_curvature(&self, mut lo: f64, clo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match self.curvature(mid) {
                Ok(c) if (c > 0.0) == (clo > 0.0) => lo = mid,
                Ok(_) => hi = mid,
                Err(_) => break,
            }
        }
        let r = 0.5 * (lo + hi);
        // Snap to a round value when the zero is one to rounding accuracy.
        let snapped = libm::round(r * 1e9) / 1e9;
        if (snapped - r).abs() <= 1e-11 * (1.0 + r.abs()) {
            snapped
        } else {
            r
        }
    }
}

/// Splits a branch Hamiltonian into momentum-dependent mass and potential.
pub fn momentum_mass_decompose(bh: &BranchedHamiltonian, branch_id: usize) -> Result<MomentumMassForm<'_>> {
    const XS: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
    let form = MomentumMassForm { bh, branch_id };
    let domain = bh.domain(branch_id)?;
    let mut checked = 0;
    for p in domain.sample_points(8) {
        let (Ok(c), Ok(u)) = (form.curvature(p), form.potential(p)) else { continue };
        for x in XS {
            let Ok(h) = bh.h_of(branch_id, x, p) else { continue };
            let r = x * x * c + u;
            if (h - r).abs() > 1e-10 * (1.0 + h.abs()) {
                return Err(Error::NotDecomposable(format!(
                    "branch {branch_id}: H({x}, {p}) = {h} but c(p) x^2 + U(p) = {r}"
                )));
            }
            checked += 1;
        }
    }
    if checked == 0 {
        return Err(Error::NotDecomposable("no probe point lies in the branch domain".into()));
    }
    Ok(form)
}

/// `|L(x, v) + H(x, p) - p v|` with `p = dL/dv` and `H` taken from the
/// branch that reproduces `v` (closed form where known).
pub fn legendre_identity_check(model: &LagrangianModel, x: f64, v: f64) -> Result<f64> {
    let l = model.value(x, v)?;
    let p = model.momentum(x, v)?;
    let near = |w: f64| (w - v).abs() <= 1e-7 * (1.0 + v.abs());
    let h = match model {
        LagrangianModel::Family(LagrangianFamily::GeneralizedReciprocal { .. }) => {
            let vs = invert_momentum(model, x, p)?;
            let w = vs.into_iter().find(|&w| near(w)).ok_or(Error::BranchNotFound { x, v })?;
            p * w - model.value(x, w)?
        }
        _ => {
            let mut found = None;
            for b in branch_specs(model)? {
                if !b.domain.contains(p) {
                    continue;
                }
                let Ok(w) = branch_velocity(model, &b, x, p) else { continue };
                if near(w) {
                    found = Some(match closed_form_h(model, &b, x, p) {
                        Some(h) => h?,
                        None => p * w - model.value(x, w)?,
                    });
                    break;
                }
            }
            found.ok_or(Error::BranchNotFound { x, v })?
        }
    };
    Ok((l + h - p * v).abs())
}

#[cfg(test)]
mod tests;
