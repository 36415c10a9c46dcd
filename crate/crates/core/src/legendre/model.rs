//! Per-model inversion of the momentum map and closed-form Hamiltonians.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::families::{vdp_gamma, HigherPowerExponents, Lagrangian, LagrangianFamily};
use crate::lienard::LienardLagrangian;
use crate::numerics::{poly_real_roots, pow_nonneg, rpow_real, Poly, RationalExponent, RealPower};
use crate::{Error, Result};

use super::domain::{Bound, MomentumDomain};

/// Anything with a Legendre transform: a catalog family or a Lienard
/// Lagrangian.
#[derive(Debug, Clone, PartialEq)]
pub enum LagrangianModel {
    Family(LagrangianFamily),
    Lienard(LienardLagrangian),
}

impl From<LagrangianFamily> for LagrangianModel {
    fn from(f: LagrangianFamily) -> Self {
        LagrangianModel::Family(f)
    }
}

impl From<LienardLagrangian> for LagrangianModel {
    fn from(l: LienardLagrangian) -> Self {
        LagrangianModel::Lienard(l)
    }
}

impl LagrangianModel {
    pub fn name(&self) -> &'static str {
        match self {
            LagrangianModel::Family(f) => f.name(),
            LagrangianModel::Lienard(_) => "lienard",
        }
    }
}

impl Lagrangian for LagrangianModel {
    fn value(&self, x: f64, v: f64) -> Result<f64> {
        match self {
            LagrangianModel::Family(f) => f.value(x, v),
            LagrangianModel::Lienard(l) => l.value(x, v),
        }
    }

    fn dv(&self, x: f64, v: f64) -> Result<f64> {
        match self {
            LagrangianModel::Family(f) => f.dv(x, v),
            LagrangianModel::Lienard(l) => l.dv(x, v),
        }
    }

    fn dx(&self, x: f64, v: f64) -> Result<f64> {
        match self {
            LagrangianModel::Family(f) => f.dx(x, v),
            LagrangianModel::Lienard(l) => l.dx(x, v),
        }
    }

    fn dvv(&self, x: f64, v: f64) -> Result<f64> {
        match self {
            LagrangianModel::Family(f) => f.dvv(x, v),
            LagrangianModel::Lienard(l) => l.dvv(x, v),
        }
    }

    fn momentum(&self, x: f64, v: f64) -> Result<f64> {
        match self {
            LagrangianModel::Family(f) => f.momentum(x, v),
            LagrangianModel::Lienard(l) => l.momentum(x, v),
        }
    }
}

/// Which root of the closed-form inversion a branch takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchSign {
    Plus,
    Minus,
    None,
}

impl BranchSign {
    fn factor(self) -> f64 {
        match self {
            BranchSign::Minus => -1.0,
            _ => 1.0,
        }
    }
}

/// A real velocity branch `v(x, p)` of the momentum map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub id: usize,
    pub sign: BranchSign,
    pub domain: MomentumDomain,
}

fn pm(domain: MomentumDomain) -> Vec<Branch> {
    vec![Branch { id: 0, sign: BranchSign::Plus, domain }, Branch { id: 1, sign: BranchSign::Minus, domain }]
}

fn single(domain: MomentumDomain) -> Vec<Branch> {
    vec![Branch { id: 0, sign: BranchSign::None, domain }]
}

/// `p_c = 2 (kappa/3)^(3/2)`, where the quartic-velocity branches fold.
pub fn quartic_critical_momentum(kappa: f64) -> f64 {
    2.0 * libm::pow(kappa / 3.0, 1.5)
}

/// How `b = v - W` is recovered from `q = p (l+1)/l` for a Lienard model.
enum LienardInverse {
    /// `b = q^(1/e)`, sign-preserving, one branch.
    Odd(RationalExponent),
    /// `b = +-|q|^(1/e)`, two branches.
    Even(f64),
    /// `b = q^(1/e)` with `b >= 0`, one branch.
    NonNeg(f64),
}

fn lienard_inverse(lag: &LienardLagrangian) -> Result<LienardInverse> {
    Ok(match lag.momentum_power() {
        RealPower::Odd(e) if e.num() % 2 != 0 => LienardInverse::Odd(RationalExponent::new(e.den(), e.num())?),
        RealPower::Odd(e) => LienardInverse::Even(e.as_f64()),
        RealPower::NonNegBase(e) => LienardInverse::NonNeg(e),
    })
}

fn lienard_q_scale(lag: &LienardLagrangian) -> f64 {
    let l = lag.ell().value();
    (l + 1.0) / l
}

/// Branch layout of a model. Domains are in the model's own momentum.
pub(crate) fn branch_specs(model: &LagrangianModel) -> Result<Vec<Branch>> {
    Ok(match model {
        LagrangianModel::Lienard(lag) => {
            let inv = lienard_inverse(lag)?;
            let e = lag.momentum_power().exponent();
            let half = |closed| {
                if lienard_q_scale(lag) > 0.0 {
                    MomentumDomain::positive(closed)
                } else {
                    MomentumDomain::negative(closed)
                }
            };
            match inv {
                LienardInverse::Odd(_) => single(MomentumDomain::ALL),
                LienardInverse::Even(_) => pm(half(e > 0.0)),
                LienardInverse::NonNeg(_) => single(half(e > 0.0)),
            }
        }
        LagrangianModel::Family(fam) => match fam {
            LagrangianFamily::TrialReciprocal { beta, .. } => {
                pm(if *beta > 0.0 { MomentumDomain::negative(false) } else { MomentumDomain::positive(false) })
            }
            LagrangianFamily::TrialLogarithmic { delta, .. } => {
                single(if *delta > 0.0 { MomentumDomain::positive(false) } else { MomentumDomain::negative(false) })
            }
            LagrangianFamily::GeneralizedReciprocal { .. } => {
                return Err(Error::UnsupportedFamily(
                    "generalized reciprocal branches depend on x; use invert_momentum",
                ))
            }
            LagrangianFamily::QuarticVelocity { kappa } => {
                let pc = quartic_critical_momentum(*kappa);
                vec![
                    Branch {
                        id: 0,
                        sign: BranchSign::None,
                        domain: MomentumDomain::new(Bound::Unbounded, Bound::Closed(pc)),
                    },
                    Branch {
                        id: 1,
                        sign: BranchSign::None,
                        domain: MomentumDomain::new(Bound::Closed(-pc), Bound::Closed(pc)),
                    },
                    Branch {
                        id: 2,
                        sign: BranchSign::None,
                        domain: MomentumDomain::new(Bound::Closed(-pc), Bound::Unbounded),
                    },
                ]
            }
            LagrangianFamily::CzPower { .. } => pm(MomentumDomain::positive(false)),
            LagrangianFamily::CzVelocityPotential { lambda, .. } => {
                pm(MomentumDomain::new(Bound::Open(-lambda), Bound::Unbounded))
            }
            LagrangianFamily::HigherPower { .. } => pm(MomentumDomain::negative(false)),
            LagrangianFamily::ReciprocalShifted { s, .. } => {
                pm(if *s > 0.0 { MomentumDomain::positive(false) } else { MomentumDomain::negative(false) })
            }
        },
    })
}

/// Root of the increasing (`rising`) or decreasing cubic `v^3 - kappa v - p`
/// on `[a, b]`.
fn cubic_branch(kappa: f64, p: f64, mut a: f64, mut b: f64, rising: bool) -> f64 {
    let f = |v: f64| v * v * v - kappa * v - p;
    let sgn = if rising { 1.0 } else { -1.0 };
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if sgn * f(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let (fa, fb) = (f(a).abs(), f(b).abs());
    if fa <= fb {
        a
    } else {
        b
    }
}

fn outside(branch: &Branch, p: f64) -> Error {
    Error::domain(format!("p = {p} is outside branch {} domain {}", branch.id, branch.domain))
}

/// Velocity of `branch` at `(x, p)`, `p` in the model's own momentum.
pub(crate) fn branch_velocity(model: &LagrangianModel, branch: &Branch, x: f64, p: f64) -> Result<f64> {
    if !branch.domain.contains(p) {
        return Err(outside(branch, p));
    }
    let sg = branch.sign.factor();
    match model {
        LagrangianModel::Lienard(lag) => {
            let q = p * lienard_q_scale(lag);
            let b = match lienard_inverse(lag)? {
                LienardInverse::Odd(inv) => rpow_real(q, inv)?,
                LienardInverse::Even(e) => sg * pow_nonneg(q.abs(), 1.0 / e)?,
                LienardInverse::NonNeg(e) => pow_nonneg(q, 1.0 / e)?,
            };
            Ok(lag.w().eval(x) + b)
        }
        LagrangianModel::Family(fam) => match fam {
            LagrangianFamily::TrialReciprocal { alpha, beta, mu } => {
                let d = sg * libm::sqrt(-beta / p);
                Ok((d - alpha * mu.eval(x)) / beta)
            }
            LagrangianFamily::TrialLogarithmic { gamma, delta, mu } => Ok(1.0 / p - gamma * mu.eval(x) / delta),
            LagrangianFamily::GeneralizedReciprocal { .. } => {
                Err(Error::UnsupportedFamily("generalized reciprocal has no closed-form branches"))
            }
            LagrangianFamily::QuarticVelocity { kappa } => {
                let vc = libm::sqrt(kappa / 3.0);
                let bound = 1.0 + kappa.max(p.abs());
                Ok(match branch.id {
                    0 => cubic_branch(*kappa, p, -bound, -vc, true),
                    1 => cubic_branch(*kappa, p, -vc, vc, false),
                    _ => cubic_branch(*kappa, p, vc, bound, true),
                })
            }
            LagrangianFamily::CzPower { k, .. } => {
                let s = 0.25 * libm::pow(p, -(2.0 * *k as f64 + 1.0) / 2.0);
                Ok(1.0 - sg * s)
            }
            LagrangianFamily::CzVelocityPotential { lambda, delta, .. } => {
                let g = vdp_gamma(*delta) * libm::pow(p + lambda, -1.5);
                Ok(1.0 - sg * g)
            }
            LagrangianFamily::HigherPower { m, delta, sigma } => {
                let s = sg * libm::sqrt(-p);
                let ex = HigherPowerExponents::new(*m)?;
                Ok(-sigma.eval(x) + delta * rpow_real(s, ex.minus)?)
            }
            LagrangianFamily::ReciprocalShifted { s, lambda } => {
                let c = s * x * x / 3.0 + 3.0 * lambda / s;
                Ok(c + sg / libm::sqrt(s * p))
            }
        },
    }
}

/// Hamiltonian of `branch` in closed form, derived independently of the
/// numeric Legendre transform. `None` when no closed form is known.
pub(crate) fn closed_form_h(model: &LagrangianModel, branch: &Branch, x: f64, p: f64) -> Option<Result<f64>> {
    if !branch.domain.contains(p) {
        return Some(Err(outside(branch, p)));
    }
    let sg = branch.sign.factor();
    let h = match model {
        LagrangianModel::Lienard(lag) => {
            // H = p W + (l+1)/(2l+1) p b(p)
            let l = lag.ell().value();
            let b = match branch_velocity(model, branch, x, p) {
                Ok(v) => v - lag.w().eval(x),
                Err(e) => return Some(Err(e)),
            };
            p * lag.w().eval(x) + (l + 1.0) / (2.0 * l + 1.0) * p * b
        }
        LagrangianModel::Family(fam) => match fam {
            LagrangianFamily::TrialReciprocal { alpha, beta, mu } => {
                let d = sg * libm::sqrt(-beta / p);
                -2.0 / d - alpha * mu.eval(x) * p / beta
            }
            LagrangianFamily::TrialLogarithmic { gamma, delta, mu } => {
                1.0 - gamma * mu.eval(x) * p / delta - libm::log(delta / p)
            }
            LagrangianFamily::GeneralizedReciprocal { .. } => return None,
            LagrangianFamily::QuarticVelocity { kappa } => {
                let v = match branch_velocity(model, branch, x, p) {
                    Ok(v) => v,
                    Err(e) => return Some(Err(e)),
                };
                0.75 * v * v * v * v - 0.5 * kappa * v * v
            }
            LagrangianFamily::CzPower { k, potential } => {
                let k = *k as f64;
                p + sg / (4.0 * k - 2.0) * libm::pow(p, -(2.0 * k - 1.0) / 2.0) + potential.eval(x)
            }
            LagrangianFamily::CzVelocityPotential { lambda, delta, potential } => {
                let s = p + lambda;
                s + sg * 2.0 * vdp_gamma(*delta) / libm::sqrt(s) + potential.eval(x)
            }
            LagrangianFamily::HigherPower { m, delta, sigma } => {
                let s = sg * libm::sqrt(-p);
                let ex = match HigherPowerExponents::new(*m) {
                    Ok(e) => e,
                    Err(e) => return Some(Err(e)),
                };
                let t = match rpow_real(s, ex.plus) {
                    Ok(t) => t,
                    Err(e) => return Some(Err(e)),
                };
                -p * sigma.eval(x) - 2.0 * delta / ex.plus.as_f64() * t + delta
            }
            LagrangianFamily::ReciprocalShifted { s, lambda } => {
                let c = s * x * x / 3.0 + 3.0 * lambda / s;
                p * c + sg * s.signum() * 2.0 * libm::sqrt(p / s)
            }
        },
    };
    Some(Ok(h))
}

/// All real velocities of the generalized reciprocal family at `(x, p)`:
/// roots of `p (alpha mu + beta rho(v))^2 + beta rho'(v) = 0`.
pub(crate) fn generalized_velocities(alpha: f64, beta: f64, mu: &Poly, rho: &Poly, x: f64, p: f64) -> Result<Vec<f64>> {
    let d = &Poly::constant(alpha * mu.eval(x)) + &rho.scale(beta);
    let eq = &(&d * &d).scale(p) + &rho.derivative().scale(beta);
    if eq.is_zero() {
        return Err(Error::domain(format!("momentum equation vanishes identically at p = {p}")));
    }
    let lead = eq.leading();
    let bound = 1.0 + eq.coeffs()[..eq.coeffs().len() - 1].iter().fold(0.0_f64, |m, c| m.max((c / lead).abs()));
    let roots = poly_real_roots(&eq, -bound, bound, 1e-13)?;
    Ok(roots.into_iter().map(|r| r.value).filter(|&v| d.eval(v) != 0.0).collect())
}
