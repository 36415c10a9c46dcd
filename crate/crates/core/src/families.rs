//! Closed-form nonstandard Lagrangian families.
//!
//! Every family exposes its value and analytic partials through the
//! [`Lagrangian`] trait. [`Lagrangian::dv`] is the chain-rule derivative of
//! the Lagrangian as written, while [`Lagrangian::momentum`] evaluates the
//! canonical momentum in its simplified closed form; the two are computed
//! independently and cross-checked in the tests.

use alloc::format;
use alloc::vec::Vec;

use crate::numerics::{central_diff_series, rpow_real, Poly, RationalExponent};
use crate::trajectory::{Side, Trajectory};
use crate::{Error, Result};

/// A Lagrangian `L(x, v)` together with its first and second partials.
pub trait Lagrangian {
    fn value(&self, x: f64, v: f64) -> Result<f64>;
    /// `dL/dv`.
    fn dv(&self, x: f64, v: f64) -> Result<f64>;
    /// `dL/dx`.
    fn dx(&self, x: f64, v: f64) -> Result<f64>;
    /// `d^2L/dv^2`.
    fn dvv(&self, x: f64, v: f64) -> Result<f64>;
    /// Canonical momentum `p = dL/dv` in closed form.
    fn momentum(&self, x: f64, v: f64) -> Result<f64> {
        self.dv(x, v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LagrangianFamily {
    /// `1 / (alpha mu(x) + beta v)`.
    TrialReciprocal { alpha: f64, beta: f64, mu: Poly },
    /// `ln(gamma mu(x) + delta v)`.
    TrialLogarithmic { gamma: f64, delta: f64, mu: Poly },
    /// `1 / (alpha mu(x) + beta rho(v))`.
    GeneralizedReciprocal { alpha: f64, beta: f64, mu: Poly, rho: Poly },
    /// `v^4 / 4 - kappa v^2 / 2`.
    QuarticVelocity { kappa: f64 },
    /// `C (v - 1)^((2k-1)/(2k+1)) - V(x)`, `C = (2k+1)/(2k-1) (1/4)^(2/(2k+1))`.
    CzPower { k: u32, potential: Poly },
    /// `3 (1/4)^(2/3) (v - 1)^(1/3) - U(v) - V(x)` with
    /// `U(v) = lambda v + 3 delta (v - 1)^(1/3)`.
    CzVelocityPotential { lambda: f64, delta: f64, potential: Poly },
    /// `Lambda (v + sigma(x))^((2m+1)/(2m-1)) - delta`,
    /// `Lambda = (1-2m)/(1+2m) delta^(2/(1-2m))`.
    HigherPower { m: RationalExponent, delta: f64, sigma: Poly },
    /// `(1/s) (s x^2 / 3 + 3 lambda / s - v)^-1`.
    ReciprocalShifted { s: f64, lambda: f64 },
}

/// `C = (2k+1)/(2k-1) (1/4)^(2/(2k+1))`.
pub fn cz_constant(k: u32) -> f64 {
    let k = k as f64;
    (2.0 * k + 1.0) / (2.0 * k - 1.0) * libm::pow(0.25, 2.0 / (2.0 * k + 1.0))
}

/// `4^(-2/3)`, the kinetic prefactor scale of the velocity-potential model.
pub fn quarter_two_thirds() -> f64 {
    libm::pow(0.25, 2.0 / 3.0)
}

/// `mu = 4^(-2/3) - delta`.
pub fn vdp_mu(delta: f64) -> f64 {
    quarter_two_thirds() - delta
}

/// `gamma = mu^(3/2)`.
pub fn vdp_gamma(delta: f64) -> f64 {
    libm::pow(vdp_mu(delta), 1.5)
}

/// `Lambda = (1-2m)/(1+2m) delta^(2/(1-2m))`; also the prefactor of the
/// higher-power Lagrangian.
pub fn higher_power_lambda(m: f64, delta: f64) -> f64 {
    (1.0 - 2.0 * m) / (1.0 + 2.0 * m) * libm::pow(delta, 2.0 / (1.0 - 2.0 * m))
}

/// Exponents of the higher-power family for `m = a/b`, `b` odd.
#[derive(Debug, Clone, Copy)]
pub(crate) struct HigherPowerExponents {
    /// `(2m+1)/(2m-1)`
    pub n: RationalExponent,
    /// `n - 1 = 2/(2m-1)`
    pub n1: RationalExponent,
    /// `n - 2 = (3-2m)/(2m-1)`
    pub n2: RationalExponent,
    /// `2m - 1`
    pub minus: RationalExponent,
    /// `2m + 1`
    pub plus: RationalExponent,
}

impl HigherPowerExponents {
    pub(crate) fn new(m: RationalExponent) -> Result<Self> {
        let (a, b) = (m.num(), m.den());
        Ok(HigherPowerExponents {
            n: RationalExponent::new(2 * a + b, 2 * a - b)?,
            n1: RationalExponent::new(2 * b, 2 * a - b)?,
            n2: RationalExponent::new(3 * b - 2 * a, 2 * a - b)?,
            minus: RationalExponent::new(2 * a - b, b)?,
            plus: RationalExponent::new(2 * a + b, b)?,
        })
    }
}

fn nonzero(value: f64, what: &str) -> Result<f64> {
    if value == 0.0 || !value.is_finite() {
        Err(Error::domain(format!("{what} = {value}")))
    } else {
        Ok(value)
    }
}

fn cz_exponents(k: u32) -> Result<(RationalExponent, RationalExponent, RationalExponent)> {
    let k = k as i64;
    Ok((
        RationalExponent::new(2 * k - 1, 2 * k + 1)?,
        RationalExponent::new(-2, 2 * k + 1)?,
        RationalExponent::new(-(2 * k + 3), 2 * k + 1)?,
    ))
}

fn at_kink(v: f64) -> Result<f64> {
    nonzero(v - 1.0, "v - 1")
}

impl LagrangianFamily {
    /// Checks the parameter restrictions of the family.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        match self {
            LagrangianFamily::TrialReciprocal { alpha, beta, .. }
            | LagrangianFamily::GeneralizedReciprocal { alpha, beta, .. } => {
                if !(alpha * beta != 0.0 && (alpha * beta).is_finite()) {
                    return bad("alpha * beta must be nonzero");
                }
            }
            LagrangianFamily::TrialLogarithmic { gamma, delta, .. } => {
                if !(gamma * delta != 0.0 && (gamma * delta).is_finite()) {
                    return bad("gamma * delta must be nonzero");
                }
            }
            LagrangianFamily::QuarticVelocity { kappa } => {
                if !(*kappa > 0.0 && kappa.is_finite()) {
                    return bad("kappa must be positive");
                }
            }
            LagrangianFamily::CzPower { k, .. } => {
                if *k == 0 {
                    return bad("k must be a positive integer");
                }
            }
            LagrangianFamily::CzVelocityPotential { lambda, delta, .. } => {
                if !(*lambda >= 0.0) {
                    return bad("lambda must be non-negative");
                }
                if !(vdp_mu(*delta) > 0.0) {
                    return bad("delta must be below 4^(-2/3)");
                }
            }
            LagrangianFamily::HigherPower { m, delta, .. } => {
                let mf = m.as_f64();
                if !(0.0..0.5).contains(&mf) {
                    return bad("m must lie in [0, 1/2)");
                }
                if !(*delta > 0.0 && delta.is_finite()) {
                    return bad("delta must be positive");
                }
            }
            LagrangianFamily::ReciprocalShifted { s, lambda } => {
                if !(*s != 0.0 && s.is_finite() && lambda.is_finite()) {
                    return bad("s must be nonzero");
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            LagrangianFamily::TrialReciprocal { .. } => "trial_reciprocal",
            LagrangianFamily::TrialLogarithmic { .. } => "trial_logarithmic",
            LagrangianFamily::GeneralizedReciprocal { .. } => "generalized_reciprocal",
            LagrangianFamily::QuarticVelocity { .. } => "quartic_velocity",
            LagrangianFamily::CzPower { .. } => "cz_power",
            LagrangianFamily::CzVelocityPotential { .. } => "cz_velocity_potential",
            LagrangianFamily::HigherPower { .. } => "higher_power",
            LagrangianFamily::ReciprocalShifted { .. } => "reciprocal_shifted",
        }
    }

    /// The `m = 0` higher-power model with `sigma(x) = lambda x^2 / 2 +
    /// 9 lambda^2 / (2 k^2)` and `delta = 9 lambda^2 / (2 k^2)`, whose
    /// Hamiltonian (after `p -> 2k p / (3 lambda) - 1`) describes a nonlinear
    /// Lienard system.
    pub fn higher_power_lienard(lambda: f64, k: f64) -> Result<Self> {
        if !(lambda > 0.0) || k == 0.0 || !k.is_finite() {
            return Err(Error::InvalidParameter("need lambda > 0 and k != 0".into()));
        }
        let delta = 9.0 * lambda * lambda / (2.0 * k * k);
        let fam = LagrangianFamily::HigherPower {
            m: RationalExponent::integer(0),
            delta,
            sigma: Poly::new(alloc::vec![delta, 0.0, 0.5 * lambda]),
        };
        fam.validate()?;
        Ok(fam)
    }

    /// Prefactor `Lambda` of the higher-power family.
    pub fn higher_power_prefactor(&self) -> Option<f64> {
        match self {
            LagrangianFamily::HigherPower { m, delta, .. } => Some(higher_power_lambda(m.as_f64(), *delta)),
            _ => None,
        }
    }

    fn reciprocal_denominator(&self, x: f64, v: f64) -> Result<f64> {
        match self {
            LagrangianFamily::TrialReciprocal { alpha, beta, mu } => {
                nonzero(alpha * mu.eval(x) + beta * v, "alpha*mu(x) + beta*v")
            }
            LagrangianFamily::GeneralizedReciprocal { alpha, beta, mu, rho } => {
                nonzero(alpha * mu.eval(x) + beta * rho.eval(v), "alpha*mu(x) + beta*rho(v)")
            }
            LagrangianFamily::TrialLogarithmic { gamma, delta, mu } => {
                let d = gamma * mu.eval(x) + delta * v;
                if d > 0.0 {
                    Ok(d)
                } else {
                    Err(Error::domain(format!("log argument gamma*mu(x) + delta*v = {d}")))
                }
            }
            LagrangianFamily::ReciprocalShifted { s, lambda } => {
                nonzero(s * x * x / 3.0 + 3.0 * lambda / s - v, "s x^2/3 + 3 lambda/s - v")
            }
            LagrangianFamily::HigherPower { sigma, .. } => nonzero(v + sigma.eval(x), "v + sigma(x)"),
            _ => unreachable!("family has no denominator"),
        }
    }
}

impl Lagrangian for LagrangianFamily {
    fn value(&self, x: f64, v: f64) -> Result<f64> {
        match self {
            LagrangianFamily::TrialReciprocal { .. } | LagrangianFamily::GeneralizedReciprocal { .. } => {
                Ok(1.0 / self.reciprocal_denominator(x, v)?)
            }
            LagrangianFamily::TrialLogarithmic { .. } => Ok(libm::log(self.reciprocal_denominator(x, v)?)),
            LagrangianFamily::QuarticVelocity { kappa } => Ok(0.25 * v * v * v * v - 0.5 * kappa * v * v),
            LagrangianFamily::CzPower { k, potential } => {
                let (e, _, _) = cz_exponents(*k)?;
                Ok(cz_constant(*k) * rpow_real(v - 1.0, e)? - potential.eval(x))
            }
            LagrangianFamily::CzVelocityPotential { lambda, delta, potential } => {
                let cbrt = libm::cbrt(v - 1.0);
                let u = lambda * v + 3.0 * delta * cbrt;
                Ok(3.0 * quarter_two_thirds() * cbrt - u - potential.eval(x))
            }
            LagrangianFamily::HigherPower { m, delta, .. } => {
                let w = self.reciprocal_denominator(x, v)?;
                let ex = HigherPowerExponents::new(*m)?;
                Ok(higher_power_lambda(m.as_f64(), *delta) * rpow_real(w, ex.n)? - delta)
            }
            LagrangianFamily::ReciprocalShifted { s, .. } => Ok(1.0 / (s * self.reciprocal_denominator(x, v)?)),
        }
    }

    fn dv(&self, x: f64, v: f64) -> Result<f64> {
        match self {
            LagrangianFamily::TrialReciprocal { beta, .. } => {
                let d = self.reciprocal_denominator(x, v)?;
                Ok(-beta / (d * d))
            }
            LagrangianFamily::GeneralizedReciprocal { beta, rho, .. } => {
                let d = self.reciprocal_denominator(x, v)?;
                Ok(-beta * rho.derivative().eval(v) / (d * d))
            }
            LagrangianFamily::TrialLogarithmic { delta, .. } => Ok(delta / self.reciprocal_denominator(x, v)?),
            LagrangianFamily::QuarticVelocity { kappa } => Ok(v * (v * v - kappa)),
            LagrangianFamily::CzPower { k, .. } => {
                let (e, e1, _) = cz_exponents(*k)?;
                Ok(cz_constant(*k) * e.as_f64() * rpow_real(at_kink(v)?, e1)?)
            }
            LagrangianFamily::CzVelocityPotential { lambda, delta, .. } => {
                let r = rpow_real(at_kink(v)?, RationalExponent::new(-2, 3)?)?;
                Ok(quarter_two_thirds() * r - (lambda + delta * r))
            }
            LagrangianFamily::HigherPower { m, delta, .. } => {
                let w = self.reciprocal_denominator(x, v)?;
                let ex = HigherPowerExponents::new(*m)?;
                let lam = higher_power_lambda(m.as_f64(), *delta);
                Ok(lam * ex.n.as_f64() * rpow_real(w, ex.n1)?)
            }
            LagrangianFamily::ReciprocalShifted { s, .. } => {
                let w = self.reciprocal_denominator(x, v)?;
                Ok(1.0 / (s * w * w))
            }
        }
    }

    fn momentum(&self, x: f64, v: f64) -> Result<f64> {
        match self {
            LagrangianFamily::QuarticVelocity { kappa } => Ok(v * v * v - kappa * v),
            LagrangianFamily::CzPower { k, .. } => {
                let k = *k as i64;
                let denom = rpow_real(at_kink(v)?, RationalExponent::new(2, 2 * k + 1)?)?;
                Ok(libm::pow(0.25, 2.0 / (2 * k + 1) as f64) / denom)
            }
            LagrangianFamily::CzVelocityPotential { lambda, delta, .. } => {
                let r = rpow_real(at_kink(v)?, RationalExponent::new(-2, 3)?)?;
                Ok(vdp_mu(*delta) * r - lambda)
            }
            LagrangianFamily::HigherPower { m, delta, .. } => {
                let w = self.reciprocal_denominator(x, v)?;
                let ex = HigherPowerExponents::new(*m)?;
                let scale = libm::pow(*delta, 2.0 / (1.0 - 2.0 * m.as_f64()));
                Ok(-scale * rpow_real(w, ex.n1)?)
            }
            LagrangianFamily::ReciprocalShifted { s, .. } => {
                let w = self.reciprocal_denominator(x, v)?;
                Ok(libm::pow(w, -2.0) / s)
            }
            LagrangianFamily::TrialReciprocal { beta, .. } => {
                let d = self.reciprocal_denominator(x, v)?;
                Ok(-beta * libm::pow(d, -2.0))
            }
            LagrangianFamily::TrialLogarithmic { .. } | LagrangianFamily::GeneralizedReciprocal { .. } => self.dv(x, v),
        }
    }

    fn dx(&self, x: f64, v: f64) -> Result<f64> {
        match self {
            LagrangianFamily::TrialReciprocal { alpha, mu, .. }
            | LagrangianFamily::GeneralizedReciprocal { alpha, mu, .. } => {
                let d = self.reciprocal_denominator(x, v)?;
                Ok(-alpha * mu.derivative().eval(x) / (d * d))
            }
            LagrangianFamily::TrialLogarithmic { gamma, mu, .. } => {
                Ok(gamma * mu.derivative().eval(x) / self.reciprocal_denominator(x, v)?)
            }
            LagrangianFamily::QuarticVelocity { .. } => Ok(0.0),
            LagrangianFamily::CzPower { potential, .. } | LagrangianFamily::CzVelocityPotential { potential, .. } => {
                Ok(-potential.derivative().eval(x))
            }
            LagrangianFamily::HigherPower { sigma, .. } => Ok(self.dv(x, v)? * sigma.derivative().eval(x)),
            LagrangianFamily::ReciprocalShifted { .. } => {
                let w = self.reciprocal_denominator(x, v)?;
                Ok(-(2.0 * x / 3.0) / (w * w))
            }
        }
    }

    fn dvv(&self, x: f64, v: f64) -> Result<f64> {
        match self {
            LagrangianFamily::TrialReciprocal { beta, .. } => {
                let d = self.reciprocal_denominator(x, v)?;
                Ok(2.0 * beta * beta / (d * d * d))
            }
            LagrangianFamily::GeneralizedReciprocal { beta, rho, .. } => {
                let d = self.reciprocal_denominator(x, v)?;
                let r1 = rho.derivative().eval(v);
                let r2 = rho.derivative().derivative().eval(v);
                Ok(beta * (2.0 * beta * r1 * r1 - r2 * d) / (d * d * d))
            }
            LagrangianFamily::TrialLogarithmic { delta, .. } => {
                let d = self.reciprocal_denominator(x, v)?;
                Ok(-delta * delta / (d * d))
            }
            LagrangianFamily::QuarticVelocity { kappa } => Ok(3.0 * v * v - kappa),
            LagrangianFamily::CzPower { k, .. } => {
                let (e, e1, e2) = cz_exponents(*k)?;
                Ok(cz_constant(*k) * e.as_f64() * e1.as_f64() * rpow_real(at_kink(v)?, e2)?)
            }
            LagrangianFamily::CzVelocityPotential { delta, .. } => {
                let r = rpow_real(at_kink(v)?, RationalExponent::new(-5, 3)?)?;
                Ok(-2.0 / 3.0 * (quarter_two_thirds() - delta) * r)
            }
            LagrangianFamily::HigherPower { m, delta, .. } => {
                let w = self.reciprocal_denominator(x, v)?;
                let ex = HigherPowerExponents::new(*m)?;
                let lam = higher_power_lambda(m.as_f64(), *delta);
                Ok(lam * ex.n.as_f64() * ex.n1.as_f64() * rpow_real(w, ex.n2)?)
            }
            LagrangianFamily::ReciprocalShifted { s, .. } => {
                let w = self.reciprocal_denominator(x, v)?;
                Ok(2.0 / (s * w * w * w))
            }
        }
    }
}

/// Coefficients of the equation of motion produced by a trial Lagrangian.
#[derive(Debug, Clone, PartialEq)]
pub enum ElCoefficients {
    /// `x'' + f(x) x' + g(x) = 0`.
    Positional { f: Poly, g: Poly },
    /// `x'' + A(x, x') x' + B(x, x') = 0`.
    VelocityDependent(VelocityCoefficients),
}

/// `A` and `B` of the generalized reciprocal Lagrangian.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub mu: Poly,
    pub rho: Poly,
}

impl VelocityCoefficients {
    /// Common denominator `2 beta^2 rho'^2 - beta rho'' (alpha mu + beta rho)`.
    fn denominator(&self, x: f64, v: f64) -> Result<(f64, f64)> {
        let r1 = self.rho.derivative().eval(v);
        let r2 = self.rho.derivative().derivative().eval(v);
        let d = self.alpha * self.mu.eval(x) + self.beta * self.rho.eval(v);
        let den = 2.0 * self.beta * self.beta * r1 * r1 - self.beta * r2 * d;
        if den == 0.0 {
            return Err(Error::DegenerateFamily(format!(
                "beta rho''(v) [alpha mu + beta rho] = 2 beta^2 rho'(v)^2 at (x, v) = ({x}, {v})"
            )));
        }
        Ok((den, d))
    }

    pub fn a(&self, x: f64, v: f64) -> Result<f64> {
        let (den, _) = self.denominator(x, v)?;
        let r1 = self.rho.derivative().eval(v);
        Ok(2.0 * self.alpha * self.beta * r1 * self.mu.derivative().eval(x) / den)
    }

    pub fn b(&self, x: f64, v: f64) -> Result<f64> {
        let (den, d) = self.denominator(x, v)?;
        Ok(self.alpha * self.mu.derivative().eval(x) * d / den)
    }
}

impl ElCoefficients {
    /// `x''` implied by the equation of motion at `(x, v)`.
    pub fn acceleration(&self, x: f64, v: f64) -> Result<f64> {
        match self {
            ElCoefficients::Positional { f, g } => Ok(-f.eval(x) * v - g.eval(x)),
            ElCoefficients::VelocityDependent(c) => Ok(-c.a(x, v)? * v - c.b(x, v)?),
        }
    }
}

/// Equation-of-motion coefficients for the three trial families.
pub fn euler_lagrange_coeffs(fam: &LagrangianFamily) -> Result<ElCoefficients> {
    fam.validate()?;
    match fam {
        LagrangianFamily::TrialReciprocal { alpha, beta, mu } => {
            let dmu = mu.derivative();
            Ok(ElCoefficients::Positional {
                f: dmu.scale(3.0 * alpha / (2.0 * beta)),
                g: (mu * &dmu).scale(alpha * alpha / (2.0 * beta * beta)),
            })
        }
        LagrangianFamily::TrialLogarithmic { gamma, delta, mu } => {
            let dmu = mu.derivative();
            Ok(ElCoefficients::Positional {
                f: dmu.scale(2.0 * gamma / delta),
                g: (mu * &dmu).scale(gamma * gamma / (delta * delta)),
            })
        }
        LagrangianFamily::GeneralizedReciprocal { alpha, beta, mu, rho } => {
            if rho.degree().unwrap_or(0) == 0 {
                return Err(Error::DegenerateFamily("rho is constant".into()));
            }
            Ok(ElCoefficients::VelocityDependent(VelocityCoefficients {
                alpha: *alpha,
                beta: *beta,
                mu: mu.clone(),
                rho: rho.clone(),
            }))
        }
        _ => Err(Error::UnsupportedFamily("euler_lagrange_coeffs needs a trial family")),
    }
}

/// Euler-Lagrange residual `d/dt(dL/dv) - dL/dx` along a sampled path.
#[derive(Debug, Clone, PartialEq)]
pub struct ElResidual {
    /// Interior sample times (endpoints excluded).
    pub times: Vec<f64>,
    pub residual: Vec<f64>,
    pub max_abs: f64,
}

pub fn el_residual<L: Lagrangian + ?Sized>(lag: &L, traj: &Trajectory) -> Result<ElResidual> {
    if traj.side != Side::Lagrangian {
        return Err(Error::InvalidParameter("el_residual needs an (x, v) trajectory".into()));
    }
    if traj.len() < 3 {
        return Err(Error::TooFewSamples(traj.len()));
    }
    let momenta = traj.states.iter().map(|&[x, v]| lag.dv(x, v)).collect::<Result<Vec<_>>>()?;
    let dp = central_diff_series(&momenta, traj.dt);
    let mut residual = Vec::with_capacity(dp.len());
    for (i, dpi) in dp.iter().enumerate() {
        let [x, v] = traj.states[i + 1];
        residual.push(dpi - lag.dx(x, v)?);
    }
    let max_abs = residual.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    Ok(ElResidual { times: traj.times[1..traj.len() - 1].to_vec(), residual, max_abs })
}
