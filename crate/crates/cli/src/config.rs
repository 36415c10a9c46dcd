//! JSON run configuration.
//!
//! Polynomials are ascending coefficient arrays, `[c0, c1, ...]`. Rational
//! parameters accept either a number or a `"p/q"` string.

use std::io::Read;
use std::path::Path;

use nsl_core::lienard::{build_lagrangian, cheillini_solve};
use nsl_core::{BranchedHamiltonian, LagrangianFamily, LagrangianModel, LienardSystem, Poly, RationalExponent};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; when present it must agree with the subcommand being run.
    #[serde(default)]
    pub subcommand: Option<String>,
    #[serde(default)]
    pub system: Option<SystemSpec>,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub sim: Option<SimSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    /// Which Cheillini root to build from. Defaults to the larger one.
    #[serde(default)]
    pub ell: Option<Rational>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    TrialReciprocal {
        alpha: f64,
        beta: f64,
        mu: Vec<f64>,
    },
    TrialLogarithmic {
        gamma: f64,
        delta: f64,
        mu: Vec<f64>,
    },
    GeneralizedReciprocal {
        alpha: f64,
        beta: f64,
        mu: Vec<f64>,
        rho: Vec<f64>,
    },
    QuarticVelocity {
        kappa: f64,
    },
    CzPower {
        k: u32,
        #[serde(default)]
        potential: Vec<f64>,
    },
    CzVelocityPotential {
        lambda: f64,
        delta: f64,
        #[serde(default)]
        potential: Vec<f64>,
    },
    HigherPower {
        m: Rational,
        delta: f64,
        sigma: Vec<f64>,
    },
    ReciprocalShifted {
        s: f64,
        lambda: f64,
    },
    /// Higher-power Lienard Hamiltonian in the translated momentum.
    HigherPowerLienard {
        lambda: f64,
        k: f64,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Rational {
    Number(f64),
    Text(RationalText),
}

#[derive(Debug, Clone, Copy)]
pub struct RationalText(pub i64, pub i64);

impl<'de> Deserialize<'de> for RationalText {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let (n, m) = s.split_once('/').unwrap_or((s.as_str(), "1"));
        let parse = |t: &str| t.trim().parse::<i64>().map_err(serde::de::Error::custom);
        let den = parse(m)?;
        if den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(RationalText(parse(n)?, den))
    }
}

impl Rational {
    pub fn value(self) -> f64 {
        match self {
            Rational::Number(v) => v,
            Rational::Text(RationalText(n, d)) => n as f64 / d as f64,
        }
    }

    fn exponent(self) -> Result<RationalExponent, CliError> {
        match self {
            Rational::Text(RationalText(n, d)) => Ok(RationalExponent::new(n, d)?),
            Rational::Number(v) => RationalExponent::approximate(v, 1000, 1e-12)
                .ok_or_else(|| CliError::config(format!("{v} is not a rational with a small odd denominator"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_range: [f64; 2],
    #[serde(default)]
    pub p_range: Option<[f64; 2]>,
    #[serde(default)]
    pub v_range: Option<[f64; 2]>,
    pub nx: usize,
    #[serde(default, alias = "np")]
    pub n_p: Option<usize>,
    #[serde(default)]
    pub nv: Option<usize>,
}

/// Second axis of a surface grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    Momentum { range: [f64; 2], n: usize },
    Velocity { range: [f64; 2], n: usize },
}

impl GridSpec {
    pub fn axis(&self) -> Result<Axis, CliError> {
        let axis = match (self.p_range, self.v_range) {
            (Some(range), None) => Axis::Momentum { range, n: need(self.n_p, "grid.np")? },
            (None, Some(range)) => Axis::Velocity { range, n: need(self.nv, "grid.nv")? },
            _ => return Err(CliError::config("grid needs exactly one of p_range and v_range")),
        };
        let (Axis::Momentum { range, n } | Axis::Velocity { range, n }) = axis;
        check_range(range, n, "grid")?;
        check_range(self.x_range, self.nx, "grid.x")?;
        Ok(axis)
    }
}

fn need(n: Option<usize>, what: &str) -> Result<usize, CliError> {
    n.ok_or_else(|| CliError::config(format!("missing {what}")))
}

fn check_range(r: [f64; 2], n: usize, what: &str) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::config(format!("{what}: at least 2 grid points are needed")));
    }
    if !(r[0].is_finite() && r[1].is_finite() && r[0] < r[1]) {
        return Err(CliError::config(format!("{what}: range {r:?} must be finite and increasing")));
    }
    Ok(())
}

/// Evenly spaced points including both ends.
pub fn linspace(r: [f64; 2], n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { r[1] } else { r[0] + (r[1] - r[0]) * i as f64 / (n - 1) as f64 }).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    pub x0: f64,
    #[serde(default)]
    pub v0: Option<f64>,
    #[serde(default)]
    pub p0: Option<f64>,
    pub dt: f64,
    #[serde(rename = "T", alias = "t_end")]
    pub t_end: f64,
    #[serde(default, alias = "branch")]
    pub branch_id: usize,
}

/// Initial condition on either side of the Legendre transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Start {
    Velocity(f64),
    Momentum(f64),
}

impl SimSpec {
    pub fn start(&self) -> Result<Start, CliError> {
        if !(self.dt > 0.0 && self.t_end > 0.0) {
            return Err(CliError::config("sim.dt and sim.T must be positive"));
        }
        match (self.v0, self.p0) {
            (Some(v), None) => Ok(Start::Velocity(v)),
            (None, Some(p)) => Ok(Start::Momentum(p)),
            _ => Err(CliError::config("sim needs exactly one of v0 and p0")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Option<Format>,
}

/// What the config describes once parsed into core types.
pub enum Subject {
    System {
        sys: LienardSystem,
        ell: Option<Rational>,
    },
    Family(LagrangianFamily),
    /// A Hamiltonian that is only defined through a momentum map.
    Hamiltonian(Box<BranchedHamiltonian>),
}

impl RunConfig {
    pub fn load(path: &str) -> Result<Self, CliError> {
        let text = if path == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::config(format!("reading stdin: {e}")))?;
            s
        } else {
            std::fs::read_to_string(Path::new(path)).map_err(|e| CliError::config(format!("reading {path}: {e}")))?
        };
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("malformed config: {e}")))
    }

    pub fn check_subcommand(&self, name: &str) -> Result<(), CliError> {
        match &self.subcommand {
            Some(s) if s.replace('_', "-") != name => {
                Err(CliError::config(format!("config is for `{s}`, not `{name}`")))
            }
            _ => Ok(()),
        }
    }

    pub fn subject(&self) -> Result<Subject, CliError> {
        match (&self.system, &self.family) {
            (Some(s), None) => {
                let sys = LienardSystem::new(Poly::new(s.f.clone()), Poly::new(s.g.clone()))?;
                Ok(Subject::System { sys, ell: s.ell })
            }
            (None, Some(f)) => f.build(),
            _ => Err(CliError::config("config needs exactly one of `system` and `family`")),
        }
    }

    pub fn sim(&self) -> Result<&SimSpec, CliError> {
        self.sim.as_ref().ok_or_else(|| CliError::config("missing `sim` block"))
    }

    pub fn grid(&self) -> Result<&GridSpec, CliError> {
        self.grid.as_ref().ok_or_else(|| CliError::config("missing `grid` block"))
    }
}

impl FamilySpec {
    fn build(&self) -> Result<Subject, CliError> {
        let p = |c: &Vec<f64>| Poly::new(c.clone());
        let fam = match self {
            FamilySpec::TrialReciprocal { alpha, beta, mu } => {
                LagrangianFamily::TrialReciprocal { alpha: *alpha, beta: *beta, mu: p(mu) }
            }
            FamilySpec::TrialLogarithmic { gamma, delta, mu } => {
                LagrangianFamily::TrialLogarithmic { gamma: *gamma, delta: *delta, mu: p(mu) }
            }
            FamilySpec::GeneralizedReciprocal { alpha, beta, mu, rho } => {
                LagrangianFamily::GeneralizedReciprocal { alpha: *alpha, beta: *beta, mu: p(mu), rho: p(rho) }
            }
            FamilySpec::QuarticVelocity { kappa } => LagrangianFamily::QuarticVelocity { kappa: *kappa },
            FamilySpec::CzPower { k, potential } => LagrangianFamily::CzPower { k: *k, potential: p(potential) },
            FamilySpec::CzVelocityPotential { lambda, delta, potential } => {
                LagrangianFamily::CzVelocityPotential { lambda: *lambda, delta: *delta, potential: p(potential) }
            }
            FamilySpec::HigherPower { m, delta, sigma } => {
                LagrangianFamily::HigherPower { m: m.exponent()?, delta: *delta, sigma: p(sigma) }
            }
            FamilySpec::ReciprocalShifted { s, lambda } => {
                LagrangianFamily::ReciprocalShifted { s: *s, lambda: *lambda }
            }
            FamilySpec::HigherPowerLienard { lambda, k } => {
                return Ok(Subject::Hamiltonian(Box::new(BranchedHamiltonian::higher_power_lienard(*lambda, *k)?)));
            }
        };
        fam.validate()?;
        Ok(Subject::Family(fam))
    }
}

impl Subject {
    /// The Lagrangian behind the subject. Systems go through the Cheillini
    /// construction, which fails with exit code 3 when no root exists.
    pub fn model(&self) -> Result<LagrangianModel, CliError> {
        match self {
            Subject::System { sys, ell } => {
                let sols = cheillini_solve(sys)?;
                let sol = match ell {
                    None => sols.first(),
                    Some(want) => sols.iter().find(|s| (s.ell.value() - want.value()).abs() < 1e-9),
                };
                let Some(sol) = sol else {
                    return Err(match ell {
                        None => CliError::no_cheillini(),
                        Some(w) => {
                            CliError::config(format!("l = {} is not a Cheillini root of this system", w.value()))
                        }
                    });
                };
                Ok(build_lagrangian(sys, sol)?.into())
            }
            Subject::Family(f) => Ok(f.clone().into()),
            Subject::Hamiltonian(bh) => Ok(bh.model().clone()),
        }
    }

    pub fn hamiltonian(&self) -> Result<BranchedHamiltonian, CliError> {
        match self {
            Subject::Hamiltonian(bh) => Ok((**bh).clone()),
            _ => Ok(nsl_core::legendre::hamiltonian_branches(self.model()?)?),
        }
    }
}
