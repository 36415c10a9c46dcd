//! The `verify` suite: every module's invariants, run against seeded random
//! sweeps and the worked examples.

use std::time::Instant;

use nsl_core::dynamics::{
    conservation_report, consistency_check, integrate_first_order, integrate_hamilton, integrate_lienard,
    max_position_gap, to_velocity_side,
};
use nsl_core::families::{el_residual, euler_lagrange_coeffs};
use nsl_core::legendre::{
    coalescence_points, hamiltonian_branches, invert_momentum, legendre_identity_check, momentum_mass_decompose,
    quartic_critical_momentum,
};
use nsl_core::lienard::{build_lagrangian, cheillini_construct_g, cheillini_solve, first_order_form};
use nsl_core::numerics::{integrate_ode_unbounded, poly_real_roots, rpow_real, OdeSpec};
use nsl_core::{
    BranchedHamiltonian, ElCoefficients, Lagrangian, LagrangianFamily, LagrangianModel, LienardSystem, Poly,
    RationalExponent,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const MODULES: [&str; 5] = ["numerics", "families", "lienard", "legendre", "dynamics"];

/// Deliberate defects for checking that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Negates the Lienard Hamiltonian in the Legendre identity check.
    LienardHSign,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed error, compared against `tolerance`.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
    pub millis: u128,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

struct Outcome {
    value: f64,
    tolerance: f64,
    detail: String,
}

impl Outcome {
    fn below(value: f64, tolerance: f64) -> Self {
        Outcome { value, tolerance, detail: String::new() }
    }

    fn with(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

type CheckFn = fn(&mut ChaCha8Rng, Option<Fault>) -> Outcome;

const CHECKS: &[(&str, &str, CheckFn)] = &[
    ("numerics", "root_residual", root_residual),
    ("numerics", "rational_power_inverse", rational_power_inverse),
    ("numerics", "rk4_fourth_order", rk4_fourth_order),
    ("families", "momentum_matches_fd", momentum_matches_fd),
    ("families", "trial_el_coefficients", trial_el_coefficients),
    ("families", "el_residual_damped", el_residual_damped),
    ("families", "cz_spot_values", cz_spot_values),
    ("lienard", "cheillini_example", cheillini_example),
    ("lienard", "cheillini_round_trip", cheillini_round_trip),
    ("lienard", "van_der_pol_has_no_solution", van_der_pol_has_no_solution),
    ("lienard", "last_multiplier", last_multiplier),
    ("legendre", "worked_hamiltonians", worked_hamiltonians),
    ("legendre", "legendre_identity", legendre_identity),
    ("legendre", "inversion_round_trip", inversion_round_trip),
    ("legendre", "quartic_branch_count", quartic_branch_count),
    ("legendre", "mass_reconstruction", mass_reconstruction),
    ("dynamics", "flow_equivalence", flow_equivalence),
    ("dynamics", "dissipation", dissipation),
];

pub fn run_suite(seed: u64, only: Option<&str>, fault: Option<Fault>) -> SuiteReport {
    let checks: Vec<CheckResult> = CHECKS
        .par_iter()
        .enumerate()
        .filter(|(_, (module, _, _))| only.is_none_or(|m| m == *module))
        .map(|(i, &(module, name, f))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let t0 = Instant::now();
            let o = f(&mut rng, fault);
            CheckResult {
                module,
                name,
                passed: o.value <= o.tolerance,
                value: o.value,
                tolerance: o.tolerance,
                detail: o.detail,
                millis: t0.elapsed().as_millis(),
            }
        })
        .collect();
    SuiteReport { seed, passed: checks.iter().all(|c| c.passed), checks }
}

fn cubic_system() -> LienardSystem {
    LienardSystem::new(Poly::x(), Poly::new(vec![0.0, 1.0, 0.0, -1.0])).expect("valid system")
}

fn lienard_model(ell: f64) -> LagrangianModel {
    let sys = cubic_system();
    let sol = cheillini_solve(&sys)
        .expect("monomial damping")
        .into_iter()
        .find(|s| s.ell.value() == ell)
        .expect("worked example root");
    build_lagrangian(&sys, &sol).expect("regular root").into()
}

fn sym(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let m = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        -m
    } else {
        m
    }
}

/// A catalog model and a point well inside its domain.
type Sampler = fn(&mut ChaCha8Rng) -> (f64, f64);

fn catalog() -> Vec<(LagrangianModel, Sampler)> {
    let sigma = Poly::new(vec![0.2, 0.0, 1.0]);
    vec![
        (LagrangianFamily::TrialReciprocal { alpha: 1.0, beta: 1.0, mu: Poly::x() }.into(), |r| {
            let x = r.gen_range(-1.5..1.5);
            (x, sym(r, 0.2, 3.0) - x)
        }),
        (
            LagrangianFamily::TrialLogarithmic { gamma: 0.5, delta: 2.0, mu: Poly::new(vec![1.0, 0.0, 1.0]) }.into(),
            |r| {
                let x: f64 = r.gen_range(-1.5..1.5);
                (x, (r.gen_range(0.2..3.0) - 0.5 * (1.0 + x * x)) / 2.0)
            },
        ),
        (
            LagrangianFamily::GeneralizedReciprocal {
                alpha: 1.0,
                beta: 1.0,
                mu: Poly::new(vec![3.0, 1.0]),
                rho: Poly::new(vec![0.0, 1.0, 0.5]),
            }
            .into(),
            |r| (r.gen_range(-1.5..1.5), r.gen_range(-2.0..2.0)),
        ),
        (LagrangianFamily::QuarticVelocity { kappa: 1.7 }.into(), |r| (r.gen_range(-1.5..1.5), r.gen_range(-3.0..3.0))),
        (LagrangianFamily::CzPower { k: 1, potential: Poly::monomial(1.0, 2) }.into(), |r| {
            (r.gen_range(-1.5..1.5), 1.0 + sym(r, 0.1, 3.0))
        }),
        (LagrangianFamily::CzPower { k: 3, potential: Poly::x() }.into(), |r| {
            (r.gen_range(-1.5..1.5), 1.0 + sym(r, 0.1, 3.0))
        }),
        (
            LagrangianFamily::CzVelocityPotential { lambda: 0.4, delta: 0.1, potential: Poly::monomial(0.5, 2) }.into(),
            |r| (r.gen_range(-1.5..1.5), 1.0 + sym(r, 0.1, 3.0)),
        ),
        (
            LagrangianFamily::HigherPower {
                m: RationalExponent::new(1, 5).expect("odd denominator"),
                delta: 1.2,
                sigma,
            }
            .into(),
            |r| {
                let x: f64 = r.gen_range(-1.5..1.5);
                (x, sym(r, 0.1, 3.0) - 0.2 - x * x)
            },
        ),
        (LagrangianFamily::ReciprocalShifted { s: 0.8, lambda: 0.3 }.into(), |r| {
            let x: f64 = r.gen_range(-1.5..1.5);
            (x, 0.8 * x * x / 3.0 + 0.9 / 0.8 - sym(r, 0.2, 3.0))
        }),
        (LagrangianFamily::ReciprocalShifted { s: -1.2, lambda: 0.3 }.into(), |r| {
            let x: f64 = r.gen_range(-1.5..1.5);
            (x, -1.2 * x * x / 3.0 - 0.9 / 1.2 - sym(r, 0.2, 3.0))
        }),
        (lienard_model(1.0), |r| {
            let x: f64 = r.gen_range(-1.5..1.5);
            (x, 1.0 - x * x + sym(r, 0.1, 3.0))
        }),
        (lienard_model(-2.0), |r| {
            let x: f64 = r.gen_range(-1.5..1.5);
            (x, (x * x - 1.0) / 2.0 + r.gen_range(0.1..3.0))
        }),
    ]
}

fn root_residual(rng: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count_mismatch = 0;
    for _ in 0..1000 {
        let deg = rng.gen_range(1..=5);
        let p = Poly::new((0..=deg).map(|_| rng.gen_range(-5.0..5.0)).collect());
        if p.degree().unwrap_or(0) == 0 {
            continue;
        }
        let Ok(roots) = poly_real_roots(&p, -2.0, 2.0, 1e-12) else {
            count_mismatch += 1;
            continue;
        };
        for r in &roots {
            // A root of multiplicity k is only located to tol^(1/k).
            let scale = (1.0 + p.norm1()) * 10f64.powi(r.multiplicity as i32 - 1);
            worst = worst.max(p.eval(r.value).abs() / scale);
        }
        let expected = nsl_core::numerics::sturm_root_count(&p, -2.0, 2.0) + usize::from(p.eval(-2.0) == 0.0);
        count_mismatch += usize::from(expected != roots.len());
    }
    let value = if count_mismatch > 0 { f64::INFINITY } else { worst };
    Outcome::below(value, 1e-12).with(format!("{count_mismatch} root-count mismatches"))
}

fn rational_power_inverse(rng: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let x = sym(rng, 0.1, 10.0);
        let e = RationalExponent::new(rng.gen_range(-7..8), 2 * rng.gen_range(0..4) + 1).expect("odd denominator");
        let lhs = rpow_real(x, e).map(|y| y.powi(e.den() as i32)).unwrap_or(f64::NAN);
        let rhs = x.powi(e.num() as i32);
        worst = worst.max(((lhs - rhs) / rhs).abs());
    }
    Outcome::below(if worst.is_nan() { f64::INFINITY } else { worst }, 1e-12)
}

fn rk4_fourth_order(_: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let err = |h: f64| {
        let spec = OdeSpec::new(h, 2.0).expect("positive step");
        let tr = integrate_ode_unbounded(&spec, [1.0, 0.0], |_, y| [y[1], -y[0]]).expect("bounded");
        (tr.last()[0] - 2f64.cos()).abs()
    };
    let ratio = err(0.1) / err(0.05);
    // Error ratio for a halved step should be close to 2^4.
    Outcome::below((ratio - 16.0).abs(), 2.0).with(format!("ratio {ratio:.3}"))
}

fn momentum_matches_fd(rng: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let mut worst: f64 = 0.0;
    for (model, sample) in catalog() {
        for _ in 0..1000 {
            let (x, v) = sample(rng);
            let (Ok(p), Ok(_)) = (model.momentum(x, v), model.value(x, v)) else {
                return Outcome::below(f64::INFINITY, 1e-6).with(format!("{} undefined at ({x}, {v})", model.name()));
            };
            let h = 1e-6 * (1.0 + v.abs());
            let fd = nsl_core::numerics::central_diff(|t| model.value(x, t).unwrap_or(f64::NAN), v, h);
            worst = worst.max((p - fd).abs() / (1.0 + p.abs()));
        }
    }
    Outcome::below(if worst.is_nan() { f64::INFINITY } else { worst }, 1e-6)
}

fn trial_el_coefficients(_: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let fam = LagrangianFamily::TrialReciprocal { alpha: 1.0, beta: 1.0, mu: Poly::x() };
    let Ok(ElCoefficients::Positional { f, g }) = euler_lagrange_coeffs(&fam) else {
        return Outcome::below(f64::INFINITY, 1e-12).with("expected positional coefficients");
    };
    let gamma = f.eval(0.3);
    let omega0 = g.derivative().eval(0.0).sqrt();
    let err = (gamma - 1.5).abs().max((omega0 - std::f64::consts::FRAC_1_SQRT_2).abs());
    Outcome::below(err, 1e-12).with(format!("gamma {gamma}, omega0 {omega0}"))
}

fn el_residual_damped(_: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let fam = LagrangianFamily::TrialReciprocal { alpha: 1.0, beta: 1.0, mu: Poly::x() };
    let run = || -> nsl_core::Result<f64> {
        let sys = LienardSystem::new(Poly::constant(1.5), Poly::monomial(0.5, 1))?;
        let tr = integrate_lienard(&sys, 1.0, 0.0, 5e-4, 5.0)?;
        Ok(el_residual(&fam, &tr)?.max_abs)
    };
    Outcome::below(run().unwrap_or(f64::INFINITY), 1e-5)
}

fn cz_spot_values(_: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let run = || -> nsl_core::Result<f64> {
        let bh = hamiltonian_branches(LagrangianFamily::CzPower { k: 1, potential: Poly::monomial(1.0, 2) })?;
        let x = 0.7;
        let vs = [bh.v_of(0, x, 0.25)?, bh.v_of(1, x, 0.25)?];
        let hs = [bh.h_of(0, x, 0.25)? - x * x, bh.h_of(1, x, 0.25)? - x * x];
        Ok((vs[0] + 1.0).abs().max((vs[1] - 3.0).abs()).max((hs[0] - 1.25).abs()).max((hs[1] + 0.75).abs()))
    };
    Outcome::below(run().unwrap_or(f64::INFINITY), 1e-12)
}

fn cheillini_example(_: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let ells: Vec<f64> =
        cheillini_solve(&cubic_system()).map(|s| s.iter().map(|s| s.ell.value()).collect()).unwrap_or_default();
    let err = match ells.as_slice() {
        [a, b] => (a - 1.0).abs().max((b + 2.0).abs()),
        _ => f64::INFINITY,
    };
    Outcome::below(err, 1e-12).with(format!("{ells:?}"))
}

fn cheillini_round_trip(rng: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 200 {
        let ell: f64 = rng.gen_range(-3.0..3.0);
        if ell.abs() < 0.05 || (ell + 1.0f64).abs() < 0.05 {
            continue;
        }
        let (a, alpha, k) = (sym(rng, 0.2, 3.0), rng.gen_range(0..3), rng.gen_range(-2.0..2.0));
        let sys = LienardSystem::new(Poly::monomial(a, alpha), cheillini_construct_g(a, alpha, ell, k));
        let Ok(sols) = sys.and_then(|s| cheillini_solve(&s)) else {
            return Outcome::below(f64::INFINITY, 1e-10).with(format!("solve failed at l = {ell}"));
        };
        for target in [ell, -1.0 - ell] {
            let e = sols.iter().map(|s| (s.ell.value() - target).abs()).fold(f64::INFINITY, f64::min);
            worst = worst.max(e);
        }
        for s in &sols {
            worst = worst.max((s.ell.value() + s.partner_ell.value() + 1.0).abs());
        }
        done += 1;
    }
    Outcome::below(worst, 1e-10)
}

fn van_der_pol_has_no_solution(_: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let n = LienardSystem::new(Poly::new(vec![-1.0, 0.0, 1.0]), Poly::x())
        .and_then(|s| cheillini_solve(&s))
        .map(|s| s.len() as f64)
        .unwrap_or(f64::INFINITY);
    Outcome::below(n, 0.0).with(format!("{n} solutions"))
}

fn last_multiplier(rng: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let mut worst: f64 = 0.0;
    for ell in [1.0, -2.0] {
        let LagrangianModel::Lienard(lag) = lienard_model(ell) else { unreachable!() };
        for _ in 0..500 {
            let x = rng.gen_range(-1.5..1.5);
            let v = lag.w().eval(x) + rng.gen_range(0.1..3.0);
            let (Ok(m), Ok(d)) = (lag.last_multiplier(x, v), lag.dvv(x, v)) else {
                return Outcome::below(f64::INFINITY, 1e-9);
            };
            worst = worst.max((m - d).abs() / (1.0 + m.abs()));
        }
    }
    Outcome::below(worst, 1e-9)
}

/// Hamiltonian used by the identity check, possibly sabotaged.
fn branch_h(bh: &BranchedHamiltonian, id: usize, x: f64, p: f64, fault: Option<Fault>) -> nsl_core::Result<f64> {
    let h = match bh.closed_form_h(id, x, p) {
        Some(h) => h?,
        None => bh.h_of(id, x, p)?,
    };
    let flip = fault == Some(Fault::LienardHSign) && matches!(bh.model(), LagrangianModel::Lienard(_));
    Ok(if flip { -h } else { h })
}

fn worked_hamiltonians(_: &mut ChaCha8Rng, fault: Option<Fault>) -> Outcome {
    let (one, two) = match (hamiltonian_branches(lienard_model(1.0)), hamiltonian_branches(lienard_model(-2.0))) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Outcome::below(f64::INFINITY, 1e-9),
    };
    let xs = crate::config::linspace([-2.0, 2.0], 101);
    let ps = crate::config::linspace([0.0, 4.0], 101);
    let mut worst: f64 = 0.0;
    let mut coalescence: f64 = 0.0;
    for &x in &xs {
        for &p in &ps[1..] {
            let r = (2.0 * p).sqrt() * 2.0 / 3.0;
            let scale = p * (1.0 + x * x + r);
            let expected = [p * (1.0 - x * x + r), p * (1.0 - x * x - r)];
            for (id, e) in expected.into_iter().enumerate() {
                let h = branch_h(&one, id, x, p, fault).unwrap_or(f64::NAN);
                worst = worst.max((h - e).abs() / scale);
            }
            let e2 = p * p * p / 12.0 - p * (1.0 - x * x) / 2.0;
            let h2 = branch_h(&two, 0, x, p, fault).unwrap_or(f64::NAN);
            worst = worst.max((h2 - e2).abs() / (p * p * p / 12.0 + p * (1.0 + x * x) / 2.0));
        }
        let (a, b) = (one.h_of(0, x, 0.0), one.h_of(1, x, 0.0));
        coalescence = coalescence.max(match (a, b) {
            (Ok(a), Ok(b)) => (a - b).abs(),
            _ => f64::INFINITY,
        });
    }
    let value = if worst.is_nan() { f64::INFINITY } else { worst.max(coalescence) };
    Outcome::below(value, 1e-9).with(format!("relative {worst:.3e}, |H+ - H-| at p = 0: {coalescence:.3e}"))
}

fn legendre_identity(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Outcome {
    let mut worst: f64 = 0.0;
    for (model, sample) in catalog() {
        let bh = hamiltonian_branches(model.clone()).ok();
        for _ in 0..1000 {
            let (x, v) = sample(rng);
            let r = match &bh {
                None => legendre_identity_check(&model, x, v),
                Some(bh) => (|| {
                    let l = model.value(x, v)?;
                    let p = model.momentum(x, v)?;
                    let id = bh
                        .branches()
                        .iter()
                        .find(|b| {
                            bh.contains(b.id, p)
                                && bh.v_of(b.id, x, p).is_ok_and(|w| (w - v).abs() <= 1e-7 * (1.0 + v.abs()))
                        })
                        .ok_or(nsl_core::Error::BranchNotFound { x, v })?
                        .id;
                    Ok((l + branch_h(bh, id, x, p, fault)? - p * v).abs())
                })(),
            };
            match r {
                Ok(e) => worst = worst.max(e),
                Err(e) => return Outcome::below(f64::INFINITY, 1e-10).with(format!("{}: {e}", model.name())),
            }
        }
    }
    Outcome::below(worst, 1e-10)
}

fn inversion_round_trip(rng: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let mut worst: f64 = 0.0;
    for (model, sample) in catalog() {
        for _ in 0..200 {
            let (x, v) = sample(rng);
            let Ok(p) = model.momentum(x, v) else { return Outcome::below(f64::INFINITY, 1e-9) };
            let Ok(vs) = invert_momentum(&model, x, p) else { return Outcome::below(f64::INFINITY, 1e-9) };
            if !vs.iter().any(|w| (w - v).abs() <= 1e-6 * (1.0 + v.abs())) {
                return Outcome::below(f64::INFINITY, 1e-9).with(format!("{}: lost v = {v}", model.name()));
            }
            for w in vs {
                let q = model.momentum(x, w).unwrap_or(f64::NAN);
                worst = worst.max((q - p).abs() / (1.0 + p.abs()));
            }
        }
    }
    Outcome::below(if worst.is_nan() { f64::INFINITY } else { worst }, 1e-9)
}

fn quartic_branch_count(rng: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let mut wrong = 0;
    for _ in 0..1000 {
        let kappa = rng.gen_range(0.1..5.0);
        let p: f64 = rng.gen_range(-10.0..10.0);
        let pc = quartic_critical_momentum(kappa);
        if (p.abs() - pc).abs() < 1e-6 * (1.0 + pc) {
            continue;
        }
        let model: LagrangianModel = LagrangianFamily::QuarticVelocity { kappa }.into();
        let n = invert_momentum(&model, 0.0, p).map(|v| v.len()).unwrap_or(0);
        // Discriminant of v^3 - kappa v - p.
        let disc = 4.0 * kappa.powi(3) - 27.0 * p * p;
        let expected = if disc > 0.0 { 3 } else { 1 };
        wrong += usize::from(n != expected) + usize::from(expected != if p.abs() < pc { 3 } else { 1 });
    }
    Outcome::below(wrong as f64, 0.0).with(format!("{wrong} mismatches"))
}

fn mass_reconstruction(_: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let run = || -> nsl_core::Result<(f64, f64)> {
        let (s, lambda, k) = (1.3, 0.9, 1.7);
        type Case = (BranchedHamiltonian, fn(f64) -> f64);
        let cases: [Case; 3] = [
            (hamiltonian_branches(lienard_model(-2.0))?, |p| 1.0 / p),
            (hamiltonian_branches(LagrangianFamily::ReciprocalShifted { s, lambda: 0.2 })?, |p| 3.0 / (2.0 * 1.3 * p)),
            (BranchedHamiltonian::higher_power_lienard(lambda, k)?, |p| 1.0 / (0.9 - 2.0 * 1.7 * p / 3.0)),
        ];
        let mut worst: f64 = 0.0;
        for (bh, mass) in &cases {
            for b in bh.branches() {
                let mm = momentum_mass_decompose(bh, b.id)?;
                for p in bh.domain(b.id)?.sample_points(9) {
                    worst = worst.max((mm.mass(p)? - mass(p)).abs() / mass(p).abs());
                    for x in [-1.5, -0.2, 0.0, 0.8, 1.9] {
                        let h = bh.h_of(b.id, x, p)?;
                        worst = worst.max((h - mm.reconstruct(x, p)?).abs() / (1.0 + h.abs()));
                    }
                }
            }
        }
        let hp = &cases[2].0;
        let target = 3.0 * lambda / (2.0 * k);
        let pts = coalescence_points(hp, 0.4);
        let coal = pts.iter().map(|p| (p - target).abs()).fold(f64::INFINITY, f64::min);
        Ok((worst, coal))
    };
    match run() {
        Ok((worst, coal)) => Outcome::below(worst, 1e-10)
            .with(format!("reconstruction {worst:.3e}, coalescence offset {coal:.3e}"))
            .gate(coal <= 1e-9),
        Err(e) => Outcome::below(f64::INFINITY, 1e-10).with(e.to_string()),
    }
}

impl Outcome {
    /// Fails the check outright when `ok` is false.
    fn gate(mut self, ok: bool) -> Self {
        if !ok {
            self.value = f64::INFINITY;
        }
        self
    }
}

fn flow_equivalence(_: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let run = || -> nsl_core::Result<(f64, f64, f64)> {
        let sys = cubic_system();
        let sol = cheillini_solve(&sys)?
            .into_iter()
            .find(|s| s.ell.value() == -2.0)
            .ok_or(nsl_core::Error::InvalidParameter("l = -2 missing".into()))?;
        let bh = hamiltonian_branches(build_lagrangian(&sys, &sol)?)?;
        let (x0, p0, dt, t) = (0.5, 1.0, 1e-3, 5.0);
        let ham = integrate_hamilton(&bh, 0, x0, p0, dt, t)?;
        let residual = consistency_check(&sys, &ham)?;
        let drift = conservation_report(&bh, 0, &ham)?;
        let v0 = bh.v_of(0, x0, p0)?;
        let second = integrate_lienard(&sys, x0, v0, dt, t)?;
        let form = first_order_form(&sys, &sol)?;
        let first = integrate_first_order(&form, x0, form.u_from_velocity(x0, v0), dt, t)?;
        let vside = to_velocity_side(&bh, &ham)?;
        let gap = max_position_gap(&vside, &second)
            .max(max_position_gap(&second, &first))
            .max(max_position_gap(&first, &vside));
        Ok((residual, drift, gap))
    };
    match run() {
        Ok((r, d, g)) => Outcome::below((r / 1e-5).max(d / 1e-8).max(g / 1e-5), 1.0)
            .with(format!("ode residual {r:.3e}, H drift {d:.3e}, pairwise gap {g:.3e}")),
        Err(e) => Outcome::below(f64::INFINITY, 1.0).with(e.to_string()),
    }
}

fn dissipation(rng: &mut ChaCha8Rng, _: Option<Fault>) -> Outcome {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (c, a, b) = (rng.gen_range(0.01..2.0), rng.gen_range(0.1..2.0), rng.gen_range(0.0..1.0));
        let (x0, v0) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let Ok(sys) = LienardSystem::new(Poly::constant(c), Poly::new(vec![0.0, 2.0 * a, 0.0, 4.0 * b])) else {
            return Outcome::below(f64::INFINITY, 0.0);
        };
        let Ok(tr) = integrate_lienard(&sys, x0, v0, 1e-2, 10.0) else { return Outcome::below(f64::INFINITY, 0.0) };
        let e: Vec<f64> = tr.states.iter().map(|s| 0.5 * s[1] * s[1] + a * s[0].powi(2) + b * s[0].powi(4)).collect();
        for w in e.windows(2) {
            worst = worst.max((w[1] - w[0]) / (1.0 + w[0]) - 1e-9);
        }
    }
    Outcome::below(worst, 0.0).with("largest relative energy increase beyond 1e-9")
}
