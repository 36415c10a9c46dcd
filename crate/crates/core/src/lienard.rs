//! Lienard systems `x'' + f(x) x' + g(x) = 0` and their nonstandard
//! Lagrangians.
//!
//! For monomial damping `f = a x^alpha` the Cheillini condition
//! `(g/f)' + l(l+1) f = 0` forces
//! `g = k x^alpha - l(l+1) a^2/(alpha+1) x^(2 alpha+1)`. Given such an `l` the
//! Lagrangian is
//! `L = l^2/((l+1)(2l+1)) (v - W(x))^((2l+1)/l)` with `W = g/(l f)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;

use crate::families::Lagrangian;
use crate::numerics::{approximate_ratio, Poly, RealPower};
use crate::{Error, Result};

/// Tolerance for recognising `c = l(l+1)` as a rational number.
const RATIONAL_TOL: f64 = 1e-12;
const MAX_DEN: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LienardSystem {
    f: Poly,
    g: Poly,
}

impl LienardSystem {
    pub fn new(f: Poly, g: Poly) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::NotLienard("damping f(x) is identically zero".into()));
        }
        Ok(LienardSystem { f, g })
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn g(&self) -> &Poly {
        &self.g
    }

    /// `x''` at `(x, v)`.
    pub fn acceleration(&self, x: f64, v: f64) -> f64 {
        -self.f.eval(x) * v - self.g.eval(x)
    }
}

/// A value of `l`, kept exact when it is rational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ell {
    Exact(Ratio<i64>),
    Approx(f64),
}

impl Ell {
    pub fn value(&self) -> f64 {
        match self {
            Ell::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Ell::Approx(v) => *v,
        }
    }

    pub fn as_ratio(&self) -> Option<Ratio<i64>> {
        match self {
            Ell::Exact(r) => Some(*r),
            Ell::Approx(_) => None,
        }
    }

    /// `-1 - l`, the other root of `l(l+1) = c`.
    pub fn partner(&self) -> Ell {
        match self {
            Ell::Exact(r) => Ell::Exact(-Ratio::from_integer(1) - r),
            Ell::Approx(v) => Ell::Approx(-1.0 - v),
        }
    }

    /// Rational form of a float if one with a small denominator is within
    /// rounding distance, otherwise the float itself.
    pub fn from_f64(v: f64) -> Ell {
        match approximate_ratio(v, MAX_DEN, RATIONAL_TOL * (1.0 + v.abs())) {
            Some(r) => Ell::Exact(r),
            None => Ell::Approx(v),
        }
    }

    fn is(&self, num: i64, den: i64) -> bool {
        match self {
            Ell::Exact(r) => *r == Ratio::new(num, den),
            Ell::Approx(v) => (v - num as f64 / den as f64).abs() <= RATIONAL_TOL,
        }
    }
}

impl fmt::Display for Ell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ell::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Ell::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Ell::Approx(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheilliniSolution {
    pub ell: Ell,
    pub partner_ell: Ell,
    /// Damping coefficient in `f = a x^alpha`.
    pub a: f64,
    pub alpha_exp: usize,
    /// Coefficient of `x^alpha` in `g`.
    pub k_const: f64,
}

/// Solutions plus the reasons any candidate was dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CheilliniReport {
    pub solutions: Vec<CheilliniSolution>,
    pub diagnostics: Vec<String>,
}

/// `g` for given `a`, `alpha`, `l` and `k`.
pub fn cheillini_construct_g(a: f64, alpha_exp: usize, ell: f64, k_const: f64) -> Poly {
    let c2 = -ell * (ell + 1.0) * a * a / (alpha_exp as f64 + 1.0);
    let mut coeffs = alloc::vec![0.0; 2 * alpha_exp + 2];
    coeffs[alpha_exp] += k_const;
    coeffs[2 * alpha_exp + 1] += c2;
    Poly::new(coeffs)
}

fn isqrt_exact(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let r = libm::round(libm::sqrt(n as f64)) as i64;
    (r - 1..=r + 1).find(|&s| s >= 0 && s.checked_mul(s) == Some(n))
}

/// Roots of `l^2 + l - c = 0`, larger first.
fn ell_roots(c: f64) -> Option<(Ell, Ell)> {
    let disc = 1.0 + 4.0 * c;
    if disc < 0.0 {
        return None;
    }
    if let Some(cr) = approximate_ratio(c, MAX_DEN, RATIONAL_TOL * (1.0 + c.abs())) {
        let d = Ratio::from_integer(1) + cr * 4;
        if let (Some(n), Some(m)) = (isqrt_exact(*d.numer()), isqrt_exact(*d.denom())) {
            let root = Ratio::new(n, m);
            let half = Ratio::new(1, 2);
            let hi = (root - 1) * half;
            return Some((Ell::Exact(hi), Ell::Exact(-Ratio::from_integer(1) - hi)));
        }
    }
    let hi = 0.5 * (-1.0 + libm::sqrt(disc));
    Some((Ell::Approx(hi), Ell::Approx(-1.0 - hi)))
}

/// `P, F` coefficient vectors of `g'f - g f'` and `f^3`; the Cheillini
/// condition for general `f` is `P + c F = 0` for a constant `c`.
fn general_condition_constant(f: &Poly, g: &Poly) -> Option<f64> {
    let p = &(&g.derivative() * f) - &(g * &f.derivative());
    let f3 = &(f * f) * f;
    let ff: f64 = f3.coeffs().iter().map(|c| c * c).sum();
    let pf: f64 = p.coeffs().iter().zip(f3.coeffs()).map(|(a, b)| a * b).sum();
    let c = -pf / ff;
    let resid = &p + &f3.scale(c);
    let scale = 1.0 + p.max_abs_coeff().max(f3.max_abs_coeff() * c.abs());
    (resid.max_abs_coeff() <= 1e-10 * scale).then_some(c)
}

/// Solves the Cheillini condition, keeping diagnostics for rejected cases.
pub fn cheillini_analyze(sys: &LienardSystem) -> Result<CheilliniReport> {
    let (f, g) = (sys.f(), sys.g());
    if g.is_zero() {
        return Err(Error::NotLienard("restoring term g(x) is identically zero".into()));
    }
    let mut report = CheilliniReport::default();
    let Some((a, alpha)) = f.as_monomial() else {
        // Only monomial damping is solvable here. A general f that provably
        // violates the condition still has an empty answer.
        if general_condition_constant(f, g).is_some() {
            return Err(Error::NotMonomialDamping);
        }
        report.diagnostics.push(format!("(g/f)' is not a constant multiple of f for f = {f}, g = {g}"));
        return Ok(report);
    };

    let k = g.coeff(alpha);
    let c2 = g.coeff(2 * alpha + 1);
    let stray = g.coeffs().iter().enumerate().any(|(i, &c)| i != alpha && i != 2 * alpha + 1 && c != 0.0);
    if stray {
        report.diagnostics.push(format!("g = {g} has terms outside x^{alpha} and x^{}", 2 * alpha + 1));
        return Ok(report);
    }

    let c = -c2 * (alpha as f64 + 1.0) / (a * a);
    let Some((hi, lo)) = ell_roots(c) else {
        report.diagnostics.push(format!("l^2 + l - {c} = 0 has complex roots"));
        return Ok(report);
    };
    for ell in [hi, lo] {
        if ell.is(0, 1) || ell.is(-1, 1) {
            report.diagnostics.push(format!("l = {ell} excluded: the Lagrangian is singular there"));
            continue;
        }
        report.solutions.push(CheilliniSolution { ell, partner_ell: ell.partner(), a, alpha_exp: alpha, k_const: k });
    }
    Ok(report)
}

/// All admissible `l` for a Lienard system with monomial damping.
pub fn cheillini_solve(sys: &LienardSystem) -> Result<Vec<CheilliniSolution>> {
    Ok(cheillini_analyze(sys)?.solutions)
}

/// `W = g / (l f)` as a polynomial.
pub fn shift_polynomial(sys: &LienardSystem, sol: &CheilliniSolution) -> Result<Poly> {
    let ell = sol.ell.value();
    sys.g()
        .div_by_x_pow(sol.alpha_exp)
        .map(|q| q.scale(1.0 / (ell * sol.a)))
        .ok_or_else(|| Error::InconsistentSolution(format!("g is not divisible by x^{}", sol.alpha_exp)))
}

/// The coupled system `u' = l u f(x)`, `x' = u + W(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderForm {
    pub ell: f64,
    pub f: Poly,
    pub w: Poly,
}

impl FirstOrderForm {
    pub fn u_dot(&self, x: f64, u: f64) -> f64 {
        self.ell * u * self.f.eval(x)
    }

    pub fn x_dot(&self, x: f64, u: f64) -> f64 {
        u + self.w.eval(x)
    }

    /// Right-hand side for the state `[x, u]`.
    pub fn rhs(&self, s: &[f64; 2]) -> [f64; 2] {
        [self.x_dot(s[0], s[1]), self.u_dot(s[0], s[1])]
    }

    /// `u = v - W(x)`.
    pub fn u_from_velocity(&self, x: f64, v: f64) -> f64 {
        v - self.w.eval(x)
    }
}

pub fn first_order_form(sys: &LienardSystem, sol: &CheilliniSolution) -> Result<FirstOrderForm> {
    let w = shift_polynomial(sys, sol)?;
    let ell = sol.ell.value();
    let check = &w.derivative() + &sys.f().scale(ell + 1.0);
    let scale = 1.0 + w.max_abs_coeff() + sys.f().max_abs_coeff();
    if check.max_abs_coeff() > 1e-10 * scale {
        return Err(Error::InconsistentSolution(format!("W' + (l+1) f = {check} is not zero")));
    }
    Ok(FirstOrderForm { ell, f: sys.f().clone(), w })
}

/// `L = K (v - W)^((2l+1)/l)` with `K = l^2/((l+1)(2l+1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct LienardLagrangian {
    system: LienardSystem,
    ell: Ell,
    w: Poly,
    dw: Poly,
    prefactor: f64,
    pow_l: RealPower,
    pow_p: RealPower,
    pow_m: RealPower,
}

pub fn build_lagrangian(sys: &LienardSystem, sol: &CheilliniSolution) -> Result<LienardLagrangian> {
    let ell = sol.ell;
    let lv = ell.value();
    if ell.is(0, 1) {
        return Err(Error::SingularEll { ell: lv, reason: "exponents divide by l" });
    }
    if ell.is(-1, 1) {
        return Err(Error::SingularEll { ell: lv, reason: "prefactor divides by l + 1" });
    }
    if ell.is(-1, 2) {
        return Err(Error::SingularEll { ell: lv, reason: "prefactor divides by 2l + 1" });
    }
    let form = first_order_form(sys, sol)?;
    let (pow_l, pow_p, pow_m) = match ell {
        Ell::Exact(r) => {
            let (n, d) = (*r.numer(), *r.denom());
            (RealPower::from_ratio(2 * n + d, n)?, RealPower::from_ratio(n + d, n)?, RealPower::from_ratio(d, n)?)
        }
        Ell::Approx(l) => (
            RealPower::NonNegBase((2.0 * l + 1.0) / l),
            RealPower::NonNegBase((l + 1.0) / l),
            RealPower::NonNegBase(1.0 / l),
        ),
    };
    Ok(LienardLagrangian {
        system: sys.clone(),
        ell,
        dw: form.w.derivative(),
        w: form.w,
        prefactor: lv * lv / ((lv + 1.0) * (2.0 * lv + 1.0)),
        pow_l,
        pow_p,
        pow_m,
    })
}

impl LienardLagrangian {
    pub fn system(&self) -> &LienardSystem {
        &self.system
    }

    pub fn ell(&self) -> Ell {
        self.ell
    }

    pub fn w(&self) -> &Poly {
        &self.w
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    /// Power map of `p = l/(l+1) b^((l+1)/l)`.
    pub fn momentum_power(&self) -> RealPower {
        self.pow_p
    }

    /// Jacobi last multiplier `M = (v - W)^(1/l)`.
    pub fn last_multiplier(&self, x: f64, v: f64) -> Result<f64> {
        self.power(self.pow_m, x, v)
    }

    fn base(&self, x: f64, v: f64) -> f64 {
        v - self.w.eval(x)
    }

    fn power(&self, pw: RealPower, x: f64, v: f64) -> Result<f64> {
        let b = self.base(x, v);
        pw.apply(b).map_err(|e| match e {
            Error::DivisionByZero => Error::domain(format!("v - W(x) = 0 with exponent {}", pw.exponent())),
            other => other,
        })
    }

    fn exponent_l(&self) -> f64 {
        self.pow_l.exponent()
    }
}

impl Lagrangian for LienardLagrangian {
    fn value(&self, x: f64, v: f64) -> Result<f64> {
        Ok(self.prefactor * self.power(self.pow_l, x, v)?)
    }

    fn dv(&self, x: f64, v: f64) -> Result<f64> {
        Ok(self.prefactor * self.exponent_l() * self.power(self.pow_p, x, v)?)
    }

    fn dx(&self, x: f64, v: f64) -> Result<f64> {
        Ok(-self.dw.eval(x) * self.dv(x, v)?)
    }

    fn dvv(&self, x: f64, v: f64) -> Result<f64> {
        let c = self.prefactor * self.exponent_l() * self.pow_p.exponent();
        Ok(c * self.power(self.pow_m, x, v)?)
    }

    fn momentum(&self, x: f64, v: f64) -> Result<f64> {
        let l = self.ell.value();
        Ok(l / (l + 1.0) * self.power(self.pow_p, x, v)?)
    }
}

/// `p = l/(l+1) (v - W)^((l+1)/l)`.
pub fn lienard_momentum(lag: &LienardLagrangian, x: f64, v: f64) -> Result<f64> {
    lag.momentum(x, v)
}
