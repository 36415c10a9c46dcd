//! Real powers of real bases.
//!
//! Rational exponents with odd denominators admit a real, sign-preserving
//! power for negative bases: `x^(n/d) = sign(x)^n |x|^(n/d)`. Exponents with
//! even denominators (square roots and friends) only exist on `x >= 0` and go
//! through a separate path that reports domain violations instead of NaN.

use core::fmt;

use num_rational::Ratio;

use crate::{Error, Result};

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Reduced rational `num / den` with `den` odd and positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalExponent {
    num: i64,
    den: i64,
}

impl RationalExponent {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("exponent denominator is zero".into()));
        }
        let g = gcd(num, den).max(1);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = -num;
            den = -den;
        }
        if den % 2 == 0 {
            return Err(Error::EvenDenominator { num, den });
        }
        Ok(RationalExponent { num, den })
    }

    pub fn integer(n: i64) -> Self {
        RationalExponent { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn as_ratio(&self) -> Ratio<i64> {
        Ratio::new_raw(self.num, self.den)
    }

    /// Closest rational with odd denominator at most `max_den` that lies
    /// within `tol` of `x`, found from the continued-fraction convergents.
    pub fn approximate(x: f64, max_den: i64, tol: f64) -> Option<Self> {
        let r = approximate_ratio(x, max_den, tol)?;
        RationalExponent::new(*r.numer(), *r.denom()).ok()
    }
}

impl fmt::Display for RationalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Continued-fraction approximation of `x` with denominator at most `max_den`,
/// accepted only if within `tol` of `x`.
pub fn approximate_ratio(x: f64, max_den: i64, tol: f64) -> Option<Ratio<i64>> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    let (mut h0, mut h1) = (0_i64, 1_i64);
    let (mut k0, mut k1) = (1_i64, 0_i64);
    let mut frac = x;
    for _ in 0..64 {
        let a = libm::floor(frac);
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some(Ratio::new(h1, k1));
        }
        let rem = frac - a;
        if rem == 0.0 {
            break;
        }
        frac = 1.0 / rem;
    }
    None
}

/// Sign-preserving real power `sign(x)^num * |x|^(num/den)` for odd `den`.
pub fn rpow_real(x: f64, e: RationalExponent) -> Result<f64> {
    if x == 0.0 {
        return match e.num {
            n if n < 0 => Err(Error::DivisionByZero),
            0 => Ok(1.0),
            _ => Ok(0.0),
        };
    }
    let mag = libm::pow(x.abs(), e.as_f64());
    if x < 0.0 && e.num % 2 != 0 {
        Ok(-mag)
    } else {
        Ok(mag)
    }
}

/// Square root restricted to `x >= 0`.
pub fn sqrt_nonneg(x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::domain(alloc::format!("square root of negative {x}")));
    }
    Ok(libm::sqrt(x))
}

/// `x^e` for real `e`, restricted to `x >= 0` (`x > 0` when `e < 0`).
pub fn pow_nonneg(x: f64, e: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::domain(alloc::format!("negative base {x} with exponent {e}")));
    }
    if x == 0.0 {
        if e < 0.0 {
            return Err(Error::DivisionByZero);
        }
        return Ok(if e == 0.0 { 1.0 } else { 0.0 });
    }
    Ok(libm::pow(x, e))
}

/// A power map `b -> b^e` that picks the right real branch for its exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RealPower {
    /// Odd denominator: defined for all real bases, sign-preserving.
    Odd(RationalExponent),
    /// Even denominator or irrational exponent: base must be non-negative.
    NonNegBase(f64),
}

impl RealPower {
    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        match RationalExponent::new(num, den) {
            Ok(e) => Ok(RealPower::Odd(e)),
            Err(Error::EvenDenominator { num, den }) => Ok(RealPower::NonNegBase(num as f64 / den as f64)),
            Err(e) => Err(e),
        }
    }

    pub fn exponent(&self) -> f64 {
        match self {
            RealPower::Odd(e) => e.as_f64(),
            RealPower::NonNegBase(e) => *e,
        }
    }

    pub fn apply(&self, b: f64) -> Result<f64> {
        match self {
            RealPower::Odd(e) => rpow_real(b, *e),
            RealPower::NonNegBase(e) => pow_nonneg(b, *e),
        }
    }

    /// True when `b -> b^e` is an even function of `b`.
    pub fn is_even(&self) -> bool {
        matches!(self, RealPower::Odd(e) if e.num % 2 == 0)
    }
}
