//! Real root isolation by Sturm sequences.
//!
//! The polynomial is first reduced to its square-free part `p / gcd(p, p')`,
//! whose Sturm chain counts distinct roots in half-open intervals `(a, b]`.
//! Intervals are bisected until each holds exactly one root, which is then
//! refined by sign bisection and a guarded Newton polish. Multiplicities come
//! from the chain of repeated gcds `g_{j+1} = gcd(g_j, g_j')`.

use alloc::vec::Vec;

use super::poly::Poly;
use crate::{Error, Result};

/// Default absolute width of a refined isolating interval.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

/// Relative threshold below which Euclidean remainders are treated as zero.
const REMAINDER_EPS: f64 = 1e-10;

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

/// Remainder of `a / b`, with coefficients that are negligible relative to
/// the operands chopped to zero.
fn chopped_rem(a: &Poly, b: &Poly) -> Poly {
    let (_, r) = a.div_rem(b);
    let scale = a.max_abs_coeff().max(b.max_abs_coeff());
    r.chop(REMAINDER_EPS * scale)
}

/// Sturm chain `p, p', -rem(p, p'), ...`, each member rescaled to unit
/// max-norm (positive scaling does not change sign variations).
pub fn sturm_sequence(p: &Poly) -> Vec<Poly> {
    let mut seq = Vec::new();
    if p.is_zero() {
        return seq;
    }
    seq.push(p.normalized());
    let d = p.derivative();
    if d.is_zero() {
        return seq;
    }
    seq.push(d.normalized());
    loop {
        let n = seq.len();
        let r = chopped_rem(&seq[n - 2], &seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push((-&r).normalized());
    }
    seq
}

/// Number of sign changes in the chain evaluated at `x`, zeros skipped.
pub fn sign_variations(seq: &[Poly], x: f64) -> usize {
    let mut count = 0;
    let mut last = 0.0_f64;
    for q in seq {
        let v = q.eval(x);
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v < 0.0) != (last < 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

/// Distinct real roots of `p` in `(lo, hi]` by Sturm's theorem.
pub fn sturm_root_count(p: &Poly, lo: f64, hi: f64) -> usize {
    let sf = square_free_part(p);
    let seq = sturm_sequence(&sf);
    sign_variations(&seq, lo).saturating_sub(sign_variations(&seq, hi))
}

/// Greatest common divisor up to a constant factor (normalized).
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut a = a.normalized();
    let mut b = b.normalized();
    if a.degree() < b.degree() {
        core::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        let r = chopped_rem(&a, &b);
        a = b;
        b = r.normalized();
    }
    a
}

/// `p / gcd(p, p')`, normalized.
pub fn square_free_part(p: &Poly) -> Poly {
    if p.degree().unwrap_or(0) < 2 {
        return p.normalized();
    }
    let g = poly_gcd(p, &p.derivative());
    if g.degree().unwrap_or(0) == 0 {
        return p.normalized();
    }
    p.div_rem(&g).0.normalized()
}

/// All real roots of `p` in `[lo, hi]`, ascending, each located to within `tol`.
pub fn poly_real_roots(p: &Poly, lo: f64, hi: f64, tol: f64) -> Result<Vec<RealRoot>> {
    if p.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    if !(lo < hi) {
        return Err(Error::InvalidParameter(alloc::format!("empty interval [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("tolerance {tol} must be positive")));
    }
    let sf = square_free_part(p);
    if sf.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let seq = sturm_sequence(&sf);

    let mut values = Vec::new();
    if sf.eval(lo) == 0.0 {
        values.push(lo);
    }
    isolate(&sf, &seq, lo, hi, tol, 0, &mut values);

    let gcd_chain = repeated_gcds(p);
    Ok(values.into_iter().map(|value| RealRoot { value, multiplicity: multiplicity_at(&gcd_chain, value) }).collect())
}

fn isolate(q: &Poly, seq: &[Poly], a: f64, b: f64, tol: f64, depth: usize, out: &mut Vec<f64>) {
    let n = sign_variations(seq, a).saturating_sub(sign_variations(seq, b));
    if n == 0 {
        return;
    }
    if n == 1 {
        out.push(refine(q, a, b, tol));
        return;
    }
    let mid = 0.5 * (a + b);
    if b - a <= tol || depth >= MAX_DEPTH || mid <= a || mid >= b {
        // Unresolvable cluster at this precision.
        out.push(mid);
        return;
    }
    isolate(q, seq, a, mid, tol, depth + 1, out);
    isolate(q, seq, mid, b, tol, depth + 1, out);
}

/// Locates the unique simple root of `q` in `(a, b]`.
fn refine(q: &Poly, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let fb = q.eval(b);
    if fb == 0.0 {
        return b;
    }
    let mut fa = q.eval(a);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = q.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let mut x = 0.5 * (a + b);
    let dq = q.derivative();
    for _ in 0..4 {
        let fx = q.eval(x);
        let d = dq.eval(x);
        if fx == 0.0 || d == 0.0 {
            break;
        }
        let next = x - fx / d;
        if !(next >= a && next <= b) || q.eval(next).abs() >= fx.abs() {
            break;
        }
        x = next;
    }
    x
}

fn repeated_gcds(p: &Poly) -> Vec<Poly> {
    let mut chain = Vec::new();
    let mut g = p.normalized();
    while g.degree().unwrap_or(0) >= 1 {
        let next = poly_gcd(&g, &g.derivative());
        if next.degree().unwrap_or(0) == 0 {
            break;
        }
        chain.push(next.clone());
        g = next;
    }
    chain
}

fn multiplicity_at(chain: &[Poly], r: f64) -> usize {
    let delta = 1e-6 * (1.0 + r.abs());
    1 + chain.iter().take_while(|g| sturm_root_count(g, r - delta, r + delta) > 0).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn values(rs: &[RealRoot]) -> Vec<f64> {
        rs.iter().map(|r| r.value).collect()
    }

    #[test]
    fn factored_cubic() {
        let p = Poly::new(vec![0.0, -1.0, 0.0, 1.0]);
        let rs = poly_real_roots(&p, -2.0, 2.0, DEFAULT_ROOT_TOL).unwrap();
        let v = values(&rs);
        assert_eq!(v.len(), 3);
        for (got, want) in v.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert!(rs.iter().all(|r| r.multiplicity == 1));
    }

    #[test]
    fn double_root_is_reported_with_multiplicity() {
        // v^3 - 3v - 2 = (v + 1)^2 (v - 2); synthetic division by (v + 1)
        // leaves v^2 - v - 2 = (v + 1)(v - 2).
        let p = Poly::new(vec![-2.0, -3.0, 0.0, 1.0]);
        let (q, r) = p.div_rem(&Poly::new(vec![1.0, 1.0]));
        assert!(r.is_zero());
        assert_eq!(q.eval(-1.0), 0.0);

        let rs = poly_real_roots(&p, -3.0, 3.0, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(rs.len(), 2);
        assert!((rs[0].value + 1.0).abs() < 1e-12);
        assert_eq!(rs[0].multiplicity, 2);
        assert!((rs[1].value - 2.0).abs() < 1e-12);
        assert_eq!(rs[1].multiplicity, 1);
    }

    #[test]
    fn no_real_roots() {
        let p = Poly::new(vec![1.0, 0.0, 1.0]);
        assert!(poly_real_roots(&p, -10.0, 10.0, DEFAULT_ROOT_TOL).unwrap().is_empty());
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert_eq!(poly_real_roots(&Poly::zero(), -1.0, 1.0, DEFAULT_ROOT_TOL), Err(Error::IdenticallyZero));
    }

    #[test]
    fn root_at_lower_endpoint_is_included() {
        let p = Poly::new(vec![1.0, 1.0]);
        let rs = poly_real_roots(&p, -1.0, 1.0, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(values(&rs), vec![-1.0]);
    }

    #[test]
    fn triple_root() {
        // (x - 0.5)^3
        let p = Poly::new(vec![-0.125, 0.75, -1.5, 1.0]);
        let rs = poly_real_roots(&p, -1.0, 2.0, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(rs.len(), 1);
        assert!((rs[0].value - 0.5).abs() < 1e-12);
        assert_eq!(rs[0].multiplicity, 3);
    }

    #[test]
    fn sturm_count_matches_known_roots() {
        let p = Poly::new(vec![0.0, -1.0, 0.0, 1.0]);
        assert_eq!(sturm_root_count(&p, -2.0, 2.0), 3);
        assert_eq!(sturm_root_count(&p, -0.5, 2.0), 2);
        assert_eq!(sturm_root_count(&p, 0.0, 2.0), 1);
    }
}
