use core::fmt;

/// One end of a momentum interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Unbounded,
    Closed(f64),
    Open(f64),
}

impl Bound {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Bound::Unbounded => None,
            Bound::Closed(v) | Bound::Open(v) => Some(v),
        }
    }

    fn map(self, f: impl Fn(f64) -> f64) -> Bound {
        match self {
            Bound::Unbounded => Bound::Unbounded,
            Bound::Closed(v) => Bound::Closed(f(v)),
            Bound::Open(v) => Bound::Open(f(v)),
        }
    }
}

/// Interval of admissible momenta for a branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumDomain {
    pub lo: Bound,
    pub hi: Bound,
}

impl MomentumDomain {
    pub const ALL: MomentumDomain = MomentumDomain { lo: Bound::Unbounded, hi: Bound::Unbounded };

    pub fn new(lo: Bound, hi: Bound) -> Self {
        MomentumDomain { lo, hi }
    }

    /// `p > 0` or `p >= 0`.
    pub fn positive(closed: bool) -> Self {
        let b = if closed { Bound::Closed(0.0) } else { Bound::Open(0.0) };
        MomentumDomain { lo: b, hi: Bound::Unbounded }
    }

    /// `p < 0` or `p <= 0`.
    pub fn negative(closed: bool) -> Self {
        let b = if closed { Bound::Closed(0.0) } else { Bound::Open(0.0) };
        MomentumDomain { lo: Bound::Unbounded, hi: b }
    }

    pub fn contains(&self, p: f64) -> bool {
        if !p.is_finite() {
            return false;
        }
        let lo_ok = match self.lo {
            Bound::Unbounded => true,
            Bound::Closed(a) => p >= a,
            Bound::Open(a) => p > a,
        };
        let hi_ok = match self.hi {
            Bound::Unbounded => true,
            Bound::Closed(b) => p <= b,
            Bound::Open(b) => p < b,
        };
        lo_ok && hi_ok
    }

    pub fn is_empty(&self) -> bool {
        match (self.lo, self.hi) {
            (Bound::Closed(a), Bound::Closed(b)) => a > b,
            (lo, hi) => match (lo.value(), hi.value()) {
                (Some(a), Some(b)) => a >= b,
                _ => false,
            },
        }
    }

    pub fn intersect(&self, other: &MomentumDomain) -> MomentumDomain {
        let lo = match (self.lo.value(), other.lo.value()) {
            (None, _) => other.lo,
            (_, None) => self.lo,
            (Some(a), Some(b)) if a > b => self.lo,
            (Some(a), Some(b)) if b > a => other.lo,
            _ => {
                if matches!(self.lo, Bound::Open(_)) {
                    self.lo
                } else {
                    other.lo
                }
            }
        };
        let hi = match (self.hi.value(), other.hi.value()) {
            (None, _) => other.hi,
            (_, None) => self.hi,
            (Some(a), Some(b)) if a < b => self.hi,
            (Some(a), Some(b)) if b < a => other.hi,
            _ => {
                if matches!(self.hi, Bound::Open(_)) {
                    self.hi
                } else {
                    other.hi
                }
            }
        };
        MomentumDomain { lo, hi }
    }

    /// Image under `p -> (p - shift) / scale`.
    pub(crate) fn pull_back(&self, scale: f64, shift: f64) -> MomentumDomain {
        let f = |p: f64| (p - shift) / scale;
        let (lo, hi) = (self.lo.map(f), self.hi.map(f));
        if scale > 0.0 {
            MomentumDomain { lo, hi }
        } else {
            MomentumDomain { lo: hi, hi: lo }
        }
    }

    /// Nearest point of the domain to `p`; open ends are approached to
    /// within a few ulps (or `1e-30` at zero).
    pub fn nearest_inside(&self, p: f64) -> f64 {
        let nudge = |a: f64| if a == 0.0 { 1e-30 } else { 8.0 * f64::EPSILON * a.abs() };
        let mut q = p;
        match self.lo {
            Bound::Closed(a) if q < a => q = a,
            Bound::Open(a) if q <= a => q = a + nudge(a),
            _ => {}
        }
        match self.hi {
            Bound::Closed(b) if q > b => q = b,
            Bound::Open(b) if q >= b => q = b - nudge(b),
            _ => {}
        }
        q
    }

    /// Representative interior points, used to probe closed forms.
    pub fn sample_points(&self, n: usize) -> alloc::vec::Vec<f64> {
        const OFFSETS: [f64; 8] = [0.05, 0.2, 0.45, 0.8, 1.3, 1.9, 2.6, 3.5];
        let n = n.clamp(1, OFFSETS.len());
        match (self.lo.value(), self.hi.value()) {
            (Some(a), Some(b)) => (1..=n).map(|i| a + (b - a) * i as f64 / (n + 1) as f64).collect(),
            (Some(a), None) => OFFSETS[..n].iter().map(|o| a + o * (1.0 + a.abs())).collect(),
            (None, Some(b)) => OFFSETS[..n].iter().map(|o| b - o * (1.0 + b.abs())).collect(),
            (None, None) => OFFSETS[..n].iter().enumerate().map(|(i, o)| if i % 2 == 0 { -o } else { *o }).collect(),
        }
    }

    /// A finite window of the domain for grid scans.
    pub(crate) fn window(&self, reach: f64) -> (f64, f64) {
        let lo = self.lo.value();
        let hi = self.hi.value();
        let (a, b) = match (lo, hi) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a, a + reach * (1.0 + a.abs())),
            (None, Some(b)) => (b - reach * (1.0 + b.abs()), b),
            (None, None) => (-reach, reach),
        };
        (self.nearest_inside(a), self.nearest_inside(b))
    }
}

impl fmt::Display for MomentumDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lo {
            Bound::Unbounded => write!(f, "(-inf")?,
            Bound::Closed(a) => write!(f, "[{a}")?,
            Bound::Open(a) => write!(f, "({a}")?,
        }
        match self.hi {
            Bound::Unbounded => write!(f, ", inf)"),
            Bound::Closed(b) => write!(f, ", {b}]"),
            Bound::Open(b) => write!(f, ", {b})"),
        }
    }
}
