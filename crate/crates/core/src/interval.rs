//! Open real intervals, possibly unbounded, used as validity domains for
//! Weyl-function evaluation.

use std::fmt;

/// An open interval `(lo, hi)` on the real line. Either endpoint may be
/// infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    /// The whole real line.
    pub fn all() -> Self {
        Interval::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Everything strictly below `hi`.
    pub fn below(hi: f64) -> Self {
        Interval::new(f64::NEG_INFINITY, hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn is_empty(&self) -> bool {
        // NaN endpoints count as empty, so this is not `lo >= hi`
        !matches!(
            self.lo.partial_cmp(&self.hi),
            Some(std::cmp::Ordering::Less)
        )
    }

    /// Intersection with another interval (may be empty).
    pub fn intersect(self, other: Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// Clamp `x` to lie strictly inside the interval, backing away from
    /// finite endpoints by a relative margin.
    pub fn clamp_inside(&self, x: f64) -> f64 {
        assert!(!self.is_empty());
        let margin = |end: f64| 1e-12 * end.abs().max(1.0);
        let lo = if self.lo.is_finite() {
            self.lo + margin(self.lo)
        } else {
            f64::NEG_INFINITY
        };
        let hi = if self.hi.is_finite() {
            self.hi - margin(self.hi)
        } else {
            f64::INFINITY
        };
        if lo > hi {
            // interval thinner than the margins; fall back to its midpoint
            return 0.5 * (self.lo + self.hi);
        }
        x.clamp(lo, hi)
    }

    /// Deterministic probe points strictly inside the interval.
    ///
    /// Bounded intervals get a uniform interior grid; half-lines get points
    /// at geometrically growing distance from the finite endpoint, so checks
    /// see several length scales.
    pub fn probe_points(&self, n: usize) -> Vec<f64> {
        assert!(n >= 1 && !self.is_empty());
        let lo_fin = self.lo.is_finite();
        let hi_fin = self.hi.is_finite();
        let expo = |k: usize| {
            // 10^t for t in [-6, 3]
            let t = -6.0 + 9.0 * (k as f64) / ((n.max(2) - 1) as f64);
            10f64.powf(t)
        };
        match (lo_fin, hi_fin) {
            (true, true) => {
                let span = self.hi - self.lo;
                (0..n)
                    .map(|k| self.lo + span * (k as f64 + 1.0) / (n as f64 + 1.0))
                    .collect()
            }
            (true, false) => (0..n).map(|k| self.lo + expo(k)).collect(),
            (false, true) => (0..n).map(|k| self.hi - expo(k)).collect(),
            (false, false) => (0..n)
                .map(|k| {
                    let d = expo(k / 2);
                    if k % 2 == 0 {
                        -d
                    } else {
                        d
                    }
                })
                .collect(),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}
