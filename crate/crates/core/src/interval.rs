use core::fmt;

/// Interval of admissible types. The upper end is always open; the lower end is
/// closed when `lower_closed` is set (the canonical procedure accepts a zero bid).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lower_closed: bool,
}

impl Interval {
    /// `[0, ∞)`: positive types, including the degenerate zero bid.
    pub const NON_NEGATIVE: Interval = Interval {
        lo: 0.0,
        hi: f64::INFINITY,
        lower_closed: true,
    };
    /// `(0, ∞)`.
    pub const POSITIVE: Interval = Interval {
        lo: 0.0,
        hi: f64::INFINITY,
        lower_closed: false,
    };
    /// `(-∞, 0)`: costs reported as negative values.
    pub const NEGATIVE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: 0.0,
        lower_closed: false,
    };

    pub const fn open(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            lower_closed: false,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        if v.is_nan() || v >= self.hi {
            return false;
        }
        if self.lower_closed {
            v >= self.lo
        } else {
            v > self.lo
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lower_closed { '[' } else { '(' };
        write!(f, "{}{}, {})", open, self.lo, self.hi)
    }
}
