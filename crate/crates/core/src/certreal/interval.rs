use crate::certreal::exact::Dyadic;

/// A real number known to lie in `[lo, hi]`, together with the precision that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedValue {
    pub lo: f64,
    pub hi: f64,
    pub bits: u32,
}

impl CertifiedValue {
    pub fn new(lo: f64, hi: f64, bits: u32) -> Self {
        assert!(lo <= hi, "inverted enclosure [{lo}, {hi}]");
        CertifiedValue { lo, hi, bits }
    }

    pub fn exact(v: f64) -> Self {
        CertifiedValue { lo: v, hi: v, bits: 0 }
    }

    pub fn from_dyadic(d: &Dyadic) -> Self {
        let (lo, hi) = d.to_f64_bounds();
        CertifiedValue { lo, hi, bits: d.shift() }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        self.lo + 0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// Translate by an exactly representable offset (outward rounded).
    pub fn offset(&self, by: f64) -> Self {
        let lo = self.lo + by;
        let hi = self.hi + by;
        if self.is_exact() && lo - by == self.lo {
            return CertifiedValue { lo, hi, bits: self.bits };
        }
        CertifiedValue { lo: lo.next_down(), hi: hi.next_up(), bits: self.bits }
    }

    /// Intersect with `[0, 1)`, as used for fractional parts.
    pub fn clamp_unit(&self) -> Self {
        let lo = self.lo.max(0.0);
        let hi = self.hi.min(1.0f64.next_down()).max(lo);
        CertifiedValue { lo, hi, bits: self.bits }
    }
}
