use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionSign {
    Minus,
    Plus,
}

/// The parallelograms used to localise `({n^alpha}, {r alpha n^(alpha-1)})`:
///
/// * minus: `0 <= y0 < 1 - eps` and `0 <= y0 + (k-1) y1 < 1 - eps`
/// * plus: `-eps <= y0 < 1` and `-eps <= y0 + (k-1) y1 < 1`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexRegion {
    pub k: u32,
    pub epsilon: f64,
    pub sign: RegionSign,
}

impl ConvexRegion {
    pub fn new(k: u32, epsilon: f64, sign: RegionSign) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain("region needs k >= 2"));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::Domain("epsilon must lie in [0, 1)"));
        }
        Ok(ConvexRegion { k, epsilon, sign })
    }

    fn bounds(&self) -> (f64, f64) {
        match self.sign {
            RegionSign::Minus => (0.0, 1.0 - self.epsilon),
            RegionSign::Plus => (-self.epsilon, 1.0),
        }
    }

    pub fn contains(&self, y0: f64, y1: f64) -> bool {
        let (lo, hi) = self.bounds();
        let s = y0 + (self.k - 1) as f64 * y1;
        lo <= y0 && y0 < hi && lo <= s && s < hi
    }

    /// Certified membership of the box `[y0.0, y0.1] x [y1.0, y1.1]`:
    /// `Some(true)` if the box is inside, `Some(false)` if disjoint.
    pub fn classify(&self, y0: (f64, f64), y1: (f64, f64)) -> Option<bool> {
        let (lo, hi) = self.bounds();
        let m = (self.k - 1) as f64;
        // The linear form is monotone in each coordinate; widen by its rounding.
        let s_lo = y0.0 + m * y1.0;
        let s_hi = y0.1 + m * y1.1;
        let slack = 4.0 * f64::EPSILON * (s_lo.abs().max(s_hi.abs()) + 1.0);
        let (s_lo, s_hi) = (s_lo - slack, s_hi + slack);
        if lo <= y0.0 && y0.1 < hi && lo <= s_lo && s_hi < hi {
            Some(true)
        } else if y0.1 < lo || y0.0 >= hi || s_hi < lo || s_lo >= hi {
            Some(false)
        } else {
            None
        }
    }

    /// Area of the part with `0 <= y0 < 1`, which is where `{n^alpha}` lives.
    ///
    /// For the minus sign this is the whole area; for the plus sign the slice
    /// `-eps <= y0 < 0` is cut away, leaving `(1 + eps) / (k - 1)`.
    pub fn strip_measure(&self) -> f64 {
        let m = (self.k - 1) as f64;
        match self.sign {
            RegionSign::Minus => region_measure(self),
            RegionSign::Plus => (1.0 + self.epsilon) / m,
        }
    }

    /// `(bottom-left, top-right)` of a bounding box.
    pub fn bounding_box(&self) -> ((f64, f64), (f64, f64)) {
        let (lo, hi) = self.bounds();
        let m = (self.k - 1) as f64;
        ((lo, (lo - hi) / m), (hi, (hi - lo) / m))
    }
}

/// Area `(1 -+ eps)^2 / (k - 1)`.
pub fn region_measure(region: &ConvexRegion) -> f64 {
    let side = match region.sign {
        RegionSign::Minus => 1.0 - region.epsilon,
        RegionSign::Plus => 1.0 + region.epsilon,
    };
    side * side / (region.k - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::grid_measure;

    #[test]
    fn closed_forms() {
        assert_eq!(region_measure(&ConvexRegion::new(2, 0.0, RegionSign::Minus).unwrap()), 1.0);
        assert_eq!(region_measure(&ConvexRegion::new(3, 0.5, RegionSign::Minus).unwrap()), 0.125);
        assert!((region_measure(&ConvexRegion::new(2, 0.1, RegionSign::Plus).unwrap()) - 1.21).abs() < 1e-15);
        assert!(ConvexRegion::new(1, 0.0, RegionSign::Plus).is_err());
        assert!(ConvexRegion::new(2, 1.0, RegionSign::Plus).is_err());
    }

    #[test]
    fn grid_integration_agrees() {
        for k in [2, 3, 5] {
            for eps in [0.0, 0.1, 0.5] {
                for sign in [RegionSign::Minus, RegionSign::Plus] {
                    let c = ConvexRegion::new(k, eps, sign).unwrap();
                    let g = grid_measure(&c, 1e-3);
                    assert!((g - region_measure(&c)).abs() <= 1e-3, "k={k} eps={eps} {sign:?}: {g}");
                }
            }
        }
    }

    #[test]
    fn membership_edges() {
        let c = ConvexRegion::new(3, 0.0, RegionSign::Minus).unwrap();
        assert!(c.contains(0.0, 0.0));
        assert!(!c.contains(1.0, 0.0));
        assert!(c.contains(0.5, -0.25));
        assert!(!c.contains(0.5, 0.25)); // 0.5 + 2 * 0.25 = 1
        assert_eq!(c.classify((0.1, 0.2), (0.1, 0.1)), Some(true));
        assert_eq!(c.classify((0.9, 0.95), (0.3, 0.4)), Some(false));
        assert_eq!(c.classify((0.4, 0.6), (0.2, 0.3)), None);
    }
}
