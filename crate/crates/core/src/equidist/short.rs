use crate::alpha::AlphaContext;
use crate::certreal::exact::Dyadic;
use crate::equidist::phase::PhaseStream;
use crate::equidist::regions::ConvexRegion;
use crate::equidist::WindowSpec;
use crate::error::Result;
use crate::math;

/// A set of points `(y0, y1)` tested against the fractional-part pairs.
///
/// Membership is counted with multiplicity over the translates `(y0, y1 - s)`,
/// `s` an integer, so bounded sets that stick out of the unit square in the
/// `y1` direction are handled the same way as sets inside it.
pub trait Membership {
    /// Least and greatest number of translates in the set over every point of
    /// the box `[y0.0, y0.1] x [y1.0, y1.1]` (a subset of `[0, 1)^2`).
    fn multiplicity(&self, y0: (f64, f64), y1: (f64, f64)) -> (u32, u32);
    /// Measure of the set within the strip `[0, 1) x R`.
    fn measure(&self) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct UnitSquare;

#[derive(Debug, Clone, Copy, Default)]
pub struct EmptySet;

/// `[x0, x1) x [y0, y1)` inside the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Membership for UnitSquare {
    fn multiplicity(&self, _: (f64, f64), _: (f64, f64)) -> (u32, u32) {
        (1, 1)
    }

    fn measure(&self) -> f64 {
        1.0
    }
}

impl Membership for EmptySet {
    fn multiplicity(&self, _: (f64, f64), _: (f64, f64)) -> (u32, u32) {
        (0, 0)
    }

    fn measure(&self) -> f64 {
        0.0
    }
}

fn half_open(lo: f64, hi: f64, a: f64, b: f64) -> Option<bool> {
    if a <= lo && hi < b {
        Some(true)
    } else if hi < a || lo >= b {
        Some(false)
    } else {
        None
    }
}

fn tally(c: Option<bool>) -> (u32, u32) {
    match c {
        Some(true) => (1, 1),
        Some(false) => (0, 0),
        None => (0, 1),
    }
}

impl Membership for Rect {
    fn multiplicity(&self, y0: (f64, f64), y1: (f64, f64)) -> (u32, u32) {
        let c = match (half_open(y0.0, y0.1, self.x0, self.x1), half_open(y1.0, y1.1, self.y0, self.y1)) {
            (Some(true), Some(true)) => Some(true),
            (Some(false), _) | (_, Some(false)) => Some(false),
            _ => None,
        };
        tally(c)
    }

    fn measure(&self) -> f64 {
        let w = (self.x1.min(1.0) - self.x0.max(0.0)).max(0.0);
        let h = (self.y1.min(1.0) - self.y0.max(0.0)).max(0.0);
        w * h
    }
}

impl Membership for ConvexRegion {
    fn multiplicity(&self, y0: (f64, f64), y1: (f64, f64)) -> (u32, u32) {
        let ((_, lo), (_, hi)) = self.bounding_box();
        let first = math::floor(y1.0 - hi) as i64;
        let last = math::ceil(y1.1 - lo) as i64;
        let (mut a, mut b) = (0, 0);
        for s in first..=last {
            let (x, y) = tally(self.classify(y0, (y1.0 - s as f64, y1.1 - s as f64)));
            a += x;
            b += y;
        }
        (a, b)
    }

    fn measure(&self) -> f64 {
        self.strip_measure()
    }
}

/// Pieces of `[lo, hi] mod 1` inside `[0, 1)`.
fn unit_pieces(lo: f64, hi: f64) -> [Option<(f64, f64)>; 2] {
    let top = 1.0f64.next_down();
    if hi - lo >= 1.0 {
        return [Some((0.0, top)), None];
    }
    let fl = math::floor(lo);
    let (lo, hi) = (lo - fl, hi - fl);
    if hi < 1.0 {
        [Some((lo, hi)), None]
    } else {
        [Some((lo, top)), Some((0.0, (hi - 1.0).min(top)))]
    }
}

/// Multiplicity bounds over the set of possible fractional-part pairs.
fn multiplicity_mod1(set: &dyn Membership, y0: (f64, f64), y1: (f64, f64)) -> (u32, u32) {
    let (mut lo, mut hi) = (u32::MAX, 0);
    for a in unit_pieces(y0.0, y0.1).into_iter().flatten() {
        for b in unit_pieces(y1.0, y1.1).into_iter().flatten() {
            let (x, y) = set.multiplicity(a, b);
            lo = lo.min(x);
            hi = hi.max(y);
        }
    }
    (lo, hi)
}

/// Re-decide a point with big-integer enclosures up the precision ladder.
fn refine(ctx: &AlphaContext, set: &dyn Membership, n: u64, r: u64, coarse: (u32, u32)) -> (u32, u32) {
    let e = ctx.exponent();
    let (p, q) = (e.numer() as i64, e.denom());
    let frac = |d: &Dyadic| {
        let f = d.floor_hi();
        d.sub_int(&f).to_f64_bounds()
    };
    let mut best = coarse;
    for bits in ctx.policy.ladder().filter(|&b| b >= 128) {
        let x = Dyadic::point_u64(n, bits);
        let v = x.pow_ratio(p, q).expect("nonnegative");
        let s = x.pow_ratio(p - q as i64, q).expect("nonnegative").mul_u64(r * p as u64).div_u64(q as u64);
        let m = multiplicity_mod1(set, frac(&v), frac(&s));
        best = (best.0.max(m.0), best.1.min(m.1));
        if best.0 == best.1 {
            break;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortIntervalCount {
    pub window: WindowSpec,
    pub total: u64,
    /// Hits certified for every point of each enclosure.
    pub count_min: u64,
    /// Hits possible for some point of an enclosure; equal to `count_min`
    /// unless a value sat on a boundary beyond the precision cap.
    pub count_max: u64,
    /// `midpoint count / d^(beta-1)`.
    pub density: f64,
    /// `beta (c2 - c1) mu / (r alpha)^beta`.
    pub predicted: f64,
}

/// Count `n in [M, N)` with `({n^alpha}, {r alpha n^(alpha-1)} - s) in set`, summed over integers `s`.
pub fn short_interval_count(ctx: &AlphaContext, w: &WindowSpec, set: &dyn Membership) -> Result<ShortIntervalCount> {
    w.check()?;
    let h2r = w.r as i64;
    let (mut lo, mut hi) = (0u64, 0u64);
    for pt in PhaseStream::new(ctx, w.m, w.n) {
        let (a, ea) = pt.phase(1, 0);
        let (b, eb) = pt.phase(0, h2r);
        let mut m = multiplicity_mod1(set, (a - ea, a + ea), (b - eb, b + eb));
        if m.0 != m.1 {
            m = refine(ctx, set, pt.n, w.r, m);
        }
        lo += m.0 as u64;
        hi += m.1 as u64;
    }
    let b = ctx.beta();
    let mid = 0.5 * (lo + hi) as f64;
    Ok(ShortIntervalCount {
        window: *w,
        total: w.len(),
        count_min: lo,
        count_max: hi,
        density: mid / ctx.growth(w.d as f64),
        predicted: b * (w.c2 - w.c1) * set.measure() / math::pow(w.r as f64 * ctx.alpha(), b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::exact_phase;

    fn ctx() -> AlphaContext {
        AlphaContext::parse("1.5").unwrap()
    }

    #[test]
    fn trivial_sets() {
        let c = ctx();
        let w = WindowSpec::new(&c, 1, 5000, 0.0, 1.0).unwrap();
        let full = short_interval_count(&c, &w, &UnitSquare).unwrap();
        assert_eq!((full.count_min, full.count_max), (w.len(), w.len()));
        let none = short_interval_count(&c, &w, &EmptySet).unwrap();
        assert_eq!(none.count_max, 0);
    }

    #[test]
    fn matches_exact_membership() {
        let c = ctx();
        let rect = Rect { x0: 0.0, x1: 0.5, y0: 0.0, y1: 0.5 };
        for (r, d) in [(1u64, 3000u64), (2, 20_000), (3, 100)] {
            let w = WindowSpec::new(&c, r, d, 0.0, 1.0).unwrap();
            let got = short_interval_count(&c, &w, &rect).unwrap();
            let want = (w.m..w.n)
                .filter(|&n| rect.classify_point(exact_phase(&c, n, 1, 0, r), exact_phase(&c, n, 0, 1, r)))
                .count() as u64;
            assert!(got.count_min <= want && want <= got.count_max);
            let region = ConvexRegion::new(3, 0.1, crate::equidist::RegionSign::Plus).unwrap();
            let got = short_interval_count(&c, &w, &region).unwrap();
            let want: u64 = (w.m..w.n)
                .map(|n| {
                    let (y0, y1) = (exact_phase(&c, n, 1, 0, r), exact_phase(&c, n, 0, 1, r));
                    (-3..=3).filter(|&s| region.contains(y0, y1 - s as f64)).count() as u64
                })
                .sum();
            assert!(got.count_min <= want && want <= got.count_max);
            assert_eq!(got.count_min, got.count_max);
        }
    }

    #[test]
    fn wider_window_never_counts_less() {
        let c = ctx();
        let set = ConvexRegion::new(3, 0.1, crate::equidist::RegionSign::Minus).unwrap();
        let a = WindowSpec::new(&c, 2, 4000, 0.0, 1.0).unwrap();
        let b = WindowSpec::new(&c, 2, 4000, 0.0, 2.0).unwrap();
        let ca = short_interval_count(&c, &a, &set).unwrap();
        let cb = short_interval_count(&c, &b, &set).unwrap();
        assert!(cb.count_min >= ca.count_max);
    }

    #[test]
    fn wrap_pieces() {
        assert_eq!(unit_pieces(0.2, 0.3), [Some((0.2, 0.3)), None]);
        let p = unit_pieces(-0.01, 0.02);
        assert!(p[0].unwrap().0 > 0.98 && p[1].unwrap().1 < 0.03);
    }

    #[test]
    fn convex_translates() {
        // k = 2, plus: y1 ranges over (-1 - eps, 1 + eps), so a point near y1 = 0
        // can be counted from two translates.
        let c = ConvexRegion::new(2, 0.1, crate::equidist::RegionSign::Plus).unwrap();
        assert_eq!(c.multiplicity((0.5, 0.5), (0.45, 0.45)), (2, 2));
        assert_eq!(c.multiplicity((0.5, 0.5), (0.3, 0.3)), (1, 1));
        assert_eq!(Membership::measure(&c), 1.1);
    }

    impl Rect {
        fn classify_point(&self, a: f64, b: f64) -> bool {
            self.x0 <= a && a < self.x1 && self.y0 <= b && b < self.y1
        }
    }
}
