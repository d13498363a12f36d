//! Affine functions of one parameter and root finding on piecewise-affine functions.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{PspError, Result};
use crate::rational::Rational;
use crate::segmented::{Interval, Segmented};

/// `slope * x + intercept`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AffineFn {
    pub slope: Rational,
    pub intercept: Rational,
}

impl AffineFn {
    pub const ZERO: AffineFn = AffineFn { slope: Rational::ZERO, intercept: Rational::ZERO };

    pub fn new(slope: Rational, intercept: Rational) -> AffineFn {
        AffineFn { slope, intercept }
    }

    pub fn constant(c: Rational) -> AffineFn {
        AffineFn { slope: Rational::ZERO, intercept: c }
    }

    /// `x - c`.
    pub fn shifted_identity(c: Rational) -> AffineFn {
        AffineFn { slope: Rational::ONE, intercept: -c }
    }

    pub fn eval(&self, x: Rational) -> Rational {
        self.slope * x + self.intercept
    }

    /// The same function written in the reflected parameter `y = axis - x`.
    pub fn reflect(&self, axis: Rational) -> AffineFn {
        AffineFn { slope: -self.slope, intercept: self.slope * axis + self.intercept }
    }

    /// Unique crossing with the level `c`, if the slope is nonzero.
    pub fn root(&self, c: Rational) -> Option<Rational> {
        if self.slope.is_zero() {
            None
        } else {
            Some((c - self.intercept) / self.slope)
        }
    }
}

impl Add for AffineFn {
    type Output = AffineFn;
    fn add(self, o: AffineFn) -> AffineFn {
        AffineFn { slope: self.slope + o.slope, intercept: self.intercept + o.intercept }
    }
}

impl Sub for AffineFn {
    type Output = AffineFn;
    fn sub(self, o: AffineFn) -> AffineFn {
        self + (-o)
    }
}

impl Neg for AffineFn {
    type Output = AffineFn;
    fn neg(self) -> AffineFn {
        AffineFn { slope: -self.slope, intercept: -self.intercept }
    }
}

impl std::iter::Sum for AffineFn {
    fn sum<I: Iterator<Item = AffineFn>>(iter: I) -> AffineFn {
        iter.fold(AffineFn::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for AffineFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = (self.slope, self.intercept);
        match (a.is_zero(), b.is_zero()) {
            (true, _) => write!(f, "{b}"),
            (false, true) => write!(f, "{a}x"),
            (false, false) if b.signum() < 0 => write!(f, "{a}x - {}", -b),
            _ => write!(f, "{a}x + {b}"),
        }
    }
}

impl fmt::Debug for AffineFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The unique `x` in `window` with `lhs(x) = rhs`.
///
/// `Ok(None)` when there is no crossing. A crossing that is not unique
/// (several isolated roots, or a flat piece sitting on `rhs`) means `lhs`
/// is not strictly monotone where it matters and is reported as an error.
pub fn solve_affine(lhs: &Segmented<AffineFn>, rhs: Rational, window: Interval) -> Result<Option<Rational>> {
    let mut found: Option<Rational> = None;
    for (piece, g) in lhs.intervals().zip(lhs.pieces()) {
        let Some(part) = piece.intersect(&window) else { continue };
        if g.slope.is_zero() {
            if g.intercept == rhs {
                return Err(PspError::NonMonotone);
            }
            continue;
        }
        let x = g.root(rhs).expect("nonzero slope");
        if part.contains(x) {
            if found.is_some_and(|y| y != x) {
                return Err(PspError::NonMonotone);
            }
            found = Some(x);
        }
    }
    Ok(found)
}

/// The least `x` in `window` with `lhs(x) = rhs`, allowing flat stretches.
///
/// Used where `lhs` is only weakly monotone: the crossing sought is the
/// left end of the level set.
pub fn least_root(lhs: &Segmented<AffineFn>, rhs: Rational, window: Interval) -> Option<Rational> {
    for (piece, g) in lhs.intervals().zip(lhs.pieces()) {
        let Some(part) = piece.intersect(&window) else { continue };
        if g.slope.is_zero() {
            if g.intercept == rhs {
                return Some(part.lo);
            }
            continue;
        }
        let x = g.root(rhs).expect("nonzero slope");
        if part.contains(x) {
            return Some(x);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, r};
    use crate::segmented::Closure;

    #[test]
    fn simple_root() {
        let f = Segmented::constant(r(0), r(2), Closure::Right, AffineFn::shifted_identity(r(1)));
        assert_eq!(solve_affine(&f, r(0), f.domain()).unwrap(), Some(r(1)));
        assert_eq!(solve_affine(&f, r(5), f.domain()).unwrap(), None);
    }

    #[test]
    fn crossing_at_thirteen_halves() {
        // rate sum of users 4 and 5 after the second step, over (4, 10]
        let f = Segmented::from_parts(
            r(0),
            r(10),
            Closure::Right,
            vec![r(4)],
            vec![AffineFn::new(r(2), r(-6)), AffineFn::new(r(1), r(-2))],
        )
        .unwrap();
        let w = Interval::new(r(4), r(10), false, true);
        assert_eq!(solve_affine(&f, q(9, 2), w).unwrap(), Some(q(13, 2)));
    }

    #[test]
    fn flat_on_level_is_rejected() {
        let f = Segmented::constant(r(0), r(2), Closure::Right, AffineFn::constant(r(3)));
        assert_eq!(solve_affine(&f, r(3), f.domain()), Err(PspError::NonMonotone));
        assert_eq!(least_root(&f, r(3), f.domain()), Some(r(0)));
    }

    #[test]
    fn reflect_matches_pointwise() {
        let g = AffineFn::new(q(3, 2), r(-7));
        let axis = r(10);
        for x in [r(0), q(13, 2), r(10)] {
            assert_eq!(g.reflect(axis).eval(axis - x), g.eval(x));
        }
    }

    #[test]
    fn matches_grid_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = q(rng.gen_range(1..6), rng.gen_range(1..4)) * if rng.gen_bool(0.5) { r(1) } else { r(-1) };
            let root = q(rng.gen_range(0..60), 6);
            let f = AffineFn::new(a, -a * root);
            let seg = Segmented::constant(r(0), r(10), Closure::Right, f);
            let got = solve_affine(&seg, r(0), seg.domain()).unwrap();
            // scan the grid of step 1/6 for a sign change or exact zero
            let mut scan = None;
            for k in 0..=60 {
                let x = q(k, 6);
                if f.eval(x).is_zero() {
                    scan = Some(x);
                }
            }
            assert_eq!(got, scan);
        }
    }
}
