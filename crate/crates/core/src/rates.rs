//! Per-user piecewise-affine rates.

use crate::affine::AffineFn;
use crate::rational::Rational;
use crate::segmented::{Closure, Segmented};
use crate::set::{self, Set};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedRateVector {
    coords: Vec<Segmented<AffineFn>>,
}

impl SegmentedRateVector {
    /// Every coordinate equal to `g` on `[lo, hi]`.
    pub fn uniform(n: usize, lo: Rational, hi: Rational, closure: Closure, g: AffineFn) -> SegmentedRateVector {
        SegmentedRateVector { coords: vec![Segmented::constant(lo, hi, closure, g); n] }
    }

    pub fn from_coords(coords: Vec<Segmented<AffineFn>>) -> SegmentedRateVector {
        SegmentedRateVector { coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coord(&self, i: usize) -> &Segmented<AffineFn> {
        &self.coords[i]
    }

    pub fn coords(&self) -> &[Segmented<AffineFn>] {
        &self.coords
    }

    pub fn set_coord(&mut self, i: usize, g: Segmented<AffineFn>) {
        self.coords[i] = g;
    }

    pub fn lo(&self) -> Rational {
        self.coords[0].lo()
    }

    pub fn hi(&self) -> Rational {
        self.coords[0].hi()
    }

    pub fn closure(&self) -> Closure {
        self.coords[0].closure()
    }

    /// The rate vector at one parameter value.
    pub fn at(&self, x: Rational) -> Vec<Rational> {
        self.coords.iter().map(|c| c.eval(x)).collect()
    }

    /// `x ↦ r_x(X)`.
    pub fn sum_over(&self, s: Set) -> Segmented<AffineFn> {
        let parts: Vec<&Segmented<AffineFn>> = set::members(s).map(|i| &self.coords[i]).collect();
        if parts.is_empty() {
            return Segmented::constant(self.lo(), self.hi(), self.closure(), AffineFn::ZERO);
        }
        Segmented::sum_of(self.lo(), self.hi(), self.closure(), parts.iter().copied())
    }

    /// Value of `r_x(X)` at one point.
    pub fn sum_at(&self, s: Set, x: Rational) -> Rational {
        set::members(s).map(|i| self.coords[i].eval(x)).sum()
    }

    /// Union of the breakpoints of the coordinates in `s`.
    pub fn breaks_of(&self, s: Set) -> Vec<Rational> {
        let mut b: Vec<Rational> = set::members(s).flat_map(|i| self.coords[i].breaks().iter().copied()).collect();
        b.sort();
        b.dedup();
        b
    }

    /// The same rates over `y = axis - x`.
    pub fn reflect(&self, axis: Rational) -> SegmentedRateVector {
        SegmentedRateVector { coords: self.coords.iter().map(|c| c.reflect(axis)).collect() }
    }
}
