//! Piecewise-constant containers over an interval of the parameter.
//!
//! `Closure::Right` is the α-convention: `[lo, b1]`, then `(b_k, b_{k+1}]`.
//! `Closure::Left` is the λ-convention: `[b_k, b_{k+1})`, last piece `[b_k, hi]`.

use std::fmt;

use crate::affine::AffineFn;
use crate::error::{PspError, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Closure {
    Right,
    Left,
}

impl Closure {
    pub fn flipped(self) -> Closure {
        match self {
            Closure::Right => Closure::Left,
            Closure::Left => Closure::Right,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Interval {
        Interval { lo, hi, lo_closed, hi_closed }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Interval {
        Interval::new(lo, hi, true, true)
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, x: Rational) -> bool {
        (x > self.lo || (self.lo_closed && x == self.lo)) && (x < self.hi || (self.hi_closed && x == self.hi))
    }

    pub fn intersect(&self, o: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.cmp(&o.lo) {
            std::cmp::Ordering::Less => (o.lo, o.lo_closed),
            std::cmp::Ordering::Greater => (self.lo, self.lo_closed),
            std::cmp::Ordering::Equal => (self.lo, self.lo_closed && o.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&o.hi) {
            std::cmp::Ordering::Less => (self.hi, self.hi_closed),
            std::cmp::Ordering::Greater => (o.hi, o.hi_closed),
            std::cmp::Ordering::Equal => (self.hi, self.hi_closed && o.hi_closed),
        };
        let i = Interval { lo, hi, lo_closed, hi_closed };
        (!i.is_empty()).then_some(i)
    }

    /// Image under `x -> axis - x`.
    pub fn reflect(&self, axis: Rational) -> Interval {
        Interval { lo: axis - self.hi, hi: axis - self.lo, lo_closed: self.hi_closed, hi_closed: self.lo_closed }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Segmented<T> {
    lo: Rational,
    hi: Rational,
    closure: Closure,
    breaks: Vec<Rational>,
    pieces: Vec<T>,
}

fn break_allowed(lo: Rational, hi: Rational, closure: Closure, b: Rational) -> bool {
    match closure {
        Closure::Right => lo <= b && b < hi,
        Closure::Left => lo < b && b <= hi,
    }
}

impl<T> Segmented<T> {
    pub fn constant(lo: Rational, hi: Rational, closure: Closure, value: T) -> Segmented<T> {
        assert!(lo <= hi, "empty domain");
        Segmented { lo, hi, closure, breaks: Vec::new(), pieces: vec![value] }
    }

    pub fn lo(&self) -> Rational {
        self.lo
    }

    pub fn hi(&self) -> Rational {
        self.hi
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    pub fn domain(&self) -> Interval {
        Interval::closed(self.lo, self.hi)
    }

    pub fn breaks(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[T] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn in_domain(&self, x: Rational) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Index of the piece holding `x`.
    pub fn index_at(&self, x: Rational) -> usize {
        assert!(self.in_domain(x), "{x} outside [{}, {}]", self.lo, self.hi);
        match self.closure {
            Closure::Right => self.breaks.partition_point(|b| *b < x),
            Closure::Left => self.breaks.partition_point(|b| *b <= x),
        }
    }

    /// Index of the piece holding `x - ε` for infinitesimal `ε > 0`.
    pub fn index_left_of(&self, x: Rational) -> usize {
        if x == self.lo {
            return self.index_at(x);
        }
        assert!(self.in_domain(x));
        self.breaks.partition_point(|b| *b < x)
    }

    pub fn at(&self, x: Rational) -> &T {
        &self.pieces[self.index_at(x)]
    }

    pub fn left_of(&self, x: Rational) -> &T {
        &self.pieces[self.index_left_of(x)]
    }

    pub fn interval(&self, k: usize) -> Interval {
        let n = self.breaks.len();
        let lo = if k == 0 { self.lo } else { self.breaks[k - 1] };
        let hi = if k == n { self.hi } else { self.breaks[k] };
        match self.closure {
            Closure::Right => Interval::new(lo, hi, k == 0, true),
            Closure::Left => Interval::new(lo, hi, true, k == n),
        }
    }

    pub fn intervals(&self) -> impl Iterator<Item = Interval> + '_ {
        (0..self.pieces.len()).map(|k| self.interval(k))
    }

    /// A point of piece `k`: its closed endpoint.
    pub fn representative(&self, k: usize) -> Rational {
        match self.closure {
            Closure::Right => {
                if k < self.breaks.len() {
                    self.breaks[k]
                } else {
                    self.hi
                }
            }
            Closure::Left => {
                if k == 0 {
                    self.lo
                } else {
                    self.breaks[k - 1]
                }
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Interval, &T)> + '_ {
        self.intervals().zip(self.pieces.iter())
    }

    pub fn map<U: PartialEq>(&self, f: impl FnMut(&T) -> U) -> Segmented<U> {
        let pieces = self.pieces.iter().map(f).collect();
        let mut s = Segmented { lo: self.lo, hi: self.hi, closure: self.closure, breaks: self.breaks.clone(), pieces };
        s.canonicalize();
        s
    }

    /// The same data over `axis - x`, with the closure convention flipped.
    pub fn reflect_with<U: PartialEq>(&self, axis: Rational, mut f: impl FnMut(&T) -> U) -> Segmented<U> {
        let breaks = self.breaks.iter().rev().map(|b| axis - *b).collect();
        let pieces = self.pieces.iter().rev().map(&mut f).collect();
        let mut s =
            Segmented { lo: axis - self.hi, hi: axis - self.lo, closure: self.closure.flipped(), breaks, pieces };
        s.canonicalize();
        s
    }
}

impl<T: PartialEq> Segmented<T> {
    /// Validates the layout and merges equal neighbours.
    pub fn from_parts(
        lo: Rational,
        hi: Rational,
        closure: Closure,
        breaks: Vec<Rational>,
        pieces: Vec<T>,
    ) -> Result<Segmented<T>> {
        if lo > hi {
            return Err(PspError::Invalid("empty domain".into()));
        }
        if pieces.len() != breaks.len() + 1 {
            return Err(PspError::Invalid("piece count must be one more than break count".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PspError::Invalid("breakpoints must be strictly increasing".into()));
        }
        if breaks.iter().any(|b| !break_allowed(lo, hi, closure, *b)) {
            return Err(PspError::Invalid("breakpoint leaves an empty piece".into()));
        }
        let mut s = Segmented { lo, hi, closure, breaks, pieces };
        s.canonicalize();
        Ok(s)
    }

    /// Builds a container whose pieces are cut at `cuts` (any order,
    /// duplicates and out-of-range points ignored). `f` receives the piece
    /// index and a point of that piece.
    pub fn tabulate(
        lo: Rational,
        hi: Rational,
        closure: Closure,
        cuts: impl IntoIterator<Item = Rational>,
        mut f: impl FnMut(Rational) -> T,
    ) -> Segmented<T> {
        let mut breaks: Vec<Rational> = cuts.into_iter().filter(|b| break_allowed(lo, hi, closure, *b)).collect();
        breaks.sort();
        breaks.dedup();
        let mut s = Segmented { lo, hi, closure, breaks, pieces: Vec::new() };
        let reps: Vec<Rational> = (0..=s.breaks.len()).map(|k| s.representative(k)).collect();
        s.pieces = reps.into_iter().map(&mut f).collect();
        s.canonicalize();
        s
    }

    pub fn canonicalize(&mut self) {
        let mut breaks = Vec::with_capacity(self.breaks.len());
        let mut pieces: Vec<T> = Vec::with_capacity(self.pieces.len());
        let old_breaks = std::mem::take(&mut self.breaks);
        for (k, p) in std::mem::take(&mut self.pieces).into_iter().enumerate() {
            if let Some(last) = pieces.last() {
                if *last == p {
                    continue;
                }
                breaks.push(old_breaks[k - 1]);
            }
            pieces.push(p);
        }
        self.breaks = breaks;
        self.pieces = pieces;
    }

    pub fn is_canonical(&self) -> bool {
        self.pieces.windows(2).all(|w| w[0] != w[1])
    }

    /// Pointwise combination of two containers over the same domain.
    pub fn zip_with<U, V: PartialEq>(&self, o: &Segmented<U>, mut f: impl FnMut(&T, &U) -> V) -> Segmented<V> {
        assert_eq!((self.lo, self.hi, self.closure), (o.lo, o.hi, o.closure), "domain mismatch");
        let cuts = self.breaks.iter().chain(o.breaks.iter()).copied();
        Segmented::tabulate(self.lo, self.hi, self.closure, cuts, |x| f(self.at(x), o.at(x)))
    }
}

impl Segmented<AffineFn> {
    pub fn eval(&self, x: Rational) -> Rational {
        self.at(x).eval(x)
    }

    /// Pointwise sum of several functions on one domain.
    pub fn sum_of<'a>(
        lo: Rational,
        hi: Rational,
        closure: Closure,
        parts: impl IntoIterator<Item = &'a Segmented<AffineFn>> + Clone,
    ) -> Segmented<AffineFn> {
        let cuts: Vec<Rational> = parts.clone().into_iter().flat_map(|p| p.breaks.iter().copied()).collect();
        Segmented::tabulate(lo, hi, closure, cuts, |x| parts.clone().into_iter().map(|p| *p.at(x)).sum())
    }

    /// Reflection `y = axis - x` of a piecewise-affine function.
    pub fn reflect(&self, axis: Rational) -> Segmented<AffineFn> {
        self.reflect_with(axis, |g| g.reflect(axis))
    }

    /// True when the pieces agree at every breakpoint.
    pub fn is_continuous(&self) -> bool {
        self.breaks.iter().enumerate().all(|(k, b)| self.pieces[k].eval(*b) == self.pieces[k + 1].eval(*b))
    }

    /// Nondecreasing on the whole domain (continuity assumed separately).
    pub fn is_nondecreasing(&self) -> bool {
        self.pieces.iter().zip(self.intervals()).all(|(g, i)| g.slope.signum() >= 0 || i.lo == i.hi)
            && self.breaks.iter().enumerate().all(|(k, b)| self.pieces[k].eval(*b) <= self.pieces[k + 1].eval(*b))
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.pieces.iter().zip(self.intervals()).all(|(g, i)| g.slope.signum() <= 0 || i.lo == i.hi)
            && self.breaks.iter().enumerate().all(|(k, b)| self.pieces[k].eval(*b) >= self.pieces[k + 1].eval(*b))
    }
}

impl<T: fmt::Debug> fmt::Debug for Segmented<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for (i, p) in self.iter() {
            l.entry(&format_args!("{i}: {p:?}"));
        }
        l.finish()
    }
}
