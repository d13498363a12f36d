//! Normalized submodular set functions and the residual `f_α`.

mod bits;
mod gf2;
mod graph;
mod table;

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

pub use bits::BitAssignmentSource;
pub use gf2::{gf2_rank, MatrixSourceGF2};
pub use graph::WeightedGraphCut;
pub use table::TableOracle;

use crate::error::{PspError, Result};
use crate::partition::Partition;
use crate::rational::Rational;
use crate::set::{self, Set};

pub const CHECK_LIMIT: usize = 12;

/// A set function on subsets of `0..size()` with `f(∅) = 0`.
pub trait Oracle: Send + Sync {
    fn size(&self) -> usize;

    fn eval(&self, x: Set) -> Rational;

    /// True when `f` is known to be nondecreasing.
    fn is_monotone(&self) -> bool {
        false
    }

    /// True for cut functions of weighted graphs.
    fn is_graph_cut(&self) -> bool {
        false
    }

    /// A lower bound on `min f(X)` over nonempty `X`, when cheaply known.
    fn lower_bound(&self) -> Option<Rational> {
        None
    }
}

impl<O: Oracle + ?Sized> Oracle for &O {
    fn size(&self) -> usize {
        (**self).size()
    }
    fn eval(&self, x: Set) -> Rational {
        (**self).eval(x)
    }
    fn is_monotone(&self) -> bool {
        (**self).is_monotone()
    }
    fn is_graph_cut(&self) -> bool {
        (**self).is_graph_cut()
    }
    fn lower_bound(&self) -> Option<Rational> {
        (**self).lower_bound()
    }
}

impl<O: Oracle + ?Sized> Oracle for Box<O> {
    fn size(&self) -> usize {
        (**self).size()
    }
    fn eval(&self, x: Set) -> Rational {
        (**self).eval(x)
    }
    fn is_monotone(&self) -> bool {
        (**self).is_monotone()
    }
    fn is_graph_cut(&self) -> bool {
        (**self).is_graph_cut()
    }
    fn lower_bound(&self) -> Option<Rational> {
        (**self).lower_bound()
    }
}

pub fn ground(o: &dyn Oracle) -> Set {
    set::full(o.size())
}

/// `f(V)`.
pub fn total(o: &dyn Oracle) -> Rational {
    o.eval(ground(o))
}

/// `f_α(X) = α - f(V) + f(X)`, and `0` on the empty set.
pub fn residual(o: &dyn Oracle, alpha: Rational, x: Set) -> Rational {
    if x == 0 {
        Rational::ZERO
    } else {
        alpha - total(o) + o.eval(x)
    }
}

/// `f_α[P]`, the residual summed over blocks.
pub fn partition_value(o: &dyn Oracle, alpha: Rational, p: &Partition) -> Rational {
    p.blocks().iter().map(|b| residual(o, alpha, *b)).sum()
}

/// `f[P]`, the plain sum over blocks.
pub fn sum_over(o: &dyn Oracle, blocks: &[Set]) -> Rational {
    blocks.iter().map(|b| o.eval(*b)).sum()
}

/// Exhaustive submodularity check; `Ok(false)` on any violation.
pub fn check_submodular(o: &dyn Oracle) -> Result<bool> {
    Ok(find_violation(o)?.is_none())
}

/// A violating pair `(X, Y)` with `f(X) + f(Y) < f(X ∩ Y) + f(X ∪ Y)`.
///
/// Uses the local form `f(S+i) + f(S+j) >= f(S) + f(S+i+j)`, which is
/// equivalent to the pairwise inequality over all `X, Y`.
pub fn find_violation(o: &dyn Oracle) -> Result<Option<(Set, Set)>> {
    let n = o.size();
    if n > CHECK_LIMIT {
        return Err(PspError::TooLarge { what: "submodularity check", size: n, limit: CHECK_LIMIT });
    }
    let vals: Vec<Rational> = (0..1u64 << n).map(|s| o.eval(s)).collect();
    Ok(local_violation(n, |s| vals[s as usize]))
}

pub(crate) fn local_violation(n: usize, f: impl Fn(Set) -> Rational) -> Option<(Set, Set)> {
    for s in 0..1u64 << n {
        for i in 0..n {
            if set::contains(s, i) {
                continue;
            }
            for j in i + 1..n {
                if set::contains(s, j) {
                    continue;
                }
                let (a, b) = (s | set::singleton(i), s | set::singleton(j));
                if f(a) + f(b) < f(s) + f(a | b) {
                    return Some((a, b));
                }
            }
        }
    }
    None
}

/// Parameter window `[α_lo, f(V)]` used by every algorithm.
///
/// For monotone `f` the window is `[0, f(V)]`. Otherwise the lower end is
/// pushed down far enough that the singletons are the finest minimizer of
/// `f_α[·]` there, for the whole ground set and for every prefix.
pub fn alpha_window(o: &dyn Oracle) -> Result<(Rational, Rational)> {
    let hi = total(o);
    if o.is_monotone() {
        return Ok((Rational::ZERO, hi));
    }
    let n = o.size();
    let m = match o.lower_bound() {
        Some(m) => m,
        None => {
            if n > 22 {
                return Err(PspError::TooLarge { what: "window bound scan", size: n, limit: 22 });
            }
            (1..1u64 << n).map(|s| o.eval(s)).min().expect("nonempty")
        }
    };
    let sing: Rational = (0..n).map(|i| o.eval(set::singleton(i)).max(Rational::ZERO)).sum();
    let bound = sing - Rational::from(n) * m.min(Rational::ZERO);
    Ok(((hi - bound).min(Rational::ZERO), hi))
}

/// Thread-safe memo around another oracle; counts underlying evaluations.
pub struct Memoized<O> {
    inner: O,
    cache: RwLock<HashMap<Set, Rational>>,
    misses: AtomicU64,
}

impl<O: Oracle> Memoized<O> {
    pub fn new(inner: O) -> Memoized<O> {
        Memoized { inner, cache: RwLock::new(HashMap::new()), misses: AtomicU64::new(0) }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }
}

impl<O: Oracle> Oracle for Memoized<O> {
    fn size(&self) -> usize {
        self.inner.size()
    }

    fn eval(&self, x: Set) -> Rational {
        if let Some(v) = self.cache.read().expect("poisoned").get(&x) {
            return *v;
        }
        let v = self.inner.eval(x);
        self.misses.fetch_add(1, Ordering::Relaxed);
        self.cache.write().expect("poisoned").insert(x, v);
        v
    }

    fn is_monotone(&self) -> bool {
        self.inner.is_monotone()
    }

    fn is_graph_cut(&self) -> bool {
        self.inner.is_graph_cut()
    }

    fn lower_bound(&self) -> Option<Rational> {
        self.inner.lower_bound()
    }
}

/// Counts every call; used to report oracle traffic.
pub struct Counting<O> {
    inner: O,
    calls: AtomicU64,
}

impl<O: Oracle> Counting<O> {
    pub fn new(inner: O) -> Counting<O> {
        Counting { inner, calls: AtomicU64::new(0) }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

impl<O: Oracle> Oracle for Counting<O> {
    fn size(&self) -> usize {
        self.inner.size()
    }
    fn eval(&self, x: Set) -> Rational {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.eval(x)
    }
    fn is_monotone(&self) -> bool {
        self.inner.is_monotone()
    }
    fn is_graph_cut(&self) -> bool {
        self.inner.is_graph_cut()
    }
    fn lower_bound(&self) -> Option<Rational> {
        self.inner.lower_bound()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{q, r};
    use crate::set::from_indices;

    #[test]
    fn example_one_values() {
        let o = fixtures::example1();
        assert_eq!(o.eval(from_indices([3])), r(8));
        assert_eq!(o.eval(from_indices([3, 4])), r(8));
        assert_eq!(total(&o), r(10));
        assert_eq!(residual(&o, r(3), from_indices([3])), r(1));
        assert_eq!(residual(&o, r(6), from_indices([3])), r(4));
        assert_eq!(residual(&o, r(6), 0), r(0));
    }

    #[test]
    fn partition_values() {
        let o = fixtures::example1();
        let p = Partition::new(vec![from_indices([0, 3, 4]), from_indices([1]), from_indices([2])]).unwrap();
        // f({1,4,5}) = 9, f({2}) = 4, f({3}) = 4
        let direct = (q(13, 2) - r(10) + r(9)) +(q(13, 2) - r(10) + r(4)) + (q(13, 2) - r(10) + r(4));
        assert_eq!(partition_value(&o, q(13, 2), &p), direct);
        assert_eq!(direct, q(13, 2));
        let v = Partition::whole(ground(&o));
        assert_eq!(partition_value(&o, r(3), &v), r(3));
        let tri = fixtures::triangle();
        assert_eq!(partition_value(&tri, r(0), &Partition::singletons(ground(&tri))), r(6));
    }

    #[test]
    fn submodularity_checks() {
        assert!(check_submodular(&fixtures::example1()).unwrap());
        assert!(check_submodular(&fixtures::triangle()).unwrap());
        assert!(check_submodular(&fixtures::example3()).unwrap());
    }

    #[test]
    fn residual_is_linear_in_alpha() {
        let o = fixtures::example1();
        for x in 1..32u64 {
            assert_eq!(residual(&o, q(13, 2), x) - residual(&o, r(2), x), q(13, 2) - r(2));
        }
    }

    #[test]
    fn windows() {
        assert_eq!(alpha_window(&fixtures::example1()).unwrap(), (r(0), r(10)));
        // cut function: f(V) = 0, singletons sum to 6
        assert_eq!(alpha_window(&fixtures::triangle()).unwrap(), (r(-6), r(0)));
    }

    #[test]
    fn memo_counts_misses() {
        let m = Memoized::new(fixtures::example1());
        for _ in 0..3 {
            m.eval(7);
        }
        assert_eq!(m.misses(), 1);
        assert_eq!(m.eval(7), fixtures::example1().eval(7));
    }
}
