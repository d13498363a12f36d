//! Dilworth truncation `f̂_α(V) = min_P f_α[P]` at a fixed `α`.

use crate::error::{PspError, Result};
use crate::oracle::{self, residual, Oracle};
use crate::partition::{enumerate_partitions, meet, Partition};
use crate::rational::Rational;
use crate::set::{self, Set};
use crate::sfm::{sfm_forced_with, Backend, FusedGround};

pub const BRUTE_USERS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DilworthResult {
    pub alpha: Rational,
    pub rate: Vec<Rational>,
    pub partition: Partition,
    pub value: Rational,
    pub probes: u64,
}

fn check_alpha(o: &dyn Oracle, alpha: Rational) -> Result<()> {
    let (lo, hi) = oracle::alpha_window(o)?;
    if alpha < lo || alpha > hi {
        return Err(PspError::OutOfRange { value: alpha, lo, hi });
    }
    Ok(())
}

/// Coordinate-wise saturation: returns a rate in the base polytope of
/// `f̂_α` and the finest minimizing partition.
pub fn coord_sat_cap(o: &dyn Oracle, alpha: Rational, order: &[usize]) -> Result<DilworthResult> {
    coord_sat_cap_with(Backend::Brute, o, alpha, order)
}

pub fn coord_sat_cap_with(backend: Backend, o: &dyn Oracle, alpha: Rational, order: &[usize]) -> Result<DilworthResult> {
    set::check_permutation(order, o.size())?;
    check_alpha(o, alpha)?;
    let fv = oracle::total(o);
    let mut rate = vec![alpha - fv; o.size()];
    let mut q = Partition::new(vec![])?;
    let mut probes = 0;
    for &phi in order {
        let ground = FusedGround::extend(&q, phi);
        let g = |x: Set| residual(o, alpha, x) - set::members(x).map(|m| rate[m]).sum::<Rational>();
        let res = sfm_forced_with(backend, &g, &ground)?;
        probes += res.probe_count;
        rate[phi] += res.min_value;
        q = q.with_block(set::singleton(phi)).merge_meeting(res.minimal);
    }
    let value = rate.iter().sum();
    Ok(DilworthResult { alpha, rate, partition: q, value, probes })
}

/// Minimum of `f_α[P]` over partitions of `carrier` and the finest minimizer.
pub fn dilworth_brute_on(o: &dyn Oracle, alpha: Rational, carrier: Set) -> Result<(Rational, Partition)> {
    if set::len(carrier) > BRUTE_USERS {
        return Err(PspError::TooLarge { what: "partition enumeration", size: set::len(carrier), limit: BRUTE_USERS });
    }
    let mut best: Option<(Rational, Partition)> = None;
    for p in enumerate_partitions(carrier)? {
        let v = oracle::partition_value(o, alpha, &p);
        best = match best {
            None => Some((v, p)),
            Some((bv, bp)) => match v.cmp(&bv) {
                std::cmp::Ordering::Less => Some((v, p)),
                std::cmp::Ordering::Equal => Some((bv, meet(&bp, &p))),
                std::cmp::Ordering::Greater => Some((bv, bp)),
            },
        };
    }
    Ok(best.expect("at least one partition"))
}

/// [`dilworth_brute_on`] over the whole ground set.
pub fn dilworth_brute(o: &dyn Oracle, alpha: Rational) -> Result<(Rational, Partition)> {
    dilworth_brute_on(o, alpha, oracle::ground(o))
}

/// Subsets checked exhaustively by [`slepian_wolf_violation`] up to this size.
pub const SW_EXHAUSTIVE: usize = 15;

/// A set `X ⊊ V` with `r(X) < f(V) - f(V∖X)`, if any. Exhaustive up to
/// [`SW_EXHAUSTIVE`] users; beyond that only sets of at most two users and
/// their complements are tried.
pub fn slepian_wolf_violation(o: &dyn Oracle, rate: &[Rational]) -> Option<Set> {
    let v = oracle::ground(o);
    let fv = oracle::total(o);
    let bad = |x: Set| x != 0 && x != v && set::members(x).map(|m| rate[m]).sum::<Rational>() < fv - o.eval(v & !x);
    if o.size() <= SW_EXHAUSTIVE {
        return set::subsets(v).find(|x| bad(*x));
    }
    let n = o.size();
    let small = (0..n).flat_map(|i| (i..n).map(move |j| set::singleton(i) | set::singleton(j)));
    small.flat_map(|x| [x, v & !x]).find(|x| bad(*x))
}
