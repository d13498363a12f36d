//! Kolmogorov-style parametric saturation over the unfused prefix of users,
//! in the λ-domain. Rates stay nonincreasing in λ, which makes the parametric
//! minimizers nest; the strong map is only non-strict, so a breakpoint is
//! accepted only after checking the minimizer just left of it.

use std::cell::Cell;

use crate::affine::{least_root, AffineFn};
use crate::error::{PspError, Result};
use crate::oracle::{self, Oracle};
use crate::partition::Partition;
use crate::psp::{derive_report, require_users, Algorithm, Psp, PspReport};
use crate::rates::SegmentedRateVector;
use crate::rational::Rational;
use crate::segmented::{Closure, Interval, Segmented};
use crate::set::{self, Set};
use crate::sfm::{sfm_forced_with, sfm_left_limit, Backend, FusedGround};

/// `U^(0) ⊋ … ⊋ U^(q')`, largest first, with `λ_1 < … < λ_{q'}`;
/// `sets[k]` is the minimal minimizer on `[λ_k, λ_{k+1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KolChain {
    pub user: usize,
    pub sets: Vec<Set>,
    pub critical: Vec<Rational>,
}

impl KolChain {
    pub fn set_at(&self, lambda: Rational) -> Set {
        self.sets[self.critical.partition_point(|c| *c <= lambda)]
    }
}

#[derive(Debug, Clone)]
pub struct KolIteration {
    pub chain: KolChain,
    pub sfm_calls: u64,
    /// Searches that had to continue because the minimizer just left of a
    /// probe differed from the larger end.
    pub hidden_splits: u64,
    pub rates_lambda: SegmentedRateVector,
    pub partition_lambda: Segmented<Partition>,
}

#[derive(Debug, Clone)]
pub struct KolRun {
    pub iterations: Vec<KolIteration>,
    pub report: PspReport,
}

struct Ctx<'a> {
    o: &'a dyn Oracle,
    backend: Backend,
    user: usize,
    ground: FusedGround,
    rates: &'a SegmentedRateVector,
    calls: Cell<u64>,
    hidden: Cell<u64>,
}

impl Ctx<'_> {
    fn value(&self, lambda: Rational, x: Set) -> Rational {
        self.o.eval(x) - lambda - self.rates.sum_at(x, lambda)
    }

    fn minimizer(&self, lambda: Rational) -> Result<Set> {
        let g = |x: Set| self.value(lambda, x);
        self.calls.set(self.calls.get() + 1);
        Ok(sfm_forced_with(self.backend, &g, &self.ground)?.minimal)
    }

    fn minimizer_left_of(&self, lambda: Rational) -> Result<Set> {
        let germ = |x: Set| {
            let rest: AffineFn = set::members(x).map(|m| *self.rates.coord(m).left_of(lambda)).sum();
            AffineFn::new(-Rational::ONE, self.o.eval(x)) - rest
        };
        self.calls.set(self.calls.get() + 1);
        Ok(sfm_left_limit(&germ, lambda, &self.ground)?.minimal)
    }
}

fn descend(ctx: &Ctx<'_>, uj: Set, uj2: Set, depth: usize, out: &mut Vec<(Rational, Set, Set)>) -> Result<()> {
    if depth > 2 * ctx.o.size() {
        return Err(PspError::Internal("Kolmogorov search does not converge".into()));
    }
    let lhs = ctx.rates.sum_over(uj & !uj2);
    let rhs = ctx.o.eval(uj) - ctx.o.eval(uj2);
    let domain = Interval::closed(ctx.rates.lo(), ctx.rates.hi());
    let lambda = least_root(&lhs, rhs, domain)
        .ok_or_else(|| PspError::Internal(format!("no crossing for {uj:#b} > {uj2:#b}")))?;
    let u = ctx.minimizer(lambda)?;
    if !set::is_subset(uj2, u) || !set::is_subset(u, uj) {
        return Err(PspError::Internal(format!("probe at λ = {lambda} left the bracketing pair")));
    }
    if u != uj2 {
        descend(ctx, uj, u, depth + 1, out)?;
        return descend(ctx, u, uj2, depth + 1, out);
    }
    let left = ctx.minimizer_left_of(lambda)?;
    if left == uj {
        out.push((lambda, uj, uj2));
        return Ok(());
    }
    if !set::is_subset(uj2, left) || !set::is_subset(left, uj) || left == uj2 {
        return Err(PspError::Internal(format!("left limit at λ = {lambda} left the bracketing pair")));
    }
    ctx.hidden.set(ctx.hidden.get() + 1);
    descend(ctx, uj, left, depth + 1, out)?;
    descend(ctx, left, uj2, depth + 1, out)
}

/// The chain between `u_j ⊋ u_j2` for user `user` under `rates`, with the
/// minimizations restricted to subsets of `within`; also returns the number
/// of minimizations and of hidden splits.
pub fn str_map_kolmogorov(
    o: &dyn Oracle,
    backend: Backend,
    rates: &SegmentedRateVector,
    user: usize,
    within: Set,
    u_j: Set,
    u_j2: Set,
) -> Result<(KolChain, u64, u64)> {
    let ctx = make_ctx(o, backend, rates, user, within)?;
    let chain = chain_between(&ctx, u_j, u_j2)?;
    Ok((chain, ctx.calls.get(), ctx.hidden.get()))
}

fn make_ctx<'a>(
    o: &'a dyn Oracle,
    backend: Backend,
    rates: &'a SegmentedRateVector,
    user: usize,
    within: Set,
) -> Result<Ctx<'a>> {
    let rest = within & !set::singleton(user);
    let ground = FusedGround::extend(&Partition::singletons(rest), user);
    Ok(Ctx { o, backend, user, ground, rates, calls: Cell::new(0), hidden: Cell::new(0) })
}

fn chain_between(ctx: &Ctx<'_>, top: Set, bottom: Set) -> Result<KolChain> {
    let mut found = Vec::new();
    if top != bottom {
        descend(ctx, top, bottom, 0, &mut found)?;
    }
    found.sort_by_key(|a| a.0);
    let mut sets = vec![top];
    let mut critical = Vec::new();
    for (lambda, big, small) in found {
        if *sets.last().unwrap() != big || critical.last().is_some_and(|c| *c >= lambda) {
            return Err(PspError::Internal("Kolmogorov chain does not link".into()));
        }
        sets.push(small);
        critical.push(lambda);
    }
    Ok(KolChain { user: ctx.user, sets, critical })
}

/// `min(g, c)` pointwise, split where they cross.
fn min_with(g: &Segmented<AffineFn>, c: Rational) -> Segmented<AffineFn> {
    let mut breaks = Vec::new();
    let mut pieces = Vec::new();
    for (k, (iv, a)) in g.iter().enumerate() {
        if k > 0 {
            breaks.push(iv.lo);
        }
        let pick = |x: Rational| if a.eval(x) <= c { *a } else { AffineFn::constant(c) };
        match a.root(c) {
            Some(x) if iv.lo < x && x < iv.hi => {
                pieces.push(pick((iv.lo + x) / Rational::from(2)));
                breaks.push(x);
                pieces.push(pick((x + iv.hi) / Rational::from(2)));
            }
            _ => pieces.push(pick((iv.lo + iv.hi) / Rational::from(2))),
        }
    }
    Segmented::from_parts(g.lo(), g.hi(), g.closure(), breaks, pieces).expect("same layout")
}

pub fn kolmogorov_psp(o: &dyn Oracle, order: &[usize]) -> Result<PspReport> {
    Ok(kolmogorov_with(Backend::Auto, o, order)?.report)
}

pub fn kolmogorov_with(backend: Backend, o: &dyn Oracle, order: &[usize]) -> Result<KolRun> {
    require_users(o)?;
    set::check_permutation(order, o.size())?;
    let (lo, total) = oracle::alpha_window(o)?;
    let top = total - lo;
    let zero = Rational::ZERO;
    let v = oracle::ground(o);
    let mut rates =
        SegmentedRateVector::uniform(o.size(), zero, top, Closure::Left, AffineFn::new(-Rational::ONE, zero));
    let mut partition = Segmented::constant(zero, top, Closure::Left, Partition::singletons(v));
    let mut iterations = Vec::with_capacity(order.len());
    let mut calls = 0;
    let mut prefix: Set = 0;
    for &phi in order {
        prefix |= set::singleton(phi);
        let ctx = make_ctx(o, backend, &rates, phi, prefix)?;
        let u_top = ctx.minimizer(zero)?;
        let u_bottom = ctx.minimizer(top)?;
        let chain = chain_between(&ctx, u_top, u_bottom)?;
        let (sfm_calls, hidden_splits) = (ctx.calls.get(), ctx.hidden.get());
        drop(ctx);
        calls += sfm_calls;

        let mut next = rates.clone();
        for m in set::members(prefix & !set::singleton(phi)) {
            let j_star = chain.sets.iter().take_while(|s| set::contains(**s, m)).count();
            if j_star == 0 {
                continue;
            }
            if j_star == chain.sets.len() {
                return Err(PspError::Internal("another user stays with the forced one at every λ".into()));
            }
            let at = chain.critical[j_star - 1];
            next.set_coord(m, min_with(rates.coord(m), rates.coord(m).eval(at)));
        }
        let mut cuts = next.breaks_of(prefix & !set::singleton(phi));
        cuts.extend(chain.critical.iter().copied());
        let new_rate = Segmented::tabulate(zero, top, Closure::Left, cuts, |l| {
            let u = chain.set_at(l);
            let rest: AffineFn = set::members(u & !set::singleton(phi)).map(|m| *next.coord(m).at(l)).sum();
            AffineFn::new(-Rational::ONE, o.eval(u)) - rest
        });
        next.set_coord(phi, new_rate);
        if let Some(m) = (0..o.size()).find(|m| !next.coord(*m).is_nonincreasing()) {
            return Err(PspError::Internal(format!("rate of user {m} is no longer nonincreasing")));
        }
        rates = next;

        let mut cuts = partition.breaks().to_vec();
        cuts.extend(chain.critical.iter().copied());
        partition = Segmented::tabulate(zero, top, Closure::Left, cuts, |l| partition.at(l).merge_meeting(chain.set_at(l)));
        iterations.push(KolIteration {
            chain,
            sfm_calls,
            hidden_splits,
            rates_lambda: rates.clone(),
            partition_lambda: partition.clone(),
        });
    }
    let seg = partition.reflect_with(total, |p| p.clone());
    let psp = Psp::from_segmented(&seg)?;
    let report = derive_report(o, Algorithm::Kolmogorov, order, psp, Some(rates.reflect(total)), calls)?;
    Ok(KolRun { iterations, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, EXAMPLE1_ORDER};
    use crate::psp::par;
    use crate::rational::{q, r};

    #[test]
    fn example_one_matches_par() {
        let o = fixtures::example1();
        let k = kolmogorov_psp(&o, &EXAMPLE1_ORDER).unwrap();
        assert_eq!(k.psp, par(&o, &EXAMPLE1_ORDER).unwrap().psp);
        assert_eq!(k.r_aco, q(13, 2));
    }

    #[test]
    fn triangle_strength() {
        let k = kolmogorov_psp(&fixtures::triangle(), &[0, 1, 2]).unwrap();
        assert_eq!(k.psp.critical_lambda(), vec![r(3)]);
        assert_eq!(k.strength, Some(q(3, 2)));
    }

    #[test]
    fn two_user_matches_par() {
        let o = fixtures::two_user();
        assert_eq!(kolmogorov_psp(&o, &[1, 0]).unwrap().psp, par(&o, &[1, 0]).unwrap().psp);
    }

    #[test]
    fn chains_nest_downward() {
        let o = fixtures::example1();
        let run = kolmogorov_with(Backend::Brute, &o, &EXAMPLE1_ORDER).unwrap();
        for it in &run.iterations {
            assert!(it.chain.sets.windows(2).all(|w| w[1] != w[0] && set::is_subset(w[1], w[0])));
            assert!(it.rates_lambda.coords().iter().all(|c| c.is_nonincreasing()));
        }
    }

    #[test]
    fn min_with_splits_at_crossing() {
        let g = Segmented::constant(r(0), r(4), Closure::Left, AffineFn::new(r(-1), r(3)));
        let m = min_with(&g, r(1));
        assert_eq!(m.breaks(), &[r(2)]);
        assert_eq!(m.eval(r(0)), r(1));
        assert_eq!(m.eval(r(3)), r(0));
    }

    #[test]
    fn hidden_tie_is_split() {
        // f = |X|; {0,1} ties with {0,1,2} on [1, 2] and with {0} at 2, so the
        // first probe lands on {0} and only the left limit reveals {0,1}
        let o = crate::oracle::TableOracle::new(4, (0..16u64).map(|x| r(x.count_ones() as _)).collect()).unwrap();
        let piece = |b: Vec<Rational>, p: Vec<AffineFn>| Segmented::from_parts(r(0), r(4), Closure::Left, b, p).unwrap();
        let rates = SegmentedRateVector::from_coords(vec![
            Segmented::constant(r(0), r(4), Closure::Left, AffineFn::new(r(-1), r(0))),
            piece(vec![r(2)], vec![AffineFn::new(r(-1), r(3)), AffineFn::constant(r(1))]),
            piece(vec![r(1)], vec![AffineFn::new(r(-1), r(2)), AffineFn::constant(r(1))]),
            Segmented::constant(r(0), r(4), Closure::Left, AffineFn::new(r(-1), r(0))),
        ]);
        let (chain, _, hidden) = str_map_kolmogorov(&o, Backend::Brute, &rates, 0, 0b0111, 0b0111, 0b0001).unwrap();
        assert_eq!(chain.sets, vec![0b0111, 0b0011, 0b0001]);
        assert_eq!(chain.critical, vec![r(1), r(2)]);
        assert_eq!(hidden, 1);
    }

    #[test]
    fn final_rates_are_a_base() {
        let o = fixtures::example1();
        let rep = kolmogorov_psp(&o, &EXAMPLE1_ORDER).unwrap();
        let rates = rep.rates.unwrap();
        for a in [r(0), r(3), r(4), q(9, 2), r(6), q(13, 2), r(8), r(10)] {
            let sum: Rational = rates.at(a).into_iter().sum();
            assert_eq!(sum, crate::dilworth::dilworth_brute(&o, a).unwrap().0, "α = {a}");
        }
    }
}
