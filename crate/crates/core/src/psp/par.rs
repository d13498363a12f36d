//! The parametric algorithm: one pass over the users, each pass solving
//! the saturation step for every `α` at once.

use std::cell::{Cell, RefCell};
use std::collections::BTreeMap;

use super::{derive_report, require_users, Algorithm, Psp, PspReport};
use crate::affine::{solve_affine, AffineFn};
use crate::error::{PspError, Result};
use crate::oracle::{self, residual, Oracle};
use crate::partition::{refines, Partition};
use crate::rates::SegmentedRateVector;
use crate::rational::Rational;
use crate::segmented::{Closure, Interval, Segmented};
use crate::set::{self, Set};
use crate::sfm::{sfm_forced_with, Backend, FusedGround};

/// Minimal minimizers of one iteration as a function of `α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BreakpointChain {
    pub user: usize,
    /// `Ũ^(q) ⊊ … ⊊ Ũ^(0)`, smallest first; `sets[0] = {φ_i}`.
    pub sets: Vec<Set>,
    /// `α_q < … < α_1`; `sets[k]` is the minimizer on `(critical[k-1], critical[k]]`.
    pub critical: Vec<Rational>,
}

impl BreakpointChain {
    pub fn set_at(&self, alpha: Rational) -> Set {
        self.sets[self.critical.partition_point(|c| *c < alpha)]
    }

    pub fn to_segmented(&self, lo: Rational, hi: Rational) -> Result<Segmented<Set>> {
        Segmented::from_parts(lo, hi, Closure::Right, self.critical.clone(), self.sets.clone())
    }
}

/// One probe of the parametric minimization at a fixed `α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub alpha: Rational,
    pub minimizer: Set,
    pub min_value: Rational,
    /// `Q_α[V_i]` after the merge.
    pub partition: Partition,
}

/// State visible to the strong-map search during iteration `i`: the
/// oracle, the rates and segmented partition left by iteration `i - 1`,
/// and the memo of probes made so far.
pub struct IterationContext<'a> {
    o: &'a dyn Oracle,
    backend: Backend,
    user: usize,
    prefix: Set,
    lo: Rational,
    total: Rational,
    rates: &'a SegmentedRateVector,
    partition: &'a Segmented<Partition>,
    memo: RefCell<BTreeMap<Rational, Probe>>,
    adjacent: RefCell<Vec<(Rational, Partition, Partition)>>,
    calls: Cell<u64>,
}

impl<'a> IterationContext<'a> {
    pub fn new(
        o: &'a dyn Oracle,
        backend: Backend,
        user: usize,
        prefix: Set,
        rates: &'a SegmentedRateVector,
        partition: &'a Segmented<Partition>,
    ) -> IterationContext<'a> {
        IterationContext {
            o,
            backend,
            user,
            prefix,
            lo: rates.lo(),
            total: rates.hi(),
            rates,
            partition,
            memo: RefCell::new(BTreeMap::new()),
            adjacent: RefCell::new(Vec::new()),
            calls: Cell::new(0),
        }
    }

    /// Minimizes `f̃_α` over unions of `Q_α[V_{i-1}] ⊔ {{φ_i}}` containing `φ_i`.
    pub fn probe(&self, alpha: Rational) -> Result<Probe> {
        if let Some(p) = self.memo.borrow().get(&alpha) {
            return Ok(p.clone());
        }
        if alpha < self.lo || alpha > self.total {
            return Err(PspError::OutOfRange { value: alpha, lo: self.lo, hi: self.total });
        }
        let base = self.partition.at(alpha).clone();
        let ground = FusedGround::extend(&base, self.user);
        let g = |x: Set| residual(self.o, alpha, x) - self.rates.sum_at(x, alpha);
        let res = sfm_forced_with(self.backend, &g, &ground)?;
        self.calls.set(self.calls.get() + 1);
        let partition = base.with_block(set::singleton(self.user)).merge_meeting(res.minimal);
        let p = Probe { alpha, minimizer: res.minimal, min_value: res.min_value, partition };
        self.memo.borrow_mut().insert(alpha, p.clone());
        Ok(p)
    }

    /// Number of minimizations performed.
    pub fn sfm_calls(&self) -> u64 {
        self.calls.get()
    }

    /// Adjacent pairs of the prefix sequence resolved so far.
    pub fn breakpoints_found(&self) -> usize {
        self.adjacent.borrow().len()
    }

    pub fn probes(&self) -> Vec<Probe> {
        self.memo.borrow().values().cloned().collect()
    }

    /// The finest minimizer over `V_i` as a segmented partition, assembled
    /// from the adjacent pairs.
    fn prefix_partition(&self) -> Result<Segmented<Partition>> {
        let mut pairs = self.adjacent.borrow().clone();
        if pairs.is_empty() {
            let p = Partition::singletons(self.prefix);
            return Ok(Segmented::constant(self.lo, self.total, Closure::Right, p));
        }
        pairs.sort_by_key(|a| a.0);
        let mut breaks = Vec::new();
        let mut pieces = vec![pairs[0].1.clone()];
        for (k, (alpha, pd, pu)) in pairs.iter().enumerate() {
            if *pd != pieces[k] {
                return Err(PspError::Internal("adjacent pairs do not link into a chain".into()));
            }
            if *alpha < self.total {
                breaks.push(*alpha);
                pieces.push(pu.clone());
            } else if k + 1 != pairs.len() {
                return Err(PspError::Internal("critical value at the window end is not the last".into()));
            }
        }
        if pieces.len() == breaks.len() + 2 {
            pieces.pop();
        }
        Segmented::from_parts(self.lo, self.total, Closure::Right, breaks, pieces)
    }

    /// Largest `α` up to which `s` is a union of blocks of
    /// `Q_α[V_{i-1}] ⊔ {{φ_i}}`; the partition coarsens, so this is a prefix.
    fn feasible_until(&self, s: Set) -> Rational {
        let rest = s & !set::singleton(self.user);
        let mut end = self.lo;
        for (k, p) in self.partition.pieces().iter().enumerate() {
            if !p.is_union_of_blocks(rest) {
                break;
            }
            end = self.partition.representative(k);
        }
        end
    }

    /// Windows bracketing each adjacent pair of `sets`: from the last probe
    /// returning the smaller set to the first returning the larger one,
    /// cut back to where the smaller set is still feasible.
    fn windows(&self, sets: &[Set]) -> Vec<Interval> {
        let memo = self.memo.borrow();
        (0..sets.len().saturating_sub(1))
            .map(|k| {
                let a = memo.values().filter(|p| p.minimizer == sets[k]).map(|p| p.alpha).max().unwrap_or(self.lo);
                let b =
                    memo.values().filter(|p| p.minimizer == sets[k + 1]).map(|p| p.alpha).min().unwrap_or(self.total);
                Interval::closed(a, b.min(self.feasible_until(sets[k])).max(a))
            })
            .collect()
    }
}

fn descend(ctx: &IterationContext<'_>, pd: &Partition, pu: &Partition, depth: usize) -> Result<()> {
    if depth > 2 * ctx.o.size() {
        return Err(PspError::Internal("strong-map search does not converge".into()));
    }
    let num = oracle::sum_over(ctx.o, pd.blocks()) - oracle::sum_over(ctx.o, pu.blocks());
    let alpha = ctx.total - num / Rational::from(pd.len() - pu.len());
    let p = ctx.probe(alpha)?.partition;
    if p == *pd {
        ctx.adjacent.borrow_mut().push((alpha, pd.clone(), pu.clone()));
        return Ok(());
    }
    if p.len() <= pu.len() || !refines(pd, &p)? || !refines(&p, pu)? {
        return Err(PspError::Internal(format!("probe at {alpha} left the bracketing pair")));
    }
    descend(ctx, pd, &p, depth + 1)?;
    descend(ctx, &p, pu, depth + 1)
}

/// Every distinct minimal minimizer `Ũ^(j)` of the iteration, smallest
/// first, found by bisecting the prefix sequence between `p_down` and `p_up`.
pub fn str_map(ctx: &IterationContext<'_>, p_down: &Partition, p_up: &Partition) -> Result<Vec<Set>> {
    if p_down != p_up {
        if !refines(p_down, p_up)? {
            return Err(PspError::Invalid("lower partition must refine the upper one".into()));
        }
        descend(ctx, p_down, p_up, 0)?;
    }
    let seg = ctx.prefix_partition()?;
    let blocks = seg.map(|p| p.block_of(ctx.user).expect("user in prefix"));
    Ok(blocks.pieces().to_vec())
}

/// Solves `r_α(Ũ^(j-1) ∖ Ũ^(j)) = f(Ũ^(j-1)) - f(Ũ^(j))` for each adjacent
/// pair of `sets` (smallest first). `windows` restricts each search;
/// the default is the whole domain of `rates`.
pub fn critical_points(
    o: &dyn Oracle,
    rates: &SegmentedRateVector,
    sets: &[Set],
    windows: Option<&[Interval]>,
) -> Result<Vec<Rational>> {
    let mut out = Vec::with_capacity(sets.len().saturating_sub(1));
    for k in 0..sets.len().saturating_sub(1) {
        let (small, big) = (sets[k], sets[k + 1]);
        if small == big || !set::is_subset(small, big) {
            return Err(PspError::Invalid("sets are not strictly nested".into()));
        }
        let lhs = rates.sum_over(big & !small);
        let rhs = o.eval(big) - o.eval(small);
        let w = windows.map_or_else(|| Interval::closed(rates.lo(), rates.hi()), |w| w[k]);
        match solve_affine(&lhs, rhs, w)? {
            Some(x) => out.push(x),
            None => return Err(PspError::Internal(format!("no critical value in {w} for {small:#b} < {big:#b}"))),
        }
    }
    if out.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PspError::Internal("critical values of one iteration coincide".into()));
    }
    Ok(out)
}

/// Snapshot after one iteration.
#[derive(Debug, Clone)]
pub struct ParIteration {
    pub chain: BreakpointChain,
    pub sfm_calls: u64,
    /// Breakpoints of the prefix sequence resolved by the search.
    pub breakpoints: usize,
    pub rates: SegmentedRateVector,
    /// `Q_α[V_i]`.
    pub partition: Segmented<Partition>,
}

#[derive(Debug, Clone)]
pub struct ParRun {
    pub iterations: Vec<ParIteration>,
    pub report: PspReport,
}

pub fn par(o: &dyn Oracle, order: &[usize]) -> Result<PspReport> {
    Ok(par_with(Backend::Auto, o, order)?.report)
}

pub fn par_with(backend: Backend, o: &dyn Oracle, order: &[usize]) -> Result<ParRun> {
    require_users(o)?;
    set::check_permutation(order, o.size())?;
    let (lo, total) = oracle::alpha_window(o)?;
    let mut rates =
        SegmentedRateVector::uniform(o.size(), lo, total, Closure::Right, AffineFn::shifted_identity(total));
    let mut partition = Segmented::constant(lo, total, Closure::Right, Partition::new(vec![])?);
    let mut prefix = 0;
    let mut iterations = Vec::with_capacity(order.len());
    let mut calls = 0;
    for &phi in order {
        prefix |= set::singleton(phi);
        let ctx = IterationContext::new(o, backend, phi, prefix, &rates, &partition);
        let sets = str_map(&ctx, &Partition::singletons(prefix), &Partition::whole(prefix))?;
        let expected = ctx.prefix_partition()?;
        let windows = ctx.windows(&sets);
        let critical = critical_points(o, &rates, &sets, Some(&windows))?;
        let chain = BreakpointChain { user: phi, sets, critical };
        let blocks = expected.map(|p| p.block_of(phi).expect("user in prefix"));
        if blocks.breaks() != chain.critical.as_slice() {
            return Err(PspError::Internal(format!(
                "critical values {:?} disagree with the prefix sequence {:?}",
                chain.critical,
                blocks.breaks()
            )));
        }
        for p in ctx.probes() {
            if chain.set_at(p.alpha) != p.minimizer {
                return Err(PspError::Internal(format!("probe at {} disagrees with the chain", p.alpha)));
            }
        }

        let others = prefix & !set::singleton(phi);
        let mut cuts = rates.breaks_of(others);
        cuts.extend(chain.critical.iter().copied());
        let new_rate = Segmented::tabulate(lo, total, Closure::Right, cuts, |x| {
            let u = chain.set_at(x);
            let rest: AffineFn = set::members(u & !set::singleton(phi)).map(|m| *rates.coord(m).at(x)).sum();
            AffineFn::new(Rational::ONE, o.eval(u) - total) - rest
        });
        let mut cuts = partition.breaks().to_vec();
        cuts.extend(chain.critical.iter().copied());
        let mut fused_ok = true;
        let new_partition = Segmented::tabulate(lo, total, Closure::Right, cuts, |x| {
            let base = partition.at(x).with_block(set::singleton(phi));
            let u = chain.set_at(x);
            fused_ok &= base.is_union_of_blocks(u);
            base.merge_meeting(u)
        });
        if !fused_ok {
            return Err(PspError::Internal("minimizer splits a fused block".into()));
        }
        if new_partition != expected {
            return Err(PspError::Internal("merged partition disagrees with the prefix sequence".into()));
        }
        let (sfm_calls, breakpoints) = (ctx.sfm_calls(), ctx.breakpoints_found());
        drop(ctx);
        calls += sfm_calls;
        rates.set_coord(phi, new_rate);
        partition = new_partition;
        iterations.push(ParIteration {
            chain,
            sfm_calls,
            breakpoints,
            rates: rates.clone(),
            partition: partition.clone(),
        });
    }
    let psp = Psp::from_segmented(&partition)?;
    let report = derive_report(o, Algorithm::Par, order, psp, Some(rates), calls)?;
    Ok(ParRun { iterations, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, EXAMPLE1_ORDER};
    use crate::rational::{q, r};
    use crate::set::from_indices;

    fn users(ix: &[usize]) -> Set {
        from_indices(ix.iter().map(|i| i - 1))
    }

    fn part(blocks: &[&[usize]]) -> Partition {
        Partition::new(blocks.iter().map(|b| users(b)).collect()).unwrap()
    }

    #[test]
    fn example_one_sequence() {
        let o = fixtures::example1();
        let rep = par(&o, &EXAMPLE1_ORDER).unwrap();
        assert_eq!(rep.psp.critical_alpha(), &[r(4), r(6), q(13, 2)]);
        assert_eq!(
            rep.psp.chain(),
            &[
                Partition::singletons(0b11111),
                part(&[&[4, 5], &[1], &[2], &[3]]),
                part(&[&[1, 4, 5], &[2], &[3]]),
                Partition::whole(0b11111),
            ]
        );
        assert_eq!(rep.r_aco, q(13, 2));
        assert_eq!(rep.r_nco, r(7));
        assert_eq!(rep.optimal_rate_aco, vec![r(1), q(1, 2), q(1, 2), q(9, 2), r(0)]);
        assert_eq!(rep.optimal_rate_nco, Some(vec![r(0), r(1), r(1), r(5), r(0)]));
        assert!(!rep.degenerate);
    }

    #[test]
    fn chains_per_iteration() {
        let o = fixtures::example1();
        let run = par_with(Backend::Brute, &o, &EXAMPLE1_ORDER).unwrap();
        let chains: Vec<(Vec<Set>, Vec<Rational>)> =
            run.iterations.iter().map(|it| (it.chain.sets.clone(), it.chain.critical.clone())).collect();
        assert_eq!(chains[0], (vec![users(&[4])], vec![]));
        assert_eq!(chains[1], (vec![users(&[5]), users(&[4, 5])], vec![r(4)]));
        assert_eq!(chains[2], (vec![users(&[2]), users(&[2, 4, 5])], vec![r(8)]));
        assert_eq!(chains[3], (vec![users(&[3]), users(&[2, 3, 4, 5])], vec![r(7)]));
        assert_eq!(chains[4], (vec![users(&[1]), users(&[1, 4, 5]), users(&[1, 2, 3, 4, 5])], vec![r(6), q(13, 2)]));
        for it in &run.iterations {
            assert!(it.sfm_calls <= 2 * it.breakpoints as u64 + 1);
        }
    }

    #[test]
    fn str_map_last_iteration() {
        let o = fixtures::example1();
        let run = par_with(Backend::Brute, &o, &EXAMPLE1_ORDER).unwrap();
        let prev = &run.iterations[3];
        let ctx = IterationContext::new(&o, Backend::Brute, 0, 0b11111, &prev.rates, &prev.partition);
        let sets = str_map(&ctx, &Partition::singletons(0b11111), &Partition::whole(0b11111)).unwrap();
        assert_eq!(sets, vec![users(&[1]), users(&[1, 4, 5]), users(&[1, 2, 3, 4, 5])]);
        let crit = critical_points(&o, &prev.rates, &sets, None).unwrap();
        assert_eq!(crit, vec![r(6), q(13, 2)]);
    }

    #[test]
    fn single_user_chain() {
        let o = fixtures::example1();
        let rates = SegmentedRateVector::uniform(5, r(0), r(10), Closure::Right, AffineFn::shifted_identity(r(10)));
        let part = Segmented::constant(r(0), r(10), Closure::Right, Partition::new(vec![]).unwrap());
        let ctx = IterationContext::new(&o, Backend::Brute, 3, users(&[4]), &rates, &part);
        let s = Partition::singletons(users(&[4]));
        assert_eq!(str_map(&ctx, &s, &s).unwrap(), vec![users(&[4])]);
        assert_eq!(ctx.sfm_calls(), 0);
    }

    #[test]
    fn two_user_source() {
        let o = fixtures::two_user();
        let rep = par(&o, &[0, 1]).unwrap();
        assert_eq!(rep.psp.critical_alpha(), &[r(1)]);
        assert_eq!(rep.fundamental_partition, Partition::singletons(0b11));
        assert_eq!((rep.r_aco, rep.mmi), (r(1), r(1)));
        let run = par_with(Backend::Brute, &o, &[0, 1]).unwrap();
        assert_eq!(run.iterations[1].chain.critical, vec![r(1)]);
    }

    #[test]
    fn independent_users_are_degenerate() {
        let o = crate::oracle::BitAssignmentSource::new(&[vec!["a"], vec!["b"], vec!["c", "d"]]).unwrap();
        let rep = par(&o, &[0, 1, 2]).unwrap();
        assert!(rep.degenerate);
        assert_eq!(rep.psp.critical_alpha(), &[r(4)]);
        assert_eq!(rep.r_aco, r(4));
        assert_eq!(rep.mmi, r(0));
        assert_eq!(rep.fundamental_partition, Partition::singletons(0b111));
    }

    #[test]
    fn triangle_cut() {
        let o = fixtures::triangle();
        let rep = par(&o, &[0, 1, 2]).unwrap();
        assert_eq!(rep.psp.critical_lambda(), vec![r(3)]);
        assert_eq!(rep.strength, Some(q(3, 2)));
    }

    #[test]
    fn every_order_gives_the_same_sequence() {
        let o = fixtures::example1();
        let reference = par(&o, &EXAMPLE1_ORDER).unwrap().psp;
        let mut order = [0usize, 1, 2, 3, 4];
        let mut count = 0;
        permute(&mut order, 0, &mut |ord| {
            assert_eq!(par(&o, ord).unwrap().psp, reference, "order {ord:?}");
            count += 1;
        });
        assert_eq!(count, 120);
    }

    fn permute(xs: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == xs.len() {
            f(xs);
            return;
        }
        for j in k..xs.len() {
            xs.swap(k, j);
            permute(xs, k + 1, f);
            xs.swap(k, j);
        }
    }
}
