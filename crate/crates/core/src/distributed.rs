//! The parametric algorithm run as a pipeline over the users, in the
//! λ-domain `λ = f(V) - α`. User `φ_i` receives the rates and segmented
//! partition of `V_{i-1}`, adds itself and forwards the result; each
//! forwarded state already holds the sequence of its own prefix.

use std::cell::{Cell, RefCell};
use std::collections::BTreeMap;

use crate::affine::AffineFn;
use crate::error::{PspError, Result};
use crate::oracle::{self, Oracle};
use crate::partition::{decompose, Partition};
use crate::psp::{derive_report, require_users, Algorithm, Psp, PspReport};
use crate::rates::SegmentedRateVector;
use crate::rational::Rational;
use crate::segmented::{Closure, Segmented};
use crate::set::{self, Set};
use crate::sfm::{sfm_forced_with, Backend, FusedGround};

/// What user `φ_i` forwards after its step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixState {
    /// 1-based position in the order.
    pub step: usize,
    pub user: usize,
    pub prefix: Set,
    /// All coordinates over `[0, Λ]`; users not yet reached hold `-λ`.
    pub rates_lambda: SegmentedRateVector,
    /// `Q_λ[V_i]`, left-closed pieces.
    pub partition_lambda: Segmented<Partition>,
    /// `U^(0) ⊋ … ⊋ U^(q)` of this step, largest first.
    pub chain_sets: Vec<Set>,
    /// `λ_1 < … < λ_q`; `chain_sets[k]` holds on `[λ_k, λ_{k+1})`.
    pub chain_critical: Vec<Rational>,
    pub sfm_calls: u64,
}

/// Omniscience of a prefix read off its state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalOmniscience {
    pub lambda1: Rational,
    pub r_aco: Rational,
    pub r_nco: Rational,
    /// Rates of the prefix users, by user index.
    pub rate_aco: Vec<(usize, Rational)>,
    pub rate_nco: Option<Vec<(usize, Rational)>>,
}

impl PrefixState {
    /// Ascending λ-critical values of the prefix sequence.
    pub fn critical_lambda(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        let whole = Partition::whole(self.prefix);
        if set::len(self.prefix) >= 2 && *self.partition_lambda.at(Rational::ZERO) != whole {
            out.push(Rational::ZERO);
        }
        out.extend(self.partition_lambda.breaks().iter().copied());
        out
    }

    /// Prefix sequence, coarsest first, aligned with [`critical_lambda`](Self::critical_lambda)
    /// (`chain[k]` holds just below `critical[k]`).
    pub fn chain_lambda(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        let whole = Partition::whole(self.prefix);
        if *self.partition_lambda.at(Rational::ZERO) != whole {
            out.push(whole);
        }
        out.extend(self.partition_lambda.pieces().iter().cloned());
        out
    }

    pub fn local_omniscience(&self, o: &dyn Oracle) -> Option<LocalOmniscience> {
        let lambda1 = *self.critical_lambda().first()?;
        let fvi = o.eval(self.prefix);
        let r_aco = fvi - lambda1;
        let r_nco = r_aco.ceil();
        let at = |l: Rational| set::members(self.prefix).map(|m| (m, self.rates_lambda.coord(m).eval(l))).collect();
        let nco_lambda = fvi - r_nco;
        let rate_nco = self.rates_lambda.coord(self.user).in_domain(nco_lambda).then(|| at(nco_lambda));
        Some(LocalOmniscience { lambda1, r_aco, r_nco, rate_aco: at(lambda1), rate_nco })
    }
}

/// One hop of the pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub step: usize,
    pub sender: usize,
    /// `None` for the final hand-off to the output.
    pub receiver: Option<usize>,
    pub payload: PrefixState,
}

struct StepContext<'a> {
    o: &'a dyn Oracle,
    backend: Backend,
    user: usize,
    top: Rational,
    rates: &'a SegmentedRateVector,
    partition: &'a Segmented<Partition>,
    memo: RefCell<BTreeMap<Rational, (Set, Partition)>>,
    terminal: RefCell<Vec<(Rational, Set, Set)>>,
    calls: Cell<u64>,
}

impl StepContext<'_> {
    /// `f̃_λ(X) = f(X) - λ - r_λ(X)`, with `φ_i` still at `-λ`.
    fn tilde(&self, lambda: Rational, x: Set) -> Rational {
        self.o.eval(x) - lambda - self.rates.sum_at(x, lambda)
    }

    fn probe(&self, lambda: Rational) -> Result<(Set, Partition)> {
        if let Some(p) = self.memo.borrow().get(&lambda) {
            return Ok(p.clone());
        }
        if lambda < Rational::ZERO || lambda > self.top {
            return Err(PspError::OutOfRange { value: lambda, lo: Rational::ZERO, hi: self.top });
        }
        let base = self.partition.at(lambda).clone();
        let ground = FusedGround::extend(&base, self.user);
        let g = |x: Set| self.tilde(lambda, x);
        let res = sfm_forced_with(self.backend, &g, &ground)?;
        self.calls.set(self.calls.get() + 1);
        let q = base.with_block(set::singleton(self.user)).merge_meeting(res.minimal);
        self.memo.borrow_mut().insert(lambda, (res.minimal, q.clone()));
        Ok((res.minimal, q))
    }
}

fn descend(ctx: &StepContext<'_>, uj: Set, uj2: Set, pd: &Partition, depth: usize) -> Result<()> {
    if uj == uj2 {
        return Ok(());
    }
    if depth > 2 * ctx.o.size() {
        return Err(PspError::Internal("distributed strong-map search does not converge".into()));
    }
    let d = decompose(uj & !uj2, pd)?;
    let lambda = (oracle::sum_over(ctx.o, &d) + ctx.o.eval(uj2) - ctx.o.eval(uj)) / Rational::from(d.len());
    let (u, q) = ctx.probe(lambda)?;
    if u == uj2 && ctx.tilde(lambda, uj) == ctx.tilde(lambda, u) {
        ctx.terminal.borrow_mut().push((lambda, uj, uj2));
        return Ok(());
    }
    if !set::is_subset(uj2, u) || !set::is_subset(u, uj) || (u == uj2 && q == *pd) {
        return Err(PspError::Internal(format!("probe at λ = {lambda} left the bracketing pair")));
    }
    descend(ctx, uj, u, &q, depth + 1)?;
    descend(ctx, u, uj2, pd, depth + 1)
}

/// The nested minimizers of step `i` between `u_j ⊇ u_j2`, largest first,
/// with the λ at which each adjacent pair ties.
pub fn str_map_dist(
    o: &dyn Oracle,
    backend: Backend,
    prev: &PrefixState,
    user: usize,
    u_j: Set,
    u_j2: Set,
    p_d: &Partition,
) -> Result<(Vec<Set>, Vec<Rational>, u64)> {
    let ctx = StepContext {
        o,
        backend,
        user,
        top: prev.rates_lambda.hi(),
        rates: &prev.rates_lambda,
        partition: &prev.partition_lambda,
        memo: RefCell::new(BTreeMap::new()),
        terminal: RefCell::new(Vec::new()),
        calls: Cell::new(0),
    };
    descend(&ctx, u_j, u_j2, p_d, 0)?;
    let (sets, crit) = collect_chain(&ctx, u_j, u_j2)?;
    Ok((sets, crit, ctx.calls.get()))
}

fn collect_chain(ctx: &StepContext<'_>, top: Set, bottom: Set) -> Result<(Vec<Set>, Vec<Rational>)> {
    let mut t = ctx.terminal.borrow().clone();
    t.sort_by_key(|a| a.0);
    let mut sets = vec![top];
    let mut crit = Vec::new();
    for (lambda, big, small) in t {
        if *sets.last().unwrap() != big {
            return Err(PspError::Internal("distributed chain does not link".into()));
        }
        // adjacent sets tie at their critical value
        if ctx.rates.sum_at(big & !small, lambda) != ctx.o.eval(big) - ctx.o.eval(small) {
            return Err(PspError::Internal(format!("no tie at λ = {lambda}")));
        }
        if crit.last().is_some_and(|c| *c >= lambda) {
            return Err(PspError::Internal("critical values of one step coincide".into()));
        }
        sets.push(small);
        crit.push(lambda);
    }
    if *sets.last().unwrap() != bottom {
        return Err(PspError::Internal("distributed chain does not reach its end".into()));
    }
    Ok((sets, crit))
}

/// The state before any user has acted.
fn initial_state(o: &dyn Oracle) -> Result<PrefixState> {
    let (lo, total) = oracle::alpha_window(o)?;
    let top = total - lo;
    let rates =
        SegmentedRateVector::uniform(o.size(), Rational::ZERO, top, Closure::Left, AffineFn::new(-Rational::ONE, Rational::ZERO));
    Ok(PrefixState {
        step: 0,
        user: usize::MAX,
        prefix: 0,
        rates_lambda: rates,
        partition_lambda: Segmented::constant(Rational::ZERO, top, Closure::Left, Partition::new(vec![])?),
        chain_sets: vec![],
        chain_critical: vec![],
        sfm_calls: 0,
    })
}

/// What user `phi` computes from the state it receives. Only subsets of
/// `prev.prefix ∪ {phi}` are evaluated.
pub fn distr_step(backend: Backend, o: &dyn Oracle, prev: &PrefixState, phi: usize) -> Result<PrefixState> {
    if phi >= o.size() || set::contains(prev.prefix, phi) {
        return Err(PspError::Invalid(format!("user {phi} cannot join this prefix")));
    }
    let prefix = prev.prefix | set::singleton(phi);
    let top = prev.rates_lambda.hi();
    let zero = Rational::ZERO;
    let ctx = StepContext {
        o,
        backend,
        user: phi,
        top,
        rates: &prev.rates_lambda,
        partition: &prev.partition_lambda,
        memo: RefCell::new(BTreeMap::new()),
        terminal: RefCell::new(Vec::new()),
        calls: Cell::new(0),
    };
    let (sets, critical) = if prev.prefix == 0 {
        (vec![set::singleton(phi)], vec![])
    } else {
        let (u_top, _) = ctx.probe(zero)?;
        let (u_bottom, _) = ctx.probe(top)?;
        descend(&ctx, u_top, u_bottom, &Partition::singletons(prefix), 0)?;
        collect_chain(&ctx, u_top, u_bottom)?
    };
    let set_at = |l: Rational| sets[critical.partition_point(|c| *c <= l)];

    let others = prev.prefix;
    let mut cuts = prev.rates_lambda.breaks_of(others);
    cuts.extend(critical.iter().copied());
    let new_rate = Segmented::tabulate(zero, top, Closure::Left, cuts, |l| {
        let u = set_at(l);
        let rest: AffineFn = set::members(u & !set::singleton(phi)).map(|m| *prev.rates_lambda.coord(m).at(l)).sum();
        AffineFn::new(-Rational::ONE, o.eval(u)) - rest
    });
    let mut cuts = prev.partition_lambda.breaks().to_vec();
    cuts.extend(critical.iter().copied());
    let mut fused_ok = true;
    let partition = Segmented::tabulate(zero, top, Closure::Left, cuts, |l| {
        let base = prev.partition_lambda.at(l).with_block(set::singleton(phi));
        let u = set_at(l);
        fused_ok &= base.is_union_of_blocks(u);
        base.merge_meeting(u)
    });
    if !fused_ok {
        return Err(PspError::Internal("minimizer splits a fused block".into()));
    }
    let mut rates = prev.rates_lambda.clone();
    rates.set_coord(phi, new_rate);
    Ok(PrefixState {
        step: prev.step + 1,
        user: phi,
        prefix,
        rates_lambda: rates,
        partition_lambda: partition,
        chain_sets: sets,
        chain_critical: critical,
        sfm_calls: ctx.calls.get(),
    })
}

/// Lazy pipeline: each `next` runs exactly one user.
pub struct DistrPar<'a> {
    o: &'a dyn Oracle,
    backend: Backend,
    order: Vec<usize>,
    state: Option<PrefixState>,
    failed: bool,
}

impl<'a> DistrPar<'a> {
    pub fn new(o: &'a dyn Oracle, order: &[usize]) -> Result<DistrPar<'a>> {
        DistrPar::with_backend(Backend::Auto, o, order)
    }

    pub fn with_backend(backend: Backend, o: &'a dyn Oracle, order: &[usize]) -> Result<DistrPar<'a>> {
        require_users(o)?;
        set::check_permutation(order, o.size())?;
        Ok(DistrPar { o, backend, order: order.to_vec(), state: Some(initial_state(o)?), failed: false })
    }
}

impl Iterator for DistrPar<'_> {
    type Item = Result<PrefixState>;

    fn next(&mut self) -> Option<Result<PrefixState>> {
        if self.failed {
            return None;
        }
        let prev = self.state.as_ref()?;
        let phi = *self.order.get(prev.step)?;
        match distr_step(self.backend, self.o, prev, phi) {
            Ok(s) => {
                self.state = Some(s.clone());
                Some(Ok(s))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct DistrRun {
    pub log: Vec<Message>,
    pub report: PspReport,
}

impl DistrRun {
    pub fn states(&self) -> impl Iterator<Item = &PrefixState> {
        self.log.iter().map(|m| &m.payload)
    }

    /// Recomputes every hop from the payload it received and rebuilds the
    /// report from the last one; fails on any difference.
    pub fn replay(&self, o: &dyn Oracle, backend: Backend) -> Result<PspReport> {
        let mut prev = initial_state(o)?;
        for m in &self.log {
            let s = distr_step(backend, o, &prev, m.sender)?;
            if s != m.payload {
                return Err(PspError::Internal(format!("replay differs at step {}", m.step)));
            }
            prev = m.payload.clone();
        }
        let order: Vec<usize> = self.log.iter().map(|m| m.sender).collect();
        let calls = self.log.iter().map(|m| m.payload.sfm_calls).sum();
        final_report(o, &order, &prev, calls)
    }
}

fn final_report(o: &dyn Oracle, order: &[usize], last: &PrefixState, calls: u64) -> Result<PspReport> {
    let total = oracle::total(o);
    let seg = last.partition_lambda.reflect_with(total, |p| p.clone());
    let psp = Psp::from_segmented(&seg)?;
    let rates = last.rates_lambda.reflect(total);
    derive_report(o, Algorithm::Distr, order, psp, Some(rates), calls)
}

pub fn distr_par(o: &dyn Oracle, order: &[usize]) -> Result<DistrRun> {
    distr_par_with(Backend::Auto, o, order)
}

pub fn distr_par_with(backend: Backend, o: &dyn Oracle, order: &[usize]) -> Result<DistrRun> {
    let mut log = Vec::with_capacity(order.len());
    for (k, s) in DistrPar::with_backend(backend, o, order)?.enumerate() {
        let s = s?;
        log.push(Message { step: s.step, sender: s.user, receiver: order.get(k + 1).copied(), payload: s });
    }
    let calls = log.iter().map(|m| m.payload.sfm_calls).sum();
    let report = final_report(o, order, &log.last().expect("at least two users").payload, calls)?;
    Ok(DistrRun { log, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, EXAMPLE1_ORDER};
    use crate::psp::par_with;
    use crate::rational::{q, r};
    use crate::set::from_indices;

    fn lin(slope: i128, c: i128) -> AffineFn {
        AffineFn::new(r(slope), r(c))
    }

    #[test]
    fn example_three_second_user() {
        let o = fixtures::example3();
        let run = distr_par(&o, &[0, 1, 2, 3]).unwrap();
        let s2 = &run.log[1].payload;
        assert_eq!(s2.chain_sets, vec![0b11, 0b10]);
        assert_eq!(s2.chain_critical, vec![r(1)]);
        assert_eq!(s2.rates_lambda.at(q(1, 2))[..2], [q(3, 2), r(1)]);
        assert_eq!(s2.rates_lambda.at(r(1))[..2], [r(1), r(1)]);
        assert_eq!(s2.critical_lambda(), vec![r(1)]);
    }

    #[test]
    fn example_three_prefix_of_three() {
        let o = fixtures::example3();
        let run = distr_par(&o, &[0, 1, 2, 3]).unwrap();
        let s3 = &run.log[2].payload;
        assert_eq!(s3.chain_sets, vec![0b111, 0b100]);
        assert_eq!(s3.chain_critical, vec![q(3, 2)]);
        assert_eq!(s3.rates_lambda.breaks_of(0b111), vec![r(1), q(3, 2)]);
        assert_eq!(s3.rates_lambda.coord(2).pieces(), &[lin(0, 0), lin(1, -1), lin(-1, 2)]);
        let lo = s3.local_omniscience(&o).unwrap();
        assert_eq!((lo.lambda1, lo.r_aco, lo.r_nco), (q(3, 2), q(3, 2), r(2)));
        assert_eq!(lo.rate_aco, vec![(0, q(1, 2)), (1, q(1, 2)), (2, q(1, 2))]);
        assert_eq!(lo.rate_nco, Some(vec![(0, r(1)), (1, r(1)), (2, r(0))]));
    }

    #[test]
    fn matches_par_prefix_by_prefix() {
        let o = fixtures::example1();
        let run = distr_par(&o, &EXAMPLE1_ORDER).unwrap();
        let par_run = par_with(Backend::Auto, &o, &EXAMPLE1_ORDER).unwrap();
        for (m, it) in run.log.iter().zip(&par_run.iterations) {
            assert_eq!(m.payload.partition_lambda, it.partition.reflect_with(r(10), |p| p.clone()));
            assert_eq!(m.payload.rates_lambda, it.rates.reflect(r(10)));
        }
        assert_eq!(run.report.psp, par_run.report.psp);
        assert_eq!(run.report.optimal_rate_aco, par_run.report.optimal_rate_aco);
    }

    #[test]
    fn replay_reproduces_report() {
        let o = fixtures::example3();
        let run = distr_par(&o, &[0, 1, 2, 3]).unwrap();
        assert_eq!(run.replay(&o, Backend::Auto).unwrap(), run.report);
        let mut tampered = run.clone();
        tampered.log[1].payload.chain_critical = vec![r(2)];
        assert!(tampered.replay(&o, Backend::Auto).is_err());
    }

    #[test]
    fn single_user_step() {
        let o = fixtures::example1();
        let s = DistrPar::new(&o, &EXAMPLE1_ORDER).unwrap().next().unwrap().unwrap();
        assert_eq!(s.chain_sets, vec![from_indices([3])]);
        assert_eq!(s.sfm_calls, 0);
    }
}
