//! The principal sequence of partitions and the quantities read off it.

mod brute;
mod da;
mod par;

pub use brute::{brute_psp, BRUTE_PSP_USERS};
pub use da::{decomposition_algorithm, decomposition_algorithm_with};
pub use par::{critical_points, par, par_with, str_map, BreakpointChain, IterationContext, ParIteration, ParRun};

use std::fmt;
use std::str::FromStr;

use crate::dilworth::coord_sat_cap;
use crate::error::{PspError, Result};
use crate::oracle::{self, Oracle};
use crate::partition::{refines, Partition};
use crate::rates::SegmentedRateVector;
use crate::rational::Rational;
use crate::segmented::{Closure, Segmented};
use crate::set;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Par,
    Da,
    Kolmogorov,
    Distr,
    Brute,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Par, Algorithm::Da, Algorithm::Kolmogorov, Algorithm::Distr, Algorithm::Brute];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Par => "par",
            Algorithm::Da => "da",
            Algorithm::Kolmogorov => "kolmogorov",
            Algorithm::Distr => "distr",
            Algorithm::Brute => "brute",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = PspError;

    fn from_str(s: &str) -> Result<Algorithm> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| PspError::Invalid(format!("unknown algorithm `{s}`")))
    }
}

/// Critical values `α^(p) < … < α^(1)` and the chain
/// `P^(p) ≺ … ≺ P^(0) = {V}`, with `P^(p)` the singletons.
///
/// `chain[k]` is the finest minimizer on `(critical[k-1], critical[k]]`.
/// When the sources are independent `α^(1) = f(V)` and the top segment is
/// empty; see [`Psp::is_degenerate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Psp {
    lo: Rational,
    total: Rational,
    critical: Vec<Rational>,
    chain: Vec<Partition>,
}

impl Psp {
    pub fn new(lo: Rational, total: Rational, critical: Vec<Rational>, chain: Vec<Partition>) -> Result<Psp> {
        if chain.len() != critical.len() + 1 || critical.is_empty() {
            return Err(PspError::Invalid("chain must have one more partition than critical values".into()));
        }
        if critical.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PspError::Invalid("critical values must increase strictly".into()));
        }
        if critical[0] < lo || *critical.last().unwrap() > total {
            return Err(PspError::Invalid("critical value outside the window".into()));
        }
        let carrier = chain[0].carrier();
        if chain[0] != Partition::singletons(carrier) || *chain.last().unwrap() != Partition::whole(carrier) {
            return Err(PspError::Invalid("chain must run from singletons to the whole set".into()));
        }
        for w in chain.windows(2) {
            if w[0] == w[1] || !refines(&w[0], &w[1])? {
                return Err(PspError::Invalid("chain must refine strictly".into()));
            }
        }
        Ok(Psp { lo, total, critical, chain })
    }

    /// From the segmented finest minimizer over `[lo, f(V)]`.
    pub fn from_segmented(seg: &Segmented<Partition>) -> Result<Psp> {
        let mut critical = seg.breaks().to_vec();
        let mut chain = seg.pieces().to_vec();
        let whole = Partition::whole(chain[0].carrier());
        if *chain.last().unwrap() != whole {
            critical.push(seg.hi());
            chain.push(whole);
        }
        Psp::new(seg.lo(), seg.hi(), critical, chain)
    }

    /// From adjacent pairs `(α, finer, coarser)` found by a divide-and-conquer search.
    pub fn from_adjacent(lo: Rational, total: Rational, mut pairs: Vec<(Rational, Partition, Partition)>) -> Result<Psp> {
        pairs.sort_by_key(|a| a.0);
        for w in pairs.windows(2) {
            if w[0].2 != w[1].1 {
                return Err(PspError::Internal("adjacent pairs do not link into a chain".into()));
            }
        }
        let critical = pairs.iter().map(|p| p.0).collect();
        let mut chain: Vec<Partition> = pairs.iter().map(|p| p.1.clone()).collect();
        chain.push(pairs.last().ok_or_else(|| PspError::Internal("no pairs".into()))?.2.clone());
        Psp::new(lo, total, critical, chain)
    }

    pub fn window_lo(&self) -> Rational {
        self.lo
    }

    /// `α^(0) = f(V)`.
    pub fn total(&self) -> Rational {
        self.total
    }

    /// Ascending α-critical values.
    pub fn critical_alpha(&self) -> &[Rational] {
        &self.critical
    }

    /// Ascending λ-critical values, `λ = f(V) - α`.
    pub fn critical_lambda(&self) -> Vec<Rational> {
        self.critical.iter().rev().map(|a| self.total - *a).collect()
    }

    /// `P^(p), …, P^(0)`, finest first.
    pub fn chain(&self) -> &[Partition] {
        &self.chain
    }

    pub fn alpha1(&self) -> Rational {
        *self.critical.last().unwrap()
    }

    pub fn fundamental_partition(&self) -> &Partition {
        &self.chain[self.chain.len() - 2]
    }

    /// True when `α^(1) = f(V)`.
    pub fn is_degenerate(&self) -> bool {
        self.alpha1() == self.total
    }

    /// Finest minimizer of `f_α[·]` at `α` in the window.
    pub fn partition_at(&self, alpha: Rational) -> &Partition {
        &self.chain[self.critical.partition_point(|c| *c < alpha)]
    }

    /// The chain as a right-closed segmented partition over the window;
    /// the empty top segment of a degenerate sequence is dropped.
    pub fn to_segmented(&self) -> Segmented<Partition> {
        let mut breaks = self.critical.clone();
        let mut pieces = self.chain.clone();
        if self.is_degenerate() {
            breaks.pop();
            pieces.pop();
        }
        Segmented::from_parts(self.lo, self.total, Closure::Right, breaks, pieces).expect("valid chain")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PspReport {
    pub algorithm: Algorithm,
    pub order: Vec<usize>,
    pub psp: Psp,
    /// Segmented rates in the α-domain, when the algorithm produces them.
    pub rates: Option<SegmentedRateVector>,
    pub r_aco: Rational,
    pub r_nco: Rational,
    pub fundamental_partition: Partition,
    pub mmi: Rational,
    pub secret_capacity: Rational,
    pub strength: Option<Rational>,
    pub optimal_rate_aco: Vec<Rational>,
    /// `None` when `⌈α^(1)⌉` lies beyond `f(V)`.
    pub optimal_rate_nco: Option<Vec<Rational>>,
    pub sfm_call_count: u64,
    pub degenerate: bool,
}

/// Fills in the quantities determined by the sequence. Without segmented
/// rates the optimal vectors come from saturation along `order`.
pub fn derive_report(
    o: &dyn Oracle,
    algorithm: Algorithm,
    order: &[usize],
    psp: Psp,
    rates: Option<SegmentedRateVector>,
    sfm_call_count: u64,
) -> Result<PspReport> {
    let r_aco = psp.alpha1();
    let r_nco = r_aco.ceil();
    let mmi = psp.total() - r_aco;
    let rate_at = |a: Rational| -> Result<Vec<Rational>> {
        match &rates {
            Some(r) => Ok(r.at(a)),
            None => Ok(coord_sat_cap(o, a, order)?.rate),
        }
    };
    let optimal_rate_aco = rate_at(r_aco)?;
    let optimal_rate_nco = if r_nco <= psp.total() { Some(rate_at(r_nco)?) } else { None };
    Ok(PspReport {
        algorithm,
        order: order.to_vec(),
        fundamental_partition: psp.fundamental_partition().clone(),
        degenerate: psp.is_degenerate(),
        psp,
        rates,
        r_aco,
        r_nco,
        mmi,
        secret_capacity: mmi,
        strength: o.is_graph_cut().then(|| mmi / Rational::from(2)),
        optimal_rate_aco,
        optimal_rate_nco,
        sfm_call_count,
    })
}

/// Runs `algorithm` and builds its report.
pub fn compute(algorithm: Algorithm, o: &dyn Oracle, order: &[usize]) -> Result<PspReport> {
    compute_with(crate::sfm::Backend::Auto, algorithm, o, order)
}

pub fn compute_with(backend: crate::sfm::Backend, algorithm: Algorithm, o: &dyn Oracle, order: &[usize]) -> Result<PspReport> {
    set::check_permutation(order, o.size())?;
    match algorithm {
        Algorithm::Par => Ok(par_with(backend, o, order)?.report),
        Algorithm::Da => {
            let (psp, calls) = decomposition_algorithm_with(backend, o)?;
            derive_report(o, algorithm, order, psp, None, calls)
        }
        Algorithm::Kolmogorov => Ok(crate::kolmogorov::kolmogorov_with(backend, o, order)?.report),
        Algorithm::Distr => Ok(crate::distributed::distr_par_with(backend, o, order)?.report),
        Algorithm::Brute => derive_report(o, algorithm, order, brute_psp(o)?, None, 0),
    }
}

/// Users sorted by ascending weight, ties by index.
pub fn weighted_ordering(weights: &[Rational]) -> Result<Vec<usize>> {
    if let Some(w) = weights.iter().find(|w| w.signum() <= 0) {
        return Err(PspError::Invalid(format!("weight {w} is not positive")));
    }
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|a, b| weights[*a].cmp(&weights[*b]).then(a.cmp(b)));
    Ok(order)
}

/// `I(V) = min over nontrivial P of (f[P] - f(V)) / (|P| - 1)`, by enumeration.
pub fn mmi_brute(o: &dyn Oracle) -> Result<(Rational, Partition)> {
    let v = oracle::ground(o);
    let fv = oracle::total(o);
    let mut best: Option<(Rational, Partition)> = None;
    for p in crate::partition::enumerate_partitions(v)? {
        if p.len() < 2 {
            continue;
        }
        let val = (oracle::sum_over(o, p.blocks()) - fv) / Rational::from(p.len() - 1);
        best = match best {
            Some((b, bp)) if b < val => Some((b, bp)),
            Some((b, bp)) if b == val => {
                // finest minimizer: keep the one with more blocks
                if bp.len() >= p.len() {
                    Some((b, bp))
                } else {
                    Some((val, p))
                }
            }
            _ => Some((val, p)),
        };
    }
    best.ok_or_else(|| PspError::Invalid("need at least two users".into()))
}

pub(crate) fn require_users(o: &dyn Oracle) -> Result<()> {
    if o.size() < 2 {
        return Err(PspError::Invalid("need at least two users".into()));
    }
    if o.size() > set::MAX_USERS {
        return Err(PspError::TooLarge { what: "users", size: o.size(), limit: set::MAX_USERS });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{q, r};
    use crate::set::from_indices;

    #[test]
    fn weighted_ordering_examples() {
        let w = [r(5), r(1), r(1), r(2), r(3)];
        assert_eq!(weighted_ordering(&w).unwrap(), vec![1, 2, 3, 4, 0]);
        assert_eq!(weighted_ordering(&[r(2); 4]).unwrap(), vec![0, 1, 2, 3]);
        assert!(weighted_ordering(&[r(1), r(0)]).is_err());
        assert!(weighted_ordering(&[r(1), r(-2)]).is_err());
    }

    #[test]
    fn mmi_of_example_one() {
        let o = fixtures::example1();
        let (i, p) = mmi_brute(&o).unwrap();
        assert_eq!(i, q(7, 2));
        let fp = Partition::new(vec![from_indices([0, 3, 4]), from_indices([1]), from_indices([2])]).unwrap();
        assert_eq!(p, fp);
    }

    #[test]
    fn rejects_broken_chains() {
        let s = Partition::singletons(0b11);
        let w = Partition::whole(0b11);
        assert!(Psp::new(r(0), r(2), vec![r(1)], vec![s.clone(), w.clone()]).is_ok());
        assert!(Psp::new(r(0), r(2), vec![r(3)], vec![s.clone(), w.clone()]).is_err());
        assert!(Psp::new(r(0), r(2), vec![r(1)], vec![w.clone(), s.clone()]).is_err());
        assert!(Psp::new(r(0), r(2), vec![], vec![w]).is_err());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("flow".parse::<Algorithm>().is_err());
    }
}
