//! The decomposition algorithm: bisect between the singletons and `{V}`,
//! probing with a full saturation pass at each crossing.

use super::{require_users, Psp};
use crate::dilworth::coord_sat_cap_with;
use crate::error::{PspError, Result};
use crate::oracle::{self, Oracle};
use crate::partition::Partition;
use crate::rational::Rational;
use crate::sfm::Backend;

pub fn decomposition_algorithm(o: &dyn Oracle) -> Result<Psp> {
    Ok(decomposition_algorithm_with(Backend::Auto, o)?.0)
}

/// Also returns the number of minimizations performed.
pub fn decomposition_algorithm_with(backend: Backend, o: &dyn Oracle) -> Result<(Psp, u64)> {
    require_users(o)?;
    let (lo, total) = oracle::alpha_window(o)?;
    let order: Vec<usize> = (0..o.size()).collect();
    let v = oracle::ground(o);
    let mut pairs = Vec::new();
    let mut calls = 0;
    split(backend, o, &order, &Partition::singletons(v), &Partition::whole(v), 0, &mut pairs, &mut calls)?;
    Ok((Psp::from_adjacent(lo, total, pairs)?, calls))
}

#[allow(clippy::too_many_arguments)]
fn split(
    backend: Backend,
    o: &dyn Oracle,
    order: &[usize],
    pd: &Partition,
    pu: &Partition,
    depth: usize,
    pairs: &mut Vec<(Rational, Partition, Partition)>,
    calls: &mut u64,
) -> Result<()> {
    if depth > 2 * o.size() {
        return Err(PspError::Internal("decomposition does not converge".into()));
    }
    let num = oracle::sum_over(o, pd.blocks()) - oracle::sum_over(o, pu.blocks());
    let alpha = oracle::total(o) - num / Rational::from(pd.len() - pu.len());
    let res = coord_sat_cap_with(backend, o, alpha, order)?;
    *calls += order.len() as u64;
    let q = res.partition;
    if q == *pd {
        pairs.push((alpha, pd.clone(), pu.clone()));
        return Ok(());
    }
    if q.len() <= pu.len() || q.len() >= pd.len() {
        return Err(PspError::Internal(format!("probe at {alpha} left the bracketing pair")));
    }
    split(backend, o, order, pd, &q, depth + 1, pairs, calls)?;
    split(backend, o, order, &q, pu, depth + 1, pairs, calls)
}
