//! Reference sequence by partition enumeration.

use super::{require_users, Psp};
use crate::error::{PspError, Result};
use crate::oracle::{self, Oracle};
use crate::partition::{enumerate_partitions, meet, Partition};
use crate::rational::Rational;
use crate::segmented::{Closure, Segmented};

pub const BRUTE_PSP_USERS: usize = 10;

/// Every partition's line `α ↦ |P|(α - f(V)) + f[P]` is tabulated once;
/// the finest minimizer is evaluated at each pairwise crossing of the
/// lower envelope candidates and on the open pieces between them.
pub fn brute_psp(o: &dyn Oracle) -> Result<Psp> {
    require_users(o)?;
    let n = o.size();
    if n > BRUTE_PSP_USERS {
        return Err(PspError::TooLarge { what: "brute-force sequence", size: n, limit: BRUTE_PSP_USERS });
    }
    let (lo, total) = oracle::alpha_window(o)?;
    let lines: Vec<(usize, Rational, Partition)> = enumerate_partitions(oracle::ground(o))?
        .map(|p| (p.len(), oracle::sum_over(o, p.blocks()), p))
        .collect();
    // smallest f[P] per block count; only these can reach the envelope
    let mut best: Vec<Option<Rational>> = vec![None; n + 1];
    for (k, v, _) in &lines {
        best[*k] = Some(best[*k].map_or(*v, |b| b.min(*v)));
    }
    let mut cuts = Vec::new();
    for j in 1..=n {
        for k in j + 1..=n {
            if let (Some(cj), Some(ck)) = (best[j], best[k]) {
                cuts.push(total - (ck - cj) / Rational::from(k - j));
            }
        }
    }
    let finest = |alpha: Rational| {
        let mut cur: Option<(Rational, Partition)> = None;
        for (k, v, p) in &lines {
            let val = Rational::from(*k) * (alpha - total) + *v;
            cur = match cur {
                Some((b, bp)) if b < val => Some((b, bp)),
                Some((b, bp)) if b == val => Some((b, meet(&bp, p))),
                _ => Some((val, p.clone())),
            };
        }
        cur.expect("nonempty").1
    };
    let seg = Segmented::tabulate(lo, total, Closure::Right, cuts, finest);
    Psp::from_segmented(&seg)
}
