//! Submodular minimization over unions of fused blocks.
//!
//! Every routine returns the minimal minimizer (intersection of all
//! minimizers) and the maximal one (their union).

mod minnorm;

pub use minnorm::min_norm_point;

use crate::affine::AffineFn;
use crate::error::{PspError, Result};
use crate::partition::Partition;
use crate::rational::Rational;
use crate::set::{self, Set};

/// Largest number of free blocks the exhaustive backend accepts.
pub const BRUTE_LIMIT: usize = 22;

/// Blocks of a carrier; feasible sets are unions of blocks that contain
/// the designated one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusedGround {
    blocks: Vec<Set>,
    designated: Option<usize>,
}

impl FusedGround {
    pub fn new(blocks: Vec<Set>, designated: usize) -> Result<FusedGround> {
        Partition::new(blocks.clone())?;
        if designated >= blocks.len() {
            return Err(PspError::Invalid("designated block out of range".into()));
        }
        Ok(FusedGround { blocks, designated: Some(designated) })
    }

    /// No forced block; the empty union is feasible.
    pub fn free(blocks: Vec<Set>) -> Result<FusedGround> {
        Partition::new(blocks.clone())?;
        Ok(FusedGround { blocks, designated: None })
    }

    /// `partition ⊔ {{i}}` with the new singleton forced.
    pub fn extend(partition: &Partition, i: usize) -> FusedGround {
        let mut blocks = partition.blocks().to_vec();
        blocks.push(set::singleton(i));
        let designated = blocks.len() - 1;
        FusedGround { blocks, designated: Some(designated) }
    }

    pub fn blocks(&self) -> &[Set] {
        &self.blocks
    }

    pub fn designated(&self) -> Option<Set> {
        self.designated.map(|d| self.blocks[d])
    }

    pub fn carrier(&self) -> Set {
        self.blocks.iter().fold(0, |a, b| a | b)
    }

    fn base(&self) -> Set {
        self.designated().unwrap_or(0)
    }

    fn free_blocks(&self) -> Vec<Set> {
        self.blocks.iter().enumerate().filter(|(k, _)| Some(*k) != self.designated).map(|(_, b)| *b).collect()
    }

    /// The blocks making up a feasible union.
    pub fn family(&self, x: Set) -> Vec<Set> {
        self.blocks.iter().copied().filter(|b| set::is_subset(*b, x)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SfmResult {
    pub min_value: Rational,
    pub minimal: Set,
    pub maximal: Set,
    pub probe_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Exhaustive enumeration, at most [`BRUTE_LIMIT`] free blocks.
    #[default]
    Brute,
    /// Minimum-norm base point; no size limit.
    MinNorm,
    /// Exhaustive when small enough, otherwise minimum-norm point.
    Auto,
}

fn exhaustive<K: Ord + Clone>(ground: &FusedGround, f: impl Fn(Set) -> K) -> Result<(K, Set, Set, u64)> {
    let free = ground.free_blocks();
    if free.len() > BRUTE_LIMIT {
        return Err(PspError::TooLarge { what: "fused ground", size: free.len(), limit: BRUTE_LIMIT });
    }
    let mut cur = ground.base();
    let mut best = f(cur);
    let (mut minimal, mut maximal) = (cur, cur);
    let mut probes = 1u64;
    // Gray-code walk: one block toggles per step
    for step in 1u64..1 << free.len() {
        cur ^= free[step.trailing_zeros() as usize];
        let v = f(cur);
        probes += 1;
        match v.cmp(&best) {
            std::cmp::Ordering::Less => {
                best = v;
                minimal = cur;
                maximal = cur;
            }
            std::cmp::Ordering::Equal => {
                minimal &= cur;
                maximal |= cur;
            }
            std::cmp::Ordering::Greater => {}
        }
    }
    Ok((best, minimal, maximal, probes))
}

/// `min g(X)` over unions `X` of blocks containing the designated block.
pub fn sfm_forced(g: &dyn Fn(Set) -> Rational, ground: &FusedGround) -> Result<SfmResult> {
    sfm_forced_with(Backend::Brute, g, ground)
}

pub fn sfm_forced_with(backend: Backend, g: &dyn Fn(Set) -> Rational, ground: &FusedGround) -> Result<SfmResult> {
    let use_brute = match backend {
        Backend::Brute => true,
        Backend::MinNorm => false,
        Backend::Auto => ground.free_blocks().len() <= BRUTE_LIMIT,
    };
    if use_brute {
        let (min_value, minimal, maximal, probe_count) = exhaustive(ground, g)?;
        return Ok(SfmResult { min_value, minimal, maximal, probe_count });
    }
    // contract the forced block: h(Y) = g(Y ∪ D) - g(D) on the free blocks
    let base = ground.base();
    let free = ground.free_blocks();
    let union = |mask: &[bool]| free.iter().zip(mask).filter(|(_, m)| **m).fold(base, |a, (b, _)| a | b);
    let g0 = g(base);
    let mut probes = 1u64;
    let mnp = min_norm_point(free.len(), &mut |mask: &[bool]| {
        probes += 1;
        g(union(mask)) - g0
    })?;
    let minimal = union(&mnp.iter().map(|x| x.signum() < 0).collect::<Vec<_>>());
    let maximal = union(&mnp.iter().map(|x| x.signum() <= 0).collect::<Vec<_>>());
    let min_value = g(minimal);
    probes += 1;
    Ok(SfmResult { min_value, minimal, maximal, probe_count: probes })
}

/// Minimizer of `g_{λ0 - ε}` for infinitesimal `ε > 0`.
///
/// `germ(X)` is the affine piece of `λ ↦ g_λ(X)` just left of `λ0`; sets are
/// compared by value at `λ0`, then by larger left slope.
pub fn sfm_left_limit(germ: &dyn Fn(Set) -> AffineFn, lambda0: Rational, ground: &FusedGround) -> Result<SfmResult> {
    let (key, minimal, maximal, probe_count) = exhaustive(ground, |x| {
        let a = germ(x);
        (a.eval(lambda0), -a.slope)
    })?;
    Ok(SfmResult { min_value: key.0, minimal, maximal, probe_count })
}

/// `min g(X)` over all unions of `blocks`, the empty set included.
pub fn sfm_unconstrained(g: &dyn Fn(Set) -> Rational, blocks: &[Set]) -> Result<SfmResult> {
    let ground = FusedGround::free(blocks.to_vec())?;
    sfm_forced_with(Backend::Brute, g, &ground)
}

pub fn sfm_unconstrained_with(backend: Backend, g: &dyn Fn(Set) -> Rational, blocks: &[Set]) -> Result<SfmResult> {
    let ground = FusedGround::free(blocks.to_vec())?;
    sfm_forced_with(backend, g, &ground)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{residual, Oracle, TableOracle};
    use crate::rational::r;
    use crate::{fixtures, set::from_indices};
    use rand::{Rng, SeedableRng};

    #[test]
    fn example_one_second_step() {
        // g = f_α - r_α with r_4 = f_α({4}), r_5 = α - 10
        let o = fixtures::example1();
        for (alpha, expect) in [(r(3), from_indices([4])), (r(6), from_indices([3, 4]))] {
            let rate = |x: Set| {
                let mut s = Rational::ZERO;
                if set::contains(x, 3) {
                    s += residual(&o, alpha, from_indices([3]));
                }
                if set::contains(x, 4) {
                    s += alpha - r(10);
                }
                s
            };
            let g = |x: Set| residual(&o, alpha, x) - rate(x);
            let ground = FusedGround::new(vec![from_indices([3]), from_indices([4])], 1).unwrap();
            let res = sfm_forced(&g, &ground).unwrap();
            assert_eq!(res.minimal, expect, "alpha {alpha}");
        }
    }

    #[test]
    fn zero_objective_returns_designated() {
        let ground = FusedGround::new(vec![0b1, 0b110, 0b1000], 1).unwrap();
        let res = sfm_forced(&|_| Rational::ZERO, &ground).unwrap();
        assert_eq!(res.minimal, 0b110);
        assert_eq!(res.maximal, 0b1111);
        assert_eq!(res.min_value, Rational::ZERO);
        assert_eq!(ground.family(res.maximal).len(), 3);
    }

    #[test]
    fn modular_mixed_signs() {
        let w = [r(2), r(-1), r(0), r(-3)];
        let g = |x: Set| set::members(x).map(|i| w[i]).sum();
        let res = sfm_unconstrained(&g, &[1, 2, 4, 8]).unwrap();
        assert_eq!(res.minimal, 0b1010);
        assert_eq!(res.maximal, 0b1110);
        assert_eq!(res.min_value, r(-4));
    }

    #[test]
    fn disconnected_cut() {
        let g = crate::oracle::WeightedGraphCut::new(4, vec![(0, 1, r(1)), (2, 3, r(2))]).unwrap();
        let res = sfm_unconstrained(&|x| g.eval(x), &[1, 2, 4, 8]).unwrap();
        assert_eq!(res.min_value, r(0));
        assert_eq!(res.minimal, 0);
        assert_eq!(res.maximal, 0b1111);
        let forced = sfm_forced(&|x| g.eval(x), &FusedGround::new(vec![1, 2, 4, 8], 0).unwrap()).unwrap();
        assert_eq!(forced.minimal, 0b0011);
    }

    #[test]
    fn left_limit_tie_break() {
        // both sets worth 0 at λ0 = 1; {0,1} grows slower as λ decreases
        let germ = |x: Set| match x {
            0b01 => AffineFn::new(r(-1), r(1)),
            _ => AffineFn::new(r(1), r(-1)),
        };
        let ground = FusedGround::new(vec![0b01, 0b10], 0).unwrap();
        let res = sfm_left_limit(&germ, r(1), &ground).unwrap();
        assert_eq!(res.minimal, 0b11);
        // without a tie the plain minimizer is returned
        let germ2 = |x: Set| AffineFn::constant(if x == 0b01 { r(0) } else { r(1) });
        assert_eq!(sfm_left_limit(&germ2, r(1), &ground).unwrap().minimal, 0b01);
    }

    fn random_table(rng: &mut impl Rng, n: usize) -> TableOracle {
        // random coverage plus a random modular part keeps submodularity
        let bits: Vec<u32> = (0..n).map(|_| rng.gen_range(0..64)).collect();
        let w: Vec<i128> = (0..n).map(|_| rng.gen_range(-4..3)).collect();
        let vals = (0..1u64 << n)
            .map(|s| {
                let cov = set::members(s).fold(0u32, |a, i| a | bits[i]).count_ones() as i128;
                r(cov + set::members(s).map(|i| w[i]).sum::<i128>())
            })
            .collect();
        TableOracle::new(n, vals).unwrap()
    }

    #[test]
    fn minimizers_form_a_lattice() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..60 {
            let n = rng.gen_range(2..=12);
            let t = random_table(&mut rng, n);
            let blocks: Vec<Set> = (0..n).map(set::singleton).collect();
            let res = sfm_unconstrained(&|x| t.eval(x), &blocks).unwrap();
            let all: Vec<Set> = set::subsets(set::full(n)).filter(|x| t.eval(*x) == res.min_value).collect();
            assert_eq!(all.iter().fold(set::full(n), |a, b| a & b), res.minimal);
            assert_eq!(all.iter().fold(0, |a, b| a | b), res.maximal);
            for a in &all {
                for b in &all {
                    assert_eq!(t.eval(a & b), res.min_value);
                    assert_eq!(t.eval(a | b), res.min_value);
                }
            }
        }
    }

    #[test]
    fn left_limit_matches_small_epsilon() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let n = rng.gen_range(2..=6);
            // per-set affine family with small integer data, many ties at λ0 = 2
            let coef: Vec<(i128, i128)> =
                (0..1u64 << n).map(|_| (rng.gen_range(-2..3), rng.gen_range(-2..3))).collect();
            let germ = |x: Set| {
                let (a, b) = coef[x as usize];
                // value at 2 is b, slope a
                AffineFn::new(r(a), r(b) - r(2 * a))
            };
            let ground = FusedGround::new((0..n).map(set::singleton).collect(), 0).unwrap();
            let left = sfm_left_limit(&germ, r(2), &ground).unwrap();
            let eps = crate::rational::q(1, 1000);
            let plain = sfm_forced(&|x| germ(x).eval(r(2) - eps), &ground).unwrap();
            assert_eq!(left.minimal, plain.minimal);
            assert_eq!(left.maximal, plain.maximal);
        }
    }

    #[test]
    fn min_norm_backend_agrees_with_brute() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..80 {
            let n = rng.gen_range(2..=8);
            let t = random_table(&mut rng, n);
            let blocks: Vec<Set> = (0..n).map(set::singleton).collect();
            let d = rng.gen_range(0..n);
            let ground = FusedGround::new(blocks.clone(), d).unwrap();
            let a = sfm_forced_with(Backend::Brute, &|x| t.eval(x), &ground).unwrap();
            let b = sfm_forced_with(Backend::MinNorm, &|x| t.eval(x), &ground).unwrap();
            assert_eq!((a.min_value, a.minimal, a.maximal), (b.min_value, b.minimal, b.maximal));
            let a = sfm_unconstrained(&|x| t.eval(x), &blocks).unwrap();
            let b = sfm_unconstrained_with(Backend::MinNorm, &|x| t.eval(x), &blocks).unwrap();
            assert_eq!((a.min_value, a.minimal, a.maximal), (b.min_value, b.minimal, b.maximal));
        }
    }

    #[test]
    fn brute_limit_is_enforced() {
        let blocks: Vec<Set> = (0..24).map(set::singleton).collect();
        let ground = FusedGround::new(blocks, 0).unwrap();
        assert!(matches!(sfm_forced(&|_| Rational::ZERO, &ground), Err(PspError::TooLarge { .. })));
        let g = |x: Set| Rational::from(set::len(x) as i64);
        let res = sfm_forced_with(Backend::Auto, &g, &ground).unwrap();
        assert_eq!(res.minimal, 1);
    }
}
