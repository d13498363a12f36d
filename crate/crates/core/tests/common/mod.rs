#![allow(dead_code)]

use psp_core::oracle::{BitAssignmentSource, TableOracle};
use psp_core::Rational;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each user draws a nonempty subset of `1..=8` shared bits.
pub fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> BitAssignmentSource {
    let m = rng.gen_range(2..=8usize);
    let labels: Vec<String> = (0..m).map(|b| format!("b{b}")).collect();
    let users: Vec<Vec<String>> = (0..n)
        .map(|_| {
            let mut own: Vec<String> = labels.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
            if own.is_empty() {
                own.push(labels.choose(rng).unwrap().clone());
            }
            own
        })
        .collect();
    BitAssignmentSource::new(&users).expect("valid source")
}

pub fn random_order(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

/// Submodular, generally non-monotone table: capped weighted coverage plus
/// a modular term and a cut term.
pub fn random_table(rng: &mut ChaCha8Rng, n: usize) -> TableOracle {
    let caps: Vec<(u64, i64, Vec<i64>)> = (0..3)
        .map(|_| (rng.gen_range(1..1u64 << n), rng.gen_range(1..5), (0..n).map(|_| rng.gen_range(0..3)).collect()))
        .collect();
    let modular: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
    let edges: Vec<(usize, usize, i64)> =
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).map(|(a, b)| (a, b, rng.gen_range(0..3))).collect();
    let values = (0..1u64 << n)
        .map(|x| {
            if x == 0 {
                return Rational::ZERO;
            }
            let has = |i: usize| x >> i & 1 == 1;
            let mut s: i64 = caps
                .iter()
                .map(|(mask, cap, w)| (0..n).filter(|&i| has(i) && mask >> i & 1 == 1).map(|i| w[i]).sum::<i64>().min(*cap))
                .sum();
            s += (0..n).filter(|&i| has(i)).map(|i| modular[i]).sum::<i64>();
            s += edges.iter().filter(|(a, b, _)| has(*a) != has(*b)).map(|e| e.2).sum::<i64>();
            Rational::from(s)
        })
        .collect();
    TableOracle::new(n, values).expect("submodular by construction")
}
