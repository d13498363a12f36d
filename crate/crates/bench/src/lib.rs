//! Instance generators shared by the benchmarks.

use psp_core::oracle::{BitAssignmentSource, MatrixSourceGF2, WeightedGraphCut};
use psp_core::Rational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` users over `2n` bits, each bit held with probability 0.4.
pub fn bits(rng: &mut ChaCha8Rng, n: usize) -> BitAssignmentSource {
    let m = 2 * n;
    let users: Vec<Vec<String>> = (0..n)
        .map(|_| {
            let mut own: Vec<String> = (0..m).filter(|_| rng.gen_bool(0.4)).map(|b| format!("b{b}")).collect();
            if own.is_empty() {
                own.push(format!("b{}", rng.gen_range(0..m)));
            }
            own
        })
        .collect();
    BitAssignmentSource::new(&users).expect("valid source")
}

/// Connected random graph: a path plus extra edges, weights in `1..=4`.
pub fn graph(rng: &mut ChaCha8Rng, n: usize) -> WeightedGraphCut {
    let mut edges: Vec<(usize, usize, Rational)> =
        (1..n).map(|v| (v - 1, v, Rational::from(rng.gen_range(1..=4i64)))).collect();
    for a in 0..n {
        for b in a + 2..n {
            if rng.gen_bool(0.3) {
                edges.push((a, b, Rational::from(rng.gen_range(1..=4i64))));
            }
        }
    }
    WeightedGraphCut::new(n, edges).expect("valid graph")
}

/// Each user observes two random rows of width `n + 2`.
pub fn linear(rng: &mut ChaCha8Rng, n: usize) -> MatrixSourceGF2 {
    let width = n + 2;
    let rows: Vec<Vec<String>> = (0..n)
        .map(|_| {
            (0..2)
                .map(|_| {
                    let mut s: String = (0..width).map(|_| if rng.gen_bool(0.5) { '1' } else { '0' }).collect();
                    if !s.contains('1') {
                        s.replace_range(0..1, "1");
                    }
                    s
                })
                .collect()
        })
        .collect();
    MatrixSourceGF2::from_strings(&rows).expect("valid rows")
}
