//! Small reference sources used by tests, benches and the CLI examples.

use crate::oracle::{BitAssignmentSource, WeightedGraphCut};
use crate::rational::Rational;

/// Five users over bits `a..j`; `f(V) = 10`.
pub fn example1() -> BitAssignmentSource {
    BitAssignmentSource::new(&[
        vec!["b", "c", "d", "h", "i"],
        vec!["e", "f", "h", "i"],
        vec!["b", "c", "e", "j"],
        vec!["a", "b", "c", "d", "f", "g", "i", "j"],
        vec!["a", "b", "c", "f", "i", "j"],
    ])
    .expect("valid")
}

/// The ordering `(4, 5, 2, 3, 1)` as zero-based indices.
pub const EXAMPLE1_ORDER: [usize; 5] = [3, 4, 1, 2, 0];

/// Four users sharing pairwise bits; `f(V) = 4`.
pub fn example3() -> BitAssignmentSource {
    BitAssignmentSource::new(&[vec!["a", "b"], vec!["b", "c"], vec!["a", "c"], vec!["c", "d"]]).expect("valid")
}

/// The first three users of [`example3`].
pub fn example3_prefix() -> BitAssignmentSource {
    BitAssignmentSource::new(&[vec!["a", "b"], vec!["b", "c"], vec!["a", "c"]]).expect("valid")
}

/// Unit-weight triangle.
pub fn triangle() -> WeightedGraphCut {
    WeightedGraphCut::new(3, vec![(0, 1, Rational::ONE), (1, 2, Rational::ONE), (0, 2, Rational::ONE)])
        .expect("valid")
}

/// `Z1 = (a)`, `Z2 = (a, b)`.
pub fn two_user() -> BitAssignmentSource {
    BitAssignmentSource::new(&[vec!["a"], vec!["a", "b"]]).expect("valid")
}
