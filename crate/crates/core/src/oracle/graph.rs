use crate::error::{PspError, Result};
use crate::oracle::Oracle;
use crate::rational::Rational;
use crate::set::{self, Set};

/// Cut function of an undirected graph with positive edge weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraphCut {
    n: usize,
    edges: Vec<(usize, usize, Rational)>,
}

impl WeightedGraphCut {
    pub fn new(n: usize, edges: Vec<(usize, usize, Rational)>) -> Result<WeightedGraphCut> {
        if n > set::MAX_USERS {
            return Err(PspError::TooLarge { what: "vertices", size: n, limit: set::MAX_USERS });
        }
        for &(u, v, w) in &edges {
            if u >= n || v >= n {
                return Err(PspError::Invalid(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(PspError::Invalid("self-loops are not allowed".into()));
            }
            if w <= Rational::ZERO {
                return Err(PspError::Invalid(format!("edge weight {w} is not positive")));
            }
        }
        Ok(WeightedGraphCut { n, edges })
    }

    pub fn edges(&self) -> &[(usize, usize, Rational)] {
        &self.edges
    }

    pub fn total_weight(&self) -> Rational {
        self.edges.iter().map(|e| e.2).sum()
    }
}

impl Oracle for WeightedGraphCut {
    fn size(&self) -> usize {
        self.n
    }

    fn eval(&self, x: Set) -> Rational {
        self.edges.iter().filter(|(u, v, _)| set::contains(x, *u) != set::contains(x, *v)).map(|e| e.2).sum()
    }

    fn is_graph_cut(&self) -> bool {
        true
    }

    fn lower_bound(&self) -> Option<Rational> {
        Some(Rational::ZERO)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{check_submodular, total};
    use crate::rational::q;
    use rand::{Rng, SeedableRng};

    #[test]
    fn rejects_bad_edges() {
        assert!(WeightedGraphCut::new(2, vec![(0, 1, Rational::ZERO)]).is_err());
        assert!(WeightedGraphCut::new(2, vec![(0, 0, Rational::ONE)]).is_err());
        assert!(WeightedGraphCut::new(2, vec![(0, 2, Rational::ONE)]).is_err());
    }

    #[test]
    fn symmetric_and_null_on_ground() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 2..=8 {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        edges.push((u, v, q(rng.gen_range(1..9), rng.gen_range(1..4))));
                    }
                }
            }
            let g = WeightedGraphCut::new(n, edges).unwrap();
            assert_eq!(total(&g), Rational::ZERO);
            let v = set::full(n);
            for x in set::subsets(v) {
                assert_eq!(g.eval(x), g.eval(v & !x));
            }
            assert!(check_submodular(&g).unwrap());
        }
    }
}
