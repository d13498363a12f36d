use crate::error::{PspError, Result};
use crate::oracle::{local_violation, Oracle, CHECK_LIMIT};
use crate::rational::Rational;
use crate::set::{self, Set};

/// Explicit value per subset, indexed by bitmask. Checked at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableOracle {
    n: usize,
    values: Vec<Rational>,
    monotone: bool,
}

impl TableOracle {
    pub fn new(n: usize, values: Vec<Rational>) -> Result<TableOracle> {
        if n > CHECK_LIMIT {
            return Err(PspError::TooLarge { what: "table oracle", size: n, limit: CHECK_LIMIT });
        }
        if values.len() != 1 << n {
            return Err(PspError::Invalid(format!("table needs {} entries, got {}", 1u64 << n, values.len())));
        }
        if !values[0].is_zero() {
            return Err(PspError::Invalid("table value on the empty set must be 0".into()));
        }
        if let Some((x, y)) = local_violation(n, |s| values[s as usize]) {
            return Err(PspError::NotSubmodular { x, y });
        }
        let monotone = (0..1u64 << n)
            .all(|s| (0..n).all(|i| set::contains(s, i) || values[(s | set::singleton(i)) as usize] >= values[s as usize]));
        Ok(TableOracle { n, values, monotone })
    }

    /// Tabulates another oracle.
    pub fn from_oracle(o: &dyn Oracle) -> Result<TableOracle> {
        let n = o.size();
        if n > CHECK_LIMIT {
            return Err(PspError::TooLarge { what: "table oracle", size: n, limit: CHECK_LIMIT });
        }
        TableOracle::new(n, (0..1u64 << n).map(|s| o.eval(s)).collect())
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

impl Oracle for TableOracle {
    fn size(&self) -> usize {
        self.n
    }

    fn eval(&self, x: Set) -> Rational {
        self.values[x as usize]
    }

    fn is_monotone(&self) -> bool {
        self.monotone
    }

    fn lower_bound(&self) -> Option<Rational> {
        self.values[1..].iter().copied().min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::r;

    #[test]
    fn detects_hand_built_violation() {
        // f({1}) + f({2}) = 2 < f(∅) + f({1,2}) = 3
        let err = TableOracle::new(2, vec![r(0), r(1), r(1), r(3)]).unwrap_err();
        assert_eq!(err, PspError::NotSubmodular { x: 0b01, y: 0b10 });
        assert!(TableOracle::new(2, vec![r(1), r(1), r(1), r(1)]).is_err());
        assert!(TableOracle::new(2, vec![r(0), r(1)]).is_err());
    }

    #[test]
    fn pairwise_and_local_forms_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let n = 3;
            let mut v: Vec<Rational> = (0..8).map(|_| r(rng.gen_range(0..5))).collect();
            v[0] = r(0);
            let pairwise_ok = (0..8usize).all(|x| (0..8usize).all(|y| v[x] + v[y] >= v[x & y] + v[x | y]));
            assert_eq!(TableOracle::new(n, v).is_ok(), pairwise_ok);
        }
    }
}
