use crate::error::{PspError, Result};
use crate::oracle::Oracle;
use crate::rational::Rational;
use crate::set::{self, Set};

/// Finite linear source: user `i` observes `rows[i] · z` over GF(2);
/// `f(X)` is the rank of the stacked rows of `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixSourceGF2 {
    width: usize,
    rows: Vec<Vec<Vec<u64>>>,
}

impl MatrixSourceGF2 {
    /// Rows are given as `0`/`1` strings of a common width.
    pub fn from_strings<S: AsRef<str>>(rows: &[Vec<S>]) -> Result<MatrixSourceGF2> {
        if rows.len() > set::MAX_USERS {
            return Err(PspError::TooLarge { what: "users", size: rows.len(), limit: set::MAX_USERS });
        }
        let mut width = None;
        let mut out = Vec::with_capacity(rows.len());
        for user in rows {
            let mut packed = Vec::new();
            for row in user {
                let row = row.as_ref().trim();
                if !row.bytes().all(|b| b == b'0' || b == b'1') || row.is_empty() {
                    return Err(PspError::Invalid(format!("bad GF(2) row `{row}`")));
                }
                if *width.get_or_insert(row.len()) != row.len() {
                    return Err(PspError::Invalid("GF(2) rows differ in width".into()));
                }
                let mut w = vec![0u64; row.len().div_ceil(64)];
                for (k, b) in row.bytes().enumerate() {
                    if b == b'1' {
                        w[k / 64] |= 1u64 << (k % 64);
                    }
                }
                packed.push(w);
            }
            out.push(packed);
        }
        Ok(MatrixSourceGF2 { width: width.unwrap_or(0), rows: out })
    }

    pub fn width(&self) -> usize {
        self.width
    }
}

/// Rank over GF(2) of bit-packed rows.
pub fn gf2_rank(rows: impl IntoIterator<Item = Vec<u64>>) -> usize {
    // basis keyed by pivot position, each vector reduced against earlier pivots
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    for mut v in rows {
        for (p, b) in &basis {
            if v[p / 64] >> (p % 64) & 1 == 1 {
                for (x, y) in v.iter_mut().zip(b) {
                    *x ^= y;
                }
            }
        }
        if let Some(p) = first_one(&v) {
            basis.push((p, v));
        }
    }
    basis.len()
}

fn first_one(v: &[u64]) -> Option<usize> {
    v.iter().enumerate().find(|(_, w)| **w != 0).map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
}

impl Oracle for MatrixSourceGF2 {
    fn size(&self) -> usize {
        self.rows.len()
    }

    fn eval(&self, x: Set) -> Rational {
        let stacked = set::members(x).flat_map(|i| self.rows[i].iter().cloned());
        Rational::from(gf2_rank(stacked))
    }

    fn is_monotone(&self) -> bool {
        true
    }

    fn lower_bound(&self) -> Option<Rational> {
        Some(Rational::ZERO)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        let m = MatrixSourceGF2::from_strings(&[vec!["110", "011"], vec!["101"], vec!["111"]]).unwrap();
        assert_eq!(m.eval(0b001), Rational::from(2));
        // 110 + 011 = 101, so user 2 adds nothing
        assert_eq!(m.eval(0b011), Rational::from(2));
        assert_eq!(m.eval(0b111), Rational::from(3));
        assert_eq!(m.eval(0), Rational::ZERO);
        assert!(MatrixSourceGF2::from_strings(&[vec!["10"], vec!["1"]]).is_err());
        assert!(MatrixSourceGF2::from_strings(&[vec!["12"]]).is_err());
    }

    #[test]
    fn wide_rows() {
        let a: String = (0..130).map(|k| if k % 3 == 0 { '1' } else { '0' }).collect();
        let b: String = (0..130).map(|k| if k == 129 { '1' } else { '0' }).collect();
        let m = MatrixSourceGF2::from_strings(&[vec![a.clone()], vec![a], vec![b]]).unwrap();
        assert_eq!(m.eval(0b011), Rational::from(1));
        assert_eq!(m.eval(0b111), Rational::from(2));
    }
}
